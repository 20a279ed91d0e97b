//! Scalar reverse-accumulation tape.
//!
//! Each node stores its forward value and the local derivatives with respect
//! to its parents; the backward pass walks the arena once in reverse. The
//! parameter count here is tiny, so a hand-rolled tape validated against
//! finite differences beats pulling in a framework.

/// Handle to a tape node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Var(u32);

struct Node {
    val: f64,
    deps_start: u32,
    deps_len: u32,
}

/// Arena of nodes plus a flat (parent, ∂self/∂parent) dependency pool.
pub struct Tape {
    nodes: Vec<Node>,
    deps: Vec<(u32, f64)>,
}

impl Tape {
    pub fn new() -> Self {
        Tape { nodes: Vec::new(), deps: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, v: Var) -> f64 {
        self.nodes[v.0 as usize].val
    }

    /// Leaf node (parameter or constant); receives gradient but propagates
    /// nothing further.
    pub fn leaf(&mut self, val: f64) -> Var {
        self.push(val, &[])
    }

    /// Raw node constructor: the caller supplies the forward value and the
    /// (parent, local gradient) list. This lets callers reuse values computed
    /// outside the tape (e.g. a wrapped angle) while keeping exact adjoints.
    pub fn push(&mut self, val: f64, deps: &[(Var, f64)]) -> Var {
        let start = self.deps.len() as u32;
        for (p, g) in deps {
            self.deps.push((p.0, *g));
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(Node { val, deps_start: start, deps_len: deps.len() as u32 });
        Var(id)
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        self.push(self.value(a) + self.value(b), &[(a, 1.0), (b, 1.0)])
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Var {
        self.push(self.value(a) - self.value(b), &[(a, 1.0), (b, -1.0)])
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Var {
        let (va, vb) = (self.value(a), self.value(b));
        self.push(va * vb, &[(a, vb), (b, va)])
    }

    pub fn div(&mut self, a: Var, b: Var) -> Var {
        let (va, vb) = (self.value(a), self.value(b));
        self.push(va / vb, &[(a, 1.0 / vb), (b, -va / (vb * vb))])
    }

    pub fn exp(&mut self, a: Var) -> Var {
        let e = self.value(a).exp();
        self.push(e, &[(a, e)])
    }

    pub fn ln(&mut self, a: Var) -> Var {
        let v = self.value(a);
        self.push(v.ln(), &[(a, 1.0 / v)])
    }

    pub fn sqrt(&mut self, a: Var) -> Var {
        let v = self.value(a).sqrt();
        // Subgradient 0 at the origin keeps distance gradients finite.
        let g = if v > 0.0 { 0.5 / v } else { 0.0 };
        self.push(v, &[(a, g)])
    }

    pub fn relu(&mut self, a: Var) -> Var {
        let v = self.value(a);
        if v > 0.0 {
            self.push(v, &[(a, 1.0)])
        } else {
            self.push(0.0, &[(a, 0.0)])
        }
    }

    pub fn scale(&mut self, a: Var, c: f64) -> Var {
        self.push(c * self.value(a), &[(a, c)])
    }

    pub fn add_const(&mut self, a: Var, c: f64) -> Var {
        self.push(self.value(a) + c, &[(a, 1.0)])
    }

    pub fn sum(&mut self, xs: &[Var]) -> Var {
        let val: f64 = xs.iter().map(|x| self.value(*x)).sum();
        let deps: Vec<(Var, f64)> = xs.iter().map(|x| (*x, 1.0)).collect();
        self.push(val, &deps)
    }

    /// Σ cᵢ·xᵢ with constant coefficients.
    pub fn lincomb(&mut self, xs: &[Var], coeffs: &[f64]) -> Var {
        debug_assert_eq!(xs.len(), coeffs.len());
        let val: f64 = xs.iter().zip(coeffs).map(|(x, c)| c * self.value(*x)).sum();
        let deps: Vec<(Var, f64)> = xs.iter().zip(coeffs).map(|(x, c)| (*x, *c)).collect();
        self.push(val, &deps)
    }

    /// Σ xᵢ·yᵢ + bias where both factors are nodes.
    pub fn dot_bias(&mut self, xs: &[Var], ys: &[Var], bias: Var) -> Var {
        debug_assert_eq!(xs.len(), ys.len());
        let mut val = self.value(bias);
        let mut deps: Vec<(Var, f64)> = Vec::with_capacity(2 * xs.len() + 1);
        for (x, y) in xs.iter().zip(ys) {
            let (vx, vy) = (self.value(*x), self.value(*y));
            val += vx * vy;
            deps.push((*x, vy));
            deps.push((*y, vx));
        }
        deps.push((bias, 1.0));
        self.push(val, &deps)
    }

    /// Softmax over a node slice; numerically stabilized with the max value
    /// treated as a constant shift (exact for gradients).
    pub fn softmax(&mut self, xs: &[Var]) -> Vec<Var> {
        let m = xs.iter().map(|x| self.value(*x)).fold(f64::NEG_INFINITY, f64::max);
        let shifted: Vec<Var> = xs.iter().map(|x| self.add_const(*x, -m)).collect();
        let exps: Vec<Var> = shifted.iter().map(|x| self.exp(*x)).collect();
        let total = self.sum(&exps);
        exps.iter().map(|e| self.div(*e, total)).collect()
    }

    /// log Σ exp(xᵢ), stabilized the same way.
    pub fn log_sum_exp(&mut self, xs: &[Var]) -> Var {
        let m = xs.iter().map(|x| self.value(*x)).fold(f64::NEG_INFINITY, f64::max);
        let shifted: Vec<Var> = xs.iter().map(|x| self.add_const(*x, -m)).collect();
        let exps: Vec<Var> = shifted.iter().map(|x| self.exp(*x)).collect();
        let total = self.sum(&exps);
        let l = self.ln(total);
        self.add_const(l, m)
    }

    /// Softmax cross-entropy against a hard label.
    pub fn cross_entropy(&mut self, logits: &[Var], label: usize) -> Var {
        let lse = self.log_sum_exp(logits);
        self.sub(lse, logits[label])
    }

    /// Reverse pass from `output`; returns one adjoint per node.
    pub fn backward(&self, output: Var) -> Vec<f64> {
        let mut grad = vec![0.0; self.nodes.len()];
        grad[output.0 as usize] = 1.0;
        for i in (0..=output.0 as usize).rev() {
            let g = grad[i];
            if g == 0.0 {
                continue;
            }
            let node = &self.nodes[i];
            let start = node.deps_start as usize;
            let end = start + node.deps_len as usize;
            for &(p, local) in &self.deps[start..end] {
                grad[p as usize] += g * local;
            }
        }
        grad
    }

    pub fn grad_of(&self, grads: &[f64], v: Var) -> f64 {
        grads[v.0 as usize]
    }
}

impl Default for Tape {
    fn default() -> Self {
        Self::new()
    }
}
