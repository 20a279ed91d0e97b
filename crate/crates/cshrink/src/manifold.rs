//! The complex plane as the product Riemannian manifold P1 x SO(2).
//!
//! A nonzero complex number r·e^{iθ} is stored as its two factor coordinates:
//! a positive scale (kept as log r) and a principal rotation angle in (−π, π].
//! Under the Log-Euclidean metric both factors are flat, so logarithm and
//! exponential maps reduce to coordinate bookkeeping and every distance has a
//! closed form. All types are immutable values and all operations are pure.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::Mul;

use crate::error::{Error, Result};

/// Dimension of the log-coordinate (tangent) space of P1 x SO(2).
pub const LOG_DIM: usize = 2;

/// Scales below this are clamped on construction and flagged as degenerate.
pub const SCALE_EPSILON: f64 = 1e-6;

const TWO_PI: f64 = 2.0 * PI;

/// Reduce an angle to the principal branch (−π, π].
fn wrap_angle(raw: f64) -> f64 {
    if -PI < raw && raw <= PI {
        return raw;
    }
    // rem_euclid lands in [0, 2π); shift the upper half down.
    let t = raw.rem_euclid(TWO_PI);
    if t > PI {
        t - TWO_PI
    } else {
        t
    }
}

/// Signed difference a − b wrapped to (−π, π] (the shorter arc from b to a).
pub fn signed_angle_diff(a: f64, b: f64) -> f64 {
    wrap_angle(a - b)
}

/// A rotation stored as its principal angle, always in (−π, π].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleSO2 {
    theta: f64,
}

impl AngleSO2 {
    /// Canonicalize an unbounded angle onto the principal branch.
    ///
    /// Fails for non-finite input; otherwise the result is congruent to `raw`
    /// modulo 2π and lies in (−π, π].
    pub fn new(raw: f64) -> Result<Self> {
        if !raw.is_finite() {
            return Err(Error::numerical(format!("angle must be finite, got {raw}")));
        }
        Ok(AngleSO2 { theta: wrap_angle(raw) })
    }

    /// Construct from an angle already known to be finite (wraps as needed).
    pub(crate) fn wrapped(raw: f64) -> Self {
        AngleSO2 { theta: wrap_angle(raw) }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// The scaled coordinate √2·θ, in (−√2·π, √2·π].
    pub fn tilde(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.theta
    }
}

/// A point on P1 (a positive scale), stored as its logarithm.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ScaleP1 {
    log_r: f64,
    degenerate: bool,
}

impl ScaleP1 {
    /// Construct from a raw scale. Values at or below [`SCALE_EPSILON`] are
    /// clamped there and flagged; zero-magnitude samples occur in real
    /// signals and should not abort a pipeline.
    pub fn new(r: f64) -> Result<Self> {
        if !r.is_finite() {
            return Err(Error::numerical(format!("scale must be finite, got {r}")));
        }
        if r <= SCALE_EPSILON {
            Ok(ScaleP1 { log_r: SCALE_EPSILON.ln(), degenerate: true })
        } else {
            Ok(ScaleP1 { log_r: r.ln(), degenerate: false })
        }
    }

    /// Construct directly from log-scale (always on the manifold).
    pub fn from_log(log_r: f64) -> Self {
        ScaleP1 { log_r, degenerate: false }
    }

    pub fn r(&self) -> f64 {
        self.log_r.exp()
    }

    pub fn log_r(&self) -> f64 {
        self.log_r
    }

    /// True when the constructor clamped a non-positive or tiny scale.
    pub fn degenerate(&self) -> bool {
        self.degenerate
    }
}

impl PartialEq for ScaleP1 {
    fn eq(&self, other: &Self) -> bool {
        self.log_r == other.log_r
    }
}

/// A nonzero complex number in polar factor coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarComplex {
    pub scale: ScaleP1,
    pub angle: AngleSO2,
}

impl PolarComplex {
    pub fn new(scale: ScaleP1, angle: AngleSO2) -> Self {
        PolarComplex { scale, angle }
    }

    /// Construct from raw (r, θ); clamps r and canonicalizes θ.
    pub fn from_parts(r: f64, theta: f64) -> Result<Self> {
        Ok(PolarComplex { scale: ScaleP1::new(r)?, angle: AngleSO2::new(theta)? })
    }

    /// Cartesian interchange: (re, im) pairs of 64-bit floats.
    pub fn from_cartesian(re: f64, im: f64) -> Result<Self> {
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::numerical(format!("non-finite cartesian input ({re}, {im})")));
        }
        let r = re.hypot(im);
        // atan2(0, 0) = 0; the scale clamp flags the degenerate origin.
        let theta = im.atan2(re);
        Self::from_parts(r, theta)
    }

    pub fn to_cartesian(&self) -> (f64, f64) {
        let r = self.scale.r();
        (r * self.angle.theta().cos(), r * self.angle.theta().sin())
    }

    pub fn r(&self) -> f64 {
        self.scale.r()
    }

    pub fn theta(&self) -> f64 {
        self.angle.theta()
    }

    /// Multiplicative identity 1 + 0i.
    pub fn one() -> Self {
        PolarComplex { scale: ScaleP1::from_log(0.0), angle: AngleSO2 { theta: 0.0 } }
    }

    /// Group inverse (complex reciprocal).
    pub fn inverse(&self) -> Self {
        PolarComplex {
            scale: ScaleP1::from_log(-self.scale.log_r()),
            angle: AngleSO2::wrapped(-self.angle.theta()),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.scale.degenerate()
    }
}

/// Group product: scales multiply, angles add (then wrap).
impl Mul for PolarComplex {
    type Output = PolarComplex;

    fn mul(self, rhs: PolarComplex) -> PolarComplex {
        PolarComplex {
            scale: ScaleP1::from_log(self.scale.log_r() + rhs.scale.log_r()),
            angle: AngleSO2::wrapped(self.angle.theta() + rhs.angle.theta()),
        }
    }
}

/// Tangent-space coordinates (u, s) = (log r, √2·θ).
///
/// The angle component is kept internally as θ so that the log/exp round trip
/// is exact; `s()` exposes the scaled coordinate used by the flat-space
/// Gaussian computations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogCoord {
    u: f64,
    theta: f64,
}

impl LogCoord {
    /// Build from the flat coordinates (u, s = √2·θ).
    pub fn from_us(u: f64, s: f64) -> Self {
        LogCoord { u, theta: s / std::f64::consts::SQRT_2 }
    }

    pub(crate) fn from_u_theta(u: f64, theta: f64) -> Self {
        LogCoord { u, theta }
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn s(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.theta
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// Canonicalize an unbounded angle onto the principal branch (−π, π].
pub fn canonicalize_angle(raw: f64) -> Result<AngleSO2> {
    AngleSO2::new(raw)
}

/// Geodesic distance on SO(2): min{|ã − b̃|, 2√2π − |ã − b̃|} with x̃ = √2·θ.
pub fn dist_so2(a: AngleSO2, b: AngleSO2) -> f64 {
    let d = (a.theta() - b.theta()).abs();
    std::f64::consts::SQRT_2 * d.min(TWO_PI - d)
}

/// Geodesic distance on P1: |log a − log b|.
pub fn dist_p1(a: ScaleP1, b: ScaleP1) -> f64 {
    (a.log_r() - b.log_r()).abs()
}

/// Product metric: the two factor distances combined in quadrature.
pub fn dist_c(a: &PolarComplex, b: &PolarComplex) -> f64 {
    let dp = dist_p1(a.scale, b.scale);
    let ds = dist_so2(a.angle, b.angle);
    (dp * dp + ds * ds).sqrt()
}

/// Logarithm map into the flat tangent coordinates.
pub fn log_map(x: &PolarComplex) -> LogCoord {
    LogCoord { u: x.scale.log_r(), theta: x.angle.theta() }
}

/// Exponential map back onto the manifold; the angle coordinate wraps.
pub fn exp_map(v: &LogCoord) -> PolarComplex {
    PolarComplex {
        scale: ScaleP1::from_log(v.u),
        angle: AngleSO2::wrapped(v.theta),
    }
}
