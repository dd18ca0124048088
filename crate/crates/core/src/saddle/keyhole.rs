//! Integrals of `e^{az}` against powers of `z + b` over the keyhole contour
//! wrapping the cut `(-∞, -b]`.
//!
//! Traversal: in from `-∞` just below the cut, counter-clockwise around `-b`
//! on a circle of radius `r`, and back out to `-∞` just above the cut. With
//! this orientation `∫ e^{az} (z+b)^{-ν} dz = 2πi e^{-ab} a^{ν-1} / Γ(ν)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ContourSpec;
use crate::error::{Error, Result};
use crate::quadrature::integrate_vec_breaks;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KeyholeKind {
    /// `e^{az} (z+b)^{-1/2}`
    #[serde(rename = "INV_SQRT")]
    InvSqrt,
    /// `e^{az} (z+b)^{1/2}`
    #[serde(rename = "SQRT")]
    Sqrt,
    /// `e^{az} (z+b)^{3/2}`
    #[serde(rename = "POW_3_2")]
    Pow32,
    /// `e^{az} z^2 (z+b)^{-1/2}`
    #[serde(rename = "INV_SQRT_Z2")]
    InvSqrtZ2,
    /// `e^{az} (z+b)^{-3/2}`
    #[serde(rename = "INV_POW_3_2")]
    InvPow32,
    /// `e^{az} z^2 (z+b)^{-3/2}`
    #[serde(rename = "INV_POW_3_2_Z2")]
    InvPow32Z2,
    /// `e^{az} (z+b)^{-5/2}`
    #[serde(rename = "INV_POW_5_2")]
    InvPow52,
    /// `e^{az} z^2 (z+b)^{-5/2}`
    #[serde(rename = "INV_POW_5_2_Z2")]
    InvPow52Z2,
}

impl KeyholeKind {
    pub const ALL: [KeyholeKind; 8] = [
        KeyholeKind::InvSqrt,
        KeyholeKind::Sqrt,
        KeyholeKind::Pow32,
        KeyholeKind::InvSqrtZ2,
        KeyholeKind::InvPow32,
        KeyholeKind::InvPow32Z2,
        KeyholeKind::InvPow52,
        KeyholeKind::InvPow52Z2,
    ];

    /// Exponent `p` in `(z+b)^p` and whether the `z^2` factor is present.
    fn shape(self) -> (f64, bool) {
        match self {
            KeyholeKind::InvSqrt => (-0.5, false),
            KeyholeKind::Sqrt => (0.5, false),
            KeyholeKind::Pow32 => (1.5, false),
            KeyholeKind::InvSqrtZ2 => (-0.5, true),
            KeyholeKind::InvPow32 => (-1.5, false),
            KeyholeKind::InvPow32Z2 => (-1.5, true),
            KeyholeKind::InvPow52 => (-2.5, false),
            KeyholeKind::InvPow52Z2 => (-2.5, true),
        }
    }

    /// The integrand `z ↦ e^{az} z^k (z+b)^p`. Signed zeros in `Im z` select
    /// the side of the cut.
    pub fn integrand(self, a: f64, b: f64) -> impl Fn(Complex64) -> Complex64 {
        let (p, z2) = self.shape();
        move |z: Complex64| {
            let base = (z + b).powf(p) * (a * z).exp();
            if z2 {
                base * z * z
            } else {
                base
            }
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(tag.to_ascii_uppercase()))
            .map_err(|_| Error::invalid(format!("unknown keyhole kind `{tag}`")))
    }
}

pub fn keyhole_closed_form(kind: KeyholeKind, a: f64, b: f64) -> Result<Complex64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::invalid(format!("a = {a} must be positive")));
    }
    if !(b >= 0.0) || !b.is_finite() {
        return Err(Error::invalid(format!("b = {b} must be non-negative")));
    }
    let sp = PI.sqrt();
    let e = (-a * b).exp();
    let i = Complex64::new(0.0, 1.0);
    let ra = a.sqrt();
    let v = match kind {
        KeyholeKind::InvSqrt => 2.0 * sp * e / ra,
        KeyholeKind::Sqrt => -sp * e * a.powf(-1.5),
        KeyholeKind::Pow32 => 1.5 * sp * e * a.powf(-2.5),
        KeyholeKind::InvSqrtZ2 => sp * e / ra * (1.5 / (a * a) + 2.0 * b / a + 2.0 * b * b),
        KeyholeKind::InvPow32 => 4.0 * sp * ra * e,
        KeyholeKind::InvPow32Z2 => sp * e / ra * (-1.0 / a - 4.0 * b + 4.0 * a * b * b),
        KeyholeKind::InvPow52 => 8.0 / 3.0 * sp * a.powf(1.5) * e,
        KeyholeKind::InvPow52Z2 => {
            sp * e / ra * (8.0 * a * a * b * b / 3.0 - 8.0 * a * b + 2.0)
        }
    };
    Ok(i * v)
}

/// Numerically integrates `f` over the keyhole of radius `r` around `-b`.
///
/// `a` sets the length scale of the ray substitution and should be the decay
/// rate of `f` toward `-∞`.
pub fn keyhole_quadrature<F>(f: F, a: f64, b: f64, r: f64, spec: &ContourSpec) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    spec.validate()?;
    if !(a > 0.0) {
        return Err(Error::invalid(format!("a = {a} must be positive")));
    }
    if !(b >= 0.0) {
        return Err(Error::invalid(format!("b = {b} must be non-negative")));
    }
    let r_ok = if b == 0.0 { r > 0.0 } else { r > 0.0 && r < b / 10.0 };
    if !r_ok || !r.is_finite() {
        return Err(Error::invalid(format!("radius r = {r} is outside (0, b/10)")));
    }
    let start = -b - r;
    let scale = 1.0 / a;
    // Parameter p in [0, 1): rays via s = scale * p/(1-p); p in [1, 2]: circle angle.
    let result = integrate_vec_breaks(
        |p, out| {
            out[0] = if p < 1.0 {
                let s = scale * p / (1.0 - p);
                let ds = scale / ((1.0 - p) * (1.0 - p));
                let x = start - s;
                let below = f(Complex64::new(x, -0.0));
                let above = f(Complex64::new(x, 0.0));
                let v = (below - above) * ds;
                if v.is_finite() {
                    v
                } else {
                    Complex64::new(0.0, 0.0)
                }
            } else {
                let theta = PI * (2.0 * (p - 1.0) - 1.0);
                let w = Complex64::from_polar(r, theta);
                f(Complex64::new(-b, 0.0) + w) * Complex64::new(0.0, 2.0 * PI) * w
            };
        },
        &[0.0, 0.5, 1.0, 1.5, 2.0],
        1,
        &spec.quad_options(),
    )?;
    Ok(result.values[0])
}
