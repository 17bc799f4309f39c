//! Factorization of the energy polynomial `w(z) = -z⁶ + 3z² + C`.
//!
//! With `u = z²` the sextic is the cubic `-u³ + 3u + C`, whose roots fix both
//! the admissible band of `z` and the elliptic modulus of the solution.

use std::fmt;

use serde::Serialize;

use crate::elliptic::Modulus;
use crate::error::{Error, Result};

/// `|C - boundary|` below which `C = ±2` snap to the exact boundary regimes.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// `|C|` below which the Schuster regime is used. Wider than
/// [`BOUNDARY_TOL`] because `k → 1` as `C → 0`.
pub const SCHUSTER_BAND: f64 = 1e-10;

/// The seven cases of the integration constant `C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Regime {
    /// `C < -2`: `w(z) < 0` everywhere.
    NoRealSolution,
    /// `C = -2`: `z ≡ ±1`, `θ = ±1/sqrt(2ξ)`.
    SingularFixedPoint,
    /// `-2 < C < 0`: bounded, zero-free solutions written with `dc`.
    DcFamily,
    /// `C = 0`: `θ = ±1/sqrt(1 + ξ²/3)`.
    Schuster,
    /// `0 < C < 2`: oscillating solutions written with `sc`.
    ScFamily,
    /// `C = 2`: the trigonometric solution in `ln sqrt(ξ)`.
    Srivastava,
    /// `C > 2`: oscillating solutions written with ℘.
    WeierstrassFamily,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::NoRealSolution => "NoRealSolution",
            Regime::SingularFixedPoint => "SingularFixedPoint",
            Regime::DcFamily => "DcFamily",
            Regime::Schuster => "Schuster",
            Regime::ScFamily => "ScFamily",
            Regime::Srivastava => "Srivastava",
            Regime::WeierstrassFamily => "WeierstrassFamily",
        }
    }

    /// Solutions in this regime change sign.
    pub fn is_oscillating(&self) -> bool {
        matches!(
            self,
            Regime::ScFamily | Regime::Srivastava | Regime::WeierstrassFamily
        )
    }

    pub const ALL: [Regime; 7] = [
        Regime::NoRealSolution,
        Regime::SingularFixedPoint,
        Regime::DcFamily,
        Regime::Schuster,
        Regime::ScFamily,
        Regime::Srivastava,
        Regime::WeierstrassFamily,
    ];
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Regime::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::domain(format!("unknown family {s:?}")))
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn classify(c: f64) -> Result<Regime> {
    if !c.is_finite() {
        return Err(Error::domain(format!("C = {c} is not finite")));
    }
    let regime = if (c + 2.0).abs() <= BOUNDARY_TOL {
        Regime::SingularFixedPoint
    } else if (c - 2.0).abs() <= BOUNDARY_TOL {
        Regime::Srivastava
    } else if c.abs() <= SCHUSTER_BAND {
        Regime::Schuster
    } else if c < -2.0 {
        Regime::NoRealSolution
    } else if c < 0.0 {
        Regime::DcFamily
    } else if c < 2.0 {
        Regime::ScFamily
    } else {
        Regime::WeierstrassFamily
    };
    Ok(regime)
}

/// Roots `0 < a < 1 < b < sqrt(3) < c < 2` of the cubic in `u = z²`.
///
/// For `C < 0`: `w(z) = (z² - a)(b - z²)(z² + c)`;
/// for `C > 0`: `w(z) = (z² + a)(z² + b)(c - z²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CardanoRoots {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub constant: f64,
}

impl CardanoRoots {
    /// `w(z)` from the factored form.
    pub fn factored(&self, z: f64) -> f64 {
        let u = z * z;
        let CardanoRoots { a, b, c, constant } = *self;
        if constant < 0.0 {
            (u - a) * (b - u) * (u + c)
        } else {
            (u + a) * (u + b) * (c - u)
        }
    }
}

pub fn cardano_roots(c: f64) -> Result<CardanoRoots> {
    let h = c.abs();
    if !c.is_finite() || h >= 2.0 || c == 0.0 {
        return Err(Error::OutOfRegime {
            c,
            expected: "0 < |C| < 2",
        });
    }
    let half = h / 2.0;
    Ok(CardanoRoots {
        a: 2.0 * ((half.asin()) / 3.0).sin(),
        b: 2.0 * ((-half).acos() / 3.0).cos(),
        c: 2.0 * (half.acos() / 3.0).cos(),
        constant: c,
    })
}

/// Positive real root `f = A + 1/A` of `u³ - 3u - C` for `C >= 2`.
///
/// `w(z) = (f - z²)(z⁴ + f z² + f² - 3)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DepressedRoot {
    pub f: f64,
    pub cbrt: f64,
    pub constant: f64,
}

impl DepressedRoot {
    pub fn factored(&self, z: f64) -> f64 {
        let u = z * z;
        let f = self.f;
        (f - u) * (u * u + f * u + f * f - 3.0)
    }
}

pub fn positive_root_f(c: f64) -> Result<DepressedRoot> {
    if !c.is_finite() || c < 2.0 {
        return Err(Error::OutOfRegime {
            c,
            expected: "C >= 2",
        });
    }
    // (C - sqrt(C² - 4)) / 2 rewritten without cancellation.
    let base = 2.0 / (c + ((c - 2.0) * (c + 2.0)).sqrt());
    let a = base.cbrt();
    Ok(DepressedRoot {
        f: a + 1.0 / a,
        cbrt: a,
        constant: c,
    })
}

/// `k = sqrt((b - a)c / ((a + c)b))`, with `k'` computed from
/// `1 - k² = a(b + c) / ((a + c)b)` so it stays accurate as `C → 0`.
pub fn modulus_k(roots: &CardanoRoots) -> Result<Modulus> {
    let CardanoRoots { a, b, c, .. } = *roots;
    let denom = (a + c) * b;
    let k = ((b - a).max(0.0) * c / denom).sqrt();
    let kc = (a * (b + c) / denom).sqrt();
    if k >= 1.0 - 1e-12 || kc == 0.0 {
        return Err(Error::DegenerateModulus(k));
    }
    Ok(Modulus::from_parts(k, kc))
}

/// `w(z) = -z⁶ + 3z² + C`, evaluated as `C + u(3 - u²)` with `u = z²`.
pub fn sextic_eval(z: f64, c: f64) -> f64 {
    let u = z * z;
    c + u * (3.0 - u * u)
}
