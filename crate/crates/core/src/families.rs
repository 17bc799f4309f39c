//! Closed-form solutions `θ(ξ)` of `ξ⁻²(ξ²θ')' + θ⁵ = 0`.
//!
//! Apart from the Schuster and singular solutions, every family is written in
//! terms of the reduced amplitude `z = θ·sqrt(2ξ)` as a function of
//! `ln(Bξ)`, which makes the scaling map `θ(ξ) → θ(ξ/λ)/sqrt(λ)` act as
//! `B → B/λ`.
//!
//! The elliptic families are evaluated from `sn`, `cn`, `dn` assembled into
//! expressions whose denominators are bounded away from zero, so the poles of
//! `dc`, `sc` and ℘ never appear. For the oscillating families `z` carries
//! the sign of `sn` (or of the ℘ pole-split numerator `rho`), which flips at
//! each zero of `θ`; this is the sign continuation of the `±` in the closed
//! forms.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::elliptic::{
    complete_k, jacobi_sncndn, weierstrass_p, Modulus, WeierstrassInvariants, WeierstrassReduction,
};
use crate::error::{Error, Result};
use crate::factor::{
    cardano_roots, classify, modulus_k, positive_root_f, CardanoRoots, DepressedRoot, Regime,
};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Overall sign of a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        })
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "+1" | "1" | "plus" => Ok(Branch::Plus),
            "-" | "-1" | "minus" => Ok(Branch::Minus),
            _ => Err(Error::domain(format!("unknown branch {s:?}"))),
        }
    }
}

/// A fully specified solution: regime, energy constant `C`, scale constant
/// `B > 0` and overall sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolutionParams {
    pub family: Regime,
    pub c: f64,
    pub b: f64,
    pub branch: Branch,
}

impl SolutionParams {
    /// Classifies `C` and checks `B`.
    pub fn new(c: f64, b: f64, branch: Branch) -> Result<Self> {
        let family = classify(c)?;
        if family == Regime::NoRealSolution {
            return Err(Error::NoRealSolution(c));
        }
        check_scale(b)?;
        Ok(SolutionParams {
            family,
            c,
            b,
            branch,
        })
    }

    /// The ℘ representation, valid for every `C > 0` except the degenerate
    /// lattice at `C = 2`.
    pub fn weierstrass(c: f64, b: f64, branch: Branch) -> Result<Self> {
        let regime = classify(c)?;
        if !matches!(regime, Regime::ScFamily | Regime::WeierstrassFamily) {
            return Err(Error::OutOfRegime {
                c,
                expected: "C > 0, C != 2",
            });
        }
        check_scale(b)?;
        Ok(SolutionParams {
            family: Regime::WeierstrassFamily,
            c,
            b,
            branch,
        })
    }
}

fn check_scale(b: f64) -> Result<()> {
    if b.is_finite() && b > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "scale constant B = {b} must be positive"
        )))
    }
}

fn check_radius(xi: f64) -> Result<()> {
    if xi.is_finite() && xi > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("xi = {xi} must be positive")))
    }
}

/// One evaluated point `(ξ, θ, dθ/dξ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub xi: f64,
    pub theta: f64,
    pub dtheta: f64,
}

/// `±1/sqrt(1 + ξ²/3)`.
pub fn schuster(xi: f64, branch: Branch) -> f64 {
    branch.sign() / (1.0 + xi * xi / 3.0).sqrt()
}

/// `±1/sqrt(2ξ)`, a fixed point of the scaling map for every `λ`.
pub fn singular(xi: f64, branch: Branch) -> Result<f64> {
    check_radius(xi)?;
    Ok(branch.sign() / (2.0 * xi).sqrt())
}

/// `sin(ln sqrt(Bξ)) / sqrt(3Bξ - 2Bξ sin²(ln sqrt(Bξ))) · sqrt(B)`.
pub fn srivastava(xi: f64, b: f64, branch: Branch) -> Result<f64> {
    check_radius(xi)?;
    check_scale(b)?;
    let bx = b * xi;
    let s = (bx.sqrt()).ln().sin();
    Ok(branch.sign() * s / (3.0 * bx - 2.0 * bx * s * s).sqrt() * b.sqrt())
}

/// Family for `-2 < C < 0`.
pub fn dc_family(xi: f64, params: &SolutionParams) -> Result<f64> {
    expect_family(params, Regime::DcFamily, "-2 < C < 0")?;
    Solution::new(*params)?.theta(xi)
}

/// Family for `0 < C < 2` in the `sc` representation.
pub fn sc_family(xi: f64, params: &SolutionParams) -> Result<f64> {
    expect_family(params, Regime::ScFamily, "0 < C < 2")?;
    Solution::new(*params)?.theta(xi)
}

/// ℘ representation for any `C > 0`, `C != 2`.
pub fn weier_family(xi: f64, params: &SolutionParams) -> Result<f64> {
    let p = SolutionParams::weierstrass(params.c, params.b, params.branch)?;
    Solution::new(p)?.theta(xi)
}

fn expect_family(params: &SolutionParams, family: Regime, expected: &'static str) -> Result<()> {
    if params.family != family || classify(params.c)? != family {
        return Err(Error::OutOfRegime {
            c: params.c,
            expected,
        });
    }
    Ok(())
}

/// `(ξ, θ, θ')` for any regime that has real solutions.
pub fn eval(params: &SolutionParams, xi: f64) -> Result<Sample> {
    Solution::new(*params)?.eval(xi)
}

/// Coefficient `½·sqrt((a + c)b/3)` in `u = coeff · ln(Bξ)`.
fn jacobi_rate(r: &CardanoRoots) -> f64 {
    0.5 * ((r.a + r.c) * r.b / 3.0).sqrt()
}

#[derive(Debug, Clone, Copy)]
enum Kernel {
    Singular,
    Schuster,
    Srivastava,
    Dc {
        roots: CardanoRoots,
        modulus: Modulus,
        rate: f64,
        quarter: f64,
    },
    Sc {
        roots: CardanoRoots,
        modulus: Modulus,
        rate: f64,
        quarter: f64,
    },
    Weierstrass {
        reduction: WeierstrassReduction,
        c: f64,
    },
}

/// A solution with its roots, modulus and lattice resolved once.
#[derive(Debug, Clone, Copy)]
pub struct Solution {
    params: SolutionParams,
    kernel: Kernel,
}

impl Solution {
    pub fn new(params: SolutionParams) -> Result<Self> {
        check_scale(params.b)?;
        let kernel = match params.family {
            Regime::NoRealSolution => return Err(Error::NoRealSolution(params.c)),
            Regime::SingularFixedPoint => Kernel::Singular,
            Regime::Schuster => Kernel::Schuster,
            Regime::Srivastava => Kernel::Srivastava,
            Regime::DcFamily | Regime::ScFamily => {
                let roots = cardano_roots(params.c)?;
                let modulus = modulus_k(&roots)?;
                let rate = jacobi_rate(&roots);
                let quarter = complete_k(modulus)?;
                if params.family == Regime::DcFamily {
                    Kernel::Dc {
                        roots,
                        modulus,
                        rate,
                        quarter,
                    }
                } else {
                    Kernel::Sc {
                        roots,
                        modulus,
                        rate,
                        quarter,
                    }
                }
            }
            Regime::WeierstrassFamily => {
                if params.c <= 0.0 {
                    return Err(Error::OutOfRegime {
                        c: params.c,
                        expected: "C > 0",
                    });
                }
                let inv = WeierstrassInvariants::lane_emden(params.c);
                Kernel::Weierstrass {
                    reduction: WeierstrassReduction::new(inv)?,
                    c: params.c,
                }
            }
        };
        Ok(Solution { params, kernel })
    }

    pub fn params(&self) -> &SolutionParams {
        &self.params
    }

    /// Reduced amplitude `z` and `dz/d ln ξ` at `s = ln(Bξ)`, positive branch.
    fn amplitude(&self, s: f64) -> Result<(f64, f64)> {
        match self.kernel {
            Kernel::Singular => Ok((1.0, 0.0)),
            Kernel::Schuster => {
                let bx = s.exp();
                let q = 1.0 + bx * bx / 3.0;
                let z = (2.0 * bx / q).sqrt();
                // d z/d ln ξ = z (1/2 - (Bξ)²/(3q))
                Ok((z, z * (0.5 - bx * bx / (3.0 * q))))
            }
            Kernel::Srivastava => {
                let (sin, cos) = (0.5 * s).sin_cos();
                let q = 3.0 - 2.0 * sin * sin;
                let z = 2f64.sqrt() * sin / q.sqrt();
                Ok((z, 1.5 * 2f64.sqrt() * cos / (q * q.sqrt())))
            }
            Kernel::Dc {
                roots,
                modulus,
                rate,
                ..
            } => {
                let CardanoRoots { a, b, c, .. } = roots;
                let t = jacobi_sncndn(rate * s, modulus)?;
                // b dn² - (b - a) cn² = a + γ sn²,  γ = a(b - a)/(a + c)
                let gamma = a * (b - a) / (a + c);
                let d = a + gamma * t.sn * t.sn;
                let dd = 2.0 * gamma * t.sn * t.cn * t.dn;
                let ddn = -modulus.parameter() * t.sn * t.cn;
                let ab = (a * b).sqrt();
                let z = ab * t.dn / d.sqrt();
                let dz = ab * (ddn * d - 0.5 * t.dn * dd) / (d * d.sqrt());
                Ok((z, rate * dz))
            }
            Kernel::Sc {
                roots,
                modulus,
                rate,
                ..
            } => {
                let CardanoRoots { a, c, .. } = roots;
                let t = jacobi_sncndn(rate * s, modulus)?;
                // a sn² + (a + c) cn² = (a + c) - c sn²
                let e = (a + c) - c * t.sn * t.sn;
                let ac = (a * c).sqrt();
                let z = ac * t.sn / e.sqrt();
                let dz = ac * (a + c) * t.cn * t.dn / (e * e.sqrt());
                Ok((z, rate * dz))
            }
            Kernel::Weierstrass { reduction, c } => {
                let x = s / (2.0 * SQRT_3);
                let p = reduction.split(x)?;
                // C/(℘ - 1) = C ρ² / q,  q = (base - 1)ρ² + num > 0
                let q = (p.base - 1.0) * p.rho * p.rho + p.num;
                let dq = 2.0 * (p.base - 1.0) * p.rho * p.drho + p.dnum;
                let rc = c.sqrt();
                let z = rc * p.rho / q.sqrt();
                let dz = rc * (p.drho * q - 0.5 * p.rho * dq) / (q * q.sqrt());
                Ok((z, dz / (2.0 * SQRT_3)))
            }
        }
    }

    fn check_xi(&self, xi: f64) -> Result<()> {
        if matches!(self.kernel, Kernel::Schuster) && xi == 0.0 {
            return Ok(());
        }
        check_radius(xi)
    }

    /// `θ(ξ)`.
    pub fn theta(&self, xi: f64) -> Result<f64> {
        Ok(self.eval(xi)?.theta)
    }

    /// `(ξ, θ, dθ/dξ)` with the derivative taken analytically.
    pub fn eval(&self, xi: f64) -> Result<Sample> {
        self.check_xi(xi)?;
        let sign = self.params.branch.sign();
        let b = self.params.b;
        match self.kernel {
            Kernel::Schuster => {
                let bx = b * xi;
                let q = 1.0 + bx * bx / 3.0;
                let rb = b.sqrt();
                Ok(Sample {
                    xi,
                    theta: sign * rb / q.sqrt(),
                    dtheta: -sign * rb * b * bx / (3.0 * q * q.sqrt()),
                })
            }
            Kernel::Singular => {
                let r = (2.0 * xi).sqrt();
                Ok(Sample {
                    xi,
                    theta: sign / r,
                    dtheta: -sign / (r * r * r),
                })
            }
            Kernel::Srivastava => {
                let theta = srivastava(xi, b, self.params.branch)?;
                let (_, dz) = self.amplitude((b * xi).ln())?;
                let r = (2.0 * xi).sqrt();
                Ok(Sample {
                    xi,
                    theta,
                    dtheta: (sign * dz / r - 0.5 * theta) / xi,
                })
            }
            _ => {
                let (z, dz) = self.amplitude((b * xi).ln())?;
                let r = (2.0 * xi).sqrt();
                Ok(Sample {
                    xi,
                    theta: sign * z / r,
                    dtheta: sign * (dz - 0.5 * z) / (xi * r),
                })
            }
        }
    }

    /// Closed interval of `z² = 2ξθ²` visited by the solution.
    pub fn band(&self) -> (f64, f64) {
        match self.kernel {
            Kernel::Singular => (1.0, 1.0),
            Kernel::Schuster => (0.0, SQRT_3),
            Kernel::Srivastava => (0.0, 2.0),
            Kernel::Dc { roots, .. } => (roots.a, roots.b),
            Kernel::Sc { roots, .. } => (0.0, roots.c),
            Kernel::Weierstrass { c, .. } => {
                let f = if c >= 2.0 {
                    positive_root_f(c).map(|r| r.f).unwrap_or(f64::NAN)
                } else {
                    cardano_roots(c).map(|r| r.c).unwrap_or(f64::NAN)
                };
                (0.0, f)
            }
        }
    }

    /// Shift in `ln ξ` that maps the solution onto itself up to sign:
    /// `θ(ξ e^{-P}) e^{-P/2} = ±θ(ξ)`. For the oscillating families this is
    /// also the spacing of consecutive zeros.
    pub fn log_period(&self) -> Option<f64> {
        match self.kernel {
            Kernel::Dc { rate, quarter, .. } | Kernel::Sc { rate, quarter, .. } => {
                Some(2.0 * quarter / rate)
            }
            Kernel::Weierstrass { reduction, .. } => Some(2.0 * SQRT_3 * reduction.real_period()),
            Kernel::Srivastava => Some(2.0 * PI),
            Kernel::Singular | Kernel::Schuster => None,
        }
    }

    /// Zeros of `θ` in `[lo, hi]`, from the lattice of the sign-carrying
    /// factor. Empty for the zero-free families.
    pub fn zeros_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        if !self.params.family.is_oscillating() || !(lo > 0.0 && hi >= lo) {
            return Vec::new();
        }
        let Some(period) = self.log_period() else {
            return Vec::new();
        };
        let offset = self.params.b.ln();
        let first = ((lo.ln() + offset) / period).ceil() as i64;
        let last = ((hi.ln() + offset) / period).floor() as i64;
        (first..=last)
            .map(|n| (n as f64 * period - offset).exp())
            .collect()
    }

    /// Points where an intermediate elliptic function has a pole: `cn = 0`
    /// for the `dc`/`sc` families, turning points of ℘ are never poles.
    pub fn poles_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let (rate, quarter) = match self.kernel {
            Kernel::Dc { rate, quarter, .. } | Kernel::Sc { rate, quarter, .. } => (rate, quarter),
            Kernel::Weierstrass { .. } | Kernel::Srivastava => return self.zeros_in(lo, hi),
            _ => return Vec::new(),
        };
        if !(lo > 0.0 && hi >= lo) {
            return Vec::new();
        }
        // u = rate·ln(Bξ) = K + 2Kn
        let offset = self.params.b.ln();
        let to_n = |x: f64| (rate * (x.ln() + offset) - quarter) / (2.0 * quarter);
        let (first, last) = (to_n(lo).ceil() as i64, to_n(hi).floor() as i64);
        (first..=last)
            .map(|n| (((2 * n + 1) as f64 * quarter) / rate - offset).exp())
            .collect()
    }

    /// Replaces the elliptic modulus of a `dc`/`sc` solution while keeping
    /// its roots. Only meaningful for fault injection in verification runs.
    #[doc(hidden)]
    pub fn with_modulus(mut self, m: Modulus) -> Result<Self> {
        let q = complete_k(m)?;
        match &mut self.kernel {
            Kernel::Dc {
                modulus, quarter, ..
            }
            | Kernel::Sc {
                modulus, quarter, ..
            } => {
                *modulus = m;
                *quarter = q;
            }
            _ => {}
        }
        Ok(self)
    }

    /// Modulus of the `dc`/`sc` Jacobian functions, if any.
    pub fn modulus(&self) -> Option<Modulus> {
        match self.kernel {
            Kernel::Dc { modulus, .. } | Kernel::Sc { modulus, .. } => Some(modulus),
            Kernel::Weierstrass { reduction, .. } => Some(reduction.modulus()),
            _ => None,
        }
    }

    /// Reduced amplitude on the ascending branch through `ln(Bξ) = 0`,
    /// as a function of `ln(Bξ)`; `(lo, hi)` bracket the branch.
    fn ascending_branch(&self) -> Option<(f64, f64)> {
        match self.kernel {
            Kernel::Dc { rate, quarter, .. } => Some((-quarter / rate, 0.0)),
            Kernel::Sc { rate, quarter, .. } => Some((-quarter / rate, quarter / rate)),
            Kernel::Weierstrass { reduction, .. } => {
                let half = SQRT_3 * reduction.real_period();
                Some((-half, half))
            }
            Kernel::Srivastava => Some((-PI, PI)),
            _ => None,
        }
    }
}

/// `λ = exp(m·P)`, with `P` from [`Solution::log_period`].
///
/// For `-2 < C < 0` and `0 < C < 2` this is
/// `exp(4·sqrt(3)·m·K(k) / sqrt((a + c)b))`; for `C > 2` the same shift is one
/// real period `2ω` of ℘ in its argument, `exp(2·sqrt(3)·m·2ω)`; for `C = 2`
/// it is `exp(2πm)`.
///
/// The dc family is exactly invariant under these `λ`. The oscillating
/// families map to `(-1)^m θ`; see [`scaling_parity`].
pub fn scaling_lambda(c: f64, m: i32) -> Result<f64> {
    let period = discrete_period(c)?;
    Ok((m as f64 * period).exp())
}

/// Sign `s` in `θ(ξ/λ)/sqrt(λ) = s·θ(ξ)` for `λ = scaling_lambda(c, m)`.
pub fn scaling_parity(c: f64, m: i32) -> Result<f64> {
    discrete_period(c)?;
    let regime = classify(c)?;
    Ok(if regime.is_oscillating() && m % 2 != 0 {
        -1.0
    } else {
        1.0
    })
}

fn discrete_period(c: f64) -> Result<f64> {
    let params = match classify(c)? {
        Regime::DcFamily | Regime::ScFamily | Regime::WeierstrassFamily | Regime::Srivastava => {
            SolutionParams::new(c, 1.0, Branch::Plus)?
        }
        _ => {
            return Err(Error::OutOfRegime {
                c,
                expected: "-2 < C < 0 or C > 0",
            })
        }
    };
    Solution::new(params)?
        .log_period()
        .ok_or(Error::OutOfRegime {
            c,
            expected: "-2 < C < 0 or C > 0",
        })
}

/// Image of a solution under `θ(ξ) → θ(ξ/λ)/sqrt(λ)`, i.e. `B → B/λ`.
pub fn apply_scaling(params: &SolutionParams, lambda: f64) -> Result<SolutionParams> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::domain(format!(
            "scale factor {lambda} must be positive"
        )));
    }
    let mut out = *params;
    out.b = params.b / lambda;
    Ok(out)
}

/// Scale constant `B` for which `2·ξ0·θ(ξ0)² = z0²` on the ascending branch
/// that contains `ln(Bξ) = 0`.
///
/// For the dc family only `|z0|` matters and the branch runs from the minimum
/// `z² = a` up to the maximum `z² = b` at `Bξ0 = 1`. For the oscillating
/// families `z0` is signed and the branch passes through the zero at
/// `Bξ0 = 1`.
pub fn calibrate_b(c: f64, xi0: f64, z0: f64) -> Result<f64> {
    let params = SolutionParams::new(c, 1.0, Branch::Plus)?;
    calibrate(&Solution::new(params)?, xi0, z0)
}

/// [`calibrate_b`] in the ℘ representation, for any `C > 0`, `C != 2`.
pub fn calibrate_b_weierstrass(c: f64, xi0: f64, z0: f64) -> Result<f64> {
    let params = SolutionParams::weierstrass(c, 1.0, Branch::Plus)?;
    calibrate(&Solution::new(params)?, xi0, z0)
}

fn calibrate(sol: &Solution, xi0: f64, z0: f64) -> Result<f64> {
    check_radius(xi0)?;
    let Some((lo, hi)) = sol.ascending_branch() else {
        return Err(Error::OutOfRegime {
            c: sol.params.c,
            expected: "a family with a scale constant",
        });
    };
    let target = if sol.params.family == Regime::DcFamily {
        z0.abs()
    } else {
        z0
    };
    let z = |s: f64| sol.amplitude(s).map(|(z, _)| z);
    let (z_lo, z_hi) = (z(lo)?, z(hi)?);
    let slack = 1e-14 * z_hi.abs().max(1.0);
    if !target.is_finite() || target < z_lo - slack || target > z_hi + slack {
        return Err(Error::Unreachable(z0));
    }
    // z is stationary at the branch ends, so bisection there only resolves
    // sqrt(eps); the ends are known exactly.
    if target >= z_hi {
        return Ok(hi.exp() / xi0);
    }
    if target <= z_lo {
        return Ok(lo.exp() / xi0);
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid == a || mid == b {
            break;
        }
        if z(mid)? < target {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok((0.5 * (a + b)).exp() / xi0)
}

/// Constant `c1 = sqrt(C/6)` of the ℘ form with invariants
/// `(4/3, -8/27 + 16c1⁴/3)` that describes the same solution as `(C, B)`.
///
/// Rescaling the argument of `℘(x; 12, 4(C² - 2))` by `λ = sqrt(3)` gives
/// `℘(ln(Bξ)/2; 4/3, 4(C² - 2)/27) = ℘(x; 12, 4(C² - 2))/3`, which matches
/// the second invariant exactly when `16c1⁴/3 = 4C²/27`. `B` carries over
/// unchanged.
pub fn c1_form_constant(c: f64) -> Result<f64> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::OutOfRegime {
            c,
            expected: "C > 0",
        });
    }
    Ok((c / 6.0).sqrt())
}

/// `c1 / sqrt(-ξ/3 + ξ·℘(ln(Bξ)/2; 4/3, -8/27 + 16c1⁴/3))`, nonnegative.
///
/// Evaluated through [`weierstrass_p`] directly; fails with
/// [`Error::Pole`] at the zeros of the solution.
pub fn c1_form(xi: f64, c1: f64, b: f64) -> Result<f64> {
    check_radius(xi)?;
    check_scale(b)?;
    let c4 = c1 * c1 * c1 * c1;
    let inv = WeierstrassInvariants::new(4.0 / 3.0, -8.0 / 27.0 + 16.0 * c4 / 3.0);
    let p = weierstrass_p(0.5 * (b * xi).ln(), inv)?;
    Ok(c1 / (xi * (p - 1.0 / 3.0)).sqrt())
}

/// `e1 = 1 + C/f` for `C > 2`, the lower end of the ℘ range.
pub fn weierstrass_min(root: &DepressedRoot) -> f64 {
    1.0 + root.constant / root.f
}
