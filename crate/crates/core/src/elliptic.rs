//! Real-argument elliptic functions.
//!
//! Every public function takes the elliptic *modulus* `k`, never the
//! parameter `m = k²`. Standard references mix the two conventions; here the
//! Jacobian functions are always `sn(u, k)` with `0 <= k < 1`.
//!
//! The Weierstrass function is evaluated on the real axis only, by reducing
//! it to Jacobian functions through the roots of `4s³ - g2·s - g3`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Distance from a pole (in `cn`, or in the argument of ℘) below which
/// evaluation is refused.
pub const POLE_TOL: f64 = 1e-12;

const AGM_MAX_ITER: usize = 64;

/// Elliptic modulus `k` together with its complement `k' = sqrt(1 - k²)`.
///
/// Both are stored because `k'` cannot be recovered accurately from `k` close
/// to 1, and the period `K(k)` depends on `k'` there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Modulus {
    k: f64,
    kc: f64,
}

impl Modulus {
    pub fn new(k: f64) -> Result<Self> {
        if !k.is_finite() || k < 0.0 {
            return Err(Error::domain(format!(
                "modulus k = {k} must satisfy 0 <= k < 1"
            )));
        }
        if k >= 1.0 {
            return Err(Error::DegenerateModulus(k));
        }
        Ok(Modulus {
            k,
            kc: ((1.0 - k) * (1.0 + k)).sqrt(),
        })
    }

    /// Builds the modulus from `k' = sqrt(1 - k²)`, keeping `k'` exact.
    pub fn from_complementary(kc: f64) -> Result<Self> {
        if !kc.is_finite() || kc > 1.0 {
            return Err(Error::domain(format!(
                "complementary modulus {kc} must lie in (0, 1]"
            )));
        }
        if kc <= 0.0 {
            return Err(Error::DegenerateModulus(1.0));
        }
        Ok(Modulus {
            k: ((1.0 - kc) * (1.0 + kc)).sqrt(),
            kc,
        })
    }

    /// Both components computed independently by the caller.
    pub(crate) fn from_parts(k: f64, kc: f64) -> Self {
        debug_assert!((k * k + kc * kc - 1.0).abs() < 1e-12);
        Modulus { k, kc }
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// `k' = sqrt(1 - k²)`.
    pub fn complementary(&self) -> f64 {
        self.kc
    }

    /// `m = k²`.
    pub fn parameter(&self) -> f64 {
        self.k * self.k
    }
}

/// Values of `sn`, `cn` and `dn` at a common argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

/// Arithmetic-geometric mean sequence seeded with `(1, k')`.
///
/// `a[n]` and `c[n] = (a[n-1] - b[n-1]) / 2` are kept for the descending
/// Landen recurrence in [`jacobi_sncndn`].
struct AgmSequence {
    a: [f64; AGM_MAX_ITER + 1],
    c: [f64; AGM_MAX_ITER + 1],
    len: usize,
}

impl AgmSequence {
    fn new(m: Modulus) -> Result<Self> {
        let mut seq = AgmSequence {
            a: [0.0; AGM_MAX_ITER + 1],
            c: [0.0; AGM_MAX_ITER + 1],
            len: 0,
        };
        let (mut a, mut b) = (1.0_f64, m.kc);
        seq.a[0] = a;
        seq.c[0] = m.k;
        for n in 1..=AGM_MAX_ITER {
            if (a - b).abs() <= 4.0 * f64::EPSILON * a {
                seq.len = n - 1;
                return Ok(seq);
            }
            let c = 0.5 * (a - b);
            let next_b = (a * b).sqrt();
            a = 0.5 * (a + b);
            b = next_b;
            seq.a[n] = a;
            seq.c[n] = c;
        }
        Err(Error::NoConvergence("arithmetic-geometric mean"))
    }

    fn mean(&self) -> f64 {
        self.a[self.len]
    }

    fn quarter_period(&self) -> f64 {
        FRAC_PI_2 / self.mean()
    }
}

/// Complete elliptic integral of the first kind,
/// `K(k) = ∫₀^{π/2} (1 - k² sin²φ)^{-1/2} dφ = π / (2·AGM(1, k'))`.
pub fn complete_k(m: Modulus) -> Result<f64> {
    Ok(AgmSequence::new(m)?.quarter_period())
}

/// `(sn, cn, dn)(u, k)` by descending Landen transformation.
///
/// The argument is first reduced modulo the real period `4K(k)`, so the
/// accuracy does not degrade with `|u|`.
pub fn jacobi_sncndn(u: f64, m: Modulus) -> Result<JacobiTriple> {
    if !u.is_finite() {
        return Err(Error::domain(format!("Jacobi argument {u} is not finite")));
    }
    if m.k == 0.0 {
        let (sn, cn) = u.sin_cos();
        return Ok(JacobiTriple { sn, cn, dn: 1.0 });
    }
    let seq = AgmSequence::new(m)?;
    let period = 4.0 * seq.quarter_period();
    let u = u - period * (u / period).round();

    let n = seq.len;
    let mut phi = (n as f64).exp2() * seq.mean() * u;
    for i in (1..=n).rev() {
        let s = (seq.c[i] / seq.a[i] * phi.sin()).clamp(-1.0, 1.0);
        phi = 0.5 * (phi + s.asin());
    }
    let (sn, cn) = phi.sin_cos();
    // dn² = k'² + k²cn² has no cancellation for any sn.
    let dn = m.kc.hypot(m.k * cn);
    Ok(JacobiTriple { sn, cn, dn })
}

/// `dc = dn / cn`. Fails with [`Error::Pole`] where `cn` vanishes.
pub fn jacobi_dc(u: f64, m: Modulus) -> Result<f64> {
    let t = jacobi_sncndn(u, m)?;
    if t.cn.abs() <= POLE_TOL {
        return Err(Error::Pole(u));
    }
    Ok(t.dn / t.cn)
}

/// `cd = cn / dn`, finite for every real `u` because `dn >= k' > 0`.
pub fn jacobi_cd(u: f64, m: Modulus) -> Result<f64> {
    let t = jacobi_sncndn(u, m)?;
    Ok(t.cn / t.dn)
}

/// `sc = sn / cn`. Fails with [`Error::Pole`] where `cn` vanishes.
pub fn jacobi_sc(u: f64, m: Modulus) -> Result<f64> {
    let t = jacobi_sncndn(u, m)?;
    if t.cn.abs() <= POLE_TOL {
        return Err(Error::Pole(u));
    }
    Ok(t.sn / t.cn)
}

/// `cs = cn / sn`. Fails with [`Error::Pole`] where `sn` vanishes.
pub fn jacobi_cs(u: f64, m: Modulus) -> Result<f64> {
    let t = jacobi_sncndn(u, m)?;
    if t.sn.abs() <= POLE_TOL {
        return Err(Error::Pole(u));
    }
    Ok(t.cn / t.sn)
}

/// Invariants `(g2, g3)` of a Weierstrass lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeierstrassInvariants {
    g2: f64,
    g3: f64,
    discriminant: f64,
}

impl WeierstrassInvariants {
    pub fn new(g2: f64, g3: f64) -> Self {
        WeierstrassInvariants {
            g2,
            g3,
            discriminant: g2 * g2 * g2 - 27.0 * g3 * g3,
        }
    }

    /// `(12, 4(C² - 2))`, the lattice of the `C > 0` solutions.
    pub fn lane_emden(c: f64) -> Self {
        Self::new(12.0, 4.0 * (c * c - 2.0))
    }

    /// `(λ⁻⁴g2, λ⁻⁶g3)`; under this map `℘(λx) = λ⁻²℘(x)`.
    pub fn rescaled(&self, lambda: f64) -> Self {
        let l2 = lambda * lambda;
        Self::new(self.g2 / (l2 * l2), self.g3 / (l2 * l2 * l2))
    }

    pub fn g2(&self) -> f64 {
        self.g2
    }

    pub fn g3(&self) -> f64 {
        self.g3
    }

    /// `g2³ - 27·g3²`.
    pub fn discriminant(&self) -> f64 {
        self.discriminant
    }

    fn cubic(&self, s: f64) -> f64 {
        (4.0 * s * s - self.g2) * s - self.g3
    }

    fn polish(&self, mut s: f64) -> f64 {
        for _ in 0..3 {
            let d = 12.0 * s * s - self.g2;
            if d == 0.0 {
                break;
            }
            let next = s - self.cubic(s) / d;
            if !next.is_finite() || self.cubic(next).abs() >= self.cubic(s).abs() {
                break;
            }
            s = next;
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Lattice {
    /// Positive discriminant: `℘(x) = e3 + r² / sn²(r·x, k)`,
    /// `r² = e1 - e3`, `k² = (e2 - e3)/(e1 - e3)`.
    ThreeReal { e1: f64, e3: f64, r: f64 },
    /// Negative discriminant, `e` the single real root, `h² = 3e² - g2/4`:
    /// `℘(x) = e + h² cn²(w) / (sn²(w) dn²(w))` with `w = h·x`,
    /// `k² = 1/2 - 3e/(4h²)`.
    OneReal { e: f64, h: f64 },
}

/// Decomposition `℘(x) = base + num / rho²` at one point, with
/// x-derivatives of `num` and `rho`.
///
/// `rho` is smooth and changes sign at every lattice point crossed, so code
/// written against it never sees the pole of ℘.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleSplit {
    pub base: f64,
    pub num: f64,
    pub rho: f64,
    pub dnum: f64,
    pub drho: f64,
}

impl PoleSplit {
    pub fn value(&self) -> f64 {
        self.base + self.num / (self.rho * self.rho)
    }

    pub fn derivative(&self) -> f64 {
        (self.dnum * self.rho - 2.0 * self.num * self.drho) / (self.rho * self.rho * self.rho)
    }
}

/// ℘ on the real axis, reduced to Jacobian functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeierstrassReduction {
    inv: WeierstrassInvariants,
    lattice: Lattice,
    modulus: Modulus,
    period: f64,
}

impl WeierstrassReduction {
    pub fn new(inv: WeierstrassInvariants) -> Result<Self> {
        let WeierstrassInvariants {
            g2,
            g3,
            discriminant,
        } = inv;
        if !(g2.is_finite() && g3.is_finite()) {
            return Err(Error::domain("Weierstrass invariants must be finite"));
        }
        if discriminant == 0.0 {
            return Err(Error::DegenerateLattice);
        }
        if discriminant > 0.0 {
            // Trigonometric form of the three real roots; g2 > 0 here.
            let r0 = (g2 / 3.0).sqrt();
            let arg = (3.0 * 3f64.sqrt() * g3 / g2.powf(1.5)).clamp(-1.0, 1.0);
            let t = arg.acos() / 3.0;
            let e1 = inv.polish(r0 * t.cos());
            let e2 = inv.polish(r0 * (t - 2.0 * PI / 3.0).cos());
            let e3 = inv.polish(r0 * (t + 2.0 * PI / 3.0).cos());
            let span = e1 - e3;
            let k = ((e2 - e3) / span).sqrt();
            let kc = ((e1 - e2) / span).sqrt();
            let modulus = Modulus::from_parts(k, kc);
            let r = span.sqrt();
            let period = 2.0 * complete_k(modulus)? / r;
            Ok(WeierstrassReduction {
                inv,
                lattice: Lattice::ThreeReal { e1, e3, r },
                modulus,
                period,
            })
        } else {
            // Cardano for t³ + p t + q with the cancellation-free sign choice.
            let p = -g2 / 4.0;
            let q = -g3 / 4.0;
            let d = q * q / 4.0 + p * p * p / 27.0;
            let half = -q / 2.0;
            let a = (half + half.signum() * d.sqrt()).cbrt();
            let a = if a == 0.0 { (d.sqrt()).cbrt() } else { a };
            let e = inv.polish(a - p / (3.0 * a));
            let h2 = 3.0 * e * e - g2 / 4.0;
            let h = h2.sqrt().sqrt();
            let m = 0.5 - 3.0 * e / (4.0 * h2.sqrt());
            let modulus = Modulus::from_parts(m.sqrt(), (1.0 - m).sqrt());
            let period = 2.0 * complete_k(modulus)? / h;
            Ok(WeierstrassReduction {
                inv,
                lattice: Lattice::OneReal { e, h },
                modulus,
                period,
            })
        }
    }

    pub fn invariants(&self) -> WeierstrassInvariants {
        self.inv
    }

    /// Modulus of the Jacobian functions behind the reduction.
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    /// Largest real root `e1` of `4s³ - g2 s - g3`; the minimum of ℘ on the
    /// real axis.
    pub fn max_real_root(&self) -> f64 {
        match self.lattice {
            Lattice::ThreeReal { e1, .. } => e1,
            Lattice::OneReal { e, .. } => e,
        }
    }

    /// Fundamental real period `2ω`.
    pub fn real_period(&self) -> f64 {
        self.period
    }

    /// Whether `x` lies within [`POLE_TOL`] of a lattice point.
    pub fn is_pole(&self, x: f64) -> bool {
        let r = x - self.period * (x / self.period).round();
        r.abs() <= POLE_TOL * x.abs().max(1.0)
    }

    pub fn split(&self, x: f64) -> Result<PoleSplit> {
        match self.lattice {
            Lattice::ThreeReal { e3, r, .. } => {
                let t = jacobi_sncndn(r * x, self.modulus)?;
                Ok(PoleSplit {
                    base: e3,
                    num: r * r,
                    rho: t.sn,
                    dnum: 0.0,
                    drho: r * t.cn * t.dn,
                })
            }
            Lattice::OneReal { e, h } => {
                let t = jacobi_sncndn(h * x, self.modulus)?;
                let m = self.modulus.parameter();
                let h2 = h * h;
                Ok(PoleSplit {
                    base: e,
                    num: h2 * t.cn * t.cn,
                    rho: t.sn * t.dn,
                    dnum: -2.0 * h2 * h * t.cn * t.sn * t.dn,
                    drho: h * t.cn * (t.dn * t.dn - m * t.sn * t.sn),
                })
            }
        }
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        if self.is_pole(x) {
            return Err(Error::Pole(x));
        }
        Ok(self.split(x)?.value())
    }

    /// `℘'(x)`, from the same decomposition as [`Self::value`].
    pub fn derivative(&self, x: f64) -> Result<f64> {
        if self.is_pole(x) {
            return Err(Error::Pole(x));
        }
        Ok(self.split(x)?.derivative())
    }
}

/// `℘(x; g2, g3)` for real `x`; the returned value is `>= e1`.
pub fn weierstrass_p(x: f64, inv: WeierstrassInvariants) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain(format!(
            "Weierstrass argument {x} is not finite"
        )));
    }
    WeierstrassReduction::new(inv)?.value(x)
}

/// Real period `2ω` of ℘.
pub fn weierstrass_real_period(inv: WeierstrassInvariants) -> Result<f64> {
    Ok(WeierstrassReduction::new(inv)?.real_period())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::quad;
    use approx::assert_relative_eq;

    fn modk(k: f64) -> Modulus {
        Modulus::new(k).unwrap()
    }

    fn k_by_quadrature(k: f64) -> f64 {
        quad::integrate(
            |p: f64| 1.0 / (1.0 - k * k * p.sin().powi(2)).sqrt(),
            0.0,
            FRAC_PI_2,
            1e-14,
        )
    }

    #[test]
    fn modulus_rejects_out_of_range() {
        assert!(matches!(
            Modulus::new(1.0),
            Err(Error::DegenerateModulus(_))
        ));
        assert!(matches!(Modulus::new(-0.1), Err(Error::Domain(_))));
        assert!(Modulus::new(f64::NAN).is_err());
    }

    #[test]
    fn k_at_zero_is_half_pi() {
        assert_eq!(complete_k(modk(0.0)).unwrap(), FRAC_PI_2);
    }

    #[test]
    fn k_golden_values() {
        // 40-digit quadrature of the defining integral.
        assert_relative_eq!(
            complete_k(modk(0.5)).unwrap(),
            1.685750354812596,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            complete_k(modk(0.999999)).unwrap(),
            7.947479773562345,
            max_relative = 1e-10
        );
    }

    #[test]
    fn k_matches_quadrature() {
        for &k in &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99] {
            assert_relative_eq!(
                complete_k(modk(k)).unwrap(),
                k_by_quadrature(k),
                max_relative = 1e-10
            );
        }
        assert_relative_eq!(
            complete_k(modk(0.999999)).unwrap(),
            k_by_quadrature(0.999999),
            max_relative = 1e-10
        );
    }

    #[test]
    fn sncndn_at_origin() {
        for &k in &[0.0, 0.3, 0.9, 0.999] {
            let t = jacobi_sncndn(0.0, modk(k)).unwrap();
            assert_eq!((t.sn, t.cn, t.dn), (0.0, 1.0, 1.0));
        }
    }

    #[test]
    fn sncndn_circular_limit() {
        let t = jacobi_sncndn(1.0, modk(0.0)).unwrap();
        assert_eq!((t.sn, t.cn, t.dn), (1f64.sin(), 1f64.cos(), 1.0));
        // Tiny k takes the AGM path but must still agree with sin/cos.
        let t = jacobi_sncndn(1.0, modk(1e-9)).unwrap();
        assert_relative_eq!(t.sn, 1f64.sin(), max_relative = 1e-14);
    }

    #[test]
    fn sncndn_quarter_period() {
        let m = modk(0.6);
        let kk = complete_k(m).unwrap();
        let t = jacobi_sncndn(kk, m).unwrap();
        assert_relative_eq!(t.sn, 1.0, epsilon = 1e-14);
        assert!(t.cn.abs() < 1e-14);
        assert_relative_eq!(t.dn, 0.8, epsilon = 1e-14);
    }

    #[test]
    fn sncndn_large_argument_is_reduced() {
        let m = modk(0.7);
        let kk = complete_k(m).unwrap();
        let a = jacobi_sncndn(0.3, m).unwrap();
        let b = jacobi_sncndn(0.3 + 4000.0 * kk, m).unwrap();
        assert_relative_eq!(a.sn, b.sn, epsilon = 1e-10);
        assert_relative_eq!(a.cn, b.cn, epsilon = 1e-10);
    }

    #[test]
    fn sncndn_rejects_non_finite() {
        assert!(jacobi_sncndn(f64::INFINITY, modk(0.5)).is_err());
    }

    #[test]
    fn sncndn_matches_derivative_identity() {
        // d sn/du = cn dn, checked by Richardson differences.
        let m = modk(0.8);
        for i in 0..40 {
            let u = -5.0 + 0.25 * i as f64;
            let f = |x: f64| jacobi_sncndn(x, m).unwrap().sn;
            let h = 1e-3;
            let d1 = (f(u + h) - f(u - h)) / (2.0 * h);
            let d2 = (f(u + h / 2.0) - f(u - h / 2.0)) / h;
            let rich = (4.0 * d2 - d1) / 3.0;
            let t = jacobi_sncndn(u, m).unwrap();
            assert!((rich - t.cn * t.dn).abs() < 1e-11, "u = {u}");
        }
    }

    #[test]
    fn dc_and_sc_special_values() {
        let m = modk(0.5);
        assert_eq!(jacobi_dc(0.0, m).unwrap(), 1.0);
        assert_eq!(jacobi_sc(0.0, m).unwrap(), 0.0);
        let z = modk(0.0);
        for &u in &[0.3, 1.0, 2.0, -1.2] {
            assert_relative_eq!(
                jacobi_dc(u, z).unwrap(),
                1.0 / u.cos(),
                max_relative = 1e-14
            );
            assert_relative_eq!(jacobi_sc(u, z).unwrap(), u.tan(), max_relative = 1e-14);
        }
    }

    #[test]
    fn poles_are_signalled() {
        let m = modk(0.6);
        let kk = complete_k(m).unwrap();
        assert!(matches!(jacobi_dc(kk, m), Err(Error::Pole(_))));
        assert!(matches!(jacobi_sc(3.0 * kk, m), Err(Error::Pole(_))));
        assert!(matches!(jacobi_cs(0.0, m), Err(Error::Pole(_))));
        assert!(jacobi_cd(kk, m).unwrap().abs() < 1e-14);
    }

    #[test]
    fn weierstrass_inversion_round_trip() {
        // x = ∫_{s0}^∞ ds / sqrt(4s³ - 12s - 4(C² - 2)) at C = 3, s0 = 5.
        let inv = WeierstrassInvariants::lane_emden(3.0);
        assert_relative_eq!(
            weierstrass_p(0.4549413438254893, inv).unwrap(),
            5.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn weierstrass_min_root_at_c_two() {
        // Not routed through the reduction: C = 2 is the degenerate lattice.
        let inv = WeierstrassInvariants::lane_emden(2.0);
        assert_eq!(inv.discriminant(), 0.0);
        assert!(matches!(
            weierstrass_real_period(inv),
            Err(Error::DegenerateLattice)
        ));
        assert_relative_eq!(inv.cubic(2.0), 0.0);
    }

    #[test]
    fn weierstrass_period_golden_values() {
        // ∫_{e1}^∞ by 40-digit quadrature.
        let p3 = weierstrass_real_period(WeierstrassInvariants::lane_emden(3.0)).unwrap();
        assert_relative_eq!(p3, 1.6156929193803866, max_relative = 1e-13);
        let p1 = weierstrass_real_period(WeierstrassInvariants::lane_emden(1.0)).unwrap();
        assert_relative_eq!(p1, 2.1775514262375675, max_relative = 1e-13);
    }

    #[test]
    fn weierstrass_pole_is_signalled() {
        let inv = WeierstrassInvariants::lane_emden(3.0);
        let w = weierstrass_real_period(inv).unwrap();
        assert!(matches!(weierstrass_p(0.0, inv), Err(Error::Pole(_))));
        assert!(matches!(weierstrass_p(2.0 * w, inv), Err(Error::Pole(_))));
    }

    #[test]
    fn weierstrass_scaled_period() {
        let inv = WeierstrassInvariants::lane_emden(1.3);
        let w = weierstrass_real_period(inv).unwrap();
        for &lambda in &[2.0, 1.0 / 3.0] {
            let ws = weierstrass_real_period(inv.rescaled(lambda)).unwrap();
            assert_relative_eq!(ws, lambda * w, max_relative = 1e-13);
        }
    }
}
