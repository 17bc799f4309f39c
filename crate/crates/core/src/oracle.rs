//! Verification tools that do not share code paths with the closed forms:
//! direct integration of the ODE, the autonomous-form energy integral,
//! finite-difference residuals, bisection and quadrature.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::factor::sextic_eval;
use crate::families::{Sample, Solution, SolutionParams};

/// State of the autonomous system `z = θ sqrt(2ξ)`, `t = -ln ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasePoint {
    pub t: f64,
    pub z: f64,
    /// `dz/dt`
    pub dz: f64,
}

impl PhasePoint {
    /// Inverse of [`phase_transform`].
    pub fn to_sample(&self) -> Sample {
        let xi = (-self.t).exp();
        let r = (2.0 * xi).sqrt();
        let theta = self.z / r;
        let dz_dxi = -self.dz / xi;
        Sample {
            xi,
            theta,
            dtheta: (dz_dxi - theta / r) / r,
        }
    }
}

pub fn phase_transform(s: &Sample) -> Result<PhasePoint> {
    if !(s.xi > 0.0 && s.xi.is_finite()) {
        return Err(Error::domain(format!("xi = {} must be positive", s.xi)));
    }
    let r = (2.0 * s.xi).sqrt();
    let dz_dxi = r * s.dtheta + s.theta / r;
    Ok(PhasePoint {
        t: -s.xi.ln(),
        z: s.theta * r,
        dz: -s.xi * dz_dxi,
    })
}

/// `C = 12 (dz/dt)² + z⁶ - 3z²`.
pub fn energy_constant(p: &PhasePoint) -> f64 {
    12.0 * p.dz * p.dz - sextic_eval(p.z, 0.0)
}

/// Bisection for a sign change of `f` in `[lo, hi]`; `None` without one.
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Option<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..300 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= tol || m == a || m == b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// All real roots of `-z⁶ + 3z² + C` in `[-2, 2]`, including double roots
/// where `w` touches zero at a critical point.
pub fn sextic_roots_oracle(c: f64) -> Vec<f64> {
    const N: usize = 4000;
    let w = |z: f64| sextic_eval(z, c);
    let dw = |z: f64| 6.0 * z * (1.0 - z * z * z * z);
    let grid: Vec<f64> = (0..=N).map(|i| -2.0 + 4.0 * i as f64 / N as f64).collect();
    let mut roots = Vec::new();
    for pair in grid.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if w(a) != 0.0 && w(a).signum() != w(b).signum() {
            roots.extend(bisect(w, a, b, 1e-15));
        }
    }
    // Critical points are 0 and ±1; search them the same way as the roots.
    let mut critical = Vec::new();
    for pair in grid.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if dw(a) == 0.0 {
            critical.push(a);
        } else if dw(a).signum() != dw(b).signum() && dw(b) != 0.0 {
            critical.extend(bisect(dw, a, b, 1e-15));
        }
    }
    for z in critical {
        if w(z).abs() <= 1e-13 && roots.iter().all(|r: &f64| (r - z).abs() > 1e-9) {
            roots.push(z);
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
}

/// Richardson-extrapolated central difference of `f` at `x`.
pub fn richardson_derivative<F: Fn(f64) -> Result<f64>>(f: F, x: f64, h: f64) -> Result<f64> {
    let d = |h: f64| -> Result<f64> { Ok((f(x + h)? - f(x - h)?) / (2.0 * h)) };
    let (d1, d2) = (d(h)?, d(0.5 * h)?);
    Ok((4.0 * d2 - d1) / 3.0)
}

/// `max |ξ²θ'' + 2ξθ' + ξ²θ⁵| / (1 + ξ²|θ|⁵ + ξ|θ'|)` over the grid, with
/// `θ''` from Richardson differences of the analytic `θ'`.
pub fn ode_residual(params: &SolutionParams, xi_grid: &[f64]) -> Result<f64> {
    if xi_grid.is_empty() {
        return Err(Error::domain("empty residual grid"));
    }
    ode_residual_of(&Solution::new(*params)?, xi_grid)
}

/// [`ode_residual`] for an already prepared solution.
pub fn ode_residual_of(sol: &Solution, xi_grid: &[f64]) -> Result<f64> {
    if xi_grid.is_empty() {
        return Err(Error::domain("empty residual grid"));
    }
    let mut worst = 0.0_f64;
    for &xi in xi_grid {
        let s = sol.eval(xi)?;
        let h = 1e-3 * xi;
        let d2 = richardson_derivative(|x| Ok(sol.eval(x)?.dtheta), xi, h)?;
        let t5 = s.theta.powi(5);
        let res = xi * xi * d2 + 2.0 * xi * s.dtheta + xi * xi * t5;
        let scale = 1.0 + xi * xi * t5.abs() + xi * s.dtheta.abs();
        worst = worst.max(res.abs() / scale);
    }
    Ok(worst)
}

/// `n` log-spaced points in `[lo, hi]`, dropping those within relative
/// distance `exclusion` of a zero of `θ` or a pole of an intermediate
/// elliptic function.
pub fn residual_grid(sol: &Solution, lo: f64, hi: f64, n: usize, exclusion: f64) -> Vec<f64> {
    let mut avoid = sol.zeros_in(lo, hi);
    avoid.extend(sol.poles_in(lo, hi));
    log_space(lo, hi, n)
        .into_iter()
        .filter(|x| avoid.iter().all(|p| (x - p).abs() > exclusion * p))
        .collect()
}

pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            let mut v: Vec<f64> = (0..n)
                .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                .collect();
            v[0] = lo;
            v[n - 1] = hi;
            v
        }
    }
}

/// Output of [`integrate_lane_emden`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    /// Accepted steps, starting with the initial point.
    pub points: Vec<Sample>,
    pub tolerance: f64,
    /// Energy constant at the first point.
    pub c_start: f64,
    /// Energy constant at the last point.
    pub c_estimate: f64,
    /// Integration stopped early because the oscillation became too fast to
    /// resolve above the step floor.
    pub truncated: bool,
}

impl Trajectory {
    pub fn last(&self) -> Sample {
        *self
            .points
            .last()
            .expect("trajectory holds the initial point")
    }
}

/// Settings of the Dormand-Prince 5(4) integrator with PI step control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrator {
    /// Equal absolute and relative tolerance.
    pub tol: f64,
    /// Absolute step floor.
    pub min_step: f64,
    pub max_steps: usize,
}

impl Integrator {
    pub fn new(tol: f64) -> Self {
        Integrator {
            tol,
            min_step: 1e-14,
            max_steps: 2_000_000,
        }
    }
}

// Dormand-Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

type State = [f64; 2];

/// `(θ, θ')' = (θ', -2θ'/ξ - θ⁵)`.
fn lane_emden_rhs(xi: f64, y: &State) -> State {
    [y[1], -2.0 * y[1] / xi - y[0].powi(5)]
}

fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (w, k) in terms {
        out[0] += h * w * k[0];
        out[1] += h * w * k[1];
    }
    out
}

fn sample_energy(s: &Sample) -> f64 {
    phase_transform(s)
        .map(|p| energy_constant(&p))
        .unwrap_or(f64::NAN)
}

impl Integrator {
    pub fn run(&self, theta0: f64, dtheta0: f64, xi0: f64, xi1: f64) -> Result<Trajectory> {
        if !(xi0 > 0.0 && xi1 > 0.0 && xi0.is_finite() && xi1.is_finite()) {
            return Err(Error::domain("integration endpoints must be positive"));
        }
        if !(1e-13..=1e-3).contains(&self.tol) {
            return Err(Error::domain(format!(
                "tolerance {} outside [1e-13, 1e-3]",
                self.tol
            )));
        }
        let start = Sample {
            xi: xi0,
            theta: theta0,
            dtheta: dtheta0,
        };
        let mut points = vec![start];
        let c_start = sample_energy(&start);
        let dir = (xi1 - xi0).signum();
        let span = (xi1 - xi0).abs();
        let mut xi = xi0;
        let mut y: State = [theta0, dtheta0];
        let mut k1 = lane_emden_rhs(xi, &y);
        let mut h = dir * (1e-3 * xi0).min(span);
        let mut err_old = 1e-4_f64;
        let mut crossings: Vec<f64> = Vec::new();
        let mut truncated = false;
        let mut steps = 0usize;

        while (xi1 - xi) * dir > 0.0 {
            steps += 1;
            if steps > self.max_steps {
                return Err(Error::IntegrationFailure {
                    last: *points.last().unwrap(),
                });
            }
            if (xi + h - xi1) * dir > 0.0 {
                h = xi1 - xi;
            }
            let floor = self.min_step.max(16.0 * f64::EPSILON * xi.abs());
            if h.abs() < floor && (xi1 - xi).abs() > floor {
                return Err(Error::IntegrationFailure {
                    last: *points.last().unwrap(),
                });
            }
            let k2 = lane_emden_rhs(xi + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
            let k3 = lane_emden_rhs(xi + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
            let k4 = lane_emden_rhs(
                xi + C4 * h,
                &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
            );
            let k5 = lane_emden_rhs(
                xi + C5 * h,
                &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = lane_emden_rhs(
                xi + h,
                &axpy(
                    &y,
                    h,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                ),
            );
            let y_new = axpy(
                &y,
                h,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            let k7 = lane_emden_rhs(xi + h, &y_new);

            let mut err = 0.0;
            for i in 0..2 {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = self.tol + self.tol * y[i].abs().max(y_new[i].abs());
                err += (e / sc) * (e / sc);
            }
            // Error per unit step (for |h| < 1) keeps the global error
            // proportional to the tolerance.
            let err = (0.5 * err).sqrt() / h.abs().min(1.0);
            if !err.is_finite() {
                h *= 0.1;
                continue;
            }

            // PI step control.
            const BETA: f64 = 0.04;
            let expo = 0.2 - 0.75 * BETA;
            if err <= 1.0 {
                let fac = (err.max(1e-12).powf(expo) / err_old.powf(BETA) / 0.9).clamp(0.2, 10.0);
                err_old = err.max(1e-4);
                let xi_new = xi + h;
                if y[0] != 0.0 && y_new[0] != 0.0 && y[0].signum() != y_new[0].signum() {
                    crossings.push(xi - y[0] * h / (y_new[0] - y[0]));
                }
                xi = xi_new;
                y = y_new;
                k1 = k7;
                points.push(Sample {
                    xi,
                    theta: y[0],
                    dtheta: y[1],
                });
                h /= fac;
                if let [.., p, q] = crossings[..] {
                    if (q - p).abs() < 100.0 * self.min_step {
                        truncated = true;
                        break;
                    }
                }
            } else {
                let fac = (err.powf(expo) / 0.9).min(5.0);
                h /= fac;
            }
        }

        let c_estimate = sample_energy(points.last().unwrap());
        Ok(Trajectory {
            points,
            tolerance: self.tol,
            c_start,
            c_estimate,
            truncated,
        })
    }
}

/// Integrates `θ'' = -2θ'/ξ - θ⁵` from `(ξ0, θ0, θ'0)` to `ξ1` (either
/// direction) with an adaptive Dormand-Prince 5(4) pair.
pub fn integrate_lane_emden(
    theta0: f64,
    dtheta0: f64,
    xi0: f64,
    xi1: f64,
    tol: f64,
) -> Result<Trajectory> {
    Integrator::new(tol).run(theta0, dtheta0, xi0, xi1)
}

/// Adaptive Gauss-Kronrod (7, 15) quadrature.
pub mod quad {
    const XGK: [f64; 8] = [
        0.991_455_371_120_812_6,
        0.949_107_912_342_758_5,
        0.864_864_423_359_769_1,
        0.741_531_185_599_394_4,
        0.586_087_235_467_691_1,
        0.405_845_151_377_397_2,
        0.207_784_955_007_898_5,
        0.0,
    ];
    const WGK: [f64; 8] = [
        0.022_935_322_010_529_22,
        0.063_092_092_629_978_55,
        0.104_790_010_322_250_18,
        0.140_653_259_715_525_92,
        0.169_004_726_639_267_9,
        0.190_350_578_064_785_4,
        0.204_432_940_075_298_9,
        0.209_482_141_084_727_83,
    ];
    const WG: [f64; 4] = [
        0.129_484_966_168_869_7,
        0.279_705_391_489_276_7,
        0.381_830_050_505_118_9,
        0.417_959_183_673_469_4,
    ];

    fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let fc = f(c);
        let mut k = WGK[7] * fc;
        let mut g = WG[3] * fc;
        for j in 0..7 {
            let x = h * XGK[j];
            let s = f(c - x) + f(c + x);
            k += WGK[j] * s;
            if j % 2 == 1 {
                g += WG[j / 2] * s;
            }
        }
        (k * h, (k - g).abs() * h)
    }

    fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, whole: f64, depth: u32) -> f64 {
        let (k, err) = kronrod(f, a, b);
        if err <= tol * whole.abs().max(f64::MIN_POSITIVE) || depth >= 60 {
            return k;
        }
        let m = 0.5 * (a + b);
        adapt(f, a, m, tol, whole, depth + 1) + adapt(f, m, b, tol, whole, depth + 1)
    }

    /// `∫_a^b f` to relative tolerance `tol`.
    pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
        let (mut whole, _) = kronrod(&f, a, b);
        // One refinement of the scale so that tiny first estimates do not
        // drive the recursion.
        let m = 0.5 * (a + b);
        whole = whole
            .abs()
            .max(kronrod(&f, a, m).0.abs() + kronrod(&f, m, b).0.abs());
        adapt(&f, a, b, 0.1 * tol, whole, 0)
    }

    /// `∫_a^∞ f` through `x = a + t/(1 - t)`.
    pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, tol: f64) -> f64 {
        integrate(
            |t| {
                let u = 1.0 - t;
                f(a + t / u) / (u * u)
            },
            0.0,
            1.0,
            tol,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{schuster, Branch};
    use approx::assert_relative_eq;

    #[test]
    fn phase_transform_fixed_point() {
        let p = phase_transform(&Sample {
            xi: 0.5,
            theta: 1.0,
            dtheta: -1.0,
        })
        .unwrap();
        assert_eq!((p.z, p.dz), (1.0, 0.0));
        assert_eq!(energy_constant(&p), -2.0);
    }

    #[test]
    fn phase_transform_schuster() {
        let xi = 3f64.sqrt();
        let s = Sample {
            xi,
            theta: schuster(xi, Branch::Plus),
            dtheta: 0.0,
        };
        let p = phase_transform(&s).unwrap();
        assert_relative_eq!(p.z, 3f64.powf(0.25), max_relative = 1e-15);
    }

    #[test]
    fn phase_transform_round_trip() {
        let s = Sample {
            xi: 2.7,
            theta: -0.31,
            dtheta: 0.042,
        };
        let back = phase_transform(&s).unwrap().to_sample();
        assert_relative_eq!(back.xi, s.xi, max_relative = 1e-14);
        assert_relative_eq!(back.theta, s.theta, max_relative = 1e-14);
        assert_relative_eq!(back.dtheta, s.dtheta, max_relative = 1e-14);
        assert!(phase_transform(&Sample {
            xi: 0.0,
            theta: 1.0,
            dtheta: 0.0
        })
        .is_err());
    }

    #[test]
    fn energy_constant_values() {
        let p = PhasePoint {
            t: 0.0,
            z: 2f64.sqrt(),
            dz: 0.0,
        };
        assert_relative_eq!(energy_constant(&p), 2.0, epsilon = 1e-14);
        let p = PhasePoint {
            t: 0.0,
            z: 0.0,
            dz: (1.3f64 / 12.0).sqrt(),
        };
        assert_relative_eq!(energy_constant(&p), 1.3, max_relative = 1e-15);
    }

    #[test]
    fn sextic_roots_cases() {
        assert!(sextic_roots_oracle(-3.0).is_empty());
        let r = sextic_roots_oracle(-2.0);
        assert_eq!(r.len(), 2);
        assert_relative_eq!(r[0], -1.0, epsilon = 1e-12);
        assert_relative_eq!(r[1], 1.0, epsilon = 1e-12);
        let r = sextic_roots_oracle(2.0);
        assert_eq!(r.len(), 2);
        assert_relative_eq!(r[1], 2f64.sqrt(), epsilon = 1e-13);
        assert_eq!(sextic_roots_oracle(-1.0).len(), 4);
    }

    #[test]
    fn quadrature_basics() {
        assert_relative_eq!(
            quad::integrate(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-14),
            2.0,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            quad::integrate_to_infinity(|x| 1.0 / (1.0 + x * x), 0.0, 1e-13),
            std::f64::consts::FRAC_PI_2,
            max_relative = 1e-12
        );
    }

    #[test]
    fn integrator_rejects_bad_input() {
        assert!(integrate_lane_emden(1.0, 0.0, 0.0, 1.0, 1e-8).is_err());
        assert!(integrate_lane_emden(1.0, 0.0, 0.1, 1.0, 1e-1).is_err());
    }

    #[test]
    fn integrator_follows_schuster() {
        let xi0 = 0.1;
        let th0 = schuster(xi0, Branch::Plus);
        let d0 = -xi0 / 3.0 * (1.0 + xi0 * xi0 / 3.0).powf(-1.5);
        let tr = integrate_lane_emden(th0, d0, xi0, 10.0, 1e-10).unwrap();
        assert!((tr.last().theta - schuster(10.0, Branch::Plus)).abs() < 1e-8);
        assert!((tr.c_estimate - tr.c_start).abs() <= 10.0 * 1e-10);
        assert!(!tr.truncated);
        assert!(tr.points.windows(2).all(|w| w[1].xi > w[0].xi));
    }

    #[test]
    fn integrator_backwards() {
        let xi0: f64 = 4.0;
        let th0 = 1.0 / (2.0_f64 * xi0).sqrt();
        let d0 = -(2.0_f64 * xi0).powf(-1.5);
        let tr = integrate_lane_emden(th0, d0, xi0, 0.1, 1e-11).unwrap();
        let last = tr.last();
        assert_eq!(last.xi, 0.1);
        assert!((last.theta - 1.0 / 0.2f64.sqrt()).abs() < 1e-8);
    }
}
