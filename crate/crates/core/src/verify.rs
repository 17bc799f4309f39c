//! The check battery behind `lane-emden verify`.

use std::fmt::Write as _;

use serde::Serialize;

use crate::elliptic::Modulus;
use crate::error::{Error, Result};
use crate::factor::{cardano_roots, classify, positive_root_f, Regime};
use crate::families::{
    apply_scaling, c1_form, c1_form_constant, calibrate_b, calibrate_b_weierstrass, scaling_lambda,
    scaling_parity, Branch, Solution, SolutionParams,
};
use crate::oracle::{
    energy_constant, integrate_lane_emden, log_space, ode_residual_of, phase_transform,
    residual_grid, sextic_roots_oracle,
};

/// Energy constants checked when no grid is given.
pub const DEFAULT_GRID: [f64; 15] = [
    -3.0, -2.0, -1.9, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 10.0,
];

/// Environment variable overriding [`Thresholds`].
pub const TOL_ENV: &str = "LE_VERIFY_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub roots: f64,
    pub residual: f64,
    pub energy: f64,
    pub band: f64,
    pub scaling: f64,
    pub cross: f64,
    pub equivalence: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            roots: 1e-11,
            residual: 1e-7,
            energy: 1e-9,
            band: 1e-12,
            scaling: 1e-9,
            cross: 1e-6,
            equivalence: 1e-8,
        }
    }
}

impl Thresholds {
    /// Applies overrides of the form `1e-6` (every threshold) or
    /// `residual=1e-6,energy=1e-8`.
    pub fn with_overrides(mut self, overrides: &str) -> Result<Self> {
        let overrides = overrides.trim();
        if overrides.is_empty() {
            return Ok(self);
        }
        if let Ok(v) = overrides.parse::<f64>() {
            self = Thresholds {
                roots: v,
                residual: v,
                energy: v,
                band: v,
                scaling: v,
                cross: v,
                equivalence: v,
            };
            return Ok(self);
        }
        for item in overrides.split(',') {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::domain(format!("malformed threshold override {item:?}")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::domain(format!("threshold {value:?} is not a number")))?;
            let slot = match key.trim() {
                "roots" => &mut self.roots,
                "residual" => &mut self.residual,
                "energy" => &mut self.energy,
                "band" => &mut self.band,
                "scaling" => &mut self.scaling,
                "cross" => &mut self.cross,
                "equivalence" => &mut self.equivalence,
                other => return Err(Error::domain(format!("unknown check {other:?}"))),
            };
            *slot = value;
        }
        Ok(self)
    }

    pub fn from_env() -> Result<Self> {
        match std::env::var(TOL_ENV) {
            Ok(v) => Self::default().with_overrides(&v),
            Err(_) => Ok(Self::default()),
        }
    }
}

/// Deliberate corruption of the solutions, for checking that the battery
/// can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Use `k²` where the modulus `k` belongs.
    ModulusSquared,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check: &'static str,
    pub family: String,
    #[serde(rename = "C")]
    pub c: f64,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckRecord {
    fn new(check: &'static str, family: Regime, c: f64, value: f64, threshold: f64) -> Self {
        CheckRecord {
            check,
            family: family.name().to_string(),
            c,
            value,
            threshold,
            pass: value.is_finite() && value <= threshold,
        }
    }

    fn failed(check: &'static str, family: Regime, c: f64, threshold: f64) -> Self {
        CheckRecord {
            check,
            family: family.name().to_string(),
            c,
            value: f64::NAN,
            threshold,
            pass: false,
        }
    }
}

fn prepare(params: SolutionParams, fault: Fault) -> Result<Solution> {
    let sol = Solution::new(params)?;
    match (fault, params.family) {
        (Fault::ModulusSquared, Regime::DcFamily | Regime::ScFamily) => {
            let k = sol.modulus().map(|m| m.k()).unwrap_or(0.0);
            sol.with_modulus(Modulus::new(k * k)?)
        }
        _ => Ok(sol),
    }
}

fn max_over<F: Fn(f64) -> Result<f64>>(grid: &[f64], f: F) -> Result<f64> {
    grid.iter().try_fold(0.0_f64, |acc, &x| Ok(acc.max(f(x)?)))
}

/// Largest deviation between the factorization roots and bisection roots.
fn roots_deviation(c: f64, regime: Regime) -> Result<f64> {
    let oracle = sextic_roots_oracle(c);
    let mut expected: Vec<f64> = match regime {
        Regime::NoRealSolution => Vec::new(),
        Regime::SingularFixedPoint => vec![1.0],
        Regime::Schuster => vec![0.0, 3f64.sqrt().sqrt()],
        Regime::DcFamily => {
            let r = cardano_roots(c)?;
            vec![r.a.sqrt(), r.b.sqrt()]
        }
        Regime::ScFamily => vec![cardano_roots(c)?.c.sqrt()],
        Regime::Srivastava | Regime::WeierstrassFamily => vec![positive_root_f(c)?.f.sqrt()],
    };
    let mut mirrored: Vec<f64> = expected.iter().filter(|&&r| r != 0.0).map(|r| -r).collect();
    expected.append(&mut mirrored);
    expected.sort_by(f64::total_cmp);
    if expected.len() != oracle.len() {
        return Ok(f64::INFINITY);
    }
    Ok(expected
        .iter()
        .zip(&oracle)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Runs every applicable check for every `C` in `grid`.
pub fn run(grid: &[f64], thresholds: &Thresholds, fault: Fault) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    for &c in grid {
        let regime = match classify(c) {
            Ok(r) => r,
            Err(_) => {
                records.push(CheckRecord::failed(
                    "classify",
                    Regime::NoRealSolution,
                    c,
                    0.0,
                ));
                continue;
            }
        };
        let rec = |check, value: Result<f64>, threshold| match value {
            Ok(v) => CheckRecord::new(check, regime, c, v, threshold),
            Err(_) => CheckRecord::failed(check, regime, c, threshold),
        };
        records.push(rec("roots", roots_deviation(c, regime), thresholds.roots));
        if regime == Regime::NoRealSolution {
            continue;
        }
        let params = SolutionParams::new(c, 1.0, Branch::Plus).expect("regime has solutions");
        let sol = match prepare(params, fault) {
            Ok(s) => s,
            Err(_) => {
                records.push(CheckRecord::failed("prepare", regime, c, 0.0));
                continue;
            }
        };

        let grid = residual_grid(&sol, 0.1, 10.0, 200, 1e-6);
        records.push(rec(
            "residual",
            ode_residual_of(&sol, &grid),
            thresholds.residual,
        ));

        let plain = log_space(0.1, 10.0, 200);
        let energy = max_over(&plain, |xi| {
            let p = phase_transform(&sol.eval(xi)?)?;
            Ok((energy_constant(&p) - c).abs())
        });
        records.push(rec("energy", energy, thresholds.energy));

        let (lo, hi) = sol.band();
        let band = max_over(&plain, |xi| {
            let th = sol.theta(xi)?;
            let z2 = 2.0 * xi * th * th;
            Ok(((lo - z2).max(z2 - hi)).max(0.0) / hi)
        });
        records.push(rec("band", band, thresholds.band));

        if let Some(period) = sol.log_period() {
            for m in 1..=2 {
                let dev = (|| {
                    let lambda = scaling_lambda(c, m)?;
                    let parity = scaling_parity(c, m)?;
                    let scaled = prepare(apply_scaling(&params, lambda)?, fault)?;
                    max_over(&plain, |xi| {
                        Ok((scaled.theta(xi)? - parity * sol.theta(xi)?).abs())
                    })
                })();
                records.push(rec(
                    if m == 1 { "scaling-m1" } else { "scaling-m2" },
                    dev,
                    thresholds.scaling,
                ));
            }
            if regime == Regime::ScFamily {
                records.push(rec(
                    "sc-weierstrass",
                    representation_gap(c, period, fault),
                    thresholds.equivalence,
                ));
            }
            if matches!(regime, Regime::ScFamily | Regime::WeierstrassFamily) {
                records.push(rec("c1-form", c1_form_gap(c), thresholds.equivalence));
            }
        }

        let cross = (|| {
            let s0 = sol.eval(0.2)?;
            let tr = integrate_lane_emden(s0.theta, s0.dtheta, 0.2, 5.0, 1e-11)?;
            tr.points.iter().try_fold(0.0_f64, |acc, p| {
                Ok(acc.max((p.theta - sol.theta(p.xi)?).abs()))
            })
        })();
        records.push(rec("cross-validation", cross, thresholds.cross));
    }
    records
}

/// sc and ℘ representations calibrated to the same point, compared over
/// one full period of the sign-continued solution.
fn representation_gap(c: f64, log_period: f64, fault: Fault) -> Result<f64> {
    let (xi0, z0) = (1.0, 0.5 * cardano_roots(c)?.c.sqrt());
    let b_sc = calibrate_b(c, xi0, z0)?;
    let b_w = calibrate_b_weierstrass(c, xi0, z0)?;
    let sc = prepare(SolutionParams::new(c, b_sc, Branch::Plus)?, fault)?;
    let w = Solution::new(SolutionParams::weierstrass(c, b_w, Branch::Plus)?)?;
    let grid = log_space(xi0, xi0 * (2.0 * log_period).exp(), 400);
    max_over(&grid, |xi| Ok((sc.theta(xi)? - w.theta(xi)?).abs()))
}

/// The `(c1, B)` form against `|θ|` of the ℘ family with the same `B`.
fn c1_form_gap(c: f64) -> Result<f64> {
    let c1 = c1_form_constant(c)?;
    let w = Solution::new(SolutionParams::weierstrass(c, 1.0, Branch::Plus)?)?;
    let grid = residual_grid(&w, 0.1, 10.0, 200, 1e-6);
    max_over(&grid, |xi| {
        Ok((c1_form(xi, c1, 1.0)? - w.theta(xi)?.abs()).abs())
    })
}

pub fn all_pass(records: &[CheckRecord]) -> bool {
    records.iter().all(|r| r.pass)
}

pub fn text_report(records: &[CheckRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let _ = writeln!(
            out,
            "{} {:<17} {:<19} C={:<6} value={:<12.3e} threshold={:.1e}",
            if r.pass { "PASS" } else { "FAIL" },
            r.check,
            r.family,
            r.c,
            r.value,
            r.threshold
        );
    }
    let failed = records.iter().filter(|r| !r.pass).count();
    let _ = writeln!(out, "{} checks, {} failed", records.len(), failed);
    out
}

pub fn json_report(records: &[CheckRecord]) -> String {
    serde_json::to_string_pretty(records).expect("records serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse() {
        let t = Thresholds::default().with_overrides("1e-3").unwrap();
        assert_eq!(t.energy, 1e-3);
        let t = Thresholds::default()
            .with_overrides("energy=2e-9, cross=1e-5")
            .unwrap();
        assert_eq!((t.energy, t.cross, t.residual), (2e-9, 1e-5, 1e-7));
        assert!(Thresholds::default().with_overrides("bogus=1").is_err());
        assert!(Thresholds::default().with_overrides("energy").is_err());
    }

    #[test]
    fn default_grid_report() {
        let records = run(&DEFAULT_GRID, &Thresholds::default(), Fault::None);
        assert!(all_pass(&records), "{}", text_report(&records));
    }

    #[test]
    fn single_constant_passes() {
        let records = run(&[-1.0], &Thresholds::default(), Fault::None);
        assert!(all_pass(&records), "{}", text_report(&records));
    }

    #[test]
    fn modulus_fault_is_caught() {
        let records = run(&[-1.0, 1.0], &Thresholds::default(), Fault::ModulusSquared);
        assert!(!all_pass(&records));
    }
}
