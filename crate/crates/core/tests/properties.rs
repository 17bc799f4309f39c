//! Property tests for the elliptic kernels, the factorization and the CSV
//! format.

use proptest::prelude::*;

use lane_emden::cli::{sample_table, SampleTable};
use lane_emden::elliptic::{
    complete_k, jacobi_cd, jacobi_dc, jacobi_sc, jacobi_sncndn, weierstrass_p, Modulus,
    WeierstrassInvariants, WeierstrassReduction,
};
use lane_emden::factor::{cardano_roots, positive_root_f, sextic_eval};
use lane_emden::{Branch, SolutionParams};

fn modulus() -> impl Strategy<Value = Modulus> {
    (0.0..0.999_f64).prop_map(|k| Modulus::new(k).unwrap())
}

proptest! {
    #[test]
    fn jacobi_identities(u in -50.0..50.0_f64, m in modulus()) {
        let t = jacobi_sncndn(u, m).unwrap();
        let k2 = m.k() * m.k();
        prop_assert!((t.sn * t.sn + t.cn * t.cn - 1.0).abs() <= 1e-12);
        prop_assert!((t.dn * t.dn + k2 * t.sn * t.sn - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn dc_cd_reciprocal(u in -20.0..20.0_f64, m in modulus()) {
        if let (Ok(dc), Ok(cd)) = (jacobi_dc(u, m), jacobi_cd(u, m)) {
            prop_assert!((dc * cd - 1.0).abs() <= 1e-12);
            prop_assert!(dc.abs() >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn dc_antiperiod_two_k(u in -5.0..5.0_f64, m in modulus()) {
        let k = complete_k(m).unwrap();
        let (Ok(a), Ok(half), Ok(full)) =
            (jacobi_dc(u, m), jacobi_dc(u + 2.0 * k, m), jacobi_dc(u + 4.0 * k, m))
        else {
            return Ok(());
        };
        prop_assert!((a + half).abs() <= 1e-9 * a.abs().max(1.0));
        prop_assert!((a - full).abs() <= 1e-9 * a.abs().max(1.0));
    }

    #[test]
    fn sc_is_odd(u in -5.0..5.0_f64, m in modulus()) {
        if let (Ok(a), Ok(b)) = (jacobi_sc(u, m), jacobi_sc(-u, m)) {
            prop_assert!((a + b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn weierstrass_differential_equation(c in 0.05..20.0_f64, frac in 0.05..0.95_f64) {
        prop_assume!((c - 2.0).abs() > 1e-3);
        let inv = WeierstrassInvariants::lane_emden(c);
        let red = WeierstrassReduction::new(inv).unwrap();
        let x = frac * red.real_period();
        let p = weierstrass_p(x, inv).unwrap();
        let dp = red.derivative(x).unwrap();
        let rhs = 4.0 * p * p * p - inv.g2() * p - inv.g3();
        let scale = 4.0 * p.abs().powi(3) + inv.g2().abs() * p.abs() + inv.g3().abs();
        prop_assert!((dp * dp - rhs).abs() <= 1e-8 * scale);
    }

    #[test]
    fn factorization_matches_sextic(c in -1.999..1.999_f64, z in -1.9..1.9_f64) {
        prop_assume!(c.abs() > 1e-9);
        let f = cardano_roots(c).unwrap().factored(z);
        let scale = z.powi(6) + 3.0 * z * z + c.abs();
        prop_assert!((f - sextic_eval(z, c)).abs() <= 1e-12 * scale);
    }

    #[test]
    fn quartic_factorization(c in 2.0..50.0_f64, z in -2.5..2.5_f64) {
        let f = positive_root_f(c).unwrap().factored(z);
        let scale = z.powi(6) + 3.0 * z * z + c.abs();
        prop_assert!((f - sextic_eval(z, c)).abs() <= 1e-12 * scale);
    }

    #[test]
    fn csv_round_trip(c in -1.99..10.0_f64, b in 0.1..10.0_f64, minus in any::<bool>()) {
        prop_assume!(c.abs() > 1e-6 && (c - 2.0).abs() > 1e-6);
        let branch = if minus { Branch::Minus } else { Branch::Plus };
        let params = SolutionParams::new(c, b, branch).unwrap();
        let table = sample_table(&params, 0.05, 20.0, 40, true).unwrap();
        let back = SampleTable::parse(&table.to_csv()).unwrap();
        prop_assert_eq!(back, table);
    }
}
