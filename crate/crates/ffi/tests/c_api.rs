use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use lane_emden_ffi::*;

fn last_error() -> String {
    let p = le_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn new_solution(c: f64, b: f64) -> *mut LeSolution {
    let mut h = ptr::null_mut();
    assert_eq!(
        unsafe { le_solution_new(c, b, LeBranch::Plus as i32, &mut h) },
        LeStatus::Ok
    );
    assert!(!h.is_null());
    h
}

#[test]
fn classify_every_regime() {
    let cases = [
        (-5.0, LeRegime::NoRealSolution),
        (-2.0, LeRegime::SingularFixedPoint),
        (-1.0, LeRegime::DcFamily),
        (0.0, LeRegime::Schuster),
        (1.0, LeRegime::ScFamily),
        (2.0, LeRegime::Srivastava),
        (3.0, LeRegime::WeierstrassFamily),
    ];
    for (c, want) in cases {
        let mut r = LeRegime::NoRealSolution;
        assert_eq!(unsafe { le_classify(c, &mut r) }, LeStatus::Ok);
        assert_eq!(r, want, "C = {c}");
    }
    let mut r = LeRegime::NoRealSolution;
    assert_eq!(unsafe { le_classify(f64::NAN, &mut r) }, LeStatus::Domain);
}

#[test]
fn roots_and_positive_root() {
    let mut roots = LeRoots::default();
    assert_eq!(unsafe { le_cardano_roots(-1.0, &mut roots) }, LeStatus::Ok);
    assert!((roots.a - 0.347_296_355_333_860_7).abs() < 1e-12);
    assert!((roots.c * roots.c - roots.a * roots.b - 3.0).abs() < 1e-12);

    let mut f = 0.0;
    assert_eq!(unsafe { le_positive_root(2.0, &mut f) }, LeStatus::Ok);
    assert!((f - 2.0).abs() < 1e-14);
    assert_ne!(unsafe { le_positive_root(1.0, &mut f) }, LeStatus::Ok);
}

#[test]
fn eval_matches_core_library() {
    let h = new_solution(-1.0, 1.0);
    let core = lane_emden::Solution::new(
        lane_emden::SolutionParams::new(-1.0, 1.0, lane_emden::Branch::Plus).unwrap(),
    )
    .unwrap();
    let xs = [0.1, 0.5, 1.0, 4.0];
    let mut out = [LeSample::default(); 4];
    let mut done = 0;
    let status =
        unsafe { le_solution_eval_many(h, xs.as_ptr(), xs.len(), out.as_mut_ptr(), &mut done) };
    assert_eq!(status, LeStatus::Ok);
    assert_eq!(done, 4);
    for (s, &x) in out.iter().zip(&xs) {
        let want = core.eval(x).unwrap();
        assert_eq!(
            (s.xi, s.theta, s.dtheta),
            (want.xi, want.theta, want.dtheta)
        );
    }
    let mut regime = LeRegime::NoRealSolution;
    assert_eq!(unsafe { le_solution_regime(h, &mut regime) }, LeStatus::Ok);
    assert_eq!(regime, LeRegime::DcFamily);
    unsafe { le_solution_free(h) };
}

#[test]
fn eval_many_stops_at_first_error() {
    let h = new_solution(-1.0, 1.0);
    let xs = [1.0, -1.0, 2.0];
    let mut out = [LeSample::default(); 3];
    let mut done = 99;
    let status = unsafe { le_solution_eval_many(h, xs.as_ptr(), 3, out.as_mut_ptr(), &mut done) };
    assert_eq!(status, LeStatus::Domain);
    assert_eq!(done, 1);
    unsafe { le_solution_free(h) };
}

#[test]
fn invalid_arguments_report_status_and_message() {
    let mut h = ptr::null_mut();
    assert_eq!(
        unsafe { le_solution_new(-3.0, 1.0, 1, &mut h) },
        LeStatus::NoRealSolution
    );
    assert!(h.is_null());
    assert!(last_error().contains("-3"), "{}", last_error());

    assert_eq!(
        unsafe { le_solution_new(-1.0, 1.0, 7, &mut h) },
        LeStatus::Domain
    );
    assert!(last_error().contains("branch"));

    assert_eq!(
        unsafe { le_solution_new(-1.0, -2.0, 1, &mut h) },
        LeStatus::Domain
    );
    assert_eq!(
        unsafe { le_solution_new_weierstrass(-1.0, 1.0, 1, &mut h) },
        LeStatus::OutOfRegime
    );

    let mut s = LeSample::default();
    assert_eq!(
        unsafe { le_solution_eval(ptr::null(), 1.0, &mut s) },
        LeStatus::Domain
    );
    unsafe { le_solution_free(ptr::null_mut()) };
}

#[test]
fn scaling_lambda_and_log_period_agree() {
    for c in [-1.0, 0.5, 3.0] {
        let (mut lambda, mut parity) = (0.0, 0.0);
        assert_eq!(
            unsafe { le_scaling_lambda(c, 1, &mut lambda, &mut parity) },
            LeStatus::Ok
        );
        let h = new_solution(c, 1.0);
        let mut period = 0.0;
        assert_eq!(
            unsafe { le_solution_log_period(h, &mut period) },
            LeStatus::Ok
        );
        assert!((lambda.ln() - period).abs() <= 1e-12 * period);
        assert_eq!(parity, if c > 0.0 { -1.0 } else { 1.0 });
        unsafe { le_solution_free(h) };
    }
    let h = new_solution(0.0, 1.0);
    let mut period = 0.0;
    assert_eq!(
        unsafe { le_solution_log_period(h, &mut period) },
        LeStatus::OutOfRegime
    );
    unsafe { le_solution_free(h) };
}

#[test]
fn calibrated_scale_hits_target() {
    let mut b = 0.0;
    assert_eq!(
        unsafe { le_calibrate_b(-1.0, 0.5, 1.0, &mut b) },
        LeStatus::Ok
    );
    let h = new_solution(-1.0, b);
    let mut s = LeSample::default();
    assert_eq!(unsafe { le_solution_eval(h, 0.5, &mut s) }, LeStatus::Ok);
    assert!((s.theta - 1.0).abs() < 1e-12);
    unsafe { le_solution_free(h) };
}

#[test]
fn header_declares_every_export() {
    let header =
        std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/lane_emden.h"))
            .unwrap();
    for name in [
        "le_last_error",
        "le_status_name",
        "le_version",
        "le_classify",
        "le_cardano_roots",
        "le_positive_root",
        "le_scaling_lambda",
        "le_calibrate_b",
        "le_solution_new",
        "le_solution_new_weierstrass",
        "le_solution_free",
        "le_solution_eval",
        "le_solution_eval_many",
        "le_solution_regime",
        "le_solution_log_period",
        "typedef struct LeSolution LeSolution",
        "LE_BRANCH_MINUS = -1",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}

/// Directory holding the built static library, next to `target/<profile>/deps`.
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_static_library() {
    let lib = artifact_dir().join("liblane_emden_ffi.a");
    let Ok(cc) = std::env::var("CC").or_else(|_| which_cc()) else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    assert!(lib.exists(), "{} not built", lib.display());
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/smoke.c"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}

fn which_cc() -> Result<String, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok())
        .map(str::to_string)
        .ok_or(())
}
