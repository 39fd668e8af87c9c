//! The ten acceptance criteria at their stated tolerances, one test each.
//! Every test prints a single `criterion N ... PASS|FAIL` line before
//! asserting.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rzkbo::experiments::{
    b_base_grid, decay_base_grid, gaussian_family, run_b_contrast, run_decay_breakdown,
    run_inequality_suite, run_linear_growth_suite, run_solver_checks, run_uc_jump,
    solver_suite_data, uc_initial_data, ExperimentReport,
};
use rzkbo::families::Gaussian;
use rzkbo::grid::LineSpec;
use rzkbo::multipliers::sign;
use rzkbo::norms::{sobolev_aniso, NormIndices};
use rzkbo::oracles::{jump_blowup_demo, stein_scaling, JumpConfig, STEIN_ETAS, STEIN_TS};
use rzkbo::propagator::{evolve_linear, group_symbol, symbol_deriv_eta, symbol_deriv_xi};
use rzkbo::solver::SolverParams;
use rzkbo::GridSpec;

fn report(n: u32, name: &str, pass: bool, detail: String, start: Instant) {
    println!(
        "criterion {n:>2} {name}: {} ({detail}; {:.1} s)",
        if pass { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64()
    );
}

fn failed(rep: &ExperimentReport) -> Vec<String> {
    rep.verdicts
        .iter()
        .filter(|v| !v.pass)
        .map(|v| {
            format!(
                "{} measured {:.4} vs {}",
                v.criterion, v.measured, v.threshold
            )
        })
        .collect()
}

#[test]
fn criterion_01_linear_isometry() {
    let start = Instant::now();
    let g = GridSpec::default();
    let phi = Gaussian::unit().sample(g).unwrap();
    let n0 = sobolev_aniso(&phi, 1.0, 2.0).unwrap();
    let worst = [0.1, 1.0, 10.0]
        .iter()
        .map(|&t| {
            let u = evolve_linear(&phi, t, 1.0).unwrap();
            (sobolev_aniso(&u, 1.0, 2.0).unwrap() / n0 - 1.0).abs()
        })
        .fold(0.0, f64::max);
    let pass = worst <= 1e-10;
    report(
        1,
        "linear isometry",
        pass,
        format!("max |ratio-1| = {worst:.2e}"),
        start,
    );
    assert!(pass);
}

/// Binomial central difference of order `j`, nodes `x + (j/2 − k)h`.
fn central(f: &dyn Fn(f64) -> Complex64, x: f64, j: usize, h: f64) -> Complex64 {
    let mut c = 1.0;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..=j {
        if k > 0 {
            c = c * (j + 1 - k) as f64 / k as f64;
        }
        let s = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc += s * c * f(x + (j as f64 / 2.0 - k as f64) * h);
    }
    acc / h.powi(j as i32)
}

/// Central differences at `h·0.75^i`, `i < 10`, extrapolated to `h² → 0`
/// by Neville's scheme.
fn richardson(f: &dyn Fn(f64) -> Complex64, x: f64, j: usize, h: f64) -> Complex64 {
    const LEVELS: usize = 10;
    let hs: Vec<f64> = (0..LEVELS).map(|i| h * 0.75f64.powi(i as i32)).collect();
    let mut p: Vec<Complex64> = hs.iter().map(|&h| central(f, x, j, h)).collect();
    for m in 1..LEVELS {
        for i in (m..LEVELS).rev() {
            let (a, b) = (hs[i - m] * hs[i - m], hs[i] * hs[i]);
            p[i] = (a * p[i] - b * p[i - 1]) / (a - b);
        }
    }
    p[LEVELS - 1]
}

#[test]
fn criterion_02_symbol_derivatives() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let h: f64 = 1.2;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let t = rng.gen_range(0.1..2.0);
        let xi: f64 = rng.gen_range(0.5..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let eta = rng.gen_range(-2.0..2.0);
        for j in 1..=4 {
            let d = symbol_deriv_xi(j, 1.0).unwrap();
            // keep the stencil off the kink at ξ = 0
            let hx = h.min(1.6 * xi.abs() / j as f64);
            let fd = richardson(&|x| group_symbol(t, x, eta, 1.0), xi, j, hx);
            worst = worst.max((fd - d.regular_part(t, xi, eta)).norm() / d.magnitude(t, xi, eta));
        }
        for j in 1..=6 {
            let d = symbol_deriv_eta(j, 1.0).unwrap();
            let fd = richardson(&|e| group_symbol(t, xi, e, 1.0), eta, j, h);
            worst = worst.max((fd - d.regular_part(t, xi, eta)).norm() / d.magnitude(t, xi, eta));
        }
    }
    let pass = worst <= 1e-6;
    report(
        2,
        "symbol-derivative fidelity",
        pass,
        format!("max rel err = {worst:.2e}"),
        start,
    );
    assert!(pass);
}

#[test]
fn criterion_03_weighted_growth_degrees() {
    let start = Instant::now();
    let rep = run_linear_growth_suite(GridSpec::default(), 1.0).unwrap();
    let degrees: Vec<String> = rep
        .verdicts
        .iter()
        .filter(|v| v.criterion.starts_with("growth degree r"))
        .map(|v| format!("{:.2}/{:.1}", v.measured, v.threshold))
        .collect();
    let bad = failed(&rep);
    report(
        3,
        "weighted growth degrees",
        bad.is_empty(),
        format!("degree/limit {}", degrees.join(" ")),
        start,
    );
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn criterion_04_decay_breakdown() {
    let start = Instant::now();
    let rep = run_decay_breakdown(decay_base_grid(GridSpec::default()).unwrap(), 1.0).unwrap();
    let g = rep.find("decay gaussian box growth").unwrap().measured;
    let p = rep.find("decay projected box growth").unwrap().measured;
    let bad = failed(&rep);
    report(
        4,
        "decay breakdown",
        bad.is_empty(),
        format!("gaussian ratio {g:.4} (need > 1.5), projected ratio {p:.4} (need < 1.1)"),
        start,
    );
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn criterion_05_operator_boundedness() {
    let start = Instant::now();
    let fam = gaussian_family(b_base_grid(GridSpec::default()).unwrap(), 20, 0).unwrap();
    let rep = run_b_contrast(&fam, 1.0, 6.0, 1.0, 4).unwrap();
    let inside = rep.find("b-bounded box doubling r1=2.4").unwrap().measured;
    let outside = rep.find("b-unbounded box growth r1=2.6").unwrap().measured;
    let bad = failed(&rep);
    report(
        5,
        "operator boundedness",
        bad.is_empty(),
        format!(
            "r1=2.4 max drift {inside:.3} (need <= 0.25), r1=2.6 growth {outside:.3} (need > 1.25)"
        ),
        start,
    );
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn criterion_06_stein_scaling() {
    let start = Instant::now();
    let mut pass = true;
    let mut detail = Vec::new();
    for b in [0.25, 0.5] {
        let sc = stein_scaling(b, &STEIN_TS, &STEIN_ETAS).unwrap();
        let c = sc.implied.iter().cloned().fold(0.0, f64::max);
        let bounded = sc.values.iter().zip(&sc.ts).all(|(row, &t)| {
            row.iter()
                .zip(&sc.etas)
                .all(|(&v, &e)| v <= c * t.powf(b) * e.powf(2.0 * b) * (1.0 + 1e-12))
        });
        let ok =
            bounded && (sc.exponent_t - b).abs() <= 0.1 && (sc.exponent_eta - 2.0 * b).abs() <= 0.2;
        pass &= ok;
        detail.push(format!(
            "b={b}: exp_t {:.3}, exp_eta {:.3}, C {c:.3}",
            sc.exponent_t, sc.exponent_eta
        ));
    }
    report(6, "stein-bound scaling", pass, detail.join("; "), start);
    assert!(pass);
}

#[test]
fn criterion_07_solver_order_and_contraction() {
    let start = Instant::now();
    let p = SolverParams {
        dt: 0.05,
        t_end: 0.5,
        record_every: 1,
        ..SolverParams::default()
    };
    let mut bad = Vec::new();
    let mut orders = Vec::new();
    let mut ratios = Vec::new();
    for phi in solver_suite_data(GridSpec::default()).unwrap() {
        let rep = run_solver_checks(&phi, &p, NormIndices::default()).unwrap();
        orders.push(format!(
            "{:.3}",
            rep.find("solver self-convergence order").unwrap().measured
        ));
        ratios.push(format!(
            "{:.3}",
            rep.find("picard contraction").unwrap().measured
        ));
        bad.extend(failed(&rep));
    }
    report(
        7,
        "solver order and contraction",
        bad.is_empty(),
        format!(
            "orders [{}], picard ratios [{}]",
            orders.join(" "),
            ratios.join(" ")
        ),
        start,
    );
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn criterion_08_unique_continuation_jump() {
    let start = Instant::now();
    let g = GridSpec::default();
    let cfg = JumpConfig::default();
    let base = SolverParams::default();
    let lin = run_uc_jump(
        &uc_initial_data(g, 1.0).unwrap(),
        &SolverParams {
            a_coef: 0.0,
            ..base
        },
        0.5,
        &cfg,
        2.5,
    )
    .unwrap();
    let non = run_uc_jump(&uc_initial_data(g, 0.1).unwrap(), &base, 0.5, &cfg, 2.5).unwrap();
    let m = |r: &ExperimentReport, key: &str| {
        r.verdicts
            .iter()
            .find(|v| v.criterion.ends_with(key))
            .unwrap()
            .clone()
    };
    let checks = [
        m(&lin, "literal prediction"),
        m(&non, "literal prediction"),
        m(&non, "zero-mode integral nonnegative"),
    ];
    let pass = checks.iter().all(|v| v.pass);
    report(
        8,
        "unique-continuation jump",
        pass,
        format!(
            "linear err {:.4}, nonlinear err {:.4} (need < 0.05), eta=0 integral {:.3e}; derived-sign prediction errs {:.4}/{:.4}",
            checks[0].measured,
            checks[1].measured,
            checks[2].measured,
            m(&lin, "derived prediction").measured,
            m(&non, "derived prediction").measured,
        ),
        start,
    );
    assert!(pass, "{checks:?}");
}

#[test]
fn criterion_09_jump_non_membership() {
    let start = Instant::now();
    let base = LineSpec::new(256, 8.0).unwrap();
    let jump = |x: f64| sign(x) * (-x * x).exp();
    let smooth = |x: f64| (-x * x).exp();
    let r = jump_blowup_demo(&jump, 0.0, 0.5, 0.5, base, 4).unwrap();
    let s = jump_blowup_demo(&smooth, 0.0, 0.5, 0.5, base, 4).unwrap();
    let steps: Vec<f64> = s.masses.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let converges = steps.windows(2).all(|w| w[1] < w[0]) && s.last_change() < 1e-4;
    let pass = r.strictly_increasing() && converges;
    report(
        9,
        "jump non-membership",
        pass,
        format!(
            "jump masses {:?}, smooth last change {:.1e}",
            r.masses
                .iter()
                .map(|m| format!("{m:.4}"))
                .collect::<Vec<_>>(),
            s.last_change()
        ),
        start,
    );
    assert!(pass);
}

#[test]
fn criterion_10_inequality_suite() {
    let start = Instant::now();
    let rep = run_inequality_suite(25, 0).unwrap();
    let edge = rep.find("A_p boundary").unwrap().measured;
    let worst = rep
        .verdicts
        .iter()
        .filter(|v| v.criterion.ends_with("stable"))
        .map(|v| v.measured)
        .fold(0.0, f64::max);
    let bad = failed(&rep);
    report(
        10,
        "inequality suite",
        bad.is_empty(),
        format!("max family-doubling drift {worst:.3}, A_p boundary at r*alpha = {edge:.3}"),
        start,
    );
    assert!(bad.is_empty(), "{bad:?}");
}
