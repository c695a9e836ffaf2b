//! Acceptance suite: ten end-to-end criteria, each with a fixed tolerance and
//! a runtime budget. Run sequentially so timings are not distorted.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::time::{Duration, Instant};

use num_complex::Complex;

use mflat::assoc_fn::{m_of_t_bruteforce, AssociatedFunction};
use mflat::gevrey_type::{interior_grid, SectorSpec, TypeProfile};
use mflat::indices::{exponent_of_convergence, omega};
use mflat::maergoiz::{
    default_z_grid, mv_bounds, property_i_check, property_ii_check, property_iii_to_v_check, Curvature,
    MaergoizFunction,
};
use mflat::propagation::{
    default_radii, expansion_fit, fit_flat_type, pl_numeric_check, proof_recipe, propagation_experiment, trace_ray,
    wasow_demo, FlatVerdict, MvInput, TestFunction,
};
use mflat::quasi::{classify, ClassKind, QuasiOptions, Verdict};
use mflat::scalar::{geomspace, linspace};
use mflat::sequences::{condition_report, WeightSequence};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn run(n: usize, budget: Duration, f: fn() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    let elapsed = start.elapsed();
    let pass = o.pass && elapsed < budget;
    println!(
        "criterion {n:>2}: {} [{:.2}s of {:.0}s] {}",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs_f64(),
        o.detail
    );
    pass
}

fn c1_assoc_oracle() -> Outcome {
    let families: [WeightSequence<f64>; 4] = [
        WeightSequence::gevrey(1.0, 2000).unwrap(),
        WeightSequence::gevrey(2.0, 2000).unwrap(),
        WeightSequence::alpha_beta(1.0, 1.0, 2000).unwrap(),
        WeightSequence::q_square(2.0, 400).unwrap(),
    ];
    let mut worst = 0.0f64;
    for w in &families {
        let a = AssociatedFunction::new(w).unwrap();
        let hi = a.max_log_t().exp();
        for t in geomspace(1e-2, hi, 1000) {
            let t = t.min(hi);
            let fast = a.m_of_t(t).unwrap();
            let brute = m_of_t_bruteforce(w, t, w.horizon()).unwrap();
            worst = worst.max((fast - brute).abs());
        }
    }
    outcome(worst <= 1e-10, format!("max |M - M_brute| = {worst:.3e} (tol 1e-10)"))
}

fn c2_index_identities() -> Outcome {
    let p = 1_000_000;
    let window = p / 10;
    let mut ok = true;
    let mut parts = Vec::new();
    for alpha in [0.5, 1.0, 2.0, 3.0] {
        let w = WeightSequence::gevrey(alpha, p).unwrap();
        let om = omega(&w, window).unwrap().estimate;
        let lq = w.log_quots();
        let lam_m = exponent_of_convergence(lq, window).unwrap();
        let log_pm: Vec<f64> = lq.iter().enumerate().map(|(i, q)| q + ((i + 1) as f64).ln()).collect();
        let lam_pm = exponent_of_convergence(&log_pm, window).unwrap();
        let (e1, e2, e3) = ((om - alpha).abs(), (lam_m * om - 1.0).abs(), (lam_pm * (om + 1.0) - 1.0).abs());
        ok &= e1 <= 1e-3 && e2 <= 2e-2 && e3 <= 2e-2;
        parts.push(format!("a={alpha}: {e1:.1e}/{e2:.1e}/{e3:.1e}"));
    }
    outcome(ok, format!("|w-a|, |lm*w-1|, |lpm*(w+1)-1|: {}", parts.join("; ")))
}

fn c3_conditions() -> Outcome {
    let p = 1_000_000;
    let mut ok = true;
    let mut parts = Vec::new();
    for alpha in [0.5, 1.0, 2.0, 3.0] {
        let r = condition_report(&WeightSequence::gevrey(alpha, p).unwrap()).unwrap();
        ok &= r.strongly_regular_trend();
        parts.push(format!("gevrey({alpha}) sr={}", r.strongly_regular_trend()));
    }
    let zb = condition_report(&WeightSequence::zero_beta(2.0, p).unwrap()).unwrap();
    ok &= zb.lc.holds_up_to_horizon && !zb.snq.bounded_trend && zb.mg.bounded_trend;
    parts.push(format!("zero_beta(2) snq bounded={}", zb.snq.bounded_trend));
    let q = condition_report(&WeightSequence::q_square(2.0, p).unwrap()).unwrap();
    ok &= q.lc.holds_up_to_horizon && !q.mg.bounded_trend && q.snq.bounded_trend;
    parts.push(format!("q_square(2) mg bounded={}", q.mg.bounded_trend));
    outcome(ok, parts.join(", "))
}

fn c4_quasianalyticity() -> Outcome {
    let p = 1_000_000;
    let g = WeightSequence::gevrey(1.0, p).unwrap();
    let o = QuasiOptions::default();
    let v = |w: &WeightSequence<f64>, c, gamma| classify(w, c, gamma, &o).unwrap().verdict;
    let classes = [ClassKind::Salinas, ClassKind::Uniform, ClassKind::Regions];
    let mut ok = v(&g, ClassKind::Uniform, 1.0) == Verdict::Quasianalytic;
    ok &= v(&g, ClassKind::Regions, 1.0) == Verdict::NotQuasianalytic;
    ok &= classes.iter().all(|&c| v(&g, c, 1.5) == Verdict::Quasianalytic);
    ok &= classes.iter().all(|&c| v(&g, c, 0.5) == Verdict::NotQuasianalytic);
    let ab = WeightSequence::alpha_beta(1.0, 1.5, p).unwrap();
    let borderline = classify(&ab, ClassKind::Uniform, 1.0, &o).unwrap();
    ok &= borderline.verdict == Verdict::NotQuasianalytic;
    outcome(ok, format!("alpha_beta(1,3/2) uniform: {:?} ({})", borderline.verdict, borderline.reason))
}

/// Nearest double to `from + d` (toward `from`) whose distance from `from` does not exceed `d`.
fn at_distance(from: f64, d: f64) -> f64 {
    let mut x = from + d;
    while (x - from).abs() > d.abs() {
        x = if x > from { x.next_down() } else { x.next_up() };
    }
    x
}

fn c5_type_profile() -> Outcome {
    let sector = SectorSpec::new(0.0, 2.0, None).unwrap();
    let p = TypeProfile::new(1.0, sector, 0.0, 1.0).unwrap();
    let plateau_ok = linspace(-FRAC_PI_2, FRAC_PI_2, 1001).iter().all(|&t| p.eval(t).unwrap().r == 1.0)
        && interior_grid(&sector, 361)
            .iter()
            .filter(|&&t| t >= p.alpha_p && t <= p.beta_p)
            .all(|&t| p.eval(t).unwrap().r == 1.0);
    let e34 = (p.eval(-3.0 * PI / 4.0).unwrap().r - FRAC_1_SQRT_2)
        .abs()
        .max((p.eval(3.0 * PI / 4.0).unwrap().r - FRAC_1_SQRT_2).abs());
    let junction = (p.left_branch(p.alpha_p) - 1.0).abs().max((p.right_branch(p.beta_p) - 1.0).abs());
    let edge = p
        .eval(at_distance(p.alpha, 1e-6))
        .unwrap()
        .r
        .max(p.eval(at_distance(p.beta, -1e-6)).unwrap().r);
    let ok = plateau_ok && e34 <= 1e-12 && junction <= 1e-12 && edge <= 1e-6;
    outcome(ok, format!("plateau exact={plateau_ok}, |R(3pi/4)-sqrt2/2|={e34:.1e}, junction={junction:.1e}, edge={edge:.3e}"))
}

fn c6_maergoiz() -> Outcome {
    let z_grid = default_z_grid(9, 9);
    let r_seq = geomspace(1e2, 1e8, 7);
    let shape_grid = geomspace(1e-3, 1e6, 64);
    let mut ok = true;
    let mut parts = Vec::new();
    for rho in [0.5, 1.0, 2.0] {
        let v = MaergoizFunction::power(rho, 1.0).unwrap();
        let i = property_i_check(&v, &z_grid, &r_seq).unwrap();
        let ii = property_ii_check(&v, &z_grid).unwrap();
        let s = property_iii_to_v_check(&v, &shape_grid).unwrap();
        let pass = i.deviation == 0.0
            && ii == 0.0
            && s.positive_increasing
            && s.vanishes_at_zero
            && s.convex
            && s.log_r_curvature == Curvature::Boundary;
        ok &= pass;
        parts.push(format!("power({rho}) {}", if pass { "ok" } else { "fail" }));
    }
    let v = MaergoizFunction::power_log(0.5, 1.0, 1.0).unwrap();
    let i = property_i_check(&v, &z_grid, &r_seq).unwrap();
    let ii = property_ii_check(&v, &z_grid).unwrap();
    let s = property_iii_to_v_check(&v, &shape_grid).unwrap();
    ok &= i.deviation <= 0.05 && i.decreasing && ii == 0.0;
    ok &= s.positive_increasing && s.vanishes_at_zero && s.convex && s.concave_in_r;
    parts.push(format!(
        "power_log(1/2,1): (I) deviation at 1e8 = {:.4} (tol 0.05), decreasing={}, (III)={} (IV)={} (V)={}",
        i.deviation,
        i.decreasing,
        s.positive_increasing && s.vanishes_at_zero,
        s.convex,
        s.concave_in_r
    ));
    outcome(ok, parts.join("; "))
}

fn c7_flatness_law() -> Outcome {
    let w = WeightSequence::gevrey(1.0, 2000).unwrap();
    let a = AssociatedFunction::new(&w).unwrap();
    let v = MaergoizFunction::power(1.0, 1.0).unwrap();
    let f = TestFunction::ExpFlat(v);
    let radii = default_radii(1.0);
    let mut worst = 0.0f64;
    let mut law_ok = true;
    for theta in linspace(-0.4 * PI, 0.4 * PI, 9) {
        let fit = fit_flat_type(&trace_ray(&f, theta, &radii).unwrap(), &a).unwrap();
        match fit.fit() {
            Some(fit) => {
                let x = fit.c2 * theta.cos();
                law_ok &= (0.9..=1.1).contains(&x);
                worst = worst.max((x - 1.0).abs());
            }
            None => law_ok = false,
        }
    }
    let mv = mv_bounds(&a, &v, &geomspace(1e2, 2e3, 40), 1e2).unwrap();
    let input = MvInput { a_est: mv.a_est, b_est: mv.b_est, omega: 1.0 };
    let gamma = 0.9;
    let deltas = geomspace(1e-2, PI * gamma, 12);
    let table = propagation_experiment(&f, &a, gamma, PI * gamma / 2.0, &deltas, &input, &radii).unwrap();
    let ok = law_ok && table.all_satisfied();
    outcome(
        ok,
        format!(
            "max |c2 cos - 1| = {worst:.4}; band [{:.4}, {:.4}]; {}/{} rows satisfied",
            mv.a_est,
            mv.b_est,
            table.rows.iter().filter(|r| r.satisfied).count(),
            table.rows.len()
        ),
    )
}

fn c8_proof_construction() -> Outcome {
    let w = WeightSequence::gevrey(1.0, 2000).unwrap();
    let a = AssociatedFunction::new(&w).unwrap();
    let v = MaergoizFunction::power(1.0, 1.0).unwrap();
    let f = TestFunction::ExpFlat(v);
    let gamma = 0.9;
    let flat_dir = PI * gamma / 2.0;
    let c2 = match fit_flat_type(&trace_ray(&f, flat_dir, &default_radii(1.0)).unwrap(), &a).unwrap() {
        FlatVerdict::Flat(fit) => fit.c2,
        FlatVerdict::NotFlat { reason, .. } => return outcome(false, reason),
    };
    let mv = mv_bounds(&a, &v, &geomspace(1e2, 2e3, 40), 1e2).unwrap();
    let recipe = proof_recipe(1.0, gamma, PI * gamma / 2.0, c2, mv.a_est).unwrap();
    let kernel = MaergoizFunction::power(1.0, 2.0).unwrap();
    let big_f = recipe.corrected(f, kernel);
    let sector = SectorSpec::new(0.0, gamma, Some(0.5)).unwrap();
    let check = pl_numeric_check(&big_f, &sector, 1000, 10_000).unwrap();
    let control = pl_numeric_check(&TestFunction::ExpInverse, &sector, 1000, 10_000).unwrap();
    outcome(
        check.satisfied && !control.satisfied,
        format!(
            "F: log max boundary {:.4}, interior {:.4}; e^(1/z): boundary {:.1}, interior {:.1}; |a| = {:.4}, arg a = {:.4}",
            check.log_max_boundary,
            check.log_max_interior,
            control.log_max_boundary,
            control.log_max_interior,
            recipe.modulus_a,
            recipe.arg_a
        ),
    )
}

fn c9_wasow() -> Outcome {
    let w = WeightSequence::gevrey(1.0, 2000).unwrap();
    let a = AssociatedFunction::new(&w).unwrap();
    let v = MaergoizFunction::power(1.0, 1.0).unwrap();
    let demo = wasow_demo(&v, &geomspace(0.5, 0.05, 256), &default_radii(1.0), &a).unwrap();
    let c2 = demo.flat_fit_on_axis.fit().map(|f| f.c2).unwrap_or(f64::INFINITY);
    let ok = c2 <= 1.05 && demo.oscillation_detected && demo.cos_zero_to_zero && demo.sin_zero_unbounded;
    let last_cos = demo.cos_zero.last().unwrap();
    let last_sin = demo.sin_zero.last().unwrap();
    outcome(
        ok,
        format!(
            "c2 = {c2:.4}, oscillation={}, |f'| on cos zeros -> {:.3e}, on sin zeros -> {:.3e} (envelope {:.3e})",
            demo.oscillation_detected, last_cos.derivative_abs, last_sin.derivative_abs, last_sin.envelope
        ),
    )
}

fn c10_expansion_equivalence() -> Outcome {
    let p = 4000;
    let w = WeightSequence::gevrey(1.0, p).unwrap();
    let a = AssociatedFunction::new(&w).unwrap();
    let f = TestFunction::ExpFlat(MaergoizFunction::power(1.0, 1.0).unwrap());
    let radii = default_radii(1.0);
    let zeros = vec![Complex::new(0.0, 0.0); p];
    let mut worst = 0.0f64;
    let mut ok = true;
    for theta in linspace(-0.4 * PI, 0.4 * PI, 5) {
        let flat = fit_flat_type(&trace_ray(&f, theta, &radii).unwrap(), &a).unwrap();
        let exp = expansion_fit(&f, &zeros, &w, theta, &radii, p).unwrap();
        match (flat.fit(), exp.fit()) {
            (Some(fl), Some(ex)) => {
                let rel = (ex.a / fl.c2 - 1.0).abs();
                worst = worst.max(rel);
                ok &= rel <= 1e-3;
            }
            _ => ok = false,
        }
    }
    outcome(ok, format!("max |A/c2 - 1| = {worst:.2e} (tol 1e-3)"))
}

#[test]
fn acceptance() {
    let s = Duration::from_secs;
    let results = [
        run(1, s(5), c1_assoc_oracle),
        run(2, s(30), c2_index_identities),
        run(3, s(10), c3_conditions),
        run(4, s(10), c4_quasianalyticity),
        run(5, s(1), c5_type_profile),
        run(6, s(10), c6_maergoiz),
        run(7, s(30), c7_flatness_law),
        run(8, s(20), c8_proof_construction),
        run(9, s(5), c9_wasow),
        run(10, s(10), c10_expansion_equivalence),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, p)| !**p).map(|(i, _)| i + 1).collect();
    println!("acceptance: {}/{} criteria passed", results.len() - failed.len(), results.len());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
