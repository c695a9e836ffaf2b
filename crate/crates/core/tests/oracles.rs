//! End-to-end checks against oracles derived independently of the library code.


use mflat::assoc_fn::{m_of_t_bruteforce, AssociatedFunction};
use mflat::gevrey_type::SectorSpec;
use mflat::indices::{b_limit, default_regvar_grid, omega, regvar_test};
use mflat::maergoiz::{mv_bounds, rho_v};
use mflat::propagation::{pl_numeric_check, TestFunction};
use mflat::quasi::{classify, classify_salinas, series_classify_log, ClassKind, QuasiOptions, SeriesOutcome, Verdict};
use mflat::scalar::geomspace;
use mflat::{condition_report, Error, MaergoizFunctionF64, WeightSequence, WeightSequenceF32, WeightSequenceF64};

/// Integral test: `Σ 1/(n^s log^c n)` converges iff `s > 1`, or `s = 1` and `c > 1`.
fn integral_oracle(s: f64, c: f64) -> SeriesOutcome {
    if s > 1.0 || (s == 1.0 && c > 1.0) {
        SeriesOutcome::Converges
    } else {
        SeriesOutcome::Diverges
    }
}

#[test]
fn series_classifier_matches_integral_test() {
    for s in [0.5, 1.0, 1.5] {
        for c in [0.0, 1.0, 2.0] {
            let term = |p: usize| {
                let n = (p + 2) as f64;
                -s * n.ln() - c * n.ln().ln()
            };
            let v = series_classify_log(term, 1_000_000).unwrap();
            assert_eq!(v.verdict, integral_oracle(s, c), "s = {s}, c = {c}: {v:?}");
        }
    }
}

#[test]
fn regular_variation_separates_gevrey_from_q_square() {
    let p = 100_000;
    let (ells, probes) = default_regvar_grid(p);
    for alpha in [0.5, 1.0, 2.0] {
        let w = WeightSequenceF64::gevrey(alpha, p).unwrap();
        let om = omega(&w, p / 10).unwrap().estimate;
        let table = regvar_test(&w, om, &ells, &probes, 1e-3).unwrap();
        assert!(table.all_pass(), "gevrey({alpha})");
        let b = b_limit(&w, p / 10).unwrap();
        assert!((b.estimate - om).abs() <= 2e-2, "b = {} vs omega = {om}", b.estimate);
    }
    let q = WeightSequenceF64::q_square(2.0, 4000).unwrap();
    let (ells, probes) = default_regvar_grid(4000);
    let om = omega(&q, 400).unwrap().estimate;
    assert!(!regvar_test(&q, om, &ells, &probes, 1e-3).unwrap().all_pass());
}

#[test]
fn order_of_associated_function_tends_to_reciprocal_index() {
    // M(t) ~ α t^{1/α}, so d_M(t) − 1/α ~ log α / log t
    for alpha in [1.0, 2.0, 3.0] {
        let w = WeightSequenceF64::gevrey(alpha, 2_000_000).unwrap();
        let a = AssociatedFunction::new(&w).unwrap();
        let ts = geomspace(1e3, 1e6, 16);
        let errs: Vec<f64> = ts.iter().map(|&t| (a.d_m(t).unwrap() - 1.0 / alpha).abs()).collect();
        assert!(errs.windows(2).all(|e| e[1] <= e[0] + 5e-2), "alpha = {alpha}: {errs:?}");
        assert!(errs.last().unwrap() <= errs.first().unwrap());
        let t_max = *ts.last().unwrap();
        assert!(*errs.last().unwrap() <= alpha.ln() / t_max.ln() + 5e-2, "alpha = {alpha}: {errs:?}");
    }
}

#[test]
fn associated_function_range_is_enforced() {
    let w = WeightSequenceF64::gevrey(1.0, 100).unwrap();
    let a = AssociatedFunction::new(&w).unwrap();
    assert!(matches!(a.m_of_t(1e6), Err(Error::Range(_))));
    let custom = WeightSequenceF64::from_log_terms(vec![0.0, 1.0, 1.5, 3.0]).unwrap();
    assert!(matches!(AssociatedFunction::new(&custom), Err(Error::Domain(_))));
}

#[test]
fn single_precision_agrees_with_scan() {
    let w = WeightSequenceF32::gevrey(1.0, 500).unwrap();
    let a = AssociatedFunction::new(&w).unwrap();
    for t in geomspace(0.5f32, 400.0, 50) {
        let d = (a.m_of_t(t).unwrap() - m_of_t_bruteforce(&w, t, 500).unwrap()).abs();
        assert!(d <= 1e-3 * a.m_of_t(t).unwrap().max(1.0));
    }
}

#[test]
fn proximate_order_of_power_log_converges() {
    let (rho, b) = (0.5f64, 1.0f64);
    let v = MaergoizFunctionF64::power_log(rho, b, 1.0).unwrap();
    for r in geomspace(1e3f64, 1e12, 20) {
        let bound = 2.0 * b.abs() * r.ln().ln() / r.ln();
        assert!((rho_v(&v, r).unwrap() - rho).abs() <= bound, "r = {r}");
    }
}

#[test]
fn mv_band_is_stable_under_doubling_t0() {
    let w = WeightSequenceF64::gevrey(1.0, 200_000).unwrap();
    let a = AssociatedFunction::new(&w).unwrap();
    let v = MaergoizFunctionF64::power(1.0, 1.0).unwrap();
    let grid = geomspace(1e2, 1e5, 200);
    let b1 = mv_bounds(&a, &v, &grid, 1e3).unwrap();
    let b2 = mv_bounds(&a, &v, &grid, 2e3).unwrap();
    assert!((b2.a_est / b1.a_est - 1.0).abs() < 0.05);
    assert!((b2.b_est / b1.b_est - 1.0).abs() < 0.05);
}

#[test]
fn classifiers_agree_away_from_the_index() {
    // the log factor of alpha_beta misses the regular-variation tolerance at this horizon
    let o = QuasiOptions { assume_admissible: true, ..QuasiOptions::default() };
    let seqs = [
        WeightSequenceF64::gevrey(0.5, 100_000).unwrap(),
        WeightSequenceF64::gevrey(2.0, 100_000).unwrap(),
        WeightSequenceF64::alpha_beta(1.0, 2.0, 100_000).unwrap(),
    ];
    for w in &seqs {
        let om = w.family().closed_form_omega().unwrap();
        for (gamma, want) in [(om * 1.3, Verdict::Quasianalytic), (om * 0.7, Verdict::NotQuasianalytic)] {
            for class in [ClassKind::Salinas, ClassKind::Uniform, ClassKind::Regions] {
                let r = classify(w, class, gamma, &o).unwrap();
                assert_eq!(r.verdict, want, "{} {class:?} gamma = {gamma}: {}", w.family().name(), r.reason);
            }
        }
    }
}

#[test]
fn salinas_at_the_index_follows_convergence_exponent() {
    // Σ ((p+1) m_p)^{-1/(ω+1)} with (p+1) m_p = (p+1)^{α+1}: terms 1/(p+1), divergent.
    for alpha in [0.5, 1.0, 3.0] {
        let w = WeightSequenceF64::gevrey(alpha, 100_000).unwrap();
        let r = classify_salinas(&w, alpha, &QuasiOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Quasianalytic, "{}", r.reason);
    }
}

#[test]
fn maximum_modulus_holds_for_bounded_functions() {
    let sector = SectorSpec::new(0.0, 0.9, Some(0.5)).unwrap();
    let zoo = [
        TestFunction::Constant(2.0),
        TestFunction::Identity,
        TestFunction::Geometric,
        TestFunction::ExpFlat(MaergoizFunctionF64::power(1.0, 1.0).unwrap()),
        TestFunction::ExpFlat(MaergoizFunctionF64::power(0.5, 1.0).unwrap()),
    ];
    for f in &zoo {
        let c = pl_numeric_check(f, &sector, 300, 2000).unwrap();
        assert!(c.satisfied, "{}: {c:?}", f.name());
    }
    let c = pl_numeric_check(&TestFunction::ExpInverse, &sector, 300, 2000).unwrap();
    assert!(!c.satisfied);
}

#[test]
fn custom_sequence_files() {
    let path = std::env::temp_dir().join(format!("mflat-custom-{}.txt", std::process::id()));
    let w = WeightSequenceF64::gevrey(1.5, 50).unwrap();
    let text: String = w.log_terms().iter().map(|v| format!("{v:.17e}\n")).collect();
    std::fs::write(&path, text).unwrap();
    let back = WeightSequence::<f64>::read_custom(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(back.horizon(), w.horizon());
    assert!(back.log_terms().iter().zip(w.log_terms()).all(|(a, b)| (a - b).abs() <= 1e-12 * b.abs().max(1.0)));
    let r = condition_report(&back).unwrap();
    assert!(r.lc.holds_up_to_horizon);

    match WeightSequence::<f64>::parse_custom("0\n1.0\nabc\n") {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected parse error, got {other:?}"),
    }
    assert!(matches!(WeightSequence::<f64>::parse_custom("0.5\n1\n"), Err(Error::Parse { line: 1, .. })));
}

#[test]
fn condition_report_serializes_named_fields() {
    let r = condition_report(&WeightSequenceF64::gevrey(1.0, 100).unwrap()).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    for key in ["family", "horizon", "lc", "dc", "mg", "snq", "quotients_to_infinity"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}
