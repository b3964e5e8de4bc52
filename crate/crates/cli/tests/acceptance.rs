//! Acceptance suite: one test per criterion, each pinned to its stated
//! tolerance and printing a single pass/fail line (visible with
//! `cargo test -- --nocapture`).

use std::process::Command;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fixlab_core::contraction::{
    certify, kadelburg_comparison, ConditionSpec, FFunction, GridSpec, PhiFunction, Verdict,
};
use fixlab_core::dp::{solve_successive, DpInstance, GridFunction, OperatorIndex};
use fixlab_core::expr::{parse_expr1, parse_expr2, parse_expr3, parse_set_expr};
use fixlab_core::pairs::{
    check_commuting, check_idempotency, coincidence_points, common_fixed_points, detect_ea_clr,
    HybridPair,
};
use fixlab_core::piecewise::{PiecewiseMap, PiecewiseSetMap};
use fixlab_core::solver::picard_multivalued;
use fixlab_core::volterra::{solve_inclusion, InclusionInstance, SelectionRule};
use fixlab_core::{hausdorff, point_set_distance, ClosedSet};

const SECTION3_F: &str = "piecewise{ [0,2]: 3-x ; (2,3]: 3 }";
const SECTION3_T: &str = "piecewise{ [0,2]: [1,2] ; (2,3]: [0,1/2] }";
const EX13_F: &str = "piecewise{ [1,1]: 1 ; [2,2]: 3 ; [3,3]: 2 }";
const EX13_T: &str = "piecewise{ [1,1]: {1} ; [2,2]: {1,3} ; [3,3]: {1,3} }";
const EX14_F: &str = "piecewise{ [0,1): 2-x ; [1,2]: 9/5 }";
const EX14_G: &str = "piecewise{ [0,1]: 2-x ; (1,2]: 9/5 }";
const EX14_T: &str = "piecewise{ [0,1]: [1/2,3/2] ; (1,2]: [1/4,1/2] }";

fn section3_pair() -> HybridPair {
    HybridPair::new(
        PiecewiseMap::parse(SECTION3_F).unwrap(),
        PiecewiseSetMap::parse(SECTION3_T).unwrap(),
    )
    .unwrap()
}

fn pass(line: &str) {
    println!("{line}: PASS");
}

#[test]
fn criterion_1_worked_example_reproduction() {
    let started = Instant::now();

    // exact metric values
    let a = ClosedSet::interval(1.0, 2.0).unwrap();
    let b = ClosedSet::interval(0.0, 0.5).unwrap();
    assert_eq!(hausdorff(&a, &b), 1.5);
    assert_eq!(point_set_distance(3.0, &b), 2.5);

    // finite-pair flags
    let ex13 = HybridPair::new(
        PiecewiseMap::parse(EX13_F).unwrap(),
        PiecewiseSetMap::parse(EX13_T).unwrap(),
    )
    .unwrap();
    assert_eq!(
        coincidence_points(&ex13, 0.0).unwrap().unwrap().to_string(),
        "{1,2}"
    );
    assert_eq!(
        common_fixed_points(&ex13, 0.0)
            .unwrap()
            .unwrap()
            .to_string(),
        "{1}"
    );
    let comm = check_commuting(&ex13).unwrap();
    assert!(!comm.weakly_compatible);
    let idem = check_idempotency(&ex13, 0.0).unwrap();
    assert!(!idem.coincidentally);
    assert!(idem.occasionally);
    assert_eq!(idem.occasionally_witness, Some(1.0));

    // common fixed point of the interval pair
    let s3 = section3_pair();
    let fixed = common_fixed_points(&s3, 1e-3).unwrap().unwrap();
    assert!((fixed.min() - 1.5).abs() <= 1e-6);
    assert!((fixed.max() - 1.5).abs() <= 1e-6);

    // comparison quantities at (1,3), exact
    let kad = kadelburg_comparison(&s3.f, &s3.t, 1.0, 3.0).unwrap();
    assert_eq!(kad.hausdorff, 1.5);
    assert_eq!(kad.d_fx_fy, 1.0);
    assert_eq!(kad.half_own, 1.25);
    assert_eq!(kad.half_cross, 1.25);

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    pass("criterion 1 (worked-example reproduction, < 1 s)");
}

#[test]
fn criterion_2_section3_certification() {
    let f = PiecewiseMap::parse(SECTION3_F).unwrap();
    let t = PiecewiseSetMap::parse(SECTION3_T).unwrap();
    let grid = GridSpec { points: 201 };
    for p in [1.0, 2.0, 3.0] {
        let started = Instant::now();
        let cond = ConditionSpec::Generalized {
            f: FFunction::log(),
            phi: PhiFunction::parse("9/10*t").unwrap(),
            tau: 0.2,
            p,
        };
        let report = certify(&cond, &f, &t, &grid).unwrap();
        assert_eq!(report.verdict, Verdict::HoldsOnSamples, "p = {p}");
        assert_eq!(report.violations.len(), 0, "p = {p}");
        let elapsed = started.elapsed();
        assert!(elapsed.as_secs_f64() < 5.0, "p = {p} took {elapsed:?}");
    }
    let cond = ConditionSpec::Generalized {
        f: FFunction::log(),
        phi: PhiFunction::parse("9/10*t").unwrap(),
        tau: 2.0,
        p: 1.0,
    };
    let report = certify(&cond, &f, &t, &grid).unwrap();
    assert_eq!(report.verdict, Verdict::Violated);
    assert!(report
        .violations
        .iter()
        .any(|v| (v.x <= 2.0) != (v.y <= 2.0)));
    pass("criterion 2 (certification holds at tau=0.2 for p in {1,2,3}, fails at tau=2, < 5 s per p)");
}

#[test]
fn criterion_3_limit_range_verdicts() {
    let t = PiecewiseSetMap::parse(EX14_T).unwrap();
    let pair_f = HybridPair::new(PiecewiseMap::parse(EX14_F).unwrap(), t.clone()).unwrap();
    let r = detect_ea_clr(&pair_f).unwrap();
    assert!(r.ea, "(f,T) must satisfy (E.A)");
    assert!(!r.clr, "(f,T) must not satisfy CLR_f");

    let pair_g = HybridPair::new(PiecewiseMap::parse(EX14_G).unwrap(), t).unwrap();
    let r = detect_ea_clr(&pair_g).unwrap();
    assert!(r.clr, "(g,T) must satisfy CLR_g");

    // the closed-range implication on every bundled pair
    let identity = {
        let t = PiecewiseSetMap::parse("piecewise{ [0,1]: {x} }").unwrap();
        HybridPair::new(PiecewiseMap::identity(t.domain()), t).unwrap()
    };
    let ex13 = HybridPair::new(
        PiecewiseMap::parse(EX13_F).unwrap(),
        PiecewiseSetMap::parse(EX13_T).unwrap(),
    )
    .unwrap();
    let t14 = PiecewiseSetMap::parse(EX14_T).unwrap();
    let bundled = [
        ex13,
        HybridPair::new(PiecewiseMap::parse(EX14_F).unwrap(), t14.clone()).unwrap(),
        HybridPair::new(PiecewiseMap::parse(EX14_G).unwrap(), t14).unwrap(),
        section3_pair(),
        identity,
    ];
    for pair in &bundled {
        let r = detect_ea_clr(pair).unwrap();
        if r.ea && r.f_range_closed {
            assert!(r.clr, "EA with closed range must imply CLR");
        }
        if r.clr {
            assert!(r.ea, "CLR must imply EA");
        }
    }
    pass("criterion 3 (limit-range verdicts and the closed-range implication)");
}

#[test]
fn criterion_4_metric_property_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let random_set = |rng: &mut ChaCha8Rng| -> ClosedSet {
        let pieces = rng.gen_range(1..=4);
        let raw: Vec<(f64, f64)> = (0..pieces)
            .map(|_| {
                let lo = rng.gen_range(-100.0..100.0);
                let len = rng.gen_range(0.0..10.0);
                (lo, lo + len)
            })
            .collect();
        ClosedSet::from_intervals(raw).unwrap()
    };
    for _ in 0..1000 {
        let a = random_set(&mut rng);
        let b = random_set(&mut rng);
        let c = random_set(&mut rng);
        // symmetry, exact
        assert_eq!(hausdorff(&a, &b), hausdorff(&b, &a));
        // identity of indiscernibles
        assert_eq!(hausdorff(&a, &a), 0.0);
        if hausdorff(&a, &b) == 0.0 {
            assert_eq!(a, b);
        }
        // triangle inequality within 1e-12
        assert!(hausdorff(&a, &c) <= hausdorff(&a, &b) + hausdorff(&b, &c) + 1e-12);
    }
    // finite sets against the exhaustive pairwise oracle, exact
    let brute = |a: &ClosedSet, b: &ClosedSet| -> f64 {
        let pa = a.finite_points().unwrap();
        let pb = b.finite_points().unwrap();
        let dir = |xs: &[f64], ys: &[f64]| {
            xs.iter()
                .map(|&x| {
                    ys.iter()
                        .map(|&y| (x - y).abs())
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max)
        };
        dir(&pa, &pb).max(dir(&pb, &pa))
    };
    for _ in 0..500 {
        let na = rng.gen_range(1..=8);
        let nb = rng.gen_range(1..=8);
        let pa: Vec<f64> = (0..na).map(|_| rng.gen_range(-100.0..100.0)).collect();
        let pb: Vec<f64> = (0..nb).map(|_| rng.gen_range(-100.0..100.0)).collect();
        let a = ClosedSet::points(&pa).unwrap();
        let b = ClosedSet::points(&pb).unwrap();
        assert_eq!(hausdorff(&a, &b), brute(&a, &b));
    }
    pass("criterion 4 (metric axioms on 1000 random triples, 500 finite-set oracle checks)");
}

#[test]
fn criterion_5_f_phi_axiom_suite() {
    let beta = 2f64.powi(-40);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for f in [
        FFunction::log(),
        FFunction::log_linear(),
        FFunction::neg_inv_sqrt(),
    ] {
        // strict monotonicity on 1000 random ordered pairs
        for _ in 0..1000 {
            let s = 10f64.powf(rng.gen_range(-9.0..9.0));
            let t = s * 10f64.powf(rng.gen_range(0.001..2.0));
            assert!(f.eval(s) < f.eval(t), "F = {}", f.name());
        }
        // divergence at 0+ and the decay of beta^k F(beta)
        assert!(f.eval(beta) < -20.0, "F = {}", f.name());
        assert!(
            (beta.powf(f.k()) * f.eval(beta)).abs() < 1e-3,
            "F = {} with k = {}",
            f.name(),
            f.k()
        );
    }
    // phi(t) < t on a log-spaced grid
    let phi = PhiFunction::parse("9/10*t").unwrap();
    for i in 0..=1000 {
        let t = 10f64.powf(-9.0 + 18.0 * i as f64 / 1000.0);
        assert!(phi.eval(t) < t);
    }
    pass("criterion 5 (F axioms for the three built-ins, phi contractiveness)");
}

#[test]
fn criterion_6_dp_solver() {
    let started = Instant::now();
    let w = ClosedSet::interval(0.0, 1.0).unwrap();
    let inst = DpInstance::new(
        &w,
        201,
        &w,
        201,
        &parse_expr2("x*y", ["x", "y"]).unwrap(),
        parse_expr3("z/2", ["x", "y", "z"]).unwrap(),
        parse_expr3("z/2", ["x", "y", "z"]).unwrap(),
        &parse_expr2("x*y", ["x", "y"]).unwrap(),
    )
    .unwrap();
    let h0 = GridFunction::constant(inst.w_grid().len(), 0.0);
    let out = solve_successive(&inst, OperatorIndex::One, &h0, 1e-8, 60).unwrap();
    assert!(out.converged);
    assert!(out.iterations <= 60);
    assert!(out.residual <= 1e-8, "residual {}", out.residual);
    let mut err = 0.0f64;
    for (i, &x) in inst.w_grid().iter().enumerate() {
        err = err.max((out.h.0[i] - 2.0 * x).abs());
    }
    assert!(err <= 5e-3, "sup-norm error vs 2x: {err}");
    for w in out.step_norms.windows(2) {
        if w[0] > 1e-12 {
            assert!(w[1] / w[0] <= 0.5 + 1e-6, "contraction ratio exceeded");
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    pass("criterion 6 (functional-equation solver on the closed-form instance, < 10 s)");
}

#[test]
fn criterion_7_volterra_solver() {
    let build = |n: usize| {
        InclusionInstance::new(
            &parse_expr1("1", "t").unwrap(),
            &parse_expr2("1", ["t", "s"]).unwrap(),
            &parse_expr1("t", "t").unwrap(),
            parse_set_expr("{x}", &["s", "x"]).unwrap(),
            n,
        )
        .unwrap()
    };
    let max_err = |inst: &InclusionInstance| {
        let out = solve_inclusion(inst, SelectionRule::Midpoint, 1e-13, 80).unwrap();
        assert!(out.converged);
        // every selected value must be a member of its value set, exactly
        for (j, &t) in inst.t_nodes().iter().enumerate() {
            let set = inst.f_value(t, out.x.0[j]).unwrap();
            let sel = SelectionRule::Midpoint.select(&set, out.x.0[j]);
            assert!(set.contains(sel));
        }
        let mut err = 0.0f64;
        for (j, &t) in inst.t_nodes().iter().enumerate() {
            err = err.max((out.x.0[j] - t.exp()).abs());
        }
        err
    };
    let e1000 = max_err(&build(1000));
    assert!(e1000 <= 1e-5, "error at n=1000: {e1000}");
    let e2000 = max_err(&build(2000));
    let ratio = e1000 / e2000;
    assert!(
        (3.5..=4.5).contains(&ratio),
        "refinement ratio {ratio} outside [3.5, 4.5]"
    );
    println!(
        "criterion 7 detail: error(1000) = {e1000:.3e}, error(2000) = {e2000:.3e}, \
         measured quadrature constant C = err * n^2 = {:.3}",
        e1000 * 1e6
    );
    pass("criterion 7 (integral-inclusion solver: 1e-5 accuracy at n=1000, order-2 refinement)");
}

#[test]
fn criterion_8_determinism_of_commands() {
    let bin = env!("CARGO_BIN_EXE_fixlab");
    let config = |name: &str| format!("{}/configs/{name}", env!("CARGO_MANIFEST_DIR"));
    let runs: Vec<Vec<String>> = vec![
        vec![
            "certify".into(),
            "--input".into(),
            config("section-3.cfg"),
            "--format".into(),
            "records".into(),
            "--seed".into(),
            "42".into(),
        ],
        vec![
            "certify".into(),
            "--input".into(),
            config("section-3.cfg"),
            "--tau".into(),
            "2".into(),
            "--format".into(),
            "records".into(),
        ],
        vec![
            "pairs".into(),
            "--input".into(),
            config("example-1.3.cfg"),
            "--format".into(),
            "records".into(),
        ],
        vec![
            "pairs".into(),
            "--input".into(),
            config("example-1.4.cfg"),
            "--format".into(),
            "records".into(),
        ],
        vec![
            "solve-dp".into(),
            "--input".into(),
            config("dp-demo.cfg"),
            "--grid".into(),
            "41".into(),
            "--seed".into(),
            "42".into(),
            "--format".into(),
            "records".into(),
        ],
        vec![
            "solve-volterra".into(),
            "--input".into(),
            config("volterra-exp.cfg"),
            "--grid".into(),
            "200".into(),
            "--format".into(),
            "records".into(),
        ],
        vec![
            "repro-paper".into(),
            "--format".into(),
            "records".into(),
            "--seed".into(),
            "42".into(),
        ],
    ];
    for args in &runs {
        let run = || {
            let out = Command::new(bin)
                .args(args)
                .output()
                .expect("spawning the binary");
            (out.stdout, out.status.code())
        };
        let (out1, code1) = run();
        let (out2, code2) = run();
        assert!(!out1.is_empty(), "no output for {args:?}");
        assert_eq!(out1, out2, "stdout differs across runs for {args:?}");
        assert_eq!(code1, code2, "exit code differs across runs for {args:?}");
    }
    pass("criterion 8 (byte-identical machine-readable output across repeated runs)");
}

// The solver-facing invariants that back the criteria above.

#[test]
fn orbit_invariants_on_bundled_maps() {
    // nadler-certified factor bounds observed step ratios
    let t = PiecewiseSetMap::parse("piecewise{ [0,1]: [x/4,x/2] }").unwrap();
    let cond = ConditionSpec::Nadler { lambda: 0.5 };
    let f = PiecewiseMap::identity(t.domain());
    let report = certify(&cond, &f, &t, &GridSpec { points: 101 }).unwrap();
    assert_eq!(report.verdict, Verdict::HoldsOnSamples);
    let trace = picard_multivalued(&t, 1.0, 1e-11, 200).unwrap();
    for w in trace.steps.windows(2) {
        if w[0].step > 1e-12 {
            assert!(w[1].step / w[0].step <= 0.5 + 1e-6);
        }
    }
    // converged orbit residual re-checked through the metric layer
    let tx = t.eval(trace.final_x).unwrap();
    assert!((point_set_distance(trace.final_x, &tx) - trace.residual).abs() <= 1e-15);
}
