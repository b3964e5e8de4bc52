//! Successive approximation for the two-operator system of functional
//! equations `q_i(x) = sup_y { g(x,y) + G_i(x,y, q_i(tau(x,y))) }` on a
//! state grid.
//!
//! Both suprema are realized as maxima over uniform grids; `tau(x,y)`
//! landing between state nodes is snapped to the nearest node and the
//! largest snap distance is reported so the discretization bias is
//! visible.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::contraction::{CertificateReport, PhiFunction, Verdict, Violation};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::set::ClosedSet;

/// One instance of the functional-equation system, fully gridded.
#[derive(Debug, Clone)]
pub struct DpInstance {
    w_grid: Vec<f64>,
    d_grid: Vec<f64>,
    g1: Expr,
    g2: Expr,
    /// g(x_i, y_j) precomputed in row-major order.
    g_table: Vec<f64>,
    /// Snapped state index of tau(x_i, y_j), row-major.
    tau_index: Vec<usize>,
    pub max_snap_error: f64,
    /// Largest |g| on the grid (boundedness witness).
    pub g_bound: f64,
}

impl DpInstance {
    /// Grids the spaces, tabulates `g` and the snapped `tau` targets,
    /// and spot-checks that `G1`/`G2` stay finite on probe values.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        w: &ClosedSet,
        n_w: usize,
        d: &ClosedSet,
        n_d: usize,
        g: &Expr,
        g1: Expr,
        g2: Expr,
        tau: &Expr,
    ) -> Result<Self> {
        let w_grid = w.sample_grid(n_w);
        let d_grid = d.sample_grid(n_d);
        let mut g_table = Vec::with_capacity(w_grid.len() * d_grid.len());
        let mut tau_index = Vec::with_capacity(w_grid.len() * d_grid.len());
        let mut max_snap_error = 0.0f64;
        let mut g_bound = 0.0f64;
        for &x in &w_grid {
            for &y in &d_grid {
                let gv = g.eval(&[x, y]);
                if !gv.is_finite() {
                    return Err(Error::Validation(format!("g({x},{y}) = {gv}")));
                }
                g_bound = g_bound.max(gv.abs());
                g_table.push(gv);
                let target = tau.eval(&[x, y]);
                if !target.is_finite() {
                    return Err(Error::Validation(format!("tau({x},{y}) = {target}")));
                }
                let (idx, err) = snap(&w_grid, target);
                max_snap_error = max_snap_error.max(err);
                tau_index.push(idx);
            }
        }
        for &x in &[w_grid[0], w_grid[w_grid.len() - 1]] {
            for &y in &[d_grid[0], d_grid[d_grid.len() - 1]] {
                for z in [-10.0, -1.0, 0.0, 1.0, 10.0] {
                    for (name, e) in [("G1", &g1), ("G2", &g2)] {
                        let v = e.eval(&[x, y, z]);
                        if !v.is_finite() {
                            return Err(Error::Validation(format!("{name}({x},{y},{z}) = {v}")));
                        }
                    }
                }
            }
        }
        Ok(DpInstance {
            w_grid,
            d_grid,
            g1,
            g2,
            g_table,
            tau_index,
            max_snap_error,
            g_bound,
        })
    }

    pub fn w_grid(&self) -> &[f64] {
        &self.w_grid
    }

    pub fn d_grid(&self) -> &[f64] {
        &self.d_grid
    }
}

/// Nearest grid index to `target`, ties toward the smaller node.
fn snap(grid: &[f64], target: f64) -> (usize, f64) {
    let mut best = 0usize;
    let mut err = f64::INFINITY;
    let at = grid.partition_point(|&v| v < target);
    for (idx, &node) in grid
        .iter()
        .enumerate()
        .take((at + 1).min(grid.len()))
        .skip(at.saturating_sub(1))
    {
        let e = (node - target).abs();
        if e < err {
            err = e;
            best = idx;
        }
    }
    (best, err)
}

/// Bounded real-valued function on the state grid, compared in sup-norm.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction(pub Vec<f64>);

impl GridFunction {
    pub fn constant(n: usize, v: f64) -> Self {
        GridFunction(vec![v; n])
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sup_dist(&self, other: &GridFunction) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorIndex {
    One,
    Two,
}

/// One application of the Bellman-type operator
/// `(T_i h)(x) = max_y { g(x,y) + G_i(x,y, h(snap(tau(x,y)))) }`.
pub fn bellman_apply(
    inst: &DpInstance,
    which: OperatorIndex,
    h: &GridFunction,
) -> Result<GridFunction> {
    if h.0.len() != inst.w_grid.len() {
        return Err(Error::InvalidParam(format!(
            "grid function has {} nodes, instance has {}",
            h.0.len(),
            inst.w_grid.len()
        )));
    }
    let gi = match which {
        OperatorIndex::One => &inst.g1,
        OperatorIndex::Two => &inst.g2,
    };
    let nd = inst.d_grid.len();
    let mut out = Vec::with_capacity(inst.w_grid.len());
    for (i, &x) in inst.w_grid.iter().enumerate() {
        let mut best = f64::NEG_INFINITY;
        for (j, &y) in inst.d_grid.iter().enumerate() {
            let z = h.0[inst.tau_index[i * nd + j]];
            let v = inst.g_table[i * nd + j] + gi.eval(&[x, y, z]);
            if !v.is_finite() {
                return Err(Error::Validation(format!(
                    "operator integrand not finite at x={x}, y={y}, z={z}"
                )));
            }
            best = best.max(v);
        }
        out.push(best);
    }
    Ok(GridFunction(out))
}

#[derive(Debug, Clone)]
pub struct DpSolveOutcome {
    pub h: GridFunction,
    pub iterations: usize,
    /// `‖T h* - h*‖` recomputed with one extra operator application.
    pub residual: f64,
    pub converged: bool,
    /// Successive step norms `‖h_{k+1} - h_k‖`.
    pub step_norms: Vec<f64>,
}

/// Iterates `h ← T_i h` until the step norm drops to `tol`.
pub fn solve_successive(
    inst: &DpInstance,
    which: OperatorIndex,
    h0: &GridFunction,
    tol: f64,
    max_iters: usize,
) -> Result<DpSolveOutcome> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParam(format!("tol must be > 0, got {tol}")));
    }
    let mut h = h0.clone();
    let mut step_norms = Vec::new();
    for it in 1..=max_iters {
        let next = bellman_apply(inst, which, &h)?;
        let step = next.sup_dist(&h);
        step_norms.push(step);
        h = next;
        if step <= tol {
            let residual = bellman_apply(inst, which, &h)?.sup_dist(&h);
            return Ok(DpSolveOutcome {
                h,
                iterations: it,
                residual,
                converged: true,
                step_norms,
            });
        }
    }
    let residual = bellman_apply(inst, which, &h)?.sup_dist(&h);
    Ok(DpSolveOutcome {
        h,
        iterations: max_iters,
        residual,
        converged: false,
        step_norms,
    })
}

/// The seven-term max over sup-norm distances of operator images:
/// `Θ(h,k) = max{ d(T2h,T2k), d(T2h,T1h), d(T2k,T1k),
/// [d(T1h,T2k)+d(T1k,T2h)]/2, d(T1h,T2h)d(T1k,T2k)/(1+d(T2k,T2h)),
/// d(T1h,T2k)d(T1k,T2h)/(1+d(T2k,T2h)), d(T1h,T2k)d(T1k,T2h)/(1+d(T1h,T1k)) }`.
pub fn theta(inst: &DpInstance, h: &GridFunction, k: &GridFunction) -> Result<f64> {
    let t1h = bellman_apply(inst, OperatorIndex::One, h)?;
    let t2h = bellman_apply(inst, OperatorIndex::Two, h)?;
    let t1k = bellman_apply(inst, OperatorIndex::One, k)?;
    let t2k = bellman_apply(inst, OperatorIndex::Two, k)?;
    let d = GridFunction::sup_dist;
    let terms = [
        d(&t2h, &t2k),
        d(&t2h, &t1h),
        d(&t2k, &t1k),
        0.5 * (d(&t1h, &t2k) + d(&t1k, &t2h)),
        d(&t1h, &t2h) * d(&t1k, &t2k) / (1.0 + d(&t2k, &t2h)),
        d(&t1h, &t2k) * d(&t1k, &t2h) / (1.0 + d(&t2k, &t2h)),
        d(&t1h, &t2k) * d(&t1k, &t2h) / (1.0 + d(&t1h, &t1k)),
    ];
    Ok(terms.into_iter().fold(0.0, f64::max))
}

/// Samples random grid-function pairs (values uniform in `value_range`,
/// seeded) and checks
/// `|G1(x,y,h(x)) - G2(x,y,k(x))| <= e^{-tau} phi(Θ(h,k))` at every
/// grid pair `(x,y)`.
pub fn verify_hypothesis1(
    inst: &DpInstance,
    tau: f64,
    phi: &PhiFunction,
    sample_pairs: usize,
    value_range: (f64, f64),
    seed: u64,
) -> Result<CertificateReport> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParam(format!("tau must be > 0, got {tau}")));
    }
    if !(value_range.0 <= value_range.1) {
        return Err(Error::InvalidParam("empty value range".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nw = inst.w_grid.len();
    let draw = |rng: &mut ChaCha8Rng| -> GridFunction {
        GridFunction(
            (0..nw)
                .map(|_| {
                    if value_range.0 == value_range.1 {
                        value_range.0
                    } else {
                        rng.gen_range(value_range.0..=value_range.1)
                    }
                })
                .collect(),
        )
    };
    let mut samples = 0usize;
    let mut violations = Vec::new();
    let mut min_margin: Option<f64> = None;
    for _ in 0..sample_pairs {
        let h = draw(&mut rng);
        let k = draw(&mut rng);
        let bound = (-tau).exp() * phi.eval(theta(inst, &h, &k)?);
        for (i, &x) in inst.w_grid.iter().enumerate() {
            for &y in &inst.d_grid {
                let lhs = (inst.g1.eval(&[x, y, h.0[i]]) - inst.g2.eval(&[x, y, k.0[i]])).abs();
                samples += 1;
                if lhs <= bound {
                    let m = bound - lhs;
                    min_margin = Some(min_margin.map_or(m, |cur: f64| cur.min(m)));
                } else {
                    violations.push(Violation {
                        x,
                        y,
                        lhs,
                        rhs: bound,
                        gap: lhs - bound,
                    });
                }
            }
        }
    }
    let verdict = if violations.is_empty() {
        Verdict::HoldsOnSamples
    } else {
        Verdict::Violated
    };
    Ok(CertificateReport {
        samples,
        skipped_vacuous: 0,
        violations,
        min_margin,
        verdict,
    })
}

/// A-posteriori checks at a computed solution: the coincidence defect
/// `‖T1 h - T2 h‖` and the idempotency defect `‖T1(T1 h) - T1 h‖`.
#[derive(Debug, Clone, Copy)]
pub struct PosteriorReport {
    pub coincidence_defect: f64,
    pub idempotency_defect: f64,
}

pub fn posterior_checks(inst: &DpInstance, h: &GridFunction) -> Result<PosteriorReport> {
    let t1h = bellman_apply(inst, OperatorIndex::One, h)?;
    let t2h = bellman_apply(inst, OperatorIndex::Two, h)?;
    let t1t1h = bellman_apply(inst, OperatorIndex::One, &t1h)?;
    Ok(PosteriorReport {
        coincidence_defect: t1h.sup_dist(&t2h),
        idempotency_defect: t1t1h.sup_dist(&t1h),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_expr2, parse_expr3};

    fn unit_interval() -> ClosedSet {
        ClosedSet::interval(0.0, 1.0).unwrap()
    }

    fn demo_instance(n: usize) -> DpInstance {
        let w = unit_interval();
        DpInstance::new(
            &w,
            n,
            &w,
            n,
            &parse_expr2("x*y", ["x", "y"]).unwrap(),
            parse_expr3("z/2", ["x", "y", "z"]).unwrap(),
            parse_expr3("z/2", ["x", "y", "z"]).unwrap(),
            &parse_expr2("x*y", ["x", "y"]).unwrap(),
        )
        .unwrap()
    }

    fn zero_g_instance(gexpr: &str) -> DpInstance {
        let w = unit_interval();
        DpInstance::new(
            &w,
            41,
            &w,
            41,
            &parse_expr2("0", ["x", "y"]).unwrap(),
            parse_expr3(gexpr, ["x", "y", "z"]).unwrap(),
            parse_expr3(gexpr, ["x", "y", "z"]).unwrap(),
            &parse_expr2("x*y", ["x", "y"]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn bellman_degenerate_g_zero() {
        // G == 0: (T h)(x) = max_y g(x,y), independent of h
        let w = unit_interval();
        let inst = DpInstance::new(
            &w,
            21,
            &w,
            21,
            &parse_expr2("x*y", ["x", "y"]).unwrap(),
            parse_expr3("0", ["x", "y", "z"]).unwrap(),
            parse_expr3("0", ["x", "y", "z"]).unwrap(),
            &parse_expr2("x*y", ["x", "y"]).unwrap(),
        )
        .unwrap();
        let h = GridFunction::constant(21, 7.0);
        let th = bellman_apply(&inst, OperatorIndex::One, &h).unwrap();
        for (i, &x) in inst.w_grid().iter().enumerate() {
            assert!((th.0[i] - x).abs() <= 1e-15);
        }
        // idempotent: T(Th) = Th exactly
        let tth = bellman_apply(&inst, OperatorIndex::One, &th).unwrap();
        assert_eq!(th, tth);
        // converges in one step
        let out = solve_successive(&inst, OperatorIndex::One, &h, 1e-12, 5).unwrap();
        assert!(out.converged);
        assert!(out.iterations <= 2);
    }

    #[test]
    fn bellman_constant_propagation() {
        let inst = zero_g_instance("z/2");
        let h = GridFunction::constant(41, 1.0);
        let th = bellman_apply(&inst, OperatorIndex::One, &h).unwrap();
        for v in &th.0 {
            assert!((v - 0.5).abs() <= 1e-15);
        }
    }

    #[test]
    fn bellman_demo_matches_brute_force() {
        let inst = demo_instance(41);
        let h = GridFunction::constant(41, 0.0);
        let th = bellman_apply(&inst, OperatorIndex::One, &h).unwrap();
        // independent brute-force maximum over the decision grid
        for (i, &x) in inst.w_grid().iter().enumerate() {
            let mut oracle = f64::NEG_INFINITY;
            for &y in inst.d_grid() {
                oracle = oracle.max(x * y + 0.0 / 2.0);
            }
            assert!((th.0[i] - oracle).abs() <= 1e-15, "x={x}");
            assert!((th.0[i] - x).abs() <= 1e-15);
        }
    }

    #[test]
    fn solve_contraction_to_zero() {
        let inst = zero_g_instance("z/2");
        let h0 = GridFunction::constant(41, 7.0);
        let out = solve_successive(&inst, OperatorIndex::One, &h0, 1e-10, 100).unwrap();
        assert!(out.converged);
        assert!(out.h.sup_norm() <= 1e-9);
        assert!(out.residual <= 1e-10);
        // geometric decay at ratio about 1/2
        for w in out.step_norms.windows(2) {
            if w[0] > 1e-12 {
                assert!(w[1] / w[0] <= 0.5 + 1e-6);
            }
        }
    }

    #[test]
    fn solve_demo_closed_form() {
        // h(x) = max_y { xy + h(xy)/2 } has the closed form h(x) = 2x
        let inst = demo_instance(201);
        let h0 = GridFunction::constant(201, 0.0);
        let tol = 1e-10;
        let out = solve_successive(&inst, OperatorIndex::One, &h0, tol, 100).unwrap();
        assert!(out.converged);
        let mut err = 0.0f64;
        for (i, &x) in inst.w_grid().iter().enumerate() {
            err = err.max((out.h.0[i] - 2.0 * x).abs());
        }
        assert!(err <= 10.0 * tol, "err = {err}");
    }

    #[test]
    fn theta_examples() {
        let inst = zero_g_instance("z/2");
        let h = GridFunction::constant(41, 1.0);
        let k = GridFunction::constant(41, 0.0);
        // T1 = T2, h = k: everything vanishes
        assert_eq!(theta(&inst, &h, &h).unwrap(), 0.0);
        // oracle: evaluate all seven terms from scratch
        let t1h = bellman_apply(&inst, OperatorIndex::One, &h).unwrap();
        let t2h = bellman_apply(&inst, OperatorIndex::Two, &h).unwrap();
        let t1k = bellman_apply(&inst, OperatorIndex::One, &k).unwrap();
        let t2k = bellman_apply(&inst, OperatorIndex::Two, &k).unwrap();
        let d = GridFunction::sup_dist;
        let oracle = [
            d(&t2h, &t2k),
            d(&t2h, &t1h),
            d(&t2k, &t1k),
            0.5 * (d(&t1h, &t2k) + d(&t1k, &t2h)),
            d(&t1h, &t2h) * d(&t1k, &t2k) / (1.0 + d(&t2k, &t2h)),
            d(&t1h, &t2k) * d(&t1k, &t2h) / (1.0 + d(&t2k, &t2h)),
            d(&t1h, &t2k) * d(&t1k, &t2h) / (1.0 + d(&t1h, &t1k)),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        let got = theta(&inst, &h, &k).unwrap();
        assert_eq!(got, oracle);
        assert_eq!(got, 0.5);
        assert!(got >= d(&t2h, &t2k));
    }

    #[test]
    fn hypothesis1_holds_for_equal_operators() {
        // a degenerate value range forces h = k, so equal operators
        // give lhs = 0 everywhere and the bound holds for any tau, phi
        let inst = zero_g_instance("z/2");
        let phi = PhiFunction::parse("9/10*t").unwrap();
        let report = verify_hypothesis1(&inst, 5.0, &phi, 4, (0.7, 0.7), 42).unwrap();
        assert_eq!(report.verdict, Verdict::HoldsOnSamples);
        // z-independent operators make lhs vanish for any h, k
        let flat = zero_g_instance("x/2");
        let report = verify_hypothesis1(&flat, 5.0, &phi, 4, (0.0, 1.0), 42).unwrap();
        assert_eq!(report.verdict, Verdict::HoldsOnSamples);
    }

    #[test]
    fn hypothesis1_detects_violation() {
        // G1 = z, G2 = 0 with h = k = 1: lhs = 1, theta-based bound tiny
        let w = unit_interval();
        let inst = DpInstance::new(
            &w,
            21,
            &w,
            21,
            &parse_expr2("0", ["x", "y"]).unwrap(),
            parse_expr3("z", ["x", "y", "z"]).unwrap(),
            parse_expr3("0", ["x", "y", "z"]).unwrap(),
            &parse_expr2("x*y", ["x", "y"]).unwrap(),
        )
        .unwrap();
        let phi = PhiFunction::parse("9/10*t").unwrap();
        let report = verify_hypothesis1(&inst, 5.0, &phi, 2, (1.0, 1.0), 7).unwrap();
        assert_eq!(report.verdict, Verdict::Violated);
        // oracle for the violating sample: lhs = |1 - 0| = 1, and
        // Theta(1,1) = 1 so the bound is e^-5 * 0.9 < 1
        let h = GridFunction::constant(21, 1.0);
        let bound = (-5.0f64).exp() * phi.eval(theta(&inst, &h, &h).unwrap());
        assert!(1.0 > bound);
    }

    #[test]
    fn hypothesis1_seeded_and_deterministic() {
        let inst = zero_g_instance("z/3");
        let phi = PhiFunction::parse("9/10*t").unwrap();
        let a = verify_hypothesis1(&inst, 0.7, &phi, 3, (0.0, 1.0), 99).unwrap();
        let b = verify_hypothesis1(&inst, 0.7, &phi, 3, (0.0, 1.0), 99).unwrap();
        assert_eq!(a.samples, b.samples);
        assert_eq!(a.violations.len(), b.violations.len());
        assert_eq!(a.min_margin, b.min_margin);
    }

    #[test]
    fn lipschitz_operators_contract_in_sup_norm() {
        // |G(z1) - G(z2)| <= 0.5 |z1 - z2| must give a 0.5-contraction
        let inst = demo_instance(31);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let h = GridFunction((0..31).map(|_| rng.gen_range(-2.0..2.0)).collect());
            let k = GridFunction((0..31).map(|_| rng.gen_range(-2.0..2.0)).collect());
            let th = bellman_apply(&inst, OperatorIndex::One, &h).unwrap();
            let tk = bellman_apply(&inst, OperatorIndex::One, &k).unwrap();
            assert!(th.sup_dist(&tk) <= 0.5 * h.sup_dist(&k) + 1e-9);
        }
    }

    #[test]
    fn posterior_checks_vanish_for_equal_operators_at_fixed_point() {
        let inst = demo_instance(51);
        let h0 = GridFunction::constant(51, 0.0);
        let out = solve_successive(&inst, OperatorIndex::One, &h0, 1e-11, 100).unwrap();
        let post = posterior_checks(&inst, &out.h).unwrap();
        assert!(post.coincidence_defect == 0.0);
        assert!(post.idempotency_defect <= 1e-10);
    }

    #[test]
    fn snap_error_is_reported() {
        let inst = demo_instance(201);
        // grid spacing 1/200: snapping x*y is off by at most half of it
        assert!(inst.max_snap_error <= 0.5 / 200.0 + 1e-12);
        assert!(inst.max_snap_error > 0.0);
    }
}
