//! Discretized solver and hypothesis checks for the Volterra integral
//! inclusion `x(t) ∈ q(t) + ∫_0^{σ(t)} k(t,s) F(s, x(s)) ds` on
//! `J = [0,1]` with real-valued trajectories.
//!
//! The integral operator selects one member of `F(s, x(s))` per node
//! with a deterministic rule, then integrates by the composite
//! trapezoid rule; when `σ(t)` falls between nodes the last cell is
//! split linearly.

use crate::contraction::{CertificateReport, PhiFunction, Verdict, Violation};
use crate::error::{Error, Result};
use crate::expr::{Expr, SetExpr};
use crate::set::{hausdorff, ClosedSet};

/// One instance of the inclusion, tabulated on `n+1` nodes `t_j = j/n`.
#[derive(Debug, Clone)]
pub struct InclusionInstance {
    n: usize,
    t_nodes: Vec<f64>,
    q_vals: Vec<f64>,
    sigma_vals: Vec<f64>,
    /// `k(t_i, s_j)` in row-major order, (n+1) x (n+1).
    kernel: Vec<f64>,
    /// `F(s, x)` with variables `s`, `x`.
    f_set: SetExpr,
    pub sup_kernel: f64,
    pub kernel_nonnegative: bool,
}

impl InclusionInstance {
    pub fn new(q: &Expr, kernel: &Expr, sigma: &Expr, f_set: SetExpr, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParam(format!("n must be >= 2, got {n}")));
        }
        let t_nodes: Vec<f64> = (0..=n).map(|j| j as f64 / n as f64).collect();
        let mut q_vals = Vec::with_capacity(n + 1);
        let mut sigma_vals = Vec::with_capacity(n + 1);
        for &t in &t_nodes {
            let qv = q.eval(&[t]);
            if !qv.is_finite() {
                return Err(Error::Validation(format!("q({t}) = {qv}")));
            }
            q_vals.push(qv);
            let sv = sigma.eval(&[t]);
            if !(-1e-12..=1.0 + 1e-12).contains(&sv) {
                return Err(Error::Validation(format!("sigma({t}) = {sv} leaves [0,1]")));
            }
            sigma_vals.push(sv.clamp(0.0, 1.0));
        }
        let mut kvals = Vec::with_capacity((n + 1) * (n + 1));
        let mut sup_kernel = f64::NEG_INFINITY;
        let mut kernel_nonnegative = true;
        for &t in &t_nodes {
            for &s in &t_nodes {
                let kv = kernel.eval(&[t, s]);
                if !kv.is_finite() {
                    return Err(Error::Validation(format!("k({t},{s}) = {kv}")));
                }
                kernel_nonnegative &= kv >= 0.0;
                sup_kernel = sup_kernel.max(kv);
                kvals.push(kv);
            }
        }
        // probe F on a few (s, x) pairs so malformed set values surface
        // at construction rather than mid-iteration
        for s in [0.0, 0.5, 1.0] {
            for x in [-1.0, 0.0, 1.0] {
                f_set
                    .eval(&[s, x])
                    .map_err(|e| Error::Validation(format!("F({s},{x}): {e}")))?;
            }
        }
        Ok(InclusionInstance {
            n,
            t_nodes,
            q_vals,
            sigma_vals,
            kernel: kvals,
            f_set,
            sup_kernel,
            kernel_nonnegative,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t_nodes(&self) -> &[f64] {
        &self.t_nodes
    }

    pub fn q_vals(&self) -> &[f64] {
        &self.q_vals
    }

    /// Value of the multifunction at `(s, x)`.
    pub fn f_value(&self, s: f64, x: f64) -> Result<ClosedSet> {
        self.f_set.eval(&[s, x])
    }
}

/// Real-valued trajectory on the nodes of `J`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory(pub Vec<f64>);

impl Trajectory {
    pub fn constant(n: usize, v: f64) -> Self {
        Trajectory(vec![v; n + 1])
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sup_dist(&self, other: &Trajectory) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Deterministic pointwise selection `v(s) ∈ F(s, x(s))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionRule {
    /// Metric projection of the current trajectory value.
    NearestToCurrent,
    /// Nearest set member to the midpoint of the set's hull.
    Midpoint,
    LowerEnd,
    UpperEnd,
}

impl SelectionRule {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "nearest-to-current" => Ok(SelectionRule::NearestToCurrent),
            "midpoint" => Ok(SelectionRule::Midpoint),
            "lower-end" => Ok(SelectionRule::LowerEnd),
            "upper-end" => Ok(SelectionRule::UpperEnd),
            other => Err(Error::InvalidParam(format!(
                "unknown selection rule '{other}'"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SelectionRule::NearestToCurrent => "nearest-to-current",
            SelectionRule::Midpoint => "midpoint",
            SelectionRule::LowerEnd => "lower-end",
            SelectionRule::UpperEnd => "upper-end",
        }
    }

    /// Selected member; always an element of `set`.
    pub fn select(&self, set: &ClosedSet, current: f64) -> f64 {
        match self {
            SelectionRule::NearestToCurrent => set.project(current),
            SelectionRule::Midpoint => set.project(0.5 * (set.min() + set.max())),
            SelectionRule::LowerEnd => set.min(),
            SelectionRule::UpperEnd => set.max(),
        }
    }
}

/// Composite trapezoid of the tabulated integrand `w` over
/// `[0, sigma]`, with the last partial cell split linearly.
fn integrate(n: usize, w: &[f64], sigma: f64) -> f64 {
    let h = 1.0 / n as f64;
    let pos = (sigma * n as f64).clamp(0.0, n as f64);
    let m = pos.floor() as usize;
    let m = m.min(n);
    let frac = pos - m as f64;
    let mut acc = 0.0;
    for j in 0..m {
        acc += 0.5 * (w[j] + w[j + 1]) * h;
    }
    if frac > 0.0 && m < n {
        let w_sigma = w[m] + frac * (w[m + 1] - w[m]);
        acc += 0.5 * (w[m] + w_sigma) * frac * h;
    }
    acc
}

/// Selects `v_j ∈ F(t_j, x_j)` by `rule` and returns
/// `u(t_i) = q(t_i) + ∫_0^{σ(t_i)} k(t_i, s) v(s) ds`.
pub fn apply_inclusion_operator(
    inst: &InclusionInstance,
    x: &Trajectory,
    rule: SelectionRule,
) -> Result<Trajectory> {
    let n = inst.n;
    if x.0.len() != n + 1 {
        return Err(Error::InvalidParam(format!(
            "trajectory has {} nodes, instance has {}",
            x.0.len(),
            n + 1
        )));
    }
    let mut v = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let set = inst.f_value(inst.t_nodes[j], x.0[j])?;
        let sel = rule.select(&set, x.0[j]);
        debug_assert!(set.contains(sel));
        v.push(sel);
    }
    let mut out = Vec::with_capacity(n + 1);
    let mut w = vec![0.0; n + 1];
    for i in 0..=n {
        let row = &inst.kernel[i * (n + 1)..(i + 1) * (n + 1)];
        for j in 0..=n {
            w[j] = row[j] * v[j];
        }
        out.push(inst.q_vals[i] + integrate(n, &w, inst.sigma_vals[i]));
    }
    Ok(Trajectory(out))
}

#[derive(Debug, Clone)]
pub struct VolterraOutcome {
    pub x: Trajectory,
    /// `‖x* - T x*‖` recomputed with one extra operator application.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub step_norms: Vec<f64>,
}

/// Successive approximation `x ← T x` starting from `x = q`, stopping
/// when the sup-norm step drops to `tol`.
pub fn solve_inclusion(
    inst: &InclusionInstance,
    rule: SelectionRule,
    tol: f64,
    max_iters: usize,
) -> Result<VolterraOutcome> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParam(format!("tol must be > 0, got {tol}")));
    }
    let mut x = Trajectory(inst.q_vals.clone());
    let mut step_norms = Vec::new();
    for it in 1..=max_iters {
        let next = apply_inclusion_operator(inst, &x, rule)?;
        let step = next.sup_dist(&x);
        step_norms.push(step);
        x = next;
        if step <= tol {
            let residual = apply_inclusion_operator(inst, &x, rule)?.sup_dist(&x);
            return Ok(VolterraOutcome {
                x,
                residual,
                iterations: it,
                converged: true,
                step_norms,
            });
        }
    }
    let residual = apply_inclusion_operator(inst, &x, rule)?.sup_dist(&x);
    Ok(VolterraOutcome {
        x,
        residual,
        iterations: max_iters,
        converged: false,
        step_norms,
    })
}

/// `tau = -ln(sup k)`; flags the hypothesis violation when
/// `sup k >= 1` (tau must be positive).
#[derive(Debug, Clone, Copy)]
pub struct KernelTau {
    pub tau: f64,
    pub sup_k: f64,
    pub h0_violated: bool,
}

pub fn kernel_tau(inst: &InclusionInstance) -> KernelTau {
    let sup_k = inst.sup_kernel;
    let tau = -sup_k.ln();
    KernelTau {
        tau,
        sup_k,
        h0_violated: !(tau > 0.0) || !inst.kernel_nonnegative,
    }
}

/// Lower/upper solution check: `a(t) <= q(t) + ∫ k v_1` for the
/// lower-end selection at `a`, `b(t) >= q(t) + ∫ k v_2` for the
/// upper-end selection at `b`, and optionally `a <= x <= b` nodewise
/// for a supplied solution. Comparisons carry a 1e-9 slack.
#[derive(Debug, Clone)]
pub struct BracketReport {
    pub lower_holds: bool,
    pub lower_violations: Vec<usize>,
    pub upper_holds: bool,
    pub upper_violations: Vec<usize>,
    pub solution_within: Option<bool>,
    pub solution_violations: Vec<usize>,
}

pub fn check_bracket(
    inst: &InclusionInstance,
    a: &Trajectory,
    b: &Trajectory,
    solution: Option<&Trajectory>,
) -> Result<BracketReport> {
    let ta = apply_inclusion_operator(inst, a, SelectionRule::LowerEnd)?;
    let tb = apply_inclusion_operator(inst, b, SelectionRule::UpperEnd)?;
    let tol = 1e-9;
    let mut lower_violations = Vec::new();
    let mut upper_violations = Vec::new();
    for j in 0..=inst.n {
        if a.0[j] > ta.0[j] + tol {
            lower_violations.push(j);
        }
        if b.0[j] < tb.0[j] - tol {
            upper_violations.push(j);
        }
    }
    let (solution_within, solution_violations) = match solution {
        Some(x) => {
            let mut bad = Vec::new();
            for j in 0..=inst.n {
                if x.0[j] < a.0[j] - tol || x.0[j] > b.0[j] + tol {
                    bad.push(j);
                }
            }
            (Some(bad.is_empty()), bad)
        }
        None => (None, Vec::new()),
    };
    Ok(BracketReport {
        lower_holds: lower_violations.is_empty(),
        lower_violations,
        upper_holds: upper_violations.is_empty(),
        upper_violations,
        solution_within,
        solution_violations,
    })
}

/// Nodewise Hardy-Rogers expression with `f` the identity:
/// `Δ_j = alpha |x-y| + beta [1+|x-Tx|]|y-Ty| / (1+|x-y|)
///  + gamma [|x-Tx|+|y-Ty|] + delta [|x-Ty|+|y-Tx|]`.
#[allow(clippy::too_many_arguments)]
pub fn delta(
    x: &Trajectory,
    y: &Trajectory,
    tx: &Trajectory,
    ty: &Trajectory,
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
) -> Result<Trajectory> {
    let n = x.0.len();
    if [y.0.len(), tx.0.len(), ty.0.len()] != [n, n, n] {
        return Err(Error::InvalidParam(
            "delta requires trajectories on one grid".into(),
        ));
    }
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let dxy = (x.0[j] - y.0[j]).abs();
        let dxtx = (x.0[j] - tx.0[j]).abs();
        let dyty = (y.0[j] - ty.0[j]).abs();
        let dxty = (x.0[j] - ty.0[j]).abs();
        let dytx = (y.0[j] - tx.0[j]).abs();
        out.push(
            alpha * dxy
                + beta * (1.0 + dxtx) * dyty / (1.0 + dxy)
                + gamma * (dxtx + dyty)
                + delta * (dxty + dytx),
        );
    }
    Ok(Trajectory(out))
}

/// How to measure the set distance on the left side of the growth
/// hypothesis: Hausdorff distance between the value sets, or the
/// difference of the rule-selected points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetDistanceMode {
    Hausdorff,
    SelectedPoint,
}

/// Checks `|F(s,x(s)) - F(s,y(s))| <= e^{-tau} phi(Δ(x,y))` nodewise,
/// with the left side interpreted per `mode` and `Tx`, `Ty` produced by
/// the operator under `rule`. Violation records carry `(t_j, x_j)` in
/// their coordinate fields.
#[allow(clippy::too_many_arguments)]
pub fn check_h3(
    inst: &InclusionInstance,
    x: &Trajectory,
    y: &Trajectory,
    tau: f64,
    phi: &PhiFunction,
    weights: (f64, f64, f64, f64),
    mode: SetDistanceMode,
    rule: SelectionRule,
) -> Result<CertificateReport> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParam(format!("tau must be > 0, got {tau}")));
    }
    let tx = apply_inclusion_operator(inst, x, rule)?;
    let ty = apply_inclusion_operator(inst, y, rule)?;
    let dl = delta(x, y, &tx, &ty, weights.0, weights.1, weights.2, weights.3)?;
    let mut report_samples = 0usize;
    let mut violations = Vec::new();
    let mut min_margin: Option<f64> = None;
    for j in 0..=inst.n {
        let t = inst.t_nodes[j];
        let fx = inst.f_value(t, x.0[j])?;
        let fy = inst.f_value(t, y.0[j])?;
        let lhs = match mode {
            SetDistanceMode::Hausdorff => hausdorff(&fx, &fy),
            SetDistanceMode::SelectedPoint => {
                (rule.select(&fx, x.0[j]) - rule.select(&fy, y.0[j])).abs()
            }
        };
        let rhs = (-tau).exp() * phi.eval(dl.0[j]);
        report_samples += 1;
        if lhs <= rhs {
            let m = rhs - lhs;
            min_margin = Some(min_margin.map_or(m, |cur: f64| cur.min(m)));
        } else {
            violations.push(Violation {
                x: t,
                y: x.0[j],
                lhs,
                rhs,
                gap: lhs - rhs,
            });
        }
    }
    let verdict = if violations.is_empty() {
        Verdict::HoldsOnSamples
    } else {
        Verdict::Violated
    };
    Ok(CertificateReport {
        samples: report_samples,
        skipped_vacuous: 0,
        violations,
        min_margin,
        verdict,
    })
}

/// Sampled monotonicity of `F(t, ·)` (hypothesis H2): lower and upper
/// ends nondecreasing in `x`. Reported, never enforced.
#[derive(Debug, Clone)]
pub struct MonotoneReport {
    pub holds_on_samples: bool,
    /// `(t, x, x')` triples where monotonicity failed.
    pub violations: Vec<(f64, f64, f64)>,
}

pub fn check_monotone(
    inst: &InclusionInstance,
    x_lo: f64,
    x_hi: f64,
    samples: usize,
) -> Result<MonotoneReport> {
    let mut violations = Vec::new();
    let xs: Vec<f64> = (0..samples.max(2))
        .map(|i| x_lo + (x_hi - x_lo) * i as f64 / (samples.max(2) - 1) as f64)
        .collect();
    for &t in inst.t_nodes.iter().step_by((inst.n / 8).max(1)) {
        for w in xs.windows(2) {
            let a = inst.f_value(t, w[0])?;
            let b = inst.f_value(t, w[1])?;
            if b.min() < a.min() - 1e-12 || b.max() < a.max() - 1e-12 {
                violations.push((t, w[0], w[1]));
            }
        }
    }
    Ok(MonotoneReport {
        holds_on_samples: violations.is_empty(),
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_expr1, parse_expr2, parse_set_expr};

    fn instance(q: &str, k: &str, sigma: &str, f: &str, n: usize) -> InclusionInstance {
        InclusionInstance::new(
            &parse_expr1(q, "t").unwrap(),
            &parse_expr2(k, ["t", "s"]).unwrap(),
            &parse_expr1(sigma, "t").unwrap(),
            parse_set_expr(f, &["s", "x"]).unwrap(),
            n,
        )
        .unwrap()
    }

    #[test]
    fn operator_zero_fixed_point() {
        let inst = instance("0", "1", "t", "{x}", 100);
        let x = Trajectory::constant(100, 0.0);
        let u = apply_inclusion_operator(&inst, &x, SelectionRule::Midpoint).unwrap();
        assert_eq!(u.sup_norm(), 0.0);
    }

    #[test]
    fn operator_midpoint_of_unit_interval() {
        // integrand is constantly 1/2; trapezoid is exact
        let inst = instance("0", "1", "t", "[0,1]", 200);
        let x = Trajectory::constant(200, 0.7);
        let u = apply_inclusion_operator(&inst, &x, SelectionRule::Midpoint).unwrap();
        for (j, &t) in inst.t_nodes().iter().enumerate() {
            assert!((u.0[j] - 0.5 * t).abs() <= 1e-14, "t={t}");
        }
    }

    #[test]
    fn operator_constant_selection_is_exact() {
        let inst = instance("1", "1", "t", "{x}", 128);
        let x = Trajectory::constant(128, 1.0);
        let u = apply_inclusion_operator(&inst, &x, SelectionRule::NearestToCurrent).unwrap();
        for (j, &t) in inst.t_nodes().iter().enumerate() {
            assert!((u.0[j] - (1.0 + t)).abs() <= 1e-14);
        }
    }

    #[test]
    fn partial_cell_sigma_between_nodes() {
        // sigma(t) = t/2 puts the upper limit between nodes for odd j;
        // the integrand is 1 so the integral must equal t/2 exactly
        let inst = instance("0", "1", "t/2", "[1,1]", 101);
        let x = Trajectory::constant(101, 0.0);
        let u = apply_inclusion_operator(&inst, &x, SelectionRule::Midpoint).unwrap();
        for (j, &t) in inst.t_nodes().iter().enumerate() {
            assert!((u.0[j] - 0.5 * t).abs() <= 1e-12, "t={t}");
        }
    }

    #[test]
    fn selection_rules_stay_inside_the_set() {
        let inst = instance("0", "1", "t", "{x-1} | [x,x+1]", 16);
        for rule in [
            SelectionRule::NearestToCurrent,
            SelectionRule::Midpoint,
            SelectionRule::LowerEnd,
            SelectionRule::UpperEnd,
        ] {
            for xv in [-0.3, 0.0, 2.0] {
                let set = inst.f_value(0.5, xv).unwrap();
                assert!(set.contains(rule.select(&set, xv)));
            }
        }
    }

    #[test]
    fn solve_singleton_reduces_to_exponential() {
        let inst = instance("1", "1", "t", "{x}", 1000);
        let out = solve_inclusion(&inst, SelectionRule::NearestToCurrent, 1e-12, 60).unwrap();
        assert!(out.converged);
        let mut err = 0.0f64;
        for (j, &t) in inst.t_nodes().iter().enumerate() {
            err = err.max((out.x.0[j] - t.exp()).abs());
        }
        assert!(err <= 1e-5, "err = {err}");
        assert!(out.residual <= 1e-12);
    }

    #[test]
    fn grid_refinement_is_second_order() {
        let mut errs = Vec::new();
        for n in [250usize, 500, 1000] {
            let inst = instance("1", "1", "t", "{x}", n);
            let out = solve_inclusion(&inst, SelectionRule::Midpoint, 1e-13, 80).unwrap();
            let mut err = 0.0f64;
            for (j, &t) in inst.t_nodes().iter().enumerate() {
                err = err.max((out.x.0[j] - t.exp()).abs());
            }
            errs.push(err);
        }
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.5..=4.5).contains(&ratio), "ratio = {ratio}");
        }
    }

    #[test]
    fn solve_zero_multifunction_returns_q_in_one_step() {
        let inst = instance("exp(t)", "1", "t", "{0}", 64);
        let out = solve_inclusion(&inst, SelectionRule::Midpoint, 1e-12, 10).unwrap();
        assert!(out.converged);
        assert_eq!(out.iterations, 1);
        for (j, &qv) in inst.q_vals().iter().enumerate() {
            assert_eq!(out.x.0[j], qv);
        }
    }

    #[test]
    fn solve_contraction_to_zero() {
        let inst = instance("0", "1", "t", "{x/2}", 128);
        let out = solve_inclusion(&inst, SelectionRule::Midpoint, 1e-12, 60).unwrap();
        assert!(out.converged);
        assert!(out.x.sup_norm() <= 1e-11);
    }

    #[test]
    fn residual_recheck_matches() {
        let inst = instance("1", "1", "t", "{x}", 200);
        let rule = SelectionRule::Midpoint;
        let out = solve_inclusion(&inst, rule, 1e-10, 60).unwrap();
        let recomputed = apply_inclusion_operator(&inst, &out.x, rule)
            .unwrap()
            .sup_dist(&out.x);
        assert!((out.residual - recomputed).abs() <= 1e-12);
    }

    #[test]
    fn kernel_tau_values() {
        let half = instance("0", "1/2", "t", "{x}", 16);
        let kt = kernel_tau(&half);
        assert!((kt.tau - 2f64.ln()).abs() <= 1e-15);
        assert!(!kt.h0_violated);

        let ts = instance("0", "t*s", "t", "{x}", 64);
        let kt = kernel_tau(&ts);
        assert_eq!(kt.sup_k, 1.0);
        assert_eq!(kt.tau, 0.0);
        assert!(kt.h0_violated);

        let e_inv = instance("0", "exp(-1)", "t", "{x}", 16);
        let kt = kernel_tau(&e_inv);
        assert!((kt.tau - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn bracket_crude_bound_from_boundedness() {
        // M = 3 exceeds |q| + sup k * sup|F| = 2 for the bounded F
        let inst = instance("1", "1", "t", "[0,1]", 100);
        let a = Trajectory::constant(100, -3.0);
        let b = Trajectory::constant(100, 3.0);
        let r = check_bracket(&inst, &a, &b, None).unwrap();
        assert!(r.lower_holds && r.upper_holds);
    }

    #[test]
    fn bracket_upper_violation_past_two_thirds() {
        // b = 3: 3 >= 1 + 3t fails for t > 2/3
        let inst = instance("1", "1", "t", "{x}", 300);
        let a = Trajectory::constant(300, 1.0);
        let b = Trajectory::constant(300, 3.0);
        let r = check_bracket(&inst, &a, &b, None).unwrap();
        assert!(r.lower_holds);
        assert!(!r.upper_holds);
        let first_bad = inst.t_nodes()[r.upper_violations[0]];
        assert!(first_bad > 2.0 / 3.0);
        assert!(first_bad <= 2.0 / 3.0 + 0.01);
    }

    #[test]
    fn bracket_exact_solution_as_both_bounds() {
        let inst = instance("1", "1", "t", "{x}", 200);
        let out = solve_inclusion(&inst, SelectionRule::Midpoint, 1e-12, 60).unwrap();
        let r = check_bracket(&inst, &out.x, &out.x, Some(&out.x)).unwrap();
        assert!(r.lower_holds && r.upper_holds);
        assert_eq!(r.solution_within, Some(true));
    }

    #[test]
    fn delta_hand_values() {
        let n = 4;
        let x = Trajectory::constant(n, 1.0);
        let y = Trajectory::constant(n, 0.0);
        let tx = Trajectory::constant(n, 1.0);
        let ty = Trajectory::constant(n, 0.0);
        let d = delta(&x, &y, &tx, &ty, 0.125, 0.125, 0.125, 0.125).unwrap();
        for v in &d.0 {
            assert!((v - 0.375).abs() <= 1e-15);
        }
        let d = delta(&x, &y, &tx, &ty, 1.0, 0.0, 0.0, 0.0).unwrap();
        for v in &d.0 {
            assert_eq!(*v, 1.0);
        }
        // x = y = Tx = Ty makes every term vanish
        let z = Trajectory::constant(n, 0.7);
        let d = delta(&z, &z, &z, &z, 0.2, 0.2, 0.1, 0.1).unwrap();
        assert_eq!(d.sup_norm(), 0.0);
    }

    #[test]
    fn h3_holds_for_singleton_contraction() {
        // F = {x/2}: |F(x)-F(y)| = |x-y|/2 and Delta >= |x-y| with
        // alpha = 1, so e^{-tau} phi dominates for small tau
        let inst = instance("0", "1/2", "t", "{x/2}", 64);
        let phi = PhiFunction::parse("9/10*t").unwrap();
        let x = Trajectory::constant(64, 1.0);
        let y = Trajectory::constant(64, 0.0);
        for mode in [SetDistanceMode::Hausdorff, SetDistanceMode::SelectedPoint] {
            let r = check_h3(
                &inst,
                &x,
                &y,
                0.1,
                &phi,
                (1.0, 0.0, 0.0, 0.0),
                mode,
                SelectionRule::Midpoint,
            )
            .unwrap();
            assert_eq!(r.verdict, Verdict::HoldsOnSamples, "{mode:?}");
        }
    }

    #[test]
    fn monotone_check_flags_decreasing_f() {
        let inc = instance("0", "1", "t", "{x}", 32);
        assert!(check_monotone(&inc, -1.0, 1.0, 9).unwrap().holds_on_samples);
        let dec = instance("0", "1", "t", "{0-x}", 32);
        assert!(!check_monotone(&dec, -1.0, 1.0, 9).unwrap().holds_on_samples);
    }
}
