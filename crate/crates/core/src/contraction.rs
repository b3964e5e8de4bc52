//! The F- and φ-function families and sampled certification of the
//! contraction inequalities used throughout the crate.
//!
//! Certification is deliberately sample-based: a verdict of
//! `HoldsOnSamples` says the inequality held at every evaluated pair,
//! not that it holds for all points. Sample pairs whose left-hand
//! distance vanishes are vacuous and skipped (the conditions only apply
//! where that distance is positive); a pair whose right-hand argument is
//! zero while the left side is positive is unsatisfiable (F tends to
//! -inf at 0+) and is reported as a violation with `rhs = -inf`.

use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{parse_expr1, Expr, ExprDisplay};
use crate::piecewise::{PiecewiseMap, PiecewiseSetMap};
use crate::set::{hausdorff, point_set_distance, ClosedSet};

/// Log-spaced probe grid on `[1e-9, 1e9]` used by the numeric axiom
/// checks for F and φ.
fn log_grid(n: usize) -> Vec<f64> {
    (0..=n)
        .map(|i| 10f64.powf(-9.0 + 18.0 * (i as f64) / (n as f64)))
        .collect()
}

/// Member of the family 𝓕: continuous, strictly increasing, diverging
/// to -inf at 0+, with `t^k F(t) -> 0` for the stored `k ∈ (0,1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FFunction {
    kind: FKind,
    k: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum FKind {
    Log,
    LogLinear,
    NegInvSqrt,
    Custom(Expr),
}

impl FFunction {
    /// `F(t) = ln t`; any `k` in (0,1) works, 1/2 is stored.
    pub fn log() -> Self {
        FFunction {
            kind: FKind::Log,
            k: 0.5,
        }
    }

    /// `F(t) = t + ln t` with `k = 1/2`.
    pub fn log_linear() -> Self {
        FFunction {
            kind: FKind::LogLinear,
            k: 0.5,
        }
    }

    /// `F(t) = -1/sqrt(t)`; needs `k > 1/2`, 3/4 is stored.
    pub fn neg_inv_sqrt() -> Self {
        FFunction {
            kind: FKind::NegInvSqrt,
            k: 0.75,
        }
    }

    /// A custom F given as an expression in `t`, validated numerically
    /// against the family axioms with the claimed `k`.
    pub fn custom(text: &str, k: f64) -> Result<Self> {
        if !(k > 0.0 && k < 1.0) {
            return Err(Error::InvalidParam(format!("k must lie in (0,1), got {k}")));
        }
        let f = FFunction {
            kind: FKind::Custom(parse_expr1(text, "t")?),
            k,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn parse_named(name: &str) -> Result<Self> {
        match name {
            "log" => Ok(Self::log()),
            "log-linear" => Ok(Self::log_linear()),
            "neg-inv-sqrt" => Ok(Self::neg_inv_sqrt()),
            other => Err(Error::InvalidParam(format!(
                "unknown F variant '{other}' (expected log | log-linear | neg-inv-sqrt)"
            ))),
        }
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn name(&self) -> String {
        match &self.kind {
            FKind::Log => "log".into(),
            FKind::LogLinear => "log-linear".into(),
            FKind::NegInvSqrt => "neg-inv-sqrt".into(),
            FKind::Custom(e) => ExprDisplay {
                expr: e,
                vars: &["t"],
            }
            .to_string(),
        }
    }

    /// Evaluates F at `t > 0`.
    pub fn eval(&self, t: f64) -> f64 {
        match &self.kind {
            FKind::Log => t.ln(),
            FKind::LogLinear => t + t.ln(),
            FKind::NegInvSqrt => -1.0 / t.sqrt(),
            FKind::Custom(e) => e.eval(&[t]),
        }
    }

    /// Numeric check of the family axioms: strict monotonicity on a
    /// log-spaced grid, divergence at 0+ (`F(2^-40) < -20`) and the
    /// `t^k F(t) -> 0` decay (`|beta^k F(beta)| < 1e-3` at `beta = 2^-40`).
    pub fn validate(&self) -> Result<()> {
        let grid = log_grid(1000);
        let mut prev = f64::NEG_INFINITY;
        for &t in &grid {
            let v = self.eval(t);
            if !v.is_finite() {
                return Err(Error::Validation(format!("F({t}) = {v} is not finite")));
            }
            if v <= prev {
                return Err(Error::Validation(format!(
                    "F is not strictly increasing near t = {t}"
                )));
            }
            prev = v;
        }
        let beta = 2f64.powi(-40);
        if !(self.eval(beta) < -20.0) {
            return Err(Error::Validation(format!(
                "F(2^-40) = {} does not diverge toward -inf",
                self.eval(beta)
            )));
        }
        let decay = beta.powf(self.k) * self.eval(beta);
        if !(decay.abs() < 1e-3) {
            return Err(Error::Validation(format!(
                "beta^k F(beta) = {decay} at beta = 2^-40 exceeds 1e-3 for k = {}",
                self.k
            )));
        }
        Ok(())
    }
}

/// Member of the family Φ: `φ : [0,∞) → [0,∞)` with `φ(t) < t` for all
/// `t > 0`, nondecreasing on samples. The remaining textbook property
/// (upper semicontinuity from the right) is not numerically testable
/// and is left unchecked.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiFunction {
    expr: Expr,
}

impl PhiFunction {
    pub fn parse(text: &str) -> Result<Self> {
        let phi = PhiFunction {
            expr: parse_expr1(text, "t")?,
        };
        phi.validate()?;
        Ok(phi)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.expr.eval(&[t])
    }

    pub fn text(&self) -> String {
        ExprDisplay {
            expr: &self.expr,
            vars: &["t"],
        }
        .to_string()
    }

    pub fn validate(&self) -> Result<()> {
        let v0 = self.eval(0.0);
        if !v0.is_finite() || v0 < 0.0 {
            return Err(Error::Validation(format!(
                "phi(0) = {v0} must be finite and >= 0"
            )));
        }
        let mut prev = v0;
        for &t in &log_grid(1000) {
            let v = self.eval(t);
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Validation(format!("phi({t}) = {v} leaves [0,inf)")));
            }
            if !(v < t) {
                return Err(Error::Validation(format!("phi({t}) = {v} is not < t")));
            }
            if v < prev - 1e-12 {
                return Err(Error::Validation(format!("phi is decreasing near t = {t}")));
            }
            prev = v;
        }
        Ok(())
    }
}

/// Which contraction inequality to certify.
#[derive(Debug, Clone)]
pub enum ConditionSpec {
    /// `H(Tx,Ty) <= lambda d(x,y)` with `lambda ∈ [0,1)`.
    Nadler { lambda: f64 },
    /// `tau + F(d(Tx,Ty)) <= F(d(x,y))` for singleton-valued T.
    Wardowski { f: FFunction, tau: f64 },
    /// `tau + F(d(y,z)) <= F(M(x,y))` for `y ∈ Tx`, `z` the metric
    /// projection of `y` onto `Ty`.
    Sgroi { f: FFunction, tau: f64 },
    /// `tau + F(H^p(Tx,Ty)) <= F(phi(max-term))` over the seven-term max.
    Generalized {
        f: FFunction,
        phi: PhiFunction,
        tau: f64,
        p: f64,
    },
    /// Rational Hardy-Rogers right-hand side with weights
    /// `alpha + beta + 2 gamma + 2 delta <= 1`.
    HardyRogers {
        f: FFunction,
        phi: PhiFunction,
        tau: f64,
        p: f64,
        alpha: f64,
        beta: f64,
        gamma: f64,
        delta: f64,
    },
}

impl ConditionSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ConditionSpec::Nadler { lambda } => {
                if !(*lambda >= 0.0 && *lambda < 1.0) {
                    return Err(Error::InvalidParam(format!(
                        "lambda must lie in [0,1), got {lambda}"
                    )));
                }
            }
            ConditionSpec::Wardowski { tau, .. } | ConditionSpec::Sgroi { tau, .. } => {
                if !(*tau > 0.0) {
                    return Err(Error::InvalidParam(format!("tau must be > 0, got {tau}")));
                }
            }
            ConditionSpec::Generalized { tau, p, .. } => {
                if !(*tau > 0.0) {
                    return Err(Error::InvalidParam(format!("tau must be > 0, got {tau}")));
                }
                if !(*p >= 1.0) {
                    return Err(Error::InvalidParam(format!("p must be >= 1, got {p}")));
                }
            }
            ConditionSpec::HardyRogers {
                tau,
                p,
                alpha,
                beta,
                gamma,
                delta,
                ..
            } => {
                if !(*tau > 0.0) {
                    return Err(Error::InvalidParam(format!("tau must be > 0, got {tau}")));
                }
                if !(*p >= 1.0) {
                    return Err(Error::InvalidParam(format!("p must be >= 1, got {p}")));
                }
                check_hardy_weights(*alpha, *beta, *gamma, *delta)?;
            }
        }
        Ok(())
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ConditionSpec::Nadler { .. } => "nadler",
            ConditionSpec::Wardowski { .. } => "wardowski",
            ConditionSpec::Sgroi { .. } => "sgroi",
            ConditionSpec::Generalized { .. } => "generalized",
            ConditionSpec::HardyRogers { .. } => "hardy-rogers",
        }
    }
}

fn check_hardy_weights(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<()> {
    if alpha < 0.0 || beta < 0.0 || gamma < 0.0 || delta < 0.0 {
        return Err(Error::InvalidParam(
            "hardy-rogers weights must be nonnegative".into(),
        ));
    }
    let s = alpha + beta + 2.0 * gamma + 2.0 * delta;
    if s > 1.0 {
        return Err(Error::InvalidParam(format!(
            "alpha + beta + 2 gamma + 2 delta = {s} exceeds 1"
        )));
    }
    Ok(())
}

/// One failed sample of a certified inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub x: f64,
    pub y: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    HoldsOnSamples,
    Violated,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::HoldsOnSamples => "holds-on-samples",
            Verdict::Violated => "violated",
        })
    }
}

/// Outcome of sampling a contraction inequality.
#[derive(Debug, Clone)]
pub struct CertificateReport {
    /// Number of compared (non-vacuous) samples.
    pub samples: usize,
    /// Pairs skipped because the left-hand distance was zero.
    pub skipped_vacuous: usize,
    pub violations: Vec<Violation>,
    /// Minimum of `rhs - lhs` over the holding samples.
    pub min_margin: Option<f64>,
    pub verdict: Verdict,
}

impl CertificateReport {
    fn new() -> Self {
        CertificateReport {
            samples: 0,
            skipped_vacuous: 0,
            violations: Vec::new(),
            min_margin: None,
            verdict: Verdict::HoldsOnSamples,
        }
    }

    pub(crate) fn record(&mut self, x: f64, y: f64, lhs: f64, rhs: f64) {
        self.samples += 1;
        if lhs <= rhs {
            let margin = rhs - lhs;
            self.min_margin = Some(match self.min_margin {
                Some(m) => m.min(margin),
                None => margin,
            });
        } else {
            self.violations.push(Violation {
                x,
                y,
                lhs,
                rhs,
                gap: lhs - rhs,
            });
        }
    }

    pub(crate) fn finish(mut self) -> Result<Self> {
        if self.samples == 0 {
            return Err(Error::EmptySampleSet);
        }
        self.verdict = if self.violations.is_empty() {
            Verdict::HoldsOnSamples
        } else {
            Verdict::Violated
        };
        Ok(self)
    }
}

/// Sampling request for `certify`: a uniform grid of about `points`
/// nodes over the domain, plus every piece breakpoint of the maps and
/// the points `breakpoint ± 1e-9` (violations concentrate at
/// discontinuities).
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub points: usize,
}

fn sample_points(domain: &ClosedSet, spec: &GridSpec, breakpoints: &[f64]) -> Vec<f64> {
    let mut pts = domain.sample_grid(spec.points);
    for &b in breakpoints {
        for c in [b - 1e-9, b, b + 1e-9] {
            if domain.contains(c) {
                pts.push(c);
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn powp(v: f64, p: f64) -> f64 {
    if p == 1.0 {
        v
    } else {
        v.powf(p)
    }
}

/// The seven-term maximum on the right-hand side of the generalized
/// (F,φ)-contraction: distances are taken between the f-images and the
/// T-images of the pair, each raised to `p`.
pub fn generalized_max_term(
    x: f64,
    y: f64,
    f: &PiecewiseMap,
    t: &PiecewiseSetMap,
    p: f64,
) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParam(format!("p must be >= 1, got {p}")));
    }
    let fx = f.eval(x)?;
    let fy = f.eval(y)?;
    let tx = t.eval(x)?;
    let ty = t.eval(y)?;
    Ok(max_term_parts(fx, fy, &tx, &ty, p))
}

fn max_term_parts(fx: f64, fy: f64, tx: &ClosedSet, ty: &ClosedSet, p: f64) -> f64 {
    let d_fx_tx = powp(point_set_distance(fx, tx), p);
    let d_fy_ty = powp(point_set_distance(fy, ty), p);
    let d_fy_fx = powp((fy - fx).abs(), p);
    let d_fx_ty = powp(point_set_distance(fx, ty), p);
    let d_fy_tx = powp(point_set_distance(fy, tx), p);
    let h_tx_ty = powp(hausdorff(tx, ty), p);
    let terms = [
        d_fx_tx,
        d_fy_ty,
        d_fy_fx,
        0.5 * (d_fx_ty + d_fy_tx),
        d_fx_tx * d_fy_ty / (1.0 + d_fy_fx),
        d_fx_ty * d_fy_tx / (1.0 + d_fy_fx),
        d_fx_ty * d_fy_tx / (1.0 + h_tx_ty),
    ];
    terms.into_iter().fold(0.0, f64::max)
}

/// The Rational Hardy-Rogers right-hand argument
/// `alpha d^p(fx,fy) + beta [1+d^p(fx,Tx)] d^p(fy,Ty) / (1+d^p(fx,fy))
///  + gamma [d^p(fx,Tx)+d^p(fy,Ty)] + delta [d^p(fx,Ty)+d^p(fy,Tx)]`.
#[allow(clippy::too_many_arguments)]
pub fn hardy_rogers_rhs_arg(
    x: f64,
    y: f64,
    f: &PiecewiseMap,
    t: &PiecewiseSetMap,
    p: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParam(format!("p must be >= 1, got {p}")));
    }
    check_hardy_weights(alpha, beta, gamma, delta)?;
    let fx = f.eval(x)?;
    let fy = f.eval(y)?;
    let tx = t.eval(x)?;
    let ty = t.eval(y)?;
    Ok(hardy_parts(fx, fy, &tx, &ty, p, alpha, beta, gamma, delta))
}

#[allow(clippy::too_many_arguments)]
fn hardy_parts(
    fx: f64,
    fy: f64,
    tx: &ClosedSet,
    ty: &ClosedSet,
    p: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
) -> f64 {
    let d_fx_fy = powp((fx - fy).abs(), p);
    let d_fx_tx = powp(point_set_distance(fx, tx), p);
    let d_fy_ty = powp(point_set_distance(fy, ty), p);
    let d_fx_ty = powp(point_set_distance(fx, ty), p);
    let d_fy_tx = powp(point_set_distance(fy, tx), p);
    alpha * d_fx_fy
        + beta * (1.0 + d_fx_tx) * d_fy_ty / (1.0 + d_fx_fy)
        + gamma * (d_fx_tx + d_fy_ty)
        + delta * (d_fx_ty + d_fy_tx)
}

/// `M(x,y) = max{ d(x,y), d(x,Tx), d(y,Ty), [d(x,Ty)+d(y,Tx)]/2 }`.
pub fn sgroi_m(x: f64, y: f64, t: &PiecewiseSetMap) -> Result<f64> {
    let tx = t.eval(x)?;
    let ty = t.eval(y)?;
    let terms = [
        (x - y).abs(),
        point_set_distance(x, &tx),
        point_set_distance(y, &ty),
        0.5 * (point_set_distance(x, &ty) + point_set_distance(y, &tx)),
    ];
    Ok(terms.into_iter().fold(0.0, f64::max))
}

/// The four quantities of the side-by-side comparison at a pair (x,y):
/// `H(Tx,Ty)`, `d(fx,fy)`, `[d(fx,Tx)+d(fy,Ty)]/2`, `[d(fx,Ty)+d(fy,Tx)]/2`,
/// plus the max of the last three so the caller can see when `H`
/// exceeds every candidate right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct KadelburgReport {
    pub hausdorff: f64,
    pub d_fx_fy: f64,
    pub half_own: f64,
    pub half_cross: f64,
    pub rhs_max: f64,
}

pub fn kadelburg_comparison(
    f: &PiecewiseMap,
    t: &PiecewiseSetMap,
    x: f64,
    y: f64,
) -> Result<KadelburgReport> {
    let fx = f.eval(x)?;
    let fy = f.eval(y)?;
    let tx = t.eval(x)?;
    let ty = t.eval(y)?;
    let h = hausdorff(&tx, &ty);
    let d_fx_fy = (fx - fy).abs();
    let half_own = 0.5 * (point_set_distance(fx, &tx) + point_set_distance(fy, &ty));
    let half_cross = 0.5 * (point_set_distance(fx, &ty) + point_set_distance(fy, &tx));
    Ok(KadelburgReport {
        hausdorff: h,
        d_fx_fy,
        half_own,
        half_cross,
        rhs_max: d_fx_fy.max(half_own).max(half_cross),
    })
}

/// Certifies `cond` for the pair `(f, T)` over sampled points of the
/// common domain. Iteration order is the sorted sample grid (row-major
/// over ordered pairs), so reports are deterministic.
pub fn certify(
    cond: &ConditionSpec,
    f: &PiecewiseMap,
    t: &PiecewiseSetMap,
    grid: &GridSpec,
) -> Result<CertificateReport> {
    cond.validate()?;
    if f.domain() != t.domain() {
        return Err(Error::DomainMismatch);
    }
    let mut bps = f.breakpoints();
    bps.extend(t.breakpoints());
    let pts = sample_points(t.domain(), grid, &bps);
    let mut report = CertificateReport::new();

    match cond {
        ConditionSpec::Nadler { lambda } => {
            let values: Vec<ClosedSet> = pts.iter().map(|&x| t.eval(x)).collect::<Result<_>>()?;
            for (i, &x) in pts.iter().enumerate() {
                for (j, &y) in pts.iter().enumerate() {
                    let h = hausdorff(&values[i], &values[j]);
                    if h == 0.0 {
                        report.skipped_vacuous += 1;
                        continue;
                    }
                    report.record(x, y, h, lambda * (x - y).abs());
                }
            }
        }
        ConditionSpec::Wardowski { f: ff, tau } => {
            let mut values = Vec::with_capacity(pts.len());
            for &x in &pts {
                let v = t.eval(x)?;
                match v.finite_points().as_deref() {
                    Some([single]) => values.push(*single),
                    _ => return Err(Error::NotSingleValued("wardowski certification")),
                }
            }
            for (i, &x) in pts.iter().enumerate() {
                for (j, &y) in pts.iter().enumerate() {
                    let d = (values[i] - values[j]).abs();
                    if d == 0.0 {
                        report.skipped_vacuous += 1;
                        continue;
                    }
                    // d(Tx,Ty) > 0 forces x != y, so F(d(x,y)) is defined
                    report.record(x, y, tau + ff.eval(d), ff.eval((x - y).abs()));
                }
            }
        }
        ConditionSpec::Sgroi { f: ff, tau } => {
            for &x in &pts {
                let tx = t.eval(x)?;
                for y in tx.endpoints() {
                    let ty = t.eval(y)?;
                    let z = ty.project(y);
                    let d = (y - z).abs();
                    if d == 0.0 {
                        report.skipped_vacuous += 1;
                        continue;
                    }
                    let m = sgroi_m(x, y, t)?;
                    let lhs = tau + ff.eval(d);
                    if m <= 0.0 {
                        report.samples += 1;
                        report.violations.push(Violation {
                            x,
                            y,
                            lhs,
                            rhs: f64::NEG_INFINITY,
                            gap: f64::INFINITY,
                        });
                        continue;
                    }
                    report.record(x, y, lhs, ff.eval(m));
                }
            }
        }
        ConditionSpec::Generalized { f: ff, phi, tau, p } => {
            let fvals: Vec<f64> = pts.iter().map(|&x| f.eval(x)).collect::<Result<_>>()?;
            let tvals: Vec<ClosedSet> = pts.iter().map(|&x| t.eval(x)).collect::<Result<_>>()?;
            for (i, &x) in pts.iter().enumerate() {
                for (j, &y) in pts.iter().enumerate() {
                    let h = hausdorff(&tvals[i], &tvals[j]);
                    if h == 0.0 {
                        report.skipped_vacuous += 1;
                        continue;
                    }
                    let lhs = tau + ff.eval(powp(h, *p));
                    let arg =
                        phi.eval(max_term_parts(fvals[i], fvals[j], &tvals[i], &tvals[j], *p));
                    if arg <= 0.0 {
                        report.samples += 1;
                        report.violations.push(Violation {
                            x,
                            y,
                            lhs,
                            rhs: f64::NEG_INFINITY,
                            gap: f64::INFINITY,
                        });
                        continue;
                    }
                    report.record(x, y, lhs, ff.eval(arg));
                }
            }
        }
        ConditionSpec::HardyRogers {
            f: ff,
            phi,
            tau,
            p,
            alpha,
            beta,
            gamma,
            delta,
        } => {
            let fvals: Vec<f64> = pts.iter().map(|&x| f.eval(x)).collect::<Result<_>>()?;
            let tvals: Vec<ClosedSet> = pts.iter().map(|&x| t.eval(x)).collect::<Result<_>>()?;
            for (i, &x) in pts.iter().enumerate() {
                for (j, &y) in pts.iter().enumerate() {
                    let h = hausdorff(&tvals[i], &tvals[j]);
                    if h == 0.0 {
                        report.skipped_vacuous += 1;
                        continue;
                    }
                    let lhs = tau + ff.eval(powp(h, *p));
                    let arg = phi.eval(hardy_parts(
                        fvals[i], fvals[j], &tvals[i], &tvals[j], *p, *alpha, *beta, *gamma, *delta,
                    ));
                    if arg <= 0.0 {
                        report.samples += 1;
                        report.violations.push(Violation {
                            x,
                            y,
                            lhs,
                            rhs: f64::NEG_INFINITY,
                            gap: f64::INFINITY,
                        });
                        continue;
                    }
                    report.record(x, y, lhs, ff.eval(arg));
                }
            }
        }
    }
    report.finish()
}
