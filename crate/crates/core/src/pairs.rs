//! Hybrid-pair taxonomy: coincidence and common fixed points,
//! idempotency at coincidence points, the commuting family (finite
//! spaces only) and the limit-range properties (E.A) / CLR_f.
//!
//! The sequence-based definitions are decided through one-sided limit
//! analysis: on an interval space a witness sequence `x_n → x0` from one
//! side of a piece breakpoint realizes `lim f x_n` and `lim T x_n`
//! exactly, so the candidate witnesses are the breakpoints of `f` and
//! `T` with their left/at/right limits. On a finite space constant
//! sequences are the only convergent ones and both properties collapse
//! to "the coincidence set is non-empty".

use std::fmt;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::piecewise::{CondInterval, PiecewiseMap, PiecewiseSetMap, Side};
use crate::set::{hausdorff, point_set_distance, ClosedSet};

/// Membership tolerance for computed (floating-point) limits and
/// coincidence defects.
pub const COINCIDENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    Finite,
    Interval,
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpaceKind::Finite => "finite",
            SpaceKind::Interval => "interval",
        })
    }
}

/// A single-valued map and a multi-valued map on one domain.
#[derive(Debug, Clone)]
pub struct HybridPair {
    pub f: PiecewiseMap,
    pub t: PiecewiseSetMap,
    kind: SpaceKind,
}

impl HybridPair {
    /// Builds a pair after checking the two domains agree and that, on a
    /// probe grid with breakpoints, `f` maps into the domain and `T`
    /// into its closed subsets.
    pub fn new(f: PiecewiseMap, t: PiecewiseSetMap) -> Result<Self> {
        if f.domain() != t.domain() {
            return Err(Error::DomainMismatch);
        }
        let domain = f.domain().clone();
        let kind = if domain.is_finite_points() {
            SpaceKind::Finite
        } else {
            SpaceKind::Interval
        };
        let mut probes = domain.sample_grid(257);
        probes.extend(f.breakpoints());
        probes.extend(t.breakpoints());
        for &x in &probes {
            let fx = f.eval(x)?;
            if !domain.contains_with_tol(fx, COINCIDENCE_TOL) {
                return Err(Error::Validation(format!(
                    "f({x}) = {fx} leaves the domain"
                )));
            }
            let tx = t.eval(x)?;
            if !domain.contains_set(&tx, COINCIDENCE_TOL) {
                return Err(Error::Validation(format!(
                    "T({x}) = {tx} is not a subset of the domain"
                )));
            }
        }
        Ok(HybridPair { f, t, kind })
    }

    pub fn domain(&self) -> &ClosedSet {
        self.f.domain()
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    /// Breakpoints of both maps (condition endpoints), deduplicated.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut bps = self.f.breakpoints();
        bps.extend(self.t.breakpoints());
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        bps
    }

    /// Candidate points where the coincidence defect `d(fx, Tx)`
    /// vanishes: exact enumeration on finite spaces, a grid of spacing
    /// at most `resolution` plus breakpoints otherwise.
    fn coincidence_candidates(&self, resolution: f64) -> Result<Vec<f64>> {
        let pts = match self.kind {
            SpaceKind::Finite => self.domain().sample_grid(0),
            SpaceKind::Interval => {
                if !(resolution > 0.0) {
                    return Err(Error::InvalidParam(format!(
                        "resolution must be > 0, got {resolution}"
                    )));
                }
                let n = (self.domain().total_len() / resolution).ceil() as usize + 1;
                let mut pts = self.domain().sample_grid(n);
                pts.extend(self.breakpoints());
                pts.sort_by(f64::total_cmp);
                pts.dedup();
                pts
            }
        };
        let mut hits = Vec::new();
        for &x in &pts {
            let fx = self.f.eval(x)?;
            let tx = self.t.eval(x)?;
            let hit = match self.kind {
                SpaceKind::Finite => tx.contains(fx),
                SpaceKind::Interval => point_set_distance(fx, &tx) <= COINCIDENCE_TOL,
            };
            if hit {
                hits.push(x);
            }
        }
        Ok(hits)
    }
}

fn merge_hits(hits: &[f64], resolution: f64) -> Option<ClosedSet> {
    if hits.is_empty() {
        return None;
    }
    let gap = resolution * 1.000001;
    let mut raw = Vec::new();
    let mut start = hits[0];
    let mut prev = hits[0];
    for &h in &hits[1..] {
        if h - prev <= gap {
            prev = h;
        } else {
            raw.push((start, prev));
            start = h;
            prev = h;
        }
    }
    raw.push((start, prev));
    Some(ClosedSet::from_intervals(raw).expect("hit runs are valid intervals"))
}

/// `𝒞(f,T) = { x : fx ∈ Tx }`. Exact on finite spaces; on interval
/// spaces, grid points with vanishing defect merged into intervals at
/// the given resolution. `None` when empty.
pub fn coincidence_points(pair: &HybridPair, resolution: f64) -> Result<Option<ClosedSet>> {
    let hits = pair.coincidence_candidates(resolution)?;
    match pair.kind {
        SpaceKind::Finite => {
            if hits.is_empty() {
                Ok(None)
            } else {
                Ok(Some(ClosedSet::points(&hits)?))
            }
        }
        SpaceKind::Interval => Ok(merge_hits(&hits, resolution)),
    }
}

/// `F(f,T) = { x : x = fx ∈ Tx }`.
pub fn common_fixed_points(pair: &HybridPair, resolution: f64) -> Result<Option<ClosedSet>> {
    let hits = pair.coincidence_candidates(resolution)?;
    let mut fixed = Vec::new();
    for &x in &hits {
        let fx = pair.f.eval(x)?;
        let ok = match pair.kind {
            SpaceKind::Finite => fx == x,
            SpaceKind::Interval => (fx - x).abs() <= COINCIDENCE_TOL,
        };
        if ok {
            fixed.push(x);
        }
    }
    match pair.kind {
        SpaceKind::Finite => {
            if fixed.is_empty() {
                Ok(None)
            } else {
                Ok(Some(ClosedSet::points(&fixed)?))
            }
        }
        SpaceKind::Interval => Ok(merge_hits(&fixed, resolution)),
    }
}

/// Idempotency of `f` at the computed coincidence points:
/// `coincidentally` requires `ffv = fv` at all of them (vacuously true
/// when there are none), `occasionally` at some.
#[derive(Debug, Clone, PartialEq)]
pub struct IdempotencyReport {
    pub coincidentally: bool,
    pub coincidentally_counterexample: Option<f64>,
    pub occasionally: bool,
    pub occasionally_witness: Option<f64>,
}

pub fn check_idempotency(pair: &HybridPair, resolution: f64) -> Result<IdempotencyReport> {
    let candidates = pair.coincidence_candidates(resolution)?;
    let mut report = IdempotencyReport {
        coincidentally: true,
        coincidentally_counterexample: None,
        occasionally: false,
        occasionally_witness: None,
    };
    for &v in &candidates {
        let fv = pair.f.eval(v)?;
        let ffv = pair.f.eval(fv)?;
        let idempotent = match pair.kind {
            SpaceKind::Finite => ffv == fv,
            SpaceKind::Interval => (ffv - fv).abs() <= COINCIDENCE_TOL,
        };
        if idempotent {
            if !report.occasionally {
                report.occasionally = true;
                report.occasionally_witness = Some(v);
            }
        } else if report.coincidentally {
            report.coincidentally = false;
            report.coincidentally_counterexample = Some(v);
        }
    }
    Ok(report)
}

/// Commuting / weakly commuting / weakly compatible flags with
/// counterexamples. Decidable only on finite spaces, where the image of
/// a set through `f` is computed exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutingReport {
    pub commuting: bool,
    pub commuting_counterexample: Option<f64>,
    pub weakly_commuting: bool,
    pub weakly_commuting_counterexample: Option<f64>,
    pub weakly_compatible: bool,
    pub weakly_compatible_counterexample: Option<f64>,
}

pub fn check_commuting(pair: &HybridPair) -> Result<CommutingReport> {
    if pair.kind != SpaceKind::Finite {
        return Err(Error::FiniteSpaceOnly("check_commuting"));
    }
    let points = pair.domain().sample_grid(0);
    let image = |set: &ClosedSet| -> Result<ClosedSet> {
        let pts = set
            .finite_points()
            .expect("finite-space T values are point sets");
        let mapped: Vec<f64> = pts.iter().map(|&a| pair.f.eval(a)).collect::<Result<_>>()?;
        ClosedSet::points(&mapped)
    };

    let mut report = CommutingReport {
        commuting: true,
        commuting_counterexample: None,
        weakly_commuting: true,
        weakly_commuting_counterexample: None,
        weakly_compatible: true,
        weakly_compatible_counterexample: None,
    };
    for &x in &points {
        let fx = pair.f.eval(x)?;
        let tx = pair.t.eval(x)?;
        let f_tx = image(&tx)?;
        let t_fx = pair.t.eval(fx)?;
        if report.commuting && !t_fx.contains_set(&f_tx, 0.0) {
            report.commuting = false;
            report.commuting_counterexample = Some(x);
        }
        if report.weakly_commuting && hausdorff(&f_tx, &t_fx) > point_set_distance(fx, &tx) {
            report.weakly_commuting = false;
            report.weakly_commuting_counterexample = Some(x);
        }
        let coincident = tx.contains(fx);
        if report.weakly_compatible && coincident && f_tx != t_fx {
            report.weakly_compatible = false;
            report.weakly_compatible_counterexample = Some(x);
        }
    }
    Ok(report)
}

/// An (E.A)-style witness: approaching `x0` from `side`, `f` tends to
/// `t` and `T` tends to `limit_set`, with `t ∈ limit_set`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitWitness {
    pub x0: f64,
    pub side: Side,
    pub t: f64,
    pub limit_set: ClosedSet,
}

/// A CLR witness additionally carries `u` with `f(u) = t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClrWitness {
    pub x0: f64,
    pub side: Side,
    pub t: f64,
    pub limit_set: ClosedSet,
    pub u: f64,
}

/// Closed/half-open interval of the range computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlaggedInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl FlaggedInterval {
    fn contains_tol(&self, x: f64, tol: f64) -> bool {
        let lo_ok = if self.lo_closed {
            x >= self.lo - tol
        } else {
            x > self.lo + tol
        };
        let hi_ok = if self.hi_closed {
            x <= self.hi + tol
        } else {
            x < self.hi - tol
        };
        lo_ok && hi_ok
    }
}

impl fmt::Display for FlaggedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            return write!(f, "{{{}}}", self.lo);
        }
        write!(
            f,
            "{}{},{}{}",
            if self.lo_closed { "[" } else { "(" },
            self.lo,
            self.hi,
            if self.hi_closed { "]" } else { ")" }
        )
    }
}

/// Range of `f` as a union of flagged intervals, with a closedness flag.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeInfo {
    pub intervals: Vec<FlaggedInterval>,
    pub closed: bool,
    /// True when some piece was not monotone on samples and its image
    /// was approximated by fine sampling.
    pub approximate: bool,
}

impl RangeInfo {
    pub fn contains(&self, x: f64, tol: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains_tol(x, tol))
    }
}

impl fmt::Display for RangeInfo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, iv) in self.intervals.iter().enumerate() {
            if i > 0 {
                write!(f, "|")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}

fn piece_image(cond: &CondInterval, expr: &Expr) -> (FlaggedInterval, bool) {
    let v_lo = expr.eval(&[cond.lo]);
    let v_hi = expr.eval(&[cond.hi]);
    // sampled monotonicity of the piece expression
    let samples = 33;
    let mut nondecreasing = true;
    let mut nonincreasing = true;
    let mut prev = v_lo;
    for i in 1..=samples {
        let x = cond.lo + (cond.hi - cond.lo) * (i as f64) / (samples as f64);
        let v = expr.eval(&[x]);
        if v < prev - 1e-12 {
            nondecreasing = false;
        }
        if v > prev + 1e-12 {
            nonincreasing = false;
        }
        prev = v;
    }
    if v_lo == v_hi && nondecreasing && nonincreasing {
        return (
            FlaggedInterval {
                lo: v_lo,
                hi: v_lo,
                lo_closed: true,
                hi_closed: true,
            },
            false,
        );
    }
    if nondecreasing {
        (
            FlaggedInterval {
                lo: v_lo,
                hi: v_hi,
                lo_closed: cond.lo_closed,
                hi_closed: cond.hi_closed,
            },
            false,
        )
    } else if nonincreasing {
        (
            FlaggedInterval {
                lo: v_hi,
                hi: v_lo,
                lo_closed: cond.hi_closed,
                hi_closed: cond.lo_closed,
            },
            false,
        )
    } else {
        // non-monotone piece: fall back to a fine scan, reported closed
        let fine = 2000;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..=fine {
            let x = cond.lo + (cond.hi - cond.lo) * (i as f64) / (fine as f64);
            let v = expr.eval(&[x]);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (
            FlaggedInterval {
                lo,
                hi,
                lo_closed: true,
                hi_closed: true,
            },
            true,
        )
    }
}

fn normalize_flagged(mut items: Vec<FlaggedInterval>) -> Vec<FlaggedInterval> {
    items.sort_by(|a, b| {
        a.lo.total_cmp(&b.lo)
            .then_with(|| b.lo_closed.cmp(&a.lo_closed))
            .then(a.hi.total_cmp(&b.hi))
    });
    let mut out: Vec<FlaggedInterval> = Vec::new();
    for it in items {
        match out.last_mut() {
            Some(last)
                if it.lo < last.hi
                    || (it.lo == last.hi && (last.hi_closed || it.lo_closed))
                    || (it.lo == last.lo) =>
            {
                if it.lo == last.lo {
                    last.lo_closed |= it.lo_closed;
                }
                if it.hi > last.hi {
                    last.hi = it.hi;
                    last.hi_closed = it.hi_closed;
                } else if it.hi == last.hi {
                    last.hi_closed |= it.hi_closed;
                }
            }
            _ => out.push(it),
        }
    }
    out
}

/// Computes the range of `f` piece by piece (exact for monotone pieces,
/// sampled otherwise) and reports whether it is a closed set.
pub fn range_of(f: &PiecewiseMap) -> RangeInfo {
    let mut items = Vec::new();
    let mut approximate = false;
    for (cond, expr) in f.pieces() {
        let (iv, approx) = piece_image(cond, expr);
        approximate |= approx;
        items.push(iv);
    }
    let intervals = normalize_flagged(items);
    let closed = intervals.iter().all(|iv| iv.lo_closed && iv.hi_closed);
    RangeInfo {
        intervals,
        closed,
        approximate,
    }
}

/// Finds `u` with `f(u) = target` (within 1e-12 for monotone pieces) by
/// scanning pieces whose image attains the target.
fn find_preimage(f: &PiecewiseMap, target: f64) -> Option<f64> {
    for (cond, expr) in f.pieces() {
        let (image, approx) = piece_image(cond, expr);
        if !image.contains_tol(target, COINCIDENCE_TOL) {
            continue;
        }
        let v_lo = expr.eval(&[cond.lo]);
        let v_hi = expr.eval(&[cond.hi]);
        if (v_lo - target).abs() <= COINCIDENCE_TOL && cond.lo_closed {
            return Some(cond.lo);
        }
        if (v_hi - target).abs() <= COINCIDENCE_TOL && cond.hi_closed {
            return Some(cond.hi);
        }
        if !approx && (v_lo - target).signum() != (v_hi - target).signum() {
            // monotone and continuous across the target: bisect
            let (mut a, mut b) = (cond.lo, cond.hi);
            let fa = v_lo - target;
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let fm = expr.eval(&[m]) - target;
                if fm == 0.0 {
                    return Some(m);
                }
                if (fm > 0.0) == (fa > 0.0) {
                    a = m;
                } else {
                    b = m;
                }
            }
            return Some(0.5 * (a + b));
        }
        // sampled fallback
        let fine = 4000;
        let mut best = cond.lo;
        let mut best_err = f64::INFINITY;
        for i in 0..=fine {
            let x = cond.lo + (cond.hi - cond.lo) * (i as f64) / (fine as f64);
            let err = (expr.eval(&[x]) - target).abs();
            if err < best_err {
                best_err = err;
                best = x;
            }
        }
        if best_err <= COINCIDENCE_TOL {
            return Some(best);
        }
    }
    None
}

/// Verdicts for the (E.A) and CLR_f properties plus the closedness of
/// `f(X)`.
#[derive(Debug, Clone)]
pub struct EaClrReport {
    pub ea: bool,
    pub ea_witness: Option<LimitWitness>,
    pub clr: bool,
    pub clr_witness: Option<ClrWitness>,
    pub f_range_closed: bool,
    pub range: RangeInfo,
}

/// Every decidable flag of a pair in one report. The commuting family
/// is `None` on interval spaces (imaging a set through `f` is exact
/// only on finite spaces); compatibility is never decided here.
#[derive(Debug, Clone)]
pub struct PairPropertyReport {
    pub space_kind: SpaceKind,
    pub coincidence: Option<ClosedSet>,
    pub common_fixed: Option<ClosedSet>,
    pub idempotency: IdempotencyReport,
    pub commuting: Option<CommutingReport>,
    pub ea_clr: EaClrReport,
}

/// Runs every applicable analysis on the pair.
pub fn analyze_pair(pair: &HybridPair, resolution: f64) -> Result<PairPropertyReport> {
    Ok(PairPropertyReport {
        space_kind: pair.kind(),
        coincidence: coincidence_points(pair, resolution)?,
        common_fixed: common_fixed_points(pair, resolution)?,
        idempotency: check_idempotency(pair, resolution)?,
        commuting: match pair.kind() {
            SpaceKind::Finite => Some(check_commuting(pair)?),
            SpaceKind::Interval => None,
        },
        ea_clr: detect_ea_clr(pair)?,
    })
}

/// Decides (E.A) and CLR_f. Interval spaces: one-sided limits of `f`
/// and `T` at every breakpoint are the candidate witnesses; CLR
/// additionally requires the common limit to be an attained value of
/// `f` (membership in the flagged range, respecting boundary
/// ownership). Finite spaces: constant sequences reduce both to
/// non-emptiness of the coincidence set.
pub fn detect_ea_clr(pair: &HybridPair) -> Result<EaClrReport> {
    let range = range_of(&pair.f);
    let f_range_closed = range.closed;

    if pair.kind == SpaceKind::Finite {
        let hits = pair.coincidence_candidates(0.0)?;
        let (ea, clr, ea_witness, clr_witness) = match hits.first() {
            Some(&v) => {
                let t = pair.f.eval(v)?;
                let a = pair.t.eval(v)?;
                (
                    true,
                    true,
                    Some(LimitWitness {
                        x0: v,
                        side: Side::At,
                        t,
                        limit_set: a.clone(),
                    }),
                    Some(ClrWitness {
                        x0: v,
                        side: Side::At,
                        t,
                        limit_set: a,
                        u: v,
                    }),
                )
            }
            None => (false, false, None, None),
        };
        return Ok(EaClrReport {
            ea,
            ea_witness,
            clr,
            clr_witness,
            f_range_closed: true,
            range,
        });
    }

    let mut report = EaClrReport {
        ea: false,
        ea_witness: None,
        clr: false,
        clr_witness: None,
        f_range_closed,
        range,
    };
    for &x0 in &pair.breakpoints() {
        let f_lims = pair.f.one_sided_limits(x0)?;
        let t_lims = pair.t.one_sided_limits(x0)?;
        for side in [Side::Left, Side::At, Side::Right] {
            let (Some(t), Some(a)) = (f_lims.get(side), t_lims.get(side)) else {
                continue;
            };
            if !a.contains_with_tol(t, COINCIDENCE_TOL) {
                continue;
            }
            if !report.ea {
                report.ea = true;
                report.ea_witness = Some(LimitWitness {
                    x0,
                    side,
                    t,
                    limit_set: a.clone(),
                });
            }
            if !report.clr && report.range.contains(t, COINCIDENCE_TOL) {
                if let Some(u) = find_preimage(&pair.f, t) {
                    report.clr = true;
                    report.clr_witness = Some(ClrWitness {
                        x0,
                        side,
                        t,
                        limit_set: a,
                        u,
                    });
                }
            }
        }
        if report.ea && report.clr {
            break;
        }
    }
    Ok(report)
}
