//! Closed bounded subsets of the real line and the Hausdorff-Pompeiu metric.
//!
//! A set is stored canonically as an ordered union of disjoint closed
//! intervals (degenerate intervals are points), so equality is structural
//! equality and every distance query resolves exactly on a finite
//! candidate list: suprema of `d(·, B)` over an interval union are
//! attained at piece endpoints and at midpoints of the gaps of the other
//! set, never in between.

use std::fmt;

use crate::error::{Error, Result};

/// A closed interval `[lo, hi]`; `lo == hi` encodes a single point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    fn distance_to(&self, x: f64) -> f64 {
        if x < self.lo {
            self.lo - x
        } else if x > self.hi {
            x - self.hi
        } else {
            0.0
        }
    }
}

/// Non-empty closed bounded subset of ℝ: disjoint closed intervals sorted
/// by left endpoint, with strictly positive gaps between pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedSet {
    pieces: Vec<Interval>,
}

impl ClosedSet {
    /// Canonicalizing constructor: sorts the raw intervals and merges any
    /// that overlap or touch. Rejects empty input and non-finite bounds.
    pub fn from_intervals(raw: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut items: Vec<Interval> = Vec::new();
        for (lo, hi) in raw {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::MalformedSet(format!("non-finite bound [{lo},{hi}]")));
            }
            if lo > hi {
                return Err(Error::MalformedSet(format!(
                    "inverted interval [{lo},{hi}]"
                )));
            }
            items.push(Interval { lo, hi });
        }
        if items.is_empty() {
            return Err(Error::MalformedSet("empty set".into()));
        }
        items.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
        let mut pieces: Vec<Interval> = vec![items[0]];
        for it in &items[1..] {
            let last = pieces.last_mut().unwrap();
            if it.lo <= last.hi {
                last.hi = last.hi.max(it.hi);
            } else {
                pieces.push(*it);
            }
        }
        Ok(ClosedSet { pieces })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::from_intervals([(lo, hi)])
    }

    pub fn point(a: f64) -> Result<Self> {
        Self::from_intervals([(a, a)])
    }

    pub fn points(pts: &[f64]) -> Result<Self> {
        Self::from_intervals(pts.iter().map(|&p| (p, p)))
    }

    pub fn union(&self, other: &ClosedSet) -> ClosedSet {
        let all = self
            .pieces
            .iter()
            .chain(other.pieces.iter())
            .map(|p| (p.lo, p.hi));
        ClosedSet::from_intervals(all).expect("union of valid sets is valid")
    }

    pub fn pieces(&self) -> &[Interval] {
        &self.pieces
    }

    pub fn min(&self) -> f64 {
        self.pieces[0].lo
    }

    pub fn max(&self) -> f64 {
        self.pieces[self.pieces.len() - 1].hi
    }

    /// Sum of piece lengths; zero for a pure point set.
    pub fn total_len(&self) -> f64 {
        self.pieces.iter().map(Interval::len).sum()
    }

    /// True when every piece is a single point.
    pub fn is_finite_points(&self) -> bool {
        self.pieces.iter().all(Interval::is_point)
    }

    /// All points of a pure point set, in order.
    pub fn finite_points(&self) -> Option<Vec<f64>> {
        if self.is_finite_points() {
            Some(self.pieces.iter().map(|p| p.lo).collect())
        } else {
            None
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.pieces.iter().any(|p| p.contains(x))
    }

    pub fn contains_with_tol(&self, x: f64, tol: f64) -> bool {
        self.distance_to(x) <= tol
    }

    /// `inf { |x - a| : a ∈ self }`, exact on the piece list.
    pub fn distance_to(&self, x: f64) -> f64 {
        self.pieces
            .iter()
            .map(|p| p.distance_to(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Metric projection: the nearest point of the set, ties broken
    /// toward the smaller value.
    pub fn project(&self, x: f64) -> f64 {
        let mut best = f64::INFINITY;
        let mut arg = self.pieces[0].lo;
        for p in &self.pieces {
            let (d, c) = if x < p.lo {
                (p.lo - x, p.lo)
            } else if x > p.hi {
                (x - p.hi, p.hi)
            } else {
                (0.0, x)
            };
            if d < best || (d == best && c < arg) {
                best = d;
                arg = c;
            }
        }
        arg
    }

    /// Whether every point of `other` lies within `tol` of `self`,
    /// piece by piece.
    pub fn contains_set(&self, other: &ClosedSet, tol: f64) -> bool {
        other.pieces.iter().all(|q| {
            self.pieces
                .iter()
                .any(|p| p.lo - tol <= q.lo && q.hi <= p.hi + tol)
        })
    }

    /// All piece endpoints in ascending order, deduplicated.
    pub fn endpoints(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.pieces.len());
        for p in &self.pieces {
            out.push(p.lo);
            if !p.is_point() {
                out.push(p.hi);
            }
        }
        out
    }

    /// Roughly `n` sample points spread over the set proportionally to
    /// piece length, always including piece endpoints. Pure point sets
    /// enumerate their points exactly.
    pub fn sample_grid(&self, n: usize) -> Vec<f64> {
        let total = self.total_len();
        let mut out = Vec::new();
        if total == 0.0 {
            out.extend(self.pieces.iter().map(|p| p.lo));
            return out;
        }
        let n = n.max(2);
        for p in &self.pieces {
            if p.is_point() {
                out.push(p.lo);
                continue;
            }
            let k = (((n as f64) * p.len() / total).round() as usize).max(2);
            for i in 0..k {
                if i == k - 1 {
                    out.push(p.hi);
                } else {
                    out.push(p.lo + p.len() * (i as f64) / ((k - 1) as f64));
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

impl fmt::Display for ClosedSet {
    /// Prints a re-parseable set literal: runs of points grouped as
    /// `{a,b}`, intervals as `[a,b]`, pieces joined by `|`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut i = 0;
        let mut first = true;
        while i < self.pieces.len() {
            if !first {
                write!(f, "|")?;
            }
            first = false;
            if self.pieces[i].is_point() {
                write!(f, "{{{}", self.pieces[i].lo)?;
                while i + 1 < self.pieces.len() && self.pieces[i + 1].is_point() {
                    i += 1;
                    write!(f, ",{}", self.pieces[i].lo)?;
                }
                write!(f, "}}")?;
            } else {
                write!(f, "[{},{}]", self.pieces[i].lo, self.pieces[i].hi)?;
            }
            i += 1;
        }
        Ok(())
    }
}

/// `d(x, A) = inf { |x - a| : a ∈ A }`.
pub fn point_set_distance(x: f64, a: &ClosedSet) -> f64 {
    a.distance_to(x)
}

/// One directed half of the Hausdorff distance, evaluated on the finite
/// candidate list (endpoints of `a`, midpoints of the gaps of `b` that
/// fall inside `a`).
fn directed(a: &ClosedSet, b: &ClosedSet) -> f64 {
    let mut sup = 0.0f64;
    for p in a.pieces() {
        sup = sup.max(b.distance_to(p.lo));
        sup = sup.max(b.distance_to(p.hi));
    }
    for w in b.pieces().windows(2) {
        let mid = 0.5 * (w[0].hi + w[1].lo);
        if a.contains(mid) {
            sup = sup.max(b.distance_to(mid));
        }
    }
    sup
}

/// Hausdorff-Pompeiu distance between two closed bounded sets.
pub fn hausdorff(a: &ClosedSet, b: &ClosedSet) -> f64 {
    directed(a, b).max(directed(b, a))
}

/// `H(A,B)` raised to the power `p`; rejects `p < 1`.
pub fn hausdorff_pow(a: &ClosedSet, b: &ClosedSet, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParam(format!("p must be >= 1, got {p}")));
    }
    Ok(hausdorff(a, b).powf(p))
}
