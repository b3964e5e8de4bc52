//! Piecewise-defined single-valued and set-valued mappings parsed from
//! the `piecewise{ cond: value ; ... }` syntax.
//!
//! Conditions are intervals with open/closed end flags; they must tile
//! the domain exactly (every junction point owned by exactly one piece,
//! every outer boundary closed), so evaluation is total on the domain
//! and one-sided limits at a point reduce to evaluating the adjacent
//! piece's expression at that point.

use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{Expr, ExprDisplay, Parser, SetExpr, SetExprDisplay, Tok};
use crate::set::ClosedSet;

const MAP_VARS: &[&str] = &["x"];

/// Condition interval with end-ownership flags, e.g. `(2,3]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CondInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl CondInterval {
    pub fn contains(&self, x: f64) -> bool {
        (self.lo < x || (x == self.lo && self.lo_closed))
            && (x < self.hi || (x == self.hi && self.hi_closed))
    }

    /// Whether the open interval `(x0 - eps, x0)` eventually lies inside.
    fn governs_left_of(&self, x0: f64) -> bool {
        self.lo < x0 && x0 <= self.hi
    }

    /// Whether the open interval `(x0, x0 + eps)` eventually lies inside.
    fn governs_right_of(&self, x0: f64) -> bool {
        self.lo <= x0 && x0 < self.hi
    }
}

impl fmt::Display for CondInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
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

/// Side of a one-sided limit query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    At,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::At => "at",
            Side::Right => "right",
        })
    }
}

/// One-sided limits of a map at a point; a side is `None` when the
/// domain does not extend to that side.
#[derive(Debug, Clone, PartialEq)]
pub struct SideLimits<T> {
    pub left: Option<T>,
    pub at: Option<T>,
    pub right: Option<T>,
}

impl<T: Clone> SideLimits<T> {
    pub fn get(&self, side: Side) -> Option<T> {
        match side {
            Side::Left => self.left.clone(),
            Side::At => self.at.clone(),
            Side::Right => self.right.clone(),
        }
    }
}

/// Single-valued piecewise map `f : X → ℝ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseMap {
    pieces: Vec<(CondInterval, Expr)>,
    domain: ClosedSet,
}

/// Set-valued piecewise map `T : X → CB(ℝ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseSetMap {
    pieces: Vec<(CondInterval, SetExpr)>,
    domain: ClosedSet,
}

// ---------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------

fn parse_cond(p: &mut Parser) -> Result<CondInterval> {
    let lo_closed = if p.eat(&Tok::LBracket) {
        true
    } else if p.eat(&Tok::LParen) {
        false
    } else {
        return Err(p.err("expected a condition interval '[' or '('".into()));
    };
    let lo = p.parse_const()?;
    p.expect(&Tok::Comma)?;
    let hi = p.parse_const()?;
    let hi_closed = if p.eat(&Tok::RBracket) {
        true
    } else if p.eat(&Tok::RParen) {
        false
    } else {
        return Err(p.err("expected ']' or ')' closing the condition".into()));
    };
    if lo > hi || (lo == hi && !(lo_closed && hi_closed)) {
        return Err(Error::Validation(format!(
            "empty condition interval {}{lo},{hi}{}",
            if lo_closed { "[" } else { "(" },
            if hi_closed { "]" } else { ")" },
        )));
    }
    Ok(CondInterval {
        lo,
        hi,
        lo_closed,
        hi_closed,
    })
}

fn parse_pieces<V>(
    text: &str,
    parse_value: impl Fn(&mut Parser) -> Result<V>,
) -> Result<Vec<(CondInterval, V)>> {
    let mut p = Parser::new(text, MAP_VARS)?;
    match p.peek() {
        Some(Tok::Ident(kw)) if kw == "piecewise" => {
            p.eat(&Tok::Ident("piecewise".into()));
        }
        _ => return Err(p.err("expected 'piecewise'".into())),
    }
    p.expect(&Tok::LBrace)?;
    let mut pieces = Vec::new();
    loop {
        let cond = parse_cond(&mut p)?;
        p.expect(&Tok::Colon)?;
        let value = parse_value(&mut p)?;
        pieces.push((cond, value));
        if !p.eat(&Tok::Semi) {
            break;
        }
    }
    p.expect(&Tok::RBrace)?;
    p.expect_end()?;
    Ok(pieces)
}

/// Sorts conditions, rejects overlaps and coverage gaps, and returns the
/// domain (the closure of the condition union).
fn validate_conditions<V>(pieces: &mut [(CondInterval, V)]) -> Result<ClosedSet> {
    pieces.sort_by(|a, b| a.0.lo.total_cmp(&b.0.lo).then(a.0.hi.total_cmp(&b.0.hi)));
    for w in pieces.windows(2) {
        let (a, b) = (&w[0].0, &w[1].0);
        if b.lo < a.hi {
            return Err(Error::Overlap(format!("{a} and {b}")));
        }
        if b.lo == a.hi {
            if a.hi_closed && b.lo_closed {
                return Err(Error::Overlap(format!("{a} and {b} both own {}", b.lo)));
            }
            if !a.hi_closed && !b.lo_closed {
                return Err(Error::CoverageGap(format!(
                    "junction point {} owned by neither {a} nor {b}",
                    b.lo
                )));
            }
        }
    }
    // closure components: outer ends must be closed or the boundary
    // point of the closed domain would be uncovered
    let mut idx = 0;
    while idx < pieces.len() {
        let start = idx;
        while idx + 1 < pieces.len() && pieces[idx + 1].0.lo == pieces[idx].0.hi {
            idx += 1;
        }
        let first = &pieces[start].0;
        let last = &pieces[idx].0;
        if !first.lo_closed {
            return Err(Error::CoverageGap(format!(
                "domain boundary {} not covered (condition {first} is open there)",
                first.lo
            )));
        }
        if !last.hi_closed {
            return Err(Error::CoverageGap(format!(
                "domain boundary {} not covered (condition {last} is open there)",
                last.hi
            )));
        }
        idx += 1;
    }
    ClosedSet::from_intervals(pieces.iter().map(|(c, _)| (c.lo, c.hi)))
}

/// Evaluation points used to validate an expression over one condition:
/// the closure endpoints plus interior samples.
fn cond_probe_points(cond: &CondInterval) -> Vec<f64> {
    let mut pts = vec![cond.lo, cond.hi];
    if cond.hi > cond.lo {
        for i in 1..32 {
            pts.push(cond.lo + (cond.hi - cond.lo) * (i as f64) / 32.0);
        }
    }
    pts
}

impl PiecewiseMap {
    /// Parses and validates a single-valued map.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pieces = parse_pieces(text, |p| p.parse_expr())?;
        let domain = validate_conditions(&mut pieces)?;
        for (cond, expr) in &pieces {
            for x in cond_probe_points(cond) {
                let v = expr.eval(&[x]);
                if !v.is_finite() {
                    return Err(Error::Validation(format!(
                        "expression over {cond} evaluates to {v} at x={x}"
                    )));
                }
            }
        }
        Ok(PiecewiseMap { pieces, domain })
    }

    /// The identity map on a domain.
    pub fn identity(domain: &ClosedSet) -> Self {
        let pieces = domain
            .pieces()
            .iter()
            .map(|p| {
                (
                    CondInterval {
                        lo: p.lo,
                        hi: p.hi,
                        lo_closed: true,
                        hi_closed: true,
                    },
                    Expr::Var(0),
                )
            })
            .collect();
        PiecewiseMap {
            pieces,
            domain: domain.clone(),
        }
    }

    pub fn domain(&self) -> &ClosedSet {
        &self.domain
    }

    pub fn pieces(&self) -> &[(CondInterval, Expr)] {
        &self.pieces
    }

    /// All condition endpoints, ascending and deduplicated.
    pub fn breakpoints(&self) -> Vec<f64> {
        breakpoints_of(self.pieces.iter().map(|(c, _)| c))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match self.pieces.iter().find(|(c, _)| c.contains(x)) {
            Some((_, e)) => Ok(e.eval(&[x])),
            None => Err(Error::OutOfDomain { x }),
        }
    }

    /// Left/at/right values at `x0`: the adjacent piece's expression
    /// evaluated at `x0` itself (expressions are continuous on closed
    /// pieces, so this is the exact one-sided limit).
    pub fn one_sided_limits(&self, x0: f64) -> Result<SideLimits<f64>> {
        if !self.domain.contains(x0) {
            return Err(Error::OutOfDomain { x: x0 });
        }
        let eval_piece = |idx: Option<usize>| idx.map(|i| self.pieces[i].1.eval(&[x0]));
        let (l, a, r) = side_piece_indices(self.pieces.iter().map(|(c, _)| c), x0);
        Ok(SideLimits {
            left: eval_piece(l),
            at: eval_piece(a),
            right: eval_piece(r),
        })
    }
}

impl PiecewiseSetMap {
    /// Parses and validates a set-valued map.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pieces = parse_pieces(text, |p| p.parse_set_expr())?;
        let domain = validate_conditions(&mut pieces)?;
        for (cond, sexpr) in &pieces {
            for x in cond_probe_points(cond) {
                sexpr.eval(&[x]).map_err(|e| {
                    Error::Validation(format!("set value over {cond} at x={x}: {e}"))
                })?;
            }
        }
        Ok(PiecewiseSetMap { pieces, domain })
    }

    pub fn domain(&self) -> &ClosedSet {
        &self.domain
    }

    pub fn pieces(&self) -> &[(CondInterval, SetExpr)] {
        &self.pieces
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        breakpoints_of(self.pieces.iter().map(|(c, _)| c))
    }

    pub fn eval(&self, x: f64) -> Result<ClosedSet> {
        match self.pieces.iter().find(|(c, _)| c.contains(x)) {
            Some((_, e)) => e.eval(&[x]),
            None => Err(Error::OutOfDomain { x }),
        }
    }

    pub fn one_sided_limits(&self, x0: f64) -> Result<SideLimits<ClosedSet>> {
        if !self.domain.contains(x0) {
            return Err(Error::OutOfDomain { x: x0 });
        }
        let (l, a, r) = side_piece_indices(self.pieces.iter().map(|(c, _)| c), x0);
        let eval_piece = |idx: Option<usize>| -> Result<Option<ClosedSet>> {
            match idx {
                Some(i) => Ok(Some(self.pieces[i].1.eval(&[x0])?)),
                None => Ok(None),
            }
        };
        Ok(SideLimits {
            left: eval_piece(l)?,
            at: eval_piece(a)?,
            right: eval_piece(r)?,
        })
    }
}

fn breakpoints_of<'a>(conds: impl Iterator<Item = &'a CondInterval>) -> Vec<f64> {
    let mut out = Vec::new();
    for c in conds {
        out.push(c.lo);
        out.push(c.hi);
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

fn side_piece_indices<'a>(
    conds: impl Iterator<Item = &'a CondInterval>,
    x0: f64,
) -> (Option<usize>, Option<usize>, Option<usize>) {
    let (mut l, mut a, mut r) = (None, None, None);
    for (i, c) in conds.enumerate() {
        if c.governs_left_of(x0) {
            l = Some(i);
        }
        if c.contains(x0) {
            a = Some(i);
        }
        if c.governs_right_of(x0) {
            r = Some(i);
        }
    }
    (l, a, r)
}

impl fmt::Display for PiecewiseMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "piecewise{{ ")?;
        for (i, (cond, expr)) in self.pieces.iter().enumerate() {
            if i > 0 {
                write!(f, " ; ")?;
            }
            write!(
                f,
                "{cond}: {}",
                ExprDisplay {
                    expr,
                    vars: MAP_VARS
                }
            )?;
        }
        write!(f, " }}")
    }
}

impl fmt::Display for PiecewiseSetMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "piecewise{{ ")?;
        for (i, (cond, expr)) in self.pieces.iter().enumerate() {
            if i > 0 {
                write!(f, " ; ")?;
            }
            write!(
                f,
                "{cond}: {}",
                SetExprDisplay {
                    expr,
                    vars: MAP_VARS
                }
            )?;
        }
        write!(f, " }}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SECTION3_F: &str = "piecewise{ [0,2]: 3-x ; (2,3]: 3 }";
    const SECTION3_T: &str = "piecewise{ [0,2]: [1,2] ; (2,3]: [0,1/2] }";
    const EX14_F: &str = "piecewise{ [0,1): 2-x ; [1,2]: 9/5 }";

    #[test]
    fn parses_section3_f() {
        let f = PiecewiseMap::parse(SECTION3_F).unwrap();
        assert_eq!(f.domain().to_string(), "[0,3]");
        assert_eq!(f.eval(1.0).unwrap(), 2.0);
        assert_eq!(f.eval(2.5).unwrap(), 3.0);
        assert!(matches!(f.eval(3.5), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn identity_map() {
        let d = ClosedSet::interval(0.0, 1.0).unwrap();
        let id = PiecewiseMap::identity(&d);
        assert_eq!(id.eval(0.7).unwrap(), 0.7);
        let parsed = PiecewiseMap::parse("piecewise{ [0,1]: x }").unwrap();
        assert_eq!(parsed.eval(0.7).unwrap(), 0.7);
    }

    #[test]
    fn arithmetic_piece() {
        let m = PiecewiseMap::parse("piecewise{ [0,1]: x*x }").unwrap();
        assert_eq!(m.eval(0.5).unwrap(), 0.25);
    }

    #[test]
    fn example14_values() {
        let f = PiecewiseMap::parse(EX14_F).unwrap();
        assert_eq!(f.eval(0.25).unwrap(), 1.75);
        assert_eq!(f.eval(1.0).unwrap(), 1.8);
    }

    #[test]
    fn parses_section3_t() {
        let t = PiecewiseSetMap::parse(SECTION3_T).unwrap();
        assert_eq!(t.eval(3.0).unwrap().to_string(), "[0,0.5]");
        assert_eq!(t.eval(1.0).unwrap().to_string(), "[1,2]");
    }

    #[test]
    fn singleton_valued_identity() {
        let t = PiecewiseSetMap::parse("piecewise{ [0,1]: {x} }").unwrap();
        let v = t.eval(0.3).unwrap();
        assert!(v.is_finite_points());
        assert_eq!(v.min(), 0.3);
    }

    #[test]
    fn union_set_value() {
        let t = PiecewiseSetMap::parse("piecewise{ [1,3]: {1} | [2,2.5] }").unwrap();
        assert_eq!(t.eval(1.0).unwrap().to_string(), "{1}|[2,2.5]");
    }

    #[test]
    fn finite_space_maps() {
        let f = PiecewiseMap::parse("piecewise{ [1,1]: 1 ; [2,2]: 3 ; [3,3]: 2 }").unwrap();
        assert!(f.domain().is_finite_points());
        assert_eq!(f.eval(2.0).unwrap(), 3.0);
        let t = PiecewiseSetMap::parse("piecewise{ [1,1]: {1} ; [2,2]: {1,3} ; [3,3]: {1,3} }")
            .unwrap();
        assert_eq!(t.eval(2.0).unwrap().to_string(), "{1,3}");
    }

    #[test]
    fn coverage_and_overlap_errors() {
        assert!(matches!(
            PiecewiseMap::parse("piecewise{ [0,1): 0 ; (1,2]: 1 }"),
            Err(Error::CoverageGap(_))
        ));
        assert!(matches!(
            PiecewiseMap::parse("piecewise{ [0,1]: 0 ; [1,2]: 1 }"),
            Err(Error::Overlap(_))
        ));
        assert!(matches!(
            PiecewiseMap::parse("piecewise{ [0,1.5]: 0 ; [1,2]: 1 }"),
            Err(Error::Overlap(_))
        ));
        assert!(matches!(
            PiecewiseMap::parse("piecewise{ (0,1]: x }"),
            Err(Error::CoverageGap(_))
        ));
        assert!(matches!(
            PiecewiseMap::parse("piecewise{ [0,1]: 1/(x-0.5) }"),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn one_sided_limits_example14() {
        let f = PiecewiseMap::parse(EX14_F).unwrap();
        let lim = f.one_sided_limits(1.0).unwrap();
        assert_eq!(lim.left, Some(1.0));
        assert_eq!(lim.at, Some(1.8));
        assert_eq!(lim.right, Some(1.8));
    }

    #[test]
    fn one_sided_limits_interior_continuous() {
        let f = PiecewiseMap::parse("piecewise{ [0,1]: x*x }").unwrap();
        let lim = f.one_sided_limits(0.5).unwrap();
        assert_eq!(lim.left, Some(0.25));
        assert_eq!(lim.at, Some(0.25));
        assert_eq!(lim.right, Some(0.25));
        let edge = f.one_sided_limits(0.0).unwrap();
        assert_eq!(edge.left, None);
        assert_eq!(edge.at, Some(0.0));
    }

    #[test]
    fn one_sided_limits_out_of_domain() {
        let f = PiecewiseMap::parse("piecewise{ [0,1]: x }").unwrap();
        assert!(matches!(
            f.one_sided_limits(2.0),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn one_sided_limits_section3_t_at_junction() {
        let t = PiecewiseSetMap::parse(SECTION3_T).unwrap();
        let lim = t.one_sided_limits(2.0).unwrap();
        assert_eq!(lim.left.unwrap().to_string(), "[1,2]");
        assert_eq!(lim.at.unwrap().to_string(), "[1,2]");
        assert_eq!(lim.right.unwrap().to_string(), "[0,0.5]");
        // numeric confirmation just off the junction
        assert_eq!(t.eval(2.0 - 1e-9).unwrap().to_string(), "[1,2]");
        assert_eq!(t.eval(2.0 + 1e-9).unwrap().to_string(), "[0,0.5]");
    }

    #[test]
    fn display_round_trips_maps() {
        for text in [SECTION3_F, EX14_F, "piecewise{ [1,1]: 1 ; [2,2]: 3 }"] {
            let m = PiecewiseMap::parse(text).unwrap();
            let back = PiecewiseMap::parse(&m.to_string()).unwrap();
            assert_eq!(m, back);
        }
        for text in [SECTION3_T, "piecewise{ [1,3]: {1} | [2,2.5] }"] {
            let m = PiecewiseSetMap::parse(text).unwrap();
            let back = PiecewiseSetMap::parse(&m.to_string()).unwrap();
            assert_eq!(m, back);
        }
    }
}
