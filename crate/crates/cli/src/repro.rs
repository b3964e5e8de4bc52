//! Reproduction table for the bundled worked examples: every quantity
//! is recomputed from the map definitions and compared against its
//! expected value.

use anyhow::Result;
use fixlab_core::contraction::{
    certify, kadelburg_comparison, ConditionSpec, FFunction, GridSpec, PhiFunction,
};
use fixlab_core::pairs::{
    check_commuting, check_idempotency, coincidence_points, common_fixed_points, detect_ea_clr,
    HybridPair,
};
use fixlab_core::piecewise::{PiecewiseMap, PiecewiseSetMap};
use fixlab_core::{hausdorff, point_set_distance, ClosedSet};

use crate::commands::certification_summary;

pub const SECTION3_F: &str = "piecewise{ [0,2]: 3-x ; (2,3]: 3 }";
pub const SECTION3_T: &str = "piecewise{ [0,2]: [1,2] ; (2,3]: [0,1/2] }";
pub const EX13_F: &str = "piecewise{ [1,1]: 1 ; [2,2]: 3 ; [3,3]: 2 }";
pub const EX13_T: &str = "piecewise{ [1,1]: {1} ; [2,2]: {1,3} ; [3,3]: {1,3} }";
pub const EX14_F: &str = "piecewise{ [0,1): 2-x ; [1,2]: 9/5 }";
pub const EX14_G: &str = "piecewise{ [0,1]: 2-x ; (1,2]: 9/5 }";
pub const EX14_T: &str = "piecewise{ [0,1]: [1/2,3/2] ; (1,2]: [1/4,1/2] }";

pub struct Row {
    pub name: &'static str,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

fn row(name: &'static str, expected: impl ToString, computed: impl ToString) -> Row {
    let expected = expected.to_string();
    let computed = computed.to_string();
    let pass = expected == computed;
    Row {
        name,
        expected,
        computed,
        pass,
    }
}

fn row_close(name: &'static str, expected: f64, computed: f64, tol: f64) -> Row {
    Row {
        name,
        expected: expected.to_string(),
        computed: computed.to_string(),
        pass: (expected - computed).abs() <= tol,
    }
}

pub fn build_rows(self_test_fail: bool) -> Result<Vec<Row>> {
    let mut rows = Vec::new();

    // metric quantities
    let unit = ClosedSet::interval(0.0, 0.5)?;
    rows.push(row(
        "point-distance d(3,[0,1/2])",
        2.5,
        point_set_distance(3.0, &unit),
    ));
    let a = ClosedSet::interval(1.0, 2.0)?;
    rows.push(row("hausdorff H([1,2],[0,1/2])", 1.5, hausdorff(&a, &unit)));

    // the finite three-point pair
    let ex13 = HybridPair::new(
        PiecewiseMap::parse(EX13_F)?,
        PiecewiseSetMap::parse(EX13_T)?,
    )?;
    let c = coincidence_points(&ex13, 0.0)?;
    rows.push(row(
        "finite-pair coincidence set",
        "{1,2}",
        c.map_or_else(|| "empty".into(), |s| s.to_string()),
    ));
    let cf = common_fixed_points(&ex13, 0.0)?;
    rows.push(row(
        "finite-pair common fixed set",
        "{1}",
        cf.map_or_else(|| "empty".into(), |s| s.to_string()),
    ));
    let comm = check_commuting(&ex13)?;
    rows.push(row("finite-pair commuting", false, comm.commuting));
    rows.push(row(
        "finite-pair weakly commuting",
        false,
        comm.weakly_commuting,
    ));
    rows.push(row(
        "finite-pair weakly compatible",
        false,
        comm.weakly_compatible,
    ));
    let idem = check_idempotency(&ex13, 0.0)?;
    rows.push(row(
        "finite-pair coincidentally idempotent",
        false,
        idem.coincidentally,
    ));
    rows.push(row(
        "finite-pair occasionally idempotent",
        true,
        idem.occasionally,
    ));
    rows.push(row(
        "finite-pair idempotency witness",
        1.0,
        idem.occasionally_witness.unwrap_or(f64::NAN),
    ));

    // the two-map limit-range example
    let ex14_t = PiecewiseSetMap::parse(EX14_T)?;
    let pair_f = HybridPair::new(PiecewiseMap::parse(EX14_F)?, ex14_t.clone())?;
    let r = detect_ea_clr(&pair_f)?;
    rows.push(row("limit-range-pair (f,T) EA", true, r.ea));
    rows.push(row("limit-range-pair (f,T) CLR_f", false, r.clr));
    rows.push(row(
        "limit-range-pair f range closed",
        false,
        r.f_range_closed,
    ));
    let pair_g = HybridPair::new(PiecewiseMap::parse(EX14_G)?, ex14_t)?;
    let r = detect_ea_clr(&pair_g)?;
    rows.push(row("limit-range-pair (g,T) CLR_g", true, r.clr));

    // the interval worked example
    let s3 = HybridPair::new(
        PiecewiseMap::parse(SECTION3_F)?,
        PiecewiseSetMap::parse(SECTION3_T)?,
    )?;
    let c = coincidence_points(&s3, 1e-3)?;
    rows.push(row(
        "interval-pair coincidence set",
        "[1,2]",
        c.map_or_else(|| "empty".into(), |s| s.to_string()),
    ));
    let cf = common_fixed_points(&s3, 1e-3)?.map(|s| s.min());
    rows.push(row_close(
        "interval-pair common fixed point",
        1.5,
        cf.unwrap_or(f64::NAN),
        1e-6,
    ));
    let idem = check_idempotency(&s3, 1e-3)?;
    rows.push(row(
        "interval-pair coincidentally idempotent",
        false,
        idem.coincidentally,
    ));
    rows.push(row_close(
        "interval-pair idempotency witness",
        1.5,
        idem.occasionally_witness.unwrap_or(f64::NAN),
        1e-6,
    ));
    let r = detect_ea_clr(&s3)?;
    rows.push(row("interval-pair CLR_f", true, r.clr));
    rows.push(row("interval-pair f range closed", true, r.f_range_closed));
    rows.push(row("interval-pair f range", "[1,3]", r.range.to_string()));

    // side-by-side comparison at (1,3)
    let kad = kadelburg_comparison(&s3.f, &s3.t, 1.0, 3.0)?;
    rows.push(row("comparison H(T1,T3)", 1.5, kad.hausdorff));
    rows.push(row("comparison d(f1,f3)", 1.0, kad.d_fx_fy));
    rows.push(row("comparison half-sum own", 1.25, kad.half_own));
    rows.push(row("comparison half-sum cross", 1.25, kad.half_cross));
    rows.push(row(
        "comparison H exceeds candidate max",
        true,
        kad.hausdorff > kad.rhs_max,
    ));

    // certification at the published parameters, then with tau too large
    let grid = GridSpec { points: 201 };
    let hold = ConditionSpec::Generalized {
        f: FFunction::log(),
        phi: PhiFunction::parse("9/10*t")?,
        tau: 0.2,
        p: 1.0,
    };
    let report = certify(&hold, &s3.f, &s3.t, &grid)?;
    let (nviol, _) = certification_summary(&report);
    rows.push(row("certification tau=1/5 violations", 0usize, nviol));
    let fail = ConditionSpec::Generalized {
        f: FFunction::log(),
        phi: PhiFunction::parse("9/10*t")?,
        tau: 2.0,
        p: 1.0,
    };
    let report = certify(&fail, &s3.f, &s3.t, &grid)?;
    let (_, violated) = certification_summary(&report);
    rows.push(row("certification tau=2 violated", true, violated));
    let straddles = report
        .violations
        .iter()
        .all(|v| (v.x <= 2.0) != (v.y <= 2.0))
        && !report.violations.is_empty();
    rows.push(row(
        "certification tau=2 witnesses straddle the junction",
        true,
        straddles,
    ));

    if self_test_fail {
        rows.push(row("self-test injected failure", 0, 1));
    }
    Ok(rows)
}
