//! Command implementations. Each returns the rendered output plus an
//! exit code; `main` handles printing and process exit.

use anyhow::{anyhow, bail, Context, Result};
use fixlab_core::contraction::{
    certify, CertificateReport, ConditionSpec, FFunction, GridSpec, PhiFunction, Verdict,
};
use fixlab_core::dp::{
    bellman_apply, posterior_checks, solve_successive, verify_hypothesis1, DpInstance,
    GridFunction, OperatorIndex,
};
use fixlab_core::expr::{parse_expr1, parse_expr2, parse_expr3, parse_set_expr};
use fixlab_core::pairs::analyze_pair;
use fixlab_core::pairs::HybridPair;
use fixlab_core::piecewise::{PiecewiseMap, PiecewiseSetMap};
use fixlab_core::set::ClosedSet;
use fixlab_core::volterra::{
    check_bracket, kernel_tau, solve_inclusion, InclusionInstance, SelectionRule, Trajectory,
};

use crate::config::Config;
use crate::output::{fmt, full, opt_full, Format};

pub struct CmdResult {
    pub output: String,
    pub exit: i32,
}

fn ok(output: String) -> CmdResult {
    CmdResult { output, exit: 0 }
}

fn parse_maps(cfg: &Config) -> Result<(PiecewiseMap, PiecewiseSetMap)> {
    let f = PiecewiseMap::parse(cfg.require("f")?).context("config key 'f'")?;
    let t = PiecewiseSetMap::parse(cfg.require("T")?).context("config key 'T'")?;
    Ok((f, t))
}

// ---------------------------------------------------------------------
// certify
// ---------------------------------------------------------------------

pub fn cmd_certify(
    cfg: &Config,
    grid_override: Option<usize>,
    p_override: Option<f64>,
    tau_override: Option<f64>,
    format: Format,
) -> Result<CmdResult> {
    let (f_map, t_map) = parse_maps(cfg)?;
    let kind = cfg.require("kind")?;
    let tau = tau_override.or(cfg.number("tau")?).unwrap_or(0.2);
    let p = p_override.or(cfg.number("p")?).unwrap_or(1.0);
    let ffun = match cfg.get("F") {
        Some(name) => FFunction::parse_named(name)
            .or_else(|_| FFunction::custom(name, 0.5))
            .context("config key 'F'")?,
        None => FFunction::log(),
    };
    let phi = || -> Result<PhiFunction> {
        PhiFunction::parse(cfg.get("phi").unwrap_or("9/10*t")).context("config key 'phi'")
    };
    let cond = match kind {
        "nadler" => ConditionSpec::Nadler {
            lambda: cfg
                .number("lambda")?
                .ok_or_else(|| anyhow!("nadler certification needs 'lambda'"))?,
        },
        "wardowski" => ConditionSpec::Wardowski { f: ffun, tau },
        "sgroi" => ConditionSpec::Sgroi { f: ffun, tau },
        "generalized" => ConditionSpec::Generalized {
            f: ffun,
            phi: phi()?,
            tau,
            p,
        },
        "hardy-rogers" => ConditionSpec::HardyRogers {
            f: ffun,
            phi: phi()?,
            tau,
            p,
            alpha: cfg.number("alpha")?.unwrap_or(0.0),
            beta: cfg.number("beta")?.unwrap_or(0.0),
            gamma: cfg.number("gamma")?.unwrap_or(0.0),
            delta: cfg.number("delta")?.unwrap_or(0.0),
        },
        other => bail!("unknown condition kind '{other}'"),
    };
    let grid = GridSpec {
        points: grid_override.or(cfg.integer("grid")?).unwrap_or(201),
    };
    let report = certify(&cond, &f_map, &t_map, &grid)?;

    let mut out = String::new();
    let desc = describe_condition(&cond);
    match format {
        Format::Records => {
            out.push_str(&format!(
                "certify kind={} {} grid={} samples={} skipped={} violations={} min_margin={} verdict={}\n",
                cond.kind_name(),
                desc,
                grid.points,
                report.samples,
                report.skipped_vacuous,
                report.violations.len(),
                opt_full(report.min_margin),
                report.verdict,
            ));
            for v in &report.violations {
                out.push_str(&format!(
                    "violation x={} y={} lhs={} rhs={} gap={}\n",
                    full(v.x),
                    full(v.y),
                    full(v.lhs),
                    full(v.rhs),
                    full(v.gap)
                ));
            }
        }
        Format::Human => {
            out.push_str(&format!("condition: {} ({})\n", cond.kind_name(), desc));
            out.push_str(&format!(
                "samples: {} compared, {} vacuous (left-hand distance zero)\n",
                report.samples, report.skipped_vacuous
            ));
            out.push_str(&format!("verdict: {}\n", report.verdict));
            if let Some(m) = report.min_margin {
                out.push_str(&format!("min margin: {}\n", fmt(m, format)));
            }
            if !report.violations.is_empty() {
                out.push_str(&format!("violations: {}\n", report.violations.len()));
                for v in report.violations.iter().take(10) {
                    out.push_str(&format!(
                        "  x={} y={} lhs={} rhs={} gap={}\n",
                        fmt(v.x, format),
                        fmt(v.y, format),
                        fmt(v.lhs, format),
                        fmt(v.rhs, format),
                        fmt(v.gap, format)
                    ));
                }
                if report.violations.len() > 10 {
                    out.push_str(&format!(
                        "  ... and {} more\n",
                        report.violations.len() - 10
                    ));
                }
            }
        }
    }
    let exit = match report.verdict {
        Verdict::HoldsOnSamples => 0,
        Verdict::Violated => 1,
    };
    Ok(CmdResult { output: out, exit })
}

fn describe_condition(cond: &ConditionSpec) -> String {
    match cond {
        ConditionSpec::Nadler { lambda } => format!("lambda={}", full(*lambda)),
        ConditionSpec::Wardowski { f, tau } | ConditionSpec::Sgroi { f, tau } => {
            format!("F={} tau={}", f.name(), full(*tau))
        }
        ConditionSpec::Generalized { f, phi, tau, p } => format!(
            "F={} phi={} tau={} p={}",
            f.name(),
            phi.text(),
            full(*tau),
            full(*p)
        ),
        ConditionSpec::HardyRogers {
            f,
            phi,
            tau,
            p,
            alpha,
            beta,
            gamma,
            delta,
        } => format!(
            "F={} phi={} tau={} p={} alpha={} beta={} gamma={} delta={}",
            f.name(),
            phi.text(),
            full(*tau),
            full(*p),
            full(*alpha),
            full(*beta),
            full(*gamma),
            full(*delta)
        ),
    }
}

// ---------------------------------------------------------------------
// pairs
// ---------------------------------------------------------------------

fn set_or_empty(s: &Option<ClosedSet>) -> String {
    s.as_ref().map_or_else(|| "empty".into(), |v| v.to_string())
}

fn report_pair(
    out: &mut String,
    name: &str,
    pair: &HybridPair,
    resolution: f64,
    format: Format,
) -> Result<()> {
    let num = |v: f64| fmt(v, format);
    let opt_num = |v: Option<f64>| v.map_or_else(|| "none".to_string(), |v| fmt(v, format));
    let report = analyze_pair(pair, resolution)?;
    let idem = &report.idempotency;
    let ea_clr = &report.ea_clr;

    out.push_str(&format!(
        "pair name={name} space={} resolution={}\n",
        report.space_kind,
        num(resolution)
    ));
    out.push_str(&format!(
        "coincidence set={}\n",
        set_or_empty(&report.coincidence)
    ));
    out.push_str(&format!(
        "common-fixed set={}\n",
        set_or_empty(&report.common_fixed)
    ));
    out.push_str(&format!(
        "idempotency coincidentally={} counterexample={} occasionally={} witness={}\n",
        idem.coincidentally,
        opt_num(idem.coincidentally_counterexample),
        idem.occasionally,
        opt_num(idem.occasionally_witness)
    ));
    match &report.commuting {
        Some(c) => {
            out.push_str(&format!(
                "commuting holds={} counterexample={}\n",
                c.commuting,
                opt_num(c.commuting_counterexample)
            ));
            out.push_str(&format!(
                "weakly-commuting holds={} counterexample={}\n",
                c.weakly_commuting,
                opt_num(c.weakly_commuting_counterexample)
            ));
            out.push_str(&format!(
                "weakly-compatible holds={} counterexample={}\n",
                c.weakly_compatible,
                opt_num(c.weakly_compatible_counterexample)
            ));
        }
        None => {
            for flag in ["commuting", "weakly-commuting", "weakly-compatible"] {
                out.push_str(&format!("{flag} decided=no reason=interval-space\n"));
            }
        }
    }
    // compatibility needs limits of image sets along sequences; not a
    // decision procedure here
    out.push_str("compatible decided=no reason=out-of-scope\n");
    out.push_str("non-compatible decided=no reason=out-of-scope\n");
    match &ea_clr.ea_witness {
        Some(w) => out.push_str(&format!(
            "ea holds=true x0={} side={} t={} A={}\n",
            num(w.x0),
            w.side,
            num(w.t),
            w.limit_set
        )),
        None => out.push_str("ea holds=false\n"),
    }
    match &ea_clr.clr_witness {
        Some(w) => out.push_str(&format!(
            "clr holds=true x0={} side={} t={} A={} u={}\n",
            num(w.x0),
            w.side,
            num(w.t),
            w.limit_set,
            num(w.u)
        )),
        None => out.push_str("clr holds=false\n"),
    }
    out.push_str(&format!(
        "range set={} closed={} approximate={}\n",
        ea_clr.range, ea_clr.f_range_closed, ea_clr.range.approximate
    ));
    Ok(())
}

pub fn cmd_pairs(cfg: &Config, grid_override: Option<usize>, format: Format) -> Result<CmdResult> {
    let (f_map, t_map) = parse_maps(cfg)?;
    let resolution = match grid_override {
        Some(n) if n > 0 => t_map.domain().total_len().max(1e-12) / n as f64,
        _ => cfg.number("resolution")?.unwrap_or(1e-3),
    };
    let mut out = String::new();
    let pair = HybridPair::new(f_map, t_map.clone())?;
    report_pair(&mut out, "f,T", &pair, resolution, format)?;
    if let Some(g_text) = cfg.get("g") {
        let g_map = PiecewiseMap::parse(g_text).context("config key 'g'")?;
        let pair = HybridPair::new(g_map, t_map)?;
        report_pair(&mut out, "g,T", &pair, resolution, format)?;
    }
    Ok(ok(out))
}

// ---------------------------------------------------------------------
// solve-dp
// ---------------------------------------------------------------------

pub fn cmd_solve_dp(
    cfg: &Config,
    grid_override: Option<usize>,
    tol_override: Option<f64>,
    seed: u64,
    format: Format,
) -> Result<CmdResult> {
    let w = parse_set_expr(cfg.require("W")?, &[])
        .context("config key 'W'")?
        .eval(&[])?;
    let d = parse_set_expr(cfg.require("D")?, &[])
        .context("config key 'D'")?
        .eval(&[])?;
    let n_w = grid_override.or(cfg.integer("W_grid")?).unwrap_or(201);
    let n_d = grid_override.or(cfg.integer("D_grid")?).unwrap_or(201);
    let g = parse_expr2(cfg.require("g")?, ["x", "y"]).context("config key 'g'")?;
    let g1 = parse_expr3(cfg.require("G1")?, ["x", "y", "z"]).context("config key 'G1'")?;
    let g2 = parse_expr3(cfg.require("G2")?, ["x", "y", "z"]).context("config key 'G2'")?;
    let tau_map =
        parse_expr2(cfg.require("tau_map")?, ["x", "y"]).context("config key 'tau_map'")?;
    let tol = tol_override.or(cfg.number("tol")?).unwrap_or(1e-8);
    let max_iters = cfg.integer("max_iters")?.unwrap_or(200);

    let inst = DpInstance::new(&w, n_w, &d, n_d, &g, g1, g2, &tau_map)?;
    let h0 = GridFunction::constant(inst.w_grid().len(), 0.0);
    let sol = solve_successive(&inst, OperatorIndex::One, &h0, tol, max_iters)?;
    let post = posterior_checks(&inst, &sol.h)?;
    let max_ratio = sol
        .step_norms
        .windows(2)
        .filter(|w| w[0] > 1e-12)
        .map(|w| w[1] / w[0])
        .fold(0.0f64, f64::max);

    let mut out = String::new();
    out.push_str(&format!(
        "dp nodes-w={} nodes-d={} max-snap-error={} g-bound={}\n",
        inst.w_grid().len(),
        inst.d_grid().len(),
        fmt(inst.max_snap_error, format),
        fmt(inst.g_bound, format)
    ));
    out.push_str(&format!(
        "dp-solve iterations={} residual={} converged={} max-step-ratio={}\n",
        sol.iterations,
        fmt(sol.residual, format),
        sol.converged,
        fmt(max_ratio, format)
    ));
    out.push_str(&format!(
        "dp-posterior coincidence-defect={} idempotency-defect={}\n",
        fmt(post.coincidence_defect, format),
        fmt(post.idempotency_defect, format)
    ));
    if let (Some(hyp_tau), Some(phi_text)) = (cfg.number("hyp_tau")?, cfg.get("hyp_phi")) {
        let phi = PhiFunction::parse(phi_text).context("config key 'hyp_phi'")?;
        let pairs = cfg.integer("hyp_pairs")?.unwrap_or(4);
        let lo = cfg.number("hyp_lo")?.unwrap_or(0.0);
        let hi = cfg.number("hyp_hi")?.unwrap_or(1.0);
        let rep = verify_hypothesis1(&inst, hyp_tau, &phi, pairs, (lo, hi), seed)?;
        out.push_str(&format!(
            "dp-hypothesis1 seed={} samples={} violations={} min-margin={} verdict={}\n",
            seed,
            rep.samples,
            rep.violations.len(),
            opt_full(rep.min_margin),
            rep.verdict
        ));
    }
    push_grid_values(
        &mut out,
        "dp-value",
        "x",
        "h",
        inst.w_grid(),
        &sol.h.0,
        format,
    );

    // re-applying the operator must reproduce the residual
    let recheck = bellman_apply(&inst, OperatorIndex::One, &sol.h)?.sup_dist(&sol.h);
    debug_assert!((recheck - sol.residual).abs() <= 1e-12);

    Ok(ok(out))
}

fn push_grid_values(
    out: &mut String,
    record: &str,
    xname: &str,
    vname: &str,
    xs: &[f64],
    vs: &[f64],
    format: Format,
) {
    match format {
        Format::Records => {
            for (x, v) in xs.iter().zip(vs) {
                out.push_str(&format!(
                    "{record} {xname}={} {vname}={}\n",
                    full(*x),
                    full(*v)
                ));
            }
        }
        Format::Human => {
            let stride = (xs.len() / 10).max(1);
            for (x, v) in xs.iter().zip(vs).step_by(stride) {
                out.push_str(&format!(
                    "{record} {xname}={} {vname}={}\n",
                    crate::output::sig6(*x),
                    crate::output::sig6(*v)
                ));
            }
        }
    }
}

// ---------------------------------------------------------------------
// solve-volterra
// ---------------------------------------------------------------------

pub fn cmd_solve_volterra(
    cfg: &Config,
    grid_override: Option<usize>,
    tol_override: Option<f64>,
    format: Format,
) -> Result<CmdResult> {
    let q = parse_expr1(cfg.require("q")?, "t").context("config key 'q'")?;
    let kernel = parse_expr2(cfg.require("k")?, ["t", "s"]).context("config key 'k'")?;
    let sigma = parse_expr1(cfg.require("sigma")?, "t").context("config key 'sigma'")?;
    let f_set = parse_set_expr(cfg.require("F")?, &["s", "x"]).context("config key 'F'")?;
    let n = grid_override.or(cfg.integer("n")?).unwrap_or(1000);
    let rule = SelectionRule::parse(cfg.get("rule").unwrap_or("midpoint"))?;
    let tol = tol_override.or(cfg.number("tol")?).unwrap_or(1e-10);
    let max_iters = cfg.integer("max_iters")?.unwrap_or(100);

    let inst = InclusionInstance::new(&q, &kernel, &sigma, f_set, n)?;
    let kt = kernel_tau(&inst);
    let sol = solve_inclusion(&inst, rule, tol, max_iters)?;

    let mut out = String::new();
    out.push_str(&format!(
        "volterra n={} rule={} sup-k={} tau={} h0-violated={}\n",
        inst.n(),
        rule.name(),
        fmt(kt.sup_k, format),
        fmt(kt.tau, format),
        kt.h0_violated
    ));
    out.push_str(&format!(
        "volterra-solve iterations={} residual={} converged={}\n",
        sol.iterations,
        fmt(sol.residual, format),
        sol.converged
    ));
    if let (Some(a_text), Some(b_text)) = (cfg.get("a"), cfg.get("b")) {
        let a_expr = parse_expr1(a_text, "t").context("config key 'a'")?;
        let b_expr = parse_expr1(b_text, "t").context("config key 'b'")?;
        let a = Trajectory(inst.t_nodes().iter().map(|&t| a_expr.eval(&[t])).collect());
        let b = Trajectory(inst.t_nodes().iter().map(|&t| b_expr.eval(&[t])).collect());
        let br = check_bracket(&inst, &a, &b, Some(&sol.x))?;
        out.push_str(&format!(
            "volterra-bracket lower={} lower-violations={} upper={} upper-violations={} solution-within={}\n",
            br.lower_holds,
            br.lower_violations.len(),
            br.upper_holds,
            br.upper_violations.len(),
            br.solution_within
                .map_or_else(|| "none".to_string(), |v| v.to_string())
        ));
        if let Some(&j) = br.upper_violations.first() {
            out.push_str(&format!(
                "volterra-bracket-first-upper-violation t={}\n",
                fmt(inst.t_nodes()[j], format)
            ));
        }
        if let Some(&j) = br.lower_violations.first() {
            out.push_str(&format!(
                "volterra-bracket-first-lower-violation t={}\n",
                fmt(inst.t_nodes()[j], format)
            ));
        }
    }
    push_grid_values(
        &mut out,
        "volterra-value",
        "t",
        "x",
        inst.t_nodes(),
        &sol.x.0,
        format,
    );
    Ok(ok(out))
}

// ---------------------------------------------------------------------
// repro-paper
// ---------------------------------------------------------------------

pub fn cmd_repro_paper(format: Format, self_test_fail: bool) -> Result<CmdResult> {
    let rows = crate::repro::build_rows(self_test_fail)?;
    let total = rows.len();
    let failed = rows.iter().filter(|r| !r.pass).count();
    let mut out = String::new();
    match format {
        Format::Records => {
            for r in &rows {
                out.push_str(&format!(
                    "repro row={} expected={} computed={} pass={}\n",
                    r.name, r.expected, r.computed, r.pass
                ));
            }
            out.push_str(&format!(
                "repro-summary total={total} passed={} failed={failed}\n",
                total - failed
            ));
        }
        Format::Human => {
            let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
            for r in &rows {
                out.push_str(&format!(
                    "{:>4}  {:width$}  expected {}  computed {}\n",
                    if r.pass { "ok" } else { "FAIL" },
                    r.name,
                    r.expected,
                    r.computed,
                ));
            }
            out.push_str(&format!(
                "{} rows, {} passed, {} failed\n",
                total,
                total - failed,
                failed
            ));
        }
    }
    Ok(CmdResult {
        output: out,
        exit: if failed == 0 { 0 } else { 1 },
    })
}

/// Expose report internals for reuse by repro rows.
pub(crate) fn certification_summary(report: &CertificateReport) -> (usize, bool) {
    (report.violations.len(), report.verdict == Verdict::Violated)
}
