//! Output formatting. Machine-readable records are line-oriented
//! `name key=value ...` with a stable field order and full-precision
//! floats (Rust's shortest round-trip representation), so identical
//! runs produce byte-identical output. Human output rounds to six
//! significant digits.

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Human,
    Records,
}

/// Full-precision float for records.
pub fn full(v: f64) -> String {
    format!("{v}")
}

pub fn opt_full(v: Option<f64>) -> String {
    v.map_or_else(|| "none".into(), full)
}

/// Six significant digits for human output.
pub fn sig6(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if !(-4..=8).contains(&exp) {
        return format!("{v:.5e}");
    }
    let decimals = (5 - exp).max(0) as usize;
    let s = format!("{v:.decimals$}");
    let trimmed = s.trim_end_matches('0').trim_end_matches('.');
    if trimmed.is_empty() || trimmed == "-" {
        "0".into()
    } else {
        trimmed.to_string()
    }
}

pub fn fmt(v: f64, format: Format) -> String {
    match format {
        Format::Human => sig6(v),
        Format::Records => full(v),
    }
}
