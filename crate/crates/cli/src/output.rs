//! Report and table writers. Floats carry 17 significant digits.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use qic_core::{CapacityResult, ChannelScenario, FieldGrid, Generator, SmearingKind, ValidationReport};

pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn array(xs: &[f64]) -> String {
    format!("[{}]", xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(", "))
}

fn quoted(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn detector(out: &mut String, table: &str, g: &Generator) {
    let _ = writeln!(out, "\n[{table}]");
    match g.smearing.kind() {
        SmearingKind::Gaussian { sigma } => {
            let _ = writeln!(out, "kind = \"gaussian\"\nsigma = {}", num(sigma));
        }
        SmearingKind::HardShell { r_inner, r_outer } => {
            let _ = writeln!(out, "kind = \"hard_shell\"\nr_inner = {}\nr_outer = {}", num(r_inner), num(r_outer));
        }
    }
    let _ = writeln!(out, "center = {}", array(g.smearing.center()));
    let _ = writeln!(out, "time = {}\ncoupling = {}\ngap = {}", num(g.time), num(g.coupling), num(g.gap));
}

pub fn capacity_report(scenario_name: &str, sc: &ChannelScenario, r: &CapacityResult) -> String {
    let mut out = String::new();
    let unit = match r.base {
        qic_core::LogBase::Two => "bits",
        qic_core::LogBase::E => "nats",
    };
    let _ = writeln!(out, "command = \"capacity\"");
    let _ = writeln!(out, "scenario = {}", quoted(scenario_name));
    let _ = writeln!(out, "dimension = {}", sc.dimension().get());
    let _ = writeln!(out, "log_base = \"{}\"\nunit = \"{unit}\"", r.base);
    let _ = writeln!(out, "quadrature_error_bound = {}", num(r.error_bound));
    let geometry: Vec<String> = sc.geometry.iter().map(|g| quoted(&format!("{g:?}").to_lowercase())).collect();
    let _ = writeln!(out, "geometry = [{}]", geometry.join(", "));
    let warnings: Vec<String> = sc.warnings.iter().map(|w| quoted(w)).collect();
    let _ = writeln!(out, "warnings = [{}]", warnings.join(", "));
    let _ = writeln!(out, "p_bit0 = {}", array(&r.p0.probabilities));
    let _ = writeln!(out, "p_bit1 = {}", array(&r.p1.probabilities));
    for e in &r.entries {
        let _ = writeln!(out, "\n[[capacity]]");
        let _ = writeln!(out, "subset = \"{}\"", e.subset);
        let _ = writeln!(out, "value = {}", num(e.capacity));
        let _ = writeln!(out, "q_star = {}", num(e.q_star));
        let _ = writeln!(out, "q_tolerance = {}", num(e.tolerance));
        let _ = writeln!(out, "quadrature_error_bound = {}", num(r.error_bound));
    }
    detector(&mut out, "sender", &sc.alice);
    for b in &sc.bobs {
        detector(&mut out, "[receivers]", b);
    }
    out
}

/// Length used to make weighting values dimensionless: the Gaussian width
/// or outer radius of the first generator.
pub fn length_scale(g: &Generator) -> (f64, &'static str) {
    match g.smearing.kind() {
        SmearingKind::Gaussian { sigma } => (sigma, "sigma"),
        SmearingKind::HardShell { r_outer, .. } => (r_outer, "r_outer"),
    }
}

pub fn grid_table(grids: &[FieldGrid], gens: &[Generator], skipped: &[usize]) -> String {
    let mut out = String::new();
    let first = &grids[0];
    let d = first.dimension.get();
    let (scale, what) = length_scale(&gens[0]);
    let (p1, p2) = ((d as f64 + 1.0) / 2.0, (d as f64 - 1.0) / 2.0);
    let _ = writeln!(out, "# weighting functions of {} capsule mode(s), d = {d}", first.modes.len());
    let _ = writeln!(out, "# L = {} ({what} of generator 1); coordinates t, x, y[, z] in raw units", num(scale));
    let _ = writeln!(out, "# F1_m, G1_m are L^{p1} F^(1), L^{p1} G^(1) of mode m; F2_m, G2_m are L^{p2} F^(2), L^{p2} G^(2)");
    if !skipped.is_empty() {
        let _ = writeln!(out, "# generators skipped as linearly dependent: {skipped:?}");
    }
    let mut header = vec!["t".to_string()];
    header.extend(["x", "y", "z"].iter().take(d).map(|s| s.to_string()));
    for &m in &first.modes {
        for name in ["F1", "F2", "G1", "G2"] {
            header.push(format!("{name}_{}", m + 1));
        }
    }
    let _ = writeln!(out, "# {}", header.join(","));
    let (s1, s2) = (scale.powf(p1), scale.powf(p2));
    for g in grids {
        for (p, x) in g.points.iter().enumerate() {
            let mut row = vec![num(g.t)];
            row.extend(x.iter().map(|&v| num(v)));
            for k in 0..g.modes.len() {
                row.push(num(s1 * g.f1[k][p]));
                row.push(num(s2 * g.f2[k][p]));
                row.push(num(s1 * g.g1[k][p]));
                row.push(num(s2 * g.g2[k][p]));
            }
            let _ = writeln!(out, "{}", row.join(","));
        }
    }
    out
}

pub fn validation_lines(r: &ValidationReport) -> String {
    let mut out = String::new();
    for c in &r.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(
            out,
            "[{tag}] {:<17} measured {:.3e} threshold {:.1e}  {}",
            c.name, c.measured, c.threshold, c.detail
        );
    }
    out
}

/// Writes `text` to `path` (through a sibling temporary file, so a failed
/// run leaves nothing behind) or to stdout.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
        Some(path) => {
            let tmp = path.with_extension("partial");
            std::fs::write(&tmp, text).with_context(|| format!("writing {}", tmp.display()))?;
            std::fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))
        }
    }
}
