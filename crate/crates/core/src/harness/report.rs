//! CSV and JSON writers. Floats are written with 17 significant digits.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::probe::ProbeReport;
use crate::argbranch::Weight;
use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::maximal::MaximalResult;
use crate::submult::SubmultSamples;

pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn node_arclen(curve: &Curve) -> &[f64] {
    &curve.cumlen()[..curve.len()]
}

/// Columns `arclen, re, im, weight_log`.
pub fn write_weight_csv<W: Write>(curve: &Curve, w: &Weight, out: W) -> Result<()> {
    if w.len() != curve.len() {
        return Err(Error::pre("weight is not tabulated on this curve"));
    }
    let mut wr = csv::Writer::from_writer(out);
    wr.write_record(["arclen", "re", "im", "weight_log"])?;
    for ((s, z), lw) in node_arclen(curve).iter().zip(curve.nodes()).zip(w.log_values()) {
        wr.write_record([fmt17(*s), fmt17(z.re), fmt17(z.im), fmt17(*lw)])?;
    }
    wr.flush()?;
    Ok(())
}

/// Columns `x, rho, log_x, log_rho`.
pub fn write_submult_csv<W: Write>(s: &SubmultSamples, out: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(out);
    wr.write_record(["x", "rho", "log_x", "log_rho"])?;
    for ((x, v), lv) in s.xs.iter().zip(&s.vals).zip(&s.log_vals) {
        wr.write_record([fmt17(*x), fmt17(*v), fmt17(x.ln()), fmt17(*lv)])?;
    }
    wr.flush()?;
    Ok(())
}

/// Columns `arclen, Mf, argmax_eps`.
pub fn write_maximal_csv<W: Write>(curve: &Curve, r: &MaximalResult, out: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(out);
    wr.write_record(["arclen", "Mf", "argmax_eps"])?;
    for ((s, v), e) in node_arclen(curve).iter().zip(r.values()).zip(&r.argmax_eps) {
        wr.write_record([fmt17(*s), fmt17(v), fmt17(*e)])?;
    }
    wr.flush()?;
    Ok(())
}

/// One row per level: `n, decades, ratio, witness`.
pub fn write_probe_csv<W: Write>(report: &ProbeReport, out: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(out);
    wr.write_record(["n", "decades", "ratio", "witness"])?;
    for l in &report.levels {
        wr.write_record([l.n.to_string(), fmt17(l.decades), fmt17(l.ratio), l.witness.clone()])?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}
