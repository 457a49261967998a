use std::io::Write;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::probe::{run_probe, Trend};
use super::report::fmt17;
use crate::criteria::Classification;
use crate::error::Result;
use crate::C64;

/// Grid `re_lo + i·step` by `im_lo + j·step`, endpoints included, ordered
/// by real part then imaginary part.
pub fn gamma_rectangle(re: (f64, f64), im: (f64, f64), step: f64) -> Vec<C64> {
    let count = |lo: f64, hi: f64| ((hi - lo) / step + 1e-9).floor() as usize + 1;
    let (nr, ni) = (count(re.0, re.1), count(im.0, im.1));
    let mut out = Vec::with_capacity(nr * ni);
    for i in 0..nr {
        for j in 0..ni {
            out.push(C64::new(re.0 + step * i as f64, im.0 + step * j as f64));
        }
    }
    out
}

/// One sweep cell. A failed cell keeps its gamma and the error message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub gamma: C64,
    pub lower: f64,
    pub upper: f64,
    pub classification: Option<Classification>,
    pub min_margin: f64,
    pub trend: Option<Trend>,
    pub ratios: Vec<f64>,
    pub error: Option<String>,
}

/// Probes `base` once per gamma. Cells run through the base execution
/// strategy; the returned rows follow the order of `gammas`.
pub fn run_sweep(base: &ExperimentConfig, gammas: &[C64]) -> Vec<SweepRow> {
    base.execution.map_slice(gammas, |&gamma| {
        let mut cfg = base.clone();
        cfg.gamma = gamma;
        match run_probe(&cfg) {
            Ok(r) => SweepRow {
                gamma,
                lower: r.verdict.lower,
                upper: r.verdict.upper,
                classification: Some(r.verdict.classification),
                min_margin: r.verdict.margins.min(),
                trend: Some(r.trend),
                ratios: r.ratios(),
                error: None,
            },
            Err(e) => SweepRow {
                gamma,
                lower: f64::NAN,
                upper: f64::NAN,
                classification: None,
                min_margin: f64::NAN,
                trend: None,
                ratios: vec![],
                error: Some(e.to_string()),
            },
        }
    })
}

pub const SWEEP_HEADER: [&str; 10] = [
    "gamma_re",
    "gamma_im",
    "lower",
    "upper",
    "classification",
    "min_margin",
    "trend",
    "final_ratio",
    "ratios",
    "error",
];

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        let ratios: Vec<String> = r.ratios.iter().map(|v| fmt17(*v)).collect();
        w.write_record([
            fmt17(r.gamma.re),
            fmt17(r.gamma.im),
            fmt17(r.lower),
            fmt17(r.upper),
            r.classification.map(|c| c.as_str()).unwrap_or("").to_string(),
            fmt17(r.min_margin),
            r.trend.map(|t| t.as_str()).unwrap_or("").to_string(),
            r.ratios.last().map(|v| fmt17(*v)).unwrap_or_default(),
            ratios.join(";"),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
