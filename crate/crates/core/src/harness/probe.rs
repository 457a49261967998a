//! Empirical boundedness probes.
//!
//! `M` is bounded on the weighted space exactly when the conjugated operator
//! `M_{t0,γ}` is bounded on the unweighted one, so the probe measures
//! `‖M_{t0,γ} g‖_{p(·)} / ‖g‖_{p(·)}` for a family of test functions `g` on a
//! sequence of ever finer (and deeper) curves. A ratio that keeps growing
//! is evidence of unboundedness; a ratio that settles is only consistent
//! with boundedness.

use log::{debug, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, FamilySpec, IndexSource};
use crate::argbranch::{phi, unwrap_arg};
use crate::criteria::{check_main, Verdict};
use crate::curve::{omega, Curve};
use crate::error::Result;
use crate::maximal::conjugated_maximal_batch;
use crate::norms::{luxemburg_norm_log, ExponentField};
use crate::submult::{spirality_indices_with, IndexPair, WOptions};
use crate::C64;

/// Factor separating "growing" from "stable" over the last three levels.
pub const GROWTH_FACTOR: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trend {
    Stable,
    Growing,
    Indeterminate,
}

impl Trend {
    pub fn as_str(self) -> &'static str {
        match self {
            Trend::Stable => "stable",
            Trend::Growing => "growing",
            Trend::Indeterminate => "indeterminate",
        }
    }
}

/// Growing: strictly increasing over the last three levels with an overall
/// gain of at least [`GROWTH_FACTOR`]. Stable: the last three stay within
/// that factor of each other. Anything else, or fewer than three levels, is
/// indeterminate.
pub fn classify_trend(ratios: &[f64]) -> Trend {
    if ratios.len() < 3 || ratios.iter().any(|r| !r.is_finite()) {
        return Trend::Indeterminate;
    }
    let tail = &ratios[ratios.len() - 3..];
    if tail[0] < tail[1] && tail[1] < tail[2] && tail[2] >= GROWTH_FACTOR * tail[0] {
        return Trend::Growing;
    }
    let hi = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    if hi < GROWTH_FACTOR * lo {
        Trend::Stable
    } else {
        Trend::Indeterminate
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub n: usize,
    /// `log10(d_{t0} / min_k |τ_k - t0|)`.
    pub decades: f64,
    pub ratio: f64,
    /// Name of the test function attaining `ratio`.
    pub witness: String,
    pub ratios: Vec<(String, f64)>,
    pub skipped: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub gamma: C64,
    pub p_at_t0: f64,
    pub indices: IndexPair,
    pub verdict: Verdict,
    pub levels: Vec<LevelReport>,
    pub trend: Trend,
}

impl ProbeReport {
    pub fn ratios(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.ratio).collect()
    }
}

/// Test family in log-magnitude form.
pub fn test_family(curve: &Curve, t0: C64, p: &ExponentField, spec: &FamilySpec, seed: u64) -> Vec<(String, Vec<f64>)> {
    let n = curve.len();
    let mut out = Vec::new();
    let indicator = |delta: f64| -> Option<Vec<f64>> {
        let arc = omega(curve, t0, delta).ok()?;
        Some(
            arc.mask()
                .iter()
                .map(|&m| if m { 0.0 } else { f64::NEG_INFINITY })
                .collect(),
        )
    };
    let d = curve.d_t(t0);
    for j in 0..spec.dyadic_arcs {
        if let Some(g) = indicator(d / 4.0 * 0.5f64.powi(j as i32)) {
            out.push((format!("arc{j}"), g));
        }
    }
    if spec.deep_arc_step > 0.0 {
        let floor = 10.0 * curve.min_distance(t0);
        let mut k = 1;
        loop {
            let delta = d / 4.0 * 10f64.powf(-spec.deep_arc_step * k as f64);
            if delta <= floor {
                break;
            }
            if let Some(g) = indicator(delta) {
                out.push((format!("deep{k}"), g));
            }
            k += 1;
        }
    }
    let logd: Vec<f64> = curve.nodes().iter().map(|z| (z - t0).norm().ln()).collect();
    for &m in &spec.margins {
        let g = logd
            .iter()
            .zip(&p.values)
            .map(|(l, pk)| (m - 1.0 / pk) * l)
            .collect();
        out.push((format!("ext{m}"), g));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..spec.random {
        let mut cuts: Vec<usize> = (0..spec.random_pieces.saturating_sub(1))
            .map(|_| rng.gen_range(0..n))
            .collect();
        cuts.push(n);
        cuts.sort_unstable();
        let mut g = Vec::with_capacity(n);
        let mut start = 0;
        for &c in &cuts {
            let v: f64 = rng.gen();
            let lv = v.ln();
            g.extend(std::iter::repeat_n(lv, c - start));
            start = c;
        }
        out.push((format!("rnd{i}"), g));
    }
    out
}

fn probe_level(config: &ExperimentConfig, n: usize) -> Result<(LevelReport, Curve, C64, ExponentField)> {
    let curve = config.curve.build(n)?;
    let t0 = config.marked_point(&curve)?;
    let branch = unwrap_arg(&curve, t0)?;
    let log_phi = phi(&branch, config.gamma).log_values().to_vec();
    let p = config.exponent.build(&curve, t0)?;
    let family = test_family(&curve, t0, &p, &config.family, config.seed);
    let inputs: Vec<Vec<f64>> = family.iter().map(|(_, g)| g.clone()).collect();
    let results = conjugated_maximal_batch(&curve, &inputs, &log_phi, config.execution);
    let mut ratios = Vec::new();
    let mut skipped = Vec::new();
    for ((name, g), m) in family.iter().zip(&results) {
        let r = luxemburg_norm_log(&curve, &m.log_values, &p)
            .and_then(|num| luxemburg_norm_log(&curve, g, &p).map(|den| (num - den).exp()));
        match r {
            Ok(v) if v.is_finite() => ratios.push((name.clone(), v)),
            Ok(v) => {
                warn!("level {n}: test function {name} gave ratio {v}; skipped");
                skipped.push(name.clone());
            }
            Err(e) => {
                warn!("level {n}: test function {name} skipped: {e}");
                skipped.push(name.clone());
            }
        }
    }
    let (witness, ratio) = ratios
        .iter()
        .cloned()
        .fold((String::new(), f64::NAN), |acc, (k, v)| if acc.1.is_nan() || v > acc.1 { (k, v) } else { acc });
    let decades = (curve.d_t(t0) / curve.min_distance(t0)).log10();
    debug!("level {n}: {decades:.1} decades, ratio {ratio:.4} ({witness})");
    Ok((
        LevelReport {
            n,
            decades,
            ratio,
            witness,
            ratios,
            skipped,
        },
        curve,
        t0,
        p,
    ))
}

/// Runs every refinement level of `config` and compares the trend with the
/// verdict of the sufficient condition.
pub fn run_probe(config: &ExperimentConfig) -> Result<ProbeReport> {
    config.validate()?;
    let mut levels = Vec::with_capacity(config.levels.len());
    let mut finest = None;
    for &n in &config.levels {
        let (report, curve, t0, p) = probe_level(config, n)?;
        levels.push(report);
        finest = Some((curve, t0, p));
    }
    let (curve, t0, p) = finest.expect("validated nonempty levels");
    let indices = match config.indices {
        IndexSource::Measured => spirality_indices_with(&curve, t0, &WOptions::default(), config.execution)?,
        IndexSource::Given { alpha, beta } => IndexPair::new(alpha, beta),
    };
    let verdict = check_main(p.at_t0, config.gamma, &indices)?;
    let ratios: Vec<f64> = levels.iter().map(|l| l.ratio).collect();
    Ok(ProbeReport {
        gamma: config.gamma,
        p_at_t0: p.at_t0,
        indices,
        verdict,
        trend: classify_trend(&ratios),
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trend_rules() {
        assert_eq!(classify_trend(&[1.0, 2.0]), Trend::Indeterminate);
        assert_eq!(classify_trend(&[5.0, 1.0, 1.2, 1.3]), Trend::Stable);
        assert_eq!(classify_trend(&[1.0, 1.3, 1.6]), Trend::Growing);
        assert_eq!(classify_trend(&[1.0, 1.2, 1.45]), Trend::Stable);
        assert_eq!(classify_trend(&[1.0, 2.0, 1.9]), Trend::Indeterminate);
    }
}
