use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::curve::{
    generate_graded_circle, generate_log_spiral, generate_mixed_spirality, generate_polyline, Curve, Grading,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::norms::{make_exponent, ExponentField, ExponentKind};
use crate::C64;

/// How deep a spiral reaches toward its center at a given sample count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Depth {
    /// `r_min = r_max·10^-(n / samples)`: refinement adds decades.
    PerDecade { samples: usize },
    Fixed { r_min: f64 },
}

impl Depth {
    fn r_min(&self, r_max: f64, n: usize) -> f64 {
        match *self {
            Depth::PerDecade { samples } => r_max * 10f64.powf(-(n as f64) / samples.max(1) as f64),
            Depth::Fixed { r_min } => r_min,
        }
    }
}

fn default_budget() -> usize {
    128
}

fn one() -> f64 {
    1.0
}

/// A family of curves indexed by sample count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveSpec {
    /// Circle graded toward `t0 = radius` by `n / budget_per_decade` decades.
    Circle {
        radius: f64,
        #[serde(default = "default_budget")]
        budget_per_decade: usize,
    },
    LogSpiral {
        delta: f64,
        #[serde(default = "one")]
        r_max: f64,
        depth: Depth,
    },
    Mixed {
        alpha: f64,
        beta: f64,
        #[serde(default = "one")]
        r_max: f64,
        depth: Depth,
    },
    Polyline {
        vertices: Vec<C64>,
        closed: bool,
        marked: usize,
        #[serde(default = "default_budget")]
        budget_per_decade: usize,
    },
    /// A fixed curve; refinement levels are ignored.
    File { path: PathBuf },
}

impl CurveSpec {
    pub fn build(&self, n: usize) -> Result<Curve> {
        match self {
            CurveSpec::Circle {
                radius,
                budget_per_decade,
            } => {
                let g = Grading::new((n / budget_per_decade.max(&1)) as f64, Grading::DEFAULT_PER_DECADE);
                generate_graded_circle(*radius, n, g)
            }
            CurveSpec::LogSpiral { delta, r_max, depth } => {
                generate_log_spiral(*delta, depth.r_min(*r_max, n), *r_max, n)
            }
            CurveSpec::Mixed {
                alpha,
                beta,
                r_max,
                depth,
            } => generate_mixed_spirality(*alpha, *beta, depth.r_min(*r_max, n), *r_max, n),
            CurveSpec::Polyline {
                vertices,
                closed,
                marked,
                budget_per_decade,
            } => {
                let g = Grading::new((n / budget_per_decade.max(&1)) as f64, Grading::DEFAULT_PER_DECADE);
                generate_polyline(vertices, *closed, n, Some(*marked), g)
            }
            CurveSpec::File { path } => Curve::read_json(path),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExponentSpec {
    Constant { p: f64 },
    /// Dini–Lipschitz profile from `p_t0` at the marked point to `p_far`.
    Profile { p_t0: f64, p_far: f64 },
}

impl ExponentSpec {
    pub fn build(&self, curve: &Curve, t0: C64) -> Result<ExponentField> {
        match *self {
            ExponentSpec::Constant { p } => make_exponent(curve, ExponentKind::Constant { p }),
            ExponentSpec::Profile { p_t0, p_far } => make_exponent(curve, ExponentKind::Profile { t0, p_t0, p_far }),
        }
    }
}

/// Test functions fed to the probe, in the unweighted picture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FamilySpec {
    /// Indicators of `ω(t0, d/4·2^-j)` for `j < dyadic_arcs`.
    pub dyadic_arcs: usize,
    /// Further arc indicators every `deep_arc_step` decades down to the
    /// finest resolved scale; 0 disables them.
    pub deep_arc_step: f64,
    /// Near-critical powers `|τ - t0|^(-1/p(τ) + m)`.
    pub margins: Vec<f64>,
    /// Seeded random piecewise-constant functions with values in `[0, 1)`.
    pub random: usize,
    pub random_pieces: usize,
}

impl Default for FamilySpec {
    fn default() -> Self {
        FamilySpec {
            dyadic_arcs: 6,
            deep_arc_step: 3.0,
            margins: vec![0.02, 0.1, 0.25],
            random: 8,
            random_pieces: 16,
        }
    }
}

/// Source of the spirality indices that enter the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IndexSource {
    /// Estimated on the finest level with default grids.
    Measured,
    Given { alpha: f64, beta: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub curve: CurveSpec,
    pub exponent: ExponentSpec,
    pub gamma: C64,
    #[serde(default)]
    pub family: FamilySpec,
    pub levels: Vec<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "measured")]
    pub indices: IndexSource,
    /// Overrides the curve's marked point.
    #[serde(default)]
    pub t0: Option<C64>,
    #[serde(default)]
    pub execution: Execution,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn measured() -> IndexSource {
    IndexSource::Measured
}

impl ExperimentConfig {
    pub fn new(curve: CurveSpec, exponent: ExponentSpec, gamma: C64, levels: Vec<usize>) -> Self {
        ExperimentConfig {
            curve,
            exponent,
            gamma,
            family: FamilySpec::default(),
            levels,
            seed: 0,
            indices: IndexSource::Measured,
            t0: None,
            execution: Execution::default(),
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels.is_empty() {
            return Err(Error::pre("at least one refinement level is required"));
        }
        if self.levels.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::pre("refinement levels must be strictly increasing"));
        }
        if !(self.gamma.re.is_finite() && self.gamma.im.is_finite()) {
            return Err(Error::pre("gamma must be finite"));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: ExperimentConfig = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn marked_point(&self, curve: &Curve) -> Result<C64> {
        match self.t0 {
            Some(t) => Ok(t),
            None => curve.require_marked(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_roundtrip() {
        let mut c = ExperimentConfig::new(
            CurveSpec::Mixed {
                alpha: -1.0,
                beta: 1.0,
                r_max: 1.0,
                depth: Depth::PerDecade { samples: 256 },
            },
            ExponentSpec::Profile { p_t0: 1.8, p_far: 2.2 },
            C64::new(0.0, 0.1),
            vec![256, 512],
        );
        c.seed = 7;
        let text = serde_json::to_string_pretty(&c).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c);
        c.levels = vec![512, 256];
        assert!(c.validate().is_err());
    }

    #[test]
    fn per_decade_depth() {
        let s = CurveSpec::LogSpiral {
            delta: 1.0,
            r_max: 1.0,
            depth: Depth::PerDecade { samples: 256 },
        };
        let c = s.build(1024).unwrap();
        assert!((c.min_distance(C64::new(0.0, 0.0)) - 1e-4).abs() < 1e-16);
    }
}
