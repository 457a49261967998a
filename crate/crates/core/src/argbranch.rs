//! Continuous branches of `arg(τ - t0)` and weights built from them.
//!
//! Weights are stored as natural logarithms. On deep spirals
//! `exp(-arg)` spans hundreds of orders of magnitude, so every product,
//! power or ratio of weights is done on the logs and only materialized on
//! request.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::curve::{point_segment_distance, Curve};
use crate::error::{Error, Result};
use crate::C64;

/// Largest log-magnitude that [`Weight::values`] materializes without clamping.
pub const LOG_LIMIT: f64 = 700.0;

const JUMP_LIMIT: f64 = PI - 1e-9;

/// A continuous branch of `arg(τ_k - t0)` over the nodes of a curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ArgBranch {
    pub t0: C64,
    /// Radians per node.
    pub values: Vec<f64>,
    /// `log|τ_k - t0|` per node.
    pub log_dist: Vec<f64>,
    /// Node whose principal value fixes the `2πk` ambiguity. Always 0.
    pub anchor_index: usize,
    /// Segment `(k, k + 1)` passing through `t0`, if the polygon does. The
    /// branch is continuous on either side of it.
    pub split: Option<usize>,
}

impl ArgBranch {
    /// Smallest `C` with `|arg_k| <= C·max(0, -log|τ_k - t0|) + C` on all nodes.
    pub fn log_growth_constant(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.log_dist)
            .map(|(v, l)| v.abs() / (1.0 + (-l).max(0.0)))
            .fold(0.0, f64::max)
    }

    /// Total variation of the branch along the nodes.
    pub fn variation(&self) -> f64 {
        self.values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
    }
}

/// Unwraps `arg(τ - t0)` along the node sequence, anchored at the principal
/// value on node 0.
pub fn unwrap_arg(curve: &Curve, t0: C64) -> Result<ArgBranch> {
    let nodes = curve.nodes();
    if let Some(k) = nodes.iter().position(|&p| p == t0) {
        return Err(Error::pre(format!("sample {k} coincides with t0")));
    }
    let mut values = Vec::with_capacity(nodes.len());
    let mut split = None;
    let mut acc = (nodes[0] - t0).arg();
    values.push(acc);
    for k in 1..nodes.len() {
        let (a, b) = (nodes[k - 1] - t0, nodes[k] - t0);
        let inc = (b / a).arg();
        if inc.abs() >= JUMP_LIMIT {
            let through = point_segment_distance(t0, nodes[k - 1], nodes[k])
                <= 1e-12 * (nodes[k] - nodes[k - 1]).norm();
            if through && split.is_none() {
                split = Some(k - 1);
            } else {
                return Err(Error::BranchJump {
                    index: k - 1,
                    next: k,
                    increment: inc,
                });
            }
        }
        acc += inc;
        values.push(acc);
    }
    let log_dist = nodes.iter().map(|p| (p - t0).norm().ln()).collect();
    Ok(ArgBranch {
        t0,
        values,
        log_dist,
        anchor_index: 0,
        split,
    })
}

/// What a weight represents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeightKind {
    Power { t0: C64, lambda: f64 },
    Oscillating { t0: C64, gamma: C64 },
    Tabulated,
}

/// Positive per-node weight, held as logarithms.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    pub kind: WeightKind,
    log_values: Vec<f64>,
}

impl Weight {
    pub fn from_log(kind: WeightKind, log_values: Vec<f64>) -> Result<Self> {
        if log_values.iter().any(|v| v.is_nan() || v.is_infinite()) {
            return Err(Error::pre("weight logarithms must be finite"));
        }
        Ok(Weight { kind, log_values })
    }

    /// Tabulated weight from positive finite values.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::pre("weight values must be positive and finite"));
        }
        Ok(Weight {
            kind: WeightKind::Tabulated,
            log_values: values.iter().map(|v| v.ln()).collect(),
        })
    }

    pub fn constant(n: usize, c: f64) -> Self {
        assert!(c > 0.0 && c.is_finite());
        Weight {
            kind: WeightKind::Tabulated,
            log_values: vec![c.ln(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.log_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_values.is_empty()
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_values
    }

    /// Whether materializing would clamp at least one value.
    pub fn clamped(&self) -> bool {
        self.log_values.iter().any(|v| v.abs() > LOG_LIMIT)
    }

    /// Materialized values, clamped to `exp(±LOG_LIMIT)`; see [`Weight::clamped`].
    pub fn values(&self) -> Vec<f64> {
        self.log_values
            .iter()
            .map(|v| v.clamp(-LOG_LIMIT, LOG_LIMIT).exp())
            .collect()
    }

    pub fn mul(&self, other: &Weight) -> Weight {
        assert_eq!(self.len(), other.len(), "weights live on different curves");
        let kind = match (self.kind, other.kind) {
            (
                WeightKind::Oscillating { t0, gamma: g1 },
                WeightKind::Oscillating { t0: s0, gamma: g2 },
            ) if t0 == s0 => WeightKind::Oscillating { t0, gamma: g1 + g2 },
            _ => WeightKind::Tabulated,
        };
        Weight {
            kind,
            log_values: self
                .log_values
                .iter()
                .zip(&other.log_values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// `w^s` for a real exponent.
    pub fn powf(&self, s: f64) -> Weight {
        let kind = match self.kind {
            WeightKind::Oscillating { t0, gamma } => WeightKind::Oscillating { t0, gamma: gamma * s },
            WeightKind::Power { t0, lambda } => WeightKind::Power { t0, lambda: lambda * s },
            WeightKind::Tabulated => WeightKind::Tabulated,
        };
        Weight {
            kind,
            log_values: self.log_values.iter().map(|v| v * s).collect(),
        }
    }

    /// `w(τ)^{s(τ)}` with a per-node exponent.
    pub fn pow_field(&self, s: &[f64]) -> Weight {
        assert_eq!(self.len(), s.len());
        Weight {
            kind: WeightKind::Tabulated,
            log_values: self.log_values.iter().zip(s).map(|(v, e)| v * e).collect(),
        }
    }

    pub fn recip(&self) -> Weight {
        self.powf(-1.0)
    }
}

/// `|τ - t0|^λ` on the nodes of `curve`.
pub fn power_weight(curve: &Curve, t0: C64, lambda: f64) -> Result<Weight> {
    let nodes = curve.nodes();
    if nodes.contains(&t0) {
        return Err(Error::pre("power weight evaluated at t0"));
    }
    Weight::from_log(
        WeightKind::Power { t0, lambda },
        nodes.iter().map(|p| lambda * (p - t0).norm().ln()).collect(),
    )
}

/// `η(τ) = exp(-arg(τ - t0))`.
pub fn eta(branch: &ArgBranch) -> Weight {
    Weight {
        kind: WeightKind::Tabulated,
        log_values: branch.values.iter().map(|a| -a).collect(),
    }
}

/// `φ(τ) = |(τ - t0)^γ| = exp(Re γ·log|τ - t0| - Im γ·arg(τ - t0))`.
pub fn phi(branch: &ArgBranch, gamma: C64) -> Weight {
    Weight {
        kind: WeightKind::Oscillating {
            t0: branch.t0,
            gamma,
        },
        log_values: branch
            .log_dist
            .iter()
            .zip(&branch.values)
            .map(|(l, a)| gamma.re * l - gamma.im * a)
            .collect(),
    }
}

/// `sup(w1/w2)·sup(w2/w1)`, which is at least 1 and finite exactly when
/// the weights are equivalent on the sampled nodes.
pub fn equivalent(w1: &Weight, w2: &Weight) -> Result<f64> {
    if w1.len() != w2.len() || w1.is_empty() {
        return Err(Error::pre("weights must be tabulated on the same curve"));
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (a, b) in w1.log_values.iter().zip(&w2.log_values) {
        let d = a - b;
        lo = lo.min(d);
        hi = hi.max(d);
    }
    Ok((hi - lo).exp())
}
