//! The maximal operator on sampled curves and its weighted variants.
//!
//! For an evaluation node `t` the portion `Γ(t, ε)` only changes when `ε`
//! crosses a sample distance `|τ_k - t|`, so the supremum over `ε > 0` is a
//! maximum over the distinct realized distances. One sort per evaluation
//! node serves a whole batch of functions through prefix sums.
//!
//! Averages use node quadrature: `Σ_{|τ_k - t| < ε} m_k g_k / Σ m_k`.

use crate::argbranch::{power_weight, ArgBranch};
use crate::curve::{omega, Arc, Curve};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::C64;

/// Per-node maximal function values.
#[derive(Debug, Clone, PartialEq)]
pub struct MaximalResult {
    /// `log Mf(t_k)`; `-inf` where `Mf` vanishes.
    pub log_values: Vec<f64>,
    /// Largest radius attaining the supremum at each node.
    pub argmax_eps: Vec<f64>,
}

impl MaximalResult {
    pub fn values(&self) -> Vec<f64> {
        self.log_values
            .iter()
            .map(|v| v.clamp(f64::NEG_INFINITY, 709.0).exp())
            .collect()
    }
}

/// Supremum of portion averages of `exp(h_i)` for every input `h_i` (given
/// as logs, `-inf` for zeros). Returns `(log sup, argmax radius)` per input.
pub fn sup_averages_log(curve: &Curve, inputs: &[Vec<f64>], exec: Execution) -> Vec<MaximalResult> {
    let n = curve.len();
    let nf = inputs.len();
    if nf == 0 {
        return vec![];
    }
    for h in inputs {
        assert_eq!(h.len(), n, "input not sampled on the curve");
    }
    // per-input scaling keeps every scaled value in [0, 1]
    let scale: Vec<f64> = inputs
        .iter()
        .map(|h| h.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let masses = curve.masses();
    let mut table = vec![0.0; n * nf];
    for (i, h) in inputs.iter().enumerate() {
        if scale[i] == f64::NEG_INFINITY {
            continue;
        }
        for k in 0..n {
            table[k * nf + i] = masses[k] * (h[k] - scale[i]).exp();
        }
    }
    let nodes = curve.nodes();
    let per_t: Vec<(Vec<f64>, Vec<f64>)> = exec.map(n, |t| {
        let origin = nodes[t];
        let mut order: Vec<(u64, u32)> = nodes
            .iter()
            .enumerate()
            .map(|(k, p)| ((p - origin).norm().to_bits(), k as u32))
            .collect();
        // nonnegative floats order like their bit patterns
        order.sort_unstable();
        let mut acc = vec![0.0; nf];
        let mut best = vec![0.0; nf];
        let mut best_eps = vec![0.0; nf];
        let mut mass = 0.0;
        for j in 0..n {
            let k = order[j].1 as usize;
            mass += masses[k];
            let row = &table[k * nf..(k + 1) * nf];
            for (a, v) in acc.iter_mut().zip(row) {
                *a += v;
            }
            let d = f64::from_bits(order[j].0);
            let next = if j + 1 < n {
                f64::from_bits(order[j + 1].0)
            } else {
                f64::INFINITY
            };
            if next == d {
                continue;
            }
            let eps = if next.is_finite() { next } else { d * (1.0 + 1e-12) + f64::MIN_POSITIVE };
            for i in 0..nf {
                if acc[i] > best[i] * mass {
                    best[i] = acc[i] / mass;
                    best_eps[i] = eps;
                }
            }
        }
        (best, best_eps)
    });
    (0..nf)
        .map(|i| MaximalResult {
            log_values: per_t.iter().map(|(b, _)| b[i].ln() + scale[i]).collect(),
            argmax_eps: per_t.iter().map(|(_, e)| e[i]).collect(),
        })
        .collect()
}

fn log_abs(f: &[f64]) -> Vec<f64> {
    f.iter().map(|v| v.abs().ln()).collect()
}

fn check(curve: &Curve, f: &[f64]) -> Result<()> {
    if f.len() != curve.len() {
        return Err(Error::pre("function not sampled on the curve"));
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::pre("function values must be finite"));
    }
    Ok(())
}

/// `Mf(t) = sup_ε |Γ(t,ε)|⁻¹ ∫_{Γ(t,ε)} |f|`.
pub fn maximal(curve: &Curve, f: &[f64], exec: Execution) -> Result<MaximalResult> {
    check(curve, f)?;
    Ok(sup_averages_log(curve, &[log_abs(f)], exec).pop().unwrap())
}

/// Conjugated operator `w(t)·M(|f|/w)(t)` for a weight given by its logs.
pub fn conjugated_maximal_batch(
    curve: &Curve,
    log_f: &[Vec<f64>],
    log_w: &[f64],
    exec: Execution,
) -> Vec<MaximalResult> {
    let inputs: Vec<Vec<f64>> = log_f
        .iter()
        .map(|h| h.iter().zip(log_w).map(|(a, b)| a - b).collect())
        .collect();
    let mut out = sup_averages_log(curve, &inputs, exec);
    for r in &mut out {
        for (v, lw) in r.log_values.iter_mut().zip(log_w) {
            *v += lw;
        }
    }
    out
}

/// `M_{t0,γ} f = φ(t)·sup_ε avg(|f|/φ)` with `φ = φ_{t0,γ}` on the given branch.
pub fn weighted_maximal(
    curve: &Curve,
    f: &[f64],
    branch: &ArgBranch,
    gamma: C64,
    exec: Execution,
) -> Result<MaximalResult> {
    check(curve, f)?;
    let w = crate::argbranch::phi(branch, gamma);
    Ok(conjugated_maximal_batch(curve, &[log_abs(f)], w.log_values(), exec)
        .pop()
        .unwrap())
}

/// `M_{t0,λ}`: the conjugated operator for the power weight `|τ - t0|^λ`.
pub fn power_weighted_maximal(
    curve: &Curve,
    f: &[f64],
    t0: C64,
    lambda: f64,
    exec: Execution,
) -> Result<MaximalResult> {
    check(curve, f)?;
    let w = power_weight(curve, t0, lambda)?;
    Ok(conjugated_maximal_batch(curve, &[log_abs(f)], w.log_values(), exec)
        .pop()
        .unwrap())
}

/// The four localized pieces `χ_a M_{t0,γ} χ_b f` for `a, b ∈ {ω, Γ∖ω}`.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub arc: Arc,
    /// In order: (ω, ω), (Γ∖ω, ω), (ω, Γ∖ω), (Γ∖ω, Γ∖ω), as
    /// (output restriction, input restriction). Plain values.
    pub pieces: [Vec<f64>; 4],
}

impl Decomposition {
    pub fn sum(&self) -> Vec<f64> {
        (0..self.pieces[0].len())
            .map(|k| self.pieces.iter().map(|p| p[k]).sum())
            .collect()
    }
}

pub fn decompose(
    curve: &Curve,
    f: &[f64],
    branch: &ArgBranch,
    gamma: C64,
    delta: f64,
    exec: Execution,
) -> Result<Decomposition> {
    check(curve, f)?;
    let arc = omega(curve, branch.t0, delta)?;
    let w = crate::argbranch::phi(branch, gamma);
    let lf = log_abs(f);
    let inside: Vec<f64> = lf
        .iter()
        .enumerate()
        .map(|(k, v)| if arc.contains(k) { *v } else { f64::NEG_INFINITY })
        .collect();
    let outside: Vec<f64> = lf
        .iter()
        .enumerate()
        .map(|(k, v)| if arc.contains(k) { f64::NEG_INFINITY } else { *v })
        .collect();
    let r = conjugated_maximal_batch(curve, &[inside, outside], w.log_values(), exec);
    let restrict = |m: &MaximalResult, on_arc: bool| -> Vec<f64> {
        m.values()
            .into_iter()
            .enumerate()
            .map(|(k, v)| if arc.contains(k) == on_arc { v } else { 0.0 })
            .collect()
    };
    let pieces = [
        restrict(&r[0], true),
        restrict(&r[0], false),
        restrict(&r[1], true),
        restrict(&r[1], false),
    ];
    Ok(Decomposition { arc, pieces })
}

/// Exhaustive reference: every node, every realized distance, direct
/// node-quadrature average over `|τ - t| <= d`. Cubic; meant for tests.
pub fn maximal_bruteforce(curve: &Curve, f: &[f64]) -> Vec<f64> {
    let nodes = curve.nodes();
    let m = curve.masses();
    nodes
        .iter()
        .map(|&t| {
            nodes
                .iter()
                .map(|&s| {
                    let r = (s - t).norm();
                    let (mut num, mut den) = (0.0, 0.0);
                    for (k, p) in nodes.iter().enumerate() {
                        if (p - t).norm() <= r {
                            num += m[k] * f[k].abs();
                            den += m[k];
                        }
                    }
                    num / den
                })
                .fold(0.0, f64::max)
        })
        .collect()
}
