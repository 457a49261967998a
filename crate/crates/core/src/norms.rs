//! Variable exponents, the modular, Luxemburg norms and the `A_p` estimator.
//!
//! Function magnitudes and weights enter in log form wherever they can get
//! large, and the norm is returned as a logarithm by the `_log` variants so
//! that weighted norms on deep curves never overflow.

use serde::{Deserialize, Serialize};

use crate::argbranch::Weight;
use crate::curve::{clip_segment, Curve};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::C64;

/// How an exponent field is built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ExponentKind {
    Constant { p: f64 },
    /// `p(τ) = p_t0 + (p_far - p_t0)·min(1, 1/(-log|τ - t0|))`: Dini–Lipschitz
    /// at `t0` with constant `|p_far - p_t0|`.
    Profile { t0: C64, p_t0: f64, p_far: f64 },
    Table { values: Vec<f64> },
}

/// A sampled variable exponent with cached bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentField {
    pub kind: ExponentKind,
    pub values: Vec<f64>,
    pub p_min: f64,
    pub p_max: f64,
    /// Measured `max |p(τ) - p(t)|·(-log|τ - t|)` over sampled pairs with `|τ - t| <= 1/2`.
    pub dini_constant: f64,
    /// Value at (or limit toward) the marked point.
    pub at_t0: f64,
}

impl ExponentField {
    pub fn is_constant(&self) -> bool {
        self.p_min == self.p_max && self.at_t0 == self.p_min
    }

    /// Minimum of `p` over the nodes selected by `mask`, together with the
    /// value at `t0` (which lies in the closure of every arc around it).
    pub fn p_star_on(&self, mask: &[bool]) -> f64 {
        self.values
            .iter()
            .zip(mask)
            .filter(|(_, &m)| m)
            .map(|(v, _)| *v)
            .fold(self.at_t0, f64::min)
    }

    /// `p_*` over the whole curve.
    pub fn p_star(&self) -> f64 {
        self.p_min.min(self.at_t0)
    }
}

fn profile_value(r: f64, p_t0: f64, p_far: f64) -> f64 {
    let l = -r.ln();
    let g = if l <= 1.0 { 1.0 } else { 1.0 / l };
    p_t0 + (p_far - p_t0) * g
}

/// Builds and validates an exponent field on `curve`.
pub fn make_exponent(curve: &Curve, kind: ExponentKind) -> Result<ExponentField> {
    let nodes = curve.nodes();
    let (values, at_t0) = match &kind {
        ExponentKind::Constant { p } => (vec![*p; nodes.len()], *p),
        ExponentKind::Profile { t0, p_t0, p_far } => (
            nodes
                .iter()
                .map(|z| profile_value((z - t0).norm(), *p_t0, *p_far))
                .collect(),
            *p_t0,
        ),
        ExponentKind::Table { values } => {
            if values.len() != nodes.len() {
                return Err(Error::pre(format!(
                    "exponent table has {} values for {} samples",
                    values.len(),
                    nodes.len()
                )));
            }
            let at = curve
                .marked_point()
                .map(|t0| values[curve.nearest_node(t0)])
                .unwrap_or(values[0]);
            (values.clone(), at)
        }
    };
    if values.iter().chain([&at_t0]).any(|&v| !(v > 1.0 && v.is_finite())) {
        return Err(Error::pre("exponent values must lie in (1, inf)"));
    }
    let p_min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let p_max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let dini_constant = dini_constant(curve, &values);
    Ok(ExponentField {
        kind,
        values,
        p_min,
        p_max,
        dini_constant,
        at_t0,
    })
}

/// Pair-sampled Dini–Lipschitz constant: a strided subset of nodes plus the
/// nodes nearest the marked point, all pairs among them.
pub fn dini_constant(curve: &Curve, values: &[f64]) -> f64 {
    let n = curve.len();
    let stride = n.div_ceil(2048).max(1);
    let mut pick: Vec<usize> = (0..n).step_by(stride).collect();
    if let Some(t0) = curve.marked_point() {
        let d = curve.distances(t0);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
        pick.extend(order.into_iter().take(256));
        pick.sort_unstable();
        pick.dedup();
    }
    let nodes = curve.nodes();
    let mut best: f64 = 0.0;
    for (i, &a) in pick.iter().enumerate() {
        for &b in &pick[i + 1..] {
            let r = (nodes[a] - nodes[b]).norm();
            if r <= 0.5 && r > 0.0 {
                best = best.max((values[a] - values[b]).abs() * -r.ln());
            }
        }
    }
    best
}

/// Magnitudes of a complex sampled function.
pub fn magnitudes(f: &[C64]) -> Vec<f64> {
    f.iter().map(|z| z.norm()).collect()
}

/// `log|f·w|` per node, `-inf` where `f` vanishes.
pub fn log_product(f: &[f64], w: &Weight) -> Vec<f64> {
    f.iter()
        .zip(w.log_values())
        .map(|(v, lw)| v.abs().ln() + lw)
        .collect()
}

/// Modular in log form: `Σ m_k exp(p_k (h_k - log λ))` where `h = log|f w|`.
pub fn modular_log(curve: &Curve, h: &[f64], p: &ExponentField, log_lambda: f64) -> f64 {
    let mut sum = 0.0;
    for ((hk, pk), mk) in h.iter().zip(&p.values).zip(curve.masses()) {
        if *hk == f64::NEG_INFINITY {
            continue;
        }
        let e = pk * (hk - log_lambda) + mk.ln();
        if e > 709.0 {
            return f64::INFINITY;
        }
        sum += e.exp();
    }
    sum
}

/// `∫ |f w / λ|^{p(τ)} |dτ|` by trapezoidal node quadrature.
pub fn modular(curve: &Curve, f: &[f64], w: &Weight, p: &ExponentField, lambda: f64) -> Result<f64> {
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(Error::pre("lambda must be positive"));
    }
    check_lengths(curve, f, w, p)?;
    Ok(modular_log(curve, &log_product(f, w), p, lambda.ln()))
}

fn check_lengths(curve: &Curve, f: &[f64], w: &Weight, p: &ExponentField) -> Result<()> {
    let n = curve.len();
    if f.len() != n || w.len() != n || p.values.len() != n {
        return Err(Error::pre("function, weight and exponent must be sampled on the curve"));
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::pre("function values must be finite"));
    }
    Ok(())
}

/// Relative tolerance of the Luxemburg bisection on `log λ`.
pub const NORM_TOL: f64 = 1e-13;

/// Logarithm of the Luxemburg norm of `exp(h)`; `-inf` for the zero function.
pub fn luxemburg_norm_log(curve: &Curve, h: &[f64], p: &ExponentField) -> Result<f64> {
    let top = h.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    if top.is_nan() || top == f64::INFINITY {
        return Err(Error::pre("function magnitudes must be finite"));
    }
    let mut hi = top + (curve.total_length() + 1.0).ln();
    if modular_log(curve, h, p, hi) > 1.0 {
        return Err(Error::NotLocallyIntegrable);
    }
    let step = 18.0 * std::f64::consts::LN_10;
    let mut lo = top - step;
    let mut tries = 0;
    while modular_log(curve, h, p, lo) < 1.0 {
        hi = lo;
        lo -= step;
        tries += 1;
        if tries > 40 {
            // essentially all mass underflows: the norm is below any useful scale
            return Ok(lo);
        }
    }
    while hi - lo > NORM_TOL {
        let mid = 0.5 * (lo + hi);
        if modular_log(curve, h, p, mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// `inf{λ > 0 : modular(f, w, p, λ) <= 1}`.
pub fn luxemburg_norm(curve: &Curve, f: &[f64], w: &Weight, p: &ExponentField) -> Result<f64> {
    check_lengths(curve, f, w, p)?;
    Ok(luxemburg_norm_log(curve, &log_product(f, w), p)?.exp())
}

/// `(Σ m_k |f_k w_k|^p)^{1/p}` for a constant exponent.
pub fn classic_p_norm(curve: &Curve, f: &[f64], w: &Weight, p: f64) -> f64 {
    let h = log_product(f, w);
    let top = h.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return 0.0;
    }
    let s: f64 = h
        .iter()
        .zip(curve.masses())
        .map(|(hk, m)| m * (p * (hk - top)).exp())
        .sum();
    top.exp() * s.powf(1.0 / p)
}

/// `log ∫_{s0}^{s1} exp(a + (b - a)s) ds`.
fn log_int_exp_linear(a: f64, b: f64, s0: f64, s1: f64) -> f64 {
    let c = b - a;
    let w = s1 - s0;
    let x = c * w;
    if x.abs() < 1e-8 {
        return a + c * 0.5 * (s0 + s1) + w.ln();
    }
    // log((e^x - 1)/c) for either sign of x
    let l = if x > 0.0 {
        x + (-(-x).exp_m1()).ln() - c.ln()
    } else {
        (-x.exp_m1()).ln() - (-c).ln()
    };
    a + c * s0 + l
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `log ∫_{Γ(t, ε)} w^s` with `log w` interpolated linearly along segments.
fn log_portion_integral(curve: &Curve, lw: &[f64], s: f64, t: C64, eps: f64) -> f64 {
    let mut acc = f64::NEG_INFINITY;
    for k in 0..curve.segment_count() {
        let (a, b) = curve.segment(k);
        if let Some((s0, s1)) = clip_segment(a, b, t, eps) {
            let (ia, ib) = curve.segment_nodes(k);
            let v = curve.seglen()[k].ln() + log_int_exp_linear(s * lw[ia], s * lw[ib], s0, s1);
            acc = log_add(acc, v);
        }
    }
    acc
}

/// Default `A_p` grids: about `max_t` nodes spread evenly in log-distance
/// to the marked point (or strided by index without one).
pub fn ap_t_grid(curve: &Curve, max_t: usize) -> Vec<usize> {
    let n = curve.len();
    let Some(t0) = curve.marked_point() else {
        let stride = n.div_ceil(max_t.max(1)).max(1);
        return (0..n).step_by(stride).collect();
    };
    let d = curve.distances(t0);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let (lo, hi) = (d[order[0]].ln(), d[order[n - 1]].ln());
    let mut out = Vec::with_capacity(max_t);
    let mut j = 0;
    for i in 0..max_t {
        let target = lo + (hi - lo) * i as f64 / (max_t.max(2) - 1) as f64;
        while j + 1 < n && d[order[j]].ln() < target {
            j += 1;
        }
        out.push(order[j]);
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Realized radii at node `k`: about `count` log-spread sample distances
/// plus the largest one, nudged up so each disk includes its defining node.
pub fn ap_eps_grid(curve: &Curve, k: usize, count: usize) -> Vec<f64> {
    let t = curve.nodes()[k];
    let mut d: Vec<f64> = curve.distances(t).into_iter().filter(|&x| x > 0.0).collect();
    d.sort_by(f64::total_cmp);
    d.dedup();
    if d.is_empty() {
        return vec![];
    }
    let (lo, hi) = (d[0].ln(), d[d.len() - 1].ln());
    let mut out = Vec::with_capacity(count + 1);
    let mut j = 0;
    for i in 0..count {
        let target = lo + (hi - lo) * i as f64 / (count.max(2) - 1) as f64;
        while j + 1 < d.len() && d[j].ln() < target {
            j += 1;
        }
        out.push(d[j] * (1.0 + 1e-12));
    }
    out.push(d[d.len() - 1] * (1.0 + 1e-12));
    out.dedup();
    out
}

/// Grid lower bound for the `A_p` characteristic of `w` with constant `p`.
/// `t_grid` holds node indices; without an explicit `eps_grid` each point
/// uses its own realized radii from [`ap_eps_grid`].
pub fn muckenhoupt_ap(
    curve: &Curve,
    w: &Weight,
    p: f64,
    t_grid: &[usize],
    eps_grid: Option<&[f64]>,
    exec: Execution,
) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::pre("A_p needs a constant exponent in (1, inf)"));
    }
    if w.len() != curve.len() {
        return Err(Error::pre("weight is not tabulated on this curve"));
    }
    let q = p / (p - 1.0);
    let lw = w.log_values();
    let nodes = curve.nodes();
    let per_t = exec.map_slice(t_grid, |&k| {
        let own;
        let eps: &[f64] = match eps_grid {
            Some(e) => e,
            None => {
                own = ap_eps_grid(curve, k, 64);
                &own
            }
        };
        eps.iter()
            .map(|&e| {
                let a = log_portion_integral(curve, lw, p, nodes[k], e);
                let b = log_portion_integral(curve, lw, -q, nodes[k], e);
                if a == f64::NEG_INFINITY || b == f64::NEG_INFINITY {
                    return f64::NEG_INFINITY;
                }
                (a - e.ln()) / p + (b - e.ln()) / q
            })
            .fold(f64::NEG_INFINITY, f64::max)
    });
    Ok(per_t.into_iter().fold(f64::NEG_INFINITY, f64::max).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::argbranch::power_weight;
    use crate::curve::generate_circle;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn circle() -> Curve {
        generate_circle(1.0, 2048).unwrap()
    }

    #[test]
    fn exponent_validation() {
        let c = circle();
        let e = make_exponent(&c, ExponentKind::Constant { p: 2.0 }).unwrap();
        assert_eq!(e.dini_constant, 0.0);
        assert!(make_exponent(&c, ExponentKind::Constant { p: 1.0 }).is_err());
        let prof = make_exponent(
            &c,
            ExponentKind::Profile {
                t0: C64::new(1.0, 0.0),
                p_t0: 1.5,
                p_far: 3.0,
            },
        )
        .unwrap();
        assert!(prof.dini_constant.is_finite() && prof.dini_constant > 0.0);
        assert!(prof.p_min >= 1.5 && prof.p_max <= 3.0);
    }

    #[test]
    fn constant_modular_and_norm() {
        let c = circle();
        let one = vec![1.0; c.len()];
        let w = Weight::constant(c.len(), 1.0);
        let p = make_exponent(&c, ExponentKind::Constant { p: 2.0 }).unwrap();
        assert_relative_eq!(modular(&c, &one, &w, &p, 1.0).unwrap(), 2.0 * PI, max_relative = 1e-6);
        assert_relative_eq!(luxemburg_norm(&c, &one, &w, &p).unwrap(), (2.0 * PI).sqrt(), max_relative = 1e-6);
        let zero = vec![0.0; c.len()];
        assert_eq!(modular(&c, &zero, &w, &p, 0.3).unwrap(), 0.0);
        assert_eq!(luxemburg_norm(&c, &zero, &w, &p).unwrap(), 0.0);
    }

    #[test]
    fn homogeneity() {
        let c = circle();
        let f: Vec<f64> = (0..c.len()).map(|k| 1.0 + (k as f64 * 0.01).sin()).collect();
        let w = power_weight(&c, C64::new(1.0, 0.0), -0.3).unwrap();
        let p = make_exponent(
            &c,
            ExponentKind::Profile {
                t0: C64::new(1.0, 0.0),
                p_t0: 1.5,
                p_far: 3.0,
            },
        )
        .unwrap();
        let a = luxemburg_norm(&c, &f, &w, &p).unwrap();
        let g: Vec<f64> = f.iter().map(|v| 3.7 * v).collect();
        let b = luxemburg_norm(&c, &g, &w, &p).unwrap();
        assert_relative_eq!(b, 3.7 * a, max_relative = 1e-9);
        assert_relative_eq!(modular(&c, &f, &w, &p, a).unwrap(), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn segment_integral_formula() {
        // ∫_0^1 e^{2s} ds = (e^2 - 1)/2
        let v = log_int_exp_linear(0.0, 2.0, 0.0, 1.0).exp();
        assert_relative_eq!(v, (2f64.exp() - 1.0) / 2.0, max_relative = 1e-14);
        let v = log_int_exp_linear(0.0, -2.0, 0.25, 1.0).exp();
        assert_relative_eq!(v, ((-0.5f64).exp() - (-2f64).exp()) / 2.0, max_relative = 1e-14);
        let v = log_int_exp_linear(1.0, 1.0, 0.0, 0.5).exp();
        assert_relative_eq!(v, 0.5 * 1f64.exp(), max_relative = 1e-14);
    }

    #[test]
    fn ap_of_unit_weight_is_at_least_one() {
        let c = circle();
        let w = Weight::constant(c.len(), 1.0);
        let tg = ap_t_grid(&c, 16);
        let v = muckenhoupt_ap(&c, &w, 2.0, &tg, None, Execution::Sequential).unwrap();
        assert!((1.0..=PI + 1e-9).contains(&v), "{v}");
    }
}
