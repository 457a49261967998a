//! The submultiplicative majorant `W_t ψ`, its indices, spirality indices,
//! and the power-weight sandwich constants.
//!
//! `W_t ψ(x)` compares the extreme values of `ψ` on two circles about `t0`
//! whose radii differ by the factor `x`. Circles are intersected with the
//! polygon exactly, and radii run over a geometric lattice that shares its
//! ratio with the `x` grid. The lattice makes `x1·x2` land on a pair of
//! lattice radii, so grid submultiplicativity holds without interpolation.

use serde::{Deserialize, Serialize};

use crate::argbranch::{eta, unwrap_arg, Weight};
use crate::curve::{omega, Curve};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::C64;

/// Layout of the symmetric multiplicative grid `x = 10^(decades·k/per_side)`,
/// `k = -per_side..=per_side`, and of the index fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WOptions {
    pub decades: f64,
    pub per_side: usize,
    /// Width in decades of the tail window used by the slope fits.
    pub fit_decades: f64,
}

impl Default for WOptions {
    fn default() -> Self {
        WOptions {
            decades: 3.0,
            per_side: 63,
            fit_decades: 1.0,
        }
    }
}

impl WOptions {
    pub fn wide(decades: f64) -> Self {
        WOptions {
            decades,
            per_side: (21.0 * decades).round() as usize,
            fit_decades: 1.0,
        }
    }

    pub fn ratio(&self) -> f64 {
        10f64.powf(self.decades / self.per_side as f64)
    }

    pub fn xs(&self) -> Vec<f64> {
        let k = self.per_side as i64;
        (-k..=k)
            .map(|i| 10f64.powf(self.decades * i as f64 / k as f64))
            .collect()
    }
}

/// Samples of `W_t ψ` on a multiplicative grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmultSamples {
    pub xs: Vec<f64>,
    pub vals: Vec<f64>,
    pub log_vals: Vec<f64>,
    /// Radii `R` of the inner supremum, descending from `d_t`.
    pub radii: Vec<f64>,
    pub fit_decades: f64,
}

impl SubmultSamples {
    /// Index of `x = 1`.
    pub fn center(&self) -> usize {
        self.xs.len() / 2
    }

    /// Largest relative excess `ϱ(x_i x_j) / (ϱ(x_i) ϱ(x_j)) - 1` over grid
    /// pairs whose product is on the grid.
    pub fn submult_excess(&self) -> f64 {
        let c = self.center() as i64;
        let n = self.xs.len() as i64;
        let mut worst = f64::NEG_INFINITY;
        for i in 0..n {
            for j in 0..n {
                let k = i + j - c;
                if k < 0 || k >= n {
                    continue;
                }
                let excess = self.log_vals[k as usize]
                    - self.log_vals[i as usize]
                    - self.log_vals[j as usize];
                worst = worst.max(excess);
            }
        }
        worst.exp() - 1.0
    }

    /// Grid witnesses for the tail bounds `ϱ(x) <= x^(α-ε)` on `x <= lo` and
    /// `ϱ(x) <= x^(β+ε)` on `x >= hi`. Each side reports the grid point
    /// closest to 1 from which the bound holds all the way out, if any.
    pub fn tail_witnesses(&self, idx: &IndexPair, eps: f64) -> (Option<f64>, Option<f64>) {
        let c = self.center();
        let holds = |k: usize, e: f64| self.log_vals[k] <= e * self.xs[k].ln() + 1e-12;
        let mut lo = None;
        for k in 0..c {
            if holds(k, idx.alpha - eps) {
                lo = Some(self.xs[k]);
            } else {
                break;
            }
        }
        let mut hi = None;
        for k in (c + 1..self.xs.len()).rev() {
            if holds(k, idx.beta + eps) {
                hi = Some(self.xs[k]);
            } else {
                break;
            }
        }
        (lo, hi)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct IndexDiagnostics {
    /// Largest absolute residual of the lower-tail fit, in units of `log ϱ`.
    pub alpha_residual: f64,
    pub beta_residual: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub fit_points: usize,
}

/// Lower and upper indices with fit diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexPair {
    pub alpha: f64,
    pub beta: f64,
    #[serde(default)]
    pub diagnostics: IndexDiagnostics,
}

impl IndexPair {
    pub fn new(alpha: f64, beta: f64) -> Self {
        IndexPair {
            alpha,
            beta,
            diagnostics: IndexDiagnostics::default(),
        }
    }
}

/// Parameters in `[0, 1]` where the segment `a → b` meets `|z - t| = r`.
fn circle_roots(a: C64, b: C64, t: C64, r: f64) -> ([f64; 2], usize) {
    let d = b - a;
    let u = a - t;
    let qa = d.norm_sqr();
    let qb = (u.conj() * d).re;
    let qc = u.norm_sqr() - r * r;
    let disc = qb * qb - qa * qc;
    let mut out = [0.0; 2];
    if disc < 0.0 {
        return (out, 0);
    }
    let sq = disc.sqrt();
    let q = -(qb + if qb >= 0.0 { sq } else { -sq });
    let (r0, r1) = if q != 0.0 { (q / qa, qc / q) } else { (0.0, 0.0) };
    let mut n = 0;
    const SLACK: f64 = 1e-12;
    for s in [r0, r1] {
        if (-SLACK..=1.0 + SLACK).contains(&s) {
            out[n] = s.clamp(0.0, 1.0);
            n += 1;
        }
    }
    if n == 2 && out[0] == out[1] {
        n = 1;
    }
    (out, n)
}

/// Extreme values of `log ψ` on each lattice circle; `None` when empty.
fn circle_extremes(curve: &Curve, t0: C64, log_psi: &[f64], radii: &[f64], ratio: f64) -> Vec<Option<(f64, f64)>> {
    let mut ext: Vec<Option<(f64, f64)>> = vec![None; radii.len()];
    let top = radii[0];
    let ln_s = ratio.ln();
    let nodes = curve.nodes();
    let logd: Vec<f64> = nodes.iter().map(|p| (p - t0).norm().ln()).collect();
    for k in 0..curve.segment_count() {
        let (a, b) = curve.segment(k);
        let (ia, ib) = curve.segment_nodes(k);
        let near = crate::curve::point_segment_distance(t0, a, b);
        let far = (a - t0).norm().max((b - t0).norm());
        // lattice indices with near <= r_j <= far, r_j = top·s^-j
        let j_lo = ((top / far).ln() / ln_s - 1e-9).ceil().max(0.0) as usize;
        let j_hi = if near > 0.0 {
            ((top / near).ln() / ln_s + 1e-9).floor()
        } else {
            f64::INFINITY
        };
        let j_hi = (j_hi.min((radii.len() - 1) as f64)) as usize;
        if j_lo > j_hi {
            continue;
        }
        let (la, lb) = (log_psi[ia], log_psi[ib]);
        let (da, db) = (logd[ia], logd[ib]);
        for (j, &r) in radii.iter().enumerate().take(j_hi + 1).skip(j_lo) {
            let (roots, m) = circle_roots(a, b, t0, r);
            for &s in &roots[..m] {
                let lr = r.ln();
                // interpolation in log distance is exact for power-type ψ
                let v = if m == 1 && (da - db).abs() > 1e-300 && (lr - da) * (lr - db) <= 0.0 {
                    la + (lr - da) / (db - da) * (lb - la)
                } else {
                    la + s * (lb - la)
                };
                ext[j] = Some(match ext[j] {
                    None => (v, v),
                    Some((lo, hi)) => (lo.min(v), hi.max(v)),
                });
            }
        }
    }
    ext
}

/// Samples `W_{t0} ψ` on the grid described by `opts`.
pub fn compute_w(curve: &Curve, t0: C64, psi: &Weight, opts: &WOptions, exec: Execution) -> Result<SubmultSamples> {
    if psi.len() != curve.len() {
        return Err(Error::pre("weight is not tabulated on this curve"));
    }
    if opts.per_side == 0 || opts.decades.is_nan() || opts.decades <= 0.0 {
        return Err(Error::pre("x grid must be nonempty on both sides"));
    }
    let xs = opts.xs();
    let s = opts.ratio();
    let d_t = curve.d_t(t0);
    let d_min = curve.min_distance(t0);
    if d_min <= 0.0 {
        return Err(Error::pre("t0 coincides with a sample"));
    }
    let count = ((d_t / d_min).ln() / s.ln()).floor() as usize + 1;
    let radii: Vec<f64> = (0..count).map(|j| d_t * s.powi(-(j as i32))).collect();
    let ext = circle_extremes(curve, t0, psi.log_values(), &radii, s);
    let k = opts.per_side as i64;
    let log_vals = exec.map(xs.len(), |i| {
        let shift = i as i64 - k;
        let mut best = f64::NEG_INFINITY;
        for j in 0..radii.len() {
            // x < 1: max on radius x·R (deeper), min on R; x > 1: max on R, min on R/x
            let (jmax, jmin) = if shift <= 0 {
                (j as i64 - shift, j as i64)
            } else {
                (j as i64, j as i64 + shift)
            };
            if jmax as usize >= radii.len() || jmin as usize >= radii.len() {
                break;
            }
            if let (Some((_, hi)), Some((lo, _))) = (ext[jmax as usize], ext[jmin as usize]) {
                best = best.max(hi - lo);
            }
        }
        best
    });
    if log_vals.contains(&f64::NEG_INFINITY) {
        return Err(Error::AllAnnuliEmpty);
    }
    Ok(SubmultSamples {
        vals: log_vals.iter().map(|v| v.exp()).collect(),
        xs,
        log_vals,
        radii,
        fit_decades: opts.fit_decades,
    })
}

fn fit_slope(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let resid = pts
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mx)).abs())
        .fold(0.0, f64::max);
    (slope, resid)
}

/// Least-squares slopes of `log ϱ` against `log x` over the outermost
/// `fit_decades` on each side.
/// Inversions `α > β` up to this much (plus the fit residuals) are treated
/// as rounding and merged.
pub const ORDER_TOL: f64 = 1e-6;

pub fn estimate_indices(s: &SubmultSamples) -> Result<IndexPair> {
    let (lo, hi) = (s.xs[0], *s.xs.last().unwrap());
    let (dl, dh) = (-lo.log10(), hi.log10());
    if dl < 3.0 - 1e-9 {
        return Err(Error::GridTooNarrow { side: "lower", decades: dl });
    }
    if dh < 3.0 - 1e-9 {
        return Err(Error::GridTooNarrow { side: "upper", decades: dh });
    }
    let w = s.fit_decades.max(0.0);
    let low: Vec<(f64, f64)> = s
        .xs
        .iter()
        .zip(&s.log_vals)
        .filter(|(x, _)| x.log10() <= lo.log10() + w + 1e-9)
        .map(|(x, v)| (x.ln(), *v))
        .collect();
    let high: Vec<(f64, f64)> = s
        .xs
        .iter()
        .zip(&s.log_vals)
        .filter(|(x, _)| x.log10() >= hi.log10() - w - 1e-9)
        .map(|(x, v)| (x.ln(), *v))
        .collect();
    if low.len() < 2 || high.len() < 2 {
        return Err(Error::pre("fit window holds fewer than two grid points"));
    }
    let (mut alpha, ra) = fit_slope(&low);
    let (mut beta, rb) = fit_slope(&high);
    // true indices satisfy α <= β; an inversion within fit noise is merged
    if alpha > beta && alpha - beta <= ORDER_TOL + 4.0 * (ra + rb) {
        let mid = 0.5 * (alpha + beta);
        alpha = mid;
        beta = mid;
    }
    Ok(IndexPair {
        alpha,
        beta,
        diagnostics: IndexDiagnostics {
            alpha_residual: ra,
            beta_residual: rb,
            x_min: lo,
            x_max: hi,
            fit_points: low.len().min(high.len()),
        },
    })
}

/// `(δ⁻, δ⁺)` at `t0` with the default grid.
pub fn spirality_indices(curve: &Curve, t0: C64) -> Result<IndexPair> {
    spirality_indices_with(curve, t0, &WOptions::default(), Execution::default())
}

pub fn spirality_indices_with(curve: &Curve, t0: C64, opts: &WOptions, exec: Execution) -> Result<IndexPair> {
    let branch = unwrap_arg(curve, t0)?;
    let samples = compute_w(curve, t0, &eta(&branch), opts, exec)?;
    estimate_indices(&samples)
}

/// Indices of `W φ_{t0,γ}` from the spirality indices:
/// `Re γ + min/max(δ⁻ Im γ, δ⁺ Im γ)`.
pub fn phi_indices_closed_form(gamma: C64, spirality: &IndexPair) -> IndexPair {
    let a = spirality.alpha * gamma.im;
    let b = spirality.beta * gamma.im;
    IndexPair::new(gamma.re + a.min(b), gamma.re + a.max(b))
}

/// Smallest constants of the power-weight sandwich on the arc `ω(t0, δ)`:
///
/// * `C1`: `w(t)/w(τ) <= C1·|(t-t0)/(τ-t0)|^(β+ε)` for `t ∉ ω`, `τ ∈ ω`
/// * `C2`: `w(t)/w(τ) <= C2·|(t-t0)/(τ-t0)|^(α-ε)` for `t ∈ ω`, `τ ∉ ω`
///
/// Both sides factor into a product of one maximum over `ω` and one over
/// its complement, so the pair maximum is exact in linear time.
pub fn power_sandwich(
    curve: &Curve,
    t0: C64,
    w: &Weight,
    idx: &IndexPair,
    eps: f64,
    delta: f64,
) -> Result<(f64, f64)> {
    let arc = omega(curve, t0, delta)?;
    let lw = w.log_values();
    let ld: Vec<f64> = curve.nodes().iter().map(|p| (p - t0).norm().ln()).collect();
    let (e1, e2) = (idx.beta + eps, idx.alpha - eps);
    let mut out1 = f64::NEG_INFINITY;
    let mut in1 = f64::NEG_INFINITY;
    let mut out2 = f64::NEG_INFINITY;
    let mut in2 = f64::NEG_INFINITY;
    for k in 0..curve.len() {
        if arc.contains(k) {
            in1 = in1.max(e1 * ld[k] - lw[k]);
            in2 = in2.max(lw[k] - e2 * ld[k]);
        } else {
            out1 = out1.max(lw[k] - e1 * ld[k]);
            out2 = out2.max(e2 * ld[k] - lw[k]);
        }
    }
    Ok(((out1 + in1).exp(), (in2 + out2).exp()))
}

/// Pair scan behind [`power_sandwich`]: the largest sampled ratios, visiting
/// at most about `max_pairs` pairs with deterministic strides.
pub fn sandwich_pair_scan(
    curve: &Curve,
    t0: C64,
    w: &Weight,
    idx: &IndexPair,
    eps: f64,
    delta: f64,
    max_pairs: usize,
) -> Result<(f64, f64)> {
    let arc = omega(curve, t0, delta)?;
    let lw = w.log_values();
    let ld: Vec<f64> = curve.nodes().iter().map(|p| (p - t0).norm().ln()).collect();
    let inside = arc.indices();
    let outside: Vec<usize> = (0..curve.len()).filter(|&k| !arc.contains(k)).collect();
    let stride = ((inside.len() * outside.len()) as f64 / max_pairs.max(1) as f64)
        .sqrt()
        .ceil()
        .max(1.0) as usize;
    let (e1, e2) = (idx.beta + eps, idx.alpha - eps);
    let (mut c1, mut c2) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &o in outside.iter().step_by(stride) {
        for &i in inside.iter().step_by(stride) {
            // (t, τ) = (o, i) for C1 and (i, o) for C2
            c1 = c1.max(lw[o] - lw[i] - e1 * (ld[o] - ld[i]));
            c2 = c2.max(lw[i] - lw[o] - e2 * (ld[i] - ld[o]));
        }
    }
    Ok((c1.exp(), c2.exp()))
}
