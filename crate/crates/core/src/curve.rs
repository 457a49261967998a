//! Discretized rectifiable curves and their metric primitives.
//!
//! A [`Curve`] is a polygon through its samples. Quantities that integrate
//! against arc length use either exact polygon geometry (portions, the
//! Carleson estimate) or trapezoidal node masses (everything that averages a
//! sampled function). Generators grade their sampling geometrically toward a
//! marked point `t0`, never placing a sample on it, so that power-type
//! singularities at `t0` are resolved over many decades of distance.

use std::f64::consts::{LN_10, PI};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::C64;

/// Geometric grading used by generators: `per_decade` samples per decade of
/// distance to `t0`, over `decades` decades below the bulk spacing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grading {
    pub decades: f64,
    pub per_decade: usize,
}

impl Grading {
    pub const DEFAULT_PER_DECADE: usize = 16;

    pub fn new(decades: f64, per_decade: usize) -> Self {
        Grading {
            decades,
            per_decade,
        }
    }

    /// Default grading for a curve of `n` samples: a quarter of the budget,
    /// capped at 12 decades.
    pub fn default_for(n: usize) -> Self {
        let decades = ((n / (8 * Self::DEFAULT_PER_DECADE)) as f64).min(12.0);
        Grading::new(decades, Self::DEFAULT_PER_DECADE)
    }

    pub fn none() -> Self {
        Grading::new(0.0, Self::DEFAULT_PER_DECADE)
    }
}

/// A discretized simple curve. Closed curves repeat their first sample at
/// the end of `points`; the distinct samples ("nodes") are
/// `points[..points.len() - 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    points: Vec<C64>,
    seglen: Vec<f64>,
    cumlen: Vec<f64>,
    masses: Vec<f64>,
    closed: bool,
    provenance: String,
    marked: Option<C64>,
}

impl Curve {
    /// Builds a curve from samples. For closed curves a missing closing
    /// duplicate is appended.
    pub fn new(mut points: Vec<C64>, closed: bool, provenance: impl Into<String>) -> Result<Self> {
        if points.iter().any(|p| !p.re.is_finite() || !p.im.is_finite()) {
            return Err(Error::pre("curve coordinates must be finite"));
        }
        let scale = points.iter().map(|p| p.norm()).fold(1.0_f64, f64::max);
        if closed {
            let (first, last) = match (points.first(), points.last()) {
                (Some(f), Some(l)) => (*f, *l),
                _ => return Err(Error::pre("empty curve")),
            };
            if (last - first).norm() > 1e-12 * scale || points.len() == 1 {
                points.push(first);
            } else {
                let n = points.len();
                points[n - 1] = first;
            }
        }
        let nodes = if closed { points.len() - 1 } else { points.len() };
        if nodes < 2 {
            return Err(Error::pre("a curve needs at least two distinct samples"));
        }
        let seglen: Vec<f64> = points.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
        if let Some(k) = seglen.iter().position(|&l| l <= 0.0) {
            return Err(Error::pre(format!("samples {k} and {} coincide", k + 1)));
        }
        let mut cumlen = Vec::with_capacity(points.len());
        let mut acc = 0.0;
        cumlen.push(0.0);
        for l in &seglen {
            acc += l;
            cumlen.push(acc);
        }
        let mut masses = vec![0.0; nodes];
        for (k, l) in seglen.iter().enumerate() {
            masses[k] += 0.5 * l;
            masses[(k + 1) % nodes] += 0.5 * l;
        }
        Ok(Curve {
            points,
            seglen,
            cumlen,
            masses,
            closed,
            provenance: provenance.into(),
            marked: None,
        })
    }

    /// Attaches the distinguished point `t0` used by weights and indices.
    pub fn with_marked(mut self, t0: C64) -> Self {
        self.marked = Some(t0);
        self
    }

    pub fn marked_point(&self) -> Option<C64> {
        self.marked
    }

    /// The marked point, or a precondition error naming the caller's need.
    pub fn require_marked(&self) -> Result<C64> {
        self.marked
            .ok_or_else(|| Error::pre("curve has no marked point t0; pass one explicitly"))
    }

    /// All stored samples, including the closing duplicate of closed curves.
    pub fn points(&self) -> &[C64] {
        &self.points
    }

    /// Distinct samples; per-sample data (weights, functions) is indexed by these.
    pub fn nodes(&self) -> &[C64] {
        if self.closed {
            &self.points[..self.points.len() - 1]
        } else {
            &self.points
        }
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Cumulative arc length per stored point. Nondecreasing; on deeply
    /// graded closed curves increments below one ulp of the running total
    /// are absorbed, so use [`Curve::seglen`] for measure.
    pub fn cumlen(&self) -> &[f64] {
        &self.cumlen
    }

    /// Segment lengths; segment `k` joins `points[k]` and `points[k + 1]`.
    pub fn seglen(&self) -> &[f64] {
        &self.seglen
    }

    /// Trapezoidal quadrature weights per node.
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn total_length(&self) -> f64 {
        self.seglen.iter().sum()
    }

    pub fn segment_count(&self) -> usize {
        self.seglen.len()
    }

    pub fn segment(&self, k: usize) -> (C64, C64) {
        (self.points[k], self.points[k + 1])
    }

    /// Node indices at both ends of segment `k`.
    pub fn segment_nodes(&self, k: usize) -> (usize, usize) {
        (k, (k + 1) % self.len())
    }

    /// Same curve traversed backwards.
    pub fn reversed(&self) -> Curve {
        let mut pts = self.points.clone();
        pts.reverse();
        let mut c = Curve::new(pts, self.closed, format!("reversed({})", self.provenance))
            .expect("reversal preserves validity");
        c.marked = self.marked;
        c
    }

    /// `max_k |tau_k - t|`.
    pub fn d_t(&self, t: C64) -> f64 {
        self.nodes().iter().map(|p| (p - t).norm()).fold(0.0, f64::max)
    }

    /// Smallest node distance to `t`.
    pub fn min_distance(&self, t: C64) -> f64 {
        self.nodes()
            .iter()
            .map(|p| (p - t).norm())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn distances(&self, t: C64) -> Vec<f64> {
        self.nodes().iter().map(|p| (p - t).norm()).collect()
    }

    /// Node nearest to `t` (first one on ties).
    pub fn nearest_node(&self, t: C64) -> usize {
        let mut best = (0, f64::INFINITY);
        for (k, p) in self.nodes().iter().enumerate() {
            let d = (p - t).norm();
            if d < best.1 {
                best = (k, d);
            }
        }
        best.0
    }

    /// Index of the segment that passes through `t` (up to `rel_tol` of its
    /// length), if any.
    pub fn segment_through(&self, t: C64, rel_tol: f64) -> Option<usize> {
        (0..self.segment_count()).find(|&k| {
            let (a, b) = self.segment(k);
            point_segment_distance(t, a, b) <= rel_tol * self.seglen[k]
        })
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Curve> {
        let text = std::fs::read_to_string(path)?;
        Curve::from_json(&text)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Curve> {
        let file: CurveFile = serde_json::from_str(text)?;
        let points: Vec<C64> = file.points.iter().map(|p| C64::new(p[0], p[1])).collect();
        let mut curve = Curve::new(points, file.closed, file.provenance)?;
        if let Some([re, im]) = file.t0 {
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::pre("t0 must be finite"));
            }
            curve.marked = Some(C64::new(re, im));
        }
        Ok(curve)
    }

    /// JSON text with every coordinate at 17 significant digits.
    pub fn to_json(&self) -> String {
        let mut s = String::with_capacity(48 * self.points.len() + 128);
        s.push_str("{\n  \"points\": [");
        for (k, p) in self.points.iter().enumerate() {
            if k > 0 {
                s.push(',');
            }
            let _ = write!(s, "\n    [{:.16e}, {:.16e}]", p.re, p.im);
        }
        s.push_str("\n  ],\n");
        let _ = writeln!(s, "  \"closed\": {},", self.closed);
        if let Some(t0) = self.marked {
            let _ = writeln!(s, "  \"t0\": [{:.16e}, {:.16e}],", t0.re, t0.im);
        }
        let _ = writeln!(
            s,
            "  \"provenance\": {}",
            serde_json::to_string(&self.provenance).expect("string serializes")
        );
        s.push_str("}\n");
        s
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CurveFile {
    points: Vec<[f64; 2]>,
    closed: bool,
    #[serde(default)]
    provenance: String,
    #[serde(default)]
    t0: Option<[f64; 2]>,
}

pub(crate) fn point_segment_distance(t: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (t - a).norm();
    }
    let s = (((t - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (a + d * s - t).norm()
}

/// Parameter interval `[s0, s1] ⊂ [0, 1]` of the segment `a → b` lying in
/// the open disk `|z - t| < eps`, or `None`.
pub(crate) fn clip_segment(a: C64, b: C64, t: C64, eps: f64) -> Option<(f64, f64)> {
    let d = b - a;
    let u = a - t;
    let qa = d.norm_sqr();
    let qb = (u.conj() * d).re;
    let qc = u.norm_sqr() - eps * eps;
    let disc = qb * qb - qa * qc;
    if disc <= 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    // stable roots of qa s^2 + 2 qb s + qc
    let q = -(qb + qb.signum() * sq);
    let (mut r0, mut r1) = if q != 0.0 {
        (q / qa, qc / q)
    } else {
        (-sq / qa, sq / qa)
    };
    if r0 > r1 {
        std::mem::swap(&mut r0, &mut r1);
    }
    let s0 = r0.max(0.0);
    let s1 = r1.min(1.0);
    (s1 > s0).then_some((s0, s1))
}

/// The part of a curve inside an open disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Portion {
    /// Inclusive node ranges inside the disk, in traversal order. On closed
    /// curves a range with `start > end` wraps through the last node.
    pub ranges: Vec<(usize, usize)>,
    /// Polygon arc length inside the disk, boundary crossings interpolated.
    pub measure: f64,
    /// Points where the polygon crosses the circle `|z - t| = eps`.
    pub crossings: Vec<C64>,
}

impl Portion {
    pub fn is_empty(&self) -> bool {
        self.measure == 0.0
    }

    pub fn node_count(&self, curve: &Curve) -> usize {
        let n = curve.len();
        self.ranges
            .iter()
            .map(|&(a, b)| if a <= b { b - a + 1 } else { n - a + b + 1 })
            .sum()
    }
}

/// `Γ(t, eps) = {τ ∈ Γ : |τ − t| < eps}` by exact segment clipping.
pub fn portion(curve: &Curve, t: C64, eps: f64) -> Portion {
    let mut measure = 0.0;
    let mut crossings = Vec::new();
    for k in 0..curve.segment_count() {
        let (a, b) = curve.segment(k);
        if let Some((s0, s1)) = clip_segment(a, b, t, eps) {
            measure += curve.seglen[k] * (s1 - s0);
            if s0 > 0.0 {
                crossings.push(a + (b - a) * s0);
            }
            if s1 < 1.0 {
                crossings.push(a + (b - a) * s1);
            }
        }
    }
    let inside: Vec<bool> = curve.nodes().iter().map(|p| (p - t).norm() < eps).collect();
    Portion {
        ranges: runs(&inside, curve.is_closed()),
        measure,
        crossings,
    }
}

/// Exact polygon measure of `Γ(t, eps)` without building ranges.
pub fn portion_measure(curve: &Curve, t: C64, eps: f64) -> f64 {
    (0..curve.segment_count())
        .filter_map(|k| {
            let (a, b) = curve.segment(k);
            clip_segment(a, b, t, eps).map(|(s0, s1)| curve.seglen[k] * (s1 - s0))
        })
        .sum()
}

fn runs(mask: &[bool], closed: bool) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (k, &m) in mask.iter().enumerate() {
        match (m, start) {
            (true, None) => start = Some(k),
            (false, Some(s)) => {
                out.push((s, k - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, mask.len() - 1));
    }
    if closed && out.len() > 1 {
        let first = out[0];
        let last = *out.last().unwrap();
        if first.0 == 0 && last.1 == mask.len() - 1 {
            out.pop();
            out[0] = (last.0, first.1);
        }
    }
    out
}

/// Lower bound for the Carleson constant: `max |Γ(t, eps)| / eps` over the
/// grids. `t_grid` holds node indices.
pub fn carleson_constant(curve: &Curve, t_grid: &[usize], eps_grid: &[f64], exec: Execution) -> f64 {
    let nodes = curve.nodes();
    exec.map_slice(t_grid, |&k| {
        eps_grid
            .iter()
            .map(|&eps| portion_measure(curve, nodes[k], eps) / eps)
            .fold(0.0, f64::max)
    })
    .into_iter()
    .fold(0.0, f64::max)
}

/// Default Carleson grids: at most `max_t` evenly strided nodes plus the
/// nodes nearest the marked point, and `n_eps` log-spaced radii between the
/// shortest segment and twice the diameter bound.
pub fn carleson_grids(curve: &Curve, max_t: usize, n_eps: usize) -> (Vec<usize>, Vec<f64>) {
    let n = curve.len();
    let stride = n.div_ceil(max_t.max(1)).max(1);
    let mut t_grid: Vec<usize> = (0..n).step_by(stride).collect();
    if let Some(t0) = curve.marked_point() {
        let mut by_dist: Vec<usize> = (0..n).collect();
        let d = curve.distances(t0);
        by_dist.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
        t_grid.extend(by_dist.into_iter().take(8));
        t_grid.sort_unstable();
        t_grid.dedup();
    }
    let lo = curve.seglen().iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = 2.0 * curve.d_t(curve.nodes()[0]);
    (t_grid, log_space(lo, hi, n_eps))
}

pub(crate) fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 || hi <= lo {
        return vec![hi];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// The open arc `ω(t0, δ)`: the maximal run of consecutive nodes around
/// `t0` that stays inside the disk of radius `delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    pub delta: f64,
    mask: Vec<bool>,
}

impl Arc {
    pub fn contains(&self, k: usize) -> bool {
        self.mask[k]
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.mask.len()).filter(|&k| self.mask[k]).collect()
    }
}

/// Computes `ω(t0, δ)`. Fails when the arc is empty or swallows the whole
/// curve (then it has no endpoints on the circle).
pub fn omega(curve: &Curve, t0: C64, delta: f64) -> Result<Arc> {
    let n = curve.len();
    let nodes = curve.nodes();
    let inside = |k: usize| (nodes[k] - t0).norm() < delta;
    let start = curve.nearest_node(t0);
    if !inside(start) {
        return Err(Error::EmptyArc {
            delta,
            reason: "no sample lies within delta of t0",
        });
    }
    let mut mask = vec![false; n];
    mask[start] = true;
    // forward
    let mut k = start;
    loop {
        let next = if k + 1 < n {
            k + 1
        } else if curve.is_closed() {
            0
        } else {
            break;
        };
        if mask[next] || !inside(next) {
            break;
        }
        mask[next] = true;
        k = next;
    }
    // backward
    let mut k = start;
    loop {
        let prev = if k > 0 {
            k - 1
        } else if curve.is_closed() {
            n - 1
        } else {
            break;
        };
        if mask[prev] || !inside(prev) {
            break;
        }
        mask[prev] = true;
        k = prev;
    }
    if mask.iter().all(|&m| m) {
        return Err(Error::EmptyArc {
            delta,
            reason: "delta exceeds the extent of the curve around t0",
        });
    }
    Ok(Arc { delta, mask })
}

// ---------------------------------------------------------------------------
// generators

/// Offsets from a marked point along one side: geometric (`per_decade`
/// per decade) from `h·10^-decades` until the step reaches the bulk spacing
/// `h`, then uniform. With `include_end` the last offset is `extent`;
/// otherwise it is `extent - h/2`, so mirrored sides meet with spacing `h`.
fn graded_offsets(extent: f64, count: usize, grading: Grading, include_end: bool) -> Vec<f64> {
    assert!(count >= 1);
    let q = 10f64.powf(1.0 / grading.per_decade.max(1) as f64);
    let mut decades = grading.decades.max(0.0);
    loop {
        if decades <= 0.0 {
            // plain uniform with a half step at the marked point
            let h = if include_end {
                extent / (count as f64 - 0.5)
            } else {
                extent / count as f64
            };
            return (0..count).map(|i| h * (i as f64 + 0.5)).collect();
        }
        let lead = 10f64.powf(-decades);
        let geo = ((decades * LN_10 - (q - 1.0).ln()) / q.ln()).ceil() as usize;
        if geo < count {
            let c = lead * q.powi(geo as i32 - 1);
            let uni = (count - geo) as f64;
            let h = if include_end {
                extent / (c + uni)
            } else {
                extent / (c + uni + 0.5)
            };
            let mut out: Vec<f64> = (0..geo).map(|j| h * lead * q.powi(j as i32)).collect();
            let base = h * c;
            out.extend((1..=count - geo).map(|i| base + h * i as f64));
            if include_end {
                *out.last_mut().unwrap() = extent;
            }
            return out;
        }
        decades -= 1.0;
    }
}

/// Closed circle of the given radius centred at 0, marked at `t0 = radius`,
/// with the default grading toward `t0`.
pub fn generate_circle(radius: f64, n: usize) -> Result<Curve> {
    generate_graded_circle(radius, n, Grading::default_for(n))
}

/// Circle with explicit grading toward `t0 = radius`. Nodes run
/// counterclockwise from just after `t0` to just before it.
pub fn generate_graded_circle(radius: f64, n: usize, grading: Grading) -> Result<Curve> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::pre("circle radius must be positive"));
    }
    if n < 16 {
        return Err(Error::pre(format!("circle needs n >= 16 samples, got {n}")));
    }
    let upper_count = n.div_ceil(2);
    let lower_count = n - upper_count;
    let offsets = graded_offsets(PI, upper_count, grading, false);
    let mut pts = Vec::with_capacity(n + 1);
    for &a in &offsets {
        pts.push(C64::new(a.cos(), a.sin()) * radius);
    }
    for &a in offsets[..lower_count].iter().rev() {
        pts.push(C64::new(a.cos(), -a.sin()) * radius);
    }
    let prov = format!(
        "circle(radius={radius}, n={n}, decades={}, per_decade={}; t0={radius}+0i)",
        grading.decades, grading.per_decade
    );
    Ok(Curve::new(pts, true, prov)?.with_marked(C64::new(radius, 0.0)))
}

fn check_radii(r_min: f64, r_max: f64, n: usize) -> Result<()> {
    if !(r_min > 0.0 && r_min < r_max && r_max.is_finite()) {
        return Err(Error::pre(format!(
            "need 0 < r_min < r_max, got r_min={r_min}, r_max={r_max}"
        )));
    }
    if n < 2 {
        return Err(Error::pre("need at least two samples"));
    }
    Ok(())
}

const MAX_SPIRAL_STEP: f64 = PI / 8.0;

fn spiral_from_phase(
    r_min: f64,
    r_max: f64,
    n: usize,
    max_slope: f64,
    phase: impl Fn(f64) -> f64,
    provenance: String,
) -> Result<Curve> {
    check_radii(r_min, r_max, n)?;
    let (a, b) = (r_min.ln(), r_max.ln());
    let dl = (b - a) / (n - 1) as f64;
    let step = max_slope.abs() * dl;
    if step >= MAX_SPIRAL_STEP {
        return Err(Error::pre(format!(
            "angular increment {step:.4} rad exceeds pi/8; increase n"
        )));
    }
    let pts = (0..n)
        .map(|k| {
            let lr = if k + 1 == n { b } else { a + dl * k as f64 };
            let r = if k + 1 == n { r_max } else { lr.exp() };
            C64::from_polar(r, phase(-lr))
        })
        .collect();
    Ok(Curve::new(pts, false, provenance)?.with_marked(C64::new(0.0, 0.0)))
}

/// `τ(r) = r·exp(−iδ log r)` for log-spaced `r ∈ [r_min, r_max]`, ordered
/// outward; marked at the limit point `t0 = 0`.
pub fn generate_log_spiral(delta: f64, r_min: f64, r_max: f64, n: usize) -> Result<Curve> {
    if !delta.is_finite() {
        return Err(Error::pre("delta must be finite"));
    }
    let prov = format!("log_spiral(delta={delta}, r_min={r_min}, r_max={r_max}, n={n}; t0=0)");
    spiral_from_phase(r_min, r_max, n, delta, |l| delta * l, prov)
}

/// Length of the first pure-slope stretch of the mixed spiral, in units of
/// `log(1/r)`: three decades, matching the default index-estimation window.
pub const MIXED_STRETCH: f64 = 3.0 * LN_10;

/// Argument of the mixed-spirality curve at `L = log(1/r)`.
///
/// The phase is piecewise linear in `L` with slope `beta` on `(-inf, c]`
/// and then alternating `alpha`, `beta`, ... on `[c·2^k, c·2^(k+1)]`. Every
/// stretch is as long as everything before it, so spans of any length occur
/// inside a single pure-slope stretch and the spirality indices at 0 are
/// exactly `(alpha, beta)`.
pub fn mixed_phase(alpha: f64, beta: f64, l: f64) -> f64 {
    let c = MIXED_STRETCH;
    if l <= c {
        return beta * l;
    }
    let mut acc = beta * c;
    let mut start = c;
    let mut slope = alpha;
    loop {
        let end = 2.0 * start;
        if l <= end {
            return acc + slope * (l - start);
        }
        acc += slope * (end - start);
        start = end;
        slope = if slope == alpha { beta } else { alpha };
    }
}

/// Spiral around `t0 = 0` whose lower and upper spirality indices are
/// `alpha` and `beta` (see [`mixed_phase`]). `alpha == beta` reproduces the
/// logarithmic spiral.
pub fn generate_mixed_spirality(
    alpha: f64,
    beta: f64,
    r_min: f64,
    r_max: f64,
    n: usize,
) -> Result<Curve> {
    if !(alpha.is_finite() && beta.is_finite()) {
        return Err(Error::pre("spirality bounds must be finite"));
    }
    if alpha > beta {
        return Err(Error::pre(format!("need alpha <= beta, got {alpha} > {beta}")));
    }
    let prov = format!(
        "mixed_spirality(alpha={alpha}, beta={beta}, r_min={r_min}, r_max={r_max}, n={n}; t0=0)"
    );
    let slope = alpha.abs().max(beta.abs());
    spiral_from_phase(r_min, r_max, n, slope, |l| mixed_phase(alpha, beta, l), prov)
}

/// Polyline through `vertices`, sampled with about `n` nodes spread by
/// arc length. With `marked = Some(v)` the sampling is graded toward vertex
/// `v`, which becomes `t0` and is not itself a sample. Closed polylines are
/// rotated so that traversal starts right after the marked vertex.
pub fn generate_polyline(
    vertices: &[C64],
    closed: bool,
    n: usize,
    marked: Option<usize>,
    grading: Grading,
) -> Result<Curve> {
    if vertices.len() < 2 {
        return Err(Error::pre("polyline needs at least two vertices"));
    }
    if n < 16 {
        return Err(Error::pre(format!("polyline needs n >= 16 samples, got {n}")));
    }
    let mut verts: Vec<C64> = vertices.to_vec();
    if let Some(v) = marked {
        if v >= verts.len() {
            return Err(Error::pre("marked vertex out of range"));
        }
        if closed {
            verts.rotate_left(v);
        }
    }
    if closed {
        verts.push(verts[0]);
    }
    let mut vlen = vec![0.0];
    for w in verts.windows(2) {
        let l = (w[1] - w[0]).norm();
        if l == 0.0 {
            return Err(Error::pre("consecutive polyline vertices coincide"));
        }
        vlen.push(vlen.last().unwrap() + l);
    }
    let total = *vlen.last().unwrap();
    let at = |u: f64| -> C64 {
        let e = match vlen.binary_search_by(|x| x.total_cmp(&u)) {
            Ok(i) => return verts[i.min(verts.len() - 1)],
            Err(i) => i.clamp(1, verts.len() - 1) - 1,
        };
        let s = (u - vlen[e]) / (vlen[e + 1] - vlen[e]);
        verts[e] + (verts[e + 1] - verts[e]) * s
    };
    let mut params: Vec<f64> = match (marked, closed) {
        (None, _) => {
            let count = if closed { n } else { n - 1 };
            (0..=count).map(|i| total * i as f64 / count as f64).collect()
        }
        (Some(_), true) => {
            let half = n.div_ceil(2);
            let offs = graded_offsets(total / 2.0, half, grading, false);
            let mut p: Vec<f64> = offs.clone();
            p.extend(offs[..n - half].iter().rev().map(|o| total - o));
            p
        }
        (Some(v), false) => {
            let s_star = vlen[v];
            let left_len = s_star;
            let right_len = total - s_star;
            let left_n = ((n as f64) * left_len / total).round() as usize;
            let right_n = n - left_n;
            let mut p = Vec::new();
            if left_len > 0.0 && left_n > 0 {
                let offs = graded_offsets(left_len, left_n, grading, true);
                p.extend(offs.iter().rev().map(|o| s_star - o));
            }
            if right_len > 0.0 && right_n > 0 {
                let offs = graded_offsets(right_len, right_n, grading, true);
                p.extend(offs.iter().map(|o| s_star + o));
            }
            p
        }
    };
    // keep every corner other than the marked one
    let skip = marked.map(|_| if closed { 0 } else { marked.unwrap() });
    for (i, &u) in vlen.iter().enumerate() {
        let is_marked = Some(i) == skip || (closed && marked.is_some() && i == vlen.len() - 1);
        if !is_marked {
            params.push(u);
        }
    }
    if closed {
        params.retain(|&u| u < total);
    }
    params.sort_by(f64::total_cmp);
    let min_gap = total * 1e-300_f64.max(f64::EPSILON * 1e-3);
    params.dedup_by(|a, b| (*a - *b).abs() <= min_gap);
    let pts: Vec<C64> = params.iter().map(|&u| at(u)).collect();
    let prov = format!(
        "polyline(vertices={}, closed={closed}, n={n}, marked={marked:?})",
        vertices.len()
    );
    let mut curve = Curve::new(pts, closed, prov)?;
    if let Some(v) = marked {
        curve.marked = Some(vertices[v]);
    }
    Ok(curve)
}
