//! Boundedness predicates for the maximal operator on weighted variable
//! Lebesgue spaces with one oscillating singularity.

use serde::{Deserialize, Serialize};

use crate::curve::{omega, Curve};
use crate::error::{Error, Result};
use crate::norms::ExponentField;
use crate::submult::{phi_indices_closed_form, IndexPair};
use crate::C64;

/// Width of the band around 0 and 1 treated as equality.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    MainThmBounded,
    KpsBounded,
    ErsatzBounded,
    NecessaryViolated,
    Indeterminate,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::MainThmBounded => "MAIN_THM_BOUNDED",
            Classification::KpsBounded => "KPS_BOUNDED",
            Classification::ErsatzBounded => "ERSATZ_BOUNDED",
            Classification::NecessaryViolated => "NECESSARY_VIOLATED",
            Classification::Indeterminate => "INDETERMINATE",
        }
    }

    pub fn is_bounded(self) -> bool {
        matches!(
            self,
            Classification::MainThmBounded | Classification::KpsBounded | Classification::ErsatzBounded
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    /// `lower - 0`.
    pub to_zero: f64,
    /// `1 - upper`.
    pub to_one: f64,
}

impl Margins {
    pub fn min(&self) -> f64 {
        self.to_zero.min(self.to_one)
    }
}

/// Condition values `1/p(t0) + α` and `1/p(t0) + β` with their classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub lower: f64,
    pub upper: f64,
    pub classification: Classification,
    pub margins: Margins,
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    /// Set when a condition value sits on 0 or 1 within [`BOUNDARY_TOL`].
    pub on_boundary: bool,
    /// `p_*/p(t0)` for the ersatz check.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ersatz_bound: Option<f64>,
}

impl Verdict {
    fn new(lower: f64, upper: f64, classification: Classification) -> Self {
        let margins = Margins {
            to_zero: lower,
            to_one: 1.0 - upper,
        };
        Verdict {
            lower,
            upper,
            classification,
            margins,
            eps: None,
            delta: None,
            on_boundary: lower.abs() <= BOUNDARY_TOL || (1.0 - upper).abs() <= BOUNDARY_TOL,
            ersatz_bound: None,
        }
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::pre(format!("p(t0) must lie in (1, inf), got {p}")))
    }
}

fn classify(lower: f64, upper: f64) -> Classification {
    if lower > BOUNDARY_TOL && upper < 1.0 - BOUNDARY_TOL {
        Classification::MainThmBounded
    } else if lower < -BOUNDARY_TOL || upper > 1.0 + BOUNDARY_TOL {
        Classification::NecessaryViolated
    } else {
        Classification::Indeterminate
    }
}

/// `0 < 1/p + Re γ + min(δ⁻ Im γ, δ⁺ Im γ) <= 1/p + Re γ + max(..) < 1`.
pub fn check_main(p_at_t0: f64, gamma: C64, spirality: &IndexPair) -> Result<Verdict> {
    check_p(p_at_t0)?;
    if spirality.alpha > spirality.beta {
        return Err(Error::pre("spirality indices out of order"));
    }
    let idx = phi_indices_closed_form(gamma, spirality);
    let (lower, upper) = (1.0 / p_at_t0 + idx.alpha, 1.0 / p_at_t0 + idx.beta);
    Ok(Verdict::new(lower, upper, classify(lower, upper)))
}

/// Power weights: bounded iff `0 < 1/p + λ < 1`, so every other case,
/// the boundary included, is a proven failure.
pub fn check_kps(p_at_t0: f64, lambda: f64) -> Result<Verdict> {
    check_p(p_at_t0)?;
    let v = 1.0 / p_at_t0 + lambda;
    let class = if v > BOUNDARY_TOL && v < 1.0 - BOUNDARY_TOL {
        Classification::KpsBounded
    } else {
        Classification::NecessaryViolated
    };
    Ok(Verdict::new(v, v, class))
}

/// Where `p_*` is taken.
#[derive(Debug, Clone, PartialEq)]
pub enum Scope<'a> {
    WholeCurve,
    /// Node mask of an arc around `t0`.
    Arc(&'a [bool]),
}

/// Sufficient condition with the upper value compared against `p_*/p(t0)`.
pub fn check_ersatz(p: &ExponentField, gamma: C64, spirality: &IndexPair, scope: Scope<'_>) -> Result<Verdict> {
    let mut v = check_main(p.at_t0, gamma, spirality)?;
    let p_star = match scope {
        Scope::WholeCurve => p.p_star(),
        Scope::Arc(mask) => p.p_star_on(mask),
    };
    let bound = p_star / p.at_t0;
    v.ersatz_bound = Some(bound);
    if v.lower > BOUNDARY_TOL && v.upper < bound - BOUNDARY_TOL {
        v.classification = Classification::ErsatzBounded;
    }
    Ok(v)
}

/// Picks `ε` as half the smaller margin and the largest `δ = d_{t0}/4·2^-j`
/// whose arc satisfies `1 + β·p(t0) < p_*`, `β` being the upper index of
/// `W φ_{t0,γ}`. Returns `(delta, eps)`.
pub fn select_delta_and_eps(
    curve: &Curve,
    p: &ExponentField,
    t0: C64,
    gamma: C64,
    spirality: &IndexPair,
) -> Result<(f64, f64)> {
    let v = check_main(p.at_t0, gamma, spirality)?;
    if v.classification != Classification::MainThmBounded {
        return Err(Error::pre(format!(
            "the sufficient condition does not hold ({})",
            v.classification.as_str()
        )));
    }
    let eps = 0.5 * v.margins.min();
    let beta = phi_indices_closed_form(gamma, spirality).beta;
    let required = 1.0 + beta * p.at_t0;
    let d = curve.d_t(t0);
    let mut last_p_star = f64::NAN;
    for j in 0..64 {
        let delta = d / 4.0 * 0.5f64.powi(j);
        let arc = match omega(curve, t0, delta) {
            Ok(a) => a,
            Err(Error::EmptyArc { .. }) => break,
            Err(e) => return Err(e),
        };
        let p_star = p.p_star_on(arc.mask());
        last_p_star = p_star;
        if required < p_star {
            return Ok((delta, eps));
        }
    }
    Err(Error::NoAdmissibleDelta {
        p_star: last_p_star,
        required,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::generate_circle;
    use crate::norms::{make_exponent, ExponentKind};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn main_examples() {
        let v = check_main(2.0, c(0.3, 0.0), &IndexPair::new(0.0, 0.0)).unwrap();
        assert_relative_eq!(v.lower, 0.8);
        assert_eq!(v.classification, Classification::MainThmBounded);
        let v = check_main(2.0, c(0.0, 1.0), &IndexPair::new(-1.0, 1.0)).unwrap();
        assert_relative_eq!(v.lower, -0.5);
        assert_eq!(v.classification, Classification::NecessaryViolated);
        let v = check_main(2.0, c(0.0, 0.1), &IndexPair::new(-1.0, 1.0)).unwrap();
        assert_relative_eq!(v.lower, 0.4);
        assert_relative_eq!(v.upper, 0.6);
        assert_eq!(v.classification, Classification::MainThmBounded);
    }

    #[test]
    fn kps_examples() {
        assert_eq!(check_kps(2.0, 0.0).unwrap().classification, Classification::KpsBounded);
        let b = check_kps(2.0, 0.5).unwrap();
        assert_eq!(b.classification, Classification::NecessaryViolated);
        assert!(b.on_boundary);
        let m = check_main(2.0, c(0.5, 0.0), &IndexPair::new(0.0, 0.0)).unwrap();
        assert_eq!(m.classification, Classification::Indeterminate);
        let v = check_kps(1.5, -0.6).unwrap();
        assert_relative_eq!(v.lower, 1.0 / 1.5 - 0.6, epsilon = 1e-15);
        assert_eq!(v.classification, Classification::KpsBounded);
    }

    #[test]
    fn ersatz_examples() {
        let curve = generate_circle(1.0, 1024).unwrap();
        let t0 = curve.marked_point().unwrap();
        let p = make_exponent(&curve, ExponentKind::Profile { t0, p_t0: 3.0, p_far: 1.5 }).unwrap();
        let s = IndexPair::new(0.0, 0.0);
        let v = check_ersatz(&p, c(0.1, 0.0), &s, Scope::WholeCurve).unwrap();
        assert_eq!(v.classification, Classification::ErsatzBounded);
        let v = check_ersatz(&p, c(0.25, 0.0), &s, Scope::WholeCurve).unwrap();
        assert_eq!(v.classification, Classification::MainThmBounded);
        let q = make_exponent(&curve, ExponentKind::Constant { p: 2.0 }).unwrap();
        let v = check_ersatz(&q, c(0.3, 0.0), &s, Scope::WholeCurve).unwrap();
        assert_eq!(v.classification, Classification::ErsatzBounded);
    }

    #[test]
    fn delta_for_constant_p() {
        let curve = generate_circle(1.0, 1024).unwrap();
        let t0 = curve.marked_point().unwrap();
        let p = make_exponent(&curve, ExponentKind::Constant { p: 2.0 }).unwrap();
        let (delta, eps) = select_delta_and_eps(&curve, &p, t0, c(0.4, 0.0), &IndexPair::new(0.0, 0.0)).unwrap();
        assert_relative_eq!(delta, curve.d_t(t0) / 4.0);
        assert_relative_eq!(eps, 0.05, epsilon = 1e-12);
    }
}
