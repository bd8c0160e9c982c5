//! Decision procedures for the subbundle classification: the rank-filtration
//! condition, slopewise dominance, and the structural decompositions used to
//! reduce the general case.
//!
//! Conventions for degenerate inputs: the zero bundle is a subbundle and a
//! quotient of everything, nothing nonzero is dominated by zero, and a bundle
//! of larger rank is never dominated. These are the only choices consistent
//! with the rank-filtration condition.

use num_bigint::BigInt;
use serde::Serialize;

use crate::bundle::{HNBundle, SlopeFilter};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// `rk(E^{≥μ}) ≤ rk(F^{≥μ})` for every rational `μ`.
///
/// Both sides are step functions of `μ` jumping only at slopes of `E` or `F`,
/// so it is enough to test those slopes and one value below all of them.
pub fn rank_condition(e: &HNBundle, f: &HNBundle) -> bool {
    let mut probes: Vec<Rational> = e.slopes().chain(f.slopes()).cloned().collect();
    if let Some(lowest) = probes.iter().min().cloned() {
        probes.push(&lowest - &Rational::from(1));
    } else {
        return true;
    }
    probes.iter().all(|mu| {
        e.filter(mu, SlopeFilter::AtLeast).rank() <= f.filter(mu, SlopeFilter::AtLeast).rank()
    })
}

/// Whether `f` slopewise dominates `e`: `rk(e) ≤ rk(f)` and on every unit
/// interval `[i-1, i]`, `i ≤ rk(e)`, the slope of `HN(e)` is at most that of `HN(f)`.
pub fn slopewise_dominates(f: &HNBundle, e: &HNBundle) -> bool {
    let f_points = f.breakpoints();
    let mut j = 0;
    // Unit slopes of F are non-increasing, so on each segment of E it suffices
    // to compare against F's unit slope at the segment's right end.
    for (end, slope) in e.breakpoints() {
        while j < f_points.len() && f_points[j].0 < end {
            j += 1;
        }
        match f_points.get(j) {
            Some((_, f_slope)) if slope <= *f_slope => {}
            _ => return false,
        }
    }
    true
}

/// Whether `e` embeds into `f` as a subbundle.
pub fn is_subbundle(e: &HNBundle, f: &HNBundle) -> bool {
    slopewise_dominates(f, e)
}

/// Whether `q` is a quotient bundle of `e`, via the dual criterion.
pub fn is_quotient(q: &HNBundle, e: &HNBundle) -> bool {
    slopewise_dominates(&e.dual(), &q.dual())
}

/// `E ≃ U ⊕ E´`, `F ≃ U ⊕ F´` with `E´`, `F´` sharing no slope.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CommonSlopeSplit {
    pub shared: HNBundle,
    pub e_rest: HNBundle,
    pub f_rest: HNBundle,
}

pub fn strip_common_slopes(e: &HNBundle, f: &HNBundle) -> CommonSlopeSplit {
    let shared = HNBundle::canonicalize(e.summands().iter().filter_map(|s| {
        let m = s.mult.min(f.multiplicity(&s.slope));
        (m > 0).then(|| (s.slope.clone(), m))
    }));
    let e_rest = e
        .checked_remove(&shared)
        .expect("shared part is a summand of E");
    let f_rest = f
        .checked_remove(&shared)
        .expect("shared part is a summand of F");
    CommonSlopeSplit {
        shared,
        e_rest,
        f_rest,
    }
}

/// `E ≃ D ⊕ E′`, `F ≃ D ⊕ F′` where `D` is the common initial part of the
/// two HN polygons.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CommonFactorDecomposition {
    pub common: HNBundle,
    pub e_complement: HNBundle,
    pub f_complement: HNBundle,
}

/// The longest common prefix of `HN(a)` and `HN(b)` as a bundle.
pub fn common_polygon_prefix(a: &HNBundle, b: &HNBundle) -> HNBundle {
    let mut prefix = Vec::new();
    for (x, y) in a.summands().iter().zip(b.summands()) {
        if x.slope != y.slope {
            break;
        }
        prefix.push((x.slope.clone(), x.mult.min(y.mult)));
        if x.mult != y.mult {
            break;
        }
    }
    HNBundle::canonicalize(prefix)
}

/// Splits off the common polygon prefix of `e` and `f`. Requires that `f`
/// slopewise dominates `e`.
pub fn max_common_factor(e: &HNBundle, f: &HNBundle) -> Result<CommonFactorDecomposition> {
    if !slopewise_dominates(f, e) {
        return Err(Error::Precondition(format!(
            "{f} does not slopewise dominate {e}"
        )));
    }
    let common = common_polygon_prefix(e, f);
    let e_complement = e.checked_remove(&common).expect("prefix is a summand");
    let f_complement = f.checked_remove(&common).expect("prefix is a summand");
    Ok(CommonFactorDecomposition {
        common,
        e_complement,
        f_complement,
    })
}

impl CommonFactorDecomposition {
    /// Checks the three properties of the decomposition for a dominated part
    /// `small = D ⊕ small′` and a dominating part `large = D ⊕ large′`:
    /// `large′` dominates `small′`; `μ_max(large′) > μ_max(small′)` when
    /// `small′ ≠ 0`; `μ_min(D) ≥ μ_max(large′)` when `D ≠ 0` and `small′ ≠ 0`.
    pub fn check(&self, small: &HNBundle, large: &HNBundle) -> std::result::Result<(), String> {
        check_split(
            &self.common,
            &self.e_complement,
            &self.f_complement,
            small,
            large,
        )
    }
}

pub(crate) fn check_split(
    common: &HNBundle,
    small_rest: &HNBundle,
    large_rest: &HNBundle,
    small: &HNBundle,
    large: &HNBundle,
) -> std::result::Result<(), String> {
    if &common.direct_sum(small_rest) != small {
        return Err(format!("{common} + {small_rest} != {small}"));
    }
    if &common.direct_sum(large_rest) != large {
        return Err(format!("{common} + {large_rest} != {large}"));
    }
    if !slopewise_dominates(large_rest, small_rest) {
        return Err(format!("{large_rest} does not dominate {small_rest}"));
    }
    if let Ok(small_max) = small_rest.mu_max() {
        match large_rest.mu_max() {
            Ok(large_max) if large_max > small_max => {}
            _ => return Err(format!("mu_max({large_rest}) <= mu_max({small_rest})")),
        }
        if let (Ok(common_min), Ok(large_max)) = (common.mu_min(), large_rest.mu_max()) {
            if common_min < large_max {
                return Err(format!("mu_min({common}) < mu_max({large_rest})"));
            }
        }
    }
    Ok(())
}

/// Whether `e` and `f` share a slope.
pub fn have_common_slope(e: &HNBundle, f: &HNBundle) -> bool {
    e.slopes().any(|s| f.multiplicity(s) > 0)
}

/// Rank of `V^{≥μ}`, a convenience for the rank-filtration checks.
pub fn rank_at_least(v: &HNBundle, mu: &Rational) -> BigInt {
    v.filter(mu, SlopeFilter::AtLeast).rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> HNBundle {
        s.parse().unwrap()
    }

    #[test]
    fn rank_condition_examples() {
        assert!(rank_condition(&b("0:1"), &b("1,-1")));
        let e = b("3/2,-2:2");
        assert!(rank_condition(&e, &e));
        assert!(!rank_condition(&b("1"), &b("0:1")));
        assert!(rank_condition(&HNBundle::zero(), &HNBundle::zero()));
        assert!(rank_condition(&HNBundle::zero(), &b("-4")));
        assert!(!rank_condition(&b("-4"), &HNBundle::zero()));
    }

    #[test]
    fn dominance_examples() {
        assert!(slopewise_dominates(&b("1,-1"), &b("0:1,-2")));
        let v = b("5/2,0:3,-1/3");
        assert!(slopewise_dominates(&v, &v));
        assert!(!slopewise_dominates(&b("0:1"), &b("1")));
        assert!(slopewise_dominates(&b("0:1"), &HNBundle::zero()));
        assert!(!slopewise_dominates(&HNBundle::zero(), &b("0:1")));
        // larger rank is never dominated
        assert!(!slopewise_dominates(&b("5"), &b("-5:2")));
        // O(1/2) has unit slopes 1/2, 1/2; O(1) ⊕ O has 1, 0
        assert!(!slopewise_dominates(&b("1,0:1"), &b("1/2")));
        assert!(slopewise_dominates(&b("1/2"), &b("0:2")));
    }

    #[test]
    fn subbundle_and_quotient_examples() {
        assert!(is_subbundle(&b("0:1"), &b("1,-1")));
        let e = b("1/2,-3");
        assert!(is_subbundle(&e, &e));
        assert!(!is_subbundle(&b("1"), &b("0:1")));

        assert!(is_quotient(&b("-1"), &b("0:1,-2")));
        assert!(is_quotient(&e, &e));
        assert!(!is_quotient(&b("1:2"), &b("1")));
        assert!(is_quotient(&HNBundle::zero(), &b("7")));
    }

    #[test]
    fn strip_common_slopes_examples() {
        let split = strip_common_slopes(&b("0:1,-1"), &b("1,-1"));
        assert_eq!(split.shared, b("-1"));
        assert_eq!(split.e_rest, b("0:1"));
        assert_eq!(split.f_rest, b("1"));

        let split = strip_common_slopes(&b("2,0:1"), &b("1,-1"));
        assert!(split.shared.is_zero());

        let e = b("1/2:2,-1");
        let split = strip_common_slopes(&e, &e);
        assert_eq!(split.shared, e);
        assert!(split.e_rest.is_zero() && split.f_rest.is_zero());

        let split = strip_common_slopes(&b("0:3,-1"), &b("0:1,2"));
        assert_eq!(split.shared, b("0:1"));
        assert_eq!(split.e_rest, b("0:2,-1"));
        assert!(!have_common_slope(&split.e_rest, &split.f_rest));
    }

    #[test]
    fn max_common_factor_examples() {
        let (e, f) = (b("2,0:1,-1"), b("2,1,-1"));
        let d = max_common_factor(&e, &f).unwrap();
        assert_eq!(d.common, b("2"));
        assert_eq!(d.e_complement, b("0:1,-1"));
        assert_eq!(d.f_complement, b("1,-1"));
        d.check(&e, &f).unwrap();

        let e = b("3/2,-1:2");
        let d = max_common_factor(&e, &e).unwrap();
        assert_eq!(d.common, e);
        assert!(d.e_complement.is_zero() && d.f_complement.is_zero());

        let (e, f) = (b("0:1,-2"), b("1,-1"));
        let d = max_common_factor(&e, &f).unwrap();
        assert!(d.common.is_zero());
        assert_eq!(
            (d.e_complement.clone(), d.f_complement.clone()),
            (e.clone(), f.clone())
        );
        d.check(&e, &f).unwrap();

        assert!(matches!(
            max_common_factor(&b("1"), &b("0:1")),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn common_prefix_stops_inside_a_segment() {
        // HN(E) and HN(F) share the first unit of slope 1 only.
        let (e, f) = (b("1,0:1"), b("1:2,-5"));
        let d = max_common_factor(&e, &f).unwrap();
        assert_eq!(d.common, b("1"));
        assert_eq!(d.e_complement, b("0:1"));
        assert_eq!(d.f_complement, b("1,-5"));
        d.check(&e, &f).unwrap();
    }
}
