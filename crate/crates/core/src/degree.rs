//! Degree numerology: `deg(V^∨ ⊗ W)^{≥0}`, Hom-space and stratum dimensions,
//! and the codimension invariant `c_{E,F}(Q)`.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::bundle::{HNBundle, SlopeFilter};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// `deg(V^∨ ⊗ W)^{≥0}` as the sum of cross products `v_i × w_j` over segment
/// pairs with `μ(v_i) ≤ μ(w_j)`.
pub fn deg_nonneg(v: &HNBundle, w: &HNBundle) -> BigInt {
    let mut total = BigInt::zero();
    let w_segments: Vec<_> = w
        .summands()
        .iter()
        .map(|s| (&s.slope, s.segment()))
        .collect();
    for a in v.summands() {
        let va = a.segment();
        // W is sorted by descending slope, so the admissible w_j form a prefix.
        for (slope, wb) in &w_segments {
            if a.slope > **slope {
                break;
            }
            total += va.cross(wb);
        }
    }
    total
}

/// Independent route to [`deg_nonneg`]: expand `V^∨ ⊗ W` into semistable
/// blocks and take the degree of the slope-`≥ 0` part.
pub fn deg_nonneg_oracle(v: &HNBundle, w: &HNBundle) -> BigInt {
    nonneg_degree(&v.dual().tensor(w))
}

/// `deg(V)^{≥0}`, the degree of the nonnegative-slope part.
pub fn nonneg_degree(v: &HNBundle) -> BigInt {
    v.filter(&Rational::zero(), SlopeFilter::AtLeast).degree()
}

/// Dimension of the space of bundle maps `E → F`.
pub fn dim_hom(e: &HNBundle, f: &HNBundle) -> BigInt {
    deg_nonneg(e, f)
}

/// Dimension of the stratum of maps `E → F` with image `Q`:
/// `deg(E^∨⊗Q)^{≥0} + deg(Q^∨⊗F)^{≥0} − deg(Q^∨⊗Q)^{≥0}`.
///
/// The value is meaningful only when the stratum is nonempty; admissibility of
/// `Q` is the caller's business. A negative value is reported as an internal
/// consistency error.
pub fn stratum_dim(e: &HNBundle, f: &HNBundle, q: &HNBundle) -> Result<BigInt> {
    let dim = deg_nonneg(e, q) + deg_nonneg(q, f) - deg_nonneg(q, q);
    if dim.is_negative() {
        return Err(Error::Internal(format!(
            "stratum dimension {dim} is negative for E = {e}, F = {f}, Q = {q}"
        )));
    }
    Ok(dim)
}

/// `c_{E,F}(Q) = deg(E^∨⊗F)^{≥0} + deg(Q^∨⊗Q)^{≥0} − deg(E^∨⊗Q)^{≥0} − deg(Q^∨⊗F)^{≥0}`.
pub fn c_value(e: &HNBundle, f: &HNBundle, q: &HNBundle) -> BigInt {
    deg_nonneg(e, f) + deg_nonneg(q, q) - deg_nonneg(e, q) - deg_nonneg(q, f)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StratumReport {
    pub image: HNBundle,
    #[serde(serialize_with = "crate::serde_int::serialize")]
    pub stratum_dimension: BigInt,
    #[serde(serialize_with = "crate::serde_int::serialize")]
    pub c_value: BigInt,
}

impl StratumReport {
    pub fn new(e: &HNBundle, f: &HNBundle, q: &HNBundle) -> Result<Self> {
        let stratum_dimension = stratum_dim(e, f, q)?;
        let c_value = c_value(e, f, q);
        debug_assert_eq!(&c_value, &(dim_hom(e, f) - &stratum_dimension));
        Ok(StratumReport {
            image: q.clone(),
            stratum_dimension,
            c_value,
        })
    }
}
