//! The degenerating sequence `E = E₀, E₁, …, E_r = Q` for a reduced triple
//! `(E, F, Q)`, along which `c_{E_i,F}(Q)` decreases to `c_{Q,F}(Q) = 0`, and
//! the normalization that brings a general admissible triple into reduced form.
//!
//! The first step peels one trivial summand off `E`. Every later step works on
//! dual bundles: `Q^∨ = M_i ⊕ R_i` and `E_i^∨ = M_i ⊕ S_i` where `M_i` is the
//! common part of the two HN polygons, and `E_{i+1} = (M_i ⊕ S̄_i)^∨` with `S̄_i`
//! the maximal slope reduction of `S_i` to `R_i`.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::bundle::{HNBundle, SlopeFilter};
use crate::criteria::{check_split, common_polygon_prefix, have_common_slope, slopewise_dominates};
use crate::degree::{c_value, nonneg_degree};
use crate::error::{Condition, Error, Result};
use crate::rational::{common_denominator, Rational};

/// Flattens every slope of `v` above `μ_max(w)` down to `μ_max(w)`, keeping the rank.
pub fn max_slope_reduction(v: &HNBundle, w: &HNBundle) -> Result<HNBundle> {
    if v.is_zero() || w.is_zero() {
        return Err(Error::Precondition(
            "maximal slope reduction needs nonzero bundles".into(),
        ));
    }
    if !v.has_integer_slopes() || !w.has_integer_slopes() {
        return Err(Error::Precondition(
            "maximal slope reduction needs integer slopes".into(),
        ));
    }
    if !slopewise_dominates(v, w) {
        return Err(Error::Precondition(format!(
            "{v} does not slopewise dominate {w}"
        )));
    }
    let top = w.mu_max()?;
    let flattened = v.filter(top, SlopeFilter::Above).rank();
    let flattened = flattened
        .to_u64()
        .ok_or_else(|| Error::Unsupported("rank exceeds 64 bits".into()))?;
    Ok(
        HNBundle::semistable(top.clone(), flattened)
            .direct_sum(&v.filter(top, SlopeFilter::AtMost)),
    )
}

/// `E₁` with `E = E₁ ⊕ O`. Requires `μ_max(E) = 0`.
pub fn build_e1(e: &HNBundle) -> Result<HNBundle> {
    match e.mu_max() {
        Ok(top) if top.is_zero() => {}
        Ok(top) => {
            return Err(Error::Precondition(format!(
                "peeling a trivial summand needs mu_max = 0, found {top}"
            )))
        }
        Err(_) => {
            return Err(Error::Precondition(
                "the zero bundle has no trivial summand".into(),
            ))
        }
    }
    Ok(e.checked_remove(&HNBundle::trivial())
        .expect("slope 0 is present when mu_max = 0"))
}

/// `(M_i, R_i, S_i)` with `Q^∨ = M_i ⊕ R_i` and `E_i^∨ = M_i ⊕ S_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionTriple {
    #[serde(rename = "M")]
    pub common: HNBundle,
    #[serde(rename = "R")]
    pub q_complement: HNBundle,
    #[serde(rename = "S")]
    pub e_complement: HNBundle,
}

impl DecompositionTriple {
    /// Checks the decomposition identities and the three slope properties.
    pub fn check(&self, e_i: &HNBundle, q: &HNBundle) -> std::result::Result<(), String> {
        check_split(
            &self.common,
            &self.q_complement,
            &self.e_complement,
            &q.dual(),
            &e_i.dual(),
        )?;
        if e_i != q && (self.q_complement.is_zero() || self.e_complement.is_zero()) {
            return Err(format!(
                "E_i = {e_i} differs from Q = {q} but R or S is zero"
            ));
        }
        Ok(())
    }
}

pub fn decompose_mrs(e_i: &HNBundle, q: &HNBundle) -> Result<DecompositionTriple> {
    if e_i.rank() != q.rank() {
        return Err(Error::Precondition(format!(
            "rank({e_i}) = {} differs from rank({q}) = {}",
            e_i.rank(),
            q.rank()
        )));
    }
    let (q_dual, e_dual) = (q.dual(), e_i.dual());
    if !slopewise_dominates(&e_dual, &q_dual) {
        return Err(Error::Precondition(format!(
            "dual({e_i}) does not slopewise dominate dual({q})"
        )));
    }
    let common = common_polygon_prefix(&q_dual, &e_dual);
    let q_complement = q_dual.checked_remove(&common).expect("prefix is a summand");
    let e_complement = e_dual.checked_remove(&common).expect("prefix is a summand");
    Ok(DecompositionTriple {
        common,
        q_complement,
        e_complement,
    })
}

/// `E_{i+1}` from `E_i`; `Q` is a fixed point.
pub fn degeneration_step(e_i: &HNBundle, q: &HNBundle) -> Result<HNBundle> {
    if e_i == q {
        return Ok(q.clone());
    }
    let triple = decompose_mrs(e_i, q)?;
    next_from_triple(&triple)
}

fn next_from_triple(triple: &DecompositionTriple) -> Result<HNBundle> {
    let reduced = max_slope_reduction(&triple.e_complement, &triple.q_complement)?;
    Ok(triple.common.direct_sum(&reduced).dual())
}

/// Every reduced hypothesis that `(e, f, q)` violates, in order.
pub fn reduced_condition_failures(e: &HNBundle, f: &HNBundle, q: &HNBundle) -> Vec<Condition> {
    let mut failed = key_condition_failures(e, f, q);
    failed.retain(|c| *c != Condition::RankBelowE);
    if q.rank() + 1 != e.rank() {
        failed.push(Condition::RankOneBelowE);
    }
    if ![e, f, q].iter().all(|v| v.has_integer_slopes()) {
        failed.push(Condition::IntegerSlopes);
    }
    if !e.mu_max().is_ok_and(Rational::is_zero) {
        failed.push(Condition::ZeroMaxSlope);
    }
    failed
}

/// Every hypothesis (i)–(v) of the key inequality that `(e, f, q)` violates.
pub fn key_condition_failures(e: &HNBundle, f: &HNBundle, q: &HNBundle) -> Vec<Condition> {
    let mut failed = Vec::new();
    if !slopewise_dominates(f, e) {
        failed.push(Condition::FDominatesE);
    }
    if !slopewise_dominates(&e.dual(), &q.dual()) {
        failed.push(Condition::DualEDominatesDualQ);
    }
    if !slopewise_dominates(f, q) {
        failed.push(Condition::FDominatesQ);
    }
    if have_common_slope(e, f) {
        failed.push(Condition::NoCommonSlopes);
    }
    if q.rank() >= e.rank() {
        failed.push(Condition::RankBelowE);
    }
    failed
}

/// The full degenerating sequence for a reduced triple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegenerationTrace {
    /// `E₀ = E, E₁, …, E_r = Q`.
    pub chain: Vec<HNBundle>,
    /// `steps[k]` decomposes `chain[k + 1]` against `Q`.
    pub steps: Vec<DecompositionTriple>,
    /// `c_{E_i,F}(Q)` for each entry of the chain.
    #[serde(rename = "c", serialize_with = "crate::serde_int::serialize_vec")]
    pub c_values: Vec<BigInt>,
    /// `r`, the first index with `E_r = Q`.
    #[serde(rename = "r")]
    pub terminated_at: usize,
}

pub fn degeneration_trace(e: &HNBundle, f: &HNBundle, q: &HNBundle) -> Result<DegenerationTrace> {
    if let Some(&failed) = reduced_condition_failures(e, f, q).first() {
        return Err(Error::Condition(failed));
    }
    let max_steps = (q.rank() + 2u32)
        .to_usize()
        .ok_or_else(|| Error::Unsupported("rank exceeds the address space".into()))?;

    let mut chain = vec![e.clone(), build_e1(e)?];
    let mut steps = Vec::new();
    loop {
        let current = chain.last().expect("chain is never empty");
        let triple = decompose_mrs(current, q)?;
        let done = current == q;
        let next = (!done).then(|| next_from_triple(&triple)).transpose()?;
        steps.push(triple);
        match next {
            None => break,
            Some(next) => chain.push(next),
        }
        if chain.len() - 1 > max_steps {
            return Err(Error::Internal(format!(
                "degeneration of ({e}, {f}, {q}) did not reach Q within {max_steps} steps"
            )));
        }
    }
    let c_values = chain.iter().map(|e_i| c_value(e_i, f, q)).collect();
    let terminated_at = chain.len() - 1;
    Ok(DegenerationTrace {
        chain,
        steps,
        c_values,
        terminated_at,
    })
}

impl DegenerationTrace {
    /// Checks every structural and numerical property the sequence must have
    /// for the reduced triple `(e, f, q)` it was built from.
    pub fn check(
        &self,
        e: &HNBundle,
        f: &HNBundle,
        q: &HNBundle,
    ) -> std::result::Result<(), String> {
        let r = self.terminated_at;
        if self.chain.len() != r + 1 || self.c_values.len() != r + 1 || self.steps.len() != r {
            return Err("trace lengths are inconsistent".into());
        }
        if &self.chain[0] != e || &self.chain[r] != q {
            return Err("chain does not run from E to Q".into());
        }
        if self.chain[..r].iter().any(|e_i| e_i == q) {
            return Err("chain reaches Q before its last entry".into());
        }
        if BigInt::from(r) > q.rank() + 2u32 {
            return Err(format!("r = {r} exceeds rank(Q) + 2"));
        }
        if let Some(i) = (1..=r).find(|&i| self.chain[i].rank() != q.rank()) {
            return Err(format!("rank(E_{i}) differs from rank(Q)"));
        }
        if !self.chain.iter().all(HNBundle::has_integer_slopes) {
            return Err("non-integer slope in the chain".into());
        }
        for (k, triple) in self.steps.iter().enumerate() {
            triple
                .check(&self.chain[k + 1], q)
                .map_err(|msg| format!("step {}: {msg}", k + 1))?;
        }
        let c = &self.c_values;
        if c.iter()
            .zip(&self.chain)
            .any(|(c_i, e_i)| *c_i != c_value(e_i, f, q))
        {
            return Err("recorded c-values disagree with c(E_i, F, Q)".into());
        }
        if !c[r].is_zero() {
            return Err(format!("endpoint c = {} is not zero", c[r]));
        }
        if c[0] <= BigInt::zero() {
            return Err(format!("c(E, F, Q) = {} is not positive", c[0]));
        }
        if let Some(i) = (0..r).find(|&i| c[i] < c[i + 1]) {
            return Err(format!("c increases from step {i} to {}", i + 1));
        }
        if r >= 2 && c[0] <= c[2] {
            return Err(format!(
                "c[0] = {} is not greater than c[2] = {}",
                c[0], c[2]
            ));
        }
        let ledger = nonneg_degree(f) - nonneg_degree(q);
        if &c[0] - &c[1] != ledger {
            return Err(format!(
                "c[0] - c[1] = {} but deg(F)^>=0 - deg(Q)^>=0 = {ledger}",
                &c[0] - &c[1]
            ));
        }
        for i in 1..r {
            if c[i] != c[i + 1] {
                continue;
            }
            // Equality forces E_i = Q or rk(S_i^∨) = rk(F^{> μ_min(S_i^∨)}).
            let s_dual = self.steps[i - 1].e_complement.dual();
            let tight = s_dual
                .mu_min()
                .map(|mu| s_dual.rank() == f.filter(mu, SlopeFilter::Above).rank())
                .unwrap_or(false);
            if self.chain[i] != *q && !tight {
                return Err(format!(
                    "c[{i}] = c[{}] without the equality condition",
                    i + 1
                ));
            }
        }
        Ok(())
    }

    /// Indices `i` where `E_i^∨` fails to slopewise dominate `E_{i+1}^∨`.
    /// Expected to be empty; reported as findings rather than failures.
    pub fn dual_degeneration_gaps(&self) -> Vec<usize> {
        self.chain
            .windows(2)
            .enumerate()
            .filter(|(_, w)| !slopewise_dominates(&w[0].dual(), &w[1].dual()))
            .map(|(i, _)| i)
            .collect()
    }
}

/// One transformation applied while normalizing a triple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Transform {
    /// Vertical stretch of all three polygons; `c` is multiplied by `factor`.
    Stretch {
        #[serde(serialize_with = "crate::serde_int::serialize")]
        factor: BigInt,
        #[serde(serialize_with = "crate::serde_int::serialize")]
        c_before: BigInt,
        #[serde(serialize_with = "crate::serde_int::serialize")]
        c_after: BigInt,
    },
    /// Twist of all three bundles by `O(shift)`; `c` is unchanged.
    Twist {
        #[serde(serialize_with = "crate::serde_int::serialize")]
        shift: BigInt,
        #[serde(serialize_with = "crate::serde_int::serialize")]
        c: BigInt,
    },
    /// `E = Ĕ ⊕ O` replaced by `Ĕ`, with
    /// `c_before = c_after + deg(F)^{≥0} − deg(Q)^{≥0}`.
    Peel {
        #[serde(serialize_with = "crate::serde_int::serialize")]
        c_before: BigInt,
        #[serde(serialize_with = "crate::serde_int::serialize")]
        c_after: BigInt,
        #[serde(serialize_with = "crate::serde_int::serialize")]
        correction: BigInt,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalizedTriple {
    pub e: HNBundle,
    pub f: HNBundle,
    pub q: HNBundle,
    pub transcript: Vec<Transform>,
}

impl NormalizedTriple {
    /// Recovers `c_{E,F}(Q)` of the original triple from the reduced value:
    /// undo the peels by adding their corrections, then divide by the stretch.
    pub fn original_c(&self, reduced_c: &BigInt) -> BigInt {
        let mut c = reduced_c.clone();
        let mut factor = BigInt::one();
        for t in &self.transcript {
            match t {
                Transform::Peel { correction, .. } => c += correction,
                Transform::Stretch { factor: k, .. } => factor = k.clone(),
                Transform::Twist { .. } => {}
            }
        }
        debug_assert!((&c % &factor).is_zero());
        c / factor
    }
}

/// Brings a triple satisfying (i)–(v) to a triple satisfying all seven reduced
/// conditions: stretch to integer slopes, then alternately twist `μ_max(E)` to
/// zero and peel a trivial summand until `rk(Q) = rk(E) − 1`.
pub fn normalize_triple(e: &HNBundle, f: &HNBundle, q: &HNBundle) -> Result<NormalizedTriple> {
    if let Some(&failed) = key_condition_failures(e, f, q).first() {
        return Err(Error::Condition(failed));
    }
    let (mut e, mut f, mut q) = (e.clone(), f.clone(), q.clone());
    let mut transcript = Vec::new();

    let factor = common_denominator(e.slopes().chain(f.slopes()).chain(q.slopes()));
    if !factor.is_one() {
        let c_before = c_value(&e, &f, &q);
        e = e.vertical_stretch(&factor)?;
        f = f.vertical_stretch(&factor)?;
        q = q.vertical_stretch(&factor)?;
        let c_after = c_value(&e, &f, &q);
        transcript.push(Transform::Stretch {
            factor,
            c_before,
            c_after,
        });
    }

    loop {
        let top = e
            .mu_max()?
            .to_integer()
            .expect("slopes are integral after stretching");
        if !top.is_zero() {
            let shift = -top;
            e = e.twist_by(&shift);
            f = f.twist_by(&shift);
            q = q.twist_by(&shift);
            transcript.push(Transform::Twist {
                shift,
                c: c_value(&e, &f, &q),
            });
        }
        if e.rank() == q.rank() + 1u32 {
            break;
        }
        let c_before = c_value(&e, &f, &q);
        e = build_e1(&e)?;
        let c_after = c_value(&e, &f, &q);
        transcript.push(Transform::Peel {
            c_before,
            c_after,
            correction: nonneg_degree(&f) - nonneg_degree(&q),
        });
    }

    if let Some(failed) = reduced_condition_failures(&e, &f, &q).first() {
        return Err(Error::Internal(format!(
            "normalized triple ({e}, {f}, {q}) violates {failed}"
        )));
    }
    Ok(NormalizedTriple {
        e,
        f,
        q,
        transcript,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> HNBundle {
        s.parse().unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&n| BigInt::from(n)).collect()
    }

    #[test]
    fn max_slope_reduction_examples() {
        assert_eq!(max_slope_reduction(&b("3,2"), &b("1")).unwrap(), b("1:2"));
        let v = b("1,-2");
        assert_eq!(max_slope_reduction(&v, &b("1,-4")).unwrap(), v);
        assert_eq!(max_slope_reduction(&b("2"), &b("1")).unwrap(), b("1"));
        assert_eq!(
            max_slope_reduction(&b("3,0:1,-1"), &b("1,-3")).unwrap(),
            b("1,0:1,-1")
        );
    }

    #[test]
    fn max_slope_reduction_preconditions() {
        assert!(max_slope_reduction(&HNBundle::zero(), &b("1")).is_err());
        assert!(max_slope_reduction(&b("1"), &HNBundle::zero()).is_err());
        assert!(max_slope_reduction(&b("3/2"), &b("1")).is_err());
        assert!(max_slope_reduction(&b("0:1"), &b("1")).is_err());
    }

    #[test]
    fn build_e1_examples() {
        assert_eq!(build_e1(&b("0:1,-2")).unwrap(), b("-2"));
        assert_eq!(build_e1(&b("0:3")).unwrap(), b("0:2"));
        assert!(matches!(build_e1(&b("-1")), Err(Error::Precondition(_))));
        assert!(build_e1(&b("1,0:1")).is_err());
        assert!(build_e1(&HNBundle::zero()).is_err());
    }

    #[test]
    fn decompose_examples() {
        let t = decompose_mrs(&b("-2"), &b("-1")).unwrap();
        assert!(t.common.is_zero());
        assert_eq!(
            (t.q_complement.clone(), t.e_complement.clone()),
            (b("1"), b("2"))
        );

        let q = b("2,-1:2");
        let t = decompose_mrs(&q, &q).unwrap();
        assert_eq!(t.common, q.dual());
        assert!(t.q_complement.is_zero() && t.e_complement.is_zero());

        // Duals O(3) ⊕ O(1) and O(2) ⊕ O(1) already differ in the first segment.
        let (e_i, q) = (b("-1,-3"), b("-1,-2"));
        let t = decompose_mrs(&e_i, &q).unwrap();
        assert!(t.common.is_zero());
        assert_eq!(t.q_complement, b("2,1"));
        assert_eq!(t.e_complement, b("3,1"));
        t.check(&e_i, &q).unwrap();

        // Shared leading segment of slope 3.
        let (e_i, q) = (b("-2,-3"), b("-1,-3"));
        let t = decompose_mrs(&e_i, &q).unwrap();
        assert_eq!(t.common, b("3"));
        assert_eq!(
            (t.q_complement.clone(), t.e_complement.clone()),
            (b("1"), b("2"))
        );
        t.check(&e_i, &q).unwrap();

        assert!(decompose_mrs(&b("-1"), &b("-1:2")).is_err());
        assert!(decompose_mrs(&b("-1"), &b("-2")).is_err());
    }

    #[test]
    fn step_examples() {
        assert_eq!(degeneration_step(&b("-2"), &b("-1")).unwrap(), b("-1"));
        let q = b("0:1,-5");
        assert_eq!(degeneration_step(&q, &q).unwrap(), q);
        assert_eq!(
            degeneration_step(&b("-1,-3"), &b("-1,-2")).unwrap(),
            b("-1,-2")
        );
    }

    #[test]
    fn worked_trace() {
        let (e, f, q) = (b("0:1,-2"), b("1,-1"), b("-1"));
        let trace = degeneration_trace(&e, &f, &q).unwrap();
        assert_eq!(trace.chain, vec![e.clone(), b("-2"), q.clone()]);
        assert_eq!(trace.c_values, ints(&[2, 1, 0]));
        assert_eq!(trace.terminated_at, 2);
        trace.check(&e, &f, &q).unwrap();
        assert!(trace.dual_degeneration_gaps().is_empty());

        let json = serde_json::to_value(&trace).unwrap();
        assert_eq!(json["c"], serde_json::json!([2, 1, 0]));
        assert_eq!(json["chain"].as_array().unwrap().len(), 3);
        assert_eq!(json["steps"][0]["S"]["summands"][0]["slope"], "2");
    }

    #[test]
    fn trace_with_immediate_peel() {
        // E = O ⊕ O(-1), E₁ = O(-1) = Q.
        let (e, f, q) = (b("0:1,-1"), b("1:2"), b("-1"));
        assert!(reduced_condition_failures(&e, &f, &q).is_empty());
        let trace = degeneration_trace(&e, &f, &q).unwrap();
        assert_eq!(trace.terminated_at, 1);
        assert_eq!(trace.c_values.last(), Some(&BigInt::zero()));
        trace.check(&e, &f, &q).unwrap();
    }

    #[test]
    fn trace_names_the_failed_condition() {
        // Shares slope -1 with F; every other condition holds.
        let (e, f, q) = (b("0:1,-1"), b("1,-1"), b("-1"));
        assert_eq!(
            reduced_condition_failures(&e, &f, &q),
            vec![Condition::NoCommonSlopes]
        );
        assert_eq!(
            degeneration_trace(&e, &f, &q).unwrap_err(),
            Error::Condition(Condition::NoCommonSlopes)
        );
        let err = degeneration_trace(&b("1,-2"), &b("2,0:1"), &b("-2")).unwrap_err();
        assert_eq!(err, Error::Condition(Condition::ZeroMaxSlope));
    }

    #[test]
    fn normalize_identity_on_reduced() {
        let (e, f, q) = (b("0:1,-2"), b("1,-1"), b("-1"));
        let n = normalize_triple(&e, &f, &q).unwrap();
        assert!(n.transcript.is_empty());
        assert_eq!((n.e, n.f, n.q), (e, f, q));
    }

    #[test]
    fn normalize_stretches_half_integers() {
        let (e, f, q) = (b("-1/2"), b("1/2"), b("0:1"));
        assert_eq!(c_value(&e, &f, &q), BigInt::from(2));
        let c = c_value(&e, &f, &q);
        let n = normalize_triple(&e, &f, &q).unwrap();
        match &n.transcript[0] {
            Transform::Stretch {
                factor,
                c_before,
                c_after,
            } => {
                assert_eq!(factor, &BigInt::from(2));
                assert_eq!(c_before, &c);
                assert_eq!(c_after, &(&c * 2));
            }
            other => panic!("expected a stretch, got {other:?}"),
        }
        assert!(reduced_condition_failures(&n.e, &n.f, &n.q).is_empty());
        assert_eq!(n.original_c(&c_value(&n.e, &n.f, &n.q)), c);
    }

    #[test]
    fn normalize_twists_and_peels() {
        // rank gap 2 and mu_max(E) = 1 with multiplicity 2.
        let (e, f, q) = (b("1:2,-1"), b("2:3"), b("0:1"));
        assert!(key_condition_failures(&e, &f, &q).is_empty());
        let n = normalize_triple(&e, &f, &q).unwrap();
        assert!(matches!(
            n.transcript.as_slice(),
            [Transform::Twist { .. }, Transform::Peel { .. }]
        ));
        if let Transform::Peel {
            c_before,
            c_after,
            correction,
        } = &n.transcript[1]
        {
            assert_eq!(c_before, &(c_after + correction));
            assert!(correction >= &BigInt::zero());
        }
        assert!(reduced_condition_failures(&n.e, &n.f, &n.q).is_empty());
        let c = c_value(&e, &f, &q);
        assert_eq!(n.original_c(&c_value(&n.e, &n.f, &n.q)), c);
        let trace = degeneration_trace(&n.e, &n.f, &n.q).unwrap();
        trace.check(&n.e, &n.f, &n.q).unwrap();
    }

    #[test]
    fn normalize_rejects_inadmissible() {
        let err = normalize_triple(&b("0:1"), &b("1,-1"), &b("1")).unwrap_err();
        assert_eq!(err, Error::Condition(Condition::RankBelowE));
    }
}
