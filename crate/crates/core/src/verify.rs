//! Exhaustive and seeded-random machine checks over finite universes of bundles.
//!
//! A universe is every canonical bundle whose rank is bounded and whose slopes
//! lie in a closed interval with bounded denominators. Each `verify_*` function
//! checks one family of statements over all tuples drawn from a universe (or a
//! seeded sample of them) and returns a [`VerificationReport`] whose
//! counterexamples are sorted, so reports are identical across runs and
//! thread counts.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bundle::HNBundle;
use crate::criteria::{have_common_slope, rank_condition, slopewise_dominates};
use crate::degeneration::{degeneration_trace, reduced_condition_failures};
use crate::degree::{c_value, deg_nonneg, deg_nonneg_oracle, dim_hom, stratum_dim};
use crate::rational::Rational;

/// Bounds of a finite bundle universe.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniverseSpec {
    pub max_rank: u32,
    pub slope_min: Rational,
    pub slope_max: Rational,
    pub max_denominator: u32,
    /// When set, checks draw this many seeded random tuples instead of all of them.
    pub sample_limit: Option<usize>,
    pub seed: u64,
    pub include_zero: bool,
}

impl UniverseSpec {
    pub fn new(max_rank: u32, slope_min: i64, slope_max: i64, max_denominator: u32) -> Self {
        UniverseSpec {
            max_rank,
            slope_min: Rational::from(slope_min),
            slope_max: Rational::from(slope_max),
            max_denominator,
            sample_limit: None,
            seed: 0,
            include_zero: true,
        }
    }

    /// Rank ≤ 4, slopes in [-2, 2], denominators ≤ 2: the default for pair checks.
    pub fn desk_pairs() -> Self {
        UniverseSpec::new(4, -2, 2, 2)
    }

    /// Rank ≤ 4, integer slopes in [-3, 3]: the default for triple checks.
    pub fn desk_triples() -> Self {
        UniverseSpec::new(4, -3, 3, 1)
    }

    pub fn sampled(mut self, samples: usize, seed: u64) -> Self {
        self.sample_limit = Some(samples);
        self.seed = seed;
        self
    }

    /// Every admissible slope, in descending order.
    pub fn slopes(&self) -> Vec<Rational> {
        let mut out = Vec::new();
        for d in 1..=self.max_denominator.min(self.max_rank) {
            let den = BigInt::from(d);
            let lo = ceil_mul(&self.slope_min, &den);
            let hi = (&self.slope_max * &Rational::from_integer(den.clone())).floor();
            let mut p = lo;
            while p <= hi {
                if p.gcd(&den).is_one() {
                    out.push(Rational::new(p.clone(), den.clone()).expect("nonzero denominator"));
                }
                p += 1;
            }
        }
        out.sort_by(|a, b| b.cmp(a));
        out
    }
}

fn ceil_mul(r: &Rational, n: &BigInt) -> BigInt {
    -(&-r * &Rational::from_integer(n.clone())).floor()
}

/// All canonical bundles of the universe, zero first (when included), then by
/// increasing rank; within a rank, in a fixed lexicographic order. No duplicates.
pub fn enumerate_bundles(spec: &UniverseSpec) -> Vec<HNBundle> {
    let slopes = spec.slopes();
    let mut by_rank: Vec<Vec<HNBundle>> = vec![Vec::new(); spec.max_rank as usize + 1];
    let mut current = Vec::new();
    collect_multisets(
        &slopes,
        0,
        spec.max_rank as u64,
        0,
        &mut current,
        &mut by_rank,
    );
    let mut out: Vec<HNBundle> = by_rank.into_iter().flatten().collect();
    if !spec.include_zero {
        out.retain(|b| !b.is_zero());
    }
    out
}

fn collect_multisets(
    slopes: &[Rational],
    index: usize,
    budget: u64,
    used: u64,
    current: &mut Vec<(Rational, u64)>,
    by_rank: &mut [Vec<HNBundle>],
) {
    if index == slopes.len() {
        by_rank[used as usize].push(HNBundle::canonicalize(current.iter().cloned()));
        return;
    }
    let width = slopes[index].denom().to_u64().expect("small denominator");
    let mut mult = 0;
    while mult * width <= budget {
        if mult > 0 {
            current.push((slopes[index].clone(), mult));
        }
        collect_multisets(
            slopes,
            index + 1,
            budget - mult * width,
            used + mult * width,
            current,
            by_rank,
        );
        if mult > 0 {
            current.pop();
        }
        mult += 1;
    }
}

/// Outcome of one property check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub property_name: String,
    pub instances_checked: u64,
    pub counterexamples: Vec<String>,
    /// Observations that are not failures (coverage statistics, flagged side properties).
    pub findings: Vec<String>,
    #[serde(rename = "elapsed_ms", serialize_with = "serialize_ms")]
    pub elapsed: Duration,
}

fn serialize_ms<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u64(d.as_millis() as u64)
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} ({} instances, {} counterexamples, {} ms)",
            self.property_name,
            if self.passed() { "PASS" } else { "FAIL" },
            self.instances_checked,
            self.counterexamples.len(),
            self.elapsed.as_millis()
        )
    }
}

/// Per-bundle data reused across tuples.
struct Entry {
    bundle: HNBundle,
    dual: HNBundle,
    rank: BigInt,
}

fn entries(universe: &[HNBundle]) -> Vec<Entry> {
    universe
        .iter()
        .map(|b| Entry {
            bundle: b.clone(),
            dual: b.dual(),
            rank: b.rank(),
        })
        .collect()
}

/// Index pairs to check: all ordered pairs, or a seeded sample of them.
fn pair_indices(n: usize, spec: &UniverseSpec) -> Vec<(usize, usize)> {
    if n == 0 {
        return Vec::new();
    }
    match spec.sample_limit {
        None => (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect(),
        Some(limit) => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            (0..limit)
                .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
                .collect()
        }
    }
}

struct Tally {
    checked: u64,
    failures: Vec<String>,
    findings: Vec<String>,
}

impl Tally {
    fn empty() -> Self {
        Tally {
            checked: 0,
            failures: Vec::new(),
            findings: Vec::new(),
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.checked += other.checked;
        self.failures.extend(other.failures);
        self.findings.extend(other.findings);
        self
    }
}

fn finish(
    name: &str,
    start: Instant,
    mut tally: Tally,
    mut extra_findings: Vec<String>,
) -> VerificationReport {
    tally.failures.sort();
    tally.failures.dedup();
    tally.findings.sort();
    let mut counted: Vec<(String, usize)> = Vec::new();
    for f in tally.findings {
        match counted.last_mut() {
            Some((last, n)) if *last == f => *n += 1,
            _ => counted.push((f, 1)),
        }
    }
    extra_findings.extend(counted.into_iter().map(|(f, n)| {
        if f.starts_with("coverage:") {
            format!("{f}: {n}")
        } else {
            f
        }
    }));
    VerificationReport {
        property_name: name.to_string(),
        instances_checked: tally.checked,
        counterexamples: tally.failures,
        findings: extra_findings,
        elapsed: start.elapsed(),
    }
}

/// Runs `check` on every pair; `check` returns `None` to skip, `Some(Ok)` on success.
fn run_pairs<F>(name: &str, spec: &UniverseSpec, check: F) -> VerificationReport
where
    F: Fn(&Entry, &Entry) -> Option<Result<(), String>> + Sync,
{
    let start = Instant::now();
    let universe = entries(&enumerate_bundles(spec));
    let pairs = pair_indices(universe.len(), spec);
    let tally = pairs
        .par_iter()
        .fold(Tally::empty, |mut t, &(i, j)| {
            match check(&universe[i], &universe[j]) {
                None => {}
                Some(Ok(())) => t.checked += 1,
                Some(Err(msg)) => {
                    t.checked += 1;
                    t.failures.push(msg);
                }
            }
            t
        })
        .reduce(Tally::empty, Tally::merge);
    finish(name, start, tally, Vec::new())
}

/// Rank-filtration condition ⟺ slopewise dominance, over ordered pairs `(E, F)`.
pub fn verify_equivalence(spec: &UniverseSpec) -> VerificationReport {
    run_pairs("rank condition iff slopewise dominance", spec, |e, f| {
        let by_rank = rank_condition(&e.bundle, &f.bundle);
        let by_slope = slopewise_dominates(&f.bundle, &e.bundle);
        Some(if by_rank == by_slope {
            Ok(())
        } else {
            Err(format!(
                "E={} F={}: rank_condition={by_rank} dominance={by_slope}",
                e.bundle, f.bundle
            ))
        })
    })
}

/// Cross-product degree formula ≡ tensor-expansion oracle.
pub fn verify_oracles(spec: &UniverseSpec) -> VerificationReport {
    run_pairs(
        "cross-product degree formula matches tensor oracle",
        spec,
        |v, w| {
            let fast = deg_nonneg(&v.bundle, &w.bundle);
            let slow = deg_nonneg_oracle(&v.bundle, &w.bundle);
            Some(if fast == slow {
                Ok(())
            } else {
                Err(format!(
                    "V={} W={}: formula={fast} oracle={slow}",
                    v.bundle, w.bundle
                ))
            })
        },
    )
}

/// `Q` in the universe satisfying the necessary conditions for a map `E → F`
/// with image `Q`: `E^∨` dominates `Q^∨`, `F` dominates `Q`, `rk Q ≤ rk E`.
/// This is an over-approximation of the set of actual images.
pub fn enumerate_candidate_images(
    e: &HNBundle,
    f: &HNBundle,
    spec: &UniverseSpec,
) -> Vec<HNBundle> {
    let e_dual = e.dual();
    let e_rank = e.rank();
    enumerate_bundles(spec)
        .into_iter()
        .filter(|q| {
            q.rank() <= e_rank
                && slopewise_dominates(&e_dual, &q.dual())
                && slopewise_dominates(f, q)
        })
        .collect()
}

/// Admissible `(E, F)` for the triple checks: `F` dominates `E`, no common slopes.
fn admissible_pairs<'a>(universe: &'a [Entry], spec: &UniverseSpec) -> Vec<(&'a Entry, &'a Entry)> {
    pair_indices(universe.len(), spec)
        .into_iter()
        .map(|(i, j)| (&universe[i], &universe[j]))
        .filter(|(e, f)| {
            slopewise_dominates(&f.bundle, &e.bundle) && !have_common_slope(&e.bundle, &f.bundle)
        })
        .collect()
}

/// `c_{E,F}(Q) > 0` for every triple satisfying hypotheses (i)–(v).
///
/// In sampling mode the `(E, F)` pairs are sampled and every `Q` is checked.
pub fn verify_key_inequality(spec: &UniverseSpec) -> VerificationReport {
    let start = Instant::now();
    let universe = entries(&enumerate_bundles(spec));
    let pairs = admissible_pairs(&universe, spec);
    let tally = pairs
        .par_iter()
        .fold(Tally::empty, |mut t, (e, f)| {
            for q in &universe {
                if q.rank >= e.rank
                    || !slopewise_dominates(&e.dual, &q.dual)
                    || !slopewise_dominates(&f.bundle, &q.bundle)
                {
                    continue;
                }
                t.checked += 1;
                let c = c_value(&e.bundle, &f.bundle, &q.bundle);
                if !c.is_positive() {
                    t.failures.push(format!(
                        "E={} F={} Q={}: c={c}",
                        e.bundle, f.bundle, q.bundle
                    ));
                }
            }
            t
        })
        .reduce(Tally::empty, Tally::merge);
    finish("key inequality c(E,F,Q) > 0", start, tally, Vec::new())
}

/// Builds the degenerating sequence for every reduced triple and checks every
/// property of it. Coverage of the interesting branches is reported as findings.
pub fn verify_degeneration(spec: &UniverseSpec) -> VerificationReport {
    let start = Instant::now();
    let universe = entries(&enumerate_bundles(spec));
    let pairs: Vec<_> = admissible_pairs(&universe, spec)
        .into_iter()
        .filter(|(e, _)| {
            e.bundle.has_integer_slopes() && e.bundle.mu_max().is_ok_and(Rational::is_zero)
        })
        .collect();
    let tally = pairs
        .par_iter()
        .fold(Tally::empty, |mut t, (e, f)| {
            for q in &universe {
                if q.rank.clone() + 1u32 != e.rank
                    || !reduced_condition_failures(&e.bundle, &f.bundle, &q.bundle).is_empty()
                {
                    continue;
                }
                t.checked += 1;
                let label = format!("E={} F={} Q={}", e.bundle, f.bundle, q.bundle);
                match degeneration_trace(&e.bundle, &f.bundle, &q.bundle) {
                    Err(err) => t.failures.push(format!("{label}: {err}")),
                    Ok(trace) => {
                        if let Err(msg) = trace.check(&e.bundle, &f.bundle, &q.bundle) {
                            t.failures.push(format!("{label}: {msg}"));
                        }
                        let gaps = trace.dual_degeneration_gaps();
                        if !gaps.is_empty() {
                            t.findings
                                .push(format!("{label}: dual chain not degenerating at {gaps:?}"));
                        }
                        t.findings
                            .push(format!("coverage: r = {}", trace.terminated_at));
                        for step in &trace.steps[..trace.terminated_at.saturating_sub(1)] {
                            let kind = match step.common.summands().len() {
                                0 => "zero M",
                                1 => "single-segment M",
                                _ => "multi-segment M",
                            };
                            t.findings.push(format!("coverage: {kind}"));
                        }
                    }
                }
            }
            t
        })
        .reduce(Tally::empty, Tally::merge);
    finish("degenerating sequence invariants", start, tally, Vec::new())
}

/// For `(E, F)` without common slopes and `F` dominating `E`: the largest
/// stratum dimension over candidate images equals `dim Hom(E, F)`, attained at
/// `Q = E`, and every candidate of smaller rank falls strictly below it.
pub fn verify_stratification_dimension(spec: &UniverseSpec) -> VerificationReport {
    let start = Instant::now();
    let universe = entries(&enumerate_bundles(spec));
    let pairs = admissible_pairs(&universe, spec);
    let tally = pairs
        .par_iter()
        .fold(Tally::empty, |mut t, (e, f)| {
            t.checked += 1;
            let label = format!("E={} F={}", e.bundle, f.bundle);
            let hom = dim_hom(&e.bundle, &f.bundle);
            let mut best: Option<BigInt> = None;
            let mut saw_e = false;
            for q in &universe {
                if q.rank > e.rank
                    || !slopewise_dominates(&e.dual, &q.dual)
                    || !slopewise_dominates(&f.bundle, &q.bundle)
                {
                    continue;
                }
                let dim = match stratum_dim(&e.bundle, &f.bundle, &q.bundle) {
                    Ok(d) => d,
                    Err(err) => {
                        t.failures.push(format!("{label} Q={}: {err}", q.bundle));
                        continue;
                    }
                };
                if q.bundle == e.bundle {
                    saw_e = true;
                    if dim != hom {
                        t.failures.push(format!(
                            "{label}: stratum at Q=E is {dim}, dim Hom is {hom}"
                        ));
                    }
                } else if q.rank < e.rank && dim >= hom {
                    t.failures.push(format!(
                        "{label} Q={}: stratum {dim} >= dim Hom {hom}",
                        q.bundle
                    ));
                }
                if best.as_ref().is_none_or(|b| dim > *b) {
                    best = Some(dim);
                }
            }
            if !saw_e {
                t.failures
                    .push(format!("{label}: E is not among the candidate images"));
            }
            if best.as_ref() != Some(&hom) {
                t.failures.push(format!(
                    "{label}: max stratum {best:?} differs from dim Hom {hom}"
                ));
            }
            t
        })
        .reduce(Tally::empty, Tally::merge);
    finish(
        "stratification dimension attained at Q = E",
        start,
        tally,
        Vec::new(),
    )
}

/// Stretching by `C` multiplies `c` by `C` (and `deg(V^∨⊗W)^{≥0}` likewise);
/// integer twists leave both unchanged. Checked on `samples` seeded random triples.
pub fn verify_invariance_laws(spec: &UniverseSpec, samples: usize) -> VerificationReport {
    let start = Instant::now();
    let universe = enumerate_bundles(spec);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let cases: Vec<_> = (0..samples)
        .map(|_| {
            let pick = |rng: &mut ChaCha8Rng| universe[rng.gen_range(0..universe.len())].clone();
            let triple = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
            let factor = BigInt::from(rng.gen_range(2..=5u32));
            let shift = BigInt::from(rng.gen_range(-3..=3i32));
            (triple, factor, shift)
        })
        .collect();
    let tally = cases
        .par_iter()
        .fold(Tally::empty, |mut t, ((e, f, q), factor, shift)| {
            t.checked += 1;
            let label = format!("E={e} F={f} Q={q} C={factor} shift={shift}");
            let c = c_value(e, f, q);
            let stretch = |v: &HNBundle| v.vertical_stretch(factor).expect("positive factor");
            let (se, sf, sq) = (stretch(e), stretch(f), stretch(q));
            let c_stretched = c_value(&se, &sf, &sq);
            if c_stretched != &c * factor {
                t.failures.push(format!(
                    "{label}: stretched c = {c_stretched}, expected C·{c}"
                ));
            }
            if deg_nonneg(&se, &sf) != deg_nonneg(e, f) * factor {
                t.failures
                    .push(format!("{label}: stretched deg(E^v⊗F)^>=0 does not scale"));
            }
            let (te, tf, tq) = (e.twist_by(shift), f.twist_by(shift), q.twist_by(shift));
            let c_twisted = c_value(&te, &tf, &tq);
            if c_twisted != c {
                t.failures
                    .push(format!("{label}: twisted c = {c_twisted}, expected {c}"));
            }
            if deg_nonneg(&te, &tf) != deg_nonneg(e, f) {
                t.failures
                    .push(format!("{label}: twisted deg(E^v⊗F)^>=0 changed"));
            }
            t
        })
        .reduce(Tally::empty, Tally::merge);
    finish(
        "stretch scales c by C, twist preserves c",
        start,
        tally,
        Vec::new(),
    )
}

/// Text and JSON forms round-trip for every bundle of the universe.
pub fn verify_round_trip(spec: &UniverseSpec) -> VerificationReport {
    let start = Instant::now();
    let universe = enumerate_bundles(spec);
    let mut tally = Tally::empty();
    for v in &universe {
        tally.checked += 1;
        let text = v.to_string();
        match text.parse::<HNBundle>() {
            Ok(back) if &back == v => {}
            other => tally
                .failures
                .push(format!("{v:?}: text {text:?} parsed as {other:?}")),
        }
        let json = serde_json::to_string(v).expect("bundles serialize");
        match serde_json::from_str::<HNBundle>(&json) {
            Ok(back) if &back == v => {}
            other => tally
                .failures
                .push(format!("{v:?}: json {json} parsed as {other:?}")),
        }
    }
    finish("text and JSON round trip", start, tally, Vec::new())
}

/// The named checks run by `verify all`.
pub fn run_all(pairs: &UniverseSpec, triples: &UniverseSpec) -> Vec<VerificationReport> {
    vec![
        verify_equivalence(pairs),
        verify_oracles(pairs),
        verify_key_inequality(triples),
        verify_degeneration(triples),
        verify_stratification_dimension(pairs),
        verify_invariance_laws(pairs, 1000),
        verify_round_trip(pairs),
    ]
}

/// Sanity helper for callers that need the zero-count bound of a universe.
pub fn universe_size(spec: &UniverseSpec) -> usize {
    enumerate_bundles(spec).len()
}
