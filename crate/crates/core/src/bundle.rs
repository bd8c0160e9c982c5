//! Isomorphism classes of vector bundles, stored as their Harder-Narasimhan
//! decomposition `O(λ₁)^{m₁} ⊕ … ⊕ O(λ_l)^{m_l}` with `λ₁ > … > λ_l`.
//!
//! A bundle is determined by its HN polygon, so [`HNBundle`] is the only
//! representation the crate needs. Every operation returns a fresh value.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// One block `O(slope)^{⊕mult}` of an HN decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Summand {
    pub slope: Rational,
    pub mult: u64,
}

impl Summand {
    pub fn new(slope: Rational, mult: u64) -> Self {
        Summand { slope, mult }
    }

    /// Width of the HN segment: `mult · denominator(slope)`.
    pub fn rank(&self) -> BigInt {
        self.slope.denom() * self.mult
    }

    pub fn degree(&self) -> BigInt {
        self.slope.numer() * self.mult
    }

    pub fn segment(&self) -> SegmentVector {
        SegmentVector {
            rank: self.rank(),
            degree: self.degree(),
        }
    }
}

/// The vector `(rank, degree)` spanned by one HN segment.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SegmentVector {
    pub rank: BigInt,
    pub degree: BigInt,
}

impl SegmentVector {
    /// Two-dimensional cross product `self × other`.
    pub fn cross(&self, other: &SegmentVector) -> BigInt {
        &self.rank * &other.degree - &self.degree * &other.rank
    }
}

/// A breakpoint of an HN polygon: cumulative rank and degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PolygonVertex {
    #[serde(serialize_with = "crate::serde_int::serialize")]
    pub x: BigInt,
    #[serde(serialize_with = "crate::serde_int::serialize")]
    pub y: BigInt,
}

impl PolygonVertex {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>) -> Self {
        PolygonVertex {
            x: x.into(),
            y: y.into(),
        }
    }
}

/// Which part of the slope filtration [`HNBundle::filter`] keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SlopeFilter {
    AtLeast,
    Above,
    AtMost,
    Below,
}

impl SlopeFilter {
    fn keeps(self, slope: &Rational, mu: &Rational) -> bool {
        match self {
            SlopeFilter::AtLeast => slope >= mu,
            SlopeFilter::Above => slope > mu,
            SlopeFilter::AtMost => slope <= mu,
            SlopeFilter::Below => slope < mu,
        }
    }
}

/// Canonical HN decomposition. Slopes strictly descending, multiplicities
/// positive; the empty list is the zero bundle.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "RawBundle")]
pub struct HNBundle {
    summands: Vec<Summand>,
}

#[derive(Deserialize)]
struct RawBundle {
    summands: Vec<Summand>,
}

impl From<RawBundle> for HNBundle {
    fn from(raw: RawBundle) -> Self {
        HNBundle::canonicalize(raw.summands.into_iter().map(|s| (s.slope, s.mult)))
    }
}

impl HNBundle {
    pub fn zero() -> Self {
        HNBundle::default()
    }

    /// The stable bundle `O(λ)`: rank `denominator(λ)`, degree `numerator(λ)`.
    pub fn stable(slope: Rational) -> Self {
        HNBundle {
            summands: vec![Summand::new(slope, 1)],
        }
    }

    /// `O(λ)^{⊕mult}`.
    pub fn semistable(slope: Rational, mult: u64) -> Self {
        HNBundle::canonicalize([(slope, mult)])
    }

    /// The trivial line bundle `O = O(0)`.
    pub fn trivial() -> Self {
        HNBundle::stable(Rational::zero())
    }

    /// Sorts by descending slope, merges repeated slopes and drops zero multiplicities.
    pub fn canonicalize(raw: impl IntoIterator<Item = (Rational, u64)>) -> Self {
        let mut items: Vec<(Rational, u64)> = raw.into_iter().filter(|(_, m)| *m > 0).collect();
        items.sort_by(|a, b| b.0.cmp(&a.0));
        let mut summands: Vec<Summand> = Vec::with_capacity(items.len());
        for (slope, mult) in items {
            match summands.last_mut() {
                Some(last) if last.slope == slope => {
                    last.mult = last.mult.checked_add(mult).expect("multiplicity overflow");
                }
                _ => summands.push(Summand::new(slope, mult)),
            }
        }
        HNBundle { summands }
    }

    /// Wraps summands that are already canonical.
    fn from_canonical(summands: Vec<Summand>) -> Self {
        debug_assert!(summands.iter().all(|s| s.mult > 0));
        debug_assert!(summands.windows(2).all(|w| w[0].slope > w[1].slope));
        HNBundle { summands }
    }

    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    pub fn is_zero(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn slopes(&self) -> impl Iterator<Item = &Rational> + '_ {
        self.summands.iter().map(|s| &s.slope)
    }

    pub fn multiplicity(&self, slope: &Rational) -> u64 {
        self.summands
            .iter()
            .find(|s| &s.slope == slope)
            .map_or(0, |s| s.mult)
    }

    pub fn has_integer_slopes(&self) -> bool {
        self.slopes().all(Rational::is_integer)
    }

    pub fn rank(&self) -> BigInt {
        self.summands.iter().map(Summand::rank).sum()
    }

    pub fn degree(&self) -> BigInt {
        self.summands.iter().map(Summand::degree).sum()
    }

    pub fn slope(&self) -> Result<Rational> {
        if self.is_zero() {
            return Err(Error::UndefinedInput("slope of the zero bundle".into()));
        }
        Rational::new(self.degree(), self.rank())
    }

    pub fn mu_max(&self) -> Result<&Rational> {
        self.summands
            .first()
            .map(|s| &s.slope)
            .ok_or_else(|| Error::UndefinedInput("mu_max of the zero bundle".into()))
    }

    pub fn mu_min(&self) -> Result<&Rational> {
        self.summands
            .last()
            .map(|s| &s.slope)
            .ok_or_else(|| Error::UndefinedInput("mu_min of the zero bundle".into()))
    }

    pub fn is_semistable(&self) -> bool {
        self.summands.len() <= 1
    }

    /// `O(λ)^∨ = O(-λ)` on every summand.
    pub fn dual(&self) -> HNBundle {
        let summands = self
            .summands
            .iter()
            .rev()
            .map(|s| Summand::new(-&s.slope, s.mult))
            .collect();
        HNBundle::from_canonical(summands)
    }

    pub fn direct_sum(&self, other: &HNBundle) -> HNBundle {
        // Both inputs are sorted: merge.
        let mut out = Vec::with_capacity(self.summands.len() + other.summands.len());
        let (mut a, mut b) = (
            self.summands.iter().peekable(),
            other.summands.iter().peekable(),
        );
        loop {
            let next = match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => a.next().cloned(),
                (None, Some(_)) => b.next().cloned(),
                (Some(x), Some(y)) => match x.slope.cmp(&y.slope) {
                    Ordering::Greater => a.next().cloned(),
                    Ordering::Less => b.next().cloned(),
                    Ordering::Equal => {
                        let mult = x.mult.checked_add(y.mult).expect("multiplicity overflow");
                        let slope = x.slope.clone();
                        a.next();
                        b.next();
                        Some(Summand::new(slope, mult))
                    }
                },
            };
            out.extend(next);
        }
        HNBundle::from_canonical(out)
    }

    /// Removes `other` as a direct summand; `None` unless every block of
    /// `other` occurs in `self` with at least the same multiplicity.
    pub fn checked_remove(&self, other: &HNBundle) -> Option<HNBundle> {
        let mut out = self.summands.clone();
        for s in &other.summands {
            let pos = out.iter().position(|t| t.slope == s.slope)?;
            out[pos].mult = out[pos].mult.checked_sub(s.mult)?;
        }
        out.retain(|s| s.mult > 0);
        Some(HNBundle::from_canonical(out))
    }

    /// The slope filtration piece `V^{≥μ}`, `V^{>μ}`, `V^{≤μ}` or `V^{<μ}`.
    pub fn filter(&self, mu: &Rational, mode: SlopeFilter) -> HNBundle {
        let summands = self
            .summands
            .iter()
            .filter(|s| mode.keeps(&s.slope, mu))
            .cloned()
            .collect();
        HNBundle::from_canonical(summands)
    }

    /// `V ⊗ O(λ)` for an integer `λ`.
    pub fn twist(&self, lambda: &Rational) -> Result<HNBundle> {
        let shift = lambda.to_integer().ok_or_else(|| {
            Error::Unsupported(format!("twist by the non-integer slope {lambda}"))
        })?;
        Ok(self.twist_by(&shift))
    }

    /// `V ⊗ O(n)`.
    pub fn twist_by(&self, shift: &BigInt) -> HNBundle {
        let shift = Rational::from_integer(shift.clone());
        let summands = self
            .summands
            .iter()
            .map(|s| Summand::new(&s.slope + &shift, s.mult))
            .collect();
        HNBundle::from_canonical(summands)
    }

    /// The bundle whose HN polygon is `HN(V)` with every y-coordinate scaled by `factor`.
    ///
    /// A segment of slope `r/s` and width `m·s` becomes a segment of slope
    /// `factor·r/s` with the same width. The new reduced denominator divides `s`,
    /// so the width is always representable.
    pub fn vertical_stretch(&self, factor: &BigInt) -> Result<HNBundle> {
        if !factor.is_positive() {
            return Err(Error::Precondition(format!(
                "stretch factor must be positive, got {factor}"
            )));
        }
        let factor_q = Rational::from_integer(factor.clone());
        let mut summands = Vec::with_capacity(self.summands.len());
        for s in &self.summands {
            let slope = &s.slope * &factor_q;
            let width = s.rank();
            debug_assert!((&width % slope.denom()).is_zero());
            let mult = (width / slope.denom()).to_u64().ok_or_else(|| {
                Error::Unsupported("stretched multiplicity exceeds 64 bits".into())
            })?;
            summands.push(Summand::new(slope, mult));
        }
        // Scaling by a positive factor preserves the slope order.
        Ok(HNBundle::from_canonical(summands))
    }

    /// `V ⊗ W`, using that `O(λ) ⊗ O(κ)` is semistable of slope `λ + κ` and
    /// rank `rk O(λ) · rk O(κ)`.
    ///
    /// # Panics
    /// If a resulting multiplicity does not fit in 64 bits.
    pub fn tensor(&self, other: &HNBundle) -> HNBundle {
        let mut raw = Vec::with_capacity(self.summands.len() * other.summands.len());
        for a in &self.summands {
            for b in &other.summands {
                let slope = &a.slope + &b.slope;
                let rank = a.rank() * b.rank();
                debug_assert!((&rank % slope.denom()).is_zero());
                let mult = (rank / slope.denom())
                    .to_u64()
                    .expect("tensor multiplicity exceeds 64 bits");
                raw.push((slope, mult));
            }
        }
        HNBundle::canonicalize(raw)
    }

    /// Vertices of the HN polygon, starting at the origin.
    pub fn polygon(&self) -> Vec<PolygonVertex> {
        let mut out = Vec::with_capacity(self.summands.len() + 1);
        let (mut x, mut y) = (BigInt::zero(), BigInt::zero());
        out.push(PolygonVertex::new(x.clone(), y.clone()));
        for s in &self.summands {
            x += s.rank();
            y += s.degree();
            out.push(PolygonVertex::new(x.clone(), y.clone()));
        }
        out
    }

    /// Recovers a bundle from its HN polygon: each segment `(dx, dy)` is
    /// `O(dy/dx)^{⊕ dx/s}` where `s` is the reduced denominator of `dy/dx`.
    pub fn from_polygon(vertices: &[PolygonVertex]) -> Result<HNBundle> {
        let first = vertices
            .first()
            .ok_or_else(|| Error::Precondition("polygon has no vertices".into()))?;
        if !first.x.is_zero() || !first.y.is_zero() {
            return Err(Error::Precondition(
                "polygon must start at the origin".into(),
            ));
        }
        let mut summands: Vec<Summand> = Vec::with_capacity(vertices.len() - 1);
        for w in vertices.windows(2) {
            let dx = &w[1].x - &w[0].x;
            let dy = &w[1].y - &w[0].y;
            if !dx.is_positive() {
                return Err(Error::Precondition(
                    "polygon x-coordinates must increase".into(),
                ));
            }
            let slope = Rational::new(dy, dx.clone())?;
            if summands.last().is_some_and(|last| last.slope <= slope) {
                return Err(Error::Precondition(
                    "polygon slopes must strictly decrease".into(),
                ));
            }
            let mult = (dx / slope.denom())
                .to_u64()
                .ok_or_else(|| Error::Unsupported("multiplicity exceeds 64 bits".into()))?;
            summands.push(Summand::new(slope, mult));
        }
        Ok(HNBundle::from_canonical(summands))
    }

    /// The value of the HN polygon at `x ∈ [0, rank]`.
    pub fn polygon_value(&self, x: &Rational) -> Result<Rational> {
        let rank = Rational::from_integer(self.rank());
        if x.is_negative() || *x > rank {
            return Err(Error::Precondition(format!(
                "polygon argument {x} outside [0, {rank}]"
            )));
        }
        let mut start = Rational::zero();
        let mut value = Rational::zero();
        for s in &self.summands {
            let end = &start + &Rational::from_integer(s.rank());
            if *x <= end {
                return Ok(&value + &(&(x - &start) * &s.slope));
            }
            value = &value + &Rational::from_integer(s.degree());
            start = end;
        }
        // Only reachable for x = rank = 0.
        Ok(value)
    }

    /// The slope of the HN polygon on `[i-1, i]`, for `1 ≤ i ≤ rank`.
    ///
    /// Segments have integral width and start at integral abscissae, so this
    /// is the slope of the segment containing the unit interval.
    pub fn unit_slope(&self, i: &BigInt) -> Result<&Rational> {
        if *i < BigInt::one() {
            return Err(Error::Precondition(format!(
                "unit index {i} must be at least 1"
            )));
        }
        let mut end = BigInt::zero();
        for s in &self.summands {
            end += s.rank();
            if *i <= end {
                return Ok(&s.slope);
            }
        }
        Err(Error::Precondition(format!(
            "unit index {i} exceeds rank {end}"
        )))
    }

    /// `(cumulative end abscissa, slope)` for each segment.
    pub fn breakpoints(&self) -> Vec<(BigInt, &Rational)> {
        let mut end = BigInt::zero();
        self.summands
            .iter()
            .map(|s| {
                end += s.rank();
                (end.clone(), &s.slope)
            })
            .collect()
    }
}

impl fmt::Display for HNBundle {
    /// Canonical text form: descending slopes, `:mult` only when greater than one.
    /// The zero bundle prints as `0`; the trivial line bundle as `0:1`, since a bare
    /// `0` denotes the zero bundle.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        if let [only] = self.summands.as_slice() {
            if only.slope.is_zero() && only.mult == 1 {
                return f.write_str("0:1");
            }
        }
        for (k, s) in self.summands.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", s.slope)?;
            if s.mult > 1 {
                write!(f, ":{}", s.mult)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for HNBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HNBundle({self})")
    }
}

impl FromStr for HNBundle {
    type Err = Error;

    /// `bundle := summand ("," summand)* | "0"`, `summand := slope (":" mult)?`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "0" {
            return Ok(HNBundle::zero());
        }
        if s.is_empty() {
            return Err(Error::Parse(
                "empty bundle; write 0 for the zero bundle".into(),
            ));
        }
        let mut raw = Vec::new();
        for token in s.split(',') {
            let (slope, mult) = match token.split_once(':') {
                Some((slope, mult)) => {
                    if mult.is_empty() || !mult.bytes().all(|b| b.is_ascii_digit()) {
                        return Err(Error::Parse(format!("bad multiplicity in {token:?}")));
                    }
                    let mult = mult
                        .parse::<u64>()
                        .map_err(|e| Error::Parse(format!("multiplicity {mult:?}: {e}")))?;
                    (slope, mult)
                }
                None => (token, 1),
            };
            raw.push((slope.parse::<Rational>()?, mult));
        }
        Ok(HNBundle::canonicalize(raw))
    }
}
