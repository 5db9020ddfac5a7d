//! Truncated Hahn series with exact rational coefficients.
//!
//! A [`TruncatedHahnSeries`] stores every term with exponent below its cutoff
//! exactly and says nothing about exponents at or above it. Every operation
//! computes the cutoff of its result so that the same guarantee holds for the
//! output.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::rational::{format_rational, Rational};

/// Exclusive upper bound of the trusted window, or `Infinite` for an exact series.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Cutoff {
    Finite(Exponent),
    Infinite,
}

impl Cutoff {
    pub fn finite(e: impl Into<Exponent>) -> Self {
        Cutoff::Finite(e.into())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Cutoff::Infinite)
    }

    pub fn as_finite(&self) -> Option<&Exponent> {
        match self {
            Cutoff::Finite(e) => Some(e),
            Cutoff::Infinite => None,
        }
    }

    /// Whether `e` lies strictly below the cutoff.
    pub fn admits(&self, e: &Exponent) -> bool {
        match self {
            Cutoff::Finite(t) => e < t,
            Cutoff::Infinite => true,
        }
    }

    pub fn shifted(&self, by: &Exponent) -> Cutoff {
        match self {
            Cutoff::Finite(t) => Cutoff::Finite(t + by),
            Cutoff::Infinite => Cutoff::Infinite,
        }
    }

    fn try_scaled(&self, by: &Exponent) -> Result<Cutoff> {
        Ok(match self {
            Cutoff::Finite(t) => Cutoff::Finite(t.checked_mul(by)?),
            Cutoff::Infinite => Cutoff::Infinite,
        })
    }
}

impl PartialOrd for Cutoff {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cutoff {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Cutoff::Infinite, Cutoff::Infinite) => Ordering::Equal,
            (Cutoff::Infinite, _) => Ordering::Greater,
            (_, Cutoff::Infinite) => Ordering::Less,
            (Cutoff::Finite(a), Cutoff::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Cutoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cutoff::Finite(e) => write!(f, "{e}"),
            Cutoff::Infinite => write!(f, "inf"),
        }
    }
}

/// Strictly increasing sequence of exponents.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SupportSet(Vec<Exponent>);

impl SupportSet {
    pub fn new(mut exps: Vec<Exponent>) -> Self {
        exps.sort();
        exps.dedup();
        SupportSet(exps)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Exponent> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, e: &Exponent) -> bool {
        self.0.binary_search(e).is_ok()
    }

    pub fn into_vec(self) -> Vec<Exponent> {
        self.0
    }
}

impl FromIterator<Exponent> for SupportSet {
    fn from_iter<I: IntoIterator<Item = Exponent>>(iter: I) -> Self {
        SupportSet::new(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedHahnSeries {
    terms: Vec<(Exponent, Rational)>,
    cutoff: Cutoff,
}

impl TruncatedHahnSeries {
    /// The exact zero series.
    pub fn zero() -> Self {
        TruncatedHahnSeries { terms: Vec::new(), cutoff: Cutoff::Infinite }
    }

    /// No terms below `cutoff`; nothing known above it.
    pub fn empty_below(cutoff: Cutoff) -> Self {
        TruncatedHahnSeries { terms: Vec::new(), cutoff }
    }

    /// Builds a series from arbitrary terms: like exponents are merged, zero
    /// coefficients and terms at or above the cutoff are dropped.
    pub fn new(terms: impl IntoIterator<Item = (Exponent, Rational)>, cutoff: Cutoff) -> Self {
        let mut map: BTreeMap<Exponent, Rational> = BTreeMap::new();
        for (e, c) in terms {
            if !cutoff.admits(&e) {
                continue;
            }
            *map.entry(e).or_insert_with(Rational::zero) += c;
        }
        Self::from_map(map, cutoff)
    }

    fn from_map(map: BTreeMap<Exponent, Rational>, cutoff: Cutoff) -> Self {
        let terms = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        TruncatedHahnSeries { terms, cutoff }
    }

    pub fn monomial(e: impl Into<Exponent>, c: Rational) -> Self {
        Self::new([(e.into(), c)], Cutoff::Infinite)
    }

    pub fn one() -> Self {
        Self::monomial(Exponent::zero(), Rational::one())
    }

    /// Exact polynomial from integer (exponent, coefficient) pairs.
    pub fn from_ints(pairs: &[(i64, i64)]) -> Self {
        Self::new(
            pairs.iter().map(|&(e, c)| (Exponent::from_int(e), Rational::from_integer(c.into()))),
            Cutoff::Infinite,
        )
    }

    /// Dense polynomial with ascending coefficients.
    pub fn polynomial(coeffs: &[Rational]) -> Self {
        Self::new(
            coeffs.iter().enumerate().map(|(i, c)| (Exponent::from_int(i as i64), c.clone())),
            Cutoff::Infinite,
        )
    }

    pub fn terms(&self) -> &[(Exponent, Rational)] {
        &self.terms
    }

    pub fn cutoff(&self) -> &Cutoff {
        &self.cutoff
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// No terms below the cutoff.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.cutoff.is_infinite()
    }

    /// Empty with a finite cutoff: the window saw nothing, which is not the
    /// same as knowing the series is zero.
    pub fn is_inconclusive_empty(&self) -> bool {
        self.terms.is_empty() && !self.cutoff.is_infinite()
    }

    pub fn coeff(&self, e: &Exponent) -> Rational {
        match self.terms.binary_search_by(|(x, _)| x.cmp(e)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn support(&self) -> SupportSet {
        SupportSet(self.terms.iter().map(|(e, _)| e.clone()).collect())
    }

    pub fn valuation(&self) -> Result<&Exponent> {
        self.terms.first().map(|(e, _)| e).ok_or(Error::ZeroSeries)
    }

    /// Lower bound on the valuation of the full series: the first term, or
    /// the cutoff when the window is empty.
    fn valuation_bound(&self) -> Cutoff {
        match self.terms.first() {
            Some((e, _)) => Cutoff::Finite(e.clone()),
            None => self.cutoff.clone(),
        }
    }

    pub fn with_cutoff(&self, cutoff: Cutoff) -> Self {
        let cutoff = std::cmp::min(cutoff, self.cutoff.clone());
        let terms = self.terms.iter().filter(|(e, _)| cutoff.admits(e)).cloned().collect();
        TruncatedHahnSeries { terms, cutoff }
    }

    pub fn add(&self, other: &Self) -> Self {
        let cutoff = std::cmp::min(self.cutoff.clone(), other.cutoff.clone());
        let mut map: BTreeMap<Exponent, Rational> = BTreeMap::new();
        for (e, c) in self.terms.iter().chain(other.terms.iter()) {
            if cutoff.admits(e) {
                *map.entry(e.clone()).or_insert_with(Rational::zero) += c;
            }
        }
        Self::from_map(map, cutoff)
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::empty_below(self.cutoff.clone());
        }
        TruncatedHahnSeries {
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
            cutoff: self.cutoff.clone(),
        }
    }

    /// Multiplication by `x^e`.
    pub fn shift(&self, e: &Exponent) -> Self {
        TruncatedHahnSeries {
            terms: self.terms.iter().map(|(x, c)| (x + e, c.clone())).collect(),
            cutoff: self.cutoff.shifted(e),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::zero();
        }
        let cut_a = match (&self.cutoff, other.valuation_bound()) {
            (Cutoff::Finite(t), Cutoff::Finite(v)) => Cutoff::Finite(t + &v),
            _ => Cutoff::Infinite,
        };
        let cut_b = match (&other.cutoff, self.valuation_bound()) {
            (Cutoff::Finite(t), Cutoff::Finite(v)) => Cutoff::Finite(t + &v),
            _ => Cutoff::Infinite,
        };
        let cutoff = std::cmp::min(cut_a, cut_b);
        let mut map: BTreeMap<Exponent, Rational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea + eb;
                if !cutoff.admits(&e) {
                    // Terms of `other` are increasing, so the rest are out too.
                    break;
                }
                *map.entry(e).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        Self::from_map(map, cutoff)
    }

    /// `F(x) -> F(x^r)` for `r > 0`.
    pub fn substitute(&self, r: &Exponent) -> Result<Self> {
        if !r.is_positive()? {
            return Err(Error::NonPositiveExponentScale(r.clone()));
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| Ok((e.checked_mul(r)?, c.clone())))
            .collect::<Result<Vec<_>>>()?;
        Ok(TruncatedHahnSeries { terms, cutoff: self.cutoff.try_scaled(r)? })
    }

    /// Keeps the terms whose exponent satisfies `keep`; the cutoff is unchanged.
    pub fn project<F>(&self, mut keep: F) -> Result<Self>
    where
        F: FnMut(&Exponent) -> Result<bool>,
    {
        let mut terms = Vec::new();
        for (e, c) in &self.terms {
            if keep(e)? {
                terms.push((e.clone(), c.clone()));
            }
        }
        Ok(TruncatedHahnSeries { terms, cutoff: self.cutoff.clone() })
    }

    /// Terms with exponents in `Z + gamma`.
    pub fn project_coset(&self, gamma: &Exponent) -> Result<Self> {
        self.project(|e| in_integer_coset(e, gamma))
    }

    /// Terms that agree with `other` below both cutoffs.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let cutoff = std::cmp::min(self.cutoff.clone(), other.cutoff.clone());
        self.with_cutoff(cutoff.clone()).terms == other.with_cutoff(cutoff).terms
    }

    /// The largest exponent present.
    pub fn degree(&self) -> Option<&Exponent> {
        self.terms.last().map(|(e, _)| e)
    }
}

/// Whether `e - gamma` is an integer. A difference with a nonzero `a`/`b`
/// component is never an integer when the registered scales are
/// algebraically independent; one involving the representative slot cannot
/// be settled.
pub fn in_integer_coset(e: &Exponent, gamma: &Exponent) -> Result<bool> {
    let d = e - gamma;
    if let Some(r) = d.to_rational() {
        return Ok(r.is_integer());
    }
    if d.involves_representative() {
        return Err(Error::UndecidableMembership(e.clone()));
    }
    Ok(false)
}

pub fn series_add(f: &TruncatedHahnSeries, g: &TruncatedHahnSeries) -> TruncatedHahnSeries {
    f.add(g)
}

pub fn series_mul(f: &TruncatedHahnSeries, g: &TruncatedHahnSeries) -> TruncatedHahnSeries {
    f.mul(g)
}

pub fn substitute(f: &TruncatedHahnSeries, r: &Exponent) -> Result<TruncatedHahnSeries> {
    f.substitute(r)
}

pub fn valuation(f: &TruncatedHahnSeries) -> Result<Exponent> {
    f.valuation().cloned()
}

pub fn project_coset(f: &TruncatedHahnSeries, gamma: &Exponent) -> Result<TruncatedHahnSeries> {
    f.project_coset(gamma)
}

impl fmt::Display for TruncatedHahnSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*x^({})", format_rational(c), e)?;
        }
        match &self.cutoff {
            Cutoff::Infinite => Ok(()),
            Cutoff::Finite(t) => write!(f, " + O(x^({t}))"),
        }
    }
}
