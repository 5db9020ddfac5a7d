//! Mahler functional equations `sum_i P_i(x) F(x^(g^i)) = A(x)` and the
//! reductions between them.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exponent::{Exponent, RationalScale, ScaleContext};
use crate::linalg::primitive_vector;
use crate::poly::DensePoly;
use crate::rational::{format_rational, Rational};
use crate::series::{Cutoff, SupportSet, TruncatedHahnSeries};

/// An exact polynomial in fractional powers of `x`: finitely many terms,
/// all exponents nonnegative rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FracPoly {
    series: TruncatedHahnSeries,
}

impl FracPoly {
    pub fn new(series: TruncatedHahnSeries) -> Result<Self> {
        if !series.cutoff().is_infinite() {
            return Err(Error::MalformedEquation("coefficient has a finite cutoff".into()));
        }
        for (e, _) in series.terms() {
            match e.to_rational() {
                Some(r) if !r.is_negative() => {}
                _ => return Err(Error::NotFracPoly(e.clone())),
            }
        }
        Ok(FracPoly { series })
    }

    pub fn zero() -> Self {
        FracPoly { series: TruncatedHahnSeries::zero() }
    }

    pub fn one() -> Self {
        FracPoly { series: TruncatedHahnSeries::one() }
    }

    /// `c * x^e`; panics on a negative exponent.
    pub fn monomial(e: Rational, c: Rational) -> Self {
        Self::new(TruncatedHahnSeries::monomial(e, c)).expect("nonnegative exponent")
    }

    /// From integer `(exponent, coefficient)` pairs; panics on negative exponents.
    pub fn from_ints(pairs: &[(i64, i64)]) -> Self {
        Self::new(TruncatedHahnSeries::from_ints(pairs)).expect("nonnegative exponents")
    }

    /// Rational `(exponent, coefficient)` pairs.
    pub fn from_terms(terms: impl IntoIterator<Item = (Rational, Rational)>) -> Result<Self> {
        Self::new(TruncatedHahnSeries::new(
            terms.into_iter().map(|(e, c)| (Exponent::from_rational(e), c)),
            Cutoff::Infinite,
        ))
    }

    pub fn series(&self) -> &TruncatedHahnSeries {
        &self.series
    }

    pub fn into_series(self) -> TruncatedHahnSeries {
        self.series
    }

    /// Terms as `(exponent, coefficient)` with rational exponents.
    pub fn rational_terms(&self) -> impl Iterator<Item = (Rational, &Rational)> {
        self.series.terms().iter().map(|(e, c)| (e.to_rational().expect("rational exponent"), c))
    }

    pub fn is_zero(&self) -> bool {
        self.series.is_empty()
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    /// Least exponent, `None` for zero.
    pub fn valuation(&self) -> Option<Rational> {
        self.series.terms().first().and_then(|(e, _)| e.to_rational())
    }

    pub fn lowest_coeff(&self) -> Option<&Rational> {
        self.series.terms().first().map(|(_, c)| c)
    }

    /// Least `l >= 1` with every exponent in `(1/l) Z`.
    pub fn denominator(&self) -> BigInt {
        self.rational_terms().fold(BigInt::one(), |l, (e, _)| crate::rational::lcm(&l, e.denom()))
    }

    pub fn add(&self, o: &Self) -> Self {
        FracPoly { series: self.series.add(&o.series) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        FracPoly { series: self.series.sub(&o.series) }
    }

    pub fn neg(&self) -> Self {
        FracPoly { series: self.series.neg() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        FracPoly { series: self.series.mul(&o.series) }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        FracPoly { series: self.series.scale(c) }
    }

    /// `P(x) -> P(x^r)` for rational `r > 0`.
    pub fn substitute(&self, r: &Rational) -> Self {
        assert!(r.is_positive(), "substitution exponent must be positive");
        let series = self.series.substitute(&Exponent::from_rational(r.clone())).expect("rational substitution");
        FracPoly { series }
    }

    /// Division by `x^k`; every exponent must stay nonnegative.
    pub fn shift_down(&self, k: &Rational) -> Result<Self> {
        Self::new(self.series.shift(&Exponent::from_rational(-k)))
    }

    /// Evaluation as a dense polynomial in `y = x^(1/l)`.
    pub fn to_dense(&self, l: &BigInt) -> Option<DensePoly> {
        DensePoly::from_series(&self.series, l)
    }

    pub fn from_dense(p: &DensePoly, l: &BigInt) -> Self {
        FracPoly { series: p.to_series(l) }
    }
}

impl fmt::Display for FracPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .rational_terms()
            .map(|(e, c)| {
                if e.is_zero() {
                    format_rational(c)
                } else {
                    format!("{}*x^{}", format_rational(c), format_rational(&e))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// The base of a Mahler equation: an exact rational, or `a^n b^m` for the
/// scales registered in a context.
#[derive(Debug, Clone)]
pub enum Base {
    Rational(RationalScale),
    Symbolic { pow: (i32, i32), ctx: Option<Arc<ScaleContext>> },
}

impl Base {
    pub fn rational(p: i64, q: i64) -> Result<Base> {
        Ok(Base::Rational(RationalScale::new(p, q)?))
    }

    pub fn as_rational(&self) -> Option<&RationalScale> {
        match self {
            Base::Rational(r) => Some(r),
            Base::Symbolic { .. } => None,
        }
    }

    pub fn context(&self) -> Option<&Arc<ScaleContext>> {
        match self {
            Base::Rational(_) => None,
            Base::Symbolic { ctx, .. } => ctx.as_ref(),
        }
    }

    pub fn with_context(self, c: Arc<ScaleContext>) -> Base {
        match self {
            Base::Symbolic { pow, .. } => Base::Symbolic { pow, ctx: Some(c) },
            b => b,
        }
    }

    /// The exponent `base^i`.
    pub fn power(&self, i: i32) -> Result<Exponent> {
        match self {
            Base::Rational(r) => Ok(Exponent::from_rational(r.pow(i))),
            Base::Symbolic { pow, ctx } => {
                let ctx = ctx.as_ref().ok_or(Error::MissingContext)?;
                Ok(Exponent::from_int(1).scale_pow(pow.0 * i, pow.1 * i, ctx))
            }
        }
    }

    fn same(&self, other: &Base) -> bool {
        match (self, other) {
            (Base::Rational(a), Base::Rational(b)) => a == b,
            (Base::Symbolic { pow: a, .. }, Base::Symbolic { pow: b, .. }) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Base::Rational(r) => write!(f, "{r}"),
            Base::Symbolic { pow: (n, m), .. } => write!(f, "a^{n}*b^{m}"),
        }
    }
}

/// `sum_{i=0..d} P_i(x) F(x^(base^i)) = rhs(x)` with `d >= 1`, `P_d != 0`.
#[derive(Debug, Clone)]
pub struct MahlerEquation {
    base: Base,
    coeffs: Vec<FracPoly>,
    rhs: FracPoly,
}

impl PartialEq for MahlerEquation {
    fn eq(&self, other: &Self) -> bool {
        self.base.same(&other.base) && self.coeffs == other.coeffs && self.rhs == other.rhs
    }
}

impl MahlerEquation {
    pub fn new(base: Base, coeffs: Vec<FracPoly>, rhs: FracPoly) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::MalformedEquation("degree must be at least 1".into()));
        }
        if coeffs.last().is_none_or(FracPoly::is_zero) {
            return Err(Error::MalformedEquation("top coefficient is zero".into()));
        }
        Ok(MahlerEquation { base, coeffs, rhs })
    }

    pub fn homogeneous(base: Base, coeffs: Vec<FracPoly>) -> Result<Self> {
        Self::new(base, coeffs, FracPoly::zero())
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    pub fn coeffs(&self) -> &[FracPoly] {
        &self.coeffs
    }

    pub fn rhs(&self) -> &FracPoly {
        &self.rhs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_homogeneous(&self) -> bool {
        self.rhs.is_zero()
    }

    pub fn with_base(mut self, base: Base) -> Self {
        self.base = base;
        self
    }

    /// Least common denominator of all exponents in the coefficients and rhs.
    pub fn denominator(&self) -> BigInt {
        self.coeffs
            .iter()
            .chain(std::iter::once(&self.rhs))
            .fold(BigInt::one(), |l, p| crate::rational::lcm(&l, &p.denominator()))
    }

    /// Scaling-invariant form of a homogeneous equation: the coefficients are
    /// divided by their common polynomial factor (in `x^(1/l)`), made coprime
    /// integers, and signed so that `P_d` has a positive lowest coefficient.
    pub fn canonical(&self) -> Result<MahlerEquation> {
        if !self.is_homogeneous() {
            return Err(Error::NotHomogeneous);
        }
        let l = self.denominator();
        let dense: Vec<DensePoly> = self.coeffs.iter().map(|p| p.to_dense(&l).expect("fractional polynomial")).collect();
        let mut prim = primitive_vector(&dense);
        let top = prim.last().and_then(|p| p.low_index().map(|k| p.coeff(k))).expect("nonzero top");
        if top.is_negative() {
            prim = prim.iter().map(DensePoly::neg).collect();
        }
        let coeffs = prim.iter().map(|p| FracPoly::from_dense(p, &l)).collect();
        MahlerEquation::homogeneous(self.base.clone(), coeffs)
    }
}

impl fmt::Display for MahlerEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, p) in self.coeffs.iter().enumerate().rev() {
            if !p.is_zero() {
                parts.push(format!("({p})*F(x^({}^{i}))", self.base));
            }
        }
        write!(f, "{} = {}", parts.join(" + "), self.rhs)
    }
}

/// Outcome of checking a truncated series against an equation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// The residual vanishes below this cutoff.
    Verified(Cutoff),
    /// Least exponent with a nonzero residual.
    Refuted { at: Exponent, coeff: Rational },
    /// The trusted window contains no terms at all.
    Inconclusive(String),
}

impl Verdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verdict::Verified(_))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Verified(c) => write!(f, "Verified below {c}"),
            Verdict::Refuted { at, coeff } => write!(f, "Refuted at x^{at} (residual {})", format_rational(coeff)),
            Verdict::Inconclusive(r) => write!(f, "Inconclusive: {r}"),
        }
    }
}

/// The series `sum_i P_i(x) F(x^(base^i)) - rhs`, with its cutoff.
pub fn residual(f: &TruncatedHahnSeries, eq: &MahlerEquation) -> Result<(TruncatedHahnSeries, Vec<TruncatedHahnSeries>)> {
    let mut summands = Vec::new();
    for (i, p) in eq.coeffs.iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        let g = eq.base.power(i as i32)?;
        summands.push(p.series().mul(&f.substitute(&g)?));
    }
    let mut total = eq.rhs.series().neg();
    for s in &summands {
        total = total.add(s);
    }
    Ok((total, summands))
}

pub fn check_equation(f: &TruncatedHahnSeries, eq: &MahlerEquation) -> Result<Verdict> {
    let (res, summands) = residual(f, eq)?;
    Ok(judge(&res, &summands, eq.rhs.series()))
}

/// Verdict for a residual built from `summands` and a right-hand side.
pub(crate) fn judge(res: &TruncatedHahnSeries, summands: &[TruncatedHahnSeries], rhs: &TruncatedHahnSeries) -> Verdict {
    if let Some((at, coeff)) = res.terms().first() {
        return Verdict::Refuted { at: at.clone(), coeff: coeff.clone() };
    }
    let cutoff = res.cutoff().clone();
    if cutoff.is_infinite() {
        return Verdict::Verified(cutoff);
    }
    let sees_something = summands
        .iter()
        .chain(std::iter::once(rhs))
        .any(|s| s.terms().first().is_some_and(|(e, _)| cutoff.admits(e)));
    if sees_something {
        Verdict::Verified(cutoff)
    } else {
        Verdict::Inconclusive(format!("no term of any summand lies below {cutoff}"))
    }
}

/// An equation derived from another, with the substitution carrying
/// solutions across: if `F` solves the input, `G(x) = F(x^witness)` solves
/// the output.
#[derive(Debug, Clone)]
pub struct Transformed {
    pub equation: MahlerEquation,
    pub witness: Exponent,
}

fn require_rational(base: &Base) -> Result<&RationalScale> {
    base.as_rational().ok_or(Error::SymbolicBaseUnsupported)
}

fn rat_of(b: &BigInt) -> Rational {
    Rational::from_integer(b.clone())
}

/// Removes the largest monomial `x^k` dividing every coefficient.
fn clear_monomial(coeffs: Vec<FracPoly>) -> Vec<FracPoly> {
    let k = coeffs.iter().filter_map(FracPoly::valuation).min();
    match k {
        Some(k) if k.is_positive() => coeffs.iter().map(|p| p.shift_down(&k).expect("k is minimal")).collect(),
        _ => coeffs,
    }
}

/// Turns `sum P_i F(x^(a^i)) = A` with rational `a = p/q` into a homogeneous
/// equation of degree `d + 1` for `G(x) = F(x^q)`.
pub fn homogenize(eq: &MahlerEquation) -> Result<Transformed> {
    if eq.is_homogeneous() {
        return Err(Error::AlreadyHomogeneous);
    }
    let a = require_rational(&eq.base)?;
    let (p, q) = (rat_of(a.p()), rat_of(a.q()));
    // G solves sum P_i(x^q) G(x^(a^i)) = A(x^q) and, after x -> x^(aq) = x^p,
    // sum P_i(x^p) G(x^(a^(i+1))) = A(x^p). Cross-multiply by the other
    // right-hand side and subtract.
    let a_q = eq.rhs.substitute(&q);
    let a_p = eq.rhs.substitute(&p);
    let d = eq.degree();
    let mut coeffs = Vec::with_capacity(d + 2);
    for j in 0..=d + 1 {
        let mut r = FracPoly::zero();
        if j >= 1 {
            r = r.add(&a_q.mul(&eq.coeffs[j - 1].substitute(&p)));
        }
        if j <= d {
            r = r.sub(&a_p.mul(&eq.coeffs[j].substitute(&q)));
        }
        coeffs.push(r);
    }
    let coeffs = clear_monomial(coeffs);
    let top = coeffs[d + 1].lowest_coeff().expect("top coefficient is nonzero").recip();
    let coeffs = coeffs.iter().map(|c| c.scale(&top)).collect();
    Ok(Transformed {
        equation: MahlerEquation::homogeneous(eq.base.clone(), coeffs)?,
        witness: Exponent::from_rational(q),
    })
}

/// Drops vanishing leading coefficients `P_0 = ... = P_(i-1) = 0`, returning
/// the equation for `G(x) = F(x^(base^i))` and the shift `i`.
pub fn normalize_leading(eq: &MahlerEquation) -> Result<(Transformed, usize)> {
    let i = eq.coeffs.iter().position(|p| !p.is_zero()).expect("top coefficient is nonzero");
    if eq.coeffs.iter().filter(|p| !p.is_zero()).count() < 2 {
        return Err(Error::DegenerateEquation("a single nonzero coefficient forces F = 0".into()));
    }
    let equation = MahlerEquation::new(eq.base.clone(), eq.coeffs[i..].to_vec(), eq.rhs.clone())?;
    Ok((Transformed { equation, witness: eq.base.power(i as i32)? }, i))
}

/// Rewrites an equation with base `p/q < 1` as one with base `q/p` for
/// `G(x) = F(x^(p^d))`.
pub fn invert_base(eq: &MahlerEquation) -> Result<Transformed> {
    let a = require_rational(&eq.base)?;
    if a.above_one() {
        return Err(Error::BaseAlreadyAboveOne);
    }
    let d = eq.degree() as u32;
    let qd = rat_of(&num_traits::pow(a.q().clone(), d as usize));
    let pd = rat_of(&num_traits::pow(a.p().clone(), d as usize));
    let coeffs = eq.coeffs.iter().rev().map(|p| p.substitute(&qd)).collect();
    let equation = MahlerEquation::new(Base::Rational(a.inverse()), coeffs, eq.rhs.substitute(&qd))?;
    Ok(Transformed { equation, witness: Exponent::from_rational(pd) })
}

/// Applies `x -> x^r` to every coefficient and the right-hand side.
pub fn shift_equation(eq: &MahlerEquation, r: &Exponent) -> Result<Transformed> {
    let rr = r.to_rational().ok_or_else(|| Error::NotFracPoly(r.clone()))?;
    if !rr.is_positive() {
        return Err(Error::NonPositiveExponentScale(r.clone()));
    }
    let equation = MahlerEquation::new(
        eq.base.clone(),
        eq.coeffs.iter().map(|p| p.substitute(&rr)).collect(),
        eq.rhs.substitute(&rr),
    )?;
    Ok(Transformed { equation, witness: r.clone() })
}

/// Candidate valuations of a nonzero solution: the minimal terms of two
/// summands must cancel, so `c_i + g^i v = c_j + g^j v` for some pair.
pub fn admissible_valuations(eq: &MahlerEquation) -> Result<SupportSet> {
    if !eq.is_homogeneous() {
        return Err(Error::NotHomogeneous);
    }
    let vals: Vec<(usize, Rational)> =
        eq.coeffs.iter().enumerate().filter_map(|(i, p)| p.valuation().map(|c| (i, c))).collect();
    if vals.len() < 2 {
        return Err(Error::DegenerateEquation("fewer than two nonzero coefficients".into()));
    }
    let mut out = Vec::new();
    for (x, (i, ci)) in vals.iter().enumerate() {
        for (j, cj) in &vals[x + 1..] {
            match &eq.base {
                Base::Rational(a) => {
                    let den = a.pow(*j as i32) - a.pow(*i as i32);
                    out.push(Exponent::from_rational((ci - cj) / den));
                }
                // g^j - g^i is a difference of distinct monomials; dividing a
                // nonzero rational by it leaves the represented group.
                Base::Symbolic { .. } => {
                    if ci == cj {
                        out.push(Exponent::zero());
                    }
                }
            }
        }
    }
    Ok(SupportSet::new(out))
}
