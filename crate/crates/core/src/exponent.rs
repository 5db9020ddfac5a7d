//! Exponents: the additive group generated by the rationals and formal
//! monomials `a^m b^n s^e` over registered scales.
//!
//! An exponent whose only monomial is `(0, 0, 0)` is a plain rational and all
//! of its comparisons are exact. Symbolic monomials are ordered by evaluating
//! interval enclosures of the registered scales, refining until the enclosure
//! of the difference excludes zero or the refinement cap is reached.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, format_rational, Rational};

/// Refinement cap used when a context does not override it.
pub const DEFAULT_REFINEMENT_CAP: u32 = 64;

/// A closed interval with exact rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(r: Rational) -> Self {
        Interval { lo: r.clone(), hi: r }
    }

    pub fn contains(&self, r: &Rational) -> bool {
        &self.lo <= r && r <= &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let c = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval::new(lo, hi)
    }

    pub fn scale(&self, c: &Rational) -> Interval {
        let a = &self.lo * c;
        let b = &self.hi * c;
        if a <= b {
            Interval::new(a, b)
        } else {
            Interval::new(b, a)
        }
    }

    /// Integer power of a strictly positive interval.
    pub fn pow_positive(&self, e: i32) -> Interval {
        debug_assert!(self.lo.is_positive());
        if e >= 0 {
            Interval::new(rational::pow(&self.lo, e), rational::pow(&self.hi, e))
        } else {
            Interval::new(rational::pow(&self.hi, e), rational::pow(&self.lo, e))
        }
    }

    fn intersect(&self, other: &Interval) -> Interval {
        let lo = std::cmp::max(&self.lo, &other.lo).clone();
        let hi = std::cmp::min(&self.hi, &other.hi).clone();
        if lo <= hi {
            Interval::new(lo, hi)
        } else {
            self.clone()
        }
    }
}

/// A rational Mahler base p/q in lowest terms, p/q > 0, p/q != 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalScale {
    p: BigInt,
    q: BigInt,
}

impl RationalScale {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self> {
        let (p, q) = (p.into(), q.into());
        if !p.is_positive() || !q.is_positive() {
            return Err(Error::InvalidScale(format!("{p}/{q} is not positive")));
        }
        let g = p.gcd(&q);
        let (p, q) = (p / &g, q / &g);
        if p == q {
            return Err(Error::UnitScale);
        }
        Ok(RationalScale { p, q })
    }

    pub fn from_rational(r: &Rational) -> Result<Self> {
        Self::new(r.numer().clone(), r.denom().clone())
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn value(&self) -> Rational {
        Rational::new(self.p.clone(), self.q.clone())
    }

    pub fn pow(&self, e: i32) -> Rational {
        rational::pow(&self.value(), e)
    }

    pub fn is_integer(&self) -> bool {
        self.q.is_one()
    }

    pub fn above_one(&self) -> bool {
        self.p > self.q
    }

    pub fn inverse(&self) -> RationalScale {
        RationalScale {
            p: self.q.clone(),
            q: self.p.clone(),
        }
    }
}

impl fmt::Display for RationalScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_one() {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}/{}", self.p, self.q)
        }
    }
}

type Refiner = dyn Fn(u32) -> (Rational, Rational) + Send + Sync;

/// A named positive real known through nested rational enclosures.
///
/// The refiner maps a precision level `k` to an enclosure; it must be a pure
/// function of `k`. Enclosures are always intersected with the initial one so
/// every refinement stays inside its predecessor.
#[derive(Clone)]
pub struct SymbolicScale {
    name: String,
    initial: Interval,
    refiner: Arc<Refiner>,
    excluded: Vec<Rational>,
}

impl fmt::Debug for SymbolicScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymbolicScale")
            .field("name", &self.name)
            .field("initial", &self.initial)
            .finish()
    }
}

impl SymbolicScale {
    pub fn with_refiner<F>(name: impl Into<String>, lo: Rational, hi: Rational, refiner: F) -> Result<Self>
    where
        F: Fn(u32) -> (Rational, Rational) + Send + Sync + 'static,
    {
        let name = name.into();
        if !(lo.is_positive() && lo < hi) {
            return Err(Error::InvalidScale(format!(
                "{name}: enclosure [{}, {}] must satisfy 0 < lo < hi",
                format_rational(&lo),
                format_rational(&hi)
            )));
        }
        Ok(SymbolicScale {
            name,
            initial: Interval::new(lo, hi),
            refiner: Arc::new(refiner),
            excluded: Vec::new(),
        })
    }

    /// An enclosure that never narrows.
    pub fn fixed(name: impl Into<String>, lo: Rational, hi: Rational) -> Result<Self> {
        let (l, h) = (lo.clone(), hi.clone());
        Self::with_refiner(name, lo, hi, move |_| (l.clone(), h.clone()))
    }

    /// The unique root of `poly` (ascending coefficients) in `[lo, hi]`,
    /// refined by bisection: level `k` halves the enclosure `k` times.
    pub fn root_of(name: impl Into<String>, poly: Vec<Rational>, lo: Rational, hi: Rational) -> Result<Self> {
        let eval = move |x: &Rational| -> Rational {
            poly.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
        };
        let (flo, fhi) = (eval(&lo), eval(&hi));
        if flo.is_zero() || fhi.is_zero() || flo.signum() == fhi.signum() {
            return Err(Error::InvalidScale("polynomial must change sign strictly inside the enclosure".into()));
        }
        let lo_sign = flo.signum();
        let (l0, h0) = (lo.clone(), hi.clone());
        Self::with_refiner(name, lo, hi, move |k| {
            let (mut l, mut h) = (l0.clone(), h0.clone());
            for _ in 0..k {
                let mid = (&l + &h) / Rational::from_integer(2.into());
                let fm = eval(&mid);
                if fm.is_zero() {
                    return (mid.clone(), mid);
                }
                if fm.signum() == lo_sign {
                    l = mid;
                } else {
                    h = mid;
                }
            }
            (l, h)
        })
    }

    /// Records that the scale is not equal to `r`. Fails if the initial
    /// enclosure already contains `r`.
    pub fn declare_unequal(mut self, r: Rational) -> Result<Self> {
        if self.initial.contains(&r) {
            return Err(Error::InvalidScale(format!(
                "{}: enclosure contains excluded value {}",
                self.name,
                format_rational(&r)
            )));
        }
        self.excluded.push(r);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn initial(&self) -> &Interval {
        &self.initial
    }

    pub fn interval(&self, level: u32) -> Interval {
        let (lo, hi) = (self.refiner)(level);
        if lo > hi {
            return self.initial.clone();
        }
        self.initial.intersect(&Interval::new(lo, hi))
    }
}

#[derive(Debug, Clone)]
pub enum Scale {
    Rational(RationalScale),
    Symbolic(Arc<SymbolicScale>),
}

impl Scale {
    pub fn rational(p: i64, q: i64) -> Result<Scale> {
        Ok(Scale::Rational(RationalScale::new(p, q)?))
    }

    pub fn as_rational(&self) -> Option<&RationalScale> {
        match self {
            Scale::Rational(r) => Some(r),
            Scale::Symbolic(_) => None,
        }
    }

    fn interval(&self, level: u32) -> Interval {
        match self {
            Scale::Rational(r) => Interval::point(r.value()),
            Scale::Symbolic(s) => s.interval(level),
        }
    }

    fn label(&self) -> String {
        match self {
            Scale::Rational(r) => r.to_string(),
            Scale::Symbolic(s) => s.name.clone(),
        }
    }
}

/// The scales an exponent's formal monomials refer to: `a` (slot m),
/// `b` (slot n) and an optional class representative `s`.
#[derive(Debug, Clone)]
pub struct ScaleContext {
    pub alpha: Scale,
    pub beta: Option<Scale>,
    pub representative: Option<Arc<SymbolicScale>>,
    pub refinement_cap: u32,
    /// The user asserted that the symbolic scales are algebraically independent.
    pub independent: bool,
}

impl ScaleContext {
    pub fn new(alpha: Scale, beta: Option<Scale>) -> Self {
        ScaleContext {
            alpha,
            beta,
            representative: None,
            refinement_cap: DEFAULT_REFINEMENT_CAP,
            independent: false,
        }
    }

    pub fn with_representative(mut self, s: SymbolicScale) -> Self {
        self.representative = Some(Arc::new(s));
        self
    }

    pub fn with_cap(mut self, cap: u32) -> Self {
        self.refinement_cap = cap;
        self
    }

    pub fn assert_independent(mut self) -> Self {
        self.independent = true;
        self
    }

    pub fn shared(self) -> Arc<Self> {
        Arc::new(self)
    }

    fn same(&self, other: &ScaleContext) -> bool {
        self.alpha.label() == other.alpha.label()
            && self.beta.as_ref().map(Scale::label) == other.beta.as_ref().map(Scale::label)
            && self.representative.as_ref().map(|s| s.name.clone())
                == other.representative.as_ref().map(|s| s.name.clone())
    }

    fn monomial_interval(&self, mono: Monomial, level: u32) -> Result<Interval> {
        let mut acc = Interval::point(Rational::one());
        if mono.m != 0 {
            acc = acc.mul(&self.alpha.interval(level).pow_positive(mono.m));
        }
        if mono.n != 0 {
            let beta = self.beta.as_ref().ok_or(Error::MissingContext)?;
            acc = acc.mul(&beta.interval(level).pow_positive(mono.n));
        }
        if mono.s != 0 {
            let s = self.representative.as_ref().ok_or(Error::MissingContext)?;
            acc = acc.mul(&s.interval(level));
        }
        Ok(acc)
    }
}

/// Index of a formal monomial `a^m b^n s^e` with `e` in {0, 1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub m: i32,
    pub n: i32,
    pub s: u8,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { m: 0, n: 0, s: 0 };

    pub fn new(m: i32, n: i32, s: u8) -> Self {
        Monomial { m, n, s }
    }
}

/// A finite formal sum of rational multiples of monomials, kept canonical:
/// no zero coefficients, monomials sorted by (m, n, s).
#[derive(Clone, Default)]
pub struct Exponent {
    terms: BTreeMap<Monomial, Rational>,
    ctx: Option<Arc<ScaleContext>>,
}

impl Exponent {
    pub fn zero() -> Self {
        Exponent::default()
    }

    pub fn from_rational(r: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(Monomial::ONE, r);
        }
        Exponent { terms, ctx: None }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rational::int(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::from_rational(rational::rat(n, d))
    }

    /// `coeff * a^m b^n s^e`.
    pub fn monomial(m: i32, n: i32, s: u8, coeff: Rational) -> Self {
        Self::from_terms([(Monomial::new(m, n, s), coeff)])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut map: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (k, c) in terms {
            *map.entry(k).or_insert_with(Rational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        Exponent { terms: map, ctx: None }
    }

    pub fn with_context(mut self, ctx: &Arc<ScaleContext>) -> Self {
        self.ctx = Some(ctx.clone());
        self
    }

    pub fn context(&self) -> Option<&Arc<ScaleContext>> {
        self.ctx.as_ref()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|k| *k == Monomial::ONE)
    }

    /// The collapsed rational value, when there are no formal monomials.
    pub fn to_rational(&self) -> Option<Rational> {
        if self.is_rational() {
            Some(self.rational_part())
        } else {
            None
        }
    }

    pub fn rational_part(&self) -> Rational {
        self.terms.get(&Monomial::ONE).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_integer(&self) -> bool {
        self.to_rational().map(|r| r.is_integer()).unwrap_or(false)
    }

    pub fn involves_representative(&self) -> bool {
        self.terms.keys().any(|k| k.s != 0)
    }

    fn merged_ctx(&self, other: &Exponent) -> Option<Arc<ScaleContext>> {
        match (&self.ctx, &other.ctx) {
            (Some(a), Some(b)) => {
                if !Arc::ptr_eq(a, b) && !a.same(b) {
                    panic!("{}", Error::ContextMismatch);
                }
                Some(a.clone())
            }
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (None, None) => None,
        }
    }

    pub fn mul_rational(&self, c: &Rational) -> Exponent {
        if c.is_zero() {
            return Exponent { terms: BTreeMap::new(), ctx: self.ctx.clone() };
        }
        Exponent {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
            ctx: self.ctx.clone(),
        }
    }

    /// Formal product. Fails if the representative slot would be squared.
    pub fn checked_mul(&self, other: &Exponent) -> Result<Exponent> {
        if let (Some(a), Some(b)) = (self.to_rational(), other.to_rational()) {
            return Ok(Exponent { ctx: self.merged_ctx(other), ..Exponent::from_rational(a * b) });
        }
        let mut map: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                if ka.s + kb.s > 1 {
                    return Err(Error::UnrepresentableProduct(format!("({self}) * ({other})")));
                }
                let k = Monomial::new(ka.m + kb.m, ka.n + kb.n, ka.s + kb.s);
                *map.entry(k).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        map.retain(|_, c| !c.is_zero());
        Ok(Exponent { terms: map, ctx: self.merged_ctx(other) })
    }

    /// Multiplication by `a^m b^n`. Rational scales collapse into the
    /// coefficients; symbolic scales shift the monomial indices.
    pub fn scale_pow(&self, m: i32, n: i32, ctx: &Arc<ScaleContext>) -> Exponent {
        let mut factor = Rational::one();
        let (mut dm, mut dn) = (0, 0);
        match &ctx.alpha {
            Scale::Rational(r) => factor *= r.pow(m),
            Scale::Symbolic(_) => dm = m,
        }
        if n != 0 {
            match ctx.beta.as_ref().expect("scale context has no second scale") {
                Scale::Rational(r) => factor *= r.pow(n),
                Scale::Symbolic(_) => dn = n,
            }
        }
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| (Monomial::new(k.m + dm, k.n + dn, k.s), c * &factor))
            .collect();
        if let Some(own) = &self.ctx {
            if !Arc::ptr_eq(own, ctx) && !own.same(ctx) {
                panic!("{}", Error::ContextMismatch);
            }
        }
        Exponent { terms, ctx: Some(ctx.clone()) }
    }

    /// Interval enclosure at refinement level `level`.
    pub fn enclosure(&self, level: u32) -> Result<Interval> {
        let mut acc = Interval::point(Rational::zero());
        for (k, c) in &self.terms {
            let part = if *k == Monomial::ONE {
                Interval::point(c.clone())
            } else {
                let ctx = self.ctx.as_ref().ok_or(Error::MissingContext)?;
                ctx.monomial_interval(*k, level)?.scale(c)
            };
            acc = acc.add(&part);
        }
        Ok(acc)
    }

    /// Sign of the represented real: exact for rationals, otherwise by refinement.
    pub fn try_signum(&self) -> Result<Ordering> {
        if let Some(r) = self.to_rational() {
            return Ok(r.cmp(&Rational::zero()));
        }
        let ctx = self.ctx.as_ref().ok_or(Error::MissingContext)?;
        let cap = ctx.refinement_cap;
        for level in 0..=cap {
            let iv = self.enclosure(level)?;
            if iv.lo.is_positive() {
                return Ok(Ordering::Greater);
            }
            if iv.hi.is_negative() {
                return Ok(Ordering::Less);
            }
        }
        Err(Error::RefinementExhausted { cap })
    }

    pub fn try_cmp(&self, other: &Exponent) -> Result<Ordering> {
        if let (Some(a), Some(b)) = (self.terms_as_rational(), other.terms_as_rational()) {
            return Ok(a.cmp(b));
        }
        (self - other).try_signum()
    }

    fn terms_as_rational(&self) -> Option<&Rational> {
        static ZERO: std::sync::OnceLock<Rational> = std::sync::OnceLock::new();
        match self.terms.len() {
            0 => Some(ZERO.get_or_init(Rational::zero)),
            1 => self.terms.get(&Monomial::ONE),
            _ => None,
        }
    }

    pub fn is_positive(&self) -> Result<bool> {
        Ok(self.try_signum()? == Ordering::Greater)
    }
}

/// Canonical-form sum of two exponents.
pub fn exp_add(a: &Exponent, b: &Exponent) -> Exponent {
    a + b
}

/// Multiplies `a` by `a^m b^n` of the context's scales.
pub fn exp_scale_mul(a: &Exponent, m: i32, n: i32, ctx: &Arc<ScaleContext>) -> Exponent {
    a.scale_pow(m, n, ctx)
}

pub fn exp_compare(a: &Exponent, b: &Exponent) -> Result<Ordering> {
    a.try_cmp(b)
}

pub use crate::rational::ell_adic_valuation;

impl PartialEq for Exponent {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for Exponent {}

impl Hash for Exponent {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order by real value. Panics if a symbolic comparison cannot be
/// separated; use [`Exponent::try_cmp`] to handle that case.
impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.try_cmp(other).unwrap_or_else(|e| panic!("exponent comparison failed: {e}"))
    }
}

impl From<Rational> for Exponent {
    fn from(r: Rational) -> Self {
        Exponent::from_rational(r)
    }
}

impl From<i64> for Exponent {
    fn from(n: i64) -> Self {
        Exponent::from_int(n)
    }
}

impl<'a> Add<&'a Exponent> for &'a Exponent {
    type Output = Exponent;
    fn add(self, rhs: &'a Exponent) -> Exponent {
        let mut terms = self.terms.clone();
        for (k, c) in &rhs.terms {
            let e = terms.entry(*k).or_insert_with(Rational::zero);
            *e += c;
            if e.is_zero() {
                terms.remove(k);
            }
        }
        Exponent { terms, ctx: self.merged_ctx(rhs) }
    }
}

impl Add for Exponent {
    type Output = Exponent;
    fn add(self, rhs: Exponent) -> Exponent {
        &self + &rhs
    }
}

impl<'a> Sub<&'a Exponent> for &'a Exponent {
    type Output = Exponent;
    fn sub(self, rhs: &'a Exponent) -> Exponent {
        self + &(-rhs)
    }
}

impl Sub for Exponent {
    type Output = Exponent;
    fn sub(self, rhs: Exponent) -> Exponent {
        &self - &rhs
    }
}

impl Neg for &Exponent {
    type Output = Exponent;
    fn neg(self) -> Exponent {
        Exponent {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
            ctx: self.ctx.clone(),
        }
    }
}

impl Neg for Exponent {
    type Output = Exponent;
    fn neg(self) -> Exponent {
        -&self
    }
}

impl Mul<&Rational> for &Exponent {
    type Output = Exponent;
    fn mul(self, rhs: &Rational) -> Exponent {
        self.mul_rational(rhs)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", format_rational(c))?;
            if k.m != 0 {
                write!(f, "*a^{}", k.m)?;
            }
            if k.n != 0 {
                write!(f, "*b^{}", k.n)?;
            }
            if k.s != 0 {
                write!(f, "*s")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Exponent({self})")
    }
}
