//! Equivalence classes `T(s) = a^Z s + Z[a, 1/a]` of exponents for a
//! rational base `a = p/q`, and the decomposition of a series into class
//! components.
//!
//! For `a = p/q` in lowest terms, `Z[a, 1/a] = Z[1/(pq)]`. Modulo that ring a
//! rational `N/D` reduces to `x/w`, where `w` is the prime-to-`pq` part of
//! `D` and `x` is a unit mod `w`; multiplying by `a` acts on `x` as
//! multiplication by `p q^(-1) mod w`. The canonical representative is the
//! least residue on that orbit.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::equation::{admissible_valuations, check_equation, MahlerEquation, Verdict};
use crate::error::{Error, Result};
use crate::exponent::{Exponent, Monomial, RationalScale};
use crate::rational::{lcm, mod_inverse, multiplicative_order, strip_common_primes, Rational};
use crate::series::{SupportSet, TruncatedHahnSeries};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportClass {
    pub base: RationalScale,
    pub representative: Exponent,
}

impl fmt::Display for SupportClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T({}) for base {}", self.representative, self.base)
    }
}

fn pq(base: &RationalScale) -> BigInt {
    base.p() * base.q()
}

/// Whether `r` lies in `Z[1/(pq)]`.
pub fn in_base_ring(r: &Rational, base: &RationalScale) -> bool {
    strip_common_primes(r.denom(), &pq(base)).is_one()
}

/// `r mod Z[1/(pq)]` as `(x, w)` with `0 <= x < w` and `w` prime to `pq`.
fn reduce(r: &Rational, base: &RationalScale) -> (BigInt, BigInt) {
    let d = r.denom();
    let w = strip_common_primes(d, &pq(base));
    if w.is_one() {
        return (BigInt::zero(), BigInt::one());
    }
    let d_pq = d / &w;
    let x = (r.numer() * mod_inverse(&d_pq, &w)).mod_floor(&w);
    (x, w)
}

fn canonical_rational(r: &Rational, base: &RationalScale) -> Rational {
    let (x, w) = reduce(r, base);
    if w.is_one() {
        return Rational::zero();
    }
    let g = (base.p() * mod_inverse(base.q(), &w)).mod_floor(&w);
    let order = multiplicative_order(&g, &w);
    let mut best = x.clone();
    let mut cur = x;
    for _ in 1..order {
        cur = (&cur * &g).mod_floor(&w);
        if cur < best {
            best = cur.clone();
        }
    }
    Rational::new(best, w)
}

/// Canonical member of the class of `e`. Exponents of the form `c s + r`
/// with `s` the registered representative generator are normalized so that
/// `c` lies in `[1, a)` (or `[1, 1/a)` for `a < 1`); their rational offset
/// is then reduced without further orbit freedom.
pub fn canonical_representative(e: &Exponent, base: &RationalScale) -> Result<Exponent> {
    if let Some(r) = e.to_rational() {
        return Ok(Exponent::from_rational(canonical_rational(&r, base)));
    }
    let mut c = Rational::zero();
    let mut r = Rational::zero();
    for (k, v) in e.terms() {
        match (k.m, k.n, k.s) {
            (0, 0, 0) => r = v.clone(),
            (0, 0, 1) => c = v.clone(),
            _ => return Err(Error::SymbolicBaseUnsupported),
        }
    }
    let a = base.value();
    let big = if base.above_one() { a.clone() } else { a.recip() };
    let step = if base.above_one() { 1 } else { -1 };
    let sign = if c < Rational::zero() { -Rational::one() } else { Rational::one() };
    let mut mag = &c * &sign;
    let mut m = 0i32;
    while mag < Rational::one() {
        mag *= &big;
        m += step;
    }
    while mag >= big {
        mag /= &big;
        m -= step;
    }
    let shifted = &r * base.pow(m);
    let (x, w) = reduce(&shifted, base);
    let rep = Exponent::from_terms([(Monomial::new(0, 0, 1), mag * sign), (Monomial::ONE, Rational::new(x, w))]);
    Ok(match e.context() {
        Some(ctx) => rep.with_context(ctx),
        None => rep,
    })
}

/// Whether `b = a^m x + r` for some integer `m` and `r` in `Z[a, 1/a]`.
pub fn same_class(x: &Exponent, y: &Exponent, base: &RationalScale) -> Result<bool> {
    Ok(canonical_representative(x, base)? == canonical_representative(y, base)?)
}

/// Ordering key that never needs interval refinement: rational classes
/// first, by value; the rest by their printed form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum ClassKey {
    Rational(Rational),
    Other(String),
}

fn key_of(rep: &Exponent) -> ClassKey {
    match rep.to_rational() {
        Some(r) => ClassKey::Rational(r),
        None => ClassKey::Other(rep.to_string()),
    }
}

/// Splits `f` into its class components, ordered by representative. The
/// components share `f`'s cutoff and sum to `f`.
pub fn decompose(f: &TruncatedHahnSeries, base: &RationalScale) -> Result<Vec<(SupportClass, TruncatedHahnSeries)>> {
    let mut groups: BTreeMap<ClassKey, (Exponent, Vec<(Exponent, Rational)>)> = BTreeMap::new();
    for (e, c) in f.terms() {
        let rep = canonical_representative(e, base)?;
        groups.entry(key_of(&rep)).or_insert_with(|| (rep, Vec::new())).1.push((e.clone(), c.clone()));
    }
    Ok(groups
        .into_values()
        .map(|(rep, terms)| {
            let class = SupportClass { base: base.clone(), representative: rep };
            (class, TruncatedHahnSeries::new(terms, f.cutoff().clone()))
        })
        .collect())
}

/// Checks every class component of `f` against `eq`. Meaningful when the
/// coefficient exponents lie in `Z[a, 1/a]`, so that multiplying by a
/// coefficient never leaves a class.
pub fn class_component_preserves_equation(f: &TruncatedHahnSeries, eq: &MahlerEquation) -> Result<Vec<(SupportClass, Verdict)>> {
    let base = eq.base().as_rational().ok_or(Error::SymbolicBaseUnsupported)?;
    for p in eq.coeffs().iter().chain(std::iter::once(eq.rhs())) {
        if let Some((e, _)) = p.rational_terms().find(|(e, _)| !in_base_ring(e, base)) {
            return Err(Error::Precondition(format!("coefficient exponent {e} is outside Z[1/(pq)]")));
        }
    }
    decompose(f, base)?
        .into_iter()
        .map(|(class, part)| Ok((class, check_equation(&part, eq)?)))
        .collect()
}

/// Candidate minimal exponents, one per possible class of a solution.
pub fn class_count_bound(eq: &MahlerEquation) -> Result<SupportSet> {
    admissible_valuations(eq)
}

/// Least `l` such that `F(x^l)` has all exponents in `Z[a, 1/a]`, with that
/// series.
pub fn rescale_to_lattice(f: &TruncatedHahnSeries, base: &RationalScale) -> Result<(BigInt, TruncatedHahnSeries)> {
    let mut l = BigInt::one();
    for (e, _) in f.terms() {
        let r = e.to_rational().ok_or_else(|| Error::IrrationalClassPresent(e.clone()))?;
        l = lcm(&l, &strip_common_primes(r.denom(), &pq(base)));
    }
    let g = f.substitute(&Exponent::from_rational(Rational::from_integer(l.clone())))?;
    Ok((l, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::{Scale, ScaleContext, SymbolicScale};
    use crate::rational::{int, rat};
    use crate::series::Cutoff;

    fn two() -> RationalScale {
        RationalScale::new(2, 1).unwrap()
    }

    fn q(n: i64, d: i64) -> Exponent {
        Exponent::ratio(n, d)
    }

    #[test]
    fn class_relation_examples() {
        assert!(same_class(&q(1, 5), &q(2, 5), &two()).unwrap());
        assert!(!same_class(&q(1, 5), &q(1, 7), &two()).unwrap());
        assert!(same_class(&q(3, 1), &q(1, 2), &two()).unwrap());
        assert_eq!(canonical_representative(&q(3, 5), &two()).unwrap(), q(1, 5));
        // 3/7 is not on the orbit {1, 2, 4} of 1/7 under doubling.
        assert_eq!(canonical_representative(&q(6, 7), &two()).unwrap(), q(3, 7));
    }

    #[test]
    fn decomposition_examples() {
        let f = TruncatedHahnSeries::new([(q(1, 5), int(1)), (q(2, 5), int(1)), (q(1, 7), int(1))], Cutoff::Infinite);
        let parts = decompose(&f, &two()).unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].0.representative, q(1, 7));
        assert_eq!(parts[1].0.representative, q(1, 5));
        assert_eq!(parts[1].1.len(), 2);
        let sum = parts.iter().fold(TruncatedHahnSeries::zero(), |acc, (_, p)| acc.add(p));
        assert_eq!(sum, f);

        let ints = TruncatedHahnSeries::from_ints(&[(0, 1), (3, 2)]);
        let parts = decompose(&ints, &two()).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].0.representative, Exponent::zero());
        assert!(decompose(&TruncatedHahnSeries::zero(), &two()).unwrap().is_empty());
    }

    #[test]
    fn rescaling() {
        let f = TruncatedHahnSeries::new([(q(1, 5), int(1)), (q(2, 5), int(1))], Cutoff::Infinite);
        let (l, g) = rescale_to_lattice(&f, &two()).unwrap();
        assert_eq!(l, BigInt::from(5));
        assert_eq!(g, TruncatedHahnSeries::from_ints(&[(1, 1), (2, 1)]));
        let (l, _) = rescale_to_lattice(&TruncatedHahnSeries::from_ints(&[(4, 1)]), &two()).unwrap();
        assert_eq!(l, BigInt::one());
        let b = RationalScale::new(2, 3).unwrap();
        let (l, g) = rescale_to_lattice(&TruncatedHahnSeries::monomial(q(1, 6), int(1)), &b).unwrap();
        assert_eq!(l, BigInt::one());
        assert!(in_base_ring(&g.valuation().unwrap().to_rational().unwrap(), &b));
    }

    #[test]
    fn irrational_classes() {
        let ctx = ScaleContext::new(Scale::rational(2, 1).unwrap(), None)
            .with_representative(SymbolicScale::fixed("s", rat(7, 5), rat(3, 2)).unwrap())
            .shared();
        let s = Exponent::monomial(0, 0, 1, int(1)).with_context(&ctx);
        let e1 = &s + &Exponent::ratio(1, 3);
        // 2 s + 2/3 + 5/4 is in the same class.
        let e2 = &(&s.mul_rational(&int(2)) + &Exponent::ratio(2, 3)) + &Exponent::ratio(5, 4);
        assert!(same_class(&e1, &e2, &two()).unwrap());
        assert!(!same_class(&e1, &s, &two()).unwrap());
        let f = TruncatedHahnSeries::new([(e1.clone(), int(1))], Cutoff::Infinite);
        assert_eq!(rescale_to_lattice(&f, &two()).unwrap_err(), Error::IrrationalClassPresent(e1));
    }

    #[test]
    fn count_bound_matches_valuations() {
        use crate::equation::{Base, FracPoly};
        let eq = MahlerEquation::homogeneous(Base::rational(2, 1).unwrap(), vec![FracPoly::from_ints(&[(2, 1)]), FracPoly::from_ints(&[(5, 1)])]).unwrap();
        assert_eq!(class_count_bound(&eq).unwrap().into_vec(), vec![Exponent::from_int(-3)]);
    }
}
