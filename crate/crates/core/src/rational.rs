//! Small helpers over arbitrary-precision rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"n"` or `"n/d"` (surrounding whitespace allowed).
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn pow(r: &Rational, e: i32) -> Rational {
    if e >= 0 {
        num_traits::pow(r.clone(), e as usize)
    } else {
        num_traits::pow(r.recip(), e.unsigned_abs() as usize)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn multiplicity(n: &BigInt, ell: &BigInt) -> i64 {
    let mut n = n.abs();
    let mut k = 0;
    while !n.is_zero() && (&n % ell).is_zero() {
        n /= ell;
        k += 1;
    }
    k
}

/// v_ell(a): multiplicity of `ell` in the numerator minus that in the denominator.
pub fn ell_adic_valuation(a: &Rational, ell: u64) -> Result<i64> {
    if a.is_zero() {
        return Err(Error::ZeroInput);
    }
    if !is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    let ell = BigInt::from(ell);
    Ok(multiplicity(a.numer(), &ell) - multiplicity(a.denom(), &ell))
}

/// Removes from `n` every prime factor it shares with `m`.
pub fn strip_common_primes(n: &BigInt, m: &BigInt) -> BigInt {
    let mut n = n.abs();
    loop {
        let g = n.gcd(m);
        if g.is_one() || g.is_zero() {
            return n;
        }
        while (&n % &g).is_zero() {
            n /= &g;
        }
    }
}

/// Prime factors of a machine-sized positive integer, ascending, without repetition.
pub fn prime_factors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut n = n;
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Prime factors of |n| for integers that fit in u64; `None` otherwise.
pub fn prime_factors_big(n: &BigInt) -> Option<Vec<u64>> {
    n.abs().to_u64().map(prime_factors)
}

pub fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    a.lcm(b)
}

/// Multiplicative order of `g` modulo `w` (requires gcd(g, w) = 1, w >= 1).
pub fn multiplicative_order(g: &BigInt, w: &BigInt) -> u64 {
    if w.is_one() {
        return 1;
    }
    let g = g.mod_floor(w);
    let mut acc = g.clone();
    let mut k = 1u64;
    while !acc.is_one() {
        acc = (&acc * &g).mod_floor(w);
        k += 1;
    }
    k
}

/// Inverse of `a` modulo `m` (gcd(a, m) = 1).
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    if m.is_one() {
        return BigInt::zero();
    }
    let e = a.mod_floor(m).extended_gcd(m);
    e.x.mod_floor(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuations() {
        assert_eq!(ell_adic_valuation(&rat(2, 3), 3).unwrap(), -1);
        assert_eq!(ell_adic_valuation(&rat(5, 3), 5).unwrap(), 1);
        assert_eq!(ell_adic_valuation(&rat(2, 3), 7).unwrap(), 0);
        assert_eq!(ell_adic_valuation(&int(0), 7), Err(Error::ZeroInput));
        assert_eq!(ell_adic_valuation(&int(4), 6), Err(Error::NotPrime(6)));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("6/4"), Some(rat(3, 2)));
        assert_eq!(parse_rational(" -7 "), Some(int(-7)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(format_rational(&rat(-3, 6)), "-1/2");
        assert_eq!(format_rational(&int(5)), "5");
    }

    #[test]
    fn orders_and_inverses() {
        assert_eq!(multiplicative_order(&BigInt::from(2), &BigInt::from(7)), 3);
        assert_eq!(multiplicative_order(&BigInt::from(2), &BigInt::from(5)), 4);
        assert_eq!(mod_inverse(&BigInt::from(3), &BigInt::from(7)), BigInt::from(5));
        assert_eq!(strip_common_primes(&BigInt::from(360), &BigInt::from(6)), BigInt::from(5));
        assert_eq!(prime_factors(360), vec![2, 3, 5]);
    }
}
