//! Rationality certificates and the obstructions that force them.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::equation::{Base, FracPoly, MahlerEquation};
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::linalg::rational_kernel;
use crate::poly::DensePoly;
use crate::rational::{ell_adic_valuation, format_rational, pow, strip_common_primes, Rational};
use crate::series::{Cutoff, SupportSet, TruncatedHahnSeries};

/// `V F - U = 0` below `theta`, with `V(0) = 1` and `gcd(U, V) = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalCertificate {
    pub numerator: FracPoly,
    pub denominator: FracPoly,
    pub theta: Cutoff,
}

fn integer_coeffs(f: &TruncatedHahnSeries) -> Result<Vec<Rational>> {
    let mut out = Vec::new();
    for (e, c) in f.terms() {
        let k = e
            .to_rational()
            .filter(|r| r.is_integer() && !r.is_negative())
            .ok_or_else(|| Error::Precondition(format!("exponent {e} is not a nonnegative integer")))?;
        let k: usize = k.to_integer().try_into().map_err(|_| Error::Precondition("exponent too large".into()))?;
        if out.len() <= k {
            out.resize(k + 1, Rational::zero());
        }
        out[k] = c.clone();
    }
    Ok(out)
}

/// Searches for `U / V` with `deg U, deg V <= deg_max` agreeing with `f`
/// below its cutoff, by the smallest `deg V` first. Needs
/// `theta > 2 deg_max + margin` so that the Hankel system is overdetermined.
pub fn certify_rational(f: &TruncatedHahnSeries, deg_max: usize, margin: usize) -> Result<Option<RationalCertificate>> {
    let dense = integer_coeffs(f)?;
    let theta = match f.cutoff() {
        Cutoff::Infinite => {
            let u = FracPoly::new(f.clone())?;
            return Ok(Some(RationalCertificate { numerator: u, denominator: FracPoly::one(), theta: Cutoff::Infinite }));
        }
        Cutoff::Finite(t) => t.to_rational().ok_or_else(|| Error::Precondition("cutoff must be rational".into()))?,
    };
    // Number of trusted coefficients.
    let n = theta.ceil().to_integer();
    let n: usize = n.try_into().unwrap_or(0);
    let rows_avail = n.saturating_sub(deg_max + 1);
    if n <= 2 * deg_max + margin {
        return Err(Error::WindowTooSmall { rows: rows_avail, unknowns: deg_max + 1, margin });
    }
    let coef = |k: isize| -> Rational {
        if k < 0 {
            Rational::zero()
        } else {
            dense.get(k as usize).cloned().unwrap_or_else(Rational::zero)
        }
    };
    for dv in 0..=deg_max {
        // Coefficients of V F at positions deg_max < t < n vanish.
        // Sparse inputs leave most rows empty.
        let rows: Vec<Vec<Rational>> = (deg_max + 1..n)
            .map(|t| (0..=dv).map(|j| coef(t as isize - j as isize)).collect::<Vec<_>>())
            .filter(|r| r.iter().any(|c| !c.is_zero()))
            .collect();
        let kernel = rational_kernel(&rows, dv + 1);
        let Some(v) = kernel.into_iter().find(|v| !v[0].is_zero()) else { continue };
        let vpoly = DensePoly::new(v);
        let fpoly = DensePoly::new((0..=deg_max).map(|k| coef(k as isize)).collect());
        let upoly = DensePoly::new(vpoly.mul(&fpoly).coeffs().iter().take(deg_max + 1).cloned().collect());
        let g = DensePoly::gcd(&upoly, &vpoly);
        let (mut u, mut vv) = if g.is_zero() { (upoly, vpoly) } else { (upoly.exact_div(&g).unwrap(), vpoly.exact_div(&g).unwrap()) };
        let v0 = vv.coeff(0);
        u = u.scale(&v0.recip());
        vv = vv.scale(&v0.recip());
        let one = BigInt::one();
        let cert = RationalCertificate {
            numerator: FracPoly::from_dense(&u, &one),
            denominator: FracPoly::from_dense(&vv, &one),
            theta: f.cutoff().clone(),
        };
        let check = cert.denominator.series().mul(f).sub(cert.numerator.series());
        if check.is_empty() {
            return Ok(Some(cert));
        }
    }
    Ok(None)
}

/// `G` with `G(x^(q^d)) = F`.
pub fn extract_inner_series(f: &TruncatedHahnSeries, q: u64, d: u32) -> Result<TruncatedHahnSeries> {
    if q < 2 || d < 1 {
        return Err(Error::Precondition("need q >= 2 and d >= 1".into()));
    }
    let k = Rational::from_integer(num_traits::pow(BigInt::from(q), d as usize));
    for (e, _) in f.terms() {
        let ok = e.to_rational().is_some_and(|r| (r / &k).is_integer());
        if !ok {
            return Err(Error::SupportNotDivisible(e.clone()));
        }
    }
    f.substitute(&Exponent::from_rational(k.recip()))
}

/// Least `(n, m) != (0, 0)` with `|n|, |m| <= bound` and
/// `n v_p(a) + m v_p(b) = 0`, ordered by `|n| + |m|`, then
/// lexicographically; pairs are taken up to sign with the first nonzero
/// entry positive.
pub fn padic_witness(a: &Rational, b: &Rational, p: u64, bound: u32) -> Result<Option<(i32, i32)>> {
    let va = ell_adic_valuation(a, p)?;
    let vb = ell_adic_valuation(b, p)?;
    let bound = bound as i32;
    for total in 1..=2 * bound {
        for n in 0..=bound.min(total) {
            let rest = total - n;
            if rest > bound {
                continue;
            }
            let ms: Vec<i32> = if rest == 0 { vec![0] } else if n == 0 { vec![rest] } else { vec![-rest, rest] };
            for m in ms {
                if n as i64 * va + m as i64 * vb == 0 {
                    return Ok(Some((n, m)));
                }
            }
        }
    }
    Ok(None)
}

/// Whether rational `e` lies in `Z[g, 1/g]`; for `g = 1` that ring is `Z`.
pub fn in_ring_of(e: &Rational, g: &Rational) -> bool {
    if g.is_one() {
        return e.is_integer();
    }
    let ab = g.numer() * g.denom();
    strip_common_primes(e.denom(), &ab).is_one()
}

/// Keeps the exponents lying in `Z[g, 1/g]` for every `g = a^n b^m` in `pairs`.
pub fn lattice_intersection_filter(s: &SupportSet, pairs: &[(i32, i32)], a: &Rational, b: &Rational) -> Result<SupportSet> {
    let rings: Vec<Rational> = pairs.iter().map(|&(n, m)| pow(a, n) * pow(b, m)).collect();
    let mut keep = Vec::new();
    for e in s.iter() {
        let r = e.to_rational().ok_or_else(|| Error::Precondition(format!("exponent {e} is not rational")))?;
        if rings.iter().all(|g| in_ring_of(&r, g)) {
            keep.push(e.clone());
        }
    }
    Ok(SupportSet::new(keep))
}

/// The value `num / den` forced on `v(F)` when two summands of an equation
/// share its minimal term: `(g^l1 - g^l2) v = c_l2 - c_l1`.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub pair: (usize, usize),
    pub num: Rational,
    pub den: Exponent,
}

impl Constraint {
    fn forces_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Equality of the forced values, decided by coefficient identity.
    fn agrees_with(&self, other: &Constraint) -> bool {
        match (self.forces_zero(), other.forces_zero()) {
            (true, true) => true,
            (false, false) => self.den.mul_rational(&other.num) == other.den.mul_rational(&self.num),
            _ => false,
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (l1, l2) = self.pair;
        write!(f, "({}) * v = {}  [indices {l1}, {l2}]", self.den, format_rational(&self.num))
    }
}

#[derive(Debug, Clone)]
pub struct ValuationObstruction {
    pub bases: (String, String),
    pub first: Vec<Constraint>,
    pub second: Vec<Constraint>,
}

#[derive(Debug, Clone)]
pub enum JointOutcome {
    /// Values of `v(F)` compatible with both equations, as agreeing
    /// constraint pairs.
    Feasible(Vec<(Constraint, Constraint)>),
    Infeasible(ValuationObstruction),
}

impl JointOutcome {
    pub fn is_infeasible(&self) -> bool {
        matches!(self, JointOutcome::Infeasible(_))
    }
}

fn constraints(eq: &MahlerEquation) -> Result<Vec<Constraint>> {
    let vals: Vec<(usize, Rational)> =
        eq.coeffs().iter().enumerate().filter_map(|(i, p)| p.valuation().map(|c| (i, c))).collect();
    if vals.len() < 2 {
        return Err(Error::DegenerateEquation("fewer than two nonzero coefficients".into()));
    }
    let mut out = Vec::new();
    for (x, (l1, c1)) in vals.iter().enumerate() {
        for (l2, c2) in &vals[x + 1..] {
            let den = &eq.base().power(*l1 as i32)? - &eq.base().power(*l2 as i32)?;
            out.push(Constraint { pair: (*l1, *l2), num: c2 - c1, den });
        }
    }
    Ok(out)
}

/// In a nonzero solution the minimal term is attained by two summands of
/// each equation, so `v(F)` satisfies one constraint of each. With
/// algebraically independent bases, a nonzero value forced by the first
/// equation never matches one forced by the second.
pub fn joint_valuation_consistency(eq_a: &MahlerEquation, eq_b: Option<&MahlerEquation>) -> Result<JointOutcome> {
    let eq_b = eq_b.ok_or(Error::MissingEquation)?;
    for eq in [eq_a, eq_b] {
        match eq.base() {
            Base::Rational(_) => return Err(Error::SymbolicOnly),
            Base::Symbolic { ctx, .. } => {
                let ctx = ctx.as_ref().ok_or(Error::MissingContext)?;
                if !ctx.independent {
                    return Err(Error::Precondition("symbolic scales must be declared algebraically independent".into()));
                }
            }
        }
        if !eq.is_homogeneous() {
            return Err(Error::NotHomogeneous);
        }
    }
    let ca = constraints(eq_a)?;
    let cb = constraints(eq_b)?;
    let mut feasible = Vec::new();
    for x in &ca {
        for y in &cb {
            if x.agrees_with(y) {
                feasible.push((x.clone(), y.clone()));
            }
        }
    }
    if feasible.is_empty() {
        Ok(JointOutcome::Infeasible(ValuationObstruction {
            bases: (eq_a.base().to_string(), eq_b.base().to_string()),
            first: ca,
            second: cb,
        }))
    } else {
        Ok(JointOutcome::Feasible(feasible))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::{Scale, ScaleContext, SymbolicScale};
    use crate::rational::{int, rat};

    fn prefix(coeffs: impl Fn(i64) -> i64, bound: i64) -> TruncatedHahnSeries {
        TruncatedHahnSeries::new((0..bound).map(|k| (Exponent::from_int(k), int(coeffs(k)))), Cutoff::finite(bound))
    }

    #[test]
    fn geometric_certificate() {
        let c = certify_rational(&prefix(|_| 1, 64), 1, 8).unwrap().unwrap();
        assert_eq!(c.numerator, FracPoly::one());
        assert_eq!(c.denominator, FracPoly::from_ints(&[(0, 1), (1, -1)]));
    }

    #[test]
    fn planted_with_common_factor() {
        // (1 + x) / (1 - x^3): coefficients 1, 1, 0 repeating.
        let f = prefix(|k| if k % 3 == 2 { 0 } else { 1 }, 60);
        let c = certify_rational(&f, 4, 8).unwrap().unwrap();
        assert_eq!(c.numerator, FracPoly::from_ints(&[(0, 1), (1, 1)]));
        assert_eq!(c.denominator, FracPoly::from_ints(&[(0, 1), (3, -1)]));
    }

    #[test]
    fn lacunary_not_rational() {
        let f = TruncatedHahnSeries::new((0..12).map(|n| (Exponent::from_int(1 << n), int(1))), Cutoff::finite(1 << 12));
        assert_eq!(certify_rational(&f, 20, 8).unwrap(), None);
        assert!(matches!(certify_rational(&prefix(|_| 1, 10), 4, 8), Err(Error::WindowTooSmall { .. })));
    }

    #[test]
    fn inner_series() {
        let f = TruncatedHahnSeries::from_ints(&[(2, 1), (4, 1)]);
        assert_eq!(extract_inner_series(&f, 2, 1).unwrap(), TruncatedHahnSeries::from_ints(&[(1, 1), (2, 1)]));
        let e = extract_inner_series(&TruncatedHahnSeries::from_ints(&[(3, 1)]), 2, 1).unwrap_err();
        assert_eq!(e, Error::SupportNotDivisible(Exponent::from_int(3)));
        let f = TruncatedHahnSeries::new((3..12).map(|n| (Exponent::from_int(1 << n), int(1))), Cutoff::finite(1 << 12));
        let g = extract_inner_series(&f, 2, 3).unwrap();
        let want = TruncatedHahnSeries::new((0..9).map(|n| (Exponent::from_int(1 << n), int(1))), Cutoff::finite(1 << 9));
        assert_eq!(g, want);
    }

    #[test]
    fn witnesses() {
        assert_eq!(padic_witness(&rat(2, 3), &rat(5, 3), 3, 2).unwrap(), Some((1, -1)));
        assert_eq!(padic_witness(&int(2), &int(3), 5, 1).unwrap(), Some((0, 1)));
        assert_eq!(padic_witness(&int(2), &int(4), 2, 2).unwrap(), Some((2, -1)));
        assert_eq!(padic_witness(&int(2), &int(3), 2, 3).unwrap(), Some((0, 1)));
        assert_eq!(padic_witness(&int(2), &int(9), 2, 1).unwrap(), Some((0, 1)));
        assert_eq!(padic_witness(&int(2), &int(8), 2, 2).unwrap(), None);
    }

    #[test]
    fn lattice_filter() {
        let s = SupportSet::new(vec![Exponent::ratio(1, 2), Exponent::from_int(1), Exponent::from_int(3)]);
        let (a, b) = (rat(2, 3), rat(5, 3));
        let out = lattice_intersection_filter(&s, &[(1, 0), (0, 1)], &a, &b).unwrap();
        assert_eq!(out.into_vec(), vec![Exponent::from_int(1), Exponent::from_int(3)]);
        let ints = SupportSet::new(vec![Exponent::from_int(2)]);
        assert_eq!(lattice_intersection_filter(&ints, &[(1, 0)], &a, &b).unwrap().into_vec(), ints.into_vec());
        let fifth = SupportSet::new(vec![Exponent::ratio(1, 5)]);
        assert!(lattice_intersection_filter(&fifth, &[(1, 0)], &a, &b).unwrap().is_empty());
    }

    fn symbolic_pair() -> std::sync::Arc<ScaleContext> {
        let a = SymbolicScale::fixed("alpha", rat(141, 100), rat(142, 100)).unwrap();
        let b = SymbolicScale::fixed("beta", rat(173, 100), rat(174, 100)).unwrap();
        ScaleContext::new(Scale::Symbolic(a.into()), Some(Scale::Symbolic(b.into()))).assert_independent().shared()
    }

    fn sym_eq(ctx: &std::sync::Arc<ScaleContext>, pow: (i32, i32), vals: &[i64]) -> MahlerEquation {
        let base = Base::Symbolic { pow, ctx: Some(ctx.clone()) };
        MahlerEquation::homogeneous(base, vals.iter().map(|&c| FracPoly::from_ints(&[(c, 1)])).collect()).unwrap()
    }

    #[test]
    fn joint_obstruction() {
        let ctx = symbolic_pair();
        let out = joint_valuation_consistency(&sym_eq(&ctx, (1, 0), &[0, 3]), Some(&sym_eq(&ctx, (0, 1), &[1, 5]))).unwrap();
        match out {
            JointOutcome::Infeasible(o) => {
                assert_eq!(o.first.len(), 1);
                assert_eq!(o.second[0].pair, (0, 1));
            }
            JointOutcome::Feasible(_) => panic!("expected an obstruction"),
        }
        let out = joint_valuation_consistency(&sym_eq(&ctx, (1, 0), &[0, 0]), Some(&sym_eq(&ctx, (0, 1), &[0, 0]))).unwrap();
        assert!(matches!(out, JointOutcome::Feasible(ref v) if v.len() == 1 && v[0].0.forces_zero()));
        let e = joint_valuation_consistency(&sym_eq(&ctx, (1, 0), &[0, 3]), None).unwrap_err();
        assert_eq!(e, Error::MissingEquation);
        let rational = MahlerEquation::homogeneous(Base::rational(2, 1).unwrap(), vec![FracPoly::one(), FracPoly::one()]).unwrap();
        assert_eq!(joint_valuation_consistency(&rational, Some(&rational)).unwrap_err(), Error::SymbolicOnly);
    }
}
