//! Equations in a combined base `a^n b^m` from an `a`-equation and a
//! `b`-equation satisfied by the same series, and equation guessing from a
//! coefficient prefix.
//!
//! Every generator `F(x^(a^i b^j))` is rewritten over the window
//! `0 <= i < d1, 0 <= j < d2` by repeatedly solving one of the two input
//! equations (substituted by a suitable `x -> x^r`) for its top or bottom
//! term. Coefficients live in `Q(y)` with `y = x^(1/L)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::equation::{check_equation, judge, Base, FracPoly, MahlerEquation, Verdict};
use crate::error::{Error, Result};
use crate::exponent::{Exponent, RationalScale};
use crate::linalg::{poly_kernel, primitive_vector, rational_kernel};
use crate::poly::{DensePoly, RatFunc};
use crate::rational::{lcm, Rational};
use crate::series::TruncatedHahnSeries;

pub type Index = (i32, i32);

/// Which input equation to apply first when a generator lies outside the
/// window in both directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClosureOrder {
    #[default]
    BetaFirst,
    AlphaFirst,
}

/// `den * F(x^(a^i b^j)) = sum_w num[w] * F(x^(window_w))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub den: FracPoly,
    pub num: Vec<FracPoly>,
}

#[derive(Debug, Clone)]
pub struct SpanBasis {
    pub alpha: RationalScale,
    pub beta: RationalScale,
    pub dims: (usize, usize),
    /// Common denominator of every exponent in the rules.
    pub l: BigInt,
    pub rules: BTreeMap<Index, Rule>,
}

/// One solved instance of an input equation: `F(target) = -sum c_k F(k) / div`.
struct Step {
    div: FracPoly,
    terms: Vec<(Index, FracPoly)>,
    label: String,
}

struct Engine<'a> {
    alpha: &'a RationalScale,
    beta: &'a RationalScale,
    a: &'a [FracPoly],
    b: &'a [FracPoly],
    order: ClosureOrder,
}

impl Engine<'_> {
    fn d1(&self) -> i32 {
        self.a.len() as i32 - 1
    }

    fn d2(&self) -> i32 {
        self.b.len() as i32 - 1
    }

    fn in_window(&self, (i, j): Index) -> bool {
        (0..self.d1()).contains(&i) && (0..self.d2()).contains(&j)
    }

    fn window(&self) -> Vec<Index> {
        (0..self.d1()).flat_map(|i| (0..self.d2()).map(move |j| (i, j))).collect()
    }

    fn window_pos(&self, (i, j): Index) -> usize {
        (i * self.d2() + j) as usize
    }

    fn rho(&self, (i, j): Index) -> Rational {
        self.alpha.pow(i) * self.beta.pow(j)
    }

    fn step(&self, (i, j): Index) -> Step {
        let (d1, d2) = (self.d1(), self.d2());
        let i_out = !(0..d1).contains(&i);
        let j_out = !(0..d2).contains(&j);
        let along_alpha = i_out && (self.order == ClosureOrder::AlphaFirst || !j_out);
        let (coeffs, d, pos) = if along_alpha { (self.a, d1, i) } else { (self.b, d2, j) };
        let at = |k: i32| if along_alpha { (k, j) } else { (i, k) };
        // Base point of the substituted equation and the coefficient solved for.
        let (start, solved) = if pos >= d { (pos - d, d) } else { (pos, 0) };
        let r = self.rho(at(start));
        let terms = (0..=d)
            .filter(|&k| k != solved)
            .map(|k| (at(start + k), coeffs[k as usize].substitute(&r)))
            .filter(|(_, p)| !p.is_zero())
            .collect();
        let name = if along_alpha { "A" } else { "B" };
        Step { div: coeffs[solved as usize].substitute(&r), terms, label: format!("{name}_{solved} at index ({i},{j})") }
    }

    /// Every generator reached while rewriting `targets`, with the common
    /// exponent denominator of the coefficients involved.
    fn plan(&self, targets: &[Index]) -> (BTreeSet<Index>, BigInt) {
        let mut seen = BTreeSet::new();
        let mut l = BigInt::one();
        let mut stack: Vec<Index> = targets.to_vec();
        while let Some(idx) = stack.pop() {
            if self.in_window(idx) || !seen.insert(idx) {
                continue;
            }
            let st = self.step(idx);
            l = lcm(&l, &st.div.denominator());
            for (k, p) in st.terms {
                l = lcm(&l, &p.denominator());
                stack.push(k);
            }
        }
        (seen, l)
    }

    fn rep(&self, idx: Index, l: &BigInt, memo: &mut HashMap<Index, Vec<RatFunc>>) -> Result<Vec<RatFunc>> {
        let n = self.window().len();
        if self.in_window(idx) {
            let mut v = vec![RatFunc::from_poly(DensePoly::zero()); n];
            v[self.window_pos(idx)] = RatFunc::from_poly(DensePoly::one());
            return Ok(v);
        }
        if let Some(v) = memo.get(&idx) {
            return Ok(v.clone());
        }
        let st = self.step(idx);
        let div = st.div.to_dense(l).expect("denominator covers all exponents");
        if div.is_zero() {
            return Err(Error::CoefficientVanishes(st.label));
        }
        let div = RatFunc::from_poly(div);
        let mut acc = vec![RatFunc::from_poly(DensePoly::zero()); n];
        for (k, p) in &st.terms {
            let c = RatFunc::from_poly(p.to_dense(l).expect("denominator covers all exponents")).div(&div).neg();
            let sub = self.rep(*k, l, memo)?;
            for (a, s) in acc.iter_mut().zip(sub.iter()) {
                if !s.is_zero() {
                    *a = a.add(&c.mul(s));
                }
            }
        }
        memo.insert(idx, acc.clone());
        Ok(acc)
    }
}

fn check_inputs(eq_a: &MahlerEquation, eq_b: &MahlerEquation) -> Result<(RationalScale, RationalScale)> {
    let alpha = eq_a.base().as_rational().ok_or(Error::SymbolicBaseUnsupported)?.clone();
    let beta = eq_b.base().as_rational().ok_or(Error::SymbolicBaseUnsupported)?.clone();
    for (name, eq) in [("first", eq_a), ("second", eq_b)] {
        if !eq.is_homogeneous() {
            return Err(Error::NotHomogeneous);
        }
        if eq.coeffs()[0].is_zero() {
            return Err(Error::Precondition(format!("{name} equation has P_0 = 0; normalize first")));
        }
    }
    Ok((alpha, beta))
}

fn to_rule(v: &[RatFunc], l: &BigInt) -> Rule {
    let mut den = DensePoly::one();
    for x in v.iter().filter(|x| !x.is_zero()) {
        let g = DensePoly::gcd(&den, &x.den);
        den = den.mul(&x.den).exact_div(&g).expect("gcd divides");
    }
    let num = v
        .iter()
        .map(|x| if x.is_zero() { FracPoly::zero() } else { FracPoly::from_dense(&x.num.mul(&den.exact_div(&x.den).unwrap()), l) })
        .collect();
    Rule { den: FracPoly::from_dense(&den, l), num }
}

/// Rewrite rules for every generator with `|i|, |j| <= d1 d2 N` outside the
/// window.
pub fn build_span(eq_a: &MahlerEquation, eq_b: &MahlerEquation, n: u32, order: ClosureOrder) -> Result<SpanBasis> {
    let (alpha, beta) = check_inputs(eq_a, eq_b)?;
    let eng = Engine { alpha: &alpha, beta: &beta, a: eq_a.coeffs(), b: eq_b.coeffs(), order };
    let m = (eng.d1() * eng.d2()) * n as i32;
    let targets: Vec<Index> = (-m..=m).flat_map(|i| (-m..=m).map(move |j| (i, j))).filter(|&x| !eng.in_window(x)).collect();
    let (_, l) = eng.plan(&targets);
    let mut memo = HashMap::new();
    let mut rules = BTreeMap::new();
    for t in targets {
        let v = eng.rep(t, &l, &mut memo)?;
        rules.insert(t, to_rule(&v, &l));
    }
    Ok(SpanBasis { dims: (eng.d1() as usize, eng.d2() as usize), alpha, beta, l, rules })
}

impl SpanBasis {
    pub fn window(&self) -> Vec<Index> {
        let (d1, d2) = (self.dims.0 as i32, self.dims.1 as i32);
        (0..d1).flat_map(|i| (0..d2).map(move |j| (i, j))).collect()
    }

    pub fn rho(&self, (i, j): Index) -> Rational {
        self.alpha.pow(i) * self.beta.pow(j)
    }

    /// Expands the rule for `idx` on a truncated series.
    pub fn check_rule(&self, idx: Index, f: &TruncatedHahnSeries) -> Result<Verdict> {
        let rule = self.rules.get(&idx).ok_or_else(|| Error::Precondition(format!("no rule for index {idx:?}")))?;
        let sub = |at: Index| f.substitute(&Exponent::from_rational(self.rho(at)));
        let mut summands = vec![rule.den.series().mul(&sub(idx)?).neg()];
        for (w, p) in self.window().into_iter().zip(&rule.num) {
            if !p.is_zero() {
                summands.push(p.series().mul(&sub(w)?));
            }
        }
        let res = summands.iter().fold(TruncatedHahnSeries::zero(), |acc, s| acc.add(s));
        Ok(judge(&res, &summands, &TruncatedHahnSeries::zero()))
    }
}

/// An equation for `G(x) = F(x^l)` in base `a^n b^m`.
#[derive(Debug, Clone)]
pub struct Combined {
    pub equation: MahlerEquation,
    pub l: BigInt,
}

/// Finds an equation of least order (at most `d1 d2`) relating the
/// generators `F(x^(g^j))`, `g = a^n b^m`, by a kernel computation over
/// `Q(y)`, then clears denominators and exponent fractions.
pub fn combine_bases(eq_a: &MahlerEquation, eq_b: &MahlerEquation, n: i32, m: i32) -> Result<Combined> {
    let (alpha, beta) = check_inputs(eq_a, eq_b)?;
    if (n, m) == (0, 0) {
        return Err(Error::Precondition("(n, m) must be nonzero".into()));
    }
    let gamma = alpha.pow(n) * beta.pow(m);
    let base = RationalScale::from_rational(&gamma)
        .map_err(|_| Error::DegenerateEquation(format!("a^{n} b^{m} = 1; the bases are multiplicatively dependent")))?;
    let eng = Engine { alpha: &alpha, beta: &beta, a: eq_a.coeffs(), b: eq_b.coeffs(), order: ClosureOrder::default() };
    let dim = eng.window().len();
    let targets: Vec<Index> = (0..=dim as i32).map(|j| (j * n, j * m)).collect();
    let (_, l) = eng.plan(&targets);
    let mut memo = HashMap::new();
    let mut cols: Vec<(Vec<DensePoly>, DensePoly)> = Vec::new();
    for &t in &targets {
        let v = eng.rep(t, &l, &mut memo)?;
        let rule = to_rule(&v, &l);
        let den = rule.den.to_dense(&l).unwrap();
        cols.push((rule.num.iter().map(|p| p.to_dense(&l).unwrap()).collect(), den));
        if cols.len() < 2 {
            continue;
        }
        let rows: Vec<Vec<DensePoly>> = (0..dim).map(|w| cols.iter().map(|(num, _)| num[w].clone()).collect()).collect();
        let Some(mu) = poly_kernel(&rows, cols.len()).into_iter().next() else { continue };
        let lambda: Vec<DensePoly> = mu.iter().zip(&cols).map(|(u, (_, den))| u.mul(den)).collect();
        let lambda = primitive_vector(&lambda);
        let coeffs: Vec<FracPoly> = lambda.iter().map(|p| FracPoly::from_dense(p, &l)).collect();
        let lx = coeffs.iter().fold(BigInt::one(), |acc, p| lcm(&acc, &p.denominator()));
        let lr = Rational::from_integer(lx.clone());
        let coeffs: Vec<FracPoly> = coeffs.iter().map(|p| p.substitute(&lr)).collect();
        let equation = MahlerEquation::homogeneous(Base::Rational(base), coeffs)?.canonical()?;
        return Ok(Combined { equation, l: lx });
    }
    Err(Error::KernelEmpty)
}

fn poly_degree(p: &FracPoly) -> usize {
    p.rational_terms().last().map_or(0, |(e, _)| e.to_integer().try_into().unwrap_or(usize::MAX))
}

/// Searches for `sum_{i<=d} P_i F(x^(g^i)) = 0` with integer-exponent
/// polynomial coefficients, by ascending order `d <= d_max` and then degree
/// bound `<= deg_max`. The linear system uses only exponents below the
/// window where every product is exact; `margin` extra equations beyond the
/// number of unknowns are required. Returns `None` when no relation exists
/// within the bounds.
pub fn guess_equation(
    f: &TruncatedHahnSeries,
    base: &Base,
    d_max: usize,
    deg_max: usize,
    margin: usize,
) -> Result<Option<MahlerEquation>> {
    let g = base.as_rational().ok_or(Error::SymbolicBaseUnsupported)?;
    if f.is_empty() {
        return Err(Error::ZeroSeries);
    }
    for d in 1..=d_max {
        let subs: Vec<TruncatedHahnSeries> =
            (0..=d).map(|i| f.substitute(&Exponent::from_rational(g.pow(i as i32)))).collect::<Result<_>>()?;
        let window = subs.iter().map(|s| s.cutoff().clone()).min().expect("d >= 1");
        for deg in 0..=deg_max {
            let unknowns = (d + 1) * (deg + 1);
            // Row t collects coefficient [S_i]_(t-k) for unknown (i, k).
            let mut rows: BTreeMap<Exponent, Vec<Rational>> = BTreeMap::new();
            for (i, s) in subs.iter().enumerate() {
                for (e, c) in s.terms() {
                    for k in 0..=deg {
                        let t = e + &Exponent::from_int(k as i64);
                        if window.admits(&t) {
                            rows.entry(t).or_insert_with(|| vec![Rational::zero(); unknowns])[i * (deg + 1) + k] += c;
                        }
                    }
                }
            }
            let rows: Vec<Vec<Rational>> = rows.into_values().filter(|r| r.iter().any(|c| !c.is_zero())).collect();
            if rows.len() < unknowns + margin {
                return Err(Error::WindowTooSmall { rows: rows.len(), unknowns, margin });
            }
            let kernel = rational_kernel(&rows, unknowns);
            let mut best: Option<(usize, Vec<Rational>, MahlerEquation)> = None;
            for v in kernel {
                let coeffs: Vec<FracPoly> = (0..=d)
                    .map(|i| FracPoly::from_terms((0..=deg).map(|k| (Rational::from_integer(BigInt::from(k)), v[i * (deg + 1) + k].clone()))))
                    .collect::<Result<_>>()?;
                if coeffs[d].is_zero() {
                    continue;
                }
                let eq = MahlerEquation::homogeneous(base.clone(), coeffs)?.canonical()?;
                let total: usize = eq.coeffs().iter().filter(|p| !p.is_zero()).map(poly_degree).sum();
                let key: Vec<Rational> =
                    eq.coeffs().iter().flat_map(|p| (0..=deg).map(move |k| p.series().coeff(&Exponent::from_int(k as i64)))).collect();
                if best.as_ref().is_none_or(|(t, kk, _)| (total, &key) < (*t, kk)) {
                    best = Some((total, key, eq));
                }
            }
            if let Some((_, _, eq)) = best {
                if check_equation(f, &eq)?.is_verified() {
                    return Ok(Some(eq));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::series::Cutoff;

    fn geometric(bound: i64) -> TruncatedHahnSeries {
        TruncatedHahnSeries::new((0..bound).map(|k| (Exponent::from_int(k), int(1))), Cutoff::finite(bound))
    }

    /// F(x) = (1 + x + ... + x^(k-1)) F(x^k) for F = 1/(1-x).
    fn geo_eq(k: i64) -> MahlerEquation {
        let p1: Vec<(i64, i64)> = (0..k).map(|e| (e, -1)).collect();
        MahlerEquation::homogeneous(Base::rational(k, 1).unwrap(), vec![FracPoly::one(), FracPoly::from_ints(&p1)]).unwrap()
    }

    #[test]
    fn span_rules_verify() {
        let span = build_span(&geo_eq(2), &geo_eq(3), 1, ClosureOrder::BetaFirst).unwrap();
        assert_eq!(span.rules.len(), 8);
        assert_eq!(span.window(), vec![(0, 0)]);
        let f = geometric(600);
        for idx in [(1, 1), (-1, 0), (0, -1), (-1, -1), (1, -1)] {
            assert!(span.check_rule(idx, &f).unwrap().is_verified(), "{idx:?}");
        }
        assert!(build_span(&geo_eq(2), &geo_eq(3), 0, ClosureOrder::BetaFirst).unwrap().rules.is_empty());
    }

    #[test]
    fn zero_leading_coefficient_rejected() {
        let bad = MahlerEquation::homogeneous(Base::rational(2, 1).unwrap(), vec![FracPoly::zero(), FracPoly::one()]).unwrap();
        assert!(matches!(build_span(&bad, &geo_eq(3), 1, ClosureOrder::BetaFirst), Err(Error::Precondition(_))));
    }

    #[test]
    fn combined_bases() {
        let c = combine_bases(&geo_eq(2), &geo_eq(3), 1, 1).unwrap();
        assert_eq!(c.l, BigInt::one());
        let want = geo_eq(6).canonical().unwrap();
        assert_eq!(c.equation, want);

        let c = combine_bases(&geo_eq(2), &geo_eq(3), -1, 1).unwrap();
        assert_eq!(c.l, BigInt::from(2));
        assert_eq!(
            c.equation.coeffs(),
            &[FracPoly::from_ints(&[(0, -1), (1, -1)]), FracPoly::from_ints(&[(0, 1), (1, 1), (2, 1)])][..]
        );

        let c = combine_bases(&geo_eq(2), &geo_eq(3), 1, -1).unwrap();
        assert_eq!(c.l, BigInt::from(3));
        assert_eq!(c.equation.coeffs(), &[FracPoly::from_ints(&[(0, -1), (1, -1), (2, -1)]), FracPoly::from_ints(&[(0, 1), (1, 1)])][..]);

        let c = combine_bases(&geo_eq(2), &geo_eq(3), 1, 0).unwrap();
        assert!(check_equation(&geometric(200), &c.equation).unwrap().is_verified());
    }

    #[test]
    fn dependent_bases() {
        let e = combine_bases(&geo_eq(2), &geo_eq(4), 2, -1).unwrap_err();
        assert!(matches!(e, Error::DegenerateEquation(_)));
    }

    #[test]
    fn guessing() {
        let eq = guess_equation(&geometric(200), &Base::rational(3, 1).unwrap(), 1, 2, 8).unwrap().unwrap();
        assert_eq!(eq, geo_eq(3).canonical().unwrap());

        let lac = TruncatedHahnSeries::new((0..12).map(|n| (Exponent::from_int(1 << n), int(1))), Cutoff::finite(1 << 12));
        let eq = guess_equation(&lac, &Base::rational(2, 1).unwrap(), 2, 4, 8).unwrap().unwrap();
        let want = MahlerEquation::homogeneous(
            Base::rational(2, 1).unwrap(),
            vec![FracPoly::from_ints(&[(1, 1)]), FracPoly::from_ints(&[(0, -1), (1, -1)]), FracPoly::one()],
        )
        .unwrap();
        assert_eq!(eq, want);
    }

    #[test]
    fn window_too_small() {
        let e = guess_equation(&geometric(4), &Base::rational(2, 1).unwrap(), 2, 3, 8).unwrap_err();
        assert!(matches!(e, Error::WindowTooSmall { .. }));
    }
}
