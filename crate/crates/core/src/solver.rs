//! Forward coefficient propagation for homogeneous Mahler equations.
//!
//! Writing `F = sum f_e x^e`, the coefficient of `x^t` in
//! `sum_i P_i(x) F(x^(g^i))` must vanish for every `t`. For a base `g > 1`
//! the unknown with the largest exponent at position `t` comes from the
//! lowest term of `P_0`: `e = t - c_0`. Processing positions in increasing
//! order therefore determines the series one coefficient at a time, until a
//! residual appears that no remaining coefficient can absorb.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use crate::equation::{Base, MahlerEquation};
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::rational::{format_rational, Rational};
use crate::series::{Cutoff, TruncatedHahnSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObstructionReason {
    /// The least terms of the summands do not cancel.
    MinimalTermsCannotCancel,
    /// Cancelling would need a term below the seeded valuation.
    BelowValuation,
    /// The position is reachable only through non-integer exponents.
    IntegerGap,
    /// Every coefficient able to reach the position is already fixed.
    Inconsistent,
}

impl fmt::Display for ObstructionReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ObstructionReason::MinimalTermsCannotCancel => "minimal terms cannot cancel",
            ObstructionReason::BelowValuation => "cancellation needs a term below the valuation",
            ObstructionReason::IntegerGap => "position not reachable from integer exponents",
            ObstructionReason::Inconsistent => "no free coefficient reaches this position",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Solution(TruncatedHahnSeries),
    Obstruction { at: Exponent, reason: ObstructionReason },
}

impl SolveOutcome {
    pub fn solution(&self) -> Option<&TruncatedHahnSeries> {
        match self {
            SolveOutcome::Solution(s) => Some(s),
            SolveOutcome::Obstruction { .. } => None,
        }
    }

    /// A solution with at least one term.
    pub fn is_nonzero_solution(&self) -> bool {
        self.solution().is_some_and(|s| !s.is_empty())
    }
}

/// One term `p x^a` of `P_i`, with `g^i` precomputed.
struct Term {
    i: usize,
    g: Rational,
    a: Rational,
    p: Rational,
}

struct Setup {
    terms: Vec<Term>,
    c0: Rational,
    a0: Rational,
    /// Positions at or above this are never examined.
    limit: Rational,
    /// Least position any summand can reach from the valuation.
    t_min: Rational,
    v: Rational,
    e_max: Rational,
    seeds: BTreeMap<Rational, Rational>,
}

fn setup(eq: &MahlerEquation, seeds: &[(Exponent, Rational)], theta: &Rational) -> Result<Option<Setup>> {
    if !eq.is_homogeneous() {
        return Err(Error::NotHomogeneous);
    }
    let g = match eq.base() {
        Base::Rational(r) => r.value(),
        Base::Symbolic { .. } => return Err(Error::SymbolicBaseUnsupported),
    };
    if g <= Rational::one() {
        return Err(Error::Precondition("base must exceed 1; invert the base first".into()));
    }
    let p0 = &eq.coeffs()[0];
    let (c0, a0) = match (p0.valuation(), p0.lowest_coeff()) {
        (Some(c), Some(a)) => (c, a.clone()),
        _ => return Err(Error::Precondition("P_0 must be nonzero; normalize first".into())),
    };
    let mut seed_map = BTreeMap::new();
    for (e, c) in seeds {
        let e = e.to_rational().ok_or_else(|| Error::Precondition(format!("seed exponent {e} is not rational")))?;
        if let Some(old) = seed_map.insert(e.clone(), c.clone()) {
            if &old != c {
                return Err(Error::Precondition(format!("conflicting seeds at {}", format_rational(&e))));
            }
        }
    }
    let Some(v) = seed_map.iter().find(|(_, c)| !c.is_zero()).map(|(e, _)| e.clone()) else {
        return Ok(None);
    };
    let e_max = seed_map.keys().next_back().cloned().expect("nonempty");

    let mut terms = Vec::new();
    let mut g_i = Rational::one();
    let mut safe = c0.clone() + theta;
    let mut t_min: Option<Rational> = None;
    for (i, p) in eq.coeffs().iter().enumerate() {
        if i > 0 {
            g_i *= &g;
        }
        if let Some(ci) = p.valuation() {
            let reach = &ci + &g_i * &v;
            t_min = Some(t_min.map_or(reach.clone(), |t: Rational| t.min(reach)));
            if i > 0 {
                // Unknowns whose own position lies beyond the limit must not
                // reach below it through this summand.
                let bound = (&g_i * &c0 - &ci) / (&g_i - Rational::one());
                safe = safe.max(bound);
            }
        }
        for (a, c) in p.rational_terms() {
            terms.push(Term { i, g: g_i.clone(), a, p: c.clone() });
        }
    }
    Ok(Some(Setup { terms, c0, a0, limit: safe, t_min: t_min.expect("P_0 nonzero"), v, e_max, seeds: seed_map }))
}

fn theta_of(theta: &Exponent) -> Result<Rational> {
    theta.to_rational().ok_or_else(|| Error::Precondition("cutoff must be rational".into()))
}

fn finish(known: &BTreeMap<Rational, Rational>, theta: &Rational) -> SolveOutcome {
    let terms = known.iter().map(|(e, c)| (Exponent::from_rational(e.clone()), c.clone()));
    SolveOutcome::Solution(TruncatedHahnSeries::new(terms, Cutoff::finite(theta.clone())))
}

fn classify(s: &Setup, t: &Rational, e: &Rational, multi_seed: bool) -> Result<ObstructionReason> {
    if t == &s.t_min {
        Ok(ObstructionReason::MinimalTermsCannotCancel)
    } else if e < &s.v {
        Ok(ObstructionReason::BelowValuation)
    } else if multi_seed && e <= &s.e_max {
        Err(Error::SeedInconsistent(Exponent::from_rational(t.clone())))
    } else {
        Ok(ObstructionReason::Inconsistent)
    }
}

/// Unique continuation below `theta` of the seeded prefix. Exponents up to
/// the largest seed are fixed (unseeded ones are zero).
pub fn solve_equation(eq: &MahlerEquation, seeds: &[(Exponent, Rational)], theta: &Exponent) -> Result<SolveOutcome> {
    let th = theta_of(theta)?;
    let Some(s) = setup(eq, seeds, &th)? else {
        return Ok(SolveOutcome::Solution(TruncatedHahnSeries::zero()));
    };
    let multi_seed = s.seeds.values().filter(|c| !c.is_zero()).count() > 1;

    // Coefficient of the principal unknown e at its own position e + c0.
    let kappa = |e: &Rational| -> Rational {
        let t = e + &s.c0;
        let mut k = s.a0.clone();
        for term in s.terms.iter().filter(|x| x.i > 0) {
            if &term.g * e + &term.a == t {
                k += &term.p;
            }
        }
        k
    };
    // Where self-contributions can cancel the principal coefficient, that
    // coefficient is free and the continuation is not unique.
    let top = &s.limit - &s.c0;
    for term in s.terms.iter().filter(|x| x.i > 0) {
        let e = (&s.c0 - &term.a) / (&term.g - Rational::one());
        if e > s.e_max && e < top && kappa(&e).is_zero() {
            return Err(Error::AmbiguousContinuation(
                Exponent::from_rational(e),
                "its coefficient cancels at its own position".into(),
            ));
        }
    }

    let mut known: BTreeMap<Rational, Rational> = s.seeds.iter().filter(|(_, c)| !c.is_zero()).map(|(e, c)| (e.clone(), c.clone())).collect();
    let mut pending: BTreeMap<Rational, Rational> = BTreeMap::new();
    let add = |pending: &mut BTreeMap<Rational, Rational>, pos: Rational, c: Rational| {
        if pos < s.limit {
            *pending.entry(pos).or_insert_with(Rational::zero) += c;
        }
    };
    for (e, f) in &known {
        for term in &s.terms {
            add(&mut pending, &term.g * e + &term.a, &term.p * f);
        }
    }

    while let Some((t, r)) = pending.pop_first() {
        if r.is_zero() {
            continue;
        }
        let e = &t - &s.c0;
        if e <= s.e_max || known.contains_key(&e) {
            let reason = classify(&s, &t, &e, multi_seed)?;
            return Ok(SolveOutcome::Obstruction { at: Exponent::from_rational(t), reason });
        }
        let f = -&r / kappa(&e);
        for term in &s.terms {
            if term.i == 0 && term.a == s.c0 {
                continue;
            }
            let pos = &term.g * &e + &term.a;
            match pos.cmp(&t) {
                std::cmp::Ordering::Less => {
                    return Err(Error::AmbiguousContinuation(
                        Exponent::from_rational(pos),
                        format!("x^{} feeds back below its own position", format_rational(&e)),
                    ))
                }
                std::cmp::Ordering::Equal => {}
                std::cmp::Ordering::Greater => add(&mut pending, pos, &term.p * &f),
            }
        }
        known.insert(e, f);
    }
    Ok(finish(&known, &th))
}

/// Like [`solve_equation`], restricted to integer exponents and solved as
/// one linear system, so coefficients that feed back below their own
/// position (negative exponents) are handled exactly.
pub fn solve_laurent(eq: &MahlerEquation, seeds: &[(Exponent, Rational)], theta: &Exponent) -> Result<SolveOutcome> {
    let th = theta_of(theta)?;
    let Some(s) = setup(eq, seeds, &th)? else {
        return Ok(SolveOutcome::Solution(TruncatedHahnSeries::zero()));
    };
    if s.seeds.keys().any(|e| !e.is_integer()) {
        return Err(Error::Precondition("Laurent seeds must have integer exponents".into()));
    }
    let multi_seed = s.seeds.values().filter(|c| !c.is_zero()).count() > 1;
    let top = &s.limit - &s.c0;

    // Columns: integer exponents strictly between the prefix and `top`.
    let mut cols: Vec<Rational> = Vec::new();
    let mut e = s.e_max.clone() + Rational::one();
    while e < top {
        cols.push(e.clone());
        e += Rational::one();
    }

    // Rows: position -> (sparse coefficients, constant from fixed terms).
    let mut rows: BTreeMap<Rational, (BTreeMap<usize, Rational>, Rational)> = BTreeMap::new();
    let fixed = s.seeds.iter().filter(|(_, c)| !c.is_zero());
    for (e, f) in fixed {
        for term in &s.terms {
            let pos = &term.g * e + &term.a;
            if pos < s.limit {
                rows.entry(pos).or_default().1 += &term.p * f;
            }
        }
    }
    for (k, e) in cols.iter().enumerate() {
        for term in &s.terms {
            let pos = &term.g * e + &term.a;
            if pos < s.limit {
                *rows.entry(pos).or_default().0.entry(k).or_insert_with(Rational::zero) += &term.p;
            }
        }
    }

    // Pivot rows keyed by pivot column; each stores col -> coeff (pivot 1)
    // and the constant, all other columns smaller than the pivot.
    let mut pivots: BTreeMap<usize, (BTreeMap<usize, Rational>, Rational)> = BTreeMap::new();
    for (t, (mut row, mut cst)) in rows {
        row.retain(|_, c| !c.is_zero());
        loop {
            let hit = row.keys().rev().find(|k| pivots.contains_key(k)).copied();
            let Some(k) = hit else { break };
            let f = row.remove(&k).expect("present");
            let (prow, pc) = &pivots[&k];
            for (j, c) in prow {
                if *j == k {
                    continue;
                }
                let entry = row.entry(*j).or_insert_with(Rational::zero);
                *entry -= &f * c;
                if entry.is_zero() {
                    row.remove(j);
                }
            }
            cst -= &f * pc;
        }
        match row.keys().next_back().copied() {
            None if cst.is_zero() => {}
            None => {
                let e = &t - &s.c0;
                let reason = if t == s.t_min {
                    ObstructionReason::MinimalTermsCannotCancel
                } else if !t.is_integer() {
                    ObstructionReason::IntegerGap
                } else {
                    classify(&s, &t, &e, multi_seed)?
                };
                return Ok(SolveOutcome::Obstruction { at: Exponent::from_rational(t), reason });
            }
            Some(k) => {
                let inv = row[&k].recip();
                let normalized = row.into_iter().map(|(j, c)| (j, c * &inv)).collect();
                pivots.insert(k, (normalized, cst * &inv));
            }
        }
    }

    let free: BTreeSet<usize> = (0..cols.len()).filter(|k| !pivots.contains_key(k)).collect();
    if let Some(&k) = free.iter().next() {
        if cols[k] < th {
            return Err(Error::AmbiguousContinuation(Exponent::from_rational(cols[k].clone()), "coefficient is not determined".into()));
        }
    }
    // Row for column k reads x_k + sum_{j<k} c_j x_j = -cst.
    let mut values: Vec<Option<Rational>> = vec![None; cols.len()];
    let mut known: BTreeMap<Rational, Rational> = s.seeds.iter().filter(|(_, c)| !c.is_zero()).map(|(e, c)| (e.clone(), c.clone())).collect();
    for (k, (prow, cst)) in &pivots {
        if cols[*k] >= th {
            break;
        }
        let mut val = -cst.clone();
        for (j, c) in prow {
            if j == k {
                continue;
            }
            match &values[*j] {
                Some(x) => val -= c * x,
                None => {
                    return Err(Error::AmbiguousContinuation(Exponent::from_rational(cols[*k].clone()), "depends on a free coefficient".into()))
                }
            }
        }
        if !val.is_zero() {
            known.insert(cols[*k].clone(), val.clone());
        }
        values[*k] = Some(val);
    }
    Ok(finish(&known, &th))
}

impl fmt::Display for SolveOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveOutcome::Solution(s) => write!(f, "{s}"),
            SolveOutcome::Obstruction { at, reason } => write!(f, "Obstruction at x^{at}: {reason}"),
        }
    }
}
