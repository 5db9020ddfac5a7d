//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line
//! with its wall time; the test fails if any criterion does.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hahn_mahler::linalg::rational_kernel;
use hahn_mahler::poly::DensePoly;
use hahn_mahler::rational::{int, rat};
use hahn_mahler::{
    admissible_valuations, certify_rational, check_equation, class_component_preserves_equation, class_count_bound,
    combine_bases, decompose, guess_equation, homogenize, invert_base, joint_valuation_consistency,
    lattice_intersection_filter, padic_witness, solve_laurent, Base, Cutoff, Error, Exponent, FracPoly, JointOutcome,
    MahlerEquation, Rational, RationalScale, Scale, ScaleContext, SolveOutcome, SupportSet, SymbolicScale,
    TruncatedHahnSeries, Verdict,
};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn verified(f: &TruncatedHahnSeries, eq: &MahlerEquation, what: &str) -> Result<(), String> {
    match check_equation(f, eq).map_err(|e| format!("{what}: {e}"))? {
        Verdict::Verified(_) => Ok(()),
        v => Err(format!("{what}: {v}")),
    }
}

fn verified_within_second(f: &TruncatedHahnSeries, eq: &MahlerEquation, what: &str) -> Result<(), String> {
    let start = Instant::now();
    verified(f, eq, what)?;
    ensure(start.elapsed() < Duration::from_secs(1), || format!("{what}: took {:?}", start.elapsed()))
}

fn lacunary(from: u32, log_theta: u32) -> TruncatedHahnSeries {
    TruncatedHahnSeries::new((from..log_theta).map(|n| (Exponent::from_int(1 << n), int(1))), Cutoff::finite(1i64 << log_theta))
}

fn fp(pairs: &[(i64, i64)]) -> FracPoly {
    FracPoly::from_ints(pairs)
}

fn poly(c: &[i64]) -> DensePoly {
    DensePoly::new(c.iter().map(|&x| int(x)).collect())
}

fn frac(p: &DensePoly) -> FracPoly {
    FracPoly::from_dense(p, &BigInt::one())
}

fn random_poly(rng: &mut ChaCha8Rng, deg: std::ops::RangeInclusive<usize>, range: i64) -> Vec<i64> {
    let deg = rng.gen_range(deg);
    (0..=deg).map(|_| rng.gen_range(-range..=range)).collect()
}

/// Taylor coefficients of `u / v` below `n`, by the recurrence
/// `v_0 f_k = u_k - sum_{j >= 1} v_j f_{k-j}`.
fn taylor(u: &[Rational], v: &[Rational], n: usize) -> Vec<Rational> {
    let mut f: Vec<Rational> = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = u.get(k).cloned().unwrap_or_else(Rational::zero);
        for j in 1..=k.min(v.len().saturating_sub(1)) {
            acc -= &v[j] * &f[k - j];
        }
        f.push(acc / &v[0]);
    }
    f
}

fn dense_series(c: &[Rational], theta: i64) -> TruncatedHahnSeries {
    let terms = c.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(k, x)| (Exponent::from_int(k as i64), x.clone()));
    TruncatedHahnSeries::new(terms, Cutoff::finite(theta))
}

fn timed(limit: Duration, f: impl FnOnce() -> Check) -> (Result<String, String>, Duration) {
    let start = Instant::now();
    let out = f();
    let dt = start.elapsed();
    let out = match out {
        Ok(s) if dt > limit => Err(format!("{s}; exceeded {limit:?}")),
        o => o,
    };
    (out, dt)
}

// Lacunary series and the equations it satisfies.
fn criterion_1() -> Check {
    let f = lacunary(0, 16);
    let eq2 = MahlerEquation::new(Base::rational(2, 1).unwrap(), vec![fp(&[(0, -1)]), fp(&[(0, 1)])], fp(&[(1, -1)])).unwrap();
    verified_within_second(&f, &eq2, "F(x^2) = F(x) - x")?;

    let g = lacunary(2, 16);
    let eq4 = MahlerEquation::new(Base::rational(2, 1).unwrap(), vec![fp(&[(0, -1)]), fp(&[(0, 1)])], fp(&[(4, -1)])).unwrap();
    verified_within_second(&g, &eq4, "F(x^2) = F(x) - x^4")?;
    let hom = MahlerEquation::homogeneous(Base::rational(2, 1).unwrap(), vec![fp(&[(4, 1)]), fp(&[(0, -1), (4, -1)]), fp(&[(0, 1)])]).unwrap();
    verified_within_second(&g, &hom, "F(x^4) - (1+x^4)F(x^2) + x^4 F(x) = 0")?;
    let half = MahlerEquation::homogeneous(Base::rational(1, 2).unwrap(), vec![fp(&[(0, 1)]), fp(&[(0, -1), (1, -1)]), fp(&[(1, 1)])]).unwrap();
    verified_within_second(&g, &half, "half-base form")?;
    let inv = invert_base(&half).map_err(|e| e.to_string())?;
    let gi = g.substitute(&inv.witness).map_err(|e| e.to_string())?;
    verified_within_second(&gi, &inv.equation, "inverted half-base form")?;

    // The oracle: the shifted series differ by exactly one monomial.
    let diff = f.substitute(&Exponent::from_int(2)).unwrap().sub(&f).with_cutoff(Cutoff::finite(1i64 << 16));
    ensure(diff == TruncatedHahnSeries::new([(Exponent::from_int(1), int(-1))], Cutoff::finite(1i64 << 16)), || {
        format!("independent residual {diff}")
    })?;
    Ok("4 equations verified at 2^16".into())
}

// Homogenization keeps the solution, up to the returned substitution.
fn criterion_2() -> Check {
    let f = lacunary(0, 16);
    let eq2 = MahlerEquation::new(Base::rational(2, 1).unwrap(), vec![fp(&[(0, -1)]), fp(&[(0, 1)])], fp(&[(1, -1)])).unwrap();
    let h = homogenize(&eq2).map_err(|e| e.to_string())?;
    verified(&f.substitute(&h.witness).unwrap(), &h.equation, "homogenized lacunary equation")?;

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut done = 0;
    while done < 50 {
        let d = rng.gen_range(1..=2usize);
        let u = random_poly(&mut rng, 0..=3, 4);
        let mut v = random_poly(&mut rng, 1..=2, 3);
        v[0] = 1;
        let q: Vec<Vec<i64>> = (0..=d).map(|_| random_poly(&mut rng, 0..=2, 3)).collect();
        if poly(&v).degree() == Some(0) || poly(&q[0]).is_zero() || poly(&q[d]).is_zero() {
            continue;
        }
        let (up, vp) = (poly(&u), poly(&v));
        let inflated = |p: &DensePoly, i: usize| p.inflate(1 << i);
        let w = (0..=d).fold(DensePoly::one(), |acc, j| acc.mul(&inflated(&vp, j)));
        let coeffs: Vec<FracPoly> = q.iter().map(|qi| frac(&poly(qi).mul(&w))).collect();
        let mut a = DensePoly::zero();
        for (i, qi) in q.iter().enumerate() {
            let others = (0..=d).filter(|&j| j != i).fold(DensePoly::one(), |acc, j| acc.mul(&inflated(&vp, j)));
            a = a.add(&poly(qi).mul(&inflated(&up, i)).mul(&others));
        }
        if a.is_zero() {
            continue;
        }
        let eq = MahlerEquation::new(Base::rational(2, 1).unwrap(), coeffs, frac(&a)).unwrap();
        let theta = 60;
        let f = dense_series(&taylor(up.coeffs(), vp.coeffs(), theta), theta as i64);
        verified(&f, &eq, &format!("instance {done} before homogenizing"))?;
        let h = homogenize(&eq).map_err(|e| format!("instance {done}: {e}"))?;
        let g = f.substitute(&h.witness).unwrap();
        verified(&g, &h.equation, &format!("instance {done} after homogenizing"))?;
        ensure(h.equation.is_homogeneous() && h.equation.degree() == eq.degree() + 1, || format!("instance {done}: shape"))?;
        done += 1;
    }
    Ok("lacunary equation and 50 random instances".into())
}

fn random_equation(rng: &mut ChaCha8Rng, base: Base) -> MahlerEquation {
    loop {
        let d = rng.gen_range(1..=2usize);
        let ps: Vec<DensePoly> = (0..=d).map(|_| poly(&random_poly(rng, 0..=4, 3))).collect();
        if ps[0].is_zero() || ps[d].is_zero() {
            continue;
        }
        return MahlerEquation::homogeneous(base, ps.iter().map(frac).collect()).unwrap();
    }
}

// Base 3/2: no Laurent solutions from any admissible valuation.
fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let theta = Exponent::from_int(30);
    let (mut runs, mut obstructions, mut found, mut undecided) = (0, 0, Vec::new(), Vec::new());
    for k in 0..200 {
        let eq = random_equation(&mut rng, Base::rational(3, 2).unwrap());
        let vals = admissible_valuations(&eq).map_err(|e| e.to_string())?;
        for v in vals.iter().filter_map(|e| e.to_rational()).filter(|r| r.is_integer() && r.abs() <= int(10)) {
            runs += 1;
            match solve_laurent(&eq, &[(Exponent::from_rational(v.clone()), int(1))], &theta) {
                Ok(SolveOutcome::Obstruction { .. }) => obstructions += 1,
                Ok(SolveOutcome::Solution(s)) if s.is_empty() => {}
                Ok(SolveOutcome::Solution(s)) => found.push(format!("#{k} v={v}: {s}")),
                Err(e @ Error::AmbiguousContinuation(..)) => undecided.push(format!("#{k} v={v}: {e}")),
                Err(e) => return Err(format!("#{k} v={v}: {e}")),
            }
        }
    }
    ensure(found.is_empty(), || format!("nonzero solutions: {}", found.join("; ")))?;
    ensure(undecided.is_empty(), || format!("undetermined continuations: {}", undecided.join("; ")))?;
    ensure(runs > 0, || "no admissible valuation in the grid".into())?;
    Ok(format!("{runs} seeded runs, {obstructions} obstructions, 0 nonzero solutions"))
}

/// An equation in base 2 with order `d` and coefficient degree `deg`
/// satisfied by every function in `funcs` (each a finite list of terms).
fn annihilator(rng: &mut ChaCha8Rng, funcs: &[Vec<(Rational, Rational)>], d: usize, deg: usize) -> Option<MahlerEquation> {
    let ncols = (d + 1) * (deg + 1);
    let mut rows: BTreeMap<(usize, Rational), Vec<Rational>> = BTreeMap::new();
    for (j, f) in funcs.iter().enumerate() {
        for i in 0..=d {
            for a in 0..=deg {
                for (e, c) in f {
                    let pos = int(a as i64) + e * int(1 << i);
                    rows.entry((j, pos)).or_insert_with(|| vec![Rational::zero(); ncols])[i * (deg + 1) + a] += c;
                }
            }
        }
    }
    let rows: Vec<Vec<Rational>> = rows.into_values().collect();
    let kernel = rational_kernel(&rows, ncols);
    if kernel.is_empty() {
        return None;
    }
    let mut vec = vec![Rational::zero(); ncols];
    for b in &kernel {
        let c = int(rng.gen_range(1..=3));
        for (x, y) in vec.iter_mut().zip(b) {
            *x += &c * y;
        }
    }
    let mut ps: Vec<DensePoly> = (0..=d).map(|i| DensePoly::new(vec[i * (deg + 1)..(i + 1) * (deg + 1)].to_vec())).collect();
    while ps.last().is_some_and(|p| p.is_zero()) {
        ps.pop();
    }
    if ps.len() < 2 || ps[0].is_zero() {
        return None;
    }
    MahlerEquation::homogeneous(Base::rational(2, 1).unwrap(), ps.iter().map(frac).collect()).ok()
}

fn odd_part(n: &BigInt) -> BigInt {
    let mut n = n.clone();
    while (&n % 2u32).is_zero() {
        n /= 2u32;
    }
    n
}

/// Brute-force class relation for base 2: `x` and `y` differ by a dyadic
/// rational after scaling one of them by a power of two.
fn oracle_same_class(x: &Rational, y: &Rational) -> bool {
    (0..64).any(|m| {
        let s = int(1i64 << m);
        odd_part((x * &s - y).denom()).is_one() || odd_part((y * &s - x).denom()).is_one()
    })
}

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    // Class representatives with the length of their orbit under doubling.
    let pool = [(rat(0, 1), 1usize), (rat(1, 3), 2), (rat(1, 7), 3), (rat(3, 7), 3)];
    let base = RationalScale::new(2, 1).unwrap();
    let (mut done, mut attempts, mut classes_seen) = (0, 0, 0);
    while done < 100 {
        attempts += 1;
        if attempts > 5000 {
            return Err(format!("only {done} instances constructed"));
        }
        let k = rng.gen_range(2..=3usize);
        let mut picks: Vec<usize> = Vec::new();
        while picks.len() < k {
            let p = rng.gen_range(0..pool.len());
            if !picks.contains(&p) {
                picks.push(p);
            }
        }
        // One or two monomials per class, each a solution on its own.
        let mut monos: Vec<(Rational, usize)> = Vec::new();
        for &p in &picks {
            let (r, len) = &pool[p];
            for _ in 0..rng.gen_range(1..=2) {
                let s = r * int(1 << rng.gen_range(0..*len)) + int(rng.gen_range(0..=1));
                if !monos.iter().any(|(m, _)| m == &s) {
                    monos.push((s, *len));
                }
            }
        }
        let d: usize = monos.iter().map(|(_, l)| l).sum();
        if d > 6 {
            continue;
        }
        let funcs: Vec<Vec<(Rational, Rational)>> = monos.iter().map(|(s, _)| vec![(s.clone(), int(1))]).collect();
        let Some(eq) = [4, 8, 14].into_iter().find_map(|deg| annihilator(&mut rng, &funcs, d, deg)) else { continue };
        let comps: Vec<TruncatedHahnSeries> =
            monos.iter().map(|(s, _)| TruncatedHahnSeries::monomial(Exponent::from_rational(s.clone()), int(rng.gen_range(1..=5)))).collect();
        let f = comps.iter().fold(TruncatedHahnSeries::zero(), |acc, c| acc.add(c));
        for (j, c) in comps.iter().enumerate() {
            verified(c, &eq, &format!("instance {done} component {j}"))?;
        }

        let parts = decompose(&f, &base).map_err(|e| e.to_string())?;
        // Parts partition the terms of f.
        let mut union: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (_, part) in &parts {
            ensure(part.cutoff() == f.cutoff(), || "cutoff changed".into())?;
            for (e, c) in part.terms() {
                ensure(union.insert(e.to_rational().unwrap(), c.clone()).is_none(), || format!("{e} in two parts"))?;
            }
        }
        let original: BTreeMap<Rational, Rational> = f.terms().iter().map(|(e, c)| (e.to_rational().unwrap(), c.clone())).collect();
        ensure(union == original, || format!("instance {done}: parts do not sum to the input"))?;
        ensure(parts.len() == picks.len(), || format!("instance {done}: {} parts for {} classes", parts.len(), picks.len()))?;
        // Classes agree with the brute-force relation.
        let reps: Vec<Vec<Rational>> = parts.iter().map(|(_, p)| p.terms().iter().map(|(e, _)| e.to_rational().unwrap()).collect()).collect();
        for (a, xs) in reps.iter().enumerate() {
            for (b, ys) in reps.iter().enumerate() {
                let same = oracle_same_class(&xs[0], &ys[0]);
                ensure(same == (a == b), || format!("instance {done}: classes of {} and {} misjudged", xs[0], ys[0]))?;
            }
        }
        for (class, v) in class_component_preserves_equation(&f, &eq).map_err(|e| e.to_string())? {
            ensure(v.is_verified(), || format!("instance {done}: component {class}: {v}"))?;
        }
        let bound = class_count_bound(&eq).map_err(|e| e.to_string())?.len();
        ensure(parts.len() <= bound, || format!("instance {done}: {} classes > {bound} candidates", parts.len()))?;
        classes_seen += parts.len();
        done += 1;
    }
    Ok(format!("100 instances ({attempts} drawn), {classes_seen} class components"))
}

fn geo_eq(k: i64) -> MahlerEquation {
    let p1: Vec<(i64, i64)> = (0..k).map(|j| (j, 1)).collect();
    MahlerEquation::homogeneous(Base::rational(k, 1).unwrap(), vec![fp(&[(0, -1)]), fp(&p1)]).unwrap()
}

// Combining bases 2 and 3 for 1/(1-x), cross-checked against guessing.
fn criterion_5() -> Check {
    let (a, b) = (geo_eq(2), geo_eq(3));
    let mut notes = Vec::new();
    for (n, m, label) in [(1, 1, "6"), (-1, 1, "3/2"), (1, -1, "2/3")] {
        let c = combine_bases(&a, &b, n, m).map_err(|e| format!("base {label}: {e}"))?;
        ensure(c.equation.degree() <= 1, || format!("base {label}: order {}", c.equation.degree()))?;
        let l: i64 = c.l.to_string().parse().unwrap();
        let theta = 240;
        let g = TruncatedHahnSeries::new((0..theta).step_by(l as usize).map(|k| (Exponent::from_int(k), int(1))), Cutoff::finite(theta));
        verified(&g, &c.equation, &format!("combined base {label}"))?;
        let guessed = guess_equation(&g, c.equation.base(), 1, 6, 8)
            .map_err(|e| format!("guess base {label}: {e}"))?
            .ok_or_else(|| format!("guess base {label}: nothing found"))?;
        ensure(guessed == c.equation, || format!("base {label}: combined {} but guessed {}", c.equation, guessed))?;
        notes.push(format!("{label} (l={l})"));
    }
    Ok(format!("bases {}", notes.join(", ")))
}

fn criterion_6() -> Check {
    let (a, b) = (rat(2, 3), rat(5, 3));
    ensure(padic_witness(&a, &b, 3, 2).map_err(|e| e.to_string())? == Some((1, -1)), || "witness for p = 3".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for trial in 0..20 {
        let mut support = Vec::new();
        for _ in 0..10 {
            support.push(int(rng.gen_range(-20..=20)));
            let den = [2i64, 3, 5, 4, 6, 9, 10, 15, 25, 30][rng.gen_range(0..10)];
            let num = rng.gen_range(-40..=40);
            support.push(rat(num, den));
        }
        let s = SupportSet::new(support.iter().cloned().map(Exponent::from_rational).collect());
        let mut pairs = Vec::new();
        for p in [2u64, 3, 5] {
            let w = padic_witness(&a, &b, p, 2).map_err(|e| e.to_string())?.ok_or_else(|| format!("no witness for {p}"))?;
            pairs.push(w);
        }
        let kept = lattice_intersection_filter(&s, &pairs, &a, &b).map_err(|e| e.to_string())?;
        let want = SupportSet::new(s.iter().filter(|e| e.to_rational().unwrap().is_integer()).cloned().collect());
        ensure(kept == want, || format!("trial {trial}: kept {:?}", kept.into_vec()))?;
    }
    Ok("witness (1, -1); 20 planted supports reduced to their integers".into())
}

// Valuations of two equations in independent symbolic bases.
fn criterion_7() -> Check {
    let alpha = SymbolicScale::fixed("alpha", rat(141, 100), rat(142, 100)).unwrap();
    let beta = SymbolicScale::fixed("beta", rat(173, 100), rat(174, 100)).unwrap();
    let ctx = ScaleContext::new(Scale::Symbolic(alpha.into()), Some(Scale::Symbolic(beta.into()))).assert_independent().shared();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let random_vals = |rng: &mut ChaCha8Rng| -> Vec<i64> { (0..=rng.gen_range(1..=2)).map(|_| rng.gen_range(0..=20)).collect() };
    let (mut infeasible, mut feasible) = (0, 0);
    for k in 0..100 {
        let (va, vb) = (random_vals(&mut rng), random_vals(&mut rng));
        let mk = |vals: &[i64], pow| {
            let base = Base::Symbolic { pow, ctx: Some(ctx.clone()) };
            MahlerEquation::homogeneous(base, vals.iter().map(|&c| fp(&[(c, rng_coeff(c))])).collect()).unwrap()
        };
        let (ea, eb) = (mk(&va, (1, 0)), mk(&vb, (0, 1)));
        let out = joint_valuation_consistency(&ea, Some(&eb)).map_err(|e| e.to_string())?;
        // Only v = 0 survives, and only if both equations have two equal valuations.
        let repeated = |v: &[i64]| (0..v.len()).any(|i| (i + 1..v.len()).any(|j| v[i] == v[j]));
        let expect_feasible = repeated(&va) && repeated(&vb);
        match &out {
            JointOutcome::Infeasible(_) => infeasible += 1,
            JointOutcome::Feasible(pairs) => {
                feasible += 1;
                for (x, y) in pairs {
                    ensure(x.num.is_zero() && y.num.is_zero(), || format!("#{k}: nonzero feasible valuation {x} / {y}"))?;
                    ensure(x.num.is_integer() && y.num.is_integer(), || format!("#{k}: non-integral constraint"))?;
                }
            }
        }
        ensure(out.is_infeasible() != expect_feasible, || format!("#{k}: outcome disagrees with the oracle for {va:?} {vb:?}"))?;
    }
    ensure(infeasible >= 95, || format!("only {infeasible} of 100 infeasible"))?;
    Ok(format!("{infeasible} infeasible, {feasible} feasible (v = 0 only)"))
}

fn rng_coeff(c: i64) -> i64 {
    if c % 2 == 0 {
        1
    } else {
        -2
    }
}

// Planted rational functions are recovered; the lacunary series is not rational.
fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let theta = 48usize;
    for k in 0..100 {
        let u = poly(&random_poly(&mut rng, 0..=8, 5));
        let mut vc = random_poly(&mut rng, 0..=8, 5);
        if vc[0] == 0 {
            vc[0] = 1;
        }
        let v = poly(&vc);
        let f = dense_series(&taylor(u.coeffs(), v.coeffs(), theta), theta as i64);
        let cert = certify_rational(&f, 8, 8).map_err(|e| format!("#{k}: {e}"))?.ok_or_else(|| format!("#{k}: not found"))?;
        let (cu, cv) = (cert.numerator.to_dense(&BigInt::one()).unwrap(), cert.denominator.to_dense(&BigInt::one()).unwrap());
        // Same function: cu v = u cv.
        ensure(cu.mul(&v) == u.mul(&cv), || format!("#{k}: certificate is a different function"))?;
        ensure(cv.coeff(0).is_one(), || format!("#{k}: V(0) != 1"))?;
        // Lowest terms: the planted pair reduced by its gcd.
        let g = DensePoly::gcd(&u, &v);
        let (ru, rv) = if u.is_zero() { (DensePoly::zero(), DensePoly::one()) } else { (u.exact_div(&g).unwrap(), v.exact_div(&g).unwrap()) };
        let s = rv.coeff(0).recip();
        ensure(cu == ru.scale(&s) && cv == rv.scale(&s), || format!("#{k}: not in lowest terms"))?;
    }
    let lac = lacunary(0, 12);
    for deg_max in 1..=20 {
        let out = certify_rational(&lac, deg_max, 8).map_err(|e| e.to_string())?;
        ensure(out.is_none(), || format!("lacunary series certified at deg_max {deg_max}"))?;
    }
    Ok("100 planted functions recovered; lacunary NotFound for deg_max 1..=20".into())
}

/// Writes past the test harness capture so the lines show in every run.
fn report(line: String) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
}

type Criterion = (&'static str, Duration, fn() -> Check);

#[test]
fn acceptance() {
    let criteria: [Criterion; 8] = [
        ("1 lacunary example chain", Duration::from_secs(4), criterion_1),
        ("2 homogenize round-trip", Duration::from_secs(10), criterion_2),
        ("3 no Laurent solutions in base 3/2", Duration::from_secs(30), criterion_3),
        ("4 support decomposition", Duration::from_secs(10), criterion_4),
        ("5 base combination", Duration::from_secs(5), criterion_5),
        ("6 p-adic and lattice endgame", Duration::from_secs(1), criterion_6),
        ("7 joint valuation obstruction", Duration::from_secs(10), criterion_7),
        ("8 rationality certificates", Duration::from_secs(20), criterion_8),
    ];
    let mut failed = Vec::new();
    for (name, limit, run) in criteria {
        let (out, dt) = timed(limit, run);
        match out {
            Ok(detail) => report(format!("PASS  criterion {name} [{:.2}s] {detail}", dt.as_secs_f64())),
            Err(why) => {
                report(format!("FAIL  criterion {name} [{:.2}s] {why}", dt.as_secs_f64()));
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
