//! JSON encoding of exponents, series, equations and certificates.
//!
//! Rationals are strings `"n/d"` (plain JSON integers are also accepted).
//! An exponent is either a rational or `{"terms": [{"m", "n", "s", "c"}]}`.
//! A series is `{"terms": [[exp, coeff], ...], "cutoff": exp | "inf"}`; a
//! fractional polynomial is the bare term list. An equation is
//! `{"base": {"p", "q"} | {"symbol", "pow": [n, m]}, "coeffs": [...], "rhs": [...]}`.

use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::equation::{Base, FracPoly, MahlerEquation, Verdict};
use crate::error::{Error, Result};
use crate::exponent::{Exponent, Monomial, ScaleContext};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::rationality::RationalCertificate;
use crate::series::{Cutoff, TruncatedHahnSeries};

pub fn parse_str(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::parse("$", e.to_string()))
}

fn field<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::parse(path, format!("missing field `{key}`")))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::parse(path, "expected an array"))
}

fn small_int(v: &Value, path: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| Error::parse(path, "expected an integer"))
}

pub fn rational_from(v: &Value, path: &str) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s).ok_or_else(|| Error::parse(path, format!("bad rational `{s}`"))),
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(Rational::from_integer(i.into())),
            None => Err(Error::parse(path, "non-integer numbers must be written as \"n/d\" strings")),
        },
        _ => Err(Error::parse(path, "expected a rational")),
    }
}

pub fn rational_to(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

pub fn exponent_from(v: &Value, path: &str, ctx: Option<&Arc<ScaleContext>>) -> Result<Exponent> {
    let Some(terms) = v.get("terms") else {
        return rational_from(v, path).map(Exponent::from_rational);
    };
    let mut out = Vec::new();
    for (i, t) in array(terms, path)?.iter().enumerate() {
        let p = format!("{path}.terms[{i}]");
        let m = small_int(field(t, "m", &p)?, &p)? as i32;
        let n = small_int(field(t, "n", &p)?, &p)? as i32;
        let s = small_int(field(t, "s", &p)?, &p)?;
        if !(0..=1).contains(&s) {
            return Err(Error::parse(&p, "`s` must be 0 or 1"));
        }
        out.push((Monomial::new(m, n, s as u8), rational_from(field(t, "c", &p)?, &p)?));
    }
    let e = Exponent::from_terms(out);
    if e.is_rational() {
        return Ok(e);
    }
    match ctx {
        Some(c) => Ok(e.with_context(c)),
        None => Err(Error::MissingContext),
    }
}

pub fn exponent_to(e: &Exponent) -> Value {
    if let Some(r) = e.to_rational() {
        return rational_to(&r);
    }
    let terms: Vec<Value> =
        e.terms().map(|(k, c)| json!({"m": k.m, "n": k.n, "s": k.s, "c": format_rational(c)})).collect();
    json!({ "terms": terms })
}

fn term_list(v: &Value, path: &str, ctx: Option<&Arc<ScaleContext>>) -> Result<Vec<(Exponent, Rational)>> {
    let mut out = Vec::new();
    for (i, t) in array(v, path)?.iter().enumerate() {
        let p = format!("{path}[{i}]");
        let pair = array(t, &p)?;
        if pair.len() != 2 {
            return Err(Error::parse(&p, "expected [exponent, coefficient]"));
        }
        out.push((exponent_from(&pair[0], &p, ctx)?, rational_from(&pair[1], &p)?));
    }
    Ok(out)
}

fn terms_to(terms: &[(Exponent, Rational)]) -> Value {
    Value::Array(terms.iter().map(|(e, c)| json!([exponent_to(e), format_rational(c)])).collect())
}

pub fn cutoff_from(v: &Value, path: &str, ctx: Option<&Arc<ScaleContext>>) -> Result<Cutoff> {
    match v {
        Value::String(s) if s == "inf" => Ok(Cutoff::Infinite),
        _ => Ok(Cutoff::Finite(exponent_from(v, path, ctx)?)),
    }
}

pub fn cutoff_to(c: &Cutoff) -> Value {
    match c {
        Cutoff::Infinite => Value::String("inf".into()),
        Cutoff::Finite(e) => exponent_to(e),
    }
}

pub fn series_from(v: &Value, path: &str, ctx: Option<&Arc<ScaleContext>>) -> Result<TruncatedHahnSeries> {
    let terms = term_list(field(v, "terms", path)?, &format!("{path}.terms"), ctx)?;
    let cutoff = match v.get("cutoff") {
        Some(c) => cutoff_from(c, &format!("{path}.cutoff"), ctx)?,
        None => Cutoff::Infinite,
    };
    if let Cutoff::Finite(t) = &cutoff {
        for (e, _) in &terms {
            if e.try_cmp(t)?.is_ge() {
                return Err(Error::parse(path, format!("term {e} is not below the cutoff {t}")));
            }
        }
    }
    Ok(TruncatedHahnSeries::new(terms, cutoff))
}

pub fn series_to(f: &TruncatedHahnSeries) -> Value {
    json!({ "terms": terms_to(f.terms()), "cutoff": cutoff_to(f.cutoff()) })
}

pub fn fracpoly_from(v: &Value, path: &str) -> Result<FracPoly> {
    FracPoly::new(TruncatedHahnSeries::new(term_list(v, path, None)?, Cutoff::Infinite))
        .map_err(|e| Error::parse(path, e.to_string()))
}

pub fn fracpoly_to(p: &FracPoly) -> Value {
    terms_to(p.series().terms())
}

pub fn base_from(v: &Value, path: &str, ctx: Option<&Arc<ScaleContext>>) -> Result<Base> {
    if let Some(sym) = v.get("symbol") {
        let pow = match v.get("pow") {
            Some(pw) => {
                let a = array(pw, path)?;
                if a.len() != 2 {
                    return Err(Error::parse(path, "`pow` must be [n, m]"));
                }
                (small_int(&a[0], path)? as i32, small_int(&a[1], path)? as i32)
            }
            None => match sym.as_str() {
                Some("alpha") => (1, 0),
                Some("beta") => (0, 1),
                _ => return Err(Error::parse(path, "symbol must be `alpha` or `beta`")),
            },
        };
        return Ok(Base::Symbolic { pow, ctx: ctx.cloned() });
    }
    let p = rational_from(field(v, "p", path)?, path)?;
    let q = match v.get("q") {
        Some(q) => rational_from(q, path)?,
        None => Rational::from_integer(1.into()),
    };
    if !p.is_integer() || !q.is_integer() {
        return Err(Error::parse(path, "`p` and `q` must be integers"));
    }
    let r = p / q;
    Ok(Base::Rational(crate::exponent::RationalScale::from_rational(&r)?))
}

pub fn base_to(b: &Base) -> Value {
    match b {
        Base::Rational(r) => json!({"p": r.p().to_string(), "q": r.q().to_string()}),
        Base::Symbolic { pow, .. } => json!({"symbol": "alpha", "pow": [pow.0, pow.1]}),
    }
}

pub fn equation_from(v: &Value, path: &str, ctx: Option<&Arc<ScaleContext>>) -> Result<MahlerEquation> {
    let base = base_from(field(v, "base", path)?, &format!("{path}.base"), ctx)?;
    let coeffs = array(field(v, "coeffs", path)?, path)?
        .iter()
        .enumerate()
        .map(|(i, c)| fracpoly_from(c, &format!("{path}.coeffs[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let rhs = match v.get("rhs") {
        Some(r) => fracpoly_from(r, &format!("{path}.rhs"))?,
        None => FracPoly::zero(),
    };
    MahlerEquation::new(base, coeffs, rhs)
}

pub fn equation_to(eq: &MahlerEquation) -> Value {
    json!({
        "base": base_to(eq.base()),
        "coeffs": eq.coeffs().iter().map(fracpoly_to).collect::<Vec<_>>(),
        "rhs": fracpoly_to(eq.rhs()),
    })
}

pub fn certificate_from(v: &Value, path: &str) -> Result<RationalCertificate> {
    Ok(RationalCertificate {
        numerator: fracpoly_from(field(v, "U", path)?, &format!("{path}.U"))?,
        denominator: fracpoly_from(field(v, "V", path)?, &format!("{path}.V"))?,
        theta: cutoff_from(field(v, "theta", path)?, &format!("{path}.theta"), None)?,
    })
}

pub fn certificate_to(c: &RationalCertificate) -> Value {
    json!({"U": fracpoly_to(&c.numerator), "V": fracpoly_to(&c.denominator), "theta": cutoff_to(&c.theta)})
}

pub fn verdict_to(v: &Verdict) -> Value {
    let mut m = Map::new();
    match v {
        Verdict::Verified(c) => {
            m.insert("verdict".into(), "verified".into());
            m.insert("cutoff".into(), cutoff_to(c));
        }
        Verdict::Refuted { at, coeff } => {
            m.insert("verdict".into(), "refuted".into());
            m.insert("at".into(), exponent_to(at));
            m.insert("coeff".into(), rational_to(coeff));
        }
        Verdict::Inconclusive(why) => {
            m.insert("verdict".into(), "inconclusive".into());
            m.insert("reason".into(), why.clone().into());
        }
    }
    Value::Object(m)
}

/// Seeds `[[exp, coeff], ...]` for the solver.
pub fn seeds_from(v: &Value, path: &str, ctx: Option<&Arc<ScaleContext>>) -> Result<Vec<(Exponent, Rational)>> {
    term_list(v, path, ctx)
}
