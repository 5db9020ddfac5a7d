//! Exact kernels: Gauss-Jordan over Q and fraction-free (Bareiss)
//! elimination over Q[y].

use num_traits::{One, Zero};

use crate::poly::{content_of, DensePoly, RatFunc};
use crate::rational::Rational;

/// Right kernel basis of a rational matrix given by rows, one vector per
/// free column (free entry 1, other free entries 0).
pub fn rational_kernel(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = rows.iter().filter(|r| r.iter().any(|c| !c.is_zero())).cloned().collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][col].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, y) in row.iter_mut().zip(pivot_row.iter()) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); ncols];
            v[f] = Rational::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[i][f].clone();
            }
            v
        })
        .collect()
}

/// Fraction-free row echelon form in place; returns the pivot columns.
///
/// Every division performed is exact: after step k each remaining entry is
/// a (k+1)-minor of the input.
pub fn bareiss_echelon(m: &mut [Vec<DensePoly>]) -> Vec<usize> {
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut prev = DensePoly::one();
    let mut r = 0;
    for col in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..nrows {
            for j in col + 1..ncols {
                let t = m[r][col].mul(&m[i][j]).sub(&m[i][col].mul(&m[r][j]));
                m[i][j] = t.exact_div(&prev).expect("Bareiss step divides exactly");
            }
            m[i][col] = DensePoly::zero();
        }
        prev = m[r][col].clone();
        pivots.push(col);
        r += 1;
    }
    pivots
}

/// Right kernel basis over Q(y) of a polynomial matrix, each vector cleared
/// to coprime polynomial entries with integer coefficients.
pub fn poly_kernel(rows: &[Vec<DensePoly>], ncols: usize) -> Vec<Vec<DensePoly>> {
    let mut m = rows.to_vec();
    let pivots = bareiss_echelon(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let mut out = Vec::new();
    for &f in &free {
        let mut v: Vec<RatFunc> = vec![RatFunc::from_poly(DensePoly::zero()); ncols];
        v[f] = RatFunc::from_poly(DensePoly::one());
        for (i, &pc) in pivots.iter().enumerate().rev() {
            let mut acc = RatFunc::from_poly(DensePoly::zero());
            for j in pc + 1..ncols {
                if !m[i][j].is_zero() && !v[j].is_zero() {
                    acc = acc.add(&RatFunc::from_poly(m[i][j].clone()).mul(&v[j]));
                }
            }
            v[pc] = acc.neg().div(&RatFunc::from_poly(m[i][pc].clone()));
        }
        out.push(clear_denominators(&v));
    }
    out
}

/// Multiplies a vector of rational functions by the lcm of its denominators,
/// then removes the polynomial gcd and the rational content of the entries.
pub fn clear_denominators(v: &[RatFunc]) -> Vec<DensePoly> {
    let mut l = DensePoly::one();
    for x in v {
        if !x.is_zero() {
            let g = DensePoly::gcd(&l, &x.den);
            l = l.mul(&x.den).exact_div(&g).unwrap();
        }
    }
    let polys: Vec<DensePoly> = v
        .iter()
        .map(|x| if x.is_zero() { DensePoly::zero() } else { x.num.mul(&l.exact_div(&x.den).unwrap()) })
        .collect();
    primitive_vector(&polys)
}

/// Divides out the polynomial gcd and the rational content, leaving coprime
/// integer-coefficient polynomials.
pub fn primitive_vector(v: &[DensePoly]) -> Vec<DensePoly> {
    let g = v.iter().fold(DensePoly::zero(), |g, p| DensePoly::gcd(&g, p));
    if g.is_zero() {
        return v.to_vec();
    }
    let reduced: Vec<DensePoly> = v.iter().map(|p| p.exact_div(&g).unwrap()).collect();
    let c = content_of(reduced.iter().flat_map(|p| p.coeffs().iter()));
    reduced.iter().map(|p| p.scale(&c.recip())).collect()
}
