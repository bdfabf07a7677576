//! Exact linear algebra over ℚ(i), ℚ(i)[z] and ℚ(i)(z).

#![allow(clippy::needless_range_loop)]

use num_traits::{One, Zero};

use super::gcd::poly_gcd;
use super::poly::{Poly, Vars};
use super::ratfunc::RatFunc;
use super::scalar::ExactScalar;
use crate::error::{Error, Result};

pub type ScalarMatrix = Vec<Vec<ExactScalar>>;
pub type PolyMatrix = Vec<Vec<Poly>>;
pub type RatMatrix = Vec<Vec<RatFunc>>;

/// Determinant by fraction-free (Bareiss) elimination. Every division is exact.
pub fn poly_det(m: &PolyMatrix) -> Poly {
    let n = m.len();
    let vars = common_vars(m);
    if n == 0 {
        return Poly::one(vars);
    }
    let mut a: PolyMatrix = m
        .iter()
        .map(|row| row.iter().map(|p| p.with_vars(&vars)).collect())
        .collect();
    let mut negate = false;
    let mut prev = Poly::one(vars.clone());
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    negate = !negate;
                }
                None => return Poly::zero(vars),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = a[i][j].mul(&a[k][k]).sub(&a[i][k].mul(&a[k][j]));
                a[i][j] = t.exact_div(&prev).expect("Bareiss division is exact");
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        d.neg()
    } else {
        d
    }
}

fn common_vars(m: &PolyMatrix) -> Vars {
    let mut names: Vec<String> = Vec::new();
    for p in m.iter().flatten() {
        for v in p.vars().iter() {
            if !names.contains(v) {
                names.push(v.clone());
            }
        }
    }
    names.into()
}

fn rat_common_vars(m: &RatMatrix) -> Vars {
    let mut names: Vec<String> = Vec::new();
    for r in m.iter().flatten() {
        for v in r.vars().iter() {
            if !names.contains(v) {
                names.push(v.clone());
            }
        }
    }
    names.into()
}

pub fn to_ratmatrix(m: &PolyMatrix) -> RatMatrix {
    let vars = common_vars(m);
    m.iter()
        .map(|row| row.iter().map(|p| RatFunc::from_poly(p.with_vars(&vars))).collect())
        .collect()
}

/// Each row multiplied by the lcm of its denominators, with those lcms.
fn clear_rows(m: &RatMatrix, vars: &Vars) -> (PolyMatrix, Vec<Poly>) {
    let mut rows = Vec::with_capacity(m.len());
    let mut dens = Vec::with_capacity(m.len());
    for row in m {
        let l = row.iter().fold(Poly::one(vars.clone()), |l, r| {
            let d = r.den().with_vars(vars);
            let g = poly_gcd(&l, &d);
            l.mul(&d.exact_div(&g).expect("gcd divides"))
        });
        rows.push(
            row.iter()
                .map(|r| {
                    let scale = l.exact_div(&r.den().with_vars(vars)).expect("lcm is a multiple");
                    r.num().with_vars(vars).mul(&scale)
                })
                .collect(),
        );
        dens.push(l);
    }
    (rows, dens)
}

fn minor(m: &PolyMatrix, row: usize, col: usize) -> PolyMatrix {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|(j, _)| *j != col)
                .map(|(_, p)| p.clone())
                .collect()
        })
        .collect()
}

/// Inverse over the rational function field via the adjugate of the
/// row-cleared matrix: `M = D⁻¹P` gives `M⁻¹ = adj(P) D / det P`, so each
/// entry needs a single reduction.
pub fn ratmat_inverse(m: &RatMatrix) -> Result<RatMatrix> {
    let n = m.len();
    let vars = rat_common_vars(m);
    let (p, dens) = clear_rows(m, &vars);
    let det = poly_det(&p);
    if det.is_zero() {
        return Err(Error::SingularMatrix);
    }
    if n == 1 {
        return Ok(vec![vec![
            RatFunc::new(dens[0].clone(), det).expect("nonzero determinant")
        ]]);
    }
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let cof = poly_det(&minor(&p, j, i));
                    let cof = if (i + j) % 2 == 1 { cof.neg() } else { cof };
                    RatFunc::new(cof.mul(&dens[j]), det.clone()).expect("nonzero determinant")
                })
                .collect()
        })
        .collect())
}

pub fn ratmat_mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let vars = rat_common_vars(a);
    let n = a.len();
    let p = b.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            (0..p)
                .map(|j| {
                    a[i].iter()
                        .zip(b)
                        .fold(RatFunc::zero(vars.clone()), |acc, (x, row)| acc.add(&x.mul(&row[j])))
                })
                .collect()
        })
        .collect()
}

pub fn ratmat_det(m: &RatMatrix) -> RatFunc {
    let vars = rat_common_vars(m);
    let (p, dens) = clear_rows(m, &vars);
    let den = dens.iter().fold(Poly::one(vars.clone()), |acc, d| acc.mul(d));
    RatFunc::new(poly_det(&p), den).expect("denominators are nonzero")
}

/// Rank over the rational function field.
pub fn ratmat_rank(m: &RatMatrix) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut a = m.to_vec();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, piv);
        let p = a[rank][c].inv().unwrap();
        for i in rank + 1..rows {
            if a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].mul(&p);
            for j in c..cols {
                a[i][j] = a[i][j].sub(&f.mul(&a[rank][j]));
            }
        }
        rank += 1;
    }
    rank
}

/// Outcome of [`solve_linear`].
#[derive(Clone, Debug, PartialEq)]
pub enum LinearSolution {
    Consistent {
        particular: Vec<ExactScalar>,
        null_space: Vec<Vec<ExactScalar>>,
    },
    Inconsistent,
}

impl LinearSolution {
    pub fn is_unique(&self) -> bool {
        matches!(self, LinearSolution::Consistent { null_space, .. } if null_space.is_empty())
    }
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(a: &mut ScalarMatrix, cols: usize) -> Vec<usize> {
    let rows = a.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, piv);
        let p = a[r][c].inv().unwrap();
        for x in a[r].iter_mut() {
            *x = &*x * &p;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                let (src, dst) = if i < r {
                    let (lo, hi) = a.split_at_mut(r);
                    (&hi[0], &mut lo[i])
                } else {
                    let (lo, hi) = a.split_at_mut(i);
                    (&lo[r], &mut hi[0])
                };
                for (d, s) in dst.iter_mut().zip(src) {
                    *d -= &(&f * s);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Exact Gaussian elimination for `A x = b`: a particular solution plus a
/// null-space basis, or `Inconsistent`.
pub fn solve_linear(a: &ScalarMatrix, b: &[ExactScalar]) -> LinearSolution {
    assert_eq!(a.len(), b.len());
    let cols = a.first().map_or(0, Vec::len);
    let mut aug: ScalarMatrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug, cols + 1);
    if pivots.last() == Some(&cols) {
        return LinearSolution::Inconsistent;
    }
    let mut particular = vec![ExactScalar::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        particular[c] = aug[r][cols].clone();
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let null_space = free
        .iter()
        .map(|&f| {
            let mut v = vec![ExactScalar::zero(); cols];
            v[f] = ExactScalar::one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -&aug[r][f];
            }
            v
        })
        .collect();
    LinearSolution::Consistent { particular, null_space }
}

pub fn scalar_rank(a: &ScalarMatrix) -> usize {
    let cols = a.first().map_or(0, Vec::len);
    let mut m = a.clone();
    rref(&mut m, cols).len()
}

pub fn scalar_det(a: &ScalarMatrix) -> ExactScalar {
    let n = a.len();
    let mut m = a.clone();
    let mut det = ExactScalar::one();
    for k in 0..n {
        let Some(piv) = (k..n).find(|&r| !m[r][k].is_zero()) else {
            return ExactScalar::zero();
        };
        if piv != k {
            m.swap(k, piv);
            det = -det;
        }
        det = &det * &m[k][k];
        let p = m[k][k].inv().unwrap();
        for i in k + 1..n {
            let f = &m[i][k] * &p;
            if f.is_zero() {
                continue;
            }
            for j in k..n {
                let t = &f * &m[k][j];
                m[i][j] -= &t;
            }
        }
    }
    det
}

pub fn scalar_inverse(a: &ScalarMatrix) -> Option<ScalarMatrix> {
    let n = a.len();
    let mut aug: ScalarMatrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    ExactScalar::one()
                } else {
                    ExactScalar::zero()
                }
            }));
            r
        })
        .collect();
    let piv = rref(&mut aug, n);
    if piv.len() < n {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn scalar_mul(a: &ScalarMatrix, b: &ScalarMatrix) -> ScalarMatrix {
    let p = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..p)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .fold(ExactScalar::zero(), |acc, (x, r)| &acc + &(x * &r[j]))
                })
                .collect()
        })
        .collect()
}
