//! Lattices `Λ ⊂ ℂⁿ`, their adapted normal form, and the invariant Kähler
//! cone modulo exact forms.
//!
//! Coordinates: a complex vector `z` is embedded in ℝ^{2n} as
//! `(Re z_1, …, Re z_n, Im z_1, …, Im z_n)`. A hermitian form acts as
//! `ω(u, v) = uᵀ ω v̄`. In adapted coordinates `z = P z'` the form becomes
//! `Pᵀ ω P̄`, and the blocks are ordered `k | l | m`.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::metric::HermitianMatrix;
use crate::symkernel::linalg::{scalar_inverse, scalar_rank, solve_linear, LinearSolution};
use crate::symkernel::{ExactScalar, ScalarMatrix};

const FORM_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeData {
    n: usize,
    generators: Vec<Vec<ExactScalar>>,
}

impl LatticeData {
    /// An empty generator list is allowed (the trivial lattice).
    pub fn new(n: usize, generators: Vec<Vec<ExactScalar>>) -> Result<LatticeData> {
        for g in &generators {
            if g.len() != n {
                return Err(Error::Invalid(format!(
                    "generator has {} entries, expected {n}",
                    g.len()
                )));
            }
            if g.iter().all(Zero::is_zero) {
                return Err(Error::Invalid("zero lattice generator".into()));
            }
        }
        Ok(LatticeData { n, generators })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Vec<ExactScalar>] {
        &self.generators
    }

    /// The standard torus-type lattice `{i·e_1, …, i·e_n}`.
    pub fn torus_type(n: usize) -> LatticeData {
        let gens = (0..n)
            .map(|j| {
                (0..n)
                    .map(|i| if i == j { ExactScalar::i() } else { ExactScalar::zero() })
                    .collect()
            })
            .collect();
        LatticeData { n, generators: gens }
    }
}

fn to_real(z: &[ExactScalar]) -> Vec<ExactScalar> {
    z.iter()
        .map(|c| ExactScalar::real(c.re.clone()))
        .chain(z.iter().map(|c| ExactScalar::real(c.im.clone())))
        .collect()
}

fn from_real(x: &[ExactScalar]) -> Vec<ExactScalar> {
    let n = x.len() / 2;
    (0..n)
        .map(|i| ExactScalar::new(x[i].re.clone(), x[n + i].re.clone()))
        .collect()
}

/// Multiplication by `i` on the real embedding: `(x, y) ↦ (−y, x)`.
fn j_real(x: &[ExactScalar]) -> Vec<ExactScalar> {
    let n = x.len() / 2;
    (0..n).map(|i| -&x[n + i]).chain((0..n).map(|i| x[i].clone())).collect()
}

fn null_space(a: &ScalarMatrix, cols: usize) -> Vec<Vec<ExactScalar>> {
    if a.is_empty() {
        return (0..cols)
            .map(|j| {
                (0..cols)
                    .map(|i| {
                        if i == j {
                            ExactScalar::one()
                        } else {
                            ExactScalar::zero()
                        }
                    })
                    .collect()
            })
            .collect();
    }
    match solve_linear(a, &vec![ExactScalar::zero(); a.len()]) {
        LinearSolution::Consistent { null_space, .. } => null_space,
        LinearSolution::Inconsistent => unreachable!("homogeneous systems are consistent"),
    }
}

fn rank(rows: &[Vec<ExactScalar>]) -> usize {
    if rows.is_empty() {
        0
    } else {
        scalar_rank(&rows.to_vec())
    }
}

/// Rows that raise the rank, in order.
fn greedy_extend(
    mut chosen: Vec<Vec<ExactScalar>>,
    candidates: impl IntoIterator<Item = Vec<ExactScalar>>,
    target: usize,
) -> Vec<Vec<ExactScalar>> {
    for c in candidates {
        if chosen.len() >= target {
            break;
        }
        chosen.push(c);
        if rank(&chosen) < chosen.len() {
            chosen.pop();
        }
    }
    chosen
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalForm {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub m: usize,
    /// Columns are the adapted basis: a complex basis of `Λ_ℝ ∩ iΛ_ℝ`, then
    /// real lattice vectors, then standard vectors.
    pub p: ScalarMatrix,
    /// `P⁻¹`: maps original coordinates to adapted ones.
    pub t: ScalarMatrix,
}

pub fn normal_form(lat: &LatticeData) -> NormalForm {
    let n = lat.n;
    let real_gens: Vec<Vec<ExactScalar>> = lat.generators.iter().map(|g| to_real(g)).collect();
    let r = rank(&real_gens);
    let mut both = real_gens.clone();
    both.extend(real_gens.iter().map(|x| j_real(x)));
    let k = (2 * r - rank(&both)) / 2;
    let l = r - 2 * k;
    let m = n - k - l;

    // W = {x ∈ Λ_ℝ : Jx ∈ Λ_ℝ}. With B a basis of Λ_ℝ and N spanning its
    // orthogonal complement, x = aB lies in W iff Nᵀ J Bᵀ a = 0.
    let basis = greedy_extend(Vec::new(), real_gens.iter().cloned(), r);
    let complement = null_space(&basis, 2 * n);
    let jb: Vec<Vec<ExactScalar>> = basis.iter().map(|b| j_real(b)).collect();
    let cond: ScalarMatrix = complement
        .iter()
        .map(|nv| {
            jb.iter()
                .map(|x| {
                    nv.iter()
                        .zip(x)
                        .fold(ExactScalar::zero(), |acc, (a, b)| &acc + &(a * b))
                })
                .collect()
        })
        .collect();
    let w_real: Vec<Vec<ExactScalar>> = null_space(&cond, basis.len())
        .iter()
        .map(|a| {
            (0..2 * n)
                .map(|c| {
                    a.iter()
                        .zip(&basis)
                        .fold(ExactScalar::zero(), |acc, (ai, b)| &acc + &(ai * &b[c]))
                })
                .collect()
        })
        .collect();

    let mut cols = greedy_extend(Vec::new(), w_real.iter().map(|x| from_real(x)), k);
    debug_assert_eq!(cols.len(), k);
    cols = greedy_extend(cols, lat.generators.iter().cloned(), k + l);
    let std = (0..n).map(|j| {
        (0..n)
            .map(|i| {
                if i == j {
                    ExactScalar::one()
                } else {
                    ExactScalar::zero()
                }
            })
            .collect()
    });
    cols = greedy_extend(cols, std, n);
    let p: ScalarMatrix = (0..n).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
    let t = scalar_inverse(&p).expect("adapted basis is invertible");
    NormalForm { n, k, l, m, p, t }
}

impl NormalForm {
    pub fn is_semi_torus(&self) -> bool {
        self.m == 0
    }

    /// `T λ`.
    pub fn adapt_vector(&self, v: &[ExactScalar]) -> Vec<ExactScalar> {
        self.t
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(ExactScalar::zero(), |acc, (a, b)| &acc + &(a * b))
            })
            .collect()
    }

    /// `Pᵀ ω P̄`.
    pub fn to_adapted(&self, omega: &HermitianMatrix) -> Result<HermitianMatrix> {
        let n = self.n;
        let p = DMatrix::from_fn(n, n, |i, j| self.p[i][j].to_complex());
        let w = p.transpose() * omega.matrix() * p.map(|z| z.conj());
        let w = (&w + w.adjoint()) * Complex64::new(0.5, 0.0);
        HermitianMatrix::new(w)
    }
}

/// True iff the complex span of the generators is ℂⁿ.
pub fn semi_torus_check(lat: &LatticeData) -> bool {
    normal_form(lat).is_semi_torus()
}

/// Real-linear constraints `Im(λ_aᵀ ω λ̄_b) = 0` on the `n²` real parameters
/// of a hermitian `ω`. Parameter order: `ω_ii` for each `i`, then for each
/// `i < j` the pair `Re ω_ij, Im ω_ij`.
#[derive(Clone, Debug, PartialEq)]
pub struct StokesSystem {
    pub n: usize,
    /// One row per generator pair `a < b`, with rational entries.
    pub rows: ScalarMatrix,
    pub rank: usize,
    pub solution_dim: usize,
}

fn hermitian_param_basis(n: usize) -> Vec<Vec<Vec<ExactScalar>>> {
    let zero = || vec![vec![ExactScalar::zero(); n]; n];
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let mut e = zero();
        e[i][i] = ExactScalar::one();
        out.push(e);
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut re = zero();
            re[i][j] = ExactScalar::one();
            re[j][i] = ExactScalar::one();
            out.push(re);
            let mut im = zero();
            im[i][j] = ExactScalar::i();
            im[j][i] = -ExactScalar::i();
            out.push(im);
        }
    }
    out
}

/// Parameters of a hermitian matrix in the order of [`StokesSystem`].
pub fn hermitian_params(omega: &HermitianMatrix) -> Vec<f64> {
    let n = omega.n();
    let mut out: Vec<f64> = (0..n).map(|i| omega.get(i, i).re).collect();
    for i in 0..n {
        for j in i + 1..n {
            out.push(omega.get(i, j).re);
            out.push(omega.get(i, j).im);
        }
    }
    out
}

fn bilinear(u: &[ExactScalar], w: &[Vec<ExactScalar>], v: &[ExactScalar]) -> ExactScalar {
    let mut acc = ExactScalar::zero();
    for (i, ui) in u.iter().enumerate() {
        for (j, vj) in v.iter().enumerate() {
            acc += &(&(ui * &w[i][j]) * &vj.conj());
        }
    }
    acc
}

pub fn stokes_constraints(lat: &LatticeData) -> StokesSystem {
    let n = lat.n;
    let basis = hermitian_param_basis(n);
    let g = &lat.generators;
    let mut rows = Vec::new();
    for a in 0..g.len() {
        for b in a + 1..g.len() {
            rows.push(
                basis
                    .iter()
                    .map(|e| ExactScalar::real(bilinear(&g[a], e, &g[b]).im))
                    .collect(),
            );
        }
    }
    let rank = rank(&rows);
    StokesSystem {
        n,
        rows,
        rank,
        solution_dim: n * n - rank,
    }
}

impl StokesSystem {
    /// `rows · params(ω)`.
    pub fn apply(&self, omega: &HermitianMatrix) -> Vec<f64> {
        let p = hermitian_params(omega);
        self.rows
            .iter()
            .map(|r| r.iter().zip(&p).map(|(c, x)| c.to_complex().re * x).sum())
            .collect()
    }
}

/// `Im(λ_aᵀ ω λ̄_b)` for every generator pair, evaluated directly.
pub fn stokes_values(lat: &LatticeData, omega: &HermitianMatrix) -> Vec<f64> {
    let g: Vec<Vec<Complex64>> = lat
        .generators
        .iter()
        .map(|v| v.iter().map(ExactScalar::to_complex).collect())
        .collect();
    let mut out = Vec::new();
    for a in 0..g.len() {
        for b in a + 1..g.len() {
            let mut acc = Complex64::zero();
            for i in 0..lat.n {
                for j in 0..lat.n {
                    acc += g[a][i] * omega.get(i, j) * g[b][j].conj();
                }
            }
            out.push(acc.im);
        }
    }
    out
}

/// `n² − l(l+1)/2`; only asserted for semi-tori.
pub fn cone_dimension(nf: &NormalForm) -> Result<usize> {
    if nf.m != 0 {
        return Err(Error::NotSemiTorus { m: nf.m });
    }
    Ok(nf.n * nf.n - nf.l * (nf.l + 1) / 2)
}

/// A real quadratic form `φ(x) = xᵀ Q x` in `x = (X_1..X_n, Y_1..Y_n)`,
/// `z = X + iY`, together with `ω − i∂∂̄φ`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadPotential {
    pub n: usize,
    pub q: Vec<Vec<f64>>,
    pub residual: HermitianMatrix,
}

impl QuadPotential {
    /// The hermitian matrix `(∂_a ∂̄_b φ)`, constant for a quadratic form.
    pub fn levi(&self) -> HermitianMatrix {
        levi_form(&self.q, self.n)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (i, row) in self.q.iter().enumerate() {
            for (j, q) in row.iter().enumerate() {
                acc += x[i] * q * x[j];
            }
        }
        acc
    }
}

fn levi_form(q: &[Vec<f64>], n: usize) -> HermitianMatrix {
    let h = DMatrix::from_fn(n, n, |a, b| {
        Complex64::new(0.5 * (q[a][b] + q[n + a][n + b]), 0.5 * (q[a][n + b] - q[n + a][b]))
    });
    HermitianMatrix::new(h).expect("levi form of a symmetric Q is hermitian")
}

impl fmt::Display for QuadPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n;
        let name = |i: usize| {
            if i < n {
                format!("X{}", i + 1)
            } else {
                format!("Y{}", i - n + 1)
            }
        };
        let mut parts = Vec::new();
        for i in 0..2 * n {
            for j in i..2 * n {
                let c = if i == j { self.q[i][i] } else { 2.0 * self.q[i][j] };
                if c == 0.0 {
                    continue;
                }
                let mono = if i == j {
                    format!("{}^2", name(i))
                } else {
                    format!("{}*{}", name(i), name(j))
                };
                parts.push(format!("{c}*{mono}"));
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + ").replace("+ -", "- "))
        }
    }
}

fn block_max(
    w: &HermitianMatrix,
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
    part: fn(Complex64) -> f64,
) -> f64 {
    let mut worst: f64 = 0.0;
    for i in rows {
        for j in cols.clone() {
            worst = worst.max(part(w.get(i, j)).abs());
        }
    }
    worst
}

fn scale_of(w: &HermitianMatrix) -> f64 {
    w.matrix().iter().map(|z| z.norm()).fold(1.0, f64::max)
}

/// Potential for `ω` given in adapted coordinates. Requires a zero `k×k`
/// block, zero `k×l` block and real `l×l` block; the residual then vanishes
/// outside the `k×m` / `m×k` blocks, and identically when `m = 0`.
///
/// Per block (`ω_ij = a + ib`), the quadratic form is
/// - `l` diagonal: `2ω_ii Y_i²`; `l` pairs: `4ω_ij Y_i Y_j`
/// - `l×m`: `4a Y_i Y_j − 4b Y_i X_j`
/// - `m` diagonal: `ω_ii (X_i² + Y_i²)`; `m` pairs:
///   `2[a(X_iX_j + Y_iY_j) + b(X_iY_j − Y_iX_j)]`
///
/// which depends on the `l` coordinates only through their imaginary parts,
/// so it is invariant under the lattice.
pub fn build_potential(omega: &HermitianMatrix, nf: &NormalForm) -> Result<QuadPotential> {
    let n = nf.n;
    if omega.n() != n {
        return Err(Error::Invalid(format!(
            "form is {}×{}, lattice dimension {n}",
            omega.n(),
            omega.n()
        )));
    }
    let (k, l) = (nf.k, nf.l);
    let (kr, lr, mr) = (0..k, k..k + l, k + l..n);
    let tol = FORM_TOL * scale_of(omega);
    if block_max(omega, kr.clone(), kr.clone(), Complex64::norm) > tol {
        return Err(Error::PatternViolation("k×k block of the form is not zero".into()));
    }
    if block_max(omega, kr.clone(), lr.clone(), Complex64::norm) > tol {
        return Err(Error::PatternViolation("k×l block of the form is not zero".into()));
    }
    if block_max(omega, lr.clone(), lr.clone(), |z| z.im) > tol {
        return Err(Error::PatternViolation("l×l block of the form is not real".into()));
    }
    let mut q = vec![vec![0.0; 2 * n]; 2 * n];
    // symmetric entry for a coefficient c of the monomial x_u x_v
    let mut add = |u: usize, v: usize, c: f64| {
        if u == v {
            q[u][u] += c;
        } else {
            q[u][v] += c / 2.0;
            q[v][u] += c / 2.0;
        }
    };
    let (x, y) = (|i: usize| i, |i: usize| n + i);
    for i in lr.clone() {
        add(y(i), y(i), 2.0 * omega.get(i, i).re);
        for j in lr.clone().filter(|&j| j > i) {
            add(y(i), y(j), 4.0 * omega.get(i, j).re);
        }
        for j in mr.clone() {
            let w = omega.get(i, j);
            add(y(i), y(j), 4.0 * w.re);
            add(y(i), x(j), -4.0 * w.im);
        }
    }
    for i in mr.clone() {
        let d = omega.get(i, i).re;
        add(x(i), x(i), d);
        add(y(i), y(i), d);
        for j in mr.clone().filter(|&j| j > i) {
            let w = omega.get(i, j);
            add(x(i), x(j), 2.0 * w.re);
            add(y(i), y(j), 2.0 * w.re);
            add(x(i), y(j), 2.0 * w.im);
            add(y(i), x(j), -2.0 * w.im);
        }
    }
    let levi = levi_form(&q, n);
    let residual = HermitianMatrix::new(omega.matrix() - levi.matrix())?;
    // Residual may only live in the k×m and m×k blocks.
    for i in 0..n {
        for j in 0..n {
            let allowed = (kr.contains(&i) && mr.contains(&j)) || (mr.contains(&i) && kr.contains(&j));
            if !allowed && residual.get(i, j).norm() > tol {
                return Err(Error::PatternViolation(format!(
                    "residual entry ({i}, {j}) is not zero"
                )));
            }
        }
    }
    Ok(QuadPotential { n, q, residual })
}

/// A class in the cone: the representative in adapted coordinates with the
/// real part of its `l×l` block removed.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeClass {
    pub representative: HermitianMatrix,
    pub k: usize,
    pub l: usize,
}

impl Serialize for ConeClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.representative.serialize(s)
    }
}

/// `omega` in adapted coordinates.
pub fn class_project(omega: &HermitianMatrix, nf: &NormalForm) -> Result<ConeClass> {
    if nf.m != 0 {
        return Err(Error::NotSemiTorus { m: nf.m });
    }
    if omega.n() != nf.n {
        return Err(Error::Invalid("form and lattice dimensions differ".into()));
    }
    let mut w = omega.matrix().clone();
    for i in nf.k..nf.k + nf.l {
        for j in nf.k..nf.k + nf.l {
            w[(i, j)].re = 0.0;
        }
    }
    Ok(ConeClass {
        representative: HermitianMatrix::new(w)?,
        k: nf.k,
        l: nf.l,
    })
}

/// Equal canonical representatives, up to `1e-12` relative to the entries.
pub fn class_equal(a: &ConeClass, b: &ConeClass) -> bool {
    if (a.k, a.l) != (b.k, b.l) || a.representative.n() != b.representative.n() {
        return false;
    }
    let tol = FORM_TOL * scale_of(&a.representative).max(scale_of(&b.representative));
    a.representative.max_abs_diff(&b.representative) <= tol
}

/// `C(r) = [[cosh r, i sinh r], [−i sinh r, cosh r]]`, one representative
/// per class of the two-dimensional torus-type cone.
pub fn c_family(r: f64) -> HermitianMatrix {
    let (c, s) = (r.cosh(), r.sinh());
    HermitianMatrix::from_rows(&[
        vec![Complex64::new(c, 0.0), Complex64::new(0.0, s)],
        vec![Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
    ])
    .expect("C(r) is hermitian")
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConeDim {
    Asserted(usize),
    NotAsserted,
}

impl Serialize for ConeDim {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ConeDim::Asserted(d) => s.serialize_u64(*d as u64),
            ConeDim::NotAsserted => s.serialize_str("n/a"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeReport {
    pub k: usize,
    pub l: usize,
    pub m: usize,
    /// Same number as `m`: the count of additive ℂ-factors of the group.
    pub complex_factors: usize,
    pub semi_torus: bool,
    pub cone_dim: ConeDim,
    pub stokes_dim: usize,
}

pub fn cone_report(lat: &LatticeData) -> ConeReport {
    let nf = normal_form(lat);
    ConeReport {
        k: nf.k,
        l: nf.l,
        m: nf.m,
        complex_factors: nf.m,
        semi_torus: nf.is_semi_torus(),
        cone_dim: cone_dimension(&nf).map_or(ConeDim::NotAsserted, ConeDim::Asserted),
        stokes_dim: stokes_constraints(lat).solution_dim,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re: i64, im: i64) -> ExactScalar {
        ExactScalar::gaussian(re, im)
    }

    fn lat(n: usize, gens: Vec<Vec<ExactScalar>>) -> LatticeData {
        LatticeData::new(n, gens).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn herm(rows: &[&[Complex64]]) -> HermitianMatrix {
        HermitianMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn assert_pattern(nf: &NormalForm, lat: &LatticeData) {
        for v in lat.generators() {
            let a = nf.adapt_vector(v);
            for (i, z) in a.iter().enumerate() {
                if i >= nf.k + nf.l {
                    assert!(z.is_zero());
                } else if i >= nf.k {
                    assert!(z.is_real());
                }
            }
        }
    }

    #[test]
    fn normal_form_examples() {
        let t = LatticeData::torus_type(2);
        let nf = normal_form(&t);
        assert_eq!((nf.k, nf.l, nf.m), (0, 2, 0));
        assert_pattern(&nf, &t);

        let a = lat(
            2,
            vec![vec![g(1, 0), g(0, 0)], vec![g(0, 1), g(0, 0)], vec![g(0, 0), g(0, 1)]],
        );
        let nf = normal_form(&a);
        assert_eq!((nf.k, nf.l, nf.m), (1, 1, 0));
        assert_pattern(&nf, &a);

        let b = lat(2, vec![vec![g(0, 1), g(0, 0)]]);
        let nf = normal_form(&b);
        assert_eq!((nf.k, nf.l, nf.m), (0, 1, 1));
        assert_pattern(&nf, &b);

        // complex line spanned by a non-coordinate vector
        let d = lat(
            2,
            vec![vec![g(1, 0), g(1, 0)], vec![g(0, 1), g(0, 1)], vec![g(1, 1), g(0, 3)]],
        );
        let nf = normal_form(&d);
        assert_eq!((nf.k, nf.l, nf.m), (1, 1, 0));
        assert_pattern(&nf, &d);
    }

    #[test]
    fn semi_torus_examples() {
        assert!(semi_torus_check(&LatticeData::torus_type(2)));
        assert!(!semi_torus_check(&lat(2, vec![vec![g(0, 1), g(0, 0)]])));
        let full = lat(
            2,
            vec![
                vec![g(1, 0), g(0, 0)],
                vec![g(0, 1), g(0, 0)],
                vec![g(0, 0), g(1, 0)],
                vec![g(0, 0), g(0, 1)],
            ],
        );
        assert!(semi_torus_check(&full));
        assert_eq!(cone_dimension(&normal_form(&full)), Ok(4));
        assert!(!semi_torus_check(&lat(2, vec![])));
    }

    #[test]
    fn stokes_examples() {
        assert_eq!(stokes_constraints(&LatticeData::torus_type(2)).solution_dim, 3);
        assert_eq!(
            stokes_constraints(&lat(2, vec![vec![g(0, 1), g(0, 0)]])).solution_dim,
            4
        );
        let t = LatticeData::torus_type(2);
        let sys = stokes_constraints(&t);
        for r in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            let w = c_family(r);
            let direct = stokes_values(&t, &w);
            let via = sys.apply(&w);
            assert_eq!(direct.len(), via.len());
            for (a, b) in direct.iter().zip(&via) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cone_dimension_examples() {
        assert_eq!(cone_dimension(&normal_form(&LatticeData::torus_type(2))), Ok(1));
        assert_eq!(cone_dimension(&normal_form(&LatticeData::torus_type(3))), Ok(3));
        let r = cone_report(&lat(2, vec![vec![g(0, 1), g(0, 0)]]));
        assert_eq!(r.cone_dim, ConeDim::NotAsserted);
        assert_eq!(serde_json::to_value(&r.cone_dim).unwrap(), serde_json::json!("n/a"));
    }

    #[test]
    fn potential_examples() {
        let nf = normal_form(&LatticeData::torus_type(2));
        let p = build_potential(&HermitianMatrix::identity(2), &nf).unwrap();
        assert_eq!(p.to_string(), "2*Y1^2 + 2*Y2^2");
        assert_eq!(
            p.residual.max_abs_diff(&herm(&[&[c(0.0, 0.0); 2], &[c(0.0, 0.0); 2]])),
            0.0
        );

        let zero = herm(&[&[c(0.0, 0.0); 2], &[c(0.0, 0.0); 2]]);
        let p = build_potential(&zero, &nf).unwrap();
        assert_eq!(p.to_string(), "0");

        assert!(matches!(
            build_potential(&c_family(1.0), &nf),
            Err(Error::PatternViolation(_))
        ));
    }

    #[test]
    fn potential_with_free_block() {
        // k = 0, l = 2, m = 1: only l×m entries
        let l = lat(
            3,
            vec![vec![g(0, 1), g(0, 0), g(0, 0)], vec![g(0, 0), g(0, 1), g(0, 0)]],
        );
        let nf = normal_form(&l);
        assert_eq!((nf.k, nf.l, nf.m), (0, 2, 1));
        let z = c(0.0, 0.0);
        let w = herm(&[
            &[z, z, c(1.0, 2.0)],
            &[z, z, c(-3.0, 0.5)],
            &[c(1.0, -2.0), c(-3.0, -0.5), z],
        ]);
        let p = build_potential(&w, &nf).unwrap();
        assert_eq!(p.residual.max_abs_diff(&herm(&[&[z; 3], &[z; 3], &[z; 3]])), 0.0);
        // the potential is invariant under real shifts of the l coordinates
        let x = [0.3, -0.7, 1.1, 0.2, 0.5, -0.4];
        let mut shifted = x;
        shifted[0] += 5.0;
        shifted[1] -= 2.0;
        assert!((p.eval(&x) - p.eval(&shifted)).abs() < 1e-12);

        // k = 1, l = 0, m = 1: the k×m entry is left in the residual
        let l = lat(2, vec![vec![g(1, 0), g(0, 0)], vec![g(0, 1), g(0, 0)]]);
        let nf = normal_form(&l);
        assert_eq!((nf.k, nf.l, nf.m), (1, 0, 1));
        let w = herm(&[&[z, c(2.0, 1.0)], &[c(2.0, -1.0), c(3.0, 0.0)]]);
        let p = build_potential(&w, &nf).unwrap();
        assert_eq!(p.residual.get(0, 1), c(2.0, 1.0));
        assert_eq!(p.residual.get(1, 1), z);
    }

    #[test]
    fn class_examples() {
        let nf = normal_form(&LatticeData::torus_type(2));
        let eq = |a: &HermitianMatrix, b: &HermitianMatrix| {
            class_equal(&class_project(a, &nf).unwrap(), &class_project(b, &nf).unwrap())
        };
        let b = herm(&[&[c(2.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0), c(2.0, 0.0)]]);
        assert!(eq(&HermitianMatrix::identity(2), &b));
        assert!(!eq(&c_family(0.0), &c_family(1.0)));
        assert!(eq(&c_family(1.0), &c_family(1.0)));
        let nf_b = normal_form(&lat(2, vec![vec![g(0, 1), g(0, 0)]]));
        assert!(matches!(class_project(&b, &nf_b), Err(Error::NotSemiTorus { m: 1 })));
    }

    #[test]
    fn adapted_form_transport() {
        // Stokes values are coordinate independent.
        let d = lat(
            2,
            vec![vec![g(1, 0), g(1, 0)], vec![g(0, 1), g(0, 1)], vec![g(1, 1), g(0, 3)]],
        );
        let nf = normal_form(&d);
        let w = herm(&[&[c(2.0, 0.0), c(0.5, -1.0)], &[c(0.5, 1.0), c(3.0, 0.0)]]);
        let wa = nf.to_adapted(&w).unwrap();
        let adapted = LatticeData::new(2, d.generators().iter().map(|v| nf.adapt_vector(v)).collect()).unwrap();
        for (a, b) in stokes_values(&d, &w).iter().zip(stokes_values(&adapted, &wa)) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
