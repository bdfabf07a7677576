//! The hermitian metric `g = σσ*` with `σ = S⁻¹`, and checks of its
//! Ricci-flatness, closedness and completeness.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fields::FieldBasis;
use crate::symkernel::linalg::{scalar_det, to_ratmatrix};
use crate::symkernel::{
    poly_det, ratmat_det, ratmat_inverse, squarefree_decompose, ExactScalar, NumPoly, Poly, RatFunc, RatMatrix,
};

pub const DEFAULT_FLOOR: f64 = 1e-9;
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Tunables shared by every probe; echoed verbatim into reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeConfig {
    pub seed: u64,
    /// Finite-difference step of the Ricci probe.
    pub h: f64,
    /// Number of dyadic blocks in the completeness probe.
    pub depth: usize,
    pub floor: f64,
    pub ricci_points: usize,
    pub ricci_tol: f64,
    pub exact_points: usize,
    pub divisor_points: usize,
    pub divergence_threshold: f64,
    pub finite_ratio: f64,
    pub tail: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            seed: 0,
            h: 1e-4,
            depth: 24,
            floor: DEFAULT_FLOOR,
            ricci_points: 20,
            ricci_tol: 1e-5,
            exact_points: 100,
            divisor_points: 3,
            divergence_threshold: 1e-3,
            finite_ratio: 0.75,
            tail: 5,
        }
    }
}

#[derive(Clone, Debug)]
struct CompiledRat {
    num: NumPoly,
    den: NumPoly,
}

impl CompiledRat {
    fn new(r: &RatFunc) -> Self {
        CompiledRat {
            num: r.num().compile(),
            den: r.den().compile(),
        }
    }

    fn eval(&self, p: &[Complex64]) -> Complex64 {
        self.num.eval(p) / self.den.eval(p)
    }
}

#[derive(Clone, Debug)]
pub struct MetricModel {
    basis: FieldBasis,
    sigma: RatMatrix,
    det_sigma: RatFunc,
    det_s: Poly,
    /// Product of the distinct square-free factors of `det S`.
    reduced_det: Poly,
    sigma_num: Vec<Vec<CompiledRat>>,
    det_num: NumPoly,
}

pub fn build_metric(b: &FieldBasis) -> Result<MetricModel> {
    let s = b.matrix();
    let det_s = poly_det(&s);
    if det_s.is_zero() {
        return Err(Error::DegenerateBasis);
    }
    let sigma = ratmat_inverse(&to_ratmatrix(&s)).map_err(|_| Error::DegenerateBasis)?;
    let det_sigma = RatFunc::from_poly(det_s.clone()).inv().expect("nonzero determinant");
    let sf = squarefree_decompose(&det_s);
    let reduced_det = sf
        .factors
        .iter()
        .fold(Poly::one(det_s.vars().clone()), |acc, (p, _)| acc.mul(p));
    Ok(MetricModel {
        sigma_num: sigma.iter().map(|r| r.iter().map(CompiledRat::new).collect()).collect(),
        det_num: det_s.compile(),
        basis: b.clone(),
        sigma,
        det_sigma,
        det_s,
        reduced_det,
    })
}

impl MetricModel {
    pub fn basis(&self) -> &FieldBasis {
        &self.basis
    }

    pub fn sigma(&self) -> &RatMatrix {
        &self.sigma
    }

    pub fn det_sigma(&self) -> &RatFunc {
        &self.det_sigma
    }

    pub fn det_s(&self) -> &Poly {
        &self.det_s
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Product of the distinct square-free factors of `det S`: same zero
    /// set, simple roots.
    pub fn reduced_det(&self) -> &Poly {
        &self.reduced_det
    }

    pub fn det_s_at(&self, p: &[Complex64]) -> Complex64 {
        self.det_num.eval(p)
    }

    /// `|det S(p)| > floor·(1 + ‖p‖)^deg`.
    pub fn off_divisor(&self, p: &[Complex64], floor: f64) -> bool {
        let deg = self.det_s.total_degree().unwrap_or(0) as i32;
        self.det_s_at(p).norm() > floor * (1.0 + norm(p)).powi(deg)
    }

    fn check_floor(&self, p: &[Complex64], floor: f64) -> Result<()> {
        if self.off_divisor(p, floor) {
            Ok(())
        } else {
            let deg = self.det_s.total_degree().unwrap_or(0) as i32;
            Err(Error::OnDivisor {
                det_abs: self.det_s_at(p).norm(),
                floor: floor * (1.0 + norm(p)).powi(deg),
            })
        }
    }

    /// `σ(p)` without any floor check.
    pub fn sigma_at(&self, p: &[Complex64]) -> DMatrix<Complex64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.sigma_num[i][j].eval(p))
    }

    fn g_from_sigma(s: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        s * s.adjoint()
    }

    /// Exact `σ(p)` at a Gaussian-rational point, `None` on the divisor.
    pub fn sigma_exact(&self, p: &[ExactScalar]) -> Option<Vec<Vec<ExactScalar>>> {
        self.sigma
            .iter()
            .map(|row| row.iter().map(|r| r.eval(p)).collect::<Option<Vec<_>>>())
            .collect()
    }
}

fn norm(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// A numerically hermitian matrix (checked to [`HERMITIAN_TOL`] relative to
/// the largest entry).
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(DMatrix<Complex64>);

impl HermitianMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<HermitianMatrix> {
        if !m.is_square() {
            return Err(Error::Invalid("matrix is not square".into()));
        }
        let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let dev = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian(dev));
        }
        Ok(HermitianMatrix(m))
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<HermitianMatrix> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid("matrix is not square".into()));
        }
        HermitianMatrix::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(n: usize) -> HermitianMatrix {
        HermitianMatrix(DMatrix::identity(n, n))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.n())
            .map(|i| (0..self.n()).map(|j| self.0[(i, j)]).collect())
            .collect()
    }

    /// Real for a hermitian matrix; the imaginary roundoff is dropped.
    pub fn det(&self) -> f64 {
        self.0.clone().determinant().re
    }

    pub fn max_abs_diff(&self, o: &HermitianMatrix) -> f64 {
        (&self.0 - &o.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Serialize for HermitianMatrix {
    /// Rows of `[re, im]` pairs.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = self
            .rows()
            .iter()
            .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        rows.serialize(s)
    }
}

/// Hermitian Cholesky with strictly positive real pivots. (nalgebra's
/// complex Cholesky takes complex square roots and so accepts indefinite
/// matrices.)
pub fn positive_definite(h: &HermitianMatrix) -> bool {
    let n = h.n();
    let a = &h.0;
    let mut l = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        let d = a[(j, j)].re - (0..j).map(|k| l[(j, k)].norm_sqr()).sum::<f64>();
        // also rejects NaN
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(d > 0.0) {
            return false;
        }
        let ljj = d.sqrt();
        l[(j, j)] = Complex64::new(ljj, 0.0);
        for i in j + 1..n {
            let s: Complex64 = (0..j).map(|k| l[(i, k)] * l[(j, k)].conj()).sum();
            l[(i, j)] = (a[(i, j)] - s) / ljj;
        }
    }
    true
}

/// `g(p) = σ(p)σ(p)*`, refusing points too close to the divisor.
pub fn metric_at(m: &MetricModel, p: &[Complex64], floor: f64) -> Result<HermitianMatrix> {
    if p.len() != m.dim() {
        return Err(Error::Invalid(format!(
            "point has {} coordinates, expected {}",
            p.len(),
            m.dim()
        )));
    }
    m.check_floor(p, floor)?;
    let g = MetricModel::g_from_sigma(&m.sigma_at(p));
    // σσ* is hermitian by construction; symmetrize away the roundoff.
    let g = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
    HermitianMatrix::new(g)
}

#[derive(Clone, Debug, PartialEq)]
pub struct KahlerResidual {
    pub i: usize,
    pub j: usize,
    pub l: usize,
    /// `∂_l σ_ij − ∂_i σ_lj`
    pub value: RatFunc,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KahlerDefect {
    /// Only the residuals that are not identically zero (with `i < l`; the
    /// residual is antisymmetric in `i, l`).
    pub residuals: Vec<KahlerResidual>,
    pub max_abs: f64,
    pub points: usize,
}

impl KahlerDefect {
    pub fn is_kahler(&self) -> bool {
        self.residuals.is_empty()
    }
}

/// Exact closedness residuals, plus their sup-norm over `points` (points on
/// the divisor are skipped).
pub fn kahler_defect(m: &MetricModel, points: &[Vec<Complex64>]) -> KahlerDefect {
    let n = m.dim();
    let mut residuals = Vec::new();
    for i in 0..n {
        for l in i + 1..n {
            for j in 0..n {
                let r = m.sigma[i][j].derivative(l).sub(&m.sigma[l][j].derivative(i));
                if !r.is_zero() {
                    residuals.push(KahlerResidual { i, j, l, value: r });
                }
            }
        }
    }
    let mut max_abs: f64 = 0.0;
    let mut used = 0;
    for p in points {
        if m.det_s_at(p).norm() == 0.0 {
            continue;
        }
        used += 1;
        for r in &residuals {
            max_abs = max_abs.max(r.value.eval_complex(p).norm());
        }
    }
    KahlerDefect {
        residuals,
        max_abs,
        points: used,
    }
}

/// Exact Ricci-flatness certificate: `det σ · det S = 1` identically and
/// `det g(p) = |det σ(p)|²` at Gaussian-rational points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RicciCertificate {
    pub det_sigma_identity: bool,
    pub points_checked: usize,
    pub det_identity_holds: bool,
}

impl RicciCertificate {
    pub fn holds(&self) -> bool {
        self.det_sigma_identity && self.det_identity_holds
    }
}

pub fn ricci_certificate(m: &MetricModel, points: &[Vec<ExactScalar>]) -> RicciCertificate {
    let prod = ratmat_det(&m.sigma).mul(&RatFunc::from_poly(m.det_s.clone()));
    let det_sigma_identity = prod == RatFunc::one(m.det_s.vars().clone()) && ratmat_det(&m.sigma) == m.det_sigma;
    let mut checked = 0;
    let mut ok = true;
    for p in points {
        let Some(s) = m.sigma_exact(p) else { continue };
        let n = s.len();
        let g: Vec<Vec<ExactScalar>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).fold(ExactScalar::zero(), |acc, k| &acc + &(&s[i][k] * &s[j][k].conj())))
                    .collect()
            })
            .collect();
        let Some(ds) = m.det_sigma.eval(p) else { continue };
        checked += 1;
        ok &= scalar_det(&g) == ExactScalar::real(ds.norm_sqr());
    }
    RicciCertificate {
        det_sigma_identity,
        points_checked: checked,
        det_identity_holds: ok,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RicciProbe {
    pub point: Vec<[f64; 2]>,
    /// `max |(∂∂̄ log det g)_ij|` by central differences.
    pub value: f64,
    /// `1 + ‖g(p)‖` (max-entry norm), the scale of the pass threshold.
    pub scale: f64,
}

/// Mixed second derivatives of `F = log det g` on a 4-point stencil of
/// step `h` per real direction; every stencil point must clear the floor.
#[allow(clippy::needless_range_loop)]
pub fn ricci_probe(m: &MetricModel, p: &[Complex64], h: f64, floor: f64) -> Result<RicciProbe> {
    let n = m.dim();
    let g0 = metric_at(m, p, floor)?;
    let f = |q: &[Complex64]| -> Result<f64> { Ok(metric_at(m, q, floor)?.det().ln()) };
    let shift = |q: &mut Vec<Complex64>, r: usize, d: f64| {
        if r < n {
            q[r].re += d;
        } else {
            q[r - n].im += d;
        }
    };
    let mut d2 = vec![vec![0.0; 2 * n]; 2 * n];
    for a in 0..2 * n {
        for b in a..2 * n {
            let mut acc = 0.0;
            for (sa, sb, w) in [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)] {
                let mut q = p.to_vec();
                shift(&mut q, a, sa * h);
                shift(&mut q, b, sb * h);
                acc += w * f(&q)?;
            }
            d2[a][b] = acc / (4.0 * h * h);
            d2[b][a] = d2[a][b];
        }
    }
    let mut value: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let re = d2[i][j] + d2[n + i][n + j];
            let im = d2[i][n + j] - d2[n + i][j];
            value = value.max(0.25 * re.hypot(im));
        }
    }
    let scale = 1.0 + g0.matrix().iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(RicciProbe {
        point: p.iter().map(|z| [z.re, z.im]).collect(),
        value,
        scale,
    })
}

/// Gaussian-rational points on a `1/8` grid in `[-2, 2]` (real and
/// imaginary parts) whose estimated distance `|f|/|∇f|` to the divisor is at
/// least `min_dist`.
pub fn sample_off_divisor<R: Rng>(m: &MetricModel, count: usize, min_dist: f64, rng: &mut R) -> Vec<Vec<ExactScalar>> {
    let n = m.dim();
    let grads: Vec<NumPoly> = (0..n).map(|k| m.det_s.derivative(k).compile()).collect();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count && attempts < count * 1000 {
        attempts += 1;
        let p: Vec<ExactScalar> = (0..n)
            .map(|_| {
                ExactScalar::gaussian(rng.gen_range(-16..=16), rng.gen_range(-16..=16)) * ExactScalar::from_ratio(1, 8)
            })
            .collect();
        let pc: Vec<Complex64> = p.iter().map(ExactScalar::to_complex).collect();
        let fv = m.det_s_at(&pc).norm();
        if fv == 0.0 {
            continue;
        }
        let gn = grads.iter().map(|g| g.eval(&pc).norm_sqr()).sum::<f64>().sqrt();
        if gn == 0.0 || fv / gn >= min_dist {
            out.push(p);
        }
    }
    out
}

fn gauss_legendre_16() -> &'static [(f64, f64)] {
    static NODES: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    NODES.get_or_init(|| {
        let n = 16;
        (0..n)
            .map(|k| {
                let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
                let mut dp = 0.0;
                for _ in 0..100 {
                    let (mut p0, mut p1) = (1.0, x);
                    for j in 2..=n {
                        let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                        p0 = p1;
                        p1 = p2;
                    }
                    dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                    let dx = p1 / dp;
                    x -= dx;
                    if dx.abs() < 1e-16 {
                        break;
                    }
                }
                (x, 2.0 / ((1.0 - x * x) * dp * dp))
            })
            .collect()
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Divergent,
    Finite,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompletenessProbe {
    pub point: Vec<[f64; 2]>,
    pub direction: Vec<[f64; 2]>,
    /// `L_j` for the dyadic blocks `[2^{-j-1}, 2^{-j}]`, `j = 0..depth`.
    pub lengths: Vec<f64>,
    pub verdict: Verdict,
}

/// Length of the straight path `p + tv` (`v` normalized) inside each dyadic
/// block, and the resulting divergence verdict.
pub fn completeness_probe(
    m: &MetricModel,
    p: &[Complex64],
    v: &[Complex64],
    cfg: &ProbeConfig,
) -> Result<CompletenessProbe> {
    let nv = norm(v);
    if nv == 0.0 || !nv.is_finite() {
        return Err(Error::BadDirection);
    }
    let v: Vec<Complex64> = v.iter().map(|z| z / nv).collect();
    let at = |t: f64| -> Vec<Complex64> { p.iter().zip(&v).map(|(a, b)| a + b * t).collect() };
    let deg = m.det_s.total_degree().unwrap_or(0) as i32;
    if [0.3, 0.5, 0.7].iter().all(|&t| {
        let q = at(t);
        m.det_s_at(&q).norm() <= 1e-10 * (1.0 + norm(&q)).powi(deg)
    }) {
        return Err(Error::BadDirection);
    }
    let speed = |t: f64| -> Result<f64> {
        let q = at(t);
        if m.det_s_at(&q).norm() == 0.0 {
            return Err(Error::BadDirection);
        }
        let s = m.sigma_at(&q);
        let n = m.dim();
        let sq: f64 = (0..n)
            .map(|k| (0..n).map(|i| v[i] * s[(i, k)]).sum::<Complex64>().norm_sqr())
            .sum();
        let r = sq.sqrt();
        if r.is_finite() {
            Ok(r)
        } else {
            Err(Error::BadDirection)
        }
    };
    let mut lengths = Vec::with_capacity(cfg.depth);
    for j in 0..cfg.depth {
        let hi = 0.5f64.powi(j as i32);
        let lo = hi / 2.0;
        let (mid, half) = ((hi + lo) / 2.0, (hi - lo) / 2.0);
        let mut acc = 0.0;
        for &(x, w) in gauss_legendre_16() {
            acc += w * speed(mid + half * x)?;
        }
        lengths.push(acc * half);
    }
    let verdict = classify(&lengths, cfg);
    Ok(CompletenessProbe {
        point: p.iter().map(|z| [z.re, z.im]).collect(),
        direction: v.iter().map(|z| [z.re, z.im]).collect(),
        lengths,
        verdict,
    })
}

fn classify(lengths: &[f64], cfg: &ProbeConfig) -> Verdict {
    let t = cfg.tail.min(lengths.len().saturating_sub(1));
    if t == 0 {
        return Verdict::Inconclusive;
    }
    let tail = &lengths[lengths.len() - t..];
    if tail.iter().all(|&l| l > cfg.divergence_threshold) {
        return Verdict::Divergent;
    }
    let prev = &lengths[lengths.len() - t - 1..lengths.len() - 1];
    if tail.iter().zip(prev).all(|(a, b)| *b > 0.0 && a / b < cfg.finite_ratio) {
        Verdict::Finite
    } else {
        Verdict::Inconclusive
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisCompleteness {
    Complete,
    Incomplete,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompletenessReport {
    pub verdict: BasisCompleteness,
    pub divisor_points: usize,
    pub skipped_directions: usize,
    pub probes: Vec<CompletenessProbe>,
}

/// Probe from sampled divisor points along every coordinate axis and along
/// every nonzero basis field. Complete when every probe diverges; an empty
/// divisor is vacuously complete on this chart.
pub fn completeness_analysis<R: Rng>(m: &MetricModel, cfg: &ProbeConfig, rng: &mut R) -> Result<CompletenessReport> {
    let n = m.dim();
    let points = crate::divisor::sample_divisor_points(&m.reduced_det, cfg.divisor_points, 4.0, rng);
    let fields: Vec<Vec<NumPoly>> = m.basis.fields().iter().map(|f| f.compile()).collect();
    let mut probes = Vec::new();
    let mut skipped = 0;
    for p in &points {
        let mut dirs: Vec<Vec<Complex64>> = (0..n)
            .map(|k| {
                (0..n)
                    .map(|i| if i == k { Complex64::one() } else { Complex64::zero() })
                    .collect()
            })
            .collect();
        for f in &fields {
            let v: Vec<Complex64> = f.iter().map(|c| c.eval(p)).collect();
            if norm(&v) > 1e-9 {
                dirs.push(v);
            }
        }
        for v in dirs {
            match completeness_probe(m, p, &v, cfg) {
                Ok(pr) => probes.push(pr),
                Err(Error::BadDirection) => skipped += 1,
                Err(e) => return Err(e),
            }
        }
    }
    let verdict = if probes.iter().any(|p| p.verdict == Verdict::Finite) {
        BasisCompleteness::Incomplete
    } else if probes.iter().all(|p| p.verdict == Verdict::Divergent) {
        BasisCompleteness::Complete
    } else {
        BasisCompleteness::Inconclusive
    };
    Ok(CompletenessReport {
        verdict,
        divisor_points: points.len(),
        skipped_directions: skipped,
        probes,
    })
}
