//! The divisor `D_V = {det S = 0}` cut out by the wedge of the basis fields,
//! on an affine chart or homogeneously on ℙⁿ.
//!
//! "Multiplicity" here is the exponent of a factor in the square-free
//! decomposition of the section. A square-free factor can still be reducible
//! over ℚ(i) (e.g. `z0*z1*z2` is one factor of multiplicity 1), so this is
//! not the intersection-theoretic multiplicity along each irreducible
//! component.

use num_complex::Complex64;
use num_traits::Zero;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{homogeneous_vars, Chart, FieldBasis, ProjectiveField};
use crate::symkernel::{poly_det, squarefree_decompose, ExactScalar, Poly, PolyMatrix, SquareFree, Vars};

#[derive(Clone, Debug, PartialEq)]
pub enum SectionDomain {
    Chart(Chart),
    /// Homogeneous coordinates `z0..zn` of ℙⁿ.
    Homogeneous {
        n: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DivisorSection {
    pub domain: SectionDomain,
    /// Normalized: leading coefficient 1 in graded-lex order.
    pub f: Poly,
    pub decomposition: SquareFree,
    pub homogeneous: bool,
    pub degree: u32,
}

impl DivisorSection {
    fn from_det(domain: SectionDomain, det: Poly) -> Result<DivisorSection> {
        if det.is_zero() {
            return Err(Error::DegenerateBasis);
        }
        let f = det.monic();
        let decomposition = squarefree_decompose(&f);
        Ok(DivisorSection {
            homogeneous: f.is_homogeneous(),
            degree: f.total_degree().unwrap_or(0),
            domain,
            f,
            decomposition,
        })
    }

    pub fn vars(&self) -> &Vars {
        self.f.vars()
    }

    /// The empty divisor on this chart.
    pub fn is_empty(&self) -> bool {
        self.f.is_constant()
    }

    /// Restrict a homogeneous section to the chart `U_index`.
    pub fn localize(&self, index: usize) -> Result<DivisorSection> {
        let SectionDomain::Homogeneous { n } = self.domain else {
            return Err(Error::Invalid("section is already on an affine chart".into()));
        };
        let chart = Chart::projective(n, index);
        let local = self.f.dehomogenize(index).drop_var(index).with_vars(chart.vars());
        DivisorSection::from_det(SectionDomain::Chart(chart), local)
    }

    pub fn report(&self, tangent_fields: Vec<bool>) -> DivisorReport {
        DivisorReport {
            section: self.f.to_string(),
            degree: self.degree,
            factors: self
                .decomposition
                .factors
                .iter()
                .map(|(p, m)| FactorReport {
                    poly: p.to_string(),
                    mult: *m,
                })
                .collect(),
            reduced: is_reduced(self),
            tangent_fields,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactorReport {
    pub poly: String,
    pub mult: u32,
}

/// JSON fragment describing a divisor.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivisorReport {
    pub section: String,
    pub degree: u32,
    pub factors: Vec<FactorReport>,
    pub reduced: bool,
    pub tangent_fields: Vec<bool>,
}

/// `f = det S` in chart coordinates.
pub fn divisor_affine(b: &FieldBasis) -> Result<DivisorSection> {
    DivisorSection::from_det(SectionDomain::Chart(b.chart().clone()), poly_det(&b.matrix()))
}

/// `f = det` of the `(n+1)×(n+1)` matrix with first row `(z0, …, zn)` and
/// row `i + 1` the linear forms of field `i`.
pub fn divisor_projective(fields: &[ProjectiveField]) -> Result<DivisorSection> {
    let n = fields
        .first()
        .map(ProjectiveField::n)
        .ok_or_else(|| Error::Invalid("no fields".into()))?;
    if fields.len() != n || fields.iter().any(|f| f.n() != n) {
        return Err(Error::Invalid(format!("need exactly {n} fields on P{n}")));
    }
    let vars = homogeneous_vars(n);
    let mut m: PolyMatrix = vec![(0..=n).map(|j| Poly::var(vars.clone(), j)).collect()];
    m.extend(fields.iter().map(|f| f.forms().to_vec()));
    DivisorSection::from_det(SectionDomain::Homogeneous { n }, poly_det(&m))
}

pub fn is_reduced(d: &DivisorSection) -> bool {
    d.decomposition.is_reduced()
}

/// Result of dividing `s(f)` by `f` for one field.
#[derive(Clone, Debug, PartialEq)]
pub struct Tangency {
    pub tangent: bool,
    /// `s(f) / f` when tangent (the "eigenvalue" polynomial).
    pub quotient: Option<Poly>,
    /// Remainder of `s(f)` modulo `f`; zero exactly when tangent.
    pub remainder: Poly,
}

fn tangency_of(sf: Poly, f: &Poly) -> Tangency {
    let (q, r) = sf.div_rem(f);
    let tangent = r.is_zero();
    Tangency {
        tangent,
        quotient: tangent.then_some(q),
        remainder: r,
    }
}

/// For every basis field `s`, whether `f` divides `s(f) = s^k ∂_k f`.
pub fn tangency_check(b: &FieldBasis, d: &DivisorSection) -> Result<Vec<Tangency>> {
    if let SectionDomain::Chart(c) = &d.domain {
        if c != b.chart() {
            return Err(Error::ChartMismatch);
        }
    } else {
        return Err(Error::ChartMismatch);
    }
    Ok(b.fields().iter().map(|s| tangency_of(s.apply(&d.f), &d.f)).collect())
}

/// Homogeneous version on ℙⁿ; the Euler field contributes `deg f · f`, so
/// the answer does not depend on the representative of each field.
pub fn tangency_check_projective(fields: &[ProjectiveField], d: &DivisorSection) -> Result<Vec<Tangency>> {
    if !matches!(d.domain, SectionDomain::Homogeneous { .. }) {
        return Err(Error::ChartMismatch);
    }
    Ok(fields.iter().map(|s| tangency_of(s.apply(&d.f), &d.f)).collect())
}

/// Roots of `Σ c_k t^k` by Newton iteration from random starts with
/// deflation, then polished against the undeflated polynomial.
pub fn univariate_roots<R: Rng>(coeffs: &[Complex64], rng: &mut R) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.len() > 1 && c.last().is_some_and(|x| x.norm() == 0.0) {
        c.pop();
    }
    let horner = |p: &[Complex64], t: Complex64| -> (Complex64, Complex64) {
        let mut v = Complex64::zero();
        let mut dv = Complex64::zero();
        for a in p.iter().rev() {
            dv = dv * t + v;
            v = v * t + a;
        }
        (v, dv)
    };
    let newton = |p: &[Complex64], mut t: Complex64, iters: usize| -> Complex64 {
        for _ in 0..iters {
            let (v, dv) = horner(p, t);
            if v.norm() == 0.0 || dv.norm() == 0.0 {
                break;
            }
            let step = v / dv;
            t -= step;
            if step.norm() <= 1e-16 * (1.0 + t.norm()) {
                break;
            }
        }
        t
    };
    let mut roots = Vec::new();
    let mut work = c.clone();
    while work.len() > 2 {
        let start = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let r = newton(&work, start, 500);
        roots.push(r);
        // synthetic division by (t - r)
        let d = work.len() - 1;
        let mut q = vec![Complex64::zero(); d];
        q[d - 1] = work[d];
        for k in (1..d).rev() {
            q[k - 1] = work[k] + q[k] * r;
        }
        work = q;
    }
    if work.len() == 2 {
        roots.push(-work[0] / work[1]);
    }
    roots.into_iter().map(|r| newton(&c, r, 20)).collect()
}

fn random_small_rational<R: Rng>(rng: &mut R) -> ExactScalar {
    ExactScalar::from_ratio(rng.gen_range(-16..=16), 16)
}

/// Points on `{f = 0}` with `‖p‖ ≤ radius`, found by intersecting random
/// rational complex lines with the hypersurface. A point is kept when
/// `|f(p)| < 1e-12` after refinement. May return fewer than `count` points
/// (none at all for an empty divisor).
pub fn sample_divisor_points<R: Rng>(f: &Poly, count: usize, radius: f64, rng: &mut R) -> Vec<Vec<Complex64>> {
    let mut out = Vec::new();
    if f.is_constant() {
        return out;
    }
    let n = f.nvars();
    let mut names: Vec<String> = f.vars().to_vec();
    names.push("__t".into());
    let ring: Vars = names.into();
    let t = Poly::var(ring.clone(), n);
    let fr = f.with_vars(&ring);
    let fnum = f.compile();
    for _ in 0..count * 50 {
        if out.len() >= count {
            break;
        }
        let a: Vec<ExactScalar> = (0..n)
            .map(|_| {
                let re = random_small_rational(rng);
                let im = random_small_rational(rng);
                &re + &(&im * &ExactScalar::i())
            })
            .collect();
        let b: Vec<ExactScalar> = (0..n)
            .map(|_| {
                let re = random_small_rational(rng);
                let im = random_small_rational(rng);
                &re + &(&im * &ExactScalar::i())
            })
            .collect();
        let mut g = fr.clone();
        for k in 0..n {
            let line = Poly::constant(ring.clone(), a[k].clone()).add(&t.scale(&b[k]));
            g = g.substitute(k, &line);
        }
        let coeffs: Vec<Complex64> = g
            .to_univariate(n)
            .iter()
            .map(|c| c.constant_value().to_complex())
            .collect();
        if coeffs.len() < 2 {
            continue;
        }
        for r in univariate_roots(&coeffs, rng) {
            let p: Vec<Complex64> = a
                .iter()
                .zip(&b)
                .map(|(ak, bk)| ak.to_complex() + bk.to_complex() * r)
                .collect();
            let norm = p.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm <= radius && fnum.eval(&p).norm() < 1e-12 && out.len() < count {
                out.push(p);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{localize, parse_projective_field};
    use crate::symkernel::parse_poly;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn proj(exprs: &[&str]) -> Vec<ProjectiveField> {
        exprs.iter().map(|e| parse_projective_field(e, 2).unwrap()).collect()
    }

    #[test]
    fn affine_examples() {
        let toric = FieldBasis::new(proj(&["z1 d1", "z2 d2"]).iter().map(|v| localize(v, 0)).collect()).unwrap();
        let d = divisor_affine(&toric).unwrap();
        assert_eq!(d.f.to_string(), "z1*z2");

        let c2 = Chart::affine(&["x", "y"]);
        let d = divisor_affine(&FieldBasis::parse(c2.clone(), &["dx", "y dx + dy"]).unwrap()).unwrap();
        assert!(d.f.is_one() && d.is_empty());

        let d = divisor_affine(&FieldBasis::parse(c2, &["dx", "x^2 dy"]).unwrap()).unwrap();
        assert_eq!(d.f.to_string(), "x^2");
        assert_eq!(d.decomposition.factors.len(), 1);
        assert_eq!(d.decomposition.factors[0].0.to_string(), "x");
        assert_eq!(d.decomposition.factors[0].1, 2);
    }

    #[test]
    fn projective_examples() {
        let d = divisor_projective(&proj(&["z2 d0", "z2 d1 + z1 d0"])).unwrap();
        assert_eq!(d.f.to_string(), "z2^3");
        assert_eq!(d.degree, 3);
        assert!(!is_reduced(&d));
        let d = divisor_projective(&proj(&["z1 d1", "z2 d2"])).unwrap();
        assert_eq!(d.f.to_string(), "z0*z1*z2");
        assert!(is_reduced(&d));
        assert_eq!(
            divisor_projective(&proj(&["z1 d0", "z2 d0"])),
            Err(Error::DegenerateBasis)
        );
    }

    #[test]
    fn reducedness() {
        let c = Chart::affine(&["x"]);
        let f = parse_poly("x^2*(x - 1)", &["x"]).unwrap();
        let d = DivisorSection::from_det(SectionDomain::Chart(c), f).unwrap();
        assert!(!is_reduced(&d));
    }

    #[test]
    fn tangency_examples() {
        let ch = Chart::affine(&["z1", "z2"]);
        let toric = FieldBasis::parse(ch, &["z1 d1", "z2 d2"]).unwrap();
        let d = divisor_affine(&toric).unwrap();
        let t = tangency_check(&toric, &d).unwrap();
        assert!(t.iter().all(|x| x.tangent));
        assert!(t[0].quotient.as_ref().unwrap().is_one());

        let c2 = Chart::affine(&["x", "y"]);
        let bad = FieldBasis::parse(c2.clone(), &["dx", "x^2 dy"]).unwrap();
        let d = divisor_affine(&bad).unwrap();
        let t = tangency_check(&bad, &d).unwrap();
        assert!(!t[0].tangent);
        assert_eq!(t[0].remainder.to_string(), "2*x");
        assert!(t[1].tangent);

        let flat = FieldBasis::parse(c2, &["dx", "y dx + dy"]).unwrap();
        let d = divisor_affine(&flat).unwrap();
        assert!(tangency_check(&flat, &d).unwrap().iter().all(|x| x.tangent));
    }

    #[test]
    fn projective_localizes_to_affine() {
        for exprs in [["z1 d1", "z2 d2"], ["z2 d0", "z2 d1 + z1 d0"], ["z0 d1", "z1 d2"]] {
            let fields = proj(&exprs);
            let hom = divisor_projective(&fields).unwrap();
            for i in 0..=2 {
                let local = FieldBasis::new(fields.iter().map(|v| localize(v, i)).collect()).unwrap();
                let aff = divisor_affine(&local).unwrap();
                assert_eq!(hom.localize(i).unwrap().f, aff.f, "{exprs:?} chart {i}");
            }
        }
    }

    #[test]
    fn roots_of_cubic() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // (t - 1)(t + 2)(t - i)
        let p = parse_poly("(t - 1)*(t + 2)*(t - i)", &["t"]).unwrap();
        let c: Vec<Complex64> = p
            .to_univariate(0)
            .iter()
            .map(|x| x.constant_value().to_complex())
            .collect();
        let mut roots = univariate_roots(&c, &mut rng);
        roots.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((roots[0] - Complex64::new(-2.0, 0.0)).norm() < 1e-12);
        assert!((roots[1] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert!((roots[2] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn samples_lie_on_divisor() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = parse_poly("z1*z2 - z1^2 + 1", &["z1", "z2"]).unwrap();
        let pts = sample_divisor_points(&f, 5, 10.0, &mut rng);
        assert_eq!(pts.len(), 5);
        for p in pts {
            assert!(f.eval_complex(&p).norm() < 1e-12);
        }
    }
}
