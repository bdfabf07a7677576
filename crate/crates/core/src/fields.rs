//! Polynomial vector fields on affine charts and on ℙⁿ, Lie brackets, and the
//! span/algebra tests built on them.

use std::fmt;

use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::symkernel::linalg::{rref, to_ratmatrix};
use crate::symkernel::{
    ratmat_rank, solve_linear, vars_from, ExactScalar, LinearSolution, Monomial, NumPoly, Poly, PolyMatrix, Vars,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChartKind {
    /// ℂⁿ with its global coordinates.
    Affine { n: usize },
    /// The standard chart `U_index = {z^index ≠ 0}` of ℙⁿ, with affine
    /// coordinates `z^j / z^index` for `j ≠ index`.
    Projective { n: usize, index: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    kind: ChartKind,
    vars: Vars,
}

impl Chart {
    pub fn affine<S: AsRef<str>>(names: &[S]) -> Chart {
        Chart {
            kind: ChartKind::Affine { n: names.len() },
            vars: vars_from(names),
        }
    }

    /// Chart `U_index` of ℙⁿ. Coordinates keep the homogeneous names `z<j>`.
    pub fn projective(n: usize, index: usize) -> Chart {
        assert!(index <= n, "chart index out of range");
        let names: Vec<String> = (0..=n).filter(|&j| j != index).map(|j| format!("z{j}")).collect();
        Chart {
            kind: ChartKind::Projective { n, index },
            vars: vars_from(&names),
        }
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn kind(&self) -> &ChartKind {
        &self.kind
    }

    pub fn describe(&self) -> String {
        match self.kind {
            ChartKind::Affine { n } => format!("C{n}"),
            ChartKind::Projective { n, index } => format!("P{n}/U{index}"),
        }
    }
}

/// A polynomial vector field `Σ c_k ∂/∂x_k` on an affine chart.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    chart: Chart,
    components: Vec<Poly>,
}

impl VectorField {
    pub fn new(chart: Chart, components: Vec<Poly>) -> Result<VectorField> {
        if components.len() != chart.dim() {
            return Err(Error::Invalid(format!(
                "field has {} components on a {}-dimensional chart",
                components.len(),
                chart.dim()
            )));
        }
        let components = components.iter().map(|p| p.with_vars(&chart.vars)).collect();
        Ok(VectorField { chart, components })
    }

    pub fn zero(chart: Chart) -> VectorField {
        let components = vec![Poly::zero(chart.vars.clone()); chart.dim()];
        VectorField { chart, components }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Poly::is_zero)
    }

    pub fn scale(&self, c: &ExactScalar) -> VectorField {
        VectorField {
            chart: self.chart.clone(),
            components: self.components.iter().map(|p| p.scale(c)).collect(),
        }
    }

    pub fn add(&self, o: &VectorField) -> Result<VectorField> {
        if self.chart != o.chart {
            return Err(Error::ChartMismatch);
        }
        Ok(VectorField {
            chart: self.chart.clone(),
            components: self
                .components
                .iter()
                .zip(&o.components)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }

    /// The derivation `f ↦ Σ c_k ∂_k f`.
    pub fn apply(&self, f: &Poly) -> Poly {
        let f = f.with_vars(&self.chart.vars);
        self.components
            .iter()
            .enumerate()
            .fold(Poly::zero(self.chart.vars.clone()), |acc, (k, c)| {
                acc.add(&c.mul(&f.derivative(k)))
            })
    }

    pub fn compile(&self) -> Vec<NumPoly> {
        self.components.iter().map(Poly::compile).collect()
    }

    pub fn eval_complex(&self, p: &[Complex64]) -> Vec<Complex64> {
        self.components.iter().map(|c| c.eval_complex(p)).collect()
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .components
            .iter()
            .zip(self.chart.vars.iter())
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, v)| {
                let d = match v.strip_prefix('z') {
                    Some(s) if !s.is_empty() && s.chars().all(|ch| ch.is_ascii_digit()) => format!("d{s}"),
                    _ => format!("d{v}"),
                };
                if c.is_one() {
                    d
                } else {
                    format!("({c}) {d}")
                }
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// A global vector field on ℙⁿ, stored as `n + 1` linear forms in `z0..zn`;
/// the Euler field is the zero class.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectiveField {
    n: usize,
    forms: Vec<Poly>,
}

pub fn homogeneous_vars(n: usize) -> Vars {
    let names: Vec<String> = (0..=n).map(|j| format!("z{j}")).collect();
    vars_from(&names)
}

impl ProjectiveField {
    pub fn new(n: usize, forms: Vec<Poly>) -> Result<ProjectiveField> {
        if forms.len() != n + 1 {
            return Err(Error::Invalid(format!(
                "a field on P{n} needs {} linear forms, got {}",
                n + 1,
                forms.len()
            )));
        }
        let vars = homogeneous_vars(n);
        let forms: Vec<Poly> = forms.iter().map(|p| p.with_vars(&vars)).collect();
        for f in &forms {
            if !f.is_zero() && (!f.is_homogeneous() || f.total_degree() != Some(1)) {
                return Err(Error::Invalid(format!(
                    "component '{f}' is not a homogeneous linear form"
                )));
            }
        }
        Ok(ProjectiveField { n, forms })
    }

    pub fn euler(n: usize) -> ProjectiveField {
        let vars = homogeneous_vars(n);
        ProjectiveField {
            n,
            forms: (0..=n).map(|j| Poly::var(vars.clone(), j)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn forms(&self) -> &[Poly] {
        &self.forms
    }

    /// Bracket of the linear fields upstairs on ℂⁿ⁺¹; it descends to ℙⁿ.
    pub fn bracket(&self, o: &ProjectiveField) -> ProjectiveField {
        let forms = bracket_components(&self.forms, &o.forms);
        ProjectiveField { n: self.n, forms }
    }

    /// `Σ l^k ∂_k f` for a homogeneous `f`.
    pub fn apply(&self, f: &Poly) -> Poly {
        let vars = homogeneous_vars(self.n);
        let f = f.with_vars(&vars);
        self.forms
            .iter()
            .enumerate()
            .fold(Poly::zero(vars), |acc, (k, l)| acc.add(&l.mul(&f.derivative(k))))
    }
}

fn bracket_components(v: &[Poly], w: &[Poly]) -> Vec<Poly> {
    (0..v.len())
        .map(|k| {
            let mut acc = Poly::zero(v[0].vars().clone());
            for j in 0..v.len() {
                acc = acc.add(&v[j].mul(&w[k].derivative(j)));
                acc = acc.sub(&w[j].mul(&v[k].derivative(j)));
            }
            acc
        })
        .collect()
}

/// Restrict a field on ℙⁿ to the chart `U_index`:
/// `ẋ^j = l^j − x^j l^index` with `z^index = 1`.
pub fn localize(v: &ProjectiveField, index: usize) -> VectorField {
    let chart = Chart::projective(v.n, index);
    let hv = homogeneous_vars(v.n);
    let li = v.forms[index].dehomogenize(index);
    let components = (0..=v.n)
        .filter(|&j| j != index)
        .map(|j| {
            let xj = Poly::var(hv.clone(), j);
            let c = v.forms[j].dehomogenize(index).sub(&xj.mul(&li));
            c.drop_var(index).with_vars(&chart.vars)
        })
        .collect();
    VectorField { chart, components }
}

/// `[v, w]^k = v^j ∂_j w^k − w^j ∂_j v^k`.
pub fn bracket(v: &VectorField, w: &VectorField) -> Result<VectorField> {
    if v.chart != w.chart {
        return Err(Error::ChartMismatch);
    }
    Ok(VectorField {
        chart: v.chart.clone(),
        components: bracket_components(&v.components, &w.components),
    })
}

/// `n` fields on a common `n`-dimensional chart; rows of `S` are the fields.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldBasis {
    chart: Chart,
    fields: Vec<VectorField>,
}

impl FieldBasis {
    pub fn new(fields: Vec<VectorField>) -> Result<FieldBasis> {
        let chart = fields
            .first()
            .map(|f| f.chart.clone())
            .ok_or_else(|| Error::Invalid("empty basis".into()))?;
        if fields.iter().any(|f| f.chart != chart) {
            return Err(Error::ChartMismatch);
        }
        if fields.len() != chart.dim() {
            return Err(Error::Invalid(format!(
                "{} fields on a {}-dimensional chart",
                fields.len(),
                chart.dim()
            )));
        }
        Ok(FieldBasis { chart, fields })
    }

    /// Convenience: parse each entry as a field expression on `chart`.
    pub fn parse(chart: Chart, exprs: &[&str]) -> Result<FieldBasis> {
        let fields = exprs
            .iter()
            .map(|e| parse_field(e, &chart))
            .collect::<Result<Vec<_>>>()?;
        FieldBasis::new(fields)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn fields(&self) -> &[VectorField] {
        &self.fields
    }

    pub fn dim(&self) -> usize {
        self.fields.len()
    }

    /// `S = (s^{ik})`: row `i` holds the components of field `i`.
    pub fn matrix(&self) -> PolyMatrix {
        self.fields.iter().map(|f| f.components.clone()).collect()
    }
}

/// Parse a field expression such as `z2 d0 + z1 d0` on an affine chart.
pub fn parse_field(src: &str, chart: &Chart) -> Result<VectorField> {
    use crate::symkernel::parse::{parse_value, Value};
    match parse_value(src, &chart.vars, true)? {
        Value::Vector(c) => VectorField::new(chart.clone(), c),
        Value::Scalar(p) if p.is_zero() => Ok(VectorField::zero(chart.clone())),
        Value::Scalar(_) => Err(Error::parse(0, 1, "expected a vector field (use d<k> for ∂/∂z<k>)")),
    }
}

/// Parse a homogeneous field expression on ℙⁿ.
pub fn parse_projective_field(src: &str, n: usize) -> Result<ProjectiveField> {
    use crate::symkernel::parse::{parse_value, Value};
    match parse_value(src, &homogeneous_vars(n), true)? {
        Value::Vector(c) => ProjectiveField::new(n, c),
        Value::Scalar(p) if p.is_zero() => ProjectiveField::new(n, vec![Poly::zero(homogeneous_vars(n)); n + 1]),
        Value::Scalar(_) => Err(Error::parse(0, 1, "expected a vector field (use d<k> for ∂/∂z<k>)")),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpanCertificate {
    /// Index of the component (coordinate slot) where matching fails.
    pub component: usize,
    /// The monomial whose coefficient cannot be matched.
    pub monomial: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpanMembership {
    Inside(Vec<ExactScalar>),
    Outside(SpanCertificate),
}

impl SpanMembership {
    pub fn is_inside(&self) -> bool {
        matches!(self, SpanMembership::Inside(_))
    }
}

fn monomial_text(vars: &Vars, m: &Monomial) -> String {
    let p = Poly::monomial(vars.clone(), m.0.clone(), ExactScalar::from_int(1));
    p.to_string()
}

/// Constant coefficients `c` with `w = Σ c_i s^(i)`, or the first
/// (component, monomial) equation at which the system becomes inconsistent.
pub fn span_membership(w: &VectorField, b: &FieldBasis) -> Result<SpanMembership> {
    if w.chart != b.chart {
        return Err(Error::ChartMismatch);
    }
    let nb = b.fields.len();
    let mut rows: Vec<Vec<ExactScalar>> = Vec::new();
    let mut rhs: Vec<ExactScalar> = Vec::new();
    let mut echelon: Vec<Vec<ExactScalar>> = Vec::new();
    for k in 0..w.chart.dim() {
        let mut monos: Vec<Monomial> = w.components[k].terms().map(|(m, _)| m.clone()).collect();
        for f in &b.fields {
            monos.extend(f.components[k].terms().map(|(m, _)| m.clone()));
        }
        monos.sort();
        monos.dedup();
        for m in monos.into_iter().rev() {
            let mut row: Vec<ExactScalar> = b.fields.iter().map(|f| f.components[k].coeff(&m)).collect();
            row.push(w.components[k].coeff(&m));
            // incremental consistency check against the echelon form so far
            let mut trial = echelon.clone();
            trial.push(row.clone());
            let pivots = rref(&mut trial, nb + 1);
            if pivots.last() == Some(&nb) {
                return Ok(SpanMembership::Outside(SpanCertificate {
                    component: k,
                    monomial: monomial_text(&w.chart.vars, &m),
                }));
            }
            trial.retain(|r| r.iter().any(|x| !x.is_zero()));
            echelon = trial;
            rhs.push(row.pop().unwrap());
            rows.push(row);
        }
    }
    if rows.is_empty() {
        return Ok(SpanMembership::Inside(vec![ExactScalar::zero(); nb]));
    }
    match solve_linear(&rows, &rhs) {
        LinearSolution::Consistent { particular, .. } => Ok(SpanMembership::Inside(particular)),
        LinearSolution::Inconsistent => unreachable!("consistency checked incrementally"),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BracketWitness {
    pub i: usize,
    pub j: usize,
    pub bracket: VectorField,
    /// Present when the bracket also leaves the span.
    pub certificate: Option<SpanCertificate>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraCheck {
    pub holds: bool,
    pub witness: Option<BracketWitness>,
}

/// All pairwise brackets vanish; otherwise the first nonzero one.
pub fn is_abelian(b: &FieldBasis) -> AlgebraCheck {
    let n = b.fields.len();
    for i in 0..n {
        for j in i + 1..n {
            let br = bracket(&b.fields[i], &b.fields[j]).expect("basis shares a chart");
            if !br.is_zero() {
                return AlgebraCheck {
                    holds: false,
                    witness: Some(BracketWitness {
                        i,
                        j,
                        bracket: br,
                        certificate: None,
                    }),
                };
            }
        }
    }
    AlgebraCheck {
        holds: true,
        witness: None,
    }
}

/// Every pairwise bracket lies in the constant-coefficient span of the basis.
pub fn is_subalgebra(b: &FieldBasis) -> AlgebraCheck {
    let n = b.fields.len();
    for i in 0..n {
        for j in i + 1..n {
            let br = bracket(&b.fields[i], &b.fields[j]).expect("basis shares a chart");
            if let SpanMembership::Outside(cert) = span_membership(&br, b).expect("same chart") {
                return AlgebraCheck {
                    holds: false,
                    witness: Some(BracketWitness {
                        i,
                        j,
                        bracket: br,
                        certificate: Some(cert),
                    }),
                };
            }
        }
    }
    AlgebraCheck {
        holds: true,
        witness: None,
    }
}

/// Rank of `S` over the field of rational functions.
pub fn generic_rank(b: &FieldBasis) -> usize {
    ratmat_rank(&to_ratmatrix(&b.matrix()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowConfig {
    pub t_max: f64,
    pub steps: usize,
    pub blowup_bound: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            t_max: 1.0,
            steps: 1000,
            blowup_bound: 1e8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowProbe {
    pub field: usize,
    pub points: usize,
    /// Per start point, max over the trajectory of `|f(γ)| / (1 + ‖γ‖^deg f)`.
    pub per_point: Vec<f64>,
    pub max_residual: f64,
}

fn norm(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Integrate `ż = s^(field)(z)` with classical fixed-step RK4 from each start
/// point and record how far `f` drifts from zero, relative to the size of the
/// trajectory.
pub fn flow_invariance_probe(
    b: &FieldBasis,
    f: &Poly,
    field: usize,
    starts: &[Vec<Complex64>],
    cfg: &FlowConfig,
) -> Result<FlowProbe> {
    let rhs = b.fields[field].compile();
    let fnum = f.with_vars(&b.chart.vars).compile();
    let deg = f.total_degree().unwrap_or(0) as i32;
    let h = cfg.t_max / cfg.steps as f64;
    let eval = |z: &[Complex64]| -> Vec<Complex64> { rhs.iter().map(|c| c.eval(z)).collect() };
    let residual = |z: &[Complex64]| fnum.eval(z).norm() / (1.0 + norm(z).powi(deg));
    let mut per_point = Vec::with_capacity(starts.len());
    for start in starts {
        let mut z = start.clone();
        let mut worst = residual(&z);
        for step in 0..cfg.steps {
            let k1 = eval(&z);
            let z2: Vec<_> = z.iter().zip(&k1).map(|(a, k)| a + k * (h / 2.0)).collect();
            let k2 = eval(&z2);
            let z3: Vec<_> = z.iter().zip(&k2).map(|(a, k)| a + k * (h / 2.0)).collect();
            let k3 = eval(&z3);
            let z4: Vec<_> = z.iter().zip(&k3).map(|(a, k)| a + k * h).collect();
            let k4 = eval(&z4);
            for i in 0..z.len() {
                z[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
            }
            let nz = norm(&z);
            if !nz.is_finite() || nz > cfg.blowup_bound {
                return Err(Error::BlowupDetected {
                    t: (step + 1) as f64 * h,
                    bound: cfg.blowup_bound,
                });
            }
            worst = worst.max(residual(&z));
        }
        per_point.push(worst);
    }
    let max_residual = per_point.iter().cloned().fold(0.0, f64::max);
    Ok(FlowProbe {
        field,
        points: starts.len(),
        per_point,
        max_residual,
    })
}

impl fmt::Display for FieldBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.fields.iter().map(|v| v.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}
