//! End-to-end pipeline over a [`Scenario`] and its JSON / text report.
//!
//! Every verdict carries its witness: the first nonzero bracket, the
//! tangency remainders, the closedness residuals, the dyadic length tables,
//! the flow residuals.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cone::{cone_report, ConeReport, LatticeData};
use crate::divisor::{
    divisor_affine, divisor_projective, sample_divisor_points, tangency_check, tangency_check_projective,
    DivisorReport, DivisorSection, Tangency,
};
use crate::error::{Error, Result};
use crate::fields::{
    flow_invariance_probe, is_abelian, is_subalgebra, AlgebraCheck, FieldBasis, FlowConfig, FlowProbe,
};
use crate::metric::{
    build_metric, completeness_analysis, kahler_defect, metric_at, positive_definite, ricci_certificate, ricci_probe,
    sample_off_divisor, BasisCompleteness, CompletenessReport, HermitianMatrix, MetricModel, ProbeConfig,
    RicciCertificate,
};
use crate::scenario::{Analysis, Fields, Scenario};

pub const SCHEMA: u32 = 1;
/// Flow residual below which a divisor counts as invariant.
pub const FLOW_TOL: f64 = 1e-6;
/// Minimum estimated distance to the divisor for Ricci sample points.
pub const RICCI_MIN_DIST: f64 = 0.4;
const FLOW_RADIUS: f64 = 2.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub probe: ProbeConfig,
    pub flow: FlowConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldEntry {
    pub name: String,
    pub expr: String,
    /// On the metric chart.
    pub local: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TangencyEntry {
    pub field: String,
    pub tangent: bool,
    /// `s(f)/f` when tangent.
    pub quotient: Option<String>,
    pub remainder: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivisorSectionReport {
    #[serde(flatten)]
    pub divisor: DivisorReport,
    /// The section restricted to the metric chart.
    pub chart_section: String,
    pub tangency: Vec<TangencyEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub bracket: String,
    /// `(component, monomial)` that cannot be matched by the span.
    pub outside_span_at: Option<(usize, String)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlgebraReport {
    pub abelian: bool,
    pub abelian_witness: Option<BracketEntry>,
    pub subalgebra: bool,
    pub subalgebra_witness: Option<BracketEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualEntry {
    pub i: usize,
    pub j: usize,
    pub l: usize,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KahlerReport {
    pub kahler: bool,
    /// Nonzero residuals `∂_l σ_ij − ∂_i σ_lj`, `i < l`.
    pub residuals: Vec<ResidualEntry>,
    pub sampled_max_abs: f64,
    pub sampled_points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChartCompleteness {
    pub chart: String,
    #[serde(flatten)]
    pub report: CompletenessReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompletenessSection {
    pub verdict: BasisCompleteness,
    /// Subalgebra test, tangency of every field, and the probe agree.
    pub criteria_agree: bool,
    pub charts: Vec<ChartCompleteness>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RicciSection {
    pub certificate: RicciCertificate,
    pub points: usize,
    pub max_value: f64,
    /// max of value / (1 + ‖g(p)‖).
    pub max_scaled: f64,
    pub tol: f64,
    pub pass: bool,
    pub probes: Vec<crate::metric::RicciProbe>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowSection {
    pub invariant: bool,
    pub tol: f64,
    pub blowups: usize,
    pub fields: Vec<FlowProbe>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeSection {
    #[serde(flatten)]
    pub report: ConeReport,
    pub stokes_rank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub scenario: String,
    pub ambient: String,
    pub chart: String,
    pub seed: u64,
    pub config: ConfigEcho,
    pub fields: Vec<FieldEntry>,
    pub algebra: AlgebraReport,
    pub divisor: Option<DivisorSectionReport>,
    pub kahler: Option<KahlerReport>,
    pub completeness: Option<CompletenessSection>,
    pub ricci: Option<RicciSection>,
    pub flow: Option<FlowSection>,
    pub cone: Option<ConeSection>,
}

fn bracket_entry(c: &AlgebraCheck) -> Option<BracketEntry> {
    c.witness.as_ref().map(|w| BracketEntry {
        i: w.i,
        j: w.j,
        bracket: w.bracket.to_string(),
        outside_span_at: w.certificate.as_ref().map(|c| (c.component, c.monomial.clone())),
    })
}

fn cpx(p: &[crate::symkernel::ExactScalar]) -> Vec<Complex64> {
    p.iter().map(|z| z.to_complex()).collect()
}

/// Seed precedence: explicit override, then the scenario, then 0.
pub fn effective_seed(s: &Scenario, seed_override: Option<u64>) -> u64 {
    seed_override.or(s.seed).unwrap_or(0)
}

/// The divisor: homogeneous on ℙⁿ, in chart coordinates on ℂⁿ.
pub fn scenario_divisor(s: &Scenario, basis: &FieldBasis) -> Result<(DivisorSection, Vec<Tangency>)> {
    match &s.fields {
        Fields::Affine(_) => {
            let d = divisor_affine(basis)?;
            let t = tangency_check(basis, &d)?;
            Ok((d, t))
        }
        Fields::Projective(v) => {
            let d = divisor_projective(v)?;
            let t = tangency_check_projective(v, &d)?;
            Ok((d, t))
        }
    }
}

pub fn run(s: &Scenario, seed_override: Option<u64>) -> Result<Report> {
    let seed = effective_seed(s, seed_override);
    let mut cfg = s.config.clone();
    cfg.seed = seed;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = s.basis()?;
    let chart_name = basis.chart().describe();

    // Degenerate bases are rejected before anything else.
    let (div, tangency) = scenario_divisor(s, &basis)?;
    let model = build_metric(&basis)?;

    let fields = s
        .field_names
        .iter()
        .zip(&s.field_exprs)
        .zip(basis.fields())
        .map(|((name, expr), local)| FieldEntry {
            name: name.clone(),
            expr: expr.clone(),
            local: local.to_string(),
        })
        .collect();

    let abelian = is_abelian(&basis);
    let subalgebra = is_subalgebra(&basis);
    let algebra = AlgebraReport {
        abelian: abelian.holds,
        abelian_witness: bracket_entry(&abelian),
        subalgebra: subalgebra.holds,
        subalgebra_witness: bracket_entry(&subalgebra),
    };

    let all_tangent = tangency.iter().all(|t| t.tangent);
    let divisor = s.wants(Analysis::Divisor).then(|| DivisorSectionReport {
        divisor: div.report(tangency.iter().map(|t| t.tangent).collect()),
        chart_section: model.det_s().monic().to_string(),
        tangency: tangency
            .iter()
            .zip(&s.field_names)
            .map(|(t, name)| TangencyEntry {
                field: name.clone(),
                tangent: t.tangent,
                quotient: t.quotient.as_ref().map(|q| q.to_string()),
                remainder: t.remainder.to_string(),
            })
            .collect(),
    });

    let completeness = if s.wants(Analysis::Completeness) {
        let mut charts = Vec::new();
        match &s.fields {
            Fields::Affine(_) => charts.push(ChartCompleteness {
                chart: chart_name.clone(),
                report: completeness_analysis(&model, &cfg, &mut rng)?,
            }),
            Fields::Projective(v) => {
                for c in 0..=s.ambient.n() {
                    let b = s.basis_on(v, c)?;
                    let m = build_metric(&b)?;
                    charts.push(ChartCompleteness {
                        chart: b.chart().describe(),
                        report: completeness_analysis(&m, &cfg, &mut rng)?,
                    });
                }
            }
        }
        let verdicts: Vec<BasisCompleteness> = charts.iter().map(|c| c.report.verdict).collect();
        let verdict = if verdicts.contains(&BasisCompleteness::Incomplete) {
            BasisCompleteness::Incomplete
        } else if verdicts.iter().all(|v| *v == BasisCompleteness::Complete) {
            BasisCompleteness::Complete
        } else {
            BasisCompleteness::Inconclusive
        };
        let probe_says = match verdict {
            BasisCompleteness::Complete => Some(true),
            BasisCompleteness::Incomplete => Some(false),
            BasisCompleteness::Inconclusive => None,
        };
        Some(CompletenessSection {
            verdict,
            criteria_agree: probe_says == Some(subalgebra.holds) && all_tangent == subalgebra.holds,
            charts,
        })
    } else {
        None
    };

    let needs_points = s.wants(Analysis::Ricci) || s.wants(Analysis::Kahler);
    let exact_points = if needs_points {
        sample_off_divisor(&model, cfg.exact_points.max(cfg.ricci_points), RICCI_MIN_DIST, &mut rng)
    } else {
        Vec::new()
    };
    let float_points: Vec<Vec<Complex64>> = exact_points.iter().map(|p| cpx(p)).collect();

    let kahler = s.wants(Analysis::Kahler).then(|| {
        let d = kahler_defect(&model, &float_points);
        KahlerReport {
            kahler: d.is_kahler(),
            residuals: d
                .residuals
                .iter()
                .map(|r| ResidualEntry {
                    i: r.i,
                    j: r.j,
                    l: r.l,
                    value: r.value.to_string(),
                })
                .collect(),
            sampled_max_abs: d.max_abs,
            sampled_points: d.points,
        }
    });

    let ricci = if s.wants(Analysis::Ricci) {
        let certificate = ricci_certificate(&model, &exact_points[..cfg.exact_points.min(exact_points.len())]);
        let mut probes = Vec::new();
        for p in float_points.iter().take(cfg.ricci_points) {
            probes.push(ricci_probe(&model, p, cfg.h, cfg.floor)?);
        }
        let max_value = probes.iter().map(|p| p.value).fold(0.0, f64::max);
        let max_scaled = probes.iter().map(|p| p.value / p.scale).fold(0.0, f64::max);
        Some(RicciSection {
            pass: certificate.holds() && max_scaled < cfg.ricci_tol,
            certificate,
            points: probes.len(),
            max_value,
            max_scaled,
            tol: cfg.ricci_tol,
            probes,
        })
    } else {
        None
    };

    let flow = if s.wants(Analysis::Flow) {
        let starts = sample_divisor_points(model.reduced_det(), cfg.divisor_points, FLOW_RADIUS, &mut rng);
        let mut out = Vec::new();
        let mut blowups = 0;
        for k in 0..basis.dim() {
            let mut per_point = Vec::new();
            for st in &starts {
                match flow_invariance_probe(&basis, model.det_s(), k, std::slice::from_ref(st), &s.flow) {
                    Ok(p) => per_point.push(p.max_residual),
                    Err(Error::BlowupDetected { .. }) => blowups += 1,
                    Err(e) => return Err(e),
                }
            }
            let max_residual = per_point.iter().cloned().fold(0.0, f64::max);
            out.push(FlowProbe {
                field: k,
                points: per_point.len(),
                per_point,
                max_residual,
            });
        }
        Some(FlowSection {
            invariant: out.iter().all(|f| f.max_residual < FLOW_TOL),
            tol: FLOW_TOL,
            blowups,
            fields: out,
        })
    } else {
        None
    };

    let cone = match (&s.lattice, s.wants(Analysis::Cone)) {
        (Some(gens), true) => {
            let lat = LatticeData::new(s.ambient.n(), gens.clone())?;
            Some(ConeSection {
                report: cone_report(&lat),
                stokes_rank: crate::cone::stokes_constraints(&lat).rank,
            })
        }
        _ => None,
    };

    Ok(Report {
        schema: SCHEMA,
        scenario: s.name.clone(),
        ambient: s.ambient.to_string(),
        chart: chart_name,
        seed,
        config: ConfigEcho {
            probe: cfg,
            flow: s.flow.clone(),
        },
        fields,
        algebra,
        divisor,
        kahler,
        completeness,
        ricci,
        flow,
        cone,
    })
}

/// `g` at one point of the metric chart.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricPointReport {
    pub schema: u32,
    pub scenario: String,
    pub chart: String,
    pub point: Vec<[f64; 2]>,
    pub g: HermitianMatrix,
    pub det: f64,
    pub positive_definite: bool,
}

pub fn metric_point(s: &Scenario, p: &[Complex64]) -> Result<MetricPointReport> {
    let basis = s.basis()?;
    let model: MetricModel = build_metric(&basis)?;
    let g = metric_at(&model, p, s.config.floor)?;
    Ok(MetricPointReport {
        schema: SCHEMA,
        scenario: s.name.clone(),
        chart: basis.chart().describe(),
        point: p.iter().map(|z| [z.re, z.im]).collect(),
        det: g.det(),
        positive_definite: positive_definite(&g),
        g,
    })
}

pub fn to_json<T: Serialize>(r: &T) -> String {
    serde_json::to_string_pretty(r).expect("reports serialize") + "\n"
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn render_text(r: &Report) -> String {
    let mut o = String::new();
    let _ = writeln!(
        o,
        "scenario {} on {} (metric chart {}, seed {})",
        r.scenario, r.ambient, r.chart, r.seed
    );
    for f in &r.fields {
        let _ = writeln!(o, "  {} = {}    [chart: {}]", f.name, f.expr, f.local);
    }
    let a = &r.algebra;
    let _ = write!(o, "abelian: {}", yes(a.abelian));
    if let Some(w) = &a.abelian_witness {
        let _ = write!(o, "  ([s{}, s{}] = {})", w.i + 1, w.j + 1, w.bracket);
    }
    let _ = write!(o, "\nsubalgebra: {}", yes(a.subalgebra));
    if let Some(w) = &a.subalgebra_witness {
        let _ = write!(o, "  ([s{}, s{}] = {} leaves the span", w.i + 1, w.j + 1, w.bracket);
        if let Some((c, m)) = &w.outside_span_at {
            let _ = write!(o, " at component {c}, monomial {m}");
        }
        o.push(')');
    }
    o.push('\n');
    if let Some(d) = &r.divisor {
        let factors: Vec<String> = d
            .divisor
            .factors
            .iter()
            .map(|f| format!("({})^{}", f.poly, f.mult))
            .collect();
        let _ = writeln!(
            o,
            "divisor: {} = 0, degree {}, factors [{}], reduced: {}",
            d.divisor.section,
            d.divisor.degree,
            factors.join(", "),
            yes(d.divisor.reduced)
        );
        let _ = writeln!(o, "  on the metric chart: {} = 0", d.chart_section);
        for t in &d.tangency {
            match &t.quotient {
                Some(q) => {
                    let _ = writeln!(o, "  {} tangent: s(f) = ({}) f", t.field, q);
                }
                None => {
                    let _ = writeln!(o, "  {} not tangent: s(f) mod f = {}", t.field, t.remainder);
                }
            }
        }
    }
    if let Some(k) = &r.kahler {
        let _ = writeln!(o, "kahler: {}", yes(k.kahler));
        for e in &k.residuals {
            let _ = writeln!(o, "  residual (i={}, j={}, l={}) = {}", e.i, e.j, e.l, e.value);
        }
    }
    if let Some(c) = &r.completeness {
        let v = match c.verdict {
            BasisCompleteness::Complete => "complete",
            BasisCompleteness::Incomplete => "incomplete",
            BasisCompleteness::Inconclusive => "inconclusive",
        };
        let _ = writeln!(o, "completeness: {v} (criteria agree: {})", yes(c.criteria_agree));
        for ch in &c.charts {
            let _ = writeln!(
                o,
                "  chart {}: {} probes from {} divisor points",
                ch.chart,
                ch.report.probes.len(),
                ch.report.divisor_points
            );
            for p in &ch.report.probes {
                let tail: Vec<String> = p
                    .lengths
                    .iter()
                    .rev()
                    .take(3)
                    .rev()
                    .map(|l| format!("{l:.3e}"))
                    .collect();
                let _ = writeln!(o, "    {:?}: last L_j = [{}]", p.verdict, tail.join(", "));
            }
        }
    }
    if let Some(x) = &r.ricci {
        let _ = writeln!(
            o,
            "ricci-flat: {} (exact det identity at {} points: {}; max |ddbar log det g| = {:.3e} over {} points)",
            yes(x.pass),
            x.certificate.points_checked,
            yes(x.certificate.holds()),
            x.max_value,
            x.points
        );
    }
    if let Some(f) = &r.flow {
        let _ = writeln!(o, "flow invariance: {}", yes(f.invariant));
        for p in &f.fields {
            let _ = writeln!(
                o,
                "  s{}: max residual {:.3e} over {} points",
                p.field + 1,
                p.max_residual,
                p.points
            );
        }
    }
    if let Some(c) = &r.cone {
        let dim = match &c.report.cone_dim {
            crate::cone::ConeDim::Asserted(d) => d.to_string(),
            crate::cone::ConeDim::NotAsserted => "not asserted".into(),
        };
        let _ = writeln!(
            o,
            "cone: k={} l={} m={} semi-torus: {} dimension: {} (Stokes solution space {})",
            c.report.k,
            c.report.l,
            c.report.m,
            yes(c.report.semi_torus),
            dim,
            c.report.stokes_dim
        );
    }
    o
}
