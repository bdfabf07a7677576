//! Plain-text scenario files.
//!
//! ```text
//! # comment
//! name p2_toric
//! ambient P2            # or C2; affine charts may rename variables:
//! vars x, y             # (C only, default z1..zn)
//! field s1 = z1 d1;
//! field s2 = z2 d2;
//! chart 0               # P only: chart used for the metric (default 0)
//! lattice i, 0          # one generator per line; `lattice none` = trivial
//! lattice 0, i
//! seed 7
//! h 1e-4
//! depth 24
//! steps 1000
//! analyze divisor kahler completeness ricci flow cone
//! ```
//!
//! Keys may appear in any order after `ambient`. Unknown keys are errors.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{parse_field, parse_projective_field, Chart, FieldBasis, FlowConfig, ProjectiveField, VectorField};
use crate::metric::ProbeConfig;
use crate::symkernel::{parse_scalar, ExactScalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ambient {
    Affine { n: usize, vars: Vec<String> },
    Projective { n: usize },
}

impl Ambient {
    pub fn n(&self) -> usize {
        match self {
            Ambient::Affine { n, .. } | Ambient::Projective { n } => *n,
        }
    }
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ambient::Affine { n, .. } => write!(f, "C{n}"),
            Ambient::Projective { n } => write!(f, "P{n}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Analysis {
    Divisor,
    Kahler,
    Completeness,
    Ricci,
    Flow,
    Cone,
}

impl Analysis {
    pub const ALL: [Analysis; 6] = [
        Analysis::Divisor,
        Analysis::Kahler,
        Analysis::Completeness,
        Analysis::Ricci,
        Analysis::Flow,
        Analysis::Cone,
    ];

    fn from_word(w: &str) -> Option<Analysis> {
        Some(match w {
            "divisor" => Analysis::Divisor,
            "kahler" => Analysis::Kahler,
            "completeness" => Analysis::Completeness,
            "ricci" => Analysis::Ricci,
            "flow" => Analysis::Flow,
            "cone" => Analysis::Cone,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Fields {
    Affine(Vec<VectorField>),
    Projective(Vec<ProjectiveField>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub ambient: Ambient,
    pub field_names: Vec<String>,
    /// Expressions as written, for echoing.
    pub field_exprs: Vec<String>,
    pub fields: Fields,
    pub chart: usize,
    /// `None` when no `lattice` line is present.
    pub lattice: Option<Vec<Vec<ExactScalar>>>,
    pub seed: Option<u64>,
    pub config: ProbeConfig,
    pub flow: FlowConfig,
    pub analyses: BTreeSet<Analysis>,
}

impl Scenario {
    /// The basis on the metric chart.
    pub fn basis(&self) -> Result<FieldBasis> {
        match &self.fields {
            Fields::Affine(v) => FieldBasis::new(v.clone()),
            Fields::Projective(v) => self.basis_on(v, self.chart),
        }
    }

    pub fn basis_on(&self, fields: &[ProjectiveField], chart: usize) -> Result<FieldBasis> {
        FieldBasis::new(fields.iter().map(|f| crate::fields::localize(f, chart)).collect())
    }

    pub fn wants(&self, a: Analysis) -> bool {
        self.analyses.contains(&a)
    }
}

/// Byte column (1-based) of `needle`'s start inside `line`.
fn col_of(line: &str, needle: &str) -> usize {
    needle.as_ptr() as usize - line.as_ptr() as usize + 1
}

/// Split on top-level commas, keeping each piece's column.
fn split_commas(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push((start, &s[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push((start, &s[start..]));
    out
}

fn parse_number<T: std::str::FromStr>(v: &str, line: usize, col: usize, what: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::parse(line, col, format!("invalid {what} '{v}'")))
}

pub fn parse_scenario(src: &str) -> Result<Scenario> {
    let mut name = String::from("scenario");
    let mut ambient: Option<Ambient> = None;
    let mut raw_fields: Vec<(usize, usize, String, String)> = Vec::new();
    let mut chart: Option<(usize, usize)> = None;
    let mut lattice: Option<Vec<Vec<ExactScalar>>> = None;
    let mut lattice_lines: Vec<(usize, usize)> = Vec::new();
    let mut seed = None;
    let mut config = ProbeConfig::default();
    let mut flow = FlowConfig::default();
    let mut analyses: BTreeSet<Analysis> = BTreeSet::new();

    for (idx, full) in src.lines().enumerate() {
        let lineno = idx + 1;
        let line = full.split('#').next().unwrap_or("");
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let (key, rest) = trimmed.split_once(char::is_whitespace).unwrap_or((trimmed, ""));
        let rest = rest.trim();
        let rest_col = if rest.is_empty() {
            full.len() + 1
        } else {
            col_of(full, rest)
        };
        let key_col = col_of(full, key);
        if ambient.is_none() && key != "ambient" && key != "name" {
            return Err(Error::parse(lineno, key_col, "the first declaration must be 'ambient'"));
        }
        match key {
            "name" => name = rest.to_string(),
            "ambient" => {
                if ambient.is_some() {
                    return Err(Error::parse(lineno, key_col, "duplicate 'ambient'"));
                }
                let (kind, dim) = rest.split_at(rest.len().min(1));
                let n: usize = parse_number(dim, lineno, rest_col + 1, "dimension")?;
                if n == 0 {
                    return Err(Error::parse(lineno, rest_col + 1, "dimension must be positive"));
                }
                ambient = Some(match kind {
                    "C" => Ambient::Affine {
                        n,
                        vars: (1..=n).map(|k| format!("z{k}")).collect(),
                    },
                    "P" => Ambient::Projective { n },
                    _ => return Err(Error::parse(lineno, rest_col, "expected C<n> or P<n>")),
                });
            }
            "vars" => {
                let Some(Ambient::Affine { n, vars }) = ambient.as_mut() else {
                    return Err(Error::parse(
                        lineno,
                        key_col,
                        "'vars' only applies to an affine ambient",
                    ));
                };
                let names: Vec<String> = rest.split(',').map(|s| s.trim().to_string()).collect();
                if names.len() != *n {
                    return Err(Error::parse(lineno, rest_col, format!("expected {n} variable names")));
                }
                for v in &names {
                    let ok = v.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                        && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                        && v != "i"
                        && !v.starts_with('d');
                    if !ok {
                        return Err(Error::parse(lineno, rest_col, format!("invalid variable name '{v}'")));
                    }
                }
                if !raw_fields.is_empty() {
                    return Err(Error::parse(lineno, key_col, "'vars' must precede the fields"));
                }
                *vars = names;
            }
            "field" => {
                let Some((lhs, rhs)) = rest.split_once('=') else {
                    return Err(Error::parse(lineno, rest_col, "expected 'field <name> = <expression>'"));
                };
                let fname = lhs.trim();
                if fname.is_empty() || !fname.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    return Err(Error::parse(lineno, rest_col, "invalid field name"));
                }
                let expr = rhs.trim().trim_end_matches(';').trim_end();
                let expr_col = if expr.is_empty() {
                    full.len() + 1
                } else {
                    col_of(full, expr)
                };
                raw_fields.push((lineno, expr_col, fname.to_string(), expr.to_string()));
            }
            "chart" => chart = Some((parse_number(rest, lineno, rest_col, "chart index")?, lineno)),
            "lattice" => {
                let lat = lattice.get_or_insert_with(Vec::new);
                if rest == "none" {
                    continue;
                }
                let inner = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(rest);
                let base = col_of(full, inner);
                let mut v = Vec::new();
                for (off, piece) in split_commas(inner) {
                    let t = piece.trim();
                    let c = base + off + (piece.len() - piece.trim_start().len());
                    v.push(parse_scalar(t).map_err(|e| e.at(lineno, c - 1))?);
                }
                lattice_lines.push((lineno, rest_col));
                lat.push(v);
            }
            "seed" => seed = Some(parse_number(rest, lineno, rest_col, "seed")?),
            "h" => config.h = parse_number(rest, lineno, rest_col, "step")?,
            "depth" => config.depth = parse_number(rest, lineno, rest_col, "depth")?,
            "points" => config.divisor_points = parse_number(rest, lineno, rest_col, "point count")?,
            "steps" => flow.steps = parse_number(rest, lineno, rest_col, "step count")?,
            "tmax" => flow.t_max = parse_number(rest, lineno, rest_col, "time")?,
            "analyze" => {
                for w in rest.split_whitespace() {
                    if w == "all" {
                        analyses.extend(Analysis::ALL);
                        continue;
                    }
                    let a = Analysis::from_word(w)
                        .ok_or_else(|| Error::parse(lineno, col_of(full, w), format!("unknown analysis '{w}'")))?;
                    analyses.insert(a);
                }
            }
            _ => return Err(Error::parse(lineno, key_col, format!("unknown key '{key}'"))),
        }
    }

    let ambient = ambient.ok_or_else(|| Error::parse(1, 1, "missing 'ambient' declaration"))?;
    let n = ambient.n();
    let last_line = src.lines().count().max(1);
    if raw_fields.len() != n {
        let line = raw_fields.last().map_or(last_line, |f| f.0);
        return Err(Error::parse(
            line,
            1,
            format!("{ambient} needs exactly {n} fields, found {}", raw_fields.len()),
        ));
    }
    for ((lineno, col), v) in lattice_lines.iter().zip(lattice.iter().flatten()) {
        if v.len() != n {
            return Err(Error::parse(
                *lineno,
                *col,
                format!("lattice generators need {n} entries"),
            ));
        }
    }
    let field_names: Vec<String> = raw_fields.iter().map(|f| f.2.clone()).collect();
    let field_exprs: Vec<String> = raw_fields.iter().map(|f| f.3.clone()).collect();
    let fields = match &ambient {
        Ambient::Affine { vars, .. } => {
            let ch = Chart::affine(vars);
            Fields::Affine(
                raw_fields
                    .iter()
                    .map(|(l, c, _, e)| parse_field(e, &ch).map_err(|err| locate(err, *l, *c)))
                    .collect::<Result<_>>()?,
            )
        }
        Ambient::Projective { n } => Fields::Projective(
            raw_fields
                .iter()
                .map(|(l, c, _, e)| parse_projective_field(e, *n).map_err(|err| locate(err, *l, *c)))
                .collect::<Result<_>>()?,
        ),
    };
    let chart = match (chart, &ambient) {
        (None, _) => 0,
        (Some((c, _)), Ambient::Projective { n }) if c <= *n => c,
        (Some((_, line)), _) => return Err(Error::parse(line, 1, "chart index out of range (or ambient is affine)")),
    };
    if analyses.is_empty() {
        analyses.extend(Analysis::ALL);
    }
    Ok(Scenario {
        name,
        ambient,
        field_names,
        field_exprs,
        fields,
        chart,
        lattice,
        seed,
        config,
        flow,
        analyses,
    })
}

/// Place an expression-level error on its line; non-parse errors (such as a
/// non-linear projective field) point at the start of the expression.
fn locate(err: Error, line: usize, col: usize) -> Error {
    match err {
        Error::Parse { .. } => err.at(line, col - 1),
        other => Error::parse(line, col, other.to_string()),
    }
}

pub const BUNDLED: [(&str, &str); 5] = [
    ("p2_toric", include_str!("../scenarios/p2_toric.scn")),
    ("p2_nilpotent", include_str!("../scenarios/p2_nilpotent.scn")),
    ("p2_pencil", include_str!("../scenarios/p2_pencil.scn")),
    ("c2_incomplete", include_str!("../scenarios/c2_incomplete.scn")),
    ("p3_toric", include_str!("../scenarios/p3_toric.scn")),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_scenarios_parse() {
        for (name, src) in BUNDLED {
            let s = parse_scenario(src).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(s.name, name);
        }
    }

    #[test]
    fn affine_with_vars() {
        let s = parse_scenario("ambient C2\nvars x, y\nfield a = dx\nfield b = x^2 dy\nanalyze divisor\n").unwrap();
        assert_eq!(s.ambient.to_string(), "C2");
        assert!(s.wants(Analysis::Divisor) && !s.wants(Analysis::Cone));
        assert_eq!(s.basis().unwrap().to_string(), "{dx, (x^2) dy}");
    }

    #[test]
    fn lattice_lines() {
        let s = parse_scenario("ambient P2\nfield a = z1 d1\nfield b = z2 d2\nlattice (i, 0)\nlattice 0, 1/2 + i\n")
            .unwrap();
        let l = s.lattice.unwrap();
        assert_eq!(l.len(), 2);
        assert_eq!(l[1][1], parse_scalar("1/2 + i").unwrap());
        let s = parse_scenario("ambient P2\nfield a = z1 d1\nfield b = z2 d2\nlattice none\n").unwrap();
        assert_eq!(s.lattice, Some(vec![]));
    }

    #[test]
    fn error_positions() {
        let e = parse_scenario("ambient C2\nfield a = d1 +* d2\nfield b = d2\n").unwrap_err();
        assert!(
            matches!(
                e,
                Error::Parse {
                    line: 2,
                    column: 15,
                    ..
                }
            ),
            "{e:?}"
        );
        let e = parse_scenario("ambient P2\nfield a = z1^2 d1\nfield b = z2 d2\n").unwrap_err();
        assert!(
            matches!(
                e,
                Error::Parse {
                    line: 2,
                    column: 11,
                    ..
                }
            ),
            "{e:?}"
        );
        let e = parse_scenario("ambient C2\nfield a = d1\nwibble 3\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, column: 1, .. }), "{e:?}");
        let e = parse_scenario("field a = d1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = parse_scenario("ambient C2\nfield a = d1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = parse_scenario("ambient C2\nfield a = d1\nfield b = d2\nlattice 1, 2x\n").unwrap_err();
        assert!(
            matches!(
                e,
                Error::Parse {
                    line: 4,
                    column: 13,
                    ..
                }
            ),
            "{e:?}"
        );
    }
}
