//! Manifest parsing, command dispatch, and report serialization.
//!
//! A manifest is a strict TOML document (`format = 1`) declaring the
//! coefficient field, the weighted plane, the branch curve components,
//! and the points to resolve.  Unknown keys are rejected.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::cyclic_quotient::{correction_term, normalize, DivisorCombination};
use crate::exact_algebra::{format_q, parse_poly, qi, AlgebraError, Field, FieldElement, Q, SparsePoly};
use crate::global_cover::{
    beta_check, irregularity, prepare_points, render_report, validate, CoverSpec,
    IrregularityReport, PointDecl, PreparedPoint,
};
use crate::qresolution::ScriptStep;
use crate::quasi_adjunction::{
    jumping_values, quotient_basis_with_order, render_strata, Stratum,
};

fn domain(msg: impl Into<String>) -> AlgebraError {
    AlgebraError::Domain(msg.into())
}

// ---------------------------------------------------------------------------
// Manifest model
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub format: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSection>,
    pub plane: PlaneSection,
    pub curve: CurveSection,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<PointSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<OptionsSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSection {
    /// Monic minimal polynomial of the generator, written in `t`.
    pub minimal_polynomial: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaneSection {
    pub weights: [i64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSection {
    pub components: Vec<ComponentSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSection {
    pub equation: String,
    pub multiplicity: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSection {
    pub chart: usize,
    pub coords: [String; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub change: Option<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub script: Option<Vec<ScriptSection>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptSection {
    pub weights: [u64; 2],
    pub chart: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub change: Option<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsSection {
    /// Minimum jet order used when modules are displayed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<u32>,
    /// Default output path for JSON reports.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

pub fn parse_manifest(text: &str) -> Result<Manifest, AlgebraError> {
    let m: Manifest = toml::from_str(text).map_err(|e| domain(format!("manifest: {e}")))?;
    if m.format != 1 {
        return Err(domain(format!(
            "unsupported manifest format {}; this tool reads format 1",
            m.format
        )));
    }
    if m.curve.components.is_empty() {
        return Err(domain("at least one component required"));
    }
    Ok(m)
}

pub fn serialize_manifest(m: &Manifest) -> Result<String, AlgebraError> {
    toml::to_string_pretty(m).map_err(|e| domain(format!("manifest: {e}")))
}

fn build_field(m: &Manifest) -> Result<Arc<Field>, AlgebraError> {
    match &m.field {
        None => Ok(Field::rationals()),
        Some(f) => {
            // the minimal polynomial is written in t; the parser knows
            // t only as the generator, so read it as a plain x-poly
            let s: String = f
                .minimal_polynomial
                .chars()
                .map(|c| if c == 't' { 'x' } else { c })
                .collect();
            let p = parse_poly(&s, &Field::rationals(), 1)?;
            let deg = p.total_degree().ok_or_else(|| domain("empty minimal polynomial"))?;
            let mut coeffs = vec![Q::zero(); deg as usize + 1];
            for (e, c) in &p.terms {
                coeffs[e[0] as usize] = c
                    .as_rational()
                    .ok_or_else(|| domain("minimal polynomial must have rational coefficients"))?
                    .clone();
            }
            Field::extension(coeffs)
        }
    }
}

fn parse_constant(field: &Arc<Field>, s: &str) -> Result<FieldElement, AlgebraError> {
    let p = parse_poly(s, field, 1)?;
    for e in p.terms.keys() {
        if e[0] != 0 {
            return Err(domain(format!("'{s}' is not a constant coordinate")));
        }
    }
    Ok(p.coeff(&[0]))
}

fn parse_change(
    field: &Arc<Field>,
    c: &[String; 2],
) -> Result<(SparsePoly, SparsePoly), AlgebraError> {
    Ok((parse_poly(&c[0], field, 2)?, parse_poly(&c[1], field, 2)?))
}

pub fn build_spec(m: &Manifest) -> Result<CoverSpec, AlgebraError> {
    let field = build_field(m)?;
    let mut components = vec![];
    for c in &m.curve.components {
        components.push((parse_poly(&c.equation, &field, 3)?, c.multiplicity));
    }
    let mut points = vec![];
    for p in &m.points {
        let script = match &p.script {
            None => None,
            Some(steps) => {
                let mut out = vec![];
                for s in steps {
                    out.push(ScriptStep {
                        change: s.change.as_ref().map(|c| parse_change(&field, c)).transpose()?,
                        weights: (s.weights[0], s.weights[1]),
                        chart: s.chart,
                    });
                }
                Some(out)
            }
        };
        points.push(PointDecl {
            chart: p.chart,
            coords: (
                parse_constant(&field, &p.coords[0])?,
                parse_constant(&field, &p.coords[1])?,
            ),
            change: p.change.as_ref().map(|c| parse_change(&field, c)).transpose()?,
            script,
        });
    }
    validate(&field, m.plane.weights, components, points)
}

// ---------------------------------------------------------------------------
// JSON reports
// ---------------------------------------------------------------------------

fn q_string(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn report_json(report: &IrregularityReport) -> serde_json::Value {
    serde_json::json!({
        "format": 1,
        "kind": "irregularity",
        "degree": report.d,
        "h1": report.h1,
        "charpoly": {
            "factored": report.charpoly_factored,
            "expanded": report.charpoly_expanded,
        },
        "rows": report.rows.iter().map(|r| serde_json::json!({
            "k": r.k,
            "s_k": r.s_k,
            "sections": r.columns.len(),
            "local_dims": r.local_dims,
            "rank": r.rank,
            "h2": r.ker_dim,
            "coker": r.coker_dim,
        })).collect::<Vec<_>>(),
    })
}

pub fn strata_json(center: &str, k: i64, strata: &[Stratum]) -> serde_json::Value {
    serde_json::json!({
        "format": 1,
        "kind": "jumping-table",
        "center": center,
        "k": k,
        "strata": strata.iter().map(|s| serde_json::json!({
            "from": q_string(&s.from),
            "to": q_string(&s.to),
            "class": s.module.sigma,
            "dim": s.module.dim(),
            "basis": s.module.basis_strings(),
        })).collect::<Vec<_>>(),
    })
}

fn output_path(requested: Option<&Path>, options: Option<&OptionsSection>) -> Option<PathBuf> {
    let p = requested
        .map(|p| p.to_path_buf())
        .or_else(|| options.and_then(|o| o.output.as_ref().map(PathBuf::from)))?;
    if p.is_relative() {
        if let Ok(dir) = std::env::var("QCOVER_OUT_DIR") {
            return Some(Path::new(&dir).join(p));
        }
    }
    Some(p)
}

// ---------------------------------------------------------------------------
// Command dispatch
// ---------------------------------------------------------------------------

#[derive(Parser, Debug)]
#[command(name = "qcover", about = "Irregularity of cyclic covers of weighted projective planes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the resolution graph of every declared point.
    Resolve { manifest: PathBuf },
    /// Print the jumping table of a declared point.
    Qadj {
        manifest: PathBuf,
        #[arg(long)]
        point: usize,
        /// Local eigenvalue class; all classes of the point when absent.
        #[arg(long)]
        k: Option<i64>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Compute the irregularity report of the cover.
    Irr {
        manifest: PathBuf,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Correction term of a divisor class at a cyclic quotient point.
    Rcorr {
        /// Quotient type as d,p,q.
        #[arg(long = "type")]
        qtype: String,
        /// Formal combination of coordinate divisors, e.g. "x-4z".
        #[arg(long)]
        rep: String,
        /// Multiple of the represented class to evaluate.
        #[arg(long, allow_negative_numbers = true)]
        class: i64,
    },
    /// Evaluate the local Riemann-Roch balance at every (point, k).
    CheckBeta { manifest: PathBuf },
}

fn load_spec(path: &Path) -> Result<(Manifest, CoverSpec), AlgebraError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| domain(format!("{}: {e}", path.display())))?;
    let m = parse_manifest(&text)?;
    let spec = build_spec(&m)?;
    Ok((m, spec))
}

/// Turn a 2-of-3-variable polynomial string into a formal divisor
/// combination in the two variables that occur (so both "x - 4z" and
/// "x - 4y" describe the same combination).
fn parse_divisor_combination(s: &str) -> Result<DivisorCombination, AlgebraError> {
    let field = Field::rationals();
    let p = parse_poly(s, &field, 3)?;
    let mut used = [false; 3];
    for e in p.terms.keys() {
        for i in 0..3 {
            if e[i] > 0 {
                used[i] = true;
            }
        }
    }
    let vars: Vec<usize> = (0..3).filter(|&i| used[i]).collect();
    if vars.len() > 2 {
        return Err(domain("a local combination uses at most two coordinates"));
    }
    let (a, b) = match vars.as_slice() {
        [a, b] => (*a, *b),
        [a] => (*a, (*a + 1) % 3),
        _ => (0, 1),
    };
    let mut combo = vec![];
    for (e, c) in &p.terms {
        let r = c
            .as_rational()
            .ok_or_else(|| domain("combination coefficients must be rational"))?;
        combo.push((r.clone(), (e[a], e[b])));
    }
    Ok(combo)
}

fn cmd_rcorr(qtype: &str, rep: &str, class: i64) -> Result<String, AlgebraError> {
    let parts: Vec<i64> = qtype
        .split(',')
        .map(|s| s.trim().parse::<i64>().map_err(|_| domain("bad --type, expected d,p,q")))
        .collect::<Result<_, _>>()?;
    let [d, p, q] = parts.as_slice() else {
        return Err(domain("bad --type, expected d,p,q"));
    };
    if *d < 1 {
        return Err(domain("quotient order must be positive"));
    }
    let t = normalize(*d as u64, *p, *q)?;
    let combo: DivisorCombination = parse_divisor_combination(rep)?
        .into_iter()
        .map(|(c, e)| (c * qi(class), e))
        .collect();
    Ok(format!("{}\n", format_q(&correction_term(&t, &combo))))
}

fn center_string(p: &PreparedPoint) -> String {
    if p.center.0 <= 1 {
        "smooth".to_string()
    } else {
        format!("1/{}({},{})", p.center.0, p.center.1, p.center.2)
    }
}

fn cmd_qadj(
    spec: &CoverSpec,
    options: Option<&OptionsSection>,
    point: usize,
    k: Option<i64>,
    json: Option<&Path>,
) -> Result<String, AlgebraError> {
    if point >= spec.points.len() {
        return Err(domain(format!("no declared point with index {point}")));
    }
    let p = crate::global_cover::prepare_point(spec, point)?;
    let ks: Vec<i64> = match k {
        Some(k) => vec![k],
        None => (0..p.center.0.max(1) as i64).collect(),
    };
    let min_order = options.and_then(|o| o.truncation);
    let mut out = String::new();
    let mut docs = vec![];
    for k in ks {
        let mut strata = jumping_values(&p.graph, 0, k)?;
        if let Some(n) = min_order {
            for s in &mut strata {
                if s.module.jet_order < n {
                    s.module = quotient_basis_with_order(&p.graph, 0, &s.from, k, n)?;
                }
            }
        }
        out.push_str(&format!("point {point} ({}), k = {k}:\n", center_string(&p)));
        out.push_str(&render_strata(&strata));
        docs.push(strata_json(&center_string(&p), k, &strata));
    }
    if let Some(path) = output_path(json, options) {
        let doc = serde_json::Value::Array(docs);
        std::fs::write(&path, serde_json::to_string_pretty(&doc).unwrap())
            .map_err(|e| domain(format!("{}: {e}", path.display())))?;
    }
    Ok(out)
}

fn cmd_check_beta(spec: &CoverSpec) -> Result<(String, bool), AlgebraError> {
    let points = prepare_points(spec)?;
    let mut out = String::new();
    let mut all_zero = true;
    for (i, p) in points.iter().enumerate() {
        for k in 0..spec.d {
            let b = beta_check(spec, p, k)?;
            if !b.is_zero() {
                all_zero = false;
            }
            out.push_str(&format!(
                "point {i} ({})  k = {k:>2}  beta = {}\n",
                center_string(p),
                format_q(&b)
            ));
        }
    }
    Ok((out, all_zero))
}

/// Run a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result: Result<String, AlgebraError> = (|| match &cli.command {
        Command::Resolve { manifest } => {
            let (_, spec) = load_spec(manifest)?;
            let points = prepare_points(&spec)?;
            let mut out = String::new();
            for (i, p) in points.iter().enumerate() {
                out.push_str(&format!("point {i} ({}):\n", center_string(p)));
                out.push_str(&p.graph.render_text());
                out.push('\n');
            }
            Ok(out)
        }
        Command::Qadj { manifest, point, k, json } => {
            let (m, spec) = load_spec(manifest)?;
            cmd_qadj(&spec, m.options.as_ref(), *point, *k, json.as_deref())
        }
        Command::Irr { manifest, json } => {
            let (m, spec) = load_spec(manifest)?;
            let report = irregularity(&spec)?;
            if let Some(path) = output_path(json.as_deref(), m.options.as_ref()) {
                std::fs::write(&path, serde_json::to_string_pretty(&report_json(&report)).unwrap())
                    .map_err(|e| domain(format!("{}: {e}", path.display())))?;
            }
            Ok(render_report(&report))
        }
        Command::Rcorr { qtype, rep, class } => cmd_rcorr(qtype, rep, *class),
        Command::CheckBeta { manifest } => {
            let (_, spec) = load_spec(manifest)?;
            let (out, all_zero) = cmd_check_beta(&spec)?;
            if all_zero {
                Ok(out)
            } else {
                print!("{out}");
                Err(domain("a Riemann-Roch balance is nonzero"))
            }
        }
    })();
    match result {
        Ok(out) => {
            print!("{out}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

// ---------------------------------------------------------------------------
