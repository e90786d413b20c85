//! Command-line front end.

use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::algebra::{Field, PolyMap, PolyMatrix, Polynomial};
use crate::anomaly::{search_monomial_anomalies, verify_known_examples, AnomalyRecord};
use crate::classifier::{classify_rank_le2, CaseTag};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::jacobian::{
    degree_matrix_criterion, find_dependence, is_nilpotent, jacobian, rank_over_function_field,
    DEFAULT_DEPENDENCE_CAP,
};
use crate::keller::{
    compose_with_parameters, default_degree_bound, invert_keller, is_keller, keller_normal_form,
    recompose, tame_decompose,
};
use crate::normalizer::normalize_rkform;
use crate::report::{linear_value, map_value, poly_value, Report, SCHEMA_VERSION};
use crate::text::{format_map, parse_field, parse_map, MapKind, ParsedMap};

/// Exact algebra for cubic homogeneous maps with Jacobian rank at most two.
#[derive(Parser, Debug, Clone)]
#[command(name = "cubicjac", version)]
pub struct RunConfig {
    /// Coefficient field: Q, Fp or Fp^k (overrides the map's header).
    #[arg(long, global = true)]
    pub field: Option<String>,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Degree bound for relation search (depfind) or truncation (invert).
    #[arg(long, global = true)]
    pub degree_cap: Option<u32>,
    /// Allow `tame` to append a variable.
    #[arg(long, global = true)]
    pub extra_variable: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Input {
    /// Map file, or `-` for standard input.
    pub path: Option<PathBuf>,
    /// Map text given inline.
    #[arg(long = "map")]
    pub inline: Option<String>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Certified rank of the Jacobian matrix.
    Rank(Input),
    /// Nilpotency of the Jacobian matrix and the Keller property of x + H.
    Nilpotent(Input),
    /// Search for a polynomial relation among the components.
    Depfind(Input),
    /// Exponent-matrix test for monomial maps.
    Degmat(Input),
    /// Normalize so the Jacobian at a standard basis vector is a block identity.
    Normalize(Input),
    /// Classify a cubic homogeneous map of Jacobian rank at most two.
    Classify {
        #[command(flatten)]
        input: Input,
        /// Classify this many scrambled instances per case instead.
        #[arg(long)]
        corpus: Option<usize>,
    },
    /// Normal form of a cubic homogeneous Keller map x + H.
    Keller(Input),
    /// Exact inverse of a Keller map.
    Invert {
        #[command(flatten)]
        input: Input,
        /// Trailing variables treated as parameters of the coefficient ring.
        #[arg(long, default_value_t = 0)]
        params: usize,
    },
    /// Decompose x + H into elementary maps.
    Tame(Input),
    /// Positive-characteristic anomalies of monomial maps.
    Anomaly {
        #[command(subcommand)]
        action: AnomalyAction,
    },
    /// Print a seeded random corpus of maps.
    Corpus {
        #[arg(long, value_enum)]
        kind: CorpusKind,
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Number of variables where the kind allows a choice.
        #[arg(long, default_value_t = 4)]
        n: usize,
    },
}

#[derive(Subcommand, Debug, Clone)]
pub enum AnomalyAction {
    /// Check the known examples.
    Verify,
    /// Exhaustive search over monomial maps.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        maxdeg: u32,
        #[arg(long)]
        p: u64,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusKind {
    Case1,
    Case2,
    Case3,
    RankLe2,
    FormIi,
    Triangular,
    Rank1,
}

/// What the binary prints and the exit code it returns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub exit_code: i32,
}

pub fn run_pipeline(config: &RunConfig) -> Output {
    match dispatch(config) {
        Ok(reports) => {
            let ok = reports.iter().all(Report::all_passed);
            Output {
                stdout: render(config, &reports),
                stderr: if ok {
                    String::new()
                } else {
                    "error: a verification check failed\n".into()
                },
                exit_code: if ok { 0 } else { 4 },
            }
        }
        Err(e) => {
            let stdout = if config.json {
                let v = json!({
                    "schema": SCHEMA_VERSION,
                    "error": { "message": e.to_string(), "exit_code": e.exit_code() },
                });
                format!(
                    "{}\n",
                    serde_json::to_string_pretty(&v).expect("serializable")
                )
            } else {
                String::new()
            };
            Output {
                stdout,
                stderr: format!("error: {e}\n"),
                exit_code: e.exit_code(),
            }
        }
    }
}

fn render(config: &RunConfig, reports: &[Report]) -> String {
    // anomaly results stream one JSON object per line
    let lines = matches!(config.command, Command::Anomaly { .. });
    let mut out = String::new();
    for r in reports {
        if config.json {
            let v = r.to_json();
            let s = if lines {
                serde_json::to_string(&v)
            } else {
                serde_json::to_string_pretty(&v)
            };
            out.push_str(&s.expect("serializable"));
            out.push('\n');
        } else {
            out.push_str(&r.to_text());
        }
    }
    out
}

fn field_override(config: &RunConfig) -> Result<Option<Field>> {
    config.field.as_deref().map(parse_field).transpose()
}

fn usage(message: &str) -> Error {
    Error::Parse {
        line: 0,
        column: 0,
        message: message.into(),
    }
}

fn read_input(config: &RunConfig, input: &Input) -> Result<ParsedMap> {
    let text = match (&input.inline, &input.path) {
        (Some(t), None) => t.clone(),
        (None, Some(p)) if p.as_os_str() == "-" => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Error::Io(e.to_string()))?;
            s
        }
        (None, Some(p)) => {
            std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?
        }
        (Some(_), Some(_)) => return Err(usage("give either a path or --map, not both")),
        (None, None) => return Err(usage("no input map (give a path, `-`, or --map)")),
    };
    parse_map(&text, field_override(config)?.as_ref())
}

fn dispatch(config: &RunConfig) -> Result<Vec<Report>> {
    let report = match &config.command {
        Command::Rank(i) => rank(&read_input(config, i)?),
        Command::Nilpotent(i) => nilpotent(&read_input(config, i)?),
        Command::Depfind(i) => depfind(config, &read_input(config, i)?),
        Command::Degmat(i) => degmat(&read_input(config, i)?),
        Command::Normalize(i) => normalize(&read_input(config, i)?),
        Command::Classify {
            corpus: Some(n), ..
        } => classify_corpus(config, *n),
        Command::Classify { input, .. } => classify(&read_input(config, input)?),
        Command::Keller(i) => keller(&read_input(config, i)?),
        Command::Invert { input, params } => invert(config, &read_input(config, input)?, *params),
        Command::Tame(i) => tame(&read_input(config, i)?, config.extra_variable),
        Command::Anomaly { action } => return anomaly(action),
        Command::Corpus { kind, count, n } => corpus(config, *kind, *count, *n),
    };
    Ok(vec![report?])
}

fn one_based(v: &[usize]) -> Value {
    Value::Array(v.iter().map(|i| Value::from(i + 1)).collect())
}

/// Report for the `rank` command.
pub fn rank(p: &ParsedMap) -> Result<Report> {
    let h = p.h()?;
    let jm = jacobian(&h);
    let cert = rank_over_function_field(&jm);
    let mut r = Report::new("rank", &p.field);
    r.set("rank", cert.rank)
        .set("minor_rows", one_based(&cert.minor_rows))
        .set("minor_cols", one_based(&cert.minor_cols))
        .set("minor_value", poly_value(&cert.minor_value))
        .check(
            "chosen minor is nonzero and every bordering minor vanishes",
            cert.verify(&jm),
        );
    Ok(r)
}

/// Report for the `nilpotent` command.
pub fn nilpotent(p: &ParsedMap) -> Result<Report> {
    let h = p.h()?;
    h.require_square()?;
    let jm = jacobian(&h);
    let nil = is_nilpotent(&jm)?;
    let keller = is_keller(&p.f()?)?;
    let mut r = Report::new("nilpotent", &p.field);
    r.set("nilpotent", nil.nilpotent)
        .set("index", nil.index.map_or(Value::Null, Value::from))
        .set("keller", keller);
    if let Some(k) = nil.index {
        let mut pw = PolyMatrix::identity(h.field(), h.nvars(), h.nvars());
        for _ in 0..k {
            pw = pw.mul(&jm)?;
        }
        r.check("JH raised to the index is zero", pw.is_zero());
    }
    if h.homogeneous_degree().is_some_and(|d| d >= 2) {
        r.check(
            "Keller property agrees with nilpotency",
            keller == nil.nilpotent,
        );
    }
    Ok(r)
}

fn depfind(config: &RunConfig, p: &ParsedMap) -> Result<Report> {
    let h = p.h()?;
    let cap = config.degree_cap.unwrap_or(DEFAULT_DEPENDENCE_CAP);
    let mut r = Report::new("depfind", &p.field);
    r.set("degree_cap", cap);
    match find_dependence(&h, cap)? {
        Some(d) => {
            r.set("found", true)
                .set("relation", poly_value(&d.relation))
                .set("relation_variables", "x_i stands for H_i")
                .set("degree_bound_used", d.degree_bound_used)
                .check("relation vanishes on the components", d.verify(&h));
        }
        None => {
            r.set("found", false);
        }
    }
    Ok(r)
}

/// Report for the `degmat` command.
pub fn degmat(p: &ParsedMap) -> Result<Report> {
    let h = p.h()?;
    let d = degree_matrix_criterion(&h)?;
    let det_jh = jacobian(&h).determinant()?;
    let rows: Vec<Value> = d
        .matrix
        .iter()
        .map(|row| Value::Array(row.iter().map(|&e| e.into()).collect()))
        .collect();
    let mut r = Report::new("degmat", &p.field);
    r.set("matrix", Value::Array(rows))
        .set("det_over_z", d.det_over_z.to_string())
        .set("det_in_field", d.det_in_field.to_string())
        .set("anomalous", d.anomalous)
        .set("jacobian_determinant", poly_value(&det_jh))
        .check(
            "det JH vanishes exactly when the exponent determinant does in the field",
            det_jh.is_zero() == d.det_in_field.is_zero(),
        );
    Ok(r)
}

/// Report for the `normalize` command.
pub fn normalize(p: &ParsedMap) -> Result<Report> {
    let h = p.h()?;
    let n = normalize_rkform(&h)?;
    let witness: Vec<Value> = n.witness.iter().map(|s| s.to_string().into()).collect();
    let mut r = Report::new("normalize", &p.field);
    r.set("rank", n.rank)
        .set("working_field", n.field.to_string())
        .set("base_point", n.base_point + 1)
        .set("witness", Value::Array(witness))
        .set("S", linear_value(&n.s))
        .set("T", linear_value(&n.t))
        .set("H_tilde", map_value(&n.h_tilde))
        .check(
            "H~ = S H(T x) with block identity Jacobian at the base point",
            n.verify(&h)?,
        )
        .check(
            "S^-1 H~(T^-1 x) = H",
            n.round_trip()? == h.to_field(&n.field)?,
        );
    Ok(r)
}

/// Report for the `classify` command.
pub fn classify(p: &ParsedMap) -> Result<Report> {
    let h = p.h()?;
    let c = classify_rank_le2(&h)?;
    let holding: Vec<Value> = c
        .cases_holding
        .iter()
        .map(|t| t.to_string().into())
        .collect();
    let mut r = Report::new("classify", &p.field);
    r.set("case_tag", c.case_tag.to_string())
        .set("rank", c.rank)
        .set("span_dim", c.span_dim)
        .set("essential_count", c.essential_count)
        .set("cases_holding", Value::Array(holding))
        .set("overlapping", c.is_overlapping())
        .set("S", linear_value(&c.s))
        .set("T", linear_value(&c.t))
        .set("H_tilde", map_value(&c.h_tilde));
    if let Some(l) = &c.linear_factor {
        r.set("linear_factor", poly_value(l));
    }
    r.check("H~ = S H(T x) and the case property holds", c.verify(&h)?);
    Ok(r)
}

fn classify_corpus(config: &RunConfig, count: usize) -> Result<Report> {
    let mut corpus = Corpus::new(config.seed);
    let mut r = Report::new("classify", corpus.field());
    r.set("seed", config.seed).set("per_case", count);
    for tag in [CaseTag::ZeroTail, CaseTag::TwoVariables, CaseTag::X3Quadric] {
        let mut recovered = 0;
        for _ in 0..count {
            let h = corpus.classification_instance(tag)?;
            let c = classify_rank_le2(&h)?;
            if c.case_tag == tag && c.verify(&h)? {
                recovered += 1;
            }
        }
        r.set(&tag.to_string(), recovered);
        r.check(
            &format!("{tag} recovered in every instance"),
            recovered == count,
        );
    }
    Ok(r)
}

/// Report for the `keller` command.
pub fn keller(p: &ParsedMap) -> Result<Report> {
    let h = p.h()?;
    let nf = keller_normal_form(&h)?;
    let mut r = Report::new("keller", &p.field);
    r.set("keller", true)
        .set("variant", nf.variant.tag())
        .set("T", linear_value(&nf.t))
        .set("H_tilde", map_value(&nf.h_tilde))
        .set("residual", map_value(&nf.residual))
        .check(
            "H~ = T^-1 H(T x) and the normal form invariants hold",
            nf.verify(&h)?,
        );
    Ok(r)
}

fn invert(config: &RunConfig, p: &ParsedMap, params: usize) -> Result<Report> {
    let full = p.f()?;
    let n = full.nvars();
    if params >= n {
        return Err(Error::dim("every variable would be a parameter"));
    }
    let m = n - params;
    for j in m..n {
        if full.component(j) != &Polynomial::var(full.field(), n, j) {
            return Err(Error::Hypothesis(format!(
                "parameter x{} is not fixed by the map",
                j + 1
            )));
        }
    }
    let f = PolyMap::new(full.field(), n, full.components()[..m].to_vec())?;
    let bound = config
        .degree_cap
        .unwrap_or_else(|| default_degree_bound(&f));
    let g = invert_keller(&f, Some(bound))?;
    let x = PolyMap::new(
        f.field(),
        n,
        PolyMap::identity(f.field(), n).components()[..m].to_vec(),
    )?;
    let mut r = Report::new("invert", &p.field);
    r.set("degree_bound", bound)
        .set("parameters", params)
        .set("G", map_value(&g))
        .check("F o G = x", compose_with_parameters(&f, &g)? == x)
        .check("G o F = x", compose_with_parameters(&g, &f)? == x);
    Ok(r)
}

/// Report for the `tame` command.
pub fn tame(p: &ParsedMap, extra_variable: bool) -> Result<Report> {
    let f = p.f()?;
    let d = tame_decompose(&f, extra_variable)?;
    let steps: Vec<Value> = d
        .steps
        .iter()
        .map(|s| {
            json!({
                "index": s.index + 1,
                "scale": s.scale.to_string(),
                "shift": s.shift.to_string(),
                "touches": s.touched_vars().iter().map(|v| v + 1).collect::<Vec<_>>(),
            })
        })
        .collect();
    let target = f.extend_identity(d.nvars)?;
    let index = |v: Option<usize>| v.map_or(Value::Null, |i| Value::from(i + 1));
    let mut r = Report::new("tame", &p.field);
    r.set("nvars", d.nvars)
        .set("extra_variable", index(d.extra_variable))
        .set("spare_variable", index(d.spare_variable))
        .set("step_count", d.steps.len())
        .set("steps", Value::Array(steps))
        .check(
            "steps recompose to the map (extended by the identity)",
            recompose(f.field(), d.nvars, &d.steps)? == target,
        );
    Ok(r)
}

fn anomaly_report(rec: &AnomalyRecord) -> Result<Report> {
    let mut r = Report::new("anomaly", Field::prime(rec.characteristic)?);
    r.set("name", rec.name.clone())
        .set("map", map_value(&rec.map))
        .set("characteristic", rec.characteristic)
        .set("degree_det_z", rec.degree_det_z.to_string())
        .set("homogeneous", rec.homogeneous);
    if let Some(h) = &rec.homogenization {
        r.set("homogenization", map_value(h));
    }
    r.check(
        "exponent determinant is nonzero over Z and zero mod p",
        rec.degree_check,
    )
    .check("det JH = 0 over F_p", rec.jacobian_check);
    Ok(r)
}

fn anomaly(action: &AnomalyAction) -> Result<Vec<Report>> {
    match action {
        AnomalyAction::Verify => verify_known_examples()?
            .iter()
            .map(anomaly_report)
            .collect(),
        AnomalyAction::Search { n, maxdeg, p } => {
            let recs = search_monomial_anomalies(*n, *maxdeg, *p)?;
            let mut out: Vec<Report> = recs.iter().map(anomaly_report).collect::<Result<_>>()?;
            let mut summary = Report::new("anomaly search", Field::prime(*p)?);
            summary
                .set("n", *n)
                .set("maxdeg", *maxdeg)
                .set("found", recs.len());
            out.push(summary);
            Ok(out)
        }
    }
}

fn corpus(config: &RunConfig, kind: CorpusKind, count: usize, n: usize) -> Result<Report> {
    let mut c = Corpus::new(config.seed);
    let target = field_override(config)?;
    let mut maps = Vec::new();
    for _ in 0..count {
        let h = match kind {
            CorpusKind::Case1 => c.classification_instance(CaseTag::ZeroTail)?,
            CorpusKind::Case2 => c.classification_instance(CaseTag::TwoVariables)?,
            CorpusKind::Case3 => c.classification_instance(CaseTag::X3Quadric)?,
            CorpusKind::RankLe2 => c.rank_le2_map()?,
            CorpusKind::FormIi => c.form_ii_scramble(n.max(4))?,
            CorpusKind::Triangular => c.triangular_scramble(n.max(3))?,
            CorpusKind::Rank1 => c.rank1_single_form(n.max(2))?,
        };
        maps.push(match &target {
            Some(f) => h.to_field(f)?,
            None => h,
        });
    }
    let field = target.unwrap_or_else(Field::rational);
    let mut r = Report::new("corpus", &field);
    r.set("seed", config.seed).set("count", count);
    if config.json {
        let texts: Vec<Value> = maps
            .iter()
            .map(|m| format_map(m, MapKind::Components).into())
            .collect();
        r.set("maps", Value::Array(texts));
    } else {
        for (k, m) in maps.iter().enumerate() {
            r.set(&format!("map {}", k + 1), map_value(m));
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(args: &[&str]) -> RunConfig {
        RunConfig::try_parse_from(std::iter::once("cubicjac").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn rank_of_inline_map() {
        let out = run_pipeline(&config(&["rank", "--map", "H1 = x1^3\nH2 = 2*x1^3"]));
        assert_eq!(out.exit_code, 0, "{}", out.stderr);
        assert!(out.stdout.contains("rank: 1"), "{}", out.stdout);
    }

    #[test]
    fn missing_input_is_a_usage_error() {
        let out = run_pipeline(&config(&["rank"]));
        assert_eq!(out.exit_code, 2);
    }

    #[test]
    fn json_is_parseable() {
        let out = run_pipeline(&config(&["--json", "invert", "--map", "H1 = x2^3\nH2 = 0"]));
        assert_eq!(out.exit_code, 0, "{}", out.stderr);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["result"]["G"][0], "-1*x2^3 + 1*x1^1");
    }
}
