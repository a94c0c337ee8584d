//! `qdeform`: batch front end for the engine.
//!
//! Exit status: 0 when every check passes, 1 on a mathematical failure,
//! 2 on usage or parse errors.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qdeform::cleft::{canonical_section, coinvariants_check, compare_deformation};
use qdeform::datum::{cartan_checks, DatumDoc, ParamMap};
use qdeform::freealg::{assemble, flavor_tails, parse_element, Flavor, Presentation};
use qdeform::hopf::{verify_hopf, CheckReport, Side};
use qdeform::uq::{self, build_borel, build_uq, resolve, AqPair, LambdaMode, UMat, UqData, UqInput};
use qdeform::Scalar;

#[derive(Parser, Debug)]
#[command(name = "qdeform", version, about = "Exact checks for pointed Hopf algebras of diagonal type and their cocycle deformations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cartan-type conditions and partition validation for a datum.
    DatumCheck(Common),
    /// Normal form of an expression in the chosen algebra.
    Nf {
        #[command(flatten)]
        common: Common,
        /// Expression such as "x[1]x[-1] - (q^2)*x[-1]x[1]*K(1)".
        #[arg(long)]
        expr: String,
        #[arg(long, value_enum, default_value_t = Algebra::Uq)]
        algebra: Algebra,
    },
    /// Resolve critical pairs of the rewriting system up to `--degree`.
    Overlaps {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Algebra::Uq)]
        algebra: Algebra,
    },
    /// Ranks over kΓ of the x-degree components.
    Hilbert {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Algebra::Borel)]
        algebra: Algebra,
    },
    /// Hopf algebra axioms on basis elements up to `--degree`.
    Hopf {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Algebra::Uq)]
        algebra: Algebra,
    },
    /// Compare the cocycle deformation of U_q with (U_q)⁰ and check A(λ)'s coinvariants.
    Deform(Common),
    /// Classify A_q(u, μ) data up to equivalence.
    Classify {
        #[command(flatten)]
        common: Common,
        /// JSON list of {"u": {"1,2": "<scalar>"}, "mu": {"1,1": "<scalar>"}} (1-based indices).
        #[arg(long)]
        pairs: Option<PathBuf>,
    },
    /// Whitehead reduction of random augmented pairs.
    Whitehead {
        #[command(flatten)]
        common: Common,
        /// Dimension of the trivial module M = Q(q)^dim.
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Shipped Cartan data.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// JSON document: a U_q input {cartan_matrix, symmetrizer?, lattice?, q} or a datum.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Degree bound D.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    degree: u32,
    /// Group-exponent box E.
    #[arg(long = "box", default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    box_e: u32,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 20_240_601)]
    seed: u64,
    /// "formal" or a rational value used by the condition checks.
    #[arg(long)]
    q: Option<String>,
    /// Write the JSON report here instead of printing it.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Preset {
    #[value(name = "A1")]
    A1,
    #[value(name = "A2")]
    A2,
    #[value(name = "B2")]
    B2,
    #[value(name = "A3")]
    A3,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Algebra {
    /// Borel part B_q (one block).
    Borel,
    /// U_q (flavor Hλ).
    Uq,
    /// (U_q)⁰ (flavor H0).
    Uq0,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Text,
}

/// Outcome of a command: pass flag, JSON report, CSV rows and a summary line.
struct Outcome {
    pass: bool,
    report: Value,
    csv: Option<String>,
    text: String,
}

/// Input errors are usage errors (exit 2); everything else is mathematical.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

enum Loaded {
    Uq(UqInput),
    Datum(DatumDoc),
}

fn load(c: &Common) -> Result<Loaded> {
    let mut loaded = match (&c.preset, &c.input) {
        (Some(_), Some(_)) => return Err(usage("give either --preset or --input")),
        (None, None) => return Err(usage("one of --preset or --input is required")),
        (Some(p), None) => Loaded::Uq(UqInput::preset(&format!("{p:?}")).expect("shipped preset")),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| usage(format!("malformed JSON: {e}")))?;
            if v.get("cartan_matrix").is_some() {
                Loaded::Uq(serde_json::from_value(v).map_err(|e| usage(format!("bad U_q input: {e}")))?)
            } else {
                Loaded::Datum(serde_json::from_value(v).map_err(|e| usage(format!("bad datum document: {e}")))?)
            }
        }
    };
    if let (Loaded::Uq(u), Some(q)) = (&mut loaded, &c.q) {
        u.q = q.clone();
    }
    Ok(loaded)
}

fn uq_data(c: &Common) -> Result<UqData> {
    match load(c)? {
        Loaded::Uq(u) => resolve(&u).map_err(|e| usage(e.to_string())),
        Loaded::Datum(_) => Err(usage("this command needs a U_q input (cartan_matrix), not a datum document")),
    }
}

fn presentation(u: &UqData, alg: Algebra) -> Result<Arc<Presentation<Scalar>>> {
    Ok(match alg {
        Algebra::Borel => build_borel(u)?.presentation,
        Algebra::Uq => build_uq(u, LambdaMode::Standard)?.presentation,
        Algebra::Uq0 => build_uq(u, LambdaMode::Zero)?.presentation,
    })
}

fn check_outcome(name: &str, rep: &CheckReport) -> Outcome {
    let text = format!("{name}: {} checks, {} failures ({})", rep.checked(), rep.failures.len(), rep.summary());
    Outcome { pass: rep.all_pass(), report: json!({ "check": name, "report": rep }), csv: None, text }
}

fn cmd_datum_check(c: &Common) -> Result<Outcome> {
    let (d, conditions) = match load(c)? {
        Loaded::Uq(u) => {
            let data = resolve(&u).map_err(|e| usage(e.to_string()))?;
            let d = uq::uq_datum(&data)?;
            let gcm = d.gcm.clone().expect("U_q data carry a GCM");
            let rep = cartan_checks(&d, &gcm, data.q0.as_ref());
            (d, Some(rep))
        }
        Loaded::Datum(doc) => {
            let (d, _, _) = doc.build()?;
            let rep = d.gcm.clone().map(|g| cartan_checks(&d, &g, None));
            (Arc::new(d), rep)
        }
    };
    let pass = conditions.as_ref().is_none_or(|r| r.all_pass());
    let failing: Vec<String> = conditions
        .iter()
        .flat_map(|r| r.entries.iter().filter(|e| !e.pass).map(|e| format!("{} {}", e.condition, e.subject)))
        .collect();
    let text = format!(
        "datum with {} letters in {} blocks; {}",
        d.len(),
        d.num_blocks(),
        if failing.is_empty() { "all conditions pass".to_string() } else { format!("failing: {}", failing.join(", ")) }
    );
    Ok(Outcome { pass, report: json!({ "partition": "valid", "conditions": conditions }), csv: None, text })
}

fn cmd_nf(c: &Common, expr: &str, alg: Algebra) -> Result<Outcome> {
    let u = uq_data(c)?;
    let p = presentation(&u, alg)?;
    let e = parse_element(expr, &p).map_err(|e| usage(e.to_string()))?;
    let nf = e.fmt_with(p.datum());
    Ok(Outcome { pass: true, report: json!({ "input": expr, "normal_form": nf }), csv: None, text: nf })
}

fn cmd_overlaps(c: &Common, alg: Algebra) -> Result<Outcome> {
    let u = uq_data(c)?;
    let b = match alg {
        Algebra::Borel => build_borel(&u)?,
        Algebra::Uq => build_uq(&u, LambdaMode::Standard)?,
        Algebra::Uq0 => build_uq(&u, LambdaMode::Zero)?,
    };
    let flavor = b.presentation.flavor();
    let tails = flavor_tails(&b.datum, flavor, None, &b.lambda, &ParamMap::new());
    let raw = assemble(b.datum.clone(), flavor, None, &tails, &b.serre)?;
    let rep = raw.check_overlaps(c.degree as usize);
    let failures: Vec<Value> = rep
        .failures()
        .map(|p| json!({ "kind": p.kind, "word": qdeform::freealg::fmt_word(&p.word, &b.datum), "discrepancy": p.discrepancy.fmt_with(&b.datum) }))
        .collect();
    let text = format!("{} critical pairs up to length {}, {} unresolved", rep.pairs.len(), c.degree, failures.len());
    Ok(Outcome { pass: failures.is_empty(), report: json!({ "pairs": rep.pairs.len(), "unresolved": failures }), csv: None, text })
}

fn cmd_hilbert(c: &Common, alg: Algebra) -> Result<Outcome> {
    let u = uq_data(c)?;
    let p = presentation(&u, alg)?;
    let ranks = p.hilbert_ranks(c.degree as usize);
    let mut csv = String::from("degree,rank\n");
    for (k, r) in ranks.iter().enumerate() {
        csv.push_str(&format!("{k},{r}\n"));
    }
    let text = ranks.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(",");
    Ok(Outcome { pass: true, report: json!({ "ranks": ranks }), csv: Some(csv), text })
}

fn cmd_hopf(c: &Common, alg: Algebra) -> Result<Outcome> {
    if alg == Algebra::Borel {
        return Err(usage("verify the Hopf axioms on uq or uq0"));
    }
    let u = uq_data(c)?;
    let p = presentation(&u, alg)?;
    let rep = verify_hopf(&p, c.degree as usize)?;
    Ok(check_outcome("hopf", &rep))
}

fn cmd_deform(c: &Common) -> Result<Outcome> {
    let u = uq_data(c)?;
    let h0 = build_uq(&u, LambdaMode::Zero)?.presentation;
    let hl = build_uq(&u, LambdaMode::Standard)?;
    let tails = flavor_tails(&hl.datum, Flavor::Alambda, None, &hl.lambda, &ParamMap::new());
    let al = Arc::new(assemble(hl.datum.clone(), Flavor::Alambda, None, &tails, &hl.serre)?);
    let rep = compare_deformation(&h0, &hl.presentation, &al, c.degree as usize, 1)?;
    let cleft = canonical_section(hl.presentation.clone(), al, Side::Right, 1);
    let co = coinvariants_check(&cleft, c.degree as usize, c.box_e as i32)?;
    let mismatches = rep.failures.len();
    let text = format!(
        "{mismatches} mismatches over {} structure constants; coinvariants {} ({})",
        rep.checked(),
        if co.pass { "are the scalars" } else { "FAIL" },
        co.method
    );
    Ok(Outcome { pass: rep.all_pass() && co.pass, report: json!({ "deformation": rep, "coinvariants": co }), csv: None, text })
}

fn parse_index_pair(key: &str) -> Result<(usize, usize)> {
    let (a, b) = key.split_once(',').ok_or_else(|| usage(format!("index pair '{key}' must look like \"i,j\"")))?;
    let a: usize = a.trim().parse().map_err(|_| usage(format!("bad index in '{key}'")))?;
    let b: usize = b.trim().parse().map_err(|_| usage(format!("bad index in '{key}'")))?;
    if a == 0 || b == 0 {
        return Err(usage("indices are 1-based"));
    }
    Ok((a - 1, b - 1))
}

fn parse_scalar_map(v: Option<&Value>) -> Result<ParamMap<Scalar>> {
    let mut out = ParamMap::new();
    let Some(v) = v else { return Ok(out) };
    let obj = v.as_object().ok_or_else(|| usage("expected an object of \"i,j\": scalar"))?;
    for (k, x) in obj {
        let s = x.as_str().map(str::to_string).unwrap_or_else(|| x.to_string());
        let val: Scalar = s.parse().map_err(|e| usage(format!("bad scalar '{s}': {e}")))?;
        out.insert(parse_index_pair(k)?, val);
    }
    Ok(out)
}

fn cmd_classify(c: &Common, pairs: Option<&PathBuf>) -> Result<Outcome> {
    let u = uq_data(c)?;
    let list: Vec<AqPair> = match pairs {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| usage(format!("malformed JSON: {e}")))?;
            let arr = v.as_array().ok_or_else(|| usage("pairs file must hold a JSON list"))?;
            arr.iter()
                .map(|p| Ok(AqPair { umat: parse_scalar_map(p.get("u"))?, mu: parse_scalar_map(p.get("mu"))? }))
                .collect::<Result<_>>()?
        }
        None => ["1", "q", "q^2", "4", "0"]
            .iter()
            .map(|s| AqPair {
                umat: UMat::new(),
                mu: (0..u.n()).map(|i| ((i, i), s.parse::<Scalar>().expect("literal"))).filter(|(_, v)| !v.is_zero()).collect(),
            })
            .collect(),
    };
    let rep = uq::classify_aq(&u, &list).map_err(|e| match e {
        uq::UqError::Datum(d) => usage(d.to_string()),
        other => anyhow!(other),
    })?;
    let text = format!("{} pairs in {} orbits", list.len(), rep.orbits.len());
    let mut csv = String::from("pair,orbit\n");
    for o in &rep.orbits {
        for m in &o.members {
            csv.push_str(&format!("{m},{}\n", o.orbit_id));
        }
    }
    Ok(Outcome { pass: true, report: serde_json::to_value(&rep)?, csv: Some(csv), text })
}

fn cmd_whitehead(c: &Common, dim: usize) -> Result<Outcome> {
    if dim == 0 {
        return Err(usage("--dim must be positive"));
    }
    let u = uq_data(c)?;
    let rep = uq::whitehead_samples(&u, dim, c.samples, c.seed)?;
    let ok = rep.samples.iter().filter(|s| s.verified).count();
    let text = format!("{ok}/{} samples reduced to (0, 0) with verified witnesses", rep.samples.len());
    Ok(Outcome { pass: rep.pass(), report: serde_json::to_value(&rep)?, csv: None, text })
}

fn run(cli: &Cli) -> Result<(Outcome, Common)> {
    let (out, common) = match &cli.command {
        Command::DatumCheck(c) => (cmd_datum_check(c)?, c),
        Command::Nf { common, expr, algebra } => (cmd_nf(common, expr, *algebra)?, common),
        Command::Overlaps { common, algebra } => (cmd_overlaps(common, *algebra)?, common),
        Command::Hilbert { common, algebra } => (cmd_hilbert(common, *algebra)?, common),
        Command::Hopf { common, algebra } => (cmd_hopf(common, *algebra)?, common),
        Command::Deform(c) => (cmd_deform(c)?, c),
        Command::Classify { common, pairs } => (cmd_classify(common, pairs.as_ref())?, common),
        Command::Whitehead { common, dim } => (cmd_whitehead(common, *dim)?, common),
    };
    Ok((out, common.clone()))
}

fn emit(out: &Outcome, c: &Common) -> Result<()> {
    let report = json!({ "pass": out.pass, "summary": out.text, "result": out.report });
    if let Some(path) = &c.out {
        let body = match (c.format, &out.csv) {
            (Format::Csv, Some(csv)) => csv.clone(),
            _ => serde_json::to_string_pretty(&report)?,
        };
        std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
        println!("{}", out.text);
        return Ok(());
    }
    match c.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
        Format::Csv => match &out.csv {
            Some(csv) => print!("{csv}"),
            None => bail!("this command has no CSV form"),
        },
        Format::Text => println!("{}", out.text),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli).and_then(|(out, c)| emit(&out, &c).map(|_| out.pass)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
