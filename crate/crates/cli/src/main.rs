use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use elpp::classify::TraceTree;
use elpp::differential::{differential, Agreement, DifferentialConfig};
use elpp::generate::{random_kb, random_name_pair, KbShape};
use elpp::kb::{Concept, KnowledgeBase, NameKind};
use elpp::pipeline::normalize;
use elpp::reasoner::{check_subsumption_with, classify_names, ReasonerConfig};
use elpp::text::{parse_concept, parse_kb, print_constraint, print_kb, TextError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

const EXIT_FALSE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "elpp", version, about = "EL++ subsumption reasoner")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether C is subsumed by D. Exits 1 when it is not.
    Subsumes {
        file: PathBuf,
        c: String,
        d: String,
        /// Attach the derivation of a positive verdict.
        #[arg(long)]
        trace: bool,
    },
    /// Print every entailed pair X <= Y of concept names.
    Classify { file: PathBuf },
    /// Print the derivation tree of an entailed subsumption.
    Explain { file: PathBuf, c: String, d: String },
    /// Print the normal form of the knowledge base.
    Normalize { file: PathBuf },
    /// Cross-check the reasoner against the countermodel search on random
    /// knowledge bases.
    Check {
        #[arg(long, default_value_t = 100)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest countermodel tried; defaults to the canonical bound.
        #[arg(long)]
        max_model_size: Option<usize>,
        /// Node budget per countermodel search.
        #[arg(long, default_value_t = DifferentialConfig::default().budget)]
        budget: u64,
        /// Mix concrete-domain predicates into the generated kbs.
        #[arg(long)]
        concrete: bool,
    },
}

/// A failure with its exit status; the message goes to stderr.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn internal(message: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_INTERNAL,
        message: format!("internal error: {message}"),
    }
}

fn render_errors(origin: &str, errs: &[TextError]) -> String {
    errs.iter()
        .map(|e| format!("{origin}:{e}"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn load(path: &Path) -> Result<KnowledgeBase, Failure> {
    let src =
        std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    parse_kb(&src).map_err(|errs| usage(render_errors(&path.display().to_string(), &errs)))
}

fn query(kb: &KnowledgeBase, src: &str) -> Result<Concept, Failure> {
    parse_concept(src, kb).map_err(|errs| usage(render_errors("<query>", &errs)))
}

/// Writes the rendered result. A closed stdout (say, piped into `head`) is
/// not an error worth reporting.
fn emit(format: Format, text: String, json: Value) {
    let out = match format {
        Format::Text => text,
        Format::Json => serde_json::to_string_pretty(&json).unwrap() + "\n",
    };
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
}

fn subsumes(format: Format, file: &Path, c: &str, d: &str, trace: bool) -> Result<u8, Failure> {
    let kb = load(file)?;
    let (c, d) = (query(&kb, c)?, query(&kb, d)?);
    let config = ReasonerConfig {
        trace,
        ..Default::default()
    };
    let v = check_subsumption_with(&kb, &c, &d, config).map_err(internal)?;
    let mut text = match v.reason {
        Some(reason) => format!("true ({reason})\n"),
        None => "false\n".to_string(),
    };
    if let Some(t) = &v.trace {
        text.push_str(&t.render());
    }
    let json = json!({
        "holds": v.holds,
        "reason": v.reason,
        "trace": v.trace,
    });
    emit(format, text, json);
    Ok(if v.holds { 0 } else { EXIT_FALSE })
}

fn classify(format: Format, file: &Path) -> Result<u8, Failure> {
    let kb = load(file)?;
    let mut pairs: Vec<(String, String)> = classify_names(&kb)
        .map_err(internal)?
        .into_iter()
        .map(|(x, y)| (kb.label(x).to_string(), kb.label(y).to_string()))
        .collect();
    pairs.sort();
    let text = pairs.iter().map(|(x, y)| format!("{x} <= {y}\n")).collect();
    let json = Value::Array(pairs.iter().map(|(x, y)| json!([x, y])).collect());
    emit(format, text, json);
    Ok(0)
}

fn explain(format: Format, file: &Path, c: &str, d: &str) -> Result<u8, Failure> {
    let kb = load(file)?;
    let (c, d) = (query(&kb, c)?, query(&kb, d)?);
    let config = ReasonerConfig {
        trace: true,
        ..Default::default()
    };
    let v = check_subsumption_with(&kb, &c, &d, config).map_err(internal)?;
    let Some(tree): Option<TraceTree> = v.trace else {
        return Err(Failure {
            code: EXIT_FALSE,
            message: "the subsumption is not entailed; nothing to explain".into(),
        });
    };
    let text = format!(
        "{}\n{}",
        v.reason.map(|r| r.to_string()).unwrap_or_default(),
        tree.render()
    );
    emit(format, text, json!({ "reason": v.reason, "trace": tree }));
    Ok(0)
}

fn normalize_cmd(format: Format, file: &Path) -> Result<u8, Failure> {
    let kb = load(file)?;
    let out = normalize(&kb).map_err(internal)?;
    let mut declarations = serde_json::Map::new();
    for kind in NameKind::ALL {
        let labels: Vec<&str> = out.inventory(kind).iter().map(|&n| out.label(n)).collect();
        declarations.insert(kind.keyword().to_string(), json!(labels));
    }
    let axioms: Vec<String> = out
        .constraints
        .iter()
        .map(|c| print_constraint(&out, c))
        .collect();
    emit(
        format,
        print_kb(&out),
        json!({ "declarations": declarations, "axioms": axioms }),
    );
    Ok(0)
}

fn check(
    format: Format,
    count: u64,
    seed: u64,
    max_model_size: Option<usize>,
    budget: u64,
    concrete: bool,
) -> Result<u8, Failure> {
    let config = DifferentialConfig {
        max_model_size,
        budget,
        ..Default::default()
    };
    let shape = if concrete {
        KbShape::concrete_small()
    } else {
        KbShape::abstract_small()
    };
    let mut tally = std::collections::BTreeMap::<String, u64>::new();
    let mut shaped = 0;
    let mut problems = Vec::new();
    for s in seed..seed.saturating_add(count) {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let kb = random_kb(&mut rng, &shape);
        let (c, d) = random_name_pair(&mut rng, &kb);
        match differential(&kb, &c, &d, config) {
            Ok(r) => {
                shaped += u64::from(r.shaped);
                let key = serde_json::to_value(r.agreement).unwrap();
                *tally.entry(key.as_str().unwrap().to_string()).or_default() += 1;
                if r.agreement != Agreement::AgreeTrue && r.agreement != Agreement::AgreeFalse {
                    problems.push(json!({
                        "seed": s,
                        "agreement": r.agreement,
                        "query": format!("{} <= {}", kb.show(&c), kb.show(&d)),
                        "kb": print_kb(&kb),
                    }));
                }
            }
            Err(e) => {
                *tally.entry("error".into()).or_default() += 1;
                problems.push(json!({ "seed": s, "error": e.to_string(), "kb": print_kb(&kb) }));
            }
        }
    }
    let mut text: String = tally.iter().map(|(k, n)| format!("{k}: {n}\n")).collect();
    text.push_str(&format!("shaped fallback: {shaped}\n"));
    for p in &problems {
        text.push_str(&format!(
            "seed {}: {}\n{}",
            p["seed"],
            p.get("agreement").or(p.get("error")).unwrap(),
            p["kb"].as_str().unwrap()
        ));
        if let Some(q) = p.get("query") {
            text.push_str(&format!("query {}\n", q.as_str().unwrap()));
        }
    }
    emit(
        format,
        text,
        json!({ "count": count, "seed": seed, "tally": tally, "shaped": shaped, "problems": problems }),
    );
    Ok(if problems.is_empty() {
        0
    } else {
        EXIT_INTERNAL
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let f = cli.format;
    let result = match &cli.command {
        Command::Subsumes { file, c, d, trace } => subsumes(f, file, c, d, *trace),
        Command::Classify { file } => classify(f, file),
        Command::Explain { file, c, d } => explain(f, file, c, d),
        Command::Normalize { file } => normalize_cmd(f, file),
        Command::Check {
            count,
            seed,
            max_model_size,
            budget,
            concrete,
        } => check(f, *count, *seed, *max_model_size, *budget, *concrete),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, message }) => {
            eprintln!("{message}");
            ExitCode::from(code)
        }
    }
}
