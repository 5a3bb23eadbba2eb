use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use nwr::benchgen::{generate, Variant, VariantSpec};
use nwr::collapse::{collapse, CollapseReport};
use nwr::derivpmc::derivative_pmc;
use nwr::pmc::{emit_model, emit_prism, qualitative_preprocess, Pmc, StateId};
use nwr::relations::{check_monotone, check_nwr, nwr_gadget, Method, Verdict};
use nwr::valuefn::value_functions;

mod files;

use files::{digest, read_input, read_model, write_output, CliError};

#[derive(Parser)]
#[command(name = "nwr", version, about = "Value functions, never-worse collapse and monotonicity for parametric Markov chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Prism,
}

#[derive(Subcommand)]
enum Command {
    /// Preprocess, collapse never-worse classes and emit the smaller model.
    Collapse {
        /// Model file, `-` for standard input.
        #[arg(default_value = "-")]
        input: String,
        #[arg(short, long)]
        out: Option<String>,
        /// JSON report with classes and the state mapping.
        #[arg(long)]
        report: Option<String>,
        /// One CSV row in the benchmark table layout, timing included.
        #[arg(long)]
        csv: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Print value functions as `num / den`.
    Values {
        #[arg(default_value = "-")]
        input: String,
        /// 1-based id or label; all states when absent.
        #[arg(long)]
        state: Option<String>,
    },
    /// Build the simple pMC for a partial derivative of a value function.
    Derivative {
        #[arg(default_value = "-")]
        input: String,
        #[arg(long)]
        state: String,
        /// Parameter name or 1-based index.
        #[arg(long)]
        param: String,
        #[arg(short, long)]
        out: Option<String>,
    },
    /// Monotonicity verdict as JSON.
    CheckMono {
        #[arg(default_value = "-")]
        input: String,
        #[arg(long)]
        state: String,
        #[arg(long)]
        param: String,
        #[arg(long, default_value = "sampling")]
        method: Method,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exit with status 1 on a refutation.
        #[arg(long)]
        strict: bool,
    },
    /// Never-worse verdict for `i ⊴ j` as JSON.
    CheckNwr {
        #[arg(default_value = "-")]
        input: String,
        #[arg(long)]
        i: String,
        #[arg(long)]
        j: String,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the gadget model whose monotonicity is equivalent.
        #[arg(long)]
        gadget_out: Option<String>,
        #[arg(long)]
        strict: bool,
    },
    /// Generate a ladder benchmark.
    GenBench {
        #[arg(long)]
        variant: Variant,
        #[arg(long)]
        n: usize,
        #[arg(short, long)]
        out: Option<String>,
        /// Emit PRISM instead of JSON.
        #[arg(long)]
        prism: bool,
    },
    /// Re-emit a model as JSON or PRISM.
    Convert {
        #[arg(default_value = "-")]
        input: String,
        #[arg(short, long)]
        out: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn emit(pmc: &Pmc, format: Format) -> String {
    match format {
        Format::Json => emit_model(pmc),
        Format::Prism => emit_prism(pmc),
    }
}

/// Preprocessed model and the map from input ids to its ids.
fn prepared(pmc: &Pmc) -> (Pmc, Vec<StateId>) {
    let (m, rep) = qualitative_preprocess(pmc);
    (m, rep.mapping)
}

fn state(pmc: &Pmc, spec: &str) -> Result<StateId, CliError> {
    pmc.resolve_state(spec).ok_or_else(|| CliError::Flag(format!("unknown state {spec:?}")))
}

fn param(pmc: &Pmc, spec: &str) -> Result<usize, CliError> {
    pmc.resolve_param(spec).ok_or_else(|| CliError::Flag(format!("unknown parameter {spec:?}")))
}

fn verdict_doc(command: &str, digest: &str, v: &Verdict, params: &[String], extra: Value) -> String {
    let mut doc = json!({ "command": command, "input_sha256": digest });
    doc["verdict"] = v.to_json(params);
    if let (Value::Object(d), Value::Object(e)) = (&mut doc, extra) {
        d.extend(e);
    }
    serde_json::to_string_pretty(&doc).expect("json") + "\n"
}

fn exit_for(v: &Verdict, strict: bool) -> ExitCode {
    if strict && v.is_refuted() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn run(cmd: Command) -> Result<ExitCode, CliError> {
    match cmd {
        Command::Collapse { input, out, report, csv, format } => {
            let text = read_input(&input)?;
            let (m, _) = prepared(&read_model(&text)?);
            let (small, rep) = collapse(&m)?;
            eprintln!("{} -> {} states, {} classes", rep.size_before, rep.size_after, rep.classes.len());
            let name = if input == "-" { "stdin" } else { input.as_str() };
            let mut outputs = vec![(out, emit(&small, format))];
            if let Some(path) = report {
                let mut doc: Value = serde_json::from_str(&rep.to_json(name)).expect("report json");
                doc["command"] = json!("collapse");
                doc["input_sha256"] = json!(digest(&text));
                outputs.push((Some(path), serde_json::to_string_pretty(&doc).expect("json") + "\n"));
            }
            if let Some(path) = csv {
                outputs.push((Some(path), CollapseReport::to_csv(&[(name, &rep)])));
            }
            for (path, body) in outputs {
                write_output(path.as_deref(), &body)?;
            }
        }
        Command::Values { input, state: which } => {
            let orig = read_model(&read_input(&input)?)?;
            let (m, map) = prepared(&orig);
            let g = value_functions(&m)?;
            let states: Vec<StateId> = match which {
                Some(s) => vec![state(&orig, &s)?],
                None => (0..orig.n()).collect(),
            };
            let mut body = String::new();
            for s in states {
                let f = &g[map[s]];
                let (num, den) = (f.num.render(m.params()), f.den.render(m.params()));
                body += &format!("g[{}] = ({num}) / ({den})\n", orig.state_name(s));
            }
            write_output(None, &body)?;
        }
        Command::Derivative { input, state: which, param: k, out } => {
            let orig = read_model(&read_input(&input)?)?;
            let (m, map) = prepared(&orig);
            let i = map[state(&orig, &which)?];
            let d = derivative_pmc(&m, i, param(&orig, &k)?)?;
            for s in &d.stages {
                eprintln!("{}: {}", s.name, s.detail);
            }
            write_output(out.as_deref(), &d.to_json())?;
        }
        Command::CheckMono { input, state: which, param: k, method, budget, seed, strict } => {
            let text = read_input(&input)?;
            let orig = read_model(&text)?;
            let (m, map) = prepared(&orig);
            let i = map[state(&orig, &which)?];
            let k = param(&orig, &k)?;
            let v = check_monotone(&m, i, k, budget, seed, method)?;
            let extra = json!({ "state": which, "param": m.params()[k], "method": method.to_string(), "seed": seed });
            write_output(None, &verdict_doc("check-mono", &digest(&text), &v, m.params(), extra))?;
            return Ok(exit_for(&v, strict));
        }
        Command::CheckNwr { input, i, j, budget, seed, gadget_out, strict } => {
            let text = read_input(&input)?;
            let orig = read_model(&text)?;
            let (m, map) = prepared(&orig);
            let (a, b) = (map[state(&orig, &i)?], map[state(&orig, &j)?]);
            let v = check_nwr(&m, a, b, budget, seed)?;
            if let Some(path) = gadget_out {
                let (g, _, _) = nwr_gadget(&m, a, b)?;
                write_output(Some(&path), &emit_model(&g))?;
            }
            let extra = json!({ "i": i, "j": j, "seed": seed });
            write_output(None, &verdict_doc("check-nwr", &digest(&text), &v, m.params(), extra))?;
            return Ok(exit_for(&v, strict));
        }
        Command::GenBench { variant, n, out, prism } => {
            let m = generate(VariantSpec { variant, n })?;
            write_output(out.as_deref(), &emit(&m, if prism { Format::Prism } else { Format::Json }))?;
        }
        Command::Convert { input, out, format } => {
            let m = read_model(&read_input(&input)?)?;
            write_output(out.as_deref(), &emit(&m, format))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
