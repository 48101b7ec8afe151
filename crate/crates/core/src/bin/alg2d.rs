use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use alg2d::api::{self, ApiError, AutMethod, DerSource, Input, Report};
use alg2d::errata::{Erratum, Reading};

#[derive(Parser)]
#[command(name = "alg2d", version, about = "Automorphisms, derivations and classification of two-dimensional algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Worker threads for parallel scans (0 = one per core).
    #[arg(long, env = "ALG2D_WORKERS", default_value_t = 0, global = true)]
    workers: usize,
    /// Read a corrected table entry as printed instead. Repeatable.
    #[arg(long = "verbatim", value_name = "ERRATUM", global = true)]
    verbatim: Vec<Erratum>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct InputArgs {
    /// Structure constants, "a1,a2,a3,a4;b1,b2,b3,b4".
    #[arg(long)]
    msc: Option<String>,
    /// Canonical family, e.g. "A3@c=1,0,2".
    #[arg(long)]
    family: Option<String>,
}

impl InputArgs {
    fn input(&self) -> Input<'_> {
        match (&self.msc, &self.family) {
            (Some(m), _) => Input::Msc(m),
            (_, Some(f)) => Input::Family(f),
            _ => unreachable!("clap requires one input"),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SourceArg {
    Kernel,
    ClosedForm,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Brute,
    Closed,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Derivation algebra.
    Der {
        #[arg(long)]
        field: String,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum)]
        source: Option<SourceArg>,
    },
    /// Automorphism group.
    Aut {
        #[arg(long)]
        field: String,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::Brute)]
        method: MethodArg,
    },
    /// Isomorphism test with an explicit witness.
    Iso {
        #[arg(long)]
        field: String,
        #[arg(long = "msc-a")]
        msc_a: String,
        #[arg(long = "msc-b")]
        msc_b: String,
    },
    /// Canonical class of an MSC.
    Classify {
        #[arg(long)]
        field: String,
        #[arg(long)]
        msc: String,
    },
    /// Orbit census of all MSCs over a small field.
    Census {
        #[arg(long)]
        field: String,
        /// Directory receiving orbits.jsonl and summary.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form tables against exhaustive oracles.
    VerifyTable {
        #[arg(long, default_value = "all")]
        regime: String,
        /// Comma-separated field specs; defaults to the regime's test fields.
        #[arg(long)]
        fields: Option<String>,
        #[arg(long, default_value_t = 10)]
        budget: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Canonical classes over a finite field.
    Families {
        #[arg(long)]
        field: String,
    },
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn csv_text(headers: &[String], rows: &[Vec<String>]) -> Result<String, ApiError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| ApiError::Compute(e.to_string());
    w.write_record(headers).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| ApiError::Compute(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf-8"))
}

fn pretty_text(headers: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (i, c) in r.iter().enumerate() {
            if i >= widths.len() {
                widths.push(0);
            }
            widths[i] = widths[i].max(c.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{c:<w$}", w = widths[i]))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(headers);
    for r in rows {
        out.push_str(&line(r));
    }
    out
}

fn render(format: Format, report: &Report) -> Result<String, ApiError> {
    match format {
        Format::Json => Ok(json_text(&report.json)),
        Format::Csv => csv_text(&report.headers, &report.rows),
        Format::Pretty => Ok(pretty_text(&report.headers, &report.rows)),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), ApiError> {
    fs::write(path, text).map_err(|e| ApiError::Compute(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> Result<(String, bool), ApiError> {
    let reading = Reading::verbatim(cli.verbatim.iter().copied());
    let single = |r: Report| -> Result<(String, bool), ApiError> {
        let ok = r.ok;
        Ok((render(cli.format, &r)?, ok))
    };
    match &cli.command {
        Command::Der { field, input, source } => {
            let source = source.map(|s| match s {
                SourceArg::Kernel => DerSource::Kernel,
                SourceArg::ClosedForm => DerSource::ClosedForm,
            });
            single(api::der(field, input.input(), source, &reading)?)
        }
        Command::Aut { field, input, method } => {
            let method = match method {
                MethodArg::Brute => AutMethod::Brute,
                MethodArg::Closed => AutMethod::Closed,
                MethodArg::Both => AutMethod::Both,
            };
            single(api::aut(field, input.input(), method, &reading)?)
        }
        Command::Iso { field, msc_a, msc_b } => single(api::iso(field, msc_a, msc_b)?),
        Command::Classify { field, msc } => single(api::classify(field, msc)?),
        Command::Families { field } => single(api::families(field)?),
        Command::Census { field, out } => {
            let (orbits, summary) = api::census(field)?;
            if let Some(dir) = out {
                fs::create_dir_all(dir)
                    .map_err(|e| ApiError::Compute(format!("{}: {e}", dir.display())))?;
                let mut lines = String::new();
                for o in &orbits {
                    lines.push_str(&serde_json::to_string(o).expect("serializable"));
                    lines.push('\n');
                }
                write_file(&dir.join("orbits.jsonl"), &lines)?;
                write_file(
                    &dir.join("summary.csv"),
                    &csv_text(&summary.headers, &summary.rows)?,
                )?;
            }
            single(summary)
        }
        Command::VerifyTable {
            regime,
            fields,
            budget,
            out,
        } => {
            let report = api::verify_table(regime, fields.as_deref(), *budget, reading)?;
            let json = serde_json::to_value(&report).expect("serializable");
            if let Some(path) = out {
                write_file(path, &json_text(&json))?;
            }
            let ok = report.summary.mismatch == 0;
            let text = match cli.format {
                Format::Json => json_text(&json!({ "summary": json["summary"] })),
                Format::Csv | Format::Pretty => {
                    let headers: Vec<String> = ["field", "family", "params", "kind", "item", "relaxed", "verdict", "reason"]
                        .iter()
                        .map(|s| s.to_string())
                        .collect();
                    let rows: Vec<Vec<String>> = report
                        .cases
                        .iter()
                        .map(|c| {
                            vec![
                                c.field.clone(),
                                c.family.tag.clone(),
                                c.family.params.join(" "),
                                json_plain(&serde_json::to_value(c.kind).expect("serializable")),
                                c.item.clone().unwrap_or_default(),
                                c.relaxed.to_string(),
                                json_plain(&serde_json::to_value(c.verdict).expect("serializable")),
                                c.reason.clone().unwrap_or_default(),
                            ]
                        })
                        .collect();
                    match cli.format {
                        Format::Csv => csv_text(&headers, &rows)?,
                        _ => pretty_text(&headers, &rows),
                    }
                }
            };
            Ok((text, ok))
        }
    }
}

fn json_plain(v: &Value) -> String {
    v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.workers > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.workers)
            .build_global();
    }
    match run(&cli) {
        Ok((text, ok)) => {
            let mut out = io::stdout().lock();
            if out.write_all(text.as_bytes()).is_err() {
                return ExitCode::from(1);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("alg2d: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
