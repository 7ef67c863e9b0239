//! Command-line front end: conversion, planning, execution, hom-set and
//! object enumeration, and axiom verification over a manifest-loaded
//! registry.

#![allow(clippy::result_large_err)]

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use catpipe::convert::convert;
use catpipe::formats::{parse, read_file, serialize, write_file, SerializedDocument};
use catpipe::{
    enumerate_objects, load_manifest, plan, run, verify_axioms, DocumentDescriptor, Error,
    FormatTag, ObjectsMode, Pipeline, PlanRequest, Registry,
};

#[derive(Parser)]
#[command(name = "catpipe", version, about = "Typed document-pipeline planner and runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    #[value(name = "as_paper", alias = "as-paper")]
    AsPaper,
    Reachable,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a document file between formats
    Convert {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Find a shortest pipeline between two descriptors
    Plan {
        #[arg(long)]
        registry: PathBuf,
        #[arg(long = "from-desc")]
        from_desc: String,
        #[arg(long = "to-desc")]
        to_desc: String,
        #[arg(long = "max-steps", default_value_t = catpipe::DEFAULT_MAX_STEPS)]
        max_steps: usize,
    },
    /// Run an explicit pipeline on a document file
    Run {
        #[arg(long)]
        registry: PathBuf,
        #[arg(long)]
        pipeline: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Plan from the input document's descriptor, then run
    Auto {
        #[arg(long)]
        registry: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "to-desc")]
        to_desc: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long = "max-steps", default_value_t = catpipe::DEFAULT_MAX_STEPS)]
        max_steps: usize,
    },
    /// Print hom-sets: one pair, all non-empty pairs, or the flat id list
    Hom {
        #[arg(long)]
        registry: PathBuf,
        /// Print every registered morphism id once
        #[arg(long)]
        flat: bool,
        #[arg(long = "from-desc")]
        from_desc: Option<String>,
        #[arg(long = "to-desc")]
        to_desc: Option<String>,
    },
    /// Enumerate the category's objects
    Objects {
        #[arg(long)]
        registry: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
    },
    /// Check identity, associativity and closure over the corpus
    VerifyLaws {
        #[arg(long)]
        registry: PathBuf,
    },
}

fn parse_descriptor(s: &str) -> Result<DocumentDescriptor, Error> {
    s.parse()
}

fn exit_code_for(err: &Error) -> u8 {
    match err.root() {
        Error::NoPlan { .. } => 3,
        Error::SignatureViolation { .. } => 4,
        Error::PostconditionViolation { .. } => 5,
        _ => 1,
    }
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Convert { input, from, to, out } => {
            let from = FormatTag::new(from)?;
            let to = FormatTag::new(to)?;
            let bytes = std::fs::read(&input)?;
            let doc = parse(&SerializedDocument::new(bytes, from))?;
            let converted = convert(&doc, &to)?;
            let rendered = serialize(&converted, &to)?;
            std::fs::write(&out, &rendered.bytes)?;
        }
        Command::Plan { registry, from_desc, to_desc, max_steps } => {
            let reg = load_manifest(&registry)?;
            let request = PlanRequest::new(parse_descriptor(&from_desc)?, parse_descriptor(&to_desc)?)
                .with_max_steps(max_steps);
            let pipeline = plan(&reg, &request)?;
            for id in &pipeline.steps {
                println!("{id}");
            }
        }
        Command::Run { registry, pipeline, input, out } => {
            let reg = load_manifest(&registry)?;
            let steps: Vec<String> = pipeline
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect();
            let doc = read_file(&input)?;
            let result = run(&reg, &Pipeline::new(steps), &doc)?;
            write_file(&out, &result)?;
        }
        Command::Auto { registry, input, to_desc, out, max_steps } => {
            let reg = load_manifest(&registry)?;
            let doc = read_file(&input)?;
            let request = PlanRequest::new(doc.descriptor(), parse_descriptor(&to_desc)?)
                .with_max_steps(max_steps);
            let pipeline = plan(&reg, &request)?;
            for id in &pipeline.steps {
                println!("{id}");
            }
            let result = run(&reg, &pipeline, &doc)?;
            write_file(&out, &result)?;
        }
        Command::Hom { registry, flat, from_desc, to_desc } => {
            let reg = load_manifest(&registry)?;
            if flat {
                for id in reg.flat_ids() {
                    println!("{id}");
                }
            } else if let (Some(src), Some(dst)) = (&from_desc, &to_desc) {
                let hom = reg.hom(&parse_descriptor(src)?, &parse_descriptor(dst)?);
                for id in &hom.morphisms {
                    println!("{id}");
                }
            } else {
                print_all_homs(&reg);
            }
        }
        Command::Objects { registry, mode } => {
            let reg = load_manifest(&registry)?;
            let mode = match mode {
                Mode::AsPaper => ObjectsMode::AsPaper,
                Mode::Reachable => ObjectsMode::Reachable,
            };
            for object in enumerate_objects(&reg, mode) {
                if object.label == object.descriptor.to_string() {
                    println!("{}", object.label);
                } else {
                    println!("{object}");
                }
            }
        }
        Command::VerifyLaws { registry } => {
            let reg = load_manifest(&registry)?;
            let report = verify_axioms(&reg)?;
            print!("{report}");
            if !report.all_passed() {
                let (morphism, _) = report
                    .identity
                    .counterexamples
                    .iter()
                    .chain(&report.associativity.counterexamples)
                    .chain(&report.closure.counterexamples)
                    .next()
                    .cloned()
                    .unwrap_or_default();
                return Err(Error::PostconditionViolation {
                    morphism,
                    reason: "law verification found counterexamples".into(),
                });
            }
        }
    }
    Ok(())
}

/// Every non-empty hom-set over the reachable object set, one line per
/// pair: `src -> dst: id,id`.
fn print_all_homs(reg: &Registry) {
    let objects: BTreeSet<DocumentDescriptor> = enumerate_objects(reg, ObjectsMode::Reachable)
        .into_iter()
        .map(|o| o.descriptor)
        .collect();
    for src in &objects {
        for dst in &objects {
            let hom = reg.hom(src, dst);
            if !hom.morphisms.is_empty() {
                println!("{src} -> {dst}: {}", hom.morphisms.join(","));
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
