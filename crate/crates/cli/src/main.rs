//! `xdual`: compute and enumerate formal explanations of tree-model predictions.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use xdual_core::duality::verify_duality;
use xdual_core::enumerate::{enumerate_all_with, enumerate_cxps, EnumerationOptions, Found};
use xdual_core::explain::{cxp_witness, extract_axp, extract_cxp, is_axp, is_cxp, targeted_cxp};
use xdual_core::hitting_set::MhsMode;
use xdual_core::io::{
    parse_classes, parse_instances, parse_model, parse_order, serialize_model, write_instances,
    InstanceRow,
};
use xdual_core::stats::{instance_stats, StatsReport};
use xdual_core::synth::{random_ensemble, random_instances, random_tree_model, TreeParams};
use xdual_core::{Budget, Error, ExplanationProblem, Literal, Model, Oracle};

const BUDGET_ENV: &str = "XDUAL_BUDGET";

#[derive(Parser)]
#[command(
    name = "xdual",
    version,
    about = "Abductive and contrastive explanations for tree classifiers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Inputs {
    /// Model file (JSON)
    #[arg(short, long)]
    model: PathBuf,
    /// Instances file (CSV with a header of feature names)
    #[arg(short, long)]
    instances: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EnumMode {
    Cxp,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SynthKind {
    Tree,
    Ensemble,
}

#[derive(Subcommand)]
enum Command {
    /// Print the predicted class of each instance
    Predict {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Print one abductive explanation per instance
    Axp {
        #[command(flatten)]
        inputs: Inputs,
        /// Comma-separated feature processing order
        #[arg(long)]
        order: Option<String>,
    },
    /// Print one contrastive explanation and its witness per instance
    Cxp {
        #[command(flatten)]
        inputs: Inputs,
        /// Restrict the alternative prediction to these classes
        #[arg(long, value_name = "CLASS[,CLASS...]")]
        target: Option<String>,
        #[arg(long)]
        order: Option<String>,
    },
    /// Stream explanations as JSON lines
    Enum {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, value_enum, default_value = "all")]
        mode: EnumMode,
        /// Stop after N explanations per instance
        #[arg(long)]
        limit: Option<u64>,
        /// Emit each instance's explanations sorted by size
        #[arg(long)]
        sort_size: bool,
        /// Use minimum-cardinality hitting sets
        #[arg(long)]
        smallest: bool,
        #[arg(long)]
        order: Option<String>,
        /// Write per-literal occurrence counts to this CSV file
        #[arg(long, value_name = "FILE")]
        pixel_occurrence: Option<PathBuf>,
    },
    /// Enumerate everything and check AXp/CXp hitting-set duality
    Verify {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Write per-instance enumeration statistics
    Stats {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(short, long)]
        output: PathBuf,
        /// Add wall-clock columns (output is then not reproducible)
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        smallest: bool,
    },
    /// Generate a random model and optionally random instances
    Synth {
        #[arg(value_enum)]
        kind: SynthKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        features: usize,
        #[arg(long, default_value_t = 5)]
        trees: usize,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 100_000)]
        scale: i64,
        #[arg(short, long)]
        output: PathBuf,
        /// Number of random instances to write alongside the model
        #[arg(long, default_value_t = 0)]
        count: usize,
        #[arg(long)]
        instances_output: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_budget() {
            4
        } else if e.is_input() {
            3
        } else if matches!(e, Error::InvalidOrder(_) | Error::InvalidTarget(_)) {
            2
        } else {
            1
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure {
        code: 3,
        message: format!("{}: {e}", path.display()),
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn budget() -> CliResult<Budget> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v.parse().map_err(|e| Failure {
            code: 2,
            message: format!("{BUDGET_ENV}: {e}"),
        }),
        Err(_) => Ok(Budget::default()),
    }
}

fn load(inputs: &Inputs) -> CliResult<(Model, Vec<InstanceRow>)> {
    let text = fs::read_to_string(&inputs.model).map_err(|e| io_failure(&inputs.model, e))?;
    let model = parse_model(&text).map_err(|e| Failure {
        message: format!("{}: {}", inputs.model.display(), e),
        ..Failure::from(e)
    })?;
    let csv =
        fs::read_to_string(&inputs.instances).map_err(|e| io_failure(&inputs.instances, e))?;
    let rows = parse_instances(&csv, model.space()).map_err(|e| Failure {
        message: format!("{}: {}", inputs.instances.display(), e),
        ..Failure::from(e)
    })?;
    Ok((model, rows))
}

fn problem<'m>(
    model: &'m Model,
    row: &InstanceRow,
    order: &Option<Vec<usize>>,
) -> CliResult<ExplanationProblem<'m>> {
    let p = ExplanationProblem::new(model, row.instance.clone())?;
    Ok(match order {
        Some(o) => p.with_order(o)?,
        None => p,
    })
}

fn literal_map(model: &Model, literals: &[Literal]) -> Value {
    let space = model.space();
    let mut sorted = literals.to_vec();
    sorted.sort();
    let mut map = Map::new();
    for l in sorted {
        let f = space.feature(l.feature);
        map.insert(f.name.clone(), Value::String(f.domain[l.value].clone()));
    }
    Value::Object(map)
}

fn write_out(out: &mut impl Write, text: &str) -> CliResult<()> {
    out.write_all(text.as_bytes()).map_err(|e| Failure {
        code: 1,
        message: format!("stdout: {e}"),
    })
}

fn run(cli: Cli) -> CliResult<u8> {
    let budget = budget()?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Predict { inputs } => {
            let (model, rows) = load(&inputs)?;
            for r in &rows {
                writeln!(out, "{}", model.class_name(model.predict(&r.instance))).ok();
            }
        }
        Command::Axp { inputs, order } => {
            let (model, rows) = load(&inputs)?;
            let order = order.map(|s| parse_order(model.space(), &s)).transpose()?;
            for r in &rows {
                let p = problem(&model, r, &order)?;
                let mut oracle = Oracle::with_budget(&model, &budget);
                let axp = extract_axp(&p, &mut oracle, None)?;
                let line = format!(
                    "{}: {}\n",
                    model.class_name(p.prediction()),
                    model.space().format_literals(axp.literals())
                );
                write_out(&mut out, &line)?;
            }
        }
        Command::Cxp {
            inputs,
            target,
            order,
        } => {
            let (model, rows) = load(&inputs)?;
            let order = order.map(|s| parse_order(model.space(), &s)).transpose()?;
            let targets = target.map(|s| parse_classes(&model, &s)).transpose()?;
            for r in &rows {
                let mut p = problem(&model, r, &order)?;
                let mut oracle = Oracle::with_budget(&model, &budget);
                let pi = model.class_name(p.prediction()).to_string();
                let cxp = match &targets {
                    Some(ts) => {
                        let ts: Vec<_> = ts
                            .iter()
                            .copied()
                            .filter(|&t| t != p.prediction())
                            .collect();
                        if ts.is_empty() {
                            write_out(&mut out, &format!("{pi}: none (already predicted)\n"))?;
                            continue;
                        }
                        p = p.with_targets(&ts)?;
                        match targeted_cxp(&p, &mut oracle) {
                            Ok(c) => Some(c),
                            Err(Error::TargetUnreachable) => None,
                            Err(e) => return Err(e.into()),
                        }
                    }
                    None => extract_cxp(&p, &mut oracle, &[], &budget)?,
                };
                let line = match cxp {
                    None => format!("{pi}: none\n"),
                    Some(c) => {
                        let w = cxp_witness(&p, &mut oracle, &c)?;
                        format!(
                            "{pi}: {} witness {} => {}\n",
                            model.space().format_literals(c.literals()),
                            model.space().format_literals(&w.replacement),
                            model.class_name(w.class)
                        )
                    }
                };
                write_out(&mut out, &line)?;
            }
        }
        Command::Enum {
            inputs,
            mode,
            limit,
            sort_size,
            smallest,
            order,
            pixel_occurrence,
        } => {
            let (model, rows) = load(&inputs)?;
            let order = order.map(|s| parse_order(model.space(), &s)).transpose()?;
            let options = EnumerationOptions {
                mode: if smallest {
                    MhsMode::MinimumCardinality
                } else {
                    MhsMode::SubsetMinimal
                },
                limit,
            };
            let space = model.space();
            let mut occurrences: Vec<Vec<[u64; 2]>> = space
                .features()
                .iter()
                .map(|f| vec![[0, 0]; f.domain.len()])
                .collect();
            for r in &rows {
                let p = problem(&model, r, &order)?;
                let mut oracle = Oracle::with_budget(&model, &budget);
                let found: Vec<Found> = match mode {
                    EnumMode::Cxp => {
                        let mut v = Vec::new();
                        for c in enumerate_cxps(&p, &mut oracle, &budget) {
                            if limit.is_some_and(|l| v.len() as u64 >= l) {
                                break;
                            }
                            v.push(Found::Cxp(c?));
                        }
                        v
                    }
                    EnumMode::All => {
                        let mut v = Vec::new();
                        enumerate_all_with(&p, &mut oracle, &budget, &options, |f| {
                            v.push(f.clone())
                        })?;
                        v
                    }
                };
                let mut records: Vec<(usize, Value)> = Vec::with_capacity(found.len());
                for f in &found {
                    let (kind, lits) = match f {
                        Found::Axp(a) => ("axp", a.literals()),
                        Found::Cxp(c) => ("cxp", c.literals()),
                    };
                    for l in lits {
                        occurrences[l.feature][l.value][usize::from(kind == "cxp")] += 1;
                    }
                    let mut rec = json!({
                        "row": r.row,
                        "prediction": model.class_name(p.prediction()),
                        "kind": kind,
                        "size": lits.len(),
                        "explanation": literal_map(&model, lits),
                    });
                    if let Found::Cxp(c) = f {
                        let w = cxp_witness(&p, &mut oracle, c)?;
                        let obj = rec.as_object_mut().expect("object");
                        obj.insert("witness".into(), literal_map(&model, &w.replacement));
                        obj.insert("witness_class".into(), json!(model.class_name(w.class)));
                    }
                    records.push((lits.len(), rec));
                }
                if sort_size {
                    records.sort_by_key(|(size, _)| *size);
                }
                for (_, rec) in records {
                    write_out(&mut out, &format!("{rec}\n"))?;
                }
            }
            if let Some(path) = pixel_occurrence {
                let mut text = String::from("feature,value,axp_occurrences,cxp_occurrences\n");
                for (f, per_value) in occurrences.iter().enumerate() {
                    for (v, [a, c]) in per_value.iter().enumerate() {
                        if a + c > 0 {
                            let feat = space.feature(f);
                            text.push_str(&format!("{},{},{a},{c}\n", feat.name, feat.domain[v]));
                        }
                    }
                }
                fs::write(&path, text).map_err(|e| io_failure(&path, e))?;
            }
        }
        Command::Verify { inputs } => {
            let (model, rows) = load(&inputs)?;
            let results: Vec<CliResult<(String, bool)>> = rows
                .par_iter()
                .map(|r| verify_row(&model, r, &budget))
                .collect();
            let mut all_ok = true;
            for res in results {
                let (text, ok) = res?;
                all_ok &= ok;
                write_out(&mut out, &text)?;
            }
            if !all_ok {
                return Ok(1);
            }
        }
        Command::Stats {
            inputs,
            output,
            timing,
            smallest,
        } => {
            let (model, rows) = load(&inputs)?;
            let options = EnumerationOptions {
                mode: if smallest {
                    MhsMode::MinimumCardinality
                } else {
                    MhsMode::SubsetMinimal
                },
                limit: None,
            };
            let results: Vec<_> = rows
                .par_iter()
                .map(|r| instance_stats(&model, r, &budget, &options))
                .collect();
            let report = StatsReport {
                rows: results.into_iter().collect::<Result<_, _>>()?,
            };
            fs::write(&output, report.to_csv(timing)).map_err(|e| io_failure(&output, e))?;
            write_out(&mut out, &stats_summary(&report, timing))?;
        }
        Command::Synth {
            kind,
            seed,
            features,
            trees,
            depth,
            scale,
            output,
            count,
            instances_output,
        } => {
            let model = match kind {
                SynthKind::Tree => random_tree_model(seed, &TreeParams::default()),
                SynthKind::Ensemble => random_ensemble(seed, features, 2, trees, depth, scale),
            };
            fs::write(&output, serialize_model(&model)).map_err(|e| io_failure(&output, e))?;
            if let Some(path) = instances_output {
                let xs = random_instances(seed.wrapping_add(1), model.space(), count);
                fs::write(&path, write_instances(model.space(), &xs))
                    .map_err(|e| io_failure(&path, e))?;
            }
        }
    }
    Ok(0)
}

fn verify_row(model: &Model, row: &InstanceRow, budget: &Budget) -> CliResult<(String, bool)> {
    let p = ExplanationProblem::new(model, row.instance.clone())?;
    let mut oracle = Oracle::with_budget(model, budget);
    let mut found = Vec::new();
    enumerate_all_with(
        &p,
        &mut oracle,
        budget,
        &EnumerationOptions::default(),
        |f| found.push(f.clone()),
    )?;
    let mut check = Oracle::with_budget(model, budget);
    let mut problems = Vec::new();
    let (mut axps, mut cxps) = (Vec::new(), Vec::new());
    let space = model.space();
    for f in &found {
        match f {
            Found::Axp(a) => {
                if !is_axp(&p, &mut check, &a.features())? {
                    problems.push(format!(
                        "{} fails the AXp check",
                        space.format_literals(a.literals())
                    ));
                }
                axps.push(a.features());
            }
            Found::Cxp(c) => {
                if !is_cxp(&p, &mut check, &c.features(), &[])? {
                    problems.push(format!(
                        "{} fails the CXp check",
                        space.format_literals(c.literals())
                    ));
                }
                cxps.push(c.features());
            }
        }
    }
    let report = verify_duality(&axps, &cxps);
    let name = |f: usize| space.literal_name(row.instance.literal(f));
    problems.extend(report.violations.iter().map(|v| v.describe(&name)));
    let mut text = format!(
        "row {} ({}): {} AXps, {} CXps, {}\n",
        row.row,
        model.class_name(p.prediction()),
        axps.len(),
        cxps.len(),
        if problems.is_empty() {
            "duality ok"
        } else {
            "FAILED"
        }
    );
    for msg in &problems {
        text.push_str(&format!("  violation: {msg}\n"));
    }
    Ok((text, problems.is_empty()))
}

fn stats_summary(report: &StatsReport, timing: bool) -> String {
    let a = report.aggregate();
    let size = |x: Option<f64>| x.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into());
    let mut s = format!("instances: {}\n", a.instances);
    s.push_str(&format!(
        "AXps: total {}, mean {:.3} per instance, avg size {}, max size {}\n",
        a.total_axps,
        a.mean_axps,
        size(a.avg_axp_size),
        a.max_axp_size
    ));
    s.push_str(&format!(
        "CXps: total {}, mean {:.3} per instance, avg size {}, max size {}\n",
        a.total_cxps,
        a.mean_cxps,
        size(a.avg_cxp_size),
        a.max_cxp_size
    ));
    s.push_str(&format!(
        "oracle calls: total {}, mean {:.3} per instance\n",
        a.oracle_calls, a.mean_oracle_calls
    ));
    match a.cxps_not_larger() {
        Some(true) => s.push_str("avg CXp size <= avg AXp size: yes\n"),
        Some(false) => s.push_str(&format!(
            "FLAG: avg CXp size {} exceeds avg AXp size {} (counterexample to the usual tendency)\n",
            size(a.avg_cxp_size),
            size(a.avg_axp_size)
        )),
        None => s.push_str("avg CXp size <= avg AXp size: n/a (an explanation family is empty)\n"),
    }
    if timing {
        s.push_str(&format!(
            "wall time: {:.3} ms\n",
            a.time.as_secs_f64() * 1e3
        ));
    }
    s
}
