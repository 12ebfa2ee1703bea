//! Command-line front end.
//!
//! Exit codes: 0 success, 2 unreadable or malformed input, 3 semantic query
//! error (incomparable or unordered comparison), 4 resource cap exceeded.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use parachase::classify::{conflict_degree, inc_set, truth_value, TruthValue};
use parachase::files;
use parachase::fourlogic::{default_probes, merge_sources, merged_truth_report, SourceSet};
use parachase::model::{Delta, Universe};
use parachase::query::{
    choice_product, consistent_answer, parse_query, plain_answer, repair_answers,
    repairs_by_choice, AnswerSet, QueryError,
};
use parachase::suite::{run_property_suite, SuiteConfig};
use parachase::{chase, ChaseResult};

#[derive(Parser)]
#[command(
    name = "parachase",
    about = "Chase tables with nulls and functional dependencies without aborting on conflicts; \
             classify tuples as true/inc/unkn/false; merge sources; answer queries consistently.",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Saturate a table and write dstar.csv, inc.txt and stats.txt.
    Chase {
        #[arg(long)]
        schema: PathBuf,
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        fds: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Label every saturated row true/inc and list all inconsistent tuples.
    Classify {
        #[arg(long)]
        schema: PathBuf,
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        fds: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the truth value of one tuple literal (Attr=value,...).
    Truth {
        #[arg(long)]
        schema: PathBuf,
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        fds: PathBuf,
        #[arg(long)]
        tuple: String,
    },
    /// Merge sources (union of tables and dependency sets) and report how
    /// per-source truth values combine.
    Merge {
        #[arg(long)]
        schema: PathBuf,
        /// One per source, paired with --fds by position.
        #[arg(long, required = true)]
        table: Vec<PathBuf>,
        /// One per source, paired with --table by position.
        #[arg(long, required = true)]
        fds: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Answer a SELECT query under the chosen semantics.
    Query {
        #[arg(long)]
        schema: PathBuf,
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        fds: PathBuf,
        /// e.g. "SELECT Id,K WHERE C = 'c'"
        #[arg(long)]
        query: String,
        #[arg(long, value_enum, default_value_t = Mode::Plain)]
        mode: Mode,
        /// Append each answer tuple's truth value in the full pair.
        #[arg(long)]
        annotate: bool,
        /// Write the answer CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate repairs by value choice; one CSV per repair.
    Repairs {
        #[arg(long)]
        schema: PathBuf,
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        fds: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Refuse to enumerate more candidates than this.
        #[arg(long, default_value_t = 256)]
        cap: u128,
    },
    /// Run the randomized cross-checks against the brute-force oracle.
    Verify {
        #[arg(long, default_value_t = 1000)]
        instances: usize,
        #[arg(long, default_value_t = 0xA11CE)]
        seed: u64,
        /// Write choice-vs-brute repair discrepancies to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Plain,
    Consistent,
    Lower,
    Upper,
}

enum CliError {
    Input(String),
    Semantic(String),
    Cap(String),
    Failed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Semantic(_) => 3,
            CliError::Cap(_) => 4,
            CliError::Failed(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Semantic(m) | CliError::Cap(m) | CliError::Failed(m) => m,
        }
    }
}

impl From<QueryError> for CliError {
    fn from(e: QueryError) -> CliError {
        match e {
            QueryError::IncomparableAttributes(_, _) | QueryError::UnorderedDomain(_) => {
                CliError::Semantic(e.to_string())
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, contents)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn load_delta(schema: &Path, table: &Path, fds: &Path) -> Result<Delta, CliError> {
    let u = files::parse_schema(&read(schema)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", schema.display())))?;
    let u = Arc::new(u);
    let t = files::parse_table(&u, &read(table)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", table.display())))?;
    let f = files::parse_fds(&u, &read(fds)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", fds.display())))?;
    Ok(Delta::new(u, t, f))
}

fn render_inc(u: &Universe, result: &ChaseResult) -> String {
    let mut s = String::new();
    for (fd, xs) in result.inc().iter_nonempty() {
        for x in xs {
            s.push_str(&format!("{}: {}\n", fd.display(u), x.display_values()));
        }
    }
    s
}

fn render_stats(delta: &Delta, result: &ChaseResult) -> String {
    let stats = result.stats();
    format!(
        "rows_in: {}\nrows_out: {}\npasses: {}\npeak_rows: {}\nconflict_degree: {}\n",
        delta.table().len(),
        result.dstar().len(),
        stats.passes,
        stats.peak_rows,
        conflict_degree(result),
    )
}

fn answer_csv(u: &Universe, result: &ChaseResult, answers: &AnswerSet, annotate: bool) -> String {
    let labels: Option<BTreeMap<parachase::Tuple, TruthValue>> = annotate.then(|| {
        let incs = inc_set(result);
        answers.annotate(result, &incs).into_iter().collect()
    });
    let rows = answers.rows.iter().map(|t| {
        let label = labels.as_ref().map(|m| m[t].to_string());
        (t.clone(), label)
    });
    files::render_answers(u, answers.schema, rows, annotate)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Chase {
            schema,
            table,
            fds,
            out,
        } => {
            let delta = load_delta(&schema, &table, &fds)?;
            let result = chase(&delta);
            let u = delta.universe();
            write(&out.join("dstar.csv"), &files::render_table(u, result.dstar()))?;
            write(&out.join("inc.txt"), &render_inc(u, &result))?;
            write(&out.join("stats.txt"), &render_stats(&delta, &result))?;
            println!(
                "chased {} rows into {} ({} conflict entr{})",
                delta.table().len(),
                result.dstar().len(),
                result.inc().iter_nonempty().map(|(_, xs)| xs.len()).sum::<usize>(),
                if result.inc().iter_nonempty().count() == 1 { "y" } else { "ies" },
            );
            Ok(())
        }
        Command::Classify {
            schema,
            table,
            fds,
            out,
        } => {
            let delta = load_delta(&schema, &table, &fds)?;
            let result = chase(&delta);
            let incs = inc_set(&result);
            let u = delta.universe();
            let labeled = result.dstar().iter().map(|t| {
                let v = if incs.contains(t) {
                    TruthValue::Inc
                } else {
                    TruthValue::True
                };
                (t.clone(), v.to_string())
            });
            write(
                &out.join("labeled.csv"),
                &files::render_table_with_column(u, labeled, "truth"),
            )?;
            let inc_table: parachase::Table = incs.iter().cloned().collect();
            write(&out.join("inc_tuples.csv"), &files::render_table(u, &inc_table))?;
            println!(
                "{} saturated rows, {} inconsistent tuples",
                result.dstar().len(),
                incs.len()
            );
            Ok(())
        }
        Command::Truth {
            schema,
            table,
            fds,
            tuple,
        } => {
            let delta = load_delta(&schema, &table, &fds)?;
            let probe = files::parse_tuple_literal(delta.universe(), &tuple)
                .map_err(|e| CliError::Input(e.to_string()))?;
            let result = chase(&delta);
            let incs = inc_set(&result);
            println!("{}", truth_value(&probe, &result, &incs));
            Ok(())
        }
        Command::Merge {
            schema,
            table,
            fds,
            out,
        } => {
            if table.len() != fds.len() {
                return Err(CliError::Input(format!(
                    "{} --table argument(s) but {} --fds argument(s); they pair by position",
                    table.len(),
                    fds.len()
                )));
            }
            let u = Arc::new(
                files::parse_schema(&read(&schema)?)
                    .map_err(|e| CliError::Input(e.to_string()))?,
            );
            let mut deltas = Vec::new();
            for (t_path, f_path) in table.iter().zip(&fds) {
                let t = files::parse_table(&u, &read(t_path)?)
                    .map_err(|e| CliError::Input(format!("{}: {e}", t_path.display())))?;
                let f = files::parse_fds(&u, &read(f_path)?)
                    .map_err(|e| CliError::Input(format!("{}: {e}", f_path.display())))?;
                deltas.push(Delta::new(Arc::clone(&u), t, f));
            }
            let sources =
                SourceSet::new(deltas).map_err(|e| CliError::Input(e.to_string()))?;
            let merged = merge_sources(&sources);
            write(&out.join("merged.csv"), &files::render_table(&u, merged.table()))?;
            write(&out.join("merged_fds.txt"), &files::render_fds(&u, merged.fds()))?;
            let probes = default_probes(&sources);
            let reports = merged_truth_report(&sources, &probes)
                .map_err(|e| CliError::Failed(e.to_string()))?;
            let mut text = String::new();
            for r in &reports {
                let per_source: Vec<String> =
                    r.per_source.iter().map(ToString::to_string).collect();
                text.push_str(&format!(
                    "{} | {} | {} | {} | {}\n",
                    r.probe.display(&u),
                    per_source.join(","),
                    r.fold,
                    r.merged,
                    if r.equal { "yes" } else { "no" },
                ));
            }
            write(&out.join("report.txt"), &text)?;
            println!(
                "merged {} source(s) into {} rows; {} probes reported",
                sources.deltas().len(),
                merged.table().len(),
                reports.len()
            );
            Ok(())
        }
        Command::Query {
            schema,
            table,
            fds,
            query,
            mode,
            annotate,
            out,
        } => {
            let delta = load_delta(&schema, &table, &fds)?;
            let u = delta.universe().clone();
            let q = parse_query(&u, &query)?;
            let result = chase(&delta);
            let answers = match mode {
                Mode::Plain => plain_answer(&q, &result)?,
                Mode::Consistent => consistent_answer(&q, &result)?,
                Mode::Lower => repair_answers(&q, &result)?.0,
                Mode::Upper => repair_answers(&q, &result)?.1,
            };
            let csv = answer_csv(&u, &result, &answers, annotate);
            match out {
                Some(path) => write(&path, &csv)?,
                None => print!("{csv}"),
            }
            Ok(())
        }
        Command::Repairs {
            schema,
            table,
            fds,
            out,
            cap,
        } => {
            let delta = load_delta(&schema, &table, &fds)?;
            let result = chase(&delta);
            let product = choice_product(&result);
            if product > cap {
                return Err(CliError::Cap(format!(
                    "choice product {product} exceeds the cap {cap}"
                )));
            }
            let reps = repairs_by_choice(&result);
            let u = delta.universe();
            for (i, rep) in reps.iter().enumerate() {
                write(
                    &out.join(format!("repair_{:03}.csv", i + 1)),
                    &files::render_table(u, &rep.rows),
                )?;
            }
            println!("{}", reps.len());
            Ok(())
        }
        Command::Verify {
            instances,
            seed,
            report,
        } => {
            let cfg = SuiteConfig {
                instances,
                base_seed: seed,
                ..Default::default()
            };
            let outcome = run_property_suite(&cfg);
            for line in outcome.summary_lines() {
                println!("{line}");
            }
            if let Some(path) = report {
                let mut text = String::new();
                for line in &outcome.discrepancies {
                    text.push_str(line);
                    text.push('\n');
                }
                write(&path, &text)?;
            } else {
                for line in &outcome.discrepancies {
                    eprintln!("discrepancy: {line}");
                }
            }
            if outcome.passed() {
                Ok(())
            } else {
                Err(CliError::Failed(format!(
                    "{} check failure(s)",
                    outcome.total_failures()
                )))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
