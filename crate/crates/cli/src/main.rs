use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hashreduce::graphfile::{self, GraphFile};
use hashreduce::simulate::{simulate, SimParams};
use hashreduce::{dedup, mset, IbdGraph};

mod selftest;

#[derive(Parser)]
#[command(
    name = "hashreduce",
    version,
    about = "Summarize, compare and deduplicate marker-varying graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Keep one record per distinct graph configuration in a graph file.
    Dedup {
        file: PathBuf,
        /// Write the TSV report here instead of stdout.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Print the report as JSON on stdout.
        #[arg(long)]
        json: bool,
        /// Worker threads for summarization (0 = one per core).
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Print the markers at which two single-graph files are equal.
    Equal { a: PathBuf, b: PathBuf },
    /// Generate graphs from a random descent model.
    Simulate {
        #[arg(long)]
        pop: usize,
        #[arg(long)]
        gens: usize,
        #[arg(long)]
        realizations: usize,
        /// Crossovers per base pair per meiosis.
        #[arg(long)]
        rate: f64,
        #[arg(long)]
        len: i64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output graph file (stdout if omitted).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Check golden vectors and compare against the brute-force oracles.
    Selftest {
        /// Hash vectors to use instead of the built-in set.
        #[arg(long)]
        vectors: Option<PathBuf>,
        /// Rehash vectors to use instead of the built-in set.
        #[arg(long)]
        rehash_vectors: Option<PathBuf>,
    },
}

/// An error that maps to exit status 2.
struct Fatal(String);

impl<E: std::fmt::Display> From<E> for Fatal {
    fn from(e: E) -> Self {
        Fatal(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Fatal> {
    fs::read_to_string(path).map_err(|e| Fatal(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<GraphFile, Fatal> {
    let f =
        graphfile::parse(&read(path)?).map_err(|e| Fatal(format!("{}: {e}", path.display())))?;
    for w in &f.warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(f)
}

fn load_single(path: &Path) -> Result<IbdGraph, Fatal> {
    let mut f = load(path)?;
    match f.graphs.len() {
        1 => Ok(f.graphs.pop().unwrap()),
        n => Err(Fatal(format!(
            "{}: expected exactly one graph, found {n}",
            path.display()
        ))),
    }
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), Fatal> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Fatal(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Fatal> {
    match cli.command {
        Command::Dedup {
            file,
            out,
            json,
            threads,
        } => {
            let f = load(&file)?;
            let report = dedup::dedup(&f.graphs, threads);
            if json {
                if let Some(p) = &out {
                    write_out(Some(p), &report.to_tsv())?;
                }
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                write_out(out.as_deref(), &report.to_tsv())?;
                if out.is_some() {
                    println!(
                        "{} configurations, {} unique, speedup {}",
                        report.total_configurations, report.unique_graphs, report.speedup
                    );
                }
            }
        }
        Command::Equal { a, b } => {
            let (a, b) = (load_single(&a)?.summarize(), load_single(&b)?.summarize());
            println!("{}", mset::equality_vset([&a.summary, &b.summary]));
        }
        Command::Simulate {
            pop,
            gens,
            realizations,
            rate,
            len,
            seed,
            out,
        } => {
            let params = SimParams {
                pop,
                generations: gens,
                realizations,
                recomb_rate: rate,
                chrom_len: len,
                seed,
            };
            let graphs = simulate(&params)?;
            write_out(out.as_deref(), &graphfile::write(&graphs))?;
        }
        Command::Selftest {
            vectors,
            rehash_vectors,
        } => {
            let hash_text = match &vectors {
                Some(p) => read(p)?,
                None => selftest::HASH_VECTORS.to_string(),
            };
            let rehash_text = match &rehash_vectors {
                Some(p) => read(p)?,
                None => selftest::REHASH_VECTORS.to_string(),
            };
            let failures = selftest::run(&hash_text, &rehash_text, &mut std::io::stdout())?;
            return Ok(if failures == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            });
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(Fatal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
