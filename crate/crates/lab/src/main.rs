use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use lcslab::config::ExperimentConfig;
use lcslab::harness::{self, Reference, SummaryRow};
use lcslab::records::{read_records, stream_id};
use lcslab_core::cells::{decompose, decompose_ragged};
use lcslab_core::limits::{check_dk_dw_relation, estimate_gamma_tilde, lis_standardize, NORMAL_DENSITY_BOUND};
use lcslab_core::stein::chatterjee_rhs;
use lcslab_core::{LetterDistribution, SeedSpec, Word};
use serde_json::json;

#[derive(Parser)]
#[command(name = "lcslab", version, about = "Random LCS and LIS simulation laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum RefArg {
    Normal,
    Tw2,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config, writing JSONL records and a CSV summary.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Records file; defaults to the config's output_path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Summary CSV; printed to stdout when omitted.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Continue an interrupted records file instead of starting over.
        #[arg(long)]
        resume: bool,
        /// Allow laws that fail the CLT hypotheses.
        #[arg(long)]
        force: bool,
    },
    /// Canonical optimal cell decomposition of two words.
    Decompose {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        v: usize,
        /// Accept lengths not divisible by v; the last block takes the rest.
        #[arg(long)]
        ragged: bool,
    },
    /// Plug-in value of the normal-approximation bound for each n.
    Stein {
        #[arg(long)]
        config: PathBuf,
    },
    /// Estimate E LCS / normalizer for uniform words.
    Gamma {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        reps: usize,
        /// Length ratio |y| / |x|.
        #[arg(long, default_value_t = 1.0)]
        ratio: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare edge-scaled LIS records with F2 and optionally dump the table.
    Twfit {
        #[arg(long)]
        records: PathBuf,
        /// Write the F2 table as CSV (t, F2, density, err).
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Distances of a records file to a reference law, per n.
    Distfit {
        #[arg(long)]
        records: PathBuf,
        #[arg(long = "ref", value_enum)]
        reference: RefArg,
    },
}

fn read_word(path: &Path) -> Result<Word> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let letters = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u32>().with_context(|| format!("{}: bad letter {t:?}", path.display())))
        .collect::<Result<Vec<_>>>()?;
    Ok(Word::from_letters(letters)?)
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn write_rows(rows: &[SummaryRow], path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let mut f = fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
            harness::write_summary_csv(&mut f, rows)?;
        }
        None => harness::write_summary_csv(&mut io::stdout().lock(), rows)?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            config,
            out,
            summary,
            resume,
            force,
        } => {
            let mut cfg = ExperimentConfig::load_unchecked(&config)?;
            cfg.force |= force;
            cfg.validate()?;
            let path = harness::records_path(&cfg, out.as_deref())?.to_owned();
            let rows = if resume {
                harness::resume(&cfg, &path)?
            } else {
                harness::run_experiment(&cfg, &path)?
            };
            write_rows(&rows, summary.as_deref())
        }
        Command::Decompose { x, y, v, ragged } => {
            let (x, y) = (read_word(&x)?, read_word(&y)?);
            let dec = if ragged {
                decompose_ragged(x.letters(), y.letters(), v)?
            } else {
                decompose(x.letters(), y.letters(), v)?
            };
            print_json(&json!({
                "n": x.len(),
                "v": dec.v(),
                "d": dec.d(),
                "lcs": dec.lcs(),
                "breakpoints": dec.breakpoints(),
                "block_scores": dec.block_scores(),
                "optimal": dec.is_optimal(),
            }))
        }
        Command::Stein { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let dist = cfg.distribution()?;
            for &n in &cfg.n_values {
                let seed = SeedSpec::new(cfg.base_seed, stream_id(&cfg.experiment_id, 0, n));
                let b = chatterjee_rhs(&dist, n, cfg.reps, seed)?;
                print_json(&json!({
                    "n": n,
                    "sigma2": b.sigma2,
                    "varT": b.var_t,
                    "addend1": b.addend1,
                    "addend2": b.addend2,
                    "rhs": b.rhs,
                    "se": b.se,
                }))?;
            }
            Ok(())
        }
        Command::Gamma {
            m,
            n,
            reps,
            ratio,
            seed,
        } => {
            let dist = LetterDistribution::uniform(m)?;
            let g = estimate_gamma_tilde(&dist, n, ratio, reps, SeedSpec::new(seed, 0))?;
            print_json(&json!({
                "m": g.m,
                "n": g.n,
                "s": g.s,
                "gamma_hat": g.gamma_hat,
                "std_error": g.std_error,
                "sqrt_m_gamma": (m as f64).sqrt() * g.gamma_hat,
            }))
        }
        Command::Twfit { records, table } => {
            let tw = harness::tw_table();
            if let Some(path) = table {
                let mut f = io::BufWriter::new(fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?);
                writeln!(f, "t,F2,density,err")?;
                for ((t, f2, dens), err) in tw.grid.iter().zip(&tw.error_estimate) {
                    writeln!(f, "{t},{f2},{dens},{err}")?;
                }
            }
            let file = read_records(&records)?;
            let mut by_n = std::collections::BTreeMap::<usize, Vec<f64>>::new();
            for r in &file.records {
                let Some(&v) = r.values.get("lis") else {
                    bail!("record {} at n={} has no lis value", r.rep_index, r.n);
                };
                by_n.entry(r.n).or_default().push(v);
            }
            for (n, values) in by_n {
                let s = lis_standardize(&values, n)?;
                let (d_k, d_w) = harness::distances(&values, n, Reference::Tw2);
                print_json(&json!({
                    "n": n,
                    "count": s.len(),
                    "mean": s.mean(),
                    "sd": s.variance().sqrt(),
                    "tw_mean": tw.mean(),
                    "tw_sd": tw.sd(),
                    "d_k": d_k,
                    "d_w": d_w,
                }))?;
            }
            Ok(())
        }
        Command::Distfit { records, reference } => {
            let reference = match reference {
                RefArg::Normal => Reference::Normal,
                RefArg::Tw2 => Reference::Tw2,
            };
            for row in harness::summarize_with(&records, reference)? {
                let relation = match (reference, row.d_k, row.d_w) {
                    (Reference::Normal, Some(dk), Some(dw)) => {
                        Some(check_dk_dw_relation(dk, dw, NORMAL_DENSITY_BOUND, 1.0 / (row.count as f64).sqrt()))
                    }
                    _ => None,
                };
                print_json(&json!({
                    "n": row.n,
                    "count": row.count,
                    "d_k": row.d_k,
                    "d_w": row.d_w,
                    "dk_dw_relation": relation,
                }))?;
            }
            Ok(())
        }
    }
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("lcslab: {e:#}");
        std::process::exit(1);
    }
}
