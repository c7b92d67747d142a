//! Seeded, resumable replication runs and their summaries.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;
use std::path::Path;
use std::sync::OnceLock;
use std::time::Instant;

use lcslab_core::cells::{block_width, decompose_ragged, evaluate_genericity, hm_bound, GenericityParams};
use lcslab_core::engines::{lcs_bitparallel, lis_patience};
use lcslab_core::limits::{
    d_kolmogorov, d_wasserstein1, default_delta, estimate_gamma, estimate_gamma_tilde, lis_standardize, standardize,
    tw_build_table, EmpiricalSample, TwTable,
};
use lcslab_core::models::{sample_permutation_with, sample_word_with};
use lcslab_core::stein::{budget_split, t_sampled_with};
use lcslab_core::{LetterDistribution, SeedSpec};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::config::{ExperimentConfig, Kind};
use crate::error::{LabError, LabResult};
use crate::records::{read_records, stream_id, Manifest, RecordWriter, ReplicationRecord};

/// Reference law for distance columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    /// Standard normal after moment standardization.
    Normal,
    /// `F_2` after edge scaling.
    Tw2,
    None,
}

impl Kind {
    /// Record field that the summary describes.
    pub fn primary_statistic(self) -> &'static str {
        match self {
            Kind::CltWords | Kind::Decompose => "lcs",
            Kind::TwPermutations => "lis",
            Kind::GammaScan => "gamma",
            Kind::Genericity => "event_e",
            Kind::SteinProbe => "f",
        }
    }

    pub fn reference(self) -> Reference {
        match self {
            Kind::CltWords | Kind::GammaScan | Kind::SteinProbe => Reference::Normal,
            Kind::TwPermutations => Reference::Tw2,
            Kind::Genericity | Kind::Decompose => Reference::None,
        }
    }
}

/// One row per `n`. Distances are `None` when undefined (no reference or a
/// constant sample).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub n: usize,
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    /// Central moments `r = 1..=4`, divisor `N`.
    pub moments: [f64; 4],
    pub d_k: Option<f64>,
    pub d_w: Option<f64>,
}

/// Grid step of the shared `F_2` table.
pub const TW_STEP: f64 = 0.01;

/// `F_2` on `[-10, 6]`, built once per process.
pub fn tw_table() -> &'static TwTable {
    static TABLE: OnceLock<TwTable> = OnceLock::new();
    TABLE.get_or_init(|| tw_build_table(TW_STEP, -10.0, 6.0).expect("F2 table builds on the default grid"))
}

pub fn normal() -> Normal {
    Normal::standard()
}

/// Distances of `values` (at length `n`) to the reference.
pub fn distances(values: &[f64], n: usize, reference: Reference) -> (Option<f64>, Option<f64>) {
    match reference {
        Reference::None => (None, None),
        Reference::Normal => match standardize(values, n) {
            Ok(s) => {
                let nd = normal();
                (Some(d_kolmogorov(&s, |t| nd.cdf(t))), Some(d_wasserstein1(&s, |p| nd.inverse_cdf(p))))
            }
            Err(_) => (None, None),
        },
        Reference::Tw2 => match lis_standardize(values, n) {
            Ok(s) if !s.is_empty() => {
                let t = tw_table();
                (Some(d_kolmogorov(&s, |x| t.cdf(x))), Some(d_wasserstein1(&s, |p| t.quantile(p))))
            }
            _ => (None, None),
        },
    }
}

/// Summary rows from raw records, grouped by `n`.
pub fn summarize_records(records: &[ReplicationRecord], key: &str, reference: Reference) -> LabResult<Vec<SummaryRow>> {
    let mut by_n: BTreeMap<usize, Vec<&ReplicationRecord>> = BTreeMap::new();
    for r in records {
        by_n.entry(r.n).or_default().push(r);
    }
    let mut rows = Vec::with_capacity(by_n.len());
    for (n, mut group) in by_n {
        group.sort_by_key(|r| r.rep_index);
        let values = group
            .iter()
            .map(|r| {
                r.values.get(key).copied().ok_or_else(|| {
                    LabError::Config(format!("record {} at n={n} lacks field {key}", r.rep_index))
                })
            })
            .collect::<LabResult<Vec<f64>>>()?;
        let sample = EmpiricalSample::new(values.clone(), n)?;
        let (d_k, d_w) = distances(&values, n, reference);
        rows.push(SummaryRow {
            n,
            count: values.len(),
            mean: sample.mean(),
            variance: sample.variance(),
            moments: [1, 2, 3, 4].map(|r| sample.central_moment(r)),
            d_k,
            d_w,
        });
    }
    Ok(rows)
}

/// Recomputes the summary of a record file from its raw records.
pub fn summarize(path: &Path) -> LabResult<Vec<SummaryRow>> {
    let file = read_records(path)?;
    let Some(manifest) = file.manifest else {
        return Ok(Vec::new());
    };
    let kind = manifest.config.kind;
    summarize_records(&file.records, kind.primary_statistic(), kind.reference())
}

pub fn summarize_with(path: &Path, reference: Reference) -> LabResult<Vec<SummaryRow>> {
    let file = read_records(path)?;
    let Some(manifest) = file.manifest else {
        return Ok(Vec::new());
    };
    summarize_records(&file.records, manifest.config.kind.primary_statistic(), reference)
}

pub const SUMMARY_HEADER: &str = "n,count,mean,variance,m1,m2,m3,m4,d_k,d_w";

pub fn write_summary_csv<W: Write>(out: &mut W, rows: &[SummaryRow]) -> std::io::Result<()> {
    writeln!(out, "{SUMMARY_HEADER}")?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.count,
            r.mean,
            r.variance,
            r.moments[0],
            r.moments[1],
            r.moments[2],
            r.moments[3],
            opt(r.d_k),
            opt(r.d_w)
        )?;
    }
    Ok(())
}

/// Per-run state shared by all replications.
struct Context<'a> {
    config: &'a ExperimentConfig,
    dist: Option<LetterDistribution>,
    params: Option<GenericityParams>,
    delta: HashMap<usize, f64>,
    inner_draws: usize,
}

impl<'a> Context<'a> {
    fn new(config: &'a ExperimentConfig) -> LabResult<Self> {
        config.validate()?;
        let dist = match config.kind {
            Kind::TwPermutations => None,
            _ => Some(config.distribution()?),
        };
        let mut delta = HashMap::new();
        let mut params = None;
        if config.kind == Kind::Genericity {
            let d = dist.as_ref().expect("word kinds carry a distribution");
            for &n in &config.n_values {
                let value = match config.delta {
                    Some(v) => v,
                    None => estimated_delta(d, n, config)?,
                };
                delta.insert(n, value);
            }
            params = Some(config.genericity_params(1.0)?);
        }
        let inner_draws = config.inner_draws.unwrap_or_else(|| budget_split(config.reps).1);
        Ok(Self {
            config,
            dist,
            params,
            delta,
            inner_draws,
        })
    }

    fn seed(&self, rep_index: usize, n: usize) -> SeedSpec {
        SeedSpec::new(self.config.base_seed, stream_id(&self.config.experiment_id, rep_index, n))
    }

    fn replicate(&self, rep_index: usize, n: usize) -> LabResult<ReplicationRecord> {
        let started = Instant::now();
        let seed = self.seed(rep_index, n);
        let mut rng = seed.rng();
        let mut values = BTreeMap::new();
        let mut put = |k: &str, v: f64| {
            values.insert(k.to_owned(), v);
        };
        let dist = || self.dist.as_ref().expect("word kinds carry a distribution");
        match self.config.kind {
            Kind::CltWords => {
                let x = sample_word_with(dist(), n, &mut rng);
                let y = sample_word_with(dist(), n, &mut rng);
                put("lcs", lcs_bitparallel(x.letters(), y.letters()) as f64);
            }
            Kind::TwPermutations => {
                let p = sample_permutation_with(n, &mut rng)?;
                put("lis", lis_patience(&p) as f64);
            }
            Kind::GammaScan => {
                let len_y = ((self.config.ratio * n as f64).round() as usize).max(1);
                let x = sample_word_with(dist(), n, &mut rng);
                let y = sample_word_with(dist(), len_y, &mut rng);
                let l = lcs_bitparallel(x.letters(), y.letters()) as f64;
                put("lcs", l);
                put("gamma", l / ((n + len_y) as f64 / 2.0));
            }
            Kind::Genericity => {
                let x = sample_word_with(dist(), n, &mut rng);
                let y = sample_word_with(dist(), n, &mut rng);
                let params = self.params.as_ref().expect("genericity params");
                let rep = evaluate_genericity(x.letters(), y.letters(), params)?;
                let delta = self.delta[&n];
                put("event_e", rep.event_e.holds as u8 as f64);
                put("event_e_exhaustive", (rep.event_e.mode == lcslab_core::cells::EventMode::Exhaustive) as u8 as f64);
                put("event_e_canonical", rep.event_e_canonical.holds as u8 as f64);
                put("event_h", rep.event_h as u8 as f64);
                put("event_k", rep.event_k as u8 as f64);
                put("good_cells", rep.event_e.good_cells as f64);
                put("good_cells_canonical", rep.event_e_canonical.good_cells as f64);
                put("required", rep.event_e.required);
                put("d", rep.d as f64);
                put("lcs", rep.lcs as f64);
                put("epsilon", rep.epsilon);
                put("delta", delta);
                put("hm_bound", hm_bound(n as f64, rep.v as f64, delta, rep.epsilon));
            }
            Kind::SteinProbe => {
                let w = sample_word_with(dist(), 2 * n, &mut rng).into_letters();
                let wp = sample_word_with(dist(), 2 * n, &mut rng).into_letters();
                let f = lcs_bitparallel(&w[..n], &w[n..]);
                let j = rng.random_range(0..2 * n);
                let mut wj = w.clone();
                wj[j] = wp[j];
                let dj = f as f64 - lcs_bitparallel(&wj[..n], &wj[n..]) as f64;
                let t = t_sampled_with(&w, &wp, self.inner_draws, &mut rng)?;
                put("f", f as f64);
                put("abs_delta3", dj.abs().powi(3));
                put("t_hat", t.mean);
                put("t_se", t.se);
            }
            Kind::Decompose => {
                let x = sample_word_with(dist(), n, &mut rng);
                let y = sample_word_with(dist(), n, &mut rng);
                let v = block_width(n, self.config.alpha);
                let dec = decompose_ragged(x.letters(), y.letters(), v)?;
                let (lo, hi) = (v as f64 * self.config.s1, v as f64 * self.config.s2);
                let good = dec.gaps().filter(|&g| lo <= g as f64 && g as f64 <= hi).count();
                put("lcs", dec.lcs() as f64);
                put("v", v as f64);
                put("d", dec.d() as f64);
                put("good_cells", good as f64);
                put("empty_cells", dec.gaps().filter(|&g| g == 0).count() as f64);
            }
        }
        Ok(ReplicationRecord {
            experiment_id: self.config.experiment_id.clone(),
            rep_index,
            n,
            values,
            wall_time: started.elapsed().as_secs_f64(),
            seed: seed.into(),
        })
    }
}

/// `delta` from growth-constant estimates at `min(n, 2000)` with 200
/// replications each.
fn estimated_delta(dist: &LetterDistribution, n: usize, config: &ExperimentConfig) -> LabResult<f64> {
    let m = n.min(2000);
    let base = SeedSpec::new(config.base_seed, stream_id(&config.experiment_id, usize::MAX, n));
    let g = estimate_gamma(dist, m, 200, base.child(0))?.gamma_hat;
    let g1 = estimate_gamma_tilde(dist, m, config.s1, 200, base.child(1))?.gamma_hat;
    let g2 = estimate_gamma_tilde(dist, m, config.s2, 200, base.child(2))?.gamma_hat;
    Ok(default_delta(g, g1, g2))
}

/// Worker count: `LCSLAB_THREADS` if set, else rayon's default.
pub fn thread_count() -> usize {
    std::env::var("LCSLAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or_else(rayon::current_num_threads)
}

fn pool(threads: usize) -> LabResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| LabError::Config(format!("thread pool: {e}")))
}

/// Runs the remaining `(n, rep_index)` tasks in order, batch by batch.
fn execute(
    ctx: &Context<'_>,
    tasks: Vec<(usize, usize)>,
    writer: &mut RecordWriter,
    threads: usize,
    mut records: Vec<ReplicationRecord>,
) -> LabResult<Vec<ReplicationRecord>> {
    let pool = pool(threads)?;
    let batch = (64 * threads).max(64);
    for chunk in tasks.chunks(batch) {
        let done: Vec<ReplicationRecord> = pool.install(|| {
            chunk
                .par_iter()
                .map(|&(n, rep)| ctx.replicate(rep, n))
                .collect::<LabResult<Vec<_>>>()
        })?;
        writer.append(&done)?;
        records.extend(done);
    }
    Ok(records)
}

fn all_tasks(config: &ExperimentConfig) -> Vec<(usize, usize)> {
    config
        .n_values
        .iter()
        .flat_map(|&n| (0..config.reps).map(move |r| (n, r)))
        .collect()
}

/// Records path: the config's `output_path` unless overridden.
pub fn records_path<'a>(config: &'a ExperimentConfig, path: Option<&'a Path>) -> LabResult<&'a Path> {
    path.or(config.output_path.as_deref())
        .ok_or_else(|| LabError::Config("no output path given".into()))
}

/// Fresh run into `path`, replacing any existing file.
pub fn run_experiment(config: &ExperimentConfig, path: &Path) -> LabResult<Vec<SummaryRow>> {
    run_experiment_with_threads(config, path, thread_count())
}

pub fn run_experiment_with_threads(config: &ExperimentConfig, path: &Path, threads: usize) -> LabResult<Vec<SummaryRow>> {
    let ctx = Context::new(config)?;
    let mut writer = RecordWriter::create(path, &Manifest::new(config))?;
    let records = execute(&ctx, all_tasks(config), &mut writer, threads, Vec::new())?;
    let kind = config.kind;
    summarize_records(&records, kind.primary_statistic(), kind.reference())
}

/// Continues an interrupted run, or starts one if `path` is missing or
/// empty. Fails if the file belongs to a different config.
pub fn resume(config: &ExperimentConfig, path: &Path) -> LabResult<Vec<SummaryRow>> {
    resume_with_threads(config, path, thread_count())
}

pub fn resume_with_threads(config: &ExperimentConfig, path: &Path, threads: usize) -> LabResult<Vec<SummaryRow>> {
    let existing = match std::fs::metadata(path) {
        Ok(m) if m.len() > 0 => read_records(path)?,
        _ => return run_experiment_with_threads(config, path, threads),
    };
    let Some(manifest) = existing.manifest else {
        return run_experiment_with_threads(config, path, threads);
    };
    let expected = config.hash();
    if manifest.config_hash != expected || manifest.config.hash() != expected {
        return Err(LabError::ManifestMismatch {
            expected,
            found: manifest.config_hash,
        });
    }
    let ctx = Context::new(config)?;
    let done: BTreeSet<(usize, usize)> = existing.records.iter().map(|r| (r.n, r.rep_index)).collect();
    let tasks: Vec<(usize, usize)> = all_tasks(config).into_iter().filter(|t| !done.contains(t)).collect();
    let mut writer = RecordWriter::reopen(path, existing.valid_len)?;
    let records = execute(&ctx, tasks, &mut writer, threads, existing.records)?;
    let kind = config.kind;
    summarize_records(&records, kind.primary_statistic(), kind.reference())
}
