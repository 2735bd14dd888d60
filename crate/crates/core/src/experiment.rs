//! Reproducible experiment runs that write CSV and JSON artifacts.
//!
//! Every run writes its data files plus `summary.json` into an output
//! directory, then `manifest.json` holding the resolved command, the library
//! version, the wall-clock duration and a SHA-256 digest of every other file.
//! Data files and the summary are byte-deterministic given the command; the
//! manifest is not, since it records timing and thread count.
//!
//! CSV numbers use 17 significant digits in scientific notation
//! (`{:.16e}`, round-half-even) and `\n` line endings.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::deep::{self, BlobSpec, LabeledDataset, TrainConfig};
use crate::ecdf::{self, Cdf, EmpiricalCdf, Interval};
use crate::engine::{self, IgmcConfig, PosteriorSamples};
use crate::error::{Error, Result};
use crate::generative::{Bernoulli, Exponential, SampleSet, Support};
use crate::reference::{self, BetaRef, GammaRef};

pub const REFERENCE_GRID_POINTS: usize = 512;
pub const MANIFEST_FILE: &str = "manifest.json";
pub const SUMMARY_FILE: &str = "summary.json";
/// Reference truncation level for L1 distances on unbounded supports.
pub const TRUNCATION_LEVEL: f64 = 0.9999;

pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernoulliArgs {
    pub m: usize,
    pub a: usize,
    pub n: usize,
    pub h: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentialArgs {
    pub m: usize,
    pub mean: f64,
    pub n: usize,
    pub h: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergeArgs {
    pub m: usize,
    pub a: usize,
    /// `(n, h)` cells.
    pub sweep: Vec<(usize, usize)>,
    /// Number of seeds per cell; seed `s` uses master seed `seed + s`.
    pub seeds: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Fixture {
    Blobs(BlobSpec),
    Csv { path: PathBuf },
}

impl Fixture {
    /// `blobs`, `blobs:classes=3,per_class=30,separation=6,seed=1`, or a
    /// path to a CSV file.
    pub fn parse(text: &str) -> Result<Self> {
        let Some(rest) = text.strip_prefix("blobs") else {
            return Ok(Fixture::Csv {
                path: PathBuf::from(text),
            });
        };
        let mut spec = BlobSpec::default();
        let rest = match rest.strip_prefix(':') {
            Some(r) => r,
            None if rest.is_empty() => "",
            None => {
                return Ok(Fixture::Csv {
                    path: PathBuf::from(text),
                })
            }
        };
        for pair in rest.split(',').filter(|p| !p.is_empty()) {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("expected key=value, got {pair:?}")))?;
            let bad = |e: &dyn std::fmt::Display| Error::InvalidConfig(format!("{key}: {e}"));
            match key {
                "classes" | "k" => spec.classes = value.parse().map_err(|e| bad(&e))?,
                "per_class" => spec.per_class = value.parse().map_err(|e| bad(&e))?,
                "separation" | "sep" => spec.separation = value.parse().map_err(|e| bad(&e))?,
                "seed" => spec.seed = value.parse().map_err(|e| bad(&e))?,
                _ => return Err(Error::InvalidConfig(format!("unknown blob key {key:?}"))),
            }
        }
        Ok(Fixture::Blobs(spec))
    }

    pub fn load(&self) -> Result<LabeledDataset> {
        match self {
            Fixture::Blobs(spec) => spec.generate(),
            Fixture::Csv { path } => LabeledDataset::read_csv(path, None),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyArgs {
    pub fixture: Fixture,
    pub x: Vec<f64>,
    pub n: usize,
    pub h: usize,
    pub seed: u64,
    pub train: TrainConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    Bernoulli(BernoulliArgs),
    Exponential(ExponentialArgs),
    Converge(ConvergeArgs),
    Classify(ClassifyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Bernoulli(_) => "bernoulli",
            Command::Exponential(_) => "exponential",
            Command::Converge(_) => "converge",
            Command::Classify(_) => "classify",
        }
    }

    pub fn master_seed(&self) -> u64 {
        match self {
            Command::Bernoulli(a) => a.seed,
            Command::Exponential(a) => a.seed,
            Command::Converge(a) => a.seed,
            Command::Classify(a) => a.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Command,
    pub master_seed: u64,
    pub version: String,
    pub threads: Option<usize>,
    pub wall_clock_seconds: f64,
    /// File name → SHA-256 hex digest, for every file except the manifest.
    pub outputs: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::InvalidConfig(format!("bad manifest: {e}")))
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub summary: Value,
    pub warnings: Vec<String>,
    pub manifest: RunManifest,
}

/// Runs `command` into `out`, on a dedicated pool of `threads` workers when
/// given (otherwise the global rayon pool).
pub fn run(command: &Command, out: &Path, threads: Option<usize>) -> Result<RunOutcome> {
    let started = Instant::now();
    fs::create_dir_all(out)?;
    let mut artifacts = Artifacts::new(out);
    let mut execute = || -> Result<Value> {
        match command {
            Command::Bernoulli(args) => run_bernoulli(args, &mut artifacts),
            Command::Exponential(args) => run_exponential(args, &mut artifacts),
            Command::Converge(args) => run_converge(args, &mut artifacts),
            Command::Classify(args) => run_classify(args, &mut artifacts),
        }
    };
    let summary = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
            .install(execute)?,
        None => execute()?,
    };
    let warnings = artifacts.warnings.clone();
    artifacts.write_json(SUMMARY_FILE, &summary)?;

    let manifest = RunManifest {
        command: command.name().to_string(),
        parameters: command.clone(),
        master_seed: command.master_seed(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        threads,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        outputs: artifacts.digests,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    fs::write(out.join(MANIFEST_FILE), text)?;
    Ok(RunOutcome {
        summary,
        warnings,
        manifest,
    })
}

/// Re-runs the command recorded in `manifest` into `out` and returns the
/// names of files whose digests differ from the recorded ones.
pub fn replay(manifest: &RunManifest, out: &Path, threads: Option<usize>) -> Result<Vec<String>> {
    let rerun = run(&manifest.parameters, out, threads)?;
    let mut mismatched: Vec<String> = manifest
        .outputs
        .iter()
        .filter(|(name, digest)| rerun.manifest.outputs.get(*name) != Some(*digest))
        .map(|(name, _)| name.clone())
        .collect();
    for name in rerun.manifest.outputs.keys() {
        if !manifest.outputs.contains_key(name) {
            mismatched.push(name.clone());
        }
    }
    Ok(mismatched)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

struct Artifacts<'a> {
    dir: &'a Path,
    digests: BTreeMap<String, String>,
    warnings: Vec<String>,
}

impl<'a> Artifacts<'a> {
    fn new(dir: &'a Path) -> Self {
        Artifacts {
            dir,
            digests: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        fs::write(self.dir.join(name), contents)?;
        self.digests
            .insert(name.to_string(), sha256_hex(contents.as_bytes()));
        Ok(())
    }

    fn write_json(&mut self, name: &str, value: &Value) -> Result<()> {
        let text = serde_json::to_string_pretty(value).expect("JSON value serializes") + "\n";
        self.write(name, &text)
    }

    fn warn(&mut self, message: String) {
        self.warnings.push(message);
    }
}

/// `t,f_hat` at every breakpoint of the posterior ECDF.
fn posterior_curve_csv(meta: &str, f: &EmpiricalCdf) -> String {
    let mut s = format!("# {meta}\nt,f_hat\n");
    for (t, c) in f.breakpoints().iter().zip(f.cumulative()) {
        let _ = writeln!(s, "{},{}", fmt_num(*t), fmt_num(*c));
    }
    s
}

/// `t,f_ref` on a uniform grid of [`REFERENCE_GRID_POINTS`] points.
fn reference_curve_csv<C: Cdf + ?Sized>(meta: &str, g: &C, domain: Interval) -> String {
    let mut s = format!("# {meta}\nt,f_ref\n");
    let steps = (REFERENCE_GRID_POINTS - 1) as f64;
    for i in 0..REFERENCE_GRID_POINTS {
        let t = domain.lo() + domain.width() * i as f64 / steps;
        let _ = writeln!(s, "{},{}", fmt_num(t), fmt_num(g.eval(t)));
    }
    s
}

fn posterior_stats(p: &PosteriorSamples, f: &EmpiricalCdf) -> Value {
    let mus = p.mus();
    let n = mus.len() as f64;
    let mean = mus.iter().sum::<f64>() / n;
    let var = mus.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / n;
    json!({
        "mean": mean,
        "std": var.sqrt(),
        "min": f.min(),
        "max": f.max(),
        "steps": f.len(),
    })
}

fn igmc_config(n: usize, h: usize, seed: u64) -> Result<IgmcConfig> {
    IgmcConfig::new(n, h, seed)
}

fn run_bernoulli(args: &BernoulliArgs, out: &mut Artifacts) -> Result<Value> {
    if args.m == 0 || args.a > args.m {
        return Err(Error::InvalidCounts(format!(
            "need 0 <= a <= m and m >= 1, got a = {}, m = {}",
            args.a, args.m
        )));
    }
    let initial = SampleSet::binary_counts(args.m, args.a)?;
    let config = igmc_config(args.n, args.h, args.seed)?;
    let posterior = engine::run_igmc(&initial, &Bernoulli, &config)?;
    let fhat = engine::posterior_cdf(&posterior)?;
    let meta = format!(
        "approach=bernoulli m={} a={} n={} h={} seed={}",
        args.m, args.a, args.n, args.h, args.seed
    );
    out.write("posterior_curve.csv", &posterior_curve_csv(&meta, &fhat))?;

    let bound = reference::theorem1_l1_bound_for(Support::Binary, args.m, args.h, args.n)?;
    let mut summary = json!({
        "command": "bernoulli",
        "m": args.m,
        "a": args.a,
        "n": args.n,
        "h": args.h,
        "seed": args.seed,
        "posterior": posterior_stats(&posterior, &fhat),
        "theorem1_bound": bound,
    });
    match BetaRef::bernoulli_posterior(args.m, args.a) {
        Ok(beta) => {
            let domain = Interval::unit();
            out.write("reference_curve.csv", &reference_curve_csv(&meta, &beta, domain))?;
            let l1 = ecdf::l1_distance_step_ref(&fhat, &beta, domain, ecdf::DEFAULT_L1_TOL)?;
            let ks = ecdf::ks_distance(&fhat, &beta);
            summary["reference"] = json!({"kind": "beta", "alpha": beta.alpha(), "beta": beta.beta()});
            summary["l1_to_reference"] = json!(l1);
            summary["ks_to_reference"] = json!(ks);
            summary["l1_within_bound"] = json!(l1 <= bound.value);
        }
        Err(_) => {
            out.warn(format!(
                "Beta({}, {}) is undefined; reference distances suppressed",
                args.a,
                args.m - args.a
            ));
            summary["reference"] = Value::Null;
            summary["l1_to_reference"] = Value::Null;
            summary["ks_to_reference"] = Value::Null;
        }
    }
    summary["warnings"] = json!(out.warnings);
    Ok(summary)
}

fn run_exponential(args: &ExponentialArgs, out: &mut Artifacts) -> Result<Value> {
    if !(args.mean > 0.0 && args.mean.is_finite()) {
        return Err(Error::InvalidConfig(format!("mean must be > 0, got {}", args.mean)));
    }
    if args.m == 0 {
        return Err(Error::InvalidCounts("m must be >= 1".into()));
    }
    // Constant observations: the fit depends on the sample only through its mean.
    let initial = SampleSet::new(vec![args.mean; args.m], Support::NonnegReals)?;
    let config = igmc_config(args.n, args.h, args.seed)?;
    let posterior = engine::run_igmc(&initial, &Exponential, &config)?;
    let fhat = engine::posterior_cdf(&posterior)?;
    let meta = format!(
        "approach=exponential m={} mean={} n={} h={} seed={}",
        args.m,
        fmt_num(args.mean),
        args.n,
        args.h,
        args.seed
    );
    out.write("posterior_curve.csv", &posterior_curve_csv(&meta, &fhat))?;

    let gamma = GammaRef::exponential_rate_posterior(args.m, args.mean)?;
    let q = reference::quantile(&gamma, TRUNCATION_LEVEL, 0.0)?;
    let display = Interval::new(0.0, q.max(fhat.max()))?;
    out.write("reference_curve.csv", &reference_curve_csv(&meta, &gamma, display))?;

    let ks = ecdf::ks_distance(&fhat, &gamma);
    let band = ecdf::dkw_band(args.n, 0.05)?;
    let threshold = 3.0 * band;
    let l1 = ecdf::l1_distance_step_ref(&fhat, &gamma, Interval::new(0.0, q)?, ecdf::DEFAULT_L1_TOL)?;
    Ok(json!({
        "command": "exponential",
        "m": args.m,
        "mean": args.mean,
        "n": args.n,
        "h": args.h,
        "seed": args.seed,
        "initial_sample_mean": initial.mean()?,
        "initial_construction": "constant",
        "posterior": posterior_stats(&posterior, &fhat),
        "reference": {"kind": "gamma", "shape": gamma.shape(), "rate": gamma.rate()},
        "ks_to_reference": ks,
        "dkw_band_0_05": band,
        "mismatch_threshold": threshold,
        "mismatch": ks > threshold,
        "l1_truncated": {"value": l1, "domain": [0.0, q], "quantile_level": TRUNCATION_LEVEL},
        "warnings": out.warnings,
    }))
}

/// Ordinary least-squares slope of `ys` on `xs`.
pub fn regression_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergeCell {
    pub n: usize,
    pub h: usize,
    pub l1: Vec<f64>,
    pub ks: Vec<f64>,
    pub bound: f64,
}

impl ConvergeCell {
    pub fn mean_l1(&self) -> f64 {
        self.l1.iter().sum::<f64>() / self.l1.len() as f64
    }
}

/// L1 and KS distances to `Beta(a, m − a)` for every cell and seed.
pub fn converge_cells(args: &ConvergeArgs) -> Result<Vec<ConvergeCell>> {
    use rayon::prelude::*;
    if args.sweep.is_empty() {
        return Err(Error::InvalidConfig("empty sweep".into()));
    }
    if args.seeds < 3 {
        return Err(Error::InvalidConfig(format!(
            "need at least 3 seeds, got {}",
            args.seeds
        )));
    }
    if args.m == 0 || args.a > args.m {
        return Err(Error::InvalidCounts(format!("a = {}, m = {}", args.a, args.m)));
    }
    let beta = BetaRef::bernoulli_posterior(args.m, args.a)
        .map_err(|e| Error::InvalidCounts(format!("limit posterior undefined: {e}")))?;
    let initial = SampleSet::binary_counts(args.m, args.a)?;
    let jobs: Vec<(usize, usize, u64)> = args
        .sweep
        .iter()
        .flat_map(|&(n, h)| (0..args.seeds as u64).map(move |s| (n, h, s)))
        .collect();
    let distances = jobs
        .par_iter()
        .map(|&(n, h, s)| {
            let config = igmc_config(n, h, args.seed.wrapping_add(s))?;
            let posterior = engine::run_igmc(&initial, &Bernoulli, &config)?;
            let fhat = engine::posterior_cdf(&posterior)?;
            let l1 = ecdf::l1_distance_step_ref(&fhat, &beta, Interval::unit(), ecdf::DEFAULT_L1_TOL)?;
            Ok((l1, ecdf::ks_distance(&fhat, &beta)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(args
        .sweep
        .iter()
        .zip(distances.chunks(args.seeds))
        .map(|(&(n, h), d)| ConvergeCell {
            n,
            h,
            l1: d.iter().map(|p| p.0).collect(),
            ks: d.iter().map(|p| p.1).collect(),
            bound: reference::theorem1_l1_bound(args.m, h, n).value,
        })
        .collect())
}

/// Slope of `ln(mean L1)` against `ln n` over the cells at the largest `h`.
pub fn converge_slope(cells: &[ConvergeCell]) -> Option<f64> {
    let h_max = cells.iter().map(|c| c.h).max()?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = cells
        .iter()
        .filter(|c| c.h == h_max)
        .map(|c| ((c.n as f64).ln(), c.mean_l1().ln()))
        .unzip();
    regression_slope(&xs, &ys)
}

fn run_converge(args: &ConvergeArgs, out: &mut Artifacts) -> Result<Value> {
    let cells = converge_cells(args)?;
    let mut runs = String::from("n,h,seed,l1,ks\n");
    let mut table = String::from("n,h,mean_l1,theorem1_bound,within_bound\n");
    for cell in &cells {
        for (s, (l1, ks)) in cell.l1.iter().zip(&cell.ks).enumerate() {
            let seed = args.seed.wrapping_add(s as u64);
            let _ = writeln!(runs, "{},{},{},{},{}", cell.n, cell.h, seed, fmt_num(*l1), fmt_num(*ks));
        }
        let mean = cell.mean_l1();
        let _ = writeln!(
            table,
            "{},{},{},{},{}",
            cell.n,
            cell.h,
            fmt_num(mean),
            fmt_num(cell.bound),
            mean <= cell.bound
        );
    }
    out.write("converge_runs.csv", &runs)?;
    out.write("converge_cells.csv", &table)?;
    let slope = converge_slope(&cells);
    if slope.is_none() {
        out.warn("fewer than two distinct n at the largest h; slope not reported".into());
    }
    Ok(json!({
        "command": "converge",
        "m": args.m,
        "a": args.a,
        "seeds": args.seeds,
        "seed": args.seed,
        "cells": cells.iter().map(|c| json!({
            "n": c.n,
            "h": c.h,
            "mean_l1": c.mean_l1(),
            "theorem1_bound": c.bound,
            "within_bound": c.mean_l1() <= c.bound,
        })).collect::<Vec<_>>(),
        "all_within_bound": cells.iter().all(|c| c.mean_l1() <= c.bound),
        "slope_log_l1_vs_log_n": slope,
        "warnings": out.warnings,
    }))
}

fn run_classify(args: &ClassifyArgs, out: &mut Artifacts) -> Result<Value> {
    let data = args.fixture.load()?;
    let config = igmc_config(args.n, args.h, args.seed)?;
    let posterior = deep::run_deep_igmc(&data, &args.x, &args.train, &config)?;
    let report = deep::summarize_uncertainty(&posterior)?;

    let mut fixture_csv = String::new();
    let mut header: Vec<String> = (1..=data.feature_dim()).map(|i| format!("f{i}")).collect();
    header.push("label".into());
    let _ = writeln!(fixture_csv, "{}", header.join(","));
    for i in 0..data.len() {
        let mut row: Vec<String> = data.features(i).iter().map(|v| fmt_num(*v)).collect();
        row.push(data.label(i).to_string());
        let _ = writeln!(fixture_csv, "{}", row.join(","));
    }
    out.write("fixture.csv", &fixture_csv)?;

    let mut table = String::from("class,mean_prob_pct,u,cell\n");
    for (k, cell) in report.cells().iter().enumerate() {
        let _ = writeln!(
            table,
            "{},{},{},{}",
            k + 1,
            fmt_num(100.0 * report.mean[k]),
            fmt_num(report.uncertainty[k]),
            cell
        );
    }
    out.write("uncertainty.csv", &table)?;

    let mut matrix = String::from("chain");
    for k in 1..=posterior.classes() {
        let _ = write!(matrix, ",p{k}");
    }
    matrix.push('\n');
    for n in 0..posterior.chains() {
        let row: Vec<String> = posterior.row(n).iter().map(|v| fmt_num(*v)).collect();
        let _ = writeln!(matrix, "{},{}", n, row.join(","));
    }
    out.write("mu_matrix.csv", &matrix)?;

    Ok(json!({
        "command": "classify",
        "x": args.x,
        "n": args.n,
        "h": args.h,
        "seed": args.seed,
        "classes": posterior.classes(),
        "examples": data.len(),
        "top_class": report.top_class(),
        "mean": report.mean,
        "uncertainty": report.uncertainty,
        "cells": report.cells(),
        "warnings": out.warnings,
    }))
}
