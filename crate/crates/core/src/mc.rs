//! Reproducible Monte Carlo expectations over channel realizations.
//!
//! Trial `i` always draws its channels from `RngStream::new(master_seed, i)`,
//! and per-trial values are reduced with a pairwise tree whose shape depends
//! only on the trial count. Serial and parallel runs are therefore
//! bit-identical.

use rayon::prelude::*;

use crate::channel::{sample_channels, ChannelRealization, ProbingConfig};
use crate::error::{Error, Result};
use crate::numerics::RngStream;

pub const DEFAULT_TRIALS: u64 = 10_000;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McSettings {
    pub trials: u64,
    pub master_seed: u64,
    /// `None` uses rayon's global pool; `Some(1)` runs serially.
    pub max_parallelism: Option<usize>,
}

impl Default for McSettings {
    fn default() -> Self {
        Self {
            trials: DEFAULT_TRIALS,
            master_seed: DEFAULT_SEED,
            max_parallelism: None,
        }
    }
}

impl McSettings {
    pub fn new(trials: u64, master_seed: u64) -> Self {
        Self {
            trials,
            master_seed,
            max_parallelism: None,
        }
    }

    pub fn with_parallelism(self, threads: Option<usize>) -> Self {
        Self {
            max_parallelism: threads,
            ..self
        }
    }

    pub fn stream(&self, trial: u64) -> RngStream {
        RngStream::new(self.master_seed, trial)
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be >= 1".into()));
        }
        if self.max_parallelism == Some(0) {
            return Err(Error::InvalidConfig("thread count must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Exact,
    MonteCarlo,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::MonteCarlo => "monte-carlo",
        }
    }
}

/// Sample mean with its standard error, in bits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
    pub method: Method,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self {
            mean: value,
            stderr: 0.0,
            trials: 0,
            method: Method::Exact,
        }
    }

    /// Summarises per-trial values. A constant sample gives that constant
    /// with zero standard error.
    pub fn from_samples(values: &[f64]) -> Self {
        let n = values.len();
        assert!(n > 0, "cannot summarise an empty sample");
        let first = values[0];
        if values.iter().all(|v| v.to_bits() == first.to_bits()) {
            return Self {
                mean: first,
                stderr: 0.0,
                trials: n as u64,
                method: Method::MonteCarlo,
            };
        }
        let mean = pairwise_sum(values) / n as f64;
        let stderr = if n > 1 {
            let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
            (pairwise_sum(&sq) / (n - 1) as f64 / n as f64).sqrt()
        } else {
            0.0
        };
        Self {
            mean,
            stderr,
            trials: n as u64,
            method: Method::MonteCarlo,
        }
    }
}

/// Pairwise (cascade) summation. The split points depend only on `xs.len()`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if xs.len() <= LEAF {
        let mut s = 0.0;
        for x in xs {
            s += x;
        }
        s
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

/// Runs `f(trial, stream)` for trials `0..count`, returning results in trial
/// order. The first failing trial (lowest index) aborts the run.
pub fn run_trials<T, F>(settings: &McSettings, count: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &RngStream) -> Result<T> + Sync + Send,
{
    settings.validate()?;
    let job = |i: u64| f(i, &settings.stream(i));
    let results: Vec<Result<T>> = match settings.max_parallelism {
        Some(1) => (0..count).map(job).collect(),
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
            pool.install(|| (0..count).into_par_iter().map(job).collect())
        }
        None => (0..count).into_par_iter().map(job).collect(),
    };
    let mut out = Vec::with_capacity(results.len());
    for (trial, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => out.push(v),
            Err(e) => {
                return Err(Error::IntegrandFailure {
                    trial: trial as u64,
                    source: Box::new(e),
                })
            }
        }
    }
    Ok(out)
}

/// Monte Carlo expectation of `integrand` over `settings.trials` realizations.
pub fn estimate<F>(integrand: F, config: &ProbingConfig, settings: &McSettings) -> Result<Estimate>
where
    F: Fn(&ChannelRealization) -> Result<f64> + Sync + Send,
{
    let values = run_trials(settings, settings.trials, |_, stream| {
        integrand(&sample_channels(config, stream))
    })?;
    Ok(Estimate::from_samples(&values))
}

/// Several expectations on shared realizations. `integrand` must return
/// exactly `width` values per trial.
pub fn estimate_many<F>(
    integrand: F,
    width: usize,
    config: &ProbingConfig,
    settings: &McSettings,
) -> Result<Vec<Estimate>>
where
    F: Fn(&ChannelRealization) -> Result<Vec<f64>> + Sync + Send,
{
    let rows = run_trials(settings, settings.trials, |_, stream| {
        let v = integrand(&sample_channels(config, stream))?;
        if v.len() != width {
            return Err(Error::DimensionMismatch(format!(
                "integrand returned {} values, expected {width}",
                v.len()
            )));
        }
        Ok(v)
    })?;
    Ok((0..width)
        .map(|k| {
            let column: Vec<f64> = rows.iter().map(|r| r[k]).collect();
            Estimate::from_samples(&column)
        })
        .collect())
}

/// Estimates at each checkpoint from the first `k` trials of one run.
pub fn convergence_report<F>(
    integrand: F,
    config: &ProbingConfig,
    settings: &McSettings,
    checkpoints: &[u64],
) -> Result<Vec<Estimate>>
where
    F: Fn(&ChannelRealization) -> Result<f64> + Sync + Send,
{
    if checkpoints.is_empty() {
        return Err(Error::InvalidConfig("no checkpoints given".into()));
    }
    if checkpoints[0] == 0 || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(
            "checkpoints must be positive and strictly increasing".into(),
        ));
    }
    let last = *checkpoints.last().unwrap();
    if last > settings.trials {
        return Err(Error::InvalidConfig(format!(
            "checkpoint {last} exceeds the trial budget {}",
            settings.trials
        )));
    }
    let values = run_trials(settings, last, |_, stream| {
        integrand(&sample_channels(config, stream))
    })?;
    Ok(checkpoints
        .iter()
        .map(|&k| Estimate::from_samples(&values[..k as usize]))
        .collect())
}
