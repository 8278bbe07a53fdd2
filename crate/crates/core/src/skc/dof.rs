//! Degrees of freedom: the high-power pre-log `lim C / log P`.

use crate::channel::ProbingConfig;
use crate::error::{Error, Result};
use crate::mc::Estimate;

use super::bounds::Quantity;

fn plus(x: isize) -> usize {
    x.max(0) as usize
}

/// `v_A min(n_B, (n_A - n_E)^+) + v_B (n_B - n_E)^+ + delta_rho n_A n_B`,
/// stated for `n_A >= n_B`. With `auto_swap` a config with `n_A < n_B` is
/// evaluated after exchanging the roles of Alice and Bob.
pub fn dof_formula(config: &ProbingConfig, auto_swap: bool) -> Result<u64> {
    if config.n_a < config.n_b {
        if auto_swap {
            return dof_formula(&config.swapped(), false);
        }
        return Err(Error::OrderingViolation {
            n_a: config.n_a,
            n_b: config.n_b,
        });
    }
    let (n_a, n_b, n_e) = (
        config.n_a as isize,
        config.n_b as isize,
        config.n_e as isize,
    );
    let forward = config.v_a * (n_b as usize).min(plus(n_a - n_e));
    let backward = config.v_b * plus(n_b - n_e);
    let reciprocal = if config.rho_is_unit() {
        config.n_a * config.n_b
    } else {
        0
    };
    Ok((forward + backward + reciprocal) as u64)
}

/// Predicted DoF of a single quantity, where one is known in closed form.
pub fn formula_for(quantity: Quantity, config: &ProbingConfig) -> Option<u64> {
    match quantity {
        Quantity::XiB => {
            let per_slot = ProbingConfig {
                v_a: 1,
                v_b: 0,
                rho: num_complex::Complex64::new(0.0, 0.0),
                ..config.clone()
            };
            dof_formula(&per_slot, true).ok()
        }
        Quantity::Cs1 => Some(if config.rho_is_unit() {
            (config.n_a * config.n_b) as u64
        } else {
            0
        }),
        // C_B, C_Z and the bounds share DoF(C_S) when n_A >= n_B.
        Quantity::CB | Quantity::CZ | Quantity::Bounds if config.n_a >= config.n_b => {
            dof_formula(config, false).ok()
        }
        Quantity::Gap if config.n_a >= config.n_b => Some(0),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DofResult {
    pub formula_value: Option<u64>,
    pub slope: f64,
    /// Root-mean-square residual of the straight-line fit.
    pub fit_residual: f64,
    pub p_grid: Vec<f64>,
    pub estimates: Vec<Estimate>,
}

/// Least-squares slope and intercept of `y` on `x`, plus RMS residual.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    (slope, intercept, (rss / n).sqrt())
}

pub fn validate_grid(p_grid: &[f64]) -> Result<()> {
    if p_grid.len() < 4 {
        return Err(Error::GridTooSmall(format!(
            "{} powers given, at least 4 required",
            p_grid.len()
        )));
    }
    if p_grid.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
        return Err(Error::GridTooSmall(
            "powers must be finite and positive".into(),
        ));
    }
    if p_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::GridTooSmall(
            "powers must be strictly increasing".into(),
        ));
    }
    let span = p_grid[p_grid.len() - 1] / p_grid[0];
    if span < 1e3 {
        return Err(Error::GridTooSmall(format!(
            "grid spans a factor {span:.1}, at least three decades required"
        )));
    }
    Ok(())
}

/// Fits `quantity(P)` against `log2 P` over the upper half of `p_grid`.
///
/// At each grid point both transmit powers of `config` are multiplied by `P`.
/// `formula_value` is left empty; callers fill it from [`formula_for`].
pub fn dof_slope<F>(quantity: F, config: &ProbingConfig, p_grid: &[f64]) -> Result<DofResult>
where
    F: Fn(&ProbingConfig) -> Result<Estimate>,
{
    validate_grid(p_grid)?;
    let estimates = p_grid
        .iter()
        .map(|&p| quantity(&config.with_power_scale(p)))
        .collect::<Result<Vec<_>>>()?;
    let start = p_grid.len() / 2;
    let x: Vec<f64> = p_grid[start..].iter().map(|p| p.log2()).collect();
    let y: Vec<f64> = estimates[start..].iter().map(|e| e.mean).collect();
    let (slope, _, fit_residual) = linear_fit(&x, &y);
    Ok(DofResult {
        formula_value: None,
        slope,
        fit_residual,
        p_grid: p_grid.to_vec(),
        estimates,
    })
}

/// One `(v_A, v_B)` allocation of a probing budget and its DoF.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BudgetSplit {
    pub v_a: usize,
    pub v_b: usize,
    pub dof: u64,
}

/// DoF of every split `v_A + v_B = v_star`, and the maximiser (largest `v_A` on ties).
pub fn budget_splits(
    config: &ProbingConfig,
    v_star: usize,
) -> Result<(Vec<BudgetSplit>, BudgetSplit)> {
    let splits = (0..=v_star)
        .map(|v_a| {
            let c = ProbingConfig {
                v_a,
                v_b: v_star - v_a,
                ..config.clone()
            };
            Ok(BudgetSplit {
                v_a,
                v_b: v_star - v_a,
                dof: dof_formula(&c, true)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = *splits
        .iter()
        .rev()
        .max_by_key(|s| s.dof)
        .expect("at least one split");
    // max_by_key returns the last maximum; iterating in reverse makes that the largest v_A.
    let best = splits
        .iter()
        .copied()
        .filter(|s| s.dof == best.dof)
        .max_by_key(|s| s.v_a)
        .unwrap_or(best);
    Ok((splits, best))
}
