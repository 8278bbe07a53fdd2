use std::fmt;
use std::str::FromStr;

use crate::channel::ProbingConfig;
use crate::error::{Error, Result};
use crate::mc::{estimate, estimate_many, Estimate, McSettings, Method};

use super::closed_form::cs1;
use super::integrands::{c_b_sample, CbForm, SkcEvaluator};

fn exact_xi(config: &ProbingConfig) -> Result<bool> {
    let g = config.gammas()?;
    Ok(g.ba == 0.0 || (g.eve_a_noiseless() && config.n_e >= config.n_a))
}

/// Monte Carlo `xi_B` (bits per probing slot).
pub fn xi_b(config: &ProbingConfig, mc: &McSettings) -> Result<Estimate> {
    let ev = SkcEvaluator::new(config)?;
    if exact_xi(config)? {
        return Ok(Estimate::exact(0.0));
    }
    estimate(|r| ev.xi_b(r), config, mc)
}

/// Monte Carlo `C_Z - C_B`; exactly zero when `v_B = 0`.
pub fn gap(config: &ProbingConfig, mc: &McSettings) -> Result<Estimate> {
    let ev = SkcEvaluator::new(config)?;
    if config.v_b == 0 {
        return Ok(Estimate::exact(0.0));
    }
    estimate(|r| ev.gap(r), config, mc)
}

/// Monte Carlo `C_B` using the requested determinant form.
pub fn c_b(config: &ProbingConfig, mc: &McSettings, form: CbForm) -> Result<Estimate> {
    config.validate()?;
    if config.v_a == 0 && config.v_b == 0 {
        return Ok(Estimate::exact(cs1(config)?));
    }
    estimate(|r| c_b_sample(r, config, form), config, mc)
}

/// `C_A`, the role-swapped `C_B`, on the original config's channel draws.
pub fn c_a(config: &ProbingConfig, mc: &McSettings) -> Result<Estimate> {
    let ev = SkcEvaluator::new(config)?;
    if config.v_a == 0 && config.v_b == 0 {
        return Ok(Estimate::exact(ev.cs1()));
    }
    estimate(|r| ev.c_a(r), config, mc)
}

/// `C_Z = C_B + gap` on shared draws.
pub fn c_z(config: &ProbingConfig, mc: &McSettings) -> Result<Estimate> {
    let ev = SkcEvaluator::new(config)?;
    if config.v_a == 0 && config.v_b == 0 {
        return Ok(Estimate::exact(ev.cs1()));
    }
    estimate(|r| ev.c_z(r), config, mc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LowerBoundSource {
    CA,
    CB,
}

/// Every capacity quantity of one config, computed on shared channel draws.
#[derive(Clone, Debug, PartialEq)]
pub struct SkcReport {
    pub cs1: f64,
    pub xi_b: Estimate,
    pub c_b: Estimate,
    pub c_a: Estimate,
    pub gap: Estimate,
    pub c_z: Estimate,
    /// `max(C_A, C_B)` by mean.
    pub lower: Estimate,
    pub lower_source: LowerBoundSource,
    /// `C_Z`.
    pub upper: Estimate,
}

impl SkcReport {
    /// True when `lower <= upper` holds within `k` combined standard errors.
    pub fn bounds_ordered(&self, k: f64) -> bool {
        let combined = (self.lower.stderr.powi(2) + self.upper.stderr.powi(2)).sqrt();
        self.upper.mean >= self.lower.mean - k * combined
    }
}

fn mark_exact(e: Estimate, exact: bool) -> Estimate {
    if exact {
        Estimate {
            method: Method::Exact,
            ..e
        }
    } else {
        e
    }
}

/// Evaluates every quantity on one shared set of channel draws.
pub fn skc_bounds(config: &ProbingConfig, mc: &McSettings) -> Result<SkcReport> {
    let ev = SkcEvaluator::new(config)?;
    let est = estimate_many(
        |r| {
            let t = ev.terms(r)?;
            Ok(vec![t.xi_b, t.gap, t.c_b, t.c_a, t.c_z])
        },
        5,
        config,
        mc,
    )?;
    let pilot_only = config.v_a == 0 && config.v_b == 0;
    let xi_b = mark_exact(est[0], exact_xi(config)?);
    let gap = mark_exact(est[1], config.v_b == 0);
    let c_b = mark_exact(est[2], pilot_only);
    let c_a = mark_exact(est[3], pilot_only);
    let c_z = mark_exact(est[4], pilot_only);
    let (lower, lower_source) = if c_a.mean > c_b.mean {
        (c_a, LowerBoundSource::CA)
    } else {
        (c_b, LowerBoundSource::CB)
    };
    Ok(SkcReport {
        cs1: ev.cs1(),
        xi_b,
        c_b,
        c_a,
        gap,
        c_z,
        lower,
        lower_source,
        upper: c_z,
    })
}

/// Reportable quantities, in canonical column order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantity {
    Cs1,
    XiB,
    CA,
    CB,
    CZ,
    Gap,
    Bounds,
    Dof,
}

impl Quantity {
    pub const ALL: [Quantity; 8] = [
        Quantity::Cs1,
        Quantity::XiB,
        Quantity::CA,
        Quantity::CB,
        Quantity::CZ,
        Quantity::Gap,
        Quantity::Bounds,
        Quantity::Dof,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Quantity::Cs1 => "cs1",
            Quantity::XiB => "xi_b",
            Quantity::CA => "c_a",
            Quantity::CB => "c_b",
            Quantity::CZ => "c_z",
            Quantity::Gap => "gap",
            Quantity::Bounds => "bounds",
            Quantity::Dof => "dof",
        }
    }

    /// Evaluates a scalar quantity on its own. `Bounds` maps to the lower bound
    /// and `Dof` is not an expectation, so it is rejected.
    pub fn evaluate(&self, config: &ProbingConfig, mc: &McSettings) -> Result<Estimate> {
        match self {
            Quantity::Cs1 => Ok(Estimate::exact(cs1(config)?)),
            Quantity::XiB => xi_b(config, mc),
            Quantity::CA => c_a(config, mc),
            Quantity::CB => c_b(config, mc, CbForm::Square),
            Quantity::CZ => c_z(config, mc),
            Quantity::Gap => gap(config, mc),
            Quantity::Bounds => Ok(skc_bounds(config, mc)?.lower),
            Quantity::Dof => Err(Error::Usage("dof is not an expectation".into())),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL
            .iter()
            .copied()
            .find(|q| q.name() == s)
            .ok_or_else(|| Error::Validation(format!("unknown quantity '{s}'")))
    }
}
