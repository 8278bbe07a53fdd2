//! Per-realization algebraic identities behind the capacity expressions.

use crate::channel::{sample_channels, ProbingConfig};
use crate::error::{Error, Result};
use crate::numerics::RngStream;
use crate::skc::{c_b_sample, cs1, gap_sample, xi_b_sample, CbForm, GapForm, XiForm};

use super::outcome::{ToleranceKind, VerificationOutcome};

/// Absolute tolerance for two evaluations of the same determinant expression.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Rounding allowance for the sign of the gap integrand.
pub const GAP_SIGN_FLOOR: f64 = 1e-12;
pub const MIN_REALIZATIONS: u64 = 100;

struct Worst {
    name: &'static str,
    max_diff: f64,
    worst_trial: u64,
    first_failure: Option<u64>,
    tol: f64,
}

impl Worst {
    fn new(name: &'static str, tol: f64) -> Self {
        Self {
            name,
            max_diff: 0.0,
            worst_trial: 0,
            first_failure: None,
            tol,
        }
    }

    fn record(&mut self, trial: u64, a: f64, b: f64) {
        let d = (a - b).abs();
        if (d.is_nan() || d > self.tol) && self.first_failure.is_none() {
            self.first_failure = Some(trial);
        }
        if d > self.max_diff || d.is_nan() {
            self.max_diff = d;
            self.worst_trial = trial;
        }
    }

    fn outcome(&self, count: u64) -> VerificationOutcome {
        let detail = match self.first_failure {
            Some(t) => format!(
                "first failure at trial {t}; max |diff| {:.3e} at trial {} over {count} realizations",
                self.max_diff, self.worst_trial
            ),
            None => format!("max |diff| {:.3e} over {count} realizations", self.max_diff),
        };
        let mut o = VerificationOutcome::compare(
            self.name,
            0.0,
            self.max_diff,
            self.tol,
            ToleranceKind::Absolute,
            detail,
        );
        o.passed = self.first_failure.is_none();
        o
    }
}

/// Runs the identity checks over `realizations` channel draws from `seed`:
///
/// - `gap_forms`: stacked receiver determinants vs the inverse form;
/// - `xi_forms`: determinant difference vs the inverse form;
/// - `c_b_forms`: square vs receive-side determinants;
/// - `gap_sign`: gap integrand nonnegative, and identically zero when `v_B = 0`;
/// - `one_way` (only when `v_B = 0`): `C_B = C_S1 + v_A xi_B` exactly.
pub fn identity_suite(
    config: &ProbingConfig,
    realizations: u64,
    seed: u64,
) -> Result<Vec<VerificationOutcome>> {
    if realizations < MIN_REALIZATIONS {
        return Err(Error::Usage(format!(
            "identity suite needs at least {MIN_REALIZATIONS} realizations, got {realizations}"
        )));
    }
    config.validate()?;
    let gam = config.gammas()?;
    if gam.eve_a_noiseless() || (gam.eve_b_noiseless() && config.v_b > 0) {
        return Err(Error::NonFiniteSnr(
            "identity suite needs finite eavesdropper SNRs".into(),
        ));
    }
    let cs1_bits = cs1(config)?;
    let v_a = config.v_a as f64;
    let mut gap_forms = Worst::new("gap_forms", IDENTITY_TOL);
    let mut xi_forms = Worst::new("xi_forms", IDENTITY_TOL);
    let mut c_b_forms = Worst::new("c_b_forms", IDENTITY_TOL);
    let mut one_way = Worst::new("one_way", 0.0);
    let mut min_gap = f64::INFINITY;
    let mut sign_failure: Option<u64> = None;

    let fail = |trial: u64, e: Error| Error::IntegrandFailure {
        trial,
        source: Box::new(e),
    };
    for trial in 0..realizations {
        let real = sample_channels(config, &RngStream::new(seed, trial));
        let eval = || -> Result<_> {
            Ok((
                gap_sample(&real, config, GapForm::Stacked)?,
                gap_sample(&real, config, GapForm::Inverse)?,
                xi_b_sample(&real, config, XiForm::Direct)?,
                xi_b_sample(&real, config, XiForm::Inverse)?,
                c_b_sample(&real, config, CbForm::Square)?,
                c_b_sample(&real, config, CbForm::Rectangular)?,
            ))
        };
        let (gap_s, gap_i, xi_d, xi_i, cb_sq, cb_rect) = eval().map_err(|e| fail(trial, e))?;
        gap_forms.record(trial, gap_s, gap_i);
        xi_forms.record(trial, xi_d, xi_i);
        c_b_forms.record(trial, cb_sq, cb_rect);
        let gap_ok = if config.v_b == 0 {
            gap_s == 0.0 && gap_i == 0.0
        } else {
            gap_s >= -GAP_SIGN_FLOOR && gap_i >= -GAP_SIGN_FLOOR
        };
        if !gap_ok && sign_failure.is_none() {
            sign_failure = Some(trial);
        }
        min_gap = min_gap.min(gap_s.min(gap_i));
        if config.v_b == 0 {
            one_way.record(trial, cb_sq, cs1_bits + v_a * xi_d);
        }
    }

    let mut out = vec![
        gap_forms.outcome(realizations),
        xi_forms.outcome(realizations),
        c_b_forms.outcome(realizations),
    ];
    let sign_detail = match (sign_failure, config.v_b) {
        (Some(t), 0) => format!("gap not identically zero with v_B = 0 (trial {t})"),
        (Some(t), _) => format!("negative gap integrand at trial {t} (min {min_gap:.3e})"),
        (None, 0) => "v_B = 0: gap identically zero".to_string(),
        (None, _) => format!("min gap integrand {min_gap:.6e} over {realizations} realizations"),
    };
    let (reference, tol) = if config.v_b == 0 {
        (0.0, 0.0)
    } else {
        (0.0, GAP_SIGN_FLOOR)
    };
    out.push(VerificationOutcome::flag(
        "gap_sign",
        reference,
        min_gap,
        tol,
        sign_failure.is_none(),
        sign_detail,
    ));
    if config.v_b == 0 {
        out.push(one_way.outcome(realizations));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;

    #[test]
    fn two_way_config_passes() {
        let mut c = ProbingConfig::new(3, 2, 2);
        c.v_a = 2;
        c.v_b = 3;
        c.alpha_a_p = 4.0;
        c.alpha_b_p = 0.5;
        c.lambda_eb = 0.3;
        let out = identity_suite(&c, 150, 7).unwrap();
        assert_eq!(out.len(), 4);
        assert!(out.iter().all(|o| o.passed), "{out:#?}");
    }

    #[test]
    fn one_way_config_reports_exact_zero() {
        let mut c = ProbingConfig::new(2, 3, 4);
        c.v_b = 0;
        c.rho = Complex64::new(1.0, 0.0);
        let out = identity_suite(&c, 100, 1).unwrap();
        assert_eq!(out.len(), 5);
        let sign = out.iter().find(|o| o.check_name == "gap_sign").unwrap();
        assert_eq!((sign.reference_value, sign.computed_value), (0.0, 0.0));
        assert!(out.iter().all(|o| o.passed), "{out:#?}");
    }

    #[test]
    fn too_few_realizations() {
        assert!(matches!(
            identity_suite(&ProbingConfig::new(1, 1, 1), 99, 1),
            Err(Error::Usage(_))
        ));
    }
}
