use std::fmt::Write as _;

use serde::Serialize;

use crate::channel::ProbingConfig;
use crate::error::{Error, Result};
use crate::mc::{estimate, McSettings};
use crate::skc::{g_factor, gaussian_mi};

use super::identities::{identity_suite, MIN_REALIZATIONS};
use super::mmse::pilot_mmse_check;
use super::outcome::{ToleranceKind, VerificationOutcome};
use super::pilot_mi::pilot_direct_mi;
use super::quadrature::scalar_capacity_oracle;

pub const PILOT_MI_REL_TOL: f64 = 1e-6;
/// The pilot check is calibrated for at least this many trials.
pub const MMSE_MIN_TRIALS: u64 = 10_000;
pub const SCALAR_GAMMAS: [f64; 3] = [0.1, 1.0, 10.0];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SuiteOptions {
    /// Negative control: scales `g` by 1.01 before comparing with the oracle.
    pub corrupt_g: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteEntry {
    /// Config label, or "global" for config-independent checks.
    pub config: String,
    #[serde(flatten)]
    pub outcome: VerificationOutcome,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationSummary {
    pub passed: bool,
    pub total: usize,
    pub failed: usize,
    pub trials: u64,
    pub seed: u64,
    pub entries: Vec<SuiteEntry>,
}

impl VerificationSummary {
    pub fn failures(&self) -> impl Iterator<Item = &SuiteEntry> {
        self.entries.iter().filter(|e| !e.outcome.passed)
    }

    /// Fixed-width human-readable table.
    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<20} {:<12} {:>14} {:>14} {:>9} {:<4}  detail",
            "check", "config", "reference", "computed", "tol", "ok"
        );
        for e in &self.entries {
            let o = &e.outcome;
            let tol = match o.tolerance_kind {
                ToleranceKind::Absolute => format!("{:.0e}", o.tolerance),
                ToleranceKind::Relative => format!("{:.0e}r", o.tolerance),
            };
            let _ = writeln!(
                s,
                "{:<20} {:<12} {:>14.8} {:>14.8} {:>9} {:<4}  {}",
                o.check_name,
                e.config,
                o.reference_value,
                o.computed_value,
                tol,
                if o.passed { "PASS" } else { "FAIL" },
                o.detail
            );
        }
        let _ = writeln!(
            s,
            "{} of {} checks passed: {}",
            self.total - self.failed,
            self.total,
            if self.passed { "PASS" } else { "FAIL" }
        );
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary is serialisable")
    }
}

/// Closed-form pilot MI against the covariance oracle.
pub fn pilot_mi_check(config: &ProbingConfig, corrupt_g: bool) -> Result<VerificationOutcome> {
    let mut g = g_factor(config)?;
    if corrupt_g {
        g *= 1.01;
    }
    let closed = (config.n_a * config.n_b) as f64 * g.log2();
    let oracle = pilot_direct_mi(config)?;
    let mut o = VerificationOutcome::compare(
        "pilot_mi",
        oracle,
        closed,
        PILOT_MI_REL_TOL,
        ToleranceKind::Relative,
        "",
    );
    o.detail = if o.passed {
        format!("|diff| {:.3e}", (oracle - closed).abs())
    } else {
        format!("mismatch: closed form {closed:.10} vs covariance oracle {oracle:.10}")
    };
    Ok(o)
}

/// Monte Carlo `E[log2(1 + gamma |h|^2)]` against quadrature, within 3 standard errors.
pub fn scalar_cross_check(gamma: f64, mc: &McSettings) -> Result<VerificationOutcome> {
    let reference = scalar_capacity_oracle(gamma)?;
    let c = ProbingConfig::new(1, 1, 1);
    let est = estimate(|r| gaussian_mi(&r.h_ba, gamma, 1), &c, mc)?;
    let tol = 3.0 * est.stderr;
    Ok(VerificationOutcome::compare(
        format!("scalar_oracle[{gamma}]"),
        reference,
        est.mean,
        tol,
        ToleranceKind::Absolute,
        format!("{} trials, stderr {:.3e}", est.trials, est.stderr),
    ))
}

/// Runs every check on every config. Passes iff all checks pass.
pub fn run_verification_suite(
    configs: &[(String, ProbingConfig)],
    mc: &McSettings,
    opts: SuiteOptions,
) -> Result<VerificationSummary> {
    if configs.is_empty() {
        return Err(Error::Usage(
            "verification needs at least one config".into(),
        ));
    }
    let mut entries = Vec::new();
    for gamma in SCALAR_GAMMAS {
        entries.push(SuiteEntry {
            config: "global".into(),
            outcome: scalar_cross_check(gamma, mc)?,
        });
    }
    let mmse_mc = McSettings {
        trials: mc.trials.max(MMSE_MIN_TRIALS),
        ..*mc
    };
    for (label, config) in configs {
        let mut push = |o: VerificationOutcome| {
            entries.push(SuiteEntry {
                config: label.clone(),
                outcome: o,
            })
        };
        push(pilot_mi_check(config, opts.corrupt_g)?);
        push(pilot_mmse_check(config, &mmse_mc)?);
        for o in identity_suite(config, mc.trials.max(MIN_REALIZATIONS), mc.master_seed)? {
            push(o);
        }
    }
    let failed = entries.iter().filter(|e| !e.outcome.passed).count();
    Ok(VerificationSummary {
        passed: failed == 0,
        total: entries.len(),
        failed,
        trials: mc.trials,
        seed: mc.master_seed,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;

    fn small() -> Vec<(String, ProbingConfig)> {
        let mut c = ProbingConfig::new(2, 2, 1);
        c.phi_a = 6;
        c.phi_b = 6;
        c.rho = Complex64::new(0.9, 0.0);
        vec![("small".into(), c)]
    }

    #[test]
    fn empty_set_is_usage_error() {
        assert!(matches!(
            run_verification_suite(&[], &McSettings::new(100, 1), SuiteOptions::default()),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn small_set_passes_and_serialises() {
        let s = run_verification_suite(&small(), &McSettings::new(200, 3), SuiteOptions::default())
            .unwrap();
        assert!(s.passed, "{}", s.table());
        let json: serde_json::Value = serde_json::from_str(&s.to_json()).unwrap();
        assert_eq!(json["passed"], true);
        assert_eq!(json["entries"][0]["check_name"], "scalar_oracle[0.1]");
        assert!(s.table().contains("pilot_mi"));
    }

    #[test]
    fn corrupted_g_fails_pilot_mi() {
        let s = run_verification_suite(
            &small(),
            &McSettings::new(100, 3),
            SuiteOptions { corrupt_g: true },
        )
        .unwrap();
        assert!(!s.passed);
        let failed: Vec<_> = s
            .failures()
            .map(|e| e.outcome.check_name.as_str())
            .collect();
        assert_eq!(failed, ["pilot_mi"]);
        assert!(s
            .failures()
            .next()
            .unwrap()
            .outcome
            .detail
            .starts_with("mismatch"));
    }
}
