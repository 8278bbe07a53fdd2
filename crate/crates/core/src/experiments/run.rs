//! Subcommand bodies. Each returns its printed text and output files so the
//! caller controls all writing.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use crate::channel::ProbingConfig;
use crate::error::{Error, Result};
use crate::mc::{Estimate, McSettings};
use crate::skc::{
    budget_splits, cs1, dof_formula, dof_slope, formula_for, skc_bounds, xi_b, LowerBoundSource,
    Quantity, SkcReport,
};
use crate::verify::{run_verification_suite, SuiteOptions, VerificationSummary};

use super::csv::{fmt_num, header, row, RowValues};
use super::spec::{
    mc_from_toml, read_text, validate_config, ConfigToml, ExperimentSpec, McOverrides, McToml,
};
use super::svg::{line_chart, Series};

/// Default verification set, compiled into the binary.
pub const DEFAULT_VERIFY_SET: &str = include_str!("../../configs/verify_default.toml");
pub const VERIFY_REPORT: &str = "verify-report.json";

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOutput {
    pub stdout: String,
    /// `(file name, contents)` to be written into the output directory.
    pub files: Vec<(String, String)>,
    pub passed: bool,
}

/// Computes the requested quantities for one config, sharing channel draws.
pub fn evaluate_row(
    config: &ProbingConfig,
    quantities: &[Quantity],
    mc: &McSettings,
) -> Result<RowValues> {
    let mut values = RowValues {
        cs1: Some(cs1(config)?),
        ..Default::default()
    };
    let needs_report = quantities.iter().any(|q| {
        matches!(
            q,
            Quantity::CA | Quantity::CB | Quantity::CZ | Quantity::Gap | Quantity::Bounds
        )
    });
    if needs_report {
        values.report = Some(skc_bounds(config, mc)?);
    } else if quantities.contains(&Quantity::XiB) {
        values.xi_b = Some(xi_b(config, mc)?);
    }
    if quantities.contains(&Quantity::Dof) {
        values.dof = Some(dof_formula(config, true)?);
    }
    Ok(values)
}

fn fmt_est(e: &Estimate) -> String {
    format!(
        "{:>14} +/- {:<12} ({})",
        fmt_num(e.mean),
        fmt_num(e.stderr),
        e.method.as_str()
    )
}

pub fn format_report(r: &SkcReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "cs1    {:>14} (exact)", fmt_num(r.cs1));
    for (name, e) in [
        ("xi_b", &r.xi_b),
        ("c_b", &r.c_b),
        ("c_a", &r.c_a),
        ("gap", &r.gap),
        ("c_z", &r.c_z),
    ] {
        let _ = writeln!(s, "{name:<6} {}", fmt_est(e));
    }
    let src = match r.lower_source {
        LowerBoundSource::CA => "c_a",
        LowerBoundSource::CB => "c_b",
    };
    let _ = writeln!(s, "lower  {} = {src}", fmt_est(&r.lower));
    let _ = writeln!(s, "upper  {} = c_z", fmt_est(&r.upper));
    s
}

fn csv_file(spec: &ExperimentSpec, rows: &[String]) -> (String, String) {
    let mut body = header(&spec.quantities);
    body.push('\n');
    for r in rows {
        body.push_str(r);
        body.push('\n');
    }
    (format!("{}.csv", spec.name), body)
}

pub fn run_eval(spec: &ExperimentSpec) -> Result<RunOutput> {
    if spec.sweep.is_some() {
        return Err(Error::Usage(
            "eval takes a config without [sweep]; use the sweep command".into(),
        ));
    }
    let values = evaluate_row(&spec.base, &spec.quantities, &spec.mc)?;
    let line = row(
        "none",
        None,
        &spec.quantities,
        &values,
        spec.mc.trials,
        spec.mc.master_seed,
    );
    let report = match &values.report {
        Some(r) => r.clone(),
        None => skc_bounds(&spec.base, &spec.mc)?,
    };
    let mut stdout = format!(
        "{} (trials {}, seed {})\n",
        spec.name, spec.mc.trials, spec.mc.master_seed
    );
    stdout.push_str(&format_report(&report));
    Ok(RunOutput {
        stdout,
        files: vec![csv_file(spec, &[line])],
        passed: true,
    })
}

pub fn run_sweep(spec: &ExperimentSpec) -> Result<RunOutput> {
    let sweep = spec
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Usage("sweep needs a [sweep] section".into()))?;
    let mut lines = Vec::with_capacity(sweep.values.len());
    let mut all = Vec::with_capacity(sweep.values.len());
    for &v in &sweep.values {
        // Same settings, hence the same channel streams, at every point.
        let values = evaluate_row(
            &sweep.parameter.apply(&spec.base, v),
            &spec.quantities,
            &spec.mc,
        )?;
        lines.push(row(
            sweep.parameter.name(),
            Some(v),
            &spec.quantities,
            &values,
            spec.mc.trials,
            spec.mc.master_seed,
        ));
        all.push(values);
    }
    let mut files = vec![csv_file(spec, &lines)];
    if spec.svg {
        let mut series = Vec::new();
        for &q in &spec.quantities {
            let pick = |f: &dyn Fn(&RowValues) -> f64, label: &str| Series {
                label: label.to_string(),
                y: all.iter().map(f).collect(),
            };
            match q {
                Quantity::Dof => {}
                Quantity::Bounds => {
                    series.push(pick(&|r| r.report.as_ref().unwrap().lower.mean, "lower"));
                    series.push(pick(&|r| r.report.as_ref().unwrap().upper.mean, "upper"));
                }
                Quantity::Cs1 => series.push(pick(&|r| r.cs1.unwrap(), "cs1")),
                Quantity::XiB => series.push(pick(
                    &|r| r.xi_b.or(r.report.as_ref().map(|x| x.xi_b)).unwrap().mean,
                    "xi_b",
                )),
                Quantity::CA => series.push(pick(&|r| r.report.as_ref().unwrap().c_a.mean, "c_a")),
                Quantity::CB => series.push(pick(&|r| r.report.as_ref().unwrap().c_b.mean, "c_b")),
                Quantity::CZ => series.push(pick(&|r| r.report.as_ref().unwrap().c_z.mean, "c_z")),
                Quantity::Gap => series.push(pick(&|r| r.report.as_ref().unwrap().gap.mean, "gap")),
            }
        }
        let svg = line_chart(
            &spec.name,
            sweep.parameter.name(),
            &sweep.values,
            &series,
            sweep.parameter.log_axis(),
        );
        files.push((format!("{}.svg", spec.name), svg));
    }
    let stdout = format!(
        "{}: {} points over {} (trials {}, seed {})\n",
        spec.name,
        sweep.values.len(),
        sweep.parameter,
        spec.mc.trials,
        spec.mc.master_seed
    );
    Ok(RunOutput {
        stdout,
        files,
        passed: true,
    })
}

pub fn run_dof(spec: &ExperimentSpec) -> Result<RunOutput> {
    let d = spec
        .dof
        .as_ref()
        .ok_or_else(|| Error::Usage("dof needs a [dof] section".into()))?;
    let q = d.quantity;
    let mut result = dof_slope(|c| q.evaluate(c, &spec.mc), &spec.base, &d.powers)?;
    result.formula_value = formula_for(q, &spec.base);

    let mut points = format!("power,log2_power,{q}_mean,{q}_stderr,trials,seed\n");
    for (p, e) in result.p_grid.iter().zip(&result.estimates) {
        let _ = writeln!(
            points,
            "{},{},{},{},{},{}",
            fmt_num(*p),
            fmt_num(p.log2()),
            fmt_num(e.mean),
            fmt_num(e.stderr),
            spec.mc.trials,
            spec.mc.master_seed
        );
    }
    let formula = result
        .formula_value
        .map(|v| v.to_string())
        .unwrap_or_default();
    let fit = format!(
        "quantity,formula,slope,fit_residual\n{q},{formula},{},{}\n",
        fmt_num(result.slope),
        fmt_num(result.fit_residual)
    );
    let mut stdout = String::new();
    let _ = writeln!(
        stdout,
        "{}: DoF of {q} over {} powers (trials {}, seed {})",
        spec.name,
        d.powers.len(),
        spec.mc.trials,
        spec.mc.master_seed
    );
    let _ = writeln!(
        stdout,
        "formula {}  slope {}  residual {}",
        if formula.is_empty() { "n/a" } else { &formula },
        fmt_num(result.slope),
        fmt_num(result.fit_residual)
    );
    let mut files = vec![
        (format!("{}.csv", spec.name), points),
        (format!("{}-fit.csv", spec.name), fit),
    ];
    if let Some(v_star) = d.budget {
        let (splits, best) = budget_splits(&spec.base, v_star)?;
        let mut csv = String::from("v_a,v_b,dof,best\n");
        for s in &splits {
            let _ = writeln!(
                csv,
                "{},{},{},{}",
                s.v_a,
                s.v_b,
                s.dof,
                u8::from(*s == best)
            );
        }
        let _ = writeln!(
            stdout,
            "budget v* = {v_star}: best (v_A, v_B) = ({}, {}) with DoF {}",
            best.v_a, best.v_b, best.dof
        );
        files.push((format!("{}-budget.csv", spec.name), csv));
    }
    Ok(RunOutput {
        stdout,
        files,
        passed: true,
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigSetToml {
    #[serde(default)]
    mc: McToml,
    configs: Vec<ConfigToml>,
}

/// Parses a verification set: an optional `[mc]` table and `[[configs]]` entries.
pub fn parse_config_set(
    text: &str,
    env_defaults: McOverrides,
) -> Result<(Vec<(String, ProbingConfig)>, McSettings)> {
    let raw: ConfigSetToml = toml::from_str(text).map_err(|e| Error::Parse {
        path: "<config set>".into(),
        message: e.to_string(),
    })?;
    let mut configs = Vec::with_capacity(raw.configs.len());
    for (i, c) in raw.configs.iter().enumerate() {
        let label = c.label.clone().unwrap_or_else(|| format!("config{i}"));
        let config = c.to_config();
        validate_config(&config).map_err(|e| Error::Validation(format!("{label}: {e}")))?;
        configs.push((label, config));
    }
    Ok((configs, mc_from_toml(&raw.mc, env_defaults)?))
}

pub fn load_config_set(
    path: Option<&Path>,
    env_defaults: McOverrides,
) -> Result<(Vec<(String, ProbingConfig)>, McSettings)> {
    match path {
        None => parse_config_set(DEFAULT_VERIFY_SET, env_defaults),
        Some(p) => parse_config_set(&read_text(p)?, env_defaults).map_err(|e| match e {
            Error::Parse { message, .. } => Error::Parse {
                path: p.to_path_buf(),
                message,
            },
            other => other,
        }),
    }
}

pub fn run_verify(
    configs: &[(String, ProbingConfig)],
    mc: &McSettings,
    opts: SuiteOptions,
) -> Result<(RunOutput, VerificationSummary)> {
    let summary = run_verification_suite(configs, mc, opts)?;
    let mut stdout = summary.table();
    for f in summary.failures() {
        let _ = writeln!(
            stdout,
            "FAILED {} [{}]: {}",
            f.outcome.check_name, f.config, f.outcome.detail
        );
    }
    let out = RunOutput {
        stdout,
        files: vec![(VERIFY_REPORT.to_string(), summary.to_json() + "\n")],
        passed: summary.passed,
    };
    Ok((out, summary))
}

#[cfg(test)]
mod tests {
    use super::super::spec::parse_experiment;
    use super::*;

    fn spec(text: &str) -> ExperimentSpec {
        parse_experiment(text, "t", McOverrides::default()).unwrap()
    }

    #[test]
    fn one_way_eval_has_equal_bounds() {
        let s = spec("quantities = [\"bounds\", \"gap\"]\n[config]\nn_A = 3\nn_B = 2\nn_E = 2\nv_B = 0\nrho = 0.5\n[mc]\ntrials = 200\n");
        let out = run_eval(&s).unwrap();
        let (_, csv) = &out.files[0];
        let cells: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        // parameter,value,gap_mean,gap_stderr,lower_mean,lower_stderr,upper_mean,upper_stderr,...
        assert_eq!((cells[2], cells[3]), ("0", "0"));
        assert_eq!(cells[4], cells[6]);
        assert_eq!(cells[5], cells[7]);
        assert!(out.stdout.contains("gap"));
    }

    #[test]
    fn pilot_only_uncorrelated_is_zero() {
        // xi_b is per probing slot and does not depend on v_A, so it is left out.
        let s = spec("quantities = [\"cs1\", \"c_a\", \"c_b\", \"gap\", \"bounds\"]\n[config]\nn_A = 2\nn_B = 2\nn_E = 1\nv_A = 0\nv_B = 0\n[mc]\ntrials = 50\n");
        let out = run_eval(&s).unwrap();
        let data = out.files[0].1.lines().nth(1).unwrap().to_string();
        assert_eq!(data, "none,,0,0,0,0,0,0,0,0,0,0,0,0,50,1");
    }

    #[test]
    fn single_point_sweep_matches_eval() {
        let base = "quantities = [\"xi_b\", \"bounds\", \"dof\"]\n[config]\nn_A = 2\nn_B = 2\nn_E = 1\nlambda_EA = 0.5\n[mc]\ntrials = 100\n";
        let eval = run_eval(&spec(base)).unwrap();
        let sweep = run_sweep(&spec(&format!(
            "{base}[sweep]\nparameter = \"lambda_EA\"\nvalues = [0.5]\n"
        )))
        .unwrap();
        let tail = |s: &str| {
            s.lines()
                .nth(1)
                .unwrap()
                .split_once(",,")
                .map(|x| x.1.to_string())
                .unwrap()
        };
        let sweep_row = sweep.files[0].1.lines().nth(1).unwrap().to_string();
        assert!(sweep_row.starts_with("lambda_EA,0.5,"));
        assert_eq!(
            tail(&eval.files[0].1),
            sweep_row.trim_start_matches("lambda_EA,0.5,")
        );
        assert_eq!(
            eval.files[0].1.lines().next(),
            sweep.files[0].1.lines().next()
        );
    }

    #[test]
    fn sweep_with_svg() {
        let s = spec("quantities = [\"xi_b\"]\nsvg = true\n[config]\nn_A = 2\nn_B = 1\nn_E = 1\n[mc]\ntrials = 50\n[sweep]\nparameter = \"alpha_A_P\"\nvalues = [1, 10, 100]\n");
        let out = run_sweep(&s).unwrap();
        assert_eq!(out.files.len(), 2);
        assert_eq!(out.files[0].1.lines().count(), 4);
        assert!(out.files[1].0.ends_with(".svg"));
    }

    #[test]
    fn dof_budget_and_constant_quantity() {
        let s = spec("[config]\nn_A = 8\nn_B = 4\nn_E = 6\n[mc]\ntrials = 10\n[dof]\nquantity = \"cs1\"\npowers = [1, 10, 100, 1000]\nbudget = 4\n");
        let out = run_dof(&s).unwrap();
        // rho = 0: C_S1 = 0 at every power.
        assert!(out.stdout.contains("formula 0  slope 0"), "{}", out.stdout);
        let budget = &out.files[2].1;
        assert!(budget.contains("4,0,8,1"), "{budget}");
    }

    #[test]
    fn bundled_verify_set_parses() {
        let (configs, mc) = load_config_set(None, McOverrides::default()).unwrap();
        assert!(configs.len() >= 3);
        assert!(mc.trials >= 100);
        for (_, c) in &configs {
            assert!(c.phi_a <= 64 && c.phi_b <= 64);
        }
    }

    #[test]
    fn empty_set_is_usage_error() {
        let (configs, mc) = parse_config_set("configs = []\n", McOverrides::default()).unwrap();
        let e = run_verify(&configs, &mc, SuiteOptions::default()).unwrap_err();
        assert!(matches!(e, Error::Usage(_)));
    }
}
