//! TOML experiment files.
//!
//! ```toml
//! name = "high_power_n846"            # output file stem (default: file stem)
//! quantities = ["xi_b"]        # default ["bounds"]
//! svg = true                   # sweeps only
//!
//! [config]                     # only n_A, n_B, n_E are required
//! n_A = 8
//! n_B = 4
//! n_E = 6
//! v_A = 1                      # default 1
//! v_B = 0                      # default 1
//! phi_A = 800                  # default max(100 n_A, 64); psi = phi
//! phi_B = 400
//! alpha_A_P = 1.0              # default 1
//! alpha_B_P = 1.0
//! lambda_A = 1.0               # default 1
//! lambda_B = 1.0
//! lambda_EA = 1.0              # 0 = noiseless eavesdropper
//! lambda_EB = 1.0
//! rho = 0.5                    # real part, default 0
//! rho_im = 0.0                 # imaginary part, default 0
//!
//! [mc]
//! trials = 10000               # default 10^4
//! seed = 1                     # default 1
//! threads = 4                  # default: all cores
//!
//! [sweep]
//! parameter = "alpha_A_P"      # lambda_EA lambda_EB alpha_A_P alpha_B_P rho v_A v_B n_E
//! values = [1e2, 1e3, 1e4]
//!
//! [dof]
//! quantity = "xi_b"            # default xi_b
//! powers = [1e2, 1e3, 1e4, 1e5]
//! budget = 4                   # optional v*: compare all splits v_A + v_B = v*
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Deserialize;

use crate::channel::{default_phi, ProbingConfig};
use crate::error::{Error, Result};
use crate::mc::{McSettings, DEFAULT_SEED, DEFAULT_TRIALS};
use crate::skc::Quantity;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigToml {
    #[serde(rename = "n_A")]
    pub n_a: usize,
    #[serde(rename = "n_B")]
    pub n_b: usize,
    #[serde(rename = "n_E")]
    pub n_e: usize,
    #[serde(rename = "v_A")]
    pub v_a: Option<usize>,
    #[serde(rename = "v_B")]
    pub v_b: Option<usize>,
    #[serde(rename = "phi_A")]
    pub phi_a: Option<usize>,
    #[serde(rename = "phi_B")]
    pub phi_b: Option<usize>,
    #[serde(rename = "alpha_A_P")]
    pub alpha_a_p: Option<f64>,
    #[serde(rename = "alpha_B_P")]
    pub alpha_b_p: Option<f64>,
    #[serde(rename = "lambda_A")]
    pub lambda_a: Option<f64>,
    #[serde(rename = "lambda_B")]
    pub lambda_b: Option<f64>,
    #[serde(rename = "lambda_EA")]
    pub lambda_ea: Option<f64>,
    #[serde(rename = "lambda_EB")]
    pub lambda_eb: Option<f64>,
    pub rho: Option<f64>,
    pub rho_im: Option<f64>,
    /// Row label, used by verification config sets.
    pub label: Option<String>,
}

impl ConfigToml {
    pub fn to_config(&self) -> ProbingConfig {
        let d = ProbingConfig::new(self.n_a, self.n_b, self.n_e);
        ProbingConfig {
            v_a: self.v_a.unwrap_or(d.v_a),
            v_b: self.v_b.unwrap_or(d.v_b),
            phi_a: self.phi_a.unwrap_or(default_phi(self.n_a)),
            phi_b: self.phi_b.unwrap_or(default_phi(self.n_b)),
            alpha_a_p: self.alpha_a_p.unwrap_or(d.alpha_a_p),
            alpha_b_p: self.alpha_b_p.unwrap_or(d.alpha_b_p),
            lambda_a: self.lambda_a.unwrap_or(d.lambda_a),
            lambda_b: self.lambda_b.unwrap_or(d.lambda_b),
            lambda_ea: self.lambda_ea.unwrap_or(d.lambda_ea),
            lambda_eb: self.lambda_eb.unwrap_or(d.lambda_eb),
            rho: Complex64::new(self.rho.unwrap_or(0.0), self.rho_im.unwrap_or(0.0)),
            ..d
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McToml {
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepToml {
    parameter: String,
    values: Vec<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DofToml {
    quantity: Option<String>,
    powers: Vec<f64>,
    budget: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentToml {
    name: Option<String>,
    quantities: Option<Vec<String>>,
    svg: Option<bool>,
    config: ConfigToml,
    #[serde(default)]
    mc: McToml,
    sweep: Option<SweepToml>,
    dof: Option<DofToml>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParameter {
    LambdaEA,
    LambdaEB,
    AlphaAP,
    AlphaBP,
    Rho,
    VA,
    VB,
    NE,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 8] = [
        SweepParameter::LambdaEA,
        SweepParameter::LambdaEB,
        SweepParameter::AlphaAP,
        SweepParameter::AlphaBP,
        SweepParameter::Rho,
        SweepParameter::VA,
        SweepParameter::VB,
        SweepParameter::NE,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::LambdaEA => "lambda_EA",
            SweepParameter::LambdaEB => "lambda_EB",
            SweepParameter::AlphaAP => "alpha_A_P",
            SweepParameter::AlphaBP => "alpha_B_P",
            SweepParameter::Rho => "rho",
            SweepParameter::VA => "v_A",
            SweepParameter::VB => "v_B",
            SweepParameter::NE => "n_E",
        }
    }

    fn is_integer(&self) -> bool {
        matches!(
            self,
            SweepParameter::VA | SweepParameter::VB | SweepParameter::NE
        )
    }

    /// Powers and noise variances are plotted on a log axis.
    pub fn log_axis(&self) -> bool {
        !self.is_integer() && *self != SweepParameter::Rho
    }

    /// `base` with this parameter set to `value`. The imaginary part of `rho` is kept.
    pub fn apply(&self, base: &ProbingConfig, value: f64) -> ProbingConfig {
        let mut c = base.clone();
        match self {
            SweepParameter::LambdaEA => c.lambda_ea = value,
            SweepParameter::LambdaEB => c.lambda_eb = value,
            SweepParameter::AlphaAP => c.alpha_a_p = value,
            SweepParameter::AlphaBP => c.alpha_b_p = value,
            SweepParameter::Rho => c.rho = Complex64::new(value, base.rho.im),
            SweepParameter::VA => c.v_a = value as usize,
            SweepParameter::VB => c.v_b = value as usize,
            SweepParameter::NE => c.n_e = value as usize,
        }
        c
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepParameter::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = SweepParameter::ALL.iter().map(|p| p.name()).collect();
                Error::Validation(format!(
                    "unknown sweep parameter '{s}' (supported: {})",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DofSpec {
    pub quantity: Quantity,
    pub powers: Vec<f64>,
    pub budget: Option<usize>,
}

/// Settings a command line may override.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct McOverrides {
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub base: ProbingConfig,
    pub quantities: Vec<Quantity>,
    pub mc: McSettings,
    pub sweep: Option<Sweep>,
    pub dof: Option<DofSpec>,
    pub svg: bool,
}

impl ExperimentSpec {
    /// Applies command-line values over those from the file.
    pub fn apply_overrides(&mut self, o: McOverrides) -> Result<()> {
        if let Some(t) = o.trials {
            self.mc.trials = t;
        }
        if let Some(s) = o.seed {
            self.mc.master_seed = s;
        }
        if o.threads.is_some() {
            self.mc.max_parallelism = o.threads;
        }
        validate_mc(&self.mc)
    }
}

fn validate_mc(mc: &McSettings) -> Result<()> {
    if mc.trials == 0 {
        return Err(Error::Validation("trials must be >= 1".into()));
    }
    if mc.max_parallelism == Some(0) {
        return Err(Error::Validation("threads must be >= 1".into()));
    }
    Ok(())
}

/// Monte Carlo settings from a file section, falling back to `defaults`.
pub fn mc_from_toml(mc: &McToml, defaults: McOverrides) -> Result<McSettings> {
    let s = McSettings {
        trials: mc.trials.or(defaults.trials).unwrap_or(DEFAULT_TRIALS),
        master_seed: mc.seed.or(defaults.seed).unwrap_or(DEFAULT_SEED),
        max_parallelism: mc.threads.or(defaults.threads),
    };
    validate_mc(&s)?;
    Ok(s)
}

/// Rejects a config with a message naming the violated rule.
pub fn validate_config(c: &ProbingConfig) -> Result<()> {
    if c.phi_a < c.n_a {
        return Err(Error::Validation(format!(
            "phi_A = {} < n_A = {}: pilot length must satisfy phi >= n",
            c.phi_a, c.n_a
        )));
    }
    if c.phi_b < c.n_b {
        return Err(Error::Validation(format!(
            "phi_B = {} < n_B = {}: pilot length must satisfy phi >= n",
            c.phi_b, c.n_b
        )));
    }
    c.validate().map_err(|e| Error::Validation(e.to_string()))
}

fn parse_error(path: &Path, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

/// Reads a file, mapping I/O failures to a parse error that names the path.
pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| parse_error(path, format!("cannot read: {e}")))
}

/// Loads and fully validates an experiment file. `env_defaults` replaces the
/// built-in seed and thread defaults but not values given in the file.
pub fn load_config(path: &Path, env_defaults: McOverrides) -> Result<ExperimentSpec> {
    let text = read_text(path)?;
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("experiment")
        .to_string();
    parse_experiment(&text, &stem, env_defaults).map_err(|e| match e {
        Error::Parse { message, .. } => parse_error(path, message),
        other => other,
    })
}

/// Parses experiment TOML; `default_name` is used when the file has no `name`.
pub fn parse_experiment(
    text: &str,
    default_name: &str,
    env_defaults: McOverrides,
) -> Result<ExperimentSpec> {
    let raw: ExperimentToml =
        toml::from_str(text).map_err(|e| parse_error(Path::new("<config>"), e.to_string()))?;
    let base = raw.config.to_config();
    validate_config(&base)?;

    let quantities = match raw.quantities {
        None => vec![Quantity::Bounds],
        Some(names) => {
            if names.is_empty() {
                return Err(Error::Validation("quantities must be nonempty".into()));
            }
            let mut q = names
                .iter()
                .map(|n| n.parse::<Quantity>())
                .collect::<Result<Vec<_>>>()?;
            q.sort();
            q.dedup();
            q
        }
    };

    let sweep = match raw.sweep {
        None => None,
        Some(s) => {
            let parameter: SweepParameter = s.parameter.parse()?;
            if s.values.is_empty() {
                return Err(Error::Validation("sweep values must be nonempty".into()));
            }
            for &v in &s.values {
                if parameter.is_integer() && !(v >= 0.0 && v.fract() == 0.0 && v <= 1e6) {
                    return Err(Error::Validation(format!(
                        "sweep value {v} is not a valid count for {parameter}"
                    )));
                }
                validate_config(&parameter.apply(&base, v)).map_err(|e| {
                    Error::Validation(format!("sweep value {parameter} = {v}: {e}"))
                })?;
            }
            Some(Sweep {
                parameter,
                values: s.values,
            })
        }
    };

    let dof = match raw.dof {
        None => None,
        Some(d) => {
            let quantity = match d.quantity {
                None => Quantity::XiB,
                Some(q) => q.parse()?,
            };
            if quantity == Quantity::Dof {
                return Err(Error::Validation(
                    "dof quantity must be an expectation".into(),
                ));
            }
            crate::skc::validate_grid(&d.powers).map_err(|e| Error::Validation(e.to_string()))?;
            Some(DofSpec {
                quantity,
                powers: d.powers,
                budget: d.budget,
            })
        }
    };

    let name = raw.name.unwrap_or_else(|| default_name.to_string());
    if name.is_empty() || name.contains(['/', '\\']) {
        return Err(Error::Validation(format!(
            "name '{name}' is not a valid file stem"
        )));
    }
    Ok(ExperimentSpec {
        name,
        base,
        quantities,
        mc: mc_from_toml(&raw.mc, env_defaults)?,
        sweep,
        dof,
        svg: raw.svg.unwrap_or(false),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let s = parse_experiment(
            "[config]\nn_A = 2\nn_B = 1\nn_E = 1\n",
            "x",
            McOverrides::default(),
        )
        .unwrap();
        assert_eq!(s.name, "x");
        assert_eq!(s.base, ProbingConfig::new(2, 1, 1));
        assert_eq!(s.quantities, [Quantity::Bounds]);
        assert_eq!(s.mc, McSettings::new(10_000, 1));
        assert!(s.sweep.is_none() && s.dof.is_none() && !s.svg);
    }

    #[test]
    fn short_pilot_names_rule() {
        let e = parse_experiment(
            "[config]\nn_A = 4\nn_B = 1\nn_E = 1\nphi_A = 2\n",
            "x",
            McOverrides::default(),
        )
        .unwrap_err();
        assert!(
            matches!(&e, Error::Validation(m) if m.contains("phi_A") && m.contains("phi >= n")),
            "{e}"
        );
        assert_eq!(e.exit_code(), 3);
    }

    #[test]
    fn syntax_and_unknown_fields_are_parse_errors() {
        for text in [
            "[config\nn_A = 1",
            "[config]\nn_A = 1\nn_B = 1\nn_E = 1\nbogus = 3\n",
        ] {
            let e = parse_experiment(text, "x", McOverrides::default()).unwrap_err();
            assert_eq!(e.exit_code(), 2, "{e}");
        }
    }

    #[test]
    fn env_defaults_lose_to_file_and_cli() {
        let env = McOverrides {
            seed: Some(9),
            threads: Some(3),
            trials: None,
        };
        let s = parse_experiment("[config]\nn_A = 1\nn_B = 1\nn_E = 1\n", "x", env).unwrap();
        assert_eq!((s.mc.master_seed, s.mc.max_parallelism), (9, Some(3)));
        let mut s = parse_experiment(
            "[config]\nn_A = 1\nn_B = 1\nn_E = 1\n[mc]\nseed = 4\n",
            "x",
            env,
        )
        .unwrap();
        assert_eq!(s.mc.master_seed, 4);
        s.apply_overrides(McOverrides {
            seed: Some(5),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(s.mc.master_seed, 5);
    }

    #[test]
    fn sweep_values_are_type_checked() {
        let base = "[config]\nn_A = 2\nn_B = 2\nn_E = 1\n";
        let ok = format!("{base}[sweep]\nparameter = \"v_B\"\nvalues = [0, 1, 2]\n");
        assert!(parse_experiment(&ok, "x", McOverrides::default()).is_ok());
        for bad in [
            "[sweep]\nparameter = \"v_B\"\nvalues = [1.5]\n",
            "[sweep]\nparameter = \"rho\"\nvalues = [1.5]\n",
            "[sweep]\nparameter = \"lambda_EA\"\nvalues = [-1.0]\n",
            "[sweep]\nparameter = \"n_A\"\nvalues = [1]\n",
            "[sweep]\nparameter = \"alpha_A_P\"\nvalues = []\n",
        ] {
            let e =
                parse_experiment(&format!("{base}{bad}"), "x", McOverrides::default()).unwrap_err();
            assert_eq!(e.exit_code(), 3, "{bad}: {e}");
        }
    }

    #[test]
    fn dof_section() {
        let text =
            "[config]\nn_A = 8\nn_B = 4\nn_E = 6\n[dof]\npowers = [1, 10, 100, 1000]\nbudget = 4\n";
        let s = parse_experiment(text, "x", McOverrides::default()).unwrap();
        let d = s.dof.unwrap();
        assert_eq!((d.quantity, d.budget), (Quantity::XiB, Some(4)));
        let bad = "[config]\nn_A = 8\nn_B = 4\nn_E = 6\n[dof]\npowers = [1, 10]\n";
        assert_eq!(
            parse_experiment(bad, "x", McOverrides::default())
                .unwrap_err()
                .exit_code(),
            3
        );
    }
}
