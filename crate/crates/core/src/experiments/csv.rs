//! CSV emission with fixed, locale-independent number formatting.

use crate::mc::Estimate;
use crate::skc::{Quantity, SkcReport};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Formats like C's `%.12g`: 12 significant digits, trailing zeros removed,
/// scientific notation outside `1e-4 <= |x| < 1e12`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIGNIFICANT_DIGITS as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Column names contributed by one quantity.
pub fn quantity_columns(q: Quantity) -> Vec<String> {
    match q {
        Quantity::Bounds => ["lower_mean", "lower_stderr", "upper_mean", "upper_stderr"]
            .map(String::from)
            .to_vec(),
        Quantity::Dof => vec!["dof_formula".into()],
        q => vec![format!("{}_mean", q.name()), format!("{}_stderr", q.name())],
    }
}

/// `parameter,value,<quantity columns>,trials,seed`.
pub fn header(quantities: &[Quantity]) -> String {
    let mut cols = vec!["parameter".to_string(), "value".to_string()];
    for &q in quantities {
        cols.extend(quantity_columns(q));
    }
    cols.push("trials".into());
    cols.push("seed".into());
    cols.join(",")
}

/// Values available for one row; absent entries were not computed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RowValues {
    pub cs1: Option<f64>,
    pub xi_b: Option<Estimate>,
    pub report: Option<SkcReport>,
    pub dof: Option<u64>,
}

impl RowValues {
    fn estimate(&self, q: Quantity) -> Estimate {
        let r = self.report.as_ref();
        match q {
            Quantity::Cs1 => Estimate::exact(self.cs1.expect("cs1 computed")),
            Quantity::XiB => self.xi_b.or(r.map(|r| r.xi_b)).expect("xi_b computed"),
            Quantity::CA => r.expect("report computed").c_a,
            Quantity::CB => r.expect("report computed").c_b,
            Quantity::CZ => r.expect("report computed").c_z,
            Quantity::Gap => r.expect("report computed").gap,
            Quantity::Bounds | Quantity::Dof => unreachable!("multi-column quantity"),
        }
    }

    fn cells(&self, q: Quantity) -> Vec<String> {
        match q {
            Quantity::Bounds => {
                let r = self.report.as_ref().expect("report computed");
                vec![
                    fmt_num(r.lower.mean),
                    fmt_num(r.lower.stderr),
                    fmt_num(r.upper.mean),
                    fmt_num(r.upper.stderr),
                ]
            }
            Quantity::Dof => vec![self.dof.map(|d| d.to_string()).unwrap_or_default()],
            q => {
                let e = self.estimate(q);
                vec![fmt_num(e.mean), fmt_num(e.stderr)]
            }
        }
    }
}

/// One data row. `parameter` is `none` for a single evaluation.
pub fn row(
    parameter: &str,
    value: Option<f64>,
    quantities: &[Quantity],
    values: &RowValues,
    trials: u64,
    seed: u64,
) -> String {
    let mut cells = vec![
        parameter.to_string(),
        value.map(fmt_num).unwrap_or_default(),
    ];
    for &q in quantities {
        cells.extend(values.cells(q));
    }
    cells.push(trials.to_string());
    cells.push(seed.to_string());
    cells.join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(2.0 / 3.0 * 100.0), "66.6666666667");
        assert_eq!(fmt_num(1e-7), "1e-07");
        assert_eq!(fmt_num(-1.25e-9), "-1.25e-09");
        assert_eq!(fmt_num(1e12), "1e+12");
        assert_eq!(fmt_num(123456789012.0), "123456789012");
        assert_eq!(fmt_num(0.0001), "0.0001");
        assert_eq!(fmt_num(f64::NAN), "nan");
    }

    #[test]
    fn header_columns() {
        assert_eq!(
            header(&[Quantity::XiB, Quantity::Bounds, Quantity::Dof]),
            "parameter,value,xi_b_mean,xi_b_stderr,lower_mean,lower_stderr,upper_mean,upper_stderr,dof_formula,trials,seed"
        );
    }
}
