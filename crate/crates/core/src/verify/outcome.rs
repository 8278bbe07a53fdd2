use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ToleranceKind {
    Absolute,
    Relative,
}

/// Result of one verification check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationOutcome {
    pub check_name: String,
    pub reference_value: f64,
    pub computed_value: f64,
    pub tolerance: f64,
    pub tolerance_kind: ToleranceKind,
    pub passed: bool,
    pub detail: String,
}

impl VerificationOutcome {
    /// Builds an outcome whose `passed` flag is derived from the values.
    ///
    /// A relative tolerance is applied as `tol * |reference|`, with a floor of
    /// `1e-12` so that a zero reference is still checkable.
    pub fn compare(
        check_name: impl Into<String>,
        reference_value: f64,
        computed_value: f64,
        tolerance: f64,
        tolerance_kind: ToleranceKind,
        detail: impl Into<String>,
    ) -> Self {
        let diff = (reference_value - computed_value).abs();
        let allowed = match tolerance_kind {
            ToleranceKind::Absolute => tolerance,
            ToleranceKind::Relative => tolerance * reference_value.abs() + 1e-12,
        };
        Self {
            check_name: check_name.into(),
            reference_value,
            computed_value,
            tolerance,
            tolerance_kind,
            passed: diff <= allowed,
            detail: detail.into(),
        }
    }

    /// Outcome of a check that is not a single comparison.
    pub fn flag(
        check_name: impl Into<String>,
        reference_value: f64,
        computed_value: f64,
        tolerance: f64,
        passed: bool,
        detail: impl Into<String>,
    ) -> Self {
        Self {
            check_name: check_name.into(),
            reference_value,
            computed_value,
            tolerance,
            tolerance_kind: ToleranceKind::Absolute,
            passed,
            detail: detail.into(),
        }
    }
}
