//! Secret-key capacity: closed forms, per-realization integrands, Monte Carlo bounds and DoF.

mod bounds;
mod closed_form;
mod dof;
mod integrands;

pub use bounds::{c_a, c_b, c_z, gap, skc_bounds, xi_b, LowerBoundSource, Quantity, SkcReport};
pub use closed_form::{cs1, g_factor, gaussian_entropy, gaussian_mi};
pub use dof::{
    budget_splits, dof_formula, dof_slope, formula_for, linear_fit, validate_grid, BudgetSplit,
    DofResult,
};
pub use integrands::{
    c_a_sample, c_b_sample, gap_sample, xi_b_sample, CbForm, GapForm, SampleTerms, SkcEvaluator,
    XiForm,
};
