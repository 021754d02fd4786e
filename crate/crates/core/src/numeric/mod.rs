//! Floating-point analysis over the complex numbers: singularities of
//! foliations by curves, indeterminacy of rational maps, the local structure
//! of pull-back foliations at their singular points, and continuation of
//! those points under deformation.

pub mod chart;
pub mod cpoly;
pub mod deform;
pub mod local;
pub mod maps;
pub mod newton;
pub mod singular;
pub mod univariate;

use serde::{Deserialize, Serialize};

pub use chart::{chart_field, chart_field_of, chart_form, chart_rotational, ChartField};


pub use deform::{positional_error, track_deformation, DeformationReport, PathStep, Perturbation, PointPath};
pub use local::{
    exact_nilpotent, kupka_test, ngk_point_test, ngk_test, KupkaVerdict, LocalModel, NgkStatus, NgkVerdict,
};
pub use maps::{
    generic_pair_check, genericity_check, indeterminacy_locus, sample_fiber, GenericPairReport, GenericityReport,
    IndeterminacySet, Verdict,
};
pub use singular::{
    classify_hyperbolic, expected_singularities, planar_resultant, solve_singularities, Classification,
    SingularPointRecord, SingularityReport, TypeTag,
};

/// Tolerances and sampling settings. Every report echoes the values it ran with.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NumericConfig {
    pub seed: u64,
    /// Multistart budget per expected solution.
    pub starts_per_expected: usize,
    /// Radius of the polydisc random starts are drawn from.
    pub start_radius: f64,
    /// Projective distance under which two solutions are merged.
    pub dedup_radius: f64,
    /// Absolute residual a Newton solution must reach.
    pub residual_tol: f64,
    pub max_newton_iter: usize,
    /// Relative imaginary part an eigenvalue ratio needs to count as non-real.
    pub hyperbolic_tol: f64,
    /// Relative bound on the top power of a Jacobian for nilpotency.
    pub nilpotency_tol: f64,
    /// Smallest over largest singular value required for full rank.
    pub rank_tol: f64,
    /// Relative size a form or field must stay below to count as vanishing.
    pub vanishing_tol: f64,
    /// Radius of the shell of starts probing isolation.
    pub shell_radius: f64,
    pub shell_starts: usize,
    /// Use closed-form enumeration for recognized diagonal maps.
    pub exact_shapes: bool,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig {
            seed: 0,
            starts_per_expected: 200,
            start_radius: 2.0,
            dedup_radius: 1e-6,
            residual_tol: 1e-10,
            max_newton_iter: 60,
            hyperbolic_tol: 1e-9,
            nilpotency_tol: 1e-8,
            rank_tol: 1e-8,
            vanishing_tol: 1e-8,
            shell_radius: 1e-2,
            shell_starts: 16,
            exact_shapes: true,
        }
    }
}
