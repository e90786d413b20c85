//! Keller maps `x + H` with `H` cubic homogeneous and `rk JH <= 2`.

mod derivation;
mod inverse;
mod nilpotent;
mod normal_form;
mod tame;

pub use derivation::{derivation_apply, exp_derivation, Derivation};
pub use inverse::{compose_with_parameters, default_degree_bound, invert_keller};
pub use nilpotent::{
    conjugate, factor_nilpotent_2x2, is_strictly_lower_triangular, linear_triangularization,
    linearly_dependent, normalize_nilpotent_2x2_cubic, simultaneous_triangularization,
    Nilpotent2x2Factorization, Nilpotent2x2Normalization, Nilpotent2x2Outcome,
};
pub use normal_form::{
    form_ii_core, is_keller, jacobian_x, keller_normal_form, keller_part, parameter_count,
    KellerNormalForm, KellerVariant,
};
pub use tame::{linear_steps, recompose, tame_decompose, ElementaryStep, TameDecomposition};
