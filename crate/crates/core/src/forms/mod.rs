//! Concrete cusp forms: eta powers and `Delta^a E4^b E6^c` monomials with
//! exact or near-exact `q`-expansions, Petersson products by quadrature and
//! orthonormal bases.

mod basis;
mod form;
mod petersson;
pub mod qseries;

pub use basis::{
    cusp_form_dimension_full, monomial_basis_full, normalized, orthonormal_basis, orthonormal_basis_full, OrthonormalBasis,
    MAX_GRAM_CONDITION,
};
pub use form::{
    delta, eta_form, eta_power_form, monomial_form, CuspForm, FormRecord, FormValue, DEFAULT_COEFFS, EVAL_REL_TAIL,
};
pub use petersson::{cusp_decay_rate, gram_fn, petersson_inner, petersson_norm, petersson_norm_slashed, Evaluator};
