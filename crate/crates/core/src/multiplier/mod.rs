//! Multiplier systems of real weight.
//!
//! Unit complex values are handled as phases in turns (`e^{2 pi i t}`), which
//! keeps products of many factors exact up to one rounding per factor.

mod arith;
mod conjugate;
mod phase;
mod sigma;
mod system;

pub use arith::{dedekind_sum, jacobi, shimura_symbol, Rational};
pub use conjugate::{cusp_data, cusp_parameter, cusp_parameter_at, conjugate_upsilon, conjugate_upsilon_turns, CuspParameterData};
pub use phase::{from_turns, reduce_turns, to_turns, turn_distance};
pub use sigma::{sigma, sigma_turns, sigma_winding, PROBES};
pub use system::{MultiplierKind, MultiplierSystem};

use num_complex::Complex64;

use crate::error::Result;
use crate::modgroup::GroupElement;

/// `v(g)` as a unit complex number.
pub fn upsilon(sys: &MultiplierSystem, g: &GroupElement) -> Result<Complex64> {
    Ok(from_turns(sys.upsilon_turns(g)?))
}
