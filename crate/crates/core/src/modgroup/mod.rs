//! SL2(Z) arithmetic and the congruence subgroups used throughout.

mod ball;
mod element;
mod subgroup;

pub use ball::{ball, ball_with_budget, lattice_tail_bound, DEFAULT_BALL_BUDGET};
pub(crate) use ball::for_each_bottom_row;
pub use element::{
    complete_bottom_row, complete_left_column, ext_gcd, gcd, mod_inverse, reduce_to_fd, GroupElement,
};
pub use subgroup::{Cusp, CuspPoint, Subgroup, SubgroupKind};
