//! Complex linear algebra kernel, Weyl–Schwinger operators, MUB
//! construction and certification, the Latin operator basis, and the
//! shifting-unitary check.
//!
//! All numerics are double precision against the default tolerance
//! [`TOL`] = 1e-10; dimensions stay small (≤ 16), so the dense kernel and
//! the Jacobi eigensolver in [`cmat`] are all that is needed.

pub mod basis;
pub mod cmat;
pub mod construct;
pub mod shifting;
pub mod weyl;

pub use basis::{
    latin_operator, latin_trace_law, mub_tensor_product, s_operator, tuples_from_net, verify_mub,
    Basis, MubCertification, MubSet,
};
pub use cmat::{inner, norm, phase_fix, CMat, TOL};
pub use construct::{
    aligned_net, commuting_classes_from_net, eigenbasis_closed_form, joint_eigenbasis,
    mubs_for, mubs_for_tol, mubs_from_net, weyl_triple,
};
pub use shifting::{verify_shifting, ShiftReport};
pub use weyl::{commute, root_of_unity, weyl_op, weyl_x, weyl_z, WeylIndex};
