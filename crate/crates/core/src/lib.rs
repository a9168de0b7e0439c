//! Finite matrix realizations and simulations of f- and q-deformed
//! oscillator algebras.

// NaN must fail positivity and ordering checks, hence `!(x > 0.0)`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod deform;
pub mod fock;
pub mod acceptance;
pub mod classical;
pub mod field;
pub mod hubbard;
pub mod noise;
pub mod oracle;
