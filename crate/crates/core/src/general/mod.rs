//! Double-threshold sequential analytics: crossing volumes, continuation
//! integrals and the two-dimensional threshold search.

pub mod crossing;
pub mod fbasis;
pub mod optimize;
pub mod psi;

pub use crossing::{
    crossing_probs, j_fn, seq_metrics_general, CrossingTable, Geometry, HypothesisRows,
    MAX_TRUNCATION_GENERAL,
};
pub use fbasis::{f_eval, FBasis};
pub use optimize::{optimize_2d, GridOptions, GridPoint, GridSearch};
pub use psi::{psi_max_form, psi_vector, q_index, s_index, PsiVector};
