//! Littlewood-Paley blocks and the Besov-type norms built from them.

mod norms;
#[cfg(any(test, feature = "oracles"))]
pub mod oracle;
mod time_norms;
mod trajectory;
mod window;

pub use norms::{
    besov_norm, besov_report, block_lp_norms, critical_regularity, dyadic_block, low_pass, lp_norm,
    sequence_norm, uncovered_modes, BesovSpec, Block, BlockRow, NormReport,
};
pub use time_norms::{
    chemin_lerner_norm, chemin_lerner_norm_on, critical_chemin_lerner, critical_chemin_lerner_on,
    lebesgue_time_besov_norm, lebesgue_time_besov_norm_on, lebesgue_time_lp_norm, mixed_space_norm,
    mixed_space_norm_on, time_norm,
};
pub use trajectory::Trajectory;
pub use window::{block_symbol, cutoff_profile, low_pass_symbol, DyadicWindow};
