//! Sender-to-receiver transfer maps and what they imply for recovering the
//! sender state.

pub mod closed_form;
pub mod engine;
pub mod info;
pub mod matrix;
pub mod pst;
pub mod scan;

pub use closed_form::{closed_form_r, closed_form_transfer};
pub use engine::TransferEngine;
pub use info::{classify, compute_info_system, Classification, InfoSystem, Tolerances, TransferClass};
pub use matrix::{compute_transfer_matrix, pair_index, TransferMatrix, PAIRS};
pub use pst::{pst_check, PstCheck};
pub use scan::{scan_time, ScanOptions, ScanPoint, ScanResult};
