pub mod linalg;
pub mod poset;
pub mod module;
pub mod barcode;
pub mod resolution;
pub mod metric;
pub mod rank_decomp;
pub mod repro;
