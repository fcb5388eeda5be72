//! Benchmark problems, reference fronts, and antenna cost functions.

pub mod antenna;
pub mod dtlz;
pub mod front;

pub use antenna::{
    extract_bdd, extract_sll, phi_bdd, phi_s11, phi_sll, proxy_antenna_evaluate, AntennaResponse,
    AntennaThresholds, ProxyAntenna,
};
pub use dtlz::{dtlz1, Dtlz1};
pub use front::{dtlz1_true_front, error_index};
