//! Synthesis and characterization of bypass-enhanced controlled-Z gates
//! built from weak controlled-phase interactions.
//!
//! The crate covers the abstract spin protocol ([`spin`]), its linear-optics
//! realization ([`optical`]), an experimental imperfection model ([`model`])
//! with an independent Fock-space cross-check ([`fock`]), gate figures of
//! merit ([`metrics`]) and simulated process tomography ([`tomography`]).

pub mod consistency;
pub mod error;
pub mod fock;
pub mod metrics;
pub mod model;
pub mod optical;
pub mod process;
pub mod qmath;
pub mod report;
pub mod spin;
pub mod tomography;

pub use error::{Error, Result};
pub use model::{AngleRule, SetupParams, SweepRecord};
pub use process::ProcessMatrix;
pub use qmath::{ComplexMatrix, PureState, C64};
