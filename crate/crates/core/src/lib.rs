//! Exact thermodynamics and Husimi phase-space distributions of the periodic
//! one-dimensional Ising chain in a longitudinal field.
//!
//! Spins take the eigenvalues `+1` and `-1` and the Hamiltonian is
//! `H = -J sum S_k S_{k+1} + B sum S_k` on a ring of `N >= 2` sites.
//!
//! * [`model`]: parameters, basis states, coherent-state overlaps.
//! * [`oracle`]: brute-force enumeration over all `2^N` states.
//! * [`transfer`]: transfer-matrix spectrum and closed-form observables.
//! * [`husimi`]: one- and two-site Husimi marginals.
//! * [`quadrature`]: Gauss-Legendre integration and correlator extraction.
//! * [`cli`]: the `verify`, `grid` and `sweep` commands.

pub mod cli;
pub mod error;
pub mod husimi;
pub mod model;
pub mod oracle;
pub mod quadrature;
pub mod transfer;

pub use error::{Error, Result};
pub use model::{ModelParams, PhasePoint, SpinConfiguration};
pub use transfer::SpectralData;
