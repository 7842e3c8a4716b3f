//! Elliptic solvers: spectral Poisson on the doubled torus, the Dirichlet
//! strip solve by odd reflection, the lattice-sum oracle and harmonic
//! extensions.

pub mod greens;
pub mod harmonic;
pub mod poisson;
pub mod spectral;

pub use greens::{greens_point_eval, GreensOptions, GreensOracle, GreensRule};
pub use harmonic::{error_field, harmonic_extension, BoundaryData, HarmonicExtension};
pub use poisson::{
    biot_savart, solve_dirichlet_strip, solve_poisson_torus, spectral_curl, spectral_divergence,
    symmetry_audit,
};
pub use spectral::SpectralWorkspace;
