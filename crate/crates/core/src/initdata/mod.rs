//! Initial data: profile, velocity, energy gate and curve geometry.

pub mod energy;
pub mod geometry;
pub mod profile;

pub use energy::{
    energy_check, epsilon_gate, kinetic_energy, kinetic_energy_with, make_velocity, EnergyBudget,
    EnergyCheck, Quadrature,
};
pub use geometry::{confinement_check, curve_length, energy_functional, ConfinementVerdict};
pub use profile::{build_profile, exceptional_area, initial_vorticity, smooth_step, ProfileSpec, Transition};
