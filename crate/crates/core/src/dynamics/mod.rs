//! Time evolution, Dyson inversion and spectral analysis.

mod markov;
mod memory;
mod resonance;
mod steady;
mod trajectory;
mod transmission;

pub use markov::evolve_markov;
pub use memory::{evolve_memory, evolve_memory_with, MemoryOptions, DEFAULT_TAIL_THRESHOLD};
pub use resonance::{resonance_roots, Resonance, ResonanceMode, ResonanceOptions, ResonanceSet};
pub use steady::{steady_state, NULL_TOL};
pub use trajectory::{Trajectory, TrajectorySummary};
pub use transmission::{
    free_transmission, inverse_free_transmission, transmission_freq, SINGULAR_TOL,
};

#[cfg(test)]
mod tests;
