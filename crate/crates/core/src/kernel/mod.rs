//! Born kernel, its Markov reduction and Lindblad generators.

mod assembly;
mod born;
mod green;
mod lindblad;
mod markov;
mod memory;
mod options;

pub use born::{born_kernel_at, born_kernel_freq, born_kernel_time, DEFAULT_EPS};
pub use green::{advanced_green, retarded_green, step};
pub use lindblad::{bohr_projections, gksl_builder, standard_lindblad_dissipator, JumpSet};
pub use markov::{
    dissipator_at, free_generator, qp_generator, sectors, shift_at, QPGenerator, Sector,
};
pub use memory::MemoryKernel;
pub use options::KernelOptions;
