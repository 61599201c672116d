//! Joint wavefunction of two condensates on a product grid.

mod engine;
mod field;
mod projection;

pub use engine::{
    evolve_pair, evolve_pair_observed, evolve_pair_spinor, pair_energy, pair_rhs, pair_spinor_energy, PairObservables,
    PairParams, PairTrajectory, SpinorPairParams,
};
pub use field::PairField;
pub use projection::{mode_overlaps, project_to_modes, reconstruct_from_modes, schmidt_defect, Projection, Schmidt};
