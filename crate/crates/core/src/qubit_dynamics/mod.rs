//! Reduced two-mode (one-bit) and four-mode (two-bit) dynamics.

mod one_bit;
mod tensors;
mod two_bit;

pub use one_bit::{
    apply_gate, evolve_one_bit, gate_product, linear_gate, nonlinear_twist, one_bit_rhs, one_bit_trajectory,
    state_divergence, time_averaged_imbalance, Evolved, Gate2, OneBitParams, QubitState, SelfTrappingScan,
    MAX_NORM_DRIFT, STATE_NORM_TOL,
};
pub use tensors::{DerivedTensors, Tensor4};
pub use two_bit::{
    compare_coefficient_modes, conditional_phase_closed_form, diagonal_rates, entanglement_measure,
    entangling_phase_rate, evolve_two_bit, predicted_entanglement_time, printed_f, printed_g_interaction, two_bit_rhs,
    two_bit_trajectory, CoefficientMode, CondensateMode, Mat2, ModeComparison, TwoBitParams, TwoQubitState,
};
