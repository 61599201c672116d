//! Grids, spectral operators, quadrature and time integrators shared by every solver.

mod convolution;
mod field;
mod grid;
mod ode;
mod relax;
mod spectral;
mod split_step;

pub use convolution::{direct_convolution, KernelConvolver};
pub use field::{integrate, ComplexField};
pub use grid::Grid1D;
pub use ode::{rk4_step, uniform_steps};
pub(crate) use relax::energy_parts;
pub use relax::{imaginary_time_relax, relax, stationary_residual, RelaxOptions, Relaxed};
pub use spectral::{laplacian, Spectral1D};
pub use split_step::{split_step, IntegratorConfig, Scheme, SplitStepper};
