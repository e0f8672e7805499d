//! Worst-case Fourier-sum approximation bounds on classes of generalized
//! Poisson integrals, and numerical checks of their asymptotic formulas.

pub mod asymptotics;
pub mod error;
pub mod harness;
pub mod bounds;
pub mod kernel;
pub mod norms;
mod quad;
pub mod specfun;

pub use error::{NumericError, Result};
pub use kernel::{KernelParams, ModulatedSeries, ScaledValue, TruncationIndex};
pub use norms::{NormOrder, QuadratureConfig};
