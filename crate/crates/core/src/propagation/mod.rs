//! Numerical experiments on flat functions and their bounds along rays.

mod experiments;
mod fit;
mod functions;

pub use experiments::*;
pub use fit::*;
pub use functions::*;
