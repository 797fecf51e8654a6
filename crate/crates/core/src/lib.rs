pub mod cli;
pub mod error;
pub mod fit;
pub mod kernels;
pub mod quad;
mod radial_ode;
pub mod space;
pub mod special;
pub mod spherical;
pub mod strichartz;
pub mod transform;
pub mod wavesolver;

pub use error::{Error, Result};
pub use space::{new_space, SpaceParams};
