//! Exact volume of convex polytopes `{x ∈ ℝⁿ₊ | Ax ≤ b}` by residue
//! inversion of the Laplace transform.

pub mod direct;
pub mod error;
pub mod instance;
pub mod linform;
pub mod lp;
pub mod oracle;
pub mod polytope;
pub mod rat;
pub mod residue;
pub mod transform;

pub use direct::{run_direct, volume_direct, DirectRun};
pub use error::{Error, Result};
pub use linform::{LinForm, VarId};
pub use polytope::{normalize, NormalizedInstance, PolytopeInstance};
pub use rat::Rat;
pub use transform::{run_transform, volume_transform, TransformRun};
