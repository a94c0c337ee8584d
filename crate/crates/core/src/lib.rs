//! Exact symbolic engine for pointed Hopf algebras of diagonal type over
//! free abelian groups and their cocycle deformations.

pub mod abgroup;
pub mod cleft;
pub mod datum;
pub mod freealg;
pub mod hopf;
pub mod linalg;
pub mod scalars;
pub mod uq;

pub use abgroup::{BilinearCocycle, Character, GrpElt, MVec, KM};
pub use datum::{Gcm, YDDatum};
pub use freealg::{Element, Flavor, Mono, Presentation};
pub use scalars::{Coeff, Scalar, ScalarError};
