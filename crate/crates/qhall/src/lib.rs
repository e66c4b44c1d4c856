//! Exact Hall algebras, quantum groups and their canonical bases.

pub mod cache;
pub mod canonbasis;
pub mod cartan;
pub mod finrep;
pub mod double;
pub mod fp;
pub mod hallgen;
pub mod ihall;
pub mod iquant;
pub mod lincomb;
pub mod nks;
pub mod ratfunc;
pub mod scalars;
pub mod triangle;
pub mod verify;

pub use cartan::{parse_quiver_spec, DiagramInvolution, DynkinType, IQuiver, QuiverShape, RootDatum};
pub use finrep::{FqRep, KSClass, RepCategory};
pub use ratfunc::RatFunc;
pub use scalars::{QPolynomial, Rational, ScalarHalf};
pub use hallgen::{HallAlgebra, HallElt};
pub use lincomb::LinComb;
