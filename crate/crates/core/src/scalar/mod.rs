//! The exact arithmetic tower.

pub mod cyclotomic;
pub mod field;
pub mod poly;
pub mod rational;
pub mod series;

pub use cyclotomic::{Coeff, Cyclotomic, CyclotomicNumber};
pub use field::{PMode, Scalar, SymbolSet};
pub use poly::{gcd, Poly, Var};
pub use rational::Rational;
pub use series::GeneratingSeries;
