pub mod coset;
pub mod error;
pub mod group;
pub mod induced;
pub mod linalg;
pub mod scalar;
pub mod whittaker;
pub mod arith;
pub mod zeta;
pub mod suite;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/scalars.md")]
    mod scalars {}
    #[doc = include_str!("../../../book/src/group.md")]
    mod group {}
    #[doc = include_str!("../../../book/src/principal-series.md")]
    mod principal_series {}
    #[doc = include_str!("../../../book/src/whittaker.md")]
    mod whittaker {}
    #[doc = include_str!("../../../book/src/zeta.md")]
    mod zeta {}
    #[doc = include_str!("../../../book/src/arithmetic.md")]
    mod arithmetic {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
