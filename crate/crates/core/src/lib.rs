pub mod adeg;
pub mod adversary;
pub mod boolfn;
pub mod cli;
pub mod error;
pub mod gamma2;
pub mod interp;
pub mod numerics;
pub mod poly;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/boolean-functions.md")]
    mod boolean_functions {}
    #[doc = include_str!("../../../book/src/approximate-degree.md")]
    mod approximate_degree {}
    #[doc = include_str!("../../../book/src/polynomials.md")]
    mod polynomials {}
    #[doc = include_str!("../../../book/src/adversary.md")]
    mod adversary {}
    #[doc = include_str!("../../../book/src/gamma2.md")]
    mod gamma2 {}
    #[doc = include_str!("../../../book/src/interpolation.md")]
    mod interpolation {}
    #[doc = include_str!("../../../book/src/numerics.md")]
    mod numerics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
