pub mod baselines;
pub mod cli;
pub mod config;
pub mod control;
pub mod error;
pub mod least_squares;
pub mod nonlinearity;
pub mod report;
pub mod wave;

pub use error::{Error, Result};
pub use nonlinearity::Nonlinearity;

// The guide's snippets run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/wave.md")]
    mod wave {}
    #[doc = include_str!("../../../book/src/linear_control.md")]
    mod linear_control {}
    #[doc = include_str!("../../../book/src/nonlinearity.md")]
    mod nonlinearity {}
    #[doc = include_str!("../../../book/src/least_squares.md")]
    mod least_squares {}
    #[doc = include_str!("../../../book/src/baselines.md")]
    mod baselines {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
