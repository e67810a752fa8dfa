// SPDX-License-Identifier: Apache-2.0

#![doc = include_str!("../README.md")]

pub mod classicalizer;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod io;
pub mod madelung;
pub mod model;
pub mod rng;
pub mod schrodinger;
pub mod thooft;
pub mod wave;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/lotka-volterra.md")]
    mod lotka_volterra {}
    #[doc = include_str!("../../../book/src/madelung.md")]
    mod madelung {}
    #[doc = include_str!("../../../book/src/spectra.md")]
    mod spectra {}
    #[doc = include_str!("../../../book/src/classicalization.md")]
    mod classicalization {}
    #[doc = include_str!("../../../book/src/cancellation.md")]
    mod cancellation {}
    #[doc = include_str!("../../../book/src/thooft.md")]
    mod thooft {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
