//! Channel modelling and link simulation for FSO links reflected off an
//! intelligent reflecting surface (IRS).
//!
//! The crate goes from geometry to bit errors:
//! [`geometry`] and [`beam`] describe the link, [`irs`] the linear phase
//! profile, [`delay`] the end-to-end delay across the panel, [`cir`] the
//! resulting impulse response, [`link`] its reduction to symbol-spaced taps,
//! [`equalize`] the receivers and [`sim`] the Monte Carlo BER engine.
//! [`config`] and [`cli`] back the `irs-fso` binary.

pub mod beam;
pub mod cir;
pub mod cli;
pub mod config;
pub mod delay;
pub mod equalize;
pub mod error;
pub mod geometry;
pub mod irs;
pub mod link;
pub mod quadrature;
pub mod sim;
pub mod special;

pub use error::{Error, Result};
