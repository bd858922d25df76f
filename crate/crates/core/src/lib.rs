//! Numerical laboratory for subriemannian geometry of Hölder-continuous,
//! codimension-one horizontal distributions.
//!
//! The crate builds contact-type 1-forms whose coefficients are `C^theta`
//! (lacunary cosine series), estimates subriemannian distances by
//! derivative-free optimization over horizontal controls, fills loops with
//! triangulated disks, and checks the lower bound
//! `d_H >= C d_R^(1/(1+theta))` along transverse curves together with every
//! inequality its proof relies on.
//!
//! Each capability has a runnable program under `examples/`; the `hsr`
//! binary runs experiments from key-value config files.

pub mod bounds;
pub mod cli;
pub mod disks;
pub mod distance;
pub mod error;
pub mod fields;
pub mod forms;
pub mod kv;
pub mod norm;
pub mod paths;
pub mod search;
pub mod verify;

pub use error::{Error, Result};

/// Points and tangent vectors of the chart.
pub type Vec3 = nalgebra::Vector3<f64>;
