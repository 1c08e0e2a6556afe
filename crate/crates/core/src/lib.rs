pub mod amoeba;
pub mod bivariate;
pub mod cli;
pub mod divisor;
pub mod error;
mod fiber;
pub mod genus0;
pub mod harnack;
pub mod holes;
pub mod io;
pub mod isoradial;
pub mod kasteleyn;
pub mod lattice;
pub mod numerics;
pub mod ovals;
pub mod ronkin;

pub use error::{Error, Result};
