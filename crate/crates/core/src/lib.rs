//! Exact arithmetic for Drinfeld modules over A = F_q[t].

pub mod base_arith;
pub mod error;
pub mod ring;
pub mod series;
pub mod tate_drinfeld;
pub mod tau_poly;
pub mod upoly;
pub mod carlitz;
pub mod drinfeld;
pub mod forms;
pub mod jobs;
pub mod linalg;
pub mod v_sheaf;

pub use error::{Error, Result};
pub use ring::{Ring, ThetaRing};
