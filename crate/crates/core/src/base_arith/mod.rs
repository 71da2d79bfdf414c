//! Exact arithmetic: F_q, A = F_q[t], quotients A/(m) and residue fields.

mod fq;
mod poly;
mod residue;
mod text;

pub use fq::{prime_power, Fq, FqField};
pub use poly::{APoly, Degree, PolyRing};
pub use residue::{Embedding, ResidueRing, MAX_ENUMERATED_FIELD};
