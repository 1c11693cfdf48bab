//! Exact construction and verification of braided unipotent tensor category
//! data over the rationals: Drinfeld associators, coherence of `Rep(g)` with
//! braiding `P e^{t/2}`, classical and quantum Yang-Baxter structures, twists,
//! and coconnected Hopf algebras. Every formal series terminates because all
//! actions are nilpotent.

pub mod associator;
pub mod category;
pub mod error;
pub mod freealg;
pub mod hopf;
pub mod kernel;
pub mod liealg;
pub mod pbw;
pub mod report;
pub mod twist;

pub use error::{Error, Result};
