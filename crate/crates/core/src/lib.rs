//! Numerical and combinatorial companion to the degeneration of generalized
//! theta functions for `SL_n` / `GL_n` along a one-nodal curve.
//!
//! The crate is organised bottom-up:
//!
//! - [`lattice`]: the weight lattice of `sl_n`, the normalized Killing form and
//!   the shifted alcove `ρ + P_κ`.
//! - [`cyclotomic`]: exact arithmetic in `Z[ζ_m]`.
//! - [`characters`]: the alternating character sum `J(λ, μ)`, both as a signed
//!   Weyl-group sum and as a minor of the order-`m` DFT matrix.
//! - [`indexsets`]: every label set indexing summands of the factorization.
//! - [`verlinde`]: Verlinde dimensions and their `GL_n` rescalings.
//! - [`factorization`]: identity checks built from the pieces above.
//! - [`gluing`]: an exact-rational model of the gluing argument that
//!   identifies sections on the Gieseker stack with `V'_{n,n}`.
//! - [`cli`]: the `thetafact` command line.

pub mod characters;
pub mod cli;
pub mod cyclotomic;
mod error;
pub mod factorization;
pub mod gluing;
pub mod indexsets;
pub mod lattice;
mod linalg;
pub mod verlinde;

pub use error::{Error, Result};

use serde::{Deserialize, Serialize};

/// Arithmetic route used by identity checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Float => f.write_str("float"),
        }
    }
}

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}
