//! Exact-arithmetic workbench for the link complements `M_n` and their mutants `M_I`.
//!
//! Everything scalar lives in the field `K = Q(i, sqrt 2)` and is computed exactly;
//! floating point only appears in the dilogarithm and in the Lorentz spot checks.
//!
//! The modules build on each other bottom-up:
//!
//! - [`numfield`]: rationals, `Q(sqrt 2)` and `K`, automorphisms, embeddings, integrality.
//! - [`moebius`]: 2x2 matrices over `K` with an orientation flag, words, the named generators.
//! - [`geometry`]: planes in upper half-space, reflections, angles, the light-cone lift.
//! - [`polyhedra`]: the octahedron and cuboctahedron, face pairings, cusp annuli.
//! - [`kleinian`]: the groups `Gamma_n`, `Gamma_I`, integrality scans, the commensurator checks.
//! - [`cusp_moduli`]: cusp parameters and their `PGL_2(Q)` classes.
//! - [`bloch`]: pre-Bloch sums, the Bloch-Wigner function and the Borel regulator.
//! - [`tiling`]: the canonical-tiling coplanarity and convexity checks.
//! - [`cli`]: report assembly shared by the `commens` binary.
//!
//! ```
//! use commensurability::cusp_moduli::{mn_moduli, mutant_moduli, pgl2q_equivalent};
//! use commensurability::kleinian::MutationWord;
//!
//! let word: MutationWord = "0,2,2,0".parse().unwrap();
//! let (t1, _) = mutant_moduli(&word).unwrap();
//! assert_eq!(t1.to_string(), "i(2 + (44/5)√2)");
//! let (m1, _) = mn_moduli(3).unwrap();
//! assert!(!pgl2q_equivalent(&t1, &m1).unwrap());
//! ```

pub mod bloch;
pub mod cli;
pub mod cusp_moduli;
pub mod geometry;
pub mod kleinian;
pub mod moebius;
pub mod numfield;
pub mod polyhedra;
pub mod report;
pub mod tiling;

use thiserror::Error;

/// Errors raised by the exact routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("determinant {0} is not a square in K")]
    NotASquare(String),
    #[error("value {0} has no square root in Q(sqrt 2)")]
    NotInField(String),
    #[error("singular matrix")]
    Singular,
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("parse error at position {position}: unexpected `{token}`")]
    Parse { token: String, position: usize },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("undecided: {0}")]
    Undecided(String),
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
