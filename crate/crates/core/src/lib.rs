//! Structural balance for weighted signed networks.
//!
//! * [`graph`]: the [`SignedGraph`] type and every matrix derived from it
//!   (`L`, `L_rw`, `P`, `P_sym`, the doubled `W⁽²⁾`/`P⁽²⁾`).
//! * [`balance`]: exact classification into balanced, antibalanced, both or
//!   strictly unbalanced, switching and frustration.
//! * [`spectral`]: symmetric eigensolver, the spectral distances `d_b`/`d_a`,
//!   Perron vectors and perturbation estimates.
//! * [`dynamics`]: linear adjacency dynamics, signed random walks, the
//!   two-species walk and extended linear threshold dynamics.
//! * [`generate`]: seeded block models, ring lattices and trees.
//! * [`io`]: edge-list text format and trajectory CSV.
//! * [`verify`]: self-check suites used by the command-line tool.
//!
//! ```
//! use signbal::{balance, spectral, SignedGraph};
//!
//! let g = SignedGraph::new(3, [(0, 1, 1.0), (1, 2, -1.0), (0, 2, -1.0)]).unwrap();
//! assert_eq!(balance::classify(&g).verdict, balance::Verdict::Balanced);
//! let m = spectral::strict_unbalance_contraction(&g).unwrap();
//! assert!(m.d_b.abs() < 1e-12);
//! ```

#![allow(clippy::needless_range_loop)]

pub mod balance;
pub mod dynamics;
mod eigen;
pub mod generate;
pub mod graph;
pub mod io;
pub mod matrix;
pub mod spectral;
pub mod verify;

pub use balance::{BalanceClassification, Bipartition, Verdict};
pub use graph::{Edge, SignedGraph};
pub use matrix::DenseMatrix;
