//! Exact penalized least-squares regression trees on integer lattices.
//!
//! The crate fits piecewise-polynomial functions to noisy data on
//! d-dimensional lattices by computing globally optimal decision trees with
//! bottom-up dynamic programming, over two partition families:
//!
//! * recursive dyadic partitions (every split at the axis midpoint), and
//! * hierarchical partitions (guillotine splits at arbitrary positions).
//!
//! Around the solvers it provides a brute-force enumeration oracle for tiny
//! lattices, constructive partition-refinement algorithms, total-variation
//! functionals with their partitioning schemes, a Monte-Carlo simulation
//! harness, and text/JSON/CSV interchange formats.

pub mod error;
pub mod io;
pub mod lattice;
pub mod oracle;
pub mod polyfit;
pub mod refine;
pub mod simlab;
pub mod solver;
pub mod variation;

pub use error::{Error, Result};
pub use lattice::{is_hierarchical, is_rdp, Family, LatticeArray, Partition, Rect};
pub use polyfit::{basis_dim, basis_value, fit_rect, project_partition, FitResult, PolyBasis, RectStats};
pub use solver::{opt_value, reconstruct, solve, solve_tables, DpTables};
