//! Exact-arithmetic linear algebra for plectic filtered φ-modules.
//!
//! The crate builds finite-dimensional `Q`-vector spaces carrying `d`
//! commuting partial Frobenius operators, `d` partial filtration steps, and
//! optionally a symmetric bilinear form, and machine-checks the structural
//! statements these objects satisfy: subset-indexed filtration
//! distributivity, eigenspace–filtration splittings, slope bounds, weak
//! admissibility, and the rank-4 plectic/anti-plectic classification.
//!
//! Everything is exact: scalars are arbitrary-precision rationals, subspaces
//! are canonical reduced-row-echelon bases, and every verifier is a
//! tolerance-zero check backed by independent brute-force oracles in the
//! test suite.

pub mod complexes;
pub mod filtration;
pub mod fixtures;
pub mod matrix;
pub mod phi;
pub mod quadratic;
pub mod rational;
pub mod rng;
pub mod subsets;
pub mod subspace;
pub mod theorems;

pub use filtration::{
    is_distributive, lattice_closure, DistributivityReport, FiltrationError, GradedPiece,
    LatticeClosure, WeakIFiltration, DEFAULT_CLOSURE_CAP,
};
pub use matrix::{LinAlgError, Matrix};
pub use phi::{
    random_admissible_rank2, random_rank2, random_selfdual_rank2, scramble, slope_report,
    strictly_small_slope, tensor_induce, transport, PhiError, PlecticModule, Rank2FPhi,
    Rank2GenOptions, RootPair, SlopeReport, WeightData,
};
pub use rational::{
    format_rat, is_prime, parse_rat, p_power, quadratic_roots, rat, rat_int, valuation_of, Rat,
    ScalarError, Valuation,
};
pub use subsets::SubsetIndex;
pub use subspace::{eigenspace, generalized_eigenspace, kernel, QuotientMap, Subspace};
