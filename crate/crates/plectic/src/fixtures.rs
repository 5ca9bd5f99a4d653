//! Canonical small instances used across tests, docs, and the CLI examples.

use crate::matrix::Matrix;
use crate::phi::{tensor_induce, PlecticModule, Rank2FPhi};
use crate::rational::rat_int;
use crate::subspace::Subspace;

/// `p = 5`, `k = 2`, `t = 0`, Frobenius `diag(1, 125)`, filtration line
/// spanned by `e1 + e2`. Weakly admissible with slopes `(0, 3)`.
pub fn canonical_e1() -> Rank2FPhi {
    Rank2FPhi::new(
        5,
        2,
        0,
        Matrix::diagonal(&[rat_int(1), rat_int(125)]),
        Subspace::line(vec![rat_int(1), rat_int(1)]),
    )
    .expect("fixture is valid")
}

/// Same weight as `canonical_e1` but Frobenius `diag(2, 250)`.
pub fn canonical_e2() -> Rank2FPhi {
    Rank2FPhi::new(
        5,
        2,
        0,
        Matrix::diagonal(&[rat_int(2), rat_int(250)]),
        Subspace::line(vec![rat_int(1), rat_int(1)]),
    )
    .expect("fixture is valid")
}

/// The rank-4 tensor induction of `canonical_e1` and `canonical_e2`:
/// `phi_1 = diag(1,1,125,125)`, `phi_2 = diag(2,250,2,250)`,
/// `Fil_1^+ = span{(1,0,1,0),(0,1,0,1)}`, `Fil_2^+ = span{(1,1,0,0),(0,0,1,1)}`.
pub fn canonical_t12() -> PlecticModule {
    tensor_induce(&[canonical_e1(), canonical_e2()]).expect("fixture is valid")
}
