//! Explicit transfer matrices for the simultaneous block diagonalization
//! of finite sets of unitary matrices with known irreducible block
//! structure.
//!
//! Given generators `G_1, ..., G_N` and block families `(B^b_g, d_b, q_b)`,
//! [`assemble_transfer_matrix`] returns a unitary `S` with
//! `S^H G_g S = ⊕_b (B^b_g)^{⊕ q_b}` for every `g`.

pub mod cli;
pub mod error;
pub mod format;
pub mod grouprep;
pub mod linalg;
pub mod solver;

pub use error::{Error, Result};
pub use grouprep::{builtin_example_d8, CayleyTable, CharacterData, D8Example};
pub use linalg::{ComplexDenseMatrix, ComplexVector};
pub use num_complex::Complex64;
pub use solver::{
    assemble_block_diagonal, assemble_transfer_matrix, block_kernel, build_block_operator, build_stacked_operator,
    kernel_basis, verify_transfer, BlockFamily, BlockSpec, GeneratorSet, KernelStrategy, SolveOptions, TransferResult,
    VerificationReport,
};
