#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use sbd::{
    assemble_block_diagonal, BlockFamily, BlockSpec, Complex64, ComplexDenseMatrix, ComplexVector, GeneratorSet,
};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut StdRng, rows: usize, cols: usize) -> ComplexDenseMatrix {
    ComplexDenseMatrix::from_fn(rows, cols, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

fn to_na(m: &ComplexDenseMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j))
}

fn from_na(m: &DMatrix<Complex64>) -> ComplexDenseMatrix {
    ComplexDenseMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Haar-ish random unitary: Q factor of a complex Gaussian matrix (nalgebra QR).
pub fn random_unitary(rng: &mut StdRng, n: usize) -> ComplexDenseMatrix {
    let a = to_na(&random_matrix(rng, n, n));
    from_na(&a.qr().q())
}

/// Singular values computed by nalgebra, sorted descending.
pub fn reference_singular_values(m: &ComplexDenseMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = to_na(m).singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Generators `U0 B_g U0^H` built from a known block form.
pub fn scramble(spec: &BlockSpec, labels: &[&str], u0: &ComplexDenseMatrix) -> GeneratorSet {
    let ud = u0.dagger();
    let matrices = (0..spec.num_generators())
        .map(|g| &(u0 * &assemble_block_diagonal(spec, g)) * &ud)
        .collect();
    GeneratorSet::new(labels.iter().map(|s| s.to_string()).collect(), matrices).unwrap()
}

fn scalar(z: Complex64) -> ComplexDenseMatrix {
    ComplexDenseMatrix::diagonal(&[z])
}

/// `Z_4 = <a>` with its four one-dimensional irreps `a -> i^k`.
pub fn z4_blocks() -> BlockSpec {
    let i = c(0.0, 1.0);
    BlockSpec::new(
        (0..4)
            .map(|k| BlockFamily::new(1, vec![scalar(i.powu(k))]).unwrap())
            .collect(),
    )
    .unwrap()
}

/// Projector onto the span of orthonormal vectors.
pub fn span_projector(vectors: &[ComplexVector]) -> ComplexDenseMatrix {
    let dim = vectors[0].dim();
    let q = ComplexDenseMatrix::from_columns(dim, vectors).unwrap();
    sbd::linalg::projector(&q)
}

/// Max-norm distance between the projectors onto two orthonormal sets.
pub fn span_distance(a: &[ComplexVector], b: &[ComplexVector]) -> f64 {
    (&span_projector(a) - &span_projector(b)).max_norm()
}

/// Orthonormalizes a list of vectors (they are assumed independent).
pub fn orthonormal(vectors: &[ComplexVector]) -> Vec<ComplexVector> {
    let q = ComplexDenseMatrix::from_columns(vectors[0].dim(), vectors).unwrap();
    let q = sbd::linalg::orthonormalize_columns(&q, 1e-12);
    (0..q.cols())
        .map(|j| ComplexVector::new(q.column(j).to_vec()))
        .collect()
}

/// Kernel vectors listed for the D8 example: `w^1 .. w^4`.
pub fn d8_one_dim_kernel_vectors() -> Vec<ComplexVector> {
    vec![
        ComplexVector::from_real(&[1., 1., 1., 1., 1., 1., 1., 1.]),
        ComplexVector::from_real(&[1., 1., 1., 1., -1., -1., -1., -1.]),
        ComplexVector::from_real(&[-1., 1., -1., 1., -1., 1., -1., 1.]),
        ComplexVector::from_real(&[1., -1., 1., -1., -1., 1., -1., 1.]),
    ]
}

/// `w^5_1, w^5_2` for the two copies of the two-dimensional irrep.
pub fn d8_two_dim_kernel_vectors() -> Vec<ComplexVector> {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    let w1 = vec![-i, o, i, -o, z, z, z, z, z, z, z, z, -i, -o, i, o];
    let w2 = vec![z, z, z, z, -i, o, i, -o, -i, -o, i, o, z, z, z, z];
    vec![ComplexVector::new(w1), ComplexVector::new(w2)]
}

/// Reference D8 generator matrices: row `r` has its 1 in column `perm[r]`.
pub fn d8_reference_generators() -> (ComplexDenseMatrix, ComplexDenseMatrix) {
    let from_perm = |perm: [usize; 8]| {
        ComplexDenseMatrix::from_fn(8, 8, |r, col| if perm[r] == col { c(1.0, 0.0) } else { c(0.0, 0.0) })
    };
    (from_perm([1, 2, 3, 0, 5, 6, 7, 4]), from_perm([4, 7, 6, 5, 0, 3, 2, 1]))
}
