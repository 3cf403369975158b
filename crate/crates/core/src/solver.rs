//! Transfer-matrix construction for simultaneous block diagonalization.
//!
//! For every block family `b` the intertwiner equations
//! `G_g W = W B^b_g` are vectorized into `M^b_g vec(W) = 0` with
//! `M^b_g = (I_{d_b} ⊗ G_g) - (B^b_g^T ⊗ I_D)`. The common kernel of all
//! `M^b_g` has dimension `q_b`; each kernel vector reshapes into `d_b`
//! mutually orthogonal columns of the transfer matrix `S`, and distinct
//! kernel vectors of one family give orthogonal column groups.

use std::collections::HashSet;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    self, gram, kron, max_dev_from_identity, unitarity_residual, unvec, ComplexDenseMatrix, ComplexVector,
};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Ordered, labeled set of `D x D` matrices `G_1, ..., G_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSet {
    dim: usize,
    labels: Vec<String>,
    matrices: Vec<ComplexDenseMatrix>,
}

impl GeneratorSet {
    /// Validates shapes and label uniqueness. Unitarity is checked by the
    /// solver against its configured tolerance.
    pub fn new(labels: Vec<String>, matrices: Vec<ComplexDenseMatrix>) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::InvalidInput("generator set is empty".into()));
        }
        if labels.len() != matrices.len() {
            return Err(Error::InvalidInput(format!(
                "{} labels for {} matrices",
                labels.len(),
                matrices.len()
            )));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::InvalidInput(format!("duplicate generator label '{dup}'")));
        }
        let dim = matrices[0].rows();
        if dim == 0 {
            return Err(Error::InvalidInput("generators must have positive dimension".into()));
        }
        for (label, m) in labels.iter().zip(&matrices) {
            if m.shape() != (dim, dim) {
                return Err(Error::DimensionMismatch(format!(
                    "generator '{label}' is {}x{}, expected {dim}x{dim}",
                    m.rows(),
                    m.cols()
                )));
            }
            if !m.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "generator '{label}' has non-finite entries"
                )));
            }
        }
        Ok(Self { dim, labels, matrices })
    }

    /// Labels `g1, g2, ...`.
    pub fn unlabeled(matrices: Vec<ComplexDenseMatrix>) -> Result<Self> {
        let labels = (1..=matrices.len()).map(|i| format!("g{i}")).collect();
        Self::new(labels, matrices)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrices(&self) -> &[ComplexDenseMatrix] {
        &self.matrices
    }

    pub fn matrix(&self, g: usize) -> &ComplexDenseMatrix {
        &self.matrices[g]
    }

    pub fn label(&self, g: usize) -> &str {
        &self.labels[g]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn check_unitary(&self, tol: f64) -> Result<()> {
        for (label, m) in self.labels.iter().zip(&self.matrices) {
            let residual = unitarity_residual(m).unwrap_or(f64::INFINITY);
            if residual > tol {
                return Err(Error::NonUnitaryInput {
                    what: format!("generator '{label}'"),
                    residual,
                    tol,
                });
            }
        }
        Ok(())
    }
}

/// One irreducible block `B^b_g` (one matrix per generator), its dimension
/// and multiplicity. Degenerate copies are taken literally identical.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockFamily {
    dim: usize,
    multiplicity: usize,
    blocks: Vec<ComplexDenseMatrix>,
}

impl BlockFamily {
    pub fn new(multiplicity: usize, blocks: Vec<ComplexDenseMatrix>) -> Result<Self> {
        if multiplicity == 0 {
            return Err(Error::InvalidInput("block multiplicity must be positive".into()));
        }
        let dim = blocks
            .first()
            .map(ComplexDenseMatrix::rows)
            .ok_or_else(|| Error::InvalidInput("block family has no generator blocks".into()))?;
        if dim == 0 {
            return Err(Error::InvalidInput("blocks must have positive dimension".into()));
        }
        for (g, b) in blocks.iter().enumerate() {
            if b.shape() != (dim, dim) {
                return Err(Error::DimensionMismatch(format!(
                    "block for generator {g} is {}x{}, expected {dim}x{dim}",
                    b.rows(),
                    b.cols()
                )));
            }
            if !b.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "block for generator {g} has non-finite entries"
                )));
            }
        }
        Ok(Self {
            dim,
            multiplicity,
            blocks,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn multiplicity(&self) -> usize {
        self.multiplicity
    }

    pub fn blocks(&self) -> &[ComplexDenseMatrix] {
        &self.blocks
    }

    pub fn block(&self, g: usize) -> &ComplexDenseMatrix {
        &self.blocks[g]
    }

    pub fn with_multiplicity(&self, multiplicity: usize) -> Result<Self> {
        Self::new(multiplicity, self.blocks.clone())
    }
}

/// Ordered block families in standard form: family 1's copies first, then
/// family 2's, and so on.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSpec {
    families: Vec<BlockFamily>,
}

impl BlockSpec {
    pub fn new(families: Vec<BlockFamily>) -> Result<Self> {
        let n = families
            .first()
            .map(|f| f.blocks.len())
            .ok_or_else(|| Error::InvalidInput("block spec has no families".into()))?;
        for (b, f) in families.iter().enumerate() {
            if f.blocks.len() != n {
                return Err(Error::InvalidInput(format!(
                    "block family {} has {} generator blocks, family 1 has {n}",
                    b + 1,
                    f.blocks.len()
                )));
            }
        }
        Ok(Self { families })
    }

    pub fn families(&self) -> &[BlockFamily] {
        &self.families
    }

    pub fn family(&self, b: usize) -> &BlockFamily {
        &self.families[b]
    }

    pub fn num_generators(&self) -> usize {
        self.families[0].blocks.len()
    }

    /// `sum_b q_b d_b`.
    pub fn total_dim(&self) -> usize {
        self.families.iter().map(|f| f.multiplicity * f.dim).sum()
    }

    /// `(offset, length)` of each family's columns in the transfer matrix.
    pub fn column_ranges(&self) -> Vec<(usize, usize)> {
        let mut offset = 0;
        self.families
            .iter()
            .map(|f| {
                let len = f.multiplicity * f.dim;
                let r = (offset, len);
                offset += len;
                r
            })
            .collect()
    }

    /// Replaces one family, keeping the rest.
    pub fn with_family(&self, b: usize, family: BlockFamily) -> Result<Self> {
        let mut families = self.families.clone();
        families[b] = family;
        Self::new(families)
    }

    pub fn check_against(&self, gens: &GeneratorSet) -> Result<()> {
        if self.num_generators() != gens.len() {
            return Err(Error::InvalidInput(format!(
                "block spec has {} generator blocks per family, generator set has {}",
                self.num_generators(),
                gens.len()
            )));
        }
        let found = self.total_dim();
        if found != gens.dim() {
            return Err(Error::SpecDimensionError {
                expected: gens.dim(),
                found,
            });
        }
        Ok(())
    }

    pub fn check_unitary(&self, tol: f64) -> Result<()> {
        for (b, f) in self.families.iter().enumerate() {
            for (g, m) in f.blocks.iter().enumerate() {
                let residual = unitarity_residual(m).unwrap_or(f64::INFINITY);
                if residual > tol {
                    return Err(Error::NonUnitaryInput {
                        what: format!("block family {} generator {}", b + 1, g + 1),
                        residual,
                        tol,
                    });
                }
            }
        }
        Ok(())
    }
}

/// How the common kernel of `M^b_1, ..., M^b_N` is computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum KernelStrategy {
    /// Nullspace of the vertically stacked `M^b`.
    #[default]
    Stacked,
    /// Nullspace of `M^b_1`, then successively restrict each further
    /// `M^b_g` to the running kernel.
    Incremental,
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    /// Relative tolerance for rank cuts and unitarity checks.
    pub tol: f64,
    pub strategy: KernelStrategy,
    /// Solve block families on the rayon pool.
    pub parallel: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOLERANCE,
            strategy: KernelStrategy::Stacked,
            parallel: true,
        }
    }
}

impl SolveOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }

    pub fn strategy(mut self, strategy: KernelStrategy) -> Self {
        self.strategy = strategy;
        self
    }

    /// Residual threshold for accepting a transfer matrix.
    pub fn verification_threshold(&self) -> f64 {
        10.0 * self.tol
    }
}

#[derive(Clone, Debug)]
pub struct TransferResult {
    /// Unitary transfer matrix with `S^H G_g S = B_g`.
    pub s: ComplexDenseMatrix,
    pub kernel_dims: Vec<usize>,
    /// Orthonormal kernel basis per family, phase-canonicalized.
    pub kernel_vectors: Vec<Vec<ComplexVector>>,
    pub block_column_ranges: Vec<(usize, usize)>,
    /// Max-norm of `S^H G_g S - B_g` per generator.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// Max-norm of `S^H S - I`.
    pub orthogonality_residual: f64,
}

impl TransferResult {
    pub fn passes(&self, threshold: f64) -> bool {
        self.max_residual <= threshold && self.orthogonality_residual <= threshold
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub per_generator: Vec<f64>,
    pub max_residual: f64,
    pub unitarity_residual: f64,
}

fn check_generator_index(gens: &GeneratorSet, fam: &BlockFamily, g: usize) -> Result<()> {
    if g >= gens.len() || g >= fam.blocks.len() {
        return Err(Error::DimensionMismatch(format!(
            "generator index {g} out of range ({} generators, {} blocks)",
            gens.len(),
            fam.blocks.len()
        )));
    }
    Ok(())
}

/// `M^b_g = (I_{d_b} ⊗ G_g) - (B^b_g^T ⊗ I_D)`, of size `(D d_b) x (D d_b)`.
pub fn build_block_operator(gens: &GeneratorSet, fam: &BlockFamily, g: usize) -> Result<ComplexDenseMatrix> {
    check_generator_index(gens, fam, g)?;
    let left = kron(&ComplexDenseMatrix::identity(fam.dim), gens.matrix(g));
    let right = kron(&fam.block(g).transpose(), &ComplexDenseMatrix::identity(gens.dim()));
    left.try_sub(&right)
}

/// Vertical stack of `M^b_1, ..., M^b_N`.
pub fn build_stacked_operator(gens: &GeneratorSet, fam: &BlockFamily) -> Result<ComplexDenseMatrix> {
    if fam.blocks.len() != gens.len() {
        return Err(Error::DimensionMismatch(format!(
            "family has {} generator blocks, generator set has {}",
            fam.blocks.len(),
            gens.len()
        )));
    }
    let parts = (0..gens.len())
        .map(|g| build_block_operator(gens, fam, g))
        .collect::<Result<Vec<_>>>()?;
    ComplexDenseMatrix::vstack(&parts)
}

/// Orthonormal basis of `ker M^b` without checking its size against `q_b`.
///
/// Each vector is rotated so that its first entry of modulus above `tol`
/// is real and positive.
pub fn kernel_basis(
    gens: &GeneratorSet,
    fam: &BlockFamily,
    tol: f64,
    strategy: KernelStrategy,
) -> Result<Vec<ComplexVector>> {
    let basis = match strategy {
        KernelStrategy::Stacked => {
            let m = build_stacked_operator(gens, fam)?;
            linalg::orthonormal_nullspace(&m, tol)
        }
        KernelStrategy::Incremental => incremental_kernel(gens, fam, tol)?,
    };
    Ok(basis.iter().map(|w| canonical_phase(w, tol)).collect())
}

fn incremental_kernel(gens: &GeneratorSet, fam: &BlockFamily, tol: f64) -> Result<Vec<ComplexVector>> {
    let ops = (0..gens.len())
        .map(|g| build_block_operator(gens, fam, g))
        .collect::<Result<Vec<_>>>()?;
    let scale = ops.iter().map(|m| m.frobenius_norm().powi(2)).sum::<f64>().sqrt();
    let cutoff = tol * scale;

    let n = gens.dim() * fam.dim;
    let mut kernel = ComplexDenseMatrix::identity(n);
    for m in &ops {
        if kernel.cols() == 0 {
            break;
        }
        let restricted = m.matmul(&kernel)?;
        let y = linalg::nullspace_below(&restricted, cutoff);
        let y = ComplexDenseMatrix::from_columns(kernel.cols(), &y)?;
        kernel = kernel.matmul(&y)?;
    }
    Ok((0..kernel.cols())
        .map(|j| ComplexVector::new(kernel.column(j).to_vec()))
        .collect())
}

fn canonical_phase(w: &ComplexVector, tol: f64) -> ComplexVector {
    match w.as_slice().iter().find(|z| z.norm() > tol) {
        Some(z) => w.scale(z.conj() / z.norm()),
        None => w.clone(),
    }
}

fn block_kernel_inner(
    gens: &GeneratorSet,
    fam: &BlockFamily,
    family: usize,
    tol: f64,
    strategy: KernelStrategy,
) -> Result<Vec<ComplexVector>> {
    let basis = kernel_basis(gens, fam, tol, strategy)?;
    if basis.len() != fam.multiplicity {
        return Err(Error::KernelDimensionMismatch {
            family,
            dim: fam.dim,
            expected: fam.multiplicity,
            observed: basis.len(),
        });
    }
    Ok(basis)
}

/// Orthonormal basis of `ker M^b` (stacked strategy), which must have
/// exactly `q_b` elements. A mismatch is reported against family index 0;
/// [`assemble_transfer_matrix`] reports the real index.
pub fn block_kernel(gens: &GeneratorSet, fam: &BlockFamily, tol: f64) -> Result<Vec<ComplexVector>> {
    block_kernel_inner(gens, fam, 0, tol, KernelStrategy::Stacked)
}

/// `B_g = ⊕_b (B^b_g)^{⊕ q_b}`.
pub fn assemble_block_diagonal(spec: &BlockSpec, g: usize) -> ComplexDenseMatrix {
    let blocks: Vec<&ComplexDenseMatrix> = spec
        .families
        .iter()
        .flat_map(|f| std::iter::repeat_n(&f.blocks[g], f.multiplicity))
        .collect();
    ComplexDenseMatrix::direct_sum(&blocks)
}

/// Computes the unitary transfer matrix `S` with `S^H G_g S = B_g` for all `g`.
pub fn assemble_transfer_matrix(gens: &GeneratorSet, spec: &BlockSpec, opts: &SolveOptions) -> Result<TransferResult> {
    spec.check_against(gens)?;
    gens.check_unitary(opts.tol)?;
    spec.check_unitary(opts.tol)?;

    let solve = |(b, fam): (usize, &BlockFamily)| block_kernel_inner(gens, fam, b, opts.tol, opts.strategy);
    let kernels: Vec<Vec<ComplexVector>> = if opts.parallel {
        spec.families.par_iter().enumerate().map(solve).collect::<Result<_>>()?
    } else {
        spec.families.iter().enumerate().map(solve).collect::<Result<_>>()?
    };

    let d = gens.dim();
    let mut groups = Vec::with_capacity(d);
    for w in kernels.iter().flatten() {
        groups.push(unvec(w, d)?);
    }
    let mut s = ComplexDenseMatrix::hstack(&groups)?;
    normalize_columns(&mut s);

    let report = verify_transfer(&s, gens, spec)?;
    Ok(TransferResult {
        kernel_dims: kernels.iter().map(Vec::len).collect(),
        kernel_vectors: kernels,
        block_column_ranges: spec.column_ranges(),
        residuals: report.per_generator,
        max_residual: report.max_residual,
        orthogonality_residual: report.unitarity_residual,
        s,
    })
}

fn normalize_columns(s: &mut ComplexDenseMatrix) {
    for j in 0..s.cols() {
        let norm = s.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for i in 0..s.rows() {
                let z = s.get(i, j);
                s.set(i, j, z / Complex64::new(norm, 0.0));
            }
        }
    }
}

/// Residuals `||S^H G_g S - B_g||_max` per generator, plus `||S^H S - I||_max`.
pub fn verify_transfer(s: &ComplexDenseMatrix, gens: &GeneratorSet, spec: &BlockSpec) -> Result<VerificationReport> {
    let d = gens.dim();
    if s.shape() != (d, d) {
        return Err(Error::DimensionMismatch(format!(
            "transfer matrix is {}x{}, generators are {d}x{d}",
            s.rows(),
            s.cols()
        )));
    }
    spec.check_against(gens)?;
    let sh = s.dagger();
    let per_generator = (0..gens.len())
        .map(|g| {
            let rotated = &(&sh * gens.matrix(g)) * s;
            (&rotated - &assemble_block_diagonal(spec, g)).max_norm()
        })
        .collect::<Vec<_>>();
    let max_residual = per_generator.iter().copied().fold(0.0, f64::max);
    Ok(VerificationReport {
        per_generator,
        max_residual,
        unitarity_residual: max_dev_from_identity(&gram(s)),
    })
}
