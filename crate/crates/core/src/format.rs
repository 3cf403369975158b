//! JSON file formats.
//!
//! Matrices are written row by row as arrays of `[re, im]` pairs. Floats
//! are printed in shortest round-trip form, so reading a written file
//! reproduces every entry bit for bit.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grouprep::CayleyTable;
use crate::linalg::ComplexDenseMatrix;
use crate::solver::{BlockFamily, BlockSpec, GeneratorSet};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabeledMatrix {
    pub label: String,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

/// A labeled list of square matrices of a common dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct MatrixSetFile {
    pub schema_version: String,
    pub dimension: usize,
    pub generators: Vec<LabeledMatrix>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dimension: usize,
    pub multiplicity: usize,
    pub generators: Vec<LabeledMatrix>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct BlockSpecFile {
    pub schema_version: String,
    pub families: Vec<FamilyEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CayleyTableFile {
    pub schema_version: String,
    pub elements: Vec<String>,
    pub table: Vec<Vec<usize>>,
}

/// Summary of a `solve` run, printed to standard output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolveReport {
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub kernel_dims: Vec<usize>,
    pub residual_per_generator: BTreeMap<String, f64>,
    pub max_residual: Option<f64>,
    pub unitarity_residual: Option<f64>,
    pub columns_per_family: Vec<[usize; 2]>,
    pub tolerance_used: f64,
    pub verification_threshold: f64,
    pub timing_ms: f64,
}

pub fn matrix_to_rows(m: &ComplexDenseMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows())
        .map(|i| m.row(i).into_iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn matrix_from_rows(rows: &[Vec<[f64; 2]>]) -> Result<ComplexDenseMatrix> {
    let rows: Vec<Vec<Complex64>> = rows
        .iter()
        .map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
        .collect();
    ComplexDenseMatrix::from_rows(&rows)
}

fn schema_error(path: &Path, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

fn check_version(path: &Path, version: &str) -> Result<()> {
    if version != SCHEMA_VERSION {
        return Err(schema_error(
            path,
            format!("unsupported schemaVersion '{version}', expected '{SCHEMA_VERSION}'"),
        ));
    }
    Ok(())
}

fn square_matrix(path: &Path, what: &str, entry: &LabeledMatrix, dim: usize) -> Result<ComplexDenseMatrix> {
    if entry.matrix.len() != dim || entry.matrix.iter().any(|r| r.len() != dim) {
        return Err(schema_error(
            path,
            format!("{what} '{}' is not a {dim}x{dim} matrix", entry.label),
        ));
    }
    if entry.matrix.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(schema_error(
            path,
            format!("{what} '{}' has non-finite entries", entry.label),
        ));
    }
    matrix_from_rows(&entry.matrix).map_err(|e| schema_error(path, e.to_string()))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| schema_error(path, e.to_string()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("file types serialize");
    text.push('\n');
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

impl MatrixSetFile {
    pub fn from_generators(gens: &GeneratorSet) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            dimension: gens.dim(),
            generators: gens
                .labels()
                .iter()
                .zip(gens.matrices())
                .map(|(label, m)| LabeledMatrix {
                    label: label.clone(),
                    matrix: matrix_to_rows(m),
                })
                .collect(),
        }
    }

    /// Single-matrix form, used for transfer matrices.
    pub fn single(label: &str, m: &ComplexDenseMatrix) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            dimension: m.rows(),
            generators: vec![LabeledMatrix {
                label: label.into(),
                matrix: matrix_to_rows(m),
            }],
        }
    }

    /// Validates the schema; `path` is only used in error messages.
    pub fn to_generators(&self, path: &Path) -> Result<GeneratorSet> {
        check_version(path, &self.schema_version)?;
        if self.dimension == 0 {
            return Err(schema_error(path, "dimension must be positive"));
        }
        if self.generators.is_empty() {
            return Err(schema_error(path, "no generators"));
        }
        let matrices = self
            .generators
            .iter()
            .map(|g| square_matrix(path, "generator", g, self.dimension))
            .collect::<Result<Vec<_>>>()?;
        let labels = self.generators.iter().map(|g| g.label.clone()).collect();
        GeneratorSet::new(labels, matrices).map_err(|e| schema_error(path, e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        read_json(path)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }
}

impl BlockSpecFile {
    pub fn from_spec(spec: &BlockSpec, labels: &[String], names: Option<&[String]>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            families: spec
                .families()
                .iter()
                .enumerate()
                .map(|(b, f)| FamilyEntry {
                    name: names.and_then(|n| n.get(b).cloned()),
                    dimension: f.dim(),
                    multiplicity: f.multiplicity(),
                    generators: labels
                        .iter()
                        .zip(f.blocks())
                        .map(|(label, m)| LabeledMatrix {
                            label: label.clone(),
                            matrix: matrix_to_rows(m),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    /// Validates the schema and checks that every family lists exactly the
    /// generator labels `labels`, in order.
    pub fn to_spec(&self, path: &Path, labels: &[String]) -> Result<BlockSpec> {
        check_version(path, &self.schema_version)?;
        if self.families.is_empty() {
            return Err(schema_error(path, "no block families"));
        }
        let mut families = Vec::with_capacity(self.families.len());
        for (b, fam) in self.families.iter().enumerate() {
            let found: Vec<&str> = fam.generators.iter().map(|g| g.label.as_str()).collect();
            if found != labels.iter().map(String::as_str).collect::<Vec<_>>() {
                return Err(Error::InvalidInput(format!(
                    "block family {} lists generators [{}], generator file has [{}]",
                    b + 1,
                    found.join(", "),
                    labels.join(", ")
                )));
            }
            if fam.dimension == 0 || fam.multiplicity == 0 {
                return Err(schema_error(
                    path,
                    format!("block family {} needs positive dimension and multiplicity", b + 1),
                ));
            }
            let blocks = fam
                .generators
                .iter()
                .map(|g| square_matrix(path, &format!("block family {} generator", b + 1), g, fam.dimension))
                .collect::<Result<Vec<_>>>()?;
            families.push(BlockFamily::new(fam.multiplicity, blocks)?);
        }
        BlockSpec::new(families)
    }

    pub fn read(path: &Path) -> Result<Self> {
        read_json(path)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }
}

impl CayleyTableFile {
    pub fn from_table(t: &CayleyTable) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            elements: t.elements().to_vec(),
            table: t.rows().to_vec(),
        }
    }

    pub fn to_table(&self, path: &Path) -> Result<CayleyTable> {
        check_version(path, &self.schema_version)?;
        CayleyTable::new(self.elements.clone(), self.table.clone())
    }

    pub fn read(path: &Path) -> Result<Self> {
        read_json(path)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }
}
