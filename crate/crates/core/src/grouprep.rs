//! Finite-group inputs for the solver: regular representations from
//! Cayley tables, block specs from irrep generator matrices, and
//! multiplicities from character tables.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexDenseMatrix, ONE, ZERO};
use crate::solver::{BlockFamily, BlockSpec, GeneratorSet};

/// Multiplication table of a finite group: `table[i][j]` is the index of
/// `elements[i] · elements[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CayleyTable {
    elements: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
}

impl CayleyTable {
    /// Validates the group axioms: Latin square, two-sided identity and
    /// associativity (O(|G|^3)).
    pub fn new(elements: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = elements.len();
        if n == 0 {
            return Err(Error::InvalidCayleyTable("group has no elements".into()));
        }
        for (i, e) in elements.iter().enumerate() {
            if elements[..i].contains(e) {
                return Err(Error::InvalidCayleyTable(format!("duplicate element label '{e}'")));
            }
        }
        if table.len() != n {
            return Err(Error::InvalidCayleyTable(format!(
                "{} rows for {n} elements",
                table.len()
            )));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidCayleyTable(format!(
                    "row {i} ('{}') has {} entries, expected {n}",
                    elements[i],
                    row.len()
                )));
            }
            if let Some(&k) = row.iter().find(|&&k| k >= n) {
                return Err(Error::InvalidCayleyTable(format!(
                    "row {i} ('{}') contains out-of-range index {k}",
                    elements[i]
                )));
            }
            if let Some(k) = first_repeat(row.iter().copied(), n) {
                return Err(Error::InvalidCayleyTable(format!(
                    "row {i} ('{}') is not a permutation: element '{}' appears twice",
                    elements[i], elements[k]
                )));
            }
        }
        for j in 0..n {
            if let Some(k) = first_repeat(table.iter().map(|r| r[j]), n) {
                return Err(Error::InvalidCayleyTable(format!(
                    "column {j} ('{}') is not a permutation: element '{}' appears twice",
                    elements[j], elements[k]
                )));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|j| table[e][j] == j && table[j][e] == j))
            .ok_or_else(|| Error::InvalidCayleyTable("no two-sided identity element".into()))?;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if table[table[i][j]][k] != table[i][table[j][k]] {
                        return Err(Error::InvalidCayleyTable(format!(
                            "associativity fails for ('{}', '{}', '{}')",
                            elements[i], elements[j], elements[k]
                        )));
                    }
                }
            }
        }
        Ok(Self {
            elements,
            table,
            identity,
        })
    }

    /// Builds and validates a table from a product on element indices.
    pub fn from_product(elements: Vec<String>, product: impl Fn(usize, usize) -> usize) -> Result<Self> {
        let n = elements.len();
        let table = (0..n).map(|i| (0..n).map(|j| product(i, j)).collect()).collect();
        Self::new(elements, table)
    }

    /// Cyclic group `Z_n` with elements `e, a, a^2, ...`.
    pub fn cyclic(n: usize) -> Result<Self> {
        let elements = (0..n)
            .map(|k| match k {
                0 => "e".to_string(),
                1 => "a".to_string(),
                _ => format!("a{k}"),
            })
            .collect();
        Self::from_product(elements, |i, j| (i + j) % n)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn identity_index(&self) -> usize {
        self.identity
    }

    pub fn product(&self, i: usize, j: usize) -> usize {
        self.table[i][j]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.elements
            .iter()
            .position(|e| e == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }
}

fn first_repeat(mut values: impl Iterator<Item = usize>, n: usize) -> Option<usize> {
    let mut seen = vec![false; n];
    values.find(|&v| std::mem::replace(&mut seen[v], true))
}

/// Matrix layout of the left-regular action `h ↦ g·h`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RegularConvention {
    /// `M(g)[index(h), index(g·h)] = 1`: the permutation acts on row
    /// vectors. This is the layout of the D8 reference matrices. Note that
    /// `M(g) M(h) = M(h·g)`.
    #[default]
    Row,
    /// `M(g)[index(g·h), index(h)] = 1`: the permutation acts on column
    /// vectors, so `M(g) M(h) = M(g·h)`. Equal to the transpose of `Row`.
    Column,
}

/// Permutation matrices of the left-regular action for the given
/// generator labels, in the basis order of `t.elements()`, using
/// [`RegularConvention::Row`].
pub fn regular_representation(t: &CayleyTable, generator_labels: &[&str]) -> Result<GeneratorSet> {
    regular_representation_with(t, generator_labels, RegularConvention::Row)
}

pub fn regular_representation_with(
    t: &CayleyTable,
    generator_labels: &[&str],
    convention: RegularConvention,
) -> Result<GeneratorSet> {
    let n = t.order();
    let mut matrices = Vec::with_capacity(generator_labels.len());
    for label in generator_labels {
        let g = t.index_of(label)?;
        let mut m = ComplexDenseMatrix::zeros(n, n);
        for h in 0..n {
            let gh = t.product(g, h);
            match convention {
                RegularConvention::Row => m.set(h, gh, ONE),
                RegularConvention::Column => m.set(gh, h, ONE),
            }
        }
        matrices.push(m);
    }
    GeneratorSet::new(generator_labels.iter().map(|s| s.to_string()).collect(), matrices)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConjugacyClass {
    pub representative: String,
    pub size: usize,
}

/// Character table: one row of class values per irrep.
#[derive(Clone, Debug, PartialEq)]
pub struct CharacterData {
    classes: Vec<ConjugacyClass>,
    irrep_names: Vec<String>,
    characters: Vec<Vec<Complex64>>,
    irrep_dims: Vec<usize>,
}

const CHARACTER_TOL: f64 = 1e-8;

impl CharacterData {
    /// The first class must be the identity class, whose character values
    /// are the irrep dimensions.
    pub fn new(
        classes: Vec<ConjugacyClass>,
        irrep_names: Vec<String>,
        characters: Vec<Vec<Complex64>>,
        irrep_dims: Vec<usize>,
    ) -> Result<Self> {
        if classes.is_empty() || characters.is_empty() {
            return Err(Error::InconsistentCharacters("empty character table".into()));
        }
        if classes[0].size != 1 {
            return Err(Error::InconsistentCharacters(format!(
                "first class '{}' has size {}, the identity class has size 1",
                classes[0].representative, classes[0].size
            )));
        }
        if irrep_names.len() != characters.len() || irrep_dims.len() != characters.len() {
            return Err(Error::InconsistentCharacters(format!(
                "{} names and {} dimensions for {} irreps",
                irrep_names.len(),
                irrep_dims.len(),
                characters.len()
            )));
        }
        for (name, (row, &dim)) in irrep_names.iter().zip(characters.iter().zip(&irrep_dims)) {
            if row.len() != classes.len() {
                return Err(Error::InconsistentCharacters(format!(
                    "irrep '{name}' has {} values for {} classes",
                    row.len(),
                    classes.len()
                )));
            }
            if (row[0] - Complex64::new(dim as f64, 0.0)).norm() > CHARACTER_TOL {
                return Err(Error::InconsistentCharacters(format!(
                    "irrep '{name}': character at identity is {}, dimension is {dim}",
                    row[0]
                )));
            }
        }
        Ok(Self {
            classes,
            irrep_names,
            characters,
            irrep_dims,
        })
    }

    pub fn group_order(&self) -> usize {
        self.classes.iter().map(|c| c.size).sum()
    }

    pub fn classes(&self) -> &[ConjugacyClass] {
        &self.classes
    }

    pub fn irrep_names(&self) -> &[String] {
        &self.irrep_names
    }

    pub fn irrep_dims(&self) -> &[usize] {
        &self.irrep_dims
    }

    pub fn characters(&self) -> &[Vec<Complex64>] {
        &self.characters
    }

    /// `sum dim^2 == |G|`.
    pub fn is_complete(&self) -> bool {
        self.irrep_dims.iter().map(|d| d * d).sum::<usize>() == self.group_order()
    }
}

/// Multiplicity of every irrep in a representation with class character
/// values `chi`: `q_b = (1/|G|) sum_c |c| conj(chi_b(c)) chi(c)`.
pub fn multiplicities(cd: &CharacterData, chi: &[Complex64]) -> Result<Vec<usize>> {
    if chi.len() != cd.classes.len() {
        return Err(Error::InconsistentCharacters(format!(
            "character has {} values for {} classes",
            chi.len(),
            cd.classes.len()
        )));
    }
    let order = cd.group_order() as f64;
    cd.characters
        .iter()
        .zip(&cd.irrep_names)
        .map(|(row, name)| {
            let q: Complex64 = row
                .iter()
                .zip(chi)
                .zip(&cd.classes)
                .map(|((x, y), c)| x.conj() * y * c.size as f64)
                .sum::<Complex64>()
                / order;
            let rounded = q.re.round();
            if (q - Complex64::new(rounded, 0.0)).norm() > CHARACTER_TOL || rounded < 0.0 {
                return Err(Error::InconsistentCharacters(format!(
                    "multiplicity of '{name}' evaluates to {q}, not a non-negative integer"
                )));
            }
            Ok(rounded as usize)
        })
        .collect()
}

/// Multiplicities of the irreps in the regular representation, whose
/// character is `|G|` at the identity and zero elsewhere.
pub fn multiplicities_in_regular(cd: &CharacterData) -> Result<Vec<usize>> {
    let mut chi = vec![ZERO; cd.classes.len()];
    chi[0] = Complex64::new(cd.group_order() as f64, 0.0);
    multiplicities(cd, &chi)
}

/// One block family per irrep, in the given order.
pub fn blockspec_from_irreps(
    irrep_generators: &[Vec<ComplexDenseMatrix>],
    multiplicities: &[usize],
    expected_dim: Option<usize>,
) -> Result<BlockSpec> {
    if irrep_generators.len() != multiplicities.len() {
        return Err(Error::InvalidInput(format!(
            "{} irreps but {} multiplicities",
            irrep_generators.len(),
            multiplicities.len()
        )));
    }
    let families = irrep_generators
        .iter()
        .zip(multiplicities)
        .map(|(gens, &q)| BlockFamily::new(q, gens.clone()))
        .collect::<Result<Vec<_>>>()?;
    let spec = BlockSpec::new(families)?;
    if let Some(expected) = expected_dim {
        let found = spec.total_dim();
        if found != expected {
            return Err(Error::SpecDimensionError { expected, found });
        }
    }
    Ok(spec)
}

/// The regular representation of the dihedral group of order 8 with its
/// irreducible block targets and a known transfer matrix.
#[derive(Clone, Debug)]
pub struct D8Example {
    pub table: CayleyTable,
    pub characters: CharacterData,
    pub generators: GeneratorSet,
    pub blocks: BlockSpec,
    pub reference_s: ComplexDenseMatrix,
}

impl fmt::Display for D8Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "D8 regular representation (basis {})",
            self.table.elements.join(", ")
        )
    }
}

pub const D8_ELEMENTS: [&str; 8] = ["e", "a", "a2", "a3", "b", "ab", "a2b", "a3b"];

/// `<a, b | a^4 = b^2 = abab = e>`, elements `a^k b^f` stored at index `k + 4f`.
pub fn d8_cayley_table() -> CayleyTable {
    let product = |i: usize, j: usize| {
        let (k, f) = (i % 4, i / 4);
        let (m, h) = (j % 4, j / 4);
        // b a^m = a^{-m} b
        let power = if f == 0 { k + m } else { k + 4 - m };
        power % 4 + 4 * ((f + h) % 2)
    };
    CayleyTable::from_product(D8_ELEMENTS.iter().map(|s| s.to_string()).collect(), product)
        .expect("D8 multiplication satisfies the group axioms")
}

fn scalar(x: f64) -> ComplexDenseMatrix {
    ComplexDenseMatrix::diagonal(&[Complex64::new(x, 0.0)])
}

pub fn d8_character_data() -> CharacterData {
    let class = |r: &str, size| ConjugacyClass {
        representative: r.to_string(),
        size,
    };
    let rows: [[f64; 5]; 5] = [
        [1.0, 1.0, 1.0, 1.0, 1.0],
        [1.0, 1.0, 1.0, -1.0, -1.0],
        [1.0, 1.0, -1.0, 1.0, -1.0],
        [1.0, 1.0, -1.0, -1.0, 1.0],
        [2.0, -2.0, 0.0, 0.0, 0.0],
    ];
    CharacterData::new(
        vec![
            class("e", 1),
            class("a2", 1),
            class("a", 2),
            class("b", 2),
            class("ab", 2),
        ],
        ["1_0", "1_1", "1_2", "1_3", "2"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        rows.iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect(),
        vec![1, 1, 1, 1, 2],
    )
    .expect("D8 character table is consistent")
}

/// Generator images `(rho(a), rho(b))` of the five D8 irreps.
pub fn d8_irrep_generators() -> Vec<Vec<ComplexDenseMatrix>> {
    let i = Complex64::new(0.0, 1.0);
    let rho2_a = ComplexDenseMatrix::diagonal(&[i, -i]);
    let rho2_b = ComplexDenseMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).expect("2x2");
    vec![
        vec![scalar(1.0), scalar(1.0)],
        vec![scalar(1.0), scalar(-1.0)],
        vec![scalar(-1.0), scalar(1.0)],
        vec![scalar(-1.0), scalar(-1.0)],
        vec![rho2_a, rho2_b],
    ]
}

fn d8_reference_s() -> ComplexDenseMatrix {
    let r = std::f64::consts::SQRT_2;
    let z = |re: f64, im: f64| Complex64::new(re, im) / 8f64.sqrt();
    let rows = vec![
        vec![
            z(1., 0.),
            z(1., 0.),
            z(-1., 0.),
            z(1., 0.),
            z(0., -r),
            z(0., 0.),
            z(0., 0.),
            z(0., -r),
        ],
        vec![
            z(1., 0.),
            z(1., 0.),
            z(1., 0.),
            z(-1., 0.),
            z(r, 0.),
            z(0., 0.),
            z(0., 0.),
            z(-r, 0.),
        ],
        vec![
            z(1., 0.),
            z(1., 0.),
            z(-1., 0.),
            z(1., 0.),
            z(0., r),
            z(0., 0.),
            z(0., 0.),
            z(0., r),
        ],
        vec![
            z(1., 0.),
            z(1., 0.),
            z(1., 0.),
            z(-1., 0.),
            z(-r, 0.),
            z(0., 0.),
            z(0., 0.),
            z(r, 0.),
        ],
        vec![
            z(1., 0.),
            z(-1., 0.),
            z(-1., 0.),
            z(-1., 0.),
            z(0., 0.),
            z(0., -r),
            z(0., -r),
            z(0., 0.),
        ],
        vec![
            z(1., 0.),
            z(-1., 0.),
            z(1., 0.),
            z(1., 0.),
            z(0., 0.),
            z(-r, 0.),
            z(r, 0.),
            z(0., 0.),
        ],
        vec![
            z(1., 0.),
            z(-1., 0.),
            z(-1., 0.),
            z(-1., 0.),
            z(0., 0.),
            z(0., r),
            z(0., r),
            z(0., 0.),
        ],
        vec![
            z(1., 0.),
            z(-1., 0.),
            z(1., 0.),
            z(1., 0.),
            z(0., 0.),
            z(r, 0.),
            z(-r, 0.),
            z(0., 0.),
        ],
    ];
    ComplexDenseMatrix::from_rows(&rows).expect("8x8")
}

pub fn builtin_example_d8() -> D8Example {
    let table = d8_cayley_table();
    let characters = d8_character_data();
    let generators = regular_representation(&table, &["a", "b"]).expect("a and b are D8 elements");
    let q = multiplicities_in_regular(&characters).expect("D8 characters are consistent");
    let blocks = blockspec_from_irreps(&d8_irrep_generators(), &q, Some(8)).expect("D8 blocks fill dimension 8");
    D8Example {
        table,
        characters,
        generators,
        blocks,
        reference_s: d8_reference_s(),
    }
}

/// Names of the examples shipped with the crate.
pub const EXAMPLES: [&str; 1] = ["d8"];
