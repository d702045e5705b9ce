//! Filtered cell complexes: cells graded by filtration level, one boundary
//! matrix per dimension, and builders for the complexes used in tests and
//! the command line.

mod rips;

use std::collections::HashMap;

use rand::Rng;
use thiserror::Error;

use crate::field::PrimeField;
use crate::spmat::{GradedOrder, Id, MatrixError, SparseMatrix};

pub use rips::{
    chessboard_complex, clique_complex, matching_complex, vietoris_rips, CompressedRips, DistanceMatrix,
    MorseCounts, DEFAULT_CELL_CAP,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ComplexError {
    #[error("boundary of boundary is nonzero in dimension {0}")]
    NotAChainComplex(usize),
    #[error("face {face} has a later grade than its coface {coface}")]
    FiltrationViolation { face: Id, coface: Id },
    #[error("malformed complex: {0}")]
    Malformed(String),
    #[error("invalid distance matrix: {0}")]
    InvalidDistanceMatrix(String),
    #[error("complex would exceed {0} cells")]
    TooLarge(usize),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cell {
    pub id: Id,
    pub dim: usize,
    pub grade: i64,
}

/// A boundary coefficient `A_dim[row, col]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEntry {
    pub dim: usize,
    pub row: Id,
    pub col: Id,
    pub coeff: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilteredComplex {
    field: PrimeField,
    cells: Vec<GradedOrder>,
    // boundaries[n] has rows E_{n-1} and columns E_n; boundaries[0] has no rows.
    boundaries: Vec<SparseMatrix>,
    dim_of: HashMap<Id, usize>,
    levels: Option<Vec<f64>>,
    vertices: HashMap<Id, Vec<usize>>,
}

impl FilteredComplex {
    /// Validates a complex given as ordered cells per dimension and the
    /// matching boundary matrices `A_1, …, A_N`.
    pub fn from_boundaries(
        field: PrimeField,
        cells: Vec<GradedOrder>,
        boundaries: Vec<SparseMatrix>,
    ) -> Result<Self, ComplexError> {
        if cells.is_empty() && boundaries.is_empty() {
            return Ok(Self::empty(field));
        }
        if boundaries.len() + 1 != cells.len() {
            return Err(ComplexError::Malformed(format!(
                "{} cell dimensions but {} boundary matrices",
                cells.len(),
                boundaries.len()
            )));
        }
        let mut dim_of = HashMap::new();
        for (n, order) in cells.iter().enumerate() {
            for &id in order.elements() {
                if dim_of.insert(id, n).is_some() {
                    return Err(ComplexError::Malformed(format!("cell {id} listed twice")));
                }
                if order.grade(id).unwrap_or(0) < 0 {
                    return Err(ComplexError::Malformed(format!("cell {id} has a negative grade")));
                }
            }
        }
        let mut all = vec![SparseMatrix::zeros(field, vec![], cells[0].elements().to_vec())?];
        for (k, a) in boundaries.into_iter().enumerate() {
            let n = k + 1;
            if *a.field() != field {
                return Err(MatrixError::FieldMismatch.into());
            }
            // Accept any listing of the right ids, store in the cell order.
            let a = a
                .reindexed(cells[n - 1].elements(), cells[n].elements())
                .map_err(|_| ComplexError::Malformed(format!("boundary {n} does not match the cells")))?;
            all.push(a);
        }
        let complex = FilteredComplex {
            field,
            cells,
            boundaries: all,
            dim_of,
            levels: None,
            vertices: HashMap::new(),
        };
        complex.validate()?;
        Ok(complex)
    }

    /// Builds a complex from a cell list and boundary entries. Within each
    /// dimension cells are ordered by grade, ties kept in input order.
    pub fn from_cells(field: PrimeField, cells: &[Cell], entries: &[BoundaryEntry]) -> Result<Self, ComplexError> {
        if cells.is_empty() {
            if let Some(e) = entries.first() {
                return Err(ComplexError::Malformed(format!("entry for unknown cell {}", e.col)));
            }
            return Ok(Self::empty(field));
        }
        let top = cells.iter().map(|c| c.dim).max().unwrap_or(0);
        let mut per_dim: Vec<Vec<(Id, i64)>> = vec![Vec::new(); top + 1];
        let mut dim_of = HashMap::new();
        for c in cells {
            if dim_of.insert(c.id, c.dim).is_some() {
                return Err(ComplexError::Malformed(format!("cell {} listed twice", c.id)));
            }
            per_dim[c.dim].push((c.id, c.grade));
        }
        let orders = per_dim
            .into_iter()
            .map(GradedOrder::from_graded)
            .collect::<Result<Vec<_>, _>>()?;
        let mut triples: Vec<Vec<(Id, Id, i64)>> = vec![Vec::new(); top + 1];
        for e in entries {
            let ok = e.dim >= 1
                && e.dim <= top
                && dim_of.get(&e.col) == Some(&e.dim)
                && dim_of.get(&e.row) == Some(&(e.dim - 1));
            if !ok {
                return Err(ComplexError::Malformed(format!(
                    "entry ({}, {}) does not fit dimension {}",
                    e.row, e.col, e.dim
                )));
            }
            triples[e.dim].push((e.row, e.col, e.coeff));
        }
        let boundaries = (1..=top)
            .map(|n| {
                SparseMatrix::from_entries(
                    field,
                    orders[n - 1].elements().to_vec(),
                    orders[n].elements().to_vec(),
                    std::mem::take(&mut triples[n]),
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_boundaries(field, orders, boundaries)
    }

    pub fn empty(field: PrimeField) -> Self {
        FilteredComplex {
            field,
            cells: Vec::new(),
            boundaries: Vec::new(),
            dim_of: HashMap::new(),
            levels: None,
            vertices: HashMap::new(),
        }
    }

    fn validate(&self) -> Result<(), ComplexError> {
        for n in 1..self.cells.len() {
            let a = &self.boundaries[n];
            for (row, col, _) in a.entries() {
                if self.cells[n - 1].grade(row) > self.cells[n].grade(col) {
                    return Err(ComplexError::FiltrationViolation { face: row, coface: col });
                }
            }
            if n >= 2 && !self.boundaries[n - 1].multiply(a)?.is_zero() {
                return Err(ComplexError::NotAChainComplex(n));
            }
        }
        Ok(())
    }

    /// Attaches real values for each grade, used when reporting.
    pub fn with_levels(mut self, levels: Vec<f64>) -> Self {
        self.levels = Some(levels);
        self
    }

    pub(crate) fn with_vertices(mut self, vertices: HashMap<Id, Vec<usize>>) -> Self {
        self.vertices = vertices;
        self
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Number of stored dimensions (top dimension plus one).
    pub fn num_dims(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self, n: usize) -> &GradedOrder {
        &self.cells[n]
    }

    pub fn count(&self, n: usize) -> usize {
        self.cells.get(n).map_or(0, |c| c.len())
    }

    pub fn num_cells(&self) -> usize {
        self.cells.iter().map(|c| c.len()).sum()
    }

    /// `A_n`, with rows `E_{n-1}` and columns `E_n`.
    pub fn boundary(&self, n: usize) -> &SparseMatrix {
        &self.boundaries[n]
    }

    pub fn dim(&self, id: Id) -> Option<usize> {
        self.dim_of.get(&id).copied()
    }

    pub fn grade(&self, id: Id) -> Option<i64> {
        self.dim(id).and_then(|n| self.cells[n].grade(id))
    }

    pub fn levels(&self) -> Option<&[f64]> {
        self.levels.as_deref()
    }

    pub fn max_grade(&self) -> i64 {
        self.cells
            .iter()
            .filter_map(|c| c.grades().last().copied())
            .max()
            .unwrap_or(0)
    }

    /// Real value of a grade: the level table entry, or the grade itself.
    pub fn level_value(&self, grade: i64) -> f64 {
        match &self.levels {
            Some(l) => l[grade as usize],
            None => grade as f64,
        }
    }

    pub fn vertices(&self, id: Id) -> Option<&[usize]> {
        self.vertices.get(&id).map(|v| v.as_slice())
    }

    pub fn all_cells(&self) -> Vec<Cell> {
        self.cells
            .iter()
            .enumerate()
            .flat_map(|(dim, o)| {
                o.elements()
                    .iter()
                    .zip(o.grades())
                    .map(move |(&id, &grade)| Cell { id, dim, grade })
            })
            .collect()
    }

    pub fn all_entries(&self) -> Vec<BoundaryEntry> {
        (1..self.num_dims())
            .flat_map(|dim| {
                self.boundaries[dim].entries().map(move |(row, col, c)| BoundaryEntry {
                    dim,
                    row,
                    col,
                    coeff: c as i64,
                })
            })
            .collect()
    }

    /// The same complex with each dimension listed in a new grade-refining
    /// order.
    pub fn reordered(&self, orders: Vec<GradedOrder>) -> Result<Self, ComplexError> {
        if orders.len() != self.num_dims() {
            return Err(ComplexError::Malformed("one order per dimension required".into()));
        }
        for (n, o) in orders.iter().enumerate() {
            let same = o.len() == self.cells[n].len()
                && o.elements().iter().all(|&id| o.grade(id) == self.cells[n].grade(id));
            if !same {
                return Err(ComplexError::Malformed(format!("order {n} is not a regrading-free permutation")));
            }
        }
        let boundaries = (1..self.num_dims())
            .map(|n| self.boundaries[n].reindexed(orders[n - 1].elements(), orders[n].elements()))
            .collect::<Result<Vec<_>, _>>()?;
        let mut out = Self::from_boundaries(self.field, orders, boundaries)?;
        out.levels = self.levels.clone();
        out.vertices = self.vertices.clone();
        Ok(out)
    }
}

/// Small complexes with known homology.
pub mod known {
    use super::*;

    /// Facets listed as in the alternating-sum boundary formula.
    fn alt(facets: &[Id]) -> Vec<(Id, i64)> {
        facets
            .iter()
            .enumerate()
            .map(|(i, &f)| (f, if i % 2 == 0 { 1 } else { -1 }))
            .collect()
    }

    fn build(field: PrimeField, cells: &[(Id, usize, i64)], faces: &[(Id, Vec<(Id, i64)>)]) -> FilteredComplex {
        let cells: Vec<Cell> = cells.iter().map(|&(id, dim, grade)| Cell { id, dim, grade }).collect();
        let dim_of: HashMap<Id, usize> = cells.iter().map(|c| (c.id, c.dim)).collect();
        let mut entries = Vec::new();
        for (col, fs) in faces {
            for &(row, coeff) in fs {
                entries.push(BoundaryEntry {
                    dim: dim_of[col],
                    row,
                    col: *col,
                    coeff,
                });
            }
        }
        FilteredComplex::from_cells(field, &cells, &entries).expect("known complex is valid")
    }

    pub fn point(field: PrimeField) -> FilteredComplex {
        build(field, &[(0, 0, 0)], &[])
    }

    /// Boundary of a triangle: vertices a, b, c and edges ab, bc, ac.
    pub fn circle(field: PrimeField) -> FilteredComplex {
        build(
            field,
            &[(0, 0, 0), (1, 0, 0), (2, 0, 0), (3, 1, 0), (4, 1, 0), (5, 1, 0)],
            &[(3, alt(&[1, 0])), (4, alt(&[2, 1])), (5, alt(&[2, 0]))],
        )
    }

    /// Boundary of a tetrahedron.
    pub fn sphere(field: PrimeField) -> FilteredComplex {
        let mut cells: Vec<(Id, usize, i64)> = (0..4).map(|v| (v, 0, 0)).collect();
        let mut faces: Vec<(Id, Vec<(Id, i64)>)> = Vec::new();
        let mut edge_id = HashMap::new();
        let mut next = 4;
        for a in 0..4 {
            for b in a + 1..4 {
                edge_id.insert((a, b), next);
                cells.push((next, 1, 0));
                faces.push((next, alt(&[b, a])));
                next += 1;
            }
        }
        for a in 0..4 {
            for b in a + 1..4 {
                for c in b + 1..4 {
                    cells.push((next, 2, 0));
                    faces.push((next, alt(&[edge_id[&(b, c)], edge_id[&(a, c)], edge_id[&(a, b)]])));
                    next += 1;
                }
            }
        }
        build(field, &cells, &faces)
    }

    /// Vertices a, b, c at grade 0; edges ab, bc at 1; edge ca at 2; face at 3.
    /// Ids: a=0, b=1, c=2, ab=3, bc=4, ca=5, abc=6.
    pub fn filtered_triangle(field: PrimeField) -> FilteredComplex {
        build(
            field,
            &[(0, 0, 0), (1, 0, 0), (2, 0, 0), (3, 1, 1), (4, 1, 1), (5, 1, 2), (6, 2, 3)],
            // ∂(ca) = a − c, so ∂(abc) = bc − ac + ab = ab + bc + ca
            &[
                (3, alt(&[1, 0])),
                (4, alt(&[2, 1])),
                (5, alt(&[0, 2])),
                (6, vec![(3, 1), (4, 1), (5, 1)]),
            ],
        )
    }
}

/// A random filtered simplicial complex on `n_vertices` vertices with cells
/// up to `max_dim`. Each cell's grade is at least the grades of its facets.
pub fn random_complex<R: Rng>(
    rng: &mut R,
    field: PrimeField,
    n_vertices: usize,
    max_dim: usize,
    max_grade: i64,
) -> FilteredComplex {
    let n_vertices = n_vertices.max(1);
    let density = rng.gen_range(0.3..0.9);
    let edges: Vec<Vec<bool>> = {
        let mut adj = vec![vec![false; n_vertices]; n_vertices];
        for a in 0..n_vertices {
            for b in a + 1..n_vertices {
                let e = rng.gen_bool(density);
                adj[a][b] = e;
                adj[b][a] = e;
            }
        }
        adj
    };
    let mut grades: HashMap<Vec<usize>, i64> = HashMap::new();
    let keep = rng.gen_range(0.4..1.0);
    let mut simplices: Vec<Vec<usize>> = Vec::new();
    let mut frontier: Vec<Vec<usize>> = (0..n_vertices).map(|v| vec![v]).collect();
    for _ in 0..=max_dim {
        let mut next = Vec::new();
        for s in frontier {
            let facet_max = if s.len() == 1 {
                0
            } else {
                (0..s.len())
                    .map(|i| {
                        let mut f = s.clone();
                        f.remove(i);
                        grades.get(&f).copied()
                    })
                    .try_fold(0, |m, g| g.map(|g| m.max(g)))
                    .unwrap_or(-1)
            };
            if facet_max < 0 {
                continue;
            }
            if s.len() > 1 && !rng.gen_bool(keep) {
                continue;
            }
            let g = (facet_max + rng.gen_range(0..=2)).min(max_grade.max(facet_max));
            grades.insert(s.clone(), g);
            let last = *s.last().expect("nonempty");
            for v in last + 1..n_vertices {
                if s.iter().all(|&u| edges[u][v]) {
                    let mut t = s.clone();
                    t.push(v);
                    next.push(t);
                }
            }
            simplices.push(s);
        }
        frontier = next;
    }
    let ids: HashMap<&Vec<usize>, Id> = simplices.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let cells: Vec<Cell> = simplices
        .iter()
        .enumerate()
        .map(|(id, s)| Cell {
            id,
            dim: s.len() - 1,
            grade: grades[s],
        })
        .collect();
    let mut entries = Vec::new();
    for (id, s) in simplices.iter().enumerate() {
        if s.len() < 2 {
            continue;
        }
        for i in 0..s.len() {
            let mut f = s.clone();
            f.remove(i);
            entries.push(BoundaryEntry {
                dim: s.len() - 1,
                row: ids[&f],
                col: id,
                coeff: if i % 2 == 0 { 1 } else { -1 },
            });
        }
    }
    let vertices = simplices.iter().enumerate().map(|(i, s)| (i, s.clone())).collect();
    FilteredComplex::from_cells(field, &cells, &entries)
        .expect("random complex is valid")
        .with_vertices(vertices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cell(id: Id, dim: usize, grade: i64) -> Cell {
        Cell { id, dim, grade }
    }

    fn entry(dim: usize, row: Id, col: Id) -> BoundaryEntry {
        BoundaryEntry { dim, row, col, coeff: 1 }
    }

    #[test]
    fn construction_examples() {
        let f = PrimeField::gf2();
        assert!(FilteredComplex::from_cells(f, &[], &[]).unwrap().is_empty());
        let t = known::filtered_triangle(f);
        assert_eq!((t.count(0), t.count(1), t.count(2)), (3, 3, 1));

        let cells = [
            cell(0, 0, 0),
            cell(1, 0, 0),
            cell(2, 0, 0),
            cell(3, 1, 1),
            cell(4, 1, 1),
            cell(5, 1, 2),
            cell(6, 2, 1),
        ];
        let mut entries = vec![
            entry(1, 0, 3),
            entry(1, 1, 3),
            entry(1, 1, 4),
            entry(1, 2, 4),
            entry(1, 2, 5),
            entry(1, 0, 5),
        ];
        entries.extend([entry(2, 3, 6), entry(2, 4, 6), entry(2, 5, 6)]);
        assert_eq!(
            FilteredComplex::from_cells(f, &cells, &entries),
            Err(ComplexError::FiltrationViolation { face: 5, coface: 6 })
        );
    }

    #[test]
    fn nonzero_square_is_rejected() {
        let f = PrimeField::gf2();
        let cells = [cell(0, 0, 0), cell(1, 0, 0), cell(2, 1, 0), cell(3, 2, 0)];
        let entries = [entry(1, 0, 2), entry(1, 1, 2), entry(2, 2, 3)];
        assert_eq!(
            FilteredComplex::from_cells(f, &cells, &entries),
            Err(ComplexError::NotAChainComplex(2))
        );
    }

    #[test]
    fn known_spaces_are_chain_complexes_over_odd_fields() {
        let f = PrimeField::new(3).unwrap();
        for k in [known::circle(f), known::sphere(f), known::filtered_triangle(f), known::point(f)] {
            for n in 2..k.num_dims() {
                assert!(k.boundary(n - 1).multiply(k.boundary(n)).unwrap().is_zero());
            }
        }
        let s = known::sphere(f);
        assert_eq!((s.count(0), s.count(1), s.count(2)), (4, 6, 4));
    }

    #[test]
    fn random_complexes_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for p in [2, 3, 5] {
            for _ in 0..30 {
                let k = random_complex(&mut rng, PrimeField::new(p).unwrap(), 7, 3, 5);
                for n in 1..k.num_dims() {
                    let grades = |o: &GradedOrder| o.grade_map();
                    assert!(k
                        .boundary(n)
                        .is_f_upper_triangular(&grades(k.cells(n - 1)), &grades(k.cells(n)))
                        .unwrap());
                }
                let rebuilt = FilteredComplex::from_cells(*k.field(), &k.all_cells(), &k.all_entries()).unwrap();
                assert_eq!(rebuilt.all_cells(), k.all_cells());
            }
        }
    }
}
