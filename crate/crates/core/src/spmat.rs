//! Sparse column-major matrices over a prime field.
//!
//! Rows and columns carry explicit, ordered id lists so that a matrix can
//! represent a boundary operator between two graded bases. Column entries
//! are stored by row *position* and kept sorted; zero coefficients are never
//! stored.

use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

use crate::field::{Coeff, PrimeField};

/// Identifier of a row or column basis element (a cell, a matroid element).
pub type Id = usize;

/// A sparse vector: `(position, coefficient)` pairs sorted by position.
pub type SparseVec = Vec<(usize, Coeff)>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not triangular with respect to the given order")]
    NotTriangular,
    #[error("zero on the diagonal at id {0}")]
    SingularDiagonal(Id),
    #[error("no grade recorded for id {0}")]
    MissingGrade(Id),
    #[error("unknown id {0}")]
    UnknownId(Id),
    #[error("duplicate id {0}")]
    DuplicateId(Id),
    #[error("order does not refine the grades at id {0}")]
    OrderNotGraded(Id),
    #[error("matrices are over different fields")]
    FieldMismatch,
}

/// `y + a·x` for sorted sparse vectors.
pub fn axpy(field: &PrimeField, y: &[(usize, Coeff)], a: Coeff, x: &[(usize, Coeff)]) -> SparseVec {
    if a == 0 {
        return y.to_vec();
    }
    let mut out = Vec::with_capacity(y.len() + x.len());
    let (mut i, mut j) = (0, 0);
    while i < y.len() || j < x.len() {
        let take_y = j >= x.len() || (i < y.len() && y[i].0 < x[j].0);
        let take_x = i >= y.len() || (j < x.len() && x[j].0 < y[i].0);
        if take_y {
            out.push(y[i]);
            i += 1;
        } else if take_x {
            out.push((x[j].0, field.mul(a, x[j].1)));
            j += 1;
        } else {
            let v = field.add(y[i].1, field.mul(a, x[j].1));
            if v != 0 {
                out.push((y[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Coefficient stored at `pos`, or zero.
pub fn sparse_get(v: &[(usize, Coeff)], pos: usize) -> Coeff {
    v.binary_search_by_key(&pos, |e| e.0)
        .map(|k| v[k].1)
        .unwrap_or(0)
}

fn index_of(ids: &[Id]) -> Result<HashMap<Id, usize>, MatrixError> {
    let mut map = HashMap::with_capacity(ids.len());
    for (pos, &id) in ids.iter().enumerate() {
        if map.insert(id, pos).is_some() {
            return Err(MatrixError::DuplicateId(id));
        }
    }
    Ok(map)
}

/// A linear order on ids that refines an integer grade.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedOrder {
    elements: Vec<Id>,
    grades: Vec<i64>,
    position: HashMap<Id, usize>,
}

impl GradedOrder {
    /// `elements[k]` has grade `grades[k]`; grades must be non-decreasing.
    pub fn new(elements: Vec<Id>, grades: Vec<i64>) -> Result<Self, MatrixError> {
        if elements.len() != grades.len() {
            return Err(MatrixError::DimensionMismatch(format!(
                "{} elements but {} grades",
                elements.len(),
                grades.len()
            )));
        }
        for k in 1..grades.len() {
            if grades[k - 1] > grades[k] {
                return Err(MatrixError::OrderNotGraded(elements[k]));
            }
        }
        let position = index_of(&elements)?;
        Ok(GradedOrder {
            elements,
            grades,
            position,
        })
    }

    /// Sorts `(id, grade)` pairs stably by grade.
    pub fn from_graded(mut items: Vec<(Id, i64)>) -> Result<Self, MatrixError> {
        items.sort_by_key(|&(_, g)| g);
        let (elements, grades) = items.into_iter().unzip();
        Self::new(elements, grades)
    }

    pub fn elements(&self) -> &[Id] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn position(&self, id: Id) -> Option<usize> {
        self.position.get(&id).copied()
    }

    pub fn grade(&self, id: Id) -> Option<i64> {
        self.position(id).map(|p| self.grades[p])
    }

    pub fn grade_at(&self, pos: usize) -> i64 {
        self.grades[pos]
    }

    pub fn grades(&self) -> &[i64] {
        &self.grades
    }

    pub fn grade_map(&self) -> HashMap<Id, i64> {
        self.elements
            .iter()
            .copied()
            .zip(self.grades.iter().copied())
            .collect()
    }

    /// The suborder on the ids accepted by `keep`.
    pub fn restrict(&self, keep: impl Fn(Id) -> bool) -> GradedOrder {
        let (elements, grades): (Vec<Id>, Vec<i64>) = self
            .elements
            .iter()
            .zip(&self.grades)
            .filter(|(&e, _)| keep(e))
            .map(|(&e, &g)| (e, g))
            .unzip();
        let position = elements.iter().enumerate().map(|(k, &e)| (e, k)).collect();
        GradedOrder {
            elements,
            grades,
            position,
        }
    }
}

/// Column-major sparse matrix with ordered row and column ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    field: PrimeField,
    rows: Vec<Id>,
    cols: Vec<Id>,
    row_index: HashMap<Id, usize>,
    col_index: HashMap<Id, usize>,
    columns: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zeros(field: PrimeField, rows: Vec<Id>, cols: Vec<Id>) -> Result<Self, MatrixError> {
        let row_index = index_of(&rows)?;
        let col_index = index_of(&cols)?;
        let columns = vec![Vec::new(); cols.len()];
        Ok(SparseMatrix {
            field,
            rows,
            cols,
            row_index,
            col_index,
            columns,
        })
    }

    pub fn identity(field: PrimeField, ids: Vec<Id>) -> Result<Self, MatrixError> {
        let mut m = Self::zeros(field, ids.clone(), ids)?;
        for (j, col) in m.columns.iter_mut().enumerate() {
            col.push((j, 1));
        }
        Ok(m)
    }

    /// Builds a matrix from `(row id, col id, value)` triplets; repeated
    /// positions are summed.
    pub fn from_entries<I>(
        field: PrimeField,
        rows: Vec<Id>,
        cols: Vec<Id>,
        entries: I,
    ) -> Result<Self, MatrixError>
    where
        I: IntoIterator<Item = (Id, Id, i64)>,
    {
        let mut m = Self::zeros(field, rows, cols)?;
        let mut acc: Vec<BTreeMap<usize, Coeff>> = vec![BTreeMap::new(); m.cols.len()];
        for (r, c, v) in entries {
            let i = *m.row_index.get(&r).ok_or(MatrixError::UnknownId(r))?;
            let j = *m.col_index.get(&c).ok_or(MatrixError::UnknownId(c))?;
            let e = acc[j].entry(i).or_insert(0);
            *e = field.add(*e, field.from_i64(v));
        }
        for (j, a) in acc.into_iter().enumerate() {
            m.columns[j] = a.into_iter().filter(|&(_, v)| v != 0).collect();
        }
        Ok(m)
    }

    /// Dense constructor with row ids `0..m` and column ids `0..n`.
    pub fn from_dense(field: PrimeField, rows: &[Vec<i64>]) -> Self {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.len());
        let entries = rows.iter().enumerate().flat_map(|(i, r)| {
            assert_eq!(r.len(), n, "ragged dense input");
            r.iter().enumerate().map(move |(j, &v)| (i, j, v))
        });
        Self::from_entries(field, (0..m).collect(), (0..n).collect(), entries)
            .expect("dense ids are valid")
    }

    pub fn to_dense(&self) -> Vec<Vec<Coeff>> {
        let mut out = vec![vec![0; self.ncols()]; self.nrows()];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                out[i][j] = v;
            }
        }
        out
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn rows(&self) -> &[Id] {
        &self.rows
    }

    pub fn cols(&self) -> &[Id] {
        &self.cols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn row_position(&self, id: Id) -> Option<usize> {
        self.row_index.get(&id).copied()
    }

    pub fn col_position(&self, id: Id) -> Option<usize> {
        self.col_index.get(&id).copied()
    }

    /// Column `j` (by position) as sorted `(row position, coeff)` pairs.
    pub fn column(&self, j: usize) -> &[(usize, Coeff)] {
        &self.columns[j]
    }

    /// Column by id, as `(row id, coeff)` pairs in row order.
    pub fn column_by_id(&self, id: Id) -> Result<Vec<(Id, Coeff)>, MatrixError> {
        let j = self.col_position(id).ok_or(MatrixError::UnknownId(id))?;
        Ok(self.columns[j]
            .iter()
            .map(|&(i, v)| (self.rows[i], v))
            .collect())
    }

    /// Replaces column `j`. Entries must be sorted by row position; zeros are
    /// dropped.
    pub fn set_column(&mut self, j: usize, mut entries: SparseVec) {
        entries.retain(|&(_, v)| v != 0);
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|&(i, _)| i < self.rows.len()));
        self.columns[j] = entries;
    }

    pub fn get(&self, row: Id, col: Id) -> Coeff {
        match (self.row_position(row), self.col_position(col)) {
            (Some(i), Some(j)) => sparse_get(&self.columns[j], i),
            _ => 0,
        }
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    /// All nonzero entries as `(row id, col id, coeff)`, column by column.
    pub fn entries(&self) -> impl Iterator<Item = (Id, Id, Coeff)> + '_ {
        self.columns.iter().enumerate().flat_map(move |(j, col)| {
            col.iter().map(move |&(i, v)| (self.rows[i], self.cols[j], v))
        })
    }

    /// Exact product `self · other`. The column ids of `self` and the row ids
    /// of `other` must be the same set; their orders may differ.
    pub fn multiply(&self, other: &SparseMatrix) -> Result<SparseMatrix, MatrixError> {
        if self.field != other.field {
            return Err(MatrixError::FieldMismatch);
        }
        if self.ncols() != other.nrows()
            || other.rows.iter().any(|id| !self.col_index.contains_key(id))
        {
            return Err(MatrixError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.nrows(),
                self.ncols(),
                other.nrows(),
                other.ncols()
            )));
        }
        let f = self.field;
        let map: Vec<usize> = other.rows.iter().map(|id| self.col_index[id]).collect();
        let mut out = SparseMatrix::zeros(f, self.rows.clone(), other.cols.clone())?;
        let mut acc = vec![0 as Coeff; self.nrows()];
        let mut touched = Vec::new();
        for (j, col) in other.columns.iter().enumerate() {
            for &(k, b) in col {
                for &(i, a) in &self.columns[map[k]] {
                    if acc[i] == 0 {
                        touched.push(i);
                    }
                    acc[i] = f.add(acc[i], f.mul(a, b));
                    // a cancellation leaves a zero that may be refilled later
                }
            }
            touched.sort_unstable();
            touched.dedup();
            let mut res = Vec::with_capacity(touched.len());
            for &i in &touched {
                if acc[i] != 0 {
                    res.push((i, acc[i]));
                    acc[i] = 0;
                }
            }
            touched.clear();
            out.columns[j] = res;
        }
        Ok(out)
    }

    /// Inverse of a matrix that is upper or lower triangular with respect to
    /// `order`, which must list exactly the row ids (and column ids). The
    /// result has rows and columns in `order`.
    pub fn invert_unitriangular(&self, order: &GradedOrder) -> Result<SparseMatrix, MatrixError> {
        let n = order.len();
        if self.nrows() != n || self.ncols() != n {
            return Err(MatrixError::DimensionMismatch(format!(
                "{}x{} matrix against an order of length {}",
                self.nrows(),
                self.ncols(),
                n
            )));
        }
        let rpos = |i: usize| order.position(self.rows[i]).ok_or(MatrixError::UnknownId(self.rows[i]));
        let mut cols_by_pos: Vec<SparseVec> = vec![Vec::new(); n];
        let (mut upper, mut lower) = (true, true);
        for (j, col) in self.columns.iter().enumerate() {
            let cj = order
                .position(self.cols[j])
                .ok_or(MatrixError::UnknownId(self.cols[j]))?;
            let mut v = Vec::with_capacity(col.len());
            for &(i, a) in col {
                let ri = rpos(i)?;
                upper &= ri <= cj;
                lower &= ri >= cj;
                v.push((ri, a));
            }
            v.sort_unstable();
            cols_by_pos[cj] = v;
        }
        if !upper && !lower {
            return Err(MatrixError::NotTriangular);
        }
        let f = self.field;
        let mut diag_inv = Vec::with_capacity(n);
        for (k, col) in cols_by_pos.iter().enumerate() {
            let d = sparse_get(col, k);
            if d == 0 {
                return Err(MatrixError::SingularDiagonal(order.elements()[k]));
            }
            diag_inv.push(f.inv(d).expect("nonzero"));
        }
        let mut out = SparseMatrix::zeros(f, order.elements().to_vec(), order.elements().to_vec())?;
        for k in 0..n {
            // Solve T x = e_k by substitution along the triangular direction.
            let mut rhs: BTreeMap<usize, Coeff> = BTreeMap::new();
            rhs.insert(k, 1);
            let mut x = Vec::new();
            loop {
                let next = if upper { rhs.pop_last() } else { rhs.pop_first() };
                let Some((j, b)) = next else { break };
                let xj = f.mul(b, diag_inv[j]);
                x.push((j, xj));
                for &(i, a) in &cols_by_pos[j] {
                    if i == j {
                        continue;
                    }
                    let e = rhs.entry(i).or_insert(0);
                    *e = f.sub(*e, f.mul(a, xj));
                    if *e == 0 {
                        rhs.remove(&i);
                    }
                }
            }
            x.sort_unstable();
            out.columns[k] = x;
        }
        Ok(out)
    }

    /// True iff `f_row(s) ≤ f_col(t)` for every nonzero entry at `(s, t)`.
    pub fn is_f_upper_triangular(
        &self,
        f_row: &HashMap<Id, i64>,
        f_col: &HashMap<Id, i64>,
    ) -> Result<bool, MatrixError> {
        let row_grades = self
            .rows
            .iter()
            .map(|id| f_row.get(id).copied().ok_or(MatrixError::MissingGrade(*id)))
            .collect::<Result<Vec<_>, _>>()?;
        let col_grades = self
            .cols
            .iter()
            .map(|id| f_col.get(id).copied().ok_or(MatrixError::MissingGrade(*id)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self
            .columns
            .iter()
            .enumerate()
            .all(|(j, col)| col.iter().all(|&(i, _)| row_grades[i] <= col_grades[j])))
    }

    /// Rank over the field by plain column elimination on lowest entries.
    pub fn rank(&self) -> usize {
        let f = self.field;
        let mut pivots: HashMap<usize, SparseVec> = HashMap::new();
        for col in &self.columns {
            let mut v = col.clone();
            while let Some(&(low, a)) = v.last() {
                match pivots.get(&low) {
                    Some(p) => {
                        let b = p.last().expect("pivot column nonempty").1;
                        v = axpy(&f, &v, f.neg(f.div(a, b)), p);
                    }
                    None => {
                        pivots.insert(low, v);
                        break;
                    }
                }
            }
        }
        pivots.len()
    }

    /// Restriction to the given ids, keeping this matrix's row and column
    /// order.
    pub fn submatrix(&self, row_ids: &[Id], col_ids: &[Id]) -> Result<SparseMatrix, MatrixError> {
        let mut rpos = Vec::with_capacity(row_ids.len());
        for &r in row_ids {
            rpos.push(self.row_position(r).ok_or(MatrixError::UnknownId(r))?);
        }
        let mut cpos = Vec::with_capacity(col_ids.len());
        for &c in col_ids {
            cpos.push(self.col_position(c).ok_or(MatrixError::UnknownId(c))?);
        }
        rpos.sort_unstable();
        cpos.sort_unstable();
        let rows: Vec<Id> = rpos.iter().map(|&i| self.rows[i]).collect();
        let cols: Vec<Id> = cpos.iter().map(|&j| self.cols[j]).collect();
        let mut new_pos = vec![usize::MAX; self.nrows()];
        for (k, &i) in rpos.iter().enumerate() {
            new_pos[i] = k;
        }
        let mut out = SparseMatrix::zeros(self.field, rows, cols)?;
        for (k, &j) in cpos.iter().enumerate() {
            out.columns[k] = self.columns[j]
                .iter()
                .filter(|&&(i, _)| new_pos[i] != usize::MAX)
                .map(|&(i, v)| (new_pos[i], v))
                .collect();
        }
        Ok(out)
    }

    /// The same operator with rows and columns listed in new orders. Each new
    /// list must be a permutation of the old one.
    pub fn reindexed(&self, row_ids: &[Id], col_ids: &[Id]) -> Result<SparseMatrix, MatrixError> {
        if row_ids.len() != self.nrows() || col_ids.len() != self.ncols() {
            return Err(MatrixError::DimensionMismatch(
                "reindexing must be a permutation".into(),
            ));
        }
        let mut out = SparseMatrix::zeros(self.field, row_ids.to_vec(), col_ids.to_vec())?;
        let row_map: Vec<usize> = self
            .rows
            .iter()
            .map(|id| out.row_position(*id).ok_or(MatrixError::UnknownId(*id)))
            .collect::<Result<_, _>>()?;
        for (k, &c) in col_ids.iter().enumerate() {
            let j = self.col_position(c).ok_or(MatrixError::UnknownId(c))?;
            let mut v: SparseVec = self.columns[j].iter().map(|&(i, a)| (row_map[i], a)).collect();
            v.sort_unstable();
            out.columns[k] = v;
        }
        Ok(out)
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut out = SparseMatrix::zeros(self.field, self.cols.clone(), self.rows.clone())
            .expect("ids already validated");
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                out.columns[i].push((j, v));
            }
        }
        out
    }

    /// Row supports as sorted column positions, built on demand.
    pub fn row_supports(&self) -> Vec<Vec<usize>> {
        let mut rows = vec![Vec::new(); self.nrows()];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, _) in col {
                rows[i].push(j);
            }
        }
        rows
    }

    /// Ids appearing in `ids` but not among the rows.
    pub fn missing_rows<'a>(&self, ids: impl IntoIterator<Item = &'a Id>) -> Vec<Id> {
        let have: HashSet<&Id> = self.rows.iter().collect();
        ids.into_iter().filter(|id| !have.contains(id)).copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf2() -> PrimeField {
        PrimeField::gf2()
    }

    #[test]
    fn multiply_examples() {
        let a = SparseMatrix::from_dense(gf2(), &[vec![1, 1], vec![0, 1]]);
        let b = SparseMatrix::from_dense(gf2(), &[vec![1, 0], vec![1, 1]]);
        let c = a.multiply(&b).unwrap();
        assert_eq!(c.to_dense(), vec![vec![0, 1], vec![1, 1]]);

        let i = SparseMatrix::identity(gf2(), vec![0, 1]).unwrap();
        assert_eq!(i.multiply(&a).unwrap(), a);

        let wide = SparseMatrix::from_dense(gf2(), &[vec![1, 0, 1], vec![0, 1, 1]]);
        assert!(matches!(
            wide.multiply(&a),
            Err(MatrixError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn invert_examples() {
        let order = GradedOrder::new(vec![0, 1], vec![0, 0]).unwrap();
        let i = SparseMatrix::identity(gf2(), vec![0, 1]).unwrap();
        assert_eq!(i.invert_unitriangular(&order).unwrap(), i);

        let a = SparseMatrix::from_dense(gf2(), &[vec![1, 1], vec![0, 1]]);
        assert_eq!(a.invert_unitriangular(&order).unwrap(), a);

        let s = SparseMatrix::from_dense(gf2(), &[vec![0, 1], vec![0, 1]]);
        assert_eq!(
            s.invert_unitriangular(&order),
            Err(MatrixError::SingularDiagonal(0))
        );

        let full = SparseMatrix::from_dense(gf2(), &[vec![1, 1], vec![1, 1]]);
        assert_eq!(full.invert_unitriangular(&order), Err(MatrixError::NotTriangular));
    }

    #[test]
    fn invert_lower_over_gf5() {
        let f = PrimeField::new(5).unwrap();
        let a = SparseMatrix::from_dense(f, &[vec![2, 0, 0], vec![3, 1, 0], vec![0, 4, 3]]);
        let order = GradedOrder::new(vec![0, 1, 2], vec![0, 1, 1]).unwrap();
        let inv = a.invert_unitriangular(&order).unwrap();
        let prod = a.multiply(&inv).unwrap();
        assert_eq!(prod, SparseMatrix::identity(f, vec![0, 1, 2]).unwrap());
        assert!(inv.to_dense()[0][1] == 0 && inv.to_dense()[0][2] == 0 && inv.to_dense()[1][2] == 0);
    }

    #[test]
    fn f_upper_triangular_examples() {
        let grades: HashMap<Id, i64> = [(0, 1), (1, 1)].into_iter().collect();
        let d = SparseMatrix::from_dense(gf2(), &[vec![1, 0], vec![0, 1]]);
        assert!(d.is_f_upper_triangular(&grades, &grades).unwrap());

        let rows: HashMap<Id, i64> = [(0, 2)].into_iter().collect();
        let cols: HashMap<Id, i64> = [(0, 1)].into_iter().collect();
        let v = SparseMatrix::from_dense(gf2(), &[vec![1]]);
        assert!(!v.is_f_upper_triangular(&rows, &cols).unwrap());

        let asc: HashMap<Id, i64> = [(0, 0), (1, 1), (2, 2)].into_iter().collect();
        let strict = SparseMatrix::from_dense(gf2(), &[vec![0, 1, 1], vec![0, 0, 1], vec![0, 0, 0]]);
        assert!(strict.is_f_upper_triangular(&asc, &asc).unwrap());

        assert_eq!(
            strict.is_f_upper_triangular(&rows, &asc),
            Err(MatrixError::MissingGrade(1))
        );
    }

    #[test]
    fn rank_examples() {
        let z = SparseMatrix::zeros(gf2(), vec![0, 1], vec![0, 1, 2]).unwrap();
        assert_eq!(z.rank(), 0);
        assert_eq!(SparseMatrix::identity(gf2(), vec![0, 1, 2]).unwrap().rank(), 3);
        assert_eq!(SparseMatrix::from_dense(gf2(), &[vec![1, 1], vec![1, 1]]).rank(), 1);
        let f3 = PrimeField::new(3).unwrap();
        assert_eq!(SparseMatrix::from_dense(f3, &[vec![1, 1], vec![1, 2]]).rank(), 2);
    }

    #[test]
    fn submatrix_examples() {
        let i3 = SparseMatrix::identity(gf2(), vec![1, 2, 3]).unwrap();
        assert_eq!(i3.submatrix(&[1, 2, 3], &[1, 2, 3]).unwrap(), i3);
        let empty = i3.submatrix(&[1, 2, 3], &[]).unwrap();
        assert_eq!(empty.ncols(), 0);
        let s = i3.submatrix(&[1, 2], &[2, 3]).unwrap();
        assert_eq!(s.to_dense(), vec![vec![0, 0], vec![1, 0]]);
        assert_eq!(i3.submatrix(&[9], &[]), Err(MatrixError::UnknownId(9)));
    }

    #[test]
    fn graded_order_rejects_descending_grades() {
        assert_eq!(
            GradedOrder::new(vec![4, 5], vec![1, 0]),
            Err(MatrixError::OrderNotGraded(5))
        );
        let o = GradedOrder::from_graded(vec![(4, 1), (5, 0)]).unwrap();
        assert_eq!(o.elements(), &[5, 4]);
    }

    #[test]
    fn reindex_and_transpose_preserve_entries() {
        let f = PrimeField::new(7).unwrap();
        let a = SparseMatrix::from_dense(f, &[vec![1, 0, 3], vec![0, 5, 6]]);
        let r = a.reindexed(&[1, 0], &[2, 0, 1]).unwrap();
        for (i, j, v) in a.entries() {
            assert_eq!(r.get(i, j), v);
            assert_eq!(a.transpose().get(j, i), v);
        }
    }

    fn random_matrix(p: u64, m: usize, n: usize) -> impl Strategy<Value = SparseMatrix> {
        proptest::collection::vec(
            proptest::option::weighted(0.3, 1..p as i64),
            m * n,
        )
        .prop_map(move |cells| {
            let f = PrimeField::new(p).unwrap();
            let rows: Vec<Vec<i64>> = cells
                .chunks(n)
                .map(|r| r.iter().map(|c| c.unwrap_or(0)).collect())
                .collect();
            SparseMatrix::from_dense(f, &rows)
        })
    }

    fn random_unit_upper(p: u64, n: usize) -> impl Strategy<Value = SparseMatrix> {
        proptest::collection::vec(0..p as i64, n * n).prop_map(move |vals| {
            let f = PrimeField::new(p).unwrap();
            let rows: Vec<Vec<i64>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| match i.cmp(&j) {
                            std::cmp::Ordering::Less => vals[i * n + j],
                            std::cmp::Ordering::Equal => 1 + vals[i * n + j] % (p as i64 - 1).max(1),
                            std::cmp::Ordering::Greater => 0,
                        })
                        .collect()
                })
                .collect();
            SparseMatrix::from_dense(f, &rows)
        })
    }

    proptest! {
        #[test]
        fn multiply_is_associative(
            a in random_matrix(3, 6, 5),
            b in random_matrix(3, 5, 7),
            c in random_matrix(3, 7, 4),
        ) {
            let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
            let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn inverse_is_exact_and_triangular(u in random_unit_upper(5, 7)) {
            let order = GradedOrder::new((0..7).collect(), vec![0; 7]).unwrap();
            let inv = u.invert_unitriangular(&order).unwrap();
            prop_assert_eq!(u.multiply(&inv).unwrap(), SparseMatrix::identity(*u.field(), (0..7).collect()).unwrap());
            let pos: HashMap<Id, i64> = (0..7).map(|k| (k, k as i64)).collect();
            prop_assert!(inv.is_f_upper_triangular(&pos, &pos).unwrap());
        }

        #[test]
        fn rank_invariant_under_invertible_factors(
            a in random_matrix(2, 7, 6),
            l in random_unit_upper(2, 7),
            r in random_unit_upper(2, 6),
        ) {
            let lt = l.transpose();
            let prod = lt.multiply(&a).unwrap().multiply(&r).unwrap();
            prop_assert_eq!(prod.rank(), a.rank());
        }
    }
}
