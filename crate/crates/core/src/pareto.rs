//! Pareto pairs of a matrix under a pair of linear orders, the block
//! factors that eliminate them, and the iterated reductions built on top.
//!
//! Throughout, `A` has rows listed in the row order `<_F` and columns in the
//! column order `<_G`. A pair `(f, g)` is Pareto when `f` is the last row of
//! column `g` and `g` is the first column of row `f`.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::spmat::{GradedOrder, Id, MatrixError, SparseMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParetoError {
    #[error("matrix ids do not follow the given order: {0}")]
    OrderMismatch(String),
    #[error("pivot block is singular")]
    SingularPivotBlock,
    #[error("reduction did not finish within {0} iterations")]
    NonTermination(usize),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// A partial matching of rows to columns.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParetoPairing {
    // sorted by column position
    pairs: Vec<(Id, Id)>,
    by_row: HashMap<Id, Id>,
    by_col: HashMap<Id, Id>,
}

impl ParetoPairing {
    pub fn from_pairs(pairs: Vec<(Id, Id)>) -> Self {
        let by_row = pairs.iter().map(|&(f, g)| (f, g)).collect();
        let by_col = pairs.iter().map(|&(f, g)| (g, f)).collect();
        ParetoPairing {
            pairs,
            by_row,
            by_col,
        }
    }

    pub fn pairs(&self) -> &[(Id, Id)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = Id> + '_ {
        self.pairs.iter().map(|p| p.0)
    }

    pub fn cols(&self) -> impl Iterator<Item = Id> + '_ {
        self.pairs.iter().map(|p| p.1)
    }

    pub fn col_of(&self, f: Id) -> Option<Id> {
        self.by_row.get(&f).copied()
    }

    pub fn row_of(&self, g: Id) -> Option<Id> {
        self.by_col.get(&g).copied()
    }

    pub fn as_set(&self) -> HashSet<(Id, Id)> {
        self.pairs.iter().copied().collect()
    }

    fn extend(&mut self, other: &ParetoPairing) {
        for &(f, g) in &other.pairs {
            self.pairs.push((f, g));
            self.by_row.insert(f, g);
            self.by_col.insert(g, f);
        }
    }
}

/// Row and column elimination factors for one Pareto pairing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockFactors {
    pub l: SparseMatrix,
    pub r: SparseMatrix,
}

fn check_orders(a: &SparseMatrix, of: &GradedOrder, og: &GradedOrder) -> Result<(), ParetoError> {
    if a.rows() != of.elements() {
        return Err(ParetoError::OrderMismatch("rows".into()));
    }
    if a.cols() != og.elements() {
        return Err(ParetoError::OrderMismatch("columns".into()));
    }
    Ok(())
}

/// The doubly extremal support entries of `a`.
pub fn pareto_pairs(a: &SparseMatrix, of: &GradedOrder, og: &GradedOrder) -> Result<ParetoPairing, ParetoError> {
    check_orders(a, of, og)?;
    let mut row_min: Vec<Option<usize>> = vec![None; a.nrows()];
    for j in 0..a.ncols() {
        for &(i, _) in a.column(j) {
            row_min[i].get_or_insert(j);
        }
    }
    let pairs = (0..a.ncols())
        .filter_map(|j| {
            let &(i, _) = a.column(j).last()?;
            (row_min[i] == Some(j)).then(|| (a.rows()[i], a.cols()[j]))
        })
        .collect();
    Ok(ParetoPairing::from_pairs(pairs))
}

/// Factors `L`, `R` with `L·A·R` equal to the pairing's permutation on the
/// paired block and zero on the two off-diagonal blocks.
pub fn build_factors(
    a: &SparseMatrix,
    pairing: &ParetoPairing,
    of: &GradedOrder,
    og: &GradedOrder,
) -> Result<BlockFactors, ParetoError> {
    check_orders(a, of, og)?;
    let field = *a.field();
    let s_order = of.restrict(|f| pairing.col_of(f).is_some());
    let s_ids = s_order.elements().to_vec();
    let unpaired_rows: Vec<Id> = of.elements().iter().copied().filter(|&f| pairing.col_of(f).is_none()).collect();
    let unpaired_cols: Vec<Id> = og.elements().iter().copied().filter(|&g| pairing.row_of(g).is_none()).collect();

    // X with each paired column renamed to its row, so X is triangular in S.
    let mut x = Vec::new();
    let mut z = Vec::new();
    for (f, g, v) in a.entries() {
        if let Some(s) = pairing.row_of(g) {
            if pairing.col_of(f).is_some() {
                x.push((f, s, v as i64));
            } else {
                z.push((f, s, v as i64));
            }
        }
    }
    let x = SparseMatrix::from_entries(field, s_ids.clone(), s_ids.clone(), x)?;
    let x_inv = x.invert_unitriangular(&s_order).map_err(|e| match e {
        MatrixError::SingularDiagonal(_) | MatrixError::NotTriangular => ParetoError::SingularPivotBlock,
        other => other.into(),
    })?;
    let z = SparseMatrix::from_entries(field, unpaired_rows.clone(), s_ids.clone(), z)?;
    let zx = z.multiply(&x_inv)?;

    let mut l_entries: Vec<(Id, Id, i64)> = x_inv.entries().map(|(r, c, v)| (r, c, v as i64)).collect();
    l_entries.extend(zx.entries().map(|(r, c, v)| (r, c, field.neg(v) as i64)));
    l_entries.extend(unpaired_rows.iter().map(|&f| (f, f, 1)));
    let l = SparseMatrix::from_entries(field, of.elements().to_vec(), of.elements().to_vec(), l_entries)?;

    let y = a.submatrix(&s_ids, &unpaired_cols)?;
    let xy = x_inv.multiply(&y)?;
    let mut r_entries: Vec<(Id, Id, i64)> = og.elements().iter().map(|&g| (g, g, 1)).collect();
    r_entries.extend(xy.entries().map(|(s, g, v)| {
        let t = pairing.col_of(s).expect("row of X is paired");
        (t, g, field.neg(v) as i64)
    }));
    let r = SparseMatrix::from_entries(field, og.elements().to_vec(), og.elements().to_vec(), r_entries)?;
    Ok(BlockFactors { l, r })
}

/// One elimination step.
#[derive(Debug, Clone)]
pub struct ReduceStep {
    pub reduced: SparseMatrix,
    pub pairing: ParetoPairing,
    pub factors: BlockFactors,
}

pub fn reduce_step(a: &SparseMatrix, of: &GradedOrder, og: &GradedOrder) -> Result<ReduceStep, ParetoError> {
    let pairing = pareto_pairs(a, of, og)?;
    let factors = build_factors(a, &pairing, of, og)?;
    let reduced = factors.l.multiply(a)?.multiply(&factors.r)?;
    Ok(ReduceStep {
        reduced,
        pairing,
        factors,
    })
}

/// The block of `a` on unpaired rows and unpaired columns.
pub fn residual(a: &SparseMatrix, pairing: &ParetoPairing) -> Result<SparseMatrix, ParetoError> {
    let rows: Vec<Id> = a.rows().iter().copied().filter(|&f| pairing.col_of(f).is_none()).collect();
    let cols: Vec<Id> = a.cols().iter().copied().filter(|&g| pairing.row_of(g).is_none()).collect();
    Ok(a.submatrix(&rows, &cols)?)
}

/// Result of an iterated reduction.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub l_total: SparseMatrix,
    /// Identity for the light reduction, which never touches columns.
    pub r_total: SparseMatrix,
    pub pairing: ParetoPairing,
    pub reduced: SparseMatrix,
    pub iterations: usize,
}

/// Two-sided reduction: repeat `A ← L·A·R` until the pairs account for the
/// full rank.
pub fn matrix_reduce(a: &SparseMatrix, of: &GradedOrder, og: &GradedOrder) -> Result<Reduction, ParetoError> {
    check_orders(a, of, og)?;
    let field = *a.field();
    let rank = a.rank();
    let mut l_total = SparseMatrix::identity(field, of.elements().to_vec())?;
    let mut r_total = SparseMatrix::identity(field, og.elements().to_vec())?;
    let mut current = a.clone();
    let mut last = 0;
    for iteration in 1..=rank + 1 {
        let step = reduce_step(&current, of, og)?;
        if iteration > 1 && step.pairing.len() <= last {
            return Err(ParetoError::NonTermination(iteration));
        }
        last = step.pairing.len();
        l_total = step.factors.l.multiply(&l_total)?;
        r_total = r_total.multiply(&step.factors.r)?;
        current = step.reduced;
        if step.pairing.len() == rank {
            return Ok(Reduction {
                l_total,
                r_total,
                pairing: step.pairing,
                reduced: current,
                iterations: iteration,
            });
        }
    }
    Err(ParetoError::NonTermination(rank + 1))
}

/// Row-only reduction. Each round pairs the block on not-yet-paired rows and
/// columns, which is where the two-sided version would find its new pairs,
/// and eliminates with the corresponding row factor.
pub fn light_reduce(a: &SparseMatrix, of: &GradedOrder, og: &GradedOrder) -> Result<Reduction, ParetoError> {
    check_orders(a, of, og)?;
    let field = *a.field();
    let rank = a.rank();
    let mut l_total = SparseMatrix::identity(field, of.elements().to_vec())?;
    let mut current = a.clone();
    let mut pairing = ParetoPairing::default();
    for iteration in 1..=rank + 1 {
        let of_res = of.restrict(|f| pairing.col_of(f).is_none());
        let og_res = og.restrict(|g| pairing.row_of(g).is_none());
        let block = residual(&current, &pairing)?;
        let fresh = pareto_pairs(&block, &of_res, &og_res)?;
        if iteration > 1 && fresh.is_empty() {
            return Err(ParetoError::NonTermination(iteration));
        }
        let factors = build_factors(&block, &fresh, &of_res, &og_res)?;
        let mut entries: Vec<(Id, Id, i64)> = factors.l.entries().map(|(r, c, v)| (r, c, v as i64)).collect();
        entries.extend(pairing.rows().map(|f| (f, f, 1)));
        let l = SparseMatrix::from_entries(field, of.elements().to_vec(), of.elements().to_vec(), entries)?;
        current = l.multiply(&current)?;
        l_total = l.multiply(&l_total)?;
        pairing.extend(&fresh);
        if pairing.len() == rank {
            let mut pairs = pairing.pairs().to_vec();
            pairs.sort_by_key(|&(_, g)| og.position(g));
            return Ok(Reduction {
                l_total,
                r_total: SparseMatrix::identity(field, og.elements().to_vec())?,
                pairing: ParetoPairing::from_pairs(pairs),
                reduced: current,
                iterations: iteration,
            });
        }
    }
    Err(ParetoError::NonTermination(rank + 1))
}
