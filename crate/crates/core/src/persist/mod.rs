//! Chain reduction across all dimensions of a filtered complex, barcode
//! extraction and representative cycles.
//!
//! Each boundary matrix `A_n` is kept in the current bases of `C_{n-1}` and
//! `C_n`. One sweep finds the Pareto pairs of every residual (rows not yet
//! paired, columns not yet paired), then replaces the basis vector of each
//! new pairing row `s` of `A_n` by the residual part of its pairing column.
//! That vector is a boundary, so column `s` of `A_{n-1}` becomes zero, and
//! the columns of `A_n` are rewritten in the new basis. Sweeps repeat until
//! no residual has a pair left.

pub mod oracle;

use std::collections::{BTreeMap, BinaryHeap};

use serde::Serialize;
use thiserror::Error;

use crate::complex::{ComplexError, CompressedRips, DistanceMatrix, FilteredComplex};
use crate::field::{Coeff, PrimeField};
use crate::matroid::MatroidError;
use crate::morse::{greedy_matching, is_filtration_acyclic, linearize, seed_check, MorseError};
use crate::spmat::{Id, MatrixError, SparseMatrix, SparseVec};

pub use oracle::{
    kernel_image_filtrations, standard_reduction_oracle, KernelImageFiltrations, OracleReduction, ORACLE_CELL_CAP,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PersistError {
    #[error("chain reduction did not stabilize within {0} sweeps")]
    NonTermination(usize),
    #[error("complex has {0} cells, above the oracle limit")]
    TooLargeForOracle(usize),
    #[error("representatives need the reduction to keep its basis changes")]
    TransformsNotAccumulated,
    #[error("invalid representative: {0}")]
    InvalidRepresentative(String),
    #[error("basis change broke the chain complex in dimension {0}")]
    ConjugationFailure(usize),
    #[error("matching failed its checks: {0}")]
    BadMatching(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Morse(#[from] MorseError),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// A chain over the original cells.
pub type Chain = BTreeMap<Id, Coeff>;

/// One bar `[birth, death)` in grade units; `death = None` is infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Interval {
    pub dim: usize,
    pub birth: i64,
    pub death: Option<i64>,
    pub birth_cell: Id,
    pub death_cell: Option<Id>,
}

impl Interval {
    pub fn is_empty(&self) -> bool {
        self.death == Some(self.birth)
    }

    /// Sort key with infinite deaths last.
    pub fn key(&self) -> (usize, i64, i64) {
        (self.dim, self.birth, self.death.unwrap_or(i64::MAX))
    }
}

/// All intervals including those of length zero, sorted by
/// (dim, birth, death).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Barcode {
    intervals: Vec<Interval>,
}

impl Barcode {
    pub fn new(mut intervals: Vec<Interval>) -> Self {
        intervals.sort_by_key(|i| (i.key(), i.birth_cell));
        Barcode { intervals }
    }

    pub fn raw(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn reported(&self) -> Vec<Interval> {
        self.intervals.iter().filter(|i| !i.is_empty()).copied().collect()
    }

    pub fn in_dim(&self, dim: usize) -> Vec<Interval> {
        self.reported().into_iter().filter(|i| i.dim == dim).collect()
    }

    /// The reported bars as a sorted multiset of (dim, birth, death).
    pub fn multiset(&self) -> Vec<(usize, i64, Option<i64>)> {
        self.reported().iter().map(|i| (i.dim, i.birth, i.death)).collect()
    }

    /// Same as [`Barcode::multiset`] restricted to dimensions `≤ dim_max`.
    pub fn multiset_upto(&self, dim_max: usize) -> Vec<(usize, i64, Option<i64>)> {
        self.multiset().into_iter().filter(|i| i.0 <= dim_max).collect()
    }

    pub fn same_bars(&self, other: &Barcode) -> bool {
        self.multiset() == other.multiset()
    }

    /// Number of infinite bars per dimension `0..num_dims`.
    pub fn betti(&self, num_dims: usize) -> Vec<usize> {
        let mut b = vec![0; num_dims];
        for i in &self.intervals {
            if i.death.is_none() && i.dim < num_dims {
                b[i.dim] += 1;
            }
        }
        b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReduceOptions {
    /// Keep the replaced basis vectors, needed for representatives.
    pub accumulate: bool,
    /// After every sweep, recheck `A_{n-1} A_n = 0` and the ranks.
    pub verify: bool,
}

/// Final state of a chain reduction.
#[derive(Debug, Clone)]
pub struct ChainReduction {
    complex: FilteredComplex,
    // a[n][j]: column j of A_n, by row position in dimension n - 1.
    a: Vec<Vec<SparseVec>>,
    // For rows of A_n: pairing column and the sweep that paired it.
    row_pair: Vec<Vec<Option<(usize, usize)>>>,
    col_pair: Vec<Vec<Option<usize>>>,
    // basis[n][pos]: new basis vector of a dimension-n cell paired as a row
    // of A_{n+1}, by position in dimension n.
    basis: Option<Vec<Vec<Option<SparseVec>>>>,
    sweeps: usize,
}

/// Pareto pairs of the residual of one matrix: the last active row of a
/// column whose first active column is that same column.
fn residual_pairs(cols: &[SparseVec], nrows: usize, row_active: impl Fn(usize) -> bool, col_active: impl Fn(usize) -> bool) -> Vec<(usize, usize)> {
    let mut first = vec![usize::MAX; nrows];
    let mut lows = Vec::new();
    for (j, col) in cols.iter().enumerate() {
        if !col_active(j) {
            continue;
        }
        let mut low = None;
        for &(r, _) in col {
            if row_active(r) {
                if first[r] == usize::MAX {
                    first[r] = j;
                }
                low = Some(r);
            }
        }
        if let Some(r) = low {
            lows.push((r, j));
        }
    }
    lows.into_iter().filter(|&(r, j)| first[r] == j).collect()
}

fn matrix_of(field: PrimeField, rows: &[Id], cols: &[Id], data: &[SparseVec]) -> Result<SparseMatrix, MatrixError> {
    let entries = data
        .iter()
        .enumerate()
        .flat_map(|(j, c)| c.iter().map(move |&(r, v)| (rows[r], cols[j], v as i64)));
    SparseMatrix::from_entries(field, rows.to_vec(), cols.to_vec(), entries)
}

impl ChainReduction {
    fn field(&self) -> PrimeField {
        *self.complex.field()
    }

    fn top(&self) -> usize {
        self.complex.num_dims()
    }

    fn row_active(&self, n: usize, r: usize) -> bool {
        self.row_pair[n][r].is_none()
    }

    fn active_part(&self, n: usize, j: usize) -> SparseVec {
        self.a[n][j].iter().copied().filter(|&(r, _)| self.row_active(n, r)).collect()
    }

    fn sweep(&mut self) -> bool {
        let top = self.top();
        let mut found: Vec<Vec<(usize, usize)>> = vec![Vec::new(); top];
        for n in (1..top).rev() {
            let rp = &self.row_pair[n];
            let cp = &self.col_pair[n];
            found[n] = residual_pairs(&self.a[n], self.complex.count(n - 1), |r| rp[r].is_none(), |j| cp[j].is_none());
        }
        if found.iter().all(|f| f.is_empty()) {
            return false;
        }
        self.sweeps += 1;
        let field = self.field();
        let sweep = self.sweeps;
        // Pivot columns as they stood before this sweep.
        let snaps: Vec<Vec<(usize, SparseVec)>> = found
            .iter()
            .enumerate()
            .map(|(n, pairs)| pairs.iter().map(|&(s, t)| (s, self.active_part(n, t))).collect())
            .collect();
        for n in 1..top {
            for (&(s, t), (_, snap)) in found[n].iter().zip(&snaps[n]) {
                self.row_pair[n][s] = Some((t, sweep));
                self.col_pair[n][t] = Some(s);
                if n >= 2 {
                    debug_assert!(self.col_pair[n - 1][s].is_none(), "cell paired as row and column");
                    self.a[n - 1][s].clear();
                }
                if let Some(basis) = self.basis.as_mut() {
                    basis[n - 1][s] = Some(snap.clone());
                }
            }
            if found[n].is_empty() {
                continue;
            }
            let mut pivot = vec![usize::MAX; self.complex.count(n - 1)];
            for (i, (s, _)) in snaps[n].iter().enumerate() {
                pivot[*s] = i;
            }
            for col in self.a[n].iter_mut() {
                if col.iter().any(|&(r, _)| pivot[r] != usize::MAX) {
                    *col = rewrite(&field, col, &pivot, &snaps[n]);
                }
            }
        }
        true
    }

    fn check_conjugation(&self, ranks: &[usize]) -> Result<(), PersistError> {
        let field = self.field();
        let mats: Vec<SparseMatrix> = (1..self.top())
            .map(|n| {
                matrix_of(field, self.complex.cells(n - 1).elements(), self.complex.cells(n).elements(), &self.a[n])
            })
            .collect::<Result<_, _>>()?;
        for (i, m) in mats.iter().enumerate() {
            let n = i + 1;
            if m.rank() != ranks[i] {
                return Err(PersistError::ConjugationFailure(n));
            }
            if i > 0 && !mats[i - 1].multiply(m)?.is_zero() {
                return Err(PersistError::ConjugationFailure(n));
            }
        }
        Ok(())
    }

    pub fn complex(&self) -> &FilteredComplex {
        &self.complex
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// Pairs `(row, column)` of `A_n` by cell id, sorted by column position.
    pub fn pairs(&self, n: usize) -> Vec<(Id, Id)> {
        if n == 0 || n >= self.top() {
            return Vec::new();
        }
        let rows = self.complex.cells(n - 1).elements();
        let cols = self.complex.cells(n).elements();
        self.col_pair[n]
            .iter()
            .enumerate()
            .filter_map(|(j, s)| s.map(|s| (rows[s], cols[j])))
            .collect()
    }

    /// Cells of dimension `n` that pair with neither a face nor a coface.
    pub fn essential(&self, n: usize) -> Vec<Id> {
        if n >= self.top() {
            return Vec::new();
        }
        let cells = self.complex.cells(n).elements();
        (0..cells.len())
            .filter(|&p| !self.is_negative(n, p) && !self.is_positive(n, p))
            .map(|p| cells[p])
            .collect()
    }

    fn is_negative(&self, n: usize, p: usize) -> bool {
        n > 0 && self.col_pair[n][p].is_some()
    }

    fn is_positive(&self, n: usize, p: usize) -> bool {
        n + 1 < self.top() && self.row_pair[n + 1][p].is_some()
    }

    pub fn barcode(&self) -> Barcode {
        let mut out = Vec::new();
        for n in 0..self.top() {
            let cells = self.complex.cells(n);
            for (s, t) in self.pairs(n + 1) {
                out.push(Interval {
                    dim: n,
                    birth: cells.grade(s).expect("cell"),
                    death: self.complex.grade(t),
                    birth_cell: s,
                    death_cell: Some(t),
                });
            }
            for e in self.essential(n) {
                out.push(Interval {
                    dim: n,
                    birth: cells.grade(e).expect("cell"),
                    death: None,
                    birth_cell: e,
                    death_cell: None,
                });
            }
        }
        Barcode::new(out)
    }

    /// Writes a chain of the current `A_n` column space as a combination of
    /// pairing columns: returns `y` with `col = Σ y_t A_n[:, t]`, provided
    /// `col` is supported on pairing rows only.
    fn solve_by_pairs(&self, n: usize, col: &SparseVec) -> Result<Vec<(usize, Coeff)>, PersistError> {
        let field = self.field();
        let mut acc: BTreeMap<usize, Coeff> = col.iter().copied().collect();
        let mut heap: BinaryHeap<(usize, usize)> = BinaryHeap::new();
        for &(r, _) in col {
            match self.row_pair[n][r] {
                Some((_, sweep)) => heap.push((sweep, r)),
                None => {
                    return Err(PersistError::InvalidRepresentative(format!(
                        "dimension {n} column has a residual entry"
                    )))
                }
            }
        }
        let mut y = Vec::new();
        while let Some((_, s)) = heap.pop() {
            let c = acc.remove(&s).unwrap_or(0);
            if c == 0 {
                continue;
            }
            let (t, _) = self.row_pair[n][s].expect("pushed rows are paired");
            // Column t holds 1 at s and otherwise rows paired in earlier sweeps.
            for &(r, v) in &self.a[n][t] {
                if r == s {
                    continue;
                }
                let e = acc.entry(r).or_insert(0);
                let was_zero = *e == 0;
                *e = field.sub(*e, field.mul(c, v));
                if was_zero && *e != 0 {
                    let (_, sweep) = self.row_pair[n][r].expect("pairing columns meet only paired rows");
                    heap.push((sweep, r));
                }
            }
            y.push((t, c));
        }
        Ok(y)
    }

    fn chain(&self, n: usize, v: impl IntoIterator<Item = (usize, Coeff)>) -> Chain {
        let cells = self.complex.cells(n).elements();
        v.into_iter().filter(|&(_, c)| c != 0).map(|(p, c)| (cells[p], c)).collect()
    }

    /// A cycle for every interval and, for finite ones, a chain bounding it.
    pub fn representatives(&self) -> Result<Vec<Representative>, PersistError> {
        let basis = self.basis.as_ref().ok_or(PersistError::TransformsNotAccumulated)?;
        let field = self.field();
        let mut out = Vec::new();
        for interval in self.barcode().raw() {
            let n = interval.dim;
            let cells = self.complex.cells(n);
            let p = cells.position(interval.birth_cell).expect("cell");
            let rep = match interval.death_cell {
                None => {
                    let y = if n == 0 { Vec::new() } else { self.solve_by_pairs(n, &self.a[n][p])? };
                    let z = std::iter::once((p, 1)).chain(y.into_iter().map(|(t, c)| (t, field.neg(c))));
                    Representative {
                        interval: *interval,
                        cycle: self.chain(n, z),
                        witness: None,
                    }
                }
                Some(t_id) => {
                    let z = basis[n][p].clone().expect("positive cells keep their cycle");
                    let t = self.complex.cells(n + 1).position(t_id).expect("cell");
                    let rest: SparseVec = self.a[n + 1][t].iter().copied().filter(|&(r, _)| r != p).collect();
                    let y = self.solve_by_pairs(n + 1, &rest)?;
                    let w = std::iter::once((t, 1)).chain(y.into_iter().map(|(t, c)| (t, field.neg(c))));
                    Representative {
                        interval: *interval,
                        cycle: self.chain(n, z),
                        witness: Some(self.chain(n + 1, w)),
                    }
                }
            };
            out.push(rep);
        }
        Ok(out)
    }
}

/// Rewrites column `col` of `A_n` after the rows in `pivot` have taken the
/// snapshot columns as basis vectors: largest new pairing row first,
/// subtract the matching multiple of its snapshot and record the multiple
/// at that row.
fn rewrite(field: &PrimeField, col: &SparseVec, pivot: &[usize], snaps: &[(usize, SparseVec)]) -> SparseVec {
    let mut acc: BTreeMap<usize, Coeff> = col.iter().copied().collect();
    let mut heap: BinaryHeap<usize> = col.iter().map(|&(r, _)| r).filter(|&r| pivot[r] != usize::MAX).collect();
    let mut coeffs = Vec::new();
    while let Some(s) = heap.pop() {
        let c = acc.get(&s).copied().unwrap_or(0);
        if c == 0 {
            continue;
        }
        let (_, snap) = &snaps[pivot[s]];
        let lead = snap.last().expect("pivot column is nonzero");
        debug_assert_eq!(lead.0, s);
        let u = field.div(c, lead.1);
        for &(r, v) in snap {
            let e = acc.entry(r).or_insert(0);
            let was_zero = *e == 0;
            *e = field.sub(*e, field.mul(u, v));
            if was_zero && *e != 0 && pivot[r] != usize::MAX {
                heap.push(r);
            }
        }
        coeffs.push((s, u));
    }
    for (s, u) in coeffs {
        acc.insert(s, u);
    }
    acc.into_iter().filter(|&(_, c)| c != 0).collect()
}

/// Runs chain reduction on the complex in its own cell order.
pub fn chain_reduce(k: &FilteredComplex, opts: ReduceOptions) -> Result<ChainReduction, PersistError> {
    let top = k.num_dims();
    let mut a: Vec<Vec<SparseVec>> = vec![Vec::new(); top];
    let mut row_pair = vec![Vec::new(); top];
    let mut col_pair = vec![Vec::new(); top];
    for n in 1..top {
        let b = k.boundary(n);
        a[n] = (0..b.ncols()).map(|j| b.column(j).to_vec()).collect();
        row_pair[n] = vec![None; b.nrows()];
        col_pair[n] = vec![None; b.ncols()];
    }
    let basis = opts
        .accumulate
        .then(|| (0..top).map(|n| vec![None; k.count(n)]).collect());
    let mut state = ChainReduction {
        complex: k.clone(),
        a,
        row_pair,
        col_pair,
        basis,
        sweeps: 0,
    };
    let ranks: Vec<usize> = if opts.verify { (1..top).map(|n| k.boundary(n).rank()).collect() } else { Vec::new() };
    let guard = k.num_cells().max(1);
    while state.sweep() {
        if state.sweeps > guard {
            return Err(PersistError::NonTermination(guard));
        }
        if opts.verify {
            state.check_conjugation(&ranks)?;
        }
    }
    Ok(state)
}

/// A cycle for one interval; for finite intervals `witness` bounds it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Representative {
    pub interval: Interval,
    pub cycle: Chain,
    pub witness: Option<Chain>,
}

/// Boundary of a chain of dimension-`n` cells.
pub fn boundary_of(k: &FilteredComplex, n: usize, chain: &Chain) -> Result<Chain, PersistError> {
    let field = *k.field();
    let mut out = Chain::new();
    if n == 0 {
        return Ok(out);
    }
    for (&cell, &c) in chain {
        for (row, v) in k.boundary(n).column_by_id(cell)? {
            let e = out.entry(row).or_insert(0);
            *e = field.add(*e, field.mul(c, v));
        }
    }
    out.retain(|_, c| *c != 0);
    Ok(out)
}

fn max_grade(k: &FilteredComplex, chain: &Chain) -> Option<i64> {
    chain.keys().filter_map(|&id| k.grade(id)).max()
}

/// Checks that `z` is a cycle born at the interval's birth and that a
/// finite interval's witness bounds `z` and appears at its death.
pub fn validate_representative(k: &FilteredComplex, rep: &Representative) -> Result<(), PersistError> {
    let i = &rep.interval;
    let bad = |m: &str| Err(PersistError::InvalidRepresentative(format!("{m} for {i:?}")));
    if !boundary_of(k, i.dim, &rep.cycle)?.is_empty() {
        return bad("cycle has nonzero boundary");
    }
    if max_grade(k, &rep.cycle) != Some(i.birth) {
        return bad("cycle grade differs from birth");
    }
    match (&rep.witness, i.death) {
        (None, None) => Ok(()),
        (Some(w), Some(d)) => {
            if boundary_of(k, i.dim + 1, w)? != rep.cycle {
                return bad("witness does not bound the cycle");
            }
            if max_grade(k, w) != Some(d) {
                return bad("witness grade differs from death");
            }
            Ok(())
        }
        _ => bad("witness present iff death is finite"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PersistOptions {
    /// Reorder cells by an acyclic matching before reducing.
    pub morse: bool,
    pub generators: bool,
    pub verify: bool,
}

#[derive(Debug, Clone)]
pub struct Persistence {
    pub barcode: Barcode,
    pub representatives: Option<Vec<Representative>>,
    pub matched_pairs: usize,
    pub sweeps: usize,
}

/// Barcode, and optionally representatives, of a filtered complex.
pub fn persistence(k: &FilteredComplex, opts: PersistOptions) -> Result<Persistence, PersistError> {
    let mut matched_pairs = 0;
    let reordered;
    let complex = if opts.morse {
        let v = greedy_matching(k);
        if !is_filtration_acyclic(&v, k) {
            return Err(PersistError::BadMatching("not acyclic within grades".into()));
        }
        let orders = linearize(&v, k)?;
        if !seed_check(&v, k, &orders) {
            return Err(PersistError::BadMatching("pairs are not Pareto pairs after reordering".into()));
        }
        matched_pairs = v.len();
        reordered = k.reordered(orders)?;
        &reordered
    } else {
        k
    };
    let red = chain_reduce(
        complex,
        ReduceOptions {
            accumulate: opts.generators,
            verify: opts.verify,
        },
    )?;
    let representatives = if opts.generators {
        let reps = red.representatives()?;
        if opts.verify {
            for r in &reps {
                validate_representative(complex, r)?;
            }
        }
        Some(reps)
    } else {
        None
    };
    Ok(Persistence {
        barcode: red.barcode(),
        representatives,
        matched_pairs,
        sweeps: red.sweeps(),
    })
}

/// Ranks of homology at the final grade, dimensions `0..=n_max`.
pub fn betti_numbers(k: &FilteredComplex, n_max: usize) -> Result<Vec<usize>, PersistError> {
    let red = chain_reduce(k, ReduceOptions::default())?;
    Ok(red.barcode().betti(n_max + 1))
}

pub fn euler_characteristic(k: &FilteredComplex) -> i64 {
    (0..k.num_dims()).map(|n| if n % 2 == 0 { 1 } else { -1 } * k.count(n) as i64).sum()
}

/// A Rips complex, the way it was built and its persistence.
#[derive(Debug, Clone)]
pub struct RipsPersistence {
    pub complex: FilteredComplex,
    pub persistence: Persistence,
    pub dim_max: usize,
}

/// Persistence of the Rips filtration in dimensions `≤ dim_max`. With
/// `morse` the top dimension `dim_max + 1` is built compressed and the
/// remaining cells are reordered by a matching; otherwise the full
/// `(dim_max + 1)`-skeleton is reduced as is. Bars above `dim_max` are cut.
pub fn rips_persistence(
    field: PrimeField,
    d: &DistanceMatrix,
    dim_max: usize,
    threshold: f64,
    opts: PersistOptions,
) -> Result<RipsPersistence, PersistError> {
    let complex = if opts.morse {
        CompressedRips::build(field, d, dim_max + 1, threshold)?.complex
    } else {
        crate::complex::vietoris_rips(field, d, dim_max + 1, threshold)?
    };
    let mut persistence = persistence(&complex, opts)?;
    let keep = |i: &Interval| i.dim <= dim_max;
    persistence.barcode = Barcode::new(persistence.barcode.raw().iter().copied().filter(keep).collect());
    if let Some(reps) = persistence.representatives.as_mut() {
        reps.retain(|r| keep(&r.interval));
    }
    Ok(RipsPersistence {
        complex,
        persistence,
        dim_max,
    })
}
