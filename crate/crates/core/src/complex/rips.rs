//! Clique complexes: Vietoris–Rips filtrations of a distance matrix and the
//! unfiltered chessboard and matching complexes.
//!
//! Simplices are sorted vertex lists. Within a dimension they are ordered by
//! grade, then lexicographically; that order is also the one used to decide
//! which cells the top-dimension shortcut pairs off.

use std::cmp::Ordering;
use std::collections::HashMap;

use super::{BoundaryEntry, Cell, ComplexError, FilteredComplex};
use crate::field::PrimeField;
use crate::spmat::{axpy, sparse_get, GradedOrder, Id, SparseMatrix, SparseVec};

/// Default bound on the number of cells a builder may create.
pub const DEFAULT_CELL_CAP: usize = 5_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    /// From a full square matrix.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, ComplexError> {
        let n = rows.len();
        let mut d = Vec::with_capacity(n * n);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(ComplexError::InvalidDistanceMatrix(format!("row {i} has {} entries", r.len())));
            }
            // + 0.0 turns -0.0 into 0.0, keeping level lookups exact
            d.extend(r.iter().map(|v| v + 0.0));
        }
        let m = DistanceMatrix { n, d };
        for i in 0..n {
            if m.get(i, i) != 0.0 {
                return Err(ComplexError::InvalidDistanceMatrix(format!("d({i},{i}) is not zero")));
            }
            for j in 0..n {
                let v = m.get(i, j);
                if v.is_nan() || v < 0.0 {
                    return Err(ComplexError::InvalidDistanceMatrix(format!("d({i},{j}) = {v}")));
                }
                if v != m.get(j, i) {
                    return Err(ComplexError::InvalidDistanceMatrix(format!("d({i},{j}) != d({j},{i})")));
                }
            }
        }
        Ok(m)
    }

    /// From the strict lower triangle: row `i` holds `d(i+1, 0..=i)`.
    pub fn from_lower(lower: &[Vec<f64>]) -> Result<Self, ComplexError> {
        let n = lower.len() + 1;
        let mut rows = vec![vec![0.0; n]; n];
        for (k, r) in lower.iter().enumerate() {
            let i = k + 1;
            if r.len() != i {
                return Err(ComplexError::InvalidDistanceMatrix(format!(
                    "lower row {k} has {} entries, expected {i}",
                    r.len()
                )));
            }
            for (j, &v) in r.iter().enumerate() {
                rows[i][j] = v;
                rows[j][i] = v;
            }
        }
        Self::new(rows)
    }

    /// Euclidean distances between points.
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self, ComplexError> {
        let rows = points
            .iter()
            .map(|p| {
                points
                    .iter()
                    .map(|q| p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
                    .collect()
            })
            .collect();
        Self::new(rows)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn lower_rows(&self) -> Vec<Vec<f64>> {
        (1..self.n).map(|i| (0..i).map(|j| self.get(i, j)).collect()).collect()
    }
}

/// Calls `visit` on every clique with `k + 1` vertices, in lexicographic order.
fn for_each_clique(
    n: usize,
    k: usize,
    adjacent: &dyn Fn(usize, usize) -> bool,
    visit: &mut dyn FnMut(&[usize]) -> Result<(), ComplexError>,
) -> Result<(), ComplexError> {
    fn extend(
        n: usize,
        want: usize,
        stack: &mut Vec<usize>,
        adjacent: &dyn Fn(usize, usize) -> bool,
        visit: &mut dyn FnMut(&[usize]) -> Result<(), ComplexError>,
    ) -> Result<(), ComplexError> {
        if stack.len() == want {
            return visit(stack);
        }
        let start = stack.last().map_or(0, |&v| v + 1);
        for v in start..n {
            if stack.iter().all(|&u| adjacent(u, v)) {
                stack.push(v);
                extend(n, want, stack, adjacent, visit)?;
                stack.pop();
            }
        }
        Ok(())
    }
    extend(n, k + 1, &mut Vec::with_capacity(k + 1), adjacent, visit)
}

/// The clique complex of a graph up to dimension `max_dim`, with a grade
/// for each simplex that must be monotone under taking faces.
pub fn clique_complex(
    field: PrimeField,
    n_vertices: usize,
    adjacent: &dyn Fn(usize, usize) -> bool,
    grade: &dyn Fn(&[usize]) -> i64,
    max_dim: usize,
    cap: usize,
) -> Result<FilteredComplex, ComplexError> {
    if n_vertices == 0 {
        return Ok(FilteredComplex::empty(field));
    }
    let mut layers: Vec<Vec<(i64, Vec<usize>)>> = Vec::new();
    let mut total = 0usize;
    for k in 0..=max_dim {
        let mut layer = Vec::new();
        for_each_clique(n_vertices, k, adjacent, &mut |s| {
            total += 1;
            if total > cap {
                return Err(ComplexError::TooLarge(cap));
            }
            layer.push((grade(s), s.to_vec()));
            Ok(())
        })?;
        if layer.is_empty() {
            break;
        }
        layer.sort_by_key(|(g, _)| *g);
        layers.push(layer);
    }
    let mut next_id = 0;
    let mut ids: Vec<HashMap<Vec<usize>, Id>> = Vec::new();
    let mut cells = Vec::new();
    let mut vertices = HashMap::new();
    for (dim, layer) in layers.iter().enumerate() {
        let mut map = HashMap::with_capacity(layer.len());
        for (g, s) in layer {
            cells.push(Cell { id: next_id, dim, grade: *g });
            vertices.insert(next_id, s.clone());
            map.insert(s.clone(), next_id);
            next_id += 1;
        }
        ids.push(map);
    }
    let mut entries = Vec::new();
    for (dim, layer) in layers.iter().enumerate().skip(1) {
        for (_, s) in layer {
            let col = ids[dim][s];
            for (i, f) in facets(s) {
                entries.push(BoundaryEntry {
                    dim,
                    row: ids[dim - 1][&f],
                    col,
                    coeff: sign(i),
                });
            }
        }
    }
    Ok(FilteredComplex::from_cells(field, &cells, &entries)?.with_vertices(vertices))
}

fn sign(i: usize) -> i64 {
    if i.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn facets(s: &[usize]) -> impl Iterator<Item = (usize, Vec<usize>)> + '_ {
    let k = if s.len() > 1 { s.len() } else { 0 };
    (0..k).map(move |i| {
        let mut f = s.to_vec();
        f.remove(i);
        (i, f)
    })
}

/// Sorted distinct values of `{0} ∪ {d(i,j) ≤ threshold}`.
fn rips_levels(d: &DistanceMatrix, threshold: f64) -> Vec<f64> {
    let mut levels = vec![0.0];
    for i in 0..d.len() {
        for j in 0..i {
            let v = d.get(i, j);
            if v <= threshold {
                levels.push(v);
            }
        }
    }
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    levels
}

/// The Vietoris–Rips filtration truncated at `threshold`, with simplices of
/// dimension at most `dim_max`. Grades index the attached level table.
pub fn vietoris_rips(
    field: PrimeField,
    d: &DistanceMatrix,
    dim_max: usize,
    threshold: f64,
) -> Result<FilteredComplex, ComplexError> {
    let rips = Rips::new(d, threshold);
    let complex = clique_complex(
        field,
        d.len(),
        &|u, v| d.get(u, v) <= threshold,
        &|s| rips.grade(s).expect("cliques are below the threshold"),
        dim_max,
        DEFAULT_CELL_CAP,
    )?;
    Ok(complex.with_levels(rips.levels))
}

/// Rooks on an `m × n` board: simplices are non-attacking placements.
pub fn chessboard_complex(field: PrimeField, m: usize, n: usize, cap: usize) -> Result<FilteredComplex, ComplexError> {
    let adjacent = |a: usize, b: usize| a / n != b / n && a % n != b % n;
    clique_complex(field, m * n, &adjacent, &|_| 0, m.min(n).saturating_sub(1), cap)
}

/// Matchings of the complete graph on `k` vertices: simplices are sets of
/// pairwise disjoint edges.
pub fn matching_complex(field: PrimeField, k: usize, cap: usize) -> Result<FilteredComplex, ComplexError> {
    let edges: Vec<(usize, usize)> = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).collect();
    let adjacent = |x: usize, y: usize| {
        let (a, b) = edges[x];
        let (c, d) = edges[y];
        a != c && a != d && b != c && b != d
    };
    clique_complex(field, edges.len(), &adjacent, &|_| 0, (k / 2).saturating_sub(1), cap)
}

/// Distance-matrix queries on implicit Rips simplices.
struct Rips<'a> {
    d: &'a DistanceMatrix,
    threshold: f64,
    levels: Vec<f64>,
}

impl<'a> Rips<'a> {
    fn new(d: &'a DistanceMatrix, threshold: f64) -> Self {
        Rips {
            d,
            threshold,
            levels: rips_levels(d, threshold),
        }
    }

    fn diameter(&self, s: &[usize]) -> f64 {
        let mut m = 0.0f64;
        for (i, &u) in s.iter().enumerate() {
            for &v in &s[i + 1..] {
                m = m.max(self.d.get(u, v));
            }
        }
        m
    }

    fn grade_of_value(&self, v: f64) -> Option<i64> {
        if v > self.threshold {
            return None;
        }
        self.levels
            .binary_search_by(|x| x.total_cmp(&v))
            .ok()
            .map(|g| g as i64)
    }

    fn grade(&self, s: &[usize]) -> Option<i64> {
        self.grade_of_value(self.diameter(s))
    }

    fn key_cmp(a: (i64, &[usize]), b: (i64, &[usize])) -> Ordering {
        a.0.cmp(&b.0).then_with(|| a.1.cmp(b.1))
    }

    /// Facet that comes last in the (grade, lex) order.
    fn max_facet(&self, s: &[usize]) -> Option<(i64, Vec<usize>)> {
        facets(s)
            .map(|(_, f)| (self.grade(&f).expect("faces of a simplex are simplices"), f))
            .max_by(|a, b| Self::key_cmp((a.0, &a.1), (b.0, &b.1)))
    }

    /// Cofacet that comes first in the (grade, lex) order.
    fn min_cofacet(&self, s: &[usize]) -> Option<(i64, Vec<usize>)> {
        let base = self.diameter(s);
        let mut best: Option<(i64, Vec<usize>)> = None;
        for v in 0..self.d.len() {
            if s.binary_search(&v).is_ok() {
                continue;
            }
            let diam = s.iter().fold(base, |m, &u| m.max(self.d.get(u, v)));
            let Some(g) = self.grade_of_value(diam) else { continue };
            if best.as_ref().is_some_and(|b| b.0 < g) {
                continue;
            }
            let mut t = s.to_vec();
            let at = t.partition_point(|&u| u < v);
            t.insert(at, v);
            if best.as_ref().is_none_or(|b| Self::key_cmp((g, &t), (b.0, &b.1)).is_lt()) {
                best = Some((g, t));
            }
        }
        best
    }

    /// The cofacet `τ` paired with `s`, when `s` is the last facet of `τ`,
    /// `τ` is the first cofacet of `s`, and both share a grade.
    fn partner_up(&self, s: &[usize], grade: i64) -> Option<Vec<usize>> {
        let (g, t) = self.min_cofacet(s)?;
        if g != grade {
            return None;
        }
        let (_, back) = self.max_facet(&t)?;
        (back == s).then_some(t)
    }

    fn matched_down(&self, t: &[usize], grade: i64) -> bool {
        match self.max_facet(t) {
            Some((g, s)) if g == grade => self.partner_up(&s, g).is_some_and(|back| back == t),
            _ => false,
        }
    }
}

/// Per-dimension cell counts of a Rips complex under the equal-grade pairing
/// of last facets with first cofacets: all cells `E_n`, cells not paired
/// with a facet `X_n`, and critical cells `M_n`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MorseCounts {
    pub e: Vec<usize>,
    pub x: Vec<usize>,
    pub m: Vec<usize>,
}

impl MorseCounts {
    /// Critical cells over all cells, summed over every dimension.
    pub fn compression_ratio(&self) -> f64 {
        let e: usize = self.e.iter().sum();
        let m: usize = self.m.iter().sum();
        if e == 0 {
            1.0
        } else {
            m as f64 / e as f64
        }
    }

    /// Counts for a Rips complex through dimension `top`, streaming every
    /// dimension without storing simplices.
    pub fn rips(d: &DistanceMatrix, top: usize, threshold: f64) -> Result<Self, ComplexError> {
        let rips = Rips::new(d, threshold);
        let adjacent = |u: usize, v: usize| d.get(u, v) <= threshold;
        let mut counts = MorseCounts::default();
        let mut up_top = 0;
        for k in 0..=top {
            let (mut e, mut down) = (0usize, 0usize);
            for_each_clique(d.len(), k, &adjacent, &mut |s| {
                e += 1;
                let g = rips.grade(s).expect("clique");
                if k > 0 && rips.matched_down(s, g) {
                    down += 1;
                } else if k == top && rips.partner_up(s, g).is_some() {
                    up_top += 1;
                }
                Ok(())
            })?;
            counts.e.push(e);
            counts.x.push(e - down);
        }
        for k in 0..=top {
            let up = if k < top { counts.e[k + 1] - counts.x[k + 1] } else { up_top };
            counts.m.push(counts.x[k] - up);
        }
        Ok(counts)
    }
}

/// A Rips complex whose top dimension is generated on the fly and never
/// stored in full. Top cells paired with a cofacet are skipped, top cells
/// paired with a facet are eliminated together with that facet, and the
/// remaining top cells carry boundaries with the eliminated facets solved
/// out. Homology below the top dimension is unchanged apart from dropping
/// intervals of length zero.
#[derive(Debug, Clone)]
pub struct CompressedRips {
    pub complex: FilteredComplex,
    pub counts: MorseCounts,
    pub top: usize,
}

impl CompressedRips {
    pub fn build(field: PrimeField, d: &DistanceMatrix, top: usize, threshold: f64) -> Result<Self, ComplexError> {
        if top == 0 || d.len() <= 1 {
            let complex = vietoris_rips(field, d, top, threshold)?;
            let counts = MorseCounts::rips(d, top, threshold)?;
            return Ok(CompressedRips { complex, counts, top });
        }
        let lower = vietoris_rips(field, d, top - 1, threshold)?;
        let counts = MorseCounts::rips(d, top, threshold)?;
        let rips = Rips::new(d, threshold);
        if lower.num_dims() < top {
            // No simplices of dimension top - 1, hence none of dimension top.
            return Ok(CompressedRips { complex: lower, counts, top });
        }
        let below = lower.cells(top - 1);
        let vertex_ids: HashMap<Vec<usize>, Id> = below
            .elements()
            .iter()
            .map(|&id| (lower.vertices(id).expect("rips cell").to_vec(), id))
            .collect();
        // Facets eliminated together with their cofacet partner.
        let mut partner: HashMap<Id, Vec<usize>> = HashMap::new();
        for (&id, &g) in below.elements().iter().zip(below.grades()) {
            if let Some(t) = rips.partner_up(lower.vertices(id).expect("rips cell"), g) {
                partner.insert(id, t);
            }
        }
        let kept = below.restrict(|id| !partner.contains_key(&id));
        let boundary_of = |t: &[usize]| -> SparseVec {
            let mut v: SparseVec = facets(t)
                .map(|(i, f)| {
                    let id = vertex_ids[&f];
                    (below.position(id).expect("facet"), field.from_i64(sign(i)))
                })
                .collect();
            v.sort_unstable();
            v
        };
        let mut cells: Vec<(Id, i64)> = Vec::new();
        let mut columns: Vec<(Id, SparseVec)> = Vec::new();
        let mut vertices: HashMap<Id, Vec<usize>> = HashMap::new();
        let mut next_id = lower.all_cells().iter().map(|c| c.id + 1).max().unwrap_or(0);
        for_each_clique(d.len(), top, &|u, v| d.get(u, v) <= threshold, &mut |t| {
            let g = rips.grade(t).expect("clique");
            if rips.matched_down(t, g) || rips.partner_up(t, g).is_some() {
                return Ok(());
            }
            // Solve out eliminated facets, last one first: each partner
            // column has its facet as its last entry.
            let mut col = boundary_of(t);
            while let Some(&(pos, c)) = col
                .iter()
                .rev()
                .find(|&&(pos, _)| partner.contains_key(&below.elements()[pos]))
            {
                let s = below.elements()[pos];
                let other = boundary_of(&partner[&s]);
                let a = sparse_get(&other, pos);
                col = axpy(&field, &col, field.neg(field.div(c, a)), &other);
            }
            cells.push((next_id, g));
            columns.push((next_id, col));
            vertices.insert(next_id, t.to_vec());
            next_id += 1;
            Ok(())
        })?;

        // Reassemble: lower dimensions as built, with the eliminated facets
        // removed from dimension top - 1, plus the surviving top cells.
        let mut orders: Vec<GradedOrder> = (0..top - 1).map(|n| lower.cells(n).clone()).collect();
        orders.push(kept.clone());
        let top_order = GradedOrder::from_graded(cells)?;
        orders.push(top_order.clone());
        let mut boundaries: Vec<SparseMatrix> = (1..top - 1).map(|n| lower.boundary(n).clone()).collect();
        if top >= 2 {
            boundaries.push(lower.boundary(top - 1).submatrix(lower.cells(top - 2).elements(), kept.elements())?);
        }
        let entries = columns
            .iter()
            .flat_map(|(id, col)| col.iter().map(|&(pos, c)| (below.elements()[pos], *id, c as i64)));
        boundaries.push(SparseMatrix::from_entries(
            field,
            kept.elements().to_vec(),
            top_order.elements().to_vec(),
            entries,
        )?);
        let mut all_vertices: HashMap<Id, Vec<usize>> = HashMap::new();
        for c in lower.all_cells() {
            if c.dim < top - 1 || kept.position(c.id).is_some() {
                all_vertices.insert(c.id, lower.vertices(c.id).expect("rips cell").to_vec());
            }
        }
        all_vertices.extend(vertices);
        let complex = FilteredComplex::from_boundaries(field, orders, boundaries)?
            .with_levels(rips.levels.clone())
            .with_vertices(all_vertices);
        Ok(CompressedRips { complex, counts, top })
    }
}
