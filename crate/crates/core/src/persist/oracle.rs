//! Textbook persistence: one boundary matrix over all cells in filtration
//! order, reduced left to right. Kept independent of the Pareto machinery so
//! it can serve as a reference.

use std::collections::HashMap;

use super::{Barcode, Interval, PersistError};
use crate::complex::FilteredComplex;
use crate::field::{Coeff, PrimeField};
use crate::matroid::{Filtration, LinearMatroid};
use crate::spmat::Id;

/// Largest complex the reference reduction accepts by default.
pub const ORACLE_CELL_CAP: usize = 250_000;

type Column = Vec<(usize, Coeff)>;

fn add_scaled(field: &PrimeField, y: &Column, a: Coeff, x: &Column) -> Column {
    let mut out = Vec::with_capacity(y.len() + x.len());
    let (mut i, mut j) = (0, 0);
    while i < y.len() || j < x.len() {
        let take_y = j == x.len() || (i < y.len() && y[i].0 < x[j].0);
        let take_x = i == y.len() || (j < x.len() && x[j].0 < y[i].0);
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

/// The reduced matrix `R = ∂V` with its change of basis `V`, over all cells
/// sorted by (grade, dimension, position within dimension).
#[derive(Debug, Clone)]
pub struct OracleReduction {
    pub cells: Vec<(Id, usize, i64)>,
    pub r: Vec<Column>,
    pub v: Vec<Column>,
    /// `pivot_of[i] = Some(j)` when row `i` is the lowest entry of column `j`.
    pub pivot_of: Vec<Option<usize>>,
}

impl OracleReduction {
    pub fn compute(k: &FilteredComplex, cap: usize) -> Result<Self, PersistError> {
        let total = k.num_cells();
        if total > cap {
            return Err(PersistError::TooLargeForOracle(total));
        }
        let field = *k.field();
        let mut cells: Vec<(Id, usize, i64, usize)> = Vec::with_capacity(total);
        for n in 0..k.num_dims() {
            let o = k.cells(n);
            for (pos, &id) in o.elements().iter().enumerate() {
                cells.push((id, n, o.grade_at(pos), pos));
            }
        }
        cells.sort_by_key(|&(_, n, g, pos)| (g, n, pos));
        let index: HashMap<Id, usize> = cells.iter().enumerate().map(|(i, c)| (c.0, i)).collect();
        let mut r: Vec<Column> = cells
            .iter()
            .map(|&(id, n, _, _)| {
                if n == 0 {
                    return Vec::new();
                }
                let mut col: Column = k
                    .boundary(n)
                    .column_by_id(id)
                    .expect("cell")
                    .into_iter()
                    .map(|(row, c)| (index[&row], c))
                    .collect();
                col.sort_unstable();
                col
            })
            .collect();
        let mut v: Vec<Column> = (0..total).map(|j| vec![(j, 1)]).collect();
        let mut pivot_of: Vec<Option<usize>> = vec![None; total];
        for j in 0..total {
            while let Some(&(low, c)) = r[j].last() {
                let Some(k) = pivot_of[low] else {
                    pivot_of[low] = Some(j);
                    break;
                };
                let ck = r[k].last().expect("pivot column").1;
                let a = field.neg(field.div(c, ck));
                r[j] = add_scaled(&field, &r[j], a, &r[k]);
                v[j] = add_scaled(&field, &v[j], a, &v[k]);
            }
        }
        Ok(OracleReduction {
            cells: cells.into_iter().map(|(id, n, g, _)| (id, n, g)).collect(),
            r,
            v,
            pivot_of,
        })
    }

    pub fn barcode(&self) -> Barcode {
        let mut intervals = Vec::new();
        for (i, &(id, n, g)) in self.cells.iter().enumerate() {
            if !self.r[i].is_empty() {
                continue;
            }
            let death = self.pivot_of[i].map(|j| self.cells[j]);
            intervals.push(Interval {
                dim: n,
                birth: g,
                death: death.map(|d| d.2),
                birth_cell: id,
                death_cell: death.map(|d| d.0),
            });
        }
        Barcode::new(intervals)
    }
}

/// Barcode by the reference reduction.
pub fn standard_reduction_oracle(k: &FilteredComplex) -> Result<Barcode, PersistError> {
    Ok(OracleReduction::compute(k, ORACLE_CELL_CAP)?.barcode())
}

/// Cycles and boundaries of one dimension as a filtered matroid pair: the
/// kernel filtration `F_i = Z_n(C_i)` and the image filtration
/// `G_i = B_n(C_i)`, closed off by `G_{L+1} = Z_n(C_L)`.
#[derive(Debug, Clone)]
pub struct KernelImageFiltrations {
    pub matroid: LinearMatroid,
    pub kernel: Filtration,
    pub image: Filtration,
    /// Original cell ids indexing the coordinates of each vector.
    pub coordinates: Vec<Id>,
}

/// Ground set: reference cycles of the unpaired-or-birth cells of dimension
/// `n` and the nonzero reduced boundaries of dimension `n + 1` cells. Both
/// are graded compatibly, so every intersection `F_i ∩ G_j` is spanned by
/// the ground elements it contains.
pub fn kernel_image_filtrations(k: &FilteredComplex, n: usize) -> Result<KernelImageFiltrations, PersistError> {
    let red = OracleReduction::compute(k, ORACLE_CELL_CAP)?;
    let coordinates: Vec<Id> = if n < k.num_dims() { k.cells(n).elements().to_vec() } else { Vec::new() };
    let coord_pos: HashMap<Id, usize> = coordinates.iter().enumerate().map(|(p, &id)| (id, p)).collect();
    let top = k.max_grade().max(0) as usize;
    let mut vectors: Vec<Vec<i64>> = Vec::new();
    let mut chi_f = Vec::new();
    let mut chi_g = Vec::new();
    let dense = |col: &Column| {
        let mut v = vec![0i64; coordinates.len()];
        let mut max_grade = 0;
        for &(i, c) in col {
            let (id, _, g) = red.cells[i];
            v[coord_pos[&id]] = c as i64;
            max_grade = max_grade.max(g);
        }
        (v, max_grade as usize)
    };
    for (i, &(_, dim, _)) in red.cells.iter().enumerate() {
        if dim == n && red.r[i].is_empty() {
            let (vec, g) = dense(&red.v[i]);
            let killed = red.pivot_of[i].map(|j| red.cells[j].2 as usize);
            vectors.push(vec);
            chi_f.push(g);
            chi_g.push(killed.unwrap_or(top + 1));
        }
        if dim == n + 1 && !red.r[i].is_empty() {
            let (vec, g) = dense(&red.r[i]);
            vectors.push(vec);
            chi_f.push(g);
            chi_g.push(red.cells[i].2 as usize);
        }
    }
    let matroid = LinearMatroid::new(*k.field(), coordinates.len(), vectors)?;
    // A birth cycle enters the image when its class dies, which is also when
    // the matching reduced boundary appears; closing under span makes both
    // characteristic functions exact.
    let close = |seed: &[usize]| -> Result<Vec<usize>, PersistError> {
        let levels = seed.iter().copied().max().unwrap_or(0);
        let mut chi = vec![levels; seed.len()];
        for lvl in (0..=levels).rev() {
            let gens = (0..seed.len()).filter(|&e| seed[e] <= lvl).collect();
            for e in matroid.closure(&gens)? {
                chi[e] = lvl;
            }
        }
        Ok(chi)
    };
    let kernel = Filtration::from_chi(&matroid, close(&chi_f)?)?;
    let image = Filtration::from_chi(&matroid, close(&chi_g)?)?;
    Ok(KernelImageFiltrations {
        matroid,
        kernel,
        image,
        coordinates,
    })
}
