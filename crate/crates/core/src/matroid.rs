//! Linear matroids over a prime field: independence, closure, contraction,
//! greedy optimal bases, and filtrations by flats.
//!
//! Elements are indexed `0..n` in ground-set order. Nothing is stored
//! extensionally; every query runs an incremental elimination over the
//! representing vectors.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::field::{Coeff, PrimeField};
use crate::spmat::SparseMatrix;

pub type ElementSet = BTreeSet<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatroidError {
    #[error("unknown element {0}")]
    UnknownElement(usize),
    #[error("independent set and contracted set overlap at {0}")]
    OverlapError(usize),
    #[error("the given set is not a basis")]
    NotABasis,
    #[error("level {0} of the filtration is not a flat")]
    NotAFiltration(usize),
    #[error("filtrations are not a modular pair")]
    NotModular,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("no generic-position representation of U({0},{1}) over GF({2})")]
    UnsupportedUniform(usize, usize, u32),
}

/// Row-echelon accumulator: inserting a vector reports whether it was
/// independent of everything inserted before.
#[derive(Debug, Clone)]
pub struct Echelon {
    field: PrimeField,
    // (pivot coordinate, vector normalized to 1 at the pivot)
    basis: Vec<(usize, Vec<Coeff>)>,
}

impl Echelon {
    pub fn new(field: PrimeField) -> Self {
        Echelon {
            field,
            basis: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Residue of `v` modulo the current span.
    pub fn reduce(&self, v: &[Coeff]) -> Vec<Coeff> {
        let f = self.field;
        let mut v = v.to_vec();
        for (k, b) in &self.basis {
            let c = v[*k];
            if c != 0 {
                for (x, y) in v.iter_mut().zip(b) {
                    *x = f.sub(*x, f.mul(c, *y));
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Coeff]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    pub fn insert(&mut self, v: &[Coeff]) -> bool {
        let f = self.field;
        let mut r = self.reduce(v);
        let Some(k) = r.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inv(r[k]).expect("nonzero");
        for x in r.iter_mut() {
            *x = f.mul(*x, inv);
        }
        self.basis.push((k, r));
        true
    }
}

/// A matroid represented by column vectors over a prime field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearMatroid {
    field: PrimeField,
    dim: usize,
    vectors: Vec<Vec<Coeff>>,
}

impl LinearMatroid {
    pub fn new(field: PrimeField, dim: usize, vectors: Vec<Vec<i64>>) -> Result<Self, MatroidError> {
        let mut out = Vec::with_capacity(vectors.len());
        for (e, v) in vectors.into_iter().enumerate() {
            if v.len() != dim {
                return Err(MatroidError::DimensionMismatch(format!(
                    "element {e} has length {} instead of {dim}",
                    v.len()
                )));
            }
            out.push(v.into_iter().map(|x| field.from_i64(x)).collect());
        }
        Ok(LinearMatroid {
            field,
            dim,
            vectors: out,
        })
    }

    /// The matroid of the columns of `m`, in column order.
    pub fn from_columns(m: &SparseMatrix) -> Self {
        let dense = m.to_dense();
        let vectors = (0..m.ncols())
            .map(|j| dense.iter().map(|row| row[j]).collect())
            .collect();
        LinearMatroid {
            field: *m.field(),
            dim: m.nrows(),
            vectors,
        }
    }

    /// The uniform matroid U(r, n) realized by columns in generic position:
    /// Vandermonde columns when `n ≤ p`, otherwise the standard basis plus
    /// the all-ones vector when `n = r + 1`.
    pub fn uniform(field: PrimeField, r: usize, n: usize) -> Result<Self, MatroidError> {
        let p = field.modulus() as usize;
        let vectors: Vec<Vec<i64>> = if r == 0 {
            vec![Vec::new(); n]
        } else if n <= r {
            (0..n)
                .map(|e| (0..r).map(|i| i64::from(i == e)).collect())
                .collect()
        } else if n <= p {
            (0..n)
                .map(|x| {
                    let mut pow = 1i64;
                    (0..r)
                        .map(|_| {
                            let v = pow;
                            pow = pow * x as i64 % p as i64;
                            v
                        })
                        .collect()
                })
                .collect()
        } else if n == r + 1 {
            (0..n)
                .map(|e| {
                    if e < r {
                        (0..r).map(|i| i64::from(i == e)).collect()
                    } else {
                        vec![1; r]
                    }
                })
                .collect()
        } else {
            return Err(MatroidError::UnsupportedUniform(r, n, field.modulus()));
        };
        Self::new(field, r, vectors)
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn ground(&self) -> ElementSet {
        (0..self.len()).collect()
    }

    pub fn vector(&self, e: usize) -> &[Coeff] {
        &self.vectors[e]
    }

    fn check(&self, s: &ElementSet) -> Result<(), MatroidError> {
        match s.iter().find(|&&e| e >= self.len()) {
            Some(&e) => Err(MatroidError::UnknownElement(e)),
            None => Ok(()),
        }
    }

    fn echelon_of(&self, s: &ElementSet) -> Echelon {
        let mut ech = Echelon::new(self.field);
        for &e in s {
            ech.insert(&self.vectors[e]);
        }
        ech
    }

    pub fn rank_of(&self, s: &ElementSet) -> Result<usize, MatroidError> {
        self.check(s)?;
        Ok(self.echelon_of(s).rank())
    }

    pub fn rank(&self) -> usize {
        self.echelon_of(&self.ground()).rank()
    }

    pub fn is_independent(&self, s: &ElementSet) -> Result<bool, MatroidError> {
        self.check(s)?;
        let mut ech = Echelon::new(self.field);
        Ok(s.iter().all(|&e| ech.insert(&self.vectors[e])))
    }

    pub fn is_basis(&self, b: &ElementSet) -> Result<bool, MatroidError> {
        Ok(self.is_independent(b)? && b.len() == self.rank())
    }

    /// Every element whose vector lies in the span of `s`.
    pub fn closure(&self, s: &ElementSet) -> Result<ElementSet, MatroidError> {
        self.check(s)?;
        let ech = self.echelon_of(s);
        Ok((0..self.len())
            .filter(|&e| ech.contains(&self.vectors[e]))
            .collect())
    }

    pub fn is_flat(&self, s: &ElementSet) -> Result<bool, MatroidError> {
        Ok(self.closure(s)? == *s)
    }

    /// Independence of `i` in the contraction by `c`.
    pub fn minor_independent(&self, i: &ElementSet, c: &ElementSet) -> Result<bool, MatroidError> {
        self.check(i)?;
        self.check(c)?;
        if let Some(&e) = i.intersection(c).next() {
            return Err(MatroidError::OverlapError(e));
        }
        let mut ech = self.echelon_of(c);
        Ok(i.iter().all(|&e| ech.insert(&self.vectors[e])))
    }

    /// Rank of the contraction `M / c`.
    pub fn contraction_rank(&self, c: &ElementSet) -> Result<usize, MatroidError> {
        self.check(c)?;
        let mut ech = self.echelon_of(c);
        let base = ech.rank();
        for e in 0..self.len() {
            if !c.contains(&e) {
                ech.insert(&self.vectors[e]);
            }
        }
        Ok(ech.rank() - base)
    }

    /// Greedy maximum-weight basis. Equal weights are broken by ground order.
    pub fn greedy_max_basis(&self, weight: &[f64]) -> Result<ElementSet, MatroidError> {
        if weight.len() != self.len() {
            return Err(MatroidError::DimensionMismatch(format!(
                "{} weights for {} elements",
                weight.len(),
                self.len()
            )));
        }
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| weight[b].total_cmp(&weight[a]));
        let mut ech = Echelon::new(self.field);
        Ok(idx
            .into_iter()
            .filter(|&e| ech.insert(&self.vectors[e]))
            .collect())
    }

    /// Greedy minimum-weight basis, via the negated weights.
    pub fn greedy_min_basis(&self, weight: &[f64]) -> Result<ElementSet, MatroidError> {
        let neg: Vec<f64> = weight.iter().map(|w| -w).collect();
        self.greedy_max_basis(&neg)
    }

    /// `{e : B − b + e is a basis}`.
    pub fn replacement_row(&self, basis: &ElementSet, b: usize) -> Result<ElementSet, MatroidError> {
        if !basis.contains(&b) || !self.is_basis(basis)? {
            return Err(MatroidError::NotABasis);
        }
        let mut rest = basis.clone();
        rest.remove(&b);
        let ech = self.echelon_of(&rest);
        Ok((0..self.len())
            .filter(|&e| !rest.contains(&e) && !ech.contains(&self.vectors[e]))
            .collect())
    }

    /// χ-minimality by comparing the weight of `basis` with a greedy optimum.
    pub fn is_minimal_basis(&self, basis: &ElementSet, filt: &Filtration) -> Result<bool, MatroidError> {
        if !self.is_basis(basis)? {
            return Err(MatroidError::NotABasis);
        }
        let w = filt.weights();
        let best = self.greedy_min_basis(&w)?;
        Ok(filt.weight_of(basis) == filt.weight_of(&best))
    }

    /// Alternate χ-minimality check by exchange triangularity: with `reference`
    /// a known minimal basis, `candidate` is minimal iff its replacement
    /// matrix against `reference` only pairs candidate elements with
    /// reference elements of equal or higher level.
    pub fn is_minimal_by_exchange(
        &self,
        reference: &ElementSet,
        candidate: &ElementSet,
        filt: &Filtration,
    ) -> Result<bool, MatroidError> {
        if !self.is_basis(candidate)? {
            return Err(MatroidError::NotABasis);
        }
        let rows: Vec<usize> = candidate.iter().copied().collect();
        let cols: Vec<usize> = reference.iter().copied().collect();
        let mut entries = Vec::new();
        for &f in &rows {
            let repl = self.replacement_row(candidate, f)?;
            for &b in &cols {
                if repl.contains(&b) {
                    entries.push((f, b, 1));
                }
            }
        }
        let exchange = SparseMatrix::from_entries(self.field, rows, cols, entries)
            .expect("ids come from element sets");
        let grades: HashMap<usize, i64> = (0..self.len()).map(|e| (e, filt.chi(e) as i64)).collect();
        Ok(exchange
            .is_f_upper_triangular(&grades, &grades)
            .expect("every element is graded"))
    }

    /// True iff rk(F_i ∩ G_j) + rk(F_i ∪ G_j) = rk(F_i) + rk(G_j) for all i, j.
    pub fn check_modular_pair(&self, f: &Filtration, g: &Filtration) -> Result<bool, MatroidError> {
        self.check_filtration(f)?;
        self.check_filtration(g)?;
        for i in 0..=f.top() {
            let fi = f.level(i);
            let rf = self.rank_of(&fi)?;
            for j in 0..=g.top() {
                let gj = g.level(j);
                let meet: ElementSet = fi.intersection(&gj).copied().collect();
                let join: ElementSet = fi.union(&gj).copied().collect();
                if self.rank_of(&meet)? + self.rank_of(&join)? != rf + self.rank_of(&gj)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// A basis minimal for both χ_F and χ_G, assembled level by level from
    /// χ_G-minimal bases of the minors F_i / F_{i-1}.
    pub fn doubly_minimal_basis(&self, f: &Filtration, g: &Filtration) -> Result<ElementSet, MatroidError> {
        if !self.check_modular_pair(f, g)? {
            return Err(MatroidError::NotModular);
        }
        let mut basis = ElementSet::new();
        let mut below = ElementSet::new();
        for i in 0..=f.top() {
            let mut layer: Vec<usize> = (0..self.len()).filter(|&e| f.chi(e) == i).collect();
            layer.sort_by_key(|&e| (g.chi(e), e));
            // Contracting F_{i-1} is the same as seeding the echelon with it.
            let mut ech = self.echelon_of(&below);
            for &e in &layer {
                if ech.insert(&self.vectors[e]) {
                    basis.insert(e);
                }
            }
            below.extend(layer);
        }
        Ok(basis)
    }

    fn check_filtration(&self, f: &Filtration) -> Result<(), MatroidError> {
        if f.chi.len() != self.len() {
            return Err(MatroidError::DimensionMismatch(format!(
                "filtration covers {} of {} elements",
                f.chi.len(),
                self.len()
            )));
        }
        Ok(())
    }
}

/// A nested sequence of flats, stored as its characteristic function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filtration {
    chi: Vec<usize>,
}

impl Filtration {
    /// Validates that every sublevel set `χ⁻¹{0..k}` is a flat of `m`.
    pub fn from_chi(m: &LinearMatroid, chi: Vec<usize>) -> Result<Self, MatroidError> {
        let filt = Filtration { chi };
        m.check_filtration(&filt)?;
        for k in 0..=filt.top() {
            if !m.is_flat(&filt.level(k))? {
                return Err(MatroidError::NotAFiltration(k));
            }
        }
        Ok(filt)
    }

    /// From nested level sets; elements absent from every level get the
    /// level after the last.
    pub fn from_levels(m: &LinearMatroid, levels: &[ElementSet]) -> Result<Self, MatroidError> {
        let mut chi = vec![levels.len(); m.len()];
        for (k, level) in levels.iter().enumerate().rev() {
            for &e in level {
                if e >= m.len() {
                    return Err(MatroidError::UnknownElement(e));
                }
                chi[e] = k;
            }
        }
        Self::from_chi(m, chi)
    }

    pub fn chi(&self, e: usize) -> usize {
        self.chi[e]
    }

    pub fn top(&self) -> usize {
        self.chi.iter().copied().max().unwrap_or(0)
    }

    pub fn level(&self, k: usize) -> ElementSet {
        (0..self.chi.len()).filter(|&e| self.chi[e] <= k).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.chi.iter().map(|&c| c as f64).collect()
    }

    pub fn weight_of(&self, s: &ElementSet) -> usize {
        s.iter().map(|&e| self.chi[e]).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(xs: &[usize]) -> ElementSet {
        xs.iter().copied().collect()
    }

    fn three_vectors() -> LinearMatroid {
        LinearMatroid::new(PrimeField::gf2(), 2, vec![vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap()
    }

    fn all_bases(m: &LinearMatroid) -> Vec<ElementSet> {
        let n = m.len();
        let r = m.rank();
        (0u32..1 << n)
            .filter(|mask| mask.count_ones() as usize == r)
            .map(|mask| (0..n).filter(|&e| mask & (1 << e) != 0).collect::<ElementSet>())
            .filter(|s| m.is_independent(s).unwrap())
            .collect()
    }

    fn random_matroid(rng: &mut ChaCha8Rng, p: u64) -> LinearMatroid {
        let n = rng.gen_range(1..=6);
        let dim = rng.gen_range(1..=4);
        let vectors = (0..n)
            .map(|_| (0..dim).map(|_| rng.gen_range(0..p as i64)).collect())
            .collect();
        LinearMatroid::new(PrimeField::new(p).unwrap(), dim, vectors).unwrap()
    }

    /// A random flat filtration: χ(e) = first level whose span contains e.
    fn random_filtration(rng: &mut ChaCha8Rng, m: &LinearMatroid) -> Filtration {
        let mut order: Vec<usize> = (0..m.len()).collect();
        for i in (1..order.len()).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let mut chi = vec![0; m.len()];
        let mut ech = Echelon::new(*m.field());
        let mut level = 0;
        // Loops sit in every flat, so they belong to level 0.
        let mut assigned: Vec<bool> = (0..m.len()).map(|e| ech.contains(m.vector(e))).collect();
        for &e in &order {
            if assigned[e] {
                continue;
            }
            if ech.insert(m.vector(e)) && rng.gen_bool(0.6) {
                level += 1;
            }
            for x in 0..m.len() {
                if !assigned[x] && ech.contains(m.vector(x)) {
                    chi[x] = level;
                    assigned[x] = true;
                }
            }
        }
        Filtration::from_chi(m, chi).unwrap()
    }

    #[test]
    fn independence_examples() {
        let m = three_vectors();
        assert!(m.is_independent(&set(&[])).unwrap());
        assert!(!m.is_independent(&set(&[0, 1, 2])).unwrap());
        let dup = LinearMatroid::new(PrimeField::gf2(), 2, vec![vec![1, 0], vec![1, 0]]).unwrap();
        assert!(!dup.is_independent(&set(&[0, 1])).unwrap());
        assert_eq!(m.is_independent(&set(&[5])), Err(MatroidError::UnknownElement(5)));
    }

    #[test]
    fn closure_examples() {
        let m = LinearMatroid::new(
            PrimeField::gf2(),
            2,
            vec![vec![1, 0], vec![0, 0], vec![0, 1], vec![1, 1]],
        )
        .unwrap();
        assert_eq!(m.closure(&set(&[])).unwrap(), set(&[1]));
        assert_eq!(m.closure(&m.ground()).unwrap(), m.ground());
        assert_eq!(m.closure(&set(&[0])).unwrap(), set(&[0, 1]));
        let m = three_vectors();
        assert_eq!(m.closure(&set(&[0])).unwrap(), set(&[0]));
    }

    #[test]
    fn minor_examples() {
        let m = three_vectors();
        assert_eq!(
            m.minor_independent(&set(&[2]), &set(&[])).unwrap(),
            m.is_independent(&set(&[2])).unwrap()
        );
        assert!(m.minor_independent(&set(&[2]), &set(&[0])).unwrap());
        let dup = LinearMatroid::new(PrimeField::gf2(), 2, vec![vec![1, 0], vec![1, 0]]).unwrap();
        assert!(!dup.minor_independent(&set(&[0]), &set(&[1])).unwrap());
        assert_eq!(
            m.minor_independent(&set(&[0]), &set(&[0])),
            Err(MatroidError::OverlapError(0))
        );
    }

    #[test]
    fn greedy_examples() {
        let m = three_vectors();
        let b = m.greedy_max_basis(&[3.0, 2.0, 1.0]).unwrap();
        assert_eq!(b, set(&[0, 1]));
        let equal = m.greedy_max_basis(&[1.0; 3]).unwrap();
        assert_eq!(equal, set(&[0, 1]));
        let zero = LinearMatroid::new(PrimeField::gf2(), 2, vec![vec![0, 0]]).unwrap();
        assert!(zero.greedy_max_basis(&[1.0]).unwrap().is_empty());
    }

    #[test]
    fn replacement_examples() {
        let m = LinearMatroid::new(
            PrimeField::gf2(),
            2,
            vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![0, 0]],
        )
        .unwrap();
        let b = set(&[0, 1]);
        let row = m.replacement_row(&b, 0).unwrap();
        assert_eq!(row, set(&[0, 2]));
        assert!(!row.contains(&3));
        assert_eq!(m.replacement_row(&set(&[0]), 0), Err(MatroidError::NotABasis));
    }

    #[test]
    fn minimal_basis_examples() {
        // e0 and e1 are parallel; e0 enters at level 0, e1 at level 1.
        let m = LinearMatroid::new(PrimeField::gf2(), 2, vec![vec![1, 0], vec![1, 0], vec![0, 1]]).unwrap();
        let f = Filtration::from_chi(&m, vec![0, 0, 1]).unwrap();
        assert!(Filtration::from_chi(&m, vec![0, 1, 1]).is_err());
        let greedy = m.greedy_min_basis(&f.weights()).unwrap();
        assert!(m.is_minimal_basis(&greedy, &f).unwrap());

        let g = Filtration::from_chi(&m, vec![0, 0, 0]).unwrap();
        assert!(m.is_minimal_basis(&set(&[1, 2]), &g).unwrap());

        let m2 = LinearMatroid::new(PrimeField::gf2(), 2, vec![vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let f2 = Filtration::from_chi(&m2, vec![0, 1, 1]).unwrap();
        assert!(m2.is_minimal_basis(&set(&[0, 1]), &f2).unwrap());
        assert!(!m2.is_minimal_basis(&set(&[1, 2]), &f2).unwrap());
        assert!(!m2.is_minimal_by_exchange(&set(&[0, 1]), &set(&[1, 2]), &f2).unwrap());
    }

    #[test]
    fn modular_examples() {
        let m = LinearMatroid::uniform(PrimeField::gf2(), 3, 4).unwrap();
        let f = Filtration::from_levels(&m, &[set(&[]), set(&[0, 1]), set(&[0, 1, 2, 3])]).unwrap();
        let g = Filtration::from_levels(&m, &[set(&[]), set(&[2, 3]), set(&[0, 1, 2, 3])]).unwrap();
        assert!(!m.check_modular_pair(&f, &g).unwrap());
        assert!(m.check_modular_pair(&f, &f).unwrap());
        assert_eq!(m.doubly_minimal_basis(&f, &g), Err(MatroidError::NotModular));

        // k²: F = <e1> ⊂ k², G = <e2> ⊂ k².
        let k2 = LinearMatroid::new(PrimeField::gf2(), 2, vec![vec![1, 0], vec![0, 1]]).unwrap();
        let f = Filtration::from_chi(&k2, vec![0, 1]).unwrap();
        let g = Filtration::from_chi(&k2, vec![1, 0]).unwrap();
        assert!(k2.check_modular_pair(&f, &g).unwrap());
        assert_eq!(k2.doubly_minimal_basis(&f, &g).unwrap(), set(&[0, 1]));

        let one = Filtration::from_chi(&k2, vec![0, 0]).unwrap();
        assert_eq!(k2.doubly_minimal_basis(&one, &one).unwrap(), set(&[0, 1]));
    }

    #[test]
    fn uniform_matroid_is_uniform() {
        for (p, r, n) in [(2u64, 3, 4), (5, 2, 5), (7, 3, 6), (3, 0, 2), (2, 2, 2)] {
            let m = LinearMatroid::uniform(PrimeField::new(p).unwrap(), r, n).unwrap();
            for mask in 0u32..1 << n {
                let s: ElementSet = (0..n).filter(|&e| mask & (1 << e) != 0).collect();
                assert_eq!(m.is_independent(&s).unwrap(), s.len() <= r, "U({r},{n}) over GF({p})");
            }
        }
        assert!(LinearMatroid::uniform(PrimeField::gf2(), 2, 4).is_err());
    }

    #[test]
    fn greedy_is_optimal_against_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let p = [2, 3, 5][rng.gen_range(0..3)];
            let m = random_matroid(&mut rng, p);
            let w: Vec<f64> = (0..m.len()).map(|_| rng.gen_range(-5..=5) as f64).collect();
            let b = m.greedy_max_basis(&w).unwrap();
            let weight = |s: &ElementSet| s.iter().map(|&e| w[e]).sum::<f64>();
            let best = all_bases(&m).iter().map(weight).fold(f64::NEG_INFINITY, f64::max);
            assert!(m.is_basis(&b).unwrap());
            assert_eq!(weight(&b), best);
        }
    }

    #[test]
    fn exchange_criterion_matches_weight_criterion() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..150 {
            let m = random_matroid(&mut rng, 2);
            let f = random_filtration(&mut rng, &m);
            let reference = m.greedy_min_basis(&f.weights()).unwrap();
            for b in all_bases(&m) {
                assert_eq!(
                    m.is_minimal_basis(&b, &f).unwrap(),
                    m.is_minimal_by_exchange(&reference, &b, &f).unwrap()
                );
            }
        }
    }

    #[test]
    fn contraction_rank_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let m = random_matroid(&mut rng, 3);
            let s: ElementSet = (0..m.len()).filter(|_| rng.gen_bool(0.5)).collect();
            assert_eq!(
                m.contraction_rank(&s).unwrap(),
                m.rank() - m.rank_of(&s).unwrap()
            );
        }
    }

    #[test]
    fn doubly_minimal_iff_intersections_are_bases() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let mut modular_seen = 0;
        let mut nonmodular_seen = 0;
        for _ in 0..150 {
            let m = random_matroid(&mut rng, 2);
            let f = random_filtration(&mut rng, &m);
            let g = random_filtration(&mut rng, &m);
            let intersections_ok = |b: &ElementSet| {
                (0..=f.top()).all(|i| {
                    (0..=g.top()).all(|j| {
                        let meet: ElementSet = f.level(i).intersection(&g.level(j)).copied().collect();
                        let hit = b.intersection(&meet).count();
                        hit == m.rank_of(&meet).unwrap()
                    })
                })
            };
            let bases = all_bases(&m);
            if m.check_modular_pair(&f, &g).unwrap() {
                modular_seen += 1;
                for b in &bases {
                    let doubly =
                        m.is_minimal_basis(b, &f).unwrap() && m.is_minimal_basis(b, &g).unwrap();
                    assert_eq!(doubly, intersections_ok(b));
                }
                let b = m.doubly_minimal_basis(&f, &g).unwrap();
                assert!(m.is_minimal_basis(&b, &f).unwrap());
                assert!(m.is_minimal_basis(&b, &g).unwrap());
                assert!(intersections_ok(&b));
            } else {
                nonmodular_seen += 1;
                assert!(!bases.iter().any(intersections_ok));
            }
        }
        assert!(modular_seen > 0);
        assert!(modular_seen + nonmodular_seen == 150);
    }
}
