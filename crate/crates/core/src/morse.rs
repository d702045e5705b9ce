//! Acyclic matchings on filtered complexes: construction by coreduction,
//! acyclicity checks, and the reordering that makes every matched pair a
//! Pareto pair of its boundary matrix.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet};

use thiserror::Error;

use crate::complex::FilteredComplex;
use crate::pareto::pareto_pairs;
use crate::spmat::{GradedOrder, Id};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorseError {
    #[error("not a matching: {0}")]
    NotAMatching(String),
    #[error("matching has a closed path")]
    CyclicMatching,
}

/// Pairs `(face, coface)` of cells in adjacent dimensions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Matching {
    pairs: Vec<(Id, Id)>,
    up: HashMap<Id, Id>,
    down: HashMap<Id, Id>,
}

impl Matching {
    /// Checks that every pair is a boundary incidence and no cell is reused.
    pub fn new(k: &FilteredComplex, pairs: Vec<(Id, Id)>) -> Result<Self, MorseError> {
        let mut up = HashMap::new();
        let mut down = HashMap::new();
        let mut used = HashSet::new();
        for &(s, t) in &pairs {
            let (Some(ds), Some(dt)) = (k.dim(s), k.dim(t)) else {
                return Err(MorseError::NotAMatching(format!("unknown cell in ({s}, {t})")));
            };
            if dt != ds + 1 || k.boundary(dt).get(s, t) == 0 {
                return Err(MorseError::NotAMatching(format!("{s} is not a face of {t}")));
            }
            if !used.insert(s) || !used.insert(t) {
                return Err(MorseError::NotAMatching(format!("cell reused in ({s}, {t})")));
            }
            up.insert(s, t);
            down.insert(t, s);
        }
        Ok(Matching { pairs, up, down })
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

    pub fn is_matched(&self, id: Id) -> bool {
        self.up.contains_key(&id) || self.down.contains_key(&id)
    }

    /// Unmatched cells per dimension.
    pub fn critical_counts(&self, k: &FilteredComplex) -> Vec<usize> {
        (0..k.num_dims())
            .map(|n| k.cells(n).elements().iter().filter(|&&id| !self.is_matched(id)).count())
            .collect()
    }
}

fn faces(k: &FilteredComplex, t: Id) -> Vec<Id> {
    let Some(n) = k.dim(t) else { return Vec::new() };
    if n == 0 {
        return Vec::new();
    }
    k.boundary(n).column_by_id(t).expect("cell of the complex").into_iter().map(|(s, _)| s).collect()
}

fn cofaces(k: &FilteredComplex) -> HashMap<Id, Vec<Id>> {
    let mut out: HashMap<Id, Vec<Id>> = HashMap::new();
    for n in 1..k.num_dims() {
        for (s, t, _) in k.boundary(n).entries() {
            out.entry(s).or_default().push(t);
        }
    }
    out
}

/// True iff no path `s₀ → t₀ → s₁ → t₁ → … → s₀` alternates between matched
/// pairs `(sᵢ, tᵢ)` and other faces `sᵢ₊₁` of `tᵢ`.
pub fn is_acyclic(v: &Matching, k: &FilteredComplex) -> bool {
    // Kahn's algorithm on the graph of matched pairs.
    let nodes: Vec<(Id, Id)> = v.pairs().to_vec();
    let index: HashMap<Id, usize> = nodes.iter().enumerate().map(|(i, &(s, _))| (s, i)).collect();
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    let mut indeg = vec![0usize; nodes.len()];
    for (i, &(s, t)) in nodes.iter().enumerate() {
        for f in faces(k, t) {
            if f == s {
                continue;
            }
            if let Some(&j) = index.get(&f) {
                out[i].push(j);
                indeg[j] += 1;
            }
        }
    }
    let mut queue: Vec<usize> = (0..nodes.len()).filter(|&i| indeg[i] == 0).collect();
    let mut seen = 0;
    while let Some(i) = queue.pop() {
        seen += 1;
        for &j in &out[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                queue.push(j);
            }
        }
    }
    seen == nodes.len()
}

pub fn is_filtration_acyclic(v: &Matching, k: &FilteredComplex) -> bool {
    v.pairs().iter().all(|&(s, t)| k.grade(s) == k.grade(t)) && is_acyclic(v, k)
}

/// Orders each dimension by grade so that every matched pair becomes a
/// Pareto pair: other faces of `t` precede `s`, other cofaces of `s` follow
/// `t`. Remaining ties keep the complex's own order.
pub fn linearize(v: &Matching, k: &FilteredComplex) -> Result<Vec<GradedOrder>, MorseError> {
    let co = cofaces(k);
    // after[x] lists cells that must come after x.
    let mut after: HashMap<Id, Vec<Id>> = HashMap::new();
    let mut indeg: HashMap<Id, usize> = HashMap::new();
    let mut constrain = |a: Id, b: Id| {
        after.entry(a).or_default().push(b);
        *indeg.entry(b).or_default() += 1;
    };
    for &(s, t) in v.pairs() {
        let g = k.grade(s);
        for f in faces(k, t) {
            if f != s && k.grade(f) == g {
                constrain(f, s);
            }
        }
        for &c in co.get(&s).map_or(&[][..], |c| c.as_slice()) {
            if c != t && k.grade(c) == g {
                constrain(t, c);
            }
        }
    }
    let mut orders = Vec::with_capacity(k.num_dims());
    for n in 0..k.num_dims() {
        let cells = k.cells(n);
        let mut heap: BinaryHeap<Reverse<(i64, usize)>> = BinaryHeap::new();
        for (pos, &id) in cells.elements().iter().enumerate() {
            if indeg.get(&id).copied().unwrap_or(0) == 0 {
                heap.push(Reverse((cells.grade_at(pos), pos)));
            }
        }
        let mut ids = Vec::with_capacity(cells.len());
        let mut grades = Vec::with_capacity(cells.len());
        while let Some(Reverse((g, pos))) = heap.pop() {
            let id = cells.elements()[pos];
            ids.push(id);
            grades.push(g);
            for &b in after.get(&id).map_or(&[][..], |b| b.as_slice()) {
                let d = indeg.get_mut(&b).expect("constrained");
                *d -= 1;
                if *d == 0 {
                    let p = cells.position(b).expect("same dimension");
                    heap.push(Reverse((cells.grade_at(p), p)));
                }
            }
        }
        if ids.len() != cells.len() {
            return Err(MorseError::CyclicMatching);
        }
        orders.push(GradedOrder::new(ids, grades).expect("heap pops in grade order"));
    }
    Ok(orders)
}

/// True iff every matched pair is a Pareto pair of its boundary matrix once
/// the complex is listed in `orders`.
pub fn seed_check(v: &Matching, k: &FilteredComplex, orders: &[GradedOrder]) -> bool {
    let Ok(r) = k.reordered(orders.to_vec()) else { return false };
    let mut found: HashSet<(Id, Id)> = HashSet::new();
    for n in 1..r.num_dims() {
        let p = pareto_pairs(r.boundary(n), r.cells(n - 1), r.cells(n)).expect("orders match");
        found.extend(p.pairs().iter().copied());
    }
    v.pairs().iter().all(|p| found.contains(p))
}

/// Coreduction within each grade: repeatedly pair a cell having exactly one
/// remaining face of its grade with that face; when none exists, set aside
/// the first remaining cell with no such face as critical.
pub fn greedy_matching(k: &FilteredComplex) -> Matching {
    let co = cofaces(k);
    let mut pairs = Vec::new();
    let mut by_grade: HashMap<i64, Vec<(usize, usize, Id)>> = HashMap::new();
    for n in 0..k.num_dims() {
        let cells = k.cells(n);
        for (pos, &id) in cells.elements().iter().enumerate() {
            by_grade.entry(cells.grade_at(pos)).or_default().push((n, pos, id));
        }
    }
    let mut grades: Vec<i64> = by_grade.keys().copied().collect();
    grades.sort_unstable();
    for g in grades {
        let level = &by_grade[&g];
        let key: HashMap<Id, (usize, usize)> = level.iter().map(|&(n, p, id)| (id, (n, p))).collect();
        let same_grade_faces = |t: Id| faces(k, t).into_iter().filter(|f| key.contains_key(f));
        let mut count: HashMap<Id, usize> = level.iter().map(|&(_, _, id)| (id, same_grade_faces(id).count())).collect();
        let mut remaining: HashSet<Id> = level.iter().map(|&(_, _, id)| id).collect();
        let mut free: BTreeSet<(usize, usize, Id)> =
            level.iter().copied().filter(|&(_, _, id)| count[&id] == 0).collect();
        let mut queue: Vec<Id> = level.iter().map(|&(_, _, id)| id).filter(|id| count[id] == 1).collect();

        let remove = |x: Id,
                          remaining: &mut HashSet<Id>,
                          count: &mut HashMap<Id, usize>,
                          free: &mut BTreeSet<(usize, usize, Id)>,
                          queue: &mut Vec<Id>| {
            remaining.remove(&x);
            let (n, p) = key[&x];
            free.remove(&(n, p, x));
            for &c in co.get(&x).map_or(&[][..], |c| c.as_slice()) {
                if !remaining.contains(&c) {
                    continue;
                }
                let e = count.get_mut(&c).expect("same grade");
                *e -= 1;
                match *e {
                    1 => queue.push(c),
                    0 => {
                        let (n, p) = key[&c];
                        free.insert((n, p, c));
                    }
                    _ => {}
                }
            }
        };

        while !remaining.is_empty() {
            if let Some(t) = queue.pop() {
                if !remaining.contains(&t) || count[&t] != 1 {
                    continue;
                }
                let s = same_grade_faces(t).find(|f| remaining.contains(f)).expect("one face left");
                pairs.push((s, t));
                remove(t, &mut remaining, &mut count, &mut free, &mut queue);
                remove(s, &mut remaining, &mut count, &mut free, &mut queue);
            } else {
                let &(_, _, c) = free.iter().next().expect("a lowest remaining cell has no faces left");
                remove(c, &mut remaining, &mut count, &mut free, &mut queue);
            }
        }
    }
    Matching::new(k, pairs).expect("coreduction pairs are incidences")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{known, random_complex, Cell, FilteredComplex};
    use crate::field::PrimeField;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Full triangle on vertices 0,1,2 with edges 3=01, 4=12, 5=02 and face 6.
    fn triangle(grades: [i64; 7]) -> FilteredComplex {
        let t = known::filtered_triangle(PrimeField::gf2());
        let cells: Vec<Cell> = t
            .all_cells()
            .into_iter()
            .map(|c| Cell { grade: grades[c.id], ..c })
            .collect();
        FilteredComplex::from_cells(PrimeField::gf2(), &cells, &t.all_entries()).unwrap()
    }

    #[test]
    fn acyclicity_examples() {
        let t = triangle([0; 7]);
        assert!(is_acyclic(&Matching::default(), &t));
        assert!(is_acyclic(&Matching::new(&t, vec![(0, 3)]).unwrap(), &t));
        let c = known::circle(PrimeField::gf2());
        // Edges 3=ab, 4=bc, 5=ac: a→ab→b→bc→c→ca→a.
        let cyc = Matching::new(&c, vec![(0, 3), (1, 4), (2, 5)]).unwrap();
        assert!(!is_acyclic(&cyc, &c));
        assert_eq!(linearize(&cyc, &c), Err(MorseError::CyclicMatching));
        assert!(Matching::new(&c, vec![(0, 3), (0, 5)]).is_err());
        assert!(Matching::new(&c, vec![(2, 3)]).is_err());
    }

    #[test]
    fn filtration_acyclic_examples() {
        let t = known::filtered_triangle(PrimeField::gf2());
        assert!(!is_filtration_acyclic(&Matching::new(&t, vec![(0, 3)]).unwrap(), &t));
        assert!(is_filtration_acyclic(&Matching::default(), &t));
        assert!(is_filtration_acyclic(&greedy_matching(&t), &t));
    }

    #[test]
    fn linearize_examples() {
        let t = triangle([0; 7]);
        let orders = linearize(&Matching::default(), &t).unwrap();
        for (n, o) in orders.iter().enumerate() {
            assert_eq!(o.elements(), t.cells(n).elements());
        }
        // b=1 is not the last face of ab=3 by default; the reorder fixes it.
        let v = Matching::new(&t, vec![(0, 3)]).unwrap();
        let default: Vec<GradedOrder> = (0..3).map(|n| t.cells(n).clone()).collect();
        assert!(!seed_check(&v, &t, &default));
        let orders = linearize(&v, &t).unwrap();
        assert!(seed_check(&v, &t, &orders));
        assert!(seed_check(&Matching::default(), &t, &default));
    }

    #[test]
    fn greedy_examples() {
        let p = known::point(PrimeField::gf2());
        assert!(greedy_matching(&p).is_empty());
        let t = triangle([0; 7]);
        let v = greedy_matching(&t);
        assert_eq!(v.len(), 3);
        assert_eq!(v.critical_counts(&t), vec![1, 0, 0]);
        let ft = known::filtered_triangle(PrimeField::gf2());
        let v = greedy_matching(&ft);
        assert!(v.pairs().iter().all(|&(s, t)| ft.grade(s) == ft.grade(t)));
    }

    #[test]
    fn greedy_matchings_seed_random_complexes() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for case in 0..200 {
            let f = PrimeField::new([2, 3][case % 2]).unwrap();
            let k = random_complex(&mut rng, f, 8, 3, 3);
            let v = greedy_matching(&k);
            assert!(is_filtration_acyclic(&v, &k));
            let orders = linearize(&v, &k).unwrap();
            assert!(seed_check(&v, &k, &orders));
            let crit = v.critical_counts(&k);
            let euler = |c: &[usize]| c.iter().enumerate().map(|(n, &x)| if n % 2 == 0 { x as i64 } else { -(x as i64) }).sum::<i64>();
            let all: Vec<usize> = (0..k.num_dims()).map(|n| k.count(n)).collect();
            assert_eq!(euler(&crit), euler(&all));
        }
    }

    #[test]
    fn default_order_can_miss_matched_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        let mut misses = 0;
        for _ in 0..100 {
            let k = random_complex(&mut rng, PrimeField::gf2(), 7, 2, 1);
            let v = greedy_matching(&k);
            let default: Vec<GradedOrder> = (0..k.num_dims()).map(|n| k.cells(n).clone()).collect();
            if !seed_check(&v, &k, &default) {
                misses += 1;
            }
        }
        assert!(misses > 0);
    }
}
