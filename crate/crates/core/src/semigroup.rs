//! Finite semigroups over an indexed element universe.
//!
//! Everything here is definition-level: Green's relations come from
//! principal ideals, minimal idempotents from the natural partial order, and
//! ranks from exhaustive subset search. These are the oracles the
//! characterizations in [`crate::lglu`] are checked against.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use fixedbitset::FixedBitSet;
use itertools::Itertools;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};

/// Default bound on the size of a product closure.
pub const DEFAULT_CLOSURE_CAP: usize = 1_000_000;

/// Tables up to this size get an exhaustive associativity check.
const EXHAUSTIVE_ASSOC_LIMIT: usize = 200;

/// A set of element indices.
pub type ElementSet = FixedBitSet;

/// Elements, their index and a full multiplication table.
#[derive(Clone, Debug)]
pub struct SemigroupTable<T> {
    elements: Vec<T>,
    index: HashMap<T, usize>,
    mul: Vec<u32>,
    identity: Option<usize>,
}

impl<T: Clone + Eq + Hash> SemigroupTable<T> {
    /// Materializes the Cayley table of `elements` under `op`.
    ///
    /// Fails if an element is repeated or a product leaves the set.
    pub fn from_elements<F>(elements: Vec<T>, op: F) -> Result<Self>
    where
        F: Fn(&T, &T) -> T,
    {
        let mut index = HashMap::with_capacity(elements.len());
        for (i, e) in elements.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(Error::Precondition(format!("element {i} is repeated")));
            }
        }
        let n = elements.len();
        let mut mul = Vec::with_capacity(n * n);
        for a in &elements {
            for b in &elements {
                let prod = op(a, b);
                let k = *index
                    .get(&prod)
                    .ok_or_else(|| Error::Precondition("element set is not closed".into()))?;
                mul.push(k as u32);
            }
        }
        let mut table = SemigroupTable {
            elements,
            index,
            mul,
            identity: None,
        };
        table.identity = table.find_identity();
        Ok(table)
    }

    /// Builds a table from a precomputed product array `mul[i * n + j]`.
    pub fn from_raw(elements: Vec<T>, mul: Vec<u32>) -> Result<Self> {
        let n = elements.len();
        if mul.len() != n * n || mul.iter().any(|&k| k as usize >= n) {
            return Err(Error::Precondition("multiplication table is not total".into()));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, e) in elements.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(Error::Precondition(format!("element {i} is repeated")));
            }
        }
        let mut table = SemigroupTable {
            elements,
            index,
            mul,
            identity: None,
        };
        table.identity = table.find_identity();
        Ok(table)
    }

    pub fn index_of(&self, e: &T) -> Option<usize> {
        self.index.get(e).copied()
    }

    /// Restriction to a product-closed subset of indices.
    pub fn subtable(&self, indices: &[usize]) -> Result<SemigroupTable<T>> {
        let local: HashMap<usize, usize> =
            indices.iter().enumerate().map(|(l, &g)| (g, l)).collect();
        let m = indices.len();
        let mut mul = Vec::with_capacity(m * m);
        for &a in indices {
            for &b in indices {
                let k = local
                    .get(&self.mul(a, b))
                    .ok_or_else(|| Error::Precondition("subset is not closed".into()))?;
                mul.push(*k as u32);
            }
        }
        let elements = indices.iter().map(|&i| self.elements[i].clone()).collect();
        SemigroupTable::from_raw(elements, mul)
    }
}

impl<T> SemigroupTable<T> {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[T] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &T {
        &self.elements[i]
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.elements.len() + b] as usize
    }

    pub fn identity(&self) -> Option<usize> {
        self.identity
    }

    fn find_identity(&self) -> Option<usize> {
        let n = self.len();
        (0..n).find(|&e| (0..n).all(|x| self.mul(e, x) == x && self.mul(x, e) == x))
    }

    pub fn empty_set(&self) -> ElementSet {
        FixedBitSet::with_capacity(self.len())
    }

    pub fn full_set(&self) -> ElementSet {
        let mut s = self.empty_set();
        s.insert_range(..);
        s
    }

    /// Associativity: exhaustive for small tables, `samples` random triples otherwise.
    pub fn check_associative(&self, samples: usize) -> bool {
        let n = self.len();
        let holds = |a: usize, b: usize, c: usize| {
            self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c))
        };
        if n <= EXHAUSTIVE_ASSOC_LIMIT {
            return (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| holds(a, b, c))));
        }
        let mut rng = StdRng::seed_from_u64(0x5eed);
        (0..samples).all(|_| holds(rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n)))
    }

    /// Closure of `generators` inside the table.
    pub fn closure(&self, generators: &[usize]) -> ElementSet {
        let mut seen = self.empty_set();
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &g in generators {
            if !seen.put(g) {
                queue.push_back(g);
            }
        }
        while let Some(x) = queue.pop_front() {
            for &g in generators {
                let y = self.mul(x, g);
                if !seen.put(y) {
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    /// `S¹a`
    pub fn left_ideal(&self, a: usize) -> ElementSet {
        let mut s = self.empty_set();
        s.insert(a);
        for x in 0..self.len() {
            s.insert(self.mul(x, a));
        }
        s
    }

    /// `aS¹`
    pub fn right_ideal(&self, a: usize) -> ElementSet {
        let mut s = self.empty_set();
        s.insert(a);
        for x in 0..self.len() {
            s.insert(self.mul(a, x));
        }
        s
    }

    /// `S¹aS¹`
    pub fn principal_ideal(&self, a: usize) -> ElementSet {
        let mut s = self.empty_set();
        for l in self.left_ideal(a).ones() {
            s.union_with(&self.right_ideal(l));
        }
        s
    }

    /// `S¹aS¹` for every `a`, reusing the one-sided ideals.
    pub fn principal_ideals(&self) -> Vec<ElementSet> {
        let rights: Vec<ElementSet> = (0..self.len()).map(|a| self.right_ideal(a)).collect();
        (0..self.len())
            .map(|a| {
                let mut s = self.empty_set();
                for l in self.left_ideal(a).ones() {
                    s.union_with(&rights[l]);
                }
                s
            })
            .collect()
    }

    /// True iff `subset` is closed under multiplication by `S` on both sides.
    pub fn verify_ideal(&self, subset: &ElementSet) -> bool {
        subset.ones().all(|a| {
            (0..self.len()).all(|x| subset.contains(self.mul(x, a)) && subset.contains(self.mul(a, x)))
        })
    }

    pub fn is_idempotent(&self, e: usize) -> bool {
        self.mul(e, e) == e
    }

    pub fn idempotents(&self) -> Vec<usize> {
        (0..self.len()).filter(|&e| self.is_idempotent(e)).collect()
    }

    /// `e ≤ f` iff `e = ef = fe`.
    pub fn natural_leq(&self, e: usize, f: usize) -> Result<bool> {
        if !self.is_idempotent(e) || !self.is_idempotent(f) {
            return Err(Error::Precondition(
                "natural order is only defined on idempotents".into(),
            ));
        }
        Ok(self.mul(e, f) == e && self.mul(f, e) == e)
    }

    /// Idempotents with no strictly smaller idempotent.
    pub fn minimal_idempotents(&self) -> Vec<usize> {
        let idem = self.idempotents();
        idem.iter()
            .copied()
            .filter(|&e| {
                !idem
                    .iter()
                    .any(|&f| f != e && self.mul(e, f) == f && self.mul(f, e) == f)
            })
            .collect()
    }
}

/// Least product-closed superset of `generators`, in BFS order.
pub fn close_under_product<T, F>(generators: &[T], op: F, cap: usize) -> Result<Vec<T>>
where
    T: Clone + Eq + Hash,
    F: Fn(&T, &T) -> T,
{
    if generators.is_empty() {
        return Err(Error::Precondition("generating set is empty".into()));
    }
    let mut seen: HashMap<T, ()> = HashMap::new();
    let mut out: Vec<T> = Vec::new();
    let mut gens: Vec<T> = Vec::new();
    for g in generators {
        if seen.insert(g.clone(), ()).is_none() {
            out.push(g.clone());
            gens.push(g.clone());
        }
    }
    let mut head = 0;
    while head < out.len() {
        let x = out[head].clone();
        head += 1;
        for g in &gens {
            let y = op(&x, g);
            if !seen.contains_key(&y) {
                if out.len() >= cap {
                    return Err(Error::Capacity {
                        what: "product closure",
                        needed: out.len() as u128 + 1,
                        cap: cap as u128,
                    });
                }
                seen.insert(y.clone(), ());
                out.push(y);
            }
        }
    }
    Ok(out)
}

/// A partition of `0..len` into classes, numbered by first occurrence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

impl Partition {
    /// Groups indices by an arbitrary key.
    pub fn from_keys<K: Eq + Hash>(keys: impl IntoIterator<Item = K>) -> Partition {
        let mut ids: HashMap<K, usize> = HashMap::new();
        let mut class_of = Vec::new();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for (i, k) in keys.into_iter().enumerate() {
            let next = ids.len();
            let c = *ids.entry(k).or_insert(next);
            if c == classes.len() {
                classes.push(Vec::new());
            }
            classes[c].push(i);
            class_of.push(c);
        }
        Partition { class_of, classes }
    }

    pub fn class_of(&self, i: usize) -> usize {
        self.class_of[i]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        self.class_of[a] == self.class_of[b]
    }

    /// Every class of `self` lies inside a class of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.classes
            .iter()
            .all(|c| c.iter().all(|&x| coarser.related(c[0], x)))
    }

    /// Classes are disjoint, nonempty and cover every index exactly once.
    pub fn is_well_formed(&self) -> bool {
        let mut seen = vec![false; self.class_of.len()];
        for (c, members) in self.classes.iter().enumerate() {
            if members.is_empty() {
                return false;
            }
            for &x in members {
                if seen[x] || self.class_of[x] != c {
                    return false;
                }
                seen[x] = true;
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// The five Green's relations of a finite semigroup.
#[derive(Clone, Debug)]
pub struct GreenPartitions {
    pub l: Partition,
    pub r: Partition,
    pub h: Partition,
    pub d: Partition,
    pub j: Partition,
}

impl GreenPartitions {
    pub fn lattice_holds(&self) -> bool {
        self.h.refines(&self.l)
            && self.h.refines(&self.r)
            && self.l.refines(&self.d)
            && self.r.refines(&self.d)
            && self.d.refines(&self.j)
    }
}

/// Green's relations from their definitions.
///
/// `D` is computed as `L∘R` and compared against `R∘L`; a mismatch is an
/// internal error since the two always coincide.
pub fn green_oracle<T>(s: &SemigroupTable<T>) -> Result<GreenPartitions> {
    let n = s.len();
    let l = Partition::from_keys((0..n).map(|a| s.left_ideal(a)));
    let r = Partition::from_keys((0..n).map(|a| s.right_ideal(a)));
    let h = Partition::from_keys((0..n).map(|a| (l.class_of(a), r.class_of(a))));
    let j = Partition::from_keys(s.principal_ideals());

    // R-classes met by each L-class, and L-classes met by each R-class.
    let mut r_of_l = vec![FixedBitSet::with_capacity(r.num_classes()); l.num_classes()];
    let mut l_of_r = vec![FixedBitSet::with_capacity(l.num_classes()); r.num_classes()];
    for a in 0..n {
        r_of_l[l.class_of(a)].insert(r.class_of(a));
        l_of_r[r.class_of(a)].insert(l.class_of(a));
    }
    // a (L∘R) b: some c with a L c and c R b.
    let l_then_r = |a: usize, b: usize| r_of_l[l.class_of(a)].contains(r.class_of(b));
    let r_then_l = |a: usize, b: usize| l_of_r[r.class_of(a)].contains(l.class_of(b));

    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for a in 0..n {
        for b in 0..n {
            if l_then_r(a, b) != r_then_l(a, b) {
                return Err(Error::Internal(format!(
                    "L∘R and R∘L disagree on ({a}, {b})"
                )));
            }
        }
        if label[a] == usize::MAX {
            for (b, slot) in label.iter_mut().enumerate() {
                if l_then_r(a, b) {
                    *slot = next;
                }
            }
            next += 1;
        }
    }
    let d = Partition::from_keys(label);
    Ok(GreenPartitions { l, r, h, d, j })
}

/// Outcome of an exhaustive minimal generating set search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RankSearch {
    Found { size: usize, witness: Vec<usize> },
    NotFound,
}

/// Smallest `k ≤ cap` such that some `k`-subset of `candidates` generates the
/// whole table, with the first witness in lexicographic subset order.
pub fn rank_search<T>(s: &SemigroupTable<T>, candidates: &[usize], cap: usize) -> RankSearch {
    let n = s.len();
    for k in 1..=cap.min(candidates.len()) {
        for subset in candidates.iter().copied().combinations(k) {
            if s.closure(&subset).count_ones(..) == n {
                return RankSearch::Found {
                    size: k,
                    witness: subset,
                };
            }
        }
    }
    RankSearch::NotFound
}

/// Number of subsets `rank_search` may visit: `sum_{k=1..cap} C(m, k)`.
pub fn rank_search_cost(candidates: usize, cap: usize) -> u128 {
    let mut total = 0u128;
    let mut c = 1u128;
    for k in 1..=cap.min(candidates) {
        c = c * (candidates - k + 1) as u128 / k as u128;
        total += c;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Z_m under addition.
    fn cyclic(m: usize) -> SemigroupTable<usize> {
        SemigroupTable::from_elements((0..m).collect(), |a, b| (a + b) % m).unwrap()
    }

    /// Left-zero semigroup {0..m}: xy = x.
    fn left_zero(m: usize) -> SemigroupTable<usize> {
        SemigroupTable::from_elements((0..m).collect(), |a, _| *a).unwrap()
    }

    #[test]
    fn trivial_semigroup() {
        let t = cyclic(1);
        let g = green_oracle(&t).unwrap();
        for p in [&g.l, &g.r, &g.h, &g.d, &g.j] {
            assert_eq!(p.classes(), &[vec![0]]);
        }
        assert_eq!(t.idempotents(), vec![0]);
        assert_eq!(rank_search(&t, &[0], 3), RankSearch::Found { size: 1, witness: vec![0] });
        assert_eq!(t.identity(), Some(0));
    }

    #[test]
    fn groups_have_single_classes() {
        let t = cyclic(6);
        let g = green_oracle(&t).unwrap();
        for p in [&g.l, &g.r, &g.h, &g.d, &g.j] {
            assert_eq!(p.num_classes(), 1);
        }
        assert_eq!(t.idempotents(), vec![0]);
        assert_eq!(t.minimal_idempotents(), vec![0]);
        assert_eq!(t.principal_ideal(3).count_ones(..), 6);
        let two = cyclic(2);
        assert_eq!(
            rank_search(&two, &[0, 1], 2),
            RankSearch::Found { size: 1, witness: vec![1] }
        );
    }

    #[test]
    fn left_zero_green_structure() {
        let t = left_zero(3);
        let g = green_oracle(&t).unwrap();
        // xS¹ = {x}, S¹x = S
        assert_eq!(g.l.num_classes(), 1);
        assert_eq!(g.r.num_classes(), 3);
        assert_eq!(g.d.num_classes(), 1);
        assert!(g.lattice_holds());
        assert_eq!(t.identity(), None);
        assert_eq!(t.minimal_idempotents().len(), 3);
        assert_eq!(rank_search(&t, &[0, 1, 2], 2), RankSearch::NotFound);
    }

    #[test]
    fn natural_order_requires_idempotents() {
        let t = cyclic(3);
        assert!(t.natural_leq(0, 0).unwrap());
        assert!(matches!(t.natural_leq(1, 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn from_elements_rejects_open_sets() {
        let r = SemigroupTable::from_elements(vec![1usize, 2], |a, b| a * b);
        assert!(matches!(r, Err(Error::Precondition(_))));
        let r = SemigroupTable::from_elements(vec![1usize, 1], |a, b| a * b);
        assert!(r.is_err());
        assert!(SemigroupTable::from_raw(vec![0usize, 1], vec![0, 1, 1, 2]).is_err());
    }

    #[test]
    fn closure_and_cap() {
        let gens = [1usize];
        let all = close_under_product(&gens, |a, b| (a + b) % 7, 100).unwrap();
        assert_eq!(all, vec![1, 2, 3, 4, 5, 6, 0]);
        let err = close_under_product(&gens, |a, b| (a + b) % 7, 3).unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
        assert!(close_under_product::<usize, _>(&[], |a, _| *a, 3).is_err());
    }

    #[test]
    fn ideals_of_a_chain() {
        // {0,1,2} under max: principal ideal of x is {x..2}.
        let t = SemigroupTable::from_elements(vec![0usize, 1, 2], |a, b| *a.max(b)).unwrap();
        let mut s = t.empty_set();
        s.insert_range(1..3);
        assert!(t.verify_ideal(&s));
        let mut s = t.empty_set();
        s.insert(1);
        assert!(!t.verify_ideal(&s));
        assert_eq!(t.principal_ideal(1).ones().collect::<Vec<_>>(), vec![1, 2]);
        assert!(t.verify_ideal(&t.full_set()));
        assert!(t.check_associative(10));
    }

    #[test]
    fn rank_search_cost_counts_subsets() {
        assert_eq!(rank_search_cost(4, 2), 4 + 6);
        assert_eq!(rank_search_cost(3, 5), 7);
    }
}
