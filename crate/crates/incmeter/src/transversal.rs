//! Hypergraph machinery shared by the measures: minimum hitting set
//! size, minimal transversal enumeration, maximal consistent subsets
//! (complements of minimal transversals), and minimum set cover.

use std::collections::{BTreeMap, BTreeSet};

use crate::rational::MeasureValue;

pub type VertexSet = BTreeSet<usize>;

/// Inclusion-minimal members of a family of sets.
pub fn minimize_sets(sets: impl IntoIterator<Item = VertexSet>) -> Vec<VertexSet> {
    let mut all: Vec<VertexSet> = sets.into_iter().collect();
    all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    all.dedup();
    let mut kept: Vec<VertexSet> = Vec::new();
    for s in all {
        if !kept.iter().any(|k| k.is_subset(&s)) {
            kept.push(s);
        }
    }
    kept
}

#[derive(Clone, Debug, Default)]
pub struct Hypergraph {
    /// Antichain of edges (normalized on construction).
    pub edges: Vec<VertexSet>,
    /// True when some input edge was empty: nothing can hit it.
    pub has_empty_edge: bool,
}

impl Hypergraph {
    pub fn new(edges: impl IntoIterator<Item = VertexSet>) -> Hypergraph {
        let edges: Vec<VertexSet> = edges.into_iter().collect();
        let has_empty_edge = edges.iter().any(|e| e.is_empty());
        if has_empty_edge {
            return Hypergraph {
                edges: Vec::new(),
                has_empty_edge,
            };
        }
        Hypergraph {
            edges: minimize_sets(edges),
            has_empty_edge,
        }
    }

    fn degrees(edges: &[VertexSet]) -> BTreeMap<usize, usize> {
        let mut deg = BTreeMap::new();
        for e in edges {
            for &v in e {
                *deg.entry(v).or_insert(0) += 1;
            }
        }
        deg
    }

    /// Lower bound for hitting the given edges: a greedy matching of
    /// pairwise-disjoint edges, each of which needs its own vertex.
    fn matching_bound(edges: &[VertexSet]) -> usize {
        let mut used: VertexSet = VertexSet::new();
        let mut count = 0;
        let mut order: Vec<&VertexSet> = edges.iter().collect();
        order.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        for e in order {
            if e.iter().all(|v| !used.contains(v)) {
                used.extend(e.iter().copied());
                count += 1;
            }
        }
        count
    }

    /// Size of a minimum-cardinality hitting set: 0 for no edges,
    /// infinity when an empty edge makes hitting impossible.
    pub fn min_hitting_set_size(&self) -> MeasureValue {
        self.min_hitting_set_with_witness().0
    }

    /// Minimum hitting set size plus one witness attaining it.
    pub fn min_hitting_set_with_witness(&self) -> (MeasureValue, Option<VertexSet>) {
        if self.has_empty_edge {
            return (MeasureValue::Infinite, None);
        }
        if self.edges.is_empty() {
            return (MeasureValue::zero(), Some(VertexSet::new()));
        }
        // Greedy incumbent: repeatedly take the highest-degree vertex.
        let mut remaining: Vec<VertexSet> = self.edges.clone();
        let mut greedy = VertexSet::new();
        while !remaining.is_empty() {
            let deg = Self::degrees(&remaining);
            let (&v, _) = deg
                .iter()
                .max_by(|(va, ca), (vb, cb)| ca.cmp(cb).then_with(|| vb.cmp(va)))
                .unwrap();
            remaining.retain(|e| !e.contains(&v));
            greedy.insert(v);
        }
        let mut best = greedy.clone();
        self.branch(&self.edges, &mut VertexSet::new(), &mut best);
        (MeasureValue::from_int(best.len() as u64), Some(best))
    }

    fn branch(&self, remaining: &[VertexSet], chosen: &mut VertexSet, best: &mut VertexSet) {
        if remaining.is_empty() {
            if chosen.len() < best.len() {
                *best = chosen.clone();
            }
            return;
        }
        if chosen.len() + Self::matching_bound(remaining) >= best.len() {
            return;
        }
        // Branch on the lexicographically first remaining edge; try its
        // vertices by descending degree, ties by smaller id.
        let edge = remaining.iter().min().unwrap();
        let deg = Self::degrees(remaining);
        let mut verts: Vec<usize> = edge.iter().copied().collect();
        verts.sort_by(|a, b| deg[b].cmp(&deg[a]).then_with(|| a.cmp(b)));
        for v in verts {
            let rest: Vec<VertexSet> = remaining
                .iter()
                .filter(|e| !e.contains(&v))
                .cloned()
                .collect();
            chosen.insert(v);
            self.branch(&rest, chosen, best);
            chosen.remove(&v);
        }
    }

    /// All minimal transversals, by sequential edge incorporation with
    /// subsumption pruning. Output in lexicographic order.
    pub fn minimal_transversals(&self) -> Vec<VertexSet> {
        if self.has_empty_edge {
            return Vec::new();
        }
        let mut partial: Vec<VertexSet> = vec![VertexSet::new()];
        for e in &self.edges {
            let mut next: Vec<VertexSet> = Vec::new();
            for t in &partial {
                if t.iter().any(|v| e.contains(v)) {
                    next.push(t.clone());
                } else {
                    for &v in e {
                        let mut bigger = t.clone();
                        bigger.insert(v);
                        next.push(bigger);
                    }
                }
            }
            partial = minimize_sets(next);
        }
        partial.sort();
        partial
    }
}

/// Maximal subsets of `universe` containing no edge in full: the
/// complements of the minimal transversals.
pub fn maximal_consistent_subsets(universe: &VertexSet, edges: &[VertexSet]) -> Vec<VertexSet> {
    let h = Hypergraph::new(edges.iter().cloned());
    h.minimal_transversals()
        .into_iter()
        .map(|t| universe.difference(&t).copied().collect())
        .collect()
}

/// Minimum number of candidate sets whose union covers `universe`;
/// infinity when some element lies in no candidate.
pub fn min_cover_by_sets(universe: &VertexSet, candidates: &[VertexSet]) -> MeasureValue {
    if universe.is_empty() {
        return MeasureValue::zero();
    }
    let coverable: VertexSet = candidates.iter().flatten().copied().collect();
    if !universe.iter().all(|v| coverable.contains(v)) {
        return MeasureValue::Infinite;
    }
    // Greedy incumbent.
    let mut uncovered: VertexSet = universe.clone();
    let mut upper = 0usize;
    while !uncovered.is_empty() {
        let best = candidates
            .iter()
            .max_by_key(|c| (c.intersection(&uncovered).count(), std::cmp::Reverse(*c)))
            .unwrap();
        for v in best {
            uncovered.remove(v);
        }
        upper += 1;
    }
    let mut best = upper;
    cover_branch(universe.clone(), candidates, 0, &mut best);
    MeasureValue::from_int(best as u64)
}

fn cover_branch(uncovered: VertexSet, candidates: &[VertexSet], chosen: usize, best: &mut usize) {
    if uncovered.is_empty() {
        if chosen < *best {
            *best = chosen;
        }
        return;
    }
    if chosen + 1 >= *best {
        return;
    }
    // The element with the fewest covering candidates constrains the
    // search most.
    let v = *uncovered
        .iter()
        .min_by_key(|v| candidates.iter().filter(|c| c.contains(v)).count())
        .unwrap();
    let mut options: Vec<&VertexSet> = candidates.iter().filter(|c| c.contains(&v)).collect();
    options.sort_by(|a, b| {
        b.intersection(&uncovered)
            .count()
            .cmp(&a.intersection(&uncovered).count())
            .then_with(|| a.cmp(b))
    });
    for c in options {
        let rest: VertexSet = uncovered.difference(c).copied().collect();
        cover_branch(rest, candidates, chosen + 1, best);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn vs(items: &[usize]) -> VertexSet {
        items.iter().copied().collect()
    }

    /// Exhaustive reference: every subset of the vertex universe,
    /// filtered to hitting sets, reduced to minimal ones.
    fn brute_transversals(edges: &[VertexSet]) -> Vec<VertexSet> {
        let universe: Vec<usize> = edges
            .iter()
            .flatten()
            .copied()
            .collect::<VertexSet>()
            .into_iter()
            .collect();
        let mut hitting: Vec<VertexSet> = Vec::new();
        for mask in 0..(1u32 << universe.len()) {
            let s: VertexSet = universe
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, v)| *v)
                .collect();
            if edges.iter().all(|e| e.iter().any(|v| s.contains(v))) {
                hitting.push(s);
            }
        }
        let mut out = minimize_sets(hitting);
        out.sort();
        out
    }

    #[test]
    fn worked_example_hypergraph() {
        // MI(D_ex) with t1..t7 as 0..6: {{4}, {0,2}, {1,2}}.
        let edges = vec![vs(&[4]), vs(&[0, 2]), vs(&[1, 2])];
        let h = Hypergraph::new(edges.clone());
        assert_eq!(h.min_hitting_set_size(), MeasureValue::from_int(2));
        let trans = h.minimal_transversals();
        assert_eq!(trans, vec![vs(&[0, 1, 4]), vs(&[2, 4])]);
        let universe: VertexSet = (0..7).collect();
        let mcs = maximal_consistent_subsets(&universe, &edges);
        assert_eq!(mcs.len(), 2);
        assert!(mcs.contains(&vs(&[2, 3, 5, 6])));
        assert!(mcs.contains(&vs(&[0, 1, 3, 5, 6])));
    }

    #[test]
    fn empty_and_degenerate_cases() {
        let h = Hypergraph::new(Vec::<VertexSet>::new());
        assert_eq!(h.min_hitting_set_size(), MeasureValue::zero());
        assert_eq!(h.minimal_transversals(), vec![VertexSet::new()]);
        let unhittable = Hypergraph::new(vec![VertexSet::new()]);
        assert_eq!(unhittable.min_hitting_set_size(), MeasureValue::Infinite);
        let universe: VertexSet = (0..3).collect();
        let mcs = maximal_consistent_subsets(&universe, &[]);
        assert_eq!(mcs, vec![universe.clone()]);
    }

    #[test]
    fn cover_cases() {
        let universe = vs(&[0, 1, 2]);
        assert_eq!(
            min_cover_by_sets(&universe, &[vs(&[0, 1, 2])]),
            MeasureValue::from_int(1)
        );
        assert_eq!(
            min_cover_by_sets(&universe, &[vs(&[0, 1]), vs(&[2])]),
            MeasureValue::from_int(2)
        );
        // An uncoverable element yields infinity.
        assert_eq!(
            min_cover_by_sets(&universe, &[vs(&[0, 1])]),
            MeasureValue::Infinite
        );
        assert_eq!(min_cover_by_sets(&vs(&[]), &[]), MeasureValue::zero());
    }

    #[test]
    fn random_hypergraphs_agree_with_exhaustive_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let nverts = rng.gen_range(1..=12usize);
            let nedges = rng.gen_range(0..=6usize);
            let edges: Vec<VertexSet> = (0..nedges)
                .map(|_| {
                    let size = rng.gen_range(1..=3.min(nverts));
                    let mut e = VertexSet::new();
                    while e.len() < size {
                        e.insert(rng.gen_range(0..nverts));
                    }
                    e
                })
                .collect();
            let h = Hypergraph::new(edges.clone());
            let brute = brute_transversals(&h.edges);
            assert_eq!(h.minimal_transversals(), brute);
            let brute_min = brute
                .iter()
                .map(|t| t.len())
                .min()
                .map(|n| MeasureValue::from_int(n as u64))
                .unwrap_or_else(MeasureValue::zero);
            assert_eq!(h.min_hitting_set_size(), brute_min);
        }
    }

    #[test]
    fn random_covers_agree_with_exhaustive_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let nverts = rng.gen_range(1..=10usize);
            let universe: VertexSet = (0..nverts).collect();
            let ncands = rng.gen_range(1..=6usize);
            let candidates: Vec<VertexSet> = (0..ncands)
                .map(|_| {
                    (0..nverts)
                        .filter(|_| rng.gen_bool(0.4))
                        .collect::<VertexSet>()
                })
                .collect();
            let got = min_cover_by_sets(&universe, &candidates);
            // Exhaustive search over candidate subsets.
            let mut best: Option<usize> = None;
            for mask in 0..(1u32 << ncands) {
                let mut covered = VertexSet::new();
                let mut count = 0;
                for (i, c) in candidates.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        covered.extend(c.iter().copied());
                        count += 1;
                    }
                }
                if universe.is_subset(&covered) {
                    best = Some(best.map_or(count, |b: usize| b.min(count)));
                }
            }
            let expected = best
                .map(|n| MeasureValue::from_int(n as u64))
                .unwrap_or(MeasureValue::Infinite);
            assert_eq!(got, expected);
        }
    }
}
