//! Constraint grounding: violating bindings, the conflict hypergraph
//! MI(D), and tuple classification.
//!
//! Grounding joins the constraint's atoms left to right. At each depth
//! the candidate tuples are hash-partitioned on the positions already
//! fixed by constants or by variables bound in earlier atoms, so a
//! functional dependency over n tuples grounds in expected O(n + output)
//! rather than O(n^2). The same tuple may appear in several atom
//! positions; guards like y != u rule the degenerate bindings out
//! without a special case.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;

use crate::constraint::{Comparison, ConstraintSet, DenialConstraint, Term};
use crate::model::{compare, CmpOp, Database, Tuple, TupleId, TupleSet, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundViolation {
    pub constraint: String,
    pub binding: Vec<TupleId>,
    pub tuple_set: TupleSet,
}

/// The antichain MI(D) plus, per edge, the names of the constraints
/// witnessing it.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ConflictHypergraph {
    pub edges: Vec<TupleSet>,
    pub witnesses: Vec<BTreeSet<String>>,
}

impl ConflictHypergraph {
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edge_set(&self) -> BTreeSet<TupleSet> {
        self.edges.iter().cloned().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleClassification {
    pub problematic: TupleSet,
    pub free: TupleSet,
    pub contradictory: TupleSet,
}

struct Binder<'a> {
    db: &'a Database,
    constraint: &'a DenialConstraint,
    /// For each atom depth, the positions fixed before that depth is
    /// entered: (position, source) where source is a constant or an
    /// already-bound variable.
    plans: Vec<DepthPlan>,
    var_slots: BTreeMap<String, usize>,
}

struct DepthPlan {
    relation: String,
    /// Positions keyed in the hash partition: value from a constant.
    const_keys: Vec<(usize, Value)>,
    /// Positions keyed on earlier-bound variables: (position, var slot).
    var_keys: Vec<(usize, usize)>,
    /// Positions binding fresh variables at this depth: (position, slot).
    /// A slot may repeat when one variable occupies two fresh positions.
    fresh: Vec<(usize, usize)>,
    index: HashMap<Vec<Value>, Vec<TupleId>>,
}

impl<'a> Binder<'a> {
    fn new(db: &'a Database, constraint: &'a DenialConstraint) -> Binder<'a> {
        let mut var_slots: BTreeMap<String, usize> = BTreeMap::new();
        let mut plans = Vec::new();
        for atom in &constraint.atoms {
            let mut const_keys = Vec::new();
            let mut var_keys = Vec::new();
            let mut fresh = Vec::new();
            for (pos, term) in atom.args.iter().enumerate() {
                match term {
                    Term::Const(v) => const_keys.push((pos, v.clone())),
                    Term::Var(name) => match var_slots.get(name) {
                        Some(slot) => var_keys.push((pos, *slot)),
                        None => {
                            let slot = var_slots.len();
                            var_slots.insert(name.clone(), slot);
                            fresh.push((pos, slot));
                        }
                    },
                }
            }
            // A variable introduced fresh at one position of this atom and
            // reused at a later position of the same atom must join here.
            let mut seen_fresh: BTreeMap<usize, usize> = BTreeMap::new();
            let mut dedup_fresh = Vec::new();
            for (pos, slot) in fresh {
                if seen_fresh.contains_key(&slot) {
                    // Repeated fresh variable inside one atom: treat the
                    // later position as a join on the first one.
                    var_keys.push((pos, slot));
                } else {
                    seen_fresh.insert(slot, pos);
                    dedup_fresh.push((pos, slot));
                }
            }
            plans.push(DepthPlan {
                relation: atom.relation.clone(),
                const_keys,
                var_keys,
                fresh: dedup_fresh,
                index: HashMap::new(),
            });
        }
        // Build the hash partitions.
        for plan in &mut plans {
            let mut index: HashMap<Vec<Value>, Vec<TupleId>> = HashMap::new();
            for &id in db.relation_tuples(&plan.relation) {
                let t = db.tuple(id);
                if !plan
                    .const_keys
                    .iter()
                    .all(|(pos, v)| &t.values[*pos] == v)
                {
                    continue;
                }
                let key: Vec<Value> = plan
                    .var_keys
                    .iter()
                    .map(|(pos, _)| t.values[*pos].clone())
                    .collect();
                index.entry(key).or_default().push(id);
            }
            plan.index = index;
        }
        Binder {
            db,
            constraint,
            plans,
            var_slots,
        }
    }

    fn search(&self, mut on_violation: impl FnMut(&[TupleId]) -> bool) {
        let mut binding: Vec<TupleId> = Vec::with_capacity(self.plans.len());
        let mut env: Vec<Option<Value>> = vec![None; self.var_slots.len()];
        self.descend(0, &mut binding, &mut env, &mut on_violation);
    }

    /// Returns true when the caller asked to stop.
    fn descend(
        &self,
        depth: usize,
        binding: &mut Vec<TupleId>,
        env: &mut Vec<Option<Value>>,
        on_violation: &mut impl FnMut(&[TupleId]) -> bool,
    ) -> bool {
        if depth == self.plans.len() {
            if !self.phi_holds(env) {
                return on_violation(binding);
            }
            return false;
        }
        let plan = &self.plans[depth];
        let key: Vec<Value> = plan
            .var_keys
            .iter()
            .map(|(_, slot)| env[*slot].clone().expect("bound variable"))
            .collect();
        let Some(candidates) = plan.index.get(&key) else {
            return false;
        };
        for &id in candidates {
            let t = self.db.tuple(id);
            for (pos, slot) in &plan.fresh {
                env[*slot] = Some(t.values[*pos].clone());
            }
            binding.push(id);
            let stop = self.descend(depth + 1, binding, env, on_violation);
            binding.pop();
            for (_, slot) in &plan.fresh {
                env[*slot] = None;
            }
            if stop {
                return true;
            }
        }
        false
    }

    fn phi_holds(&self, env: &[Option<Value>]) -> bool {
        let eval_term = |t: &Term| -> Value {
            match t {
                Term::Const(v) => v.clone(),
                Term::Var(name) => env[self.var_slots[name]]
                    .clone()
                    .expect("range-restricted variable"),
            }
        };
        let eval_cmp = |c: &Comparison| -> bool {
            let l = eval_term(&c.left);
            let r = eval_term(&c.right);
            // Order comparisons across kinds are ruled out by parsing.
            compare(&l, &r, c.op).expect("typechecked comparison")
        };
        self.constraint
            .phi
            .iter()
            .any(|conj| conj.iter().all(eval_cmp))
    }
}

/// All violating bindings of one constraint.
pub fn ground_constraint(db: &Database, c: &DenialConstraint) -> Vec<GroundViolation> {
    let binder = Binder::new(db, c);
    let mut out = Vec::new();
    binder.search(|binding| {
        out.push(GroundViolation {
            constraint: c.name.clone(),
            binding: binding.to_vec(),
            tuple_set: binding.iter().copied().collect(),
        });
        false
    });
    out
}

/// The distinct violating tuple-sets of one constraint.
pub fn ground_tuple_sets(db: &Database, c: &DenialConstraint) -> BTreeSet<TupleSet> {
    let binder = Binder::new(db, c);
    let mut out = BTreeSet::new();
    binder.search(|binding| {
        out.insert(binding.iter().copied().collect());
        false
    });
    out
}

pub fn has_violation(db: &Database, c: &DenialConstraint) -> bool {
    let binder = Binder::new(db, c);
    let mut hit = false;
    binder.search(|_| {
        hit = true;
        true
    });
    hit
}

/// True iff no constraint has a violating binding.
pub fn is_consistent(db: &Database, cs: &ConstraintSet) -> bool {
    !cs.iter().any(|c| has_violation(db, c))
}

/// Keeps the inclusion-minimal sets of `sets`, i.e. drops every set that
/// strictly contains another.
pub fn minimize_inclusion(sets: &BTreeSet<TupleSet>) -> BTreeSet<TupleSet> {
    let mut by_size: Vec<&TupleSet> = sets.iter().collect();
    by_size.sort_by_key(|s| s.len());
    let mut kept: Vec<&TupleSet> = Vec::new();
    for s in by_size {
        if !kept.iter().any(|k| k.is_subset(s)) {
            kept.push(s);
        }
    }
    kept.into_iter().cloned().collect()
}

/// Computes MI(D): the violating tuple-sets of all constraints, reduced
/// to an inclusion antichain across constraints.
pub fn conflict_hypergraph(db: &Database, cs: &ConstraintSet) -> ConflictHypergraph {
    let per_constraint: Vec<(String, BTreeSet<TupleSet>)> = cs
        .iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|c| (c.name.clone(), ground_tuple_sets(db, c)))
        .collect();
    let mut all: BTreeSet<TupleSet> = BTreeSet::new();
    for (_, sets) in &per_constraint {
        all.extend(sets.iter().cloned());
    }
    let minimal = minimize_inclusion(&all);
    let mut edges = Vec::new();
    let mut witnesses = Vec::new();
    for edge in minimal {
        let names: BTreeSet<String> = per_constraint
            .iter()
            .filter(|(_, sets)| sets.contains(&edge))
            .map(|(name, _)| name.clone())
            .collect();
        edges.push(edge);
        witnesses.push(names);
    }
    ConflictHypergraph { edges, witnesses }
}

pub fn classify_tuples(h: &ConflictHypergraph, db: &Database) -> TupleClassification {
    let mut problematic = TupleSet::new();
    let mut contradictory = TupleSet::new();
    for e in &h.edges {
        problematic.extend(e.iter().copied());
        if e.len() == 1 {
            contradictory.extend(e.iter().copied());
        }
    }
    let free: TupleSet = db
        .tuple_ids()
        .filter(|id| !problematic.contains(id))
        .collect();
    TupleClassification {
        problematic,
        free,
        contradictory,
    }
}

/// Renders a tuple set as sorted `t<i>` labels plus tuple bodies.
pub fn render_edge(db: &Database, edge: &TupleSet) -> Vec<(String, Tuple)> {
    edge.iter()
        .map(|id| (id.to_string(), db.tuple(*id).clone()))
        .collect()
}

/// Convenience used by tests and the postulate harness: evaluates a
/// comparison term pair directly.
pub fn eval_comparison(l: &Value, r: &Value, op: CmpOp) -> bool {
    compare(l, r, op).expect("typechecked comparison")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::parse_constraints;
    use crate::fixtures_test::{mealticket_constraints, mealticket_db, tid_set};

    #[test]
    fn unary_guard_flags_the_zero_value_ticket() {
        let db = mealticket_db();
        let cs = mealticket_constraints(db.schema());
        let v = ground_constraint(&db, cs.get("c1").unwrap());
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].tuple_set, tid_set(&[4]));
    }

    #[test]
    fn satisfied_fd_has_no_violations() {
        let db = mealticket_db();
        let cs = mealticket_constraints(db.schema());
        assert!(ground_constraint(&db, cs.get("c2").unwrap()).is_empty());
    }

    #[test]
    fn fd_violations_are_the_expected_pairs() {
        let db = mealticket_db();
        let cs = mealticket_constraints(db.schema());
        let sets = ground_tuple_sets(&db, cs.get("c3").unwrap());
        let expected: BTreeSet<TupleSet> =
            [tid_set(&[0, 2]), tid_set(&[1, 2])].into_iter().collect();
        assert_eq!(sets, expected);
    }

    #[test]
    fn hypergraph_matches_the_worked_example() {
        let db = mealticket_db();
        let cs = mealticket_constraints(db.schema());
        let h = conflict_hypergraph(&db, &cs);
        let expected: BTreeSet<TupleSet> = [tid_set(&[4]), tid_set(&[0, 2]), tid_set(&[1, 2])]
            .into_iter()
            .collect();
        assert_eq!(h.edge_set(), expected);
        // The c4 triple {t5,t6,t7} is dropped: {t5} is strictly inside it.
        assert!(!h.edge_set().contains(&tid_set(&[4, 5, 6])));
    }

    #[test]
    fn cross_constraint_minimization_is_global() {
        let db = mealticket_db();
        let keep = tid_set(&[4, 5, 6]);
        let small = db.restrict(&keep);
        let text = "denial c1: MealTicket(x1, x2, x3, x4) -> x2 > 0\n\
                    nd c4: MealTicket: Holder, Date -> 2 Number";
        let cs = parse_constraints(text, small.schema()).unwrap();
        let h = conflict_hypergraph(&small, &cs);
        // With c1 present the singleton {t5} removes the c4 triple.
        assert_eq!(h.edges.len(), 1);
        assert_eq!(h.edges[0].len(), 1);
        let only_c4 = parse_constraints(
            "nd c4: MealTicket: Holder, Date -> 2 Number",
            small.schema(),
        )
        .unwrap();
        let h2 = conflict_hypergraph(&small, &only_c4);
        assert_eq!(h2.edges.len(), 1);
        assert_eq!(h2.edges[0].len(), 3);
    }

    #[test]
    fn classification_matches_the_worked_example() {
        let db = mealticket_db();
        let cs = mealticket_constraints(db.schema());
        let h = conflict_hypergraph(&db, &cs);
        let c = classify_tuples(&h, &db);
        assert_eq!(c.problematic, tid_set(&[0, 1, 2, 4]));
        assert_eq!(c.free, tid_set(&[3, 5, 6]));
        assert_eq!(c.contradictory, tid_set(&[4]));
    }

    #[test]
    fn consistency_checks() {
        let db = mealticket_db();
        let cs = mealticket_constraints(db.schema());
        assert!(!is_consistent(&db, &cs));
        let fixed = db.without_tuples(&tid_set(&[2, 4]));
        assert!(is_consistent(&fixed, &cs));
        let empty = db.restrict(&TupleSet::new());
        assert!(is_consistent(&empty, &cs));
        assert_eq!(
            conflict_hypergraph(&empty, &cs),
            ConflictHypergraph::default()
        );
    }

    #[test]
    fn nd_grounds_all_subsets_of_distinct_values() {
        // 4 tuples sharing A with distinct B under A ->2 B: every
        // 3-subset violates, matching the brute-force count C(4,3) = 4.
        let schema =
            crate::schema_io::parse_schema("relation R(A: int, B: int)").unwrap();
        let rows: Vec<(String, Vec<crate::model::Value>)> = (0..4)
            .map(|b| {
                (
                    "R".to_string(),
                    vec![
                        crate::model::Value::Int(1.into()),
                        crate::model::Value::Int(b.into()),
                    ],
                )
            })
            .collect();
        let db = Database::from_tuples(schema, rows).unwrap();
        let cs = parse_constraints("nd n: R: A -> 2 B", db.schema()).unwrap();
        let sets = ground_tuple_sets(&db, cs.get("n").unwrap());
        assert_eq!(sets.len(), 4);
        assert!(sets.iter().all(|s| s.len() == 3));
    }
}
