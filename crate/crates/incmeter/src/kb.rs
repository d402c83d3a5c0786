//! Transformation of a database with denial constraints into a
//! propositional knowledge base.
//!
//! Each tuple becomes a distinct atom. Each violated constraint becomes
//! one formula: a conjunction of negative clauses, one clause per
//! violating tuple-set. Formulas are canonicalized (duplicate and
//! subsumed clauses removed) and the knowledge base is a set, so two
//! constraints with the same canonical clauses collapse into a single
//! formula. With canonical formulas the minimal inconsistent subsets of
//! the KB are exactly the sets {formula} + {atoms of one clause}.

use std::collections::{BTreeMap, BTreeSet};

use crate::constraint::ConstraintSet;
use crate::error::Error;
use crate::ground::{ground_tuple_sets, minimize_inclusion};
use crate::model::{Database, Tuple, TupleId, TupleSet};

pub type AtomId = usize;
pub type Clause = BTreeSet<AtomId>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KbFormula {
    pub clauses: BTreeSet<Clause>,
    /// Names of the constraints mapped to this formula.
    pub sources: BTreeSet<String>,
}

/// The transformed knowledge base K_DB.
#[derive(Clone, Debug)]
pub struct PropKb {
    /// Atom i corresponds to `atom_tuples[i]`; numbering follows TupleId
    /// order of the source database.
    pub atom_tuples: Vec<Tuple>,
    pub atom_ids: Vec<TupleId>,
    /// Canonical formulas sorted by clause set.
    pub formulas: Vec<KbFormula>,
}

/// A member of the KB viewed as a set of formulas: either a tuple atom
/// or a constraint formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum KbMember {
    Atom(AtomId),
    Formula(usize),
}

/// One minimal inconsistent subset of the KB: a formula together with
/// the atoms of one of its clauses.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct KbMi {
    pub formula: usize,
    pub clause: Clause,
}

impl KbMi {
    pub fn len(&self) -> usize {
        self.clause.len() + 1
    }

    pub fn members(&self) -> BTreeSet<KbMember> {
        let mut m: BTreeSet<KbMember> = self.clause.iter().map(|a| KbMember::Atom(*a)).collect();
        m.insert(KbMember::Formula(self.formula));
        m
    }
}

/// Clause-level signature usable across differently-numbered KBs: each
/// clause is rendered as the set of underlying tuples.
pub type FormulaSignature = BTreeSet<BTreeSet<Tuple>>;

impl PropKb {
    pub fn atom_count(&self) -> usize {
        self.atom_tuples.len()
    }

    pub fn formula_count(&self) -> usize {
        self.formulas.len()
    }

    /// Size of the KB as a set of formulas (atoms plus formulas).
    pub fn member_count(&self) -> usize {
        self.atom_count() + self.formula_count()
    }

    /// K_DB contains every atom, so it is inconsistent exactly when some
    /// constraint formula survived canonicalization.
    pub fn is_consistent(&self) -> bool {
        self.formulas.is_empty()
    }

    /// Structural invariant behind Definition-2 bookkeeping: formulas are
    /// conjunctions of nonempty negative clauses, so no member of the KB
    /// is individually unsatisfiable.
    pub fn selfcontradictions_empty(&self) -> bool {
        self.formulas
            .iter()
            .all(|f| !f.clauses.is_empty() && f.clauses.iter().all(|c| !c.is_empty()))
    }

    pub fn atom_of(&self, id: TupleId) -> Option<AtomId> {
        self.atom_ids.iter().position(|t| *t == id)
    }

    /// All canonical clauses across formulas.
    pub fn all_clauses(&self) -> impl Iterator<Item = &Clause> {
        self.formulas.iter().flat_map(|f| f.clauses.iter())
    }

    /// Minimal inconsistent subsets of the KB.
    pub fn mi(&self) -> Vec<KbMi> {
        let mut out = Vec::new();
        for (fi, f) in self.formulas.iter().enumerate() {
            for clause in &f.clauses {
                out.push(KbMi {
                    formula: fi,
                    clause: clause.clone(),
                });
            }
        }
        out
    }

    /// An atom is free when it sits in no canonical clause; for
    /// transformed databases free and safe coincide.
    pub fn free_atoms(&self) -> BTreeSet<AtomId> {
        let mut used: BTreeSet<AtomId> = BTreeSet::new();
        for c in self.all_clauses() {
            used.extend(c.iter().copied());
        }
        (0..self.atom_count()).filter(|a| !used.contains(a)).collect()
    }

    pub fn formula_signature(&self, fi: usize) -> FormulaSignature {
        self.formulas[fi]
            .clauses
            .iter()
            .map(|c| {
                c.iter()
                    .map(|a| self.atom_tuples[*a].clone())
                    .collect::<BTreeSet<Tuple>>()
            })
            .collect()
    }

    /// MI elements in a numbering-independent form, for comparing KBs
    /// built from different databases.
    pub fn mi_signatures(&self) -> BTreeSet<(FormulaSignature, BTreeSet<Tuple>)> {
        self.mi()
            .into_iter()
            .map(|mi| {
                let clause_tuples: BTreeSet<Tuple> = mi
                    .clause
                    .iter()
                    .map(|a| self.atom_tuples[*a].clone())
                    .collect();
                (self.formula_signature(mi.formula), clause_tuples)
            })
            .collect()
    }

    /// Same KB content: atoms in order and formulas as clause sets.
    /// Source names are bookkeeping and do not affect identity.
    pub fn same_kb(&self, other: &PropKb) -> bool {
        self.atom_tuples == other.atom_tuples
            && self.formulas.len() == other.formulas.len()
            && self
                .formulas
                .iter()
                .zip(other.formulas.iter())
                .all(|(a, b)| a.clauses == b.clauses)
    }

    /// Direct deletion of a tuple per the inconsistency-preserving
    /// semantics: the atom disappears together with every clause that
    /// mentions it; formulas that lose all clauses disappear; formulas
    /// that become equal merge. Equals retransforming the smaller
    /// database.
    pub fn delete_atom(&self, atom: AtomId) -> PropKb {
        let renumber = |a: AtomId| -> Option<AtomId> {
            match a.cmp(&atom) {
                std::cmp::Ordering::Less => Some(a),
                std::cmp::Ordering::Equal => None,
                std::cmp::Ordering::Greater => Some(a - 1),
            }
        };
        let mut atom_tuples = self.atom_tuples.clone();
        atom_tuples.remove(atom);
        let mut atom_ids = self.atom_ids.clone();
        atom_ids.remove(atom);
        let mut surviving: Vec<KbFormula> = Vec::new();
        for f in &self.formulas {
            let clauses: BTreeSet<Clause> = f
                .clauses
                .iter()
                .filter(|c| !c.contains(&atom))
                .map(|c| c.iter().map(|a| renumber(*a).unwrap()).collect())
                .collect();
            if !clauses.is_empty() {
                surviving.push(KbFormula {
                    clauses,
                    sources: f.sources.clone(),
                });
            }
        }
        PropKb {
            atom_tuples,
            atom_ids,
            formulas: canonical_formulas(surviving),
        }
    }
}

fn canonical_formulas(raw: Vec<KbFormula>) -> Vec<KbFormula> {
    // Deduplicate by clause-set equality, merging source names.
    let mut merged: BTreeMap<BTreeSet<Clause>, BTreeSet<String>> = BTreeMap::new();
    for f in raw {
        merged.entry(f.clauses).or_default().extend(f.sources);
    }
    merged
        .into_iter()
        .map(|(clauses, sources)| KbFormula { clauses, sources })
        .collect()
}

/// The transformation from `db` with `cs` to the propositional KB.
pub fn transform(db: &Database, cs: &ConstraintSet) -> PropKb {
    let atom_ids: Vec<TupleId> = db.tuple_ids().collect();
    let atom_tuples: Vec<Tuple> = atom_ids.iter().map(|id| db.tuple(*id).clone()).collect();
    let atom_of: BTreeMap<TupleId, AtomId> = atom_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (*id, i))
        .collect();
    let mut raw = Vec::new();
    for c in cs.iter() {
        let sets = ground_tuple_sets(db, c);
        if sets.is_empty() {
            continue;
        }
        let minimal = minimize_inclusion(&sets);
        let clauses: BTreeSet<Clause> = minimal
            .into_iter()
            .map(|s: TupleSet| s.iter().map(|id| atom_of[id]).collect())
            .collect();
        raw.push(KbFormula {
            clauses,
            sources: [c.name.clone()].into_iter().collect(),
        });
    }
    PropKb {
        atom_tuples,
        atom_ids,
        formulas: canonical_formulas(raw),
    }
}

/// Minimal inconsistent subsets of DB = D plus constraints, one per
/// (constraint, minimal violating tuple-set) pair. Minimality is per
/// constraint; sets from different constraints stay separate.
pub fn mi_of_db(db: &Database, cs: &ConstraintSet) -> Vec<(String, TupleSet)> {
    let mut out = Vec::new();
    for c in cs.iter() {
        let sets = ground_tuple_sets(db, c);
        for s in minimize_inclusion(&sets) {
            out.push((c.name.clone(), s));
        }
    }
    out
}

/// Deletes a tuple from DB and returns the induced KB. Asserted (in
/// tests and debug builds) to equal transforming the smaller database.
pub fn delete_tuple(db: &Database, cs: &ConstraintSet, t: TupleId) -> Result<PropKb, Error> {
    let kb = transform(db, cs);
    let atom = kb
        .atom_of(t)
        .ok_or_else(|| Error::Validation(format!("unknown tuple id {t}")))?;
    let direct = kb.delete_atom(atom);
    debug_assert!(
        direct.same_kb(&transform(
            &db.without_tuples(&[t].into_iter().collect()),
            cs
        )),
        "direct deletion must match retransformation"
    );
    Ok(direct)
}

/// Deletes a constraint from DB and returns the induced KB: unchanged
/// when the constraint is unviolated or duplicated by another
/// constraint, otherwise its formula is dropped.
pub fn delete_constraint(db: &Database, cs: &ConstraintSet, name: &str) -> Result<PropKb, Error> {
    if cs.get(name).is_none() {
        return Err(Error::Validation(format!("unknown constraint {name}")));
    }
    let kb = transform(db, cs);
    let formulas: Vec<KbFormula> = kb
        .formulas
        .iter()
        .filter(|f| !(f.sources.contains(name) && f.sources.len() == 1))
        .map(|f| {
            let mut f = f.clone();
            f.sources.remove(name);
            f
        })
        .collect();
    let direct = PropKb {
        atom_tuples: kb.atom_tuples,
        atom_ids: kb.atom_ids,
        formulas,
    };
    debug_assert!(direct.same_kb(&transform(db, &cs.without(name)?)));
    Ok(direct)
}

/// Union semantics: merge the databases and constraint sets first, then
/// transform.
pub fn union_transform(
    db1: &Database,
    cs1: &ConstraintSet,
    db2: &Database,
    cs2: &ConstraintSet,
) -> Result<PropKb, Error> {
    let db = db1.union(db2)?;
    let cs = cs1.union(cs2);
    Ok(transform(&db, &cs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::parse_constraints;
    use crate::fixtures_test::{int_db1, int_db3, mealticket_constraints, mealticket_db};
    use crate::model::TupleId;

    fn clause(atoms: &[usize]) -> Clause {
        atoms.iter().copied().collect()
    }

    #[test]
    fn transform_matches_the_worked_example() {
        let db = mealticket_db();
        let cs = mealticket_constraints(db.schema());
        let kb = transform(&db, &cs);
        assert_eq!(kb.atom_count(), 7);
        assert_eq!(kb.formula_count(), 3);
        let clause_sets: Vec<BTreeSet<Clause>> =
            kb.formulas.iter().map(|f| f.clauses.clone()).collect();
        assert!(clause_sets.contains(&[clause(&[4])].into_iter().collect()));
        assert!(clause_sets.contains(&[clause(&[0, 2]), clause(&[1, 2])].into_iter().collect()));
        assert!(clause_sets.contains(&[clause(&[4, 5, 6])].into_iter().collect()));
        assert!(kb.selfcontradictions_empty());
    }

    #[test]
    fn equal_formulas_collapse() {
        // One tuple violating two constraints yields a single formula.
        let db = int_db1(&[0]);
        let cs = parse_constraints(
            "denial ca: R(x) -> x = 1\ndenial cb: R(x) -> x = 2",
            db.schema(),
        )
        .unwrap();
        let kb = transform(&db, &cs);
        assert_eq!(kb.atom_count(), 1);
        assert_eq!(kb.formula_count(), 1);
        assert_eq!(kb.mi().len(), 1);
        assert_eq!(
            kb.formulas[0].sources,
            ["ca".to_string(), "cb".to_string()].into_iter().collect()
        );
        // DB-level minimal inconsistent subsets stay distinct.
        assert_eq!(mi_of_db(&db, &cs).len(), 2);
    }

    #[test]
    fn consistent_database_transforms_to_atoms_only() {
        let db = mealticket_db();
        let cs = parse_constraints("fd c2: MealTicket: Number -> Value", db.schema()).unwrap();
        let kb = transform(&db, &cs);
        assert_eq!(kb.formula_count(), 0);
        assert!(kb.is_consistent());
        assert!(kb.mi().is_empty());
    }

    #[test]
    fn mi_of_kb_matches_the_worked_example() {
        let db = mealticket_db();
        let cs = mealticket_constraints(db.schema());
        let kb = transform(&db, &cs);
        let mi = kb.mi();
        assert_eq!(mi.len(), 4);
        let sizes: Vec<usize> = {
            let mut v: Vec<usize> = mi.iter().map(|m| m.len()).collect();
            v.sort();
            v
        };
        assert_eq!(sizes, vec![2, 3, 3, 4]);
    }

    #[test]
    fn deletion_worked_case() {
        // K = {a1, a2, a3, (~a1|~a2) & (~a1|~a3)}; deleting a2's tuple
        // leaves {a1, a3, ~a1|~a3}.
        let db = int_db3(&[(1, 1, 0), (1, 2, 1), (1, 2, 2)]);
        let cs = parse_constraints("fd f: R: A -> B", db.schema()).unwrap();
        let kb = transform(&db, &cs);
        assert_eq!(kb.formula_count(), 1);
        assert_eq!(kb.formulas[0].clauses.len(), 2);
        let smaller = delete_tuple(&db, &cs, TupleId(1)).unwrap();
        assert_eq!(smaller.atom_count(), 2);
        assert_eq!(smaller.formula_count(), 1);
        assert_eq!(
            smaller.formulas[0].clauses,
            [clause(&[0, 1])].into_iter().collect()
        );
        assert!(smaller.same_kb(&transform(&db.without_tuples(&[TupleId(1)].into_iter().collect()), &cs)));
    }

    #[test]
    fn deleting_a_free_tuple_keeps_formulas() {
        let db = mealticket_db();
        let cs = mealticket_constraints(db.schema());
        let kb = transform(&db, &cs);
        let smaller = delete_tuple(&db, &cs, TupleId(3)).unwrap();
        assert_eq!(smaller.atom_count(), 6);
        assert_eq!(smaller.formula_count(), kb.formula_count());
    }

    #[test]
    fn deleting_t3_removes_the_fd_formula() {
        let db = mealticket_db();
        let cs = mealticket_constraints(db.schema());
        let smaller = delete_tuple(&db, &cs, TupleId(2)).unwrap();
        // g(c3) vanishes: both clauses mention t3.
        assert_eq!(smaller.formula_count(), 2);
        assert!(smaller.same_kb(&transform(&db.without_tuples(&[TupleId(2)].into_iter().collect()), &cs)));
    }

    #[test]
    fn constraint_deletion_rules() {
        let db = mealticket_db();
        let cs = mealticket_constraints(db.schema());
        let kb = transform(&db, &cs);
        // c2 is unviolated: no change.
        assert!(delete_constraint(&db, &cs, "c2").unwrap().same_kb(&kb));
        // c1 is violated and unique: its formula goes away.
        let without_c1 = delete_constraint(&db, &cs, "c1").unwrap();
        assert_eq!(without_c1.formula_count(), 2);
        // A duplicated constraint leaves the KB unchanged.
        let db2 = int_db1(&[0]);
        let cs2 = parse_constraints(
            "denial ca: R(x) -> x = 1\ndenial cb: R(x) -> x = 2",
            db2.schema(),
        )
        .unwrap();
        let kb2 = transform(&db2, &cs2);
        assert!(delete_constraint(&db2, &cs2, "ca").unwrap().same_kb(&kb2));
        assert!(delete_constraint(&db2, &cs2, "nope").is_err());
    }

    #[test]
    fn union_transform_matches_the_running_example() {
        let schema = crate::schema_io::parse_schema("relation R(B: text, E: text, H: text)").unwrap();
        let t = |b: &str, e: &str, h: &str| {
            (
                "R".to_string(),
                vec![
                    crate::model::Value::Text(b.into()),
                    crate::model::Value::Text(e.into()),
                    crate::model::Value::Text(h.into()),
                ],
            )
        };
        let d1 = Database::from_tuples(schema.clone(), vec![t("b1", "e1", "h1"), t("b1", "e2", "h2")])
            .unwrap();
        let d2 = Database::from_tuples(schema, vec![t("b1", "e3", "h2")]).unwrap();
        let c1 = parse_constraints("fd be: R: B -> E", d1.schema()).unwrap();
        let c2 = parse_constraints("fd be: R: B -> E\nfd he: R: H -> E", d2.schema()).unwrap();
        let kb = union_transform(&d1, &c1, &d2, &c2).unwrap();
        assert_eq!(kb.atom_count(), 3);
        assert_eq!(kb.formula_count(), 2);
        let mut clause_counts: Vec<usize> =
            kb.formulas.iter().map(|f| f.clauses.len()).collect();
        clause_counts.sort();
        assert_eq!(clause_counts, vec![1, 3]);
        // Union with itself and an empty instance is the identity.
        let empty = Database::load(d1.schema().clone(), &[]).unwrap();
        let same = union_transform(&d1, &c1, &empty, &c1).unwrap();
        assert!(same.same_kb(&transform(&d1, &c1)));
    }
}
