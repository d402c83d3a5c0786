//! The twenty inconsistency measures: ten on the transformed
//! propositional KB and ten blaming database tuples only, plus a
//! compute-all facade sharing intermediate results.

use std::cell::OnceCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;

use crate::constraint::ConstraintSet;
use crate::error::Error;
use crate::ground::{classify_tuples, conflict_hypergraph, is_consistent, ConflictHypergraph, TupleClassification};
use crate::kb::{transform, KbMi, PropKb};
use crate::lp::{eta_db, eta_prop};
use crate::model::{Database, TupleId, TupleSet};
use crate::rational::MeasureValue;
use crate::transversal::{maximal_consistent_subsets, min_cover_by_sets, Hypergraph, VertexSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Prop,
    Db,
}

impl Family {
    pub fn prefix(self) -> &'static str {
        match self {
            Family::Prop => "prop",
            Family::Db => "db",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MeasureKind {
    B,
    M,
    Sharp,
    P,
    A,
    H,
    Nc,
    Hs,
    C,
    Eta,
}

pub const ALL_KINDS: [MeasureKind; 10] = [
    MeasureKind::B,
    MeasureKind::M,
    MeasureKind::Sharp,
    MeasureKind::P,
    MeasureKind::A,
    MeasureKind::H,
    MeasureKind::Nc,
    MeasureKind::Hs,
    MeasureKind::C,
    MeasureKind::Eta,
];

impl MeasureKind {
    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::B => "IB",
            MeasureKind::M => "IM",
            MeasureKind::Sharp => "Isharp",
            MeasureKind::P => "IP",
            MeasureKind::A => "IA",
            MeasureKind::H => "IH",
            MeasureKind::Nc => "Inc",
            MeasureKind::Hs => "Ihs",
            MeasureKind::C => "IC",
            MeasureKind::Eta => "Ieta",
        }
    }

    pub fn from_name(s: &str) -> Option<MeasureKind> {
        ALL_KINDS.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MeasureId {
    pub family: Family,
    pub kind: MeasureKind,
}

impl MeasureId {
    pub fn db(kind: MeasureKind) -> MeasureId {
        MeasureId { family: Family::Db, kind }
    }

    pub fn prop(kind: MeasureKind) -> MeasureId {
        MeasureId { family: Family::Prop, kind }
    }

    pub fn parse(s: &str) -> Option<MeasureId> {
        let (fam, kind) = s.split_once(':')?;
        let family = match fam {
            "db" => Family::Db,
            "prop" => Family::Prop,
            _ => return None,
        };
        Some(MeasureId {
            family,
            kind: MeasureKind::from_name(kind)?,
        })
    }

    pub fn all() -> Vec<MeasureId> {
        let mut v = Vec::new();
        for k in ALL_KINDS {
            v.push(MeasureId::prop(k));
        }
        for k in ALL_KINDS {
            v.push(MeasureId::db(k));
        }
        v
    }
}

impl fmt::Display for MeasureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.family.prefix(), self.kind.name())
    }
}

/// Evidence gathered while computing measures. Fields hold only what the
/// requested measures actually needed, so the report doubles as an
/// instrumentation trace of the shared intermediates.
#[derive(Clone, Debug, Default)]
pub struct Evidence {
    pub mi_edges: Option<Vec<(TupleSet, BTreeSet<String>)>>,
    pub classification: Option<TupleClassification>,
    pub mcs: Option<Vec<TupleSet>>,
    pub hitting_set: Option<TupleSet>,
    pub lp_witness: Option<Vec<(TupleSet, BigRational)>>,
    pub conflict_base: Option<TupleSet>,
    pub kb_mi_count: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct MeasureReport {
    pub values: BTreeMap<MeasureId, MeasureValue>,
    pub evidence: Evidence,
}

/// Lazily-shared intermediates for one (database, constraints) workload.
pub struct Evaluator<'a> {
    pub db: &'a Database,
    pub cs: &'a ConstraintSet,
    consistent: OnceCell<bool>,
    hypergraph: OnceCell<ConflictHypergraph>,
    classification: OnceCell<TupleClassification>,
    mcs: OnceCell<Vec<TupleSet>>,
    db_hitting: OnceCell<(MeasureValue, Option<TupleSet>)>,
    db_eta: OnceCell<(MeasureValue, Vec<(TupleSet, BigRational)>)>,
    kb: OnceCell<PropKb>,
    kb_mi: OnceCell<Vec<KbMi>>,
    kb_mc_count: OnceCell<usize>,
}

impl<'a> Evaluator<'a> {
    pub fn new(db: &'a Database, cs: &'a ConstraintSet) -> Evaluator<'a> {
        Evaluator {
            db,
            cs,
            consistent: OnceCell::new(),
            hypergraph: OnceCell::new(),
            classification: OnceCell::new(),
            mcs: OnceCell::new(),
            db_hitting: OnceCell::new(),
            db_eta: OnceCell::new(),
            kb: OnceCell::new(),
            kb_mi: OnceCell::new(),
            kb_mc_count: OnceCell::new(),
        }
    }

    pub fn consistent(&self) -> bool {
        *self
            .consistent
            .get_or_init(|| match self.hypergraph.get() {
                Some(h) => h.is_empty(),
                None => is_consistent(self.db, self.cs),
            })
    }

    pub fn hypergraph(&self) -> &ConflictHypergraph {
        self.hypergraph
            .get_or_init(|| conflict_hypergraph(self.db, self.cs))
    }

    pub fn classification(&self) -> &TupleClassification {
        self.classification
            .get_or_init(|| classify_tuples(self.hypergraph(), self.db))
    }

    pub fn mcs(&self) -> &[TupleSet] {
        self.mcs.get_or_init(|| {
            let universe: VertexSet = self.db.tuple_ids().map(|t| t.0 as usize).collect();
            let edges: Vec<VertexSet> = self
                .hypergraph()
                .edges
                .iter()
                .map(|e| e.iter().map(|t| t.0 as usize).collect())
                .collect();
            maximal_consistent_subsets(&universe, &edges)
                .into_iter()
                .map(|s| s.into_iter().map(|v| TupleId(v as u32)).collect())
                .collect()
        })
    }

    fn db_hitting(&self) -> &(MeasureValue, Option<TupleSet>) {
        self.db_hitting.get_or_init(|| {
            let edges: Vec<VertexSet> = self
                .hypergraph()
                .edges
                .iter()
                .map(|e| e.iter().map(|t| t.0 as usize).collect())
                .collect();
            let h = Hypergraph::new(edges);
            let (size, witness) = h.min_hitting_set_with_witness();
            (
                size,
                witness.map(|w| w.into_iter().map(|v| TupleId(v as u32)).collect()),
            )
        })
    }

    fn db_eta(&self) -> &(MeasureValue, Vec<(TupleSet, BigRational)>) {
        self.db_eta.get_or_init(|| eta_db(self.db, self.mcs()))
    }

    pub fn kb(&self) -> &PropKb {
        self.kb.get_or_init(|| transform(self.db, self.cs))
    }

    pub fn kb_mi(&self) -> &[KbMi] {
        self.kb_mi.get_or_init(|| self.kb().mi())
    }

    fn kb_mc_count(&self) -> usize {
        *self.kb_mc_count.get_or_init(|| {
            let kb = self.kb();
            let universe: VertexSet = (0..kb.member_count()).collect();
            let edges: Vec<VertexSet> = self
                .kb_mi()
                .iter()
                .map(|mi| {
                    mi.members()
                        .into_iter()
                        .map(|m| match m {
                            crate::kb::KbMember::Atom(a) => a,
                            crate::kb::KbMember::Formula(f) => kb.atom_count() + f,
                        })
                        .collect()
                })
                .collect();
            maximal_consistent_subsets(&universe, &edges).len()
        })
    }

    /// One database measure.
    pub fn db_measure(&self, kind: MeasureKind) -> Result<MeasureValue, Error> {
        Ok(match kind {
            MeasureKind::B => {
                if self.consistent() {
                    MeasureValue::zero()
                } else {
                    MeasureValue::one()
                }
            }
            MeasureKind::M => MeasureValue::from_int(self.hypergraph().edges.len() as u64),
            MeasureKind::Sharp => self
                .hypergraph()
                .edges
                .iter()
                .fold(MeasureValue::zero(), |acc, e| {
                    acc + MeasureValue::ratio(1, e.len() as i64)
                }),
            MeasureKind::P => {
                MeasureValue::from_int(self.classification().problematic.len() as u64)
            }
            MeasureKind::A => {
                let mc = self.mcs().len() as u64;
                let contradictory = self.classification().contradictory.len() as u64;
                (MeasureValue::from_int(mc) + MeasureValue::from_int(contradictory))
                    .saturating_sub_int(1)
            }
            MeasureKind::H => self.db_hitting().0.clone(),
            MeasureKind::Nc => {
                if self.consistent() {
                    MeasureValue::zero()
                } else {
                    let min_edge = self
                        .hypergraph()
                        .edges
                        .iter()
                        .map(|e| e.len())
                        .min()
                        .expect("inconsistent database has edges");
                    MeasureValue::from_int((self.db.len() - min_edge + 1) as u64)
                }
            }
            MeasureKind::Hs => {
                let universe: VertexSet = self.db.tuple_ids().map(|t| t.0 as usize).collect();
                let candidates: Vec<VertexSet> = self
                    .mcs()
                    .iter()
                    .map(|s| s.iter().map(|t| t.0 as usize).collect())
                    .collect();
                min_cover_by_sets(&universe, &candidates).saturating_sub_int(1)
            }
            // Identical to the hitting-set measure in the database
            // setting; the brute-force three-valued search in the oracle
            // module cross-checks the identity.
            MeasureKind::C => self.db_hitting().0.clone(),
            MeasureKind::Eta => self.db_eta().0.clone(),
        })
    }

    /// One propositional measure, evaluated on the transformed KB.
    pub fn prop_measure(&self, kind: MeasureKind) -> Result<MeasureValue, Error> {
        let kb = self.kb();
        Ok(match kind {
            MeasureKind::B | MeasureKind::Hs => {
                // I_hs coincides with the drastic measure on transformed
                // KBs: the all-true and all-false interpretations always
                // hit every member of an inconsistent KB.
                if kb.is_consistent() {
                    MeasureValue::zero()
                } else {
                    MeasureValue::one()
                }
            }
            MeasureKind::M => MeasureValue::from_int(self.kb_mi().len() as u64),
            MeasureKind::Sharp => self
                .kb_mi()
                .iter()
                .fold(MeasureValue::zero(), |acc, mi| {
                    acc + MeasureValue::ratio(1, mi.len() as i64)
                }),
            MeasureKind::P => {
                let mut members: BTreeSet<crate::kb::KbMember> = BTreeSet::new();
                for mi in self.kb_mi() {
                    members.extend(mi.members());
                }
                MeasureValue::from_int(members.len() as u64)
            }
            MeasureKind::A => {
                assert!(
                    kb.selfcontradictions_empty(),
                    "transformed KBs have no selfcontradictions"
                );
                MeasureValue::from_int(self.kb_mc_count() as u64).saturating_sub_int(1)
            }
            MeasureKind::H => {
                let edges: Vec<VertexSet> = self
                    .kb_mi()
                    .iter()
                    .map(|mi| {
                        mi.members()
                            .into_iter()
                            .map(|m| match m {
                                crate::kb::KbMember::Atom(a) => a,
                                crate::kb::KbMember::Formula(f) => kb.atom_count() + f,
                            })
                            .collect()
                    })
                    .collect();
                Hypergraph::new(edges).min_hitting_set_size()
            }
            MeasureKind::Nc => {
                if kb.is_consistent() {
                    MeasureValue::zero()
                } else {
                    let min_mi = self
                        .kb_mi()
                        .iter()
                        .map(|mi| mi.len())
                        .min()
                        .expect("inconsistent KB has minimal inconsistent subsets");
                    MeasureValue::from_int((kb.member_count() - min_mi + 1) as u64)
                }
            }
            MeasureKind::C => {
                // Atoms are KB members, hence true or both in any 3VL
                // model; a formula avoids falsehood exactly when every
                // clause carries a both-valued atom. So the measure is a
                // minimum hitting set over the canonical clauses.
                let edges: Vec<VertexSet> = kb
                    .all_clauses()
                    .map(|c| c.iter().copied().collect())
                    .collect();
                Hypergraph::new(edges).min_hitting_set_size()
            }
            MeasureKind::Eta => eta_prop(kb),
        })
    }

    pub fn measure(&self, id: MeasureId) -> Result<MeasureValue, Error> {
        match id.family {
            Family::Db => self.db_measure(id.kind),
            Family::Prop => self.prop_measure(id.kind),
        }
    }
}

/// Computes the requested measures, sharing intermediates, and reports
/// whatever evidence those measures materialized.
pub fn measure_all(
    db: &Database,
    cs: &ConstraintSet,
    which: &[MeasureId],
) -> Result<MeasureReport, Error> {
    let ev = Evaluator::new(db, cs);
    let mut values = BTreeMap::new();
    for id in which {
        values.insert(*id, ev.measure(*id)?);
    }
    let mut evidence = Evidence::default();
    if let Some(h) = ev.hypergraph.get() {
        evidence.mi_edges = Some(
            h.edges
                .iter()
                .cloned()
                .zip(h.witnesses.iter().cloned())
                .collect(),
        );
    }
    evidence.classification = ev.classification.get().cloned();
    evidence.mcs = ev.mcs.get().map(|m| m.to_vec());
    if let Some((_, witness)) = ev.db_hitting.get() {
        evidence.hitting_set = witness.clone();
        evidence.conflict_base = witness.clone();
    }
    if let Some((_, w)) = ev.db_eta.get() {
        evidence.lp_witness = Some(w.clone());
    }
    evidence.kb_mi_count = ev.kb_mi.get().map(|m| m.len());
    Ok(MeasureReport { values, evidence })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures_test::{mealticket_constraints, mealticket_db};

    fn golden_db() -> Vec<(MeasureKind, MeasureValue)> {
        vec![
            (MeasureKind::B, MeasureValue::one()),
            (MeasureKind::M, MeasureValue::from_int(3)),
            (MeasureKind::Sharp, MeasureValue::from_int(2)),
            (MeasureKind::P, MeasureValue::from_int(4)),
            (MeasureKind::A, MeasureValue::from_int(2)),
            (MeasureKind::H, MeasureValue::from_int(2)),
            (MeasureKind::Nc, MeasureValue::from_int(7)),
            (MeasureKind::Hs, MeasureValue::Infinite),
            (MeasureKind::C, MeasureValue::from_int(2)),
            (MeasureKind::Eta, MeasureValue::one()),
        ]
    }

    #[test]
    fn db_measures_match_the_worked_example() {
        let db = mealticket_db();
        let cs = mealticket_constraints(db.schema());
        let ev = Evaluator::new(&db, &cs);
        for (kind, expected) in golden_db() {
            assert_eq!(ev.db_measure(kind).unwrap(), expected, "db:{}", kind.name());
        }
    }

    #[test]
    fn prop_measures_match_the_worked_example() {
        // All values verified by the brute-force oracles; the maximal
        // consistent subset count is 12 (see oracle::tests), so IA is 11.
        let db = mealticket_db();
        let cs = mealticket_constraints(db.schema());
        let ev = Evaluator::new(&db, &cs);
        let expected = vec![
            (MeasureKind::B, MeasureValue::one()),
            (MeasureKind::M, MeasureValue::from_int(4)),
            (MeasureKind::Sharp, MeasureValue::ratio(17, 12)),
            (MeasureKind::P, MeasureValue::from_int(9)),
            (MeasureKind::A, MeasureValue::from_int(11)),
            (MeasureKind::H, MeasureValue::from_int(2)),
            (MeasureKind::Nc, MeasureValue::from_int(9)),
            (MeasureKind::Hs, MeasureValue::one()),
            (MeasureKind::C, MeasureValue::from_int(2)),
            (MeasureKind::Eta, MeasureValue::ratio(1, 2)),
        ];
        for (kind, want) in expected {
            assert_eq!(
                ev.prop_measure(kind).unwrap(),
                want,
                "prop:{}",
                kind.name()
            );
        }
    }

    #[test]
    fn empty_database_scores_zero_everywhere() {
        let db = mealticket_db();
        let empty = db.restrict(&TupleSet::new());
        let cs = mealticket_constraints(db.schema());
        for id in MeasureId::all() {
            let ev = Evaluator::new(&empty, &cs);
            assert_eq!(ev.measure(id).unwrap(), MeasureValue::zero(), "{id}");
        }
    }

    #[test]
    fn collapse_example_counts_one_kb_mi() {
        let db = crate::fixtures_test::int_db1(&[0]);
        let cs = crate::constraint::parse_constraints(
            "denial ca: R(x) -> x = 1\ndenial cb: R(x) -> x = 2",
            db.schema(),
        )
        .unwrap();
        let ev = Evaluator::new(&db, &cs);
        assert_eq!(
            ev.prop_measure(MeasureKind::M).unwrap(),
            MeasureValue::one()
        );
    }

    #[test]
    fn measure_all_shares_and_reports_only_what_it_computed() {
        let db = mealticket_db();
        let cs = mealticket_constraints(db.schema());
        let only_m = measure_all(&db, &cs, &[MeasureId::db(MeasureKind::M)]).unwrap();
        assert!(only_m.evidence.mi_edges.is_some());
        assert!(only_m.evidence.mcs.is_none(), "IM must not enumerate MCS");
        let with_a = measure_all(&db, &cs, &[MeasureId::db(MeasureKind::A)]).unwrap();
        assert!(with_a.evidence.mcs.is_some());
        let all = measure_all(&db, &cs, &MeasureId::all()).unwrap();
        assert_eq!(all.values.len(), 20);
    }

    #[test]
    fn measure_id_round_trips() {
        for id in MeasureId::all() {
            assert_eq!(MeasureId::parse(&id.to_string()), Some(id));
        }
        assert_eq!(MeasureId::parse("db:nope"), None);
        assert_eq!(MeasureId::parse("IM"), None);
    }
}
