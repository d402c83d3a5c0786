//! Machine-checking of the rationality-postulate tables.
//!
//! Expected-satisfied cells are checked on seeded random instances that
//! instantiate the postulate's antecedent; expected-violated cells are
//! backed by stored counterexample bundles that are re-verified on every
//! run. A cell is never declared violated merely because no violation
//! was found: refutations require a concrete instance.
//!
//! Two cells of the published tables disagree with what the machine
//! verifies; see [`ERRATA`]. The harness reports those cells as
//! mismatches with the corrective evidence attached.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;

use crate::constraint::{parse_constraints, ConstraintSet};
use crate::error::Error;
use crate::gen::InstanceGen;
use crate::ground::conflict_hypergraph;
use crate::kb::{transform, KbMember};
use crate::measure::{Evaluator, Family, MeasureKind, ALL_KINDS};
use crate::model::{Database, Schema, TupleSet, Value};
use crate::oracle::{oracle_kb_subset_measure, OracleBounds};
use crate::rational::MeasureValue;
use crate::schema_io::{parse_schema, read_relation_csv};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PostulateId {
    Consistency,
    Monotony,
    FreeFormulaIndependence,
    SafeFormulaIndependence,
    Penalty,
    Dominance,
    SuperAdditivity,
    MISeparability,
    MINormalization,
    Attenuation,
    EqualConflict,
    AlmostConsistency,
}

/// The ten rows of the published postulate tables, in their order.
pub const TABLE_ROWS: [PostulateId; 10] = [
    PostulateId::FreeFormulaIndependence,
    PostulateId::SafeFormulaIndependence,
    PostulateId::Penalty,
    PostulateId::Dominance,
    PostulateId::SuperAdditivity,
    PostulateId::MISeparability,
    PostulateId::MINormalization,
    PostulateId::Attenuation,
    PostulateId::EqualConflict,
    PostulateId::AlmostConsistency,
];

impl PostulateId {
    pub fn name(self) -> &'static str {
        match self {
            PostulateId::Consistency => "Consistency",
            PostulateId::Monotony => "Monotony",
            PostulateId::FreeFormulaIndependence => "FreeFormulaIndependence",
            PostulateId::SafeFormulaIndependence => "SafeFormulaIndependence",
            PostulateId::Penalty => "Penalty",
            PostulateId::Dominance => "Dominance",
            PostulateId::SuperAdditivity => "SuperAdditivity",
            PostulateId::MISeparability => "MISeparability",
            PostulateId::MINormalization => "MINormalization",
            PostulateId::Attenuation => "Attenuation",
            PostulateId::EqualConflict => "EqualConflict",
            PostulateId::AlmostConsistency => "AlmostConsistency",
        }
    }

    pub fn from_name(s: &str) -> Option<PostulateId> {
        let all = [
            PostulateId::Consistency,
            PostulateId::Monotony,
            PostulateId::FreeFormulaIndependence,
            PostulateId::SafeFormulaIndependence,
            PostulateId::Penalty,
            PostulateId::Dominance,
            PostulateId::SuperAdditivity,
            PostulateId::MISeparability,
            PostulateId::MINormalization,
            PostulateId::Attenuation,
            PostulateId::EqualConflict,
            PostulateId::AlmostConsistency,
        ];
        all.into_iter().find(|p| p.name() == s)
    }
}

// Column order B M # P A H nc hs C eta, matching ALL_KINDS.
type Row = [bool; 10];

const T: bool = true;
const F: bool = false;

/// Published expectations for the transformation-based measures.
const PAPER_TABLE_PROP: [(PostulateId, Row); 10] = [
    (PostulateId::FreeFormulaIndependence, [T, T, T, T, T, T, F, T, T, T]),
    (PostulateId::SafeFormulaIndependence, [T, T, T, T, T, T, F, T, T, T]),
    (PostulateId::Penalty, [F, T, T, T, T, F, T, F, F, F]),
    (PostulateId::Dominance, [T, F, F, F, F, F, F, T, T, T]),
    (PostulateId::SuperAdditivity, [F, T, T, T, T, T, T, F, T, F]),
    (PostulateId::MISeparability, [F, T, T, F, F, F, F, F, F, F]),
    (PostulateId::MINormalization, [T, T, F, F, F, T, T, T, T, F]),
    (PostulateId::Attenuation, [F, F, T, F, F, F, F, F, F, T]),
    (PostulateId::EqualConflict, [T, T, T, T, T, T, T, T, T, T]),
    (PostulateId::AlmostConsistency, [F, F, T, F, F, F, F, F, F, T]),
];

/// Published expectations for the tuple-blaming measures.
const PAPER_TABLE_DB: [(PostulateId, Row); 10] = [
    (PostulateId::FreeFormulaIndependence, [T, T, T, T, T, T, F, T, T, T]),
    (PostulateId::SafeFormulaIndependence, [T, T, T, T, T, T, F, T, T, T]),
    (PostulateId::Penalty, [F, T, T, T, F, F, T, F, F, F]),
    (PostulateId::Dominance, [T, T, T, T, T, T, T, T, T, T]),
    (PostulateId::SuperAdditivity, [F, T, T, T, T, T, T, F, T, F]),
    (PostulateId::MISeparability, [F, T, T, F, F, F, F, F, F, F]),
    (PostulateId::MINormalization, [T, T, F, F, F, T, T, F, T, F]),
    (PostulateId::Attenuation, [F, F, T, F, F, F, F, F, F, F]),
    (PostulateId::EqualConflict, [T, T, T, T, T, T, T, T, T, T]),
    (PostulateId::AlmostConsistency, [F, F, T, F, F, F, F, F, F, T]),
];

/// Cells whose published verdict the machine refutes. The bool is the
/// machine-verified verdict.
///
/// - Penalty for the maximal-consistent-subset measure on transformed
///   databases: a three-tuple functional-dependency instance keeps the
///   measure unchanged when a problematic tuple is deleted, so the
///   published "satisfied" is wrong (counterexample stored in the
///   fd_fork bundle).
/// - Attenuation for the database eta measure: a standalone minimal
///   inconsistent set M of size n has eta measure exactly 1/n (every
///   violation inside M covers all of M), which is strictly decreasing
///   in n, so the postulate holds and the published "violated" is a
///   typo; it is also the one table difference the source tables fail
///   to mark as a deliberate change.
pub const ERRATA: [(Family, PostulateId, MeasureKind, bool); 2] = [
    (Family::Prop, PostulateId::Penalty, MeasureKind::A, false),
    (Family::Db, PostulateId::Attenuation, MeasureKind::Eta, true),
];

/// The published expectation for a cell, if the postulate is a table
/// row.
pub fn paper_expected(family: Family, postulate: PostulateId, kind: MeasureKind) -> Option<bool> {
    let table = match family {
        Family::Prop => &PAPER_TABLE_PROP,
        Family::Db => &PAPER_TABLE_DB,
    };
    let col = ALL_KINDS.iter().position(|k| *k == kind)?;
    table
        .iter()
        .find(|(p, _)| *p == postulate)
        .map(|(_, row)| row[col])
}

fn erratum(family: Family, postulate: PostulateId, kind: MeasureKind) -> Option<bool> {
    ERRATA
        .iter()
        .find(|(f, p, k, _)| *f == family && *p == postulate && *k == kind)
        .map(|(_, _, _, v)| *v)
}

#[derive(Clone, Debug)]
pub enum Verdict {
    HeldOnTrials { trials: usize },
    SatisfiedByDefinition,
    CounterexampleVerified { bundle: String, detail: String },
    ViolatedOnTrials { trial: u64, detail: String },
    CounterexampleMissing,
    CounterexampleFailed { bundle: String, detail: String },
}

impl Verdict {
    /// The satisfaction verdict this outcome establishes, when definite.
    pub fn establishes(&self) -> Option<bool> {
        match self {
            Verdict::HeldOnTrials { .. } | Verdict::SatisfiedByDefinition => Some(true),
            Verdict::CounterexampleVerified { .. } | Verdict::ViolatedOnTrials { .. } => {
                Some(false)
            }
            Verdict::CounterexampleMissing | Verdict::CounterexampleFailed { .. } => None,
        }
    }

    pub fn summary(&self) -> String {
        match self {
            Verdict::HeldOnTrials { trials } => format!("held on {trials} trials"),
            Verdict::SatisfiedByDefinition => "satisfied by definition".into(),
            Verdict::CounterexampleVerified { bundle, .. } => {
                format!("counterexample verified ({bundle})")
            }
            Verdict::ViolatedOnTrials { trial, detail } => {
                format!("violated on trial {trial}: {detail}")
            }
            Verdict::CounterexampleMissing => "no stored counterexample".into(),
            Verdict::CounterexampleFailed { bundle, detail } => {
                format!("counterexample {bundle} failed: {detail}")
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub family: Family,
    pub kind: MeasureKind,
    pub postulate: PostulateId,
    pub paper_expected: Option<bool>,
    pub verdict: Verdict,
}

impl CheckResult {
    /// True when the machine verdict agrees with the published cell.
    pub fn reproduces_paper(&self) -> bool {
        match self.paper_expected {
            None => self.verdict.establishes() == Some(true),
            Some(exp) => self.verdict.establishes() == Some(exp),
        }
    }
}

#[derive(Clone, Debug)]
pub struct HarnessConfig {
    pub trials: usize,
    pub seed: u64,
    pub store_dir: PathBuf,
}

impl HarnessConfig {
    pub fn new(trials: usize, seed: u64) -> HarnessConfig {
        HarnessConfig {
            trials,
            seed,
            store_dir: default_store_dir(),
        }
    }
}

pub fn default_store_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/counterexamples"))
}

// ---------------------------------------------------------------------------
// Measure evaluation helpers
// ---------------------------------------------------------------------------

fn eval(family: Family, db: &Database, cs: &ConstraintSet, kind: MeasureKind) -> MeasureValue {
    let ev = Evaluator::new(db, cs);
    match family {
        Family::Db => ev.db_measure(kind),
        Family::Prop => ev.prop_measure(kind),
    }
    .expect("measure evaluation on generated instance")
}

fn eval_all(family: Family, db: &Database, cs: &ConstraintSet) -> BTreeMap<MeasureKind, MeasureValue> {
    let ev = Evaluator::new(db, cs);
    ALL_KINDS
        .into_iter()
        .map(|k| {
            let v = match family {
                Family::Db => ev.db_measure(k),
                Family::Prop => ev.prop_measure(k),
            }
            .expect("measure evaluation on generated instance");
            (k, v)
        })
        .collect()
}

/// Measures of one minimal inconsistent subset of the transformed KB,
/// evaluated as a knowledge base of its own via exhaustive enumeration.
fn eval_kb_mi(db: &Database, cs: &ConstraintSet, mi_members: &[(bool, usize)]) -> BTreeMap<MeasureKind, MeasureValue> {
    let kb = transform(db, cs);
    let bounds = OracleBounds {
        max_subset_tuples: 16,
        max_classical_atoms: 16,
        max_threevl_atoms: 12,
    };
    ALL_KINDS
        .into_iter()
        .map(|k| {
            (
                k,
                oracle_kb_subset_measure(k, &kb, mi_members, &bounds)
                    .expect("subset within bounds"),
            )
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Trial outcomes
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Default)]
struct TrialStats {
    antecedent_hits: usize,
    violations: BTreeMap<MeasureKind, (u64, String)>,
}

impl TrialStats {
    fn merge(mut self, other: TrialStats) -> TrialStats {
        self.antecedent_hits += other.antecedent_hits;
        for (k, v) in other.violations {
            let keep = match self.violations.get(&k) {
                Some((t, _)) => v.0 < *t,
                None => true,
            };
            if keep {
                self.violations.insert(k, v);
            }
        }
        self
    }
}

/// One trial's findings: whether the antecedent could be instantiated,
/// plus any per-measure violations.
type TrialFn = dyn Fn(u64) -> TrialStats + Sync;

fn run_trials(trials: usize, f: &TrialFn) -> TrialStats {
    (0..trials as u64)
        .into_par_iter()
        .map(|t| f(t))
        .reduce(TrialStats::default, TrialStats::merge)
}

fn violation(
    stats: &mut TrialStats,
    trial: u64,
    kind: MeasureKind,
    detail: String,
) {
    stats.violations.entry(kind).or_insert((trial, detail));
}

// ---------------------------------------------------------------------------
// Postulate drivers
// ---------------------------------------------------------------------------

fn gen_for(cfg: &HarnessConfig) -> InstanceGen {
    InstanceGen::with_seed(cfg.seed)
}

/// Runs the trial driver for one (family, postulate) pair, producing
/// per-measure statistics over antecedent-satisfying instances.
fn drive(family: Family, postulate: PostulateId, cfg: &HarnessConfig) -> TrialStats {
    let gen = gen_for(cfg);
    match postulate {
        PostulateId::Consistency => run_trials(cfg.trials, &move |t| {
            let (db, cs) = gen.instance(t);
            let mut stats = TrialStats {
                antecedent_hits: 1,
                ..Default::default()
            };
            let consistent = crate::ground::is_consistent(&db, &cs);
            for (k, v) in eval_all(family, &db, &cs) {
                if v.is_zero() != consistent {
                    violation(&mut stats, t, k, format!("value {v} vs consistent={consistent}"));
                }
            }
            stats
        }),
        PostulateId::Monotony => run_trials(cfg.trials, &move |t| {
            let (small, big, cs) = gen.instance_pair(t);
            let mut stats = TrialStats {
                antecedent_hits: 1,
                ..Default::default()
            };
            let vs = eval_all(family, &small, &cs);
            let vb = eval_all(family, &big, &cs);
            for k in ALL_KINDS {
                if vs[&k] > vb[&k] {
                    violation(&mut stats, t, k, format!("{} > {}", vs[&k], vb[&k]));
                }
            }
            stats
        }),
        PostulateId::FreeFormulaIndependence | PostulateId::SafeFormulaIndependence => {
            run_trials(cfg.trials, &move |t| drive_free(family, &gen, t))
        }
        PostulateId::Penalty => run_trials(cfg.trials, &move |t| drive_penalty(family, &gen, t)),
        PostulateId::Dominance => match family {
            Family::Db => TrialStats::default(),
            Family::Prop => run_trials(cfg.trials, &move |t| drive_dominance(&gen, t)),
        },
        PostulateId::SuperAdditivity => {
            run_trials(cfg.trials, &move |t| drive_superadditivity(family, &gen, t))
        }
        PostulateId::MISeparability => {
            run_trials(cfg.trials, &move |t| drive_miseparability(family, &gen, t))
        }
        PostulateId::MINormalization | PostulateId::Attenuation | PostulateId::EqualConflict => {
            run_trials(cfg.trials, &move |t| drive_mi_postulate(family, postulate, &gen, t))
        }
        PostulateId::AlmostConsistency => drive_almost_consistency(family),
    }
}

fn drive_free(family: Family, gen: &InstanceGen, t: u64) -> TrialStats {
    let (db, cs) = gen.instance(t);
    let mut stats = TrialStats::default();
    let kb = transform(&db, &cs);
    let free_atoms = kb.free_atoms();
    let mut deletions: Vec<Database> = Vec::new();
    for atom in free_atoms.iter().take(2) {
        let id = kb.atom_ids[*atom];
        deletions.push(db.without_tuples(&[id].into_iter().collect()));
    }
    // A free (equivalently safe) constraint maps to no formula; deleting
    // it never changes the KB, so only the tuple case is informative for
    // the transformation family.
    if deletions.is_empty() {
        return stats;
    }
    stats.antecedent_hits = 1;
    let before = eval_all(family, &db, &cs);
    for smaller in &deletions {
        let after = eval_all(family, smaller, &cs);
        for k in ALL_KINDS {
            if before[&k] != after[&k] {
                violation(
                    &mut stats,
                    t,
                    k,
                    format!("free deletion changed {} -> {}", before[&k], after[&k]),
                );
            }
        }
    }
    stats
}

fn drive_penalty(family: Family, gen: &InstanceGen, t: u64) -> TrialStats {
    let (db, cs) = gen.instance(t);
    let mut stats = TrialStats::default();
    let kb = transform(&db, &cs);
    let free = kb.free_atoms();
    let problematic: Vec<_> = (0..kb.atom_count()).filter(|a| !free.contains(a)).collect();
    let mut after_dbs: Vec<(Database, ConstraintSet)> = Vec::new();
    for atom in problematic.iter().take(3) {
        let id = kb.atom_ids[*atom];
        after_dbs.push((db.without_tuples(&[id].into_iter().collect()), cs.clone()));
    }
    if family == Family::Prop {
        // Problematic constraint classes: a violated formula stands for
        // every constraint mapped to it; deleting the class removes the
        // formula from the KB (single-constraint deletion leaves the KB
        // unchanged when the formula is duplicated).
        for f in kb.formulas.iter().take(2) {
            let mut smaller = cs.clone();
            for name in &f.sources {
                smaller = smaller.without(name).expect("source exists");
            }
            after_dbs.push((db.clone(), smaller));
        }
    }
    if after_dbs.is_empty() {
        return stats;
    }
    stats.antecedent_hits = 1;
    let before = eval_all(family, &db, &cs);
    for (sdb, scs) in &after_dbs {
        let after = eval_all(family, sdb, scs);
        for k in ALL_KINDS {
            if before[&k] <= after[&k] {
                violation(
                    &mut stats,
                    t,
                    k,
                    format!(
                        "problematic deletion did not strictly decrease: {} -> {}",
                        before[&k], after[&k]
                    ),
                );
            }
        }
    }
    stats
}

/// Implication pattern pairs (phi implies psi) for the Dominance trials.
fn dominance_pairs(schema: &Schema) -> Vec<(ConstraintSet, ConstraintSet)> {
    let pairs = [
        // A functional dependency implies the matching numerical one.
        ("fd phid: R: A -> B", "nd psid: R: A -> 2 B"),
        // Strengthened versus weakened unary guard.
        (
            "denial phid: R(x0, x1, x2) -> x0 >= 1",
            "denial psid: R(x0, x1, x2) -> x0 >= 0",
        ),
        // Conjunctive guard implies the disjunctive one.
        (
            "denial phid: R(x0, x1, x2), R(x3, x4, x5) -> x1 = x4 & x0 > 1",
            "denial psid: R(x0, x1, x2), R(x3, x4, x5) -> x1 = x4 | x0 > 1",
        ),
        // A formula implies itself.
        ("fd phid: R: B -> C", "fd psid: R: B -> C"),
    ];
    pairs
        .into_iter()
        .map(|(p, q)| {
            (
                parse_constraints(p, schema).expect("builtin pattern"),
                parse_constraints(q, schema).expect("builtin pattern"),
            )
        })
        .collect()
}

fn drive_dominance(gen: &InstanceGen, t: u64) -> TrialStats {
    let (db, cs) = gen.instance(t);
    let mut stats = TrialStats {
        antecedent_hits: 1,
        ..Default::default()
    };
    let pairs = dominance_pairs(db.schema());
    let (phi, psi) = &pairs[(t % pairs.len() as u64) as usize];
    let with_phi = cs.union(phi);
    let with_psi = cs.union(psi);
    let vp = eval_all(Family::Prop, &db, &with_phi);
    let vq = eval_all(Family::Prop, &db, &with_psi);
    for k in ALL_KINDS {
        if vp[&k] < vq[&k] {
            violation(&mut stats, t, k, format!("{} < {}", vp[&k], vq[&k]));
        }
    }
    stats
}

/// Tuple-valued rendering of MI(D), comparable across databases.
type MiSig = std::collections::BTreeSet<std::collections::BTreeSet<crate::model::Tuple>>;

fn db_mi_signature(db: &Database, cs: &ConstraintSet) -> MiSig {
    conflict_hypergraph(db, cs)
        .edge_set()
        .iter()
        .map(|e| e.iter().map(|id| db.tuple(*id).clone()).collect())
        .collect()
}

/// Random split of a database into two disjoint halves.
fn split_db(db: &Database, rng: &mut rand_chacha::ChaCha8Rng) -> (Database, Database) {
    use rand::Rng;
    let mut left = TupleSet::new();
    for id in db.tuple_ids() {
        if rng.gen_bool(0.5) {
            left.insert(id);
        }
    }
    (db.restrict(&left), db.without_tuples(&left))
}

/// Split along conflict components so no minimal inconsistent set spans
/// the two halves.
fn component_split(db: &Database, cs: &ConstraintSet, rng: &mut rand_chacha::ChaCha8Rng) -> (Database, Database) {
    use rand::Rng;
    let h = conflict_hypergraph(db, cs);
    let ids: Vec<_> = db.tuple_ids().collect();
    let mut component: BTreeMap<crate::model::TupleId, usize> =
        ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    // Union-find by repeated relabeling; instances are tiny.
    for e in &h.edges {
        let target = *e.iter().map(|id| &component[id]).min().unwrap();
        let members: Vec<_> = component
            .iter()
            .filter(|(_, c)| e.iter().any(|id| component[id] == **c))
            .map(|(id, _)| *id)
            .collect();
        for id in members {
            component.insert(id, target);
        }
    }
    let mut sides: BTreeMap<usize, bool> = BTreeMap::new();
    let mut left = TupleSet::new();
    for id in ids {
        let side = *sides.entry(component[&id]).or_insert_with(|| rng.gen_bool(0.5));
        if side {
            left.insert(id);
        }
    }
    (db.restrict(&left), db.without_tuples(&left))
}

fn drive_superadditivity(family: Family, gen: &InstanceGen, t: u64) -> TrialStats {
    use rand::Rng;
    let (db, cs) = gen.instance(t);
    let mut rng = gen.rng_for(t ^ 0x5a5a);
    let mut stats = TrialStats::default();
    let (d1, d2) = split_db(&db, &mut rng);
    match family {
        Family::Db => {
            stats.antecedent_hits = 1;
            let vu = eval_all(family, &db, &cs);
            let v1 = eval_all(family, &d1, &cs);
            let v2 = eval_all(family, &d2, &cs);
            for k in ALL_KINDS {
                if vu[&k] < v1[&k].clone() + v2[&k].clone() {
                    violation(
                        &mut stats,
                        t,
                        k,
                        format!("{} < {} + {}", vu[&k], v1[&k], v2[&k]),
                    );
                }
            }
        }
        Family::Prop => {
            // The two knowledge bases must be disjoint: split the
            // constraints as well.
            let all: Vec<_> = cs.iter().cloned().collect();
            if all.len() < 2 {
                return stats;
            }
            let cut = rng.gen_range(1..all.len());
            let c1 = ConstraintSet::new(all[..cut].to_vec()).unwrap();
            let c2 = ConstraintSet::new(all[cut..].to_vec()).unwrap();
            stats.antecedent_hits = 1;
            let union_cs = c1.union(&c2);
            let vu = eval_all(family, &db, &union_cs);
            let v1 = eval_all(family, &d1, &c1);
            let v2 = eval_all(family, &d2, &c2);
            for k in ALL_KINDS {
                if vu[&k] < v1[&k].clone() + v2[&k].clone() {
                    violation(
                        &mut stats,
                        t,
                        k,
                        format!("{} < {} + {}", vu[&k], v1[&k], v2[&k]),
                    );
                }
            }
        }
    }
    stats
}

fn drive_miseparability(family: Family, gen: &InstanceGen, t: u64) -> TrialStats {
    use rand::Rng;
    let (db, cs) = gen.instance(t);
    let mut rng = gen.rng_for(t ^ 0x1717);
    let mut stats = TrialStats::default();
    let (d1, d2) = component_split(&db, &cs, &mut rng);
    match family {
        Family::Db => {
            // Antecedent: the minimal inconsistent sets partition.
            let su = db_mi_signature(&db, &cs);
            let s1 = db_mi_signature(&d1, &cs);
            let s2 = db_mi_signature(&d2, &cs);
            let merged: MiSig = s1.union(&s2).cloned().collect();
            if !(s1.is_disjoint(&s2) && su == merged) {
                return stats;
            }
            stats.antecedent_hits = 1;
            let vu = eval_all(family, &db, &cs);
            let v1 = eval_all(family, &d1, &cs);
            let v2 = eval_all(family, &d2, &cs);
            for k in ALL_KINDS {
                if vu[&k] != v1[&k].clone() + v2[&k].clone() {
                    violation(
                        &mut stats,
                        t,
                        k,
                        format!("{} != {} + {}", vu[&k], v1[&k], v2[&k]),
                    );
                }
            }
        }
        Family::Prop => {
            let all: Vec<_> = cs.iter().cloned().collect();
            if all.len() < 2 {
                return stats;
            }
            let cut = rng.gen_range(1..all.len());
            let c1 = ConstraintSet::new(all[..cut].to_vec()).unwrap();
            let c2 = ConstraintSet::new(all[cut..].to_vec()).unwrap();
            let union_cs = c1.union(&c2);
            let ku = transform(&db, &union_cs);
            let k1 = transform(&d1, &c1);
            let k2 = transform(&d2, &c2);
            let s1 = k1.mi_signatures();
            let s2 = k2.mi_signatures();
            let su = ku.mi_signatures();
            let merged: std::collections::BTreeSet<_> = s1.union(&s2).cloned().collect();
            if !(s1.is_disjoint(&s2) && su == merged) {
                return stats;
            }
            stats.antecedent_hits = 1;
            let vu = eval_all(family, &db, &union_cs);
            let v1 = eval_all(family, &d1, &c1);
            let v2 = eval_all(family, &d2, &c2);
            for k in ALL_KINDS {
                if vu[&k] != v1[&k].clone() + v2[&k].clone() {
                    violation(
                        &mut stats,
                        t,
                        k,
                        format!("{} != {} + {}", vu[&k], v1[&k], v2[&k]),
                    );
                }
            }
        }
    }
    stats
}

/// Minimal-inconsistent-set measures: the set is evaluated standalone,
/// as a database against the same constraints in the tuple-blaming
/// family, or as a knowledge base of its own in the transformation
/// family.
fn mi_contexts(
    family: Family,
    db: &Database,
    cs: &ConstraintSet,
) -> Vec<(usize, BTreeMap<MeasureKind, MeasureValue>)> {
    match family {
        Family::Db => {
            let h = conflict_hypergraph(db, cs);
            h.edges
                .iter()
                .take(3)
                .map(|e| (e.len(), eval_all(family, &db.restrict(e), cs)))
                .collect()
        }
        Family::Prop => {
            let kb = transform(db, cs);
            kb.mi()
                .into_iter()
                .take(3)
                .map(|mi| {
                    let members: Vec<(bool, usize)> = mi
                        .members()
                        .into_iter()
                        .map(|m| match m {
                            KbMember::Atom(a) => (false, a),
                            KbMember::Formula(f) => (true, f),
                        })
                        .collect();
                    (mi.len(), eval_kb_mi(db, cs, &members))
                })
                .collect()
        }
    }
}

fn drive_mi_postulate(family: Family, postulate: PostulateId, gen: &InstanceGen, t: u64) -> TrialStats {
    let (db, cs) = gen.instance(t);
    let mut stats = TrialStats::default();
    let contexts = mi_contexts(family, &db, &cs);
    match postulate {
        PostulateId::MINormalization => {
            if contexts.is_empty() {
                return stats;
            }
            stats.antecedent_hits = 1;
            for (_, values) in &contexts {
                for k in ALL_KINDS {
                    if values[&k] != MeasureValue::one() {
                        violation(&mut stats, t, k, format!("measure of MI set is {}", values[&k]));
                    }
                }
            }
        }
        PostulateId::Attenuation => {
            let mut hit = false;
            for (i, (ls, lv)) in contexts.iter().enumerate() {
                for (rs, rv) in contexts.iter().skip(i + 1) {
                    let (small, big) = if ls < rs {
                        (lv, rv)
                    } else if rs < ls {
                        (rv, lv)
                    } else {
                        continue;
                    };
                    hit = true;
                    for k in ALL_KINDS {
                        if small[&k] <= big[&k] {
                            violation(
                                &mut stats,
                                t,
                                k,
                                format!("smaller MI scored {}, larger {}", small[&k], big[&k]),
                            );
                        }
                    }
                }
            }
            if hit {
                stats.antecedent_hits = 1;
            }
        }
        PostulateId::EqualConflict => {
            let mut hit = false;
            for (i, (ls, lv)) in contexts.iter().enumerate() {
                for (rs, rv) in contexts.iter().skip(i + 1) {
                    if ls != rs {
                        continue;
                    }
                    hit = true;
                    for k in ALL_KINDS {
                        if lv[&k] != rv[&k] {
                            violation(
                                &mut stats,
                                t,
                                k,
                                format!("equal-size MI sets scored {} and {}", lv[&k], rv[&k]),
                            );
                        }
                    }
                }
            }
            if hit {
                stats.antecedent_hits = 1;
            }
        }
        _ => unreachable!(),
    }
    stats
}

/// The parametric family behind the limit postulate: a single n-ary
/// dependency edge of each size in the range.
pub fn almost_family_instance(n: u32) -> (Database, ConstraintSet) {
    let schema = parse_schema("relation R(A: int, B: int)").expect("family schema");
    let rows: Vec<(String, Vec<Value>)> = (1..=n as i64)
        .map(|b| ("R".to_string(), vec![Value::Int(1.into()), Value::Int(b.into())]))
        .collect();
    let db = Database::from_tuples(schema, rows).expect("family rows");
    let cs = parse_constraints(
        &format!("nd chain: R: A -> {} B", n - 1),
        db.schema(),
    )
    .expect("family constraint");
    (db, cs)
}

fn almost_family_values(family: Family) -> BTreeMap<MeasureKind, Vec<MeasureValue>> {
    let mut out: BTreeMap<MeasureKind, Vec<MeasureValue>> = BTreeMap::new();
    for n in 2..=8u32 {
        let (db, cs) = almost_family_instance(n);
        for (k, v) in eval_all(family, &db, &cs) {
            out.entry(k).or_default().push(v);
        }
    }
    out
}

/// Finite proxy for the limit: the family values must be strictly
/// decreasing and fall to a quarter or less by size eight.
fn drive_almost_consistency(family: Family) -> TrialStats {
    let mut stats = TrialStats {
        antecedent_hits: 7,
        ..Default::default()
    };
    for (k, values) in almost_family_values(family) {
        let decreasing = values.windows(2).all(|w| w[0] > w[1]);
        let small_tail = *values.last().unwrap() <= MeasureValue::ratio(1, 4);
        if !(decreasing && small_tail) {
            violation(
                &mut stats,
                0,
                k,
                format!(
                    "family values do not vanish: first {}, last {}",
                    values[0],
                    values.last().unwrap()
                ),
            );
        }
    }
    stats
}

// ---------------------------------------------------------------------------
// Counterexample store
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
struct BundleFile {
    #[allow(dead_code)]
    description: String,
    schema: String,
    constraints: String,
    data: BTreeMap<String, String>,
    data2: Option<BTreeMap<String, String>>,
    constraints2: Option<String>,
    refutes: Vec<RefuteEntry>,
}

#[derive(Debug, Deserialize)]
struct RefuteEntry {
    family: String,
    measure: String,
    postulate: String,
    kind: String,
    tuple: Option<Vec<String>>,
    edge: Option<Vec<Vec<String>>>,
    small: Option<Vec<Vec<String>>>,
    large: Option<Vec<Vec<String>>>,
    phi: Option<String>,
    psi: Option<String>,
    min_n: Option<u32>,
    max_n: Option<u32>,
}

pub struct Bundle {
    pub name: String,
    dir: PathBuf,
    file: BundleFile,
}

impl Bundle {
    fn matches(&self, family: Family, kind: MeasureKind, postulate: PostulateId) -> Option<usize> {
        self.file.refutes.iter().position(|r| {
            r.family == family.prefix()
                && r.measure == kind.name()
                && r.postulate == postulate.name()
        })
    }

    fn load_instance(
        &self,
        schema: &Schema,
        data: &BTreeMap<String, String>,
    ) -> Result<Database, Error> {
        let mut rows = Vec::new();
        for (rel, file) in data {
            rows.push((
                rel.clone(),
                read_relation_csv(schema, rel, &self.dir.join(file))?,
            ));
        }
        Database::load(schema.clone(), &rows)
    }

    fn read(&self, name: &str) -> Result<String, Error> {
        let p = self.dir.join(name);
        std::fs::read_to_string(&p).map_err(|e| Error::io(p.display().to_string(), e))
    }
}

/// Loads every bundle under the store directory.
pub fn load_store(dir: &Path) -> Result<Vec<Bundle>, Error> {
    let mut bundles = Vec::new();
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    let mut dirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    for d in dirs {
        let manifest = d.join("bundle.toml");
        let text = std::fs::read_to_string(&manifest)
            .map_err(|e| Error::io(manifest.display().to_string(), e))?;
        let file: BundleFile = toml::from_str(&text)
            .map_err(|e| Error::Validation(format!("{}: {e}", manifest.display())))?;
        bundles.push(Bundle {
            name: d.file_name().unwrap().to_string_lossy().into_owned(),
            dir: d,
            file,
        });
    }
    Ok(bundles)
}

fn parse_raw_tuple(schema: &Schema, raw: &[String]) -> Result<(String, Vec<Value>), Error> {
    let relation = raw
        .first()
        .ok_or_else(|| Error::Validation("empty tuple spec".into()))?;
    let scheme = schema
        .relation(relation)
        .ok_or_else(|| Error::Validation(format!("unknown relation {relation}")))?;
    if raw.len() - 1 != scheme.arity() {
        return Err(Error::Validation(format!(
            "tuple spec for {relation} has {} values, arity is {}",
            raw.len() - 1,
            scheme.arity()
        )));
    }
    let values = raw[1..]
        .iter()
        .enumerate()
        .map(|(i, cell)| {
            Value::parse_as(scheme.attributes[i].1, cell).map_err(Error::Validation)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((relation.clone(), values))
}

fn lookup_tuple(db: &Database, schema: &Schema, raw: &[String]) -> Result<crate::model::TupleId, Error> {
    let (relation, values) = parse_raw_tuple(schema, raw)?;
    db.find_tuple(&relation, &values)
        .ok_or_else(|| Error::Validation(format!("tuple {relation}{values:?} not in bundle data")))
}

fn lookup_edge(db: &Database, schema: &Schema, raw: &[Vec<String>]) -> Result<TupleSet, Error> {
    raw.iter().map(|r| lookup_tuple(db, schema, r)).collect()
}

/// Re-verifies one stored counterexample. Returns the violation detail
/// or an error when the bundle fails to violate the postulate.
pub fn verify_counterexample(
    bundle: &Bundle,
    family: Family,
    kind: MeasureKind,
    postulate: PostulateId,
) -> Result<String, Error> {
    let idx = bundle
        .matches(family, kind, postulate)
        .ok_or_else(|| Error::Validation("bundle does not cover this cell".into()))?;
    let entry = &bundle.file.refutes[idx];
    let schema = parse_schema(&bundle.read(&bundle.file.schema)?)?;
    let cs = parse_constraints(&bundle.read(&bundle.file.constraints)?, &schema)?;
    let db = bundle.load_instance(&schema, &bundle.file.data)?;
    let fail = |msg: String| Error::Validation(format!("counterexample does not violate: {msg}"));
    match entry.kind.as_str() {
        "penalty-delete" => {
            let raw = entry
                .tuple
                .as_ref()
                .ok_or_else(|| Error::Validation("penalty-delete needs `tuple`".into()))?;
            let id = lookup_tuple(&db, &schema, raw)?;
            let kb = transform(&db, &cs);
            let atom = kb.atom_of(id).expect("tuple is in the database");
            if kb.free_atoms().contains(&atom) {
                return Err(fail("target tuple is free, not problematic".into()));
            }
            let before = eval(family, &db, &cs, kind);
            let after = eval(family, &db.without_tuples(&[id].into_iter().collect()), &cs, kind);
            if before > after {
                return Err(fail(format!("{before} > {after} satisfies Penalty")));
            }
            Ok(format!("deleting a problematic tuple left {before} -> {after}"))
        }
        "free-delete" => {
            let raw = entry
                .tuple
                .as_ref()
                .ok_or_else(|| Error::Validation("free-delete needs `tuple`".into()))?;
            let id = lookup_tuple(&db, &schema, raw)?;
            let kb = transform(&db, &cs);
            let atom = kb.atom_of(id).expect("tuple is in the database");
            if !kb.free_atoms().contains(&atom) {
                return Err(fail("target tuple is not free".into()));
            }
            let before = eval(family, &db, &cs, kind);
            let after = eval(family, &db.without_tuples(&[id].into_iter().collect()), &cs, kind);
            if before == after {
                return Err(fail(format!("measure unchanged at {before}")));
            }
            Ok(format!("free deletion changed {before} -> {after}"))
        }
        "superadd-split" | "misep-split" => {
            let d2 = bundle.load_instance(
                &schema,
                bundle
                    .file
                    .data2
                    .as_ref()
                    .ok_or_else(|| Error::Validation("split check needs `data2`".into()))?,
            )?;
            let (c1, c2) = match (&bundle.file.constraints2, family) {
                (Some(f), Family::Prop) => {
                    (cs.clone(), parse_constraints(&bundle.read(f)?, &schema)?)
                }
                _ => (cs.clone(), cs.clone()),
            };
            let union_db = db.union(&d2)?;
            let union_cs = c1.union(&c2);
            let vu = eval(family, &union_db, &union_cs, kind);
            let v1 = eval(family, &db, &c1, kind);
            let v2 = eval(family, &d2, &c2, kind);
            if entry.kind == "superadd-split" {
                if family == Family::Prop && c1.intersects(&c2) {
                    return Err(fail("constraint parts are not disjoint".into()));
                }
                if !db.disjoint_from(&d2) {
                    return Err(fail("tuple parts are not disjoint".into()));
                }
                if vu >= v1.clone() + v2.clone() {
                    return Err(fail(format!("{vu} >= {v1} + {v2}")));
                }
                Ok(format!("union scored {vu} < {v1} + {v2}"))
            } else {
                // Antecedent: minimal inconsistent sets partition.
                match family {
                    Family::Db => {
                        let su = db_mi_signature(&union_db, &union_cs);
                        let s1 = db_mi_signature(&db, &union_cs);
                        let s2 = db_mi_signature(&d2, &union_cs);
                        let merged: MiSig = s1.union(&s2).cloned().collect();
                        if !(s1.is_disjoint(&s2) && su == merged) {
                            return Err(fail("MI sets do not partition".into()));
                        }
                    }
                    Family::Prop => {
                        let su = transform(&union_db, &union_cs).mi_signatures();
                        let s1 = transform(&db, &c1).mi_signatures();
                        let s2 = transform(&d2, &c2).mi_signatures();
                        let merged: std::collections::BTreeSet<_> =
                            s1.union(&s2).cloned().collect();
                        if !(s1.is_disjoint(&s2) && su == merged) {
                            return Err(fail("KB MI sets do not partition".into()));
                        }
                    }
                }
                if vu == v1.clone() + v2.clone() {
                    return Err(fail(format!("{vu} = {v1} + {v2} satisfies separability")));
                }
                Ok(format!("union scored {vu}, parts {v1} + {v2}"))
            }
        }
        "mi-norm-edge" => {
            let raw = entry
                .edge
                .as_ref()
                .ok_or_else(|| Error::Validation("mi-norm-edge needs `edge`".into()))?;
            let edge = lookup_edge(&db, &schema, raw)?;
            let v = mi_edge_value(family, &db, &cs, &edge, kind)?;
            if v == MeasureValue::one() {
                return Err(fail("MI set scored exactly one".into()));
            }
            Ok(format!("MI set of size {} scored {v}", edge.len()))
        }
        "attenuation-pair" => {
            let small = lookup_edge(
                &db,
                &schema,
                entry
                    .small
                    .as_ref()
                    .ok_or_else(|| Error::Validation("attenuation-pair needs `small`".into()))?,
            )?;
            let large = lookup_edge(
                &db,
                &schema,
                entry
                    .large
                    .as_ref()
                    .ok_or_else(|| Error::Validation("attenuation-pair needs `large`".into()))?,
            )?;
            if small.len() >= large.len() {
                return Err(fail("edge sizes are not increasing".into()));
            }
            let vs = mi_edge_value(family, &db, &cs, &small, kind)?;
            let vl = mi_edge_value(family, &db, &cs, &large, kind)?;
            if vs > vl {
                return Err(fail(format!("{vs} > {vl} satisfies Attenuation")));
            }
            Ok(format!("sizes {} < {} scored {vs} vs {vl}", small.len(), large.len()))
        }
        "dominance-pair" => {
            let phi = parse_constraints(
                &bundle.read(entry.phi.as_ref().ok_or_else(|| {
                    Error::Validation("dominance-pair needs `phi`".into())
                })?)?,
                &schema,
            )?;
            let psi = parse_constraints(
                &bundle.read(entry.psi.as_ref().ok_or_else(|| {
                    Error::Validation("dominance-pair needs `psi`".into())
                })?)?,
                &schema,
            )?;
            let vp = eval(family, &db, &cs.union(&phi), kind);
            let vq = eval(family, &db, &cs.union(&psi), kind);
            if vp >= vq {
                return Err(fail(format!("{vp} >= {vq} satisfies Dominance")));
            }
            Ok(format!("stronger formula scored {vp} < {vq}"))
        }
        "almost-family" => {
            let lo = entry.min_n.unwrap_or(2);
            let hi = entry.max_n.unwrap_or(8);
            let mut values = Vec::new();
            for n in lo..=hi {
                let (d, c) = almost_family_instance(n);
                values.push(eval(family, &d, &c, kind));
            }
            let first = values.first().unwrap().clone();
            let last = values.last().unwrap().clone();
            if last < first && last <= MeasureValue::ratio(1, 4) {
                return Err(fail(format!(
                    "family values fall {first} -> {last}, consistent with vanishing"
                )));
            }
            Ok(format!(
                "growing MI sets scored {first} .. {last}, bounded away from zero"
            ))
        }
        other => Err(Error::Validation(format!("unknown check kind `{other}`"))),
    }
}

/// Measure of one MI set under the family's standalone reading.
fn mi_edge_value(
    family: Family,
    db: &Database,
    cs: &ConstraintSet,
    edge: &TupleSet,
    kind: MeasureKind,
) -> Result<MeasureValue, Error> {
    let h = conflict_hypergraph(db, cs);
    if !h.edge_set().contains(edge) {
        return Err(Error::Validation("edge is not a minimal inconsistent set".into()));
    }
    match family {
        Family::Db => Ok(eval(family, &db.restrict(edge), cs, kind)),
        Family::Prop => {
            let kb = transform(db, cs);
            let atoms: Vec<usize> = edge
                .iter()
                .map(|id| kb.atom_of(*id).expect("edge tuple has an atom"))
                .collect();
            let clause: crate::kb::Clause = atoms.iter().copied().collect();
            let mi = kb
                .mi()
                .into_iter()
                .find(|m| m.clause == clause)
                .ok_or_else(|| {
                    Error::Validation("edge does not correspond to a KB MI set".into())
                })?;
            let members: Vec<(bool, usize)> = mi
                .members()
                .into_iter()
                .map(|m| match m {
                    KbMember::Atom(a) => (false, a),
                    KbMember::Formula(f) => (true, f),
                })
                .collect();
            let bounds = OracleBounds {
                max_subset_tuples: 16,
                max_classical_atoms: 16,
                max_threevl_atoms: 12,
            };
            oracle_kb_subset_measure(kind, &kb, &members, &bounds)
        }
    }
}

// ---------------------------------------------------------------------------
// Harness entry points
// ---------------------------------------------------------------------------

/// Checks one cell: trials for expected-satisfied, stored counterexample
/// for expected-violated. Cells listed in [`ERRATA`] are checked in the
/// machine-verified direction and reported against the published value.
pub fn check_postulate(
    family: Family,
    kind: MeasureKind,
    postulate: PostulateId,
    cfg: &HarnessConfig,
    stats_cache: &mut BTreeMap<(Family, PostulateId), TrialStatsShared>,
) -> Result<CheckResult, Error> {
    let paper = paper_expected(family, postulate, kind);
    let effective = erratum(family, postulate, kind).or(paper).unwrap_or(true);
    let verdict = if family == Family::Db && postulate == PostulateId::Dominance {
        Verdict::SatisfiedByDefinition
    } else if effective {
        let stats = stats_cache
            .entry((family, postulate))
            .or_insert_with(|| TrialStatsShared::new(drive(family, postulate, cfg)));
        match stats.0.violations.get(&kind) {
            Some((trial, detail)) => Verdict::ViolatedOnTrials {
                trial: *trial,
                detail: detail.clone(),
            },
            None => Verdict::HeldOnTrials {
                trials: stats.0.antecedent_hits,
            },
        }
    } else {
        let bundles = load_store(&cfg.store_dir)?;
        match bundles
            .iter()
            .find(|b| b.matches(family, kind, postulate).is_some())
        {
            None => Verdict::CounterexampleMissing,
            Some(b) => match verify_counterexample(b, family, kind, postulate) {
                Ok(detail) => Verdict::CounterexampleVerified {
                    bundle: b.name.clone(),
                    detail,
                },
                Err(e) => Verdict::CounterexampleFailed {
                    bundle: b.name.clone(),
                    detail: e.to_string(),
                },
            },
        }
    };
    Ok(CheckResult {
        family,
        kind,
        postulate,
        paper_expected: paper,
        verdict,
    })
}

/// Shared trial statistics per (family, postulate) so the ten measures
/// reuse one trial run.
pub struct TrialStatsShared(TrialStats);

impl TrialStatsShared {
    fn new(stats: TrialStats) -> Self {
        TrialStatsShared(stats)
    }
}

/// Checks all ten table rows for one family.
pub fn check_family(family: Family, cfg: &HarnessConfig) -> Result<Vec<CheckResult>, Error> {
    let mut cache = BTreeMap::new();
    let mut out = Vec::new();
    for postulate in TABLE_ROWS {
        for kind in ALL_KINDS {
            out.push(check_postulate(family, kind, postulate, cfg, &mut cache)?);
        }
    }
    Ok(out)
}

/// Randomized search for a violating instance of one cell; used to
/// populate the counterexample store offline.
pub fn find_counterexample(
    family: Family,
    kind: MeasureKind,
    postulate: PostulateId,
    cfg: &HarnessConfig,
) -> Option<(u64, String)> {
    let stats = drive(family, postulate, cfg);
    stats.violations.get(&kind).cloned()
}

/// Renders both tables with verdicts and paper-agreement flags.
pub fn table_report(results: &[CheckResult]) -> String {
    let mut out = String::new();
    for family in [Family::Prop, Family::Db] {
        let title = match family {
            Family::Prop => "Propositional measures on databases",
            Family::Db => "Database measures",
        };
        let _ = writeln!(out, "## {title}\n");
        let mut header = String::from("| postulate |");
        for k in ALL_KINDS {
            let _ = write!(header, " {} |", k.name());
        }
        let _ = writeln!(out, "{header}");
        let _ = writeln!(out, "|{}", "---|".repeat(ALL_KINDS.len() + 1));
        for postulate in TABLE_ROWS {
            let mut row = format!("| {} |", postulate.name());
            for kind in ALL_KINDS {
                let cell = results
                    .iter()
                    .find(|r| r.family == family && r.kind == kind && r.postulate == postulate);
                let text = match cell {
                    None => "?".to_string(),
                    Some(r) => {
                        let mark = match r.verdict.establishes() {
                            Some(true) => "yes",
                            Some(false) => "no",
                            None => "!",
                        };
                        if r.reproduces_paper() {
                            mark.to_string()
                        } else {
                            format!("**{mark}≠paper**")
                        }
                    }
                };
                let _ = write!(row, " {text} |");
            }
            let _ = writeln!(out, "{row}");
        }
        let _ = writeln!(out);
    }
    let mismatches: Vec<&CheckResult> = results.iter().filter(|r| !r.reproduces_paper()).collect();
    if mismatches.is_empty() {
        let _ = writeln!(out, "All cells reproduce the published tables.");
    } else {
        let _ = writeln!(out, "Cells differing from the published tables:");
        for r in mismatches {
            let _ = writeln!(
                out,
                "- {}:{} / {}: published {}, verified: {}",
                r.family.prefix(),
                r.kind.name(),
                r.postulate.name(),
                r.paper_expected
                    .map(|b| if b { "satisfied" } else { "violated" })
                    .unwrap_or("-"),
                r.verdict.summary()
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_tables_have_complete_rows() {
        for postulate in TABLE_ROWS {
            for kind in ALL_KINDS {
                assert!(paper_expected(Family::Prop, postulate, kind).is_some());
                assert!(paper_expected(Family::Db, postulate, kind).is_some());
            }
        }
        assert_eq!(paper_expected(Family::Db, PostulateId::Monotony, MeasureKind::B), None);
    }

    #[test]
    fn almost_family_shapes() {
        for n in [2u32, 4, 8] {
            let (db, cs) = almost_family_instance(n);
            assert_eq!(db.len(), n as usize);
            let h = conflict_hypergraph(&db, &cs);
            assert_eq!(h.edges.len(), 1);
            assert_eq!(h.edges[0].len(), n as usize);
        }
    }

    #[test]
    fn dominance_patterns_parse() {
        let g = InstanceGen::with_seed(0);
        let schema = g.schema();
        assert_eq!(dominance_pairs(&schema).len(), 4);
    }

    #[test]
    fn find_counterexample_hits_a_known_violated_cell() {
        let cfg = HarnessConfig::new(120, 5);
        let hit = find_counterexample(
            Family::Db,
            MeasureKind::B,
            PostulateId::Penalty,
            &cfg,
        );
        assert!(hit.is_some(), "drastic measure Penalty should fall quickly");
    }
}
