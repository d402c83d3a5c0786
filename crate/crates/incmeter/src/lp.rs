//! Exact rational linear programming: a small dense two-phase simplex
//! with Bland's rule, plus the probability-assignment programs behind
//! the eta measures.
//!
//! All arithmetic is over arbitrary precision rationals; optima and
//! witnesses are exact. This is deliberately a dense textbook simplex:
//! the programs here have at most a few hundred columns.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::kb::PropKb;
use crate::model::{Database, TupleSet};
use crate::rational::MeasureValue;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Le,
    Eq,
    Ge,
}

/// max objective . x subject to the constraints, x >= 0 componentwise.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub objective: Vec<BigRational>,
    pub constraints: Vec<(Vec<BigRational>, Rel, BigRational)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal {
        value: BigRational,
        witness: Vec<BigRational>,
    },
    Infeasible,
    Unbounded,
}

/// Solves `lp` exactly. Bland's pivoting rule guarantees termination.
pub fn simplex_max(lp: &LinearProgram) -> LpOutcome {
    let n = lp.objective.len();
    let m = lp.constraints.len();

    // Standard form with slack and artificial columns. Rows are
    // normalized to have a non-negative right-hand side first.
    let mut rows: Vec<(Vec<BigRational>, Rel, BigRational)> = Vec::with_capacity(m);
    for (coeffs, rel, rhs) in &lp.constraints {
        assert_eq!(coeffs.len(), n, "coefficient vector length mismatch");
        if rhs.is_negative() {
            let flipped = match rel {
                Rel::Le => Rel::Ge,
                Rel::Ge => Rel::Le,
                Rel::Eq => Rel::Eq,
            };
            rows.push((coeffs.iter().map(|c| -c).collect(), flipped, -rhs));
        } else {
            rows.push((coeffs.clone(), rel.clone(), rhs.clone()));
        }
    }

    let num_slack = rows
        .iter()
        .filter(|(_, rel, _)| matches!(rel, Rel::Le | Rel::Ge))
        .count();
    let num_art = rows
        .iter()
        .filter(|(_, rel, _)| matches!(rel, Rel::Eq | Rel::Ge))
        .count();
    let total = n + num_slack + num_art;

    let mut tableau: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    let mut art_cols: BTreeSet<usize> = BTreeSet::new();
    let mut slack_i = 0;
    let mut art_i = 0;
    for (coeffs, rel, rhs) in &rows {
        let mut row = vec![BigRational::zero(); total + 1];
        row[..n].clone_from_slice(coeffs);
        row[total] = rhs.clone();
        match rel {
            Rel::Le => {
                let col = n + slack_i;
                row[col] = BigRational::one();
                basis.push(col);
                slack_i += 1;
            }
            Rel::Ge => {
                let scol = n + slack_i;
                row[scol] = -BigRational::one();
                slack_i += 1;
                let acol = n + num_slack + art_i;
                row[acol] = BigRational::one();
                art_cols.insert(acol);
                basis.push(acol);
                art_i += 1;
            }
            Rel::Eq => {
                let acol = n + num_slack + art_i;
                row[acol] = BigRational::one();
                art_cols.insert(acol);
                basis.push(acol);
                art_i += 1;
            }
        }
        tableau.push(row);
    }

    // Phase 1: minimize the artificial sum.
    if num_art > 0 {
        let mut cost = vec![BigRational::zero(); total + 1];
        for &c in &art_cols {
            cost[c] = BigRational::one();
        }
        // Reduce cost over the artificial basis columns.
        for (r, &b) in basis.iter().enumerate() {
            if art_cols.contains(&b) {
                let factor = cost[b].clone();
                if !factor.is_zero() {
                    for j in 0..=total {
                        let delta = &factor * &tableau[r][j];
                        cost[j] -= delta;
                    }
                }
            }
        }
        run_simplex(&mut tableau, &mut cost, &mut basis, total);
        if !cost[total].is_zero() {
            return LpOutcome::Infeasible;
        }
        // Drive leftover artificial columns out of the basis.
        for r in 0..m {
            if art_cols.contains(&basis[r]) {
                let pivot_col = (0..n + num_slack)
                    .find(|&j| !art_cols.contains(&j) && !tableau[r][j].is_zero());
                if let Some(j) = pivot_col {
                    pivot(&mut tableau, &mut basis, r, j, total);
                }
                // A row with no eligible pivot is redundant; its basic
                // artificial stays at zero and never re-enters because
                // artificial columns are excluded from phase 2.
            }
        }
    }

    // Phase 2: maximize the real objective (minimize its negation).
    let mut cost = vec![BigRational::zero(); total + 1];
    for j in 0..n {
        cost[j] = -lp.objective[j].clone();
    }
    for (r, &b) in basis.iter().enumerate() {
        let factor = cost[b].clone();
        if !factor.is_zero() {
            for j in 0..=total {
                let delta = &factor * &tableau[r][j];
                cost[j] -= delta;
            }
        }
    }
    let allowed = |j: usize| !art_cols.contains(&j);
    if !run_simplex_filtered(&mut tableau, &mut cost, &mut basis, total, &allowed) {
        return LpOutcome::Unbounded;
    }

    let mut witness = vec![BigRational::zero(); n];
    for (r, &b) in basis.iter().enumerate() {
        if b < n {
            witness[b] = tableau[r][total].clone();
        }
    }
    LpOutcome::Optimal {
        value: -cost[total].clone(),
        witness,
    }
}

fn run_simplex(
    tableau: &mut Vec<Vec<BigRational>>,
    cost: &mut Vec<BigRational>,
    basis: &mut Vec<usize>,
    total: usize,
) -> bool {
    run_simplex_filtered(tableau, cost, basis, total, &|_| true)
}

/// Bland's rule: entering column is the lowest-index negative reduced
/// cost; leaving row is the ratio-test winner with the lowest basis
/// index. Returns false on unboundedness.
fn run_simplex_filtered(
    tableau: &mut Vec<Vec<BigRational>>,
    cost: &mut Vec<BigRational>,
    basis: &mut Vec<usize>,
    total: usize,
    allowed: &dyn Fn(usize) -> bool,
) -> bool {
    loop {
        let entering = (0..total).find(|&j| allowed(j) && cost[j].is_negative());
        let Some(e) = entering else {
            return true;
        };
        let mut leave: Option<(usize, BigRational)> = None;
        for r in 0..tableau.len() {
            if tableau[r][e].is_positive() {
                let ratio = &tableau[r][total] / &tableau[r][e];
                let better = match &leave {
                    None => true,
                    Some((lr, lratio)) => {
                        ratio < *lratio || (ratio == *lratio && basis[r] < basis[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            return false;
        };
        pivot(tableau, basis, r, e, total);
        let factor = cost[e].clone();
        if !factor.is_zero() {
            for j in 0..=total {
                let delta = &factor * &tableau[r][j];
                cost[j] -= delta;
            }
        }
    }
}

fn pivot(
    tableau: &mut Vec<Vec<BigRational>>,
    basis: &mut Vec<usize>,
    r: usize,
    c: usize,
    total: usize,
) {
    let p = tableau[r][c].clone();
    for j in 0..=total {
        tableau[r][j] = &tableau[r][j] / &p;
    }
    for i in 0..tableau.len() {
        if i != r && !tableau[i][c].is_zero() {
            let factor = tableau[i][c].clone();
            for j in 0..=total {
                let delta = &factor * &tableau[r][j];
                tableau[i][j] -= delta;
            }
        }
    }
    basis[r] = c;
}

/// Shared shape of both eta programs: columns are admissible
/// probability-mass carriers, rows are items that must each reach
/// probability eta. Returns the maximum eta in [0, 1] plus the witness
/// distribution over columns.
pub fn max_uniform_bound(
    num_rows: usize,
    columns: &[BTreeSet<usize>],
) -> (BigRational, Vec<BigRational>) {
    if num_rows == 0 {
        return (BigRational::one(), vec![]);
    }
    if columns.is_empty() {
        // No admissible carrier at all: only eta = 0 is attainable.
        return (BigRational::zero(), vec![]);
    }
    // Variables: x_0..x_{k-1} (column masses), then eta.
    let k = columns.len();
    let mut constraints = Vec::new();
    // Sum of masses is one.
    let mut total = vec![BigRational::zero(); k + 1];
    for slot in total.iter_mut().take(k) {
        *slot = BigRational::one();
    }
    constraints.push((total, Rel::Eq, BigRational::one()));
    // Each row's coverage exceeds eta.
    for row in 0..num_rows {
        let mut coeffs = vec![BigRational::zero(); k + 1];
        for (j, col) in columns.iter().enumerate() {
            if col.contains(&row) {
                coeffs[j] = BigRational::one();
            }
        }
        coeffs[k] = -BigRational::one();
        constraints.push((coeffs, Rel::Ge, BigRational::zero()));
    }
    // eta <= 1.
    let mut cap = vec![BigRational::zero(); k + 1];
    cap[k] = BigRational::one();
    constraints.push((cap, Rel::Le, BigRational::one()));
    let mut objective = vec![BigRational::zero(); k + 1];
    objective[k] = BigRational::one();
    match simplex_max(&LinearProgram {
        objective,
        constraints,
    }) {
        LpOutcome::Optimal { value, mut witness } => {
            witness.truncate(k);
            (value, witness)
        }
        // The program always has the feasible point x = any column mass
        // one, eta = 0, and eta is capped, so neither branch occurs.
        LpOutcome::Infeasible | LpOutcome::Unbounded => unreachable!("eta program is bounded and feasible"),
    }
}

/// Truth patterns of all classical interpretations over the KB's atoms,
/// restricted to the members of the KB (atoms then formulas), with
/// duplicate patterns merged. Row i < atom count is atom i; row
/// atom_count + j is formula j.
fn kb_truth_patterns(kb: &PropKb) -> Vec<BTreeSet<usize>> {
    let n = kb.atom_count();
    let mut patterns: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    for mask in 0u64..(1u64 << n) {
        let mut rows = BTreeSet::new();
        for a in 0..n {
            if mask & (1 << a) != 0 {
                rows.insert(a);
            }
        }
        for (fi, f) in kb.formulas.iter().enumerate() {
            let satisfied = f
                .clauses
                .iter()
                .all(|clause| clause.iter().any(|a| mask & (1 << a) == 0));
            if satisfied {
                rows.insert(n + fi);
            }
        }
        patterns.insert(rows);
    }
    patterns.into_iter().collect()
}

/// The eta inconsistency measure of a propositional KB: one minus the
/// best uniform probability bound over all members.
pub fn eta_prop(kb: &PropKb) -> MeasureValue {
    let rows = kb.member_count();
    if rows == 0 {
        return MeasureValue::zero();
    }
    let columns = kb_truth_patterns(kb);
    let (eta, _) = max_uniform_bound(rows, &columns);
    MeasureValue::Finite(BigRational::one() - eta)
}

/// The database eta measure. Constraint formulas carry probability one,
/// which confines mass to interpretations whose true tuple set is
/// consistent; maximal consistent subsets dominate coverage, so they are
/// the only columns needed.
pub fn eta_db(db: &Database, mcs: &[TupleSet]) -> (MeasureValue, Vec<(TupleSet, BigRational)>) {
    let ids: Vec<_> = db.tuple_ids().collect();
    if ids.is_empty() {
        return (MeasureValue::zero(), vec![]);
    }
    let row_of = |id: &crate::model::TupleId| ids.iter().position(|x| x == id).unwrap();
    let columns: Vec<BTreeSet<usize>> = mcs
        .iter()
        .map(|s| s.iter().map(|id| row_of(id)).collect())
        .collect();
    let (eta, witness) = max_uniform_bound(ids.len(), &columns);
    let distribution = mcs
        .iter()
        .cloned()
        .zip(witness)
        .filter(|(_, w)| !w.is_zero())
        .collect();
    (MeasureValue::Finite(BigRational::one() - eta), distribution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn rr(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn contradictory_pair_splits_mass() {
        // max eta s.t. x >= eta, 1 - x >= eta: the columns are the two
        // interpretations of a single atom appearing positively and
        // negatively.
        let columns = vec![
            [0usize].into_iter().collect::<BTreeSet<_>>(),
            [1usize].into_iter().collect(),
        ];
        let (eta, w) = max_uniform_bound(2, &columns);
        assert_eq!(eta, rr(1, 2));
        assert_eq!(w.iter().sum::<BigRational>(), r(1));
    }

    #[test]
    fn trivial_cap() {
        // max eta s.t. eta <= 1 with a column covering the only row.
        let columns = vec![[0usize].into_iter().collect::<BTreeSet<_>>()];
        let (eta, _) = max_uniform_bound(1, &columns);
        assert_eq!(eta, r(1));
    }

    #[test]
    fn infeasible_and_unbounded_are_distinguished() {
        // x1 + x2 <= 1 and x1 + x2 >= 2 cannot both hold.
        let lp = LinearProgram {
            objective: vec![r(1), r(0)],
            constraints: vec![
                (vec![r(1), r(1)], Rel::Le, r(1)),
                (vec![r(1), r(1)], Rel::Ge, r(2)),
            ],
        };
        assert_eq!(simplex_max(&lp), LpOutcome::Infeasible);
        let lp = LinearProgram {
            objective: vec![r(1)],
            constraints: vec![(vec![r(-1)], Rel::Le, r(0))],
        };
        assert_eq!(simplex_max(&lp), LpOutcome::Unbounded);
    }

    /// Enumerates vertices of {Ax rel b, x >= 0} by brute force over
    /// active-constraint choices on a coarse grid; LP optima over random
    /// small boxes are cross-checked on a rational grid instead, which
    /// is exact for these tiny dimensions.
    #[test]
    fn random_small_lps_match_grid_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let n = rng.gen_range(1..=2usize);
            let m = rng.gen_range(1..=3usize);
            let objective: Vec<BigRational> =
                (0..n).map(|_| r(rng.gen_range(-3..=3))).collect();
            let mut constraints: Vec<(Vec<BigRational>, Rel, BigRational)> = (0..m)
                .map(|_| {
                    let coeffs: Vec<BigRational> =
                        (0..n).map(|_| r(rng.gen_range(0..=3))).collect();
                    (coeffs, Rel::Le, r(rng.gen_range(0..=6)))
                })
                .collect();
            // Keep the region bounded.
            for j in 0..n {
                let mut cap = vec![r(0); n];
                cap[j] = r(1);
                constraints.push((cap, Rel::Le, r(4)));
            }
            let lp = LinearProgram {
                objective: objective.clone(),
                constraints: constraints.clone(),
            };
            let LpOutcome::Optimal { value, witness } = simplex_max(&lp) else {
                panic!("bounded LP must be solvable");
            };
            // The witness satisfies every constraint exactly.
            for (coeffs, _, rhs) in &constraints {
                let lhs: BigRational = coeffs
                    .iter()
                    .zip(&witness)
                    .map(|(c, x)| c * x)
                    .sum();
                assert!(lhs <= *rhs);
            }
            // Grid search on quarter-steps dominates nothing better than
            // the simplex optimum (vertices of these integer systems lie
            // on the quarter grid only sometimes, so check <=).
            let steps: Vec<BigRational> = (0..=16).map(|k| rr(k, 4)).collect();
            let mut best: Option<BigRational> = None;
            let mut point = vec![r(0); n];
            grid_search(
                &steps,
                &mut point,
                0,
                &constraints,
                &objective,
                &mut best,
            );
            if let Some(b) = best {
                assert!(value >= b, "simplex {value} below grid {b}");
            }
        }
    }

    fn grid_search(
        steps: &[BigRational],
        point: &mut Vec<BigRational>,
        idx: usize,
        constraints: &[(Vec<BigRational>, Rel, BigRational)],
        objective: &[BigRational],
        best: &mut Option<BigRational>,
    ) {
        if idx == point.len() {
            for (coeffs, _, rhs) in constraints {
                let lhs: BigRational = coeffs.iter().zip(point.iter()).map(|(c, x)| c * x).sum();
                if lhs > *rhs {
                    return;
                }
            }
            let val: BigRational = objective.iter().zip(point.iter()).map(|(c, x)| c * x).sum();
            if best.as_ref().map_or(true, |b| val > *b) {
                *best = Some(val);
            }
            return;
        }
        for s in steps {
            point[idx] = s.clone();
            grid_search(steps, point, idx + 1, constraints, objective, best);
        }
        point[idx] = r(0);
    }
}
