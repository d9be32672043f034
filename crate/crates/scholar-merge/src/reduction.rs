//! Compiling 3-partition instances into merge instances, and translating
//! solutions across that bridge in both directions.
//!
//! Given 3m values summing to m·B, the compiled profile has one paper
//! `P` with 5m versions and a scaffold of inert one-version papers that
//! pin the page boundaries:
//!
//! * values and B are doubled (B2 = 2B) so every `P` version has an even
//!   citation count while every single has an odd one — no accidental
//!   ties across the divide;
//! * type X versions carry the doubled values, type Y_i carries
//!   D − B2 + 2i and type Z_i carries D + 2i, with D = 3·m·B2;
//! * blocks of equal-citation singles (3m at D+2m+1, then 3m−1 at
//!   D+2i−1 per i, then 5m at B2−1) are wide enough that versions on
//!   opposite sides of a block can never share a page of size 3m.
//!
//! A 3-partition solution lifts to a merge plan ([`lift_3p`]) and any
//! witness plan collapses back to a solution ([`extract_3p`]), so the
//! merge instance is feasible exactly when the source instance is
//! solvable.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::profile::{
    GroupId, GroupTable, MergeAction, MergePlan, ProfileState, StateError, StepError, Version,
    VersionId,
};
use crate::tpart::{self, SolutionError, TpError, TpInstance, TpSolution};

/// A compiled merge instance plus the role bookkeeping needed to
/// translate solutions in either direction.
#[derive(Debug, Clone)]
pub struct ReducedInstance {
    pub state: ProfileState,
    pub groups: GroupTable,
    /// The one multi-version group.
    pub paper: GroupId,
    pub m: usize,
    /// Doubled per-triple target (2B).
    pub b2: u64,
    /// Citation offset separating the scaffold from the X versions: 3·m·b2.
    pub d: u64,
    /// Value index j (0-based) → the X version carrying 2·a_j citations.
    pub x_ids: Vec<VersionId>,
    /// i (0-based, for i+1 ∈ 1..=m) → the Y version at d − b2 + 2(i+1).
    pub y_ids: Vec<VersionId>,
    /// i (0-based) → the Z version at d + 2(i+1).
    pub z_ids: Vec<VersionId>,
    /// All one-version papers, in id order.
    pub single_ids: Vec<VersionId>,
}

impl ReducedInstance {
    /// Reconstructs the source instance from the X versions' citation
    /// counts (halving undoes the doubling).
    pub fn source_instance(&self) -> TpInstance {
        let values = self
            .x_ids
            .iter()
            .map(|&id| {
                self.state
                    .get(id)
                    .expect("x ids resolve in the reduced state")
                    .citations
                    / 2
            })
            .collect();
        TpInstance::new(values, self.b2 / 2)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("invalid 3-partition instance: {0}")]
    InvalidThreePartition(#[from] TpError),
    #[error("invalid 3-partition solution: {0}")]
    InvalidSolution(#[from] SolutionError),
    #[error("citation counts would overflow the supported range")]
    Overflow,
    #[error("plan rejected during replay: {0}")]
    PlanRejected(#[from] StepError),
    #[error("plan replays but does not fully merge the paper's versions")]
    NotFullyMerged,
    #[error("merge structure does not decompose into target-summing triples: {0}")]
    StructureViolation(String),
}

/// Compiles a valid 3-partition instance into a merge instance.
///
/// Ids are assigned deterministically: X versions by ascending value
/// index, then Y by ascending i, then Z by ascending i, then the single
/// blocks from the highest citation family down.
pub fn reduce_3p(tp: &TpInstance) -> Result<ReducedInstance, ReductionError> {
    tp.validate()?;
    let m = tp.m();
    let m64 = m as u64;
    let b2 = tp.b.checked_mul(2).ok_or(ReductionError::Overflow)?;
    let d = (3 * m64)
        .checked_mul(b2)
        .ok_or(ReductionError::Overflow)?;
    // The largest citation count in the instance; if it fits, every
    // individual count does.
    d.checked_add(2 * m64 + 1).ok_or(ReductionError::Overflow)?;

    let mut groups = GroupTable::new();
    let paper = groups.intern("P");
    let mut versions: Vec<Version> = Vec::with_capacity(3 * m * (m + 4));
    let mut next_id = 1u64;
    let mut push = |versions: &mut Vec<Version>, group: GroupId, citations: u64| -> VersionId {
        let id = VersionId(next_id);
        next_id += 1;
        versions.push(Version {
            id,
            group,
            citations,
        });
        id
    };

    // Values are < b, so doubling cannot overflow u64.
    let x_ids: Vec<VersionId> = tp
        .values
        .iter()
        .map(|&a| push(&mut versions, paper, 2 * a))
        .collect();
    let y_ids: Vec<VersionId> = (1..=m64)
        .map(|i| push(&mut versions, paper, d - b2 + 2 * i))
        .collect();
    let z_ids: Vec<VersionId> = (1..=m64)
        .map(|i| push(&mut versions, paper, d + 2 * i))
        .collect();

    let mut single_ids = Vec::new();
    let mut single_no = 0u64;
    let mut push_single = |versions: &mut Vec<Version>,
                           groups: &mut GroupTable,
                           single_ids: &mut Vec<VersionId>,
                           citations: u64| {
        single_no += 1;
        let group = groups.intern(&format!("s{single_no}"));
        single_ids.push(push(versions, group, citations));
    };
    // Top block: 3m singles above every Z version.
    for _ in 0..3 * m {
        push_single(&mut versions, &mut groups, &mut single_ids, d + 2 * m64 + 1);
    }
    // Per-i blocks separating Z_i from Z_{i-1}, highest family first.
    for i in (1..=m64).rev() {
        for _ in 0..3 * m - 1 {
            push_single(&mut versions, &mut groups, &mut single_ids, d + 2 * i - 1);
        }
    }
    // Bottom block: 5m singles fencing the X versions onto the last page.
    for _ in 0..5 * m {
        push_single(&mut versions, &mut groups, &mut single_ids, b2 - 1);
    }

    let state = match ProfileState::new(3 * m, versions) {
        Ok(state) => state,
        Err(StateError::CitationOverflow) => return Err(ReductionError::Overflow),
        Err(e) => unreachable!("construction assigns clean sequential ids: {e}"),
    };
    Ok(ReducedInstance {
        state,
        groups,
        paper,
        m,
        b2,
        d,
        x_ids,
        y_ids,
        z_ids,
        single_ids,
    })
}

/// Translates a 3-partition solution into a witness merge plan of
/// exactly 5m − 1 steps.
///
/// The plan works in four phases, each legal by the block geometry:
///
/// 1. combine every triple's X versions pairwise on the last page
///    (intermediate sums stay below the B2−1 fence; each completed
///    triple reaches exactly B2 and floats just above it);
/// 2. merge the i-th completed triple with Y_i, ascending i — at that
///    moment both sit directly below the lowest block, on one page;
/// 3. merge each result (now worth exactly D+2i, ranked right behind
///    Z_i) with Z_i, ascending i — the sum outranks every block, so the
///    result leaves for page 1;
/// 4. fold the m page-1 components together, ascending.
///
/// Triple t in the given solution is paired with Y_{t+1}/Z_{t+1}; any
/// assignment works because all triples sum to the same target.
pub fn lift_3p(red: &ReducedInstance, sol: &TpSolution) -> Result<MergePlan, ReductionError> {
    tpart::check_solution(&red.source_instance(), sol)?;
    let m = red.m as u64;
    // Merge results take ids n0+1, n0+2, … in plan order, which lets the
    // later phases name earlier results without replaying anything.
    let n0 = red.state.next_id().0 - 1;
    let mut steps = Vec::with_capacity(5 * red.m - 1);
    for (t, triple) in sol.triples.iter().enumerate() {
        let mut idx = *triple;
        idx.sort_unstable();
        steps.push(MergeAction::new(red.x_ids[idx[0]], red.x_ids[idx[1]]));
        let pair = VersionId(n0 + 2 * t as u64 + 1);
        steps.push(MergeAction::new(pair, red.x_ids[idx[2]]));
    }
    for t in 0..m {
        let triple_version = VersionId(n0 + 2 * t + 2);
        steps.push(MergeAction::new(triple_version, red.y_ids[t as usize]));
    }
    for t in 0..m {
        let with_y = VersionId(n0 + 2 * m + t + 1);
        steps.push(MergeAction::new(with_y, red.z_ids[t as usize]));
    }
    let mut acc = VersionId(n0 + 3 * m + 1);
    for t in 1..m {
        steps.push(MergeAction::new(acc, VersionId(n0 + 3 * m + t + 1)));
        acc = VersionId(n0 + 4 * m + t);
    }
    Ok(MergePlan::new(steps))
}

/// Recovers a 3-partition solution from any witness plan.
///
/// Replays the plan while tracking which original X versions each merged
/// component contains. Every step that absorbs one of the original Z
/// versions closes out a component; the X value indices inside it at
/// that moment must form a triple summing to the target, and those
/// triples are the answer.
pub fn extract_3p(red: &ReducedInstance, plan: &MergePlan) -> Result<TpSolution, ReductionError> {
    let source = red.source_instance();
    let x_index: HashMap<VersionId, usize> = red
        .x_ids
        .iter()
        .enumerate()
        .map(|(j, &id)| (id, j))
        .collect();
    let z_set: HashSet<VersionId> = red.z_ids.iter().copied().collect();

    let mut components: HashMap<VersionId, Vec<usize>> = HashMap::new();
    let mut state = red.state.clone();
    let mut triples: Vec<[usize; 3]> = Vec::new();
    for (index, step) in plan.steps.iter().enumerate() {
        let (next, minted) = state
            .apply_merge(step.a, step.b)
            .map_err(|cause| StepError { index, cause })?;
        let mut xs = Vec::new();
        let mut z_operands = 0;
        for operand in [step.a, step.b] {
            if let Some(&j) = x_index.get(&operand) {
                xs.push(j);
            }
            if let Some(inherited) = components.remove(&operand) {
                xs.extend(inherited);
            }
            if z_set.contains(&operand) {
                z_operands += 1;
            }
        }
        if z_operands > 0 {
            if z_operands > 1 {
                return Err(ReductionError::StructureViolation(format!(
                    "step {index} merges two type-Z versions directly"
                )));
            }
            if xs.len() != 3 {
                return Err(ReductionError::StructureViolation(format!(
                    "step {index} absorbs a type-Z version into a component holding {} X \
                     versions instead of 3",
                    xs.len()
                )));
            }
            let mut triple = [xs[0], xs[1], xs[2]];
            triple.sort_unstable();
            let sum: u64 = triple.iter().map(|&j| source.values[j]).sum();
            if sum != source.b {
                return Err(ReductionError::StructureViolation(format!(
                    "step {index} closes a component whose values sum to {sum}, expected {}",
                    source.b
                )));
            }
            triples.push(triple);
        }
        if !xs.is_empty() {
            components.insert(minted, xs);
        }
        state = next;
    }
    if !state.is_fully_merged() {
        return Err(ReductionError::NotFullyMerged);
    }
    triples.sort_unstable();
    let solution = TpSolution { triples };
    // Count, disjointness, and coverage of the emitted triples.
    tpart::check_solution(&source, &solution)
        .map_err(|e| ReductionError::StructureViolation(e.to_string()))?;
    Ok(solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver;
    use crate::tpart::{brute_force, gen_random, gen_solvable};

    fn canonical() -> TpInstance {
        TpInstance::new(vec![4, 4, 4], 12)
    }

    fn citations_by_rank(state: &ProfileState) -> Vec<u64> {
        state.versions().iter().map(|v| v.citations).collect()
    }

    #[test]
    fn reduce_canonical_instance_layout() {
        let red = reduce_3p(&canonical()).unwrap();
        assert_eq!(red.m, 1);
        assert_eq!(red.b2, 24);
        assert_eq!(red.d, 72);
        assert_eq!(red.state.page_size(), 3);
        assert_eq!(red.state.len(), 15);
        assert_eq!(red.state.next_id(), VersionId(16));

        // Role versions, by construction order.
        let cit = |id: VersionId| red.state.get(id).unwrap().citations;
        assert_eq!(red.x_ids, vec![VersionId(1), VersionId(2), VersionId(3)]);
        assert!(red.x_ids.iter().all(|&id| cit(id) == 8));
        assert_eq!(red.y_ids, vec![VersionId(4)]);
        assert_eq!(cit(VersionId(4)), 50);
        assert_eq!(red.z_ids, vec![VersionId(5)]);
        assert_eq!(cit(VersionId(5)), 74);
        assert_eq!(red.single_ids.len(), 10);

        // Display order: the whole citation ladder.
        assert_eq!(
            citations_by_rank(&red.state),
            vec![75, 75, 75, 74, 73, 73, 50, 23, 23, 23, 23, 23, 8, 8, 8]
        );
        assert!(!red.state.is_fully_merged());
    }

    #[test]
    fn reduce_parity_split() {
        for (m, b, seed) in [(1, 12, 1), (2, 20, 3), (2, 24, 9), (3, 16, 5)] {
            let tp = gen_solvable(m, b, seed).unwrap();
            let red = reduce_3p(&tp).unwrap();
            for v in red.state.versions() {
                if v.group == red.paper {
                    assert_eq!(v.citations % 2, 0, "paper versions are even");
                } else {
                    assert_eq!(v.citations % 2, 1, "singles are odd");
                }
            }
        }
    }

    #[test]
    fn reduce_counts_and_blocks() {
        let tp = gen_solvable(2, 20, 11).unwrap();
        let red = reduce_3p(&tp).unwrap();
        let m = red.m;
        assert_eq!(red.state.len(), 5 * m + m * (3 * m - 1) + 3 * m + 5 * m);
        assert_eq!(red.state.page_size(), 3 * m);
        // Blocks: maximal equal-citation single families of width ≥ 3m−1.
        let mut family_sizes: HashMap<u64, usize> = HashMap::new();
        for v in red.state.versions() {
            if v.group != red.paper {
                *family_sizes.entry(v.citations).or_insert(0) += 1;
            }
        }
        let blocks = family_sizes
            .values()
            .filter(|&&size| size >= 3 * m - 1)
            .count();
        assert_eq!(blocks, m + 2);
        // Largest citation count in the instance.
        let max = red.state.versions()[0].citations;
        assert_eq!(max, red.d + 2 * m as u64 + 1);
    }

    #[test]
    fn reduce_rejects_invalid_source() {
        let bad = TpInstance::new(vec![3, 4, 5], 12);
        assert!(matches!(
            reduce_3p(&bad),
            Err(ReductionError::InvalidThreePartition(_))
        ));
    }

    #[test]
    fn lift_canonical_plan_and_replay() {
        let red = reduce_3p(&canonical()).unwrap();
        let sol = brute_force(&canonical()).unwrap().unwrap();
        let plan = lift_3p(&red, &sol).unwrap();
        assert_eq!(
            plan.steps,
            vec![
                MergeAction::new(VersionId(1), VersionId(2)),
                MergeAction::new(VersionId(16), VersionId(3)),
                MergeAction::new(VersionId(17), VersionId(4)),
                MergeAction::new(VersionId(18), VersionId(5)),
            ]
        );
        let trace = red.state.apply_plan(&plan).unwrap();
        assert!(trace.final_state().is_fully_merged());
        // Paper P collapses to one version carrying the whole budget.
        let paper_version = trace
            .final_state()
            .versions()
            .iter()
            .find(|v| v.group == red.paper)
            .unwrap();
        assert_eq!(paper_version.citations, 148);

        // Midway check: after the completed X triple the third page reads
        // [50, 24, 23].
        let mid = &trace.states()[2];
        let pages: Vec<Vec<u64>> = mid
            .rank_all()
            .pages()
            .map(|page| {
                page.iter()
                    .map(|&id| mid.get(id).unwrap().citations)
                    .collect()
            })
            .collect();
        assert_eq!(pages[0], vec![75, 75, 75]);
        assert_eq!(pages[1], vec![74, 73, 73]);
        assert_eq!(pages[2], vec![50, 24, 23]);
    }

    #[test]
    fn lift_two_triple_instance_replays() {
        let tp = TpInstance::new(vec![6, 6, 6, 8, 7, 7], 20);
        let red = reduce_3p(&tp).unwrap();
        let sol = brute_force(&tp).unwrap().unwrap();
        let plan = lift_3p(&red, &sol).unwrap();
        assert_eq!(plan.len(), 5 * 2 - 1);
        let trace = red.state.apply_plan(&plan).unwrap();
        assert!(trace.final_state().is_fully_merged());
    }

    #[test]
    fn lift_generated_instances_replay() {
        for seed in 1..=10 {
            for m in 1..=2 {
                let tp = gen_solvable(m, 20, seed).unwrap();
                let red = reduce_3p(&tp).unwrap();
                let sol = brute_force(&tp).unwrap().unwrap();
                let plan = lift_3p(&red, &sol).unwrap();
                assert_eq!(plan.len(), 5 * m - 1);
                let trace = red.state.apply_plan(&plan).unwrap();
                assert!(trace.final_state().is_fully_merged());
            }
        }
    }

    #[test]
    fn lift_rejects_wrong_sums() {
        let tp = TpInstance::new(vec![6, 6, 6, 8, 7, 7], 20);
        let red = reduce_3p(&tp).unwrap();
        let bad = TpSolution {
            triples: vec![[0, 1, 2], [3, 4, 5]],
        };
        assert!(matches!(
            lift_3p(&red, &bad),
            Err(ReductionError::InvalidSolution(
                SolutionError::BadTripleSum { .. }
            ))
        ));
    }

    #[test]
    fn extract_recovers_the_lifted_solution() {
        let red = reduce_3p(&canonical()).unwrap();
        let sol = brute_force(&canonical()).unwrap().unwrap();
        let plan = lift_3p(&red, &sol).unwrap();
        let recovered = extract_3p(&red, &plan).unwrap();
        assert_eq!(recovered.triples, vec![[0, 1, 2]]);
    }

    #[test]
    fn extract_round_trips_generated_instances() {
        for seed in 1..=10 {
            for (m, b) in [(1, 12), (2, 20), (2, 24)] {
                let tp = gen_solvable(m, b, seed).unwrap();
                let red = reduce_3p(&tp).unwrap();
                let sol = brute_force(&tp).unwrap().unwrap();
                let plan = lift_3p(&red, &sol).unwrap();
                let recovered = extract_3p(&red, &plan).unwrap();
                assert_eq!(tpart::check_solution(&tp, &recovered), Ok(()));
            }
        }
    }

    #[test]
    fn extract_works_on_solver_witnesses() {
        let red = reduce_3p(&canonical()).unwrap();
        let result = solver::solve(&red.state).unwrap();
        assert!(result.feasible);
        let recovered = extract_3p(&red, &result.plan.unwrap()).unwrap();
        assert_eq!(
            tpart::check_solution(&canonical(), &recovered),
            Ok(())
        );
    }

    #[test]
    fn extract_flags_incomplete_plans() {
        let red = reduce_3p(&canonical()).unwrap();
        let sol = brute_force(&canonical()).unwrap().unwrap();
        let mut plan = lift_3p(&red, &sol).unwrap();
        plan.steps.pop();
        assert_eq!(
            extract_3p(&red, &plan),
            Err(ReductionError::NotFullyMerged)
        );
    }

    #[test]
    fn extract_flags_illegal_plans() {
        let red = reduce_3p(&canonical()).unwrap();
        // X with Y directly: ranks 13 and 7 sit on different pages.
        let plan = MergePlan::new(vec![MergeAction::new(VersionId(1), VersionId(4))]);
        assert!(matches!(
            extract_3p(&red, &plan),
            Err(ReductionError::PlanRejected(_))
        ));
    }

    #[test]
    fn extract_flags_structurally_wrong_metadata() {
        // Mislabel an X version as Z: the first merge then "absorbs Z"
        // into a component with only one other X member.
        let mut red = reduce_3p(&canonical()).unwrap();
        let sol = brute_force(&canonical()).unwrap().unwrap();
        let plan = lift_3p(&red, &sol).unwrap();
        red.z_ids = vec![red.x_ids[1]];
        assert!(matches!(
            extract_3p(&red, &plan),
            Err(ReductionError::StructureViolation(_))
        ));
    }

    #[test]
    fn solver_agrees_with_oracle_on_both_directions() {
        let solvable = TpInstance::new(vec![6, 6, 6, 8, 7, 7], 20);
        let unsolvable = TpInstance::new(vec![6, 6, 6, 6, 7, 9], 20);
        assert!(brute_force(&solvable).unwrap().is_some());
        assert!(brute_force(&unsolvable).unwrap().is_none());
        assert!(solver::solve(&reduce_3p(&solvable).unwrap().state)
            .unwrap()
            .feasible);
        assert!(!solver::solve(&reduce_3p(&unsolvable).unwrap().state)
            .unwrap()
            .feasible);
    }

    #[test]
    fn random_instances_stay_in_polynomial_citation_range() {
        for seed in 1..=5 {
            let tp = gen_random(2, 20, seed).unwrap();
            let red = reduce_3p(&tp).unwrap();
            let max = red.state.versions()[0].citations;
            assert_eq!(max, 3 * 2 * red.b2 + 2 * 2 + 1);
        }
    }
}
