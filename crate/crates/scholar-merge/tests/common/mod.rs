//! Helpers shared by the integration test targets.
#![allow(dead_code)] // each test target uses a different subset

use proptest::prelude::*;
use scholar_merge::profile::{GroupId, MergePlan, ProfileState, Version, VersionId};
use scholar_merge::solver;

pub fn version(id: u64, group: u32, citations: u64) -> Version {
    Version {
        id: VersionId(id),
        group: GroupId(group),
        citations,
    }
}

pub fn state(page_size: usize, versions: Vec<Version>) -> ProfileState {
    ProfileState::new(page_size, versions).expect("valid state")
}

/// Memo-free exhaustive feasibility check, the solver's independent
/// oracle. Deliberately built from the core operations alone: it probes
/// every id pair with `mergeable` instead of using the solver's action
/// enumeration, and it remembers nothing between branches.
pub fn naive_feasible(state: &ProfileState) -> bool {
    if state.is_fully_merged() {
        return true;
    }
    let mut ids: Vec<VersionId> = state.versions().iter().map(|v| v.id).collect();
    ids.sort_unstable();
    for (i, &a) in ids.iter().enumerate() {
        for &b in &ids[i + 1..] {
            if state.mergeable(a, b).expect("ids exist") {
                let (next, _) = state.apply_merge(a, b).expect("mergeable pair");
                if naive_feasible(&next) {
                    return true;
                }
            }
        }
    }
    false
}

/// Strategy over small profiles: up to `max_versions` versions with ids
/// 1..=n, group labels below `max_groups`, and bounded citations.
pub fn arb_state(
    max_versions: usize,
    max_groups: u32,
    max_citations: u64,
    max_page: usize,
) -> impl Strategy<Value = ProfileState> {
    (
        1..=max_page,
        prop::collection::vec((0..max_groups, 0..=max_citations), 0..=max_versions),
    )
        .prop_map(|(page_size, rows)| {
            let versions = rows
                .into_iter()
                .enumerate()
                .map(|(i, (g, c))| version(i as u64 + 1, g, c))
                .collect();
            ProfileState::new(page_size, versions).expect("valid construction")
        })
}

/// Builds a legal plan by repeatedly picking one of the currently legal
/// actions; stops when the picks run out or nothing is legal.
pub fn walk_plan(start: &ProfileState, picks: &[prop::sample::Index]) -> MergePlan {
    let mut state = start.clone();
    let mut steps = Vec::new();
    for pick in picks {
        let actions = solver::legal_actions(&state);
        if actions.is_empty() {
            break;
        }
        let action = actions[pick.index(actions.len())];
        let (next, _) = state.apply_merge(action.a, action.b).expect("legal action");
        steps.push(action);
        state = next;
    }
    MergePlan::new(steps)
}

/// Structural identity of a state (ids included), used to memoize over
/// exactly-equal states without involving the canonical key under test.
pub fn structural_key(state: &ProfileState) -> Vec<(u64, u32, u64)> {
    state
        .versions()
        .iter()
        .map(|v| (v.id.0, v.group.0, v.citations))
        .collect()
}
