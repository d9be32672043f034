//! Exact feasibility search over merge orders.
//!
//! Depth-first search over the legal-merge graph, memoizing states proven
//! infeasible by their [`canonical key`](ProfileState::canonical_key).
//! The state graph has heavy transpositions (interchangeable equal-count
//! versions, independent merge orders), so the memo table does most of
//! the work on hard instances.
//!
//! The search is exact: `feasible == false` means no legal merge order
//! exists, never "gave up". Running out of budget is an error, not an
//! answer.

use std::collections::HashSet;

use thiserror::Error;

use crate::profile::{CanonicalKey, MergeAction, MergePlan, ProfileState};

/// Search budgets. `max_nodes` bounds expanded (non-terminal, non-memo)
/// states; `max_memo_entries`, when set, bounds peak memo size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    pub max_nodes: u64,
    pub max_memo_entries: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_nodes: 10_000_000,
            max_memo_entries: None,
        }
    }
}

/// Counters describing one completed solve run. Deterministic: equal
/// inputs produce equal stats.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub nodes_expanded: u64,
    pub memo_hits: u64,
    pub peak_memo_size: usize,
}

/// Outcome of a completed (non-budget-limited) solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub feasible: bool,
    /// A witness plan iff `feasible`; replaying it fully merges the state.
    pub plan: Option<MergePlan>,
    pub stats: SolveStats,
}

/// A configured budget ran out before the search finished. The question
/// is unanswered; callers must not treat this as "infeasible".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("search expanded {budget} nodes without finishing")]
    NodeBudget { budget: u64 },
    #[error("memo table exceeded {budget} entries")]
    MemoBudget { budget: usize },
}

/// All legal merges in `state`: unordered same-group pairs sharing a
/// page, each listed once as (higher-ranked, lower-ranked), sorted by
/// (rank of a, rank of b).
pub fn legal_actions(state: &ProfileState) -> Vec<MergeAction> {
    let mut actions = Vec::new();
    for page in state.versions().chunks(state.page_size()) {
        for (i, va) in page.iter().enumerate() {
            for vb in &page[i + 1..] {
                if va.group == vb.group {
                    actions.push(MergeAction::new(va.id, vb.id));
                }
            }
        }
    }
    actions
}

/// Decides whether `state` can be fully merged, with default budgets.
pub fn solve(state: &ProfileState) -> Result<SolveResult, SolverError> {
    solve_with(state, &SolverConfig::default())
}

/// Decides whether `state` can be fully merged. Exhaustive and
/// deterministic; returns the first witness found in search order.
pub fn solve_with(state: &ProfileState, config: &SolverConfig) -> Result<SolveResult, SolverError> {
    let mut search = Search {
        config,
        memo: HashSet::new(),
        stats: SolveStats::default(),
        plan: Vec::new(),
    };
    let feasible = search.dfs(state)?;
    Ok(SolveResult {
        feasible,
        plan: feasible.then(|| MergePlan::new(search.plan)),
        stats: search.stats,
    })
}

struct Search<'a> {
    config: &'a SolverConfig,
    /// Canonical keys of states proven infeasible.
    memo: HashSet<CanonicalKey>,
    stats: SolveStats,
    plan: Vec<MergeAction>,
}

impl Search<'_> {
    fn dfs(&mut self, state: &ProfileState) -> Result<bool, SolverError> {
        if state.is_fully_merged() {
            return Ok(true);
        }
        let key = state.canonical_key();
        if self.memo.contains(&key) {
            self.stats.memo_hits += 1;
            return Ok(false);
        }
        if self.stats.nodes_expanded >= self.config.max_nodes {
            return Err(SolverError::NodeBudget {
                budget: self.config.max_nodes,
            });
        }
        self.stats.nodes_expanded += 1;
        // Bottom pages first: low-citation versions are combined before
        // their sums promote them toward the front, which reaches
        // witnesses quickly on instances whose small versions must be
        // assembled late in the ranking. Order choice never affects the
        // decision, only how soon a witness is found.
        for &action in legal_actions(state).iter().rev() {
            let (next, _) = state
                .apply_merge(action.a, action.b)
                .expect("legal_actions returned an illegal pair");
            self.plan.push(action);
            if self.dfs(&next)? {
                return Ok(true);
            }
            self.plan.pop();
        }
        self.memo.insert(key);
        self.stats.peak_memo_size = self.stats.peak_memo_size.max(self.memo.len());
        if let Some(budget) = self.config.max_memo_entries {
            if self.memo.len() > budget {
                return Err(SolverError::MemoBudget { budget });
            }
        }
        Ok(false)
    }
}
