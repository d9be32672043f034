//! Deterministic model of a publication profile: a set of paper versions
//! displayed in citation-sorted order on fixed-size pages.
//!
//! Two versions can be merged only when they belong to the same group
//! (they are versions of the same underlying paper) and currently appear
//! on the same page. Merging replaces them with a fresh version whose
//! citation count is the sum of the two. Because every merge re-sorts the
//! list, the order in which merges are attempted matters.
//!
//! All operations are pure: [`ProfileState`] is an immutable value and
//! [`ProfileState::apply_merge`] returns a new state.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Identifier of one displayed version. Unique within a state; merge
/// results are minted with a fresh id larger than every id seen so far.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VersionId(pub u64);

impl fmt::Display for VersionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Identifier of a paper group (an index into a [`GroupTable`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupId(pub u32);

/// One displayed entry: a version of some paper.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Version {
    pub id: VersionId,
    pub group: GroupId,
    pub citations: u64,
}

/// Maps [`GroupId`]s to human-readable group names. Kept outside
/// [`ProfileState`] so that states stay cheap to clone during search.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroupTable {
    names: Vec<String>,
    index: HashMap<String, GroupId>,
}

impl GroupTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id for `name`, creating it if needed.
    pub fn intern(&mut self, name: &str) -> GroupId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = GroupId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    pub fn name(&self, id: GroupId) -> &str {
        &self.names[id.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// Tie rule among versions with equal citation counts. The display order
/// is always citations descending; this picks the order within a tie.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum TieOrder {
    /// Smaller id first. A freshly merged version (largest id) sorts after
    /// every pre-existing version with the same count.
    #[default]
    IdAscending,
    /// Larger id first; the mirror convention.
    IdDescending,
}

/// Error constructing a [`ProfileState`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateError {
    #[error("page size must be at least 1")]
    ZeroPageSize,
    #[error("version ids must be positive")]
    ZeroVersionId,
    #[error("duplicate version id {0}")]
    DuplicateId(VersionId),
    #[error("total citation count overflows u64")]
    CitationOverflow,
}

/// Error from a single merge attempt.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MergeError {
    #[error("unknown version id {0}")]
    UnknownVersion(VersionId),
    #[error("cannot merge version {0} with itself")]
    SelfMerge(VersionId),
    #[error("versions {a} and {b} belong to different groups")]
    CrossGroupMerge { a: VersionId, b: VersionId },
    #[error(
        "versions {a} (rank {rank_a}, page {page_a}) and {b} (rank {rank_b}, page {page_b}) \
         are not on the same page"
    )]
    PageViolation {
        a: VersionId,
        b: VersionId,
        rank_a: usize,
        rank_b: usize,
        page_a: usize,
        page_b: usize,
    },
}

/// First illegal step while replaying a plan. `index` is zero-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {index}: {cause}")]
pub struct StepError {
    pub index: usize,
    pub cause: MergeError,
}

/// A single pairwise merge of two version ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MergeAction {
    pub a: VersionId,
    pub b: VersionId,
}

impl MergeAction {
    pub fn new(a: VersionId, b: VersionId) -> Self {
        Self { a, b }
    }
}

/// An ordered sequence of merges; the certificate that a profile can be
/// fully merged. Legality is state-dependent and checked by
/// [`ProfileState::apply_plan`], not intrinsic to the plan.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MergePlan {
    pub steps: Vec<MergeAction>,
}

impl MergePlan {
    pub fn new(steps: Vec<MergeAction>) -> Self {
        Self { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Returns the 1-based page number showing the given 1-based rank.
///
/// Panics if `rank` or `page_size` is zero; both are 1-based quantities.
pub fn page_of(rank: usize, page_size: usize) -> usize {
    assert!(rank >= 1, "rank is 1-based");
    assert!(page_size >= 1, "page size must be at least 1");
    (rank - 1) / page_size + 1
}

/// The full display order of a state: all version ids sorted by citations
/// descending with the state's tie rule. Ranks are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedView {
    page_size: usize,
    order: Vec<VersionId>,
}

impl RankedView {
    /// Ids in display order, best-cited first.
    pub fn order(&self) -> &[VersionId] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// 1-based rank of `id`, or None if absent.
    pub fn rank_of(&self, id: VersionId) -> Option<usize> {
        self.order.iter().position(|&v| v == id).map(|p| p + 1)
    }

    /// 1-based page on which `id` appears.
    pub fn page_of_id(&self, id: VersionId) -> Option<usize> {
        self.rank_of(id).map(|r| page_of(r, self.page_size))
    }

    /// Display pages, in order. The last page may be short.
    pub fn pages(&self) -> impl Iterator<Item = &[VersionId]> {
        self.order.chunks(self.page_size)
    }
}

/// Group classification used by [`CanonicalKey`]: one-version groups are
/// interchangeable inert markers; multi-version groups keep distinct
/// identities (numbered by first appearance in display order).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupClass {
    Single,
    Multi(u32),
}

/// Memoization key for search: the display-ordered sequence of
/// (citations, group class) pairs. Version ids are deliberately absent;
/// two states with equal keys evolve identically up to renaming, so they
/// have the same feasibility.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalKey(Vec<(u64, GroupClass)>);

impl CanonicalKey {
    pub fn entries(&self) -> &[(u64, GroupClass)] {
        &self.0
    }
}

/// Immutable snapshot of a profile: versions, page size, and the next
/// fresh id. Internally the version list is kept in display order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileState {
    page_size: usize,
    tie: TieOrder,
    next_id: VersionId,
    versions: Vec<Version>,
}

impl ProfileState {
    /// Builds a state from an arbitrary-order version list.
    ///
    /// Rejects a zero page size, non-positive or duplicate ids, and
    /// version sets whose total citation count overflows `u64` (the total
    /// is invariant under merges, so this rules out overflow forever).
    pub fn new(page_size: usize, versions: Vec<Version>) -> Result<Self, StateError> {
        Self::with_tie_order(page_size, versions, TieOrder::default())
    }

    pub fn with_tie_order(
        page_size: usize,
        mut versions: Vec<Version>,
        tie: TieOrder,
    ) -> Result<Self, StateError> {
        if page_size == 0 {
            return Err(StateError::ZeroPageSize);
        }
        let mut total: u64 = 0;
        for v in &versions {
            if v.id.0 == 0 {
                return Err(StateError::ZeroVersionId);
            }
            total = total
                .checked_add(v.citations)
                .ok_or(StateError::CitationOverflow)?;
        }
        let mut ids: Vec<VersionId> = versions.iter().map(|v| v.id).collect();
        ids.sort_unstable();
        if let Some(dup) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(StateError::DuplicateId(dup[0]));
        }
        let next_id = VersionId(ids.last().map_or(1, |last| last.0 + 1));
        versions.sort_by(|a, b| display_cmp(a, b, tie));
        Ok(Self {
            page_size,
            tie,
            next_id,
            versions,
        })
    }

    pub fn page_size(&self) -> usize {
        self.page_size
    }

    pub fn tie_order(&self) -> TieOrder {
        self.tie
    }

    /// The id the next merge result will receive.
    pub fn next_id(&self) -> VersionId {
        self.next_id
    }

    /// Versions in display order (citations descending, ties by id).
    pub fn versions(&self) -> &[Version] {
        &self.versions
    }

    pub fn len(&self) -> usize {
        self.versions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.versions.is_empty()
    }

    pub fn get(&self, id: VersionId) -> Option<&Version> {
        self.versions.iter().find(|v| v.id == id)
    }

    /// Sum of all citation counts; invariant under merges.
    pub fn total_citations(&self) -> u64 {
        self.versions.iter().map(|v| v.citations).sum()
    }

    /// The full display order. Pure and deterministic: equal states yield
    /// identical orders, including tie handling.
    pub fn rank_all(&self) -> RankedView {
        RankedView {
            page_size: self.page_size,
            order: self.versions.iter().map(|v| v.id).collect(),
        }
    }

    fn position_of(&self, id: VersionId) -> Result<usize, MergeError> {
        self.versions
            .iter()
            .position(|v| v.id == id)
            .ok_or(MergeError::UnknownVersion(id))
    }

    /// True iff `a` and `b` are distinct, belong to the same group, and
    /// currently appear on the same page. Errors only when an id is absent.
    pub fn mergeable(&self, a: VersionId, b: VersionId) -> Result<bool, MergeError> {
        let pos_a = self.position_of(a)?;
        let pos_b = self.position_of(b)?;
        if a == b {
            return Ok(false);
        }
        if self.versions[pos_a].group != self.versions[pos_b].group {
            return Ok(false);
        }
        Ok(page_of(pos_a + 1, self.page_size) == page_of(pos_b + 1, self.page_size))
    }

    /// Merges `a` and `b`: both are removed and replaced by a fresh version
    /// with their summed citations and the shared group. Returns the new
    /// state and the minted id.
    pub fn apply_merge(
        &self,
        a: VersionId,
        b: VersionId,
    ) -> Result<(ProfileState, VersionId), MergeError> {
        let pos_a = self.position_of(a)?;
        let pos_b = self.position_of(b)?;
        if a == b {
            return Err(MergeError::SelfMerge(a));
        }
        let va = self.versions[pos_a];
        let vb = self.versions[pos_b];
        if va.group != vb.group {
            return Err(MergeError::CrossGroupMerge { a, b });
        }
        let (rank_a, rank_b) = (pos_a + 1, pos_b + 1);
        let (page_a, page_b) = (
            page_of(rank_a, self.page_size),
            page_of(rank_b, self.page_size),
        );
        if page_a != page_b {
            return Err(MergeError::PageViolation {
                a,
                b,
                rank_a,
                rank_b,
                page_a,
                page_b,
            });
        }

        let merged = Version {
            id: self.next_id,
            group: va.group,
            // Total citations fit in u64 by construction, so no overflow.
            citations: va.citations + vb.citations,
        };
        let mut versions = Vec::with_capacity(self.versions.len() - 1);
        versions.extend(
            self.versions
                .iter()
                .filter(|v| v.id != a && v.id != b)
                .copied(),
        );
        let tie = self.tie;
        let at = versions.partition_point(|v| display_cmp(v, &merged, tie).is_lt());
        versions.insert(at, merged);
        let state = ProfileState {
            page_size: self.page_size,
            tie,
            next_id: VersionId(self.next_id.0 + 1),
            versions,
        };
        Ok((state, merged.id))
    }

    /// Replays `plan` step by step. On success returns the trace (initial
    /// state plus one state per step); on the first illegal step returns
    /// its zero-based index and cause.
    pub fn apply_plan(&self, plan: &MergePlan) -> Result<Trace, StepError> {
        let mut states = Vec::with_capacity(plan.steps.len() + 1);
        let mut minted = Vec::with_capacity(plan.steps.len());
        states.push(self.clone());
        for (index, step) in plan.steps.iter().enumerate() {
            let current = states.last().expect("trace starts non-empty");
            match current.apply_merge(step.a, step.b) {
                Ok((next, id)) => {
                    states.push(next);
                    minted.push(id);
                }
                Err(cause) => return Err(StepError { index, cause }),
            }
        }
        Ok(Trace { states, minted })
    }

    /// True iff every group present has exactly one version. The empty
    /// state is fully merged.
    pub fn is_fully_merged(&self) -> bool {
        let mut counts: HashMap<GroupId, u32> = HashMap::new();
        for v in &self.versions {
            let n = counts.entry(v.group).or_insert(0);
            *n += 1;
            if *n > 1 {
                return false;
            }
        }
        true
    }

    /// Memoization key; see [`CanonicalKey`].
    pub fn canonical_key(&self) -> CanonicalKey {
        let mut counts: HashMap<GroupId, u32> = HashMap::new();
        for v in &self.versions {
            *counts.entry(v.group).or_insert(0) += 1;
        }
        let mut numbering: HashMap<GroupId, u32> = HashMap::new();
        let mut entries = Vec::with_capacity(self.versions.len());
        for v in &self.versions {
            let class = if counts[&v.group] == 1 {
                GroupClass::Single
            } else {
                let next = numbering.len() as u32;
                GroupClass::Multi(*numbering.entry(v.group).or_insert(next))
            };
            entries.push((v.citations, class));
        }
        CanonicalKey(entries)
    }
}

/// Replay record: `states[0]` is the initial state and `states[i + 1]`
/// the state after step `i`; `minted[i]` is the id created by step `i`.
#[derive(Debug, Clone)]
pub struct Trace {
    states: Vec<ProfileState>,
    minted: Vec<VersionId>,
}

impl Trace {
    pub fn states(&self) -> &[ProfileState] {
        &self.states
    }

    pub fn minted(&self) -> &[VersionId] {
        &self.minted
    }

    pub fn initial(&self) -> &ProfileState {
        &self.states[0]
    }

    pub fn final_state(&self) -> &ProfileState {
        self.states.last().expect("trace starts non-empty")
    }

    /// Number of replayed steps.
    pub fn len(&self) -> usize {
        self.states.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.states.len() == 1
    }
}

fn display_cmp(a: &Version, b: &Version, tie: TieOrder) -> std::cmp::Ordering {
    b.citations.cmp(&a.citations).then_with(|| match tie {
        TieOrder::IdAscending => a.id.cmp(&b.id),
        TieOrder::IdDescending => b.id.cmp(&a.id),
    })
}
