//! Deterministic random profile generation for test corpora and the
//! command-line `gen` command.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::profile::{GroupId, GroupTable, ProfileState, StateError, Version, VersionId};

/// Shape of a randomly generated profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProfileConfig {
    pub versions: usize,
    /// Number of distinct groups to draw from; each version picks one
    /// uniformly, so some groups may end up empty or single-version.
    pub groups: usize,
    pub max_citations: u64,
    pub page_size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("at least one group is required when versions > 0")]
    NoGroups,
    #[error("page size must be at least 1")]
    ZeroPageSize,
    #[error("total citation count overflows the supported range")]
    Overflow,
}

/// Samples a profile with ids 1..=n, uniform group assignment, and
/// uniform citation counts in 0..=max. Deterministic under the seed.
pub fn random_profile(
    config: &ProfileConfig,
    seed: u64,
) -> Result<(ProfileState, GroupTable), GenError> {
    if config.page_size == 0 {
        return Err(GenError::ZeroPageSize);
    }
    if config.versions > 0 && config.groups == 0 {
        return Err(GenError::NoGroups);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut groups = GroupTable::new();
    for k in 1..=config.groups {
        groups.intern(&format!("g{k}"));
    }
    let versions = (1..=config.versions as u64)
        .map(|id| Version {
            id: VersionId(id),
            group: GroupId(rng.random_range(0..config.groups) as u32),
            citations: rng.random_range(0..=config.max_citations),
        })
        .collect();
    match ProfileState::new(config.page_size, versions) {
        Ok(state) => Ok((state, groups)),
        Err(StateError::CitationOverflow) => Err(GenError::Overflow),
        Err(e) => unreachable!("generated ids are sequential and positive: {e}"),
    }
}
