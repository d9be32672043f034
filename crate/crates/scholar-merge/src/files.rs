//! On-disk formats: profile instances, merge plans, 3-partition
//! instances and solutions, and the reduction metadata sidecar.
//!
//! Everything is strict JSON with one entry per line for the bulky
//! arrays. Unknown fields are rejected — a silently ignored typo in a
//! generated corpus is worse than a loud parse error.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::profile::{
    GroupTable, MergeAction, MergePlan, ProfileState, StateError, TieOrder, Version, VersionId,
};
use crate::reduction::ReducedInstance;
use crate::tpart::{TpInstance, TpSolution};

/// A profile instance: page size plus the version list. Ids are
/// optional, but all-or-none: omitted ids are assigned 1..n in file
/// order, and mixing explicit with implicit ids is rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub page_size: usize,
    pub versions: Vec<VersionEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VersionEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<u64>,
    pub group: String,
    pub citations: u64,
}

/// A merge plan: ordered `[a, b]` id pairs. Syntax only — legality is a
/// replay-time question.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanFile {
    pub steps: Vec<[u64; 2]>,
}

/// A 3-partition instance: the per-triple target and the 3m values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TpInstanceFile {
    pub b: u64,
    pub values: Vec<u64>,
}

/// A 3-partition solution: triples of 0-based indices into the values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TpSolutionFile {
    pub triples: Vec<[usize; 3]>,
}

/// Reduction metadata sidecar: which version id plays which role.
/// Written next to a compiled instance so the solution translators can
/// run in a later invocation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetaFile {
    pub m: usize,
    pub b2: u64,
    pub d: u64,
    pub x_ids: Vec<u64>,
    pub y_ids: Vec<u64>,
    pub z_ids: Vec<u64>,
    pub single_ids: Vec<u64>,
}

#[derive(Debug, Error)]
pub enum FileError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("either every version must carry an id or none may")]
    MixedIds,
    #[error("invalid instance: {0}")]
    State(#[from] StateError),
    #[error("invalid metadata sidecar: {0}")]
    BadMeta(String),
}

// ---------------------------------------------------------------------
// Conversions between file values and domain values.

/// Builds a profile from a parsed instance file, interning group names
/// in file order.
pub fn instance_to_state(
    file: &InstanceFile,
    tie: TieOrder,
) -> Result<(ProfileState, GroupTable), FileError> {
    let with_ids = file.versions.iter().filter(|v| v.id.is_some()).count();
    if with_ids != 0 && with_ids != file.versions.len() {
        return Err(FileError::MixedIds);
    }
    let mut groups = GroupTable::new();
    let versions = file
        .versions
        .iter()
        .enumerate()
        .map(|(i, entry)| Version {
            id: VersionId(entry.id.unwrap_or(i as u64 + 1)),
            group: groups.intern(&entry.group),
            citations: entry.citations,
        })
        .collect();
    let state = ProfileState::with_tie_order(file.page_size, versions, tie)?;
    Ok((state, groups))
}

/// Renders a profile back to a file value, versions in display order,
/// ids always explicit.
pub fn state_to_instance(state: &ProfileState, groups: &GroupTable) -> InstanceFile {
    InstanceFile {
        page_size: state.page_size(),
        versions: state
            .versions()
            .iter()
            .map(|v| VersionEntry {
                id: Some(v.id.0),
                group: groups.name(v.group).to_string(),
                citations: v.citations,
            })
            .collect(),
    }
}

pub fn plan_to_merge_plan(file: &PlanFile) -> MergePlan {
    MergePlan::new(
        file.steps
            .iter()
            .map(|&[a, b]| MergeAction::new(VersionId(a), VersionId(b)))
            .collect(),
    )
}

pub fn merge_plan_to_file(plan: &MergePlan) -> PlanFile {
    PlanFile {
        steps: plan.steps.iter().map(|s| [s.a.0, s.b.0]).collect(),
    }
}

pub fn tp_instance_from_file(file: &TpInstanceFile) -> TpInstance {
    TpInstance::new(file.values.clone(), file.b)
}

pub fn tp_instance_to_file(tp: &TpInstance) -> TpInstanceFile {
    TpInstanceFile {
        b: tp.b,
        values: tp.values.clone(),
    }
}

pub fn tp_solution_from_file(file: &TpSolutionFile) -> TpSolution {
    TpSolution {
        triples: file.triples.clone(),
    }
}

pub fn tp_solution_to_file(sol: &TpSolution) -> TpSolutionFile {
    TpSolutionFile {
        triples: sol.triples.clone(),
    }
}

pub fn meta_from_reduced(red: &ReducedInstance) -> MetaFile {
    let ids = |v: &[VersionId]| v.iter().map(|id| id.0).collect();
    MetaFile {
        m: red.m,
        b2: red.b2,
        d: red.d,
        x_ids: ids(&red.x_ids),
        y_ids: ids(&red.y_ids),
        z_ids: ids(&red.z_ids),
        single_ids: ids(&red.single_ids),
    }
}

/// Rebuilds a [`ReducedInstance`] from an independently loaded state and
/// its metadata sidecar, cross-checking that the roles make sense.
pub fn reduced_from_parts(
    state: ProfileState,
    groups: GroupTable,
    meta: &MetaFile,
) -> Result<ReducedInstance, FileError> {
    let bad = |msg: String| FileError::BadMeta(msg);
    if meta.m == 0 {
        return Err(bad("m must be at least 1".into()));
    }
    if meta.x_ids.len() != 3 * meta.m {
        return Err(bad(format!(
            "expected {} X ids, found {}",
            3 * meta.m,
            meta.x_ids.len()
        )));
    }
    if meta.y_ids.len() != meta.m || meta.z_ids.len() != meta.m {
        return Err(bad(format!(
            "expected {} Y and Z ids, found {} and {}",
            meta.m,
            meta.y_ids.len(),
            meta.z_ids.len()
        )));
    }
    let all: Vec<u64> = meta
        .x_ids
        .iter()
        .chain(&meta.y_ids)
        .chain(&meta.z_ids)
        .chain(&meta.single_ids)
        .copied()
        .collect();
    if all.len() != state.len() {
        return Err(bad(format!(
            "metadata names {} versions, instance has {}",
            all.len(),
            state.len()
        )));
    }
    let mut paper = None;
    for &raw in &all {
        let version = state
            .get(VersionId(raw))
            .ok_or_else(|| bad(format!("id {raw} does not exist in the instance")))?;
        if meta.x_ids.contains(&raw) {
            if version.citations % 2 != 0 {
                return Err(bad(format!("X version {raw} has odd citations")));
            }
            match paper {
                None => paper = Some(version.group),
                Some(p) if p == version.group => {}
                Some(_) => return Err(bad("X versions span multiple groups".into())),
            }
        }
    }
    let mut sorted = all;
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(bad("metadata repeats a version id".into()));
    }
    Ok(ReducedInstance {
        paper: paper.expect("m ≥ 1 implies at least one X version"),
        m: meta.m,
        b2: meta.b2,
        d: meta.d,
        x_ids: meta.x_ids.iter().map(|&id| VersionId(id)).collect(),
        y_ids: meta.y_ids.iter().map(|&id| VersionId(id)).collect(),
        z_ids: meta.z_ids.iter().map(|&id| VersionId(id)).collect(),
        single_ids: meta.single_ids.iter().map(|&id| VersionId(id)).collect(),
        state,
        groups,
    })
}

// ---------------------------------------------------------------------
// Text emission. Parsing is plain serde_json; emission keeps one array
// element per line so instances diff cleanly.

pub fn emit_instance(file: &InstanceFile) -> String {
    let versions = emit_array(&file.versions);
    format!(
        "{{\n  \"page_size\": {},\n  \"versions\": {versions}\n}}\n",
        file.page_size
    )
}

pub fn emit_plan(file: &PlanFile) -> String {
    format!("{{\n  \"steps\": {}\n}}\n", emit_array(&file.steps))
}

pub fn emit_tp_instance(file: &TpInstanceFile) -> String {
    let values = serde_json::to_string(&file.values).expect("serializable");
    format!("{{\n  \"b\": {},\n  \"values\": {values}\n}}\n", file.b)
}

pub fn emit_tp_solution(file: &TpSolutionFile) -> String {
    format!("{{\n  \"triples\": {}\n}}\n", emit_array(&file.triples))
}

pub fn emit_meta(file: &MetaFile) -> String {
    let mut out = serde_json::to_string_pretty(file).expect("serializable");
    out.push('\n');
    out
}

/// One element per line, indented to sit inside a top-level object.
fn emit_array<T: Serialize>(items: &[T]) -> String {
    if items.is_empty() {
        return "[]".to_string();
    }
    let lines: Vec<String> = items
        .iter()
        .map(|item| format!("    {}", serde_json::to_string(item).expect("serializable")))
        .collect();
    format!("[\n{}\n  ]", lines.join(",\n"))
}

// ---------------------------------------------------------------------
// Path-level helpers.

pub fn read_text(path: &Path) -> Result<String, FileError> {
    fs::read_to_string(path).map_err(|source| FileError::Read {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), FileError> {
    fs::write(path, text).map_err(|source| FileError::Write {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_instance(path: &Path) -> Result<InstanceFile, FileError> {
    Ok(serde_json::from_str(&read_text(path)?)?)
}

pub fn load_plan(path: &Path) -> Result<PlanFile, FileError> {
    Ok(serde_json::from_str(&read_text(path)?)?)
}

pub fn load_tp_instance(path: &Path) -> Result<TpInstanceFile, FileError> {
    Ok(serde_json::from_str(&read_text(path)?)?)
}

pub fn load_tp_solution(path: &Path) -> Result<TpSolutionFile, FileError> {
    Ok(serde_json::from_str(&read_text(path)?)?)
}

pub fn load_meta(path: &Path) -> Result<MetaFile, FileError> {
    Ok(serde_json::from_str(&read_text(path)?)?)
}
