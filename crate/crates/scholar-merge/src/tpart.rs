//! The 3-partition source problem: validation, an exhaustive oracle, and
//! deterministic instance generators.
//!
//! An instance is a multiset of 3m positive integers, each strictly
//! between B/4 and B/2, that sum to m·B. A solution partitions the
//! indices into m triples whose values each sum to B. The strict bounds
//! force every B-summing subset to contain exactly three elements, which
//! downstream consumers rely on.
//!
//! [`brute_force`] is intentionally naive backtracking: it is the
//! independent ground truth the rest of the crate is measured against,
//! so it must stay simple enough to trust by inspection.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Rejection budget for [`gen_random`]'s conditioned sampling.
const REJECTION_LIMIT: u32 = 100_000;

/// A 3-partition instance: 3m values and the per-triple target `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TpInstance {
    pub values: Vec<u64>,
    pub b: u64,
}

impl TpInstance {
    pub fn new(values: Vec<u64>, b: u64) -> Self {
        Self { values, b }
    }

    /// Number of triples a solution must have.
    pub fn m(&self) -> usize {
        self.values.len() / 3
    }

    /// Checks the instance shape: 3m values (m ≥ 1), every value strictly
    /// between b/4 and b/2, and a total of m·b. Reports the first
    /// violation in that order.
    pub fn validate(&self) -> Result<(), TpError> {
        if self.values.is_empty() || self.values.len() % 3 != 0 {
            return Err(TpError::BadLength(self.values.len()));
        }
        let b = self.b as u128;
        for (index, &value) in self.values.iter().enumerate() {
            // Strict bounds without division: b/4 < v < b/2.
            let v = value as u128;
            if 4 * v <= b || 2 * v >= b {
                return Err(TpError::OutOfRange {
                    index,
                    value,
                    b: self.b,
                });
            }
        }
        let sum: u128 = self.values.iter().map(|&v| v as u128).sum();
        let expected = self.m() as u128 * b;
        if sum != expected {
            return Err(TpError::BadSum { sum, expected });
        }
        Ok(())
    }
}

/// A partition of the instance's indices (0-based) into triples. Each
/// triple's values must sum to the instance's `b`; [`check_solution`]
/// verifies that.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TpSolution {
    pub triples: Vec<[usize; 3]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TpError {
    #[error("expected a positive multiple of 3 values, got {0}")]
    BadLength(usize),
    #[error("value {value} at index {index} is not strictly between {b}/4 and {b}/2")]
    OutOfRange { index: usize, value: u64, b: u64 },
    #[error("values sum to {sum}, expected m·B = {expected}")]
    BadSum { sum: u128, expected: u128 },
    #[error("no multiset of 3 integers strictly between {b}/4 and {b}/2 sums to {b} (m = {m})")]
    Unsatisfiable { m: usize, b: u64 },
}

/// Why a proposed solution is not a valid partition into B-triples.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolutionError {
    #[error("expected {expected} triples, found {found}")]
    WrongTripleCount { expected: usize, found: usize },
    #[error("index {0} is out of range")]
    IndexOutOfRange(usize),
    #[error("index {0} is used more than once")]
    DuplicateIndex(usize),
    #[error("triple {index} sums to {sum}, expected {b}")]
    BadTripleSum { index: usize, sum: u64, b: u64 },
}

/// Verifies that `solution` partitions all indices of `instance` into
/// m triples each summing to b. Independent of how the solution was
/// produced; order of triples and of indices within a triple is free.
pub fn check_solution(instance: &TpInstance, solution: &TpSolution) -> Result<(), SolutionError> {
    let n = instance.values.len();
    if solution.triples.len() != instance.m() {
        return Err(SolutionError::WrongTripleCount {
            expected: instance.m(),
            found: solution.triples.len(),
        });
    }
    let mut used = vec![false; n];
    for (index, triple) in solution.triples.iter().enumerate() {
        let mut sum: u64 = 0;
        for &j in triple {
            if j >= n {
                return Err(SolutionError::IndexOutOfRange(j));
            }
            if used[j] {
                return Err(SolutionError::DuplicateIndex(j));
            }
            used[j] = true;
            // Values are < b/2 each, so a triple sum cannot overflow u64
            // for any b; saturate defensively anyway.
            sum = sum.saturating_add(instance.values[j]);
        }
        if sum != instance.b {
            return Err(SolutionError::BadTripleSum {
                index,
                sum,
                b: instance.b,
            });
        }
    }
    // m triples of 3 distinct in-range indices cover everything.
    Ok(())
}

/// Exhaustive backtracking solver. Returns the lexicographically first
/// solution (triples anchored on the lowest unassigned index, partners
/// tried in ascending index order) or None if no partition exists.
pub fn brute_force(instance: &TpInstance) -> Result<Option<TpSolution>, TpError> {
    instance.validate()?;
    let mut used = vec![false; instance.values.len()];
    let mut triples = Vec::with_capacity(instance.m());
    if search(&instance.values, instance.b, &mut used, &mut triples) {
        Ok(Some(TpSolution { triples }))
    } else {
        Ok(None)
    }
}

fn search(values: &[u64], b: u64, used: &mut [bool], triples: &mut Vec<[usize; 3]>) -> bool {
    let first = match used.iter().position(|&u| !u) {
        Some(i) => i,
        None => return true,
    };
    used[first] = true;
    for j in first + 1..values.len() {
        // Values are each < b/2, so this sum cannot overflow.
        let pair = values[first] + values[j];
        if used[j] || pair >= b {
            continue;
        }
        let rest = b - pair;
        for k in j + 1..values.len() {
            if used[k] || values[k] != rest {
                continue;
            }
            used[j] = true;
            used[k] = true;
            triples.push([first, j, k]);
            if search(values, b, used, triples) {
                return true;
            }
            triples.pop();
            used[j] = false;
            used[k] = false;
        }
    }
    used[first] = false;
    false
}

/// The integers strictly between b/4 and b/2, as an inclusive range,
/// plus the feasibility check that some triple from it can sum to b.
fn value_interval(m: usize, b: u64) -> Result<(u64, u64), TpError> {
    if m == 0 {
        return Err(TpError::BadLength(0));
    }
    let lo = b / 4 + 1;
    let hi = b.saturating_sub(1) / 2;
    // A triple exists iff the interval is non-empty and b lies between
    // the smallest and largest possible triple sums.
    if lo > hi || 3 * (lo as u128) > b as u128 || 3 * (hi as u128) < b as u128 {
        return Err(TpError::Unsatisfiable { m, b });
    }
    Ok((lo, hi))
}

/// Generates a solvable-by-construction instance: m independent triples
/// with in-range entries summing to b, concatenated and shuffled.
/// Deterministic under (m, b, seed).
pub fn gen_solvable(m: usize, b: u64, seed: u64) -> Result<TpInstance, TpError> {
    let (lo, hi) = value_interval(m, b)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(3 * m);
    for _ in 0..m {
        // Pick x, then y, from the exact sub-intervals that keep the
        // remaining entries completable; no rejection needed.
        let x_lo = lo.max(b.saturating_sub(2 * hi));
        let x_hi = hi.min(b - 2 * lo);
        let x = rng.random_range(x_lo..=x_hi);
        let y_lo = lo.max(b.saturating_sub(x + hi));
        let y_hi = hi.min(b - x - lo);
        let y = rng.random_range(y_lo..=y_hi);
        values.push(x);
        values.push(y);
        values.push(b - x - y);
    }
    values.shuffle(&mut rng);
    Ok(TpInstance { values, b })
}

/// Generates a validate-passing instance that may or may not be
/// solvable: 3m independent in-range values, rejection-sampled until the
/// total hits m·b. Deterministic under (m, b, seed); gives up with
/// [`TpError::Unsatisfiable`] after a bounded number of rejections.
pub fn gen_random(m: usize, b: u64, seed: u64) -> Result<TpInstance, TpError> {
    let (lo, hi) = value_interval(m, b)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = m as u128 * b as u128;
    for _ in 0..REJECTION_LIMIT {
        let values: Vec<u64> = (0..3 * m).map(|_| rng.random_range(lo..=hi)).collect();
        if values.iter().map(|&v| v as u128).sum::<u128>() == target {
            return Ok(TpInstance { values, b });
        }
    }
    Err(TpError::Unsatisfiable { m, b })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(values: &[u64], b: u64) -> TpInstance {
        TpInstance::new(values.to_vec(), b)
    }

    #[test]
    fn validate_accepts_canonical_instance() {
        assert_eq!(inst(&[4, 4, 4], 12).validate(), Ok(()));
    }

    #[test]
    fn validate_reports_first_violation() {
        assert_eq!(inst(&[], 12).validate(), Err(TpError::BadLength(0)));
        assert_eq!(inst(&[4, 4], 12).validate(), Err(TpError::BadLength(2)));
        // 3 is not strictly above 12/4.
        assert_eq!(
            inst(&[3, 4, 5], 12).validate(),
            Err(TpError::OutOfRange {
                index: 0,
                value: 3,
                b: 12
            })
        );
        // 6 is not strictly below 12/2.
        assert_eq!(
            inst(&[4, 6, 4], 12).validate(),
            Err(TpError::OutOfRange {
                index: 1,
                value: 6,
                b: 12
            })
        );
        assert_eq!(
            inst(&[4, 4, 5], 12).validate(),
            Err(TpError::BadSum {
                sum: 13,
                expected: 12
            })
        );
    }

    #[test]
    fn brute_force_unique_triple() {
        let sol = brute_force(&inst(&[4, 4, 4], 12)).unwrap().unwrap();
        assert_eq!(sol.triples, vec![[0, 1, 2]]);
    }

    #[test]
    fn brute_force_finds_lexicographically_first_solution() {
        let instance = inst(&[6, 6, 6, 8, 7, 7], 20);
        let sol = brute_force(&instance).unwrap().unwrap();
        assert_eq!(sol.triples, vec![[0, 1, 3], [2, 4, 5]]);
        assert_eq!(check_solution(&instance, &sol), Ok(()));
    }

    #[test]
    fn brute_force_detects_unsolvable_instance() {
        // 9 can only pair with values ≥ 5 to reach 20; none exist.
        assert_eq!(brute_force(&inst(&[6, 6, 6, 6, 7, 9], 20)).unwrap(), None);
    }

    #[test]
    fn brute_force_rejects_invalid_instance() {
        assert!(brute_force(&inst(&[3, 4, 5], 12)).is_err());
    }

    #[test]
    fn solvability_is_permutation_invariant() {
        let solvable = [6u64, 6, 6, 8, 7, 7];
        let unsolvable = [6u64, 6, 6, 6, 7, 9];
        let mut s = solvable;
        let mut u = unsolvable;
        // A fixed rotation sweep stands in for arbitrary permutations;
        // the property test covers random ones.
        for _ in 0..s.len() {
            s.rotate_left(1);
            u.rotate_left(1);
            assert!(brute_force(&inst(&s, 20)).unwrap().is_some());
            assert!(brute_force(&inst(&u, 20)).unwrap().is_none());
        }
    }

    #[test]
    fn check_solution_rejects_structural_defects() {
        let instance = inst(&[6, 6, 6, 8, 7, 7], 20);
        let short = TpSolution {
            triples: vec![[0, 1, 3]],
        };
        assert_eq!(
            check_solution(&instance, &short),
            Err(SolutionError::WrongTripleCount {
                expected: 2,
                found: 1
            })
        );
        let out_of_range = TpSolution {
            triples: vec![[0, 1, 3], [2, 4, 6]],
        };
        assert_eq!(
            check_solution(&instance, &out_of_range),
            Err(SolutionError::IndexOutOfRange(6))
        );
        let duplicated = TpSolution {
            triples: vec![[0, 1, 3], [1, 4, 5]],
        };
        assert_eq!(
            check_solution(&instance, &duplicated),
            Err(SolutionError::DuplicateIndex(1))
        );
        // Wrong grouping: sums 18 and 22.
        let bad_sums = TpSolution {
            triples: vec![[0, 1, 2], [3, 4, 5]],
        };
        assert_eq!(
            check_solution(&instance, &bad_sums),
            Err(SolutionError::BadTripleSum {
                index: 0,
                sum: 18,
                b: 20
            })
        );
    }

    #[test]
    fn gen_solvable_forced_instance() {
        // Only (4,4,4) has in-range entries summing to 12.
        for seed in 0..20 {
            let tp = gen_solvable(1, 12, seed).unwrap();
            assert_eq!(tp.values, vec![4, 4, 4]);
        }
    }

    #[test]
    fn gen_solvable_unsatisfiable_interval() {
        // (2,4) holds only 3, and 3+3+3 ≠ 8.
        assert_eq!(
            gen_solvable(1, 8, 0),
            Err(TpError::Unsatisfiable { m: 1, b: 8 })
        );
        assert_eq!(
            gen_random(1, 8, 0),
            Err(TpError::Unsatisfiable { m: 1, b: 8 })
        );
        assert_eq!(gen_solvable(0, 12, 0), Err(TpError::BadLength(0)));
    }

    #[test]
    fn gen_solvable_output_is_solvable() {
        for seed in 1..=100 {
            for (m, b) in [(1, 12), (1, 20), (2, 20), (2, 24)] {
                let tp = gen_solvable(m, b, seed).unwrap();
                assert_eq!(tp.validate(), Ok(()));
                assert!(
                    brute_force(&tp).unwrap().is_some(),
                    "seed {seed} m {m} b {b}: {:?}",
                    tp.values
                );
            }
        }
    }

    #[test]
    fn gen_random_forced_instance() {
        let tp = gen_random(1, 12, 7).unwrap();
        assert_eq!(tp.values, vec![4, 4, 4]);
    }

    #[test]
    fn gen_random_output_validates_and_mixes_classes() {
        let mut solvable = 0;
        let mut unsolvable = 0;
        for seed in 1..=50 {
            let tp = gen_random(2, 20, seed).unwrap();
            assert_eq!(tp.validate(), Ok(()));
            match brute_force(&tp).unwrap() {
                Some(_) => solvable += 1,
                None => unsolvable += 1,
            }
        }
        assert!(solvable > 0, "expected some solvable draws");
        assert!(unsolvable > 0, "expected some unsolvable draws");
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(gen_solvable(2, 20, 42), gen_solvable(2, 20, 42));
        assert_eq!(gen_random(2, 20, 42), gen_random(2, 20, 42));
    }
}
