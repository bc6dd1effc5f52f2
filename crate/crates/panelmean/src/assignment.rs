//! Concrete judge-assignment plans realizing the allocation strategies.
//!
//! Plans map every (scenario, generation) cell to one judge (all judges for
//! the full-panel strategy). Cyclic plans are balanced: per-judge call
//! counts never differ by more than one, and when the cell count is a
//! multiple of the pool size every judge appears equally often, so any
//! centered offset vector cancels exactly in the plan average.
//!
//! Everything is deterministic given (inputs, seed); plans are plain values
//! safe to share across threads.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::allocation::Strategy;
use crate::rng::{stream_rng, streams};

#[derive(Debug, Error)]
pub enum AssignmentError {
    #[error("gamma must be centered: sum is {sum:e}")]
    UncenteredGamma { sum: f64 },
    #[error("gamma has {got} entries but the plan covers {expected} judges")]
    GammaLength { got: usize, expected: usize },
}

/// A judge-assignment plan over an `n x m` grid of cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentPlan {
    pub strategy: Strategy,
    /// (scenario index, generation index, judge index) triples in canonical
    /// scenario-major order.
    pub cells: Vec<(usize, usize, usize)>,
    /// Per-judge call counts over the whole plan, indexed by judge.
    pub counts: Vec<u64>,
    /// Seed that produced the plan; absent for the deterministic
    /// all-judges plan.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    /// `max(counts) - min(counts)`; zero means exact balance.
    pub max_imbalance: u64,
}

impl AssignmentPlan {
    fn from_cells(
        strategy: Strategy,
        cells: Vec<(usize, usize, usize)>,
        k_tot: usize,
        seed: Option<u64>,
    ) -> Self {
        let mut counts = vec![0u64; k_tot];
        for &(_, _, l) in &cells {
            counts[l] += 1;
        }
        let max_imbalance = counts.iter().max().unwrap_or(&0) - counts.iter().min().unwrap_or(&0);
        AssignmentPlan {
            strategy,
            cells,
            counts,
            seed,
            max_imbalance,
        }
    }

    /// Total judge calls in the plan.
    pub fn total_calls(&self) -> usize {
        self.cells.len()
    }
}

/// Round-robin plan: one judge per cell, cycling through the pool.
///
/// With several generations per scenario the cycle runs over generations in
/// cell order, so each scenario sees the judges in pool order; when the pool
/// size does not divide the generation count the cycle continues across
/// scenarios instead of restarting, keeping global counts within one call of
/// each other (the first `n*m mod k_tot` judges in pool order pick up the
/// extra call). With a single generation per scenario the cycle runs over
/// scenarios, which are first shuffled by `seed` so the rotation cannot
/// align with any latent ordering of the dataset.
pub fn cyclic_plan(n: usize, m: usize, k_tot: usize, seed: u64) -> AssignmentPlan {
    assert!(n >= 1 && m >= 1 && k_tot >= 1, "plan dimensions must be positive");
    let mut cells = Vec::with_capacity(n * m);
    if m == 1 {
        let mut order: Vec<usize> = (0..n).collect();
        let mut rng = stream_rng(seed, streams::PLAN_SHUFFLE);
        order.shuffle(&mut rng);
        // rank of scenario i in the shuffled order decides its judge
        let mut rank_of = vec![0usize; n];
        for (rank, &i) in order.iter().enumerate() {
            rank_of[i] = rank;
        }
        for (i, &rank) in rank_of.iter().enumerate() {
            cells.push((i, 0, rank % k_tot));
        }
    } else {
        for i in 0..n {
            for j in 0..m {
                cells.push((i, j, (i * m + j) % k_tot));
            }
        }
    }
    AssignmentPlan::from_cells(Strategy::Cyclic, cells, k_tot, Some(seed))
}

/// One independently and uniformly drawn judge per cell.
pub fn random_plan(n: usize, m: usize, k_tot: usize, seed: u64) -> AssignmentPlan {
    assert!(n >= 1 && m >= 1 && k_tot >= 1, "plan dimensions must be positive");
    let mut rng = stream_rng(seed, streams::PLAN_RANDOM);
    let mut cells = Vec::with_capacity(n * m);
    for i in 0..n {
        for j in 0..m {
            let l = rand::Rng::random_range(&mut rng, 0..k_tot);
            cells.push((i, j, l));
        }
    }
    AssignmentPlan::from_cells(Strategy::RandomSingle, cells, k_tot, Some(seed))
}

/// Every judge scores every cell: `n * m * k_tot` calls, all counts equal.
pub fn all_judges_plan(n: usize, m: usize, k_tot: usize) -> AssignmentPlan {
    assert!(n >= 1 && m >= 1 && k_tot >= 1, "plan dimensions must be positive");
    let mut cells = Vec::with_capacity(n * m * k_tot);
    for i in 0..n {
        for j in 0..m {
            for l in 0..k_tot {
                cells.push((i, j, l));
            }
        }
    }
    AssignmentPlan::from_cells(Strategy::AllJudges, cells, k_tot, None)
}

/// Magnitude of the offset a plan leaves uncancelled:
/// `|sum over cells of gamma[judge]| / total calls` for a centered offset
/// vector `gamma`.
///
/// Computed from count excesses over the minimum count, so a plan with
/// `max_imbalance = 0` reports exactly zero. For near-balanced plans the
/// bound is at most `max|gamma| * (k_tot - 1) / (n * m)`.
pub fn residual_offset_bound(
    plan: &AssignmentPlan,
    gamma: &[f64],
) -> Result<f64, AssignmentError> {
    if gamma.len() != plan.counts.len() {
        return Err(AssignmentError::GammaLength {
            got: gamma.len(),
            expected: plan.counts.len(),
        });
    }
    let sum: f64 = gamma.iter().sum();
    if sum.abs() > 1e-9 {
        return Err(AssignmentError::UncenteredGamma { sum });
    }
    let min_count = *plan.counts.iter().min().expect("at least one judge");
    let excess_sum: f64 = plan
        .counts
        .iter()
        .zip(gamma)
        .map(|(&c, &g)| (c - min_count) as f64 * g)
        .sum();
    Ok(excess_sum.abs() / plan.total_calls() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_scenario_full_cycle() {
        let plan = cyclic_plan(1, 5, 5, 0);
        assert_eq!(plan.counts, vec![1, 1, 1, 1, 1]);
        assert_eq!(plan.max_imbalance, 0);
    }

    #[test]
    fn eighty_scenarios_single_generation() {
        for seed in [0u64, 1, 42, 12345] {
            let plan = cyclic_plan(80, 1, 5, seed);
            assert!(plan.counts.iter().all(|&c| c == 16), "seed {seed}: {:?}", plan.counts);
        }
    }

    #[test]
    fn cyclic_same_seed_same_plan_different_seed_same_counts() {
        let a = cyclic_plan(80, 1, 5, 7);
        let b = cyclic_plan(80, 1, 5, 7);
        let c = cyclic_plan(80, 1, 5, 8);
        assert_eq!(a, b);
        assert_eq!(a.counts, c.counts);
        assert_ne!(a.cells, c.cells, "different seeds should shuffle differently");
    }

    #[test]
    fn cyclic_multi_generation_uses_pool_order_within_scenario() {
        let plan = cyclic_plan(3, 10, 5, 0);
        // k_tot divides m: every scenario restarts the cycle at judge 0.
        for &(i, j, l) in &plan.cells {
            assert_eq!(l, (i * 10 + j) % 5);
            assert_eq!(l, j % 5);
        }
        assert_eq!(plan.max_imbalance, 0);
    }

    #[test]
    fn cyclic_carries_cycle_across_scenarios_when_unaligned() {
        // m = 3, k_tot = 2: restarting per scenario would give one judge
        // 2n calls and the other n; carrying the cycle keeps balance.
        let plan = cyclic_plan(5, 3, 2, 0);
        assert!(plan.max_imbalance <= 1, "counts {:?}", plan.counts);
        assert_eq!(plan.counts.iter().sum::<u64>(), 15);
    }

    #[test]
    fn extra_calls_go_to_first_judges_in_pool_order() {
        let plan = cyclic_plan(6, 1, 5, 99);
        // 6 = 5 + 1: judge 0 gets the extra call regardless of shuffle.
        assert_eq!(plan.counts, vec![2, 1, 1, 1, 1]);
    }

    #[test]
    fn random_plan_is_seeded_and_roughly_uniform() {
        let a = random_plan(100, 2, 5, 3);
        let b = random_plan(100, 2, 5, 3);
        assert_eq!(a, b);
        let c = random_plan(100, 2, 5, 4);
        assert_ne!(a.cells, c.cells);
        assert_eq!(a.counts.iter().sum::<u64>(), 200);
    }

    #[test]
    fn random_plan_single_judge_pool_matches_cyclic() {
        let r = random_plan(7, 2, 1, 11);
        let c = cyclic_plan(7, 2, 1, 11);
        assert_eq!(r.cells, c.cells);
        assert_eq!(r.counts, c.counts);
    }

    #[test]
    fn all_judges_plan_counts() {
        let plan = all_judges_plan(2, 1, 3);
        assert_eq!(plan.total_calls(), 6);
        assert_eq!(plan.counts, vec![2, 2, 2]);
        assert_eq!(plan.seed, None);
        // Full-panel cost is k_tot times the single-judge plans.
        assert_eq!(plan.total_calls(), 3 * cyclic_plan(2, 1, 3, 0).total_calls());
    }

    #[test]
    fn balanced_plan_cancels_any_centered_gamma_exactly() {
        let gamma = [0.4, -0.1, -0.3, 0.2, -0.2];
        let plan = cyclic_plan(80, 1, 5, 5);
        assert_eq!(residual_offset_bound(&plan, &gamma).unwrap(), 0.0);
        let full = all_judges_plan(4, 2, 5);
        assert_eq!(residual_offset_bound(&full, &gamma).unwrap(), 0.0);
    }

    #[test]
    fn near_balance_bound_matches_single_extra_assignment() {
        let gamma = [0.4, -0.1, -0.3, 0.2, -0.2];
        let plan = cyclic_plan(6, 1, 5, 123);
        // judge 0 appears twice; the uncancelled offset is gamma[0]/6.
        let bound = residual_offset_bound(&plan, &gamma).unwrap();
        assert!((bound - 0.4 / 6.0).abs() < 1e-15);
        assert!(bound <= 0.4 * 4.0 / 6.0);
    }

    #[test]
    fn offset_bound_rejects_bad_gamma() {
        let plan = cyclic_plan(5, 1, 5, 0);
        assert!(matches!(
            residual_offset_bound(&plan, &[0.1, 0.1, 0.1, 0.1, 0.1]),
            Err(AssignmentError::UncenteredGamma { .. })
        ));
        assert!(matches!(
            residual_offset_bound(&plan, &[0.0; 3]),
            Err(AssignmentError::GammaLength { .. })
        ));
    }
}
