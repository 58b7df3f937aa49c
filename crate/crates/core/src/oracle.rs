//! Independent brute-force verification of the solver.
//!
//! [`grid_search`] sweeps every designed parameter over a uniform grid
//! with local refinement around the incumbent, evaluating each candidate
//! strategy exactly; the solver value must dominate the grid value and
//! stay within the documented error bound. [`enumerate_two_phase`] checks
//! the finite candidate set of threshold-tight splits for the canonical
//! two-phase trial, which is exact with no grid error.

use num_traits::{One, Zero};

use crate::dp::evaluate_obedient_params;
use crate::error::{Error, Result};
use crate::model::{two_phase_tree, Experiment, NodePath, ParamMap, TreeNode, TrialTree};
use crate::rational::{rat, Rat};
use crate::twophase::thresholds;

/// Evaluation budget for the exhaustive sweep.
pub const GRID_BUDGET: u128 = 10_000_000;

/// Result of a brute-force search.
#[derive(Clone, Debug)]
pub struct OracleResult {
    /// Exact sender utility of the best parameter vector found.
    pub best_value: Rat,
    pub best_params: ParamMap,
    pub grid_resolution: u32,
    pub refinement_rounds: u32,
    /// L / final resolution with L = 2 * number of designed parameters:
    /// the sender utility, as a function of one parameter with the others
    /// fixed, moves mass of at most 1 between 0/1-payoff leaves per state,
    /// so its variation over a grid cell is at most 2 per parameter.
    pub error_bound: Rat,
}

fn designed_paths(node: &TreeNode, path: &NodePath, out: &mut Vec<NodePath>) {
    if matches!(node, TreeNode::Designed { .. }) {
        out.push(path.clone());
    }
    for (i, child) in node.children().iter().enumerate() {
        designed_paths(child, &path.child(i), out);
    }
}

/// Visit the cartesian product of per-parameter candidate lists.
fn for_each_assignment(lists: &[Vec<Rat>], mut visit: impl FnMut(&[Rat])) {
    let mut idx = vec![0usize; lists.len()];
    let mut current: Vec<Rat> = lists.iter().map(|l| l[0].clone()).collect();
    loop {
        visit(&current);
        let mut k = lists.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < lists[k].len() {
                current[k] = lists[k][idx[k]].clone();
                break;
            }
            idx[k] = 0;
            current[k] = lists[k][0].clone();
        }
    }
}

/// Exhaustive grid search over all designed parameters, then `refinement`
/// rounds of halving the step around the incumbent. Deterministic: ties
/// go to the lexicographically smallest parameter vector.
pub fn grid_search(
    tree: &TrialTree,
    prior: &Rat,
    resolution: u32,
    refinement: u32,
) -> Result<OracleResult> {
    if resolution == 0 {
        return Err(Error::invalid("grid resolution must be positive"));
    }
    let mut paths = Vec::new();
    designed_paths(&tree.root, &NodePath::root(), &mut paths);
    let n_params = 2 * paths.len();

    if paths.is_empty() {
        // Nothing to search: one exact evaluation.
        let (value, _) = evaluate_obedient_params(tree, &ParamMap::new(), prior)?;
        return Ok(OracleResult {
            best_value: value,
            best_params: ParamMap::new(),
            grid_resolution: resolution,
            refinement_rounds: refinement,
            error_bound: Rat::zero(),
        });
    }

    let required = ((resolution as u128) + 1)
        .checked_pow(n_params as u32)
        .unwrap_or(u128::MAX);
    if required > GRID_BUDGET {
        return Err(Error::BudgetExceeded {
            required,
            limit: GRID_BUDGET,
        });
    }

    let to_map = |flat: &[Rat]| -> ParamMap {
        paths
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), (flat[2 * i].clone(), flat[2 * i + 1].clone())))
            .collect()
    };

    let mut best: Option<(Rat, Vec<Rat>)> = None;
    let sweep = |lists: &[Vec<Rat>], best: &mut Option<(Rat, Vec<Rat>)>| {
        for_each_assignment(lists, |flat| {
            let (value, _) =
                evaluate_obedient_params(tree, &to_map(flat), prior).expect("params cover tree");
            let better = match best {
                None => true,
                Some((bv, bp)) => value > *bv || (value == *bv && flat < bp.as_slice()),
            };
            if better {
                *best = Some((value, flat.to_vec()));
            }
        });
    };

    let base: Vec<Rat> = (0..=resolution)
        .map(|k| rat(k as i64, resolution as i64))
        .collect();
    let lists: Vec<Vec<Rat>> = vec![base; n_params];
    sweep(&lists, &mut best);

    let mut step = rat(1, resolution as i64);
    for _ in 0..refinement {
        step /= rat(2, 1);
        let incumbent = best.as_ref().unwrap().1.clone();
        let lists: Vec<Vec<Rat>> = incumbent
            .iter()
            .map(|center| {
                let mut vals: Vec<Rat> = (-2i64..=2)
                    .map(|j| {
                        (center + &step * rat(j, 1))
                            .max(Rat::zero())
                            .min(Rat::one())
                    })
                    .collect();
                vals.sort();
                vals.dedup();
                vals
            })
            .collect();
        sweep(&lists, &mut best);
    }

    let (best_value, flat) = best.unwrap();
    let final_resolution = rat(resolution as i64, 1) * rat(2, 1).pow(refinement as i32);
    Ok(OracleResult {
        best_value,
        best_params: to_map(&flat),
        grid_resolution: resolution,
        refinement_rounds: refinement,
        error_bound: rat(2 * n_params as i64, 1) / final_resolution,
    })
}

/// Phase-I parameters realizing the split (weight y on the left branch,
/// interim belief u there) from the given prior.
fn split_params(prior: &Rat, y: &Rat, u: &Rat) -> (Rat, Rat) {
    let one = Rat::one();
    if prior.is_zero() || prior.is_one() {
        (y.clone(), y.clone())
    } else {
        (y * u / prior, y * (&one - u) / (&one - prior))
    }
}

/// Exact maximum over the threshold-tight candidate splits of a
/// two-phase trial: interim beliefs per side restricted to the efficient
/// alpha/beta interims plus {0, 1, prior}, including the degenerate
/// one-signal strategies.
pub fn enumerate_two_phase(e_a: &Experiment, e_b: &Experiment, prior: &Rat) -> OracleResult {
    let tree = two_phase_tree(e_a, e_b);
    let root = NodePath::root();
    let one = Rat::one();

    let side_candidates = |e: &Experiment| -> Vec<Rat> {
        let (alpha_low, beta_low) = thresholds(e);
        let mut v = vec![Rat::zero(), one.clone(), alpha_low, beta_low, prior.clone()];
        v.sort();
        v.dedup();
        v
    };
    let us = side_candidates(e_a);
    let vs = side_candidates(e_b);

    let mut candidates: Vec<(Rat, Rat)> = vec![
        split_params(prior, &one, prior),
        split_params(prior, &Rat::zero(), prior),
    ];
    for u in &us {
        for v in &vs {
            if u == v || prior < u.min(v) || prior > u.max(v) {
                continue;
            }
            let y = (prior - v) / (u - v);
            candidates.push(split_params(prior, &y, u));
        }
    }

    let mut best: Option<(Rat, (Rat, Rat))> = None;
    for (p1, p2) in candidates {
        let mut params = ParamMap::new();
        params.insert(root.clone(), (p1.clone(), p2.clone()));
        let (value, _) = evaluate_obedient_params(&tree, &params, prior).expect("two-phase tree");
        let better = match &best {
            None => true,
            Some((bv, bp)) => value > *bv || (value == *bv && (p1.clone(), p2.clone()) < *bp),
        };
        if better {
            best = Some((value, (p1, p2)));
        }
    }
    let (best_value, (p1, p2)) = best.unwrap();
    let mut best_params = ParamMap::new();
    best_params.insert(root, (p1, p2));
    OracleResult {
        best_value,
        best_params,
        grid_resolution: 0,
        refinement_rounds: 0,
        error_bound: Rat::zero(),
    }
}
