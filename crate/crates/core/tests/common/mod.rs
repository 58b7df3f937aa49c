//! Seeded random instance generators shared by the integration suites.
//! Each suite uses a different subset.
#![allow(dead_code)]

use persuasion_core::model::{Experiment, NaryExperiment, TreeNode, TrialTree};
use persuasion_core::rational::{rat, Rat};
use rand::rngs::StdRng;
use rand::Rng;

pub fn probability(rng: &mut StdRng, max_den: i64) -> Rat {
    let den = rng.random_range(1..=max_den);
    let num = rng.random_range(0..=den);
    rat(num, den)
}

pub fn experiment(rng: &mut StdRng, max_den: i64) -> Experiment {
    Experiment {
        q1: probability(rng, max_den),
        q2: probability(rng, max_den),
    }
}

/// Non-degenerate experiment with q1 >= q2 (neither (0,0) nor (1,1)).
pub fn normalized_experiment(rng: &mut StdRng, max_den: i64) -> Experiment {
    loop {
        let mut e = experiment(rng, max_den);
        if e.q1 < e.q2 {
            std::mem::swap(&mut e.q1, &mut e.q2);
        }
        let degenerate = (e.q1 == rat(0, 1) && e.q2 == rat(0, 1))
            || (e.q1 == rat(1, 1) && e.q2 == rat(1, 1));
        if !degenerate {
            return e;
        }
    }
}

/// Pair ordered so the first branch is weakly more informative at state 1.
pub fn normalized_pair(rng: &mut StdRng, max_den: i64) -> (Experiment, Experiment) {
    let mut a = normalized_experiment(rng, max_den);
    let mut b = normalized_experiment(rng, max_den);
    if a.q1 < b.q1 {
        std::mem::swap(&mut a, &mut b);
    }
    (a, b)
}

/// Random binary trial tree with at most `max_depth` experiment levels
/// and at most `designed_budget` designed nodes.
pub fn random_tree(rng: &mut StdRng, max_depth: usize, designed_budget: usize) -> TrialTree {
    let mut budget = designed_budget;
    let root = random_node(rng, max_depth, &mut budget);
    TrialTree { root, prior: None }
}

fn random_node(rng: &mut StdRng, depth: usize, budget: &mut usize) -> TreeNode {
    if depth == 0 {
        return TreeNode::Leaf;
    }
    let roll = rng.random_range(0..10);
    if roll < 2 {
        TreeNode::Leaf
    } else if roll < 6 && *budget > 0 {
        *budget -= 1;
        let left = random_node(rng, depth - 1, budget);
        let right = random_node(rng, depth - 1, budget);
        TreeNode::designed(left, right)
    } else {
        let e = experiment(rng, 10);
        let pass = random_node(rng, depth - 1, budget);
        let fail = random_node(rng, depth - 1, budget);
        TreeNode::determined(e, pass, fail)
    }
}

/// Random tree containing at least one designed and one determined node.
pub fn random_mixed_tree(rng: &mut StdRng, max_depth: usize, designed_budget: usize) -> TrialTree {
    loop {
        let tree = random_tree(rng, max_depth, designed_budget);
        let has_determined = count_determined(&tree.root) > 0;
        if tree.root.designed_count() > 0 && has_determined {
            return tree;
        }
    }
}

pub fn count_determined(node: &TreeNode) -> usize {
    let own = usize::from(matches!(node, TreeNode::Determined { .. }));
    own + node
        .children()
        .iter()
        .map(|c| count_determined(c))
        .sum::<usize>()
}

/// Random outcome distribution of the given arity summing to exactly 1;
/// `allow_zero` lets some outcomes carry zero mass.
pub fn nary_distribution(rng: &mut StdRng, arity: usize, allow_zero: bool) -> Vec<Rat> {
    loop {
        let weights: Vec<i64> = (0..arity)
            .map(|_| {
                if allow_zero && rng.random_range(0..4) == 0 {
                    0
                } else {
                    rng.random_range(1..=12)
                }
            })
            .collect();
        let total: i64 = weights.iter().sum();
        if total > 0 {
            return weights.into_iter().map(|w| rat(w, total)).collect();
        }
    }
}

pub fn nary_experiment(rng: &mut StdRng, arity: usize, allow_zero: bool) -> NaryExperiment {
    NaryExperiment::new(
        nary_distribution(rng, arity, allow_zero),
        nary_distribution(rng, arity, allow_zero),
    )
    .expect("rows sum to 1")
}
