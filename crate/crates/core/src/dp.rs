//! Backward induction over the trial tree and exact strategy evaluation.
//!
//! [`solve_curve`] attaches a value curve to every node bottom-up: leaves
//! get the receiver's best-response step, determined nodes push their
//! children's curves through the experiment, designed nodes take the best
//! belief split. [`extract_strategy`] then walks forward from the prior,
//! reading an optimizing split at each designed node off the curves, and
//! [`evaluate_strategy`] recomputes both players' utilities from first
//! principles for any committed strategy.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::curve::{
    designed_combine, determined_transform, determined_transform_nary, SplitExtractor, ValueCurve,
};
use crate::error::{Error, Result};
use crate::model::{NodePath, ParamMap, TreeNode, TrialTree};
use crate::rational::{format_rational, half, Rat};

/// Receiver action at a leaf.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Action {
    /// Guess state 1 — the action the sender always prefers.
    Accept,
    /// Guess state 2.
    Reject,
}

impl Action {
    pub fn as_str(&self) -> &'static str {
        match self {
            Action::Accept => "phi1",
            Action::Reject => "phi2",
        }
    }

    /// Best response to a posterior; the tie at exactly 1/2 follows the
    /// sender's recommendation, which the solver fixes to Accept.
    pub fn obedient(posterior: &Rat) -> Action {
        if *posterior >= half() {
            Action::Accept
        } else {
            Action::Reject
        }
    }
}

/// How to break ties among equally good sender splits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TieBreak {
    /// Deterministic canonical choice (largest left weight first).
    #[default]
    Canonical,
    /// Among sender-optimal splits, pick the one worst for the receiver.
    ReceiverPessimal,
}

/// A committed sender strategy: the designed-node parameter pairs
/// (per-state probabilities of the left outcome) plus the per-leaf
/// recommendations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy {
    pub prior: Rat,
    pub designed: ParamMap,
    pub leaf_actions: BTreeMap<NodePath, Action>,
}

/// Per-leaf outcome of an evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeafOutcome {
    pub path: NodePath,
    pub mass_state1: Rat,
    pub mass_state2: Rat,
    /// None at zero-probability leaves.
    pub posterior: Option<Rat>,
    pub action: Action,
}

/// Exact evaluation of a strategy on a tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub sender_utility: Rat,
    pub receiver_utility: Rat,
    pub leaves: Vec<LeafOutcome>,
    /// Positive-mass leaves whose action the receiver would strictly
    /// prefer to deviate from.
    pub ic_violations: Vec<NodePath>,
}

// ---------------------------------------------------------------------------
// Backward induction
// ---------------------------------------------------------------------------

/// Value curves for every node of the tree, keyed by path.
pub fn solve_curve(tree: &TrialTree) -> BTreeMap<NodePath, ValueCurve> {
    let mut map = BTreeMap::new();
    fill_curves(&tree.root, &NodePath::root(), &mut map);
    map
}

/// The root value curve only.
pub fn root_curve(tree: &TrialTree) -> ValueCurve {
    let mut map = solve_curve(tree);
    map.remove(&NodePath::root()).expect("root curve")
}

fn fill_curves(node: &TreeNode, path: &NodePath, map: &mut BTreeMap<NodePath, ValueCurve>) -> ValueCurve {
    let curve = match node {
        TreeNode::Leaf => ValueCurve::leaf(),
        TreeNode::Determined { experiment, pass, fail } => {
            let pass = fill_curves(pass, &path.child(0), map);
            let fail = fill_curves(fail, &path.child(1), map);
            determined_transform(experiment, &pass, &fail)
        }
        TreeNode::DeterminedNary { experiment, children } => {
            let curves: Vec<ValueCurve> = children
                .iter()
                .enumerate()
                .map(|(i, c)| fill_curves(c, &path.child(i), map))
                .collect();
            determined_transform_nary(experiment, &curves)
        }
        TreeNode::Designed { left, right } => {
            let l = fill_curves(left, &path.child(0), map);
            let r = fill_curves(right, &path.child(1), map);
            designed_combine(&l, &r).0
        }
    };
    map.insert(path.clone(), curve.clone());
    curve
}

// ---------------------------------------------------------------------------
// Forward strategy extraction
// ---------------------------------------------------------------------------

/// Extract a sender-optimal strategy at the given prior under the
/// canonical tie-break.
pub fn extract_strategy(tree: &TrialTree, prior: &Rat) -> Result<Strategy> {
    extract_strategy_with(tree, prior, TieBreak::Canonical)
}

pub fn extract_strategy_with(tree: &TrialTree, prior: &Rat, tie: TieBreak) -> Result<Strategy> {
    if prior.is_negative() || *prior > Rat::one() {
        return Err(Error::PriorOutOfRange);
    }
    let curves = solve_curve(tree);
    let mut strategy = Strategy {
        prior: prior.clone(),
        designed: BTreeMap::new(),
        leaf_actions: BTreeMap::new(),
    };
    extract_walk(&tree.root, &NodePath::root(), prior, true, tie, &curves, &mut strategy);
    Ok(strategy)
}

/// Walk the tree committing split parameters and recommendations.
/// Returns the receiver's matched probability per unit of mass at this
/// node, which the pessimal tie-break uses to rank optimal splits.
fn extract_walk(
    node: &TreeNode,
    path: &NodePath,
    belief: &Rat,
    reachable: bool,
    tie: TieBreak,
    curves: &BTreeMap<NodePath, ValueCurve>,
    out: &mut Strategy,
) -> Rat {
    let one = Rat::one();
    match node {
        TreeNode::Leaf => {
            let action = if reachable {
                Action::obedient(belief)
            } else {
                // Zero-probability leaves carry no mass; recommend Reject.
                Action::Reject
            };
            out.leaf_actions.insert(path.clone(), action);
            match action {
                Action::Accept => belief.clone(),
                Action::Reject => &one - belief,
            }
        }
        TreeNode::Determined { experiment, pass, fail } => {
            let ppass = belief * &experiment.q1 + (&one - belief) * &experiment.q2;
            let pfail = &one - &ppass;
            let (pass_belief, pass_live) = if reachable && ppass.is_positive() {
                (belief * &experiment.q1 / &ppass, true)
            } else {
                (Rat::zero(), false)
            };
            let (fail_belief, fail_live) = if reachable && pfail.is_positive() {
                (belief * (&one - &experiment.q1) / &pfail, true)
            } else {
                (Rat::zero(), false)
            };
            let rp = extract_walk(pass, &path.child(0), &pass_belief, pass_live, tie, curves, out);
            let rf = extract_walk(fail, &path.child(1), &fail_belief, fail_live, tie, curves, out);
            if !reachable {
                return Rat::zero();
            }
            let mut total = Rat::zero();
            if pass_live {
                total += &ppass * rp;
            }
            if fail_live {
                total += &pfail * rf;
            }
            total
        }
        TreeNode::DeterminedNary { experiment, children } => {
            let mut total = Rat::zero();
            for (k, child) in children.iter().enumerate() {
                let reach = belief * &experiment.q1[k] + (&one - belief) * &experiment.q2[k];
                let (child_belief, live) = if reachable && reach.is_positive() {
                    (belief * &experiment.q1[k] / &reach, true)
                } else {
                    (Rat::zero(), false)
                };
                let r = extract_walk(child, &path.child(k), &child_belief, live, tie, curves, out);
                if live {
                    total += reach * r;
                }
            }
            if reachable {
                total
            } else {
                Rat::zero()
            }
        }
        TreeNode::Designed { left, right } => {
            if !reachable {
                out.designed.insert(path.clone(), (Rat::zero(), Rat::zero()));
                extract_walk(left, &path.child(0), &Rat::zero(), false, tie, curves, out);
                extract_walk(right, &path.child(1), &Rat::zero(), false, tie, curves, out);
                return Rat::zero();
            }
            let extractor = SplitExtractor::new(
                curves[&path.child(0)].clone(),
                curves[&path.child(1)].clone(),
            );
            let split = match tie {
                TieBreak::Canonical => extractor.at(belief),
                TieBreak::ReceiverPessimal => {
                    // Rank sender-optimal splits by the receiver utility they
                    // induce downstream; dry-run each candidate.
                    let mut best: Option<(Rat, crate::curve::SplitChoice)> = None;
                    for candidate in extractor.maximizers(belief) {
                        let mut scratch = out.clone();
                        let r = commit_split(
                            node, path, belief, &candidate, tie, curves, &mut scratch,
                        );
                        if best.as_ref().map(|(rb, _)| r < *rb).unwrap_or(true) {
                            best = Some((r, candidate));
                        }
                    }
                    best.expect("at least one maximizer").1
                }
            };
            commit_split(node, path, belief, &split, tie, curves, out)
        }
    }
}

/// Write one designed split into the strategy and recurse. Returns the
/// receiver's matched probability per unit mass.
fn commit_split(
    node: &TreeNode,
    path: &NodePath,
    belief: &Rat,
    split: &crate::curve::SplitChoice,
    tie: TieBreak,
    curves: &BTreeMap<NodePath, ValueCurve>,
    out: &mut Strategy,
) -> Rat {
    let (left, right) = match node {
        TreeNode::Designed { left, right } => (left, right),
        _ => unreachable!("commit_split on non-designed node"),
    };
    let one = Rat::one();
    let y = &split.weight_left;
    let (p1, p2, bl, br) = if belief.is_zero() || belief.is_one() {
        // Degenerate interim belief: any state-independent split is
        // payoff-equivalent; posteriors stay at the belief on both sides.
        (y.clone(), y.clone(), belief.clone(), belief.clone())
    } else {
        let p1 = y * &split.belief_left / belief;
        let p2 = y * (&one - &split.belief_left) / (&one - belief);
        (p1, p2, split.belief_left.clone(), split.belief_right.clone())
    };
    out.designed.insert(path.clone(), (p1, p2));
    let left_live = y.is_positive();
    let right_live = *y < one;
    let rl = extract_walk(left, &path.child(0), &bl, left_live, tie, curves, out);
    let rr = extract_walk(right, &path.child(1), &br, right_live, tie, curves, out);
    let mut total = Rat::zero();
    if left_live {
        total += y * rl;
    }
    if right_live {
        total += (&one - y) * rr;
    }
    total
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Evaluate a committed strategy exactly: joint leaf masses, posteriors,
/// both utilities, and incentive-compatibility flags.
pub fn evaluate_strategy(tree: &TrialTree, strategy: &Strategy, prior: &Rat) -> Result<Evaluation> {
    if prior.is_negative() || *prior > Rat::one() {
        return Err(Error::PriorOutOfRange);
    }
    let one = Rat::one();
    let mut leaves = Vec::new();
    eval_walk(
        &tree.root,
        &NodePath::root(),
        prior.clone(),
        &one - prior,
        strategy,
        &mut leaves,
    )?;
    let mut sender = Rat::zero();
    let mut receiver = Rat::zero();
    let mut violations = Vec::new();
    for leaf in &leaves {
        match leaf.action {
            Action::Accept => {
                sender += &leaf.mass_state1 + &leaf.mass_state2;
                receiver += &leaf.mass_state1;
            }
            Action::Reject => receiver += &leaf.mass_state2,
        }
        if let Some(post) = &leaf.posterior {
            // A strict preference to deviate breaks incentive
            // compatibility; at posterior exactly 1/2 either action is a
            // best response.
            let bad = match leaf.action {
                Action::Accept => *post < half(),
                Action::Reject => *post > half(),
            };
            if bad {
                violations.push(leaf.path.clone());
            }
        }
    }
    Ok(Evaluation {
        sender_utility: sender,
        receiver_utility: receiver,
        leaves,
        ic_violations: violations,
    })
}

fn eval_walk(
    node: &TreeNode,
    path: &NodePath,
    m1: Rat,
    m2: Rat,
    strategy: &Strategy,
    leaves: &mut Vec<LeafOutcome>,
) -> Result<()> {
    let one = Rat::one();
    match node {
        TreeNode::Leaf => {
            let total = &m1 + &m2;
            let posterior = total.is_positive().then(|| &m1 / &total);
            let action = strategy
                .leaf_actions
                .get(path)
                .copied()
                .unwrap_or(Action::Reject);
            leaves.push(LeafOutcome {
                path: path.clone(),
                mass_state1: m1,
                mass_state2: m2,
                posterior,
                action,
            });
            Ok(())
        }
        TreeNode::Determined { experiment, pass, fail } => {
            eval_walk(
                pass,
                &path.child(0),
                &m1 * &experiment.q1,
                &m2 * &experiment.q2,
                strategy,
                leaves,
            )?;
            eval_walk(
                fail,
                &path.child(1),
                m1 * (&one - &experiment.q1),
                m2 * (&one - &experiment.q2),
                strategy,
                leaves,
            )
        }
        TreeNode::DeterminedNary { experiment, children } => {
            for (k, child) in children.iter().enumerate() {
                eval_walk(
                    child,
                    &path.child(k),
                    &m1 * &experiment.q1[k],
                    &m2 * &experiment.q2[k],
                    strategy,
                    leaves,
                )?;
            }
            Ok(())
        }
        TreeNode::Designed { left, right } => {
            let mass_positive = (&m1 + &m2).is_positive();
            let (p1, p2) = match strategy.designed.get(path) {
                Some(pair) => pair.clone(),
                None if !mass_positive => (Rat::zero(), Rat::zero()),
                None => {
                    return Err(Error::MissingDesignedParams {
                        path: path.to_string(),
                    })
                }
            };
            eval_walk(left, &path.child(0), &m1 * &p1, &m2 * &p2, strategy, leaves)?;
            eval_walk(
                right,
                &path.child(1),
                m1 * (&one - &p1),
                m2 * (&one - &p2),
                strategy,
                leaves,
            )
        }
    }
}

/// Same designed parameters, actions recomputed as receiver best
/// responses to the realized posteriors. Ties at posterior 1/2 keep the
/// frozen recommendation; zero-mass leaves get Reject.
pub fn with_obedient_actions(tree: &TrialTree, strategy: &Strategy, prior: &Rat) -> Result<Strategy> {
    let eval = evaluate_strategy(tree, strategy, prior)?;
    let mut out = strategy.clone();
    out.prior = prior.clone();
    for leaf in &eval.leaves {
        let action = match &leaf.posterior {
            Some(post) if *post > half() => Action::Accept,
            Some(post) if *post < half() => Action::Reject,
            Some(_) => strategy
                .leaf_actions
                .get(&leaf.path)
                .copied()
                .unwrap_or(Action::Accept),
            None => Action::Reject,
        };
        out.leaf_actions.insert(leaf.path.clone(), action);
    }
    Ok(out)
}

/// Sender utility of a bare parameter assignment with the receiver best
/// responding (ties to Accept). Returns (sender, receiver) utilities.
/// This is the inner loop of the grid oracle, so it avoids building
/// intermediate strategy maps.
pub fn evaluate_obedient_params(tree: &TrialTree, params: &ParamMap, prior: &Rat) -> Result<(Rat, Rat)> {
    let one = Rat::one();
    let mut sender = Rat::zero();
    let mut receiver = Rat::zero();
    obedient_walk(
        &tree.root,
        &NodePath::root(),
        prior.clone(),
        &one - prior,
        params,
        &mut sender,
        &mut receiver,
    )?;
    Ok((sender, receiver))
}

fn obedient_walk(
    node: &TreeNode,
    path: &NodePath,
    m1: Rat,
    m2: Rat,
    params: &ParamMap,
    sender: &mut Rat,
    receiver: &mut Rat,
) -> Result<()> {
    let one = Rat::one();
    if m1.is_zero() && m2.is_zero() {
        return Ok(());
    }
    match node {
        TreeNode::Leaf => {
            if m1 >= m2 {
                // Posterior >= 1/2: Accept.
                *sender += &m1 + &m2;
                *receiver += m1;
            } else {
                *receiver += m2;
            }
            Ok(())
        }
        TreeNode::Determined { experiment, pass, fail } => {
            obedient_walk(
                pass,
                &path.child(0),
                &m1 * &experiment.q1,
                &m2 * &experiment.q2,
                params,
                sender,
                receiver,
            )?;
            obedient_walk(
                fail,
                &path.child(1),
                m1 * (&one - &experiment.q1),
                m2 * (&one - &experiment.q2),
                params,
                sender,
                receiver,
            )
        }
        TreeNode::DeterminedNary { experiment, children } => {
            for (k, child) in children.iter().enumerate() {
                obedient_walk(
                    child,
                    &path.child(k),
                    &m1 * &experiment.q1[k],
                    &m2 * &experiment.q2[k],
                    params,
                    sender,
                    receiver,
                )?;
            }
            Ok(())
        }
        TreeNode::Designed { left, right } => {
            let (p1, p2) = params.get(path).cloned().ok_or(Error::MissingDesignedParams {
                path: path.to_string(),
            })?;
            obedient_walk(left, &path.child(0), &m1 * &p1, &m2 * &p2, params, sender, receiver)?;
            obedient_walk(
                right,
                &path.child(1),
                m1 * (&one - &p1),
                m2 * (&one - &p2),
                params,
                sender,
                receiver,
            )
        }
    }
}

// ---------------------------------------------------------------------------
// Receiver value
// ---------------------------------------------------------------------------

/// Receiver utility when the sender plays optimally under the canonical
/// tie-break.
pub fn receiver_value(tree: &TrialTree, prior: &Rat) -> Result<Rat> {
    receiver_value_with(tree, prior, TieBreak::Canonical)
}

pub fn receiver_value_with(tree: &TrialTree, prior: &Rat, tie: TieBreak) -> Result<Rat> {
    let strategy = extract_strategy_with(tree, prior, tie)?;
    Ok(evaluate_strategy(tree, &strategy, prior)?.receiver_utility)
}

pub fn receiver_value_samples(tree: &TrialTree, priors: &[Rat]) -> Result<Vec<(Rat, Rat)>> {
    priors
        .iter()
        .map(|p| Ok((p.clone(), receiver_value(tree, p)?)))
        .collect()
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// Machine-readable strategy report: designed parameters keyed by path,
/// leaf actions, both utilities as rational strings, IC flags.
pub fn strategy_report(strategy: &Strategy, evaluation: &Evaluation) -> Value {
    let designed: serde_json::Map<String, Value> = strategy
        .designed
        .iter()
        .map(|(path, (p1, p2))| {
            (
                path.to_string(),
                json!([format_rational(p1), format_rational(p2)]),
            )
        })
        .collect();
    let actions: serde_json::Map<String, Value> = strategy
        .leaf_actions
        .iter()
        .map(|(path, action)| (path.to_string(), Value::String(action.as_str().to_string())))
        .collect();
    let leaves: Vec<Value> = evaluation
        .leaves
        .iter()
        .map(|leaf| {
            json!({
                "path": leaf.path.to_string(),
                "mass_state1": format_rational(&leaf.mass_state1),
                "mass_state2": format_rational(&leaf.mass_state2),
                "posterior": leaf.posterior.as_ref().map(format_rational),
                "action": leaf.action.as_str(),
            })
        })
        .collect();
    json!({
        "prior": format_rational(&strategy.prior),
        "designed_params": designed,
        "leaf_actions": actions,
        "sender_utility": format_rational(&evaluation.sender_utility),
        "receiver_utility": format_rational(&evaluation.receiver_utility),
        "ic_violations": evaluation
            .ic_violations
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>(),
        "leaf_table": leaves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{two_phase_tree, Experiment};
    use crate::rational::{rat, rat_int};

    fn designed_over_leaves() -> TrialTree {
        TrialTree {
            root: TreeNode::designed(TreeNode::Leaf, TreeNode::Leaf),
            prior: None,
        }
    }

    fn exp(q1: (i64, i64), q2: (i64, i64)) -> Experiment {
        Experiment {
            q1: rat(q1.0, q1.1),
            q2: rat(q2.0, q2.1),
        }
    }

    #[test]
    fn solve_single_leaf() {
        let tree = TrialTree {
            root: TreeNode::Leaf,
            prior: None,
        };
        assert_eq!(root_curve(&tree), ValueCurve::leaf());
    }

    #[test]
    fn solve_designed_over_leaves() {
        assert_eq!(root_curve(&designed_over_leaves()), ValueCurve::single_phase());
    }

    #[test]
    fn solve_designed_over_determined_and_leaf() {
        let tree = TrialTree {
            root: TreeNode::designed(
                TreeNode::determined(exp((4, 5), (1, 5)), TreeNode::Leaf, TreeNode::Leaf),
                TreeNode::Leaf,
            ),
            prior: None,
        };
        assert_eq!(root_curve(&tree), ValueCurve::single_phase());
        // The map carries interior curves too.
        let map = solve_curve(&tree);
        assert_eq!(map.len(), 5);
        assert_eq!(map[&"1".parse::<NodePath>().unwrap()], ValueCurve::leaf());
    }

    #[test]
    fn extract_single_phase_optimum() {
        let tree = designed_over_leaves();
        let prior = rat(1, 3);
        let strategy = extract_strategy(&tree, &prior).unwrap();
        let (p1, p2) = strategy.designed[&NodePath::root()].clone();
        assert_eq!(p1, rat_int(1));
        assert_eq!(p2, rat(1, 2));
        let eval = evaluate_strategy(&tree, &strategy, &prior).unwrap();
        assert_eq!(eval.sender_utility, rat(2, 3));
        assert_eq!(eval.receiver_utility, rat(2, 3));
        assert!(eval.ic_violations.is_empty());
    }

    #[test]
    fn extract_extreme_priors() {
        let tree = two_phase_tree(&exp((4, 5), (1, 5)), &exp((7, 10), (3, 10)));
        for (prior, expect) in [(rat_int(1), rat_int(1)), (rat_int(0), rat_int(0))] {
            let strategy = extract_strategy(&tree, &prior).unwrap();
            let eval = evaluate_strategy(&tree, &strategy, &prior).unwrap();
            assert_eq!(eval.sender_utility, expect);
            assert!(eval.ic_violations.is_empty());
            for leaf in &eval.leaves {
                if let Some(post) = &leaf.posterior {
                    assert_eq!(*post, prior);
                }
            }
        }
    }

    #[test]
    fn evaluation_masses_sum_to_prior_split() {
        let tree = two_phase_tree(&exp((4, 5), (1, 2)), &exp((3, 4), (3, 20)));
        let prior = rat(2, 3);
        let strategy = extract_strategy(&tree, &prior).unwrap();
        let eval = evaluate_strategy(&tree, &strategy, &prior).unwrap();
        let m1: Rat = eval.leaves.iter().map(|l| l.mass_state1.clone()).sum();
        let m2: Rat = eval.leaves.iter().map(|l| l.mass_state2.clone()).sum();
        assert_eq!(m1, prior);
        assert_eq!(m2, Rat::one() - &prior);
    }

    #[test]
    fn trade_off_fixture_strategy_is_41_46() {
        // Designed root over (4/5, 1/2) and (3/4, 3/20) at prior 2/3,
        // committing masses 5/46 (state 1) and 8/46 (state 2) to the
        // first branch with a pass-only recommendation there and
        // accept-everywhere on the second.
        let tree = two_phase_tree(&exp((4, 5), (1, 2)), &exp((3, 4), (3, 20)));
        let prior = rat(2, 3);
        let mut designed = ParamMap::new();
        designed.insert(
            NodePath::root(),
            (rat(5, 46) / rat(2, 3), rat(8, 46) / rat(1, 3)),
        );
        let mut leaf_actions = BTreeMap::new();
        leaf_actions.insert("0.0".parse().unwrap(), Action::Accept);
        leaf_actions.insert("0.1".parse().unwrap(), Action::Reject);
        leaf_actions.insert("1.0".parse().unwrap(), Action::Accept);
        leaf_actions.insert("1.1".parse().unwrap(), Action::Accept);
        let strategy = Strategy {
            prior: prior.clone(),
            designed,
            leaf_actions,
        };
        let eval = evaluate_strategy(&tree, &strategy, &prior).unwrap();
        assert_eq!(eval.sender_utility, rat(41, 46));
        assert!(eval.ic_violations.is_empty());
    }

    #[test]
    fn full_revelation_strategy() {
        let tree = designed_over_leaves();
        let prior = rat(3, 10);
        let mut designed = ParamMap::new();
        designed.insert(NodePath::root(), (rat_int(1), rat_int(0)));
        let mut leaf_actions = BTreeMap::new();
        leaf_actions.insert("0".parse().unwrap(), Action::Accept);
        leaf_actions.insert("1".parse().unwrap(), Action::Reject);
        let strategy = Strategy {
            prior: prior.clone(),
            designed,
            leaf_actions,
        };
        let eval = evaluate_strategy(&tree, &strategy, &prior).unwrap();
        assert_eq!(eval.sender_utility, rat(3, 10));
        assert_eq!(eval.receiver_utility, rat_int(1));
    }

    #[test]
    fn missing_params_on_reachable_node_is_an_error() {
        let tree = designed_over_leaves();
        let strategy = Strategy {
            prior: rat(1, 2),
            designed: ParamMap::new(),
            leaf_actions: BTreeMap::new(),
        };
        assert!(matches!(
            evaluate_strategy(&tree, &strategy, &rat(1, 2)),
            Err(Error::MissingDesignedParams { .. })
        ));
    }

    #[test]
    fn disobedient_action_is_flagged() {
        let tree = designed_over_leaves();
        let prior = rat(3, 4);
        let mut designed = ParamMap::new();
        designed.insert(NodePath::root(), (rat_int(1), rat_int(1)));
        let mut leaf_actions = BTreeMap::new();
        // Posterior at the left leaf is 3/4, yet the sender recommends Reject.
        leaf_actions.insert("0".parse().unwrap(), Action::Reject);
        let strategy = Strategy {
            prior: prior.clone(),
            designed,
            leaf_actions,
        };
        let eval = evaluate_strategy(&tree, &strategy, &prior).unwrap();
        assert_eq!(eval.ic_violations, vec!["0".parse::<NodePath>().unwrap()]);
        let fixed = with_obedient_actions(&tree, &strategy, &prior).unwrap();
        let eval = evaluate_strategy(&tree, &fixed, &prior).unwrap();
        assert!(eval.ic_violations.is_empty());
        assert_eq!(eval.sender_utility, rat_int(1));
    }

    #[test]
    fn receiver_value_single_phase() {
        let tree = designed_over_leaves();
        assert_eq!(receiver_value(&tree, &rat(1, 4)).unwrap(), rat(3, 4));
        assert_eq!(receiver_value(&tree, &rat_int(1)).unwrap(), rat_int(1));
        assert_eq!(receiver_value(&tree, &rat(7, 10)).unwrap(), rat(7, 10));
    }

    #[test]
    fn receiver_value_samples_pairs_up() {
        let tree = designed_over_leaves();
        let priors = vec![rat(1, 4), rat(1, 2), rat(9, 10)];
        let samples = receiver_value_samples(&tree, &priors).unwrap();
        assert_eq!(
            samples,
            vec![
                (rat(1, 4), rat(3, 4)),
                (rat(1, 2), rat(1, 2)),
                (rat(9, 10), rat(9, 10)),
            ]
        );
    }

    #[test]
    fn receiver_value_revealing_chain() {
        let tree = TrialTree {
            root: TreeNode::determined(
                Experiment::revealing(),
                TreeNode::determined(Experiment::revealing(), TreeNode::Leaf, TreeNode::Leaf),
                TreeNode::Leaf,
            ),
            prior: None,
        };
        for k in 0..=10 {
            let p = rat(k, 10);
            assert_eq!(receiver_value(&tree, &p).unwrap(), rat_int(1));
        }
    }

    #[test]
    fn self_consistency_on_two_phase_instances() {
        let pairs = [
            (exp((4, 5), (1, 5)), exp((7, 10), (3, 10))),
            (exp((4, 5), (1, 2)), exp((3, 4), (3, 20))),
            (exp((1, 1), (0, 1)), exp((1, 2), (1, 2))),
            (exp((9, 10), (2, 5)), exp((3, 5), (1, 5))),
        ];
        for (ea, eb) in pairs {
            let tree = two_phase_tree(&ea, &eb);
            let curve = root_curve(&tree);
            for k in 0..=40 {
                let prior = rat(k, 40);
                let strategy = extract_strategy(&tree, &prior).unwrap();
                let eval = evaluate_strategy(&tree, &strategy, &prior).unwrap();
                assert_eq!(
                    eval.sender_utility,
                    curve.eval(&prior),
                    "ea={ea} eb={eb} prior={prior}"
                );
                assert!(eval.ic_violations.is_empty());
            }
        }
    }

    #[test]
    fn extraction_covers_nary_nodes() {
        use crate::model::NaryExperiment;
        let e = NaryExperiment::new(
            vec![rat(1, 2), rat(1, 3), rat(1, 6)],
            vec![rat(1, 6), rat(1, 2), rat(1, 3)],
        )
        .unwrap();
        let tree = TrialTree {
            root: TreeNode::DeterminedNary {
                experiment: e,
                children: vec![
                    TreeNode::designed(TreeNode::Leaf, TreeNode::Leaf),
                    TreeNode::Leaf,
                    TreeNode::designed(TreeNode::Leaf, TreeNode::Leaf),
                ],
            },
            prior: None,
        };
        let curve = root_curve(&tree);
        for k in 0..=24 {
            let prior = rat(k, 24);
            let strategy = extract_strategy(&tree, &prior).unwrap();
            let eval = evaluate_strategy(&tree, &strategy, &prior).unwrap();
            assert_eq!(eval.sender_utility, curve.eval(&prior), "prior {prior}");
            assert!(eval.ic_violations.is_empty());
        }
    }

    #[test]
    fn pessimal_tie_break_never_helps_receiver() {
        let tree = designed_over_leaves();
        for k in 0..=20 {
            let prior = rat(k, 20);
            let canon = receiver_value_with(&tree, &prior, TieBreak::Canonical).unwrap();
            let pess = receiver_value_with(&tree, &prior, TieBreak::ReceiverPessimal).unwrap();
            assert!(pess <= canon, "prior {prior}: pessimal {pess} > canonical {canon}");
            // Sender value is unchanged by the tie-break.
            let s = extract_strategy_with(&tree, &prior, TieBreak::ReceiverPessimal).unwrap();
            let eval = evaluate_strategy(&tree, &s, &prior).unwrap();
            assert_eq!(eval.sender_utility, root_curve(&tree).eval(&prior));
        }
    }
}
