//! Trial trees and experiments.
//!
//! A multi-phase trial is a rooted tree. Interior nodes carry experiments:
//! either exogenously *determined* (binary or n-ary pass probabilities per
//! state) or *designed* (the sender picks the per-state split when
//! committing to a strategy). Leaves are terminal outcomes at which the
//! receiver acts on the realized posterior.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::rational::{format_rational, in_unit_interval, parse_rational, Rat};

/// Binary-outcome experiment: pass probability per state of the world.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Experiment {
    /// P(pass | state 1)
    pub q1: Rat,
    /// P(pass | state 2)
    pub q2: Rat,
}

impl Experiment {
    pub fn new(q1: Rat, q2: Rat) -> Result<Self> {
        if !in_unit_interval(&q1) || !in_unit_interval(&q2) {
            return Err(Error::ValueOutOfRange);
        }
        Ok(Experiment { q1, q2 })
    }

    /// Outcome distribution independent of the state (Blackwell non-informative).
    pub fn is_trivial(&self) -> bool {
        self.q1 == self.q2
    }

    /// The fully revealing experiment (1, 0).
    pub fn revealing() -> Self {
        Experiment {
            q1: Rat::one(),
            q2: Rat::zero(),
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{})",
            format_rational(&self.q1),
            format_rational(&self.q2)
        )
    }
}

/// Experiment with `n >= 2` outcomes; each row is the outcome
/// distribution conditional on one state and must sum to exactly 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaryExperiment {
    pub q1: Vec<Rat>,
    pub q2: Vec<Rat>,
}

impl NaryExperiment {
    pub fn new(q1: Vec<Rat>, q2: Vec<Rat>) -> Result<Self> {
        if q1.len() != q2.len() || q1.len() < 2 {
            return Err(Error::invalid("n-ary experiment needs matching rows of length >= 2"));
        }
        for v in q1.iter().chain(q2.iter()) {
            if !in_unit_interval(v) {
                return Err(Error::ValueOutOfRange);
            }
        }
        let one = Rat::one();
        if q1.iter().sum::<Rat>() != one || q2.iter().sum::<Rat>() != one {
            return Err(Error::invalid("n-ary outcome rows must each sum to 1"));
        }
        Ok(NaryExperiment { q1, q2 })
    }

    pub fn arity(&self) -> usize {
        self.q1.len()
    }
}

/// One node of a trial tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeNode {
    /// Terminal outcome; the receiver acts here.
    Leaf,
    /// Exogenously fixed binary experiment.
    Determined {
        experiment: Experiment,
        pass: Box<TreeNode>,
        fail: Box<TreeNode>,
    },
    /// Exogenously fixed n-ary experiment; `children.len() == arity`.
    DeterminedNary {
        experiment: NaryExperiment,
        children: Vec<TreeNode>,
    },
    /// Sender-designed binary experiment.
    Designed { left: Box<TreeNode>, right: Box<TreeNode> },
}

impl TreeNode {
    pub fn determined(experiment: Experiment, pass: TreeNode, fail: TreeNode) -> Self {
        TreeNode::Determined {
            experiment,
            pass: Box::new(pass),
            fail: Box::new(fail),
        }
    }

    pub fn designed(left: TreeNode, right: TreeNode) -> Self {
        TreeNode::Designed {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn children(&self) -> Vec<&TreeNode> {
        match self {
            TreeNode::Leaf => Vec::new(),
            TreeNode::Determined { pass, fail, .. } => vec![pass, fail],
            TreeNode::DeterminedNary { children, .. } => children.iter().collect(),
            TreeNode::Designed { left, right } => vec![left, right],
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, TreeNode::Leaf)
    }

    /// Node addressed by `path`, if it exists.
    pub fn resolve(&self, path: &NodePath) -> Option<&TreeNode> {
        let mut node = self;
        for &idx in &path.0 {
            node = *node.children().get(idx)?;
        }
        Some(node)
    }

    /// Number of designed nodes in the subtree.
    pub fn designed_count(&self) -> usize {
        let own = usize::from(matches!(self, TreeNode::Designed { .. }));
        own + self.children().iter().map(|c| c.designed_count()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self
            .children()
            .iter()
            .map(|c| c.depth())
            .max()
            .unwrap_or(0)
    }

    pub fn contains_nary(&self) -> bool {
        matches!(self, TreeNode::DeterminedNary { .. })
            || self.children().iter().any(|c| c.contains_nary())
    }
}

/// A trial: the experiment tree plus an optional prior on state 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialTree {
    pub root: TreeNode,
    pub prior: Option<Rat>,
}

impl TrialTree {
    pub fn new(root: TreeNode, prior: Option<Rat>) -> Result<Self> {
        if let Some(p) = &prior {
            if !in_unit_interval(p) {
                return Err(Error::PriorOutOfRange);
            }
        }
        Ok(TrialTree { root, prior })
    }
}

/// Sequence of outcome indices from the root (0 = pass/left, 1 = fail/right).
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodePath(pub Vec<usize>);

impl NodePath {
    pub fn root() -> Self {
        NodePath(Vec::new())
    }

    pub fn child(&self, idx: usize) -> Self {
        let mut v = self.0.clone();
        v.push(idx);
        NodePath(v)
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for NodePath {
    /// Dotted outcome indices; the empty path (the root) renders as "".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

impl FromStr for NodePath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "root" {
            return Ok(NodePath::root());
        }
        let mut out = Vec::new();
        for part in s.split('.') {
            let idx: usize = part
                .parse()
                .map_err(|_| Error::invalid(format!("bad node path `{s}`")))?;
            out.push(idx);
        }
        Ok(NodePath(out))
    }
}

// ---------------------------------------------------------------------------
// Parsing and serialization
// ---------------------------------------------------------------------------

fn parse_err(path: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        message: message.into(),
    }
}

fn probability_at(value: &Value, path: &str) -> Result<Rat> {
    let s = value
        .as_str()
        .ok_or_else(|| parse_err(path, "expected a rational string"))?;
    let r = parse_rational(s).map_err(|m| parse_err(path, m))?;
    if !in_unit_interval(&r) {
        return Err(Error::ProbabilityOutOfRange {
            path: path.to_string(),
        });
    }
    Ok(r)
}

fn node_from_value(value: &Value, path: &str) -> Result<TreeNode> {
    let obj = value
        .as_object()
        .ok_or_else(|| parse_err(path, "expected an object"))?;
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| parse_err(path, "missing `kind`"))?;
    match kind {
        "leaf" => Ok(TreeNode::Leaf),
        "designed" => {
            let left = obj
                .get("left")
                .ok_or_else(|| parse_err(path, "missing `left`"))?;
            let right = obj
                .get("right")
                .ok_or_else(|| parse_err(path, "missing `right`"))?;
            Ok(TreeNode::designed(
                node_from_value(left, &format!("{path}.left"))?,
                node_from_value(right, &format!("{path}.right"))?,
            ))
        }
        "determined" => {
            let q1 = probability_at(
                obj.get("q1").ok_or_else(|| parse_err(path, "missing `q1`"))?,
                path,
            )?;
            let q2 = probability_at(
                obj.get("q2").ok_or_else(|| parse_err(path, "missing `q2`"))?,
                path,
            )?;
            let pass = obj
                .get("pass")
                .ok_or_else(|| parse_err(path, "missing `pass`"))?;
            let fail = obj
                .get("fail")
                .ok_or_else(|| parse_err(path, "missing `fail`"))?;
            Ok(TreeNode::determined(
                Experiment { q1, q2 },
                node_from_value(pass, &format!("{path}.pass"))?,
                node_from_value(fail, &format!("{path}.fail"))?,
            ))
        }
        "determined_nary" => {
            let row = |key: &str| -> Result<Vec<Rat>> {
                let arr = obj
                    .get(key)
                    .and_then(Value::as_array)
                    .ok_or_else(|| parse_err(path, format!("missing array `{key}`")))?;
                arr.iter()
                    .enumerate()
                    .map(|(i, v)| probability_at(v, &format!("{path}.{key}[{i}]")))
                    .collect()
            };
            let q1 = row("q1")?;
            let q2 = row("q2")?;
            if q1.len() != q2.len() || q1.len() < 2 {
                return Err(Error::ArityMismatch {
                    path: path.to_string(),
                });
            }
            let one = Rat::one();
            if q1.iter().sum::<Rat>() != one || q2.iter().sum::<Rat>() != one {
                return Err(Error::DistributionNotNormalized {
                    path: path.to_string(),
                });
            }
            let children_v = obj
                .get("children")
                .and_then(Value::as_array)
                .ok_or_else(|| parse_err(path, "missing array `children`"))?;
            if children_v.len() != q1.len() {
                return Err(Error::ArityMismatch {
                    path: path.to_string(),
                });
            }
            let children = children_v
                .iter()
                .enumerate()
                .map(|(i, v)| node_from_value(v, &format!("{path}.children[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            Ok(TreeNode::DeterminedNary {
                experiment: NaryExperiment { q1, q2 },
                children,
            })
        }
        other => Err(parse_err(path, format!("unknown node kind `{other}`"))),
    }
}

/// Parse a UTF-8 tree document (JSON syntax, rationals as strings).
pub fn parse_tree(document: &str) -> Result<TrialTree> {
    let value: Value =
        serde_json::from_str(document).map_err(|e| parse_err("root", e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| parse_err("root", "expected a top-level object"))?;
    let prior = match obj.get("prior") {
        None | Some(Value::Null) => None,
        Some(v) => Some(probability_at(v, "prior")?),
    };
    let root = node_from_value(
        obj.get("root").ok_or_else(|| parse_err("root", "missing `root`"))?,
        "root",
    )?;
    Ok(TrialTree { root, prior })
}

fn node_to_value(node: &TreeNode) -> Value {
    match node {
        TreeNode::Leaf => json!({"kind": "leaf"}),
        TreeNode::Designed { left, right } => json!({
            "kind": "designed",
            "left": node_to_value(left),
            "right": node_to_value(right),
        }),
        TreeNode::Determined {
            experiment,
            pass,
            fail,
        } => json!({
            "kind": "determined",
            "q1": format_rational(&experiment.q1),
            "q2": format_rational(&experiment.q2),
            "pass": node_to_value(pass),
            "fail": node_to_value(fail),
        }),
        TreeNode::DeterminedNary {
            experiment,
            children,
        } => json!({
            "kind": "determined_nary",
            "q1": experiment.q1.iter().map(format_rational).collect::<Vec<_>>(),
            "q2": experiment.q2.iter().map(format_rational).collect::<Vec<_>>(),
            "children": children.iter().map(node_to_value).collect::<Vec<_>>(),
        }),
    }
}

/// Serialize back to the tree-file schema (rationals in `a/b` form).
pub fn serialize_tree(tree: &TrialTree) -> String {
    let mut top = Map::new();
    if let Some(p) = &tree.prior {
        top.insert("prior".to_string(), Value::String(format_rational(p)));
    }
    top.insert("root".to_string(), node_to_value(&tree.root));
    serde_json::to_string_pretty(&Value::Object(top)).expect("tree serialization")
}

// ---------------------------------------------------------------------------
// Two-phase WLOG normalization
// ---------------------------------------------------------------------------

/// Which relabelings [`normalize_two_phase`] applied, so strategies for the
/// normalized pair can be mapped back to the original one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SwapRecord {
    /// Pass/fail labels of the first input experiment were exchanged.
    pub outcomes_swapped_first: bool,
    /// Pass/fail labels of the second input experiment were exchanged.
    pub outcomes_swapped_second: bool,
    /// The two experiments traded places (applied after the outcome swaps).
    pub roles_swapped: bool,
}

impl SwapRecord {
    pub fn is_identity(&self) -> bool {
        *self == SwapRecord::default()
    }
}

/// Relabel outcome names so both experiments satisfy q1 >= q2, then order
/// the pair so the first is weakly more informative at state 1.
///
/// Swapping pass and fail replaces (q1, q2) by (1-q1, 1-q2), which leaves
/// every posterior attached to the renamed outcomes unchanged.
pub fn normalize_two_phase(ea: &Experiment, eb: &Experiment) -> (Experiment, Experiment, SwapRecord) {
    let mut record = SwapRecord::default();
    let flip = |e: &Experiment| Experiment {
        q1: Rat::one() - &e.q1,
        q2: Rat::one() - &e.q2,
    };
    let mut a = ea.clone();
    let mut b = eb.clone();
    if a.q1 < a.q2 {
        a = flip(&a);
        record.outcomes_swapped_first = true;
    }
    if b.q1 < b.q2 {
        b = flip(&b);
        record.outcomes_swapped_second = true;
    }
    if a.q1 < b.q1 {
        std::mem::swap(&mut a, &mut b);
        record.roles_swapped = true;
    }
    (a, b, record)
}

// ---------------------------------------------------------------------------
// Non-binary expansion
// ---------------------------------------------------------------------------

/// Replace every n-ary node by at most ceil(log2 n) levels of binary
/// determined nodes while preserving, per state, the joint probability of
/// reaching each original outcome subtree.
pub fn expand_nonbinary(tree: &TrialTree) -> TrialTree {
    TrialTree {
        root: expand_node(&tree.root),
        prior: tree.prior.clone(),
    }
}

fn expand_node(node: &TreeNode) -> TreeNode {
    match node {
        TreeNode::Leaf => TreeNode::Leaf,
        TreeNode::Designed { left, right } => {
            TreeNode::designed(expand_node(left), expand_node(right))
        }
        TreeNode::Determined {
            experiment,
            pass,
            fail,
        } => TreeNode::determined(experiment.clone(), expand_node(pass), expand_node(fail)),
        TreeNode::DeterminedNary {
            experiment,
            children,
        } => {
            let expanded: Vec<TreeNode> = children.iter().map(expand_node).collect();
            let entries: Vec<(Rat, Rat, TreeNode)> = experiment
                .q1
                .iter()
                .zip(experiment.q2.iter())
                .zip(expanded)
                .map(|((a, b), c)| (a.clone(), b.clone(), c))
                .collect();
            split_group(&entries)
        }
    }
}

/// Binary split of a group of outcomes. The split point is the largest
/// power of two below the group size, so the result has minimal depth.
/// A group with zero mass under both states keeps parameters (0, 0);
/// that subtree is unreachable, so the choice is behavior-preserving.
fn split_group(entries: &[(Rat, Rat, TreeNode)]) -> TreeNode {
    if entries.len() == 1 {
        return entries[0].2.clone();
    }
    let n = entries.len();
    let mut h = 1usize;
    while h * 2 < n {
        h *= 2;
    }
    let (left, right) = entries.split_at(h);
    let sum = |xs: &[(Rat, Rat, TreeNode)]| -> (Rat, Rat) {
        xs.iter().fold((Rat::zero(), Rat::zero()), |(s1, s2), (a, b, _)| {
            (s1 + a, s2 + b)
        })
    };
    let (l1, l2) = sum(left);
    let (t1, t2) = sum(entries);
    let q1 = if t1.is_zero() { Rat::zero() } else { l1 / &t1 };
    let q2 = if t2.is_zero() { Rat::zero() } else { l2 / &t2 };
    TreeNode::determined(Experiment { q1, q2 }, split_group(left), split_group(right))
}

// ---------------------------------------------------------------------------
// Pruning and single-phase equivalence
// ---------------------------------------------------------------------------

/// Bottom-up replacement of every subtree rooted at a trivial determined
/// node with at least one non-trivial determined child by the revealing
/// experiment (1,0) over two leaves. The result may be unbalanced.
pub fn prune(tree: &TrialTree) -> Result<TrialTree> {
    Ok(TrialTree {
        root: prune_node(&tree.root, &NodePath::root())?,
        prior: tree.prior.clone(),
    })
}

fn prune_node(node: &TreeNode, path: &NodePath) -> Result<TreeNode> {
    match node {
        TreeNode::Leaf => Ok(TreeNode::Leaf),
        TreeNode::DeterminedNary { .. } => Err(Error::NonBinaryNode {
            path: path.to_string(),
        }),
        TreeNode::Designed { left, right } => Ok(TreeNode::designed(
            prune_node(left, &path.child(0))?,
            prune_node(right, &path.child(1))?,
        )),
        TreeNode::Determined {
            experiment,
            pass,
            fail,
        } => {
            let pass = prune_node(pass, &path.child(0))?;
            let fail = prune_node(fail, &path.child(1))?;
            let nontrivial_det = |n: &TreeNode| {
                matches!(n, TreeNode::Determined { experiment, .. } if !experiment.is_trivial())
            };
            if experiment.is_trivial() && (nontrivial_det(&pass) || nontrivial_det(&fail)) {
                Ok(TreeNode::determined(
                    Experiment::revealing(),
                    TreeNode::Leaf,
                    TreeNode::Leaf,
                ))
            } else {
                Ok(TreeNode::determined(experiment.clone(), pass, fail))
            }
        }
    }
}

/// Outcome of [`check_single_phase_equivalence`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceReport {
    /// Every non-trivial determined node in the pruned tree has a trivial,
    /// designed or leaf sibling.
    pub siblings_ok: bool,
    /// Every root-to-leaf path of the pruned tree passes a designed node.
    pub designed_on_every_path: bool,
    /// Paths of nodes violating the sibling condition.
    pub sibling_violations: Vec<NodePath>,
    /// Leaf paths of the pruned tree missing a designed ancestor.
    pub path_violations: Vec<NodePath>,
}

impl EquivalenceReport {
    /// Both conditions hold, so the sender value equals min(2p, 1).
    pub fn equivalent(&self) -> bool {
        self.siblings_ok && self.designed_on_every_path
    }
}

/// Check, on the pruned tree, the two conditions under which the trial is
/// worth exactly the single-phase value min(2p, 1) to the sender.
pub fn check_single_phase_equivalence(tree: &TrialTree) -> Result<EquivalenceReport> {
    let pruned = prune(tree)?;
    let mut report = EquivalenceReport {
        siblings_ok: true,
        designed_on_every_path: true,
        sibling_violations: Vec::new(),
        path_violations: Vec::new(),
    };
    check_siblings(&pruned.root, &NodePath::root(), &mut report);
    check_paths(&pruned.root, &NodePath::root(), false, &mut report);
    Ok(report)
}

fn check_siblings(node: &TreeNode, path: &NodePath, report: &mut EquivalenceReport) {
    let kids = node.children();
    if kids.len() == 2 {
        for (i, child) in kids.iter().enumerate() {
            if let TreeNode::Determined { experiment, .. } = child {
                if !experiment.is_trivial() {
                    let sibling = kids[1 - i];
                    let sibling_ok = match sibling {
                        TreeNode::Determined { experiment, .. } => experiment.is_trivial(),
                        TreeNode::Designed { .. } | TreeNode::Leaf => true,
                        TreeNode::DeterminedNary { .. } => false,
                    };
                    if !sibling_ok {
                        report.siblings_ok = false;
                        report.sibling_violations.push(path.child(i));
                    }
                }
            }
        }
    }
    for (i, child) in kids.iter().enumerate() {
        check_siblings(child, &path.child(i), report);
    }
}

fn check_paths(node: &TreeNode, path: &NodePath, seen_designed: bool, report: &mut EquivalenceReport) {
    match node {
        TreeNode::Leaf => {
            if !seen_designed {
                report.designed_on_every_path = false;
                report.path_violations.push(path.clone());
            }
        }
        _ => {
            let seen = seen_designed || matches!(node, TreeNode::Designed { .. });
            for (i, child) in node.children().iter().enumerate() {
                check_paths(child, &path.child(i), seen, report);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Parameter perturbation
// ---------------------------------------------------------------------------

/// Which parameter of a determined node to perturb.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Param {
    Q1,
    Q2,
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "q1" => Ok(Param::Q1),
            "q2" => Ok(Param::Q2),
            other => Err(Error::invalid(format!("unknown parameter `{other}`"))),
        }
    }
}

/// Copy of the tree with one determined-node parameter replaced.
pub fn perturb_param(tree: &TrialTree, path: &NodePath, which: Param, value: Rat) -> Result<TrialTree> {
    if !in_unit_interval(&value) {
        return Err(Error::ValueOutOfRange);
    }
    let mut root = tree.root.clone();
    {
        let mut node = &mut root;
        for &idx in &path.0 {
            let next = match node {
                TreeNode::Determined { pass, fail, .. } => match idx {
                    0 => Some(pass.as_mut()),
                    1 => Some(fail.as_mut()),
                    _ => None,
                },
                TreeNode::Designed { left, right } => match idx {
                    0 => Some(left.as_mut()),
                    1 => Some(right.as_mut()),
                    _ => None,
                },
                TreeNode::DeterminedNary { children, .. } => children.get_mut(idx),
                TreeNode::Leaf => None,
            };
            node = next.ok_or_else(|| Error::PathNotFound {
                path: path.to_string(),
            })?;
        }
        match node {
            TreeNode::Determined { experiment, .. } => match which {
                Param::Q1 => experiment.q1 = value,
                Param::Q2 => experiment.q2 = value,
            },
            _ => {
                return Err(Error::NotDeterminedNode {
                    path: path.to_string(),
                })
            }
        }
    }
    TrialTree::new(root, tree.prior.clone())
}

/// Designed parameters keyed by node path; used by strategies and oracles.
pub type ParamMap = BTreeMap<NodePath, (Rat, Rat)>;

/// The canonical two-phase trial: a designed root over two determined
/// experiments, each over leaves.
pub fn two_phase_tree(ea: &Experiment, eb: &Experiment) -> TrialTree {
    TrialTree {
        root: TreeNode::designed(
            TreeNode::determined(ea.clone(), TreeNode::Leaf, TreeNode::Leaf),
            TreeNode::determined(eb.clone(), TreeNode::Leaf, TreeNode::Leaf),
        ),
        prior: None,
    }
}
