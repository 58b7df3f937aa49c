//! Subcommand implementations.

use std::fs;
use std::path::Path;

use num_traits::{One, Zero};

use persuasion_core::curve::ValueCurve;
use persuasion_core::dp::{
    evaluate_strategy, extract_strategy_with, receiver_value_with, root_curve, strategy_report,
    with_obedient_actions, TieBreak,
};
use persuasion_core::model::{
    check_single_phase_equivalence, expand_nonbinary, parse_tree, perturb_param, prune,
    serialize_tree, two_phase_tree, Experiment, NodePath, Param, TrialTree,
};
use persuasion_core::oracle::{enumerate_two_phase, grid_search};
use persuasion_core::rational::{format_rational, parse_rational, rat, to_decimal, Rat};
use persuasion_core::receiver::{maximin_select, CandidateSet};
use persuasion_core::twophase::{
    bbp_optimal, optimal_two_phase, persuasion_potential, thresholds, type_curve, StrategyType,
};
use persuasion_core::model::{normalize_two_phase, TreeNode};

use crate::{CliError, Command};

type CliResult = Result<(), CliError>;

const DECIMAL_DIGITS: usize = 17;

pub fn run(command: Command) -> CliResult {
    match command {
        Command::Solve {
            tree,
            prior,
            out,
            pessimal_ties,
        } => solve(&tree, prior.as_deref(), out.as_deref(), pessimal_ties),
        Command::Curve {
            tree,
            samples,
            out,
            node,
            receiver,
        } => curve(&tree, samples, &out, node.as_deref(), receiver),
        Command::TwoPhase {
            qa,
            qb,
            prior,
            bbp,
            out,
            samples,
        } => two_phase(&qa, &qb, prior.as_deref(), bbp, out.as_deref(), samples),
        Command::Prune { tree, out } => rewrite(&tree, out.as_deref(), RewriteKind::Prune),
        Command::Expand { tree, out } => rewrite(&tree, out.as_deref(), RewriteKind::Expand),
        Command::CheckEquivalence { tree } => check_equivalence(&tree),
        Command::Oracle {
            tree,
            prior,
            grid,
            refine,
        } => oracle(&tree, &prior, grid, refine),
        Command::Perturb {
            tree,
            node,
            param,
            range,
            prior,
            out,
        } => perturb(&tree, &node, &param, &range, prior.as_deref(), &out),
        Command::ReceiverSelect {
            ea,
            candidates,
            range,
            grid,
            pessimal_ties,
            out,
        } => receiver_select(&ea, &candidates, &range, grid, pessimal_ties, out.as_deref()),
        Command::Fixtures => fixtures(),
    }
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

fn validation(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn load_tree(path: &Path) -> Result<TrialTree, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| validation(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_tree(&text)?)
}

fn parse_prob(s: &str, what: &str) -> Result<Rat, CliError> {
    let r = parse_rational(s).map_err(|m| validation(format!("bad {what} `{s}`: {m}")))?;
    if r < Rat::zero() || r > Rat::one() {
        return Err(validation(format!("{what} `{s}` outside [0,1]")));
    }
    Ok(r)
}

fn resolve_prior(tree: &TrialTree, flag: Option<&str>) -> Result<Rat, CliError> {
    match flag {
        Some(s) => parse_prob(s, "prior"),
        None => tree
            .prior
            .clone()
            .ok_or_else(|| validation("no prior: the tree file carries none and --prior was not given")),
    }
}

fn parse_experiment(s: &str, what: &str) -> Result<Experiment, CliError> {
    let (q1, q2) = s
        .split_once(',')
        .ok_or_else(|| validation(format!("{what} must be \"q1,q2\", got `{s}`")))?;
    Ok(Experiment::new(
        parse_prob(q1, &format!("{what} q1"))?,
        parse_prob(q2, &format!("{what} q2"))?,
    )?)
}

fn both_forms(r: &Rat) -> (String, String) {
    (format_rational(r), to_decimal(r, DECIMAL_DIGITS))
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> CliResult {
    let mut text = String::new();
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| validation(format!("cannot write {}: {e}", path.display())))
}

fn tie_break(pessimal: bool) -> TieBreak {
    if pessimal {
        TieBreak::ReceiverPessimal
    } else {
        TieBreak::Canonical
    }
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

fn solve(tree_path: &Path, prior: Option<&str>, out: Option<&Path>, pessimal: bool) -> CliResult {
    let tree = load_tree(tree_path)?;
    let prior = resolve_prior(&tree, prior)?;
    let strategy = extract_strategy_with(&tree, &prior, tie_break(pessimal))?;
    let evaluation = evaluate_strategy(&tree, &strategy, &prior)?;
    let curve_value = root_curve(&tree).eval(&prior);
    if evaluation.sender_utility != curve_value {
        return Err(CliError::Consistency(format!(
            "extracted strategy is worth {} but the value curve says {}",
            format_rational(&evaluation.sender_utility),
            format_rational(&curve_value)
        )));
    }
    let (s_frac, s_dec) = both_forms(&evaluation.sender_utility);
    let (r_frac, r_dec) = both_forms(&evaluation.receiver_utility);
    println!("prior: {}", format_rational(&prior));
    println!("sender utility: {s_frac} ({s_dec})");
    println!("receiver utility: {r_frac} ({r_dec})");
    if !evaluation.ic_violations.is_empty() {
        println!(
            "ic violations at: {}",
            evaluation
                .ic_violations
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        );
    }
    if let Some(out) = out {
        let report = strategy_report(&strategy, &evaluation);
        fs::write(out, format!("{}\n", serde_json::to_string_pretty(&report).unwrap()))
            .map_err(|e| validation(format!("cannot write {}: {e}", out.display())))?;
        println!("report written to {}", out.display());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// curve
// ---------------------------------------------------------------------------

fn curve(tree_path: &Path, samples: usize, out: &Path, node: Option<&str>, receiver: bool) -> CliResult {
    if samples < 2 {
        return Err(validation("--samples must be at least 2"));
    }
    let tree = load_tree(tree_path)?;
    let subtree = match node {
        None => tree.clone(),
        Some(s) => {
            let path: NodePath = s.parse()?;
            let root = tree
                .root
                .resolve(&path)
                .ok_or_else(|| validation(format!("no node at path `{s}`")))?
                .clone();
            TrialTree { root, prior: None }
        }
    };
    let curve = root_curve(&subtree);
    curve
        .check_solver_invariants()
        .map_err(|m| CliError::Consistency(format!("value curve self-check failed: {m}")))?;
    let mut header = vec!["p", "value", "ratio"];
    if receiver {
        header.push("receiver");
    }
    header.extend(["p_dec", "value_dec", "ratio_dec"]);
    if receiver {
        header.push("receiver_dec");
    }
    let mut rows = Vec::with_capacity(samples);
    for (p, value, ratio) in curve.sample(samples) {
        let mut row = vec![format_rational(&p), format_rational(&value), format_rational(&ratio)];
        let recv = if receiver {
            Some(receiver_value_with(&subtree, &p, TieBreak::Canonical)?)
        } else {
            None
        };
        if let Some(r) = &recv {
            row.push(format_rational(r));
        }
        row.push(to_decimal(&p, DECIMAL_DIGITS));
        row.push(to_decimal(&value, DECIMAL_DIGITS));
        row.push(to_decimal(&ratio, DECIMAL_DIGITS));
        if let Some(r) = &recv {
            row.push(to_decimal(r, DECIMAL_DIGITS));
        }
        rows.push(row);
    }
    write_csv(out, &header, &rows)?;
    println!(
        "curve at {}: {} breakpoints, {} samples written to {}",
        node.unwrap_or("root"),
        curve.breakpoints().len(),
        samples,
        out.display()
    );
    println!(
        "breakpoints: {}",
        curve
            .breakpoints()
            .iter()
            .map(format_rational)
            .collect::<Vec<_>>()
            .join(" ")
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// two-phase
// ---------------------------------------------------------------------------

fn two_phase(
    qa: &str,
    qb: &str,
    prior: Option<&str>,
    bbp: bool,
    out: Option<&Path>,
    samples: usize,
) -> CliResult {
    if samples < 2 {
        return Err(validation("--samples must be at least 2"));
    }
    let ea_raw = parse_experiment(qa, "--qa")?;
    let eb_raw = parse_experiment(qb, "--qb")?;
    let (ea, eb, swaps) = normalize_two_phase(&ea_raw, &eb_raw);
    if !swaps.is_identity() {
        println!("normalized: A={ea} B={eb} (relabeled from A={ea_raw} B={eb_raw})");
    } else {
        println!("experiments: A={ea} B={eb}");
    }
    for (name, e) in [("A", &ea), ("B", &eb)] {
        let pot = persuasion_potential(e);
        let (alpha_low, beta_low) = thresholds(e);
        let beta_pot = pot
            .beta
            .as_ref()
            .map(|b| format!("{} ({})", format_rational(b), to_decimal(b, 6)))
            .unwrap_or_else(|| "undefined".to_string());
        println!(
            "{name}: potential=({} ({}), {}) thresholds=({} ({}), {} ({}))",
            format_rational(&pot.alpha),
            to_decimal(&pot.alpha, 6),
            beta_pot,
            format_rational(&alpha_low),
            to_decimal(&alpha_low, 6),
            format_rational(&beta_low),
            to_decimal(&beta_low, 6),
        );
    }
    let optimal = optimal_two_phase(&ea, &eb);
    let baseline = bbp_optimal(&ea, &eb);
    if let Some(p) = prior {
        let p = parse_prob(p, "prior")?;
        let opt_v = optimal.eval(&p);
        let bbp_v = baseline.eval(&p);
        let single = (rat(2, 1) * &p).min(Rat::one());
        println!(
            "at prior {}: optimal={} ({}) baseline={} ({}) single_phase={} ({})",
            format_rational(&p),
            format_rational(&opt_v),
            to_decimal(&opt_v, 6),
            format_rational(&bbp_v),
            to_decimal(&bbp_v, 6),
            format_rational(&single),
            to_decimal(&single, 6),
        );
    }
    let Some(out) = out else { return Ok(()) };
    let grid: Vec<Rat> = (0..samples)
        .map(|i| rat(i as i64, (samples - 1) as i64))
        .collect();
    if bbp {
        let header = vec![
            "p",
            "optimal",
            "bbp",
            "single_phase",
            "p_dec",
            "optimal_dec",
            "bbp_dec",
            "single_phase_dec",
        ];
        let rows: Vec<Vec<String>> = grid
            .iter()
            .map(|p| {
                let o = optimal.eval(p);
                let b = baseline.eval(p);
                let s = (rat(2, 1) * p).min(Rat::one());
                vec![
                    format_rational(p),
                    format_rational(&o),
                    format_rational(&b),
                    format_rational(&s),
                    to_decimal(p, DECIMAL_DIGITS),
                    to_decimal(&o, DECIMAL_DIGITS),
                    to_decimal(&b, DECIMAL_DIGITS),
                    to_decimal(&s, DECIMAL_DIGITS),
                ]
            })
            .collect();
        write_csv(out, &header, &rows)?;
    } else {
        let types = StrategyType::all();
        let curves: Vec<ValueCurve> = types.iter().map(|t| type_curve(t, &ea, &eb)).collect();
        let labels: Vec<String> = types.iter().map(|t| t.label()).collect();
        let mut header: Vec<String> = vec!["p".to_string()];
        header.extend(labels.iter().cloned());
        header.push("optimal".to_string());
        header.push("p_dec".to_string());
        header.extend(labels.iter().map(|l| format!("{l}_dec")));
        header.push("optimal_dec".to_string());
        let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
        let rows: Vec<Vec<String>> = grid
            .iter()
            .map(|p| {
                let vals: Vec<Rat> = curves.iter().map(|c| c.eval(p)).collect();
                let o = optimal.eval(p);
                let mut row = vec![format_rational(p)];
                row.extend(vals.iter().map(format_rational));
                row.push(format_rational(&o));
                row.push(to_decimal(p, DECIMAL_DIGITS));
                row.extend(vals.iter().map(|v| to_decimal(v, DECIMAL_DIGITS)));
                row.push(to_decimal(&o, DECIMAL_DIGITS));
                row
            })
            .collect();
        write_csv(out, &header_refs, &rows)?;
    }
    println!("table written to {}", out.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// prune / expand
// ---------------------------------------------------------------------------

enum RewriteKind {
    Prune,
    Expand,
}

fn rewrite(tree_path: &Path, out: Option<&Path>, kind: RewriteKind) -> CliResult {
    let tree = load_tree(tree_path)?;
    let result = match kind {
        RewriteKind::Prune => prune(&tree)?,
        RewriteKind::Expand => expand_nonbinary(&tree),
    };
    let text = serialize_tree(&result);
    match out {
        Some(path) => {
            fs::write(path, format!("{text}\n"))
                .map_err(|e| validation(format!("cannot write {}: {e}", path.display())))?;
            println!("written to {}", path.display());
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn check_equivalence(tree_path: &Path) -> CliResult {
    let tree = load_tree(tree_path)?;
    let report = check_single_phase_equivalence(&tree)?;
    println!(
        "condition 1 (non-trivial determined nodes have trivial/designed siblings): {}",
        if report.siblings_ok { "ok" } else { "violated" }
    );
    for p in &report.sibling_violations {
        println!("  sibling violation at {p}");
    }
    println!(
        "condition 2 (a designed node on every pruned root-to-leaf path): {}",
        if report.designed_on_every_path { "ok" } else { "violated" }
    );
    for p in &report.path_violations {
        println!("  path without designed node ends at leaf {p}");
    }
    if report.equivalent() {
        println!("verdict: PASS — sender value = min(2p, 1) at every prior");
    } else {
        println!("verdict: FAIL — not equivalent to a single unconstrained phase");
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

/// The canonical two-phase shape: designed root over two determined
/// experiments over leaves.
fn as_two_phase(tree: &TrialTree) -> Option<(Experiment, Experiment)> {
    let TreeNode::Designed { left, right } = &tree.root else {
        return None;
    };
    let det = |n: &TreeNode| match n {
        TreeNode::Determined { experiment, pass, fail } if pass.is_leaf() && fail.is_leaf() => {
            Some(experiment.clone())
        }
        _ => None,
    };
    Some((det(left)?, det(right)?))
}

fn oracle(tree_path: &Path, prior: &str, grid: u32, refine: u32) -> CliResult {
    let tree = load_tree(tree_path)?;
    let prior = parse_prob(prior, "prior")?;
    let dp_value = root_curve(&tree).eval(&prior);
    let result = grid_search(&tree, &prior, grid, refine)?;
    let (g_frac, g_dec) = both_forms(&result.best_value);
    let (d_frac, d_dec) = both_forms(&dp_value);
    println!("solver value: {d_frac} ({d_dec})");
    println!(
        "grid search (G={grid}, refine={refine}): best={g_frac} ({g_dec}) error_bound={}",
        format_rational(&result.error_bound)
    );
    for (path, (p1, p2)) in &result.best_params {
        let shown = if path.is_root() { "root".to_string() } else { path.to_string() };
        println!(
            "  best params at {shown}: ({}, {})",
            format_rational(p1),
            format_rational(p2)
        );
    }
    let mut failed = false;
    let lower_ok = dp_value >= result.best_value;
    let upper_ok = dp_value <= &result.best_value + &result.error_bound;
    println!(
        "dominance (solver >= grid): {}",
        if lower_ok { "PASS" } else { "FAIL" }
    );
    println!(
        "bound (solver <= grid + error_bound): {}",
        if upper_ok { "PASS" } else { "FAIL" }
    );
    failed |= !lower_ok || !upper_ok;
    if let Some((ea, eb)) = as_two_phase(&tree) {
        let exact = enumerate_two_phase(&ea, &eb, &prior);
        let (e_frac, e_dec) = both_forms(&exact.best_value);
        println!("threshold enumeration: best={e_frac} ({e_dec})");
        let equal = exact.best_value == dp_value;
        println!(
            "exactness (solver == enumeration): {}",
            if equal { "PASS" } else { "FAIL" }
        );
        failed |= !equal;
    }
    if failed {
        return Err(CliError::Consistency(
            "oracle checks failed; see output above".to_string(),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// perturb
// ---------------------------------------------------------------------------

fn perturb(
    tree_path: &Path,
    node: &str,
    param: &str,
    range: &str,
    prior: Option<&str>,
    out: &Path,
) -> CliResult {
    let tree = load_tree(tree_path)?;
    let prior = resolve_prior(&tree, prior)?;
    let path: NodePath = node.parse()?;
    let which: Param = param.parse()?;
    let parts: Vec<&str> = range.split(',').collect();
    if parts.len() != 3 {
        return Err(validation("--range must be \"lo,hi,steps\""));
    }
    let lo = parse_prob(parts[0], "range low")?;
    let hi = parse_prob(parts[1], "range high")?;
    let steps: usize = parts[2]
        .parse()
        .map_err(|_| validation(format!("bad step count `{}`", parts[2])))?;
    if steps == 0 || (steps == 1 && lo != hi) || lo > hi {
        return Err(validation("range needs lo <= hi and steps >= 1 (steps = 1 only when lo = hi)"));
    }

    // The commitment frozen at the unperturbed tree. Only the sender is
    // frozen: on each perturbed tree the receiver re-best-responds, with
    // ties following the frozen recommendations.
    let frozen = extract_strategy_with(&tree, &prior, TieBreak::Canonical)?;
    let original_value = root_curve(&tree).eval(&prior);

    let header = vec![
        "value",
        "resolved_utility",
        "frozen_utility",
        "value_dec",
        "resolved_utility_dec",
        "frozen_utility_dec",
    ];
    let mut rows = Vec::with_capacity(steps);
    for k in 0..steps {
        let value = if steps == 1 {
            lo.clone()
        } else {
            &lo + (&hi - &lo) * rat(k as i64, (steps - 1) as i64)
        };
        let perturbed = perturb_param(&tree, &path, which, value.clone())?;
        let resolved = root_curve(&perturbed).eval(&prior);
        let responded = with_obedient_actions(&perturbed, &frozen, &prior)?;
        let frozen_value = evaluate_strategy(&perturbed, &responded, &prior)?.sender_utility;
        if frozen_value > resolved {
            return Err(CliError::Consistency(format!(
                "frozen strategy is worth {} but re-solving gives {} at perturbed value {}",
                format_rational(&frozen_value),
                format_rational(&resolved),
                format_rational(&value)
            )));
        }
        if perturbed == tree && frozen_value != original_value {
            return Err(CliError::Consistency(
                "frozen strategy does not recover the original optimum at zero perturbation"
                    .to_string(),
            ));
        }
        rows.push(vec![
            format_rational(&value),
            format_rational(&resolved),
            format_rational(&frozen_value),
            to_decimal(&value, DECIMAL_DIGITS),
            to_decimal(&resolved, DECIMAL_DIGITS),
            to_decimal(&frozen_value, DECIMAL_DIGITS),
        ]);
    }
    write_csv(out, &header, &rows)?;
    println!("{steps} perturbation rows written to {}", out.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// receiver-select
// ---------------------------------------------------------------------------

fn receiver_select(
    ea: &str,
    candidates_path: &Path,
    range: &str,
    grid: usize,
    pessimal: bool,
    out: Option<&Path>,
) -> CliResult {
    let fixed = parse_experiment(ea, "--ea")?;
    let text = fs::read_to_string(candidates_path)
        .map_err(|e| validation(format!("cannot read {}: {e}", candidates_path.display())))?;
    let mut candidates = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        candidates.push(
            parse_experiment(line, &format!("candidate on line {}", lineno + 1))
                .map_err(|e| match e {
                    CliError::Validation(m) => validation(m),
                    other => other,
                })?,
        );
    }
    let (a, b) = range
        .split_once(',')
        .ok_or_else(|| validation(format!("--range must be \"a,b\", got `{range}`")))?;
    let range = (parse_prob(a, "range low")?, parse_prob(b, "range high")?);
    let set = CandidateSet::new(fixed, candidates, range)?;
    let (winner, worst, rows) = maximin_select(&set, grid, tie_break(pessimal))?;
    let header = vec![
        "q1",
        "q2",
        "worst_case",
        "worst_at",
        "q1_dec",
        "q2_dec",
        "worst_case_dec",
        "worst_at_dec",
    ];
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|row| {
            vec![
                format_rational(&row.experiment.q1),
                format_rational(&row.experiment.q2),
                format_rational(&row.worst_case),
                format_rational(&row.worst_at),
                to_decimal(&row.experiment.q1, DECIMAL_DIGITS),
                to_decimal(&row.experiment.q2, DECIMAL_DIGITS),
                to_decimal(&row.worst_case, DECIMAL_DIGITS),
                to_decimal(&row.worst_at, DECIMAL_DIGITS),
            ]
        })
        .collect();
    match out {
        Some(path) => {
            write_csv(path, &header, &table)?;
            println!("table written to {}", path.display());
        }
        None => {
            println!("{}", header.join(","));
            for row in &table {
                println!("{}", row.join(","));
            }
        }
    }
    let (w_frac, w_dec) = both_forms(&worst);
    println!("winner: {winner} worst-case receiver utility {w_frac} ({w_dec})");
    Ok(())
}

// ---------------------------------------------------------------------------
// fixtures
// ---------------------------------------------------------------------------

struct FixtureReport {
    failures: usize,
    discrepancies: usize,
}

impl FixtureReport {
    fn check(&mut self, name: &str, ok: bool, detail: String) {
        if ok {
            println!("ok          {name}: {detail}");
        } else {
            println!("FAIL        {name}: {detail}");
            self.failures += 1;
        }
    }

    fn reference(&mut self, name: &str, computed: String, reference: &str) {
        if computed == reference {
            println!("ok          {name}: computed {computed} matches reference {reference}");
        } else {
            println!(
                "DISCREPANCY {name}: computed {computed}, reference states {reference} \
                 (documented in KNOWN_DISCREPANCIES.md)"
            );
            self.discrepancies += 1;
        }
    }
}

/// Built-in checks against the reference values this solver was
/// validated with. Mismatches against reference values are reported and
/// logged, not failed; internal cross-check failures exit with status 3.
fn fixtures() -> CliResult {
    let mut report = FixtureReport {
        failures: 0,
        discrepancies: 0,
    };
    let e = |q1: (i64, i64), q2: (i64, i64)| Experiment {
        q1: rat(q1.0, q1.1),
        q2: rat(q2.0, q2.1),
    };

    // Persuasion potentials.
    let pot = persuasion_potential(&e((4, 5), (1, 2)));
    report.check(
        "potential (4/5, 1/2)",
        pot.alpha == rat(8, 5) && pot.beta == Some(rat(7, 5)),
        format!(
            "({}, {})",
            format_rational(&pot.alpha),
            pot.beta.map(|b| format_rational(&b)).unwrap_or_default()
        ),
    );
    let pot = persuasion_potential(&e((3, 4), (3, 20)));
    report.reference(
        "potential beta (3/4, 3/20)",
        pot.beta.map(|b| format_rational(&b)).unwrap_or_default(),
        "9/7",
    );

    // Efficient interim thresholds.
    let (alpha_low, beta_low) = thresholds(&e((4, 5), (1, 2)));
    report.check(
        "thresholds (4/5, 1/2)",
        alpha_low == rat(5, 13) && beta_low == rat(5, 7),
        format!("({}, {})", format_rational(&alpha_low), format_rational(&beta_low)),
    );

    // Trade-off pair: committed reference strategy is worth exactly 41/46.
    let tree = two_phase_tree(&e((4, 5), (1, 2)), &e((3, 4), (3, 20)));
    let prior = rat(2, 3);
    let mut strategy = extract_strategy_with(&tree, &prior, TieBreak::Canonical)?;
    strategy.designed.insert(
        NodePath::root(),
        (rat(5, 46) / rat(2, 3), rat(8, 46) / rat(1, 3)),
    );
    let strategy = with_obedient_actions(&tree, &strategy, &prior)?;
    let committed = evaluate_strategy(&tree, &strategy, &prior)?;
    report.check(
        "trade-off committed strategy at prior 2/3",
        committed.sender_utility == rat(41, 46),
        format_rational(&committed.sender_utility),
    );

    // Trade-off pair: solver optimum versus the stated reference optimum.
    let dp_value = root_curve(&tree).eval(&prior);
    let exact = enumerate_two_phase(&e((4, 5), (1, 2)), &e((3, 4), (3, 20)), &prior);
    report.check(
        "trade-off enumeration agrees with solver",
        exact.best_value == dp_value,
        format!(
            "solver {} vs enumeration {}",
            format_rational(&dp_value),
            format_rational(&exact.best_value)
        ),
    );
    let grid = grid_search(&tree, &prior, 200, 3)?;
    report.check(
        "trade-off grid oracle within bound",
        dp_value >= grid.best_value && dp_value <= &grid.best_value + &grid.error_bound,
        format!(
            "solver {} grid {} bound {}",
            format_rational(&dp_value),
            format_rational(&grid.best_value),
            format_rational(&grid.error_bound)
        ),
    );
    report.reference("trade-off optimal value at prior 2/3", format_rational(&dp_value), "157/168");

    // Benchmark pair landmarks.
    let optimal = optimal_two_phase(&e((4, 5), (1, 5)), &e((7, 10), (3, 10)));
    let baseline = bbp_optimal(&e((4, 5), (1, 5)), &e((7, 10), (3, 10)));
    report.check(
        "benchmark pair saturates at prior 7/10",
        optimal.eval(&rat(7, 10)) == Rat::one() && optimal.eval(&rat(69, 100)) < Rat::one(),
        format!(
            "optimal(7/10)={} optimal(69/100)={}",
            format_rational(&optimal.eval(&rat(7, 10))),
            format_rational(&optimal.eval(&rat(69, 100)))
        ),
    );
    report.check(
        "benchmark pair baseline gap at prior 1/2",
        baseline.eval(&rat(1, 2)) < optimal.eval(&rat(1, 2)),
        format!(
            "optimal {} vs baseline {}",
            format_rational(&optimal.eval(&rat(1, 2))),
            format_rational(&baseline.eval(&rat(1, 2)))
        ),
    );

    // Receiver selection worked example.
    let set = CandidateSet::new(
        e((7, 10), (1, 2)),
        vec![e((2, 3), (5, 12)), e((9, 10), (4, 5))],
        (rat(1, 10), rat(9, 10)),
    )?;
    let (winner, _, _) = maximin_select(&set, 21, TieBreak::Canonical)?;
    report.reference(
        "receiver selection winner (fixed (7/10, 1/2), range [1/10, 9/10])",
        format!("{winner}"),
        "(2/3,5/12)",
    );

    println!(
        "fixtures complete: {} reference discrepancies, {} failures",
        report.discrepancies, report.failures
    );
    if report.failures > 0 {
        return Err(CliError::Consistency(format!(
            "{} fixture checks failed",
            report.failures
        )));
    }
    Ok(())
}
