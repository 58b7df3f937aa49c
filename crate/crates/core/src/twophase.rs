//! Analytic machinery for two-phase trials.
//!
//! With one sender-designed phase over two determined experiments, the
//! sender's options at each branch collapse to three induced patterns:
//! recommend the preferred action only on a pass (alpha), always (beta),
//! or never (gamma). Each of the nine pattern pairs has a closed-form
//! value curve, and the optimum is their upper envelope. The whole module
//! is cross-checked against the backward-induction solver, which must
//! agree exactly on the equivalent three-level tree.

use crate::curve::{designed_combine_curve, pointwise_max, ValueCurve};
use crate::error::{Error, Result};
use crate::model::Experiment;
use crate::rational::{format_rational, half, rat, Rat};
use num_traits::{One, Signed, Zero};

/// Phase-II persuasion pattern at one branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum InducedKind {
    /// Recommend the preferred action only when the experiment passes.
    Alpha,
    /// Recommend it regardless of the outcome.
    Beta,
    /// Never recommend it.
    Gamma,
}

impl InducedKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            InducedKind::Alpha => "alpha",
            InducedKind::Beta => "beta",
            InducedKind::Gamma => "gamma",
        }
    }
}

/// Which phase-II branch a pattern applies to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// One induced pattern on one side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InducedStrategy {
    pub kind: InducedKind,
    pub side: Side,
}

/// A pattern pair (c_A, d_B); nine combinations in total.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StrategyType {
    pub a: InducedKind,
    pub b: InducedKind,
}

impl StrategyType {
    pub fn new(a: InducedKind, b: InducedKind) -> Self {
        StrategyType { a, b }
    }

    pub fn all() -> [StrategyType; 9] {
        use InducedKind::*;
        [
            StrategyType::new(Alpha, Alpha),
            StrategyType::new(Alpha, Beta),
            StrategyType::new(Alpha, Gamma),
            StrategyType::new(Beta, Alpha),
            StrategyType::new(Beta, Beta),
            StrategyType::new(Beta, Gamma),
            StrategyType::new(Gamma, Alpha),
            StrategyType::new(Gamma, Beta),
            StrategyType::new(Gamma, Gamma),
        ]
    }

    pub fn label(&self) -> String {
        format!("{}_{}", self.a.as_str(), self.b.as_str())
    }
}

/// Best relative utilities an experiment can offer: 2*q1 through the
/// alpha pattern at its most efficient interim, 1 + (1-q1)/(1-q2)
/// through beta. The beta entry is undefined when q2 = 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PersuasionPotential {
    pub alpha: Rat,
    pub beta: Option<Rat>,
}

/// Persuasion potential of a normalized experiment (q1 >= q2).
pub fn persuasion_potential(e: &Experiment) -> PersuasionPotential {
    debug_assert!(e.q1 >= e.q2, "experiment must be normalized");
    let one = Rat::one();
    let alpha = rat(2, 1) * &e.q1;
    let beta = if e.q2.is_one() {
        None
    } else {
        Some(&one + (&one - &e.q1) / (&one - &e.q2))
    };
    PersuasionPotential { alpha, beta }
}

/// Most efficient interim beliefs: the alpha pattern puts the pass
/// posterior exactly at 1/2 when the interim is q2/(q1+q2), the beta
/// pattern puts the fail posterior there at (1-q2)/(2-q1-q2).
/// Degenerate experiments (0,0) and (1,1) return (1/2, 1/2) by
/// convention, matching a trivial experiment.
pub fn thresholds(e: &Experiment) -> (Rat, Rat) {
    debug_assert!(e.q1 >= e.q2, "experiment must be normalized");
    if is_degenerate(e) {
        return (half(), half());
    }
    let one = Rat::one();
    let two = rat(2, 1);
    let alpha_low = &e.q2 / (&e.q1 + &e.q2);
    let beta_low = (&one - &e.q2) / (&two - &e.q1 - &e.q2);
    (alpha_low, beta_low)
}

fn is_degenerate(e: &Experiment) -> bool {
    (e.q1.is_zero() && e.q2.is_zero()) || (e.q1.is_one() && e.q2.is_one())
}

/// Primary incentive-compatibility requirement of one induced pattern,
/// written cross-multiplied so no parameter range is excluded.
pub fn ic_requirement(
    induced: InducedStrategy,
    e_a: &Experiment,
    e_b: &Experiment,
    p: &Rat,
    p1: &Rat,
    p2: &Rat,
) -> Result<bool> {
    if !p.is_positive() || *p >= Rat::one() {
        return Err(Error::IcUndefinedAtPrior {
            prior: format_rational(p),
        });
    }
    let one = Rat::one();
    let q = &one - p;
    let ok = match (induced.side, induced.kind) {
        // Pass posterior at branch A is at least 1/2.
        (Side::A, InducedKind::Alpha) => p * p1 * &e_a.q1 >= &q * p2 * &e_a.q2,
        // Fail posterior at branch A is at least 1/2.
        (Side::A, InducedKind::Beta) => {
            p * p1 * (&one - &e_a.q1) >= &q * p2 * (&one - &e_a.q2)
        }
        // Pass posterior at branch A is at most 1/2.
        (Side::A, InducedKind::Gamma) => p * p1 * &e_a.q1 <= &q * p2 * &e_a.q2,
        (Side::B, InducedKind::Alpha) => {
            p * (&one - p1) * &e_b.q1 >= &q * (&one - p2) * &e_b.q2
        }
        (Side::B, InducedKind::Beta) => {
            p * (&one - p1) * (&one - &e_b.q1) >= &q * (&one - p2) * (&one - &e_b.q2)
        }
        (Side::B, InducedKind::Gamma) => {
            p * (&one - p1) * &e_b.q1 <= &q * (&one - p2) * &e_b.q2
        }
    };
    Ok(ok)
}

// ---------------------------------------------------------------------------
// Type curves
// ---------------------------------------------------------------------------

/// Value curve of the alpha pattern on a branch with every remaining
/// signal parked at belief 0 on the other side: 2*q1*p while the pass
/// posterior can sit at 1/2, then the pass probability itself, and 0
/// once the interim would push the fail posterior past 1/2.
fn one_sided_alpha(e: &Experiment) -> ValueCurve {
    if is_degenerate(e) {
        // One outcome never occurs, so the outcome-contingent patterns
        // are unavailable; only gamma remains.
        return ValueCurve::zero();
    }
    let (alpha_low, beta_low) = thresholds(e);
    let mut pieces = Vec::new();
    if alpha_low.is_positive() {
        pieces.push((Rat::zero(), alpha_low.clone(), rat(2, 1) * &e.q1, Rat::zero()));
    }
    if beta_low > alpha_low {
        pieces.push((
            alpha_low,
            beta_low,
            &e.q1 - &e.q2,
            e.q2.clone(),
        ));
    }
    curve_from_closed_pieces(&pieces)
}

/// Value curve of the beta pattern: p / beta_low up to the efficient
/// interim, then saturated at 1.
fn one_sided_beta(e: &Experiment) -> ValueCurve {
    if is_degenerate(e) {
        return ValueCurve::zero();
    }
    let (_, beta_low) = thresholds(e);
    let one = Rat::one();
    let mut pieces = vec![(
        Rat::zero(),
        beta_low.clone(),
        one.clone() / &beta_low,
        Rat::zero(),
    )];
    if beta_low < one {
        pieces.push((beta_low, one.clone(), Rat::zero(), one));
    }
    curve_from_closed_pieces(&pieces)
}

/// Assemble a curve from non-overlapping closed pieces (lo, hi, slope,
/// intercept); everything not covered evaluates to 0, and at a covered
/// endpoint the attained value is the piece value (the larger limit).
fn curve_from_closed_pieces(pieces: &[(Rat, Rat, Rat, Rat)]) -> ValueCurve {
    use crate::curve::Segment;
    let mut xs: Vec<Rat> = vec![Rat::zero(), Rat::one()];
    for (lo, hi, _, _) in pieces {
        xs.push(lo.clone());
        xs.push(hi.clone());
    }
    xs.sort();
    xs.dedup();
    let eval = |p: &Rat| -> Rat {
        pieces
            .iter()
            .filter(|(lo, hi, _, _)| lo <= p && p <= hi)
            .map(|(_, _, s, c)| s * p + c)
            .max()
            .unwrap_or_else(Rat::zero)
    };
    let values: Vec<Rat> = xs.iter().map(&eval).collect();
    let segments: Vec<Segment> = xs
        .windows(2)
        .map(|w| {
            let mid = (&w[0] + &w[1]) / rat(2, 1);
            match pieces
                .iter()
                .find(|(lo, hi, _, _)| *lo <= w[0] && w[1] <= *hi)
            {
                Some((_, _, s, c)) => Segment {
                    slope: s.clone(),
                    intercept: c.clone(),
                },
                None => {
                    debug_assert!(eval(&mid).is_zero());
                    Segment {
                        slope: Rat::zero(),
                        intercept: Rat::zero(),
                    }
                }
            }
        })
        .collect();
    ValueCurve::from_parts(xs, values, segments)
}

/// Exact value curve of one pattern pair. Pairs with a gamma component
/// are the one-sided closed forms; the four combined pairs are the best
/// belief split between their one-sided constituents.
pub fn type_curve(t: &StrategyType, e_a: &Experiment, e_b: &Experiment) -> ValueCurve {
    use InducedKind::*;
    let side_curve = |kind: InducedKind, e: &Experiment| match kind {
        Alpha => one_sided_alpha(e),
        Beta => one_sided_beta(e),
        Gamma => ValueCurve::zero(),
    };
    match (t.a, t.b) {
        (Gamma, Gamma) => ValueCurve::zero(),
        (a, Gamma) => side_curve(a, e_a),
        (Gamma, b) => side_curve(b, e_b),
        (a, b) => designed_combine_curve(&side_curve(a, e_a), &side_curve(b, e_b)),
    }
}

/// Optimal sender value for the two-phase trial: the upper envelope of
/// all nine type curves. Must equal the backward-induction value on the
/// three-level tree exactly.
pub fn optimal_two_phase(e_a: &Experiment, e_b: &Experiment) -> ValueCurve {
    StrategyType::all()
        .iter()
        .map(|t| type_curve(t, e_a, e_b))
        .reduce(|acc, c| pointwise_max(&acc, &c))
        .unwrap()
}

/// Best value over the baseline strategies that mix the two states in
/// one signal and reveal the truth on the other: the four pattern pairs
/// with a gamma component.
pub fn bbp_optimal(e_a: &Experiment, e_b: &Experiment) -> ValueCurve {
    use InducedKind::*;
    [
        StrategyType::new(Alpha, Gamma),
        StrategyType::new(Beta, Gamma),
        StrategyType::new(Gamma, Alpha),
        StrategyType::new(Gamma, Beta),
    ]
    .iter()
    .map(|t| type_curve(t, e_a, e_b))
    .reduce(|acc, c| pointwise_max(&acc, &c))
    .unwrap()
}
