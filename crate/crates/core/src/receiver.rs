//! Receiver-side experiment selection.
//!
//! When the receiver fixes phase-II experiments ahead of time without
//! knowing the prior, an uncertainty-averse receiver picks the candidate
//! maximizing the worst-case probability of guessing the state right
//! over a prior interval, always assuming the sender responds optimally.
//! The inferiority predicate gives a cheap partial order for thinning
//! large candidate sets before the maximin sweep.

use num_traits::One;

use crate::dp::{receiver_value_with, root_curve, TieBreak};
use crate::error::{Error, Result};
use crate::model::{two_phase_tree, Experiment};
use crate::rational::{in_unit_interval, rat, Rat};

/// A fixed first experiment, the receiver's shortlist for the second,
/// and the prior interval the worst case ranges over.
#[derive(Clone, Debug)]
pub struct CandidateSet {
    pub fixed: Experiment,
    pub candidates: Vec<Experiment>,
    pub prior_range: (Rat, Rat),
}

impl CandidateSet {
    pub fn new(fixed: Experiment, candidates: Vec<Experiment>, prior_range: (Rat, Rat)) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::EmptyCandidates);
        }
        for c in candidates.iter().chain(std::iter::once(&fixed)) {
            if c.q1 < c.q2 {
                return Err(Error::invalid(format!(
                    "candidate {c} must satisfy q1 >= q2"
                )));
            }
        }
        let (a, b) = &prior_range;
        if !in_unit_interval(a) || !in_unit_interval(b) || a > b {
            return Err(Error::invalid("prior range must satisfy 0 <= a <= b <= 1"));
        }
        Ok(CandidateSet {
            fixed,
            candidates,
            prior_range,
        })
    }
}

/// With full design freedom the receiver forces truthful revelation:
/// both phase-II experiments fully reveal the state.
pub fn full_control_optimum() -> (Experiment, Experiment) {
    (Experiment::revealing(), Experiment::revealing())
}

/// Strong dominance order on candidate experiments: `x` is inferior to
/// `y` when either
///   (1) q_y1 <= (2 - q_y2) / (3 - 2 q_y2) and
///       max(2 q_x1 - 1, (1 - q_x1)/(1 - q_x2)) < (1 - q_y1)/(1 - q_y2), or
///   (2) q_y1 >  (2 - q_y2) / (3 - 2 q_y2), q_x1 < q_y1 and
///       (1 - q_x1)/(1 - q_x2) < (1 - q_y1)/(1 - q_y2).
pub fn is_inferior(x: &Experiment, y: &Experiment) -> Result<bool> {
    if x.q1 < x.q2 || y.q1 < y.q2 {
        return Err(Error::invalid("inferiority test needs q1 >= q2"));
    }
    if x.q2.is_one() || y.q2.is_one() {
        return Err(Error::InferiorityUndefined);
    }
    let one = Rat::one();
    let two = rat(2, 1);
    let threshold = (&two - &y.q2) / (rat(3, 1) - &two * &y.q2);
    let ratio_x = (&one - &x.q1) / (&one - &x.q2);
    let ratio_y = (&one - &y.q1) / (&one - &y.q2);
    let cond1 = y.q1 <= threshold && (&two * &x.q1 - &one).max(ratio_x.clone()) < ratio_y;
    let cond2 = y.q1 > threshold && x.q1 < y.q1 && ratio_x < ratio_y;
    Ok(cond1 || cond2)
}

/// Drop every candidate inferior to some other candidate of the original
/// set, preserving order. Pairs on which the inferiority test is
/// undefined (q2 = 1) are kept incomparable.
pub fn pareto_filter(set: &CandidateSet) -> Vec<Experiment> {
    set.candidates
        .iter()
        .enumerate()
        .filter(|(i, c)| {
            !set.candidates.iter().enumerate().any(|(j, other)| {
                *i != j && is_inferior(c, other).unwrap_or(false)
            })
        })
        .map(|(_, c)| c.clone())
        .collect()
}

/// One line of the maximin table.
#[derive(Clone, Debug)]
pub struct MaximinRow {
    pub experiment: Experiment,
    pub worst_case: Rat,
    /// A prior attaining the worst case (smallest such evaluation point).
    pub worst_at: Rat,
}

/// Pick the candidate with the best worst-case receiver utility over the
/// prior range. Each candidate's minimum is taken over the interval
/// endpoints, the breakpoints of the sender's optimal value curve inside
/// the interval (strategy regimes change only there), and a uniform grid
/// of `grid` points. Ties go to the earlier candidate.
pub fn maximin_select(
    set: &CandidateSet,
    grid: usize,
    tie: TieBreak,
) -> Result<(Experiment, Rat, Vec<MaximinRow>)> {
    if set.candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    if grid < 2 {
        return Err(Error::invalid("grid must be at least 2"));
    }
    let (a, b) = &set.prior_range;
    let span = b - a;
    let mut rows = Vec::with_capacity(set.candidates.len());
    for candidate in &set.candidates {
        let tree = two_phase_tree(&set.fixed, candidate);
        let mut points: Vec<Rat> = vec![a.clone(), b.clone()];
        for x in root_curve(&tree).breakpoints() {
            if x > a && x < b {
                points.push(x.clone());
            }
        }
        for k in 0..grid {
            points.push(a + &span * rat(k as i64, (grid - 1) as i64));
        }
        points.sort();
        points.dedup();
        let mut worst: Option<(Rat, Rat)> = None;
        for p in points {
            let value = receiver_value_with(&tree, &p, tie)?;
            if worst.as_ref().map(|(w, _)| value < *w).unwrap_or(true) {
                worst = Some((value, p));
            }
        }
        let (worst_case, worst_at) = worst.expect("at least the endpoints");
        rows.push(MaximinRow {
            experiment: candidate.clone(),
            worst_case,
            worst_at,
        });
    }
    let winner = rows
        .iter()
        .max_by(|x, y| x.worst_case.cmp(&y.worst_case))
        .expect("non-empty rows");
    // max_by returns the last maximum; ties must go to the first.
    let best = rows
        .iter()
        .find(|r| r.worst_case == winner.worst_case)
        .unwrap();
    Ok((best.experiment.clone(), best.worst_case.clone(), rows.clone()))
}
