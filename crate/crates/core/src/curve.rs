//! Piecewise-linear sender value functions on belief space.
//!
//! A [`ValueCurve`] maps a belief p in [0,1] to the sender's optimal
//! continuation utility. Curves may jump: each breakpoint carries an
//! explicit value, and for curves produced by the solver that value equals
//! the larger one-sided limit (the sender can place a posterior exactly at
//! a threshold, so the attained value is the upper one).
//!
//! Two operations drive the backward induction: [`determined_transform`]
//! pushes a pair of continuation curves through a fixed experiment, and
//! [`designed_combine`] takes the best belief split over a sender-chosen
//! experiment, the constrained two-point analogue of concavification.

use num_traits::{One, Signed, Zero};

use crate::model::{Experiment, NaryExperiment};
use crate::rational::{half, rat, Rat};

/// Affine map value = slope * p + intercept on some interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub slope: Rat,
    pub intercept: Rat,
}

impl Segment {
    fn new(slope: Rat, intercept: Rat) -> Self {
        Segment { slope, intercept }
    }

    pub fn eval(&self, p: &Rat) -> Rat {
        &self.slope * p + &self.intercept
    }

    /// Line through two points with distinct x.
    fn through(a: (&Rat, &Rat), b: (&Rat, &Rat)) -> Self {
        debug_assert!(a.0 != b.0);
        let slope = (b.1 - a.1) / (b.0 - a.0);
        let intercept = a.1 - &slope * a.0;
        Segment { slope, intercept }
    }
}

/// Piecewise-linear, possibly discontinuous function on [0,1].
///
/// `breakpoints` is strictly increasing with first 0 and last 1;
/// `values[i]` is the attained value at `breakpoints[i]`; `segments[i]`
/// is the affine map on the open interval between breakpoints i and i+1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueCurve {
    breakpoints: Vec<Rat>,
    values: Vec<Rat>,
    segments: Vec<Segment>,
}

impl ValueCurve {
    /// Assemble a curve, dropping redundant breakpoints (collinear
    /// neighbours with a continuous junction).
    pub fn from_parts(breakpoints: Vec<Rat>, values: Vec<Rat>, segments: Vec<Segment>) -> Self {
        assert!(breakpoints.len() >= 2);
        assert_eq!(breakpoints.len(), values.len());
        assert_eq!(segments.len() + 1, breakpoints.len());
        assert!(breakpoints.first().unwrap().is_zero());
        assert!(breakpoints.last().unwrap().is_one());
        debug_assert!(breakpoints.windows(2).all(|w| w[0] < w[1]));

        let mut bp = Vec::with_capacity(breakpoints.len());
        let mut vals = Vec::with_capacity(values.len());
        let mut segs: Vec<Segment> = Vec::with_capacity(segments.len());
        let n = breakpoints.len();
        for (i, (x, v)) in breakpoints.into_iter().zip(values).enumerate() {
            if i > 0 && i < n - 1 {
                let prev = segs.last().unwrap();
                let next = &segments[i];
                if prev == next && prev.eval(&x) == v {
                    continue;
                }
            }
            if i < n - 1 {
                segs.push(segments[i].clone());
            }
            bp.push(x);
            vals.push(v);
        }
        ValueCurve {
            breakpoints: bp,
            values: vals,
            segments: segs,
        }
    }

    /// Step function of the receiver's best response at a leaf: 0 below
    /// belief 1/2, 1 from 1/2 on (the tie goes to the recommended action).
    pub fn leaf() -> Self {
        ValueCurve::from_parts(
            vec![Rat::zero(), half(), Rat::one()],
            vec![Rat::zero(), Rat::one(), Rat::one()],
            vec![
                Segment::new(Rat::zero(), Rat::zero()),
                Segment::new(Rat::zero(), Rat::one()),
            ],
        )
    }

    pub fn constant(c: Rat) -> Self {
        ValueCurve::from_parts(
            vec![Rat::zero(), Rat::one()],
            vec![c.clone(), c.clone()],
            vec![Segment::new(Rat::zero(), c)],
        )
    }

    pub fn zero() -> Self {
        ValueCurve::constant(Rat::zero())
    }

    /// min(2p, 1): the unconstrained single-phase sender value.
    pub fn single_phase() -> Self {
        ValueCurve::from_parts(
            vec![Rat::zero(), half(), Rat::one()],
            vec![Rat::zero(), Rat::one(), Rat::one()],
            vec![
                Segment::new(rat(2, 1), Rat::zero()),
                Segment::new(Rat::zero(), Rat::one()),
            ],
        )
    }

    pub fn eval(&self, p: &Rat) -> Rat {
        assert!(
            !p.is_negative() && *p <= Rat::one(),
            "belief outside [0,1]"
        );
        match self.breakpoints.binary_search(p) {
            Ok(i) => self.values[i].clone(),
            Err(i) => self.segments[i - 1].eval(p),
        }
    }

    pub fn breakpoints(&self) -> &[Rat] {
        &self.breakpoints
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Breakpoints paired with their attained values.
    pub fn vertices(&self) -> impl Iterator<Item = (&Rat, &Rat)> {
        self.breakpoints.iter().zip(self.values.iter())
    }

    fn pieces(&self) -> Vec<Piece> {
        (0..self.segments.len())
            .map(|i| Piece {
                lo: self.breakpoints[i].clone(),
                hi: self.breakpoints[i + 1].clone(),
                seg: self.segments[i].clone(),
            })
            .collect()
    }

    fn point_candidates(&self) -> Vec<(Rat, Rat)> {
        self.vertices().map(|(x, v)| (x.clone(), v.clone())).collect()
    }

    /// One-sided limits at breakpoint i: (from the left, from the right).
    fn limits_at(&self, i: usize) -> (Option<Rat>, Option<Rat>) {
        let x = &self.breakpoints[i];
        let left = i.checked_sub(1).map(|j| self.segments[j].eval(x));
        let right = (i < self.segments.len()).then(|| self.segments[i].eval(x));
        (left, right)
    }

    /// Bound conventions every curve built here must satisfy, monotone or
    /// not: values and one-sided limits within [0,1] and under min(1, 2p),
    /// and each interior breakpoint carrying the larger one-sided limit.
    pub fn check_value_bounds(&self) -> Result<(), String> {
        let bound = |x: &Rat, v: &Rat| -> Result<(), String> {
            if v.is_negative() || *v > Rat::one() {
                return Err(format!("value {v} at {x} outside [0,1]"));
            }
            let cap = (x * rat(2, 1)).min(Rat::one());
            if *v > cap {
                return Err(format!("value {v} at {x} above min(1,2p)"));
            }
            Ok(())
        };
        for i in 0..self.breakpoints.len() {
            let x = &self.breakpoints[i];
            let v = &self.values[i];
            bound(x, v)?;
            let (left, right) = self.limits_at(i);
            if let Some(l) = &left {
                bound(x, l)?;
            }
            if let Some(r) = &right {
                bound(x, r)?;
            }
            if let (Some(l), Some(r)) = (left, right) {
                let max = l.max(r);
                if *v != max {
                    return Err(format!(
                        "breakpoint value at {x} is {v}, expected max of one-sided limits {max}"
                    ));
                }
            }
        }
        Ok(())
    }

    /// Full solver-curve invariants: the bound conventions plus
    /// monotonicity in the belief. Curves of actual trial trees satisfy
    /// all of these; synthetic continuation curves that flatten strictly
    /// below 1 can make a determined transform dip, so the monotone part
    /// is a separate check that the property suite treats as diagnostic.
    pub fn check_solver_invariants(&self) -> Result<(), String> {
        self.check_value_bounds()?;
        for seg in &self.segments {
            if seg.slope.is_negative() {
                return Err(format!("decreasing segment slope {}", seg.slope));
            }
        }
        for i in 0..self.breakpoints.len() {
            let x = &self.breakpoints[i];
            let v = &self.values[i];
            let (left, right) = self.limits_at(i);
            if let Some(l) = &left {
                if l > v {
                    return Err(format!("value at {x} below its left limit"));
                }
            }
            if let Some(r) = &right {
                if v > r {
                    return Err(format!("value at {x} above its right limit"));
                }
            }
        }
        Ok(())
    }

    /// Evenly spaced samples (p, V(p), V(p)/p); the ratio at p = 0 is
    /// reported as the right slope limit.
    pub fn sample(&self, n: usize) -> Vec<(Rat, Rat, Rat)> {
        assert!(n >= 2);
        (0..n)
            .map(|i| {
                let p = rat(i as i64, (n - 1) as i64);
                let v = self.eval(&p);
                let ratio = if p.is_zero() {
                    self.segments[0].slope.clone()
                } else {
                    &v / &p
                };
                (p, v, ratio)
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Upper envelope of line pieces
// ---------------------------------------------------------------------------

/// Affine piece on the closed interval [lo, hi].
#[derive(Clone, Debug)]
struct Piece {
    lo: Rat,
    hi: Rat,
    seg: Segment,
}

/// Exact upper envelope of closed affine pieces plus isolated points.
/// Regions covered by no piece evaluate to 0.
fn upper_envelope(pieces: &[Piece], points: &[(Rat, Rat)]) -> ValueCurve {
    let mut xs: Vec<Rat> = vec![Rat::zero(), Rat::one()];
    for piece in pieces {
        xs.push(piece.lo.clone());
        xs.push(piece.hi.clone());
    }
    for (x, _) in points {
        xs.push(x.clone());
    }
    for (i, a) in pieces.iter().enumerate() {
        for b in &pieces[i + 1..] {
            if a.seg.slope == b.seg.slope {
                continue;
            }
            let x = (&b.seg.intercept - &a.seg.intercept) / (&a.seg.slope - &b.seg.slope);
            let lo = (&a.lo).max(&b.lo);
            let hi = (&a.hi).min(&b.hi);
            if x > *lo && x < *hi {
                xs.push(x);
            }
        }
    }
    xs.sort();
    xs.dedup();
    debug_assert!(xs.first().unwrap().is_zero() && xs.last().unwrap().is_one());

    let zero_seg = Segment::new(Rat::zero(), Rat::zero());
    let mut segments = Vec::with_capacity(xs.len() - 1);
    for w in xs.windows(2) {
        let mid = (&w[0] + &w[1]) / rat(2, 1);
        // Every piece endpoint is a grid point, so a piece either covers
        // the whole interval or misses its interior; crossings inside the
        // interval were added to the grid, so the midpoint winner wins
        // throughout.
        let best = pieces
            .iter()
            .filter(|piece| piece.lo <= w[0] && piece.hi >= w[1])
            .map(|piece| (piece.seg.eval(&mid), &piece.seg))
            .max_by(|a, b| a.0.cmp(&b.0));
        segments.push(best.map(|(_, seg)| seg.clone()).unwrap_or(zero_seg.clone()));
    }

    let values: Vec<Rat> = xs
        .iter()
        .map(|x| {
            let from_pieces = pieces
                .iter()
                .filter(|piece| piece.lo <= *x && piece.hi >= *x)
                .map(|piece| piece.seg.eval(x));
            let from_points = points
                .iter()
                .filter(|(px, _)| px == x)
                .map(|(_, v)| v.clone());
            from_pieces
                .chain(from_points)
                .max()
                .unwrap_or_else(Rat::zero)
        })
        .collect();

    ValueCurve::from_parts(xs, values, segments)
}

/// Pointwise maximum of two curves.
pub fn pointwise_max(a: &ValueCurve, b: &ValueCurve) -> ValueCurve {
    let mut pieces = a.pieces();
    pieces.extend(b.pieces());
    let mut points = a.point_candidates();
    points.extend(b.point_candidates());
    upper_envelope(&pieces, &points)
}

/// Least concave majorant: the upper hull of the breakpoint vertices.
pub fn upper_concave_envelope(a: &ValueCurve) -> ValueCurve {
    let points: Vec<(Rat, Rat)> = a.point_candidates();
    let mut hull: Vec<(Rat, Rat)> = Vec::new();
    for p in points {
        while hull.len() >= 2 {
            let o = &hull[hull.len() - 2];
            let m = &hull[hull.len() - 1];
            // Drop the middle point unless it lies strictly above chord o-p.
            let cross = (&m.0 - &o.0) * (&p.1 - &o.1) - (&m.1 - &o.1) * (&p.0 - &o.0);
            if cross >= Rat::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let values: Vec<Rat> = hull.iter().map(|(_, v)| v.clone()).collect();
    let xs: Vec<Rat> = hull.iter().map(|(x, _)| x.clone()).collect();
    let segments: Vec<Segment> = hull
        .windows(2)
        .map(|w| Segment::through((&w[0].0, &w[0].1), (&w[1].0, &w[1].1)))
        .collect();
    ValueCurve::from_parts(xs, values, segments)
}

// ---------------------------------------------------------------------------
// Determined-node transform
// ---------------------------------------------------------------------------

fn pass_probability(e: &Experiment, p: &Rat) -> Rat {
    p * &e.q1 + (Rat::one() - p) * &e.q2
}

/// Value at belief p of a fixed binary experiment over two continuation
/// curves: reach-probability-weighted continuation values at the updated
/// beliefs. Outcomes with zero reach probability contribute 0.
fn transform_value(e: &Experiment, v_pass: &ValueCurve, v_fail: &ValueCurve, p: &Rat) -> Rat {
    let mut total = Rat::zero();
    let ppass = pass_probability(e, p);
    if ppass.is_positive() {
        let post = p * &e.q1 / &ppass;
        total += ppass * v_pass.eval(&post);
    }
    let comp = Experiment {
        q1: Rat::one() - &e.q1,
        q2: Rat::one() - &e.q2,
    };
    let pfail = pass_probability(&comp, p);
    if pfail.is_positive() {
        let post = p * &comp.q1 / &pfail;
        total += pfail * v_fail.eval(&post);
    }
    total
}

/// Preimage of child breakpoint t under the pass-posterior map, i.e. the
/// parent belief whose pass posterior is exactly t.
fn pass_preimage(e: &Experiment, t: &Rat) -> Option<Rat> {
    let denom = &e.q1 * (Rat::one() - t) + &e.q2 * t;
    if denom.is_zero() {
        return None;
    }
    Some(t * &e.q2 / denom)
}

/// Push two continuation curves through a determined binary experiment.
pub fn determined_transform(e: &Experiment, v_pass: &ValueCurve, v_fail: &ValueCurve) -> ValueCurve {
    let one = Rat::one();
    if e.q1.is_zero() && e.q2.is_zero() {
        // The pass branch never happens and the fail posterior is the prior.
        return v_fail.clone();
    }
    if e.q1.is_one() && e.q2.is_one() {
        return v_pass.clone();
    }
    let comp = Experiment {
        q1: &one - &e.q1,
        q2: &one - &e.q2,
    };

    let mut xs: Vec<Rat> = vec![Rat::zero(), Rat::one()];
    for (t, _) in v_pass.vertices() {
        if t.is_zero() || t.is_one() {
            continue;
        }
        if let Some(x) = pass_preimage(e, t) {
            if x.is_positive() && x < one {
                xs.push(x);
            }
        }
    }
    for (t, _) in v_fail.vertices() {
        if t.is_zero() || t.is_one() {
            continue;
        }
        if let Some(x) = pass_preimage(&comp, t) {
            if x.is_positive() && x < one {
                xs.push(x);
            }
        }
    }
    xs.sort();
    xs.dedup();

    build_from_samples(&xs, |p| transform_value(e, v_pass, v_fail, p))
}

/// n-ary generalization: sum of reach-weighted continuation values.
pub fn determined_transform_nary(e: &NaryExperiment, children: &[ValueCurve]) -> ValueCurve {
    assert_eq!(children.len(), e.arity(), "children count must equal arity");
    let one = Rat::one();
    let outcome = |k: usize| Experiment {
        q1: e.q1[k].clone(),
        q2: e.q2[k].clone(),
    };

    let mut xs: Vec<Rat> = vec![Rat::zero(), Rat::one()];
    for (k, child) in children.iter().enumerate() {
        let exp = outcome(k);
        if exp.q1.is_zero() && exp.q2.is_zero() {
            continue;
        }
        for (t, _) in child.vertices() {
            if t.is_zero() || t.is_one() {
                continue;
            }
            if let Some(x) = pass_preimage(&exp, t) {
                if x.is_positive() && x < one {
                    xs.push(x);
                }
            }
        }
    }
    xs.sort();
    xs.dedup();

    build_from_samples(&xs, |p| {
        let mut total = Rat::zero();
        for (k, child) in children.iter().enumerate() {
            let exp = outcome(k);
            let reach = pass_probability(&exp, p);
            if reach.is_positive() {
                let post = p * &exp.q1 / &reach;
                total += reach * child.eval(&post);
            }
        }
        total
    })
}

/// Reconstruct the exact piecewise-linear function from a breakpoint grid
/// that already contains every kink: breakpoint values come straight from
/// the evaluator, segment coefficients from two interior samples.
fn build_from_samples(xs: &[Rat], value_at: impl Fn(&Rat) -> Rat) -> ValueCurve {
    let values: Vec<Rat> = xs.iter().map(&value_at).collect();
    let third = rat(1, 3);
    let segments: Vec<Segment> = xs
        .windows(2)
        .map(|w| {
            let gap = &w[1] - &w[0];
            let p1 = &w[0] + &gap * &third;
            let p2 = &w[1] - &gap * &third;
            let v1 = value_at(&p1);
            let v2 = value_at(&p2);
            let seg = Segment::through((&p1, &v1), (&p2, &v2));
            debug_assert_eq!(
                seg.eval(&(&w[0] + &gap * half())),
                value_at(&(&w[0] + gap * half())),
                "function is not linear between {} and {}",
                w[0],
                w[1]
            );
            seg
        })
        .collect();
    ValueCurve::from_parts(xs.to_vec(), values, segments)
}

// ---------------------------------------------------------------------------
// Designed-node combine
// ---------------------------------------------------------------------------

/// One optimizing belief split at a designed node: send the left outcome
/// with probability `weight_left`, moving the belief to `belief_left`
/// there and to `belief_right` on the right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitChoice {
    pub weight_left: Rat,
    pub belief_left: Rat,
    pub belief_right: Rat,
}

/// Recovers an optimizing [`SplitChoice`] for any belief; returned by
/// [`designed_combine`] alongside the combined curve.
#[derive(Clone, Debug)]
pub struct SplitExtractor {
    left: ValueCurve,
    right: ValueCurve,
}

/// Candidate splits at a fixed belief p. The supremum over all splits is
/// attained on this finite set: holding one endpoint fixed, the objective
/// is linear-fractional in the other along each linear piece, hence
/// extremal at a breakpoint vertex; the degenerate splits u = p and v = p
/// are the two pure candidates.
fn split_candidates(left: &ValueCurve, right: &ValueCurve, p: &Rat) -> Vec<(Rat, SplitChoice)> {
    let mut out = Vec::new();
    out.push((
        left.eval(p),
        SplitChoice {
            weight_left: Rat::one(),
            belief_left: p.clone(),
            belief_right: p.clone(),
        },
    ));
    out.push((
        right.eval(p),
        SplitChoice {
            weight_left: Rat::zero(),
            belief_left: p.clone(),
            belief_right: p.clone(),
        },
    ));
    for (a, av) in left.vertices() {
        for (b, bv) in right.vertices() {
            if a == b {
                continue;
            }
            if p < a.min(b) || p > a.max(b) {
                continue;
            }
            let y = (p - b) / (a - b);
            let value = &y * av + (Rat::one() - &y) * bv;
            out.push((
                value,
                SplitChoice {
                    weight_left: y,
                    belief_left: a.clone(),
                    belief_right: b.clone(),
                },
            ));
        }
    }
    out
}

impl SplitExtractor {
    pub fn new(left: ValueCurve, right: ValueCurve) -> Self {
        SplitExtractor { left, right }
    }

    /// Optimizing split at belief p. Among maximizers the choice with the
    /// largest left weight wins, then the smaller left belief, then the
    /// smaller right belief; this keeps reported strategies in the
    /// familiar "mix low beliefs into the persuading signal" shape.
    pub fn at(&self, p: &Rat) -> SplitChoice {
        let candidates = split_candidates(&self.left, &self.right, p);
        let best = candidates.iter().map(|(v, _)| v).max().cloned().unwrap();
        candidates
            .into_iter()
            .filter(|(v, _)| *v == best)
            .map(|(_, c)| c)
            .min_by(|a, b| {
                b.weight_left
                    .cmp(&a.weight_left)
                    .then_with(|| a.belief_left.cmp(&b.belief_left))
                    .then_with(|| a.belief_right.cmp(&b.belief_right))
            })
            .unwrap()
    }

    /// All value-maximizing splits at p, in the tie-break order of [`Self::at`].
    pub fn maximizers(&self, p: &Rat) -> Vec<SplitChoice> {
        let candidates = split_candidates(&self.left, &self.right, p);
        let best = candidates.iter().map(|(v, _)| v).max().cloned().unwrap();
        let mut out: Vec<SplitChoice> = candidates
            .into_iter()
            .filter(|(v, _)| *v == best)
            .map(|(_, c)| c)
            .collect();
        out.sort_by(|a, b| {
            b.weight_left
                .cmp(&a.weight_left)
                .then_with(|| a.belief_left.cmp(&b.belief_left))
                .then_with(|| a.belief_right.cmp(&b.belief_right))
        });
        out.dedup();
        out
    }
}

/// Best convex combination of the two continuation curves at every belief:
/// G(p) = sup { y L(u) + (1-y) R(v) : y u + (1-y) v = p }.
///
/// Computed as the upper envelope of both curves and of every chord
/// joining a breakpoint vertex of the left curve to one of the right.
pub fn designed_combine(left: &ValueCurve, right: &ValueCurve) -> (ValueCurve, SplitExtractor) {
    let mut pieces = left.pieces();
    pieces.extend(right.pieces());
    for (a, av) in left.vertices() {
        for (b, bv) in right.vertices() {
            if a == b {
                continue;
            }
            let (lo, hi) = if a < b {
                (a.clone(), b.clone())
            } else {
                (b.clone(), a.clone())
            };
            pieces.push(Piece {
                lo,
                hi,
                seg: Segment::through((a, av), (b, bv)),
            });
        }
    }
    let mut points = left.point_candidates();
    points.extend(right.point_candidates());
    let curve = upper_envelope(&pieces, &points);
    (
        curve,
        SplitExtractor {
            left: left.clone(),
            right: right.clone(),
        },
    )
}

/// Combine without the extractor.
pub fn designed_combine_curve(left: &ValueCurve, right: &ValueCurve) -> ValueCurve {
    designed_combine(left, right).0
}

/// n-outcome designed experiment: left fold of the binary combine, which
/// equals the direct n-point optimization (any n-point split can be built
/// by repeatedly splitting off one outcome).
pub fn designed_combine_nary(children: &[ValueCurve]) -> ValueCurve {
    assert!(children.len() >= 2, "need at least two children");
    let mut acc = children[0].clone();
    for child in &children[1..] {
        acc = designed_combine_curve(&acc, child);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat_int;

    fn exp(q1: (i64, i64), q2: (i64, i64)) -> Experiment {
        Experiment {
            q1: rat(q1.0, q1.1),
            q2: rat(q2.0, q2.1),
        }
    }

    /// Independent oracle for a determined node over two leaves: evaluate
    /// the definition directly from the experiment parameters, with no
    /// curve machinery involved.
    fn leaf_transform_oracle(e: &Experiment, p: &Rat) -> Rat {
        let one = Rat::one();
        let mut total = Rat::zero();
        let ppass = p * &e.q1 + (&one - p) * &e.q2;
        if ppass.is_positive() && p * &e.q1 / &ppass >= half() {
            total += &ppass;
        }
        let pfail = p * (&one - &e.q1) + (&one - p) * (&one - &e.q2);
        if pfail.is_positive() && p * (&one - &e.q1) / &pfail >= half() {
            total += &pfail;
        }
        total
    }

    fn dense_grid(n: i64) -> Vec<Rat> {
        (0..=n).map(|k| rat(k, n)).collect()
    }

    #[test]
    fn leaf_curve_values() {
        let leaf = ValueCurve::leaf();
        assert_eq!(leaf.eval(&Rat::zero()), rat_int(0));
        assert_eq!(leaf.eval(&half()), rat_int(1));
        assert_eq!(leaf.eval(&rat(3, 4)), rat_int(1));
        assert_eq!(leaf.eval(&rat(49, 100)), rat_int(0));
        leaf.check_solver_invariants().unwrap();
    }

    #[test]
    fn transform_trivial_experiment_keeps_leaf() {
        let out = determined_transform(&exp((1, 2), (1, 2)), &ValueCurve::leaf(), &ValueCurve::leaf());
        assert_eq!(out, ValueCurve::leaf());
    }

    #[test]
    fn transform_full_revelation_is_identity_line() {
        let out = determined_transform(&exp((1, 1), (0, 1)), &ValueCurve::leaf(), &ValueCurve::leaf());
        assert_eq!(out.breakpoints(), &[Rat::zero(), Rat::one()]);
        for p in dense_grid(13) {
            assert_eq!(out.eval(&p), p);
        }
    }

    #[test]
    fn transform_informative_experiment_over_leaves() {
        // (4/5, 1/5): 0 on [0,1/5), then 1/5 + (3/5)p, then 1 on [4/5,1].
        let e = exp((4, 5), (1, 5));
        let out = determined_transform(&e, &ValueCurve::leaf(), &ValueCurve::leaf());
        assert_eq!(
            out.breakpoints(),
            &[Rat::zero(), rat(1, 5), rat(4, 5), Rat::one()]
        );
        assert_eq!(out.eval(&rat(1, 5)), rat(8, 25));
        assert_eq!(out.eval(&rat(1, 10)), rat_int(0));
        assert_eq!(out.eval(&half()), rat(1, 2));
        assert_eq!(out.eval(&rat(9, 10)), rat_int(1));
        for p in dense_grid(160) {
            assert_eq!(out.eval(&p), leaf_transform_oracle(&e, &p), "at {p}");
        }
        out.check_solver_invariants().unwrap();
    }

    #[test]
    fn transform_matches_direct_oracle_on_varied_experiments() {
        let cases = vec![
            exp((1, 1), (1, 1)),
            exp((0, 1), (0, 1)),
            exp((1, 1), (1, 2)),
            exp((0, 1), (1, 2)),
            exp((1, 4), (3, 4)), // reversed informativeness is allowed off the analytic path
            exp((9, 10), (1, 10)),
            exp((2, 3), (1, 3)),
        ];
        for e in cases {
            let out = determined_transform(&e, &ValueCurve::leaf(), &ValueCurve::leaf());
            for p in dense_grid(120) {
                assert_eq!(out.eval(&p), leaf_transform_oracle(&e, &p), "e={e} p={p}");
            }
        }
    }

    #[test]
    fn combine_of_leaves_is_single_phase_value() {
        let (curve, extractor) = designed_combine(&ValueCurve::leaf(), &ValueCurve::leaf());
        assert_eq!(curve, ValueCurve::single_phase());
        let split = extractor.at(&rat(1, 3));
        assert_eq!(split.weight_left, rat(2, 3));
        assert_eq!(split.belief_left, half());
        assert_eq!(split.belief_right, Rat::zero());
    }

    #[test]
    fn combine_identical_concave_curve_is_identity() {
        // A concave curve: chords between its own vertices never beat it.
        let c = upper_concave_envelope(&determined_transform(
            &exp((4, 5), (1, 5)),
            &ValueCurve::leaf(),
            &ValueCurve::leaf(),
        ));
        let (combined, _) = designed_combine(&c, &c);
        assert_eq!(combined, c);
    }

    #[test]
    fn combine_screens_out_weak_determined_branch() {
        let t = determined_transform(&exp((4, 5), (1, 5)), &ValueCurve::leaf(), &ValueCurve::leaf());
        let (curve, _) = designed_combine(&t, &ValueCurve::leaf());
        assert_eq!(curve, ValueCurve::single_phase());
    }

    #[test]
    fn extractor_split_is_consistent_with_curve() {
        let left = determined_transform(&exp((4, 5), (1, 5)), &ValueCurve::leaf(), &ValueCurve::leaf());
        let right = determined_transform(&exp((7, 10), (3, 10)), &ValueCurve::leaf(), &ValueCurve::leaf());
        let (curve, extractor) = designed_combine(&left, &right);
        for p in dense_grid(97) {
            let s = extractor.at(&p);
            let recombined = &s.weight_left * left.eval(&s.belief_left)
                + (Rat::one() - &s.weight_left) * right.eval(&s.belief_right);
            assert_eq!(recombined, curve.eval(&p), "at {p}");
            let mix = &s.weight_left * &s.belief_left
                + (Rat::one() - &s.weight_left) * &s.belief_right;
            assert_eq!(mix, p);
        }
    }

    #[test]
    fn nary_transform_reduces_to_binary() {
        let e = NaryExperiment::new(vec![rat(4, 5), rat(1, 5)], vec![rat(1, 5), rat(4, 5)]).unwrap();
        let nary = determined_transform_nary(&e, &[ValueCurve::leaf(), ValueCurve::leaf()]);
        let binary = determined_transform(&exp((4, 5), (1, 5)), &ValueCurve::leaf(), &ValueCurve::leaf());
        assert_eq!(nary, binary);
    }

    #[test]
    fn nary_transform_uniform_trivial_keeps_leaf() {
        let e = NaryExperiment::new(
            vec![rat(1, 3), rat(1, 3), rat(1, 3)],
            vec![rat(1, 3), rat(1, 3), rat(1, 3)],
        )
        .unwrap();
        let out = determined_transform_nary(&e, &[ValueCurve::leaf(), ValueCurve::leaf(), ValueCurve::leaf()]);
        assert_eq!(out, ValueCurve::leaf());
    }

    #[test]
    fn nary_transform_with_revealing_outcomes() {
        // Outcomes: (1/2, 0) reveals state 1, (1/2, 1/2) is silent,
        // (0, 1/2) reveals state 2. Value = p/2 + (1/2) * [p >= 1/2].
        let e = NaryExperiment::new(
            vec![rat(1, 2), rat(1, 2), rat_int(0)],
            vec![rat_int(0), rat(1, 2), rat(1, 2)],
        )
        .unwrap();
        let out = determined_transform_nary(&e, &[ValueCurve::leaf(), ValueCurve::leaf(), ValueCurve::leaf()]);
        assert_eq!(out.breakpoints(), &[Rat::zero(), half(), Rat::one()]);
        assert_eq!(out.eval(&half()), rat(3, 4));
        assert_eq!(out.eval(&rat(1, 4)), rat(1, 8));
        assert_eq!(out.eval(&rat(3, 4)), rat(7, 8));
        // Dense check against the direct per-outcome definition.
        for p in dense_grid(80) {
            let mut expected = &p * half();
            if p >= half() {
                expected += half();
            }
            assert_eq!(out.eval(&p), expected, "at {p}");
        }
    }

    #[test]
    fn nary_combine_reductions() {
        let l = ValueCurve::leaf();
        assert_eq!(
            designed_combine_nary(&[l.clone(), l.clone()]),
            designed_combine_curve(&l, &l)
        );
        assert_eq!(
            designed_combine_nary(&[l.clone(), l.clone(), l.clone()]),
            ValueCurve::single_phase()
        );
        assert_eq!(
            designed_combine_nary(&[l.clone(), ValueCurve::zero(), ValueCurve::zero()]),
            ValueCurve::single_phase()
        );
    }

    #[test]
    fn pointwise_max_and_envelope() {
        let leaf = ValueCurve::leaf();
        assert_eq!(pointwise_max(&leaf, &leaf), leaf);
        assert_eq!(upper_concave_envelope(&leaf), ValueCurve::single_phase());
        assert_eq!(ValueCurve::single_phase().eval(&rat(1, 3)), rat(2, 3));
    }

    #[test]
    fn samples_report_ratio() {
        let samples = ValueCurve::single_phase().sample(5);
        assert_eq!(samples.len(), 5);
        assert_eq!(samples[0], (rat_int(0), rat_int(0), rat_int(2)));
        assert_eq!(samples[1], (rat(1, 4), half(), rat_int(2)));
        assert_eq!(samples[4], (rat_int(1), rat_int(1), rat_int(1)));
    }

    #[test]
    fn redundant_breakpoints_are_merged() {
        let curve = ValueCurve::from_parts(
            vec![Rat::zero(), half(), Rat::one()],
            vec![Rat::zero(), half(), Rat::one()],
            vec![
                Segment::new(Rat::one(), Rat::zero()),
                Segment::new(Rat::one(), Rat::zero()),
            ],
        );
        assert_eq!(curve.breakpoints().len(), 2);
        assert_eq!(curve.eval(&half()), half());
    }
}
