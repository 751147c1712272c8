//! Empirical verification of the combinatorial invariants behind the
//! sweep's O(log n) competitiveness bound.
//!
//! The argument splits the key range into two adjacent blocks P and Q of k
//! keys each and tracks, per block, a small set of quantities over the
//! trace: Pareto-maximal "corner" points, hidden/exposed states of base
//! points, and how many points accesses in one block force into the other.
//! Each lemma-shaped claim becomes a check over a concrete trace and
//! partition; the verifiers measure the quantity, compare it to its bound,
//! and report a witness on violation.

mod corners;
mod exposure;
mod verify;

pub use corners::{corner_points, corner_series};
pub use exposure::{exposure_timeline, hidden_state};
pub use verify::{
    hard_failures, verify_corner_decay, verify_corner_growth, verify_cross_additions,
    verify_exposure_source, verify_global_bound, verify_partition, verify_partitions,
    verify_state_changes,
};

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::Point;
use crate::greedy::GreedyTrace;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("region bounds {lo}..={hi} are not ordered 1 <= lo <= hi")]
    InvalidRegion { lo: u32, hi: u32 },
    #[error("blocks {p:?} and {q:?} are not adjacent")]
    BlocksNotAdjacent { p: Region, q: Region },
    #[error("blocks {p:?} and {q:?} have lengths {plen} and {qlen}; the left block must be as long as the right or one longer")]
    BlocksUneven { p: Region, q: Region, plen: u32, qlen: u32 },
    #[error("point {0:?} is not a base point of the instance")]
    NotABasePoint(Point),
    #[error("point {0:?} lies outside the region")]
    OutsideRegion(Point),
}

/// A contiguous, inclusive range of key columns.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Region {
    lo: u32,
    hi: u32,
}

impl Region {
    pub fn new(lo: u32, hi: u32) -> Result<Self, AnalysisError> {
        if lo < 1 || lo > hi {
            return Err(AnalysisError::InvalidRegion { lo, hi });
        }
        Ok(Region { lo, hi })
    }

    pub fn lo(&self) -> u32 {
        self.lo
    }

    pub fn hi(&self) -> u32 {
        self.hi
    }

    /// Number of keys in the region; at least 1 by construction, so there
    /// is deliberately no `is_empty`.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> u32 {
        self.hi - self.lo + 1
    }

    pub fn contains(&self, x: u32) -> bool {
        self.lo <= x && x <= self.hi
    }
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}..{}]", self.lo, self.hi)
    }
}

/// Two adjacent key blocks: P on the left, Q on the right.
///
/// The canonical shape has equal lengths 2k split down the middle. Splitting
/// an odd-length block is allowed too; then P is the longer half and every
/// bound is instantiated with k = |P|, the conservative choice.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Partition {
    p_block: Region,
    q_block: Region,
}

impl Partition {
    pub fn new(p_block: Region, q_block: Region) -> Result<Self, AnalysisError> {
        if q_block.lo != p_block.hi + 1 {
            return Err(AnalysisError::BlocksNotAdjacent { p: p_block, q: q_block });
        }
        let (plen, qlen) = (p_block.len(), q_block.len());
        if plen != qlen && plen != qlen + 1 {
            return Err(AnalysisError::BlocksUneven { p: p_block, q: q_block, plen, qlen });
        }
        Ok(Partition { p_block, q_block })
    }

    pub fn of_bounds(p_lo: u32, p_hi: u32, q_lo: u32, q_hi: u32) -> Result<Self, AnalysisError> {
        Partition::new(Region::new(p_lo, p_hi)?, Region::new(q_lo, q_hi)?)
    }

    pub fn p_block(&self) -> Region {
        self.p_block
    }

    pub fn q_block(&self) -> Region {
        self.q_block
    }

    /// The k every bound is stated in: the left block's length.
    pub fn k(&self) -> u32 {
        self.p_block.len()
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{:?} | {:?}}}", self.p_block, self.q_block)
    }
}

/// Which block the corner set is computed for.
///
/// `ForQ`: maximal under "no other point weakly up and to the right"; these
/// are the points of P that accesses in Q can still form unsatisfied
/// rectangles with. `ForPl` mirrors x for accesses arriving from the left.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    ForQ,
    ForPl,
}

/// The corner set of a region at a moment in time (points with y < t).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CornerSnapshot {
    pub t: u32,
    pub region: Region,
    pub side: Side,
    /// Sorted by x.
    pub corners: Vec<Point>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointState {
    NotArrived,
    Hidden,
    Exposed,
}

/// The state history of one base point: (time, state) events, starting just
/// after arrival, recorded only when the state changes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExposureTimeline {
    pub base: Point,
    pub events: Vec<(u32, PointState)>,
}

impl ExposureTimeline {
    /// Transitions after the arrival state.
    pub fn change_count(&self) -> usize {
        self.events.len().saturating_sub(1)
    }
}

/// Names for the verifiable claims. Serialized into reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaName {
    CornerGrowth,
    CornerDecay,
    CornerDecayPartner,
    ExposureSource,
    StateChanges,
    CrossAdditionsIntoP,
    CrossAdditionsIntoQ,
    CrossNonExtremeIntoP,
    CrossNonExtremeIntoQ,
    GlobalBound,
}

impl LemmaName {
    pub fn as_str(&self) -> &'static str {
        match self {
            LemmaName::CornerGrowth => "corner_growth",
            LemmaName::CornerDecay => "corner_decay",
            LemmaName::CornerDecayPartner => "corner_decay_partner",
            LemmaName::ExposureSource => "exposure_source",
            LemmaName::StateChanges => "state_changes",
            LemmaName::CrossAdditionsIntoP => "cross_additions_into_p",
            LemmaName::CrossAdditionsIntoQ => "cross_additions_into_q",
            LemmaName::CrossNonExtremeIntoP => "cross_non_extreme_into_p",
            LemmaName::CrossNonExtremeIntoQ => "cross_non_extreme_into_q",
            LemmaName::GlobalBound => "global_bound",
        }
    }
}

/// Outcome of one check on one trace.
#[derive(Clone, Debug)]
pub struct LemmaCheck {
    pub lemma: LemmaName,
    pub holds: bool,
    /// Soft checks are reported but do not fail a verification run.
    pub soft: bool,
    /// The measured quantity the bound constrains (worst margin for
    /// per-step checks, the total for summed checks).
    pub measured: i64,
    pub bound: i64,
    /// Counterexample description; present only when the check fails.
    pub witness: Option<String>,
}

impl LemmaCheck {
    fn hard(lemma: LemmaName, measured: i64, bound: i64, witness: Option<String>) -> Self {
        LemmaCheck {
            lemma,
            holds: measured <= bound,
            soft: false,
            measured,
            bound,
            witness,
        }
    }

    fn soft(lemma: LemmaName, measured: i64, bound: i64, witness: Option<String>) -> Self {
        LemmaCheck {
            lemma,
            holds: measured <= bound,
            soft: true,
            measured,
            bound,
            witness,
        }
    }
}

/// All checks for one partition of one trace.
#[derive(Clone, Debug)]
pub struct LemmaReport {
    pub partition: Partition,
    pub checks: Vec<LemmaCheck>,
}

impl LemmaReport {
    pub fn all_hard_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds || c.soft)
    }
}

/// Which checks a verification run performs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LemmaSelection {
    pub corner_growth: bool,
    pub corner_decay: bool,
    pub exposure_source: bool,
    pub state_changes: bool,
    pub cross_additions: bool,
}

impl LemmaSelection {
    pub fn all() -> Self {
        LemmaSelection {
            corner_growth: true,
            corner_decay: true,
            exposure_source: true,
            state_changes: true,
            cross_additions: true,
        }
    }

    pub fn none() -> Self {
        LemmaSelection {
            corner_growth: false,
            corner_decay: false,
            exposure_source: false,
            state_changes: false,
            cross_additions: false,
        }
    }
}

impl Default for LemmaSelection {
    fn default() -> Self {
        LemmaSelection::all()
    }
}

/// The block pairs of the dyadic recursion over 1..=n, level by level:
/// split the range down the middle (left half one longer when odd), then
/// recurse into both halves while they hold at least two keys.
pub fn dyadic_partitions(n: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut queue = std::collections::VecDeque::new();
    if n >= 2 {
        queue.push_back((1u32, n));
    }
    while let Some((lo, hi)) = queue.pop_front() {
        let m = hi - lo + 1;
        let mid = lo + m.div_ceil(2) - 1;
        let p = Region::new(lo, mid).expect("dyadic split is ordered");
        let q = Region::new(mid + 1, hi).expect("dyadic split is ordered");
        out.push(Partition::new(p, q).expect("dyadic halves differ by at most one"));
        if mid > lo {
            queue.push_back((lo, mid));
        }
        if hi > mid + 1 {
            queue.push_back((mid + 1, hi));
        }
    }
    out
}

/// Every contiguous equal-half partition: blocks [j, j+k-1] and
/// [j+k, j+2k-1] for all k >= 1 and offsets j, ordered by (k, j).
pub fn equal_half_partitions(n: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    for k in 1..=n / 2 {
        for j in 1..=(n - 2 * k + 1) {
            out.push(
                Partition::of_bounds(j, j + k - 1, j + k, j + 2 * k - 1)
                    .expect("constructed blocks are adjacent equal halves"),
            );
        }
    }
    out
}

/// Index shared by the verifiers: per-column and per-line point listings.
pub(crate) struct TraceIndex {
    n: u32,
    /// Key accessed at each time, 1-indexed by t.
    access_key: Vec<u32>,
    /// Times of all points in each column, ascending; the base point is
    /// always first.
    col_times: Vec<Vec<u32>>,
    /// Sorted x's of all points on each line (access plus added),
    /// 1-indexed by t.
    line_xs: Vec<Vec<u32>>,
    /// Sorted x's of only the added points on each line, 1-indexed by t.
    added_xs: Vec<Vec<u32>>,
}

impl TraceIndex {
    pub(crate) fn new(trace: &GreedyTrace) -> Self {
        let n = trace.n();
        let mut access_key = vec![0u32; n as usize + 1];
        let mut col_times: Vec<Vec<u32>> = vec![Vec::new(); n as usize + 1];
        let mut line_xs: Vec<Vec<u32>> = vec![Vec::new(); n as usize + 1];
        let mut added_xs: Vec<Vec<u32>> = vec![Vec::new(); n as usize + 1];
        for step in trace.steps() {
            let p = step.access;
            let t = p.y as usize;
            access_key[t] = p.x;
            col_times[p.x as usize].push(p.y);
            let mut xs = vec![p.x];
            let mut axs = Vec::with_capacity(step.added.len());
            for &q in &step.added {
                col_times[q.x as usize].push(q.y);
                xs.push(q.x);
                axs.push(q.x);
            }
            xs.sort_unstable();
            line_xs[t] = xs;
            added_xs[t] = axs;
        }
        TraceIndex { n, access_key, col_times, line_xs, added_xs }
    }

    pub(crate) fn n(&self) -> u32 {
        self.n
    }

    pub(crate) fn access_key(&self, t: u32) -> u32 {
        self.access_key[t as usize]
    }

    pub(crate) fn col_times(&self, x: u32) -> &[u32] {
        &self.col_times[x as usize]
    }

    /// Added points on line t with x inside the region.
    pub(crate) fn added_in(&self, t: u32, region: Region) -> &[u32] {
        let xs = &self.added_xs[t as usize];
        let lo = xs.partition_point(|&x| x < region.lo);
        let hi = xs.partition_point(|&x| x <= region.hi);
        &xs[lo..hi]
    }

    /// Any point on line t with x in [lo, hi]?
    pub(crate) fn line_occupied(&self, t: u32, lo: u32, hi: u32) -> bool {
        if lo > hi {
            return false;
        }
        let xs = &self.line_xs[t as usize];
        let i = xs.partition_point(|&x| x < lo);
        i < xs.len() && xs[i] <= hi
    }
}
