//! Corner sets: the Pareto-maximal points of a region at a moment in time.
//!
//! A point of the region is a corner for Q when no other region point lies
//! weakly above and to the right of it; those are exactly the points an
//! access in Q (or further right) can still pair with in an empty rectangle.
//! Corners for the left side mirror x. Because dominance only ever removes
//! points as new ones arrive, the corner set evolves like a staircase:
//! strictly increasing x means strictly decreasing y.

use std::collections::BTreeMap;

use crate::geometry::Point;
use crate::greedy::GreedyTrace;

use super::{CornerSnapshot, Region, Side};

/// Maps column positions so one staircase implementation serves both sides:
/// larger key means "further in the dominating direction".
fn side_key(side: Side, x: u32) -> u32 {
    match side {
        Side::ForQ => x,
        Side::ForPl => u32::MAX - x,
    }
}

fn side_unkey(side: Side, key: u32) -> u32 {
    match side {
        Side::ForQ => key,
        Side::ForPl => u32::MAX - key,
    }
}

/// The Pareto frontier under (key, y) dominance, maintained incrementally.
/// Keys ascend while y strictly descends, so membership, size, and the
/// effect of one insertion are all cheap.
#[derive(Clone, Default)]
pub(crate) struct Staircase {
    map: BTreeMap<u32, u32>,
    side: SideTag,
}

/// Default side for `Staircase::default()`; explicit construction sets it.
#[derive(Clone, Copy, Default)]
struct SideTag(Option<Side>);

impl Staircase {
    pub(crate) fn new(side: Side) -> Self {
        Staircase { map: BTreeMap::new(), side: SideTag(Some(side)) }
    }

    fn side(&self) -> Side {
        self.side.0.unwrap_or(Side::ForQ)
    }

    pub(crate) fn insert(&mut self, p: Point) {
        let key = side_key(self.side(), p.x);
        // Dominated by an existing point at key >= ours with y >= ours?
        if let Some((_, &ey)) = self.map.range(key..).next() {
            if ey >= p.y {
                return;
            }
        }
        // Evict points we dominate: key <= ours and y <= ours.
        while let Some((&ek, &ey)) = self.map.range(..=key).next_back() {
            if ey <= p.y {
                self.map.remove(&ek);
            } else {
                break;
            }
        }
        self.map.insert(key, p.y);
    }

    pub(crate) fn len(&self) -> usize {
        self.map.len()
    }

    pub(crate) fn contains_column(&self, x: u32) -> bool {
        self.map.contains_key(&side_key(self.side(), x))
    }

    /// Corner points sorted by x ascending.
    pub(crate) fn points(&self) -> Vec<Point> {
        let side = self.side();
        let mut pts: Vec<Point> = self
            .map
            .iter()
            .map(|(&k, &y)| Point::new(side_unkey(side, k), y))
            .collect();
        pts.sort();
        pts
    }
}

/// All points of the trace (base and added) inside the region that exist
/// strictly before time t.
fn region_points_before(trace: &GreedyTrace, region: Region, t: u32) -> Vec<Point> {
    let mut pts = Vec::new();
    for step in trace.steps() {
        if step.access.y >= t {
            break;
        }
        if region.contains(step.access.x) {
            pts.push(step.access);
        }
        pts.extend(step.added.iter().copied().filter(|q| region.contains(q.x)));
    }
    pts
}

/// The corner set of `region` at time `t`: the points with y < t that no
/// other such point dominates on the given side. Sorted by x. Times past
/// the end of the trace behave like n + 1.
pub fn corner_points(trace: &GreedyTrace, region: Region, t: u32, side: Side) -> CornerSnapshot {
    let mut stair = Staircase::new(side);
    for p in region_points_before(trace, region, t) {
        stair.insert(p);
    }
    CornerSnapshot { t, region, side, corners: stair.points() }
}

/// Corner snapshots for every t from 1 to n + 1, computed in one sweep.
/// Entry i is the snapshot at time i + 1.
pub fn corner_series(trace: &GreedyTrace, region: Region, side: Side) -> Vec<CornerSnapshot> {
    let mut stair = Staircase::new(side);
    let mut out = Vec::with_capacity(trace.n() as usize + 1);
    out.push(CornerSnapshot { t: 1, region, side, corners: Vec::new() });
    for step in trace.steps() {
        if region.contains(step.access.x) {
            stair.insert(step.access);
        }
        for &q in &step.added {
            if region.contains(q.x) {
                stair.insert(q);
            }
        }
        out.push(CornerSnapshot {
            t: step.access.y + 1,
            region,
            side,
            corners: stair.points(),
        });
    }
    out
}
