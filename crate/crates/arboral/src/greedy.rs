//! The online greedy sweep (GreedyArb).
//!
//! Accesses are processed in time order. At each time t the algorithm adds,
//! on the line y = t, the canonical set of points that keeps the prefix
//! arborally satisfied: one point (q.x, t) for every prior point q whose
//! rectangle with the access point is unsatisfied. Only column tops that
//! strictly exceed every column top between them and the access column can
//! form such rectangles, so a pair of outward scans with a running maximum
//! finds the set in O(n) per step.

use std::fmt;

use thiserror::Error;

use crate::geometry::{pair_satisfied_in, AugmentedSet, Instance, Point};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SweepError {
    #[error("sweep order violation: access at y = {y} but the frontier already holds y = {max_y}")]
    OutOfOrder { y: u32, max_y: u32 },
    #[error("access column {x} is outside 1..={n}")]
    ColumnOutOfRange { x: u32, n: u32 },
}

/// Per-column tops of everything placed so far (base and added points).
///
/// `top(x)` is the largest y in column x. The tops are all the sweep needs:
/// a prior point below its column top can never form an unsatisfied
/// rectangle with a later access, because the top sits on that rectangle's
/// edge.
#[derive(Clone)]
pub struct Frontier {
    top: Vec<Option<u32>>,
    max_y: u32,
}

impl Frontier {
    pub fn new(n: u32) -> Self {
        Frontier {
            top: vec![None; n as usize + 1],
            max_y: 0,
        }
    }

    pub fn n(&self) -> u32 {
        self.top.len() as u32 - 1
    }

    /// Largest y placed in column x so far.
    pub fn top(&self, x: u32) -> Option<u32> {
        self.top.get(x as usize).copied().flatten()
    }

    /// Record a placed point. Column tops only ever move up.
    pub fn record(&mut self, p: Point) {
        let slot = &mut self.top[p.x as usize];
        *slot = Some(slot.map_or(p.y, |y| y.max(p.y)));
        self.max_y = self.max_y.max(p.y);
    }
}

impl fmt::Debug for Frontier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cols: Vec<(u32, u32)> = (1..=self.n())
            .filter_map(|x| self.top(x).map(|y| (x, y)))
            .collect();
        write!(f, "Frontier{:?}", cols)
    }
}

/// One sweep step: the set of points added with access point `p`, computed
/// from the frontier alone.
///
/// Scanning outward from p.x, a column top becomes an added point's partner
/// exactly when it strictly exceeds the running maximum of tops seen so far
/// (seeded with p's own column, whose points witness on the rectangle
/// edge). The result is sorted by x.
pub fn greedy_step(frontier: &Frontier, p: Point) -> Result<Vec<Point>, SweepError> {
    if p.x < 1 || p.x > frontier.n() {
        return Err(SweepError::ColumnOutOfRange { x: p.x, n: frontier.n() });
    }
    if p.y <= frontier.max_y {
        return Err(SweepError::OutOfOrder { y: p.y, max_y: frontier.max_y });
    }
    let mut added = Vec::new();
    let mut run_max = frontier.top(p.x);
    for x in (1..p.x).rev() {
        if let Some(y) = frontier.top(x) {
            if Some(y) > run_max {
                added.push(Point::new(x, p.y));
                run_max = Some(y);
            }
        }
    }
    added.reverse();
    let mut run_max = frontier.top(p.x);
    for x in p.x + 1..=frontier.n() {
        if let Some(y) = frontier.top(x) {
            if Some(y) > run_max {
                added.push(Point::new(x, p.y));
                run_max = Some(y);
            }
        }
    }
    Ok(added)
}

/// Quadratic reference for one step: walk every prior point, test its
/// rectangle against the full prior set, collect the unsatisfied partners'
/// columns. `greedy_step` must produce exactly this set.
pub fn reference_step(prior: &[Point], p: Point) -> Vec<Point> {
    let mut pool = prior.to_vec();
    pool.push(p);
    let mut added: Vec<Point> = prior
        .iter()
        .filter(|&&r| !pair_satisfied_in(r, p, &pool))
        .map(|r| Point::new(r.x, p.y))
        .collect();
    added.sort();
    added.dedup();
    added
}

/// What one access contributed to the trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AddedStep {
    /// The access point (key, time).
    pub access: Point,
    /// Points added on the access's line, sorted by x.
    pub added: Vec<Point>,
}

/// The full run of the sweep over an instance: per-step added sets, in time
/// order. Steps are append-only records; nothing is revised later.
#[derive(Clone, Debug)]
pub struct GreedyTrace {
    instance: Instance,
    steps: Vec<AddedStep>,
}

impl GreedyTrace {
    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn n(&self) -> u32 {
        self.instance.n()
    }

    pub fn steps(&self) -> &[AddedStep] {
        &self.steps
    }

    pub fn step(&self, t: u32) -> &AddedStep {
        &self.steps[t as usize - 1]
    }

    /// Total number of added points.
    pub fn added_count(&self) -> usize {
        self.steps.iter().map(|s| s.added.len()).sum()
    }

    /// All added points in placement order (time, then x).
    pub fn added_points(&self) -> Vec<Point> {
        self.steps.iter().flat_map(|s| s.added.iter().copied()).collect()
    }

    /// The base point of the added point's column; always strictly below.
    pub fn parent_of(&self, added: Point) -> Point {
        Point::new(added.x, self.instance.time_of_key(added.x))
    }

    /// Base plus added points as one validated set.
    pub fn augmented(&self) -> AugmentedSet {
        AugmentedSet::new(self.instance.clone(), self.added_points())
            .expect("trace points are grid-valid by construction")
    }
}

/// Run the sweep over a whole instance.
pub fn run(instance: &Instance) -> GreedyTrace {
    let n = instance.n();
    let mut time_of_key = vec![0u32; n as usize + 1];
    for t in 1..=n {
        time_of_key[instance.key_at(t) as usize] = t;
    }
    let mut frontier = Frontier::new(n);
    let mut steps = Vec::with_capacity(n as usize);
    for t in 1..=n {
        let p = instance.point_at(t);
        let added = greedy_step(&frontier, p).expect("accesses arrive in sweep order");
        for &q in &added {
            // Each added point must sit strictly above its column's base
            // point; the first point ever placed in a column is the base.
            let base_time = time_of_key[q.x as usize];
            assert!(
                base_time != 0 && base_time < q.y,
                "added point {:?} has no base point below it (base time {})",
                q,
                base_time,
            );
        }
        frontier.record(p);
        for &q in &added {
            frontier.record(q);
        }
        steps.push(AddedStep { access: p, added });
    }
    GreedyTrace {
        instance: instance.clone(),
        steps,
    }
}
