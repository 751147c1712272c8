//! Points, access instances, and arboral satisfaction checks.
//!
//! An access sequence over keys `1..=n` is viewed as a point set in the
//! integer plane: key on the x axis, access time on the y axis. A pair of
//! points is *arborally satisfied* when they share a vertical line, share a
//! horizontal line, or their closed axis-aligned bounding rectangle contains
//! a third point of the set (boundary included). A set is satisfied when
//! every pair is.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// A point in the key/time plane. Coordinates are 1-based.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    pub x: u32,
    pub y: u32,
}

impl Point {
    pub const fn new(x: u32, y: u32) -> Self {
        Point { x, y }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl From<(u32, u32)> for Point {
    fn from((x, y): (u32, u32)) -> Self {
        Point { x, y }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("instance is empty")]
    Empty,
    #[error("key {key} at time {time} is out of range 1..={n}")]
    KeyOutOfRange { time: u32, key: u32, n: u32 },
    #[error("key {key} accessed twice, at times {first} and {second}")]
    RepeatedKey { key: u32, first: u32, second: u32 },
}

/// An access sequence: a permutation of `1..=n`, one access per time step.
///
/// `access[t - 1]` is the key accessed at time `t`. Construction rejects
/// anything that is not a permutation, so downstream code can rely on
/// exactly one point per row and per column.
#[derive(Clone, PartialEq, Eq)]
pub struct Instance {
    access: Vec<u32>,
}

impl Instance {
    pub fn new(access: Vec<u32>) -> Result<Self, InstanceError> {
        if access.is_empty() {
            return Err(InstanceError::Empty);
        }
        let n = access.len() as u32;
        let mut seen_at = vec![0u32; access.len() + 1];
        for (i, &key) in access.iter().enumerate() {
            let time = i as u32 + 1;
            if key < 1 || key > n {
                return Err(InstanceError::KeyOutOfRange { time, key, n });
            }
            if seen_at[key as usize] != 0 {
                return Err(InstanceError::RepeatedKey {
                    key,
                    first: seen_at[key as usize],
                    second: time,
                });
            }
            seen_at[key as usize] = time;
        }
        Ok(Instance { access })
    }

    pub fn n(&self) -> u32 {
        self.access.len() as u32
    }

    /// Key accessed at time `t` (1-based).
    pub fn key_at(&self, t: u32) -> u32 {
        self.access[t as usize - 1]
    }

    /// Time at which `key` is accessed. Inverse of `key_at`.
    pub fn time_of_key(&self, key: u32) -> u32 {
        // Permutations are small; a scan keeps the type to one Vec.
        self.access.iter().position(|&k| k == key).unwrap() as u32 + 1
    }

    pub fn accesses(&self) -> &[u32] {
        &self.access
    }

    /// The base point set, in time order.
    pub fn points(&self) -> Vec<Point> {
        self.access
            .iter()
            .enumerate()
            .map(|(i, &key)| Point::new(key, i as u32 + 1))
            .collect()
    }

    pub fn point_at(&self, t: u32) -> Point {
        Point::new(self.key_at(t), t)
    }

    /// The instance with keys reflected, x -> n + 1 - x.
    pub fn mirror_x(&self) -> Instance {
        let n = self.n();
        Instance {
            access: self.access.iter().map(|&k| n + 1 - k).collect(),
        }
    }
}

impl fmt::Debug for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Instance{:?}", self.access)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AugmentError {
    #[error("added point ({x}, {y}) is outside the n x n grid")]
    OutsideGrid { x: u32, y: u32 },
    #[error("added point ({x}, {y}) coincides with a base point")]
    CollidesWithBase { x: u32, y: u32 },
}

/// A base instance together with a set of added (augmentation) points.
///
/// Added points live on the same grid: x is a key column, y is an access
/// time. They may share rows and columns with each other and with the base,
/// but never coincide with a base point or each other.
#[derive(Clone, Debug)]
pub struct AugmentedSet {
    base: Instance,
    added: Vec<Point>,
}

impl AugmentedSet {
    pub fn new(base: Instance, mut added: Vec<Point>) -> Result<Self, AugmentError> {
        let n = base.n();
        added.sort();
        added.dedup();
        for &p in &added {
            if p.x < 1 || p.x > n || p.y < 1 || p.y > n {
                return Err(AugmentError::OutsideGrid { x: p.x, y: p.y });
            }
            if base.key_at(p.y) == p.x {
                return Err(AugmentError::CollidesWithBase { x: p.x, y: p.y });
            }
        }
        Ok(AugmentedSet { base, added })
    }

    pub fn base(&self) -> &Instance {
        &self.base
    }

    /// Added points, sorted by (x, y).
    pub fn added(&self) -> &[Point] {
        &self.added
    }

    /// Base and added points together.
    pub fn points(&self) -> Vec<Point> {
        let mut pts = self.base.points();
        pts.extend_from_slice(&self.added);
        pts
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PairError {
    #[error("pair satisfaction asked for a point paired with itself: {0:?}")]
    IdenticalPoints(Point),
    #[error("point {0:?} is not a member of the set")]
    NotInSet(Point),
}

/// Is the pair `(p, q)` satisfied within `set`?
///
/// True when the points share an x or y line, or when the closed rectangle
/// spanned by them contains a third point of the set. Both points must be
/// members of `set` and distinct.
pub fn is_pair_satisfied(p: Point, q: Point, set: &[Point]) -> Result<bool, PairError> {
    if p == q {
        return Err(PairError::IdenticalPoints(p));
    }
    if !set.contains(&p) {
        return Err(PairError::NotInSet(p));
    }
    if !set.contains(&q) {
        return Err(PairError::NotInSet(q));
    }
    Ok(pair_satisfied_in(p, q, set))
}

/// Pair check without membership validation. `p != q` assumed.
pub(crate) fn pair_satisfied_in(p: Point, q: Point, set: &[Point]) -> bool {
    if p.x == q.x || p.y == q.y {
        return true;
    }
    let (xlo, xhi) = (p.x.min(q.x), p.x.max(q.x));
    let (ylo, yhi) = (p.y.min(q.y), p.y.max(q.y));
    set.iter().any(|&r| {
        r != p && r != q && xlo <= r.x && r.x <= xhi && ylo <= r.y && r.y <= yhi
    })
}

/// Satisfaction check, straight from the definition: every pair, every
/// candidate witness. Cubic; kept as the reference the fast checker is
/// tested against.
pub fn is_satisfied_reference(set: &[Point]) -> bool {
    for (i, &p) in set.iter().enumerate() {
        for &q in &set[i + 1..] {
            if !pair_satisfied_in(p, q, set) {
                return false;
            }
        }
    }
    true
}

/// Satisfaction check via a line sweep over column tops.
///
/// For a fixed upper point q, the only unsatisfied partners below its line
/// are column tops that strictly exceed every column top between them and
/// q's column (q's own column included), with no witness on q's line in
/// between. Scanning tops outward from q's column with a running maximum
/// visits exactly those candidates.
pub fn is_satisfied(set: &[Point]) -> bool {
    ScanState::new(set).run(|_, _| false)
}

/// Every unsatisfied pair, ordered lexicographically by
/// ((min-x point), (other point)), points compared by (x, y).
pub fn unsatisfied_pairs(set: &[Point]) -> Vec<(Point, Point)> {
    let mut sorted: Vec<Point> = set.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut out = Vec::new();
    for (i, &a) in sorted.iter().enumerate() {
        for &b in &sorted[i + 1..] {
            if b.x == a.x {
                continue;
            }
            if !pair_satisfied_in(a, b, set) {
                out.push((a, b));
            }
        }
    }
    out
}

/// Lexicographically first unsatisfied pair, if any. Matches the head of
/// `unsatisfied_pairs` but stops at the first hit.
pub fn first_unsatisfied_pair(set: &[Point]) -> Option<(Point, Point)> {
    let mut sorted: Vec<Point> = set.to_vec();
    sorted.sort();
    sorted.dedup();
    for (i, &a) in sorted.iter().enumerate() {
        for &b in &sorted[i + 1..] {
            if b.x == a.x {
                continue;
            }
            if !pair_satisfied_in(a, b, set) {
                return Some((a, b));
            }
        }
    }
    None
}

/// Reflect a point set left-right: x -> n + 1 - x.
pub fn mirror_x(set: &[Point], n: u32) -> Vec<Point> {
    set.iter().map(|p| Point::new(n + 1 - p.x, p.y)).collect()
}

/// Reflect a point set top-bottom: y -> n + 1 - y.
pub fn mirror_y(set: &[Point], n: u32) -> Vec<Point> {
    set.iter().map(|p| Point::new(p.x, n + 1 - p.y)).collect()
}

/// Sweep machinery shared by `is_satisfied`. The callback sees each
/// unsatisfied pair (lower point first) and returns whether to keep going;
/// the run returns true when no unsatisfied pair was found.
struct ScanState {
    /// Points grouped by line, ascending y; each group's x list sorted.
    lines: BTreeMap<u32, Vec<u32>>,
}

impl ScanState {
    fn new(set: &[Point]) -> Self {
        let mut lines: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        let mut sorted = set.to_vec();
        sorted.sort();
        sorted.dedup();
        for p in sorted {
            lines.entry(p.y).or_default().push(p.x);
        }
        for xs in lines.values_mut() {
            xs.sort_unstable();
        }
        ScanState { lines }
    }

    fn run(&self, mut on_unsat: impl FnMut(Point, Point) -> bool) -> bool {
        // tops[x] = largest y among points strictly below the current line.
        let mut tops: BTreeMap<u32, u32> = BTreeMap::new();
        let mut ok = true;
        for (&y, xs) in &self.lines {
            for &x in xs {
                let q = Point::new(x, y);
                let base = tops.get(&x).copied();
                // Left side: columns < x, running max seeded with q's own
                // column top (witnesses on the rectangle's right edge).
                let mut run_max = base;
                for (&cx, &cy) in tops.range(..x).rev() {
                    if Some(cy) > run_max {
                        // Witness on q's line with x in [cx, x)?
                        let line_hit = xs.iter().any(|&lx| cx <= lx && lx < x);
                        if !line_hit {
                            ok = false;
                            if !on_unsat(Point::new(cx, cy), q) {
                                return false;
                            }
                        }
                        run_max = Some(cy);
                    }
                }
                let mut run_max = base;
                for (&cx, &cy) in tops.range(x + 1..) {
                    if Some(cy) > run_max {
                        let line_hit = xs.iter().any(|&lx| x < lx && lx <= cx);
                        if !line_hit {
                            ok = false;
                            if !on_unsat(Point::new(cx, cy), q) {
                                return false;
                            }
                        }
                        run_max = Some(cy);
                    }
                }
            }
            for &x in xs {
                tops.insert(x, y);
            }
        }
        ok
    }
}
