//! Lemma verifiers: measure each claimed quantity on a trace and compare
//! it against its bound.
//!
//! All verifiers are driven by one pass over the trace per partition. Hard
//! checks correspond to claims the competitiveness argument depends on;
//! the single soft check (the decay partner) records a strictly stronger
//! structural reading that is reported but never fails a run.

use crate::greedy::GreedyTrace;
use crate::oracle::ceil_log2;

use super::corners::Staircase;
use super::exposure::{flank_state, timeline_for};
use super::{
    LemmaCheck, LemmaName, LemmaReport, LemmaSelection, Partition, PointState, Side, TraceIndex,
};

/// Where the accessed key of a step falls relative to the partition.
#[derive(Clone, Copy, PartialEq, Eq)]
enum StepClass {
    InP,
    InQOrRight,
    LeftOfP,
}

fn classify(partition: Partition, key: u32) -> StepClass {
    if partition.p_block().contains(key) {
        StepClass::InP
    } else if key >= partition.q_block().lo() {
        StepClass::InQOrRight
    } else {
        StepClass::LeftOfP
    }
}

/// One sweep producing the three corner checks: growth, decay, and the soft
/// partner claim.
fn corner_checks(index: &TraceIndex, partition: Partition) -> (LemmaCheck, LemmaCheck, LemmaCheck) {
    let p_block = partition.p_block();
    let mut stair = Staircase::new(Side::ForQ);
    let mut growth = i64::MIN;
    let mut growth_witness = None;
    let mut decay = i64::MIN;
    let mut decay_witness = None;
    let mut partner_misses = 0i64;
    let mut partner_witness = None;

    for t in 1..=index.n() {
        let key = index.access_key(t);
        let class = classify(partition, key);
        let added_p = index.added_in(t, p_block);
        let before = stair.len() as i64;

        if class == StepClass::InQOrRight {
            for &x in added_p {
                if !stair.contains_column(x) {
                    partner_misses += 1;
                    partner_witness.get_or_insert_with(|| {
                        format!("t={t}: column {x} gains a point but is not a corner")
                    });
                }
            }
        }

        if p_block.contains(key) {
            stair.insert(crate::geometry::Point::new(key, t));
        }
        for &x in added_p {
            stair.insert(crate::geometry::Point::new(x, t));
        }
        let after = stair.len() as i64;

        match class {
            StepClass::InP => {
                let delta = after - before;
                if delta > growth {
                    growth = delta;
                    if delta > 1 {
                        growth_witness =
                            Some(format!("t={t}: corner count went {before} -> {after}"));
                    }
                }
            }
            StepClass::InQOrRight => {
                let m = added_p.len() as i64;
                // No additions must leave the staircase untouched; with m
                // additions it must shrink by at least m - 1.
                let excess = if m == 0 {
                    (after - before).abs()
                } else {
                    after - (before - (m - 1))
                };
                if excess > decay {
                    decay = excess;
                    if excess > 0 {
                        decay_witness = Some(format!(
                            "t={t}: corner count went {before} -> {after} with {m} additions"
                        ));
                    }
                }
            }
            StepClass::LeftOfP => {}
        }
    }

    let growth = if growth == i64::MIN { 0 } else { growth };
    let decay = if decay == i64::MIN { 0 } else { decay };
    (
        LemmaCheck::hard(LemmaName::CornerGrowth, growth, 1, growth_witness),
        LemmaCheck::hard(LemmaName::CornerDecay, decay, 0, decay_witness),
        LemmaCheck::soft(LemmaName::CornerDecayPartner, partner_misses, 0, partner_witness),
    )
}

fn exposure_source_check(index: &TraceIndex, partition: Partition) -> LemmaCheck {
    let p_block = partition.p_block();
    let mut violations = 0i64;
    let mut witness = None;
    let hi = p_block.hi().min(index.n());
    for x in p_block.lo()..=hi {
        let col = index.col_times(x);
        for i in 1..col.len() {
            if flank_state(index, p_block, x, col[i - 1]) == PointState::Hidden {
                let t = col[i];
                let key = index.access_key(t);
                if !p_block.contains(key) {
                    violations += 1;
                    witness.get_or_insert_with(|| {
                        format!(
                            "t={t}: hidden column {x} gains a point on an access to key {key}"
                        )
                    });
                }
            }
        }
    }
    LemmaCheck::hard(LemmaName::ExposureSource, violations, 0, witness)
}

fn state_changes_check(index: &TraceIndex, partition: Partition) -> LemmaCheck {
    let p_block = partition.p_block();
    let k = partition.k() as i64;
    let hi = p_block.hi().min(index.n());
    let total: i64 = (p_block.lo()..=hi)
        .map(|x| timeline_for(index, p_block, x).change_count() as i64)
        .sum();
    LemmaCheck::hard(LemmaName::StateChanges, total, 5 * k, None)
}

fn cross_addition_checks(index: &TraceIndex, partition: Partition) -> Vec<LemmaCheck> {
    let k = partition.k() as i64;
    let mut into_p = 0i64;
    let mut into_q = 0i64;
    let mut non_extreme_p = 0i64;
    let mut non_extreme_q = 0i64;
    for t in 1..=index.n() {
        let key = index.access_key(t);
        if partition.q_block().contains(key) {
            let m = index.added_in(t, partition.p_block()).len() as i64;
            into_p += m;
            // Up to two extreme columns per step (leftmost and rightmost).
            non_extreme_p += (m - 2).max(0);
        } else if partition.p_block().contains(key) {
            let m = index.added_in(t, partition.q_block()).len() as i64;
            into_q += m;
            non_extreme_q += (m - 2).max(0);
        }
    }
    // With nothing to the left of P, hidden columns cannot arise, which
    // drops the bound to the extreme contributions alone.
    let into_p_bound = if partition.p_block().lo() == 1 { 2 * k } else { 7 * k };
    vec![
        LemmaCheck::hard(LemmaName::CrossAdditionsIntoP, into_p, into_p_bound, None),
        LemmaCheck::hard(LemmaName::CrossAdditionsIntoQ, into_q, 7 * k, None),
        LemmaCheck::hard(LemmaName::CrossNonExtremeIntoP, non_extreme_p, 5 * k, None),
        LemmaCheck::hard(LemmaName::CrossNonExtremeIntoQ, non_extreme_q, 5 * k, None),
    ]
}

/// Accesses inside P never grow the corner set of P by more than one point
/// per step.
pub fn verify_corner_growth(trace: &GreedyTrace, partition: Partition) -> LemmaCheck {
    corner_checks(&TraceIndex::new(trace), partition).0
}

/// Accesses in Q or to its right shrink the corner set: m additions into P
/// leave at most |C| - (m - 1) corners, and zero additions leave it intact.
/// Returns the hard decay check and the soft partner check.
pub fn verify_corner_decay(trace: &GreedyTrace, partition: Partition) -> Vec<LemmaCheck> {
    let (_, decay, partner) = corner_checks(&TraceIndex::new(trace), partition);
    vec![decay, partner]
}

/// While a column of P is hidden, only accesses inside P may add points to
/// it; in particular only they can flip it back to exposed.
pub fn verify_exposure_source(trace: &GreedyTrace, partition: Partition) -> LemmaCheck {
    exposure_source_check(&TraceIndex::new(trace), partition)
}

/// Total hidden/exposed transitions across the columns of P stay within 5k.
pub fn verify_state_changes(trace: &GreedyTrace, partition: Partition) -> LemmaCheck {
    state_changes_check(&TraceIndex::new(trace), partition)
}

/// Points forced across the partition boundary: accesses in Q add at most
/// 7k points into P over the whole trace (2k when P is a prefix), and
/// symmetrically for accesses in P adding into Q. Within each step all but
/// the two extreme columns are non-extreme; those stay within 5k per
/// direction.
pub fn verify_cross_additions(trace: &GreedyTrace, partition: Partition) -> Vec<LemmaCheck> {
    cross_addition_checks(&TraceIndex::new(trace), partition)
}

/// The global guarantee: the sweep adds at most 7 n ceil(log2 n) points.
pub fn verify_global_bound(trace: &GreedyTrace) -> LemmaCheck {
    let n = trace.n();
    let bound = 7 * n as i64 * ceil_log2(n) as i64;
    LemmaCheck::hard(LemmaName::GlobalBound, trace.added_count() as i64, bound, None)
}

/// Run the selected checks for one partition.
pub fn verify_partition(
    trace: &GreedyTrace,
    partition: Partition,
    selection: LemmaSelection,
) -> LemmaReport {
    verify_with_index(&TraceIndex::new(trace), partition, selection)
}

/// Run the selected checks for many partitions of the same trace, sharing
/// one index pass.
pub fn verify_partitions(
    trace: &GreedyTrace,
    partitions: &[Partition],
    selection: LemmaSelection,
) -> Vec<LemmaReport> {
    let index = TraceIndex::new(trace);
    partitions
        .iter()
        .map(|&p| verify_with_index(&index, p, selection))
        .collect()
}

fn verify_with_index(
    index: &TraceIndex,
    partition: Partition,
    selection: LemmaSelection,
) -> LemmaReport {
    let mut checks = Vec::new();
    if selection.corner_growth || selection.corner_decay {
        let (growth, decay, partner) = corner_checks(index, partition);
        if selection.corner_growth {
            checks.push(growth);
        }
        if selection.corner_decay {
            checks.push(decay);
            checks.push(partner);
        }
    }
    if selection.exposure_source {
        checks.push(exposure_source_check(index, partition));
    }
    if selection.state_changes {
        checks.push(state_changes_check(index, partition));
    }
    if selection.cross_additions {
        checks.extend(cross_addition_checks(index, partition));
    }
    LemmaReport { partition, checks }
}

/// Hard checks that failed, paired with their partitions.
pub fn hard_failures(reports: &[LemmaReport]) -> Vec<(Partition, LemmaCheck)> {
    reports
        .iter()
        .flat_map(|r| {
            r.checks
                .iter()
                .filter(|c| !c.holds && !c.soft)
                .map(|c| (r.partition, c.clone()))
        })
        .collect()
}
