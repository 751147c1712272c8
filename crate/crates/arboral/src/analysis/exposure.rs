//! Hidden and exposed states of base points.
//!
//! At any time the relevant representative of a base point's column is the
//! topmost point so far in that column. The base point is hidden when that
//! top is flanked on its own line by region points on both sides: any
//! rectangle from above into this column then already has a witness. It is
//! exposed otherwise. The state can only change when the column gains a new
//! top, which pins down exactly when flips may happen.

use crate::geometry::Point;
use crate::greedy::GreedyTrace;

use super::{AnalysisError, ExposureTimeline, PointState, Region, TraceIndex};

/// State contributed by the column point (x, arrival): flanked within the
/// region on the arrival line or not.
pub(crate) fn flank_state(index: &TraceIndex, region: Region, x: u32, arrival: u32) -> PointState {
    let left = x > region.lo() && index.line_occupied(arrival, region.lo(), x - 1);
    let right = x < region.hi() && index.line_occupied(arrival, x + 1, region.hi());
    if left && right {
        PointState::Hidden
    } else {
        PointState::Exposed
    }
}

pub(crate) fn timeline_for(index: &TraceIndex, region: Region, x: u32) -> ExposureTimeline {
    let col = index.col_times(x);
    let base = Point::new(x, col[0]);
    let mut events: Vec<(u32, PointState)> = Vec::new();
    for &arrival in col {
        let state = flank_state(index, region, x, arrival);
        if events.last().map(|&(_, s)| s) != Some(state) {
            events.push((arrival + 1, state));
        }
    }
    ExposureTimeline { base, events }
}

/// The state of base point `p` at time `t`, relative to `region`.
///
/// `p` must be a base point of the traced instance and lie inside the
/// region. Before arrival (t <= p.y) the state is `NotArrived`.
pub fn hidden_state(
    trace: &GreedyTrace,
    region: Region,
    p: Point,
    t: u32,
) -> Result<PointState, AnalysisError> {
    let n = trace.n();
    if p.y < 1 || p.y > n || trace.instance().key_at(p.y) != p.x {
        return Err(AnalysisError::NotABasePoint(p));
    }
    if !region.contains(p.x) {
        return Err(AnalysisError::OutsideRegion(p));
    }
    if t <= p.y {
        return Ok(PointState::NotArrived);
    }
    let index = TraceIndex::new(trace);
    let col = index.col_times(p.x);
    // Latest arrival strictly before t; the base itself qualifies.
    let i = col.partition_point(|&y| y < t);
    let top_arrival = col[i - 1];
    Ok(flank_state(&index, region, p.x, top_arrival))
}

/// Timelines for every base point inside the region, ordered by key.
/// Each timeline starts at the base point's arrival state and records only
/// changes, so consecutive events always alternate.
pub fn exposure_timeline(trace: &GreedyTrace, region: Region) -> Vec<ExposureTimeline> {
    let index = TraceIndex::new(trace);
    let hi = region.hi().min(trace.n());
    (region.lo()..=hi)
        .map(|x| timeline_for(&index, region, x))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Instance;
    use crate::greedy;

    fn demo6_trace() -> GreedyTrace {
        greedy::run(&Instance::new(vec![6, 1, 2, 4, 3, 5]).unwrap())
    }

    #[test]
    fn column_two_flips_hidden_then_exposed() {
        let trace = demo6_trace();
        let region = Region::new(1, 6).unwrap();
        let base = Point::new(2, 3);
        // Born hidden: its arrival line holds 1 on the left and 6 on the
        // right. The next column point (2, 4) has nothing to its left on
        // line 4, so the column flips to exposed and stays there.
        assert_eq!(hidden_state(&trace, region, base, 3).unwrap(), PointState::NotArrived);
        assert_eq!(hidden_state(&trace, region, base, 4).unwrap(), PointState::Hidden);
        assert_eq!(hidden_state(&trace, region, base, 5).unwrap(), PointState::Exposed);
        assert_eq!(hidden_state(&trace, region, base, 7).unwrap(), PointState::Exposed);
    }

    #[test]
    fn hidden_is_region_relative() {
        let trace = demo6_trace();
        // Inside 1..3 the right flank (key 6) is outside the region, so the
        // same column point counts as exposed.
        let narrow = Region::new(1, 3).unwrap();
        assert_eq!(
            hidden_state(&trace, narrow, Point::new(2, 3), 4).unwrap(),
            PointState::Exposed
        );
    }

    #[test]
    fn rejects_non_base_and_out_of_region_points() {
        let trace = demo6_trace();
        let region = Region::new(1, 6).unwrap();
        assert_eq!(
            hidden_state(&trace, region, Point::new(6, 2), 4),
            Err(AnalysisError::NotABasePoint(Point::new(6, 2)))
        );
        let narrow = Region::new(1, 3).unwrap();
        assert_eq!(
            hidden_state(&trace, narrow, Point::new(4, 4), 5),
            Err(AnalysisError::OutsideRegion(Point::new(4, 4)))
        );
    }

    #[test]
    fn figure_instance_states() {
        let trace = greedy::run(&Instance::new(vec![4, 3, 1, 2]).unwrap());
        let region = Region::new(1, 4).unwrap();
        assert_eq!(
            hidden_state(&trace, region, Point::new(2, 4), 5).unwrap(),
            PointState::Hidden
        );
        assert_eq!(
            hidden_state(&trace, region, Point::new(3, 2), 5).unwrap(),
            PointState::Exposed
        );
    }

    #[test]
    fn timelines_compress_to_alternating_events() {
        let trace = demo6_trace();
        let region = Region::new(1, 6).unwrap();
        let timelines = exposure_timeline(&trace, region);
        assert_eq!(timelines.len(), 6);
        let col2 = timelines.iter().find(|tl| tl.base.x == 2).unwrap();
        assert_eq!(col2.base, Point::new(2, 3));
        assert_eq!(
            col2.events,
            vec![(4, PointState::Hidden), (5, PointState::Exposed)]
        );
        assert_eq!(col2.change_count(), 1);
        for tl in &timelines {
            assert_eq!(tl.events.first().map(|&(t, _)| t), Some(tl.base.y + 1));
            for pair in tl.events.windows(2) {
                assert!(pair[0].1 != pair[1].1, "events must alternate");
                assert!(pair[0].0 < pair[1].0, "events must be ordered");
            }
        }
    }

    #[test]
    fn timeline_states_match_pointwise_queries() {
        let trace = greedy::run(&Instance::new(vec![3, 1, 4, 2, 5]).unwrap());
        let region = Region::new(2, 5).unwrap();
        let timelines = exposure_timeline(&trace, region);
        for tl in &timelines {
            for t in 1..=trace.n() + 1 {
                let expected = if t <= tl.base.y {
                    PointState::NotArrived
                } else {
                    // State in force at time t: last event at or before t.
                    tl.events
                        .iter()
                        .rev()
                        .find(|&&(et, _)| et <= t)
                        .map(|&(_, s)| s)
                        .expect("arrival event precedes any t > base.y")
                };
                assert_eq!(
                    hidden_state(&trace, region, tl.base, t).unwrap(),
                    expected,
                    "base {:?} at t = {}",
                    tl.base,
                    t
                );
            }
        }
    }
}
