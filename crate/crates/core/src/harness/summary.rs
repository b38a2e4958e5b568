use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::InstanceRecord;
use crate::planner::Algorithm;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerSummary {
    pub planner: Algorithm,
    pub runs: usize,
    pub solved: usize,
    pub solve_rate: f64,
    /// Totals over instances every planner solved.
    pub common_instances: usize,
    pub mean_total: Option<f64>,
    pub median_total: Option<f64>,
    /// Mean of path length over the PTP path length, where PTP solved.
    pub mean_distance_ratio: Option<f64>,
    pub mean_expanded_nodes: f64,
    pub mean_samples_drawn: f64,
    pub mean_batches_completed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub planners: Vec<PlannerSummary>,
    pub note: String,
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn median(v: &[f64]) -> Option<f64> {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    match n {
        0 => None,
        _ if n % 2 == 1 => Some(s[n / 2]),
        _ => Some((s[n / 2 - 1] + s[n / 2]) / 2.0),
    }
}

pub fn summarize(records: &[InstanceRecord]) -> Summary {
    let mut by_planner: BTreeMap<Algorithm, Vec<&InstanceRecord>> = BTreeMap::new();
    let mut by_instance: BTreeMap<(usize, usize), Vec<&InstanceRecord>> = BTreeMap::new();
    for r in records {
        by_planner.entry(r.planner).or_default().push(r);
        by_instance.entry((r.scenario, r.instance)).or_default().push(r);
    }
    let planner_set: BTreeSet<Algorithm> = by_planner.keys().copied().collect();
    let common: BTreeSet<(usize, usize)> = by_instance
        .iter()
        .filter(|(_, rs)| {
            let solved: BTreeSet<Algorithm> = rs.iter().filter(|r| r.is_solved()).map(|r| r.planner).collect();
            solved == planner_set
        })
        .map(|(k, _)| *k)
        .collect();
    let ptp_distance: BTreeMap<(usize, usize), f64> = records
        .iter()
        .filter(|r| r.planner == Algorithm::Ptp && r.is_solved())
        .filter_map(|r| Some(((r.scenario, r.instance), r.distance_m?)))
        .collect();

    let planners = by_planner
        .into_iter()
        .map(|(planner, rs)| {
            let runs = rs.len();
            let solved = rs.iter().filter(|r| r.is_solved()).count();
            let totals: Vec<f64> =
                rs.iter().filter(|r| common.contains(&(r.scenario, r.instance))).filter_map(|r| r.total).collect();
            let ratios: Vec<f64> = rs
                .iter()
                .filter_map(|r| {
                    let base = ptp_distance.get(&(r.scenario, r.instance))?;
                    (*base > 0.0).then_some(r.distance_m? / base)
                })
                .collect();
            let counter = |f: fn(&InstanceRecord) -> usize| rs.iter().map(|r| f(r) as f64).sum::<f64>() / runs as f64;
            PlannerSummary {
                planner,
                runs,
                solved,
                solve_rate: solved as f64 / runs as f64,
                common_instances: totals.len(),
                mean_total: mean(&totals),
                median_total: median(&totals),
                mean_distance_ratio: mean(&ratios),
                mean_expanded_nodes: counter(|r| r.expanded_nodes),
                mean_samples_drawn: counter(|r| r.samples_drawn),
                mean_batches_completed: counter(|r| r.batches_completed),
            }
        })
        .collect();
    Summary {
        planners,
        note: "instance counts, weight distribution and per-run deadline are configurable defaults of this tool".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::PlanStatus;

    fn record(instance: usize, planner: Algorithm, total: Option<f64>, distance: Option<f64>) -> InstanceRecord {
        InstanceRecord {
            scenario: 0,
            resolution: 5.0,
            altitude: 20.0,
            instance,
            planner,
            seed: 0,
            start_x: 0.0,
            start_y: 0.0,
            goal_x: 1.0,
            goal_y: 1.0,
            w_distance: 1.0,
            w_gps: 0.0,
            w_lidar: 0.0,
            w_population: 0.0,
            w_risk: 0.0,
            status: if total.is_some() { PlanStatus::Solved } else { PlanStatus::Timeout },
            total,
            distance_m: distance,
            gps: None,
            lidar: None,
            population: None,
            risk: None,
            expanded_nodes: 10 * instance,
            samples_drawn: 0,
            batches_completed: 0,
            elapsed_s: 0.0,
        }
    }

    #[test]
    fn all_timeouts() {
        let s = summarize(&[record(0, Algorithm::AstarDist, None, None), record(1, Algorithm::AstarDist, None, None)]);
        let p = &s.planners[0];
        assert_eq!((p.solve_rate, p.mean_total, p.median_total), (0.0, None, None));
    }

    #[test]
    fn single_record_echoed() {
        let s = summarize(&[record(3, Algorithm::AstarPlus, Some(12.5), Some(11.0))]);
        let p = &s.planners[0];
        assert_eq!(p.mean_total, Some(12.5));
        assert_eq!(p.median_total, Some(12.5));
        assert_eq!(p.mean_expanded_nodes, 30.0);
    }

    #[test]
    fn hand_computed_aggregates() {
        use Algorithm::*;
        let records = vec![
            record(0, Ptp, Some(10.0), Some(10.0)),
            record(0, AstarDist, Some(12.0), Some(11.0)),
            record(1, Ptp, None, None),
            record(1, AstarDist, Some(20.0), Some(18.0)),
            record(2, Ptp, Some(4.0), Some(4.0)),
            record(2, AstarDist, Some(6.0), Some(5.0)),
        ];
        let s = summarize(&records);
        let astar = s.planners.iter().find(|p| p.planner == AstarDist).unwrap();
        assert_eq!(astar.solve_rate, 1.0);
        // instance 1 is not commonly solved
        assert_eq!(astar.common_instances, 2);
        assert_eq!(astar.mean_total, Some(9.0));
        assert_eq!(astar.median_total, Some(9.0));
        assert_eq!(astar.mean_distance_ratio, Some((1.1 + 1.25) / 2.0));
        let ptp = s.planners.iter().find(|p| p.planner == Ptp).unwrap();
        assert!((ptp.solve_rate - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(ptp.mean_total, Some(7.0));
        assert_eq!(ptp.mean_distance_ratio, Some(1.0));
    }
}
