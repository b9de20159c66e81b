//! Operation-count scaling measurements.

use std::time::Instant;

use crate::gen::{random_market, random_prefix_market, staircase_market, GenError, GenParams};
use crate::htts::{htts_solve, OpCounter, SolveOutcome};
use crate::market::Market;

/// Which instance family to measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// [`random_market`] instances.
    Random,
    /// [`random_prefix_market`] instances with this many explicitly ranked
    /// types per agent.
    RandomPrefix(usize),
    /// [`staircase_market`] instances, one type retired per step.
    Staircase,
}

impl Family {
    pub fn generate(self, params: GenParams) -> Result<Market, GenError> {
        match self {
            Family::Random => random_market(params),
            Family::RandomPrefix(k) => random_prefix_market(params, k),
            Family::Staircase => staircase_market(params),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub houses: usize,
    pub agents: usize,
    /// Fastest wall time over the repeats.
    pub wall_ns: u128,
    pub ops: OpCounter,
    pub steps: usize,
    pub core_found: bool,
}

/// Agents for a size: `round(ratio * houses)`, never fewer than `houses`.
pub fn agents_for(houses: usize, ratio: f64) -> usize {
    ((ratio * houses as f64).round() as usize).max(houses)
}

/// Solves one generated market per size `repeats` times.
///
/// Panics if two repeats of the same market report different op counts;
/// the solver is deterministic so that would be a bug.
pub fn measure(
    family: Family,
    sizes: &[usize],
    ratio: f64,
    seed: u64,
    repeats: usize,
) -> Result<Vec<ScalingRow>, GenError> {
    sizes
        .iter()
        .map(|&houses| {
            let agents = agents_for(houses, ratio);
            let market = family.generate(GenParams::new(agents, houses, seed))?;
            let mut best: Option<(u128, SolveOutcome)> = None;
            for _ in 0..repeats.max(1) {
                let t = Instant::now();
                let out = htts_solve(&market);
                let ns = t.elapsed().as_nanos();
                if let Some((_, prev)) = &best {
                    assert_eq!(prev.ops, out.ops, "op counts differ across repeats");
                }
                if best.as_ref().map_or(true, |(b, _)| ns < *b) {
                    best = Some((ns, out));
                }
            }
            let (wall_ns, out) = best.expect("at least one repeat");
            Ok(ScalingRow {
                houses,
                agents,
                wall_ns,
                ops: out.ops,
                steps: out.trace.len(),
                core_found: out.is_core_found(),
            })
        })
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`. `None` with fewer than two
/// distinct positive `x` values.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// Slope of total operations against house count.
pub fn ops_slope(rows: &[ScalingRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.houses as f64, r.ops.total() as f64))
        .collect();
    loglog_slope(&pts)
}
