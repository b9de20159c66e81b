//! House Top Trading Segments.
//!
//! Each step builds the pointing graph on the remaining house types (type
//! `h` points at `h'` when some owner of `h` likes `h'` best among what is
//! left), takes a strongly connected component with no outgoing arcs, gives
//! every owner in it their favourite remaining type and checks that, for each
//! type in the segment, the number of owners wanting it equals the number of
//! copies the segment owns. If any segment fails the check the strict core is
//! empty. Otherwise the segments partition the market and the assembled
//! allocation is its unique strict-core allocation.
//!
//! Agents leave together with their endowed type. Each agent keeps a cursor
//! into their ranking that only moves forward past retired types, so the
//! total cursor movement over a solve is at most `|H|` per agent.

use std::fmt;

use crate::digraph::{Digraph, DigraphBuilder, Tarjan, TarjanScratch};
use crate::gen::SplitMix64;
use crate::market::{AgentId, Allocation, HouseId, HouseSet, Market, NameSet};

/// Operation counts for a solve. All three are monotone during a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounter {
    /// Pointer evaluations (one per remaining agent per step) plus
    /// preference-cursor advances.
    pub arcs_built: u64,
    /// Vertices discovered and arcs examined by Tarjan's search.
    pub scc_work: u64,
    /// Supply and demand tallies plus per-type comparisons.
    pub feasibility_comparisons: u64,
}

impl OpCounter {
    pub fn total(&self) -> u64 {
        self.arcs_built + self.scc_work + self.feasibility_comparisons
    }
}

impl std::ops::AddAssign for OpCounter {
    fn add_assign(&mut self, rhs: Self) {
        self.arcs_built += rhs.arcs_built;
        self.scc_work += rhs.scc_work;
        self.feasibility_comparisons += rhs.feasibility_comparisons;
    }
}

/// One step's trading segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    /// 1-based.
    pub step: usize,
    /// Ascending.
    pub houses: Vec<HouseId>,
    /// Ascending.
    pub owners: Vec<AgentId>,
    /// `(agent, favourite remaining type)` for each owner, in `owners` order.
    pub assignment: Vec<(AgentId, HouseId)>,
    pub feasible: bool,
}

impl Segment {
    /// `step=<d> houses={..} owners={..} feasible=<bool>` using market names.
    pub fn display<'a>(&'a self, market: &'a Market) -> SegmentDisplay<'a> {
        SegmentDisplay {
            segment: self,
            market,
        }
    }
}

pub struct SegmentDisplay<'a> {
    segment: &'a Segment,
    market: &'a Market,
}

impl fmt::Display for SegmentDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.segment;
        let houses = NameSet(
            s.houses
                .iter()
                .map(|&h| self.market.house_name(h))
                .collect(),
        );
        let owners = NameSet(
            s.owners
                .iter()
                .map(|&i| self.market.agent_name(i))
                .collect(),
        );
        write!(
            f,
            "step={} houses={} owners={} feasible={}",
            s.step, houses, owners, s.feasible
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    CoreFound(Allocation),
    /// The segment at `failed_step` (1-based) failed the supply/demand check.
    EmptyCore {
        failed_step: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOutcome {
    pub verdict: Verdict,
    /// Every segment processed. On an empty core the last one is infeasible.
    pub trace: Vec<Segment>,
    pub ops: OpCounter,
}

impl SolveOutcome {
    pub fn allocation(&self) -> Option<&Allocation> {
        match &self.verdict {
            Verdict::CoreFound(a) => Some(a),
            Verdict::EmptyCore { .. } => None,
        }
    }

    pub fn is_core_found(&self) -> bool {
        matches!(self.verdict, Verdict::CoreFound(_))
    }
}

/// Pointing graph on a set of remaining house types. Vertex `v` is
/// `houses[v]`; `houses` is ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointingGraph {
    pub houses: Vec<HouseId>,
    pub graph: Digraph,
}

impl PointingGraph {
    pub fn vertex_of(&self, h: HouseId) -> Option<usize> {
        self.houses.binary_search(&h).ok()
    }

    /// Arcs as house-type pairs.
    pub fn house_arcs(&self) -> Vec<(HouseId, HouseId)> {
        self.graph
            .arcs()
            .map(|(u, v)| (self.houses[u], self.houses[v]))
            .collect()
    }
}

/// Builds the pointing graph for `remaining` from scratch.
///
/// The remaining agents are the owners of the remaining types.
pub fn build_pointing_graph(market: &Market, remaining: &HouseSet) -> PointingGraph {
    let mut state = SolverState::new(market);
    for h in market.houses().filter(|&h| !remaining.contains(h)) {
        state.alive[h.0] = false;
    }
    state.remaining.retain(|&h| remaining.contains(h));
    let graph = state.build_graph();
    PointingGraph {
        houses: state.remaining,
        graph,
    }
}

/// Supply equals demand for every type in the segment: the number of copies
/// of `h` owned by `owners` matches the number of owners whose favourite
/// type among `remaining` is `h`.
pub fn check_feasibility(
    market: &Market,
    segment_houses: &[HouseId],
    owners: &[AgentId],
    remaining: &HouseSet,
) -> bool {
    let mut supply = vec![0usize; market.house_count()];
    let mut demand = vec![0usize; market.house_count()];
    for &i in owners {
        supply[market.endowment(i).0] += 1;
        if let Ok(best) = market.best_house(i, remaining) {
            demand[best.0] += 1;
        }
    }
    segment_houses.iter().all(|h| supply[h.0] == demand[h.0])
}

/// Runs the algorithm with depth-first starts in ascending type order.
pub fn htts_solve(market: &Market) -> SolveOutcome {
    SolverState::new(market).run(None)
}

/// Like [`htts_solve`], but Tarjan's start order at each step is a
/// permutation drawn from `seed`. When several sink components exist a
/// different one may be traded first; verdict and allocation do not change.
pub fn solve_with_tiebreak(market: &Market, seed: u64) -> SolveOutcome {
    SolverState::new(market).run(Some(SplitMix64::new(seed)))
}

struct SolverState<'m> {
    market: &'m Market,
    alive: Vec<bool>,
    // Ascending ids of live house types.
    remaining: Vec<HouseId>,
    // cursor[i]: position in agent i's ranking of their favourite live type,
    // or of some earlier retired type not yet skipped.
    cursor: Vec<usize>,
    // pointer[i]: favourite live type, valid after build_graph.
    pointer: Vec<HouseId>,
    // vertex[h]: index of h in `remaining` during the current step.
    vertex: Vec<usize>,
    // Scratch marker for arc dedup and feasibility tallies.
    stamp: Vec<usize>,
    demand: Vec<usize>,
    ops: OpCounter,
}

impl<'m> SolverState<'m> {
    fn new(market: &'m Market) -> Self {
        let hc = market.house_count();
        SolverState {
            market,
            alive: vec![true; hc],
            remaining: market.houses().collect(),
            cursor: vec![0; market.agent_count()],
            pointer: vec![HouseId(usize::MAX); market.agent_count()],
            vertex: vec![usize::MAX; hc],
            stamp: vec![usize::MAX; hc],
            demand: vec![0; hc],
            ops: OpCounter::default(),
        }
    }

    fn advance_cursor(&mut self, i: AgentId) -> HouseId {
        let prefs = self.market.prefs(i);
        let mut pos = self.cursor[i.0];
        let mut h = prefs.at(pos);
        while !self.alive[h.0] {
            pos += 1;
            h = prefs.at(pos);
            self.ops.arcs_built += 1;
        }
        self.cursor[i.0] = pos;
        h
    }

    fn build_graph(&mut self) -> Digraph {
        for (v, &h) in self.remaining.iter().enumerate() {
            self.vertex[h.0] = v;
        }
        let market = self.market;
        let mut builder = DigraphBuilder::with_capacity(self.remaining.len(), self.remaining.len());
        for v in 0..self.remaining.len() {
            let h = self.remaining[v];
            let mut out = builder.open_vertex();
            for &i in market.owners(h) {
                let best = self.advance_cursor(i);
                self.pointer[i.0] = best;
                self.ops.arcs_built += 1;
                let w = self.vertex[best.0];
                if self.stamp[w] != v {
                    self.stamp[w] = v;
                    out.push(w);
                }
            }
            out.close();
        }
        // Vertex ids are reused next step, so clear the dedup marker.
        for s in &mut self.stamp[..self.remaining.len()] {
            *s = usize::MAX;
        }
        builder.finish()
    }

    fn run(mut self, mut tiebreak: Option<SplitMix64>) -> SolveOutcome {
        let market = self.market;
        let mut assignment = vec![HouseId(usize::MAX); market.agent_count()];
        let mut trace = Vec::new();
        let mut scratch = TarjanScratch::default();

        while !self.remaining.is_empty() {
            let step = trace.len() + 1;
            let graph = self.build_graph();

            let starts = tiebreak.as_mut().map(|rng| {
                let mut order: Vec<usize> = (0..graph.vertex_count()).collect();
                rng.shuffle(&mut order);
                order
            });
            let mut tarjan = Tarjan::with_scratch(&graph, starts, std::mem::take(&mut scratch));
            let sink = tarjan.next().expect("non-empty graph has a sink component");
            self.ops.scc_work += tarjan.work();
            scratch = tarjan.into_scratch();

            let houses: Vec<HouseId> = sink.iter().map(|&v| self.remaining[v]).collect();
            let mut owners: Vec<AgentId> = houses
                .iter()
                .flat_map(|&h| market.owners(h).iter().copied())
                .collect();
            owners.sort_unstable();
            let segment_assignment: Vec<(AgentId, HouseId)> =
                owners.iter().map(|&i| (i, self.pointer[i.0])).collect();

            for &(_, h) in &segment_assignment {
                // A sink component keeps every owner's favourite inside it.
                debug_assert!(houses.binary_search(&h).is_ok());
                self.demand[h.0] += 1;
                self.ops.feasibility_comparisons += 1;
            }
            let mut feasible = true;
            for &h in &houses {
                self.ops.feasibility_comparisons += 1;
                if self.demand[h.0] != market.endowment_count(h) {
                    feasible = false;
                }
            }
            for &(_, h) in &segment_assignment {
                self.demand[h.0] = 0;
            }

            trace.push(Segment {
                step,
                houses,
                owners,
                assignment: segment_assignment,
                feasible,
            });
            let segment = trace.last().expect("just pushed");
            if !feasible {
                return SolveOutcome {
                    verdict: Verdict::EmptyCore { failed_step: step },
                    trace,
                    ops: self.ops,
                };
            }

            for &(i, h) in &segment.assignment {
                assignment[i.0] = h;
            }
            for &h in &segment.houses {
                self.alive[h.0] = false;
            }
            let alive = &self.alive;
            self.remaining.retain(|h| alive[h.0]);
        }

        SolveOutcome {
            verdict: Verdict::CoreFound(Allocation::new_unchecked(assignment)),
            trace,
            ops: self.ops,
        }
    }
}
