//! Solver-independent checkers shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use htts_core::{
    build_pointing_graph, condensation, random_market, tarjan_scc, AgentId, Allocation, Digraph,
    GenParams, HouseId, HouseSet, Market, SolveOutcome, SplitMix64, Verdict,
};

pub fn fixture(name: &str) -> String {
    let path = format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

/// Random market with `agents` in `1..=max_agents` and `houses` in `1..=agents`,
/// both drawn from `seed`.
pub fn small_random_market(seed: u64, max_agents: usize) -> Market {
    let mut rng = SplitMix64::new(seed ^ 0xA5A5_0000);
    let agents = 1 + rng.below(max_agents);
    let houses = 1 + rng.below(agents);
    random_market(GenParams::new(agents, houses, seed)).unwrap()
}

/// Random market with one copy of every type.
pub fn injective_market(seed: u64, min_agents: usize, max_agents: usize) -> Market {
    let mut rng = SplitMix64::new(seed ^ 0x5A5A_0000);
    let agents = min_agents + rng.below(max_agents - min_agents + 1);
    random_market(GenParams::new(agents, agents, seed)).unwrap()
}

/// First type of `i`'s ranking inside `remaining`, by a plain scan.
pub fn top_in(market: &Market, i: AgentId, remaining: &BTreeSet<HouseId>) -> HouseId {
    market
        .prefs(i)
        .iter()
        .find(|h| remaining.contains(h))
        .expect("remaining set contains a type")
}

/// Arcs h -> top(i) for every owner i of every remaining type h.
pub fn naive_pointing_arcs(
    market: &Market,
    remaining: &BTreeSet<HouseId>,
) -> BTreeSet<(HouseId, HouseId)> {
    let mut arcs = BTreeSet::new();
    for i in market.agent_ids() {
        let h = market.endowment(i);
        if remaining.contains(&h) {
            arcs.insert((h, top_in(market, i, remaining)));
        }
    }
    arcs
}

fn reachable(arcs: &BTreeSet<(HouseId, HouseId)>, from: HouseId) -> BTreeSet<HouseId> {
    let mut seen = BTreeSet::from([from]);
    let mut todo = vec![from];
    while let Some(u) = todo.pop() {
        for &(a, b) in arcs.range((u, HouseId(0))..) {
            if a != u {
                break;
            }
            if seen.insert(b) {
                todo.push(b);
            }
        }
    }
    seen
}

/// Kahn's algorithm; self-loops count as cycles.
pub fn is_acyclic(g: &Digraph) -> bool {
    let n = g.vertex_count();
    let mut indeg = vec![0usize; n];
    for (_, v) in g.arcs() {
        indeg[v] += 1;
    }
    let mut ready: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut removed = 0;
    while let Some(u) = ready.pop() {
        removed += 1;
        for &v in g.successors(u) {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                ready.push(v);
            }
        }
    }
    removed == n
}

/// Tarjan's components partition the vertices and every cross arc points to
/// an earlier-emitted component.
pub fn check_tarjan(g: &Digraph, out: &mut Vec<String>) {
    let scc = tarjan_scc(g);
    let mut seen = vec![0usize; g.vertex_count()];
    for (c, comp) in scc.components.iter().enumerate() {
        for &v in comp {
            seen[v] += 1;
            if scc.component_of[v] != c {
                out.push(format!("component_of[{v}] disagrees with emission"));
            }
        }
    }
    if seen.iter().any(|&k| k != 1) {
        out.push("tarjan components do not partition the vertices".into());
    }
    for (u, v) in g.arcs() {
        let (cu, cv) = (scc.component_of[u], scc.component_of[v]);
        if cu != cv && cv > cu {
            out.push(format!("arc {u}->{v} runs to a later-emitted component"));
        }
    }
    if !is_acyclic(&condensation(g)) {
        out.push("condensation has a cycle".into());
    }
}

/// Every structural property of a solve, checked without the solver's own
/// bookkeeping. Returns one message per violation.
pub fn invariant_violations(market: &Market, outcome: &SolveOutcome) -> Vec<String> {
    let mut out = Vec::new();
    let mut remaining: BTreeSet<HouseId> = market.houses().collect();
    let mut assigned: Vec<Option<HouseId>> = vec![None; market.agent_count()];

    if outcome.trace.len() > market.house_count() {
        out.push(format!(
            "{} steps for {} types",
            outcome.trace.len(),
            market.house_count()
        ));
    }

    for (d, seg) in outcome.trace.iter().enumerate() {
        let tag = format!("step {}", d + 1);
        if seg.step != d + 1 {
            out.push(format!("{tag}: numbered {}", seg.step));
        }
        let houses: BTreeSet<HouseId> = seg.houses.iter().copied().collect();
        if houses.is_empty() || !houses.is_subset(&remaining) {
            out.push(format!("{tag}: segment is empty or reuses a removed type"));
        }

        // Sink SCC of the pointing graph, checked on an independently built arc set.
        let arcs = naive_pointing_arcs(market, &remaining);
        let rebuilt = build_pointing_graph(
            market,
            &HouseSet::from_houses(market.house_count(), remaining.iter().copied()),
        );
        if rebuilt.house_arcs().into_iter().collect::<BTreeSet<_>>() != arcs {
            out.push(format!("{tag}: pointing graph arcs differ from definition"));
        }
        if arcs
            .iter()
            .any(|(a, b)| houses.contains(a) && !houses.contains(b))
        {
            out.push(format!("{tag}: segment has an outgoing arc"));
        }
        if let Some(&first) = houses.iter().next() {
            if reachable(&arcs, first) != houses {
                out.push(format!("{tag}: segment is not strongly connected"));
            }
        }
        check_tarjan(&rebuilt.graph, &mut out);

        // Owners are exactly the remaining agents endowed inside the segment.
        let owners: BTreeSet<AgentId> = seg.owners.iter().copied().collect();
        let expected: BTreeSet<AgentId> = market
            .agent_ids()
            .filter(|&i| assigned[i.0].is_none() && houses.contains(&market.endowment(i)))
            .collect();
        if owners != expected || owners.len() != seg.owners.len() {
            out.push(format!(
                "{tag}: owners are not the segment's endowment preimage"
            ));
        }

        // Top choice and containment.
        let mut demand = std::collections::BTreeMap::new();
        for &i in &owners {
            *demand
                .entry(top_in(market, i, &remaining))
                .or_insert(0usize) += 1;
        }
        let assignment: BTreeSet<(AgentId, HouseId)> = seg.assignment.iter().copied().collect();
        let expected: BTreeSet<(AgentId, HouseId)> = owners
            .iter()
            .map(|&i| (i, top_in(market, i, &remaining)))
            .collect();
        if assignment != expected {
            out.push(format!(
                "{tag}: assignment is not each owner's top remaining type"
            ));
        }
        if assignment.iter().any(|(_, h)| !houses.contains(h)) {
            out.push(format!("{tag}: an owner points outside the segment"));
        }

        // Feasibility flag agrees with per-type supply and demand.
        let balanced = houses.iter().all(|&h| {
            let supply = owners.iter().filter(|&&i| market.endowment(i) == h).count();
            supply == demand.get(&h).copied().unwrap_or(0)
        });
        if balanced != seg.feasible {
            out.push(format!(
                "{tag}: feasible={} but supply/demand balance is {balanced}",
                seg.feasible
            ));
        }
        if !seg.feasible {
            if d + 1 != outcome.trace.len() {
                out.push(format!("{tag}: infeasible segment is not the last"));
            }
            break;
        }
        for &(i, h) in &seg.assignment {
            assigned[i.0] = Some(h);
        }
        for h in &houses {
            remaining.remove(h);
        }
    }

    match &outcome.verdict {
        Verdict::CoreFound(mu) => {
            if !remaining.is_empty() || assigned.iter().any(Option::is_none) {
                out.push("core found but segments do not partition types and agents".into());
            }
            if outcome.trace.iter().any(|s| !s.feasible) {
                out.push("core found with an infeasible segment".into());
            }
            for i in market.agent_ids() {
                if assigned[i.0] != Some(mu.house_of(i)) {
                    out.push(format!("agent {} allocation differs from its segment", i.0));
                }
            }
            check_allocation(market, mu, &mut out);
        }
        Verdict::EmptyCore { failed_step } => {
            if outcome.trace.last().map(|s| (s.step, s.feasible)) != Some((*failed_step, false)) {
                out.push(format!(
                    "empty core at step {failed_step} but trace disagrees"
                ));
            }
        }
    }
    out
}

/// Multiset conservation and individual rationality.
pub fn check_allocation(market: &Market, mu: &Allocation, out: &mut Vec<String>) {
    let mut endowed = vec![0i64; market.house_count()];
    for i in market.agent_ids() {
        endowed[market.endowment(i).0] += 1;
        endowed[mu.house_of(i).0] -= 1;
        if market
            .prefs(i)
            .strictly_prefers(market.endowment(i), mu.house_of(i))
        {
            out.push(format!(
                "agent {} is worse off than at their endowment",
                i.0
            ));
        }
    }
    if endowed.iter().any(|&k| k != 0) {
        out.push("allocation does not conserve the endowment multiset".into());
    }
}
