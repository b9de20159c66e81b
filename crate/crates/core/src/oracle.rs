//! Exponential-time ground truth for small markets.
//!
//! Everything here works straight from the definitions: an allocation is in
//! the strict core when no coalition can redistribute its own endowment so
//! that every member is at least as well off and someone is strictly better
//! off. None of it shares code with the solver.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::market::{AgentId, Allocation, HouseId, Market, NameSet};

pub const DEFAULT_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("market has {agents} agents; the oracle is capped at {cap}")]
    CapExceeded { agents: usize, cap: usize },
    #[error("top trading cycles needs exactly one owner per house type")]
    NonInjectiveEndowment,
}

/// A coalition and a redistribution of its own endowment that blocks an
/// allocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockingCertificate {
    /// Ascending.
    pub coalition: Vec<AgentId>,
    /// One entry per coalition member, same order.
    pub sub_allocation: Vec<(AgentId, HouseId)>,
}

impl BlockingCertificate {
    /// Re-checks the certificate against `mu` from first principles.
    pub fn blocks(&self, market: &Market, mu: &Allocation) -> bool {
        if self.coalition.is_empty() || self.coalition.len() != self.sub_allocation.len() {
            return false;
        }
        let mut endowed: Vec<HouseId> = self
            .coalition
            .iter()
            .map(|&i| market.endowment(i))
            .collect();
        let mut received: Vec<HouseId> = self.sub_allocation.iter().map(|&(_, h)| h).collect();
        endowed.sort();
        received.sort();
        let members: BTreeSet<AgentId> = self.coalition.iter().copied().collect();
        let assigned: BTreeSet<AgentId> = self.sub_allocation.iter().map(|&(i, _)| i).collect();
        if endowed != received || members != assigned || members.len() != self.coalition.len() {
            return false;
        }
        let weak = self
            .sub_allocation
            .iter()
            .all(|&(i, h)| market.prefs(i).weakly_prefers(h, mu.house_of(i)));
        let strict = self
            .sub_allocation
            .iter()
            .any(|&(i, h)| market.prefs(i).strictly_prefers(h, mu.house_of(i)));
        weak && strict
    }

    pub fn display<'a>(&'a self, market: &'a Market) -> CertificateDisplay<'a> {
        CertificateDisplay { cert: self, market }
    }
}

pub struct CertificateDisplay<'a> {
    cert: &'a BlockingCertificate,
    market: &'a Market,
}

impl fmt::Display for CertificateDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.market;
        let members = NameSet(
            self.cert
                .coalition
                .iter()
                .map(|&i| m.agent_name(i))
                .collect(),
        );
        write!(f, "coalition {members}")?;
        for (k, &(i, h)) in self.cert.sub_allocation.iter().enumerate() {
            let sep = if k == 0 { ":" } else { "," };
            write!(f, "{sep} {} -> {}", m.agent_name(i), m.house_name(h))?;
        }
        Ok(())
    }
}

fn check_cap(market: &Market, cap: usize) -> Result<(), OracleError> {
    if market.agent_count() > cap {
        return Err(OracleError::CapExceeded {
            agents: market.agent_count(),
            cap,
        });
    }
    Ok(())
}

/// Steps `items` to the next lexicographic permutation. Returns false once
/// the sequence is the last permutation. Equal items are never swapped with
/// each other, so a multiset is visited without repeats.
fn next_permutation<T: Ord>(items: &mut [T]) -> bool {
    if items.len() < 2 {
        return false;
    }
    let Some(i) = (0..items.len() - 1)
        .rev()
        .find(|&i| items[i] < items[i + 1])
    else {
        return false;
    };
    let j = (i + 1..items.len())
        .rev()
        .find(|&j| items[i] < items[j])
        .expect("pivot has a successor");
    items.swap(i, j);
    items[i + 1..].reverse();
    true
}

/// Iterator over every allocation of a market, each exactly once.
pub struct FeasibleAllocations {
    current: Option<Vec<HouseId>>,
}

impl Iterator for FeasibleAllocations {
    type Item = Allocation;

    fn next(&mut self) -> Option<Allocation> {
        let current = self.current.as_mut()?;
        let out = Allocation::new_unchecked(current.clone());
        if !next_permutation(current) {
            self.current = None;
        }
        Some(out)
    }
}

/// All allocations (distinct agent-to-type maps matching the endowment
/// multiset), with the default cap.
pub fn enumerate_feasible_allocations(market: &Market) -> Result<FeasibleAllocations, OracleError> {
    enumerate_feasible_allocations_capped(market, DEFAULT_CAP)
}

pub fn enumerate_feasible_allocations_capped(
    market: &Market,
    cap: usize,
) -> Result<FeasibleAllocations, OracleError> {
    check_cap(market, cap)?;
    let mut start: Vec<HouseId> = market.agent_ids().map(|i| market.endowment(i)).collect();
    start.sort();
    Ok(FeasibleAllocations {
        current: Some(start),
    })
}

/// Searches every non-empty coalition for a blocking redistribution of its
/// endowment. `None` means `mu` is in the strict core.
pub fn find_blocking_coalition(
    market: &Market,
    mu: &Allocation,
) -> Result<Option<BlockingCertificate>, OracleError> {
    find_blocking_coalition_capped(market, mu, DEFAULT_CAP)
}

pub fn find_blocking_coalition_capped(
    market: &Market,
    mu: &Allocation,
    cap: usize,
) -> Result<Option<BlockingCertificate>, OracleError> {
    check_cap(market, cap)?;
    let n = market.agent_count();
    // Small coalitions first: cheaper, and certificates come out minimal.
    let mut masks: Vec<u32> = (1..(1u32 << n)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    for mask in masks {
        let coalition: Vec<AgentId> = (0..n)
            .filter(|&i| mask >> i & 1 == 1)
            .map(AgentId)
            .collect();
        if let Some(cert) = block_with(market, mu, &coalition) {
            return Ok(Some(cert));
        }
    }
    Ok(None)
}

/// Looks for a blocking redistribution among exactly `coalition`.
pub fn block_with(
    market: &Market,
    mu: &Allocation,
    coalition: &[AgentId],
) -> Option<BlockingCertificate> {
    // Pool of the coalition's endowed copies, as (type, count).
    let mut pool: Vec<(HouseId, usize)> = Vec::new();
    for &i in coalition {
        let e = market.endowment(i);
        match pool.iter_mut().find(|(h, _)| *h == e) {
            Some((_, c)) => *c += 1,
            None => pool.push((e, 1)),
        }
    }
    let mut chosen = Vec::with_capacity(coalition.len());
    if search(market, mu, coalition, &mut pool, &mut chosen, false) {
        Some(BlockingCertificate {
            coalition: coalition.to_vec(),
            sub_allocation: coalition.iter().copied().zip(chosen).collect(),
        })
    } else {
        None
    }
}

// Depth-first over assignments of pool copies to members, restricted to types
// each member weakly prefers to what `mu` gives them.
fn search(
    market: &Market,
    mu: &Allocation,
    coalition: &[AgentId],
    pool: &mut [(HouseId, usize)],
    chosen: &mut Vec<HouseId>,
    improved: bool,
) -> bool {
    let k = chosen.len();
    if k == coalition.len() {
        return improved;
    }
    let i = coalition[k];
    let current = mu.house_of(i);
    let prefs = market.prefs(i);
    for slot in 0..pool.len() {
        let (h, count) = pool[slot];
        if count == 0 || !prefs.weakly_prefers(h, current) {
            continue;
        }
        pool[slot].1 -= 1;
        chosen.push(h);
        let found = search(
            market,
            mu,
            coalition,
            pool,
            chosen,
            improved || prefs.strictly_prefers(h, current),
        );
        if found {
            return true;
        }
        chosen.pop();
        pool[slot].1 += 1;
    }
    false
}

/// Every strict-core allocation, by exhaustive search.
pub fn enumerate_strict_core(market: &Market) -> Result<Vec<Allocation>, OracleError> {
    enumerate_strict_core_capped(market, DEFAULT_CAP)
}

pub fn enumerate_strict_core_capped(
    market: &Market,
    cap: usize,
) -> Result<Vec<Allocation>, OracleError> {
    let mut core = Vec::new();
    for mu in enumerate_feasible_allocations_capped(market, cap)? {
        if find_blocking_coalition_capped(market, &mu, cap)?.is_none() {
            core.push(mu);
        }
    }
    Ok(core)
}

/// Gale's top trading cycles for markets where every type has one owner.
///
/// Each remaining agent points at the owner of their favourite remaining
/// house. Starting from the lowest-id remaining agent, follow pointers until
/// an agent repeats; everyone on that cycle receives the house they point at
/// and leaves.
pub fn ttc_solve(market: &Market) -> Result<Allocation, OracleError> {
    if !market.is_injective() {
        return Err(OracleError::NonInjectiveEndowment);
    }
    let n = market.agent_count();
    let owner_of = |h: HouseId| market.owners(h)[0];
    let mut assigned: Vec<Option<HouseId>> = vec![None; n];
    let mut left = n;
    while left > 0 {
        let favourite = |i: AgentId| {
            market
                .prefs(i)
                .iter()
                .find(|&h| assigned[owner_of(h).0].is_none())
                .expect("some house remains")
        };
        let start = AgentId((0..n).find(|&i| assigned[i].is_none()).expect("left > 0"));
        let mut path = vec![start];
        let cycle_start = loop {
            let next = owner_of(favourite(*path.last().unwrap()));
            if let Some(pos) = path.iter().position(|&a| a == next) {
                break pos;
            }
            path.push(next);
        };
        let trades: Vec<(AgentId, HouseId)> = path[cycle_start..]
            .iter()
            .map(|&i| (i, favourite(i)))
            .collect();
        for (i, h) in trades {
            assigned[i.0] = Some(h);
            left -= 1;
        }
    }
    Ok(Allocation::new_unchecked(
        assigned
            .into_iter()
            .map(|h| h.expect("all assigned"))
            .collect(),
    ))
}
