//! Seeded, platform-independent market generation.
//!
//! The procedure is fixed so that fixtures can be regenerated in any language:
//!
//! * Random words come from splitmix64: `state += 0x9E3779B97F4A7C15`, then
//!   `z = state; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
//!   z = (z ^ (z >> 27)) * 0x94D049BB133111EB; z ^ (z >> 31)` (wrapping).
//!   The initial state is the seed.
//! * A bounded draw `below(n)` is the high 64 bits of the 128-bit product
//!   `next() * n`.
//! * A shuffle is Fisher–Yates from the back: for `i` in `n-1` down to `1`,
//!   swap positions `i` and `below(i + 1)`.
//!
//! [`random_market`] consumes the stream in this order: the endowment vector
//! `[0, 1, .., H-1]` followed by `I - H` draws of `below(H)`; a shuffle of that
//! vector; then for each agent in order, a shuffle of `[0, .., H-1]` as the
//! ranking.

use std::collections::HashMap;

use thiserror::Error;

use crate::market::{HouseId, Market, PreferenceOrder};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid parameters: need 1 <= houses ({houses}) <= agents ({agents})")]
    InvalidParams { agents: usize, houses: usize },
}

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform-ish value in `0..n`. `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenParams {
    pub agent_count: usize,
    pub house_count: usize,
    pub seed: u64,
}

impl GenParams {
    pub fn new(agent_count: usize, house_count: usize, seed: u64) -> Self {
        GenParams {
            agent_count,
            house_count,
            seed,
        }
    }

    fn check(&self) -> Result<(), GenError> {
        if self.house_count == 0 || self.house_count > self.agent_count {
            return Err(GenError::InvalidParams {
                agents: self.agent_count,
                houses: self.house_count,
            });
        }
        Ok(())
    }
}

fn random_endowments(rng: &mut SplitMix64, params: GenParams) -> Vec<HouseId> {
    let h = params.house_count;
    let mut endow: Vec<usize> = (0..h).collect();
    endow.extend((h..params.agent_count).map(|_| rng.below(h)));
    rng.shuffle(&mut endow);
    endow.into_iter().map(HouseId).collect()
}

/// Market with uniform random endowments (every type owned at least once)
/// and independent uniform random rankings.
pub fn random_market(params: GenParams) -> Result<Market, GenError> {
    params.check()?;
    let h = params.house_count;
    let mut rng = SplitMix64::new(params.seed);
    let endow = random_endowments(&mut rng, params);
    let agents = endow
        .into_iter()
        .map(|e| {
            let mut ranking: Vec<HouseId> = (0..h).map(HouseId).collect();
            rng.shuffle(&mut ranking);
            (
                e,
                PreferenceOrder::from_ranking(ranking).expect("shuffle is a permutation"),
            )
        })
        .collect();
    Ok(Market::from_orders(h, agents).expect("generator output is valid"))
}

/// Large-market variant of [`random_market`]: endowments are drawn the same
/// way, but each agent ranks only `prefix_len` uniformly random distinct types
/// explicitly (a partial Fisher–Yates from the front: for `k` in
/// `0..prefix_len`, swap positions `k` and `k + below(H - k)`), followed by
/// every other type in ascending order. Memory is proportional to
/// `agents * prefix_len` instead of `agents * houses`.
pub fn random_prefix_market(params: GenParams, prefix_len: usize) -> Result<Market, GenError> {
    params.check()?;
    let h = params.house_count;
    let k = prefix_len.min(h);
    let mut rng = SplitMix64::new(params.seed);
    let endow = random_endowments(&mut rng, params);
    // Sparse Fisher-Yates: only displaced positions are stored.
    let mut displaced: HashMap<usize, usize> = HashMap::new();
    let agents = endow
        .into_iter()
        .map(|e| {
            displaced.clear();
            let head: Vec<HouseId> = (0..k)
                .map(|pos| {
                    let j = pos + rng.below(h - pos);
                    let at_j = *displaced.get(&j).unwrap_or(&j);
                    let at_pos = *displaced.get(&pos).unwrap_or(&pos);
                    displaced.insert(j, at_pos);
                    HouseId(at_j)
                })
                .collect();
            (
                e,
                PreferenceOrder::with_ascending_tail(h, head).expect("distinct head"),
            )
        })
        .collect();
    Ok(Market::from_orders(h, agents).expect("generator output is valid"))
}

/// Deterministic worst case for step count: every agent ranks their own
/// type first and the rest ascending, so each solver step retires exactly one
/// house type. Agents are endowed round-robin over the types.
pub fn staircase_market(params: GenParams) -> Result<Market, GenError> {
    params.check()?;
    let h = params.house_count;
    let agents = (0..params.agent_count)
        .map(|i| {
            let own = HouseId(i % h);
            let prefs = PreferenceOrder::with_ascending_tail(h, vec![own]).expect("single head");
            (own, prefs)
        })
        .collect();
    Ok(Market::from_orders(h, agents).expect("staircase output is valid"))
}
