//! House-swapping markets where copies of a house type are interchangeable.
//!
//! A [`Market`] holds dense integer ids for agents and house types. External
//! names live only in the symbol table and are used for parsing and display.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Index of a house type, in `0..market.house_count()`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HouseId(pub usize);

/// Index of an agent, in `0..market.agent_count()`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentId(pub usize);

impl HouseId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl AgentId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MarketError {
    #[error("agent `{agent}` does not rank every house type")]
    IncompletePreferences { agent: String },
    #[error("agent `{agent}` lists house `{house}` more than once")]
    DuplicateInPreferences { agent: String, house: String },
    #[error("house type `{house}` is not owned by any agent")]
    UnendowedHouseType { house: String },
    #[error("agent `{agent}` refers to unknown house `{house}`")]
    UnknownHouse { agent: String, house: String },
    #[error("house name `{0}` is declared more than once")]
    DuplicateHouseName(String),
    #[error("agent name `{0}` is declared more than once")]
    DuplicateAgentName(String),
    #[error("invalid name `{0}`: names must be non-empty and contain no whitespace")]
    InvalidName(String),
    #[error("best house requested over an empty set")]
    EmptyRemainingSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AllocationError {
    #[error("allocation has {got} entries but the market has {expected} agents")]
    WrongLength { expected: usize, got: usize },
    #[error("house id {0} is out of range")]
    UnknownHouse(usize),
    #[error("house type `{house}` is assigned {assigned} times but {endowed} copies exist")]
    MultisetMismatch {
        house: String,
        endowed: usize,
        assigned: usize,
    },
}

/// Unvalidated agent description, with houses referenced by name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawAgent {
    pub name: String,
    pub endowment: String,
    pub prefs: Vec<String>,
}

/// Unvalidated market description. Turn it into a [`Market`] with
/// [`RawMarket::validate`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawMarket {
    pub houses: Vec<String>,
    pub agents: Vec<RawAgent>,
}

impl RawMarket {
    pub fn validate(&self) -> Result<Market, MarketError> {
        validate_market(self)
    }
}

/// A complete strict ranking of all house types, most preferred first.
///
/// The ranking is stored as an explicit head followed by every remaining type
/// in ascending id order. A fully explicit ranking has an empty tail. Large
/// generated markets use a short head so that storage stays proportional to
/// the head rather than to the number of types.
#[derive(Debug, Clone)]
pub struct PreferenceOrder {
    head: Vec<u32>,
    ranks: Ranks,
}

#[derive(Debug, Clone)]
enum Ranks {
    // rank[h] for every type; head covers all types.
    Full(Vec<u32>),
    // (type, position) for head entries, sorted by type; the rest is the
    // ascending tail. `house_count` is the total number of types.
    Sparse {
        sorted: Vec<(u32, u32)>,
        house_count: u32,
    },
}

impl PreferenceOrder {
    /// Builds an order from a permutation of `0..ranking.len()`.
    ///
    /// Returns `None` if `ranking` is not a permutation.
    pub fn from_ranking(ranking: Vec<HouseId>) -> Option<Self> {
        let n = ranking.len();
        let mut rank = vec![u32::MAX; n];
        for (pos, h) in ranking.iter().enumerate() {
            if h.0 >= n || rank[h.0] != u32::MAX {
                return None;
            }
            rank[h.0] = pos as u32;
        }
        Some(PreferenceOrder {
            head: ranking.iter().map(|h| h.0 as u32).collect(),
            ranks: Ranks::Full(rank),
        })
    }

    /// `head` in the given order, then all other types ascending.
    ///
    /// Returns `None` if `head` repeats a type or names one out of range.
    pub fn with_ascending_tail(house_count: usize, head: Vec<HouseId>) -> Option<Self> {
        let mut sorted: Vec<(u32, u32)> = head
            .iter()
            .enumerate()
            .map(|(pos, h)| (h.0 as u32, pos as u32))
            .collect();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0].0 == w[1].0) || head.iter().any(|h| h.0 >= house_count) {
            return None;
        }
        Some(PreferenceOrder {
            head: head.iter().map(|h| h.0 as u32).collect(),
            ranks: Ranks::Sparse {
                sorted,
                house_count: house_count as u32,
            },
        })
    }

    /// Number of ranked types, which is the market's house count.
    pub fn len(&self) -> usize {
        match &self.ranks {
            Ranks::Full(rank) => rank.len(),
            Ranks::Sparse { house_count, .. } => *house_count as usize,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The type at position `pos` (0 is the favourite).
    ///
    /// Constant time for explicit rankings; linear in the head length inside
    /// an ascending tail.
    pub fn at(&self, pos: usize) -> HouseId {
        if let Some(&h) = self.head.get(pos) {
            return HouseId(h as usize);
        }
        let Ranks::Sparse {
            sorted,
            house_count,
        } = &self.ranks
        else {
            panic!("position {pos} out of range");
        };
        // The k-th tail element is k plus the number of head ids at or below it.
        let mut id = (pos - self.head.len()) as u32;
        for &(h, _) in sorted {
            if h <= id {
                id += 1;
            } else {
                break;
            }
        }
        assert!(id < *house_count, "position {pos} out of range");
        HouseId(id as usize)
    }

    /// Types from most to least preferred.
    pub fn iter(&self) -> impl Iterator<Item = HouseId> + '_ {
        let tail = match &self.ranks {
            Ranks::Full(_) => None,
            Ranks::Sparse {
                sorted,
                house_count,
            } => {
                let mut skip = sorted.iter().map(|&(h, _)| h).peekable();
                Some((0..*house_count).filter(move |&h| {
                    if skip.peek() == Some(&h) {
                        skip.next();
                        false
                    } else {
                        true
                    }
                }))
            }
        };
        self.head
            .iter()
            .copied()
            .chain(tail.into_iter().flatten())
            .map(|h| HouseId(h as usize))
    }

    /// Position of `h` in the ranking; 0 is the favourite.
    #[inline]
    pub fn rank_of(&self, h: HouseId) -> usize {
        match &self.ranks {
            Ranks::Full(rank) => rank[h.0] as usize,
            Ranks::Sparse { sorted, .. } => {
                let id = h.0 as u32;
                match sorted.binary_search_by_key(&id, |&(t, _)| t) {
                    Ok(k) => sorted[k].1 as usize,
                    Err(below) => self.head.len() + h.0 - below,
                }
            }
        }
    }

    #[inline]
    pub fn top(&self) -> Option<HouseId> {
        (!self.is_empty()).then(|| self.at(0))
    }

    /// `a` is at least as good as `b`.
    #[inline]
    pub fn weakly_prefers(&self, a: HouseId, b: HouseId) -> bool {
        self.rank_of(a) <= self.rank_of(b)
    }

    #[inline]
    pub fn strictly_prefers(&self, a: HouseId, b: HouseId) -> bool {
        self.rank_of(a) < self.rank_of(b)
    }
}

impl PartialEq for PreferenceOrder {
    fn eq(&self, other: &Self) -> bool {
        match (&self.ranks, &other.ranks) {
            (Ranks::Full(_), Ranks::Full(_)) => self.head == other.head,
            _ => self.len() == other.len() && self.iter().eq(other.iter()),
        }
    }
}

impl Eq for PreferenceOrder {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Agent {
    pub endowment: HouseId,
    pub prefs: PreferenceOrder,
}

/// Set of house types backed by a membership mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HouseSet {
    members: Vec<bool>,
    len: usize,
}

impl HouseSet {
    pub fn empty(house_count: usize) -> Self {
        HouseSet {
            members: vec![false; house_count],
            len: 0,
        }
    }

    pub fn full(house_count: usize) -> Self {
        HouseSet {
            members: vec![true; house_count],
            len: house_count,
        }
    }

    pub fn from_houses(house_count: usize, houses: impl IntoIterator<Item = HouseId>) -> Self {
        let mut set = Self::empty(house_count);
        for h in houses {
            set.insert(h);
        }
        set
    }

    #[inline]
    pub fn contains(&self, h: HouseId) -> bool {
        self.members.get(h.0).copied().unwrap_or(false)
    }

    pub fn insert(&mut self, h: HouseId) -> bool {
        let fresh = !self.members[h.0];
        if fresh {
            self.members[h.0] = true;
            self.len += 1;
        }
        fresh
    }

    pub fn remove(&mut self, h: HouseId) -> bool {
        let present = self.members[h.0];
        if present {
            self.members[h.0] = false;
            self.len -= 1;
        }
        present
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Members in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = HouseId> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(h, _)| HouseId(h))
    }
}

/// A validated market: every house type is owned by at least one agent and
/// every agent ranks all house types strictly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Market {
    house_names: Vec<String>,
    agent_names: Vec<String>,
    agents: Vec<Agent>,
    owners: Vec<Vec<AgentId>>,
    house_lookup: HashMap<String, HouseId>,
    agent_lookup: HashMap<String, AgentId>,
}

fn check_name(name: &str) -> Result<(), MarketError> {
    if name.is_empty() || name.chars().any(char::is_whitespace) {
        return Err(MarketError::InvalidName(name.to_string()));
    }
    Ok(())
}

/// Validates a raw description into a [`Market`].
///
/// An empty description (no houses, no agents) is a valid market.
pub fn validate_market(raw: &RawMarket) -> Result<Market, MarketError> {
    let house_count = raw.houses.len();
    let mut house_lookup = HashMap::with_capacity(house_count);
    for (i, name) in raw.houses.iter().enumerate() {
        check_name(name)?;
        if house_lookup.insert(name.clone(), HouseId(i)).is_some() {
            return Err(MarketError::DuplicateHouseName(name.clone()));
        }
    }

    let lookup = |agent: &str, house: &str| {
        house_lookup
            .get(house)
            .copied()
            .ok_or_else(|| MarketError::UnknownHouse {
                agent: agent.to_string(),
                house: house.to_string(),
            })
    };

    let mut agent_names = Vec::with_capacity(raw.agents.len());
    let mut agents = Vec::with_capacity(raw.agents.len());
    for ra in &raw.agents {
        let endowment = lookup(&ra.name, &ra.endowment)?;
        let mut seen = vec![false; house_count];
        let mut ranking = Vec::with_capacity(house_count);
        for name in &ra.prefs {
            let h = lookup(&ra.name, name)?;
            if std::mem::replace(&mut seen[h.0], true) {
                return Err(MarketError::DuplicateInPreferences {
                    agent: ra.name.clone(),
                    house: name.clone(),
                });
            }
            ranking.push(h);
        }
        if ranking.len() != house_count {
            return Err(MarketError::IncompletePreferences {
                agent: ra.name.clone(),
            });
        }
        let prefs = PreferenceOrder::from_ranking(ranking).expect("checked permutation");
        agent_names.push(ra.name.clone());
        agents.push(Agent { endowment, prefs });
    }
    Market::assemble(raw.houses.clone(), agent_names, agents)
}

impl Market {
    fn assemble(
        house_names: Vec<String>,
        agent_names: Vec<String>,
        agents: Vec<Agent>,
    ) -> Result<Market, MarketError> {
        let house_count = house_names.len();
        let mut house_lookup = HashMap::with_capacity(house_count);
        for (i, name) in house_names.iter().enumerate() {
            check_name(name)?;
            if house_lookup.insert(name.clone(), HouseId(i)).is_some() {
                return Err(MarketError::DuplicateHouseName(name.clone()));
            }
        }
        let mut agent_lookup = HashMap::with_capacity(agent_names.len());
        for (i, name) in agent_names.iter().enumerate() {
            check_name(name)?;
            if agent_lookup.insert(name.clone(), AgentId(i)).is_some() {
                return Err(MarketError::DuplicateAgentName(name.clone()));
            }
        }
        let mut owners = vec![Vec::new(); house_count];
        for (i, a) in agents.iter().enumerate() {
            debug_assert_eq!(a.prefs.len(), house_count);
            owners[a.endowment.0].push(AgentId(i));
        }
        if let Some(h) = owners.iter().position(Vec::is_empty) {
            return Err(MarketError::UnendowedHouseType {
                house: house_names[h].clone(),
            });
        }
        Ok(Market {
            house_names,
            agent_names,
            agents,
            owners,
            house_lookup,
            agent_lookup,
        })
    }

    /// Builds a market from ids, naming houses `h1..` and agents `a1..`.
    ///
    /// Each entry of `agents` is `(endowment, preferences)`.
    pub fn from_orders(
        house_count: usize,
        agents: Vec<(HouseId, PreferenceOrder)>,
    ) -> Result<Market, MarketError> {
        let agent_names = (1..=agents.len()).map(|i| format!("a{i}")).collect();
        let mut built = Vec::with_capacity(agents.len());
        for (i, (endowment, prefs)) in agents.into_iter().enumerate() {
            if endowment.0 >= house_count {
                return Err(MarketError::UnknownHouse {
                    agent: format!("a{}", i + 1),
                    house: format!("#{}", endowment.0),
                });
            }
            if prefs.len() != house_count {
                return Err(MarketError::IncompletePreferences {
                    agent: format!("a{}", i + 1),
                });
            }
            built.push(Agent { endowment, prefs });
        }
        let house_names = (1..=house_count).map(|h| format!("h{h}")).collect();
        Market::assemble(house_names, agent_names, built)
    }

    /// Like [`Market::from_orders`] with explicit rankings given as indices.
    pub fn from_indices(
        house_count: usize,
        agents: &[(usize, Vec<usize>)],
    ) -> Result<Market, MarketError> {
        let orders = agents
            .iter()
            .enumerate()
            .map(|(i, (endow, ranking))| {
                let ranking: Vec<HouseId> = ranking.iter().map(|&h| HouseId(h)).collect();
                let order = if ranking.len() == house_count {
                    PreferenceOrder::from_ranking(ranking)
                } else {
                    None
                };
                order.map(|o| (HouseId(*endow), o)).ok_or_else(|| {
                    MarketError::IncompletePreferences {
                        agent: format!("a{}", i + 1),
                    }
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Market::from_orders(house_count, orders)
    }

    /// Converts back to the unvalidated form. Re-validating yields an equal market.
    pub fn to_raw(&self) -> RawMarket {
        RawMarket {
            houses: self.house_names.clone(),
            agents: self
                .agents
                .iter()
                .zip(&self.agent_names)
                .map(|(a, name)| RawAgent {
                    name: name.clone(),
                    endowment: self.house_name(a.endowment).to_string(),
                    prefs: a
                        .prefs
                        .iter()
                        .map(|h| self.house_name(h).to_string())
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn house_count(&self) -> usize {
        self.house_names.len()
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn houses(&self) -> impl Iterator<Item = HouseId> {
        (0..self.house_count()).map(HouseId)
    }

    pub fn agent_ids(&self) -> impl Iterator<Item = AgentId> {
        (0..self.agent_count()).map(AgentId)
    }

    pub fn agent(&self, i: AgentId) -> &Agent {
        &self.agents[i.0]
    }

    pub fn endowment(&self, i: AgentId) -> HouseId {
        self.agents[i.0].endowment
    }

    pub fn prefs(&self, i: AgentId) -> &PreferenceOrder {
        &self.agents[i.0].prefs
    }

    /// Agents endowed with `h`, ascending.
    pub fn owners(&self, h: HouseId) -> &[AgentId] {
        &self.owners[h.0]
    }

    /// Number of copies of `h` in the market. At least 1 for a valid market.
    pub fn endowment_count(&self, h: HouseId) -> usize {
        self.owners[h.0].len()
    }

    pub fn is_injective(&self) -> bool {
        self.owners.iter().all(|o| o.len() == 1)
    }

    /// The agent's favourite house type among `remaining`.
    ///
    /// Scans the ranking until the first member, so the cost is the position
    /// of the answer.
    pub fn best_house(&self, i: AgentId, remaining: &HouseSet) -> Result<HouseId, MarketError> {
        if remaining.is_empty() {
            return Err(MarketError::EmptyRemainingSet);
        }
        self.prefs(i)
            .iter()
            .find(|&h| remaining.contains(h))
            .ok_or(MarketError::EmptyRemainingSet)
    }

    pub fn house_name(&self, h: HouseId) -> &str {
        &self.house_names[h.0]
    }

    pub fn agent_name(&self, i: AgentId) -> &str {
        &self.agent_names[i.0]
    }

    pub fn house_by_name(&self, name: &str) -> Option<HouseId> {
        self.house_lookup.get(name).copied()
    }

    pub fn agent_by_name(&self, name: &str) -> Option<AgentId> {
        self.agent_lookup.get(name).copied()
    }

    /// The no-trade allocation.
    pub fn endowment_allocation(&self) -> Allocation {
        Allocation {
            assignment: self.agents.iter().map(|a| a.endowment).collect(),
        }
    }
}

/// Assignment of a house type to every agent, using exactly the endowed copies.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Allocation {
    assignment: Vec<HouseId>,
}

impl Allocation {
    /// Checks per-type counts against the endowment.
    pub fn new(market: &Market, assignment: Vec<HouseId>) -> Result<Allocation, AllocationError> {
        if assignment.len() != market.agent_count() {
            return Err(AllocationError::WrongLength {
                expected: market.agent_count(),
                got: assignment.len(),
            });
        }
        let mut counts = vec![0usize; market.house_count()];
        for h in &assignment {
            *counts
                .get_mut(h.0)
                .ok_or(AllocationError::UnknownHouse(h.0))? += 1;
        }
        for h in market.houses() {
            if counts[h.0] != market.endowment_count(h) {
                return Err(AllocationError::MultisetMismatch {
                    house: market.house_name(h).to_string(),
                    endowed: market.endowment_count(h),
                    assigned: counts[h.0],
                });
            }
        }
        Ok(Allocation { assignment })
    }

    /// Skips the multiset check. Callers must already guarantee it.
    pub(crate) fn new_unchecked(assignment: Vec<HouseId>) -> Allocation {
        Allocation { assignment }
    }

    #[inline]
    pub fn house_of(&self, i: AgentId) -> HouseId {
        self.assignment[i.0]
    }

    pub fn as_slice(&self) -> &[HouseId] {
        &self.assignment
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }
}

/// Renders `{a,b,c}` from names.
pub(crate) struct NameSet<'a>(pub Vec<&'a str>);

impl fmt::Display for NameSet<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.join(","))
    }
}
