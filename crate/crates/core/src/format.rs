//! Text formats for markets and allocations.
//!
//! Market file:
//!
//! ```text
//! # comment
//! houses: h1 h2 h3
//! agent a1 endow h1 prefs h2 h1 h3
//! agent a2 endow h2 prefs h1 h3 h2
//! ```
//!
//! Allocation file, one line per agent in declaration order:
//!
//! ```text
//! a1 -> h2
//! a2 -> h1
//! ```
//!
//! `#` starts a comment line and blank lines are ignored in both formats.

use std::fmt::Write as _;

use thiserror::Error;

use crate::market::{
    validate_market, AgentId, Allocation, AllocationError, HouseId, Market, MarketError, RawAgent,
    RawMarket,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `houses:` line")]
    MissingHouses,
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: MarketError,
    },
    #[error("agent `{0}` has no allocation line")]
    MissingAgent(String),
    #[error(transparent)]
    Infeasible(#[from] AllocationError),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

// (1-based line number, trimmed content) for non-blank, non-comment lines.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Parses a market file and validates it. Errors carry the offending line.
pub fn parse_market(text: &str) -> Result<Market, FormatError> {
    let mut lines = content_lines(text);
    let (houses_line, header) = lines.next().ok_or(FormatError::MissingHouses)?;
    let names = header
        .strip_prefix("houses:")
        .ok_or_else(|| syntax(houses_line, "expected `houses: <name> ...`"))?;
    let mut raw = RawMarket {
        houses: names.split_whitespace().map(str::to_string).collect(),
        agents: Vec::new(),
    };

    let mut agent_lines = Vec::new();
    for (line, content) in lines {
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let ["agent", name, "endow", endowment, "prefs", prefs @ ..] = tokens.as_slice() else {
            return Err(syntax(
                line,
                "expected `agent <name> endow <house> prefs <house> ...`",
            ));
        };
        raw.agents.push(RawAgent {
            name: name.to_string(),
            endowment: endowment.to_string(),
            prefs: prefs.iter().map(|s| s.to_string()).collect(),
        });
        agent_lines.push(line);
    }

    validate_market(&raw).map_err(|source| {
        let line = match &source {
            MarketError::IncompletePreferences { agent }
            | MarketError::DuplicateInPreferences { agent, .. }
            | MarketError::UnknownHouse { agent, .. } => agent_line(&raw, &agent_lines, agent),
            MarketError::DuplicateAgentName(agent) => raw
                .agents
                .iter()
                .enumerate()
                .filter(|(_, a)| &a.name == agent)
                .nth(1)
                .map(|(k, _)| agent_lines[k]),
            MarketError::InvalidName(_)
            | MarketError::DuplicateHouseName(_)
            | MarketError::UnendowedHouseType { .. }
            | MarketError::EmptyRemainingSet => None,
        };
        FormatError::Invalid {
            line: line.unwrap_or(houses_line),
            source,
        }
    })
}

fn agent_line(raw: &RawMarket, agent_lines: &[usize], agent: &str) -> Option<usize> {
    raw.agents
        .iter()
        .position(|a| a.name == agent)
        .map(|k| agent_lines[k])
}

pub fn write_market(market: &Market) -> String {
    let mut out = String::from("houses:");
    for h in market.houses() {
        out.push(' ');
        out.push_str(market.house_name(h));
    }
    out.push('\n');
    for i in market.agent_ids() {
        let _ = write!(
            out,
            "agent {} endow {} prefs",
            market.agent_name(i),
            market.house_name(market.endowment(i))
        );
        for h in market.prefs(i).iter() {
            out.push(' ');
            out.push_str(market.house_name(h));
        }
        out.push('\n');
    }
    out
}

/// Parses an allocation file against `market`. Lines may come in any order
/// but must cover every agent exactly once, and the result must use exactly
/// the endowed copies.
pub fn parse_allocation(text: &str, market: &Market) -> Result<Allocation, FormatError> {
    let mut assignment: Vec<Option<HouseId>> = vec![None; market.agent_count()];
    for (line, content) in content_lines(text) {
        let (agent, house) = content
            .split_once("->")
            .ok_or_else(|| syntax(line, "expected `<agent> -> <house>`"))?;
        let (agent, house) = (agent.trim(), house.trim());
        let i: AgentId = market
            .agent_by_name(agent)
            .ok_or_else(|| syntax(line, format!("unknown agent `{agent}`")))?;
        let h = market
            .house_by_name(house)
            .ok_or_else(|| syntax(line, format!("unknown house `{house}`")))?;
        if assignment[i.0].replace(h).is_some() {
            return Err(syntax(line, format!("agent `{agent}` assigned twice")));
        }
    }
    let assignment = assignment
        .into_iter()
        .enumerate()
        .map(|(i, h)| {
            h.ok_or_else(|| FormatError::MissingAgent(market.agent_name(AgentId(i)).to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Allocation::new(market, assignment)?)
}

pub fn write_allocation(market: &Market, allocation: &Allocation) -> String {
    let mut out = String::new();
    for i in market.agent_ids() {
        let _ = writeln!(
            out,
            "{} -> {}",
            market.agent_name(i),
            market.house_name(allocation.house_of(i))
        );
    }
    out
}
