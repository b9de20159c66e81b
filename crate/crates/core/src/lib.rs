//! Strict-core solver for house-swapping markets in which several agents may
//! own copies of the same house type.
//!
//! [`htts_solve`] decides whether the strict core is non-empty and, when it
//! is, returns its unique allocation together with the sequence of trading
//! segments that produced it. The [`oracle`] module checks the same questions
//! by exhaustive search on small markets.

pub mod digraph;
pub mod format;
pub mod gen;
pub mod htts;
pub mod market;
pub mod oracle;
pub mod scaling;

pub use digraph::{
    condensation, first_sink_scc, tarjan_scc, Digraph, GraphError, SccPartition, Tarjan,
    TarjanScratch,
};
pub use format::{parse_allocation, parse_market, write_allocation, write_market, FormatError};
pub use gen::{
    random_market, random_prefix_market, staircase_market, GenError, GenParams, SplitMix64,
};
pub use htts::{
    build_pointing_graph, check_feasibility, htts_solve, solve_with_tiebreak, OpCounter,
    PointingGraph, Segment, SolveOutcome, Verdict,
};
pub use market::{
    validate_market, AgentId, Allocation, AllocationError, HouseId, HouseSet, Market, MarketError,
    PreferenceOrder, RawAgent, RawMarket,
};
pub use oracle::{
    enumerate_feasible_allocations, enumerate_strict_core, find_blocking_coalition, ttc_solve,
    BlockingCertificate, OracleError,
};
