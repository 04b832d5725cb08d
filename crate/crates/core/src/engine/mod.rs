//! Fractional top trading cycles.
//!
//! [`fttc`] alternates two phases on a [`TradeGraph`] until it is empty:
//! delete every absorbing set that contains no attractor (freezing its
//! holdings), then point every vertex towards the nearest attractor and trade
//! the largest common amount around each pointer cycle.

mod graph;
pub mod scc;

use alloc::vec::Vec;

pub use graph::{DeletionPass, PointerSelection, TradeCycle, TradeGraph, Vertex};

use crate::market::{Assignment, HousingMarket};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("the graph still has a non-good absorbing set")]
    NonGoodAbsorbingSet,
    #[error("trade amount must be positive")]
    NonPositiveTrade,
    #[error("cycle does not match the current ownership weights")]
    StaleCycle,
    #[error("tie-break order is not a permutation of the market's {0}")]
    TieBreak(&'static str),
}

/// Priority orders `L_N` over agents and `L_H` over houses; earlier is
/// higher priority.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TieBreak {
    agent_order: Vec<usize>,
    house_order: Vec<usize>,
    agent_rank: Vec<usize>,
    house_rank: Vec<usize>,
}

fn ranks(order: &[usize]) -> Option<Vec<usize>> {
    let mut rank = alloc::vec![usize::MAX; order.len()];
    for (r, &x) in order.iter().enumerate() {
        if x >= order.len() || rank[x] != usize::MAX {
            return None;
        }
        rank[x] = r;
    }
    Some(rank)
}

impl TieBreak {
    pub fn new(agent_order: Vec<usize>, house_order: Vec<usize>) -> Result<Self, EngineError> {
        let agent_rank = ranks(&agent_order).ok_or(EngineError::TieBreak("agents"))?;
        let house_rank = ranks(&house_order).ok_or(EngineError::TieBreak("houses"))?;
        Ok(Self {
            agent_order,
            house_order,
            agent_rank,
            house_rank,
        })
    }

    /// Input order for both agents and houses.
    pub fn default_for(market: &HousingMarket) -> Self {
        Self::new(
            (0..market.num_agents()).collect(),
            (0..market.num_houses()).collect(),
        )
        .expect("identity orders are permutations")
    }

    pub fn agent_order(&self) -> &[usize] {
        &self.agent_order
    }

    pub fn house_order(&self) -> &[usize] {
        &self.house_order
    }

    pub fn agent_rank(&self, agent: usize) -> usize {
        self.agent_rank[agent]
    }

    pub fn house_rank(&self, house: usize) -> usize {
        self.house_rank[house]
    }

    pub(crate) fn check(&self, market: &HousingMarket) -> Result<(), EngineError> {
        if self.agent_order.len() != market.num_agents() {
            return Err(EngineError::TieBreak("agents"));
        }
        if self.house_order.len() != market.num_houses() {
            return Err(EngineError::TieBreak("houses"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent {
    Deletion(DeletionPass),
    Trade(TradeCycle),
}

#[derive(Debug, Clone)]
pub struct FttcRun {
    pub assignment: Assignment,
    pub trades: usize,
    /// Pointer-selection rounds; each trades one or more disjoint cycles.
    pub rounds: usize,
    pub deletion_passes: usize,
    pub trace: Vec<TraceEvent>,
}

/// Runs FTTC and returns the final assignment.
pub fn fttc(market: &HousingMarket, tiebreak: &TieBreak) -> Result<Assignment, EngineError> {
    fttc_traced(market, tiebreak).map(|run| run.assignment)
}

/// Runs FTTC, recording every deletion pass and executed trade.
pub fn fttc_traced(market: &HousingMarket, tiebreak: &TieBreak) -> Result<FttcRun, EngineError> {
    tiebreak.check(market)?;
    let mut graph = TradeGraph::build(market);
    let mut trace = Vec::new();
    let mut trades = 0;
    let mut rounds = 0;
    let mut deletion_passes = 0;
    loop {
        for pass in graph.delete_non_good() {
            deletion_passes += 1;
            trace.push(TraceEvent::Deletion(pass));
        }
        if graph.is_empty() {
            break;
        }
        let selection = graph.select_pointers(tiebreak)?;
        // Pointer chains strictly approach attractors, so a graph without
        // non-good absorbing sets always closes at least one cycle.
        assert!(!selection.cycles.is_empty(), "pointer selection closed no cycle");
        rounds += 1;
        for cycle in selection.cycles {
            graph.execute_trade(&cycle)?;
            trades += 1;
            trace.push(TraceEvent::Trade(cycle));
        }
    }
    let assignment = Assignment::new(market, graph.into_weights())
        .expect("trades conserve every house's supply");
    Ok(FttcRun {
        assignment,
        trades,
        rounds,
        deletion_passes,
        trace,
    })
}
