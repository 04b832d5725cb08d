//! The FTTC working graph.
//!
//! Vertices are the houses still in play and one subagent `i_h` per agent
//! `i` and remaining house `h`. A house points to every subagent holding a
//! positive amount of it; a subagent points to every house in its agent's
//! best remaining class. Subagent `i_h` only ever holds units of `h`, so the
//! running assignment is exactly the ownership weights.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use super::scc::absorbing_components;
use super::{EngineError, TieBreak};
use crate::market::{HousingMarket, Matrix};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Vertex {
    House(usize),
    Subagent { agent: usize, house: usize },
}

/// A pointer cycle `h_0 -> (a_0)_{h_0} -> h_1 -> (a_1)_{h_1} -> ... -> h_0`.
///
/// `steps[k] = (h_k, a_k)`: house `h_k` points at agent `a_k`'s subagent for
/// that house, which points at `h_{k+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TradeCycle {
    pub steps: Vec<(usize, usize)>,
    pub alpha: Rational,
}

impl TradeCycle {
    pub fn vertices(&self) -> Vec<Vertex> {
        self.steps
            .iter()
            .flat_map(|&(house, agent)| [Vertex::House(house), Vertex::Subagent { agent, house }])
            .collect()
    }
}

/// Pointer choice of every vertex plus the cycles it closes.
#[derive(Debug, Clone)]
pub struct PointerSelection {
    pub next: Vec<(Vertex, Vertex)>,
    pub cycles: Vec<TradeCycle>,
}

/// Units of houses frozen by one deletion pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeletionPass {
    pub houses: Vec<usize>,
    /// `(agent, house, amount)` for every positive holding that was frozen.
    pub finalized: Vec<(usize, usize, Rational)>,
}

#[derive(Debug, Clone)]
pub struct TradeGraph<'m> {
    market: &'m HousingMarket,
    weights: Matrix,
    alive: Vec<bool>,
    /// Class index of each agent's best remaining class.
    top_class: Vec<Option<usize>>,
    top: Vec<Vec<usize>>,
    distance: Vec<Option<u32>>,
}

impl<'m> TradeGraph<'m> {
    pub fn build(market: &'m HousingMarket) -> Self {
        let m = market.num_houses();
        let mut graph = Self {
            market,
            weights: market.endowment().clone(),
            alive: vec![true; m],
            top_class: vec![None; market.num_agents()],
            top: vec![Vec::new(); market.num_agents()],
            distance: Vec::new(),
        };
        graph.readjust();
        graph
    }

    pub fn market(&self) -> &'m HousingMarket {
        self.market
    }

    fn n(&self) -> usize {
        self.market.num_agents()
    }

    fn m(&self) -> usize {
        self.market.num_houses()
    }

    fn id(&self, v: Vertex) -> usize {
        match v {
            Vertex::House(h) => h,
            Vertex::Subagent { agent, house } => self.m() + agent * self.m() + house,
        }
    }

    fn vertex(&self, id: usize) -> Vertex {
        let m = self.m();
        if id < m {
            Vertex::House(id)
        } else {
            Vertex::Subagent {
                agent: (id - m) / m,
                house: (id - m) % m,
            }
        }
    }

    fn vertex_count(&self) -> usize {
        self.m() * (self.n() + 1)
    }

    fn is_alive(&self, id: usize) -> bool {
        match self.vertex(id) {
            Vertex::House(h) | Vertex::Subagent { house: h, .. } => self.alive[h],
        }
    }

    /// Recomputes desire targets and distances after houses were removed.
    fn readjust(&mut self) {
        for i in 0..self.n() {
            let pref = self.market.preference(i);
            self.top[i] = pref.top_among(&self.alive);
            self.top_class[i] = self.top[i].first().map(|&h| pref.class_of(h));
        }
        self.refresh_distances();
    }

    pub fn is_empty(&self) -> bool {
        !self.alive.iter().any(|&a| a)
    }

    pub fn remaining_houses(&self) -> Vec<usize> {
        (0..self.m()).filter(|&h| self.alive[h]).collect()
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn weight(&self, agent: usize, house: usize) -> &Rational {
        &self.weights[agent][house]
    }

    /// Houses in `agent`'s best class among the remaining houses.
    pub fn desire(&self, agent: usize) -> &[usize] {
        &self.top[agent]
    }

    /// Subagents holding a positive amount of `house`.
    pub fn owners(&self, house: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n()).filter(move |&i| self.alive[house] && self.weights[i][house].is_positive())
    }

    pub fn is_attractor(&self, agent: usize, house: usize) -> bool {
        self.alive[house]
            && self.weights[agent][house].is_positive()
            && Some(self.market.preference(agent).class_of(house)) != self.top_class[agent]
    }

    pub fn attractors(&self) -> Vec<Vertex> {
        let mut out = Vec::new();
        for agent in 0..self.n() {
            for house in 0..self.m() {
                if self.is_attractor(agent, house) {
                    out.push(Vertex::Subagent { agent, house });
                }
            }
        }
        out
    }

    pub fn successors(&self, v: Vertex) -> Vec<Vertex> {
        match v {
            Vertex::House(h) if self.alive[h] => self.owners(h).map(|agent| Vertex::Subagent { agent, house: h }).collect(),
            Vertex::Subagent { agent, house } if self.alive[house] => {
                self.top[agent].iter().map(|&h| Vertex::House(h)).collect()
            }
            _ => Vec::new(),
        }
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        (0..self.vertex_count())
            .map(|id| {
                self.successors(self.vertex(id))
                    .into_iter()
                    .map(|w| self.id(w))
                    .collect()
            })
            .collect()
    }

    fn active(&self) -> Vec<bool> {
        (0..self.vertex_count()).map(|id| self.is_alive(id)).collect()
    }

    /// Shortest distance to an attractor along graph arcs; `None` when no
    /// attractor is reachable.
    pub fn distance(&self, v: Vertex) -> Option<u32> {
        self.distance[self.id(v)]
    }

    fn refresh_distances(&mut self) {
        let count = self.vertex_count();
        let adj = self.adjacency();
        let mut reverse = vec![Vec::new(); count];
        for (v, outs) in adj.iter().enumerate() {
            for &w in outs {
                reverse[w].push(v);
            }
        }
        let mut distance = vec![None; count];
        let mut queue = VecDeque::new();
        for a in self.attractors() {
            let id = self.id(a);
            distance[id] = Some(0);
            queue.push_back(id);
        }
        while let Some(v) = queue.pop_front() {
            let d = distance[v].expect("queued vertex has a distance") + 1;
            for &u in &reverse[v] {
                if distance[u].is_none() {
                    distance[u] = Some(d);
                    queue.push_back(u);
                }
            }
        }
        self.distance = distance;
    }

    /// Strongly connected components with no outgoing arc.
    pub fn absorbing_sets(&self) -> Vec<Vec<Vertex>> {
        absorbing_components(&self.adjacency(), &self.active())
            .into_iter()
            .map(|set| {
                let mut vs: Vec<Vertex> = set.into_iter().map(|id| self.vertex(id)).collect();
                vs.sort();
                vs
            })
            .collect()
    }

    /// An absorbing set is non-good when it holds no attractor, i.e. no member
    /// can trade a held house for a strictly better one inside the set.
    pub fn is_non_good(&self, set: &[Vertex]) -> bool {
        !set.iter().any(|v| match *v {
            Vertex::Subagent { agent, house } => self.is_attractor(agent, house),
            Vertex::House(_) => false,
        })
    }

    /// Removes non-good absorbing sets until none remain, freezing the
    /// holdings of every removed house.
    pub fn delete_non_good(&mut self) -> Vec<DeletionPass> {
        let mut passes = Vec::new();
        loop {
            let doomed: Vec<usize> = self
                .absorbing_sets()
                .into_iter()
                .filter(|set| self.is_non_good(set))
                .flatten()
                .filter_map(|v| match v {
                    Vertex::House(h) => Some(h),
                    Vertex::Subagent { .. } => None,
                })
                .collect();
            if doomed.is_empty() {
                break;
            }
            let mut houses = doomed;
            houses.sort_unstable();
            let mut finalized = Vec::new();
            for &h in &houses {
                for i in 0..self.n() {
                    if self.weights[i][h].is_positive() {
                        finalized.push((i, h, self.weights[i][h].clone()));
                    }
                }
                self.alive[h] = false;
            }
            self.readjust();
            passes.push(DeletionPass { houses, finalized });
        }
        passes
    }

    /// Points every vertex at a successor closest to an attractor, breaking
    /// ties by `tiebreak`, and returns the resulting (vertex-disjoint) cycles.
    pub fn select_pointers(&self, tiebreak: &TieBreak) -> Result<PointerSelection, EngineError> {
        tiebreak.check(self.market)?;
        let count = self.vertex_count();
        if (0..count).any(|id| self.is_alive(id) && self.distance[id].is_none()) {
            return Err(EngineError::NonGoodAbsorbingSet);
        }
        let dist = |id: usize| self.distance[id].unwrap_or(u32::MAX);
        let mut next = vec![None; count];

        for h in self.remaining_houses() {
            let choice = self
                .owners(h)
                .min_by_key(|&i| (dist(self.id(Vertex::Subagent { agent: i, house: h })), tiebreak.agent_rank(i)));
            next[h] = choice.map(|agent| self.id(Vertex::Subagent { agent, house: h }));
        }
        for agent in 0..self.n() {
            for house in self.remaining_houses() {
                let me = self.id(Vertex::Subagent { agent, house });
                let excluded = (next[house] == Some(me)).then_some(house);
                next[me] = self.top[agent]
                    .iter()
                    .copied()
                    .filter(|&t| Some(t) != excluded)
                    .min_by_key(|&t| (dist(t), tiebreak.house_rank(t)));
            }
        }

        // Walk pointers from each attractor; a walk either closes a new cycle
        // or runs into an earlier walk.
        let mut walk_id = vec![usize::MAX; count];
        let mut cycles = Vec::new();
        for (w, start) in self.attractors().into_iter().enumerate() {
            let mut v = self.id(start);
            loop {
                if walk_id[v] == w {
                    cycles.push(self.cycle_from(v, &next));
                    break;
                }
                if walk_id[v] != usize::MAX {
                    break;
                }
                walk_id[v] = w;
                match next[v] {
                    Some(u) => v = u,
                    None => break,
                }
            }
        }

        let next = next
            .iter()
            .enumerate()
            .filter_map(|(id, t)| t.map(|t| (self.vertex(id), self.vertex(t))))
            .collect();
        let cycles = cycles
            .into_iter()
            .map(|steps| self.canonical_cycle(steps, tiebreak))
            .collect();
        Ok(PointerSelection { next, cycles })
    }

    fn cycle_from(&self, start: usize, next: &[Option<usize>]) -> Vec<(usize, usize)> {
        let mut steps = Vec::new();
        let mut v = start;
        loop {
            if let Vertex::Subagent { agent, house } = self.vertex(v) {
                steps.push((house, agent));
            }
            v = next[v].expect("cycle vertex has a pointer");
            if v == start {
                break;
            }
        }
        steps
    }

    fn canonical_cycle(&self, mut steps: Vec<(usize, usize)>, tiebreak: &TieBreak) -> TradeCycle {
        let first = (0..steps.len())
            .min_by_key(|&k| tiebreak.house_rank(steps[k].0))
            .unwrap_or(0);
        steps.rotate_left(first);
        let alpha = steps
            .iter()
            .map(|&(h, a)| &self.weights[a][h])
            .min()
            .cloned()
            .unwrap_or_else(Rational::zero);
        TradeCycle { steps, alpha }
    }

    /// Moves `alpha` units along the cycle: each house's owner in the cycle
    /// gives `alpha` of it to the agent whose subagent pointed at it.
    pub fn execute_trade(&mut self, cycle: &TradeCycle) -> Result<(), EngineError> {
        let steps = &cycle.steps;
        if steps.is_empty() || !cycle.alpha.is_positive() {
            return Err(EngineError::NonPositiveTrade);
        }
        for &(h, a) in steps {
            if !self.alive[h] || self.weights[a][h] < cycle.alpha {
                return Err(EngineError::StaleCycle);
            }
        }
        for k in 0..steps.len() {
            let (house, owner) = steps[(k + 1) % steps.len()];
            let receiver = steps[k].1;
            self.weights[owner][house] -= &cycle.alpha;
            self.weights[receiver][house] += &cycle.alpha;
        }
        self.refresh_distances();
        Ok(())
    }

    pub fn into_weights(self) -> Matrix {
        self.weights
    }
}
