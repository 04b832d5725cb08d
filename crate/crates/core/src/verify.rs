//! Exact checkers for the SD axioms.
//!
//! Every failed check returns a [`Witness`] that [`Witness::confirms`]
//! re-validates from the definitions alone. Coalition checks solve one exact
//! LP per coalition, so they are guarded by [`MAX_COALITION_AGENTS`].

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::engine::scc::strongly_connected_components;
use crate::lp::{solve_lp, LinearProgram, LpOutcome, Relation};
use crate::market::{column_sums, Assignment, AssignmentError, HousingMarket, Matrix};
use crate::preference::{has_justified_envy, Comparison, Preference};
use crate::rational::{int, zeros, Rational};

pub const MAX_COALITION_AGENTS: usize = 16;
pub const MAX_MANIPULATION_HOUSES: usize = 6;
pub const MAX_ENUMERATION_AGENTS: usize = 7;

/// What a blocking coalition must achieve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Every member strictly better off (core).
    AllStrict,
    /// Every member weakly, some member strictly better off (strict core).
    SomeStrict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Extension {
    Sd,
    Dl,
}

impl Extension {
    pub fn compare(self, pref: &Preference, a: &[Rational], b: &[Rational]) -> Comparison {
        let result = match self {
            Extension::Sd => pref.sd_compare(a, b),
            Extension::Dl => pref.dl_compare(a, b),
        };
        result.expect("allocations sized by the market")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// The agent does not SD-weakly prefer its assignment to its endowment.
    IrViolation { agent: usize },
    /// `(house, agent)` steps: each agent holds its house and weakly prefers
    /// the next step's house (cyclically), at least one strictly.
    GoodCycle { steps: Vec<(usize, usize)> },
    /// An assignment of the same supply that SD-dominates the checked one.
    DominatingAssignment { y: Matrix },
    /// `y[k]` is the allocation of `coalition[k]`, built from the
    /// coalition's own endowments.
    BlockingCoalition {
        coalition: Vec<usize>,
        y: Matrix,
        mode: Mode,
    },
    EnvyPair { envious: usize, envied: usize },
    Misreport {
        agent: usize,
        report: Preference,
        extension: Extension,
        truthful: Vec<Rational>,
        manipulated: Vec<Rational>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(Witness),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Pass => None,
            Verdict::Fail(w) => Some(w),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("{agents} agents exceeds the enumeration limit of {limit}")]
    TooManyAgents { agents: usize, limit: usize },
    #[error("{houses} houses exceeds the enumeration limit of {limit}")]
    TooManyHouses { houses: usize, limit: usize },
    #[error("LP says dominated = {lp_dominated}, good-cycle search disagrees")]
    CertificateDisagreement { lp_dominated: bool },
    #[error("market does not have one whole house per agent")]
    NotDiscrete,
    #[error("agent index {0} out of range")]
    UnknownAgent(usize),
    #[error(transparent)]
    Assignment(#[from] AssignmentError),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError<E> {
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("mechanism failed: {0}")]
    Mechanism(E),
}

fn sd(pref: &Preference, a: &[Rational], b: &[Rational]) -> Comparison {
    Extension::Sd.compare(pref, a, b)
}

pub fn check_sd_ir(market: &HousingMarket, x: &Assignment) -> Verdict {
    (0..market.num_agents())
        .find(|&i| !sd(market.preference(i), x.row(i), market.endowment_row(i)).is_weakly_preferred())
        .map_or(Verdict::Pass, |agent| Verdict::Fail(Witness::IrViolation { agent }))
}

/// Searches for an assignment of `coalition` using exactly `supply` that
/// SD-improves on `x` for the coalition in the sense of `mode`.
///
/// Each member gets one non-negative variable per house, constrained so that
/// every upper contour prefix holds at least what `x` gives it there. The
/// objective is the total prefix slack (`SomeStrict`) or a common lower bound
/// on each member's prefix slack (`AllStrict`); a positive optimum is a
/// block. Returns the members' rows in coalition order.
pub fn sd_dominates_lp(
    market: &HousingMarket,
    x: &[Vec<Rational>],
    coalition: &[usize],
    supply: &[Rational],
    mode: Mode,
) -> Option<Matrix> {
    let m = market.num_houses();
    let s = coalition.len();
    let t = s * m;
    let vars = t + usize::from(mode == Mode::AllStrict);
    let mut lp = LinearProgram::new(vars);
    for (h, amount) in supply.iter().enumerate() {
        let terms: Vec<_> = (0..s).map(|k| (k * m + h, Rational::one())).collect();
        lp.add_sparse(&terms, Relation::Eq, amount.clone());
    }
    let mut baseline = Rational::zero();
    let mut objective = Vec::new();
    for (k, &i) in coalition.iter().enumerate() {
        let pref = market.preference(i);
        let held = pref.prefix_sums(&x[i]);
        for (prefix, floor) in pref.upper_contour_prefixes().iter().zip(&held) {
            let terms: Vec<_> = prefix.iter().map(|&h| (k * m + h, Rational::one())).collect();
            lp.add_sparse(&terms, Relation::Ge, floor.clone());
        }
        // Total prefix mass: house h lies in (classes - class_of(h)) prefixes.
        let classes = pref.classes().len();
        let mut terms: Vec<_> = (0..m)
            .map(|h| (k * m + h, int((classes - pref.class_of(h)) as i64)))
            .collect();
        let total: Rational = held.iter().sum();
        match mode {
            Mode::SomeStrict => {
                objective.append(&mut terms);
                baseline += total;
            }
            Mode::AllStrict => {
                terms.push((t, -Rational::one()));
                lp.add_sparse(&terms, Relation::Ge, total);
            }
        }
    }
    if mode == Mode::AllStrict {
        objective.push((t, Rational::one()));
    }
    lp.set_objective_sparse(&objective);
    match solve_lp(&lp) {
        LpOutcome::Optimal { value, point } if value > baseline => Some(
            (0..s)
                .map(|k| point[k * m..(k + 1) * m].to_vec())
                .collect(),
        ),
        _ => None,
    }
}

/// LP ground truth for SD-efficiency: an assignment of the same column sums
/// that SD-dominates `x`, if any.
pub fn sd_efficiency_lp(market: &HousingMarket, x: &Assignment) -> Option<Matrix> {
    let everyone: Vec<usize> = (0..market.num_agents()).collect();
    let supply = column_sums(x.rows(), market.num_houses());
    sd_dominates_lp(market, x.rows(), &everyone, &supply, Mode::SomeStrict)
}

/// A cycle of houses along which holders can swap up, with a strict step.
///
/// House `h` links to `h'` when some agent holding part of `h` weakly
/// prefers `h'`; such a cycle containing a strict link exists iff some strict
/// link stays inside one strongly connected component.
pub fn find_good_cycle(market: &HousingMarket, x: &Assignment) -> Option<Vec<(usize, usize)>> {
    let m = market.num_houses();
    // label[h][h'] = (agent, strict), preferring strict links, then lower agents.
    let mut label: Vec<Vec<Option<(usize, bool)>>> = vec![vec![None; m]; m];
    for i in 0..market.num_agents() {
        let pref = market.preference(i);
        for h in (0..m).filter(|&h| x.get(i, h).is_positive()) {
            for to in (0..m).filter(|&to| to != h && pref.weakly_prefers(to, h)) {
                let strict = pref.strictly_prefers(to, h);
                let slot = &mut label[h][to];
                if slot.is_none_or(|(_, s)| strict && !s) {
                    *slot = Some((i, strict));
                }
            }
        }
    }
    let adj: Vec<Vec<usize>> = (0..m)
        .map(|h| (0..m).filter(|&to| label[h][to].is_some()).collect())
        .collect();
    let mut comp = vec![0; m];
    for (c, members) in strongly_connected_components(&adj, &vec![true; m]).iter().enumerate() {
        for &h in members {
            comp[h] = c;
        }
    }
    let (from, to, agent) = (0..m).find_map(|h| {
        (0..m).find_map(|to| match label[h][to] {
            Some((i, true)) if comp[h] == comp[to] => Some((h, to, i)),
            _ => None,
        })
    })?;
    // Shortest path to -> from.
    let mut parent = vec![usize::MAX; m];
    parent[to] = to;
    let mut queue = VecDeque::from([to]);
    while let Some(v) = queue.pop_front() {
        if v == from {
            break;
        }
        for &w in &adj[v] {
            if parent[w] == usize::MAX {
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    let mut path = vec![from];
    while *path.last().expect("non-empty path") != to {
        path.push(parent[*path.last().expect("non-empty path")]);
    }
    path.reverse();
    let mut steps = vec![(from, agent)];
    for pair in path.windows(2) {
        let (i, _) = label[pair[0]][pair[1]].expect("path follows links");
        steps.push((pair[0], i));
    }
    Some(steps)
}

/// SD-efficiency, decided by the LP and cross-checked against the good-cycle
/// certificate. A disagreement is reported as an error.
pub fn check_sd_efficiency(market: &HousingMarket, x: &Assignment) -> Result<Verdict, VerifyError> {
    let dominated = sd_efficiency_lp(market, x);
    let cycle = find_good_cycle(market, x);
    match (dominated, cycle) {
        (None, None) => Ok(Verdict::Pass),
        (Some(_), Some(steps)) => Ok(Verdict::Fail(Witness::GoodCycle { steps })),
        (lp, _) => Err(VerifyError::CertificateDisagreement {
            lp_dominated: lp.is_some(),
        }),
    }
}

/// Index sets of `0..n` by size, then lexicographically.
pub fn coalitions(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1..=n).flat_map(move |k| Combinations::new(n, k))
}

struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            current: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let k = out.len();
        let mut next = out.clone();
        if let Some(pos) = (0..k).rev().find(|&p| next[p] < self.n - k + p) {
            next[pos] += 1;
            for p in pos + 1..k {
                next[p] = next[p - 1] + 1;
            }
            self.current = Some(next);
        }
        Some(out)
    }
}

fn check_core(market: &HousingMarket, x: &Assignment, mode: Mode) -> Result<Verdict, VerifyError> {
    let n = market.num_agents();
    if n > MAX_COALITION_AGENTS {
        return Err(VerifyError::TooManyAgents {
            agents: n,
            limit: MAX_COALITION_AGENTS,
        });
    }
    let m = market.num_houses();
    for coalition in coalitions(n) {
        let mut supply = zeros(m);
        for &i in &coalition {
            for (s, e) in supply.iter_mut().zip(market.endowment_row(i)) {
                *s += e;
            }
        }
        if let Some(y) = sd_dominates_lp(market, x.rows(), &coalition, &supply, mode) {
            return Ok(Verdict::Fail(Witness::BlockingCoalition { coalition, y, mode }));
        }
    }
    Ok(Verdict::Pass)
}

/// SD-core stability: no coalition can reallocate its own endowments so that
/// every member is SD-strictly better off.
pub fn check_sd_core(market: &HousingMarket, x: &Assignment) -> Result<Verdict, VerifyError> {
    check_core(market, x, Mode::AllStrict)
}

/// SD-strict-core stability: as [`check_sd_core`], with weak improvement for
/// all members and strict improvement for at least one.
pub fn check_sd_strict_core(market: &HousingMarket, x: &Assignment) -> Result<Verdict, VerifyError> {
    check_core(market, x, Mode::SomeStrict)
}

/// No justified envy over all ordered pairs, envious agent first.
pub fn check_nje(market: &HousingMarket, x: &Assignment) -> Verdict {
    let n = market.num_agents();
    for i in 0..n {
        for j in 0..n {
            if has_justified_envy(market, x.rows(), i, j).expect("indices in range") {
                return Verdict::Fail(Witness::EnvyPair {
                    envious: i,
                    envied: j,
                });
            }
        }
    }
    Verdict::Pass
}

/// Every weak order over `m` houses, by number of classes and then
/// lexicographically by the vector of each house's class index.
pub fn weak_orders(m: usize) -> Vec<Preference> {
    let mut out = Vec::new();
    for k in 1..=m {
        let mut digits = vec![0usize; m];
        loop {
            let mut used = vec![false; k];
            for &d in &digits {
                used[d] = true;
            }
            if used.iter().all(|&u| u) {
                let mut classes = vec![Vec::new(); k];
                for (h, &d) in digits.iter().enumerate() {
                    classes[d].push(h);
                }
                out.push(Preference::from_classes_unchecked(classes, m));
            }
            // Odometer with house 0 most significant.
            let Some(pos) = (0..m).rev().find(|&p| digits[p] + 1 < k) else {
                break;
            };
            digits[pos] += 1;
            for d in digits.iter_mut().skip(pos + 1) {
                *d = 0;
            }
        }
    }
    out
}

/// Brute-force search for a report that makes `agent` strictly better off
/// under `extension` and its true preference. Reports are tried in
/// [`weak_orders`] order; the first success is returned.
pub fn find_manipulation<E>(
    market: &HousingMarket,
    agent: usize,
    extension: Extension,
    mut mechanism: impl FnMut(&HousingMarket) -> Result<Assignment, E>,
) -> Result<Option<Witness>, SearchError<E>> {
    let m = market.num_houses();
    if m > MAX_MANIPULATION_HOUSES {
        return Err(VerifyError::TooManyHouses {
            houses: m,
            limit: MAX_MANIPULATION_HOUSES,
        }
        .into());
    }
    if agent >= market.num_agents() {
        return Err(VerifyError::UnknownAgent(agent).into());
    }
    let truth = market.preference(agent);
    let truthful = mechanism(market).map_err(SearchError::Mechanism)?.row(agent).to_vec();
    for report in weak_orders(m) {
        if &report == truth {
            continue;
        }
        let outcome = mechanism(&market.with_preference(agent, report.clone())).map_err(SearchError::Mechanism)?;
        let manipulated = outcome.row(agent);
        if extension.compare(truth, manipulated, &truthful) == Comparison::StrictlyPreferred {
            return Ok(Some(Witness::Misreport {
                agent,
                report,
                extension,
                truthful,
                manipulated: manipulated.to_vec(),
            }));
        }
    }
    Ok(None)
}

/// Permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current = Some((0..n).collect::<Vec<_>>());
    core::iter::from_fn(move || {
        let out = current.take()?;
        let mut next = out.clone();
        if let Some(i) = (1..n).rev().find(|&i| next[i - 1] < next[i]) {
            let j = (i..n).rev().find(|&j| next[j] > next[i - 1]).expect("successor exists");
            next.swap(i - 1, j);
            next[i..].reverse();
            current = Some(next);
        }
        Some(out)
    })
}

/// Agent `i` receives the whole of house `houses[i]`.
pub fn permutation_matrix(houses: &[usize], m: usize) -> Matrix {
    houses
        .iter()
        .map(|&h| {
            let mut row = zeros(m);
            row[h] = Rational::one();
            row
        })
        .collect()
}

/// Outcome of [`strict_core_empty_discrete`]: for each discrete assignment
/// (house per agent, lexicographic order) the blocking witness, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteStrictCore {
    pub log: Vec<(Vec<usize>, Option<Witness>)>,
}

impl DiscreteStrictCore {
    /// True when every discrete assignment is blocked.
    pub fn is_empty(&self) -> bool {
        self.log.iter().all(|(_, w)| w.is_some())
    }

    pub fn unblocked(&self) -> impl Iterator<Item = &[usize]> {
        self.log.iter().filter(|(_, w)| w.is_none()).map(|(p, _)| p.as_slice())
    }
}

/// Runs [`check_sd_strict_core`] on every permutation assignment of a
/// market with one whole house per agent.
pub fn strict_core_empty_discrete(market: &HousingMarket) -> Result<DiscreteStrictCore, VerifyError> {
    let n = market.num_agents();
    if n > MAX_ENUMERATION_AGENTS {
        return Err(VerifyError::TooManyAgents {
            agents: n,
            limit: MAX_ENUMERATION_AGENTS,
        });
    }
    if !market.is_classic() {
        return Err(VerifyError::NotDiscrete);
    }
    let mut log = Vec::new();
    for perm in permutations(n) {
        let x = Assignment::new(market, permutation_matrix(&perm, n))?;
        let witness = match check_sd_strict_core(market, &x)? {
            Verdict::Pass => None,
            Verdict::Fail(w) => Some(w),
        };
        log.push((perm, witness));
    }
    Ok(DiscreteStrictCore { log })
}

impl Witness {
    /// Re-checks the violation from the definitions, independently of the
    /// search that produced it. `x` is the assignment that was checked (for
    /// a misreport: the truthful outcome).
    pub fn confirms(&self, market: &HousingMarket, x: &Assignment) -> bool {
        let n = market.num_agents();
        let m = market.num_houses();
        match self {
            Witness::IrViolation { agent } => {
                *agent < n && !sd(market.preference(*agent), x.row(*agent), market.endowment_row(*agent)).is_weakly_preferred()
            }
            Witness::GoodCycle { steps } => {
                let len = steps.len();
                let mut seen = vec![false; m];
                let distinct = steps
                    .iter()
                    .all(|&(h, _)| h < m && !core::mem::replace(&mut seen[h], true));
                distinct
                    && len >= 2
                    && steps.iter().all(|&(h, i)| i < n && x.get(i, h).is_positive())
                    && (0..len).all(|t| {
                        let (h, i) = steps[t];
                        market.preference(i).weakly_prefers(steps[(t + 1) % len].0, h)
                    })
                    && (0..len).any(|t| {
                        let (h, i) = steps[t];
                        market.preference(i).strictly_prefers(steps[(t + 1) % len].0, h)
                    })
            }
            Witness::DominatingAssignment { y } => {
                y.len() == n
                    && y.iter().all(|r| r.len() == m && r.iter().all(|v| !v.is_negative()))
                    && column_sums(y, m) == column_sums(x.rows(), m)
                    && improves(market, x, &(0..n).collect::<Vec<_>>(), y, Mode::SomeStrict)
            }
            Witness::BlockingCoalition { coalition, y, mode } => {
                let mut members = vec![false; n];
                let valid = !coalition.is_empty()
                    && coalition
                        .iter()
                        .all(|&i| i < n && !core::mem::replace(&mut members[i], true));
                if !valid
                    || y.len() != coalition.len()
                    || y.iter().any(|r| r.len() != m || r.iter().any(Signed::is_negative))
                {
                    return false;
                }
                let own: Matrix = coalition.iter().map(|&i| market.endowment_row(i).to_vec()).collect();
                column_sums(y, m) == column_sums(&own, m) && improves(market, x, coalition, y, *mode)
            }
            Witness::EnvyPair { envious, envied } => {
                has_justified_envy(market, x.rows(), *envious, *envied).unwrap_or(false)
            }
            Witness::Misreport {
                agent,
                report,
                extension,
                truthful,
                manipulated,
            } => {
                *agent < n
                    && report.check_partition(m).is_ok()
                    && truthful.as_slice() == x.row(*agent)
                    && manipulated.len() == m
                    && extension.compare(market.preference(*agent), manipulated, truthful)
                        == Comparison::StrictlyPreferred
            }
        }
    }
}

fn improves(market: &HousingMarket, x: &Assignment, agents: &[usize], y: &Matrix, mode: Mode) -> bool {
    let results: Vec<Comparison> = agents
        .iter()
        .zip(y)
        .map(|(&i, row)| sd(market.preference(i), row, x.row(i)))
        .collect();
    match mode {
        Mode::AllStrict => results.iter().all(|&c| c == Comparison::StrictlyPreferred),
        Mode::SomeStrict => {
            results.iter().all(|c| c.is_weakly_preferred())
                && results.contains(&Comparison::StrictlyPreferred)
        }
    }
}
