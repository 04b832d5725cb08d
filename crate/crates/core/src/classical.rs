//! Classical baselines: TTC, ATTC on cloned markets, serial dictatorship and
//! the equal-split endowment.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{ToPrimitive, Zero};

use crate::engine::TieBreak;
use crate::market::{Assignment, HousingMarket, Matrix};
use crate::preference::Preference;
use crate::rational::{int, zeros, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClassicalError {
    #[error("market is not classic (needs n = m and a permutation endowment)")]
    NotClassic,
    #[error("preferences are not strict")]
    NotStrict,
    #[error("endowment has a non-integral entry")]
    NotIntegral,
    #[error("tie-break orders do not match the market")]
    TieBreak,
    #[error("priority order is not a permutation of the agents")]
    Order,
    #[error("total demand {demand} differs from total supply {supply}")]
    DemandMismatch { demand: Rational, supply: Rational },
    #[error("input lengths disagree")]
    Shape,
}

/// Gale's top trading cycles on a one-item-per-trader economy.
///
/// `owner[k]` is the trader endowed with item `k` and `prefs[t]` lists every
/// item, best first. Returns the item each trader ends up with.
pub fn top_trading_cycles(owner: &[usize], prefs: &[Vec<usize>]) -> Vec<usize> {
    let traders = prefs.len();
    let mut result = vec![usize::MAX; traders];
    let mut item_alive = vec![true; owner.len()];
    let mut cursor = vec![0usize; traders];
    let mut remaining = traders;
    while remaining > 0 {
        let mut points = vec![usize::MAX; traders];
        for t in 0..traders {
            if result[t] != usize::MAX {
                continue;
            }
            while !item_alive[prefs[t][cursor[t]]] {
                cursor[t] += 1;
            }
            points[t] = prefs[t][cursor[t]];
        }
        // Walk trader -> owner of desired item; every walk ends in a cycle.
        let mut state = vec![0u8; traders];
        for start in 0..traders {
            if result[start] != usize::MAX || state[start] != 0 {
                continue;
            }
            let mut path = Vec::new();
            let mut t = start;
            while state[t] == 0 {
                state[t] = 1;
                path.push(t);
                t = owner[points[t]];
            }
            if state[t] == 1 {
                let from = path.iter().position(|&p| p == t).expect("cycle start on path");
                for &c in &path[from..] {
                    result[c] = points[c];
                    item_alive[points[c]] = false;
                    remaining -= 1;
                }
            }
            for &p in &path {
                state[p] = 2;
            }
        }
    }
    result
}

fn strict_order(pref: &Preference) -> Vec<usize> {
    pref.classes().iter().map(|c| c[0]).collect()
}

/// TTC on a classic market with strict preferences.
pub fn ttc(market: &HousingMarket) -> Result<Assignment, ClassicalError> {
    if !market.is_classic() {
        return Err(ClassicalError::NotClassic);
    }
    if !market.all_strict() {
        return Err(ClassicalError::NotStrict);
    }
    let n = market.num_agents();
    let mut owner = vec![0; n];
    for i in 0..n {
        for h in 0..n {
            if !market.endowment()[i][h].is_zero() {
                owner[h] = i;
            }
        }
    }
    let prefs: Vec<Vec<usize>> = market.preferences().iter().map(strict_order).collect();
    let got = top_trading_cycles(&owner, &prefs);
    let mut rows: Matrix = vec![zeros(n); n];
    for (i, &h) in got.iter().enumerate() {
        rows[i][h] = int(1);
    }
    Ok(Assignment::new(market, rows).expect("TTC permutes the endowment"))
}

/// TTC on the cloned market: every endowed unit becomes a trader owning one
/// copy of its house, copies of a house are ranked by the `L_N` rank of
/// their owner and then by unit index, and the clones' final holdings are
/// summed back per agent.
pub fn attc(market: &HousingMarket, tiebreak: &TieBreak) -> Result<Assignment, ClassicalError> {
    if !market.all_strict() {
        return Err(ClassicalError::NotStrict);
    }
    let n = market.num_agents();
    let m = market.num_houses();
    if tiebreak.agent_order().len() != n || tiebreak.house_order().len() != m {
        return Err(ClassicalError::TieBreak);
    }
    // (agent, house) of each clone, in (L_N, L_H, unit) order.
    let mut clones: Vec<(usize, usize)> = Vec::new();
    for &i in tiebreak.agent_order() {
        for &h in tiebreak.house_order() {
            let units = &market.endowment()[i][h];
            if !units.is_integer() {
                return Err(ClassicalError::NotIntegral);
            }
            let count = units.to_integer().to_usize().ok_or(ClassicalError::NotIntegral)?;
            clones.extend(core::iter::repeat_n((i, h), count));
        }
    }
    // Item k is the copy owned by clone k; copies of one house keep clone order.
    let mut copies: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (k, &(_, h)) in clones.iter().enumerate() {
        copies[h].push(k);
    }
    let owner: Vec<usize> = (0..clones.len()).collect();
    let house_prefs: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            strict_order(market.preference(i))
                .into_iter()
                .flat_map(|h| copies[h].iter().copied())
                .collect()
        })
        .collect();
    let prefs: Vec<Vec<usize>> = clones.iter().map(|&(i, _)| house_prefs[i].clone()).collect();
    let got = top_trading_cycles(&owner, &prefs);
    let mut rows: Matrix = vec![zeros(m); n];
    for (k, &item) in got.iter().enumerate() {
        rows[clones[k].0][clones[item].1] += int(1);
    }
    Ok(Assignment::new(market, rows).expect("cloned TTC permutes the units"))
}

/// Agents in `order` each take `demand[i]` units greedily from their best
/// remaining houses, splitting within an indifference class in
/// `house_order`.
pub fn serial_dictatorship(
    preferences: &[Preference],
    supply: &[Rational],
    order: &[usize],
    demand: &[Rational],
    house_order: &[usize],
) -> Result<Matrix, ClassicalError> {
    let n = preferences.len();
    let m = supply.len();
    if demand.len() != n || house_order.len() != m {
        return Err(ClassicalError::Shape);
    }
    let mut seen = vec![false; n];
    if order.len() != n || order.iter().any(|&i| i >= n || core::mem::replace(&mut seen[i], true)) {
        return Err(ClassicalError::Order);
    }
    let total_demand = crate::rational::sum(demand);
    let total_supply = crate::rational::sum(supply);
    if total_demand != total_supply {
        return Err(ClassicalError::DemandMismatch {
            demand: total_demand,
            supply: total_supply,
        });
    }
    let mut house_rank = vec![0; m];
    for (r, &h) in house_order.iter().enumerate() {
        house_rank[h] = r;
    }
    let mut left = supply.to_vec();
    let mut rows: Matrix = vec![zeros(m); n];
    for &i in order {
        let mut want = demand[i].clone();
        for class in preferences[i].classes() {
            let mut class = class.clone();
            class.sort_by_key(|&h| house_rank[h]);
            for h in class {
                if want.is_zero() {
                    break;
                }
                let take = if left[h] < want { left[h].clone() } else { want.clone() };
                want -= &take;
                left[h] -= &take;
                rows[i][h] += take;
            }
        }
    }
    Ok(rows)
}

/// The market with the same preferences in which every agent owns
/// `supply(h) / n` of every house.
pub fn equal_endowment_market(market: &HousingMarket) -> HousingMarket {
    let n = market.num_agents();
    let share: Vec<Rational> = market
        .supply()
        .into_iter()
        .map(|s| s / int(n as i64))
        .collect();
    market.with_endowment(vec![share; n])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::fixtures::*;
    use crate::rational::ratio;

    #[test]
    fn ttc_gives_everyone_their_top_in_the_example() {
        let x = ttc(&ttc_example()).unwrap();
        assert_eq!(x.rows(), &matrix(&[&[(0, 1), (1, 1), (0, 1)], &[(0, 1), (0, 1), (1, 1)], &[(1, 1), (0, 1), (0, 1)]]));
    }

    #[test]
    fn ttc_rejects_non_classic_or_weak_markets() {
        assert_eq!(ttc(&illustration()), Err(ClassicalError::NotClassic));
        assert_eq!(ttc(&dichotomous()), Err(ClassicalError::NotStrict));
    }

    #[test]
    fn attc_matches_ttc_with_one_clone_per_agent() {
        let market = ttc_example();
        let tb = TieBreak::default_for(&market);
        assert_eq!(attc(&market, &tb).unwrap(), ttc(&market).unwrap());
    }

    #[test]
    fn attc_keeps_supply_with_multiple_units() {
        // agent 1 owns two a's and wants b; agent 2 owns one b and wants a
        let market = HousingMarket::new(
            ids("", 2),
            ids("h", 2),
            vec![vec![vec![1], vec![0]], vec![vec![0], vec![1]]],
            vec![vec![int(2), int(0)], vec![int(0), int(1)]],
        )
        .unwrap();
        let x = attc(&market, &TieBreak::default_for(&market)).unwrap();
        assert_eq!(x.rows(), &vec![vec![int(1), int(1)], vec![int(1), int(0)]]);
        assert_eq!(attc(&illustration(), &TieBreak::default_for(&illustration())), Err(ClassicalError::NotIntegral));
    }

    #[test]
    fn serial_dictatorship_is_greedy() {
        let prefs = vec![Preference::strict(&[0, 1]), Preference::strict(&[0, 1])];
        let one = vec![int(1), int(1)];
        let rows = serial_dictatorship(&prefs, &one, &[0, 1], &one, &[0, 1]).unwrap();
        assert_eq!(rows, vec![vec![int(1), int(0)], vec![int(0), int(1)]]);
        let rows = serial_dictatorship(&prefs, &one, &[1, 0], &one, &[0, 1]).unwrap();
        assert_eq!(rows, vec![vec![int(0), int(1)], vec![int(1), int(0)]]);
    }

    #[test]
    fn serial_dictatorship_splits_ties_in_house_order() {
        let prefs = vec![Preference::new(vec![vec![0, 1]], 2).unwrap()];
        let rows = serial_dictatorship(&prefs, &[int(1), int(1)], &[0], &[ratio(3, 2)], &[1, 0]);
        assert!(matches!(rows, Err(ClassicalError::DemandMismatch { .. })));
        let rows = serial_dictatorship(&prefs, &[ratio(1, 2), int(1)], &[0], &[ratio(3, 2)], &[1, 0]).unwrap();
        assert_eq!(rows, vec![vec![ratio(1, 2), int(1)]]);
    }

    #[test]
    fn equal_split() {
        let market = equal_endowment_market(&ttc_example());
        assert!(market.endowment().iter().flatten().all(|v| *v == ratio(1, 3)));
    }
}
