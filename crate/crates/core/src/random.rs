//! Seeded random markets.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::market::{numbered_ids, HousingMarket, Matrix};
use crate::preference::Preference;
use crate::rational::{int, ratio, zeros, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenerateError {
    #[error("a market needs at least one agent and one house")]
    Empty,
    #[error("a permutation endowment needs as many agents ({agents}) as houses ({houses})")]
    NotSquare { agents: usize, houses: usize },
    #[error("granularity must be positive")]
    Granularity,
    #[error("tie probability must lie in [0, 1] with a denominator below 2^64")]
    TieProbability,
}

/// A uniformly random weak order over `m` houses: a random strict order
/// whose adjacent houses are merged into one class with probability
/// `tie`.
pub fn random_preference(rng: &mut impl Rng, m: usize, tie: &Rational) -> Preference {
    let (numer, denom) = probability_parts(tie).expect("tie probability checked by caller");
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for h in order {
        match classes.last_mut() {
            Some(class) if numer > 0 && rng.gen_range(0..denom) < numer => class.push(h),
            _ => classes.push(vec![h]),
        }
    }
    for class in classes.iter_mut() {
        class.sort_unstable();
    }
    Preference::from_classes_unchecked(classes, m)
}

fn probability_parts(p: &Rational) -> Option<(u64, u64)> {
    if p.numer() < &Zero::zero() || p > &int(1) {
        return None;
    }
    Some((p.numer().to_u64()?, p.denom().to_u64()?))
}

/// A seeded random market with ids `1..n` for agents and `h1..hm` for
/// houses.
///
/// Fractional endowments split one unit of every house into `granularity`
/// equal pieces, each given to a uniformly random agent. Otherwise the
/// endowment is a random permutation matrix.
pub fn random_market(
    seed: u64,
    n: usize,
    m: usize,
    tie_probability: &Rational,
    fractional: bool,
    granularity: u32,
) -> Result<HousingMarket, GenerateError> {
    if n == 0 || m == 0 {
        return Err(GenerateError::Empty);
    }
    if granularity == 0 {
        return Err(GenerateError::Granularity);
    }
    if probability_parts(tie_probability).is_none() {
        return Err(GenerateError::TieProbability);
    }
    if !fractional && n != m {
        return Err(GenerateError::NotSquare {
            agents: n,
            houses: m,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let preferences = (0..n)
        .map(|_| random_preference(&mut rng, m, tie_probability).classes().to_vec())
        .collect();
    let mut endowment: Matrix = vec![zeros(m); n];
    if fractional {
        let piece = ratio(1, i64::from(granularity));
        for h in 0..m {
            for _ in 0..granularity {
                endowment[rng.gen_range(0..n)][h] += &piece;
            }
        }
    } else {
        let mut owners: Vec<usize> = (0..n).collect();
        owners.shuffle(&mut rng);
        for (h, &i) in owners.iter().enumerate() {
            endowment[i][h] = int(1);
        }
    }
    Ok(HousingMarket::new(
        numbered_ids("", n),
        numbered_ids("h", m),
        preferences,
        endowment,
    )
    .expect("generated markets are valid"))
}

/// A seeded market with strict preferences and whole-unit endowments: every
/// entry is drawn from `0..=max_units`, and every house gets at least one
/// unit.
pub fn random_multi_unit_market(
    seed: u64,
    n: usize,
    m: usize,
    max_units: u32,
) -> Result<HousingMarket, GenerateError> {
    if n == 0 || m == 0 {
        return Err(GenerateError::Empty);
    }
    if max_units == 0 {
        return Err(GenerateError::Granularity);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let strict = Rational::zero();
    let preferences = (0..n)
        .map(|_| random_preference(&mut rng, m, &strict).classes().to_vec())
        .collect();
    let mut endowment: Matrix = vec![zeros(m); n];
    for h in 0..m {
        for row in endowment.iter_mut() {
            row[h] = int(i64::from(rng.gen_range(0..=max_units)));
        }
        if endowment.iter().all(|row| row[h].is_zero()) {
            endowment[rng.gen_range(0..n)][h] = int(1);
        }
    }
    Ok(HousingMarket::new(
        numbered_ids("", n),
        numbered_ids("h", m),
        preferences,
        endowment,
    )
    .expect("generated markets are valid"))
}
