//! Markets shared by the integration tests.
#![allow(dead_code)]

use fttc_core::market::{numbered_ids, HousingMarket, Matrix};
use fttc_core::rational::{int, ratio};

pub fn matrix(rows: &[&[(i64, i64)]]) -> Matrix {
    rows.iter()
        .map(|r| r.iter().map(|&(p, q)| ratio(p, q)).collect())
        .collect()
}

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|h| int(i64::from(h == i))).collect())
        .collect()
}

fn ids(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn strict(orders: &[&[usize]]) -> Vec<Vec<Vec<usize>>> {
    orders.iter().map(|o| o.iter().map(|&h| vec![h]).collect()).collect()
}

/// Houses a, b, c; 1: a c b, 2 and 3: b a c; 0.99 / 0.01 holdings.
pub fn illustration() -> HousingMarket {
    HousingMarket::new(
        ids(&["1", "2", "3"]),
        ids(&["a", "b", "c"]),
        strict(&[&[0, 2, 1], &[1, 0, 2], &[1, 0, 2]]),
        matrix(&[
            &[(0, 1), (99, 100), (1, 100)],
            &[(99, 100), (0, 1), (1, 100)],
            &[(1, 100), (1, 100), (98, 100)],
        ]),
    )
    .unwrap()
}

pub fn illustration_outcome() -> Matrix {
    matrix(&[
        &[(99, 100), (0, 1), (1, 100)],
        &[(0, 1), (99, 100), (1, 100)],
        &[(1, 100), (1, 100), (98, 100)],
    ])
}

/// Controlled-consuming outcome on the illustration market, as given.
pub fn cc_output() -> Matrix {
    matrix(&[
        &[(101, 200), (0, 1), (97, 200)],
        &[(49, 100), (1, 2), (1, 100)],
        &[(1, 20), (1, 2), (99, 200)],
    ])
}

pub fn ttc_example() -> HousingMarket {
    HousingMarket::new(
        ids(&["1", "2", "3"]),
        ids(&["a", "b", "c"]),
        strict(&[&[1, 2, 0], &[2, 0, 1], &[0, 1, 2]]),
        identity(3),
    )
    .unwrap()
}

pub fn core_envy() -> HousingMarket {
    HousingMarket::new(
        ids(&["1", "2", "3"]),
        ids(&["a", "b", "c"]),
        strict(&[&[2, 1, 0], &[0, 1, 2], &[0, 1, 2]]),
        matrix(&[&[(1, 1), (0, 1), (0, 1)], &[(0, 1), (0, 1), (1, 1)], &[(0, 1), (1, 1), (0, 1)]]),
    )
    .unwrap()
}

pub fn imposs() -> HousingMarket {
    HousingMarket::new(
        numbered_ids("", 5),
        numbered_ids("h", 5),
        strict(&[
            &[2, 0, 1, 3, 4],
            &[4, 0, 1, 2, 3],
            &[0, 3, 1, 2, 4],
            &[1, 3, 0, 2, 4],
            &[4, 2, 0, 1, 3],
        ]),
        matrix(&[
            &[(1, 2), (1, 2), (0, 1), (0, 1), (0, 1)],
            &[(0, 1), (0, 1), (1, 2), (0, 1), (1, 2)],
            &[(1, 2), (0, 1), (0, 1), (1, 2), (0, 1)],
            &[(0, 1), (1, 2), (0, 1), (1, 2), (0, 1)],
            &[(0, 1), (0, 1), (1, 2), (0, 1), (1, 2)],
        ]),
    )
    .unwrap()
}

/// Approval preferences 1: {h1,h2,h4}, 2: {h3}, 3: {h1}, 4: {h5}, 5: {h1};
/// agent i owns h_i.
pub fn dichotomous() -> HousingMarket {
    let approvals: [&[usize]; 5] = [&[0, 1, 3], &[2], &[0], &[4], &[0]];
    let prefs = approvals
        .iter()
        .map(|yes| {
            let no: Vec<usize> = (0..5).filter(|h| !yes.contains(h)).collect();
            vec![yes.to_vec(), no]
        })
        .collect();
    HousingMarket::new(numbered_ids("", 5), numbered_ids("h", 5), prefs, identity(5)).unwrap()
}
