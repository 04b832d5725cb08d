//! Axiom checks on FTTC outputs and on arbitrary assignments, with every
//! reported witness re-validated.

mod common;

use common::matrix;
use fttc_core::classical::equal_endowment_market;
use fttc_core::market::{column_sums, numbered_ids};
use fttc_core::random::random_market;
use fttc_core::rational::{int, ratio};
use fttc_core::verify::{
    check_sd_core, check_sd_efficiency, check_sd_ir, check_sd_strict_core, find_good_cycle, sd_dominates_lp,
    sd_efficiency_lp, Mode, Witness,
};
use fttc_core::{fttc, Assignment, Comparison, HousingMarket, Preference, TieBreak};

fn run(market: &HousingMarket) -> Assignment {
    fttc(market, &TieBreak::default_for(market)).unwrap()
}

#[test]
fn fttc_is_individually_rational_and_efficient() {
    for seed in 0..150u64 {
        let n = 1 + (seed as usize % 5);
        let m = 1 + ((seed as usize / 5) % 5);
        let market = random_market(seed, n, m, &ratio(1, 3), true, 100).unwrap();
        let x = run(&market);
        assert!(check_sd_ir(&market, &x).is_pass(), "seed {seed}");
        assert!(check_sd_efficiency(&market, &x).unwrap().is_pass(), "seed {seed}");
    }
}

#[test]
fn fttc_is_core_stable_on_small_markets() {
    // Up to three agents no blocking coalition has shown up.
    for seed in 0..120u64 {
        let n = 1 + (seed as usize % 3);
        let m = 1 + ((seed as usize / 3) % 4);
        let market = random_market(seed, n, m, &ratio(1, 3), true, 100).unwrap();
        let x = run(&market);
        assert!(check_sd_core(&market, &x).unwrap().is_pass(), "seed {seed}");
    }
}

fn blocked_market() -> HousingMarket {
    let strict = |o: [usize; 3]| o.iter().map(|&h| vec![h]).collect::<Vec<_>>();
    HousingMarket::new(
        numbered_ids("", 4),
        numbered_ids("h", 3),
        vec![strict([0, 2, 1]), strict([2, 0, 1]), strict([0, 1, 2]), strict([2, 1, 0])],
        matrix(&[
            &[(11, 50), (1, 4), (27, 100)],
            &[(3, 10), (6, 25), (11, 50)],
            &[(13, 50), (13, 50), (19, 100)],
            &[(11, 50), (1, 4), (8, 25)],
        ]),
    )
    .unwrap()
}

#[test]
fn fttc_output_can_be_blocked_by_a_pair() {
    let market = blocked_market();
    let x = run(&market);
    assert_eq!(x.row(2), &matrix(&[&[(9, 20), (13, 50), (0, 1)]])[0][..]);
    assert_eq!(x.row(3), &matrix(&[&[(0, 1), (31, 100), (12, 25)]])[0][..]);
    assert!(check_sd_ir(&market, &x).is_pass());
    assert!(check_sd_efficiency(&market, &x).unwrap().is_pass());

    // Hand-built block from the endowments of agents 3 and 4.
    let y = matrix(&[&[(12, 25), (23, 100), (0, 1)], &[(0, 1), (7, 25), (51, 100)]]);
    let own: Vec<_> = [2, 3].iter().map(|&i| market.endowment_row(i).to_vec()).collect();
    assert_eq!(column_sums(&y, 3), column_sums(&own, 3));
    for (k, i) in [2, 3].into_iter().enumerate() {
        assert_eq!(market.preference(i).sd_compare(&y[k], x.row(i)).unwrap(), Comparison::StrictlyPreferred);
    }

    let verdict = check_sd_core(&market, &x).unwrap();
    let witness = verdict.witness().expect("blocked");
    assert!(witness.confirms(&market, &x));
    assert!(matches!(witness, Witness::BlockingCoalition { coalition, .. } if coalition == &vec![2, 3]));
}

#[test]
fn axiom_hierarchy_and_witnesses_on_arbitrary_assignments() {
    for seed in 0..120u64 {
        let n = 1 + (seed as usize % 4);
        let m = 1 + ((seed as usize / 4) % 3);
        let market = random_market(seed, n, m, &ratio(1, 2), true, 6).unwrap();
        let other = random_market(seed + 7919, n, m, &int(0), true, 6).unwrap();
        let candidates = [
            run(&market),
            Assignment::endowment(&market),
            Assignment::new(&market, other.endowment().clone()).unwrap(),
        ];
        for x in &candidates {
            let ir = check_sd_ir(&market, x);
            let eff = check_sd_efficiency(&market, x).unwrap();
            let core = check_sd_core(&market, x).unwrap();
            let strict = check_sd_strict_core(&market, x).unwrap();
            if strict.is_pass() {
                assert!(core.is_pass() && eff.is_pass(), "seed {seed}");
            }
            if core.is_pass() {
                assert!(ir.is_pass(), "seed {seed}");
            }
            for verdict in [&ir, &eff, &core, &strict] {
                if let Some(w) = verdict.witness() {
                    assert!(w.confirms(&market, x), "seed {seed}: bogus {w:?}");
                }
            }
            if let Some(Witness::BlockingCoalition { coalition, .. }) = core.witness() {
                if coalition.len() == 1 {
                    assert!(!ir.is_pass());
                }
            }
        }
    }
}

#[test]
fn lp_and_good_cycle_agree_on_efficiency() {
    for seed in 0..200u64 {
        let n = 1 + (seed as usize % 4);
        let m = 1 + ((seed as usize / 4) % 4);
        let market = random_market(seed, n, m, &ratio(1, 2), true, 5).unwrap();
        let other = random_market(seed + 1, n, m, &ratio(1, 2), true, 5).unwrap();
        let x = Assignment::new(&market, other.endowment().clone()).unwrap();
        assert_eq!(sd_efficiency_lp(&market, &x).is_some(), find_good_cycle(&market, &x).is_some(), "seed {seed}");
    }
}

#[test]
fn grand_coalition_lp_blocks_are_strict_improvements() {
    for seed in 0..40u64 {
        let market = random_market(seed, 3, 3, &ratio(1, 3), true, 10).unwrap();
        let x = market.endowment();
        let everyone = [0, 1, 2];
        let supply = market.supply();
        if let Some(y) = sd_dominates_lp(&market, x, &everyone, &supply, Mode::AllStrict) {
            for i in 0..3 {
                let cmp = market.preference(i).sd_compare(&y[i], &x[i]).unwrap();
                assert_eq!(cmp, Comparison::StrictlyPreferred);
            }
        }
    }
}

/// All grid assignments (in tenths) of the illustration market, in i64.
fn grid_all_strict_block(prefs: &[Preference], x: &[[i64; 3]; 3]) -> bool {
    let splits: Vec<[i64; 3]> = (0..=10)
        .flat_map(|a| (0..=10 - a).map(move |b| [a, b, 10 - a - b]))
        .collect();
    let prefix = |p: &Preference, row: [i64; 3]| -> Vec<i64> {
        let mut acc = 0;
        p.classes().iter().map(|c| { acc += c.iter().map(|&h| row[h]).sum::<i64>(); acc }).collect()
    };
    let strictly_better = |i: usize, y: [i64; 3]| {
        let (py, px) = (prefix(&prefs[i], y), prefix(&prefs[i], x[i]));
        py.iter().zip(&px).all(|(a, b)| a >= b) && py != px
    };
    for ca in &splits {
        for cb in &splits {
            for cc in &splits {
                if (0..3).all(|i| strictly_better(i, [ca[i], cb[i], cc[i]])) {
                    return true;
                }
            }
        }
    }
    false
}

#[test]
fn illustration_outcome_has_no_grand_coalition_block() {
    let market = common::illustration();
    let x = run(&market);
    let everyone = [0, 1, 2];
    assert!(sd_dominates_lp(&market, x.rows(), &everyone, &market.supply(), Mode::AllStrict).is_none());
    // In tenths the outcome rounds to (1, 0, 0), (0, 1, 0), (0, 0, 1);
    // no grid point beats it for all three.
    let grid = [[10, 0, 0], [0, 10, 0], [0, 0, 10]];
    assert!(!grid_all_strict_block(market.preferences(), &grid));
    // Control: swapping a and b for agents 1 and 2 is beaten on the grid.
    let weak = [[0, 10, 0], [10, 0, 0], [0, 0, 10]];
    assert!(grid_all_strict_block(market.preferences(), &weak));
}

#[test]
fn fttc_is_sd_proportional_under_equal_endowments() {
    for seed in 0..20u64 {
        let n = 1 + (seed as usize % 5);
        let m = 1 + ((seed as usize / 5) % 5);
        let base = random_market(seed, n, m, &ratio(1, 3), true, 10).unwrap();
        let market = equal_endowment_market(&base);
        let x = run(&market);
        let share: Vec<_> = market.supply().into_iter().map(|s| s / int(n as i64)).collect();
        for i in 0..n {
            assert!(market.preference(i).sd_compare(x.row(i), &share).unwrap().is_weakly_preferred());
        }
    }
}
