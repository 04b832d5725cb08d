use fttc_core::rational::{ratio, Rational};
use fttc_core::{Comparison, Preference};
use proptest::prelude::*;

/// A weak order from a class label per house, plus three allocations on
/// the grid of quarters.
fn setup() -> impl Strategy<Value = (Preference, [Vec<Rational>; 3])> {
    (1usize..6).prop_flat_map(|m| {
        let labels = proptest::collection::vec(0usize..m, m);
        let row = || proptest::collection::vec(0i64..=4, m);
        (labels, row(), row(), row()).prop_map(move |(labels, a, b, c)| {
            let mut used: Vec<usize> = labels.clone();
            used.sort_unstable();
            used.dedup();
            let classes = used
                .iter()
                .map(|l| (0..m).filter(|&h| labels[h] == *l).collect())
                .collect();
            let q = |r: Vec<i64>| r.into_iter().map(|v| ratio(v, 4)).collect();
            (Preference::new(classes, m).unwrap(), [q(a), q(b), q(c)])
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn sd_refines_into_dl((pref, [a, b, _]) in setup()) {
        let sd = pref.sd_compare(&a, &b).unwrap();
        let dl = pref.dl_compare(&a, &b).unwrap();
        prop_assert_ne!(dl, Comparison::Incomparable);
        match sd {
            Comparison::StrictlyPreferred | Comparison::StrictlyDispreferred | Comparison::Equivalent => {
                prop_assert_eq!(dl, sd)
            }
            Comparison::Incomparable => {}
        }
    }

    #[test]
    fn comparisons_are_antisymmetric((pref, [a, b, _]) in setup()) {
        prop_assert_eq!(pref.sd_compare(&a, &b).unwrap(), pref.sd_compare(&b, &a).unwrap().reverse());
        prop_assert_eq!(pref.dl_compare(&a, &b).unwrap(), pref.dl_compare(&b, &a).unwrap().reverse());
        prop_assert_eq!(pref.sd_compare(&a, &a).unwrap(), Comparison::Equivalent);
    }

    #[test]
    fn comparisons_are_transitive((pref, [a, b, c]) in setup()) {
        for cmp in [Preference::sd_compare, Preference::dl_compare] {
            let ab = cmp(&pref, &a, &b).unwrap();
            let bc = cmp(&pref, &b, &c).unwrap();
            let ac = cmp(&pref, &a, &c).unwrap();
            if ab.is_weakly_preferred() && bc.is_weakly_preferred() {
                prop_assert!(ac.is_weakly_preferred());
                if ab == Comparison::StrictlyPreferred || bc == Comparison::StrictlyPreferred {
                    prop_assert_eq!(ac, Comparison::StrictlyPreferred);
                }
            }
        }
    }

    // With no class total above x's, DL-weakly-better means DL-equivalent.
    #[test]
    fn dl_weak_gain_without_more_of_any_class_is_equivalence(
        (pref, [x, _, cut]) in setup(),
        seed in any::<u64>(),
    ) {
        // y: move mass within classes of x, then remove some of it.
        let m = x.len();
        let mut y = x.clone();
        for class in pref.classes() {
            let total: Rational = class.iter().map(|&h| &x[h]).sum();
            let target = class[(seed as usize) % class.len()];
            for &h in class {
                y[h] = ratio(0, 1);
            }
            y[target] = total;
        }
        for h in 0..m {
            if cut[h] > ratio(1, 2) && seed % 3 == 0 {
                y[h] = &y[h] / ratio(2, 1);
            }
        }
        let tx = pref.class_totals(&x);
        let ty = pref.class_totals(&y);
        prop_assume!(ty.iter().zip(&tx).all(|(a, b)| a <= b));
        if pref.dl_compare(&y, &x).unwrap().is_weakly_preferred() {
            prop_assert_eq!(pref.dl_compare(&y, &x).unwrap(), Comparison::Equivalent);
            prop_assert_eq!(ty, tx);
        }
    }
}
