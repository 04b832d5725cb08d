//! Weak orders over houses and the SD / DL lottery extensions.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::market::HousingMarket;
use crate::rational::Rational;

/// One agent's weak order, stored as equivalence classes best first.
///
/// `rank[h]` is the index of the class containing house `h`. Construction
/// through [`Preference::new`] guarantees the classes partition the houses;
/// [`Preference::from_classes_unchecked`] keeps whatever it is given so a
/// validator can report the defect.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Preference {
    classes: Vec<Vec<usize>>,
    rank: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PreferenceError {
    #[error("preference has no classes")]
    Empty,
    #[error("preference class {0} is empty")]
    EmptyClass(usize),
    #[error("house index {0} out of range")]
    OutOfRange(usize),
    #[error("house {0} listed more than once")]
    Duplicate(usize),
    #[error("house {0} not ranked")]
    Missing(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comparison {
    StrictlyPreferred,
    Equivalent,
    StrictlyDispreferred,
    Incomparable,
}

impl Comparison {
    /// Weak preference: strictly preferred or equivalent.
    pub fn is_weakly_preferred(self) -> bool {
        matches!(self, Comparison::StrictlyPreferred | Comparison::Equivalent)
    }

    pub fn reverse(self) -> Self {
        match self {
            Comparison::StrictlyPreferred => Comparison::StrictlyDispreferred,
            Comparison::StrictlyDispreferred => Comparison::StrictlyPreferred,
            other => other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("allocations have {left} and {right} entries but the preference ranks {houses} houses")]
pub struct HouseSetMismatch {
    pub houses: usize,
    pub left: usize,
    pub right: usize,
}

const UNRANKED: usize = usize::MAX;

impl Preference {
    pub fn new(classes: Vec<Vec<usize>>, num_houses: usize) -> Result<Self, PreferenceError> {
        let pref = Self::from_classes_unchecked(classes, num_houses);
        pref.check_partition(num_houses)?;
        Ok(pref)
    }

    /// A strict order, best house first.
    pub fn strict(order: &[usize]) -> Self {
        Self::from_classes_unchecked(order.iter().map(|&h| vec![h]).collect(), order.len())
    }

    pub fn from_classes_unchecked(classes: Vec<Vec<usize>>, num_houses: usize) -> Self {
        let mut rank = vec![UNRANKED; num_houses];
        for (c, class) in classes.iter().enumerate() {
            for &h in class {
                if h < num_houses && rank[h] == UNRANKED {
                    rank[h] = c;
                }
            }
        }
        Self { classes, rank }
    }

    pub fn check_partition(&self, num_houses: usize) -> Result<(), PreferenceError> {
        if self.classes.is_empty() {
            return Err(PreferenceError::Empty);
        }
        let mut seen = vec![false; num_houses];
        for (c, class) in self.classes.iter().enumerate() {
            if class.is_empty() {
                return Err(PreferenceError::EmptyClass(c));
            }
            for &h in class {
                if h >= num_houses {
                    return Err(PreferenceError::OutOfRange(h));
                }
                if core::mem::replace(&mut seen[h], true) {
                    return Err(PreferenceError::Duplicate(h));
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(h) => Err(PreferenceError::Missing(h)),
            None => Ok(()),
        }
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn num_houses(&self) -> usize {
        self.rank.len()
    }

    pub fn class_of(&self, house: usize) -> usize {
        self.rank[house]
    }

    pub fn is_strict(&self) -> bool {
        self.classes.iter().all(|c| c.len() == 1)
    }

    /// `a` is weakly preferred to `b`.
    pub fn weakly_prefers(&self, a: usize, b: usize) -> bool {
        self.rank[a] <= self.rank[b]
    }

    pub fn strictly_prefers(&self, a: usize, b: usize) -> bool {
        self.rank[a] < self.rank[b]
    }

    /// Best equivalence class among the houses flagged in `available`, in the
    /// order the class lists them.
    pub fn top_among(&self, available: &[bool]) -> Vec<usize> {
        self.classes
            .iter()
            .map(|class| class.iter().copied().filter(|&h| available[h]).collect::<Vec<_>>())
            .find(|c| !c.is_empty())
            .unwrap_or_default()
    }

    /// The nested upper contour sets `E1`, `E1 ∪ E2`, ..., one per class.
    pub fn upper_contour_prefixes(&self) -> Vec<Vec<usize>> {
        let mut acc = Vec::new();
        self.classes
            .iter()
            .map(|class| {
                acc.extend_from_slice(class);
                acc.clone()
            })
            .collect()
    }

    /// Per-class totals of an allocation, best class first.
    pub fn class_totals(&self, allocation: &[Rational]) -> Vec<Rational> {
        self.classes
            .iter()
            .map(|class| class.iter().fold(Rational::zero(), |acc, &h| acc + &allocation[h]))
            .collect()
    }

    /// Cumulative class totals: the mass on each upper contour set.
    pub fn prefix_sums(&self, allocation: &[Rational]) -> Vec<Rational> {
        let mut running = Rational::zero();
        self.class_totals(allocation)
            .into_iter()
            .map(|t| {
                running += t;
                running.clone()
            })
            .collect()
    }

    fn check_dims(&self, a: &[Rational], b: &[Rational]) -> Result<(), HouseSetMismatch> {
        let houses = self.num_houses();
        if a.len() != houses || b.len() != houses {
            return Err(HouseSetMismatch {
                houses,
                left: a.len(),
                right: b.len(),
            });
        }
        Ok(())
    }

    /// Stochastic-dominance comparison of `a` against `b`.
    pub fn sd_compare(&self, a: &[Rational], b: &[Rational]) -> Result<Comparison, HouseSetMismatch> {
        self.check_dims(a, b)?;
        let mut ahead = false;
        let mut behind = false;
        for (pa, pb) in self.prefix_sums(a).iter().zip(self.prefix_sums(b).iter()) {
            match pa.cmp(pb) {
                core::cmp::Ordering::Greater => ahead = true,
                core::cmp::Ordering::Less => behind = true,
                core::cmp::Ordering::Equal => {}
            }
        }
        Ok(match (ahead, behind) {
            (false, false) => Comparison::Equivalent,
            (true, false) => Comparison::StrictlyPreferred,
            (false, true) => Comparison::StrictlyDispreferred,
            (true, true) => Comparison::Incomparable,
        })
    }

    /// Downward-lexicographic comparison on per-class totals.
    pub fn dl_compare(&self, a: &[Rational], b: &[Rational]) -> Result<Comparison, HouseSetMismatch> {
        self.check_dims(a, b)?;
        for (ta, tb) in self.class_totals(a).iter().zip(self.class_totals(b).iter()) {
            match ta.cmp(tb) {
                core::cmp::Ordering::Greater => return Ok(Comparison::StrictlyPreferred),
                core::cmp::Ordering::Less => return Ok(Comparison::StrictlyDispreferred),
                core::cmp::Ordering::Equal => {}
            }
        }
        Ok(Comparison::Equivalent)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("agent index {0} out of range")]
pub struct UnknownAgent(pub usize);

/// Whether agent `i` has justified envy towards agent `j` under assignment
/// `x`: `i` SD-strictly prefers `x(j)` to `x(i)` while `j` SD-weakly prefers
/// `x(i)` to its endowment `e(j)`.
pub fn has_justified_envy(
    market: &HousingMarket,
    x: &[Vec<Rational>],
    i: usize,
    j: usize,
) -> Result<bool, UnknownAgent> {
    let n = market.num_agents();
    for agent in [i, j] {
        if agent >= n || agent >= x.len() {
            return Err(UnknownAgent(agent));
        }
    }
    if i == j {
        return Ok(false);
    }
    let envies = market.preference(i).sd_compare(&x[j], &x[i]) == Ok(Comparison::StrictlyPreferred);
    if !envies {
        return Ok(false);
    }
    let justified = market
        .preference(j)
        .sd_compare(&x[i], market.endowment_row(j))
        .map(Comparison::is_weakly_preferred)
        .unwrap_or(false);
    Ok(justified)
}
