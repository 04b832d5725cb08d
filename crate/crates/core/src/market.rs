//! Housing markets with fractional endowments and fractional assignments.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::preference::{Preference, PreferenceError};
use crate::rational::Rational;

/// A rational matrix with one row per agent and one column per house.
pub type Matrix = Vec<Vec<Rational>>;

/// `(N, H, preferences, e)`.
///
/// Agents and houses carry string ids for IO and dense indices internally;
/// every index in this crate is a position in [`agents`](Self::agents) or
/// [`houses`](Self::houses).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HousingMarket {
    agents: Vec<String>,
    houses: Vec<String>,
    preferences: Vec<Preference>,
    endowment: Matrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateAgent(String),
    DuplicateHouse(String),
    PreferenceCount { expected: usize, found: usize },
    NotAPartition { agent: String, reason: PreferenceError },
    EndowmentShape { agent: usize },
    NegativeEndowment { agent: String, house: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateAgent(id) => write!(f, "duplicate agent id {id:?}"),
            Violation::DuplicateHouse(id) => write!(f, "duplicate house id {id:?}"),
            Violation::PreferenceCount { expected, found } => {
                write!(f, "expected {expected} preference lists, found {found}")
            }
            Violation::NotAPartition { agent, reason } => {
                write!(f, "preferences of agent {agent:?} are not a partition: {reason}")
            }
            Violation::EndowmentShape { agent } => {
                write!(f, "endowment row {agent} has the wrong number of entries")
            }
            Violation::NegativeEndowment { agent, house } => {
                write!(f, "negative endowment for agent {agent:?}, house {house:?}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MarketError {
    #[error("invalid market: {}", first_violation(.0))]
    Invalid(Vec<Violation>),
}

fn first_violation(v: &[Violation]) -> String {
    v.first().map(|v| alloc::format!("{v}")).unwrap_or_default()
}

impl HousingMarket {
    /// Builds and validates a market.
    pub fn new(
        agents: Vec<String>,
        houses: Vec<String>,
        preferences: Vec<Vec<Vec<usize>>>,
        endowment: Matrix,
    ) -> Result<Self, MarketError> {
        let market = Self::from_parts(agents, houses, preferences, endowment);
        let violations = market.validate();
        if violations.is_empty() {
            Ok(market)
        } else {
            Err(MarketError::Invalid(violations))
        }
    }

    /// Assembles a market without validation; see [`validate`](Self::validate).
    pub fn from_parts(
        agents: Vec<String>,
        houses: Vec<String>,
        preferences: Vec<Vec<Vec<usize>>>,
        endowment: Matrix,
    ) -> Self {
        let m = houses.len();
        let preferences = preferences
            .into_iter()
            .map(|classes| Preference::from_classes_unchecked(classes, m))
            .collect();
        Self {
            agents,
            houses,
            preferences,
            endowment,
        }
    }

    /// Lists every broken invariant; empty means the market is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for a in &self.agents {
            if !seen.insert(a) {
                out.push(Violation::DuplicateAgent(a.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for h in &self.houses {
            if !seen.insert(h) {
                out.push(Violation::DuplicateHouse(h.clone()));
            }
        }
        let n = self.agents.len();
        let m = self.houses.len();
        if self.preferences.len() != n {
            out.push(Violation::PreferenceCount {
                expected: n,
                found: self.preferences.len(),
            });
        }
        for (i, pref) in self.preferences.iter().enumerate() {
            if let Err(reason) = pref.check_partition(m) {
                out.push(Violation::NotAPartition {
                    agent: self.agents.get(i).cloned().unwrap_or_default(),
                    reason,
                });
            }
        }
        if self.endowment.len() != n {
            out.push(Violation::EndowmentShape {
                agent: self.endowment.len().min(n),
            });
        }
        for (i, row) in self.endowment.iter().enumerate() {
            if row.len() != m {
                out.push(Violation::EndowmentShape { agent: i });
                continue;
            }
            for (h, v) in row.iter().enumerate() {
                if v.is_negative() {
                    out.push(Violation::NegativeEndowment {
                        agent: self.agents.get(i).cloned().unwrap_or_default(),
                        house: self.houses[h].clone(),
                    });
                }
            }
        }
        out
    }

    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn num_houses(&self) -> usize {
        self.houses.len()
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn houses(&self) -> &[String] {
        &self.houses
    }

    pub fn agent_index(&self, id: &str) -> Option<usize> {
        self.agents.iter().position(|a| a == id)
    }

    pub fn house_index(&self, id: &str) -> Option<usize> {
        self.houses.iter().position(|h| h == id)
    }

    pub fn preferences(&self) -> &[Preference] {
        &self.preferences
    }

    pub fn preference(&self, agent: usize) -> &Preference {
        &self.preferences[agent]
    }

    pub fn endowment(&self) -> &Matrix {
        &self.endowment
    }

    pub fn endowment_row(&self, agent: usize) -> &[Rational] {
        &self.endowment[agent]
    }

    /// Total endowed units of each house.
    pub fn supply(&self) -> Vec<Rational> {
        column_sums(&self.endowment, self.num_houses())
    }

    pub fn all_strict(&self) -> bool {
        self.preferences.iter().all(Preference::is_strict)
    }

    /// The classic Shapley–Scarf shape: `n = m` and a permutation endowment.
    pub fn is_classic(&self) -> bool {
        let n = self.num_agents();
        let m = self.num_houses();
        if n != m {
            return false;
        }
        let binary = self
            .endowment
            .iter()
            .flatten()
            .all(|v| v.is_zero() || v.is_one());
        binary
            && self.endowment.iter().all(|row| crate::rational::sum(row).is_one())
            && self.supply().iter().all(One::is_one)
    }

    /// Same agents, houses and endowments with agent `agent`'s preference
    /// replaced.
    pub fn with_preference(&self, agent: usize, preference: Preference) -> Self {
        let mut market = self.clone();
        market.preferences[agent] = preference;
        market
    }

    /// Same agents, houses and preferences with a new endowment matrix.
    pub fn with_endowment(&self, endowment: Matrix) -> Self {
        Self {
            endowment,
            ..self.clone()
        }
    }
}

/// `prefix1, prefix2, ...`
pub fn numbered_ids(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|k| alloc::format!("{prefix}{k}")).collect()
}

pub fn column_sums(x: &[Vec<Rational>], m: usize) -> Vec<Rational> {
    let mut sums = crate::rational::zeros(m);
    for row in x {
        for (s, v) in sums.iter_mut().zip(row) {
            *s += v;
        }
    }
    sums
}

/// A fractional assignment of a market's houses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    rows: Matrix,
    conserved: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AssignmentError {
    #[error("assignment has {found} rows, market has {expected} agents")]
    RowCount { expected: usize, found: usize },
    #[error("assignment row {agent} has {found} entries, market has {expected} houses")]
    RowLength {
        agent: usize,
        expected: usize,
        found: usize,
    },
    #[error("negative entry for agent {agent}, house {house}")]
    Negative { agent: usize, house: usize },
    #[error("column sum of house {house} is {found}, endowment supplies {expected}")]
    Conservation {
        house: usize,
        expected: Rational,
        found: Rational,
    },
}

impl Assignment {
    /// Validates shape, non-negativity and per-house conservation.
    pub fn new(market: &HousingMarket, rows: Matrix) -> Result<Self, AssignmentError> {
        let assignment = Self::new_unconserved(market, rows)?;
        if let Some(err) = assignment.conservation_error(market) {
            return Err(err);
        }
        Ok(assignment)
    }

    /// Validates shape and non-negativity only, recording whether column sums
    /// match the endowment. Needed for externally produced matrices that do
    /// not conserve supply; the checkers in [`crate::verify`] accept these.
    pub fn new_unconserved(market: &HousingMarket, rows: Matrix) -> Result<Self, AssignmentError> {
        let n = market.num_agents();
        let m = market.num_houses();
        if rows.len() != n {
            return Err(AssignmentError::RowCount {
                expected: n,
                found: rows.len(),
            });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(AssignmentError::RowLength {
                    agent: i,
                    expected: m,
                    found: row.len(),
                });
            }
            if let Some(h) = row.iter().position(Signed::is_negative) {
                return Err(AssignmentError::Negative { agent: i, house: h });
            }
        }
        let mut assignment = Self {
            rows,
            conserved: false,
        };
        assignment.conserved = assignment.conservation_error(market).is_none();
        Ok(assignment)
    }

    /// The endowment itself, viewed as an assignment.
    pub fn endowment(market: &HousingMarket) -> Self {
        Self {
            rows: market.endowment().clone(),
            conserved: true,
        }
    }

    fn conservation_error(&self, market: &HousingMarket) -> Option<AssignmentError> {
        let m = market.num_houses();
        let expected = market.supply();
        let found = column_sums(&self.rows, m);
        expected
            .into_iter()
            .zip(found)
            .enumerate()
            .find(|(_, (e, f))| e != f)
            .map(|(house, (expected, found))| AssignmentError::Conservation {
                house,
                expected,
                found,
            })
    }

    pub fn is_conserved(&self) -> bool {
        self.conserved
    }

    /// First house whose column sum differs from the endowment's.
    pub fn conservation_defect(&self, market: &HousingMarket) -> Option<AssignmentError> {
        self.conservation_error(market)
    }

    pub fn rows(&self) -> &Matrix {
        &self.rows
    }

    pub fn row(&self, agent: usize) -> &[Rational] {
        &self.rows[agent]
    }

    pub fn into_rows(self) -> Matrix {
        self.rows
    }

    pub fn get(&self, agent: usize, house: usize) -> &Rational {
        &self.rows[agent][house]
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::rational::{int, ratio};
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn illustration_is_valid_and_not_classic() {
        let m = illustration();
        assert!(m.validate().is_empty());
        assert!(!m.is_classic());
        assert_eq!(m.supply(), vec![int(1), int(1), int(1)]);
    }

    #[test]
    fn classic_detection() {
        assert!(ttc_example().is_classic());
        let one_owner = HousingMarket::new(
            ids("", 2),
            ids("h", 2),
            vec![vec![vec![0], vec![1]]; 2],
            vec![vec![int(1), int(1)], vec![int(0), int(0)]],
        )
        .unwrap();
        assert!(!one_owner.is_classic());
    }

    #[test]
    fn validation_reports_negative_and_partition_defects() {
        let mut e = identity(3);
        e[0][0] = ratio(-1, 2);
        let m = HousingMarket::from_parts(
            ids("", 3),
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vec![vec![0], vec![1], vec![2]],
                vec![vec![1], vec![0, 1], vec![2]],
                vec![vec![0, 1, 2]],
            ],
            e,
        );
        let v = m.validate();
        assert!(v.contains(&Violation::NegativeEndowment {
            agent: "1".into(),
            house: "a".into()
        }));
        assert!(v.iter().any(|x| matches!(x, Violation::NotAPartition { agent, .. } if agent == "2")));
        assert_eq!(v.len(), 2);
        assert!(v[1].to_string().contains("negative"));
    }

    #[test]
    fn duplicate_ids_are_violations() {
        let m = HousingMarket::from_parts(
            vec!["x".into(), "x".into()],
            vec!["a".into()],
            vec![vec![vec![0]]; 2],
            vec![vec![int(1)], vec![int(0)]],
        );
        assert_eq!(m.validate(), vec![Violation::DuplicateAgent("x".into())]);
    }

    #[test]
    fn assignment_conservation() {
        let m = illustration();
        assert!(Assignment::new(&m, illustration_outcome()).is_ok());
        let mut bad = illustration_outcome();
        bad[0][0] = int(1);
        assert!(matches!(
            Assignment::new(&m, bad.clone()),
            Err(AssignmentError::Conservation { house: 0, .. })
        ));
        let lenient = Assignment::new_unconserved(&m, bad).unwrap();
        assert!(!lenient.is_conserved());
        assert!(matches!(
            Assignment::new(&m, vec![vec![int(0); 3]; 2]),
            Err(AssignmentError::RowCount { .. })
        ));
    }
}
