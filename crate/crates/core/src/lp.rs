//! Exact rational linear programming.
//!
//! Two-phase dense tableau simplex with Bland's rule. All variables are
//! implicitly non-negative and the objective is maximized. Every optimal
//! point is re-checked against the original constraints before it is
//! returned.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn is_satisfied_by(&self, point: &[Rational]) -> bool {
        let lhs = self
            .coeffs
            .iter()
            .zip(point)
            .fold(Rational::zero(), |acc, (a, x)| acc + a * x);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }
}

/// `maximize objective · x` subject to `constraints`, `x >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    num_vars: usize,
    constraints: Vec<Constraint>,
    objective: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: Vec<Rational> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal_value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            constraints: Vec::new(),
            objective: vec![Rational::zero(); num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    /// Adds a dense constraint. Panics if `coeffs` has the wrong length.
    pub fn add_constraint(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        assert_eq!(coeffs.len(), self.num_vars, "constraint dimension");
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    /// Adds a constraint given as `(variable, coefficient)` terms; repeated
    /// variables accumulate.
    pub fn add_sparse(&mut self, terms: &[(usize, Rational)], relation: Relation, rhs: Rational) {
        let mut coeffs = vec![Rational::zero(); self.num_vars];
        for (v, c) in terms {
            coeffs[*v] += c;
        }
        self.add_constraint(coeffs, relation, rhs);
    }

    pub fn set_objective(&mut self, objective: Vec<Rational>) {
        assert_eq!(objective.len(), self.num_vars, "objective dimension");
        self.objective = objective;
    }

    pub fn set_objective_sparse(&mut self, terms: &[(usize, Rational)]) {
        let mut objective = vec![Rational::zero(); self.num_vars];
        for (v, c) in terms {
            objective[*v] += c;
        }
        self.objective = objective;
    }

    pub fn is_feasible_point(&self, point: &[Rational]) -> bool {
        point.len() == self.num_vars
            && point.iter().all(|x| !x.is_negative())
            && self.constraints.iter().all(|c| c.is_satisfied_by(point))
    }

    pub fn evaluate(&self, point: &[Rational]) -> Rational {
        self.objective
            .iter()
            .zip(point)
            .fold(Rational::zero(), |acc, (c, x)| acc + c * x)
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.rows[row][col].recip();
        for v in self.rows[row].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        self.rhs[row] *= &inv;
        let support: Vec<usize> = (0..self.rows[row].len())
            .filter(|&j| !self.rows[row][j].is_zero())
            .collect();
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for r in 0..self.rows.len() {
            if r == row || self.rows[r][col].is_zero() {
                continue;
            }
            let factor = self.rows[r][col].clone();
            for &j in &support {
                let delta = &factor * &pivot_row[j];
                self.rows[r][j] -= delta;
            }
            self.rhs[r] -= &factor * &pivot_rhs;
        }
        self.basis[row] = col;
    }

    /// Maximizes `cost · x` over columns `< eligible`.
    fn optimize(&mut self, cost: &[Rational], eligible: usize) -> Phase {
        let mut is_basic = vec![false; cost.len()];
        for &b in &self.basis {
            is_basic[b] = true;
        }
        loop {
            // Bland: the lowest-index column with positive reduced cost enters.
            let entering = (0..eligible).find(|&j| {
                if is_basic[j] {
                    return false;
                }
                let mut reduced = cost[j].clone();
                for (r, &b) in self.basis.iter().enumerate() {
                    let a = &self.rows[r][j];
                    if !a.is_zero() && !cost[b].is_zero() {
                        reduced -= &cost[b] * a;
                    }
                }
                reduced.is_positive()
            });
            let Some(col) = entering else {
                return Phase::Optimal;
            };
            let mut leaving: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / a;
                let better = match &leaving {
                    None => true,
                    Some((best, best_ratio)) => match ratio.cmp(best_ratio) {
                        Ordering::Less => true,
                        Ordering::Equal => self.basis[r] < self.basis[*best],
                        Ordering::Greater => false,
                    },
                };
                if better {
                    leaving = Some((r, ratio));
                }
            }
            let Some((row, _)) = leaving else {
                return Phase::Unbounded;
            };
            is_basic[self.basis[row]] = false;
            is_basic[col] = true;
            self.pivot(row, col);
        }
    }

    fn value(&self, cost: &[Rational]) -> Rational {
        self.basis
            .iter()
            .zip(&self.rhs)
            .fold(Rational::zero(), |acc, (&b, v)| acc + &cost[b] * v)
    }
}

/// Solves `program` exactly.
pub fn solve_lp(program: &LinearProgram) -> LpOutcome {
    let n = program.num_vars;
    let slack_count = program
        .constraints
        .iter()
        .filter(|c| c.relation != Relation::Eq)
        .count();
    let artificial_count = program
        .constraints
        .iter()
        .filter(|c| {
            let flip = c.rhs.is_negative();
            matches!(
                (c.relation, flip),
                (Relation::Eq, _) | (Relation::Ge, false) | (Relation::Le, true)
            )
        })
        .count();
    let real_cols = n + slack_count;
    let width = real_cols + artificial_count;

    let mut tableau = Tableau {
        rows: Vec::with_capacity(program.constraints.len()),
        rhs: Vec::with_capacity(program.constraints.len()),
        basis: Vec::with_capacity(program.constraints.len()),
    };
    let mut next_slack = n;
    let mut next_artificial = real_cols;
    for c in &program.constraints {
        let flip = c.rhs.is_negative();
        let mut row = vec![Rational::zero(); width];
        for (j, a) in c.coeffs.iter().enumerate() {
            row[j] = if flip { -a } else { a.clone() };
        }
        let relation = match (c.relation, flip) {
            (Relation::Le, true) => Relation::Ge,
            (Relation::Ge, true) => Relation::Le,
            (r, _) => r,
        };
        if c.relation != Relation::Eq {
            row[next_slack] = if relation == Relation::Le {
                Rational::one()
            } else {
                -Rational::one()
            };
        }
        let basic = match relation {
            Relation::Le => next_slack,
            _ => {
                row[next_artificial] = Rational::one();
                next_artificial += 1;
                next_artificial - 1
            }
        };
        if c.relation != Relation::Eq {
            next_slack += 1;
        }
        tableau.rows.push(row);
        tableau.rhs.push(if flip { -&c.rhs } else { c.rhs.clone() });
        tableau.basis.push(basic);
    }

    if artificial_count > 0 {
        let mut phase_one = vec![Rational::zero(); width];
        for c in phase_one.iter_mut().skip(real_cols) {
            *c = -Rational::one();
        }
        // Phase one is bounded above by zero.
        let _ = tableau.optimize(&phase_one, width);
        if tableau.value(&phase_one).is_negative() {
            return LpOutcome::Infeasible;
        }
        // Drive remaining (zero-level) artificials out of the basis; rows
        // where that is impossible are redundant.
        let mut redundant = Vec::new();
        for r in 0..tableau.rows.len() {
            if tableau.basis[r] < real_cols {
                continue;
            }
            match (0..real_cols).find(|&j| !tableau.rows[r][j].is_zero()) {
                Some(j) => tableau.pivot(r, j),
                None => redundant.push(r),
            }
        }
        for &r in redundant.iter().rev() {
            tableau.rows.remove(r);
            tableau.rhs.remove(r);
            tableau.basis.remove(r);
        }
        for row in tableau.rows.iter_mut() {
            row.truncate(real_cols);
        }
    }

    let mut cost = program.objective.clone();
    cost.resize(real_cols, Rational::zero());
    if let Phase::Unbounded = tableau.optimize(&cost, real_cols) {
        return LpOutcome::Unbounded;
    }
    let mut point = vec![Rational::zero(); n];
    for (r, &b) in tableau.basis.iter().enumerate() {
        if b < n {
            point[b] = tableau.rhs[r].clone();
        }
    }
    assert!(
        program.is_feasible_point(&point),
        "simplex produced a point violating the constraints"
    );
    let value = program.evaluate(&point);
    LpOutcome::Optimal { value, point }
}

/// Whether the constraint set (with `x >= 0`) is non-empty.
pub fn feasible(program: &LinearProgram) -> bool {
    let mut probe = program.clone();
    probe.objective = vec![Rational::zero(); program.num_vars];
    !matches!(solve_lp(&probe), LpOutcome::Infeasible)
}
