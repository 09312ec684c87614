//! Exact linear programming and polytope vertex enumeration.
//!
//! Every norm in this crate bottoms out here. Both routines work in exact
//! rational arithmetic, so identities between norms can be asserted as
//! equalities instead of within tolerances.

mod polytope;
mod simplex;

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{dot, Vector};
use crate::rational::Rational;

pub use polytope::{enumerate_vertices, Polytope};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Sign restriction on a variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarBound {
    NonNegative,
    NonPositive,
    Free,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coefficients: Vector,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vector,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<VarBound>,
}

impl LinearProgram {
    /// A program over nonnegative variables; use [`LinearProgram::with_bounds`] to relax signs.
    pub fn new(sense: Sense, objective: Vector) -> Self {
        let n = objective.len();
        LinearProgram { sense, objective, constraints: Vec::new(), bounds: vec![VarBound::NonNegative; n] }
    }

    pub fn minimize(objective: Vector) -> Self {
        Self::new(Sense::Minimize, objective)
    }

    pub fn maximize(objective: Vector) -> Self {
        Self::new(Sense::Maximize, objective)
    }

    pub fn with_bounds(mut self, bounds: Vec<VarBound>) -> Self {
        self.bounds = bounds;
        self
    }

    pub fn all_free(mut self) -> Self {
        self.bounds = vec![VarBound::Free; self.objective.len()];
        self
    }

    pub fn constrain(&mut self, coefficients: Vector, relation: Relation, rhs: Rational) -> &mut Self {
        self.constraints.push(Constraint { coefficients, relation, rhs });
        self
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    /// Width checks, reported before any pivoting.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(Error::MalformedProgram(format!("{} variable bounds for {n} variables", self.bounds.len())));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coefficients.len() != n {
                return Err(Error::MalformedProgram(format!(
                    "row {i} has width {}, expected {n}",
                    c.coefficients.len()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of [`solve_lp`]. `value`, `primal` and `duals` are meaningful only when optimal.
///
/// Duals follow the convention `value = Σ rhs_i · duals_i`; for a minimization
/// `≥` rows carry nonnegative multipliers and `≤` rows nonpositive ones, and
/// the signs flip for a maximization.
#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub value: Rational,
    pub primal: Vector,
    pub duals: Vector,
}

impl LpSolution {
    fn infeasible(n: usize, m: usize) -> Self {
        Self::empty(LpStatus::Infeasible, n, m)
    }

    fn unbounded(n: usize, m: usize) -> Self {
        Self::empty(LpStatus::Unbounded, n, m)
    }

    fn empty(status: LpStatus, n: usize, m: usize) -> Self {
        LpSolution { status, value: Rational::zero(), primal: crate::linalg::zeros(n), duals: crate::linalg::zeros(m) }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// Re-checks an optimal solution by substitution: primal feasibility,
    /// dual feasibility, and equal objective values (which with the first
    /// two is complementary slackness).
    pub fn verify(&self, lp: &LinearProgram) -> std::result::Result<(), String> {
        if self.status != LpStatus::Optimal {
            return Err(format!("status is {:?}", self.status));
        }
        let max = lp.sense == Sense::Maximize;
        for (j, (x, b)) in self.primal.iter().zip(&lp.bounds).enumerate() {
            let ok = match b {
                VarBound::NonNegative => !x.is_negative(),
                VarBound::NonPositive => !x.is_positive(),
                VarBound::Free => true,
            };
            if !ok {
                return Err(format!("variable {j} violates its sign bound"));
            }
        }
        for (i, (c, y)) in lp.constraints.iter().zip(&self.duals).enumerate() {
            let lhs = dot(&c.coefficients, &self.primal);
            let ok = match c.relation {
                Relation::Le => lhs <= c.rhs,
                Relation::Ge => lhs >= c.rhs,
                Relation::Eq => lhs == c.rhs,
            };
            if !ok {
                return Err(format!("row {i} is violated"));
            }
            // Sign of the multiplier for a minimization; reversed when maximizing.
            let sign_ok = match (c.relation, max) {
                (Relation::Eq, _) => true,
                (Relation::Ge, false) | (Relation::Le, true) => !y.is_negative(),
                (Relation::Le, false) | (Relation::Ge, true) => !y.is_positive(),
            };
            if !sign_ok {
                return Err(format!("multiplier {i} has the wrong sign"));
            }
        }
        for (j, b) in lp.bounds.iter().enumerate() {
            let aty = lp
                .constraints
                .iter()
                .zip(&self.duals)
                .fold(Rational::zero(), |acc, (c, y)| acc + &c.coefficients[j] * y);
            let reduced = &lp.objective[j] - aty;
            let ok = match (b, max) {
                (VarBound::Free, _) => reduced.is_zero(),
                (VarBound::NonNegative, false) | (VarBound::NonPositive, true) => !reduced.is_negative(),
                (VarBound::NonNegative, true) | (VarBound::NonPositive, false) => !reduced.is_positive(),
            };
            if !ok {
                return Err(format!("reduced cost of variable {j} has the wrong sign"));
            }
        }
        let primal_value = dot(&lp.objective, &self.primal);
        let dual_value = lp.constraints.iter().zip(&self.duals).fold(Rational::zero(), |acc, (c, y)| acc + &c.rhs * y);
        if primal_value != self.value || dual_value != self.value {
            return Err("primal and dual objective values differ".into());
        }
        Ok(())
    }
}

/// Solves `lp` exactly. Width mismatches are reported before solving.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    simplex::solve(lp)
}

/// Solves and insists on an optimal status; used where boundedness and
/// feasibility hold by construction.
pub(crate) fn solve_optimal(lp: &LinearProgram, what: &str) -> Result<LpSolution> {
    let sol = solve_lp(lp)?;
    if !sol.is_optimal() {
        return Err(Error::Solver(format!("{what}: program is {:?}", sol.status)));
    }
    debug_assert_eq!(sol.verify(lp), Ok(()), "{what}: certificate failed");
    Ok(sol)
}
