//! Two-phase dense tableau simplex over exact rationals with Bland's rule.

use num::{Signed, Zero};

use super::{LinearProgram, LpSolution, LpStatus, Relation, Sense, VarBound};
use crate::error::{Error, Result};
use crate::linalg::zeros;
use crate::rational::{self, Rational};

/// Pivot budget; Bland's rule cannot cycle, this only guards against bugs.
const PIVOT_LIMIT: usize = 1_000_000;

struct Tableau {
    rows: Vec<Vec<Rational>>,
    /// Reduced costs followed by minus the objective value.
    obj: Vec<Rational>,
    basis: Vec<usize>,
    ncols: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let nz: Vec<usize> = (0..=self.ncols).filter(|&k| !pivot_row[k].is_zero()).collect();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for &k in &nz {
                row[k] -= &f * &pivot_row[k];
            }
        }
        if !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for &k in &nz {
                self.obj[k] -= &f * &pivot_row[k];
            }
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    fn set_objective(&mut self, cost: &[Rational]) {
        let mut obj = cost.to_vec();
        obj.push(Rational::zero());
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (k, o) in obj.iter_mut().enumerate() {
                let t = &self.rows[i][k];
                if !t.is_zero() {
                    *o -= cb * t;
                }
            }
        }
        self.obj = obj;
    }

    fn run(&mut self, allowed: &[bool], pivots: &mut usize) -> Result<Outcome> {
        loop {
            let Some(c) = (0..self.ncols).find(|&j| allowed[j] && self.obj[j].is_negative()) else {
                return Ok(Outcome::Optimal);
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((r, _)) = best else {
                return Ok(Outcome::Unbounded);
            };
            self.pivot(r, c);
            *pivots += 1;
            if *pivots > PIVOT_LIMIT {
                return Err(Error::Solver("pivot limit reached".into()));
            }
        }
    }
}

pub(super) fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.num_vars();
    let m = lp.constraints.len();

    // Split original variables into nonnegative standard-form columns.
    let mut columns: Vec<Vec<(usize, i32)>> = Vec::with_capacity(n);
    let mut nstd = 0;
    for b in &lp.bounds {
        let cols = match b {
            VarBound::NonNegative => vec![(nstd, 1)],
            VarBound::NonPositive => vec![(nstd, -1)],
            VarBound::Free => vec![(nstd, 1), (nstd + 1, -1)],
        };
        nstd += cols.len();
        columns.push(cols);
    }
    let nslack = lp.constraints.iter().filter(|c| c.relation != Relation::Eq).count();
    let art0 = nstd + nslack;
    let ncols = art0 + m;

    let mut rows = Vec::with_capacity(m);
    let mut flips = Vec::with_capacity(m);
    let mut slack = nstd;
    for (i, con) in lp.constraints.iter().enumerate() {
        let mut row = zeros(ncols + 1);
        for (j, a) in con.coefficients.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for &(col, s) in &columns[j] {
                row[col] = if s > 0 { a.clone() } else { -a.clone() };
            }
        }
        match con.relation {
            Relation::Le => {
                row[slack] = rational::one();
                slack += 1;
            }
            Relation::Ge => {
                row[slack] = -rational::one();
                slack += 1;
            }
            Relation::Eq => {}
        }
        row[ncols] = con.rhs.clone();
        let flip = con.rhs.is_negative();
        if flip {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
        }
        row[art0 + i] = rational::one();
        flips.push(flip);
        rows.push(row);
    }

    let mut tab = Tableau { rows, obj: Vec::new(), basis: (art0..art0 + m).collect(), ncols };
    let mut pivots = 0;

    // Phase I
    let mut phase1 = zeros(ncols);
    for c in phase1.iter_mut().skip(art0) {
        *c = rational::one();
    }
    tab.set_objective(&phase1);
    let all = vec![true; ncols];
    tab.run(&all, &mut pivots)?;
    if !tab.obj[ncols].is_zero() {
        return Ok(LpSolution::infeasible(n, m));
    }
    // Drive zero-level artificials out of the basis where a real column allows it.
    for r in 0..m {
        if tab.basis[r] >= art0 {
            if let Some(c) = (0..art0).find(|&j| !tab.rows[r][j].is_zero()) {
                tab.pivot(r, c);
            }
        }
    }

    // Phase II
    let sign = match lp.sense {
        Sense::Minimize => rational::one(),
        Sense::Maximize => -rational::one(),
    };
    let mut cost = zeros(ncols);
    for (j, cj) in lp.objective.iter().enumerate() {
        for &(col, s) in &columns[j] {
            cost[col] = if s > 0 { cj * &sign } else { -(cj * &sign) };
        }
    }
    tab.set_objective(&cost);
    let real: Vec<bool> = (0..ncols).map(|j| j < art0).collect();
    if let Outcome::Unbounded = tab.run(&real, &mut pivots)? {
        return Ok(LpSolution::unbounded(n, m));
    }

    let mut xstd = zeros(ncols);
    for (i, &b) in tab.basis.iter().enumerate() {
        xstd[b] = tab.rhs(i).clone();
    }
    let primal: Vec<Rational> = columns
        .iter()
        .map(|cols| {
            cols.iter().fold(Rational::zero(), |acc, &(col, s)| if s > 0 { acc + &xstd[col] } else { acc - &xstd[col] })
        })
        .collect();

    // y = c_Bᵀ B⁻¹; B⁻¹ sits in the artificial columns.
    let duals: Vec<Rational> = (0..m)
        .map(|i| {
            let mut y = Rational::zero();
            for (r, &b) in tab.basis.iter().enumerate() {
                let cb = &cost[b];
                if !cb.is_zero() {
                    y += cb * &tab.rows[r][art0 + i];
                }
            }
            if flips[i] {
                y = -y;
            }
            y * &sign
        })
        .collect();

    let value = crate::linalg::dot(&lp.objective, &primal);
    Ok(LpSolution { status: LpStatus::Optimal, value, primal, duals })
}
