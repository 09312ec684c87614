//! The Lipschitz unit ball `B_{X#}` and the free space `F(X)`.
//!
//! Coordinates are indexed by the non-base points: a free vector `a` stands for
//! `Σ a_x δ_x`, and a Lipschitz function `f` for its values `f(x)`, `f(0) = 0`.

use num::{Signed, Zero};

use super::{FiniteMetricSpace, PolyhedralNorm};
use crate::config::Caps;
use crate::error::{Cap, Error, Result};
use crate::linalg::{self, Vector};
use crate::lp::{enumerate_vertices, solve_optimal, LinearProgram, Polytope, Relation};
use crate::rational::Rational;

pub type FreeVector = Vector;
pub type LipschitzFunctionVector = Vector;

/// `δ_x` in free coordinates; `δ_0 = 0`.
pub fn delta(space: &FiniteMetricSpace, x: usize) -> FreeVector {
    let n = space.free_dim();
    if x == 0 {
        linalg::zeros(n)
    } else {
        linalg::unit(n, x - 1)
    }
}

/// Value of `f` at point `x` (zero at the base point).
pub fn value_at(f: &[Rational], x: usize) -> Rational {
    if x == 0 {
        Rational::zero()
    } else {
        f[x - 1].clone()
    }
}

/// `|f(x) − f(y)| <= d(x,y)` for every pair, base point included.
pub fn lipschitz_constraints(space: &FiniteMetricSpace) -> Polytope {
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (x, y) in space.pairs() {
        let e = linalg::sub(&delta(space, x), &delta(space, y));
        rows.push(linalg::neg(&e));
        rows.push(e);
        rhs.push(space.d(x, y).clone());
        rhs.push(space.d(x, y).clone());
    }
    Polytope::new(space.free_dim(), rows, rhs).expect("consistent widths")
}

/// Exact vertex set of `B_{X#}`, sorted.
pub fn lipschitz_ball_vertices(space: &FiniteMetricSpace, caps: &Caps) -> Result<Vec<LipschitzFunctionVector>> {
    caps.check(Cap::Points, space.len())?;
    enumerate_vertices(&lipschitz_constraints(space), caps)
}

/// Lipschitz constant of a real function given on the non-base points.
pub fn lip_constant(space: &FiniteMetricSpace, f: &[Rational]) -> Rational {
    space
        .pairs()
        .map(|(x, y)| (value_at(f, x) - value_at(f, y)).abs() / space.d(x, y))
        .max()
        .unwrap_or_else(Rational::zero)
}

pub fn in_lipschitz_ball(space: &FiniteMetricSpace, f: &[Rational]) -> bool {
    f.len() == space.free_dim() && lipschitz_constraints(space).contains(f)
}

/// Free norm together with a norming function `f ∈ B_{X#}` (the LP duals).
pub fn free_norm_with_witness(
    m: &[Rational],
    space: &FiniteMetricSpace,
) -> Result<(Rational, LipschitzFunctionVector)> {
    let n = space.free_dim();
    if m.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: m.len() });
    }
    if linalg::is_zero(m) {
        return Ok((Rational::zero(), linalg::zeros(n)));
    }
    // min Σ d (λ⁺ + λ⁻)  s.t.  Σ (λ⁺ − λ⁻)(δ_x − δ_y) = m
    let pairs: Vec<(usize, usize)> = space.pairs().collect();
    let mut cost = Vec::with_capacity(2 * pairs.len());
    let mut columns = Vec::with_capacity(2 * pairs.len());
    for &(x, y) in &pairs {
        let e = linalg::sub(&delta(space, x), &delta(space, y));
        cost.push(space.d(x, y).clone());
        cost.push(space.d(x, y).clone());
        columns.push(linalg::neg(&e));
        columns.push(e);
    }
    let mut lp = LinearProgram::minimize(cost);
    for k in 0..n {
        lp.constrain(columns.iter().map(|c| c[k].clone()).collect(), Relation::Eq, m[k].clone());
    }
    let sol = solve_optimal(&lp, "free norm")?;
    Ok((sol.value, sol.duals))
}

/// `‖m‖ = inf Σ |λ_i| d(x_i, y_i)` over molecule decompositions of `m`.
pub fn free_norm(m: &[Rational], space: &FiniteMetricSpace) -> Result<Rational> {
    free_norm_with_witness(m, space).map(|(v, _)| v)
}

/// All normalized molecules `(δ_x − δ_y)/d(x,y)` over ordered pairs `x != y`.
pub fn free_ball_molecules(space: &FiniteMetricSpace) -> Vec<FreeVector> {
    let n = space.len();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1));
    for x in 0..n {
        for y in 0..n {
            if x != y {
                let e = linalg::sub(&delta(space, x), &delta(space, y));
                out.push(linalg::scale(&e, &space.d(x, y).recip()));
            }
        }
    }
    out
}

impl PolyhedralNorm {
    /// `F(X)` as a polyhedral space: dual ball `B_{X#}`, primal generators the molecules.
    pub fn free_space(space: &FiniteMetricSpace, caps: &Caps) -> Result<Self> {
        if space.free_dim() == 0 {
            return Err(Error::InvalidNorm("free space of a one-point space is trivial".into()));
        }
        let dual = lipschitz_ball_vertices(space, caps)?;
        Ok(PolyhedralNorm::from_parts(space.free_dim(), dual, free_ball_molecules(space)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::spaces::default_labels;

    fn v(xs: &[i64]) -> Vector {
        xs.iter().map(|&x| int(x)).collect()
    }

    fn space(rows: &[&[i64]]) -> FiniteMetricSpace {
        let d = rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        FiniteMetricSpace::new(default_labels(rows.len()), d).unwrap()
    }

    fn x3() -> FiniteMetricSpace {
        space(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]])
    }

    fn x3_prime() -> FiniteMetricSpace {
        space(&[&[0, 1, 1], &[1, 0, 2], &[1, 2, 0]])
    }

    #[test]
    fn ball_vertices() {
        let caps = Caps::default();
        let mut got = lipschitz_ball_vertices(&x3(), &caps).unwrap();
        got.sort();
        assert_eq!(got, vec![v(&[-1, -2]), v(&[-1, 0]), v(&[1, 0]), v(&[1, 2])]);
        let two = space(&[&[0, 1], &[1, 0]]);
        assert_eq!(lipschitz_ball_vertices(&two, &caps).unwrap(), vec![v(&[-1]), v(&[1])]);
        assert_eq!(
            lipschitz_ball_vertices(&x3_prime(), &caps).unwrap(),
            vec![v(&[-1, -1]), v(&[-1, 1]), v(&[1, -1]), v(&[1, 1])]
        );
    }

    #[test]
    fn point_cap() {
        let caps = Caps { points: 2, ..Caps::default() };
        assert!(matches!(lipschitz_ball_vertices(&x3(), &caps), Err(Error::CapExceeded { cap: Cap::Points, .. })));
    }

    #[test]
    fn free_norm_examples() {
        let x3 = x3();
        assert_eq!(free_norm(&v(&[1, 0]), &x3).unwrap(), int(1));
        assert_eq!(free_norm(&v(&[-1, 1]), &x3).unwrap(), int(1));
        assert_eq!(free_norm(&v(&[1, 1]), &x3).unwrap(), int(3));
        let (val, f) = free_norm_with_witness(&v(&[1, 1]), &x3).unwrap();
        assert!(in_lipschitz_ball(&x3, &f));
        assert_eq!(linalg::dot(&f, &v(&[1, 1])), val);
    }

    #[test]
    fn molecules() {
        let x3 = x3();
        let ms = free_ball_molecules(&x3);
        assert_eq!(ms.len(), 6);
        let norms: Vec<Rational> = ms.iter().map(|m| free_norm(m, &x3).unwrap()).collect();
        assert!(norms.iter().all(|n| *n <= int(1)));
        assert!(norms.contains(&int(1)));
        let two = space(&[&[0, 1], &[1, 0]]);
        assert_eq!(free_ball_molecules(&two), vec![v(&[-1]), v(&[1])]);
    }

    #[test]
    fn free_space_norm_agrees_with_lp() {
        let x3 = x3();
        let fs = PolyhedralNorm::free_space(&x3, &Caps::default()).unwrap();
        for m in [v(&[1, 1]), v(&[3, -2]), v(&[0, 5])] {
            assert_eq!(fs.eval(&m), free_norm(&m, &x3).unwrap());
        }
    }
}
