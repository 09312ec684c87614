use num::Zero;

use super::{LipLinearOperator, LipschitzMap, TwoLipschitzTable};
use crate::error::Result;
use crate::linalg::{self, Matrix};
use crate::lp::{solve_optimal, LinearProgram, Relation};
use crate::rational::{self, Rational};
use crate::spaces::{Norm, PolyhedralNorm};

/// `‖M‖_{E→F}`; the max of a convex function over `B_E` sits at a vertex.
pub fn op_norm<N: Norm>(m: &Matrix, domain: &PolyhedralNorm, codomain: &N) -> Result<Rational> {
    let mut best = Rational::zero();
    for v in domain.primal_vertices() {
        let val = codomain.norm(&m.mul_vec(v))?;
        if val > best {
            best = val;
        }
    }
    Ok(best)
}

/// `‖M‖_{E→F} = max_{w ∈ W_F} max {(Mᵀw)·e : W_E e <= 1}`, solved as LPs over
/// the inequality description of `B_E`; no primal vertices involved.
pub fn op_norm_lp(m: &Matrix, domain: &PolyhedralNorm, codomain: &PolyhedralNorm) -> Result<Rational> {
    if m.is_zero() {
        return Ok(Rational::zero());
    }
    let mut best = Rational::zero();
    for w in codomain.dual_vertices() {
        let y = m.transpose_mul_vec(w);
        if linalg::is_zero(&y) {
            continue;
        }
        let mut lp = LinearProgram::maximize(y).all_free();
        for g in domain.dual_vertices() {
            lp.constrain(g.clone(), Relation::Le, rational::one());
        }
        let val = solve_optimal(&lp, "operator norm")?.value;
        if val > best {
            best = val;
        }
    }
    Ok(best)
}

/// `Lip(R) = max_{x≠y} ‖R(x) − R(y)‖ / d(x,y)`.
pub fn lip_norm<N: Norm>(r: &LipschitzMap<N>) -> Result<Rational> {
    let mut best = Rational::zero();
    for (x, y) in r.space.pairs() {
        let diff = linalg::sub(&r.value(x), &r.value(y));
        let val = r.codomain.norm(&diff)? / r.space.d(x, y);
        if val > best {
            best = val;
        }
    }
    Ok(best)
}

/// `LipL(T) = max_{x≠y} ‖A(x) − A(y)‖ / d(x,y)`, operator norms over the vertices of `B_E`.
pub fn lipl_norm<N: Norm>(t: &LipLinearOperator<N>) -> Result<Rational> {
    let mut best = Rational::zero();
    for (x, y) in t.space.pairs() {
        let diff = t.at(x).sub(&t.at(y));
        let val = op_norm(&diff, &t.domain, &t.codomain)? / t.space.d(x, y);
        if val > best {
            best = val;
        }
    }
    Ok(best)
}

/// `Lip(A_T)` with the operator-norm metric evaluated by [`op_norm_lp`].
pub fn lip_of_table(t: &LipLinearOperator) -> Result<Rational> {
    let mut best = Rational::zero();
    for (x, y) in t.space.pairs() {
        let diff = t.at(x).sub(&t.at(y));
        let val = op_norm_lp(&diff, &t.domain, &t.codomain)? / t.space.d(x, y);
        if val > best {
            best = val;
        }
    }
    Ok(best)
}

/// `‖B_T‖ = max_{e ∈ ext B_E} Lip(x ↦ T(x, e))`.
pub fn bt_norm<N: Norm>(t: &LipLinearOperator<N>) -> Result<Rational> {
    let mut best = Rational::zero();
    for v in t.domain.primal_vertices() {
        let val = lip_norm(&t.column_map(v))?;
        if val > best {
            best = val;
        }
    }
    Ok(best)
}

/// `Blip(T)`: the largest mixed second difference over `d(x,x')·d(y,y')`.
pub fn blip_norm(t: &TwoLipschitzTable) -> Rational {
    let mut best = Rational::zero();
    for (x, x2) in t.x_space.pairs() {
        for (y, y2) in t.y_space.pairs() {
            let mixed =
                linalg::add(&linalg::sub(t.value(x, y), t.value(x, y2)), &linalg::sub(t.value(x2, y2), t.value(x2, y)));
            let val = t.codomain.eval(&mixed) / (t.x_space.d(x, x2) * t.y_space.d(y, y2));
            if val > best {
                best = val;
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::LinearMap;
    use crate::rational::int;
    use crate::spaces::{default_labels, FiniteMetricSpace};

    fn line3() -> FiniteMetricSpace {
        FiniteMetricSpace::line(&[int(0), int(1), int(2)]).unwrap()
    }

    fn x3_prime() -> FiniteMetricSpace {
        let d = [[0, 1, 1], [1, 0, 2], [1, 2, 0]].iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        FiniteMetricSpace::new(default_labels(3), d).unwrap()
    }

    #[test]
    fn lip_norm_examples() {
        let r = LipschitzMap::new(line3(), PolyhedralNorm::scalar(), vec![vec![int(1)], vec![int(2)]]).unwrap();
        assert_eq!(lip_norm(&r).unwrap(), int(1));
        let z = LipschitzMap::new(line3(), PolyhedralNorm::scalar(), vec![vec![int(0)], vec![int(0)]]).unwrap();
        assert_eq!(lip_norm(&z).unwrap(), int(0));
        let r = LipschitzMap::new(x3_prime(), PolyhedralNorm::scalar(), vec![vec![int(1)], vec![int(-1)]]).unwrap();
        assert_eq!(lip_norm(&r).unwrap(), int(1));
    }

    #[test]
    fn operator_norm_routes_agree() {
        let l1 = PolyhedralNorm::l1(2).unwrap();
        let linf = PolyhedralNorm::linf(2).unwrap();
        let m = Matrix::from_rows(vec![vec![int(1), int(-2)], vec![int(3), int(1)]]).unwrap();
        // ℓ1 → ℓ∞: largest entry in absolute value.
        assert_eq!(op_norm(&m, &l1, &linf).unwrap(), int(3));
        assert_eq!(op_norm_lp(&m, &l1, &linf).unwrap(), int(3));
        // ℓ∞ → ℓ1: max over sign vectors of ‖Ms‖_1 = |1+2|+|3-1| = 5.
        assert_eq!(op_norm(&m, &linf, &l1).unwrap(), int(5));
        assert_eq!(op_norm_lp(&m, &linf, &l1).unwrap(), int(5));
        assert_eq!(LinearMap::identity(&l1).norm(), int(1));
    }
}
