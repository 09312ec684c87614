//! Lipschitz `p`-summing norms: `π_p^L(R)` as a measure program over `ext B_{X#}`.

use num::{Signed, Zero};

use super::{check_exponent, half_set, root_of, DominationCertificate, Measure};
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::linalg;
use crate::lp::{solve_optimal, LinearProgram, Relation};
use crate::operators::LipschitzMap;
use crate::rational::{pow_bounds, Bounds, Rational};
use crate::spaces::{lipschitz_ball_vertices, value_at, FiniteMetricSpace, Norm};

#[derive(Clone, Debug)]
pub struct PSumming {
    pub value: Bounds,
    pub certificate: DominationCertificate,
}

impl PSumming {
    pub fn is_exact(&self) -> bool {
        self.value.is_exact()
    }
}

/// `π_p^L` of any map out of `X` whose target distances are known (or
/// enclosed): `targets[k]` encloses `d(R x, R y)` for the `k`-th pair of
/// [`FiniteMetricSpace::pairs`].
///
/// Solves `min Σ ν_f` subject to `Σ ν_f |f(x) − f(y)|^p >= d(Rx, Ry)^p`.
/// When a power is irrational two programs are solved with the coefficients
/// rounded outward in opposite directions, so the pair of optimal masses
/// brackets the true one.
pub fn pietsch_lipschitz(space: &FiniteMetricSpace, targets: &[Bounds], p: &Rational, caps: &Caps) -> Result<PSumming> {
    check_exponent(p)?;
    let pairs: Vec<(usize, usize)> = space.pairs().collect();
    if targets.len() != pairs.len() {
        return Err(Error::DimensionMismatch { expected: pairs.len(), found: targets.len() });
    }
    let empty = DominationCertificate::LipschitzP {
        exponent: p.clone(),
        measure: Measure { support: Vec::new(), weights: Vec::new() },
        constant: Rational::zero(),
    };
    if targets.iter().all(|t| t.upper.is_zero()) {
        return Ok(PSumming { value: Bounds::exact(Rational::zero()), certificate: empty });
    }
    let verts = half_set(&lipschitz_ball_vertices(space, caps)?);
    let coeff: Vec<Vec<Bounds>> = verts
        .iter()
        .map(|f| pairs.iter().map(|&(x, y)| pow_bounds(&(value_at(f, x) - value_at(f, y)), p)).collect())
        .collect();
    let powered: Vec<Bounds> =
        targets.iter().map(|t| Bounds::new(pow_bounds(&t.lower, p).lower, pow_bounds(&t.upper, p).upper)).collect();
    let exact = powered.iter().all(Bounds::is_exact) && coeff.iter().flatten().all(Bounds::is_exact);

    let solve = |pessimistic: bool| -> Result<(Rational, Vec<Rational>)> {
        let mut lp = LinearProgram::minimize(vec![Rational::from_integer(1.into()); verts.len()]);
        for (k, t) in powered.iter().enumerate() {
            let rhs = if pessimistic { &t.upper } else { &t.lower };
            if !rhs.is_positive() {
                continue;
            }
            let row = coeff.iter().map(|c| if pessimistic { c[k].lower.clone() } else { c[k].upper.clone() }).collect();
            lp.constrain(row, Relation::Ge, rhs.clone());
        }
        let sol = solve_optimal(&lp, "Lipschitz summing program")?;
        Ok((sol.value, sol.primal))
    };
    let (mass_up, nu) = solve(true)?;
    let mass_low = if exact { mass_up.clone() } else { solve(false)?.0 };
    let upper = root_of(&Bounds::exact(mass_up), p).upper;
    let lower = root_of(&Bounds::exact(mass_low), p).lower;
    let certificate = DominationCertificate::LipschitzP {
        exponent: p.clone(),
        measure: Measure::normalized(&verts, &nu),
        constant: upper.clone(),
    };
    Ok(PSumming { value: Bounds::new(lower, upper), certificate })
}

/// Pair distances `‖R(x) − R(y)‖` in the order of [`FiniteMetricSpace::pairs`].
pub(crate) fn map_distances<N: Norm>(r: &LipschitzMap<N>) -> Result<Vec<Bounds>> {
    r.space.pairs().map(|(x, y)| Ok(Bounds::exact(r.codomain.norm(&linalg::sub(&r.value(x), &r.value(y)))?))).collect()
}

/// `π_p^L(R)` for a map into a normed space.
pub fn lipschitz_p_summing<N: Norm>(r: &LipschitzMap<N>, p: &Rational, caps: &Caps) -> Result<PSumming> {
    pietsch_lipschitz(&r.space, &map_distances(r)?, p, caps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::spaces::PolyhedralNorm;

    fn line3() -> FiniteMetricSpace {
        FiniteMetricSpace::line(&[int(0), int(1), int(2)]).unwrap()
    }

    #[test]
    fn line_isometry_is_one_with_point_mass() {
        let r = LipschitzMap::new(line3(), PolyhedralNorm::scalar(), vec![vec![int(1)], vec![int(2)]]).unwrap();
        let res = lipschitz_p_summing(&r, &int(1), &Caps::default()).unwrap();
        assert_eq!(res.value, Bounds::exact(int(1)));
        let DominationCertificate::LipschitzP { measure, constant, .. } = &res.certificate else { panic!() };
        assert_eq!(constant, &int(1));
        assert_eq!(measure.support, vec![vec![int(1), int(2)]]);
        assert_eq!(measure.weights, vec![int(1)]);
    }

    #[test]
    fn zero_map() {
        let r = LipschitzMap::new(line3(), PolyhedralNorm::scalar(), vec![vec![int(0)], vec![int(0)]]).unwrap();
        assert_eq!(lipschitz_p_summing(&r, &int(2), &Caps::default()).unwrap().value, Bounds::exact(int(0)));
    }

    #[test]
    fn two_point_space_any_exponent() {
        let two = FiniteMetricSpace::line(&[int(0), int(2)]).unwrap();
        let l1 = PolyhedralNorm::l1(2).unwrap();
        let r = LipschitzMap::new(two, l1, vec![vec![int(3), int(-4)]]).unwrap();
        for p in [int(1), int(2), ratio(3, 2)] {
            let res = lipschitz_p_summing(&r, &p, &Caps::default()).unwrap();
            assert!(res.value.lower <= ratio(7, 2) && ratio(7, 2) <= res.value.upper, "p = {p}");
            assert!(res.value.relative_width() < ratio(1, 1_000_000_000));
        }
    }

    #[test]
    fn exponent_below_one_is_rejected() {
        let r = LipschitzMap::new(line3(), PolyhedralNorm::scalar(), vec![vec![int(1)], vec![int(2)]]).unwrap();
        assert!(matches!(lipschitz_p_summing(&r, &ratio(1, 2), &Caps::default()), Err(Error::InvalidExponent(_))));
    }
}
