//! Elements of `F(X) ⊗ E` and the projective and injective norms on them.

use num::{Signed, Zero};

use super::LipLinearOperator;
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::linalg::{self, Vector};
use crate::lp::{solve_optimal, LinearProgram, Relation};
use crate::rational::Rational;
use crate::spaces::{free_ball_molecules, lipschitz_ball_vertices, FiniteMetricSpace, Norm, PolyhedralNorm};

/// `u = Σ_x δ_x ⊗ u_x` over the non-base points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeTensor {
    coeffs: Vec<Vector>,
    dim: usize,
}

impl FreeTensor {
    pub fn new(coeffs: Vec<Vector>, dim: usize) -> Result<Self> {
        if let Some(bad) = coeffs.iter().find(|c| c.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.len() });
        }
        Ok(FreeTensor { coeffs, dim })
    }

    pub fn zeros(points: usize, dim: usize) -> Self {
        FreeTensor { coeffs: vec![linalg::zeros(dim); points], dim }
    }

    /// `δ_x ⊗ e`; zero when `x` is the base point.
    pub fn elementary(space: &FiniteMetricSpace, x: usize, e: &[Rational]) -> Self {
        let mut t = FreeTensor::zeros(space.free_dim(), e.len());
        if x != 0 {
            t.coeffs[x - 1] = e.to_vec();
        }
        t
    }

    /// `δ_{(x,y)} ⊠ e = δ_x ⊗ e − δ_y ⊗ e`.
    pub fn pair(space: &FiniteMetricSpace, x: usize, y: usize, e: &[Rational]) -> Self {
        FreeTensor::elementary(space, x, e).sub(&FreeTensor::elementary(space, y, e))
    }

    /// `m ⊗ v` for a free vector `m`.
    pub fn product(m: &[Rational], v: &[Rational]) -> Self {
        FreeTensor { coeffs: m.iter().map(|c| linalg::scale(v, c)).collect(), dim: v.len() }
    }

    pub fn from_flat(points: usize, dim: usize, flat: &[Rational]) -> Result<Self> {
        if flat.len() != points * dim {
            return Err(Error::DimensionMismatch { expected: points * dim, found: flat.len() });
        }
        let coeffs = if dim == 0 { vec![Vec::new(); points] } else { flat.chunks(dim).map(<[_]>::to_vec).collect() };
        Ok(FreeTensor { coeffs, dim })
    }

    pub fn flat(&self) -> Vector {
        self.coeffs.iter().flatten().cloned().collect()
    }

    pub fn points(&self) -> usize {
        self.coeffs.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `u_x`, zero at the base point.
    pub fn at(&self, x: usize) -> Vector {
        if x == 0 {
            linalg::zeros(self.dim)
        } else {
            self.coeffs[x - 1].clone()
        }
    }

    pub fn coeffs(&self) -> &[Vector] {
        &self.coeffs
    }

    pub fn add(&self, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| linalg::add(a, b)).collect();
        FreeTensor { coeffs, dim: self.dim }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| linalg::sub(a, b)).collect();
        FreeTensor { coeffs, dim: self.dim }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        FreeTensor { coeffs: self.coeffs.iter().map(|c| linalg::scale(c, s)).collect(), dim: self.dim }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| linalg::is_zero(c))
    }

    fn check(&self, space: &FiniteMetricSpace, factor: &PolyhedralNorm) -> Result<()> {
        if self.points() != space.free_dim() {
            return Err(Error::DimensionMismatch { expected: space.free_dim(), found: self.points() });
        }
        if self.dim != factor.dim() {
            return Err(Error::DimensionMismatch { expected: factor.dim(), found: self.dim });
        }
        Ok(())
    }
}

/// `π(u)` together with a maximizing table `g: X → E*` of the dual program.
pub fn projective_norm_witness(
    u: &FreeTensor,
    space: &FiniteMetricSpace,
    factor: &PolyhedralNorm,
) -> Result<(Rational, Vec<Vector>)> {
    u.check(space, factor)?;
    let (n, k) = (u.points(), u.dim());
    if u.is_zero() {
        return Ok((Rational::zero(), vec![linalg::zeros(k); n]));
    }
    // max Σ ⟨u_x, g(x)⟩  s.t.  (g(x) − g(y))·v <= d(x,y) for all pairs and vertices v of B_E.
    let mut lp = LinearProgram::maximize(u.flat()).all_free();
    for (x, y) in space.pairs() {
        for v in factor.primal_vertices() {
            let mut row = linalg::zeros(n * k);
            for (j, vj) in v.iter().enumerate() {
                if x != 0 {
                    row[(x - 1) * k + j] += vj;
                }
                if y != 0 {
                    row[(y - 1) * k + j] -= vj;
                }
            }
            lp.constrain(row, Relation::Le, space.d(x, y).clone());
        }
    }
    let sol = solve_optimal(&lp, "projective norm")?;
    let g = FreeTensor::from_flat(n, k, &sol.primal)?.coeffs;
    Ok((sol.value, g))
}

/// Projective norm on `F(X) ⊗ E`, through its dual program over the `LipL` unit ball.
pub fn projective_norm(u: &FreeTensor, space: &FiniteMetricSpace, factor: &PolyhedralNorm) -> Result<Rational> {
    projective_norm_witness(u, space, factor).map(|(v, _)| v)
}

/// Injective norm: `max |Σ_x f(x) w(u_x)|` over `f ∈ ext B_{X#}` and `w ∈ ext B_{E*}`,
/// exact because the form is bilinear in `(f, w)`.
pub fn injective_norm(
    u: &FreeTensor,
    space: &FiniteMetricSpace,
    factor: &PolyhedralNorm,
    caps: &Caps,
) -> Result<Rational> {
    u.check(space, factor)?;
    if u.is_zero() {
        return Ok(Rational::zero());
    }
    let fs = lipschitz_ball_vertices(space, caps)?;
    let mut best = Rational::zero();
    for w in factor.dual_vertices() {
        let wu: Vector = u.coeffs.iter().map(|c| linalg::dot(w, c)).collect();
        for f in &fs {
            let val = linalg::dot(f, &wu).abs();
            if val > best {
                best = val;
            }
        }
    }
    Ok(best)
}

/// `T̂(u) = Σ_x A(x) u_x`.
pub fn linearize_apply<N: Norm>(t: &LipLinearOperator<N>, u: &FreeTensor) -> Result<Vector> {
    if u.points() != t.space.free_dim() {
        return Err(Error::DimensionMismatch { expected: t.space.free_dim(), found: u.points() });
    }
    if u.dim() != t.domain.dim() {
        return Err(Error::DimensionMismatch { expected: t.domain.dim(), found: u.dim() });
    }
    let mut out = linalg::zeros(t.codomain.dim());
    for (a, ux) in t.table().iter().zip(u.coeffs()) {
        out = linalg::add(&out, &a.mul_vec(ux));
    }
    Ok(out)
}

/// `‖T̂‖`, maximized over elementary tensors `m ⊗ v` of molecules and vertices of `B_E`.
pub fn linearization_norm<N: Norm>(t: &LipLinearOperator<N>) -> Result<Rational> {
    let mut best = Rational::zero();
    for m in free_ball_molecules(&t.space) {
        for v in t.domain.primal_vertices() {
            let val = t.codomain.norm(&linearize_apply(t, &FreeTensor::product(&m, v))?)?;
            if val > best {
                best = val;
            }
        }
    }
    Ok(best)
}

/// `⟨u, T⟩ = T̂(u)` for a scalar-valued `T`.
pub fn pair<N: Norm>(u: &FreeTensor, t: &LipLinearOperator<N>) -> Result<Rational> {
    if !t.is_scalar() {
        return Err(Error::NonScalarCodomain(t.codomain.dim()));
    }
    Ok(linearize_apply(t, u)?.swap_remove(0))
}

/// `F(X) ⊗_π E` as a normed space on flat coordinates.
#[derive(Clone, Debug)]
pub struct ProjectiveNorm {
    pub space: FiniteMetricSpace,
    pub factor: PolyhedralNorm,
}

impl Norm for ProjectiveNorm {
    fn dim(&self) -> usize {
        self.space.free_dim() * self.factor.dim()
    }

    fn norm(&self, x: &[Rational]) -> Result<Rational> {
        let u = FreeTensor::from_flat(self.space.free_dim(), self.factor.dim(), x)?;
        projective_norm(&u, &self.space, &self.factor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::rational::int;

    fn v(xs: &[i64]) -> Vector {
        xs.iter().map(|&x| int(x)).collect()
    }

    fn line3() -> FiniteMetricSpace {
        FiniteMetricSpace::line(&[int(0), int(1), int(2)]).unwrap()
    }

    #[test]
    fn elementary_tensors() {
        let x3 = line3();
        let l1 = PolyhedralNorm::l1(2).unwrap();
        let e = v(&[2, -1]);
        let u = FreeTensor::elementary(&x3, 1, &e);
        assert_eq!(projective_norm(&u, &x3, &l1).unwrap(), int(3));
        assert_eq!(injective_norm(&u, &x3, &l1, &Caps::default()).unwrap(), int(3));
        let u = FreeTensor::elementary(&x3, 2, &e);
        assert_eq!(projective_norm(&u, &x3, &l1).unwrap(), int(6));
        let z = FreeTensor::zeros(2, 2);
        assert_eq!(projective_norm(&z, &x3, &l1).unwrap(), int(0));
        assert_eq!(injective_norm(&z, &x3, &l1, &Caps::default()).unwrap(), int(0));
    }

    #[test]
    fn linearization_on_pairs() {
        let x3 = line3();
        let l1 = PolyhedralNorm::l1(2).unwrap();
        let a = Matrix::from_rows(vec![v(&[1, 2]), v(&[0, 1])]).unwrap();
        let b = Matrix::from_rows(vec![v(&[-1, 0]), v(&[3, 1])]).unwrap();
        let t = LipLinearOperator::new(x3.clone(), l1.clone(), l1.clone(), vec![a.clone(), b.clone()]).unwrap();
        let e = v(&[1, 1]);
        assert_eq!(linearize_apply(&t, &FreeTensor::elementary(&x3, 1, &e)).unwrap(), t.apply(1, &e));
        let diff = linalg::sub(&t.apply(1, &e), &t.apply(2, &e));
        assert_eq!(linearize_apply(&t, &FreeTensor::pair(&x3, 1, 2, &e)).unwrap(), diff);
        assert_eq!(linearize_apply(&t, &FreeTensor::zeros(2, 2)).unwrap(), v(&[0, 0]));
    }

    #[test]
    fn pairing_requires_scalar_codomain() {
        let x3 = line3();
        let l1 = PolyhedralNorm::l1(2).unwrap();
        let t = LipLinearOperator::zero(x3.clone(), l1.clone(), l1.clone());
        assert!(matches!(pair(&FreeTensor::zeros(2, 2), &t), Err(Error::NonScalarCodomain(2))));
        let phi = Matrix::from_rows(vec![v(&[1, -1])]).unwrap();
        let s = LipLinearOperator::new(x3.clone(), l1, PolyhedralNorm::scalar(), vec![phi.clone(), phi]).unwrap();
        assert_eq!(pair(&FreeTensor::elementary(&x3, 1, &v(&[3, 1])), &s).unwrap(), int(2));
    }
}
