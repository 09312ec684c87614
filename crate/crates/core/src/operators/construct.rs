//! Operators built from other data: `T_R`, elementary operators, compositions,
//! `δ_X ⊠ v`, and the passage between two-Lipschitz and Lip-Linear maps.

use num::Zero;

use super::{LinearMap, LipLinearOperator, LipschitzMap, PointMap, ProjectiveNorm};
use crate::config::Caps;
use crate::error::{Cap, Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::rational::Rational;
use crate::spaces::{default_labels, delta, FiniteMetricSpace, Norm, PolyhedralNorm};

/// `T: X × Y → F` with `T(0, y) = T(x, 0) = 0`, stored over all point pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoLipschitzTable {
    pub x_space: FiniteMetricSpace,
    pub y_space: FiniteMetricSpace,
    pub codomain: PolyhedralNorm,
    values: Vec<Vec<Vector>>,
}

impl TwoLipschitzTable {
    pub fn new(
        x_space: FiniteMetricSpace,
        y_space: FiniteMetricSpace,
        codomain: PolyhedralNorm,
        values: Vec<Vec<Vector>>,
    ) -> Result<Self> {
        if values.len() != x_space.len() {
            return Err(Error::DimensionMismatch { expected: x_space.len(), found: values.len() });
        }
        for row in &values {
            if row.len() != y_space.len() {
                return Err(Error::DimensionMismatch { expected: y_space.len(), found: row.len() });
            }
            if let Some(bad) = row.iter().find(|v| v.len() != codomain.dim()) {
                return Err(Error::DimensionMismatch { expected: codomain.dim(), found: bad.len() });
            }
        }
        let base_row = values[0].iter().any(|v| !linalg::is_zero(v));
        let base_col = values.iter().any(|row| !linalg::is_zero(&row[0]));
        if base_row || base_col {
            return Err(Error::InvalidOperator(
                "a two-Lipschitz table must vanish when either point is the base point".into(),
            ));
        }
        Ok(TwoLipschitzTable { x_space, y_space, codomain, values })
    }

    pub fn value(&self, x: usize, y: usize) -> &Vector {
        &self.values[x][y]
    }

    pub fn values(&self) -> &[Vec<Vector>] {
        &self.values
    }
}

/// `T_R(x, e*) = e*(R(x))` on `X × E*`.
pub fn associate_tr(r: &LipschitzMap) -> LipLinearOperator {
    let table = r.values().iter().map(|v| Matrix::from_rows(vec![v.clone()]).expect("one row")).collect();
    LipLinearOperator::new(r.space.clone(), r.codomain.dual(), PolyhedralNorm::scalar(), table).expect("shapes match")
}

/// `T(x, e) = f(x) e*(e) z`.
pub fn elementary_operator(
    space: &FiniteMetricSpace,
    domain: &PolyhedralNorm,
    codomain: &PolyhedralNorm,
    f: &[Rational],
    e_star: &[Rational],
    z: &[Rational],
) -> Result<LipLinearOperator> {
    if f.len() != space.free_dim() {
        return Err(Error::DimensionMismatch { expected: space.free_dim(), found: f.len() });
    }
    domain.check_dim(e_star)?;
    codomain.check_dim(z)?;
    let rank_one = Matrix::outer(z, e_star);
    let table = f.iter().map(|fx| rank_one.scale(fx)).collect();
    LipLinearOperator::new(space.clone(), domain.clone(), codomain.clone(), table)
}

/// `w ∘ T ∘ (R, v)`: `(x, e) ↦ w(T(R(x), v(e)))`.
pub fn compose(w: &LinearMap, t: &LipLinearOperator, r: &PointMap, v: &LinearMap) -> Result<LipLinearOperator> {
    if r.codomain != t.space {
        return Err(Error::InvalidOperator("the point map does not land in the operator's metric space".into()));
    }
    if v.codomain.dim() != t.domain.dim() {
        return Err(Error::DimensionMismatch { expected: t.domain.dim(), found: v.codomain.dim() });
    }
    if w.domain.dim() != t.codomain.dim() {
        return Err(Error::DimensionMismatch { expected: t.codomain.dim(), found: w.domain.dim() });
    }
    let table = (1..r.domain.len()).map(|x| w.matrix.mul(&t.at(r.apply(x))).mul(&v.matrix)).collect();
    LipLinearOperator::new(r.domain.clone(), v.domain.clone(), w.codomain.clone(), table)
}

/// `δ_X ⊠ v: (x, e) ↦ δ_x ⊗ v(e)` with values in `F(X) ⊗_π F`.
pub fn delta_box(v: &LinearMap, space: &FiniteMetricSpace, caps: &Caps) -> Result<LipLinearOperator<ProjectiveNorm>> {
    caps.check(Cap::Points, space.len())?;
    let n = space.free_dim();
    let (kf, ke) = (v.codomain.dim(), v.domain.dim());
    let table = (0..n)
        .map(|x| {
            Matrix::from_fn(
                n * kf,
                ke,
                |i, j| if i / kf == x { v.matrix.get(i % kf, j).clone() } else { Rational::zero() },
            )
        })
        .collect();
    let codomain = ProjectiveNorm { space: space.clone(), factor: v.codomain.clone() };
    LipLinearOperator::new(space.clone(), v.domain.clone(), codomain, table)
}

/// The Lip-Linear operator on `X × F(Y)` with `A(x) δ_y = T(x, y)`.
pub fn from_two_lipschitz(t: &TwoLipschitzTable, caps: &Caps) -> Result<LipLinearOperator> {
    caps.check(Cap::Points, t.x_space.len())?;
    let domain = PolyhedralNorm::free_space(&t.y_space, caps)?;
    let ny = t.y_space.free_dim();
    let table = (1..t.x_space.len())
        .map(|x| Matrix::from_fn(t.codomain.dim(), ny, |i, y| t.value(x, y + 1)[i].clone()))
        .collect();
    LipLinearOperator::new(t.x_space.clone(), domain, t.codomain.clone(), table)
}

/// `S ∘ (id_X, δ_Y)`: the table `(x, y) ↦ A(x) δ_y`.
pub fn restrict_two_lipschitz(op: &LipLinearOperator, y_space: &FiniteMetricSpace) -> Result<TwoLipschitzTable> {
    if op.domain.dim() != y_space.free_dim() {
        return Err(Error::DimensionMismatch { expected: y_space.free_dim(), found: op.domain.dim() });
    }
    let values =
        (0..op.space.len()).map(|x| (0..y_space.len()).map(|y| op.apply(x, &delta(y_space, y))).collect()).collect();
    TwoLipschitzTable::new(op.space.clone(), y_space.clone(), op.codomain.clone(), values)
}

/// Samples `T` on finitely many points of `E` (first point zero, all distinct),
/// metrized by the norm of `E`, as a two-Lipschitz table.
pub fn sample_two_lipschitz(t: &LipLinearOperator, points: &[Vector]) -> Result<TwoLipschitzTable> {
    let y_space = metric_from_points(&t.domain, points)?;
    let values = (0..t.space.len()).map(|x| points.iter().map(|e| t.apply(x, e)).collect()).collect();
    TwoLipschitzTable::new(t.space.clone(), y_space, t.codomain.clone(), values)
}

/// Finite subset of a normed space as a pointed metric space; `points[0]` must be 0.
pub(crate) fn metric_from_points(norm: &PolyhedralNorm, points: &[Vector]) -> Result<FiniteMetricSpace> {
    if points.is_empty() || !linalg::is_zero(&points[0]) {
        return Err(Error::InvalidOperator("the first sample point must be the origin".into()));
    }
    for p in points {
        norm.check_dim(p)?;
    }
    let dist = points.iter().map(|p| points.iter().map(|q| norm.eval(&linalg::sub(p, q))).collect()).collect();
    FiniteMetricSpace::new(default_labels(points.len()), dist)
}

/// `‖B‖ = max ‖B(g, v)‖` over vertices `g ∈ B_G`, `v ∈ B_E`, for the bilinear
/// map `B(g, e) = Σ_i g_i S_i e`.
pub fn bilinear_sup_norm(
    slices: &[Matrix],
    g_norm: &PolyhedralNorm,
    e_norm: &PolyhedralNorm,
    f_norm: &PolyhedralNorm,
) -> Result<Rational> {
    if slices.len() != g_norm.dim() {
        return Err(Error::DimensionMismatch { expected: g_norm.dim(), found: slices.len() });
    }
    let mut best = Rational::zero();
    for g in g_norm.primal_vertices() {
        let m = combine(slices, g, f_norm.dim(), e_norm.dim());
        for v in e_norm.primal_vertices() {
            let val = f_norm.norm(&m.mul_vec(v))?;
            if val > best {
                best = val;
            }
        }
    }
    Ok(best)
}

fn combine(slices: &[Matrix], g: &[Rational], rows: usize, cols: usize) -> Matrix {
    slices.iter().zip(g).fold(Matrix::zeros(rows, cols), |acc, (s, gi)| acc.add(&s.scale(gi)))
}

/// Restriction of a bilinear map `G × E → F` to a finite subset `X ⊂ G`
/// (first point the origin), a Lip-Linear operator on `X × E`.
pub fn restrict_bilinear(
    slices: &[Matrix],
    g_norm: &PolyhedralNorm,
    e_norm: &PolyhedralNorm,
    f_norm: &PolyhedralNorm,
    points: &[Vector],
) -> Result<LipLinearOperator> {
    if slices.len() != g_norm.dim() {
        return Err(Error::DimensionMismatch { expected: g_norm.dim(), found: slices.len() });
    }
    let space = metric_from_points(g_norm, points)?;
    let table = points[1..].iter().map(|g| combine(slices, g, f_norm.dim(), e_norm.dim())).collect();
    LipLinearOperator::new(space, e_norm.clone(), f_norm.clone(), table)
}

/// `f` read as a Lipschitz map into the scalars.
#[cfg(test)]
pub(crate) fn scalar_map(space: &FiniteMetricSpace, f: &[Rational]) -> LipschitzMap {
    let values = (1..space.len()).map(|x| vec![crate::spaces::value_at(f, x)]).collect();
    LipschitzMap::new(space.clone(), PolyhedralNorm::scalar(), values).expect("one coordinate")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{blip_norm, lip_norm, lipl_norm};
    use crate::rational::int;

    fn v(xs: &[i64]) -> Vector {
        xs.iter().map(|&x| int(x)).collect()
    }

    fn line3() -> FiniteMetricSpace {
        FiniteMetricSpace::line(&[int(0), int(1), int(2)]).unwrap()
    }

    #[test]
    fn associated_operator_of_line_isometry() {
        let x3 = line3();
        let r = LipschitzMap::new(x3.clone(), PolyhedralNorm::scalar(), vec![v(&[1]), v(&[2])]).unwrap();
        assert_eq!(lipl_norm(&associate_tr(&r)).unwrap(), int(1));
        let z = LipschitzMap::new(x3, PolyhedralNorm::scalar(), vec![v(&[0]), v(&[0])]).unwrap();
        assert!(associate_tr(&z).is_zero());
    }

    #[test]
    fn elementary_norms() {
        let x3 = line3();
        let l1 = PolyhedralNorm::l1(2).unwrap();
        let linf = PolyhedralNorm::linf(2).unwrap();
        let t = elementary_operator(&x3, &l1, &linf, &v(&[1, 2]), &v(&[1, -1]), &v(&[1, 0])).unwrap();
        assert_eq!(lipl_norm(&t).unwrap(), int(1));
        let t3 = elementary_operator(&x3, &l1, &linf, &v(&[1, 2]), &v(&[1, -1]), &v(&[3, 0])).unwrap();
        assert_eq!(lipl_norm(&t3).unwrap(), int(3));
        let t0 = elementary_operator(&x3, &l1, &linf, &v(&[1, 2]), &v(&[1, -1]), &v(&[0, 0])).unwrap();
        assert!(t0.is_zero());
    }

    #[test]
    fn composition_with_identities() {
        let x3 = line3();
        let l1 = PolyhedralNorm::l1(2).unwrap();
        let a = Matrix::from_rows(vec![v(&[1, 2]), v(&[0, 1])]).unwrap();
        let t = LipLinearOperator::new(x3.clone(), l1.clone(), l1.clone(), vec![a.clone(), a.scale(&int(-1))]).unwrap();
        let id = LinearMap::identity(&l1);
        let c = compose(&id, &t, &PointMap::identity(&x3), &id).unwrap();
        assert_eq!(c.table(), t.table());
        let zero = LinearMap::new(l1.clone(), l1.clone(), Matrix::zeros(2, 2)).unwrap();
        assert!(compose(&zero, &t, &PointMap::identity(&x3), &id).unwrap().is_zero());
    }

    #[test]
    fn delta_box_norm() {
        let x3 = line3();
        let id = LinearMap::identity(&PolyhedralNorm::scalar());
        let d = delta_box(&id, &x3, &Caps::default()).unwrap();
        assert_eq!(lipl_norm(&d).unwrap(), int(1));
    }

    #[test]
    fn two_lipschitz_round_trip() {
        let x3 = line3();
        let pos = [0, 1, 2];
        let values = pos.iter().map(|&a| pos.iter().map(|&b| v(&[a * b])).collect()).collect();
        let t = TwoLipschitzTable::new(x3.clone(), x3.clone(), PolyhedralNorm::scalar(), values).unwrap();
        assert_eq!(blip_norm(&t), int(1));
        let op = from_two_lipschitz(&t, &Caps::default()).unwrap();
        assert_eq!(lipl_norm(&op).unwrap(), int(1));
        assert_eq!(restrict_two_lipschitz(&op, &x3).unwrap(), t);
    }

    #[test]
    fn scalar_map_lip() {
        let x3 = line3();
        assert_eq!(lip_norm(&scalar_map(&x3, &v(&[1, 2]))).unwrap(), int(1));
    }
}
