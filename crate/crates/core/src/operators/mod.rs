//! Lip-Linear, Lipschitz and two-Lipschitz operators and their norms.
//!
//! A Lip-Linear operator `T: X × E → F` is stored as its table
//! `x ↦ A(x) ∈ L(E, F)`; `A_T` is that table and `B_T(e)` is the column
//! `x ↦ A(x) e`, so all three objects are views of one value.

mod construct;
mod norms;
mod tensor;

use num::Zero;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::rational::Rational;
use crate::spaces::{FiniteMetricSpace, Norm, PolyhedralNorm};

pub use construct::{
    associate_tr, bilinear_sup_norm, compose, delta_box, elementary_operator, from_two_lipschitz, restrict_bilinear,
    restrict_two_lipschitz, sample_two_lipschitz, TwoLipschitzTable,
};
pub use norms::{blip_norm, bt_norm, lip_norm, lip_of_table, lipl_norm, op_norm, op_norm_lp};
pub use tensor::{
    injective_norm, linearization_norm, linearize_apply, pair, projective_norm, projective_norm_witness, FreeTensor,
    ProjectiveNorm,
};

/// A base-point-preserving map `R: X → E`, stored on the non-base points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LipschitzMap<N: Norm = PolyhedralNorm> {
    pub space: FiniteMetricSpace,
    pub codomain: N,
    values: Vec<Vector>,
}

impl<N: Norm> LipschitzMap<N> {
    pub fn new(space: FiniteMetricSpace, codomain: N, values: Vec<Vector>) -> Result<Self> {
        if values.len() != space.free_dim() {
            return Err(Error::DimensionMismatch { expected: space.free_dim(), found: values.len() });
        }
        if let Some(bad) = values.iter().find(|v| v.len() != codomain.dim()) {
            return Err(Error::DimensionMismatch { expected: codomain.dim(), found: bad.len() });
        }
        Ok(LipschitzMap { space, codomain, values })
    }

    /// `R(x)`, zero at the base point.
    pub fn value(&self, x: usize) -> Vector {
        if x == 0 {
            linalg::zeros(self.codomain.dim())
        } else {
            self.values[x - 1].clone()
        }
    }

    pub fn values(&self) -> &[Vector] {
        &self.values
    }
}

/// A base-point-preserving map between finite metric spaces, by point index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointMap {
    pub domain: FiniteMetricSpace,
    pub codomain: FiniteMetricSpace,
    image: Vec<usize>,
}

impl PointMap {
    /// `image[x]` is the index of `R(x)`; `image[0]` must be 0.
    pub fn new(domain: FiniteMetricSpace, codomain: FiniteMetricSpace, image: Vec<usize>) -> Result<Self> {
        if image.len() != domain.len() {
            return Err(Error::DimensionMismatch { expected: domain.len(), found: image.len() });
        }
        if let Some(&bad) = image.iter().find(|&&i| i >= codomain.len()) {
            return Err(Error::PointOutOfRange(bad));
        }
        if image[0] != 0 {
            return Err(Error::InvalidOperator("a point map must send the base point to the base point".into()));
        }
        Ok(PointMap { domain, codomain, image })
    }

    pub fn identity(space: &FiniteMetricSpace) -> Self {
        PointMap { domain: space.clone(), codomain: space.clone(), image: (0..space.len()).collect() }
    }

    pub fn apply(&self, x: usize) -> usize {
        self.image[x]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn lip(&self) -> Rational {
        self.domain
            .pairs()
            .map(|(x, y)| self.codomain.d(self.image[x], self.image[y]) / self.domain.d(x, y))
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

/// A linear map `E → F` as a `dim F × dim E` matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMap {
    pub domain: PolyhedralNorm,
    pub codomain: PolyhedralNorm,
    pub matrix: Matrix,
}

impl LinearMap {
    pub fn new(domain: PolyhedralNorm, codomain: PolyhedralNorm, matrix: Matrix) -> Result<Self> {
        if matrix.rows() != codomain.dim() || matrix.cols() != domain.dim() {
            return Err(Error::InvalidOperator(format!(
                "matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                codomain.dim(),
                domain.dim()
            )));
        }
        Ok(LinearMap { domain, codomain, matrix })
    }

    pub fn identity(space: &PolyhedralNorm) -> Self {
        LinearMap { domain: space.clone(), codomain: space.clone(), matrix: Matrix::identity(space.dim()) }
    }

    pub fn norm(&self) -> Rational {
        op_norm(&self.matrix, &self.domain, &self.codomain).expect("polyhedral codomain")
    }
}

/// `T: X × E → F` stored as `A(x)` for the non-base points; `A(0) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LipLinearOperator<N: Norm = PolyhedralNorm> {
    pub space: FiniteMetricSpace,
    pub domain: PolyhedralNorm,
    pub codomain: N,
    table: Vec<Matrix>,
}

impl<N: Norm> LipLinearOperator<N> {
    pub fn new(space: FiniteMetricSpace, domain: PolyhedralNorm, codomain: N, table: Vec<Matrix>) -> Result<Self> {
        if table.len() != space.free_dim() {
            return Err(Error::DimensionMismatch { expected: space.free_dim(), found: table.len() });
        }
        for (k, m) in table.iter().enumerate() {
            if m.rows() != codomain.dim() || m.cols() != domain.dim() {
                return Err(Error::InvalidOperator(format!(
                    "A({}) is {}x{}, expected {}x{}",
                    space.label(k + 1),
                    m.rows(),
                    m.cols(),
                    codomain.dim(),
                    domain.dim()
                )));
            }
        }
        Ok(LipLinearOperator { space, domain, codomain, table })
    }

    /// Builds from a table over all points; the base-point entry must vanish.
    pub fn from_full_table(
        space: FiniteMetricSpace,
        domain: PolyhedralNorm,
        codomain: N,
        mut table: Vec<Matrix>,
    ) -> Result<Self> {
        if table.len() != space.len() {
            return Err(Error::DimensionMismatch { expected: space.len(), found: table.len() });
        }
        if !table[0].is_zero() {
            return Err(Error::InvalidOperator("A(0) must be the zero map".into()));
        }
        table.remove(0);
        Self::new(space, domain, codomain, table)
    }

    pub fn zero(space: FiniteMetricSpace, domain: PolyhedralNorm, codomain: N) -> Self {
        let table = vec![Matrix::zeros(codomain.dim(), domain.dim()); space.free_dim()];
        LipLinearOperator { space, domain, codomain, table }
    }

    /// `A_T(x)`.
    pub fn at(&self, x: usize) -> Matrix {
        if x == 0 {
            Matrix::zeros(self.codomain.dim(), self.domain.dim())
        } else {
            self.table[x - 1].clone()
        }
    }

    pub fn table(&self) -> &[Matrix] {
        &self.table
    }

    /// `T(x, e)`.
    pub fn apply(&self, x: usize, e: &[Rational]) -> Vector {
        if x == 0 {
            linalg::zeros(self.codomain.dim())
        } else {
            self.table[x - 1].mul_vec(e)
        }
    }

    /// `B_T(e)`: the Lipschitz map `x ↦ T(x, e)`.
    pub fn column_map(&self, e: &[Rational]) -> LipschitzMap<N> {
        let values = self.table.iter().map(|m| m.mul_vec(e)).collect();
        LipschitzMap { space: self.space.clone(), codomain: self.codomain.clone(), values }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let table = self.table.iter().map(|m| m.scale(s)).collect();
        LipLinearOperator { table, ..self.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().all(Matrix::is_zero)
    }

    pub fn is_scalar(&self) -> bool {
        self.codomain.dim() == 1
    }

    /// Sum of two operators on the same spaces.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.table.len() != other.table.len() || self.domain.dim() != other.domain.dim() {
            return Err(Error::InvalidOperator("operators live on different spaces".into()));
        }
        let table = self.table.iter().zip(&other.table).map(|(a, b)| a.add(b)).collect();
        Ok(LipLinearOperator { table, ..self.clone() })
    }
}
