use std::collections::BTreeSet;
use std::fmt::Debug;

use num::Zero;

use crate::config::Caps;
use crate::error::{Cap, Error, Result};
use crate::linalg::{self, Vector};
use crate::lp::{enumerate_vertices, Polytope};
use crate::rational::{self, int, Rational};

/// A norm on `ℝ^dim` that can be evaluated exactly.
pub trait Norm: Clone + Debug {
    fn dim(&self) -> usize;
    fn norm(&self, x: &[Rational]) -> Result<Rational>;
}

/// Finite-dimensional norm `‖x‖ = max_{w ∈ W} w·x` with `W` the vertices of the dual ball.
///
/// Both vertex sets are kept: `dual` (extreme points of `B_{E*}`) and `primal`
/// (points of `B_E` whose hull is the ball; for ordinary norms the exact
/// vertex set, for free spaces the normalized molecules).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyhedralNorm {
    dim: usize,
    dual: Vec<Vector>,
    primal: Vec<Vector>,
}

fn symmetric_hull_check(dim: usize, w: &[Vector]) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidNorm("dimension must be positive".into()));
    }
    if let Some(bad) = w.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: bad.len() });
    }
    let set: BTreeSet<&Vector> = w.iter().collect();
    if let Some(v) = w.iter().find(|v| !set.contains(&linalg::neg(v))) {
        return Err(Error::InvalidNorm(format!(
            "dual vertex list is not symmetric: missing the negative of ({})",
            v.iter().map(rational::format).collect::<Vec<_>>().join(", ")
        )));
    }
    if linalg::rank(w) < dim {
        return Err(Error::InvalidNorm("dual vertices do not span the dual space; this is only a seminorm".into()));
    }
    Ok(())
}

/// Vertices of `{x : g·x <= 1 for g in gens}`.
fn polar_vertices(dim: usize, gens: &[Vector], caps: &Caps) -> Result<Vec<Vector>> {
    let p = Polytope::new(dim, gens.to_vec(), vec![rational::one(); gens.len()])?;
    enumerate_vertices(&p, caps)
}

impl PolyhedralNorm {
    /// Builds the norm whose dual ball is the convex hull of `dual_vertices`.
    /// Non-extreme entries are dropped.
    pub fn new(dual_vertices: Vec<Vector>) -> Result<Self> {
        Self::with_caps(dual_vertices, &Caps::default())
    }

    pub fn with_caps(dual_vertices: Vec<Vector>, caps: &Caps) -> Result<Self> {
        let dim = dual_vertices.first().map_or(0, Vec::len);
        caps.check(Cap::Dimension, dim)?;
        symmetric_hull_check(dim, &dual_vertices)?;
        let primal = polar_vertices(dim, &dual_vertices, caps)?;
        let dual = polar_vertices(dim, &primal, caps)?;
        Ok(PolyhedralNorm { dim, dual, primal })
    }

    /// The scalar field with `|·|`.
    pub fn scalar() -> Self {
        PolyhedralNorm { dim: 1, dual: vec![vec![int(-1)], vec![int(1)]], primal: vec![vec![int(-1)], vec![int(1)]] }
    }

    /// `ℓ_1^n`: dual ball is the cube, primal vertices `±e_i`.
    pub fn l1(n: usize) -> Result<Self> {
        Self::l1_linf(n, false)
    }

    /// `ℓ_∞^n`: dual ball is the cross-polytope, primal vertices the sign vectors.
    pub fn linf(n: usize) -> Result<Self> {
        Self::l1_linf(n, true)
    }

    fn l1_linf(n: usize, swap: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidNorm("dimension must be positive".into()));
        }
        Caps::default().check(Cap::Dimension, n)?;
        let mut signs: Vec<Vector> = (0..1usize << n)
            .map(|mask| (0..n).map(|i| if mask >> i & 1 == 1 { int(1) } else { int(-1) }).collect())
            .collect();
        signs.sort();
        let mut units: Vec<Vector> =
            (0..n).flat_map(|i| [linalg::unit(n, i), linalg::neg(&linalg::unit(n, i))]).collect();
        units.sort();
        let (dual, primal) = if swap { (units, signs) } else { (signs, units) };
        Ok(PolyhedralNorm { dim: n, dual, primal })
    }

    /// Assembles a norm from both vertex sets without enumeration. The caller
    /// guarantees that the hulls are polar to each other.
    pub(crate) fn from_parts(dim: usize, dual: Vec<Vector>, primal: Vec<Vector>) -> Self {
        PolyhedralNorm { dim, dual, primal }
    }

    /// The dual norm on `E*`: the two vertex sets trade places.
    pub fn dual(&self) -> PolyhedralNorm {
        PolyhedralNorm { dim: self.dim, dual: self.primal.clone(), primal: self.dual.clone() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dual_vertices(&self) -> &[Vector] {
        &self.dual
    }

    pub fn primal_vertices(&self) -> &[Vector] {
        &self.primal
    }

    /// `max_{w ∈ W} w·x`; the caller guarantees the width.
    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.dual.iter().map(|w| linalg::dot(w, x)).max().unwrap_or_else(Rational::zero)
    }

    /// Dual norm of a functional: `max_{v ∈ B_E} y·v`.
    pub fn dual_eval(&self, y: &[Rational]) -> Rational {
        self.primal.iter().map(|v| linalg::dot(y, v)).max().unwrap_or_else(Rational::zero)
    }

    pub fn check_dim(&self, x: &[Rational]) -> Result<()> {
        if x.len() == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim, found: x.len() })
        }
    }
}

impl Norm for PolyhedralNorm {
    fn dim(&self) -> usize {
        self.dim
    }

    fn norm(&self, x: &[Rational]) -> Result<Rational> {
        self.check_dim(x)?;
        Ok(self.eval(x))
    }
}

/// `max_{w ∈ W} w(x)`, with the dimension checked.
pub fn poly_norm_eval(n: &PolyhedralNorm, x: &[Rational]) -> Result<Rational> {
    n.norm(x)
}
