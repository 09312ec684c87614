//! Integral Lip-Linear operators.
//!
//! `T` is integral when `T(x, e) = ∫ f(x) e*(e) dμ(f, e*)` for a measure on
//! `B_{X#} × B_{E*}`; the norm is the least total variation. Atoms may be
//! restricted to vertex pairs: `f(x) e*(e)` is bilinear, so an atom at an
//! interior pair splits into vertex-pair atoms with the same total
//! variation and the same represented operator. On that finite support the
//! norm is an LP, and its dual is the supremum of `T̂` over the ε-ball.

use num::{Signed, Zero};
use serde::Serialize;

use crate::config::Caps;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::lp::{solve_optimal, LinearProgram, Relation, VarBound};
use crate::operators::LipLinearOperator;
use crate::rational::{self, serde_rational, serde_vec, Rational};
use crate::spaces::{
    in_lipschitz_ball, lip_constant, lipschitz_ball_vertices, value_at, FiniteMetricSpace, PolyhedralNorm,
};
use crate::summing::half_set as half_set_of;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntegralAtom {
    /// Lipschitz function on the non-base points.
    #[serde(with = "serde_vec")]
    pub f: Vector,
    #[serde(with = "serde_vec")]
    pub functional: Vector,
    /// Signed mass; for a vector-valued certificate the mass is carried by `z` and this is 1.
    #[serde(with = "serde_rational")]
    pub weight: Rational,
    #[serde(with = "opt_vec", skip_serializing_if = "Option::is_none")]
    pub z: Option<Vector>,
}

/// Discrete representing measure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntegralCertificate {
    pub atoms: Vec<IntegralAtom>,
}

mod opt_vec {
    use super::*;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &Option<Vector>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(v) => serde_vec::serialize(v, s),
            None => s.serialize_none(),
        }
    }
}

impl IntegralCertificate {
    pub fn is_scalar(&self) -> bool {
        self.atoms.iter().all(|a| a.z.is_none())
    }

    /// `Σ |weight|` or `Σ ‖z‖_F`.
    pub fn total_variation(&self, codomain: &PolyhedralNorm) -> Rational {
        self.atoms
            .iter()
            .map(|a| match &a.z {
                Some(z) => a.weight.abs() * codomain.eval(z),
                None => a.weight.abs(),
            })
            .sum()
    }
}

#[derive(Clone, Debug)]
pub struct IntegralResult {
    pub value: Rational,
    pub certificate: IntegralCertificate,
}

fn atoms_of(t: &LipLinearOperator, caps: &Caps) -> Result<(Vec<Vector>, Vec<Vector>)> {
    let fs = half_set_of(&lipschitz_ball_vertices(&t.space, caps)?);
    let ws = half_set_of(t.domain.dual_vertices());
    Ok((fs, ws))
}

/// `𝕀_int(T)` with a representing measure attaining it.
///
/// Scalar codomain: minimize `Σ (c⁺ + c⁻)` over signed atom weights.
/// Vector codomain: each atom carries `z ∈ F` and the objective `Σ ‖z‖_F`
/// is linearized through the dual vertices of `B_{F*}`.
pub fn integral_norm(t: &LipLinearOperator, caps: &Caps) -> Result<IntegralResult> {
    if t.is_zero() {
        return Ok(IntegralResult { value: Rational::zero(), certificate: IntegralCertificate { atoms: Vec::new() } });
    }
    let (fs, ws) = atoms_of(t, caps)?;
    let pairs: Vec<(usize, usize)> = (0..fs.len()).flat_map(|i| (0..ws.len()).map(move |j| (i, j))).collect();
    let n = t.domain.dim();
    let m = t.codomain.dim();
    let points = t.space.free_dim();
    // coefficient of atom (i, j) in the equation for (x, k)
    let coeff = |i: usize, j: usize, x: usize, k: usize| &fs[i][x] * &ws[j][k];
    let atoms: Vec<IntegralAtom>;
    let value;
    if m == 1 {
        let a = pairs.len();
        let mut lp = LinearProgram::minimize(vec![rational::one(); 2 * a]);
        for x in 0..points {
            for k in 0..n {
                let mut row = Vec::with_capacity(2 * a);
                for &(i, j) in &pairs {
                    row.push(coeff(i, j, x, k));
                }
                for &(i, j) in &pairs {
                    row.push(-coeff(i, j, x, k));
                }
                lp.constrain(row, Relation::Eq, t.table()[x].get(0, k).clone());
            }
        }
        let sol = solve_optimal(&lp, "scalar integral program")?;
        value = sol.value;
        atoms = pairs
            .iter()
            .enumerate()
            .filter_map(|(idx, &(i, j))| {
                let w = &sol.primal[idx] - &sol.primal[a + idx];
                (!w.is_zero()).then(|| IntegralAtom { f: fs[i].clone(), functional: ws[j].clone(), weight: w, z: None })
            })
            .collect();
    } else {
        // variables: z_{p,r} (free) then s_p >= ‖z_p‖
        let a = pairs.len();
        let nz = a * m;
        let mut obj = linalg::zeros(nz);
        obj.extend(vec![rational::one(); a]);
        let mut bounds = vec![VarBound::Free; nz];
        bounds.extend(vec![VarBound::NonNegative; a]);
        let mut lp = LinearProgram::minimize(obj).with_bounds(bounds);
        for x in 0..points {
            for k in 0..n {
                for r in 0..m {
                    let mut row = linalg::zeros(nz + a);
                    for (p, &(i, j)) in pairs.iter().enumerate() {
                        row[p * m + r] = coeff(i, j, x, k);
                    }
                    lp.constrain(row, Relation::Eq, t.table()[x].get(r, k).clone());
                }
            }
        }
        for p in 0..a {
            for g in t.codomain.dual_vertices() {
                let mut row = linalg::zeros(nz + a);
                for r in 0..m {
                    row[p * m + r] = g[r].clone();
                }
                row[nz + p] = -rational::one();
                lp.constrain(row, Relation::Le, Rational::zero());
            }
        }
        let sol = solve_optimal(&lp, "vector integral program")?;
        value = sol.value;
        atoms = pairs
            .iter()
            .enumerate()
            .filter_map(|(p, &(i, j))| {
                let z: Vector = sol.primal[p * m..(p + 1) * m].to_vec();
                (!linalg::is_zero(&z)).then(|| IntegralAtom {
                    f: fs[i].clone(),
                    functional: ws[j].clone(),
                    weight: rational::one(),
                    z: Some(z),
                })
            })
            .collect();
    }
    Ok(IntegralResult { value, certificate: IntegralCertificate { atoms } })
}

/// `sup { |T̂(u)| : ε(u) <= 1 }` over tensors `u ∈ F(X) ⊗ E`, for scalar `T`.
///
/// The ε-ball is cut out by `|Σ_x f(x) w(u_x)| <= 1` over vertex pairs
/// `(f, w)`; this program is the LP dual of [`integral_norm`].
pub fn eps_dual_check(t: &LipLinearOperator, caps: &Caps) -> Result<Rational> {
    if t.codomain.dim() != 1 {
        return Err(Error::NonScalarCodomain(t.codomain.dim()));
    }
    if t.is_zero() {
        return Ok(Rational::zero());
    }
    let (fs, ws) = atoms_of(t, caps)?;
    let n = t.domain.dim();
    let points = t.space.free_dim();
    let obj: Vector = t.table().iter().flat_map(|a| a.row(0).to_vec()).collect();
    let mut lp = LinearProgram::maximize(obj).all_free();
    for f in &fs {
        for w in &ws {
            let row: Vector =
                (0..points).flat_map(|x| (0..n).map(move |k| (x, k))).map(|(x, k)| &f[x] * &w[k]).collect();
            lp.constrain(linalg::neg(&row), Relation::Le, rational::one());
            lp.constrain(row, Relation::Le, rational::one());
        }
    }
    Ok(solve_optimal(&lp, "injective dual program")?.value)
}

/// Evaluates the representation: `A(x) = Σ weight · f(x) · z ⊗ e*`.
pub fn reconstruct(
    cert: &IntegralCertificate,
    space: &FiniteMetricSpace,
    domain: &PolyhedralNorm,
    codomain: &PolyhedralNorm,
) -> Result<LipLinearOperator> {
    let one = vec![rational::one()];
    let mut table = vec![Matrix::zeros(codomain.dim(), domain.dim()); space.free_dim()];
    for (k, atom) in cert.atoms.iter().enumerate() {
        if atom.f.len() != space.free_dim() || atom.functional.len() != domain.dim() {
            return Err(Error::DimensionMismatch { expected: space.free_dim(), found: atom.f.len() });
        }
        if !in_lipschitz_ball(space, &atom.f) || domain.dual_eval(&atom.functional) > rational::one() {
            return Err(Error::SupportOutsideBall(k));
        }
        let z = atom.z.as_ref().unwrap_or(&one);
        codomain.check_dim(z)?;
        let rank_one = Matrix::outer(z, &atom.functional).scale(&atom.weight);
        for (x, a) in table.iter_mut().enumerate() {
            *a = a.add(&rank_one.scale(&atom.f[x]));
        }
    }
    LipLinearOperator::new(space.clone(), domain.clone(), codomain.clone(), table)
}

/// Discrete `L∞(μ)` factorization `T(x, e) = Σ_k R(x)_k v(e)_k μ_k`.
#[derive(Clone, Debug, Serialize)]
pub struct LinftyFactorization {
    /// `R(x)` for every point (base included), indexed by atom.
    #[serde(with = "rational::serde_vec2")]
    pub r: Vec<Vector>,
    /// `v(e_j)` for the standard basis vectors, indexed by atom.
    #[serde(with = "rational::serde_vec2")]
    pub v: Vec<Vector>,
    #[serde(with = "serde_vec")]
    pub mu: Vec<Rational>,
    #[serde(with = "serde_rational")]
    pub sup_v: Rational,
    #[serde(with = "serde_rational")]
    pub lip_r: Rational,
    #[serde(with = "serde_rational")]
    pub mass: Rational,
    /// `‖v‖ · Lip(R) · μ(Ω)`, an upper bound for the integral norm.
    #[serde(with = "serde_rational")]
    pub product: Rational,
}

impl LinftyFactorization {
    pub fn apply(&self, x: usize, e: &[Rational]) -> Rational {
        let ve: Vec<Rational> =
            (0..self.mu.len()).map(|k| e.iter().zip(&self.v).map(|(ej, vj)| ej * &vj[k]).sum()).collect();
        (0..self.mu.len()).map(|k| &self.r[x][k] * &ve[k] * &self.mu[k]).sum()
    }
}

pub fn factorize_linfty(
    cert: &IntegralCertificate,
    space: &FiniteMetricSpace,
    domain: &PolyhedralNorm,
) -> Result<LinftyFactorization> {
    if let Some(a) = cert.atoms.iter().find_map(|a| a.z.as_ref()) {
        return Err(Error::NonScalarCodomain(a.len()));
    }
    let mu: Vec<Rational> = cert.atoms.iter().map(|a| a.weight.abs()).collect();
    // the sign of each weight is absorbed into R
    let r: Vec<Vector> = (0..space.len())
        .map(|x| {
            cert.atoms
                .iter()
                .map(|a| if a.weight.is_negative() { -value_at(&a.f, x) } else { value_at(&a.f, x) })
                .collect()
        })
        .collect();
    let v: Vec<Vector> =
        (0..domain.dim()).map(|j| cert.atoms.iter().map(|a| a.functional[j].clone()).collect()).collect();
    let sup_v = cert.atoms.iter().map(|a| domain.dual_eval(&a.functional)).max().unwrap_or_else(Rational::zero);
    let lip_r = cert.atoms.iter().map(|a| lip_constant(space, &a.f)).max().unwrap_or_else(Rational::zero);
    let mass: Rational = mu.iter().sum();
    let product = &sup_v * &lip_r * &mass;
    Ok(LinftyFactorization { r, v, mu, sup_v, lip_r, mass, product })
}
