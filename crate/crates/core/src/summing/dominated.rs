//! `(p, q)`-dominated Lip-Linear operators.
//!
//! Two independent routes to `δ_{p,q}(T)`:
//!
//! * route A factors through the Lipschitz side: each pair `(x, y)` gives the
//!   linear map `M_xy = A(x) − A(y)`, whose `π_q` becomes the target distance
//!   of a Lipschitz `p`-summing program on `X`.
//! * route B factors through the linear side: `δ_{p,q}(T) = π_q` of the
//!   identity `E → (E, φ_p)` with `φ_p(e) = π_p^L(B_T e)`.
//!
//! For `p = 1` the seminorm `φ_1` is itself polyhedral and is recovered
//! exactly as a finite family of functionals, so route B is exact whenever
//! the `q` engine is.

use num::{One, Signed, Zero};

use super::linear::grid_lower_bound;
use super::{
    check_exponent, pietsch_lipschitz, q_summing_functionals, root_of, DominationCertificate, LinearTarget, Measure,
    SummingOptions,
};
use crate::config::Caps;
use crate::error::{Cap, Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::lp::{enumerate_vertices, solve_optimal, LinearProgram, Polytope, Relation};
use crate::operators::LipLinearOperator;
use crate::rational::{self, pow_bounds, Bounds, Rational};
use crate::spaces::{lipschitz_ball_vertices, value_at};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    A,
    B,
}

#[derive(Clone, Debug)]
pub struct DominatedResult {
    pub route: Route,
    pub value: Bounds,
    pub exact: bool,
    /// Route A: pair targets (in `pairs()` order) and the Lipschitz certificate.
    pub lipschitz: Option<(Vec<Bounds>, DominationCertificate)>,
    /// Linear certificates with the seminorm each one dominates: one per
    /// nonzero pair for route A, a single one for route B.
    pub linear: Vec<(LinearTarget, DominationCertificate)>,
}

pub fn dominated_via_a(
    t: &LipLinearOperator,
    p: &Rational,
    q: &Rational,
    caps: &Caps,
    opts: &SummingOptions,
) -> Result<DominatedResult> {
    check_exponent(p)?;
    check_exponent(q)?;
    let mut targets = Vec::new();
    let mut linear = Vec::new();
    let mut exact = true;
    for (x, y) in t.space.pairs() {
        let m = t.at(x).sub(&t.at(y));
        if m.is_zero() {
            targets.push(Bounds::exact(Rational::zero()));
            continue;
        }
        let target = LinearTarget::from_matrix(&m, &t.domain, &t.codomain);
        let r = q_summing_functionals(&target, q, caps, opts)?;
        exact &= r.exact;
        targets.push(r.value);
        linear.push((target, r.certificate));
    }
    let ps = pietsch_lipschitz(&t.space, &targets, p, caps)?;
    exact &= ps.is_exact();
    Ok(DominatedResult { route: Route::A, value: ps.value, exact, lipschitz: Some((targets, ps.certificate)), linear })
}

pub fn dominated_via_b(
    t: &LipLinearOperator,
    p: &Rational,
    q: &Rational,
    caps: &Caps,
    opts: &SummingOptions,
) -> Result<DominatedResult> {
    check_exponent(p)?;
    check_exponent(q)?;
    let target = LinearTarget { domain: t.domain.clone(), functionals: seminorm_functionals(t, caps)? };
    let r = q_summing_functionals(&target, q, caps, opts)?;
    if p.is_one() {
        return Ok(DominatedResult {
            route: Route::B,
            value: r.value,
            exact: r.exact,
            lipschitz: None,
            linear: vec![(target, r.certificate)],
        });
    }
    // π_p^L <= π_1^L pointwise, so the p = 1 value caps the general one.
    let phi = |e: &[Rational]| -> Result<Bounds> {
        let col = t.column_map(e);
        Ok(super::lipschitz_p_summing(&col, p, caps)?.value)
    };
    let lower = grid_lower_bound(&t.domain, &phi, q, opts)?;
    let upper = r.value.upper.clone();
    let lower = if lower > upper { upper.clone() } else { lower };
    Ok(DominatedResult {
        route: Route::B,
        exact: lower == upper,
        value: Bounds::new(lower, upper),
        lipschitz: None,
        linear: vec![(target, r.certificate)],
    })
}

/// `π_1^L(B_T e)` together with a functional `ℓ` with `ℓ·e` equal to it and
/// `ℓ·e' <= π_1^L(B_T e')` for every `e'`.
///
/// `ℓ = Σ λ_xy M_xyᵀ z_xy` from the optimal multipliers `λ` of the measure
/// program and norming functionals `z_xy` of `M_xy e`; the multipliers stay
/// dual-feasible for every `e'`, which gives the global inequality.
fn supporting_functional(
    t: &LipLinearOperator,
    verts: &[Vector],
    pairs: &[(usize, usize, Matrix)],
    e: &[Rational],
) -> Result<(Rational, Vector)> {
    let n = t.domain.dim();
    let mut lp = LinearProgram::minimize(vec![rational::one(); verts.len()]);
    let mut rows = Vec::new();
    for (k, (x, y, m)) in pairs.iter().enumerate() {
        let me = m.mul_vec(e);
        let (tau, z) = t
            .codomain
            .dual_vertices()
            .iter()
            .map(|z| (linalg::dot(z, &me), z))
            .max_by(|a, b| a.0.cmp(&b.0))
            .expect("nonempty dual ball");
        if !tau.is_positive() {
            continue;
        }
        let coeffs = verts.iter().map(|f| (value_at(f, *x) - value_at(f, *y)).abs()).collect();
        lp.constrain(coeffs, Relation::Ge, tau);
        rows.push((k, z.clone()));
    }
    if rows.is_empty() {
        return Ok((Rational::zero(), linalg::zeros(n)));
    }
    let sol = solve_optimal(&lp, "column summing program")?;
    let mut l = linalg::zeros(n);
    for ((k, z), lambda) in rows.iter().zip(&sol.duals) {
        if lambda.is_zero() {
            continue;
        }
        l = linalg::add(&l, &linalg::scale(&pairs[*k].2.transpose_mul_vec(z), lambda));
    }
    Ok((sol.value, l))
}

/// A finite family `L` with `π_1^L(B_T e) = max_{ℓ ∈ L} |ℓ·e|` for all `e`.
///
/// Works in coordinates `c` of the row space `U` of the stacked `A(x)` (the
/// seminorm vanishes on its complement). The unit ball of the current
/// family is a polytope; any vertex where the true seminorm exceeds one
/// yields a new supporting functional that cuts it off. Supporting
/// functionals come from finitely many bases, so the loop terminates.
pub fn seminorm_functionals(t: &LipLinearOperator, caps: &Caps) -> Result<Vec<Vector>> {
    let n = t.domain.dim();
    let stacked: Vec<Vector> = t.table().iter().flat_map(Matrix::row_vectors).collect();
    let basis = row_basis(&stacked);
    let r = basis.len();
    if r == 0 {
        return Ok(Vec::new());
    }
    let verts = super::half_set(&lipschitz_ball_vertices(&t.space, caps)?);
    let pairs: Vec<(usize, usize, Matrix)> = t.space.pairs().map(|(x, y)| (x, y, t.at(x).sub(&t.at(y)))).collect();
    let lift = |c: &[Rational]| -> Vector {
        basis.iter().zip(c).fold(linalg::zeros(n), |acc, (u, ci)| linalg::add(&acc, &linalg::scale(u, ci)))
    };
    let coords = |l: &[Rational]| -> Vector { basis.iter().map(|u| linalg::dot(u, l)).collect() };

    let mut family: Vec<Vector> = Vec::new();
    let add = |family: &mut Vec<Vector>, l: Vector| -> bool {
        if linalg::is_zero(&l) || family.contains(&l) || family.contains(&linalg::neg(&l)) {
            return false;
        }
        family.push(l);
        true
    };
    for u in &basis {
        let (_, l) = supporting_functional(t, &verts, &pairs, u)?;
        add(&mut family, l);
    }
    loop {
        let projected: Vec<Vector> = family.iter().map(|l| coords(l)).collect();
        let kernel = linalg::null_space(&projected, r);
        let Some(c) = kernel.first() else { break };
        let (_, l) = supporting_functional(t, &verts, &pairs, &lift(c))?;
        if !add(&mut family, l) {
            return Err(Error::Solver("supporting functional failed to raise the rank".into()));
        }
    }
    for round in 0.. {
        caps.check(Cap::Iterations, round)?;
        let mut rows = Vec::new();
        for l in &family {
            let pc = coords(l);
            rows.push(linalg::neg(&pc));
            rows.push(pc);
        }
        let rhs = vec![rational::one(); rows.len()];
        let ball = Polytope::new(r, rows, rhs)?;
        let known = family.len();
        let mut grew = false;
        for c in enumerate_vertices(&ball, caps)? {
            let (phi, l) = supporting_functional(t, &verts, &pairs, &lift(&c))?;
            if phi > rational::one() {
                // Members of the family are <= 1 on the ball, so only a
                // functional found earlier in this round can repeat.
                if !add(&mut family, l.clone())
                    && (family[..known].contains(&l) || family[..known].contains(&linalg::neg(&l)))
                {
                    return Err(Error::Solver("violated vertex is already supported".into()));
                }
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    Ok(family)
}

/// Linearly independent subset of `rows` (greedy, in order).
fn row_basis(rows: &[Vector]) -> Vec<Vector> {
    let mut basis: Vec<Vector> = Vec::new();
    for v in rows {
        let mut trial = basis.clone();
        trial.push(v.clone());
        if linalg::rank(&trial) > basis.len() {
            basis = trial;
        }
    }
    basis
}

/// Two-sided bracket for `δ_{(1,1)}(T)` from the two-measure domination.
#[derive(Clone, Debug)]
pub struct TwoMeasureResult {
    /// `lower = max(route A, route B)`, `upper` = the certificate constant.
    pub value: Bounds,
    pub exact: bool,
    pub route_a: Bounds,
    pub route_b: Bounds,
    pub certificate: DominationCertificate,
    pub rounds: usize,
}

fn measure_of(cert: &DominationCertificate) -> Measure {
    match cert {
        DominationCertificate::LipschitzP { measure, .. } | DominationCertificate::LinearQ { measure, .. } => {
            measure.clone()
        }
        DominationCertificate::TwoMeasure { lipschitz, .. } => lipschitz.clone(),
    }
}

/// `Σ μ |h(s)|` (exact; the exponent is one).
fn integral1(measure: &Measure, h: impl Fn(&Vector) -> Rational) -> Rational {
    measure.support.iter().zip(&measure.weights).map(|(s, w)| w * h(s).abs()).sum()
}

struct TwoMeasureSearch<'a> {
    t: &'a LipLinearOperator,
    pairs: Vec<(usize, usize, Matrix)>,
    caps: &'a Caps,
    opts: &'a SummingOptions,
}

impl TwoMeasureSearch<'_> {
    /// Best Lipschitz measure for a fixed linear one: each pair needs
    /// `C a_xy >= τ_xy = sup_e ‖M_xy e‖ / Σ μ2 |w·e|`, and `τ` is attained on
    /// the extreme rays of the arrangement cut by the linear support.
    fn lipschitz_step(&self, mu2: &Measure) -> Result<Option<(Rational, Measure)>> {
        let mut normals = self.t.domain.dual_vertices().to_vec();
        normals.extend(mu2.support.iter().cloned());
        let rays = super::verify::arrangement_rays(&normals, self.t.domain.dim());
        let mut targets = Vec::with_capacity(self.pairs.len());
        for (_, _, m) in &self.pairs {
            let mut tau = Rational::zero();
            for e in &rays {
                let num = crate::spaces::Norm::norm(&self.t.codomain, &m.mul_vec(e))?;
                if num.is_zero() {
                    continue;
                }
                let den = integral1(mu2, |w| linalg::dot(w, e));
                if den.is_zero() {
                    return Ok(None);
                }
                tau = tau.max(num / den);
            }
            targets.push(Bounds::exact(tau));
        }
        let ps = pietsch_lipschitz(&self.t.space, &targets, &rational::one(), self.caps)?;
        Ok(Some((ps.value.upper, measure_of(&ps.certificate))))
    }

    /// Best linear measure for a fixed Lipschitz one: `π_1` of
    /// `E → (E, max_xy ‖M_xy e‖ / a_xy)`, a polyhedral seminorm.
    fn linear_step(&self, mu1: &Measure) -> Result<Option<(Rational, Measure)>> {
        let mut functionals = Vec::new();
        for (x, y, m) in &self.pairs {
            if m.is_zero() {
                continue;
            }
            let a = integral1(mu1, |f| value_at(f, *x) - value_at(f, *y));
            if a.is_zero() {
                return Ok(None);
            }
            for z in self.t.codomain.dual_vertices() {
                functionals.push(linalg::scale(&m.transpose_mul_vec(z), &(rational::one() / &a)));
            }
        }
        let target = LinearTarget { domain: self.t.domain.clone(), functionals };
        let r = q_summing_functionals(&target, &rational::one(), self.caps, self.opts)?;
        Ok(Some((r.value.upper, measure_of(&r.certificate))))
    }
}

/// `δ_{(1,1)}(T)` bracketed between the two single-variable routes (each a
/// lower bound) and a two-measure certificate found by alternately
/// re-optimizing one measure with the other fixed (each step is an exact LP,
/// and the constants never increase).
pub fn dominated_two_measure(t: &LipLinearOperator, caps: &Caps, opts: &SummingOptions) -> Result<TwoMeasureResult> {
    let one = rational::one();
    let a = dominated_via_a(t, &one, &one, caps, opts)?;
    let b = dominated_via_b(t, &one, &one, caps, opts)?;
    let lower = a.value.lower.clone().max(b.value.lower.clone());
    let empty = Measure { support: Vec::new(), weights: Vec::new() };
    let certificate = |mu1: Measure, mu2: Measure, c: Rational| DominationCertificate::TwoMeasure {
        p: one.clone(),
        q: one.clone(),
        lipschitz: mu1,
        linear: mu2,
        constant: c,
    };
    if t.is_zero() {
        return Ok(TwoMeasureResult {
            value: Bounds::exact(Rational::zero()),
            exact: true,
            route_a: a.value,
            route_b: b.value,
            certificate: certificate(empty.clone(), empty, Rational::zero()),
            rounds: 0,
        });
    }
    let search = TwoMeasureSearch {
        t,
        pairs: t.space.pairs().map(|(x, y)| (x, y, t.at(x).sub(&t.at(y)))).collect(),
        caps,
        opts,
    };
    let mu_a = a.lipschitz.as_ref().map(|(_, c)| measure_of(c)).unwrap_or_else(|| empty.clone());
    let mu_b = b.linear.first().map(|(_, c)| measure_of(c)).unwrap_or_else(|| empty.clone());

    let mut best: Option<(Rational, Measure, Measure)> = None;
    let mut rounds = 0;
    // Two starts: from route B's linear measure and from route A's Lipschitz one.
    for start_linear in [true, false] {
        let (mut mu1, mut mu2) = (mu_a.clone(), mu_b.clone());
        let mut last: Option<Rational> = None;
        let mut first = true;
        loop {
            rounds += 1;
            caps.check(Cap::Iterations, rounds)?;
            if !(first && !start_linear) {
                let Some((c1, m1)) = search.lipschitz_step(&mu2)? else { break };
                mu1 = m1;
                if best.as_ref().is_none_or(|(c, _, _)| c1 < *c) {
                    best = Some((c1, mu1.clone(), mu2.clone()));
                }
            }
            first = false;
            let Some((c2, m2)) = search.linear_step(&mu1)? else { break };
            mu2 = m2;
            if best.as_ref().is_none_or(|(c, _, _)| c2 < *c) {
                best = Some((c2.clone(), mu1.clone(), mu2.clone()));
            }
            if c2 <= lower || last.as_ref().is_some_and(|l| c2 >= *l) {
                break;
            }
            last = Some(c2);
        }
    }
    let (c, mu1, mu2) = best.ok_or_else(|| Error::Solver("no finite two-measure constant was found".into()))?;
    Ok(TwoMeasureResult {
        exact: c == lower,
        value: Bounds::new(lower, c.clone()),
        route_a: a.value,
        route_b: b.value,
        certificate: certificate(mu1, mu2, c),
        rounds,
    })
}

/// Finite data `(x_i, y_i, e_i)` for the lower bound.
#[derive(Clone, Debug)]
pub struct SequenceSample {
    pub triples: Vec<(usize, usize, Vector)>,
}

impl SequenceSample {
    pub fn new(triples: Vec<(usize, usize, Vector)>) -> Self {
        SequenceSample { triples }
    }
}

/// `(Σ ‖T(x_i,e_i) − T(y_i,e_i)‖^s)^{1/s} / (weak Lipschitz p-norm · weak q-norm)`
/// with `1/s = 1/p + 1/q`; every `(p, q)`-dominated constant is at least this.
/// Rounded so the returned value never exceeds the true ratio.
pub fn dominated_lower_bound(
    t: &LipLinearOperator,
    p: &Rational,
    q: &Rational,
    sample: &SequenceSample,
    caps: &Caps,
) -> Result<Rational> {
    check_exponent(p)?;
    check_exponent(q)?;
    if sample.triples.is_empty() {
        return Err(Error::DegenerateSample("empty sample".into()));
    }
    for (x, y, e) in &sample.triples {
        for z in [x, y] {
            if *z >= t.space.len() {
                return Err(Error::PointOutOfRange(*z));
            }
        }
        t.domain.check_dim(e)?;
    }
    let s = p * q / (p + q);
    let mut num = Rational::zero();
    for (x, y, e) in &sample.triples {
        let diff = linalg::sub(&t.apply(*x, e), &t.apply(*y, e));
        let d = crate::spaces::Norm::norm(&t.codomain, &diff)?;
        num += pow_bounds(&d, &s).lower;
    }
    let num = root_of(&Bounds::exact(num), &s).lower;

    let mut lip_weak = Rational::zero();
    for f in lipschitz_ball_vertices(&t.space, caps)? {
        let sum: Rational =
            sample.triples.iter().map(|(x, y, _)| pow_bounds(&(value_at(&f, *x) - value_at(&f, *y)), p).upper).sum();
        lip_weak = lip_weak.max(root_of(&Bounds::exact(sum), p).upper);
    }
    let mut lin_weak = Rational::zero();
    for w in t.domain.dual_vertices() {
        let sum: Rational = sample.triples.iter().map(|(_, _, e)| pow_bounds(&linalg::dot(w, e), q).upper).sum();
        lin_weak = lin_weak.max(root_of(&Bounds::exact(sum), q).upper);
    }
    if lip_weak.is_zero() || lin_weak.is_zero() {
        return Err(Error::DegenerateSample("a weak norm of the sample vanishes".into()));
    }
    Ok(num / (lip_weak * lin_weak))
}
