//! Linear `q`-summing norms by constraint generation.
//!
//! The target is a polyhedral seminorm `φ(e) = max_{ℓ ∈ L} |ℓ·e|` on a
//! polyhedral domain `E`, and `π_q^q` is the least mass `Σ ν_w` over
//! `w ∈ ext B_{E*}` with `φ(e)^q <= Σ ν_w |w·e|^q` for every `e`. The
//! semi-infinite program is solved on a growing finite set of directions.
//!
//! * `q = 1`: the most violated direction for each `ℓ` is an LP over `B_E`,
//!   so the loop ends with the exact value.
//! * `q = 2`: with `Q = Σ ν_w w wᵀ`, feasibility is `ℓᵀ Q⁺ ℓ <= 1`, so the
//!   restricted mass is a lower bound and `ρ = max(1, max ℓᵀQ⁺ℓ)` times it an
//!   upper bound; the direction `Q⁺ℓ` is the deepest cut.
//! * other `q`: a direction-grid lower bound against the `q = 1` (and, for
//!   `q >= 2`, the `q = 2`) upper bound, by monotonicity of `π_q` in `q`.

use num::{One, Signed, Zero};

use super::{check_exponent, direction_grid, half_set, root_of, DominationCertificate, Measure, SummingOptions};
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::lp::{solve_optimal, LinearProgram, Relation, VarBound};
use crate::operators::LinearMap;
use crate::rational::{self, int, pow_bounds, Bounds, Rational};
use crate::spaces::PolyhedralNorm;

/// `φ(e) = max_{ℓ ∈ functionals} |ℓ·e|` on `domain`.
#[derive(Clone, Debug)]
pub struct LinearTarget {
    pub domain: PolyhedralNorm,
    pub functionals: Vec<Vector>,
}

impl LinearTarget {
    /// `‖M e‖_F`, i.e. `L = {Mᵀ z : z ∈ ext B_{F*}}`.
    pub fn from_matrix(m: &Matrix, domain: &PolyhedralNorm, codomain: &PolyhedralNorm) -> Self {
        let functionals = codomain.dual_vertices().iter().map(|z| m.transpose_mul_vec(z)).collect();
        LinearTarget { domain: domain.clone(), functionals }
    }

    pub fn from_map(v: &LinearMap) -> Self {
        Self::from_matrix(&v.matrix, &v.domain, &v.codomain)
    }

    pub fn eval(&self, e: &[Rational]) -> Rational {
        self.functionals.iter().map(|l| linalg::dot(l, e).abs()).max().unwrap_or_else(Rational::zero)
    }
}

#[derive(Clone, Debug)]
pub struct QSumming {
    pub value: Bounds,
    /// True when `value` is the exact norm (then `lower == upper`).
    pub exact: bool,
    pub certificate: DominationCertificate,
    pub iterations: usize,
}

struct Restricted {
    mass: Rational,
    nu: Vec<Rational>,
}

/// `min Σ ν` s.t. `Σ ν_w |w·e|^q >= φ(e)^q` on `dirs`. With `pessimistic`
/// unset the coefficients are rounded so the value is a lower bound.
fn restricted(
    target: &LinearTarget,
    w: &[Vector],
    dirs: &[Vector],
    q: &Rational,
    pessimistic: bool,
) -> Result<Restricted> {
    restricted_by(&|e: &[Rational]| Ok(Bounds::exact(target.eval(e))), w, dirs, q, pessimistic)
}

/// As [`restricted`], for a target seminorm known only through enclosures.
fn restricted_by(
    phi: &dyn Fn(&[Rational]) -> Result<Bounds>,
    w: &[Vector],
    dirs: &[Vector],
    q: &Rational,
    pessimistic: bool,
) -> Result<Restricted> {
    let mut lp = LinearProgram::minimize(vec![rational::one(); w.len()]);
    for e in dirs {
        let b = phi(e)?;
        let phi = if pessimistic { pow_bounds(&b.upper, q) } else { pow_bounds(&b.lower, q) };
        let rhs = if pessimistic { phi.upper } else { phi.lower };
        if !rhs.is_positive() {
            continue;
        }
        let row = w
            .iter()
            .map(|wi| {
                let c = pow_bounds(&linalg::dot(wi, e), q);
                if pessimistic {
                    c.lower
                } else {
                    c.upper
                }
            })
            .collect();
        lp.constrain(row, Relation::Ge, rhs);
    }
    let sol = solve_optimal(&lp, "summing program")?;
    Ok(Restricted { mass: sol.value, nu: sol.primal })
}

/// `max_{e ∈ B_E} ℓ·e − Σ ν_w |w·e|` and its maximizer.
fn deepest_violation(
    domain: &PolyhedralNorm,
    w: &[Vector],
    nu: &[Rational],
    l: &[Rational],
) -> Result<(Rational, Vector)> {
    let n = domain.dim();
    let active: Vec<usize> = (0..w.len()).filter(|&i| nu[i].is_positive()).collect();
    let mut obj = l.to_vec();
    obj.extend(active.iter().map(|&i| -nu[i].clone()));
    let mut bounds = vec![VarBound::Free; n];
    bounds.extend(vec![VarBound::NonNegative; active.len()]);
    let mut lp = LinearProgram::maximize(obj).with_bounds(bounds);
    for g in domain.dual_vertices() {
        let mut row = g.clone();
        row.extend(linalg::zeros(active.len()));
        lp.constrain(row, Relation::Le, rational::one());
    }
    for (k, &i) in active.iter().enumerate() {
        for sign in [1, -1] {
            // t_k - s·w·e >= 0
            let mut row: Vector = w[i].iter().map(|x| -x * int(sign)).collect();
            row.extend(linalg::zeros(active.len()));
            row[n + k] = rational::one();
            lp.constrain(row, Relation::Ge, Rational::zero());
        }
    }
    let sol = solve_optimal(&lp, "violation search")?;
    Ok((sol.value, sol.primal[..n].to_vec()))
}

fn certificate(q: &Rational, w: &[Vector], nu: &[Rational], mass: &Rational, dirs: &[Vector]) -> DominationCertificate {
    DominationCertificate::LinearQ {
        exponent: q.clone(),
        measure: Measure::normalized(w, nu),
        constant: root_of(&Bounds::exact(mass.clone()), q).upper,
        directions: dirs.to_vec(),
    }
}

fn zero_result(q: &Rational) -> QSumming {
    QSumming {
        value: Bounds::exact(Rational::zero()),
        exact: true,
        certificate: DominationCertificate::LinearQ {
            exponent: q.clone(),
            measure: Measure { support: Vec::new(), weights: Vec::new() },
            constant: Rational::zero(),
            directions: Vec::new(),
        },
        iterations: 0,
    }
}

fn push_new(dirs: &mut Vec<Vector>, e: Vector) -> bool {
    let e = half_set(&[linalg::normalize_max(&e)]).pop();
    match e {
        Some(e) if !dirs.contains(&e) => {
            dirs.push(e);
            true
        }
        _ => false,
    }
}

fn one_summing(target: &LinearTarget, w: &[Vector], ls: &[Vector], caps: &Caps) -> Result<QSumming> {
    let q = rational::one();
    let mut dirs = half_set(target.domain.primal_vertices());
    for it in 1..=caps.iterations {
        let r = restricted(target, w, &dirs, &q, true)?;
        let solved = dirs.len();
        let mut grew = false;
        for l in ls {
            let (gap, e) = deepest_violation(&target.domain, w, &r.nu, l)?;
            if !gap.is_positive() {
                continue;
            }
            grew = true;
            if !push_new(&mut dirs, e.clone()) && dirs[..solved].contains(&half_set(&[linalg::normalize_max(&e)])[0]) {
                // A direction already in the program cannot be violated.
                return Err(Error::Solver("violated direction is already constrained".into()));
            }
        }
        if !grew {
            let cert = certificate(&q, w, &r.nu, &r.mass, &dirs);
            return Ok(QSumming { value: Bounds::exact(r.mass), exact: true, certificate: cert, iterations: it });
        }
    }
    let r = restricted(target, w, &dirs, &q, true)?;
    Err(Error::NonConvergence {
        iterations: caps.iterations,
        lower: rational::format(&r.mass),
        upper: "unknown".into(),
    })
}

/// Largest `ℓᵀ Q⁺ ℓ` over `ls`, or a kernel direction `k` with `ℓ·k != 0` when
/// some `ℓ` leaves the range of `Q`. Also returns the maximizing `Q⁺ℓ`.
pub(crate) fn quadratic_excess(q: &Matrix, ls: &[Vector]) -> (Option<Rational>, Option<Vector>) {
    let mut best: Option<(Rational, Vector)> = None;
    for l in ls {
        match linalg::solve(q, l) {
            Some(x) => {
                let r = linalg::dot(l, &x);
                if best.as_ref().is_none_or(|(b, _)| r > *b) {
                    best = Some((r, x));
                }
            }
            None => {
                let kernel = linalg::null_space(&q.row_vectors(), q.cols());
                let k = kernel.into_iter().find(|k| !linalg::dot(l, k).is_zero());
                return (None, k);
            }
        }
    }
    match best {
        Some((r, x)) => (Some(r), Some(x)),
        None => (Some(Rational::zero()), None),
    }
}

pub(crate) fn gram(w: &[Vector], nu: &[Rational], n: usize) -> Matrix {
    let mut q = Matrix::zeros(n, n);
    for (wi, c) in w.iter().zip(nu) {
        if c.is_zero() {
            continue;
        }
        q = q.add(&Matrix::outer(wi, wi).scale(c));
    }
    q
}

fn round_direction(x: &[Rational]) -> Vector {
    let x = linalg::normalize_max(x);
    x.iter().map(|c| rational::round_to_dyadic(rational::to_f64(c), 40)).collect()
}

fn two_summing(
    target: &LinearTarget,
    w: &[Vector],
    ls: &[Vector],
    caps: &Caps,
    opts: &SummingOptions,
) -> Result<QSumming> {
    let q = int(2);
    let n = target.domain.dim();
    let mut dirs = half_set(target.domain.primal_vertices());
    let mut last = (Rational::zero(), None::<Rational>);
    for it in 1..=caps.iterations {
        let r = restricted(target, w, &dirs, &q, true)?;
        let gq = gram(w, &r.nu, n);
        let (excess, dir) = quadratic_excess(&gq, ls);
        let rho = excess.as_ref().map(|e| std::cmp::max(e.clone(), rational::one()));
        if let Some(rho) = &rho {
            let upper_mass = &r.mass * rho;
            let gap = if upper_mass.is_zero() { Rational::zero() } else { (&upper_mass - &r.mass) / &upper_mass };
            if gap <= opts.tolerance {
                let lower = root_of(&Bounds::exact(r.mass.clone()), &q).lower;
                let upper = root_of(&Bounds::exact(upper_mass.clone()), &q).upper;
                let nu: Vec<Rational> = r.nu.iter().map(|c| c * rho).collect();
                let cert = certificate(&q, w, &nu, &upper_mass, &dirs);
                let exact = rho == &rational::one() && lower == upper;
                return Ok(QSumming { value: Bounds::new(lower, upper), exact, certificate: cert, iterations: it });
            }
        }
        last = (r.mass.clone(), rho.map(|rho| &r.mass * rho));
        let Some(x) = dir else { break };
        if !push_new(&mut dirs, round_direction(&x)) && !push_new(&mut dirs, x) {
            break;
        }
    }
    Err(Error::NonConvergence {
        iterations: caps.iterations,
        lower: rational::format(&last.0),
        upper: last.1.as_ref().map_or_else(|| "unbounded".into(), rational::format),
    })
}

fn general_summing(
    target: &LinearTarget,
    w: &[Vector],
    ls: &[Vector],
    q: &Rational,
    caps: &Caps,
    opts: &SummingOptions,
) -> Result<QSumming> {
    let mut dirs = half_set(target.domain.primal_vertices());
    for e in direction_grid(target.domain.dim(), opts.grid) {
        push_new(&mut dirs, e);
    }
    let low = restricted(target, w, &dirs, q, false)?;
    let lower = root_of(&Bounds::exact(low.mass), q).lower;
    let mut best = one_summing(target, w, ls, caps)?;
    if *q >= int(2) {
        let two = two_summing(target, w, ls, caps, opts)?;
        if two.value.upper < best.value.upper {
            best = two;
        }
    }
    // A measure dominating at a smaller exponent dominates at `q` (Jensen).
    let cert = match best.certificate {
        DominationCertificate::LinearQ { measure, constant, .. } => {
            DominationCertificate::LinearQ { exponent: q.clone(), measure, constant, directions: dirs }
        }
        other => other,
    };
    let upper = best.value.upper;
    let lower = std::cmp::min(lower, upper.clone());
    Ok(QSumming { value: Bounds::new(lower, upper), exact: false, certificate: cert, iterations: best.iterations })
}

/// Lower bound for `π_q` of `E → (E, φ)` from the vertex and grid directions,
/// for a seminorm `φ` that is only available pointwise.
pub(crate) fn grid_lower_bound(
    domain: &PolyhedralNorm,
    phi: &dyn Fn(&[Rational]) -> Result<Bounds>,
    q: &Rational,
    opts: &SummingOptions,
) -> Result<Rational> {
    let w = half_set(domain.dual_vertices());
    let mut dirs = half_set(domain.primal_vertices());
    for e in direction_grid(domain.dim(), opts.grid) {
        push_new(&mut dirs, e);
    }
    let r = restricted_by(phi, &w, &dirs, q, false)?;
    Ok(root_of(&Bounds::exact(r.mass), q).lower)
}

/// `π_q` of the identity `E → (E, φ)`.
pub fn q_summing_functionals(
    target: &LinearTarget,
    q: &Rational,
    caps: &Caps,
    opts: &SummingOptions,
) -> Result<QSumming> {
    check_exponent(q)?;
    let w = half_set(target.domain.dual_vertices());
    let ls = half_set(&target.functionals);
    if ls.is_empty() {
        return Ok(zero_result(q));
    }
    let target = LinearTarget { domain: target.domain.clone(), functionals: ls.clone() };
    if q.is_one() {
        one_summing(&target, &w, &ls, caps)
    } else if *q == int(2) {
        two_summing(&target, &w, &ls, caps, opts)
    } else {
        general_summing(&target, &w, &ls, q, caps, opts)
    }
}

/// `π_q(v)` with its domination certificate.
pub fn q_summing(v: &LinearMap, q: &Rational, caps: &Caps) -> Result<QSumming> {
    q_summing_functionals(&LinearTarget::from_map(v), q, caps, &SummingOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn scalar_identity_is_one() {
        let s = PolyhedralNorm::scalar();
        let id = LinearMap::identity(&s);
        for q in [int(1), int(2), ratio(3, 2)] {
            let r = q_summing(&id, &q, &Caps::default()).unwrap();
            assert!(r.value.lower <= int(1) && int(1) <= r.value.upper, "q = {q}");
        }
        assert!(q_summing(&id, &int(1), &Caps::default()).unwrap().exact);
    }

    #[test]
    fn zero_map() {
        let l1 = PolyhedralNorm::l1(2).unwrap();
        let z = LinearMap::new(l1.clone(), l1, Matrix::zeros(2, 2)).unwrap();
        assert_eq!(q_summing(&z, &int(1), &Caps::default()).unwrap().value, Bounds::exact(int(0)));
    }

    #[test]
    fn identity_on_l1_two() {
        let l1 = PolyhedralNorm::l1(2).unwrap();
        let r = q_summing(&LinearMap::identity(&l1), &int(1), &Caps::default()).unwrap();
        assert_eq!(r.value, Bounds::exact(int(2)));
        let linf = PolyhedralNorm::linf(2).unwrap();
        let r = q_summing(&LinearMap::identity(&linf), &int(1), &Caps::default()).unwrap();
        assert_eq!(r.value, Bounds::exact(int(2)));
    }

    #[test]
    fn two_summing_identity_l2_like() {
        // π_2(id: ℓ∞^2 → ℓ∞^2) = √2: Q must dominate e1 e1ᵀ and e2 e2ᵀ.
        let linf = PolyhedralNorm::linf(2).unwrap();
        let r = q_summing(&LinearMap::identity(&linf), &int(2), &Caps::default()).unwrap();
        let sqrt2 = rational::root_bounds(&int(2), 2);
        assert!(r.value.overlaps(&sqrt2), "{}", r.value);
        assert!(r.value.relative_width() < ratio(1, 100_000_000));
    }

    #[test]
    fn rank_one_map_is_its_norm() {
        let l1 = PolyhedralNorm::l1(2).unwrap();
        let linf = PolyhedralNorm::linf(2).unwrap();
        let v = LinearMap::new(l1.clone(), linf.clone(), m(&[&[1, -2], &[2, -4]])).unwrap();
        let r = q_summing(&v, &int(1), &Caps::default()).unwrap();
        assert_eq!(r.value, Bounds::exact(v.norm()));
    }
}
