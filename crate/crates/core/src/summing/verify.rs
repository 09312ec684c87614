//! Solver-free re-checking of domination certificates.
//!
//! Only exact arithmetic on the certificate data is used. Where the
//! constraint family is infinite it is reduced to a finite set that is
//! provably sufficient (`exhaustive = true`); otherwise the check is a
//! sample and says so.

use num::{Signed, Zero};

use super::{direction_grid, root_of, DominationCertificate, LinearTarget, Measure};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::operators::{LipLinearOperator, LipschitzMap};
use crate::rational::{self, pow_bounds, Bounds, Rational};
use crate::spaces::{in_lipschitz_ball, value_at, FiniteMetricSpace, Norm};

/// What a certificate claims to dominate.
#[derive(Clone, Copy, Debug)]
pub enum Subject<'a> {
    /// Target distances in `pairs()` order.
    Distances {
        space: &'a FiniteMetricSpace,
        targets: &'a [Bounds],
    },
    Map(&'a LipschitzMap),
    Linear(&'a LinearTarget),
    Operator(&'a LipLinearOperator),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub passed: bool,
    /// True when the checked constraints imply all of them.
    pub exhaustive: bool,
    pub checked: usize,
    pub violation: Option<String>,
}

impl Verification {
    fn new(exhaustive: bool) -> Self {
        Verification { passed: true, exhaustive, checked: 0, violation: None }
    }

    fn fail(&mut self, why: String) {
        if self.passed {
            self.passed = false;
            self.violation = Some(why);
        }
    }
}

pub fn verify_certificate(cert: &DominationCertificate, subject: Subject<'_>) -> Result<Verification> {
    match (cert, subject) {
        (DominationCertificate::LipschitzP { exponent, measure, constant }, Subject::Distances { space, targets }) => {
            Ok(check_lipschitz(space, targets, exponent, measure, constant))
        }
        (DominationCertificate::LipschitzP { exponent, measure, constant }, Subject::Map(r)) => {
            let targets = super::pietsch::map_distances(r)?;
            Ok(check_lipschitz(&r.space, &targets, exponent, measure, constant))
        }
        (DominationCertificate::LinearQ { exponent, measure, constant, directions }, Subject::Linear(target)) => {
            Ok(check_linear(target, exponent, measure, constant, directions))
        }
        (DominationCertificate::TwoMeasure { p, q, lipschitz, linear, constant }, Subject::Operator(t)) => {
            check_two(t, p, q, lipschitz, linear, constant)
        }
        (c, _) => Err(Error::InvalidOperator(format!("a {} certificate does not apply to this subject", c.kind()))),
    }
}

fn check_measure(v: &mut Verification, measure: &Measure) {
    if measure.weights.iter().any(Signed::is_negative) {
        v.fail("negative weight".into());
    }
    if !measure.is_empty() && measure.weights.iter().sum::<Rational>() != rational::one() {
        v.fail("weights do not sum to one".into());
    }
}

/// `Σ μ |h(s)|^p` rounded down, for an enclosure-free lower estimate.
fn integral_lower<'a>(measure: &'a Measure, p: &Rational, h: impl Fn(&'a Vector) -> Rational) -> Rational {
    measure.support.iter().zip(&measure.weights).map(|(s, w)| w * pow_bounds(&h(s).abs(), p).lower).sum()
}

fn check_lipschitz(
    space: &FiniteMetricSpace,
    targets: &[Bounds],
    p: &Rational,
    measure: &Measure,
    c: &Rational,
) -> Verification {
    let mut v = Verification::new(true);
    check_measure(&mut v, measure);
    if let Some(k) = measure.support.iter().position(|f| f.len() != space.free_dim() || !in_lipschitz_ball(space, f)) {
        v.fail(format!("support point {k} is outside the Lipschitz unit ball"));
    }
    let cp = pow_bounds(c, p).lower;
    for ((x, y), t) in space.pairs().zip(targets) {
        v.checked += 1;
        let lhs = pow_bounds(&t.upper, p).upper;
        let rhs = &cp * integral_lower(measure, p, |f| value_at(f, x) - value_at(f, y));
        if lhs > rhs {
            v.fail(format!("pair ({}, {})", space.label(x), space.label(y)));
        }
    }
    if targets.len() != space.pairs().count() {
        v.fail("target count does not match the pairs".into());
    }
    v
}

/// Directions spanning the extreme rays of the hyperplane arrangement
/// `{e : h·e = 0}`; when the normals span, each cell is a pointed cone
/// generated by these.
pub(crate) fn arrangement_rays(normals: &[Vector], n: usize) -> Vec<Vector> {
    let mut rays: Vec<Vector> = Vec::new();
    let m = normals.len();
    if n == 1 {
        return vec![vec![rational::one()]];
    }
    let mut idx: Vec<usize> = (0..n - 1).collect();
    if m < n - 1 {
        return rays;
    }
    loop {
        let rows: Vec<Vector> = idx.iter().map(|&i| normals[i].clone()).collect();
        let ns = linalg::null_space(&rows, n);
        if ns.len() == 1 {
            let r = linalg::normalize_max(&ns[0]);
            if !rays.contains(&r) && !rays.contains(&linalg::neg(&r)) {
                rays.push(r);
            }
        }
        // next combination
        let mut i = n - 1;
        loop {
            if i == 0 {
                return rays;
            }
            i -= 1;
            if idx[i] < m - (n - 1) + i {
                idx[i] += 1;
                for j in i + 1..n - 1 {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn check_linear(
    target: &LinearTarget,
    q: &Rational,
    measure: &Measure,
    c: &Rational,
    directions: &[Vector],
) -> Verification {
    let domain = &target.domain;
    let n = domain.dim();
    let one = rational::one();
    let exhaustive = *q == one || *q == rational::int(2);
    let mut v = Verification::new(exhaustive);
    check_measure(&mut v, measure);
    if let Some(k) = measure.support.iter().position(|w| w.len() != n || domain.dual_eval(w) > one) {
        v.fail(format!("support point {k} is outside the dual unit ball"));
    }
    let point_check = |v: &mut Verification, e: &Vector| {
        v.checked += 1;
        let lhs = pow_bounds(&target.eval(e), q).upper;
        let rhs = pow_bounds(c, q).lower * integral_lower(measure, q, |w| linalg::dot(w, e));
        if lhs > rhs {
            v.fail(format!("direction {}", fmt_vec(e)));
        }
    };
    if *q == one {
        // Each |ℓ·e| − C Σ μ |w·e| is linear on the cells of the arrangement
        // cut out by the support and the dual vertices (which span).
        let mut normals = domain.dual_vertices().to_vec();
        normals.extend(measure.support.iter().cloned());
        for e in arrangement_rays(&normals, n) {
            point_check(&mut v, &e);
        }
    } else if *q == rational::int(2) {
        // ‖ℓ·e‖² <= eᵀ Q e for all e  ⇔  ℓ ∈ range Q and ℓᵀ Q⁺ ℓ <= 1.
        let weights: Vec<Rational> = measure.weights.iter().map(|w| w * c * c).collect();
        let gram = super::linear::gram(&measure.support, &weights, n);
        for l in &target.functionals {
            v.checked += 1;
            if !within_quadratic(&gram, l) {
                v.fail(format!("functional {} escapes the quadratic form", fmt_vec(l)));
            }
        }
    } else {
        let mut dirs: Vec<Vector> = directions.to_vec();
        dirs.extend(domain.primal_vertices().iter().cloned());
        dirs.extend(direction_grid(n, 3));
        for e in &dirs {
            point_check(&mut v, e);
        }
    }
    for e in directions {
        point_check(&mut v, e);
    }
    v
}

/// `ℓᵀ Q⁺ ℓ <= 1` with `ℓ ∈ range Q`, for symmetric positive semidefinite `Q`.
fn within_quadratic(q: &Matrix, l: &[Rational]) -> bool {
    if linalg::is_zero(l) {
        return true;
    }
    // Any solution works: solutions differ by kernel vectors, orthogonal to ℓ.
    linalg::solve(q, l).is_some_and(|x| linalg::dot(l, &x) <= rational::one())
}

fn check_two(
    t: &LipLinearOperator,
    p: &Rational,
    q: &Rational,
    lipschitz: &Measure,
    linear: &Measure,
    c: &Rational,
) -> Result<Verification> {
    // For q = 1 the right side is linear in e on each cell of the arrangement
    // of the linear support and the dual vertices, and the left side is
    // convex, so the extreme rays of the cells are a complete check.
    let exhaustive = *q == rational::one();
    let mut v = Verification::new(exhaustive);
    check_measure(&mut v, lipschitz);
    check_measure(&mut v, linear);
    if lipschitz.support.iter().any(|f| f.len() != t.space.free_dim() || !in_lipschitz_ball(&t.space, f)) {
        v.fail("Lipschitz support is outside the unit ball".into());
    }
    if linear.support.iter().any(|w| w.len() != t.domain.dim() || t.domain.dual_eval(w) > rational::one()) {
        v.fail("linear support is outside the dual unit ball".into());
    }
    let dirs: Vec<Vector> = if exhaustive {
        let mut normals = t.domain.dual_vertices().to_vec();
        normals.extend(linear.support.iter().cloned());
        arrangement_rays(&normals, t.domain.dim())
    } else {
        let mut dirs = t.domain.primal_vertices().to_vec();
        dirs.extend(direction_grid(t.domain.dim(), 2));
        dirs
    };
    for (x, y) in t.space.pairs() {
        let a = root_of(&Bounds::exact(integral_lower(lipschitz, p, |f| value_at(f, x) - value_at(f, y))), p).lower;
        for e in &dirs {
            v.checked += 1;
            let lhs = t.codomain.norm(&linalg::sub(&t.apply(x, e), &t.apply(y, e)))?;
            if lhs.is_zero() {
                continue;
            }
            let b = root_of(&Bounds::exact(integral_lower(linear, q, |w| linalg::dot(w, e))), q).lower;
            if lhs > c * &a * b {
                v.fail(format!("pair ({}, {}) at {}", t.space.label(x), t.space.label(y), fmt_vec(e)));
            }
        }
    }
    Ok(v)
}

fn fmt_vec(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(rational::format).collect();
    format!("({})", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Caps;
    use crate::operators::LinearMap;
    use crate::rational::{int, ratio};
    use crate::spaces::PolyhedralNorm;
    use crate::summing::{lipschitz_p_summing, q_summing};

    #[test]
    fn lipschitz_certificate_round_trip() {
        let x = FiniteMetricSpace::line(&[int(0), int(1), int(3)]).unwrap();
        let r = LipschitzMap::new(x, PolyhedralNorm::l1(2).unwrap(), vec![vec![int(1), int(0)], vec![int(1), int(2)]])
            .unwrap();
        let res = lipschitz_p_summing(&r, &int(1), &Caps::default()).unwrap();
        let ok = verify_certificate(&res.certificate, Subject::Map(&r)).unwrap();
        assert!(ok.passed && ok.exhaustive, "{ok:?}");
        let shrunk = res.certificate.with_constant(res.value.upper * ratio(9, 10));
        assert!(!verify_certificate(&shrunk, Subject::Map(&r)).unwrap().passed);
    }

    #[test]
    fn linear_certificates_q1_q2() {
        let linf = PolyhedralNorm::linf(2).unwrap();
        let v = LinearMap::identity(&linf);
        let target = LinearTarget::from_map(&v);
        for q in [int(1), int(2)] {
            let res = q_summing(&v, &q, &Caps::default()).unwrap();
            let ok = verify_certificate(&res.certificate, Subject::Linear(&target)).unwrap();
            assert!(ok.passed && ok.exhaustive, "q = {q}: {ok:?}");
            let shrunk = res.certificate.with_constant(res.value.lower * ratio(99, 100));
            assert!(!verify_certificate(&shrunk, Subject::Linear(&target)).unwrap().passed, "q = {q}");
        }
    }

    #[test]
    fn arrangement_rays_of_square() {
        let normals = vec![vec![int(1), int(0)], vec![int(0), int(1)], vec![int(1), int(1)]];
        assert_eq!(arrangement_rays(&normals, 2).len(), 3);
    }

    #[test]
    fn mismatched_subject_is_an_error() {
        let linf = PolyhedralNorm::linf(2).unwrap();
        let v = LinearMap::identity(&linf);
        let res = q_summing(&v, &int(1), &Caps::default()).unwrap();
        let x = FiniteMetricSpace::line(&[int(0), int(1)]).unwrap();
        let subject = Subject::Distances { space: &x, targets: &[] };
        assert!(verify_certificate(&res.certificate, subject).is_err());
    }
}
