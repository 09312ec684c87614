//! Summing norms through Pietsch-type measure programs.
//!
//! Every summing norm here is `inf C` over probability measures on the
//! vertices of a dual ball. The integrands (`|f(x) − f(y)|^p`, `|w(e)|^q`)
//! are convex in the functional, so pushing mass to extreme points can only
//! enlarge each integral: the vertex-supported program attains the true
//! infimum.

mod dominated;
mod linear;
mod pietsch;
mod verify;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::rational::{self, serde_rational, serde_vec, serde_vec2, Bounds, Rational};

pub use dominated::{
    dominated_lower_bound, dominated_two_measure, dominated_via_a, dominated_via_b, seminorm_functionals,
    DominatedResult, Route, SequenceSample, TwoMeasureResult,
};
pub use linear::{q_summing, q_summing_functionals, LinearTarget, QSumming};
pub use pietsch::{lipschitz_p_summing, pietsch_lipschitz, PSumming};
pub use verify::{verify_certificate, Subject, Verification};

/// Finite probability measure: `weights[i]` sits on `support[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Measure {
    #[serde(with = "serde_vec2")]
    pub support: Vec<Vector>,
    #[serde(with = "serde_vec")]
    pub weights: Vec<Rational>,
}

impl Measure {
    /// Normalizes nonnegative masses to total one, dropping zero atoms.
    /// An all-zero mass yields the empty measure.
    pub fn normalized(support: &[Vector], mass: &[Rational]) -> Measure {
        let total: Rational = mass.iter().sum();
        let mut out = Measure { support: Vec::new(), weights: Vec::new() };
        if total == rational::zero() {
            return out;
        }
        for (s, m) in support.iter().zip(mass) {
            if *m != rational::zero() {
                out.support.push(s.clone());
                out.weights.push(m / &total);
            }
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }
}

/// A Pietsch-type domination witness, checkable without the solver.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DominationCertificate {
    /// `d(R x, R y)^p <= C^p Σ μ_f |f(x) − f(y)|^p` for every pair.
    LipschitzP {
        #[serde(with = "serde_rational")]
        exponent: Rational,
        measure: Measure,
        #[serde(with = "serde_rational")]
        constant: Rational,
    },
    /// `‖v e‖^q <= C^q Σ μ_w |w(e)|^q` for every `e`; `directions` are the
    /// constraints that were generated.
    LinearQ {
        #[serde(with = "serde_rational")]
        exponent: Rational,
        measure: Measure,
        #[serde(with = "serde_rational")]
        constant: Rational,
        #[serde(with = "serde_vec2")]
        directions: Vec<Vector>,
    },
    /// `‖T(x,e) − T(y,e)‖ <= C (Σ μ1 |f(x)−f(y)|^p)^{1/p} (Σ μ2 |w(e)|^q)^{1/q}`.
    TwoMeasure {
        #[serde(with = "serde_rational")]
        p: Rational,
        #[serde(with = "serde_rational")]
        q: Rational,
        lipschitz: Measure,
        linear: Measure,
        #[serde(with = "serde_rational")]
        constant: Rational,
    },
}

impl DominationCertificate {
    pub fn kind(&self) -> &'static str {
        match self {
            DominationCertificate::LipschitzP { .. } => "lipschitz-p",
            DominationCertificate::LinearQ { .. } => "linear-q",
            DominationCertificate::TwoMeasure { .. } => "two-measure",
        }
    }

    pub fn constant(&self) -> &Rational {
        match self {
            DominationCertificate::LipschitzP { constant, .. }
            | DominationCertificate::LinearQ { constant, .. }
            | DominationCertificate::TwoMeasure { constant, .. } => constant,
        }
    }

    /// Same certificate with a different constant (used to probe verification).
    pub fn with_constant(&self, c: Rational) -> Self {
        let mut out = self.clone();
        match &mut out {
            DominationCertificate::LipschitzP { constant, .. }
            | DominationCertificate::LinearQ { constant, .. }
            | DominationCertificate::TwoMeasure { constant, .. } => *constant = c,
        }
        out
    }
}

/// Tuning for the approximate regime.
#[derive(Clone, Debug)]
pub struct SummingOptions {
    /// Stop when `(upper − lower)/upper` drops below this.
    pub tolerance: Rational,
    /// Half-width of the integer direction grid used for sampling.
    pub grid: i64,
}

impl Default for SummingOptions {
    fn default() -> Self {
        SummingOptions { tolerance: rational::ratio(1, 1_000_000_000), grid: 3 }
    }
}

/// Exponents must be rationals `>= 1`.
pub fn check_exponent(p: &Rational) -> Result<()> {
    if *p < rational::one() {
        return Err(Error::InvalidExponent(rational::format(p)));
    }
    Ok(())
}

/// Collapses `±v` pairs to one representative (first nonzero entry positive);
/// every integrand here is even in the functional.
pub(crate) fn half_set(vs: &[Vector]) -> Vec<Vector> {
    let mut out: Vec<Vector> = vs
        .iter()
        .filter_map(|v| {
            let lead = v.iter().find(|x| **x != rational::zero())?;
            Some(if *lead > rational::zero() { v.clone() } else { crate::linalg::neg(v) })
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Integer vectors with entries in `[-k, k]`, zero excluded, one of each `±` pair.
pub(crate) fn direction_grid(dim: usize, k: i64) -> Vec<Vector> {
    let side = (2 * k + 1) as usize;
    let total = side.pow(dim as u32);
    let all: Vec<Vector> = (0..total)
        .map(|mut idx| {
            (0..dim)
                .map(|_| {
                    let c = (idx % side) as i64 - k;
                    idx /= side;
                    rational::int(c)
                })
                .collect()
        })
        .collect();
    half_set(&all)
}

/// Enclosure of `b^(1/p)` from an enclosure of `b`.
pub(crate) fn root_of(b: &Bounds, p: &Rational) -> Bounds {
    rational::inverse_pow_bounds(b, p)
}
