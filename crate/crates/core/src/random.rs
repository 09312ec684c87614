//! Seeded random instances. Everything is drawn from a ChaCha stream so a
//! seed reproduces the same instance on every platform.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::Caps;
use crate::error::{Cap, Result};
use crate::linalg::{Matrix, Vector};
use crate::operators::{LinearMap, LipLinearOperator, LipschitzMap, TwoLipschitzTable};
use crate::rational::{self, Rational};
use crate::spaces::{default_labels, lip_constant, FiniteMetricSpace, PolyhedralNorm};

pub type InstanceRng = ChaCha8Rng;

pub fn rng(seed: u64) -> InstanceRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small rational `k/d` with `|k| <= range`, `d ∈ {1, 2, 3}`.
pub fn rational(rng: &mut InstanceRng, range: i64) -> Rational {
    let d = rng.gen_range(1..=3);
    rational::ratio(rng.gen_range(-range..=range), d)
}

pub fn vector(rng: &mut InstanceRng, n: usize, range: i64) -> Vector {
    (0..n).map(|_| rational(rng, range)).collect()
}

pub fn matrix(rng: &mut InstanceRng, rows: usize, cols: usize, range: i64) -> Matrix {
    let mut m = Matrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, rational(rng, range));
        }
    }
    m
}

/// Shortest-path closure of a random symmetric table with entries in
/// `1..=max`; the result is a metric by construction.
#[allow(clippy::needless_range_loop)]
pub fn metric(rng: &mut InstanceRng, n: usize, caps: &Caps) -> Result<FiniteMetricSpace> {
    caps.check(Cap::Points, n)?;
    let max = 6;
    let mut d = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = rng.gen_range(1..=max);
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    let dist = d.iter().map(|row| row.iter().map(|&x| rational::int(x)).collect()).collect();
    FiniteMetricSpace::new(default_labels(n), dist)
}

/// `ℓ_1^d`, `ℓ_∞^d`, or the symmetric hull of the unit vectors plus a few
/// random integer functionals.
pub fn norm(rng: &mut InstanceRng, d: usize, caps: &Caps) -> Result<PolyhedralNorm> {
    caps.check(Cap::Dimension, d)?;
    match rng.gen_range(0..3) {
        0 => PolyhedralNorm::l1(d),
        1 => PolyhedralNorm::linf(d),
        _ => {
            let mut w: Vec<Vector> = Vec::new();
            for i in 0..d {
                let e = crate::linalg::unit(d, i);
                w.push(crate::linalg::neg(&e));
                w.push(e);
            }
            for _ in 0..rng.gen_range(1..=2) {
                let v: Vector = (0..d).map(|_| rational::int(rng.gen_range(-1..=1))).collect();
                if crate::linalg::is_zero(&v) {
                    continue;
                }
                w.push(crate::linalg::neg(&v));
                w.push(v);
            }
            PolyhedralNorm::with_caps(w, caps)
        }
    }
}

pub fn operator(
    rng: &mut InstanceRng,
    space: &FiniteMetricSpace,
    domain: &PolyhedralNorm,
    codomain: &PolyhedralNorm,
) -> LipLinearOperator {
    let table = (0..space.free_dim()).map(|_| matrix(rng, codomain.dim(), domain.dim(), 3)).collect();
    LipLinearOperator::new(space.clone(), domain.clone(), codomain.clone(), table).expect("shapes match")
}

pub fn lipschitz_map(rng: &mut InstanceRng, space: &FiniteMetricSpace, codomain: &PolyhedralNorm) -> LipschitzMap {
    let values = (0..space.free_dim()).map(|_| vector(rng, codomain.dim(), 3)).collect();
    LipschitzMap::new(space.clone(), codomain.clone(), values).expect("shapes match")
}

pub fn linear_map(rng: &mut InstanceRng, domain: &PolyhedralNorm, codomain: &PolyhedralNorm) -> LinearMap {
    LinearMap::new(domain.clone(), codomain.clone(), matrix(rng, codomain.dim(), domain.dim(), 3))
        .expect("shapes match")
}

/// A nonzero function on the non-base points, scaled into the Lipschitz unit sphere.
pub fn lipschitz_function(rng: &mut InstanceRng, space: &FiniteMetricSpace) -> Vector {
    loop {
        let f = vector(rng, space.free_dim(), 3);
        let l = lip_constant(space, &f);
        if l != rational::zero() {
            return f.iter().map(|x| x / &l).collect();
        }
    }
}

/// A table on `X × Y` vanishing on both base axes.
pub fn two_lipschitz(
    rng: &mut InstanceRng,
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    codomain: &PolyhedralNorm,
) -> TwoLipschitzTable {
    let values = (0..x.len())
        .map(|i| {
            (0..y.len())
                .map(|j| {
                    if i == 0 || j == 0 {
                        crate::linalg::zeros(codomain.dim())
                    } else {
                        vector(rng, codomain.dim(), 3)
                    }
                })
                .collect()
        })
        .collect();
    TwoLipschitzTable::new(x.clone(), y.clone(), codomain.clone(), values).expect("base axes vanish")
}

/// A random base-point-preserving map `X → Y` by index.
pub fn point_image(rng: &mut InstanceRng, from: usize, to: usize) -> Vec<usize> {
    let mut image = vec![0];
    let choices: Vec<usize> = (0..to).collect();
    for _ in 1..from {
        image.push(*choices.choose(rng).expect("nonempty"));
    }
    image
}
