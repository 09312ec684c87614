//! Vertex enumeration by the double description method.
//!
//! The polytope `{x : A x <= b}` is homogenized to the cone
//! `{(t, x) : b t - A x >= 0, t >= 0}`; its extreme rays with `t > 0` are the
//! vertices. Rays are kept as primitive integer vectors and adjacency uses the
//! combinatorial zero-set test.

use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};

use crate::config::Caps;
use crate::error::{Cap, Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::rational::Rational;

/// `{x ∈ ℝ^dim : rows[i] · x <= rhs[i]}`.
#[derive(Clone, Debug)]
pub struct Polytope {
    dim: usize,
    rows: Vec<Vector>,
    rhs: Vec<Rational>,
}

impl Polytope {
    pub fn new(dim: usize, rows: Vec<Vector>, rhs: Vec<Rational>) -> Result<Self> {
        if rows.len() != rhs.len() {
            return Err(Error::DimensionMismatch { expected: rows.len(), found: rhs.len() });
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.len() });
        }
        Ok(Polytope { dim, rows, rhs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Vector] {
        &self.rows
    }

    pub fn rhs(&self) -> &[Rational] {
        &self.rhs
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.rows.iter().zip(&self.rhs).all(|(a, b)| linalg::dot(a, x) <= *b)
    }

    /// Indices of the rows tight at `x`.
    pub fn tight_rows(&self, x: &[Rational]) -> Vec<usize> {
        (0..self.rows.len()).filter(|&i| linalg::dot(&self.rows[i], x) == self.rhs[i]).collect()
    }

    /// Same polytope with rows reordered; `order` must be a permutation.
    pub fn permuted(&self, order: &[usize]) -> Polytope {
        Polytope {
            dim: self.dim,
            rows: order.iter().map(|&i| self.rows[i].clone()).collect(),
            rhs: order.iter().map(|&i| self.rhs[i].clone()).collect(),
        }
    }
}

#[derive(Clone, Debug)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(bits: usize) -> Self {
        BitSet(vec![0; bits.div_ceil(64)])
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn and(&self, other: &BitSet) -> BitSet {
        BitSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn is_subset(&self, other: &BitSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
}

#[derive(Clone, Debug)]
struct Ray {
    coords: Vec<BigInt>,
    zeros: BitSet,
}

fn primitive(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() || g.is_one() {
        v
    } else {
        v.into_iter().map(|x| x / &g).collect()
    }
}

/// Clears denominators of a rational row.
fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let l = row.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    primitive(row.iter().map(|x| x.numer() * (&l / x.denom())).collect())
}

fn dot_int(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).fold(BigInt::zero(), |acc, (x, y)| acc + x * y)
}

/// Exact vertex set of a bounded, full-dimensional polytope, sorted
/// lexicographically.
pub fn enumerate_vertices(p: &Polytope, caps: &Caps) -> Result<Vec<Vector>> {
    let d = p.dim;
    if d > caps.enumeration_dim {
        return Err(Error::CapExceeded { cap: Cap::Dimension, limit: caps.enumeration_dim, value: d });
    }
    if d == 0 {
        return if p.rhs.iter().all(|b| !b.is_negative()) { Ok(vec![Vec::new()]) } else { Err(Error::EmptyPolytope) };
    }
    let dd = d + 1;

    // Homogenized constraint rows h · (t, x) >= 0; row 0 is t >= 0.
    let mut h: Vec<Vec<Rational>> = Vec::with_capacity(p.rows.len() + 1);
    h.push(linalg::unit(dd, 0));
    for (a, b) in p.rows.iter().zip(&p.rhs) {
        let mut row = Vec::with_capacity(dd);
        row.push(b.clone());
        row.extend(a.iter().map(|x| -x.clone()));
        h.push(row);
    }
    let m = h.len();
    let hint: Vec<Vec<BigInt>> = h.iter().map(|r| integer_row(r)).collect();

    // Greedy basis of dd independent rows.
    let mut basis: Vec<usize> = Vec::with_capacity(dd);
    let mut basis_rows: Vec<Vector> = Vec::with_capacity(dd);
    for (i, row) in h.iter().enumerate() {
        basis_rows.push(row.clone());
        if linalg::rank(&basis_rows) == basis_rows.len() {
            basis.push(i);
            if basis.len() == dd {
                break;
            }
        } else {
            basis_rows.pop();
        }
    }
    if basis.len() < dd {
        // The inequality matrix has a nontrivial kernel: a line or nothing.
        return Err(Error::UnboundedPolytope);
    }
    let hs = Matrix::from_rows(basis_rows).expect("square basis");
    let inv = linalg::inverse(&hs).expect("independent rows");

    let mut rays: Vec<Ray> = (0..dd)
        .map(|j| {
            let col = inv.column(j);
            let mut zeros = BitSet::new(m);
            for (k, &row) in basis.iter().enumerate() {
                if k != j {
                    zeros.insert(row);
                }
            }
            Ray { coords: integer_row(&col), zeros }
        })
        .collect();

    let in_basis = {
        let mut s = vec![false; m];
        for &b in &basis {
            s[b] = true;
        }
        s
    };
    for i in (0..m).filter(|&i| !in_basis[i]) {
        let row = &hint[i];
        let values: Vec<BigInt> = rays.iter().map(|r| dot_int(row, &r.coords)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_negative()).collect();
        if neg.is_empty() {
            for (k, r) in rays.iter_mut().enumerate() {
                if values[k].is_zero() {
                    r.zeros.insert(i);
                }
            }
            continue;
        }
        let mut fresh: Vec<Ray> = Vec::new();
        for &a in &pos {
            for &b in &neg {
                let common = rays[a].zeros.and(&rays[b].zeros);
                if common.count() + 2 < dd {
                    continue;
                }
                let adjacent = rays.iter().enumerate().all(|(k, r)| k == a || k == b || !common.is_subset(&r.zeros));
                if !adjacent {
                    continue;
                }
                let sa = &values[a];
                let sb = -&values[b];
                let coords: Vec<BigInt> =
                    rays[a].coords.iter().zip(&rays[b].coords).map(|(x, y)| &sb * x + sa * y).collect();
                let mut zeros = common;
                zeros.insert(i);
                fresh.push(Ray { coords: primitive(coords), zeros });
            }
        }
        let mut next: Vec<Ray> = Vec::with_capacity(pos.len() + fresh.len());
        for (k, mut r) in rays.into_iter().enumerate() {
            if values[k].is_positive() {
                next.push(r);
            } else if values[k].is_zero() {
                r.zeros.insert(i);
                next.push(r);
            }
        }
        next.extend(fresh);
        if next.len() > caps.vertices {
            return Err(Error::CapExceeded { cap: Cap::Vertices, limit: caps.vertices, value: next.len() });
        }
        rays = next;
    }

    let mut vertices: Vec<Vector> = Vec::with_capacity(rays.len());
    for r in &rays {
        let t = &r.coords[0];
        if t.is_zero() {
            return Err(Error::UnboundedPolytope);
        }
        let t = Rational::from_integer(t.clone());
        vertices.push(r.coords[1..].iter().map(|x| Rational::from_integer(x.clone()) / &t).collect());
    }
    if vertices.is_empty() {
        return Err(Error::EmptyPolytope);
    }
    vertices.sort();
    vertices.dedup();

    let base = vertices[0].clone();
    let diffs: Vec<Vector> = vertices[1..].iter().map(|v| linalg::sub(v, &base)).collect();
    let rank = linalg::rank(&diffs);
    if rank < d {
        return Err(Error::DegeneratePolytope { rank, dim: d });
    }
    Ok(vertices)
}
