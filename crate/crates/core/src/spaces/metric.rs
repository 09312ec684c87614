use std::fmt;

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{Fmt, Rational};

/// A finite pointed metric space. Point 0 is the base point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<Vec<Rational>>,
}

/// One broken metric axiom, named by the labels involved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MetricViolation {
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    Negative {
        x: String,
        y: String,
    },
    NonzeroDiagonal {
        x: String,
    },
    Asymmetric {
        x: String,
        y: String,
    },
    ZeroDistance {
        x: String,
        y: String,
    },
    /// `d(x, z) > d(x, y) + d(y, z)`.
    Triangle {
        x: String,
        y: String,
        z: String,
    },
}

impl fmt::Display for MetricViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricViolation::NotSquare { row, len, expected } => {
                write!(f, "row {row} has {len} entries, expected {expected}")
            }
            MetricViolation::Negative { x, y } => write!(f, "negative distance d({x},{y})"),
            MetricViolation::NonzeroDiagonal { x } => write!(f, "d({x},{x}) is not zero"),
            MetricViolation::Asymmetric { x, y } => write!(f, "asymmetry: d({x},{y}) != d({y},{x})"),
            MetricViolation::ZeroDistance { x, y } => write!(f, "zero distance between distinct points {x} and {y}"),
            MetricViolation::Triangle { x, y, z } => write!(f, "triangle violation ({x},{y},{z})"),
        }
    }
}

/// `"0", "a", "b", …`; past `z` the labels become `p26, p27, …`.
pub fn default_labels(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| match i {
            0 => "0".to_string(),
            1..=26 => ((b'a' + (i - 1) as u8) as char).to_string(),
            _ => format!("p{i}"),
        })
        .collect()
}

/// Checks every metric axiom and reports all violations at once.
#[allow(clippy::needless_range_loop)]
pub fn validate_metric(labels: Vec<String>, dist: Vec<Vec<Rational>>) -> Result<FiniteMetricSpace> {
    let n = dist.len();
    if labels.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: labels.len() });
    }
    let mut bad = Vec::new();
    for (row, r) in dist.iter().enumerate() {
        if r.len() != n {
            bad.push(MetricViolation::NotSquare { row, len: r.len(), expected: n });
        }
    }
    if !bad.is_empty() {
        return Err(Error::InvalidMetric(bad));
    }
    let l = |i: usize| labels[i].clone();
    for x in 0..n {
        if !dist[x][x].is_zero() {
            bad.push(MetricViolation::NonzeroDiagonal { x: l(x) });
        }
        for y in (x + 1)..n {
            if dist[x][y] != dist[y][x] {
                bad.push(MetricViolation::Asymmetric { x: l(x), y: l(y) });
            }
            if dist[x][y].is_negative() || dist[y][x].is_negative() {
                bad.push(MetricViolation::Negative { x: l(x), y: l(y) });
            } else if dist[x][y].is_zero() || dist[y][x].is_zero() {
                bad.push(MetricViolation::ZeroDistance { x: l(x), y: l(y) });
            }
        }
    }
    for x in 0..n {
        for z in (x + 1)..n {
            for y in 0..n {
                if y != x && y != z && dist[x][z] > &dist[x][y] + &dist[y][z] {
                    bad.push(MetricViolation::Triangle { x: l(x), y: l(y), z: l(z) });
                }
            }
        }
    }
    if bad.is_empty() {
        Ok(FiniteMetricSpace { labels, dist })
    } else {
        Err(Error::InvalidMetric(bad))
    }
}

impl FiniteMetricSpace {
    pub fn new(labels: Vec<String>, dist: Vec<Vec<Rational>>) -> Result<Self> {
        validate_metric(labels, dist)
    }

    /// Points on the real line with the given positions; position 0 should be 0.
    pub fn line(positions: &[Rational]) -> Result<Self> {
        let dist = positions.iter().map(|p| positions.iter().map(|q| (p - q).abs()).collect()).collect();
        validate_metric(default_labels(positions.len()), dist)
    }

    /// Number of points, base point included.
    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    /// Number of non-base points, the dimension of the free space.
    pub fn free_dim(&self) -> usize {
        self.len().saturating_sub(1)
    }

    pub fn d(&self, x: usize, y: usize) -> &Rational {
        &self.dist[x][y]
    }

    pub fn distances(&self) -> &[Vec<Rational>] {
        &self.dist
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Unordered pairs `x < y`, base point included.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |x| ((x + 1)..n).map(move |y| (x, y)))
    }
}

impl fmt::Display for FiniteMetricSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (x, row) in self.dist.iter().enumerate() {
            write!(f, "{}:", self.labels[x])?;
            for d in row {
                write!(f, " {}", Fmt(d))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn table(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn line_metric_is_valid() {
        let x3 = validate_metric(default_labels(3), table(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]])).unwrap();
        assert_eq!(x3.len(), 3);
        assert_eq!(x3.index_of("b"), Some(2));
        assert_eq!(x3.pairs().count(), 3);
    }

    #[test]
    fn triangle_violation_names_the_triple() {
        let err = validate_metric(default_labels(3), table(&[&[0, 1, 1], &[1, 0, 3], &[1, 3, 0]])).unwrap_err();
        let Error::InvalidMetric(v) = err else { panic!("wrong error") };
        assert_eq!(v, vec![MetricViolation::Triangle { x: "a".into(), y: "0".into(), z: "b".into() }]);
        assert_eq!(v[0].to_string(), "triangle violation (a,0,b)");
    }

    #[test]
    fn zero_distance_and_asymmetry() {
        let err = validate_metric(default_labels(3), table(&[&[0, 1, 1], &[1, 0, 0], &[1, 0, 0]])).unwrap_err();
        let Error::InvalidMetric(v) = err else { panic!("wrong error") };
        assert!(v.contains(&MetricViolation::ZeroDistance { x: "a".into(), y: "b".into() }));
        let err = validate_metric(default_labels(2), table(&[&[0, 1], &[2, 0]])).unwrap_err();
        let Error::InvalidMetric(v) = err else { panic!("wrong error") };
        assert!(v.contains(&MetricViolation::Asymmetric { x: "0".into(), y: "a".into() }));
    }

    #[test]
    fn collinear_points_are_allowed() {
        assert!(FiniteMetricSpace::line(&[int(0), int(1), int(3)]).is_ok());
    }
}
