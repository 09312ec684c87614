//! Size limits shared by every computation.

use crate::error::{Cap, Error, Result};

pub const ENV_PREFIX: &str = "LIPBOX_";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Largest metric space, base point included.
    pub points: usize,
    /// Largest Banach-space dimension.
    pub dim: usize,
    /// Largest vertex (or intermediate ray) count during enumeration.
    pub vertices: usize,
    /// Constraint-generation iterations.
    pub iterations: usize,
    /// Largest ambient dimension handed to vertex enumeration.
    pub enumeration_dim: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { points: 8, dim: 6, vertices: 100_000, iterations: 200, enumeration_dim: 10 }
    }
}

impl Caps {
    /// Defaults overridden by `LIPBOX_CAP_POINTS`, `LIPBOX_CAP_DIM`,
    /// `LIPBOX_CAP_VERTICES` and `LIPBOX_CAP_ITERS`.
    pub fn from_env() -> Result<Self> {
        Self::from_lookup(|key| std::env::var(key).ok())
    }

    pub fn from_lookup(lookup: impl Fn(&str) -> Option<String>) -> Result<Self> {
        let mut caps = Caps::default();
        let fields: [(&str, &mut usize); 4] = [
            ("CAP_POINTS", &mut caps.points),
            ("CAP_DIM", &mut caps.dim),
            ("CAP_VERTICES", &mut caps.vertices),
            ("CAP_ITERS", &mut caps.iterations),
        ];
        for (suffix, slot) in fields {
            let key = format!("{ENV_PREFIX}{suffix}");
            if let Some(raw) = lookup(&key) {
                *slot = raw
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("{key} must be a non-negative integer, got {raw:?}")))?;
            }
        }
        Ok(caps)
    }

    pub fn check(&self, cap: Cap, value: usize) -> Result<()> {
        let limit = match cap {
            Cap::Points => self.points,
            Cap::Dimension => self.dim,
            Cap::Vertices => self.vertices,
            Cap::Iterations => self.iterations,
        };
        if value > limit {
            Err(Error::CapExceeded { cap, limit, value })
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_overrides() {
        let caps = Caps::from_lookup(|k| (k == "LIPBOX_CAP_POINTS").then(|| "5".to_string())).unwrap();
        assert_eq!(caps.points, 5);
        assert_eq!(caps.dim, 6);
        assert!(Caps::from_lookup(|k| (k == "LIPBOX_CAP_DIM").then(|| "x".to_string())).is_err());
    }

    #[test]
    fn check_reports_limit() {
        let err = Caps::default().check(Cap::Points, 9).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { cap: Cap::Points, limit: 8, value: 9 }));
    }
}
