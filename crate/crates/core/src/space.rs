//! Hilbert-space layout: coin ⊗ x-lattice ⊗ y-lattice.
//!
//! Amplitudes are stored coin-major: the coin label is the slowest axis, so
//! the flat index of `(c, x, y)` is `c·L² + (x+t)·L + (y+t)` with `L = 2t+1`.
//! Operators acting as `F ⊗ 1` on the coin therefore act on contiguous
//! blocks of length `L²`.

use std::fmt;

use crate::error::{Error, Result};

/// A tensor factor of the walk's Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Subsystem {
    Coin,
    X,
    Y,
}

impl fmt::Display for Subsystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subsystem::Coin => write!(f, "coin"),
            Subsystem::X => write!(f, "x"),
            Subsystem::Y => write!(f, "y"),
        }
    }
}

/// Dimensions of a walk with a fixed step budget.
///
/// The lattice covers `x, y ∈ [-t, t]`, which is exactly the region a walk
/// started at the origin can reach in `t` steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HilbertSpec {
    coin_dim: usize,
    steps: usize,
}

impl HilbertSpec {
    pub fn new(coin_dim: usize, steps: usize) -> Result<Self> {
        if coin_dim != 2 && coin_dim != 4 {
            return Err(Error::InvalidArgument(format!(
                "coin dimension must be 2 or 4, got {coin_dim}"
            )));
        }
        Ok(HilbertSpec { coin_dim, steps })
    }

    pub fn coin_dim(&self) -> usize {
        self.coin_dim
    }

    /// Step budget `t`.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Lattice extent per axis, `L = 2t + 1`.
    pub fn extent(&self) -> usize {
        2 * self.steps + 1
    }

    /// Offset mapping coordinate `x` to array index `x + t`.
    pub fn origin_offset(&self) -> i64 {
        self.steps as i64
    }

    /// Number of lattice sites, `L²`.
    pub fn sites(&self) -> usize {
        self.extent() * self.extent()
    }

    /// Total dimension `coin_dim · L²`.
    pub fn dim(&self) -> usize {
        self.coin_dim * self.sites()
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        let t = self.origin_offset();
        x.abs() <= t && y.abs() <= t
    }

    /// Flat index of `(c, x, y)`.
    pub fn index(&self, c: usize, x: i64, y: i64) -> Result<usize> {
        if c >= self.coin_dim {
            return Err(Error::IndexOutOfRange(format!(
                "coin label {c} outside 0..{}",
                self.coin_dim
            )));
        }
        if !self.contains(x, y) {
            return Err(Error::IndexOutOfRange(format!(
                "site ({x}, {y}) outside lattice |x|,|y| <= {}",
                self.steps
            )));
        }
        Ok(self.index_unchecked(c, x, y))
    }

    #[inline]
    pub(crate) fn index_unchecked(&self, c: usize, x: i64, y: i64) -> usize {
        let l = self.extent();
        let t = self.origin_offset();
        c * l * l + (x + t) as usize * l + (y + t) as usize
    }

    /// Inverse of [`HilbertSpec::index`].
    pub fn coords(&self, index: usize) -> Result<(usize, i64, i64)> {
        if index >= self.dim() {
            return Err(Error::IndexOutOfRange(format!(
                "flat index {index} outside 0..{}",
                self.dim()
            )));
        }
        let l = self.extent();
        let t = self.origin_offset();
        let c = index / (l * l);
        let site = index % (l * l);
        Ok((c, (site / l) as i64 - t, (site % l) as i64 - t))
    }

    /// Tensor factors in storage order with their dimensions.
    pub fn factors(&self) -> Vec<(Subsystem, usize)> {
        vec![
            (Subsystem::Coin, self.coin_dim),
            (Subsystem::X, self.extent()),
            (Subsystem::Y, self.extent()),
        ]
    }
}

/// Flat index of `(c, x, y)` in the coin-major layout of `spec`.
pub fn flat_index(spec: &HilbertSpec, c: usize, x: i64, y: i64) -> Result<usize> {
    spec.index(c, x, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_examples() {
        let s = HilbertSpec::new(2, 1).unwrap();
        assert_eq!(flat_index(&s, 0, 0, 0).unwrap(), 4);
        let s = HilbertSpec::new(4, 0).unwrap();
        assert_eq!(flat_index(&s, 3, 0, 0).unwrap(), 3);
        let s = HilbertSpec::new(2, 2).unwrap();
        assert_eq!(flat_index(&s, 1, -2, 2).unwrap(), 29);
    }

    #[test]
    fn index_is_bijective() {
        for coin in [2, 4] {
            for t in 0..=5 {
                let s = HilbertSpec::new(coin, t).unwrap();
                let mut seen = vec![false; s.dim()];
                let t = t as i64;
                for c in 0..coin {
                    for x in -t..=t {
                        for y in -t..=t {
                            let i = s.index(c, x, y).unwrap();
                            assert!(!seen[i]);
                            seen[i] = true;
                            assert_eq!(s.coords(i).unwrap(), (c, x, y));
                        }
                    }
                }
                assert!(seen.iter().all(|&b| b));
            }
        }
    }

    #[test]
    fn out_of_range() {
        let s = HilbertSpec::new(2, 1).unwrap();
        assert!(matches!(s.index(2, 0, 0), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(s.index(0, 2, 0), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(s.index(0, 0, -2), Err(Error::IndexOutOfRange(_))));
        assert!(s.coords(18).is_err());
        assert!(HilbertSpec::new(3, 1).is_err());
    }
}
