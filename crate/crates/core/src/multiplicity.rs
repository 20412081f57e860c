//! Knot multiplicity vectors over the six primary sites v1..v6.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::Permutation;

pub const NUM_PRIMARY_SITES: usize = 6;

/// Knot multiplicities at v1..v6, written as a six digit glyph such as
/// `600101`. A degree `d` bivariate simplex spline has `d + 3` knots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiplicityVector(pub [u8; NUM_PRIMARY_SITES]);

impl MultiplicityVector {
    pub fn new(m: [u8; NUM_PRIMARY_SITES]) -> Self {
        Self(m)
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|&x| x as usize).sum()
    }

    /// Degree of the simplex spline, `None` when fewer than three knots.
    pub fn degree(&self) -> Option<usize> {
        self.total().checked_sub(3)
    }

    pub fn get(&self, site: usize) -> u8 {
        self.0[site]
    }

    /// `m'(sigma(i)) = m(i)` under the induced site permutation.
    pub fn act(&self, sigma: &Permutation) -> Self {
        let map = sigma.site_map();
        let mut out = [0u8; NUM_PRIMARY_SITES];
        for (i, &mi) in self.0.iter().enumerate() {
            out[map[i]] = mi;
        }
        Self(out)
    }

    /// The distinct images under S3, sorted.
    pub fn orbit(&self) -> Vec<Self> {
        let mut out: Vec<Self> = Permutation::all().iter().map(|s| self.act(s)).collect();
        out.sort();
        out.dedup();
        out
    }

    /// Orbit representative: the lexicographically greatest glyph.
    pub fn canonical(&self) -> Self {
        *self.orbit().last().unwrap()
    }
}

impl fmt::Display for MultiplicityVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in self.0 {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl FromStr for MultiplicityVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let digits: Vec<u8> = s
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as u8))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::InvalidMultiplicity(s.to_string()))?;
        let m: [u8; NUM_PRIMARY_SITES] = digits.try_into().map_err(|_| Error::InvalidMultiplicity(s.to_string()))?;
        Ok(Self(m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mv(s: &str) -> MultiplicityVector {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(mv("600101").to_string(), "600101");
        assert_eq!(mv("600101").degree(), Some(5));
        assert!("60010".parse::<MultiplicityVector>().is_err());
        assert!("60010x".parse::<MultiplicityVector>().is_err());
    }

    #[test]
    fn cyclic_action_example() {
        let sigma = Permutation::new([1, 2, 0]).unwrap();
        assert_eq!(mv("600101").act(&sigma), mv("060110"));
        assert_eq!(mv("600101").act(&Permutation::IDENTITY), mv("600101"));
    }

    #[test]
    fn transposition_examples() {
        let swap23 = Permutation::new([0, 2, 1]).unwrap();
        let swap12 = Permutation::new([1, 0, 2]).unwrap();
        assert_eq!(mv("500201").act(&swap23), mv("500102"));
        assert_eq!(mv("141110").act(&swap12), mv("411101"));
    }

    #[test]
    fn generator_orbit_sizes() {
        let sizes: Vec<usize> = ["600101", "500201", "410201", "320201", "220211", "141110", "131210", "121211"]
            .iter()
            .map(|g| mv(g).orbit().len())
            .collect();
        assert_eq!(sizes, vec![3, 6, 6, 6, 3, 3, 6, 6]);
        assert_eq!(sizes.iter().sum::<usize>(), 39);
    }

    fn perm() -> impl Strategy<Value = Permutation> {
        (0usize..6).prop_map(|i| Permutation::all()[i])
    }

    proptest! {
        #[test]
        fn action_is_a_group_action(m in proptest::array::uniform6(0u8..5), s in perm(), t in perm()) {
            let m = MultiplicityVector(m);
            prop_assert_eq!(m.act(&s.compose(&t)), m.act(&t).act(&s));
            prop_assert_eq!(m.act(&s).total(), m.total());
        }
    }
}
