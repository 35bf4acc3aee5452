//! Weight lattice of `sl_n`.
//!
//! A weight is a coset of `Z^n` modulo the all-ones vector. We store the
//! representative whose last coordinate is zero, so equality of weights is
//! equality of coordinate vectors.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use num_rational::Rational64;
use serde::Serialize;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Weight {
    coords: Vec<i64>,
}

impl Weight {
    /// Builds the weight of the coset containing `coords`.
    pub fn new(coords: Vec<i64>) -> Result<Self> {
        let Some(&last) = coords.last() else {
            return Err(Error::InvalidArgument("a weight needs rank n >= 1".into()));
        };
        Ok(Weight {
            coords: coords.into_iter().map(|c| c - last).collect(),
        })
    }

    pub fn zero(n: usize) -> Self {
        assert!(n >= 1, "rank must be at least 1");
        Weight { coords: vec![0; n] }
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    /// `w(λ)` for a permutation `w` of `{0..n-1}`: coordinate `i` moves to slot `w[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = vec![0; self.rank()];
        for (i, &target) in perm.iter().enumerate() {
            out[target] = self.coords[i];
        }
        Weight::new(out).expect("non-empty")
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.coords.iter().join(","))
    }
}

/// `(λ|μ) = Σ λ_i μ_i − (Σ λ_i)(Σ μ_i)/n`.
pub fn killing_form(lhs: &Weight, rhs: &Weight) -> Result<Rational64> {
    if lhs.rank() != rhs.rank() {
        return Err(Error::RankMismatch(lhs.rank(), rhs.rank()));
    }
    Ok(killing_form_raw(lhs.coords(), rhs.coords()))
}

/// Killing form on raw coordinate vectors of equal length. The result does
/// not depend on the representative chosen for either argument.
pub(crate) fn killing_form_raw(lhs: &[i64], rhs: &[i64]) -> Rational64 {
    let n = lhs.len() as i64;
    let dot: i64 = lhs.iter().zip(rhs).map(|(a, b)| a * b).sum();
    let sl: i64 = lhs.iter().sum();
    let sr: i64 = rhs.iter().sum();
    Rational64::new(n * dot - sl * sr, n)
}

/// `ρ = Σ (n−i) ε_i`.
pub fn rho(n: usize) -> Weight {
    assert!(n >= 1, "rank must be at least 1");
    Weight {
        coords: (0..n as i64).rev().collect(),
    }
}

/// The highest root `θ = ε_1 − ε_n`.
pub fn highest_root(n: usize) -> Weight {
    assert!(n >= 1, "rank must be at least 1");
    let mut coords = vec![0; n];
    coords[0] += 1;
    coords[n - 1] -= 1;
    Weight::new(coords).expect("non-empty")
}

/// `λ* = −w_0 λ`, where `w_0` reverses the coordinates.
pub fn dual(w: &Weight) -> Weight {
    let coords = w.coords.iter().rev().map(|c| -c).collect();
    Weight::new(coords).expect("non-empty")
}

/// A point of `ρ + P_κ`: strictly decreasing coordinates, last one zero,
/// first one at most `κ + n − 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AlcovePoint {
    weight: Weight,
    kappa: u32,
}

impl AlcovePoint {
    pub fn new(weight: Weight, kappa: u32) -> Result<Self> {
        if kappa < 1 {
            return Err(Error::InvalidArgument("level must be at least 1".into()));
        }
        let c = weight.coords();
        let decreasing = c.windows(2).all(|w| w[0] > w[1]);
        let m = weight.rank() as i64 + kappa as i64;
        if !decreasing || c[0] > m - 1 {
            return Err(Error::InvalidArgument(format!(
                "{weight} is not in rho + P_{kappa}"
            )));
        }
        Ok(AlcovePoint { weight, kappa })
    }

    /// Inverse of [`to_subset`]: the alcove point whose coordinates are the
    /// elements of `subset` (which must contain 0 and lie in `0..n+κ`).
    pub fn from_subset(subset: &[usize], kappa: u32) -> Result<Self> {
        let mut coords: Vec<i64> = subset.iter().map(|&s| s as i64).collect();
        coords.sort_unstable_by(|a, b| b.cmp(a));
        if coords.last() != Some(&0) {
            return Err(Error::InvalidArgument(
                "subset must contain 0 to name an alcove point".into(),
            ));
        }
        AlcovePoint::new(Weight::new(coords)?, kappa)
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    pub fn rank(&self) -> usize {
        self.weight.rank()
    }

    /// `m = n + κ`.
    pub fn order(&self) -> usize {
        self.rank() + self.kappa as usize
    }
}

impl fmt::Display for AlcovePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.weight.fmt(f)
    }
}

/// All of `ρ + P_κ`, lexicographically increasing in the coordinates.
/// There are `C(n+κ−1, n−1)` of them.
pub fn enumerate_alcove(n: usize, kappa: u32) -> Vec<AlcovePoint> {
    assert!(n >= 1 && kappa >= 1, "need n >= 1 and kappa >= 1");
    let m = n as i64 + kappa as i64;
    let mut points: Vec<AlcovePoint> = (1..m)
        .combinations(n - 1)
        .map(|mut upper| {
            upper.reverse();
            upper.push(0);
            AlcovePoint {
                weight: Weight { coords: upper },
                kappa,
            }
        })
        .collect();
    points.sort();
    points
}

/// The subset `{λ_1, …, λ_n}` of `{0..m−1}`; always contains 0.
pub fn to_subset(p: &AlcovePoint) -> BTreeSet<usize> {
    p.weight.coords().iter().map(|&c| c as usize).collect()
}

/// `γ(λ) = κ + n − 1 − λ_1`, which equals `(m−1) − max(A)`.
pub fn gamma(p: &AlcovePoint) -> u32 {
    (p.order() as i64 - 1 - p.weight.coords()[0]) as u32
}
