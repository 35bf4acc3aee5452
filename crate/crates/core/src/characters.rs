//! The alternating character sum
//! `J(λ, μ) = Σ_{w ∈ S_n} sign(w) exp(2πi (w(λ)|μ) / m)`, `m = n + κ`.
//!
//! Only `|J|²` is exported: the phase of `J` depends on the coset
//! representatives of `λ` and `μ`, while `|J(λ, μ)|² = |Δ_{A,B}|²` for the
//! subsets `A`, `B` attached to the two alcove points. The minor route is the
//! production path; the Weyl sum is an `n!`-term cross-check.

use std::f64::consts::PI;

use itertools::Itertools;
use num_complex::Complex64;
use num_traits::Zero;

use crate::cyclotomic::{det_exact_with_cap, root_power, CycElt};
use crate::lattice::{to_subset, AlcovePoint, Weight};
use crate::{Error, Result};

/// Largest rank accepted by [`j_weyl_sum`].
pub const MAX_WEYL_RANK: usize = 7;

/// Row and column sets of an `n × n` minor of `M_m = (ζ_m^{ab})`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MinorIndex {
    m: usize,
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl MinorIndex {
    pub fn new(m: usize, rows: &[usize], cols: &[usize]) -> Result<Self> {
        let norm = |set: &[usize], what: &str| -> Result<Vec<usize>> {
            let mut v = set.to_vec();
            v.sort_unstable();
            if v.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidArgument(format!("{what} set has duplicates")));
            }
            if v.iter().any(|&x| x >= m) {
                return Err(Error::InvalidArgument(format!(
                    "{what} set {v:?} not inside 0..{m}"
                )));
            }
            Ok(v)
        };
        let rows = norm(rows, "row")?;
        let cols = norm(cols, "column")?;
        if rows.len() != cols.len() || rows.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "minor needs equal non-empty row/column sets, got {} and {}",
                rows.len(),
                cols.len()
            )));
        }
        Ok(MinorIndex { m, rows, cols })
    }

    /// The minor `Δ_{A,B}` attached to two alcove points.
    pub fn from_alcove(lambda: &AlcovePoint, mu: &AlcovePoint) -> Result<Self> {
        if lambda.rank() != mu.rank() || lambda.kappa() != mu.kappa() {
            return Err(Error::InvalidArgument(format!(
                "alcove points {lambda} and {mu} live in different alcoves"
            )));
        }
        let a: Vec<usize> = to_subset(lambda).into_iter().collect();
        let b: Vec<usize> = to_subset(mu).into_iter().collect();
        MinorIndex::new(lambda.order(), &a, &b)
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }
}

/// Pairwise (tree) summation.
pub(crate) fn pairwise_sum<T>(terms: &[T]) -> T
where
    T: Copy + Zero + std::ops::Add<Output = T>,
{
    match terms.len() {
        0 => T::zero(),
        1 => terms[0],
        len => {
            let (l, r) = terms.split_at(len / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

fn permutation_sign(perm: &[usize]) -> f64 {
    let inversions = perm
        .iter()
        .enumerate()
        .flat_map(|(i, a)| perm[i + 1..].iter().filter(move |b| a > *b))
        .count();
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The full signed Weyl-group sum, permutations in lexicographic order.
pub fn j_weyl_sum(lambda: &Weight, mu: &Weight, kappa: u32) -> Result<Complex64> {
    let n = lambda.rank();
    if mu.rank() != n {
        return Err(Error::RankMismatch(n, mu.rank()));
    }
    if n > MAX_WEYL_RANK {
        return Err(Error::RankTooLarge {
            n,
            max: MAX_WEYL_RANK,
        });
    }
    let m = (n + kappa as usize) as i64;
    let lam = lambda.coords();
    let mu = mu.coords();
    let sl: i64 = lam.iter().sum();
    let sm: i64 = mu.iter().sum();
    // (w(λ)|μ) = Σ_i λ_i μ_{w(i)} − (Σλ)(Σμ)/n; the phase is 2π·num/(n·m)
    let period = n as i64 * m;
    let terms: Vec<Complex64> = (0..n)
        .permutations(n)
        .map(|perm| {
            let dot: i64 = perm.iter().enumerate().map(|(i, &t)| lam[i] * mu[t]).sum();
            let num = (n as i64 * dot - sl * sm).rem_euclid(period);
            let phase = 2.0 * PI * num as f64 / period as f64;
            Complex64::from_polar(permutation_sign(&perm), phase)
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

fn dft_entry_float(m: usize, a: usize, b: usize) -> Complex64 {
    let k = (a * b) % m;
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64)
}

/// `Δ_{A,B}` exactly in `Z[ζ_m]`.
pub fn minor_det_exact(idx: &MinorIndex) -> CycElt {
    let mat: Vec<Vec<CycElt>> = idx
        .rows
        .iter()
        .map(|&a| {
            idx.cols
                .iter()
                .map(|&b| root_power(idx.m, ((a * b) % idx.m) as i64))
                .collect()
        })
        .collect();
    det_exact_with_cap(&mat, usize::MAX).expect("well-formed square matrix over one ring")
}

/// `Δ_{A,B}` in double precision via LU with partial pivoting.
pub fn minor_det_float(idx: &MinorIndex) -> Complex64 {
    let mat: Vec<Vec<Complex64>> = idx
        .rows
        .iter()
        .map(|&a| idx.cols.iter().map(|&b| dft_entry_float(idx.m, a, b)).collect())
        .collect();
    lu_determinant(mat)
}

pub(crate) fn lu_determinant(mut a: Vec<Vec<Complex64>>) -> Complex64 {
    let n = a.len();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm()))
            .expect("non-empty range");
        if a[pivot][k].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != k {
            a.swap(pivot, k);
            det = -det;
        }
        let p = a[k][k];
        det *= p;
        for i in k + 1..n {
            let factor = a[i][k] / p;
            if factor.norm() == 0.0 {
                continue;
            }
            let (top, bottom) = a.split_at_mut(i);
            for (x, &t) in bottom[0][k + 1..].iter_mut().zip(&top[k][k + 1..]) {
                *x -= factor * t;
            }
        }
    }
    det
}

/// `|J(λ, μ)|² = |Δ_{A,B}|²` in floating point.
pub fn j_norm_sq_float(lambda: &AlcovePoint, mu: &AlcovePoint) -> Result<f64> {
    Ok(minor_det_float(&MinorIndex::from_alcove(lambda, mu)?).norm_sqr())
}

/// `|J(λ, μ)|²` as the element `Δ · conj(Δ)` of `Z[ζ_m]`. It is fixed by
/// conjugation but in general not a rational integer.
pub fn j_norm_sq_exact(lambda: &AlcovePoint, mu: &AlcovePoint) -> Result<CycElt> {
    let d = minor_det_exact(&MinorIndex::from_alcove(lambda, mu)?);
    Ok(&d * &d.conjugate())
}

/// `|Δ*_{A,B}|² = m^{−n} |Δ_{A,B}|²`.
pub fn delta_star_norm_sq(idx: &MinorIndex) -> f64 {
    minor_det_float(idx).norm_sqr() / (idx.m as f64).powi(idx.size() as i32)
}
