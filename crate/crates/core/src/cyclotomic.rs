//! Exact arithmetic in the ring of cyclotomic integers `Z[ζ_m]`.
//!
//! Elements are integer polynomials in `ζ` reduced modulo the cyclotomic
//! polynomial `Φ_m`, so two elements are equal exactly when their coefficient
//! vectors are.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Largest matrix [`det_exact`] accepts unless a cap is given explicitly.
pub const DEFAULT_DET_CAP: usize = 6;

/// `Φ_m` as coefficients from the constant term upwards, obtained by dividing
/// `x^m − 1` by `Φ_d` for every proper divisor `d` of `m`.
pub fn cyclotomic_polynomial(m: usize) -> Vec<BigInt> {
    assert!(m >= 1, "cyclotomic order must be at least 1");
    let mut memo: HashMap<usize, Vec<BigInt>> = HashMap::new();
    cyclotomic_memo(m, &mut memo)
}

fn cyclotomic_memo(m: usize, memo: &mut HashMap<usize, Vec<BigInt>>) -> Vec<BigInt> {
    if let Some(p) = memo.get(&m) {
        return p.clone();
    }
    let mut num = vec![BigInt::zero(); m + 1];
    num[0] = BigInt::from(-1);
    num[m] = BigInt::one();
    for d in (1..m).filter(|d| m.is_multiple_of(*d)) {
        let phi_d = cyclotomic_memo(d, memo);
        let (q, r) = div_rem_monic(&num, &phi_d);
        debug_assert!(r.iter().all(Zero::is_zero));
        num = q;
    }
    memo.insert(m, num.clone());
    num
}

/// Long division by a monic polynomial. Both polynomials are given
/// low-degree first; the remainder has degree below the divisor's.
pub(crate) fn div_rem_monic(num: &[BigInt], den: &[BigInt]) -> (Vec<BigInt>, Vec<BigInt>) {
    let dd = den.len() - 1;
    assert!(den[dd].is_one(), "divisor must be monic");
    let mut rem = num.to_vec();
    if rem.len() <= dd {
        return (vec![BigInt::zero()], rem);
    }
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    for k in (dd..rem.len()).rev() {
        let c = std::mem::take(&mut rem[k]);
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate().take(dd) {
            rem[k - dd + j] -= &c * dj;
        }
        quot[k - dd] = c;
    }
    rem.truncate(dd);
    (quot, rem)
}

/// Shared data for one `Z[ζ_m]`: the reduced powers `ζ^k` for `0 ≤ k < m`.
#[derive(Debug)]
pub struct CycRing {
    m: usize,
    phi: Vec<BigInt>,
    powers: Vec<Vec<BigInt>>,
}

impl CycRing {
    fn build(m: usize) -> Self {
        let phi = cyclotomic_polynomial(m);
        let degree = phi.len() - 1;
        let mut powers = Vec::with_capacity(m);
        let mut cur = vec![BigInt::zero(); degree];
        cur[0] = BigInt::one();
        for _ in 0..m {
            powers.push(cur.clone());
            // multiply by x and reduce the single overflowing term
            let top = std::mem::take(&mut cur[degree - 1]);
            cur.rotate_right(1);
            for (j, pj) in phi.iter().enumerate().take(degree) {
                cur[j] -= &top * pj;
            }
        }
        CycRing { m, phi, powers }
    }

    /// The (cached) ring `Z[ζ_m]`.
    pub fn get(m: usize) -> Arc<CycRing> {
        assert!(m >= 1, "cyclotomic order must be at least 1");
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<CycRing>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut guard = cache.lock().expect("cyclotomic ring cache poisoned");
        guard
            .entry(m)
            .or_insert_with(|| Arc::new(CycRing::build(m)))
            .clone()
    }

    pub fn order(&self) -> usize {
        self.m
    }

    /// `φ(m)`, the length of every coefficient vector.
    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }

    pub fn modulus(&self) -> &[BigInt] {
        &self.phi
    }

    /// Reduces an arbitrary polynomial in `ζ` using `ζ^m = 1` and the table of powers.
    fn reduce(&self, poly: &[BigInt]) -> Vec<BigInt> {
        let deg = self.degree();
        let mut out = vec![BigInt::zero(); deg];
        for (k, c) in poly.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if k < deg {
                out[k] += c;
            } else {
                for (o, p) in out.iter_mut().zip(&self.powers[k % self.m]) {
                    if !p.is_zero() {
                        *o += c * p;
                    }
                }
            }
        }
        out
    }
}

/// An element of `Z[ζ_m]`.
#[derive(Clone)]
pub struct CycElt {
    ring: Arc<CycRing>,
    coeffs: Vec<BigInt>,
}

impl CycElt {
    pub fn zero(m: usize) -> Self {
        let ring = CycRing::get(m);
        let coeffs = vec![BigInt::zero(); ring.degree()];
        CycElt { ring, coeffs }
    }

    pub fn one(m: usize) -> Self {
        Self::from_integer(m, 1)
    }

    pub fn from_integer(m: usize, c: impl Into<BigInt>) -> Self {
        let mut x = Self::zero(m);
        x.coeffs[0] = c.into();
        x
    }

    /// Builds the element `Σ c_k ζ^k` from an unreduced polynomial.
    pub fn from_poly(m: usize, poly: &[BigInt]) -> Self {
        let ring = CycRing::get(m);
        let coeffs = ring.reduce(poly);
        CycElt { ring, coeffs }
    }

    pub fn order(&self) -> usize {
        self.ring.m
    }

    /// Coefficients in the basis `1, ζ, …, ζ^{φ(m)−1}`.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Image under `ζ ↦ ζ^{−1}` (complex conjugation in every embedding).
    pub fn conjugate(&self) -> Self {
        let m = self.ring.m;
        let mut out = vec![BigInt::zero(); self.ring.degree()];
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, p) in out.iter_mut().zip(&self.ring.powers[(m - k % m) % m]) {
                if !p.is_zero() {
                    *o += c * p;
                }
            }
        }
        CycElt {
            ring: self.ring.clone(),
            coeffs: out,
        }
    }

    /// The rational integer this element equals, if it is one.
    pub fn as_integer(&self) -> Option<BigInt> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Value at `ζ_m = exp(2πi/m)` in double precision.
    pub fn embed(&self) -> Complex64 {
        let m = self.ring.m as f64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                let c = c.to_f64().unwrap_or(f64::NAN);
                Complex64::from_polar(c, 2.0 * PI * k as f64 / m)
            })
            .sum()
    }

    fn check_same_ring(&self, other: &CycElt) {
        assert_eq!(
            self.ring.m, other.ring.m,
            "cannot combine elements of Z[zeta_{}] and Z[zeta_{}]",
            self.ring.m, other.ring.m
        );
    }
}

/// `ζ_m^k`, with `k` taken modulo `m`.
pub fn root_power(m: usize, k: i64) -> CycElt {
    let ring = CycRing::get(m);
    let k = k.mod_floor(&(m as i64)) as usize;
    let coeffs = ring.powers[k].clone();
    CycElt { ring, coeffs }
}

impl PartialEq for CycElt {
    fn eq(&self, other: &Self) -> bool {
        self.ring.m == other.ring.m && self.coeffs == other.coeffs
    }
}

impl Eq for CycElt {}

impl fmt::Debug for CycElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycElt[m={}]({})", self.ring.m, self)
    }
}

impl fmt::Display for CycElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match (k, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (_, true) => write!(f, "z^{k}")?,
                (_, false) => write!(f, "{a}*z^{k}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl Add for &CycElt {
    type Output = CycElt;
    fn add(self, rhs: &CycElt) -> CycElt {
        self.check_same_ring(rhs);
        CycElt {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CycElt {
    type Output = CycElt;
    fn sub(self, rhs: &CycElt) -> CycElt {
        self.check_same_ring(rhs);
        CycElt {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &CycElt {
    type Output = CycElt;
    fn mul(self, rhs: &CycElt) -> CycElt {
        self.check_same_ring(rhs);
        let deg = self.ring.degree();
        let mut prod = vec![BigInt::zero(); 2 * deg - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        CycElt {
            ring: self.ring.clone(),
            coeffs: self.ring.reduce(&prod),
        }
    }
}

impl Neg for &CycElt {
    type Output = CycElt;
    fn neg(self) -> CycElt {
        CycElt {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr for CycElt {
            type Output = CycElt;
            fn $method(self, rhs: CycElt) -> CycElt {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&CycElt> for CycElt {
            type Output = CycElt;
            fn $method(self, rhs: &CycElt) -> CycElt {
                (&self).$method(rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for CycElt {
    type Output = CycElt;
    fn neg(self) -> CycElt {
        -&self
    }
}

impl std::iter::Sum for CycElt {
    /// Panics on an empty iterator: the ring order cannot be inferred.
    fn sum<I: Iterator<Item = CycElt>>(mut iter: I) -> CycElt {
        let first = iter.next().expect("sum of CycElt needs at least one term");
        iter.fold(first, |acc, x| acc + x)
    }
}

/// Exact determinant over `Z[ζ_m]` with the default size cap.
pub fn det_exact(entries: &[Vec<CycElt>]) -> Result<CycElt> {
    det_exact_with_cap(entries, DEFAULT_DET_CAP)
}

/// Exact determinant. Sizes up to 4 use plain cofactor expansion; larger
/// matrices use a memoized Laplace expansion over column subsets, which is
/// still division-free.
pub fn det_exact_with_cap(entries: &[Vec<CycElt>], cap: usize) -> Result<CycElt> {
    let size = entries.len();
    if entries.iter().any(|row| row.len() != size) {
        return Err(Error::NotSquare);
    }
    if size == 0 {
        return Err(Error::InvalidArgument("empty matrix has no ring to live in".into()));
    }
    if size > cap {
        return Err(Error::MatrixTooLarge { size, cap });
    }
    let m = entries[0][0].order();
    if let Some(bad) = entries.iter().flatten().find(|e| e.order() != m) {
        return Err(Error::MixedOrder(m, bad.order()));
    }
    if size <= 4 {
        let cols: Vec<usize> = (0..size).collect();
        Ok(cofactor(entries, 0, &cols))
    } else {
        Ok(laplace_memo(entries))
    }
}

fn cofactor(a: &[Vec<CycElt>], row: usize, cols: &[usize]) -> CycElt {
    if cols.len() == 1 {
        return a[row][cols[0]].clone();
    }
    let mut acc: Option<CycElt> = None;
    for (pos, &c) in cols.iter().enumerate() {
        if a[row][c].is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let term = &a[row][c] * &cofactor(a, row + 1, &rest);
        acc = Some(match (acc, pos % 2 == 0) {
            (None, true) => term,
            (None, false) => -term,
            (Some(s), true) => s + term,
            (Some(s), false) => s - term,
        });
    }
    acc.unwrap_or_else(|| CycElt::zero(a[0][0].order()))
}

/// `minors[S]` is the determinant of the first `|S|` rows restricted to the
/// column set `S`, built up one row at a time.
fn laplace_memo(a: &[Vec<CycElt>]) -> CycElt {
    let n = a.len();
    let m = a[0][0].order();
    let mut minors: Vec<Option<CycElt>> = vec![None; 1 << n];
    minors[0] = Some(CycElt::one(m));
    for mask in 1usize..(1 << n) {
        let row = mask.count_ones() as usize - 1;
        let mut acc = CycElt::zero(m);
        let mut sign_pos = 0;
        for c in 0..n {
            if mask & (1 << c) == 0 {
                continue;
            }
            let sub = minors[mask & !(1 << c)].as_ref().expect("filled in order");
            let term = &a[row][c] * sub;
            // expanding along the last row of a |S| x |S| block
            acc = if (row + sign_pos).is_multiple_of(2) { acc + term } else { acc - term };
            sign_pos += 1;
        }
        minors[mask] = Some(acc);
    }
    minors[(1 << n) - 1].take().expect("full mask")
}
