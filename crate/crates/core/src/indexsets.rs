//! Label sets `(a, b) ∈ Z^n × Z^n` indexing summands of the decomposition of
//! sections on the compactified `GL_n` and on the Gieseker degeneration.
//!
//! Indexing conventions: the vectors `a` and `b` are 1-indexed in formulas
//! (`a_1 … a_n`) and stored 0-indexed (`a[0] … a[n-1]`). The exponents
//! `m_i`, `l_i` and the stratum sets `I`, `J` are 0-indexed in formulas and
//! in storage alike.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use serde::Serialize;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LabelPair {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
}

impl LabelPair {
    pub fn new(a: Vec<i64>, b: Vec<i64>) -> Self {
        assert_eq!(a.len(), b.len(), "label vectors must have equal length");
        LabelPair { a, b }
    }

    /// The pair with `b_i = κ − a_{n−i+1}`.
    pub fn from_a(a: Vec<i64>, kappa: i64) -> Self {
        let b = a.iter().rev().map(|x| kappa - x).collect();
        LabelPair { a, b }
    }

    /// The pair with `a_i = κ − b_{n−i+1}`.
    pub fn from_b(b: Vec<i64>, kappa: i64) -> Self {
        let a = b.iter().rev().map(|x| kappa - x).collect();
        LabelPair { a, b }
    }

    pub fn rank(&self) -> usize {
        self.a.len()
    }
}

impl fmt::Display for LabelPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(({}),({}))",
            self.a.iter().join(","),
            self.b.iter().join(",")
        )
    }
}

/// Exponents `(m_0..m_{n−1}, l_0..l_{n−1}, e, d)` presenting the line bundle
/// `⊗ (M_i^{m_i} ⊗ L_i^{l_i}) ⊗ f*(det E)^e ⊗ f*(det F)^d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BundleExponents {
    n: usize,
    m_exp: Vec<i64>,
    l_exp: Vec<i64>,
    e: i64,
    d: i64,
}

impl BundleExponents {
    pub fn new(m_exp: Vec<i64>, l_exp: Vec<i64>, e: i64, d: i64) -> Result<Self> {
        let n = m_exp.len();
        if n == 0 || l_exp.len() != n {
            return Err(Error::InvalidArgument(format!(
                "exponent vectors must have equal positive length, got {} and {}",
                n,
                l_exp.len()
            )));
        }
        Ok(BundleExponents {
            n,
            m_exp,
            l_exp,
            e,
            d,
        })
    }

    /// The presentation of `Δ^κ`: `m_i = κ(n−i)`, `l_i = 0`, `e = 0`, `d = κ`.
    pub fn delta(n: usize, kappa: i64) -> Self {
        assert!(n >= 1, "rank must be at least 1");
        BundleExponents {
            n,
            m_exp: (0..n as i64).map(|i| kappa * (n as i64 - i)).collect(),
            l_exp: vec![0; n],
            e: 0,
            d: kappa,
        }
    }

    pub fn rank(&self) -> usize {
        self.n
    }
}

/// A stratum `(I, J)` with `I, J ⊆ [0, n−1]` and `min(I) + min(J) ≥ n`,
/// where `min(∅) = n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct StratumIndex {
    n: usize,
    i_set: BTreeSet<usize>,
    j_set: BTreeSet<usize>,
}

impl StratumIndex {
    pub fn new(n: usize, i_set: BTreeSet<usize>, j_set: BTreeSet<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidStratum("rank must be at least 1".into()));
        }
        if let Some(bad) = i_set.iter().chain(&j_set).find(|&&x| x >= n) {
            return Err(Error::InvalidStratum(format!(
                "index {bad} is outside [0, {}]",
                n - 1
            )));
        }
        let s = StratumIndex { n, i_set, j_set };
        if s.i1() + s.j1() < n {
            return Err(Error::InvalidStratum(format!(
                "min(I) + min(J) = {} < n = {n}",
                s.i1() + s.j1()
            )));
        }
        Ok(s)
    }

    /// The open stratum `I = J = ∅`.
    pub fn open(n: usize) -> Self {
        StratumIndex::new(n, BTreeSet::new(), BTreeSet::new()).expect("n >= 1")
    }

    /// All valid strata of rank `n`.
    pub fn all(n: usize) -> Vec<StratumIndex> {
        let subsets = || (0..=n).flat_map(move |k| (0..n).combinations(k));
        subsets()
            .cartesian_product(subsets().collect::<Vec<_>>())
            .filter_map(|(i, j)| {
                StratumIndex::new(n, i.into_iter().collect(), j.into_iter().collect()).ok()
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn i_set(&self) -> &BTreeSet<usize> {
        &self.i_set
    }

    pub fn j_set(&self) -> &BTreeSet<usize> {
        &self.j_set
    }

    pub fn i1(&self) -> usize {
        self.i_set.first().copied().unwrap_or(self.n)
    }

    pub fn j1(&self) -> usize {
        self.j_set.first().copied().unwrap_or(self.n)
    }
}

/// Ascending sequences of length `len` with entries in `[lo, hi]`, lexicographic.
fn ascending(len: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    if len == 0 {
        return vec![vec![]];
    }
    if hi < lo {
        return vec![];
    }
    (lo..=hi).combinations_with_replacement(len).collect()
}

/// Closed bounds `lo ≤ a_j − e ≤ hi` for every coordinate, derived from the
/// shortest tail and head inequalities.
fn coordinate_bounds(l: &BundleExponents, s: &StratumIndex) -> Result<(i64, i64)> {
    let n = l.n;
    let (i1, j1) = (s.i1(), s.j1());
    // tail bound at i = n−1 reads a_n − e ≤ m_{n−1}; it applies when n−1 ≥ n−j₁
    let mut upper = (j1 >= 1).then(|| l.m_exp[n - 1]);
    // head bound at i = n−1 reads a_1 − e ≥ −l_{n−1}
    let mut lower = (i1 >= 1).then(|| -l.l_exp[n - 1]);
    // an equality at i = 0 pins the total Σ (a_j − e), closing the other side
    if upper.is_none() && s.j_set.contains(&0) {
        upper = lower.map(|lo| -l.l_exp[0] - (n as i64 - 1) * lo);
    }
    if lower.is_none() && s.i_set.contains(&0) {
        lower = upper.map(|hi| l.m_exp[0] - (n as i64 - 1) * hi);
    }
    match (lower, upper) {
        (Some(lo), Some(hi)) => Ok((lo, hi)),
        _ => Err(Error::UnboundedIndexSet(format!(
            "no coordinate bound closes for I = {:?}, J = {:?}",
            s.i_set, s.j_set
        ))),
    }
}

fn satisfies_definition(a: &[i64], l: &BundleExponents, s: &StratumIndex) -> bool {
    let n = l.n;
    let (i1, j1) = (s.i1(), s.j1());
    let shifted: Vec<i64> = a.iter().map(|x| x - l.e).collect();
    // ascending
    if !a.windows(2).all(|w| w[0] <= w[1]) {
        return false;
    }
    // tail bound Σ_{j=i+1}^{n} (a_j − e) ≤ m_i on [n−j₁, n−1], equality on I
    for i in (n - j1)..n {
        let tail: i64 = shifted[i..].iter().sum();
        if tail > l.m_exp[i] || (s.i_set.contains(&i) && tail != l.m_exp[i]) {
            return false;
        }
    }
    // head bound Σ_{j=1}^{n−i} (a_j − e) ≥ −l_i on [n−i₁, n−1], equality on J
    for i in (n - i1)..n {
        let head: i64 = shifted[..n - i].iter().sum();
        if head < -l.l_exp[i] || (s.j_set.contains(&i) && head != -l.l_exp[i]) {
            return false;
        }
    }
    true
}

/// `A_{I,J}(L)`: every `(a, b)` with `a` ascending,
/// `Σ_{j>i} (a_j − e) ≤ m_i` for `i ∈ [n−j₁, n−1]` (equality on `I`),
/// `Σ_{j≤n−i} (a_j − e) ≥ −l_i` for `i ∈ [n−i₁, n−1]` (equality on `J`),
/// and `b_{n−i+1} = d − (a_i − e)`. Lexicographic in `a`.
///
/// Coordinate bounds are derived before enumerating; if they do not close the
/// set is reported as unbounded instead of being searched.
pub fn enumerate_a_general(l: &BundleExponents, s: &StratumIndex) -> Result<Vec<LabelPair>> {
    if l.n != s.n {
        return Err(Error::RankMismatch(l.n, s.n));
    }
    let (lo, hi) = coordinate_bounds(l, s)?;
    Ok(ascending(l.n, lo + l.e, hi + l.e)
        .into_iter()
        .filter(|a| satisfies_definition(a, l, s))
        .map(|a| {
            let b = a.iter().rev().map(|x| l.d - (x - l.e)).collect();
            LabelPair { a, b }
        })
        .collect())
}

/// `A_{I,J}(Δ^κ)` in closed form:
/// `0 = a_1 = … = a_{n−j₁} ≤ … ≤ a_{i₁+1} = … = a_n = κ`, `b_i = κ − a_{n−i+1}`.
pub fn enumerate_a_delta(n: usize, kappa: i64, s: &StratumIndex) -> Vec<LabelPair> {
    assert_eq!(n, s.n, "stratum rank mismatch");
    let zeros = n - s.j1();
    let kappas = n - s.i1();
    let free = n - zeros - kappas;
    ascending(free, 0, kappa)
        .into_iter()
        .map(|mid| {
            let a = std::iter::repeat_n(0, zeros)
                .chain(mid)
                .chain(std::iter::repeat_n(kappa, kappas))
                .collect();
            LabelPair::from_a(a, kappa)
        })
        .collect()
}

/// `A(Δ^κ)`: ascending `a` in `[0, κ]`.
pub fn enumerate_a_full(n: usize, kappa: i64) -> Vec<LabelPair> {
    enumerate_a_delta(n, kappa, &StratumIndex::open(n))
}

/// `A′`: ascending `a` in `[0, κ−1]`, `b_i = κ − a_{n−i+1}`.
pub fn enumerate_a_prime(n: usize, kappa: i64) -> Vec<LabelPair> {
    ascending(n, 0, kappa - 1)
        .into_iter()
        .map(|a| LabelPair::from_a(a, kappa))
        .collect()
}

/// `A″`: ascending `b` in `[1, κ]`, `a_i = κ − b_{n−i+1}`. Sorted by `a`.
pub fn enumerate_a_double_prime(n: usize, kappa: i64) -> Vec<LabelPair> {
    let mut out: Vec<LabelPair> = ascending(n, 1, kappa)
        .into_iter()
        .map(|b| LabelPair::from_b(b, kappa))
        .collect();
    out.sort();
    out
}

/// `SA′`: `0 = a′_1 ≤ … ≤ a′_n ≤ κ` and `b′_i = a′_n − a′_{n−i+1}`.
pub fn enumerate_sa_prime(n: usize, kappa: i64) -> Vec<LabelPair> {
    assert!(n >= 1, "rank must be at least 1");
    ascending(n - 1, 0, kappa)
        .into_iter()
        .map(|tail| {
            let mut a = vec![0];
            a.extend(tail);
            let top = a[n - 1];
            LabelPair::from_a(a, top)
        })
        .collect()
}

/// Whether `x` lies in `SA′` for level `κ`.
pub fn in_sa_prime(x: &LabelPair, kappa: i64) -> bool {
    let a = &x.a;
    let n = a.len();
    n >= 1
        && x.b.len() == n
        && a[0] == 0
        && a.windows(2).all(|w| w[0] <= w[1])
        && a[n - 1] <= kappa
        && (0..n).all(|i| x.b[i] == a[n - 1] - a[n - 1 - i])
}

/// `A_{p,q}` (or `A′_{p,q}` when `primed`): `a_i = 0` for `i ≤ n−q`,
/// `a_i = κ` for `i > p`, and with `primed` also `a_i ≤ κ−1` for `i ≤ p`.
pub fn enumerate_a_pq(n: usize, kappa: i64, p: usize, q: usize, primed: bool) -> Result<Vec<LabelPair>> {
    if p > n || q > n || p + q < n {
        return Err(Error::InvalidArgument(format!(
            "(p, q) = ({p}, {q}) needs p, q in [0, {n}] and p + q >= {n}"
        )));
    }
    let zeros = n - q;
    let free = p - zeros;
    let cap = if primed { kappa - 1 } else { kappa };
    Ok(ascending(free, 0, cap)
        .into_iter()
        .map(|mid| {
            let a = std::iter::repeat_n(0, zeros)
                .chain(mid)
                .chain(std::iter::repeat_n(kappa, n - p))
                .collect();
            LabelPair::from_a(a, kappa)
        })
        .collect())
}

/// `a′_i = a_i − a_1`, `b′_i = b_i − b_1`.
pub fn reduce_label(x: &LabelPair) -> LabelPair {
    let a0 = x.a.first().copied().unwrap_or(0);
    let b0 = x.b.first().copied().unwrap_or(0);
    LabelPair {
        a: x.a.iter().map(|v| v - a0).collect(),
        b: x.b.iter().map(|v| v - b0).collect(),
    }
}
