//! Identity checks assembled from the dimension formulas and the DFT minors.
//!
//! Every check returns [`IdentityReport`]s carrying both sides, the residual
//! and the verdict, so a failing identity still shows the two numbers.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use crate::characters::{delta_star_norm_sq, j_norm_sq_exact, j_norm_sq_float, minor_det_exact, MinorIndex};
use crate::cyclotomic::CycElt;
use crate::indexsets::{enumerate_a_pq, enumerate_sa_prime, LabelPair};
use crate::lattice::{enumerate_alcove, gamma};
use crate::verlinde::VerlindeTable;
use crate::{Error, Mode, Result};

/// Largest rank accepted by the float route of [`verify_zagier`].
pub const MAX_ZAGIER_RANK_FLOAT: usize = 5;
/// Largest rank accepted by the exact route of [`verify_zagier`].
pub const MAX_ZAGIER_RANK_EXACT: usize = 3;
/// Largest cyclotomic order accepted by exact routes.
pub const MAX_EXACT_ORDER: usize = 8;

/// Right-hand side used for the weighted minor identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RhsVariant {
    /// `(m − n) m^{n−1} = κ (n+κ)^{n−1}`.
    Corrected,
    /// `n (n+κ)^{n−1}`, kept for comparison.
    Printed,
}

impl std::fmt::Display for RhsVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RhsVariant::Corrected => f.write_str("corrected"),
            RhsVariant::Printed => f.write_str("printed"),
        }
    }
}

/// One side of an identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportValue {
    pub raw: f64,
    /// Rounded integer, when the value is (or is certified to be) integral.
    pub integer: Option<i64>,
    /// Exact representation in `Z[ζ_m]`, exact mode only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
}

impl ReportValue {
    pub fn float(raw: f64) -> Self {
        let r = raw.round();
        let integer = ((raw - r).abs() <= 1e-9 * raw.abs().max(1.0) && r.abs() < 9.0e15).then_some(r as i64);
        ReportValue {
            raw,
            integer,
            exact: None,
        }
    }

    pub fn integer(v: i64) -> Self {
        ReportValue {
            raw: v as f64,
            integer: Some(v),
            exact: None,
        }
    }

    pub fn cyclotomic(x: &CycElt) -> Self {
        ReportValue {
            raw: x.embed().re,
            integer: x.as_integer().and_then(|b| i64::try_from(b).ok()),
            exact: Some(x.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub name: String,
    pub params: BTreeMap<String, Value>,
    pub lhs: ReportValue,
    pub rhs: ReportValue,
    #[serde(rename = "residual")]
    pub max_residual: f64,
    pub passed: bool,
    pub mode: Mode,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub derived: BTreeMap<String, f64>,
}

impl IdentityReport {
    pub(crate) fn new(name: &str, params: Value) -> Self {
        let params = match params {
            Value::Object(map) => map.into_iter().collect(),
            _ => BTreeMap::new(),
        };
        IdentityReport {
            name: name.to_string(),
            params,
            lhs: ReportValue::integer(0),
            rhs: ReportValue::integer(0),
            max_residual: 0.0,
            passed: true,
            mode: Mode::Float,
            derived: BTreeMap::new(),
        }
    }

    /// Float comparison relative to `max(1, |rhs|)`.
    fn compare_float(mut self, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        self.lhs = ReportValue::float(lhs);
        self.rhs = ReportValue::float(rhs);
        self.max_residual = (lhs - rhs).abs();
        self.passed = self.max_residual <= tolerance * rhs.abs().max(1.0);
        self.mode = Mode::Float;
        self
    }

    pub(crate) fn compare_int(mut self, lhs: i64, rhs: i64) -> Self {
        self.lhs = ReportValue::integer(lhs);
        self.rhs = ReportValue::integer(rhs);
        self.max_residual = (lhs - rhs).abs() as f64;
        self.passed = lhs == rhs;
        self
    }

    /// Certifies `lhs == rhs` in `Z[ζ_m]`.
    fn compare_exact(mut self, lhs: &CycElt, rhs: &CycElt) -> Self {
        let diff = lhs - rhs;
        self.lhs = ReportValue::cyclotomic(lhs);
        self.rhs = ReportValue::cyclotomic(rhs);
        self.max_residual = diff.embed().norm();
        self.passed = diff.is_zero();
        self.mode = Mode::Exact;
        self
    }

    fn derive(mut self, key: &str, value: f64) -> Self {
        self.derived.insert(key.to_string(), value);
        self
    }
}

fn check_tolerance(tolerance: f64) -> Result<()> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    Ok(())
}

fn check_subset(m: usize, n: usize, b: &[usize]) -> Result<Vec<usize>> {
    if n < 1 || n > m {
        return Err(Error::InvalidArgument(format!("need 1 <= n <= m, got n = {n}, m = {m}")));
    }
    let mut b = b.to_vec();
    b.sort_unstable();
    b.dedup();
    if b.len() != n || b.iter().any(|&x| x >= m) {
        return Err(Error::InvalidArgument(format!(
            "B must be {n} distinct elements of 0..{m}"
        )));
    }
    Ok(b)
}

fn check_exact_order(m: usize) -> Result<()> {
    if m > MAX_EXACT_ORDER {
        return Err(Error::InvalidArgument(format!(
            "exact mode supports m <= {MAX_EXACT_ORDER}, got {m}"
        )));
    }
    Ok(())
}

/// `Σ_{SA′} (κ − a′_n) · dim SPB(a′, b′) = (κ/n) · dim SVB`.
pub fn verify_degeneration(n: usize, kappa: u32, g: u32, tolerance: f64) -> Result<IdentityReport> {
    check_tolerance(tolerance)?;
    let table = VerlindeTable::with_tolerance(n, kappa, tolerance)?;
    let mut lhs = 0i64;
    for x in enumerate_sa_prime(n, kappa as i64) {
        let weight = kappa as i64 - x.a[n - 1];
        if weight != 0 {
            lhs += weight * table.spb(g, &x.a)?.value as i64;
        }
    }
    let rhs = kappa as f64 / n as f64 * table.svb_raw(g)?;
    Ok(IdentityReport::new("degeneration", json!({"n": n, "kappa": kappa, "genus": g}))
        .compare_float(lhs as f64, rhs, tolerance))
}

fn zagier_rhs(n: usize, kappa: u32, variant: RhsVariant) -> i64 {
    let m = (n as u32 + kappa) as i64;
    let lead = match variant {
        RhsVariant::Corrected => kappa as i64,
        RhsVariant::Printed => n as i64,
    };
    lead * m.pow(n as u32 - 1)
}

/// `Σ_λ γ(λ) |J(λ, μ)|²` against the chosen right-hand side, one report per
/// alcove point `μ`.
pub fn verify_zagier(
    n: usize,
    kappa: u32,
    mode: Mode,
    rhs_variant: RhsVariant,
    tolerance: f64,
) -> Result<Vec<IdentityReport>> {
    check_tolerance(tolerance)?;
    if n < 1 || kappa < 1 {
        return Err(Error::InvalidArgument("need n >= 1 and kappa >= 1".into()));
    }
    let m = n + kappa as usize;
    match mode {
        Mode::Float if n > MAX_ZAGIER_RANK_FLOAT => {
            return Err(Error::RankTooLarge {
                n,
                max: MAX_ZAGIER_RANK_FLOAT,
            })
        }
        Mode::Exact if n > MAX_ZAGIER_RANK_EXACT => {
            return Err(Error::RankTooLarge {
                n,
                max: MAX_ZAGIER_RANK_EXACT,
            })
        }
        Mode::Exact => check_exact_order(m)?,
        Mode::Float => {}
    }
    let alcove = enumerate_alcove(n, kappa);
    let rhs = zagier_rhs(n, kappa, rhs_variant);
    alcove
        .iter()
        .map(|mu| {
            let report = IdentityReport::new(
                "zagier",
                json!({"n": n, "kappa": kappa, "mu": mu.weight().coords(), "rhs": rhs_variant.to_string()}),
            );
            Ok(match mode {
                Mode::Float => {
                    let mut lhs = 0.0;
                    for lambda in &alcove {
                        let gm = gamma(lambda);
                        if gm != 0 {
                            lhs += gm as f64 * j_norm_sq_float(lambda, mu)?;
                        }
                    }
                    report.compare_float(lhs, rhs as f64, tolerance)
                }
                Mode::Exact => {
                    let mut lhs = CycElt::zero(m);
                    for lambda in &alcove {
                        let gm = gamma(lambda);
                        if gm != 0 {
                            lhs = lhs + CycElt::from_integer(m, gm) * j_norm_sq_exact(lambda, mu)?;
                        }
                    }
                    report.compare_exact(&lhs, &CycElt::from_integer(m, rhs))
                }
            })
        })
        .collect()
}

/// `Σ_{A ∈ Q_0} γ(A) |Δ_{A,B}|² = (m − n) m^{n−1}` with `γ(A) = m − 1 − max A`.
/// `B` need not contain 0.
pub fn verify_zagier_matrix(m: usize, n: usize, b: &[usize], mode: Mode, tolerance: f64) -> Result<IdentityReport> {
    check_tolerance(tolerance)?;
    let b = check_subset(m, n, b)?;
    if mode == Mode::Exact {
        check_exact_order(m)?;
    }
    let rhs = (m - n) as i64 * (m as i64).pow(n as u32 - 1);
    let q0: Vec<Vec<usize>> = (1..m)
        .combinations(n - 1)
        .map(|rest| std::iter::once(0).chain(rest).collect())
        .collect();
    let report = IdentityReport::new("zagier-matrix", json!({"m": m, "n": n, "B": b}));
    let scale = (m as f64).powi(n as i32);
    let normalized_rhs = (m - n) as f64 / m as f64;
    Ok(match mode {
        Mode::Float => {
            let mut lhs = 0.0;
            for a in &q0 {
                let gm = m - 1 - a[n - 1];
                if gm != 0 {
                    lhs += gm as f64 * delta_star_norm_sq(&MinorIndex::new(m, a, &b)?);
                }
            }
            report
                .compare_float(lhs * scale, rhs as f64, tolerance)
                .derive("normalized_lhs", lhs)
                .derive("normalized_rhs", normalized_rhs)
        }
        Mode::Exact => {
            let mut lhs = CycElt::zero(m);
            for a in &q0 {
                let gm = m - 1 - a[n - 1];
                if gm != 0 {
                    let d = minor_det_exact(&MinorIndex::new(m, a, &b)?);
                    lhs = lhs + CycElt::from_integer(m, gm) * (&d * &d.conjugate());
                }
            }
            let normalized = lhs.embed().re / scale;
            report
                .compare_exact(&lhs, &CycElt::from_integer(m, rhs))
                .derive("normalized_lhs", normalized)
                .derive("normalized_rhs", normalized_rhs)
        }
    })
}

/// `Σ_{A ∈ Q} |Δ*_{A,B}|² = 1`. The exact route certifies the unnormalized
/// form `Σ_A |Δ_{A,B}|² = m^n` in `Z[ζ_m]`.
pub fn verify_unitarity(m: usize, n: usize, b: &[usize], mode: Mode, tolerance: f64) -> Result<IdentityReport> {
    check_tolerance(tolerance)?;
    let b = check_subset(m, n, b)?;
    let report = IdentityReport::new("unitarity", json!({"m": m, "n": n, "B": b}));
    let subsets = (0..m).combinations(n);
    Ok(match mode {
        Mode::Float => {
            let mut lhs = 0.0;
            for a in subsets {
                lhs += delta_star_norm_sq(&MinorIndex::new(m, &a, &b)?);
            }
            report.compare_float(lhs, 1.0, tolerance)
        }
        Mode::Exact => {
            check_exact_order(m)?;
            let mut lhs = CycElt::zero(m);
            for a in subsets {
                let d = minor_det_exact(&MinorIndex::new(m, &a, &b)?);
                lhs = lhs + &d * &d.conjugate();
            }
            let rhs = CycElt::from_integer(m, BigInt::from(m).pow(n as u32));
            report.compare_exact(&lhs, &rhs)
        }
    })
}

fn pb_sum(table: &VerlindeTable, g: u32, labels: &[LabelPair]) -> Result<i64> {
    Ok(table.pb_total(g, labels)?.value as i64)
}

/// For each `p ∈ [0, n]`, compares the total `dim PB` over `A′_{p,n}` with
/// that over `A′_{n,p}` (reported sides), and likewise for the unprimed
/// sets (in `derived`). A report passes only if both agree.
pub fn verify_beta_dim_compat(n: usize, kappa: u32, g: u32, tolerance: f64) -> Result<Vec<IdentityReport>> {
    check_tolerance(tolerance)?;
    let table = VerlindeTable::with_tolerance(n, kappa, tolerance)?;
    let k = kappa as i64;
    (0..=n)
        .map(|p| {
            let full_src = pb_sum(&table, g, &enumerate_a_pq(n, k, p, n, false)?)?;
            let full_dst = pb_sum(&table, g, &enumerate_a_pq(n, k, n, p, false)?)?;
            let primed_src = pb_sum(&table, g, &enumerate_a_pq(n, k, p, n, true)?)?;
            let primed_dst = pb_sum(&table, g, &enumerate_a_pq(n, k, n, p, true)?)?;
            let mut r = IdentityReport::new("beta-compat", json!({"n": n, "kappa": kappa, "genus": g, "p": p}))
                .compare_int(primed_src, primed_dst)
                .derive("full_lhs", full_src as f64)
                .derive("full_rhs", full_dst as f64);
            r.max_residual = r.max_residual.max((full_src - full_dst).abs() as f64);
            r.passed &= full_src == full_dst;
            Ok(r)
        })
        .collect()
}

/// `dim GVB = dim VB`, with `Σ_{A″} dim PB` required to match as well.
pub fn verify_main_theorem_dims(n: usize, kappa: u32, g: u32, tolerance: f64) -> Result<IdentityReport> {
    check_tolerance(tolerance)?;
    let table = VerlindeTable::with_tolerance(n, kappa, tolerance)?;
    let gvb = table.gvb(g)?.value as i64;
    let vb = table.vb(g)?.value as i64;
    let double_prime = table.gvb_double_prime(g)?.value as i64;
    let mut r = IdentityReport::new("main", json!({"n": n, "kappa": kappa, "genus": g}))
        .compare_int(gvb, vb)
        .derive("double_prime_total", double_prime as f64);
    r.max_residual = r.max_residual.max((double_prime - gvb).abs() as f64);
    r.passed &= double_prime == gvb;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verlinde::DEFAULT_TOLERANCE as TOL;

    #[test]
    fn degeneration_examples() {
        let r = verify_degeneration(2, 1, 2, TOL).unwrap();
        assert!(r.passed);
        assert_eq!(r.lhs.integer, Some(2));
        let r = verify_degeneration(2, 2, 2, TOL).unwrap();
        assert_eq!((r.lhs.integer, r.rhs.integer), (Some(10), Some(10)));
        for kappa in 1..5 {
            for g in 1..4 {
                assert!(verify_degeneration(1, kappa, g, TOL).unwrap().passed);
            }
        }
    }

    #[test]
    fn zagier_printed_rhs_fails_at_rank_two_level_one() {
        let corrected = verify_zagier(2, 1, Mode::Float, RhsVariant::Corrected, TOL).unwrap();
        let printed = verify_zagier(2, 1, Mode::Float, RhsVariant::Printed, TOL).unwrap();
        assert_eq!(corrected.len(), 2);
        for (c, p) in corrected.iter().zip(&printed) {
            assert!(c.passed);
            assert_eq!(c.lhs.integer, Some(3));
            assert!(!p.passed);
            assert_eq!(p.rhs.integer, Some(6));
        }
        for r in verify_zagier(2, 1, Mode::Exact, RhsVariant::Printed, TOL).unwrap() {
            assert!(!r.passed);
            assert_eq!(r.lhs.integer, Some(3));
        }
    }

    #[test]
    fn zagier_variants_agree_when_rank_equals_level() {
        for variant in [RhsVariant::Corrected, RhsVariant::Printed] {
            for r in verify_zagier(2, 2, Mode::Exact, variant, TOL).unwrap() {
                assert!(r.passed);
                assert_eq!(r.lhs.integer, Some(8));
            }
        }
        let r = verify_zagier(2, 3, Mode::Float, RhsVariant::Corrected, TOL).unwrap();
        assert_eq!(r[0].lhs.integer, Some(15));
        assert!(r.iter().all(|x| x.passed));
        let r = verify_zagier(2, 3, Mode::Float, RhsVariant::Printed, TOL).unwrap();
        assert_eq!(r[0].rhs.integer, Some(10));
        assert!(r.iter().all(|x| !x.passed));
    }

    #[test]
    fn zagier_exact_small_grid() {
        for n in 1..=3 {
            for kappa in 1..=(8 - n as u32) {
                for r in verify_zagier(n, kappa, Mode::Exact, RhsVariant::Corrected, TOL).unwrap() {
                    assert!(r.passed, "n = {n}, kappa = {kappa}: {:?}", r);
                }
            }
        }
    }

    #[test]
    fn zagier_guards() {
        assert!(verify_zagier(4, 1, Mode::Exact, RhsVariant::Corrected, TOL).is_err());
        assert!(verify_zagier(3, 6, Mode::Exact, RhsVariant::Corrected, TOL).is_err());
        assert!(verify_zagier(6, 1, Mode::Float, RhsVariant::Corrected, TOL).is_err());
    }

    #[test]
    fn zagier_matrix_examples() {
        let r = verify_zagier_matrix(3, 2, &[0, 1], Mode::Exact, TOL).unwrap();
        assert!(r.passed);
        assert_eq!(r.lhs.integer, Some(3));
        let r = verify_zagier_matrix(2, 1, &[1], Mode::Exact, TOL).unwrap();
        assert_eq!((r.lhs.integer, r.passed), (Some(1), true));
        let r = verify_zagier_matrix(4, 2, &[1, 3], Mode::Float, TOL).unwrap();
        assert_eq!((r.lhs.integer, r.passed), (Some(8), true));
        assert!((r.derived["normalized_lhs"] - 0.5).abs() < 1e-12);
        assert!(verify_zagier_matrix(4, 2, &[1, 1], Mode::Float, TOL).is_err());
        assert!(verify_zagier_matrix(9, 2, &[1, 3], Mode::Exact, TOL).is_err());
    }

    #[test]
    fn unitarity_examples() {
        for b in [[0, 1], [0, 2], [1, 2]] {
            assert!(verify_unitarity(3, 2, &b, Mode::Float, 1e-9).unwrap().passed);
        }
        for m in 1..=6 {
            let full: Vec<usize> = (0..m).collect();
            assert!(verify_unitarity(m, m, &full, Mode::Exact, 1e-9).unwrap().passed);
        }
        assert!(verify_unitarity(4, 1, &[2], Mode::Exact, 1e-9).unwrap().passed);
        assert!(verify_unitarity(5, 2, &[1, 3], Mode::Exact, 1e-9).unwrap().passed);
    }

    #[test]
    fn beta_compat_examples() {
        let reports = verify_beta_dim_compat(2, 2, 2, TOL).unwrap();
        assert_eq!(reports.len(), 3);
        assert!(reports.iter().all(|r| r.passed));
        assert_eq!((reports[1].lhs.integer, reports[1].rhs.integer), (Some(7), Some(7)));
        let reports = verify_beta_dim_compat(2, 1, 2, TOL).unwrap();
        assert!(reports.iter().all(|r| r.passed));
        assert_eq!(reports[0].lhs.integer, Some(1));
    }

    #[test]
    fn main_theorem_examples() {
        let r = verify_main_theorem_dims(2, 1, 2, TOL).unwrap();
        assert_eq!((r.lhs.integer, r.passed), (Some(1), true));
        let r = verify_main_theorem_dims(2, 2, 2, TOL).unwrap();
        assert_eq!((r.lhs.integer, r.passed), (Some(10), true));
        let r = verify_main_theorem_dims(3, 1, 2, TOL).unwrap();
        assert!(r.passed);
        assert_eq!(r.lhs.integer, Some(1));
    }

    #[test]
    fn zagier_termwise_implies_degeneration() {
        for n in 1..=3 {
            for kappa in 1..=3 {
                let zag = verify_zagier(n, kappa, Mode::Float, RhsVariant::Corrected, TOL).unwrap();
                assert!(zag.iter().all(|r| r.passed));
                for g in 1..=3 {
                    assert!(verify_degeneration(n, kappa, g, TOL).unwrap().passed);
                }
            }
        }
    }
}
