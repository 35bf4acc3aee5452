//! Dimensions of spaces of generalized theta functions.
//!
//! With `m = n + κ` and `N = n·m^{n−1}`:
//!
//! ```text
//! dim SVB        = N^{g−1} · Σ_μ |J(ρ, μ)|^{2(1−g)}
//! dim SPB(a′,b′) = N^{g−2} · Σ_μ |J(λ, μ)|² |J(ρ, μ)|^{2(1−g)},   λ = ρ + Σ a′_{n−i+1} ε_i
//! dim VB         = (κ/n)^g     · dim SVB
//! dim PB(a, b)   = (κ/n)^{g−1} · dim SPB(a′, b′)
//! dim GVB        = Σ_{(a,b) ∈ A′} dim PB(a, b)
//! ```
//!
//! Sums run over `μ ∈ ρ + P_κ`. `|J(ρ, μ)|²` is a Vandermonde product of
//! distinct roots of unity, hence never zero, so the negative powers are safe.

use serde::Serialize;

use crate::characters::{j_norm_sq_float, pairwise_sum};
use crate::indexsets::{enumerate_a_double_prime, enumerate_a_prime, in_sa_prime, reduce_label, LabelPair};
use crate::lattice::{enumerate_alcove, rho, AlcovePoint, Weight};
use crate::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// A dimension rounded to an integer, together with the unrounded value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionResult {
    pub value: u64,
    pub raw: f64,
    pub residual: f64,
}

impl DimensionResult {
    /// Rounds `raw`, failing when it is further than `tolerance` (relative to
    /// `max(1, |raw|)`) from a nonnegative integer.
    pub fn round(raw: f64, tolerance: f64) -> Result<Self> {
        let nearest = raw.round();
        let residual = (raw - nearest).abs();
        if !raw.is_finite() || nearest < 0.0 || residual > tolerance * raw.abs().max(1.0) {
            return Err(Error::NonInteger {
                raw,
                residual,
                tolerance,
            });
        }
        Ok(DimensionResult {
            value: nearest as u64,
            raw,
            residual,
        })
    }
}

/// Precomputed alcove data for one `(n, κ)`.
#[derive(Debug, Clone)]
pub struct VerlindeTable {
    n: usize,
    kappa: u32,
    tolerance: f64,
    alcove: Vec<AlcovePoint>,
    rho_norms: Vec<f64>,
}

impl VerlindeTable {
    pub fn new(n: usize, kappa: u32) -> Result<Self> {
        Self::with_tolerance(n, kappa, DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(n: usize, kappa: u32, tolerance: f64) -> Result<Self> {
        if n < 1 || kappa < 1 {
            return Err(Error::InvalidArgument(format!(
                "need n >= 1 and kappa >= 1, got n = {n}, kappa = {kappa}"
            )));
        }
        if tolerance.is_nan() || tolerance <= 0.0 {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        let alcove = enumerate_alcove(n, kappa);
        let r = AlcovePoint::new(rho(n), kappa)?;
        let rho_norms = alcove
            .iter()
            .map(|mu| j_norm_sq_float(&r, mu))
            .collect::<Result<Vec<_>>>()?;
        Ok(VerlindeTable {
            n,
            kappa,
            tolerance,
            alcove,
            rho_norms,
        })
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn alcove(&self) -> &[AlcovePoint] {
        &self.alcove
    }

    /// `n (n+κ)^{n−1}`.
    fn normalizer(&self) -> f64 {
        let m = (self.n as u32 + self.kappa) as f64;
        self.n as f64 * m.powi(self.n as i32 - 1)
    }

    fn check_genus(g: u32) -> Result<()> {
        if g < 1 {
            return Err(Error::InvalidArgument("genus must be at least 1".into()));
        }
        Ok(())
    }

    fn rescale(&self, exponent: i32) -> f64 {
        (self.kappa as f64 / self.n as f64).powi(exponent)
    }

    pub fn svb_raw(&self, g: u32) -> Result<f64> {
        Self::check_genus(g)?;
        let e = 1 - g as i32;
        let terms: Vec<_> = self
            .rho_norms
            .iter()
            .map(|&r| r.powi(e))
            .collect();
        Ok(self.normalizer().powi(g as i32 - 1) * pairwise_sum(&terms))
    }

    pub fn svb(&self, g: u32) -> Result<DimensionResult> {
        DimensionResult::round(self.svb_raw(g)?, self.tolerance)
    }

    /// `λ = ρ + Σ a′_{n−i+1} ε_i` for `0 = a′_1 ≤ … ≤ a′_n ≤ κ`.
    pub fn spb_weight(&self, a_prime: &[i64]) -> Result<AlcovePoint> {
        let n = self.n;
        let ok = a_prime.len() == n
            && a_prime[0] == 0
            && a_prime.windows(2).all(|w| w[0] <= w[1])
            && a_prime[n - 1] <= self.kappa as i64;
        if !ok {
            return Err(Error::InvalidLabel(format!(
                "a' = {a_prime:?} must satisfy 0 = a'_1 <= ... <= a'_n <= {}",
                self.kappa
            )));
        }
        let coords = (0..n)
            .map(|i| (n - 1 - i) as i64 + a_prime[n - 1 - i])
            .collect();
        AlcovePoint::new(Weight::new(coords)?, self.kappa)
    }

    pub fn spb_raw(&self, g: u32, a_prime: &[i64]) -> Result<f64> {
        Self::check_genus(g)?;
        let lambda = self.spb_weight(a_prime)?;
        let e = 1 - g as i32;
        let terms = self
            .alcove
            .iter()
            .zip(&self.rho_norms)
            .map(|(mu, &r)| Ok(j_norm_sq_float(&lambda, mu)? * r.powi(e)))
            .collect::<Result<Vec<f64>>>()?;
        Ok(self.normalizer().powi(g as i32 - 2) * pairwise_sum(&terms))
    }

    pub fn spb(&self, g: u32, a_prime: &[i64]) -> Result<DimensionResult> {
        DimensionResult::round(self.spb_raw(g, a_prime)?, self.tolerance)
    }

    pub fn vb(&self, g: u32) -> Result<DimensionResult> {
        let raw = self.rescale(g as i32) * self.svb_raw(g)?;
        DimensionResult::round(raw, self.tolerance)
    }

    /// Requires `reduce_label(x)` to lie in `SA′`; this holds on all of
    /// `A(Δ^κ)` and is stable under `(a, b) ↦ (a + c, b − c)`.
    pub fn pb(&self, g: u32, x: &LabelPair) -> Result<DimensionResult> {
        let r = reduce_label(x);
        if r.a.len() != self.n || !in_sa_prime(&r, self.kappa as i64) {
            return Err(Error::InvalidLabel(format!(
                "{x} does not reduce into SA' for n = {}, kappa = {}",
                self.n, self.kappa
            )));
        }
        let raw = self.rescale(g as i32 - 1) * self.spb_raw(g, &r.a)?;
        DimensionResult::round(raw, self.tolerance)
    }

    /// Sum of rounded `dim PB` over a label set.
    pub fn pb_total<'a>(&self, g: u32, labels: impl IntoIterator<Item = &'a LabelPair>) -> Result<DimensionResult> {
        let mut value = 0u64;
        let mut raw = 0.0;
        for x in labels {
            let d = self.pb(g, x)?;
            value += d.value;
            raw += d.raw;
        }
        Ok(DimensionResult {
            value,
            raw,
            residual: (raw - value as f64).abs(),
        })
    }

    pub fn gvb(&self, g: u32) -> Result<DimensionResult> {
        self.pb_total(g, &enumerate_a_prime(self.n, self.kappa as i64))
    }

    /// `Σ_{A″} dim PB`, the total for the other choice of node branch.
    pub fn gvb_double_prime(&self, g: u32) -> Result<DimensionResult> {
        self.pb_total(g, &enumerate_a_double_prime(self.n, self.kappa as i64))
    }
}

pub fn dim_svb(n: usize, kappa: u32, g: u32) -> Result<DimensionResult> {
    VerlindeTable::new(n, kappa)?.svb(g)
}

pub fn dim_spb(n: usize, kappa: u32, g: u32, a_prime: &[i64]) -> Result<DimensionResult> {
    VerlindeTable::new(n, kappa)?.spb(g, a_prime)
}

pub fn dim_vb(n: usize, kappa: u32, g: u32) -> Result<DimensionResult> {
    VerlindeTable::new(n, kappa)?.vb(g)
}

pub fn dim_pb(n: usize, kappa: u32, g: u32, x: &LabelPair) -> Result<DimensionResult> {
    VerlindeTable::new(n, kappa)?.pb(g, x)
}

pub fn dim_gvb(n: usize, kappa: u32, g: u32) -> Result<DimensionResult> {
    VerlindeTable::new(n, kappa)?.gvb(g)
}
