//! Bounds that use the full LLR density through the power series of the
//! binary entropy function: rate upper bound, parity-check density lower
//! bound, bit error probability lower bounds and the gaps `ε₀` beyond which
//! those bounds become trivial.

use std::f64::consts::LN_2;

use crate::channels::{Channel, ChannelKind};
use crate::ensembles::CheckDegreeDistribution;
use crate::error::{Error, Result};
use crate::numerics::{entropy_bits, h2_inverse_low, series_weight, solve_root, Interval, ToleranceSpec};
use crate::quantized::{
    coefficients_from_base, density_lower_bound, noisy_capacity, CoefficientMethod, DensityBound,
    DensityBoundCoefficients, GapToCapacity,
};

/// Truncation of the entropy series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeriesConfig {
    pub truncation_p: usize,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig { truncation_p: 10 }
    }
}

impl SeriesConfig {
    pub fn new(truncation_p: usize) -> Result<Self> {
        if truncation_p == 0 {
            return Err(Error::Domain("series truncation must be at least 1".into()));
        }
        Ok(SeriesConfig { truncation_p })
    }

    pub fn doubled(&self) -> Self {
        SeriesConfig {
            truncation_p: 2 * self.truncation_p,
        }
    }
}

/// `B = Σ_{p≤P} α_p Σ_k d_k g_p^k` with `α_p = 1/(2 ln 2 · p(2p-1))`.
pub fn series_b(channel: &Channel, dk: &CheckDegreeDistribution, cfg: SeriesConfig) -> Result<f64> {
    let g = channel.tanh_moments(cfg.truncation_p)?;
    Ok(series_b_from_moments(&g, dk))
}

pub fn series_b_from_moments(moments: &[f64], dk: &CheckDegreeDistribution) -> f64 {
    moments
        .iter()
        .enumerate()
        .map(|(j, &g)| series_weight(j + 1) * dk.expect(|k| g.powi(k as i32)))
        .sum()
}

/// `Σ_{p≤P} α_p g_p^s` for a real exponent `s`.
pub fn series_power(moments: &[f64], s: f64) -> f64 {
    moments
        .iter()
        .enumerate()
        .map(|(j, &g)| series_weight(j + 1) * g.powf(s))
        .sum()
}

/// Rate bound `1 - (1-C)/(1-B)`; truncating the series only loosens it.
pub fn rate_upper_bound_unquantized(channel: &Channel, dk: &CheckDegreeDistribution, cfg: SeriesConfig) -> Result<f64> {
    let c = channel.capacity()?;
    let b = series_b(channel, dk, cfg)?;
    let denom = 1.0 - b;
    if 1.0 - c <= 0.0 || denom <= 0.0 {
        return Ok(1.0);
    }
    Ok(1.0 - (1.0 - c) / denom)
}

/// Untruncated `B` for channels whose LLR magnitude takes a single nonzero
/// value `L` with mass `m`. Then `g_p = m·tanh^{2p}(L/2)` and the series sums
/// to `Σ_k d_k m^k (1 - h2((1 - tanh^k(L/2))/2))`. `None` for other channels.
pub fn series_b_limit(channel: &Channel, dk: &CheckDegreeDistribution) -> Option<f64> {
    let density = channel.llr_density();
    if density.continuous().is_some() {
        return None;
    }
    let mut magnitude: Option<f64> = None;
    let mut mass = 0.0;
    for &(l, m) in density.atoms() {
        if l <= 0.0 || m == 0.0 {
            continue;
        }
        match magnitude {
            Some(prev) if prev != l => return None,
            _ => magnitude = Some(l),
        }
        mass += if l == f64::INFINITY { m } else { m * (1.0 + (-l).exp()) };
    }
    let Some(l) = magnitude else {
        return Some(0.0);
    };
    let t = if l == f64::INFINITY { 1.0 } else { (0.5 * l).tanh() };
    Some(dk.expect(|k| {
        let k = k as i32;
        mass.powi(k) * (1.0 - entropy_bits(0.5 * (1.0 - t.powi(k))))
    }))
}

/// [`rate_upper_bound_unquantized`] with the series summed to the end, where
/// [`series_b_limit`] applies.
pub fn rate_upper_bound_unquantized_limit(channel: &Channel, dk: &CheckDegreeDistribution) -> Result<Option<f64>> {
    let Some(b) = series_b_limit(channel, dk) else {
        return Ok(None);
    };
    let c = channel.capacity()?;
    if 1.0 - c <= 0.0 || 1.0 - b <= 0.0 {
        return Ok(Some(1.0));
    }
    Ok(Some(1.0 - (1.0 - c) / (1.0 - b)))
}

fn erasure_like(channel: &Channel) -> bool {
    match channel.kind() {
        ChannelKind::Bec { .. } => true,
        ChannelKind::Custom(d) => {
            d.continuous().is_none() && d.atoms().iter().all(|a| a.0 == 0.0 || a.0 == f64::INFINITY)
        }
        _ => false,
    }
}

/// Density-bound coefficients evaluated at their maximizer `x = A`.
pub fn unquantized_coeffs(channel: &Channel) -> Result<DensityBoundCoefficients> {
    let c = noisy_capacity(channel)?;
    let a = channel.quantity_a()?;
    if a >= 1.0 {
        return Err(Error::Degenerate(format!("A = {a} leaves no decay in the check-node term")));
    }
    let xi = if erasure_like(channel) { 1.0 } else { 1.0 / (2.0 * LN_2) };
    coefficients_from_base(c, a, xi, CoefficientMethod::Unquantized { x: a })
}

/// Coefficients at an arbitrary base `x` in `(0, A]`, using the `ξ` of `channel`.
pub fn unquantized_coeffs_at(channel: &Channel, x: f64) -> Result<DensityBoundCoefficients> {
    let c = noisy_capacity(channel)?;
    let xi = if erasure_like(channel) { 1.0 } else { 1.0 / (2.0 * LN_2) };
    coefficients_from_base(c, x, xi, CoefficientMethod::Unquantized { x })
}

pub fn density_lower_bound_unquantized(
    channel: &Channel,
    gap: GapToCapacity,
) -> Result<(DensityBound, DensityBoundCoefficients)> {
    let k = unquantized_coeffs(channel)?;
    Ok((density_lower_bound(&k, gap), k))
}

/// How the parity-check matrix is described in a bit-error bound.
#[derive(Debug, Clone, PartialEq)]
pub enum BerShape {
    DegreeProfile(CheckDegreeDistribution),
    /// Normalized density `t ≥ 1`.
    Normalized { t: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerBoundInput {
    pub rate: f64,
    pub channel: Channel,
    pub shape: BerShape,
}

impl BerBoundInput {
    pub fn new(rate: f64, channel: Channel, shape: BerShape) -> Result<Self> {
        if !(rate > 0.0 && rate < 1.0) {
            return Err(Error::Domain(format!("rate {rate} is outside (0, 1)")));
        }
        if let BerShape::Normalized { t } = shape {
            if !(t >= 1.0) || !t.is_finite() {
                return Err(Error::Domain(format!("normalized density {t} must be at least 1")));
            }
        }
        Ok(BerBoundInput { rate, channel, shape })
    }

    fn t(&self) -> Result<f64> {
        match self.shape {
            BerShape::Normalized { t } => Ok(t),
            BerShape::DegreeProfile(_) => Err(Error::Domain("this bound needs a normalized density".into())),
        }
    }
}

/// Lower bound on `h2(P_b)` and the implied bound on `P_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerBound {
    pub h2_pb_bound: f64,
    pub pb_bound: f64,
    pub trivial: bool,
}

impl BerBound {
    pub fn from_h2(h: f64) -> Result<Self> {
        if h <= 0.0 {
            return Ok(BerBound {
                h2_pb_bound: h,
                pb_bound: 0.0,
                trivial: true,
            });
        }
        Ok(BerBound {
            h2_pb_bound: h,
            pb_bound: h2_inverse_low(h.min(1.0))?,
            trivial: false,
        })
    }
}

/// Exponent `(2-R) t / (1-R)` that replaces the check degree for normalized density `t`.
pub fn normalized_exponent(rate: f64, t: f64) -> f64 {
    (2.0 - rate) * t / (1.0 - rate)
}

/// `1 - C/R + ((1-R)/R) Σ_p α_p g_p^{(2-R)t/(1-R)}` from given capacity and moments.
pub fn ber_h2_normalized(c: f64, rate: f64, t: f64, moments: &[f64]) -> f64 {
    1.0 - c / rate + (1.0 - rate) / rate * series_power(moments, normalized_exponent(rate, t))
}

/// Older single-term form `R - C + ((1-R)/(2 ln 2)) (1-2w)^{2(2-R)t/(1-R)}`.
pub fn legacy_h2_normalized(c: f64, rate: f64, t: f64, w: f64) -> f64 {
    rate - c + (1.0 - rate) / (2.0 * LN_2) * (1.0 - 2.0 * w).powf(2.0 * normalized_exponent(rate, t))
}

pub fn ber_lower_bound(input: &BerBoundInput, cfg: SeriesConfig) -> Result<BerBound> {
    let c = input.channel.capacity()?;
    let r = input.rate;
    let h = match &input.shape {
        BerShape::DegreeProfile(dk) => {
            let b = series_b(&input.channel, dk, cfg)?;
            1.0 - c / r + (1.0 - r) / r * b
        }
        BerShape::Normalized { t } => {
            let g = input.channel.tanh_moments(cfg.truncation_p)?;
            ber_h2_normalized(c, r, *t, &g)
        }
    };
    BerBound::from_h2(h)
}

/// Reconstruction of the earlier two-level bit-error bound for a normalized density.
pub fn legacy_ber_bound(input: &BerBoundInput) -> Result<BerBound> {
    let t = input.t()?;
    let c = input.channel.capacity()?;
    BerBound::from_h2(legacy_h2_normalized(c, input.rate, t, input.channel.error_weight_w()))
}

/// Gap `ε₀ = (1-C) B / (C (1-B))` below which the degree-profile bound is non-trivial.
pub fn epsilon0_degree(channel: &Channel, dk: &CheckDegreeDistribution, cfg: SeriesConfig) -> Result<f64> {
    let c = noisy_capacity(channel)?;
    let b = series_b(channel, dk, cfg)?;
    if b >= 1.0 {
        return Err(Error::Degenerate(format!("series value {b} is not below 1")));
    }
    Ok((1.0 - c) * b / (c * (1.0 - b)))
}

/// `f(ε) = -εC + (1-R) Σ_p α_p g_p^{(2-R)t/(1-R)}` with `R = (1-ε)C`; decreasing in `ε`.
pub fn epsilon0_normalized_objective(c: f64, t: f64, moments: &[f64], eps: f64) -> f64 {
    let r = (1.0 - eps) * c;
    -eps * c + (1.0 - r) * series_power(moments, normalized_exponent(r, t))
}

/// Root of [`epsilon0_normalized_objective`] on `(0, 1)`.
pub fn epsilon0_normalized(channel: &Channel, t: f64, cfg: SeriesConfig) -> Result<f64> {
    if !(t >= 1.0) {
        return Err(Error::Domain(format!("normalized density {t} must be at least 1")));
    }
    let c = noisy_capacity(channel)?;
    let g = channel.tanh_moments(cfg.truncation_p)?;
    let tol = ToleranceSpec {
        abs_tol: 1e-14,
        ..Default::default()
    };
    solve_root(
        |e| epsilon0_normalized_objective(c, t, &g, e),
        Interval { lo: 0.0, hi: 1.0 },
        &tol,
    )
}

/// Value at `cfg` and the change observed when the truncation is doubled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeResult {
    pub value: f64,
    pub doubled: f64,
}

impl ProbeResult {
    pub fn delta(&self) -> f64 {
        (self.doubled - self.value).abs()
    }

    pub fn converged(&self) -> bool {
        self.delta() < 1e-6
    }
}

/// Evaluates `f` at `cfg` and at twice its truncation.
pub fn convergence_probe<F: Fn(SeriesConfig) -> Result<f64>>(cfg: SeriesConfig, f: F) -> Result<ProbeResult> {
    Ok(ProbeResult {
        value: f(cfg)?,
        doubled: f(cfg.doubled())?,
    })
}
