//! Bounds obtained by quantizing the channel LLR to `2^d` symmetric levels:
//! the conditional-entropy lower bound, the resulting rate upper bounds and
//! the parity-check density lower bounds, together with the choice of the
//! quantizer levels.

use std::f64::consts::LN_2;

use crate::channels::{Channel, ChannelKind, ContinuousPart, QuantizerLevels, TransitionProbs};
use crate::ensembles::CheckDegreeDistribution;
use crate::error::{Error, Result};
use crate::numerics::{entropy_bits, maximize_with, Interval, MaximizeOptions, ToleranceSpec, DEFAULT_SEED};

/// Largest check degree accepted by the composition enumeration.
pub const MAX_DEGREE: usize = 64;
/// Largest number of compositions enumerated for a single degree.
const MAX_COMPOSITIONS: f64 = 5e7;

/// `χ = Σ_i (p_i - p_{2^d-1-i})^2 / (p_i + p_{2^d-1-i})` over the positive half.
pub fn chi_objective(probs: &TransitionProbs) -> f64 {
    probs.pair_stats().iter().map(|&(q, r)| q * r * r).sum()
}

/// Result of the level search.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizedQuantizer {
    pub levels: QuantizerLevels,
    pub probs: TransitionProbs,
    pub chi: f64,
}

fn level_ceiling(channel: &Channel) -> f64 {
    let dens = channel.llr_density();
    let from_atoms = dens
        .atoms()
        .iter()
        .filter(|a| a.0.is_finite())
        .map(|a| 1.5 * a.0.abs())
        .fold(0.0, f64::max);
    let from_cont = match dens.continuous() {
        Some(ContinuousPart::Gaussian { mean, var, .. }) => mean + 10.0 * var.sqrt(),
        Some(part @ ContinuousPart::Tabulated { .. }) => part.support().hi,
        None => 0.0,
    };
    let top = from_atoms.max(from_cont);
    if top > 0.0 {
        top
    } else {
        1.0
    }
}

/// Levels from the search coordinates `(l_1, u_2, …)` with `l_i = l_{i-1} u_i`.
fn decode(x: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    let mut l = x[0];
    out.push(l);
    for &u in &x[1..] {
        l *= u;
        out.push(l);
    }
    out
}

fn encode(levels: &[f64]) -> Vec<f64> {
    let mut x = vec![levels[0]];
    for w in levels.windows(2) {
        x.push(if w[0] > 0.0 { (w[1] / w[0]).clamp(0.0, 1.0) } else { 0.0 });
    }
    x
}

/// Splits every cell of a depth-`d` quantizer in two, keeping its levels.
fn refine(levels: &[f64], ceiling: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * levels.len() + 1);
    let first = levels.first().copied().unwrap_or(0.0);
    out.push(if first > 0.0 { (1.5 * first).min(ceiling).max(first) } else { ceiling });
    for (j, &l) in levels.iter().enumerate() {
        out.push(l);
        let next = levels.get(j + 1).copied().unwrap_or(0.0);
        out.push(0.5 * (l + next));
    }
    out
}

fn fixed_levels(d: usize, top: f64) -> QuantizerLevels {
    let n = (1usize << (d - 1)) - 1;
    let levels = (0..n).map(|i| top * 0.5f64.powi(i as i32 + 1)).collect();
    QuantizerLevels::new(d, levels).expect("geometric levels are ordered")
}

/// Levels maximizing `χ`, found with the default seed.
pub fn optimize_levels(channel: &Channel, d: usize) -> Result<OptimizedQuantizer> {
    optimize_levels_seeded(channel, d, DEFAULT_SEED)
}

/// Levels maximizing `χ` over the ordered box. For `d > 2` the optimum for
/// `d - 1`, split cell by cell, is among the starting points, so the returned
/// `χ` never decreases with `d`.
pub fn optimize_levels_seeded(channel: &Channel, d: usize, seed: u64) -> Result<OptimizedQuantizer> {
    if !(2..=4).contains(&d) {
        return Err(Error::Domain(format!("quantizer depth {d} must be 2, 3 or 4")));
    }
    let finish = |levels: QuantizerLevels| {
        let probs = channel.quantized_probs(&levels);
        let chi = chi_objective(&probs);
        OptimizedQuantizer { levels, probs, chi }
    };
    // the atoms of these channels make χ flat in the levels
    match *channel.kind() {
        ChannelKind::Bsc { eps } => {
            let l0 = if eps > 0.0 { ((1.0 - eps) / eps).ln() } else { 1.0 };
            return Ok(finish(fixed_levels(d, l0)));
        }
        ChannelKind::Bec { .. } => return Ok(finish(fixed_levels(d, 2.0))),
        _ => {}
    }
    let ceiling = level_ceiling(channel);
    let dim = (1usize << (d - 1)) - 1;
    let mut bounds = vec![Interval { lo: 0.0, hi: ceiling }];
    bounds.extend(std::iter::repeat_n(Interval { lo: 0.0, hi: 1.0 }, dim - 1));
    let mut extra = Vec::new();
    if d > 2 {
        let coarse = optimize_levels_seeded(channel, d - 1, seed)?;
        extra.push(encode(&refine(coarse.levels.levels(), ceiling)));
    }
    let objective = |x: &[f64]| {
        let levels = QuantizerLevels::new(d, decode(x)).expect("decoded levels are ordered");
        chi_objective(&channel.quantized_probs(&levels))
    };
    let opts = MaximizeOptions {
        seed,
        ..Default::default()
    };
    let tol = ToleranceSpec {
        abs_tol: 1e-15,
        rel_tol: 1e-14,
        ..Default::default()
    };
    let best = maximize_with(objective, &bounds, &tol, &opts, &extra)?;
    let levels = QuantizerLevels::new(d, decode(&best.point))?;
    Ok(finish(levels))
}

/// Residual of the stationarity condition for a single level `l` (the `d = 2` case).
pub fn stationarity_residual_d2(channel: &Channel, l: f64) -> Result<f64> {
    let probs = channel.quantized_probs(&QuantizerLevels::new(2, vec![l])?);
    let p = probs.probs();
    let e = (-l).exp();
    let lhs = (p[2] * p[2] + e * p[1] * p[1]) / (p[1] + p[2]).powi(2);
    let rhs = (p[3] * p[3] + e * p[0] * p[0]) / (p[0] + p[3]).powi(2);
    Ok(lhs - rhs)
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n + 1];
    for i in 1..=n {
        t[i] = t[i - 1] + (i as f64).ln();
    }
    t
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

struct Enumerator<'a, K: Fn(f64) -> f64> {
    ln_q: Vec<f64>,
    r: Vec<f64>,
    ln_fact: &'a [f64],
    kernel: &'a K,
}

impl<K: Fn(f64) -> f64> Enumerator<'_, K> {
    /// Sums over the ways of spreading `left` symbols over pairs `i..`.
    fn walk(&self, i: usize, left: usize, log_w: f64, prod: f64) -> f64 {
        let last = i + 1 == self.r.len();
        let mut total = 0.0;
        let lo = if last { left } else { 0 };
        for ki in lo..=left {
            let (log_term, pr) = if ki == 0 {
                (0.0, 1.0)
            } else if self.ln_q[i] == f64::NEG_INFINITY {
                continue;
            } else {
                (ki as f64 * self.ln_q[i] - self.ln_fact[ki], self.r[i].powi(ki as i32))
            };
            let lw = log_w + log_term;
            let pp = prod * pr;
            if last {
                total += (lw).exp() * (self.kernel)(0.5 * (1.0 - pp));
            } else {
                total += self.walk(i + 1, left - ki, lw, pp);
            }
        }
        total
    }
}

/// Conditional-entropy sum
/// `Σ_k d_k Σ_{k_0+…=k} multinomial · Π q_i^{k_i} · h2((1 - Π r_i^{k_i})/2)`.
pub fn entropy_sum_quantized(dk: &CheckDegreeDistribution, probs: &TransitionProbs) -> Result<f64> {
    entropy_sum_with_kernel(dk, probs, entropy_bits)
}

/// [`entropy_sum_quantized`] with `h2` replaced by an arbitrary kernel.
pub fn entropy_sum_with_kernel<K: Fn(f64) -> f64>(
    dk: &CheckDegreeDistribution,
    probs: &TransitionProbs,
    kernel: K,
) -> Result<f64> {
    let kmax = dk.max_degree();
    if kmax > MAX_DEGREE {
        return Err(Error::TooLarge(format!("check degree {kmax} exceeds the limit of {MAX_DEGREE}")));
    }
    let stats = probs.pair_stats();
    let m = stats.len();
    let count = binomial(kmax + m - 1, m - 1);
    if count > MAX_COMPOSITIONS {
        return Err(Error::TooLarge(format!(
            "{count:.3e} compositions of degree {kmax} into {m} parts"
        )));
    }
    let ln_fact = ln_factorials(kmax);
    let en = Enumerator {
        ln_q: stats.iter().map(|s| s.0.ln()).collect(),
        r: stats.iter().map(|s| s.1).collect(),
        ln_fact: &ln_fact,
        kernel: &kernel,
    };
    Ok(dk.expect(|k| en.walk(0, k, ln_fact[k], 1.0)))
}

/// `Σ_k d_k h2((1 - (1 - 2w)^k)/2)`.
pub fn entropy_sum_two_level(dk: &CheckDegreeDistribution, w: f64) -> f64 {
    let b = 1.0 - 2.0 * w;
    dk.expect(|k| entropy_bits(0.5 * (1.0 - b.powi(k as i32))))
}

fn gap_over(one_minus_c: f64, denom: f64) -> f64 {
    if one_minus_c <= 0.0 {
        0.0
    } else if denom <= 0.0 {
        f64::INFINITY
    } else {
        one_minus_c / denom
    }
}

/// Two-level rate bound `1 - (1-C) / Σ_k d_k h2((1 - (1-2w)^k)/2)`.
pub fn rate_upper_bound_2level(channel: &Channel, dk: &CheckDegreeDistribution) -> Result<f64> {
    let c = channel.capacity()?;
    let s = entropy_sum_two_level(dk, channel.error_weight_w());
    Ok(1.0 - gap_over(1.0 - c, s))
}

/// Erasure-channel rate bound `1 - p / (1 - Σ_k d_k (1-p)^k)`.
pub fn rate_upper_bound_bec(channel: &Channel, dk: &CheckDegreeDistribution) -> Result<f64> {
    let ChannelKind::Bec { p } = *channel.kind() else {
        return Err(Error::InvalidChannel("the erasure-channel rate bound needs a BEC".into()));
    };
    let survive = dk.expect(|k| (1.0 - p).powi(k as i32));
    Ok(1.0 - gap_over(p, 1.0 - survive))
}

/// `E / (1 - Σ_k d_k (1-E)^k)`, which tends to `1/a_R` as `E → 0`.
pub fn erasure_term(dk: &CheckDegreeDistribution, e: f64) -> f64 {
    if e <= 0.0 {
        return 1.0 / dk.a_r();
    }
    let denom = dk.expect(|k| -(k as f64 * (-e).ln_1p()).exp_m1());
    e / denom
}

/// Components of the quantized rate bound.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedRateBound {
    pub value: f64,
    pub entropy_term: f64,
    pub erasure_term: f64,
    pub quantizer: OptimizedQuantizer,
}

/// Rate bound from a `2^d`-level quantization with χ-optimal levels.
pub fn rate_upper_bound_quantized(channel: &Channel, dk: &CheckDegreeDistribution, d: usize) -> Result<f64> {
    Ok(rate_upper_bound_quantized_detail(channel, dk, d, DEFAULT_SEED)?.value)
}

pub fn rate_upper_bound_quantized_detail(
    channel: &Channel,
    dk: &CheckDegreeDistribution,
    d: usize,
    seed: u64,
) -> Result<QuantizedRateBound> {
    let quantizer = optimize_levels_seeded(channel, d, seed)?;
    let c = channel.capacity()?;
    let s = entropy_sum_quantized(dk, &quantizer.probs)?;
    let entropy_term = gap_over(1.0 - c, s);
    let e = 2.0 * quantizer.probs.bad_half_mass();
    let erasure_term = erasure_term(dk, e);
    Ok(QuantizedRateBound {
        value: 1.0 - entropy_term.max(erasure_term),
        entropy_term,
        erasure_term,
        quantizer,
    })
}

/// Which coefficient formula produced a density bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoefficientMethod {
    TwoLevel,
    TwoLevelBec,
    Quantized { d: usize },
    Unquantized { x: f64 },
}

impl CoefficientMethod {
    pub fn tag(&self) -> String {
        match self {
            CoefficientMethod::TwoLevel => "two_level".into(),
            CoefficientMethod::TwoLevelBec => "two_level_bec".into(),
            CoefficientMethod::Quantized { d } => format!("quantized({d})"),
            CoefficientMethod::Unquantized { .. } => "unquantized".into(),
        }
    }
}

/// Coefficients of the density bound `(K1 + K2 ln(1/ε))/(1-ε)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityBoundCoefficients {
    pub k1: f64,
    pub k2: f64,
    pub method: CoefficientMethod,
}

/// Requested density-bound method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityMethod {
    TwoLevel,
    TwoLevelBec,
    Quantized(usize),
    Unquantized,
}

/// Gap `ε` in `R = (1-ε) C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapToCapacity(f64);

impl GapToCapacity {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Domain(format!("gap {epsilon} is outside (0, 1)")));
        }
        Ok(GapToCapacity(epsilon))
    }

    /// Gap of rate `rate` to the capacity `c`.
    pub fn from_rate(rate: f64, c: f64) -> Result<Self> {
        Self::new(1.0 - rate / c)
    }

    pub fn epsilon(&self) -> f64 {
        self.0
    }
}

pub(crate) fn noisy_capacity(channel: &Channel) -> Result<f64> {
    let c = channel.capacity()?;
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Degenerate(format!("capacity {c} is not strictly between 0 and 1")));
    }
    Ok(c)
}

/// Coefficients from the exponential decay `x^k` of the check-node term:
/// `K2 = (1-C)/(C ln(1/x))`, `K1 = K2 ln(ξ(1-C)/C)`.
pub(crate) fn coefficients_from_base(c: f64, x: f64, xi: f64, method: CoefficientMethod) -> Result<DensityBoundCoefficients> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Degenerate(format!("decay base {x} is not strictly between 0 and 1")));
    }
    let k2 = (1.0 - c) / (c * (1.0 / x).ln());
    let k1 = k2 * (xi * (1.0 - c) / c).ln();
    Ok(DensityBoundCoefficients { k1, k2, method })
}

pub fn density_bound_coeffs(channel: &Channel, method: DensityMethod) -> Result<DensityBoundCoefficients> {
    density_bound_coeffs_seeded(channel, method, DEFAULT_SEED)
}

pub fn density_bound_coeffs_seeded(channel: &Channel, method: DensityMethod, seed: u64) -> Result<DensityBoundCoefficients> {
    let c = noisy_capacity(channel)?;
    let xi = 1.0 / (2.0 * LN_2);
    match method {
        DensityMethod::TwoLevel => {
            let b = 1.0 - 2.0 * channel.error_weight_w();
            coefficients_from_base(c, b * b, xi, CoefficientMethod::TwoLevel)
        }
        DensityMethod::TwoLevelBec => {
            let ChannelKind::Bec { p } = *channel.kind() else {
                return Err(Error::InvalidChannel("the erasure-channel coefficients need a BEC".into()));
            };
            let k2 = p / ((1.0 - p) * (1.0 / (1.0 - p)).ln());
            let k1 = k2 * (p / (1.0 - p)).ln();
            Ok(DensityBoundCoefficients {
                k1,
                k2,
                method: CoefficientMethod::TwoLevelBec,
            })
        }
        DensityMethod::Quantized(d) => {
            let chi = optimize_levels_seeded(channel, d, seed)?.chi;
            if !(chi > 0.0 && chi < 1.0) {
                return Err(Error::Degenerate(format!("optimized chi {chi} is not strictly between 0 and 1")));
            }
            coefficients_from_base(c, chi, xi, CoefficientMethod::Quantized { d })
        }
        DensityMethod::Unquantized => crate::unquantized::unquantized_coeffs(channel),
    }
}

/// A density bound value; `trivial` marks non-positive values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityBound {
    pub value: f64,
    pub trivial: bool,
}

/// `(K1 + K2 ln(1/ε)) / (1 - ε)`.
pub fn density_lower_bound(coeffs: &DensityBoundCoefficients, gap: GapToCapacity) -> DensityBound {
    let e = gap.epsilon();
    let value = (coeffs.k1 + coeffs.k2 * (1.0 / e).ln()) / (1.0 - e);
    DensityBound {
        value,
        trivial: !(value > 0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::biawgn_from_ebn0;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn tp(d: usize, p: &[f64]) -> TransitionProbs {
        TransitionProbs::new(d, p.to_vec()).unwrap()
    }

    #[test]
    fn chi_examples() {
        let eps: f64 = 0.1;
        assert_abs_diff_eq!(chi_objective(&tp(2, &[1.0 - eps, 0.0, 0.0, eps])), (1.0 - 2.0 * eps).powi(2), epsilon = 1e-15);
        assert_eq!(chi_objective(&tp(2, &[0.25; 4])), 0.0);
        assert_eq!(chi_objective(&tp(3, &[0.125; 8])), 0.0);
    }

    #[test]
    fn refinement_keeps_levels() {
        let r = refine(&[1.7], 10.0);
        assert_eq!(r[1], 1.7);
        assert_abs_diff_eq!(r[0], 2.55, epsilon = 1e-15);
        assert_abs_diff_eq!(r[2], 0.85, epsilon = 1e-15);
        for (a, b) in decode(&encode(&r)).iter().zip(&r) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn bsc_chi_is_flat() {
        let eps: f64 = 0.08;
        let ch = Channel::bsc(eps).unwrap();
        let l0 = ((1.0 - eps) / eps).ln();
        for f in [0.1, 0.5, 0.9] {
            let probs = ch.quantized_probs(&QuantizerLevels::new(2, vec![f * l0]).unwrap());
            assert_abs_diff_eq!(chi_objective(&probs), (1.0 - 2.0 * eps).powi(2), epsilon = 1e-14);
        }
        let q = optimize_levels(&ch, 2).unwrap();
        assert_abs_diff_eq!(q.chi, (1.0 - 2.0 * eps).powi(2), epsilon = 1e-14);
    }

    #[test]
    fn optimized_level_is_stationary() {
        let ch = biawgn_from_ebn0(0.187, 0.5).unwrap();
        let q = optimize_levels(&ch, 2).unwrap();
        let l = q.levels.levels()[0];
        assert!(stationarity_residual_d2(&ch, l).unwrap().abs() < 1e-6);
        let w = ch.error_weight_w();
        assert!(q.chi >= (1.0 - 2.0 * w).powi(2));
    }

    #[test]
    fn chi_grows_with_depth() {
        let ch = Channel::biawgn(0.9).unwrap();
        let c2 = optimize_levels(&ch, 2).unwrap().chi;
        let c3 = optimize_levels(&ch, 3).unwrap().chi;
        let c4 = optimize_levels(&ch, 4).unwrap().chi;
        assert!(c3 >= c2 - 1e-12 && c4 >= c3 - 1e-12, "{c2} {c3} {c4}");
        assert!(optimize_levels(&ch, 5).is_err());
    }

    #[test]
    fn two_level_collapse_of_entropy_sum() {
        let w = 0.07;
        let probs = tp(2, &[1.0 - w, 0.0, 0.0, w]);
        let dk = CheckDegreeDistribution::right_regular(6).unwrap();
        let full = entropy_sum_quantized(&dk, &probs).unwrap();
        assert_abs_diff_eq!(full, entropy_sum_two_level(&dk, w), epsilon = 1e-14);
    }

    #[test]
    fn zero_chi_gives_full_entropy() {
        let dk = CheckDegreeDistribution::right_regular(5).unwrap();
        assert_abs_diff_eq!(entropy_sum_quantized(&dk, &tp(2, &[0.25; 4])).unwrap(), 1.0, epsilon = 1e-13);
    }

    #[test]
    fn degree_guard() {
        let dk = CheckDegreeDistribution::right_regular(65).unwrap();
        assert!(matches!(entropy_sum_quantized(&dk, &tp(2, &[0.25; 4])), Err(Error::TooLarge(_))));
        let dk = CheckDegreeDistribution::right_regular(64).unwrap();
        assert!(matches!(entropy_sum_quantized(&dk, &tp(4, &[1.0 / 16.0; 16])), Err(Error::TooLarge(_))));
    }

    #[test]
    fn two_level_bound_limits() {
        let dk = CheckDegreeDistribution::right_regular(6).unwrap();
        assert_eq!(rate_upper_bound_2level(&Channel::bsc(0.0).unwrap(), &dk).unwrap(), 1.0);
        let p: f64 = 0.3;
        let v = rate_upper_bound_2level(&Channel::bec(p).unwrap(), &dk).unwrap();
        let expect = 1.0 - p / entropy_bits(0.5 * (1.0 - (1.0 - p).powi(6)));
        assert_abs_diff_eq!(v, expect, epsilon = 1e-14);
    }

    #[test]
    fn bec_erasure_term() {
        let p = 0.3;
        let dk = CheckDegreeDistribution::right_regular(6).unwrap();
        let det = rate_upper_bound_quantized_detail(&Channel::bec(p).unwrap(), &dk, 3, DEFAULT_SEED).unwrap();
        assert_abs_diff_eq!(det.erasure_term, p / (1.0 - (1.0 - p as f64).powi(6)), epsilon = 1e-14);
        assert_abs_diff_eq!(erasure_term(&dk, 0.0), 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(erasure_term(&dk, 1e-9), 1.0 / 6.0, epsilon = 1e-8);
    }

    #[test]
    fn bsc_quantized_coefficients_collapse() {
        let ch = Channel::bsc(0.06).unwrap();
        let a = density_bound_coeffs(&ch, DensityMethod::TwoLevel).unwrap();
        let b = density_bound_coeffs(&ch, DensityMethod::Quantized(2)).unwrap();
        assert_abs_diff_eq!(a.k1, b.k1, epsilon = 1e-12);
        assert_abs_diff_eq!(a.k2, b.k2, epsilon = 1e-12);
    }

    #[test]
    fn bec_coefficients() {
        let ch = Channel::bec(0.5).unwrap();
        let k = density_bound_coeffs(&ch, DensityMethod::TwoLevelBec).unwrap();
        assert_abs_diff_eq!(k.k1, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k.k2, 1.0 / LN_2, epsilon = 1e-12);
        let v = density_lower_bound(&k, GapToCapacity::new(0.1).unwrap());
        assert_abs_diff_eq!(v.value, 3.691, epsilon = 1e-3);
        let half = density_lower_bound(&k, GapToCapacity::new(0.5).unwrap());
        assert_abs_diff_eq!(half.value, 2.0, epsilon = 1e-12);
        assert!(density_bound_coeffs(&Channel::bsc(0.1).unwrap(), DensityMethod::TwoLevelBec).is_err());
    }

    #[test]
    fn gap_near_one_is_trivial() {
        let k = DensityBoundCoefficients {
            k1: -0.5,
            k2: 1.0,
            method: CoefficientMethod::TwoLevel,
        };
        let v = density_lower_bound(&k, GapToCapacity::new(1.0 - 1e-9).unwrap());
        assert!(v.trivial);
        assert!(GapToCapacity::new(1.0).is_err());
        assert!(GapToCapacity::new(0.0).is_err());
    }

    #[test]
    fn quantized_density_beats_two_level() {
        let ch = Channel::biawgn(1.0).unwrap();
        let gap = GapToCapacity::new(0.1).unwrap();
        let a = density_lower_bound(&density_bound_coeffs(&ch, DensityMethod::TwoLevel).unwrap(), gap);
        let b = density_lower_bound(&density_bound_coeffs(&ch, DensityMethod::Quantized(2)).unwrap(), gap);
        assert!(b.value > a.value);
        let k2 = density_bound_coeffs(&ch, DensityMethod::Quantized(2)).unwrap().k2;
        let k3 = density_bound_coeffs(&ch, DensityMethod::Quantized(3)).unwrap().k2;
        assert!(k3 >= k2);
    }

    #[test]
    fn degenerate_channels_are_rejected() {
        assert!(matches!(
            density_bound_coeffs(&Channel::bsc(0.0).unwrap(), DensityMethod::TwoLevel),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            density_bound_coeffs(&Channel::bsc(0.5).unwrap(), DensityMethod::Quantized(2)),
            Err(Error::Degenerate(_))
        ));
    }

    fn symmetric_probs(d: usize, raw: &[f64], split: &[f64]) -> TransitionProbs {
        let half = 1usize << (d - 1);
        let total: f64 = raw[..half].iter().sum();
        let mut p = vec![0.0; 2 * half];
        for i in 0..half {
            let q = raw[i] / total;
            let s = 0.5 + 0.5 * split[i];
            p[i] = q * s;
            p[2 * half - 1 - i] = q * (1.0 - s);
        }
        TransitionProbs::new(d, p).unwrap()
    }

    proptest! {
        #[test]
        fn chi_dominates_hard_decision(raw in proptest::collection::vec(0.01f64..1.0, 4), split in proptest::collection::vec(0.0f64..1.0, 4)) {
            let probs = symmetric_probs(3, &raw, &split);
            let w = probs.bad_half_mass();
            prop_assert!(chi_objective(&probs) >= (1.0 - 2.0 * w).powi(2) - 1e-12);
        }

        #[test]
        fn surrogate_collapses(raw in proptest::collection::vec(0.01f64..1.0, 2), split in proptest::collection::vec(0.0f64..1.0, 2), k in 1usize..13) {
            let probs = symmetric_probs(2, &raw, &split);
            let dk = CheckDegreeDistribution::right_regular(k).unwrap();
            let surrogate = |x: f64| 1.0 - 2.0 / LN_2 * (0.5 - x).powi(2);
            let s = entropy_sum_with_kernel(&dk, &probs, surrogate).unwrap();
            let closed = 1.0 - chi_objective(&probs).powi(k as i32) / (2.0 * LN_2);
            prop_assert!((s - closed).abs() < 1e-12);
        }
    }
}
