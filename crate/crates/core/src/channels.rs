//! Memoryless binary-input output-symmetric channels described through the
//! density of their log-likelihood ratio under a transmitted zero.

use std::f64::consts::{LN_2, PI, SQRT_2};
use std::fmt;
use std::sync::{Arc, Mutex};

use serde_json::Value;

use crate::error::{Error, Result};
use crate::numerics::{integrate, Interval, ToleranceSpec};

/// Half-width, in standard deviations, of the window used for Gaussian integrals.
const GAUSS_SPAN: f64 = 12.0;
const MASS_TOL: f64 = 1e-10;

/// Absolutely continuous component of an LLR law.
#[derive(Debug, Clone, PartialEq)]
pub enum ContinuousPart {
    /// `weight` times the normal density with the given mean and variance.
    Gaussian { mean: f64, var: f64, weight: f64 },
    /// Piecewise-linear density through `points` (already scaled), zero outside.
    Tabulated { points: Vec<(f64, f64)>, cumulative: Vec<f64> },
}

impl ContinuousPart {
    fn tabulated(points: Vec<(f64, f64)>, scale: f64) -> Self {
        let points: Vec<(f64, f64)> = points.into_iter().map(|(l, a)| (l, a * scale)).collect();
        let mut cumulative = Vec::with_capacity(points.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in points.windows(2) {
            acc += 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1);
            cumulative.push(acc);
        }
        ContinuousPart::Tabulated { points, cumulative }
    }

    pub fn pdf(&self, l: f64) -> f64 {
        match self {
            ContinuousPart::Gaussian { mean, var, weight } => {
                weight * (-(l - mean).powi(2) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
            }
            ContinuousPart::Tabulated { points, .. } => {
                let n = points.len();
                if l < points[0].0 || l > points[n - 1].0 {
                    return 0.0;
                }
                let j = points.partition_point(|p| p.0 <= l).clamp(1, n - 1);
                let (x0, y0) = points[j - 1];
                let (x1, y1) = points[j];
                if x1 == x0 {
                    return y1;
                }
                y0 + (y1 - y0) * (l - x0) / (x1 - x0)
            }
        }
    }

    /// Interval outside which the density is zero or numerically negligible.
    pub fn support(&self) -> Interval {
        match self {
            ContinuousPart::Gaussian { mean, var, .. } => {
                let s = var.sqrt();
                Interval {
                    lo: mean - GAUSS_SPAN * s,
                    hi: mean + GAUSS_SPAN * s,
                }
            }
            ContinuousPart::Tabulated { points, .. } => Interval {
                lo: points[0].0,
                hi: points[points.len() - 1].0,
            },
        }
    }

    pub fn total_mass(&self) -> f64 {
        match self {
            ContinuousPart::Gaussian { weight, .. } => *weight,
            ContinuousPart::Tabulated { cumulative, .. } => *cumulative.last().unwrap_or(&0.0),
        }
    }

    fn tab_cdf(points: &[(f64, f64)], cumulative: &[f64], x: f64) -> f64 {
        let n = points.len();
        if x <= points[0].0 {
            return 0.0;
        }
        if x >= points[n - 1].0 {
            return cumulative[n - 1];
        }
        let j = points.partition_point(|p| p.0 <= x) - 1;
        let (x0, y0) = points[j];
        let (x1, y1) = points[j + 1];
        let yx = y0 + (y1 - y0) * (x - x0) / (x1 - x0);
        cumulative[j] + 0.5 * (x - x0) * (y0 + yx)
    }

    /// Mass of the open interval `(lo, hi)`; endpoints may be infinite.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        if !(hi > lo) {
            return 0.0;
        }
        match self {
            ContinuousPart::Gaussian { mean, var, weight } => {
                let s = var.sqrt();
                let zl = (lo - mean) / s;
                let zh = (hi - mean) / s;
                // pick the tail that keeps full relative precision
                let m = if zl >= 0.0 {
                    q_function(zl) - q_function(zh)
                } else if zh <= 0.0 {
                    q_function(-zh) - q_function(-zl)
                } else {
                    1.0 - q_function(-zl) - q_function(zh)
                };
                weight * m.max(0.0)
            }
            ContinuousPart::Tabulated { points, cumulative } => {
                let a = Self::tab_cdf(points, cumulative, lo);
                let b = Self::tab_cdf(points, cumulative, hi);
                (b - a).max(0.0)
            }
        }
    }
}

/// Gaussian tail probability `Pr{N(0,1) > z}`.
pub fn q_function(z: f64) -> f64 {
    0.5 * libm::erfc(z / SQRT_2)
}

/// Conditional law of the LLR given that zero was sent: point masses plus an
/// optional continuous part. Atom locations may be `+inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrDensity {
    atoms: Vec<(f64, f64)>,
    continuous: Option<ContinuousPart>,
}

impl LlrDensity {
    /// Builds a density and checks normalization, non-negativity and the
    /// symmetry `a(l) = e^l a(-l)`.
    pub fn new(atoms: Vec<(f64, f64)>, continuous: Option<ContinuousPart>) -> Result<Self> {
        let d = Self::new_unchecked(atoms, continuous);
        d.validate()?;
        Ok(d)
    }

    fn new_unchecked(atoms: Vec<(f64, f64)>, continuous: Option<ContinuousPart>) -> Self {
        let mut atoms: Vec<(f64, f64)> = atoms.into_iter().filter(|a| a.1 != 0.0).collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        LlrDensity { atoms, continuous }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn continuous(&self) -> Option<&ContinuousPart> {
        self.continuous.as_ref()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum::<f64>()
            + self.continuous.as_ref().map_or(0.0, ContinuousPart::total_mass)
    }

    fn validate(&self) -> Result<()> {
        for &(loc, mass) in &self.atoms {
            if loc.is_nan() || !mass.is_finite() || mass < 0.0 {
                return Err(Error::InvalidChannel(format!("bad atom ({loc}, {mass})")));
            }
            if loc == f64::NEG_INFINITY {
                return Err(Error::InvalidChannel(
                    "an atom at -inf violates output symmetry".into(),
                ));
            }
        }
        match &self.continuous {
            Some(ContinuousPart::Gaussian { mean, var, weight }) => {
                if !(var.is_finite() && *var > 0.0 && mean.is_finite() && *weight >= 0.0) {
                    return Err(Error::InvalidChannel(format!(
                        "gaussian part needs finite mean and positive variance (mean {mean}, var {var})"
                    )));
                }
            }
            Some(ContinuousPart::Tabulated { points, .. }) => {
                if points.len() < 2 {
                    return Err(Error::InvalidChannel("tabulated part needs at least two points".into()));
                }
                if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
                    return Err(Error::InvalidChannel("tabulated abscissae must increase strictly".into()));
                }
                if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite() || p.1 < 0.0) {
                    return Err(Error::InvalidChannel("tabulated values must be finite and non-negative".into()));
                }
            }
            None => {}
        }
        let total = self.total_mass();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidChannel(format!("total mass is {total}, expected 1")));
        }
        self.check_symmetry()
    }

    /// Checks `a(l) = e^l a(-l)` on atom pairs and on 64 points of the continuous part.
    pub fn check_symmetry(&self) -> Result<()> {
        for &(loc, mass) in &self.atoms {
            if loc > 0.0 && loc.is_finite() {
                let mirror = self.atom_mass_at(-loc);
                let expect = (-loc).exp() * mass;
                if (mirror - expect).abs() > 1e-9 * mass.max(1e-300) + 1e-15 {
                    return Err(Error::InvalidChannel(format!(
                        "atom at {loc} has mirror mass {mirror}, expected {expect}"
                    )));
                }
            } else if loc < 0.0 && self.atom_mass_at(-loc) == 0.0 {
                return Err(Error::InvalidChannel(format!("atom at {loc} has no positive mirror")));
            }
        }
        match &self.continuous {
            None => Ok(()),
            Some(part @ ContinuousPart::Gaussian { .. }) => {
                let sup = part.support();
                let hi = sup.hi.abs().max(sup.lo.abs()) / 2.0;
                for j in 0..64 {
                    let l = hi * (j as f64 + 0.5) / 64.0;
                    let pos = part.pdf(l);
                    let neg = part.pdf(-l) * l.exp();
                    if (pos - neg).abs() > 1e-9 * pos.max(neg) + 1e-300 {
                        return Err(Error::InvalidChannel(format!(
                            "continuous part is not symmetric at l = {l}: a(l) = {pos}, e^l a(-l) = {neg}"
                        )));
                    }
                }
                Ok(())
            }
            Some(part @ ContinuousPart::Tabulated { points, .. }) => {
                // tabulated data is only as good as its printed digits; compare
                // at the tabulated abscissae whose mirror lies inside the table
                let peak = points.iter().map(|p| p.1).fold(0.0, f64::max);
                let sup = part.support();
                for &(l, a) in points.iter().filter(|p| p.0 > 0.0 && -p.0 >= sup.lo) {
                    let neg = part.pdf(-l) * l.exp();
                    if (a - neg).abs() > 1e-4 * a.max(neg) + 1e-9 * peak {
                        return Err(Error::InvalidChannel(format!(
                            "tabulated density is not symmetric at l = {l}: a(l) = {a}, e^l a(-l) = {neg}"
                        )));
                    }
                }
                for &(l, a) in points.iter().filter(|p| p.0 < 0.0 && -p.0 > sup.hi) {
                    if a > 1e-9 * peak {
                        return Err(Error::InvalidChannel(format!(
                            "tabulated density has mass at {l} without a positive mirror"
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    fn atom_mass_at(&self, loc: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| (a.0 - loc).abs() <= 1e-12 * loc.abs().max(1.0))
            .map(|a| a.1)
            .sum()
    }

    /// Parses the JSON form
    /// `{"atoms": [[l, m], ...], "continuous": {"type": "gaussian", "mean": m, "var": v}}`
    /// or with `{"type": "tabulated", "points": [[l, a], ...]}`. Atom locations may be
    /// the strings `"inf"`/`"+inf"`. Tabulated parts are rescaled to carry the mass the
    /// atoms leave over.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let obj = doc
            .as_object()
            .ok_or_else(|| Error::Parse("density document must be an object".into()))?;
        let mut atoms = Vec::new();
        if let Some(list) = obj.get("atoms") {
            for item in pairs(list, "atoms")? {
                atoms.push(item);
            }
        }
        let atom_mass: f64 = atoms.iter().map(|a| a.1).sum();
        let continuous = match obj.get("continuous") {
            None | Some(Value::Null) => None,
            Some(c) => {
                let kind = c
                    .get("type")
                    .and_then(Value::as_str)
                    .ok_or_else(|| Error::Parse("continuous.type is missing".into()))?;
                match kind {
                    "gaussian" => {
                        let num = |k: &str| {
                            c.get(k)
                                .and_then(Value::as_f64)
                                .ok_or_else(|| Error::Parse(format!("continuous.{k} must be a number")))
                        };
                        Some(ContinuousPart::Gaussian {
                            mean: num("mean")?,
                            var: num("var")?,
                            weight: 1.0 - atom_mass,
                        })
                    }
                    "tabulated" => {
                        let pts = pairs(
                            c.get("points")
                                .ok_or_else(|| Error::Parse("continuous.points is missing".into()))?,
                            "continuous.points",
                        )?;
                        if pts.len() < 2 {
                            return Err(Error::InvalidChannel("tabulated part needs at least two points".into()));
                        }
                        let raw = ContinuousPart::tabulated(pts.clone(), 1.0).total_mass();
                        if !(raw > 0.0) {
                            return Err(Error::InvalidChannel("tabulated density integrates to zero".into()));
                        }
                        Some(ContinuousPart::tabulated(pts, (1.0 - atom_mass) / raw))
                    }
                    other => return Err(Error::Parse(format!("unknown continuous.type '{other}'"))),
                }
            }
        };
        LlrDensity::new(atoms, continuous)
    }
}

fn parse_location(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| Error::Parse(format!("bad number {n}"))),
        Value::String(s) => match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "+infinity" => Ok(f64::INFINITY),
            "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
            other => other.parse().map_err(|_| Error::Parse(format!("bad location '{s}'"))),
        },
        other => Err(Error::Parse(format!("expected a number, got {other}"))),
    }
}

fn pairs(v: &Value, field: &str) -> Result<Vec<(f64, f64)>> {
    let list = v
        .as_array()
        .ok_or_else(|| Error::Parse(format!("{field} must be a list of pairs")))?;
    list.iter()
        .map(|item| match item.as_array().map(Vec::as_slice) {
            Some([a, b]) => {
                let l = parse_location(a)?;
                let m = b
                    .as_f64()
                    .ok_or_else(|| Error::Parse(format!("{field}: second entry must be a number")))?;
                Ok((l, m))
            }
            _ => Err(Error::Parse(format!("{field}: each entry must be a two-element list"))),
        })
        .collect()
}

/// Channel family and its parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelKind {
    Bec { p: f64 },
    Bsc { eps: f64 },
    Biawgn { sigma: f64 },
    Custom(LlrDensity),
}

/// An MBIOS channel with its LLR law and a memo of tanh moments.
#[derive(Clone)]
pub struct Channel {
    kind: ChannelKind,
    density: LlrDensity,
    moments: Arc<Mutex<Vec<f64>>>,
}

impl fmt::Debug for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Channel").field("kind", &self.kind).finish()
    }
}

impl PartialEq for Channel {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ChannelKind::Bec { p } => write!(f, "bec:p={p}"),
            ChannelKind::Bsc { eps } => write!(f, "bsc:eps={eps}"),
            ChannelKind::Biawgn { sigma } => write!(f, "biawgn:sigma={sigma}"),
            ChannelKind::Custom(_) => write!(f, "custom"),
        }
    }
}

impl Channel {
    pub fn bec(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidChannel(format!("erasure probability {p} is outside [0, 1]")));
        }
        let density = LlrDensity::new_unchecked(vec![(0.0, p), (f64::INFINITY, 1.0 - p)], None);
        Ok(Self::from_parts(ChannelKind::Bec { p }, density))
    }

    pub fn bsc(eps: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&eps) {
            return Err(Error::InvalidChannel(format!("crossover probability {eps} is outside [0, 1/2]")));
        }
        let l0 = ((1.0 - eps) / eps).ln();
        let atoms = if eps == 0.5 {
            vec![(0.0, 1.0)]
        } else {
            vec![(l0, 1.0 - eps), (-l0, eps)]
        };
        Ok(Self::from_parts(ChannelKind::Bsc { eps }, LlrDensity::new_unchecked(atoms, None)))
    }

    pub fn biawgn(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidChannel(format!("noise standard deviation {sigma} must be positive")));
        }
        let s2 = sigma * sigma;
        let part = ContinuousPart::Gaussian {
            mean: 2.0 / s2,
            var: 4.0 / s2,
            weight: 1.0,
        };
        Ok(Self::from_parts(
            ChannelKind::Biawgn { sigma },
            LlrDensity::new_unchecked(Vec::new(), Some(part)),
        ))
    }

    pub fn custom(density: LlrDensity) -> Result<Self> {
        density.validate()?;
        Ok(Self::from_parts(ChannelKind::Custom(density.clone()), density))
    }

    fn from_parts(kind: ChannelKind, density: LlrDensity) -> Self {
        Channel {
            kind,
            density,
            moments: Arc::new(Mutex::new(Vec::new())),
        }
    }

    pub fn kind(&self) -> &ChannelKind {
        &self.kind
    }

    /// The LLR law under a transmitted zero.
    pub fn llr_density(&self) -> &LlrDensity {
        &self.density
    }

    /// Integrates `f` against the continuous part over `[lo, hi] ∩ support`.
    fn integrate_continuous<F: Fn(f64) -> f64>(&self, lo: f64, hi: f64, f: F) -> Result<f64> {
        let Some(part) = self.density.continuous() else {
            return Ok(0.0);
        };
        let sup = part.support();
        let (a, b) = (lo.max(sup.lo), hi.min(sup.hi));
        if !(b > a) {
            return Ok(0.0);
        }
        let tol = ToleranceSpec::default();
        integrate(|l| part.pdf(l) * f(l), Interval { lo: a, hi: b }, &tol)
    }

    /// Capacity in bits per channel use, `1 - E[log2(1 + e^{-L})]`.
    pub fn capacity(&self) -> Result<f64> {
        match self.kind {
            ChannelKind::Bec { p } => return Ok(1.0 - p),
            ChannelKind::Bsc { eps } => return Ok(1.0 - crate::numerics::entropy_bits(eps)),
            _ => {}
        }
        let mut c = 0.0;
        for &(l, m) in self.density.atoms() {
            c += m * capacity_kernel(l);
        }
        c += self.integrate_continuous(f64::NEG_INFINITY, f64::INFINITY, capacity_kernel)?;
        Ok(c)
    }

    /// `Pr{L < 0} + Pr{L = 0}/2`.
    pub fn error_weight_w(&self) -> f64 {
        match self.kind {
            ChannelKind::Bec { p } => return p / 2.0,
            ChannelKind::Bsc { eps } => return eps,
            ChannelKind::Biawgn { sigma } => return q_function(1.0 / sigma),
            ChannelKind::Custom(_) => {}
        }
        let mut w = 0.0;
        for &(l, m) in self.density.atoms() {
            if l < 0.0 {
                w += m;
            } else if l == 0.0 {
                w += 0.5 * m;
            }
        }
        if let Some(part) = self.density.continuous() {
            w += part.mass_between(f64::NEG_INFINITY, 0.0);
        }
        w
    }

    fn compute_moment(&self, p: usize) -> Result<f64> {
        match self.kind {
            ChannelKind::Bec { p: e } => return Ok(1.0 - e),
            ChannelKind::Bsc { eps } => return Ok((1.0 - 2.0 * eps).powi(2 * p as i32)),
            _ => {}
        }
        let two_p = 2 * p as i32;
        let kernel = |l: f64| (1.0 + (-l).exp()) * (0.5 * l).tanh().powi(two_p);
        let mut g = 0.0;
        for &(l, m) in self.density.atoms() {
            if l == f64::INFINITY {
                g += m;
            } else if l > 0.0 {
                g += m * kernel(l);
            }
        }
        g += self.integrate_continuous(0.0, f64::INFINITY, kernel)?;
        Ok(g)
    }

    /// Tanh moment `g_p = ∫_0^∞ a(l)(1 + e^{-l}) tanh^{2p}(l/2) dl`, memoized per channel.
    pub fn tanh_moment(&self, p: usize) -> Result<f64> {
        if p == 0 {
            return Err(Error::Domain("moment order must be at least 1".into()));
        }
        let mut cache = self.moments.lock().expect("moment cache poisoned");
        while cache.len() < p {
            let g = self.compute_moment(cache.len() + 1)?;
            cache.push(g);
        }
        Ok(cache[p - 1])
    }

    /// `g_1, …, g_P` in order.
    pub fn tanh_moments(&self, count: usize) -> Result<Vec<f64>> {
        if count == 0 {
            return Ok(Vec::new());
        }
        self.tanh_moment(count)?;
        let cache = self.moments.lock().expect("moment cache poisoned");
        Ok(cache[..count].to_vec())
    }

    /// The quantity `A = ∫ a(l)(1 - e^{-l})^2/(1 + e^{-l}) dl`, which equals `g_1`.
    pub fn quantity_a(&self) -> Result<f64> {
        self.tanh_moment(1)
    }

    /// Masses of the `2^d` LLR cells cut by `levels`, positive cells first.
    pub fn quantized_probs(&self, levels: &QuantizerLevels) -> TransitionProbs {
        let d = levels.d();
        let half = 1usize << (d - 1);
        let n = half << 1;
        let mut probs = vec![0.0; n];
        // bounds[i] = l_i with l_0 = inf and l_half = 0
        let mut bounds = Vec::with_capacity(half + 1);
        bounds.push(f64::INFINITY);
        bounds.extend_from_slice(levels.levels());
        bounds.push(0.0);
        for &(l, m) in self.density.atoms() {
            if l == 0.0 {
                probs[half - 1] += 0.5 * m;
                probs[half] += 0.5 * m;
            } else if l > 0.0 {
                // positive cell i is (l_{i+1}, l_i]
                let i = (0..half).find(|&i| l > bounds[i + 1] && l <= bounds[i]).unwrap_or(half - 1);
                probs[i] += m;
            } else {
                // mirrored cell n-1-i is [-l_i, -l_{i+1})
                let a = -l;
                let i = (0..half).find(|&i| a > bounds[i + 1] && a <= bounds[i]).unwrap_or(half - 1);
                probs[n - 1 - i] += m;
            }
        }
        if let Some(part) = self.density.continuous() {
            for i in 0..half {
                probs[i] += part.mass_between(bounds[i + 1], bounds[i]);
                probs[n - 1 - i] += part.mass_between(-bounds[i], -bounds[i + 1]);
            }
        }
        TransitionProbs { d, probs }
    }
}

/// `1 - log2(1 + e^{-l})`, stable for large `|l|`.
fn capacity_kernel(l: f64) -> f64 {
    if l == f64::INFINITY {
        return 1.0;
    }
    let softplus = (-l).max(0.0) + (-l.abs()).exp().ln_1p();
    1.0 - softplus / LN_2
}

/// BIAWGN channel whose noise matches `ebn0_db` at code rate `design_rate`.
pub fn biawgn_from_ebn0(ebn0_db: f64, design_rate: f64) -> Result<Channel> {
    if !(design_rate > 0.0 && design_rate < 1.0) {
        return Err(Error::Domain(format!("design rate {design_rate} is outside (0, 1)")));
    }
    if !ebn0_db.is_finite() {
        return Err(Error::Domain(format!("Eb/N0 {ebn0_db} dB is not finite")));
    }
    let s2 = 1.0 / (2.0 * design_rate * 10f64.powf(ebn0_db / 10.0));
    Channel::biawgn(s2.sqrt())
}

/// Quantizer thresholds `l_1 ≥ … ≥ l_{2^{d-1}-1} ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizerLevels {
    d: usize,
    levels: Vec<f64>,
}

impl QuantizerLevels {
    pub fn new(d: usize, levels: Vec<f64>) -> Result<Self> {
        if !(2..=16).contains(&d) {
            return Err(Error::Domain(format!("quantizer depth {d} must be between 2 and 16")));
        }
        let want = (1usize << (d - 1)) - 1;
        if levels.len() != want {
            return Err(Error::Domain(format!("a depth-{d} quantizer needs {want} levels, got {}", levels.len())));
        }
        if levels.iter().any(|l| l.is_nan() || *l < 0.0) {
            return Err(Error::Domain("levels must be non-negative".into()));
        }
        if levels.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::Domain("levels must be weakly decreasing".into()));
        }
        Ok(QuantizerLevels { d, levels })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }
}

/// Probabilities of the `2^d` quantizer outputs; `p_i` pairs with `p_{2^d-1-i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionProbs {
    d: usize,
    probs: Vec<f64>,
}

impl TransitionProbs {
    pub fn new(d: usize, probs: Vec<f64>) -> Result<Self> {
        if !(1..=16).contains(&d) || probs.len() != 1 << d {
            return Err(Error::Domain(format!("expected {} probabilities for d = {d}", 1usize << d.min(16))));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::Domain("probabilities must be finite and non-negative".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::Domain(format!("probabilities sum to {total}")));
        }
        Ok(TransitionProbs { d, probs })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Index paired with `i`.
    pub fn mirror(&self, i: usize) -> usize {
        self.probs.len() - 1 - i
    }

    /// `(q_i, r_i)` for each of the `2^{d-1}` pairs: pair mass and normalized
    /// difference (zero for empty pairs).
    pub fn pair_stats(&self) -> Vec<(f64, f64)> {
        let half = self.probs.len() / 2;
        (0..half)
            .map(|i| {
                let (a, b) = (self.probs[i], self.probs[self.mirror(i)]);
                let q = a + b;
                let r = if q > 0.0 { (a - b) / q } else { 0.0 };
                (q, r)
            })
            .collect()
    }

    /// Total mass of the lower ("bad") half of the outputs.
    pub fn bad_half_mass(&self) -> f64 {
        self.probs[self.probs.len() / 2..].iter().sum()
    }
}
