//! Numerical kernels shared by every bound: adaptive Gauss-Kronrod quadrature,
//! Brent root finding, multi-start coordinate ascent and the binary entropy
//! function together with its power series around 1/2.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::LN_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Seed used by [`maximize`] when none is supplied.
pub const DEFAULT_SEED: u64 = 0x5eed_0f_b0u64;

/// A (possibly unbounded) interval of the extended real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(Error::Domain(format!("invalid interval ({lo}, {hi})")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Accuracy requirements for quadrature and root finding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        ToleranceSpec {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 1 << 20,
        }
    }
}

impl ToleranceSpec {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Result<Self> {
        if !(abs_tol > 0.0) || !(rel_tol > 0.0) {
            return Err(Error::Domain(format!(
                "tolerances must be positive (abs {abs_tol}, rel {rel_tol})"
            )));
        }
        Ok(ToleranceSpec {
            abs_tol,
            rel_tol,
            ..Default::default()
        })
    }

    pub fn with_max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n.max(1);
        self
    }
}

// Kronrod abscissae and weights for the 7/15-point pair; the Gauss weights
// belong to the odd-indexed Kronrod nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut res_k = f_center * WGK[7];
    let mut res_g = f_center * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    if !res_k.is_finite() {
        return Err(Error::Domain(format!(
            "integrand is not finite on [{a}, {b}]"
        )));
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Segment { a, b, value, error })
}

fn integrate_finite<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: &ToleranceSpec) -> Result<f64> {
    let first = gauss_kronrod_15(f, a, b)?;
    let mut total = first.value;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::new();
    let mut settled: Vec<Segment> = Vec::new();
    heap.push(first);
    let mut subdivisions = 1usize;

    loop {
        if total_err <= tol.abs_tol + tol.rel_tol * total.abs() {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b)
            || (worst.b - worst.a) <= 4.0 * f64::EPSILON * (worst.a.abs() + worst.b.abs())
        {
            // interval exhausted at machine precision
            settled.push(worst);
            continue;
        }
        if subdivisions >= tol.max_subdivisions {
            heap.push(worst);
            let estimate: f64 = heap.iter().chain(settled.iter()).map(|s| s.value).sum();
            return Err(Error::NonConvergence {
                estimate,
                error: total_err,
                subdivisions,
            });
        }
        let left = gauss_kronrod_15(f, worst.a, mid)?;
        let right = gauss_kronrod_15(f, mid, worst.b)?;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
        if subdivisions % 64 == 0 {
            // resum to keep the running totals from drifting
            total = heap.iter().chain(settled.iter()).map(|s| s.value).sum();
            total_err = heap.iter().chain(settled.iter()).map(|s| s.error).sum();
        }
    }
    Ok(heap.iter().chain(settled.iter()).map(|s| s.value).sum())
}

/// Integrates `f` over `domain` with adaptive 7/15-point Gauss-Kronrod
/// subdivision. Unbounded ends are mapped onto `(0, 1]` with `x = a + (1-t)/t`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, domain: Interval, tol: &ToleranceSpec) -> Result<f64> {
    let Interval { lo, hi } = domain;
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => integrate_finite(&f, lo, hi, tol),
        (true, false) => {
            let g = |t: f64| {
                let x = lo + (1.0 - t) / t;
                f(x) / (t * t)
            };
            integrate_finite(&g, 0.0, 1.0, tol)
        }
        (false, true) => {
            let g = |t: f64| {
                let x = hi - (1.0 - t) / t;
                f(x) / (t * t)
            };
            integrate_finite(&g, 0.0, 1.0, tol)
        }
        (false, false) => {
            let g = |t: f64| {
                let x = (1.0 - t) / t;
                (f(x) + f(-x)) / (t * t)
            };
            integrate_finite(&g, 0.0, 1.0, tol)
        }
    }
}

/// Finds a zero of `f` inside a sign-changing bracket with Brent's method.
///
/// Iteration stops once `f` vanishes exactly or the bracket is narrower than
/// `abs_tol` (plus a few ulps of the iterate).
pub fn solve_root<F: Fn(f64) -> f64>(f: F, bracket: Interval, tol: &ToleranceSpec) -> Result<f64> {
    if !bracket.is_finite() {
        return Err(Error::Domain("root bracket must be finite".into()));
    }
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::Domain("function is NaN at a bracket end".into()));
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }
    let (mut c, mut fc) = (b, fb);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..1000 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol.abs_tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::Domain(format!("function is NaN at {b}")));
        }
    }
    Ok(b)
}

/// Settings for [`maximize_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct MaximizeOptions {
    /// Number of starting points (at least 8 are always used).
    pub starts: usize,
    pub seed: u64,
    /// Upper limit on coordinate sweeps per start.
    pub max_sweeps: usize,
    /// Grid points scanned along a coordinate before the golden-section refinement.
    pub scan_points: usize,
}

impl Default for MaximizeOptions {
    fn default() -> Self {
        MaximizeOptions {
            starts: 8,
            seed: DEFAULT_SEED,
            max_sweeps: 200,
            scan_points: 12,
        }
    }
}

/// Best point found by the maximizer.
#[derive(Debug, Clone, PartialEq)]
pub struct Maximum {
    pub point: Vec<f64>,
    pub value: f64,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, x_tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > x_tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

fn coordinate_ascent<F: Fn(&[f64]) -> f64>(
    f: &F,
    bounds: &[Interval],
    start: Vec<f64>,
    tol: &ToleranceSpec,
    opts: &MaximizeOptions,
) -> Maximum {
    let mut x = start;
    let mut fx = sanitize(f(&x));
    let scan = opts.scan_points.max(3);
    for _ in 0..opts.max_sweeps {
        let before = fx;
        let moved_before = x.clone();
        for i in 0..x.len() {
            let Interval { lo, hi } = bounds[i];
            let mut probe = x.clone();
            let mut eval = |t: f64| {
                probe[i] = t;
                sanitize(f(&probe))
            };
            // coarse scan over the whole coordinate range
            let step = (hi - lo) / (scan - 1) as f64;
            let mut best_t = x[i];
            let mut best_v = fx;
            let mut best_j: Option<usize> = None;
            for j in 0..scan {
                let t = lo + step * j as f64;
                let v = eval(t);
                if v > best_v {
                    best_v = v;
                    best_t = t;
                    best_j = Some(j);
                }
            }
            let (ra, rb) = match best_j {
                Some(j) => (
                    lo + step * j.saturating_sub(1) as f64,
                    (lo + step * (j + 1) as f64).min(hi),
                ),
                None => ((x[i] - step).max(lo), (x[i] + step).min(hi)),
            };
            let x_tol = 1e-10 * (hi - lo);
            let (t, v) = golden_section(&mut eval, ra, rb, x_tol);
            if v > best_v {
                best_v = v;
                best_t = t;
            }
            if best_v > fx {
                fx = best_v;
                x[i] = best_t;
            }
        }
        let gain = fx - before;
        let shift = x
            .iter()
            .zip(&moved_before)
            .zip(bounds)
            .map(|((a, b), iv)| (a - b).abs() / iv.width())
            .fold(0.0, f64::max);
        if gain <= tol.abs_tol.max(tol.rel_tol * fx.abs()) && shift < 1e-9 {
            break;
        }
        if gain <= 0.0 {
            break;
        }
    }
    Maximum { point: x, value: fx }
}

/// Maximizes `f` over a box with the default deterministic multi-start settings.
pub fn maximize<F: Fn(&[f64]) -> f64>(f: F, bounds: &[Interval], tol: &ToleranceSpec) -> Result<Maximum> {
    maximize_with(f, bounds, tol, &MaximizeOptions::default(), &[])
}

/// Multi-start coordinate ascent with a golden-section line search on each
/// coordinate. `extra_starts` are tried in addition to the box centre and the
/// seeded random starts.
pub fn maximize_with<F: Fn(&[f64]) -> f64>(
    f: F,
    bounds: &[Interval],
    tol: &ToleranceSpec,
    opts: &MaximizeOptions,
    extra_starts: &[Vec<f64>],
) -> Result<Maximum> {
    if bounds.is_empty() || bounds.len() > 7 {
        return Err(Error::Domain(format!(
            "maximize supports 1 to 7 dimensions, got {}",
            bounds.len()
        )));
    }
    if bounds.iter().any(|b| !b.is_finite()) {
        return Err(Error::Domain("maximize needs a bounded box".into()));
    }
    let mut starts: Vec<Vec<f64>> = vec![bounds.iter().map(Interval::midpoint).collect()];
    for s in extra_starts {
        if s.len() != bounds.len() {
            return Err(Error::Domain("start point has the wrong dimension".into()));
        }
        starts.push(
            s.iter()
                .zip(bounds)
                .map(|(v, b)| v.clamp(b.lo, b.hi))
                .collect(),
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let wanted = opts.starts.max(8) + extra_starts.len();
    while starts.len() < wanted {
        starts.push(bounds.iter().map(|b| rng.random_range(b.lo..b.hi)).collect());
    }
    let mut best: Option<Maximum> = None;
    for s in starts {
        let m = coordinate_ascent(&f, bounds, s, tol, opts);
        if best.as_ref().is_none_or(|b| m.value > b.value) {
            best = Some(m);
        }
    }
    Ok(best.expect("at least one start"))
}

/// Binary entropy in bits, clamping arguments that overshoot `[0, 1]` by rounding.
pub(crate) fn entropy_bits(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -(x * x.ln() + (1.0 - x) * (-x).ln_1p()) / LN_2
}

fn check_probability(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("{x} is not a probability")));
    }
    Ok(())
}

/// Binary entropy function to base 2, with `0 log 0 = 0`.
pub fn h2(x: f64) -> Result<f64> {
    check_probability(x)?;
    Ok(entropy_bits(x))
}

/// Weight `1 / (2 ln 2 · p(2p-1))` of the p-th term in the expansion of `h2` around 1/2.
/// The weights sum to one over `p >= 1`.
pub fn series_weight(p: usize) -> f64 {
    let p = p as f64;
    1.0 / (2.0 * LN_2 * p * (2.0 * p - 1.0))
}

/// `h2` with its power series around 1/2 truncated after `m` terms.
/// Every truncation is an upper bound on `h2(x)`.
pub fn h2_series_truncated(x: f64, m: usize) -> Result<f64> {
    check_probability(x)?;
    if m == 0 {
        return Err(Error::Domain("series truncation order must be at least 1".into()));
    }
    let y = (1.0 - 2.0 * x).powi(2);
    let mut term = 1.0;
    let mut sum = 0.0;
    for p in 1..=m {
        term *= y;
        sum += series_weight(p) * term;
    }
    Ok(1.0 - sum)
}

/// The unique `x` in `[0, 1/2]` with `h2(x) = y`.
pub fn h2_inverse_low(y: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::Domain(format!("{y} is outside the range of h2")));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    if y == 1.0 {
        return Ok(0.5);
    }
    let tol = ToleranceSpec {
        abs_tol: 1e-300,
        ..Default::default()
    };
    solve_root(|x| entropy_bits(x) - y, Interval { lo: 0.0, hi: 0.5 }, &tol)
}
