//! Threshold searches over `Eb/N0`, regeneration of the threshold tables and
//! the parameter sweeps behind the comparison plots.

use rayon::prelude::*;

use crate::channels::{biawgn_from_ebn0, Channel};
use crate::ensembles::{builtin, CheckDegreeDistribution, EnsembleSpec};
use crate::error::{Error, Result};
use crate::numerics::{entropy_bits, solve_root, Interval, ToleranceSpec, DEFAULT_SEED};
use crate::quantized::{
    density_bound_coeffs_seeded, density_lower_bound, rate_upper_bound_2level, rate_upper_bound_quantized_detail,
    DensityMethod, GapToCapacity,
};
use crate::unquantized::{
    ber_h2_normalized, legacy_h2_normalized, rate_upper_bound_unquantized, SeriesConfig,
};

/// Bound whose crossing with the design rate defines a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThresholdMethod {
    CapacityLimit,
    TwoLevel,
    Quantized(usize),
    Unquantized,
}

impl ThresholdMethod {
    /// Columns of the threshold tables, in print order.
    pub const TABLE_COLUMNS: [ThresholdMethod; 5] = [
        ThresholdMethod::CapacityLimit,
        ThresholdMethod::TwoLevel,
        ThresholdMethod::Quantized(2),
        ThresholdMethod::Quantized(3),
        ThresholdMethod::Unquantized,
    ];

    pub fn tag(&self) -> String {
        match self {
            ThresholdMethod::CapacityLimit => "capacity_limit".into(),
            ThresholdMethod::TwoLevel => "two_level".into(),
            ThresholdMethod::Quantized(d) => format!("quantized({d})"),
            ThresholdMethod::Unquantized => "unquantized".into(),
        }
    }
}

/// Settings shared by threshold searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub bracket_db: Interval,
    pub tol_db: f64,
    pub series: SeriesConfig,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            bracket_db: Interval { lo: -3.0, hi: 5.0 },
            tol_db: 1e-3,
            series: SeriesConfig::default(),
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdQuery {
    pub ensemble: EnsembleSpec,
    pub method: ThresholdMethod,
    pub config: SearchConfig,
}

impl ThresholdQuery {
    pub fn new(ensemble: EnsembleSpec, method: ThresholdMethod) -> Self {
        ThresholdQuery {
            ensemble,
            method,
            config: SearchConfig::default(),
        }
    }
}

/// Value of the selected rate bound (or the capacity) on `channel`.
pub fn rate_bound(
    method: ThresholdMethod,
    channel: &Channel,
    dk: &CheckDegreeDistribution,
    series: SeriesConfig,
    seed: u64,
) -> Result<f64> {
    match method {
        ThresholdMethod::CapacityLimit => channel.capacity(),
        ThresholdMethod::TwoLevel => rate_upper_bound_2level(channel, dk),
        ThresholdMethod::Quantized(d) => Ok(rate_upper_bound_quantized_detail(channel, dk, d, seed)?.value),
        ThresholdMethod::Unquantized => rate_upper_bound_unquantized(channel, dk, series),
    }
}

const PRESCAN: usize = 16;
const FALLBACK_SCAN: usize = 128;

fn bisect<F: Fn(f64) -> Result<f64>>(g: &F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if g(mid)? >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn grid(iv: Interval, n: usize) -> Vec<f64> {
    (0..n).map(|j| iv.lo + iv.width() * j as f64 / (n - 1) as f64).collect()
}

/// Smallest `Eb/N0` (dB) in the bracket at which the bound reaches the design rate.
pub fn threshold_ebn0(q: &ThresholdQuery) -> Result<f64> {
    let cfg = &q.config;
    if !(cfg.tol_db > 0.0) || !cfg.bracket_db.is_finite() {
        return Err(Error::Domain("threshold search needs a finite bracket and a positive tolerance".into()));
    }
    let rate = q.ensemble.design_rate;
    let dk = q.ensemble.dk();
    let g = |db: f64| -> Result<f64> {
        let ch = biawgn_from_ebn0(db, rate)?;
        Ok(rate_bound(q.method, &ch, &dk, cfg.series, cfg.seed)? - rate)
    };
    let xs = grid(cfg.bracket_db, PRESCAN);
    let vs = xs.iter().map(|&x| g(x)).collect::<Result<Vec<f64>>>()?;
    let last = *vs.last().expect("non-empty scan");
    if last < 0.0 {
        return Err(Error::Bracket {
            rate,
            lo_db: cfg.bracket_db.lo,
            hi_db: cfg.bracket_db.hi,
            bound_lo: vs[0] + rate,
            bound_hi: last + rate,
        });
    }
    if vs[0] >= 0.0 {
        return Ok(cfg.bracket_db.lo);
    }
    let monotone = vs.windows(2).all(|w| w[1] >= w[0] - 1e-9);
    let (xs, vs) = if monotone {
        (xs, vs)
    } else {
        let xs = grid(cfg.bracket_db, FALLBACK_SCAN);
        let vs = xs.iter().map(|&x| g(x)).collect::<Result<Vec<f64>>>()?;
        (xs, vs)
    };
    let j = vs.iter().position(|&v| v >= 0.0).expect("last point is non-negative");
    bisect(&g, xs[j - 1], xs[j], cfg.tol_db)
}

/// Where a table value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Computed,
    Reference,
}

impl Provenance {
    pub fn tag(&self) -> &'static str {
        match self {
            Provenance::Computed => "computed",
            Provenance::Reference => "reference",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableCell {
    pub method: String,
    pub value_db: f64,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub ensemble: String,
    pub design_rate: f64,
    /// Factors applied to the printed λ and ρ coefficients.
    pub renormalization: (f64, f64),
    pub cells: Vec<TableCell>,
}

impl TableRow {
    pub fn value(&self, method: &str) -> Option<f64> {
        self.cells.iter().find(|c| c.method == method).map(|c| c.value_db)
    }
}

/// Ensembles of a table with their reference constants (DE threshold and,
/// for the first table, the typical-pairs upper bound).
pub fn table_ensembles(id: u8) -> Result<Vec<(&'static str, f64, Option<f64>)>> {
    Ok(match id {
        1 => vec![
            ("gallager_3_6", 1.110, Some(0.673)),
            ("gallager_4_6", 1.674, Some(-0.423)),
            ("gallager_3_4", 1.003, Some(-0.510)),
        ],
        2 => vec![
            ("table2_row1", 0.809, None),
            ("table2_row2", 0.335, None),
            ("table2_row3", 0.310, None),
            ("table2_row4", 0.274, None),
        ],
        3 => vec![
            ("table3_row1", 2.049, None),
            ("table3_row2", 1.874, None),
            ("table3_row3", 1.763, None),
        ],
        other => return Err(Error::Domain(format!("there is no table {other}; expected 1, 2 or 3"))),
    })
}

pub fn reproduce_table(id: u8) -> Result<Vec<TableRow>> {
    reproduce_table_with(id, &SearchConfig::default())
}

/// Regenerates every computable column of a table; rows and columns are
/// evaluated in parallel and assembled in print order.
pub fn reproduce_table_with(id: u8, cfg: &SearchConfig) -> Result<Vec<TableRow>> {
    let rows = table_ensembles(id)?;
    let specs = rows
        .iter()
        .map(|(name, _, _)| builtin(name))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, ThresholdMethod)> = (0..specs.len())
        .flat_map(|i| ThresholdMethod::TABLE_COLUMNS.into_iter().map(move |m| (i, m)))
        .collect();
    let values = jobs
        .par_iter()
        .map(|&(i, m)| {
            threshold_ebn0(&ThresholdQuery {
                ensemble: specs[i].clone(),
                method: m,
                config: *cfg,
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    let per_row = ThresholdMethod::TABLE_COLUMNS.len();
    Ok(rows
        .iter()
        .zip(&specs)
        .enumerate()
        .map(|(i, ((_, de, typical), spec))| {
            let mut cells: Vec<TableCell> = ThresholdMethod::TABLE_COLUMNS
                .iter()
                .zip(&values[i * per_row..(i + 1) * per_row])
                .map(|(m, &v)| TableCell {
                    method: m.tag(),
                    value_db: v,
                    provenance: Provenance::Computed,
                })
                .collect();
            if let Some(u) = typical {
                cells.push(TableCell {
                    method: "typical_pairs_upper".into(),
                    value_db: *u,
                    provenance: Provenance::Reference,
                });
            }
            cells.push(TableCell {
                method: "density_evolution".into(),
                value_db: *de,
                provenance: Provenance::Reference,
            });
            TableRow {
                ensemble: spec.name.clone(),
                design_rate: spec.design_rate,
                renormalization: spec.renormalization(),
                cells,
            }
        })
        .collect())
}

/// One point of a density-bound sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityPoint {
    pub ebn0_db: f64,
    pub capacity: f64,
    /// `None` when the rate is at or beyond capacity.
    pub epsilon: Option<f64>,
    pub value: Option<f64>,
    pub trivial: bool,
}

impl DensityPoint {
    pub fn beyond_capacity(&self) -> bool {
        self.epsilon.is_none()
    }
}

pub fn sweep_density_bound(rate: f64, method: DensityMethod, ebn0_grid: &[f64]) -> Result<Vec<DensityPoint>> {
    sweep_density_bound_seeded(rate, method, ebn0_grid, DEFAULT_SEED)
}

pub fn sweep_density_bound_seeded(rate: f64, method: DensityMethod, ebn0_grid: &[f64], seed: u64) -> Result<Vec<DensityPoint>> {
    ebn0_grid
        .par_iter()
        .map(|&db| {
            let ch = biawgn_from_ebn0(db, rate)?;
            let capacity = ch.capacity()?;
            if rate >= capacity {
                return Ok(DensityPoint {
                    ebn0_db: db,
                    capacity,
                    epsilon: None,
                    value: None,
                    trivial: true,
                });
            }
            let gap = GapToCapacity::from_rate(rate, capacity)?;
            let k = density_bound_coeffs_seeded(&ch, method, seed)?;
            let b = density_lower_bound(&k, gap);
            Ok(DensityPoint {
                ebn0_db: db,
                capacity,
                epsilon: Some(gap.epsilon()),
                value: Some(b.value),
                trivial: b.trivial,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularThresholdPoint {
    pub rate: f64,
    pub method: ThresholdMethod,
    pub threshold_db: f64,
}

/// Thresholds of right-regular ensembles (all checks of degree `a_r`) across rates.
pub fn sweep_right_regular_threshold(
    a_r: usize,
    rate_grid: &[f64],
    methods: &[ThresholdMethod],
    cfg: &SearchConfig,
) -> Result<Vec<RegularThresholdPoint>> {
    if a_r < 2 {
        return Err(Error::Domain(format!("right degree {a_r} must be at least 2")));
    }
    let dk = CheckDegreeDistribution::right_regular(a_r)?;
    let mut rates = rate_grid.to_vec();
    rates.sort_by(f64::total_cmp);
    let jobs: Vec<(f64, ThresholdMethod)> = rates
        .iter()
        .flat_map(|&r| methods.iter().map(move |&m| (r, m)))
        .collect();
    jobs.par_iter()
        .map(|&(rate, method)| {
            let ensemble = EnsembleSpec::from_dk(format!("right_regular_{a_r}"), dk.clone(), rate)?;
            let threshold_db = threshold_ebn0(&ThresholdQuery {
                ensemble,
                method,
                config: *cfg,
            })?;
            Ok(RegularThresholdPoint {
                rate,
                method,
                threshold_db,
            })
        })
        .collect()
}

/// BIAWGN channel whose capacity equals `c`.
pub fn biawgn_with_capacity(c: f64) -> Result<Channel> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Domain(format!("target capacity {c} is outside (0, 1)")));
    }
    let f = |log_sigma: f64| -> f64 {
        Channel::biawgn(log_sigma.exp())
            .and_then(|ch| ch.capacity())
            .map_or(f64::NAN, |v| v - c)
    };
    let tol = ToleranceSpec {
        abs_tol: 1e-13,
        ..Default::default()
    };
    let ls = solve_root(f, Interval { lo: (0.05f64).ln(), hi: (50.0f64).ln() }, &tol)?;
    Channel::biawgn(ls.exp())
}

/// Which bit-error bound to use when designing for a target error rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BerBoundKind {
    Series,
    Legacy,
}

/// Channel quantities entering the normalized-density bit-error bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct BerModel {
    pub capacity: f64,
    pub moments: Vec<f64>,
    pub w: f64,
}

impl BerModel {
    pub fn from_channel(channel: &Channel, series: SeriesConfig) -> Result<Self> {
        Ok(BerModel {
            capacity: channel.capacity()?,
            moments: channel.tanh_moments(series.truncation_p)?,
            w: channel.error_weight_w(),
        })
    }

    /// Lower bound on `h2(P_b)` at rate `rate` and normalized density `t`.
    pub fn h2_bound(&self, kind: BerBoundKind, rate: f64, t: f64) -> f64 {
        match kind {
            BerBoundKind::Series => ber_h2_normalized(self.capacity, rate, t, &self.moments),
            BerBoundKind::Legacy => legacy_h2_normalized(self.capacity, rate, t, self.w),
        }
    }

    /// Smallest `t ≥ 1` for which the bound admits bit error probability `pb`.
    pub fn required_t(&self, kind: BerBoundKind, rate: f64, pb: f64) -> Result<f64> {
        if !(pb > 0.0 && pb < 0.5) {
            return Err(Error::Domain(format!("target bit error rate {pb} is outside (0, 1/2)")));
        }
        if !(rate > 0.0 && rate < 1.0) {
            return Err(Error::Domain(format!("rate {rate} is outside (0, 1)")));
        }
        let y = entropy_bits(pb);
        let f = |t: f64| self.h2_bound(kind, rate, t) - y;
        if f(1.0) <= 0.0 {
            return Ok(1.0);
        }
        let mut hi = 2.0;
        while f(hi) > 0.0 {
            hi *= 2.0;
            if hi > 1e9 {
                return Err(Error::Domain(format!(
                    "bit error rate {pb} is unreachable at rate {rate} for any density"
                )));
            }
        }
        let tol = ToleranceSpec {
            abs_tol: 1e-12,
            ..Default::default()
        };
        solve_root(f, Interval { lo: 1.0, hi }, &tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerPoint {
    pub epsilon: f64,
    pub t: f64,
    pub pb_series: f64,
    pub pb_legacy: f64,
}

/// Bit-error lower bounds over a grid of gaps and normalized densities on the
/// BIAWGN channel of capacity `c_target`.
pub fn sweep_ber_bound(c_target: f64, epsilons: &[f64], t_grid: &[f64], series: SeriesConfig) -> Result<Vec<BerPoint>> {
    let ch = biawgn_with_capacity(c_target)?;
    let model = BerModel::from_channel(&ch, series)?;
    let mut out = Vec::with_capacity(epsilons.len() * t_grid.len());
    for &eps in epsilons {
        let gap = GapToCapacity::new(eps)?;
        let rate = (1.0 - gap.epsilon()) * model.capacity;
        for &t in t_grid {
            if !(t >= 1.0) {
                return Err(Error::Domain(format!("normalized density {t} must be at least 1")));
            }
            let pb = |kind| -> Result<f64> {
                let h = model.h2_bound(kind, rate, t);
                Ok(crate::unquantized::BerBound::from_h2(h)?.pb_bound)
            };
            out.push(BerPoint {
                epsilon: eps,
                t,
                pb_series: pb(BerBoundKind::Series)?,
                pb_legacy: pb(BerBoundKind::Legacy)?,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn capacity_limit_of_gallager_4_6() {
        let q = ThresholdQuery::new(builtin("gallager_4_6").unwrap(), ThresholdMethod::CapacityLimit);
        assert_abs_diff_eq!(threshold_ebn0(&q).unwrap(), -0.495, epsilon = 5e-3);
    }

    #[test]
    fn bisection_invariant() {
        let q = ThresholdQuery::new(builtin("gallager_3_6").unwrap(), ThresholdMethod::TwoLevel);
        let th = threshold_ebn0(&q).unwrap();
        let dk = q.ensemble.dk();
        let at = |db: f64| {
            rate_bound(
                q.method,
                &biawgn_from_ebn0(db, 0.5).unwrap(),
                &dk,
                SeriesConfig::default(),
                DEFAULT_SEED,
            )
            .unwrap()
        };
        assert!(at(th - 1e-3) < 0.5);
        assert!(at(th + 1e-3) >= 0.5);
    }

    #[test]
    fn bracket_failure_reports_endpoints() {
        let mut q = ThresholdQuery::new(builtin("gallager_3_6").unwrap(), ThresholdMethod::CapacityLimit);
        q.config.bracket_db = Interval { lo: -3.0, hi: -1.0 };
        match threshold_ebn0(&q) {
            Err(Error::Bracket { bound_hi, rate, .. }) => assert!(bound_hi < rate),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn capacity_target_channel() {
        let ch = biawgn_with_capacity(0.5).unwrap();
        assert_abs_diff_eq!(ch.capacity().unwrap(), 0.5, epsilon = 1e-10);
        assert!(biawgn_with_capacity(1.2).is_err());
    }

    #[test]
    fn required_density_grows_towards_capacity() {
        let ch = biawgn_with_capacity(0.5).unwrap();
        let m = BerModel::from_channel(&ch, SeriesConfig::default()).unwrap();
        let a = m.required_t(BerBoundKind::Series, 0.45, 1e-6).unwrap();
        let b = m.required_t(BerBoundKind::Series, 0.49, 1e-6).unwrap();
        assert!(b > a && a >= 1.0);
        let legacy = m.required_t(BerBoundKind::Legacy, 0.49, 1e-6).unwrap();
        assert!(legacy < b);
    }

    #[test]
    fn density_sweep_flags_points_beyond_capacity() {
        let pts = sweep_density_bound(0.5, DensityMethod::TwoLevel, &[0.0, 0.5, 1.0]).unwrap();
        assert!(pts[0].beyond_capacity());
        assert!(!pts[1].beyond_capacity() && pts[1].value.unwrap() > 0.0);
    }

    #[test]
    fn ber_sweep_is_monotone_in_t() {
        let pts = sweep_ber_bound(0.5, &[0.01], &[1.0, 2.0, 3.0, 4.0], SeriesConfig::default()).unwrap();
        assert!(pts.windows(2).all(|w| w[1].pb_series <= w[0].pb_series));
        assert!(pts.iter().all(|p| p.pb_series >= p.pb_legacy));
    }

    #[test]
    fn unknown_table() {
        assert!(reproduce_table(4).is_err());
    }
}
