//! LDPC ensemble descriptions: edge-perspective degree polynomials, the
//! node-perspective check-degree fractions `d_k`, design rate and the
//! conversions between average right degree and parity-check density.

use std::collections::BTreeMap;

use serde_json::Value;

use crate::error::{Error, Result};

const SUM_TOL: f64 = 1e-10;

/// Edge-perspective polynomial `Σ c_i x^{i-1}`, stored as degree `i` to `c_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgePolynomial {
    coeffs: BTreeMap<usize, f64>,
    renormalization: f64,
}

impl EdgePolynomial {
    /// Coefficients must be non-negative and sum to one.
    pub fn new(coeffs: BTreeMap<usize, f64>) -> Result<Self> {
        let p = Self::normalized(coeffs)?;
        if (p.renormalization - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidEnsemble(format!(
                "coefficients sum to {}, expected 1",
                1.0 / p.renormalization
            )));
        }
        Ok(p)
    }

    /// Rescales the coefficients to sum to one and remembers the factor applied.
    pub fn normalized(coeffs: BTreeMap<usize, f64>) -> Result<Self> {
        let coeffs: BTreeMap<usize, f64> = coeffs.into_iter().filter(|&(_, c)| c != 0.0).collect();
        if coeffs.is_empty() {
            return Err(Error::InvalidEnsemble("polynomial has no terms".into()));
        }
        for (&i, &c) in &coeffs {
            if i < 2 {
                return Err(Error::InvalidEnsemble(format!("edge degree {i} must be at least 2")));
            }
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::InvalidEnsemble(format!("coefficient {c} of degree {i} is invalid")));
            }
        }
        let total: f64 = coeffs.values().sum();
        let factor = 1.0 / total;
        let coeffs = coeffs.into_iter().map(|(i, c)| (i, c * factor)).collect();
        Ok(EdgePolynomial {
            coeffs,
            renormalization: factor,
        })
    }

    /// `x^{a-1}`.
    pub fn monomial(degree: usize) -> Result<Self> {
        Self::new(BTreeMap::from([(degree, 1.0)]))
    }

    pub fn coeffs(&self) -> &BTreeMap<usize, f64> {
        &self.coeffs
    }

    /// Factor that was applied to the supplied coefficients (1 if none).
    pub fn renormalization(&self) -> f64 {
        self.renormalization
    }

    /// `∫_0^1 Σ c_i x^{i-1} dx = Σ c_i / i`.
    pub fn integral(&self) -> f64 {
        self.coeffs.iter().map(|(&i, &c)| c / i as f64).sum()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().map(|(&i, &c)| c * x.powi(i as i32 - 1)).sum()
    }
}

/// Fractions `d_k` of parity checks of degree `k`, with `a_R = Σ k d_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckDegreeDistribution {
    dk: BTreeMap<usize, f64>,
    a_r: f64,
}

impl CheckDegreeDistribution {
    pub fn new(dk: BTreeMap<usize, f64>) -> Result<Self> {
        let dk: BTreeMap<usize, f64> = dk.into_iter().filter(|&(_, f)| f != 0.0).collect();
        if dk.is_empty() {
            return Err(Error::InvalidEnsemble("check degree distribution is empty".into()));
        }
        for (&k, &f) in &dk {
            if k == 0 {
                return Err(Error::InvalidEnsemble("check degree must be at least 1".into()));
            }
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::InvalidEnsemble(format!("fraction {f} of degree {k} is outside [0, 1]")));
            }
        }
        let total: f64 = dk.values().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidEnsemble(format!("check fractions sum to {total}, expected 1")));
        }
        let a_r = dk.iter().map(|(&k, &f)| k as f64 * f).sum();
        Ok(CheckDegreeDistribution { dk, a_r })
    }

    /// All checks of degree `a`.
    pub fn right_regular(a: usize) -> Result<Self> {
        Self::new(BTreeMap::from([(a, 1.0)]))
    }

    pub fn fractions(&self) -> &BTreeMap<usize, f64> {
        &self.dk
    }

    pub fn a_r(&self) -> f64 {
        self.a_r
    }

    pub fn max_degree(&self) -> usize {
        *self.dk.keys().next_back().expect("non-empty")
    }

    /// `Σ_k d_k x^k`.
    pub fn generating(&self, x: f64) -> f64 {
        self.dk.iter().map(|(&k, &f)| f * x.powi(k as i32)).sum()
    }

    /// `Σ_k d_k f(k)`.
    pub fn expect<F: Fn(usize) -> f64>(&self, f: F) -> f64 {
        self.dk.iter().map(|(&k, &d)| d * f(k)).sum()
    }
}

/// Node-perspective fractions from the edge-perspective check polynomial.
pub fn dk_from_rho(rho: &EdgePolynomial) -> CheckDegreeDistribution {
    let total = rho.integral();
    let dk: BTreeMap<usize, f64> = rho
        .coeffs()
        .iter()
        .map(|(&k, &c)| (k, (c / k as f64) / total))
        .collect();
    CheckDegreeDistribution { dk, a_r: 1.0 / total }
}

/// `1 - ∫ρ / ∫λ`.
pub fn design_rate(lambda: &EdgePolynomial, rho: &EdgePolynomial) -> Result<f64> {
    let il = lambda.integral();
    if !(il > 0.0) {
        return Err(Error::InvalidEnsemble("variable-node polynomial integrates to zero".into()));
    }
    Ok(1.0 - rho.integral() / il)
}

fn check_rate(r: f64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("rate {r} is outside (0, 1)")));
    }
    Ok(())
}

/// Parity-check density `Δ = ((1-R)/R) a_R`: ones per information bit.
pub fn density_from_ar(a_r: f64, rate: f64) -> Result<f64> {
    check_rate(rate)?;
    Ok((1.0 - rate) / rate * a_r)
}

/// Normalized density `t = ((1-R)/(2-R)) a_R = R Δ / (2-R)`.
pub fn normalized_density(a_r: f64, rate: f64) -> Result<f64> {
    check_rate(rate)?;
    Ok((1.0 - rate) / (2.0 - rate) * a_r)
}

/// Inverse of [`normalized_density`] expressed as a density: `Δ = (2-R) t / R`.
pub fn density_from_normalized(t: f64, rate: f64) -> Result<f64> {
    check_rate(rate)?;
    Ok((2.0 - rate) * t / rate)
}

/// A named ensemble given by `(λ, ρ)` or directly by its check fractions.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub name: String,
    pub lambda: Option<EdgePolynomial>,
    pub rho: Option<EdgePolynomial>,
    pub dk_direct: Option<CheckDegreeDistribution>,
    pub design_rate: f64,
}

impl EnsembleSpec {
    pub fn from_lambda_rho(name: impl Into<String>, lambda: EdgePolynomial, rho: EdgePolynomial) -> Result<Self> {
        let r = design_rate(&lambda, &rho)?;
        check_rate(r).map_err(|_| Error::InvalidEnsemble(format!("design rate {r} is outside (0, 1)")))?;
        Ok(EnsembleSpec {
            name: name.into(),
            lambda: Some(lambda),
            rho: Some(rho),
            dk_direct: None,
            design_rate: r,
        })
    }

    pub fn from_dk(name: impl Into<String>, dk: CheckDegreeDistribution, rate: f64) -> Result<Self> {
        check_rate(rate).map_err(|_| Error::InvalidEnsemble(format!("design rate {rate} is outside (0, 1)")))?;
        Ok(EnsembleSpec {
            name: name.into(),
            lambda: None,
            rho: None,
            dk_direct: Some(dk),
            design_rate: rate,
        })
    }

    /// Check fractions, derived from ρ when no direct distribution was given.
    pub fn dk(&self) -> CheckDegreeDistribution {
        match (&self.dk_direct, &self.rho) {
            (Some(dk), _) => dk.clone(),
            (None, Some(rho)) => dk_from_rho(rho),
            (None, None) => unreachable!("ensemble without check degrees"),
        }
    }

    /// Factors applied to the printed λ and ρ coefficients, in that order.
    pub fn renormalization(&self) -> (f64, f64) {
        (
            self.lambda.as_ref().map_or(1.0, EdgePolynomial::renormalization),
            self.rho.as_ref().map_or(1.0, EdgePolynomial::renormalization),
        )
    }

    /// Reads `{"name", "lambda": [[i, c], ...], "rho": [[i, c], ...]}` or
    /// `{"name", "dk": [[k, f], ...], "design_rate": r}`. Polynomials are
    /// renormalized; check fractions must already sum to one.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let obj = doc
            .as_object()
            .ok_or_else(|| Error::Parse("ensemble document must be an object".into()))?;
        let name = match obj.get("name") {
            None => "custom".to_string(),
            Some(v) => v
                .as_str()
                .ok_or_else(|| Error::Parse("name must be a string".into()))?
                .to_string(),
        };
        let rate = match obj.get("design_rate") {
            None => None,
            Some(v) => Some(v.as_f64().ok_or_else(|| Error::Parse("design_rate must be a number".into()))?),
        };
        if let Some(list) = obj.get("dk") {
            let dk = CheckDegreeDistribution::new(degree_map(list, "dk")?)?;
            let rate = rate.ok_or_else(|| Error::Parse("design_rate is required with dk".into()))?;
            return Self::from_dk(name, dk, rate);
        }
        let rho = EdgePolynomial::normalized(degree_map(
            obj.get("rho").ok_or_else(|| Error::Parse("either dk or rho is required".into()))?,
            "rho",
        )?)?;
        match obj.get("lambda") {
            Some(l) => {
                let lambda = EdgePolynomial::normalized(degree_map(l, "lambda")?)?;
                let spec = Self::from_lambda_rho(name, lambda, rho)?;
                if let Some(r) = rate {
                    if (r - spec.design_rate).abs() > 2e-3 {
                        return Err(Error::InvalidEnsemble(format!(
                            "design_rate {r} disagrees with the rate {} implied by lambda and rho",
                            spec.design_rate
                        )));
                    }
                }
                Ok(spec)
            }
            None => {
                let rate = rate.ok_or_else(|| Error::Parse("design_rate is required without lambda".into()))?;
                check_rate(rate).map_err(|_| Error::InvalidEnsemble(format!("design rate {rate} is outside (0, 1)")))?;
                Ok(EnsembleSpec {
                    name,
                    lambda: None,
                    rho: Some(rho),
                    dk_direct: None,
                    design_rate: rate,
                })
            }
        }
    }
}

fn degree_map(v: &Value, field: &str) -> Result<BTreeMap<usize, f64>> {
    let list = v
        .as_array()
        .ok_or_else(|| Error::Parse(format!("{field} must be a list of [degree, value] pairs")))?;
    let mut out = BTreeMap::new();
    for item in list {
        let Some([deg, val]) = item.as_array().map(Vec::as_slice) else {
            return Err(Error::Parse(format!("{field}: each entry must be a two-element list")));
        };
        let deg = deg
            .as_u64()
            .ok_or_else(|| Error::Parse(format!("{field}: degree {deg} must be a positive integer")))?;
        let val = val
            .as_f64()
            .ok_or_else(|| Error::Parse(format!("{field}: value for degree {deg} must be a number")))?;
        if out.insert(deg as usize, val).is_some() {
            return Err(Error::Parse(format!("{field}: degree {deg} listed twice")));
        }
    }
    Ok(out)
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 10] = [
    "gallager_3_6",
    "gallager_4_6",
    "gallager_3_4",
    "table2_row1",
    "table2_row2",
    "table2_row3",
    "table2_row4",
    "table3_row1",
    "table3_row2",
    "table3_row3",
];

fn poly(terms: &[(usize, f64)]) -> EdgePolynomial {
    EdgePolynomial::normalized(terms.iter().copied().collect()).expect("built-in polynomial")
}

/// Built-in ensembles with the coefficients exactly as printed.
pub fn builtin(name: &str) -> Result<EnsembleSpec> {
    let (lambda, rho): (&[(usize, f64)], &[(usize, f64)]) = match name {
        "gallager_3_6" => (&[(3, 1.0)], &[(6, 1.0)]),
        "gallager_4_6" => (&[(4, 1.0)], &[(6, 1.0)]),
        "gallager_3_4" => (&[(3, 1.0)], &[(4, 1.0)]),
        "table2_row1" => (&[(2, 0.38354), (3, 0.04237), (4, 0.57409)], &[(5, 0.24123), (6, 0.75877)]),
        "table2_row2" => (
            &[(2, 0.23802), (3, 0.20997), (4, 0.03492), (5, 0.12015), (7, 0.01587), (14, 0.00480), (15, 0.37627)],
            &[(8, 0.98013), (9, 0.01987)],
        ),
        "table2_row3" => (
            &[
                (2, 0.21991),
                (3, 0.23328),
                (4, 0.02058),
                (6, 0.08543),
                (7, 0.06540),
                (8, 0.04767),
                (9, 0.01912),
                (19, 0.08064),
                (20, 0.22798),
            ],
            &[(8, 0.64854), (9, 0.34747), (10, 0.00399)],
        ),
        "table2_row4" => (
            &[
                (2, 0.19606),
                (3, 0.24039),
                (6, 0.00228),
                (7, 0.05516),
                (8, 0.16602),
                (9, 0.04088),
                (10, 0.01064),
                (28, 0.00221),
                (30, 0.28636),
            ],
            &[(8, 0.00749), (9, 0.99101), (10, 0.00150)],
        ),
        "table3_row1" => (&[(2, 0.302468), (3, 0.319447), (5, 0.378085)], &[(12, 1.0)]),
        "table3_row2" => (&[(2, 0.244067), (3, 0.292375), (7, 0.463558)], &[(14, 1.0)]),
        "table3_row3" => (
            &[(2, 0.205439), (3, 0.255432), (5, 0.0751187), (6, 0.1013440), (12, 0.3626670)],
            &[(16, 1.0)],
        ),
        other => {
            return Err(Error::InvalidEnsemble(format!(
                "unknown built-in ensemble '{other}' (known: {})",
                BUILTIN_NAMES.join(", ")
            )))
        }
    };
    EnsembleSpec::from_lambda_rho(name, poly(lambda), poly(rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn right_regular_fractions() {
        let dk = dk_from_rho(&EdgePolynomial::monomial(6).unwrap());
        assert_eq!(dk.fractions()[&6], 1.0);
        assert_abs_diff_eq!(dk.a_r(), 6.0, epsilon = 1e-15);
    }

    #[test]
    fn irregular_fractions() {
        let rho = EdgePolynomial::new(BTreeMap::from([(5, 0.24123), (6, 0.75877)])).unwrap();
        let dk = dk_from_rho(&rho);
        assert_abs_diff_eq!(dk.fractions()[&5], 0.27615, epsilon = 1e-5);
        assert_abs_diff_eq!(dk.fractions()[&6], 0.72385, epsilon = 1e-5);
        assert_abs_diff_eq!(dk.a_r(), 5.72385, epsilon = 1e-5);
        assert_abs_diff_eq!(dk.fractions().values().sum::<f64>(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn regular_rates() {
        let r = design_rate(&EdgePolynomial::monomial(3).unwrap(), &EdgePolynomial::monomial(6).unwrap()).unwrap();
        assert_abs_diff_eq!(r, 0.5, epsilon = 1e-15);
        let r = design_rate(&EdgePolynomial::monomial(4).unwrap(), &EdgePolynomial::monomial(6).unwrap()).unwrap();
        assert_abs_diff_eq!(r, 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn builtin_rates_match_their_tables() {
        for name in BUILTIN_NAMES {
            let e = builtin(name).unwrap();
            let nominal = match name {
                "gallager_4_6" => 1.0 / 3.0,
                "gallager_3_4" => 0.25,
                n if n.starts_with("table3") => 0.75,
                _ => 0.5,
            };
            assert_abs_diff_eq!(e.design_rate, nominal, epsilon = 2e-3);
            let (fl, fr) = e.renormalization();
            assert!((fl - 1.0).abs() < 1e-3 && (fr - 1.0).abs() < 1e-3, "{name}");
        }
        assert!(builtin("nope").is_err());
    }

    #[test]
    fn density_conversions() {
        assert_abs_diff_eq!(density_from_ar(6.0, 0.5).unwrap(), 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(density_from_ar(6.0, 1.0 / 3.0).unwrap(), 12.0, epsilon = 1e-12);
        assert_abs_diff_eq!(normalized_density(6.0, 0.5).unwrap(), 2.0, epsilon = 1e-15);
        let r = 0.495;
        assert_abs_diff_eq!(density_from_normalized(1.0, r).unwrap(), (2.0 - r) / r, epsilon = 1e-15);
        assert_abs_diff_eq!(density_from_normalized(5.68, r).unwrap(), 17.27, epsilon = 5e-3);
        assert!(density_from_ar(6.0, 1.0).is_err());
        assert!(normalized_density(6.0, 0.0).is_err());
    }

    #[test]
    fn json_ensembles() {
        let e = EnsembleSpec::from_json(r#"{"name": "x", "lambda": [[3, 1]], "rho": [[6, 1]]}"#).unwrap();
        assert_eq!(e.name, "x");
        assert_abs_diff_eq!(e.design_rate, 0.5, epsilon = 1e-15);
        let e = EnsembleSpec::from_json(r#"{"dk": [[6, 0.5], [7, 0.5]], "design_rate": 0.5}"#).unwrap();
        assert_abs_diff_eq!(e.dk().a_r(), 6.5, epsilon = 1e-15);
        let e = EnsembleSpec::from_json(r#"{"lambda": [[3, 0.5]], "rho": [[6, 0.49]]}"#).unwrap();
        assert_abs_diff_eq!(e.renormalization().0, 2.0, epsilon = 1e-15);
        assert!(matches!(EnsembleSpec::from_json(r#"{"dk": [[6, 1]]}"#), Err(Error::Parse(_))));
        assert!(matches!(EnsembleSpec::from_json(r#"{"rho": [[1, 1]], "design_rate": 0.5}"#), Err(Error::InvalidEnsemble(_))));
        assert!(matches!(EnsembleSpec::from_json("nope"), Err(Error::Parse(_))));
    }

    proptest! {
        #[test]
        fn fractions_normalize(raw in proptest::collection::btree_map(2usize..40, 0.01f64..1.0, 1..8)) {
            let rho = EdgePolynomial::normalized(raw).unwrap();
            let dk = dk_from_rho(&rho);
            let total: f64 = dk.fractions().values().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            prop_assert!((dk.a_r() - 1.0 / rho.integral()).abs() < 1e-12);
            let direct = dk.expect(|k| k as f64);
            prop_assert!((direct - dk.a_r()).abs() < 1e-12 * dk.a_r());
        }

        #[test]
        fn density_round_trip(a_r in 2.0f64..40.0, r in 0.01f64..0.99) {
            let delta = density_from_ar(a_r, r).unwrap();
            prop_assert!((delta * r / (1.0 - r) - a_r).abs() < 1e-12 * a_r);
            let t = normalized_density(a_r, r).unwrap();
            prop_assert!((t - r * delta / (2.0 - r)).abs() < 1e-12 * a_r);
        }
    }
}
