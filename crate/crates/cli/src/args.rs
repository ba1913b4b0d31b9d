//! Parsing of the `--channel`, `--ensemble` and `--method` values.

use std::collections::BTreeMap;
use std::fs;

use mbios_bounds::analysis::ThresholdMethod;
use mbios_bounds::channels::{biawgn_from_ebn0, Channel, LlrDensity};
use mbios_bounds::ensembles::{builtin, EnsembleSpec};
use mbios_bounds::quantized::DensityMethod;

use crate::CliError;

/// A channel as written on the command line, before the rate needed by
/// `ebn0_db` is known.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelArg {
    Bec { p: f64 },
    Bsc { eps: f64 },
    BiawgnSigma { sigma: f64 },
    BiawgnEbn0 { ebn0_db: f64, rate: Option<f64> },
    Custom { file: String },
}

fn fields(family: &str, body: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for part in body.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("channel field '{part}' of {family} is not key=value")))?;
        if out.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(CliError::Input(format!("channel field '{k}' given twice")));
        }
    }
    Ok(out)
}

fn number(map: &BTreeMap<String, String>, key: &str) -> Result<Option<f64>, CliError> {
    map.get(key)
        .map(|v| {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::Input(format!("channel field '{key}' has non-numeric value '{v}'")))
        })
        .transpose()
}

fn only(map: &BTreeMap<String, String>, family: &str, allowed: &[&str]) -> Result<(), CliError> {
    match map.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(CliError::Input(format!("unknown channel field '{k}' for {family}"))),
        None => Ok(()),
    }
}

fn required(v: Option<f64>, key: &str, family: &str) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::Input(format!("channel field '{key}' is required for {family}")))
}

impl ChannelArg {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let (family, body) = text
            .split_once(':')
            .ok_or_else(|| CliError::Input(format!("channel '{text}' must look like family:key=value")))?;
        let map = fields(family, body)?;
        match family {
            "bec" => {
                only(&map, family, &["p"])?;
                Ok(ChannelArg::Bec {
                    p: required(number(&map, "p")?, "p", family)?,
                })
            }
            "bsc" => {
                only(&map, family, &["eps"])?;
                Ok(ChannelArg::Bsc {
                    eps: required(number(&map, "eps")?, "eps", family)?,
                })
            }
            "biawgn" => {
                only(&map, family, &["sigma", "ebn0_db", "rate"])?;
                match (number(&map, "sigma")?, number(&map, "ebn0_db")?) {
                    (Some(sigma), None) if !map.contains_key("rate") => Ok(ChannelArg::BiawgnSigma { sigma }),
                    (None, Some(ebn0_db)) => Ok(ChannelArg::BiawgnEbn0 {
                        ebn0_db,
                        rate: number(&map, "rate")?,
                    }),
                    (Some(_), None) => Err(CliError::Input("channel field 'rate' only applies with 'ebn0_db'".into())),
                    _ => Err(CliError::Input(
                        "biawgn needs exactly one of the channel fields 'sigma' or 'ebn0_db'".into(),
                    )),
                }
            }
            "custom" => {
                only(&map, family, &["file"])?;
                let file = map
                    .get("file")
                    .ok_or_else(|| CliError::Input("channel field 'file' is required for custom".into()))?;
                Ok(ChannelArg::Custom { file: file.clone() })
            }
            other => Err(CliError::Input(format!(
                "unknown channel family '{other}'; expected bec, bsc, biawgn or custom"
            ))),
        }
    }

    /// Builds the channel; `fallback_rate` supplies the rate for `ebn0_db` when
    /// the channel text does not.
    pub fn build(&self, fallback_rate: Option<f64>) -> Result<Channel, CliError> {
        Ok(match self {
            ChannelArg::Bec { p } => Channel::bec(*p)?,
            ChannelArg::Bsc { eps } => Channel::bsc(*eps)?,
            ChannelArg::BiawgnSigma { sigma } => Channel::biawgn(*sigma)?,
            ChannelArg::BiawgnEbn0 { ebn0_db, rate } => {
                let rate = rate.or(fallback_rate).ok_or_else(|| {
                    CliError::Input("channel field 'rate' is required with 'ebn0_db' here".into())
                })?;
                biawgn_from_ebn0(*ebn0_db, rate)?
            }
            ChannelArg::Custom { file } => {
                let text = fs::read_to_string(file)
                    .map_err(|e| CliError::Input(format!("channel field 'file': cannot read {file}: {e}")))?;
                Channel::custom(LlrDensity::from_json(&text)?)?
            }
        })
    }
}

pub fn parse_ensemble(text: &str) -> Result<EnsembleSpec, CliError> {
    match text.split_once('=') {
        Some(("builtin", name)) => Ok(builtin(name.trim())?),
        Some(("file", path)) => {
            let body = fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("ensemble field 'file': cannot read {path}: {e}")))?;
            Ok(EnsembleSpec::from_json(&body)?)
        }
        _ => Err(CliError::Input(format!(
            "ensemble '{text}' must be builtin=NAME or file=PATH"
        ))),
    }
}

/// Method names accepted by `--method`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodArg {
    Capacity,
    TwoLevel,
    Q4,
    Q8,
    Unquantized,
}

impl MethodArg {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        Ok(match text {
            "capacity" => MethodArg::Capacity,
            "2level" => MethodArg::TwoLevel,
            "q4" => MethodArg::Q4,
            "q8" => MethodArg::Q8,
            "unq" => MethodArg::Unquantized,
            other => {
                return Err(CliError::Input(format!(
                    "unknown method '{other}'; expected capacity, 2level, q4, q8 or unq"
                )))
            }
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            MethodArg::Capacity => "capacity",
            MethodArg::TwoLevel => "2level",
            MethodArg::Q4 => "q4",
            MethodArg::Q8 => "q8",
            MethodArg::Unquantized => "unq",
        }
    }

    pub fn threshold(self) -> ThresholdMethod {
        match self {
            MethodArg::Capacity => ThresholdMethod::CapacityLimit,
            MethodArg::TwoLevel => ThresholdMethod::TwoLevel,
            MethodArg::Q4 => ThresholdMethod::Quantized(2),
            MethodArg::Q8 => ThresholdMethod::Quantized(3),
            MethodArg::Unquantized => ThresholdMethod::Unquantized,
        }
    }

    /// Density-bound flavour; the two-level bound of an erasure channel uses
    /// its dedicated form.
    pub fn density(self, channel: &Channel) -> Result<DensityMethod, CliError> {
        use mbios_bounds::channels::ChannelKind;
        Ok(match self {
            MethodArg::Capacity => {
                return Err(CliError::Input("method 'capacity' has no density bound".into()));
            }
            MethodArg::TwoLevel if matches!(channel.kind(), ChannelKind::Bec { .. }) => DensityMethod::TwoLevelBec,
            MethodArg::TwoLevel => DensityMethod::TwoLevel,
            MethodArg::Q4 => DensityMethod::Quantized(2),
            MethodArg::Q8 => DensityMethod::Quantized(3),
            MethodArg::Unquantized => DensityMethod::Unquantized,
        })
    }

    pub fn from_threshold(m: ThresholdMethod) -> Self {
        match m {
            ThresholdMethod::CapacityLimit => MethodArg::Capacity,
            ThresholdMethod::TwoLevel => MethodArg::TwoLevel,
            ThresholdMethod::Quantized(2) => MethodArg::Q4,
            ThresholdMethod::Quantized(_) => MethodArg::Q8,
            ThresholdMethod::Unquantized => MethodArg::Unquantized,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_channel_families() {
        assert_eq!(ChannelArg::parse("bec:p=0.5").unwrap(), ChannelArg::Bec { p: 0.5 });
        assert_eq!(ChannelArg::parse("bsc:eps=0.11").unwrap(), ChannelArg::Bsc { eps: 0.11 });
        assert_eq!(
            ChannelArg::parse("biawgn:ebn0_db=0.371,rate=0.5").unwrap(),
            ChannelArg::BiawgnEbn0 {
                ebn0_db: 0.371,
                rate: Some(0.5)
            }
        );
        assert_eq!(
            ChannelArg::parse("biawgn:sigma=0.9").unwrap(),
            ChannelArg::BiawgnSigma { sigma: 0.9 }
        );
    }

    #[test]
    fn errors_name_the_field() {
        let msg = |t: &str| ChannelArg::parse(t).unwrap_err().to_string();
        assert!(msg("bsc:epsilon=0.1").contains("'epsilon'"));
        assert!(msg("bec:p=half").contains("'p'"));
        assert!(msg("bsc:").contains("'eps'"));
        assert!(msg("awgn:sigma=1").contains("'awgn'"));
        assert!(msg("biawgn:sigma=1,ebn0_db=2").contains("sigma"));
        assert!(ChannelArg::parse("biawgn:ebn0_db=1").unwrap().build(None).is_err());
    }

    #[test]
    fn ensembles_and_methods() {
        assert_eq!(parse_ensemble("builtin=gallager_3_6").unwrap().name, "gallager_3_6");
        assert!(parse_ensemble("gallager_3_6").is_err());
        assert!(parse_ensemble("file=/nonexistent/e.json").is_err());
        for name in ["capacity", "2level", "q4", "q8", "unq"] {
            let m = MethodArg::parse(name).unwrap();
            assert_eq!(m.name(), name);
            assert_eq!(MethodArg::from_threshold(m.threshold()), m);
        }
        assert!(MethodArg::parse("q16").is_err());
    }
}
