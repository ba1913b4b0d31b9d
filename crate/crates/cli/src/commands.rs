//! One function per subcommand; each appends rows and inputs to a report.

use mbios_bounds::analysis::{
    reproduce_table_with, sweep_ber_bound, sweep_density_bound_seeded, sweep_right_regular_threshold, threshold_ebn0,
    SearchConfig, ThresholdMethod, ThresholdQuery,
};
use mbios_bounds::channels::Channel;
use mbios_bounds::ensembles::EnsembleSpec;
use mbios_bounds::numerics::Interval;
use mbios_bounds::quantized::{density_bound_coeffs_seeded, density_lower_bound, rate_upper_bound_quantized_detail, GapToCapacity};
use mbios_bounds::report::{ReportDocument, ReportRow};
use mbios_bounds::unquantized::{
    ber_lower_bound, convergence_probe, epsilon0_degree, epsilon0_normalized, legacy_ber_bound,
    rate_upper_bound_unquantized, BerBoundInput, BerShape,
};

use crate::args::{parse_ensemble, ChannelArg, MethodArg};
use crate::{CliError, Command, Context, Figure};

pub fn execute(cmd: &Command, ctx: &Context, doc: &mut ReportDocument) -> Result<(), CliError> {
    match cmd {
        Command::Capacity { channel } => capacity(channel, doc),
        Command::RateBound {
            channel,
            ensemble,
            method,
        } => rate_bound(channel, ensemble, method, ctx, doc),
        Command::DensityBound {
            channel,
            method,
            rate,
            epsilon,
        } => density_bound(channel, method, *rate, *epsilon, ctx, doc),
        Command::BerBound {
            channel,
            rate,
            epsilon,
            ensemble,
            t,
        } => ber_bound(channel, *rate, *epsilon, ensemble.as_deref(), *t, ctx, doc),
        Command::Threshold { ensemble, method } => threshold(ensemble, method, ctx, doc),
        Command::Table { id } => table(*id, ctx, doc),
        Command::Sweep {
            figure,
            rates,
            a_r,
            epsilon,
        } => sweep(*figure, rates, a_r, epsilon, ctx, doc),
        Command::Render { .. } => unreachable!("render does not build a report"),
    }
}

fn channel_input(text: &str, fallback_rate: Option<f64>, doc: &mut ReportDocument) -> Result<Channel, CliError> {
    let ch = ChannelArg::parse(text)?.build(fallback_rate)?;
    doc.input("channel", text);
    doc.input("channel_resolved", ch.to_string());
    Ok(ch)
}

fn ensemble_input(text: &str, doc: &mut ReportDocument) -> Result<EnsembleSpec, CliError> {
    let spec = parse_ensemble(text)?;
    doc.input("ensemble", spec.name.as_str());
    doc.input("design_rate", spec.design_rate);
    Ok(spec)
}

fn search_config(ctx: &Context) -> SearchConfig {
    SearchConfig {
        series: ctx.series,
        seed: ctx.seed,
        ..SearchConfig::default()
    }
}

fn capacity(channel: &str, doc: &mut ReportDocument) -> Result<(), CliError> {
    let ch = channel_input(channel, None, doc)?;
    doc.rows.push(ReportRow::new("capacity", ch.capacity()?, "bits_per_use"));
    doc.rows.push(ReportRow::new("error_weight", ch.error_weight_w(), "probability"));
    doc.rows.push(ReportRow::new("quantity_a", ch.quantity_a()?, "dimensionless"));
    Ok(())
}

fn rate_bound(channel: &str, ensemble: &str, method: &str, ctx: &Context, doc: &mut ReportDocument) -> Result<(), CliError> {
    let method = MethodArg::parse(method)?;
    let spec = ensemble_input(ensemble, doc)?;
    let ch = channel_input(channel, Some(spec.design_rate), doc)?;
    let dk = spec.dk();
    let value = match method.threshold() {
        ThresholdMethod::CapacityLimit => ch.capacity()?,
        ThresholdMethod::TwoLevel => mbios_bounds::quantized::rate_upper_bound_2level(&ch, &dk)?,
        ThresholdMethod::Quantized(d) => {
            let detail = rate_upper_bound_quantized_detail(&ch, &dk, d, ctx.seed)?;
            doc.input("chi", detail.quantizer.chi);
            doc.input("quantizer_levels", detail.quantizer.levels.levels().to_vec());
            detail.value
        }
        ThresholdMethod::Unquantized => {
            let probe = convergence_probe(ctx.series, |cfg| rate_upper_bound_unquantized(&ch, &dk, cfg))?;
            doc.input("series_probe_delta", probe.delta());
            probe.value
        }
    };
    doc.rows
        .push(ReportRow::new(method.name(), value, "rate").ensemble(spec.name.as_str(), spec.design_rate));
    Ok(())
}

fn density_bound(
    channel: &str,
    method: &str,
    rate: Option<f64>,
    epsilon: Option<f64>,
    ctx: &Context,
    doc: &mut ReportDocument,
) -> Result<(), CliError> {
    let method = MethodArg::parse(method)?;
    let ch = channel_input(channel, rate, doc)?;
    let c = ch.capacity()?;
    let gap = match (rate, epsilon) {
        (Some(r), None) => GapToCapacity::from_rate(r, c)?,
        (None, Some(e)) => GapToCapacity::new(e)?,
        _ => return Err(CliError::Input("density-bound needs --rate or --epsilon".into())),
    };
    doc.input("epsilon", gap.epsilon());
    let k = density_bound_coeffs_seeded(&ch, method.density(&ch)?, ctx.seed)?;
    doc.input("coefficient_method", k.method.tag());
    let b = density_lower_bound(&k, gap);
    let rate = (1.0 - gap.epsilon()) * c;
    doc.rows.push(ReportRow::new("k1", k.k1, "coefficient"));
    doc.rows.push(ReportRow::new("k2", k.k2, "coefficient"));
    doc.rows.push(
        ReportRow::new(method.name(), b.value, "ones_per_info_bit")
            .ensemble("any", rate)
            .trivial(b.trivial),
    );
    Ok(())
}

fn ber_bound(
    channel: &str,
    rate: Option<f64>,
    epsilon: Option<f64>,
    ensemble: Option<&str>,
    t: Option<f64>,
    ctx: &Context,
    doc: &mut ReportDocument,
) -> Result<(), CliError> {
    let ch = channel_input(channel, rate, doc)?;
    let c = ch.capacity()?;
    let rate = match (rate, epsilon) {
        (Some(r), None) => r,
        (None, Some(e)) => (1.0 - GapToCapacity::new(e)?.epsilon()) * c,
        _ => return Err(CliError::Input("ber-bound needs --rate or --epsilon".into())),
    };
    let (label, shape) = match (ensemble, t) {
        (Some(e), None) => {
            let spec = ensemble_input(e, doc)?;
            (spec.name.clone(), BerShape::DegreeProfile(spec.dk()))
        }
        (None, Some(t)) => (format!("t={t}"), BerShape::Normalized { t }),
        _ => return Err(CliError::Input("ber-bound needs --ensemble or --t".into())),
    };
    let input = BerBoundInput::new(rate, ch.clone(), shape)?;
    let b = ber_lower_bound(&input, ctx.series)?;
    doc.rows.push(
        ReportRow::new("unq", b.pb_bound, "probability")
            .ensemble(label.as_str(), rate)
            .trivial(b.trivial),
    );
    doc.rows
        .push(ReportRow::new("unq_h2", b.h2_pb_bound, "bits").ensemble(label.as_str(), rate));
    let eps0 = match &input.shape {
        BerShape::DegreeProfile(dk) => epsilon0_degree(&ch, dk, ctx.series)?,
        BerShape::Normalized { t } => {
            let legacy = legacy_ber_bound(&input)?;
            doc.rows.push(
                ReportRow::new("legacy", legacy.pb_bound, "probability")
                    .ensemble(label.as_str(), rate)
                    .trivial(legacy.trivial),
            );
            epsilon0_normalized(&ch, *t, ctx.series)?
        }
    };
    doc.rows
        .push(ReportRow::new("epsilon0", eps0, "gap").ensemble(label.as_str(), rate));
    Ok(())
}

fn threshold(ensemble: &str, method: &str, ctx: &Context, doc: &mut ReportDocument) -> Result<(), CliError> {
    let method = MethodArg::parse(method)?;
    let spec = ensemble_input(ensemble, doc)?;
    let cfg = search_config(ctx);
    doc.input("tol_db", cfg.tol_db);
    let query = ThresholdQuery {
        ensemble: spec.clone(),
        method: method.threshold(),
        config: cfg,
    };
    let value = threshold_ebn0(&query)?;
    if method == MethodArg::Unquantized {
        let doubled = threshold_ebn0(&ThresholdQuery {
            config: SearchConfig {
                series: ctx.series.doubled(),
                ..cfg
            },
            ..query
        })?;
        doc.input("series_probe_delta_db", (doubled - value).abs());
    }
    doc.rows
        .push(ReportRow::new(method.name(), value, "dB").ensemble(spec.name.as_str(), spec.design_rate));
    Ok(())
}

fn table(id: u8, ctx: &Context, doc: &mut ReportDocument) -> Result<(), CliError> {
    let cfg = search_config(ctx);
    doc.input("table", id);
    doc.input("tol_db", cfg.tol_db);
    let rows = reproduce_table_with(id, &cfg)?;
    for row in rows {
        for cell in &row.cells {
            let method = ThresholdMethod::TABLE_COLUMNS
                .iter()
                .find(|m| m.tag() == cell.method)
                .map_or(cell.method.clone(), |m| MethodArg::from_threshold(*m).name().to_string());
            doc.rows.push(
                ReportRow::new(method, cell.value_db, "dB")
                    .ensemble(row.ensemble.as_str(), row.design_rate)
                    .provenance(cell.provenance.tag()),
            );
        }
    }
    Ok(())
}

fn or_default<T: Clone>(given: &[T], default: &[T]) -> Vec<T> {
    if given.is_empty() {
        default.to_vec()
    } else {
        given.to_vec()
    }
}

fn sweep(
    figure: Figure,
    rates: &[f64],
    a_r: &[usize],
    epsilon: &[f64],
    ctx: &Context,
    doc: &mut ReportDocument,
) -> Result<(), CliError> {
    match figure {
        Figure::Fig2 => {
            let degrees = or_default(a_r, &[6, 10]);
            let cfg = SearchConfig {
                bracket_db: Interval { lo: -3.0, hi: 12.0 },
                ..search_config(ctx)
            };
            doc.input("a_r", degrees.clone());
            for a in degrees {
                // the quantized bounds never exceed 1 - 1/a_R, so the default
                // grid stops short of it
                let rates = if rates.is_empty() {
                    (1..10)
                        .map(|i| i as f64 / 10.0)
                        .filter(|&r| r < 1.0 - 1.0 / a as f64 - 0.05)
                        .collect()
                } else {
                    rates.to_vec()
                };
                doc.input(&format!("rates_a_r_{a}"), rates.clone());
                let points = sweep_right_regular_threshold(a, &rates, &ThresholdMethod::TABLE_COLUMNS, &cfg)?;
                for p in points {
                    doc.rows.push(
                        ReportRow::new(MethodArg::from_threshold(p.method).name(), p.threshold_db, "dB")
                            .ensemble(format!("right_regular_{a}"), p.rate),
                    );
                }
            }
        }
        Figure::Fig3 => {
            let c = 0.5;
            let eps = or_default(epsilon, &[0.01, 0.02, 0.05, 0.1]);
            let t_grid: Vec<f64> = (0..=18).map(|i| 1.0 + 0.5 * i as f64).collect();
            doc.input("capacity", c);
            doc.input("epsilon", eps.clone());
            for p in sweep_ber_bound(c, &eps, &t_grid, ctx.series)? {
                let label = format!("t={:.2}", p.t);
                let rate = (1.0 - p.epsilon) * c;
                for (method, pb) in [("unq", p.pb_series), ("legacy", p.pb_legacy)] {
                    doc.rows.push(
                        ReportRow::new(method, pb, "probability")
                            .ensemble(label.as_str(), rate)
                            .trivial(pb == 0.0),
                    );
                }
            }
        }
        Figure::Fig4 => {
            let rates = or_default(rates, &[0.5, 0.75]);
            let grid: Vec<f64> = (0..=40).map(|i| i as f64 / 10.0).collect();
            doc.input("rates", rates.clone());
            for rate in rates {
                for method in [MethodArg::TwoLevel, MethodArg::Unquantized] {
                    let dm = method.density(&Channel::biawgn(1.0)?)?;
                    for p in sweep_density_bound_seeded(rate, dm, &grid, ctx.seed)? {
                        let label = format!("ebn0_db={:.3}", p.ebn0_db);
                        let row = match p.value {
                            Some(v) => ReportRow::new(method.name(), v, "ones_per_info_bit"),
                            None => ReportRow::missing(method.name(), "ones_per_info_bit").provenance("beyond-capacity"),
                        };
                        doc.rows.push(row.ensemble(label.as_str(), rate).trivial(p.trivial));
                    }
                }
            }
        }
    }
    Ok(())
}
