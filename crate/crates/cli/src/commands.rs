use ftn_core::{
    accumulated_isi, af_slice, db_to_linear, doppler_accumulated_isi, doppler_mse, ergodic_se_samples,
    fair_symbol_count, fair_symbol_energy, mc_af_slice, periodic_doppler_variation, se_bounds, spectral_efficiency,
    Constellation, DopplerScene, ErgodicChannelModel, FoldedSpectrumKind, McConfig, MultipathChannel, Path,
    PulseFamily, PulseSpec, SliceAxis,
};

use crate::error::CliError;
use crate::output::Table;
use crate::settings::{parse_channel, parse_grid, Settings};

/// Linear SNR used for a `-inf` dB grid entry.
pub const SNR_FLOOR: f64 = 1e-9;

fn pulse(s: &Settings) -> Result<PulseSpec<f64>, CliError> {
    let family = if s.pulse == "sinc" { PulseFamily::Sinc } else { PulseFamily::Rrc };
    Ok(PulseSpec::new(family, s.beta, s.period)?)
}

fn snr_linear(db: f64) -> f64 {
    if db == f64::NEG_INFINITY {
        SNR_FLOOR
    } else {
        db_to_linear(db)
    }
}

fn channel(s: &Settings) -> Result<MultipathChannel<f64>, CliError> {
    let paths = parse_channel(&s.channel)?
        .into_iter()
        .map(|(gain, tau)| Path { gain, delay: tau * s.period })
        .collect();
    Ok(MultipathChannel::new(paths)?)
}

fn xi_label(xi: f64) -> String {
    format!("xi={xi}")
}

pub fn run(s: &Settings) -> Result<Table, CliError> {
    let (table, keys) = match s.command.as_str() {
        "spectrum" => (spectrum(s)?, 2),
        "se" if s.ergodic => (se_ergodic(s)?, 1),
        "se" => (se_fixed(s)?, 1),
        "af" => (af(s)?, 2),
        "xfun" => (xfun(s)?, 2),
        "doppler-mse" => (doppler(s)?, 1),
        other => return Err(CliError::Usage(format!("unknown command `{other}`"))),
    };
    table.check_finite(keys)?;
    Ok(table)
}

fn spectrum(s: &Settings) -> Result<Table, CliError> {
    let p = pulse(s)?;
    let t = s.period;
    let mut headers = vec!["f*T [1]".to_string(), "f [Hz]".into(), "|Hp|^2 [s]".into()];
    for &xi in &s.xi {
        headers.push(format!("|H_fo|^2 {} [s]", xi_label(xi)));
        headers.push(format!("|H_tfo|^2 {} [s]", xi_label(xi)));
    }
    let mut table = Table::new(headers);
    for g in parse_grid(&s.grid)? {
        let f = g / t;
        let mut row = vec![Some(g), Some(f), Some(p.spectrum_sq(f))];
        for &xi in &s.xi {
            // Folded spectra are defined on the principal band only.
            if f.abs() <= 0.5 / (xi * t) * (1.0 + 1e-12) {
                row.push(Some(p.folded_spectrum_sq(xi, f, FoldedSpectrumKind::Folded)?));
                row.push(Some(p.folded_spectrum_sq(xi, f, FoldedSpectrumKind::Twisted)?));
            } else {
                row.extend([None, None]);
            }
        }
        table.push(row);
    }
    Ok(table)
}

fn se_fixed(s: &Settings) -> Result<Table, CliError> {
    let p = pulse(s)?;
    let ch = channel(s)?;
    let mut headers = vec!["SNR [dB]".to_string()];
    for &xi in &s.xi {
        for col in ["R", "R_UB", "R_LB"] {
            headers.push(format!("{col} {} [bit/s/Hz]", xi_label(xi)));
        }
    }
    let mut table = Table::new(headers);
    for db in parse_grid(&s.snr_db)? {
        let snr = snr_linear(db);
        let mut row = vec![Some(db)];
        for &xi in &s.xi {
            let r = spectral_efficiency(&p, xi, &ch, snr)?;
            let (ub, lb) = se_bounds(&p, xi, &ch, snr)?;
            row.extend([Some(r), Some(ub), Some(lb)]);
        }
        table.push(row);
    }
    Ok(table)
}

fn se_ergodic(s: &Settings) -> Result<Table, CliError> {
    let p = pulse(s)?;
    let model = ErgodicChannelModel::new(s.paths, s.tau_max * s.period)?;
    let mut headers = vec!["SNR [dB]".to_string()];
    for &xi in &s.xi {
        headers.push(format!("R_mean {} [bit/s/Hz]", xi_label(xi)));
        headers.push(format!("R_stderr {} [bit/s/Hz]", xi_label(xi)));
    }
    let mut table = Table::new(headers);
    for db in parse_grid(&s.snr_db)? {
        let snr = snr_linear(db);
        let mut row = vec![Some(db)];
        for &xi in &s.xi {
            let r = ergodic_se_samples(&p, xi, &model, snr, s.trials, s.seed)?;
            let n = r.len() as f64;
            let mean = r.iter().sum::<f64>() / n;
            let var = if r.len() > 1 { r.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
            row.extend([Some(mean), Some((var / n).sqrt())]);
        }
        table.push(row);
    }
    Ok(table)
}

fn af(s: &Settings) -> Result<Table, CliError> {
    let p = pulse(s)?;
    let c = Constellation::<f64>::by_name(&s.constellation)?;
    let t = s.period;
    let (axis, key) = match s.axis.as_str() {
        "doppler" => (SliceAxis::Doppler, ["nu*T [1]", "nu [Hz]"]),
        _ => (SliceAxis::Delay, ["tau/T [1]", "tau [s]"]),
    };
    let norm = parse_grid(&s.grid)?;
    let grid: Vec<f64> = norm
        .iter()
        .map(|&g| if axis == SliceAxis::Doppler { g / t } else { g * t })
        .collect();
    let mut headers: Vec<String> = key.iter().map(|k| k.to_string()).collect();
    let mut columns = Vec::new();
    for &xi in &s.xi {
        let n = fair_symbol_count(s.n, xi);
        let es = fair_symbol_energy(1.0, xi, t);
        headers.push(format!("AF2 closed {} N={n} [1]", xi_label(xi)));
        columns.push(af_slice(&p, xi, n, &c, axis, &grid, es)?.values);
        if s.trials > 0 {
            headers.push(format!("AF2 mc {} N={n} [1]", xi_label(xi)));
            let cfg = McConfig::fair(p, xi, s.n, c.clone(), s.trials, s.seed);
            columns.push(mc_af_slice(&cfg, axis, &grid)?.values);
        }
    }
    let mut table = Table::new(headers);
    for (i, (&g, &x)) in norm.iter().zip(&grid).enumerate() {
        let mut row = vec![Some(g), Some(x)];
        row.extend(columns.iter().map(|col| Some(col[i])));
        table.push(row);
    }
    Ok(table)
}

fn xfun(s: &Settings) -> Result<Table, CliError> {
    let p = pulse(s)?;
    let t = s.period;
    let delay = s.function == "x";
    let mut headers = if delay {
        vec!["tau/T [1]".to_string(), "tau [s]".into()]
    } else {
        vec!["nu*T [1]".to_string(), "nu [Hz]".into()]
    };
    let name = match s.function.as_str() {
        "x" => "X",
        "xprime" => "X'",
        _ => "Y",
    };
    for &xi in &s.xi {
        headers.push(format!("{name} {} N={} [1]", xi_label(xi), s.n));
    }
    let mut table = Table::new(headers);
    for g in parse_grid(&s.grid)? {
        let x = if delay { g * t } else { g / t };
        let mut row = vec![Some(g), Some(x)];
        for &xi in &s.xi {
            let v = match s.function.as_str() {
                "x" => accumulated_isi(&p, xi, s.n, x)?,
                "xprime" => doppler_accumulated_isi(&p, xi, s.n, x)?,
                _ => periodic_doppler_variation(&p, xi, s.n, x)?,
            };
            row.push(Some(v));
        }
        table.push(row);
    }
    Ok(table)
}

fn doppler(s: &Settings) -> Result<Table, CliError> {
    let p = pulse(s)?;
    let c = Constellation::<f64>::by_name(&s.constellation)?;
    let snr = parse_grid(&s.snr_db)?;
    if snr.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Usage("doppler-mse needs finite SNR values".into()));
    }
    let scene = DopplerScene::two_target(s.period, snr.clone(), s.trials, s.seed);
    let mut headers = vec!["SNR [dB]".to_string()];
    let mut columns = Vec::new();
    for &xi in &s.xi {
        headers.push(format!("MSE {} [Hz^2]", xi_label(xi)));
        columns.push(doppler_mse(&scene, &p, xi, &c)?);
    }
    let mut table = Table::new(headers);
    for (i, &db) in snr.iter().enumerate() {
        let mut row = vec![Some(db)];
        row.extend(columns.iter().map(|col| Some(col[i])));
        table.push(row);
    }
    Ok(table)
}
