use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use ini::Ini;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::args::{Command, CommonArgs};
use crate::error::CliError;

/// Equal-gain three-path channel with delays 0, 0.2T and 0.5T.
pub const DEFAULT_CHANNEL: &str = "0.5773502691896258@0,0.5773502691896258@0.2,0.5773502691896258@0.5";

const MAX_GRID_POINTS: usize = 10_000_000;

const KEYS: &[&str] = &[
    "pulse", "beta", "T", "xi", "N", "snr-db", "channel", "constellation", "trials", "seed", "grid", "threads",
    "ergodic", "paths", "tau-max", "axis", "function",
];

/// Fully resolved run configuration. Serialized into the manifest and
/// sufficient on its own to repeat the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub command: String,
    pub pulse: String,
    pub beta: f64,
    #[serde(rename = "T")]
    pub period: f64,
    pub xi: Vec<f64>,
    #[serde(rename = "N")]
    pub n: usize,
    pub snr_db: String,
    pub channel: String,
    pub constellation: String,
    pub trials: usize,
    pub seed: u64,
    pub grid: String,
    pub threads: usize,
    pub ergodic: bool,
    pub paths: usize,
    pub tau_max: f64,
    pub axis: String,
    pub function: String,
}

/// Flat key-value view of a config file: the unnamed section first, then
/// the section named after the command on top.
fn load_config(path: &Path, command: &str) -> Result<BTreeMap<String, String>, CliError> {
    let ini = Ini::load_from_file(path).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
    let mut out = BTreeMap::new();
    for section in [None, Some(command)] {
        if let Some(props) = ini.section(section) {
            for (k, v) in props.iter() {
                let key = k.trim().trim_start_matches("--").replace('_', "-");
                if !KEYS.contains(&key.as_str()) {
                    return Err(CliError::Usage(format!("config {}: unknown key `{k}`", path.display())));
                }
                out.insert(key, v.trim().to_string());
            }
        }
    }
    Ok(out)
}

fn from_config<T: FromStr>(cfg: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError> {
    cfg.get(key)
        .map(|v| v.parse::<T>().map_err(|_| CliError::Usage(format!("config key `{key}`: cannot parse `{v}`"))))
        .transpose()
}

fn parse_bool(key: &str, v: &str) -> Result<bool, CliError> {
    match v.to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(CliError::Usage(format!("config key `{key}`: expected a boolean, got `{v}`"))),
    }
}

pub fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Spectrum => "spectrum",
        Command::Se(_) => "se",
        Command::Af(_) => "af",
        Command::Xfun(_) => "xfun",
        Command::DopplerMse => "doppler-mse",
        Command::Replay(_) => "replay",
    }
}

impl Settings {
    /// Flags first, then the config file, then per-command defaults.
    pub fn resolve(common: &CommonArgs, cmd: &Command) -> Result<Settings, CliError> {
        let name = command_name(cmd);
        let cfg = match &common.config {
            Some(p) => load_config(p, name)?,
            None => BTreeMap::new(),
        };
        let pulse = match common.pulse {
            Some(p) => format!("{p:?}").to_ascii_lowercase(),
            None => cfg.get("pulse").cloned().unwrap_or_else(|| "rrc".into()),
        };
        if pulse != "rrc" && pulse != "sinc" {
            return Err(CliError::Usage(format!("unknown pulse `{pulse}`")));
        }
        let xi = if !common.xi.is_empty() {
            common.xi.clone()
        } else if let Some(v) = cfg.get("xi") {
            v.split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("config key `xi`: cannot parse `{s}`"))))
                .collect::<Result<_, _>>()?
        } else {
            match name {
                "spectrum" => vec![0.6, 0.75, 0.9, 1.0],
                "se" => vec![0.75, 1.0],
                "doppler-mse" => vec![0.6, 1.0],
                _ => vec![1.0, 0.75],
            }
        };
        let (flag_ergodic, flag_paths, flag_tau_max, flag_axis, flag_function) = match cmd {
            Command::Se(a) => (a.ergodic.then_some(true), a.paths, a.tau_max, None, None),
            Command::Af(a) => (None, None, None, a.axis.map(|v| format!("{v:?}").to_ascii_lowercase()), None),
            Command::Xfun(a) => (None, None, None, None, a.function.map(|v| format!("{v:?}").to_ascii_lowercase())),
            _ => (None, None, None, None, None),
        };
        let ergodic = match flag_ergodic {
            Some(v) => v,
            None => cfg.get("ergodic").map(|v| parse_bool("ergodic", v)).transpose()?.unwrap_or(false),
        };
        let axis = flag_axis.or_else(|| cfg.get("axis").cloned()).unwrap_or_else(|| "delay".into());
        let function = flag_function.or_else(|| cfg.get("function").cloned()).unwrap_or_else(|| "x".into());
        let default_grid = match (name, axis.as_str(), function.as_str()) {
            ("spectrum", _, _) => "-0.8:0.8:0.005",
            ("af", "doppler", _) => "0:2:0.02",
            ("af", _, _) => "0:30:0.25",
            ("xfun", _, "x") => "0:30:0.05",
            ("xfun", _, _) => "0:3:0.005",
            _ => "0:1:0.1",
        };
        let s = Settings {
            command: name.into(),
            pulse,
            beta: common
                .beta
                .or(from_config(&cfg, "beta")?)
                .unwrap_or(if name == "doppler-mse" { 0.5 } else { 0.3 }),
            period: common.period.or(from_config(&cfg, "T")?).unwrap_or(1.0),
            xi,
            n: common.n.or(from_config(&cfg, "N")?).unwrap_or(100),
            snr_db: common
                .snr_db
                .clone()
                .or_else(|| cfg.get("snr-db").cloned())
                .unwrap_or_else(|| if name == "doppler-mse" { "5:20:5" } else { "0:20:1" }.into()),
            channel: common
                .channel
                .clone()
                .or_else(|| cfg.get("channel").cloned())
                .unwrap_or_else(|| DEFAULT_CHANNEL.into()),
            constellation: common
                .constellation
                .clone()
                .or_else(|| cfg.get("constellation").cloned())
                .unwrap_or_else(|| "qpsk".into())
                .to_ascii_lowercase(),
            trials: common.trials.or(from_config(&cfg, "trials")?).unwrap_or(match name {
                "se" => 2000,
                "doppler-mse" => 500,
                _ => 0,
            }),
            seed: common.seed.or(from_config(&cfg, "seed")?).unwrap_or(1),
            grid: common
                .grid
                .clone()
                .or_else(|| cfg.get("grid").cloned())
                .unwrap_or_else(|| default_grid.into()),
            threads: common.threads.or(from_config(&cfg, "threads")?).unwrap_or(0),
            ergodic,
            paths: flag_paths.or(from_config(&cfg, "paths")?).unwrap_or(3),
            tau_max: flag_tau_max.or(from_config(&cfg, "tau-max")?).unwrap_or(2.0),
            axis,
            function,
        };
        s.check()?;
        Ok(s)
    }

    /// Syntax checks that do not need the numerical core.
    pub fn check(&self) -> Result<(), CliError> {
        if self.xi.is_empty() {
            return Err(CliError::Usage("at least one --xi is required".into()));
        }
        if let Some(x) = self.xi.iter().find(|x| !(**x > 0.0 && **x <= 1.0)) {
            return Err(CliError::Usage(format!("--xi must lie in (0, 1], got {x}")));
        }
        if !["delay", "doppler"].contains(&self.axis.as_str()) {
            return Err(CliError::Usage(format!("unknown axis `{}`", self.axis)));
        }
        if !["x", "xprime", "y"].contains(&self.function.as_str()) {
            return Err(CliError::Usage(format!("unknown function `{}`", self.function)));
        }
        parse_grid(&self.grid)?;
        parse_grid(&self.snr_db)?;
        parse_channel(&self.channel)?;
        Ok(())
    }
}

/// Expands `a:b:step` segments, single values and comma lists, in order.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Usage(format!("grid `{text}`: {why}"));
    let num = |s: &str| -> Result<f64, CliError> {
        let s = s.trim();
        s.parse::<f64>().map_err(|_| bad(&format!("`{s}` is not a number")))
    };
    let mut out = Vec::new();
    for seg in text.split(',') {
        let parts: Vec<&str> = seg.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(num(v)?),
            [a, b, step] => {
                let (a, b, step) = (num(a)?, num(b)?, num(step)?);
                if !(a.is_finite() && b.is_finite() && step.is_finite()) || step <= 0.0 || b < a {
                    return Err(bad("need finite a <= b and step > 0"));
                }
                let count = ((b - a) / step + 1e-9).floor() as usize + 1;
                if count > MAX_GRID_POINTS {
                    return Err(bad("too many points"));
                }
                out.extend((0..count).map(|i| a + step * i as f64));
            }
            _ => return Err(bad("expected a:b:step")),
        }
    }
    if out.is_empty() {
        return Err(bad("empty"));
    }
    Ok(out)
}

/// `re`, `imj`, `re+imj` or `re-imj`; `i` is accepted for `j`.
pub fn parse_complex(s: &str) -> Result<Complex<f64>, CliError> {
    let bad = || CliError::Usage(format!("cannot parse complex gain `{s}`"));
    let t = s.trim();
    let Some(body) = t.strip_suffix(['j', 'i']) else {
        return t.parse::<f64>().map(|re| Complex::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => v.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex::new(re.parse::<f64>().map_err(|_| bad())?, im))
}

/// Paths as `(gain, delay / T)`.
pub fn parse_channel(text: &str) -> Result<Vec<(Complex<f64>, f64)>, CliError> {
    text.split(',')
        .map(|entry| {
            let (h, tau) = entry
                .split_once('@')
                .ok_or_else(|| CliError::Usage(format!("channel entry `{entry}` is not gain@delay")))?;
            let tau = tau
                .trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("channel delay `{tau}` is not a number")))?;
            Ok((parse_complex(h)?, tau))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("0:30:0.25").unwrap().len(), 121);
        assert_eq!(parse_grid("0:2:0.02").unwrap().len(), 101);
        assert_eq!(parse_grid("-inf,5:10:5").unwrap(), vec![f64::NEG_INFINITY, 5.0, 10.0]);
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("").is_err());
    }

    #[test]
    fn complex_gains() {
        assert_eq!(parse_complex("0.5").unwrap(), Complex::new(0.5, 0.0));
        assert_eq!(parse_complex("0.5+0.25j").unwrap(), Complex::new(0.5, 0.25));
        assert_eq!(parse_complex("-1-2j").unwrap(), Complex::new(-1.0, -2.0));
        assert_eq!(parse_complex("j").unwrap(), Complex::new(0.0, 1.0));
        assert_eq!(parse_complex("-0.3i").unwrap(), Complex::new(0.0, -0.3));
        assert_eq!(parse_complex("1e-3+2E+1j").unwrap(), Complex::new(1e-3, 20.0));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("1+xj").is_err());
    }

    #[test]
    fn channels() {
        let c = parse_channel("1@0, 0.5-0.5j@1.5").unwrap();
        assert_eq!(c, vec![(Complex::new(1.0, 0.0), 0.0), (Complex::new(0.5, -0.5), 1.5)]);
        assert!(parse_channel("1").is_err());
        let d = parse_channel(DEFAULT_CHANNEL).unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d[0].0.re, 1.0 / 3f64.sqrt());
    }
}
