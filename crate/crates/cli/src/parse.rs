//! Parsers for the compact grid and noise specifications.

use logshot::{MarkLaw, NoiseModel, TimeGrid, VarianceProfile};

use crate::error::{invalid, CliResult};

/// `start:stop:points`, inclusive of both ends.
pub fn parse_grid(spec: &str) -> CliResult<TimeGrid> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, stop, points] = parts[..] else {
        return Err(invalid(format!("grid '{spec}' is not start:stop:points")));
    };
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| invalid(format!("grid bound '{s}' is not a number")))
    };
    let points: usize = points
        .trim()
        .parse()
        .map_err(|_| invalid(format!("grid point count '{points}' is not a positive integer")))?;
    Ok(TimeGrid::linspace(num(start)?, num(stop)?, points)?)
}

/// Comma-separated list of times, sorted and deduplicated.
pub fn parse_times(values: &[f64]) -> CliResult<TimeGrid> {
    let mut t = values.to_vec();
    if t.iter().any(|x| !x.is_finite()) {
        return Err(invalid("times must be finite"));
    }
    t.sort_by(f64::total_cmp);
    t.dedup();
    Ok(TimeGrid::new(t)?)
}

/// `[law-]variant[:key=value,...]`.
///
/// Laws: `gaussian` (default), `rademacher`. Variants and keys:
/// `const:K2` (or a bare value), `powerlaw:K,gamma`, `shifted:K,gamma`,
/// `logdecay:K,gamma[,horizon]`. A log-decay profile without `horizon`
/// uses `default_horizon`.
pub fn parse_noise(spec: &str, default_horizon: f64) -> CliResult<NoiseModel> {
    let (head, params) = match spec.split_once(':') {
        Some((h, p)) => (h, p),
        None => (spec, ""),
    };
    let (law, variant) = match head.split_once('-') {
        Some(("gaussian", v)) => (MarkLaw::Gaussian, v),
        Some(("rademacher", v)) => (MarkLaw::Rademacher, v),
        Some((other, _)) => return Err(invalid(format!("unknown mark law '{other}'"))),
        None => (MarkLaw::Gaussian, head),
    };
    let allowed: &[&str] = match variant {
        "const" => &["K2"],
        "powerlaw" | "shifted" => &["K", "gamma"],
        "logdecay" => &["K", "gamma", "horizon"],
        _ => return Err(invalid(format!("unknown noise variant '{variant}'"))),
    };
    let mut values = std::collections::BTreeMap::new();
    for (i, item) in params.split(',').filter(|s| !s.is_empty()).enumerate() {
        let (key, raw) = match item.split_once('=') {
            Some((k, v)) => (k.trim(), v.trim()),
            None if i == 0 && variant == "const" => ("K2", item.trim()),
            None => return Err(invalid(format!("noise parameter '{item}' is not key=value"))),
        };
        if !allowed.contains(&key) {
            return Err(invalid(format!(
                "unknown key '{key}' for noise '{variant}' (expected {})",
                allowed.join(", ")
            )));
        }
        let v: f64 = raw
            .parse()
            .map_err(|_| invalid(format!("noise parameter {key}='{raw}' is not a number")))?;
        if values.insert(key, v).is_some() {
            return Err(invalid(format!("noise parameter '{key}' given twice")));
        }
    }
    let need = |key: &str| {
        values
            .get(key)
            .copied()
            .ok_or_else(|| invalid(format!("noise '{variant}' needs {key}=...")))
    };
    let profile = match variant {
        "const" => VarianceProfile::Constant {
            k2: values.get("K2").copied().unwrap_or(1.0),
        },
        "powerlaw" => VarianceProfile::PowerLaw { k: need("K")?, gamma: need("gamma")? },
        "shifted" => VarianceProfile::ShiftedPowerLaw { k: need("K")?, gamma: need("gamma")? },
        _ => VarianceProfile::LogDecay {
            k: need("K")?,
            gamma: need("gamma")?,
            horizon: values.get("horizon").copied().unwrap_or(default_horizon),
        },
    };
    Ok(NoiseModel::new(profile, law)?)
}
