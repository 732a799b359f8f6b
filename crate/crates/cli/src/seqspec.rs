//! `family:key=value,...` sequence specifications.
//!
//! | family         | keys                 | term                      |
//! |----------------|----------------------|---------------------------|
//! | `constant`     | `c`, `cap`           | `min(cap, c)`             |
//! | `harmonic`     | `c`, `cap`           | `min(cap, c / k)`         |
//! | `inverse-sqrt` | `c`, `cap`           | `min(cap, c / sqrt(k))`   |
//! | `power`        | `c`, `alpha`, `cap`  | `min(cap, c * k^-alpha)`  |
//! | `explicit`     | `file`               | values read from the file |
//!
//! Defaults: `c = 1`, `alpha = 1`, `cap = 0.99`. Explicit files hold one
//! decimal per line; commas also separate values, and blank lines and
//! `#` comments are skipped.

use std::fs;
use std::path::Path;

use covering_core::sequences::Family;
use covering_core::LengthSequence;

pub fn parse(spec: &str) -> Result<LengthSequence, String> {
    let (family, params) = spec.split_once(':').unwrap_or((spec, ""));
    let mut c = 1.0;
    let mut alpha = 1.0;
    let mut cap = 0.99;
    let mut file = None;
    for pair in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| format!("expected key=value in sequence spec, got `{pair}`"))?;
        let number = || {
            value
                .parse::<f64>()
                .map_err(|_| format!("sequence parameter `{key}` is not a number: `{value}`"))
        };
        match (family, key) {
            ("explicit", "file") => file = Some(value.to_string()),
            ("explicit", _) => return Err(format!("unknown key `{key}` for explicit sequences")),
            (_, "c") => c = number()?,
            (_, "cap") => cap = number()?,
            ("power" | "power-decay", "alpha") => alpha = number()?,
            _ => return Err(format!("unknown key `{key}` for family `{family}`")),
        }
    }
    let family = match family {
        "constant" => Family::Constant,
        "harmonic" => Family::Harmonic,
        "inverse-sqrt" => Family::InverseSqrt,
        "power" | "power-decay" => Family::PowerDecay { alpha },
        "explicit" => {
            let path = file.ok_or("explicit sequences need file=<path>")?;
            return read_explicit(Path::new(&path)).map(LengthSequence::Explicit);
        }
        other => return Err(format!("unknown sequence family `{other}`")),
    };
    let seq = LengthSequence::Capped { family, c, cap };
    seq.validate().map_err(|e| e.to_string())?;
    Ok(seq)
}

fn read_explicit(path: &Path) -> Result<Vec<f64>, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read sequence file {}: {e}", path.display()))?;
    text.lines()
        .map(|line| line.split('#').next().unwrap_or(""))
        .flat_map(|line| line.split(','))
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| {
            v.parse::<f64>()
                .map_err(|_| format!("{}: `{v}` is not a number", path.display()))
        })
        .collect()
}
