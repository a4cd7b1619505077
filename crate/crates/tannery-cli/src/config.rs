//! Run configuration: the surface and per-command options, resolved from
//! command-line flags or a JSON file.
//!
//! A config file is a JSON object with a `surface` object plus the same
//! option keys the flags expose, kebab-case. Unknown keys are rejected.
//! Inline flags override file values; the surface itself must come from
//! exactly one source.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};
use tannery::surfaces::profile_zero_latitude;
use tannery::SurfaceSpec;

use crate::report::json_f64;

/// Default inclination grid: fifteen values spanning the classical band.
pub const DEFAULT_I_GRID: &str = "0.1:1.5:15";

/// What went wrong, split by exit code: configuration mistakes exit 2,
/// runtime failures exit 1 (matching a failed check).
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }

    pub fn render(&self) -> String {
        match self {
            CliError::Config(msg) => format!("config error: {msg}"),
            CliError::Runtime(msg) => format!("error: {msg}"),
        }
    }
}

pub fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Map a library error out of a command's computation phase. Domain and
/// chart misuse are documented as caller mistakes, so they surface as
/// configuration errors; everything else is a runtime failure.
pub fn lib_err(e: tannery::Error) -> CliError {
    match e {
        tannery::Error::Domain(_) | tannery::Error::UnsupportedChart { .. } => {
            CliError::Config(e.to_string())
        }
        other => CliError::Runtime(other.to_string()),
    }
}

/// Parse and validate a JSON config file into a per-command option struct;
/// absence means "all defaults".
pub fn load_file<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, CliError> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| config_err(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| config_err(format!("invalid config {}: {e}", path.display())))
}

/// Resolve the surface from inline flags or the config file's `surface`
/// object. Both routes funnel through the same deserializer so the
/// validation and its messages are identical.
pub fn resolve_spec(
    family: Option<&str>,
    l: Option<f64>,
    m: Option<f64>,
    a: Option<f64>,
    file_surface: Option<Value>,
) -> Result<SurfaceSpec, CliError> {
    let value = match (family, file_surface) {
        (Some(name), None) => {
            let mut map = Map::new();
            map.insert("family".into(), Value::String(name.to_string()));
            for (key, v) in [("l", l), ("m", m), ("a", a)] {
                if let Some(v) = v {
                    map.insert(key.into(), Value::from(v));
                }
            }
            Value::Object(map)
        }
        (None, Some(value)) => value,
        (None, None) => {
            if l.is_some() || m.is_some() || a.is_some() {
                return Err(config_err("parameters --l, --m, --a require --family"));
            }
            return Err(config_err(
                "select a surface with --family or a --config file with a \"surface\" object",
            ));
        }
        // Clap marks --config as conflicting with the surface flags.
        (Some(_), Some(_)) => unreachable!("surface flags conflict with --config"),
    };
    serde_json::from_value(value).map_err(|e| config_err(format!("invalid surface: {e}")))
}

/// Config echo of the surface with the parameters at full precision.
pub fn spec_json(spec: SurfaceSpec) -> String {
    match spec {
        SurfaceSpec::ZollSphere { l, m } => format!(
            "{{\"family\":\"zoll-sphere\",\"l\":{},\"m\":{}}}",
            json_f64(l),
            json_f64(m)
        ),
        SurfaceSpec::TanneryPear => "{\"family\":\"tannery-pear\"}".to_string(),
        SurfaceSpec::TanneryGeneralized { a } => format!(
            "{{\"family\":\"tannery-generalized\",\"a\":{}}}",
            json_f64(a)
        ),
        SurfaceSpec::ZollOrbifold { a, m } => format!(
            "{{\"family\":\"zoll-orbifold\",\"a\":{},\"m\":{}}}",
            json_f64(a),
            json_f64(m)
        ),
    }
}

/// Parse an inclusive inclination grid written `start:end:count`. Every
/// value must sit strictly inside (0, pi/2), the band of non-equatorial,
/// non-meridian geodesics.
pub fn parse_i_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let [start, end, count] = parts[..] else {
        return Err(config_err(format!(
            "inclination grid must be start:end:count, got {text:?}"
        )));
    };
    let start: f64 = start
        .parse()
        .map_err(|_| config_err(format!("bad grid start {start:?} in {text:?}")))?;
    let end: f64 = end
        .parse()
        .map_err(|_| config_err(format!("bad grid end {end:?} in {text:?}")))?;
    let count: usize = count
        .parse()
        .map_err(|_| config_err(format!("bad grid count {count:?} in {text:?}")))?;
    if count == 0 {
        return Err(config_err(format!("grid {text:?} has zero points")));
    }
    let values: Vec<f64> = if count == 1 {
        vec![start]
    } else {
        (0..count)
            .map(|j| start + (end - start) * j as f64 / (count - 1) as f64)
            .collect()
    };
    for &i in &values {
        if !(i.is_finite() && 0.0 < i && i < 0.5 * PI) {
            return Err(config_err(format!(
                "inclination {i} from grid {text:?} is outside (0, pi/2)"
            )));
        }
    }
    Ok(values)
}

/// Require a strictly positive, finite tolerance or count-like option.
pub fn require_positive(name: &str, value: f64) -> Result<f64, CliError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(config_err(format!("{name} must be positive, got {value}")))
    }
}

/// Default inclination for single-geodesic commands. The orbifold family
/// needs the oscillation band [i, pi - i] to stay clear of the latitude
/// where its profile vanishes, so the default climbs above that floor;
/// the other families take a mid-band value.
pub fn default_inclination(spec: SurfaceSpec) -> Result<f64, CliError> {
    match profile_zero_latitude(spec).map_err(|e| CliError::Runtime(e.to_string()))? {
        None => Ok(0.7),
        Some(star) => {
            let floor = PI - star;
            let mut i = (floor + 0.15).max(0.7);
            if i >= 0.5 * PI {
                i = 0.5 * (floor + 0.5 * PI);
            }
            Ok(i)
        }
    }
}

/// Validate a user-supplied inclination for band-sensitive commands:
/// inside (0, pi/2), and for the orbifold above the degeneracy floor.
pub fn validate_inclination(spec: SurfaceSpec, i: f64) -> Result<(), CliError> {
    if !(i.is_finite() && 0.0 < i && i < 0.5 * PI) {
        return Err(config_err(format!(
            "inclination must lie strictly between 0 and pi/2, got {i}"
        )));
    }
    if let Some(star) = profile_zero_latitude(spec).map_err(|e| CliError::Runtime(e.to_string()))?
    {
        if PI - i >= star {
            return Err(config_err(format!(
                "the oscillation band [i, pi - i] over inclination i = {i} reaches the \
                 degenerate latitude {star:.6} where the profile vanishes; this family \
                 requires i > {:.6}",
                PI - star
            )));
        }
    }
    Ok(())
}
