//! Report assembly: named checks, hand-built JSON, artifact writing.
//!
//! Reports are assembled as strings rather than through a serializer so the
//! field order and float formatting are byte-stable: identical run
//! configurations must produce identical documents. Wall-clock timings go
//! to stderr for the same reason.

use std::fs;
use std::io;
use std::path::Path;
use std::time::Instant;

/// Float field at 17 significant digits. Non-finite values render as JSON
/// null: a measurement that failed to produce a number, never a pass.
pub fn json_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".to_string()
    }
}

/// JSON string escape for the ASCII diagnostics the reports carry.
pub fn json_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                out.push_str(&format!("\\u{:04x}", c as u32));
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// One verification check: a named residual held against a tolerance, or a
/// skip recording why the quantity is undefined for the surface at hand.
///
/// A measured check passes when its residual is finite and below the
/// tolerance. Counting checks reuse the same shape with the offender count
/// as the residual and 1.0 as the tolerance ("fewer than one offender").
/// Skipped checks never fail.
pub struct Check {
    name: &'static str,
    outcome: Outcome,
}

enum Outcome {
    Measured {
        residual: f64,
        tolerance: f64,
        detail: Option<String>,
    },
    Skipped {
        reason: String,
    },
}

impl Check {
    pub fn measured(name: &'static str, residual: f64, tolerance: f64) -> Self {
        Check {
            name,
            outcome: Outcome::Measured {
                residual,
                tolerance,
                detail: None,
            },
        }
    }

    pub fn with_detail(
        name: &'static str,
        residual: f64,
        tolerance: f64,
        detail: String,
    ) -> Self {
        Check {
            name,
            outcome: Outcome::Measured {
                residual,
                tolerance,
                detail: Some(detail),
            },
        }
    }

    /// A check whose measurement itself failed: NaN residual (rendered as
    /// null), always failing, with the error as the detail.
    pub fn failed(name: &'static str, tolerance: f64, error: String) -> Self {
        Check {
            name,
            outcome: Outcome::Measured {
                residual: f64::NAN,
                tolerance,
                detail: Some(error),
            },
        }
    }

    /// Counting check: passes only when `count` is zero.
    pub fn counted(name: &'static str, count: usize, detail: Option<String>) -> Self {
        Check {
            name,
            outcome: Outcome::Measured {
                residual: count as f64,
                tolerance: 1.0,
                detail,
            },
        }
    }

    pub fn skipped(name: &'static str, reason: String) -> Self {
        Check {
            name,
            outcome: Outcome::Skipped { reason },
        }
    }

    pub fn passes(&self) -> bool {
        match &self.outcome {
            Outcome::Measured {
                residual,
                tolerance,
                ..
            } => residual.is_finite() && residual < tolerance,
            Outcome::Skipped { .. } => true,
        }
    }

    pub fn to_json(&self) -> String {
        match &self.outcome {
            Outcome::Measured {
                residual,
                tolerance,
                detail,
            } => {
                let mut s = format!(
                    "{{\"name\":{},\"residual\":{},\"tolerance\":{},\"pass\":{}",
                    json_str(self.name),
                    json_f64(*residual),
                    json_f64(*tolerance),
                    self.passes()
                );
                if let Some(d) = detail {
                    s.push_str(",\"detail\":");
                    s.push_str(&json_str(d));
                }
                s.push('}');
                s
            }
            Outcome::Skipped { reason } => format!(
                "{{\"name\":{},\"skipped\":true,\"reason\":{}}}",
                json_str(self.name),
                json_str(reason)
            ),
        }
    }
}

/// A complete command report: config echo, command-specific results, and
/// the check list. Serialized with a fixed field order.
pub struct Document {
    pub command: &'static str,
    /// JSON object text echoing the resolved configuration.
    pub config: String,
    /// Ordered key/JSON-value fragments of the results object.
    pub results: Vec<(String, String)>,
    pub checks: Vec<Check>,
}

impl Document {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(Check::passes)
    }

    pub fn to_json(&self) -> String {
        let mut s = format!(
            "{{\"tool\":\"tannery\",\"version\":{},\"command\":{},\"config\":{}",
            json_str(env!("CARGO_PKG_VERSION")),
            json_str(self.command),
            self.config
        );
        s.push_str(",\"results\":{");
        for (k, (key, value)) in self.results.iter().enumerate() {
            if k > 0 {
                s.push(',');
            }
            s.push_str(&json_str(key));
            s.push(':');
            s.push_str(value);
        }
        s.push_str("},\"checks\":[");
        for (k, check) in self.checks.iter().enumerate() {
            if k > 0 {
                s.push(',');
            }
            s.push_str(&check.to_json());
        }
        s.push_str(&format!("],\"pass\":{}}}", self.pass()));
        s
    }

    /// Write the document to `out`, or to stdout when no path is given.
    pub fn write(&self, out: Option<&Path>) -> io::Result<()> {
        let text = self.to_json();
        match out {
            Some(path) => fs::write(path, text + "\n"),
            None => {
                println!("{text}");
                Ok(())
            }
        }
    }
}

/// Run `f`, reporting its wall-clock time on stderr.
pub fn time<T>(label: &str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let value = f();
    eprintln!(
        "timing {label}: {:.3} ms",
        start.elapsed().as_secs_f64() * 1e3
    );
    value
}
