use std::{io::Write, path::Path};

use serde::Serialize;
use serde_json::{json, Value};

use crate::CliError;

pub const TOOL: &str = "crackecon";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance attached to every artifact.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: Option<u64>,
    pub config: Value,
}

impl Meta {
    pub fn new(command: &'static str, seed: Option<u64>, config: Value) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            command,
            seed,
            config,
        }
    }

    fn comment_lines(&self) -> String {
        let seed = self.seed.map_or("none".to_string(), |s| s.to_string());
        format!(
            "# tool: {} {}\n# command: {}\n# seed: {}\n# config: {}\n",
            self.tool, self.version, self.command, seed, self.config
        )
    }
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, Value> = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(k, v)| {
                        let val = v
                            .parse::<f64>()
                            .ok()
                            .filter(|_| !v.is_empty())
                            .map_or(Value::String(v.clone()), |x| json!(x));
                        (k.to_string(), val)
                    })
                    .collect();
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }
}

/// Shortest round-trip form, switching to exponent notation for very small
/// or very large magnitudes.
pub fn num(x: f64) -> String {
    let m = x.abs();
    if m != 0.0 && m.is_finite() && !(1e-4..1e15).contains(&m) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub enum Artifact {
    Json(Value),
    Table(Table),
    /// Plain text whose lines may start with `#` comments.
    Text(String),
}

pub fn render(meta: &Meta, artifact: Artifact, csv: bool) -> Result<String, CliError> {
    Ok(match artifact {
        Artifact::Table(t) if csv => {
            let mut s = meta.comment_lines();
            s.push_str(&t.header.join(","));
            s.push('\n');
            for row in &t.rows {
                s.push_str(&row.join(","));
                s.push('\n');
            }
            s
        }
        Artifact::Table(t) => json_doc(meta, t.to_json())?,
        Artifact::Json(v) if csv => {
            // Flatten a single object to one header row and one value row.
            let Value::Object(map) = &v else {
                return Err(CliError::Usage(
                    "this result has no CSV form; use --format json".into(),
                ));
            };
            let mut s = meta.comment_lines();
            let keys: Vec<&str> = map.keys().map(String::as_str).collect();
            let vals: Vec<String> = map
                .values()
                .map(|x| match x {
                    Value::String(s) => s.clone(),
                    Value::Null => String::new(),
                    Value::Array(_) | Value::Object(_) => x.to_string().replace(',', ";"),
                    other => other.to_string(),
                })
                .collect();
            s.push_str(&keys.join(","));
            s.push('\n');
            s.push_str(&vals.join(","));
            s.push('\n');
            s
        }
        Artifact::Json(v) => json_doc(meta, v)?,
        Artifact::Text(body) => {
            let mut s = meta.comment_lines();
            s.push_str(&body);
            s
        }
    })
}

fn json_doc(meta: &Meta, result: Value) -> Result<String, CliError> {
    let doc = json!({ "meta": meta, "result": result });
    let mut s = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Data(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Data(format!("cannot write to stdout: {e}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::num;

    #[test]
    fn numbers_round_trip() {
        for x in [
            0.0,
            1.0,
            22.24,
            7.002333333333334e-15,
            2.5e17,
            -3.0e-9,
            0.1 + 0.2,
        ] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(7e-15), "7e-15");
        assert_eq!(num(100.0), "100");
    }
}
