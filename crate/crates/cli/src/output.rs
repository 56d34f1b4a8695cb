//! Artifacts, headers and the run manifest.

use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RegimeParams;
use crate::error::CliError;

/// Formats a float with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    JsonLines,
}

/// One output file; the header is added when it is rendered.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub name: String,
    pub format: Format,
    pub body: String,
}

impl Artifact {
    pub fn csv(name: &str, body: String) -> Self {
        Artifact { name: name.into(), format: Format::Csv, body }
    }

    pub fn json<T: Serialize>(name: &str, value: &T) -> Result<Self, CliError> {
        let v = serde_json::to_value(value).map_err(|e| CliError::Io(e.to_string()))?;
        Ok(Artifact { name: name.into(), format: Format::Json, body: v.to_string() })
    }

    pub fn json_lines(name: &str, body: String) -> Self {
        Artifact { name: name.into(), format: Format::JsonLines, body }
    }
}

/// What a subcommand hands back to the runner.
#[derive(Debug, Clone)]
pub struct Report {
    pub pass: bool,
    pub summary: String,
    pub params: RegimeParams,
    pub artifacts: Vec<Artifact>,
    /// Wall time per sweep point, in sweep order.
    pub points: Vec<(String, f64)>,
}

impl Report {
    pub fn new(pass: bool, summary: String, artifacts: Vec<Artifact>) -> Self {
        Report { pass, summary, params: RegimeParams::default(), artifacts, points: Vec::new() }
    }
}

fn params_value(p: &RegimeParams) -> Value {
    if p.is_empty() {
        return Value::Null;
    }
    json!({
        "epsilon": p.epsilon,
        "r": p.r,
        "kappa": p.kappa,
        "in_regime": p.in_regime(),
    })
}

/// Renders an artifact with the config hash (and parameters, when used) embedded.
pub fn render(a: &Artifact, command: &str, hash: &str, params: &RegimeParams) -> String {
    match a.format {
        Format::Csv => {
            let mut s = format!("# nilradon {command} config_sha256={hash}\n");
            if !params.is_empty() {
                let regime = if params.in_regime() { "inside" } else { "outside" };
                s.push_str(&format!("# parameters {} asymptotic_regime={regime}\n", params.describe()));
            }
            s.push_str(&a.body);
            s
        }
        Format::Json => {
            let result: Value = serde_json::from_str(&a.body).expect("artifact bodies are valid JSON");
            let doc = json!({
                "command": command,
                "config_sha256": hash,
                "parameters": params_value(params),
                "result": result,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
            s.push('\n');
            s
        }
        Format::JsonLines => {
            let head = json!({ "command": command, "config_sha256": hash, "parameters": params_value(params) });
            format!("{head}\n{}", a.body)
        }
    }
}

/// Run manifest: config echo, versions, wall times and outcome.
pub fn manifest(command: &str, echo: &Value, hash: &str, report: &Report, compute_seconds: f64) -> Value {
    let points: Vec<Value> = report.points.iter().map(|(label, s)| json!({ "point": label, "seconds": s })).collect();
    json!({
        "command": command,
        "config": echo,
        "config_sha256": hash,
        "versions": {
            "nilradon": nilradon::VERSION,
            "nilradon-cli": env!("CARGO_PKG_VERSION"),
        },
        "parameters": params_value(&report.params),
        "pass": report.pass,
        "summary": report.summary,
        "artifacts": report.artifacts.iter().map(|a| a.name.clone()).collect::<Vec<_>>(),
        "wall_times": { "compute_seconds": compute_seconds, "points": points },
    })
}

/// Writes every artifact and `manifest.json` into `dir`, creating it if needed.
pub fn write_all(dir: &Path, command: &str, hash: &str, report: &Report, manifest: &Value) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    for a in &report.artifacts {
        std::fs::write(dir.join(&a.name), render(a, command, hash, &report.params))?;
    }
    let mut m = serde_json::to_string_pretty(manifest).expect("JSON values serialize");
    m.push('\n');
    std::fs::write(dir.join("manifest.json"), m)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(1.0), "1.0000000000000000e0");
        let x = 2.0f64.sqrt();
        assert_eq!(num(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn headers_embed_the_hash() {
        let a = Artifact::csv("t.csv", "a,b\n1,2\n".into());
        let p = RegimeParams { d: Some(1), epsilon: None, r: Some(2), kappa: None };
        let s = render(&a, "x", "abc", &p);
        assert!(s.starts_with("# nilradon x config_sha256=abc\n# parameters epsilon=-,r=2,kappa=- asymptotic_regime=outside\na,b\n"));
        let j = Artifact::json("t.json", &json!({"k": 1})).unwrap();
        let v: Value = serde_json::from_str(&render(&j, "x", "abc", &p)).unwrap();
        assert_eq!(v["config_sha256"], "abc");
        assert_eq!(v["result"]["k"], 1);
    }
}
