//! JSON configuration files turned into command-line flags.
//!
//! A file `{"xi": 1.5, "grid": [101, 201, 201], "cuspless": true}` becomes
//! `--xi 1.5 --grid 101,201,201 --cuspless`, inserted right after the
//! subcommand. Keys also given as flags on the command line are dropped, so the
//! command line takes precedence.

use anyhow::{bail, Context, Result};
use serde_json::Value;

fn flag_value(v: &Value) -> Result<Option<String>> {
    Ok(match v {
        Value::Null | Value::Bool(false) => None,
        Value::Bool(true) => Some(String::new()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) => {
            let parts: Result<Vec<String>> =
                items.iter().map(|i| flag_value(i)?.filter(|s| !s.is_empty()).context("config arrays may only hold numbers and strings")).collect();
            Some(parts?.join(","))
        }
        Value::Object(_) => bail!("nested objects are not supported in config files"),
    })
}

/// Flags equivalent to a JSON object.
pub fn config_flags(json: &str) -> Result<Vec<String>> {
    let v: Value = serde_json::from_str(json).context("config file is not valid JSON")?;
    let Value::Object(map) = v else { bail!("config file must hold a JSON object") };
    let mut out = Vec::new();
    for (k, v) in &map {
        let flag = format!("--{}", k.replace('_', "-"));
        match flag_value(v)? {
            None => {}
            Some(s) if s.is_empty() => out.push(flag),
            Some(s) => {
                out.push(flag);
                out.push(s);
            }
        }
    }
    Ok(out)
}

/// Remove `--config FILE` from the arguments and splice in the file's flags.
pub fn expand(args: Vec<String>) -> Result<Vec<String>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut file = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            file = Some(it.next().context("--config needs a file")?);
        } else if let Some(f) = a.strip_prefix("--config=") {
            file = Some(f.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(file) = file else { return Ok(rest) };
    let text = std::fs::read_to_string(&file).with_context(|| format!("cannot read config file {file}"))?;
    let given: Vec<&str> = rest.iter().filter(|a| a.starts_with("--")).map(|a| a.split('=').next().unwrap_or(a)).collect();
    let mut flags = Vec::new();
    let mut skip = false;
    for f in config_flags(&text)? {
        if f.starts_with("--") {
            skip = given.contains(&f.as_str());
        }
        if !skip {
            flags.push(f);
        }
    }
    // The subcommand is the first argument after the program name that is not a flag.
    let at = rest.iter().skip(1).position(|a| !a.starts_with('-')).map_or(rest.len(), |p| p + 2);
    rest.splice(at..at, flags);
    Ok(rest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn objects_become_flags() {
        let f = config_flags(r#"{"xi": 1.5, "grid": [11, 21, 21], "cuspless": true, "stop_radius": null, "eps": 0.1, "flag": false}"#).unwrap();
        assert_eq!(f, ["--cuspless", "--eps", "0.1", "--grid", "11,21,21", "--xi", "1.5"]);
        assert!(config_flags("[1]").is_err());
        assert!(config_flags(r#"{"a": {"b": 1}}"#).is_err());
    }

    #[test]
    fn flags_follow_the_subcommand() {
        let dir = std::env::temp_dir().join(format!("srgeo-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.json");
        std::fs::write(&path, r#"{"xi": 2, "h2": -0.5, "cuspless": true}"#).unwrap();
        let args: Vec<String> = ["srgeo", "--config", path.to_str().unwrap(), "cusp", "--xi=3"].iter().map(|s| s.to_string()).collect();
        assert_eq!(expand(args).unwrap(), ["srgeo", "cusp", "--cuspless", "--h2", "-0.5", "--xi=3"]);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
