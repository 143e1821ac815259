//! Flat `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` or `%` are ignored. Keys are the
//! long flag names without dashes (`semantics`, `grammar`, `printer`,
//! `models`, `max-time`, `log-level`); `const` takes `name=value`. Repeated
//! `grammar` and `const` keys accumulate; other keys keep the last value.

use anyhow::{bail, Context, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FileConfig {
    pub semantics: Option<String>,
    pub grammars: Vec<String>,
    pub constants: Vec<String>,
    pub printer: Option<String>,
    pub models: Option<usize>,
    pub max_time: Option<i64>,
    pub log_level: Option<String>,
}

pub fn parse_config(text: &str) -> Result<FileConfig> {
    let mut cfg = FileConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
            continue;
        }
        let (key, value) = line.split_once('=').with_context(|| format!("line {}: expected key = value", i + 1))?;
        let (key, value) = (key.trim(), value.trim().to_string());
        let number = |what: &str| format!("line {}: {what} must be an integer", i + 1);
        match key {
            "semantics" | "semantics-encoding" => cfg.semantics = Some(value),
            "grammar" | "syntax-encoding" => cfg.grammars.push(value),
            "const" | "c" => cfg.constants.push(value),
            "printer" => cfg.printer = Some(value),
            "models" => cfg.models = Some(value.parse().with_context(|| number("models"))?),
            "max-time" => cfg.max_time = Some(value.parse().with_context(|| number("max-time"))?),
            "log-level" => cfg.log_level = Some(value),
            other => bail!("line {}: unknown key `{other}`", i + 1),
        }
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_keys_and_skips_comments() {
        let cfg = parse_config("# run\nsemantics = mel\nconst = n=3\nconst=k=1\n\nmodels = 2\nmax-time=9\n").unwrap();
        assert_eq!(cfg.semantics.as_deref(), Some("mel"));
        assert_eq!(cfg.constants, ["n=3", "k=1"]);
        assert_eq!((cfg.models, cfg.max_time), (Some(2), Some(9)));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_numbers() {
        assert!(parse_config("colour = red").is_err());
        assert!(parse_config("models = many").is_err());
        assert!(parse_config("just words").is_err());
    }
}
