//! Plain-text `key=value` settings. Values given as flags take precedence.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::CliError;

pub const KNOWN_KEYS: &[&str] = &[
    "m1",
    "m2",
    "k0",
    "kernel",
    "n",
    "L",
    "width",
    "horizon",
    "cfl",
    "dealias",
    "blowup-factor",
    "tail-limit",
    "stride",
    "x-min",
    "x-max",
    "y-min",
    "y-max",
    "nx",
    "ny",
    "backend",
    "m1-lo",
    "m1-hi",
    "m1-count",
    "m2-mode",
    "m2-lo",
    "m2-hi",
    "m2-count",
    "samples",
    "seed",
];

#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
    source: String,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, source: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("{source}:{}: expected key=value, found `{line}`", i + 1)))?;
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(CliError::usage(format!("{source}:{}: unknown key `{key}`", i + 1)));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self {
            values,
            source: source.to_string(),
        })
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::usage(format!("{}: bad value `{v}` for `{key}`", self.source))),
        }
    }

    /// The flag value if given, else the config value, else `None`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    pub fn pick_or<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError> {
        Ok(self.pick(flag, key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<T, CliError> {
        self.pick(flag, key)?
            .ok_or_else(|| CliError::usage(format!("missing --{key} (flag or config key)")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let cfg = Config::parse("# comment\nn = 2048\nkernel=gaussian:1\n", "cfg").unwrap();
        assert_eq!(cfg.pick(Some(512usize), "n").unwrap(), Some(512));
        assert_eq!(cfg.pick(None::<usize>, "n").unwrap(), Some(2048));
        assert_eq!(cfg.pick_or(None, "cfl", 0.3).unwrap(), 0.3);
        assert_eq!(cfg.require::<String>(None, "kernel").unwrap(), "gaussian:1");
    }

    #[test]
    fn malformed_files_are_usage_errors() {
        assert!(matches!(Config::parse("n 2048", "cfg"), Err(CliError::Usage(_))));
        assert!(matches!(Config::parse("colour=red", "cfg"), Err(CliError::Usage(_))));
        let cfg = Config::parse("n=many", "cfg").unwrap();
        assert!(matches!(cfg.get::<usize>("n"), Err(CliError::Usage(_))));
        assert!(cfg.require::<f64>(None, "m1").is_err());
    }
}
