//! Flat `key = value` configuration files.

use std::path::Path;

use hclab_core::schedule::ScheduleParams;
use hclab_core::{Polynomial, SpaceNorm};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub params: ScheduleParams,
    pub tol: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config { params: ScheduleParams::default(), tol: 0.01 }
    }
}

fn parse_num<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T, CliError> {
    value.parse().map_err(|_| CliError::Config(format!("line {line}: invalid value `{value}` for `{key}`")))
}

impl Config {
    /// Recognised keys: `g0`, `n_fans`, `space`, `base_grid_depth`, `tol`
    /// and `requests` (polynomials separated by `;`). Anything else is an
    /// error.
    pub fn parse(text: &str) -> Result<Config, CliError> {
        let mut cfg = Config::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {line}: expected `key = value`")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "g0" => cfg.params.g0 = parse_num(line, key, value)?,
                "n_fans" => cfg.params.n_fans = parse_num(line, key, value)?,
                "base_grid_depth" => cfg.params.base_grid_depth = parse_num(line, key, value)?,
                "tol" => cfg.tol = parse_num(line, key, value)?,
                "space" => {
                    cfg.params.space = value
                        .parse::<SpaceNorm>()
                        .map_err(|_| CliError::Config(format!("line {line}: unknown space `{value}`")))?
                }
                "requests" => {
                    cfg.params.requests = value
                        .split(';')
                        .filter(|s| !s.trim().is_empty())
                        .map(|s| Polynomial::parse(s).map_err(|e| CliError::Config(format!("line {line}: {e}"))))
                        .collect::<Result<_, _>>()?
                }
                other => return Err(CliError::Config(format!("line {line}: unknown key `{other}`"))),
            }
        }
        if !(cfg.tol >= 0.0) {
            return Err(CliError::Config(format!("tol must be non-negative, got {}", cfg.tol)));
        }
        cfg.params.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Config, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Config::parse(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_keys() {
        let cfg = Config::parse(
            "# comment\ng0 = 32\nn_fans = 7  # trailing\nspace = l2\nbase_grid_depth = 4\ntol = 0.5\nrequests = 0.25,-0.75; 1\n",
        )
        .unwrap();
        assert_eq!(cfg.params.g0, 32);
        assert_eq!(cfg.params.n_fans, 7);
        assert_eq!(cfg.params.space, SpaceNorm::L2);
        assert_eq!(cfg.params.base_grid_depth, 4);
        assert_eq!(cfg.tol, 0.5);
        assert_eq!(cfg.params.requests.len(), 2);
    }

    #[test]
    fn empty_text_gives_defaults() {
        assert_eq!(Config::parse("").unwrap(), Config::default());
    }

    #[test]
    fn rejects_bad_input() {
        for text in ["seed = 3", "g0 16", "g0 = x", "space = l7", "g0 = 2", "tol = -1"] {
            assert!(matches!(Config::parse(text), Err(CliError::Config(_))), "{text}");
        }
    }
}
