//! Flat `key = value` config files and flag/file merging.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, thiserror::Error)]
pub enum SettingsError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config line {line}: expected `key = value`, got '{text}'")]
    Syntax { line: usize, text: String },
    #[error("invalid value for '{key}': {msg}")]
    Value { key: String, msg: String },
    #[error("unknown config key '{0}'")]
    UnknownKey(String),
}

pub const KNOWN_KEYS: &[&str] = &[
    "t", "r", "eta", "s", "u", "n", "m_max", "u_max", "n_u", "n_phi", "quad_tol", "panel_width",
    "series_tol", "m_cap", "mode", "path", "rep", "pair", "tol", "n_paths", "dt", "eps_r",
    "eps_eta", "seed", "substep_eps", "format", "output", "n_r", "n_eta", "r_max", "check",
    "continued", "pairs",
];

#[derive(Debug, Clone, Default)]
pub struct FileSettings(BTreeMap<String, String>);

impl FileSettings {
    pub fn parse(text: &str) -> Result<Self, SettingsError> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| SettingsError::Syntax {
                line: i + 1,
                text: raw.to_string(),
            })?;
            let key = k.trim().replace('-', "_");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(SettingsError::UnknownKey(key));
            }
            map.insert(key, v.trim().to_string());
        }
        Ok(FileSettings(map))
    }

    pub fn load(path: &Path) -> Result<Self, SettingsError> {
        let text = std::fs::read_to_string(path).map_err(|source| SettingsError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(|s| s.as_str())
    }

    /// Flag value if given, else the file value, else `default`.
    pub fn pick<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, SettingsError>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.raw(key) {
            Some(s) => s.parse().map_err(|e: T::Err| SettingsError::Value {
                key: key.into(),
                msg: e.to_string(),
            }),
            None => Ok(default),
        }
    }

    pub fn pick_opt<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, SettingsError>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key)
            .map(|s| {
                s.parse().map_err(|e: T::Err| SettingsError::Value {
                    key: key.into(),
                    msg: e.to_string(),
                })
            })
            .transpose()
    }

    pub fn pick_list(&self, flag: Option<&str>, key: &str, default: &[f64]) -> Result<Vec<f64>, SettingsError> {
        let text = match flag.or(self.raw(key)) {
            Some(t) => t,
            None => return Ok(default.to_vec()),
        };
        let list = parse_list(text).map_err(|msg| SettingsError::Value { key: key.into(), msg })?;
        if list.is_empty() {
            return Err(SettingsError::Value {
                key: key.into(),
                msg: "empty list".into(),
            });
        }
        Ok(list)
    }
}

/// One number, also accepting `pi`, `pi/4`, `3pi/4` and `3*pi/4`.
pub fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let bad = || format!("cannot parse '{s}' as a number");
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim().parse::<f64>().map_err(|_| bad())?),
        None => (s, 1.0),
    };
    let coef = num.strip_suffix("pi").ok_or_else(bad)?.trim_end_matches('*').trim();
    let c = if coef.is_empty() { 1.0 } else { coef.parse::<f64>().map_err(|_| bad())? };
    Ok(c * std::f64::consts::PI / den)
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').filter(|x| !x.trim().is_empty()).map(parse_number).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_file() {
        let f = FileSettings::parse("# grid\nt = 1, 2\nn-u=32\n\n").unwrap();
        assert_eq!(f.pick_list(None, "t", &[0.0]).unwrap(), vec![1.0, 2.0]);
        assert_eq!(f.pick::<usize>(None, "n_u", 16).unwrap(), 32);
        assert_eq!(f.pick::<usize>(Some(64), "n_u", 16).unwrap(), 64);
        assert_eq!(f.pick::<usize>(None, "n_phi", 48).unwrap(), 48);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(matches!(FileSettings::parse("t 1"), Err(SettingsError::Syntax { .. })));
        assert!(matches!(FileSettings::parse("bogus = 1"), Err(SettingsError::UnknownKey(_))));
        let f = FileSettings::parse("n_u = x").unwrap();
        assert!(f.pick::<usize>(None, "n_u", 1).is_err());
    }

    #[test]
    fn pi_fractions() {
        let pi = std::f64::consts::PI;
        assert_eq!(parse_list("0,pi/4,3pi/4,pi").unwrap(), vec![0.0, pi / 4.0, 3.0 * pi / 4.0, pi]);
        assert_eq!(parse_number("2*pi").unwrap(), 2.0 * pi);
        assert!(parse_number("tau").is_err());
    }
}
