//! Flat `key = value` files with `[section]` headers.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Section {
    pub name: String,
    entries: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Section {
    pub fn new(name: impl Into<String>) -> Self {
        Section {
            name: name.into(),
            entries: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), value.into());
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| {
                ConfigError(format!("[{}] {key}: cannot parse `{v}`", self.name))
            }),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T, ConfigError> {
        self.get(key)?
            .ok_or_else(|| ConfigError(format!("[{}] missing key `{key}`", self.name)))
    }

    /// Comma-separated reals, or `start:stop:step` inclusive of `stop` up to rounding.
    pub fn reals(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        self.raw(key).map(|v| parse_reals(v).map_err(|e| ConfigError(format!("[{}] {key}: {e}", self.name)))).transpose()
    }
}

pub fn parse_reals(s: &str) -> Result<Vec<f64>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(vec![]);
    }
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("range `{s}` must be start:stop:step"));
        }
        let v: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad number `{p}`")))
            .collect::<Result<_, _>>()?;
        let (a, b, h) = (v[0], v[1], v[2]);
        if !(h > 0.0) || b < a {
            return Err(format!("range `{s}` needs step > 0 and stop >= start"));
        }
        let n = ((b - a) / h + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| a + i as f64 * h).collect());
    }
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad number `{p}`")))
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    pub sections: Vec<Section>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        let mut sections = vec![Section::new("")];
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError(format!("line {}: unterminated section header", no + 1)))?
                    .trim();
                if name.is_empty() {
                    return Err(ConfigError(format!("line {}: empty section name", no + 1)));
                }
                if sections.iter().any(|s| s.name == name) {
                    return Err(ConfigError(format!("line {}: duplicate section [{name}]", no + 1)));
                }
                sections.push(Section::new(name));
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected key = value", no + 1)))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(ConfigError(format!("line {}: empty key", no + 1)));
            }
            sections.last_mut().expect("global section").set(k, v.trim());
        }
        Ok(Config { sections })
    }

    pub fn global(&self) -> &Section {
        &self.sections[0]
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    /// Named sections in file order.
    pub fn experiments(&self) -> impl Iterator<Item = &Section> {
        self.sections.iter().skip(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_keys() {
        let c = Config::parse("seed = 3\n# note\n[a]\nx = 1.5\ny = -1:1:0.5\n\n[b]\nname = power\n").unwrap();
        assert_eq!(c.global().get::<u64>("seed").unwrap(), Some(3));
        let a = c.section("a").unwrap();
        assert_eq!(a.require::<f64>("x").unwrap(), 1.5);
        assert_eq!(a.reals("y").unwrap().unwrap(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(c.experiments().count(), 2);
        assert!(a.require::<f64>("z").is_err());
        assert!(c.section("b").unwrap().get::<f64>("name").is_err());
    }

    #[test]
    fn malformed() {
        assert!(Config::parse("[a\n").is_err());
        assert!(Config::parse("novalue\n").is_err());
        assert!(Config::parse("[a]\n[a]\n").is_err());
        assert!(parse_reals("1:0:1").is_err());
        assert_eq!(parse_reals("").unwrap(), Vec::<f64>::new());
        assert_eq!(parse_reals("-10:10:0.01").unwrap().len(), 2001);
    }
}
