//! Flat `key = value` records.
//!
//! One entry per line, `#` starts a comment, keys may be dotted
//! (`model.kind`). Floats are written with the shortest representation that
//! parses back to the same bits, so a record written and read again
//! reproduces every number exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Record {
    entries: BTreeMap<String, String>,
}

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::Parse {
                    line: i + 1,
                    message: "empty key".into(),
                });
            }
            if entries
                .insert(key.to_string(), value.trim().to_string())
                .is_some()
            {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("duplicate key `{key}`"),
                });
            }
        }
        Ok(Self { entries })
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.entries.insert(key.to_string(), value.to_string());
        self
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.entries
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.entries.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e: T::Err| Error::InvalidValue {
                    key: key.to_string(),
                    message: e.to_string(),
                }),
        }
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)?
            .ok_or_else(|| Error::MissingKey(key.to_string()))
    }

    pub fn get_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(v) = self.entries.get(key) else {
            return Ok(None);
        };
        v.split(',')
            .map(|s| {
                s.trim().parse::<f64>().map_err(|e| Error::InvalidValue {
                    key: key.to_string(),
                    message: e.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    /// Keys not present in `allowed`; entries ending in `.*` match any suffix.
    pub fn unknown_keys(&self, allowed: &[&str]) -> Vec<String> {
        self.entries
            .keys()
            .filter(|k| {
                !allowed.iter().any(|a| match a.strip_suffix('*') {
                    Some(prefix) => k.starts_with(prefix),
                    None => a == k,
                })
            })
            .cloned()
            .collect()
    }

    /// Entries under `prefix.`, with the prefix removed.
    pub fn section(&self, prefix: &str) -> Self {
        let head = format!("{prefix}.");
        Self {
            entries: self
                .entries
                .iter()
                .filter_map(|(k, v)| {
                    k.strip_prefix(&head)
                        .map(|rest| (rest.to_string(), v.clone()))
                })
                .collect(),
        }
    }

    /// Copy every entry of `other` under `prefix.`.
    pub fn merge_section(&mut self, prefix: &str, other: &Record) -> &mut Self {
        for (k, v) in &other.entries {
            self.entries.insert(format!("{prefix}.{k}"), v.clone());
        }
        self
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

/// Git-style content hash: SHA-256 of `blob <len>\0<text>`, hex encoded.
pub fn content_hash(text: &str) -> String {
    use sha2::{Digest, Sha256};
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", text.len()).as_bytes());
    h.update(text.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn join_list(values: &[f64]) -> String {
    values
        .iter()
        .map(f64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_dotted_keys() {
        let r = Record::parse("# header\nmodel.kind = heisenberg  # trailing\n\nseed=7\n").unwrap();
        assert_eq!(r.get_str("model.kind"), Some("heisenberg"));
        assert_eq!(r.require::<u64>("seed").unwrap(), 7);
    }

    #[test]
    fn rejects_duplicates_and_garbage() {
        assert!(Record::parse("a = 1\na = 2").is_err());
        assert!(Record::parse("just words").is_err());
    }

    #[test]
    fn floats_round_trip_bit_exact() {
        let x: f64 = 0.1 + 0.2;
        let mut r = Record::new();
        r.set("x", x);
        let back = Record::parse(&r.to_text()).unwrap();
        assert_eq!(back.require::<f64>("x").unwrap().to_bits(), x.to_bits());
    }

    #[test]
    fn unknown_keys_are_listed() {
        let r = Record::parse("model.kind = x\nmodle.theta = 1\noptimizer.foo = 2").unwrap();
        let unknown = r.unknown_keys(&["model.kind", "optimizer.*"]);
        assert_eq!(unknown, vec!["modle.theta".to_string()]);
    }
}
