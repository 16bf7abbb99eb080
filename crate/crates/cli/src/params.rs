//! Merged parameters: defaults, then the config file, then flags.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;

use crate::Failure;

/// Largest amplitude accepted anywhere; the branch ends near 0.5477.
pub const EPS_LIMIT: f64 = 0.55;

pub struct Params {
    map: BTreeMap<String, String>,
}

impl Params {
    /// `defaults` lists every known key; `None` marks keys without a
    /// default. Unknown keys in `file` or `flags` are rejected.
    pub fn merge(
        defaults: &[(&str, Option<&str>)],
        file: &BTreeMap<String, String>,
        flags: &BTreeMap<String, String>,
    ) -> Result<Self, Failure> {
        let mut map = BTreeMap::new();
        for (k, v) in defaults {
            if let Some(v) = v {
                map.insert(k.to_string(), v.to_string());
            }
        }
        for (k, v) in file.iter().chain(flags) {
            let k = k.replace('_', "-");
            if !defaults.iter().any(|(d, _)| *d == k) {
                return Err(Failure::usage(format!("unknown parameter `{k}`")));
            }
            map.insert(k, v.clone());
        }
        Ok(Self { map })
    }

    pub fn map(&self) -> &BTreeMap<String, String> {
        &self.map
    }

    pub fn has(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    pub fn str(&self, key: &str) -> Result<&str, Failure> {
        self.map
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Failure::usage(format!("missing parameter `{key}`")))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T, Failure>
    where
        T::Err: Display,
    {
        let s = self.str(key)?;
        s.parse()
            .map_err(|e| Failure::usage(format!("bad value for `{key}` ({s:?}): {e}")))
    }

    pub fn opt<T: FromStr>(&self, key: &str) -> Result<Option<T>, Failure>
    where
        T::Err: Display,
    {
        if self.has(key) {
            self.get(key).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn flag(&self, key: &str) -> Result<bool, Failure> {
        match self.map.get(key).map(String::as_str) {
            None | Some("false") | Some("0") | Some("no") => Ok(false),
            Some("true") | Some("1") | Some("yes") | Some("") => Ok(true),
            Some(s) => Err(Failure::usage(format!("bad value for `{key}`: {s:?}"))),
        }
    }

    pub fn choice<'a>(&self, key: &str, allowed: &[&'a str]) -> Result<&'a str, Failure> {
        let s = self.str(key)?;
        allowed
            .iter()
            .find(|a| **a == s)
            .copied()
            .ok_or_else(|| Failure::usage(format!("`{key}` must be one of {allowed:?}, got {s:?}")))
    }

    pub fn eps(&self, key: &str) -> Result<f64, Failure> {
        let e: f64 = self.get(key)?;
        check_eps(e)?;
        Ok(e)
    }

    pub fn eps_list(&self, key: &str) -> Result<Vec<f64>, Failure> {
        let s = self.str(key)?;
        let list = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| Failure::usage(format!("bad amplitude {t:?} in `{key}`: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        for &e in &list {
            check_eps(e)?;
        }
        Ok(list)
    }
}

fn check_eps(e: f64) -> Result<(), Failure> {
    if !(e.abs() <= EPS_LIMIT) {
        return Err(Failure::usage(format!("|eps| = {} exceeds {EPS_LIMIT}", e.abs())));
    }
    Ok(())
}
