//! Plain `key = value` configuration files.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Parses one pair per line. Blank lines and lines starting with `#` are
/// skipped; keys are `[A-Za-z0-9_-]+`, values are trimmed and may be empty.
/// A repeated key is an error.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |why: &str| Error::Parse(format!("line {}: {why}", i + 1));
        let (k, v) = line.split_once('=').ok_or_else(|| err("expected key = value"))?;
        let k = k.trim();
        if k.is_empty() || !k.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-') {
            return Err(err("bad key"));
        }
        if out.insert(k.to_string(), v.trim().to_string()).is_some() {
            return Err(err("duplicate key"));
        }
    }
    Ok(out)
}

/// Inverse of [`parse_config`] for maps whose values have no line breaks.
pub fn emit_config(map: &BTreeMap<String, String>) -> String {
    map.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}
