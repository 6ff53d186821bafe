//! Parsing of the textual body descriptor.
//!
//! ```text
//! body   := atom ( '*' atom )*
//! atom   := kind [ ':' params ]
//! params := key '=' value (',' value)* ( ',' key '=' value (',' value)* )*
//! ```
//!
//! A comma-separated token containing `=` starts a new key; tokens without
//! `=` extend the value list of the current key, so `polydisc:r=1,2` and
//! `cylinder:R=1.5,n=2` both parse naturally.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Atom {
    pub kind: String,
    pub params: BTreeMap<String, Vec<f64>>,
    pub source: String,
}

pub(crate) fn split_product(input: &str) -> Vec<&str> {
    input.split('*').map(str::trim).collect()
}

pub(crate) fn parse_atom(input: &str) -> Result<Atom> {
    let input = input.trim();
    if input.is_empty() {
        return Err(Error::descriptor(input, "empty descriptor"));
    }
    let (kind, rest) = match input.split_once(':') {
        Some((k, r)) => (k.trim(), r.trim()),
        None => (input, ""),
    };
    if kind.is_empty() || !kind.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
        return Err(Error::descriptor(input, format!("invalid kind `{kind}`")));
    }
    let mut params: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut current: Option<String> = None;
    if !rest.is_empty() {
        for token in rest.split(',') {
            let token = token.trim();
            let value_text = if let Some((key, value)) = token.split_once('=') {
                let key = key.trim().to_string();
                if key.is_empty() {
                    return Err(Error::descriptor(input, "empty parameter name"));
                }
                if params.contains_key(&key) {
                    return Err(Error::descriptor(input, format!("duplicate parameter `{key}`")));
                }
                params.insert(key.clone(), Vec::new());
                current = Some(key);
                value
            } else {
                token
            };
            let Some(key) = current.as_ref() else {
                return Err(Error::descriptor(input, format!("value `{token}` before any key")));
            };
            let value = parse_number(value_text.trim())
                .ok_or_else(|| Error::descriptor(input, format!("`{value_text}` is not a number")))?;
            params.get_mut(key).expect("key inserted above").push(value);
        }
    }
    Ok(Atom {
        kind: kind.to_ascii_lowercase(),
        params,
        source: input.to_string(),
    })
}

fn parse_number(text: &str) -> Option<f64> {
    match text {
        "inf" | "+inf" | "infinity" => Some(f64::INFINITY),
        _ => text.parse::<f64>().ok().filter(|v| !v.is_nan()),
    }
}

impl Atom {
    fn err(&self, reason: impl Into<String>) -> Error {
        Error::descriptor(&self.source, reason)
    }

    pub fn list(&self, key: &str) -> Result<&[f64]> {
        self.params
            .get(key)
            .map(Vec::as_slice)
            .ok_or_else(|| self.err(format!("missing parameter `{key}`")))
    }

    pub fn opt_list(&self, key: &str) -> Option<&[f64]> {
        self.params.get(key).map(Vec::as_slice)
    }

    pub fn scalar(&self, key: &str) -> Result<f64> {
        match self.list(key)? {
            [v] => Ok(*v),
            other => Err(self.err(format!("`{key}` expects one value, got {}", other.len()))),
        }
    }

    pub fn opt_scalar(&self, key: &str) -> Result<Option<f64>> {
        if self.params.contains_key(key) {
            self.scalar(key).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn dim(&self, key: &str) -> Result<usize> {
        let v = self.scalar(key)?;
        if v >= 1.0 && v.fract() == 0.0 && v < 1e6 {
            Ok(v as usize)
        } else {
            Err(self.err(format!("`{key}` must be a positive integer, got {v}")))
        }
    }

    pub fn opt_dim(&self, key: &str) -> Result<Option<usize>> {
        if self.params.contains_key(key) {
            self.dim(key).map(Some)
        } else {
            Ok(None)
        }
    }

    /// Rejects parameters outside `allowed`.
    pub fn only(&self, allowed: &[&str]) -> Result<()> {
        for key in self.params.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(self.err(format!(
                    "unknown parameter `{key}` for `{}` (expected one of {allowed:?})",
                    self.kind
                )));
            }
        }
        Ok(())
    }
}

/// Writes a list of floats with the shortest round-trip representation.
pub(crate) fn fmt_list(values: &[f64]) -> String {
    values.iter().map(|v| fmt_num(*v)).collect::<Vec<_>>().join(",")
}

pub(crate) fn fmt_num(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_string()
    } else {
        format!("{v}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_multi_value_and_scalar_keys() {
        let a = parse_atom("cylinder:R=1.1774100,n=2").unwrap();
        assert_eq!(a.kind, "cylinder");
        assert_eq!(a.scalar("R").unwrap(), 1.17741);
        assert_eq!(a.dim("n").unwrap(), 2);

        let b = parse_atom("polydisc:r=1,2,inf").unwrap();
        assert_eq!(b.list("r").unwrap(), &[1.0, 2.0, f64::INFINITY]);

        let c = parse_atom("lp:p=2,w=1,0.5,scale=3").unwrap();
        assert_eq!(c.list("w").unwrap(), &[1.0, 0.5]);
        assert_eq!(c.scalar("scale").unwrap(), 3.0);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_atom("").is_err());
        assert!(parse_atom("poly disc:r=1").is_err());
        assert!(parse_atom("polydisc:1,2").is_err());
        assert!(parse_atom("polydisc:r=a").is_err());
        assert!(parse_atom("polydisc:r=1,r=2").is_err());
        assert!(parse_atom("polydisc:r=nan").is_err());
        assert!(parse_atom("cylinder:R=1,n=1.5").unwrap().dim("n").is_err());
    }

    #[test]
    fn product_split() {
        assert_eq!(split_product("a:x=1 * b:y=2"), vec!["a:x=1", "b:y=2"]);
    }
}
