//! Text cache of verified factorizations.
//!
//! One entry per line, `VALUE = P1^E1 * P2^E2 * ...`, `^1` optional, `#`
//! starts a comment. Every entry is re-verified when loaded: the product must
//! reproduce the value and every prime must pass the probable-prime test.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigUint;

use super::Factorization;
use crate::error::{Error, Result};

const SHIPPED: &str = include_str!("../../data/factor_cache.txt");

#[derive(Clone, Debug, Default)]
pub struct FactorCache {
    entries: BTreeMap<BigUint, Factorization>,
    source: Option<PathBuf>,
}

fn parse_uint(s: &str) -> Result<BigUint, String> {
    let s = s.trim();
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("not a decimal integer: {s:?}"));
    }
    BigUint::from_str(s).map_err(|e| e.to_string())
}

fn parse_entry(line: &str) -> Result<Option<Factorization>, String> {
    let body = line.split('#').next().unwrap_or("").trim();
    if body.is_empty() {
        return Ok(None);
    }
    let (lhs, rhs) = body
        .split_once('=')
        .ok_or_else(|| "missing '='".to_string())?;
    let value = parse_uint(lhs)?;
    let mut factors = Vec::new();
    let rhs = rhs.trim();
    if !rhs.is_empty() {
        for term in rhs.split('*') {
            let (p, e) = match term.split_once('^') {
                Some((p, e)) => (
                    parse_uint(p)?,
                    e.trim()
                        .parse::<u32>()
                        .map_err(|_| format!("bad exponent {e:?}"))?,
                ),
                None => (parse_uint(term)?, 1),
            };
            if e == 0 {
                return Err("zero exponent".into());
            }
            factors.push((p, e));
        }
    }
    Factorization::verified(value, factors).map(Some)
}

impl FactorCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parse and verify cache text. `source_name` labels errors.
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            match parse_entry(line) {
                Ok(Some(f)) => {
                    entries.insert(f.value().clone(), f);
                }
                Ok(None) => {}
                Err(message) => {
                    return Err(Error::Cache {
                        source_name: source_name.to_string(),
                        line: i + 1,
                        message,
                    })
                }
            }
        }
        Ok(FactorCache {
            entries,
            source: None,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cache = Self::parse(&text, &path.display().to_string())?;
        cache.source = Some(path.to_path_buf());
        Ok(cache)
    }

    /// The cache bundled with the library (factorizations of q^n - 1 needed by
    /// the exception scan), verified on every call.
    pub fn shipped() -> Result<Self> {
        Self::parse(SHIPPED, "<shipped>")
    }

    pub fn source(&self) -> Option<&Path> {
        self.source.as_deref()
    }

    pub fn get(&self, value: &BigUint) -> Option<&Factorization> {
        self.entries.get(value)
    }

    pub fn insert(&mut self, f: Factorization) {
        self.entries.insert(f.value().clone(), f);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Factorization> {
        self.entries.values()
    }

    /// Serialize in the file syntax, entries in increasing value.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for f in self.entries.values() {
            out.push_str(&f.to_string());
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_optional_exponents() {
        let text = "# header\n48 = 2^4 * 3 # trailing\n\n1 =\n80 = 2^4*5^1\n";
        let c = FactorCache::parse(text, "t").unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.get(&BigUint::from(48u32)).unwrap().omega(), 2);
    }

    #[test]
    fn rejects_wrong_product_with_line_number() {
        let text = "48 = 2^4 * 3\n49 = 7\n";
        match FactorCache::parse(text, "t") {
            Err(Error::Cache { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_composite_factor() {
        let text = "# ok\n36 = 4 * 9\n";
        match FactorCache::parse(text, "t") {
            Err(Error::Cache { line, message, .. }) => {
                assert_eq!(line, 2);
                assert!(message.contains("not prime"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(FactorCache::parse("48 2^4 * 3", "t").is_err());
        assert!(FactorCache::parse("48 = 2^x * 3", "t").is_err());
        assert!(FactorCache::parse("-48 = 2", "t").is_err());
    }

    #[test]
    fn text_round_trip() {
        let text = "80 = 2^4 * 5\n48 = 2^4 * 3\n";
        let c = FactorCache::parse(text, "t").unwrap();
        let again = FactorCache::parse(&c.to_text(), "t").unwrap();
        assert_eq!(c.to_text(), again.to_text());
        assert!(c.to_text().starts_with("48 ="));
    }

    #[test]
    fn shipped_cache_verifies() {
        let c = FactorCache::shipped().unwrap();
        assert!(!c.is_empty());
        let v = BigUint::from(11u32).pow(12) - 1u32;
        assert!(c.get(&v).is_some());
    }
}
