use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::KernelError;

/// Namespaced context key, rendered as dot-joined segments (`PREY.PREY.mean_x`).
///
/// The last segment is the name; everything before it is the namespace.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ContextKey(String);

impl ContextKey {
    pub fn parse(raw: &str) -> Result<Self, KernelError> {
        let invalid = || KernelError::InvalidKey(raw.to_string());
        let segments: Vec<&str> = raw.split('.').collect();
        if segments.len() < 2 {
            return Err(invalid());
        }
        for seg in &segments {
            if seg.is_empty() || seg.chars().any(|c| c.is_whitespace() || c == ',') {
                return Err(invalid());
            }
        }
        Ok(Self(raw.to_string()))
    }

    /// Key from a string literal known to be well formed. Panics otherwise.
    pub fn lit(raw: &str) -> Self {
        Self::parse(raw).unwrap_or_else(|_| panic!("invalid context key literal {raw:?}"))
    }

    pub fn from_parts(namespace: &str, name: &str) -> Result<Self, KernelError> {
        Self::parse(&format!("{namespace}.{name}"))
    }

    pub fn namespace(&self) -> &str {
        let dot = self.0.rfind('.').expect("validated key has a dot");
        &self.0[..dot]
    }

    pub fn name(&self) -> &str {
        let dot = self.0.rfind('.').expect("validated key has a dot");
        &self.0[dot + 1..]
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ContextKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for ContextKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl FromStr for ContextKey {
    type Err = KernelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl Serialize for ContextKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for ContextKey {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        Self::parse(&raw).map_err(serde::de::Error::custom)
    }
}

/// A value stored in the context.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContextValue {
    Real(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Vector(Vec<f64>),
}

impl ContextValue {
    pub fn kind(&self) -> &'static str {
        match self {
            ContextValue::Real(_) => "real",
            ContextValue::Int(_) => "int",
            ContextValue::Bool(_) => "bool",
            ContextValue::Text(_) => "text",
            ContextValue::Vector(_) => "vector",
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            ContextValue::Real(x) => x.is_finite(),
            ContextValue::Vector(v) => v.iter().all(|x| x.is_finite()),
            _ => true,
        }
    }

    /// Scalar view used by metric hooks: reals as-is, ints widened, bools as 0/1.
    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            ContextValue::Real(x) => Some(*x),
            ContextValue::Int(i) => Some(*i as f64),
            ContextValue::Bool(b) => Some(if *b { 1.0 } else { 0.0 }),
            _ => None,
        }
    }
}

impl From<f64> for ContextValue {
    fn from(x: f64) -> Self {
        ContextValue::Real(x)
    }
}

impl From<i64> for ContextValue {
    fn from(x: i64) -> Self {
        ContextValue::Int(x)
    }
}

impl From<bool> for ContextValue {
    fn from(x: bool) -> Self {
        ContextValue::Bool(x)
    }
}

impl From<Vec<f64>> for ContextValue {
    fn from(x: Vec<f64>) -> Self {
        ContextValue::Vector(x)
    }
}

impl From<&str> for ContextValue {
    fn from(x: &str) -> Self {
        ContextValue::Text(x.to_string())
    }
}

impl From<String> for ContextValue {
    fn from(x: String) -> Self {
        ContextValue::Text(x)
    }
}

/// Shared simulation state at a tick.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Context {
    entries: BTreeMap<ContextKey, ContextValue>,
    tick: u64,
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_tick(tick: u64) -> Self {
        Self {
            entries: BTreeMap::new(),
            tick,
        }
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub(crate) fn advance(&mut self) {
        self.tick += 1;
    }

    /// Seed an entry. Used to build initial contexts; streams go through the kernel.
    pub fn insert(&mut self, key: ContextKey, value: impl Into<ContextValue>) -> &mut Self {
        self.entries.insert(key, value.into());
        self
    }

    pub fn get(&self, key: &ContextKey) -> Option<&ContextValue> {
        self.entries.get(key)
    }

    pub fn contains(&self, key: &ContextKey) -> bool {
        self.entries.contains_key(key)
    }

    pub fn real(&self, key: &ContextKey) -> Option<f64> {
        match self.entries.get(key) {
            Some(ContextValue::Real(x)) => Some(*x),
            _ => None,
        }
    }

    pub fn vector(&self, key: &ContextKey) -> Option<&[f64]> {
        match self.entries.get(key) {
            Some(ContextValue::Vector(v)) => Some(v),
            _ => None,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ContextKey, &ContextValue)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Store a merged write. Enforces type and vector-length stability per key.
    pub(crate) fn store(&mut self, key: ContextKey, value: ContextValue) -> Result<(), KernelError> {
        if let Some(prev) = self.entries.get(&key) {
            match (prev, &value) {
                (ContextValue::Vector(a), ContextValue::Vector(b)) if a.len() != b.len() => {
                    return Err(KernelError::VectorLength {
                        key,
                        expected: a.len(),
                        found: b.len(),
                    });
                }
                (a, b) if a.kind() != b.kind() => {
                    return Err(KernelError::TypeMismatch {
                        key,
                        expected: a.kind(),
                        found: b.kind(),
                    });
                }
                _ => {}
            }
        }
        self.entries.insert(key, value);
        Ok(())
    }
}
