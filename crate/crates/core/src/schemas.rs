//! Search-space declarations.
//!
//! A [`Schema`] is an ordered list of genes. Genotypes always live in the
//! unit box `[0, 1]^n`; typed values only appear after [`Schema::decode`].

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::RngHandle;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchemaError {
    #[error("genotype has {found} components but the schema has {expected} genes")]
    LengthMismatch { expected: usize, found: usize },
    #[error("gene {0:?} appears more than once")]
    DuplicateGene(String),
    #[error("gene {name:?}: {reason}")]
    InvalidGene { name: String, reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneKind {
    Float { lo: f64, hi: f64 },
    /// Inclusive integer range.
    Int { lo: i64, hi: i64 },
    Choice { choices: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gene {
    pub name: String,
    #[serde(flatten)]
    pub kind: GeneKind,
}

impl Gene {
    pub fn float(name: &str, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            kind: GeneKind::Float { lo, hi },
        }
    }

    pub fn int(name: &str, lo: i64, hi: i64) -> Self {
        Self {
            name: name.into(),
            kind: GeneKind::Int { lo, hi },
        }
    }

    pub fn choice(name: &str, choices: &[&str]) -> Self {
        Self {
            name: name.into(),
            kind: GeneKind::Choice {
                choices: choices.iter().map(|c| c.to_string()).collect(),
            },
        }
    }

    fn check(&self) -> Result<(), SchemaError> {
        let fail = |reason: &str| {
            Err(SchemaError::InvalidGene {
                name: self.name.clone(),
                reason: reason.into(),
            })
        };
        match &self.kind {
            GeneKind::Float { lo, hi } if !(lo.is_finite() && hi.is_finite()) => fail("bounds must be finite"),
            GeneKind::Float { lo, hi } if lo >= hi => fail("float range needs lo < hi"),
            GeneKind::Int { lo, hi } if lo > hi => fail("int range needs lo <= hi"),
            GeneKind::Choice { choices } if choices.is_empty() => fail("choice list is empty"),
            _ => Ok(()),
        }
    }

    /// Decode one unit-interval coordinate.
    fn decode(&self, u: f64) -> GeneValue {
        match &self.kind {
            GeneKind::Float { lo, hi } => {
                if u >= 1.0 {
                    GeneValue::Float(*hi)
                } else {
                    GeneValue::Float((lo + u * (hi - lo)).min(*hi))
                }
            }
            GeneKind::Int { lo, hi } => {
                let span = (hi - lo + 1) as f64;
                let offset = (u * span).floor() as i64;
                GeneValue::Int((lo + offset).min(*hi))
            }
            GeneKind::Choice { choices } => {
                let idx = ((u * choices.len() as f64).floor() as usize).min(choices.len() - 1);
                GeneValue::Choice(choices[idx].clone())
            }
        }
    }
}

/// Typed value produced by decoding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeneValue {
    Int(i64),
    Float(f64),
    Choice(String),
}

impl GeneValue {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            GeneValue::Float(x) => Some(*x),
            GeneValue::Int(i) => Some(*i as f64),
            GeneValue::Choice(_) => None,
        }
    }
}

/// A unit-box vector, one coordinate per gene.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Genotype(pub Vec<f64>);

impl Genotype {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Clamp every coordinate into `[0, 1]`. NaN maps to 0.
pub fn repair(g: &Genotype) -> Genotype {
    Genotype(g.0.iter().map(|&u| clamp_unit(u)).collect())
}

pub(crate) fn clamp_unit(u: f64) -> f64 {
    if u.is_nan() {
        0.0
    } else {
        u.clamp(0.0, 1.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Gene>", into = "Vec<Gene>")]
pub struct Schema {
    genes: Vec<Gene>,
}

impl TryFrom<Vec<Gene>> for Schema {
    type Error = SchemaError;

    fn try_from(genes: Vec<Gene>) -> Result<Self, Self::Error> {
        Schema::new(genes)
    }
}

impl From<Schema> for Vec<Gene> {
    fn from(schema: Schema) -> Self {
        schema.genes
    }
}

impl Schema {
    pub fn new(genes: Vec<Gene>) -> Result<Self, SchemaError> {
        let mut names = BTreeSet::new();
        for gene in &genes {
            gene.check()?;
            if !names.insert(gene.name.as_str()) {
                return Err(SchemaError::DuplicateGene(gene.name.clone()));
            }
        }
        Ok(Self { genes })
    }

    pub fn genes(&self) -> &[Gene] {
        &self.genes
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    /// Map a genotype to named typed values.
    pub fn decode(&self, g: &Genotype) -> Result<BTreeMap<String, GeneValue>, SchemaError> {
        if g.len() != self.genes.len() {
            return Err(SchemaError::LengthMismatch {
                expected: self.genes.len(),
                found: g.len(),
            });
        }
        Ok(self
            .genes
            .iter()
            .zip(&g.0)
            .map(|(gene, &u)| (gene.name.clone(), gene.decode(clamp_unit(u))))
            .collect())
    }

    /// Uniform random genotype.
    pub fn sample(&self, rng: &mut RngHandle) -> Genotype {
        Genotype((0..self.genes.len()).map(|_| rng.uniform()).collect())
    }
}
