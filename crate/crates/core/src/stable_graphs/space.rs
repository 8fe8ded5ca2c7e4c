use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TautError};

/// Characters reserved by the expression language; they may not occur in
/// marking labels.
pub const RESERVED_LABEL_CHARS: &[char] = &[
    '[', ']', '{', '}', '(', ')', ',', ';', ':', '|', '#', '@', '^', '*', '/',
];

/// The moduli space of stable curves of a given genus with labelled markings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MarkedSpace {
    genus: u32,
    markings: Vec<String>,
}

impl MarkedSpace {
    pub fn new<I, S>(genus: u32, markings: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        if genus > 2 {
            return Err(TautError::UnsupportedGenus(genus));
        }
        let markings: Vec<String> = markings.into_iter().map(Into::into).collect();
        let mut seen = BTreeSet::new();
        for m in &markings {
            validate_label(m)?;
            if !seen.insert(m.as_str()) {
                return Err(TautError::InvalidSpace(format!("duplicate marking `{m}`")));
            }
        }
        if 2 * genus as i64 - 2 + markings.len() as i64 <= 0 {
            return Err(TautError::InvalidSpace(format!(
                "genus {genus} with {} markings is unstable",
                markings.len()
            )));
        }
        Ok(MarkedSpace { genus, markings })
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn markings(&self) -> &[String] {
        &self.markings
    }

    pub fn n(&self) -> usize {
        self.markings.len()
    }

    pub fn dimension(&self) -> i64 {
        3 * self.genus as i64 - 3 + self.markings.len() as i64
    }

    pub fn contains(&self, label: &str) -> bool {
        self.markings.iter().any(|m| m == label)
    }

    pub fn marking_set(&self) -> BTreeSet<String> {
        self.markings.iter().cloned().collect()
    }

    pub fn require(&self, label: &str) -> Result<()> {
        if self.contains(label) {
            Ok(())
        } else {
            Err(TautError::UnknownLabel(label.to_string()))
        }
    }

    /// The space with one more marking, the source of a forgetful map.
    pub fn with_marking(&self, label: &str) -> Result<Self> {
        if self.contains(label) {
            return Err(TautError::LabelCollision(label.to_string()));
        }
        let mut markings = self.markings.clone();
        markings.push(label.to_string());
        MarkedSpace::new(self.genus, markings)
    }

    /// The target of the map forgetting `label`.
    pub fn without_marking(&self, label: &str) -> Result<Self> {
        self.require(label)?;
        let markings: Vec<String> = self
            .markings
            .iter()
            .filter(|m| *m != label)
            .cloned()
            .collect();
        MarkedSpace::new(self.genus, markings).map_err(|_| {
            TautError::UnstableTarget(format!("forgetting `{label}` from {self}"))
        })
    }
}

impl PartialEq for MarkedSpace {
    fn eq(&self, other: &Self) -> bool {
        self.genus == other.genus && self.marking_set() == other.marking_set()
    }
}

impl Eq for MarkedSpace {}

impl fmt::Display for MarkedSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M({}; {})", self.genus, self.markings.join(","))
    }
}

pub fn validate_label(label: &str) -> Result<()> {
    if label.is_empty()
        || label.chars().any(|c| c.is_whitespace() || RESERVED_LABEL_CHARS.contains(&c))
    {
        return Err(TautError::InvalidSpace(format!("invalid marking label `{label}`")));
    }
    Ok(())
}

/// `3g - 3 + n`.
pub fn dimension(space: &MarkedSpace) -> i64 {
    space.dimension()
}
