use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::tailed::Tailed;

/// A set of primes (by index) that is eventually constant in both
/// directions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrimeSet(Tailed<bool>);

impl PrimeSet {
    pub fn empty() -> Self {
        PrimeSet(Tailed::constant(false))
    }

    pub fn all() -> Self {
        PrimeSet(Tailed::constant(true))
    }

    /// Indices `< 0` follow `left`, indices `>= 0` follow `right`,
    /// `exceptions` override both.
    pub fn new(left: bool, right: bool, exceptions: impl IntoIterator<Item = (i64, bool)>) -> Self {
        PrimeSet(Tailed::from_parts(left, right, 0, exceptions))
    }

    pub fn from_indices(indices: impl IntoIterator<Item = i64>) -> Self {
        Self::new(false, false, indices.into_iter().map(|n| (n, true)))
    }

    pub(crate) fn from_tailed(t: Tailed<bool>) -> Self {
        PrimeSet(t)
    }

    pub fn contains(&self, n: i64) -> bool {
        self.0.value(n)
    }

    pub fn left_tail(&self) -> bool {
        self.0.left()
    }

    pub fn right_tail(&self) -> bool {
        self.0.right()
    }

    pub fn is_finite(&self) -> bool {
        !self.0.left() && !self.0.right()
    }

    pub fn is_cofinite(&self) -> bool {
        self.0.left() && self.0.right()
    }

    pub fn is_empty(&self) -> bool {
        *self == Self::empty()
    }

    /// The members, when there are finitely many.
    pub fn members(&self) -> Option<Vec<i64>> {
        self.is_finite()
            .then(|| self.0.exceptions().iter().filter(|(_, &v)| v).map(|(&n, _)| n).collect())
    }

    pub fn union(&self, other: &PrimeSet) -> PrimeSet {
        PrimeSet(self.0.zip_with(&other.0, |a, b| a || b))
    }

    pub fn intersection(&self, other: &PrimeSet) -> PrimeSet {
        PrimeSet(self.0.zip_with(&other.0, |a, b| a && b))
    }

    pub fn difference(&self, other: &PrimeSet) -> PrimeSet {
        PrimeSet(self.0.zip_with(&other.0, |a, b| a && !b))
    }

    pub fn complement(&self) -> PrimeSet {
        PrimeSet(self.0.map(|a| !a))
    }

    pub fn is_subset(&self, other: &PrimeSet) -> bool {
        self.difference(other).is_empty()
    }

    pub(crate) fn to_json_parts(&self) -> PrimeSetJson {
        PrimeSetJson {
            left: self.0.left(),
            right: self.0.right(),
            exc: self.0.exceptions_from_zero(),
        }
    }
}

impl fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self.to_json_parts();
        write!(f, "primes(left={}, right={};", parts.left, parts.right)?;
        let body: Vec<String> = parts.exc.iter().map(|(n, v)| format!(" {n}:{v}")).collect();
        write!(f, "{})", body.join(","))
    }
}

#[derive(Serialize)]
pub(crate) struct PrimeSetJson {
    left: bool,
    right: bool,
    exc: BTreeMap<i64, bool>,
}

impl Serialize for PrimeSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json_parts().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PrimeSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        // keys arrive as strings when the value sits inside a tagged enum
        #[derive(Deserialize)]
        struct Raw {
            left: bool,
            right: bool,
            #[serde(default)]
            exc: BTreeMap<String, bool>,
        }
        let raw = Raw::deserialize(d)?;
        let exc = raw
            .exc
            .into_iter()
            .map(|(k, v)| {
                k.trim()
                    .parse::<i64>()
                    .map(|n| (n, v))
                    .map_err(|_| serde::de::Error::custom(format!("prime index `{k}` is not an integer")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PrimeSet::new(raw.left, raw.right, exc))
    }
}
