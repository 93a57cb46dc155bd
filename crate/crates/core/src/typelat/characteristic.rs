use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ext::ExtValue;
use super::primeset::PrimeSet;
use super::tailed::{joint_span, Tailed};
use crate::error::{Error, Result};

/// A characteristic: one height value in `N ∪ {∞}` per prime index.
///
/// Stored as a [`Tailed`] sequence, so every characteristic has a finite
/// description and structural equality is value equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Characteristic(Tailed<ExtValue>);

impl Characteristic {
    /// Indices `< 0` read `left`, indices `>= 0` read `right`; `exceptions`
    /// override both. This is the reading used by the textual format.
    pub fn new(
        left: ExtValue,
        right: ExtValue,
        exceptions: impl IntoIterator<Item = (i64, ExtValue)>,
    ) -> Self {
        Self::with_split(left, right, 0, exceptions)
    }

    /// Like [`Characteristic::new`] but with the tails meeting at `split`.
    pub fn with_split(
        left: ExtValue,
        right: ExtValue,
        split: i64,
        exceptions: impl IntoIterator<Item = (i64, ExtValue)>,
    ) -> Self {
        Characteristic(Tailed::from_parts(left, right, split, exceptions))
    }

    pub fn constant(v: ExtValue) -> Self {
        Characteristic(Tailed::constant(v))
    }

    pub fn zero() -> Self {
        Self::constant(ExtValue::ZERO)
    }

    /// `∞` at each listed index, `0` elsewhere.
    pub fn infinite_at(indices: impl IntoIterator<Item = i64>) -> Self {
        Self::new(
            ExtValue::ZERO,
            ExtValue::ZERO,
            indices.into_iter().map(|n| (n, ExtValue::Inf)),
        )
    }

    pub(crate) fn from_tailed(t: Tailed<ExtValue>) -> Self {
        Characteristic(t)
    }

    pub(crate) fn tailed(&self) -> &Tailed<ExtValue> {
        &self.0
    }

    pub fn value(&self, n: i64) -> ExtValue {
        self.0.value(n)
    }

    pub fn left_tail(&self) -> ExtValue {
        self.0.left()
    }

    pub fn right_tail(&self) -> ExtValue {
        self.0.right()
    }

    pub fn low(&self) -> i64 {
        self.0.low()
    }

    pub fn high(&self) -> i64 {
        self.0.high()
    }

    pub fn exceptions(&self) -> &BTreeMap<i64, ExtValue> {
        self.0.exceptions()
    }

    /// A window `[lo, hi)` outside of which only the tails are read.
    pub fn span(&self) -> (i64, i64) {
        self.0.span()
    }

    /// Largest finite value that occurs anywhere (tails included).
    pub fn max_finite(&self) -> u64 {
        let (lo, hi) = self.span();
        [self.left_tail(), self.right_tail()]
            .into_iter()
            .chain((lo..hi).map(|n| self.value(n)))
            .filter_map(ExtValue::finite)
            .max()
            .unwrap_or(0)
    }

    pub fn infinite_set(&self) -> PrimeSet {
        PrimeSet::from_tailed(self.0.map(ExtValue::is_inf))
    }

    pub fn finite_set(&self) -> PrimeSet {
        PrimeSet::from_tailed(self.0.map(|v| v != ExtValue::ZERO && v.is_finite()))
    }

    pub fn zero_set(&self) -> PrimeSet {
        PrimeSet::from_tailed(self.0.map(|v| v == ExtValue::ZERO))
    }

    /// `(S∞, S_f, S_0)`: primes of infinite, finite positive and zero value.
    pub fn support_sets(&self) -> (PrimeSet, PrimeSet, PrimeSet) {
        (self.infinite_set(), self.finite_set(), self.zero_set())
    }

    pub fn pointwise_min(&self, other: &Characteristic) -> Characteristic {
        Characteristic(self.0.zip_with(&other.0, ExtValue::min))
    }

    pub fn pointwise_max(&self, other: &Characteristic) -> Characteristic {
        Characteristic(self.0.zip_with(&other.0, ExtValue::max))
    }

    /// Adds `shifts[n]` at each listed index. Fails if a finite value would
    /// drop below zero.
    pub fn shifted(&self, shifts: &BTreeMap<i64, i64>) -> Option<Characteristic> {
        let (Some(&first), Some(&last)) = (shifts.keys().next(), shifts.keys().next_back()) else {
            return Some(self.clone());
        };
        let (lo, hi) = joint_span(self.span(), (first, last + 1));
        let values = (lo..hi)
            .map(|n| self.value(n).checked_shift(shifts.get(&n).copied().unwrap_or(0)))
            .collect::<Option<Vec<_>>>()?;
        Some(Characteristic(Tailed::from_window(self.left_tail(), self.right_tail(), lo, values)))
    }

    /// Same `S∞` and equal finite values at almost all other primes.
    pub fn equivalent(&self, other: &Characteristic) -> bool {
        self.left_tail() == other.left_tail()
            && self.right_tail() == other.right_tail()
            && self.infinite_set() == other.infinite_set()
    }

    /// The type order read off two representatives: only finitely many
    /// primes may exceed, and none of them with an infinite value.
    pub fn type_le(&self, other: &Characteristic) -> bool {
        if self.left_tail() > other.left_tail() || self.right_tail() > other.right_tail() {
            return false;
        }
        let (lo, hi) = joint_span(self.span(), other.span());
        (lo..hi).all(|n| !(self.value(n).is_inf() && other.value(n).is_finite()))
    }

    /// Every value is `0` or `∞`.
    pub fn is_zero_inf_valued(&self) -> bool {
        self.0.all(|v| v == ExtValue::ZERO || v.is_inf())
    }
}

impl fmt::Display for Characteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "char(left={}, right={};", self.left_tail(), self.right_tail())?;
        let body: Vec<String> = self
            .0
            .exceptions_from_zero()
            .iter()
            .map(|(n, v)| format!(" {n}:{v}"))
            .collect();
        write!(f, "{})", body.join(","))
    }
}

impl FromStr for Characteristic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Parser::new(s).characteristic()
    }
}

impl Serialize for Characteristic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Characteristic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Parser for `char(left=<v>, right=<v>; <idx>:<v>, ...)`.
struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    fn err(&self, reason: impl Into<String>) -> Error {
        Error::parse(self.pos + 1, reason)
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{token}`")))
        }
    }

    fn word(&mut self) -> &'a str {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-' || c == '+'))
            .unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    fn ext_value(&mut self) -> Result<ExtValue> {
        let start = self.pos;
        let w = self.word();
        w.parse().map_err(|reason: String| {
            self.pos = start;
            self.skip_ws();
            self.err(reason)
        })
    }

    fn tail(&mut self, key: &str) -> Result<ExtValue> {
        self.expect(key)?;
        self.expect("=")?;
        self.ext_value()
    }

    fn characteristic(mut self) -> Result<Characteristic> {
        self.expect("char")?;
        self.expect("(")?;
        let left = self.tail("left")?;
        self.expect(",")?;
        let right = self.tail("right")?;
        self.expect(";")?;
        let mut exceptions = BTreeMap::new();
        loop {
            if self.eat(")") {
                break;
            }
            let at = self.pos;
            let w = self.word();
            let idx: i64 = w.parse().map_err(|_| {
                self.pos = at;
                self.skip_ws();
                self.err(format!("expected a signed prime index, found `{w}`"))
            })?;
            self.expect(":")?;
            let v = self.ext_value()?;
            if exceptions.insert(idx, v).is_some() {
                return Err(self.err(format!("index {idx} listed twice")));
            }
            if !self.eat(",") {
                self.expect(")")?;
                break;
            }
        }
        self.skip_ws();
        if self.pos != self.src.len() {
            return Err(self.err("trailing input after `)`"));
        }
        Ok(Characteristic::new(left, right, exceptions))
    }
}
