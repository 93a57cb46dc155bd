//! Symbolic descriptors for finite rank torsion-free groups and for direct
//! products of them.
//!
//! A descriptor records exactly the data the decision procedures consume:
//! the types of rank-1 summands, and for groups declared indecomposable the
//! rank, the inner type and the set of primes at which the group is
//! divisible. Strong indecomposability of such groups is an input
//! assumption and is not checked.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::typelat::{PrimeSet, TypeHandle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Multiplicity {
    Finite(u32),
    /// Countably many copies.
    Omega,
}

impl Multiplicity {
    pub fn is_omega(self) -> bool {
        self == Multiplicity::Omega
    }

    pub fn count(self) -> Option<u32> {
        match self {
            Multiplicity::Finite(c) => Some(c),
            Multiplicity::Omega => None,
        }
    }

    fn times(self, n: u32) -> Multiplicity {
        match self {
            Multiplicity::Finite(c) => Multiplicity::Finite(c * n),
            Multiplicity::Omega => Multiplicity::Omega,
        }
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplicity::Finite(c) => write!(f, "{c}"),
            Multiplicity::Omega => f.write_str("omega"),
        }
    }
}

impl std::str::FromStr for Multiplicity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "omega" | "ω" => Ok(Multiplicity::Omega),
            t => t
                .parse()
                .map(Multiplicity::Finite)
                .map_err(|_| Error::parse(1, format!("`{t}` is neither a count nor `omega`"))),
        }
    }
}

impl Serialize for Multiplicity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Multiplicity::Finite(c) => s.serialize_u32(*c),
            Multiplicity::Omega => s.serialize_str("omega"),
        }
    }
}

impl<'de> Deserialize<'de> for Multiplicity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(u32),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Count(c) => Ok(Multiplicity::Finite(c)),
            Raw::Word(w) if w == "omega" => Ok(Multiplicity::Omega),
            Raw::Word(w) => Err(serde::de::Error::custom(format!(
                "multiplicity must be a positive integer or \"omega\", found \"{w}\""
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupDescriptor {
    Rank1(TypeHandle),
    CompletelyDecomposable(Vec<TypeHandle>),
    Indecomposable {
        rank: usize,
        inner_type: TypeHandle,
        divisible: PrimeSet,
        label: String,
    },
    Product(Vec<(GroupDescriptor, Multiplicity)>),
}

/// A broken descriptor invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptySummands,
    RankTooSmall { label: String, rank: usize },
    /// Declared divisible at a prime where the inner type is finite.
    DivisibleWithFiniteInnerType { label: String, primes: PrimeSet },
    /// Inner type is infinite at a prime missing from the divisible set.
    InfiniteInnerTypeNotDivisible { label: String, primes: PrimeSet },
    EmptyProduct,
    NestedProduct { factor: usize },
    ZeroMultiplicity { factor: usize },
    InFactor { factor: usize, inner: Box<Violation> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptySummands => f.write_str("completely decomposable group without summands"),
            Violation::RankTooSmall { label, rank } => {
                write!(f, "indecomposable `{label}` has rank {rank}, expected at least 2")
            }
            Violation::DivisibleWithFiniteInnerType { label, primes } => write!(
                f,
                "indecomposable `{label}` is declared divisible where its inner type is finite: {primes}"
            ),
            Violation::InfiniteInnerTypeNotDivisible { label, primes } => write!(
                f,
                "indecomposable `{label}` has infinite inner type at primes not declared divisible: {primes}"
            ),
            Violation::EmptyProduct => f.write_str("product without factors"),
            Violation::NestedProduct { factor } => write!(f, "factor {factor} is itself a product"),
            Violation::ZeroMultiplicity { factor } => write!(f, "factor {factor} has multiplicity 0"),
            Violation::InFactor { factor, inner } => write!(f, "factor {factor}: {inner}"),
        }
    }
}

impl GroupDescriptor {
    pub fn rank1(t: TypeHandle) -> Self {
        GroupDescriptor::Rank1(t)
    }

    pub fn cd(summands: impl IntoIterator<Item = TypeHandle>) -> Self {
        GroupDescriptor::CompletelyDecomposable(summands.into_iter().collect())
    }

    /// An indecomposable descriptor whose divisible set is read off the
    /// inner type.
    pub fn indecomposable(rank: usize, inner_type: TypeHandle, label: impl Into<String>) -> Self {
        GroupDescriptor::Indecomposable {
            rank,
            divisible: inner_type.rep().infinite_set(),
            inner_type,
            label: label.into(),
        }
    }

    pub fn product(factors: impl IntoIterator<Item = (GroupDescriptor, Multiplicity)>) -> Self {
        GroupDescriptor::Product(factors.into_iter().collect())
    }

    /// `None` for infinite rank.
    pub fn rank(&self) -> Option<usize> {
        match self {
            GroupDescriptor::Rank1(_) => Some(1),
            GroupDescriptor::CompletelyDecomposable(s) => Some(s.len()),
            GroupDescriptor::Indecomposable { rank, .. } => Some(*rank),
            GroupDescriptor::Product(factors) => factors.iter().try_fold(0usize, |acc, (g, m)| {
                Some(acc + g.rank()? * m.count()? as usize)
            }),
        }
    }

    pub fn is_finite_rank(&self) -> bool {
        self.rank().is_some()
    }

    /// Types of the rank-1 summands, for rank-1 and completely decomposable
    /// descriptors.
    pub fn summand_types(&self) -> Option<&[TypeHandle]> {
        match self {
            GroupDescriptor::Rank1(t) => Some(std::slice::from_ref(t)),
            GroupDescriptor::CompletelyDecomposable(s) => Some(s),
            _ => None,
        }
    }

    /// The inner type. For products this is the infimum over the distinct
    /// factors; it is only a helper there and carries no claim about
    /// elements of infinite products.
    pub fn inner_type(&self) -> TypeHandle {
        match self {
            GroupDescriptor::Rank1(t) => t.clone(),
            GroupDescriptor::CompletelyDecomposable(s) => {
                TypeHandle::inf_all(s).unwrap_or_else(TypeHandle::zero)
            }
            GroupDescriptor::Indecomposable { inner_type, .. } => inner_type.clone(),
            GroupDescriptor::Product(factors) => {
                TypeHandle::inf_all(factors.iter().map(|(g, _)| g.inner_type()).collect::<Vec<_>>().iter())
                    .unwrap_or_else(TypeHandle::zero)
            }
        }
    }

    pub fn is_p_divisible(&self, n: i64) -> bool {
        match self {
            GroupDescriptor::Rank1(t) => t.value(n).is_inf(),
            GroupDescriptor::CompletelyDecomposable(s) => s.iter().all(|t| t.value(n).is_inf()),
            GroupDescriptor::Indecomposable { divisible, .. } => divisible.contains(n),
            GroupDescriptor::Product(factors) => factors.iter().all(|(g, _)| g.is_p_divisible(n)),
        }
    }

    /// The set of primes at which the group is divisible.
    pub fn divisible_set(&self) -> PrimeSet {
        match self {
            GroupDescriptor::Rank1(t) => t.rep().infinite_set(),
            GroupDescriptor::CompletelyDecomposable(s) => s
                .iter()
                .fold(PrimeSet::all(), |acc, t| acc.intersection(&t.rep().infinite_set())),
            GroupDescriptor::Indecomposable { divisible, .. } => divisible.clone(),
            GroupDescriptor::Product(factors) => factors
                .iter()
                .fold(PrimeSet::all(), |acc, (g, _)| acc.intersection(&g.divisible_set())),
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        match self {
            GroupDescriptor::Rank1(_) => {}
            GroupDescriptor::CompletelyDecomposable(s) => {
                if s.is_empty() {
                    out.push(Violation::EmptySummands);
                }
            }
            GroupDescriptor::Indecomposable {
                rank,
                inner_type,
                divisible,
                label,
            } => {
                if *rank < 2 {
                    out.push(Violation::RankTooSmall {
                        label: label.clone(),
                        rank: *rank,
                    });
                }
                let infinite = inner_type.rep().infinite_set();
                let extra = divisible.difference(&infinite);
                if !extra.is_empty() {
                    out.push(Violation::DivisibleWithFiniteInnerType {
                        label: label.clone(),
                        primes: extra,
                    });
                }
                let missing = infinite.difference(divisible);
                if !missing.is_empty() {
                    out.push(Violation::InfiniteInnerTypeNotDivisible {
                        label: label.clone(),
                        primes: missing,
                    });
                }
            }
            GroupDescriptor::Product(factors) => {
                if factors.is_empty() {
                    out.push(Violation::EmptyProduct);
                }
                for (i, (g, m)) in factors.iter().enumerate() {
                    if matches!(g, GroupDescriptor::Product(_)) {
                        out.push(Violation::NestedProduct { factor: i });
                    }
                    if *m == Multiplicity::Finite(0) {
                        out.push(Violation::ZeroMultiplicity { factor: i });
                    }
                    out.extend(g.validate().into_iter().map(|v| Violation::InFactor {
                        factor: i,
                        inner: Box::new(v),
                    }));
                }
            }
        }
        out
    }

    pub fn validated(self) -> Result<Self> {
        let v = self.validate();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(Error::Invalid(v))
        }
    }

    fn as_factors(&self) -> Vec<(GroupDescriptor, Multiplicity)> {
        match self {
            GroupDescriptor::Product(f) => f.clone(),
            g => vec![(g.clone(), Multiplicity::Finite(1))],
        }
    }
}

/// Finite direct sum. Rank-1 and completely decomposable inputs flatten to a
/// completely decomposable descriptor (a single summand stays rank 1); any
/// other input yields a finite product.
pub fn direct_sum(groups: &[GroupDescriptor]) -> Result<GroupDescriptor> {
    if groups.is_empty() {
        return Err(Error::Unsupported("direct sum of an empty list".into()));
    }
    if let Some(bad) = groups.iter().find(|g| !g.is_finite_rank()) {
        return Err(Error::Unsupported(format!(
            "direct sum needs finite rank inputs, got a factor of infinite rank ({})",
            bad.rank().map_or("omega".to_string(), |r| r.to_string())
        )));
    }
    if groups.iter().all(|g| g.summand_types().is_some()) {
        let mut summands: Vec<TypeHandle> = groups
            .iter()
            .flat_map(|g| g.summand_types().unwrap_or_default().iter().cloned())
            .collect();
        return Ok(if summands.len() == 1 {
            GroupDescriptor::Rank1(summands.remove(0))
        } else {
            GroupDescriptor::CompletelyDecomposable(summands)
        });
    }
    Ok(GroupDescriptor::Product(groups.iter().flat_map(GroupDescriptor::as_factors).collect()))
}

/// `G^n` for `n >= 1`.
pub fn power(g: &GroupDescriptor, n: u32) -> Result<GroupDescriptor> {
    if n == 0 {
        return Err(Error::Unsupported("power exponent must be at least 1".into()));
    }
    if n == 1 {
        return Ok(g.clone());
    }
    match g {
        GroupDescriptor::Rank1(_) | GroupDescriptor::CompletelyDecomposable(_) => {
            direct_sum(&vec![g.clone(); n as usize])
        }
        GroupDescriptor::Indecomposable { .. } => {
            Ok(GroupDescriptor::Product(vec![(g.clone(), Multiplicity::Finite(n))]))
        }
        GroupDescriptor::Product(factors) => Ok(GroupDescriptor::Product(
            factors.iter().map(|(f, m)| (f.clone(), m.times(n))).collect(),
        )),
    }
}

pub fn inner_type(g: &GroupDescriptor) -> TypeHandle {
    g.inner_type()
}

pub fn is_p_divisible(g: &GroupDescriptor, n: i64) -> bool {
    g.is_p_divisible(n)
}

pub fn validate(g: &GroupDescriptor) -> Vec<Violation> {
    g.validate()
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum DescriptorJson {
    Rank1 {
        #[serde(rename = "type")]
        ty: TypeHandle,
    },
    Cd {
        summands: Vec<TypeHandle>,
    },
    Indec {
        rank: usize,
        it: TypeHandle,
        divisible: PrimeSet,
        #[serde(default)]
        label: String,
    },
    Product {
        factors: Vec<(DescriptorJson, Multiplicity)>,
    },
}

impl From<&GroupDescriptor> for DescriptorJson {
    fn from(g: &GroupDescriptor) -> Self {
        match g {
            GroupDescriptor::Rank1(t) => DescriptorJson::Rank1 { ty: t.clone() },
            GroupDescriptor::CompletelyDecomposable(s) => DescriptorJson::Cd { summands: s.clone() },
            GroupDescriptor::Indecomposable {
                rank,
                inner_type,
                divisible,
                label,
            } => DescriptorJson::Indec {
                rank: *rank,
                it: inner_type.clone(),
                divisible: divisible.clone(),
                label: label.clone(),
            },
            GroupDescriptor::Product(f) => DescriptorJson::Product {
                factors: f.iter().map(|(g, m)| (g.into(), *m)).collect(),
            },
        }
    }
}

impl From<DescriptorJson> for GroupDescriptor {
    fn from(j: DescriptorJson) -> Self {
        match j {
            DescriptorJson::Rank1 { ty } => GroupDescriptor::Rank1(ty),
            DescriptorJson::Cd { summands } => GroupDescriptor::CompletelyDecomposable(summands),
            DescriptorJson::Indec {
                rank,
                it,
                divisible,
                label,
            } => GroupDescriptor::Indecomposable {
                rank,
                inner_type: it,
                divisible,
                label,
            },
            DescriptorJson::Product { factors } => {
                GroupDescriptor::Product(factors.into_iter().map(|(g, m)| (g.into(), m)).collect())
            }
        }
    }
}

impl Serialize for GroupDescriptor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DescriptorJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupDescriptor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        DescriptorJson::deserialize(d).map(Into::into)
    }
}
