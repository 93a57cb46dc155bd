use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::characteristic::Characteristic;
use super::ext::ExtValue;
use super::tailed::Tailed;
use crate::error::Error;

/// A type: an equivalence class of characteristics, held through its
/// canonical representative.
///
/// The canonical representative keeps every `∞` in place and rewrites each
/// finite value to a fixed template that depends only on the tails: the
/// finite tail value on a side where the tail is finite (split at index 0
/// when both tails are finite), or `0` when both tails are `∞`. Finitely many
/// finite values change, so the result stays in the class, and two
/// equivalent characteristics produce the same template.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypeHandle(Characteristic);

impl TypeHandle {
    pub fn of(chi: &Characteristic) -> TypeHandle {
        TypeHandle(canonical(chi))
    }

    pub fn zero() -> TypeHandle {
        TypeHandle(Characteristic::zero())
    }

    pub fn rep(&self) -> &Characteristic {
        &self.0
    }

    pub fn value(&self, n: i64) -> ExtValue {
        self.0.value(n)
    }

    pub fn le(&self, other: &TypeHandle) -> bool {
        self.0.type_le(&other.0)
    }

    pub fn lt(&self, other: &TypeHandle) -> bool {
        self != other && self.le(other)
    }

    pub fn inf(&self, other: &TypeHandle) -> TypeHandle {
        TypeHandle::of(&self.0.pointwise_min(&other.0))
    }

    pub fn sup(&self, other: &TypeHandle) -> TypeHandle {
        TypeHandle::of(&self.0.pointwise_max(&other.0))
    }

    /// Representable by a `{0, ∞}`-valued characteristic, i.e. `S_f` finite.
    pub fn is_idempotent(&self) -> bool {
        let idem = |v: ExtValue| v == ExtValue::ZERO || v.is_inf();
        idem(self.0.left_tail()) && idem(self.0.right_tail())
    }

    /// Infimum of a nonempty collection; `None` for an empty one.
    pub fn inf_all<'a>(types: impl IntoIterator<Item = &'a TypeHandle>) -> Option<TypeHandle> {
        types.into_iter().fold(None, |acc: Option<TypeHandle>, t| {
            Some(match acc {
                None => t.clone(),
                Some(a) => a.inf(t),
            })
        })
    }
}

fn canonical(chi: &Characteristic) -> Characteristic {
    use ExtValue::{Fin, Inf};
    let (tl, tr) = match (chi.left_tail(), chi.right_tail()) {
        (Inf, Inf) => (Fin(0), Fin(0)),
        (Inf, r) => (r, r),
        (l, Inf) => (l, l),
        (l, r) => (l, r),
    };
    let template = Tailed::from_parts(tl, tr, 0, []);
    Characteristic::from_tailed(
        chi.tailed()
            .zip_with(&template, |v, t| if v.is_inf() { Inf } else { t }),
    )
}

impl From<Characteristic> for TypeHandle {
    fn from(chi: Characteristic) -> Self {
        TypeHandle::of(&chi)
    }
}

impl fmt::Display for TypeHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for TypeHandle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse::<Characteristic>().map(|c| TypeHandle::of(&c))
    }
}

impl Serialize for TypeHandle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TypeHandle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Characteristic::deserialize(d).map(|c| TypeHandle::of(&c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ExtValue::{Fin, Inf};

    fn tau(k: i64) -> TypeHandle {
        TypeHandle::of(&Characteristic::with_split(Inf, Fin(0), k, []))
    }

    #[test]
    fn canonical_form_examples() {
        let a = Characteristic::new(Fin(0), Fin(0), [(2, Fin(5)), (4, Inf)]);
        assert_eq!(TypeHandle::of(&a).rep(), &Characteristic::infinite_at([4]));

        // finite values inside an infinite tail collapse to the template
        let b = Characteristic::new(Inf, Fin(3), [(-5, Fin(2)), (-6, Fin(9))]);
        let c = Characteristic::new(Inf, Fin(3), [(-5, Fin(0)), (-6, Fin(1))]);
        assert_eq!(TypeHandle::of(&b), TypeHandle::of(&c));
        assert_eq!(TypeHandle::of(&b).value(-5), Fin(3));

        let d = Characteristic::new(Fin(2), Fin(1), [(-1, Fin(1)), (0, Fin(4))]);
        assert_eq!(TypeHandle::of(&d).rep(), &Characteristic::new(Fin(2), Fin(1), []));
    }

    #[test]
    fn canonical_is_idempotent_on_examples() {
        let c = Characteristic::new(Inf, Fin(3), [(-5, Fin(2)), (8, Inf), (9, Fin(0))]);
        let once = TypeHandle::of(&c);
        assert_eq!(TypeHandle::of(once.rep()), once);
    }

    #[test]
    fn lattice_examples() {
        let t = tau(3);
        assert_eq!(t.inf(&t), t);
        assert_eq!(t.sup(&t), t);
        let a = TypeHandle::of(&Characteristic::infinite_at([0]));
        let b = TypeHandle::of(&Characteristic::infinite_at([1]));
        assert_eq!(a.inf(&b), TypeHandle::zero());
        assert_eq!(a.sup(&b), TypeHandle::of(&Characteristic::infinite_at([0, 1])));
        assert_eq!(tau(0).inf(&tau(1)), tau(0));
        assert!(TypeHandle::zero().le(&tau(-4)));
        assert!(tau(0).lt(&tau(1)));
    }

    #[test]
    fn idempotence_examples() {
        assert!(TypeHandle::zero().is_idempotent());
        for k in -5..=5 {
            assert!(tau(k).is_idempotent());
        }
        assert!(!TypeHandle::of(&Characteristic::constant(Fin(1))).is_idempotent());
        let finite_bumps = Characteristic::new(Fin(0), Fin(0), [(1, Fin(4)), (2, Fin(7))]);
        assert!(TypeHandle::of(&finite_bumps).is_idempotent());
    }
}
