//! Decision procedures for the self-pure-generator property.
//!
//! Finite rank groups are decided through the existence of a rank-1 direct
//! summand whose type is the inner type. Products (possibly with countably
//! many copies of a factor) are decided by two independent reductions of
//! the product characterization, one per equivalent condition, so the two
//! can be checked against each other.
//!
//! Products are first expanded into atoms: every completely decomposable
//! factor is split into its rank-1 summands, each inheriting the factor's
//! multiplicity. Atom indices in witnesses refer to this expanded list.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{power, GroupDescriptor, Multiplicity};
use crate::typelat::{Characteristic, PrimeSet, TypeHandle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FailedCondition {
    #[serde(rename = "no-rank1-summand")]
    NoRank1Summand,
    #[serde(rename = "2a-fail")]
    Cond2a,
    #[serde(rename = "2b-fail")]
    Cond2b,
    #[serde(rename = "3b-fail")]
    Cond3b,
    #[serde(rename = "3c-fail")]
    Cond3c,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProductCondition {
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "3")]
    Three,
}

/// Evidence for a positive product verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductWitness {
    pub condition: ProductCondition,
    /// Atom carrying the rank-1 factor `G_{k0}`.
    pub k0: usize,
    /// Index of the input factor that atom came from.
    pub k0_factor: usize,
    pub k0_type: TypeHandle,
    /// Atoms whose copies are all left out of the cofinite index set `J`
    /// (one copy of the `k0` atom is always left out as well).
    pub excluded_factors: Vec<usize>,
    /// The finitely many primes of `S_f(χ)` where divisibility is not
    /// required.
    pub excluded_primes: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    Rank1Summand { index: usize, summand_type: TypeHandle },
    Product(ProductWitness),
    Failed { condition: FailedCondition },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    #[serde(rename = "spg")]
    pub is_spg: bool,
    pub witness: Witness,
}

impl Verdict {
    fn failed(condition: FailedCondition) -> Self {
        Verdict {
            is_spg: false,
            witness: Witness::Failed { condition },
        }
    }

    fn product(w: ProductWitness) -> Self {
        Verdict {
            is_spg: true,
            witness: Witness::Product(w),
        }
    }

    /// Re-checks a positive witness against the group it was produced for.
    /// Negative verdicts carry no evidence and always re-check.
    pub fn revalidate(&self, g: &GroupDescriptor) -> bool {
        match (&self.witness, self.is_spg) {
            (Witness::Failed { .. }, false) => true,
            (Witness::Rank1Summand { index, summand_type }, true) => g
                .summand_types()
                .and_then(|s| s.get(*index))
                .is_some_and(|t| t == summand_type && *t == g.inner_type()),
            (Witness::Product(w), true) => {
                expand_product(g).is_ok_and(|atoms| revalidate_product(&atoms, w))
            }
            _ => false,
        }
    }
}

/// A factor of an expanded product: rank 1 or indecomposable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub source: usize,
    pub group: GroupDescriptor,
    pub mult: Multiplicity,
}

impl Atom {
    fn rank1_type(&self) -> Option<&TypeHandle> {
        match &self.group {
            GroupDescriptor::Rank1(t) => Some(t),
            _ => None,
        }
    }
}

/// Splits completely decomposable factors into rank-1 atoms.
pub fn expand_product(g: &GroupDescriptor) -> Result<Vec<Atom>> {
    let GroupDescriptor::Product(factors) = g else {
        return Err(Error::Unsupported("expected a product descriptor".into()));
    };
    let violations = g.validate();
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    let mut atoms = Vec::new();
    for (source, (f, mult)) in factors.iter().enumerate() {
        match f {
            GroupDescriptor::CompletelyDecomposable(s) => atoms.extend(s.iter().map(|t| Atom {
                source,
                group: GroupDescriptor::Rank1(t.clone()),
                mult: *mult,
            })),
            other => atoms.push(Atom {
                source,
                group: other.clone(),
                mult: *mult,
            }),
        }
    }
    Ok(atoms)
}

pub fn is_generated_by_rank1(b: &TypeHandle, a: &GroupDescriptor) -> bool {
    b.le(&a.inner_type())
}

pub fn has_rank1_summand_of_type(a: &GroupDescriptor, tau: &TypeHandle) -> Result<bool> {
    summand_index_of_type(a, tau).map(|i| i.is_some())
}

fn summand_index_of_type(a: &GroupDescriptor, tau: &TypeHandle) -> Result<Option<usize>> {
    let summands = a.summand_types().ok_or_else(|| {
        Error::Unsupported("rank-1 summand search needs a completely decomposable group".into())
    })?;
    Ok(summands.iter().position(|t| t == tau))
}

/// Finite rank groups: rank 1, completely decomposable, or a declared
/// strongly indecomposable group of rank at least 2 (never a
/// self-pure-generator, since it has no rank-1 summand).
pub fn decide_spg_finite(a: &GroupDescriptor) -> Result<Verdict> {
    let violations = a.validate();
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    match a {
        GroupDescriptor::Product(_) => Err(Error::Unsupported(
            "products are decided by the product procedures".into(),
        )),
        GroupDescriptor::Indecomposable { .. } => Ok(Verdict::failed(FailedCondition::NoRank1Summand)),
        _ => {
            let it = a.inner_type();
            Ok(match summand_index_of_type(a, &it)? {
                Some(index) => Verdict {
                    is_spg: true,
                    witness: Witness::Rank1Summand {
                        index,
                        summand_type: it,
                    },
                },
                None => Verdict::failed(FailedCondition::NoRank1Summand),
            })
        }
    }
}

/// Routes products to the product procedure and everything else to
/// [`decide_spg_finite`].
pub fn decide_spg(g: &GroupDescriptor) -> Result<Verdict> {
    match g {
        GroupDescriptor::Product(_) => {
            let v = decide_spg_product_cond2(g)?;
            debug_assert_eq!(v.is_spg, decide_spg_product_cond3(g)?.is_spg);
            Ok(v)
        }
        _ => decide_spg_finite(g),
    }
}

/// `A^n` is a self-pure-generator exactly when `A` is.
pub fn decide_spg_power(a: &GroupDescriptor, n: u32) -> Result<Verdict> {
    if !a.is_finite_rank() {
        return Err(Error::Unsupported("power of an infinite rank group".into()));
    }
    let base = decide_spg(a)?;
    let powered = decide_spg(&power(a, n)?)?;
    debug_assert_eq!(base.is_spg, powered.is_spg, "power {n} changed the verdict");
    let _ = powered;
    Ok(base)
}

fn rank1_atoms(atoms: &[Atom]) -> impl Iterator<Item = (usize, &TypeHandle)> {
    atoms
        .iter()
        .enumerate()
        .filter_map(|(i, a)| a.rank1_type().map(|t| (i, t)))
}

/// Decides through the first product condition: a rank-1 factor whose type
/// is below every inner type, and divisibility of cofinitely many factors
/// on a cofinite part of `S_f(χ)`.
pub fn decide_spg_product_cond2(p: &GroupDescriptor) -> Result<Verdict> {
    let atoms = expand_product(p)?;
    let mut any_passed_2a = false;
    let mut candidates = 0;
    for (k0, t) in rank1_atoms(&atoms) {
        candidates += 1;
        match check_cond2_with(&atoms, k0, t.rep()) {
            Ok(w) => return Ok(Verdict::product(w)),
            Err(FailedCondition::Cond2b) => any_passed_2a = true,
            Err(_) => {}
        }
    }
    Ok(Verdict::failed(match (candidates, any_passed_2a) {
        (0, _) => FailedCondition::NoRank1Summand,
        (_, true) => FailedCondition::Cond2b,
        (_, false) => FailedCondition::Cond2a,
    }))
}

/// The first product condition for the candidate atom `k0`, with `chi` any
/// representative of its type.
///
/// Finite-multiplicity atoms can be dropped from `J` wholesale, and dropping
/// finitely many copies of an `omega` atom leaves identical copies behind,
/// so the divisibility requirement reduces to: the primes of `S_f(χ)` where
/// some `omega` atom is not divisible form a finite set.
pub fn check_cond2_with(
    atoms: &[Atom],
    k0: usize,
    chi: &Characteristic,
) -> std::result::Result<ProductWitness, FailedCondition> {
    let Some(atom) = atoms.get(k0).filter(|a| a.rank1_type().is_some()) else {
        return Err(FailedCondition::NoRank1Summand);
    };
    let t = TypeHandle::of(chi);
    if !atoms.iter().all(|a| t.le(&a.group.inner_type())) {
        return Err(FailedCondition::Cond2a);
    }
    let omega_divisible = atoms
        .iter()
        .filter(|a| a.mult.is_omega())
        .fold(PrimeSet::all(), |acc, a| acc.intersection(&a.group.divisible_set()));
    let bad = chi.finite_set().difference(&omega_divisible);
    let Some(excluded_primes) = bad.members() else {
        return Err(FailedCondition::Cond2b);
    };
    Ok(ProductWitness {
        condition: ProductCondition::Two,
        k0,
        k0_factor: atom.source,
        k0_type: t,
        excluded_factors: finite_atoms(atoms).collect(),
        excluded_primes,
    })
}

fn finite_atoms(atoms: &[Atom]) -> impl Iterator<Item = usize> + '_ {
    atoms
        .iter()
        .enumerate()
        .filter(|(_, a)| !a.mult.is_omega())
        .map(|(i, _)| i)
}

/// Decides through the second product condition: a rank-1 factor and a
/// cofinite `J` such that `∏_J G_j` is divisible at almost all primes of
/// `P \ S_0(χ)` and the excluded factors have inner type above `type(G_{k0})`.
pub fn decide_spg_product_cond3(p: &GroupDescriptor) -> Result<Verdict> {
    let atoms = expand_product(p)?;
    let mut any_3b = false;
    let mut candidates = 0;
    for (k0, t) in rank1_atoms(&atoms) {
        candidates += 1;
        match check_cond3_with(&atoms, k0, t.rep()) {
            Ok(w) => return Ok(Verdict::product(w)),
            Err(FailedCondition::Cond3b) => any_3b = true,
            Err(_) => {}
        }
    }
    Ok(Verdict::failed(match (candidates, any_3b) {
        (0, _) => FailedCondition::NoRank1Summand,
        (_, true) => FailedCondition::Cond3b,
        (_, false) => FailedCondition::Cond3c,
    }))
}

/// Primes of `P \ S_0(χ)` where a copy of `atom` kept in `J` is not
/// divisible, or `None` when that is not allowed: such primes may not lie in
/// `S∞(χ)` and only finitely many may lie in `S_f(χ)`.
fn cond3_bad_primes(atom: &Atom, chi: &Characteristic) -> Option<Vec<i64>> {
    let bad = chi.zero_set().complement().difference(&atom.group.divisible_set());
    if !bad.intersection(&chi.infinite_set()).is_empty() {
        return None;
    }
    bad.intersection(&chi.finite_set()).members()
}

/// Number of copies of atom `i` that remain in `J` when the atoms in
/// `excluded` and one copy of `k0` are left out; `None` means infinitely many.
fn copies_in_j(atoms: &[Atom], i: usize, k0: usize, excluded: &[usize]) -> Option<u32> {
    if excluded.contains(&i) {
        return Some(0);
    }
    let own = u32::from(i == k0);
    atoms[i].mult.count().map(|c| c.saturating_sub(own))
}

/// The second product condition for the candidate atom `k0`, with `chi` any
/// representative of its type.
///
/// Each finite-multiplicity atom is either kept in `J` (and must be
/// divisible as required) or excluded (and must have inner type above
/// `type(G_{k0})`); `omega` atoms always keep copies in `J`. The first
/// witness in the order "fewest exclusions, then lexicographic" is the set
/// of finite atoms that cannot stay in `J`, so it is computed directly.
pub fn check_cond3_with(
    atoms: &[Atom],
    k0: usize,
    chi: &Characteristic,
) -> std::result::Result<ProductWitness, FailedCondition> {
    let Some(atom) = atoms.get(k0).filter(|a| a.rank1_type().is_some()) else {
        return Err(FailedCondition::NoRank1Summand);
    };
    let t = TypeHandle::of(chi);
    let mut excluded = Vec::new();
    let mut primes = std::collections::BTreeSet::new();
    for (i, a) in atoms.iter().enumerate() {
        if copies_in_j(atoms, i, k0, &[]) == Some(0) {
            continue;
        }
        match cond3_bad_primes(a, chi) {
            Some(bad) => primes.extend(bad),
            None if a.mult.is_omega() => return Err(FailedCondition::Cond3b),
            None => excluded.push(i),
        }
    }
    if !excluded.iter().all(|&i| t.le(&atoms[i].group.inner_type())) {
        return Err(FailedCondition::Cond3c);
    }
    Ok(ProductWitness {
        condition: ProductCondition::Three,
        k0,
        k0_factor: atom.source,
        k0_type: t,
        excluded_factors: excluded,
        excluded_primes: primes.into_iter().collect(),
    })
}

/// Evaluates the second product condition for a given exclusion set, without
/// any search. Used to re-check witnesses and by exhaustive tests.
pub fn cond3_holds_for(atoms: &[Atom], k0: usize, chi: &Characteristic, excluded: &[usize]) -> bool {
    if atoms.get(k0).and_then(Atom::rank1_type).is_none() {
        return false;
    }
    if excluded.iter().any(|&i| atoms.get(i).is_none_or(|a| a.mult.is_omega())) {
        return false;
    }
    let t = TypeHandle::of(chi);
    atoms.iter().enumerate().all(|(i, a)| match copies_in_j(atoms, i, k0, excluded) {
        Some(0) => i == k0 || t.le(&a.group.inner_type()),
        _ => cond3_bad_primes(a, chi).is_some(),
    })
}

fn revalidate_product(atoms: &[Atom], w: &ProductWitness) -> bool {
    let Some(t) = atoms.get(w.k0).and_then(Atom::rank1_type) else {
        return false;
    };
    if *t != w.k0_type || atoms[w.k0].source != w.k0_factor {
        return false;
    }
    let chi = t.rep();
    match w.condition {
        ProductCondition::Two => {
            if !atoms.iter().all(|a| t.le(&a.group.inner_type())) {
                return false;
            }
            if w.excluded_factors.iter().any(|&i| atoms.get(i).is_none_or(|a| a.mult.is_omega())) {
                return false;
            }
            let kept_primes = chi
                .finite_set()
                .difference(&PrimeSet::from_indices(w.excluded_primes.iter().copied()));
            atoms.iter().enumerate().all(|(i, a)| {
                copies_in_j(atoms, i, usize::MAX, &w.excluded_factors) == Some(0)
                    || kept_primes.is_subset(&a.group.divisible_set())
            })
        }
        ProductCondition::Three => {
            cond3_holds_for(atoms, w.k0, chi, &w.excluded_factors)
                && atoms.iter().enumerate().all(|(i, a)| {
                    copies_in_j(atoms, i, w.k0, &w.excluded_factors) == Some(0)
                        || cond3_bad_primes(a, chi)
                            .is_some_and(|bad| bad.iter().all(|p| w.excluded_primes.contains(p)))
                })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::direct_sum;
    use crate::typelat::ExtValue::{self, Fin, Inf};

    fn ty(c: Characteristic) -> TypeHandle {
        TypeHandle::of(&c)
    }

    fn inf_at(n: i64) -> TypeHandle {
        ty(Characteristic::infinite_at([n]))
    }

    fn tau(k: i64) -> TypeHandle {
        ty(Characteristic::with_split(Inf, ExtValue::ZERO, k, []))
    }

    fn rank1(t: TypeHandle) -> GroupDescriptor {
        GroupDescriptor::rank1(t)
    }

    use Multiplicity::{Finite, Omega};

    #[test]
    fn generation_examples() {
        let any = GroupDescriptor::cd([inf_at(0), tau(2)]);
        assert!(is_generated_by_rank1(&TypeHandle::zero(), &any));
        assert!(!is_generated_by_rank1(&inf_at(0), &GroupDescriptor::cd([TypeHandle::zero()])));
        assert!(is_generated_by_rank1(&tau(0), &rank1(tau(1))));
    }

    #[test]
    fn rank1_summand_examples() {
        let t = tau(1);
        assert!(has_rank1_summand_of_type(&GroupDescriptor::cd([t.clone()]), &t).unwrap());
        let a = GroupDescriptor::cd([inf_at(0), inf_at(1)]);
        assert!(!has_rank1_summand_of_type(&a, &TypeHandle::zero()).unwrap());
        let b = GroupDescriptor::cd([TypeHandle::zero(), inf_at(0)]);
        assert!(has_rank1_summand_of_type(&b, &TypeHandle::zero()).unwrap());
        assert!(has_rank1_summand_of_type(&GroupDescriptor::indecomposable(2, t.clone(), "H"), &t).is_err());
    }

    #[test]
    fn finite_decider_examples() {
        let v = decide_spg_finite(&rank1(tau(3))).unwrap();
        assert!(v.is_spg);
        let a = GroupDescriptor::cd([inf_at(0), inf_at(1)]);
        let v = decide_spg_finite(&a).unwrap();
        assert_eq!(v, Verdict::failed(FailedCondition::NoRank1Summand));
        let b = GroupDescriptor::cd([TypeHandle::zero(), inf_at(0)]);
        let v = decide_spg_finite(&b).unwrap();
        assert_eq!(
            v.witness,
            Witness::Rank1Summand {
                index: 0,
                summand_type: TypeHandle::zero()
            }
        );
        assert!(v.revalidate(&b));
        let ind = GroupDescriptor::indecomposable(2, TypeHandle::zero(), "H");
        assert!(!decide_spg_finite(&ind).unwrap().is_spg);
        assert!(decide_spg_finite(&GroupDescriptor::product([(rank1(tau(0)), Omega)])).is_err());
    }

    #[test]
    fn power_examples() {
        assert!(decide_spg_power(&rank1(tau(2)), 5).unwrap().is_spg);
        assert!(!decide_spg_power(&GroupDescriptor::cd([inf_at(0), inf_at(1)]), 2).unwrap().is_spg);
        assert!(decide_spg_power(&GroupDescriptor::cd([TypeHandle::zero(), inf_at(0)]), 3).unwrap().is_spg);
        let ind = GroupDescriptor::indecomposable(3, tau(0), "H");
        assert!(!decide_spg_power(&ind, 4).unwrap().is_spg);
    }

    fn both(p: &GroupDescriptor) -> (Verdict, Verdict) {
        let a = decide_spg_product_cond2(p).unwrap();
        let b = decide_spg_product_cond3(p).unwrap();
        assert!(a.revalidate(p), "cond2 witness failed to re-check: {a:?}");
        assert!(b.revalidate(p), "cond3 witness failed to re-check: {b:?}");
        (a, b)
    }

    #[test]
    fn product_examples() {
        let anything = GroupDescriptor::indecomposable(2, inf_at(5), "H");
        let p = GroupDescriptor::product([(rank1(TypeHandle::zero()), Finite(1)), (anything, Omega)]);
        let (a, b) = both(&p);
        assert!(a.is_spg && b.is_spg);

        let ones = ty(Characteristic::constant(Fin(1)));
        let p = GroupDescriptor::product([(rank1(ones), Omega)]);
        let (a, b) = both(&p);
        assert!(!a.is_spg && !b.is_spg);
        assert_eq!(a.witness, Witness::Failed { condition: FailedCondition::Cond2b });
        assert_eq!(b.witness, Witness::Failed { condition: FailedCondition::Cond3b });

        let p = GroupDescriptor::product([(rank1(inf_at(0)), Omega)]);
        let (a, b) = both(&p);
        assert!(a.is_spg && b.is_spg);
    }

    #[test]
    fn right_tail_finite_type_with_omega_copies() {
        let t = ty(Characteristic::new(Inf, Fin(1), []));
        let p = GroupDescriptor::product([(rank1(t.clone()), Finite(1)), (rank1(t), Omega)]);
        let (a, b) = both(&p);
        assert!(!a.is_spg && !b.is_spg);
    }

    #[test]
    fn finite_products_collapse_to_the_sum() {
        let parts = [
            GroupDescriptor::cd([inf_at(0), inf_at(1)]),
            rank1(inf_at(2)),
        ];
        let p = GroupDescriptor::product([(parts[0].clone(), Finite(2)), (parts[1].clone(), Finite(1))]);
        let flat = direct_sum(&[parts[0].clone(), parts[0].clone(), parts[1].clone()]).unwrap();
        let (a, b) = both(&p);
        assert_eq!(a.is_spg, decide_spg_finite(&flat).unwrap().is_spg);
        assert_eq!(b.is_spg, a.is_spg);
        assert!(!a.is_spg);
    }

    #[test]
    fn unattainable_type_bound_is_rejected_by_both_conditions() {
        // `Z[1/2] × H^ω` with H of inner type 0: literally reading the
        // divisibility clause of the second condition over the one-element
        // set `P \ S_0(χ)` would accept this, but no rank-1 factor lies below
        // the inner type of H.
        let h = GroupDescriptor::indecomposable(2, TypeHandle::zero(), "H");
        let p = GroupDescriptor::product([(rank1(inf_at(0)), Finite(1)), (h, Omega)]);
        let (a, b) = both(&p);
        assert!(!a.is_spg && !b.is_spg);
        assert_eq!(a.witness, Witness::Failed { condition: FailedCondition::Cond2a });
    }

    #[test]
    fn excluded_finite_factor_must_sit_above() {
        // Finite factor of type 0 cannot stay in J (not divisible on S∞(χ))
        // and cannot be excluded (type(G_k0) is not below 0).
        let p = GroupDescriptor::product([
            (rank1(inf_at(0)), Omega),
            (rank1(TypeHandle::zero()), Finite(1)),
        ]);
        let (a, b) = both(&p);
        assert!(a.is_spg && b.is_spg, "the type-0 factor itself is k0");
        assert_eq!(
            a.witness,
            Witness::Product(ProductWitness {
                condition: ProductCondition::Two,
                k0: 1,
                k0_factor: 1,
                k0_type: TypeHandle::zero(),
                excluded_factors: vec![1],
                excluded_primes: vec![],
            })
        );
    }

    #[test]
    fn forged_witnesses_fail_revalidation() {
        let p = GroupDescriptor::product([(rank1(inf_at(0)), Omega), (rank1(TypeHandle::zero()), Finite(1))]);
        let v = decide_spg_product_cond3(&p).unwrap();
        let Witness::Product(mut w) = v.witness.clone() else { panic!() };
        w.k0 = 0;
        w.k0_type = inf_at(0);
        let forged = Verdict::product(w);
        assert!(!forged.revalidate(&p));
        let wrong_index = Verdict {
            is_spg: true,
            witness: Witness::Rank1Summand { index: 1, summand_type: inf_at(0) },
        };
        assert!(!wrong_index.revalidate(&GroupDescriptor::cd([TypeHandle::zero(), inf_at(0)])));
    }

    #[test]
    fn verdict_json() {
        let v = Verdict::failed(FailedCondition::Cond2a);
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"spg":false,"witness":{"kind":"failed","condition":"2a-fail"}}"#
        );
    }
}
