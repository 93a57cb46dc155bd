//! Element-level brute force on concrete completely decomposable groups.
//!
//! A summand of type `τ` is realized as the subgroup of `Q` of rationals `r`
//! with `val_p(r) >= -χ_p` for the canonical representative `χ` of `τ`, so
//! that `1` has height `χ_p` at every prime. An element of a direct sum has
//! height `min_i (χ_i(p) + val_p(c_i))` over its nonzero coordinates.
//!
//! Nothing here calls the type order: generation is decided by enumerating
//! the valuations a multiplier `q` may take at each prime of a finite window
//! (plus one sample prime for each tail).

use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::decide::{decide_spg_finite, Verdict};
use crate::error::{Error, Result};
use crate::groups::GroupDescriptor;
use crate::typelat::{index_of_prime, nth_prime, prime_at, Characteristic, ExtValue, TypeHandle};

#[derive(Debug, Clone, PartialEq, Eq)]
struct Coefficient {
    value: BigRational,
    /// `prime index -> p-adic valuation`, nonzero entries only.
    valuations: BTreeMap<i64, i64>,
}

impl Coefficient {
    fn from_rational(value: BigRational) -> Result<Self> {
        let valuations = if value.is_zero() {
            BTreeMap::new()
        } else {
            let mut v = factor(value.numer())?;
            for (n, e) in factor(value.denom())? {
                *v.entry(n).or_insert(0) -= e;
            }
            v.retain(|_, e| *e != 0);
            v
        };
        Ok(Coefficient { value, valuations })
    }

    /// `p^e` where `p = prime_at(index)`.
    fn prime_power(index: i64, e: i64) -> Self {
        let p = BigInt::from(prime_at(index));
        let magnitude = num::pow(p, e.unsigned_abs() as usize);
        let value = if e >= 0 {
            BigRational::from_integer(magnitude)
        } else {
            BigRational::new(BigInt::one(), magnitude)
        };
        let valuations = if e == 0 { BTreeMap::new() } else { BTreeMap::from([(index, e)]) };
        Coefficient { value, valuations }
    }

    fn one() -> Self {
        Self::prime_power(0, 0)
    }

    fn zero() -> Self {
        Coefficient {
            value: BigRational::zero(),
            valuations: BTreeMap::new(),
        }
    }
}

/// Prime-index valuations of a nonzero integer, by trial division.
fn factor(n: &BigInt) -> Result<BTreeMap<i64, i64>> {
    let mut rest = n.abs();
    let mut out = BTreeMap::new();
    let mut pos = 0;
    while rest > BigInt::one() {
        let p = BigInt::from(nth_prime(pos));
        if &p * &p > rest {
            let last = rest.to_u64().ok_or_else(|| {
                Error::OutOfRange(format!("cannot index the prime factor {rest}"))
            })?;
            let idx = index_of_prime(last).expect("remaining cofactor is prime");
            *out.entry(idx).or_insert(0) += 1;
            break;
        }
        let mut e = 0;
        while (&rest % &p).is_zero() {
            rest /= &p;
            e += 1;
        }
        if e > 0 {
            let idx = index_of_prime(nth_prime(pos)).expect("table entries are prime");
            out.insert(idx, e);
        }
        pos += 1;
    }
    Ok(out)
}

/// An element of a completely decomposable group, one rational coordinate
/// per summand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcreteElement {
    host: Vec<TypeHandle>,
    coefficients: Vec<Coefficient>,
}

impl ConcreteElement {
    /// Fails when the lengths differ or a coordinate lies outside its summand.
    pub fn new(host: Vec<TypeHandle>, coefficients: Vec<BigRational>) -> Result<Self> {
        if host.len() != coefficients.len() {
            return Err(Error::NotMember(format!(
                "{} coefficients for a host with {} summands",
                coefficients.len(),
                host.len()
            )));
        }
        let coefficients = coefficients
            .into_iter()
            .map(Coefficient::from_rational)
            .collect::<Result<Vec<_>>>()?;
        let x = ConcreteElement { host, coefficients };
        x.check_membership()?;
        Ok(x)
    }

    pub fn from_integers(host: Vec<TypeHandle>, coefficients: &[i64]) -> Result<Self> {
        Self::new(
            host,
            coefficients
                .iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    /// The all-ones element.
    pub fn diagonal(host: Vec<TypeHandle>) -> Self {
        let coefficients = vec![Coefficient::one(); host.len()];
        ConcreteElement { host, coefficients }
    }

    fn check_membership(&self) -> Result<()> {
        for (i, (t, c)) in self.host.iter().zip(&self.coefficients).enumerate() {
            for (&n, &e) in &c.valuations {
                if t.value(n).checked_shift(e).is_none() {
                    return Err(Error::NotMember(format!(
                        "coordinate {i} has valuation {e} at prime {}, below the summand height {}",
                        prime_at(n),
                        t.value(n)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn host(&self) -> &[TypeHandle] {
        &self.host
    }

    pub fn coefficients(&self) -> Vec<BigRational> {
        self.coefficients.iter().map(|c| c.value.clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|c| c.value.is_zero())
    }

    /// Multiplies every coordinate by `q`.
    pub fn scaled(&self, q: &BigRational) -> Result<Self> {
        Self::new(
            self.host.clone(),
            self.coefficients().into_iter().map(|c| c * q).collect(),
        )
    }

    /// The characteristic of the element: its height at every prime.
    pub fn height_profile(&self) -> Result<Characteristic> {
        let mut profile: Option<Characteristic> = None;
        for (t, c) in self.host.iter().zip(&self.coefficients) {
            if c.value.is_zero() {
                continue;
            }
            let shifted = t
                .rep()
                .shifted(&c.valuations)
                .ok_or_else(|| Error::NotMember("negative height".into()))?;
            profile = Some(match profile {
                None => shifted,
                Some(p) => p.pointwise_min(&shifted),
            });
        }
        profile.ok_or(Error::ZeroElement)
    }

    pub fn coefficient_strings(&self) -> Vec<String> {
        self.coefficients.iter().map(|c| c.value.to_string()).collect()
    }
}

pub fn element_type(x: &ConcreteElement) -> Result<TypeHandle> {
    x.height_profile().map(|c| TypeHandle::of(&c))
}

fn window_of(chars: &[&Characteristic]) -> (i64, i64) {
    chars.iter().fold((i64::MAX, i64::MIN), |(lo, hi), c| {
        let (a, b) = c.span();
        (lo.min(a), hi.max(b))
    })
}

/// `window width + largest finite value + 1`, over `b` and the profile of `x`.
pub fn default_bound(b: &TypeHandle, x: &ConcreteElement) -> Result<u64> {
    Ok(bound_for(b.rep(), &x.height_profile()?))
}

fn bound_for(k: &Characteristic, profile: &Characteristic) -> u64 {
    let (lo, hi) = window_of(&[k, profile]);
    (hi - lo).max(0) as u64 + k.max_finite().max(profile.max_finite()) + 1
}

/// Whether the pure closure `<x>_*` is generated by a rank-1 group of type
/// `b`, i.e. is the sum of the images of multiplications `r -> q r`.
///
/// Per prime, the valuation `e` of `q` must satisfy `e >= k_p - l_p` where
/// `k` is the representative of `b` and `l` the height profile of `x`. A
/// nonzero map exists when every prime admits some `e` and the tail primes
/// admit `e = 0` (a rational has finite support). The images cover `<x>_*`
/// when at every prime the smallest admissible `e` brings `k_p` down to
/// `l_p` (or is unbounded below when `l_p = ∞`). Each valuation is searched
/// over `[-bound, bound]`.
pub fn oracle_generated(b: &TypeHandle, x: &ConcreteElement, bound: u64) -> Result<bool> {
    generated_by(b.rep(), &x.height_profile()?, bound)
}

fn generated_by(k: &Characteristic, profile: &Characteristic, bound: u64) -> Result<bool> {
    let (lo, hi) = window_of(&[k, profile]);
    let (lo, hi) = if lo > hi { (0, 0) } else { (lo, hi) };
    if bound < (hi - lo) as u64 {
        return Err(Error::OutOfRange(format!(
            "search bound {bound} is smaller than the window width {}",
            hi - lo
        )));
    }
    let bound = bound as i64;
    for n in (lo - 1)..=hi {
        let is_tail_sample = n == lo - 1 || n == hi;
        let (kv, lv) = (k.value(n), profile.value(n));
        let admissible = |e: i64| match (kv, lv) {
            (_, ExtValue::Inf) => true,
            (ExtValue::Inf, ExtValue::Fin(_)) => false,
            (ExtValue::Fin(a), ExtValue::Fin(l)) => e >= a as i64 - l as i64,
        };
        let admitted: Vec<i64> = (-bound..=bound).filter(|&e| admissible(e)).collect();
        let Some(&lowest) = admitted.first() else {
            return Ok(false);
        };
        if is_tail_sample && !admitted.contains(&0) {
            return Ok(false);
        }
        let covers = match (kv, lv) {
            (ExtValue::Inf, ExtValue::Inf) => true,
            (ExtValue::Fin(_), ExtValue::Inf) => lowest == -bound,
            (ExtValue::Fin(a), ExtValue::Fin(l)) => {
                admitted.iter().any(|&e| e + l as i64 - a as i64 <= 0)
            }
            (ExtValue::Inf, ExtValue::Fin(_)) => false,
        };
        if !covers {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `window width + largest finite value + 1` over the summand types of `a`.
pub fn default_search_bound(a: &GroupDescriptor) -> Result<u64> {
    let types = cd_types(a)?;
    let reps: Vec<&Characteristic> = types.iter().map(TypeHandle::rep).collect();
    let (lo, hi) = window_of(&reps);
    let width = if lo > hi { 1 } else { (hi - lo).max(1) as u64 };
    Ok(width + reps.iter().map(|c| c.max_finite()).max().unwrap_or(0) + 1)
}

fn cd_types(a: &GroupDescriptor) -> Result<Vec<TypeHandle>> {
    a.summand_types().map(<[_]>::to_vec).ok_or_else(|| {
        Error::Unsupported("the oracle only handles rank-1 and completely decomposable groups".into())
    })
}

fn subsets_by_size(r: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (1u32..(1 << r))
        .map(|mask| (0..r).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Candidate elements in search order: every support with unit
/// coordinates (the last of these is the diagonal), then every support with
/// one coordinate scaled by `p^e` for a window prime `p`, with `e` either
/// the most negative exponent membership allows (capped by `bound`) or `1`.
fn candidates(types: &[TypeHandle], bound: u64) -> Vec<ConcreteElement> {
    let reps: Vec<&Characteristic> = types.iter().map(TypeHandle::rep).collect();
    let (lo, hi) = window_of(&reps);
    let primes: Vec<i64> = if lo < hi { (lo..hi).collect() } else { vec![0] };
    let supports = subsets_by_size(types.len());
    let element = |support: &[usize], scaled: Option<(usize, i64, i64)>| {
        let coefficients = (0..types.len())
            .map(|i| match scaled {
                Some((j, n, e)) if j == i => Coefficient::prime_power(n, e),
                _ if support.contains(&i) => Coefficient::one(),
                _ => Coefficient::zero(),
            })
            .collect();
        ConcreteElement {
            host: types.to_vec(),
            coefficients,
        }
    };
    let mut out: Vec<ConcreteElement> = supports.iter().map(|s| element(s, None)).collect();
    for s in &supports {
        for &i in s {
            for &n in &primes {
                let lowest = match types[i].value(n) {
                    ExtValue::Inf => -1,
                    ExtValue::Fin(v) => -(v.min(bound) as i64),
                };
                for e in [lowest, 1] {
                    if e != 0 {
                        out.push(element(s, Some((i, n, e))));
                    }
                }
            }
        }
    }
    out
}

/// Searches for a nonzero element whose pure closure is generated by no
/// summand. For a completely decomposable group the diagonal realizes the
/// inner type, so with the diagonal among the candidates an empty answer is
/// conclusive.
pub fn find_ungenerated_pure_rank1(a: &GroupDescriptor, bound: u64) -> Result<Option<ConcreteElement>> {
    let types = cd_types(a)?;
    for x in candidates(&types, bound) {
        let profile = x.height_profile()?;
        let mut generated = false;
        for t in &types {
            if generated_by(t.rep(), &profile, bound.max(bound_for(t.rep(), &profile)))? {
                generated = true;
                break;
            }
        }
        if !generated {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Serialize)]
pub struct CrosscheckReport {
    pub decide: bool,
    pub oracle: bool,
    pub agree: bool,
    pub verdict: Verdict,
    /// Coordinates of an element whose pure closure is not generated.
    pub ungenerated: Option<Vec<String>>,
}

/// Compares the summand-based decision with the element search.
pub fn crosscheck_finite(a: &GroupDescriptor, bound: u64) -> Result<CrosscheckReport> {
    let verdict = decide_spg_finite(a)?;
    let found = find_ungenerated_pure_rank1(a, bound)?;
    let oracle = found.is_none();
    Ok(CrosscheckReport {
        decide: verdict.is_spg,
        oracle,
        agree: verdict.is_spg == oracle,
        verdict,
        ungenerated: found.map(|x| x.coefficient_strings()),
    })
}
