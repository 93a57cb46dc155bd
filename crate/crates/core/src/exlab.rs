//! The chain of idempotent types `τ_k` and finite-precision models of the
//! rank-2 pullback groups `G_k` built over it.
//!
//! `R_k` is the rank-1 ring of type `τ_k`, i.e. the integers with every prime
//! of index `< k` inverted, and `q = prime_at(k)` is the prime inverted when
//! passing to `R_{k+1}`. With `u` a `q`-adic unit, `G_k` is the pullback
//!
//! ```text
//! G_k = { (b, a) in R_{k+1} x R_{k+1} : u * π(b) = π(a) }
//! ```
//!
//! where `π: R_{k+1} -> R_{k+1} / R_k ≅ Z(q^∞)`. Orientation used here:
//! `α(r) = (0, r)` and `β(r) = (r, 0)`, so both projections give exact rows
//! `0 -> R_k -> G_k -> R_{k+1} -> 0`.
//!
//! The model keeps only elements whose coordinates have `q`-denominator at
//! most `q^N`. On those, `π` lands in `q^{-N} Z / Z` and only `u mod q^N`
//! matters, so membership is decided exactly. Heights, however, are capped
//! at `N`.

use num::integer::Integer;
use num::rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::decide::{decide_spg, expand_product, Verdict};
use crate::error::{Error, Result};
use crate::groups::{GroupDescriptor, Multiplicity};
use crate::typelat::{index_of_prime, prime_at, Characteristic, ExtValue, TypeHandle};

pub type Rational = Ratio<i128>;

pub const DEFAULT_FAMILY_WINDOW: i64 = 16;

const MAX_REDRAWS: usize = 10_000;

/// `τ_k`: infinite at prime indices `n < k`, zero at `n >= k`.
pub fn tau_family(k: i64) -> Result<TypeHandle> {
    tau_family_in(k, DEFAULT_FAMILY_WINDOW)
}

pub fn tau_family_in(k: i64, window: i64) -> Result<TypeHandle> {
    if k.abs() > window {
        return Err(Error::OutOfRange(format!(
            "family index {k} is outside the window [-{window}, {window}]"
        )));
    }
    Ok(TypeHandle::of(&Characteristic::with_split(
        ExtValue::Inf,
        ExtValue::ZERO,
        k,
        [],
    )))
}

/// Finds `(a, b)` with `a ≡ u b (mod m)`, `|a|, |b| <= bound` and
/// `gcd(a, b) = 1`, if there is one.
pub fn rational_reconstruction(u: i128, m: i128, bound: i128) -> Option<(i128, i128)> {
    let (mut r0, mut r1) = (m, u.rem_euclid(m));
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 > bound {
        let quot = r0 / r1;
        (r0, r1) = (r1, r0 - quot * r1);
        (t0, t1) = (t1, t0 - quot * t1);
    }
    (t1 != 0 && t1.abs() <= bound && r1.gcd(&t1) == 1).then(|| {
        if t1 < 0 {
            (-r1, -t1)
        } else {
            (r1, t1)
        }
    })
}

fn isqrt(n: i128) -> i128 {
    let mut x = (n as f64).sqrt() as i128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

fn mod_inverse(a: i128, m: i128) -> Option<i128> {
    let e = a.rem_euclid(m).extended_gcd(&m);
    (e.gcd == 1).then(|| e.x.rem_euclid(m))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TruncatedPullback {
    pub k: i64,
    pub q: u64,
    pub precision: u32,
    /// Base-`q` digits of `u`, least significant first.
    pub unit_digits: Vec<u64>,
    pub denominator_bound: u64,
    /// How many digit sequences were rejected by rational reconstruction.
    pub redraws: usize,
    #[serde(skip)]
    modulus: i128,
    #[serde(skip)]
    unit: i128,
}

/// Draws the digits of `u` from a stream seeded by `seed`, redrawing while
/// they reconstruct to a rational of height `sqrt(q^N / 2)`.
pub fn build_truncated_pullback(k: i64, precision: u32, seed: u64, denominator_bound: u64) -> Result<TruncatedPullback> {
    let q = check_shape(k, precision, denominator_bound)?;
    let modulus = (q as i128).pow(precision);
    let bound = isqrt(modulus / 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for redraws in 0..MAX_REDRAWS {
        let digits: Vec<u64> = (0..precision)
            .map(|i| if i == 0 { rng.gen_range(1..q) } else { rng.gen_range(0..q) })
            .collect();
        let model = TruncatedPullback::assemble(k, precision, digits, denominator_bound, redraws)?;
        if rational_reconstruction(model.unit, modulus, bound).is_none() {
            return Ok(model);
        }
    }
    Err(Error::OutOfRange(format!(
        "no digit sequence modulo {q}^{precision} escaped rational reconstruction"
    )))
}

fn check_shape(k: i64, precision: u32, denominator_bound: u64) -> Result<u64> {
    tau_family(k)?;
    tau_family(k + 1)?;
    if precision < 2 || denominator_bound < 2 {
        return Err(Error::OutOfRange("precision and denominator bound must be at least 2".into()));
    }
    let q = prime_at(k);
    match (q as i128).checked_pow(precision) {
        Some(m) if m < 1 << 62 => Ok(q),
        _ => Err(Error::OutOfRange(format!("{q}^{precision} is too large for the model"))),
    }
}

impl TruncatedPullback {
    fn assemble(k: i64, precision: u32, digits: Vec<u64>, denominator_bound: u64, redraws: usize) -> Result<Self> {
        let q = check_shape(k, precision, denominator_bound)?;
        if digits.len() != precision as usize || digits.iter().any(|&d| d >= q) || digits[0] == 0 {
            return Err(Error::OutOfRange(format!(
                "expected {precision} base-{q} digits with a nonzero first digit"
            )));
        }
        let modulus = (q as i128).pow(precision);
        let unit = digits.iter().rev().fold(0i128, |acc, &d| acc * q as i128 + d as i128);
        Ok(TruncatedPullback {
            k,
            q,
            precision,
            unit_digits: digits,
            denominator_bound,
            redraws,
            modulus,
            unit,
        })
    }

    pub fn from_digits(k: i64, precision: u32, digits: Vec<u64>, denominator_bound: u64) -> Result<Self> {
        Self::assemble(k, precision, digits, denominator_bound, 0)
    }

    /// A model whose `u` is the `q`-adic expansion of `num / den`. Such a
    /// model splits, which is what the homogeneity check must detect.
    pub fn from_rational(k: i64, precision: u32, num: i128, den: i128, denominator_bound: u64) -> Result<Self> {
        let q = check_shape(k, precision, denominator_bound)?;
        let modulus = (q as i128).pow(precision);
        let inv = mod_inverse(den, modulus)
            .ok_or_else(|| Error::OutOfRange(format!("{den} is not a unit modulo {q}")))?;
        let mut u = (num.rem_euclid(modulus) * inv).rem_euclid(modulus);
        let digits = (0..precision)
            .map(|_| {
                let d = (u % q as i128) as u64;
                u /= q as i128;
                d
            })
            .collect();
        Self::assemble(k, precision, digits, denominator_bound, 0)
    }

    pub fn unit(&self) -> i128 {
        self.unit
    }

    pub fn modulus(&self) -> i128 {
        self.modulus
    }

    fn q_split(&self, mut n: i128) -> (u32, i128) {
        let q = self.q as i128;
        let mut v = 0;
        while n != 0 && n % q == 0 {
            n /= q;
            v += 1;
        }
        (v, n)
    }

    /// Whether every prime dividing `n` has index `< limit`.
    fn supported_below(mut n: i128, limit: i64) -> bool {
        let mut p = 2i128;
        while p * p <= n {
            if n % p == 0 {
                if index_of_prime(p as u64).is_none_or(|i| i >= limit) {
                    return false;
                }
                while n % p == 0 {
                    n /= p;
                }
            }
            p += 1;
        }
        n == 1 || index_of_prime(n as u64).is_some_and(|i| i < limit)
    }

    /// `q^N · π(r)` as a residue modulo `q^N`, or `None` when `r` is not in
    /// `R_{k+1}` or its `q`-denominator exceeds `q^N`.
    pub fn class(&self, r: &Rational) -> Option<i128> {
        let (s, rest) = self.q_split(*r.denom());
        if s > self.precision || !Self::supported_below(rest, self.k) {
            return None;
        }
        if s == 0 {
            return Some(0);
        }
        let qs = (self.q as i128).pow(s);
        let inv = mod_inverse(rest, qs).expect("cofactor is prime to q");
        let t = (r.numer().rem_euclid(qs) * inv).rem_euclid(qs);
        Some(t * (self.q as i128).pow(self.precision - s))
    }

    pub fn contains(&self, b: &Rational, a: &Rational) -> bool {
        match (self.class(b), self.class(a)) {
            (Some(tb), Some(ta)) => (self.unit * tb - ta).rem_euclid(self.modulus) == 0,
            _ => false,
        }
    }

    fn classes_by_division(&self, r: &Rational) -> Vec<Option<i128>> {
        let q = self.q as i128;
        let mut x = *r;
        (0..=self.precision)
            .map(|h| {
                if h > 0 {
                    x /= q;
                }
                self.class(&x)
            })
            .collect()
    }

    /// Largest `h <= N` with `(b, a) / q^h` in the model.
    pub fn q_height(&self, b: &Rational, a: &Rational) -> Option<u32> {
        if !self.contains(b, a) {
            return None;
        }
        let cb = self.classes_by_division(b);
        let ca = self.classes_by_division(a);
        Some(self.height_from_classes(&cb, &ca))
    }

    fn height_from_classes(&self, cb: &[Option<i128>], ca: &[Option<i128>]) -> u32 {
        let mut h = 0;
        for i in 1..=self.precision as usize {
            match (cb[i], ca[i]) {
                (Some(tb), Some(ta)) if (self.unit * tb - ta).rem_euclid(self.modulus) == 0 => h = i as u32,
                _ => break,
            }
        }
        h
    }

    /// Reduced rationals `n / d` with `|n| <= D`, `1 <= d <= D` and `d`
    /// supported on the primes inverted in `R_{k+1}`.
    pub fn enumerate_coordinates(&self) -> Vec<Rational> {
        let d_max = self.denominator_bound as i128;
        let mut out = vec![Rational::from_integer(0)];
        for d in 1..=d_max {
            if !Self::supported_below(d, self.k + 1) {
                continue;
            }
            for n in -d_max..=d_max {
                if n != 0 && n.gcd(&d) == 1 {
                    out.push(Rational::new(n, d));
                }
            }
        }
        out
    }

    /// Exhaustive search over bounded coordinates for elements of height
    /// at least `N`, plus the structural checks on the two rows.
    pub fn check_homogeneous(&self) -> HomogeneityReport {
        let coords = self.enumerate_coordinates();
        let classes: Vec<Vec<Option<i128>>> = coords.iter().map(|r| self.classes_by_division(r)).collect();
        let n = self.precision;
        let per_b: Vec<RowScan> = (0..coords.len())
            .into_par_iter()
            .map(|i| {
                let mut members = 0;
                let mut max_height = 0;
                let mut divisible = Vec::new();
                for j in 0..coords.len() {
                    if i == 0 && j == 0 {
                        continue;
                    }
                    let (Some(tb), Some(ta)) = (classes[i][0], classes[j][0]) else {
                        continue;
                    };
                    if (self.unit * tb - ta).rem_euclid(self.modulus) != 0 {
                        continue;
                    }
                    members += 1;
                    let h = self.height_from_classes(&classes[i], &classes[j]);
                    max_height = max_height.max(h);
                    if h >= n {
                        divisible.push((i, j));
                    }
                }
                (members, max_height, divisible)
            })
            .collect();

        let members = per_b.iter().map(|t| t.0).sum();
        let max_height = per_b.iter().map(|t| t.1).max().unwrap_or(0);
        let all_divisible: Vec<(usize, usize)> = per_b.iter().flat_map(|t| t.2.iter().copied()).collect();
        let full_height_witnesses = all_divisible
            .iter()
            .take(5)
            .map(|&(i, j)| (coords[i].to_string(), coords[j].to_string()))
            .collect();

        let zero = Rational::from_integer(0);
        let one = Rational::from_integer(1);
        let alpha_generator_height = self.q_height(&zero, &one).unwrap_or(0);
        let in_r_k = |r: &Rational| self.class(r) == Some(0);
        let rows_exact = coords.iter().all(|r| {
            let lift = Rational::new((self.unit * self.class(r).unwrap_or(0)).rem_euclid(self.modulus), self.modulus);
            self.contains(&zero, r) == in_r_k(r)
                && self.contains(r, &zero) == in_r_k(r)
                && self.contains(r, &lift)
        });
        let images: Vec<&Rational> = coords.iter().filter(|r| in_r_k(r)).collect();
        let alpha_beta_meet_trivial = images.iter().all(|r| self.contains(&zero, r) && self.contains(r, &zero))
            && images
                .iter()
                .all(|r| images.iter().all(|s| (zero, **r) != (**s, zero) || (**r == zero && **s == zero)));

        HomogeneityReport {
            k: self.k,
            q: self.q,
            precision: n,
            denominator_bound: self.denominator_bound,
            unit_digits: self.unit_digits.clone(),
            coordinates: coords.len(),
            members,
            max_height,
            full_height_elements: all_divisible.len(),
            full_height_witnesses,
            alpha_generator_height,
            rows_exact,
            alpha_beta_meet_trivial,
            passed: max_height < n && alpha_generator_height == 0 && rows_exact && alpha_beta_meet_trivial,
        }
    }
}

/// Member count, largest height and full-height partners for one `b`.
type RowScan = (usize, u32, Vec<(usize, usize)>);

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomogeneityReport {
    pub k: i64,
    pub q: u64,
    pub precision: u32,
    pub denominator_bound: u64,
    pub unit_digits: Vec<u64>,
    /// Size of the bounded coordinate set.
    pub coordinates: usize,
    /// Nonzero pairs of bounded coordinates that lie in the model.
    pub members: usize,
    pub max_height: u32,
    /// Members whose `q`-height reaches the precision.
    pub full_height_elements: usize,
    /// The first few of them, as `(b, a)`.
    pub full_height_witnesses: Vec<(String, String)>,
    pub alpha_generator_height: u32,
    pub rows_exact: bool,
    pub alpha_beta_meet_trivial: bool,
    pub passed: bool,
}

/// `⊕_{k=-m..m} G_k` with each `G_k` rank 2 of inner type `τ_k`.
pub fn example_group_descriptor(m: u32) -> Result<GroupDescriptor> {
    if m == 0 {
        return Err(Error::OutOfRange("the example needs m >= 1".into()));
    }
    let m = m as i64;
    let factors = (-m..=m)
        .map(|k| Ok((GroupDescriptor::indecomposable(2, tau_family(k)?, format!("G_{k}")), Multiplicity::Finite(1))))
        .collect::<Result<Vec<_>>>()?;
    Ok(GroupDescriptor::product(factors))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExampleClaimsReport {
    pub m: u32,
    /// Inner types of the factors are exactly `τ_{-m}, ..., τ_m`.
    pub element_types_in_family: bool,
    /// For `k in [-m+1, m+1]`, `G_{k-1}` maps onto a rank-1 group of type `τ_k`.
    pub quotient_types_generated: bool,
    /// `Hom(G_j, R_i) = 0` exactly when `j > i`.
    pub hom_ladder: bool,
    pub no_rank1_summand: bool,
    pub truncation_verdict: Verdict,
    pub passed: bool,
}

pub fn check_example_claims(m: u32) -> Result<ExampleClaimsReport> {
    let g = example_group_descriptor(m)?;
    let mi = m as i64;
    let taus = (-mi - 1..=mi + 1)
        .map(|k| Ok((k, tau_family(k)?)))
        .collect::<Result<std::collections::BTreeMap<_, _>>>()?;
    let atoms = expand_product(&g)?;

    let element_types_in_family = atoms.len() == (2 * m + 1) as usize
        && atoms
            .iter()
            .zip(-mi..=mi)
            .all(|(a, k)| a.group.inner_type() == taus[&k] && a.group.divisible_set() == taus[&k].rep().infinite_set());

    let quotient_types_generated = (-mi + 1..=mi + 1).all(|k| {
        let source = &atoms[(k - 1 + mi) as usize].group;
        source.inner_type().le(&taus[&k])
            && source.inner_type() != taus[&k]
    });

    let hom_ladder = (-mi..=mi).all(|i| {
        (-mi..=mi).all(|j| {
            let source = &atoms[(j + mi) as usize].group;
            source.inner_type().le(&taus[&i]) == (j <= i)
        })
    });

    let no_rank1_atom = atoms.iter().all(|a| !matches!(a.group, GroupDescriptor::Rank1(_)));
    let candidates_ruled_out = (-mi..=mi).all(|i| {
        let mapping_in: Vec<&GroupDescriptor> = atoms
            .iter()
            .map(|a| &a.group)
            .filter(|g| g.inner_type().le(&taus[&i]))
            .collect();
        !mapping_in.is_empty() && mapping_in.iter().all(|g| g.rank().is_some_and(|r| r >= 2))
    });
    let truncation_verdict = decide_spg(&g)?;
    let no_rank1_summand = no_rank1_atom && candidates_ruled_out && !truncation_verdict.is_spg;

    Ok(ExampleClaimsReport {
        m,
        element_types_in_family,
        quotient_types_generated,
        hom_ladder,
        no_rank1_summand,
        passed: element_types_in_family && quotient_types_generated && hom_ladder && no_rank1_summand,
        truncation_verdict,
    })
}
