//! Seeded random corpora and the crosscheck runner.
//!
//! Every instance is drawn from its own ChaCha stream (the corpus seed with
//! the instance index as stream number), so a corpus is a deterministic
//! function of its spec no matter how the work is scheduled.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::decide::{decide_spg_finite, decide_spg_product_cond2, decide_spg_product_cond3};
use crate::error::{Error, Result};
use crate::groups::{direct_sum, GroupDescriptor, Multiplicity};
use crate::instance::{instance_value, Instance};
use crate::oracle::{crosscheck_finite, default_search_bound, ConcreteElement};
use crate::typelat::{prime_at, Characteristic, ExtValue, Tailed, TypeHandle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Cd,
    Product,
    Mixed,
}

impl std::str::FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cd" => Ok(Shape::Cd),
            "product" => Ok(Shape::Product),
            "mixed" => Ok(Shape::Mixed),
            other => Err(Error::parse(1, format!("unknown shape `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub seed: u64,
    pub count: usize,
    pub max_summands: usize,
    /// Exceptions are drawn at prime indices in `[-w, w)`.
    pub window_half_width: i64,
    pub max_exponent: u64,
    pub multiplicity_menu: Vec<Multiplicity>,
    pub shape: Shape,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            seed: 7,
            count: 100,
            max_summands: 4,
            window_half_width: 3,
            max_exponent: 5,
            multiplicity_menu: vec![Multiplicity::Finite(1), Multiplicity::Finite(2), Multiplicity::Omega],
            shape: Shape::Cd,
        }
    }
}

impl CorpusSpec {
    pub fn validate(&self) -> Result<()> {
        let menu_ok = !self.multiplicity_menu.is_empty() && !self.multiplicity_menu.contains(&Multiplicity::Finite(0));
        if self.max_summands == 0 || self.window_half_width <= 0 || self.max_exponent == 0 || !menu_ok {
            return Err(Error::OutOfRange(
                "corpus bounds must be positive and the multiplicity menu nonempty without 0".into(),
            ));
        }
        Ok(())
    }

    pub fn rng_for(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }

    fn shape_at(&self, index: usize) -> Shape {
        match self.shape {
            Shape::Mixed if index.is_multiple_of(2) => Shape::Cd,
            Shape::Mixed => Shape::Product,
            s => s,
        }
    }
}

const TAILS: [ExtValue; 4] = [ExtValue::Fin(0), ExtValue::Fin(1), ExtValue::Fin(2), ExtValue::Inf];

fn random_value<R: Rng>(rng: &mut R, max_exponent: u64) -> ExtValue {
    if rng.gen_ratio(1, 5) {
        ExtValue::Inf
    } else {
        ExtValue::Fin(rng.gen_range(0..=max_exponent))
    }
}

/// Tails from `{0, 1, 2, ∞}`; each index of `[-w, w)` carries an exception
/// with probability one half.
pub fn random_characteristic<R: Rng>(rng: &mut R, half_width: i64, max_exponent: u64) -> Characteristic {
    let left = *TAILS.choose(rng).expect("nonempty");
    let right = *TAILS.choose(rng).expect("nonempty");
    let mut exceptions = Vec::new();
    for n in -half_width..half_width {
        if rng.gen_bool(0.5) {
            exceptions.push((n, random_value(rng, max_exponent)));
        }
    }
    Characteristic::new(left, right, exceptions)
}

/// Rewrites finitely many finite values (inside the window and one index
/// beyond each end), keeping every `∞`.
pub fn equivalent_variant<R: Rng>(rng: &mut R, chi: &Characteristic, half_width: i64, max_exponent: u64) -> Characteristic {
    let (lo, hi) = chi.span();
    let (lo, hi) = (lo.min(-half_width) - 1, hi.max(half_width) + 1);
    let values = (lo..hi)
        .map(|n| match chi.value(n) {
            ExtValue::Fin(_) if rng.gen_bool(0.4) => ExtValue::Fin(rng.gen_range(0..=max_exponent)),
            v => v,
        })
        .collect();
    Characteristic::from_tailed(Tailed::from_window(chi.left_tail(), chi.right_tail(), lo, values))
}

pub fn random_type<R: Rng>(rng: &mut R, half_width: i64, max_exponent: u64) -> TypeHandle {
    TypeHandle::of(&random_characteristic(rng, half_width, max_exponent))
}

/// Between one and `max_summands` summands. Half of the time one summand is
/// replaced by the infimum of all of them, so the inner type is attained.
pub fn random_cd<R: Rng>(rng: &mut R, spec: &CorpusSpec) -> GroupDescriptor {
    let r = rng.gen_range(1..=spec.max_summands);
    let mut types: Vec<TypeHandle> = (0..r)
        .map(|_| random_type(rng, spec.window_half_width, spec.max_exponent))
        .collect();
    if r > 1 && rng.gen_bool(0.5) {
        let inf = TypeHandle::inf_all(&types).expect("nonempty");
        let slot = rng.gen_range(0..r);
        types[slot] = inf;
    }
    GroupDescriptor::cd(types)
}

fn related_type<R: Rng>(rng: &mut R, base: &TypeHandle, spec: &CorpusSpec) -> TypeHandle {
    let w = spec.window_half_width;
    match rng.gen_range(0..3) {
        0 => base.clone(),
        1 => base.sup(&random_type(rng, w, spec.max_exponent)),
        _ => random_type(rng, w, spec.max_exponent),
    }
}

/// Up to five distinct factors around a common base type, with
/// multiplicities from the menu. With `finite_only`, factors are rank 1 or
/// completely decomposable and multiplicities are finite.
pub fn random_product<R: Rng>(rng: &mut R, spec: &CorpusSpec, finite_only: bool) -> GroupDescriptor {
    let base = random_type(rng, spec.window_half_width, spec.max_exponent);
    let menu: Vec<Multiplicity> = if finite_only {
        spec.multiplicity_menu.iter().copied().filter(|m| !m.is_omega()).collect()
    } else {
        spec.multiplicity_menu.clone()
    };
    let menu = if menu.is_empty() { vec![Multiplicity::Finite(1)] } else { menu };
    let n = rng.gen_range(1..=5);
    let mut factors = Vec::with_capacity(n);
    for i in 0..n {
        let kinds = if finite_only { 2 } else { 3 };
        let group = match rng.gen_range(0..kinds) {
            0 => GroupDescriptor::rank1(related_type(rng, &base, spec)),
            1 => GroupDescriptor::cd((0..2).map(|_| related_type(rng, &base, spec)).collect::<Vec<_>>()),
            _ => GroupDescriptor::indecomposable(rng.gen_range(2..=3), related_type(rng, &base, spec), format!("H{i}")),
        };
        factors.push((group, *menu.choose(rng).expect("nonempty")));
    }
    if rng.gen_bool(0.5) {
        let slot = rng.gen_range(0..factors.len());
        factors[slot].0 = GroupDescriptor::rank1(base);
    }
    GroupDescriptor::product(factors)
}

/// A random nonzero element of the completely decomposable group on
/// `host`: each coordinate is `0` or `±` a product of at most two prime
/// powers over `[-w, w)`, with exponents no lower than membership allows.
pub fn random_element<R: Rng>(rng: &mut R, host: &[TypeHandle], half_width: i64) -> ConcreteElement {
    use num::bigint::BigInt;
    use num::rational::BigRational;
    use num::One;

    let support: Vec<bool> = loop {
        let s: Vec<bool> = host.iter().map(|_| rng.gen_bool(0.6)).collect();
        if s.iter().any(|&b| b) {
            break s;
        }
    };
    let coefficients = host
        .iter()
        .zip(&support)
        .map(|(t, &on)| {
            if !on {
                return BigRational::from_integer(BigInt::from(0));
            }
            let mut c = BigRational::one();
            let window: Vec<i64> = (-half_width..half_width).collect();
            let amount = rng.gen_range(0..=2);
            for &n in window.choose_multiple(rng, amount) {
                let lowest = match t.value(n) {
                    ExtValue::Inf => -3,
                    ExtValue::Fin(v) => -(v.min(3) as i64),
                };
                let e = rng.gen_range(lowest..=2);
                let p = BigRational::from_integer(BigInt::from(prime_at(n)));
                c *= num::pow::Pow::pow(p, e as i32);
            }
            if rng.gen_bool(0.5) {
                -c
            } else {
                c
            }
        })
        .collect();
    ConcreteElement::new(host.to_vec(), coefficients).expect("exponents respect membership")
}

pub fn generate_instance(spec: &CorpusSpec, index: usize) -> Instance {
    let mut rng = spec.rng_for(index);
    let descriptor = match spec.shape_at(index) {
        Shape::Product => random_product(&mut rng, spec, false),
        _ => random_cd(&mut rng, spec),
    };
    Instance::new(descriptor)
        .with_meta("index", index)
        .with_meta("seed", spec.seed)
}

pub fn generate(spec: &CorpusSpec) -> Result<Vec<Instance>> {
    spec.validate()?;
    Ok((0..spec.count).into_par_iter().map(|i| generate_instance(spec, i)).collect())
}

/// The finite direct sum spelled out by an all-finite product of rank-1
/// and completely decomposable factors.
pub fn flatten_finite_product(g: &GroupDescriptor) -> Option<GroupDescriptor> {
    let GroupDescriptor::Product(factors) = g else {
        return None;
    };
    let mut parts = Vec::new();
    for (f, m) in factors {
        if !matches!(f, GroupDescriptor::Rank1(_) | GroupDescriptor::CompletelyDecomposable(_)) {
            return None;
        }
        parts.extend(std::iter::repeat_n(f.clone(), m.count()? as usize));
    }
    direct_sum(&parts).ok()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrosscheckLine {
    pub index: usize,
    pub instance: Value,
    /// `decide-vs-oracle` for completely decomposable instances,
    /// `cond2-vs-cond3` for products.
    pub check: String,
    pub decide: bool,
    pub oracle: bool,
    /// Verdict of the flattened finite sum, for all-finite products.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flattened: Option<bool>,
    pub agree: bool,
    pub witness: Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrosscheckSummary {
    pub seed: u64,
    pub count: usize,
    pub shape: Shape,
    pub agreements: usize,
    pub disagreements: usize,
    pub spg: usize,
    pub by_check: BTreeMap<String, usize>,
}

pub fn crosscheck_instance(instance: &Instance, index: usize, bound: Option<u64>) -> Result<CrosscheckLine> {
    let g = &instance.descriptor;
    let line = match g {
        GroupDescriptor::Product(_) => {
            let c2 = decide_spg_product_cond2(g)?;
            let c3 = decide_spg_product_cond3(g)?;
            let flattened = match flatten_finite_product(g) {
                Some(flat) => Some(decide_spg_finite(&flat)?.is_spg),
                None => None,
            };
            let agree = c2.is_spg == c3.is_spg && flattened.is_none_or(|f| f == c2.is_spg);
            CrosscheckLine {
                index,
                instance: instance_value(instance),
                check: "cond2-vs-cond3".into(),
                decide: c2.is_spg,
                oracle: c3.is_spg,
                flattened,
                agree,
                witness: serde_json::json!({ "cond2": c2.witness, "cond3": c3.witness }),
            }
        }
        _ => {
            let bound = match bound {
                Some(b) => b,
                None => default_search_bound(g)?,
            };
            let report = crosscheck_finite(g, bound)?;
            CrosscheckLine {
                index,
                instance: instance_value(instance),
                check: "decide-vs-oracle".into(),
                decide: report.decide,
                oracle: report.oracle,
                flattened: None,
                agree: report.agree,
                witness: serde_json::json!({
                    "verdict": report.verdict.witness,
                    "ungenerated": report.ungenerated,
                }),
            }
        }
    };
    Ok(line)
}

/// Runs every instance of the corpus, in parallel, reporting in index order.
pub fn run_crosscheck(spec: &CorpusSpec, bound: Option<u64>) -> Result<(Vec<CrosscheckLine>, CrosscheckSummary)> {
    let instances = generate(spec)?;
    let lines = instances
        .par_iter()
        .enumerate()
        .map(|(i, inst)| crosscheck_instance(inst, i, bound))
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(spec, &lines);
    Ok((lines, summary))
}

pub fn summarize(spec: &CorpusSpec, lines: &[CrosscheckLine]) -> CrosscheckSummary {
    let agreements = lines.iter().filter(|l| l.agree).count();
    let mut by_check = BTreeMap::new();
    for l in lines {
        *by_check.entry(l.check.clone()).or_insert(0) += 1;
    }
    CrosscheckSummary {
        seed: spec.seed,
        count: lines.len(),
        shape: spec.shape,
        agreements,
        disagreements: lines.len() - agreements,
        spg: lines.iter().filter(|l| l.decide).count(),
        by_check,
    }
}
