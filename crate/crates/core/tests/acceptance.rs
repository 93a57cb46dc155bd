//! Acceptance criteria. Each criterion prints one `PASS`/`FAIL` line followed
//! by indented detail; the process exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use selfpure::corpus::{
    equivalent_variant, flatten_finite_product, random_cd, random_characteristic, random_element,
    random_product, random_type, run_crosscheck, CorpusSpec, Shape,
};
use selfpure::decide::{
    check_cond2_with, check_cond3_with, decide_spg, decide_spg_finite, decide_spg_product_cond2,
    decide_spg_product_cond3, expand_product,
};
use selfpure::exlab::{build_truncated_pullback, check_example_claims, tau_family, TruncatedPullback};
use selfpure::groups::{power, GroupDescriptor, Multiplicity};
use selfpure::instance::parse_instance;
use selfpure::oracle::{default_bound, element_type, oracle_generated};
use selfpure::typelat::{is_idempotent, type_inf, type_le, type_sup, Characteristic, TypeHandle};

const LATTICE_LIMIT: Duration = Duration::from_secs(5);
const PAIR_LIMIT: Duration = Duration::from_secs(60);
const CD_LIMIT: Duration = Duration::from_secs(60);
const EXLAB_LIMIT: Duration = Duration::from_secs(120);
/// Every criterion asks for full agreement.
const REQUIRED_AGREEMENT: f64 = 1.0;

const SEED: u64 = 20_241_015;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    summary: String,
    details: Vec<String>,
}

impl Outcome {
    fn new(passed: bool, summary: impl Into<String>) -> Self {
        Outcome {
            passed,
            summary: summary.into(),
            details: Vec::new(),
        }
    }

    fn detail(mut self, d: impl Into<String>) -> Self {
        self.details.push(d.into());
        self
    }
}

fn rate(agree: usize, total: usize) -> f64 {
    if total == 0 {
        1.0
    } else {
        agree as f64 / total as f64
    }
}

fn timed(limit: Duration, start: Instant, mut o: Outcome) -> Outcome {
    let elapsed = start.elapsed();
    if elapsed >= limit {
        o.passed = false;
    }
    o.detail(format!("elapsed {:.2?} (limit {:?})", elapsed, limit))
}

fn lattice_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let chars: Vec<Characteristic> = (0..500).map(|_| random_characteristic(&mut rng, 6, 5)).collect();
    let variants: Vec<(Characteristic, Characteristic)> = chars
        .iter()
        .map(|c| {
            let v = equivalent_variant(&mut rng, c, 6, 5);
            let w = equivalent_variant(&mut rng, &v, 6, 5);
            (v, w)
        })
        .collect();
    let mut failures: Vec<String> = Vec::new();
    let mut fail = |what: &str| {
        if failures.len() < 5 {
            failures.push(what.to_string());
        }
    };

    for (c, (v, w)) in chars.iter().zip(&variants) {
        if !c.equivalent(c) {
            fail("reflexivity of equivalence");
        }
        if !(c.equivalent(v) && v.equivalent(c) && v.equivalent(w) && c.equivalent(w)) {
            fail("equivalence along a variant chain");
        }
    }
    let types: Vec<TypeHandle> = chars.iter().map(TypeHandle::of).collect();
    let mut comparable = 0;
    for i in 0..chars.len() {
        for j in 0..chars.len() {
            let (a, b) = (&types[i], &types[j]);
            if chars[i].equivalent(&chars[j]) != chars[j].equivalent(&chars[i]) {
                fail("symmetry of equivalence");
            }
            if chars[i].equivalent(&chars[j]) != (a == b) {
                fail("canonical forms coincide exactly for equivalent characteristics");
            }
            let (le, ge) = (type_le(a, b), type_le(b, a));
            comparable += le as usize;
            if le && ge && a != b {
                fail("antisymmetry");
            }
            let (m, s) = (type_inf(a, b), type_sup(a, b));
            if m != type_inf(b, a) || s != type_sup(b, a) {
                fail("commutativity");
            }
            if type_inf(a, &s) != *a || type_sup(a, &m) != *a {
                fail("absorption");
            }
            if le != (m == *a) || le != (s == *b) {
                fail("order compatibility");
            }
            if !(type_le(&m, a) && type_le(&m, b) && type_le(a, &s) && type_le(b, &s)) {
                fail("bounds");
            }
        }
        if !type_le(&types[i], &types[i]) {
            fail("reflexivity of the order");
        }
    }
    for _ in 0..20_000 {
        let pick = |rng: &mut ChaCha8Rng| types.choose(rng).expect("nonempty").clone();
        let (a, b, c) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        if type_inf(&type_inf(&a, &b), &c) != type_inf(&a, &type_inf(&b, &c))
            || type_sup(&type_sup(&a, &b), &c) != type_sup(&a, &type_sup(&b, &c))
        {
            fail("associativity");
        }
        let (lo, hi) = (type_inf(&a, &b), type_sup(&b, &c));
        if !(type_le(&lo, &b) && type_le(&b, &hi) && type_le(&lo, &hi)) {
            fail("transitivity");
        }
    }
    let ok = failures.is_empty();
    let o = Outcome::new(ok, "type lattice laws on 500 random characteristics")
        .detail(format!("comparable ordered pairs: {comparable} of {}", 500 * 500));
    let o = failures.into_iter().fold(o, |o, f| o.detail(format!("violated: {f}")));
    timed(LATTICE_LIMIT, start, o)
}

fn pair_agreement() -> Outcome {
    let start = Instant::now();
    let (mut agree, mut positives) = (0, 0);
    let mut first_mismatch = None;
    for i in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        rng.set_stream(i);
        let host: Vec<TypeHandle> = (0..rng.gen_range(1..=3)).map(|_| random_type(&mut rng, 3, 5)).collect();
        let x = random_element(&mut rng, &host, 3);
        let ty = element_type(&x).expect("nonzero");
        let b = match rng.gen_range(0..4) {
            0 | 1 => random_type(&mut rng, 3, 5),
            2 => ty.inf(&random_type(&mut rng, 3, 5)),
            _ => ty.clone(),
        };
        let bound = default_bound(&b, &x).expect("nonzero");
        let oracle = oracle_generated(&b, &x, bound).expect("bound covers the window");
        let predicted = type_le(&b, &ty);
        positives += predicted as usize;
        if oracle == predicted {
            agree += 1;
        } else if first_mismatch.is_none() {
            first_mismatch = Some(format!("pair {i}: B = {b}, x = {:?}", x.coefficient_strings()));
        }
    }
    let r = rate(agree, 1000);
    let mut o = Outcome::new(r >= REQUIRED_AGREEMENT, "element oracle matches the type order on 1000 pairs")
        .detail(format!("agreement {agree}/1000, generated in {positives}"));
    if let Some(m) = first_mismatch {
        o = o.detail(m);
    }
    timed(PAIR_LIMIT, start, o)
}

fn cd_crosscheck() -> Outcome {
    let start = Instant::now();
    let spec = CorpusSpec {
        seed: SEED,
        count: 1000,
        max_summands: 4,
        window_half_width: 3,
        max_exponent: 5,
        shape: Shape::Cd,
        ..CorpusSpec::default()
    };
    let (lines, summary) = run_crosscheck(&spec, None).expect("corpus runs");
    let mut o = Outcome::new(
        summary.disagreements == 0,
        "finite decision matches the element search on 1000 completely decomposable groups",
    )
    .detail(format!(
        "disagreements {}, self-pure-generators {}",
        summary.disagreements, summary.spg
    ));
    if let Some(l) = lines.iter().find(|l| !l.agree) {
        o = o.detail(format!("first disagreement: {}", l.instance));
    }
    timed(CD_LIMIT, start, o)
}

fn powers() -> Outcome {
    let spec = CorpusSpec {
        seed: SEED,
        ..CorpusSpec::default()
    };
    let (mut agree, mut total, mut positives) = (0, 0, 0);
    for i in 0..200 {
        let mut rng = spec.rng_for(i);
        let a = random_cd(&mut rng, &spec);
        let base = decide_spg_finite(&a).expect("valid").is_spg;
        positives += base as usize;
        for n in [2, 3, 5] {
            total += 1;
            let p = power(&a, n).expect("finite rank");
            agree += (decide_spg_finite(&p).expect("valid").is_spg == base) as usize;
        }
    }
    Outcome::new(rate(agree, total) >= REQUIRED_AGREEMENT, "powers keep the verdict on 200 groups")
        .detail(format!("agreement {agree}/{total}, self-pure-generators {positives}/200"))
}

fn products() -> Outcome {
    let spec = CorpusSpec {
        seed: SEED,
        count: 500,
        shape: Shape::Product,
        ..CorpusSpec::default()
    };
    let (lines, summary) = run_crosscheck(&spec, None).expect("corpus runs");
    let flattened = lines.iter().filter(|l| l.flattened.is_some()).count();

    let finite_spec = CorpusSpec {
        seed: SEED + 1,
        multiplicity_menu: vec![Multiplicity::Finite(1), Multiplicity::Finite(2)],
        ..spec.clone()
    };
    let (mut sub_agree, mut sub_positive) = (0, 0);
    for i in 0..300 {
        let mut rng = finite_spec.rng_for(i);
        let p = random_product(&mut rng, &finite_spec, true);
        let flat = flatten_finite_product(&p).expect("finite rank-1 and cd factors");
        let c2 = decide_spg_product_cond2(&p).expect("valid").is_spg;
        let c3 = decide_spg_product_cond3(&p).expect("valid").is_spg;
        let f = decide_spg_finite(&flat).expect("valid").is_spg;
        sub_positive += c2 as usize;
        sub_agree += (c2 == c3 && c3 == f) as usize;
    }
    let ok = summary.disagreements == 0 && rate(sub_agree, 300) >= REQUIRED_AGREEMENT;
    let mut o = Outcome::new(ok, "both product conditions agree on 500 products and with finite sums")
        .detail(format!(
            "disagreements {}, self-pure-generators {}, flattened checks inside the corpus {flattened}",
            summary.disagreements, summary.spg
        ))
        .detail(format!("finite sub-corpus agreement {sub_agree}/300, self-pure-generators {sub_positive}"));
    if let Some(l) = lines.iter().find(|l| !l.agree) {
        o = o.detail(format!("first disagreement: {}", l.instance));
    }
    o
}

fn idempotent_powers() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let (mut agree, mut idempotent) = (0, 0);
    for _ in 0..100 {
        let t = random_type(&mut rng, 6, 5);
        let p = GroupDescriptor::product([(GroupDescriptor::rank1(t.clone()), Multiplicity::Omega)]);
        let v = decide_spg(&p).expect("valid");
        idempotent += is_idempotent(&t) as usize;
        agree += (v.is_spg == is_idempotent(&t)) as usize;
    }
    Outcome::new(
        rate(agree, 100) >= REQUIRED_AGREEMENT,
        "countable powers of a rank-1 group: self-pure-generator iff idempotent",
    )
    .detail(format!("agreement {agree}/100, idempotent {idempotent}"))
}

fn example_family() -> Outcome {
    let start = Instant::now();
    let mut problems = Vec::new();
    for k in -5..=5 {
        let (a, b) = (tau_family(k).expect("in window"), tau_family(k + 1).expect("in window"));
        if !(a.lt(&b) && is_idempotent(&a)) {
            problems.push(format!("tau_{k} is not idempotent or not below tau_{}", k + 1));
        }
    }
    let mut lines = Vec::new();
    let mut all_homogeneous = true;
    for k in [-1, 0, 1] {
        for seed in [1, 2, 3] {
            let g = build_truncated_pullback(k, 8, seed, 50).expect("model builds");
            let r = g.check_homogeneous();
            all_homogeneous &= r.passed;
            lines.push(format!(
                "k={k:>2} q={} seed={seed}: {} (max height {}, full-height elements {}{})",
                r.q,
                if r.passed { "homogeneous" } else { "not separated" },
                r.max_height,
                r.full_height_elements,
                r.full_height_witnesses
                    .first()
                    .map(|(b, a)| format!(", e.g. ({b}, {a})"))
                    .unwrap_or_default()
            ));
        }
    }
    let mut controls_fail = true;
    for k in [-1, 0, 1] {
        let g = TruncatedPullback::from_rational(k, 8, -1, 7, 50).expect("7 is a unit");
        controls_fail &= !g.check_homogeneous().passed;
    }
    let claims = check_example_claims(3).expect("m >= 1");
    let ok = problems.is_empty() && all_homogeneous && controls_fail && claims.passed;
    let mut o = Outcome::new(ok, "pullback example family");
    for p in problems {
        o = o.detail(p);
    }
    for l in lines {
        o = o.detail(l);
    }
    o = o
        .detail(format!("rational negative controls rejected: {controls_fail}"))
        .detail(format!(
            "example claims (m=3): types {}, quotients {}, hom ladder {}, no rank-1 summand {}",
            claims.element_types_in_family, claims.quotient_types_generated, claims.hom_ladder, claims.no_rank1_summand
        ));
    timed(EXLAB_LIMIT, start, o)
}

fn representative_independence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let spec = CorpusSpec {
        seed: SEED + 8,
        ..CorpusSpec::default()
    };
    let (mut agree, mut total) = (0, 0);
    for i in 0..200 {
        let chi = random_characteristic(&mut rng, 3, 5);
        let theta = equivalent_variant(&mut rng, &chi, 3, 5);

        let rank1 = |c: &Characteristic| {
            parse_instance(&format!(r#"{{"kind":"rank1","type":"{c}"}}"#)).expect("valid").descriptor
        };
        let (a, b) = (decide_spg(&rank1(&chi)).expect("valid"), decide_spg(&rank1(&theta)).expect("valid"));
        total += 1;
        agree += (a == b) as usize;

        let mut prng = spec.rng_for(i);
        let other = random_cd(&mut prng, &spec);
        let cd = |c: &Characteristic| {
            let mut s: Vec<TypeHandle> = other.summand_types().expect("cd").to_vec();
            s.push(TypeHandle::of(c));
            GroupDescriptor::cd(s)
        };
        let (a, b) = (decide_spg(&cd(&chi)).expect("valid"), decide_spg(&cd(&theta)).expect("valid"));
        total += 1;
        agree += (a == b) as usize;

        let factors = match random_product(&mut prng, &spec, false) {
            GroupDescriptor::Product(f) => f,
            _ => unreachable!("products are products"),
        };
        let product = |c: &Characteristic| {
            let mut f = factors.clone();
            f.push((rank1(c), Multiplicity::Finite(1)));
            GroupDescriptor::product(f)
        };
        let (p, q) = (product(&chi), product(&theta));
        total += 1;
        agree += (decide_spg(&p).expect("valid") == decide_spg(&q).expect("valid")) as usize;

        let atoms = expand_product(&p).expect("valid");
        let k0 = atoms.len() - 1;
        let same2 = check_cond2_with(&atoms, k0, &chi).err() == check_cond2_with(&atoms, k0, &theta).err();
        let same3 = check_cond3_with(&atoms, k0, &chi).err() == check_cond3_with(&atoms, k0, &theta).err();
        total += 2;
        agree += same2 as usize + same3 as usize;
    }
    Outcome::new(
        rate(agree, total) >= REQUIRED_AGREEMENT,
        "verdicts do not depend on the chosen representative (200 pairs)",
    )
    .detail(format!("agreement {agree}/{total}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1", lattice_suite),
        ("2", pair_agreement),
        ("3", cd_crosscheck),
        ("4", powers),
        ("5", products),
        ("6", idempotent_powers),
        ("7", example_family),
        ("8", representative_independence),
    ];
    let mut failed = 0;
    for (id, run) in criteria {
        let o = run();
        println!("{} criterion {id}: {}", if o.passed { "PASS" } else { "FAIL" }, o.summary);
        for d in &o.details {
            println!("    {d}");
        }
        failed += (!o.passed) as usize;
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
