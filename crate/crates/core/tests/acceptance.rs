//! Acceptance gate. Runs every criterion, prints one line each and fails if
//! any of them does.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use cubicjac::algebra::{compose_maps, Field, Monomial, PolyMap, Polynomial};
use cubicjac::anomaly::{verify_known_examples, weight_derivation, weighted_cubic_kernel};
use cubicjac::classifier::{classify_rank_le2, CaseTag};
use cubicjac::corpus::{form_ii_representative, Corpus};
use cubicjac::error::Result;
use cubicjac::jacobian::{
    find_dependence, jacobian, rank_over_function_field, trdeg1_equivalences,
};
use cubicjac::keller::{
    factor_nilpotent_2x2, invert_keller, keller_normal_form, linearly_dependent, recompose,
    tame_decompose, KellerVariant,
};
use cubicjac::text::{format_map, MapKind};

const SEED: u64 = 20_240_601;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        passed,
        detail: detail.into(),
    })
}

fn classification_round_trip() -> Result<Outcome> {
    let start = Instant::now();
    let mut corpus = Corpus::new(SEED);
    let mut misses = 0;
    for tag in [CaseTag::ZeroTail, CaseTag::TwoVariables, CaseTag::X3Quadric] {
        for _ in 0..200 {
            let h = corpus.classification_instance(tag)?;
            let c = classify_rank_le2(&h)?;
            if c.case_tag != tag || !c.verify(&h)? {
                misses += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        misses == 0 && elapsed < Duration::from_secs(60),
        format!(
            "600 instances, {misses} misses, {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn dependence_matches_rank() -> Result<Outcome> {
    let mut corpus = Corpus::new(SEED + 1);
    let mut maps = Vec::new();
    for _ in 0..100 {
        maps.push(corpus.rank_le2_map()?);
    }
    // full-rank controls so both directions are exercised
    for _ in 0..10 {
        maps.push(corpus.generic_cubic_map(3)?);
    }
    let mut disagreements = 0;
    let mut dependent = 0;
    for h in &maps {
        let jm = jacobian(h);
        let cert = rank_over_function_field(&jm);
        assert!(cert.verify(&jm));
        let rel = find_dependence(h, 6)?;
        if let Some(r) = &rel {
            assert!(r.verify(h));
            dependent += 1;
        }
        if rel.is_some() != (cert.rank < 3) {
            disagreements += 1;
        }
    }
    outcome(
        disagreements == 0,
        format!(
            "{} maps, {dependent} with a relation, {disagreements} disagreements",
            maps.len()
        ),
    )
}

fn anomaly_examples() -> Result<Outcome> {
    let start = Instant::now();
    let recs = verify_known_examples()?;
    let elapsed = start.elapsed();
    let all = recs.iter().all(|r| r.passes());
    let det = |name: &str| {
        recs.iter()
            .find(|r| r.name == name)
            .map(|r| (r.characteristic, r.degree_det_z.to_string()))
    };
    let first = det("(x1^3 x2, x1 x2^2)") == Some((5, "5".into()));
    let third = det("(x3 x1^3, x1 x2^3, x2 x3^3)") == Some((7, "28".into()));
    outcome(
        all && first && third && elapsed < Duration::from_secs(1),
        format!(
            "{} maps, all checks {}, {:.3}s",
            recs.len(),
            if all { "pass" } else { "do not pass" },
            elapsed.as_secs_f64()
        ),
    )
}

fn weighted_kernel_and_derivation() -> Result<Outcome> {
    let q = Field::rational();
    let kernel = weighted_cubic_kernel(&[1, -2, 4], &q);
    let mut expected = vec![Monomial::new(vec![2, 1, 0]), Monomial::new(vec![0, 2, 1])];
    expected.sort();
    let mut got = kernel.clone();
    got.sort();
    let h2 = Polynomial::monomial(&q, q.one(), vec![2, 1, 0]);
    let h3 = Polynomial::monomial(&q, q.one(), vec![0, 2, 1]);
    let d = weight_derivation(&h2, &h3)?;
    let want: Vec<Polynomial> = [1, -2, 4]
        .iter()
        .enumerate()
        .map(|(i, &w)| Polynomial::var(&q, 3, i).scale(&q.from_i64(w)))
        .collect();
    outcome(
        got == expected && d.images() == want.as_slice(),
        format!(
            "kernel {{{}}}, D = ({})",
            kernel
                .iter()
                .map(|m| format!("{m:?}"))
                .collect::<Vec<_>>()
                .join(", "),
            d.images()
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        ),
    )
}

fn nilpotent_factorization() -> Result<Outcome> {
    let mut corpus = Corpus::new(SEED + 4);
    let (mut rebuilt, mut flags, mut dependent) = (0, 0, 0);
    for _ in 0..500 {
        let (a, b, _c, n) = corpus.nilpotent_2x2(3)?;
        let f = factor_nilpotent_2x2(&n)?;
        if f.rebuild()? == n {
            rebuilt += 1;
        }
        let dep = linearly_dependent(&a, &b);
        dependent += dep as usize;
        if f.triangularizable == dep {
            flags += 1;
        }
    }
    outcome(
        rebuilt == 500 && flags == 500,
        format!("500 matrices ({dependent} with dependent a, b), {rebuilt} rebuilt, {flags} flags agree"),
    )
}

struct KellerInstances {
    form_i: Vec<PolyMap>,
    form_ii: Vec<PolyMap>,
    triangular: Vec<PolyMap>,
}

fn keller_instances() -> Result<KellerInstances> {
    let mut corpus = Corpus::new(SEED + 5);
    let mut form_ii = vec![form_ii_representative(4), form_ii_representative(5)];
    for n in [4, 5] {
        for _ in 0..50 {
            form_ii.push(corpus.form_ii_scramble(n)?);
        }
    }
    let mut triangular = Vec::new();
    for _ in 0..50 {
        triangular.push(corpus.triangular_scramble(4)?);
    }
    let mut form_i = Vec::new();
    while form_i.len() < 50 {
        let h = corpus.rank1_single_form(4)?;
        if trdeg1_equivalences(&h, 6)?.jh_nilpotent {
            form_i.push(h);
        }
    }
    Ok(KellerInstances {
        form_i,
        form_ii,
        triangular,
    })
}

fn normal_forms(k: &KellerInstances) -> Result<Outcome> {
    let mut bad = 0;
    for (maps, want) in [
        (&k.form_ii, KellerVariant::FormIIExceptional),
        (&k.triangular, KellerVariant::Triangularizable),
    ] {
        for h in maps {
            let nf = keller_normal_form(h)?;
            if nf.variant != want || !nf.verify(h)? {
                bad += 1;
            }
        }
    }
    outcome(
        bad == 0,
        format!(
            "{} exceptional and {} triangular maps, {bad} wrong",
            k.form_ii.len(),
            k.triangular.len()
        ),
    )
}

fn inverses(k: &KellerInstances) -> Result<Outcome> {
    let mut bad = 0;
    let mut total = 0;
    for (maps, exceptional) in [
        (&k.form_i, false),
        (&k.form_ii, true),
        (&k.triangular, false),
    ] {
        for h in maps {
            total += 1;
            let f = h.plus_identity()?;
            let g = invert_keller(&f, None)?;
            let x = PolyMap::identity(f.field(), f.nvars());
            let mut ok = compose_maps(&f, &g)? == x && compose_maps(&g, &f)? == x;
            if exceptional {
                ok &= g == h.scale(&f.field().from_i64(-1)).plus_identity()?;
            }
            bad += (!ok) as usize;
        }
    }
    outcome(bad == 0, format!("{total} maps inverted, {bad} failures"))
}

fn cli_binary() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_cubicjac"))
}

fn tame_decompositions() -> Result<Outcome> {
    let f5 = form_ii_representative(5).plus_identity()?;
    let d5 = tame_decompose(&f5, false)?;
    let five = recompose(f5.field(), d5.nvars, &d5.steps)? == f5;

    let f4 = form_ii_representative(4).plus_identity()?;
    let d4 = tame_decompose(&f4, true)?;
    let extended =
        d4.nvars == 5 && recompose(f4.field(), 5, &d4.steps)? == f4.extend_identity(5)?;

    let status = Command::new(cli_binary())
        .args(["tame", "--map", &format_map(&f4, MapKind::Full)])
        .output()
        .expect("run cli");
    let open = status.status.code() == Some(3);
    outcome(
        five && extended && open,
        format!(
            "n=5: {} steps, n=4 with extra variable: {} steps, n=4 without: exit {:?}",
            d5.steps.len(),
            d4.steps.len(),
            status.status.code()
        ),
    )
}

fn rank_one_equivalences() -> Result<Outcome> {
    let mut corpus = Corpus::new(SEED + 8);
    let (mut agree, mut nilpotent) = (0, 0);
    for _ in 0..100 {
        let h = corpus.rank1_single_form(3)?;
        let r = trdeg1_equivalences(&h, 6)?;
        nilpotent += r.jh_nilpotent as usize;
        if r.all_equivalent
            && r.det_jf_is_one == r.jh_nilpotent
            && r.jh_nilpotent == r.split_product_zero
        {
            agree += 1;
        }
    }
    outcome(
        agree == 100,
        format!("100 maps ({nilpotent} nilpotent), conditions agree in {agree}"),
    )
}

fn deterministic_cli() -> Result<Outcome> {
    let dir = std::env::temp_dir().join(format!("cubicjac-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let write = |name: &str, text: &str| {
        let p = dir.join(name);
        std::fs::write(&p, text).expect("write input");
        p.to_string_lossy().into_owned()
    };
    let case1 = write(
        "case1.txt",
        "H1 = x1^3 + x2*x3^2\nH2 = x2^3 + x1*x3^2\nH3 = 0\n",
    );
    let form_ii = write(
        "form_ii.txt",
        &format_map(&form_ii_representative(4), MapKind::Components),
    );
    let five = write(
        "form_ii5.txt",
        &format_map(&form_ii_representative(5), MapKind::Components),
    );
    let mono = write("mono.txt", "field: F5\nH1 = x1^3*x2\nH2 = x1*x2^2\n");
    let runs: Vec<Vec<&str>> = vec![
        vec!["rank", &case1],
        vec!["nilpotent", &form_ii],
        vec!["depfind", &case1],
        vec!["degmat", &mono],
        vec!["normalize", &case1],
        vec!["classify", &case1],
        vec!["classify", "--corpus", "3", "--seed", "7"],
        vec!["keller", &form_ii],
        vec!["invert", &form_ii],
        vec!["tame", &five],
        vec!["tame", "--extra-variable", &form_ii],
        vec!["anomaly", "verify"],
        vec!["anomaly", "search", "--n", "2", "--maxdeg", "4", "--p", "5"],
        vec!["corpus", "--kind", "form-ii", "--count", "3", "--seed", "9"],
    ];
    let mut differing = Vec::new();
    for args in &runs {
        for json in [false, true] {
            let mut full: Vec<&str> = args.clone();
            if json {
                full.push("--json");
            }
            let run = || {
                Command::new(cli_binary())
                    .args(&full)
                    .output()
                    .expect("run cli")
            };
            let (a, b) = (run(), run());
            if a.stdout != b.stdout || a.status.code() != b.status.code() || a.stdout.is_empty() {
                differing.push(full.join(" "));
            }
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    outcome(
        differing.is_empty(),
        format!(
            "{} invocations run twice, {} differ {}",
            runs.len() * 2,
            differing.len(),
            differing.join("; ")
        ),
    )
}

fn main() {
    let keller = keller_instances().expect("corpus");
    let criteria: Vec<(&str, Box<dyn Fn() -> Result<Outcome>>)> = vec![
        (
            "classification round trip",
            Box::new(classification_round_trip),
        ),
        (
            "relation search agrees with certified rank",
            Box::new(dependence_matches_rank),
        ),
        (
            "positive-characteristic anomaly examples",
            Box::new(anomaly_examples),
        ),
        (
            "weighted kernel and diagonal derivation",
            Box::new(weighted_kernel_and_derivation),
        ),
        (
            "nilpotent 2x2 factorization",
            Box::new(nilpotent_factorization),
        ),
        ("Keller normal forms", Box::new(|| normal_forms(&keller))),
        ("exact inverses", Box::new(|| inverses(&keller))),
        ("tame decomposition", Box::new(tame_decompositions)),
        ("rank-one equivalences", Box::new(rank_one_equivalences)),
        ("deterministic CLI output", Box::new(deterministic_cli)),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let (passed, detail) = match run() {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += (!passed) as usize;
        println!(
            "criterion {:>2} [{}] {name}: {detail}",
            k + 1,
            if passed { "PASS" } else { "FAIL" }
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
