//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero if any fails.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use modeloids::catmod::CategoricalModeloid;
use modeloids::efgames::{
    build_category_d, ef_equiv_oracle, extract_certificate, verify_certificate, BackAndForthCertificate, Bounds,
    CategoryD, CertificateViolation,
};
use modeloids::freecat::FreeCategory;
use modeloids::invsemi::{parse_table, CayleyTable, InverseSemigroupTable, PartialBijectionTable, Semimodeloid};
use modeloids::pbij::{enumerate_all, Carrier, PartialBijection};
use modeloids::random::{self, CorpusRng};
use modeloids::structfmt::{PartialIso, Structure, Vocabulary};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (
            "derivative verdict matches the game on random pairs",
            derivative_matches_game,
        ),
        ("pure sets follow the cardinality law", pure_set_law),
        ("modeloid derivatives are smaller modeloids", modeloid_derivatives),
        ("modeloid and semimodeloid derivatives coincide", semimodeloid_agreement),
        ("inverse-semigroup characterizations agree", characterizations),
        ("Wagner-Preston representation is faithful", wagner_preston),
        (
            "derivatives of the partial-isomorphism category",
            categorical_derivatives,
        ),
        ("inverse-category verifiers agree", verifier_agreement),
        ("one-object collapse and endoset restriction", collapse_and_endosets),
        ("back-and-forth certificates", certificates),
        ("ef output is deterministic", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({elapsed:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} ({elapsed:.1}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn random_pair(seed: u64, max_universe: usize) -> (Structure, Structure) {
    random::structure_pair(&mut random::rng(seed), &random::edge_and_constant(), max_universe)
}

/// Even seeds use an edge relation plus a constant; odd seeds drop the constant, which
/// leaves more symmetry and so larger categories and longer derivative chains.
fn mixed_pair(seed: u64, max_universe: usize) -> (Structure, Structure) {
    let vocabulary = if seed.is_multiple_of(2) {
        random::edge_and_constant()
    } else {
        Arc::new(Vocabulary::new(vec![("E".into(), 2)], Vec::new()).expect("valid vocabulary"))
    };
    random::structure_pair(&mut random::rng(seed), &vocabulary, max_universe)
}

fn full_table(n: usize) -> Result<PartialBijectionTable, String> {
    lib(PartialBijectionTable::from_partial_bijections(lib(enumerate_all(
        lib(Carrier::new(n))?,
        6,
    ))?))
}

fn derivative_matches_game() -> Outcome {
    let bounds = Bounds::default();
    let start = Instant::now();
    let mut equivalent = 0;
    let mut largest = 0;
    for seed in 0..100 {
        let (a, b) = random_pair(seed, 4);
        let d = lib(build_category_d(&a, &b, &bounds))?;
        largest = largest.max(d.category().morphism_count());
        for (m, verdict) in d.verdicts(3).iter().enumerate() {
            let oracle = lib(ef_equiv_oracle(&a, &b, m, &bounds))?;
            ensure(verdict.equivalent == oracle, || {
                format!(
                    "seed {seed}, m = {m}: derivative says {}, game says {oracle}",
                    verdict.equivalent
                )
            })?;
            equivalent += usize::from(oracle);
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(300), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "400 instances agree, {equivalent} equivalent, largest category {largest}"
    ))
}

fn pure_set_law() -> Outcome {
    let bounds = Bounds::default();
    let mut instances = 0;
    for p in 1..=4 {
        for q in 1..=4 {
            let a = lib(Structure::pure_set("A", p))?;
            let b = lib(Structure::pure_set("B", q))?;
            let d = lib(build_category_d(&a, &b, &bounds))?;
            for (m, verdict) in d.verdicts(4).iter().enumerate() {
                let law = p == q || p.min(q) >= m;
                let oracle = lib(ef_equiv_oracle(&a, &b, m, &bounds))?;
                ensure(oracle == law && verdict.equivalent == law, || {
                    format!(
                        "p = {p}, q = {q}, m = {m}: law {law}, game {oracle}, derivative {}",
                        verdict.equivalent
                    )
                })?;
                instances += 1;
            }
        }
    }
    Ok(format!("{instances} instances"))
}

fn modeloid_derivatives() -> Outcome {
    let mut shrank = 0;
    for seed in 0..100 {
        let m = lib(random::modeloid(&mut random::rng(seed), 4))?;
        let d = lib(m.derivative())?;
        ensure(d.is_subset(&m), || format!("seed {seed}: derivative is not a subset"))?;
        lib(d.verify()).map_err(|e| format!("seed {seed}: {e}"))?;
        shrank += usize::from(d.members().len() < m.members().len());
    }
    Ok(format!("100 modeloids, {shrank} shrank"))
}

fn semimodeloid_agreement() -> Outcome {
    for seed in 0..50 {
        let m = lib(random::modeloid(&mut random::rng(1000 + seed), 3))?;
        let table = full_table(m.carrier().size())?;
        let index = |f: &PartialBijection| table.index_of(f).ok_or_else(|| format!("{f:?} missing"));
        let members = m.members().iter().map(index).collect::<Result<Vec<_>, _>>()?;
        let semi = lib(Semimodeloid::new(table.table.clone(), members))?;
        let expected = lib(m.derivative())?
            .members()
            .iter()
            .map(index)
            .collect::<Result<BTreeSet<_>, _>>()?;
        ensure(semi.derivative().members() == &expected, || {
            format!("seed {seed}: derivatives differ")
        })?;
    }
    Ok("50 modeloids".into())
}

fn negative_tables() -> Result<Vec<CayleyTable>, String> {
    Ok(vec![
        lib(CayleyTable::from_fn(2, |x, _| x))?,
        lib(CayleyTable::from_fn(2, |_, y| y))?,
        lib(CayleyTable::new(vec![vec![0, 1, 2], vec![1, 2, 2], vec![2, 2, 2]]))?,
        lib(CayleyTable::from_fn(3, |_, _| 0))?,
        lib(CayleyTable::from_fn(4, |x, y| (x / 2) * 2 + y % 2))?,
    ])
}

fn closed_subset_table(seed: u64) -> Result<PartialBijectionTable, String> {
    let members = lib(random::closed_subset(&mut random::rng(2000 + seed), 3))?;
    lib(PartialBijectionTable::from_partial_bijections(members))
}

fn characterizations() -> Outcome {
    let mut positive = Vec::new();
    for n in 1..=3 {
        positive.push((format!("F({n})"), full_table(n)?.table.table().clone()));
    }
    for seed in 0..20 {
        positive.push((
            format!("closed subset {seed}"),
            closed_subset_table(seed)?.table.table().clone(),
        ));
    }
    for (name, t) in &positive {
        // No inverse map is supplied, so the axiomatic check has to find one.
        let c = lib(t.characterize(None))?;
        ensure(c.agree() && c.axiomatic, || format!("{name}: {c:?}"))?;
    }
    for (i, t) in negative_tables()?.iter().enumerate() {
        match t.characterize(None) {
            Ok(c) => ensure(c.agree() && !c.axiomatic, || format!("negative table {i}: {c:?}"))?,
            Err(_) => ensure(t.associativity_failure().is_some(), || {
                format!("negative table {i} errored")
            })?,
        }
    }
    Ok(format!("{} positive, 5 negative", positive.len()))
}

fn corpus_tables() -> Result<Vec<(String, InverseSemigroupTable)>, String> {
    let mut tables = Vec::new();
    for n in 1..=3 {
        tables.push((format!("F({n})"), full_table(n)?.table));
    }
    for seed in 0..20 {
        tables.push((format!("closed subset {seed}"), closed_subset_table(seed)?.table));
    }
    for name in [
        "full2.table",
        "semilattice.table",
        "z2.table",
        "left_zero.table",
        "not_associative.table",
    ] {
        let text = std::fs::read_to_string(data(name)).map_err(|e| format!("{name}: {e}"))?;
        if let Ok(t) = parse_table(&text).and_then(|f| f.into_inverse_semigroup()) {
            tables.push((name.to_string(), t));
        }
    }
    for seed in 0..10 {
        let s = random::structure(&mut random::rng(3000 + seed), &random::edge_and_constant(), "A", 3);
        let d = lib(CategoryD::build(vec![s], &Bounds::default()))?;
        let (t, _) = lib(d.category().one_object_to_semigroup())?;
        tables.push((format!("collapsed structure {seed}"), t));
    }
    tables.retain(|(_, t)| t.order() <= 40 && t.verify().is_ok());
    Ok(tables)
}

fn wagner_preston() -> Outcome {
    let tables = corpus_tables()?;
    for (name, t) in &tables {
        let omega = lib(t.wagner_preston())?;
        let n = t.order();
        let apply = |a: usize, x: usize| omega[a].apply(x);
        let distinct: BTreeSet<&[(usize, usize)]> = omega.iter().map(|p| p.pairs()).collect();
        ensure(distinct.len() == n, || format!("{name}: not injective"))?;
        let idempotents: Vec<usize> = (0..n).filter(|&e| t.mul(e, e) == e).collect();
        for s in 0..n {
            for u in 0..n {
                let product: Vec<(usize, usize)> = (0..n)
                    .filter_map(|x| apply(u, x).and_then(|y| apply(s, y)).map(|z| (x, z)))
                    .collect();
                ensure(omega[t.mul(s, u)].pairs() == product.as_slice(), || {
                    format!("{name}: Ω({s}·{u}) is not Ω({s})∘Ω({u})")
                })?;
                let below = idempotents.iter().any(|&e| t.mul(u, e) == s);
                let contained = omega[s].pairs().iter().all(|&(x, y)| apply(u, x) == Some(y));
                ensure(below == contained, || format!("{name}: order differs at ({s}, {u})"))?;
            }
        }
    }
    Ok(format!("{} tables", tables.len()))
}

fn corpus_d() -> Result<Vec<CategoryD>, String> {
    (0..20)
        .map(|seed| {
            let (a, b) = mixed_pair(4000 + seed, 3);
            lib(build_category_d(&a, &b, &Bounds::default()))
        })
        .collect()
}

fn categorical_derivatives() -> Outcome {
    let mut steps = Vec::new();
    for (i, d) in corpus_d()?.iter().enumerate() {
        let whole = d.whole();
        let mut current = whole.clone();
        lib(current.verify()).map_err(|e| format!("D {i}: {e}"))?;
        let mut k = 0;
        loop {
            let next = lib(current.derivative())?;
            lib(next.verify()).map_err(|e| format!("D {i}, iteration {}: {e}", k + 1))?;
            ensure(next.is_subset(&current), || format!("D {i}: iteration {} grew", k + 1))?;
            if next == current {
                break;
            }
            current = next;
            k += 1;
            ensure(k <= whole.len(), || {
                format!("D {i}: no fixed point within {} steps", whole.len())
            })?;
        }
        steps.push(k);
    }
    Ok(format!(
        "20 categories, stabilized after at most {} steps",
        steps.iter().max().unwrap_or(&0)
    ))
}

fn corpus_categories() -> Result<Vec<(String, FreeCategory)>, String> {
    let mut categories: Vec<(String, FreeCategory)> = corpus_d()?
        .into_iter()
        .enumerate()
        .take(10)
        .map(|(i, d)| (format!("D {i}"), d.category().clone()))
        .collect();
    for n in 1..=2 {
        categories.push((
            format!("F({n})"),
            lib(FreeCategory::from_inverse_monoid(&full_table(n)?.table))?,
        ));
    }
    for (i, t) in negative_tables()?
        .into_iter()
        .enumerate()
        .filter(|(_, t)| t.associativity_failure().is_none())
    {
        let monoid = t.adjoin_identity();
        categories.push((
            format!("negative monoid {i}"),
            lib(FreeCategory::from_monoid(&monoid, None))?,
        ));
    }
    Ok(categories)
}

fn rebuild(c: &FreeCategory, comp: impl Fn(usize, usize) -> usize, inv: Option<Vec<usize>>) -> Option<FreeCategory> {
    let n = c.morphism_count();
    FreeCategory::new(
        c.star(),
        (0..n).map(|m| c.dom(m)).collect(),
        (0..n).map(|m| c.cod(m)).collect(),
        (0..n).map(|f| (0..n).map(|g| comp(f, g)).collect()).collect(),
        inv,
    )
    .ok()
}

fn verdicts(c: &FreeCategory) -> (bool, bool) {
    (
        c.verify_inverse_category_unique().is_ok(),
        c.verify_inverse_category_equational().is_ok(),
    )
}

/// For categories built without an inverse table: the first `t` with `sts = s` and
/// `tst = t`, or `s` itself when there is none.
fn candidate_inverses(c: &FreeCategory) -> Vec<usize> {
    let n = c.morphism_count();
    (0..n)
        .map(|s| {
            (0..n)
                .find(|&t| c.comp(c.comp(s, t), s) == s && c.comp(c.comp(t, s), t) == t)
                .unwrap_or(s)
        })
        .collect()
}

fn verifier_agreement() -> Outcome {
    let categories: Vec<(String, FreeCategory)> = corpus_categories()?
        .into_iter()
        .map(|(name, c)| match c.inverse_table() {
            Some(_) => Ok((name, c)),
            None => {
                let inv = candidate_inverses(&c);
                rebuild(&c, |f, g| c.comp(f, g), Some(inv))
                    .map(|c| (name, c))
                    .ok_or("rebuild failed".to_string())
            }
        })
        .collect::<Result<_, _>>()?;
    let mut accepted = 0;
    for (name, c) in &categories {
        let (unique, equational) = verdicts(c);
        ensure(unique == equational, || {
            format!("{name}: unique {unique}, equational {equational}")
        })?;
        accepted += usize::from(unique);
    }
    let mut rng: CorpusRng = random::rng(5000);
    let mut rejected = 0;
    let mut mutants = 0;
    while mutants < 50 {
        let (name, c) = &categories[rng.gen_range(0..categories.len())];
        let n = c.morphism_count();
        let inv = c.inverse_table().map(<[usize]>::to_vec);
        let (mutant, what) = match &inv {
            Some(inv) if rng.gen_bool(0.25) => {
                let m = rng.gen_range(0..n);
                let value = rng.gen_range(0..n);
                if value == inv[m] {
                    continue;
                }
                let mut changed = inv.clone();
                changed[m] = value;
                (
                    rebuild(c, |f, g| c.comp(f, g), Some(changed)),
                    format!("inv({m}) = {value}"),
                )
            }
            _ => {
                let (f0, g0, value) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if value == c.comp(f0, g0) {
                    continue;
                }
                let comp = |f, g| {
                    if (f, g) == (f0, g0) {
                        value
                    } else {
                        c.comp(f, g)
                    }
                };
                let mutant = rebuild(c, comp, None).and_then(|m| {
                    // A table carried over from an inverse category stays; otherwise search again.
                    let inv = if c.verify_inverse_category_unique().is_ok() {
                        inv.clone()
                    } else {
                        None
                    };
                    let inv = inv.unwrap_or_else(|| candidate_inverses(&m));
                    rebuild(&m, |f, g| m.comp(f, g), Some(inv))
                });
                (mutant, format!("comp({f0}, {g0}) = {value}"))
            }
        };
        let Some(mutant) = mutant else { continue };
        mutants += 1;
        let (unique, equational) = verdicts(&mutant);
        ensure(unique == equational, || {
            format!("{name} with {what}: unique {unique}, equational {equational}")
        })?;
        rejected += usize::from(!unique);
    }
    Ok(format!(
        "{} categories ({accepted} inverse), 50 mutants ({rejected} rejected by both)",
        categories.len()
    ))
}

fn collapse_and_endosets() -> Outcome {
    let mut collapsed = 0;
    for n in 1..=3 {
        let c = lib(FreeCategory::from_inverse_monoid(&full_table(n)?.table))?;
        let (t, _) = lib(c.one_object_to_semigroup())?;
        lib(t.verify()).map_err(|e| format!("F({n}): {e}"))?;
        collapsed += 1;
    }
    for seed in 0..10 {
        let s = random::structure(&mut random::rng(3000 + seed), &random::edge_and_constant(), "A", 4);
        let d = lib(CategoryD::build(vec![s], &Bounds::default()))?;
        let (t, _) = lib(d.category().one_object_to_semigroup())?;
        lib(t.verify()).map_err(|e| format!("structure {seed}: {e}"))?;
        collapsed += 1;
    }
    let mut endosets = 0;
    for (i, d) in corpus_d()?.iter().enumerate() {
        let whole: CategoricalModeloid = d.whole();
        let chain = d.derivative_chain(2);
        for term in &chain.terms {
            for x in whole.objects() {
                let (semi, _) = lib(term.endoset_as_semimodeloid(x))?;
                lib(semi.verify()).map_err(|e| format!("D {i}, object {x}: {e}"))?;
                endosets += 1;
            }
        }
    }
    Ok(format!("{collapsed} collapses, {endosets} endosets"))
}

/// Independent forth/back check, used to decide which deletions must break a certificate.
fn forth_and_back_hold(a: &Structure, b: &Structure, levels: &[Vec<PartialIso>]) -> bool {
    levels.windows(2).all(|w| {
        w[1].iter().all(|f| {
            let extends = |g: &&PartialIso| f.pairs().iter().all(|p| g.pairs().contains(p));
            (0..a.universe()).all(|x| w[0].iter().filter(extends).any(|g| g.pairs().iter().any(|p| p.0 == x)))
                && (0..b.universe()).all(|y| w[0].iter().filter(extends).any(|g| g.pairs().iter().any(|p| p.1 == y)))
        })
    })
}

fn certificates() -> Outcome {
    let bounds = Bounds::default();
    let mut instances: Vec<(Structure, Structure)> = (0..40).map(|seed| mixed_pair(6000 + seed, 3)).collect();
    for (p, q) in [(2, 2), (2, 3), (3, 3), (3, 4)] {
        instances.push((lib(Structure::pure_set("A", p))?, lib(Structure::pure_set("B", q))?));
    }
    let mut extracted = 0;
    let mut mutated = 0;
    for (a, b) in &instances {
        for m in 1..=3 {
            let Some(cert) = lib(extract_certificate(a, b, m, &bounds))? else {
                continue;
            };
            lib(verify_certificate(a, b, &cert)).map_err(|e| format!("{} vs {}, m = {m}: {e}", a.name(), b.name()))?;
            extracted += 1;
            if mutated == 20 {
                continue;
            }
            // Delete the first map whose removal breaks forth or back without emptying its level.
            let pivotal = (0..m).find_map(|j| {
                (0..cert.levels[j].len()).find_map(|k| {
                    let mut levels = cert.levels.clone();
                    levels[j].remove(k);
                    (!levels[j].is_empty() && !forth_and_back_hold(a, b, &levels)).then_some(levels)
                })
            });
            if let Some(levels) = pivotal {
                let mutant = BackAndForthCertificate { rounds: m, levels };
                match verify_certificate(a, b, &mutant) {
                    Err(CertificateViolation::Forth { .. } | CertificateViolation::Back { .. }) => mutated += 1,
                    other => {
                        return Err(format!(
                            "{} vs {}, m = {m}: mutant judged {other:?}",
                            a.name(),
                            b.name()
                        ))
                    }
                }
            }
        }
    }
    ensure(mutated == 20, || format!("only {mutated} pivotal deletions found"))?;
    Ok(format!(
        "{extracted} certificates verified, 20 mutants rejected with a witness"
    ))
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("modeloids-acceptance-{}", std::process::id()));
    lib(std::fs::create_dir_all(&dir))?;
    let runs: [(&str, &[&str]); 4] = [
        ("sets_2_3.txt", &["--rounds", "2"]),
        ("orders_2_3.txt", &["--rounds", "2"]),
        ("graphs.txt", &["--left", "A", "--right", "B", "--rounds", "2"]),
        ("graphs.txt", &["--left", "A", "--right", "C", "--rounds", "3"]),
    ];
    let mut compared = 0;
    for (i, (file, extra)) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for attempt in 0..4 {
            let cert = dir.join(format!("{i}-{attempt}.cert"));
            let mut args: Vec<String> = vec!["--format".into(), "machine".into(), "ef".into()];
            args.push(data(file).display().to_string());
            args.extend(extra.iter().map(|s| s.to_string()));
            args.push("--certificate".into());
            args.push(cert.display().to_string());
            let (code, stdout) = if attempt < 2 {
                let out = modeloids_cli::run(std::iter::once("modeloids".to_string()).chain(args));
                (out.code, out.stdout.into_bytes())
            } else {
                let out = lib(Command::new(env!("CARGO_BIN_EXE_modeloids")).args(&args).output())?;
                (out.status.code().unwrap_or(-1), out.stdout)
            };
            ensure(code == 0 || code == 1, || format!("{file}: exit code {code}"))?;
            let certificate = std::fs::read(&cert).unwrap_or_default();
            // The certificate path differs per attempt and is echoed, so compare without it.
            let stdout = String::from_utf8_lossy(&stdout).replace(&cert.display().to_string(), "CERT");
            outputs.push((code, stdout, certificate));
        }
        ensure(outputs.windows(2).all(|w| w[0] == w[1]), || {
            format!("{file} {extra:?}: outputs differ")
        })?;
        compared += 1;
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!(
        "{compared} invocations, 2 in-process and 2 via the binary each"
    ))
}
