//! Seeded generators for test corpora. The same seed always yields the same values.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::modeloid::Modeloid;
use crate::pbij::{inverse_semigroup_closure, Carrier, PartialBijection};
use crate::structfmt::{Structure, Vocabulary};

pub type CorpusRng = ChaCha8Rng;

pub fn rng(seed: u64) -> CorpusRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn partial_bijection(rng: &mut CorpusRng, carrier: Carrier) -> PartialBijection {
    let mut targets: Vec<usize> = carrier.elements().collect();
    targets.shuffle(rng);
    let pairs: Vec<(usize, usize)> = carrier.elements().zip(targets).filter(|_| rng.gen_bool(0.6)).collect();
    PartialBijection::new(carrier, pairs).expect("a shuffled matching is injective")
}

/// The modeloid generated by up to three random maps on a carrier of `1..=max_carrier`.
pub fn modeloid(rng: &mut CorpusRng, max_carrier: usize) -> Result<Modeloid> {
    let carrier = Carrier::new(rng.gen_range(1..=max_carrier))?;
    let count = rng.gen_range(0..=3);
    let seed: Vec<PartialBijection> = (0..count).map(|_| partial_bijection(rng, carrier)).collect();
    Modeloid::closure(carrier, seed)
}

/// A subset of F(Σ) closed under composition and inverse, generated by up to three
/// random maps on a carrier of `1..=max_carrier`.
pub fn closed_subset(rng: &mut CorpusRng, max_carrier: usize) -> Result<BTreeSet<PartialBijection>> {
    let carrier = Carrier::new(rng.gen_range(1..=max_carrier))?;
    let count = rng.gen_range(1..=3);
    let seed: Vec<PartialBijection> = (0..count).map(|_| partial_bijection(rng, carrier)).collect();
    inverse_semigroup_closure(seed)
}

/// One binary relation `R` and one constant `c`.
pub fn edge_and_constant() -> Arc<Vocabulary> {
    Arc::new(Vocabulary::new(vec![("R".into(), 2)], vec!["c".into()]).expect("valid vocabulary"))
}

fn all_tuples(universe: usize, arity: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..universe).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

pub fn structure(rng: &mut CorpusRng, vocabulary: &Arc<Vocabulary>, name: &str, max_universe: usize) -> Structure {
    let universe = rng.gen_range(1..=max_universe);
    let relations = vocabulary
        .relations()
        .iter()
        .map(|(_, arity)| {
            all_tuples(universe, *arity)
                .into_iter()
                .filter(|_| rng.gen_bool(0.4))
                .collect()
        })
        .collect();
    let constants = vocabulary
        .constants()
        .iter()
        .map(|_| rng.gen_range(0..universe))
        .collect();
    Structure::new(Arc::clone(vocabulary), name, universe, relations, constants).expect("generated in range")
}

fn permuted(rng: &mut CorpusRng, s: &Structure, name: &str) -> Structure {
    let mut perm: Vec<usize> = (0..s.universe()).collect();
    perm.shuffle(rng);
    let relations = s
        .relations()
        .iter()
        .map(|tuples| tuples.iter().map(|t| t.iter().map(|&x| perm[x]).collect()).collect())
        .collect();
    let constants = s.constants().iter().map(|&c| perm[c]).collect();
    Structure::new(Arc::clone(s.vocabulary()), name, s.universe(), relations, constants)
        .expect("permutation keeps range")
}

fn flip_one_tuple(rng: &mut CorpusRng, s: &Structure) -> Structure {
    let vocabulary = s.vocabulary();
    if vocabulary.relations().is_empty() {
        return s.clone();
    }
    let r = rng.gen_range(0..vocabulary.relations().len());
    let tuples = all_tuples(s.universe(), vocabulary.relations()[r].1);
    let t = tuples[rng.gen_range(0..tuples.len())].clone();
    let mut relations: Vec<BTreeSet<Vec<usize>>> = s.relations().to_vec();
    if !relations[r].remove(&t) {
        relations[r].insert(t);
    }
    Structure::new(
        Arc::clone(vocabulary),
        s.name(),
        s.universe(),
        relations,
        s.constants().to_vec(),
    )
    .expect("flip keeps range")
}

/// A pair named `A`, `B`: an isomorphic copy, a copy with one tuple flipped, or an
/// independent structure, each a third of the time.
pub fn structure_pair(
    rng: &mut CorpusRng,
    vocabulary: &Arc<Vocabulary>,
    max_universe: usize,
) -> (Structure, Structure) {
    let a = structure(rng, vocabulary, "A", max_universe);
    let b = match rng.gen_range(0..3) {
        0 => permuted(rng, &a, "B"),
        1 => {
            let copy = permuted(rng, &a, "B");
            flip_one_tuple(rng, &copy)
        }
        _ => structure(rng, vocabulary, "B", max_universe),
    };
    (a, b)
}
