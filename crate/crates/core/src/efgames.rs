//! Ehrenfeucht-Fraïssé equivalence through the derivative of the category of partial
//! isomorphisms between two structures, with a game-tree oracle and back-and-forth
//! certificates.
//!
//! The category has one object per structure (its identity map) and, for every pair of
//! sides `(X, Y)`, the partial isomorphisms `X → Y` as morphisms. The structures are
//! m-equivalent exactly when the m-th derivative of the whole category still holds an
//! existing morphism from the first structure to the second.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::catmod::{CategoricalModeloid, VerifiedCategory};
use crate::chain::DerivativeChain;
use crate::error::{check_bound, Error, Result};
use crate::freecat::FreeCategory;
use crate::structfmt::{enumerate_partial_isos, is_partial_iso, PartialIso, Structure};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub max_universe: usize,
    pub max_rounds: usize,
    /// Cap on the morphisms of the category, `★` excluded.
    pub max_morphisms: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_universe: 5,
            max_rounds: 4,
            max_morphisms: 2500,
        }
    }
}

/// Morphism `i < star` is `(from side, to side, map)`.
#[derive(Debug, Clone)]
pub struct CategoryD {
    ambient: Arc<VerifiedCategory>,
    sides: Vec<Structure>,
    morphisms: Vec<(usize, usize, PartialIso)>,
    index: HashMap<(usize, usize, PartialIso), usize>,
    identities: Vec<usize>,
}

impl CategoryD {
    /// The category over any list of structures sharing a vocabulary.
    pub fn build(sides: Vec<Structure>, bounds: &Bounds) -> Result<Self> {
        let Some(first) = sides.first() else {
            return Err(Error::input("at least one structure is needed"));
        };
        if let Some(s) = sides.iter().find(|s| !s.same_vocabulary(first)) {
            return Err(Error::input(format!(
                "{} and {} have different vocabularies",
                first.name(),
                s.name()
            )));
        }
        let mut morphisms = Vec::new();
        for (x, sx) in sides.iter().enumerate() {
            for (y, sy) in sides.iter().enumerate() {
                let part = enumerate_partial_isos(sx, sy, bounds.max_universe)?;
                morphisms.extend(part.into_iter().map(|p| (x, y, p)));
                check_bound("morphism count", morphisms.len(), bounds.max_morphisms)?;
            }
        }
        let index: HashMap<(usize, usize, PartialIso), usize> =
            morphisms.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let identities: Vec<usize> = sides
            .iter()
            .enumerate()
            .map(|(x, s)| {
                let id = PartialIso::from_sorted_unchecked((0..s.universe()).map(|a| (a, a)).collect());
                index[&(x, x, id)]
            })
            .collect();
        let n = morphisms.len();
        let star = n;
        let mut dom = Vec::with_capacity(n + 1);
        let mut cod = Vec::with_capacity(n + 1);
        for (x, y, _) in &morphisms {
            dom.push(identities[*x]);
            cod.push(identities[*y]);
        }
        dom.push(star);
        cod.push(star);
        let mut comp = vec![vec![star; n + 1]; n + 1];
        for (f, (y2, z, pf)) in morphisms.iter().enumerate() {
            for (g, (x, y, pg)) in morphisms.iter().enumerate() {
                if y == y2 {
                    comp[f][g] = index[&(*x, *z, pf.compose(pg))];
                }
            }
        }
        let inv: Vec<usize> = morphisms
            .iter()
            .map(|(x, y, p)| index[&(*y, *x, p.inverse())])
            .chain([star])
            .collect();
        let category = FreeCategory::new(star, dom, cod, comp, Some(inv.clone()))?;
        Ok(CategoryD {
            ambient: Arc::new(VerifiedCategory::new_unchecked(category, inv)),
            sides,
            morphisms,
            index,
            identities,
        })
    }

    pub fn ambient(&self) -> &Arc<VerifiedCategory> {
        &self.ambient
    }

    pub fn category(&self) -> &FreeCategory {
        self.ambient.category()
    }

    pub fn sides(&self) -> &[Structure] {
        &self.sides
    }

    pub fn star(&self) -> usize {
        self.morphisms.len()
    }

    /// The object of side `x`, i.e. its identity map.
    pub fn identity(&self, x: usize) -> usize {
        self.identities[x]
    }

    /// The zero of `End(id_X)`: the identity on the constants of side `x`.
    pub fn zero(&self, x: usize) -> usize {
        let mut pairs: Vec<(usize, usize)> = self.sides[x].constants().iter().map(|&c| (c, c)).collect();
        pairs.sort_unstable();
        pairs.dedup();
        self.index[&(x, x, PartialIso::from_sorted_unchecked(pairs))]
    }

    pub fn morphism(&self, m: usize) -> Option<(usize, usize, &PartialIso)> {
        self.morphisms.get(m).map(|(x, y, p)| (*x, *y, p))
    }

    pub fn index_of(&self, x: usize, y: usize, p: &PartialIso) -> Option<usize> {
        self.index.get(&(x, y, p.clone())).copied()
    }

    /// Morphisms from side `x` to side `y`.
    pub fn part(&self, x: usize, y: usize) -> Vec<usize> {
        (0..self.morphisms.len())
            .filter(|&m| self.morphisms[m].0 == x && self.morphisms[m].1 == y)
            .collect()
    }

    pub fn whole(&self) -> CategoricalModeloid {
        CategoricalModeloid::whole(Arc::clone(&self.ambient))
    }

    pub fn derivative_chain(&self, rounds: usize) -> DerivativeChain<CategoricalModeloid> {
        crate::chain::iterate(self.whole(), rounds, |m| Ok(m.derivative_unchecked()))
            .expect("the derivative step does not fail")
    }

    /// Members of `m` that are maps from side `x` to side `y`.
    pub fn members_between(&self, m: &CategoricalModeloid, x: usize, y: usize) -> Vec<usize> {
        m.members()
            .iter()
            .copied()
            .filter(|&i| matches!(self.morphisms.get(i), Some((a, b, _)) if (*a, *b) == (x, y)))
            .collect()
    }

    pub fn describe(&self, m: usize) -> String {
        match self.morphism(m) {
            Some((x, y, p)) => format!("{}->{} {p}", self.sides[x].name(), self.sides[y].name()),
            None => "star".to_string(),
        }
    }

    /// Side indices of the first and second structure: `(0, 1)`, or `(0, 0)` when the
    /// category was built over a single structure.
    fn query_sides(&self) -> (usize, usize) {
        (0, if self.sides.len() > 1 { 1 } else { 0 })
    }

    /// Reads the answer for `rounds` rounds off the corresponding chain term.
    pub fn verdict(&self, term: &CategoricalModeloid, rounds: usize) -> EfVerdict {
        let (x, y) = self.query_sides();
        let witness = self
            .members_between(term, x, y)
            .first()
            .map(|&m| self.morphisms[m].2.clone());
        EfVerdict {
            equivalent: witness.is_some(),
            rounds,
            witness,
        }
    }

    /// Verdicts for every round count `0..=rounds`.
    pub fn verdicts(&self, rounds: usize) -> Vec<EfVerdict> {
        let chain = self.derivative_chain(rounds);
        chain
            .terms
            .iter()
            .enumerate()
            .map(|(j, term)| self.verdict(term, j))
            .collect()
    }
}

/// The category over `a` and `b`, with `a` as side 0 and `b` as side 1.
pub fn build_category_d(a: &Structure, b: &Structure, bounds: &Bounds) -> Result<CategoryD> {
    CategoryD::build(vec![a.clone(), b.clone()], bounds)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EfVerdict {
    pub equivalent: bool,
    pub rounds: usize,
    /// A surviving map from the first structure to the second.
    pub witness: Option<PartialIso>,
}

pub fn ef_equiv_derivative(a: &Structure, b: &Structure, rounds: usize, bounds: &Bounds) -> Result<EfVerdict> {
    check_bound("rounds", rounds, bounds.max_rounds)?;
    let d = build_category_d(a, b, bounds)?;
    let chain = d.derivative_chain(rounds);
    Ok(d.verdict(chain.last(), rounds))
}

/// Plays the game directly: from the constant pairs, the duplicator must answer every
/// move for `rounds` rounds so that the final set of pairs is a partial isomorphism.
pub fn ef_equiv_oracle(a: &Structure, b: &Structure, rounds: usize, bounds: &Bounds) -> Result<bool> {
    check_bound("rounds", rounds, bounds.max_rounds)?;
    check_bound("universe size", a.universe(), bounds.max_universe)?;
    check_bound("universe size", b.universe(), bounds.max_universe)?;
    if !a.same_vocabulary(b) {
        return Err(Error::input(format!(
            "{} and {} have different vocabularies",
            a.name(),
            b.name()
        )));
    }
    let mut start: Vec<(usize, usize)> = a
        .constants()
        .iter()
        .copied()
        .zip(b.constants().iter().copied())
        .collect();
    start.sort_unstable();
    start.dedup();
    let mut oracle = Oracle {
        a,
        b,
        memo: HashMap::new(),
    };
    Ok(oracle.wins(start, rounds))
}

struct Oracle<'s> {
    a: &'s Structure,
    b: &'s Structure,
    memo: HashMap<(Vec<(usize, usize)>, usize), bool>,
}

impl Oracle<'_> {
    fn wins(&mut self, position: Vec<(usize, usize)>, left: usize) -> bool {
        if left == 0 {
            return is_partial_iso(self.a, self.b, &position);
        }
        let key = (position, left);
        if let Some(&known) = self.memo.get(&key) {
            return known;
        }
        let position = &key.0;
        let play = |this: &mut Self, x: usize, y: usize| {
            let mut next = position.clone();
            if let Err(at) = next.binary_search(&(x, y)) {
                next.insert(at, (x, y));
            }
            this.wins(next, left - 1)
        };
        let (na, nb) = (self.a.universe(), self.b.universe());
        let forth = (0..na).all(|x| (0..nb).any(|y| play(self, x, y)));
        let result = forth && (0..nb).all(|y| (0..na).any(|x| play(self, x, y)));
        self.memo.insert(key, result);
        result
    }
}

/// Levels `I_0 ⊇ I_1 ⊇ .. ⊇ I_m` of a back-and-forth system from `a` to `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackAndForthCertificate {
    pub rounds: usize,
    pub levels: Vec<Vec<PartialIso>>,
}

impl BackAndForthCertificate {
    pub fn to_text(&self) -> String {
        let mut out = format!("rounds {}\n", self.rounds);
        for (j, level) in self.levels.iter().enumerate() {
            out.push_str(&format!("level {j} size {}\n", level.len()));
            for p in level {
                out.push_str(&format!("  {p}\n"));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertificateViolation {
    LevelCount {
        expected: usize,
        found: usize,
    },
    EmptyLevel {
        level: usize,
    },
    NotPartialIso {
        level: usize,
        map: PartialIso,
    },
    /// No map in `I_level` extends `map ∈ I_{level+1}` to `element` of the first structure.
    Forth {
        level: usize,
        element: usize,
        map: PartialIso,
    },
    /// No map in `I_level` extends `map ∈ I_{level+1}` onto `element` of the second structure.
    Back {
        level: usize,
        element: usize,
        map: PartialIso,
    },
}

impl fmt::Display for CertificateViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertificateViolation::LevelCount { expected, found } => {
                write!(f, "expected {expected} levels, found {found}")
            }
            CertificateViolation::EmptyLevel { level } => write!(f, "level {level} is empty"),
            CertificateViolation::NotPartialIso { level, map } => {
                write!(f, "level {level} holds {map}, which is not a partial isomorphism")
            }
            CertificateViolation::Forth { level, element, map } => write!(
                f,
                "forth fails: no map in level {level} extends {map} with {element} in its domain"
            ),
            CertificateViolation::Back { level, element, map } => write!(
                f,
                "back fails: no map in level {level} extends {map} with {element} in its range"
            ),
        }
    }
}

/// `I_j = D^j(M) ∩ Part(a, b)`, or `None` when the structures are not equivalent.
pub fn extract_certificate(
    a: &Structure,
    b: &Structure,
    rounds: usize,
    bounds: &Bounds,
) -> Result<Option<BackAndForthCertificate>> {
    check_bound("rounds", rounds, bounds.max_rounds)?;
    let d = build_category_d(a, b, bounds)?;
    Ok(certificate_from(&d, &d.derivative_chain(rounds)))
}

pub fn certificate_from(
    d: &CategoryD,
    chain: &DerivativeChain<CategoricalModeloid>,
) -> Option<BackAndForthCertificate> {
    let (x, y) = d.query_sides();
    let levels: Vec<Vec<PartialIso>> = chain
        .terms
        .iter()
        .map(|term| {
            d.members_between(term, x, y)
                .into_iter()
                .map(|m| d.morphisms[m].2.clone())
                .collect()
        })
        .collect();
    if levels.iter().any(Vec::is_empty) {
        return None;
    }
    Some(BackAndForthCertificate {
        rounds: chain.rounds(),
        levels,
    })
}

pub fn verify_certificate(
    a: &Structure,
    b: &Structure,
    cert: &BackAndForthCertificate,
) -> Result<(), CertificateViolation> {
    if cert.levels.len() != cert.rounds + 1 {
        return Err(CertificateViolation::LevelCount {
            expected: cert.rounds + 1,
            found: cert.levels.len(),
        });
    }
    if let Some(level) = cert.levels.iter().position(Vec::is_empty) {
        return Err(CertificateViolation::EmptyLevel { level });
    }
    for (level, maps) in cert.levels.iter().enumerate() {
        if let Some(map) = maps.iter().find(|p| !is_partial_iso(a, b, p.pairs())) {
            return Err(CertificateViolation::NotPartialIso {
                level,
                map: map.clone(),
            });
        }
    }
    for level in 0..cert.rounds {
        let (lower, upper) = (&cert.levels[level], &cert.levels[level + 1]);
        for f in upper {
            let above: Vec<&PartialIso> = lower.iter().filter(|g| f.is_subset(g)).collect();
            if let Some(element) = (0..a.universe()).find(|&e| !above.iter().any(|g| g.in_domain(e))) {
                return Err(CertificateViolation::Forth {
                    level,
                    element,
                    map: f.clone(),
                });
            }
            let ranges: Vec<BTreeSet<usize>> = above.iter().map(|g| g.pairs().iter().map(|p| p.1).collect()).collect();
            if let Some(element) = (0..b.universe()).find(|e| !ranges.iter().any(|r| r.contains(e))) {
                return Err(CertificateViolation::Back {
                    level,
                    element,
                    map: f.clone(),
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structfmt::{parse_structures, Vocabulary};

    fn bounds() -> Bounds {
        Bounds::default()
    }

    fn set(n: usize) -> Structure {
        Structure::pure_set(format!("S{n}"), n).unwrap()
    }

    /// Strict linear orders of sizes p and q.
    fn orders(p: usize, q: usize) -> (Structure, Structure) {
        let v = Arc::new(Vocabulary::new(vec![("<".into(), 2)], vec![]).unwrap());
        let order = |n: usize, name: &str| {
            let lt = (0..n).flat_map(|i| (i + 1..n).map(move |j| vec![i, j])).collect();
            Structure::new(v.clone(), name, n, vec![lt], vec![]).unwrap()
        };
        (order(p, "A"), order(q, "B"))
    }

    #[test]
    fn tiny_category_has_eight_maps() {
        let d = build_category_d(&set(1), &set(1), &bounds()).unwrap();
        assert_eq!(d.category().morphism_count(), 9);
        assert_eq!(d.category().existing().count(), 8);
    }

    #[test]
    fn category_is_an_inverse_category_with_zeros() {
        let (a, b) = orders(2, 3);
        let d = build_category_d(&a, &b, &bounds()).unwrap();
        let c = d.category();
        assert_eq!(c.verify_category(), Ok(()));
        assert_eq!(
            c.verify_inverse_category_unique().as_deref(),
            Ok(c.inverse_table().unwrap())
        );
        assert!(c.has_all_zeros());
        for x in 0..2 {
            assert_eq!(c.zero_of_endoset(d.identity(x)).unwrap(), Some(d.zero(x)));
        }
        assert_eq!(VerifiedCategory::new(c.clone()).unwrap(), **d.ambient());
        assert_eq!(d.whole().verify(), Ok(()));
    }

    #[test]
    fn atoms_are_singletons_added_to_the_constants() {
        let text = "vocabulary\n relation R 2\n constant c\nstructure A\n universe 3\n constant c 1\n relation R (0,1) (1,2)\n";
        let a = parse_structures(text).unwrap().structures.remove(0);
        let d = CategoryD::build(vec![a], &bounds()).unwrap();
        let atoms: BTreeSet<String> = d
            .whole()
            .idempotent_atoms(d.identity(0))
            .unwrap()
            .into_iter()
            .map(|m| d.morphism(m).unwrap().2.to_string())
            .collect();
        assert_eq!(
            atoms,
            BTreeSet::from(["{0->0, 1->1}".to_string(), "{1->1, 2->2}".to_string()])
        );
    }

    #[test]
    fn single_structure_collapses_to_its_inverse_monoid() {
        let d = CategoryD::build(vec![set(2)], &bounds()).unwrap();
        let (t, _) = d.category().one_object_to_semigroup().unwrap();
        assert_eq!(t.order(), 7);
        assert_eq!(t.verify(), Ok(()));
    }

    #[test]
    fn vocabulary_mismatch_is_rejected() {
        let (a, _) = orders(2, 2);
        assert!(build_category_d(&a, &set(2), &bounds()).is_err());
    }

    #[test]
    fn pure_sets_two_and_three() {
        let (a, b) = (set(2), set(3));
        for (m, expected) in [(0, true), (1, true), (2, true), (3, false)] {
            let verdict = ef_equiv_derivative(&a, &b, m, &bounds()).unwrap();
            assert_eq!(verdict.equivalent, expected, "m = {m}");
            assert_eq!(verdict.witness.is_some(), expected);
            assert_eq!(ef_equiv_oracle(&a, &b, m, &bounds()).unwrap(), expected, "m = {m}");
        }
    }

    #[test]
    fn linear_orders_two_and_three() {
        let (a, b) = orders(2, 3);
        for (m, expected) in [(0, true), (1, true), (2, false)] {
            assert_eq!(ef_equiv_derivative(&a, &b, m, &bounds()).unwrap().equivalent, expected);
            assert_eq!(ef_equiv_oracle(&a, &b, m, &bounds()).unwrap(), expected);
        }
    }

    #[test]
    fn equal_sets_are_equivalent() {
        for n in 1..=3 {
            for m in 0..=n {
                assert!(ef_equiv_oracle(&set(n), &set(n), m, &bounds()).unwrap());
            }
        }
    }

    #[test]
    fn constants_decide_round_zero() {
        let v = Arc::new(Vocabulary::new(vec![("P".into(), 1)], vec!["c".into()]).unwrap());
        let a = Structure::new(v.clone(), "A", 2, vec![BTreeSet::from([vec![0]])], vec![0]).unwrap();
        let b = Structure::new(v, "B", 2, vec![BTreeSet::new()], vec![0]).unwrap();
        assert!(!ef_equiv_oracle(&a, &b, 0, &bounds()).unwrap());
        assert!(!ef_equiv_derivative(&a, &b, 0, &bounds()).unwrap().equivalent);
    }

    #[test]
    fn certificates() {
        let (a, b) = (set(2), set(2));
        let cert = extract_certificate(&a, &b, 2, &bounds()).unwrap().unwrap();
        assert_eq!(cert.levels.len(), 3);
        assert_eq!(verify_certificate(&a, &b, &cert), Ok(()));
        let zero = extract_certificate(&a, &b, 0, &bounds()).unwrap().unwrap();
        assert_eq!(zero.levels[0].len(), 7);
        let (a, b) = orders(2, 3);
        assert_eq!(extract_certificate(&a, &b, 2, &bounds()).unwrap(), None);
    }

    #[test]
    fn identity_certificate() {
        let (a, _) = orders(3, 3);
        let id = PartialIso::new(&a, &a, (0..3).map(|x| (x, x))).unwrap();
        let cert = BackAndForthCertificate {
            rounds: 4,
            levels: vec![vec![id]; 5],
        };
        assert_eq!(verify_certificate(&a, &a, &cert), Ok(()));
    }

    #[test]
    fn broken_certificates_are_rejected() {
        let (a, b) = (set(2), set(3));
        let cert = extract_certificate(&a, &b, 2, &bounds()).unwrap().unwrap();
        let mut empty = cert.clone();
        empty.levels[1].clear();
        assert_eq!(
            verify_certificate(&a, &b, &empty),
            Err(CertificateViolation::EmptyLevel { level: 1 })
        );
        // Keeping only the maps of level 2 everywhere loses the extensions.
        let mut flat = cert.clone();
        flat.levels = vec![cert.levels[2].clone(); 3];
        assert!(matches!(
            verify_certificate(&a, &b, &flat),
            Err(CertificateViolation::Forth { .. } | CertificateViolation::Back { .. })
        ));
    }

    #[test]
    fn certificate_rendering_is_stable() {
        let cert = extract_certificate(&set(1), &set(1), 1, &bounds()).unwrap().unwrap();
        assert_eq!(
            cert.to_text(),
            "rounds 1\nlevel 0 size 2\n  {}\n  {0->0}\nlevel 1 size 2\n  {}\n  {0->0}\n"
        );
    }

    #[test]
    fn bounds_are_enforced() {
        let err = ef_equiv_derivative(&set(2), &set(2), 5, &bounds()).unwrap_err();
        assert!(err.is_resource());
        let err = ef_equiv_oracle(&set(6), &set(2), 1, &bounds()).unwrap_err();
        assert!(err.is_resource());
        let tight = Bounds {
            max_morphisms: 10,
            ..bounds()
        };
        assert!(build_category_d(&set(2), &set(2), &tight).unwrap_err().is_resource());
    }
}
