//! Finite relational vocabularies, structures and partial isomorphisms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{check_bound, Error, Result};
use crate::text::{Line, Lines};

pub const DEFAULT_MAX_UNIVERSE: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    relations: Vec<(String, usize)>,
    constants: Vec<String>,
}

impl Vocabulary {
    pub fn new(relations: Vec<(String, usize)>, constants: Vec<String>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for name in relations.iter().map(|r| &r.0).chain(&constants) {
            if !seen.insert(name) {
                return Err(Error::input(format!("duplicate symbol {name}")));
            }
        }
        if let Some((name, _)) = relations.iter().find(|r| r.1 == 0) {
            return Err(Error::input(format!("relation {name} has arity 0")));
        }
        Ok(Vocabulary { relations, constants })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn relations(&self) -> &[(String, usize)] {
        &self.relations
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r.0 == name)
    }

    pub fn constant_index(&self, name: &str) -> Option<usize> {
        self.constants.iter().position(|c| c == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    vocabulary: Arc<Vocabulary>,
    name: String,
    universe: usize,
    relations: Vec<BTreeSet<Vec<usize>>>,
    constants: Vec<usize>,
}

impl Structure {
    pub fn new(
        vocabulary: Arc<Vocabulary>,
        name: impl Into<String>,
        universe: usize,
        relations: Vec<BTreeSet<Vec<usize>>>,
        constants: Vec<usize>,
    ) -> Result<Self> {
        let name = name.into();
        if universe == 0 {
            return Err(Error::input(format!("structure {name} has an empty universe")));
        }
        if relations.len() != vocabulary.relations.len() {
            return Err(Error::input(format!(
                "structure {name} interprets {} relations, the vocabulary has {}",
                relations.len(),
                vocabulary.relations.len()
            )));
        }
        for ((symbol, arity), tuples) in vocabulary.relations.iter().zip(&relations) {
            for t in tuples {
                if t.len() != *arity {
                    return Err(Error::input(format!(
                        "{symbol} has arity {arity}, tuple {t:?} has length {}",
                        t.len()
                    )));
                }
                if let Some(x) = t.iter().find(|&&x| x >= universe) {
                    return Err(Error::input(format!("element {x} is outside the universe of {name}")));
                }
            }
        }
        if constants.len() != vocabulary.constants.len() {
            let missing = &vocabulary.constants[constants.len().min(vocabulary.constants.len())..];
            return Err(Error::input(match missing.first() {
                Some(c) => format!("uninterpreted constant {c}"),
                None => format!("structure {name} interprets too many constants"),
            }));
        }
        if let Some(x) = constants.iter().find(|&&x| x >= universe) {
            return Err(Error::input(format!("element {x} is outside the universe of {name}")));
        }
        Ok(Structure {
            vocabulary,
            name,
            universe,
            relations,
            constants,
        })
    }

    /// A structure over the empty vocabulary.
    pub fn pure_set(name: impl Into<String>, universe: usize) -> Result<Self> {
        Self::new(Arc::new(Vocabulary::empty()), name, universe, Vec::new(), Vec::new())
    }

    pub fn vocabulary(&self) -> &Arc<Vocabulary> {
        &self.vocabulary
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn relation(&self, r: usize) -> &BTreeSet<Vec<usize>> {
        &self.relations[r]
    }

    pub fn relations(&self) -> &[BTreeSet<Vec<usize>>] {
        &self.relations
    }

    pub fn constants(&self) -> &[usize] {
        &self.constants
    }

    pub fn is_constant(&self, x: usize) -> bool {
        self.constants.contains(&x)
    }

    pub fn same_vocabulary(&self, other: &Structure) -> bool {
        Arc::ptr_eq(&self.vocabulary, &other.vocabulary) || self.vocabulary == other.vocabulary
    }

    /// The same structure under another name.
    pub fn renamed(&self, name: impl Into<String>) -> Structure {
        Structure {
            name: name.into(),
            ..self.clone()
        }
    }
}

/// An injective partial map between two universes, pairs sorted by source.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartialIso {
    pairs: Vec<(usize, usize)>,
}

impl PartialIso {
    /// Checks that `pairs` is a partial isomorphism from `a` to `b`.
    pub fn new(a: &Structure, b: &Structure, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut pairs: Vec<(usize, usize)> = pairs.into_iter().collect();
        pairs.sort_unstable();
        pairs.dedup();
        if !is_partial_iso(a, b, &pairs) {
            return Err(Error::input(format!(
                "{} is not a partial isomorphism from {} to {}",
                PartialIso { pairs },
                a.name,
                b.name
            )));
        }
        Ok(PartialIso { pairs })
    }

    pub(crate) fn from_sorted_unchecked(pairs: Vec<(usize, usize)>) -> Self {
        PartialIso { pairs }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn apply(&self, x: usize) -> Option<usize> {
        self.pairs
            .binary_search_by_key(&x, |p| p.0)
            .ok()
            .map(|i| self.pairs[i].1)
    }

    pub fn in_domain(&self, x: usize) -> bool {
        self.apply(x).is_some()
    }

    /// `self ∘ g`
    pub fn compose(&self, g: &PartialIso) -> PartialIso {
        let mut pairs: Vec<(usize, usize)> = g
            .pairs
            .iter()
            .filter_map(|&(x, y)| self.apply(y).map(|z| (x, z)))
            .collect();
        pairs.sort_unstable();
        PartialIso { pairs }
    }

    pub fn inverse(&self) -> PartialIso {
        let mut pairs: Vec<(usize, usize)> = self.pairs.iter().map(|&(x, y)| (y, x)).collect();
        pairs.sort_unstable();
        PartialIso { pairs }
    }

    pub fn is_subset(&self, other: &PartialIso) -> bool {
        self.pairs.iter().all(|&(x, y)| other.apply(x) == Some(y))
    }
}

impl fmt::Display for PartialIso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, y)) in self.pairs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}->{y}")?;
        }
        f.write_str("}")
    }
}

/// Functional, injective, in range, contains every constant pair and preserves every
/// relation in both directions on its domain.
pub fn is_partial_iso(a: &Structure, b: &Structure, pairs: &[(usize, usize)]) -> bool {
    if !a.same_vocabulary(b) {
        return false;
    }
    let mut forward = BTreeMap::new();
    let mut backward = BTreeMap::new();
    for &(x, y) in pairs {
        if x >= a.universe || y >= b.universe {
            return false;
        }
        if *forward.entry(x).or_insert(y) != y || *backward.entry(y).or_insert(x) != x {
            return false;
        }
    }
    if a.constants
        .iter()
        .zip(&b.constants)
        .any(|(x, y)| forward.get(x) != Some(y))
    {
        return false;
    }
    let image = |map: &BTreeMap<usize, usize>, t: &[usize]| -> Option<Vec<usize>> {
        t.iter().map(|x| map.get(x).copied()).collect()
    };
    a.relations.iter().zip(&b.relations).all(|(ra, rb)| {
        ra.iter().all(|t| image(&forward, t).is_none_or(|u| rb.contains(&u)))
            && rb.iter().all(|u| image(&backward, u).is_none_or(|t| ra.contains(&t)))
    })
}

/// All partial isomorphisms from `a` to `b`, sorted.
pub fn enumerate_partial_isos(a: &Structure, b: &Structure, max_universe: usize) -> Result<Vec<PartialIso>> {
    check_bound("universe size", a.universe, max_universe)?;
    check_bound("universe size", b.universe, max_universe)?;
    if !a.same_vocabulary(b) {
        return Err(Error::input(format!(
            "{} and {} have different vocabularies",
            a.name, b.name
        )));
    }
    let mut base: Vec<(usize, usize)> = a.constants.iter().copied().zip(b.constants.iter().copied()).collect();
    base.sort_unstable();
    base.dedup();
    let mut out = Vec::new();
    if !is_partial_iso(a, b, &base) {
        return Ok(out);
    }
    let free: Vec<usize> = (0..a.universe).filter(|x| !a.is_constant(*x)).collect();
    let mut used = vec![false; b.universe];
    for &(_, y) in &base {
        used[y] = true;
    }
    extend(a, b, &free, 0, &mut base, &mut used, &mut out);
    out.sort();
    Ok(out)
}

fn extend(
    a: &Structure,
    b: &Structure,
    free: &[usize],
    next: usize,
    current: &mut Vec<(usize, usize)>,
    used: &mut [bool],
    out: &mut Vec<PartialIso>,
) {
    let Some(&x) = free.get(next) else {
        let mut pairs = current.clone();
        pairs.sort_unstable();
        out.push(PartialIso { pairs });
        return;
    };
    extend(a, b, free, next + 1, current, used, out);
    for y in 0..b.universe {
        if used[y] {
            continue;
        }
        current.push((x, y));
        // Restrictions of partial isomorphisms are partial isomorphisms, so a failing
        // prefix can be pruned.
        if is_partial_iso(a, b, current) {
            used[y] = true;
            extend(a, b, free, next + 1, current, used, out);
            used[y] = false;
        }
        current.pop();
    }
}

/// A parsed structure file: one vocabulary and the structures over it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureFile {
    pub vocabulary: Arc<Vocabulary>,
    pub structures: Vec<Structure>,
}

impl StructureFile {
    pub fn get(&self, name: &str) -> Option<&Structure> {
        self.structures.iter().find(|s| s.name == name)
    }

    pub fn to_text(&self) -> String {
        print_structures(&self.vocabulary, &self.structures)
    }
}

/// Parses
///
/// ```text
/// vocabulary
///   relation R 2
///   constant c
/// structure A
///   universe 3
///   constant c 0
///   relation R (0,1) (1,2)
/// ```
///
/// The vocabulary block may be omitted for the empty vocabulary. A relation may be
/// listed on several lines; its tuples accumulate.
pub fn parse_structures(text: &str) -> Result<StructureFile> {
    let mut lines = Lines::new(text);
    let mut relations: Vec<(String, usize)> = Vec::new();
    let mut constants: Vec<String> = Vec::new();
    let mut seen_symbols = BTreeSet::new();
    let mut pending = lines.next_line();
    if let Some(line) = pending.as_ref().filter(|l| l.keyword() == "vocabulary") {
        line.expect_words(1)?;
        pending = lines.next_line();
        while let Some(line) = pending.as_ref().filter(|l| l.keyword() != "structure") {
            match line.keyword() {
                "relation" => {
                    line.expect_words(3)?;
                    let name = line.word_at(1)?;
                    let arity = line.number_at(2)?;
                    if arity == 0 {
                        return Err(line.error_at(line.column_of_word(2), "arity must be at least 1"));
                    }
                    if !seen_symbols.insert(name.to_string()) {
                        return Err(line.error_at(line.column_of_word(1), format!("duplicate symbol {name}")));
                    }
                    relations.push((name.to_string(), arity));
                }
                "constant" => {
                    line.expect_words(2)?;
                    let name = line.word_at(1)?;
                    if !seen_symbols.insert(name.to_string()) {
                        return Err(line.error_at(line.column_of_word(1), format!("duplicate symbol {name}")));
                    }
                    constants.push(name.to_string());
                }
                other => {
                    return Err(line.error(format!(
                        "expected `relation`, `constant` or `structure`, found `{other}`"
                    )))
                }
            }
            pending = lines.next_line();
        }
    }
    let vocabulary = Arc::new(Vocabulary::new(relations, constants)?);
    let mut structures: Vec<Structure> = Vec::new();
    while let Some(head) = pending.take() {
        if head.keyword() != "structure" {
            return Err(head.error(format!("expected `structure`, found `{}`", head.keyword())));
        }
        let inline_universe = if head.word_count() == 4 && head.word_at(2)? == "universe" {
            Some(head.number_at(3)?)
        } else {
            head.expect_words(2)?;
            None
        };
        let name = head.word_at(1)?;
        if structures.iter().any(|s| s.name == name) {
            return Err(head.error_at(head.column_of_word(1), format!("duplicate structure {name}")));
        }
        let mut body = Vec::new();
        pending = lines.next_line();
        while let Some(line) = pending.take() {
            if line.keyword() == "structure" {
                pending = Some(line);
                break;
            }
            body.push(line);
            pending = lines.next_line();
        }
        structures.push(parse_structure_body(&vocabulary, &head, name, inline_universe, &body)?);
    }
    Ok(StructureFile { vocabulary, structures })
}

fn parse_structure_body(
    vocabulary: &Arc<Vocabulary>,
    head: &Line<'_>,
    name: &str,
    inline_universe: Option<usize>,
    body: &[Line<'_>],
) -> Result<Structure> {
    let (universe, line, column) = match (inline_universe, body.iter().find(|l| l.keyword() == "universe")) {
        (Some(u), None) => (u, head, head.column_of_word(3)),
        (None, Some(l)) => {
            l.expect_words(2)?;
            (l.number_at(1)?, l, l.column_of_word(1))
        }
        (Some(_), Some(l)) => return Err(l.error("duplicate `universe` line")),
        (None, None) => return Err(head.error(format!("structure {name} has no `universe` line"))),
    };
    if universe == 0 {
        return Err(line.error_at(column, "universe must be non-empty"));
    }
    let mut relations = vec![BTreeSet::new(); vocabulary.relations.len()];
    let mut constants: Vec<Option<usize>> = vec![None; vocabulary.constants.len()];
    let mut seen_universe = false;
    for line in body {
        match line.keyword() {
            "universe" => {
                if seen_universe {
                    return Err(line.error("duplicate `universe` line"));
                }
                seen_universe = true;
            }
            "constant" => {
                line.expect_words(3)?;
                let symbol = line.word_at(1)?;
                let c = vocabulary
                    .constant_index(symbol)
                    .ok_or_else(|| line.error_at(line.column_of_word(1), format!("unknown constant {symbol}")))?;
                if constants[c].is_some() {
                    return Err(line.error_at(line.column_of_word(1), format!("constant {symbol} interpreted twice")));
                }
                let value = line.number_at(2)?;
                if value >= universe {
                    return Err(line.error_at(
                        line.column_of_word(2),
                        format!("element {value} is outside 0..{universe}"),
                    ));
                }
                constants[c] = Some(value);
            }
            "relation" => {
                let symbol = line.word_at(1)?;
                let r = vocabulary
                    .relation_index(symbol)
                    .ok_or_else(|| line.error_at(line.column_of_word(1), format!("unknown relation {symbol}")))?;
                let arity = vocabulary.relations[r].1;
                for (tuple, column) in line.tuples_after(2)? {
                    if tuple.len() != arity {
                        return Err(line.error_at(
                            column,
                            format!("arity mismatch: {symbol} has arity {arity}, tuple has {}", tuple.len()),
                        ));
                    }
                    if let Some(x) = tuple.iter().find(|&&x| x >= universe) {
                        return Err(line.error_at(column, format!("element {x} is outside 0..{universe}")));
                    }
                    relations[r].insert(tuple);
                }
            }
            other => {
                return Err(line.error(format!(
                    "expected `universe`, `constant` or `relation`, found `{other}`"
                )))
            }
        }
    }
    if let Some(c) = constants.iter().position(Option::is_none) {
        return Err(head.error(format!(
            "uninterpreted constant {} in structure {name}",
            vocabulary.constants[c]
        )));
    }
    Structure::new(
        Arc::clone(vocabulary),
        name,
        universe,
        relations,
        constants.into_iter().flatten().collect(),
    )
}

pub fn print_structures(vocabulary: &Vocabulary, structures: &[Structure]) -> String {
    let mut out = String::new();
    if !vocabulary.relations.is_empty() || !vocabulary.constants.is_empty() {
        out.push_str("vocabulary\n");
        for (name, arity) in &vocabulary.relations {
            out.push_str(&format!("  relation {name} {arity}\n"));
        }
        for name in &vocabulary.constants {
            out.push_str(&format!("  constant {name}\n"));
        }
    }
    for s in structures {
        out.push_str(&format!("structure {}\n  universe {}\n", s.name, s.universe));
        for (name, value) in vocabulary.constants.iter().zip(&s.constants) {
            out.push_str(&format!("  constant {name} {value}\n"));
        }
        for ((name, _), tuples) in vocabulary.relations.iter().zip(&s.relations) {
            out.push_str(&format!("  relation {name}"));
            for t in tuples {
                let inner: Vec<String> = t.iter().map(|x| x.to_string()).collect();
                out.push_str(&format!(" ({})", inner.join(",")));
            }
            out.push('\n');
        }
    }
    out
}
