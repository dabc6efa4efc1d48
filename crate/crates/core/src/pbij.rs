//! Partial bijections on a finite carrier `{0, .., n-1}`.
//!
//! A [`PartialBijection`] stores its pairs sorted by source, so structural equality is
//! set equality and values can be kept in ordered or hashed sets directly.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::error::{check_bound, Error, Result};

/// Largest carrier [`enumerate_all`] accepts unless told otherwise (|F| = 13327).
pub const DEFAULT_MAX_CARRIER: usize = 6;

/// A finite non-empty set of elements `0..size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Carrier {
    size: usize,
}

impl Carrier {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::input("carrier must have at least one element"));
        }
        Ok(Carrier { size })
    }

    pub fn size(self) -> usize {
        self.size
    }

    pub fn elements(self) -> std::ops::Range<usize> {
        0..self.size
    }

    pub fn contains(self, x: usize) -> bool {
        x < self.size
    }
}

impl fmt::Display for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{0..{}}}", self.size)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialBijection {
    carrier: Carrier,
    pairs: Vec<(usize, usize)>,
}

impl PartialBijection {
    /// Builds a partial bijection from arbitrary-order pairs. Fails on duplicate
    /// sources, duplicate targets, or elements outside the carrier.
    pub fn new(carrier: Carrier, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut pairs: Vec<(usize, usize)> = pairs.into_iter().collect();
        pairs.sort_unstable();
        pairs.dedup();
        for &(x, y) in &pairs {
            if !carrier.contains(x) || !carrier.contains(y) {
                return Err(Error::input(format!(
                    "pair ({x},{y}) lies outside carrier of size {}",
                    carrier.size
                )));
            }
        }
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::input("not functional: two pairs share a source"));
        }
        let mut targets = HashSet::with_capacity(pairs.len());
        if !pairs.iter().all(|&(_, y)| targets.insert(y)) {
            return Err(Error::input("not injective: two pairs share a target"));
        }
        Ok(PartialBijection { carrier, pairs })
    }

    /// Sorted, validated pairs only.
    pub(crate) fn from_sorted_unchecked(carrier: Carrier, pairs: Vec<(usize, usize)>) -> Self {
        debug_assert!(pairs.windows(2).all(|w| w[0].0 < w[1].0));
        PartialBijection { carrier, pairs }
    }

    pub fn empty(carrier: Carrier) -> Self {
        PartialBijection {
            carrier,
            pairs: Vec::new(),
        }
    }

    pub fn identity(carrier: Carrier) -> Self {
        PartialBijection {
            carrier,
            pairs: carrier.elements().map(|x| (x, x)).collect(),
        }
    }

    /// The partial identity `1_A`.
    pub fn partial_identity(carrier: Carrier, set: impl IntoIterator<Item = usize>) -> Result<Self> {
        Self::new(carrier, set.into_iter().map(|x| (x, x)))
    }

    pub fn carrier(&self) -> Carrier {
        self.carrier
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
            .binary_search_by_key(&x, |&(s, _)| s)
            .ok()
            .map(|i| self.pairs[i].1)
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.pairs.iter().map(|&(x, _)| x)
    }

    pub fn codomain(&self) -> impl Iterator<Item = usize> + '_ {
        self.pairs.iter().map(|&(_, y)| y)
    }

    pub fn in_domain(&self, x: usize) -> bool {
        self.apply(x).is_some()
    }

    pub fn in_codomain(&self, y: usize) -> bool {
        self.pairs.iter().any(|&(_, t)| t == y)
    }

    /// `self ∘ g`: apply `g`, then `self`. Defined on `g⁻¹(dom(self) ∩ cod(g))`.
    pub fn compose(&self, g: &PartialBijection) -> Result<PartialBijection> {
        if self.carrier != g.carrier {
            return Err(Error::input(format!(
                "carrier mismatch: {} vs {}",
                self.carrier, g.carrier
            )));
        }
        Ok(self.compose_same(g))
    }

    pub(crate) fn compose_same(&self, g: &PartialBijection) -> PartialBijection {
        let pairs = g
            .pairs
            .iter()
            .filter_map(|&(x, y)| self.apply(y).map(|z| (x, z)))
            .collect();
        PartialBijection {
            carrier: self.carrier,
            pairs,
        }
    }

    pub fn inverse(&self) -> PartialBijection {
        let mut pairs: Vec<(usize, usize)> = self.pairs.iter().map(|&(x, y)| (y, x)).collect();
        pairs.sort_unstable();
        PartialBijection {
            carrier: self.carrier,
            pairs,
        }
    }

    /// Keeps exactly the pairs whose source lies in `set`.
    pub fn restrict(&self, set: &[usize]) -> Result<PartialBijection> {
        if let Some(&x) = set.iter().find(|&&x| !self.carrier.contains(x)) {
            return Err(Error::input(format!(
                "element {x} lies outside carrier of size {}",
                self.carrier.size
            )));
        }
        Ok(self.restrict_where(|x| set.contains(&x)))
    }

    pub(crate) fn restrict_where(&self, keep: impl Fn(usize) -> bool) -> PartialBijection {
        PartialBijection {
            carrier: self.carrier,
            pairs: self.pairs.iter().copied().filter(|&(x, _)| keep(x)).collect(),
        }
    }

    /// `self ⊆ f`: the domain of `self` is contained in that of `f` and both agree there.
    pub fn subset_leq(&self, f: &PartialBijection) -> bool {
        self.pairs.iter().all(|&(x, y)| f.apply(x) == Some(y))
    }

    /// `self ∪ {(a, b)}` when that is again a partial bijection.
    pub fn extend(&self, a: usize, b: usize) -> Option<PartialBijection> {
        match self.apply(a) {
            Some(y) if y == b => Some(self.clone()),
            Some(_) => None,
            None if self.in_codomain(b) => None,
            None => {
                let at = self.pairs.partition_point(|&(x, _)| x < a);
                let mut pairs = self.pairs.clone();
                pairs.insert(at, (a, b));
                Some(PartialBijection {
                    carrier: self.carrier,
                    pairs,
                })
            }
        }
    }

    /// Idempotent elements of F(Σ) are exactly the partial identities.
    pub fn is_idempotent(&self) -> bool {
        self.pairs.iter().all(|&(x, y)| x == y)
    }

    pub fn is_atom_idempotent(&self) -> bool {
        self.len() == 1 && self.is_idempotent()
    }
}

impl fmt::Display for PartialBijection {
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

/// `|F(Σ)| = Σ_k C(n,k)² k!` for a carrier of size `n`.
pub fn count_all(n: usize) -> u128 {
    let mut total = 0u128;
    for k in 0..=n {
        let c = binomial(n, k);
        let fact: u128 = (1..=k as u128).product();
        total += c * c * fact;
    }
    total
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

/// All partial bijections on `carrier`, in ascending order.
pub fn enumerate_all(carrier: Carrier, max_carrier: usize) -> Result<Vec<PartialBijection>> {
    check_bound("carrier size", carrier.size, max_carrier)?;
    let n = carrier.size;
    let mut out = Vec::with_capacity(count_all(n) as usize);
    let mut pairs = Vec::with_capacity(n);
    let mut used = vec![false; n];
    enumerate_rec(carrier, 0, &mut pairs, &mut used, &mut out);
    out.sort();
    Ok(out)
}

fn enumerate_rec(
    carrier: Carrier,
    next: usize,
    pairs: &mut Vec<(usize, usize)>,
    used: &mut [bool],
    out: &mut Vec<PartialBijection>,
) {
    if next == carrier.size {
        out.push(PartialBijection::from_sorted_unchecked(carrier, pairs.clone()));
        return;
    }
    enumerate_rec(carrier, next + 1, pairs, used, out);
    for y in 0..carrier.size {
        if !used[y] {
            used[y] = true;
            pairs.push((next, y));
            enumerate_rec(carrier, next + 1, pairs, used, out);
            pairs.pop();
            used[y] = false;
        }
    }
}

/// Smallest set containing `seed` that is closed under composition and inverse.
///
/// No identity or restrictions are added, so the result is an inverse subsemigroup of
/// F(Σ) rather than a modeloid.
pub fn inverse_semigroup_closure(
    seed: impl IntoIterator<Item = PartialBijection>,
) -> Result<BTreeSet<PartialBijection>> {
    let mut members: BTreeSet<PartialBijection> = BTreeSet::new();
    let mut carrier = None;
    let mut pending = Vec::new();
    for f in seed {
        match carrier {
            None => carrier = Some(f.carrier),
            Some(c) if c != f.carrier => return Err(Error::input("seed elements live on different carriers")),
            Some(_) => {}
        }
        pending.push(f);
    }
    while let Some(f) = pending.pop() {
        if !members.insert(f.clone()) {
            continue;
        }
        pending.push(f.inverse());
        for g in &members {
            pending.push(f.compose_same(g));
            pending.push(g.compose_same(&f));
        }
    }
    Ok(members)
}
