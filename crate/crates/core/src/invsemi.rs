//! Finite inverse semigroups given by Cayley tables.
//!
//! Covers axiom verification, the three equivalent characterizations of an inverse
//! semigroup, the natural partial order, atoms, the Wagner-Preston representation into
//! partial bijections, and semimodeloids with their derivative.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::chain::{iterate, DerivativeChain};
use crate::error::{Error, Result};
use crate::pbij::{Carrier, PartialBijection};
use crate::text::Lines;

/// A finite magma `(S, *)` with `S = {0, .., order-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CayleyTable {
    order: usize,
    mul: Vec<usize>,
}

impl CayleyTable {
    pub fn new(rows: Vec<Vec<usize>>) -> Result<Self> {
        let order = rows.len();
        if order == 0 {
            return Err(Error::input("a table needs at least one element"));
        }
        let mut mul = Vec::with_capacity(order * order);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != order {
                return Err(Error::input(format!(
                    "row {i} has {} entries, expected {order}",
                    row.len()
                )));
            }
            if let Some(&v) = row.iter().find(|&&v| v >= order) {
                return Err(Error::input(format!("row {i} contains {v}, outside 0..{order}")));
            }
            mul.extend(row);
        }
        Ok(CayleyTable { order, mul })
    }

    pub fn from_fn(order: usize, f: impl Fn(usize, usize) -> usize) -> Result<Self> {
        Self::new((0..order).map(|x| (0..order).map(|y| f(x, y)).collect()).collect())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.mul[x * self.order + y]
    }

    #[cfg(test)]
    pub(crate) fn set(&mut self, x: usize, y: usize, value: usize) {
        self.mul[x * self.order + y] = value;
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn associativity_failure(&self) -> Option<(usize, usize, usize)> {
        for x in self.elements() {
            for y in self.elements() {
                let xy = self.mul(x, y);
                for z in self.elements() {
                    if self.mul(xy, z) != self.mul(x, self.mul(y, z)) {
                        return Some((x, y, z));
                    }
                }
            }
        }
        None
    }

    pub fn is_associative(&self) -> bool {
        self.associativity_failure().is_none()
    }

    pub fn idempotents(&self) -> Vec<usize> {
        self.elements().filter(|&e| self.mul(e, e) == e).collect()
    }

    /// `{y : x*y*x = x and y*x*y = y}`.
    pub fn inverses_of(&self, x: usize) -> Vec<usize> {
        self.elements()
            .filter(|&y| self.mul(self.mul(x, y), x) == x && self.mul(self.mul(y, x), y) == y)
            .collect()
    }

    pub fn find_neutral(&self) -> Option<usize> {
        self.elements()
            .find(|&e| self.elements().all(|x| self.mul(e, x) == x && self.mul(x, e) == x))
    }

    pub fn find_zero(&self) -> Option<usize> {
        self.elements()
            .find(|&z| self.elements().all(|x| self.mul(z, x) == z && self.mul(x, z) == z))
    }

    /// The inverse map, when every element has exactly one inverse.
    pub fn unique_inverse_map(&self) -> Option<Vec<usize>> {
        self.elements()
            .map(|x| match self.inverses_of(x).as_slice() {
                [y] => Some(*y),
                _ => None,
            })
            .collect()
    }

    /// Evaluates the three equivalent definitions of an inverse semigroup independently.
    ///
    /// `inv`, if given, is tried first for the axiomatic condition; otherwise (or if it
    /// fails) a backtracking search looks for any unary operation satisfying the axioms.
    pub fn characterize(&self, inv: Option<&[usize]>) -> Result<Characterization> {
        if let Some((x, y, z)) = self.associativity_failure() {
            return Err(Error::input(format!(
                "table is not associative: ({x}*{y})*{z} != {x}*({y}*{z})"
            )));
        }
        let axiomatic = inv
            .filter(|inv| inv.len() == self.order && inv.iter().all(|&v| v < self.order))
            .is_some_and(|inv| self.axioms_hold(inv).is_none())
            || self.search_inverse_operation().is_some();
        let unique_inverses = self.elements().all(|x| self.inverses_of(x).len() == 1);
        let regular = self
            .elements()
            .all(|x| self.elements().any(|y| self.mul(self.mul(x, y), x) == x));
        let idempotents = self.idempotents();
        let commute = idempotents
            .iter()
            .all(|&e| idempotents.iter().all(|&f| self.mul(e, f) == self.mul(f, e)));
        Ok(Characterization {
            axiomatic,
            unique_inverses,
            regular_and_idempotents_commute: regular && commute,
        })
    }

    /// Checks axioms 2-4 of an inverse semigroup for the given unary operation,
    /// assuming associativity.
    fn axioms_hold(&self, inv: &[usize]) -> Option<SemigroupViolation> {
        for x in self.elements() {
            if self.mul(self.mul(x, inv[x]), x) != x {
                return Some(SemigroupViolation::Regularity { x });
            }
        }
        for x in self.elements() {
            if inv[inv[x]] != x {
                return Some(SemigroupViolation::Involution { x });
            }
        }
        for x in self.elements() {
            let ex = self.mul(x, inv[x]);
            for y in self.elements() {
                let ey = self.mul(y, inv[y]);
                if self.mul(ex, ey) != self.mul(ey, ex) {
                    return Some(SemigroupViolation::IdempotentsCommute { x, y });
                }
            }
        }
        None
    }

    /// Searches for a unary operation turning the table into an inverse semigroup.
    /// Any such operation maps each element to one of its inverses and is an involution.
    fn search_inverse_operation(&self) -> Option<Vec<usize>> {
        let candidates: Vec<Vec<usize>> = self.elements().map(|x| self.inverses_of(x)).collect();
        let mut inv = vec![usize::MAX; self.order];
        self.search_from(0, &candidates, &mut inv).then_some(inv)
    }

    fn search_from(&self, x: usize, candidates: &[Vec<usize>], inv: &mut [usize]) -> bool {
        if x == self.order {
            return true;
        }
        if inv[x] != usize::MAX {
            return self.search_from(x + 1, candidates, inv);
        }
        for &y in &candidates[x] {
            if y != x && inv[y] != usize::MAX {
                continue;
            }
            inv[x] = y;
            inv[y] = x;
            if self.projections_commute(x, inv)
                && self.projections_commute(y, inv)
                && self.search_from(x + 1, candidates, inv)
            {
                return true;
            }
            inv[x] = usize::MAX;
            inv[y] = usize::MAX;
        }
        false
    }

    fn projections_commute(&self, x: usize, inv: &[usize]) -> bool {
        let ex = self.mul(x, inv[x]);
        self.elements().filter(|&y| inv[y] != usize::MAX).all(|y| {
            let ey = self.mul(y, inv[y]);
            self.mul(ex, ey) == self.mul(ey, ex)
        })
    }

    /// `S¹`: this table with a fresh neutral element appended as the last index.
    pub fn adjoin_identity(&self) -> CayleyTable {
        let n = self.order;
        CayleyTable::from_fn(n + 1, |x, y| match (x == n, y == n) {
            (true, _) => y,
            (_, true) => x,
            _ => self.mul(x, y),
        })
        .expect("extended table is well formed")
    }
}

/// The three conditions of the inverse-semigroup characterization theorem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Characterization {
    /// Some unary operation satisfies the inverse-semigroup axioms.
    pub axiomatic: bool,
    /// Every element has exactly one inverse.
    pub unique_inverses: bool,
    /// Every element is regular and idempotents commute.
    pub regular_and_idempotents_commute: bool,
}

impl Characterization {
    pub fn agree(&self) -> bool {
        self.axiomatic == self.unique_inverses && self.unique_inverses == self.regular_and_idempotents_commute
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SemigroupViolation {
    Associativity {
        x: usize,
        y: usize,
        z: usize,
    },
    /// `x * x⁻¹ * x != x`
    Regularity {
        x: usize,
    },
    /// `(x⁻¹)⁻¹ != x`
    Involution {
        x: usize,
    },
    /// `x x⁻¹` and `y y⁻¹` do not commute.
    IdempotentsCommute {
        x: usize,
        y: usize,
    },
    Neutral {
        e: usize,
        x: usize,
    },
    Zero {
        z: usize,
        x: usize,
    },
}

impl SemigroupViolation {
    pub fn axiom(&self) -> &'static str {
        match self {
            SemigroupViolation::Associativity { .. } => "associativity",
            SemigroupViolation::Regularity { .. } => "regularity",
            SemigroupViolation::Involution { .. } => "involution",
            SemigroupViolation::IdempotentsCommute { .. } => "idempotents-commute",
            SemigroupViolation::Neutral { .. } => "neutral",
            SemigroupViolation::Zero { .. } => "zero",
        }
    }
}

impl fmt::Display for SemigroupViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SemigroupViolation::Associativity { x, y, z } => {
                write!(f, "associativity fails at ({x}, {y}, {z})")
            }
            SemigroupViolation::Regularity { x } => write!(f, "regularity: x*inv(x)*x != x at {x}"),
            SemigroupViolation::Involution { x } => {
                write!(f, "involution: inv(inv(x)) != x at {x}")
            }
            SemigroupViolation::IdempotentsCommute { x, y } => write!(
                f,
                "idempotents-commute: x*inv(x) and y*inv(y) do not commute at ({x}, {y})"
            ),
            SemigroupViolation::Neutral { e, x } => {
                write!(f, "neutral: {e} is not neutral for {x}")
            }
            SemigroupViolation::Zero { z, x } => write!(f, "zero: {z} does not absorb {x}"),
        }
    }
}

/// `(S, ⁻¹, *)` with optional neutral and zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InverseSemigroupTable {
    table: CayleyTable,
    inv: Vec<usize>,
    neutral: Option<usize>,
    zero: Option<usize>,
}

impl InverseSemigroupTable {
    pub fn new(table: CayleyTable, inv: Vec<usize>, neutral: Option<usize>, zero: Option<usize>) -> Result<Self> {
        let n = table.order;
        if inv.len() != n {
            return Err(Error::input(format!(
                "inverse table has {} entries, expected {n}",
                inv.len()
            )));
        }
        if let Some(&v) = inv.iter().find(|&&v| v >= n) {
            return Err(Error::input(format!("inverse table contains {v}, outside 0..{n}")));
        }
        for (what, v) in [("neutral", neutral), ("zero", zero)] {
            if let Some(v) = v.filter(|&v| v >= n) {
                return Err(Error::input(format!("{what} element {v} is outside 0..{n}")));
            }
        }
        Ok(InverseSemigroupTable {
            table,
            inv,
            neutral,
            zero,
        })
    }

    /// Builds the inverse map from unique inverses and detects neutral and zero.
    pub fn from_cayley(table: CayleyTable) -> Result<Self> {
        if let Some((x, y, z)) = table.associativity_failure() {
            return Err(Error::input(format!("table is not associative at ({x}, {y}, {z})")));
        }
        let inv = table
            .unique_inverse_map()
            .ok_or_else(|| Error::input("some element does not have exactly one inverse"))?;
        let neutral = table.find_neutral();
        let zero = table.find_zero();
        Self::new(table, inv, neutral, zero)
    }

    pub fn table(&self) -> &CayleyTable {
        &self.table
    }

    pub fn order(&self) -> usize {
        self.table.order
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        self.table.elements()
    }

    #[inline]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table.mul(x, y)
    }

    #[inline]
    pub fn inv(&self, x: usize) -> usize {
        self.inv[x]
    }

    pub fn inverse_map(&self) -> &[usize] {
        &self.inv
    }

    /// Declared neutral element, or the detected one.
    pub fn neutral(&self) -> Option<usize> {
        self.neutral.or_else(|| self.table.find_neutral())
    }

    /// Declared zero element, or the detected one.
    pub fn zero(&self) -> Option<usize> {
        self.zero.or_else(|| self.table.find_zero())
    }

    pub fn declared_neutral(&self) -> Option<usize> {
        self.neutral
    }

    pub fn declared_zero(&self) -> Option<usize> {
        self.zero
    }

    #[cfg(test)]
    pub(crate) fn table_mut(&mut self) -> &mut CayleyTable {
        &mut self.table
    }

    pub fn verify(&self) -> Result<(), SemigroupViolation> {
        if let Some((x, y, z)) = self.table.associativity_failure() {
            return Err(SemigroupViolation::Associativity { x, y, z });
        }
        if let Some(v) = self.table.axioms_hold(&self.inv) {
            return Err(v);
        }
        if let Some(e) = self.neutral {
            if let Some(x) = self.elements().find(|&x| self.mul(e, x) != x || self.mul(x, e) != x) {
                return Err(SemigroupViolation::Neutral { e, x });
            }
        }
        if let Some(z) = self.zero {
            if let Some(x) = self.elements().find(|&x| self.mul(z, x) != z || self.mul(x, z) != z) {
                return Err(SemigroupViolation::Zero { z, x });
            }
        }
        Ok(())
    }

    pub(crate) fn require_verified(&self, what: &str) -> Result<()> {
        self.verify()
            .map_err(|v| Error::input(format!("{what} requires an inverse semigroup: {v}")))
    }

    pub fn idempotents(&self) -> Vec<usize> {
        self.table.idempotents()
    }

    pub fn inverses_of(&self, x: usize) -> Vec<usize> {
        self.table.inverses_of(x)
    }

    pub fn characterize(&self) -> Result<Characterization> {
        self.table.characterize(Some(&self.inv))
    }

    /// `s ≤ x` iff `s = x * e` for some idempotent `e`.
    pub fn natural_leq(&self, s: usize, x: usize) -> bool {
        self.idempotents().into_iter().any(|e| self.mul(x, e) == s)
    }

    /// `leq[s * order + x]` holds iff `s ≤ x`.
    pub fn natural_order(&self) -> NaturalOrder {
        let n = self.order();
        let mut below = vec![false; n * n];
        let idempotents = self.idempotents();
        for x in self.elements() {
            for &e in &idempotents {
                below[self.mul(x, e) * n + x] = true;
            }
        }
        NaturalOrder { order: n, below }
    }

    /// Non-zero elements whose only lower bounds are themselves and zero.
    pub fn atoms(&self) -> Result<Vec<usize>> {
        let zero = self
            .zero()
            .ok_or_else(|| Error::input("atoms are only defined in the presence of a zero"))?;
        let leq = self.natural_order();
        Ok(self
            .elements()
            .filter(|&x| x != zero)
            .filter(|&x| self.elements().all(|f| !leq.leq(f, x) || f == x || f == zero))
            .collect())
    }

    pub fn idempotent_atoms(&self) -> Result<Vec<usize>> {
        Ok(self.atoms()?.into_iter().filter(|&a| self.mul(a, a) == a).collect())
    }

    /// The Wagner-Preston map: `Ω(a)` sends `x ↦ a*x` on `a⁻¹aS`.
    pub fn wagner_preston(&self) -> Result<Vec<PartialBijection>> {
        self.require_verified("the Wagner-Preston representation")?;
        let carrier = Carrier::new(self.order())?;
        self.elements()
            .map(|a| {
                let projection = self.mul(self.inv(a), a);
                let domain: BTreeSet<usize> = self.elements().map(|s| self.mul(projection, s)).collect();
                PartialBijection::new(carrier, domain.into_iter().map(|x| (x, self.mul(a, x))))
                    .map_err(|e| Error::input(format!("Ω({a}) is not a partial bijection: {e}")))
            })
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("order {}\n", self.order());
        for x in self.elements() {
            let row: Vec<String> = self.elements().map(|y| self.mul(x, y).to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        let inv: Vec<String> = self.inv.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!("inv {}\n", inv.join(" ")));
        if let Some(e) = self.neutral {
            out.push_str(&format!("neutral {e}\n"));
        }
        if let Some(z) = self.zero {
            out.push_str(&format!("zero {z}\n"));
        }
        out
    }
}

/// Precomputed natural partial order of a table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaturalOrder {
    order: usize,
    below: Vec<bool>,
}

impl NaturalOrder {
    #[inline]
    pub fn leq(&self, s: usize, x: usize) -> bool {
        self.below[s * self.order + x]
    }
}

/// Results of checking the three Wagner-Preston properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepresentationReport {
    pub injective: bool,
    pub multiplicative: bool,
    pub order_faithful: bool,
}

impl RepresentationReport {
    pub fn all_hold(&self) -> bool {
        self.injective && self.multiplicative && self.order_faithful
    }
}

/// Checks that `omega` is injective, multiplicative, and reflects the natural order
/// as restriction of partial bijections.
pub fn check_representation(t: &InverseSemigroupTable, omega: &[PartialBijection]) -> RepresentationReport {
    let distinct: BTreeSet<&PartialBijection> = omega.iter().collect();
    let injective = omega.len() == t.order() && distinct.len() == omega.len();
    let multiplicative = t.elements().all(|a| {
        t.elements()
            .all(|b| omega[t.mul(a, b)] == omega[a].compose_same(&omega[b]))
    });
    let leq = t.natural_order();
    let order_faithful = t
        .elements()
        .all(|a| t.elements().all(|b| leq.leq(a, b) == omega[a].subset_leq(&omega[b])));
    RepresentationReport {
        injective,
        multiplicative,
        order_faithful,
    }
}

/// An inverse semigroup table whose elements are partial bijections, with the
/// dictionary between table indices and maps.
#[derive(Debug, Clone)]
pub struct PartialBijectionTable {
    pub table: InverseSemigroupTable,
    elements: Vec<PartialBijection>,
    index: HashMap<PartialBijection, usize>,
}

impl PartialBijectionTable {
    /// Indices follow the ascending order of the maps.
    pub fn from_partial_bijections(members: impl IntoIterator<Item = PartialBijection>) -> Result<Self> {
        let elements: Vec<PartialBijection> = members.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let Some(first) = elements.first() else {
            return Err(Error::input("cannot build a table from no elements"));
        };
        let carrier = first.carrier();
        if elements.iter().any(|f| f.carrier() != carrier) {
            return Err(Error::input("maps live on different carriers"));
        }
        let index: HashMap<PartialBijection, usize> =
            elements.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
        let lookup = |h: PartialBijection, what: String| {
            index
                .get(&h)
                .copied()
                .ok_or_else(|| Error::input(format!("not closed: {what} = {h} is missing")))
        };
        let mut rows = Vec::with_capacity(elements.len());
        for f in &elements {
            let mut row = Vec::with_capacity(elements.len());
            for g in &elements {
                row.push(lookup(f.compose_same(g), format!("{f} o {g}"))?);
            }
            rows.push(row);
        }
        let inv = elements
            .iter()
            .map(|f| lookup(f.inverse(), format!("inverse of {f}")))
            .collect::<Result<Vec<_>>>()?;
        let cayley = CayleyTable::new(rows)?;
        let neutral = cayley.find_neutral();
        let zero = cayley.find_zero();
        let table = InverseSemigroupTable::new(cayley, inv, neutral, zero)?;
        Ok(PartialBijectionTable { table, elements, index })
    }

    pub fn element(&self, i: usize) -> &PartialBijection {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[PartialBijection] {
        &self.elements
    }

    pub fn index_of(&self, f: &PartialBijection) -> Option<usize> {
        self.index.get(f).copied()
    }
}

/// A subset of an inverse monoid with zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Semimodeloid {
    ambient: InverseSemigroupTable,
    neutral: usize,
    zero: usize,
    members: BTreeSet<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SemimodeloidViolation {
    Product { x: usize, y: usize },
    Inverse { x: usize },
    Downward { x: usize, below: usize },
    Neutral { e: usize },
}

impl SemimodeloidViolation {
    pub fn axiom(&self) -> u8 {
        match self {
            SemimodeloidViolation::Product { .. } => 1,
            SemimodeloidViolation::Inverse { .. } => 2,
            SemimodeloidViolation::Downward { .. } => 3,
            SemimodeloidViolation::Neutral { .. } => 4,
        }
    }
}

impl fmt::Display for SemimodeloidViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SemimodeloidViolation::Product { x, y } => {
                write!(f, "axiom 1 (product): {x}*{y} is not a member")
            }
            SemimodeloidViolation::Inverse { x } => {
                write!(f, "axiom 2 (inverse): inverse of {x} is not a member")
            }
            SemimodeloidViolation::Downward { x, below } => {
                write!(
                    f,
                    "axiom 3 (downward closure): {below} <= {x} but {below} is not a member"
                )
            }
            SemimodeloidViolation::Neutral { e } => {
                write!(f, "axiom 4 (neutral): neutral element {e} is not a member")
            }
        }
    }
}

impl Semimodeloid {
    /// `ambient` must verify as an inverse monoid with zero.
    pub fn new(ambient: InverseSemigroupTable, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        ambient.require_verified("a semimodeloid")?;
        let neutral = ambient
            .neutral()
            .ok_or_else(|| Error::input("semimodeloid ambient has no neutral element"))?;
        let zero = ambient
            .zero()
            .ok_or_else(|| Error::input("semimodeloid ambient has no zero element"))?;
        let members: BTreeSet<usize> = members.into_iter().collect();
        if let Some(&x) = members.iter().find(|&&x| x >= ambient.order()) {
            return Err(Error::input(format!("member {x} is outside the ambient table")));
        }
        Ok(Semimodeloid {
            ambient,
            neutral,
            zero,
            members,
        })
    }

    pub fn whole(ambient: InverseSemigroupTable) -> Result<Self> {
        let n = ambient.order();
        Self::new(ambient, 0..n)
    }

    pub fn ambient(&self) -> &InverseSemigroupTable {
        &self.ambient
    }

    pub fn members(&self) -> &BTreeSet<usize> {
        &self.members
    }

    pub fn neutral(&self) -> usize {
        self.neutral
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn verify(&self) -> Result<(), SemimodeloidViolation> {
        let t = &self.ambient;
        for &x in &self.members {
            for &y in &self.members {
                if !self.members.contains(&t.mul(x, y)) {
                    return Err(SemimodeloidViolation::Product { x, y });
                }
            }
        }
        if let Some(&x) = self.members.iter().find(|&&x| !self.members.contains(&t.inv(x))) {
            return Err(SemimodeloidViolation::Inverse { x });
        }
        let leq = t.natural_order();
        for &x in &self.members {
            if let Some(below) = t.elements().find(|&y| leq.leq(y, x) && !self.members.contains(&y)) {
                return Err(SemimodeloidViolation::Downward { x, below });
            }
        }
        if !self.members.contains(&self.neutral) {
            return Err(SemimodeloidViolation::Neutral { e: self.neutral });
        }
        Ok(())
    }

    /// Members `f` such that every idempotent atom of the ambient lies below the domain
    /// projection of some member above `f`, and likewise for the range projection.
    pub fn derivative(&self) -> Semimodeloid {
        let t = &self.ambient;
        let leq = t.natural_order();
        let atoms = t.idempotent_atoms().expect("ambient has a zero");
        let survives = |f: usize| {
            let above: Vec<usize> = self.members.iter().copied().filter(|&x| leq.leq(f, x)).collect();
            atoms
                .iter()
                .all(|&a| above.iter().any(|&x| leq.leq(a, t.mul(t.inv(x), x))))
                && atoms
                    .iter()
                    .all(|&b| above.iter().any(|&y| leq.leq(b, t.mul(y, t.inv(y)))))
        };
        Semimodeloid {
            ambient: self.ambient.clone(),
            neutral: self.neutral,
            zero: self.zero,
            members: self.members.iter().copied().filter(|&f| survives(f)).collect(),
        }
    }

    pub fn iterate_derivative(&self, rounds: usize) -> DerivativeChain<Semimodeloid> {
        iterate(self.clone(), rounds, |s| Ok(s.derivative())).expect("derivative is infallible")
    }

    /// The members as a table of their own (inverse monoid with zero).
    pub fn as_table(&self) -> Result<(InverseSemigroupTable, Vec<usize>)> {
        let elements: Vec<usize> = self.members.iter().copied().collect();
        let position: HashMap<usize, usize> = elements.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let find = |x: usize| {
            position
                .get(&x)
                .copied()
                .ok_or_else(|| Error::input(format!("members are not closed: {x} is missing")))
        };
        let mut rows = Vec::with_capacity(elements.len());
        for &x in &elements {
            rows.push(
                elements
                    .iter()
                    .map(|&y| find(self.ambient.mul(x, y)))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        let inv = elements
            .iter()
            .map(|&x| find(self.ambient.inv(x)))
            .collect::<Result<Vec<_>>>()?;
        let table = InverseSemigroupTable::new(
            CayleyTable::new(rows)?,
            inv,
            position.get(&self.neutral).copied(),
            position.get(&self.zero).copied(),
        )?;
        Ok((table, elements))
    }
}

/// Contents of a Cayley-table file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableFile {
    pub table: CayleyTable,
    pub inv: Option<Vec<usize>>,
    pub neutral: Option<usize>,
    pub zero: Option<usize>,
    pub members: Option<Vec<usize>>,
}

impl TableFile {
    /// Uses the listed inverse map, or derives one from unique inverses.
    pub fn into_inverse_semigroup(self) -> Result<InverseSemigroupTable> {
        let inv = match self.inv {
            Some(inv) => inv,
            None => self
                .table
                .unique_inverse_map()
                .ok_or_else(|| Error::input("no `inv` line and some element does not have exactly one inverse"))?,
        };
        InverseSemigroupTable::new(self.table, inv, self.neutral, self.zero)
    }
}

/// Parses
///
/// ```text
/// order n
/// <n rows of n indices>
/// inv i0 .. i(n-1)      # optional
/// neutral k             # optional
/// zero k                # optional
/// members i j ..        # optional, semimodeloid files
/// ```
pub fn parse_table(text: &str) -> Result<TableFile> {
    let mut lines = Lines::new(text);
    let head = lines
        .next_line()
        .ok_or_else(|| Error::parse(1, 1, "expected `order n`"))?;
    if head.keyword() != "order" {
        return Err(head.error("expected `order n`"));
    }
    head.expect_words(2)?;
    let n = head.number_at(1)?;
    if n == 0 {
        return Err(head.error_at(head.column_of_word(1), "order must be positive"));
    }
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let line = lines
            .next_line()
            .ok_or_else(|| Error::parse(head.number + i + 1, 1, format!("expected {n} table rows, found {i}")))?;
        if line.word_count() != n {
            return Err(line.error(format!("row has {} entries, expected {n}", line.word_count())));
        }
        let row = line.numbers_from(0)?;
        if let Some(k) = row.iter().position(|&v| v >= n) {
            return Err(line.error_at(line.column_of_word(k), format!("entry {} is outside 0..{n}", row[k])));
        }
        rows.push(row);
    }
    let mut file = TableFile {
        table: CayleyTable::new(rows)?,
        inv: None,
        neutral: None,
        zero: None,
        members: None,
    };
    while let Some(line) = lines.next_line() {
        let in_range = |values: Vec<usize>| -> Result<Vec<usize>> {
            if let Some(k) = values.iter().position(|&v| v >= n) {
                return Err(line.error_at(line.column_of_word(k + 1), format!("{} is outside 0..{n}", values[k])));
            }
            Ok(values)
        };
        match line.keyword() {
            "inv" => {
                line.expect_words(n + 1)?;
                file.inv = Some(in_range(line.numbers_from(1)?)?);
            }
            "neutral" => {
                line.expect_words(2)?;
                file.neutral = Some(in_range(vec![line.number_at(1)?])?[0]);
            }
            "zero" => {
                line.expect_words(2)?;
                file.zero = Some(in_range(vec![line.number_at(1)?])?[0]);
            }
            "members" => file.members = Some(in_range(line.numbers_from(1)?)?),
            other => return Err(line.error(format!("unexpected keyword `{other}`"))),
        }
    }
    Ok(file)
}
