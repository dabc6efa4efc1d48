//! Finite categories in free logic.
//!
//! Composition is total; composites that do not exist are sent to a single
//! non-existing morphism `★`. Objects are identified with their identity morphisms, so a
//! category is given entirely by its morphisms with `dom`, `cod` and composition tables.
//! `comp(f, g)` is `f · g` (apply `g` first), which exists exactly when
//! `dom(f) = cod(g)` and both morphisms exist.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::invsemi::{CayleyTable, InverseSemigroupTable};
use crate::text::Lines;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeCategory {
    count: usize,
    star: usize,
    dom: Vec<usize>,
    cod: Vec<usize>,
    comp: Vec<usize>,
    inv: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CategoryViolation {
    /// `★` must be its own domain, codomain and inverse and absorb composition.
    Star {
        detail: String,
    },
    /// `dom(m)` or `cod(m)` exists although `m` does not.
    Strictness {
        m: usize,
    },
    /// `f · g` exists but not both are existing with `dom(f) = cod(g)`, or vice versa.
    Composability {
        f: usize,
        g: usize,
    },
    Associativity {
        f: usize,
        g: usize,
        h: usize,
    },
    /// `x · dom(x) ≇ x`
    RightIdentity {
        x: usize,
    },
    /// `cod(x) · x ≇ x`
    LeftIdentity {
        x: usize,
    },
}

impl fmt::Display for CategoryViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CategoryViolation::Star { detail } => write!(f, "star: {detail}"),
            CategoryViolation::Strictness { m } => {
                write!(f, "strictness: dom or cod of non-existing morphism {m} exists")
            }
            CategoryViolation::Composability { f: a, g } => write!(
                f,
                "composability: existence of {a}.{g} disagrees with dom({a}) = cod({g})"
            ),
            CategoryViolation::Associativity { f: a, g, h } => {
                write!(f, "associativity fails at ({a}, {g}, {h})")
            }
            CategoryViolation::RightIdentity { x } => {
                write!(f, "identity: {x}.dom({x}) is not {x}")
            }
            CategoryViolation::LeftIdentity { x } => write!(f, "identity: cod({x}).{x} is not {x}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InverseCategoryViolation {
    NotACategory(CategoryViolation),
    /// No generalized inverse `ŝ: Y → X` for `s: X → Y`.
    NoInverse {
        s: usize,
    },
    /// At least two generalized inverses.
    NotUnique {
        s: usize,
        first: usize,
        second: usize,
    },
    /// The listed inverse differs from the unique generalized inverse.
    InverseMismatch {
        s: usize,
        listed: usize,
        expected: usize,
    },
    MissingInverseTable,
    /// `x · x⁻¹ · x ≇ x`
    Regularity {
        x: usize,
    },
    /// `(x⁻¹)⁻¹ ≇ x`
    Involution {
        x: usize,
    },
    /// `x · x⁻¹` and `y · y⁻¹` do not commute.
    IdempotentsCommute {
        x: usize,
        y: usize,
    },
}

impl fmt::Display for InverseCategoryViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InverseCategoryViolation::NotACategory(v) => write!(f, "not a category: {v}"),
            InverseCategoryViolation::NoInverse { s } => {
                write!(f, "unique inverse: {s} has no inverse")
            }
            InverseCategoryViolation::NotUnique { s, first, second } => {
                write!(f, "unique inverse: {s} has inverses {first} and {second}")
            }
            InverseCategoryViolation::InverseMismatch { s, listed, expected } => write!(
                f,
                "unique inverse: listed inverse of {s} is {listed}, expected {expected}"
            ),
            InverseCategoryViolation::MissingInverseTable => write!(f, "no inverse table given"),
            InverseCategoryViolation::Regularity { x } => {
                write!(f, "regularity: {x}.inv({x}).{x} is not {x}")
            }
            InverseCategoryViolation::Involution { x } => {
                write!(f, "involution: inv(inv({x})) is not {x}")
            }
            InverseCategoryViolation::IdempotentsCommute { x, y } => {
                write!(f, "idempotents-commute: {x}.inv({x}) and {y}.inv({y}) do not commute")
            }
        }
    }
}

impl FreeCategory {
    pub fn new(
        star: usize,
        dom: Vec<usize>,
        cod: Vec<usize>,
        comp: Vec<Vec<usize>>,
        inv: Option<Vec<usize>>,
    ) -> Result<Self> {
        let n = dom.len();
        if star >= n {
            return Err(Error::input(format!("star {star} is outside 0..{n}")));
        }
        if cod.len() != n || comp.len() != n {
            return Err(Error::input(format!(
                "tables disagree on the morphism count: dom {n}, cod {}, comp {}",
                cod.len(),
                comp.len()
            )));
        }
        let in_range = |what: &str, v: &[usize]| -> Result<()> {
            if v.len() != n {
                return Err(Error::input(format!("{what} has {} entries, expected {n}", v.len())));
            }
            match v.iter().find(|&&x| x >= n) {
                Some(x) => Err(Error::input(format!("{what} contains {x}, outside 0..{n}"))),
                None => Ok(()),
            }
        };
        in_range("dom", &dom)?;
        in_range("cod", &cod)?;
        for (i, row) in comp.iter().enumerate() {
            in_range(&format!("comp row {i}"), row)?;
        }
        if let Some(inv) = &inv {
            in_range("inv", inv)?;
        }
        Ok(FreeCategory {
            count: n,
            star,
            dom,
            cod,
            comp: comp.into_iter().flatten().collect(),
            inv,
        })
    }

    /// A monoid as a one-object category. Morphism `i` is table element `i`; `★` is
    /// appended as index `order`.
    pub fn from_monoid(table: &CayleyTable, inv: Option<&[usize]>) -> Result<Self> {
        let e = table
            .find_neutral()
            .ok_or_else(|| Error::input("a one-object category needs a neutral element"))?;
        let n = table.order();
        let star = n;
        let mut dom = vec![e; n + 1];
        dom[star] = star;
        let cod = dom.clone();
        let comp = (0..=n)
            .map(|x| {
                (0..=n)
                    .map(|y| if x == star || y == star { star } else { table.mul(x, y) })
                    .collect()
            })
            .collect();
        let inv = inv.map(|inv| inv.iter().copied().chain([star]).collect());
        Self::new(star, dom, cod, comp, inv)
    }

    pub fn from_inverse_monoid(t: &InverseSemigroupTable) -> Result<Self> {
        Self::from_monoid(t.table(), Some(t.inverse_map()))
    }

    pub fn morphism_count(&self) -> usize {
        self.count
    }

    pub fn morphisms(&self) -> std::ops::Range<usize> {
        0..self.count
    }

    pub fn star(&self) -> usize {
        self.star
    }

    #[inline]
    pub fn exists(&self, m: usize) -> bool {
        m != self.star
    }

    pub fn existing(&self) -> impl Iterator<Item = usize> + '_ {
        self.morphisms().filter(|&m| self.exists(m))
    }

    #[inline]
    pub fn dom(&self, m: usize) -> usize {
        self.dom[m]
    }

    #[inline]
    pub fn cod(&self, m: usize) -> usize {
        self.cod[m]
    }

    /// `f · g`
    #[inline]
    pub fn comp(&self, f: usize, g: usize) -> usize {
        self.comp[f * self.count + g]
    }

    pub fn inv(&self, m: usize) -> Option<usize> {
        self.inv.as_ref().map(|inv| inv[m])
    }

    pub fn inverse_table(&self) -> Option<&[usize]> {
        self.inv.as_deref()
    }

    pub fn with_inverse(mut self, inv: Vec<usize>) -> Result<Self> {
        if inv.len() != self.count || inv.iter().any(|&x| x >= self.count) {
            return Err(Error::input("inverse table has the wrong shape"));
        }
        self.inv = Some(inv);
        Ok(self)
    }

    #[cfg(test)]
    pub(crate) fn set_comp(&mut self, f: usize, g: usize, value: usize) {
        self.comp[f * self.count + g] = value;
    }

    #[cfg(test)]
    pub(crate) fn set_inv(&mut self, m: usize, value: usize) {
        if let Some(inv) = self.inv.as_mut() {
            inv[m] = value;
        }
    }

    /// Kleene equality on a carrier with a single non-existing element.
    #[inline]
    pub fn kleene_eq(&self, a: usize, b: usize) -> bool {
        (a == self.star && b == self.star) || (a != self.star && b != self.star && a == b)
    }

    /// Existing identity: both sides exist and are equal.
    #[inline]
    fn exist_eq(&self, a: usize, b: usize) -> bool {
        a != self.star && a == b
    }

    pub fn verify_category(&self) -> Result<(), CategoryViolation> {
        let s = self.star;
        if self.dom(s) != s || self.cod(s) != s {
            return Err(CategoryViolation::Star {
                detail: "dom and cod of star must be star".into(),
            });
        }
        for m in self.morphisms() {
            if self.comp(m, s) != s || self.comp(s, m) != s {
                return Err(CategoryViolation::Star {
                    detail: format!("composing {m} with star must give star"),
                });
            }
        }
        for m in self.morphisms() {
            if !self.exists(m) && (self.exists(self.dom(m)) || self.exists(self.cod(m))) {
                return Err(CategoryViolation::Strictness { m });
            }
        }
        for f in self.morphisms() {
            for g in self.morphisms() {
                let composable = self.exists(f) && self.exists(g) && self.exist_eq(self.dom(f), self.cod(g));
                if self.exists(self.comp(f, g)) != composable {
                    return Err(CategoryViolation::Composability { f, g });
                }
            }
        }
        for f in self.morphisms() {
            for g in self.morphisms() {
                let fg = self.comp(f, g);
                for h in self.morphisms() {
                    if !self.kleene_eq(self.comp(fg, h), self.comp(f, self.comp(g, h))) {
                        return Err(CategoryViolation::Associativity { f, g, h });
                    }
                }
            }
        }
        for x in self.morphisms() {
            if !self.kleene_eq(self.comp(x, self.dom(x)), x) {
                return Err(CategoryViolation::RightIdentity { x });
            }
            if !self.kleene_eq(self.comp(self.cod(x), x), x) {
                return Err(CategoryViolation::LeftIdentity { x });
            }
        }
        Ok(())
    }

    /// Generalized inverses of `s` in the sense of inverse categories.
    pub fn generalized_inverses(&self, s: usize) -> Vec<usize> {
        self.morphisms()
            .filter(|&t| {
                self.kleene_eq(self.dom(t), self.cod(s))
                    && self.kleene_eq(self.cod(t), self.dom(s))
                    && self.kleene_eq(s, self.comp(self.comp(s, t), s))
                    && self.kleene_eq(t, self.comp(self.comp(t, s), t))
            })
            .collect()
    }

    /// Checks that every existing morphism has exactly one generalized inverse and
    /// returns the resulting inverse table (with `★⁻¹ = ★`). A listed inverse table
    /// must coincide with it.
    pub fn verify_inverse_category_unique(&self) -> Result<Vec<usize>, InverseCategoryViolation> {
        self.verify_category().map_err(InverseCategoryViolation::NotACategory)?;
        let mut witness = vec![self.star; self.count];
        for s in self.existing() {
            match self.generalized_inverses(s).as_slice() {
                [] => return Err(InverseCategoryViolation::NoInverse { s }),
                [t] => witness[s] = *t,
                [first, second, ..] => {
                    return Err(InverseCategoryViolation::NotUnique {
                        s,
                        first: *first,
                        second: *second,
                    })
                }
            }
        }
        if let Some(inv) = &self.inv {
            if let Some(s) = self.morphisms().find(|&s| inv[s] != witness[s]) {
                return Err(InverseCategoryViolation::InverseMismatch {
                    s,
                    listed: inv[s],
                    expected: witness[s],
                });
            }
        }
        Ok(witness)
    }

    /// The quantifier-free formulation: regularity, involution and commuting
    /// idempotents for the listed inverse table, all under Kleene equality.
    pub fn verify_inverse_category_equational(&self) -> Result<(), InverseCategoryViolation> {
        self.verify_category().map_err(InverseCategoryViolation::NotACategory)?;
        let inv = self.inv.as_ref().ok_or(InverseCategoryViolation::MissingInverseTable)?;
        for x in self.morphisms() {
            if !self.kleene_eq(self.comp(self.comp(x, inv[x]), x), x) {
                return Err(InverseCategoryViolation::Regularity { x });
            }
        }
        for x in self.morphisms() {
            if !self.kleene_eq(inv[inv[x]], x) {
                return Err(InverseCategoryViolation::Involution { x });
            }
        }
        let projections: Vec<usize> = self.morphisms().map(|x| self.comp(x, inv[x])).collect();
        for x in self.morphisms() {
            for y in self.morphisms() {
                let (ex, ey) = (projections[x], projections[y]);
                if !self.kleene_eq(self.comp(ex, ey), self.comp(ey, ex)) {
                    return Err(InverseCategoryViolation::IdempotentsCommute { x, y });
                }
            }
        }
        Ok(())
    }

    /// `X ≅ dom(X)`. `★` counts as an object.
    pub fn is_object(&self, x: usize) -> bool {
        self.kleene_eq(x, self.dom(x))
    }

    /// Existing objects, in index order.
    pub fn objects(&self) -> Vec<usize> {
        self.existing().filter(|&x| self.is_object(x)).collect()
    }

    fn require_object(&self, x: usize) -> Result<()> {
        if x >= self.count {
            return Err(Error::input(format!("morphism {x} is outside 0..{}", self.count)));
        }
        if !self.is_object(x) {
            return Err(Error::input(format!("morphism {x} is not an object")));
        }
        Ok(())
    }

    #[inline]
    pub fn in_homset(&self, m: usize, x: usize, y: usize) -> bool {
        self.kleene_eq(self.dom(m), x) && self.kleene_eq(self.cod(m), y)
    }

    pub fn homset(&self, x: usize, y: usize) -> Result<Vec<usize>> {
        self.require_object(x)?;
        self.require_object(y)?;
        Ok(self.morphisms().filter(|&m| self.in_homset(m, x, y)).collect())
    }

    pub fn endoset(&self, x: usize) -> Result<Vec<usize>> {
        self.homset(x, x)
    }

    /// `e · e ≅ e`
    pub fn is_idempotent(&self, e: usize) -> bool {
        self.kleene_eq(self.comp(e, e), e)
    }

    fn same_homset(&self, s: usize, t: usize) -> bool {
        self.kleene_eq(self.dom(s), self.dom(t)) && self.kleene_eq(self.cod(s), self.cod(t))
    }

    /// `s ≤ t` iff `s ≅ t · e` for an idempotent `e` in the endoset of the domain.
    pub fn natural_leq_cat(&self, s: usize, t: usize) -> Result<bool> {
        if s >= self.count || t >= self.count {
            return Err(Error::input("morphism index out of range"));
        }
        if !self.same_homset(s, t) {
            return Err(Error::input(format!("{s} and {t} lie in different homsets")));
        }
        Ok(self.leq(s, t))
    }

    /// As [`natural_leq_cat`](Self::natural_leq_cat), but `false` across homsets.
    pub fn leq(&self, s: usize, t: usize) -> bool {
        if !self.same_homset(s, t) {
            return false;
        }
        let x = self.dom(t);
        self.morphisms()
            .filter(|&e| self.in_homset(e, x, x) && self.is_idempotent(e))
            .any(|e| self.kleene_eq(s, self.comp(t, e)))
    }

    /// The whole natural order as a matrix; `leq(s, t)` is `below[s * n + t]`.
    pub fn natural_order(&self) -> CategoryOrder {
        let n = self.count;
        let idempotents: Vec<usize> = self.morphisms().filter(|&e| self.is_idempotent(e)).collect();
        let mut endo_idempotents: HashMap<usize, Vec<usize>> = HashMap::new();
        for &e in &idempotents {
            if self.kleene_eq(self.dom(e), self.cod(e)) {
                endo_idempotents.entry(self.dom(e)).or_default().push(e);
            }
        }
        let mut below = vec![false; n * n];
        for t in self.morphisms() {
            for &e in endo_idempotents.get(&self.dom(t)).map(Vec::as_slice).unwrap_or(&[]) {
                let s = self.comp(t, e);
                if self.same_homset(s, t) {
                    below[s * n + t] = true;
                }
            }
        }
        CategoryOrder { count: n, below }
    }

    /// `z ∈ End(X)` with `z · p ≅ z ≅ p · z` for every `p ∈ End(X)`.
    pub fn zero_of_endoset(&self, x: usize) -> Result<Option<usize>> {
        let end = self.endoset(x)?;
        Ok(self.zero_among(&end))
    }

    pub(crate) fn zero_among(&self, end: &[usize]) -> Option<usize> {
        end.iter().copied().find(|&z| {
            end.iter()
                .all(|&p| self.kleene_eq(self.comp(z, p), z) && self.kleene_eq(self.comp(p, z), z))
        })
    }

    pub fn has_all_zeros(&self) -> bool {
        self.objects()
            .into_iter()
            .all(|x| matches!(self.zero_of_endoset(x), Ok(Some(_))))
    }

    /// An existing non-zero `a ∈ End(X)` whose only lower bounds are itself and zero.
    pub fn atom_cat(&self, a: usize, x: usize) -> Result<bool> {
        let end = self.endoset(x)?;
        let zero = self
            .zero_among(&end)
            .ok_or_else(|| Error::input(format!("End({x}) has no zero element")))?;
        Ok(self.is_atom_among(a, zero, &end, |s, t| self.leq(s, t)))
    }

    pub(crate) fn is_atom_among(
        &self,
        a: usize,
        zero: usize,
        end: &[usize],
        leq: impl Fn(usize, usize) -> bool,
    ) -> bool {
        self.exists(a)
            && end.contains(&a)
            && !self.kleene_eq(a, zero)
            && end
                .iter()
                .all(|&e| !leq(e, a) || self.kleene_eq(e, a) || self.kleene_eq(e, zero))
    }

    /// Collapses a one-object inverse category to its inverse monoid. Returns the
    /// table and, for each table element, the morphism it came from.
    pub fn one_object_to_semigroup(&self) -> Result<(InverseSemigroupTable, Vec<usize>)> {
        let objects = self.objects();
        let [object] = objects.as_slice() else {
            return Err(Error::input(format!(
                "expected exactly one object, found {}",
                objects.len()
            )));
        };
        let inv = self
            .verify_inverse_category_unique()
            .map_err(|v| Error::input(format!("not an inverse category: {v}")))?;
        let morphisms: Vec<usize> = self.existing().collect();
        let position: HashMap<usize, usize> = morphisms.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let rows = morphisms
            .iter()
            .map(|&f| morphisms.iter().map(|&g| position[&self.comp(f, g)]).collect())
            .collect();
        let table = CayleyTable::new(rows)?;
        let zero = table.find_zero();
        let inv = morphisms.iter().map(|&m| position[&inv[m]]).collect();
        let t = InverseSemigroupTable::new(table, inv, Some(position[object]), zero)?;
        Ok((t, morphisms))
    }

    pub fn to_text(&self) -> String {
        let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let mut out = format!(
            "morphisms {}\nstar {}\ndom {}\ncod {}\ncomp\n",
            self.count,
            self.star,
            join(&self.dom),
            join(&self.cod)
        );
        for row in self.comp.chunks(self.count) {
            out.push_str(&join(row));
            out.push('\n');
        }
        if let Some(inv) = &self.inv {
            out.push_str(&format!("inv {}\n", join(inv)));
        }
        out
    }
}

/// Precomputed natural partial order of a category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryOrder {
    count: usize,
    below: Vec<bool>,
}

impl CategoryOrder {
    #[inline]
    pub fn leq(&self, s: usize, t: usize) -> bool {
        self.below[s * self.count + t]
    }
}

/// Contents of a category-table file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryFile {
    pub category: FreeCategory,
    pub members: Option<Vec<usize>>,
}

/// Parses
///
/// ```text
/// morphisms n
/// star k
/// dom d0 .. d(n-1)
/// cod c0 .. c(n-1)
/// comp
/// <n rows of n indices>
/// inv i0 .. i(n-1)     # optional
/// members m ..         # optional, categorical-modeloid files
/// ```
pub fn parse_category(text: &str) -> Result<CategoryFile> {
    let mut lines = Lines::new(text);
    let mut expect = |keyword: &str| {
        let line = lines
            .next_line()
            .ok_or_else(|| Error::parse(1, 1, format!("unexpected end of input, expected `{keyword}`")))?;
        if line.keyword() != keyword {
            return Err(line.error(format!("expected `{keyword}`, found `{}`", line.keyword())));
        }
        Ok(line)
    };
    let head = expect("morphisms")?;
    head.expect_words(2)?;
    let n = head.number_at(1)?;
    if n == 0 {
        return Err(head.error("a category needs at least the star morphism"));
    }
    let check_range = |line: &crate::text::Line<'_>, values: &[usize], offset: usize| -> Result<()> {
        match values.iter().position(|&v| v >= n) {
            Some(k) => Err(line.error_at(
                line.column_of_word(k + offset),
                format!("{} is outside 0..{n}", values[k]),
            )),
            None => Ok(()),
        }
    };
    let star_line = expect("star")?;
    star_line.expect_words(2)?;
    let star = star_line.number_at(1)?;
    check_range(&star_line, &[star], 1)?;
    let mut vector = |keyword: &str| -> Result<Vec<usize>> {
        let line = expect(keyword)?;
        line.expect_words(n + 1)?;
        let values = line.numbers_from(1)?;
        check_range(&line, &values, 1)?;
        Ok(values)
    };
    let dom = vector("dom")?;
    let cod = vector("cod")?;
    expect("comp")?.expect_words(1)?;
    let mut comp = Vec::with_capacity(n);
    for i in 0..n {
        let line = lines
            .next_line()
            .ok_or_else(|| Error::parse(1, 1, format!("expected {n} comp rows, found {i}")))?;
        if line.word_count() != n {
            return Err(line.error(format!("row has {} entries, expected {n}", line.word_count())));
        }
        let row = line.numbers_from(0)?;
        check_range(&line, &row, 0)?;
        comp.push(row);
    }
    let mut inv = None;
    let mut members = None;
    while let Some(line) = lines.next_line() {
        match line.keyword() {
            "inv" => {
                line.expect_words(n + 1)?;
                let values = line.numbers_from(1)?;
                check_range(&line, &values, 1)?;
                inv = Some(values);
            }
            "members" => {
                let values = line.numbers_from(1)?;
                check_range(&line, &values, 1)?;
                members = Some(values);
            }
            other => return Err(line.error(format!("unexpected keyword `{other}`"))),
        }
    }
    Ok(CategoryFile {
        category: FreeCategory::new(star, dom, cod, comp, inv)?,
        members,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invsemi::PartialBijectionTable;
    use crate::pbij::{enumerate_all, Carrier};

    fn z2() -> FreeCategory {
        let t = CayleyTable::from_fn(2, |x, y| (x + y) % 2).unwrap();
        FreeCategory::from_monoid(&t, Some(&[0, 1])).unwrap()
    }

    /// Left-zero semigroup {a, b} with an identity adjoined.
    fn left_zero_monoid() -> FreeCategory {
        let t = CayleyTable::from_fn(2, |x, _| x).unwrap().adjoin_identity();
        FreeCategory::from_monoid(&t, None).unwrap()
    }

    /// Two objects X (0) and Y (1) with an isomorphism f: X → Y (2) and its inverse (3).
    fn two_object_iso() -> FreeCategory {
        let s = 4;
        let dom = vec![0, 1, 0, 1, s];
        let cod = vec![0, 1, 1, 0, s];
        let comp = vec![
            vec![0, s, s, 3, s],
            vec![s, 1, 2, s, s],
            vec![2, s, s, 1, s],
            vec![s, 3, 0, s, s],
            vec![s, s, s, s, s],
        ];
        FreeCategory::new(s, dom, cod, comp, Some(vec![0, 1, 3, 2, s])).unwrap()
    }

    #[test]
    fn kleene_equality() {
        let c = z2();
        let s = c.star();
        assert!(c.kleene_eq(s, s));
        assert!(!c.kleene_eq(s, 0));
        assert!(c.kleene_eq(1, 1));
        assert!(!c.kleene_eq(0, 1));
    }

    #[test]
    fn monoids_are_categories() {
        assert_eq!(z2().verify_category(), Ok(()));
        assert_eq!(two_object_iso().verify_category(), Ok(()));
        let full = PartialBijectionTable::from_partial_bijections(enumerate_all(Carrier::new(2).unwrap(), 6).unwrap())
            .unwrap();
        let c = FreeCategory::from_inverse_monoid(&full.table).unwrap();
        assert_eq!(c.verify_category(), Ok(()));
        assert!(c.verify_inverse_category_unique().is_ok());
        assert_eq!(c.verify_inverse_category_equational(), Ok(()));
    }

    #[test]
    fn making_a_non_composable_pair_exist_is_caught() {
        let mut c = two_object_iso();
        c.set_comp(2, 2, 2);
        assert_eq!(
            c.verify_category(),
            Err(CategoryViolation::Composability { f: 2, g: 2 })
        );
    }

    #[test]
    fn group_inverse_is_recovered() {
        let c = z2();
        assert_eq!(c.verify_inverse_category_unique(), Ok(vec![0, 1, 2]));
        assert_eq!(c.verify_inverse_category_equational(), Ok(()));
    }

    #[test]
    fn left_zero_fails_uniqueness() {
        let c = left_zero_monoid();
        assert_eq!(c.verify_category(), Ok(()));
        assert!(matches!(
            c.verify_inverse_category_unique(),
            Err(InverseCategoryViolation::NotUnique { s: 0, .. })
        ));
        let c = c.with_inverse(vec![0, 1, 2, 3]).unwrap();
        assert!(c.verify_inverse_category_equational().is_err());
    }

    #[test]
    fn wrong_inverse_table_fails_both() {
        let mut c = two_object_iso();
        c.set_inv(2, 2);
        assert!(c.verify_inverse_category_unique().is_err());
        assert!(c.verify_inverse_category_equational().is_err());
    }

    #[test]
    fn homsets_and_objects() {
        let c = two_object_iso();
        assert_eq!(c.objects(), vec![0, 1]);
        assert_eq!(c.homset(0, 1).unwrap(), vec![2]);
        assert_eq!(c.endoset(c.star()).unwrap(), vec![c.star()]);
        assert!(c.homset(2, 0).is_err());
        let g = z2();
        assert_eq!(g.endoset(0).unwrap(), vec![0, 1]);
    }

    #[test]
    fn order_examples() {
        let c = two_object_iso();
        assert!(c.natural_leq_cat(2, 2).unwrap());
        assert!(c.natural_leq_cat(c.star(), c.star()).unwrap());
        assert!(c.natural_leq_cat(2, 3).is_err());
        let order = c.natural_order();
        for s in c.morphisms() {
            for t in c.morphisms() {
                assert_eq!(order.leq(s, t), c.leq(s, t), "({s}, {t})");
            }
        }
    }

    #[test]
    fn zeros_and_atoms() {
        let c = two_object_iso();
        // End(X) = {X} has X as its own zero, so nothing there is an atom.
        assert_eq!(c.zero_of_endoset(0).unwrap(), Some(0));
        assert!(!c.atom_cat(0, 0).unwrap());
        assert_eq!(c.zero_of_endoset(c.star()).unwrap(), Some(c.star()));
        assert!(!c.atom_cat(c.star(), c.star()).unwrap());
        assert!(c.has_all_zeros());
        assert!(z2().atom_cat(0, 0).is_err());
    }

    #[test]
    fn one_object_round_trip() {
        let full = PartialBijectionTable::from_partial_bijections(enumerate_all(Carrier::new(2).unwrap(), 6).unwrap())
            .unwrap();
        let c = FreeCategory::from_inverse_monoid(&full.table).unwrap();
        let (t, morphisms) = c.one_object_to_semigroup().unwrap();
        assert_eq!(morphisms, (0..7).collect::<Vec<_>>());
        assert_eq!(t.table(), full.table.table());
        assert_eq!(t.inverse_map(), full.table.inverse_map());
        assert!(t.characterize().unwrap().agree());
        assert!(two_object_iso().one_object_to_semigroup().is_err());
    }

    #[test]
    fn text_round_trip() {
        let c = two_object_iso();
        let parsed = parse_category(&c.to_text()).unwrap();
        assert_eq!(parsed.category, c);
        assert_eq!(parsed.members, None);
    }

    #[test]
    fn parse_rejects_out_of_range() {
        let err = parse_category("morphisms 2\nstar 1\ndom 0 1\ncod 0 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, column: 7, .. }), "{err}");
    }
}
