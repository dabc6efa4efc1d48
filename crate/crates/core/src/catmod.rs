//! Categorical modeloids: subsets of a finite inverse category with all endoset zeros,
//! closed under composition and inverses, downward closed under the natural order and
//! containing every object.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::chain::{iterate, DerivativeChain};
use crate::error::{Error, Result};
use crate::freecat::{CategoryOrder, FreeCategory};
use crate::invsemi::{CayleyTable, InverseSemigroupTable, Semimodeloid};

/// An inverse category with all zeros, with its inverse table filled in and its
/// natural order precomputed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifiedCategory {
    category: FreeCategory,
    inv: Vec<usize>,
    order: CategoryOrder,
    objects: Vec<usize>,
}

impl VerifiedCategory {
    pub fn new(category: FreeCategory) -> Result<Self> {
        let inv = category
            .verify_inverse_category_unique()
            .map_err(|v| Error::input(format!("ambient is not an inverse category: {v}")))?;
        if let Some(x) = category
            .objects()
            .into_iter()
            .find(|&x| !matches!(category.zero_of_endoset(x), Ok(Some(_))))
        {
            return Err(Error::input(format!("End({x}) has no zero element")));
        }
        Ok(Self::new_unchecked(category, inv))
    }

    /// For categories that are inverse categories with zeros by construction.
    pub(crate) fn new_unchecked(category: FreeCategory, inv: Vec<usize>) -> Self {
        let order = category.natural_order();
        let objects = category.objects();
        VerifiedCategory {
            category,
            inv,
            order,
            objects,
        }
    }

    pub fn category(&self) -> &FreeCategory {
        &self.category
    }

    pub fn inv(&self, m: usize) -> usize {
        self.inv[m]
    }

    pub fn leq(&self, s: usize, t: usize) -> bool {
        self.order.leq(s, t)
    }

    /// Existing objects.
    pub fn objects(&self) -> &[usize] {
        &self.objects
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CategoricalModeloidViolation {
    Composition { f: usize, g: usize },
    Inverse { f: usize },
    Downward { below: usize, above: usize },
    Object { x: usize },
}

impl CategoricalModeloidViolation {
    pub fn axiom(&self) -> u8 {
        match self {
            CategoricalModeloidViolation::Composition { .. } => 1,
            CategoricalModeloidViolation::Inverse { .. } => 2,
            CategoricalModeloidViolation::Downward { .. } => 3,
            CategoricalModeloidViolation::Object { .. } => 4,
        }
    }
}

impl fmt::Display for CategoricalModeloidViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CategoricalModeloidViolation::Composition { f: a, g } => {
                write!(f, "axiom 1 (composition): {a}.{g} is not a member")
            }
            CategoricalModeloidViolation::Inverse { f: a } => {
                write!(f, "axiom 2 (inverse): inverse of {a} is not a member")
            }
            CategoricalModeloidViolation::Downward { below, above } => {
                write!(f, "axiom 3 (downward): {below} <= {above} but {below} is not a member")
            }
            CategoricalModeloidViolation::Object { x } => {
                write!(f, "axiom 4 (objects): object {x} is not a member")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct CategoricalModeloid {
    ambient: Arc<VerifiedCategory>,
    members: BTreeSet<usize>,
}

impl PartialEq for CategoricalModeloid {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members && (Arc::ptr_eq(&self.ambient, &other.ambient) || self.ambient == other.ambient)
    }
}

impl Eq for CategoricalModeloid {}

impl CategoricalModeloid {
    pub fn new(ambient: Arc<VerifiedCategory>, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let n = ambient.category.morphism_count();
        let members: BTreeSet<usize> = members.into_iter().collect();
        if let Some(&m) = members.iter().find(|&&m| m >= n) {
            return Err(Error::input(format!("member {m} is outside 0..{n}")));
        }
        Ok(CategoricalModeloid { ambient, members })
    }

    /// Every morphism of the ambient, `★` included.
    pub fn whole(ambient: Arc<VerifiedCategory>) -> Self {
        let members = ambient.category.morphisms().collect();
        CategoricalModeloid { ambient, members }
    }

    /// A semimodeloid viewed as a categorical modeloid on its one-object ambient.
    pub fn from_semimodeloid(s: &Semimodeloid) -> Result<Self> {
        let category = FreeCategory::from_inverse_monoid(s.ambient())?;
        let ambient = Arc::new(VerifiedCategory::new(category)?);
        Self::new(ambient, s.members().iter().copied())
    }

    pub fn ambient(&self) -> &Arc<VerifiedCategory> {
        &self.ambient
    }

    pub fn members(&self) -> &BTreeSet<usize> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, m: usize) -> bool {
        self.members.contains(&m)
    }

    pub fn is_subset(&self, other: &CategoricalModeloid) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn verify(&self) -> Result<(), CategoricalModeloidViolation> {
        let c = &self.ambient.category;
        for &f in &self.members {
            for &g in &self.members {
                if !self.contains(c.comp(f, g)) {
                    return Err(CategoricalModeloidViolation::Composition { f, g });
                }
            }
        }
        for &f in &self.members {
            if !self.contains(self.ambient.inv(f)) {
                return Err(CategoricalModeloidViolation::Inverse { f });
            }
        }
        for &above in &self.members {
            if let Some(below) = c.morphisms().find(|&b| !self.contains(b) && self.ambient.leq(b, above)) {
                return Err(CategoricalModeloidViolation::Downward { below, above });
            }
        }
        if let Some(&x) = self.ambient.objects().iter().find(|&&x| !self.contains(x)) {
            return Err(CategoricalModeloidViolation::Object { x });
        }
        Ok(())
    }

    /// Objects of the ambient that are members, `★` included when present.
    pub fn objects(&self) -> Vec<usize> {
        let c = &self.ambient.category;
        self.members.iter().copied().filter(|&x| c.is_object(x)).collect()
    }

    pub fn homset(&self, x: usize, y: usize) -> Vec<usize> {
        let c = &self.ambient.category;
        self.members.iter().copied().filter(|&m| c.in_homset(m, x, y)).collect()
    }

    pub fn endoset(&self, x: usize) -> Vec<usize> {
        self.homset(x, x)
    }

    /// Idempotent atoms of `End_M(X)`, with order and zero taken within the members.
    pub fn idempotent_atoms(&self, x: usize) -> Result<Vec<usize>> {
        let c = &self.ambient.category;
        let end = self.endoset(x);
        let zero = c
            .zero_among(&end)
            .ok_or_else(|| Error::input(format!("End_M({x}) has no zero element")))?;
        Ok(end
            .iter()
            .copied()
            .filter(|&a| c.is_idempotent(a) && c.is_atom_among(a, zero, &end, |s, t| self.ambient.leq(s, t)))
            .collect())
    }

    fn require_member_object(&self, x: usize) -> Result<()> {
        if !self.contains(x) || !self.ambient.category.is_object(x) {
            return Err(Error::input(format!("{x} is not an object of the modeloid")));
        }
        Ok(())
    }

    fn require_verified(&self) -> Result<()> {
        self.verify()
            .map_err(|v| Error::input(format!("not a categorical modeloid: {v}")))
    }

    /// The surviving part of `Hom_M(X, Y)`.
    pub fn homset_derivative(&self, x: usize, y: usize) -> Result<BTreeSet<usize>> {
        self.require_member_object(x)?;
        self.require_member_object(y)?;
        let atoms_x = self.idempotent_atoms(x)?;
        let atoms_y = self.idempotent_atoms(y)?;
        Ok(self.survivors(&self.homset(x, y), &atoms_x, &atoms_y))
    }

    fn survivors(&self, hom: &[usize], atoms_x: &[usize], atoms_y: &[usize]) -> BTreeSet<usize> {
        let c = &self.ambient.category;
        let leq = |s, t| self.ambient.leq(s, t);
        let inv = |m| self.ambient.inv(m);
        hom.iter()
            .copied()
            .filter(|&f| {
                let above: Vec<usize> = hom.iter().copied().filter(|&h| leq(f, h)).collect();
                atoms_x
                    .iter()
                    .all(|&a| above.iter().any(|&h| leq(a, c.comp(inv(h), h))))
                    && atoms_y
                        .iter()
                        .all(|&b| above.iter().any(|&g| leq(b, c.comp(g, inv(g)))))
            })
            .collect()
    }

    /// Union of the homset derivatives over all pairs of objects of `M`.
    pub fn derivative(&self) -> Result<CategoricalModeloid> {
        self.require_verified()?;
        Ok(self.derivative_unchecked())
    }

    pub(crate) fn derivative_unchecked(&self) -> CategoricalModeloid {
        let c = &self.ambient.category;
        let mut homsets: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for &m in &self.members {
            homsets.entry((c.dom(m), c.cod(m))).or_default().push(m);
        }
        let mut atoms: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut atoms_of = |x: usize| -> Vec<usize> {
            atoms
                .entry(x)
                .or_insert_with(|| self.idempotent_atoms(x).unwrap_or_default())
                .clone()
        };
        let mut members = BTreeSet::new();
        for ((x, y), hom) in &homsets {
            let (ax, ay) = (atoms_of(*x), atoms_of(*y));
            members.extend(self.survivors(hom, &ax, &ay));
        }
        CategoricalModeloid {
            ambient: Arc::clone(&self.ambient),
            members,
        }
    }

    pub fn iterate_derivative(&self, rounds: usize) -> Result<DerivativeChain<CategoricalModeloid>> {
        self.require_verified()?;
        iterate(self.clone(), rounds, |m| Ok(m.derivative_unchecked()))
    }

    /// `End_M(X)` as an inverse monoid with neutral `X` and zero `0_X`, all of it
    /// members. Also returns the morphism behind each table element.
    pub fn endoset_as_semimodeloid(&self, x: usize) -> Result<(Semimodeloid, Vec<usize>)> {
        self.require_member_object(x)?;
        let c = &self.ambient.category;
        let end = self.endoset(x);
        let zero = c
            .zero_among(&end)
            .ok_or_else(|| Error::input(format!("End_M({x}) has no zero element")))?;
        let position = |m: usize| -> Result<usize> {
            end.iter()
                .position(|&e| e == m)
                .ok_or_else(|| Error::input(format!("End_M({x}) is not closed: {m} is missing")))
        };
        let rows = end
            .iter()
            .map(|&f| end.iter().map(|&g| position(c.comp(f, g))).collect())
            .collect::<Result<Vec<Vec<usize>>>>()?;
        let inv = end
            .iter()
            .map(|&m| position(self.ambient.inv(m)))
            .collect::<Result<Vec<usize>>>()?;
        let table =
            InverseSemigroupTable::new(CayleyTable::new(rows)?, inv, Some(position(x)?), Some(position(zero)?))?;
        Ok((Semimodeloid::whole(table)?, end))
    }
}
