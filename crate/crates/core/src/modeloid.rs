//! Modeloids on F(Σ): sets of partial bijections closed under composition, inverse and
//! restriction that contain the identity, together with their derivative.

use std::collections::BTreeSet;
use std::fmt;

use crate::chain::{iterate, DerivativeChain};
use crate::error::{Error, Result};
use crate::pbij::{enumerate_all, Carrier, PartialBijection};
use crate::text::{Line, Lines};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Modeloid {
    carrier: Carrier,
    members: BTreeSet<PartialBijection>,
}

/// The first modeloid axiom found to fail, with a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModeloidViolation {
    Composition {
        f: PartialBijection,
        g: PartialBijection,
    },
    Inverse {
        f: PartialBijection,
    },
    /// `missing` is a restriction of `f` that is not a member.
    Restriction {
        f: PartialBijection,
        missing: PartialBijection,
    },
    Identity,
}

impl ModeloidViolation {
    pub fn axiom(&self) -> u8 {
        match self {
            ModeloidViolation::Composition { .. } => 1,
            ModeloidViolation::Inverse { .. } => 2,
            ModeloidViolation::Restriction { .. } => 3,
            ModeloidViolation::Identity => 4,
        }
    }
}

impl fmt::Display for ModeloidViolation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeloidViolation::Composition { f, g } => {
                write!(out, "axiom 1 (composition): {f} o {g} is not a member")
            }
            ModeloidViolation::Inverse { f } => {
                write!(out, "axiom 2 (inverse): inverse of {f} is not a member")
            }
            ModeloidViolation::Restriction { f, missing } => {
                write!(
                    out,
                    "axiom 3 (restriction): {missing} restricts {f} but is not a member"
                )
            }
            ModeloidViolation::Identity => {
                write!(out, "axiom 4 (identity): identity is not a member")
            }
        }
    }
}

impl Modeloid {
    pub fn new(carrier: Carrier, members: impl IntoIterator<Item = PartialBijection>) -> Result<Self> {
        let members: BTreeSet<PartialBijection> = members.into_iter().collect();
        if let Some(f) = members.iter().find(|f| f.carrier() != carrier) {
            return Err(Error::input(format!("{f} is not over carrier {carrier}")));
        }
        Ok(Modeloid { carrier, members })
    }

    /// F(Σ) itself.
    pub fn full(carrier: Carrier, max_carrier: usize) -> Result<Self> {
        Ok(Modeloid {
            carrier,
            members: enumerate_all(carrier, max_carrier)?.into_iter().collect(),
        })
    }

    /// Smallest modeloid containing `seed`.
    pub fn closure(carrier: Carrier, seed: impl IntoIterator<Item = PartialBijection>) -> Result<Self> {
        let mut pending: Vec<PartialBijection> = seed.into_iter().collect();
        if let Some(f) = pending.iter().find(|f| f.carrier() != carrier) {
            return Err(Error::input(format!("{f} is not over carrier {carrier}")));
        }
        pending.push(PartialBijection::identity(carrier));
        let mut members: BTreeSet<PartialBijection> = BTreeSet::new();
        while let Some(f) = pending.pop() {
            if members.contains(&f) {
                continue;
            }
            pending.push(f.inverse());
            for x in f.domain() {
                pending.push(f.restrict_where(|y| y != x));
            }
            for g in &members {
                pending.push(f.compose_same(g));
                pending.push(g.compose_same(&f));
            }
            members.insert(f);
        }
        Ok(Modeloid { carrier, members })
    }

    pub fn carrier(&self) -> Carrier {
        self.carrier
    }

    pub fn members(&self) -> &BTreeSet<PartialBijection> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, f: &PartialBijection) -> bool {
        self.members.contains(f)
    }

    pub fn is_subset(&self, other: &Modeloid) -> bool {
        self.members.is_subset(&other.members)
    }

    /// Checks the four modeloid axioms in order and reports the first failure.
    ///
    /// Downward closure is checked on restrictions that drop a single element, which
    /// reaches every restriction by induction.
    pub fn verify(&self) -> Result<(), ModeloidViolation> {
        for f in &self.members {
            for g in &self.members {
                if !self.members.contains(&f.compose_same(g)) {
                    return Err(ModeloidViolation::Composition {
                        f: f.clone(),
                        g: g.clone(),
                    });
                }
            }
        }
        if let Some(f) = self.members.iter().find(|f| !self.members.contains(&f.inverse())) {
            return Err(ModeloidViolation::Inverse { f: f.clone() });
        }
        for f in &self.members {
            for x in f.domain() {
                let missing = f.restrict_where(|y| y != x);
                if !self.members.contains(&missing) {
                    return Err(ModeloidViolation::Restriction { f: f.clone(), missing });
                }
            }
        }
        if !self.members.contains(&PartialBijection::identity(self.carrier)) {
            return Err(ModeloidViolation::Identity);
        }
        Ok(())
    }

    /// Whether `f` extends by every element on both sides within `self`.
    pub fn survives_derivative(&self, f: &PartialBijection) -> bool {
        let forth = self.carrier.elements().all(|a| {
            f.in_domain(a)
                || self
                    .carrier
                    .elements()
                    .any(|b| f.extend(a, b).is_some_and(|g| self.members.contains(&g)))
        });
        forth
            && self.carrier.elements().all(|a| {
                f.in_codomain(a)
                    || self
                        .carrier
                        .elements()
                        .any(|b| f.extend(b, a).is_some_and(|g| self.members.contains(&g)))
            })
    }

    /// The derivative `D(M)`: members that extend by any element on either side.
    pub fn derivative(&self) -> Result<Modeloid> {
        self.verify()
            .map_err(|v| Error::input(format!("derivative requires a modeloid: {v}")))?;
        Ok(self.derivative_unchecked())
    }

    fn derivative_unchecked(&self) -> Modeloid {
        Modeloid {
            carrier: self.carrier,
            members: self
                .members
                .iter()
                .filter(|f| self.survives_derivative(f))
                .cloned()
                .collect(),
        }
    }

    pub fn iterate_derivative(&self, rounds: usize) -> Result<DerivativeChain<Modeloid>> {
        self.verify()
            .map_err(|v| Error::input(format!("derivative requires a modeloid: {v}")))?;
        iterate(self.clone(), rounds, |m| Ok(m.derivative_unchecked()))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("carrier {}\n", self.carrier.size());
        for f in &self.members {
            out.push_str("map");
            for (x, y) in f.pairs() {
                out.push_str(&format!(" ({x},{y})"));
            }
            out.push('\n');
        }
        out
    }
}

/// Parses the modeloid text format:
///
/// ```text
/// carrier 3
/// map (0,1) (1,2)
/// map
/// all          # every partial bijection on the carrier
/// ```
pub fn parse_modeloid(text: &str, max_carrier: usize) -> Result<Modeloid> {
    let mut lines = Lines::new(text);
    let first = lines
        .next_line()
        .ok_or_else(|| Error::parse(1, 1, "expected `carrier n`"))?;
    let carrier = parse_carrier_line(&first)?;
    let mut members = BTreeSet::new();
    while let Some(line) = lines.next_line() {
        match line.keyword() {
            "map" => {
                let pairs = line.tuples_after_keyword()?;
                let mut flat = Vec::with_capacity(pairs.len());
                for (tuple, column) in pairs {
                    if tuple.len() != 2 {
                        return Err(line.error_at(column, "a map entry must be a pair (x,y)"));
                    }
                    flat.push((tuple[0], tuple[1]));
                }
                let f = PartialBijection::new(carrier, flat).map_err(|e| line.error(e))?;
                members.insert(f);
            }
            "all" => {
                line.expect_words(1)?;
                members.extend(enumerate_all(carrier, max_carrier)?);
            }
            other => return Err(line.error(format!("unexpected keyword `{other}`"))),
        }
    }
    Modeloid::new(carrier, members)
}

fn parse_carrier_line(line: &Line<'_>) -> Result<Carrier> {
    if line.keyword() != "carrier" {
        return Err(line.error("expected `carrier n`"));
    }
    line.expect_words(2)?;
    let n = line.number_at(1)?;
    Carrier::new(n).map_err(|e| line.error(e))
}
