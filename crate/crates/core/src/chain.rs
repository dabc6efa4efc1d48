use crate::error::Result;

/// The iterates `D⁰(M), .., D^m(M)` of a derivative operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivativeChain<T> {
    pub terms: Vec<T>,
    /// Smallest `k < m` with `D^{k+1} = D^k`, if the chain reached a fixed point.
    pub stabilized_at: Option<usize>,
}

impl<T> DerivativeChain<T> {
    pub fn last(&self) -> &T {
        self.terms.last().expect("chain always holds D⁰")
    }

    pub fn rounds(&self) -> usize {
        self.terms.len() - 1
    }
}

/// Applies `step` `rounds` times starting from `start`. Once a fixed point is seen the
/// remaining terms are copies of it.
pub(crate) fn iterate<T: Clone + PartialEq>(
    start: T,
    rounds: usize,
    mut step: impl FnMut(&T) -> Result<T>,
) -> Result<DerivativeChain<T>> {
    let mut terms = Vec::with_capacity(rounds + 1);
    terms.push(start);
    let mut stabilized_at = None;
    for k in 0..rounds {
        let next = match stabilized_at {
            Some(_) => terms[k].clone(),
            None => step(&terms[k])?,
        };
        if stabilized_at.is_none() && next == terms[k] {
            stabilized_at = Some(k);
        }
        terms.push(next);
    }
    Ok(DerivativeChain { terms, stabilized_at })
}
