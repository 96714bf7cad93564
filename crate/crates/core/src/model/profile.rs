use serde::Serialize;

use super::bundle::Bundle;
use super::valuation::Valuation;
use crate::error::{Error, Result};

/// One valuation per agent, all over the same goods.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    valuations: Vec<Valuation>,
}

impl Profile {
    pub fn new(valuations: Vec<Valuation>) -> Result<Self> {
        if valuations.len() < 2 {
            return Err(Error::Malformed(format!(
                "a profile needs at least two agents, got {}",
                valuations.len()
            )));
        }
        let m = valuations[0].m();
        if let Some(i) = valuations.iter().position(|v| v.m() != m) {
            return Err(Error::Malformed(format!(
                "agent {i} values {} goods, agent 0 values {m}",
                valuations[i].m()
            )));
        }
        Ok(Profile { valuations })
    }

    pub fn n(&self) -> usize {
        self.valuations.len()
    }

    pub fn m(&self) -> usize {
        self.valuations[0].m()
    }

    pub fn valuation(&self, agent: usize) -> &Valuation {
        &self.valuations[agent]
    }

    pub fn valuations(&self) -> &[Valuation] {
        &self.valuations
    }

    pub fn into_valuations(self) -> Vec<Valuation> {
        self.valuations
    }

    /// Profile whose agent `p` is agent `order[p]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Profile {
        Profile {
            valuations: order.iter().map(|&a| self.valuations[a].clone()).collect(),
        }
    }
}

/// An ordered partition of the goods into one (possibly empty) bundle per agent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Allocation {
    bundles: Vec<Bundle>,
}

impl Allocation {
    /// Validates that the bundles are pairwise disjoint and cover `0..m`.
    pub fn new(bundles: Vec<Bundle>, m: usize) -> Result<Self> {
        let full = Bundle::full(m);
        let mut seen = Bundle::EMPTY;
        for (i, b) in bundles.iter().enumerate() {
            if !b.fits(m) {
                return Err(Error::Structural(format!(
                    "bundle of agent {i} holds goods outside 0..{m}: {b}"
                )));
            }
            let overlap = seen.intersection(*b);
            if !overlap.is_empty() {
                return Err(Error::Structural(format!(
                    "goods {overlap} assigned more than once (again to agent {i})"
                )));
            }
            seen = seen.union(*b);
        }
        if seen != full {
            return Err(Error::Structural(format!(
                "goods {} are not assigned",
                full.difference(seen)
            )));
        }
        Ok(Allocation { bundles })
    }

    /// Allocation from a good-to-agent assignment (`owner[g]` holds good `g`).
    pub fn from_assignment(owner: &[usize], n: usize) -> Result<Self> {
        let mut bundles = vec![Bundle::EMPTY; n];
        for (g, &a) in owner.iter().enumerate() {
            if a >= n {
                return Err(Error::Structural(format!(
                    "good {g} assigned to agent {a}, but there are {n} agents"
                )));
            }
            bundles[a] = bundles[a].with(g);
        }
        Allocation::new(bundles, owner.len())
    }

    pub fn n(&self) -> usize {
        self.bundles.len()
    }

    pub fn bundle(&self, agent: usize) -> Bundle {
        self.bundles[agent]
    }

    pub fn bundles(&self) -> &[Bundle] {
        &self.bundles
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.bundles.iter().map(|b| b.len()).collect()
    }

    pub fn max_size(&self) -> usize {
        self.bundles.iter().map(|b| b.len()).max().unwrap_or(0)
    }

    /// Checks that this allocation fits a profile (agent count and goods).
    pub fn validate_for(&self, profile: &Profile) -> Result<()> {
        if self.n() != profile.n() {
            return Err(Error::Structural(format!(
                "allocation has {} bundles for {} agents",
                self.n(),
                profile.n()
            )));
        }
        Allocation::new(self.bundles.clone(), profile.m()).map(|_| ())
    }

    /// Allocation in agent space given bundles in role space (`order[p]` is the agent
    /// playing role `p`).
    pub(crate) fn from_roles(role_bundles: &[Bundle], order: &[usize], m: usize) -> Result<Self> {
        let mut bundles = vec![Bundle::EMPTY; order.len()];
        for (p, &a) in order.iter().enumerate() {
            bundles[a] = role_bundles[p];
        }
        Allocation::new(bundles, m)
            .map_err(|e| Error::Internal(format!("constructed allocation is invalid: {e}")))
    }
}
