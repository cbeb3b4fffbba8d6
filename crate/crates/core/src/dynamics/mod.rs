//! Mass-action systems and the polynomial fields they generate.

mod equivalence;
mod realize;
mod relative;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Signed};

use crate::linalg::Q;
use crate::network::text::{parse_with_rates, print_network};
use crate::network::{Complex, NetworkError, Reaction, ReactionNetwork};
use crate::poly::{Exponent, Monomial, PolynomialField, SparsePolynomial};

pub use equivalence::{dynamically_equivalent, split_reaction, EquivalenceReport, VertexResidual};
pub use realize::{wr_realize, Realization, SplitStep, WrBudget};
pub use relative::{homogeneous_degree, projectivize_field, relative_network, Homogeneity};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("{expected} rates given for {found} reactions")]
    RateCount { expected: usize, found: usize },
    #[error("rate constants must be positive")]
    NonPositiveRate,
    #[error("variable rate bound must satisfy 0 < epsilon <= 1")]
    BadEpsilon,
    #[error("operation needs constant rates")]
    VariableRates,
    #[error("parallel reactions with variable rates cannot be merged: {0}")]
    VariableMerge(String),
    #[error("reaction {0} is not of the form Xi + Xj -> Xi + Xj + Xl")]
    NotBimolecular(String),
    #[error("not a mass-action field: x{component} does not divide negative term {monomial}")]
    NotMassAction { component: usize, monomial: String },
    #[error("field is not homogeneous")]
    Inhomogeneous,
    #[error("field has degree {found}, expected {expected}")]
    DegreeMismatch { expected: u32, found: u32 },
    #[error("systems have different species lists")]
    SpeciesMismatch,
    #[error("invalid split: {0}")]
    InvalidSplit(String),
}

/// Rate of one reaction: a positive constant, or a bounded time-varying
/// profile with `epsilon <= k(t) <= 1/epsilon`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RateSpec {
    Constant(Q),
    Variable { profile: u64, epsilon: Q },
}

impl RateSpec {
    pub fn unit() -> Self {
        RateSpec::Constant(Q::one())
    }

    pub fn constant(&self) -> Option<&Q> {
        match self {
            RateSpec::Constant(k) => Some(k),
            RateSpec::Variable { .. } => None,
        }
    }

    fn validate(&self) -> Result<(), DynamicsError> {
        match self {
            RateSpec::Constant(k) if !k.is_positive() => Err(DynamicsError::NonPositiveRate),
            RateSpec::Variable { epsilon, .. } if !epsilon.is_positive() || *epsilon > Q::one() => {
                Err(DynamicsError::BadEpsilon)
            }
            _ => Ok(()),
        }
    }
}

/// A reaction network with one rate per reaction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MassActionSystem {
    network: ReactionNetwork,
    rates: Vec<RateSpec>,
}

impl MassActionSystem {
    pub fn new(network: ReactionNetwork, rates: Vec<RateSpec>) -> Result<Self, DynamicsError> {
        if rates.len() != network.len() {
            return Err(DynamicsError::RateCount {
                expected: network.len(),
                found: rates.len(),
            });
        }
        for r in &rates {
            r.validate()?;
        }
        Ok(MassActionSystem { network, rates })
    }

    /// All rates equal to one.
    pub fn unit_rates(network: ReactionNetwork) -> Self {
        let rates = alloc::vec![RateSpec::unit(); network.len()];
        MassActionSystem { network, rates }
    }

    pub fn with_constant_rates(network: ReactionNetwork, rates: Vec<Q>) -> Result<Self, DynamicsError> {
        Self::new(network, rates.into_iter().map(RateSpec::Constant).collect())
    }

    /// Builds a system from possibly parallel reactions; constant rates of
    /// parallel reactions are summed and their labels joined with `+`.
    pub fn from_reactions<S: Into<String>>(
        species: impl IntoIterator<Item = S>,
        items: Vec<(Reaction, RateSpec)>,
    ) -> Result<Self, DynamicsError> {
        let mut order: Vec<(Complex, Complex)> = Vec::new();
        let mut merged: BTreeMap<(Complex, Complex), (Option<String>, RateSpec)> = BTreeMap::new();
        for (r, rate) in items {
            rate.validate()?;
            let key = (r.source.clone(), r.target.clone());
            match merged.get_mut(&key) {
                None => {
                    order.push(key.clone());
                    merged.insert(key, (r.label, rate));
                }
                Some((label, existing)) => {
                    match (existing.constant(), rate.constant()) {
                        (Some(a), Some(b)) => *existing = RateSpec::Constant(a + b),
                        _ => return Err(DynamicsError::VariableMerge(format!("{:?}", r.source.coeffs()))),
                    }
                    *label = match (label.take(), r.label) {
                        (Some(a), Some(b)) if a != b => Some(format!("{a}+{b}")),
                        (a, b) => a.or(b),
                    };
                }
            }
        }
        let mut reactions = Vec::with_capacity(order.len());
        let mut rates = Vec::with_capacity(order.len());
        for key in order {
            let (label, rate) = merged.remove(&key).expect("recorded key");
            reactions.push(Reaction {
                source: key.0,
                target: key.1,
                label,
            });
            rates.push(rate);
        }
        let network = ReactionNetwork::new(species, reactions)?;
        Self::new(network, rates)
    }

    /// Reads the reaction-language text; reactions without `k=` get rate 1.
    pub fn parse(text: &str) -> Result<Self, DynamicsError> {
        let parsed = parse_with_rates(text)?;
        let rates = parsed
            .rates
            .into_iter()
            .map(|k| RateSpec::Constant(k.unwrap_or_else(Q::one)))
            .collect();
        Self::new(parsed.network, rates)
    }

    /// Canonical text with explicit rates. Variable rates are not
    /// representable and yield an error.
    pub fn to_text(&self) -> Result<String, DynamicsError> {
        let rates = self.constant_rates()?;
        Ok(print_network(&self.network, Some(&rates)))
    }

    pub fn network(&self) -> &ReactionNetwork {
        &self.network
    }

    pub fn rates(&self) -> &[RateSpec] {
        &self.rates
    }

    pub fn species_count(&self) -> usize {
        self.network.species_count()
    }

    pub fn len(&self) -> usize {
        self.network.len()
    }

    pub fn is_empty(&self) -> bool {
        self.network.is_empty()
    }

    pub fn constant_rates(&self) -> Result<Vec<Q>, DynamicsError> {
        self.rates
            .iter()
            .map(|r| r.constant().cloned().ok_or(DynamicsError::VariableRates))
            .collect()
    }

    /// `(reaction, rate)` pairs, for rebuilding with [`Self::from_reactions`].
    pub fn items(&self) -> Vec<(Reaction, RateSpec)> {
        self.network
            .reactions()
            .iter()
            .cloned()
            .zip(self.rates.iter().cloned())
            .collect()
    }

    /// Same system with reactions sorted by `(source, target)`.
    pub fn sorted(&self) -> Self {
        let mut items = self.items();
        items.sort_by(|a, b| a.0.cmp(&b.0));
        let (reactions, rates) = items.into_iter().unzip();
        MassActionSystem {
            network: ReactionNetwork::new(self.network.species_names(), reactions).expect("reordering keeps validity"),
            rates,
        }
    }
}

/// `f(x) = sum k x^s (s' - s)` over all reactions.
pub fn mass_action_field(sys: &MassActionSystem) -> Result<PolynomialField, DynamicsError> {
    let rates = sys.constant_rates()?;
    let n = sys.species_count();
    let mut field = PolynomialField::zero(n);
    for (r, k) in sys.network().reactions().iter().zip(&rates) {
        let e = Exponent(r.source.coeffs().to_vec());
        for (i, &v) in r.vector().iter().enumerate() {
            if v != 0 {
                field.component_mut(i).add_term(e.clone(), k * Q::from_integer(v.into()));
            }
        }
    }
    Ok(field)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MassActionCheck {
    pub holds: bool,
    /// First offending `(component, monomial)`, 0-based.
    pub witness: Option<(usize, Monomial)>,
}

/// A field is mass-action iff `x_i` divides every negative monomial of `f_i`.
pub fn is_mass_action_field(f: &PolynomialField) -> MassActionCheck {
    for (i, p) in f.components().iter().enumerate() {
        for m in p.monomials() {
            if m.coeff.is_negative() && m.exponent.0[i] == 0 {
                return MassActionCheck {
                    holds: false,
                    witness: Some((i, m)),
                };
            }
        }
    }
    MassActionCheck {
        holds: true,
        witness: None,
    }
}

/// Canonical realization: each term `c x^a` of `f_i` becomes the reaction
/// `a -> a + e_i` (rate `c`) or `a -> a - e_i` (rate `-c`).
pub fn realize_field(f: &PolynomialField) -> Result<MassActionSystem, DynamicsError> {
    let check = is_mass_action_field(f);
    if let Some((component, m)) = check.witness {
        let names: Vec<String> = (1..=f.dim()).map(|i| format!("x{i}")).collect();
        let mono = SparsePolynomial::monomial(f.dim(), m.coeff, m.exponent);
        return Err(DynamicsError::NotMassAction {
            component: component + 1,
            monomial: format!("{}", mono.display(&names)),
        });
    }
    let n = f.dim();
    let mut items = Vec::new();
    for (i, p) in f.components().iter().enumerate() {
        for (e, c) in p.terms() {
            let source = Complex::new(e.0.clone());
            let mut delta = alloc::vec![0i64; n];
            delta[i] = if c.is_positive() { 1 } else { -1 };
            let target = source.offset(&delta).expect("divisibility checked");
            items.push((Reaction::new(source, target), RateSpec::Constant(c.abs())));
        }
    }
    items.sort_by(|a, b| a.0.cmp(&b.0));
    MassActionSystem::from_reactions((0..n).map(crate::network::Species::default_name), items)
}
