//! Reaction networks as Euclidean embedded graphs.
//!
//! A [`ReactionNetwork`] is a species list plus directed edges between
//! [`Complex`]es. Everything here is combinatorial or exact; rates live in
//! [`crate::dynamics::MassActionSystem`].

mod analysis;
mod graph;
pub mod text;

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub use analysis::{
    compatibility_class_contains, compatibility_class_contains_exact, is_bimolecular_autocatalytic,
    property_x_check, species_closure, stoichiometric_subspace, BimolecularReaction, PropertyX,
};
pub(crate) use analysis::stoichiometric_echelon;
pub use graph::{
    is_reversible, is_strongly_connected, is_weakly_reversible, linkage_classes, production_graph,
    strongly_connected_components, ProductionGraph,
};
pub use text::{parse_network, print_network};

/// Errors raised while building or querying networks.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NetworkError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate species name `{0}`")]
    DuplicateSpecies(String),
    #[error("complex has {found} coordinates but the network has {expected} species")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("reaction {0} has identical source and target")]
    SelfLoop(String),
    #[error("duplicate reaction {0}")]
    DuplicateReaction(String),
    #[error("species closure needs a non-empty seed")]
    EmptySeed,
    #[error("species index {index} out of range for {count} species")]
    SpeciesOutOfRange { index: usize, count: usize },
    #[error("reaction {0} is not of the form Xi + Xj -> Xi + Xj + Xl")]
    NotBimolecularAutocatalytic(String),
    #[error("state vectors must be strictly positive with one entry per species")]
    InvalidState,
}

/// A chemical species; identity is by name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Species {
    pub index: usize,
    pub name: String,
}

impl Species {
    pub fn default_name(index: usize) -> String {
        format!("X{}", index + 1)
    }
}

/// A vertex of the E-graph: non-negative integer stoichiometric coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Complex(Vec<u32>);

impl Complex {
    pub fn new(coeffs: Vec<u32>) -> Self {
        Complex(coeffs)
    }

    pub fn zero(species: usize) -> Self {
        Complex(vec![0; species])
    }

    pub fn unit(species: usize, i: usize) -> Self {
        let mut c = vec![0; species];
        c[i] = 1;
        Complex(c)
    }

    /// Builds a complex from `(species index, multiplicity)` terms.
    pub fn from_terms(species: usize, terms: &[(usize, u32)]) -> Self {
        let mut c = vec![0; species];
        for &(i, m) in terms {
            c[i] += m;
        }
        Complex(c)
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Total number of molecules.
    pub fn molecularity(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn to_i64(&self) -> Vec<i64> {
        self.0.iter().map(|&c| i64::from(c)).collect()
    }

    pub fn plus(&self, other: &Complex) -> Complex {
        Complex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn plus_unit(&self, i: usize) -> Complex {
        let mut c = self.0.clone();
        c[i] += 1;
        Complex(c)
    }

    /// `self + delta` if every entry stays non-negative.
    pub fn offset(&self, delta: &[i64]) -> Option<Complex> {
        if delta.len() != self.0.len() {
            return None;
        }
        self.0
            .iter()
            .zip(delta)
            .map(|(&c, &d)| u32::try_from(i64::from(c) + d).ok())
            .collect::<Option<Vec<_>>>()
            .map(Complex)
    }

    pub fn dot(&self, w: &[i64]) -> i64 {
        self.0.iter().zip(w).map(|(&c, &x)| i64::from(c) * x).sum()
    }
}

/// A directed edge `source -> target`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Reaction {
    pub source: Complex,
    pub target: Complex,
    pub label: Option<String>,
}

impl Reaction {
    pub fn new(source: Complex, target: Complex) -> Self {
        Reaction {
            source,
            target,
            label: None,
        }
    }

    pub fn labeled(source: Complex, target: Complex, label: impl Into<String>) -> Self {
        Reaction {
            source,
            target,
            label: Some(label.into()),
        }
    }

    /// Reaction vector `target - source`.
    pub fn vector(&self) -> Vec<i64> {
        self.source
            .0
            .iter()
            .zip(&self.target.0)
            .map(|(&s, &t)| i64::from(t) - i64::from(s))
            .collect()
    }

    pub fn key(&self) -> (&Complex, &Complex) {
        (&self.source, &self.target)
    }
}

/// Species plus directed edges between complexes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReactionNetwork {
    species: Vec<Species>,
    reactions: Vec<Reaction>,
}

impl ReactionNetwork {
    /// Builds a network, rejecting self-loops, duplicate edges and
    /// complexes of the wrong length.
    pub fn new<S: Into<String>>(
        species: impl IntoIterator<Item = S>,
        reactions: Vec<Reaction>,
    ) -> Result<Self, NetworkError> {
        let species: Vec<Species> = species
            .into_iter()
            .enumerate()
            .map(|(index, name)| Species {
                index,
                name: name.into(),
            })
            .collect();
        let mut names = BTreeSet::new();
        for s in &species {
            if !names.insert(s.name.as_str()) {
                return Err(NetworkError::DuplicateSpecies(s.name.clone()));
            }
        }
        let n = species.len();
        let mut net = ReactionNetwork {
            species,
            reactions: Vec::with_capacity(reactions.len()),
        };
        let mut seen = BTreeSet::new();
        for r in reactions {
            for c in [&r.source, &r.target] {
                if c.len() != n {
                    return Err(NetworkError::DimensionMismatch {
                        expected: n,
                        found: c.len(),
                    });
                }
            }
            if r.source == r.target {
                return Err(NetworkError::SelfLoop(net.format_reaction(&r)));
            }
            if !seen.insert((r.source.clone(), r.target.clone())) {
                return Err(NetworkError::DuplicateReaction(net.format_reaction(&r)));
            }
            net.reactions.push(r);
        }
        Ok(net)
    }

    /// Network over species `X1..Xn`.
    pub fn with_default_species(n: usize, reactions: Vec<Reaction>) -> Result<Self, NetworkError> {
        Self::new((0..n).map(Species::default_name), reactions)
    }

    pub fn empty(n: usize) -> Self {
        Self::with_default_species(n, Vec::new()).expect("empty network is valid")
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn species_names(&self) -> Vec<String> {
        self.species.iter().map(|s| s.name.clone()).collect()
    }

    pub fn species_count(&self) -> usize {
        self.species.len()
    }

    pub fn species_index(&self, name: &str) -> Option<usize> {
        self.species.iter().position(|s| s.name == name)
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn len(&self) -> usize {
        self.reactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reactions.is_empty()
    }

    pub fn find(&self, source: &Complex, target: &Complex) -> Option<usize> {
        self.reactions
            .iter()
            .position(|r| &r.source == source && &r.target == target)
    }

    /// Distinct complexes in order of first appearance (source before target).
    pub fn complexes(&self) -> Vec<Complex> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for r in &self.reactions {
            for c in [&r.source, &r.target] {
                if seen.insert(c) {
                    out.push(c.clone());
                }
            }
        }
        out
    }

    /// Distinct source complexes in order of first appearance.
    pub fn sources(&self) -> Vec<Complex> {
        let mut seen = BTreeSet::new();
        self.reactions
            .iter()
            .filter(|r| seen.insert(&r.source))
            .map(|r| r.source.clone())
            .collect()
    }

    /// Map from complex to its position in [`Self::complexes`].
    pub fn complex_index(&self) -> BTreeMap<Complex, usize> {
        self.complexes()
            .into_iter()
            .enumerate()
            .map(|(i, c)| (c, i))
            .collect()
    }

    /// Same network with reactions sorted by `(source, target)`; handy for
    /// order-insensitive comparison.
    pub fn sorted(&self) -> ReactionNetwork {
        let mut reactions = self.reactions.clone();
        reactions.sort();
        ReactionNetwork {
            species: self.species.clone(),
            reactions,
        }
    }

    pub fn format_complex(&self, c: &Complex) -> String {
        ComplexDisplay {
            complex: c,
            species: &self.species,
        }
        .to_string_alloc()
    }

    pub fn format_reaction(&self, r: &Reaction) -> String {
        format!(
            "{} -> {}",
            self.format_complex(&r.source),
            self.format_complex(&r.target)
        )
    }
}

struct ComplexDisplay<'a> {
    complex: &'a Complex,
    species: &'a [Species],
}

impl ComplexDisplay<'_> {
    fn to_string_alloc(&self) -> String {
        format!("{self}")
    }
}

impl fmt::Display for ComplexDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.complex.coeffs().iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let name = self
                .species
                .get(i)
                .map(|s| s.name.clone())
                .unwrap_or_else(|| Species::default_name(i));
            if c == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{c}{name}")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}
