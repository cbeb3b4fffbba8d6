//! Generators for the named network families and the transcribed tables.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::dynamics::{relative_network, DynamicsError, MassActionSystem};
use crate::network::{Complex, NetworkError, Reaction, ReactionNetwork, Species};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FamilyError {
    #[error("{family} needs at least {min} species, got {n}")]
    TooFewSpecies { family: &'static str, min: usize, n: usize },
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("fixture {table}: {message}")]
    Fixture { table: u8, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Family {
    Hypercycle,
    RepRecomb,
    Recomb,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Hypercycle, Family::RepRecomb, Family::Recomb];

    pub fn name(self) -> &'static str {
        match self {
            Family::Hypercycle => "hypercycle",
            Family::RepRecomb => "rep-recomb",
            Family::Recomb => "recomb",
        }
    }

    pub fn min_species(self) -> usize {
        match self {
            Family::Recomb => 3,
            _ => 2,
        }
    }

    pub fn generate(self, n: usize) -> Result<ReactionNetwork, FamilyError> {
        match self {
            Family::Hypercycle => hypercycle(n),
            Family::RepRecomb => rep_recomb(n),
            Family::Recomb => recomb(n),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('_', "-").as_str() {
            "hypercycle" => Ok(Family::Hypercycle),
            "rep-recomb" => Ok(Family::RepRecomb),
            "recomb" => Ok(Family::Recomb),
            _ => Err(FamilyError::UnknownFamily(s.to_string())),
        }
    }
}

/// A family member, optionally passed through `relative_network`. Rates are
/// all one; labels are `k1..km`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilySpec {
    pub family: Family,
    pub n: usize,
    pub relative: bool,
}

impl FamilySpec {
    pub fn new(family: Family, n: usize) -> Self {
        FamilySpec {
            family,
            n,
            relative: false,
        }
    }

    pub fn relative(self) -> Self {
        FamilySpec { relative: true, ..self }
    }

    pub fn system(&self) -> Result<MassActionSystem, FamilyError> {
        let sys = MassActionSystem::unit_rates(self.family.generate(self.n)?);
        if self.relative {
            Ok(relative_network(&sys)?)
        } else {
            Ok(sys)
        }
    }
}

fn check(family: Family, n: usize) -> Result<(), FamilyError> {
    if n < family.min_species() {
        return Err(FamilyError::TooFewSpecies {
            family: family.name(),
            min: family.min_species(),
            n,
        });
    }
    Ok(())
}

fn species(n: usize) -> Vec<String> {
    (0..n).map(Species::default_name).collect()
}

fn reaction(n: usize, source: &[(usize, u32)], target: &[(usize, u32)], label: usize) -> Reaction {
    Reaction::labeled(
        Complex::from_terms(n, source),
        Complex::from_terms(n, target),
        format!("k{label}"),
    )
}

/// `X_i + X_{i+1} -> X_i + 2X_{i+1}`, indices cyclic.
pub fn hypercycle(n: usize) -> Result<ReactionNetwork, FamilyError> {
    check(Family::Hypercycle, n)?;
    let reactions = (0..n)
        .map(|i| {
            let j = (i + 1) % n;
            reaction(n, &[(i, 1), (j, 1)], &[(i, 1), (j, 2)], i + 1)
        })
        .collect();
    Ok(ReactionNetwork::new(species(n), reactions)?)
}

/// `2X_i -> 3X_i` (label `k_{2i-1}`) and `2X_i -> 2X_i + X_{i+1}` (label
/// `k_{2i}`), indices cyclic.
pub fn rep_recomb(n: usize) -> Result<ReactionNetwork, FamilyError> {
    check(Family::RepRecomb, n)?;
    let mut reactions = Vec::with_capacity(2 * n);
    for i in 0..n {
        let j = (i + 1) % n;
        reactions.push(reaction(n, &[(i, 2)], &[(i, 3)], 2 * i + 1));
        reactions.push(reaction(n, &[(i, 2)], &[(i, 2), (j, 1)], 2 * i + 2));
    }
    Ok(ReactionNetwork::new(species(n), reactions)?)
}

/// `X_i + X_{i+1} -> X_i + 2X_{i+1}` (label `k_i`) and
/// `X_i + X_{i+1} -> X_i + X_{i+1} + X_{i+2}` (label `k_{n+i}`), cyclic.
pub fn recomb(n: usize) -> Result<ReactionNetwork, FamilyError> {
    check(Family::Recomb, n)?;
    let mut reactions = Vec::with_capacity(2 * n);
    for i in 0..n {
        let j = (i + 1) % n;
        reactions.push(reaction(n, &[(i, 1), (j, 1)], &[(i, 1), (j, 2)], i + 1));
    }
    for i in 0..n {
        let (j, l) = ((i + 1) % n, (i + 2) % n);
        reactions.push(reaction(n, &[(i, 1), (j, 1)], &[(i, 1), (j, 1), (l, 1)], n + i + 1));
    }
    Ok(ReactionNetwork::new(species(n), reactions)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErratumKind {
    /// A printed row whose source equals its target.
    Degenerate,
    /// A row the construction produces but the table omits.
    Missing,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Erratum {
    pub kind: ErratumKind,
    /// The row in reaction-language text, labels included.
    pub row: String,
}

/// One printed table: the network on the left and the transcribed relative
/// network on the right, both with unit rates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenTable {
    pub id: u8,
    pub network: MassActionSystem,
    pub relative: MassActionSystem,
    pub errata: Vec<Erratum>,
}

impl GoldenTable {
    /// Rows the construction emits beyond the transcription, parsed from the
    /// `Missing` errata.
    pub fn missing_rows(&self) -> Result<Vec<Reaction>, FamilyError> {
        let names = self.relative.network().species_names();
        let mut out = Vec::new();
        for e in self.errata.iter().filter(|e| e.kind == ErratumKind::Missing) {
            let text = format!("# species: {}\n{}", names.join(" "), e.row);
            let net = crate::network::parse_network(&text)?;
            out.extend(net.reactions().iter().cloned());
        }
        Ok(out)
    }
}

const FIXTURES: [(u8, &str); 4] = [
    (1, include_str!("../fixtures/v1/table1.crn")),
    (2, include_str!("../fixtures/v1/table2.crn")),
    (3, include_str!("../fixtures/v1/table3.crn")),
    (4, include_str!("../fixtures/v1/table4.crn")),
];

/// Tables 1 to 4 as transcribed in `fixtures/v1`.
pub fn golden_tables() -> Result<Vec<GoldenTable>, FamilyError> {
    FIXTURES.iter().map(|&(id, text)| parse_table(id, text)).collect()
}

/// Raw fixture text, byte for byte.
pub fn golden_fixture(id: u8) -> Option<&'static str> {
    FIXTURES.iter().find(|(i, _)| *i == id).map(|(_, t)| *t)
}

fn parse_table(id: u8, text: &str) -> Result<GoldenTable, FamilyError> {
    let fail = |message: String| FamilyError::Fixture { table: id, message };
    let mut header = String::new();
    let mut sections: [String; 2] = [String::new(), String::new()];
    let mut current: Option<usize> = None;
    let mut errata = Vec::new();
    for line in text.lines() {
        let trimmed = line.trim();
        match trimmed {
            "[network]" => current = Some(0),
            "[relative]" => current = Some(1),
            _ => {
                if let Some(rest) = trimmed.strip_prefix("# erratum ") {
                    let (kind, row) = rest.split_once(':').ok_or_else(|| fail(format!("bad erratum `{trimmed}`")))?;
                    let kind = match kind.trim() {
                        "degenerate" => ErratumKind::Degenerate,
                        "missing" => ErratumKind::Missing,
                        other => return Err(fail(format!("unknown erratum kind `{other}`"))),
                    };
                    errata.push(Erratum {
                        kind,
                        row: row.trim().to_string(),
                    });
                    continue;
                }
                match current {
                    None if trimmed.starts_with("# species:") => {
                        header.push_str(trimmed);
                        header.push('\n');
                    }
                    None => {}
                    Some(s) => {
                        sections[s].push_str(line);
                        sections[s].push('\n');
                    }
                }
            }
        }
    }
    if header.is_empty() {
        return Err(fail("missing species header".into()));
    }
    let parse = |body: &str| -> Result<MassActionSystem, FamilyError> {
        Ok(MassActionSystem::parse(&format!("{header}{body}"))?)
    };
    Ok(GoldenTable {
        id,
        network: parse(&sections[0])?,
        relative: parse(&sections[1])?,
        errata,
    })
}
