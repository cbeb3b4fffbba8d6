//! Network files in the reaction language or the JSON form, and atomic
//! output.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use crn_core::network::text::{format_rational, parse_rational};
use crn_core::{BigRational, Complex, MassActionSystem, RateSpec, Reaction};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkJson {
    pub species: Vec<String>,
    pub reactions: Vec<ReactionJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReactionJson {
    pub source: Vec<u32>,
    pub target: Vec<u32>,
    /// Exact rational such as `"3/2"`; defaults to 1.
    #[serde(default = "unit_rate")]
    pub rate: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

fn unit_rate() -> String {
    "1".into()
}

impl NetworkJson {
    /// Fails for variable rates, which have no file representation.
    pub fn from_system(sys: &MassActionSystem) -> Result<Self> {
        let rates = sys.constant_rates()?;
        let net = sys.network();
        Ok(NetworkJson {
            species: net.species_names(),
            reactions: net
                .reactions()
                .iter()
                .zip(&rates)
                .map(|(r, k)| ReactionJson {
                    source: r.source.coeffs().to_vec(),
                    target: r.target.coeffs().to_vec(),
                    rate: format_rational(k),
                    label: r.label.clone(),
                })
                .collect(),
        })
    }

    pub fn to_system(&self) -> Result<MassActionSystem> {
        let mut items = Vec::with_capacity(self.reactions.len());
        for (i, r) in self.reactions.iter().enumerate() {
            let k: BigRational =
                parse_rational(&r.rate).ok_or_else(|| anyhow!("reaction {}: bad rate `{}`", i + 1, r.rate))?;
            let (source, target) = (Complex::new(r.source.clone()), Complex::new(r.target.clone()));
            let reaction = match &r.label {
                Some(l) => Reaction::labeled(source, target, l.clone()),
                None => Reaction::new(source, target),
            };
            items.push((reaction, RateSpec::Constant(k)));
        }
        Ok(MassActionSystem::from_reactions(self.species.clone(), items)?)
    }
}

/// Parses either format; JSON is recognized by a leading `{`.
pub fn parse_system(text: &str) -> Result<MassActionSystem> {
    if text.trim_start().starts_with('{') {
        let json: NetworkJson = serde_json::from_str(text).context("invalid network JSON")?;
        json.to_system()
    } else {
        Ok(MassActionSystem::parse(text)?)
    }
}

pub fn read_system(path: &Path) -> Result<MassActionSystem> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_system(&text).with_context(|| format!("in {}", path.display()))
}

/// Reaction-language text with explicit rates and labels.
pub fn system_text(sys: &MassActionSystem) -> Result<String> {
    Ok(sys.to_text()?)
}

/// Writes through a temporary file in the target directory, so readers never
/// see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("cannot write in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| anyhow!("cannot replace {}: {}", path.display(), e.error))?;
    Ok(())
}

/// Re-expresses `sys` over `species`, which must be a permutation of its own
/// species list.
pub fn reorder_species(sys: &MassActionSystem, species: &[String]) -> Result<MassActionSystem> {
    let own = sys.network().species_names();
    if own == species {
        return Ok(sys.clone());
    }
    let mut sorted_own = own.clone();
    let mut sorted_new = species.to_vec();
    sorted_own.sort();
    sorted_new.sort();
    if sorted_own != sorted_new {
        bail!("species lists differ: [{}] vs [{}]", own.join(", "), species.join(", "));
    }
    let perm: Vec<usize> = species
        .iter()
        .map(|name| own.iter().position(|o| o == name).expect("same species set"))
        .collect();
    let remap = |c: &Complex| Complex::new(perm.iter().map(|&i| c.coeffs()[i]).collect());
    let items = sys
        .items()
        .into_iter()
        .map(|(r, k)| {
            let mut moved = Reaction::new(remap(&r.source), remap(&r.target));
            moved.label = r.label;
            (moved, k)
        })
        .collect();
    Ok(MassActionSystem::from_reactions(species.to_vec(), items)?)
}
