use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use super::{mass_action_field, DynamicsError, MassActionSystem, RateSpec};
use crate::linalg::Q;
use crate::network::{Complex, Reaction};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexResidual {
    pub source: Complex,
    /// Net reaction vector of the first system minus that of the second.
    pub residual: Vec<Q>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    /// Source vertices whose net rate-weighted reaction vectors differ.
    pub failing: Vec<VertexResidual>,
    /// Independent check: the two polynomial fields coincide.
    pub fields_equal: bool,
}

fn net_vectors(sys: &MassActionSystem) -> Result<BTreeMap<Complex, Vec<Q>>, DynamicsError> {
    let rates = sys.constant_rates()?;
    let n = sys.species_count();
    let mut out: BTreeMap<Complex, Vec<Q>> = BTreeMap::new();
    for (r, k) in sys.network().reactions().iter().zip(&rates) {
        let acc = out
            .entry(r.source.clone())
            .or_insert_with(|| alloc::vec![Q::zero(); n]);
        for (a, v) in acc.iter_mut().zip(r.vector()) {
            *a += k * Q::from_integer(v.into());
        }
    }
    Ok(out)
}

/// Compares `sum k (s' - s0)` at every source vertex `s0` of either system.
pub fn dynamically_equivalent(a: &MassActionSystem, b: &MassActionSystem) -> Result<EquivalenceReport, DynamicsError> {
    if a.network().species_names() != b.network().species_names() {
        return Err(DynamicsError::SpeciesMismatch);
    }
    let n = a.species_count();
    let va = net_vectors(a)?;
    let vb = net_vectors(b)?;
    let zero = alloc::vec![Q::zero(); n];
    let mut sources: Vec<&Complex> = va.keys().chain(vb.keys()).collect();
    sources.sort();
    sources.dedup();
    let mut failing = Vec::new();
    for s in sources {
        let x = va.get(s).unwrap_or(&zero);
        let y = vb.get(s).unwrap_or(&zero);
        let residual: Vec<Q> = x.iter().zip(y).map(|(p, q)| p - q).collect();
        if residual.iter().any(|r| !r.is_zero()) {
            failing.push(VertexResidual {
                source: s.clone(),
                residual,
            });
        }
    }
    let fields_equal = mass_action_field(a)? == mass_action_field(b)?;
    Ok(EquivalenceReport {
        equivalent: failing.is_empty(),
        failing,
        fields_equal,
    })
}

/// Replaces reaction `r` (rate k) by `s -> s + v1` (rate k1) and
/// `s -> s + v2` (rate k2), where `k (s' - s) = k1 v1 + k2 v2`. New edges
/// that coincide with existing ones are merged by summing rates.
pub fn split_reaction(
    sys: &MassActionSystem,
    r: usize,
    v1: &[i64],
    v2: &[i64],
    k1: Q,
    k2: Q,
) -> Result<MassActionSystem, DynamicsError> {
    let rates = sys.constant_rates()?;
    let net = sys.network();
    let reaction = net
        .reactions()
        .get(r)
        .ok_or_else(|| DynamicsError::InvalidSplit(format!("no reaction {r}")))?;
    let n = net.species_count();
    if v1.len() != n || v2.len() != n {
        return Err(DynamicsError::InvalidSplit(format!("split vectors need {n} entries")));
    }
    if !k1.is_positive() || !k2.is_positive() {
        return Err(DynamicsError::InvalidSplit("rates must be positive".into()));
    }
    let k = &rates[r];
    let ok = reaction
        .vector()
        .iter()
        .zip(v1.iter().zip(v2))
        .all(|(&u, (&a, &b))| k * Q::from_integer(u.into()) == &k1 * Q::from_integer(a.into()) + &k2 * Q::from_integer(b.into()));
    if !ok {
        return Err(DynamicsError::InvalidSplit(format!(
            "k (s' - s) != k1 v1 + k2 v2 for {}",
            net.format_reaction(reaction)
        )));
    }
    let mut targets = Vec::with_capacity(2);
    for v in [v1, v2] {
        let t = reaction.source.offset(v).ok_or_else(|| {
            DynamicsError::InvalidSplit(format!("{v:?} leaves the non-negative orthant"))
        })?;
        if t == reaction.source {
            return Err(DynamicsError::InvalidSplit("split vector is zero".into()));
        }
        targets.push(t);
    }
    let mut items = sys.items();
    let (old, _) = items.remove(r);
    for (t, kk) in targets.into_iter().zip([k1, k2]) {
        items.push((
            Reaction {
                source: old.source.clone(),
                target: t,
                label: old.label.clone(),
            },
            RateSpec::Constant(kk),
        ));
    }
    MassActionSystem::from_reactions(net.species_names(), items)
}
