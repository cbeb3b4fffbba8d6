//! Relative-population dynamics: projectivization of homogeneous fields and
//! the network that realizes it for bimolecular autocatalytic systems.

use alloc::vec::Vec;

use super::{DynamicsError, MassActionSystem, RateSpec};
use crate::network::{BimolecularReaction, Complex, Reaction};
use crate::poly::{PolynomialField, SparsePolynomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Homogeneity {
    Degree(u32),
    /// The zero field has no well-defined degree.
    Zero,
    Inhomogeneous,
}

pub fn homogeneous_degree(f: &PolynomialField) -> Homogeneity {
    let mut degree = None;
    for p in f.components() {
        if p.is_zero() {
            continue;
        }
        let Some(d) = p.homogeneous_degree() else {
            return Homogeneity::Inhomogeneous;
        };
        match degree {
            None => degree = Some(d),
            Some(e) if e != d => return Homogeneity::Inhomogeneous,
            _ => {}
        }
    }
    degree.map_or(Homogeneity::Zero, Homogeneity::Degree)
}

/// `f - x * sum(f)`, or with `homogenized` the degree `d + 1` form
/// `f * sum(x) - x * sum(f)`. The two agree on the simplex `sum(x) = 1`.
pub fn projectivize_field(f: &PolynomialField, d: u32, homogenized: bool) -> Result<PolynomialField, DynamicsError> {
    match homogeneous_degree(f) {
        Homogeneity::Inhomogeneous => return Err(DynamicsError::Inhomogeneous),
        Homogeneity::Degree(found) if found != d => {
            return Err(DynamicsError::DegreeMismatch { expected: d, found })
        }
        _ => {}
    }
    let n = f.dim();
    let total = f.sum();
    let mass = SparsePolynomial::linear_sum(n);
    let comps = f
        .components()
        .iter()
        .enumerate()
        .map(|(i, fi)| {
            let drift = SparsePolynomial::variable(n, i).mul(&total);
            let lead = if homogenized { fi.mul(&mass) } else { fi.clone() };
            lead.sub(&drift)
        })
        .collect();
    Ok(PolynomialField::new(comps))
}

/// Network generating the relative-population dynamics: each reaction
/// `Xi + Xj -> Xi + Xj + Xl` (rate k) becomes `Xp + Xi + Xj -> Xi + Xj + Xl`
/// (rate k) for every species `p != l`. Labels carry over.
pub fn relative_network(sys: &MassActionSystem) -> Result<MassActionSystem, DynamicsError> {
    let rates = sys.constant_rates()?;
    let net = sys.network();
    let n = net.species_count();
    let mut items = Vec::new();
    for (r, k) in net.reactions().iter().zip(&rates) {
        let b = BimolecularReaction::recognize(r)
            .ok_or_else(|| DynamicsError::NotBimolecular(net.format_reaction(r)))?;
        let pair = Complex::unit(n, b.i).plus_unit(b.j);
        let target = pair.plus_unit(b.l);
        for p in (0..n).filter(|&p| p != b.l) {
            let reaction = Reaction {
                source: pair.plus_unit(p),
                target: target.clone(),
                label: r.label.clone(),
            };
            items.push((reaction, RateSpec::Constant(k.clone())));
        }
    }
    MassActionSystem::from_reactions(net.species_names(), items)
}
