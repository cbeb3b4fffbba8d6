use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::linalg::{RowEchelon, Q};

use super::{NetworkError, Reaction, ReactionNetwork};

/// Rational basis (reduced row echelon rows) of the span of all reaction
/// vectors.
pub fn stoichiometric_subspace(net: &ReactionNetwork) -> Vec<Vec<Q>> {
    stoichiometric_echelon(net).rows
}

pub(crate) fn stoichiometric_echelon(net: &ReactionNetwork) -> RowEchelon {
    let vectors: Vec<Vec<i64>> = net.reactions().iter().map(Reaction::vector).collect();
    RowEchelon::from_i64(&vectors, net.species_count())
}

/// A reaction `X_i + X_j -> X_i + X_j + X_l` with `i <= j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct BimolecularReaction {
    pub i: usize,
    pub j: usize,
    pub l: usize,
}

impl BimolecularReaction {
    pub fn recognize(r: &Reaction) -> Option<Self> {
        if r.source.molecularity() != 2 {
            return None;
        }
        let v = r.vector();
        let mut produced = None;
        for (k, &x) in v.iter().enumerate() {
            match x {
                0 => {}
                1 if produced.is_none() => produced = Some(k),
                _ => return None,
            }
        }
        let l = produced?;
        let mut pair = Vec::with_capacity(2);
        for (k, &c) in r.source.coeffs().iter().enumerate() {
            for _ in 0..c {
                pair.push(k);
            }
        }
        Some(BimolecularReaction {
            i: pair[0],
            j: pair[1],
            l,
        })
    }
}

/// Every reaction has the form `X_i + X_j -> X_i + X_j + X_l`.
pub fn is_bimolecular_autocatalytic(net: &ReactionNetwork) -> bool {
    net.reactions()
        .iter()
        .all(|r| BimolecularReaction::recognize(r).is_some())
}

/// Least superset of `seed` closed under: if a reaction's source support lies
/// in the set, add the target support.
pub fn species_closure(
    net: &ReactionNetwork,
    seed: &BTreeSet<usize>,
) -> Result<BTreeSet<usize>, NetworkError> {
    if seed.is_empty() {
        return Err(NetworkError::EmptySeed);
    }
    let n = net.species_count();
    if let Some(&bad) = seed.iter().find(|&&i| i >= n) {
        return Err(NetworkError::SpeciesOutOfRange { index: bad, count: n });
    }
    let mut set = seed.clone();
    loop {
        let before = set.len();
        for r in net.reactions() {
            if r.source.support().is_subset(&set) {
                set.extend(r.target.support());
            }
        }
        if set.len() == before {
            return Ok(set);
        }
    }
}

/// Outcome of the pairwise production check; pairs are 0-based species
/// indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyX {
    pub holds: bool,
    pub failing_pair: Option<(usize, usize)>,
}

/// For every pair `i != j` there must be `X_i + X_j -> X_i + X_j + X_k` with
/// `k` outside the pair such that the closure of `{i, j, k}` is everything.
pub fn property_x_check(net: &ReactionNetwork) -> Result<PropertyX, NetworkError> {
    let mut patterns = Vec::with_capacity(net.len());
    for r in net.reactions() {
        let b = BimolecularReaction::recognize(r)
            .ok_or_else(|| NetworkError::NotBimolecularAutocatalytic(net.format_reaction(r)))?;
        patterns.push(b);
    }
    let n = net.species_count();
    for i in 0..n {
        for j in i + 1..n {
            let ok = patterns.iter().filter(|b| b.i == i && b.j == j && b.l != i && b.l != j).any(|b| {
                let seed = BTreeSet::from([i, j, b.l]);
                species_closure(net, &seed).is_ok_and(|c| c.len() == n)
            });
            if !ok {
                return Ok(PropertyX {
                    holds: false,
                    failing_pair: Some((i, j)),
                });
            }
        }
    }
    Ok(PropertyX {
        holds: true,
        failing_pair: None,
    })
}

/// Exact membership of `x - x0` in the stoichiometric subspace.
pub fn compatibility_class_contains_exact(
    net: &ReactionNetwork,
    x0: &[Q],
    x: &[Q],
) -> Result<bool, NetworkError> {
    use num_traits::Signed;
    let n = net.species_count();
    if x0.len() != n || x.len() != n || x0.iter().chain(x).any(|v| !v.is_positive()) {
        return Err(NetworkError::InvalidState);
    }
    let diff: Vec<Q> = x.iter().zip(x0).map(|(a, b)| a - b).collect();
    Ok(stoichiometric_echelon(net).contains(&diff))
}

/// Floating-point membership: the residual of `x - x0` after orthogonal
/// projection onto the stoichiometric subspace must be below `1e-9` relative
/// to the size of the inputs.
pub fn compatibility_class_contains(
    net: &ReactionNetwork,
    x0: &[f64],
    x: &[f64],
) -> Result<bool, NetworkError> {
    let n = net.species_count();
    if x0.len() != n || x.len() != n || x0.iter().chain(x).any(|&v| v.is_nan() || v <= 0.0 || v.is_infinite()) {
        return Err(NetworkError::InvalidState);
    }
    let basis: Vec<Vec<f64>> = stoichiometric_subspace(net)
        .iter()
        .map(|row| row.iter().map(crate::poly::q_to_f64).collect())
        .collect();
    let ortho = gram_schmidt(basis);
    let mut residual: Vec<f64> = x.iter().zip(x0).map(|(a, b)| a - b).collect();
    for e in &ortho {
        let c: f64 = residual.iter().zip(e).map(|(a, b)| a * b).sum();
        for (r, v) in residual.iter_mut().zip(e) {
            *r -= c * v;
        }
    }
    let scale = norm(x).max(norm(x0)).max(1.0);
    Ok(norm(&residual) <= 1e-9 * scale)
}

fn norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|a| a * a).sum())
}

fn gram_schmidt(vectors: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for mut v in vectors {
        for e in &out {
            let c: f64 = v.iter().zip(e).map(|(a, b)| a * b).sum();
            for (x, y) in v.iter_mut().zip(e) {
                *x -= c * y;
            }
        }
        let len = norm(&v);
        if len > 1e-12 {
            out.push(v.into_iter().map(|x| x / len).collect());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::parse_network;
    use crate::linalg::q_vec;

    const HYPERCYCLE3: &str = "X1 + X2 -> X1 + 2X2\nX2 + X3 -> X2 + 2X3\nX3 + X1 -> X3 + 2X1";
    const RECOMB3: &str = "\
X1 + X2 -> X1 + 2X2 ; k1
X2 + X3 -> X2 + 2X3 ; k2
X3 + X1 -> X3 + 2X1 ; k3
X1 + X2 -> X1 + X2 + X3 ; k4
X2 + X3 -> X1 + X2 + X3 ; k5
X1 + X3 -> X1 + X2 + X3 ; k6
";

    #[test]
    fn subspace_dimensions() {
        assert_eq!(stoichiometric_subspace(&parse_network(HYPERCYCLE3).unwrap()).len(), 3);
        let two = parse_network("2X1 + X2 -> X1 + X2 + X3\nX1 + 2X2 -> X1 + X2 + X3").unwrap();
        assert_eq!(stoichiometric_subspace(&two).len(), 2);
        assert_eq!(stoichiometric_subspace(&parse_network("A -> B\nB -> A").unwrap()).len(), 1);
        assert!(stoichiometric_subspace(&ReactionNetwork::empty(2)).is_empty());
    }

    #[test]
    fn bimolecular_recognition() {
        assert!(is_bimolecular_autocatalytic(&parse_network(HYPERCYCLE3).unwrap()));
        assert!(is_bimolecular_autocatalytic(&parse_network("2X1 -> 3X1").unwrap()));
        assert!(!is_bimolecular_autocatalytic(&parse_network("A -> B").unwrap()));
        assert!(!is_bimolecular_autocatalytic(&parse_network("X1 + X2 -> X1 + X2 + 2X3").unwrap()));
        let net = parse_network("X1 + X2 -> X1 + 2X2").unwrap();
        assert_eq!(
            BimolecularReaction::recognize(&net.reactions()[0]),
            Some(BimolecularReaction { i: 0, j: 1, l: 1 })
        );
    }

    #[test]
    fn closure_examples() {
        let net = parse_network(RECOMB3).unwrap();
        assert_eq!(species_closure(&net, &BTreeSet::from([0, 1])).unwrap(), BTreeSet::from([0, 1, 2]));
        let inert = parse_network("# species: X1 X2 X3\nX2 + X3 -> X2 + X3 + X1").unwrap();
        assert_eq!(species_closure(&inert, &BTreeSet::from([0])).unwrap(), BTreeSet::from([0]));
        assert_eq!(species_closure(&net, &BTreeSet::from([0, 1, 2])).unwrap().len(), 3);
        assert_eq!(species_closure(&net, &BTreeSet::new()), Err(NetworkError::EmptySeed));
    }

    #[test]
    fn property_x_examples() {
        let net = parse_network(RECOMB3).unwrap();
        assert!(property_x_check(&net).unwrap().holds);

        let without: alloc::string::String = RECOMB3.lines().filter(|l| !l.ends_with("k6")).map(|l| alloc::format!("{l}\n")).collect();
        let res = property_x_check(&parse_network(&without).unwrap()).unwrap();
        assert_eq!(res, PropertyX { holds: false, failing_pair: Some((0, 2)) });

        let two = parse_network("X1 + X2 -> X1 + 2X2\nX1 + X2 -> 2X1 + X2").unwrap();
        assert_eq!(property_x_check(&two).unwrap().failing_pair, Some((0, 1)));

        assert!(property_x_check(&parse_network("A -> B").unwrap()).is_err());
    }

    #[test]
    fn compatibility_classes() {
        let hc = parse_network(HYPERCYCLE3).unwrap();
        assert!(compatibility_class_contains(&hc, &[1.0, 2.0, 3.0], &[0.5, 7.0, 0.1]).unwrap());
        let ab = parse_network("A -> B\nB -> A").unwrap();
        assert!(compatibility_class_contains(&ab, &[1.0, 1.0], &[1.0, 1.0]).unwrap());
        assert!(!compatibility_class_contains(&ab, &[1.0, 1.0], &[2.0, 1.0]).unwrap());
        assert!(compatibility_class_contains(&ab, &[1.0, 1.0], &[1.5, 0.5]).unwrap());
        assert!(!compatibility_class_contains_exact(&ab, &q_vec(&[1, 1]), &q_vec(&[2, 1])).unwrap());
        assert!(compatibility_class_contains_exact(&ab, &q_vec(&[1, 3]), &q_vec(&[2, 2])).unwrap());
        assert_eq!(
            compatibility_class_contains(&ab, &[0.0, 1.0], &[1.0, 1.0]),
            Err(NetworkError::InvalidState)
        );
    }
}
