//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use crn_core::dynamics::{MassActionSystem, RateSpec};
use crn_core::families::rep_recomb;
use crn_core::network::{property_x_check, Complex, Reaction, ReactionNetwork, Species};
use crn_core::BigRational;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn below(rng: &mut ChaCha8Rng, n: usize) -> usize {
    (rng.next_u64() % n as u64) as usize
}

/// Positive rational p/q with p in 1..=9, q in 1..=4.
pub fn rational_rate(rng: &mut ChaCha8Rng) -> BigRational {
    BigRational::new((1 + below(rng, 9) as i64).into(), (1 + below(rng, 4) as i64).into())
}

pub fn names(n: usize) -> Vec<String> {
    (0..n).map(Species::default_name).collect()
}

pub fn bimolecular(n: usize, i: usize, j: usize, l: usize) -> Reaction {
    let source = Complex::unit(n, i).plus_unit(j);
    let target = source.plus_unit(l);
    Reaction::new(source, target)
}

/// Distinct bimolecular autocatalytic reactions with rational rates.
pub fn random_bimolecular(rng: &mut ChaCha8Rng, n: usize, m: usize) -> MassActionSystem {
    let mut seen = BTreeSet::new();
    let mut items = Vec::new();
    while items.len() < m {
        let (i, j, l) = (below(rng, n), below(rng, n), below(rng, n));
        let (i, j) = (i.min(j), i.max(j));
        if seen.insert((i, j, l)) {
            items.push((bimolecular(n, i, j, l), RateSpec::Constant(rational_rate(rng))));
        }
    }
    MassActionSystem::from_reactions(names(n), items).unwrap()
}

/// A network with property X: every pair of distinct species makes a third,
/// and from there everything. Only mixed pairs react.
pub fn random_property_x(rng: &mut ChaCha8Rng, n: usize) -> MassActionSystem {
    assert!(n >= 3);
    loop {
        let mut triples = BTreeSet::new();
        for i in 0..n {
            for j in i + 1..n {
                let mut l = below(rng, n);
                while l == i || l == j {
                    l = below(rng, n);
                }
                triples.insert((i, j, l));
            }
        }
        for _ in 0..below(rng, n + 1) {
            let (i, j) = (below(rng, n), below(rng, n));
            if i != j {
                triples.insert((i.min(j), i.max(j), below(rng, n)));
            }
        }
        let items = triples
            .iter()
            .map(|&(i, j, l)| (bimolecular(n, i, j, l), RateSpec::Constant(rational_rate(rng))))
            .collect();
        let sys = MassActionSystem::from_reactions(names(n), items).unwrap();
        if property_x_check(sys.network()).unwrap().holds {
            return sys;
        }
    }
}

/// `rep_recomb(n)` plus `extra` random bimolecular autocatalytic reactions.
pub fn random_enlargement(rng: &mut ChaCha8Rng, n: usize, extra: usize) -> MassActionSystem {
    let base = rep_recomb(n).unwrap();
    let mut items: Vec<_> = base
        .reactions()
        .iter()
        .map(|r| (r.clone(), RateSpec::Constant(rational_rate(rng))))
        .collect();
    let mut keys: BTreeSet<(Complex, Complex)> = base
        .reactions()
        .iter()
        .map(|r| (r.source.clone(), r.target.clone()))
        .collect();
    let mut added = 0;
    while added < extra {
        let (i, j, l) = (below(rng, n), below(rng, n), below(rng, n));
        let r = bimolecular(n, i.min(j), i.max(j), l);
        if keys.insert((r.source.clone(), r.target.clone())) {
            items.push((r, RateSpec::Constant(rational_rate(rng))));
            added += 1;
        }
    }
    MassActionSystem::from_reactions(names(n), items).unwrap()
}

/// Unlabeled `(source, target)` set, for label-blind comparisons.
pub fn edge_set(net: &ReactionNetwork) -> BTreeSet<(Complex, Complex)> {
    net.reactions().iter().map(|r| (r.source.clone(), r.target.clone())).collect()
}

/// `(source, target, label)` set.
pub fn labeled_set(net: &ReactionNetwork) -> BTreeSet<(Complex, Complex, Option<String>)> {
    net.reactions()
        .iter()
        .map(|r| (r.source.clone(), r.target.clone(), r.label.clone()))
        .collect()
}
