mod common;

use std::collections::BTreeSet;

use crn_core::dynamics::{
    dynamically_equivalent, homogeneous_degree, is_mass_action_field, mass_action_field, projectivize_field,
    realize_field, relative_network, split_reaction, wr_realize, Homogeneity, MassActionSystem, RateSpec, WrBudget,
};
use crn_core::families::{hypercycle, Family, FamilySpec};
use crn_core::linalg::{q, q_vec};
use crn_core::network::{is_weakly_reversible, linkage_classes, Complex};
use crn_core::poly::parse_field;
use crn_core::{BigRational, PolynomialField, SparsePolynomial};
use proptest::prelude::*;

fn field(text: &str) -> PolynomialField {
    parse_field(text).unwrap()
}

fn sys(text: &str) -> MassActionSystem {
    MassActionSystem::parse(text).unwrap()
}

#[test]
fn hypercycle_field() {
    let f = mass_action_field(&MassActionSystem::unit_rates(hypercycle(3).unwrap())).unwrap();
    assert_eq!(f, field("dx1/dt = x1*x3\ndx2/dt = x1*x2\ndx3/dt = x2*x3"));
    assert_eq!(homogeneous_degree(&f), Homogeneity::Degree(2));
}

#[test]
fn single_reaction_and_empty_fields() {
    let f = mass_action_field(&sys("2X1 -> 3X1 ; k=5/2")).unwrap();
    assert_eq!(f, field("dx1/dt = 5/2*x1^2"));
    let empty = MassActionSystem::unit_rates(crn_core::ReactionNetwork::empty(2));
    assert!(mass_action_field(&empty).unwrap().is_zero());
    assert_eq!(homogeneous_degree(&PolynomialField::zero(2)), Homogeneity::Zero);
    assert_eq!(
        homogeneous_degree(&field("dx1/dt = x1 + x1*x2\ndx2/dt = x2")),
        Homogeneity::Inhomogeneous
    );
}

#[test]
fn variable_rates_have_no_polynomial_field() {
    let s = MassActionSystem::new(
        crn_core::network::parse_network("A -> B").unwrap(),
        vec![RateSpec::Variable { profile: 0, epsilon: BigRational::new(1.into(), 2.into()) }],
    )
    .unwrap();
    assert!(mass_action_field(&s).is_err());
}

#[test]
fn mass_action_recognition() {
    let bad = field("dx1/dt = -x2\ndx2/dt = 0");
    let check = is_mass_action_field(&bad);
    assert!(!check.holds);
    let (i, m) = check.witness.unwrap();
    assert_eq!(i, 0);
    assert_eq!(m.exponent.0, vec![0, 1]);
    assert_eq!(m.coeff, q(-1));
    assert!(realize_field(&bad).is_err());

    let hc = mass_action_field(&MassActionSystem::unit_rates(hypercycle(3).unwrap())).unwrap();
    assert!(is_mass_action_field(&projectivize_field(&hc, 2, true).unwrap()).holds);
    assert!(is_mass_action_field(&PolynomialField::zero(3)).holds);
}

#[test]
fn canonical_realizations() {
    let hc = field("dx1/dt = x1*x3\ndx2/dt = x1*x2\ndx3/dt = x2*x3");
    let r = realize_field(&hc).unwrap();
    assert_eq!(mass_action_field(&r).unwrap(), hc);
    let reference = MassActionSystem::unit_rates(hypercycle(3).unwrap());
    assert!(dynamically_equivalent(&r, &reference).unwrap().equivalent);

    assert!(realize_field(&PolynomialField::zero(2)).unwrap().is_empty());

    let f = field("dx1/dt = x1^2 - x1");
    let r = realize_field(&f).unwrap();
    let edges: BTreeSet<(Vec<u32>, Vec<u32>)> = r
        .network()
        .reactions()
        .iter()
        .map(|x| (x.source.coeffs().to_vec(), x.target.coeffs().to_vec()))
        .collect();
    assert_eq!(edges, [(vec![2], vec![3]), (vec![1], vec![0])].into_iter().collect());
    assert!(r.constant_rates().unwrap().iter().all(|k| *k == q(1)));
}

#[test]
fn projectivization_examples() {
    let f = field("dx1/dt = 0\ndx2/dt = 0\ndx3/dt = x1*x2");
    let h = projectivize_field(&f, 2, true).unwrap();
    assert_eq!(
        h,
        field("dx1/dt = -x1^2*x2\ndx2/dt = -x1*x2^2\ndx3/dt = x1^2*x2 + x1*x2^2")
    );

    let hc = mass_action_field(&MassActionSystem::unit_rates(hypercycle(3).unwrap())).unwrap();
    let third = BigRational::new(1.into(), 3.into());
    let centre = vec![third.clone(), third.clone(), third];
    for homogenized in [false, true] {
        let g = projectivize_field(&hc, 2, homogenized).unwrap();
        assert!(g.eval(&centre).iter().all(|v| *v == q(0)));
    }

    // A conservative field is its own projectivization on the simplex.
    let cons = field("dx1/dt = -x1*x2\ndx2/dt = x1*x2");
    let g = projectivize_field(&cons, 2, false).unwrap();
    assert_eq!(g, cons);

    assert!(projectivize_field(&field("dx1/dt = x1 + x1^2"), 1, true).is_err());
    assert!(projectivize_field(&hc, 3, true).is_err());
}

#[test]
fn relative_network_examples() {
    let rel = relative_network(&sys("X1 + X2 -> X1 + X2 + X3\n0 -> X3 ; k=1")).map(|_| ());
    assert!(rel.is_err(), "non-bimolecular input must be rejected");

    let names = |t: &str| sys(t).sorted();
    let one = relative_network(&sys("X1 + X2 -> X1 + X2 + X3")).unwrap();
    assert_eq!(one.sorted(), names("2X1 + X2 -> X1 + X2 + X3\nX1 + 2X2 -> X1 + X2 + X3"));

    let unit = |i, j, l| (common::bimolecular(3, i, j, l), RateSpec::unit());
    let in_three = |items| MassActionSystem::from_reactions(common::names(3), items).unwrap();
    let r1 = relative_network(&in_three(vec![unit(0, 0, 0)])).unwrap();
    let expected = names("2X1 + X2 -> 3X1\n2X1 + X3 -> 3X1");
    assert_eq!(common::labeled_set(r1.network()), common::labeled_set(expected.network()));

    let r2 = relative_network(&in_three(vec![unit(0, 0, 1)])).unwrap();
    assert_eq!(r2.len(), 2);
    let edges = common::edge_set(r2.network());
    let c = |v: &[u32]| Complex::new(v.to_vec());
    assert!(edges.contains(&(c(&[3, 0, 0]), c(&[2, 1, 0]))));
    assert!(edges.contains(&(c(&[2, 0, 1]), c(&[2, 1, 0]))));
    assert!(!edges.contains(&(c(&[2, 1, 0]), c(&[2, 1, 0]))));
}

#[test]
fn equivalence_examples() {
    let a = sys("X1 + 2X2 -> X1 + X2 + X3 ; k=3\nX4 -> X4 + X4 ; k=1");
    let b = sys("X1 + 2X2 -> 2X1 + X2 ; k=3\nX1 + 2X2 -> 2X2 + X3 ; k=3\nX4 -> X4 + X4 ; k=1");
    // Align species order before comparing.
    let b = MassActionSystem::from_reactions(a.network().species_names(), b.items()).unwrap();
    let rep = dynamically_equivalent(&a, &b).unwrap();
    assert!(rep.equivalent && rep.fields_equal);
    assert!(dynamically_equivalent(&a, &a).unwrap().equivalent);

    let one = sys("A -> B ; k=1");
    let two = sys("A -> B ; k=2");
    let rep = dynamically_equivalent(&one, &two).unwrap();
    assert!(!rep.equivalent && !rep.fields_equal);
    assert_eq!(rep.failing.len(), 1);
    assert_eq!(rep.failing[0].source, Complex::new(vec![1, 0]));
    assert_eq!(rep.failing[0].residual, q_vec(&[1, -1]));

    assert!(dynamically_equivalent(&one, &sys("B -> A")).is_err());
}

#[test]
fn split_examples() {
    let s = FamilySpec::new(Family::Recomb, 4).relative().system().unwrap();
    let net = s.network();
    let src = Complex::new(vec![1, 2, 0, 0]);
    let r = net.find(&src, &Complex::new(vec![1, 1, 1, 0])).unwrap();
    let out = split_reaction(&s, r, &[1, -1, 0, 0], &[-1, 0, 1, 0], q(1), q(1)).unwrap();
    assert!(dynamically_equivalent(&s, &out).unwrap().equivalent);
    assert!(out.network().find(&src, &Complex::new(vec![2, 1, 0, 0])).is_some());
    assert!(out.network().find(&src, &Complex::new(vec![0, 2, 1, 0])).is_some());

    let s6 = FamilySpec::new(Family::Recomb, 6).relative().system().unwrap();
    let src = Complex::new(vec![1, 0, 0, 0, 1, 1]);
    let r = s6.network().find(&src, &Complex::new(vec![1, 1, 0, 0, 0, 1])).unwrap();
    // Targets X1 + X2 + X5 and X1 + 2X6.
    let out = split_reaction(&s6, r, &[0, 1, 0, 0, 0, -1], &[0, 0, 0, 0, -1, 1], q(1), q(1)).unwrap();
    assert!(dynamically_equivalent(&s6, &out).unwrap().equivalent);

    assert!(split_reaction(&s, 0, &[0, 0, 0, -3], &[0, 0, 0, 3], q(1), q(1)).is_err());
    assert!(split_reaction(&s, 0, &[1, 0, 0, 0], &[0, 1, 0, 0], q(1), q(1)).is_err());
}

#[test]
fn realization_examples() {
    let s = FamilySpec::new(Family::Recomb, 4).relative().system().unwrap();
    let real = wr_realize(&s, WrBudget::default()).unwrap().expect("realization");
    assert!(is_weakly_reversible(real.system.network()));
    assert_eq!(linkage_classes(real.system.network()).len(), 1);
    assert!(dynamically_equivalent(&s, &real.system).unwrap().equivalent);
    assert!(!real.splits.is_empty());

    let wr = sys("A -> B ; k=2\nB -> A ; k=3");
    let same = wr_realize(&wr, WrBudget::default()).unwrap().unwrap();
    assert!(same.splits.is_empty());
    assert!(dynamically_equivalent(&wr, &same.system).unwrap().equivalent);

    assert!(wr_realize(&sys("X1 -> 2X1"), WrBudget::default()).unwrap().is_none());
}

fn bimolecular_system() -> impl Strategy<Value = MassActionSystem> {
    (any::<u64>(), 2usize..7, 1usize..9)
        .prop_map(|(seed, n, m)| common::random_bimolecular(&mut common::rng(seed), n, m.min(n * n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn central_identity(s in bimolecular_system()) {
        let rel = relative_network(&s).unwrap();
        let lhs = mass_action_field(&rel).unwrap();
        let rhs = projectivize_field(&mass_action_field(&s).unwrap(), 2, true).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn relative_reactions_trade_one_species_for_another(s in bimolecular_system()) {
        let rel = relative_network(&s).unwrap();
        for r in rel.network().reactions() {
            prop_assert_eq!(r.source.molecularity(), 3);
            let v = r.vector();
            prop_assert_eq!(v.iter().filter(|&&x| x == 1).count(), 1);
            prop_assert_eq!(v.iter().filter(|&&x| x == -1).count(), 1);
            prop_assert_eq!(v.iter().filter(|&&x| x != 0).count(), 2);
        }
    }

    #[test]
    fn repeated_reactant_sources_have_a_doubled_species(seed in any::<u64>(), n in 3usize..7, extra in 0usize..5) {
        let mut rng = common::rng(seed);
        let base = crn_core::families::rep_recomb(n).unwrap();
        let mut items: Vec<_> = base.reactions().iter().map(|r| (r.clone(), RateSpec::unit())).collect();
        for _ in 0..extra {
            let (i, l) = (common::below(&mut rng, n), common::below(&mut rng, n));
            let r = common::bimolecular(n, i, i, l);
            if base.find(&r.source, &r.target).is_none() && !items.iter().any(|(x, _)| x.key() == r.key()) {
                items.push((r, RateSpec::unit()));
            }
        }
        let s = MassActionSystem::from_reactions(common::names(n), items).unwrap();
        for r in relative_network(&s).unwrap().network().reactions() {
            let c = r.source.coeffs();
            let ok = c.contains(&3) || (c.contains(&2) && c.iter().filter(|&&v| v == 1).count() == 1);
            prop_assert!(ok, "{:?}", c);
        }
    }

    #[test]
    fn simplex_tangency(s in bimolecular_system()) {
        let f = mass_action_field(&s).unwrap();
        let g = projectivize_field(&f, 2, false).unwrap();
        let n = f.dim();
        let one_minus = SparsePolynomial::constant(n, q(1)).sub(&SparsePolynomial::linear_sum(n));
        prop_assert_eq!(g.sum(), one_minus.mul(&f.sum()));
        let h = projectivize_field(&f, 2, true).unwrap();
        prop_assert!(h.sum().is_zero());
        prop_assert!(is_mass_action_field(&g).holds && is_mass_action_field(&h).holds);
    }

    #[test]
    fn realize_inverts_the_field(s in bimolecular_system()) {
        let f = mass_action_field(&s).unwrap();
        let r = realize_field(&f).unwrap();
        prop_assert_eq!(mass_action_field(&r).unwrap(), f);
        let rep = dynamically_equivalent(&s, &MassActionSystem::from_reactions(s.network().species_names(), r.items()).unwrap()).unwrap();
        prop_assert_eq!(rep.equivalent, rep.fields_equal);
    }

    #[test]
    fn equivalence_criteria_agree(a in bimolecular_system(), seed in any::<u64>()) {
        let n = a.species_count();
        let b = common::random_bimolecular(&mut common::rng(seed), n, 1 + seed as usize % 4);
        let b = MassActionSystem::from_reactions(a.network().species_names(), b.items()).unwrap();
        let rep = dynamically_equivalent(&a, &b).unwrap();
        prop_assert_eq!(rep.equivalent, rep.fields_equal);
    }

    #[test]
    fn splits_preserve_dynamics(s in bimolecular_system(), pick in any::<usize>(), w in 1i64..4) {
        // Split s -> s + e_l as (s + e_l + e_m) and (s + e_l - e_m) with halved rates,
        // choosing m in the source support so both targets stay valid.
        let rel = relative_network(&s).unwrap();
        let r = pick % rel.len();
        let reaction = &rel.network().reactions()[r];
        let v = reaction.vector();
        let m = reaction.source.support().into_iter().next().unwrap();
        let n = v.len();
        let mut v1 = v.clone();
        let mut v2 = v.clone();
        v1[m] += w;
        v2[m] -= w;
        let k = rel.constant_rates().unwrap()[r].clone();
        let half = &k / q(2);
        let split = split_reaction(&rel, r, &v1, &v2, half.clone(), half);
        prop_assume!(split.is_ok());
        let out = split.unwrap();
        prop_assert_eq!(out.species_count(), n);
        prop_assert!(dynamically_equivalent(&rel, &out).unwrap().equivalent);
    }
}
