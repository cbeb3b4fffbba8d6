//! Exact rational convex geometry over complexes.
//!
//! The exact endotacticity decision works on the face lattice of the convex
//! hull of source complexes and is valid when every complex lies in that
//! hull. The sampled sweep tests work for any network but only their
//! refutations are proofs.

mod hull;
mod truncated;

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Zero;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::linalg::{dot, primitive_integer, q, q_vec, RowEchelon, Q};
use crate::network::ReactionNetwork;

pub use hull::ConvexHull;
pub use truncated::{classify_truncated_face, truncated_simplex, TruncatedFaceKind};

pub type RationalVector = Vec<Q>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("empty point set")]
    Empty,
    #[error("all points coincide")]
    Degenerate,
    #[error("point of length {found} in a set of length {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("some complex lies outside the convex hull of the sources")]
    ContainmentFails,
    #[error("direction is orthogonal to the stoichiometric subspace")]
    DirectionInOrthogonalComplement,
    #[error("no directions given")]
    NoDirections,
    #[error("direction entries do not fit in 64 bits")]
    Overflow,
    #[error("truncated simplex needs n >= 2, got {0}")]
    TooFewSpecies(usize),
    #[error("not a face of the truncated simplex: {0}")]
    NotAFace(String),
    #[error("face classification is ambiguous or empty: {0}")]
    Dichotomy(String),
}

/// A nonempty proper face: `normal . p == offset` exactly for the listed
/// points and `normal . q > offset` for every other point of the input set.
/// The normal is a primitive integer vector in the direction space of the
/// hull, so it points into the polytope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub vertex_indices: Vec<usize>,
    pub normal: RationalVector,
    pub offset: Q,
    pub dim: usize,
}

/// Affine dimension of a point set.
pub fn affine_dim(points: &[RationalVector]) -> Result<usize, GeometryError> {
    Ok(ConvexHull::new(points)?.dim())
}

pub fn enumerate_proper_faces(points: &[RationalVector]) -> Result<Vec<Face>, GeometryError> {
    let hull = ConvexHull::new(points)?;
    if hull.dim() == 0 {
        return Err(GeometryError::Degenerate);
    }
    Ok(hull.faces())
}

fn complex_points(cs: &[crate::network::Complex]) -> Vec<RationalVector> {
    cs.iter().map(|c| q_vec(&c.to_i64())).collect()
}

fn source_hull(net: &ReactionNetwork) -> Option<ConvexHull> {
    let sources = complex_points(&net.sources());
    ConvexHull::new(&sources).ok()
}

/// Every complex of the network lies in the convex hull of the sources.
pub fn sources_contain_all_vertices(net: &ReactionNetwork) -> bool {
    let Some(hull) = source_hull(net) else {
        return true;
    };
    net.complexes().iter().all(|c| hull.contains(&q_vec(&c.to_i64())))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndotacticDecision {
    pub strongly_endotactic: bool,
    /// Face of the source hull that every incident reaction stays on.
    /// Indices refer to [`ReactionNetwork::sources`].
    pub witness: Option<Face>,
    pub faces_checked: usize,
}

/// Decides strong endotacticity from the face lattice of the source hull.
/// Requires every complex to lie in that hull.
pub fn strongly_endotactic_exact(net: &ReactionNetwork) -> Result<EndotacticDecision, GeometryError> {
    let sources = net.sources();
    if sources.is_empty() {
        return Ok(EndotacticDecision {
            strongly_endotactic: true,
            witness: None,
            faces_checked: 0,
        });
    }
    if !sources_contain_all_vertices(net) {
        return Err(GeometryError::ContainmentFails);
    }
    let hull = ConvexHull::new(&complex_points(&sources))?;
    if hull.dim() == 0 {
        // Containment forces every target onto the single source.
        return Ok(EndotacticDecision {
            strongly_endotactic: true,
            witness: None,
            faces_checked: 0,
        });
    }
    let index: alloc::collections::BTreeMap<_, usize> =
        sources.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
    let faces = hull.faces();
    let total = faces.len();
    for face in faces {
        let on: BTreeSet<usize> = face.vertex_indices.iter().copied().collect();
        let leaves = net.reactions().iter().any(|r| {
            on.contains(&index[&r.source]) && dot(&face.normal, &q_vec(&r.target.to_i64())) != face.offset
        });
        if !leaves {
            return Ok(EndotacticDecision {
                strongly_endotactic: false,
                witness: Some(face),
                faces_checked: total,
            });
        }
    }
    Ok(EndotacticDecision {
        strongly_endotactic: true,
        witness: None,
        faces_checked: total,
    })
}

fn in_orthogonal_complement(s: &RowEchelon, w: &[Q]) -> bool {
    s.rows.iter().all(|b| dot(b, w).is_zero())
}

/// Finite set of sweep directions: +- facet normals of the source hull,
/// +- coordinate axes, +- reaction vectors and `extra` seeded random
/// directions projected onto the stoichiometric subspace. Directions
/// orthogonal to that subspace are left out; the list is deduplicated after
/// scaling to primitive integer vectors.
pub fn candidate_directions(net: &ReactionNetwork, extra: usize, seed: u64) -> Vec<RationalVector> {
    let n = net.species_count();
    let s = crate::network::stoichiometric_echelon(net);
    let mut raw: Vec<RationalVector> = Vec::new();
    if let Some(hull) = source_hull(net) {
        if hull.dim() > 0 {
            for f in hull.faces() {
                raw.push(f.normal);
            }
        }
    }
    for i in 0..n {
        let mut e = alloc::vec![Q::zero(); n];
        e[i] = q(1);
        raw.push(e);
    }
    for r in net.reactions() {
        raw.push(q_vec(&r.vector()));
    }
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    let mut push = |w: &RationalVector, out: &mut Vec<RationalVector>| {
        if w.iter().all(Zero::is_zero) || in_orthogonal_complement(&s, w) {
            return;
        }
        let canon = primitive_integer(w);
        let neg: Vec<_> = canon.iter().map(|x| -x).collect();
        for v in [canon, neg] {
            if seen.insert(v.clone()) {
                out.push(v.into_iter().map(Q::from_integer).collect());
            }
        }
    };
    for w in &raw {
        push(w, &mut out);
    }
    if s.rank() > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut made = 0;
        let mut attempts = 0;
        while made < extra && attempts < extra * 20 + 20 {
            attempts += 1;
            let v: Vec<i64> = (0..n).map(|_| (rng.next_u32() % 21) as i64 - 10).collect();
            let w = s.project(&q_vec(&v));
            if w.iter().all(Zero::is_zero) {
                continue;
            }
            let before = out.len();
            push(&w, &mut out);
            if out.len() > before {
                made += 1;
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SweepVerdict {
    /// The definition fails along `direction`. `reaction` is the offending
    /// reaction when one points outward; `None` means no reaction on the
    /// minimal hyperplane points inward.
    Refuted {
        direction: RationalVector,
        reaction: Option<usize>,
    },
    NoViolationFound { directions_tested: usize },
}

impl SweepVerdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, SweepVerdict::Refuted { .. })
    }
}

struct IntNet {
    sources: Vec<Vec<i64>>,
    vectors: Vec<Vec<i64>>,
}

impl IntNet {
    fn new(net: &ReactionNetwork) -> Self {
        IntNet {
            sources: net.reactions().iter().map(|r| r.source.to_i64()).collect(),
            vectors: net.reactions().iter().map(|r| r.vector()).collect(),
        }
    }
}

fn int_direction(w: &[Q]) -> Result<Vec<i64>, GeometryError> {
    crate::linalg::to_i64(&primitive_integer(w)).ok_or(GeometryError::Overflow)
}

fn idot(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

/// Parallel sweep test along each direction: on the minimal supporting
/// hyperplane of the sources, no reaction may point outward and at least one
/// must point inward.
pub fn parallel_sweep_sampled(
    net: &ReactionNetwork,
    directions: &[RationalVector],
) -> Result<SweepVerdict, GeometryError> {
    if directions.is_empty() {
        return Err(GeometryError::NoDirections);
    }
    let s = crate::network::stoichiometric_echelon(net);
    let data = IntNet::new(net);
    for w in directions {
        if in_orthogonal_complement(&s, w) {
            return Err(GeometryError::DirectionInOrthogonalComplement);
        }
        let wi = int_direction(w)?;
        let heights: Vec<i128> = data.sources.iter().map(|src| idot(&wi, src)).collect();
        let Some(&min) = heights.iter().min() else {
            continue;
        };
        let mut inward = false;
        for (k, h) in heights.iter().enumerate() {
            if *h != min {
                continue;
            }
            let gain = idot(&wi, &data.vectors[k]);
            if gain < 0 {
                return Ok(SweepVerdict::Refuted {
                    direction: w.clone(),
                    reaction: Some(k),
                });
            }
            inward |= gain > 0;
        }
        if !inward {
            return Ok(SweepVerdict::Refuted {
                direction: w.clone(),
                reaction: None,
            });
        }
    }
    Ok(SweepVerdict::NoViolationFound {
        directions_tested: directions.len(),
    })
}

/// Endotactic condition along each direction: every reaction pointing
/// against `w` needs a reaction pointing along `w` from a strictly lower
/// source.
pub fn endotactic_sampled(
    net: &ReactionNetwork,
    directions: &[RationalVector],
) -> Result<SweepVerdict, GeometryError> {
    if directions.is_empty() {
        return Err(GeometryError::NoDirections);
    }
    let data = IntNet::new(net);
    for w in directions {
        let wi = int_direction(w)?;
        let heights: Vec<i128> = data.sources.iter().map(|src| idot(&wi, src)).collect();
        let gains: Vec<i128> = data.vectors.iter().map(|v| idot(&wi, v)).collect();
        let lowest_inward = (0..gains.len()).filter(|&k| gains[k] > 0).map(|k| heights[k]).min();
        for k in 0..gains.len() {
            if gains[k] < 0 && lowest_inward.is_none_or(|low| low >= heights[k]) {
                return Ok(SweepVerdict::Refuted {
                    direction: w.clone(),
                    reaction: Some(k),
                });
            }
        }
    }
    Ok(SweepVerdict::NoViolationFound {
        directions_tested: directions.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::parse_network;
    use alloc::vec;

    #[test]
    fn affine_dims() {
        assert_eq!(affine_dim(&[q_vec(&[1, 2])]).unwrap(), 0);
        assert_eq!(affine_dim(&[q_vec(&[0, 0]), q_vec(&[1, 0]), q_vec(&[0, 1])]).unwrap(), 2);
        assert_eq!(affine_dim(&[]), Err(GeometryError::Empty));
    }

    #[test]
    fn triangle_and_segment_faces() {
        let tri = [q_vec(&[0, 0]), q_vec(&[1, 0]), q_vec(&[0, 1])];
        assert_eq!(enumerate_proper_faces(&tri).unwrap().len(), 6);
        let seg = [q_vec(&[0, 0, 1]), q_vec(&[2, 0, 1])];
        let faces = enumerate_proper_faces(&seg).unwrap();
        assert_eq!(faces.len(), 2);
        assert_eq!(faces[0].normal, q_vec(&[1, 0, 0]));
        assert_eq!(enumerate_proper_faces(&[q_vec(&[1]), q_vec(&[1])]), Err(GeometryError::Degenerate));
    }

    #[test]
    fn containment() {
        assert!(!sources_contain_all_vertices(&parse_network("X1 -> 2X1").unwrap()));
        assert!(sources_contain_all_vertices(&parse_network("A -> B\nB -> A").unwrap()));
    }

    #[test]
    fn hand_built_counterexample() {
        let net = parse_network("3X1 -> 2X1 + X2\n3X2 -> 2X2 + X1\n3X3 -> 2X3 + X1").unwrap();
        let d = strongly_endotactic_exact(&net).unwrap();
        assert!(!d.strongly_endotactic);
        let w = d.witness.unwrap();
        assert_eq!(w.vertex_indices, vec![0, 1]);
        let verdict = parallel_sweep_sampled(&net, std::slice::from_ref(&w.normal)).unwrap();
        assert!(verdict.is_refuted());
    }

    #[test]
    fn reversible_pair_is_strongly_endotactic() {
        let net = parse_network("2X1 + X2 -> X1 + 2X2\nX1 + 2X2 -> 2X1 + X2").unwrap();
        assert!(strongly_endotactic_exact(&net).unwrap().strongly_endotactic);
        let dirs = candidate_directions(&net, 8, 1);
        assert!(!parallel_sweep_sampled(&net, &dirs).unwrap().is_refuted());
    }

    #[test]
    fn sweep_refutations() {
        let grow = parse_network("X1 -> 2X1").unwrap();
        let w = vec![q(-1)];
        assert_eq!(
            parallel_sweep_sampled(&grow, std::slice::from_ref(&w)).unwrap(),
            SweepVerdict::Refuted {
                direction: w.clone(),
                reaction: Some(0)
            }
        );
        assert!(endotactic_sampled(&grow, &[w]).unwrap().is_refuted());

        let hc = parse_network("X1 + X2 -> X1 + 2X2\nX2 + X3 -> X2 + 2X3\nX3 + X1 -> X3 + 2X1").unwrap();
        let w = q_vec(&[0, -1, 0]);
        assert!(parallel_sweep_sampled(&hc, std::slice::from_ref(&w)).unwrap().is_refuted());
        assert!(endotactic_sampled(&hc, &[w]).unwrap().is_refuted());

        let ab = parse_network("A -> B\nB -> A").unwrap();
        let dirs = candidate_directions(&ab, 4, 7);
        assert!(dirs.contains(&q_vec(&[1, -1])) && dirs.contains(&q_vec(&[-1, 1])));
        assert!(!endotactic_sampled(&ab, &dirs).unwrap().is_refuted());
        assert_eq!(
            parallel_sweep_sampled(&ab, &[q_vec(&[1, 1])]),
            Err(GeometryError::DirectionInOrthogonalComplement)
        );
    }

    #[test]
    fn candidate_directions_are_seed_stable() {
        let hc = parse_network("X1 + X2 -> X1 + 2X2\nX2 + X3 -> X2 + 2X3\nX3 + X1 -> X3 + 2X1").unwrap();
        let a = candidate_directions(&hc, 10, 42);
        assert_eq!(a, candidate_directions(&hc, 10, 42));
        for i in 0..3 {
            let mut e = vec![q(0); 3];
            e[i] = q(1);
            assert!(a.contains(&e));
        }
    }
}
