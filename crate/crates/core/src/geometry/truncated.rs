use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use super::{Face, GeometryError, RationalVector};
use crate::linalg::{dot, q};

/// Points `2e_i + e_j` for `i != j`, ordered by `i` then `j`.
pub fn truncated_simplex(n: usize) -> Result<Vec<RationalVector>, GeometryError> {
    if n < 2 {
        return Err(GeometryError::TooFewSpecies(n));
    }
    Ok(pairs(n)
        .map(|(i, j)| {
            let mut v = alloc::vec![q(0); n];
            v[i] = q(2);
            v[j] = q(1);
            v
        })
        .collect())
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruncatedFaceKind {
    /// Lies in the corner cut at one vertex of the big simplex: every point
    /// has the same doubled species.
    SimplexFace,
    /// All points `2e_a + e_b` over a species set of size `r + 1`.
    TruncatedSubsimplex(usize),
}

/// Classifies a face of `truncated_simplex(n)`; its indices refer to that
/// point list. Exactly one of the two kinds must apply.
pub fn classify_truncated_face(face: &Face, n: usize) -> Result<TruncatedFaceKind, GeometryError> {
    let points = truncated_simplex(n)?;
    let labels: Vec<(usize, usize)> = pairs(n).collect();
    if face.vertex_indices.is_empty() || face.vertex_indices.len() == points.len() {
        return Err(GeometryError::NotAFace(format!("{} points", face.vertex_indices.len())));
    }
    if face.normal.len() != n {
        return Err(GeometryError::DimensionMismatch {
            expected: n,
            found: face.normal.len(),
        });
    }
    let on: BTreeSet<usize> = face.vertex_indices.iter().copied().collect();
    if on.iter().any(|&i| i >= points.len()) {
        return Err(GeometryError::NotAFace(format!("index out of range for n = {n}")));
    }
    for (i, p) in points.iter().enumerate() {
        let v = dot(&face.normal, p);
        let ok = if on.contains(&i) { v == face.offset } else { v > face.offset };
        if !ok {
            return Err(GeometryError::NotAFace(format!("supporting inequality fails at point {i}")));
        }
    }

    let heavy: BTreeSet<usize> = on.iter().map(|&k| labels[k].0).collect();
    let species: BTreeSet<usize> = on.iter().flat_map(|&k| [labels[k].0, labels[k].1]).collect();
    let complete = labels
        .iter()
        .enumerate()
        .filter(|(_, (a, b))| species.contains(a) && species.contains(b))
        .all(|(k, _)| on.contains(&k));

    match (heavy.len() == 1, complete) {
        (true, false) => Ok(TruncatedFaceKind::SimplexFace),
        (false, true) => Ok(TruncatedFaceKind::TruncatedSubsimplex(species.len() - 1)),
        (true, true) => Err(GeometryError::Dichotomy(format!("{:?} is both kinds", face.vertex_indices))),
        (false, false) => Err(GeometryError::Dichotomy(format!("{:?} is neither kind", face.vertex_indices))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{affine_dim, enumerate_proper_faces, ConvexHull};
    use crate::linalg::q_vec;

    #[test]
    fn small_truncated_simplices() {
        assert_eq!(truncated_simplex(2).unwrap(), alloc::vec![q_vec(&[2, 1]), q_vec(&[1, 2])]);
        assert_eq!(affine_dim(&truncated_simplex(3).unwrap()).unwrap(), 2);
        assert_eq!(affine_dim(&truncated_simplex(4).unwrap()).unwrap(), 3);
        assert!(truncated_simplex(1).is_err());
    }

    #[test]
    fn hexagon_has_six_edges() {
        let hull = ConvexHull::new(&truncated_simplex(3).unwrap()).unwrap();
        let facets = hull.facets();
        assert_eq!(facets.len(), 6);
        let faces = enumerate_proper_faces(&truncated_simplex(3).unwrap()).unwrap();
        assert_eq!(faces.len(), 12);
    }

    #[test]
    fn hexagon_edges_classify() {
        let faces = ConvexHull::new(&truncated_simplex(3).unwrap()).unwrap().facets();
        let kinds: Vec<_> = faces.iter().map(|f| classify_truncated_face(f, 3).unwrap()).collect();
        assert_eq!(kinds.iter().filter(|k| **k == TruncatedFaceKind::SimplexFace).count(), 3);
        assert_eq!(
            kinds.iter().filter(|k| **k == TruncatedFaceKind::TruncatedSubsimplex(1)).count(),
            3
        );
    }

    #[test]
    fn rejects_non_faces() {
        let mut f = ConvexHull::new(&truncated_simplex(3).unwrap()).unwrap().facets()[0].clone();
        f.offset += q(1);
        assert!(matches!(classify_truncated_face(&f, 3), Err(GeometryError::NotAFace(_))));
    }
}
