//! Exact convex hulls by the double description method.
//!
//! Points are first expressed in coordinates of their affine hull (the pivot
//! columns of the reduced difference matrix), where they span full dimension.
//! Facets are the extreme rays of the cone of valid inequalities
//! `{(a, b) : a.q - b >= 0 for every point q}`, and the remaining faces are
//! intersections of facets.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Face, GeometryError, RationalVector};
use crate::linalg::{dot, primitive_integer, solve_square, RowEchelon, Q};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn is_subset(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn indices(&self, len: usize) -> Vec<usize> {
        (0..len).filter(|&i| self.get(i)).collect()
    }
}

#[derive(Debug, Clone)]
struct Facet {
    points: Bits,
    // Normal in ambient coordinates, lying in the hull's direction space.
    normal: Vec<Q>,
}

/// Convex hull of a finite point set with its facet description.
#[derive(Debug, Clone)]
pub struct ConvexHull {
    points: Vec<RationalVector>,
    directions: RowEchelon,
    facets: Vec<Facet>,
}

impl ConvexHull {
    pub fn new(points: &[RationalVector]) -> Result<Self, GeometryError> {
        let Some(first) = points.first() else {
            return Err(GeometryError::Empty);
        };
        let width = first.len();
        if let Some(p) = points.iter().find(|p| p.len() != width) {
            return Err(GeometryError::DimensionMismatch {
                expected: width,
                found: p.len(),
            });
        }
        let diffs: Vec<Vec<Q>> = points.iter().map(|p| sub(p, first)).collect();
        let directions = RowEchelon::new(diffs, width);
        let mut hull = ConvexHull {
            points: points.to_vec(),
            directions,
            facets: Vec::new(),
        };
        if hull.dim() > 0 {
            hull.facets = hull.compute_facets();
        }
        Ok(hull)
    }

    /// Affine dimension of the point set.
    pub fn dim(&self) -> usize {
        self.directions.rank()
    }

    pub fn points(&self) -> &[RationalVector] {
        &self.points
    }

    fn anchor(&self) -> &RationalVector {
        &self.points[0]
    }

    /// Exact membership test.
    pub fn contains(&self, x: &[Q]) -> bool {
        if x.len() != self.anchor().len() {
            return false;
        }
        if !self.directions.contains(&sub(x, self.anchor())) {
            return false;
        }
        self.facets.iter().all(|f| {
            let offset = self.offset_of(&f.normal, &f.points);
            dot(&f.normal, x) >= offset
        })
    }

    fn offset_of(&self, normal: &[Q], on: &Bits) -> Q {
        let i = (0..self.points.len()).find(|&i| on.get(i)).expect("nonempty face");
        dot(normal, &self.points[i])
    }

    pub fn facets(&self) -> Vec<Face> {
        let mut out: Vec<Face> = self
            .facets
            .iter()
            .map(|f| self.make_face(&f.points, f.normal.clone()))
            .collect();
        out.sort_by(|a, b| a.vertex_indices.cmp(&b.vertex_indices));
        out
    }

    /// Every nonempty proper face, ordered by dimension then vertex list.
    pub fn faces(&self) -> Vec<Face> {
        let mut seen: BTreeSet<Bits> = BTreeSet::new();
        let mut queue: Vec<Bits> = Vec::new();
        for f in &self.facets {
            if seen.insert(f.points.clone()) {
                queue.push(f.points.clone());
            }
        }
        let mut k = 0;
        while k < queue.len() {
            let current = queue[k].clone();
            k += 1;
            for f in &self.facets {
                let meet = current.and(&f.points);
                if !meet.is_empty() && seen.insert(meet.clone()) {
                    queue.push(meet);
                }
            }
        }
        let mut out: Vec<Face> = queue
            .iter()
            .map(|set| {
                let mut normal = vec![Q::zero(); self.anchor().len()];
                for f in self.facets.iter().filter(|f| set.is_subset(&f.points)) {
                    for (a, b) in normal.iter_mut().zip(&f.normal) {
                        *a += b;
                    }
                }
                self.make_face(set, normal)
            })
            .collect();
        out.sort_by(|a, b| (a.dim, &a.vertex_indices).cmp(&(b.dim, &b.vertex_indices)));
        out
    }

    fn make_face(&self, set: &Bits, normal: Vec<Q>) -> Face {
        let normal: Vec<Q> = primitive_integer(&self.directions.project(&normal))
            .into_iter()
            .map(Q::from_integer)
            .collect();
        let vertex_indices = set.indices(self.points.len());
        let base = &self.points[vertex_indices[0]];
        let diffs: Vec<Vec<Q>> = vertex_indices.iter().map(|&i| sub(&self.points[i], base)).collect();
        let dim = RowEchelon::new(diffs, base.len()).rank();
        let offset = dot(&normal, base);
        Face {
            vertex_indices,
            normal,
            offset,
            dim,
        }
    }

    fn compute_facets(&self) -> Vec<Facet> {
        let pivots = &self.directions.pivots;
        let d = pivots.len() + 1;
        let m = self.points.len();

        // Homogenized constraint rows (q_pivots, -1), scaled to integers.
        let rows: Vec<Vec<BigInt>> = self
            .points
            .iter()
            .map(|p| {
                let mut row: Vec<Q> = pivots.iter().map(|&c| p[c].clone()).collect();
                row.push(-Q::one());
                let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                row.iter().map(|x| (x * Q::from_integer(lcm.clone())).to_integer()).collect()
            })
            .collect();

        // Far points first: they are the likely vertices.
        let mut order: Vec<usize> = (0..m).collect();
        let norms: Vec<BigInt> = rows.iter().map(|r| r[..d - 1].iter().map(|x| x * x).sum()).collect();
        order.sort_by(|&a, &b| norms[b].cmp(&norms[a]).then(a.cmp(&b)));

        // Initial simplicial cone from d linearly independent rows.
        let mut basis: Vec<usize> = Vec::new();
        let mut echelon = RowEchelon::new(Vec::new(), d);
        for &i in &order {
            let row: Vec<Q> = rows[i].iter().cloned().map(Q::from_integer).collect();
            if !echelon.contains(&row) {
                basis.push(i);
                let mut all = echelon.rows.clone();
                all.push(row);
                echelon = RowEchelon::new(all, d);
                if basis.len() == d {
                    break;
                }
            }
        }
        debug_assert_eq!(basis.len(), d);

        let mut rays: Vec<(Vec<BigInt>, Bits)> = Vec::with_capacity(d);
        for j in 0..d {
            // Column j of the inverse: A x = e_j.
            let mut aug: Vec<Vec<Q>> = basis
                .iter()
                .enumerate()
                .map(|(r, &i)| {
                    let mut row: Vec<Q> = rows[i].iter().cloned().map(Q::from_integer).collect();
                    row.push(if r == j { Q::one() } else { Q::zero() });
                    row
                })
                .collect();
            let x = solve_square(&mut aug).expect("independent rows");
            let mut zeros = Bits::new(m);
            for (r, &i) in basis.iter().enumerate() {
                if r != j {
                    zeros.set(i);
                }
            }
            rays.push((primitive_integer(&x), zeros));
        }

        let in_basis: BTreeSet<usize> = basis.iter().copied().collect();
        for &h in order.iter().filter(|i| !in_basis.contains(i)) {
            let values: Vec<BigInt> = rays.iter().map(|(r, _)| int_dot(&rows[h], r)).collect();
            if values.iter().all(|v| !v.is_negative()) {
                for ((_, z), v) in rays.iter_mut().zip(&values) {
                    if v.is_zero() {
                        z.set(h);
                    }
                }
                continue;
            }
            let pos: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_positive()).collect();
            let neg: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_negative()).collect();
            let mut next: Vec<(Vec<BigInt>, Bits)> = Vec::new();
            for (i, (r, z)) in rays.iter().enumerate() {
                if !values[i].is_negative() {
                    let mut z = z.clone();
                    if values[i].is_zero() {
                        z.set(h);
                    }
                    next.push((r.clone(), z));
                }
            }
            for &p in &pos {
                for &q in &neg {
                    let common = rays[p].1.and(&rays[q].1);
                    if common.count() + 2 < d {
                        continue;
                    }
                    let adjacent = (0..rays.len())
                        .filter(|&k| k != p && k != q)
                        .all(|k| !common.is_subset(&rays[k].1));
                    if !adjacent {
                        continue;
                    }
                    let (vp, vq) = (&values[p], &values[q]);
                    let ray: Vec<BigInt> = rays[q]
                        .0
                        .iter()
                        .zip(&rays[p].0)
                        .map(|(a, b)| vp * a - vq * b)
                        .collect();
                    let mut z = common;
                    z.set(h);
                    next.push((primitive_bigint(ray), z));
                }
            }
            rays = next;
        }

        rays.into_iter()
            .filter(|(r, _)| r[..d - 1].iter().any(|x| !x.is_zero()))
            .map(|(r, points)| {
                let mut normal = vec![Q::zero(); self.anchor().len()];
                for (k, &c) in pivots.iter().enumerate() {
                    normal[c] = Q::from_integer(r[k].clone());
                }
                Facet {
                    points,
                    normal: self.directions.project(&normal),
                }
            })
            .collect()
    }
}

fn sub(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn int_dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn primitive_bigint(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        return v;
    }
    v.into_iter().map(|x| x / &g).collect()
}
