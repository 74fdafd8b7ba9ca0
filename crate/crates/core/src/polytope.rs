//! Generator representations of polyhedra.
//!
//! [`vertex_enumerate`] converts `{x : Ax ≤ b}` to `conv(V) + cone(R)` with
//! the double description method on the homogenized cone
//! `{(x, t) : b t - A x ≥ 0, t ≥ 0}`, inserting constraints in row order.
//! A lineality space is reported as a pair of opposite rays.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::lp::{lp_solve, LinearProgram, LpOutcome, Relation};
use crate::model::HPolyhedron;
use crate::scalar::{dot, normalize_direction, primitive, Scalar};

/// `conv(vertices) + cone(rays)`.
///
/// Vertices and rays are deduplicated and sorted; rays are scaled so the
/// first nonzero entry has absolute value one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VPolytope {
    dim: usize,
    vertices: Vec<Vec<Scalar>>,
    rays: Vec<Vec<Scalar>>,
}

impl VPolytope {
    pub fn empty(dim: usize) -> Self {
        VPolytope {
            dim,
            vertices: Vec::new(),
            rays: Vec::new(),
        }
    }

    /// Builds a canonical generator list. Rays are normalized, zero rays are
    /// dropped, and duplicates removed. No redundancy pruning happens here.
    pub fn new(dim: usize, vertices: Vec<Vec<Scalar>>, rays: Vec<Vec<Scalar>>) -> Result<Self> {
        for v in vertices.iter().chain(&rays) {
            check_dim(dim, v.len())?;
        }
        if vertices.is_empty() && !rays.is_empty() {
            return Err(Error::InvalidInput(
                "a nonempty generator set needs at least one vertex".into(),
            ));
        }
        let mut vertices = vertices;
        vertices.sort();
        vertices.dedup();
        let mut rays: Vec<Vec<Scalar>> = rays
            .iter()
            .filter(|r| r.iter().any(|x| !x.is_zero()))
            .map(|r| normalize_direction(r))
            .collect();
        rays.sort();
        rays.dedup();
        Ok(VPolytope {
            dim,
            vertices,
            rays,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<Scalar>] {
        &self.vertices
    }

    pub fn rays(&self) -> &[Vec<Scalar>] {
        &self.rays
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty()
    }

    /// `λ·P` for `λ > 0`.
    pub fn scaled(&self, lambda: &Scalar) -> VPolytope {
        let vertices = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|x| x * lambda).collect())
            .collect();
        VPolytope::new(self.dim, vertices, self.rays.clone()).expect("dimensions preserved")
    }

    /// Membership in `conv(V) + cone(R)` by one feasibility LP.
    pub fn contains(&self, x: &[Scalar]) -> Result<bool> {
        check_dim(self.dim, x.len())?;
        Ok(combination_exists(&self.vertices, &self.rays, x))
    }

    /// Set equality by mutual generator containment.
    pub fn same_set(&self, other: &VPolytope) -> bool {
        if self == other {
            return true;
        }
        if self.dim != other.dim || self.is_empty() != other.is_empty() {
            return false;
        }
        let inside = |a: &VPolytope, b: &VPolytope| {
            a.vertices
                .iter()
                .all(|v| combination_exists(&b.vertices, &b.rays, v))
                && a.rays.iter().all(|r| combination_exists(&[], &b.rays, r))
        };
        inside(self, other) && inside(other, self)
    }
}

/// Is `x = Σ μ_i v_i + Σ ν_j r_j` with `μ, ν ≥ 0` and `Σ μ = 1`? With no
/// vertices the convexity row is dropped, giving conic membership.
fn combination_exists(vertices: &[Vec<Scalar>], rays: &[Vec<Scalar>], x: &[Scalar]) -> bool {
    let k = vertices.len() + rays.len();
    if k == 0 {
        return vertices.is_empty() && x.iter().all(Scalar::is_zero);
    }
    let mut lp = LinearProgram::new(k);
    for j in 0..k {
        lp.nonneg(j);
    }
    for (c, xc) in x.iter().enumerate() {
        let terms: Vec<(usize, Scalar)> = vertices
            .iter()
            .chain(rays)
            .enumerate()
            .filter(|(_, g)| !g[c].is_zero())
            .map(|(j, g)| (j, g[c].clone()))
            .collect();
        lp.add_sparse(&terms, Relation::Eq, xc.clone());
    }
    if !vertices.is_empty() {
        let terms: Vec<(usize, Scalar)> = (0..vertices.len()).map(|j| (j, Scalar::one())).collect();
        lp.add_sparse(&terms, Relation::Eq, Scalar::one());
    }
    !matches!(lp_solve(&lp), Ok(LpOutcome::Infeasible { .. }))
}

/// Small fixed-width bitset over constraint indices.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64).max(1)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
    fn is_subset_of(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

struct Ray {
    v: Vec<Scalar>,
    zeros: Bits,
}

/// Extreme rays and lineality basis of `{y : H y ≥ 0}`.
struct ConeGenerators {
    lines: Vec<Vec<Scalar>>,
    rays: Vec<Vec<Scalar>>,
}

fn double_description(dim: usize, constraints: &[Vec<Scalar>]) -> ConeGenerators {
    let m = constraints.len();
    let mut lines: Vec<Vec<Scalar>> = (0..dim)
        .map(|i| {
            let mut e = vec![Scalar::zero(); dim];
            e[i] = Scalar::one();
            e
        })
        .collect();
    let mut rays: Vec<Ray> = Vec::new();

    for (ci, h) in constraints.iter().enumerate() {
        if let Some(pos) = lines.iter().position(|l| !dot(h, l).is_zero()) {
            let mut l = lines.remove(pos);
            let mut hl = dot(h, &l);
            if hl.is_negative() {
                l = l.iter().map(|x| -x).collect();
                hl = -hl;
            }
            for other in lines.iter_mut() {
                let c = dot(h, other);
                if !c.is_zero() {
                    let f = &c / &hl;
                    let moved: Vec<Scalar> = other.iter().zip(&l).map(|(o, li)| o - &f * li).collect();
                    *other = primitive(&moved);
                }
            }
            for r in rays.iter_mut() {
                let c = dot(h, &r.v);
                if !c.is_zero() {
                    let f = &c / &hl;
                    let moved: Vec<Scalar> = r.v.iter().zip(&l).map(|(o, li)| o - &f * li).collect();
                    r.v = primitive(&moved);
                }
                r.zeros.set(ci);
            }
            let mut zeros = Bits::new(m);
            for k in 0..ci {
                zeros.set(k);
            }
            rays.push(Ray {
                v: primitive(&l),
                zeros,
            });
            continue;
        }

        let values: Vec<Scalar> = rays.iter().map(|r| dot(h, &r.v)).collect();
        let min_common = dim.saturating_sub(lines.len() + 2);
        let mut next: Vec<Ray> = Vec::with_capacity(rays.len());
        for (r, val) in rays.iter().zip(&values) {
            if !val.is_negative() {
                let mut zeros = r.zeros.clone();
                if val.is_zero() {
                    zeros.set(ci);
                }
                next.push(Ray {
                    v: r.v.clone(),
                    zeros,
                });
            }
        }
        for (pi, p) in rays.iter().enumerate() {
            if !values[pi].is_positive() {
                continue;
            }
            for (ni, n) in rays.iter().enumerate() {
                if !values[ni].is_negative() {
                    continue;
                }
                let common = p.zeros.and(&n.zeros);
                if common.count() < min_common {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(k, r)| k == pi || k == ni || !common.is_subset_of(&r.zeros));
                if !adjacent {
                    continue;
                }
                let v: Vec<Scalar> = n
                    .v
                    .iter()
                    .zip(&p.v)
                    .map(|(nv, pv)| &values[pi] * nv - &values[ni] * pv)
                    .collect();
                let mut zeros = common;
                zeros.set(ci);
                next.push(Ray {
                    v: primitive(&v),
                    zeros,
                });
            }
        }
        rays = next;
    }
    ConeGenerators {
        lines,
        rays: rays.into_iter().map(|r| r.v).collect(),
    }
}

/// Generator representation of `{x : Ax ≤ b}`; both lists are empty iff
/// the set is empty.
pub fn vertex_enumerate(p: &HPolyhedron) -> VPolytope {
    let n = p.dim();
    // Homogenized coordinates (x, t), t last.
    let mut cone_rows = Vec::with_capacity(p.num_rows() + 1);
    let mut t_row = vec![Scalar::zero(); n + 1];
    t_row[n] = Scalar::one();
    cone_rows.push(t_row);
    for (row, b) in p.rows().iter().zip(p.rhs()) {
        let mut h: Vec<Scalar> = row.iter().map(|v| -v).collect();
        h.push(b.clone());
        cone_rows.push(h);
    }
    let gens = double_description(n + 1, &cone_rows);

    let mut vertices = Vec::new();
    let mut rays = Vec::new();
    for g in &gens.rays {
        let t = &g[n];
        if t.is_positive() {
            vertices.push(g[..n].iter().map(|x| x / t).collect::<Vec<_>>());
        } else {
            rays.push(g[..n].to_vec());
        }
    }
    if vertices.is_empty() {
        return VPolytope::empty(n);
    }
    for l in &gens.lines {
        debug_assert!(l[n].is_zero());
        rays.push(l[..n].to_vec());
        rays.push(l[..n].iter().map(|x| -x).collect());
    }
    VPolytope::new(n, vertices, rays).expect("dimensions consistent")
}

/// Coordinate projection of `P` onto the `keep` indices, as an irredundant
/// generator list.
pub fn project(p: &HPolyhedron, keep: &[usize]) -> Result<VPolytope> {
    if let Some(&bad) = keep.iter().find(|&&k| k >= p.dim()) {
        return Err(Error::InvalidInput(format!(
            "projection index {bad} out of range for dimension {}",
            p.dim()
        )));
    }
    let lifted = vertex_enumerate(p);
    let pick = |v: &Vec<Scalar>| keep.iter().map(|&k| v[k].clone()).collect::<Vec<_>>();
    if lifted.is_empty() {
        return Ok(VPolytope::empty(keep.len()));
    }
    let raw = VPolytope::new(
        keep.len(),
        lifted.vertices().iter().map(pick).collect(),
        lifted.rays().iter().map(pick).collect(),
    )?;
    Ok(prune(raw))
}

/// Removes generators that are combinations of the remaining ones.
pub fn prune(p: VPolytope) -> VPolytope {
    let VPolytope {
        dim,
        vertices,
        mut rays,
    } = p;
    let mut i = 0;
    while i < rays.len() {
        let others: Vec<Vec<Scalar>> = rays
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, r)| r.clone())
            .collect();
        if combination_exists(&[], &others, &rays[i]) {
            rays.remove(i);
        } else {
            i += 1;
        }
    }
    let mut vertices = vertices;
    let mut i = 0;
    while i < vertices.len() {
        let others: Vec<Vec<Scalar>> = vertices
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, v)| v.clone())
            .collect();
        if !others.is_empty() && combination_exists(&others, &rays, &vertices[i]) {
            vertices.remove(i);
        } else {
            i += 1;
        }
    }
    VPolytope {
        dim,
        vertices,
        rays,
    }
}

/// Exact membership in `{x : Ax ≤ b}`.
pub fn h_member(p: &HPolyhedron, x: &[Scalar]) -> Result<bool> {
    p.contains(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ivec;
    use proptest::prelude::*;

    fn hpoly(dim: usize, rows: &[(&[i64], i64)]) -> HPolyhedron {
        HPolyhedron::new(
            dim,
            rows.iter().map(|(a, _)| ivec(a)).collect(),
            rows.iter().map(|(_, b)| Scalar::from_int(*b)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn interval() {
        let v = vertex_enumerate(&hpoly(1, &[(&[-1], 0), (&[1], 1)]));
        assert_eq!(v.vertices(), &[ivec(&[0]), ivec(&[1])]);
        assert!(v.rays().is_empty());
    }

    #[test]
    fn orthant() {
        let v = vertex_enumerate(&hpoly(2, &[(&[-1, 0], 0), (&[0, -1], 0)]));
        assert_eq!(v.vertices(), &[ivec(&[0, 0])]);
        assert_eq!(v.rays(), &[ivec(&[0, 1]), ivec(&[1, 0])]);
    }

    #[test]
    fn empty_interval() {
        let v = vertex_enumerate(&hpoly(1, &[(&[1], 0), (&[-1], -1)]));
        assert!(v.is_empty());
        assert!(v.rays().is_empty());
    }

    #[test]
    fn whole_space_and_halfplane() {
        let v = vertex_enumerate(&HPolyhedron::whole(2));
        assert_eq!(v.vertices().len(), 1);
        assert_eq!(v.rays().len(), 4);
        let h = vertex_enumerate(&hpoly(2, &[(&[-1, 0], 0)]));
        assert_eq!(h.vertices().len(), 1);
        assert!(h.contains(&ivec(&[5, -7])).unwrap());
        assert!(!h.contains(&ivec(&[-1, 0])).unwrap());
    }

    #[test]
    fn square_with_redundant_row() {
        let v = vertex_enumerate(&hpoly(
            2,
            &[(&[1, 0], 1), (&[-1, 0], 0), (&[0, 1], 1), (&[0, -1], 0), (&[1, 1], 5)],
        ));
        assert_eq!(
            v.vertices(),
            &[ivec(&[0, 0]), ivec(&[0, 1]), ivec(&[1, 0]), ivec(&[1, 1])]
        );
    }

    #[test]
    fn projection_examples() {
        // y = z, 0 <= z <= 1 over (y, z).
        let mut p = HPolyhedron::whole(2);
        p.push_equality(ivec(&[1, -1]), Scalar::zero()).unwrap();
        p.push(ivec(&[0, -1]), Scalar::zero()).unwrap();
        p.push(ivec(&[0, 1]), Scalar::one()).unwrap();
        let proj = project(&p, &[0]).unwrap();
        assert_eq!(proj.vertices(), &[ivec(&[0]), ivec(&[1])]);
        assert!(proj.rays().is_empty());

        // y >= z, z >= 0.
        let q = hpoly(2, &[(&[-1, 1], 0), (&[0, -1], 0)]);
        let proj = project(&q, &[0]).unwrap();
        assert_eq!(proj.vertices(), &[ivec(&[0])]);
        assert_eq!(proj.rays(), &[ivec(&[1])]);

        let e = hpoly(2, &[(&[1, 0], 0), (&[-1, 0], -1)]);
        assert!(project(&e, &[0]).unwrap().is_empty());
        assert!(project(&e, &[2]).is_err());
    }

    #[test]
    fn membership_examples() {
        let p = hpoly(1, &[(&[1], 1)]);
        assert!(h_member(&p, &ivec(&[1])).unwrap());
        assert!(!h_member(&p, &ivec(&[2])).unwrap());
        assert!(h_member(&HPolyhedron::whole(3), &ivec(&[9, -9, 4])).unwrap());
        assert!(h_member(&p, &ivec(&[1, 2])).is_err());
    }

    #[test]
    fn projection_pruning_drops_interior_images() {
        // Square pyramid over a square: apex projects into the base.
        let p = hpoly(
            3,
            &[
                (&[-1, 0, 1], 0),
                (&[1, 0, 1], 2),
                (&[0, -1, 1], 0),
                (&[0, 1, 1], 2),
                (&[0, 0, -1], 0),
            ],
        );
        let proj = project(&p, &[0, 1]).unwrap();
        assert_eq!(proj.vertices().len(), 4);
    }

    fn rank(rows: &[Vec<Scalar>]) -> usize {
        let mut m: Vec<Vec<Scalar>> = rows.to_vec();
        let cols = m.first().map_or(0, |r| r.len());
        let mut r = 0;
        for c in 0..cols {
            let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(r, p);
            let piv = m[r][c].clone();
            for i in 0..m.len() {
                if i != r && !m[i][c].is_zero() {
                    let f = &m[i][c] / &piv;
                    let pr = m[r].clone();
                    for (x, y) in m[i].iter_mut().zip(&pr) {
                        *x -= &f * y;
                    }
                }
            }
            r += 1;
        }
        r
    }

    fn random_poly() -> impl Strategy<Value = HPolyhedron> {
        (1usize..=3).prop_flat_map(|n| {
            prop::collection::vec((prop::collection::vec(-3i64..=3, n), -4i64..=6), 1..=7).prop_map(
                move |rows| {
                    HPolyhedron::new(
                        n,
                        rows.iter().map(|(a, _)| ivec(a)).collect(),
                        rows.iter().map(|(_, b)| Scalar::from_int(*b)).collect(),
                    )
                    .unwrap()
                },
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn enumerated_generators_are_valid(p in random_poly()) {
            let v = vertex_enumerate(&p);
            let n = p.dim();
            prop_assert_eq!(v.is_empty(), p.is_empty());
            let pointed = v.rays().iter().all(|r| {
                let neg: Vec<Scalar> = r.iter().map(|x| -x).collect();
                !v.rays().contains(&neg)
            });
            for x in v.vertices() {
                prop_assert!(p.contains(x).unwrap());
                if pointed {
                    let tight: Vec<Vec<Scalar>> = p
                        .rows()
                        .iter()
                        .zip(p.rhs())
                        .filter(|(r, b)| &dot(r, x) == *b)
                        .map(|(r, _)| r.clone())
                        .collect();
                    prop_assert_eq!(rank(&tight), n);
                }
            }
            for r in v.rays() {
                prop_assert!(p.rows().iter().all(|row| !dot(row, r).is_positive()));
            }
        }

        #[test]
        fn projection_is_sound(p in random_poly(), samples in prop::collection::vec(prop::collection::vec(0i64..=5, 8), 3)) {
            let n = p.dim();
            prop_assume!(n >= 2);
            let keep: Vec<usize> = (0..n - 1).collect();
            let proj = project(&p, &keep).unwrap();
            let full = vertex_enumerate(&p);
            prop_assert_eq!(proj.is_empty(), full.is_empty());
            // Every projected vertex has a preimage in P.
            for g in proj.vertices() {
                let mut lp = LinearProgram::new(n);
                p.add_to_lp(&mut lp, 0);
                for (i, &k) in keep.iter().enumerate() {
                    lp.add_sparse(&[(k, Scalar::one())], Relation::Eq, g[i].clone());
                }
                match lp_solve(&lp).unwrap() {
                    LpOutcome::Infeasible { .. } => prop_assert!(false, "no preimage"),
                    LpOutcome::Optimal { x, .. } => prop_assert!(p.contains(&x).unwrap()),
                    LpOutcome::Unbounded { .. } => unreachable!(),
                }
            }
            // Points of P built from its own generators project into the result.
            if !full.is_empty() {
                for w in &samples {
                    let mut pt = vec![Scalar::zero(); n];
                    let nv = full.vertices().len();
                    let total: i64 = w.iter().take(nv).sum::<i64>().max(1);
                    for (i, vtx) in full.vertices().iter().enumerate() {
                        let wi = if i < w.len() { w[i] } else { 0 };
                        let wi = if w.iter().take(nv).sum::<i64>() == 0 && i == 0 { 1 } else { wi };
                        for (c, x) in pt.iter_mut().zip(vtx) {
                            *c += Scalar::frac(wi, total) * x;
                        }
                    }
                    for (j, r) in full.rays().iter().enumerate() {
                        let wj = w[(j + 3) % w.len()];
                        for (c, x) in pt.iter_mut().zip(r) {
                            *c += Scalar::from_int(wj) * x;
                        }
                    }
                    prop_assert!(p.contains(&pt).unwrap());
                    let image: Vec<Scalar> = keep.iter().map(|&k| pt[k].clone()).collect();
                    prop_assert!(proj.contains(&image).unwrap());
                }
            }
        }
    }
}
