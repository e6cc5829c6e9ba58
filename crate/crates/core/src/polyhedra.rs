//! Exact rational polyhedral kernel: double description between V- and
//! H-representations, intersections, line detection, segment extraction,
//! and lattice points on segments. Intended for desk-scale dimensions
//! (the documented soft limit is 8).

use crate::error::{Error, Result};
use crate::num::{
    self, dot, format_q, is_nonneg_multiple, is_zero_vec, primitive, q_of, sub, Int, Q,
};
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::Serialize;

pub const DIMENSION_SOFT_LIMIT: usize = 8;

/// Translated cone: apex plus the nonnegative span of primitive integer
/// generators. This is the shape dominance pieces take.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PointedCone {
    pub apex: Vec<Q>,
    pub generators: Vec<Vec<Int>>,
}

impl PointedCone {
    pub fn new(apex: Vec<Q>, generators: Vec<Vec<Q>>) -> Self {
        let mut gens: Vec<Vec<Int>> = generators
            .iter()
            .filter(|g| !is_zero_vec(g))
            .map(|g| primitive(g))
            .collect();
        gens.sort();
        gens.dedup();
        PointedCone {
            apex,
            generators: gens,
        }
    }

    pub fn dim(&self) -> usize {
        self.apex.len()
    }

    pub fn generators_q(&self) -> Vec<Vec<Q>> {
        self.generators.iter().map(|g| num::qvec_of_ints(g)).collect()
    }

    pub fn to_polyhedron(&self) -> Polyhedron {
        Polyhedron {
            vertices: vec![self.apex.clone()],
            rays: self.generators.clone(),
            lineality: vec![],
        }
    }

    pub fn to_hrep(&self) -> HPolyhedron {
        dual_description(self)
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        self.to_hrep().contains(x)
    }
}

impl Serialize for PointedCone {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("PointedCone", 2)?;
        let apex: Vec<String> = self.apex.iter().map(format_q).collect();
        let gens: Vec<Vec<String>> = self
            .generators
            .iter()
            .map(|g| g.iter().map(|x| x.to_string()).collect())
            .collect();
        st.serialize_field("apex", &apex)?;
        st.serialize_field("generators", &gens)?;
        st.end()
    }
}

/// Inequalities `normal·x ≥ offset` and equalities `normal·x = offset`,
/// with primitive integral normals.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct HPolyhedron {
    pub ineqs: Vec<(Vec<Int>, Q)>,
    pub eqs: Vec<(Vec<Int>, Q)>,
}

impl HPolyhedron {
    pub fn new(ineqs: Vec<(Vec<Q>, Q)>, eqs: Vec<(Vec<Q>, Q)>) -> Self {
        let norm = |(a, b): (Vec<Q>, Q)| -> (Vec<Int>, Q) {
            if is_zero_vec(&a) {
                return (vec![Int::zero(); a.len()], b);
            }
            // scale so the normal is primitive integral
            let p = primitive(&a);
            let i = a.iter().position(|x| !x.is_zero()).unwrap();
            let scale = q_of(&p[i]) / &a[i];
            (p, b * scale)
        };
        let mut h = HPolyhedron {
            ineqs: ineqs.into_iter().map(norm).collect(),
            eqs: eqs.into_iter().map(norm).collect(),
        };
        h.ineqs.sort();
        h.ineqs.dedup();
        h.eqs.sort();
        h.eqs.dedup();
        h
    }

    pub fn dim(&self) -> usize {
        self.ineqs
            .first()
            .map(|(a, _)| a.len())
            .or_else(|| self.eqs.first().map(|(a, _)| a.len()))
            .unwrap_or(0)
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        self.ineqs
            .iter()
            .all(|(a, b)| dot(&num::qvec_of_ints(a), x) >= *b)
            && self
                .eqs
                .iter()
                .all(|(a, b)| dot(&num::qvec_of_ints(a), x) == *b)
    }

    /// Direction test for recession: `a·r ≥ 0` on inequalities, `= 0` on equalities.
    pub fn admits_ray(&self, r: &[Q]) -> bool {
        self.ineqs
            .iter()
            .all(|(a, _)| !dot(&num::qvec_of_ints(a), r).is_negative())
            && self.eqs.iter().all(|(a, _)| dot(&num::qvec_of_ints(a), r).is_zero())
    }

    pub fn admits_line(&self, l: &[Q]) -> bool {
        self.ineqs.iter().all(|(a, _)| dot(&num::qvec_of_ints(a), l).is_zero())
            && self.eqs.iter().all(|(a, _)| dot(&num::qvec_of_ints(a), l).is_zero())
    }

    pub fn intersection(&self, other: &HPolyhedron) -> HPolyhedron {
        let mut h = self.clone();
        h.ineqs.extend(other.ineqs.iter().cloned());
        h.eqs.extend(other.eqs.iter().cloned());
        h.ineqs.sort();
        h.ineqs.dedup();
        h.eqs.sort();
        h.eqs.dedup();
        h
    }

    pub fn to_vrep(&self, dim: usize) -> Polyhedron {
        vrep_of_hrep(self, dim)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "ineqs": self.ineqs.iter().map(|(a, b)| serde_json::json!({
                "normal": a.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "offset": format_q(b),
            })).collect::<Vec<_>>(),
            "eqs": self.eqs.iter().map(|(a, b)| serde_json::json!({
                "normal": a.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "offset": format_q(b),
            })).collect::<Vec<_>>(),
        })
    }
}

/// General V-representation: convex hull of vertices plus the cone of rays
/// plus the span of lineality directions. No vertices means empty.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polyhedron {
    pub vertices: Vec<Vec<Q>>,
    pub rays: Vec<Vec<Int>>,
    pub lineality: Vec<Vec<Int>>,
}

impl Polyhedron {
    pub fn empty(dim: usize) -> Self {
        let _ = dim;
        Polyhedron {
            vertices: vec![],
            rays: vec![],
            lineality: vec![],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn dim_ambient(&self) -> Option<usize> {
        self.vertices
            .first()
            .map(|v| v.len())
            .or_else(|| self.rays.first().map(|r| r.len()))
    }

    pub fn contains_line(&self) -> bool {
        !self.lineality.is_empty()
    }

    pub fn is_singleton(&self) -> bool {
        self.vertices.len() == 1 && self.rays.is_empty() && self.lineality.is_empty()
    }

    /// Exact endpoints when the region is a one-dimensional bounded segment;
    /// a singleton is not a segment.
    pub fn as_segment(&self) -> Option<(Vec<Q>, Vec<Q>)> {
        if self.vertices.len() == 2 && self.rays.is_empty() && self.lineality.is_empty() {
            Some((self.vertices[0].clone(), self.vertices[1].clone()))
        } else {
            None
        }
    }

    /// The single apex when this is a translated cone.
    pub fn as_pointed_cone(&self) -> Option<PointedCone> {
        if self.vertices.len() == 1 && self.lineality.is_empty() {
            Some(PointedCone {
                apex: self.vertices[0].clone(),
                generators: {
                    let mut g = self.rays.clone();
                    g.sort();
                    g
                },
            })
        } else {
            None
        }
    }

    pub fn to_hrep(&self) -> HPolyhedron {
        hrep_of_vrep(self)
    }

    pub fn canonicalize(&mut self) {
        self.vertices.sort();
        self.vertices.dedup();
        self.rays.sort();
        self.rays.dedup();
        self.lineality.sort();
        self.lineality.dedup();
    }

    pub fn contains_point(&self, x: &[Q]) -> bool {
        if self.is_empty() {
            return false;
        }
        self.to_hrep().contains(x)
    }

    /// Set containment via the H-representation of `other`.
    pub fn is_subset_of(&self, other: &Polyhedron) -> bool {
        if self.is_empty() {
            return true;
        }
        if other.is_empty() {
            return false;
        }
        let h = other.to_hrep();
        self.vertices.iter().all(|v| h.contains(v))
            && self.rays.iter().all(|r| h.admits_ray(&num::qvec_of_ints(r)))
            && self
                .lineality
                .iter()
                .all(|l| h.admits_line(&num::qvec_of_ints(l)))
    }

    pub fn set_eq(&self, other: &Polyhedron) -> bool {
        self.is_subset_of(other) && other.is_subset_of(self)
    }
}

// ---------------------------------------------------------------------------
// Double description core
// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq, Eq)]
struct TightSet(Vec<u64>);

impl TightSet {
    fn new(n: usize) -> Self {
        TightSet(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn intersect(&self, other: &TightSet) -> TightSet {
        TightSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
    fn is_subset_of(&self, other: &TightSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
}

struct DdRay {
    v: Vec<Q>,
    tight: TightSet,
}

/// Extreme rays and lineality of `{x : a·x ≥ 0 for a in ineqs, e·x = 0 for e in eqs}`.
/// Rays are extreme modulo the lineality space.
pub fn dd_cone(dim: usize, ineqs: &[Vec<Q>], eqs: &[Vec<Q>]) -> (Vec<Vec<Q>>, Vec<Vec<Q>>) {
    let mut constraints: Vec<Vec<Q>> = Vec::new();
    for e in eqs {
        constraints.push(e.clone());
        constraints.push(num::neg(e));
    }
    constraints.extend(ineqs.iter().cloned());
    constraints.retain(|a| !is_zero_vec(a));
    let total = constraints.len();

    let mut lineality: Vec<Vec<Q>> = (0..dim)
        .map(|i| {
            let mut v = vec![Q::zero(); dim];
            v[i] = Q::one();
            v
        })
        .collect();
    let mut rays: Vec<DdRay> = Vec::new();

    for (cur, a) in constraints.iter().enumerate() {
        let lin_vals: Vec<Q> = lineality.iter().map(|l| dot(a, l)).collect();
        if let Some(i0) = lin_vals.iter().position(|x| !x.is_zero()) {
            // Reduce the lineality space by one dimension.
            let mut l0 = lineality.remove(i0);
            let mut v0 = lin_vals[i0].clone();
            if v0.is_negative() {
                l0 = num::neg(&l0);
                v0 = -v0;
            }
            for (idx, l) in lineality.iter_mut().enumerate() {
                let raw = if idx < i0 {
                    lin_vals[idx].clone()
                } else {
                    lin_vals[idx + 1].clone()
                };
                if !raw.is_zero() {
                    let c = raw / &v0;
                    *l = sub(l, &num::scale(&c, &l0));
                }
            }
            for r in rays.iter_mut() {
                let val = dot(a, &r.v);
                if !val.is_zero() {
                    let c = val / &v0;
                    r.v = sub(&r.v, &num::scale(&c, &l0));
                    normalize_ray(&mut r.v);
                }
                r.tight.set(cur);
            }
            let mut tight = TightSet::new(total);
            for i in 0..cur {
                tight.set(i);
            }
            normalize_ray(&mut l0);
            rays.push(DdRay { v: l0, tight });
            dedup_rays(&mut rays);
            continue;
        }

        let vals: Vec<Q> = rays.iter().map(|r| dot(a, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        if neg.is_empty() {
            for (i, r) in rays.iter_mut().enumerate() {
                if vals[i].is_zero() {
                    r.tight.set(cur);
                }
            }
            continue;
        }
        let mut new_rays: Vec<DdRay> = Vec::new();
        for (i, r) in rays.iter().enumerate() {
            if !vals[i].is_negative() {
                let mut nr = DdRay {
                    v: r.v.clone(),
                    tight: r.tight.clone(),
                };
                if vals[i].is_zero() {
                    nr.tight.set(cur);
                }
                new_rays.push(nr);
            }
        }
        for &p in &pos {
            for &m in &neg {
                let common = rays[p].tight.intersect(&rays[m].tight);
                let adjacent = rays.iter().enumerate().all(|(i, r)| {
                    i == p || i == m || !common.is_subset_of(&r.tight)
                });
                if !adjacent {
                    continue;
                }
                // (a·p)·m − (a·m)·p lies on the hyperplane and inside the cone
                let mut v = sub(
                    &num::scale(&vals[p], &rays[m].v),
                    &num::scale(&vals[m], &rays[p].v),
                );
                normalize_ray(&mut v);
                if is_zero_vec(&v) {
                    continue;
                }
                let mut tight = common.clone();
                tight.set(cur);
                new_rays.push(DdRay { v, tight });
            }
        }
        rays = new_rays;
        dedup_rays(&mut rays);
    }

    (
        lineality.iter().map(|l| num::qvec_of_ints(&primitive(l))).collect(),
        rays.into_iter().map(|r| r.v).collect(),
    )
}

fn normalize_ray(v: &mut Vec<Q>) {
    *v = num::qvec_of_ints(&primitive(v));
}

fn dedup_rays(rays: &mut Vec<DdRay>) {
    let mut seen: Vec<Vec<Q>> = Vec::new();
    rays.retain(|r| {
        if seen.contains(&r.v) {
            false
        } else {
            seen.push(r.v.clone());
            true
        }
    });
}

/// V-representation of `{x : A·x ≥ b, E·x = f}` by homogenization.
pub fn vrep_of_hrep(h: &HPolyhedron, dim: usize) -> Polyhedron {
    let mut ineqs: Vec<Vec<Q>> = Vec::new();
    for (a, b) in &h.ineqs {
        let mut row = num::qvec_of_ints(a);
        row.push(-b.clone());
        ineqs.push(row);
    }
    let mut t_pos = vec![Q::zero(); dim + 1];
    t_pos[dim] = Q::one();
    ineqs.push(t_pos);
    let mut eqs: Vec<Vec<Q>> = Vec::new();
    for (a, b) in &h.eqs {
        let mut row = num::qvec_of_ints(a);
        row.push(-b.clone());
        eqs.push(row);
    }
    let (lineality, rays) = dd_cone(dim + 1, &ineqs, &eqs);

    let mut out = Polyhedron::empty(dim);
    for l in &lineality {
        debug_assert!(l[dim].is_zero());
        out.lineality.push(primitive(&l[..dim]));
    }
    for r in &rays {
        if r[dim].is_zero() {
            out.rays.push(primitive(&r[..dim]));
        } else {
            let t = r[dim].clone();
            out.vertices.push(r[..dim].iter().map(|x| x / &t).collect());
        }
    }
    if out.vertices.is_empty() {
        return Polyhedron::empty(dim);
    }
    out.canonicalize();
    out
}

/// H-representation of a V-polyhedron via the polar of its homogenization.
pub fn hrep_of_vrep(p: &Polyhedron) -> HPolyhedron {
    let dim = p.dim_ambient().unwrap_or(0);
    if p.is_empty() {
        // Infeasible marker: 0·x ≥ 1.
        return HPolyhedron {
            ineqs: vec![(vec![Int::zero(); dim], Q::one())],
            eqs: vec![],
        };
    }
    // Polar cone of the homogenization: y with y·g ≤ 0 for every generator.
    let mut ineqs: Vec<Vec<Q>> = Vec::new();
    let mut eqs: Vec<Vec<Q>> = Vec::new();
    for v in &p.vertices {
        let mut g = num::neg(v);
        g.push(-Q::one());
        ineqs.push(g);
    }
    for r in &p.rays {
        let mut g = num::qvec_of_ints(r).iter().map(|x| -x).collect::<Vec<_>>();
        g.push(Q::zero());
        ineqs.push(g);
    }
    for l in &p.lineality {
        let mut g = num::qvec_of_ints(l);
        g.push(Q::zero());
        eqs.push(g);
    }
    let (lineality, rays) = dd_cone(dim + 1, &ineqs, &eqs);
    let mut hin: Vec<(Vec<Q>, Q)> = Vec::new();
    let mut heq: Vec<(Vec<Q>, Q)> = Vec::new();
    for rho in &rays {
        // rho·(x,1) ≤ 0  ⟺  (−rho_x)·x ≥ rho_t
        let normal: Vec<Q> = rho[..dim].iter().map(|x| -x).collect();
        if is_zero_vec(&normal) {
            continue;
        }
        hin.push((normal, rho[dim].clone()));
    }
    for lam in &lineality {
        let normal: Vec<Q> = lam[..dim].to_vec();
        if is_zero_vec(&normal) {
            continue;
        }
        heq.push((normal, -lam[dim].clone()));
    }
    HPolyhedron::new(hin, heq)
}

/// Exact H-representation of a translated cone.
pub fn dual_description(p: &PointedCone) -> HPolyhedron {
    hrep_of_vrep(&p.to_polyhedron())
}

/// Inverse conversion; requires the region to be a translated cone.
pub fn pointed_cone_of_hrep(h: &HPolyhedron, dim: usize) -> Option<PointedCone> {
    vrep_of_hrep(h, dim).as_pointed_cone()
}

/// Outcome of an exact intersection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntersectResult {
    Empty,
    /// A translated cone with its apex at a vertex.
    Pointed(PointedCone),
    /// Pointed in the convex-geometry sense is false, or several vertices.
    General(Polyhedron),
}

pub fn intersect(a: &Polyhedron, b: &Polyhedron) -> IntersectResult {
    let dim = a.dim_ambient().or(b.dim_ambient()).unwrap_or(0);
    let h = a.to_hrep().intersection(&b.to_hrep());
    let v = vrep_of_hrep(&h, dim);
    if v.is_empty() {
        IntersectResult::Empty
    } else if let Some(pc) = v.as_pointed_cone() {
        IntersectResult::Pointed(pc)
    } else {
        IntersectResult::General(v)
    }
}

impl IntersectResult {
    pub fn polyhedron(&self) -> Option<Polyhedron> {
        match self {
            IntersectResult::Empty => None,
            IntersectResult::Pointed(pc) => Some(pc.to_polyhedron()),
            IntersectResult::General(p) => Some(p.clone()),
        }
    }
}

/// Finite union of pieces with containment pruning.
#[derive(Clone, Debug, Default)]
pub struct RegionUnion {
    pub pieces: Vec<Polyhedron>,
}

impl RegionUnion {
    pub fn new(pieces: Vec<Polyhedron>) -> Self {
        let mut u = RegionUnion { pieces };
        u.prune();
        u
    }

    pub fn prune(&mut self) {
        self.pieces.retain(|p| !p.is_empty());
        let mut keep = vec![true; self.pieces.len()];
        for i in 0..self.pieces.len() {
            for j in 0..self.pieces.len() {
                if i != j
                    && keep[i]
                    && keep[j]
                    && self.pieces[i].is_subset_of(&self.pieces[j])
                {
                    // break ties deterministically
                    if !(self.pieces[j].is_subset_of(&self.pieces[i]) && j > i) {
                        keep[i] = false;
                    }
                }
            }
        }
        let mut idx = 0;
        self.pieces.retain(|_| {
            let k = keep[idx];
            idx += 1;
            k
        });
    }

    pub fn contains_point(&self, x: &[Q]) -> bool {
        self.pieces.iter().any(|p| p.contains_point(x))
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }
}

/// Exact test that a polyhedron is covered by a finite union of polyhedra:
/// the piece is split by every facet hyperplane of the cover (both closed
/// halves kept), and each resulting cell must lie inside some cover member.
pub fn piece_covered_by(piece: &Polyhedron, cover: &[Polyhedron]) -> bool {
    if piece.is_empty() {
        return true;
    }
    if cover.iter().any(|q| piece.is_subset_of(q)) {
        return true;
    }
    let mut hyperplanes: Vec<(Vec<Int>, Q)> = Vec::new();
    for q in cover {
        let h = q.to_hrep();
        for (a, b) in h.ineqs.iter().chain(h.eqs.iter()) {
            let key = (a.clone(), b.clone());
            if !hyperplanes.contains(&key) {
                hyperplanes.push(key);
            }
        }
    }
    let dim = piece.dim_ambient().unwrap_or(0);
    let mut cells = vec![piece.to_hrep()];
    for (a, b) in &hyperplanes {
        let aq = num::qvec_of_ints(a);
        let plus = HPolyhedron::new(vec![(aq.clone(), b.clone())], vec![]);
        let minus = HPolyhedron::new(vec![(num::neg(&aq), -b.clone())], vec![]);
        let mut next = Vec::new();
        for cell in &cells {
            for half in [&plus, &minus] {
                let h = cell.intersection(half);
                if !vrep_of_hrep(&h, dim).is_empty() {
                    next.push(h);
                }
            }
        }
        cells = next;
    }
    cells.iter().all(|h| {
        let v = vrep_of_hrep(h, dim);
        v.is_empty() || cover.iter().any(|q| v.is_subset_of(q))
    })
}

/// Exact equality of two finite unions of polyhedra.
pub fn region_set_eq(a: &[Polyhedron], b: &[Polyhedron]) -> bool {
    a.iter().all(|p| piece_covered_by(p, b)) && b.iter().all(|p| piece_covered_by(p, a))
}

/// All points `p + a·step` for nonnegative integers `a` on the segment `[p, q]`,
/// restricted to integer points. Requires `q − p` to be a nonnegative rational
/// multiple of `step`.
pub fn lattice_points_on_segment(p: &[Q], q: &[Q], step: &[Q]) -> Result<Vec<Vec<Int>>> {
    let diff = sub(q, p);
    let Some(t) = is_nonneg_multiple(&diff, step) else {
        return Err(Error::DirectionMismatch);
    };
    let a_max = t.floor().to_integer();
    let mut out = Vec::new();
    let mut a = Int::zero();
    while a <= a_max {
        let pt: Vec<Q> = p
            .iter()
            .zip(step)
            .map(|(x, s)| x + s * q_of(&a))
            .collect();
        if pt.iter().all(|x| x.is_integer()) {
            out.push(pt.iter().map(|x| x.to_integer()).collect());
        }
        a += 1;
        if is_zero_vec(step) {
            break;
        }
    }
    Ok(out)
}
