use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, norm};

/// Relative slack used by membership tests so that points returned by the
/// projections (which land on the boundary up to rounding) count as inside.
pub const MEMBERSHIP_RTOL: f64 = 1e-12;

/// Upper bound on the number of `p`-subsets of facets enumerated when
/// computing polytope vertices.
const MAX_VERTEX_SUBSETS: u128 = 200_000;

/// Half-space `{x : normalᵀ x <= offset}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Self {
        Self { normal, offset }
    }
}

pub type MembershipFn = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

#[derive(Clone)]
pub enum Shape {
    Ball { center: Vec<f64>, radius: f64 },
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Polytope { halfspaces: Vec<Halfspace> },
    Oracle { membership: MembershipFn },
}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Ball { center, radius } => f
                .debug_struct("Ball")
                .field("center", center)
                .field("radius", radius)
                .finish(),
            Shape::Box { lower, upper } => f
                .debug_struct("Box")
                .field("lower", lower)
                .field("upper", upper)
                .finish(),
            Shape::Polytope { halfspaces } => f
                .debug_struct("Polytope")
                .field("halfspaces", halfspaces)
                .finish(),
            Shape::Oracle { .. } => f.write_str("Oracle"),
        }
    }
}

/// A convex compact body `K` with `B(0, r) ⊂ K ⊂ B(0, R)`.
#[derive(Debug, Clone)]
pub struct ConvexBody {
    shape: Shape,
    dim: usize,
    inner_radius: f64,
    outer_radius: f64,
}

impl ConvexBody {
    /// Euclidean ball; the origin must be strictly inside.
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        let dim = center.len();
        if dim == 0 {
            return Err(Error::InvalidBody("empty center".into()));
        }
        if !(radius.is_finite() && radius > 0.0) || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidBody(format!("ball radius {radius} must be positive")));
        }
        let offset = norm(&center);
        if offset >= radius {
            return Err(Error::InvalidBody(
                "origin must lie in the interior of the ball".into(),
            ));
        }
        Ok(Self {
            dim,
            inner_radius: radius - offset,
            outer_radius: radius + offset,
            shape: Shape::Ball { center, radius },
        })
    }

    pub fn centered_ball(dim: usize, radius: f64) -> Result<Self> {
        Self::ball(vec![0.0; dim], radius)
    }

    /// Axis-aligned box `lower <= x <= upper` with `lower < 0 < upper`.
    pub fn cuboid(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_dim(lower.len(), upper.len())?;
        if lower.is_empty() {
            return Err(Error::InvalidBody("empty box".into()));
        }
        for (i, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if !(l.is_finite() && u.is_finite() && *l < 0.0 && *u > 0.0) {
                return Err(Error::InvalidBody(format!(
                    "box side {i} must satisfy lower < 0 < upper (got [{l}, {u}])"
                )));
            }
        }
        let inner = lower
            .iter()
            .map(|l| -l)
            .chain(upper.iter().copied())
            .fold(f64::INFINITY, f64::min);
        let outer = lower
            .iter()
            .zip(&upper)
            .map(|(l, u)| l.abs().max(u.abs()).powi(2))
            .sum::<f64>()
            .sqrt();
        Ok(Self {
            dim: lower.len(),
            inner_radius: inner,
            outer_radius: outer,
            shape: Shape::Box { lower, upper },
        })
    }

    /// Bounded polytope `{x : a_iᵀx <= b_i}` with every `b_i > 0`. The outer
    /// radius is the largest vertex norm, found by enumerating facet subsets.
    pub fn polytope(halfspaces: Vec<Halfspace>) -> Result<Self> {
        let dim = validate_halfspaces(&halfspaces)?;
        let count = binomial(halfspaces.len() as u128, dim as u128);
        if count > MAX_VERTEX_SUBSETS {
            return Err(Error::InvalidBody(format!(
                "{count} facet subsets to enumerate; supply the outer radius explicitly"
            )));
        }
        if is_unbounded(&halfspaces, dim) {
            return Err(Error::InvalidBody("polytope is unbounded".into()));
        }
        let vertices = enumerate_vertices(&halfspaces, dim);
        let outer = vertices.iter().map(|v| norm(v)).fold(0.0, f64::max);
        Self::polytope_with_outer_radius(halfspaces, outer)
    }

    /// Polytope with a caller-supplied outer radius (skips vertex enumeration).
    pub fn polytope_with_outer_radius(halfspaces: Vec<Halfspace>, outer_radius: f64) -> Result<Self> {
        let dim = validate_halfspaces(&halfspaces)?;
        let inner = halfspaces
            .iter()
            .map(|h| h.offset / norm(&h.normal))
            .fold(f64::INFINITY, f64::min);
        if !(outer_radius.is_finite() && outer_radius >= inner) {
            return Err(Error::InvalidBody(format!(
                "outer radius {outer_radius} must be finite and at least the inner radius {inner}"
            )));
        }
        Ok(Self {
            dim,
            inner_radius: inner,
            outer_radius,
            shape: Shape::Polytope { halfspaces },
        })
    }

    /// Body known only through a membership predicate. The caller vouches
    /// that `B(0, inner) ⊂ K ⊂ B(0, outer)`.
    pub fn oracle(dim: usize, membership: MembershipFn, inner_radius: f64, outer_radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidBody("dimension must be positive".into()));
        }
        if !(inner_radius > 0.0 && inner_radius <= outer_radius && outer_radius.is_finite()) {
            return Err(Error::InvalidBody(format!(
                "radii must satisfy 0 < r <= R (got r={inner_radius}, R={outer_radius})"
            )));
        }
        if !membership(&vec![0.0; dim]) {
            return Err(Error::InvalidBody("origin is not a member".into()));
        }
        Ok(Self {
            dim,
            inner_radius,
            outer_radius,
            shape: Shape::Oracle { membership },
        })
    }

    /// The `x1, x2 >= -0.3, x1 + x2 <= 0.6` triangle used in the planar experiments.
    pub fn shifted_simplex() -> Self {
        Self::polytope(vec![
            Halfspace::new(vec![-1.0, 0.0], 0.3),
            Halfspace::new(vec![0.0, -1.0], 0.3),
            Halfspace::new(vec![1.0, 1.0], 0.6),
        ])
        .expect("shifted simplex is a valid body")
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer_radius
    }

    /// Replaces the inner radius (must not exceed the computed one).
    pub fn with_inner_radius(mut self, r: f64) -> Result<Self> {
        if !(r > 0.0 && r <= self.inner_radius * (1.0 + 1e-12)) {
            return Err(Error::InvalidBody(format!(
                "inner radius {r} must be in (0, {}]",
                self.inner_radius
            )));
        }
        self.inner_radius = r;
        Ok(self)
    }

    /// Replaces the outer radius (must not be below the computed one).
    pub fn with_outer_radius(mut self, big_r: f64) -> Result<Self> {
        if !(big_r.is_finite() && big_r >= self.outer_radius * (1.0 - 1e-12)) {
            return Err(Error::InvalidBody(format!(
                "outer radius {big_r} must be at least {}",
                self.outer_radius
            )));
        }
        self.outer_radius = big_r;
        Ok(self)
    }

    /// Membership test.
    pub fn contains(&self, x: &[f64]) -> bool {
        debug_assert_eq!(x.len(), self.dim);
        match &self.shape {
            Shape::Ball { center, radius } => {
                let d2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                d2.sqrt() <= radius * (1.0 + MEMBERSHIP_RTOL)
            }
            Shape::Box { lower, upper } => x.iter().zip(lower.iter().zip(upper)).all(|(v, (l, u))| {
                *v >= l * (1.0 + MEMBERSHIP_RTOL) && *v <= u * (1.0 + MEMBERSHIP_RTOL)
            }),
            Shape::Polytope { halfspaces } => halfspaces
                .iter()
                .all(|h| dot(&h.normal, x) <= h.offset * (1.0 + MEMBERSHIP_RTOL)),
            Shape::Oracle { membership } => membership(x),
        }
    }

    /// Facets as half-spaces, for the shapes that have them. Box facets are
    /// ordered upper sides first, then lower sides.
    pub fn halfspaces(&self) -> Option<Vec<Halfspace>> {
        match &self.shape {
            Shape::Polytope { halfspaces } => Some(halfspaces.clone()),
            Shape::Box { lower, upper } => {
                let p = self.dim;
                let mut out = Vec::with_capacity(2 * p);
                for (i, u) in upper.iter().enumerate() {
                    let mut a = vec![0.0; p];
                    a[i] = 1.0;
                    out.push(Halfspace::new(a, *u));
                }
                for (i, l) in lower.iter().enumerate() {
                    let mut a = vec![0.0; p];
                    a[i] = -1.0;
                    out.push(Halfspace::new(a, -l));
                }
                Some(out)
            }
            _ => None,
        }
    }

    /// Vertices of a planar polygon body in counter-clockwise order.
    pub fn polygon_vertices(&self) -> Option<Vec<[f64; 2]>> {
        if self.dim != 2 {
            return None;
        }
        let hs = self.halfspaces()?;
        let mut verts: Vec<[f64; 2]> = enumerate_vertices(&hs, 2)
            .into_iter()
            .map(|v| [v[0], v[1]])
            .collect();
        verts.sort_by(|a, b| a[1].atan2(a[0]).total_cmp(&b[1].atan2(b[0])));
        verts.dedup_by(|a, b| (a[0] - b[0]).hypot(a[1] - b[1]) < 1e-12);
        Some(verts)
    }
}

fn validate_halfspaces(halfspaces: &[Halfspace]) -> Result<usize> {
    let dim = halfspaces
        .first()
        .map(|h| h.normal.len())
        .ok_or_else(|| Error::InvalidBody("polytope needs at least one halfspace".into()))?;
    if dim == 0 {
        return Err(Error::InvalidBody("zero-dimensional normal".into()));
    }
    for (i, h) in halfspaces.iter().enumerate() {
        check_dim(dim, h.normal.len())?;
        if h.normal.iter().any(|v| !v.is_finite()) || norm(&h.normal) == 0.0 {
            return Err(Error::InvalidBody(format!("halfspace {i} has a degenerate normal")));
        }
        if !(h.offset.is_finite() && h.offset > 0.0) {
            return Err(Error::InvalidBody(format!(
                "halfspace {i} offset {} must be positive (origin interior)",
                h.offset
            )));
        }
    }
    Ok(dim)
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub(crate) fn enumerate_vertices(halfspaces: &[Halfspace], dim: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for_each_subset(halfspaces.len(), dim, |sub| {
        let a = DMatrix::from_fn(dim, dim, |i, j| halfspaces[sub[i]].normal[j]);
        let b = DVector::from_iterator(dim, sub.iter().map(|&i| halfspaces[i].offset));
        let Some(v) = a.lu().solve(&b) else { return };
        let v = v.as_slice().to_vec();
        if v.iter().any(|c| !c.is_finite()) {
            return;
        }
        let feasible = halfspaces
            .iter()
            .all(|h| dot(&h.normal, &v) <= h.offset + 1e-9 * h.offset.max(1.0));
        if feasible {
            out.push(v);
        }
    });
    out
}

/// A polytope with full-rank normals is unbounded iff its recession cone
/// `{d : a_iᵀd <= 0}` has an extreme ray, which lies on `dim-1` tight facets.
fn is_unbounded(halfspaces: &[Halfspace], dim: usize) -> bool {
    let a = DMatrix::from_fn(halfspaces.len(), dim, |i, j| {
        let h = &halfspaces[i];
        h.normal[j] / norm(&h.normal)
    });
    if a.rank(1e-10) < dim {
        return true;
    }
    let ray_feasible = |d: &[f64]| {
        halfspaces
            .iter()
            .all(|h| dot(&h.normal, d) / norm(&h.normal) <= 1e-12)
    };
    let mut unbounded = false;
    for_each_subset(halfspaces.len(), dim - 1, |sub| {
        if unbounded {
            return;
        }
        let candidates: Vec<Vec<f64>> = if dim == 1 {
            vec![vec![1.0]]
        } else {
            // null vector of the (dim-1) x dim system via signed cofactors
            let m = DMatrix::from_fn(dim - 1, dim, |i, j| halfspaces[sub[i]].normal[j]);
            let d: Vec<f64> = (0..dim)
                .map(|j| {
                    let minor = m.clone().remove_column(j);
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    sign * minor.determinant()
                })
                .collect();
            if norm(&d) < 1e-12 {
                return;
            }
            vec![d]
        };
        for d in candidates {
            let neg: Vec<f64> = d.iter().map(|v| -v).collect();
            if ray_feasible(&d) || ray_feasible(&neg) {
                unbounded = true;
            }
        }
    });
    unbounded
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_examples() {
        let ball = ConvexBody::centered_ball(2, 0.5).unwrap();
        assert!(ball.contains(&[0.3, 0.0]));
        assert!(!ball.contains(&[0.6, 0.0]));
        let simplex = ConvexBody::shifted_simplex();
        assert!(simplex.contains(&[-0.3, -0.3]));
        assert!(!simplex.contains(&[0.4, 0.4]));
    }

    #[test]
    fn simplex_radii() {
        let s = ConvexBody::shifted_simplex();
        assert!((s.inner_radius() - 0.3).abs() < 1e-15);
        // farthest vertex is (0.9, -0.3) or (-0.3, 0.9)
        assert!((s.outer_radius() - 0.9f64.hypot(0.3)).abs() < 1e-12);
        let verts = s.polygon_vertices().unwrap();
        assert_eq!(verts.len(), 3);
    }

    #[test]
    fn rejects_invalid_bodies() {
        assert!(ConvexBody::ball(vec![1.0, 0.0], 0.5).is_err());
        assert!(ConvexBody::centered_ball(2, -1.0).is_err());
        assert!(ConvexBody::cuboid(vec![0.0, -1.0], vec![1.0, 1.0]).is_err());
        assert!(ConvexBody::polytope(vec![Halfspace::new(vec![1.0, 0.0], -1.0)]).is_err());
        // half-plane is unbounded
        assert!(ConvexBody::polytope(vec![Halfspace::new(vec![1.0, 0.0], 1.0)]).is_err());
        // strip is unbounded
        assert!(ConvexBody::polytope(vec![
            Halfspace::new(vec![1.0, 0.0], 1.0),
            Halfspace::new(vec![-1.0, 0.0], 1.0),
        ])
        .is_err());
        // wedge (cone) is unbounded even though normals span the plane
        assert!(ConvexBody::polytope(vec![
            Halfspace::new(vec![1.0, 1.0], 1.0),
            Halfspace::new(vec![1.0, -1.0], 1.0),
        ])
        .is_err());
    }

    #[test]
    fn box_radii_and_facets() {
        let b = ConvexBody::cuboid(vec![-1.0, -2.0], vec![3.0, 1.0]).unwrap();
        assert_eq!(b.inner_radius(), 1.0);
        assert!((b.outer_radius() - 13f64.sqrt()).abs() < 1e-15);
        assert_eq!(b.halfspaces().unwrap().len(), 4);
        assert_eq!(b.polygon_vertices().unwrap().len(), 4);
    }

    #[test]
    fn subsets_are_exhaustive() {
        let mut n = 0;
        for_each_subset(5, 2, |_| n += 1);
        assert_eq!(n, 10);
        let mut m = 0;
        for_each_subset(3, 0, |s| {
            assert!(s.is_empty());
            m += 1
        });
        assert_eq!(m, 1);
    }
}
