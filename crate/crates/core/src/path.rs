//! Closed interferometer loops in space and in spacetime.

use nalgebra::{Vector3, Vector4};

use crate::error::{Error, Result};

/// Oriented polygon loop. The closing edge from the last vertex back to the
/// first is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedPath {
    vertices: Vec<Vector3<f64>>,
    subdivisions: usize,
}

impl ClosedPath {
    pub fn new(vertices: Vec<Vector3<f64>>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::TooFewVertices(vertices.len()));
        }
        if vertices.first() == vertices.last() {
            return Err(Error::DuplicateClosingVertex);
        }
        if vertices.iter().any(|v| v.iter().any(|c| !c.is_finite())) {
            return Err(Error::InvalidParameter {
                name: "path.vertices",
                reason: "non-finite coordinate".into(),
            });
        }
        Ok(Self {
            vertices,
            subdivisions: 1,
        })
    }

    /// Closes an explicit polyline whose last vertex repeats the first.
    pub fn from_polyline(mut vertices: Vec<Vector3<f64>>, tol: f64) -> Result<Self> {
        let (Some(first), Some(last)) = (vertices.first().copied(), vertices.last().copied()) else {
            return Err(Error::TooFewVertices(0));
        };
        if (first - last).norm() > tol {
            return Err(Error::OpenPath {
                first: [0.0, first.x, first.y, first.z],
                last: [0.0, last.x, last.y, last.z],
            });
        }
        vertices.pop();
        Self::new(vertices)
    }

    /// Regular `n`-gon of circumradius `radius` centred at `center`,
    /// counterclockwise about `normal`.
    pub fn regular_polygon(n: usize, radius: f64, center: Vector3<f64>, normal: Vector3<f64>) -> Result<Self> {
        let nz = normal.try_normalize(0.0).ok_or(Error::InvalidParameter {
            name: "normal",
            reason: "zero vector".into(),
        })?;
        let helper = if nz.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
        let u = helper.cross(&nz).normalize().cross(&nz) * -1.0;
        let v = nz.cross(&u);
        let verts = (0..n)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                center + (u * t.cos() + v * t.sin()) * radius
            })
            .collect();
        Self::new(verts)
    }

    pub fn with_subdivisions(mut self, subdivisions: usize) -> Result<Self> {
        if subdivisions < 1 {
            return Err(Error::InvalidParameter {
                name: "subdivisions",
                reason: "must be at least 1".into(),
            });
        }
        self.subdivisions = subdivisions;
        Ok(self)
    }

    pub fn vertices(&self) -> &[Vector3<f64>] {
        &self.vertices
    }

    pub fn subdivisions(&self) -> usize {
        self.subdivisions
    }

    /// Edges `(start, end)` including the closing edge.
    pub fn segments(&self) -> impl Iterator<Item = (Vector3<f64>, Vector3<f64>)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Same loop traversed the other way, from the same starting vertex.
    pub fn reversed(&self) -> Self {
        let mut v = self.vertices.clone();
        v[1..].reverse();
        Self {
            vertices: v,
            subdivisions: self.subdivisions,
        }
    }

    pub fn translated(&self, shift: &Vector3<f64>) -> Self {
        Self {
            vertices: self.vertices.iter().map(|v| v + shift).collect(),
            subdivisions: self.subdivisions,
        }
    }

    /// The loop traversed `times` times in a row.
    pub fn repeated(&self, times: usize) -> Result<Self> {
        let mut v = Vec::with_capacity(self.vertices.len() * times);
        for _ in 0..times {
            v.extend_from_slice(&self.vertices);
        }
        Ok(Self {
            vertices: v,
            subdivisions: self.subdivisions,
        })
    }

    pub fn perimeter(&self) -> f64 {
        self.segments().map(|(a, b)| (b - a).norm()).sum()
    }

    /// Largest distance of a vertex from the best plane through the centroid
    /// with normal along the vector area. Zero-area loops are measured against
    /// the plane through the first three non-collinear vertices, if any.
    pub fn planarity_defect(&self) -> f64 {
        let centroid = self.vertices.iter().sum::<Vector3<f64>>() / self.vertices.len() as f64;
        let area = enclosed_area(self);
        let normal = match area.try_normalize(1e-300) {
            Some(n) => n,
            None => {
                let v0 = self.vertices[0];
                let mut n = None;
                'outer: for i in 1..self.vertices.len() {
                    for j in i + 1..self.vertices.len() {
                        let c = (self.vertices[i] - v0).cross(&(self.vertices[j] - v0));
                        if c.norm() > 1e-12 * (1.0 + v0.norm()) {
                            n = Some(c.normalize());
                            break 'outer;
                        }
                    }
                }
                match n {
                    Some(n) => n,
                    None => return 0.0,
                }
            }
        };
        self.vertices
            .iter()
            .map(|v| (v - centroid).dot(&normal).abs())
            .fold(0.0, f64::max)
    }
}

/// Oriented vector area `½ Σ xᵢ × xᵢ₊₁` (cyclic).
///
/// For non-planar loops this is the vector area that Stokes' theorem assigns
/// to `½∮ x × dl`. Collinear loops give the zero vector.
pub fn enclosed_area(path: &ClosedPath) -> Vector3<f64> {
    let v = path.vertices();
    // Measured from the first vertex so large offsets do not cancel badly.
    let o = v[0];
    path.segments().map(|(a, b)| (a - o).cross(&(b - o))).sum::<Vector3<f64>>() * 0.5
}

/// A closed loop in spacetime with events `(t, x, y, z)`; closure is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacetimeLoop {
    events: Vec<Vector4<f64>>,
    subdivisions: usize,
}

impl SpacetimeLoop {
    pub fn new(events: Vec<Vector4<f64>>) -> Result<Self> {
        if events.len() < 3 {
            return Err(Error::TooFewVertices(events.len()));
        }
        if events.first() == events.last() {
            return Err(Error::DuplicateClosingVertex);
        }
        Ok(Self {
            events,
            subdivisions: 1,
        })
    }

    /// Accepts an explicit polyline only if it returns to its starting event.
    pub fn from_polyline(mut events: Vec<Vector4<f64>>, tol: f64) -> Result<Self> {
        let (Some(first), Some(last)) = (events.first().copied(), events.last().copied()) else {
            return Err(Error::TooFewVertices(0));
        };
        if (first - last).norm() > tol {
            return Err(Error::OpenPath {
                first: first.into(),
                last: last.into(),
            });
        }
        events.pop();
        Self::new(events)
    }

    /// A purely spatial loop at fixed time `t`.
    pub fn spatial(path: &ClosedPath, t: f64) -> Self {
        Self {
            events: path.vertices().iter().map(|v| Vector4::new(t, v.x, v.y, v.z)).collect(),
            subdivisions: path.subdivisions(),
        }
    }

    pub fn with_subdivisions(mut self, subdivisions: usize) -> Self {
        self.subdivisions = subdivisions.max(1);
        self
    }

    pub fn events(&self) -> &[Vector4<f64>] {
        &self.events
    }

    pub fn subdivisions(&self) -> usize {
        self.subdivisions
    }

    pub fn segments(&self) -> impl Iterator<Item = (Vector4<f64>, Vector4<f64>)> + '_ {
        let n = self.events.len();
        (0..n).map(move |i| (self.events[i], self.events[(i + 1) % n]))
    }
}
