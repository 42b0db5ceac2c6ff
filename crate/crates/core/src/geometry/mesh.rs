use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{GeometryError, Result};
use crate::math::Vec3;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb<T> {
    pub min: Vec3<T>,
    pub max: Vec3<T>,
}

impl<T: Real> Aabb<T> {
    pub fn new(a: Vec3<T>, b: Vec3<T>) -> Self {
        Self { min: a.min(b), max: a.max(b) }
    }

    pub fn from_points(points: impl IntoIterator<Item = Vec3<T>>) -> Option<Self> {
        points.into_iter().fold(None, |acc, p| match acc {
            None => Some(Self { min: p, max: p }),
            Some(b) => Some(Self { min: b.min.min(p), max: b.max.max(p) }),
        })
    }

    pub fn center(&self) -> Vec3<T> {
        (self.min + self.max) * T::lit(0.5)
    }

    pub fn extent(&self) -> Vec3<T> {
        self.max - self.min
    }

    pub fn diagonal(&self) -> T {
        self.extent().norm()
    }

    pub fn translated(&self, by: Vec3<T>) -> Self {
        Self { min: self.min + by, max: self.max + by }
    }

    pub fn contains(&self, p: Vec3<T>) -> bool {
        (0..3).all(|a| p[a] >= self.min[a] && p[a] <= self.max[a])
    }

    /// Corners in binary order: bit 0 selects max x, bit 1 max y, bit 2 max z.
    pub fn corners(&self) -> [Vec3<T>; 8] {
        std::array::from_fn(|i| {
            Vec3::new(
                if i & 1 == 0 { self.min.x } else { self.max.x },
                if i & 2 == 0 { self.min.y } else { self.max.y },
                if i & 4 == 0 { self.min.z } else { self.max.z },
            )
        })
    }
}

/// Indexed triangle surface with one scalar per vertex.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TriangleMesh<T> {
    /// Flat `xyz` triples.
    pub vertices: Vec<T>,
    /// Flat vertex-index triples.
    pub triangles: Vec<u32>,
    pub vertex_scalars: Vec<T>,
}

impl<T: Real> TriangleMesh<T> {
    pub fn new() -> Self {
        Self { vertices: Vec::new(), triangles: Vec::new(), vertex_scalars: Vec::new() }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len() / 3
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len() / 3
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn vertex(&self, i: usize) -> Vec3<T> {
        Vec3::new(self.vertices[3 * i], self.vertices[3 * i + 1], self.vertices[3 * i + 2])
    }

    pub fn triangle(&self, t: usize) -> [u32; 3] {
        [self.triangles[3 * t], self.triangles[3 * t + 1], self.triangles[3 * t + 2]]
    }

    pub fn triangle_points(&self, t: usize) -> [Vec3<T>; 3] {
        self.triangle(t).map(|i| self.vertex(i as usize))
    }

    pub fn push_vertex(&mut self, p: Vec3<T>, scalar: T) -> u32 {
        let id = self.vertex_count() as u32;
        self.vertices.extend_from_slice(&[p.x, p.y, p.z]);
        self.vertex_scalars.push(scalar);
        id
    }

    pub fn push_triangle(&mut self, tri: [u32; 3]) {
        self.triangles.extend_from_slice(&tri);
    }

    /// Checks the index and length invariants.
    pub fn validate(&self) -> Result<()> {
        if self.vertices.len() % 3 != 0 || self.triangles.len() % 3 != 0 {
            return Err(GeometryError::Argument("flat arrays must hold whole triples".into()));
        }
        if self.vertex_scalars.len() != self.vertex_count() {
            return Err(GeometryError::Argument("one scalar per vertex required".into()));
        }
        let n = self.vertex_count() as u32;
        if let Some(&bad) = self.triangles.iter().find(|&&i| i >= n) {
            return Err(GeometryError::Argument(format!("triangle index {bad} >= vertex count {n}")));
        }
        Ok(())
    }

    /// Face normal `(b - a) x (c - a)`, unnormalized.
    pub fn face_normal(&self, t: usize) -> Vec3<T> {
        let [a, b, c] = self.triangle_points(t);
        (b - a).cross(c - a)
    }

    pub fn area(&self) -> T {
        (0..self.triangle_count())
            .map(|t| self.face_normal(t).norm() * T::lit(0.5))
            .fold(T::zero(), |a, b| a + b)
    }

    pub fn bounding_box(&self) -> Result<Aabb<T>> {
        Aabb::from_points((0..self.vertex_count()).map(|i| self.vertex(i))).ok_or(GeometryError::EmptyGeometry)
    }

    pub fn map_vertices(&self, mut f: impl FnMut(Vec3<T>) -> Vec3<T>) -> Self {
        let mut out = self.clone();
        for i in 0..self.vertex_count() {
            let p = f(self.vertex(i));
            out.vertices[3 * i..3 * i + 3].copy_from_slice(&[p.x, p.y, p.z]);
        }
        out
    }

    pub fn translated(&self, by: Vec3<T>) -> Self {
        self.map_vertices(|p| p + by)
    }

    /// Merges vertices whose coordinates round to the same point of a grid with
    /// spacing `tol`, then drops triangles that collapsed.
    pub fn weld(&self, tol: T) -> Self {
        let key = |p: Vec3<T>| -> (i64, i64, i64) {
            let q = |v: T| (v / tol).round().to_i64().unwrap_or(i64::MAX);
            (q(p.x), q(p.y), q(p.z))
        };
        let mut out = Self::new();
        let mut index: HashMap<(i64, i64, i64), u32> = HashMap::new();
        let mut remap = Vec::with_capacity(self.vertex_count());
        for i in 0..self.vertex_count() {
            let p = self.vertex(i);
            let id = *index.entry(key(p)).or_insert_with(|| out.push_vertex(p, self.vertex_scalars[i]));
            remap.push(id);
        }
        for t in 0..self.triangle_count() {
            let [a, b, c] = self.triangle(t).map(|i| remap[i as usize]);
            if a != b && b != c && a != c {
                out.push_triangle([a, b, c]);
            }
        }
        out
    }

    /// Number of triangles using each undirected edge.
    pub fn edge_use_counts(&self) -> HashMap<(u32, u32), usize> {
        let mut counts = HashMap::new();
        for t in 0..self.triangle_count() {
            let tri = self.triangle(t);
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                *counts.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        counts
    }

    /// OFF text: `OFF`, counts line, vertex lines, `3 i j k` face lines.
    pub fn to_off(&self) -> String {
        let mut s = String::new();
        writeln!(s, "OFF").unwrap();
        writeln!(s, "{} {} 0", self.vertex_count(), self.triangle_count()).unwrap();
        for i in 0..self.vertex_count() {
            let p = self.vertex(i);
            writeln!(s, "{} {} {}", p.x, p.y, p.z).unwrap();
        }
        for t in 0..self.triangle_count() {
            let [a, b, c] = self.triangle(t);
            writeln!(s, "3 {a} {b} {c}").unwrap();
        }
        s
    }

    /// Parses the subset of OFF written by [`to_off`](Self::to_off). Vertex
    /// scalars are not stored in OFF and come back as zero.
    pub fn from_off(text: &str) -> Result<Self> {
        let bad = |m: &str| GeometryError::Argument(format!("malformed OFF: {m}"));
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        if lines.next() != Some("OFF") {
            return Err(bad("missing header"));
        }
        let counts: Vec<usize> = lines
            .next()
            .ok_or_else(|| bad("missing counts"))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad("counts")))
            .collect::<Result<_>>()?;
        if counts.len() < 2 {
            return Err(bad("counts"));
        }
        let mut mesh = Self::new();
        for _ in 0..counts[0] {
            let xyz: Vec<f64> = lines
                .next()
                .ok_or_else(|| bad("vertex"))?
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| bad("vertex")))
                .collect::<Result<_>>()?;
            if xyz.len() != 3 {
                return Err(bad("vertex"));
            }
            mesh.push_vertex(Vec3::new(T::lit(xyz[0]), T::lit(xyz[1]), T::lit(xyz[2])), T::zero());
        }
        for _ in 0..counts[1] {
            let f: Vec<u32> = lines
                .next()
                .ok_or_else(|| bad("face"))?
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| bad("face")))
                .collect::<Result<_>>()?;
            if f.len() != 4 || f[0] != 3 {
                return Err(bad("only triangles are supported"));
            }
            mesh.push_triangle([f[1], f[2], f[3]]);
        }
        mesh.validate()?;
        Ok(mesh)
    }
}
