//! Triangle meshes of polygonal domains and their skeleton.
//!
//! Triangles are stored counterclockwise. Edges are derived from the triangle
//! sides, sorted lexicographically by their node pair, and globally oriented
//! from the lower node index to the higher one. Local side `i` of a triangle
//! `[v0, v1, v2]` is the side opposite `v_i`, i.e. it runs from `v_{i+1}` to
//! `v_{i+2}` counterclockwise.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

pub type Point = [f64; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    /// Endpoints, `nodes[0] < nodes[1]`.
    pub nodes: [usize; 2],
    /// Lowest-index incident triangle.
    pub left: usize,
    /// The other incident triangle, `None` on the boundary.
    pub right: Option<usize>,
    pub boundary: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    nodes: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<Edge>,
    triangle_edges: Vec<[usize; 3]>,
    /// `+1` if local side `i` runs along the global edge orientation, `-1` otherwise.
    triangle_signs: Vec<[i8; 3]>,
}

/// Signed area of the triangle `(a, b, c)`; positive when counterclockwise.
pub fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn dist(a: Point, b: Point) -> f64 {
    (b[0] - a[0]).hypot(b[1] - a[1])
}

impl Mesh {
    /// Builds a mesh and its skeleton, validating indices, orientation and
    /// manifoldness.
    pub fn new(nodes: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        for (t, tri) in triangles.iter().enumerate() {
            if let Some(&v) = tri.iter().find(|&&v| v >= nodes.len()) {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} references node {v} but only {} nodes exist",
                    nodes.len()
                )));
            }
            let area = signed_area(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]);
            if area == 0.0 {
                return Err(Error::DegenerateTriangle(t));
            }
            if area < 0.0 {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} is not counterclockwise"
                )));
            }
        }

        let mut sides: Vec<([usize; 2], usize, usize)> = Vec::with_capacity(3 * triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            for i in 0..3 {
                let a = tri[(i + 1) % 3];
                let b = tri[(i + 2) % 3];
                sides.push(([a.min(b), a.max(b)], t, i));
            }
        }
        sides.sort_unstable();

        let mut edges: Vec<Edge> = Vec::new();
        let mut triangle_edges = vec![[usize::MAX; 3]; triangles.len()];
        let mut triangle_signs = vec![[0i8; 3]; triangles.len()];
        let mut i = 0;
        while i < sides.len() {
            let key = sides[i].0;
            let mut j = i;
            while j < sides.len() && sides[j].0 == key {
                j += 1;
            }
            let count = j - i;
            if count > 2 {
                return Err(Error::InvalidMesh(format!(
                    "edge ({}, {}) is shared by {count} triangles",
                    key[0], key[1]
                )));
            }
            let e = edges.len();
            for &(_, t, side) in &sides[i..j] {
                triangle_edges[t][side] = e;
                let from = triangles[t][(side + 1) % 3];
                triangle_signs[t][side] = if from == key[0] { 1 } else { -1 };
            }
            if count == 2
                && triangle_signs[sides[i].1][sides[i].2]
                    == triangle_signs[sides[i + 1].1][sides[i + 1].2]
            {
                return Err(Error::InvalidMesh(format!(
                    "triangles {} and {} traverse edge ({}, {}) in the same direction",
                    sides[i].1,
                    sides[i + 1].1,
                    key[0],
                    key[1]
                )));
            }
            edges.push(Edge {
                nodes: key,
                left: sides[i].1,
                right: if count == 2 {
                    Some(sides[i + 1].1)
                } else {
                    None
                },
                boundary: count == 1,
            });
            i = j;
        }

        Ok(Self {
            nodes,
            triangles,
            edges,
            triangle_edges,
            triangle_signs,
        })
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_boundary_edges(&self) -> usize {
        self.edges.iter().filter(|e| e.boundary).count()
    }

    /// Global edge indices of the three local sides of triangle `t`.
    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.triangle_edges[t]
    }

    pub fn triangle_signs(&self, t: usize) -> [i8; 3] {
        self.triangle_signs[t]
    }

    pub fn vertices(&self, t: usize) -> [Point; 3] {
        let tri = self.triangles[t];
        [self.nodes[tri[0]], self.nodes[tri[1]], self.nodes[tri[2]]]
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.vertices(t);
        signed_area(a, b, c)
    }

    /// Longest side of triangle `t`.
    pub fn diameter(&self, t: usize) -> f64 {
        let [a, b, c] = self.vertices(t);
        dist(a, b).max(dist(b, c)).max(dist(c, a))
    }

    /// Global mesh size `h = max h_K`.
    pub fn h(&self) -> f64 {
        (0..self.num_triangles())
            .map(|t| self.diameter(t))
            .fold(0.0, f64::max)
    }

    pub fn edge_endpoints(&self, e: usize) -> [Point; 2] {
        let [a, b] = self.edges[e].nodes;
        [self.nodes[a], self.nodes[b]]
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edge_endpoints(e);
        dist(a, b)
    }

    /// Point on edge `e` at parameter `t ∈ [-1, 1]` of its global orientation.
    pub fn edge_point(&self, e: usize, t: f64) -> Point {
        let [a, b] = self.edge_endpoints(e);
        [
            0.5 * (a[0] + b[0]) + 0.5 * t * (b[0] - a[0]),
            0.5 * (a[1] + b[1]) + 0.5 * t * (b[1] - a[1]),
        ]
    }

    /// Unit outward normal of local side `side` of triangle `t`.
    pub fn outward_normal(&self, t: usize, side: usize) -> [f64; 2] {
        let v = self.vertices(t);
        let a = v[(side + 1) % 3];
        let b = v[(side + 2) % 3];
        let len = dist(a, b);
        // counterclockwise traversal: the outward normal is the tangent rotated clockwise
        [(b[1] - a[1]) / len, -(b[0] - a[0]) / len]
    }

    /// Local side index of edge `e` in triangle `t`, if `e` is one of its sides.
    pub fn local_side(&self, t: usize, e: usize) -> Option<usize> {
        self.triangle_edges[t].iter().position(|&x| x == e)
    }

    pub fn is_boundary_node(&self) -> Vec<bool> {
        let mut flags = vec![false; self.nodes.len()];
        for e in self.edges.iter().filter(|e| e.boundary) {
            flags[e.nodes[0]] = true;
            flags[e.nodes[1]] = true;
        }
        flags
    }
}

/// Criss-cross triangulation of the unit square with `2n²` triangles.
///
/// Cell `(i, j)` is split along the diagonal through `(i, j)` when `i + j` is
/// even and along the other diagonal otherwise. Interior nodes are jittered by
/// at most `perturb / n` in each coordinate; draws that invert a triangle are
/// repeated (at most 100 attempts).
pub fn generate_unit_square(n: usize, perturb: f64, seed: u64) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::MeshGeneration("n must be positive".into()));
    }
    if !(0.0..0.3).contains(&perturb) {
        return Err(Error::MeshGeneration(format!(
            "perturbation {perturb} not in [0, 0.3)"
        )));
    }
    let idx = |i: usize, j: usize| j * (n + 1) + i;
    let hc = 1.0 / n as f64;
    let mut base = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            base.push([i as f64 / n as f64, j as f64 / n as f64]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (p00, p10, p01, p11) = (idx(i, j), idx(i + 1, j), idx(i, j + 1), idx(i + 1, j + 1));
            if (i + j) % 2 == 0 {
                triangles.push([p00, p10, p11]);
                triangles.push([p00, p11, p01]);
            } else {
                triangles.push([p00, p10, p01]);
                triangles.push([p10, p11, p01]);
            }
        }
    }

    if perturb == 0.0 {
        return Mesh::new(base, triangles);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amplitude = perturb * hc;
    for _ in 0..100 {
        let mut nodes = base.clone();
        for j in 1..n {
            for i in 1..n {
                let p = &mut nodes[idx(i, j)];
                p[0] += rng.gen_range(-amplitude..=amplitude);
                p[1] += rng.gen_range(-amplitude..=amplitude);
            }
        }
        let inverted = triangles
            .iter()
            .any(|t| signed_area(nodes[t[0]], nodes[t[1]], nodes[t[2]]) <= 0.0);
        if !inverted {
            return Mesh::new(nodes, triangles);
        }
    }
    Err(Error::MeshGeneration(format!(
        "could not draw a valid perturbation (perturb = {perturb}) in 100 attempts"
    )))
}

/// Red refinement: every triangle is split into four similar children through
/// its edge midpoints. Midpoint of edge `e` becomes node `num_nodes + e`.
pub fn refine_uniform(mesh: &Mesh) -> Mesh {
    let nv = mesh.num_nodes();
    let mut nodes = mesh.nodes.clone();
    nodes.extend((0..mesh.num_edges()).map(|e| mesh.edge_point(e, 0.0)));
    let mut triangles = Vec::with_capacity(4 * mesh.num_triangles());
    for (t, &[v0, v1, v2]) in mesh.triangles.iter().enumerate() {
        let [e0, e1, e2] = mesh.triangle_edges[t];
        let (m0, m1, m2) = (nv + e0, nv + e1, nv + e2);
        triangles.push([v0, m2, m1]);
        triangles.push([m2, v1, m0]);
        triangles.push([m1, m0, v2]);
        triangles.push([m0, m1, m2]);
    }
    Mesh::new(nodes, triangles).expect("refinement of a valid mesh is valid")
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TriangleQuality {
    pub diameter: f64,
    pub inradius: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct MeshQualityReport {
    pub triangles: Vec<TriangleQuality>,
    /// Largest `h_K / ρ_K`, an estimate of the chunkiness constant.
    pub gamma: f64,
    pub h: f64,
}

pub fn quality_report(mesh: &Mesh) -> Result<MeshQualityReport> {
    let mut triangles = Vec::with_capacity(mesh.num_triangles());
    for t in 0..mesh.num_triangles() {
        let [a, b, c] = mesh.vertices(t);
        let area = signed_area(a, b, c).abs();
        let sides = [dist(a, b), dist(b, c), dist(c, a)];
        if area <= f64::EPSILON * sides.iter().map(|s| s * s).sum::<f64>() {
            return Err(Error::DegenerateTriangle(t));
        }
        let diameter = sides.iter().copied().fold(0.0, f64::max);
        let inradius = 2.0 * area / sides.iter().sum::<f64>();
        triangles.push(TriangleQuality {
            diameter,
            inradius,
            ratio: diameter / inradius,
        });
    }
    let gamma = triangles.iter().map(|q| q.ratio).fold(0.0, f64::max);
    let h = triangles.iter().map(|q| q.diameter).fold(0.0, f64::max);
    Ok(MeshQualityReport {
        triangles,
        gamma,
        h,
    })
}

/// Serializes a mesh: `N M`, then `N` lines `x y`, then `M` lines `i j k`.
pub fn write_mesh(mesh: &Mesh) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", mesh.num_nodes(), mesh.num_triangles()).unwrap();
    for p in &mesh.nodes {
        writeln!(out, "{:?} {:?}", p[0], p[1]).unwrap();
    }
    for t in &mesh.triangles {
        writeln!(out, "{} {} {}", t[0], t[1], t[2]).unwrap();
    }
    out
}

pub fn read_mesh(text: &str) -> Result<Mesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let parse_err = |line: usize, msg: String| Error::Parse { line, msg };

    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty mesh file".into()))?;
    let counts: Vec<usize> = header
        .split_whitespace()
        .map(|s| s.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| parse_err(hline, format!("malformed header `{header}`")))?;
    let [n_nodes, n_tris] = counts[..] else {
        return Err(parse_err(
            hline,
            format!("header must hold 2 counts, found {}", counts.len()),
        ));
    };

    let mut nodes = Vec::with_capacity(n_nodes);
    for i in 0..n_nodes {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| parse_err(hline, format!("expected {n_nodes} nodes, found {i}")))?;
        let xy: Vec<f64> = l
            .split_whitespace()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| parse_err(ln, format!("malformed node `{l}`")))?;
        match xy[..] {
            [x, y] if x.is_finite() && y.is_finite() => nodes.push([x, y]),
            _ => return Err(parse_err(ln, format!("malformed node `{l}`"))),
        }
    }

    let mut triangles = Vec::with_capacity(n_tris);
    for i in 0..n_tris {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| parse_err(hline, format!("expected {n_tris} triangles, found {i}")))?;
        let ids: Vec<usize> = l
            .split_whitespace()
            .map(|s| s.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| parse_err(ln, format!("malformed triangle `{l}`")))?;
        let [a, b, c] = ids[..] else {
            return Err(parse_err(ln, format!("malformed triangle `{l}`")));
        };
        if ids.iter().any(|&v| v >= n_nodes) {
            return Err(parse_err(ln, "node index out of range".into()));
        }
        let area = signed_area(nodes[a], nodes[b], nodes[c]);
        if area <= 0.0 {
            return Err(parse_err(ln, "inverted or degenerate triangle".into()));
        }
        triangles.push([a, b, c]);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, "trailing data after triangles".into()));
    }
    Mesh::new(nodes, triangles).map_err(|e| parse_err(hline, e.to_string()))
}

/// Maps edge keys to indices; handy for tests and callers holding node pairs.
pub fn edge_lookup(mesh: &Mesh) -> HashMap<[usize; 2], usize> {
    mesh.edges
        .iter()
        .enumerate()
        .map(|(i, e)| (e.nodes, i))
        .collect()
}
