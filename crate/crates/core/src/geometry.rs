//! Value types: finite linkages, periodic frameworks, symmetric matrices and
//! infinitesimal deformations.
//!
//! Every type validates on construction and is immutable afterwards. Rest lengths
//! are measured once, when the value is built, and become the constraint targets
//! for everything downstream.

use std::collections::HashSet;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;

/// Relative determinant threshold for a set of d vectors to count as a basis.
pub const BASIS_DET_RTOL: f64 = 1e-10;

/// A bar between two vertices with its rest length.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub length: f64,
}

/// A finite bar-and-joint linkage in R^d with `d` marked vertex pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteLinkage {
    dim: usize,
    vertices: Vec<DVector<f64>>,
    edges: Vec<Edge>,
    marked_pairs: Vec<(usize, usize)>,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        Err(Error::BadDimension(dim))
    } else {
        Ok(())
    }
}

fn check_points(dim: usize, points: &[DVector<f64>]) -> Result<()> {
    for p in points {
        if p.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.len(),
            });
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
    }
    Ok(())
}

fn check_index(index: usize, count: usize) -> Result<()> {
    if index >= count {
        Err(Error::VertexOutOfRange { index, count })
    } else {
        Ok(())
    }
}

/// Threshold below which `|det|` of a d x d matrix counts as degenerate.
pub fn basis_threshold(m: &DMatrix<f64>) -> f64 {
    let max_col = m.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    BASIS_DET_RTOL * max_col.powi(m.ncols() as i32)
}

/// Checks that the columns of `m` form a basis.
pub fn is_basis(m: &DMatrix<f64>) -> bool {
    m.determinant().abs() >= basis_threshold(m) && basis_threshold(m) > 0.0
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    if n == 0 {
        return true;
    }
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

impl FiniteLinkage {
    /// Validates a linkage and measures its rest lengths.
    pub fn new(
        dim: usize,
        vertices: Vec<DVector<f64>>,
        edges: &[(usize, usize)],
        marked_pairs: Vec<(usize, usize)>,
    ) -> Result<Self> {
        check_dim(dim)?;
        check_points(dim, &vertices)?;
        let n = vertices.len();
        let mut seen = HashSet::new();
        let mut stored = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            check_index(u, n)?;
            check_index(v, n)?;
            if u == v {
                return Err(Error::ZeroLengthEdge(u, v));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::DuplicateEdge(u, v));
            }
            let length = (&vertices[v] - &vertices[u]).norm();
            if length == 0.0 {
                return Err(Error::ZeroLengthEdge(u, v));
            }
            stored.push(Edge { u, v, length });
        }
        if !connected(n, edges) {
            return Err(Error::Disconnected);
        }
        let linkage = FiniteLinkage {
            dim,
            vertices,
            edges: stored,
            marked_pairs: Vec::new(),
        };
        linkage.with_marked_pairs(marked_pairs)
    }

    /// Same linkage with a different choice of marked pairs.
    pub fn with_marked_pairs(&self, marked_pairs: Vec<(usize, usize)>) -> Result<Self> {
        if marked_pairs.len() != self.dim {
            return Err(Error::WrongPairCount {
                expected: self.dim,
                found: marked_pairs.len(),
            });
        }
        let n = self.vertices.len();
        for &(i, j) in &marked_pairs {
            check_index(i, n)?;
            check_index(j, n)?;
            if i == j {
                return Err(Error::MarkedPairsNotBasis {
                    det: 0.0,
                    threshold: 0.0,
                });
            }
        }
        let out = FiniteLinkage {
            marked_pairs,
            ..self.clone()
        };
        let lattice = out.lattice_matrix();
        let det = lattice.determinant().abs();
        let threshold = basis_threshold(&lattice);
        if !(det >= threshold && threshold > 0.0) {
            return Err(Error::MarkedPairsNotBasis { det, threshold });
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[DVector<f64>] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_pairs(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|e| (e.u, e.v)).collect()
    }

    pub fn marked_pairs(&self) -> &[(usize, usize)] {
        &self.marked_pairs
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Matrix whose column k is `p(j(k)) - p(i(k))` for the k-th marked pair.
    pub fn lattice_matrix(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.marked_pairs.len());
        for (k, &(i, j)) in self.marked_pairs.iter().enumerate() {
            m.set_column(k, &(&self.vertices[j] - &self.vertices[i]));
        }
        m
    }

    /// Lattice velocity induced on the marked pairs by vertex velocities.
    pub fn marked_velocity(&self, velocities: &[DVector<f64>]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.marked_pairs.len());
        for (k, &(i, j)) in self.marked_pairs.iter().enumerate() {
            m.set_column(k, &(&velocities[j] - &velocities[i]));
        }
        m
    }

    /// Copy with every vertex moved to `positions`; rest lengths are re-measured.
    pub fn with_positions(&self, positions: Vec<DVector<f64>>) -> Result<Self> {
        FiniteLinkage::new(
            self.dim,
            positions,
            &self.edge_pairs(),
            self.marked_pairs.clone(),
        )
    }
}

/// Free-function form of [`FiniteLinkage::new`].
pub fn build_linkage(
    dim: usize,
    positions: Vec<DVector<f64>>,
    edges: &[(usize, usize)],
    marked_pairs: Vec<(usize, usize)>,
) -> Result<FiniteLinkage> {
    FiniteLinkage::new(dim, positions, edges, marked_pairs)
}

/// Free-function form of [`FiniteLinkage::lattice_matrix`].
pub fn lattice_matrix(linkage: &FiniteLinkage) -> DMatrix<f64> {
    linkage.lattice_matrix()
}

/// One orbit of bars under the lattice: joins orbit `u` to the translate of orbit `v` by `shift`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeOrbit {
    pub u: usize,
    pub v: usize,
    pub shift: Vec<i64>,
    pub length: f64,
}

fn lex_positive(shift: &[i64]) -> bool {
    shift.iter().find(|&&s| s != 0).is_some_and(|&s| s > 0)
}

/// Orients an edge orbit so that `u < v`, or `u == v` with a lexicographically positive shift.
pub fn canonical_orbit(u: usize, v: usize, shift: &[i64]) -> (usize, usize, Vec<i64>) {
    let flip = u > v || (u == v && !lex_positive(shift));
    if flip {
        (v, u, shift.iter().map(|s| -s).collect())
    } else {
        (u, v, shift.to_vec())
    }
}

/// A d-periodic framework given by orbit representatives, a lattice matrix and edge orbits.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicFramework {
    dim: usize,
    lattice: DMatrix<f64>,
    vertex_orbits: Vec<DVector<f64>>,
    edge_orbits: Vec<EdgeOrbit>,
}

impl PeriodicFramework {
    pub fn new(
        dim: usize,
        lattice: DMatrix<f64>,
        vertex_orbits: Vec<DVector<f64>>,
        edge_orbits: &[(usize, usize, Vec<i64>)],
    ) -> Result<Self> {
        check_dim(dim)?;
        if lattice.shape() != (dim, dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: lattice.nrows().max(lattice.ncols()),
            });
        }
        if lattice.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        check_points(dim, &vertex_orbits)?;
        if !is_basis(&lattice) {
            return Err(Error::SingularLattice(lattice.determinant().abs()));
        }
        let mut out = PeriodicFramework {
            dim,
            lattice,
            vertex_orbits,
            edge_orbits: Vec::with_capacity(edge_orbits.len()),
        };
        let mut seen = HashSet::new();
        for (u, v, shift) in edge_orbits {
            out.push_orbit(*u, *v, shift, &mut seen)?;
        }
        Ok(out)
    }

    fn push_orbit(
        &mut self,
        u: usize,
        v: usize,
        shift: &[i64],
        seen: &mut HashSet<(usize, usize, Vec<i64>)>,
    ) -> Result<()> {
        let n = self.vertex_orbits.len();
        check_index(u, n)?;
        check_index(v, n)?;
        if shift.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: shift.len(),
            });
        }
        let (u, v, shift) = canonical_orbit(u, v, shift);
        if !seen.insert((u, v, shift.clone())) {
            return Err(Error::DuplicateOrbit { u, v, shift });
        }
        let length = self.segment(u, v, &shift).norm();
        if length == 0.0 {
            return Err(Error::ZeroLengthEdge(u, v));
        }
        self.edge_orbits.push(EdgeOrbit {
            u,
            v,
            shift,
            length,
        });
        Ok(())
    }

    fn segment(&self, u: usize, v: usize, shift: &[i64]) -> DVector<f64> {
        let gamma = DVector::from_iterator(self.dim, shift.iter().map(|&s| s as f64));
        &self.vertex_orbits[v] + &self.lattice * gamma - &self.vertex_orbits[u]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lattice(&self) -> &DMatrix<f64> {
        &self.lattice
    }

    pub fn vertex_orbits(&self) -> &[DVector<f64>] {
        &self.vertex_orbits
    }

    pub fn edge_orbits(&self) -> &[EdgeOrbit] {
        &self.edge_orbits
    }

    pub fn orbit_count(&self) -> usize {
        self.vertex_orbits.len()
    }

    pub fn edge_orbit_count(&self) -> usize {
        self.edge_orbits.len()
    }

    /// Current vector `p_v + Λγ - p_u` of an edge orbit representative.
    pub fn edge_vector(&self, e: &EdgeOrbit) -> DVector<f64> {
        self.segment(e.u, e.v, &e.shift)
    }

    pub fn edge_specs(&self) -> Vec<(usize, usize, Vec<i64>)> {
        self.edge_orbits
            .iter()
            .map(|e| (e.u, e.v, e.shift.clone()))
            .collect()
    }

    /// Same combinatorics at new positions; rest lengths are re-measured.
    pub fn with_geometry(
        &self,
        lattice: DMatrix<f64>,
        vertex_orbits: Vec<DVector<f64>>,
    ) -> Result<Self> {
        PeriodicFramework::new(self.dim, lattice, vertex_orbits, &self.edge_specs())
    }

    /// Adds one edge orbit, measuring its length from the current geometry.
    pub fn add_edge_orbit(&self, u: usize, v: usize, shift: &[i64]) -> Result<Self> {
        let mut out = self.clone();
        let mut seen: HashSet<_> = self
            .edge_orbits
            .iter()
            .map(|e| (e.u, e.v, e.shift.clone()))
            .collect();
        out.push_orbit(u, v, shift, &mut seen)?;
        Ok(out)
    }

    pub fn gram(&self) -> SymmetricMatrix {
        gram(&self.lattice)
    }

    /// Largest relative deviation between current and stored edge lengths.
    pub fn max_length_drift(&self, reference: &PeriodicFramework) -> f64 {
        self.edge_orbits
            .iter()
            .zip(reference.edge_orbits())
            .map(|(e, r)| ((self.edge_vector(e).norm() - r.length) / r.length).abs())
            .fold(0.0, f64::max)
    }
}

/// A real symmetric matrix; only the upper triangle is stored, so symmetry is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    upper: Vec<f64>,
}

impl SymmetricMatrix {
    fn index(dim: usize, i: usize, j: usize) -> usize {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        a * dim - a * (a + 1) / 2 + b
    }

    pub fn zeros(dim: usize) -> Self {
        SymmetricMatrix {
            dim,
            upper: vec![0.0; dim * (dim + 1) / 2],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &x) in diag.iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    /// Takes the upper triangle of a square matrix.
    pub fn from_upper(m: &DMatrix<f64>) -> Self {
        let dim = m.nrows();
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                out.set(i, j, m[(i, j)]);
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[Self::index(self.dim, i, j)]
    }

    fn set(&mut self, i: usize, j: usize, x: f64) {
        let k = Self::index(self.dim, i, j);
        self.upper[k] = x;
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += self.get(i, j).powi(2);
            }
        }
        s.sqrt()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::symmetric_eigen(&self.to_matrix()).0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += x[i] * self.get(i, j) * x[j];
            }
        }
        s
    }

    /// `Bᵀ M B`, the same form expressed in the basis given by the columns of `b`.
    pub fn congruence(&self, b: &DMatrix<f64>) -> SymmetricMatrix {
        SymmetricMatrix::from_upper(&(b.transpose() * self.to_matrix() * b))
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &SymmetricMatrix) -> f64 {
        self.upper
            .iter()
            .zip(&other.upper)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.upper.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j)).collect())
            .collect()
    }
}

impl Add for &SymmetricMatrix {
    type Output = SymmetricMatrix;
    fn add(self, rhs: &SymmetricMatrix) -> SymmetricMatrix {
        assert_eq!(self.dim, rhs.dim);
        SymmetricMatrix {
            dim: self.dim,
            upper: self.upper.iter().zip(&rhs.upper).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &SymmetricMatrix {
    type Output = SymmetricMatrix;
    fn sub(self, rhs: &SymmetricMatrix) -> SymmetricMatrix {
        assert_eq!(self.dim, rhs.dim);
        SymmetricMatrix {
            dim: self.dim,
            upper: self.upper.iter().zip(&rhs.upper).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul<f64> for &SymmetricMatrix {
    type Output = SymmetricMatrix;
    fn mul(self, c: f64) -> SymmetricMatrix {
        SymmetricMatrix {
            dim: self.dim,
            upper: self.upper.iter().map(|a| a * c).collect(),
        }
    }
}

impl fmt::Display for SymmetricMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| format!("{:>12.6}", self.get(i, j)))
                .collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Gram matrix `ΛᵀΛ` of the columns of `lattice`.
pub fn gram(lattice: &DMatrix<f64>) -> SymmetricMatrix {
    let d = lattice.ncols();
    let mut out = SymmetricMatrix::zeros(d);
    for i in 0..d {
        for j in i..d {
            out.set(i, j, lattice.column(i).dot(&lattice.column(j)));
        }
    }
    out
}

/// First-order velocities of a finite linkage or a periodic framework.
///
/// `lattice_velocity` is `None` for finite linkages.
#[derive(Debug, Clone, PartialEq)]
pub struct InfinitesimalDeformation {
    pub vertex_velocities: Vec<DVector<f64>>,
    pub lattice_velocity: Option<DMatrix<f64>>,
}

impl InfinitesimalDeformation {
    /// Splits a flat coordinate vector: vertex blocks first, then the lattice velocity column-major.
    pub fn from_coordinates(dim: usize, vertex_count: usize, periodic: bool, x: &DVector<f64>) -> Self {
        let vertex_velocities = (0..vertex_count)
            .map(|i| x.rows(i * dim, dim).into_owned())
            .collect();
        let lattice_velocity = periodic.then(|| {
            DMatrix::from_column_slice(dim, dim, &x.as_slice()[vertex_count * dim..])
        });
        InfinitesimalDeformation {
            vertex_velocities,
            lattice_velocity,
        }
    }

    pub fn to_coordinates(&self) -> DVector<f64> {
        let mut v: Vec<f64> = self
            .vertex_velocities
            .iter()
            .flat_map(|p| p.iter().copied())
            .collect();
        if let Some(l) = &self.lattice_velocity {
            v.extend_from_slice(l.as_slice());
        }
        DVector::from_vec(v)
    }

    pub fn scaled(&self, c: f64) -> Self {
        InfinitesimalDeformation {
            vertex_velocities: self.vertex_velocities.iter().map(|p| p * c).collect(),
            lattice_velocity: self.lattice_velocity.as_ref().map(|l| l * c),
        }
    }

    pub fn norm(&self) -> f64 {
        self.to_coordinates().norm()
    }
}
