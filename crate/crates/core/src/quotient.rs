//! Finite linkage to periodic framework.
//!
//! Identifying the two vertices of every marked pair `k` means `v_j(k) = v_i(k) + e_k`
//! in lattice coordinates. A union-find with integer offsets tracks, for every finite
//! vertex, its class representative and the lattice translation taking the
//! representative to it. Positions are never used to infer shifts.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::geometry::{FiniteLinkage, InfinitesimalDeformation, PeriodicFramework};
use crate::rigidity;

/// Where each finite vertex lands in the periodic framework.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientReport {
    pub orbit_count: usize,
    pub edge_orbit_count: usize,
    /// Finite vertex index -> (orbit index, shift γ) with `p(v) = p(rep) + Λγ`.
    pub representative_map: Vec<(usize, Vec<i64>)>,
    /// Finite vertex index of each orbit's representative.
    pub representatives: Vec<usize>,
    /// Number of finite vertices falling into each orbit.
    pub multiplicity: Vec<usize>,
}

struct ShiftUnionFind {
    parent: Vec<usize>,
    // offset of a vertex relative to its parent
    offset: Vec<Vec<i64>>,
}

impl ShiftUnionFind {
    fn new(n: usize, dim: usize) -> Self {
        ShiftUnionFind {
            parent: (0..n).collect(),
            offset: vec![vec![0; dim]; n],
        }
    }

    /// Root of `x` and the offset of `x` relative to that root.
    fn find(&mut self, x: usize) -> (usize, Vec<i64>) {
        let p = self.parent[x];
        if p == x {
            return (x, self.offset[x].clone());
        }
        let (root, off_p) = self.find(p);
        let off: Vec<i64> = self.offset[x].iter().zip(&off_p).map(|(a, b)| a + b).collect();
        self.parent[x] = root;
        self.offset[x] = off.clone();
        (root, off)
    }

    /// Records `offset(b) - offset(a) = delta`.
    fn union(&mut self, a: usize, b: usize, delta: &[i64]) -> Result<()> {
        let (ra, oa) = self.find(a);
        let (rb, ob) = self.find(b);
        if ra == rb {
            // any cycle of marked pairs would need e_k to be a combination of the others
            return Err(Error::InconsistentIdentification(b));
        }
        // offset(rb relative to ra) = oa + delta - ob
        let rel: Vec<i64> = oa
            .iter()
            .zip(delta)
            .zip(&ob)
            .map(|((x, d), y)| x + d - y)
            .collect();
        self.parent[rb] = ra;
        self.offset[rb] = rel;
        Ok(())
    }
}

/// Quotient of the linkage graph by the marked-pair identifications.
pub fn quotient(linkage: &FiniteLinkage) -> Result<QuotientReport> {
    let n = linkage.vertex_count();
    let d = linkage.dim();
    let mut uf = ShiftUnionFind::new(n, d);
    for (k, &(i, j)) in linkage.marked_pairs().iter().enumerate() {
        let mut e = vec![0; d];
        e[k] = 1;
        uf.union(i, j, &e)?;
    }
    // representative = smallest finite index in the class; orbits ordered by representative
    let mut rep_of_root = vec![usize::MAX; n];
    let mut representatives = Vec::new();
    let mut orbit_of_root = vec![usize::MAX; n];
    let mut roots = Vec::with_capacity(n);
    for v in 0..n {
        let (root, _) = uf.find(v);
        roots.push(root);
        if rep_of_root[root] == usize::MAX {
            rep_of_root[root] = v;
            orbit_of_root[root] = representatives.len();
            representatives.push(v);
        }
    }
    let mut multiplicity = vec![0; representatives.len()];
    let mut representative_map = Vec::with_capacity(n);
    for v in 0..n {
        let root = roots[v];
        let (_, off_v) = uf.find(v);
        let (_, off_rep) = uf.find(rep_of_root[root]);
        let gamma: Vec<i64> = off_v.iter().zip(&off_rep).map(|(a, b)| a - b).collect();
        let orbit = orbit_of_root[root];
        multiplicity[orbit] += 1;
        representative_map.push((orbit, gamma));
    }
    Ok(QuotientReport {
        orbit_count: representatives.len(),
        edge_orbit_count: linkage.edge_count(),
        representative_map,
        representatives,
        multiplicity,
    })
}

/// Full result of the finite-to-periodic passage.
#[derive(Debug, Clone)]
pub struct Conversion {
    pub framework: PeriodicFramework,
    pub quotient: QuotientReport,
    /// Whether the finite edge constraints are infinitesimally independent. When false
    /// the framework is still well defined but the closed-form DOF count does not apply.
    pub edges_independent: bool,
}

/// Builds the periodic framework together with the quotient report and independence flag.
pub fn convert(linkage: &FiniteLinkage) -> Result<Conversion> {
    let q = quotient(linkage)?;
    let lattice = linkage.lattice_matrix();
    let orbits: Vec<DVector<f64>> = q
        .representatives
        .iter()
        .map(|&v| linkage.vertices()[v].clone())
        .collect();
    let edges: Vec<(usize, usize, Vec<i64>)> = linkage
        .edges()
        .iter()
        .map(|e| {
            let (ou, gu) = &q.representative_map[e.u];
            let (ov, gv) = &q.representative_map[e.v];
            let shift = gv.iter().zip(gu).map(|(a, b)| a - b).collect();
            (*ou, *ov, shift)
        })
        .collect();
    let framework = PeriodicFramework::new(linkage.dim(), lattice, orbits, &edges)?;
    let edges_independent = match rigidity::finite_dof(linkage) {
        Ok(rep) => rep.independent,
        Err(_) => false,
    };
    Ok(Conversion {
        framework,
        quotient: q,
        edges_independent,
    })
}

/// The periodic framework associated to a linkage with marked pairs.
pub fn to_periodic(linkage: &FiniteLinkage) -> Result<PeriodicFramework> {
    Ok(convert(linkage)?.framework)
}

/// Transports a finite flex to the associated periodic framework.
///
/// Orbit velocities are the representatives' velocities and the lattice velocity is
/// the velocity of the marked basis.
pub fn periodic_flex(
    linkage: &FiniteLinkage,
    report: &QuotientReport,
    x: &InfinitesimalDeformation,
) -> InfinitesimalDeformation {
    InfinitesimalDeformation {
        vertex_velocities: report
            .representatives
            .iter()
            .map(|&v| x.vertex_velocities[v].clone())
            .collect(),
        lattice_velocity: Some(linkage.marked_velocity(&x.vertex_velocities)),
    }
}
