//! Trapdoor hinges: attaching a vertex to a rigid scaffold so that its only relative
//! motion is a rotation about a (d−2)-simplex, with a prescribed instantaneous direction.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::FiniteLinkage;
use crate::linalg::{self, FullSvd};
use crate::rigidity::{affine_span_dim, bar_dof, bar_rigidity_matrix, finite_trivial_motions};

/// Angular tolerance for the direction of the hinged vertex.
pub const HINGE_ANGLE_TOL: f64 = 1e-8;
const COPLANAR_RTOL: f64 = 1e-9;

/// Plain bar graph used while a linkage is being assembled.
#[derive(Debug, Clone, PartialEq)]
pub struct BarGraph {
    pub dim: usize,
    pub vertices: Vec<DVector<f64>>,
    pub edges: Vec<(usize, usize)>,
}

impl BarGraph {
    pub fn from_linkage(l: &FiniteLinkage) -> Self {
        BarGraph {
            dim: l.dim(),
            vertices: l.vertices().to_vec(),
            edges: l.edge_pairs(),
        }
    }

    pub fn add_vertex(&mut self, p: DVector<f64>) -> usize {
        self.vertices.push(p);
        self.vertices.len() - 1
    }

    /// Subgraph induced on `subset`, reindexed in subset order.
    pub fn induced(&self, subset: &[usize]) -> BarGraph {
        let mut index = vec![usize::MAX; self.vertices.len()];
        for (k, &v) in subset.iter().enumerate() {
            index[v] = k;
        }
        let edges = self
            .edges
            .iter()
            .filter(|(u, v)| index[*u] != usize::MAX && index[*v] != usize::MAX)
            .map(|&(u, v)| (index[u], index[v]))
            .collect();
        BarGraph {
            dim: self.dim,
            vertices: subset.iter().map(|&v| self.vertices[v].clone()).collect(),
            edges,
        }
    }

    pub fn into_linkage(self, marked_pairs: Vec<(usize, usize)>) -> Result<FiniteLinkage> {
        FiniteLinkage::new(self.dim, self.vertices, &self.edges, marked_pairs)
    }
}

/// Placement of a hinge for a new vertex `vertex` moving along `direction`.
#[derive(Debug, Clone, PartialEq)]
pub struct HingeSpec {
    pub vertex: DVector<f64>,
    pub direction: DVector<f64>,
    /// `d − 1` points in the hyperplane through `vertex` normal to `direction`.
    pub hinge: Vec<DVector<f64>>,
    /// For every hinge point, the `d` scaffold vertices it is barred to.
    pub attachments: Vec<Vec<usize>>,
}

impl HingeSpec {
    /// Hinge at distance `offset` from `vertex`, leaning towards the scaffold, each hinge
    /// point barred to the best-conditioned `d` scaffold vertices.
    pub fn generic(
        graph: &BarGraph,
        scaffold: &[usize],
        vertex: DVector<f64>,
        direction: DVector<f64>,
        offset: f64,
    ) -> Result<Self> {
        let d = graph.dim;
        if direction.len() != d || vertex.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: direction.len(),
            });
        }
        let mu_norm = direction.norm();
        if !(mu_norm > 0.0 && mu_norm.is_finite()) {
            return Err(Error::DegenerateHinge("direction must be non-zero".into()));
        }
        if scaffold.len() < d {
            return Err(Error::NonRigidScaffold);
        }
        let mu = &direction / mu_norm;
        let centroid = scaffold
            .iter()
            .fold(DVector::zeros(d), |acc, &i| acc + &graph.vertices[i])
            / scaffold.len() as f64;
        let frame = complement_frame(&mu, &(centroid - &vertex));
        let mut hinge = vec![&vertex + &frame[0] * offset];
        for t in &frame[1..] {
            hinge.push(&vertex + &frame[0] * offset + t * (0.8 * offset));
        }
        let attachments = hinge
            .iter()
            .map(|h| best_attachment(graph, scaffold, h))
            .collect::<Result<Vec<_>>>()?;
        Ok(HingeSpec {
            vertex,
            direction,
            hinge,
            attachments,
        })
    }
}

/// Orthonormal basis of `mu⟂` whose first vector is the projection of `toward`.
fn complement_frame(mu: &DVector<f64>, toward: &DVector<f64>) -> Vec<DVector<f64>> {
    let d = mu.len();
    let mut basis: Vec<DVector<f64>> = vec![mu.clone()];
    let mut candidates = vec![toward.clone()];
    candidates.extend((0..d).map(|k| DVector::from_fn(d, |i, _| if i == k { 1.0 } else { 0.0 })));
    for c in candidates {
        let mut w = c;
        for b in &basis {
            w -= b * b.dot(&w);
        }
        if w.norm() > 1e-6 {
            basis.push(w.normalize());
        }
        if basis.len() == d {
            break;
        }
    }
    basis.remove(0);
    basis
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn best_attachment(graph: &BarGraph, scaffold: &[usize], h: &DVector<f64>) -> Result<Vec<usize>> {
    let d = graph.dim;
    let mut best: Option<(f64, Vec<usize>)> = None;
    for combo in combinations(scaffold.len(), d) {
        let mut m = DMatrix::zeros(d, d);
        for (c, &i) in combo.iter().enumerate() {
            let e = &graph.vertices[scaffold[i]] - h;
            if e.norm() == 0.0 {
                continue;
            }
            m.set_column(c, &e.normalize());
        }
        let s = FullSvd::new(&m).sigma_min();
        if best.as_ref().is_none_or(|b| s > b.0) {
            best = Some((s, combo.iter().map(|&i| scaffold[i]).collect()));
        }
    }
    match best {
        Some((s, idx)) if s > 1e-6 => Ok(idx),
        _ => Err(Error::DegenerateHinge(
            "no well-conditioned attachment to the scaffold".into(),
        )),
    }
}

/// Indices created by a hinge attachment.
#[derive(Debug, Clone, PartialEq)]
pub struct HingeAttachment {
    pub vertex: usize,
    pub hinge: Vec<usize>,
    /// Angle between the relative velocity of the vertex and the prescribed direction.
    pub angular_deviation: f64,
}

fn check_spec(graph: &BarGraph, scaffold: &[usize], spec: &HingeSpec) -> Result<()> {
    let d = graph.dim;
    if spec.hinge.len() != d - 1 || spec.attachments.len() != d - 1 {
        return Err(Error::DegenerateHinge(format!(
            "expected {} hinge points with attachments",
            d - 1
        )));
    }
    let mu_norm = spec.direction.norm();
    if !(mu_norm > 0.0 && mu_norm.is_finite()) {
        return Err(Error::DegenerateHinge("direction must be non-zero".into()));
    }
    for h in &spec.hinge {
        let gap = &spec.vertex - h;
        if gap.norm() == 0.0 {
            return Err(Error::DegenerateHinge("hinge point coincides with the vertex".into()));
        }
        if spec.direction.dot(&gap).abs() > COPLANAR_RTOL * mu_norm * gap.norm() {
            return Err(Error::DegenerateHinge(
                "hinge point is off the hyperplane normal to the direction".into(),
            ));
        }
    }
    if affine_span_dim(&spec.hinge) != d - 2 {
        return Err(Error::DegenerateHinge("hinge points are affinely dependent".into()));
    }
    let mut with_v = spec.hinge.clone();
    with_v.push(spec.vertex.clone());
    if affine_span_dim(&with_v) != d - 1 {
        return Err(Error::DegenerateHinge("vertex lies on the hinge".into()));
    }
    let scale = graph
        .vertices
        .iter()
        .map(|p| p.norm())
        .fold(spec.vertex.norm(), f64::max)
        .max(1.0);
    for p in spec.hinge.iter().chain(std::iter::once(&spec.vertex)) {
        if graph.vertices.iter().any(|q| (p - q).norm() <= 1e-9 * scale) {
            return Err(Error::DegenerateHinge("new point coincides with a vertex".into()));
        }
    }
    for a in &spec.attachments {
        if a.len() != d {
            return Err(Error::DegenerateHinge(format!("each hinge point needs {d} attachments")));
        }
        for i in a {
            if !scaffold.contains(i) {
                return Err(Error::DegenerateHinge(format!("vertex {i} is not in the scaffold")));
            }
        }
    }
    Ok(())
}

/// Attaches `spec.vertex` to the scaffold vertices of `graph` through a hinge.
///
/// The scaffold (subgraph induced on `scaffold`) must be rigid with independent
/// constraints. The result is verified: with the scaffold pinned, the new vertex and
/// its hinge have a one-dimensional motion space whose velocity at the vertex is
/// parallel to the prescribed direction.
pub fn attach_hinge(graph: &mut BarGraph, scaffold: &[usize], spec: &HingeSpec) -> Result<HingeAttachment> {
    let d = graph.dim;
    check_spec(graph, scaffold, spec)?;
    let base = graph.induced(scaffold);
    match bar_dof(d, &base.vertices, &base.edges) {
        Ok(r) if r.dof == 0 && r.independent => {}
        _ => return Err(Error::NonRigidScaffold),
    }
    let mut work = graph.clone();
    let hinge: Vec<usize> = spec.hinge.iter().map(|h| work.add_vertex(h.clone())).collect();
    for (h, att) in hinge.iter().zip(&spec.attachments) {
        for &s in att {
            work.edges.push((s, *h));
        }
    }
    let vertex = work.add_vertex(spec.vertex.clone());
    for &h in &hinge {
        work.edges.push((h, vertex));
    }

    let mut local: Vec<usize> = scaffold.to_vec();
    local.extend(&hinge);
    local.push(vertex);
    let sub = work.induced(&local);
    let r = bar_rigidity_matrix(d, &sub.vertices, &sub.edges);
    if linalg::rank(&r)? != sub.edges.len() {
        return Err(Error::RedundantAttachment);
    }
    // pin the scaffold: keep only the columns of hinge points and the vertex
    let free = d * (hinge.len() + 1);
    let pinned = r.columns(d * scaffold.len(), free).into_owned();
    let (_, kernel) = linalg::kernel(&pinned)?;
    if kernel.len() != 1 {
        return Err(Error::DegenerateHinge(format!(
            "relative motion has dimension {}",
            kernel.len()
        )));
    }
    let x = &kernel[0];
    let vel = x.rows(d * hinge.len(), d).into_owned();
    let angular_deviation = angle_between(&vel, &spec.direction);
    if angular_deviation > HINGE_ANGLE_TOL {
        return Err(Error::DegenerateHinge(format!(
            "vertex moves at angle {angular_deviation:e} from the prescribed direction"
        )));
    }
    *graph = work;
    Ok(HingeAttachment {
        vertex,
        hinge,
        angular_deviation,
    })
}

/// Unsigned angle between two lines.
pub fn angle_between(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return std::f64::consts::FRAC_PI_2;
    }
    let (ua, ub) = (a / na, b / nb);
    let c = ua.dot(&ub).abs().min(1.0);
    let s = (&ua - &ub * ua.dot(&ub)).norm();
    s.atan2(c)
}

/// Hinge-attaches a new vertex to a minimally rigid scaffold; marked pairs are kept.
pub fn hinge_attach(scaffold: &FiniteLinkage, spec: &HingeSpec) -> Result<FiniteLinkage> {
    let mut g = BarGraph::from_linkage(scaffold);
    let all: Vec<usize> = (0..g.vertices.len()).collect();
    attach_hinge(&mut g, &all, spec)?;
    g.into_linkage(scaffold.marked_pairs().to_vec())
}

/// Removes from a finite flex the rigid motion that best fits it on `scaffold`.
///
/// For a rigid scaffold the result vanishes on the scaffold, i.e. it is the flex seen
/// by an observer attached to the scaffold.
pub fn relative_to_scaffold(
    vertices: &[DVector<f64>],
    scaffold: &[usize],
    velocities: &[DVector<f64>],
) -> Vec<DVector<f64>> {
    let d = vertices[0].len();
    let trivial = finite_trivial_motions(d, vertices);
    let k = trivial.len();
    let rows = scaffold.len() * d;
    let mut a = DMatrix::zeros(rows, k);
    let mut b = DVector::zeros(rows);
    for (r, &s) in scaffold.iter().enumerate() {
        for c in 0..d {
            b[r * d + c] = velocities[s][c];
            for (t, tv) in trivial.iter().enumerate() {
                a[(r * d + c, t)] = tv[s * d + c];
            }
        }
    }
    let coef = a
        .svd(true, true)
        .solve(&b, 1e-12)
        .unwrap_or_else(|_| DVector::zeros(k));
    velocities
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut w = v.clone();
            for (t, tv) in trivial.iter().enumerate() {
                w -= tv.rows(i * d, d) * coef[t];
            }
            w
        })
        .collect()
}
