//! Numerical continuation of one-parameter deformations of periodic frameworks.
//!
//! The state is `X = (p_0 … p_{ñ−1}, Λ)` with `Λ` flattened column-major. A step moves
//! along the unit gauge-fixed tangent and is corrected back onto the constraint set
//! `‖p_v + Λγ − p_u‖² = L²` by Newton iterations. The corrector keeps the gauge of the
//! step's start point and fixes the projection of the step on the tangent.
//!
//! `τ` is arclength measured with gauge-fixed velocities, so it does not depend on the
//! rigid motion picked up by the corrector; it is integrated over each step by 3-point
//! Gauss–Legendre quadrature. `ω̇ = dω/dτ`, with `τ` increasing in the opening
//! orientation of the deformation basis.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::auxetics::{gram_velocity, verdict, AuxeticVerdict, Tolerance, VerdictKind};
use crate::error::{Error, Result};
use crate::geometry::{gram, PeriodicFramework, SymmetricMatrix};
use crate::linalg::{skew_basis, FullSvd};
use crate::rigidity::{periodic_deformation_space, periodic_gauge_rows};

/// Ratio `σ_min / σ_max` of the corrector matrix below which a point counts as singular.
pub const SINGULAR_RTOL: f64 = 1e-9;
/// Width of the bisection bracket around an interval boundary.
pub const BISECTION_WIDTH: f64 = 1e-8;
/// Smallest step, as a fraction of the configured one.
const MIN_STEP_FRACTION: f64 = 1.0 / 64.0;

const GAUSS_NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
const GAUSS_WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];

#[derive(Debug, Clone, PartialEq)]
pub struct TraceConfig {
    pub step: f64,
    pub max_steps: usize,
    /// Bound on the relative edge-length error of every corrected point.
    pub corrector_tol: f64,
    pub max_corrector_iterations: usize,
    /// Only the sign matters: `+1` follows the opening orientation, `−1` the reverse.
    pub seed: f64,
    /// `None` scales the default tolerances to the initial lattice.
    pub tolerance: Option<Tolerance>,
    /// Stop once `|τ|` reaches this value.
    pub max_tau: Option<f64>,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            step: 1e-2,
            max_steps: 200,
            corrector_tol: 1e-12,
            max_corrector_iterations: 20,
            seed: 1.0,
            tolerance: None,
            max_tau: None,
        }
    }
}

impl TraceConfig {
    fn validate(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !positive(self.step) {
            return Err(Error::InvalidParameter(format!("step must be positive, got {}", self.step)));
        }
        if !positive(self.corrector_tol) {
            return Err(Error::InvalidParameter("corrector tolerance must be positive".into()));
        }
        if self.seed == 0.0 || !self.seed.is_finite() {
            return Err(Error::InvalidParameter("direction seed must be a non-zero sign".into()));
        }
        if let Some(t) = self.tolerance {
            if !(positive(t.relative) && t.stationary >= 0.0) {
                return Err(Error::InvalidParameter("PSD tolerance must be positive".into()));
            }
        }
        if self.max_tau.is_some_and(|t| !positive(t)) {
            return Err(Error::InvalidParameter("max_tau must be positive".into()));
        }
        Ok(())
    }
}

/// One point of a traced path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    pub tau: f64,
    pub placements: Vec<DVector<f64>>,
    pub lattice: DMatrix<f64>,
    pub omega: SymmetricMatrix,
    /// `dω/dτ`.
    pub omega_dot: SymmetricMatrix,
    pub verdict: AuxeticVerdict,
    /// Flat state `X`.
    pub state: DVector<f64>,
    /// Unit gauge-fixed `dX/dτ`.
    pub tangent: DVector<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    MaxSteps,
    /// `|τ|` reached the configured horizon.
    Horizon,
    /// The corrector matrix lost rank at the next point.
    Singularity { tau: f64 },
    /// The corrector failed even at the smallest step.
    CorrectorFailure { tau: f64 },
}

impl Termination {
    pub fn is_singular(self) -> bool {
        matches!(self, Termination::Singularity { .. } | Termination::CorrectorFailure { .. })
    }
}

/// Samples traced in one direction from `τ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    /// `+1` or `−1`: sign of `τ` along the branch.
    pub sign: f64,
    /// Ordered by increasing `|τ|`; the first sample is at `τ = 0`.
    pub samples: Vec<PathSample>,
    pub termination: Termination,
    /// Predictor length of the step leaving each sample.
    steps: Vec<f64>,
}

/// A traced deformation path, in one or both directions from the initial placement.
#[derive(Debug, Clone)]
pub struct GramPath {
    framework: PeriodicFramework,
    config: TraceConfig,
    tolerance: Tolerance,
    kin: Kinematics,
    pub branches: Vec<Branch>,
}

impl GramPath {
    pub fn framework(&self) -> &PeriodicFramework {
        &self.framework
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tolerance
    }

    /// All samples ordered by `τ`, the shared start sample once.
    pub fn samples(&self) -> Vec<&PathSample> {
        let mut out: Vec<&PathSample> = Vec::new();
        for b in self.branches.iter().filter(|b| b.sign < 0.0) {
            out.extend(b.samples.iter().skip(1).rev());
        }
        out.push(&self.branches[0].samples[0]);
        for b in self.branches.iter().filter(|b| b.sign > 0.0) {
            out.extend(b.samples.iter().skip(1));
        }
        out
    }

    /// Traced range of `τ`.
    pub fn tau_range(&self) -> (f64, f64) {
        let s = self.samples();
        (s[0].tau, s[s.len() - 1].tau)
    }

    /// Largest relative edge-length error over all samples.
    pub fn max_length_drift(&self) -> f64 {
        self.samples()
            .iter()
            .map(|s| self.kin.max_relative_error(&s.state))
            .fold(0.0, f64::max)
    }

    /// The path point at parameter `tau`, recomputed on the traced step containing it.
    pub fn locate(&self, tau: f64) -> Result<PathSample> {
        let (lo, hi) = self.tau_range();
        if !(tau >= lo && tau <= hi) {
            return Err(Error::OutsidePath(tau));
        }
        let sign = if tau < 0.0 { -1.0 } else { 1.0 };
        let branch = self
            .branches
            .iter()
            .find(|b| b.sign == sign)
            .or_else(|| self.branches.first().filter(|_| tau == 0.0))
            .ok_or(Error::OutsidePath(tau))?;
        let target = tau.abs();
        let k = branch
            .samples
            .windows(2)
            .position(|w| w[1].tau.abs() >= target)
            .unwrap_or(0);
        let start = &branch.samples[k];
        if branch.samples.len() == 1 || target == start.tau.abs() {
            return Ok(start.clone());
        }
        let end = &branch.samples[k + 1];
        if target == end.tau.abs() {
            return Ok(end.clone());
        }
        let step = Step::new(&self.kin, start, branch.sign, &self.config);
        let sigma = step.invert_arclength(target - start.tau.abs(), branch.steps[k])?;
        let x = step
            .correct(sigma)
            .ok_or(Error::CorrectorDivergence(tau))?;
        let n = step.velocity(&x);
        let t = self.kin.unit_tangent(&x, &n)?;
        Ok(self.kin.sample(tau, x, t, branch.sign, self.tolerance))
    }
}

/// Traces from the initial placement in the direction of `config.seed`.
pub fn trace(framework: &PeriodicFramework, config: &TraceConfig) -> Result<GramPath> {
    let mut path = start(framework, config)?;
    let sign = config.seed.signum();
    let branch = follow(&path.kin, &path.branches[0].samples[0], sign, config, path.tolerance)?;
    path.branches = vec![branch];
    Ok(path)
}

/// Traces both directions with the same step control.
pub fn trace_bidirectional(framework: &PeriodicFramework, config: &TraceConfig) -> Result<GramPath> {
    let mut path = start(framework, config)?;
    let first = path.branches[0].samples[0].clone();
    let fwd = follow(&path.kin, &first, 1.0, config, path.tolerance)?;
    let back = follow(&path.kin, &first, -1.0, config, path.tolerance)?;
    path.branches = vec![fwd, back];
    Ok(path)
}

fn start(framework: &PeriodicFramework, config: &TraceConfig) -> Result<GramPath> {
    config.validate()?;
    let space = periodic_deformation_space(framework)?;
    if space.dof != 1 {
        return Err(Error::NotOneDof(space.dof));
    }
    let kin = Kinematics::new(framework);
    let tolerance = config
        .tolerance
        .unwrap_or_else(|| Tolerance::for_lattice(framework.lattice()));
    let x0 = kin.state(framework);
    let t0 = space.basis[0].to_coordinates().normalize();
    let a = kin.corrector_matrix(&x0, &kin.gauge(&x0), &t0);
    if singular(&a) {
        return Err(Error::SingularConfiguration(0.0));
    }
    let first = kin.sample(0.0, x0, t0, 1.0, tolerance);
    Ok(GramPath {
        framework: framework.clone(),
        config: config.clone(),
        tolerance,
        kin,
        branches: vec![Branch {
            sign: 1.0,
            samples: vec![first],
            termination: Termination::MaxSteps,
            steps: Vec::new(),
        }],
    })
}

fn follow(
    kin: &Kinematics,
    first: &PathSample,
    sign: f64,
    config: &TraceConfig,
    tol: Tolerance,
) -> Result<Branch> {
    let mut samples = vec![first.clone()];
    let mut steps = Vec::new();
    let mut h = config.step;
    let mut termination = Termination::MaxSteps;
    while steps.len() < config.max_steps {
        let last = samples.last().expect("non-empty");
        if config.max_tau.is_some_and(|m| last.tau.abs() >= m) {
            termination = Termination::Horizon;
            break;
        }
        let step = Step::new(kin, last, sign, config);
        let Some(x) = step.correct(h) else {
            h *= 0.5;
            if h < config.step * MIN_STEP_FRACTION {
                termination = Termination::CorrectorFailure { tau: last.tau };
                break;
            }
            continue;
        };
        if singular(&kin.corrector_matrix(&x, &step.gauge, &step.direction)) {
            termination = Termination::Singularity { tau: last.tau };
            break;
        }
        let tau = last.tau + sign * step.arclength(h).ok_or(Error::CorrectorDivergence(last.tau))?;
        let n = step.velocity(&x);
        let t = kin.unit_tangent(&x, &n)?;
        samples.push(kin.sample(tau, x, t, sign, tol));
        steps.push(h);
        h = (2.0 * h).min(config.step);
    }
    if samples.len() == 1 && config.max_steps > 0 && termination.is_singular() {
        return Err(Error::CorrectorDivergence(0.0));
    }
    Ok(Branch {
        sign,
        samples,
        termination,
        steps,
    })
}

fn singular(a: &DMatrix<f64>) -> bool {
    let svd = FullSvd::new(a);
    svd.sigma_min() < SINGULAR_RTOL * svd.sigma_max()
}

/// Edge data and state-space maps of a fixed periodic graph.
#[derive(Debug, Clone)]
struct Kinematics {
    d: usize,
    n: usize,
    edges: Vec<(usize, usize, DVector<f64>, f64)>,
}

impl Kinematics {
    fn new(f: &PeriodicFramework) -> Self {
        let d = f.dim();
        let edges = f
            .edge_orbits()
            .iter()
            .map(|e| {
                let g = DVector::from_iterator(d, e.shift.iter().map(|&s| s as f64));
                (e.u, e.v, g, e.length * e.length)
            })
            .collect();
        Kinematics {
            d,
            n: f.orbit_count(),
            edges,
        }
    }

    fn len(&self) -> usize {
        self.n * self.d + self.d * self.d
    }

    fn state(&self, f: &PeriodicFramework) -> DVector<f64> {
        let mut x = DVector::zeros(self.len());
        for (i, p) in f.vertex_orbits().iter().enumerate() {
            x.rows_mut(i * self.d, self.d).copy_from(p);
        }
        x.rows_mut(self.n * self.d, self.d * self.d)
            .copy_from_slice(f.lattice().as_slice());
        x
    }

    fn lattice(&self, x: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_column_slice(self.d, self.d, x.rows(self.n * self.d, self.d * self.d).as_slice())
    }

    fn placements(&self, x: &DVector<f64>) -> Vec<DVector<f64>> {
        (0..self.n)
            .map(|i| x.rows(i * self.d, self.d).into_owned())
            .collect()
    }

    fn edge_vector(&self, x: &DVector<f64>, lattice: &DMatrix<f64>, e: usize) -> DVector<f64> {
        let (u, v, g, _) = &self.edges[e];
        x.rows(v * self.d, self.d) + lattice * g - x.rows(u * self.d, self.d)
    }

    /// `(‖e‖² − L²) / 2` per edge orbit.
    fn residual(&self, x: &DVector<f64>) -> DVector<f64> {
        let l = self.lattice(x);
        DVector::from_fn(self.edges.len(), |e, _| {
            0.5 * (self.edge_vector(x, &l, e).norm_squared() - self.edges[e].3)
        })
    }

    fn max_relative_error(&self, x: &DVector<f64>) -> f64 {
        let l = self.lattice(x);
        (0..self.edges.len())
            .map(|e| {
                let rest = self.edges[e].3.sqrt();
                ((self.edge_vector(x, &l, e).norm() - rest) / rest).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Jacobian of [`Self::residual`], i.e. the periodic rigidity matrix at `x`.
    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let (d, off) = (self.d, self.n * self.d);
        let l = self.lattice(x);
        let mut j = DMatrix::zeros(self.edges.len(), self.len());
        for (row, (u, v, g, _)) in self.edges.iter().enumerate() {
            let e = self.edge_vector(x, &l, row);
            for k in 0..d {
                j[(row, v * d + k)] += e[k];
                j[(row, u * d + k)] -= e[k];
            }
            for c in 0..d {
                for i in 0..d {
                    j[(row, off + c * d + i)] += e[i] * g[c];
                }
            }
        }
        j
    }

    fn gauge(&self, x: &DVector<f64>) -> DMatrix<f64> {
        periodic_gauge_rows(&self.lattice(x), self.n)
    }

    /// Translations then rotations at `x`, as columns.
    fn trivial(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let (d, off) = (self.d, self.n * self.d);
        let rots = skew_basis(d);
        let mut t = DMatrix::zeros(self.len(), d + rots.len());
        for k in 0..d {
            for i in 0..self.n {
                t[(i * d + k, k)] = 1.0;
            }
        }
        let l = self.lattice(x);
        for (c, s) in rots.iter().enumerate() {
            for i in 0..self.n {
                let sp = s * x.rows(i * d, d);
                t.view_mut((i * d, d + c), (d, 1)).copy_from(&sp);
            }
            let sl = s * &l;
            t.view_mut((off, d + c), (d * d, 1)).copy_from_slice(sl.as_slice());
        }
        t
    }

    /// Removes the trivial motion that puts `v` in the gauge at `x`.
    fn gauge_fix(&self, x: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let g = self.gauge(x);
        let t = self.trivial(x);
        let c = (&g * &t)
            .lu()
            .solve(&(&g * v))
            .expect("gauge rows are transversal to trivial motions");
        v - t * c
    }

    /// `[J(x); G; tᵀ]`.
    fn corrector_matrix(&self, x: &DVector<f64>, gauge: &DMatrix<f64>, t: &DVector<f64>) -> DMatrix<f64> {
        let j = self.jacobian(x);
        let rows = j.nrows() + gauge.nrows() + 1;
        let mut a = DMatrix::zeros(rows, self.len());
        a.view_mut((0, 0), j.shape()).copy_from(&j);
        a.view_mut((j.nrows(), 0), gauge.shape()).copy_from(gauge);
        a.set_row(rows - 1, &t.transpose());
        a
    }

    /// Unit kernel vector of `[J(x); G(x)]` with positive product against `hint`.
    fn unit_tangent(&self, x: &DVector<f64>, hint: &DVector<f64>) -> Result<DVector<f64>> {
        let j = self.jacobian(x);
        let g = self.gauge(x);
        let mut a = DMatrix::zeros(j.nrows() + g.nrows(), self.len());
        a.view_mut((0, 0), j.shape()).copy_from(&j);
        a.view_mut((j.nrows(), 0), g.shape()).copy_from(&g);
        let svd = FullSvd::new(&a);
        let t = svd.right.column(self.len() - 1).into_owned();
        Ok(if t.dot(hint) < 0.0 { -t } else { t })
    }

    /// Sample at `x` moving along `t` (`dX/ds`); `sign` converts to `dX/dτ`.
    fn sample(&self, tau: f64, x: DVector<f64>, t: DVector<f64>, sign: f64, tol: Tolerance) -> PathSample {
        let lattice = self.lattice(&x);
        let tangent = t * sign;
        let ldot = self.lattice(&tangent);
        let omega_dot = gram_velocity(&lattice, &ldot);
        PathSample {
            tau,
            placements: self.placements(&x),
            omega: gram(&lattice),
            verdict: verdict(&omega_dot, tol),
            omega_dot,
            lattice,
            state: x,
            tangent,
        }
    }
}

/// One continuation step leaving a sample: frozen gauge and direction.
struct Step<'a> {
    kin: &'a Kinematics,
    origin: DVector<f64>,
    direction: DVector<f64>,
    gauge: DMatrix<f64>,
    tol: f64,
    max_iter: usize,
}

impl<'a> Step<'a> {
    fn new(kin: &'a Kinematics, s: &PathSample, sign: f64, config: &TraceConfig) -> Self {
        Step {
            kin,
            origin: s.state.clone(),
            direction: &s.tangent * sign,
            gauge: kin.gauge(&s.state),
            tol: config.corrector_tol,
            max_iter: config.max_corrector_iterations,
        }
    }

    /// Point on the path with `tᵀ(x − x_k) = σ`, or `None` if Newton fails.
    fn correct(&self, sigma: f64) -> Option<DVector<f64>> {
        let m = self.kin.edges.len();
        let g = self.gauge.nrows();
        let mut x = &self.origin + &self.direction * sigma;
        let scale = 1.0 + self.origin.amax();
        for _ in 0..=self.max_iter {
            let dx = &x - &self.origin;
            let mut r = DVector::zeros(m + g + 1);
            r.rows_mut(0, m).copy_from(&self.kin.residual(&x));
            r.rows_mut(m, g).copy_from(&(&self.gauge * &dx));
            r[m + g] = self.direction.dot(&dx) - sigma;
            let linear = r.rows(m, g + 1).amax();
            if self.kin.max_relative_error(&x) <= self.tol && linear <= self.tol * scale {
                return Some(x);
            }
            if !r.iter().all(|v| v.is_finite()) {
                return None;
            }
            let a = self.kin.corrector_matrix(&x, &self.gauge, &self.direction);
            let delta = a.svd(true, true).solve(&r, 0.0).ok()?;
            x -= delta;
        }
        None
    }

    /// `dx/dσ` at a corrected point: kernel of `J` in the frozen gauge, `tᵀ n = 1`.
    fn velocity(&self, x: &DVector<f64>) -> DVector<f64> {
        let a = self.kin.corrector_matrix(x, &self.gauge, &self.direction);
        let mut rhs = DVector::zeros(a.nrows());
        rhs[a.nrows() - 1] = 1.0;
        a.svd(true, true)
            .solve(&rhs, 0.0)
            .expect("SVD solve with both factors")
    }

    /// Gauge-fixed speed `dτ/dσ` at the corrected point for `σ`.
    fn speed(&self, sigma: f64) -> Option<f64> {
        let x = self.correct(sigma)?;
        let n = self.velocity(&x);
        Some(self.kin.gauge_fix(&x, &n).norm())
    }

    /// `τ` travelled for `σ ∈ [0, sigma]`.
    fn arclength(&self, sigma: f64) -> Option<f64> {
        let mut acc = 0.0;
        for (node, w) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
            acc += w * self.speed(0.5 * sigma * (1.0 + node))?;
        }
        Some(0.5 * sigma * acc)
    }

    /// `σ ∈ [0, max]` with `arclength(σ) = target`, by safeguarded Newton.
    fn invert_arclength(&self, target: f64, max: f64) -> Result<f64> {
        let fail = || Error::CorrectorDivergence(target);
        let (mut lo, mut hi) = (0.0, max);
        let mut sigma = max * target / self.arclength(max).ok_or_else(fail)?;
        for _ in 0..60 {
            let f = self.arclength(sigma).ok_or_else(fail)? - target;
            if f.abs() <= 1e-15 * (1.0 + target) {
                break;
            }
            if f > 0.0 {
                hi = sigma;
            } else {
                lo = sigma;
            }
            let next = sigma - f / self.speed(sigma).ok_or_else(fail)?;
            sigma = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
            if hi - lo <= 1e-16 * max {
                break;
            }
        }
        Ok(sigma)
    }
}

/// How one end of an auxetic interval was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundaryKind {
    /// `λ_min(ω̇)` crossed `−tol · ‖ω̇‖_F`.
    ConeBoundary,
    /// The trace stopped at a singular configuration.
    Singularity,
    /// The trace ran out of steps or reached its `τ` horizon.
    TraceHorizon,
}

/// Open interval `(lo, hi)` of `τ` around 0 on which `ω̇` stays in the PSD cone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxeticInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_kind: BoundaryKind,
    pub hi_kind: BoundaryKind,
}

impl AuxeticInterval {
    pub fn contains(&self, tau: f64) -> bool {
        tau > self.lo && tau < self.hi
    }
}

fn outside_cone(s: &PathSample) -> bool {
    matches!(s.verdict.kind, VerdictKind::NonAuxetic | VerdictKind::Stationary)
}

/// Maximal interval around `τ = 0` on which the traced tangents are auxetic.
pub fn auxetic_interval(path: &GramPath) -> Result<AuxeticInterval> {
    let first = &path.branches[0].samples[0];
    if !first.verdict.kind.is_auxetic() {
        return Err(Error::NotAuxeticAtStart);
    }
    let mut ends = [(0.0, BoundaryKind::TraceHorizon); 2];
    for (slot, sign) in [(0, -1.0), (1, 1.0)] {
        let Some(b) = path.branches.iter().find(|b| b.sign == sign) else {
            continue;
        };
        ends[slot] = branch_boundary(path, b)?;
    }
    Ok(AuxeticInterval {
        lo: ends[0].0,
        hi: ends[1].0,
        lo_kind: ends[0].1,
        hi_kind: ends[1].1,
    })
}

fn branch_boundary(path: &GramPath, b: &Branch) -> Result<(f64, BoundaryKind)> {
    let Some(k) = b.samples.iter().position(outside_cone) else {
        let last = b.samples.last().expect("non-empty").tau;
        let kind = if b.termination.is_singular() {
            BoundaryKind::Singularity
        } else {
            BoundaryKind::TraceHorizon
        };
        return Ok((last, kind));
    };
    // bisect between the last sample inside the cone and the first one outside
    let (mut inside, mut outside) = (b.samples[k - 1].tau, b.samples[k].tau);
    while (outside - inside).abs() > BISECTION_WIDTH {
        let mid = 0.5 * (inside + outside);
        let s = path.locate(mid)?;
        if !outside_cone(&s) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    Ok((0.5 * (inside + outside), BoundaryKind::ConeBoundary))
}
