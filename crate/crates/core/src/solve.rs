//! Pentagon families cut out by linear angle relations, edge equalities and
//! closure. The angle part is exact; closure is solved numerically per sample.

use nalgebra::{DMatrix, DVector};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{fourier_motzkin, polytope_vertices, q, q_to_f64, solve_affine, AffineSolve, AffineSpace, Ineq, Q};
use crate::geometry::{build_pentagon, AngleVector, EdgeVector, Tolerance, EDGE_LABELS, VERTEX_LABELS};
use crate::table::TypeDefinition;

/// `sum coef_i * angle_i = rhs` in degrees.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AngleEq {
    pub coef: [i64; 5],
    pub rhs: i64,
}

impl std::fmt::Display for AngleEq {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} = {}", linear_form(&self.coef, &VERTEX_LABELS), self.rhs)
    }
}

pub(crate) fn linear_form(coef: &[i64; 5], labels: &[char; 5]) -> String {
    let mut s = String::new();
    for (i, &c) in coef.iter().enumerate() {
        if c == 0 {
            continue;
        }
        if s.is_empty() {
            if c < 0 {
                s.push('-');
            }
        } else {
            s.push_str(if c < 0 { " - " } else { " + " });
        }
        if c.abs() != 1 {
            s.push_str(&c.abs().to_string());
        }
        s.push(labels[i]);
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

/// A conjunction of angle relations, edge equalities and integer edge
/// relations over one pentagon.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintSet {
    pub angle_relations: Vec<AngleEq>,
    pub edge_classes: Vec<Vec<usize>>,
    pub edge_relations: Vec<[i64; 5]>,
}

impl ConstraintSet {
    pub fn from_type(def: &TypeDefinition) -> ConstraintSet {
        ConstraintSet {
            angle_relations: def
                .angle_relations
                .iter()
                .map(|r| AngleEq {
                    coef: r.coef,
                    rhs: r.rhs,
                })
                .collect(),
            edge_classes: def.edge_classes.clone(),
            edge_relations: def.edge_relations.iter().map(|r| r.coef).collect(),
        }
        .normalized()
    }

    pub fn merged(&self, other: &ConstraintSet) -> ConstraintSet {
        let mut out = self.clone();
        out.angle_relations.extend(other.angle_relations.iter().cloned());
        out.edge_classes.extend(other.edge_classes.iter().cloned());
        out.edge_relations.extend(other.edge_relations.iter().cloned());
        out.normalized()
    }

    /// Class representative of each edge after merging overlapping classes.
    pub fn edge_partition(&self) -> [usize; 5] {
        let mut parent = [0, 1, 2, 3, 4];
        fn find(p: &mut [usize; 5], i: usize) -> usize {
            let mut r = i;
            while p[r] != r {
                r = p[r];
            }
            p[i] = r;
            r
        }
        for c in &self.edge_classes {
            for w in c.windows(2) {
                let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        std::array::from_fn(|i| find(&mut parent, i))
    }

    /// Sorted classes of size >= 2, duplicate relations removed.
    pub fn normalized(mut self) -> ConstraintSet {
        let part = self.edge_partition();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for r in 0..5 {
            let c: Vec<usize> = (0..5).filter(|&i| part[i] == r).collect();
            if c.len() >= 2 {
                classes.push(c);
            }
        }
        self.edge_classes = classes;
        let mut seen = Vec::new();
        self.angle_relations.retain(|r| {
            let keep = !seen.contains(r);
            seen.push(r.clone());
            keep
        });
        self.edge_relations.dedup();
        self
    }

    pub fn describe(&self) -> Vec<String> {
        let mut out: Vec<String> = self.angle_relations.iter().map(|r| r.to_string()).collect();
        for c in &self.edge_classes {
            let s: Vec<String> = c.iter().map(|&i| EDGE_LABELS[i].to_string()).collect();
            out.push(s.join(" = "));
        }
        for r in &self.edge_relations {
            out.push(format!("{} = 0", linear_form(r, &EDGE_LABELS)));
        }
        out
    }

    /// The equality rows of the angle system, with the angle sum last.
    pub fn angle_rows(&self) -> (Vec<Vec<Q>>, Vec<Q>) {
        let mut rows: Vec<Vec<Q>> = self
            .angle_relations
            .iter()
            .map(|r| r.coef.iter().map(|&c| q(c)).collect())
            .collect();
        let mut rhs: Vec<Q> = self.angle_relations.iter().map(|r| q(r.rhs)).collect();
        rows.push(vec![q(1); 5]);
        rhs.push(q(540));
        (rows, rhs)
    }
}

/// Exact witness that the angle system has no convex solution.
///
/// With `g_i(x) = x_i` for `i < 5` and `g_i(x) = 180 - x_{i-5}` otherwise,
/// the multipliers satisfy `sum lambda_i grad g_i = A^T mu` and
/// `kappa = sum lambda_i g_i(0) + mu . rhs`, where `kappa <= 0` with
/// `lambda != 0`, or `kappa != 0` with `lambda = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfeasibilityCertificate {
    /// Rationals as strings, e.g. `"3/2"`.
    pub lambda: Vec<String>,
    pub mu: Vec<String>,
    pub kappa: String,
    pub reason: String,
}

fn q_parse(s: &str) -> Option<Q> {
    s.parse().ok()
}

fn bound_value(i: usize) -> (Q, [i64; 5]) {
    let mut grad = [0; 5];
    if i < 5 {
        grad[i] = 1;
        (q(0), grad)
    } else {
        grad[i - 5] = -1;
        (q(180), grad)
    }
}

impl InfeasibilityCertificate {
    /// Recheck from scratch against the system's equality rows.
    pub fn verify(&self, cs: &ConstraintSet) -> bool {
        let (rows, rhs) = cs.angle_rows();
        let (Some(lambda), Some(mu)) = (
            self.lambda.iter().map(|s| q_parse(s)).collect::<Option<Vec<Q>>>(),
            self.mu.iter().map(|s| q_parse(s)).collect::<Option<Vec<Q>>>(),
        ) else {
            return false;
        };
        if lambda.len() != 10 || mu.len() != rows.len() || lambda.iter().any(|l| l.is_negative()) {
            return false;
        }
        let mut grad = vec![q(0); 5];
        let mut kappa = q(0);
        for (i, l) in lambda.iter().enumerate() {
            let (g0, g) = bound_value(i);
            for k in 0..5 {
                grad[k] += l * q(g[k]);
            }
            kappa += l * g0;
        }
        for (j, m) in mu.iter().enumerate() {
            for k in 0..5 {
                grad[k] -= m * &rows[j][k];
            }
            kappa += m * &rhs[j];
        }
        if grad.iter().any(|g| !g.is_zero()) {
            return false;
        }
        let claimed = q_parse(&self.kappa);
        if claimed.as_ref() != Some(&kappa) {
            return false;
        }
        if lambda.iter().all(Zero::is_zero) {
            !kappa.is_zero()
        } else {
            !kappa.is_positive()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PentagonSample {
    pub angles: AngleVector,
    /// Scaled so the longest edge is 1.
    pub edges: EdgeVector,
    pub closure_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Family {
    pub constraints: Vec<String>,
    /// Dimension of the exact angle solution space.
    pub angle_dim: usize,
    pub edge_classes: usize,
    /// Expected dimension of the shape family modulo scale; negative means
    /// over-determined for generic angles.
    pub dimension: i64,
    /// Corners of the convex angle region, rounded to f64.
    pub angle_region: Vec<AngleVector>,
    pub samples: Vec<PentagonSample>,
    /// Sample points in the angle region where no closed convex pentagon
    /// was found nearby.
    pub unclosed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum SolveOutcome {
    Infeasible { certificate: InfeasibilityCertificate },
    Family { family: Family },
}

impl SolveOutcome {
    pub fn family(&self) -> Option<&Family> {
        match self {
            SolveOutcome::Family { family } => Some(family),
            SolveOutcome::Infeasible { .. } => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("closure solve diverged at sample {sample} (residual {residual:e})")]
    SolveDiverged { sample: usize, residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Samples per free angle dimension.
    pub samples_per_dim: usize,
    pub seed: u64,
    /// Preferred distance in degrees of sampled angles from 0 and 180.
    pub margin: f64,
    pub tol: Tolerance,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            samples_per_dim: 5,
            seed: 0,
            margin: 1.0,
            tol: Tolerance::default(),
        }
    }
}

/// Exact analysis of the angle system: its affine solution space, or a
/// certificate that no convex angle vector satisfies it.
pub fn angle_space(cs: &ConstraintSet) -> Result<(AffineSpace, Vec<Ineq>), InfeasibilityCertificate> {
    let (rows, rhs) = cs.angle_rows();
    let space = match solve_affine(&rows, &rhs, 5) {
        AffineSolve::Solved(s) => s,
        AffineSolve::Inconsistent(mu) => {
            let kappa: Q = mu.iter().zip(&rhs).map(|(m, r)| m * r).sum();
            return Err(InfeasibilityCertificate {
                lambda: vec!["0".into(); 10],
                mu: mu.iter().map(|m| m.to_string()).collect(),
                kappa: kappa.to_string(),
                reason: "angle equations are inconsistent".into(),
            });
        }
    };
    let dims = space.dim();
    let ineqs: Vec<Ineq> = (0..10)
        .map(|i| {
            let (g0, g) = bound_value(i);
            let coef = space
                .basis
                .iter()
                .map(|b| b.iter().zip(g).map(|(x, gk)| x * q(gk)).sum())
                .collect();
            let constant = g0 + space.point.iter().zip(g).map(|(x, gk)| x * q(gk)).sum::<Q>();
            let mut origin = vec![q(0); 10];
            origin[i] = q(1);
            Ineq {
                coef,
                constant,
                strict: true,
                origin,
            }
        })
        .collect();
    if let Err(lambda) = fourier_motzkin(ineqs.clone(), dims) {
        // grad of sum lambda g lies in the row space of the equalities
        let mut target = vec![q(0); 5];
        let mut kappa0 = q(0);
        for (i, l) in lambda.iter().enumerate() {
            let (g0, g) = bound_value(i);
            for k in 0..5 {
                target[k] += l * q(g[k]);
            }
            kappa0 += l * g0;
        }
        let transposed: Vec<Vec<Q>> = (0..5).map(|k| rows.iter().map(|r| r[k].clone()).collect()).collect();
        let mu = match solve_affine(&transposed, &target, rows.len()) {
            AffineSolve::Solved(s) => s.point,
            AffineSolve::Inconsistent(_) => unreachable!("multiplier gradient outside the row space"),
        };
        let kappa = kappa0 + mu.iter().zip(&rhs).map(|(m, r)| m * r).sum::<Q>();
        let violated: Vec<String> = lambda
            .iter()
            .enumerate()
            .filter(|(_, l)| !l.is_zero())
            .map(|(i, _)| {
                if i < 5 {
                    format!("{} > 0", VERTEX_LABELS[i])
                } else {
                    format!("{} < 180", VERTEX_LABELS[i - 5])
                }
            })
            .collect();
        return Err(InfeasibilityCertificate {
            lambda: lambda.iter().map(|l| l.to_string()).collect(),
            mu: mu.iter().map(|m| m.to_string()).collect(),
            kappa: kappa.to_string(),
            reason: format!("convexity bounds {} cannot all hold", violated.join(", ")),
        });
    }
    Ok((space, ineqs))
}

fn halton(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

const PRIMES: [u64; 5] = [2, 3, 5, 7, 11];

/// Sample points of the angle region: the vertex centroid first, then a
/// Halton sequence over the bounding box, kept if inside with margin.
fn angle_samples(space: &AffineSpace, ineqs: &[Ineq], opts: &SolveOptions) -> (Vec<AngleVector>, Vec<AngleVector>) {
    let dims = space.dim();
    let verts: Vec<Vec<Q>> = polytope_vertices(ineqs, dims);
    let region: Vec<AngleVector> = verts
        .iter()
        .map(|v| {
            let x = space.eval(v);
            AngleVector(std::array::from_fn(|i| q_to_f64(&x[i])))
        })
        .collect();
    let to_angles = |t: &[f64]| {
        let x = space.eval_f64(t);
        AngleVector(std::array::from_fn(|i| x[i]))
    };
    if dims == 0 {
        let a = to_angles(&[]);
        return (if a.is_convex() { vec![a] } else { vec![] }, region);
    }
    let want = opts.samples_per_dim.max(1) * dims;
    let tv: Vec<Vec<f64>> = verts.iter().map(|v| v.iter().map(q_to_f64).collect()).collect();
    let mut lo = vec![f64::INFINITY; dims];
    let mut hi = vec![f64::NEG_INFINITY; dims];
    for v in &tv {
        for k in 0..dims {
            lo[k] = lo[k].min(v[k]);
            hi[k] = hi[k].max(v[k]);
        }
    }
    let inside = |a: &AngleVector, m: f64| a.0.iter().all(|&x| x >= m && x <= 180.0 - m) && a.is_convex();
    let mut out = Vec::with_capacity(want);
    let centroid: Vec<f64> = (0..dims)
        .map(|k| tv.iter().map(|v| v[k]).sum::<f64>() / tv.len() as f64)
        .collect();
    let c = to_angles(&centroid);
    if inside(&c, 0.0) {
        out.push(c);
    }
    for margin in [opts.margin, 0.0] {
        let mut i = 1 + opts.seed;
        let limit = i + 200 * want as u64;
        while out.len() < want && i < limit {
            let t: Vec<f64> = (0..dims).map(|k| lo[k] + halton(i, PRIMES[k]) * (hi[k] - lo[k])).collect();
            let a = to_angles(&t);
            if inside(&a, margin) && !out.contains(&a) {
                out.push(a);
            }
            i += 1;
        }
    }
    (out, region)
}

/// Closure and edge-relation matrix over edge classes: columns are classes,
/// rows are the two closure components followed by the edge relations.
fn closure_matrix(angles: &AngleVector, classes: &[Vec<usize>], relations: &[[i64; 5]]) -> DMatrix<f64> {
    let dirs = angles.edge_directions();
    let k = classes.len();
    let mut m = DMatrix::zeros(2 + relations.len(), k);
    for (j, c) in classes.iter().enumerate() {
        for &i in c {
            m[(0, j)] += dirs[i].x;
            m[(1, j)] += dirs[i].y;
            for (r, rel) in relations.iter().enumerate() {
                m[(2 + r, j)] += rel[i] as f64;
            }
        }
    }
    m
}

fn null_space(m: &DMatrix<f64>) -> DMatrix<f64> {
    let k = m.ncols();
    // pad to a square so the SVD exposes all right singular vectors
    let mut sq = DMatrix::zeros(m.nrows().max(k), k);
    sq.view_mut((0, 0), (m.nrows(), k)).copy_from(m);
    let svd = sq.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.max().max(1.0);
    let cols: Vec<DVector<f64>> = (0..k)
        .filter(|&i| svd.singular_values[i] <= 1e-11 * smax)
        .map(|i| vt.row(i).transpose())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(k, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// A strictly positive vector in the column span of `n`, if one is found.
fn positive_in_span(n: &DMatrix<f64>) -> Option<DVector<f64>> {
    if n.ncols() == 0 {
        return None;
    }
    let k = n.nrows();
    let proj = |v: &DVector<f64>| n * (n.transpose() * v);
    let mut x = proj(&DVector::from_element(k, 1.0));
    if x.sum() < 0.0 {
        x = -x;
    }
    // alternate between the span and the orthant shifted to a floor
    for _ in 0..500 {
        let scale = x.amax();
        if scale <= 0.0 {
            return None;
        }
        if x.min() > 1e-3 * scale {
            return Some(x / scale);
        }
        let floor = 0.05 * scale;
        let clipped = x.map(|v| v.max(floor));
        x = proj(&clipped);
    }
    None
}

fn expand(classes: &[Vec<usize>], x: &DVector<f64>) -> EdgeVector {
    let mut e = [0.0; 5];
    for (j, c) in classes.iter().enumerate() {
        for &i in c {
            e[i] = x[j];
        }
    }
    let max = e.iter().cloned().fold(0.0, f64::max);
    EdgeVector(e.map(|v| v / max))
}

const DEG_PER_RAD: f64 = 180.0 / std::f64::consts::PI;
const MAX_ANGLE_STEP: f64 = 10.0;

/// Newton iteration with minimum-norm steps on angle parameters and class
/// lengths together. Returns the converged point or the final residual.
fn joint_newton(
    space: &AffineSpace,
    t0: &[f64],
    x0: DVector<f64>,
    classes: &[Vec<usize>],
    relations: &[[i64; 5]],
) -> Result<(AngleVector, DVector<f64>), f64> {
    let da = space.dim();
    let k = classes.len();
    let basis: Vec<Vec<f64>> = space.basis.iter().map(|b| b.iter().map(q_to_f64).collect()).collect();
    let eval = |t: &[f64]| {
        let x = space.eval_f64(t);
        AngleVector(std::array::from_fn(|i| x[i]))
    };
    let residual = |t: &[f64], x: &DVector<f64>| -> DVector<f64> {
        let m = closure_matrix(&eval(t), classes, relations);
        let mut r = DVector::zeros(m.nrows() + 1);
        r.rows_mut(0, m.nrows()).copy_from(&(&m * x));
        r[m.nrows()] = x.sum() - k as f64;
        r
    };
    let mut t = t0.to_vec();
    let mut x = x0;
    let mut f = residual(&t, &x);
    for _ in 0..60 {
        let norm = f.norm();
        if !norm.is_finite() {
            return Err(f64::NAN);
        }
        if norm < 1e-14 {
            return Ok((eval(&t), x));
        }
        let angles = eval(&t);
        let h = angles.edge_headings();
        let m = closure_matrix(&angles, classes, relations);
        let rows = m.nrows() + 1;
        let mut jac = DMatrix::zeros(rows, da + k);
        // d(closure)/d(angle_j) = sum_{i >= j} e_i * d(dir_i)/dh_i * (-pi/180)
        let mut edge = [0.0; 5];
        for (c, cl) in classes.iter().enumerate() {
            for &i in cl {
                edge[i] = x[c];
            }
        }
        let mut dangle = [[0.0f64; 2]; 5];
        for j in 1..5 {
            for i in j..5 {
                let r = h[i].to_radians();
                let s = -std::f64::consts::PI / 180.0 * edge[i];
                dangle[j][0] += s * -r.sin();
                dangle[j][1] += s * r.cos();
            }
        }
        // angle parameters are stepped in radians so both blocks are O(1)
        for (p, b) in basis.iter().enumerate() {
            for j in 0..5 {
                jac[(0, p)] += dangle[j][0] * b[j] * DEG_PER_RAD;
                jac[(1, p)] += dangle[j][1] * b[j] * DEG_PER_RAD;
            }
        }
        jac.view_mut((0, da), (m.nrows(), k)).copy_from(&m);
        for c in 0..k {
            jac[(rows - 1, da + c)] = 1.0;
        }
        let Some(mut step) = jac.clone().pseudo_inverse(1e-13).ok().map(|p| p * &f) else {
            return Err(norm);
        };
        for p in 0..da {
            step[p] *= DEG_PER_RAD;
        }
        let biggest = step.rows(0, da).amax();
        if biggest > MAX_ANGLE_STEP {
            step *= MAX_ANGLE_STEP / biggest;
        }
        let mut alpha = 1.0;
        loop {
            let tn: Vec<f64> = (0..da).map(|p| t[p] - alpha * step[p]).collect();
            let xn: DVector<f64> = DVector::from_fn(k, |c, _| x[c] - alpha * step[da + c]);
            let fnew = residual(&tn, &xn);
            let admissible = eval(&tn).is_convex() && xn.min() > 0.0;
            if admissible && fnew.norm() < norm {
                t = tn;
                x = xn;
                f = fnew;
                break;
            }
            alpha *= 0.5;
            if alpha < 1e-6 {
                return Err(norm);
            }
        }
    }
    Err(f.norm())
}

fn smallest_singular_vector(m: &DMatrix<f64>) -> DVector<f64> {
    let k = m.ncols();
    let mut sq = DMatrix::zeros(m.nrows().max(k), k);
    sq.view_mut((0, 0), (m.nrows(), k)).copy_from(m);
    let svd = sq.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let v: DVector<f64> = vt.row(svd.singular_values.imin()).transpose();
    if v.sum() < 0.0 {
        -v
    } else {
        v
    }
}

/// Square closure matrices are singular on a hypersurface of angle space.
/// Scan lines through `t0` for sign changes of the determinant, bisect, and
/// keep the root nearest `t0` whose null vector is positive.
fn bracket_roots(
    space: &AffineSpace,
    t0: &[f64],
    classes: &[Vec<usize>],
    relations: &[[i64; 5]],
    sample: usize,
) -> Result<Option<(AngleVector, DVector<f64>)>, SolveError> {
    let da = space.dim();
    if da == 0 {
        return Ok(None);
    }
    let eval = |t: &[f64]| {
        let x = space.eval_f64(t);
        AngleVector(std::array::from_fn(|i| x[i]))
    };
    let det = |t: &[f64]| closure_matrix(&eval(t), classes, relations).determinant();
    let mut dirs: Vec<Vec<f64>> = (0..da)
        .map(|k| (0..da).map(|j| if j == k { 1.0 } else { 0.0 }).collect())
        .collect();
    for i in 1..=8u64 {
        dirs.push((0..da).map(|k| 2.0 * halton(i, PRIMES[k]) - 1.0).collect());
    }
    let mut best: Option<(f64, AngleVector, DVector<f64>)> = None;
    for d in &dirs {
        let at = |s: f64| -> Vec<f64> { t0.iter().zip(d).map(|(t, di)| t + s * di).collect() };
        // parameter interval keeping all angles inside (0, 180)
        let a0 = eval(t0);
        let slope: Vec<f64> = {
            let a1 = eval(&at(1.0));
            (0..5).map(|i| a1.0[i] - a0.0[i]).collect()
        };
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for i in 0..5 {
            if slope[i].abs() < 1e-12 {
                continue;
            }
            let r1 = (1e-9 - a0.0[i]) / slope[i];
            let r2 = (180.0 - 1e-9 - a0.0[i]) / slope[i];
            lo = lo.max(r1.min(r2));
            hi = hi.min(r1.max(r2));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            continue;
        }
        const STEPS: usize = 96;
        let mut prev = (lo, det(&at(lo)));
        for j in 1..=STEPS {
            let s = lo + (hi - lo) * j as f64 / STEPS as f64;
            let cur = (s, det(&at(s)));
            if prev.1.signum() != cur.1.signum() && prev.1 != 0.0 {
                let (mut l, mut h, fl) = (prev.0, cur.0, prev.1);
                for _ in 0..200 {
                    let mid = 0.5 * (l + h);
                    if mid == l || mid == h {
                        break;
                    }
                    let fm = det(&at(mid));
                    if fm == 0.0 {
                        l = mid;
                        h = mid;
                        break;
                    }
                    if fm.signum() == fl.signum() {
                        l = mid;
                    } else {
                        h = mid;
                    }
                }
                let s_root = 0.5 * (l + h);
                let t = at(s_root);
                let angles = eval(&t);
                let m = closure_matrix(&angles, classes, relations);
                let x = smallest_singular_vector(&m);
                let scale = x.amax();
                let resid = (&m * &x).norm() / scale.max(1e-300);
                if !resid.is_finite() {
                    return Err(SolveError::SolveDiverged { sample, residual: resid });
                }
                if x.min() > 1e-3 * scale && angles.is_convex() {
                    if resid > 1e-10 {
                        return Err(SolveError::SolveDiverged { sample, residual: resid });
                    }
                    let dist = s_root.abs() * d.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if best.as_ref().is_none_or(|b| dist < b.0) {
                        best = Some((dist, angles, x / scale));
                    }
                }
            }
            prev = cur;
        }
    }
    Ok(best.map(|(_, a, x)| (a, x)))
}

/// Sample concrete closed convex pentagons from the family defined by `cs`.
pub fn solve_constraints(cs: &ConstraintSet, opts: &SolveOptions) -> Result<SolveOutcome, SolveError> {
    let cs = cs.clone().normalized();
    let (space, ineqs) = match angle_space(&cs) {
        Ok(v) => v,
        Err(certificate) => return Ok(SolveOutcome::Infeasible { certificate }),
    };
    let part = cs.edge_partition();
    let classes: Vec<Vec<usize>> = (0..5)
        .filter(|&r| part[r] == r)
        .map(|r| (0..5).filter(|&i| part[i] == r).collect())
        .collect();
    let relations = &cs.edge_relations;
    let (points, region) = angle_samples(&space, &ineqs, opts);
    let mut samples: Vec<PentagonSample> = Vec::new();
    let mut unclosed = 0;
    let dims = space.dim();
    let basis_f: Vec<Vec<f64>> = space.basis.iter().map(|b| b.iter().map(q_to_f64).collect()).collect();
    let point_f: Vec<f64> = space.point.iter().map(q_to_f64).collect();
    for (idx, a) in points.iter().enumerate() {
        let m = closure_matrix(a, &classes, relations);
        let n = null_space(&m);
        let found = if let Some(x) = positive_in_span(&n) {
            Some((*a, x))
        } else {
            let t0: Vec<f64> = (0..dims)
                .map(|p| {
                    let b = &basis_f[p];
                    let nb: f64 = b.iter().map(|v| v * v).sum();
                    (0..5).map(|i| (a.0[i] - point_f[i]) * b[i]).sum::<f64>() / nb
                })
                .collect();
            if m.nrows() == m.ncols() {
                bracket_roots(&space, &t0, &classes, relations, idx)?
            } else {
                let k = classes.len();
                let x0 = smallest_singular_vector(&m).map(|v| v.max(0.05));
                let x0 = &x0 * (k as f64 / x0.sum());
                match joint_newton(&space, &t0, x0, &classes, relations) {
                    Ok((angles, x)) if x.min() > 1e-3 * x.amax() && angles.is_convex() => Some((angles, x)),
                    Ok(_) => None,
                    Err(res) if res.is_nan() => return Err(SolveError::SolveDiverged { sample: idx, residual: res }),
                    Err(_) => None,
                }
            }
        };
        let Some((angles, x)) = found else {
            unclosed += 1;
            continue;
        };
        let edges = expand(&classes, &x);
        match build_pentagon(&angles, &edges, &opts.tol) {
            Ok(_) => {
                let defect = crate::geometry::closure_defect(&angles, &edges).norm();
                let s = PentagonSample {
                    angles,
                    edges,
                    closure_defect: defect,
                };
                if !samples.iter().any(|o| o.angles == s.angles && o.edges == s.edges) {
                    samples.push(s);
                }
            }
            Err(_) => unclosed += 1,
        }
    }
    Ok(SolveOutcome::Family {
        family: Family {
            constraints: cs.describe(),
            angle_dim: dims,
            edge_classes: classes.len(),
            dimension: dims as i64 + classes.len() as i64 - 3 - relations.len() as i64,
            angle_region: region,
            samples,
            unclosed,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::classify;
    use crate::table::TypeTable;

    fn eq(coef: [i64; 5], rhs: i64) -> AngleEq {
        AngleEq { coef, rhs }
    }

    #[test]
    fn contradictory_equations_certified() {
        let cs = ConstraintSet {
            angle_relations: vec![eq([3, 0, 0, 0, 0], 360), eq([1, 0, 0, 0, 0], 100)],
            ..Default::default()
        };
        let SolveOutcome::Infeasible { certificate } = solve_constraints(&cs, &SolveOptions::default()).unwrap() else {
            panic!("expected infeasible");
        };
        assert!(certificate.verify(&cs));
    }

    #[test]
    fn convexity_violation_certified() {
        // 2A + B = 360 and A + B + C = 540 - ... force D + E = 0
        let cs = ConstraintSet {
            angle_relations: vec![eq([1, 1, 1, 0, 0], 540)],
            ..Default::default()
        };
        let SolveOutcome::Infeasible { certificate } = solve_constraints(&cs, &SolveOptions::default()).unwrap() else {
            panic!("expected infeasible");
        };
        assert!(certificate.verify(&cs), "{certificate:?}");
        let mut forged = certificate.clone();
        forged.kappa = "1".into();
        assert!(!forged.verify(&cs));
    }

    #[test]
    fn every_type_row_round_trips() {
        let table = TypeTable::shipped();
        let opts = SolveOptions::default();
        for def in table.edge_to_edge() {
            let cs = ConstraintSet::from_type(def);
            let out = solve_constraints(&cs, &opts).unwrap();
            let fam = out.family().expect("type rows are feasible");
            assert!(!fam.samples.is_empty(), "type {} produced no samples", def.name);
            for s in &fam.samples {
                let c = classify(&s.angles, &s.edges, &table, &opts.tol);
                assert!(c.contains(&def.name), "type {} sample {:?} -> {:?}", def.name, s, c.types);
            }
        }
    }

    #[test]
    fn equilateral_with_two_right_thirds() {
        // 3A = 360 and 3B = 360 with all edges equal
        let cs = ConstraintSet {
            angle_relations: vec![eq([3, 0, 0, 0, 0], 360), eq([0, 3, 0, 0, 0], 360)],
            edge_classes: vec![vec![0, 1, 2, 3, 4]],
            ..Default::default()
        };
        let out = solve_constraints(&cs, &SolveOptions::default()).unwrap();
        let fam = out.family().unwrap();
        assert!(!fam.samples.is_empty());
        for s in &fam.samples {
            assert!((s.angles.0[0] - 120.0).abs() < 1e-9);
            assert!(s.edges.0.iter().all(|&e| (e - 1.0).abs() < 1e-9));
        }
    }
}
