//! Exact rational linear algebra for angle systems: affine solution
//! spaces, Fourier-Motzkin feasibility with Farkas-style certificates, and
//! vertex enumeration of small polytopes.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `{ point + basis * t }`.
#[derive(Debug, Clone)]
pub struct AffineSpace {
    pub point: Vec<Q>,
    pub basis: Vec<Vec<Q>>,
}

impl AffineSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn eval(&self, t: &[Q]) -> Vec<Q> {
        let mut x = self.point.clone();
        for (b, ti) in self.basis.iter().zip(t) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += bi * ti;
            }
        }
        x
    }

    pub fn eval_f64(&self, t: &[f64]) -> Vec<f64> {
        let mut x: Vec<f64> = self.point.iter().map(q_to_f64).collect();
        for (b, ti) in self.basis.iter().zip(t) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += q_to_f64(bi) * ti;
            }
        }
        x
    }
}

#[derive(Debug, Clone)]
pub enum AffineSolve {
    Solved(AffineSpace),
    /// Multipliers `mu` with `sum mu_j * row_j = 0` and `sum mu_j * rhs_j != 0`.
    Inconsistent(Vec<Q>),
}

/// Solve `rows * x = rhs` exactly.
pub fn solve_affine(rows: &[Vec<Q>], rhs: &[Q], n: usize) -> AffineSolve {
    let m = rows.len();
    // augmented [A | b | I]
    let mut aug: Vec<Vec<Q>> = rows
        .iter()
        .zip(rhs)
        .enumerate()
        .map(|(i, (r, b))| {
            let mut row = r.clone();
            row.push(b.clone());
            row.extend((0..m).map(|j| if i == j { Q::one() } else { Q::zero() }));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m).find(|&i| !aug[i][c].is_zero()) else {
            continue;
        };
        aug.swap(r, p);
        let inv = aug[r][c].recip();
        for v in aug[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..m {
            if i != r && !aug[i][c].is_zero() {
                let f = aug[i][c].clone();
                let pivot_row = aug[r].clone();
                for (v, pv) in aug[i].iter_mut().zip(pivot_row) {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m {
            break;
        }
    }
    for row in aug.iter().skip(r) {
        if !row[n].is_zero() {
            return AffineSolve::Inconsistent(row[n + 1..].to_vec());
        }
    }
    let mut point = vec![Q::zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        point[c] = aug[i][n].clone();
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let basis = free
        .iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); n];
            v[f] = Q::one();
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = -aug[i][f].clone();
            }
            v
        })
        .collect();
    AffineSolve::Solved(AffineSpace { point, basis })
}

/// `coef . t + constant > 0` (or `>= 0` when not strict), tagged with the
/// nonnegative combination of source inequalities it was derived from.
#[derive(Debug, Clone, PartialEq)]
pub struct Ineq {
    pub coef: Vec<Q>,
    pub constant: Q,
    pub strict: bool,
    pub origin: Vec<Q>,
}

impl Ineq {
    fn normalized(mut self) -> Ineq {
        if let Some(lead) = self.coef.iter().find(|c| !c.is_zero()).map(|c| c.abs()) {
            let inv = lead.recip();
            for c in self.coef.iter_mut() {
                *c *= &inv;
            }
            self.constant *= &inv;
            for o in self.origin.iter_mut() {
                *o *= &inv;
            }
        }
        self
    }

    fn is_contradiction(&self) -> bool {
        self.coef.iter().all(Zero::is_zero)
            && (self.constant.is_negative() || (self.strict && self.constant.is_zero()))
    }
}

/// Decide feasibility of a system of linear inequalities in `dims`
/// variables. On infeasibility returns the multipliers over the input
/// inequalities that combine to a contradiction.
pub fn fourier_motzkin(mut ineqs: Vec<Ineq>, dims: usize) -> Result<(), Vec<Q>> {
    for k in 0..dims {
        if let Some(bad) = ineqs.iter().find(|i| i.is_contradiction()) {
            return Err(bad.origin.clone());
        }
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for i in ineqs {
            if i.coef[k].is_positive() {
                pos.push(i);
            } else if i.coef[k].is_negative() {
                neg.push(i);
            } else {
                rest.push(i);
            }
        }
        for p in &pos {
            for n in &neg {
                let wp = -n.coef[k].clone();
                let wn = p.coef[k].clone();
                let comb = Ineq {
                    coef: p
                        .coef
                        .iter()
                        .zip(&n.coef)
                        .map(|(a, b)| &wp * a + &wn * b)
                        .collect(),
                    constant: &wp * &p.constant + &wn * &n.constant,
                    strict: p.strict || n.strict,
                    origin: p
                        .origin
                        .iter()
                        .zip(&n.origin)
                        .map(|(a, b)| &wp * a + &wn * b)
                        .collect(),
                };
                rest.push(comb.normalized());
            }
        }
        // drop tautologies and duplicates
        let mut next: Vec<Ineq> = Vec::with_capacity(rest.len());
        for i in rest {
            if i.coef.iter().all(Zero::is_zero) && !i.is_contradiction() {
                continue;
            }
            if !next
                .iter()
                .any(|j| j.coef == i.coef && j.constant == i.constant && j.strict == i.strict)
            {
                next.push(i);
            }
        }
        ineqs = next;
    }
    match ineqs.into_iter().find(|i| i.is_contradiction()) {
        Some(bad) => Err(bad.origin),
        None => Ok(()),
    }
}

/// Vertices of `{ t : coef_i . t + constant_i >= 0 }` (non-strict reading),
/// assumed bounded. Exact.
pub fn polytope_vertices(ineqs: &[Ineq], dims: usize) -> Vec<Vec<Q>> {
    let mut out: Vec<Vec<Q>> = Vec::new();
    if dims == 0 {
        return vec![Vec::new()];
    }
    let m = ineqs.len();
    let mut idx: Vec<usize> = (0..dims).collect();
    loop {
        let rows: Vec<Vec<Q>> = idx.iter().map(|&i| ineqs[i].coef.clone()).collect();
        let rhs: Vec<Q> = idx.iter().map(|&i| -ineqs[i].constant.clone()).collect();
        if let AffineSolve::Solved(sp) = solve_affine(&rows, &rhs, dims) {
            if sp.dim() == 0 {
                let v = sp.point;
                let inside = ineqs.iter().all(|i| {
                    let val: Q = i.coef.iter().zip(&v).map(|(a, b)| a * b).sum::<Q>() + &i.constant;
                    !val.is_negative()
                });
                if inside && !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        // next combination
        let mut k = dims;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if idx[k] < m - dims + k {
                idx[k] += 1;
                for j in k + 1..dims {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}
