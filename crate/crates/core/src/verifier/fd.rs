//! Finite-element discretisation of the Rayleigh quotient
//! `(∫u'² + β_l u(a)² + β_r u(b)²) / ∫m u²` on a uniform mesh.
//!
//! The stiffness matrix is the usual second-order difference stencil with
//! the Robin terms added to the corner entries; the weighted mass matrix is
//! integrated exactly against the hat functions, cutting elements at the
//! weight's jumps. The principal eigenvalue of the tridiagonal pencil is
//! located by Sylvester inertia counts and polished by shifted inverse
//! iteration.

use crate::error::{Error, Result};
use crate::sl::RobinProblem1D;

const MAX_INVERSE_ITERATIONS: usize = 200;

/// Symmetric tridiagonal matrix stored as diagonal and off-diagonal.
struct Tridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl Tridiagonal {
    fn shifted(k: &Tridiagonal, m: &Tridiagonal, sigma: f64) -> Tridiagonal {
        Tridiagonal {
            diag: k.diag.iter().zip(&m.diag).map(|(a, b)| a - sigma * b).collect(),
            off: k.off.iter().zip(&m.off).map(|(a, b)| a - sigma * b).collect(),
        }
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Pivots of `LDLᵀ`, with exact zeros nudged off zero.
    fn pivots(&self) -> Vec<f64> {
        let mut d = Vec::with_capacity(self.diag.len());
        for i in 0..self.diag.len() {
            let mut p = self.diag[i];
            if i > 0 {
                p -= self.off[i - 1] * self.off[i - 1] / d[i - 1];
            }
            if p == 0.0 {
                p = f64::EPSILON * (self.diag[i].abs() + 1e-300);
            }
            d.push(p);
        }
        d
    }

    fn negative_count(&self) -> usize {
        self.pivots().iter().filter(|&&p| p < 0.0).count()
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let d = self.pivots();
        let n = d.len();
        let mut y = rhs.to_vec();
        for i in 1..n {
            y[i] -= self.off[i - 1] / d[i - 1] * y[i - 1];
        }
        for i in (0..n).rev() {
            y[i] /= d[i];
            if i + 1 < n {
                y[i] -= self.off[i] / d[i] * y[i + 1];
            }
        }
        y
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `∫ φ_L², ∫ φ_L φ_R, ∫ φ_R²` over local coordinates `[s0, s1] ⊂ [0, 1]`,
/// with `φ_L = 1 − s`, `φ_R = s`.
fn hat_products(s0: f64, s1: f64) -> [f64; 3] {
    let cube = |s: f64| s * s * s;
    let ll = (cube(1.0 - s0) - cube(1.0 - s1)) / 3.0;
    let rr = (cube(s1) - cube(s0)) / 3.0;
    let lr = (s1 * s1 - s0 * s0) / 2.0 - rr;
    [ll, lr, rr]
}

fn assemble(problem: &RobinProblem1D, elements: usize) -> (Tridiagonal, Tridiagonal) {
    let domain = problem.domain();
    let (a, len) = (domain.a(), domain.length());
    let h = len / elements as f64;
    let nodes = elements + 1;
    let mut k = Tridiagonal { diag: vec![0.0; nodes], off: vec![0.0; elements] };
    let mut m = Tridiagonal { diag: vec![0.0; nodes], off: vec![0.0; elements] };
    for e in 0..elements {
        k.diag[e] += 1.0 / h;
        k.diag[e + 1] += 1.0 / h;
        k.off[e] -= 1.0 / h;
    }
    k.diag[0] += problem.beta_left();
    k.diag[elements] += problem.beta_right();

    for p in problem.weight().pieces() {
        let (lo, hi) = ((p.start - a) / h, (p.end - a) / h);
        let first = (lo.floor().max(0.0) as usize).min(elements - 1);
        let last = (hi.ceil() as usize).clamp(first + 1, elements);
        for e in first..last {
            let s0 = (lo - e as f64).clamp(0.0, 1.0);
            let s1 = (hi - e as f64).clamp(0.0, 1.0);
            if s1 > s0 {
                let [ll, lr, rr] = hat_products(s0, s1);
                m.diag[e] += p.value * h * ll;
                m.off[e] += p.value * h * lr;
                m.diag[e + 1] += p.value * h * rr;
            }
        }
    }
    (k, m)
}

/// Principal eigenvalue of the discrete pencil with `elements` cells.
pub fn fd_eigenvalue_single(problem: &RobinProblem1D, elements: usize) -> Result<f64> {
    let (k, m) = assemble(problem, elements);
    let count = |sigma: f64| Tridiagonal::shifted(&k, &m, sigma).negative_count();

    // eigenvalues in (0, σ) are counted by the inertia of K − σM; a zero
    // eigenvalue (constant mode with positive weighted norm) is discounted
    let base = count(f64::MIN_POSITIVE.sqrt());
    let mut hi = 1.0;
    while count(hi) <= base {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::NoPositiveEigenpair);
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-10 * hi {
        let mid = 0.5 * (lo + hi);
        if count(mid) > base {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    let shift = Tridiagonal::shifted(&k, &m, lo);
    let mut x = vec![1.0; k.diag.len()];
    let mut lambda = 0.5 * (lo + hi);
    for iteration in 0..MAX_INVERSE_ITERATIONS {
        let mut y = shift.solve(&m.apply(&x));
        let norm = y.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::IterationDivergence { iterations: iteration });
        }
        y.iter_mut().for_each(|v| *v /= norm);
        x = y;
        let mass = dot(&x, &m.apply(&x));
        let next = dot(&x, &k.apply(&x)) / mass;
        let done = (next - lambda).abs() <= 1e-12 * next.abs();
        lambda = next;
        if done && iteration > 0 {
            let sign = x.iter().map(|v| v.signum()).sum::<f64>().signum();
            let positive = x.iter().all(|v| v * sign > -1e-12);
            if !positive || mass <= 0.0 || lambda <= 0.0 {
                return Err(Error::NoPositiveEigenpair);
            }
            return Ok(lambda);
        }
    }
    Err(Error::IterationDivergence { iterations: MAX_INVERSE_ITERATIONS })
}

/// Principal eigenvalue from meshes with `nodes − 1` and `2(nodes − 1)`
/// cells, Richardson-extrapolated for the second-order error.
pub fn fd_eigenvalue(problem: &RobinProblem1D, nodes: usize) -> Result<f64> {
    if nodes < 100 {
        return Err(Error::InvalidParams(format!("at least 100 nodes required, got {nodes}")));
    }
    let coarse = fd_eigenvalue_single(problem, nodes - 1)?;
    let fine = fd_eigenvalue_single(problem, 2 * (nodes - 1))?;
    Ok((4.0 * fine - coarse) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl::principal_eigenvalue;
    use crate::weights::{BangBangWeight, IntervalDomain};

    fn problem(a: f64, b: f64, kappa: f64, s: f64, e: f64, beta: f64) -> RobinProblem1D {
        let w = BangBangWeight::single(IntervalDomain::new(a, b).unwrap(), kappa, s, e).unwrap();
        RobinProblem1D::symmetric(w, beta).unwrap()
    }

    #[test]
    fn hat_products_cover_the_element() {
        let [ll, lr, rr] = hat_products(0.0, 1.0);
        assert!((ll - 1.0 / 3.0).abs() < 1e-15 && (lr - 1.0 / 6.0).abs() < 1e-15 && (rr - 1.0 / 3.0).abs() < 1e-15);
        let [a, b, c] = hat_products(0.0, 0.4);
        let [d, e, f] = hat_products(0.4, 1.0);
        assert!((a + d - ll).abs() < 1e-15 && (b + e - lr).abs() < 1e-15 && (c + f - rr).abs() < 1e-15);
    }

    #[test]
    fn assembled_mass_integrates_the_weight() {
        // Σ M_ij over all i, j is ∫ m
        let p = problem(0.0, 1.3, 2.5, 0.217, 0.5803, 1.0);
        let (_, m) = assemble(&p, 97);
        let total: f64 = m.diag.iter().sum::<f64>() + 2.0 * m.off.iter().sum::<f64>();
        let exact = 2.5 * (0.5803 - 0.217) - (1.3 - (0.5803 - 0.217));
        assert!((total - exact).abs() < 1e-13);
    }

    #[test]
    fn matches_transfer_matrix_solver() {
        let p = problem(0.0, 1.0, 1.0, 0.35, 0.65, 1.0);
        let exact = principal_eigenvalue(&p).unwrap().lambda;
        let fd = fd_eigenvalue(&p, 20_000).unwrap();
        assert!((fd - exact).abs() <= 1e-6 * exact, "{fd} vs {exact}");
    }

    #[test]
    fn second_order_convergence() {
        let p = problem(0.0, 1.0, 2.0, 0.3, 0.55, 3.0);
        let exact = principal_eigenvalue(&p).unwrap().lambda;
        let e1 = (fd_eigenvalue_single(&p, 200).unwrap() - exact).abs();
        let e2 = (fd_eigenvalue_single(&p, 400).unwrap() - exact).abs();
        let ratio = e1 / e2;
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn neumann_skips_constant_mode() {
        let p = problem(0.0, 1.0, 1.0, 0.0, 0.25, 0.0);
        let fd = fd_eigenvalue(&p, 4000).unwrap();
        assert!(fd > 1.0);
        assert!((fd - 9.632025984136).abs() < 1e-6);
    }

    #[test]
    fn rejects_coarse_mesh() {
        assert!(fd_eigenvalue(&problem(0.0, 1.0, 1.0, 0.2, 0.4, 1.0), 50).is_err());
    }
}
