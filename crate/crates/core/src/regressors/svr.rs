//! Epsilon-insensitive support vector regression.
//!
//! The dual is solved in the doubled form used by LIBSVM: variables
//! `a = [α; α*]` with labels `s = [+1; -1]`, minimizing
//! `½ aᵀQa + pᵀa` subject to `sᵀa = 0`, `0 ≤ a ≤ C`, where
//! `Q_tu = s_t s_u K(x_t, x_u)` and `p = [ε - y; ε + y]`. Each SMO step picks
//! the maximal KKT violator `i` and the partner `j` with the largest
//! second-order decrease of the objective, then solves the two-variable
//! subproblem in closed form.

use serde::{Deserialize, Serialize};

use super::{check_query, check_training};
use crate::linalg::{dot, Matrix};
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Linear,
    Poly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gamma {
    /// `1 / (d · Var(X))` over every training feature value.
    Scale,
    Value(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvrConfig {
    pub kernel: KernelKind,
    pub c: f64,
    pub epsilon: f64,
    pub gamma: Gamma,
    pub degree: u32,
    pub coef0: f64,
    /// Stop once the maximal KKT violation pair is within this gap.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SvrConfig {
    fn default() -> Self {
        Self {
            kernel: KernelKind::Poly,
            c: 1.0,
            epsilon: 0.1,
            gamma: Gamma::Scale,
            degree: 3,
            coef0: 0.0,
            tol: 1e-3,
            max_iter: 1_000_000,
        }
    }
}

impl SvrConfig {
    pub fn poly() -> Self {
        Self::default()
    }

    pub fn linear() -> Self {
        Self { kernel: KernelKind::Linear, ..Self::default() }
    }

    pub fn problems(&self) -> Vec<String> {
        let mut p = Vec::new();
        if !(self.c > 0.0 && self.c.is_finite()) {
            p.push(format!("svr C = {} must be positive", self.c));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            p.push(format!("svr epsilon = {} must be non-negative", self.epsilon));
        }
        if let Gamma::Value(g) = self.gamma {
            if !(g > 0.0 && g.is_finite()) {
                p.push(format!("svr gamma = {g} must be positive"));
            }
        }
        if self.degree == 0 {
            p.push("svr degree must be at least 1".into());
        }
        if !self.coef0.is_finite() {
            p.push("svr coef0 must be finite".into());
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            p.push(format!("svr tol = {} must be positive", self.tol));
        }
        if self.max_iter == 0 {
            p.push("svr max_iter must be at least 1".into());
        }
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", bound = "T: Scalar")]
pub enum Kernel<T> {
    Linear,
    Poly { gamma: T, degree: u32, coef0: T },
}

impl<T: Scalar> Kernel<T> {
    pub fn eval(&self, u: &[T], v: &[T]) -> T {
        match *self {
            Kernel::Linear => dot(u, v),
            Kernel::Poly { gamma, degree, coef0 } => (gamma * dot(u, v) + coef0).powi(degree as i32),
        }
    }

    /// Resolves `Gamma::Scale` against the training matrix.
    pub fn from_config(config: &SvrConfig, x: &Matrix<T>) -> Self {
        match config.kernel {
            KernelKind::Linear => Kernel::Linear,
            KernelKind::Poly => {
                let gamma = match config.gamma {
                    Gamma::Value(g) => T::lit(g),
                    Gamma::Scale => {
                        let vals = x.as_slice();
                        let n = T::from_count(vals.len());
                        let m = vals.iter().copied().sum::<T>() / n;
                        let var = vals.iter().map(|&v| (v - m) * (v - m)).sum::<T>() / n;
                        let denom = T::from_count(x.n_cols()) * var;
                        if denom > T::zero() {
                            T::one() / denom
                        } else {
                            T::one()
                        }
                    }
                };
                Kernel::Poly { gamma, degree: config.degree, coef0: T::lit(config.coef0) }
            }
        }
    }
}

pub fn gram_matrix<T: Scalar>(kernel: &Kernel<T>, x: &Matrix<T>) -> Matrix<T> {
    let n = x.n_rows();
    let mut k = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = kernel.eval(x.row(i), x.row(j));
            k.set(i, j, v);
            k.set(j, i, v);
        }
    }
    k
}

/// Result of [`solve_dual`]. `f(x) = Σ (α_i - α*_i) K(x_i, x) + bias`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution<T> {
    pub alpha: Vec<T>,
    pub alpha_star: Vec<T>,
    pub bias: T,
    pub iterations: usize,
    pub converged: bool,
    /// Final maximal violating-pair gap `m(a) - M(a)`.
    pub gap: T,
}

impl<T: Scalar> DualSolution<T> {
    pub fn beta(&self) -> Vec<T> {
        self.alpha.iter().zip(&self.alpha_star).map(|(&a, &s)| a - s).collect()
    }
}

const TAU: f64 = 1e-12;

/// Solves the epsilon-SVR dual for a precomputed Gram matrix.
#[allow(clippy::needless_range_loop)]
pub fn solve_dual<T: Scalar>(gram: &Matrix<T>, y: &[T], c: T, epsilon: T, tol: T, max_iter: usize) -> DualSolution<T> {
    let n = y.len();
    let l = 2 * n;
    let zero = T::zero();
    let two = T::lit(2.0);
    let tau = T::lit(TAU);
    let sign = |t: usize| if t < n { T::one() } else { -T::one() };
    let kern = |t: usize, u: usize| gram.get(t % n, u % n);
    let q = |t: usize, u: usize| sign(t) * sign(u) * kern(t, u);

    let mut a = vec![zero; l];
    let mut g: Vec<T> = (0..l).map(|t| if t < n { epsilon - y[t] } else { epsilon + y[t - n] }).collect();
    let in_up = |a: &[T], t: usize| if t < n { a[t] < c } else { a[t] > zero };
    let in_low = |a: &[T], t: usize| if t < n { a[t] > zero } else { a[t] < c };

    let mut iterations = 0;
    let mut converged = false;
    let mut gap;
    loop {
        // i: maximal violator over I_up of -s_t G_t
        let mut gmax = T::neg_infinity();
        let mut sel_i = None;
        for t in 0..l {
            if in_up(&a, t) && -sign(t) * g[t] >= gmax {
                gmax = -sign(t) * g[t];
                sel_i = Some(t);
            }
        }
        // j: second-order choice over I_low
        let mut gmax2 = T::neg_infinity();
        let mut sel_j = None;
        let mut best_obj = T::infinity();
        if let Some(i) = sel_i {
            for t in 0..l {
                if !in_low(&a, t) {
                    continue;
                }
                let sg = sign(t) * g[t];
                if sg >= gmax2 {
                    gmax2 = sg;
                }
                let grad_diff = gmax + sg;
                if grad_diff > zero {
                    let mut quad = kern(i, i) + kern(t, t) - two * kern(i, t);
                    if quad <= zero {
                        quad = tau;
                    }
                    let obj = -(grad_diff * grad_diff) / quad;
                    if obj <= best_obj {
                        best_obj = obj;
                        sel_j = Some(t);
                    }
                }
            }
        }
        gap = gmax + gmax2;
        let (i, j) = match (sel_i, sel_j) {
            (Some(i), Some(j)) if gap >= tol => (i, j),
            _ => {
                converged = true;
                break;
            }
        };
        if iterations >= max_iter {
            break;
        }
        iterations += 1;

        let (old_i, old_j) = (a[i], a[j]);
        let mut quad = kern(i, i) + kern(j, j) - two * kern(i, j);
        if quad <= zero {
            quad = tau;
        }
        if sign(i) != sign(j) {
            let delta = (-g[i] - g[j]) / quad;
            let diff = a[i] - a[j];
            a[i] = a[i] + delta;
            a[j] = a[j] + delta;
            if diff > zero {
                if a[j] < zero {
                    a[j] = zero;
                    a[i] = diff;
                }
            } else if a[i] < zero {
                a[i] = zero;
                a[j] = -diff;
            }
            if diff > zero {
                if a[i] > c {
                    a[i] = c;
                    a[j] = c - diff;
                }
            } else if a[j] > c {
                a[j] = c;
                a[i] = c + diff;
            }
        } else {
            let delta = (g[i] - g[j]) / quad;
            let sum = a[i] + a[j];
            a[i] = a[i] - delta;
            a[j] = a[j] + delta;
            if sum > c {
                if a[i] > c {
                    a[i] = c;
                    a[j] = sum - c;
                }
            } else if a[j] < zero {
                a[j] = zero;
                a[i] = sum;
            }
            if sum > c {
                if a[j] > c {
                    a[j] = c;
                    a[i] = sum - c;
                }
            } else if a[i] < zero {
                a[i] = zero;
                a[j] = sum;
            }
        }

        let (di, dj) = (a[i] - old_i, a[j] - old_j);
        for (t, gt) in g.iter_mut().enumerate() {
            *gt = *gt + q(t, i) * di + q(t, j) * dj;
        }
    }

    // bias: average over free variables, else midpoint of the feasible interval
    let (mut ub, mut lb) = (T::infinity(), T::neg_infinity());
    let (mut sum_free, mut n_free) = (zero, 0usize);
    for t in 0..l {
        let yg = sign(t) * g[t];
        let at_upper = a[t] >= c;
        let at_lower = a[t] <= zero;
        if at_upper {
            if sign(t) < zero {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if at_lower {
            if sign(t) > zero {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free = sum_free + yg;
        }
    }
    let rho = if n_free > 0 { sum_free / T::from_count(n_free) } else { (ub + lb) / two };

    let mut alpha = a[..n].to_vec();
    let mut alpha_star = a[n..].to_vec();
    // α_i α*_i = 0: remove any common part (β and sᵀa unchanged)
    for (p, m) in alpha.iter_mut().zip(alpha_star.iter_mut()) {
        let common = p.min(*m);
        if common > zero {
            *p = *p - common;
            *m = *m - common;
        }
    }
    DualSolution { alpha, alpha_star, bias: -rho, iterations, converged, gap }
}

/// `½ βᵀKβ + ε Σ(α + α*) - yᵀβ` with `β = α - α*`; SMO minimizes this.
pub fn dual_objective<T: Scalar>(gram: &Matrix<T>, y: &[T], epsilon: T, alpha: &[T], alpha_star: &[T]) -> T {
    let beta: Vec<T> = alpha.iter().zip(alpha_star).map(|(&a, &s)| a - s).collect();
    let mut quad = T::zero();
    for i in 0..beta.len() {
        quad = quad + beta[i] * dot(gram.row(i), &beta);
    }
    T::lit(0.5) * quad + epsilon * alpha.iter().chain(alpha_star).copied().sum::<T>() - dot(y, &beta)
}

/// Per-sample KKT violation of `(α, α*, bias)`; all zero at an exact optimum.
///
/// With residual `r = y - f(x)`: α = 0 needs `r ≤ ε`, 0 < α < C needs
/// `r = ε`, α = C needs `r ≥ ε`; mirrored for α* around `-ε`.
pub fn kkt_violations<T: Scalar>(
    gram: &Matrix<T>,
    y: &[T],
    c: T,
    epsilon: T,
    alpha: &[T],
    alpha_star: &[T],
    bias: T,
) -> Vec<T> {
    let zero = T::zero();
    let beta: Vec<T> = alpha.iter().zip(alpha_star).map(|(&a, &s)| a - s).collect();
    (0..y.len())
        .map(|i| {
            let r = y[i] - dot(gram.row(i), &beta) - bias;
            let upper = if alpha[i] <= zero {
                (r - epsilon).max(zero)
            } else if alpha[i] >= c {
                (epsilon - r).max(zero)
            } else {
                (r - epsilon).abs()
            };
            let lower = if alpha_star[i] <= zero {
                (-epsilon - r).max(zero)
            } else if alpha_star[i] >= c {
                (r + epsilon).max(zero)
            } else {
                (r + epsilon).abs()
            };
            upper.max(lower)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SvrModel<T> {
    pub kernel: Kernel<T>,
    pub support_vectors: Matrix<T>,
    /// `α_i - α*_i` of each retained support vector.
    pub dual_coef: Vec<T>,
    pub bias: T,
    pub iterations: usize,
    pub converged: bool,
    pub kkt_gap: T,
}

pub fn fit_svr<T: Scalar>(x: &Matrix<T>, y: &[T], config: &SvrConfig) -> Result<SvrModel<T>> {
    let problems = config.problems();
    if !problems.is_empty() {
        return Err(Error::InvalidParameter(problems.join("; ")));
    }
    check_training(x, y, 2)?;
    let kernel = Kernel::from_config(config, x);
    let gram = gram_matrix(&kernel, x);
    if let Some(i) = gram.as_slice().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let sol = solve_dual(&gram, y, T::lit(config.c), T::lit(config.epsilon), T::lit(config.tol), config.max_iter);
    let beta = sol.beta();
    let sv: Vec<usize> = (0..beta.len()).filter(|&i| beta[i] != T::zero()).collect();
    Ok(SvrModel {
        kernel,
        support_vectors: x.select_rows(&sv),
        dual_coef: sv.iter().map(|&i| beta[i]).collect(),
        bias: sol.bias,
        iterations: sol.iterations,
        converged: sol.converged,
        kkt_gap: sol.gap,
    })
}

impl<T: Scalar> SvrModel<T> {
    pub fn predict(&self, x: &Matrix<T>) -> Result<Vec<T>> {
        if self.support_vectors.n_rows() > 0 {
            check_query(x, self.support_vectors.n_cols())?;
        } else if x.n_rows() == 0 {
            return Err(Error::TooShort { needed: 1, got: 0 });
        }
        Ok(x
            .rows()
            .map(|q| {
                self.support_vectors
                    .rows()
                    .zip(&self.dual_coef)
                    .fold(self.bias, |acc, (sv, &b)| acc + b * self.kernel.eval(sv, q))
            })
            .collect())
    }
}
