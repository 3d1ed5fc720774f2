//! One-dimensional Legendre basis and Gauss-Legendre quadrature.
//!
//! Element operators are tensor products of the tables built here: the basis
//! function with index `(i, j)` is `P_i(xi) P_j(eta)` and is stored at flat
//! index `i + (q + 1) j`.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Values `P_0..=P_q` and derivatives at `x`, by the three-term recurrence.
pub fn legendre_eval<T: Real>(q: usize, x: T) -> Result<(Vec<T>, Vec<T>)> {
    if !(x.abs() <= T::one() + T::lit(1e-12)) {
        return Err(Error::Domain(format!("Legendre argument {x} outside [-1, 1]")));
    }
    Ok(legendre_unchecked(q, x))
}

pub(crate) fn legendre_unchecked<T: Real>(q: usize, x: T) -> (Vec<T>, Vec<T>) {
    let mut p = vec![T::zero(); q + 1];
    let mut dp = vec![T::zero(); q + 1];
    p[0] = T::one();
    if q >= 1 {
        p[1] = x;
        dp[1] = T::one();
    }
    for n in 1..q {
        let nf = T::from_usize_lossy(n);
        let two_n1 = T::from_usize_lossy(2 * n + 1);
        p[n + 1] = (two_n1 * x * p[n] - nf * p[n - 1]) / (nf + T::one());
        dp[n + 1] = dp[n - 1] + two_n1 * p[n];
    }
    (p, dp)
}

/// `||P_n||^2` on [-1, 1].
pub fn legendre_norm_sq<T: Real>(n: usize) -> T {
    T::lit(2.0) / T::from_usize_lossy(2 * n + 1)
}

/// Gauss-Legendre rule on [-1, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct QuadRule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> QuadRule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(T) -> T) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// `n`-point Gauss-Legendre rule; nodes ascending, exact to degree `2n - 1`.
pub fn gauss_rule<T: Real>(n: usize) -> Result<QuadRule<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("Gauss rule needs at least one point".into()));
    }
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let half = n.div_ceil(2);
    for i in 0..half {
        // Tricomi-style initial guess, refined by Newton on P_n.
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut x = T::lit(guess);
        let mut dpn = T::one();
        for _ in 0..100 {
            let (p, dp) = legendre_unchecked(n, x);
            dpn = dp[n];
            let dx = p[n] / dpn;
            x -= dx;
            if dx.abs() <= T::epsilon() * T::lit(4.0) {
                let (_, dp) = legendre_unchecked(n, x);
                dpn = dp[n];
                break;
            }
        }
        let w = T::lit(2.0) / ((T::one() - x * x) * dpn * dpn);
        // x_i is the i-th largest root
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = T::zero();
    }
    Ok(QuadRule { nodes, weights })
}

/// Legendre values and derivatives tabulated at the nodes of a rule.
#[derive(Clone, Debug)]
pub struct PolyBasis<T> {
    pub degree: usize,
    /// `eval_table[k][i] = P_i(x_k)`
    pub eval_table: Vec<Vec<T>>,
    /// `deriv_table[k][i] = P_i'(x_k)`
    pub deriv_table: Vec<Vec<T>>,
}

impl<T: Real> PolyBasis<T> {
    pub fn new(degree: usize, points: &[T]) -> Self {
        let (eval_table, deriv_table) = points
            .iter()
            .map(|&x| legendre_unchecked(degree, x))
            .unzip();
        Self {
            degree,
            eval_table,
            deriv_table,
        }
    }

    pub fn size(&self) -> usize {
        self.degree + 1
    }

    /// Number of tensor-product modes `(q + 1)^2`.
    pub fn tensor_size(&self) -> usize {
        (self.degree + 1) * (self.degree + 1)
    }

    /// Applies the differentiation table to modal coefficients of a 1D
    /// polynomial, returning its derivative at the tabulation points.
    pub fn differentiate(&self, coeffs: &[T]) -> Vec<T> {
        self.deriv_table
            .iter()
            .map(|row| row.iter().zip(coeffs).map(|(&a, &b)| a * b).sum())
            .collect()
    }
}

/// Tensor-product mode values and reference derivatives at `(xi, eta)`.
///
/// Returns `(phi, dphi_dxi, dphi_deta)` with the flat indexing described in
/// the module docs.
pub fn tensor_eval<T: Real>(q: usize, xi: T, eta: T) -> (Vec<T>, Vec<T>, Vec<T>) {
    let (px, dpx) = legendre_unchecked(q, xi);
    let (py, dpy) = legendre_unchecked(q, eta);
    let n = q + 1;
    let mut phi = vec![T::zero(); n * n];
    let mut dxi = vec![T::zero(); n * n];
    let mut deta = vec![T::zero(); n * n];
    for j in 0..n {
        for i in 0..n {
            let k = i + n * j;
            phi[k] = px[i] * py[j];
            dxi[k] = dpx[i] * py[j];
            deta[k] = px[i] * dpy[j];
        }
    }
    (phi, dxi, deta)
}
