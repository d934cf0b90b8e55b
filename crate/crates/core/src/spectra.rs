//! Laplacians, a Jacobi eigensolver oracle, spectral moments, moment-space
//! distances, and the recursion extending a length-n moment sequence.
//!
//! The eigensolver exists for verification and target construction; the
//! design loop itself never decomposes anything — that is the point of
//! working in moment space.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{Graph, GraphView, NodeSet};
use crate::matrix::DenseSymMatrix;
use crate::num;

/// Off-diagonal threshold for the Jacobi sweep, relative to the Frobenius
/// norm of the input.
const JACOBI_REL_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Floating-point guard for the exact-zero Laplacian eigenvalue: moments
/// this slightly negative are clamped to zero before k-th roots.
const MOMENT_CLAMP: f64 = -1e-9;

/// Power sums beyond this magnitude make Newton's identities unreliable.
const POWER_SUM_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub enum SpectraError {
    NonConvergence { off_diagonal: f64 },
    NegativeMoment { order: usize, value: f64 },
    IllConditioned { order: usize, power_sum: f64 },
    OrderMismatch { left: usize, right: usize },
    OrderTooSmall { have: usize, need: usize },
    IndexOutOfRange { index: usize, dim: usize },
    EmptyMatrix,
}

impl fmt::Display for SpectraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectraError::NonConvergence { off_diagonal } => {
                write!(f, "Jacobi sweep limit reached with off-diagonal {off_diagonal:e}")
            }
            SpectraError::NegativeMoment { order, value } => {
                write!(f, "moment m_{order} = {value} is negative beyond the zero-clamp guard")
            }
            SpectraError::IllConditioned { order, power_sum } => {
                write!(f, "power sum p_{order} = {power_sum:e} exceeds the conditioning limit")
            }
            SpectraError::OrderMismatch { left, right } => {
                write!(f, "moment vectors have different orders {left} and {right}")
            }
            SpectraError::OrderTooSmall { have, need } => {
                write!(f, "need {need} moments but only {have} are available")
            }
            SpectraError::IndexOutOfRange { index, dim } => {
                write!(f, "index {index} out of range for dimension {dim}")
            }
            SpectraError::EmptyMatrix => write!(f, "matrix must have dimension at least 1"),
        }
    }
}

impl core::error::Error for SpectraError {}

/// Sorted (ascending) eigenvalues of a symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    pub fn from_values(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_unstable_by(f64::total_cmp);
        Spectrum { eigenvalues }
    }

    pub fn values(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// Full symmetric eigendecomposition; eigenvector `k` pairs with
/// `values()[k]` and is stored contiguously.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    dim: usize,
    values: Vec<f64>,
    vectors: Vec<f64>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eigenvector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.dim..(k + 1) * self.dim]
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum { eigenvalues: self.values.clone() }
    }
}

/// Combinatorial Laplacian `L = D - A`: degrees on the diagonal, -1 for
/// edges, 0 elsewhere.
pub fn laplacian(g: &Graph) -> DenseSymMatrix {
    let n = g.node_count();
    let mut m = DenseSymMatrix::zeros(n);
    for v in g.node_ids() {
        m.set_sym(v.index(), v.index(), g.degree(v) as f64);
        for &w in g.neighbors(v) {
            if w > v {
                m.set_sym(v.index(), w.index(), -1.0);
            }
        }
    }
    m
}

/// The principal submatrix of the global Laplacian on `s`, built from
/// adjacency reads of the members only. The diagonal carries *global*
/// degrees, which is what distinguishes this from the Laplacian of the
/// induced subgraph.
pub fn local_laplacian<V: GraphView>(g: &V, s: &NodeSet) -> DenseSymMatrix {
    let k = s.len();
    let mut m = DenseSymMatrix::zeros(k);
    for (p, v) in s.iter().enumerate() {
        m.set_sym(p, p, g.degree(v) as f64);
        for &w in g.neighbors(v) {
            if let Some(q) = s.position(w) {
                if q > p {
                    m.set_sym(p, q, -1.0);
                }
            }
        }
    }
    m
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn sym_eig(m: &DenseSymMatrix) -> Result<Spectrum, SpectraError> {
    sym_eig_full(m).map(|d| Spectrum { eigenvalues: d.values })
}

/// Eigenvalues and eigenvectors by cyclic Jacobi rotations. Sweeps run until
/// every off-diagonal magnitude drops below `1e-12` times the Frobenius norm
/// of the input, failing after 100 sweeps.
pub fn sym_eig_full(m: &DenseSymMatrix) -> Result<EigenDecomposition, SpectraError> {
    let n = m.dim();
    if n == 0 {
        return Err(SpectraError::EmptyMatrix);
    }
    let mut a: Vec<f64> = m.as_slice().to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let thresh = JACOBI_REL_TOL * m.frobenius_norm();
    let mut converged = thresh == 0.0 || n == 1;
    let mut sweeps = 0;
    while !converged && sweeps < JACOBI_MAX_SWEEPS {
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if num::abs(apq) <= thresh {
                    continue;
                }
                rotated = true;
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + num::sqrt(1.0 + tau * tau))
                } else {
                    1.0 / (tau - num::sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / num::sqrt(1.0 + t * t);
                let s = t * c;
                for i in 0..n {
                    if i != p && i != q {
                        let aip = a[i * n + p];
                        let aiq = a[i * n + q];
                        let new_p = c * aip - s * aiq;
                        let new_q = s * aip + c * aiq;
                        a[i * n + p] = new_p;
                        a[p * n + i] = new_p;
                        a[i * n + q] = new_q;
                        a[q * n + i] = new_q;
                    }
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for i in 0..n {
                    let vip = v[i * n + p];
                    let viq = v[i * n + q];
                    v[i * n + p] = c * vip - s * viq;
                    v[i * n + q] = s * vip + c * viq;
                }
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        let mut worst = 0.0f64;
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    worst = worst.max(num::abs(a[p * n + q]));
                }
            }
        }
        return Err(SpectraError::NonConvergence { off_diagonal: worst });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let values: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let mut vectors = Vec::with_capacity(n * n);
    for &col in &order {
        for row in 0..n {
            vectors.push(v[row * n + col]);
        }
    }
    Ok(EigenDecomposition { dim: n, values, vectors })
}

/// Sequence of Laplacian spectral moments `m_1 .. m_K`, where
/// `m_k = (1/n) * sum(lambda_i^k)`; `m_0 = 1` is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    m: Vec<f64>,
}

impl MomentVector {
    pub fn new(m: Vec<f64>) -> Self {
        MomentVector { m }
    }

    /// Number of moments carried (the order `K`).
    pub fn order(&self) -> usize {
        self.m.len()
    }

    /// `m_k`, 1-based.
    pub fn moment(&self, k: usize) -> f64 {
        self.m[k - 1]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.m
    }

    /// Componentwise sum with a delta of the same length prefix.
    pub fn plus(&self, delta: &[f64]) -> MomentVector {
        debug_assert!(delta.len() <= self.m.len());
        let mut out = self.m.clone();
        for (o, d) in out.iter_mut().zip(delta) {
            *o += d;
        }
        MomentVector { m: out }
    }

    pub fn truncated(&self, k: usize) -> MomentVector {
        MomentVector { m: self.m[..k.min(self.m.len())].to_vec() }
    }
}

/// `m_k = (1/n) * sum(lambda_i^k)` for `k = 1..=order`.
pub fn moments_from_spectrum(s: &Spectrum, order: usize) -> MomentVector {
    let n = s.len() as f64;
    let mut m = Vec::with_capacity(order);
    let mut powers: Vec<f64> = vec![1.0; s.len()];
    for _ in 1..=order {
        let mut sum = 0.0;
        for (p, &lambda) in powers.iter_mut().zip(s.values()) {
            *p *= lambda;
            sum += *p;
        }
        m.push(sum / n);
    }
    MomentVector { m }
}

/// `m_k = Trace(M^k) / dim` for `k = 1..=order`, by iterated products.
pub fn moments_via_trace(m: &DenseSymMatrix, order: usize) -> MomentVector {
    let n = m.dim() as f64;
    let traces = m.power_traces(order);
    MomentVector { m: traces.into_iter().map(|t| t / n).collect() }
}

fn root_term(value: f64, k: usize) -> Result<f64, SpectraError> {
    if value < MOMENT_CLAMP {
        return Err(SpectraError::NegativeMoment { order: k, value });
    }
    let clamped = value.max(0.0);
    if clamped == 0.0 {
        Ok(0.0)
    } else {
        Ok(num::powf(clamped, 1.0 / k as f64))
    }
}

/// Spectral pseudometric `d_K`: the sum over `k <= K` of squared
/// differences of `m_k^(1/k)`. Zero distance does not imply equal graphs.
pub fn spectral_pseudodistance(
    a: &MomentVector,
    b: &MomentVector,
    order: usize,
) -> Result<f64, SpectraError> {
    if a.order() < order {
        return Err(SpectraError::OrderTooSmall { have: a.order(), need: order });
    }
    if b.order() < order {
        return Err(SpectraError::OrderTooSmall { have: b.order(), need: order });
    }
    let mut sum = 0.0;
    for k in 1..=order {
        let d = root_term(a.moment(k), k)? - root_term(b.moment(k), k)?;
        sum += d * d;
    }
    Ok(sum)
}

/// Full spectral distance `d_M`, requiring both vectors to carry the same
/// (complete, `K = n-1`) order.
pub fn spectral_distance_full(a: &MomentVector, b: &MomentVector) -> Result<f64, SpectraError> {
    if a.order() != b.order() {
        return Err(SpectraError::OrderMismatch { left: a.order(), right: b.order() });
    }
    spectral_pseudodistance(a, b, a.order())
}

/// Recovers the monic characteristic polynomial coefficients
/// `alpha_0 .. alpha_{n-1}` (of `lambda^n + alpha_{n-1} lambda^{n-1} + ...`)
/// from the power sums `p_k = n * m_k` via Newton's identities. Requires
/// the full first `n` moments of an `n x n` symmetric matrix.
pub fn char_poly_from_moments(m: &MomentVector) -> Result<Vec<f64>, SpectraError> {
    let n = m.order();
    let nf = n as f64;
    let mut p = Vec::with_capacity(n + 1);
    p.push(nf); // p_0 = n
    for k in 1..=n {
        let pk = nf * m.moment(k);
        if num::abs(pk) > POWER_SUM_LIMIT {
            return Err(SpectraError::IllConditioned { order: k, power_sum: pk });
        }
        p.push(pk);
    }
    // e_k = (1/k) * sum_{i=1..k} (-1)^(i-1) e_{k-i} p_i, with e_0 = 1.
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for k in 1..=n {
        let mut acc = 0.0;
        let mut sign = 1.0;
        for i in 1..=k {
            acc += sign * e[k - i] * p[i];
            sign = -sign;
        }
        e[k] = acc / k as f64;
    }
    // alpha_{n-k} = (-1)^k e_k
    let mut alpha = vec![0.0; n];
    let mut sign = -1.0;
    for k in 1..=n {
        alpha[n - k] = sign * e[k];
        sign = -sign;
    }
    Ok(alpha)
}

/// Extends a complete moment sequence (`K = n`) out to order `horizon`
/// using the linear recursion induced by the characteristic polynomial:
/// the first `n` entries are returned unchanged.
pub fn extend_moments(m: &MomentVector, horizon: usize) -> Result<MomentVector, SpectraError> {
    let n = m.order();
    if horizon <= n {
        return Ok(m.truncated(horizon));
    }
    let alpha = char_poly_from_moments(m)?;
    // seq[t] = m_t, with the implicit m_0 = 1 at t = 0.
    let mut seq = Vec::with_capacity(horizon + 1);
    seq.push(1.0);
    seq.extend_from_slice(m.as_slice());
    for t in n + 1..=horizon {
        let mut next = 0.0;
        for (j, &aj) in alpha.iter().enumerate() {
            next -= aj * seq[t - n + j];
        }
        seq.push(next);
    }
    Ok(MomentVector { m: seq[1..].to_vec() })
}

/// A design goal: either a desired eigenvalue list or a direct moment
/// sequence, normalized to moments once on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralTarget {
    moments: MomentVector,
}

impl SpectralTarget {
    pub fn from_moments(moments: MomentVector) -> Self {
        SpectralTarget { moments }
    }

    /// Derives the first `order` moments from a complete eigenvalue list.
    pub fn from_eigenvalues(eigenvalues: &[f64], order: usize) -> Self {
        let s = Spectrum::from_values(eigenvalues.to_vec());
        SpectralTarget { moments: moments_from_spectrum(&s, order) }
    }

    /// Moments of an existing graph's Laplacian.
    pub fn from_graph(g: &Graph, order: usize) -> Self {
        SpectralTarget { moments: moments_via_trace(&laplacian(g), order) }
    }

    pub fn moments(&self) -> &MomentVector {
        &self.moments
    }
}
