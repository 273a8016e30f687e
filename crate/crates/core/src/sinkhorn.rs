//! Entropically regularized optimal transport between empirical measures.
//!
//! The solver keeps dual potentials `f`, `g` in the log domain and runs the
//! inner scaling iterations on the stabilized kernel
//! `K_ij = exp((f_i + g_j - C_ij) / eps)`. Whenever the scalings drift out of
//! `[1/ABSORB, ABSORB]` they are folded back into the potentials and the kernel
//! is rebuilt. In exact arithmetic the iterates are those of the plain
//! log-domain updates
//!
//! ```text
//! f_i <- eps * ln a_i - eps * ln sum_j exp((g_j - C_ij) / eps)
//! g_j <- eps * ln b_j - eps * ln sum_i exp((f_i - C_ij) / eps)
//! ```
//!
//! but each inner step is a pair of matrix-vector products instead of
//! `2 * n * m` exponentials.

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};

const ABSORB: f64 = 1e3;

/// Cost matrix with source and target marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportProblem {
    cost: Array2<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl TransportProblem {
    pub fn new(cost: Array2<f64>, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let (n, m) = cost.dim();
        if n == 0 || m == 0 {
            return Err(Error::InvalidTransportProblem("empty cost matrix".into()));
        }
        if a.len() != n || b.len() != m {
            return Err(Error::InvalidTransportProblem(format!(
                "cost is {n}x{m} but marginals have lengths {} and {}",
                a.len(),
                b.len()
            )));
        }
        if cost.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::InvalidTransportProblem(
                "cost entries must be finite and non-negative".into(),
            ));
        }
        for (name, w) in [("a", &a), ("b", &b)] {
            if w.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                return Err(Error::InvalidTransportProblem(format!(
                    "marginal {name} must be strictly positive"
                )));
            }
            let total: f64 = w.iter().sum();
            let slack = 1e-12_f64.max(w.len() as f64 * f64::EPSILON);
            if (total - 1.0).abs() > slack {
                return Err(Error::InvalidTransportProblem(format!(
                    "marginal {name} sums to {total}"
                )));
            }
        }
        Ok(Self { cost, a, b })
    }

    /// Uniform marginals over the rows and columns of `cost`.
    pub fn uniform(cost: Array2<f64>) -> Result<Self> {
        let (n, m) = cost.dim();
        let a = vec![1.0 / n as f64; n];
        let b = vec![1.0 / m as f64; m];
        Self::new(cost, a, b)
    }

    pub fn cost(&self) -> &Array2<f64> {
        &self.cost
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Same problem with source and target swapped.
    pub fn transposed(&self) -> Self {
        Self {
            cost: self.cost.t().to_owned(),
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }

    pub fn mean_cost(&self) -> f64 {
        self.cost.mean().unwrap_or(0.0)
    }
}

/// Regularization strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Epsilon {
    /// In cost units.
    Absolute(f64),
    /// Multiple of the mean entry of the cost matrix being solved.
    RelativeToMeanCost(f64),
}

impl Epsilon {
    /// Resolves to cost units. A zero-mean cost (every entry 0) falls back to
    /// the bare factor, since any plan is then optimal.
    pub fn resolve(self, tp: &TransportProblem) -> f64 {
        match self {
            Epsilon::Absolute(e) => e,
            Epsilon::RelativeToMeanCost(r) => {
                let mean = tp.mean_cost();
                if mean > 0.0 {
                    r * mean
                } else {
                    r
                }
            }
        }
    }

    fn value(self) -> f64 {
        match self {
            Epsilon::Absolute(e) | Epsilon::RelativeToMeanCost(e) => e,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinkhornConfig {
    pub epsilon: Epsilon,
    pub max_iters: usize,
    /// Stop when the L1 violation of each marginal is at most this.
    pub tol: f64,
}

impl Default for SinkhornConfig {
    fn default() -> Self {
        Self {
            epsilon: Epsilon::RelativeToMeanCost(0.05),
            max_iters: 10_000,
            tol: 1e-6,
        }
    }
}

impl SinkhornConfig {
    pub fn relative(factor: f64) -> Self {
        Self {
            epsilon: Epsilon::RelativeToMeanCost(factor),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let e = self.epsilon.value();
        if !(e.is_finite() && e > 0.0) {
            return Err(Error::InvalidSinkhornConfig(format!(
                "epsilon must be positive, got {e}"
            )));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidSinkhornConfig(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidSinkhornConfig("max_iters must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SinkhornResult {
    pub plan: Array2<f64>,
    /// `<plan, cost>` without the entropy term.
    pub sharp_cost: f64,
    pub iterations: usize,
    /// Larger of the two L1 marginal violations of `plan`.
    pub marginal_error: f64,
    pub converged: bool,
    /// Regularization actually used, in cost units.
    pub epsilon: f64,
}

/// Pairwise Euclidean distances between the rows of `x` and `y`.
pub fn cost_matrix(x: ArrayView2<f64>, y: ArrayView2<f64>) -> Result<Array2<f64>> {
    if x.ncols() != y.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "cost matrix between {}-column and {}-column samples",
            x.ncols(),
            y.ncols()
        )));
    }
    let mut c = Array2::zeros((x.nrows(), y.nrows()));
    for (i, xi) in x.rows().into_iter().enumerate() {
        for (j, yj) in y.rows().into_iter().enumerate() {
            let sq: f64 = xi.iter().zip(yj.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
            c[[i, j]] = sq.sqrt();
        }
    }
    Ok(c)
}

struct Workspace<'a> {
    cost: &'a [f64],
    n: usize,
    m: usize,
    eps: f64,
    a: &'a [f64],
    b: &'a [f64],
    f: Vec<f64>,
    g: Vec<f64>,
    kernel: Vec<f64>,
    u: Vec<f64>,
    v: Vec<f64>,
    kv: Vec<f64>,
    ktu: Vec<f64>,
}

impl Workspace<'_> {
    /// One exact log-domain update of `f` followed by one of `g`.
    fn log_domain_step(&mut self) {
        let (n, m, eps) = (self.n, self.m, self.eps);
        let mut buf = vec![0.0; n.max(m)];
        for i in 0..n {
            let row = &self.cost[i * m..(i + 1) * m];
            for ((b, gj), cij) in buf.iter_mut().zip(&self.g).zip(row) {
                *b = (gj - cij) / eps;
            }
            self.f[i] = eps * self.a[i].ln() - eps * log_sum_exp(&buf[..m]);
        }
        for j in 0..m {
            for (i, (b, fi)) in buf.iter_mut().zip(&self.f).enumerate() {
                *b = (fi - self.cost[i * m + j]) / eps;
            }
            self.g[j] = eps * self.b[j].ln() - eps * log_sum_exp(&buf[..n]);
        }
    }

    fn rebuild_kernel(&mut self) {
        let (m, eps) = (self.m, self.eps);
        for (i, fi) in self.f.iter().enumerate() {
            let row = &self.cost[i * m..(i + 1) * m];
            let out = &mut self.kernel[i * m..(i + 1) * m];
            for ((k, &c), &gj) in out.iter_mut().zip(row).zip(&self.g) {
                *k = ((fi + gj - c) / eps).exp();
            }
        }
        self.u.fill(1.0);
        self.v.fill(1.0);
    }

    fn absorb(&mut self) {
        for (f, u) in self.f.iter_mut().zip(&self.u) {
            *f += self.eps * u.ln();
        }
        for (g, v) in self.g.iter_mut().zip(&self.v) {
            *g += self.eps * v.ln();
        }
    }

    fn compute_kv(&mut self) {
        let m = self.m;
        for (i, out) in self.kv.iter_mut().enumerate() {
            let row = &self.kernel[i * m..(i + 1) * m];
            *out = row.iter().zip(&self.v).map(|(k, v)| k * v).sum();
        }
    }

    fn compute_ktu(&mut self) {
        let m = self.m;
        self.ktu.fill(0.0);
        for (i, &ui) in self.u.iter().enumerate() {
            let row = &self.kernel[i * m..(i + 1) * m];
            for (acc, k) in self.ktu.iter_mut().zip(row) {
                *acc += k * ui;
            }
        }
    }

    fn potentials_finite(&self) -> bool {
        self.f.iter().chain(&self.g).all(|x| x.is_finite())
    }

    fn scalings_in_range(&self) -> bool {
        self.u
            .iter()
            .chain(&self.v)
            .all(|&s| s.is_finite() && (1.0 / ABSORB..=ABSORB).contains(&s))
    }
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Solves the entropically regularized transport problem.
///
/// Non-convergence within `max_iters` is not an error: the result carries
/// `converged = false` and the violation actually achieved.
pub fn sinkhorn(tp: &TransportProblem, cfg: &SinkhornConfig) -> Result<SinkhornResult> {
    cfg.validate()?;
    let eps = cfg.epsilon.resolve(tp);
    let (n, m) = tp.cost.dim();
    let cost_owned;
    let cost: &[f64] = match tp.cost.as_slice() {
        Some(s) => s,
        None => {
            cost_owned = tp.cost.iter().copied().collect::<Vec<_>>();
            &cost_owned
        }
    };
    let mut ws = Workspace {
        cost,
        n,
        m,
        eps,
        a: &tp.a,
        b: &tp.b,
        f: vec![0.0; n],
        g: vec![0.0; m],
        kernel: vec![0.0; n * m],
        u: vec![1.0; n],
        v: vec![1.0; m],
        kv: vec![0.0; n],
        ktu: vec![0.0; m],
    };

    ws.log_domain_step();
    let mut iterations = 1;
    if !ws.potentials_finite() {
        return Err(Error::SinkhornNan {
            epsilon: eps,
            iterations,
        });
    }
    ws.rebuild_kernel();

    loop {
        ws.compute_kv();
        if ws.kv.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            // Scaling lost precision; fall back to an exact log-domain step.
            ws.absorb();
            ws.log_domain_step();
            iterations += 1;
            if !ws.potentials_finite() {
                return Err(Error::SinkhornNan {
                    epsilon: eps,
                    iterations,
                });
            }
            ws.rebuild_kernel();
            continue;
        }
        // The column marginal is exact after a `v` update, so the row
        // marginal carries the whole violation.
        let row_err: f64 = ws
            .u
            .iter()
            .zip(&ws.kv)
            .zip(ws.a)
            .map(|((u, kv), a)| (u * kv - a).abs())
            .sum();
        if row_err <= cfg.tol || iterations >= cfg.max_iters {
            break;
        }
        for ((u, kv), a) in ws.u.iter_mut().zip(&ws.kv).zip(ws.a) {
            *u = a / kv;
        }
        ws.compute_ktu();
        for ((v, ktu), b) in ws.v.iter_mut().zip(&ws.ktu).zip(ws.b) {
            *v = b / ktu;
        }
        iterations += 1;
        if !ws.scalings_in_range() {
            ws.absorb();
            if !ws.potentials_finite() {
                return Err(Error::SinkhornNan {
                    epsilon: eps,
                    iterations,
                });
            }
            ws.rebuild_kernel();
        }
    }

    let mut plan = Array2::zeros((n, m));
    for i in 0..n {
        for j in 0..m {
            plan[[i, j]] = ws.u[i] * ws.kernel[i * m + j] * ws.v[j];
        }
    }
    if plan.iter().any(|p| p.is_nan()) {
        return Err(Error::SinkhornNan {
            epsilon: eps,
            iterations,
        });
    }
    let sharp_cost = plan.iter().zip(cost).map(|(p, c)| p * c).sum();
    let row_err: f64 = plan
        .rows()
        .into_iter()
        .zip(&tp.a)
        .map(|(r, a)| (r.sum() - a).abs())
        .sum();
    let col_err: f64 = plan
        .columns()
        .into_iter()
        .zip(&tp.b)
        .map(|(c, b)| (c.sum() - b).abs())
        .sum();
    let marginal_error = row_err.max(col_err);
    Ok(SinkhornResult {
        plan,
        sharp_cost,
        iterations,
        marginal_error,
        converged: marginal_error <= cfg.tol,
        epsilon: eps,
    })
}

/// Entropic approximation of W1 between two uniform sample sets under the
/// Euclidean ground metric: the sharp cost of the regularized plan.
pub fn w1_sinkhorn(x: ArrayView2<f64>, y: ArrayView2<f64>, cfg: &SinkhornConfig) -> Result<f64> {
    if x.nrows() == 0 || y.nrows() == 0 {
        return Err(Error::InvalidTransportProblem("empty sample set".into()));
    }
    let tp = TransportProblem::uniform(cost_matrix(x, y)?)?;
    Ok(sinkhorn(&tp, cfg)?.sharp_cost)
}
