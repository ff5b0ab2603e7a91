//! Seeded Gaussian data-generating processes.
//!
//! Random source: ChaCha20 (`rand_chacha::ChaCha20Rng`, 20 rounds) seeded
//! with `seed_from_u64(seed)`. Each uniform takes the top 53 bits of one
//! `next_u64` draw, `u = (x >> 11) * 2^-53`; standard normals come in pairs
//! from Box–Muller on `(1 - u1, u2)`, cosine branch first. Innovations are
//! `L z` with `L` the lower Cholesky factor of the innovation covariance,
//! drawn in time order and, within a period, in variable order. Recursions
//! start from zero and the first `burn_in` periods are dropped.

mod paper;

use chrono::{Datelike, Days, NaiveDate, Weekday};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cholesky, spectral_radius, Matrix};
use crate::market_data::{AlignedPanel, Variable};
use crate::scalar::Scalar;
use crate::var::companion_matrix;

pub use paper::{
    generate_dataset, levels_from_differences, paper_shaped_batch, BatchConfig, BatchEntity,
    LevelBases, PaperBatch, SimulationRequest, PAPER_ENTITIES,
};

/// Seeded stream of standard normal draws.
#[derive(Clone, Debug)]
pub struct NormalStream {
    rng: ChaCha20Rng,
    spare: Option<f64>,
}

impl NormalStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha20Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DgpKind {
    /// `x_t = c + sum_j A_j x_{t-j} + e_t` with the given lag matrices.
    VarProcess,
    /// `x_t = x_{t-1} + e_t`.
    RandomWalk,
    /// `x_t = c + e_t`.
    WhiteNoise,
    /// `x_t = c + A x_{t-1} + e_t` with a single (usually diagonal) `A`.
    Ar1,
}

fn default_burn_in() -> usize {
    200
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct DgpSpec<T> {
    pub kind: DgpKind,
    pub k: usize,
    /// `A_1 .. A_p`, each `k x k`.
    #[serde(default)]
    pub lag_matrices: Vec<Matrix<T>>,
    /// Empty means zero.
    #[serde(default)]
    pub intercept: Vec<T>,
    pub innovation_covariance: Matrix<T>,
    pub length: usize,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    pub seed: u64,
    /// Refuse processes whose companion spectral radius is not below one.
    #[serde(default = "default_true")]
    pub require_stable: bool,
}

impl<T: Scalar> DgpSpec<T> {
    pub fn var_process(
        lag_matrices: Vec<Matrix<T>>,
        innovation_covariance: Matrix<T>,
        length: usize,
        seed: u64,
    ) -> Self {
        Self {
            kind: DgpKind::VarProcess,
            k: innovation_covariance.rows(),
            lag_matrices,
            intercept: Vec::new(),
            innovation_covariance,
            length,
            burn_in: default_burn_in(),
            seed,
            require_stable: true,
        }
    }

    pub fn white_noise(k: usize, length: usize, seed: u64) -> Self {
        Self {
            kind: DgpKind::WhiteNoise,
            lag_matrices: Vec::new(),
            ..Self::var_process(Vec::new(), Matrix::identity(k), length, seed)
        }
    }

    pub fn random_walk(k: usize, length: usize, seed: u64) -> Self {
        Self {
            kind: DgpKind::RandomWalk,
            require_stable: false,
            ..Self::white_noise(k, length, seed)
        }
    }

    /// Univariate AR(1) with unit innovation variance.
    pub fn ar1(phi: T, length: usize, seed: u64) -> Self {
        Self {
            kind: DgpKind::Ar1,
            ..Self::var_process(
                vec![Matrix::from_fn(1, 1, |_, _| phi)],
                Matrix::identity(1),
                length,
                seed,
            )
        }
    }

    pub fn with_burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }

    pub fn with_intercept(mut self, intercept: Vec<T>) -> Self {
        self.intercept = intercept;
        self
    }

    /// Lag matrices actually used by the recursion.
    pub fn effective_lags(&self) -> Vec<Matrix<T>> {
        match self.kind {
            DgpKind::RandomWalk => vec![Matrix::identity(self.k)],
            DgpKind::WhiteNoise => Vec::new(),
            DgpKind::VarProcess | DgpKind::Ar1 => self.lag_matrices.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.k;
        if k == 0 || self.length == 0 {
            return Err(Error::InvalidSpec(
                "dimension and length must be positive".into(),
            ));
        }
        if self.innovation_covariance.shape() != (k, k) {
            return Err(Error::MismatchedShapes(
                "innovation covariance must be k x k".into(),
            ));
        }
        if self.lag_matrices.iter().any(|a| a.shape() != (k, k)) {
            return Err(Error::MismatchedShapes("lag matrices must be k x k".into()));
        }
        if !self.intercept.is_empty() && self.intercept.len() != k {
            return Err(Error::MismatchedShapes(
                "intercept must have k entries".into(),
            ));
        }
        match self.kind {
            DgpKind::Ar1 if self.lag_matrices.len() != 1 => Err(Error::InvalidSpec(
                "AR(1) takes exactly one lag matrix".into(),
            )),
            DgpKind::RandomWalk | DgpKind::WhiteNoise if !self.lag_matrices.is_empty() => Err(
                Error::InvalidSpec("random walk and white noise take no lag matrices".into()),
            ),
            _ => Ok(()),
        }
    }

    /// Spectral radius of the companion matrix (0 without lags).
    pub fn spectral_radius(&self) -> f64 {
        let lags = self.effective_lags();
        if lags.is_empty() {
            0.0
        } else {
            spectral_radius(&companion_matrix(&lags))
        }
    }
}

/// Draws a `length x k` sample.
pub fn simulate<T: Scalar>(spec: &DgpSpec<T>) -> Result<Matrix<T>> {
    spec.validate()?;
    let chol = cholesky(&spec.innovation_covariance)?;
    if spec.require_stable && matches!(spec.kind, DgpKind::VarProcess | DgpKind::Ar1) {
        let radius = spec.spectral_radius();
        if !(radius < 1.0) {
            return Err(Error::UnstableProcess { radius });
        }
    }
    let k = spec.k;
    let lags = spec.effective_lags();
    let p = lags.len();
    let c = if spec.intercept.is_empty() {
        vec![T::zero(); k]
    } else {
        spec.intercept.clone()
    };
    let total = spec.burn_in + spec.length;
    let mut normals = NormalStream::new(spec.seed);
    let mut out = Matrix::zeros(spec.length, k);
    // History ring holding x_{t-1} .. x_{t-p}.
    let mut history: Vec<Vec<T>> = vec![vec![T::zero(); k]; p];
    let mut z = vec![T::zero(); k];
    for t in 0..total {
        for zi in z.iter_mut() {
            *zi = T::lit(normals.standard_normal());
        }
        let mut x = chol.mul_vec(&z);
        for (xi, ci) in x.iter_mut().zip(&c) {
            *xi = *xi + *ci;
        }
        for (a, prev) in lags.iter().zip(&history) {
            let ax = a.mul_vec(prev);
            for (xi, v) in x.iter_mut().zip(ax) {
                *xi = *xi + v;
            }
        }
        if p > 0 {
            history.rotate_right(1);
            history[0].clone_from(&x);
        }
        if t >= spec.burn_in {
            for (j, v) in x.into_iter().enumerate() {
                out[(t - spec.burn_in, j)] = v;
            }
        }
    }
    Ok(out)
}

/// Weekdays from `start` on, `n` of them.
pub fn business_days(start: NaiveDate, n: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(n);
    let mut d = start;
    while out.len() < n {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d = d + Days::new(1);
    }
    out
}

/// Weekdays in `[start, end]`.
pub fn business_days_between(start: NaiveDate, end: NaiveDate) -> Vec<NaiveDate> {
    start
        .iter_days()
        .take_while(|d| *d <= end)
        .filter(|d| !matches!(d.weekday(), Weekday::Sat | Weekday::Sun))
        .collect()
}

/// Simulates a 2- or 3-variable process onto a weekday grid as a panel with
/// columns `(RS, DCDS)` or `(RS, DBOND, DCDS)`.
pub fn simulate_panel<T: Scalar>(
    spec: &DgpSpec<T>,
    entity_id: &str,
    start: NaiveDate,
) -> Result<AlignedPanel<T>> {
    let columns = match spec.k {
        2 => vec![Variable::Rs, Variable::Dcds],
        3 => Variable::ALL.to_vec(),
        k => {
            return Err(Error::InvalidSpec(format!(
                "panel simulation needs k in {{2, 3}}, got {k}"
            )))
        }
    };
    let values = simulate(spec)?;
    AlignedPanel::new(
        entity_id,
        business_days(start, spec.length),
        columns,
        values,
    )
}
