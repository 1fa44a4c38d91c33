//! Monte-Carlo simulation harness: canonical ground truths, reproducible
//! Gaussian noise, MSE estimation over replicates, and log-log slope fits.
//!
//! Noise is counter-based: the value at a cell is a pure function of
//! `(seed, size, rep, cell index)`, so replicates can run in any order or
//! thread layout and still reproduce bit-identical tables.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{for_each_cell, Family, LatticeArray, Partition, Rect};
use crate::solver::solve;

/// The four study designs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioKind {
    /// Piecewise constant on a nonhierarchical 5-rectangle pinwheel.
    Pinwheel2d,
    /// Indicator of the left half-plane of columns.
    Twopiece2d,
    /// Product-of-sines bump.
    Smooth2d,
    /// Piecewise linear signal with off-dyadic knots, in one dimension.
    Pwlinear1d,
}

impl ScenarioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::Pinwheel2d => "pinwheel2d",
            ScenarioKind::Twopiece2d => "twopiece2d",
            ScenarioKind::Smooth2d => "smooth2d",
            ScenarioKind::Pwlinear1d => "pwlinear1d",
        }
    }

    /// Default noise level: 0.1 for the pinwheel study, 1 elsewhere.
    pub fn default_sigma(self) -> f64 {
        match self {
            ScenarioKind::Pinwheel2d => 0.1,
            _ => 1.0,
        }
    }

    /// Default polynomial order fitted per rectangle.
    pub fn default_order(self) -> usize {
        match self {
            ScenarioKind::Pwlinear1d => 1,
            _ => 0,
        }
    }

    /// Default partition family: the pinwheel study exercises the optimal
    /// regression tree, the rest Dyadic CART.
    pub fn default_family(self) -> Family {
        match self {
            ScenarioKind::Pinwheel2d => Family::Hier,
            _ => Family::Rdp,
        }
    }
}

impl std::fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ScenarioKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pinwheel2d" => Ok(ScenarioKind::Pinwheel2d),
            "twopiece2d" => Ok(ScenarioKind::Twopiece2d),
            "smooth2d" => Ok(ScenarioKind::Smooth2d),
            "pwlinear1d" => Ok(ScenarioKind::Pwlinear1d),
            other => Err(Error::InvalidArgument(format!("unknown scenario {other:?}"))),
        }
    }
}

/// How the penalty scales with the size parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LambdaRule {
    /// `lambda = log2(size)`, the paper's choice of `lambda = l` at `2^l`.
    Log2Size,
    Fixed(f64),
}

impl LambdaRule {
    pub fn lambda_for(self, size: usize) -> Result<f64> {
        let lambda = match self {
            LambdaRule::Log2Size => (size as f64).log2(),
            LambdaRule::Fixed(v) => v,
        };
        if lambda <= 0.0 {
            return Err(Error::NonPositiveLambda(lambda));
        }
        Ok(lambda)
    }
}

impl std::fmt::Display for LambdaRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LambdaRule::Log2Size => f.write_str("log2n"),
            LambdaRule::Fixed(v) => write!(f, "fixed:{v}"),
        }
    }
}

impl std::str::FromStr for LambdaRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "log2n" {
            return Ok(LambdaRule::Log2Size);
        }
        if let Some(v) = s.strip_prefix("fixed:") {
            let v: f64 = v
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad lambda value in {s:?}")))?;
            return Ok(LambdaRule::Fixed(v));
        }
        Err(Error::InvalidArgument(format!(
            "unknown lambda rule {s:?} (expected log2n or fixed:<v>)"
        )))
    }
}

/// A reproducible Monte-Carlo study: sizes, noise, penalty rule, estimator.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub sizes: Vec<usize>,
    pub sigma: f64,
    pub reps: usize,
    pub lambda_rule: LambdaRule,
    pub order: usize,
    pub family: Family,
    pub seed: u64,
}

impl Scenario {
    /// A scenario with the study's default sigma, order, and family.
    pub fn with_defaults(kind: ScenarioKind, sizes: Vec<usize>, reps: usize, seed: u64) -> Self {
        Self {
            kind,
            sizes,
            sigma: kind.default_sigma(),
            reps,
            lambda_rule: LambdaRule::Log2Size,
            order: kind.default_order(),
            family: kind.default_family(),
            seed,
        }
    }
}

/// One row of a Monte-Carlo MSE table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MseRow {
    /// Size parameter of the scenario (side length, or 1D sample count).
    pub n: usize,
    /// Total cell count N.
    pub cells: usize,
    pub mse_mean: f64,
    pub mse_stderr: f64,
}

/// Monte-Carlo estimates per size plus the fitted log-log slope (present
/// once at least three sizes were run).
#[derive(Clone, Debug, PartialEq)]
pub struct MseTable {
    pub rows: Vec<MseRow>,
    pub slope: Option<f64>,
}

impl MseTable {
    /// CSV rendering: `n,N,mse_mean,mse_stderr` rows and a slope footer.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,N,mse_mean,mse_stderr\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.n, row.cells, row.mse_mean, row.mse_stderr
            ));
        }
        match self.slope {
            Some(s) => out.push_str(&format!("# slope={s}\n")),
            None => out.push_str("# slope=nan\n"),
        }
        out
    }
}

// --- ground truths -------------------------------------------------------

/// The 5-rectangle pinwheel partition of the n x n lattice, with cuts at
/// `floor(n/3)` and `floor(2n/3)`. It admits no full guillotine cut.
pub fn pinwheel_partition(n: usize) -> Result<Partition> {
    if n < 6 {
        return Err(Error::InvalidArgument(format!(
            "pinwheel needs n >= 6, got {n}"
        )));
    }
    let a = n / 3;
    let b = 2 * n / 3;
    Partition::new(
        Rect::full(&[n, n]),
        vec![
            Rect::new(vec![1, 1], vec![a, b])?,
            Rect::new(vec![1, b + 1], vec![b, n])?,
            Rect::new(vec![b + 1, a + 1], vec![n, n])?,
            Rect::new(vec![a + 1, 1], vec![n, a])?,
            Rect::new(vec![a + 1, a + 1], vec![b, b])?,
        ],
        Family::Arbitrary,
    )
}

/// Piecewise constant truth on the pinwheel, taking values 0..=4.
pub fn pinwheel_truth(n: usize) -> Result<LatticeArray> {
    let partition = pinwheel_partition(n)?;
    let mut theta = LatticeArray::zeros(vec![n, n])?;
    let dims = theta.dims().to_vec();
    for (level, rect) in partition.rects().iter().enumerate() {
        for_each_cell(rect, &dims, |_, lin| {
            theta.values_mut()[lin] = level as f64;
        });
    }
    Ok(theta)
}

/// `theta(i, j) = 1{j <= n/2}` on the n x n lattice; n must be even.
pub fn twopiece_truth(n: usize) -> Result<LatticeArray> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "two-piece truth needs even n >= 2, got {n}"
        )));
    }
    let mut theta = LatticeArray::zeros(vec![n, n])?;
    for i in 1..=n {
        for j in 1..=n / 2 {
            theta.set(&[i, j], 1.0);
        }
    }
    Ok(theta)
}

/// `theta(i, j) = sin(i pi / n) sin(j pi / n)`.
pub fn smooth_truth(n: usize) -> Result<LatticeArray> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "smooth truth needs n >= 2, got {n}"
        )));
    }
    let pi = std::f64::consts::PI;
    let mut theta = LatticeArray::zeros(vec![n, n])?;
    for i in 1..=n {
        let si = (i as f64 * pi / n as f64).sin();
        for j in 1..=n {
            theta.set(&[i, j], si * (j as f64 * pi / n as f64).sin());
        }
    }
    Ok(theta)
}

/// Piecewise linear signal with knots at 0.3, 0.55, 0.8, evaluated on the
/// grid `i / n` for `i = 1..=n`.
pub fn pwlinear_truth(n: usize) -> Result<LatticeArray> {
    if n < 8 {
        return Err(Error::InvalidArgument(format!(
            "piecewise-linear truth needs n >= 8, got {n}"
        )));
    }
    let f = |x: f64| {
        -44.0 * (x - 0.3).max(0.0) + 48.0 * (x - 0.55).max(0.0) - 56.0 * (x - 0.8).max(0.0)
            + 0.28 * x
    };
    let vals: Vec<f64> = (1..=n).map(|i| f(i as f64 / n as f64)).collect();
    LatticeArray::new(vec![n], vals)
}

pub fn truth_for(kind: ScenarioKind, n: usize) -> Result<LatticeArray> {
    match kind {
        ScenarioKind::Pinwheel2d => pinwheel_truth(n),
        ScenarioKind::Twopiece2d => twopiece_truth(n),
        ScenarioKind::Smooth2d => smooth_truth(n),
        ScenarioKind::Pwlinear1d => pwlinear_truth(n),
    }
}

// --- counter-based noise -------------------------------------------------

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn counter_word(seed: u64, n: u64, rep: u64, cell: u64, lane: u64) -> u64 {
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    h = mix64(h ^ n.wrapping_mul(0xa076_1d64_78bd_642f));
    h = mix64(h ^ rep.wrapping_mul(0xe703_7ed1_a0b4_28db));
    h = mix64(h ^ cell.wrapping_mul(0x8ebc_6af0_9c88_c6e3));
    mix64(h ^ lane.wrapping_mul(0x5899_65cc_7537_4cc3))
}

/// Standard normal deviate determined by `(seed, n, rep, cell)`, via
/// Box-Muller on two hashed uniforms.
pub fn noise_value(seed: u64, n: u64, rep: u64, cell: u64) -> f64 {
    let w0 = counter_word(seed, n, rep, cell, 0);
    let w1 = counter_word(seed, n, rep, cell, 1);
    // u1 in (0, 1], u2 in [0, 1).
    let u1 = ((w0 >> 11) + 1) as f64 / (1u64 << 53) as f64;
    let u2 = (w1 >> 11) as f64 / (1u64 << 53) as f64;
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// The truth plus `sigma * N(0,1)` noise keyed by `(seed, n, rep)`.
pub fn noisy_observation(
    truth: &LatticeArray,
    sigma: f64,
    seed: u64,
    n: usize,
    rep: usize,
) -> LatticeArray {
    let mut y = truth.clone();
    if sigma > 0.0 {
        for (cell, v) in y.values_mut().iter_mut().enumerate() {
            *v += sigma * noise_value(seed, n as u64, rep as u64, cell as u64);
        }
    }
    y
}

// --- running scenarios ---------------------------------------------------

/// Ordinary least-squares slope of `log(mse)` against `log(N)` over the
/// rows with positive MSE; at least two such rows are required.
pub fn fit_slope(rows: &[MseRow]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.mse_mean > 0.0)
        .map(|r| ((r.cells as f64).ln(), r.mse_mean.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "slope needs at least 2 rows with positive mse, got {}",
            pts.len()
        )));
    }
    let m = pts.len() as f64;
    let xbar = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let ybar = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - xbar) * (p.1 - ybar)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - xbar) * (p.0 - xbar)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument(
            "slope undefined: all rows share one size".into(),
        ));
    }
    Ok(sxy / sxx)
}

/// Runs the full Monte-Carlo study: for every size, solve `reps` noisy
/// replicates and record the mean and standard error of
/// `||fit - truth||^2 / N`. Replicates run in parallel; the reduction
/// order is fixed, so equal scenarios give bit-identical tables.
pub fn run_scenario(s: &Scenario) -> Result<MseTable> {
    if s.reps == 0 {
        return Err(Error::InvalidArgument("reps must be >= 1".into()));
    }
    if s.sizes.is_empty() || s.sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "sizes must be nonempty and strictly increasing".into(),
        ));
    }
    if s.sigma < 0.0 {
        return Err(Error::InvalidArgument("sigma must be nonnegative".into()));
    }
    let mut rows = Vec::with_capacity(s.sizes.len());
    for &n in &s.sizes {
        let in_context = |rep: usize, e: Error| Error::Scenario {
            scenario: s.kind.to_string(),
            n,
            rep,
            source: Box::new(e),
        };
        let truth = truth_for(s.kind, n).map_err(|e| in_context(0, e))?;
        let lambda = s.lambda_rule.lambda_for(n).map_err(|e| in_context(0, e))?;
        let cells = truth.len();
        let mses: Vec<f64> = (0..s.reps)
            .into_par_iter()
            .map(|rep| {
                let y = noisy_observation(&truth, s.sigma, s.seed, n, rep);
                let fit = solve(&y, s.order, lambda, s.family)
                    .map_err(|e| in_context(rep, e))?;
                Ok(fit.fitted.squared_distance(&truth) / cells as f64)
            })
            .collect::<Result<Vec<f64>>>()?;
        let mean = mses.iter().sum::<f64>() / s.reps as f64;
        let stderr = if s.reps > 1 {
            let var = mses.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>()
                / (s.reps - 1) as f64;
            (var / s.reps as f64).sqrt()
        } else {
            0.0
        };
        rows.push(MseRow {
            n,
            cells,
            mse_mean: mean,
            mse_stderr: stderr,
        });
    }
    let slope = if rows.len() >= 3 {
        fit_slope(&rows).ok()
    } else {
        None
    };
    Ok(MseTable { rows, slope })
}
