//! Verification suites, sampling, and the report they produce.
//!
//! Every check compares a closed form against an independent evaluation (a
//! finite-difference oracle, a second closed form, or a definitional
//! measurement) over deterministic samples and records residual statistics.

mod suites;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bundle::PhasePoint;
use crate::connection::CurvatureBlocks;
use crate::error::{Error, Result};
use crate::profile::{EinsteinParams, LiftProfile};
use crate::spaceform::SpaceForm;
use crate::tensor::{kron, Matrix, Tensor4, Vector};

pub use suites::run_suite;

/// A group of checks; [`Suite::ALL`] lists them in dependency order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Suite {
    AlmostKaehler,
    Integrability,
    Connection,
    Ricci,
    Einstein,
    Holomorphic,
    Ode,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::AlmostKaehler,
        Suite::Integrability,
        Suite::Connection,
        Suite::Ricci,
        Suite::Einstein,
        Suite::Holomorphic,
        Suite::Ode,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::AlmostKaehler => "almost_kaehler",
            Suite::Integrability => "integrability",
            Suite::Connection => "connection",
            Suite::Ricci => "ricci",
            Suite::Einstein => "einstein",
            Suite::Holomorphic => "holomorphic",
            Suite::Ode => "ode",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or(Error::InvalidParameter("unknown suite"))
    }
}

/// How a check's statistic is compared with its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Comparison {
    /// Pass iff the largest residual is below the tolerance.
    Below,
    /// Pass iff the smallest witnessed magnitude exceeds the tolerance.
    Above,
}

/// Sampling of phase points.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SampleSpec {
    pub seed: u64,
    pub count: usize,
    /// Radius of the ball of base coordinates; `None` picks the space form default.
    pub q_radius: Option<f64>,
    /// Energy densities are drawn uniformly from this interval, clipped to the tube.
    pub t_range: (f64, f64),
    /// Margin kept below the tube bound `t < A^2 / 2c`.
    pub guard: f64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        Self { seed: 42, count: 100, q_radius: None, t_range: (0.0, 1.5), guard: 1e-3 }
    }
}

/// Per-check tolerances.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Tolerances {
    pub hermitian: f64,
    pub closedness: f64,
    pub nijenhuis: f64,
    pub scalar_identity: f64,
    pub finite_difference: f64,
    pub witness: f64,
    pub expanded_forms: f64,
    pub curvature_oracle: f64,
    pub antisymmetry: f64,
    pub ricci_closed_forms: f64,
    pub cross_block: f64,
    pub einstein: f64,
    pub einstein_oracle: f64,
    pub gamma: f64,
    pub holomorphic_blocks: f64,
    pub holomorphic_value: f64,
    pub ode: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-10,
            closedness: 1e-8,
            nijenhuis: 1e-9,
            scalar_identity: 1e-10,
            finite_difference: 1e-4,
            witness: 1e-2,
            expanded_forms: 1e-9,
            curvature_oracle: 1e-3,
            antisymmetry: 1e-8,
            ricci_closed_forms: 1e-6,
            cross_block: 1e-8,
            einstein: 1e-6,
            einstein_oracle: 1e-3,
            gamma: 1e-10,
            holomorphic_blocks: 1e-6,
            holomorphic_value: 1e-5,
            ode: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.hermitian,
            self.closedness,
            self.nijenhuis,
            self.scalar_identity,
            self.finite_difference,
            self.witness,
            self.expanded_forms,
            self.curvature_oracle,
            self.antisymmetry,
            self.ricci_closed_forms,
            self.cross_block,
            self.einstein,
            self.einstein_oracle,
            self.gamma,
            self.holomorphic_blocks,
            self.holomorphic_value,
            self.ode,
        ];
        if all.iter().all(|t| t.is_finite() && *t > 0.0) {
            Ok(())
        } else {
            Err(Error::InvalidParameter("tolerances must be positive"))
        }
    }
}

/// Everything a verification run depends on.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VerifyConfig {
    pub n: usize,
    pub c: f64,
    #[cfg_attr(feature = "serde", serde(rename = "A"))]
    pub a: f64,
    pub suites: Vec<Suite>,
    pub sample: SampleSpec,
    pub tolerances: Tolerances,
    /// Base step of the central-difference oracles.
    pub fd_step: f64,
    /// Points used by the costlier oracle comparisons.
    pub oracle_points: usize,
    /// Points used by the nested-difference curvature oracle.
    pub curvature_oracle_points: usize,
    /// Size of the `t` grid for profile-level checks.
    pub grid_points: usize,
}

impl VerifyConfig {
    pub fn new(n: usize, c: f64, a: f64) -> Self {
        Self {
            n,
            c,
            a,
            suites: Suite::ALL.to_vec(),
            sample: SampleSpec::default(),
            tolerances: Tolerances::default(),
            fd_step: crate::fd::DEFAULT_STEP,
            oracle_points: 20,
            curvature_oracle_points: 5,
            grid_points: 201,
        }
    }

    pub fn validate(&self) -> Result<()> {
        SpaceForm::new(self.n, self.c)?;
        EinsteinParams::new(self.a, self.c, self.n)?;
        self.tolerances.validate()?;
        crate::fd::check_step(self.fd_step)?;
        let (lo, hi) = self.sample.t_range;
        if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && hi > lo) {
            return Err(Error::InvalidParameter("t range must satisfy 0 <= lo < hi"));
        }
        if self.sample.count == 0 {
            return Err(Error::EmptySample);
        }
        if !(self.sample.guard >= 0.0 && self.sample.guard.is_finite()) {
            return Err(Error::InvalidParameter("guard must be non-negative"));
        }
        if let Some(r) = self.sample.q_radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::InvalidParameter("q radius must be positive"));
            }
        }
        if self.grid_points < 2 {
            return Err(Error::InvalidParameter("grid needs at least two points"));
        }
        Ok(())
    }
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CheckResult {
    pub suite: Suite,
    pub name: String,
    /// The identity being checked, in words.
    pub statement: String,
    /// Largest residual, or for [`Comparison::Above`] the smallest witnessed magnitude.
    pub max_residual: f64,
    pub mean_residual: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub samples: usize,
    pub passed: bool,
    pub notes: Vec<String>,
}

/// Whole-run summary.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub all_passed: bool,
    /// Einstein constant `(n + 1) c / A`.
    pub lambda: f64,
    /// Holomorphic sectional curvature `2c / A`.
    pub holomorphic_curvature: f64,
    /// Energy-density interval actually sampled.
    pub t_range: (f64, f64),
    /// `A^2 / 2c` when `c > 0`.
    pub tube_bound: Option<f64>,
    pub t_range_clipped: bool,
    pub below_schur_dimension: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VerificationReport {
    pub config: VerifyConfig,
    pub checks: Vec<CheckResult>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.summary.all_passed
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Runs the configured suites in dependency order.
pub fn run(config: &VerifyConfig) -> Result<VerificationReport> {
    config.validate()?;
    let base = SpaceForm::new(config.n, config.c)?;
    let params = EinsteinParams::new(config.a, config.c, config.n)?;
    let tube = (config.c > 0.0).then(|| params.t_max());
    let samples = sample_phase_points(&base, tube, &config.sample)?;
    let mut suites = config.suites.clone();
    suites.sort();
    suites.dedup();
    let mut checks = Vec::new();
    for suite in suites {
        checks.extend(run_suite(suite, config, &base, &params, &samples)?);
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    let summary = Summary {
        total: checks.len(),
        passed,
        failed: checks.len() - passed,
        all_passed: passed == checks.len(),
        lambda: params.lambda(),
        holomorphic_curvature: params.holomorphic_curvature(),
        t_range: samples.t_range,
        tube_bound: tube,
        t_range_clipped: samples.clipped,
        below_schur_dimension: base.below_schur_dimension(),
    };
    Ok(VerificationReport { config: config.clone(), checks, summary })
}

/// Deterministic phase points and their energy densities.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub points: Vec<PhasePoint>,
    pub t: Vec<f64>,
    pub t_range: (f64, f64),
    pub clipped: bool,
}

pub(crate) fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform in the closed unit ball, by rejection from the cube.
pub(crate) fn unit_ball(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let r2: f64 = x.iter().map(|a| a * a).sum();
        if r2 <= 1.0 && r2 > 1e-12 {
            return x;
        }
    }
}

/// `q` uniform in the ball of radius `q_radius`, `p` with uniform direction and
/// energy density uniform in the (tube-clipped) `t_range`.
pub fn sample_phase_points(base: &SpaceForm, t_bound: Option<f64>, spec: &SampleSpec) -> Result<SampleSet> {
    let n = base.dim();
    let (lo, mut hi) = spec.t_range;
    if !(lo >= 0.0 && hi > lo) {
        return Err(Error::InvalidParameter("t range must satisfy 0 <= lo < hi"));
    }
    let mut clipped = false;
    if let Some(b) = t_bound {
        if hi > b - spec.guard {
            hi = b - spec.guard;
            clipped = true;
        }
    }
    if !(hi > lo) || spec.count == 0 {
        return Err(Error::EmptySample);
    }
    let radius = spec.q_radius.unwrap_or_else(|| base.default_radius());
    let mut rng = rng_for(spec.seed, 0);
    let mut points = Vec::with_capacity(spec.count);
    let mut ts = Vec::with_capacity(spec.count);
    for _ in 0..spec.count {
        let q: Vec<f64> = unit_ball(&mut rng, n).iter().map(|x| x * radius).collect();
        let d = Vector::from_vec(unit_ball(&mut rng, n));
        let t = lo + (hi - lo) * rng.random::<f64>();
        let (_, g_inv) = base.metric_at(&q)?;
        let scale = libm::sqrt(2.0 * t / d.dot(&(&g_inv * &d)));
        points.push(PhasePoint::new(q, (d * scale).as_slice().to_vec())?);
        ts.push(t);
    }
    Ok(SampleSet { points, t: ts, t_range: (lo, hi), clipped })
}

/// `max(|Ric_QQ - λG| / |G|, |Ric_PP - λH| / |H|)` at one point, trace route.
pub fn einstein_residual(base: &SpaceForm, profile: &LiftProfile, lambda: f64, pt: &PhasePoint) -> Result<f64> {
    let b = crate::bundle::lift_blocks(base, profile, pt)?;
    let r = crate::connection::ricci_blocks(base, profile, pt)?;
    let eq = (&r.qq - &b.gb * lambda).abs().max() / b.gb.abs().max();
    let ep = (&r.pp - &b.hb * lambda).abs().max() / b.hb.abs().max();
    Ok(eq.max(ep))
}

/// `R(X, Y)Z = (k/4)(g(Z,Y)X - g(Z,X)Y + g(Z,JY)JX - g(Z,JX)JY + 2g(X,JY)JZ)`.
pub fn holomorphic_model(k: f64, g: &Matrix, j: &Matrix, x: &Vector, y: &Vector, z: &Vector) -> Vector {
    let ip = |a: &Vector, b: &Vector| a.dot(&(g * b));
    let (jx, jy, jz) = (j * x, j * y, j * z);
    (x * ip(z, y) - y * ip(z, x) + &jx * ip(z, &jy) - &jy * ip(z, &jx) + jz * (2.0 * ip(x, &jy))) * (k / 4.0)
}

/// `K(X, Y) Z` from a full curvature table `k[(d, c, a, b)]`.
pub fn apply_curvature(k: &Tensor4, x: &Vector, y: &Vector, z: &Vector) -> Vector {
    let m = k.dim();
    Vector::from_fn(m, |d, _| {
        let mut s = 0.0;
        for c in 0..m {
            if z[c] == 0.0 {
                continue;
            }
            for a in 0..m {
                for b in 0..m {
                    s += k[(d, c, a, b)] * x[a] * y[b] * z[c];
                }
            }
        }
        s
    })
}

/// The six curvature blocks of the Kähler-Einstein lift, with `f = c/2A`:
/// `K(δ_i,δ_j)δ_k = f(δ^h_i G_jk - δ^h_j G_ik)δ_h`,
/// `K(δ_i,δ_j)∂^k = f(δ^k_j G_ih - δ^k_i G_jh)∂^h`,
/// `K(∂^i,∂^j)δ_k = f(δ^j_k H^ih - δ^i_k H^jh)δ_h`,
/// `K(∂^i,∂^j)∂^k = f(δ^i_h H^jk - δ^j_h H^ik)∂^h`,
/// `K(∂^i,δ_j)δ_k = f(δ^i_h G_jk + δ^i_k G_jh + 2δ^i_j G_kh)∂^h`,
/// `K(∂^i,δ_j)∂^k = -f(δ^h_j H^ik + δ^k_j H^ih + 2δ^i_j H^kh)δ_h`.
pub fn einstein_curvature_blocks(c: f64, a: f64, gb: &Matrix, hb: &Matrix) -> CurvatureBlocks {
    let n = gb.nrows();
    let f = c / (2.0 * a);
    let d = kron;
    CurvatureBlocks {
        qqq: Tensor4::from_fn(n, |h, i, j, k| f * (d(h, i) * gb[(j, k)] - d(h, j) * gb[(i, k)])),
        qqp: Tensor4::from_fn(n, |k, i, j, h| f * (d(k, j) * gb[(i, h)] - d(k, i) * gb[(j, h)])),
        ppq: Tensor4::from_fn(n, |i, j, h, k| f * (d(j, k) * hb[(i, h)] - d(i, k) * hb[(j, h)])),
        ppp: Tensor4::from_fn(n, |i, j, k, h| f * (d(i, h) * hb[(j, k)] - d(j, h) * hb[(i, k)])),
        pqq: Tensor4::from_fn(n, |i, j, k, h| {
            f * (d(i, h) * gb[(j, k)] + d(i, k) * gb[(j, h)] + 2.0 * d(i, j) * gb[(k, h)])
        }),
        pqp: Tensor4::from_fn(n, |i, k, h, j| {
            -f * (d(h, j) * hb[(i, k)] + d(k, j) * hb[(i, h)] + 2.0 * d(i, j) * hb[(k, h)])
        }),
    }
}

#[cfg(test)]
mod tests;
