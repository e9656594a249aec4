//! Every numeric threshold used by the checks, in one place.
//!
//! Thresholds for `O(·)` terms whose constants are unknown are empirical
//! desk-scale envelopes and are marked as such.

/// Euler's constant γ₀.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

// ---- solver / series ----------------------------------------------------

/// Relative cutoff for the prime-power series of φ and φ_k.
pub const PHI_SERIES_CUTOFF: f64 = 1e-18;
/// Residual bound for the saddle point, relative to log x.
pub const SADDLE_RESIDUAL: f64 = 1e-10;
/// Round-trip residual for ξ, relative to max(1, uξ).
pub const XI_ROUND_TRIP: f64 = 1e-12;
/// Slack allowed on exact inequalities between floating quantities
/// (|H(α+it)| ≤ H(α), convexity second differences).
pub const ROUNDING_SLACK: f64 = 1e-12;
/// Convexity check: minimum discrete second difference.
pub const CONVEXITY_FLOOR: f64 = -1e-9;

// ---- derivative consistency ----------------------------------------------

pub const FD_STEP: f64 = 1e-4;
pub const FD_REL_LOW_ORDER: f64 = 1e-5;
pub const FD_REL_PHI4: f64 = 1e-3;
pub const EXP_PHI_VS_H: f64 = 1e-10;

// ---- prime sums (empirical, desk scale) ----------------------------------

/// |θ(x)/x − 1| at x = 10⁶.
pub const THETA_REL_1E6: f64 = 0.01;
/// |θ_χ(x)| / x at x = 10⁶.
pub const THETA_CHI_REL_1E6: f64 = 0.05;
/// |value − main| ≤ WPS_ABS + WPS_REL·x^{1−σ}.
pub const WPS_ABS: f64 = 5.0;
pub const WPS_REL: f64 = 0.05;
/// Mertens product: ratio within 1 ± MERTENS_C / log x.
pub const MERTENS_C: f64 = 3.0;
/// Default C in the range 0 ≤ σ ≤ 1 + C/log x.
pub const PRIME_SUM_C: f64 = 2.0;

// ---- saddle point (empirical envelopes) ------------------------------------

/// |α − 1| ≤ ALPHA_NEAR_ONE / log y for u ≤ 14.
pub const ALPHA_NEAR_ONE: f64 = 10.0;
/// |α − (1 − ξ/log y)| ≤ XI_GAP_C/(log y)² + XI_GAP_U·u/y.
pub const XI_GAP_C: f64 = 50.0;
pub const XI_GAP_U: f64 = 10.0;
/// |ξ(u) − log(u log u)| ≤ XI_LOGLOG_C · log log u / log u for u ≥ 10.
pub const XI_LOGLOG_C: f64 = 2.0;

// ---- special functions -------------------------------------------------------

pub const RHO_TWO: f64 = 1e-10;
/// Reference ρ(3) and its tolerance.
pub const RHO_THREE_REF: f64 = 0.048_608_4;
pub const RHO_THREE: f64 = 1e-6;
pub const EXP_INTEGRAL: f64 = 1e-10;
/// Dickman grid self-consistency between steps 1e-3 and 1e-4 (absolute, u ≤ 20).
pub const RHO_GRID: f64 = 1e-8;
/// Values of ρ below this clamp to zero.
pub const RHO_UNDERFLOW: f64 = 1e-300;

// ---- estimators (empirical, desk scale) ----------------------------------------

/// |thm1/exact − 1| at the largest u of the trend check.
pub const THM1_TREND_MAX: f64 = 0.5;
/// |thm1/thm2 − 1|.
pub const THM1_VS_THM2: f64 = 0.3;
/// |goswami/exact − 1| ≤ GAUSS_C · x^{−1/4} at y = x.
pub const GAUSS_C: f64 = 3.0;
/// |perron − exact| / exact at (100.5, 100, T = 50).
pub const PERRON_REL: f64 = 0.05;
