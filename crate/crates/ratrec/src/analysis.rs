//! Long-run classification of solutions from the parameters alone.
//!
//! The asymptotic behaviour is decided by |A| versus |alpha| together with
//! the two zero-conditions A - alpha + B*b*d = 0 and A - alpha + B*a*c = 0:
//!
//! * |A/alpha| > 1: convergence to zero, except that a zero-condition makes
//!   its seed pair's subsequences exactly constant.
//! * A = alpha: convergence to zero.
//! * A = -alpha: unbounded growth, one subsequence of each pair growing
//!   geometrically with ratio rho = -(A + B*u*v)/A while its partner decays,
//!   their product conserved. |rho| = 1 is left unclassified.
//! * |A/alpha| < 1: the four subsequences converge to a period-4 limit cycle
//!   whose entries are linked by the involution f(x) = (alpha - A)/(B*x).
//!
//! All decisions are exact rational comparisons; the only float arithmetic
//! here is the numeric limit-cycle estimation fallback.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::closedform::PairSelector;
use crate::numerics::{Mode, NumericsError, Rational, Scalar};
use crate::recurrence::{
    simulate, InitialConditions, Parameters, RecurrenceError, Trajectory, TrajectoryStatus,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Recurrence(#[from] RecurrenceError),
    #[error("alpha and A cannot both be zero")]
    BothDegenerate,
    #[error("parameters must be finite")]
    NonFiniteParameter,
    #[error("operation requires {expected}, but the parameters are in the {actual} regime")]
    WrongRegime {
        expected: &'static str,
        actual: Regime,
    },
    #[error("the initial conditions are forbidden: zero denominator at index {0}")]
    ForbiddenInitialConditions(i64),
    #[error("subsequence limits did not settle within horizon {0}")]
    NoConvergenceWithinHorizon(usize),
    #[error("a subsequence limit is zero; the cycle relation is vacuous")]
    ZeroLimit,
    #[error("classification requires exact-mode inputs")]
    ExactModeRequired,
}

/// Parameter regime, decided by exact comparison of |A| against |alpha|.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// |A/alpha| > 1.
    ModGreater,
    /// A = alpha (nonzero).
    EqualPos,
    /// A = -alpha (nonzero).
    EqualNeg,
    /// |A/alpha| < 1.
    ModLess,
    /// alpha = 0 with A != 0: every term past the seeds is zero.
    DegenerateAlphaZero,
    /// B = 0: each subsequence is geometric with ratio alpha/A.
    DegenerateBZero,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::ModGreater => write!(f, "|A/alpha| > 1"),
            Regime::EqualPos => write!(f, "A = alpha"),
            Regime::EqualNeg => write!(f, "A = -alpha"),
            Regime::ModLess => write!(f, "|A/alpha| < 1"),
            Regime::DegenerateAlphaZero => write!(f, "alpha = 0"),
            Regime::DegenerateBZero => write!(f, "B = 0"),
        }
    }
}

/// The two exact collapse conditions on the seed pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroConditions {
    /// A - alpha + B*b*d = 0.
    pub bd_zero: bool,
    /// A - alpha + B*a*c = 0.
    pub ac_zero: bool,
}

impl ZeroConditions {
    pub fn both(&self) -> bool {
        self.bd_zero && self.ac_zero
    }

    pub fn exactly_one(&self) -> bool {
        self.bd_zero != self.ac_zero
    }
}

/// Growth data for the A = -alpha regime.
///
/// For each pair, e = A/(B*u*v) and rho = -(A + B*u*v)/A = -(1 + 1/e).
/// The subsequences obey x_{4n-3} = d*rho_bd^(-n), x_{4n-1} = b*rho_bd^n,
/// and the (a,c) analogs, so |rho| != 1 forces one side of each pair to grow
/// without bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeQuantities {
    pub e_bd: Scalar,
    pub e_ac: Scalar,
    pub rho_bd: Scalar,
    pub rho_ac: Scalar,
}

impl RegimeQuantities {
    pub fn is_marginal_bd(&self) -> bool {
        self.rho_bd.abs() == Scalar::one(self.rho_bd.mode())
    }

    pub fn is_marginal_ac(&self) -> bool {
        self.rho_ac.abs() == Scalar::one(self.rho_ac.mode())
    }
}

/// How a limit cycle was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleExactness {
    /// Derived in closed form from the zero-conditions.
    ExactFromZeroConditions,
    /// Estimated by float iteration until the subsequences settled.
    NumericEstimate,
}

impl std::fmt::Display for CycleExactness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CycleExactness::ExactFromZeroConditions => write!(f, "exact-from-zero-conditions"),
            CycleExactness::NumericEstimate => write!(f, "numeric-estimate"),
        }
    }
}

/// The period-4 limit cycle (l3, l2, l1, l0) of the four subsequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitCycle {
    pub l3: Scalar,
    pub l2: Scalar,
    pub l1: Scalar,
    pub l0: Scalar,
    pub exactness: CycleExactness,
}

impl LimitCycle {
    fn limits(&self) -> [&Scalar; 4] {
        [&self.l3, &self.l2, &self.l1, &self.l0]
    }
}

/// Asymptotic class of a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymptoticClass {
    ConvergesToZero,
    ConstantSubsequences,
    ConvergesToPeriod4,
    Unbounded,
    MarginalUnclassified,
    Forbidden,
}

impl std::fmt::Display for AsymptoticClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AsymptoticClass::ConvergesToZero => write!(f, "converges-to-zero"),
            AsymptoticClass::ConstantSubsequences => write!(f, "constant-subsequences"),
            AsymptoticClass::ConvergesToPeriod4 => write!(f, "converges-to-period-4"),
            AsymptoticClass::Unbounded => write!(f, "unbounded"),
            AsymptoticClass::MarginalUnclassified => write!(f, "marginal-unclassified"),
            AsymptoticClass::Forbidden => write!(f, "forbidden"),
        }
    }
}

/// Evidence attached to a verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    LimitCycle(LimitCycle),
    GrowthRates(RegimeQuantities),
}

/// Qualifying flags on a verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Note {
    /// d = b and c = a with b != c: the whole solution alternates two values.
    TwoPrimePeriodic,
    /// All four seeds coincide, so the solution is a constant sequence.
    AllSeedsEqual,
    /// Exactly one zero-condition holds: one seed pair stays constant while
    /// the other pair's subsequences decay to zero.
    MixedZeroConditions,
    /// |rho| = 1 for this pair: the growth argument is inconclusive.
    MarginalRatio { pair: PairSelector },
    /// B = 0 reduces each subsequence to a geometric progression.
    GeometricStepRatio { ratio: Scalar },
    /// Geometric ratio -1: every subsequence alternates in sign, so the
    /// solution is periodic with period dividing 8.
    PeriodEightAlternation,
    /// The numeric limit-cycle estimate did not settle within its horizon.
    CycleEstimateUnconverged,
    /// Both zero-conditions hold: x_{n+4} = x_n exactly for every index.
    ExactPeriodFourCollapse,
    /// The trajectory hits a zero denominator at this index.
    ForbiddenAtIndex { index: i64 },
}

impl std::fmt::Display for Note {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Note::TwoPrimePeriodic => write!(f, "periodic with prime period 2"),
            Note::AllSeedsEqual => write!(f, "all seeds equal: constant solution"),
            Note::MixedZeroConditions => {
                write!(f, "exactly one zero-condition holds (case not covered by the source theorems): one pair constant, the other decays to zero")
            }
            Note::MarginalRatio { pair } => {
                write!(f, "|rho_{pair}| = 1: growth argument inconclusive")
            }
            Note::GeometricStepRatio { ratio } => {
                write!(f, "B = 0: subsequences are geometric with ratio {ratio}")
            }
            Note::PeriodEightAlternation => {
                write!(f, "ratio -1: subsequences alternate in sign (period divides 8)")
            }
            Note::CycleEstimateUnconverged => {
                write!(f, "numeric cycle estimate did not settle within the horizon")
            }
            Note::ExactPeriodFourCollapse => {
                write!(f, "both zero-conditions hold: x_(n+4) = x_n exactly for all n")
            }
            Note::ForbiddenAtIndex { index } => {
                write!(f, "zero denominator at index {index}")
            }
        }
    }
}

/// Structured classification outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub regime: Regime,
    pub zero_conditions: ZeroConditions,
    pub class: AsymptoticClass,
    pub witness: Option<Witness>,
    pub notes: Vec<Note>,
}

impl Verdict {
    /// Key-value text report, one line per field.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("regime: {}\n", self.regime));
        out.push_str(&format!(
            "zero_conditions: bd_zero={} ac_zero={}\n",
            self.zero_conditions.bd_zero, self.zero_conditions.ac_zero
        ));
        out.push_str(&format!("class: {}\n", self.class));
        match &self.witness {
            Some(Witness::LimitCycle(cycle)) => {
                out.push_str(&format!(
                    "limit_cycle: l3={} l2={} l1={} l0={} ({})\n",
                    cycle.l3, cycle.l2, cycle.l1, cycle.l0, cycle.exactness
                ));
            }
            Some(Witness::GrowthRates(rates)) => {
                out.push_str(&format!(
                    "growth_rates: e_bd={} e_ac={} rho_bd={} rho_ac={}\n",
                    rates.e_bd, rates.e_ac, rates.rho_bd, rates.rho_ac
                ));
            }
            None => {}
        }
        if self.notes.is_empty() {
            out.push_str("notes: none\n");
        } else {
            let rendered: Vec<String> = self.notes.iter().map(Note::to_string).collect();
            out.push_str(&format!("notes: {}\n", rendered.join("; ")));
        }
        out
    }
}

/// Tuning knobs for [`classify_with_options`].
#[derive(Debug, Clone)]
pub struct ClassifyOptions {
    /// Exact steps simulated up front to rule out forbidden seeds.
    pub check_horizon: usize,
    /// Tolerance for the numeric limit-cycle estimate.
    pub cycle_tol: f64,
    /// Float horizon for the numeric limit-cycle estimate.
    pub cycle_horizon: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            check_horizon: 400,
            cycle_tol: 1e-9,
            cycle_horizon: 10_000,
        }
    }
}

fn finite_exact(value: &Scalar) -> Result<Rational, AnalysisError> {
    value.to_exact().ok_or(AnalysisError::NonFiniteParameter)
}

/// Decides the regime by exact comparison of |A| against |alpha|.
///
/// Float-mode parameters are converted bit-exactly first, so the comparison
/// is never subject to rounding.
pub fn regime(params: &Parameters) -> Result<Regime, AnalysisError> {
    let alpha = finite_exact(params.alpha())?;
    let cap_a = finite_exact(params.cap_a())?;
    let cap_b = finite_exact(params.cap_b())?;
    if alpha.is_zero() && cap_a.is_zero() {
        return Err(AnalysisError::BothDegenerate);
    }
    if alpha.is_zero() {
        return Ok(Regime::DegenerateAlphaZero);
    }
    if cap_b.is_zero() {
        return Ok(Regime::DegenerateBZero);
    }
    let (abs_a, abs_alpha) = (cap_a.abs(), alpha.abs());
    Ok(if abs_a > abs_alpha {
        Regime::ModGreater
    } else if abs_a < abs_alpha {
        Regime::ModLess
    } else if cap_a == alpha {
        Regime::EqualPos
    } else {
        Regime::EqualNeg
    })
}

/// Exact zero-condition tests A - alpha + B*u*v = 0 for both seed pairs.
///
/// Always computed in exact arithmetic; float inputs are converted
/// bit-exactly, and non-finite values never satisfy a condition.
pub fn zero_conditions(params: &Parameters, init: &InitialConditions) -> ZeroConditions {
    let check = |u: &Scalar, v: &Scalar| -> bool {
        let exact = |s: &Scalar| s.to_exact();
        match (
            exact(params.alpha()),
            exact(params.cap_a()),
            exact(params.cap_b()),
            exact(u),
            exact(v),
        ) {
            (Some(alpha), Some(cap_a), Some(cap_b), Some(u), Some(v)) => {
                (&(&cap_a - &alpha) + &(&cap_b * &(&u * &v))).is_zero()
            }
            _ => false,
        }
    };
    ZeroConditions {
        bd_zero: check(init.b(), init.d()),
        ac_zero: check(init.a(), init.c()),
    }
}

/// Growth quantities for the A = -alpha regime.
pub fn growth_rates(
    params: &Parameters,
    init: &InitialConditions,
) -> Result<RegimeQuantities, AnalysisError> {
    let actual = regime(params)?;
    if actual != Regime::EqualNeg {
        return Err(AnalysisError::WrongRegime {
            expected: "A = -alpha",
            actual,
        });
    }
    let pair = |u: &Scalar, v: &Scalar| -> Result<(Scalar, Scalar), AnalysisError> {
        let buv = params.cap_b().mul(&u.mul(v)?)?;
        let e = params.cap_a().div(&buv)?;
        let rho = params.cap_a().add(&buv)?.div(params.cap_a())?.neg();
        Ok((e, rho))
    };
    let (e_bd, rho_bd) = pair(init.b(), init.d())?;
    let (e_ac, rho_ac) = pair(init.a(), init.c())?;
    Ok(RegimeQuantities {
        e_bd,
        e_ac,
        rho_bd,
        rho_ac,
    })
}

/// The involution f(x) = (alpha - A)/(B*x) linking paired subsequence
/// limits. Satisfies f(f(x)) = x for every nonzero x whenever B != 0.
pub fn limit_involution(params: &Parameters, x: &Scalar) -> Result<Scalar, AnalysisError> {
    if x.is_zero() {
        return Err(AnalysisError::ZeroLimit);
    }
    let numerator = params.alpha().sub(params.cap_a())?;
    Ok(numerator.div(&params.cap_b().mul(x)?)?)
}

/// The period-4 limit cycle in the |A/alpha| < 1 regime.
///
/// When both zero-conditions hold the cycle is written down exactly:
/// l3 = (alpha-A)/(B*b), l2 = (alpha-A)/(B*a), l1 = (alpha-A)/(B*d),
/// l0 = (alpha-A)/(B*c). Otherwise the recurrence is iterated in float
/// mode until each subsequence's successive changes stay below `tol`
/// across a window of four consecutive terms.
pub fn limit_cycle(
    params: &Parameters,
    init: &InitialConditions,
    tol: f64,
    horizon: usize,
) -> Result<LimitCycle, AnalysisError> {
    let actual = regime(params)?;
    if actual != Regime::ModLess {
        return Err(AnalysisError::WrongRegime {
            expected: "|A/alpha| < 1",
            actual,
        });
    }
    let conditions = zero_conditions(params, init);
    if conditions.both() {
        let numerator = params.alpha().sub(params.cap_a())?;
        let limit_of = |seed: &Scalar| -> Result<Scalar, AnalysisError> {
            Ok(numerator.div(&params.cap_b().mul(seed)?)?)
        };
        return Ok(LimitCycle {
            l3: limit_of(init.b())?,
            l2: limit_of(init.a())?,
            l1: limit_of(init.d())?,
            l0: limit_of(init.c())?,
            exactness: CycleExactness::ExactFromZeroConditions,
        });
    }

    let trajectory = simulate(
        &params.to_float_mode(),
        &init.to_float_mode(),
        horizon,
    )?;
    let block_value = |k: i64, offset: i64| trajectory.value_at(4 * k + offset).map(Scalar::to_f64);
    let blocks_available = trajectory.last_index() / 4;
    // Settled at block k when, for each subsequence, the three successive
    // changes spanning blocks k-3..k are all below tol.
    for k in 4..=blocks_available {
        let mut settled = true;
        'offsets: for offset in [-3, -2, -1, 0] {
            for j in (k - 2)..=k {
                let (prev, cur) = match (block_value(j - 1, offset), block_value(j, offset)) {
                    (Some(p), Some(c)) => (p, c),
                    _ => {
                        settled = false;
                        break 'offsets;
                    }
                };
                // NaN-safe: a non-finite delta must read as unsettled.
                let delta = (cur - prev).abs();
                if !(delta < tol) {
                    settled = false;
                    break 'offsets;
                }
            }
        }
        if settled {
            let at = |offset: i64| Scalar::Float(block_value(k, offset).expect("in range"));
            return Ok(LimitCycle {
                l3: at(-3),
                l2: at(-2),
                l1: at(-1),
                l0: at(0),
                exactness: CycleExactness::NumericEstimate,
            });
        }
    }
    Err(AnalysisError::NoConvergenceWithinHorizon(horizon))
}

/// Checks B*l1*l3 = alpha - A and B*l0*l2 = alpha - A within `tol`.
///
/// Runs exactly when the cycle and parameters are all exact (so tol = 0 is
/// meaningful); otherwise in float arithmetic.
pub fn verify_limit_relation(
    cycle: &LimitCycle,
    params: &Parameters,
    tol: f64,
) -> Result<bool, AnalysisError> {
    if cycle.limits().iter().any(|l| l.is_zero()) {
        return Err(AnalysisError::ZeroLimit);
    }
    let all_exact = params.mode() == Mode::Exact
        && cycle.limits().iter().all(|l| l.mode() == Mode::Exact);
    if all_exact {
        let get = |s: &Scalar| s.as_exact().expect("exact mode").clone();
        let target = &get(params.alpha()) - &get(params.cap_a());
        let cap_b = get(params.cap_b());
        let residual_1 = &(&cap_b * &(&get(&cycle.l1) * &get(&cycle.l3))) - &target;
        let residual_0 = &(&cap_b * &(&get(&cycle.l0) * &get(&cycle.l2))) - &target;
        let bound = Rational::from_f64_exact(tol).ok_or(AnalysisError::NonFiniteParameter)?;
        Ok(residual_1.abs() <= bound && residual_0.abs() <= bound)
    } else {
        let target = params.alpha().to_f64() - params.cap_a().to_f64();
        let cap_b = params.cap_b().to_f64();
        let residual_1 = cap_b * cycle.l1.to_f64() * cycle.l3.to_f64() - target;
        let residual_0 = cap_b * cycle.l0.to_f64() * cycle.l2.to_f64() - target;
        Ok(residual_1.abs() <= tol && residual_0.abs() <= tol)
    }
}

/// Smallest period p <= max_period that the tail of the trajectory obeys.
///
/// Compares x_{n+p} against x_n for every n in the last third of the stored
/// values (transients excluded), within `tol`; exact trajectories with
/// tol = 0 are compared exactly. Absent when no period fits.
pub fn detect_period(traj: &Trajectory, max_period: usize, tol: f64) -> Option<usize> {
    let len = traj.len();
    let tail = (len / 3).max(2);
    let start = len - tail;
    let values: Vec<&Scalar> = traj.iter_indexed().map(|(_, v)| v).collect();
    let close = |x: &Scalar, y: &Scalar| -> bool {
        match (x, y) {
            (Scalar::Exact(p), Scalar::Exact(q)) => {
                if tol == 0.0 {
                    p == q
                } else {
                    match Rational::from_f64_exact(tol) {
                        Some(bound) => (p - q).abs() <= bound,
                        None => false,
                    }
                }
            }
            _ => {
                let (p, q) = (x.to_f64(), y.to_f64());
                p.is_finite() && q.is_finite() && (p - q).abs() <= tol
            }
        }
    };
    for period in 1..=max_period {
        if period >= tail {
            return None;
        }
        if (start..len - period).all(|i| close(values[i + period], values[i])) {
            return Some(period);
        }
    }
    None
}

/// Cross-check of the two characterizations of the A = alpha good set.
///
/// The collapsed closed form shows a pole exactly when e = A/(B*u*v) is a
/// negative integer: e = -(2k+1) forbids index 4k+1 (bd pair) or 4k+2 (ac
/// pair), and e = -(2k+2) forbids index 4k+3 (bd) or 4k+4 (ac). A commonly
/// quoted condition instead excludes e in {1} union the even integers; the
/// two disagree (for example at e = -3, forbidden, and at e = 2, fine), so
/// both answers are reported and [`GoodSetCheck::disagrees`] flags the gap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodSetCheck {
    pub e_bd: Scalar,
    pub e_ac: Scalar,
    /// Smallest forbidden index predicted from the pole characterization,
    /// absent when the solution is defined for all n.
    pub predicted_pole: Option<i64>,
    /// Whether the quoted e not-in {1} union 2Z condition calls the seeds
    /// well-defined.
    pub quoted_predicate_defined: bool,
}

impl GoodSetCheck {
    pub fn disagrees(&self) -> bool {
        self.quoted_predicate_defined != self.predicted_pole.is_none()
    }
}

/// Runs the good-set cross-check; applicable only when A = alpha and B != 0.
pub fn good_set_check(
    params: &Parameters,
    init: &InitialConditions,
) -> Result<Option<GoodSetCheck>, AnalysisError> {
    if regime(params)? != Regime::EqualPos {
        return Ok(None);
    }
    let pair_e = |u: &Scalar, v: &Scalar| -> Result<Rational, AnalysisError> {
        let buv = &finite_exact(params.cap_b())? * &(&finite_exact(u)? * &finite_exact(v)?);
        Ok(finite_exact(params.cap_a())?
            .checked_div(&buv)
            .expect("nonzero product"))
    };
    let e_bd = pair_e(init.b(), init.d())?;
    let e_ac = pair_e(init.a(), init.c())?;

    // Pole index from a negative integer e; `lane` = 1 for the bd pair
    // (indices 4k+1 / 4k+3), 2 for ac (indices 4k+2 / 4k+4).
    let pole_index = |e: &Rational, lane: i64| -> Option<i64> {
        if !e.is_negative_integer() {
            return None;
        }
        let magnitude = (-e.clone()).to_bigint()?;
        let magnitude = i64::try_from(magnitude).ok()?;
        Some(if magnitude % 2 == 1 {
            4 * ((magnitude - 1) / 2) + lane
        } else {
            4 * ((magnitude - 2) / 2) + 2 + lane
        })
    };
    let predicted_pole = [pole_index(&e_bd, 1), pole_index(&e_ac, 2)]
        .into_iter()
        .flatten()
        .min();
    let quoted_allows = |e: &Rational| -> bool {
        if e.is_one() {
            return false;
        }
        match e.to_bigint() {
            Some(v) => (v % 2u8) != num_bigint::BigInt::ZERO,
            None => true,
        }
    };
    Ok(Some(GoodSetCheck {
        quoted_predicate_defined: quoted_allows(&e_bd) && quoted_allows(&e_ac),
        e_bd: Scalar::Exact(e_bd),
        e_ac: Scalar::Exact(e_ac),
        predicted_pole,
    }))
}

/// Classifies with default options (forbidden check over 400 exact steps,
/// numeric cycle estimation at tol 1e-9 over 10,000 float steps).
pub fn classify(params: &Parameters, init: &InitialConditions) -> Result<Verdict, AnalysisError> {
    classify_with_options(params, init, &ClassifyOptions::default())
}

pub fn classify_with_options(
    params: &Parameters,
    init: &InitialConditions,
    options: &ClassifyOptions,
) -> Result<Verdict, AnalysisError> {
    if params.mode() != Mode::Exact || init.mode() != Mode::Exact {
        return Err(AnalysisError::ExactModeRequired);
    }
    let regime_kind = regime(params)?;
    let trajectory = simulate(params, init, options.check_horizon)?;
    if let TrajectoryStatus::ForbiddenAt { index } = trajectory.status() {
        return Err(AnalysisError::ForbiddenInitialConditions(index));
    }
    let conditions = zero_conditions(params, init);
    let mut notes = Vec::new();
    if conditions.both() {
        notes.push(Note::ExactPeriodFourCollapse);
    }

    let seed_cycle = || LimitCycle {
        l3: init.d().clone(),
        l2: init.c().clone(),
        l1: init.b().clone(),
        l0: init.a().clone(),
        exactness: CycleExactness::ExactFromZeroConditions,
    };
    let constant_notes = |notes: &mut Vec<Note>| {
        let (d, c, b, a) = (init.d(), init.c(), init.b(), init.a());
        if d == c && c == b && b == a {
            notes.push(Note::AllSeedsEqual);
        } else if d == b && c == a {
            notes.push(Note::TwoPrimePeriodic);
        }
    };

    let (class, witness) = match regime_kind {
        Regime::ModGreater => {
            if conditions.both() {
                constant_notes(&mut notes);
                (
                    AsymptoticClass::ConstantSubsequences,
                    Some(Witness::LimitCycle(seed_cycle())),
                )
            } else if conditions.exactly_one() {
                notes.push(Note::MixedZeroConditions);
                let zero = Scalar::zero(Mode::Exact);
                let cycle = if conditions.bd_zero {
                    LimitCycle {
                        l3: init.d().clone(),
                        l2: zero.clone(),
                        l1: init.b().clone(),
                        l0: zero,
                        exactness: CycleExactness::ExactFromZeroConditions,
                    }
                } else {
                    LimitCycle {
                        l3: zero.clone(),
                        l2: init.c().clone(),
                        l1: zero,
                        l0: init.a().clone(),
                        exactness: CycleExactness::ExactFromZeroConditions,
                    }
                };
                (
                    AsymptoticClass::ConvergesToPeriod4,
                    Some(Witness::LimitCycle(cycle)),
                )
            } else {
                (AsymptoticClass::ConvergesToZero, None)
            }
        }
        Regime::EqualPos => (AsymptoticClass::ConvergesToZero, None),
        Regime::EqualNeg => {
            let rates = growth_rates(params, init)?;
            let marginal_bd = rates.is_marginal_bd();
            let marginal_ac = rates.is_marginal_ac();
            if marginal_bd {
                notes.push(Note::MarginalRatio {
                    pair: PairSelector::Bd,
                });
            }
            if marginal_ac {
                notes.push(Note::MarginalRatio {
                    pair: PairSelector::Ac,
                });
            }
            let class = if marginal_bd || marginal_ac {
                AsymptoticClass::MarginalUnclassified
            } else {
                AsymptoticClass::Unbounded
            };
            (class, Some(Witness::GrowthRates(rates)))
        }
        Regime::ModLess => {
            match limit_cycle(params, init, options.cycle_tol, options.cycle_horizon) {
                Ok(cycle) => (
                    AsymptoticClass::ConvergesToPeriod4,
                    Some(Witness::LimitCycle(cycle)),
                ),
                Err(AnalysisError::NoConvergenceWithinHorizon(_)) => {
                    notes.push(Note::CycleEstimateUnconverged);
                    (AsymptoticClass::ConvergesToPeriod4, None)
                }
                Err(other) => return Err(other),
            }
        }
        Regime::DegenerateAlphaZero => (AsymptoticClass::ConvergesToZero, None),
        Regime::DegenerateBZero => {
            let ratio = params.alpha().div(params.cap_a())?;
            notes.push(Note::GeometricStepRatio {
                ratio: ratio.clone(),
            });
            let one = Scalar::one(ratio.mode());
            if ratio == one {
                constant_notes(&mut notes);
                (
                    AsymptoticClass::ConstantSubsequences,
                    Some(Witness::LimitCycle(seed_cycle())),
                )
            } else if ratio.neg() == one {
                notes.push(Note::PeriodEightAlternation);
                (AsymptoticClass::MarginalUnclassified, None)
            } else if ratio.to_exact().expect("exact mode").abs() < Rational::one() {
                (AsymptoticClass::ConvergesToZero, None)
            } else {
                (AsymptoticClass::Unbounded, None)
            }
        }
    };

    Ok(Verdict {
        regime: regime_kind,
        zero_conditions: conditions,
        class,
        witness,
        notes,
    })
}
