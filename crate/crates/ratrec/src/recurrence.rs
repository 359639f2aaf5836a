//! Direct iteration of x_{n+1} = alpha * x_{n-3} / (A + B * x_{n-1} * x_{n-3}).
//!
//! This module is the oracle the rest of the crate is measured against: it
//! applies the defining relation one step at a time, with an exact zero test
//! on every denominator. Forbidden initial conditions therefore surface as a
//! definite index, not a heuristic.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{
    require_same_mode, Mode, NumericsError, Rational, Scalar, DEFAULT_BIT_LIMIT,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RecurrenceError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("initial condition {0} must be nonzero")]
    ZeroInitialCondition(&'static str),
    #[error("A = 0 and B = 0 leave the denominator identically zero")]
    DegenerateUndefined,
    #[error("forbidden-index search requires exact mode")]
    FloatModeUnsupported,
}

/// The parameter triple (alpha, A, B), all in one arithmetic mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    alpha: Scalar,
    cap_a: Scalar,
    cap_b: Scalar,
}

impl Parameters {
    pub fn new(alpha: Scalar, cap_a: Scalar, cap_b: Scalar) -> Result<Self, RecurrenceError> {
        require_same_mode(&alpha, &cap_a)?;
        require_same_mode(&alpha, &cap_b)?;
        Ok(Parameters { alpha, cap_a, cap_b })
    }

    pub fn alpha(&self) -> &Scalar {
        &self.alpha
    }

    pub fn cap_a(&self) -> &Scalar {
        &self.cap_a
    }

    pub fn cap_b(&self) -> &Scalar {
        &self.cap_b
    }

    pub fn mode(&self) -> Mode {
        self.alpha.mode()
    }

    pub fn is_degenerate_alpha(&self) -> bool {
        self.alpha.is_zero()
    }

    pub fn is_degenerate_b(&self) -> bool {
        self.cap_b.is_zero()
    }

    pub fn to_float_mode(&self) -> Parameters {
        Parameters {
            alpha: self.alpha.to_float_mode(),
            cap_a: self.cap_a.to_float_mode(),
            cap_b: self.cap_b.to_float_mode(),
        }
    }
}

/// The four seeds x_{-3} = d, x_{-2} = c, x_{-1} = b, x_0 = a.
///
/// All four must be nonzero and share one arithmetic mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialConditions {
    d: Scalar,
    c: Scalar,
    b: Scalar,
    a: Scalar,
}

impl InitialConditions {
    pub fn new(d: Scalar, c: Scalar, b: Scalar, a: Scalar) -> Result<Self, RecurrenceError> {
        for (value, name) in [(&d, "d"), (&c, "c"), (&b, "b"), (&a, "a")] {
            if value.is_zero() {
                return Err(RecurrenceError::ZeroInitialCondition(name));
            }
        }
        require_same_mode(&d, &c)?;
        require_same_mode(&d, &b)?;
        require_same_mode(&d, &a)?;
        Ok(InitialConditions { d, c, b, a })
    }

    pub fn d(&self) -> &Scalar {
        &self.d
    }

    pub fn c(&self) -> &Scalar {
        &self.c
    }

    pub fn b(&self) -> &Scalar {
        &self.b
    }

    pub fn a(&self) -> &Scalar {
        &self.a
    }

    pub fn mode(&self) -> Mode {
        self.d.mode()
    }

    /// Seed at index n for -3 <= n <= 0.
    pub fn at(&self, n: i64) -> Option<&Scalar> {
        match n {
            -3 => Some(&self.d),
            -2 => Some(&self.c),
            -1 => Some(&self.b),
            0 => Some(&self.a),
            _ => None,
        }
    }

    pub fn to_float_mode(&self) -> InitialConditions {
        InitialConditions {
            d: self.d.to_float_mode(),
            c: self.c.to_float_mode(),
            b: self.b.to_float_mode(),
            a: self.a.to_float_mode(),
        }
    }

    /// Largest |seed|, in float terms.
    pub fn max_abs_f64(&self) -> f64 {
        [&self.d, &self.c, &self.b, &self.a]
            .iter()
            .map(|s| s.to_f64().abs())
            .fold(0.0, f64::max)
    }
}

/// How a simulation run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrajectoryStatus {
    /// Every requested step was computed.
    Complete,
    /// The denominator vanished at step `index`; the trajectory stops at
    /// `index - 1`.
    ForbiddenAt { index: i64 },
    /// Float mode produced a non-finite value at step `index`.
    Overflowed { index: i64 },
    /// Exact mode exceeded the bit-size guard at step `index`.
    ExactBlowupAt { index: i64 },
}

impl std::fmt::Display for TrajectoryStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TrajectoryStatus::Complete => write!(f, "Complete"),
            TrajectoryStatus::ForbiddenAt { index } => write!(f, "ForbiddenAt {index}"),
            TrajectoryStatus::Overflowed { index } => write!(f, "Overflowed {index}"),
            TrajectoryStatus::ExactBlowupAt { index } => write!(f, "ExactBlowupAt {index}"),
        }
    }
}

impl std::str::FromStr for TrajectoryStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "Complete" {
            return Ok(TrajectoryStatus::Complete);
        }
        let (word, index) = s
            .split_once(' ')
            .ok_or_else(|| format!("unrecognized trajectory status `{s}`"))?;
        let index: i64 = index
            .parse()
            .map_err(|_| format!("bad index in trajectory status `{s}`"))?;
        match word {
            "ForbiddenAt" => Ok(TrajectoryStatus::ForbiddenAt { index }),
            "Overflowed" => Ok(TrajectoryStatus::Overflowed { index }),
            "ExactBlowupAt" => Ok(TrajectoryStatus::ExactBlowupAt { index }),
            _ => Err(format!("unrecognized trajectory status `{s}`")),
        }
    }
}

/// A computed orbit: values indexed from -3 upward plus the end status.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    values: Vec<Scalar>,
    status: TrajectoryStatus,
}

impl Trajectory {
    pub fn from_parts(values: Vec<Scalar>, status: TrajectoryStatus) -> Self {
        assert!(values.len() >= 4, "a trajectory always carries its seeds");
        Trajectory { values, status }
    }

    pub const START_INDEX: i64 = -3;

    pub fn status(&self) -> TrajectoryStatus {
        self.status
    }

    /// Number of stored values, seeds included.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest index that holds a value.
    pub fn last_index(&self) -> i64 {
        Self::START_INDEX + self.values.len() as i64 - 1
    }

    /// Value at index n, if n is within [-3, last_index].
    pub fn value_at(&self, n: i64) -> Option<&Scalar> {
        if n < Self::START_INDEX {
            return None;
        }
        self.values.get((n - Self::START_INDEX) as usize)
    }

    /// (index, value) pairs from -3 upward.
    pub fn iter_indexed(&self) -> impl Iterator<Item = (i64, &Scalar)> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| (Self::START_INDEX + i as i64, v))
    }

    pub fn mode(&self) -> Mode {
        self.values[0].mode()
    }
}

/// The step denominator A + B * x_{n-1} * x_{n-3}.
pub fn denominator(
    params: &Parameters,
    x_prev1: &Scalar,
    x_prev3: &Scalar,
) -> Result<Scalar, RecurrenceError> {
    let product = x_prev1.mul(x_prev3)?;
    Ok(params.cap_a().add(&params.cap_b().mul(&product)?)?)
}

/// One application of the defining relation.
pub fn step(
    params: &Parameters,
    x_prev1: &Scalar,
    x_prev3: &Scalar,
) -> Result<Scalar, RecurrenceError> {
    let den = denominator(params, x_prev1, x_prev3)?;
    Ok(params.alpha().mul(x_prev3)?.div(&den)?)
}

/// Iterates the recurrence for `horizon` steps with the default bit guard.
pub fn simulate(
    params: &Parameters,
    init: &InitialConditions,
    horizon: usize,
) -> Result<Trajectory, RecurrenceError> {
    simulate_with_limit(params, init, horizon, DEFAULT_BIT_LIMIT)
}

/// Iterates the recurrence for `horizon` steps.
///
/// The trajectory starts at the seeds and ends either at index `horizon`
/// (status `Complete`) or just before the first step that failed: a zero
/// denominator (`ForbiddenAt`), a non-finite float value (`Overflowed`), or
/// an exact value past `bit_limit` (`ExactBlowupAt`).
pub fn simulate_with_limit(
    params: &Parameters,
    init: &InitialConditions,
    horizon: usize,
    bit_limit: u64,
) -> Result<Trajectory, RecurrenceError> {
    let mode = params.mode();
    if require_same_mode(params.alpha(), init.d()).is_err() {
        return Err(NumericsError::ModeMismatch.into());
    }
    if params.cap_a().is_zero() && params.cap_b().is_zero() {
        return Err(RecurrenceError::DegenerateUndefined);
    }
    match mode {
        Mode::Exact => simulate_exact(params, init, horizon, bit_limit),
        Mode::Float => simulate_float(params, init, horizon),
    }
}

fn simulate_exact(
    params: &Parameters,
    init: &InitialConditions,
    horizon: usize,
    bit_limit: u64,
) -> Result<Trajectory, RecurrenceError> {
    let take = |s: &Scalar| s.as_exact().expect("exact mode").clone();
    let (alpha, cap_a, cap_b) = (
        take(params.alpha()),
        take(params.cap_a()),
        take(params.cap_b()),
    );
    let mut values: Vec<Rational> = vec![
        take(init.d()),
        take(init.c()),
        take(init.b()),
        take(init.a()),
    ];
    let mut status = TrajectoryStatus::Complete;
    for n in 1..=horizon {
        // x_{n-1} sits at offset n+1, x_{n-3} at offset n-1.
        let prev1 = &values[n + 1];
        let prev3 = &values[n - 1];
        let den = &cap_a + &(&cap_b * &(prev1 * prev3));
        if den.is_zero() {
            status = TrajectoryStatus::ForbiddenAt { index: n as i64 };
            break;
        }
        let next = (&alpha * prev3).checked_div(&den).expect("nonzero divisor");
        if next.check_bits(bit_limit).is_err() {
            status = TrajectoryStatus::ExactBlowupAt { index: n as i64 };
            break;
        }
        values.push(next);
    }
    Ok(Trajectory {
        values: values.into_iter().map(Scalar::Exact).collect(),
        status,
    })
}

fn simulate_float(
    params: &Parameters,
    init: &InitialConditions,
    horizon: usize,
) -> Result<Trajectory, RecurrenceError> {
    let (alpha, cap_a, cap_b) = (
        params.alpha().to_f64(),
        params.cap_a().to_f64(),
        params.cap_b().to_f64(),
    );
    let mut values: Vec<f64> = vec![
        init.d().to_f64(),
        init.c().to_f64(),
        init.b().to_f64(),
        init.a().to_f64(),
    ];
    let mut status = TrajectoryStatus::Complete;
    for n in 1..=horizon {
        let prev1 = values[n + 1];
        let prev3 = values[n - 1];
        let den = cap_a + cap_b * (prev1 * prev3);
        if den == 0.0 {
            status = TrajectoryStatus::ForbiddenAt { index: n as i64 };
            break;
        }
        let next = alpha * prev3 / den;
        if !next.is_finite() {
            status = TrajectoryStatus::Overflowed { index: n as i64 };
            break;
        }
        values.push(next);
    }
    Ok(Trajectory {
        values: values.into_iter().map(Scalar::Float).collect(),
        status,
    })
}

/// Smallest index k <= horizon whose step denominator vanishes, if any.
///
/// Exact mode only: a float zero test would conflate underflow with a true
/// zero. A run that trips the bit guard before reaching a zero denominator
/// reports `None` for the range it managed to cover.
pub fn first_forbidden_index(
    params: &Parameters,
    init: &InitialConditions,
    horizon: usize,
) -> Result<Option<i64>, RecurrenceError> {
    if params.mode() != Mode::Exact || init.mode() != Mode::Exact {
        return Err(RecurrenceError::FloatModeUnsupported);
    }
    let trajectory = simulate(params, init, horizon)?;
    match trajectory.status() {
        TrajectoryStatus::ForbiddenAt { index } => Ok(Some(index)),
        _ => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn exact_params(alpha: (i64, i64), a: (i64, i64), b: (i64, i64)) -> Parameters {
        Parameters::new(
            Scalar::exact_ratio(alpha.0, alpha.1),
            Scalar::exact_ratio(a.0, a.1),
            Scalar::exact_ratio(b.0, b.1),
        )
        .unwrap()
    }

    pub(crate) fn exact_init(
        d: (i64, i64),
        c: (i64, i64),
        b: (i64, i64),
        a: (i64, i64),
    ) -> InitialConditions {
        InitialConditions::new(
            Scalar::exact_ratio(d.0, d.1),
            Scalar::exact_ratio(c.0, c.1),
            Scalar::exact_ratio(b.0, b.1),
            Scalar::exact_ratio(a.0, a.1),
        )
        .unwrap()
    }

    #[test]
    fn step_matches_hand_computation() {
        // alpha=1, A=2, B=1, x_{n-1} = x_{n-3} = 1 gives 1/(2+1) = 1/3.
        let params = exact_params((1, 1), (2, 1), (1, 1));
        let one = Scalar::exact_int(1);
        assert_eq!(step(&params, &one, &one).unwrap(), Scalar::exact_ratio(1, 3));
        assert_eq!(
            denominator(&params, &one, &one).unwrap(),
            Scalar::exact_int(3)
        );
    }

    #[test]
    fn step_rejects_zero_denominator() {
        // A=1, B=1, product = -1.
        let params = exact_params((1, 1), (1, 1), (1, 1));
        let err = step(&params, &Scalar::exact_int(1), &Scalar::exact_int(-1));
        assert_eq!(
            err,
            Err(RecurrenceError::Numerics(NumericsError::DivisionByZero))
        );
    }

    #[test]
    fn all_ones_trajectory_follows_known_prefix() {
        // alpha=A=B=1 with unit seeds: x_1 = 1/2, x_2 = 1/2, x_3 = 2/3, ...
        let params = exact_params((1, 1), (1, 1), (1, 1));
        let init = exact_init((1, 1), (1, 1), (1, 1), (1, 1));
        let traj = simulate(&params, &init, 5).unwrap();
        assert_eq!(traj.status(), TrajectoryStatus::Complete);
        assert_eq!(traj.value_at(1).unwrap(), &Scalar::exact_ratio(1, 2));
        assert_eq!(traj.value_at(2).unwrap(), &Scalar::exact_ratio(1, 2));
        assert_eq!(traj.value_at(3).unwrap(), &Scalar::exact_ratio(2, 3));
        assert_eq!(traj.value_at(4).unwrap(), &Scalar::exact_ratio(2, 3));
        assert_eq!(traj.value_at(5).unwrap(), &Scalar::exact_ratio(3, 8));
    }

    #[test]
    fn geometric_subsequences_when_b_is_zero() {
        // B=0 reduces each step to x_{n+1} = (alpha/A) x_{n-3}.
        let params = exact_params((2, 1), (1, 1), (0, 1));
        let init = exact_init((1, 1), (1, 1), (1, 1), (1, 1));
        let traj = simulate(&params, &init, 5).unwrap();
        for n in 1..=4 {
            assert_eq!(traj.value_at(n).unwrap(), &Scalar::exact_int(2), "n={n}");
        }
        assert_eq!(traj.value_at(5).unwrap(), &Scalar::exact_int(4));
    }

    #[test]
    fn forbidden_at_first_step_when_first_denominator_vanishes() {
        // A + B*b*d = 1 + 1*1*(-1) = 0.
        let params = exact_params((1, 1), (1, 1), (1, 1));
        let init = exact_init((-1, 1), (1, 1), (1, 1), (1, 1));
        let traj = simulate(&params, &init, 10).unwrap();
        assert_eq!(traj.status(), TrajectoryStatus::ForbiddenAt { index: 1 });
        assert_eq!(traj.last_index(), 0);
        assert_eq!(
            first_forbidden_index(&params, &init, 10).unwrap(),
            Some(1)
        );
    }

    #[test]
    fn degenerate_parameters_are_rejected() {
        let params = exact_params((1, 1), (0, 1), (0, 1));
        let init = exact_init((1, 1), (1, 1), (1, 1), (1, 1));
        assert_eq!(
            simulate(&params, &init, 3),
            Err(RecurrenceError::DegenerateUndefined)
        );
    }

    #[test]
    fn zero_seed_is_rejected_by_name() {
        let err = InitialConditions::new(
            Scalar::exact_int(1),
            Scalar::exact_int(0),
            Scalar::exact_int(1),
            Scalar::exact_int(1),
        );
        assert_eq!(err, Err(RecurrenceError::ZeroInitialCondition("c")));
    }

    #[test]
    fn alpha_zero_sends_everything_to_zero() {
        let params = exact_params((0, 1), (3, 1), (1, 2));
        let init = exact_init((1, 1), (2, 1), (3, 1), (4, 1));
        let traj = simulate(&params, &init, 8).unwrap();
        assert_eq!(traj.status(), TrajectoryStatus::Complete);
        for n in 1..=8 {
            assert!(traj.value_at(n).unwrap().is_zero(), "n={n}");
        }
    }

    #[test]
    fn defining_relation_holds_along_exact_trajectories() {
        let params = exact_params((3, 2), (-2, 3), (5, 7));
        let init = exact_init((1, 2), (-2, 1), (4, 3), (-1, 5));
        let traj = simulate(&params, &init, 60).unwrap();
        assert_eq!(traj.status(), TrajectoryStatus::Complete);
        for n in 1..=60 {
            let expected = step(
                &params,
                traj.value_at(n - 2).unwrap(),
                traj.value_at(n - 4).unwrap(),
            )
            .unwrap();
            assert_eq!(traj.value_at(n).unwrap(), &expected, "n={n}");
        }
    }

    #[test]
    fn float_mode_detects_overflow() {
        // alpha=-1, A=1, B=1, unit seeds: |x_{4n-1}| = 2^n blows past f64 range.
        let params = exact_params((-1, 1), (1, 1), (1, 1)).to_float_mode();
        let init = exact_init((1, 1), (1, 1), (1, 1), (1, 1)).to_float_mode();
        let traj = simulate(&params, &init, 8000).unwrap();
        match traj.status() {
            TrajectoryStatus::Overflowed { index } => assert!(index > 100),
            other => panic!("expected overflow, got {other}"),
        }
    }

    #[test]
    fn bit_guard_interrupts_exact_growth() {
        let params = exact_params((-1, 1), (1, 1), (1, 1));
        let init = exact_init((1, 1), (1, 1), (1, 1), (1, 1));
        let traj = simulate_with_limit(&params, &init, 10_000, 256).unwrap();
        match traj.status() {
            TrajectoryStatus::ExactBlowupAt { index } => {
                assert!(index > 4, "guard tripped too early at {index}")
            }
            other => panic!("expected blowup, got {other}"),
        }
    }

    #[test]
    fn float_forbidden_when_denominator_is_exactly_zero() {
        let params = exact_params((1, 1), (1, 1), (1, 1)).to_float_mode();
        let init = exact_init((-1, 1), (1, 1), (1, 1), (1, 1)).to_float_mode();
        let traj = simulate(&params, &init, 10).unwrap();
        assert_eq!(traj.status(), TrajectoryStatus::ForbiddenAt { index: 1 });
    }

    #[test]
    fn first_forbidden_index_requires_exact_mode() {
        let params = exact_params((1, 1), (1, 1), (1, 1)).to_float_mode();
        let init = exact_init((1, 1), (1, 1), (1, 1), (1, 1)).to_float_mode();
        assert_eq!(
            first_forbidden_index(&params, &init, 10),
            Err(RecurrenceError::FloatModeUnsupported)
        );
    }

    #[test]
    fn trajectory_indexing_is_consistent() {
        let params = exact_params((1, 1), (1, 1), (1, 1));
        let init = exact_init((1, 1), (2, 1), (3, 1), (4, 1));
        let traj = simulate(&params, &init, 6).unwrap();
        assert_eq!(traj.last_index(), 6);
        assert_eq!(traj.len(), 10);
        assert_eq!(traj.value_at(-3).unwrap(), init.d());
        assert_eq!(traj.value_at(0).unwrap(), init.a());
        assert!(traj.value_at(-4).is_none());
        assert!(traj.value_at(7).is_none());
        let collected: Vec<i64> = traj.iter_indexed().map(|(n, _)| n).collect();
        assert_eq!(collected.first(), Some(&-3));
        assert_eq!(collected.last(), Some(&6));
    }

    #[test]
    fn status_strings_round_trip() {
        for status in [
            TrajectoryStatus::Complete,
            TrajectoryStatus::ForbiddenAt { index: 3 },
            TrajectoryStatus::Overflowed { index: 17 },
            TrajectoryStatus::ExactBlowupAt { index: 9 },
        ] {
            let text = status.to_string();
            assert_eq!(text.parse::<TrajectoryStatus>().unwrap(), status);
        }
    }
}
