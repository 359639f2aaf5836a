//! Seeded randomized equivalence sweeps: brute-force iteration versus the
//! closed forms, across parameter regimes.
//!
//! One 64-bit seed pins the whole sweep. Each trial draws from its own
//! ChaCha stream (stream = trial index), so reports are reproducible
//! byte-for-byte on any machine and trials could be distributed without
//! changing the outcome.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{good_set_check, Regime};
use crate::closedform::closed_form_scan;
use crate::numerics::{Rational, Scalar};
use crate::recurrence::{simulate, InitialConditions, Parameters, Trajectory, TrajectoryStatus};

/// Which regimes a sweep should draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeFilter {
    All,
    ModGreater,
    EqualPos,
    EqualNeg,
    ModLess,
}

impl RegimeFilter {
    pub const TOKENS: [&'static str; 5] = ["all", "gt", "eq+", "eq-", "lt"];
}

impl std::str::FromStr for RegimeFilter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(RegimeFilter::All),
            "gt" => Ok(RegimeFilter::ModGreater),
            "eq+" => Ok(RegimeFilter::EqualPos),
            "eq-" => Ok(RegimeFilter::EqualNeg),
            "lt" => Ok(RegimeFilter::ModLess),
            other => Err(format!(
                "unknown regime {other:?}; expected one of {}",
                Self::TOKENS.join(", ")
            )),
        }
    }
}

impl std::fmt::Display for RegimeFilter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let token = match self {
            RegimeFilter::All => "all",
            RegimeFilter::ModGreater => "gt",
            RegimeFilter::EqualPos => "eq+",
            RegimeFilter::EqualNeg => "eq-",
            RegimeFilter::ModLess => "lt",
        };
        write!(f, "{token}")
    }
}

/// Uniform nonzero rational: numerator in [-9,9]\{0}, denominator in [1,9].
pub fn random_rational(rng: &mut impl Rng) -> Rational {
    let numer = loop {
        let candidate: i64 = rng.random_range(-9..=9);
        if candidate != 0 {
            break candidate;
        }
    };
    let denom: i64 = rng.random_range(1..=9);
    Rational::ratio(numer, denom)
}

fn draw_regime(rng: &mut impl Rng, filter: RegimeFilter) -> Regime {
    match filter {
        RegimeFilter::ModGreater => Regime::ModGreater,
        RegimeFilter::EqualPos => Regime::EqualPos,
        RegimeFilter::EqualNeg => Regime::EqualNeg,
        RegimeFilter::ModLess => Regime::ModLess,
        RegimeFilter::All => match rng.random_range(0..4u8) {
            0 => Regime::ModGreater,
            1 => Regime::EqualPos,
            2 => Regime::EqualNeg,
            _ => Regime::ModLess,
        },
    }
}

/// One constructive parameter draw in the requested regime.
///
/// The equality regimes are built directly (A := alpha or A := -alpha);
/// the strict-modulus regimes redraw the (alpha, A) pair until the
/// comparison holds. B is always nonzero.
pub fn random_parameters(rng: &mut impl Rng, filter: RegimeFilter) -> (Parameters, Regime) {
    let target = draw_regime(rng, filter);
    let cap_b = Scalar::Exact(random_rational(rng));
    let (alpha, cap_a) = match target {
        Regime::EqualPos => {
            let alpha = random_rational(rng);
            (alpha.clone(), alpha)
        }
        Regime::EqualNeg => {
            let alpha = random_rational(rng);
            let neg = -&alpha;
            (alpha, neg)
        }
        Regime::ModGreater => loop {
            let alpha = random_rational(rng);
            let cap_a = random_rational(rng);
            if cap_a.abs() > alpha.abs() {
                break (alpha, cap_a);
            }
        },
        Regime::ModLess => loop {
            let alpha = random_rational(rng);
            let cap_a = random_rational(rng);
            if cap_a.abs() < alpha.abs() {
                break (alpha, cap_a);
            }
        },
        Regime::DegenerateAlphaZero | Regime::DegenerateBZero => {
            unreachable!("sweeps draw only the four nondegenerate regimes")
        }
    };
    let params = Parameters::new(Scalar::Exact(alpha), Scalar::Exact(cap_a), cap_b)
        .expect("draws are same-mode");
    (params, target)
}

/// Four nonzero random seeds.
pub fn random_seeds(rng: &mut impl Rng) -> InitialConditions {
    InitialConditions::new(
        Scalar::Exact(random_rational(rng)),
        Scalar::Exact(random_rational(rng)),
        Scalar::Exact(random_rational(rng)),
        Scalar::Exact(random_rational(rng)),
    )
    .expect("draws are nonzero")
}

/// An accepted draw: scenario plus its exact check trajectory.
#[derive(Debug, Clone)]
pub struct Draw {
    pub params: Parameters,
    pub init: InitialConditions,
    pub regime: Regime,
    pub trajectory: Trajectory,
}

/// Draws until the exact trajectory is Complete through `check_horizon`.
pub fn random_scenario(rng: &mut impl Rng, filter: RegimeFilter, check_horizon: usize) -> Draw {
    for _ in 0..10_000 {
        let (params, regime) = random_parameters(rng, filter);
        let init = random_seeds(rng);
        let trajectory = simulate(&params, &init, check_horizon).expect("exact mode simulation");
        if trajectory.status() == TrajectoryStatus::Complete {
            return Draw {
                params,
                init,
                regime,
                trajectory,
            };
        }
    }
    unreachable!("forbidden draws are measure-rare; 10000 rejections means a bug")
}

/// First divergence found in a trial, with everything needed to replay it.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub trial: u64,
    pub index: i64,
    pub scenario: String,
    pub oracle: String,
    pub closed_form: String,
}

/// Outcome of a randomized equivalence sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub seed: u64,
    pub horizon: usize,
    pub trials: u64,
    pub matched_trials: u64,
    /// Trials per regime, ordered gt, eq+, eq-, lt.
    pub regime_counts: [u64; 4],
    pub first_counterexample: Option<Counterexample>,
    /// A = alpha draws examined by the good-set cross-check, including
    /// draws that were rejected for hitting a forbidden index.
    pub good_set_checked: u64,
    /// Draws where the quoted good-set predicate contradicts the pole map.
    pub good_set_quoted_disagreements: u64,
    /// Draws where the pole map and the iteration oracle disagree. Any
    /// nonzero count is a failure.
    pub good_set_pole_mismatches: u64,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.matched_trials == self.trials && self.good_set_pole_mismatches == 0
    }

    /// Deterministic multi-line text report; the final line is the
    /// `matched/trials exact matches` summary.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("seed: {}\n", self.seed));
        out.push_str(&format!("horizon: {}\n", self.horizon));
        out.push_str(&format!(
            "regimes: gt={} eq+={} eq-={} lt={}\n",
            self.regime_counts[0],
            self.regime_counts[1],
            self.regime_counts[2],
            self.regime_counts[3]
        ));
        if self.good_set_checked > 0 {
            out.push_str(&format!(
                "good-set cross-check: {} draws, quoted-predicate disagreements: {}, pole-map mismatches: {}\n",
                self.good_set_checked,
                self.good_set_quoted_disagreements,
                self.good_set_pole_mismatches
            ));
        }
        match &self.first_counterexample {
            None => out.push_str("first counterexample: none\n"),
            Some(ce) => {
                out.push_str(&format!(
                    "first counterexample: trial {}, n={}\n  scenario: {}\n  oracle: {}\n  closed form: {}\n",
                    ce.trial, ce.index, ce.scenario, ce.oracle, ce.closed_form
                ));
            }
        }
        out.push_str(&format!(
            "{}/{} exact matches\n",
            self.matched_trials, self.trials
        ));
        out
    }
}

fn regime_slot(regime: Regime) -> usize {
    match regime {
        Regime::ModGreater => 0,
        Regime::EqualPos => 1,
        Regime::EqualNeg => 2,
        Regime::ModLess => 3,
        Regime::DegenerateAlphaZero | Regime::DegenerateBZero => {
            unreachable!("sweeps draw only the four nondegenerate regimes")
        }
    }
}

fn describe_scenario(params: &Parameters, init: &InitialConditions) -> String {
    format!(
        "alpha={} A={} B={} a={} b={} c={} d={}",
        params.alpha(),
        params.cap_a(),
        params.cap_b(),
        init.a(),
        init.b(),
        init.c(),
        init.d()
    )
}

/// Checks the A = alpha pole characterization against the oracle and the
/// quoted predicate on one draw, updating the report tallies.
fn tally_good_set(
    report: &mut VerifyReport,
    params: &Parameters,
    init: &InitialConditions,
    trajectory: &Trajectory,
    horizon: usize,
) {
    let check = match good_set_check(params, init) {
        Ok(Some(check)) => check,
        _ => return,
    };
    report.good_set_checked += 1;
    if check.disagrees() {
        report.good_set_quoted_disagreements += 1;
    }
    let oracle = match trajectory.status() {
        TrajectoryStatus::ForbiddenAt { index } => Some(index),
        _ => None,
    };
    let predicted = check.predicted_pole.filter(|k| *k <= horizon as i64);
    if predicted != oracle {
        report.good_set_pole_mismatches += 1;
    }
}

/// Runs `trials` seeded random scenarios and compares every closed-form
/// term against the exact iteration oracle, index by index.
pub fn run_verify(trials: u64, seed: u64, horizon: usize, filter: RegimeFilter) -> VerifyReport {
    let mut report = VerifyReport {
        seed,
        horizon,
        trials,
        matched_trials: 0,
        regime_counts: [0; 4],
        first_counterexample: None,
        good_set_checked: 0,
        good_set_quoted_disagreements: 0,
        good_set_pole_mismatches: 0,
    };
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        // Rejection loop with the good-set tally observing every A = alpha
        // draw, accepted or not.
        let draw = loop {
            let (params, regime) = random_parameters(&mut rng, filter);
            let init = random_seeds(&mut rng);
            let trajectory = simulate(&params, &init, horizon).expect("exact mode simulation");
            tally_good_set(&mut report, &params, &init, &trajectory, horizon);
            if trajectory.status() == TrajectoryStatus::Complete {
                break Draw {
                    params,
                    init,
                    regime,
                    trajectory,
                };
            }
        };
        report.regime_counts[regime_slot(draw.regime)] += 1;

        let mut mismatch = None;
        match closed_form_scan(&draw.params, &draw.init, horizon as i64) {
            Ok(terms) => {
                for (i, term) in terms.iter().enumerate() {
                    let index = i as i64 + 1;
                    let oracle = draw.trajectory.value_at(index).expect("complete trajectory");
                    if oracle != term {
                        mismatch = Some((index, oracle.to_string(), term.to_string()));
                        break;
                    }
                }
            }
            Err(err) => {
                // The oracle completed, so any closed-form failure is a
                // divergence in itself.
                mismatch = Some((0, "defined for all checked n".into(), format!("error: {err}")));
            }
        }
        match mismatch {
            None => report.matched_trials += 1,
            Some((index, oracle, closed_form)) => {
                if report.first_counterexample.is_none() {
                    report.first_counterexample = Some(Counterexample {
                        trial,
                        index,
                        scenario: describe_scenario(&draw.params, &draw.init),
                        oracle,
                        closed_form,
                    });
                }
            }
        }
    }
    report
}
