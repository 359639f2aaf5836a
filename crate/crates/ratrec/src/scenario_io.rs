//! Scenario files, the bundled example registry, and trajectory export.
//!
//! A scenario is a JSON document pairing the recurrence parameters and seeds
//! with a horizon and an arithmetic mode. All numbers travel as strings
//! ("0.64", "16/25", "-4") and are stored exactly; a float-mode scenario is
//! converted at the moment the consumer asks for effective inputs, never at
//! parse time, so "0.64" always means 16/25 rather than its nearest double.
//!
//! Trajectory exports are a small CSV dialect (one row per index, `#` status
//! trailer) and a standalone SVG line chart. Both are deterministic,
//! timestamp-free text formats that tests can compare byte-for-byte.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{rat_from_string, Mode, Rational, Scalar};
use crate::recurrence::{InitialConditions, Parameters, Trajectory, TrajectoryStatus};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScenarioIoError {
    #[error("malformed scenario: {0}")]
    MalformedScenario(String),
    #[error("unknown example id {0}; known ids are 1 through 4")]
    UnknownExample(u32),
    #[error("plotting requires at least 2 points")]
    TooFewPoints,
    #[error("malformed csv: {0}")]
    MalformedCsv(String),
}

/// A fully specified run: parameters, seeds, horizon, and arithmetic mode.
///
/// Numbers are stored exactly regardless of mode; [`Scenario::effective_params`]
/// and [`Scenario::effective_init`] perform the float conversion on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    params: Parameters,
    init: InitialConditions,
    horizon: usize,
    mode: Mode,
    label: String,
}

impl Scenario {
    pub fn new(
        params: Parameters,
        init: InitialConditions,
        horizon: usize,
        mode: Mode,
        label: impl Into<String>,
    ) -> Result<Self, ScenarioIoError> {
        if horizon == 0 {
            return Err(ScenarioIoError::MalformedScenario(
                "horizon must be at least 1".into(),
            ));
        }
        if params.mode() != Mode::Exact || init.mode() != Mode::Exact {
            return Err(ScenarioIoError::MalformedScenario(
                "scenario numbers are stored exactly; convert via mode instead".into(),
            ));
        }
        Ok(Scenario {
            params,
            init,
            horizon,
            mode,
            label: label.into(),
        })
    }

    /// Exact parameters as stored, regardless of mode.
    pub fn params(&self) -> &Parameters {
        &self.params
    }

    /// Exact initial conditions as stored, regardless of mode.
    pub fn init(&self) -> &InitialConditions {
        &self.init
    }

    /// Parameters in the scenario's arithmetic mode.
    pub fn effective_params(&self) -> Parameters {
        match self.mode {
            Mode::Exact => self.params.clone(),
            Mode::Float => self.params.to_float_mode(),
        }
    }

    /// Initial conditions in the scenario's arithmetic mode.
    pub fn effective_init(&self) -> InitialConditions {
        match self.mode {
            Mode::Exact => self.init.clone(),
            Mode::Float => self.init.to_float_mode(),
        }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Same scenario with a different horizon.
    pub fn with_horizon(mut self, horizon: usize) -> Result<Self, ScenarioIoError> {
        if horizon == 0 {
            return Err(ScenarioIoError::MalformedScenario(
                "horizon must be at least 1".into(),
            ));
        }
        self.horizon = horizon;
        Ok(self)
    }

    /// Same scenario with a different arithmetic mode.
    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }
}

/// JSON wire form. Numbers are strings so that decimal inputs stay exact.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    alpha: String,
    #[serde(rename = "A")]
    cap_a: String,
    #[serde(rename = "B")]
    cap_b: String,
    a: String,
    b: String,
    c: String,
    d: String,
    horizon: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

fn parse_number(field: &str, text: &str) -> Result<Scalar, ScenarioIoError> {
    let value: Rational = rat_from_string(text)
        .map_err(|e| ScenarioIoError::MalformedScenario(format!("field {field}: {e}")))?;
    Ok(Scalar::Exact(value))
}

/// Parses a scenario from its JSON document form.
///
/// All seven numeric fields are required strings; `horizon` is a required
/// positive integer; `mode` defaults to `"exact"` and `label` to empty.
/// Unknown fields, zero seeds, and unparseable numbers are all rejected.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioIoError> {
    let doc: ScenarioDoc = serde_json::from_str(text)
        .map_err(|e| ScenarioIoError::MalformedScenario(e.to_string()))?;
    let params = Parameters::new(
        parse_number("alpha", &doc.alpha)?,
        parse_number("A", &doc.cap_a)?,
        parse_number("B", &doc.cap_b)?,
    )
    .map_err(|e| ScenarioIoError::MalformedScenario(e.to_string()))?;
    let init = InitialConditions::new(
        parse_number("d", &doc.d)?,
        parse_number("c", &doc.c)?,
        parse_number("b", &doc.b)?,
        parse_number("a", &doc.a)?,
    )
    .map_err(|e| ScenarioIoError::MalformedScenario(e.to_string()))?;
    let horizon = usize::try_from(doc.horizon)
        .map_err(|_| ScenarioIoError::MalformedScenario("horizon out of range".into()))?;
    let mode = match doc.mode.as_deref() {
        None | Some("exact") => Mode::Exact,
        Some("float") => Mode::Float,
        Some(other) => {
            return Err(ScenarioIoError::MalformedScenario(format!(
                "mode must be \"exact\" or \"float\", got \"{other}\""
            )))
        }
    };
    Scenario::new(params, init, horizon, mode, doc.label.unwrap_or_default())
}

/// Renders a scenario back to its JSON document form.
///
/// Numbers are written as exact `p/q` strings, so
/// `parse_scenario(render_scenario(s)) == s` for every scenario.
pub fn render_scenario(scenario: &Scenario) -> String {
    let exact = |s: &Scalar| s.as_exact().expect("scenario storage is exact").to_string();
    let doc = ScenarioDoc {
        alpha: exact(scenario.params.alpha()),
        cap_a: exact(scenario.params.cap_a()),
        cap_b: exact(scenario.params.cap_b()),
        a: exact(scenario.init.a()),
        b: exact(scenario.init.b()),
        c: exact(scenario.init.c()),
        d: exact(scenario.init.d()),
        horizon: scenario.horizon as u64,
        mode: Some(scenario.mode.to_string()),
        label: if scenario.label.is_empty() {
            None
        } else {
            Some(scenario.label.clone())
        },
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("plain data serializes");
    text.push('\n');
    text
}

/// The four bundled worked examples, one per parameter regime of interest.
///
/// Each comes with the default horizon of 400 and exact-rational data:
///
/// | id | alpha | A     | B  | a    | b   | c     | d    | behaviour          |
/// |----|-------|-------|----|------|-----|-------|------|--------------------|
/// | 1  | 1     | 21/20 | 1  | 3    | -4  | 2     | -1   | decays to zero     |
/// | 2  | 1     | 9     | -2 | 2    | -2  | 2     | -2   | constant pairs     |
/// | 3  | -1/2  | 1/2   | 1  | 1/10 | 1/5 | 3/10  | -2/5 | unbounded          |
/// | 4  | 1     | 16/25 | 1  | -6/5 | 2/5 | -3/10 | 9/10 | period-4 cycle     |
pub fn paper_example(id: u32) -> Result<Scenario, ScenarioIoError> {
    let r = Scalar::exact_ratio;
    let (alpha, cap_a, cap_b, a, b, c, d) = match id {
        1 => (r(1, 1), r(21, 20), r(1, 1), r(3, 1), r(-4, 1), r(2, 1), r(-1, 1)),
        2 => (r(1, 1), r(9, 1), r(-2, 1), r(2, 1), r(-2, 1), r(2, 1), r(-2, 1)),
        3 => (
            r(-1, 2),
            r(1, 2),
            r(1, 1),
            r(1, 10),
            r(1, 5),
            r(3, 10),
            r(-2, 5),
        ),
        4 => (
            r(1, 1),
            r(16, 25),
            r(1, 1),
            r(-6, 5),
            r(2, 5),
            r(-3, 10),
            r(9, 10),
        ),
        other => return Err(ScenarioIoError::UnknownExample(other)),
    };
    let params = Parameters::new(alpha, cap_a, cap_b).expect("example parameters are valid");
    let init = InitialConditions::new(d, c, b, a).expect("example seeds are nonzero");
    Scenario::new(params, init, 400, Mode::Exact, format!("example {id}"))
}

/// Serializes a trajectory as CSV: header `n,exact,float`, one row per
/// index from -3, and a `# status=...` trailer line.
///
/// The exact column holds the reduced `p/q` form and is empty for float
/// trajectories; the float column holds the shortest decimal that parses
/// back to the same double. Row count is always trajectory length + 2.
pub fn export_csv(traj: &Trajectory) -> String {
    let mut out = String::from("n,exact,float\n");
    for (n, value) in traj.iter_indexed() {
        match value {
            Scalar::Exact(q) => {
                out.push_str(&format!("{n},{q},{}\n", q.to_f64()));
            }
            Scalar::Float(x) => {
                out.push_str(&format!("{n},,{x}\n"));
            }
        }
    }
    out.push_str(&format!("# status={}\n", traj.status()));
    out
}

/// Parses the CSV dialect written by [`export_csv`] back to a trajectory.
pub fn parse_csv(text: &str) -> Result<Trajectory, ScenarioIoError> {
    let bad = |msg: String| ScenarioIoError::MalformedCsv(msg);
    let mut lines = text.lines();
    match lines.next() {
        Some("n,exact,float") => {}
        other => return Err(bad(format!("expected header n,exact,float, got {other:?}"))),
    }
    let mut values = Vec::new();
    let mut status = None;
    let mut expected_n = Trajectory::START_INDEX;
    for line in lines {
        if let Some(rest) = line.strip_prefix("# status=") {
            status = Some(
                rest.parse::<TrajectoryStatus>()
                    .map_err(|e| bad(format!("bad status line: {e}")))?,
            );
            break;
        }
        let mut fields = line.splitn(3, ',');
        let (n_text, exact_text, float_text) =
            match (fields.next(), fields.next(), fields.next()) {
                (Some(n), Some(e), Some(f)) => (n, e, f),
                _ => return Err(bad(format!("row has fewer than 3 fields: {line:?}"))),
            };
        let n: i64 = n_text
            .parse()
            .map_err(|_| bad(format!("bad index {n_text:?}")))?;
        if n != expected_n {
            return Err(bad(format!("expected index {expected_n}, got {n}")));
        }
        expected_n += 1;
        let value = if exact_text.is_empty() {
            let x: f64 = float_text
                .parse()
                .map_err(|_| bad(format!("bad float value {float_text:?}")))?;
            Scalar::Float(x)
        } else {
            Scalar::Exact(
                rat_from_string(exact_text)
                    .map_err(|e| bad(format!("bad exact value {exact_text:?}: {e}")))?,
            )
        };
        values.push(value);
    }
    let status = status.ok_or_else(|| bad("missing # status= trailer".into()))?;
    if values.len() < 4 {
        return Err(bad(format!(
            "trajectory needs at least the 4 seed rows, got {}",
            values.len()
        )));
    }
    Ok(Trajectory::from_parts(values, status))
}

const PLOT_WIDTH: f64 = 800.0;
const PLOT_HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 48.0;
const MARGIN_BOTTOM: f64 = 52.0;

/// Step size 1, 2, or 5 times a power of ten giving about `target` ticks.
fn nice_step(range: f64, target: f64) -> f64 {
    let raw = range / target;
    let power = 10f64.powf(raw.abs().log10().floor());
    let scaled = raw / power;
    let factor = if scaled <= 1.0 {
        1.0
    } else if scaled <= 2.0 {
        2.0
    } else if scaled <= 5.0 {
        5.0
    } else {
        10.0
    };
    factor * power
}

/// Formats a tick value without float-noise digits: fixed precision derived
/// from the step's decimal exponent.
fn tick_label(value: f64, step: f64) -> String {
    let value = value + 0.0; // normalizes -0.0
    let decimals = if step >= 1.0 {
        0
    } else {
        (-step.log10().floor()) as usize
    };
    format!("{value:.decimals$}")
}

fn push_line(out: &mut String, x1: f64, y1: f64, x2: f64, y2: f64, style: &str) {
    out.push_str(&format!(
        "  <line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" {style}/>\n"
    ));
}

/// Renders a standalone SVG 1.1 line-and-marker chart of float(x_n) vs n.
///
/// Non-finite values (possible when exact magnitudes exceed the double
/// range) are clamped to the top or bottom edge of the value window rather
/// than dropped, so blow-ups remain visible. Output is a pure function of
/// the trajectory and title: no timestamps, ids, or randomness.
pub fn emit_plot(traj: &Trajectory, title: &str) -> Result<String, ScenarioIoError> {
    if traj.len() < 2 {
        return Err(ScenarioIoError::TooFewPoints);
    }
    let points: Vec<(i64, f64)> = traj.iter_indexed().map(|(n, v)| (n, v.to_f64())).collect();
    let n_min = points.first().expect("nonempty").0 as f64;
    let n_max = points.last().expect("nonempty").0 as f64;
    let finite: Vec<f64> = points
        .iter()
        .map(|&(_, y)| y)
        .filter(|y| y.is_finite())
        .collect();
    let (mut y_min, mut y_max) = finite
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| {
            (lo.min(y), hi.max(y))
        });
    if !y_min.is_finite() || !y_max.is_finite() {
        (y_min, y_max) = (-1.0, 1.0);
    }
    if y_min == y_max {
        y_min -= 1.0;
        y_max += 1.0;
    }
    let pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    let (x0, x1) = (MARGIN_LEFT, PLOT_WIDTH - MARGIN_RIGHT);
    let (y0, y1) = (MARGIN_TOP, PLOT_HEIGHT - MARGIN_BOTTOM);
    let px = |n: f64| x0 + (n - n_min) / (n_max - n_min) * (x1 - x0);
    let py = |y: f64| {
        let clamped = y.clamp(y_min, y_max);
        // NaN clamps to y_min via the explicit fallback below.
        let v = if clamped.is_nan() { y_min } else { clamped };
        y1 - (v - y_min) / (y_max - y_min) * (y1 - y0)
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{PLOT_WIDTH}\" height=\"{PLOT_HEIGHT}\" \
         viewBox=\"0 0 {PLOT_WIDTH} {PLOT_HEIGHT}\">\n"
    ));
    svg.push_str("  <rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n");
    svg.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"28\" text-anchor=\"middle\" \
         font-family=\"sans-serif\" font-size=\"16\">{}</text>\n",
        (x0 + x1) / 2.0,
        xml_escape(title)
    ));

    let axis_style = "stroke=\"#444444\" stroke-width=\"1\"";
    push_line(&mut svg, x0, y1, x1, y1, axis_style);
    push_line(&mut svg, x0, y0, x0, y1, axis_style);

    // Zero line, when zero is inside the value window.
    if y_min < 0.0 && y_max > 0.0 {
        push_line(
            &mut svg,
            x0,
            py(0.0),
            x1,
            py(0.0),
            "stroke=\"#bbbbbb\" stroke-width=\"1\" stroke-dasharray=\"4 3\"",
        );
    }

    let x_step = nice_step(n_max - n_min, 6.0).max(1.0);
    let mut tick = (n_min / x_step).ceil() * x_step;
    while tick <= n_max + 1e-9 {
        let x = px(tick);
        push_line(&mut svg, x, y1, x, y1 + 5.0, axis_style);
        svg.push_str(&format!(
            "  <text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\" \
             font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
            y1 + 18.0,
            tick_label(tick, x_step)
        ));
        tick += x_step;
    }
    let y_step = nice_step(y_max - y_min, 6.0);
    let mut tick = (y_min / y_step).ceil() * y_step;
    while tick <= y_max + 1e-9 * y_step.abs() {
        let y = py(tick);
        push_line(&mut svg, x0 - 5.0, y, x0, y, axis_style);
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" \
             font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
            x0 - 8.0,
            y + 4.0,
            tick_label(tick, y_step)
        ));
        tick += y_step;
    }

    svg.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" \
         font-family=\"sans-serif\" font-size=\"13\">n</text>\n",
        (x0 + x1) / 2.0,
        PLOT_HEIGHT - 14.0
    ));
    svg.push_str(&format!(
        "  <text x=\"18\" y=\"{:.2}\" text-anchor=\"middle\" \
         font-family=\"sans-serif\" font-size=\"13\" \
         transform=\"rotate(-90 18 {:.2})\">x_n</text>\n",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    ));

    let coords: Vec<String> = points
        .iter()
        .map(|&(n, y)| format!("{:.2},{:.2}", px(n as f64), py(y)))
        .collect();
    svg.push_str(&format!(
        "  <polyline points=\"{}\" fill=\"none\" stroke=\"#1f6fb4\" stroke-width=\"1.5\"/>\n",
        coords.join(" ")
    ));
    for &(n, y) in &points {
        svg.push_str(&format!(
            "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.2\" fill=\"#1f6fb4\"/>\n",
            px(n as f64),
            py(y)
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
