//! Command-line front door: scenarios in, trajectories, closed-form terms,
//! verdicts, and sweep reports out.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use ratrec::analysis::{
    classify, good_set_check, regime, zero_conditions, AnalysisError, AsymptoticClass, Note,
    Verdict,
};
use ratrec::closedform::{
    closed_form_tagged, corollary1_term, corollary2_term, has_unit_parameters,
    special_case_elsayed, theorem1_term, ClosedFormError, FormUsed,
};
use ratrec::numerics::{Mode, DEFAULT_BIT_LIMIT};
use ratrec::recurrence::{first_forbidden_index, simulate_with_limit, Trajectory};
use ratrec::scenario_io::{emit_plot, export_csv, paper_example, parse_scenario, Scenario};
use ratrec::sweep::{run_verify, RegimeFilter};

#[derive(Parser)]
#[command(
    name = "ratrec",
    version,
    about = "Exact simulator, closed-form evaluator, and classifier for the recurrence \
             x[n+1] = alpha*x[n-3] / (A + B*x[n-1]*x[n-3])"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

impl From<ModeArg> for Mode {
    fn from(arg: ModeArg) -> Mode {
        match arg {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Float => Mode::Float,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormArg {
    Auto,
    Theorem1,
    Corollary1,
    Corollary2,
    Elsayed,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate the recurrence and export the trajectory (CSV and/or SVG).
    Simulate {
        /// Scenario JSON file.
        #[arg(long)]
        scenario: PathBuf,
        /// Override the scenario's horizon.
        #[arg(long)]
        horizon: Option<usize>,
        /// Override the scenario's arithmetic mode.
        #[arg(long)]
        mode: Option<ModeArg>,
        /// Write the trajectory CSV here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write an SVG plot here.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Evaluate one term of the closed-form solution.
    #[command(name = "closed-form")]
    ClosedForm {
        /// Scenario JSON file.
        #[arg(long)]
        scenario: PathBuf,
        /// Index to evaluate (seeds live at -3..=0).
        #[arg(long)]
        n: i64,
        /// Which formula to use; auto picks by parameter regime.
        #[arg(long, value_enum, default_value_t = FormArg::Auto)]
        form: FormArg,
    },
    /// Classify the long-run behaviour of a scenario.
    Classify {
        /// Scenario JSON file.
        #[arg(long)]
        scenario: PathBuf,
        /// Emit the verdict as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Randomized closed-form vs brute-force equivalence sweep.
    Verify {
        /// Number of random scenarios to draw.
        #[arg(long)]
        trials: u64,
        /// Seed pinning the whole sweep.
        #[arg(long)]
        seed: u64,
        /// Indices checked per trial.
        #[arg(long)]
        horizon: usize,
        /// Regime to draw from: all, gt, eq+, eq-, lt.
        #[arg(long, default_value = "all")]
        regime: RegimeFilter,
    },
    /// Run one of the bundled examples (1-4) end to end.
    Example {
        /// Example id, 1 through 4.
        #[arg(long)]
        id: u32,
        /// Write the trajectory CSV here.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write an SVG plot here.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Also print the classification verdict.
        #[arg(long)]
        classify: bool,
    },
    /// Report the first index with a vanishing denominator, if any.
    Forbidden {
        /// Scenario JSON file.
        #[arg(long)]
        scenario: PathBuf,
        /// How far to scan.
        #[arg(long)]
        horizon: usize,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}

fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading scenario file {}", path.display()))?;
    Ok(parse_scenario(&text)?)
}

fn bit_limit_from_env() -> Result<u64> {
    match std::env::var("RATREC_BITLIMIT") {
        Ok(text) => text
            .trim()
            .parse::<u64>()
            .with_context(|| format!("RATREC_BITLIMIT must be a positive integer, got {text:?}")),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_BIT_LIMIT),
        Err(err) => Err(err).context("reading RATREC_BITLIMIT"),
    }
}

fn write_outputs(
    traj: &Trajectory,
    title: &str,
    csv: Option<&Path>,
    svg: Option<&Path>,
) -> Result<bool> {
    let mut wrote = false;
    if let Some(path) = csv {
        std::fs::write(path, export_csv(traj))
            .with_context(|| format!("writing {}", path.display()))?;
        wrote = true;
    }
    if let Some(path) = svg {
        let plot = emit_plot(traj, title)?;
        std::fs::write(path, plot).with_context(|| format!("writing {}", path.display()))?;
        wrote = true;
    }
    Ok(wrote)
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Simulate {
            scenario,
            horizon,
            mode,
            csv,
            svg,
        } => {
            let scenario = load_scenario(&scenario)?;
            let scenario = match horizon {
                Some(h) => scenario.with_horizon(h)?,
                None => scenario,
            };
            let scenario = match mode {
                Some(m) => scenario.with_mode(m.into()),
                None => scenario,
            };
            let traj = simulate_with_limit(
                &scenario.effective_params(),
                &scenario.effective_init(),
                scenario.horizon(),
                bit_limit_from_env()?,
            )?;
            let title = if scenario.label().is_empty() {
                "trajectory"
            } else {
                scenario.label()
            };
            if !write_outputs(&traj, title, csv.as_deref(), svg.as_deref())? {
                print!("{}", export_csv(&traj));
            }
            Ok(0)
        }
        Command::ClosedForm { scenario, n, form } => {
            let scenario = load_scenario(&scenario)?;
            let (params, init) = (scenario.params(), scenario.init());
            let (value, used) = match form {
                FormArg::Auto => closed_form_tagged(params, init, n)?,
                FormArg::Theorem1 => (theorem1_term(params, init, n)?, FormUsed::Theorem1),
                FormArg::Corollary1 => (corollary1_term(params, init, n)?, FormUsed::Corollary1),
                FormArg::Corollary2 => (corollary2_term(params, init, n)?, FormUsed::Corollary2),
                FormArg::Elsayed => {
                    // The shortcut's signature takes no parameters, so the
                    // alpha = A = B = 1 requirement is enforced here.
                    if !has_unit_parameters(params) {
                        bail!(ClosedFormError::RequiresUnitParameters);
                    }
                    (special_case_elsayed(init, n)?, FormUsed::Elsayed)
                }
            };
            println!("{value} ({used})");
            Ok(0)
        }
        Command::Classify { scenario, json } => {
            let scenario = load_scenario(&scenario)?;
            let (params, init) = (scenario.params(), scenario.init());
            match classify(params, init) {
                Ok(verdict) => {
                    print_verdict(&verdict, json)?;
                    Ok(0)
                }
                Err(AnalysisError::ForbiddenInitialConditions(index)) => {
                    // Still a real report: the seeds lie in the forbidden set.
                    let verdict = Verdict {
                        regime: regime(params)?,
                        zero_conditions: zero_conditions(params, init),
                        class: AsymptoticClass::Forbidden,
                        witness: None,
                        notes: vec![Note::ForbiddenAtIndex { index }],
                    };
                    print_verdict(&verdict, json)?;
                    Ok(1)
                }
                Err(other) => bail!(other),
            }
        }
        Command::Verify {
            trials,
            seed,
            horizon,
            regime,
        } => {
            let report = run_verify(trials, seed, horizon, regime);
            print!("{}", report.render());
            Ok(if report.all_passed() { 0 } else { 1 })
        }
        Command::Example {
            id,
            csv,
            svg,
            classify: classify_flag,
        } => {
            let scenario = paper_example(id)?;
            let traj = simulate_with_limit(
                scenario.params(),
                scenario.init(),
                scenario.horizon(),
                bit_limit_from_env()?,
            )?;
            let wrote = write_outputs(&traj, scenario.label(), csv.as_deref(), svg.as_deref())?;
            if classify_flag {
                let verdict = classify(scenario.params(), scenario.init())?;
                print!("{}", verdict.render_text());
            } else if !wrote {
                print!("{}", export_csv(&traj));
            }
            Ok(0)
        }
        Command::Forbidden { scenario, horizon } => {
            let scenario = load_scenario(&scenario)?;
            let (params, init) = (scenario.params(), scenario.init());
            match first_forbidden_index(params, init, horizon)? {
                Some(index) => println!("{index}"),
                None => println!("none"),
            }
            if let Some(check) = good_set_check(params, init)? {
                println!("good-set cross-check (A = alpha):");
                println!("  e_bd = {}", check.e_bd);
                println!("  e_ac = {}", check.e_ac);
                match check.predicted_pole {
                    Some(k) => println!("  pole map predicts first forbidden index {k}"),
                    None => println!("  pole map predicts no forbidden index"),
                }
                println!(
                    "  quoted predicate calls the seeds {}",
                    if check.quoted_predicate_defined {
                        "well-defined"
                    } else {
                        "forbidden"
                    }
                );
                if check.disagrees() {
                    println!("  the two characterizations DISAGREE; the pole map matches the oracle");
                }
            }
            Ok(0)
        }
    }
}

fn print_verdict(verdict: &Verdict, json: bool) -> Result<()> {
    if json {
        println!("{}", serde_json::to_string_pretty(verdict)?);
    } else {
        print!("{}", verdict.render_text());
    }
    Ok(())
}
