//! Command-line front end: scenario runs, preset experiments, stability
//! and effective-potential reports, and the verification suite driver.
//!
//! Exit codes: 0 success, 1 validation error, 2 integration failure,
//! 3 verification failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dk_mhd::dynamics::invariants;
use dk_mhd::error::Error;
use dk_mhd::integrator::Method;
use dk_mhd::output;
use dk_mhd::scenario::{run_scenario, Scenario, ScenarioRun, PRESET_NAMES};
use dk_mhd::stability::{
    aligned_spectrum_with, orthogonal_modes, potential_coefficients, AlignedStabilityReport,
    StabPolyVariant,
};
use dk_mhd::verify::run_suites;

#[derive(Parser)]
#[command(
    name = "dkmhd",
    about = "Dolzhansky-Kirchhoff six-variable MHD model: simulation and analysis",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunFlags {
    /// Output CSV path (default: `<scenario name>.csv`)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit two-column gnuplot data files per variable into this directory
    #[arg(long)]
    plot_dir: Option<PathBuf>,
    /// Override relative tolerance
    #[arg(long)]
    rtol: Option<f64>,
    /// Override absolute tolerance
    #[arg(long)]
    atol: Option<f64>,
    /// Override output sample spacing
    #[arg(long)]
    sample_dt: Option<f64>,
    /// Override final time
    #[arg(long)]
    t_end: Option<f64>,
    /// Integration method: adaptive-embedded-rk | fixed-rk4
    #[arg(long)]
    method: Option<String>,
    /// Use the compatibility constant term in aligned stability snapshots
    #[arg(long)]
    compat_stabpoly: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario described by a config file
    Run {
        /// Path to a TOML scenario config
        config: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Integrate a built-in preset experiment
    Preset {
        /// One of: euler-flopl, dk-dz3ln, dk-dz5ln
        name: String,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Closed-form linear stability reports
    Stability {
        #[command(subcommand)]
        what: StabilityCommand,
    },
    /// Effective-potential coefficient table of a field-free scenario
    Potential {
        /// Preset name or config path
        scenario: String,
        /// Evaluation time (default 0)
        #[arg(long, default_value_t = 0.0)]
        t: f64,
    },
    /// Run the self-check suites (hierarchy | conservation | algebra | reduction)
    Verify {
        /// Suite selector; all suites when omitted
        suite: Option<String>,
    },
}

#[derive(Subcommand)]
enum StabilityCommand {
    /// Aligned vorticity and current (w3 = W, iota3 = J)
    #[command(allow_negative_numbers = true)]
    Aligned {
        #[arg(long)]
        w: f64,
        #[arg(long)]
        j: f64,
        #[arg(long)]
        r1: f64,
        #[arg(long)]
        r2: f64,
        /// Use the compatibility constant term
        #[arg(long)]
        compat_stabpoly: bool,
    },
    /// Orthogonal vorticity and current (w3 = X, iota1 = K)
    #[command(allow_negative_numbers = true)]
    Orthogonal {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        k: f64,
        #[arg(long)]
        r1: f64,
        #[arg(long)]
        r2: f64,
        /// Third ratio; derived from the constraint when omitted
        #[arg(long)]
        r3: Option<f64>,
    },
}

fn main() -> ExitCode {
    // die quietly on a closed pipe (e.g. `dkmhd ... | head`) like other
    // unix tools
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not errors
            if e.kind() == clap::error::ErrorKind::DisplayHelp
                || e.kind() == clap::error::ErrorKind::DisplayVersion
            {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(1);
        }
    };

    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Run { config, flags } => {
            let scenario = Scenario::from_file(&config)?;
            let stem = config
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "run".to_string());
            run_and_report(scenario, &stem, &flags)
        }
        Command::Preset { name, flags } => {
            let scenario = Scenario::preset(&name)?;
            run_and_report(scenario, &name, &flags)
        }
        Command::Stability { what } => {
            stability_report(what);
            Ok(ExitCode::SUCCESS)
        }
        Command::Potential { scenario, t } => {
            potential_report(&scenario, t)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite } => {
            let results = run_suites(suite.as_deref())?;
            let mut all_passed = true;
            for r in &results {
                let status = if r.passed { "PASS" } else { "FAIL" };
                println!("{status} {}/{}: {}", r.suite, r.name, r.detail);
                all_passed &= r.passed;
            }
            if all_passed {
                println!("verify: {} checks passed", results.len());
                Ok(ExitCode::SUCCESS)
            } else {
                println!("verify: FAILURES present");
                Ok(ExitCode::from(3))
            }
        }
    }
}

fn apply_flags(scenario: &mut Scenario, flags: &RunFlags) -> Result<(), Error> {
    if let Some(rtol) = flags.rtol {
        scenario.settings.rtol = rtol;
    }
    if let Some(atol) = flags.atol {
        scenario.settings.atol = atol;
    }
    if let Some(dt) = flags.sample_dt {
        scenario.settings.sample_dt = dt;
    }
    if let Some(t_end) = flags.t_end {
        scenario.t_end = t_end;
    }
    if let Some(name) = &flags.method {
        scenario.settings.method = Method::parse(name).ok_or_else(|| Error::Config {
            field: "method".to_string(),
            reason: format!("unknown method '{name}'"),
        })?;
    }
    scenario.settings.validate()?;
    scenario.schedule.validate_window(scenario.t_end)?;
    Ok(())
}

fn run_and_report(mut scenario: Scenario, name: &str, flags: &RunFlags) -> Result<ExitCode, Error> {
    apply_flags(&mut scenario, flags)?;
    let run = run_scenario(&scenario)?;

    let out_path = flags
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{name}.csv")));
    output::write_csv_file(&out_path, &run.trajectory)?;
    if let Some(dir) = &flags.plot_dir {
        output::write_plot_files(dir, &run.trajectory)?;
    }

    print_run_report(name, &run, &out_path, flags.compat_stabpoly);
    Ok(ExitCode::SUCCESS)
}

fn print_run_report(name: &str, run: &ScenarioRun, out_path: &Path, compat: bool) {
    let traj = &run.trajectory;
    let report = &run.report;
    println!("run: {name}");
    println!(
        "samples: {} over t in [{}, {}]",
        traj.len(),
        traj.times.first().unwrap_or(&0.0),
        traj.times.last().unwrap_or(&0.0)
    );
    println!("csv: {}", out_path.display());
    for w in &report.warnings {
        eprintln!("warning: {w}");
        println!("warning: {w}");
    }

    match &report.drift {
        Some(d) => {
            println!("invariant drift (max relative over the run):");
            println!("  H0 {:.3e}  H1 {:.3e}  C0 {:.3e}", d.h0, d.h1, d.c0);
            match d.c {
                Some(c) => println!("  C1 {:.3e}  C2 {:.3e}  C3 {:.3e}", c[0], c[1], c[2]),
                None => println!("  C1..C3 absent (degenerate shape ratio)"),
            }
        }
        None => println!("invariant drift: n/a (parameters ramped during the run)"),
    }

    println!("zero crossings: {} total", report.events.len());
    for ev in report.events.iter().take(12) {
        println!("  {} at t = {:.6}", ev.component, ev.time);
    }
    if report.events.len() > 12 {
        println!("  ... ({} more)", report.events.len() - 12);
    }

    let recompute = |idx: usize| -> AlignedStabilityReport {
        let s = &traj.states[idx];
        let p = &traj.params[idx];
        aligned_spectrum_with(
            s.varpi[2],
            s.iota[2],
            p.r[0],
            p.r[1],
            if compat {
                StabPolyVariant::Printed
            } else {
                StabPolyVariant::Corrected
            },
        )
    };
    let (s0, s1) = if compat {
        (recompute(0), recompute(traj.len() - 1))
    } else {
        (report.stability_start, report.stability_end)
    };
    print_aligned_line("stability snapshot at t0", &s0);
    print_aligned_line("stability snapshot at t_end", &s1);
}

fn print_aligned_line(label: &str, rep: &AlignedStabilityReport) {
    let f = rep.frequencies();
    println!(
        "{label}: {} (beta {:.6}, constant {:.6}, |Im s| = {:.5}, {:.5})",
        rep.classification.name(),
        rep.beta,
        rep.constant,
        f[0],
        f[1]
    );
}

fn stability_report(cmd: StabilityCommand) {
    match cmd {
        StabilityCommand::Aligned {
            w,
            j,
            r1,
            r2,
            compat_stabpoly,
        } => {
            let variant = if compat_stabpoly {
                StabPolyVariant::Printed
            } else {
                StabPolyVariant::Corrected
            };
            let rep = aligned_spectrum_with(w, j, r1, r2, variant);
            println!("aligned configuration: W = {w}, J = {j}, r1 = {r1}, r2 = {r2}");
            println!(
                "quadratic in x = s^2: x^2 - beta x + c with beta = {:.9}, c = {:.9}{}",
                rep.beta,
                rep.constant,
                if compat_stabpoly {
                    " (compatibility constant)"
                } else {
                    ""
                }
            );
            for (k, x) in rep.x_roots.iter().enumerate() {
                println!("x{} = {:+.9} {:+.9}i", k + 1, x.re, x.im);
            }
            for (k, s) in rep.s_roots.iter().enumerate() {
                println!("s{} = {:+.9} {:+.9}i", k + 1, s.re, s.im);
            }
            println!("classification: {}", rep.classification.name());
            println!(
                "r2 stability threshold (beta sign change): {:.9}",
                rep.r2_threshold
            );
        }
        StabilityCommand::Orthogonal { x, k, r1, r2, r3 } => {
            let r3 = match r3 {
                Some(v) => v,
                None => match dk_mhd::geometry::r3_from(r1, r2) {
                    Ok(v) => v,
                    Err(e) => {
                        eprintln!("error: {e}");
                        return;
                    }
                },
            };
            let r = [r1, r2, r3];
            let m = orthogonal_modes(x, k, &r);
            println!("orthogonal configuration: X = {x}, K = {k}, r = ({r1}, {r2}, {r3:.6})");
            println!("w3 mode: {}", m.w3_mode);
            println!(
                "iota1, iota2 oscillation frequencies: {:.6}, {:.6}",
                m.iota_frequencies[0], m.iota_frequencies[1]
            );
            println!(
                "(w1, iota3) branch: x = {:.9} -> {}",
                m.branch_x, m.branch_mode
            );
        }
    }
}

fn potential_report(scenario_arg: &str, t: f64) -> Result<(), Error> {
    let mut scenario = if PRESET_NAMES.contains(&scenario_arg) {
        Scenario::preset(scenario_arg)?
    } else {
        Scenario::from_file(Path::new(scenario_arg))?
    };

    // state and geometry at the evaluation time
    let (state, geometry) = if t == 0.0 {
        (scenario.initial, scenario.schedule.eval(0.0)?)
    } else {
        scenario.t_end = t;
        scenario.schedule.validate_window(t)?;
        let run = run_scenario(&scenario)?;
        (
            *run.trajectory.states.last().expect("nonempty trajectory"),
            scenario.schedule.eval(t)?,
        )
    };

    let iota_mag = state.iota.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if iota_mag > 1e-12 {
        return Err(Error::Config {
            field: "potential".to_string(),
            reason: format!(
                "effective-potential analysis needs a field-free state; |iota| = {iota_mag:.3e} at t = {t}"
            ),
        });
    }

    let inv = invariants(&state, &geometry);
    let c = inv.c.ok_or_else(|| Error::Config {
        field: "potential".to_string(),
        reason: "Clebsch integrals are undefined for a degenerate shape ratio".to_string(),
    })?;
    let rep = potential_coefficients(&c, &geometry.ratios);

    println!("effective potentials at t = {t} (2V_i = alpha w^2 + beta w^4)");
    println!(
        "state: w = ({:.6}, {:.6}, {:.6}), r = ({:.6}, {:.6}, {:.6})",
        state.varpi[0],
        state.varpi[1],
        state.varpi[2],
        geometry.ratios[0],
        geometry.ratios[1],
        geometry.ratios[2]
    );
    println!("C = ({:.6}, {:.6}, {:.6})", c[0], c[1], c[2]);
    println!("term        2V_1          2V_2          2V_3");
    let coeff_row = |label: &str, pick: &dyn Fn(usize) -> (f64, bool)| {
        let mut row = format!("{label:<10}");
        for i in 0..3 {
            let (v, flips) = pick(i);
            let dagger = if flips { " " } else { "\u{2020}" };
            row.push_str(&format!("{v:>+12.4}{dagger} "));
        }
        println!("{row}");
    };
    coeff_row("w^2", &|i| {
        (rep.coefficients[i].0, rep.sign_change_flags[i].0)
    });
    coeff_row("w^4", &|i| {
        (rep.coefficients[i].1, rep.sign_change_flags[i].1)
    });
    println!(
        "shape       {:>12}  {:>12}  {:>12}",
        rep.shapes[0].letter(),
        rep.shapes[1].letter(),
        rep.shapes[2].letter()
    );
    println!(
        "r2 flip     {:>12}  {:>12}  {:>12}",
        format!(
            "{}->{}",
            rep.shapes[0].letter(),
            rep.shapes_flipped[0].letter()
        ),
        format!(
            "{}->{}",
            rep.shapes[1].letter(),
            rep.shapes_flipped[1].letter()
        ),
        format!(
            "{}->{}",
            rep.shapes[2].letter(),
            rep.shapes_flipped[2].letter()
        ),
    );
    println!("\u{2020} coefficient does not change sign across r2 = 0");
    Ok(())
}
