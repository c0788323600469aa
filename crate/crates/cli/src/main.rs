//! Command-line driver: runs one fire-exposure simulation per invocation,
//! streaming per-step diagnostics as TSV on stdout and writing field
//! snapshots (and optional spalling reports) into the output directory.
//!
//! Exit codes: 0 success, 1 material-fixture mismatch, 2 configuration
//! error, 3 step failure, 4 I/O error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use hygrotherm::io::{self, IoError};
use hygrotherm::scenario::{self, Scenario, ScenarioError};
use hygrotherm::solver::{self, RunEvent};
use hygrotherm::spalling;

#[derive(Parser, Debug)]
#[command(
    name = "hygrotherm",
    version,
    about = "Coupled heat and moisture transport in concrete under fire"
)]
struct Args {
    /// Scenario configuration file (TOML); benchmark defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory for snapshots and reports.
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Simulated duration [s] (overrides the config).
    #[arg(long)]
    duration: Option<f64>,

    /// Time step [s] (overrides the config).
    #[arg(long)]
    dt: Option<f64>,

    /// Mesh resolution (overrides the config).
    #[arg(long, num_args = 2, value_names = ["NX", "NY"])]
    mesh: Option<Vec<usize>>,

    /// Snapshot cadence [s] (overrides the config).
    #[arg(long)]
    snapshot_every: Option<f64>,

    /// Emit per-snapshot spalling reports.
    #[arg(long)]
    spalling: bool,

    /// Check material laws against the committed fixtures and exit.
    #[arg(long)]
    validate_materials: bool,
}

enum AppError {
    Config(String),
    Step(String),
    Io(String),
}

impl AppError {
    fn exit_code(&self) -> ExitCode {
        match self {
            AppError::Config(_) => ExitCode::from(2),
            AppError::Step(_) => ExitCode::from(3),
            AppError::Io(_) => ExitCode::from(4),
        }
    }

    fn message(&self) -> &str {
        match self {
            AppError::Config(m) | AppError::Step(m) | AppError::Io(m) => m,
        }
    }
}

impl From<ScenarioError> for AppError {
    fn from(e: ScenarioError) -> Self {
        AppError::Config(e.to_string())
    }
}

impl From<IoError> for AppError {
    fn from(e: IoError) -> Self {
        AppError::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = if args.validate_materials { validate_materials() } else { run(&args) };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn load_scenario(args: &Args) -> Result<Scenario, AppError> {
    let mut s = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| AppError::Config(format!("{}: {e}", path.display())))?;
            scenario::parse_scenario(&text)?
        }
        None => Scenario::default(),
    };
    if let Some(d) = args.duration {
        s.solver.t_end = d;
    }
    if let Some(dt) = args.dt {
        s.solver.dt = dt;
    }
    if let Some(m) = &args.mesh {
        s.mesh.nx = m[0];
        s.mesh.ny = m[1];
    }
    if let Some(every) = args.snapshot_every {
        s.output.snapshot_every = every;
    }
    s.validate()?;
    Ok(s)
}

fn run(args: &Args) -> Result<ExitCode, AppError> {
    let scenario = load_scenario(args)?;
    let mesh = scenario.build_mesh()?;
    let model = scenario.constitutive_model()?;
    let cfg = scenario.solver;

    fs::create_dir_all(&args.out)
        .map_err(|e| AppError::Io(format!("{}: {e}", args.out.display())))?;

    let tag_name = |t: hygrotherm::BoundaryTag| match t {
        hygrotherm::BoundaryTag::Fire => "fire",
        hygrotherm::BoundaryTag::Ambient => "ambient",
    };
    let b = &scenario.boundary;
    println!(
        "# {}x{} elements on {} x {} m, {} steps of {} s",
        scenario.mesh.nx,
        scenario.mesh.ny,
        scenario.domain.lx,
        scenario.domain.ly,
        cfg.n_steps(),
        cfg.dt
    );
    println!(
        "# boundary: bottom={} right={} top={} left={} (radiation acts on fire sides only)",
        tag_name(b.bottom),
        tag_name(b.right),
        tag_name(b.top),
        tag_name(b.left)
    );
    println!(
        "# fire curve: {}; initial {} K, {} Pa (relative humidity {:.4})",
        match scenario.fire.curve {
            scenario::FireCurve::Iso834 => "iso834".to_string(),
            scenario::FireCurve::Constant =>
                format!("constant {} K", scenario.fire.theta_inf),
        },
        scenario.init.theta_0,
        scenario.init.p_0,
        scenario.initial_relative_humidity()?
    );
    println!("{}", io::DIAGNOSTICS_HEADER);

    let mut io_failure: Option<IoError> = None;
    let outcome = solver::run(&mesh, &model, &scenario, &cfg, |event| match event {
        RunEvent::Step(d) => println!("{}", io::diagnostics_line(d)),
        RunEvent::Snapshot { time, state } => {
            if io_failure.is_none() {
                if let Err(e) = io::write_snapshot(state, &mesh, time, &args.out) {
                    io_failure = Some(e);
                }
            }
        }
    });
    if let Some(e) = io_failure {
        return Err(e.into());
    }

    io::write_diagnostics(&outcome.trajectory.diagnostics, &args.out.join("diagnostics.tsv"))?;

    if args.spalling {
        let reports = spalling::track(
            &outcome.trajectory,
            &mesh,
            scenario.material.porosity,
            scenario.material.f_t0,
        );
        for report in &reports {
            io::write_spalling_report(report, &mesh, &args.out)?;
        }
        if let Some(last) = reports.last() {
            println!(
                "# spalling at t = {} s: {} spalled, {} unstable, {} stable",
                last.time,
                last.count(spalling::Zone::Spalled),
                last.count(spalling::Zone::Unstable),
                last.count(spalling::Zone::Stable)
            );
        }
    }

    if let Some(failure) = outcome.failure {
        return Err(AppError::Step(failure.to_string()));
    }
    Ok(ExitCode::SUCCESS)
}

struct Fixture {
    law: &'static str,
    text: &'static str,
    eval: fn(&hygrotherm::ConstitutiveModel, f64, f64) -> f64,
}

const FIXTURES: &[Fixture] = &[
    Fixture {
        law: "thermal_conductivity",
        text: include_str!("../../core/fixtures/thermal_conductivity.csv"),
        eval: |m, t, _| m.thermal_conductivity(t),
    },
    Fixture {
        law: "specific_heat_solid",
        text: include_str!("../../core/fixtures/specific_heat_solid.csv"),
        eval: |m, t, _| m.specific_heat_solid(t),
    },
    Fixture {
        law: "dehydrated_water",
        text: include_str!("../../core/fixtures/dehydrated_water.csv"),
        eval: |m, t, _| m.dehydrated_water(t).0,
    },
    Fixture {
        law: "evaporation_enthalpy",
        text: include_str!("../../core/fixtures/evaporation_enthalpy.csv"),
        eval: |m, t, _| m.evaporation_enthalpy(t),
    },
    Fixture {
        law: "tensile_strength",
        text: include_str!("../../core/fixtures/tensile_strength.csv"),
        eval: |m, t, _| m.tensile_strength(t),
    },
    Fixture {
        law: "saturation_pressure",
        text: include_str!("../../core/fixtures/saturation_pressure.csv"),
        eval: |m, t, _| m.saturation_pressure(t),
    },
    Fixture {
        law: "permeability",
        text: include_str!("../../core/fixtures/permeability.csv"),
        eval: |m, t, p| m.permeability(t, p),
    },
    Fixture {
        law: "sorption_isotherm",
        text: include_str!("../../core/fixtures/sorption_isotherm.csv"),
        eval: |m, t, p| m.sorption_isotherm(t, p).w,
    },
    Fixture {
        law: "iso_fire_curve",
        text: include_str!("../../core/fixtures/iso_fire_curve.csv"),
        eval: |_, t, _| scenario::iso_fire_curve(t),
    },
];

fn validate_materials() -> Result<ExitCode, AppError> {
    let model = Scenario::default()
        .constitutive_model()
        .map_err(|e| AppError::Config(e.to_string()))?;
    let mut worst_overall = 0.0f64;
    println!("law\tpoints\tmax_rel_err");
    for fixture in FIXTURES {
        let mut worst = 0.0f64;
        let mut points = 0usize;
        for (k, line) in fixture.text.lines().enumerate().skip(1) {
            let cols: Vec<&str> = line.split(',').collect();
            let parse = |s: &str| -> Result<f64, AppError> {
                s.parse().map_err(|e| {
                    AppError::Config(format!("{} row {}: {e}", fixture.law, k + 1))
                })
            };
            let (a, b, want) = (parse(cols[0])?, parse(cols[1])?, parse(cols[2])?);
            let got = (fixture.eval)(&model, a, b);
            let err = if want == 0.0 { got.abs() } else { ((got - want) / want).abs() };
            worst = worst.max(err);
            points += 1;
        }
        println!("{}\t{}\t{:.3e}", fixture.law, points, worst);
        worst_overall = worst_overall.max(worst);
    }
    if worst_overall > 1e-9 {
        eprintln!("error: material laws deviate from fixtures (max {worst_overall:.3e})");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}
