//! Command-line grammar. Model and scenario flags are global, so they may
//! appear before or after the subcommand; every tolerance has a flag whose
//! default is the corresponding module default.

use crate::config::Overrides;
use clap::{Args, Parser, Subcommand, ValueEnum};
use modfront_core::model::{ScenarioTag, DEFAULT_SCENARIO_TOL};
use modfront_core::spectrum::{DEFAULT_MIN_GAP, DEFAULT_N_MAX};
use modfront_core::wave::DEFAULT_GALERKIN_MODES;
use std::path::PathBuf;

/// Modulating traveling fronts of a dispersive Swift–Hohenberg equation
/// coupled to a conservation law.
#[derive(Debug, Parser)]
#[command(name = "modfront", version, about, propagate_version = true)]
pub struct Cli {
    /// Settings shared by all subcommands.
    #[command(flatten)]
    pub global: GlobalArgs,
    /// What to compute.
    #[command(subcommand)]
    pub command: Command,
}

/// Configuration, output and model flags.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Flat key=value configuration file (flags override its values).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Directory receiving JSON records and CSV grids.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Maximum number of worker threads for independent tasks.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    /// Bifurcation strength α0.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub alpha0: Option<f64>,
    /// Swift–Hohenberg dispersion c_u (nonzero).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub cu: Option<f64>,
    /// Conservation-law advection c_v.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub cv: Option<f64>,
    /// Coefficient γ1 of ∂x²(u²).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma1: Option<f64>,
    /// Coefficient γ2 of ∂x(u²).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma2: Option<f64>,
    /// Distance to onset ε.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    /// Background B of the conserved mode (v0 = ε²B).
    #[arg(long = "B", global = true, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Speed regime: I, II, III, IV or V.
    #[arg(long, global = true)]
    pub scenario: Option<ScenarioTag>,
    /// Speed offset c0 (Scenarios II–V).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub c0: Option<f64>,
    /// Front speed c (Scenario I).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub c: Option<f64>,
    /// Rescaled coupling γ2⁰ with γ2 = εγ2⁰ (Scenario IV).
    #[arg(long = "gamma2-0", alias = "gamma2_0", global = true, allow_negative_numbers = true)]
    pub gamma2_0: Option<f64>,
    /// Seed for randomized runs.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

impl GlobalArgs {
    /// The model and scenario flags as overrides.
    pub fn overrides(&self) -> Overrides {
        Overrides {
            alpha0: self.alpha0,
            cu: self.cu,
            cv: self.cv,
            gamma1: self.gamma1,
            gamma2: self.gamma2,
            epsilon: self.epsilon,
            b: self.b,
            scenario: self.scenario,
            c0: self.c0,
            c: self.c,
            gamma2_0: self.gamma2_0,
            seed: self.seed,
        }
    }
}

/// Subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spatial spectrum of the linearization about the origin: central set and hyperbolic gap.
    Spectrum(SpectrumArgs),
    /// Bifurcating traveling wave: amplitude, frequency correction, second harmonics.
    Wave(WaveArgs),
    /// Coefficient table of the reduced vector field of a scenario.
    Reduced(ReducedArgs),
    /// Heteroclinic shooting from the invading state and ω-limit classification.
    Shoot(ShootArgs),
    /// Hopf and torus bifurcations of the Scenario II/V reduced system.
    Bifurcate(BifurcateArgs),
    /// Modulating-front profile reconstructed from a heteroclinic orbit.
    Front(FrontArgs),
    /// Direct simulation of the full system from front initial data.
    Simulate(SimulateArgs),
    /// Runs the acceptance suite and prints a pass/fail table.
    Verify(VerifyArgs),
}

/// Flags of `spectrum`.
#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    /// Phase velocity c_p (default c_u + ε²ω0* of the wave).
    #[arg(long, allow_negative_numbers = true)]
    pub cp: Option<f64>,
    /// Largest Fourier index examined.
    #[arg(long, default_value_t = DEFAULT_N_MAX)]
    pub n_max: i64,
    /// Central threshold on |Re λ| (default 10ε²+10⁻⁶ for I/III, 10ε+10⁻⁶ otherwise).
    #[arg(long)]
    pub gap_tol: Option<f64>,
    /// Declared hyperbolic gap.
    #[arg(long, default_value_t = DEFAULT_MIN_GAP)]
    pub min_gap: f64,
    /// Tolerance of the scenario relations c = 3c_u and c = −c_v.
    #[arg(long, default_value_t = DEFAULT_SCENARIO_TOL)]
    pub scenario_tol: f64,
}

/// Flags of `wave`.
#[derive(Debug, Clone, Args)]
pub struct WaveArgs {
    /// Newton-refine (A, ω0) on the Galerkin stationary equation (needs ε > 0).
    #[arg(long)]
    pub refine: bool,
    /// Residual tolerance of the refinement.
    #[arg(long, default_value_t = 1e-12)]
    pub newton_tol: f64,
    /// Harmonics kept in the Galerkin residual.
    #[arg(long, default_value_t = DEFAULT_GALERKIN_MODES)]
    pub modes: usize,
    /// Phase samples of the profile CSV.
    #[arg(long, default_value_t = 64)]
    pub p_points: usize,
}

/// Flags of `reduced`.
#[derive(Debug, Clone, Args)]
pub struct ReducedArgs {
    /// Tolerance of the scenario relations.
    #[arg(long, default_value_t = DEFAULT_SCENARIO_TOL)]
    pub scenario_tol: f64,
}

/// Time direction of a shot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    /// Along the unstable direction.
    Forward,
    /// Backward along the stable direction (reversed fronts).
    Backward,
}

/// Shooting controls shared by `shoot` and `front`.
#[derive(Debug, Clone, Args)]
pub struct ShootFlags {
    /// Initial displacement along the eigenvector, in [1e-8, 1e-2].
    #[arg(long, default_value_t = 1e-6)]
    pub offset: f64,
    /// Integration horizon in the reduced variable.
    #[arg(long, default_value_t = 2000.0)]
    pub t_max: f64,
    /// Integrator tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Time direction (default: forward if a unique unstable direction exists, else backward).
    #[arg(long, value_enum)]
    pub direction: Option<DirectionArg>,
    /// Tolerance of the scenario relations.
    #[arg(long, default_value_t = DEFAULT_SCENARIO_TOL)]
    pub scenario_tol: f64,
}

/// Flags of `shoot`.
#[derive(Debug, Clone, Args)]
pub struct ShootArgs {
    /// Shooting controls.
    #[command(flatten)]
    pub shoot: ShootFlags,
    /// Uniform samples of the trajectory CSV.
    #[arg(long, default_value_t = 2001)]
    pub samples: usize,
}

/// Which bifurcations to locate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FindArg {
    /// Hopf point of the origin.
    Hopf,
    /// Torus bifurcation of the periodic branch (includes the branch CSV).
    Torus,
    /// Both.
    All,
}

/// Flags of `bifurcate`.
#[derive(Debug, Clone, Args)]
pub struct BifurcateArgs {
    /// Which points to locate.
    #[arg(long, value_enum, default_value = "all")]
    pub find: FindArg,
    /// Lower end of the origin-spectrum scan.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub scan_min: f64,
    /// Upper end of the origin-spectrum scan.
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    pub scan_max: f64,
    /// Samples of the origin-spectrum scan.
    #[arg(long, default_value_t = 101)]
    pub scan_points: usize,
    /// Bracket of the Hopf search.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [1.1, 2.5], allow_negative_numbers = true)]
    pub hopf_bracket: Vec<f64>,
    /// Bracket of the torus search.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [0.9, 1.3], allow_negative_numbers = true)]
    pub torus_bracket: Vec<f64>,
    /// Natural-parameter step of the branch continuation.
    #[arg(long, default_value_t = 0.02)]
    pub branch_step: f64,
    /// Distance below the Hopf point where the branch continuation starts.
    #[arg(long, default_value_t = 0.01)]
    pub branch_start_offset: f64,
}

/// Flags of `front`.
#[derive(Debug, Clone, Args)]
pub struct FrontArgs {
    /// Shooting controls.
    #[command(flatten)]
    pub shoot: ShootFlags,
    /// Samples of the heteroclinic orbit along ξ.
    #[arg(long, default_value_t = 801)]
    pub xi_points: usize,
    /// Samples of the phase p ∈ [0, 2π).
    #[arg(long, default_value_t = 64)]
    pub p_points: usize,
    /// Emit a physical (x, u, v) snapshot at this time.
    #[arg(long, allow_negative_numbers = true)]
    pub snapshot: Option<f64>,
    /// Points of the snapshot grid.
    #[arg(long, default_value_t = 2048)]
    pub x_points: usize,
}

/// Flags of `simulate`.
#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Grid points (power of two).
    #[arg(long = "N", default_value_t = 2048)]
    pub n: usize,
    /// Domain length (multiple of 2π; default 390π).
    #[arg(long = "L")]
    pub l: Option<f64>,
    /// Time step.
    #[arg(long, default_value_t = 0.02)]
    pub dt: f64,
    /// Final time.
    #[arg(long, alias = "t_end", default_value_t = 100.0)]
    pub t_end: f64,
    /// Interval between snapshot CSVs (0 disables them).
    #[arg(long, alias = "snapshot_every", default_value_t = 10.0)]
    pub snapshot_every: f64,
    /// Interval between front observations.
    #[arg(long, default_value_t = 1.0)]
    pub sample_every: f64,
    /// Length of the final window used for the speed fits.
    #[arg(long, default_value_t = 60.0)]
    pub fit_window: f64,
    /// Initial front position as a fraction of L.
    #[arg(long, default_value_t = 0.35)]
    pub front_fraction: f64,
}

/// Flags of `verify`.
#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Run only these criteria (comma-separated numbers).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u8>,
}
