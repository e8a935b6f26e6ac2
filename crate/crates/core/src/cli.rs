//! The `qgeom` command line.
//!
//! Results go to standard output as JSON (CSV for `dynamics`). Failures
//! print `{"error": kind, "message": text}` on standard error and exit with
//! 2 for bad input or 1 for internal faults.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::channel::{self, AffineChannel, BlochVector, CanonicalForm, ChannelJson, CP_TOL};
use crate::dynamics::{self, CouplingSpec, Trajectory};
use crate::netsim::{self, NetworkSpec};
use crate::numfmt::to_json_g17;
use crate::qkd::{self, Protocol};
use crate::tetra::{self, EtaVector, PauliMixture, MEMBERSHIP_TOL};
use crate::{Error, Result};

/// Library operations exposed by each verb.
///
/// `catalog` is not listed: named maps are an input source (`--map`)
/// shared by every verb that reads a channel.
pub const VERBS: &[(&str, &[&str])] = &[
    ("check", &["is_cp", "is_positive_unital", "in_d"]),
    ("choi", &["choi"]),
    ("weights", &["pauli_weights", "mixture_to_eta"]),
    ("project", &["project_to_d", "project_constrained"]),
    ("canon", &["canonical_form"]),
    ("compile", &["compile"]),
    ("run", &["bloch_to_density", "density_to_bloch", "apply", "run_exact", "run_sampled"]),
    ("dynamics", &["eta_of_t", "trajectory", "simulate_reduced"]),
    ("design", &["design_coupling"]),
    ("qkd", &["optimal_attack", "overlap", "success_probability", "probe_overlaps_dilation", "brute_force_optimum"]),
    ("sw", &["sw_decompose", "compose"]),
];

#[derive(Debug, Parser)]
#[command(name = "qgeom", version, about = "Qubit channel geometry toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ChannelInput {
    /// Diagonal unital channel (η_x, η_y, η_z).
    #[arg(long, num_args = 3, value_names = ["X", "Y", "Z"], allow_negative_numbers = true)]
    eta: Option<Vec<f64>>,
    /// Channel JSON file; takes precedence over --eta and --map.
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
    /// Named map: identity, rot-x, rot-y, rot-z, transpose, universal-not, depolarize(p).
    #[arg(long, value_name = "NAME")]
    map: Option<String>,
}

impl ChannelInput {
    fn is_given(&self) -> bool {
        self.eta.is_some() || self.input.is_some() || self.map.is_some()
    }

    fn channel(&self) -> Result<AffineChannel> {
        if let Some(path) = &self.input {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
            return ChannelJson::parse(&text);
        }
        if let Some(eta) = &self.eta {
            let eta = vec3(eta)?;
            return ChannelJson::Diagonal { eta }.into_channel();
        }
        if let Some(name) = &self.map {
            return channel::catalog(name);
        }
        Err(Error::InvalidInput("no channel given; use --eta, --in or --map".into()))
    }

    fn eta(&self) -> Result<EtaVector> {
        diagonal_eta(&self.channel()?)
    }
}

fn vec3(v: &[f64]) -> Result<[f64; 3]> {
    v.try_into().map_err(|_| Error::InvalidInput(format!("expected 3 numbers, got {}", v.len())))
}

fn diagonal_eta(ch: &AffineChannel) -> Result<EtaVector> {
    let a = &ch.a.0;
    let off_diagonal = (0..3).any(|i| (0..3).any(|j| i != j && a[i][j] != 0.0));
    if off_diagonal || ch.b.iter().any(|x| *x != 0.0) {
        return Err(Error::InvalidInput("this operation needs a diagonal unital channel".into()));
    }
    Ok(EtaVector::new(a[0][0], a[1][1], a[2][2]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckTest {
    /// Complete positivity via the Choi spectrum.
    Cp,
    /// Positivity of a unital map on the Bloch ball.
    Positive,
    /// Membership of a diagonal map in the tetrahedron.
    Tetra,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProtocolArg {
    FourState,
    SixState,
}

impl From<ProtocolArg> for Protocol {
    fn from(p: ProtocolArg) -> Self {
        match p {
            ProtocolArg::FourState => Protocol::FourState,
            ProtocolArg::SixState => Protocol::SixState,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Test a channel for complete positivity.
    Check {
        #[command(flatten)]
        input: ChannelInput,
        #[arg(long, value_enum, default_value = "cp")]
        test: CheckTest,
    },
    /// Choi matrix and its spectrum.
    Choi {
        #[command(flatten)]
        input: ChannelInput,
    },
    /// Pauli weights of a diagonal map, or the map of given weights.
    Weights {
        #[command(flatten)]
        input: ChannelInput,
        /// Convert weights (p_I, p_x, p_y, p_z) back to eta instead.
        #[arg(long, num_args = 4, value_names = ["PI", "PX", "PY", "PZ"], allow_negative_numbers = true)]
        mixture: Option<Vec<f64>>,
    },
    /// Closest point of the tetrahedron, optionally with fixed components.
    Project {
        #[command(flatten)]
        input: ChannelInput,
        /// Hold a component fixed, e.g. `--fix x=-1`; repeatable.
        #[arg(long, value_name = "AXIS=VALUE", value_parser = parse_fix)]
        fix: Vec<(usize, f64)>,
    },
    /// Rotation-diagonal-rotation form of a unital map.
    Canon {
        #[command(flatten)]
        input: ChannelInput,
    },
    /// Compile a unital CP map to a rotation and Pauli-mixture network.
    Compile {
        #[command(flatten)]
        input: ChannelInput,
    },
    /// Push a Bloch vector through a channel or compiled network.
    Run {
        #[command(flatten)]
        input: ChannelInput,
        /// Network JSON file from `compile`, used instead of a channel.
        #[arg(long, value_name = "FILE")]
        network: Option<PathBuf>,
        /// Input Bloch vector.
        #[arg(long, num_args = 3, value_names = ["X", "Y", "Z"], allow_negative_numbers = true, default_values_t = [0.0, 0.0, 1.0])]
        bloch: Vec<f64>,
        /// Also sample the network N times.
        #[arg(long, value_name = "N")]
        n: Option<u64>,
        #[arg(long, value_name = "S", default_value_t = 0)]
        seed: u64,
    },
    /// Trajectory CSV of the ancilla-coupling model.
    Dynamics {
        /// Squared coupling strengths, normalized to sum 1.
        #[arg(long, num_args = 3, value_names = ["A", "B", "C"], required = true)]
        alpha2: Vec<f64>,
        #[arg(long, value_name = "T", default_value_t = std::f64::consts::PI)]
        tmax: f64,
        #[arg(long, value_name = "N", default_value_t = 100)]
        steps: usize,
        /// Evolve the full qubit-ancilla state instead of the closed form.
        #[arg(long)]
        full: bool,
    },
    /// Coupling and time realizing a diagonal CP map.
    Design {
        #[command(flatten)]
        input: ChannelInput,
    },
    /// Eavesdropping analysis.
    Qkd {
        #[arg(long, value_enum)]
        protocol: ProtocolArg,
        /// Disturbance budget; reports the optimal attack.
        #[arg(long, value_name = "D")]
        dmax: Option<f64>,
        /// With --dmax, grid-search the optimum at this resolution instead.
        #[arg(long, value_name = "RES", requires = "dmax")]
        brute: Option<f64>,
        /// With a channel, report probe overlaps from the dilation.
        #[arg(long)]
        dilation: bool,
        #[command(flatten)]
        input: ChannelInput,
    },
    /// Split a cube point into CP and transpose-of-CP parts.
    Sw {
        #[command(flatten)]
        input: ChannelInput,
    },
}

fn parse_fix(s: &str) -> std::result::Result<(usize, f64), String> {
    let (axis, value) = s.split_once('=').ok_or_else(|| format!("expected AXIS=VALUE, got `{s}`"))?;
    let axis = match axis.trim() {
        "x" => 0,
        "y" => 1,
        "z" => 2,
        other => return Err(format!("axis must be x, y or z, got `{other}`")),
    };
    let value: f64 = value.trim().parse().map_err(|e| format!("bad value `{value}`: {e}"))?;
    Ok((axis, value))
}

#[derive(Serialize)]
struct EtaOut {
    eta: EtaVector,
}

#[derive(Serialize)]
struct PositiveOut {
    positive: bool,
}

#[derive(Serialize)]
struct InDOut {
    in_d: bool,
}

#[derive(Serialize)]
struct ChoiOut {
    eigenvalues: Vec<f64>,
    min_eigenvalue: f64,
    /// Entries as `[re, im]`.
    matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize)]
struct WeightsOut {
    weights: PauliMixture,
    channel: bool,
}

#[derive(Serialize)]
struct SampledOut {
    n: u64,
    seed: u64,
    rng: &'static str,
    bloch: BlochVector,
    stderr: f64,
    counts: [u64; 4],
}

#[derive(Serialize)]
struct RunOut {
    bloch_in: BlochVector,
    #[serde(skip_serializing_if = "Option::is_none")]
    direct: Option<BlochVector>,
    exact: BlochVector,
    #[serde(skip_serializing_if = "Option::is_none")]
    sampled: Option<SampledOut>,
}

#[derive(Serialize)]
struct DesignOut {
    alpha: [f64; 3],
    t: f64,
}

#[derive(Serialize)]
struct SwOut {
    #[serde(flatten)]
    parts: tetra::SwDecomposition,
    cp2_transposed: EtaVector,
}

#[derive(Serialize)]
struct ErrorOut<'a> {
    error: &'a str,
    message: String,
}

enum Output {
    Json(String),
    Text(String),
}

fn json<T: Serialize>(value: &T) -> Result<Output> {
    to_json_g17(value)
        .map(Output::Json)
        .map_err(|e| Error::InvalidInput(format!("serialization failed: {e}")))
}

fn execute(command: Command) -> Result<Output> {
    match command {
        Command::Check { input, test } => {
            let ch = input.channel()?;
            match test {
                CheckTest::Cp => json(&channel::is_cp(&ch, CP_TOL)),
                CheckTest::Positive => json(&PositiveOut { positive: channel::is_positive_unital(&ch, CP_TOL)? }),
                CheckTest::Tetra => json(&InDOut { in_d: tetra::in_d(&diagonal_eta(&ch)?, MEMBERSHIP_TOL) }),
            }
        }
        Command::Choi { input } => {
            let c = channel::choi(&input.channel()?);
            let m = c.matrix();
            let matrix = (0..m.dim()).map(|i| (0..m.dim()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
            json(&ChoiOut { eigenvalues: c.eigenvalues(), min_eigenvalue: c.min_eigenvalue(), matrix })
        }
        Command::Weights { input, mixture } => match mixture {
            Some(p) => {
                let p: [f64; 4] = p.as_slice().try_into().map_err(|_| Error::InvalidInput("expected 4 weights".into()))?;
                json(&EtaOut { eta: tetra::mixture_to_eta(&PauliMixture(p))? })
            }
            None => {
                let weights = tetra::pauli_weights(&input.eta()?);
                json(&WeightsOut { channel: weights.is_channel(), weights })
            }
        },
        Command::Project { input, fix } => {
            let eta = input.eta()?;
            let projected = if fix.is_empty() {
                tetra::project_to_d(&eta)
            } else {
                let mut fixed = [None; 3];
                for (axis, v) in fix {
                    if fixed[axis].replace(v).is_some() {
                        return Err(Error::InvalidInput("each axis can be fixed once".into()));
                    }
                }
                tetra::project_constrained(&eta, fixed)?
            };
            json(&EtaOut { eta: projected })
        }
        Command::Canon { input } => {
            let cf: CanonicalForm = channel::canonical_form(&input.channel()?)?;
            json(&cf)
        }
        Command::Compile { input } => json(&netsim::compile(&input.channel()?)?),
        Command::Run { input, network, bloch, n, seed } => run_verb(&input, network, &bloch, n, seed),
        Command::Dynamics { alpha2, tmax, steps, full } => {
            let spec = CouplingSpec::normalized(vec3(&alpha2)?)?;
            if !tmax.is_finite() || tmax < 0.0 {
                return Err(Error::InvalidInput(format!("tmax must be finite and nonnegative, got {tmax}")));
            }
            let grid = dynamics::uniform_grid(tmax, steps);
            let traj = if full { full_trajectory(&spec, &grid)? } else { dynamics::trajectory(&spec, &grid)? };
            Ok(Output::Text(traj.to_csv()))
        }
        Command::Design { input } => {
            let (spec, t) = dynamics::design_coupling(&input.eta()?)?;
            json(&DesignOut { alpha: spec.alpha(), t })
        }
        Command::Qkd { protocol, dmax, brute, dilation, input } => {
            let protocol = Protocol::from(protocol);
            match (dmax, input.is_given()) {
                (Some(_), true) => Err(Error::InvalidInput("give either --dmax or a channel, not both".into())),
                (Some(d), false) => match brute {
                    Some(res) => json(&EtaOut { eta: qkd::brute_force_optimum(protocol, d, res)? }),
                    None => json(&qkd::optimal_attack(protocol, d)?),
                },
                (None, true) => {
                    let eta = input.eta()?;
                    if dilation {
                        json(&qkd::probe_overlaps_dilation(&eta)?)
                    } else {
                        json(&qkd::report(protocol, &eta)?)
                    }
                }
                (None, false) => Err(Error::InvalidInput("qkd needs --dmax or a channel".into())),
            }
        }
        Command::Sw { input } => {
            let parts = tetra::sw_decompose(&input.eta()?)?;
            json(&SwOut { cp2_transposed: tetra::compose(&parts.cp2, &EtaVector::TRANSPOSE), parts })
        }
    }
}

fn run_verb(input: &ChannelInput, network: Option<PathBuf>, bloch: &[f64], n: Option<u64>, seed: u64) -> Result<Output> {
    let (spec, direct_channel) = match network {
        Some(path) => {
            if input.is_given() {
                return Err(Error::InvalidInput("give either --network or a channel, not both".into()));
            }
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
            let spec: NetworkSpec =
                serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("network JSON: {e}")))?;
            spec.validate()?;
            (spec, None)
        }
        None => {
            let ch = input.channel()?;
            (netsim::compile(&ch)?, Some(ch))
        }
    };
    let s = BlochVector(vec3(bloch)?);
    let rho0 = channel::bloch_to_density(&s)?;
    let exact = channel::density_to_bloch(&netsim::run_exact(&spec, &rho0)?);
    let sampled = match n {
        Some(n) => {
            let run = netsim::run_sampled(&spec, &rho0, n, seed)?;
            Some(SampledOut {
                n,
                seed,
                rng: netsim::RNG_ALGORITHM,
                bloch: channel::density_to_bloch(&run.estimate),
                stderr: run.stderr,
                counts: run.counts,
            })
        }
        None => None,
    };
    let direct = direct_channel.map(|ch| channel::apply(&ch, &s));
    json(&RunOut { bloch_in: s, direct, exact, sampled })
}

/// Trajectory from the full qubit-ancilla evolution: `η_i` is the `i`-th
/// Bloch component of the output for the input `+i` eigenstate.
fn full_trajectory(spec: &CouplingSpec, grid: &[f64]) -> Result<Trajectory> {
    let inputs: Vec<_> = (0..3).map(|axis| channel::basis_state(axis, 0)).collect();
    let mut samples = Vec::with_capacity(grid.len());
    for &t in grid {
        let mut eta = [0.0; 3];
        for (axis, rho0) in inputs.iter().enumerate() {
            let out = dynamics::simulate_reduced(spec, t, rho0)?;
            eta[axis] = channel::density_to_bloch(&out).0[axis];
        }
        samples.push((t, EtaVector(eta)));
    }
    Ok(Trajectory { samples })
}

fn write_error(stderr: &mut dyn Write, kind: &str, message: String) {
    let body = to_json_g17(&ErrorOut { error: kind, message })
        .unwrap_or_else(|_| format!("{{\"error\": \"{kind}\"}}"));
    let _ = writeln!(stderr, "{body}");
}

/// Parses `args` (program name first), runs the verb and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(stdout, "{e}");
            return 0;
        }
        Err(e) => {
            let message = e.to_string();
            let first = message.lines().next().unwrap_or_default().trim_start_matches("error: ").to_string();
            write_error(stderr, "Usage", first);
            return 2;
        }
    };

    match execute(cli.command) {
        Ok(Output::Json(body)) => {
            let _ = writeln!(stdout, "{body}");
            0
        }
        Ok(Output::Text(body)) => {
            let _ = write!(stdout, "{body}");
            0
        }
        Err(e) => {
            write_error(stderr, e.kind(), e.to_string());
            if e.is_internal() {
                1
            } else {
                2
            }
        }
    }
}
