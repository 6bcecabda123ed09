use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use qfy::builders::{build, BuildSpec, Variant};
use qfy::cost::CostProfile;
use qfy::json::{from_json, to_json};
use qfy::mcx::{lower_circuit, LoweringLevel, McxMode};
use qfy::permutation::{sample_fisher_yates, Direction};
use qfy::prep::{Encoding, PrepSpec};
use qfy::qasm::{from_qasm, to_qasm};
use qfy::resources::{resource_report, scaling_table};
use qfy::simulator::{branch_table, run, sample, InitialState};
use qfy::verify::{verify, VerifyOptions, DEFAULT_SEED};
use qfy::{Circuit, Error};

const EXIT_FAILED: u8 = 1;
const EXIT_SIZE: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_IO: u8 = 74;

#[derive(Parser)]
#[command(name = "qfy", version, about = "Build, simulate and cost Fisher-Yates permutation circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a circuit and write it as JSON or OpenQASM.
    Build {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Lowering applied after building.
        #[arg(long, value_enum, default_value_t = Lower::None)]
        lower: Lower,
        /// Multi-controlled X synthesis used by `--lower full`.
        #[arg(long, default_value = "abstract", value_parser = parse_lib::<McxMode>)]
        mcx: McxMode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate a circuit file and print its branches.
    Simulate {
        #[arg(long)]
        circuit: PathBuf,
        /// Initial subregister values, e.g. `d=0,1,2`. Repeatable.
        #[arg(long = "init", value_parser = parse_init)]
        init: Vec<(String, Vec<u64>)>,
        /// Measurement shots; 0 skips sampling.
        #[arg(long, default_value_t = 0)]
        shots: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Register whose measurement histogram is reported; defaults to `p`
        /// when present, else the first register.
        #[arg(long)]
        register: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build, simulate and check a circuit; exits 1 on any failed check.
    Verify {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
        #[arg(long, default_value_t = 1e-3)]
        significance: f64,
        /// 0 picks max(10^4, 20 n!).
        #[arg(long, default_value_t = 0)]
        shots: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form and measured resource counts.
    Count {
        #[command(flatten)]
        spec: SpecArgs,
        /// JSON cost profile; unit costs when omitted.
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CSV of formula counts for n = n-min..=n-max.
    Table {
        #[arg(long, value_parser = parse_lib::<Variant>)]
        variant: Variant,
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value = "binary", value_parser = parse_lib::<Encoding>)]
        encoding: Encoding,
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classical Fisher-Yates samples, one JSON word per line.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        shots: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Order::Reversed)]
        direction: Order,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Uniform-superposition preparation over 0..=i.
    Prep {
        #[arg(long)]
        i: usize,
        #[arg(long, default_value = "binary", value_parser = parse_lib::<Encoding>)]
        encoding: Encoding,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SpecArgs {
    /// A, At, B, Bt or C.
    #[arg(long, value_parser = parse_lib::<Variant>)]
    variant: Variant,
    #[arg(long)]
    n: usize,
    /// Data width for the shuffle variants.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value = "binary", value_parser = parse_lib::<Encoding>)]
    encoding: Encoding,
}

impl SpecArgs {
    fn spec(&self) -> Result<BuildSpec, Failure> {
        Ok(BuildSpec::new(self.variant, self.n, self.m, self.encoding)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Qasm,
}

#[derive(Clone, Copy, ValueEnum)]
enum Lower {
    None,
    Counting,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    Forward,
    Reversed,
}

fn parse_lib<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_init(s: &str) -> Result<(String, Vec<u64>), String> {
    let (name, values) = s.split_once('=').ok_or("expected NAME=V1,V2,...")?;
    let values = values
        .split(',')
        .map(|v| v.trim().parse::<u64>().map_err(|e| format!("`{v}`: {e}")))
        .collect::<Result<_, _>>()?;
    Ok((name.trim().to_string(), values))
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure { code: EXIT_IO, message: format!("{}: {e}", path.display()) }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SimulationCap { .. } | Error::TooLarge { .. } | Error::TooManyBranches(_) => EXIT_SIZE,
            Error::Parse(_) => EXIT_DATA,
            _ => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| Failure::io(Path::new("<stdout>"), e))
        }
    }
}

fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn read_circuit(path: &Path) -> Result<Circuit, Failure> {
    let text = read_text(path)?;
    let is_qasm = path.extension().is_some_and(|e| e == "qasm") || text.trim_start().starts_with("OPENQASM");
    Ok(if is_qasm { from_qasm(&text)? } else { from_json(&text)? })
}

fn read_profile(path: Option<&Path>) -> Result<CostProfile, Failure> {
    match path {
        Some(p) => Ok(CostProfile::from_json(&read_text(p)?)?),
        None => Ok(CostProfile::unit()),
    }
}

fn render(circuit: &Circuit, format: Format) -> Result<String, Failure> {
    Ok(match format {
        Format::Json => to_json(circuit)? + "\n",
        Format::Qasm => to_qasm(circuit),
    })
}

#[derive(Serialize)]
struct BranchOut {
    index: usize,
    registers: BTreeMap<String, Vec<u64>>,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct SimulationOut {
    qubits: usize,
    norm: f64,
    branches: Vec<BranchOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    histogram: Option<Histogram>,
}

#[derive(Serialize)]
struct Histogram {
    register: String,
    shots: usize,
    seed: u64,
    counts: BTreeMap<String, usize>,
}

fn simulate(
    path: &Path,
    init: Vec<(String, Vec<u64>)>,
    shots: usize,
    seed: u64,
    register: Option<String>,
) -> Result<SimulationOut, Failure> {
    let circuit = read_circuit(path)?;
    let initial = if init.is_empty() { InitialState::Zero } else { InitialState::Registers(init) };
    let state = run(&circuit, &initial)?;
    let branches = branch_table(&circuit, &state, &[])?
        .into_iter()
        .map(|b| BranchOut {
            index: b.index,
            registers: b.registers.into_iter().collect(),
            re: b.amplitude.re,
            im: b.amplitude.im,
        })
        .collect();
    let histogram = if shots == 0 {
        None
    } else {
        let register = match register {
            Some(r) => r,
            None if circuit.has_register("p") => "p".to_string(),
            None => circuit
                .registers()
                .first()
                .map(|r| r.name.clone())
                .ok_or_else(|| Failure { code: EXIT_USAGE, message: "circuit has no registers to sample".into() })?,
        };
        let counts = sample(&circuit, &state, shots, seed, &register)?
            .into_iter()
            .map(|(values, count)| {
                let key = values.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
                (key, count)
            })
            .collect();
        Some(Histogram { register, shots, seed, counts })
    };
    Ok(SimulationOut { qubits: circuit.num_qubits(), norm: state.norm_sqr(), branches, histogram })
}

fn execute(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Build { spec, format, lower, mcx, out } => {
            let circuit = build(&spec.spec()?)?;
            let circuit = match lower {
                Lower::None => circuit,
                Lower::Counting => lower_circuit(&circuit, LoweringLevel::Counting, mcx)?,
                Lower::Full => lower_circuit(&circuit, LoweringLevel::Full, mcx)?,
            };
            write_output(out.as_deref(), &render(&circuit, format)?)?;
        }
        Command::Simulate { circuit, init, shots, seed, register, out } => {
            let result = simulate(&circuit, init, shots, seed, register)?;
            write_output(out.as_deref(), &to_pretty(&result))?;
        }
        Command::Verify { spec, tolerance, significance, shots, seed, out } => {
            let options = VerifyOptions { tolerance, significance, shots, seed };
            let report = verify(&spec.spec()?, &options)?;
            write_output(out.as_deref(), &to_pretty(&report))?;
            if !report.overall {
                for c in report.checks.iter().filter(|c| !c.passed) {
                    eprintln!("check {} failed: metric {:e}, tolerance {:e}", c.name, c.metric, c.tolerance);
                }
                return Ok(EXIT_FAILED);
            }
        }
        Command::Count { spec, profile, out } => {
            let profile = read_profile(profile.as_deref())?;
            let report = resource_report(&spec.spec()?, &profile)?;
            write_output(out.as_deref(), &to_pretty(&report))?;
        }
        Command::Table { variant, n_min, n_max, m, encoding, profile, out } => {
            if n_min > n_max {
                return Err(Failure { code: EXIT_USAGE, message: format!("--n-min {n_min} exceeds --n-max {n_max}") });
            }
            let profile = read_profile(profile.as_deref())?;
            let m = if variant.has_data() { Some(m.unwrap_or(1)) } else { m };
            let mut csv = String::from("n,qubits,gates,cycles\n");
            for row in scaling_table(variant, n_min..=n_max, m, encoding, &profile)? {
                csv.push_str(&format!("{},{},{},{}\n", row.n, row.qubits, row.gates, row.cycles));
            }
            write_output(out.as_deref(), &csv)?;
        }
        Command::Sample { n, shots, seed, direction, out } => {
            let direction = match direction {
                Order::Forward => Direction::Forward,
                Order::Reversed => Direction::Reversed,
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut lines = String::new();
            for _ in 0..shots {
                let word = sample_fisher_yates(n, direction, &mut rng);
                lines.push_str(&serde_json::to_string(word.as_slice()).expect("word serializes"));
                lines.push('\n');
            }
            write_output(out.as_deref(), &lines)?;
        }
        Command::Prep { i, encoding, format, out } => {
            let circuit = PrepSpec::new(i, encoding)?.build()?;
            write_output(out.as_deref(), &render(&circuit, format)?)?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("qfy: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
