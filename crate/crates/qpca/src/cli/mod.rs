//! Command-line front end.
//!
//! Subcommands: `generate | attack | trace | bruteforce | verify-gates`.
//! Every option can come from flags or from a `--config` file with
//! `key=value` lines (flags override the file). Exit codes are stable:
//! 0 success/agreement, 2 parameter error, 3 attack disagreement,
//! 4 resource limit, 5 I/O failure.

pub mod report;

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use crate::attack::{consistent_seeds_bruteforce, execute_attack};
use crate::bits::BitSeq;
use crate::generators::{
    bbs_spec, bit_width, default_generator, generate_bits, kaliski_spec, BbsParams, CurveParams,
    EcPoint, GeneratorSpec,
};
use crate::statevec::{GateMatrix, DEFAULT_QUBIT_CAP};
use crate::Error;

use report::GateCheck;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARAMETER: i32 = 2;
pub const EXIT_DISAGREEMENT: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;
pub const EXIT_IO: i32 = 5;

const UNITARITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(
    name = "qpca",
    version,
    about = "State-compromise attacks on Blum-Micali generators (BBS, Kaliski)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the generator classically and print states and bits
    Generate(Opts),
    /// Execute the compromise attack and print the report
    Attack(Opts),
    /// Emit the labeled intermediate states psi0..psi(2m+2)
    Trace(Opts),
    /// Exhaustively list seeds consistent with the observed bits
    Bruteforce(Opts),
    /// Build the compiled gate matrices and check unitarity
    VerifyGates(Opts),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Bbs,
    Kaliski,
}

impl FromStr for GenKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "bbs" => Ok(GenKind::Bbs),
            "kaliski" => Ok(GenKind::Kaliski),
            other => Err(format!("unknown generator kind {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(OutputFormat::Text),
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown format {other:?}")),
        }
    }
}

/// The shared option set; which fields are required depends on the command.
#[derive(Debug, Default, Args)]
pub struct Opts {
    /// Generator family
    #[arg(long, value_enum)]
    pub gen: Option<GenKind>,
    /// BBS modulus M
    #[arg(long)]
    pub modulus: Option<u64>,
    /// BBS hard-core bit position (1 = most significant of n bits, n = lsb)
    #[arg(long)]
    pub j: Option<usize>,
    /// Kaliski curve prime p (p = 2 mod 3)
    #[arg(long)]
    pub prime: Option<u64>,
    /// Kaliski curve coefficient c in y^2 = x^3 + c
    #[arg(long)]
    pub c: Option<u64>,
    /// x-coordinate of the generator point Q (default: first generator)
    #[arg(long)]
    pub qx: Option<u64>,
    /// y-coordinate of the generator point Q
    #[arg(long)]
    pub qy: Option<u64>,
    /// Observed output bits, e.g. 10
    #[arg(long)]
    pub bits: Option<String>,
    /// Seed state for generate (a true-domain encoding)
    #[arg(long = "seed-state")]
    pub seed_state: Option<usize>,
    /// Number of generator steps
    #[arg(long)]
    pub steps: Option<usize>,
    /// Seed for the measurement sampler
    #[arg(long = "rng-seed")]
    pub rng_seed: Option<u64>,
    /// Output format
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Trace output path (stdout when omitted)
    #[arg(long = "trace-out")]
    pub trace_out: Option<PathBuf>,
    /// Config file with key=value lines; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// A CLI failure with its exit code.
#[derive(Debug)]
pub enum CliError {
    Lib(Error),
    Io {
        context: String,
        source: std::io::Error,
    },
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(Error::Resource(_)) => EXIT_RESOURCE,
            CliError::Lib(_) => EXIT_PARAMETER,
            CliError::Io { .. } => EXIT_IO,
            CliError::Usage(_) => EXIT_PARAMETER,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e) => e.fmt(f),
            CliError::Io { context, source } => write!(f, "{context}: {source}"),
            CliError::Usage(message) => f.write_str(message),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

/// Fully resolved configuration (flags merged over the config file).
#[derive(Debug, Clone)]
pub struct RunConfig {
    kind: GenKind,
    modulus: Option<u64>,
    j: Option<usize>,
    prime: Option<u64>,
    c: Option<u64>,
    q: Option<(u64, u64)>,
    bits: Option<BitSeq>,
    seed_state: Option<usize>,
    steps: Option<usize>,
    rng_seed: u64,
    format: OutputFormat,
    trace_out: Option<PathBuf>,
}

const CONFIG_KEYS: [&str; 13] = [
    "gen",
    "modulus",
    "j",
    "prime",
    "c",
    "qx",
    "qy",
    "bits",
    "seed-state",
    "steps",
    "rng-seed",
    "format",
    "trace-out",
];

#[derive(Default)]
struct FileConfig(HashMap<String, String>);

impl FileConfig {
    fn load(path: &Path) -> Result<Self, CliError> {
        let content = fs::read_to_string(path).map_err(|source| CliError::Io {
            context: format!("reading config {}", path.display()),
            source,
        })?;
        let mut map = HashMap::new();
        for (number, raw) in content.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "config line {}: expected key=value, found {raw:?}",
                    number + 1
                )));
            };
            let key = key.trim();
            if !CONFIG_KEYS.contains(&key) {
                return Err(CliError::Usage(format!(
                    "config line {}: unknown key {key:?}",
                    number + 1
                )));
            }
            map.insert(key.to_owned(), value.trim().to_owned());
        }
        Ok(FileConfig(map))
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }
}

fn merge<T: FromStr>(flag: Option<T>, file: &FileConfig, key: &str) -> Result<Option<T>, CliError>
where
    T::Err: fmt::Display,
{
    if flag.is_some() {
        return Ok(flag);
    }
    match file.get(key) {
        Some(raw) => raw
            .parse::<T>()
            .map(Some)
            .map_err(|e| CliError::Usage(format!("config value {key}={raw}: {e}"))),
        None => Ok(None),
    }
}

/// Merges flags over the config file and validates the parameter blocks.
pub fn resolve(opts: Opts) -> Result<RunConfig, CliError> {
    let file = match &opts.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };

    let kind = merge(opts.gen, &file, "gen")?
        .ok_or_else(|| CliError::Usage("--gen bbs|kaliski is required".into()))?;
    let modulus = merge(opts.modulus, &file, "modulus")?;
    let j = merge(opts.j, &file, "j")?;
    let prime = merge(opts.prime, &file, "prime")?;
    let c = merge(opts.c, &file, "c")?;
    let qx = merge(opts.qx, &file, "qx")?;
    let qy = merge(opts.qy, &file, "qy")?;
    let bits = match merge(opts.bits, &file, "bits")? {
        Some(raw) => Some(raw.parse::<BitSeq>()?),
        None => None,
    };
    let seed_state = merge(opts.seed_state, &file, "seed-state")?;
    let steps = merge(opts.steps, &file, "steps")?;
    let rng_seed = merge(opts.rng_seed, &file, "rng-seed")?.unwrap_or(0);
    let format = merge(opts.format, &file, "format")?.unwrap_or(OutputFormat::Text);
    let trace_out = merge(opts.trace_out, &file, "trace-out")?;

    match kind {
        GenKind::Bbs => {
            if modulus.is_none() || j.is_none() {
                return Err(CliError::Usage(
                    "--gen bbs requires --modulus and --j".into(),
                ));
            }
            if prime.is_some() || c.is_some() || qx.is_some() || qy.is_some() {
                return Err(CliError::Usage(
                    "kaliski parameters given alongside --gen bbs".into(),
                ));
            }
        }
        GenKind::Kaliski => {
            if prime.is_none() || c.is_none() {
                return Err(CliError::Usage(
                    "--gen kaliski requires --prime and --c".into(),
                ));
            }
            if modulus.is_some() || j.is_some() {
                return Err(CliError::Usage(
                    "bbs parameters given alongside --gen kaliski".into(),
                ));
            }
            if qx.is_some() != qy.is_some() {
                return Err(CliError::Usage("--qx and --qy go together".into()));
            }
        }
    }

    Ok(RunConfig {
        kind,
        modulus,
        j,
        prime,
        c,
        q: qx.zip(qy),
        bits,
        seed_state,
        steps,
        rng_seed,
        format,
        trace_out,
    })
}

/// Structured generator parameters as they appear in reports.
type ParamList = Vec<(&'static str, u64)>;

impl RunConfig {
    /// Builds the generator spec plus its structured parameter list (with
    /// the resolved generator point for Kaliski). `bit_qubits` sizes the
    /// resource pre-check so oversized instances fail before any table is
    /// allocated.
    fn resolve_generator(&self, bit_qubits: usize) -> Result<(GeneratorSpec, ParamList), CliError> {
        match self.kind {
            GenKind::Bbs => {
                let modulus = self.modulus.expect("validated in resolve");
                let j = self.j.expect("validated in resolve");
                let params = BbsParams::new(modulus, j)?;
                check_qubits(params.width(), bit_qubits)?;
                let spec = bbs_spec(&params)?;
                Ok((spec, vec![("modulus", modulus), ("j", j as u64)]))
            }
            GenKind::Kaliski => {
                let prime = self.prime.expect("validated in resolve");
                let c = self.c.expect("validated in resolve");
                // Size check first: trial division and point enumeration on
                // a huge prime would crawl long before the tables allocate.
                check_qubits(bit_width(prime.saturating_add(2)), bit_qubits)?;
                let curve = CurveParams::new(prime, c)?;
                let generator = match self.q {
                    Some((x, y)) => EcPoint::affine(x, y),
                    None => default_generator(&curve)?,
                };
                let spec = kaliski_spec(&curve, &generator)?;
                let (qx, qy) = match generator {
                    EcPoint::Affine { x, y } => (x, y),
                    EcPoint::Infinity => unreachable!("generators are affine"),
                };
                Ok((
                    spec,
                    vec![("prime", prime), ("c", c), ("qx", qx), ("qy", qy)],
                ))
            }
        }
    }

    fn required_bits(&self) -> Result<BitSeq, CliError> {
        self.bits
            .clone()
            .ok_or_else(|| CliError::Usage("--bits is required for this command".into()))
    }
}

fn check_qubits(domain_qubits: usize, bit_qubits: usize) -> Result<(), CliError> {
    let total = domain_qubits + bit_qubits + 1;
    if total > DEFAULT_QUBIT_CAP {
        return Err(CliError::Lib(Error::Resource(format!(
            "instance needs {total} qubits ({domain_qubits} domain + {bit_qubits} bit + \
             1 ancilla), cap is {DEFAULT_QUBIT_CAP}"
        ))));
    }
    Ok(())
}

fn params_value(params: &[(&str, u64)]) -> Value {
    let mut map = Map::new();
    for &(key, value) in params {
        map.insert(key.to_owned(), value.into());
    }
    Value::Object(map)
}

/// Runs one parsed invocation and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let outcome = match cli.command {
        Command::Generate(opts) => resolve(opts).and_then(cmd_generate),
        Command::Attack(opts) => resolve(opts).and_then(cmd_attack),
        Command::Trace(opts) => resolve(opts).and_then(cmd_trace),
        Command::Bruteforce(opts) => resolve(opts).and_then(cmd_bruteforce),
        Command::VerifyGates(opts) => resolve(opts).and_then(cmd_verify_gates),
    };
    match outcome {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error}");
            error.exit_code()
        }
    }
}

fn cmd_generate(config: RunConfig) -> Result<i32, CliError> {
    let (spec, _) = config.resolve_generator(1)?;
    let seed = config
        .seed_state
        .ok_or_else(|| CliError::Usage("--seed-state is required for generate".into()))?;
    let steps = config
        .steps
        .ok_or_else(|| CliError::Usage("--steps is required for generate".into()))?;
    let sequence = generate_bits(&spec, seed, steps)?;
    match config.format {
        OutputFormat::Text => print!("{}", report::generate_text(&sequence)),
        OutputFormat::Json => println!(
            "{}",
            report::to_canonical_json(&report::generate_json(&sequence))
        ),
        OutputFormat::Csv => print!("{}", report::generate_csv(&sequence)),
    }
    Ok(EXIT_OK)
}

fn cmd_attack(config: RunConfig) -> Result<i32, CliError> {
    let bits = config.required_bits()?;
    let (spec, params) = config.resolve_generator(bits.len())?;
    let attack_report = execute_attack(&spec, &bits, config.rng_seed)?;
    match config.format {
        OutputFormat::Text => print!("{}", report::attack_report_text(&attack_report)),
        OutputFormat::Json => println!(
            "{}",
            report::to_canonical_json(&report::attack_report_value(
                &attack_report,
                params_value(&params),
            ))
        ),
        OutputFormat::Csv => print!("{}", report::attack_report_csv(&attack_report, &params)),
    }
    Ok(if attack_report.agreement {
        EXIT_OK
    } else {
        EXIT_DISAGREEMENT
    })
}

fn cmd_trace(config: RunConfig) -> Result<i32, CliError> {
    let bits = config.required_bits()?;
    let (spec, _) = config.resolve_generator(bits.len())?;
    let attack_report = execute_attack(&spec, &bits, config.rng_seed)?;
    let text = report::trace_text(&attack_report);
    match &config.trace_out {
        Some(path) => fs::write(path, &text).map_err(|source| CliError::Io {
            context: format!("writing trace to {}", path.display()),
            source,
        })?,
        None => print!("{text}"),
    }
    Ok(EXIT_OK)
}

fn cmd_bruteforce(config: RunConfig) -> Result<i32, CliError> {
    let bits = config.required_bits()?;
    let (spec, _) = config.resolve_generator(1)?;
    let started = Instant::now();
    let seeds: Vec<usize> = consistent_seeds_bruteforce(&spec, &bits)?
        .into_iter()
        .collect();
    let elapsed = started.elapsed().as_secs_f64();
    match config.format {
        OutputFormat::Text => print!("{}", report::bruteforce_text(&seeds, elapsed)),
        OutputFormat::Json => println!(
            "{}",
            report::to_canonical_json(&report::bruteforce_json(&seeds, elapsed))
        ),
        OutputFormat::Csv => print!("{}", report::bruteforce_csv(&seeds, elapsed)),
    }
    Ok(EXIT_OK)
}

fn cmd_verify_gates(config: RunConfig) -> Result<i32, CliError> {
    let (spec, _) = config.resolve_generator(1)?;
    let mut checks = Vec::new();
    let rho = GateMatrix::from_permutation(spec.permutation())?;
    checks.push(gate_check("rho".to_owned(), &rho));
    for bit in [0u8, 1] {
        let gate = GateMatrix::from_predicate(&spec.marked_for_bit(bit))?;
        checks.push(gate_check(
            format!("{}{}", spec.predicate_symbol(), bit),
            &gate,
        ));
    }
    match config.format {
        OutputFormat::Text => print!("{}", report::verify_text(&checks)),
        OutputFormat::Json => println!(
            "{}",
            report::to_canonical_json(&report::verify_json(&checks))
        ),
        OutputFormat::Csv => print!("{}", report::verify_csv(&checks)),
    }
    Ok(if checks.iter().all(|c| c.unitary) {
        EXIT_OK
    } else {
        EXIT_PARAMETER
    })
}

fn gate_check(name: String, gate: &GateMatrix) -> GateCheck {
    let max_deviation = gate.unitarity_deviation();
    GateCheck {
        name,
        dim: gate.dim(),
        max_deviation,
        unitary: max_deviation <= UNITARITY_TOLERANCE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn opts() -> Opts {
        Opts::default()
    }

    #[test]
    fn resolve_requires_generator_kind() {
        let err = resolve(opts()).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_PARAMETER);
    }

    #[test]
    fn resolve_validates_parameter_blocks() {
        let mut o = opts();
        o.gen = Some(GenKind::Bbs);
        o.modulus = Some(21);
        assert!(resolve(o).is_err()); // missing --j

        let mut o = opts();
        o.gen = Some(GenKind::Bbs);
        o.modulus = Some(21);
        o.j = Some(5);
        o.prime = Some(5);
        assert!(resolve(o).is_err()); // mixed blocks

        let mut o = opts();
        o.gen = Some(GenKind::Kaliski);
        o.prime = Some(5);
        o.c = Some(1);
        o.qx = Some(2);
        assert!(resolve(o).is_err()); // qx without qy
    }

    #[test]
    fn config_file_is_merged_and_flags_override() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "# reference instance").unwrap();
        writeln!(file, "gen=bbs").unwrap();
        writeln!(file, "modulus=21").unwrap();
        writeln!(file, "j=5").unwrap();
        writeln!(file, "bits=10").unwrap();
        writeln!(file, "format=json").unwrap();

        let mut o = opts();
        o.config = Some(file.path().to_path_buf());
        let config = resolve(o).unwrap();
        assert_eq!(config.kind, GenKind::Bbs);
        assert_eq!(config.modulus, Some(21));
        assert_eq!(config.format, OutputFormat::Json);
        assert_eq!(config.bits.as_ref().unwrap().to_string(), "10");

        let mut o = opts();
        o.config = Some(file.path().to_path_buf());
        o.bits = Some("01".into());
        o.format = Some(OutputFormat::Csv);
        let config = resolve(o).unwrap();
        assert_eq!(config.bits.as_ref().unwrap().to_string(), "01");
        assert_eq!(config.format, OutputFormat::Csv);
    }

    #[test]
    fn config_file_rejects_unknown_keys() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "gen=bbs").unwrap();
        writeln!(file, "mystery=1").unwrap();
        let mut o = opts();
        o.config = Some(file.path().to_path_buf());
        let err = resolve(o).unwrap_err();
        assert!(err.to_string().contains("mystery"), "{err}");
    }

    #[test]
    fn missing_config_file_is_io_error() {
        let mut o = opts();
        o.config = Some(PathBuf::from("/nonexistent/qpca.conf"));
        let err = resolve(o).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_IO);
    }

    #[test]
    fn oversized_instance_is_resource_error() {
        let mut o = opts();
        o.gen = Some(GenKind::Bbs);
        o.modulus = Some((1 << 25) + 1);
        o.j = Some(5);
        o.bits = Some("10".into());
        let config = resolve(o).unwrap();
        let err = cmd_attack(config).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_RESOURCE);
    }

    #[test]
    fn kaliski_default_generator_point_is_resolved() {
        let mut o = opts();
        o.gen = Some(GenKind::Kaliski);
        o.prime = Some(5);
        o.c = Some(1);
        let config = resolve(o).unwrap();
        let (_, params) = config.resolve_generator(1).unwrap();
        assert_eq!(params, vec![("prime", 5), ("c", 1), ("qx", 2), ("qy", 2)]);
    }
}
