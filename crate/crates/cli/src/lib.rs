//! Command-line driver: argument model, config merging, report rendering.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use fdeform_core::acceptance::{self, AcceptanceOptions, Check};

mod commands;

pub const TOOL: &str = "fdeform";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Columns,
}

#[derive(Debug, Parser)]
#[command(name = "fdeform", version, about = "Deformed oscillator algebras: matrix checks and simulations")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Master seed for stochastic commands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON object of flag values; explicit flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Matrix checks of the deformed commutation relations.
    Algebra(AlgebraArgs),
    /// Three-point fit of the charged lepton masses.
    Leptons(LeptonArgs),
    /// Classical deformed oscillator trajectory and frequency.
    Classical(ClassicalArgs),
    /// Exact diagonalization of the deformed Hubbard model.
    Hubbard(HubbardArgs),
    /// Deformed white noise: paths and quadratic forms.
    Noise(NoiseArgs),
    /// Charged boson field with charge-dependent deformation.
    Field(FieldArgs),
    /// Run every acceptance criterion and print a pass/fail table.
    VerifyAll,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Algebra(_) => "algebra",
            Command::Leptons(_) => "leptons",
            Command::Classical(_) => "classical",
            Command::Hubbard(_) => "hubbard",
            Command::Noise(_) => "noise",
            Command::Field(_) => "field",
            Command::VerifyAll => "verify-all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgebraCheck {
    Qboson,
    General,
    JordanSchwingerBoson,
    JordanSchwingerFermion,
}

#[derive(Debug, Args, Serialize)]
pub struct AlgebraArgs {
    #[arg(long, value_enum, default_value = "qboson")]
    pub which: AlgebraCheck,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub lambda: f64,
    /// Per-mode Fock cutoff.
    #[arg(long, default_value_t = 32)]
    pub dim: usize,
    /// Interior margin; defaults to 1 for one mode and 2 for two.
    #[arg(long)]
    pub margin: Option<usize>,
    /// Slope of g(n) = 1 + slope·n for `--which general`.
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub g_slope: f64,
    /// Curvature of h(n) = 1 + curvature·n² for `--which general`.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub h_curvature: f64,
    /// Replace f by the identity before checking (negative control).
    #[arg(long)]
    pub force_f_identity: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct LeptonArgs {
    #[arg(long, default_value_t = 0.511)]
    pub m_e: f64,
    #[arg(long, default_value_t = 105.658)]
    pub m_mu: f64,
    #[arg(long, default_value_t = 1776.86)]
    pub m_tau: f64,
    #[arg(long, default_value_t = 3)]
    pub n_max: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegratorArg {
    Rk4,
    Midpoint,
}

#[derive(Debug, Args, Serialize)]
pub struct ClassicalArgs {
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub lambda: f64,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub q0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub p0: f64,
    #[arg(long, default_value_t = 1e-3, allow_negative_numbers = true)]
    pub dt: f64,
    /// Integration length in predicted periods.
    #[arg(long, default_value_t = 3.0)]
    pub periods: f64,
    #[arg(long, value_enum, default_value = "rk4")]
    pub integrator: IntegratorArg,
    /// Keep every n-th sample in the column output.
    #[arg(long, default_value_t = 10)]
    pub stride: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryArg {
    Open,
    Ring,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderingArg {
    SiteMajor,
    SpinMajor,
}

#[derive(Debug, Args, Serialize)]
pub struct HubbardArgs {
    #[arg(long, default_value_t = 2)]
    pub sites: usize,
    #[arg(long, value_enum, default_value = "open")]
    pub geometry: GeometryArg,
    /// Deformation parameter q > 0.
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub t: f64,
    #[arg(long = "U", default_value_t = 4.0, allow_negative_numbers = true)]
    #[serde(rename = "U")]
    pub u: f64,
    /// `N_up,N_down`; every sector when omitted.
    #[arg(long, value_parser = parse_sector)]
    pub sector: Option<(usize, usize)>,
    #[arg(long, value_enum, default_value = "site-major")]
    pub ordering: OrderingArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum XiArg {
    Gaussian,
    RaisedCosine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConventionArg {
    Complex,
    Real,
}

#[derive(Debug, Args, Serialize)]
pub struct NoiseArgs {
    #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
    pub lambda: f64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Mode cutoff; chosen automatically when omitted.
    #[arg(long)]
    pub cutoff: Option<usize>,
    #[arg(long, value_enum, default_value = "gaussian")]
    pub xi: XiArg,
    /// Gaussian scale or raised-cosine half-width (defaults 1 and 2).
    #[arg(long)]
    pub xi_width: Option<f64>,
    #[arg(long, value_enum, default_value = "complex")]
    pub convention: ConventionArg,
    /// Number of sample paths to include in the report.
    #[arg(long, default_value_t = 1)]
    pub paths: usize,
    #[arg(long, default_value_t = 10.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 201)]
    pub grid_points: usize,
    /// Also fit the small-λ structure of the quadratic form.
    #[arg(long)]
    pub structure: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct FieldArgs {
    /// Momentum magnitudes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub modes: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub m0: f64,
    /// Polynomial coefficients of M²(q), lowest order first.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with = "m2_table")]
    pub m2: Option<Vec<f64>>,
    /// `min_charge:v0,v1,...` table of M²(q).
    #[arg(long)]
    pub m2_table: Option<String>,
    #[arg(long, default_value_t = 5)]
    pub cutoff: usize,
    #[arg(long, default_value_t = 2)]
    pub margin: usize,
}

fn parse_sector(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected N_up,N_down, got {s:?}"))?;
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

/// Failure of a command: bad input (exit 2) or a domain error (exit 1).
#[derive(Debug, Clone, PartialEq)]
pub enum CmdError {
    Usage(String),
    Domain { kind: String, message: String },
}

impl CmdError {
    pub fn domain<E: std::fmt::Debug + std::fmt::Display>(e: E) -> Self {
        let debug = format!("{e:?}");
        let kind = debug
            .split(|c: char| !c.is_alphanumeric() && c != '_')
            .next()
            .unwrap_or("Error")
            .to_string();
        CmdError::Domain { kind, message: e.to_string() }
    }
}

/// Module payload produced by one command.
#[derive(Debug, Default)]
pub struct Outcome {
    /// Keyed by the operation that produced each entry.
    pub results: Map<String, Value>,
    pub checks: Vec<Check>,
    /// Plottable text for `--format columns`.
    pub columns: Option<String>,
}

impl Outcome {
    pub fn insert(&mut self, key: &str, value: impl Serialize) {
        self.results.insert(key.to_string(), serde_json::to_value(value).expect("serializable payload"));
    }
}

#[derive(Debug, Serialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub parameters: Value,
    pub results: Map<String, Value>,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub error: Option<ErrorInfo>,
    pub wall_time_s: f64,
}

/// A subcommand, the module operations it reaches and a runnable example.
pub struct DispatchEntry {
    pub command: &'static str,
    pub operations: &'static [&'static str],
    pub example: &'static [&'static str],
}

pub const DISPATCH: &[DispatchEntry] = &[
    DispatchEntry {
        command: "algebra",
        operations: &["build_boson_rep", "deform", "f_squared_boson", "check_qboson_relation", "deformed_spectrum"],
        example: &["algebra", "--which", "qboson", "--lambda", "0.5", "--dim", "32"],
    },
    DispatchEntry {
        command: "algebra",
        operations: &["build_boson_rep", "deform", "solve_f_from_gh_boson", "check_general_relation"],
        example: &["algebra", "--which", "general", "--dim", "24"],
    },
    DispatchEntry {
        command: "algebra",
        operations: &["build_boson_rep", "check_jordan_schwinger"],
        example: &["algebra", "--which", "jordan-schwinger-boson", "--dim", "12"],
    },
    DispatchEntry {
        command: "algebra",
        operations: &["build_fermion_modes", "f_bar_fermion", "solve_f_from_gh_fermion", "check_jordan_schwinger"],
        example: &["algebra", "--which", "jordan-schwinger-fermion"],
    },
    DispatchEntry {
        command: "leptons",
        operations: &["lepton_fit"],
        example: &["leptons"],
    },
    DispatchEntry {
        command: "classical",
        operations: &["integrate", "measure_frequency", "predicted_frequency"],
        example: &["classical", "--lambda", "0.5", "--q0", "2", "--p0", "0"],
    },
    DispatchEntry {
        command: "hubbard",
        operations: &["build_deformed_hubbard", "diagonalize", "hopping_amplitude_table"],
        example: &["hubbard", "--sites", "2", "--q", "1", "--t", "1", "--U", "4", "--sector", "1,1"],
    },
    DispatchEntry {
        command: "noise",
        operations: &[
            "deformed_frequency",
            "sample_paths",
            "spectral_quadratic_form",
            "mc_quadratic_form",
            "small_lambda_structure",
        ],
        example: &["noise", "--lambda", "0.3", "--samples", "2000", "--seed", "7", "--xi", "gaussian", "--structure"],
    },
    DispatchEntry {
        command: "field",
        operations: &["build_field", "hamiltonian", "verify_deformed_relations"],
        example: &["field", "--modes", "0,1", "--m0", "1", "--m2", "1,0,1", "--cutoff", "4"],
    },
];

const GLOBAL_VALUE_FLAGS: [&str; 4] = ["--format", "--output", "--seed", "--config"];

fn find_config(args: &[OsString]) -> Result<Option<PathBuf>, String> {
    let mut it = args.iter().skip(1);
    let mut found = None;
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            let v = it.next().ok_or("--config needs a path")?;
            found = Some(PathBuf::from(v));
        } else if let Some(v) = s.strip_prefix("--config=") {
            found = Some(PathBuf::from(v));
        }
    }
    Ok(found)
}

fn subcommand_position(args: &[OsString]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let s = args[i].to_string_lossy();
        if GLOBAL_VALUE_FLAGS.contains(&s.as_ref()) {
            i += 2;
        } else if s.starts_with('-') {
            i += 1;
        } else {
            return Some(i);
        }
    }
    None
}

/// Flag tokens for a JSON config object. Keys are long flag names with
/// either `-` or `_` separators; `true` becomes a bare switch, arrays are
/// comma joined.
pub fn config_tokens(config: &Value) -> Result<Vec<OsString>, String> {
    let obj = config.as_object().ok_or("config must be a JSON object")?;
    let mut out = Vec::new();
    for (key, value) in obj {
        if key == "config" {
            return Err("config files cannot nest --config".into());
        }
        let flag = if key == "U" { "--U".to_string() } else { format!("--{}", key.replace('_', "-")) };
        let scalar = |v: &Value| -> Result<String, String> {
            match v {
                Value::String(s) => Ok(s.clone()),
                Value::Number(n) => Ok(n.to_string()),
                Value::Bool(b) => Ok(b.to_string()),
                _ => Err(format!("unsupported value for {key}: {v}")),
            }
        };
        match value {
            Value::Bool(true) => out.push(flag.into()),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) => {
                let parts: Result<Vec<String>, String> = items.iter().map(scalar).collect();
                out.push(flag.into());
                out.push(parts?.join(",").into());
            }
            v => {
                out.push(flag.into());
                out.push(scalar(v)?.into());
            }
        }
    }
    Ok(out)
}

/// Argument vector with config-file flags placed ahead of the user's own
/// subcommand flags, so explicit flags win.
pub fn merge_config(args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let Some(path) = find_config(&args)? else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| format!("invalid JSON in {}: {e}", path.display()))?;
    let obj = value.as_object().ok_or("config must be a JSON object")?;
    let (global, local): (Map<String, Value>, Map<String, Value>) = obj
        .clone()
        .into_iter()
        .partition(|(k, _)| GLOBAL_VALUE_FLAGS.contains(&format!("--{}", k.replace('_', "-")).as_str()));
    let pos = subcommand_position(&args).ok_or("a subcommand is required")?;
    let mut merged = vec![args[0].clone()];
    merged.extend(config_tokens(&Value::Object(global))?);
    merged.extend_from_slice(&args[1..=pos]);
    merged.extend(config_tokens(&Value::Object(local))?);
    merged.extend_from_slice(&args[pos + 1..]);
    Ok(merged)
}

fn render_columns(outcome: &Outcome, report: &Report) -> String {
    if let Some(c) = &outcome.columns {
        return c.clone();
    }
    let mut out = String::from("# check value bound passed\n");
    for c in &report.checks {
        out.push_str(&format!("{:?} {:.6e} {:.6e} {}\n", c.name, c.value, c.bound, c.passed));
    }
    if let Some(e) = &report.error {
        out.push_str(&format!("# error {}: {}\n", e.kind, e.message));
    }
    out
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<(), String> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| e.to_string())
        }
    }
}

fn parameters(cli: &Cli) -> Value {
    let args = match &cli.command {
        Command::Algebra(a) => serde_json::to_value(a),
        Command::Leptons(a) => serde_json::to_value(a),
        Command::Classical(a) => serde_json::to_value(a),
        Command::Hubbard(a) => serde_json::to_value(a),
        Command::Noise(a) => serde_json::to_value(a),
        Command::Field(a) => serde_json::to_value(a),
        Command::VerifyAll => Ok(json!({})),
    }
    .expect("serializable arguments");
    json!({ "seed": cli.seed, "format": cli.format, "command": args })
}

fn verify_all(seed: Option<u64>) -> Outcome {
    let opts = AcceptanceOptions { seed: seed.unwrap_or(acceptance::DEFAULT_SEED) };
    let start = Instant::now();
    let outcomes = acceptance::run_all(&opts);
    let total = start.elapsed().as_secs_f64();
    let mut table = String::new();
    for o in &outcomes {
        table.push_str(&o.summary_line());
        table.push('\n');
    }
    let all = outcomes.iter().all(|o| o.passed);
    table.push_str(&format!("{} end_to_end total {:.3}s / 180s\n", if all && total < 180.0 { "PASS" } else { "FAIL" }, total));
    let mut checks: Vec<Check> = outcomes
        .iter()
        .map(|o| Check::above(format!("criterion {}", o.id), if o.passed { 1.0 } else { 0.0 }, 0.5))
        .collect();
    checks.push(Check::below("total runtime (s)", total, 180.0));
    let mut outcome = Outcome { checks, columns: Some(table), ..Outcome::default() };
    outcome.insert("criteria", &outcomes);
    outcome
}

/// Parses, runs and reports; returns the process exit status.
pub fn run(args: Vec<OsString>) -> i32 {
    let args = match merge_config(args) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let start = Instant::now();
    let result = match &cli.command {
        Command::Algebra(a) => commands::algebra(a),
        Command::Leptons(a) => commands::leptons(a),
        Command::Classical(a) => commands::classical(a),
        Command::Hubbard(a) => commands::hubbard(a),
        Command::Noise(a) => commands::noise(a, cli.seed),
        Command::Field(a) => commands::field(a),
        Command::VerifyAll => Ok(verify_all(cli.seed)),
    };
    let (outcome, error) = match result {
        Ok(o) => (o, None),
        Err(CmdError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
        Err(CmdError::Domain { kind, message }) => (Outcome::default(), Some(ErrorInfo { kind, message })),
    };
    let passed = error.is_none() && outcome.checks.iter().all(|c| c.passed);
    let report = Report {
        tool: TOOL,
        version: VERSION,
        command: cli.command.name(),
        parameters: parameters(&cli),
        results: outcome.results.clone(),
        checks: outcome.checks.clone(),
        passed,
        error,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    if let Some(e) = &report.error {
        eprintln!("error: {}: {}", e.kind, e.message);
    }
    if matches!(cli.command, Command::VerifyAll) && cli.format == Format::Json {
        eprint!("{}", outcome.columns.as_deref().unwrap_or_default());
    }
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        Format::Columns => render_columns(&outcome, &report),
    };
    if let Err(msg) = emit(&text, cli.output.as_ref()) {
        eprintln!("error: {msg}");
        return EXIT_FAIL;
    }
    if passed {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn config_tokens_forms() {
        let v = json!({"lambda": 0.3, "force_f_identity": true, "structure": false, "modes": [0, 1], "xi": "gaussian"});
        let t: Vec<String> = config_tokens(&v).unwrap().into_iter().map(|s| s.into_string().unwrap()).collect();
        assert_eq!(t, ["--force-f-identity", "--lambda", "0.3", "--modes", "0,1", "--xi", "gaussian"]);
        assert!(config_tokens(&json!([1, 2])).is_err());
        assert!(config_tokens(&json!({"config": "x"})).is_err());
    }

    #[test]
    fn subcommand_is_found_after_globals() {
        assert_eq!(subcommand_position(&os(&["fdeform", "--seed", "3", "--format", "json", "noise"])), Some(5));
        assert_eq!(subcommand_position(&os(&["fdeform", "algebra", "--lambda", "1"])), Some(1));
        assert_eq!(subcommand_position(&os(&["fdeform", "--seed", "3"])), None);
    }

    #[test]
    fn explicit_flags_override_config() {
        let dir = std::env::temp_dir().join(format!("fdeform-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.json");
        std::fs::write(&path, r#"{"lambda": 0.9, "dim": 16, "seed": 5}"#).unwrap();
        let args = os(&["fdeform", "--seed", "9", "--config", path.to_str().unwrap(), "algebra", "--lambda", "0.2"]);
        let cli = Cli::try_parse_from(merge_config(args).unwrap()).unwrap();
        assert_eq!(cli.seed, Some(9));
        match cli.command {
            Command::Algebra(a) => {
                assert_eq!(a.lambda, 0.2);
                assert_eq!(a.dim, 16);
            }
            _ => panic!("wrong command"),
        }
    }

    #[test]
    fn sector_parser() {
        assert_eq!(parse_sector("1,2"), Ok((1, 2)));
        assert!(parse_sector("1").is_err());
        assert!(parse_sector("a,1").is_err());
    }

    #[test]
    fn error_kind_is_variant_name() {
        let e = fdeform_core::deform::DeformError::DomainError("x".into());
        match CmdError::domain(e) {
            CmdError::Domain { kind, .. } => assert_eq!(kind, "DomainError"),
            _ => panic!(),
        }
    }

    #[test]
    fn dispatch_names_real_commands() {
        for entry in DISPATCH {
            assert_eq!(entry.example[0], entry.command);
            let mut args = vec!["fdeform"];
            args.extend_from_slice(entry.example);
            let cli = Cli::try_parse_from(args).unwrap();
            assert_eq!(cli.command.name(), entry.command);
        }
    }
}
