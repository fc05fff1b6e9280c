//! Command-line front end.

use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analysis;
use crate::bloch::{classify_region, BlochVector};
use crate::codes::{self, CodewordSet, PairWeightTable};
use crate::distill::{self, ErrorMap};
use crate::error::{Error, Result};
use crate::knownmaps::{self, KnownMap};
use crate::oracle::{self, DenseState};
use crate::stabreduce;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeSelector {
    Steane,
    Golay,
    Rm15,
    File(PathBuf),
}

impl FromStr for CodeSelector {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "steane" => Ok(CodeSelector::Steane),
            "golay" => Ok(CodeSelector::Golay),
            "rm15" => Ok(CodeSelector::Rm15),
            _ => match s.strip_prefix('@') {
                Some(p) if !p.is_empty() => Ok(CodeSelector::File(PathBuf::from(p))),
                _ => Err(format!("unknown code {s:?}; expected steane, golay, rm15 or @FILE")),
            },
        }
    }
}

impl CodeSelector {
    pub fn load(&self) -> Result<CodewordSet> {
        Ok(match self {
            CodeSelector::Steane => codes::steane_s(),
            CodeSelector::Golay => codes::golay_s(),
            CodeSelector::Rm15 => codes::rm15_s(),
            CodeSelector::File(p) => codes::parse_code_file(&std::fs::read_to_string(p)?)?,
        })
    }

    fn name(&self) -> String {
        match self {
            CodeSelector::Steane => "steane".into(),
            CodeSelector::Golay => "golay".into(),
            CodeSelector::Rm15 => "rm15".into(),
            CodeSelector::File(p) => format!("@{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, c] = parts.as_slice() else {
            return Err(format!("grid {s:?} is not min:max:count"));
        };
        let min: f64 = a.parse().map_err(|_| format!("bad grid minimum {a:?}"))?;
        let max: f64 = b.parse().map_err(|_| format!("bad grid maximum {b:?}"))?;
        let count: usize = c.parse().map_err(|_| format!("bad grid count {c:?}"))?;
        if count < 2 {
            return Err("grid count must be at least 2".into());
        }
        if !(0.0..=0.5).contains(&min) || !(0.0..=0.5).contains(&max) || min >= max {
            return Err(format!("grid range {min}:{max} must satisfy 0 <= min < max <= 1/2"));
        }
        Ok(GridSpec { min, max, count })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MapChoice {
    Bk15,
    T5,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "magicstate", version, about = "Exact H-type magic-state distillation maps from CSS codes")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Codeword set: steane, golay, rm15 or @FILE.
    #[arg(long, global = true, default_value = "steane")]
    pub code: CodeSelector,
    /// Worker threads for the pair-table enumeration.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Weight distribution and pair weight table.
    Tables,
    /// Exact acceptance and output polynomials.
    Map,
    /// CSV sweep of the output error over a grid of input errors.
    Sweep {
        /// Closed-form comparator instead of the code map.
        #[arg(long, value_enum)]
        map: Option<MapChoice>,
        #[arg(long, default_value = "0:0.5:101")]
        grid: GridSpec,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fixed points, their stability, and the threshold.
    Threshold {
        #[arg(long, value_enum)]
        map: Option<MapChoice>,
    },
    /// Region report for a Bloch vector `x,y,z`.
    Classify {
        #[arg(allow_hyphen_values = true)]
        vector: String,
    },
    /// Reduce a multi-qubit state file (`@FILE`) to one magic qubit.
    Reduce {
        state: String,
        /// Write the script here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check the engine against the dense oracle.
    Verify,
    /// Reference constants as JSON.
    Constants,
}

enum Failure {
    Domain(Error),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Domain(e.into())
    }
}

type CliResult = std::result::Result<(), Failure>;

/// Runs the command, writing results to `out` and diagnostics to `err`.
/// Returns the process exit code.
pub fn run_with(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if let Some(j) = cfg.global.jobs {
        // a second initialization in the same process is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
    let res = match &cfg.command {
        Command::Tables => tables(cfg, out),
        Command::Map => map(cfg, out),
        Command::Sweep { map, grid, out: path } => sweep(cfg, *map, grid, path.as_ref(), out),
        Command::Threshold { map } => threshold(cfg, *map, out),
        Command::Classify { vector } => classify(vector, out),
        Command::Reduce { state, out: path } => reduce(state, path.as_ref(), out),
        Command::Verify => verify(cfg, out),
        Command::Constants => constants(out),
    };
    match res {
        Ok(()) => 0,
        Err(Failure::Domain(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
        Err(Failure::Verification(msg)) => {
            let _ = writeln!(err, "verification failed: {msg}");
            2
        }
    }
}

pub fn run(cfg: RunConfig) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(&cfg, &mut stdout.lock(), &mut stderr.lock())
}

fn table_for(cfg: &RunConfig) -> Result<(CodewordSet, PairWeightTable)> {
    let s = cfg.global.code.load()?;
    codes::validate_s(&s).into_result()?;
    let t = codes::pair_weight_table(&s)?;
    Ok((s, t))
}

fn tables(cfg: &RunConfig, out: &mut dyn Write) -> CliResult {
    let (s, t) = table_for(cfg)?;
    writeln!(out, "# code {} n={} |S|={}", cfg.global.code.name(), s.n(), s.len())?;
    writeln!(out, "weight,count")?;
    for (w, c) in &codes::weight_distribution(&s).0 {
        writeln!(out, "{w},{c}")?;
    }
    writeln!(out)?;
    writeln!(out, "wa,wb,wc,count")?;
    for ((a, b, c), n) in t.entries() {
        writeln!(out, "{a},{b},{c},{n}")?;
    }
    Ok(())
}

fn map(cfg: &RunConfig, out: &mut dyn Write) -> CliResult {
    let (s, t) = table_for(cfg)?;
    let m = distill::DistillationMap::from_table(&t)?;
    writeln!(out, "# code {} n={} |S|={}", cfg.global.code.name(), s.n(), s.len())?;
    writeln!(out, "accept = {}", m.accept.to_factored_string())?;
    writeln!(out, "x_out = {}", m.x_out().to_factored_string())?;
    if !m.is_h_symmetric() {
        writeln!(out, "z_out = {}", m.z_out().to_factored_string())?;
        writeln!(out, "h_map = {}", m.h_map().to_factored_string())?;
    }
    Ok(())
}

/// Closed-form 15-qubit curve with its acceptance read from the `rm15`
/// engine.
struct Bk15WithAccept(PairWeightTable);

impl ErrorMap for Bk15WithAccept {
    fn apply(&self, p: f64) -> Result<(f64, Option<f64>)> {
        let p_out = knownmaps::bk15_pout(p)?;
        let (_, accept) = distill::a_axis_error_map(&self.0, p)?;
        Ok((p_out, Some(accept)))
    }
}

fn sweep(
    cfg: &RunConfig,
    choice: Option<MapChoice>,
    grid: &GridSpec,
    path: Option<&PathBuf>,
    out: &mut dyn Write,
) -> CliResult {
    let ps = distill::linear_grid(grid.min, grid.max, grid.count);
    let rows = match choice {
        Some(MapChoice::Bk15) => distill::sweep(&Bk15WithAccept(codes::pair_weight_table(&codes::rm15_s())?), &ps)?,
        Some(MapChoice::T5) => distill::sweep(&KnownMap::T5, &ps)?,
        None => {
            let (_, t) = table_for(cfg)?;
            distill::sweep(&distill::DistillationMap::from_table(&t)?, &ps)?
        }
    };
    let csv = distill::sweep_csv(&rows);
    match path {
        Some(p) => std::fs::write(p, csv)?,
        None => out.write_all(csv.as_bytes())?,
    }
    Ok(())
}

fn threshold(cfg: &RunConfig, choice: Option<MapChoice>, out: &mut dyn Write) -> CliResult {
    if let Some(c) = choice {
        let m = match c {
            MapChoice::Bk15 => KnownMap::Bk15,
            MapChoice::T5 => KnownMap::T5,
        };
        match analysis::threshold_of_error_map(&m)? {
            Some(p) => writeln!(out, "threshold p* = {p:.12}")?,
            None => writeln!(out, "no threshold")?,
        }
        return Ok(());
    }
    let (_, t) = table_for(cfg)?;
    let m = distill::DistillationMap::from_table(&t)?;
    writeln!(out, "# code {}", cfg.global.code.name())?;
    writeln!(out, "x_star,p_star,derivative,stability")?;
    for fp in analysis::fixed_points(&m) {
        writeln!(out, "{:.12},{:.12},{:.12},{}", fp.x_star, fp.p_star(), fp.derivative, fp.stability)?;
    }
    match analysis::threshold_p(&m) {
        Some(r) => {
            writeln!(out, "threshold x* = {:.12}, p* = {:.12}", r.threshold.x_star, r.p_star)?;
            match r.attractor {
                Some(a) if r.attractor_is_intermediate() => {
                    writeln!(out, "above threshold the map converges to x = {:.12}, not the pure state", a.x_star)?
                }
                Some(_) => writeln!(out, "above threshold the map converges to the pure state")?,
                None => writeln!(out, "no stable fixed point above threshold")?,
            }
        }
        None => writeln!(out, "no threshold")?,
    }
    Ok(())
}

fn classify(vector: &str, out: &mut dyn Write) -> CliResult {
    let v: BlochVector = vector.parse()?;
    let r = classify_region(&v)?;
    writeln!(out, "{}", r.label)?;
    writeln!(out, "bloch = {v}")?;
    writeln!(out, "h_fidelity = {:.12}", r.h_fidelity)?;
    writeln!(out, "h_error = {:.12}", r.h_error)?;
    writeln!(out, "t_projection = {:.12}", r.t_projection)?;
    let flags: Vec<String> = r.flags().iter().map(|f| f.to_string()).collect();
    writeln!(out, "flags = {}", if flags.is_empty() { "none".to_string() } else { flags.join(",") })?;
    Ok(())
}

fn reduce(state: &str, path: Option<&PathBuf>, out: &mut dyn Write) -> CliResult {
    let file =
        state.strip_prefix('@').ok_or_else(|| Error::Parse(format!("state argument {state:?} must be @FILE")))?;
    let psi = DenseState::parse(&std::fs::read_to_string(file)?)?;
    if psi.n() == 1 {
        let v = psi.single_qubit_bloch(0)?;
        writeln!(out, "# single qubit; nothing to reduce")?;
        writeln!(out, "final_bloch = {v}")?;
        writeln!(out, "region = {}", classify_region(&v)?.label)?;
        return Ok(());
    }
    let (script, v) = stabreduce::reduce_state(&psi)?;
    let replay = stabreduce::verify_script(&psi, &script)?;
    match path {
        Some(p) => std::fs::write(p, script.to_text())?,
        None => out.write_all(script.to_text().as_bytes())?,
    }
    writeln!(out, "# measurements = {}", script.measurement_count())?;
    writeln!(out, "# probability = {:.12}", replay.probability)?;
    writeln!(out, "# final_bloch = {:.12},{:.12},{:.12}", v.x, v.y, v.z)?;
    writeln!(out, "# max_pauli_expectation = {:.12}", v.max_pauli_expectation())?;
    writeln!(out, "# region = {}", classify_region(&v)?.label)?;
    if replay.final_bloch.max_pauli_expectation() >= 1.0 - stabreduce::NON_EIGEN_TOL {
        return Err(Failure::Verification("replayed qubit is a Pauli eigenstate".into()));
    }
    Ok(())
}

/// One named cross-check with its outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check { name: name.into(), passed, detail }
}

fn random_density(rng: &mut ChaCha8Rng) -> crate::bloch::SingleQubitDensity {
    use rand::Rng;
    loop {
        let v = BlochVector::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if v.is_physical() {
            return v.to_density();
        }
    }
}

/// Engine overlaps against the dense oracle on random qubits.
pub fn check_oracle_equivalence(s: &CodewordSet, samples: usize, seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table = codes::pair_weight_table(s)?;
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let rho = random_density(&mut rng);
        let a = distill::overlap_general_from_table(&table, &rho)?;
        let b = oracle::dense_overlaps(s, &rho)?;
        worst = worst.max(a.max_abs_diff(&b));
    }
    Ok(check("oracle equivalence", worst < 1e-10, format!("n={} samples={samples} max_abs_err={worst:.3e}", s.n())))
}

/// Identity sum and stability verdicts for built-in and random sets.
pub fn check_appendix_a(random_sets: usize, seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sets = vec![
        ("steane".to_string(), codes::steane_s()),
        ("golay".into(), codes::golay_s()),
        ("rm15".into(), codes::rm15_s()),
    ];
    for i in 0..random_sets {
        use rand::Rng;
        let n = rng.random_range(3..=10);
        sets.push((format!("random#{i} n={n}"), codes::random_valid_s(&mut rng, n, 3)));
    }
    let mut out = Vec::new();
    for (name, s) in sets {
        let r = analysis::appendix_a_instability(&s)?;
        out.push(check(
            &format!("identity/stability {name}"),
            num_traits::Zero::is_zero(&r.identity_sum) && r.consistent(),
            format!(
                "identity={} instability_sum={} f'(1/2)={}",
                r.identity_sum, r.instability_sum, r.derivative_at_half
            ),
        ));
    }
    Ok(out)
}

/// Random reductions and stabilizer detection for each `n`.
pub fn check_reductions(ns: &[usize], per_n: usize, seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for &n in ns {
        let mut failures = Vec::new();
        for i in 0..per_n {
            let psi = stabreduce::random_non_stabilizer_state(n, &mut rng);
            let res = stabreduce::reduce_state(&psi).and_then(|(script, _)| {
                let r = stabreduce::verify_script(&psi, &script)?;
                let ok = r.probability > 0.0
                    && script.measurement_count() == n - 1
                    && script.measurements_commute()
                    && r.final_bloch.max_pauli_expectation() < 1.0 - stabreduce::NON_EIGEN_TOL;
                Ok(ok)
            });
            match res {
                Ok(true) => {}
                Ok(false) => failures.push(format!("#{i}: bad script")),
                Err(e) => failures.push(format!("#{i}: {e}")),
            }
        }
        out.push(check(
            &format!("reduce n={n}"),
            failures.is_empty(),
            format!("{per_n} states, failures: {failures:?}"),
        ));

        let mut missed = 0;
        for _ in 0..per_n {
            let psi = stabreduce::random_stabilizer_state(n, &mut rng);
            if stabreduce::is_stabilizer_state(&psi)?.is_none() {
                missed += 1;
            }
        }
        out.push(check(&format!("detect stabilizer n={n}"), missed == 0, format!("{per_n} states, missed {missed}")));
    }
    Ok(out)
}

fn verify(cfg: &RunConfig, out: &mut dyn Write) -> CliResult {
    let seed = cfg.global.seed;
    let mut checks = Vec::new();
    let s = cfg.global.code.load()?;
    if s.n() <= oracle::MAX_QUBITS {
        checks.push(check_oracle_equivalence(&s, 100, seed)?);
    } else {
        writeln!(out, "SKIP oracle equivalence: n={} exceeds the dense limit", s.n())?;
    }
    checks.extend(check_appendix_a(20, seed)?);
    checks.extend(check_reductions(&[2, 3, 4, 5], 200, seed)?);
    let mut failed = Vec::new();
    for c in &checks {
        writeln!(out, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        if !c.passed {
            failed.push(c.name.clone());
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(failed.join(", ")))
    }
}

fn constants(out: &mut dyn Write) -> CliResult {
    let json = serde_json::to_string_pretty(&knownmaps::known_thresholds()).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out, "{json}")?;
    Ok(())
}
