use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use susyvqe::avqe::{
    avqe_run_with, extrapolate_ansatz, AVQETrace, DEFAULT_MAX_GATES, DEFAULT_THRESHOLD,
};
use susyvqe::model::{ground_state, SusyVerdict};
use susyvqe::pauli::DEFAULT_THRESHOLD as PAULI_THRESHOLD;
use susyvqe::record::RunRecord;
use susyvqe::scan::{crossover, noise_scan, NoiseScanConfig, ScanVariant};
use susyvqe::sim::{sample_circuit_expectation, SampledEstimate};
use susyvqe::{
    build_hamiltonian, decompose, exact_spectrum, minimize, model::boson_qubits, Ansatz,
    NoiseModel, OptimizerConfig, QubitHamiltonian, Superpotential, SuperpotentialSpec, VQEResult,
};

#[derive(Parser)]
#[command(
    name = "susyvqe",
    version,
    about = "Supersymmetric quantum mechanics on qubits"
)]
struct Cli {
    /// Directory for run records and CSV exports.
    #[arg(long, global = true, env = "SUSYVQE_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lowest eigenvalues by exact diagonalization, plus a SUSY verdict.
    Spectrum(SpectrumArgs),
    /// Pauli decomposition term count.
    Pauli(PauliArgs),
    /// Adaptive VQE.
    ///
    /// Writes a JSON run record holding the full trace and a CSV of
    /// per-step energies with columns: step, n_gates, energy, e_exact.
    Avqe(AvqeArgs),
    /// Fixed-ansatz VQE on the statevector, optionally re-evaluated with shots.
    ///
    /// Angles are always optimized on the exact statevector. With --shots > 0
    /// the optimum is then estimated from sampled measurements under --noise.
    Vqe(VqeArgs),
    /// Sweep two-qubit gate error for the full and the 4-gate truncated ansatz.
    ///
    /// CSV columns: p2, ansatz_variant, mean_energy_error, mean_energy,
    /// stderr, n_gates, seeds. mean_energy_error is |mean sampled energy -
    /// exact ground energy| over the seeds; stderr is the standard error of
    /// that mean.
    NoiseScan(NoiseScanArgs),
}

#[derive(Args, Clone, Copy, Serialize)]
struct ModelArgs {
    /// HO, AHO or DW.
    #[arg(short, long)]
    superpotential: Superpotential,
    /// Boson cutoff, a power of two >= 2.
    #[arg(short, long, value_parser = parse_lambda)]
    lambda: usize,
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    #[arg(long, default_value_t = 1.0)]
    g: f64,
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
}

impl ModelArgs {
    fn spec(&self) -> susyvqe::Result<SuperpotentialSpec> {
        SuperpotentialSpec::with_couplings(self.superpotential, self.m, self.g, self.mu)
    }
}

#[derive(Args, Clone, Copy, Serialize)]
struct OptArgs {
    #[arg(long, default_value_t = 100)]
    restarts: usize,
    #[arg(long, default_value_t = 2000)]
    max_evals: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl OptArgs {
    fn config(&self) -> OptimizerConfig {
        OptimizerConfig {
            restarts: self.restarts,
            max_evals: self.max_evals,
            seed: self.seed,
            ..OptimizerConfig::default()
        }
    }
}

#[derive(Args, Serialize)]
struct SpectrumArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Number of eigenvalues to print.
    #[arg(short, long, default_value_t = 4)]
    k: usize,
    /// E0 below this counts as unbroken SUSY.
    #[arg(long, default_value_t = 1e-3)]
    verdict_tol: f64,
}

#[derive(Args, Serialize)]
struct PauliArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Print the term list as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Serialize)]
struct AvqeArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    opt: OptArgs,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_GATES)]
    max_gates: usize,
    /// Trace JSON path; the CSV goes next to it with a .csv extension.
    /// Defaults to avqe.json in the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct VqeArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    opt: OptArgs,
    /// full (AVQE-built), trunc4 (4-gate pattern) or a path to an ansatz JSON.
    #[arg(long, default_value = "trunc4")]
    ansatz: String,
    /// 0 selects the exact statevector path.
    #[arg(long, default_value_t = 0)]
    shots: usize,
    /// p1,p2,r01,r10
    #[arg(long, default_value = "0,0,0,0")]
    noise: NoiseModel,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct NoiseScanArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    opt: OptArgs,
    /// Comma-separated two-qubit error probabilities.
    #[arg(long, value_delimiter = ',', default_value = "0,0.001,0.003,0.01")]
    p2_grid: Vec<f64>,
    #[arg(long, default_value_t = 0.0)]
    p1: f64,
    #[arg(long, default_value_t = 0.0)]
    r01: f64,
    #[arg(long, default_value_t = 0.0)]
    r10: f64,
    #[arg(long, default_value_t = 10_000)]
    shots: usize,
    /// Independent sampling seeds per grid point.
    #[arg(long, default_value_t = 20)]
    seeds: usize,
    /// Ansatz JSON used as the full variant instead of running AVQE.
    #[arg(long)]
    full_ansatz: Option<PathBuf>,
    /// CSV path; defaults to noise_scan.csv in the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_lambda(s: &str) -> Result<usize, String> {
    let lambda: usize = s.parse().map_err(|e| format!("{e}"))?;
    boson_qubits(lambda).map_err(|e| e.to_string())?;
    Ok(lambda)
}

type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> CliResult<ExitCode> {
    match &cli.command {
        Command::Spectrum(a) => spectrum(&cli.out_dir, a),
        Command::Pauli(a) => pauli(&cli.out_dir, a),
        Command::Avqe(a) => avqe(&cli.out_dir, a),
        Command::Vqe(a) => vqe(&cli.out_dir, a),
        Command::NoiseScan(a) => scan(&cli.out_dir, a),
    }
}

fn hamiltonian(model: &ModelArgs) -> CliResult<QubitHamiltonian> {
    Ok(build_hamiltonian(&model.spec()?, model.lambda)?)
}

fn write_record<C: Serialize, O: Serialize>(
    path: &Path,
    command: &str,
    config: &C,
    outputs: &O,
    seed: Option<u64>,
) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let record = RunRecord::new(command, config, outputs, seed)?;
    fs::write(path, record.to_json_pretty() + "\n")?;
    Ok(())
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SpectrumOutput {
    eigenvalues: Vec<f64>,
    verdict: SusyVerdict,
}

fn spectrum(out_dir: &Path, a: &SpectrumArgs) -> CliResult<ExitCode> {
    let h = hamiltonian(&a.model)?;
    let eigenvalues = exact_spectrum(&h, a.k)?;
    for (i, e) in eigenvalues.iter().enumerate() {
        println!("E_{i} = {e:.10}");
    }
    let verdict = SusyVerdict::from_spectrum(&eigenvalues, a.model.lambda, a.verdict_tol)
        .ok_or("k must be >= 1")?;
    println!("{verdict}");
    let out = SpectrumOutput {
        eigenvalues,
        verdict,
    };
    write_record(&out_dir.join("spectrum.json"), "spectrum", a, &out, None)?;
    Ok(ExitCode::SUCCESS)
}

fn pauli(out_dir: &Path, a: &PauliArgs) -> CliResult<ExitCode> {
    let h = hamiltonian(&a.model)?;
    let sum = decompose(&h, PAULI_THRESHOLD)?;
    println!("N_P = {}", sum.len());
    if a.json {
        println!("{}", sum.to_json());
    }
    write_record(&out_dir.join("pauli.json"), "pauli", a, &sum, None)?;
    Ok(ExitCode::SUCCESS)
}

fn avqe(out_dir: &Path, a: &AvqeArgs) -> CliResult<ExitCode> {
    let h = hamiltonian(&a.model)?;
    let trace = avqe_run_with(&h, a.threshold, a.max_gates, &a.opt.config())?;
    let json = a.out.clone().unwrap_or_else(|| out_dir.join("avqe.json"));
    write_record(&json, "avqe", a, &trace, Some(a.opt.seed))?;
    write_csv(&json.with_extension("csv"), &trace.rows())?;
    print_trace(&trace);
    if trace.is_aborted() {
        eprintln!("error: run aborted: {:?}", trace.termination);
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn print_trace(trace: &AVQETrace) {
    for s in &trace.steps {
        let mark = if s.accepted { "" } else { " (rejected)" };
        println!(
            "step {:>2}: {:<10} E = {:.8}{mark}",
            s.step_index + 1,
            s.chosen.to_string(),
            s.energy_after
        );
    }
    println!(
        "final E = {:.8} with {} gates (exact {:.8})",
        trace.final_energy,
        trace.n_gates(),
        trace.e_exact
    );
}

fn resolve_ansatz(name: &str, h: &QubitHamiltonian, opt: &OptimizerConfig) -> CliResult<Ansatz> {
    let ansatz = match name {
        "full" => {
            let trace = avqe_run_with(h, DEFAULT_THRESHOLD, DEFAULT_MAX_GATES, opt)?;
            if trace.is_aborted() {
                return Err(format!("AVQE aborted: {:?}", trace.termination).into());
            }
            trace.final_ansatz
        }
        "trunc4" => extrapolate_ansatz(&h.spec, h.lambda)?,
        path => Ansatz::from_json(&fs::read_to_string(path)?)?,
    };
    if ansatz.n_qubits() != h.n_qubits {
        return Err(format!(
            "ansatz acts on {} qubits, Hamiltonian on {}",
            ansatz.n_qubits(),
            h.n_qubits
        )
        .into());
    }
    Ok(ansatz)
}

#[derive(Serialize)]
struct VqeOutput {
    ansatz: Ansatz,
    result: VQEResult,
    e_exact: f64,
    sampled: Option<SampledEstimate>,
}

fn vqe(out_dir: &Path, a: &VqeArgs) -> CliResult<ExitCode> {
    if a.shots == 0 && !a.noise.is_noiseless() {
        return Err("noise requires the sampled path (--shots > 0)".into());
    }
    let h = hamiltonian(&a.model)?;
    let opt = a.opt.config();
    let ansatz = resolve_ansatz(&a.ansatz, &h, &opt)?;
    let objective = |t: &[f64]| ansatz.energy(&h, t).unwrap_or(f64::NAN);
    let result = minimize(objective, &vec![0.0; ansatz.n_params()], &opt)?;
    let (e_exact, _) = ground_state(&h)?;
    println!(
        "statevector E = {:.8} (exact {:.8})",
        result.energy, e_exact
    );
    let sampled = if a.shots > 0 {
        let sum = decompose(&h, PAULI_THRESHOLD)?;
        let est = sample_circuit_expectation(
            &ansatz,
            &result.theta_opt,
            &sum,
            a.shots,
            &a.noise,
            a.opt.seed,
        )?;
        println!(
            "sampled E = {:.6} ± {:.6} ({} shots)",
            est.estimate, est.stderr, a.shots
        );
        Some(est)
    } else {
        None
    };
    let out = VqeOutput {
        ansatz,
        result,
        e_exact,
        sampled,
    };
    let path = a.out.clone().unwrap_or_else(|| out_dir.join("vqe.json"));
    write_record(&path, "vqe", a, &out, Some(a.opt.seed))?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct ScanOutput {
    e_exact: f64,
    variants: Vec<ScanVariant>,
    energies: Vec<f64>,
    rows: Vec<susyvqe::scan::NoiseScanRow>,
    crossover_p2: Option<f64>,
}

fn scan(out_dir: &Path, a: &NoiseScanArgs) -> CliResult<ExitCode> {
    if a.p2_grid.is_empty() {
        return Err("p2 grid is empty".into());
    }
    let h = hamiltonian(&a.model)?;
    let opt = a.opt.config();
    let full = match &a.full_ansatz {
        Some(p) => resolve_ansatz(&p.to_string_lossy(), &h, &opt)?,
        None => resolve_ansatz("full", &h, &opt)?,
    };
    let trunc = resolve_ansatz("trunc4", &h, &opt)?;
    let (full, rf) = ScanVariant::optimized("full", full, &h, &opt)?;
    let (trunc, rt) = ScanVariant::optimized("trunc4", trunc, &h, &opt)?;
    let (e_exact, _) = ground_state(&h)?;
    let sum = decompose(&h, PAULI_THRESHOLD)?;
    let cfg = NoiseScanConfig {
        p2_grid: a.p2_grid.clone(),
        p1: a.p1,
        r01: a.r01,
        r10: a.r10,
        shots: a.shots,
        seeds: a.seeds,
        seed: a.opt.seed,
    };
    let rows = noise_scan(&sum, e_exact, &[full.clone(), trunc.clone()], &cfg)?;
    let csv_path = a
        .out
        .clone()
        .unwrap_or_else(|| out_dir.join("noise_scan.csv"));
    write_csv(&csv_path, &rows)?;
    for r in &rows {
        println!(
            "p2 = {:<8} {:<7} error = {:.5} ± {:.5}",
            r.p2, r.ansatz_variant, r.mean_energy_error, r.stderr
        );
    }
    let crossover_p2 = crossover(&rows, "full", "trunc4");
    match crossover_p2 {
        Some(p) => println!("trunc4 no worse than full from p2 = {p}"),
        None => println!("no crossover on this grid"),
    }
    let out = ScanOutput {
        e_exact,
        variants: vec![full, trunc],
        energies: vec![rf.energy, rt.energy],
        rows,
        crossover_p2,
    };
    write_record(
        &csv_path.with_extension("json"),
        "noise-scan",
        a,
        &out,
        Some(a.opt.seed),
    )?;
    Ok(ExitCode::SUCCESS)
}
