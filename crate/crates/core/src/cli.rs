//! Command-line front end. Every command builds a [`ReportDocument`], prints
//! it, and maps the outcome to an exit code: 0 all checks pass, 1 a check
//! failed, 2 bad usage or input.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuit::{compose_transfer_matrix, Circuit};
use crate::error::{Error, Result};
use crate::evolution::evolve;
use crate::fock::{FockStateVector, OccupationVector};
use crate::gates::{
    biased_ns_amplitudes, build_biased_ns_circuit, build_ns_circuit, closed_form, ns_conditional_map,
    solve_biased_ns, solve_optimal_ns, BiasedNsParameters, Conditioning, Cut, GateKind, NsParameters, BASIS_INPUTS,
};
use crate::harness::{
    bell_test, heisenberg_consistency, input_label, intermediate_state_check, moment_matrix, parse_basis_input,
    sensitivity_sweep, truth_table, cnot_image, expected_success_probability, Amp, Check, PerturbationModel,
    SweepConfig, SweepMode, ERROR_CLAIM, EXACT_TOL, ZERO_TOL,
};
use crate::loader::load_circuit;
use crate::postselect::condition;
use crate::report::ReportDocument;

pub const DEFAULT_SEED: u64 = 20010;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "photon-gates", version, about = "Simulate and verify post-selected linear-optical gates")]
pub struct Cli {
    /// Also write the JSON report to this file.
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Write tabular data (sweep samples, truth-table rows, moments) as CSV.
    #[arg(long, global = true, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub rng_seed: u64,
    /// Format of the report printed to stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Conditional map and success probability of an NS gate.
    NsVerify {
        /// The two-splitter biased variant.
        #[arg(long)]
        biased: bool,
        #[arg(long)]
        eta1: Option<f64>,
        #[arg(long)]
        eta2: Option<f64>,
        #[arg(long)]
        eta3: Option<f64>,
        #[arg(long)]
        eta7: Option<f64>,
        /// Random normalized inputs used to check input independence of the success probability.
        #[arg(long, default_value_t = 20)]
        inputs: usize,
    },
    /// Logical truth table and coincidence moments of a CNOT.
    TruthTable {
        gate: GateKind,
        #[arg(long, default_value_t = Conditioning::Heralded)]
        conditioning: Conditioning,
    },
    /// Four-fold coincidence moments, checked against the transfer-matrix oracle.
    Moments {
        gate: GateKind,
        /// Single basis input such as HV; all four when omitted.
        #[arg(long)]
        input: Option<String>,
    },
    /// Bell states from a superposed control.
    BellTest {
        gate: GateKind,
        #[arg(long, default_value_t = Conditioning::Heralded)]
        conditioning: Conditioning,
    },
    /// Interior states at the cuts of a CNOT.
    Intermediate {
        gate: GateKind,
        /// x or y for cnot, z for cnot-simplified; every cut of the gate when omitted.
        #[arg(long)]
        cut: Option<Cut>,
        #[arg(long)]
        input: Option<String>,
    },
    /// Logical error under beamsplitter reflectivity errors.
    Sweep {
        #[arg(long, default_value_t = GateKind::Cnot)]
        gate: GateKind,
        #[arg(long, default_value = "absolute")]
        model: PerturbationModel,
        #[arg(long, default_value_t = 0.02)]
        magnitude: f64,
        #[arg(long, default_value = "corners")]
        mode: SweepMode,
        /// Draws for random mode.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = Conditioning::Heralded)]
        conditioning: Conditioning,
    },
    /// Solve the balance conditions for the NS and biased NS reflectivities.
    SolveParams,
    /// Evolve a state through a circuit file.
    RunCircuit {
        file: PathBuf,
        /// Occupations like "1,1" or "10", or a superposition "0.6*1,0;0.8*0,1".
        /// Signal-only occupations are completed with the ancilla preparation.
        #[arg(long)]
        input: String,
    },
}

struct Output {
    doc: ReportDocument,
    table: Option<Table>,
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

/// Run a parsed command line and return the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok(out) => match emit(cli, &out) {
            Ok(()) if out.doc.pass => EXIT_PASS,
            Ok(()) => EXIT_FAIL,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_USAGE
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn emit(cli: &Cli, out: &Output) -> Result<()> {
    let json = out.doc.to_json();
    if let Some(path) = &cli.json {
        write_file(path, json.as_bytes())?;
    }
    if let (Some(path), Some(table)) = (&cli.csv, &out.table) {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
        w.write_record(&table.header).map_err(io)?;
        for row in &table.rows {
            w.write_record(row).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
        write_file(path, &bytes)?;
    }
    match cli.format {
        Format::Json => print!("{json}"),
        Format::Text => print!("{}", out.doc.to_text()),
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))
}

fn execute(cli: &Cli) -> Result<Output> {
    let has_table = matches!(cli.command, Command::TruthTable { .. } | Command::Moments { .. } | Command::Sweep { .. });
    if cli.csv.is_some() && !has_table {
        return Err(Error::InvalidArgument("--csv is only produced by truth-table, moments and sweep".into()));
    }
    match &cli.command {
        Command::NsVerify { biased, eta1, eta2, eta3, eta7, inputs } => {
            ns_verify(*biased, [*eta1, *eta2, *eta3, *eta7], *inputs, cli.rng_seed)
        }
        Command::TruthTable { gate, conditioning } => cmd_truth_table(*gate, *conditioning),
        Command::Moments { gate, input } => cmd_moments(*gate, input.as_deref()),
        Command::BellTest { gate, conditioning } => {
            let report = bell_test::<f64>(*gate, *conditioning)?;
            let pass = report.pass;
            let inputs = Echo::gate(*gate).conditioning(*conditioning);
            Ok(Output { doc: ReportDocument::new("bell-test", &inputs, &report, pass)?, table: None })
        }
        Command::Intermediate { gate, cut, input } => cmd_intermediate(*gate, *cut, input.as_deref()),
        Command::Sweep { gate, model, magnitude, mode, samples, conditioning } => {
            let config = SweepConfig {
                gate: *gate,
                model: *model,
                magnitude: *magnitude,
                mode: *mode,
                samples: *samples,
                seed: cli.rng_seed,
                conditioning: *conditioning,
            };
            cmd_sweep(&config)
        }
        Command::SolveParams => solve_params(),
        Command::RunCircuit { file, input } => run_circuit(file, input),
    }
}

#[derive(Serialize, Default)]
struct Echo {
    #[serde(skip_serializing_if = "Option::is_none")]
    gate: Option<GateKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    conditioning: Option<Conditioning>,
}

impl Echo {
    fn gate(gate: GateKind) -> Self {
        Self { gate: Some(gate), ..Self::default() }
    }

    fn conditioning(mut self, c: Conditioning) -> Self {
        self.conditioning = Some(c);
        self
    }
}

fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}

#[derive(Serialize)]
struct NsInputs {
    biased: bool,
    eta1: Option<f64>,
    eta2: Option<f64>,
    eta3: Option<f64>,
    eta7: Option<f64>,
    inputs: usize,
    rng_seed: u64,
}

#[derive(Serialize)]
struct NsResults {
    gate: GateKind,
    reflectivities: Vec<(String, f64)>,
    lambda_closed_form: [f64; 3],
    lambda_circuit: [f64; 3],
    closed_form_vs_circuit: f64,
    balanced: bool,
    /// λ0², the success probability when the map is balanced.
    vacuum_success_probability: f64,
    random_inputs: usize,
    min_success_probability: f64,
    max_success_probability: f64,
    checks: Vec<Check>,
}

fn ns_verify(biased: bool, etas: [Option<f64>; 4], inputs: usize, seed: u64) -> Result<Output> {
    let [eta1, eta2, eta3, eta7] = etas;
    let defaults = etas.iter().all(Option::is_none);
    let (kind, circuit, closed) = if biased {
        if eta1.is_some() || eta3.is_some() {
            return Err(Error::InvalidArgument("--eta1/--eta3 do not apply to the biased gate (use --eta2, --eta7)".into()));
        }
        let d = BiasedNsParameters::<f64>::balanced();
        let p = BiasedNsParameters::new(eta2.unwrap_or(d.eta2), eta7.unwrap_or(d.eta7))?;
        (GateKind::NsBiased, build_biased_ns_circuit(&p), biased_ns_amplitudes(&p))
    } else {
        if eta7.is_some() {
            return Err(Error::InvalidArgument("--eta7 applies only with --biased".into()));
        }
        let d = NsParameters::<f64>::optimal();
        let p = NsParameters::new(eta1.unwrap_or(d.eta1), eta2.unwrap_or(d.eta2), eta3.unwrap_or(d.eta3))?;
        (GateKind::Ns, build_ns_circuit(&p), ns_conditional_map(&p))
    };

    let mut lambda_circuit = [0.0; 3];
    for (n, slot) in lambda_circuit.iter_mut().enumerate() {
        let input = FockStateVector::basis(circuit.input_occupation(&[n as u8])?);
        let out = condition(&evolve(&input, &circuit)?, &circuit.detection)?;
        *slot = out.reduced_state.amplitude(&OccupationVector::from([n as u8])).re;
    }
    let deviation = closed.iter().zip(&lambda_circuit).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let [l0, l1, l2] = closed;
    let p0 = l0 * l0;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probabilities = Vec::with_capacity(inputs);
    for _ in 0..inputs {
        let mut coeffs: Vec<Complex<f64>> =
            (0..3).map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        coeffs.iter_mut().for_each(|c| *c /= norm);
        let mut entries = Vec::new();
        for (n, &c) in coeffs.iter().enumerate() {
            entries.push((circuit.input_occupation(&[n as u8])?, c));
        }
        // photon number differs per term, so evolve each sector and add the conditioned branches
        let mut p = 0.0;
        for (occ, c) in entries {
            let out = condition(&evolve(&FockStateVector::basis(occ), &circuit)?, &circuit.detection)?;
            p += c.norm_sqr() * out.success_probability;
        }
        probabilities.push(p);
    }
    let min_p = probabilities.iter().copied().fold(f64::INFINITY, f64::min);
    let max_p = probabilities.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let mut checks = vec![
        Check::below("closed form vs circuit evolution", deviation, EXACT_TOL),
        Check::near("balance lambda1 = lambda0", l1 - l0, 0.0, EXACT_TOL),
        Check::near("balance lambda2 = -lambda0", l2 + l0, 0.0, EXACT_TOL),
    ];
    for (i, &p) in probabilities.iter().enumerate() {
        checks.push(Check::near(format!("random input {i}: success probability"), p, p0, EXACT_TOL));
    }
    if defaults {
        let expected_p = if biased { closed_form::eta2_biased::<f64>() } else { 0.25 };
        checks.push(Check::near("success probability", p0, expected_p, EXACT_TOL));
        if !biased {
            for (i, (&l, e)) in closed.iter().zip([0.5, 0.5, -0.5]).enumerate() {
                checks.push(Check::near(format!("lambda{i}"), l, e, EXACT_TOL));
            }
        }
        checks.push(Check::below("transfer-matrix oracle", heisenberg_consistency::<f64>(kind)?, ZERO_TOL));
    }
    let balanced = checks[1].pass && checks[2].pass;
    let results = NsResults {
        gate: kind,
        reflectivities: circuit
            .elements
            .iter()
            .map(|e| (e.label.clone().unwrap_or_default(), e.reflectivity))
            .collect(),
        lambda_closed_form: closed,
        lambda_circuit,
        closed_form_vs_circuit: deviation,
        balanced,
        vacuum_success_probability: p0,
        random_inputs: inputs,
        min_success_probability: if inputs > 0 { min_p } else { p0 },
        max_success_probability: if inputs > 0 { max_p } else { p0 },
        checks,
    };
    let pass = all_pass(&results.checks);
    let echo = NsInputs { biased, eta1, eta2, eta3, eta7, inputs, rng_seed: seed };
    Ok(Output { doc: ReportDocument::new("ns-verify", &echo, &results, pass)?, table: None })
}

fn fmt_f64(x: f64) -> String {
    serde_json::to_string(&x).unwrap_or_else(|_| x.to_string())
}

fn cmd_truth_table(gate: GateKind, conditioning: Conditioning) -> Result<Output> {
    let report = truth_table::<f64>(gate, conditioning)?;
    let table = Table {
        header: ["input", "expected", "decoded", "success_probability", "leakage", "fidelity", "pass"]
            .map(String::from)
            .to_vec(),
        rows: report
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.input.clone(),
                    r.expected_output.clone(),
                    r.decoded_output.clone().unwrap_or_default(),
                    fmt_f64(r.success_probability),
                    fmt_f64(r.leakage),
                    fmt_f64(r.fidelity),
                    r.pass.to_string(),
                ]
            })
            .collect(),
    };
    let pass = report.pass;
    let inputs = Echo::gate(gate).conditioning(conditioning);
    Ok(Output { doc: ReportDocument::new("truth-table", &inputs, &report, pass)?, table: Some(table) })
}

#[derive(Serialize)]
struct MomentRow {
    input: String,
    /// Columns ordered (c_Ho,t_Ho), (c_Ho,t_Vo), (c_Vo,t_Ho), (c_Vo,t_Vo).
    moments: [f64; 4],
    sum: f64,
}

#[derive(Serialize)]
struct MomentResults {
    gate: GateKind,
    columns: [&'static str; 4],
    rows: Vec<MomentRow>,
    expected_probability: f64,
    oracle_max_deviation: f64,
    checks: Vec<Check>,
}

#[derive(Serialize)]
struct MomentInputs {
    gate: GateKind,
    input: Option<String>,
}

fn cmd_moments(gate: GateKind, input: Option<&str>) -> Result<Output> {
    let selected: Vec<usize> = match input {
        Some(s) => {
            let q = parse_basis_input(s)?;
            vec![BASIS_INPUTS.iter().position(|&b| b == q).expect("basis input")]
        }
        None => (0..4).collect(),
    };
    let expected = expected_success_probability::<f64>(gate)?;
    let circuit: Circuit<f64> = gate.build();
    let matrix = moment_matrix(&circuit)?;
    let oracle = heisenberg_consistency::<f64>(gate)?;
    let mut checks = vec![Check::below("evolution vs transfer-matrix oracle", oracle, EXACT_TOL)];
    let mut rows = Vec::new();
    for &row in &selected {
        let (c, t) = BASIS_INPUTS[row];
        let label = input_label(c, t);
        let (ec, et) = cnot_image(c, t);
        for (col, &(oc, ot)) in BASIS_INPUTS.iter().enumerate() {
            let name = format!("{label}: <c_{oc}o t_{ot}o a1o a2o>");
            if (oc, ot) == (ec, et) {
                checks.push(Check::near(name, matrix[row][col], expected, EXACT_TOL));
            } else {
                checks.push(Check::below(name, matrix[row][col], ZERO_TOL));
            }
        }
        rows.push(MomentRow { input: label, moments: matrix[row], sum: matrix[row].iter().fold(0.0, |acc, m| acc + m) });
    }
    let table = Table {
        header: ["input", "HH", "HV", "VH", "VV"].map(String::from).to_vec(),
        rows: rows
            .iter()
            .map(|r| std::iter::once(r.input.clone()).chain(r.moments.iter().map(|&m| fmt_f64(m))).collect())
            .collect(),
    };
    let pass = all_pass(&checks);
    let results = MomentResults {
        gate,
        columns: ["c_Ho t_Ho", "c_Ho t_Vo", "c_Vo t_Ho", "c_Vo t_Vo"],
        rows,
        expected_probability: expected,
        oracle_max_deviation: oracle,
        checks,
    };
    let inputs = MomentInputs { gate, input: input.map(str::to_string) };
    Ok(Output { doc: ReportDocument::new("moments", &inputs, &results, pass)?, table: Some(table) })
}

#[derive(Serialize)]
struct IntermediateInputs {
    gate: GateKind,
    cut: Option<Cut>,
    input: Option<String>,
}

#[derive(Serialize)]
struct IntermediateResults {
    gate: GateKind,
    /// Interior modes of every ket, in order.
    modes: [&'static str; 4],
    note: &'static str,
    states: Vec<crate::harness::IntermediateCheck<f64>>,
    checks: Vec<Check>,
}

fn cmd_intermediate(gate: GateKind, cut: Option<Cut>, input: Option<&str>) -> Result<Output> {
    let cuts = match cut {
        Some(c) => {
            gate.cut_position(c)?;
            vec![c]
        }
        None => [Cut::X, Cut::Y, Cut::Z].into_iter().filter(|&c| gate.cut_position(c).is_ok()).collect(),
    };
    if cuts.is_empty() {
        return Err(Error::UnsupportedGate(gate.name().into()));
    }
    let inputs: Vec<_> = match input {
        Some(s) => vec![parse_basis_input(s)?],
        None => BASIS_INPUTS.to_vec(),
    };
    let mut states = Vec::new();
    let mut checks = Vec::new();
    for &c in &cuts {
        for &(ctl, tgt) in &inputs {
            let r = intermediate_state_check::<f64>(gate, ctl, tgt, c)?;
            checks.push(Check::below(format!("cut {c}, {}: max amplitude deviation", r.input), r.max_deviation, EXACT_TOL));
            states.push(r);
        }
    }
    let pass = all_pass(&checks);
    let results = IntermediateResults {
        gate,
        modes: ["c_H", "arm1", "arm2", "t_idle"],
        note: "x: before the NS stage; y: after it, ancillas conditioned; z (cnot-simplified): after the biased-NS splitters, before recombination. Deviation is measured after removing a global phase.",
        states,
        checks,
    };
    let echo = IntermediateInputs { gate, cut, input: input.map(str::to_string) };
    Ok(Output { doc: ReportDocument::new("intermediate", &echo, &results, pass)?, table: None })
}

#[derive(Serialize)]
struct SweepResults {
    #[serde(flatten)]
    result: crate::harness::SensitivityResult<f64>,
    threshold: f64,
    checks: Vec<Check>,
}

fn cmd_sweep(config: &SweepConfig) -> Result<Output> {
    let (result, samples) = sensitivity_sweep::<f64>(config)?;
    let checks = vec![Check::below("worst-case logical error", result.worst_error, ERROR_CLAIM)];
    let mut header = vec!["sample".to_string()];
    header.extend(result.element_labels.iter().map(|l| format!("delta_{l}")));
    header.extend(["error", "worst_input", "min_success_probability"].map(String::from));
    let rows = samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut row = vec![i.to_string()];
            row.extend(s.perturbation.iter().map(|&d| fmt_f64(d)));
            row.extend([fmt_f64(s.error), s.worst_input.clone(), fmt_f64(s.min_success_probability)]);
            row
        })
        .collect();
    let pass = all_pass(&checks);
    let results = SweepResults { result, threshold: ERROR_CLAIM, checks };
    Ok(Output { doc: ReportDocument::new("sweep", config, &results, pass)?, table: Some(Table { header, rows }) })
}

#[derive(Serialize)]
struct SolveResults {
    ns: crate::gates::OptimalNs<f64>,
    ns_closed_form: NsParameters<f64>,
    biased: crate::gates::BiasedSolution<f64>,
    biased_closed_form: BiasedNsParameters<f64>,
    checks: Vec<Check>,
}

fn solve_params() -> Result<Output> {
    let ns = solve_optimal_ns::<f64>();
    let biased = solve_biased_ns::<f64>();
    let ns_cf = NsParameters::<f64>::optimal();
    let b_cf = BiasedNsParameters::<f64>::balanced();
    let mut checks = vec![
        Check::near("ns: success amplitude", ns.amplitude, 0.5, EXACT_TOL),
        Check::near("ns: numeric optimum amplitude", ns.numeric.best_amplitude, 0.5, 1e-6),
        Check::near("ns: numeric eta2", ns.numeric.best_params.eta2, ns_cf.eta2, 1e-9),
        Check::near("biased: eta2", biased.params.eta2, b_cf.eta2, ZERO_TOL),
        Check::near("biased: eta7", biased.params.eta7, b_cf.eta7, ZERO_TOL),
        Check::below("biased: residual lambda1 - lambda0", biased.residuals[0].abs(), ZERO_TOL),
        Check::below("biased: residual lambda0 + lambda2", biased.residuals[1].abs(), ZERO_TOL),
        Check::near("biased: success probability", biased.success_probability, 0.2265409, 1e-6),
    ];
    if let Some(n) = biased.newton {
        checks.push(Check::near("biased: newton eta2", n.eta2, b_cf.eta2, ZERO_TOL));
        checks.push(Check::near("biased: newton eta7", n.eta7, b_cf.eta7, ZERO_TOL));
    }
    let pass = all_pass(&checks);
    let results = SolveResults { ns, ns_closed_form: ns_cf, biased, biased_closed_form: b_cf, checks };
    Ok(Output { doc: ReportDocument::new("solve-params", &(), &results, pass)?, table: None })
}

/// Parse a run-circuit input: terms `[coef*]occupation` joined by `;`, with
/// occupations written `1,0,2` or `102`. An occupation covering only the
/// signal modes is completed with the circuit's ancilla preparation.
pub fn parse_state_spec(spec: &str, circuit: &Circuit<f64>) -> Result<FockStateVector<f64>> {
    let bad = |why: &str| Error::InvalidArgument(format!("input state {spec:?}: {why}"));
    let mut entries = Vec::new();
    for term in spec.split(';').map(str::trim).filter(|t| !t.is_empty()) {
        let (coef, occ) = match term.split_once('*') {
            Some((c, o)) => (c.trim().parse::<f64>().map_err(|_| bad("bad coefficient"))?, o.trim()),
            None => (1.0, term),
        };
        let counts: Option<Vec<u8>> = if occ.contains(',') {
            occ.split(',').map(|c| c.trim().parse().ok()).collect()
        } else {
            occ.chars().map(|c| c.to_digit(10).map(|d| d as u8)).collect()
        };
        let counts = counts.filter(|c| !c.is_empty()).ok_or_else(|| bad("bad occupation"))?;
        let full = if counts.len() == circuit.n_modes {
            OccupationVector::new(counts)
        } else {
            circuit.input_occupation(&counts)?
        };
        entries.push((full, Complex::new(coef, 0.0)));
    }
    if entries.is_empty() {
        return Err(bad("no terms"));
    }
    FockStateVector::from_entries(circuit.n_modes, entries)
}

#[derive(Serialize)]
struct AmplitudeEntry {
    occupation: String,
    amplitude: Amp<f64>,
    probability: f64,
}

fn listing(state: &FockStateVector<f64>) -> Vec<AmplitudeEntry> {
    state
        .iter()
        .map(|(k, &a)| AmplitudeEntry { occupation: k.to_string(), amplitude: a.into(), probability: a.norm_sqr() })
        .collect()
}

#[derive(Serialize)]
struct Conditioned {
    success_probability: f64,
    kept_modes: Vec<String>,
    normalized_state: Vec<AmplitudeEntry>,
}

#[derive(Serialize)]
struct RunResults {
    n_modes: usize,
    labels: Vec<String>,
    elements: usize,
    input_norm: f64,
    output: Vec<AmplitudeEntry>,
    conditioned: Option<Conditioned>,
    checks: Vec<Check>,
}

#[derive(Serialize)]
struct RunInputs {
    file: String,
    input: String,
}

fn run_circuit(file: &Path, input: &str) -> Result<Output> {
    let circuit = load_circuit::<f64>(file).map_err(|e| match e {
        Error::Parse { line, column, message } => {
            Error::InvalidArgument(format!("{}:{line}:{column}: {message}", file.display()))
        }
        other => Error::InvalidArgument(format!("{}: {other}", file.display())),
    })?;
    let state = parse_state_spec(input, &circuit)?;
    let out = evolve(&state, &circuit)?;
    let unitarity = compose_transfer_matrix(&circuit)?.unitarity_defect();
    let checks = vec![
        Check::below("transfer matrix unitarity defect", unitarity, ZERO_TOL),
        Check::near("norm preserved", out.norm_sqr(), state.norm_sqr(), ZERO_TOL),
    ];
    let conditioned = if circuit.detection.is_empty() {
        None
    } else {
        let c = condition(&out, &circuit.detection)?;
        Some(Conditioned {
            success_probability: c.success_probability,
            kept_modes: c.kept_modes.iter().map(|&m| circuit.labels[m].clone()).collect(),
            normalized_state: c.normalized_state.as_ref().map(listing).unwrap_or_default(),
        })
    };
    let pass = all_pass(&checks);
    let results = RunResults {
        n_modes: circuit.n_modes,
        labels: circuit.labels.clone(),
        elements: circuit.elements.len(),
        input_norm: state.norm_sqr(),
        output: listing(&out),
        conditioned,
        checks,
    };
    let echo = RunInputs { file: file.display().to_string(), input: input.to_string() };
    Ok(Output { doc: ReportDocument::new("run-circuit", &echo, &results, pass)?, table: None })
}
