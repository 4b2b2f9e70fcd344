//! Exit criteria. Each test prints one PASS/FAIL line to stderr (uncaptured)
//! and then asserts, so a full run lists every criterion.

use std::io::Write;
use std::process::Command;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use photon_gates::gates::{
    build_ns_circuit, decode_logical, logical_ket, ns_conditional_map, run_gate, solve_biased_ns, Conditioning, Cut,
    GateKind, Logical, LogicalQubitPair, NsParameters, BASIS_INPUTS,
};
use photon_gates::harness::{
    heisenberg_consistency, intermediate_state_check, moment_matrix, sensitivity_sweep, PerturbationModel, SweepConfig,
};
use photon_gates::{
    compose_transfer_matrix, condition, enumerate_basis, evolve, make_state, oracle_amplitude, AmplitudeQuery,
    BeamsplitterElement, Circuit, DetectionPattern, FockStateVector, OccupationVector, Port,
};

type C = Complex<f64>;

fn line(n: u32, title: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let text = format!("acceptance criterion {n}: {verdict}  {title} ({detail})\n");
    let _ = std::io::stderr().write_all(text.as_bytes());
}

fn sqrt2() -> f64 {
    2f64.sqrt()
}

/// Ideal CNOT images, control first.
fn cnot_table(c: Logical, t: Logical) -> (Logical, Logical) {
    use Logical::*;
    match (c, t) {
        (H, H) => (H, H),
        (H, V) => (H, V),
        (V, H) => (V, V),
        (V, V) => (V, H),
    }
}

fn index_of(q: (Logical, Logical)) -> usize {
    BASIS_INPUTS.iter().position(|&b| b == q).unwrap()
}

/// Truth-table verdict for one gate under one conditioning: worst leakage,
/// worst stray logical amplitude, worst probability deviation.
fn truth_table_errors(gate: GateKind, conditioning: Conditioning, expected_p: f64) -> (f64, f64, f64) {
    let circuit = gate.build::<f64>();
    let (mut leak, mut stray, mut dp) = (0.0f64, 0.0f64, 0.0f64);
    for &(c, t) in &BASIS_INPUTS {
        let run = run_gate(&circuit, &LogicalQubitPair::basis(c, t), conditioning).unwrap();
        let d = run.decode.expect("heralded");
        leak = leak.max(d.leakage);
        let hit = index_of(cnot_table(c, t));
        for (i, a) in d.amplitudes.iter().enumerate() {
            if i != hit {
                stray = stray.max(a.norm());
            }
        }
        dp = dp.max((run.outcome.success_probability - expected_p).abs());
    }
    (leak, stray, dp)
}

#[test]
fn criterion_1_ns_gate() {
    let p = NsParameters::<f64>::optimal();
    let eta13 = 1.0 / (4.0 - 2.0 * sqrt2());
    let params_ok = (p.eta2 - (3.0 - 2.0 * sqrt2())).abs() < 1e-15
        && (p.eta1 - eta13).abs() < 1e-15
        && (p.eta3 - eta13).abs() < 1e-15;

    let target = [0.5, 0.5, -0.5];
    let closed = ns_conditional_map(&p);
    let closed_dev = closed.iter().zip(target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

    let circuit = build_ns_circuit(&p);
    let mut circuit_dev = 0.0f64;
    let mut p_n = [0.0; 3];
    for n in 0..3u8 {
        let input = FockStateVector::basis(OccupationVector::from([n, 1, 0]));
        let out = condition(&evolve(&input, &circuit).unwrap(), &DetectionPattern::new().exact(1, 1).exact(2, 0)).unwrap();
        let lambda = out.reduced_state.amplitude(&OccupationVector::from([n]));
        circuit_dev = circuit_dev.max((lambda - C::new(target[n as usize], 0.0)).norm());
        p_n[n as usize] = out.success_probability;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut p_dev = 0.0f64;
    for _ in 0..20 {
        let c: Vec<C> = (0..3).map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let norm: f64 = c.iter().map(|x| x.norm_sqr()).sum();
        // signal photon number is conserved under heralding, so sectors do not interfere
        let p: f64 = c.iter().zip(p_n).map(|(x, pn)| x.norm_sqr() / norm * pn).sum();
        p_dev = p_dev.max((p - 0.25).abs());
    }

    let pass = params_ok && closed_dev < 1e-10 && circuit_dev < 1e-10 && p_dev < 1e-10;
    line(1, "NS gate map (0.5, 0.5, -0.5), p = 0.25", pass, &format!(
        "closed-form dev {closed_dev:.1e}, circuit dev {circuit_dev:.1e}, max |p - 0.25| over 20 inputs {p_dev:.1e}"
    ));
    assert!(pass);
}

#[test]
fn criterion_2_full_cnot() {
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for conditioning in [Conditioning::Heralded, Conditioning::Coincidence] {
        let (l, s, d) = truth_table_errors(GateKind::Cnot, conditioning, 1.0 / 16.0);
        worst = (worst.0.max(l), worst.1.max(s), worst.2.max(d));
    }
    let m = moment_matrix(&GateKind::Cnot.build::<f64>()).unwrap();
    let (mut on, mut off) = (0.0f64, 0.0f64);
    for (row, &(c, t)) in BASIS_INPUTS.iter().enumerate() {
        let hit = index_of(cnot_table(c, t));
        for col in 0..4 {
            if col == hit {
                on = on.max((m[row][col] - 1.0 / 16.0).abs());
            } else {
                off = off.max(m[row][col].abs());
            }
        }
    }
    let pass = worst.0 < 1e-10 && worst.1 < 1e-10 && worst.2 < 1e-10 && on < 1e-10 && off < 1e-12;
    line(2, "full CNOT truth table and four-fold moments", pass, &format!(
        "leakage {:.1e}, stray amplitude {:.1e}, |p - 1/16| {:.1e}, moment dev {on:.1e}, cross moments {off:.1e}",
        worst.0, worst.1, worst.2
    ));
    assert!(pass);
}

#[test]
fn criterion_3_biased_ns() {
    let sol = solve_biased_ns::<f64>();
    let eta2 = (3.0 - sqrt2()) / 7.0;
    let eta7 = 5.0 - 3.0 * sqrt2();
    let d2 = (sol.params.eta2 - eta2).abs();
    let d7 = (sol.params.eta7 - eta7).abs();
    let res = sol.residuals[0].abs().max(sol.residuals[1].abs());
    let dp = (sol.success_probability - 0.2265409).abs();
    let pass = d2 < 1e-12 && d7 < 1e-12 && res < 1e-12 && dp < 1e-6;
    line(3, "biased NS balanced solution", pass, &format!(
        "|eta2 - (3-sqrt2)/7| {d2:.1e}, |eta7 - (5-3sqrt2)| {d7:.1e}, residuals {res:.1e}, p = {:.7}",
        sol.success_probability
    ));
    assert!(pass);
}

#[test]
fn criterion_4_simplified_cnot() {
    let expected = ((3.0 - sqrt2()) / 7.0).powi(2);
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for conditioning in [Conditioning::Heralded, Conditioning::Coincidence] {
        let (l, s, d) = truth_table_errors(GateKind::CnotSimplified, conditioning, expected);
        worst = (worst.0.max(l), worst.1.max(s), worst.2.max(d));
    }
    let pass = worst.0 < 1e-10 && worst.1 < 1e-10 && worst.2 < 1e-7 && (expected * 100.0).round() == 5.0;
    line(4, "simplified CNOT truth table, p = ((3-sqrt2)/7)^2", pass, &format!(
        "leakage {:.1e}, stray amplitude {:.1e}, |p - {expected:.7}| {:.1e}",
        worst.0, worst.1, worst.2
    ));
    assert!(pass);
}

#[test]
fn criterion_5_bell_states() {
    let h = 0.5f64.sqrt();
    let bell = [[h, 0.0, 0.0, h], [h, 0.0, 0.0, -h], [0.0, h, h, 0.0], [0.0, h, -h, 0.0]];
    let (mut fid_dev, mut purity_dev) = (0.0f64, 0.0f64);
    for gate in [GateKind::Cnot, GateKind::CnotSimplified] {
        let circuit = gate.build::<f64>();
        for sign in [1.0, -1.0] {
            for target in [Logical::H, Logical::V] {
                let input = LogicalQubitPair::superposed_control(sign, target);
                let run = run_gate(&circuit, &input, Conditioning::Heralded).unwrap();
                let a = decode_logical(run.outcome.normalized_state.as_ref().unwrap()).unwrap().amplitudes;
                let fidelity = bell
                    .iter()
                    .map(|b| b.iter().zip(&a).map(|(&e, &x)| x * e).sum::<C>().norm_sqr())
                    .fold(0.0, f64::max);
                // reduced control state from the 2x2 coefficient matrix
                let rho = |i: usize, j: usize| a[2 * i] * a[2 * j].conj() + a[2 * i + 1] * a[2 * j + 1].conj();
                let purity: f64 = (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| rho(i, j).norm_sqr()).sum();
                fid_dev = fid_dev.max((fidelity - 1.0).abs());
                purity_dev = purity_dev.max((purity - 0.5).abs());
            }
        }
    }
    let pass = fid_dev < 1e-10 && purity_dev < 1e-10;
    line(5, "Bell-state generation", pass, &format!("max |F - 1| {fid_dev:.1e}, max |purity - 0.5| {purity_dev:.1e}"));
    assert!(pass);
}

/// Interior kets on (c_H, arm 1, arm 2, idle target arm), written out term by
/// term. `sign` is +1 for target H and -1 for target V.
fn written_ket(control: Logical, sign: f64, cut: Cut) -> Vec<(&'static str, f64)> {
    let r = 0.5f64.sqrt();
    let eta2 = (3.0 - sqrt2()) / 7.0;
    let eta7 = 5.0 - 3.0 * sqrt2();
    let a = (eta2 * eta7).sqrt() * (1.0 - 2.0 * eta2);
    let b = eta7 * eta2 * (2.0 - 3.0 * eta2);
    match (control, cut) {
        (Logical::H, Cut::X) => vec![("1001", r), ("1100", sign * 0.5), ("1010", -sign * 0.5)],
        (Logical::H, Cut::Y) => vec![("1001", 0.25 * r), ("1100", 0.25 * sign * 0.5), ("1010", -0.25 * sign * 0.5)],
        (Logical::H, Cut::Z) => vec![("1001", r * eta2), ("1100", sign * a * 0.5), ("1010", -sign * a * 0.5)],
        (Logical::V, Cut::X) => vec![("0101", 0.5), ("0011", 0.5), ("0200", sign * 0.5), ("0020", -sign * 0.5)],
        (Logical::V, Cut::Y) => {
            vec![("0101", 0.125), ("0011", 0.125), ("0200", -sign * 0.125), ("0020", sign * 0.125)]
        }
        (Logical::V, Cut::Z) => {
            vec![("0101", 0.5 * a), ("0011", 0.5 * a), ("0200", -sign * 0.5 * b), ("0020", sign * 0.5 * b)]
        }
    }
}

#[test]
fn criterion_6_intermediate_states() {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for (gate, cuts) in [(GateKind::Cnot, vec![Cut::X, Cut::Y]), (GateKind::CnotSimplified, vec![Cut::Z])] {
        for cut in cuts {
            for &(c, t) in &BASIS_INPUTS {
                let sign = if t == Logical::H { 1.0 } else { -1.0 };
                let check = intermediate_state_check::<f64>(gate, c, t, cut).unwrap();
                let actual: Vec<(String, C)> =
                    check.actual.iter().map(|(k, a)| (k.clone(), C::new(a.re, a.im))).collect();
                let expected = written_ket(c, sign, cut);
                // align the overall phase before comparing amplitudes
                let overlap: C = expected
                    .iter()
                    .map(|&(k, e)| actual.iter().find(|(ak, _)| ak == k).map_or(C::new(0.0, 0.0), |(_, a)| a * e))
                    .sum();
                let phase = overlap / overlap.norm();
                let mut dev = 0.0f64;
                for (k, a) in &actual {
                    let e = expected.iter().find(|(ek, _)| ek == k).map_or(0.0, |&(_, e)| e);
                    dev = dev.max((a - phase * e).norm());
                }
                for &(k, e) in &expected {
                    if !actual.iter().any(|(ak, _)| ak == k) {
                        dev = dev.max(e.abs());
                    }
                }
                worst = worst.max(dev).max(check.max_deviation);
                cases += 1;
            }
        }
    }
    let pass = worst < 1e-10 && cases == 12;
    line(6, "interior states at cuts x, y and z", pass, &format!("{cases} cut/input cases, max amplitude deviation {worst:.1e}"));
    assert!(pass);
}

fn random_circuit(rng: &mut ChaCha8Rng, max_modes: usize, max_elements: usize) -> Circuit<f64> {
    let n = rng.gen_range(2..=max_modes);
    let labels: Vec<String> = (0..n).map(|i| format!("m{i}")).collect();
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    let mut c = Circuit::new(&refs);
    for _ in 0..rng.gen_range(0..=max_elements) {
        let a = rng.gen_range(0..n);
        let b = (a + rng.gen_range(1..n)) % n;
        let grey = if rng.gen_bool(0.5) { Port::A } else { Port::B };
        c.push(BeamsplitterElement::new(a, b, rng.gen_range(0.0..=1.0), grey));
    }
    c
}

fn oracle_gap(circuit: &Circuit<f64>, input: &OccupationVector) -> f64 {
    let u = compose_transfer_matrix(circuit).unwrap();
    let out = evolve(&FockStateVector::basis(input.clone()), circuit).unwrap();
    enumerate_basis(circuit.n_modes, input.total())
        .iter()
        .map(|k| (out.amplitude(k) - oracle_amplitude(AmplitudeQuery { transfer: &u, input, output: k }).unwrap()).norm())
        .fold(0.0, f64::max)
}

#[test]
fn criterion_7_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut random_gap = 0.0f64;
    for _ in 0..200 {
        let c = random_circuit(&mut rng, 8, 6);
        let photons = rng.gen_range(1..=2);
        let basis = enumerate_basis(c.n_modes, photons);
        random_gap = random_gap.max(oracle_gap(&c, &basis[rng.gen_range(0..basis.len())]));
    }
    let mut gate_gap = 0.0f64;
    for gate in [GateKind::Cnot, GateKind::CnotSimplified] {
        gate_gap = gate_gap.max(heisenberg_consistency::<f64>(gate).unwrap());
        let c = gate.build::<f64>();
        for &(ctl, tgt) in &BASIS_INPUTS {
            gate_gap = gate_gap.max(oracle_gap(&c, &c.input_occupation(logical_ket(ctl, tgt).counts()).unwrap()));
        }
    }
    let pass = random_gap < 1e-10 && gate_gap < 1e-10;
    line(7, "permanent oracle vs sequential evolution", pass, &format!(
        "200 random circuits {random_gap:.1e}, gate moments and amplitudes {gate_gap:.1e}"
    ));
    assert!(pass);
}

#[test]
fn criterion_8_sensitivity() {
    let mut parts = Vec::new();
    let mut pass = true;
    for model in [PerturbationModel::Absolute, PerturbationModel::Relative] {
        let (r, _) = sensitivity_sweep::<f64>(&SweepConfig::corners(GateKind::Cnot, model, 0.02)).unwrap();
        pass &= r.worst_error < 0.01;
        parts.push(format!("{model:?} worst {:.6} over {} corners (mean {:.6})", r.worst_error, r.samples, r.mean_error));
    }
    line(8, "2% reflectivity errors give worst-case logical error < 0.01", pass, &parts.join("; "));
    assert!(pass, "{}", parts.join("; "));
}

#[test]
fn criterion_9_property_suites() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut unitarity, mut norm_gap, mut completeness) = (0.0f64, 0.0f64, 0.0f64);
    let mut photons_ok = true;
    for _ in 0..50 {
        let c = random_circuit(&mut rng, 6, 8);
        unitarity = unitarity.max(compose_transfer_matrix(&c).unwrap().unitarity_defect());

        let k = rng.gen_range(1..=3);
        let entries: Vec<(OccupationVector, C)> = enumerate_basis(c.n_modes, k)
            .into_iter()
            .map(|o| (o, C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
            .collect();
        let s = make_state(c.n_modes, entries).unwrap().normalized().unwrap();
        let out = evolve(&s, &c).unwrap();
        photons_ok &= out.iter().all(|(o, _)| o.total() == k);
        norm_gap = norm_gap.max((out.norm_sqr() - 1.0).abs());

        // exhaustive patterns on the first two modes
        let mut total = 0.0;
        for n in 0..=k {
            for pattern in enumerate_basis(2, n) {
                let d = DetectionPattern::new().exact(0, pattern.get(0)).exact(1, pattern.get(1));
                total += condition(&out, &d).unwrap().success_probability;
            }
        }
        completeness = completeness.max((total - 1.0).abs());
    }

    let bin = env!("CARGO_BIN_EXE_photon-gates");
    let args = ["sweep", "--model", "relative", "--mode", "random", "--samples", "100", "--rng-seed", "5"];
    let first = Command::new(bin).args(args).output().unwrap();
    let second = Command::new(bin).args(args).output().unwrap();
    let identical = first.status.success() && !first.stdout.is_empty() && first.stdout == second.stdout;

    let pass = unitarity < 1e-12 && photons_ok && norm_gap < 1e-12 && completeness < 1e-12 && identical;
    line(9, "unitarity, photon number, conditioning completeness, reproducible reports", pass, &format!(
        "unitarity defect {unitarity:.1e}, norm drift {norm_gap:.1e}, completeness {completeness:.1e}, byte-identical {identical}"
    ));
    assert!(pass);
}
