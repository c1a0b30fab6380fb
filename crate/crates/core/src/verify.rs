//! Named verification suites shared by the command line and the acceptance tests.
//! Each suite returns a table of measured deviations against pinned tolerances.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::compile_general::{
    compile_general, delta_random_bond, measured_random_bond_log2_prefactor, random_bond_instance, Layout,
};
use crate::compile_unitary::{delta_o, CompileError};
use crate::iqp::{self, IqpError};
use crate::linalg::c;
use crate::mbqc::brickwork::{decorated_graph, edge_bra, reduce_vertical_edges, scalar_matches_delta_t};
use crate::mbqc::graph::contract_qubit;
use crate::mbqc::{build_brickwork, certify_projections, embed_circuit, verify_identities, MbqcError, TargetCircuit, TargetGate};
use crate::model::{random_instance, DomainClass, IsingInstance, ModelError};
use crate::oracle::{brute_force_z, OracleError};
use crate::numeric::rel_err;

pub const IDENTITY_TOL: f64 = 1e-12;
pub const PROJECTION_TOL: f64 = 1e-10;
pub const EMBED_TOL: f64 = 1e-9;
pub const IQP_TOL: f64 = 1e-9;
pub const IQP_DUAL_TOL: f64 = 1e-12;
pub const RANDOM_BOND_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("unknown suite {0:?}; expected one of identities, projections, brickwork, iqp, scales")]
    UnknownSuite(String),
    #[error(transparent)]
    Mbqc(#[from] MbqcError),
    #[error(transparent)]
    Graph(#[from] crate::mbqc::GraphError),
    #[error(transparent)]
    Iqp(#[from] IqpError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value < tolerance`.
    pub fn below(label: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { label: label.into(), value, tolerance, passed: value < tolerance }
    }

    /// A yes/no check, recorded as 0 (holds) or 1 (fails) against tolerance 0.5.
    pub fn holds(label: impl Into<String>, ok: bool) -> Self {
        Self::below(label, if ok { 0.0 } else { 1.0 }, 0.5)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
    /// Free-form measured facts that are reported but not pass/fail.
    pub notes: Vec<String>,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        Self { suite: suite.to_string(), checks: Vec::new(), notes: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {}", self.suite)?;
        let width = self.checks.iter().map(|c| c.label.len()).max().unwrap_or(0);
        for ch in &self.checks {
            let verdict = if ch.passed { "ok" } else { "FAIL" };
            writeln!(f, "  {:<width$}  {:>11.3e} < {:.0e}  {verdict}", ch.label, ch.value, ch.tolerance)?;
        }
        for note in &self.notes {
            writeln!(f, "  note: {note}")?;
        }
        write!(f, "suite {}: {}", self.suite, if self.passed() { "PASS" } else { "FAIL" })
    }
}

pub const SUITES: [&str; 5] = ["identities", "projections", "brickwork", "iqp", "scales"];

pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport, VerifyError> {
    match name {
        "identities" => Ok(identities_suite()),
        "projections" => projections_suite(seed),
        "brickwork" => brickwork_suite(),
        "iqp" => iqp_suite(seed),
        "scales" => scales_suite(seed),
        other => Err(VerifyError::UnknownSuite(other.to_string())),
    }
}

/// Gate-set identities, global-phase-free.
pub fn identities_suite() -> SuiteReport {
    let mut rep = SuiteReport::new("identities");
    for ch in verify_identities().checks {
        rep.checks.push(Check::below(ch.name, ch.distance, IDENTITY_TOL));
    }
    rep
}

/// Pauli-projection rewrite rules against dense projections on 200 random graphs of ≤ 6 vertices.
pub fn projections_suite(seed: u64) -> Result<SuiteReport, VerifyError> {
    let mut rep = SuiteReport::new("projections");
    let cert = certify_projections(200, 6, seed)?;
    rep.checks.push(Check::below(
        format!("{} graphs, {} projections", cert.graphs, cert.projections),
        cert.max_error,
        PROJECTION_TOL,
    ));
    Ok(rep)
}

/// The brickwork reduction, its scalar, a dense cross-check, and circuit embeddings.
pub fn brickwork_suite() -> Result<SuiteReport, VerifyError> {
    let mut rep = SuiteReport::new("brickwork");
    for (n, m) in [(2, 15), (3, 30), (4, 45)] {
        let red = build_brickwork(n, m)?;
        rep.checks.push(Check::holds(format!("{n}x{m} scalar is 2^(-#gamma/2)"), scalar_matches_delta_t(&red)));
        let joined = red.bridges.iter().all(|&(r, col)| {
            red.graph.neighbors(red.layout.vertex(r, col)).contains(&red.layout.vertex(r + 1, col))
        });
        let max_degree = red.graph.live_vertices().iter().map(|&v| red.graph.neighbors(v).len()).max().unwrap_or(0);
        rep.checks.push(Check::holds(format!("{n}x{m} bridges join wires, degree <= 3"), joined && max_degree <= 3));
    }
    // dense cross-check of the symbolic rewrite on a 2x3 slice
    let mut slice = IsingInstance::new(2, 3)?;
    slice.set_jv(0, 1, c(0.0, std::f64::consts::FRAC_PI_4));
    let (g0, layout) = decorated_graph(2, 3)?;
    let mut psi = g0.to_state_vector()?;
    for col in 0..3 {
        // earlier vertical edge qubits have lower indices, so each removal shifts by col
        let [x0, x1] = edge_bra(slice.jv(0, col));
        psi = contract_qubit(&psi, layout.vertical_edge(0, col) - col, x0, x1);
    }
    let got = reduce_vertical_edges(&slice)?.graph.to_state_vector()?;
    let diff = got.iter().zip(&psi).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    rep.checks.push(Check::below("2x3 slice vs dense projection", diff, PROJECTION_TOL));
    for (label, gates) in embedding_targets() {
        let report = embed_circuit(&TargetCircuit::new(2, gates))?;
        rep.checks.push(Check::below(format!("embed {label}: |Z/Delta| vs |<0|U|0>|"), report.phase_free_error(), EMBED_TOL));
    }
    Ok(rep)
}

/// The two-wire embedding targets: identity, T, H, CNOT.
pub fn embedding_targets() -> Vec<(&'static str, Vec<TargetGate>)> {
    vec![
        ("I", vec![TargetGate::I]),
        ("T", vec![TargetGate::T { wire: 0 }]),
        ("H", vec![TargetGate::H { wire: 0 }]),
        ("CNOT", vec![TargetGate::Cnot { control: 0, target: 1 }]),
    ]
}

/// Measured real-to-imaginary scale exponent at one size: `(min, max)` of `log2|s|` over seeds.
pub fn measured_exponent(n: usize, m: usize, seeds: std::ops::Range<u64>) -> Result<(f64, f64), VerifyError> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for seed in seeds {
        let inst = random_instance(n, m, DomainClass::Physical, seed)?;
        let map = iqp::real_imag_instance(&inst)?;
        lo = lo.min(map.log2_s);
        hi = hi.max(map.log2_s);
    }
    Ok((lo, hi))
}

/// Commuting-circuit identity, dual-path amplitude, and the real-to-imaginary scale exponent.
pub fn iqp_suite(seed: u64) -> Result<SuiteReport, VerifyError> {
    let mut rep = SuiteReport::new("iqp");
    for (n, m) in [(1, 2), (1, 3), (2, 2)] {
        let mut identity = 0.0f64;
        let mut dual = 0.0f64;
        for s in seed..seed + 5 {
            let inst = random_instance(n, m, DomainClass::Physical, s)?;
            let cc = iqp::to_commuting(&inst)?;
            let z = brute_force_z(&inst, false)?.value();
            let amp = iqp::iqp_amplitude(&cc)?;
            identity = identity.max(rel_err(amp * cc.prefactor(), z, 0.0));
            dual = dual.max((iqp::iqp_amplitude_by_simulation(&cc)? - amp).norm());
        }
        rep.checks.push(Check::below(format!("{n}x{m} Z = prefactor * <+|D'|+>"), identity, IQP_TOL));
        rep.checks.push(Check::below(format!("{n}x{m} direct sum vs state vector"), dual, IQP_DUAL_TOL));
        let (lo, hi) = measured_exponent(n, m, seed..seed + 10)?;
        let resolved = iqp::real_imag_exponent(n, m) as f64;
        rep.checks.push(Check::below(
            format!("{n}x{m} log2|s| = {resolved} over 10 instances"),
            (lo - resolved).abs().max((hi - resolved).abs()),
            IQP_TOL,
        ));
        rep.notes.push(format!(
            "{n}x{m}: measured exponent {:.6} (resolved -4nm+n+m = {resolved}, stated -5nm+2n+m = {})",
            (lo + hi) / 2.0,
            iqp::stated_real_imag_exponent(n, m)
        ));
    }
    Ok(rep)
}

/// `Δ < Δ_o`, the approach of `Δ/Δ_o` to 1 with growing fields, and the random-bond closed form.
pub fn scales_suite(seed: u64) -> Result<SuiteReport, VerifyError> {
    let mut rep = SuiteReport::new("scales");
    let mut worst = 0.0f64;
    for k in 0..1000u64 {
        let domain = if k % 2 == 0 { DomainClass::Physical } else { DomainClass::General };
        // 1x1 has no projections, so Δ = Δ_o there; sizes start at two vertices
        let (n, m) = [(1, 2), (2, 1), (2, 2), (1, 3), (2, 3), (3, 2), (3, 3)][(k % 7) as usize];
        let inst = random_instance(n, m, domain, seed.wrapping_add(k))?;
        worst = worst.max(delta_ratio(&inst)?);
    }
    rep.checks.push(Check::below("max Delta/Delta_o over 1000 random instances", worst, 1.0));
    let ratios = field_probe_ratios(seed)?;
    let increasing = ratios.windows(2).all(|w| w[0] < w[1]) && ratios[ratios.len() - 1] < 1.0;
    rep.checks.push(Check::holds("Delta/Delta_o increasing along Re(h) = 1, 2, 4, 8", increasing));
    rep.notes.push(format!("Delta/Delta_o along Re(h) = 1, 2, 4, 8: {ratios:.6?}"));
    for (n, m, beta) in [(2, 2, 0.5), (3, 2, 0.3), (2, 3, 1.0)] {
        let inst = random_bond_instance(n, m, beta, seed);
        let product = compile_general(&inst, Layout::Direct)?.delta;
        let closed = delta_random_bond(n, m, beta);
        rep.checks.push(Check::below(
            format!("random bond {n}x{m} beta={beta}: product vs closed form"),
            ((product - closed) / closed).abs(),
            RANDOM_BOND_TOL,
        ));
        let prefactor = measured_random_bond_log2_prefactor(n, m, beta, seed)?;
        rep.notes.push(format!("random bond {n}x{m} beta={beta}: measured power of two {prefactor:.9} (nm = {})", n * m));
    }
    Ok(rep)
}

/// `Δ/Δ_o` for one instance.
pub fn delta_ratio(inst: &IsingInstance) -> Result<f64, VerifyError> {
    Ok(compile_general(inst, Layout::Direct)?.delta / delta_o(inst)?)
}

/// `Δ/Δ_o` on a fixed 2x2 physical probe with every field set to 1, 2, 4, 8.
pub fn field_probe_ratios(seed: u64) -> Result<Vec<f64>, VerifyError> {
    let base = random_instance(2, 2, DomainClass::Physical, seed)?;
    [1.0, 2.0, 4.0, 8.0]
        .iter()
        .map(|&h| {
            let mut inst = base.clone();
            for r in 0..2 {
                for col in 0..2 {
                    inst.set_h(r, col, Complex64::new(h, 0.0));
                }
            }
            delta_ratio(&inst)
        })
        .collect()
}
