//! Commuting (IQP) form of the physical-parameter circuit, and the resulting
//! imaginary-parameter Ising model on the expanded graph.
//!
//! The gadget circuit `C′` acts on `n` wires plus one ancilla per decorated
//! vertex, with `Z = Δ′⟨+|^{⊗n}⟨0|^{⊗|Ṽ|} C′ |+⟩^{⊗n}|0⟩^{⊗|Ṽ|}`. It is rewritten
//! gate by gate into `D′ = e^{iφ} Π e^{iθ_a Z_a} Π e^{iθ_ab Z_a Z_b}`:
//!
//! * conjugating each ancilla by a Clifford `R` with `RYR† = Z` turns every
//!   controlled `Y(θ)` into a controlled `Z(θ)` and its `|0⟩` boundary into `|+⟩`;
//! * `Λ(Z(θ)) = e^{iθZZ/4} e^{−iθZ_t/4}`, with the `ZZ` sign flipped under `X` conjugation;
//! * `H` is teleported onto a fresh qubit, `(⟨+|⊗I)Λ(Z)(|ψ⟩|+⟩) = H|ψ⟩/√2`, with
//!   `Λ(Z) = e^{iπ/4} e^{iπZZ/4} e^{−iπZ/4} e^{−iπZ/4}`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::compile_general::{projection_plans, type1_plan, ProjectionRecord, Site, WeightedBra};
use crate::compile_unitary::{log2_delta_o, CompileError};
use crate::linalg::c;
use crate::model::{classify_domain, DomainClass, IsingInstance, DOMAIN_TOL};
use crate::oracle::{brute_force_graph, brute_force_z, OracleError, SpinGraph, BRUTE_FORCE_LIMIT};
use crate::simulator::{run_circuit, SimError};

#[derive(Debug, Error)]
pub enum IqpError {
    #[error("instance is in domain {0:?}; the commuting form needs physical parameters")]
    NotPhysical(DomainClass),
    #[error("gate {0} cannot be rewritten into commuting form here")]
    Unsupported(String),
    #[error("component of {size} qubits exceeds the direct-sum limit {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("scale ratio needs a non-zero partition function")]
    ZeroAmplitude,
    #[error("malformed commuting circuit: {0}")]
    Malformed(String),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// `e^{iφ} Π_a e^{iθ_a Z_a} Π_{ab} e^{iθ_ab Z_a Z_b}` on `num_qubits` qubits, with
/// `Z = 2^{log2_prefactor}·⟨+|D′|+⟩` for the instance it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutingCircuit {
    pub num_qubits: usize,
    pub z_terms: BTreeMap<usize, f64>,
    pub zz_terms: BTreeMap<(usize, usize), f64>,
    pub phase: f64,
    pub log2_prefactor: f64,
}

#[derive(Serialize, Deserialize)]
struct CommutingDoc {
    qubits: usize,
    prefactor: f64,
    #[serde(default)]
    phase: f64,
    z: Vec<(usize, f64)>,
    zz: Vec<(usize, usize, f64)>,
}

impl CommutingCircuit {
    pub fn new(num_qubits: usize) -> Self {
        Self { num_qubits, z_terms: BTreeMap::new(), zz_terms: BTreeMap::new(), phase: 0.0, log2_prefactor: 0.0 }
    }

    pub fn prefactor(&self) -> f64 {
        self.log2_prefactor.exp2()
    }

    pub fn add_z(&mut self, q: usize, theta: f64) {
        *self.z_terms.entry(q).or_insert(0.0) += theta;
    }

    pub fn add_zz(&mut self, a: usize, b: usize, theta: f64) {
        *self.zz_terms.entry((a.min(b), a.max(b))).or_insert(0.0) += theta;
    }

    /// The Ising model whose weights are the exponents of `D′` without its global phase.
    pub fn spin_graph(&self) -> SpinGraph {
        let mut fields = vec![c(0.0, 0.0); self.num_qubits];
        for (&q, &t) in &self.z_terms {
            fields[q] = c(0.0, t);
        }
        let couplings = self.zz_terms.iter().map(|(&(a, b), &t)| (a, b, c(0.0, t))).collect();
        SpinGraph { fields, couplings }
    }

    /// `H^{⊗N} D′ H^{⊗N}` as a gate sequence, so `⟨0|·|0⟩ = ⟨+|D′|+⟩`.
    pub fn to_circuit(&self) -> Circuit {
        let mut circ = Circuit::new(self.num_qubits, 0);
        for q in 0..self.num_qubits {
            circ.push(Gate::one(GateKind::H, q));
        }
        for (&q, &t) in &self.z_terms {
            circ.push(Gate::one(GateKind::PhaseDiag(t, -t), q));
        }
        for (&(a, b), &t) in &self.zz_terms {
            circ.push(Gate::two(GateKind::ZZRot(c(0.0, t)), a, b));
        }
        circ.push(Gate::phase(self.phase));
        for q in 0..self.num_qubits {
            circ.push(Gate::one(GateKind::H, q));
        }
        circ
    }

    pub fn to_json(&self) -> String {
        let doc = CommutingDoc {
            qubits: self.num_qubits,
            prefactor: self.prefactor(),
            phase: self.phase,
            z: self.z_terms.iter().map(|(&q, &t)| (q, t)).collect(),
            zz: self.zz_terms.iter().map(|(&(a, b), &t)| (a, b, t)).collect(),
        };
        serde_json::to_string(&doc).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, IqpError> {
        let doc: CommutingDoc = serde_json::from_str(text).map_err(|e| IqpError::Malformed(e.to_string()))?;
        let mut cc = CommutingCircuit::new(doc.qubits);
        cc.phase = doc.phase;
        cc.log2_prefactor = doc.prefactor.log2();
        for (q, t) in doc.z {
            if q >= doc.qubits {
                return Err(IqpError::Malformed(format!("z term on qubit {q}")));
            }
            cc.add_z(q, t);
        }
        for (a, b, t) in doc.zz {
            if a >= doc.qubits || b >= doc.qubits || a == b {
                return Err(IqpError::Malformed(format!("zz term on ({a}, {b})")));
            }
            cc.add_zz(a, b, t);
        }
        Ok(cc)
    }
}

fn require_physical(inst: &IsingInstance) -> Result<(), IqpError> {
    match classify_domain(inst, DOMAIN_TOL) {
        DomainClass::Physical => Ok(()),
        other => Err(IqpError::NotPhysical(other)),
    }
}

/// Body of `C′` (no state preparation) and `log2 Δ′`. Wires are qubits
/// `0..n`; ancilla `k` is qubit `n + k`, one per decorated vertex. Every gate
/// is unitary, so the circuit also serves the Hadamard test in any domain.
pub fn gadget_body(inst: &IsingInstance) -> Result<(Vec<Gate>, usize, f64), IqpError> {
    let (n, m) = (inst.n(), inst.m());
    let mut plans = projection_plans(inst);
    let boundary_from = plans.len();
    for r in 0..n {
        plans.push(ProjectionRecord {
            site: Site::Vertex { r, c: m - 1 },
            plan: type1_plan(WeightedBra::from_param(inst.h(r, m - 1))),
        });
    }
    let log2_delta_prime =
        log2_delta_o(inst)? + n as f64 / 2.0 + plans.iter().map(|p| (p.plan.norm / SQRT_2).log2()).sum::<f64>();
    let mut body = Vec::new();
    for (k, rec) in plans.iter().enumerate() {
        let wires: Vec<usize> = match rec.site {
            Site::Vertical { r, .. } => vec![r, r + 1],
            Site::Vertex { r, .. } | Site::Horizontal { r, .. } => vec![r],
        };
        let mut gates = rec.plan.gadget(&wires, n + k);
        if k >= boundary_from {
            // the right boundary keeps M/‖M‖ and reads out in the X basis
            let last = gates.pop();
            debug_assert!(matches!(last, Some(Gate { kind: GateKind::H, .. })));
        }
        body.extend(gates);
    }
    Ok((body, n + plans.len(), log2_delta_prime))
}

/// `C′` with its boundary states folded in: `⟨0|H_w C′ H_w|0⟩` over all qubits.
pub fn gadget_circuit(inst: &IsingInstance) -> Result<(Circuit, f64), IqpError> {
    let (body, qubits, log2_delta_prime) = gadget_body(inst)?;
    let n = inst.n();
    let mut circ = Circuit::new(n, qubits - n);
    circ.scale = log2_delta_prime.exp2();
    for w in 0..n {
        circ.push(Gate::one(GateKind::H, w));
    }
    circ.gates.extend(body);
    for w in 0..n {
        circ.push(Gate::one(GateKind::H, w));
    }
    Ok((circ, log2_delta_prime))
}

/// Rewrites `C′` into commuting form. `log2_prefactor = log2 Δ′ + K/2` where `K`
/// counts the teleported Hadamards.
pub fn to_commuting(inst: &IsingInstance) -> Result<CommutingCircuit, IqpError> {
    require_physical(inst)?;
    let (body, base_qubits, log2_delta_prime) = gadget_body(inst)?;
    let n = inst.n();
    let hadamards = body.iter().filter(|g| g.kind == GateKind::H).count();
    let mut cc = CommutingCircuit::new(base_qubits + hadamards);
    let mut current: Vec<usize> = (0..base_qubits).collect();
    let mut flipped = vec![false; base_qubits];
    let mut fresh = base_qubits;
    let sign = |f: bool| if f { -1.0 } else { 1.0 };
    for g in &body {
        let q = &g.qubits;
        match g.kind {
            GateKind::X => flipped[q[0]] ^= true,
            GateKind::GlobalPhase(p) => cc.phase += p,
            GateKind::PhaseDiag(p0, p1) if !flipped[q[0]] => {
                cc.phase += (p0 + p1) / 2.0;
                cc.add_z(current[q[0]], (p0 - p1) / 2.0);
            }
            GateKind::ZZRot(z) if z.re == 0.0 => {
                cc.add_zz(current[q[0]], current[q[1]], z.im * sign(flipped[q[0]]) * sign(flipped[q[1]]));
            }
            GateKind::CYRot(theta) if q[1] >= n && !flipped[q[1]] => {
                let (ctrl, anc) = (current[q[0]], current[q[1]]);
                cc.add_zz(ctrl, anc, sign(flipped[q[0]]) * theta / 4.0);
                cc.add_z(anc, -theta / 4.0);
            }
            GateKind::H if q[0] < n && !flipped[q[0]] => {
                let (old, new) = (current[q[0]], fresh);
                fresh += 1;
                cc.add_zz(old, new, FRAC_PI_4);
                cc.add_z(old, -FRAC_PI_4);
                cc.add_z(new, -FRAC_PI_4);
                cc.phase += FRAC_PI_4;
                current[q[0]] = new;
            }
            _ => return Err(IqpError::Unsupported(format!("{} on {:?}", g.kind.name(), g.qubits))),
        }
    }
    if flipped.iter().any(|&f| f) {
        return Err(IqpError::Unsupported("unbalanced X frame at the end of the circuit".into()));
    }
    cc.log2_prefactor = log2_delta_prime + hadamards as f64 / 2.0;
    Ok(cc)
}

fn components(cc: &CommutingCircuit) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..cc.num_qubits).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(a, b) in cc.zz_terms.keys() {
        let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
        parent[ra] = rb;
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for q in 0..cc.num_qubits {
        let r = root(&mut parent, q);
        groups.entry(r).or_default().push(q);
    }
    groups.into_values().collect()
}

/// `2^{−N} Σ_x e^{i·phase(x)}` by one Gray-code sweep over all qubits.
pub fn iqp_amplitude_direct(cc: &CommutingCircuit) -> Result<Complex64, IqpError> {
    if cc.num_qubits > BRUTE_FORCE_LIMIT {
        return Err(IqpError::TooLarge { size: cc.num_qubits, limit: BRUTE_FORCE_LIMIT });
    }
    let sum = brute_force_graph(&cc.spin_graph(), false)?;
    Ok(Complex64::cis(cc.phase) * sum * (-(cc.num_qubits as f64)).exp2())
}

/// Product of per-component sums of the interaction graph.
pub fn iqp_amplitude_factorized(cc: &CommutingCircuit) -> Result<Complex64, IqpError> {
    let mut amp = Complex64::cis(cc.phase);
    for comp in components(cc) {
        if comp.len() > BRUTE_FORCE_LIMIT {
            return Err(IqpError::TooLarge { size: comp.len(), limit: BRUTE_FORCE_LIMIT });
        }
        let index: BTreeMap<usize, usize> = comp.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        let fields = comp.iter().map(|q| c(0.0, cc.z_terms.get(q).copied().unwrap_or(0.0))).collect();
        let couplings = cc
            .zz_terms
            .iter()
            .filter(|((a, _), _)| index.contains_key(a))
            .map(|(&(a, b), &t)| (index[&a], index[&b], c(0.0, t)))
            .collect();
        let sum = brute_force_graph(&SpinGraph { fields, couplings }, false)?;
        amp *= sum * (-(comp.len() as f64)).exp2();
    }
    Ok(amp)
}

/// `⟨+|D′|+⟩`, summing directly when small and per component otherwise.
pub fn iqp_amplitude(cc: &CommutingCircuit) -> Result<Complex64, IqpError> {
    if cc.num_qubits <= BRUTE_FORCE_LIMIT {
        iqp_amplitude_direct(cc)
    } else {
        iqp_amplitude_factorized(cc)
    }
}

/// The same amplitude through the state-vector simulator.
pub fn iqp_amplitude_by_simulation(cc: &CommutingCircuit) -> Result<Complex64, IqpError> {
    Ok(run_circuit(&cc.to_circuit())?)
}

/// `−4nm + n + m`: the exponent of `s` implied by the construction.
pub fn real_imag_exponent(n: usize, m: usize) -> i64 {
    let (n, m) = (n as i64, m as i64);
    -4 * n * m + n + m
}

/// `−5nm + 2n + m`: the exponent as originally stated, kept for comparison.
pub fn stated_real_imag_exponent(n: usize, m: usize) -> i64 {
    let (n, m) = (n as i64, m as i64);
    -5 * n * m + 2 * n + m
}

/// The imaginary-parameter model on the expanded graph, and the measured
/// factor `s` with `Z_G = Δ′·s·Z_{G′}`.
#[derive(Debug, Clone)]
pub struct RealImagMapping {
    pub graph: SpinGraph,
    pub commuting: CommutingCircuit,
    pub log2_delta_prime: f64,
    /// `Z_G / (Δ′·Z_{G′})`, from independent oracles on both sides.
    pub s: Complex64,
    /// `log2 |s|`, measured.
    pub log2_s: f64,
    /// `2^{N}⟨+|D′|+⟩ / Z_{G′}`, which must have modulus one.
    pub phase: Complex64,
}

pub fn real_imag_instance(inst: &IsingInstance) -> Result<RealImagMapping, IqpError> {
    let cc = to_commuting(inst)?;
    let hadamards = cc.num_qubits - inst.num_decorated_vertices() - inst.n();
    let log2_delta_prime = cc.log2_prefactor - hadamards as f64 / 2.0;
    let graph = cc.spin_graph();
    let z_prime = brute_force_graph(&graph, false)?;
    let z = brute_force_z(inst, false)?.value();
    let s = z / (z_prime * log2_delta_prime.exp2());
    Ok(RealImagMapping {
        graph,
        phase: Complex64::cis(cc.phase),
        commuting: cc,
        log2_delta_prime,
        s,
        log2_s: s.norm().log2(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleRatioReport {
    /// `Δ/|z|`
    pub ratio: f64,
    pub poly: f64,
    /// Multiplicative window `c = Δ/(|z|·poly)` implied by additive error `Δ/poly`.
    pub c: f64,
    pub c_threshold: f64,
    /// True if `c ≤ c_threshold`.
    pub multiplicative: bool,
    /// `|z|/Δ`, the best improvement a classical algorithm could offer.
    pub epsilon_ceiling: f64,
}

/// `1 − 2^{−1/4}`
pub fn default_c_threshold() -> f64 {
    1.0 - 2f64.powf(-0.25)
}

pub fn scale_ratio_report(z: Complex64, delta: f64, poly: f64, c_threshold: f64) -> Result<ScaleRatioReport, IqpError> {
    if z.norm() == 0.0 {
        return Err(IqpError::ZeroAmplitude);
    }
    let ratio = delta / z.norm();
    let c = ratio / poly;
    Ok(ScaleRatioReport { ratio, poly, c, c_threshold, multiplicative: c <= c_threshold, epsilon_ceiling: 1.0 / ratio })
}
