//! Embedding of {H, T, CNOT, I} circuits into Problem-2 Ising instances.
//!
//! The compiled circuit of a Problem-2 instance with `m = 15·cells + 1` columns
//! is `(H Z(−π/2))^{⊗n} · cells · H^{⊗n}`, so `⟨0|C|0⟩ = ⟨0|U|0⟩` up to phase
//! when the cells realize `W = (S H)^{⊗n} U H^{⊗n}`. `W` is written as a word
//! of unit cells using the gate-set identities.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::brickwork::{reduce_vertical_edges, BRIDGE_COLUMNS, CELL_COLUMNS};
use super::patterns::{cell_op, pattern_table, wire_op, CellTarget, Choice};
use super::MbqcError;
use crate::circuit::{Circuit, Gate, GateKind};
use crate::compile_unitary::{log2_delta_o, log2_delta_problem1};
use crate::linalg::{self, c};
use crate::model::IsingInstance;
use crate::oracle::transfer_matrix_z;
use crate::simulator::run_circuit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "gate")]
pub enum TargetGate {
    H { wire: usize },
    T { wire: usize },
    #[serde(rename = "CNOT")]
    Cnot { control: usize, target: usize },
    I,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetCircuit {
    pub wires: usize,
    pub gates: Vec<TargetGate>,
}

impl TargetCircuit {
    pub fn new(wires: usize, gates: Vec<TargetGate>) -> Self {
        Self { wires, gates }
    }

    fn check(&self) -> Result<(), MbqcError> {
        if self.wires < 2 {
            return Err(MbqcError::Dimensions(format!("embedding needs at least 2 wires, got {}", self.wires)));
        }
        for g in &self.gates {
            let ok = match *g {
                TargetGate::H { wire } | TargetGate::T { wire } => wire < self.wires,
                TargetGate::Cnot { control, target } => {
                    control < self.wires && target < self.wires && control.abs_diff(target) == 1
                }
                TargetGate::I => true,
            };
            if !ok {
                return Err(MbqcError::UnsupportedGate(format!("{g:?} on {} wires (CNOT needs adjacent wires)", self.wires)));
            }
        }
        Ok(())
    }

    /// The target as a simulator circuit (wire `w` is qubit `w`).
    pub fn to_circuit(&self) -> Circuit {
        let mut circ = Circuit::new(self.wires, 0);
        for g in &self.gates {
            match *g {
                TargetGate::H { wire } => circ.push(Gate::one(GateKind::H, wire)),
                TargetGate::T { wire } => circ.push(Gate::one(GateKind::PhaseDiag(0.0, FRAC_PI_4), wire)),
                TargetGate::Cnot { control, target } => circ.push(Gate::generic2(&linalg::cnot(), control, target)),
                TargetGate::I => {}
            }
        }
        circ
    }
}

/// One unit cell: `target` with its first tensor factor on wire `first`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CellOp {
    pub target: CellTarget,
    pub first: usize,
    pub second: usize,
}

fn partner(w: usize, wires: usize) -> usize {
    if w + 1 < wires {
        w + 1
    } else {
        w - 1
    }
}

/// `Z(kπ/4)` on `w`, as `k` repetitions of `U1·U2c`.
fn z_turns(out: &mut Vec<CellOp>, w: usize, p: usize, k: usize) {
    for _ in 0..k % 8 {
        out.push(CellOp { target: CellTarget::U2Conj, first: w, second: p });
        out.push(CellOp { target: CellTarget::U1, first: w, second: p });
    }
}

/// `X(kπ/4)` on `w`, as `(U1·U3)^{8−k}`.
fn x_turns(out: &mut Vec<CellOp>, w: usize, p: usize, k: usize) {
    for _ in 0..(8 - k % 8) % 8 {
        out.push(CellOp { target: CellTarget::U3, first: w, second: p });
        out.push(CellOp { target: CellTarget::U1, first: w, second: p });
    }
}

fn hadamard_word(out: &mut Vec<CellOp>, w: usize, p: usize) {
    z_turns(out, w, p, 2);
    x_turns(out, w, p, 2);
    z_turns(out, w, p, 2);
}

/// Cell word (in time order) realizing `W = (S H)^{⊗n} U H^{⊗n}` up to phase.
pub fn cell_word(target: &TargetCircuit) -> Result<Vec<CellOp>, MbqcError> {
    target.check()?;
    let n = target.wires;
    let mut out = Vec::new();
    for w in 0..n {
        hadamard_word(&mut out, w, partner(w, n));
    }
    for g in &target.gates {
        match *g {
            TargetGate::H { wire } => hadamard_word(&mut out, wire, partner(wire, n)),
            TargetGate::T { wire } => z_turns(&mut out, wire, partner(wire, n), 1),
            TargetGate::Cnot { control, target: t } => {
                // control on the second factor, target on the first
                z_turns(&mut out, t, control, 2);
                for cell in [CellTarget::U4, CellTarget::U1, CellTarget::U4] {
                    out.push(CellOp { target: cell, first: t, second: control });
                }
                z_turns(&mut out, t, control, 2);
                z_turns(&mut out, control, t, 6);
                x_turns(&mut out, t, control, 2);
            }
            TargetGate::I => {}
        }
    }
    for w in 0..n {
        hadamard_word(&mut out, w, partner(w, n));
        z_turns(&mut out, w, partner(w, n), 2);
    }
    Ok(out)
}

/// Horizontal assignments `(upper row, top bits, bottom bits)` of a cell op.
fn placement(op: &CellOp) -> Result<(usize, u16, u16), MbqcError> {
    let p = pattern_table().get(op.target).map_err(|e| MbqcError::Pattern(e.clone()))?;
    Ok(if op.first < op.second { (op.first, p.top, p.bottom) } else { (op.second, p.bottom, p.top) })
}

/// The Problem-2 instance whose compiled circuit runs `word`.
pub fn instance_for_word(wires: usize, word: &[CellOp]) -> Result<IsingInstance, MbqcError> {
    let m = CELL_COLUMNS * word.len() + 1;
    let mut inst = IsingInstance::new(wires, m)?;
    let quarter = c(0.0, FRAC_PI_4);
    let (idle, _) = pattern_table()
        .wire_identity
        .ok_or_else(|| MbqcError::Dimensions("no single-wire identity pattern".into()))?;
    for r in 0..wires {
        for col in 0..m {
            inst.set_h(r, col, quarter);
        }
    }
    for (k, op) in word.iter().enumerate() {
        let (row, top, bottom) = placement(op)?;
        let base = k * CELL_COLUMNS;
        for w in 0..wires {
            let bits = if w == row {
                top
            } else if w == row + 1 {
                bottom
            } else {
                idle
            };
            for j in 0..CELL_COLUMNS {
                let choice = if bits >> j & 1 == 1 { Choice::Omega } else { Choice::Quarter };
                inst.set_jh(w, base + j, choice.coupling());
            }
        }
        for j in BRIDGE_COLUMNS {
            inst.set_jv(row, base + j, quarter);
        }
    }
    Ok(inst)
}

/// Simulator circuit that applies the exact realized cell operators, with the
/// compiler's first and last layers; its `⟨0|C|0⟩` predicts `Δ^{−1}Z` with phase.
pub fn realized_circuit(wires: usize, word: &[CellOp]) -> Result<Circuit, MbqcError> {
    let (idle, _) = pattern_table()
        .wire_identity
        .ok_or_else(|| MbqcError::Dimensions("no single-wire identity pattern".into()))?;
    let idle_op = wire_op(idle, 0, CELL_COLUMNS);
    let mut circ = Circuit::new(wires, 0);
    for w in 0..wires {
        circ.push(Gate::one(GateKind::H, w));
    }
    for op in word {
        let (row, top, bottom) = placement(op)?;
        circ.push(Gate::generic2(&cell_op(top, bottom), row, row + 1));
        for w in (0..wires).filter(|&w| w != row && w != row + 1) {
            circ.push(Gate::generic1(&idle_op, w));
        }
    }
    for w in 0..wires {
        circ.push(Gate::one(GateKind::ZRot(-std::f64::consts::FRAC_PI_2), w));
        circ.push(Gate::one(GateKind::H, w));
    }
    Ok(circ)
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbedReport {
    #[serde(skip)]
    pub instance: IsingInstance,
    pub wires: usize,
    pub columns: usize,
    pub cells: usize,
    pub log2_delta: f64,
    /// Contracted vertical edge qubits (#γ).
    pub gamma_count: usize,
    /// Qubits kept on the wires, vertex plus horizontal edge qubits (#δ).
    pub delta_count: usize,
    /// Horizontal couplings equal to Ω (#Ω).
    pub omega_count: usize,
    pub log2_delta_t: f64,
    pub log2_delta_c: f64,
    pub log2_delta_o: f64,
    /// `Δ^{−1}Z` from the transfer-matrix oracle.
    pub amplitude: Complex64,
    /// `⟨0|C|0⟩` predicted from the exact realized cells.
    pub predicted: Complex64,
    /// `⟨0|U|0⟩` of the target circuit.
    pub target_amplitude: Complex64,
}

impl EmbedReport {
    /// `Δ` itself; infinite once it exceeds the f64 range.
    pub fn delta(&self) -> f64 {
        self.log2_delta.exp2()
    }

    pub fn delta_t(&self) -> f64 {
        self.log2_delta_t.exp2()
    }

    pub fn delta_c(&self) -> f64 {
        self.log2_delta_c.exp2()
    }

    /// `4·log2 Δ` predicted by counting, `2|V| + #Ω + 2n`.
    pub fn quadruple_log2_delta_by_counts(&self) -> usize {
        2 * self.wires * self.columns + self.omega_count + 2 * self.wires
    }

    /// `||Δ^{−1}Z| − |⟨0|U|0⟩||`
    pub fn phase_free_error(&self) -> f64 {
        (self.amplitude.norm() - self.target_amplitude.norm()).abs()
    }

    /// `|Δ^{−1}Z − predicted|`, which also checks the phase bookkeeping.
    pub fn prediction_error(&self) -> f64 {
        (self.amplitude - self.predicted).norm()
    }

    pub fn csv_header() -> &'static str {
        "wires,columns,cells,log2_delta,gamma_count,delta_count,omega_count,log2_delta_t,log2_delta_c,log2_delta_o,amp_re,amp_im,target_re,target_im,phase_free_error"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{:.12e},{:.12e},{:.12e},{:.12e},{:.3e}",
            self.wires,
            self.columns,
            self.cells,
            self.log2_delta,
            self.gamma_count,
            self.delta_count,
            self.omega_count,
            self.log2_delta_t,
            self.log2_delta_c,
            self.log2_delta_o,
            self.amplitude.re,
            self.amplitude.im,
            self.target_amplitude.re,
            self.target_amplitude.im,
            self.phase_free_error()
        )
    }
}

/// Builds the Problem-2 instance for `target` and evaluates it three ways.
pub fn embed_circuit(target: &TargetCircuit) -> Result<EmbedReport, MbqcError> {
    let word = cell_word(target)?;
    let n = target.wires;
    let instance = instance_for_word(n, &word)?;
    let m = instance.m();
    let reduction = reduce_vertical_edges(&instance)?;
    let gamma_count = reduction.gamma_count;
    let delta_count = instance.num_vertices() + instance.num_horizontal_edges();
    let omega = crate::model::omega();
    let omega_count = (0..n)
        .flat_map(|r| (0..m - 1).map(move |col| (r, col)))
        .filter(|&(r, col)| (instance.jh(r, col) - omega).norm() < 1e-12)
        .count();
    let log2_delta = log2_delta_problem1(&instance);
    let log2_delta_o = log2_delta_o(&instance)?;
    let log2_delta_t = reduction.log2_delta_t();
    let log2_delta_c = -((delta_count - n) as f64) / 2.0;
    let exact = transfer_matrix_z(&instance)?;
    let amplitude = exact.scaled_by_pow2(log2_delta);
    let predicted = run_circuit(&realized_circuit(n, &word)?)?;
    let target_amplitude = run_circuit(&target.to_circuit())?;
    Ok(EmbedReport {
        instance,
        wires: n,
        columns: m,
        cells: word.len(),
        log2_delta,
        gamma_count,
        delta_count,
        omega_count,
        log2_delta_t,
        log2_delta_c,
        log2_delta_o,
        amplitude,
        predicted,
        target_amplitude,
    })
}
