//! Gate and circuit representation shared by every compiler.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::linalg::{self, c, CMat};

#[derive(Debug, Error, PartialEq)]
pub enum CircuitError {
    #[error("gate {kind} expects {expected} qubits, got {got}")]
    Arity { kind: &'static str, expected: usize, got: usize },
    #[error("gate {index} touches qubit {qubit} but the circuit has {num_qubits}")]
    QubitRange { index: usize, qubit: usize, num_qubits: usize },
    #[error("gate {kind} repeats a qubit")]
    RepeatedQubit { kind: &'static str },
    #[error("malformed circuit document: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    H,
    X,
    /// `diag(e^{iφ0}, e^{iφ1})`
    PhaseDiag(f64, f64),
    /// `e^{−iθZ/2}`
    ZRot(f64),
    /// `e^{−iθX/2}`
    XRot(f64),
    /// `exp(c·Z⊗Z)` for complex `c`
    ZZRot(Complex64),
    CZ,
    /// Control on the first qubit, `e^{−iθY/2}` on the second.
    CYRot(f64),
    GlobalPhase(f64),
    /// Row-major 2x2.
    Generic1Q([Complex64; 4]),
    /// Row-major 4x4; the first listed qubit is the first tensor factor.
    Generic2Q(Box<[Complex64; 16]>),
    /// Non-unitary `|0⟩⟨0|` on one qubit.
    ProjectZero,
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::PhaseDiag(..) => "PhaseDiag",
            GateKind::ZRot(_) => "ZRot",
            GateKind::XRot(_) => "XRot",
            GateKind::ZZRot(_) => "ZZRot",
            GateKind::CZ => "CZ",
            GateKind::CYRot(_) => "CYRot",
            GateKind::GlobalPhase(_) => "GlobalPhase",
            GateKind::Generic1Q(_) => "Generic1Q",
            GateKind::Generic2Q(_) => "Generic2Q",
            GateKind::ProjectZero => "ProjectZero",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            GateKind::GlobalPhase(_) => 0,
            GateKind::ZZRot(_) | GateKind::CZ | GateKind::CYRot(_) | GateKind::Generic2Q(_) => 2,
            _ => 1,
        }
    }

    fn params(&self) -> Vec<f64> {
        let flat = |m: &[Complex64]| m.iter().flat_map(|z| [z.re, z.im]).collect();
        match self {
            GateKind::H | GateKind::X | GateKind::CZ | GateKind::ProjectZero => Vec::new(),
            GateKind::PhaseDiag(a, b) => vec![*a, *b],
            GateKind::ZRot(t) | GateKind::XRot(t) | GateKind::CYRot(t) | GateKind::GlobalPhase(t) => {
                vec![*t]
            }
            GateKind::ZZRot(z) => vec![z.re, z.im],
            GateKind::Generic1Q(m) => flat(m),
            GateKind::Generic2Q(m) => flat(&m[..]),
        }
    }

    fn from_parts(kind: &str, p: &[f64]) -> Result<Self, CircuitError> {
        let need = |k: usize| {
            if p.len() == k {
                Ok(())
            } else {
                Err(CircuitError::Malformed(format!("{kind} expects {k} params, got {}", p.len())))
            }
        };
        let cplx = |k: usize| -> Vec<Complex64> { (0..k).map(|i| c(p[2 * i], p[2 * i + 1])).collect() };
        Ok(match kind {
            "H" => need(0).map(|_| GateKind::H)?,
            "X" => need(0).map(|_| GateKind::X)?,
            "CZ" => need(0).map(|_| GateKind::CZ)?,
            "ProjectZero" => need(0).map(|_| GateKind::ProjectZero)?,
            "PhaseDiag" => need(2).map(|_| GateKind::PhaseDiag(p[0], p[1]))?,
            "ZRot" => need(1).map(|_| GateKind::ZRot(p[0]))?,
            "XRot" => need(1).map(|_| GateKind::XRot(p[0]))?,
            "CYRot" => need(1).map(|_| GateKind::CYRot(p[0]))?,
            "GlobalPhase" => need(1).map(|_| GateKind::GlobalPhase(p[0]))?,
            "ZZRot" => need(2).map(|_| GateKind::ZZRot(c(p[0], p[1])))?,
            "Generic1Q" => {
                need(8)?;
                GateKind::Generic1Q(cplx(4).try_into().expect("length checked"))
            }
            "Generic2Q" => {
                need(32)?;
                GateKind::Generic2Q(Box::new(cplx(16).try_into().expect("length checked")))
            }
            other => return Err(CircuitError::Malformed(format!("unknown gate kind {other}"))),
        })
    }

    /// Matrix of dimension `2^arity`.
    pub fn matrix(&self) -> CMat {
        match self {
            GateKind::H => linalg::hadamard(),
            GateKind::X => linalg::pauli_x(),
            GateKind::PhaseDiag(a, b) => linalg::diag(&[Complex64::cis(*a), Complex64::cis(*b)]),
            GateKind::ZRot(t) => linalg::zrot(*t),
            GateKind::XRot(t) => linalg::xrot(*t),
            GateKind::ZZRot(z) => {
                let (p, m) = (z.exp(), (-z).exp());
                linalg::diag(&[p, m, m, p])
            }
            GateKind::CZ => linalg::cz(),
            GateKind::CYRot(t) => {
                let mut u = linalg::identity(4);
                let y = linalg::yrot(*t);
                u.view_mut((2, 2), (2, 2)).copy_from(&y);
                u
            }
            GateKind::GlobalPhase(p) => linalg::from_rows(1, &[Complex64::cis(*p)]),
            GateKind::Generic1Q(m) => linalg::from_rows(2, m),
            GateKind::Generic2Q(m) => linalg::from_rows(4, &m[..]),
            GateKind::ProjectZero => linalg::diag(&[c(1.0, 0.0), c(0.0, 0.0)]),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(
            self,
            GateKind::PhaseDiag(..)
                | GateKind::ZRot(_)
                | GateKind::ZZRot(_)
                | GateKind::CZ
                | GateKind::GlobalPhase(_)
                | GateKind::ProjectZero
        )
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        !matches!(self, GateKind::ProjectZero) && linalg::unitarity_error(&self.matrix()) <= tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: &[usize]) -> Self {
        Self { kind, qubits: qubits.to_vec() }
    }

    pub fn one(kind: GateKind, q: usize) -> Self {
        Self::new(kind, &[q])
    }

    pub fn two(kind: GateKind, q0: usize, q1: usize) -> Self {
        Self::new(kind, &[q0, q1])
    }

    pub fn phase(phi: f64) -> Self {
        Self::new(GateKind::GlobalPhase(phi), &[])
    }

    pub fn generic1(m: &CMat, q: usize) -> Self {
        let e: Vec<Complex64> = (0..4).map(|i| m[(i / 2, i % 2)]).collect();
        Self::one(GateKind::Generic1Q(e.try_into().expect("2x2")), q)
    }

    pub fn generic2(m: &CMat, q0: usize, q1: usize) -> Self {
        let e: Vec<Complex64> = (0..16).map(|i| m[(i / 4, i % 4)]).collect();
        Self::two(GateKind::Generic2Q(Box::new(e.try_into().expect("4x4"))), q0, q1)
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        let kind = self.kind.name();
        if self.qubits.len() != self.kind.arity() {
            return Err(CircuitError::Arity { kind, expected: self.kind.arity(), got: self.qubits.len() });
        }
        if self.qubits.len() == 2 && self.qubits[0] == self.qubits[1] {
            return Err(CircuitError::RepeatedQubit { kind });
        }
        Ok(())
    }

    /// Adjoint of a unitary gate.
    pub fn dagger(&self) -> Gate {
        let kind = match &self.kind {
            GateKind::H | GateKind::X | GateKind::CZ | GateKind::ProjectZero => self.kind.clone(),
            GateKind::PhaseDiag(a, b) => GateKind::PhaseDiag(-a, -b),
            GateKind::ZRot(t) => GateKind::ZRot(-t),
            GateKind::XRot(t) => GateKind::XRot(-t),
            GateKind::CYRot(t) => GateKind::CYRot(-t),
            GateKind::GlobalPhase(p) => GateKind::GlobalPhase(-p),
            GateKind::ZZRot(z) => GateKind::ZZRot(z.conj()),
            GateKind::Generic1Q(_) | GateKind::Generic2Q(_) => {
                let m = self.kind.matrix().adjoint();
                return if m.nrows() == 2 {
                    Gate::generic1(&m, self.qubits[0])
                } else {
                    Gate::generic2(&m, self.qubits[0], self.qubits[1])
                };
            }
        };
        Gate { kind, qubits: self.qubits.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QubitRole {
    Wire,
    Ancilla,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub num_qubits: usize,
    pub gates: Vec<Gate>,
    /// The approximation scale this circuit's amplitude is multiplied by.
    pub scale: f64,
    pub roles: Vec<QubitRole>,
}

impl Circuit {
    pub fn new(wires: usize, ancillas: usize) -> Self {
        let mut roles = vec![QubitRole::Wire; wires];
        roles.extend(std::iter::repeat_n(QubitRole::Ancilla, ancillas));
        Self { num_qubits: wires + ancillas, gates: Vec::new(), scale: 1.0, roles }
    }

    pub fn push(&mut self, g: Gate) {
        self.gates.push(g);
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        for (index, g) in self.gates.iter().enumerate() {
            g.validate()?;
            if let Some(&qubit) = g.qubits.iter().find(|&&q| q >= self.num_qubits) {
                return Err(CircuitError::QubitRange { index, qubit, num_qubits: self.num_qubits });
            }
        }
        Ok(())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.gates.iter().all(|g| g.kind.is_unitary(tol))
    }

    /// Full `2^k x 2^k` matrix (qubit 0 is the least significant bit); for tests.
    pub fn full_matrix(&self) -> CMat {
        let dim = 1usize << self.num_qubits;
        let mut u = linalg::identity(dim);
        for g in &self.gates {
            u = embed(&g.kind.matrix(), &g.qubits, self.num_qubits) * u;
        }
        u
    }

    pub fn to_json(&self) -> String {
        let gates: Vec<GateDoc> = self
            .gates
            .iter()
            .map(|g| GateDoc { kind: g.kind.name().to_string(), q: g.qubits.clone(), params: g.kind.params() })
            .collect();
        let doc = CircuitDoc { qubits: self.num_qubits, scale: self.scale, gates, roles: Some(self.roles.clone()) };
        serde_json::to_string(&doc).expect("circuit document is always serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, CircuitError> {
        let doc: CircuitDoc = serde_json::from_str(text).map_err(|e| CircuitError::Malformed(e.to_string()))?;
        let gates = doc
            .gates
            .iter()
            .map(|g| Ok(Gate { kind: GateKind::from_parts(&g.kind, &g.params)?, qubits: g.q.clone() }))
            .collect::<Result<Vec<_>, CircuitError>>()?;
        let roles = doc.roles.unwrap_or_else(|| vec![QubitRole::Wire; doc.qubits]);
        if roles.len() != doc.qubits {
            return Err(CircuitError::Malformed("roles length differs from qubit count".into()));
        }
        let circuit = Circuit { num_qubits: doc.qubits, gates, scale: doc.scale, roles };
        circuit.validate()?;
        Ok(circuit)
    }

    pub fn to_value(&self) -> Value {
        serde_json::from_str(&self.to_json()).expect("round trip of own output")
    }
}

#[derive(Serialize, Deserialize)]
struct GateDoc {
    kind: String,
    q: Vec<usize>,
    #[serde(default)]
    params: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CircuitDoc {
    qubits: usize,
    scale: f64,
    gates: Vec<GateDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    roles: Option<Vec<QubitRole>>,
}

/// Lifts a local gate matrix to the full register by explicit basis expansion.
pub fn embed(local: &CMat, qubits: &[usize], num_qubits: usize) -> CMat {
    let dim = 1usize << num_qubits;
    if qubits.is_empty() {
        return linalg::identity(dim) * local[(0, 0)];
    }
    let k = qubits.len();
    let local_index = |i: usize| {
        qubits.iter().fold(0usize, |acc, &q| (acc << 1) | (i >> q & 1))
    };
    let mask: usize = qubits.iter().map(|&q| 1usize << q).sum();
    let mut out = CMat::zeros(dim, dim);
    for col in 0..dim {
        let lc = local_index(col);
        for lr in 0..(1usize << k) {
            let mut row = col & !mask;
            for (pos, &q) in qubits.iter().enumerate() {
                if lr >> (k - 1 - pos) & 1 == 1 {
                    row |= 1 << q;
                }
            }
            out[(row, col)] += local[(lr, lc)];
        }
    }
    out
}
