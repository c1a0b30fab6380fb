//! Unitary compilation: the constant-depth overlap circuit and the n-wire
//! circuit for instances with imaginary fields and vertical couplings.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::linalg::{self, CMat};
use crate::model::{classify_domain, horizontal_rk, DomainClass, IsingInstance, DOMAIN_TOL};

/// Largest decorated lattice compiled into an explicit constant-depth circuit.
pub const MAX_CONSTANT_DEPTH_QUBITS: usize = 24;
/// Real parts beyond this overflow the scale products.
pub const MAX_REAL_PART: f64 = 300.0;

#[derive(Debug, Error, PartialEq)]
pub enum CompileError {
    #[error("instance is in domain {found:?}, which this compiler does not accept")]
    WrongDomain { found: DomainClass },
    #[error("{got} qubits exceeds the limit of {limit}")]
    TooManyQubits { got: usize, limit: usize },
    #[error("parameter {value} has a real part too large for the scale computation")]
    Overflow { value: Complex64 },
    #[error("non-finite parameter {value}")]
    NonFinite { value: Complex64 },
}

/// How the last column's vertex gates are emitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Readout {
    /// Emit `H·e^{βhZ}` directly.
    #[default]
    Gate,
    /// Emit the gate, its inverse, then the readout matrix `A_a` (debug cross-check).
    EmitThenInvert,
}

/// The angle with `sin ξ = (−1)^{k+1} e^{−r} / √(2 cosh 2r)` and `cos ξ ≥ 0`.
pub fn xi_angle(r: f64, k: i64) -> f64 {
    let sign = if k.rem_euclid(2) == 0 { -1.0 } else { 1.0 };
    // e^{−r}/√(2cosh 2r) = 1/√(1 + e^{4r}), stable for large |r|
    (sign / (1.0 + (4.0 * r).exp()).sqrt()).asin()
}

/// The unitary readout matrix `(1/N)[[e^z, e^{−z}], [(e^{−z})*, −(e^z)*]]`.
pub fn readout_matrix(z: Complex64) -> CMat {
    let (p, m) = (z.exp(), (-z).exp());
    let norm = (p.norm_sqr() + m.norm_sqr()).sqrt();
    linalg::from_rows(2, &[p / norm, m / norm, m.conj() / norm, -p.conj() / norm])
}

/// `√(|e^z|² + |e^{−z}|²)`
pub fn weight_norm(z: Complex64) -> f64 {
    (z.exp().norm_sqr() + (-z).exp().norm_sqr()).sqrt()
}

fn check_params(inst: &IsingInstance) -> Result<(), CompileError> {
    for value in inst.params() {
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(CompileError::NonFinite { value });
        }
        if value.re.abs() > MAX_REAL_PART {
            return Err(CompileError::Overflow { value });
        }
    }
    Ok(())
}

/// `Δ_o = 2^{|V|/2} Π_edges √(|e^J|²+|e^{−J}|²) Π_vertices √(|e^h|²+|e^{−h}|²)`.
pub fn delta_o(inst: &IsingInstance) -> Result<f64, CompileError> {
    Ok(log2_delta_o(inst)?.exp2())
}

/// `log2 Δ_o`, usable where `Δ_o` itself overflows.
pub fn log2_delta_o(inst: &IsingInstance) -> Result<f64, CompileError> {
    check_params(inst)?;
    Ok(inst.num_vertices() as f64 / 2.0 + inst.params().map(|z| weight_norm(z).log2()).sum::<f64>())
}

fn require_problem1(inst: &IsingInstance) -> Result<(), CompileError> {
    let found = classify_domain(inst, DOMAIN_TOL);
    if found.implies(DomainClass::Problem1) {
        Ok(())
    } else {
        Err(CompileError::WrongDomain { found })
    }
}

/// `Δ = 2^{n(m+1)/2} Π_horizontal √cosh(2r)`.
pub fn delta_problem1(inst: &IsingInstance) -> Result<f64, CompileError> {
    require_problem1(inst)?;
    Ok(log2_delta_problem1(inst).exp2())
}

/// `log2 Δ`, usable where `Δ` itself overflows.
pub fn log2_delta_problem1(inst: &IsingInstance) -> f64 {
    let (n, m) = (inst.n(), inst.m());
    let mut log2 = (n * (m + 1)) as f64 / 2.0;
    for r in 0..n {
        for c in 0..m.saturating_sub(1) {
            let re = inst.jh(r, c).re;
            log2 += 0.5 * (2.0 * re).cosh().log2();
        }
    }
    log2
}

/// Gates realizing `H·e^{iφZ}` on one wire.
fn vertex_gates(wire: usize, phi: f64) -> Vec<Gate> {
    let mut out = Vec::with_capacity(2);
    if phi != 0.0 {
        out.push(Gate::one(GateKind::ZRot(-2.0 * phi), wire));
    }
    out.push(Gate::one(GateKind::H, wire));
    out
}

/// The n-wire circuit `C` with `Z = Δ·⟨0|C|0⟩`.
pub fn compile_problem1(inst: &IsingInstance, readout: Readout) -> Result<Circuit, CompileError> {
    require_problem1(inst)?;
    let (n, m) = (inst.n(), inst.m());
    let mut circ = Circuit::new(n, 0);
    circ.scale = delta_problem1(inst)?;
    for w in 0..n {
        circ.push(Gate::one(GateKind::H, w));
    }
    let mut phase = 0.0;
    let mut body = Vec::new();
    for c in 0..m {
        for r in 0..n.saturating_sub(1) {
            let j = inst.jv(r, c);
            if j != Complex64::new(0.0, 0.0) {
                body.push(Gate::two(GateKind::ZZRot(j), r, r + 1));
            }
        }
        for r in 0..n {
            let h = inst.h(r, c);
            let gates = vertex_gates(r, h.im);
            if c + 1 == m && readout == Readout::EmitThenInvert {
                body.extend(gates.iter().cloned());
                body.extend(gates.iter().rev().map(Gate::dagger));
                body.push(Gate::generic1(&readout_matrix(h), r));
            } else {
                body.extend(gates);
            }
        }
        if c + 1 < m {
            for r in 0..n {
                let (re, k) = horizontal_rk(inst.jh(r, c), DOMAIN_TOL).expect("domain checked");
                let xi = xi_angle(re, k);
                phase += (2 * k + 1) as f64 * FRAC_PI_4;
                if xi != 0.0 {
                    body.push(Gate::one(GateKind::ZRot(-2.0 * xi), r));
                }
                body.push(Gate::one(GateKind::H, r));
            }
        }
    }
    if phase != 0.0 {
        circ.push(Gate::phase(phase));
    }
    circ.gates.extend(body);
    Ok(circ)
}

/// The constant-depth circuit `A·F` on the decorated lattice. Vertex `r·m + c`
/// is qubit `r·m + c`; bond `i` (in [`IsingInstance::edges`] order) is qubit `nm + i`.
pub fn build_constant_depth(inst: &IsingInstance) -> Result<Circuit, CompileError> {
    let nq = inst.num_decorated_vertices();
    if nq > MAX_CONSTANT_DEPTH_QUBITS {
        return Err(CompileError::TooManyQubits { got: nq, limit: MAX_CONSTANT_DEPTH_QUBITS });
    }
    let mut circ = Circuit::new(nq, 0);
    circ.scale = delta_o(inst)?;
    let nm = inst.num_vertices();
    let edges = inst.edges();
    for q in 0..nq {
        circ.push(Gate::one(GateKind::H, q));
    }
    for (i, e) in edges.iter().enumerate() {
        circ.push(Gate::two(GateKind::CZ, e.a, nm + i));
        circ.push(Gate::two(GateKind::CZ, nm + i, e.b));
    }
    for (v, &h) in inst.fields().iter().enumerate() {
        circ.push(Gate::generic1(&readout_matrix(h), v));
    }
    for (i, e) in edges.iter().enumerate() {
        circ.push(Gate::one(GateKind::H, nm + i));
        circ.push(Gate::generic1(&readout_matrix(e.coupling), nm + i));
    }
    Ok(circ)
}
