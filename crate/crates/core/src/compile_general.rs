//! Ancilla-assisted simulation of non-unitary projections, for arbitrary
//! complex parameters.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use num_complex::Complex64;
use serde::Serialize;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::compile_unitary::{delta_o, readout_matrix, CompileError};
use crate::linalg::{self, c, CMat};
use crate::model::IsingInstance;

/// A normalized bra `x0⟨0| + x1⟨1|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightedBra {
    pub x0: Complex64,
    pub x1: Complex64,
}

impl WeightedBra {
    /// Normalizes `(x0, x1)`; panics on the zero vector.
    pub fn new(x0: Complex64, x1: Complex64) -> Self {
        let norm = (x0.norm_sqr() + x1.norm_sqr()).sqrt();
        assert!(norm > 0.0, "bra must be non-zero");
        Self { x0: x0 / norm, x1: x1 / norm }
    }

    /// `(e^z, e^{−z}) / √(|e^z|² + |e^{−z}|²)`, computed without overflow.
    pub fn from_param(z: Complex64) -> Self {
        // divide through by e^{|Re z|} before exponentiating
        let shift = z.re.abs();
        let p = Complex64::from_polar((z.re - shift).exp(), z.im);
        let m = Complex64::from_polar((-z.re - shift).exp(), -z.im);
        Self::new(p, m)
    }
}

/// `((x0 + x1)/√2, (x0 − x1)/√2)`.
pub fn fold_hadamard(bra: WeightedBra) -> WeightedBra {
    WeightedBra {
        x0: (bra.x0 + bra.x1) * FRAC_1_SQRT_2,
        x1: (bra.x0 - bra.x1) * FRAC_1_SQRT_2,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProjectionKind {
    /// One wire: `M = √2·diag(x0, x1)`.
    I,
    /// Two wires: `M = diag(x0+x1, x0−x1, x0−x1, x0+x1)`.
    II,
}

/// Gadget parameters for one projection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectionPlan {
    pub kind: ProjectionKind,
    pub bra: WeightedBra,
    /// 1 when the second singular value is the larger one.
    pub l: u8,
    pub theta: f64,
    /// `‖M‖`, the largest singular value of `M`.
    pub norm: f64,
    /// Phases of the two distinct diagonal entries of `M`.
    pub phases: [f64; 2],
}

fn arg_or_zero(z: Complex64) -> f64 {
    if z.norm() == 0.0 {
        0.0
    } else {
        z.arg()
    }
}

fn plan_from_pair(kind: ProjectionKind, bra: WeightedBra, a: Complex64, b: Complex64) -> ProjectionPlan {
    let (ma, mb) = (a.norm(), b.norm());
    let (l, big, small) = if ma >= mb { (0, ma, mb) } else { (1, mb, ma) };
    let theta = 2.0 * (small / big).clamp(0.0, 1.0).acos();
    ProjectionPlan { kind, bra, l, theta, norm: big, phases: [arg_or_zero(a), arg_or_zero(b)] }
}

pub fn type1_plan(bra: WeightedBra) -> ProjectionPlan {
    plan_from_pair(ProjectionKind::I, bra, bra.x0 * SQRT_2, bra.x1 * SQRT_2)
}

pub fn type2_plan(bra: WeightedBra) -> ProjectionPlan {
    plan_from_pair(ProjectionKind::II, bra, bra.x0 + bra.x1, bra.x0 - bra.x1)
}

impl ProjectionPlan {
    /// The diagonal of `M`'s distinct entries, `(a, b)`.
    fn entries(&self) -> (Complex64, Complex64) {
        match self.kind {
            ProjectionKind::I => (self.bra.x0 * SQRT_2, self.bra.x1 * SQRT_2),
            ProjectionKind::II => (self.bra.x0 + self.bra.x1, self.bra.x0 - self.bra.x1),
        }
    }

    pub fn m_matrix(&self) -> CMat {
        let (a, b) = self.entries();
        match self.kind {
            ProjectionKind::I => linalg::diag(&[a, b]),
            ProjectionKind::II => linalg::diag(&[a, b, b, a]),
        }
    }

    /// The positive part `D` of `M = D·W`.
    pub fn d_matrix(&self) -> CMat {
        self.m_matrix().map(|z| c(z.norm(), 0.0))
    }

    /// The phase part `W` of `M = D·W`.
    pub fn w_matrix(&self) -> CMat {
        let [pa, pb] = self.phases.map(Complex64::cis);
        match self.kind {
            ProjectionKind::I => linalg::diag(&[pa, pb]),
            ProjectionKind::II => linalg::diag(&[pa, pb, pb, pa]),
        }
    }

    /// The wire operator the gadget implements after the ancilla is projected:
    /// `H·M/‖M‖` for type I, `M/‖M‖` for type II.
    pub fn direct_matrix(&self) -> CMat {
        let scaled = self.m_matrix() / c(self.norm, 0.0);
        match self.kind {
            ProjectionKind::I => linalg::hadamard() * scaled,
            ProjectionKind::II => scaled,
        }
    }

    /// Unitary gadget acting on `wires` and a fresh `|0⟩` ancilla.
    pub fn gadget(&self, wires: &[usize], ancilla: usize) -> Vec<Gate> {
        let mut out = Vec::new();
        let w0 = wires[0];
        match self.kind {
            ProjectionKind::I => {
                out.push(Gate::one(GateKind::PhaseDiag(self.phases[0], self.phases[1]), w0));
                if self.l == 1 {
                    out.push(Gate::one(GateKind::X, w0));
                }
                out.push(Gate::two(GateKind::CYRot(self.theta), w0, ancilla));
                if self.l == 1 {
                    out.push(Gate::one(GateKind::X, w0));
                }
                out.push(Gate::one(GateKind::H, w0));
            }
            ProjectionKind::II => {
                let w1 = wires[1];
                let [pa, pb] = self.phases;
                out.push(Gate::two(GateKind::ZZRot(c(0.0, (pa - pb) / 2.0)), w0, w1));
                out.push(Gate::phase((pa + pb) / 2.0));
                if self.l == 1 {
                    out.push(Gate::one(GateKind::X, w0));
                }
                out.push(Gate::two(GateKind::CYRot(self.theta), w0, ancilla));
                out.push(Gate::two(GateKind::CYRot(-self.theta), w1, ancilla));
                if self.l == 1 {
                    out.push(Gate::one(GateKind::X, w0));
                }
            }
        }
        out
    }

    /// The gate applying [`Self::direct_matrix`] on `wires`.
    pub fn direct_gate(&self, wires: &[usize]) -> Gate {
        let m = self.direct_matrix();
        match self.kind {
            ProjectionKind::I => Gate::generic1(&m, wires[0]),
            ProjectionKind::II => Gate::generic2(&m, wires[0], wires[1]),
        }
    }
}

/// Applies `M/‖M‖` (type II) or `H·M/‖M‖` (type I) to `targets` without an ancilla.
pub fn apply_projection_direct(
    state: &mut crate::simulator::StateVector,
    plan: &ProjectionPlan,
    targets: &[usize],
) -> Result<(), crate::simulator::SimError> {
    state.apply_gate(&plan.direct_gate(targets))
}

/// Which lattice element a projection belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Site {
    Vertical { r: usize, c: usize },
    Vertex { r: usize, c: usize },
    Horizontal { r: usize, c: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectionRecord {
    pub site: Site,
    pub plan: ProjectionPlan,
}

/// How the projections are realized in the emitted circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// One fresh ancilla per projection; the circuit is unitary.
    Monolithic,
    /// A single ancilla, projected onto `|0⟩` after each gadget.
    Reuse,
    /// No ancillas; each projection is a non-unitary wire operator.
    Direct,
}

#[derive(Debug, Clone)]
pub struct GeneralCompilation {
    pub circuit: Circuit,
    pub delta: f64,
    pub projections: Vec<ProjectionRecord>,
}

/// Projection plans in emission order, excluding right-boundary vertices.
pub fn projection_plans(inst: &IsingInstance) -> Vec<ProjectionRecord> {
    let (n, m) = (inst.n(), inst.m());
    let mut out = Vec::new();
    for c_ in 0..m {
        for r in 0..n.saturating_sub(1) {
            let plan = type2_plan(fold_hadamard(WeightedBra::from_param(inst.jv(r, c_))));
            out.push(ProjectionRecord { site: Site::Vertical { r, c: c_ }, plan });
        }
        if c_ + 1 < m {
            for r in 0..n {
                let plan = type1_plan(WeightedBra::from_param(inst.h(r, c_)));
                out.push(ProjectionRecord { site: Site::Vertex { r, c: c_ }, plan });
            }
            for r in 0..n {
                let plan = type1_plan(fold_hadamard(WeightedBra::from_param(inst.jh(r, c_))));
                out.push(ProjectionRecord { site: Site::Horizontal { r, c: c_ }, plan });
            }
        }
    }
    out
}

/// `log2 Δ = log2 Δ_o + Σ log2(‖M‖/√2)`.
pub fn log2_delta_general(inst: &IsingInstance, projections: &[ProjectionRecord]) -> Result<f64, CompileError> {
    let base = delta_o(inst)?.log2();
    Ok(base + projections.iter().map(|p| (p.plan.norm / SQRT_2).log2()).sum::<f64>())
}

/// Compiles any finite instance so that `Z = Δ·⟨0…0|C|0…0⟩`.
pub fn compile_general(inst: &IsingInstance, layout: Layout) -> Result<GeneralCompilation, CompileError> {
    let (n, m) = (inst.n(), inst.m());
    let projections = projection_plans(inst);
    let delta = log2_delta_general(inst, &projections)?.exp2();
    let ancillas = match layout {
        Layout::Monolithic => projections.len(),
        Layout::Reuse => 1,
        Layout::Direct => 0,
    };
    let mut circuit = Circuit::new(n, ancillas);
    circuit.scale = delta;
    for w in 0..n {
        circuit.push(Gate::one(GateKind::H, w));
    }
    let mut next = projections.iter().enumerate();
    let mut emit = |circuit: &mut Circuit, wires: &[usize]| {
        let (idx, rec) = next.next().expect("projection order matches emission order");
        match layout {
            Layout::Direct => circuit.push(rec.plan.direct_gate(wires)),
            Layout::Monolithic => circuit.gates.extend(rec.plan.gadget(wires, n + idx)),
            Layout::Reuse => {
                circuit.gates.extend(rec.plan.gadget(wires, n));
                circuit.push(Gate::one(GateKind::ProjectZero, n));
            }
        }
    };
    for c_ in 0..m {
        for r in 0..n.saturating_sub(1) {
            emit(&mut circuit, &[r, r + 1]);
        }
        if c_ + 1 < m {
            for r in 0..n {
                emit(&mut circuit, &[r]);
            }
            for r in 0..n {
                emit(&mut circuit, &[r]);
            }
        } else {
            for r in 0..n {
                circuit.push(Gate::generic1(&readout_matrix(inst.h(r, c_)), r));
            }
        }
    }
    Ok(GeneralCompilation { circuit, delta, projections })
}

/// The closed form `2^{nm} e^{(2nm−n−m)β} cosh(β)^{nm−n} cosh(2β)^{n/2}` for
/// the ±β random-bond model with all fields equal to β.
pub fn delta_random_bond(n: usize, m: usize, beta: f64) -> f64 {
    let (nf, mf) = (n as f64, m as f64);
    let nm = nf * mf;
    2f64.powf(nm)
        * ((2.0 * nm - nf - mf) * beta).exp()
        * beta.cosh().powf(nm - nf)
        * (2.0 * beta).cosh().powf(nf / 2.0)
}

/// A ±β random-bond instance with every field equal to β.
pub fn random_bond_instance(n: usize, m: usize, beta: f64, seed: u64) -> IsingInstance {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut inst = IsingInstance::new(n, m).expect("positive dimensions");
    let mut sign = || if rng.gen_bool(0.5) { beta } else { -beta };
    for r in 0..n {
        for c_ in 0..m {
            inst.set_h(r, c_, c(beta, 0.0));
            if r + 1 < n {
                inst.set_jv(r, c_, c(sign(), 0.0));
            }
            if c_ + 1 < m {
                inst.set_jh(r, c_, c(sign(), 0.0));
            }
        }
    }
    inst
}

/// `log2(Δ_product / (e^{(2nm−n−m)β} cosh(β)^{nm−n} cosh(2β)^{n/2}))`: the
/// power-of-two prefactor measured from the product formula.
pub fn measured_random_bond_log2_prefactor(n: usize, m: usize, beta: f64, seed: u64) -> Result<f64, CompileError> {
    let inst = random_bond_instance(n, m, beta, seed);
    let log2_delta = log2_delta_general(&inst, &projection_plans(&inst))?;
    let (nf, mf) = (n as f64, m as f64);
    let nm = nf * mf;
    let rest = (2.0 * nm - nf - mf) * beta / std::f64::consts::LN_2
        + (nm - nf) * beta.cosh().log2()
        + nf / 2.0 * (2.0 * beta).cosh().log2();
    Ok(log2_delta - rest)
}
