//! The two-qubit gate set realized by brickwork unit cells, and the exact
//! constructions of H, T, Z/X rotations and CNOT from it.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::Serialize;

use crate::linalg::{self, kron, CMat};

/// `Z(θ) = e^{−iθZ/2}`
pub fn z_rot(theta: f64) -> CMat {
    linalg::zrot(theta)
}

/// `X(θ) = e^{−iθX/2}`
pub fn x_rot(theta: f64) -> CMat {
    linalg::xrot(theta)
}

fn zz() -> CMat {
    kron(&linalg::pauli_z(), &linalg::pauli_z())
}

fn id2() -> CMat {
    linalg::identity(2)
}

pub fn u1() -> CMat {
    zz()
}

pub fn u2() -> CMat {
    zz() * kron(&z_rot(-FRAC_PI_4), &id2())
}

/// `(Z⊗Z)(Z(π/4)⊗I)`: the conjugate of `U2`, used in its place for Z rotations.
pub fn u2_conj() -> CMat {
    zz() * kron(&z_rot(FRAC_PI_4), &id2())
}

pub fn u3() -> CMat {
    zz() * kron(&x_rot(-FRAC_PI_4), &id2())
}

pub fn u4() -> CMat {
    let sdag = linalg::s_gate().adjoint();
    let cz = linalg::cz();
    kron(&sdag, &linalg::pauli_z()) * &cz * kron(&x_rot(-FRAC_PI_4), &id2()) * &cz * kron(&sdag, &id2())
}

/// `[U1, U2, U3, U4]`, first tensor factor is the upper wire.
pub fn gate_set() -> [CMat; 4] {
    [u1(), u2(), u3(), u4()]
}

/// CNOT with control on the second factor and target on the first.
pub fn cnot_21() -> CMat {
    let s = linalg::swap();
    &s * linalg::cnot() * &s
}

/// `Λ_{2,1}(X) = (X(π/2)⊗I)(Z(π/2)⊗Z(−π/2))U4 U1 U4(Z(π/2)⊗I)`
pub fn cnot_from_gate_set() -> CMat {
    kron(&x_rot(FRAC_PI_2), &id2())
        * kron(&z_rot(FRAC_PI_2), &z_rot(-FRAC_PI_2))
        * u4()
        * u1()
        * u4()
        * kron(&z_rot(FRAC_PI_2), &id2())
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    /// Global-phase-free max entrywise distance.
    pub distance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn max_distance(&self) -> f64 {
        self.checks.iter().map(|c| c.distance).fold(0.0, f64::max)
    }

    pub fn all_within(&self, tol: f64) -> bool {
        self.checks.iter().all(|c| c.distance < tol)
    }
}

/// Evaluates every gate-set identity used by the embedder.
pub fn verify_identities() -> IdentityReport {
    let mut checks = Vec::new();
    let mut push = |name: String, a: &CMat, b: &CMat| {
        checks.push(IdentityCheck { name, distance: linalg::phase_free_distance(a, b) });
    };
    let (g1, g2, g3, gt) = (u1(), u2(), u3(), u2_conj());
    push("U1^2 = I".into(), &(&g1 * &g1), &linalg::identity(4));
    for (i, u) in gate_set().iter().enumerate() {
        push(format!("U{} unitary", i + 1), &(u.adjoint() * u), &linalg::identity(4));
    }
    let z_step = &g1 * &g2;
    let x_step = &g1 * &g3;
    let t_step = &g1 * &gt;
    push("(U1U2)^7 = T⊗I".into(), &linalg::mat_pow(&z_step, 7), &kron(&linalg::t_gate(), &id2()));
    for k in 0..8 {
        let angle = k as f64 * FRAC_PI_4;
        push(format!("(U1U2)^{} = Z({k}π/4)⊗I", 8 - k), &linalg::mat_pow(&z_step, 8 - k), &kron(&z_rot(angle), &id2()));
        push(format!("(U1U3)^{} = X({k}π/4)⊗I", 8 - k), &linalg::mat_pow(&x_step, 8 - k), &kron(&x_rot(angle), &id2()));
        push(format!("(U1U2c)^{k} = Z({k}π/4)⊗I"), &linalg::mat_pow(&t_step, k), &kron(&z_rot(angle), &id2()));
    }
    push(
        "H = Z(π/2)X(π/2)Z(π/2)".into(),
        &linalg::hadamard(),
        &(z_rot(FRAC_PI_2) * x_rot(FRAC_PI_2) * z_rot(FRAC_PI_2)),
    );
    push("CNOT(2→1) from U4 U1 U4".into(), &cnot_21(), &cnot_from_gate_set());
    IdentityReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gates_are_unitary() {
        for u in gate_set().iter().chain([u2_conj()].iter()) {
            assert!(linalg::unitarity_error(u) < 1e-14);
        }
    }

    #[test]
    fn all_identities_hold() {
        let report = verify_identities();
        for c in &report.checks {
            assert!(c.distance < 1e-12, "{}: {}", c.name, c.distance);
        }
        assert!(report.checks.len() > 25);
    }

    #[test]
    fn u4_entangles() {
        assert!(linalg::schmidt_rank(&u4(), 1e-9) > 1);
        assert_eq!(linalg::schmidt_rank(&u3(), 1e-9), 1);
    }

    #[test]
    fn full_x_rotation() {
        let p = linalg::mat_pow(&(u1() * u3()), 4);
        assert!(linalg::phase_free_distance(&p, &kron(&x_rot(std::f64::consts::PI), &id2())) < 1e-12);
    }
}
