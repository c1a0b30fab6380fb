//! The 24-element single-qubit Clifford group, modulo global phase, with an
//! exact composition table that keeps the dropped phases as powers of e^{iπ/4}.

use std::collections::VecDeque;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::linalg::{self, c, CMat};

/// An element of the Clifford group; `Clifford(0)` is the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clifford(pub u8);

/// The six Pauli eigenbras, in the order `⟨0|, ⟨1|, ⟨+|, ⟨−|, ⟨+i|, ⟨−i|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliBra {
    Zero,
    One,
    Plus,
    Minus,
    /// `(⟨0| − i⟨1|)/√2`, the bra of the +1 eigenvector of Y.
    YPlus,
    /// `(⟨0| + i⟨1|)/√2`.
    YMinus,
}

impl PauliBra {
    pub const ALL: [PauliBra; 6] =
        [PauliBra::Zero, PauliBra::One, PauliBra::Plus, PauliBra::Minus, PauliBra::YPlus, PauliBra::YMinus];

    pub fn row(self) -> [Complex64; 2] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            PauliBra::Zero => [c(1.0, 0.0), c(0.0, 0.0)],
            PauliBra::One => [c(0.0, 0.0), c(1.0, 0.0)],
            PauliBra::Plus => [c(s, 0.0), c(s, 0.0)],
            PauliBra::Minus => [c(s, 0.0), c(-s, 0.0)],
            PauliBra::YPlus => [c(s, 0.0), c(0.0, -s)],
            PauliBra::YMinus => [c(s, 0.0), c(0.0, s)],
        }
    }

    fn index(self) -> usize {
        PauliBra::ALL.iter().position(|&b| b == self).expect("listed")
    }
}

struct Tables {
    matrices: Vec<CMat>,
    /// `compose[a][b] = (k, p)` with `M_a·M_b = ω^p·M_k`.
    compose: Vec<Vec<(u8, u8)>>,
    /// `bra[b][k] = (b', p)` with `⟨b|·M_k = ω^p·⟨b'|`.
    bra: Vec<Vec<(PauliBra, u8)>>,
}

fn omega_pow(p: u8) -> Complex64 {
    Complex64::cis(std::f64::consts::FRAC_PI_4 * p as f64)
}

/// Rescales so the first non-negligible entry (row-major) is real and positive;
/// returns the canonical matrix and the removed phase as a power of ω.
fn canonical(m: &CMat) -> (CMat, u8) {
    let first = first_entry(m).expect("non-zero");
    let p = phase_index(first / first.norm());
    (m * omega_pow((8 - p) % 8), p)
}

fn first_entry(m: &CMat) -> Option<Complex64> {
    (0..m.nrows()).flat_map(|r| (0..m.ncols()).map(move |k| (r, k))).map(|ix| m[ix]).find(|z| z.norm() > 1e-9)
}

/// `k` with `z ≈ ω^k`, for unit `z` on the eighth roots of unity.
fn phase_index(z: Complex64) -> u8 {
    let k = (z.arg() / std::f64::consts::FRAC_PI_4).round().rem_euclid(8.0) as u8;
    debug_assert!((omega_pow(k) - z).norm() < 1e-9, "phase {z} is not an eighth root of unity");
    k
}

fn find(matrices: &[CMat], m: &CMat) -> Option<usize> {
    matrices.iter().position(|x| linalg::max_abs(&(x - m)) < 1e-9)
}

fn build() -> Tables {
    let (h, s) = (linalg::hadamard(), linalg::s_gate());
    let mut matrices = vec![linalg::identity(2)];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in [&h, &s] {
            let (m, _) = canonical(&(g * &matrices[i]));
            if find(&matrices, &m).is_none() {
                matrices.push(m);
                queue.push_back(matrices.len() - 1);
            }
        }
    }
    assert_eq!(matrices.len(), 24, "single-qubit Clifford group has 24 elements mod phase");
    let compose = (0..24)
        .map(|a| {
            (0..24)
                .map(|b| {
                    let (m, p) = canonical(&(&matrices[a] * &matrices[b]));
                    (find(&matrices, &m).expect("closed under products") as u8, p)
                })
                .collect()
        })
        .collect();
    let bra = PauliBra::ALL
        .iter()
        .map(|b| {
            let row = linalg::CMat::from_row_slice(1, 2, &b.row());
            (0..24)
                .map(|k| {
                    let out = &row * &matrices[k];
                    PauliBra::ALL
                        .iter()
                        .find_map(|&cand| {
                            let r = cand.row();
                            let overlap = out[(0, 0)] * r[0].conj() + out[(0, 1)] * r[1].conj();
                            (overlap.norm() > 1.0 - 1e-9).then(|| (cand, phase_index(overlap)))
                        })
                        .expect("Clifford maps Pauli eigenbras to Pauli eigenbras")
                })
                .collect()
        })
        .collect();
    Tables { matrices, compose, bra }
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(build)
}

impl Clifford {
    pub const IDENTITY: Clifford = Clifford(0);

    /// Canonical representative matrix (first non-zero entry real positive).
    pub fn matrix(self) -> CMat {
        tables().matrices[self.0 as usize].clone()
    }

    /// `(self·other, p)` with `M_self·M_other = ω^p·M_result`.
    pub fn compose(self, other: Clifford) -> (Clifford, u8) {
        let (k, p) = tables().compose[self.0 as usize][other.0 as usize];
        (Clifford(k), p)
    }

    /// `(label, p)` with `m = ω^p·M_label`; `None` if `m` is not Clifford up to an ω-phase.
    pub fn from_matrix(m: &CMat) -> Option<(Clifford, u8)> {
        let first = first_entry(m)?;
        let unit = first / first.norm();
        let k = (unit.arg() / std::f64::consts::FRAC_PI_4).round().rem_euclid(8.0) as u8;
        if (omega_pow(k) - unit).norm() > 1e-9 {
            return None;
        }
        let (canon, p) = canonical(m);
        find(&tables().matrices, &canon).map(|i| (Clifford(i as u8), p))
    }

    /// `(b', p)` with `⟨b|·M_self = ω^p·⟨b'|`.
    pub fn absorb_bra(self, b: PauliBra) -> (PauliBra, u8) {
        tables().bra[b.index()][self.0 as usize]
    }

    pub fn all() -> impl Iterator<Item = Clifford> {
        (0u8..24).map(Clifford)
    }

    pub fn named(name: Named) -> (Clifford, u8) {
        let m = match name {
            Named::H => linalg::hadamard(),
            Named::S => linalg::s_gate(),
            Named::SDag => linalg::s_gate().adjoint(),
            Named::X => linalg::pauli_x(),
            Named::Z => linalg::pauli_z(),
            Named::SqrtXDag => linalg::xrot(-std::f64::consts::FRAC_PI_2),
            Named::SqrtZ => linalg::zrot(std::f64::consts::FRAC_PI_2),
        };
        Clifford::from_matrix(&m).expect("named gates are Clifford")
    }
}

/// Frequently used generators, by their exact matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Named {
    H,
    S,
    SDag,
    X,
    Z,
    /// `e^{iπ/4 X}`
    SqrtXDag,
    /// `e^{−iπ/4 Z}`
    SqrtZ,
}

/// An exact scalar `ω^phase · (√2)^sqrt2_exp`, or zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactScalar {
    pub zero: bool,
    pub phase: u8,
    pub sqrt2_exp: i32,
}

impl Default for ExactScalar {
    fn default() -> Self {
        Self::ONE
    }
}

impl ExactScalar {
    pub const ONE: ExactScalar = ExactScalar { zero: false, phase: 0, sqrt2_exp: 0 };
    pub const ZERO: ExactScalar = ExactScalar { zero: true, phase: 0, sqrt2_exp: 0 };

    pub fn mul_phase(&mut self, p: u8) {
        self.phase = (self.phase + p) % 8;
    }

    pub fn mul_sqrt2_pow(&mut self, e: i32) {
        self.sqrt2_exp += e;
    }

    pub fn value(&self) -> Complex64 {
        if self.zero {
            return c(0.0, 0.0);
        }
        omega_pow(self.phase) * 2f64.powf(self.sqrt2_exp as f64 / 2.0)
    }
}
