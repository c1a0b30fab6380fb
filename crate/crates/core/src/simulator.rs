//! Dense state-vector simulation and the Hadamard-test sampler.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Gate, GateKind};

/// Largest register simulated by [`run_circuit`].
pub const MAX_QUBITS: usize = 26;
/// States at least this long are updated in parallel.
const PAR_THRESHOLD: usize = 1 << 14;
const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("{got} qubits exceeds the simulator limit of {limit}")]
    TooManyQubits { got: usize, limit: usize },
    #[error("the Hadamard test needs a unitary circuit; gate {index} ({kind}) is not unitary")]
    NonUnitary { index: usize, kind: &'static str },
    #[error("sample count must be positive")]
    NoSamples,
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Amplitudes over `k` qubits (qubit 0 is the least significant bit) together
/// with the scaling removed by renormalization after non-unitary steps.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
    norm_factor: f64,
}

impl StateVector {
    pub fn zero(num_qubits: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { num_qubits, amps, norm_factor: 1.0 }
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Self {
        assert!(amps.len().is_power_of_two(), "amplitude count must be a power of two");
        let num_qubits = amps.len().trailing_zeros() as usize;
        Self { num_qubits, amps, norm_factor: 1.0 }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_factor(&self) -> f64 {
        self.norm_factor
    }

    /// `⟨index|ψ⟩` including the tracked norm factor.
    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index] * self.norm_factor
    }

    /// Both vectors scaled by their norm factors.
    pub fn distance(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a * self.norm_factor - b * other.norm_factor).norm())
            .fold(0.0, f64::max)
    }

    pub fn norm_sqr(&self) -> f64 {
        let partial: Vec<f64> = self.amps.par_chunks(PAR_THRESHOLD).map(|ch| ch.iter().map(|a| a.norm_sqr()).sum()).collect();
        partial.iter().sum()
    }

    /// Moves the vector norm into `norm_factor`; a zero vector zeroes the factor.
    pub fn renormalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 {
            self.norm_factor = 0.0;
            return;
        }
        let inv = 1.0 / norm;
        self.amps.par_iter_mut().with_min_len(PAR_THRESHOLD).for_each(|a| *a *= inv);
        self.norm_factor *= norm;
    }

    /// Probability mass on basis states where qubit `q` is 0.
    pub fn prob_zero(&self, q: usize) -> f64 {
        let bit = 1usize << q;
        self.amps.iter().enumerate().filter(|(i, _)| i & bit == 0).map(|(_, a)| a.norm_sqr()).sum::<f64>()
            / self.norm_sqr()
    }

    fn apply_1q(&mut self, q: usize, m: [Complex64; 4], cmask: usize) {
        let half = 1usize << q;
        let update = |base: usize, lo: &mut [Complex64], hi: &mut [Complex64]| {
            for (j, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                if (base + j) & cmask == cmask {
                    let (x, y) = (*a, *b);
                    *a = m[0] * x + m[1] * y;
                    *b = m[2] * x + m[3] * y;
                }
            }
        };
        let chunk = half << 1;
        if self.amps.len() >= PAR_THRESHOLD {
            let block = chunk.max(PAR_THRESHOLD);
            self.amps.par_chunks_mut(block).enumerate().for_each(|(bi, big)| {
                for (k, ch) in big.chunks_mut(chunk).enumerate() {
                    let (lo, hi) = ch.split_at_mut(half);
                    update(bi * block + k * chunk, lo, hi);
                }
            });
        } else {
            for (k, ch) in self.amps.chunks_mut(chunk).enumerate() {
                let (lo, hi) = ch.split_at_mut(half);
                update(k * chunk, lo, hi);
            }
        }
    }

    fn apply_diag(&mut self, cmask: usize, f: impl Fn(usize) -> Complex64 + Sync) {
        self.amps.par_iter_mut().with_min_len(PAR_THRESHOLD).enumerate().for_each(|(i, a)| {
            if i & cmask == cmask {
                *a *= f(i);
            }
        });
    }

    fn apply_2q(&mut self, q0: usize, q1: usize, m: &[Complex64; 16], cmask: usize) {
        let (b0, b1) = (1usize << q0, 1usize << q1);
        for base in 0..self.amps.len() {
            if base & (b0 | b1) != 0 || base & cmask != cmask {
                continue;
            }
            let idx = [base, base | b1, base | b0, base | b0 | b1];
            let v = idx.map(|i| self.amps[i]);
            for (r, &i) in idx.iter().enumerate() {
                self.amps[i] = (0..4).map(|k| m[4 * r + k] * v[k]).sum();
            }
        }
    }

    /// Applies `g`, acting only where every qubit in `cmask` is 1.
    fn apply_masked(&mut self, g: &Gate, cmask: usize) {
        let q = &g.qubits;
        let bit = |i: usize, k: usize| i >> q[k] & 1;
        match &g.kind {
            GateKind::GlobalPhase(p) => {
                let ph = Complex64::cis(*p);
                self.apply_diag(cmask, |_| ph);
            }
            GateKind::PhaseDiag(a, b) => {
                let d = [Complex64::cis(*a), Complex64::cis(*b)];
                self.apply_diag(cmask, |i| d[bit(i, 0)]);
            }
            GateKind::ZRot(t) => {
                let d = [Complex64::cis(-t / 2.0), Complex64::cis(t / 2.0)];
                self.apply_diag(cmask, |i| d[bit(i, 0)]);
            }
            GateKind::ZZRot(z) => {
                let d = [z.exp(), (-z).exp()];
                self.apply_diag(cmask, |i| d[bit(i, 0) ^ bit(i, 1)]);
            }
            GateKind::CZ => {
                let m1 = Complex64::new(-1.0, 0.0);
                let one = Complex64::new(1.0, 0.0);
                self.apply_diag(cmask, |i| if bit(i, 0) & bit(i, 1) == 1 { m1 } else { one });
            }
            GateKind::ProjectZero => {
                let (z, o) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
                self.apply_diag(cmask, |i| if bit(i, 0) == 1 { z } else { o });
            }
            GateKind::CYRot(t) => {
                let (co, si) = ((t / 2.0).cos(), (t / 2.0).sin());
                let m = [co, -si, si, co].map(|x| Complex64::new(x, 0.0));
                self.apply_1q(q[1], m, cmask | 1 << q[0]);
            }
            GateKind::H | GateKind::X | GateKind::XRot(_) | GateKind::Generic1Q(_) => {
                let mat = g.kind.matrix();
                let m = [mat[(0, 0)], mat[(0, 1)], mat[(1, 0)], mat[(1, 1)]];
                self.apply_1q(q[0], m, cmask);
            }
            GateKind::Generic2Q(m) => self.apply_2q(q[0], q[1], m, cmask),
        }
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<(), SimError> {
        g.validate()?;
        if let Some(&qubit) = g.qubits.iter().find(|&&q| q >= self.num_qubits) {
            return Err(CircuitError::QubitRange { index: 0, qubit, num_qubits: self.num_qubits }.into());
        }
        self.apply_masked(g, 0);
        if matches!(g.kind, GateKind::ProjectZero | GateKind::Generic1Q(_) | GateKind::Generic2Q(_))
            || matches!(g.kind, GateKind::ZZRot(z) if z.re != 0.0)
        {
            self.renormalize();
        }
        Ok(())
    }

    /// Applies `g` controlled on qubit `control`.
    pub fn apply_controlled(&mut self, g: &Gate, control: usize) -> Result<(), SimError> {
        g.validate()?;
        assert!(!g.qubits.contains(&control), "control overlaps a target");
        self.apply_masked(g, 1 << control);
        Ok(())
    }
}

fn check_size(c: &Circuit, extra: usize) -> Result<(), SimError> {
    c.validate()?;
    let got = c.num_qubits + extra;
    if got > MAX_QUBITS {
        return Err(SimError::TooManyQubits { got, limit: MAX_QUBITS });
    }
    Ok(())
}

/// Final state of `c` applied to `|0…0⟩`.
pub fn run_state(c: &Circuit) -> Result<StateVector, SimError> {
    check_size(c, 0)?;
    let mut psi = StateVector::zero(c.num_qubits);
    for g in &c.gates {
        psi.apply_gate(g)?;
    }
    Ok(psi)
}

/// `⟨0…0|C|0…0⟩`, including any scaling from non-unitary gates.
pub fn run_circuit(c: &Circuit) -> Result<Complex64, SimError> {
    Ok(run_state(c)?.amplitude(0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HadamardEstimate {
    pub re: f64,
    pub im: f64,
    pub samples: u64,
    pub seed: u64,
    pub stderr_bound: f64,
}

/// Exact probabilities of reading 0 on the Hadamard-test ancilla for the real
/// and imaginary variants.
pub fn hadamard_probabilities(c: &Circuit) -> Result<(f64, f64), SimError> {
    check_size(c, 1)?;
    if let Some((index, g)) = c.gates.iter().enumerate().find(|(_, g)| !g.kind.is_unitary(UNITARY_TOL)) {
        return Err(SimError::NonUnitary { index, kind: g.kind.name() });
    }
    let anc = c.num_qubits;
    let mut psi = StateVector::zero(anc + 1);
    psi.apply_gate(&Gate::one(GateKind::H, anc))?;
    for g in &c.gates {
        psi.apply_controlled(g, anc)?;
    }
    let mut re = psi.clone();
    re.apply_gate(&Gate::one(GateKind::H, anc))?;
    let mut im = psi;
    im.apply_gate(&Gate::one(GateKind::PhaseDiag(0.0, -std::f64::consts::FRAC_PI_2), anc))?;
    im.apply_gate(&Gate::one(GateKind::H, anc))?;
    Ok((re.prob_zero(anc), im.prob_zero(anc)))
}

/// Draws `samples` ancilla outcomes for each variant from ChaCha8 seeded with `seed`.
pub fn sample_estimate(p0_re: f64, p0_im: f64, samples: u64, seed: u64) -> Result<HadamardEstimate, SimError> {
    if samples == 0 {
        return Err(SimError::NoSamples);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |p0: f64| {
        let zeros = (0..samples).filter(|_| rng.gen::<f64>() < p0).count() as f64;
        2.0 * zeros / samples as f64 - 1.0
    };
    let re = draw(p0_re);
    let im = draw(p0_im);
    Ok(HadamardEstimate { re, im, samples, seed, stderr_bound: 1.0 / (samples as f64).sqrt() })
}

/// Estimates `⟨0|C|0⟩` with the controlled-circuit Hadamard test.
pub fn hadamard_test(c: &Circuit, samples: u64, seed: u64) -> Result<HadamardEstimate, SimError> {
    let (p_re, p_im) = hadamard_probabilities(c)?;
    sample_estimate(p_re, p_im, samples, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::embed;
    use crate::linalg::{self, c, CMat};
    use rand::Rng;

    fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> CMat {
        let m = CMat::from_fn(dim, dim, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        m.qr().q()
    }

    fn random_state(rng: &mut ChaCha8Rng, k: usize) -> StateVector {
        let mut s = StateVector::from_amplitudes(
            (0..1 << k).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
        );
        s.renormalize();
        s.norm_factor = 1.0;
        s
    }

    fn random_gate(rng: &mut ChaCha8Rng, k: usize) -> Gate {
        let q0 = rng.gen_range(0..k);
        let mut q1 = rng.gen_range(0..k - 1);
        if q1 >= q0 {
            q1 += 1;
        }
        let t = rng.gen_range(-3.0..3.0);
        match rng.gen_range(0..11) {
            0 => Gate::one(GateKind::H, q0),
            1 => Gate::one(GateKind::X, q0),
            2 => Gate::one(GateKind::PhaseDiag(t, -t / 3.0), q0),
            3 => Gate::one(GateKind::ZRot(t), q0),
            4 => Gate::one(GateKind::XRot(t), q0),
            5 => Gate::two(GateKind::ZZRot(c(0.0, t)), q0, q1),
            6 => Gate::two(GateKind::CZ, q0, q1),
            7 => Gate::two(GateKind::CYRot(t), q0, q1),
            8 => Gate::phase(t),
            9 => Gate::generic1(&random_unitary(rng, 2), q0),
            _ => Gate::generic2(&random_unitary(rng, 4), q0, q1),
        }
    }

    #[test]
    fn simple_amplitudes() {
        let mut circ = Circuit::new(1, 0);
        circ.push(Gate::one(GateKind::H, 0));
        assert!((run_circuit(&circ).unwrap() - c(std::f64::consts::FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        let mut circ = Circuit::new(1, 0);
        circ.push(Gate::one(GateKind::X, 0));
        assert_eq!(run_circuit(&circ).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn matches_full_matrix_on_random_circuits() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for trial in 0..40 {
            let k = 2 + trial % 5;
            let mut circ = Circuit::new(k, 0);
            for _ in 0..25 {
                circ.push(random_gate(&mut rng, k));
            }
            let psi0 = random_state(&mut rng, k);
            let mut psi = psi0.clone();
            for g in &circ.gates {
                psi.apply_gate(g).unwrap();
            }
            let u = circ.full_matrix();
            let v = &u * nalgebra::DVector::from_column_slice(psi0.amplitudes());
            for i in 0..1 << k {
                assert!((psi.amplitude(i) - v[i]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn parallel_kernels_match_serial_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let k = 15;
        let psi0 = random_state(&mut rng, k);
        for q in [0, 7, 13, 14] {
            let g = Gate::generic1(&random_unitary(&mut rng, 2), q);
            let mut psi = psi0.clone();
            psi.apply_gate(&g).unwrap();
            let m = g.kind.matrix();
            let bit = 1 << q;
            for i in 0..1 << k {
                let (i0, i1) = (i & !bit, i | bit);
                let row = (i >> q) & 1;
                let want = m[(row, 0)] * psi0.amplitudes()[i0] + m[(row, 1)] * psi0.amplitudes()[i1];
                assert!((psi.amplitude(i) - want).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn hadamard_twice_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi0 = random_state(&mut rng, 4);
        let mut psi = psi0.clone();
        psi.apply_gate(&Gate::one(GateKind::H, 2)).unwrap();
        psi.apply_gate(&Gate::one(GateKind::H, 2)).unwrap();
        assert!(psi.distance(&psi0) < 1e-14);
    }

    #[test]
    fn cz_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let psi0 = random_state(&mut rng, 3);
        let mut a = psi0.clone();
        a.apply_gate(&Gate::two(GateKind::CZ, 0, 2)).unwrap();
        let mut b = psi0;
        b.apply_gate(&Gate::two(GateKind::CZ, 2, 0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn generic2q_matches_basis_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random_unitary(&mut rng, 4);
        let psi0 = random_state(&mut rng, 3);
        let mut psi = psi0.clone();
        psi.apply_gate(&Gate::generic2(&u, 2, 0)).unwrap();
        let full = embed(&u, &[2, 0], 3);
        let v = full * nalgebra::DVector::from_column_slice(psi0.amplitudes());
        for i in 0..8 {
            assert!((psi.amplitude(i) - v[i]).norm() < 1e-13);
        }
    }

    #[test]
    fn reversed_conjugated_circuit_gives_conjugate_amplitude() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut circ = Circuit::new(4, 0);
        for _ in 0..30 {
            circ.push(random_gate(&mut rng, 4));
        }
        let mut inv = Circuit::new(4, 0);
        inv.gates = circ.gates.iter().rev().map(Gate::dagger).collect();
        let a = run_circuit(&circ).unwrap();
        let b = run_circuit(&inv).unwrap();
        assert!((a.conj() - b).norm() < 1e-13);
    }

    #[test]
    fn projection_tracks_norm_factor() {
        let mut circ = Circuit::new(2, 0);
        circ.push(Gate::one(GateKind::H, 1));
        circ.push(Gate::one(GateKind::ProjectZero, 1));
        circ.push(Gate::one(GateKind::H, 0));
        circ.push(Gate::one(GateKind::H, 0));
        let psi = run_state(&circ).unwrap();
        assert!((psi.norm_factor() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((psi.amplitude(0) - c(std::f64::consts::FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn controlled_gates_match_block_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let g = random_gate(&mut rng, 3);
            let psi0 = random_state(&mut rng, 4);
            let mut psi = psi0.clone();
            psi.apply_controlled(&g, 3).unwrap();
            let u = embed(&g.kind.matrix(), &g.qubits, 3);
            let mut cu = linalg::identity(16);
            cu.view_mut((8, 8), (8, 8)).copy_from(&u);
            let v = cu * nalgebra::DVector::from_column_slice(psi0.amplitudes());
            for i in 0..16 {
                assert!((psi.amplitude(i) - v[i]).norm() < 1e-13, "{:?}", g.kind.name());
            }
        }
    }

    #[test]
    fn hadamard_test_identity_and_x() {
        let ident = Circuit::new(1, 0);
        let est = hadamard_test(&ident, 1000, 9).unwrap();
        assert_eq!(est.re, 1.0);
        assert!(est.im.abs() < 0.2);

        let mut x = Circuit::new(1, 0);
        x.push(Gate::one(GateKind::X, 0));
        let (p, _) = hadamard_probabilities(&x).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        let n = 1_000_000;
        let est = hadamard_test(&x, n, 42).unwrap();
        assert!(est.re.abs() <= 5.0 / (n as f64).sqrt());
    }

    #[test]
    fn hadamard_probabilities_encode_amplitude() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut circ = Circuit::new(3, 0);
        for _ in 0..20 {
            circ.push(random_gate(&mut rng, 3));
        }
        let amp = run_circuit(&circ).unwrap();
        let (pr, pi) = hadamard_probabilities(&circ).unwrap();
        assert!((2.0 * pr - 1.0 - amp.re).abs() < 1e-13);
        assert!((2.0 * pi - 1.0 - amp.im).abs() < 1e-13);
    }

    #[test]
    fn hadamard_test_rejects_nonunitary_and_is_reproducible() {
        let mut circ = Circuit::new(1, 0);
        circ.push(Gate::one(GateKind::ProjectZero, 0));
        assert!(matches!(hadamard_test(&circ, 10, 1), Err(SimError::NonUnitary { .. })));
        let mut h = Circuit::new(1, 0);
        h.push(Gate::one(GateKind::H, 0));
        assert_eq!(hadamard_test(&h, 5000, 3).unwrap(), hadamard_test(&h, 5000, 3).unwrap());
        assert!(matches!(hadamard_test(&h, 0, 3), Err(SimError::NoSamples)));
    }

    #[test]
    fn estimator_is_unbiased() {
        let mut circ = Circuit::new(1, 0);
        circ.push(Gate::one(GateKind::XRot(1.1), 0));
        let amp = run_circuit(&circ).unwrap();
        let (pr, pi) = hadamard_probabilities(&circ).unwrap();
        let n = 1000u64;
        let seeds = 1000u64;
        let (mut sr, mut si) = (0.0, 0.0);
        for seed in 0..seeds {
            let e = sample_estimate(pr, pi, n, seed).unwrap();
            sr += e.re;
            si += e.im;
        }
        let bound = 4.0 / ((seeds * n) as f64).sqrt();
        assert!((sr / seeds as f64 - amp.re).abs() < bound);
        assert!((si / seeds as f64 - amp.im).abs() < bound);
    }

    #[test]
    fn size_guard() {
        let circ = Circuit::new(27, 0);
        assert!(matches!(run_circuit(&circ), Err(SimError::TooManyQubits { .. })));
    }

    proptest::proptest! {
        #[test]
        fn unitary_gates_preserve_norm(seed in 0u64..10_000, qubits in 1usize..=5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut circ = Circuit::new(qubits, 0);
            for _ in 0..12 {
                let q = rng.gen_range(0..qubits);
                circ.push(Gate::generic1(&random_unitary(&mut rng, 2), q));
                if qubits > 1 {
                    let r = (q + 1 + rng.gen_range(0..qubits - 1)) % qubits;
                    circ.push(Gate::generic2(&random_unitary(&mut rng, 4), q, r));
                }
            }
            let psi = run_state(&circ).unwrap();
            proptest::prop_assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
            let direct = circ.full_matrix()[(0, 0)];
            proptest::prop_assert!((psi.amplitude(0) - direct).norm() < 1e-12);
        }
    }
}
