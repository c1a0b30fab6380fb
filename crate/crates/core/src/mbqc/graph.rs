//! Graph states with local Clifford frames, and Pauli projections performed by
//! graph rewriting. The represented vector is `scalar · (⊗_v C_v)|G⟩` over the
//! live vertices.

use std::collections::BTreeSet;

use num_complex::Complex64;
use thiserror::Error;

use super::clifford::{Clifford, ExactScalar, Named, PauliBra};
use crate::linalg::c;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Largest live-vertex count for which [`GraphState::to_state_vector`] runs.
pub const MAX_EXPLICIT_VERTICES: usize = 22;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("vertex {0} does not exist or was already projected")]
    NoSuchVertex(usize),
    #[error("edge ({0}, {1}) is a self loop")]
    SelfLoop(usize, usize),
    #[error("{got} live vertices exceed the explicit limit {limit}")]
    TooLarge { got: usize, limit: usize },
    #[error("bra on vertex {0} is not a Pauli eigenbra")]
    NotPauli(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphState {
    adj: Vec<BTreeSet<usize>>,
    alive: Vec<bool>,
    frames: Vec<Clifford>,
    scalar: ExactScalar,
}

impl GraphState {
    pub fn new(num_vertices: usize) -> Self {
        Self {
            adj: vec![BTreeSet::new(); num_vertices],
            alive: vec![true; num_vertices],
            frames: vec![Clifford::IDENTITY; num_vertices],
            scalar: ExactScalar::ONE,
        }
    }

    pub fn from_edges(num_vertices: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Self::new(num_vertices);
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    fn check(&self, v: usize) -> Result<(), GraphError> {
        if v < self.alive.len() && self.alive[v] {
            Ok(())
        } else {
            Err(GraphError::NoSuchVertex(v))
        }
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<(), GraphError> {
        self.check(a)?;
        self.check(b)?;
        if a == b {
            return Err(GraphError::SelfLoop(a, b));
        }
        self.adj[a].insert(b);
        self.adj[b].insert(a);
        Ok(())
    }

    fn toggle_edge(&mut self, a: usize, b: usize) {
        if !self.adj[a].remove(&b) {
            self.adj[a].insert(b);
            self.adj[b].insert(a);
        } else {
            self.adj[b].remove(&a);
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.alive.len()
    }

    pub fn is_alive(&self, v: usize) -> bool {
        v < self.alive.len() && self.alive[v]
    }

    pub fn live_vertices(&self) -> Vec<usize> {
        (0..self.alive.len()).filter(|&v| self.alive[v]).collect()
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    /// Live edges `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, nbrs) in self.adj.iter().enumerate() {
            out.extend(nbrs.iter().filter(|&&b| a < b).map(|&b| (a, b)));
        }
        out
    }

    pub fn frame(&self, v: usize) -> Clifford {
        self.frames[v]
    }

    pub fn scalar(&self) -> ExactScalar {
        self.scalar
    }

    /// Toggles every edge inside the neighbourhood of `v` (graph operation only).
    pub fn local_complement(&mut self, v: usize) -> Result<(), GraphError> {
        self.check(v)?;
        let nbrs: Vec<usize> = self.adj[v].iter().copied().collect();
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                self.toggle_edge(a, b);
            }
        }
        Ok(())
    }

    /// Right-multiplies the frame of `v` by `g`, absorbing the phase.
    fn push_frame(&mut self, v: usize, g: Named) {
        let (label, p0) = Clifford::named(g);
        let (next, p1) = self.frames[v].compose(label);
        self.frames[v] = next;
        self.scalar.mul_phase(p0 + p1);
    }

    fn remove(&mut self, v: usize) {
        for u in std::mem::take(&mut self.adj[v]) {
            self.adj[u].remove(&v);
        }
        self.alive[v] = false;
        self.frames[v] = Clifford::IDENTITY;
    }

    /// Contracts vertex `v` with the bra `⟨b|`, rewriting the graph exactly.
    pub fn project(&mut self, v: usize, bra: PauliBra) -> Result<(), GraphError> {
        self.check(v)?;
        if self.scalar.zero {
            self.remove(v);
            return Ok(());
        }
        let (b, p) = self.frames[v].absorb_bra(bra);
        self.scalar.mul_phase(p);
        self.frames[v] = Clifford::IDENTITY;
        let nbrs: Vec<usize> = self.adj[v].iter().copied().collect();
        match b {
            PauliBra::Zero => {
                self.remove(v);
                self.scalar.mul_sqrt2_pow(-1);
            }
            PauliBra::One => {
                for &u in &nbrs {
                    self.push_frame(u, Named::Z);
                }
                self.remove(v);
                self.scalar.mul_sqrt2_pow(-1);
            }
            PauliBra::YPlus | PauliBra::YMinus => {
                self.local_complement(v)?;
                let (gate, phase) = if b == PauliBra::YPlus { (Named::S, 7) } else { (Named::SDag, 1) };
                for &u in &nbrs {
                    self.push_frame(u, gate);
                }
                self.scalar.mul_phase(phase);
                self.remove(v);
                self.scalar.mul_sqrt2_pow(-1);
            }
            PauliBra::Plus | PauliBra::Minus => {
                let Some(&a) = nbrs.first() else {
                    // |+⟩ on an isolated vertex
                    if b == PauliBra::Minus {
                        self.scalar = ExactScalar::ZERO;
                    }
                    self.remove(v);
                    return Ok(());
                };
                // e^{−iπ/4 X_a} Π_{u∈N(a)} e^{iπ/4 Z_u} |G⟩ = ω^{d−1} |τ_a G⟩, d = |N(a)|
                let around: Vec<usize> = self.adj[a].iter().copied().collect();
                let d = around.len() as u8;
                self.scalar.mul_phase((d + 7) % 8);
                self.push_frame(a, Named::SqrtXDag);
                for u in around {
                    self.push_frame(u, Named::SqrtZ);
                }
                self.local_complement(a)?;
                return self.project(v, b);
            }
        }
        Ok(())
    }

    /// Contracts with an arbitrary single-qubit bra `(x0, x1)` when it is
    /// proportional to a Pauli eigenbra; the proportionality constant must be
    /// an eighth root of unity times a power of √2.
    pub fn project_bra(&mut self, v: usize, x0: Complex64, x1: Complex64) -> Result<(), GraphError> {
        let norm = (x0.norm_sqr() + x1.norm_sqr()).sqrt();
        let sqrt2_exp = (2.0 * norm.log2()).round();
        if norm == 0.0 || (2f64.powf(sqrt2_exp / 2.0) - norm).abs() > 1e-12 * norm {
            return Err(GraphError::NotPauli(v));
        }
        for b in PauliBra::ALL {
            let r = b.row();
            let overlap = (r[0].conj() * x0 + r[1].conj() * x1) / norm;
            if overlap.norm() > 1.0 - 1e-12 {
                let k = (overlap.arg() / std::f64::consts::FRAC_PI_4).round();
                if (Complex64::cis(k * std::f64::consts::FRAC_PI_4) - overlap).norm() > 1e-12 {
                    return Err(GraphError::NotPauli(v));
                }
                self.project(v, b)?;
                self.scalar.mul_phase(k.rem_euclid(8.0) as u8);
                self.scalar.mul_sqrt2_pow(sqrt2_exp as i32);
                return Ok(());
            }
        }
        Err(GraphError::NotPauli(v))
    }

    /// Dense amplitudes over the live vertices in increasing id order; the
    /// first live vertex is the least significant bit.
    pub fn to_state_vector(&self) -> Result<Vec<Complex64>, GraphError> {
        let live = self.live_vertices();
        let k = live.len();
        if k > MAX_EXPLICIT_VERTICES {
            return Err(GraphError::TooLarge { got: k, limit: MAX_EXPLICIT_VERTICES });
        }
        let pos = |v: usize| live.binary_search(&v).expect("live");
        let edges: Vec<(usize, usize)> = self.edges().into_iter().map(|(a, b)| (pos(a), pos(b))).collect();
        let amp = 2f64.powf(-(k as f64) / 2.0);
        let mut psi: Vec<Complex64> = (0..1usize << k)
            .map(|x| {
                let parity = edges.iter().filter(|&&(a, b)| x >> a & 1 == 1 && x >> b & 1 == 1).count();
                c(if parity % 2 == 0 { amp } else { -amp }, 0.0)
            })
            .collect();
        for (q, &v) in live.iter().enumerate() {
            let m = self.frames[v].matrix();
            apply_local(&mut psi, q, [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]);
        }
        let s = self.scalar.value();
        psi.iter_mut().for_each(|z| *z *= s);
        Ok(psi)
    }
}

/// Applies a row-major 2x2 matrix to qubit `q` of a dense vector.
pub fn apply_local(psi: &mut [Complex64], q: usize, m: [Complex64; 4]) {
    let bit = 1usize << q;
    for i in 0..psi.len() {
        if i & bit == 0 {
            let (a0, a1) = (psi[i], psi[i | bit]);
            psi[i] = m[0] * a0 + m[1] * a1;
            psi[i | bit] = m[2] * a0 + m[3] * a1;
        }
    }
}

/// `Σ_b x_b ψ[.. b at q ..]`: contracts qubit `q` with the bra `(x0, x1)`.
pub fn contract_qubit(psi: &[Complex64], q: usize, x0: Complex64, x1: Complex64) -> Vec<Complex64> {
    let low = (1usize << q) - 1;
    (0..psi.len() / 2)
        .map(|y| {
            let base = (y & low) | ((y & !low) << 1);
            x0 * psi[base] + x1 * psi[base | 1 << q]
        })
        .collect()
}

/// Outcome of checking the rewrite rules against dense projections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionCertificate {
    pub graphs: usize,
    pub projections: usize,
    /// Largest entrywise deviation between rewritten and dense states.
    pub max_error: f64,
}

/// Random graph states on 2..=`max_vertices` vertices, each hit by a random
/// sequence of Pauli projections; after every projection the rewritten state is
/// compared with the dense contraction of the same bra.
pub fn certify_projections(graphs: usize, max_vertices: usize, seed: u64) -> Result<ProjectionCertificate, GraphError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cert = ProjectionCertificate { graphs, projections: 0, max_error: 0.0 };
    for _ in 0..graphs {
        let k = rng.gen_range(2..=max_vertices.max(2));
        let mut g = GraphState::new(k);
        for a in 0..k {
            for b in a + 1..k {
                if rng.gen_bool(0.5) {
                    g.add_edge(a, b)?;
                }
            }
        }
        let mut psi = g.to_state_vector()?;
        for _ in 0..rng.gen_range(1..k) {
            let live = g.live_vertices();
            let q = rng.gen_range(0..live.len());
            let bra = PauliBra::ALL[rng.gen_range(0..6)];
            let r = bra.row();
            psi = contract_qubit(&psi, q, r[0], r[1]);
            g.project(live[q], bra)?;
            let got = g.to_state_vector()?;
            let err = got.iter().zip(&psi).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            cert.max_error = cert.max_error.max(err);
            cert.projections += 1;
        }
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn rewriting_matches_state_vector_on_random_graphs() {
        let cert = certify_projections(200, 6, 2024).unwrap();
        assert!(cert.projections >= 200);
        assert!(cert.max_error < 1e-12, "{cert:?}");
    }

    #[test]
    fn basic_rules_have_expected_scalars() {
        // ⟨0| on a star centre deletes it with 1/√2
        let mut g = GraphState::from_edges(3, &[(0, 1), (0, 2)]).unwrap();
        g.project(0, PauliBra::Zero).unwrap();
        assert!(g.edges().is_empty());
        assert_eq!(g.scalar(), ExactScalar { zero: false, phase: 0, sqrt2_exp: -1 });
        // ⟨Y| on the middle of a path joins the ends
        let mut g = GraphState::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        g.project(1, PauliBra::YPlus).unwrap();
        assert_eq!(g.edges(), vec![(0, 2)]);
        assert_eq!(g.scalar().phase, 7);
        assert_eq!(g.frame(0), Clifford::named(Named::S).0);
    }

    #[test]
    fn path_middle_projections() {
        for (bra, edges) in [(PauliBra::Zero, vec![]), (PauliBra::YMinus, vec![(0, 2)])] {
            let mut g = GraphState::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
            let r = bra.row();
            let want = contract_qubit(&g.to_state_vector().unwrap(), 1, r[0], r[1]);
            g.project(1, bra).unwrap();
            assert_eq!(g.edges(), edges);
            assert!(max_diff(&g.to_state_vector().unwrap(), &want) < 1e-12);
        }
        // Y− leaves S·Z = S† on both ends
        let mut g = GraphState::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        g.project(1, PauliBra::YMinus).unwrap();
        let sdag = Clifford::named(Named::SDag).0;
        assert_eq!((g.frame(0), g.frame(2)), (sdag, sdag));
    }

    #[test]
    fn arbitrary_scaled_bras() {
        let mut g = GraphState::from_edges(2, &[(0, 1)]).unwrap();
        let mut psi = g.to_state_vector().unwrap();
        let (x0, x1) = (c(0.0, 1.0), c(1.0, 0.0));
        psi = contract_qubit(&psi, 1, x0, x1);
        g.project_bra(1, x0, x1).unwrap();
        assert!(max_diff(&g.to_state_vector().unwrap(), &psi) < 1e-14);
        assert_eq!(g.project_bra(0, c(1.0, 0.0), c(0.5, 0.0)), Err(GraphError::NotPauli(0)));
        assert_eq!(g.project(1, PauliBra::Zero), Err(GraphError::NoSuchVertex(1)));
    }

    #[test]
    fn isolated_minus_is_zero() {
        let mut g = GraphState::new(2);
        g.project(0, PauliBra::Minus).unwrap();
        assert!(g.scalar().zero);
        assert!(g.to_state_vector().unwrap().iter().all(|z| z.norm() == 0.0));
    }

    proptest::proptest! {
        #[test]
        fn rewriting_matches_dense_for_any_seed(seed in 0u64..1_000_000) {
            let cert = certify_projections(4, 6, seed).unwrap();
            proptest::prop_assert!(cert.max_error < 1e-12);
        }
    }
}
