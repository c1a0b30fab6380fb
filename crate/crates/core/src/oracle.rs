//! Exact partition functions: full enumeration and a column transfer matrix.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::model::{IsingInstance, DomainClass, classify_domain, DOMAIN_TOL};
use crate::numeric::{normalize_pow2, pow2, tree_sum};

/// Largest spin count enumerated without an explicit override.
pub const BRUTE_FORCE_LIMIT: usize = 26;
/// Largest row count accepted by the transfer matrix.
pub const TRANSFER_ROW_LIMIT: usize = 14;
/// Spins enumerated sequentially inside one work chunk.
const CHUNK_BITS: usize = 12;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("{spins} spins exceeds the enumeration limit of {limit}; pass force to override")]
    TooLarge { spins: usize, limit: usize },
    #[error("transfer matrix supports at most {limit} rows, got {n}")]
    TooManyRows { n: usize, limit: usize },
    #[error("free energy needs a physical instance, got {0:?}")]
    NotPhysical(DomainClass),
    #[error("free energy needs a positive real partition function, got {0}")]
    NonPositive(Complex64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExactMethod {
    Brute,
    Transfer,
}

/// An exact partition function, stored as `z · 2^log2_scale` so long lattices
/// do not overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactResult {
    pub z: Complex64,
    pub log2_scale: i64,
    pub method: ExactMethod,
    /// Configurations enumerated (brute) or states per column (transfer).
    pub count: u64,
}

impl ExactResult {
    /// The partition function as a plain complex number (may overflow).
    pub fn value(&self) -> Complex64 {
        self.z * pow2(self.log2_scale)
    }

    /// `Z / 2^log2_divisor`, computed without forming `Z` itself.
    pub fn scaled_by_pow2(&self, log2_divisor: f64) -> Complex64 {
        let e = self.log2_scale as f64 - log2_divisor;
        self.z * e.exp2()
    }
}

/// An Ising model on an arbitrary graph.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinGraph {
    pub fields: Vec<Complex64>,
    pub couplings: Vec<(usize, usize, Complex64)>,
}

impl From<&IsingInstance> for SpinGraph {
    fn from(inst: &IsingInstance) -> Self {
        Self {
            fields: inst.fields().to_vec(),
            couplings: inst.edges().iter().map(|e| (e.a, e.b, e.coupling)).collect(),
        }
    }
}

impl SpinGraph {
    /// Log-weight `Σ J σσ + Σ h σ` of a configuration given as bits (1 = σ −1).
    pub fn log_weight(&self, bits: u64) -> Complex64 {
        let sigma = |v: usize| if bits >> v & 1 == 1 { -1.0 } else { 1.0 };
        let mut e = Complex64::new(0.0, 0.0);
        for (v, &h) in self.fields.iter().enumerate() {
            e += h * sigma(v);
        }
        for &(a, b, j) in &self.couplings {
            e += j * (sigma(a) * sigma(b));
        }
        e
    }
}

/// Sums the Boltzmann weights of every configuration of a general graph.
pub fn brute_force_graph(g: &SpinGraph, force: bool) -> Result<Complex64, OracleError> {
    let nv = g.fields.len();
    if nv > BRUTE_FORCE_LIMIT && !force {
        return Err(OracleError::TooLarge { spins: nv, limit: BRUTE_FORCE_LIMIT });
    }
    assert!(nv < 64, "enumeration beyond 63 spins is not representable");
    let mut adj: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); nv];
    for &(a, b, j) in &g.couplings {
        adj[a].push((b, j));
        adj[b].push((a, j));
    }
    let low = nv.min(CHUNK_BITS);
    let chunks = 1u64 << (nv - low);
    let chunk_sum = |chunk: u64| -> Complex64 {
        let mut bits = chunk << low;
        let mut e = g.log_weight(bits);
        let mut acc = e.exp();
        for t in 1u64..(1u64 << low) {
            let v = t.trailing_zeros() as usize;
            let s = if bits >> v & 1 == 1 { -1.0 } else { 1.0 };
            let mut local = g.fields[v];
            for &(u, j) in &adj[v] {
                local += j * if bits >> u & 1 == 1 { -1.0 } else { 1.0 };
            }
            e -= local * (2.0 * s);
            bits ^= 1 << v;
            acc += e.exp();
        }
        acc
    };
    let partial: Vec<Complex64> = (0..chunks).into_par_iter().map(chunk_sum).collect();
    Ok(tree_sum(&partial))
}

/// Exact `Z` by enumerating all `2^{nm}` configurations.
pub fn brute_force_z(inst: &IsingInstance, force: bool) -> Result<ExactResult, OracleError> {
    let nm = inst.num_vertices();
    let z = brute_force_graph(&SpinGraph::from(inst), force)?;
    Ok(ExactResult { z, log2_scale: 0, method: ExactMethod::Brute, count: 1u64 << nm })
}

/// Exact `Z` by sweeping columns left to right over `2^n` row states.
pub fn transfer_matrix_z(inst: &IsingInstance) -> Result<ExactResult, OracleError> {
    let (n, m) = (inst.n(), inst.m());
    if n > TRANSFER_ROW_LIMIT {
        return Err(OracleError::TooManyRows { n, limit: TRANSFER_ROW_LIMIT });
    }
    let states = 1usize << n;
    let sigma = |s: usize, r: usize| if s >> r & 1 == 1 { -1.0 } else { 1.0 };
    let column_weights = |c: usize| -> Vec<Complex64> {
        (0..states)
            .map(|s| {
                let mut e = Complex64::new(0.0, 0.0);
                for r in 0..n {
                    e += inst.h(r, c) * sigma(s, r);
                    if r + 1 < n {
                        e += inst.jv(r, c) * (sigma(s, r) * sigma(s, r + 1));
                    }
                }
                e.exp()
            })
            .collect()
    };
    let mut v = column_weights(0);
    let mut log2_scale = normalize_pow2(&mut v);
    for c in 1..m {
        for r in 0..n {
            let j = inst.jh(r, c - 1);
            let (same, diff) = (j.exp(), (-j).exp());
            let bit = 1usize << r;
            for s in 0..states {
                if s & bit == 0 {
                    let (a, b) = (v[s], v[s | bit]);
                    v[s] = same * a + diff * b;
                    v[s | bit] = diff * a + same * b;
                }
            }
        }
        for (x, w) in v.iter_mut().zip(column_weights(c)) {
            *x *= w;
        }
        log2_scale += normalize_pow2(&mut v);
    }
    Ok(ExactResult {
        z: tree_sum(&v),
        log2_scale,
        method: ExactMethod::Transfer,
        count: states as u64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FreeEnergyReport {
    /// `ln Z / (nm)`, with β read as 1.
    pub free_energy: f64,
    /// `ln(1 + Δ / (poly · Z)) / (nm)`.
    pub epsilon: f64,
}

pub fn free_energy_report(
    inst: &IsingInstance,
    z_estimate: Complex64,
    delta: f64,
    poly: f64,
) -> Result<FreeEnergyReport, OracleError> {
    let class = classify_domain(inst, DOMAIN_TOL);
    if class != DomainClass::Physical {
        return Err(OracleError::NotPhysical(class));
    }
    if z_estimate.re <= 0.0 || z_estimate.im.abs() > 1e-12 * z_estimate.re.abs() {
        return Err(OracleError::NonPositive(z_estimate));
    }
    let nm = inst.num_vertices() as f64;
    let z = z_estimate.re;
    Ok(FreeEnergyReport {
        free_energy: z.ln() / nm,
        epsilon: (1.0 + delta / (poly * z)).ln() / nm,
    })
}
