//! Square-lattice Ising instances with complex, β-premultiplied parameters.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI, SQRT_2};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A dimensionless coupling or field, already multiplied by β.
pub type ComplexParam = Complex64;

/// Default absolute tolerance used by [`classify_domain`].
pub const DOMAIN_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("empty lattice: n and m must be positive (got n={n}, m={m})")]
    EmptyLattice { n: usize, m: usize },
    #[error("malformed instance document: {0}")]
    Malformed(String),
    #[error("{field} entry ({r}, {c}) is out of bounds for a {n}x{m} lattice")]
    OutOfBounds {
        field: &'static str,
        r: i64,
        c: i64,
        n: usize,
        m: usize,
    },
    #[error("{field} entry ({r}, {c}) appears more than once")]
    Duplicate { field: &'static str, r: usize, c: usize },
    #[error("non-finite value in {field} entry ({r}, {c})")]
    NonFinite { field: &'static str, r: usize, c: usize },
    #[error("spin vector has length {got}, expected {expected}")]
    SpinLength { got: usize, expected: usize },
    #[error("cannot generate random instances of domain {0:?}")]
    UnsupportedDomain(DomainClass),
}

/// The coupling value whose horizontal projection yields an `H·T` gate.
pub fn omega() -> Complex64 {
    Complex64::new((SQRT_2 + 1.0).ln() / 2.0, FRAC_PI_4)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DomainClass {
    Problem1,
    Problem2,
    Problem3,
    Physical,
    General,
}

impl DomainClass {
    /// True if every instance of `self` is also a valid instance of `other`.
    pub fn implies(self, other: DomainClass) -> bool {
        use DomainClass::*;
        self == other
            || other == General
            || (other == Problem1 && matches!(self, Problem2 | Problem3))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    Vertical,
    Horizontal,
}

/// One lattice bond, with endpoints given as vertex indices `r * m + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub kind: EdgeKind,
    pub r: usize,
    pub c: usize,
    pub a: usize,
    pub b: usize,
    pub coupling: Complex64,
}

/// An `n x m` lattice: rows are circuit wires, columns are time steps.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingInstance {
    n: usize,
    m: usize,
    h: Vec<Complex64>,
    jv: Vec<Complex64>,
    jh: Vec<Complex64>,
}

impl IsingInstance {
    /// All-zero instance.
    pub fn new(n: usize, m: usize) -> Result<Self, ModelError> {
        if n == 0 || m == 0 {
            return Err(ModelError::EmptyLattice { n, m });
        }
        let zero = Complex64::new(0.0, 0.0);
        Ok(Self {
            n,
            m,
            h: vec![zero; n * m],
            jv: vec![zero; (n - 1) * m],
            jh: vec![zero; n * (m - 1)],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn vertex(&self, r: usize, c: usize) -> usize {
        r * self.m + c
    }

    pub fn h(&self, r: usize, c: usize) -> Complex64 {
        self.h[r * self.m + c]
    }

    pub fn jv(&self, r: usize, c: usize) -> Complex64 {
        self.jv[r * self.m + c]
    }

    pub fn jh(&self, r: usize, c: usize) -> Complex64 {
        self.jh[r * (self.m - 1) + c]
    }

    pub fn set_h(&mut self, r: usize, c: usize, v: Complex64) {
        assert!(r < self.n && c < self.m, "h index out of bounds");
        self.h[r * self.m + c] = v;
    }

    pub fn set_jv(&mut self, r: usize, c: usize, v: Complex64) {
        assert!(r + 1 < self.n && c < self.m, "jv index out of bounds");
        self.jv[r * self.m + c] = v;
    }

    pub fn set_jh(&mut self, r: usize, c: usize, v: Complex64) {
        assert!(r < self.n && c + 1 < self.m, "jh index out of bounds");
        self.jh[r * (self.m - 1) + c] = v;
    }

    pub fn num_vertices(&self) -> usize {
        self.n * self.m
    }

    pub fn num_vertical_edges(&self) -> usize {
        (self.n - 1) * self.m
    }

    pub fn num_horizontal_edges(&self) -> usize {
        self.n * (self.m - 1)
    }

    /// Vertex count of the decorated lattice (one extra vertex per bond).
    pub fn num_decorated_vertices(&self) -> usize {
        self.num_vertices() + self.num_vertical_edges() + self.num_horizontal_edges()
    }

    pub fn fields(&self) -> &[Complex64] {
        &self.h
    }

    /// Every parameter (fields, vertical, horizontal couplings) in storage order.
    pub fn params(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.h.iter().chain(&self.jv).chain(&self.jh).copied()
    }

    /// Vertical edges first (row-major), then horizontal edges (row-major).
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.num_vertical_edges() + self.num_horizontal_edges());
        for r in 0..self.n.saturating_sub(1) {
            for c in 0..self.m {
                out.push(Edge {
                    kind: EdgeKind::Vertical,
                    r,
                    c,
                    a: self.vertex(r, c),
                    b: self.vertex(r + 1, c),
                    coupling: self.jv(r, c),
                });
            }
        }
        for r in 0..self.n {
            for c in 0..self.m.saturating_sub(1) {
                out.push(Edge {
                    kind: EdgeKind::Horizontal,
                    r,
                    c,
                    a: self.vertex(r, c),
                    b: self.vertex(r, c + 1),
                    coupling: self.jh(r, c),
                });
            }
        }
        out
    }

    /// Multiplies every coupling (not the fields) by `t`.
    pub fn scale_couplings(&self, t: f64) -> Self {
        let mut out = self.clone();
        out.jv.iter_mut().chain(out.jh.iter_mut()).for_each(|j| *j *= t);
        out
    }

    /// Negates every field.
    pub fn negate_fields(&self) -> Self {
        let mut out = self.clone();
        out.h.iter_mut().for_each(|h| *h = -*h);
        out
    }
}

fn is_pure_imag(z: Complex64, tol: f64) -> bool {
    z.re.abs() <= tol
}

fn is_real(z: Complex64, tol: f64) -> bool {
    z.im.abs() <= tol
}

fn near(z: Complex64, w: Complex64, tol: f64) -> bool {
    (z.re - w.re).abs() <= tol && (z.im - w.im).abs() <= tol
}

/// Splits a horizontal coupling `r + i(2k+1)π/4` into `(r, k)`, if it has that form.
pub fn horizontal_rk(j: Complex64, tol: f64) -> Option<(f64, i64)> {
    let t = (j.im / FRAC_PI_4 - 1.0) / 2.0;
    let k = t.round();
    let im = (2.0 * k + 1.0) * FRAC_PI_4;
    ((j.im - im).abs() <= tol).then_some((j.re, k as i64))
}

/// Most specific domain label that applies. Problem2 takes precedence over
/// Problem3 when an instance satisfies both.
pub fn classify_domain(inst: &IsingInstance, tol: f64) -> DomainClass {
    let i4 = Complex64::new(0.0, FRAC_PI_4);
    let i8 = Complex64::new(0.0, FRAC_PI_8);
    let zero = Complex64::new(0.0, 0.0);
    let om = omega();

    let jv_01 = inst.jv.iter().all(|&j| near(j, zero, tol) || near(j, i4, tol));
    let p2 = jv_01
        && inst.h.iter().all(|&h| near(h, i4, tol))
        && inst.jh.iter().all(|&j| near(j, i4, tol) || near(j, om, tol));
    if p2 {
        return DomainClass::Problem2;
    }
    let p3 = jv_01
        && inst.jh.iter().all(|&j| near(j, i4, tol))
        && inst
            .h
            .iter()
            .all(|&h| near(h, zero, tol) || near(h, i4, tol) || near(h, i8, tol));
    if p3 {
        return DomainClass::Problem3;
    }
    let p1 = inst.h.iter().chain(&inst.jv).all(|&z| is_pure_imag(z, tol))
        && inst.jh.iter().all(|&j| horizontal_rk(j, tol).is_some());
    if p1 {
        return DomainClass::Problem1;
    }
    if inst.params().all(|z| is_real(z, tol)) {
        return DomainClass::Physical;
    }
    DomainClass::General
}

/// β·H for a spin configuration; bit 0 is σ = +1 and bit 1 is σ = −1.
/// Spins are indexed by vertex `r * m + c`.
pub fn energy(inst: &IsingInstance, spins: &[bool]) -> Result<Complex64, ModelError> {
    let nm = inst.num_vertices();
    if spins.len() != nm {
        return Err(ModelError::SpinLength { got: spins.len(), expected: nm });
    }
    let sigma = |v: usize| if spins[v] { -1.0 } else { 1.0 };
    let mut e = Complex64::new(0.0, 0.0);
    for edge in inst.edges() {
        e -= edge.coupling * (sigma(edge.a) * sigma(edge.b));
    }
    for (v, &h) in inst.h.iter().enumerate() {
        e -= h * sigma(v);
    }
    Ok(e)
}

/// Deterministic random instance in the requested domain.
pub fn random_instance(
    n: usize,
    m: usize,
    domain: DomainClass,
    seed: u64,
) -> Result<IsingInstance, ModelError> {
    let mut inst = IsingInstance::new(n, m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let i4 = Complex64::new(0.0, FRAC_PI_4);
    let zero = Complex64::new(0.0, 0.0);
    match domain {
        DomainClass::Physical => {
            for z in inst.h.iter_mut().chain(&mut inst.jv).chain(&mut inst.jh) {
                *z = Complex64::new(rng.gen_range(-2.0..=2.0), 0.0);
            }
        }
        DomainClass::General => {
            for z in inst.h.iter_mut().chain(&mut inst.jv).chain(&mut inst.jh) {
                *z = Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-PI..=PI));
            }
            // guarantee at least one parameter with both parts non-zero
            inst.h[0] = Complex64::new(rng.gen_range(0.1..=1.0), rng.gen_range(0.1..=PI));
        }
        DomainClass::Problem1 => {
            for z in inst.h.iter_mut().chain(&mut inst.jv) {
                *z = Complex64::new(0.0, rng.gen_range(-PI..=PI));
            }
            for z in inst.jh.iter_mut() {
                let k: i64 = rng.gen_range(-2..=1);
                let r = rng.gen_range(-1.0..=1.0);
                *z = Complex64::new(r, (2 * k + 1) as f64 * FRAC_PI_4);
            }
            // keep clear of the Problem2/Problem3 value sets
            inst.h[0] = Complex64::new(0.0, rng.gen_range(0.3..=0.7));
        }
        DomainClass::Problem2 => {
            let om = omega();
            inst.h.iter_mut().for_each(|z| *z = i4);
            for z in inst.jv.iter_mut() {
                *z = if rng.gen_bool(0.5) { i4 } else { zero };
            }
            for z in inst.jh.iter_mut() {
                *z = if rng.gen_bool(0.5) { i4 } else { om };
            }
        }
        DomainClass::Problem3 => {
            let choices = [zero, i4, Complex64::new(0.0, FRAC_PI_8)];
            for z in inst.h.iter_mut() {
                *z = choices[rng.gen_range(0..3)];
            }
            for z in inst.jv.iter_mut() {
                *z = if rng.gen_bool(0.5) { i4 } else { zero };
            }
            inst.jh.iter_mut().for_each(|z| *z = i4);
            let v = rng.gen_range(0..inst.h.len());
            inst.h[v] = if rng.gen_bool(0.5) { zero } else { choices[2] };
        }
    }
    Ok(inst)
}

#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    n: usize,
    m: usize,
    #[serde(default)]
    h: Vec<(i64, i64, f64, f64)>,
    #[serde(default)]
    jv: Vec<(i64, i64, f64, f64)>,
    #[serde(default)]
    jh: Vec<(i64, i64, f64, f64)>,
}

fn fill(
    field: &'static str,
    entries: &[(i64, i64, f64, f64)],
    rows: usize,
    cols: usize,
    n: usize,
    m: usize,
    target: &mut [Complex64],
) -> Result<(), ModelError> {
    let mut seen = vec![false; target.len()];
    for &(r, c, re, im) in entries {
        if r < 0 || c < 0 || r as usize >= rows || c as usize >= cols {
            return Err(ModelError::OutOfBounds { field, r, c, n, m });
        }
        let (r, c) = (r as usize, c as usize);
        if !re.is_finite() || !im.is_finite() {
            return Err(ModelError::NonFinite { field, r, c });
        }
        let idx = r * cols + c;
        if seen[idx] {
            return Err(ModelError::Duplicate { field, r, c });
        }
        seen[idx] = true;
        target[idx] = Complex64::new(re, im);
    }
    Ok(())
}

/// Parses the JSON instance document. Omitted entries are zero.
pub fn parse_instance(text: &str) -> Result<IsingInstance, ModelError> {
    let doc: InstanceDoc =
        serde_json::from_str(text).map_err(|e| ModelError::Malformed(e.to_string()))?;
    let (n, m) = (doc.n, doc.m);
    let mut inst = IsingInstance::new(n, m)?;
    fill("h", &doc.h, n, m, n, m, &mut inst.h)?;
    fill("jv", &doc.jv, n - 1, m, n, m, &mut inst.jv)?;
    fill("jh", &doc.jh, n, m - 1, n, m, &mut inst.jh)?;
    Ok(inst)
}

fn entries(values: &[Complex64], cols: usize) -> Vec<(i64, i64, f64, f64)> {
    values
        .iter()
        .enumerate()
        .map(|(i, z)| ((i / cols) as i64, (i % cols) as i64, z.re, z.im))
        .collect()
}

/// Emits every entry, zeros included; numbers use shortest round-trip form.
pub fn serialize_instance(inst: &IsingInstance) -> String {
    let doc = InstanceDoc {
        n: inst.n,
        m: inst.m,
        h: entries(&inst.h, inst.m),
        jv: entries(&inst.jv, inst.m),
        jh: if inst.m > 1 { entries(&inst.jh, inst.m - 1) } else { Vec::new() },
    };
    serde_json::to_string(&doc).expect("instance document is always serializable")
}
