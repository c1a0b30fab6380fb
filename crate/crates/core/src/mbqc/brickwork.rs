//! Decorated lattice graphs and the vertical-edge reduction that turns them
//! into brickwork-shaped graph states.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_4;

use super::clifford::ExactScalar;
use super::graph::{GraphError, GraphState};
use super::MbqcError;
use crate::compile_unitary::readout_matrix;
use crate::linalg::{self, c};
use crate::model::IsingInstance;

/// Columns per brickwork unit cell.
pub const CELL_COLUMNS: usize = 15;
/// Offsets inside a cell where two adjacent wires are bridged.
pub const BRIDGE_COLUMNS: [usize; 2] = [3, 9];

/// Qubit numbering of the decorated lattice; matches the constant-depth circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecoratedLayout {
    pub n: usize,
    pub m: usize,
}

impl DecoratedLayout {
    pub fn vertex(&self, r: usize, c: usize) -> usize {
        r * self.m + c
    }

    pub fn vertical_edge(&self, r: usize, c: usize) -> usize {
        self.n * self.m + r * self.m + c
    }

    pub fn horizontal_edge(&self, r: usize, c: usize) -> usize {
        self.n * self.m + (self.n - 1) * self.m + r * (self.m - 1) + c
    }

    pub fn num_qubits(&self) -> usize {
        self.n * self.m + (self.n - 1) * self.m + self.n * (self.m - 1)
    }
}

/// The graph obtained by adding a vertex on every lattice edge.
pub fn decorated_graph(n: usize, m: usize) -> Result<(GraphState, DecoratedLayout), MbqcError> {
    if n == 0 || m == 0 {
        return Err(MbqcError::Dimensions(format!("{n}x{m} lattice is empty")));
    }
    let layout = DecoratedLayout { n, m };
    let mut g = GraphState::new(layout.num_qubits());
    for r in 0..n {
        for c in 0..m {
            if r + 1 < n {
                let e = layout.vertical_edge(r, c);
                g.add_edge(layout.vertex(r, c), e)?;
                g.add_edge(e, layout.vertex(r + 1, c))?;
            }
            if c + 1 < m {
                let e = layout.horizontal_edge(r, c);
                g.add_edge(layout.vertex(r, c), e)?;
                g.add_edge(e, layout.vertex(r, c + 1))?;
            }
        }
    }
    Ok((g, layout))
}

/// Maximum stabilizer violation `‖K_v ψ − ψ‖_∞` over all vertices, where
/// `K_v = X_v Π_{u∈N(v)} Z_u` and qubit `i` is the `i`-th live vertex.
pub fn stabilizer_violation(g: &GraphState, psi: &[Complex64]) -> f64 {
    let live = g.live_vertices();
    let pos = |v: usize| live.binary_search(&v).expect("live");
    let mut worst = 0.0f64;
    for &v in &live {
        let x = 1usize << pos(v);
        let zmask: usize = g.neighbors(v).iter().map(|&u| 1usize << pos(u)).sum();
        for (i, &amp) in psi.iter().enumerate() {
            // (K ψ)[i] = (−1)^{|i ∧ z|} ψ[i ⊕ x]
            let sign = if (i & zmask).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            worst = worst.max((psi[i ^ x] * sign - amp).norm());
        }
    }
    worst
}

/// The bra `⟨0|A_e H` that an edge qubit with coupling `j` is contracted with.
pub fn edge_bra(j: Complex64) -> [Complex64; 2] {
    let a = readout_matrix(j) * linalg::hadamard();
    [a[(0, 0)], a[(0, 1)]]
}

/// The bra `⟨0|A_v` for a vertex qubit with field `h`.
pub fn vertex_bra(h: Complex64) -> [Complex64; 2] {
    let a = readout_matrix(h);
    [a[(0, 0)], a[(0, 1)]]
}

/// Result of contracting every vertical edge qubit of a decorated lattice.
#[derive(Debug, Clone)]
pub struct BrickworkReduction {
    pub graph: GraphState,
    pub layout: DecoratedLayout,
    /// Number of contracted vertical edge qubits (#γ).
    pub gamma_count: usize,
    /// Vertical edges that became direct wire-to-wire bonds.
    pub bridges: Vec<(usize, usize)>,
}

impl BrickworkReduction {
    /// `log2 Δ_t = −#γ/2`.
    pub fn log2_delta_t(&self) -> f64 {
        -(self.gamma_count as f64) / 2.0
    }
}

/// Contracts the vertical edge qubits of `inst` symbolically. Couplings must
/// be `0` (cut) or `iπ/4` (bridge), i.e. Pauli eigenbras after folding.
pub fn reduce_vertical_edges(inst: &IsingInstance) -> Result<BrickworkReduction, MbqcError> {
    let (mut g, layout) = decorated_graph(inst.n(), inst.m())?;
    let mut bridges = Vec::new();
    let mut gamma_count = 0;
    for r in 0..inst.n().saturating_sub(1) {
        for col in 0..inst.m() {
            let j = inst.jv(r, col);
            let [x0, x1] = edge_bra(j);
            g.project_bra(layout.vertical_edge(r, col), x0, x1).map_err(|e| match e {
                GraphError::NotPauli(_) => MbqcError::Dimensions(format!("vertical coupling {j} at ({r},{col}) is not 0 or iπ/4")),
                other => MbqcError::Graph(other),
            })?;
            gamma_count += 1;
            if j.norm() > 0.0 {
                bridges.push((r, col));
            }
        }
    }
    Ok(BrickworkReduction { graph: g, layout, gamma_count, bridges })
}

/// True if column `col` of pair `(r, r+1)` carries a bridge in the standard
/// brickwork arrangement: cell `k` bridges pairs whose upper row has parity `k`.
pub fn is_brickwork_bridge(r: usize, col: usize) -> bool {
    let (cell, offset) = (col / CELL_COLUMNS, col % CELL_COLUMNS);
    BRIDGE_COLUMNS.contains(&offset) && r % 2 == cell % 2
}

/// Problem-2 style instance carrying the standard brickwork bridges, with
/// every field and horizontal coupling set to `iπ/4`.
pub fn brickwork_instance(n: usize, m: usize) -> Result<IsingInstance, MbqcError> {
    if n < 2 || m < CELL_COLUMNS {
        return Err(MbqcError::Dimensions(format!("brickwork needs n ≥ 2 and m ≥ {CELL_COLUMNS}, got {n}x{m}")));
    }
    let mut inst = IsingInstance::new(n, m)?;
    let quarter = c(0.0, FRAC_PI_4);
    for r in 0..n {
        for col in 0..m {
            inst.set_h(r, col, quarter);
            if col + 1 < m {
                inst.set_jh(r, col, quarter);
            }
            if r + 1 < n && is_brickwork_bridge(r, col) {
                inst.set_jv(r, col, quarter);
            }
        }
    }
    Ok(inst)
}

/// The brickwork graph state on an `n x m` lattice, obtained by contracting
/// every vertical edge qubit of the decorated graph.
pub fn build_brickwork(n: usize, m: usize) -> Result<BrickworkReduction, MbqcError> {
    reduce_vertical_edges(&brickwork_instance(n, m)?)
}

/// `|scalar| = 2^{−#γ/2}` with no zero.
pub fn scalar_matches_delta_t(red: &BrickworkReduction) -> bool {
    let s: ExactScalar = red.graph.scalar();
    !s.zero && s.sqrt2_exp == -(red.gamma_count as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile_unitary::delta_o;
    use crate::mbqc::clifford::PauliBra;
    use crate::mbqc::graph::contract_qubit;
    use crate::model::{random_instance, DomainClass};
    use crate::oracle::brute_force_z;
    use petgraph::algo::is_isomorphic;
    use petgraph::graph::UnGraph;

    #[test]
    fn decorated_counts() {
        let (g, _) = decorated_graph(1, 2).unwrap();
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.edges(), vec![(0, 2), (1, 2)]);
        let (g, layout) = decorated_graph(2, 2).unwrap();
        assert_eq!(g.num_vertices(), 8);
        for v in 0..4 {
            assert_eq!(g.neighbors(v).len(), 2);
        }
        assert_eq!(layout.num_qubits(), 8);
    }

    #[test]
    fn explicit_states_satisfy_stabilizers() {
        for (n, m) in [(1, 2), (2, 2), (2, 3), (3, 2)] {
            let (g, _) = decorated_graph(n, m).unwrap();
            let psi = g.to_state_vector().unwrap();
            assert!(stabilizer_violation(&g, &psi) < 1e-12, "{n}x{m}");
        }
    }

    #[test]
    fn overlap_with_readout_bras_gives_partition_function() {
        for (n, m, seed) in [(1, 2, 3), (1, 3, 4), (2, 2, 5), (2, 3, 6)] {
            let inst = random_instance(n, m, DomainClass::General, seed).unwrap();
            let (g, layout) = decorated_graph(n, m).unwrap();
            let mut psi = g.to_state_vector().unwrap();
            let mut bras: Vec<[Complex64; 2]> = inst.fields().iter().map(|&h| vertex_bra(h)).collect();
            bras.extend(inst.edges().iter().map(|e| edge_bra(e.coupling)));
            assert_eq!(bras.len(), layout.num_qubits());
            for bra in bras.iter().rev() {
                psi = contract_qubit(&psi, psi.len().trailing_zeros() as usize - 1, bra[0], bra[1]);
            }
            let z = psi[0] * delta_o(&inst).unwrap();
            let want = brute_force_z(&inst, false).unwrap().value();
            assert!((z - want).norm() <= 1e-10 * want.norm(), "{n}x{m}: {z} vs {want}");
        }
    }

    #[test]
    fn small_slice_matches_explicit_projection() {
        let mut inst = IsingInstance::new(2, 3).unwrap();
        inst.set_jv(0, 1, c(0.0, FRAC_PI_4));
        let (g0, layout) = decorated_graph(2, 3).unwrap();
        let mut psi = g0.to_state_vector().unwrap();
        let red = reduce_vertical_edges(&inst).unwrap();
        let mut gone: Vec<usize> = Vec::new();
        for col in 0..3 {
            let q = layout.vertical_edge(0, col);
            let pos = q - gone.iter().filter(|&&x| x < q).count();
            let [x0, x1] = edge_bra(inst.jv(0, col));
            psi = contract_qubit(&psi, pos, x0, x1);
            gone.push(q);
        }
        let got = red.graph.to_state_vector().unwrap();
        let diff = got.iter().zip(&psi).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-12);
        assert_eq!(red.gamma_count, 3);
        assert!(scalar_matches_delta_t(&red));
        assert_eq!(red.bridges, vec![(0, 1)]);
    }

    #[test]
    fn unit_cell_topology() {
        let red = build_brickwork(2, CELL_COLUMNS).unwrap();
        assert_eq!(red.gamma_count, CELL_COLUMNS);
        assert!(scalar_matches_delta_t(&red));
        let live = red.graph.live_vertices();
        let pos = |v: usize| live.binary_search(&v).unwrap() as u32;
        let got = UnGraph::<(), ()>::from_edges(red.graph.edges().iter().map(|&(a, b)| (pos(a), pos(b))));
        // two wires of 2m−1 qubits, joined at the bridge columns
        let wire = 2 * CELL_COLUMNS - 1;
        let mut want_edges: Vec<(u32, u32)> = Vec::new();
        for w in 0..2u32 {
            let base = w * wire as u32;
            want_edges.extend((0..wire as u32 - 1).map(|i| (base + i, base + i + 1)));
        }
        for col in BRIDGE_COLUMNS {
            want_edges.push((2 * col as u32, wire as u32 + 2 * col as u32));
        }
        let want = UnGraph::<(), ()>::from_edges(want_edges);
        assert_eq!(got.node_count(), want.node_count());
        assert!(is_isomorphic(&got, &want));
        for &(r, col) in &red.bridges {
            let (a, b) = (red.layout.vertex(r, col), red.layout.vertex(r + 1, col));
            assert!(red.graph.neighbors(a).contains(&b));
        }
    }

    #[test]
    fn brickwork_alternates_pairs() {
        let red = build_brickwork(3, 2 * CELL_COLUMNS).unwrap();
        assert_eq!(red.bridges, vec![(0, 3), (0, 9), (1, 18), (1, 24)]);
        assert!(scalar_matches_delta_t(&red));
        assert!(build_brickwork(1, 15).is_err());
    }

    #[test]
    fn path_of_y_projections_joins_ends() {
        let mut g = GraphState::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let mut psi = g.to_state_vector().unwrap();
        for (v, pos) in [(1, 1), (2, 1), (3, 1)] {
            let r = PauliBra::YMinus.row();
            psi = contract_qubit(&psi, pos, r[0], r[1]);
            g.project(v, PauliBra::YMinus).unwrap();
        }
        assert_eq!(g.edges(), vec![(0, 4)]);
        let got = g.to_state_vector().unwrap();
        assert!(got.iter().zip(&psi).all(|(a, b)| (a - b).norm() < 1e-12));
    }
}
