//! Cluster graph, stabilizer generators, and the cluster basis.
//!
//! The graph machinery takes a general adjacency matrix, but the artifact
//! only exercises the four-qubit path. Basis amplitudes are exact signed
//! quarters, so no error accumulates in the construction; qubit 1 is the
//! most significant bit of a computational basis index.

use crate::error::{Error, Result};
use crate::state::{self, FVector};

/// Simple graph given by a symmetric 0/1 adjacency matrix with zero diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<u8>>,
}

impl Graph {
    /// Panics if the adjacency matrix is not square, symmetric, 0/1 with a
    /// zero diagonal; graphs are built in code, not parsed from input.
    pub fn new(adj: Vec<Vec<u8>>) -> Self {
        let n = adj.len();
        for (i, row) in adj.iter().enumerate() {
            assert_eq!(row.len(), n, "adjacency matrix must be square");
            assert_eq!(row[i], 0, "diagonal must be zero");
            for (j, &x) in row.iter().enumerate() {
                assert!(x <= 1, "adjacency entries must be 0 or 1");
                assert_eq!(x, adj[j][i], "adjacency matrix must be symmetric");
            }
        }
        Graph { n, adj }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn adjacency(&self) -> &[Vec<u8>] {
        &self.adj
    }

    /// Neighbors of vertex `v`, ascending.
    pub fn neighborhood(&self, v: usize) -> Vec<usize> {
        self.adj[v]
            .iter()
            .enumerate()
            .filter_map(|(j, &x)| (x == 1).then_some(j))
            .collect()
    }
}

/// The four-vertex path graph with edges (1,2), (2,3), (3,4).
pub fn build_cluster_graph() -> Graph {
    Graph::new(vec![
        vec![0, 1, 0, 0],
        vec![1, 0, 1, 0],
        vec![0, 1, 0, 1],
        vec![0, 0, 1, 0],
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PauliOp {
    I,
    X,
    Z,
}

/// Tensor product of single-site I/X/Z operators with an overall sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliString {
    pub ops: Vec<PauliOp>,
    pub sign: i8,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString {
            ops: vec![PauliOp::I; n],
            sign: 1,
        }
    }

    /// Two strings commute iff the number of sites where one acts as X and
    /// the other as Z is even.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        assert_eq!(self.ops.len(), other.ops.len());
        let clashes = self
            .ops
            .iter()
            .zip(&other.ops)
            .filter(|(a, b)| {
                matches!(
                    (a, b),
                    (PauliOp::X, PauliOp::Z) | (PauliOp::Z, PauliOp::X)
                )
            })
            .count();
        clashes % 2 == 0
    }

    /// Applies the operator to a real state vector.
    pub fn apply(&self, v: &StateVector) -> StateVector {
        let n = v.n;
        assert_eq!(self.ops.len(), n);
        let mut x_mask = 0usize;
        let mut z_mask = 0usize;
        for (i, op) in self.ops.iter().enumerate() {
            let bit = 1usize << (n - 1 - i);
            match op {
                PauliOp::X => x_mask |= bit,
                PauliOp::Z => z_mask |= bit,
                PauliOp::I => {}
            }
        }
        let dim = 1 << n;
        let mut out = vec![0.0; dim];
        for mu in 0..dim {
            let phase = (mu & z_mask).count_ones() & 1;
            let s = self.sign as f64 * if phase == 1 { -1.0 } else { 1.0 };
            out[mu ^ x_mask] += s * v.amp[mu];
        }
        StateVector { n, amp: out }
    }
}

impl std::fmt::Display for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.sign < 0 {
            write!(f, "-")?;
        }
        for op in &self.ops {
            let c = match op {
                PauliOp::I => 'I',
                PauliOp::X => 'X',
                PauliOp::Z => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Stabilizer generators `K_i = X_i prod_{j in N_i} Z_j`.
pub fn stabilizer_generators(g: &Graph) -> Vec<PauliString> {
    let n = g.vertex_count();
    (0..n)
        .map(|i| {
            let mut ops = vec![PauliOp::I; n];
            ops[i] = PauliOp::X;
            for j in g.neighborhood(i) {
                ops[j] = PauliOp::Z;
            }
            PauliString { ops, sign: 1 }
        })
        .collect()
}

/// Real amplitudes over computational basis strings, unit norm.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amp: Vec<f64>,
}

impl StateVector {
    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amp
    }

    pub fn inner(&self, other: &StateVector) -> f64 {
        assert_eq!(self.n, other.n);
        self.amp.iter().zip(&other.amp).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self)
    }
}

/// Graph basis state `Z^a |G>`: amplitude on `|mu>` carries the sign
/// `(-1)^(q(mu) + a.mu)` with `q` the edge quadratic form of the graph.
#[allow(clippy::needless_range_loop)]
pub fn basis_state(g: &Graph, a: usize) -> StateVector {
    let n = g.vertex_count();
    let dim = 1usize << n;
    assert!(a < dim, "basis index out of range");
    let norm = 1.0 / (dim as f64).sqrt();
    let adj = g.adjacency();
    let bit = |word: usize, i: usize| -> usize { (word >> (n - 1 - i)) & 1 };
    let mut amp = vec![0.0; dim];
    for (mu, slot) in amp.iter_mut().enumerate() {
        let mut parity = 0usize;
        for i in 0..n {
            for j in (i + 1)..n {
                if adj[i][j] == 1 {
                    parity += bit(mu, i) * bit(mu, j);
                }
            }
        }
        parity += (a & mu).count_ones() as usize;
        *slot = if parity & 1 == 0 { norm } else { -norm };
    }
    StateVector { n, amp }
}

/// The 16 orthonormal cluster basis states in index order.
pub fn cluster_basis() -> Vec<StateVector> {
    let g = build_cluster_graph();
    (0..state::BASIS).map(|a| basis_state(&g, a)).collect()
}

/// Dense 16x16 complex matrix split into real and imaginary parts; the
/// ingestion carrier for density matrices before the twirl.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "HermitianRepr", into = "HermitianRepr")]
pub struct HermitianMatrix {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct HermitianRepr {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl TryFrom<HermitianRepr> for HermitianMatrix {
    type Error = Error;
    fn try_from(r: HermitianRepr) -> Result<Self> {
        HermitianMatrix::new(r.re, r.im)
    }
}

impl From<HermitianMatrix> for HermitianRepr {
    fn from(m: HermitianMatrix) -> Self {
        HermitianRepr { re: m.re, im: m.im }
    }
}

impl HermitianMatrix {
    /// Checks shape (16x16) and hermiticity within 1e-10.
    pub fn new(re: Vec<Vec<f64>>, im: Vec<Vec<f64>>) -> Result<Self> {
        let dim = state::BASIS;
        let square = |m: &[Vec<f64>]| m.len() == dim && m.iter().all(|r| r.len() == dim);
        if !square(&re) || !square(&im) {
            return Err(Error::DomainError {
                value: re.len() as f64,
                domain: "matrix must be 16x16",
            });
        }
        let mut max_dev = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                max_dev = max_dev.max((re[i][j] - re[j][i]).abs());
                max_dev = max_dev.max((im[i][j] + im[j][i]).abs());
            }
        }
        if max_dev > 1e-10 {
            return Err(Error::NonHermitian { max_dev });
        }
        Ok(HermitianMatrix { re, im })
    }

    pub fn real(&self) -> &[Vec<f64>] {
        &self.re
    }

    pub fn imag(&self) -> &[Vec<f64>] {
        &self.im
    }

    pub fn trace(&self) -> f64 {
        (0..state::BASIS).map(|i| self.re[i][i]).sum()
    }

    /// Projector onto a real state vector, as a convenience for building
    /// test density matrices.
    pub fn projector(v: &StateVector) -> Self {
        let dim = state::BASIS;
        assert_eq!(v.amplitudes().len(), dim);
        let a = v.amplitudes();
        let re = (0..dim)
            .map(|i| (0..dim).map(|j| a[i] * a[j]).collect())
            .collect();
        let im = vec![vec![0.0; dim]; dim];
        HermitianMatrix { re, im }
    }

    /// Convex mixture of matrices; weights need not be validated here.
    pub fn mix(parts: &[(f64, &HermitianMatrix)]) -> Self {
        let dim = state::BASIS;
        let mut re = vec![vec![0.0; dim]; dim];
        let mut im = vec![vec![0.0; dim]; dim];
        for (w, m) in parts {
            for i in 0..dim {
                for j in 0..dim {
                    re[i][j] += w * m.re[i][j];
                    im[i][j] += w * m.im[i][j];
                }
            }
        }
        HermitianMatrix { re, im }
    }
}

/// Cluster-basis fidelities `F_a = <Cl_a| rho |Cl_a>` of a density matrix.
///
/// Hermiticity is validated when the matrix is constructed; here the trace
/// must be 1 within 1e-10 and every extracted fidelity at least -1e-12.
/// Off-diagonal content in the cluster basis is discarded by construction.
pub fn twirl_to_fvector(rho: &HermitianMatrix) -> Result<FVector> {
    let tr = rho.trace();
    if (tr - 1.0).abs() > 1e-10 {
        return Err(Error::TraceNotOne { trace: tr });
    }
    let basis = cluster_basis();
    let re = rho.real();
    let dim = state::BASIS;
    let mut f = [0.0; state::BASIS];
    for (a, state) in basis.iter().enumerate() {
        let v = state.amplitudes();
        let mut acc = 0.0;
        for m in 0..dim {
            let mut row = 0.0;
            for mp in 0..dim {
                row += re[m][mp] * v[mp];
            }
            acc += v[m] * row;
        }
        f[a] = acc;
    }
    for (a, &x) in f.iter().enumerate() {
        if x < -1e-12 {
            return Err(Error::NegativeFidelity { index: a, value: x });
        }
    }
    state::validate(&f)
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use crate::state::index;

    // Real 16x16 matrix oracle for Pauli strings (I, X, Z only, so every
    // entry is real).
    fn single_matrix(op: PauliOp) -> [[f64; 2]; 2] {
        match op {
            PauliOp::I => [[1.0, 0.0], [0.0, 1.0]],
            PauliOp::X => [[0.0, 1.0], [1.0, 0.0]],
            PauliOp::Z => [[1.0, 0.0], [0.0, -1.0]],
        }
    }

    fn pauli_matrix(p: &PauliString) -> Vec<Vec<f64>> {
        let mut m = vec![vec![p.sign as f64]];
        for op in &p.ops {
            let s = single_matrix(*op);
            let dim = m.len();
            let mut next = vec![vec![0.0; dim * 2]; dim * 2];
            for i in 0..dim {
                for j in 0..dim {
                    for a in 0..2 {
                        for b in 0..2 {
                            next[2 * i + a][2 * j + b] = m[i][j] * s[a][b];
                        }
                    }
                }
            }
            m = next;
        }
        m
    }

    fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let n = a.len();
        let mut c = vec![vec![0.0; n]; n];
        for i in 0..n {
            for k in 0..n {
                let x = a[i][k];
                if x == 0.0 {
                    continue;
                }
                for j in 0..n {
                    c[i][j] += x * b[k][j];
                }
            }
        }
        c
    }

    #[test]
    fn cluster_graph_adjacency_and_neighborhoods() {
        let g = build_cluster_graph();
        assert_eq!(
            g.adjacency(),
            &[
                vec![0, 1, 0, 0],
                vec![1, 0, 1, 0],
                vec![0, 1, 0, 1],
                vec![0, 0, 1, 0],
            ]
        );
        assert_eq!(g.neighborhood(0), vec![1]);
        assert_eq!(g.neighborhood(1), vec![0, 2]);
    }

    #[test]
    fn stabilizers_of_cluster_graph() {
        let gens = stabilizer_generators(&build_cluster_graph());
        let labels: Vec<String> = gens.iter().map(|k| k.to_string()).collect();
        assert_eq!(labels, vec!["XZII", "ZXZI", "IZXZ", "IIZX"]);
    }

    #[test]
    fn stabilizers_of_edgeless_graph() {
        let g = Graph::new(vec![vec![0; 4]; 4]);
        let labels: Vec<String> = stabilizer_generators(&g)
            .iter()
            .map(|k| k.to_string())
            .collect();
        assert_eq!(labels, vec!["XIII", "IXII", "IIXI", "IIIX"]);
    }

    #[test]
    fn all_stabilizer_pairs_commute_by_matrix_oracle() {
        let gens = stabilizer_generators(&build_cluster_graph());
        for i in 0..4 {
            for j in (i + 1)..4 {
                assert!(gens[i].commutes_with(&gens[j]));
                let a = pauli_matrix(&gens[i]);
                let b = pauli_matrix(&gens[j]);
                let ab = matmul(&a, &b);
                let ba = matmul(&b, &a);
                for r in 0..16 {
                    for c in 0..16 {
                        assert!((ab[r][c] - ba[r][c]).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn graph_state_amplitudes_match_quadratic_form() {
        let g = build_cluster_graph();
        let v = basis_state(&g, 0);
        for mu in 0..16usize {
            let b = |i: usize| (mu >> (3 - i)) & 1;
            let parity = b(0) * b(1) + b(1) * b(2) + b(2) * b(3);
            let expect = if parity % 2 == 0 { 0.25 } else { -0.25 };
            assert_eq!(v.amplitudes()[mu], expect);
        }
    }

    #[test]
    fn basis_states_are_orthonormal() {
        let basis = cluster_basis();
        for a in 0..16 {
            for b in 0..16 {
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((basis[a].inner(&basis[b]) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn eigenrelation_holds_for_all_generators_and_indices() {
        let g = build_cluster_graph();
        let gens = stabilizer_generators(&g);
        let basis = cluster_basis();
        for a in 0..16usize {
            for (i, k) in gens.iter().enumerate() {
                let applied = k.apply(&basis[a]);
                let eig = if (a >> (3 - i)) & 1 == 1 { -1.0 } else { 1.0 };
                for mu in 0..16 {
                    assert_eq!(applied.amplitudes()[mu], eig * basis[a].amplitudes()[mu]);
                }
            }
        }
        // Spot checks from the contract.
        let k2 = &gens[1];
        let v = basis_state(&g, index(0, 1, 0, 0));
        let applied = k2.apply(&v);
        for mu in 0..16 {
            assert_eq!(applied.amplitudes()[mu], -v.amplitudes()[mu]);
        }
        assert!(basis[index(0, 0, 0, 0)]
            .inner(&basis[index(1, 0, 1, 1)])
            .abs()
            .max(0.0)
            < 1e-12);
    }

    #[test]
    fn twirl_projector_gives_delta() {
        let basis = cluster_basis();
        let rho = HermitianMatrix::projector(&basis[0]);
        let f = twirl_to_fvector(&rho).unwrap();
        assert!((f[0] - 1.0).abs() < 1e-12);
        for a in 1..16 {
            assert!(f[a].abs() < 1e-12);
        }
    }

    #[test]
    fn twirl_maximally_mixed() {
        let dim = 16;
        let mut re = vec![vec![0.0; dim]; dim];
        for (i, row) in re.iter_mut().enumerate() {
            row[i] = 1.0 / 16.0;
        }
        let rho = HermitianMatrix::new(re, vec![vec![0.0; dim]; dim]).unwrap();
        let f = twirl_to_fvector(&rho).unwrap();
        for a in 0..16 {
            assert!((f[a] - 1.0 / 16.0).abs() < 1e-12);
        }
    }

    #[test]
    fn twirl_ignores_cluster_basis_coherence() {
        let basis = cluster_basis();
        let p0 = HermitianMatrix::projector(&basis[index(0, 0, 0, 0)]);
        let p9 = HermitianMatrix::projector(&basis[index(1, 0, 0, 1)]);
        let diag = HermitianMatrix::mix(&[(0.5, &p0), (0.5, &p9)]);
        // Coherence term 0.1 (|a><b| + |b><a|) built by the sandwich oracle.
        let a = basis[index(0, 0, 0, 0)].amplitudes();
        let b = basis[index(1, 0, 0, 1)].amplitudes();
        let mut re = diag.real().to_vec();
        for i in 0..16 {
            for j in 0..16 {
                re[i][j] += 0.1 * (a[i] * b[j] + b[i] * a[j]);
            }
        }
        let with_coherence = HermitianMatrix::new(re, vec![vec![0.0; 16]; 16]).unwrap();
        let f1 = twirl_to_fvector(&diag).unwrap();
        let f2 = twirl_to_fvector(&with_coherence).unwrap();
        for x in 0..16 {
            assert!((f1[x] - f2[x]).abs() < 1e-12);
        }
    }

    #[test]
    fn twirl_is_linear() {
        let basis = cluster_basis();
        let r1 = HermitianMatrix::projector(&basis[3]);
        let mut re = vec![vec![0.0; 16]; 16];
        for (i, row) in re.iter_mut().enumerate() {
            row[i] = 1.0 / 16.0;
        }
        let r2 = HermitianMatrix::new(re, vec![vec![0.0; 16]; 16]).unwrap();
        let alpha = 0.3;
        let mixed = HermitianMatrix::mix(&[(alpha, &r1), (1.0 - alpha, &r2)]);
        let fm = twirl_to_fvector(&mixed).unwrap();
        let f1 = twirl_to_fvector(&r1).unwrap();
        let f2 = twirl_to_fvector(&r2).unwrap();
        for a in 0..16 {
            assert!((fm[a] - (alpha * f1[a] + (1.0 - alpha) * f2[a])).abs() < 1e-12);
        }
    }

    #[test]
    fn twirl_rejects_bad_trace_and_non_hermitian() {
        let mut re = vec![vec![0.0; 16]; 16];
        for (i, row) in re.iter_mut().enumerate() {
            row[i] = 1.0 / 8.0;
        }
        let rho = HermitianMatrix::new(re, vec![vec![0.0; 16]; 16]).unwrap();
        assert!(matches!(
            twirl_to_fvector(&rho),
            Err(Error::TraceNotOne { .. })
        ));

        let mut re = vec![vec![0.0; 16]; 16];
        re[0][1] = 0.5;
        assert!(matches!(
            HermitianMatrix::new(re, vec![vec![0.0; 16]; 16]),
            Err(Error::NonHermitian { .. })
        ));
    }

    #[test]
    fn twirl_rejects_negative_fidelity() {
        // Diagonal in the cluster basis with one negative eigenvalue.
        let basis = cluster_basis();
        let p0 = HermitianMatrix::projector(&basis[0]);
        let p1 = HermitianMatrix::projector(&basis[1]);
        let rho = HermitianMatrix::mix(&[(1.1, &p0), (-0.1, &p1)]);
        assert!(matches!(
            twirl_to_fvector(&rho),
            Err(Error::NegativeFidelity { .. })
        ));
    }
}
