//! Joint-space Hilbert machinery: dense state vectors, tensor products, the
//! ancilla partial trace, and the Hamming-weight sector indexing of an
//! N-qubit register.
//!
//! Basis convention for a joint state of the computational qubit S and an
//! N-qubit ancilla A: index = s * 2^N + a, where `s` is the S bit and `a`
//! reads the ancilla bitstring as an integer (bit i belongs to qubit
//! A_{i+1}). Bit value 1 corresponds to Z eigenvalue -1, so the Hamming
//! weight of `a` is directly the ancilla sector label n.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{C64, ONE, ZERO};
use crate::policy::Tolerances;

/// Largest total qubit count (system + ancilla) represented densely.
pub const DENSE_QUBIT_LIMIT: usize = 13;
/// Largest dense vector dimension, 2^13.
pub const DENSE_DIM_LIMIT: usize = 1 << DENSE_QUBIT_LIMIT;
/// Largest ancilla size with a dense joint-space path.
pub const MAX_DENSE_ANCILLA: usize = DENSE_QUBIT_LIMIT - 1;

/// Dense complex state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Shape("state vector must have dimension >= 1".into()));
        }
        if amplitudes.len() > DENSE_DIM_LIMIT {
            return Err(Error::Capacity {
                what: "state vector",
                dim: amplitudes.len(),
                limit: DENSE_DIM_LIMIT,
            });
        }
        Ok(StateVector { amplitudes })
    }

    /// Computational basis vector |index⟩ in a `dim`-dimensional space.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::Shape(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Self::new(amplitudes)
    }

    pub fn zero_vector(dim: usize) -> Result<Self> {
        Self::new(vec![ZERO; dim])
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> C64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scaled(&self, factor: C64) -> StateVector {
        StateVector {
            amplitudes: self.amplitudes.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &StateVector) -> StateVector {
        debug_assert_eq!(self.dim(), other.dim());
        StateVector {
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn normalized(&self) -> Result<StateVector> {
        let n = self.norm();
        if n <= 0.0 {
            return Err(Error::Validation("cannot normalize the zero vector".into()));
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }
}

/// Kronecker product in row-major (left-factor-major) order:
/// index(v ⊗ w) = index(v) * dim(w) + index(w).
pub fn tensor(v: &StateVector, w: &StateVector) -> Result<StateVector> {
    let dim = v
        .dim()
        .checked_mul(w.dim())
        .ok_or(Error::Capacity {
            what: "tensor product",
            dim: usize::MAX,
            limit: DENSE_DIM_LIMIT,
        })?;
    if dim > DENSE_DIM_LIMIT {
        return Err(Error::Capacity {
            what: "tensor product",
            dim,
            limit: DENSE_DIM_LIMIT,
        });
    }
    let mut amplitudes = Vec::with_capacity(dim);
    for a in v.amplitudes() {
        for b in w.amplitudes() {
            amplitudes.push(a * b);
        }
    }
    StateVector::new(amplitudes)
}

/// 2x2 density matrix of the computational qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitDensity {
    entries: [[C64; 2]; 2],
}

impl QubitDensity {
    /// Validates Hermiticity, unit trace, and positivity at the structural
    /// tolerance.
    pub fn new(entries: [[C64; 2]; 2]) -> Result<Self> {
        let tol = Tolerances::DEFAULT.structural;
        if entries[0][0].im.abs() > tol
            || entries[1][1].im.abs() > tol
            || (entries[0][1] - entries[1][0].conj()).norm() > tol
        {
            return Err(Error::Validation(
                "density matrix is not Hermitian".into(),
            ));
        }
        let trace = entries[0][0].re + entries[1][1].re;
        if (trace - 1.0).abs() > tol {
            return Err(Error::Validation(format!(
                "density matrix trace {trace} differs from 1"
            )));
        }
        let (_, low) = eigvals_2x2(&entries);
        if low < -tol {
            return Err(Error::Validation(format!(
                "density matrix has negative eigenvalue {low}"
            )));
        }
        Ok(QubitDensity { entries })
    }

    pub fn entries(&self) -> &[[C64; 2]; 2] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.entries[i][j]
    }

    pub fn trace(&self) -> f64 {
        self.entries[0][0].re + self.entries[1][1].re
    }

    pub fn max_entry_distance(&self, other: &QubitDensity) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.entries[i][j] - other.entries[i][j]).norm());
            }
        }
        worst
    }
}

/// Pure state of the computational qubit, sqrt(p)|0⟩ + sqrt(1-p) e^{iθ}|1⟩.
///
/// The global phase is fixed by keeping the |0⟩ amplitude real and
/// non-negative, so (p, θ) coordinates cover every physically distinct pure
/// state exactly once (θ is irrelevant at p = 0 and p = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureQubitState {
    p: f64,
    theta: f64,
}

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TWO_PI);
    if t == TWO_PI {
        0.0
    } else {
        t
    }
}

impl PureQubitState {
    pub fn new(p: f64, theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || !p.is_finite() {
            return Err(Error::Validation(format!(
                "weight p = {p} must lie in [0, 1]"
            )));
        }
        if !theta.is_finite() {
            return Err(Error::Validation("phase must be finite".into()));
        }
        Ok(PureQubitState {
            p,
            theta: wrap_angle(theta),
        })
    }

    pub fn ket0() -> Self {
        PureQubitState { p: 1.0, theta: 0.0 }
    }

    pub fn ket1() -> Self {
        PureQubitState { p: 0.0, theta: 0.0 }
    }

    pub fn plus() -> Self {
        PureQubitState { p: 0.5, theta: 0.0 }
    }

    pub fn minus() -> Self {
        PureQubitState {
            p: 0.5,
            theta: std::f64::consts::PI,
        }
    }

    pub fn plus_i() -> Self {
        PureQubitState {
            p: 0.5,
            theta: std::f64::consts::FRAC_PI_2,
        }
    }

    pub fn minus_i() -> Self {
        PureQubitState {
            p: 0.5,
            theta: 1.5 * std::f64::consts::PI,
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Amplitude of |0⟩ (real and non-negative by convention).
    pub fn alpha(&self) -> f64 {
        self.p.sqrt()
    }

    /// Amplitude of |1⟩.
    pub fn beta(&self) -> C64 {
        C64::from_polar((1.0 - self.p).sqrt(), self.theta)
    }

    pub fn amplitudes(&self) -> [C64; 2] {
        [C64::new(self.alpha(), 0.0), self.beta()]
    }

    pub fn state_vector(&self) -> StateVector {
        StateVector {
            amplitudes: self.amplitudes().to_vec(),
        }
    }

    /// The bit-flipped state X|ψ⟩, re-expressed in (p, θ) coordinates.
    pub fn flipped(&self) -> PureQubitState {
        PureQubitState {
            p: 1.0 - self.p,
            theta: wrap_angle(-self.theta),
        }
    }

    pub fn density(&self) -> QubitDensity {
        let amps = self.amplitudes();
        let mut entries = [[ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                entries[i][j] = amps[i] * amps[j].conj();
            }
        }
        QubitDensity { entries }
    }

    /// The six axis states used for process tomography.
    pub fn tomographic_six() -> [PureQubitState; 6] {
        [
            Self::ket0(),
            Self::ket1(),
            Self::plus(),
            Self::minus(),
            Self::plus_i(),
            Self::minus_i(),
        ]
    }
}

/// Trace over the N-qubit ancilla of a pure joint state.
///
/// ρ[s][s'] = Σ_a c_{s,a} conj(c_{s',a}) with joint index = s * 2^N + a.
pub fn partial_trace_ancilla(joint: &StateVector, n_ancilla: usize) -> Result<QubitDensity> {
    let half = 1usize
        .checked_shl(n_ancilla as u32)
        .ok_or(Error::Shape("ancilla count too large".into()))?;
    if joint.dim() != 2 * half {
        return Err(Error::Shape(format!(
            "joint dimension {} is not 2^{}",
            joint.dim(),
            n_ancilla + 1
        )));
    }
    if !joint.is_normalized(Tolerances::DEFAULT.structural) {
        return Err(Error::Validation(format!(
            "joint state norm^2 = {} is not 1",
            joint.norm_sqr()
        )));
    }
    let amps = joint.amplitudes();
    let mut entries = [[ZERO; 2]; 2];
    for s in 0..2 {
        for s2 in 0..2 {
            let mut acc = ZERO;
            for a in 0..half {
                acc += amps[s * half + a] * amps[s2 * half + a].conj();
            }
            entries[s][s2] = acc;
        }
    }
    QubitDensity::new(entries)
}

/// Hamming-weight sector decomposition of an N-qubit register.
///
/// Sector n collects the basis indices of weight n; it is the eigenspace of
/// the summed Pauli Z with eigenvalue N - 2n and dimension binomial(N, n).
#[derive(Debug, Clone, PartialEq)]
pub struct SectorBasis {
    n_qubits: usize,
    sector_of: Vec<usize>,
    indices_of: Vec<Vec<usize>>,
}

impl SectorBasis {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Sector label (Hamming weight) of a basis index.
    pub fn sector_of(&self, index: usize) -> usize {
        self.sector_of[index]
    }

    /// Ascending basis indices of sector n.
    pub fn indices_of(&self, n: usize) -> &[usize] {
        &self.indices_of[n]
    }

    pub fn dims(&self) -> Vec<usize> {
        self.indices_of.iter().map(|v| v.len()).collect()
    }

    pub fn dim_of(&self, n: usize) -> usize {
        self.indices_of.get(n).map_or(0, |v| v.len())
    }

    /// Z eigenvalue of sector n.
    pub fn z_eigenvalue(&self, n: usize) -> i64 {
        self.n_qubits as i64 - 2 * n as i64
    }

    /// Norms of the per-sector projections of `v`, along with the normalized
    /// projections themselves (None where the projection vanishes).
    pub fn project(&self, v: &StateVector, tol: f64) -> (Vec<f64>, Vec<Option<StateVector>>) {
        let mut norms = Vec::with_capacity(self.indices_of.len());
        let mut reps = Vec::with_capacity(self.indices_of.len());
        for indices in &self.indices_of {
            let mut proj = vec![ZERO; v.dim()];
            let mut sq = 0.0;
            for &i in indices {
                proj[i] = v.amplitudes()[i];
                sq += proj[i].norm_sqr();
            }
            let n = sq.sqrt();
            norms.push(n);
            if n > tol {
                let inv = C64::new(1.0 / n, 0.0);
                reps.push(Some(StateVector {
                    amplitudes: proj.iter().map(|z| z * inv).collect(),
                }));
            } else {
                reps.push(None);
            }
        }
        (norms, reps)
    }
}

/// Build the sector decomposition for 1 <= N <= MAX_DENSE_ANCILLA qubits.
pub fn hamming_sectors(n_qubits: usize) -> Result<SectorBasis> {
    if n_qubits == 0 {
        return Err(Error::Domain("need at least one qubit".into()));
    }
    if n_qubits > MAX_DENSE_ANCILLA {
        return Err(Error::Capacity {
            what: "sector basis",
            dim: 1 << n_qubits.min(62),
            limit: 1 << MAX_DENSE_ANCILLA,
        });
    }
    let dim = 1usize << n_qubits;
    let mut sector_of = Vec::with_capacity(dim);
    let mut indices_of = vec![Vec::new(); n_qubits + 1];
    for a in 0..dim {
        let n = a.count_ones() as usize;
        sector_of.push(n);
        indices_of[n].push(a);
    }
    Ok(SectorBasis {
        n_qubits,
        sector_of,
        indices_of,
    })
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Exact eigenvalues of a 2x2 Hermitian matrix, descending.
///
/// Serves as the spectral oracle for the closed-form qubit trace distance.
pub fn hermitian_2x2_eigvals(m: &[[Complex64; 2]; 2]) -> Result<(f64, f64)> {
    let tol = Tolerances::DEFAULT.validation;
    if m[0][0].im.abs() > tol || m[1][1].im.abs() > tol || (m[0][1] - m[1][0].conj()).norm() > tol
    {
        return Err(Error::Validation(
            "matrix is not Hermitian within tolerance".into(),
        ));
    }
    let (hi, lo) = eigvals_2x2(m);
    Ok((hi, lo))
}

fn eigvals_2x2(m: &[[C64; 2]; 2]) -> (f64, f64) {
    let a = m[0][0].re;
    let d = m[1][1].re;
    let mean = 0.5 * (a + d);
    let disc = (0.25 * (a - d) * (a - d) + m[0][1].norm_sqr()).sqrt();
    (mean + disc, mean - disc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn tensor_of_basis_states() {
        let zero = StateVector::basis(2, 0).unwrap();
        let one = StateVector::basis(2, 1).unwrap();
        let t = tensor(&zero, &zero).unwrap();
        assert_eq!(t.amplitudes(), &[ONE, ZERO, ZERO, ZERO]);
        let t = tensor(&one, &zero).unwrap();
        assert_eq!(t.amplitudes(), &[ZERO, ZERO, ONE, ZERO]);
    }

    #[test]
    fn tensor_of_superposition() {
        let s = 1.0 / 2.0f64.sqrt();
        let plus = StateVector::new(vec![c(s, 0.0), c(s, 0.0)]).unwrap();
        let one = StateVector::basis(2, 1).unwrap();
        let t = tensor(&plus, &one).unwrap();
        let expect = [ZERO, c(s, 0.0), ZERO, c(s, 0.0)];
        for (a, e) in t.amplitudes().iter().zip(&expect) {
            assert!((a - e).norm() < 1e-15);
        }
    }

    #[test]
    fn tensor_capacity_error() {
        let v = StateVector::zero_vector(1 << 12).unwrap();
        let w = StateVector::zero_vector(4).unwrap();
        assert!(matches!(
            tensor(&v, &w),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn tensor_is_associative_up_to_reshaping() {
        let u = StateVector::new(vec![c(0.6, 0.1), c(0.2, -0.3)]).unwrap();
        let v = StateVector::new(vec![c(0.5, 0.0), c(0.0, 0.5), c(0.1, 0.2)]).unwrap();
        let w = StateVector::new(vec![c(0.3, 0.3), c(-0.4, 0.0)]).unwrap();
        let left = tensor(&tensor(&u, &v).unwrap(), &w).unwrap();
        let right = tensor(&u, &tensor(&v, &w).unwrap()).unwrap();
        for (a, b) in left.amplitudes().iter().zip(right.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn partial_trace_product_state() {
        // |0⟩ ⊗ |A⟩ traces to |0⟩⟨0| for any unit |A⟩
        let a = StateVector::new(vec![c(0.5, 0.5), c(0.5, -0.5)]).unwrap();
        let joint = tensor(&StateVector::basis(2, 0).unwrap(), &a).unwrap();
        let rho = partial_trace_ancilla(&joint, 1).unwrap();
        assert!((rho.entry(0, 0) - ONE).norm() < 1e-12);
        assert!(rho.entry(0, 1).norm() < 1e-12);
        assert!(rho.entry(1, 1).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_maximally_correlated() {
        // (|0⟩⊗|00⟩ + |1⟩⊗|11⟩)/sqrt(2) -> diag(1/2, 1/2)
        let s = 1.0 / 2.0f64.sqrt();
        let mut amps = vec![ZERO; 8];
        amps[0] = c(s, 0.0);
        amps[7] = c(s, 0.0);
        let joint = StateVector::new(amps).unwrap();
        let rho = partial_trace_ancilla(&joint, 2).unwrap();
        assert!((rho.entry(0, 0).re - 0.5).abs() < 1e-12);
        assert!((rho.entry(1, 1).re - 0.5).abs() < 1e-12);
        assert!(rho.entry(0, 1).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_shared_ancilla_gives_coherence() {
        // (|0⟩⊗|a⟩ + |1⟩⊗|a⟩)/sqrt(2) with the same unit |a⟩ -> all entries 1/2
        let a = StateVector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let s = c(1.0 / 2.0f64.sqrt(), 0.0);
        let joint = tensor(&StateVector::basis(2, 0).unwrap(), &a)
            .unwrap()
            .scaled(s)
            .add(&tensor(&StateVector::basis(2, 1).unwrap(), &a).unwrap().scaled(s));
        let rho = partial_trace_ancilla(&joint, 1).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((rho.entry(i, j) - c(0.5, 0.0)).norm() < 1e-12, "entry {i}{j}");
            }
        }
    }

    #[test]
    fn partial_trace_preserves_trace() {
        let amps: Vec<C64> = (0..16)
            .map(|k| c(((k * 7 % 5) as f64) - 2.0, ((k * 3 % 4) as f64) - 1.5))
            .collect();
        let joint = StateVector::new(amps).unwrap().normalized().unwrap();
        let rho = partial_trace_ancilla(&joint, 3).unwrap();
        assert!((rho.trace() - joint.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_shape_error() {
        let joint = StateVector::zero_vector(6).unwrap();
        assert!(matches!(
            partial_trace_ancilla(&joint, 2),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn sectors_small_cases() {
        let s1 = hamming_sectors(1).unwrap();
        assert_eq!(s1.dims(), vec![1, 1]);
        let s3 = hamming_sectors(3).unwrap();
        assert_eq!(s3.dims(), vec![1, 3, 3, 1]);
        let s4 = hamming_sectors(4).unwrap();
        assert_eq!(s4.dims(), vec![1, 4, 6, 4, 1]);
        assert_eq!(s4.dims().iter().sum::<usize>(), 16);
    }

    #[test]
    fn sectors_match_binomials_and_popcount() {
        for n in 1..=8 {
            let basis = hamming_sectors(n).unwrap();
            for (k, d) in basis.dims().iter().enumerate() {
                assert_eq!(*d as u128, binomial(n, k));
            }
            for a in 0..(1usize << n) {
                assert_eq!(basis.sector_of(a), a.count_ones() as usize);
                assert_eq!(
                    basis.z_eigenvalue(basis.sector_of(a)),
                    n as i64 - 2 * (a.count_ones() as i64)
                );
            }
            // each index appears in exactly one sector, sorted ascending
            let mut seen = vec![false; 1 << n];
            for k in 0..=n {
                let idx = basis.indices_of(k);
                assert!(idx.windows(2).all(|w| w[0] < w[1]));
                for &i in idx {
                    assert!(!seen[i]);
                    seen[i] = true;
                }
            }
            assert!(seen.iter().all(|&b| b));
        }
    }

    #[test]
    fn sector_capacity_error() {
        assert!(matches!(
            hamming_sectors(MAX_DENSE_ANCILLA + 1),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn eigvals_examples() {
        let diag = [[ONE, ZERO], [ZERO, c(-1.0, 0.0)]];
        assert_eq!(hermitian_2x2_eigvals(&diag).unwrap(), (1.0, -1.0));
        let zero = [[ZERO, ZERO], [ZERO, ZERO]];
        assert_eq!(hermitian_2x2_eigvals(&zero).unwrap(), (0.0, 0.0));
        let m = [
            [c(0.5, 0.0), c(-0.5, 0.0)],
            [c(-0.5, 0.0), c(-0.5, 0.0)],
        ];
        let (hi, lo) = hermitian_2x2_eigvals(&m).unwrap();
        let root = 0.5f64.sqrt();
        assert!((hi - root).abs() < 1e-12);
        assert!((lo + root).abs() < 1e-12);
    }

    #[test]
    fn eigvals_rejects_non_hermitian() {
        let m = [[ONE, c(0.3, 0.0)], [c(0.1, 0.0), ONE]];
        assert!(hermitian_2x2_eigvals(&m).is_err());
    }

    #[test]
    fn pure_state_conventions() {
        let psi = PureQubitState::new(0.5, std::f64::consts::FRAC_PI_2).unwrap();
        let amps = psi.amplitudes();
        assert!((amps[0].re - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((amps[1] - c(0.0, 0.5f64.sqrt())).norm() < 1e-15);
        // |alpha|^2 + |beta|^2 = 1 exactly by construction
        assert_eq!(psi.p() + (1.0 - psi.p()), 1.0);
        assert!(PureQubitState::new(1.2, 0.0).is_err());
        let wrapped = PureQubitState::new(0.3, 2.5 * TWO_PI).unwrap();
        assert!((wrapped.theta() - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn flipped_state_matches_matrix_action() {
        let psi = PureQubitState::new(0.3, 1.1).unwrap();
        let flipped = psi.flipped();
        let a = psi.amplitudes();
        // X|psi⟩ has amplitudes (beta, alpha); compare densities (phase-free)
        let direct = [[a[1] * a[1].conj(), a[1] * a[0].conj()], [
            a[0] * a[1].conj(),
            a[0] * a[0].conj(),
        ]];
        let viapure = flipped.density();
        for i in 0..2 {
            for j in 0..2 {
                assert!((direct[i][j] - viapure.entry(i, j)).norm() < 1e-14);
            }
        }
    }
}
