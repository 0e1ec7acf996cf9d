//! Gate channels and their error measures: the channel of an
//! implementation (unitary plus ancilla state), the ideal NOT channel, the
//! qubit trace distance in closed form with a spectral oracle, and the
//! worst-case-input search for the gate trace distance.

use crate::conservation::{extract_components, GateUnitary};
use crate::error::{Error, Result};
use crate::hilbert::{
    partial_trace_ancilla, tensor, PureQubitState, QubitDensity, StateVector, TWO_PI,
};
use crate::linalg::{hermitian_eigen, CMatrix, C64, ONE, ZERO};
use crate::policy::Tolerances;

/// Ancilla preparation of an implementation: a pure state or a mixed
/// density with its spectral decomposition recorded.
#[derive(Debug, Clone)]
pub enum AncillaState {
    Pure(StateVector),
    Mixed(AncillaDensity),
}

/// Mixed ancilla state, stored together with its eigendecomposition
/// (weights descending, eigenvectors orthonormal). The recorded rank is the
/// number of eigenvalues above the structural tolerance.
#[derive(Debug, Clone)]
pub struct AncillaDensity {
    dim: usize,
    weights: Vec<f64>,
    vectors: Vec<StateVector>,
}

impl AncillaDensity {
    /// Eigendecompose and validate an explicit density matrix.
    pub fn from_matrix(matrix: &CMatrix) -> Result<Self> {
        let tol = Tolerances::DEFAULT;
        let dim = matrix.dim();
        if (matrix.trace().re - 1.0).abs() > tol.validation
            || matrix.trace().im.abs() > tol.validation
        {
            return Err(Error::Validation(format!(
                "ancilla density trace {} differs from 1",
                matrix.trace()
            )));
        }
        let (eigs, vecs) = hermitian_eigen(matrix, tol.validation)?;
        if let Some(low) = eigs.last() {
            if *low < -tol.validation {
                return Err(Error::Validation(format!(
                    "ancilla density has negative eigenvalue {low}"
                )));
            }
        }
        let mut weights = Vec::new();
        let mut vectors = Vec::new();
        for (k, &w) in eigs.iter().enumerate() {
            if w > tol.structural {
                weights.push(w);
                vectors.push(StateVector::new(
                    (0..dim).map(|i| vecs[(i, k)]).collect(),
                )?);
            }
        }
        Ok(AncillaDensity {
            dim,
            weights,
            vectors,
        })
    }

    /// Build directly from a spectral ensemble (weights positive and
    /// summing to 1, vectors orthonormal).
    pub fn from_spectral(weights: Vec<f64>, vectors: Vec<StateVector>) -> Result<Self> {
        let tol = Tolerances::DEFAULT;
        if weights.len() != vectors.len() || weights.is_empty() {
            return Err(Error::Shape("weights and vectors must pair up".into()));
        }
        let dim = vectors[0].dim();
        if vectors.iter().any(|v| v.dim() != dim) {
            return Err(Error::Shape("mixed eigenvector dimensions".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > tol.validation || weights.iter().any(|&w| w <= 0.0) {
            return Err(Error::Validation(
                "weights must be positive and sum to 1".into(),
            ));
        }
        for i in 0..vectors.len() {
            for j in 0..=i {
                let ip = vectors[i].inner(&vectors[j]);
                let expect = if i == j { ONE } else { ZERO };
                if (ip - expect).norm() > tol.validation {
                    return Err(Error::Validation(
                        "spectral vectors are not orthonormal".into(),
                    ));
                }
            }
        }
        let mut order: Vec<usize> = (0..weights.len()).collect();
        order.sort_by(|&i, &j| weights[j].partial_cmp(&weights[i]).unwrap());
        Ok(AncillaDensity {
            dim,
            weights: order.iter().map(|&i| weights[i]).collect(),
            vectors: order.iter().map(|&i| vectors[i].clone()).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn vectors(&self) -> &[StateVector] {
        &self.vectors
    }

    pub fn matrix(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim);
        for (w, v) in self.weights.iter().zip(&self.vectors) {
            for i in 0..self.dim {
                for j in 0..self.dim {
                    m[(i, j)] += *w * v.amplitudes()[i] * v.amplitudes()[j].conj();
                }
            }
        }
        m
    }
}

/// A gate implementation: a joint unitary and an ancilla preparation.
#[derive(Debug, Clone)]
pub struct Implementation {
    n_ancilla: usize,
    unitary: GateUnitary,
    ancilla: AncillaState,
}

impl Implementation {
    pub fn new(n_ancilla: usize, unitary: GateUnitary, ancilla: AncillaState) -> Result<Self> {
        let half = 1usize << n_ancilla;
        if unitary.joint_dim() != 2 * half {
            return Err(Error::Shape(format!(
                "unitary joint dimension {} does not match {} ancilla qubits",
                unitary.joint_dim(),
                n_ancilla
            )));
        }
        if let GateUnitary::Dense(m) = &unitary {
            if !m.is_unitary(Tolerances::DEFAULT.validation) {
                return Err(Error::Validation("dense operator is not unitary".into()));
            }
        }
        match &ancilla {
            AncillaState::Pure(a) => {
                if a.dim() != half {
                    return Err(Error::Shape("ancilla dimension mismatch".into()));
                }
                if !a.is_normalized(Tolerances::DEFAULT.validation) {
                    return Err(Error::Validation("ancilla state is not normalized".into()));
                }
            }
            AncillaState::Mixed(d) => {
                if d.dim() != half {
                    return Err(Error::Shape("ancilla dimension mismatch".into()));
                }
            }
        }
        Ok(Implementation {
            n_ancilla,
            unitary,
            ancilla,
        })
    }

    pub fn n_ancilla(&self) -> usize {
        self.n_ancilla
    }

    pub fn unitary(&self) -> &GateUnitary {
        &self.unitary
    }

    pub fn ancilla(&self) -> &AncillaState {
        &self.ancilla
    }

    /// Ancilla ensemble as (weight, pure state) pairs.
    pub fn ancilla_ensemble(&self) -> Vec<(f64, StateVector)> {
        match &self.ancilla {
            AncillaState::Pure(a) => vec![(1.0, a.clone())],
            AncillaState::Mixed(d) => d
                .weights()
                .iter()
                .copied()
                .zip(d.vectors().iter().cloned())
                .collect(),
        }
    }
}

/// Channel output on a pure input: evolve the joint state and trace out the
/// ancilla; mixed ancillas mix the per-eigenvector channels.
pub fn apply_implementation(
    implementation: &Implementation,
    input: &PureQubitState,
) -> Result<QubitDensity> {
    let mut entries = [[ZERO; 2]; 2];
    for (weight, ancilla) in implementation.ancilla_ensemble() {
        let joint = tensor(&input.state_vector(), &ancilla)?;
        let evolved = implementation.unitary().apply(&joint)?;
        let rho = partial_trace_ancilla(&evolved, implementation.n_ancilla())?;
        for i in 0..2 {
            for j in 0..2 {
                entries[i][j] += weight * rho.entry(i, j);
            }
        }
    }
    QubitDensity::new(entries)
}

/// Ideal NOT channel on a pure input: X|ψ⟩⟨ψ|X.
pub fn ideal_not(input: &PureQubitState) -> QubitDensity {
    input.flipped().density()
}

/// Ideal NOT channel on a density matrix.
pub fn ideal_not_density(rho: &QubitDensity) -> QubitDensity {
    let e = rho.entries();
    QubitDensity::new([[e[1][1], e[1][0]], [e[0][1], e[0][0]]])
        .expect("conjugation by X preserves density validity")
}

/// Trace distance of two qubit densities in closed form:
/// sqrt(|δ01|^2 - δ00 δ11) with δ = ρ - σ (traceless).
///
/// Must agree with the eigenvalue oracle (|λ1| + |λ2|)/2 to the structural
/// tolerance; a radicand below -1e-12 reports corrupted inputs.
pub fn trace_distance_qubit(rho: &QubitDensity, sigma: &QubitDensity) -> Result<f64> {
    let d00 = rho.entry(0, 0).re - sigma.entry(0, 0).re;
    let d11 = rho.entry(1, 1).re - sigma.entry(1, 1).re;
    let d01 = rho.entry(0, 1) - sigma.entry(0, 1);
    let radicand = d01.norm_sqr() - d00 * d11;
    if radicand < -Tolerances::DEFAULT.structural {
        return Err(Error::Validation(format!(
            "trace-distance radicand {radicand} below tolerance; inputs are not a valid density pair"
        )));
    }
    Ok(radicand.max(0.0).sqrt())
}

/// sqrt(⟨ψ|ρ|ψ⟩), the fidelity of a state to a pure reference.
pub fn fidelity_to_pure(rho: &QubitDensity, psi: &PureQubitState) -> f64 {
    let amps = psi.amplitudes();
    let mut acc = ZERO;
    for i in 0..2 {
        for j in 0..2 {
            acc += amps[i].conj() * rho.entry(i, j) * amps[j];
        }
    }
    acc.re.clamp(0.0, 1.0).sqrt()
}

/// The four ancilla components of a gate action, U(|i⟩⊗|A⟩) =
/// Σ_j |j⟩⊗|comp(i, j)⟩, with the flip-failure weights ε0 = ‖comp(0,0)‖²
/// and ε1 = ‖comp(1,1)‖².
#[derive(Debug, Clone)]
pub struct ComponentDecomposition {
    a00: StateVector,
    a01: StateVector,
    a10: StateVector,
    a11: StateVector,
}

impl ComponentDecomposition {
    pub fn new(
        a00: StateVector,
        a01: StateVector,
        a10: StateVector,
        a11: StateVector,
    ) -> Result<Self> {
        let dim = a00.dim();
        if [&a01, &a10, &a11].iter().any(|v| v.dim() != dim) {
            return Err(Error::Shape("component dimensions differ".into()));
        }
        let tol = Tolerances::DEFAULT.validation;
        let row0 = a00.norm_sqr() + a01.norm_sqr();
        let row1 = a10.norm_sqr() + a11.norm_sqr();
        if (row0 - 1.0).abs() > tol || (row1 - 1.0).abs() > tol {
            return Err(Error::Validation(format!(
                "component norms violate unitarity: {row0}, {row1}"
            )));
        }
        Ok(ComponentDecomposition { a00, a01, a10, a11 })
    }

    pub fn a00(&self) -> &StateVector {
        &self.a00
    }
    pub fn a01(&self) -> &StateVector {
        &self.a01
    }
    pub fn a10(&self) -> &StateVector {
        &self.a10
    }
    pub fn a11(&self) -> &StateVector {
        &self.a11
    }

    /// ‖comp(0,0)‖²: probability weight of |0⟩ failing to flip.
    pub fn eps0(&self) -> f64 {
        self.a00.norm_sqr()
    }

    /// ‖comp(1,1)‖²: probability weight of |1⟩ failing to flip.
    pub fn eps1(&self) -> f64 {
        self.a11.norm_sqr()
    }

    /// ⟨comp(0,1)|comp(1,0)⟩ — overlap of the two flip components; the gate
    /// is coherent exactly when this is 1.
    pub fn flip_overlap(&self) -> C64 {
        self.a01.inner(&self.a10)
    }

    /// ⟨comp(1,1)|comp(0,0)⟩ — overlap of the two stay components.
    pub fn stay_overlap(&self) -> C64 {
        self.a11.inner(&self.a00)
    }

    /// ⟨comp(0,1)|comp(0,0)⟩.
    pub fn cross_overlap_0(&self) -> C64 {
        self.a01.inner(&self.a00)
    }

    /// ⟨comp(1,1)|comp(1,0)⟩.
    pub fn cross_overlap_1(&self) -> C64 {
        self.a11.inner(&self.a10)
    }

    /// ⟨comp(0,0)|comp(1,0)⟩ — both outputs on |0⟩.
    pub fn output0_overlap(&self) -> C64 {
        self.a00.inner(&self.a10)
    }

    /// ⟨comp(0,1)|comp(1,1)⟩ — both outputs on |1⟩.
    pub fn output1_overlap(&self) -> C64 {
        self.a01.inner(&self.a11)
    }
}

/// Closed-form output trace distance against the ideal NOT, written purely
/// in terms of the component inner products. Valid when the components come
/// from a genuine unitary (so the output difference is traceless).
pub fn distance_via_components(
    comp: &ComponentDecomposition,
    input: &PureQubitState,
) -> Result<f64> {
    let alpha = C64::new(input.alpha(), 0.0);
    let beta = input.beta();
    let asq = alpha.norm_sqr();
    let bsq = beta.norm_sqr();
    let ab = alpha.conj() * beta;

    let coherence = ab * (ONE - comp.flip_overlap())
        - alpha * beta.conj() * comp.stay_overlap()
        - asq * comp.cross_overlap_0()
        - bsq * comp.cross_overlap_1();
    let population =
        -asq * comp.eps0() + bsq * comp.eps1() - 2.0 * (ab * comp.output0_overlap()).re;
    Ok((coherence.norm_sqr() + population * population).sqrt())
}

fn arg_in_two_pi(z: C64) -> f64 {
    if z.norm() == 0.0 {
        // degenerate polar form: fix the phase at zero
        return 0.0;
    }
    let a = z.arg();
    if a < 0.0 {
        a + TWO_PI
    } else {
        a
    }
}

/// Equator input state guaranteed to score at least
/// (1/2)|1 - ⟨comp(0,1)|comp(1,0)⟩| against the ideal NOT.
///
/// Writes the three component combinations in polar form r e^{iφ} and picks
/// the equator phase that aligns the dominant interference term.
pub fn analytic_witness(comp: &ComponentDecomposition) -> PureQubitState {
    let z1 = ONE - comp.flip_overlap();
    let z2 = -comp.stay_overlap();
    let z3 = -comp.cross_overlap_0() - comp.cross_overlap_1();
    let phi1 = arg_in_two_pi(z1);
    let theta = if z2.norm() >= z3.norm() {
        0.5 * (arg_in_two_pi(z2) - phi1)
    } else {
        arg_in_two_pi(z3) - phi1
    };
    PureQubitState::new(0.5, theta).expect("witness parameters are always valid")
}

/// Grid and refinement controls for the worst-case input search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub grid_p: usize,
    pub grid_theta: usize,
    pub refine_tol: f64,
    pub max_refine_iters: usize,
}

impl SearchConfig {
    pub fn new(
        grid_p: usize,
        grid_theta: usize,
        refine_tol: f64,
        max_refine_iters: usize,
    ) -> Result<Self> {
        if grid_p < 8 || grid_theta < 8 {
            return Err(Error::Validation(
                "grid must sample at least 8 points per axis".into(),
            ));
        }
        if !(refine_tol > 0.0) {
            return Err(Error::Validation("refinement tolerance must be positive".into()));
        }
        Ok(SearchConfig {
            grid_p,
            grid_theta,
            refine_tol,
            max_refine_iters,
        })
    }
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            grid_p: 64,
            grid_theta: 128,
            refine_tol: 1e-10,
            max_refine_iters: 200,
        }
    }
}

/// Precomputed bilinear form of a gate channel.
///
/// For each ancilla ensemble member, the evolved basis states
/// v_i = U(|i⟩⊗|φ⟩) determine the channel through the partial-trace Gram
/// matrices G[i][j][s][s'] = Σ_a v_i[s,a] conj(v_j[s',a]); the output on any
/// input follows without touching the joint space again.
#[derive(Debug, Clone)]
pub struct PreparedChannel {
    gram: [[[[C64; 2]; 2]; 2]; 2],
}

impl PreparedChannel {
    pub fn new(implementation: &Implementation) -> Result<Self> {
        let half = 1usize << implementation.n_ancilla();
        let mut gram = [[[[ZERO; 2]; 2]; 2]; 2];
        for (weight, ancilla) in implementation.ancilla_ensemble() {
            let mut evolved = Vec::with_capacity(2);
            for s in 0..2 {
                let joint = tensor(&StateVector::basis(2, s)?, &ancilla)?;
                evolved.push(implementation.unitary().apply(&joint)?);
            }
            for i in 0..2 {
                for j in 0..2 {
                    for s in 0..2 {
                        for s2 in 0..2 {
                            let mut acc = ZERO;
                            for a in 0..half {
                                acc += evolved[i].amplitudes()[s * half + a]
                                    * evolved[j].amplitudes()[s2 * half + a].conj();
                            }
                            gram[i][j][s][s2] += weight * acc;
                        }
                    }
                }
            }
        }
        Ok(PreparedChannel { gram })
    }

    /// Assemble directly from Gram data (used by the sparse chain path,
    /// where the joint space is never materialized in full).
    pub fn from_gram(gram: [[[[C64; 2]; 2]; 2]; 2]) -> Self {
        PreparedChannel { gram }
    }

    /// Build from the two evolved joint basis vectors U(|0⟩⊗|A⟩) and
    /// U(|1⟩⊗|A⟩) of a pure-ancilla implementation.
    pub fn from_evolved_basis(v0: &StateVector, v1: &StateVector) -> Result<Self> {
        if v0.dim() != v1.dim() || v0.dim() % 2 != 0 {
            return Err(Error::Shape(
                "evolved basis vectors must share an even dimension".into(),
            ));
        }
        let half = v0.dim() / 2;
        let pair = [v0, v1];
        let mut gram = [[[[ZERO; 2]; 2]; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for s in 0..2 {
                    for s2 in 0..2 {
                        let mut acc = ZERO;
                        for a in 0..half {
                            acc += pair[i].amplitudes()[s * half + a]
                                * pair[j].amplitudes()[s2 * half + a].conj();
                        }
                        gram[i][j][s][s2] = acc;
                    }
                }
            }
        }
        Ok(PreparedChannel { gram })
    }

    pub fn output(&self, input: &PureQubitState) -> QubitDensity {
        let amps = input.amplitudes();
        self.output_from_coefficients(&amps)
    }

    fn output_from_coefficients(&self, c: &[C64; 2]) -> QubitDensity {
        let mut entries = [[ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let w = c[i] * c[j].conj();
                if w == ZERO {
                    continue;
                }
                for s in 0..2 {
                    for s2 in 0..2 {
                        entries[s][s2] += w * self.gram[i][j][s][s2];
                    }
                }
            }
        }
        QubitDensity::new(entries).expect("prepared channel output is a valid density")
    }

    /// Linear extension to arbitrary input densities.
    pub fn apply_density(&self, rho: &QubitDensity) -> QubitDensity {
        let mut entries = [[ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let w = rho.entry(i, j);
                for s in 0..2 {
                    for s2 in 0..2 {
                        entries[s][s2] += w * self.gram[i][j][s][s2];
                    }
                }
            }
        }
        QubitDensity::new(entries).expect("prepared channel output is a valid density")
    }
}

fn objective(channel: &PreparedChannel, input: &PureQubitState) -> f64 {
    let out = channel.output(input);
    let ideal = ideal_not(input);
    trace_distance_qubit(&out, &ideal).expect("outputs of a channel form a valid density pair")
}

const GOLDEN_INV: f64 = 0.618_033_988_749_894_9;
const COORD_TOL: f64 = 1e-13;

fn golden_max(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let mut x1 = hi - GOLDEN_INV * (hi - lo);
    let mut x2 = lo + GOLDEN_INV * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if hi - lo <= COORD_TOL {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN_INV * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN_INV * (hi - lo);
            f1 = f(x1);
        }
    }
    let mid = 0.5 * (lo + hi);
    (mid, f(mid))
}

fn refine(
    channel: &PreparedChannel,
    start: PureQubitState,
    dp: f64,
    dtheta: f64,
    cfg: &SearchConfig,
) -> (f64, PureQubitState) {
    let mut p = start.p();
    let mut theta = start.theta();
    let mut best = objective(channel, &start);
    for _ in 0..cfg.max_refine_iters {
        let (np, _) = golden_max(
            |x| objective(channel, &PureQubitState::new(x, theta).unwrap()),
            (p - dp).max(0.0),
            (p + dp).min(1.0),
        );
        p = np;
        let (ntheta, _) = golden_max(
            |t| objective(channel, &PureQubitState::new(p, t).unwrap()),
            theta - dtheta,
            theta + dtheta,
        );
        theta = ntheta;
        let value = objective(channel, &PureQubitState::new(p, theta).unwrap());
        if value - best <= cfg.refine_tol {
            best = best.max(value);
            break;
        }
        best = value;
    }
    (best, PureQubitState::new(p, theta).unwrap())
}

/// Maximize the output trace distance against the ideal NOT over pure
/// inputs: exhaustive (p, θ) grid, then coordinate refinement seeded from
/// the best grid cell and from every extra seed (analytic witnesses).
///
/// Deterministic for a fixed configuration. The returned value is never
/// below the objective at any seed.
pub fn maximize_distance(
    channel: &PreparedChannel,
    cfg: &SearchConfig,
    seeds: &[PureQubitState],
) -> (f64, PureQubitState) {
    let mut best = f64::NEG_INFINITY;
    let mut best_state = PureQubitState::ket0();
    for i in 0..cfg.grid_p {
        let p = i as f64 / (cfg.grid_p - 1) as f64;
        for j in 0..cfg.grid_theta {
            let theta = TWO_PI * j as f64 / cfg.grid_theta as f64;
            let state = PureQubitState::new(p, theta).unwrap();
            let value = objective(channel, &state);
            if value > best {
                best = value;
                best_state = state;
            }
        }
    }
    let dp = 1.0 / (cfg.grid_p - 1) as f64;
    let dtheta = TWO_PI / cfg.grid_theta as f64;
    let mut candidates = vec![best_state];
    candidates.extend_from_slice(seeds);
    let mut result = (best, best_state);
    for seed in candidates {
        let direct = objective(channel, &seed);
        if direct > result.0 {
            result = (direct, seed);
        }
        let (value, state) = refine(channel, seed, dp, dtheta, cfg);
        if value > result.0 {
            result = (value, state);
        }
    }
    result
}

/// Worst-case output trace distance of an implementation against the ideal
/// NOT, with the maximizing input state.
pub fn gate_trace_distance(
    implementation: &Implementation,
    cfg: &SearchConfig,
) -> Result<(f64, PureQubitState)> {
    let channel = PreparedChannel::new(implementation)?;
    let mut seeds = Vec::new();
    for (_, ancilla) in implementation.ancilla_ensemble() {
        let comp = extract_components(implementation.unitary(), &ancilla)?;
        seeds.push(analytic_witness(&comp));
    }
    Ok(maximize_distance(&channel, cfg, &seeds))
}
