//! Explicit implementations: the optimal classically complete chain
//! construction, the uniform-ancilla example, and purification of
//! mixed-ancilla implementations. The chain keeps a sparse evaluation path
//! so large registers never materialize the joint space.

use crate::channels::{
    apply_implementation, ideal_not, maximize_distance, trace_distance_qubit, AncillaState,
    Implementation, PreparedChannel, SearchConfig,
};
use crate::conservation::{assemble_conservative, AncillaCoefficients, GateUnitary};
use crate::error::{Error, Result};
use crate::hilbert::{
    hamming_sectors, tensor, PureQubitState, QubitDensity, StateVector, MAX_DENSE_ANCILLA,
};
use crate::linalg::{CMatrix, C64, ONE, ZERO};
use crate::policy::Tolerances;
use crate::spectral::max_overlap_sum;

/// Basis index of the canonical representative of sector n: the bitstring
/// with n ones packed at the least significant positions.
pub fn canonical_rep_index(sector: usize) -> usize {
    (1usize << sector) - 1
}

fn canonical_rep(n_qubits: usize, sector: usize) -> Result<StateVector> {
    StateVector::basis(1 << n_qubits, canonical_rep_index(sector))
}

fn attach_canonical_reps(
    n_qubits: usize,
    magnitudes: Vec<f64>,
) -> Result<AncillaCoefficients> {
    let coeffs = AncillaCoefficients::from_magnitudes(n_qubits, magnitudes.clone())?;
    if n_qubits > MAX_DENSE_ANCILLA {
        // beyond the dense limit the profile alone is the deliverable
        return Ok(coeffs);
    }
    let amplitudes: Vec<C64> = magnitudes.iter().map(|&m| C64::new(m, 0.0)).collect();
    let mut reps = Vec::with_capacity(magnitudes.len());
    for (sector, &m) in magnitudes.iter().enumerate() {
        if m > 0.0 {
            reps.push(Some(canonical_rep(n_qubits, sector)?));
        } else {
            reps.push(None);
        }
    }
    Ok(AncillaCoefficients::from_parts(n_qubits, amplitudes, reps))
}

/// Ancilla coefficient profile that minimizes the fixed-ancilla error floor
/// among classically complete preparations: the top tridiagonal eigenvector
/// placed on the odd-subscript chain, endpoints zero.
///
/// The overlap sum of the result is cos(2π/(N+2)) for even N and
/// cos(2π/(N+1)) for odd N. Representatives are the canonical sector basis
/// vectors when N is within the dense limit.
pub fn optimal_ancilla(n_ancilla: usize) -> Result<AncillaCoefficients> {
    if n_ancilla < 2 {
        return Err(Error::Domain(
            "classically complete construction needs N >= 2".into(),
        ));
    }
    let (_, profile) = max_overlap_sum(n_ancilla, true)?;
    attach_canonical_reps(n_ancilla, profile.magnitudes())
}

/// Uniform sector profile a_n = 1/sqrt(N+1) on the canonical
/// representatives; its fixed-ancilla error floor is exactly 1/(N+1).
pub fn uniform_ancilla(n_ancilla: usize) -> Result<AncillaCoefficients> {
    if n_ancilla < 1 {
        return Err(Error::Domain("need at least one ancilla qubit".into()));
    }
    let q = 1.0 / ((n_ancilla + 1) as f64).sqrt();
    attach_canonical_reps(n_ancilla, vec![q; n_ancilla + 1])
}

/// The explicit optimal classically complete implementation.
///
/// The unitary is the sector-ladder permutation
/// |0⟩⊗|rep(n)⟩ ↔ |1⟩⊗|rep(n-1)⟩ for n = 1..N, identity on every other
/// basis vector; the ancilla coefficients sit on the odd-subscript chain.
/// Both are stored implicitly (coefficients plus the canonical-rep rule),
/// so evaluation scales with N rather than 2^N.
#[derive(Debug, Clone)]
pub struct ChainImplementation {
    n_ancilla: usize,
    coeffs: Vec<f64>,
}

impl ChainImplementation {
    /// Build from explicit chain coefficients (length N+1, endpoints zero,
    /// unit norm).
    pub fn new(n_ancilla: usize, coeffs: Vec<f64>) -> Result<Self> {
        if n_ancilla < 2 {
            return Err(Error::Domain("chain construction needs N >= 2".into()));
        }
        if coeffs.len() != n_ancilla + 1 {
            return Err(Error::Shape(format!(
                "expected {} coefficients, got {}",
                n_ancilla + 1,
                coeffs.len()
            )));
        }
        let tol = Tolerances::DEFAULT.structural;
        if coeffs[0].abs() > tol || coeffs[n_ancilla].abs() > tol {
            return Err(Error::Validation(
                "chain endpoints must vanish for a classically complete preparation".into(),
            ));
        }
        let norm: f64 = coeffs.iter().map(|a| a * a).sum();
        if (norm - 1.0).abs() > tol {
            return Err(Error::Validation(format!(
                "chain coefficients have norm^2 = {norm}"
            )));
        }
        Ok(ChainImplementation { n_ancilla, coeffs })
    }

    pub fn n_ancilla(&self) -> usize {
        self.n_ancilla
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Σ a_{n+2} a_n, which is exactly the flip-component overlap
    /// ⟨comp(0,1)|comp(1,0)⟩ of this implementation.
    pub fn flip_overlap(&self) -> f64 {
        (0..self.coeffs.len() - 2)
            .map(|n| self.coeffs[n + 2] * self.coeffs[n])
            .sum()
    }

    /// Dense ancilla state Σ a_n |rep(n)⟩ (within the dense limit).
    pub fn ancilla_vector(&self) -> Result<StateVector> {
        self.guard_dense()?;
        let dim = 1usize << self.n_ancilla;
        let mut out = StateVector::zero_vector(dim)?;
        for (sector, &a) in self.coeffs.iter().enumerate() {
            out.amplitudes_mut()[canonical_rep_index(sector)] = C64::new(a, 0.0);
        }
        Ok(out)
    }

    fn guard_dense(&self) -> Result<()> {
        if self.n_ancilla > MAX_DENSE_ANCILLA {
            return Err(Error::Capacity {
                what: "dense chain expansion",
                dim: usize::MAX,
                limit: 1 << MAX_DENSE_ANCILLA,
            });
        }
        Ok(())
    }

    /// Apply the ladder permutation to a dense joint state.
    pub fn apply_joint_dense(&self, v: &StateVector) -> Result<StateVector> {
        self.guard_dense()?;
        let half = 1usize << self.n_ancilla;
        if v.dim() != 2 * half {
            return Err(Error::Shape(format!(
                "joint dimension {} does not match {} ancilla qubits",
                v.dim(),
                self.n_ancilla
            )));
        }
        let mut out = v.amplitudes().to_vec();
        for m in 0..self.n_ancilla {
            let i0 = canonical_rep_index(m + 1);
            let i1 = half + canonical_rep_index(m);
            out.swap(i0, i1);
        }
        StateVector::new(out)
    }

    /// Materialize the ladder permutation as a block unitary (dense limit).
    pub fn to_block_unitary(&self) -> Result<crate::conservation::BlockUnitary> {
        self.guard_dense()?;
        let n = self.n_ancilla;
        let sectors = hamming_sectors(n)?;
        let mut blocks = Vec::with_capacity(n + 2);
        for k in 0..=n + 1 {
            let s0 = if k <= n { sectors.dim_of(k) } else { 0 };
            let s1 = if k >= 1 { sectors.dim_of(k - 1) } else { 0 };
            let dim = s0 + s1;
            let mut block = CMatrix::identity(dim);
            if k >= 1 && k <= n {
                // canonical representatives sit first in both halves of the
                // eigenspace basis; the ladder swaps them
                let a = 0;
                let b = s0;
                block[(a, a)] = ZERO;
                block[(b, b)] = ZERO;
                block[(a, b)] = ONE;
                block[(b, a)] = ONE;
            }
            blocks.push(block);
        }
        assemble_conservative(n, blocks)
    }

    /// Package as a generic implementation (dense limit).
    pub fn to_implementation(&self) -> Result<Implementation> {
        Implementation::new(
            self.n_ancilla,
            GateUnitary::Block(self.to_block_unitary()?),
            AncillaState::Pure(self.ancilla_vector()?),
        )
    }

    /// Channel form that never touches the joint space: the evolved basis
    /// states live in the 2(N+1)-dimensional ladder subspace, so the Gram
    /// data reduces to the flip overlap.
    pub fn prepared_channel(&self) -> PreparedChannel {
        let w = C64::new(self.flip_overlap(), 0.0);
        let mut gram = [[[[ZERO; 2]; 2]; 2]; 2];
        gram[0][0][1][1] = ONE;
        gram[1][1][0][0] = ONE;
        gram[0][1][1][0] = w;
        gram[1][0][0][1] = w;
        PreparedChannel::from_gram(gram)
    }

    /// Channel form built by evolving dense joint vectors (dense limit);
    /// agrees with the sparse path to rounding.
    pub fn prepared_channel_dense(&self) -> Result<PreparedChannel> {
        let ancilla = self.ancilla_vector()?;
        let v0 = self.apply_joint_dense(&tensor(&StateVector::basis(2, 0)?, &ancilla)?)?;
        let v1 = self.apply_joint_dense(&tensor(&StateVector::basis(2, 1)?, &ancilla)?)?;
        PreparedChannel::from_evolved_basis(&v0, &v1)
    }

    /// Closed-form channel output.
    pub fn evaluate(&self, input: &PureQubitState) -> QubitDensity {
        evaluate_chain(self, input)
    }

    /// Worst-case output distance against the ideal NOT, searched on the
    /// sparse channel.
    pub fn worst_case_distance(&self, cfg: &SearchConfig) -> (f64, PureQubitState) {
        let channel = self.prepared_channel();
        let seed = PureQubitState::plus();
        maximize_distance(&channel, cfg, &[seed])
    }
}

/// The optimal classically complete implementation for N >= 2.
pub fn optimal_unitary(n_ancilla: usize) -> Result<ChainImplementation> {
    let coeffs = optimal_ancilla(n_ancilla)?;
    ChainImplementation::new(n_ancilla, coeffs.magnitudes())
}

/// Closed-form output of a chain implementation: populations flip exactly,
/// the coherence is scaled by the flip overlap.
pub fn evaluate_chain(chain: &ChainImplementation, input: &PureQubitState) -> QubitDensity {
    let alpha = C64::new(input.alpha(), 0.0);
    let beta = input.beta();
    let w = chain.flip_overlap();
    let off = alpha.conj() * beta * w;
    QubitDensity::new([
        [C64::new(beta.norm_sqr(), 0.0), off],
        [off.conj(), C64::new(alpha.norm_sqr(), 0.0)],
    ])
    .expect("chain output is a valid density")
}

/// Purification of a (possibly mixed) implementation.
#[derive(Debug, Clone)]
pub struct PurificationPlan {
    pub rank: usize,
    pub weights: Vec<f64>,
    pub eigenvectors: Vec<StateVector>,
    pub extension_kets: Vec<StateVector>,
    pub extended_state: StateVector,
    pub extension_qubits: usize,
    pub n_prime: usize,
}

/// Replace a mixed ancilla by a pure one on ceil(log2 rank) extra qubits.
///
/// The new unitary acts as the original on the system-plus-ancilla factor
/// and as identity on the extension, so the channel is unchanged and the
/// total-Z commutator stays zero; both facts are validated numerically by
/// the callers' audits rather than assumed.
pub fn purify(implementation: &Implementation) -> Result<(Implementation, PurificationPlan)> {
    let ensemble = implementation.ancilla_ensemble();
    let rank = ensemble.len();
    let extension_qubits = if rank <= 1 {
        0
    } else {
        (rank - 1).ilog2() as usize + 1
    };
    let ext_dim = 1usize << extension_qubits;
    let half = 1usize << implementation.n_ancilla();

    let mut extension_kets = Vec::with_capacity(rank);
    let mut extended = StateVector::zero_vector(half * ext_dim)?;
    for (j, (weight, vector)) in ensemble.iter().enumerate() {
        let ket = StateVector::basis(ext_dim, j)?;
        let term = tensor(vector, &ket)?.scaled(C64::new(weight.sqrt(), 0.0));
        extended = extended.add(&term);
        extension_kets.push(ket);
    }

    let tol = Tolerances::DEFAULT;
    if !extended.is_normalized(tol.structural) {
        return Err(Error::Validation(
            "purified ancilla state failed to normalize".into(),
        ));
    }
    // tracing out the extension must reproduce the original ancilla state
    let mut worst = 0.0f64;
    for a in 0..half {
        for b in 0..half {
            let mut reduced = ZERO;
            for x in 0..ext_dim {
                reduced += extended.amplitudes()[a * ext_dim + x]
                    * extended.amplitudes()[b * ext_dim + x].conj();
            }
            let mut original = ZERO;
            for (weight, vector) in &ensemble {
                original += *weight * vector.amplitudes()[a] * vector.amplitudes()[b].conj();
            }
            worst = worst.max((reduced - original).norm());
        }
    }
    if worst > tol.validation {
        return Err(Error::Validation(format!(
            "purification does not reduce to the original ancilla (residual {worst})"
        )));
    }

    let unitary = if extension_qubits == 0 {
        implementation.unitary().clone()
    } else {
        GateUnitary::Extended {
            inner: Box::new(implementation.unitary().clone()),
            extension_qubits,
        }
    };
    let n_prime = implementation.n_ancilla() + extension_qubits;
    let pure = Implementation::new(n_prime, unitary, AncillaState::Pure(extended.clone()))?;
    let plan = PurificationPlan {
        rank,
        weights: ensemble.iter().map(|(w, _)| *w).collect(),
        eigenvectors: ensemble.into_iter().map(|(_, v)| v).collect(),
        extension_kets,
        extended_state: extended,
        extension_qubits,
        n_prime,
    };
    Ok((pure, plan))
}

/// True when the channel maps |0⟩ to |1⟩⟨1| and |1⟩ to |0⟩⟨0| within `tol`.
pub fn is_classically_complete(implementation: &Implementation, tol: f64) -> Result<bool> {
    let out0 = apply_implementation(implementation, &PureQubitState::ket0())?;
    let out1 = apply_implementation(implementation, &PureQubitState::ket1())?;
    let d0 = trace_distance_qubit(&out0, &ideal_not(&PureQubitState::ket0()))?;
    let d1 = trace_distance_qubit(&out1, &ideal_not(&PureQubitState::ket1()))?;
    Ok(d0 <= tol && d1 <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::AncillaDensity;
    use crate::conservation::{commutator_norm, component_bound, extract_components};
    use crate::spectral::cos_pi_over;
    use std::f64::consts::PI;

    #[test]
    fn optimal_ancilla_small_cases() {
        let a2 = optimal_ancilla(2).unwrap();
        assert_eq!(a2.magnitudes(), vec![0.0, 1.0, 0.0]);

        let a4 = optimal_ancilla(4).unwrap();
        let mags = a4.magnitudes();
        let s = 0.5f64.sqrt();
        assert!((mags[1] - s).abs() < 1e-12);
        assert!((mags[3] - s).abs() < 1e-12);
        assert_eq!(mags[0] + mags[2] + mags[4], 0.0);

        assert!(optimal_ancilla(1).is_err());
    }

    #[test]
    fn optimal_ancilla_profile_is_sine_shaped() {
        let a = optimal_ancilla(100).unwrap();
        let mags = a.magnitudes();
        let denom = (PI / 51.0).sin();
        let scale: f64 = (0..50)
            .map(|j| ((j as f64 + 1.0) * PI / 51.0).sin() / denom)
            .map(|w| w * w)
            .sum::<f64>()
            .sqrt();
        for j in 0..50 {
            let expect = ((j as f64 + 1.0) * PI / 51.0).sin() / denom / scale;
            assert!((mags[2 * j + 1] - expect).abs() < 1e-12, "entry {}", 2 * j + 1);
        }
        for j in 0..=50 {
            assert_eq!(mags[2 * j], 0.0);
        }
        // peak sits at the middle of the odd chain
        let peak = mags
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert!(peak == 49 || peak == 51);
    }

    #[test]
    fn optimal_overlap_hits_closed_form() {
        for n in 2..=20 {
            let chain = optimal_unitary(n).unwrap();
            let expect = if n % 2 == 0 {
                cos_pi_over((n as u64 + 2) / 2)
            } else {
                cos_pi_over((n as u64 + 1) / 2)
            };
            assert!(
                (chain.flip_overlap() - expect).abs() < 1e-12,
                "N = {n}: {} vs {expect}",
                chain.flip_overlap()
            );
        }
    }

    #[test]
    fn ladder_permutation_at_n2() {
        let chain = optimal_unitary(2).unwrap();
        let u = GateUnitary::Block(chain.to_block_unitary().unwrap());
        // |0⟩⊗rep(1) -> |1⟩⊗rep(0)
        let out = u.apply(&StateVector::basis(8, 1).unwrap()).unwrap();
        assert!((out.amplitudes()[4] - ONE).norm() < 1e-15);
        // |1⟩⊗rep(1) -> |0⟩⊗rep(2)
        let out = u.apply(&StateVector::basis(8, 4 + 1).unwrap()).unwrap();
        assert!((out.amplitudes()[3] - ONE).norm() < 1e-15);
        // untouched basis vector: |0⟩⊗|10⟩ (sector 1, non-canonical)
        let out = u.apply(&StateVector::basis(8, 2).unwrap()).unwrap();
        assert!((out.amplitudes()[2] - ONE).norm() < 1e-15);
    }

    #[test]
    fn chain_is_conservative() {
        for n in 2..=8 {
            let chain = optimal_unitary(n).unwrap();
            let u = GateUnitary::Block(chain.to_block_unitary().unwrap());
            let norm = commutator_norm(&u).unwrap();
            assert!(norm <= 1e-12, "N = {n}: commutator {norm}");
        }
    }

    #[test]
    fn chain_components_have_unit_flip_weight() {
        let chain = optimal_unitary(4).unwrap();
        let imp = chain.to_implementation().unwrap();
        let comp = extract_components(imp.unitary(), &chain.ancilla_vector().unwrap()).unwrap();
        assert!(comp.eps0() < 1e-12);
        assert!(comp.eps1() < 1e-12);
        assert!((comp.a01().norm() - 1.0).abs() < 1e-12);
        assert!((comp.a10().norm() - 1.0).abs() < 1e-12);
        assert!((comp.flip_overlap().re - chain.flip_overlap()).abs() < 1e-12);
        assert!((component_bound(&comp) - 0.5 * (1.0 - chain.flip_overlap())).abs() < 1e-12);
    }

    #[test]
    fn evaluate_chain_examples() {
        let chain = optimal_unitary(4).unwrap();
        let out = chain.evaluate(&PureQubitState::ket0());
        assert!((out.entry(1, 1) - ONE).norm() < 1e-15);
        let out = chain.evaluate(&PureQubitState::ket1());
        assert!((out.entry(0, 0) - ONE).norm() < 1e-15);
        let out = chain.evaluate(&PureQubitState::plus());
        assert!((out.entry(0, 0).re - 0.5).abs() < 1e-15);
        assert!((out.entry(0, 1).re - 0.25).abs() < 1e-12);
        assert!(out.entry(0, 1).im.abs() < 1e-15);
    }

    #[test]
    fn chain_is_classically_complete_identity_is_not() {
        let chain = optimal_unitary(3).unwrap();
        let imp = chain.to_implementation().unwrap();
        assert!(is_classically_complete(&imp, 1e-10).unwrap());

        let sectors_identity = {
            let sectors = hamming_sectors(2).unwrap();
            let blocks: Vec<CMatrix> = (0..=3)
                .map(|k| {
                    let mut d = 0;
                    if k <= 2 {
                        d += sectors.dim_of(k);
                    }
                    if k >= 1 {
                        d += sectors.dim_of(k - 1);
                    }
                    CMatrix::identity(d)
                })
                .collect();
            assemble_conservative(2, blocks).unwrap()
        };
        let identity_imp = Implementation::new(
            2,
            GateUnitary::Block(sectors_identity),
            AncillaState::Pure(StateVector::basis(4, 0).unwrap()),
        )
        .unwrap();
        assert!(!is_classically_complete(&identity_imp, 1e-10).unwrap());
    }

    #[test]
    fn bit_flip_on_system_is_classically_complete_swap_is_not() {
        // X on S alone does flip both basis states (though it breaks the
        // conservation law)
        let x = CMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]).unwrap();
        let ximp = Implementation::new(
            1,
            GateUnitary::Dense(x.kron(&CMatrix::identity(2))),
            AncillaState::Pure(StateVector::basis(2, 1).unwrap()),
        )
        .unwrap();
        assert!(is_classically_complete(&ximp, 1e-10).unwrap());

        // SWAP replaces the system by the ancilla state: |1⟩ stays |1⟩
        let mut swap = CMatrix::zeros(4);
        swap[(0, 0)] = ONE;
        swap[(1, 2)] = ONE;
        swap[(2, 1)] = ONE;
        swap[(3, 3)] = ONE;
        let swap_imp = Implementation::new(
            1,
            GateUnitary::Dense(swap),
            AncillaState::Pure(StateVector::basis(2, 1).unwrap()),
        )
        .unwrap();
        assert!(!is_classically_complete(&swap_imp, 1e-10).unwrap());
    }

    #[test]
    fn uniform_ancilla_examples() {
        let a1 = uniform_ancilla(1).unwrap();
        let s = 0.5f64.sqrt();
        let mags = a1.magnitudes();
        assert!((mags[0] - s).abs() < 1e-15);
        assert!((mags[1] - s).abs() < 1e-15);

        let a3 = uniform_ancilla(3).unwrap();
        assert!((a3.fixed_ancilla_bound() - 0.25).abs() < 1e-12);
        let a9 = uniform_ancilla(9).unwrap();
        assert!((a9.fixed_ancilla_bound() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn purify_rank_one_is_trivial() {
        let chain = optimal_unitary(2).unwrap();
        let imp = chain.to_implementation().unwrap();
        let (pure, plan) = purify(&imp).unwrap();
        assert_eq!(plan.rank, 1);
        assert_eq!(plan.extension_qubits, 0);
        assert_eq!(plan.n_prime, 2);
        for input in PureQubitState::tomographic_six() {
            let a = apply_implementation(&imp, &input).unwrap();
            let b = apply_implementation(&pure, &input).unwrap();
            assert!(a.max_entry_distance(&b) < 1e-12);
        }
    }

    #[test]
    fn purify_maximally_mixed_single_qubit() {
        let mut swap = CMatrix::zeros(4);
        swap[(0, 0)] = ONE;
        swap[(1, 2)] = ONE;
        swap[(2, 1)] = ONE;
        swap[(3, 3)] = ONE;
        let half = CMatrix::from_rows(&[
            vec![C64::new(0.5, 0.0), ZERO],
            vec![ZERO, C64::new(0.5, 0.0)],
        ])
        .unwrap();
        let imp = Implementation::new(
            1,
            GateUnitary::Dense(swap),
            AncillaState::Mixed(AncillaDensity::from_matrix(&half).unwrap()),
        )
        .unwrap();
        let (pure, plan) = purify(&imp).unwrap();
        assert_eq!(plan.rank, 2);
        assert_eq!(plan.extension_qubits, 1);
        assert_eq!(plan.n_prime, 2);
        let amps = plan.extended_state.amplitudes();
        let s = 0.5f64.sqrt();
        assert!((amps[0].norm() - s).abs() < 1e-12);
        assert!((amps[3].norm() - s).abs() < 1e-12);
        assert!(amps[1].norm() < 1e-12 && amps[2].norm() < 1e-12);
        for input in PureQubitState::tomographic_six() {
            let a = apply_implementation(&imp, &input).unwrap();
            let b = apply_implementation(&pure, &input).unwrap();
            assert!(a.max_entry_distance(&b) < 1e-10);
        }
    }

    #[test]
    fn purify_rank_three_needs_two_extension_qubits() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(42);
        let basis = crate::linalg::haar_unitary(4, &mut rng);
        let vectors: Vec<StateVector> = (0..3)
            .map(|k| StateVector::new((0..4).map(|i| basis[(i, k)]).collect()).unwrap())
            .collect();
        let density = AncillaDensity::from_spectral(vec![0.5, 0.3, 0.2], vectors).unwrap();
        let u = crate::conservation::random_conservative(2, 9).unwrap();
        let imp =
            Implementation::new(2, GateUnitary::Block(u), AncillaState::Mixed(density)).unwrap();
        let (pure, plan) = purify(&imp).unwrap();
        assert_eq!(plan.rank, 3);
        assert_eq!(plan.extension_qubits, 2);
        assert_eq!(plan.n_prime, 4);
        assert!(commutator_norm(pure.unitary()).unwrap() <= 1e-12);
    }

    #[test]
    fn chain_channel_examples_at_n2() {
        let chain = optimal_unitary(2).unwrap();
        let imp = chain.to_implementation().unwrap();
        let out = apply_implementation(&imp, &PureQubitState::ket0()).unwrap();
        assert!((out.entry(1, 1) - ONE).norm() < 1e-12);
        // the two flip components are orthogonal at N = 2, so the coherence
        // dies completely on an equator input
        let out = apply_implementation(&imp, &PureQubitState::plus()).unwrap();
        assert!((out.entry(0, 0).re - 0.5).abs() < 1e-12);
        assert!((out.entry(1, 1).re - 0.5).abs() < 1e-12);
        assert!(out.entry(0, 1).norm() < 1e-12);
    }

    #[test]
    fn witness_scores_the_chain_floor() {
        use crate::channels::{analytic_witness, distance_via_components};
        let chain = optimal_unitary(4).unwrap();
        let imp = chain.to_implementation().unwrap();
        let comp = extract_components(imp.unitary(), &chain.ancilla_vector().unwrap()).unwrap();
        // flip overlap cos(pi/3) = 1/2, so the floor is 1/4
        assert!((component_bound(&comp) - 0.25).abs() < 1e-12);
        let witness = analytic_witness(&comp);
        assert!((witness.p() - 0.5).abs() < 1e-15);
        assert!(witness.theta().abs() < 1e-12);
        let d = distance_via_components(&comp, &witness).unwrap();
        assert!(d >= 0.25 - 1e-12);
        assert!((d - 0.25).abs() < 1e-12);
    }

    #[test]
    fn sector_coefficients_of_the_optimal_ancilla() {
        let chain = optimal_unitary(4).unwrap();
        let sectors = hamming_sectors(4).unwrap();
        let coeffs = crate::conservation::ancilla_sector_coefficients(
            &chain.ancilla_vector().unwrap(),
            &sectors,
        )
        .unwrap();
        let mags = coeffs.magnitudes();
        let s = 0.5f64.sqrt();
        assert!((mags[1] - s).abs() < 1e-12);
        assert!((mags[3] - s).abs() < 1e-12);
        assert!(mags[0].abs() < 1e-15 && mags[2].abs() < 1e-15 && mags[4].abs() < 1e-15);
        assert!((coeffs.overlap_bound() - 0.5).abs() < 1e-12);
        assert!((coeffs.fixed_ancilla_bound() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn dense_and_sparse_chain_channels_agree() {
        let chain = optimal_unitary(6).unwrap();
        let sparse = chain.prepared_channel();
        let dense = chain.prepared_channel_dense().unwrap();
        for input in PureQubitState::tomographic_six() {
            let a = sparse.output(&input);
            let b = dense.output(&input);
            assert!(a.max_entry_distance(&b) < 1e-12);
        }
    }
}
