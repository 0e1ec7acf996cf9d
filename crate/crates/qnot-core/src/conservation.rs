//! Conservation-law structure on the joint register: block unitaries that
//! commute with total Z, Haar sampling of them, extraction of the
//! four-component gate action, sector coefficients of an ancilla state, and
//! the bounds computable from those coefficients alone.
//!
//! Total Z on S + A is diagonal in the computational basis with eigenvalue
//! (N + 1) - 2 * popcount(joint index). Its eigenspace for n = 0..N+1 (label
//! lambda = N + 1 - 2n) is spanned by the s = 0 states of ancilla sector n
//! followed by the s = 1 states of ancilla sector n - 1; a unitary commutes
//! with Z exactly when it is block diagonal over these spaces.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::channels::ComponentDecomposition;
use crate::error::{Error, Result};
use crate::hilbert::{
    hamming_sectors, tensor, SectorBasis, StateVector, DENSE_DIM_LIMIT, MAX_DENSE_ANCILLA,
};
use crate::linalg::{haar_unitary, CMatrix, C64, ZERO};
use crate::policy::Tolerances;

/// Unitary acting on the joint space of the computational qubit and the
/// ancilla register.
#[derive(Debug, Clone)]
pub enum GateUnitary {
    /// Block diagonal over the total-Z eigenspaces (conservative by
    /// construction, still audited numerically).
    Block(BlockUnitary),
    /// Explicit dense matrix on the full joint space. No conservation is
    /// implied; this is also how deliberately non-conservative controls are
    /// expressed.
    Dense(CMatrix),
    /// A unitary on a smaller register acting as identity on appended
    /// ancilla qubits (the low `extension_qubits` bits of the ancilla
    /// index).
    Extended {
        inner: Box<GateUnitary>,
        extension_qubits: usize,
    },
}

impl GateUnitary {
    pub fn joint_dim(&self) -> usize {
        match self {
            GateUnitary::Block(b) => 2 << b.n_ancilla(),
            GateUnitary::Dense(m) => m.dim(),
            GateUnitary::Extended {
                inner,
                extension_qubits,
            } => inner.joint_dim() << extension_qubits,
        }
    }

    /// Number of ancilla qubits this unitary acts on (joint dim = 2^(N+1)).
    pub fn ancilla_qubits(&self) -> usize {
        self.joint_dim().trailing_zeros() as usize - 1
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        if v.dim() != self.joint_dim() {
            return Err(Error::Shape(format!(
                "state dimension {} does not match unitary dimension {}",
                v.dim(),
                self.joint_dim()
            )));
        }
        match self {
            GateUnitary::Block(b) => b.apply(v),
            GateUnitary::Dense(m) => StateVector::new(m.mul_vec(v.amplitudes())),
            GateUnitary::Extended {
                inner,
                extension_qubits,
            } => {
                let ext = 1usize << extension_qubits;
                let inner_dim = inner.joint_dim();
                let half_inner = inner_dim / 2;
                let half_outer = v.dim() / 2;
                let mut out = vec![ZERO; v.dim()];
                for x in 0..ext {
                    let mut sub = vec![ZERO; inner_dim];
                    for s in 0..2 {
                        for a in 0..half_inner {
                            sub[s * half_inner + a] =
                                v.amplitudes()[s * half_outer + a * ext + x];
                        }
                    }
                    let mapped = inner.apply(&StateVector::new(sub)?)?;
                    for s in 0..2 {
                        for a in 0..half_inner {
                            out[s * half_outer + a * ext + x] =
                                mapped.amplitudes()[s * half_inner + a];
                        }
                    }
                }
                StateVector::new(out)
            }
        }
    }

    /// Expand to a dense matrix (capacity-guarded).
    pub fn to_dense(&self) -> Result<CMatrix> {
        let dim = self.joint_dim();
        if dim > DENSE_DIM_LIMIT {
            return Err(Error::Capacity {
                what: "dense unitary expansion",
                dim,
                limit: DENSE_DIM_LIMIT,
            });
        }
        if let GateUnitary::Dense(m) = self {
            return Ok(m.clone());
        }
        let mut out = CMatrix::zeros(dim);
        for j in 0..dim {
            let col = self.apply(&StateVector::basis(dim, j)?)?;
            for (i, z) in col.amplitudes().iter().enumerate() {
                out[(i, j)] = *z;
            }
        }
        Ok(out)
    }
}

/// Z-conserving unitary stored as one unitary block per total-Z eigenspace.
#[derive(Debug, Clone)]
pub struct BlockUnitary {
    n_ancilla: usize,
    blocks: Vec<CMatrix>,
    /// Ordered joint-space basis of each eigenspace: s = 0 indices of
    /// ancilla sector n (ascending), then s = 1 indices of sector n - 1.
    block_bases: Vec<Vec<usize>>,
}

impl BlockUnitary {
    pub fn n_ancilla(&self) -> usize {
        self.n_ancilla
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, n: usize) -> &CMatrix {
        &self.blocks[n]
    }

    pub fn block_basis(&self, n: usize) -> &[usize] {
        &self.block_bases[n]
    }

    pub fn block_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.dim()).collect()
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        if v.dim() != 2 << self.n_ancilla {
            return Err(Error::Shape(format!(
                "state dimension {} does not match joint dimension {}",
                v.dim(),
                2usize << self.n_ancilla
            )));
        }
        let mut out = vec![ZERO; v.dim()];
        for (block, basis) in self.blocks.iter().zip(&self.block_bases) {
            let gathered: Vec<C64> = basis.iter().map(|&i| v.amplitudes()[i]).collect();
            let mapped = block.mul_vec(&gathered);
            for (&i, z) in basis.iter().zip(mapped) {
                out[i] = z;
            }
        }
        StateVector::new(out)
    }
}

/// Ordered joint-space basis of the total-Z eigenspace with label n.
fn eigenspace_basis(sectors: &SectorBasis, n: usize) -> Vec<usize> {
    let n_qubits = sectors.n_qubits();
    let half = 1usize << n_qubits;
    let mut basis = Vec::new();
    if n <= n_qubits {
        basis.extend(sectors.indices_of(n).iter().copied());
    }
    if n >= 1 && n - 1 <= n_qubits {
        basis.extend(sectors.indices_of(n - 1).iter().map(|&a| half + a));
    }
    basis
}

/// Assemble a Z-conserving unitary from per-eigenspace blocks.
///
/// Expects N + 2 blocks; block n must be square of dimension
/// binomial(N, n) + binomial(N, n-1) and unitary within the validation
/// tolerance.
pub fn assemble_conservative(n_ancilla: usize, blocks: Vec<CMatrix>) -> Result<BlockUnitary> {
    if n_ancilla == 0 || n_ancilla > MAX_DENSE_ANCILLA {
        return Err(Error::Capacity {
            what: "block unitary",
            dim: 2usize.checked_shl(n_ancilla as u32).unwrap_or(usize::MAX),
            limit: DENSE_DIM_LIMIT,
        });
    }
    if blocks.len() != n_ancilla + 2 {
        return Err(Error::Shape(format!(
            "expected {} blocks, got {}",
            n_ancilla + 2,
            blocks.len()
        )));
    }
    let sectors = hamming_sectors(n_ancilla)?;
    let mut block_bases = Vec::with_capacity(blocks.len());
    for (n, block) in blocks.iter().enumerate() {
        let basis = eigenspace_basis(&sectors, n);
        if block.dim() != basis.len() {
            return Err(Error::Shape(format!(
                "block {n} has dimension {}, expected {}",
                block.dim(),
                basis.len()
            )));
        }
        if !block.is_unitary(Tolerances::DEFAULT.validation) {
            return Err(Error::Validation(format!("block {n} is not unitary")));
        }
        block_bases.push(basis);
    }
    Ok(BlockUnitary {
        n_ancilla,
        blocks,
        block_bases,
    })
}

/// Diagonal of total Z over the joint register of `total_qubits` qubits.
pub fn z_diagonal(total_qubits: usize) -> Vec<f64> {
    let dim = 1usize << total_qubits;
    (0..dim)
        .map(|i| total_qubits as f64 - 2.0 * i.count_ones() as f64)
        .collect()
}

/// max |(UZ - ZU)_{ij}| where Z is the total-Z sum on the joint register.
///
/// Zero (to rounding) certifies conservation; the X⊗I control scores 2.
pub fn commutator_norm(u: &GateUnitary) -> Result<f64> {
    let dim = u.joint_dim();
    if dim > DENSE_DIM_LIMIT {
        return Err(Error::Capacity {
            what: "commutator audit",
            dim,
            limit: DENSE_DIM_LIMIT,
        });
    }
    let total_qubits = dim.trailing_zeros() as usize;
    let z = z_diagonal(total_qubits);
    if let GateUnitary::Dense(m) = u {
        return Ok(commutator_norm_dense(m, &z));
    }
    let mut worst = 0.0f64;
    for j in 0..dim {
        let col = u.apply(&StateVector::basis(dim, j)?)?;
        for (i, amp) in col.amplitudes().iter().enumerate() {
            let gap = (z[j] - z[i]).abs();
            if gap > 0.0 {
                worst = worst.max(amp.norm() * gap);
            }
        }
    }
    Ok(worst)
}

fn commutator_norm_dense(m: &CMatrix, z: &[f64]) -> f64 {
    let dim = m.dim();
    let mut worst = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            let gap = (z[j] - z[i]).abs();
            if gap > 0.0 {
                worst = worst.max(m[(i, j)].norm() * gap);
            }
        }
    }
    worst
}

/// Draw a conservative unitary with each block Haar-distributed.
///
/// Deterministic for a fixed seed; blocks are drawn in eigenspace order
/// from a single ChaCha stream.
pub fn random_conservative(n_ancilla: usize, seed: u64) -> Result<BlockUnitary> {
    if n_ancilla == 0 || n_ancilla > MAX_DENSE_ANCILLA {
        return Err(Error::Capacity {
            what: "block unitary",
            dim: 2usize.checked_shl(n_ancilla as u32).unwrap_or(usize::MAX),
            limit: DENSE_DIM_LIMIT,
        });
    }
    let sectors = hamming_sectors(n_ancilla)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let blocks: Vec<CMatrix> = (0..=n_ancilla + 1)
        .map(|n| haar_unitary(eigenspace_basis(&sectors, n).len(), &mut rng))
        .collect();
    assemble_conservative(n_ancilla, blocks)
}

/// Haar-random pure state on the full 2^N ancilla space.
pub fn random_ancilla_state(n_ancilla: usize, rng: &mut ChaCha12Rng) -> Result<StateVector> {
    use rand::Rng;
    use rand_distr::StandardNormal;
    let dim = 1usize << n_ancilla;
    let amps: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    StateVector::new(amps)?.normalized()
}

/// Read off the four ancilla components of the gate action on |0⟩ and |1⟩:
/// U(|i⟩⊗|A⟩) = |0⟩⊗|comp(i,0)⟩ + |1⟩⊗|comp(i,1)⟩.
pub fn extract_components(u: &GateUnitary, ancilla: &StateVector) -> Result<ComponentDecomposition> {
    let half = u.joint_dim() / 2;
    if ancilla.dim() != half {
        return Err(Error::Shape(format!(
            "ancilla dimension {} does not match unitary ancilla dimension {}",
            ancilla.dim(),
            half
        )));
    }
    if !ancilla.is_normalized(Tolerances::DEFAULT.structural) {
        return Err(Error::Validation("ancilla state is not normalized".into()));
    }
    let mut parts = Vec::with_capacity(4);
    for s in 0..2 {
        let joint = tensor(&StateVector::basis(2, s)?, ancilla)?;
        let out = u.apply(&joint)?;
        for out_s in 0..2 {
            let amps = out.amplitudes()[out_s * half..(out_s + 1) * half].to_vec();
            parts.push(StateVector::new(amps)?);
        }
    }
    let a11 = parts.pop().unwrap();
    let a10 = parts.pop().unwrap();
    let a01 = parts.pop().unwrap();
    let a00 = parts.pop().unwrap();
    ComponentDecomposition::new(a00, a01, a10, a11)
}

/// Sector amplitudes of an ancilla state: magnitudes of the per-sector
/// projections together with the normalized projections themselves.
#[derive(Debug, Clone)]
pub struct AncillaCoefficients {
    n_qubits: usize,
    amplitudes: Vec<C64>,
    reps: Vec<Option<StateVector>>,
}

impl AncillaCoefficients {
    /// Coefficient profile without concrete representative vectors (used by
    /// the spectral optimizer and by constructions beyond the dense limit).
    pub fn from_magnitudes(n_qubits: usize, magnitudes: Vec<f64>) -> Result<Self> {
        if magnitudes.len() != n_qubits + 1 {
            return Err(Error::Shape(format!(
                "expected {} sector amplitudes, got {}",
                n_qubits + 1,
                magnitudes.len()
            )));
        }
        let total: f64 = magnitudes.iter().map(|a| a * a).sum();
        if (total - 1.0).abs() > Tolerances::DEFAULT.structural {
            return Err(Error::Validation(format!(
                "sector amplitudes have norm^2 = {total}, expected 1"
            )));
        }
        let reps = vec![None; magnitudes.len()];
        Ok(AncillaCoefficients {
            n_qubits,
            amplitudes: magnitudes.into_iter().map(|a| C64::new(a, 0.0)).collect(),
            reps,
        })
    }

    pub(crate) fn from_parts(
        n_qubits: usize,
        amplitudes: Vec<C64>,
        reps: Vec<Option<StateVector>>,
    ) -> Self {
        AncillaCoefficients {
            n_qubits,
            amplitudes,
            reps,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm()).collect()
    }

    /// Normalized representative of sector n, when the amplitude is nonzero.
    pub fn rep(&self, n: usize) -> Option<&StateVector> {
        self.reps.get(n).and_then(|r| r.as_ref())
    }

    /// Reassemble the ancilla state (requires representatives).
    pub fn state_vector(&self) -> Result<StateVector> {
        let dim = 1usize
            .checked_shl(self.n_qubits as u32)
            .filter(|&d| d <= DENSE_DIM_LIMIT / 2)
            .ok_or(Error::Capacity {
                what: "ancilla state",
                dim: usize::MAX,
                limit: DENSE_DIM_LIMIT / 2,
            })?;
        let mut out = StateVector::zero_vector(dim)?;
        for (a, rep) in self.amplitudes.iter().zip(&self.reps) {
            if a.norm() == 0.0 {
                continue;
            }
            let rep = rep.as_ref().ok_or_else(|| {
                Error::Validation("missing sector representative for nonzero amplitude".into())
            })?;
            out = out.add(&rep.scaled(*a));
        }
        Ok(out)
    }

    /// Sum of |a_{n+2}||a_n|, the quantity every bound in this crate keys on.
    pub fn overlap_bound(&self) -> f64 {
        let mags = self.magnitudes();
        if mags.len() < 3 {
            return 0.0;
        }
        (0..mags.len() - 2).map(|n| mags[n + 2] * mags[n]).sum()
    }

    /// (1/2)(1 - overlap bound): the error floor over every conservative
    /// interaction for this fixed ancilla state.
    pub fn fixed_ancilla_bound(&self) -> f64 {
        0.5 * (1.0 - self.overlap_bound())
    }
}

/// Decompose an ancilla state into sector amplitudes and representatives.
pub fn ancilla_sector_coefficients(
    ancilla: &StateVector,
    sectors: &SectorBasis,
) -> Result<AncillaCoefficients> {
    if ancilla.dim() != 1usize << sectors.n_qubits() {
        return Err(Error::Shape(format!(
            "ancilla dimension {} does not match sector basis on {} qubits",
            ancilla.dim(),
            sectors.n_qubits()
        )));
    }
    if !ancilla.is_normalized(Tolerances::DEFAULT.structural) {
        return Err(Error::Validation("ancilla state is not normalized".into()));
    }
    let (norms, reps) = sectors.project(ancilla, Tolerances::DEFAULT.structural);
    let amplitudes = norms.iter().map(|&n| C64::new(n, 0.0)).collect();
    Ok(AncillaCoefficients::from_parts(
        sectors.n_qubits(),
        amplitudes,
        reps,
    ))
}

/// Σ |a_{n+2}||a_n| for the given coefficients; upper-bounds the magnitude
/// of the flip-component overlap for every conservative unitary.
pub fn overlap_bound(coeffs: &AncillaCoefficients) -> f64 {
    coeffs.overlap_bound()
}

/// (1/2)(1 - Σ |a_{n+2}||a_n|).
pub fn fixed_ancilla_bound(coeffs: &AncillaCoefficients) -> f64 {
    coeffs.fixed_ancilla_bound()
}

/// (1/2)|1 - ⟨comp(0,1)|comp(1,0)⟩|: the witness-state error guarantee of a
/// concrete implementation.
pub fn component_bound(comp: &ComponentDecomposition) -> f64 {
    0.5 * (C64::new(1.0, 0.0) - comp.flip_overlap()).norm()
}
