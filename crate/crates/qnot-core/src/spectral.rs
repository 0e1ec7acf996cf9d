//! Chebyshev polynomials of the second kind, the spectrum of the symmetric
//! half-band tridiagonal matrix, the constrained maximization of the
//! sector-coefficient overlap sum, and the closed-form error bounds.
//!
//! The central object is the l×l symmetric matrix with 1/2 on the first
//! sub- and superdiagonal and zeros elsewhere. Its eigenvalues are
//! cos(kπ/(l+1)); the top one, cos(π/(l+1)), caps the overlap sum
//! Σ|a_{n+2}||a_n| of any unit coefficient vector on a chain of length l.

use std::f64::consts::PI;

use crate::conservation::AncillaCoefficients;
use crate::error::{Error, Result};

/// (1/2)(1 - cos(2π/m)) evaluated as sin²(π/m).
///
/// The half-angle form avoids the cancellation in 1 - cos for large m, and
/// the small denominators whose cosine is exact (m = 1, 2, 3, 4, 6) are
/// returned as exact dyadic/quarter values so table rows print cleanly.
pub fn half_one_minus_cos_two_pi_over(m: u64) -> f64 {
    match m {
        1 => 0.0,
        2 => 1.0,
        3 => 0.75,
        4 => 0.5,
        6 => 0.25,
        _ => {
            let s = (PI / m as f64).sin();
            s * s
        }
    }
}

/// (1 - cos x)/2 for arbitrary real x, as sin²(x/2).
pub fn half_one_minus_cos(x: f64) -> f64 {
    let s = (0.5 * x).sin();
    s * s
}

/// cos(π/m), derived from the same helper so that bounds and spectra agree
/// bit-for-bit at the exact points.
pub fn cos_pi_over(m: u64) -> f64 {
    1.0 - 2.0 * half_one_minus_cos_two_pi_over(2 * m)
}

/// Chebyshev polynomial of the second kind by forward recurrence:
/// W_0 = 1, W_1 = 2x, W_{l+1} = 2x W_l - W_{l-1}.
pub fn chebyshev_w(degree: usize, x: f64) -> f64 {
    if degree == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 2.0 * x;
    for _ in 1..degree {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// One recurrence-checked evaluation of a second-kind Chebyshev polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChebyshevEval {
    pub degree: usize,
    pub argument: f64,
    pub value: f64,
}

impl ChebyshevEval {
    pub fn evaluate(degree: usize, argument: f64) -> Self {
        ChebyshevEval {
            degree,
            argument,
            value: chebyshev_w(degree, argument),
        }
    }
}

/// Top of the spectrum of the l×l half-band tridiagonal matrix.
///
/// `eigenvector` stores the raw second-kind Chebyshev values
/// W_j(cos(π/(l+1))) = sin((j+1)π/(l+1))/sin(π/(l+1)) for j = 0..l-1;
/// `normalizer` is its Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagSpectrum {
    pub size: usize,
    pub max_eigenvalue: f64,
    pub eigenvector: Vec<f64>,
    pub normalizer: f64,
}

impl TridiagSpectrum {
    pub fn normalized_eigenvector(&self) -> Vec<f64> {
        self.eigenvector
            .iter()
            .map(|w| w / self.normalizer)
            .collect()
    }
}

/// Closed-form top eigenpair of the half-band tridiagonal matrix.
pub fn tridiag_max_eig(size: usize) -> Result<TridiagSpectrum> {
    if size < 1 {
        return Err(Error::Domain("matrix size must be at least 1".into()));
    }
    let max_eigenvalue = cos_pi_over(size as u64 + 1);
    let denom = (PI / (size as f64 + 1.0)).sin();
    let eigenvector: Vec<f64> = (0..size)
        .map(|j| ((j as f64 + 1.0) * PI / (size as f64 + 1.0)).sin() / denom)
        .collect();
    let normalizer = eigenvector.iter().map(|w| w * w).sum::<f64>().sqrt();
    Ok(TridiagSpectrum {
        size,
        max_eigenvalue,
        eigenvector,
        normalizer,
    })
}

/// y = S_l v for the half-band tridiagonal matrix (1/2 on the first sub-
/// and superdiagonal).
pub fn tridiag_apply(v: &[f64]) -> Vec<f64> {
    let l = v.len();
    (0..l)
        .map(|i| {
            let below = if i > 0 { v[i - 1] } else { 0.0 };
            let above = if i + 1 < l { v[i + 1] } else { 0.0 };
            0.5 * (below + above)
        })
        .collect()
}

fn chain(indices_start: usize, n: usize) -> Vec<usize> {
    (indices_start..=n).step_by(2).collect()
}

/// Maximize Σ|a_{n+2}||a_n| over unit sector-coefficient vectors.
///
/// The sum splits over the odd- and even-subscript chains; each chain of
/// length l contributes at most the top tridiagonal eigenvalue
/// cos(π/(l+1)), attained by the Chebyshev eigenvector. The classically
/// complete variant forces a_0 = a_N = 0 before splitting.
///
/// Returns the maximum and an optimal magnitude profile (the normalized
/// eigenvector placed on the winning chain; ties go to the even-subscript
/// chain in the general case and to the odd-subscript chain in the
/// classically complete case).
pub fn max_overlap_sum(
    n_ancilla: usize,
    classically_complete: bool,
) -> Result<(f64, AncillaCoefficients)> {
    if n_ancilla < 2 {
        return Err(Error::Domain(
            "overlap maximization needs at least 2 ancilla qubits".into(),
        ));
    }
    let (odd_chain, even_chain) = if classically_complete {
        // endpoints a_0 and a_N are forced to zero
        (chain(1, n_ancilla - 1), chain(2, n_ancilla - 1))
    } else {
        (chain(1, n_ancilla), chain(0, n_ancilla))
    };
    let score = |c: &[usize]| -> f64 {
        if c.is_empty() {
            f64::NEG_INFINITY
        } else {
            cos_pi_over(c.len() as u64 + 1)
        }
    };
    let odd_score = score(&odd_chain);
    let even_score = score(&even_chain);
    // ties resolve toward the odd chain for the classically complete case
    // and toward the even chain otherwise
    let winner = if classically_complete {
        if odd_score >= even_score {
            &odd_chain
        } else {
            &even_chain
        }
    } else if even_score >= odd_score {
        &even_chain
    } else {
        &odd_chain
    };
    let value = odd_score.max(even_score).max(0.0);

    let mut magnitudes = vec![0.0; n_ancilla + 1];
    let spectrum = tridiag_max_eig(winner.len())?;
    for (slot, w) in winner.iter().zip(spectrum.normalized_eigenvector()) {
        magnitudes[*slot] = w;
    }
    let coeffs = AncillaCoefficients::from_magnitudes(n_ancilla, magnitudes)?;
    Ok((value, coeffs))
}

/// Which closed-form bound a report carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundVariant {
    GeneralEven,
    GeneralOdd,
    GeneralAny,
    CcEven,
    CcOdd,
    MixedRank,
    HadamardRef,
}

impl BoundVariant {
    pub fn label(&self) -> &'static str {
        match self {
            BoundVariant::GeneralEven => "general-even",
            BoundVariant::GeneralOdd => "general-odd",
            BoundVariant::GeneralAny => "general-any",
            BoundVariant::CcEven => "cc-even",
            BoundVariant::CcOdd => "cc-odd",
            BoundVariant::MixedRank => "mixed-rank",
            BoundVariant::HadamardRef => "hadamard-ref",
        }
    }
}

/// A single evaluated lower bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub n_ancilla: usize,
    pub variant: BoundVariant,
    pub value: f64,
}

/// How the general bound treats the parity of N.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityForm {
    /// Parity-resolved denominators: N+4 for even N, N+3 for odd N.
    Exact,
    /// The weaker common form with denominator N+4 for every N.
    Uniform,
}

/// Error floor of any pure conservative implementation with N ancilla
/// qubits: (1/2)(1 - cos 2π/(N+4)) (even) or (1/2)(1 - cos 2π/(N+3)) (odd).
pub fn bound_general(n_ancilla: usize, form: ParityForm) -> Result<BoundReport> {
    if n_ancilla < 2 {
        return Err(Error::Domain("general bound needs N >= 2".into()));
    }
    let n = n_ancilla as u64;
    let (variant, denom) = match form {
        ParityForm::Uniform => (BoundVariant::GeneralAny, n + 4),
        ParityForm::Exact => {
            if n_ancilla % 2 == 0 {
                (BoundVariant::GeneralEven, n + 4)
            } else {
                (BoundVariant::GeneralOdd, n + 3)
            }
        }
    };
    Ok(BoundReport {
        n_ancilla,
        variant,
        value: half_one_minus_cos_two_pi_over(denom),
    })
}

/// Attainable error floor of classically complete pure conservative
/// implementations: (1/2)(1 - cos 2π/(N+2)) (even) or with N+1 (odd).
pub fn bound_cc(n_ancilla: usize) -> Result<BoundReport> {
    if n_ancilla < 2 {
        return Err(Error::Domain("classically complete bound needs N >= 2".into()));
    }
    let n = n_ancilla as u64;
    let (variant, denom) = if n_ancilla % 2 == 0 {
        (BoundVariant::CcEven, n + 2)
    } else {
        (BoundVariant::CcOdd, n + 1)
    };
    Ok(BoundReport {
        n_ancilla,
        variant,
        value: half_one_minus_cos_two_pi_over(denom),
    })
}

/// Mixed-ancilla bound: substitute N + log2(rank) into the corresponding
/// pure bound (denominator +4 general, +2 classically complete).
pub fn bound_mixed(n_ancilla: usize, rank: u64, classically_complete: bool) -> Result<BoundReport> {
    if n_ancilla < 2 {
        return Err(Error::Domain("mixed bound needs N >= 2".into()));
    }
    if rank < 1 || (n_ancilla < 64 && rank > 1u64 << n_ancilla) {
        return Err(Error::Domain(format!(
            "rank {rank} outside [1, 2^{n_ancilla}]"
        )));
    }
    let effective = n_ancilla as f64 + (rank as f64).log2();
    let offset = if classically_complete { 2.0 } else { 4.0 };
    Ok(BoundReport {
        n_ancilla,
        variant: BoundVariant::MixedRank,
        value: half_one_minus_cos(2.0 * PI / (effective + offset)),
    })
}

/// Worst-case mixed bound from rank <= 2^N: denominator 2N+4 (general) or
/// 2N+2 (classically complete), i.e. π/(N+2) and π/(N+1).
pub fn bound_mixed_worst_case(n_ancilla: usize, classically_complete: bool) -> Result<BoundReport> {
    if n_ancilla < 2 {
        return Err(Error::Domain("mixed bound needs N >= 2".into()));
    }
    let n = n_ancilla as u64;
    let denom = if classically_complete { 2 * n + 2 } else { 2 * n + 4 };
    Ok(BoundReport {
        n_ancilla,
        variant: BoundVariant::MixedRank,
        value: half_one_minus_cos_two_pi_over(denom),
    })
}

/// Published reference curve for pure conservative realizations of the
/// Hadamard gate, 1/(4N² + 4); plotted against the NOT-gate bounds.
pub fn bound_hadamard_ref(n_ancilla: usize) -> Result<BoundReport> {
    if n_ancilla < 1 {
        return Err(Error::Domain("reference bound needs N >= 1".into()));
    }
    let n = n_ancilla as f64;
    Ok(BoundReport {
        n_ancilla,
        variant: BoundVariant::HadamardRef,
        value: 1.0 / (4.0 * n * n + 4.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chebyshev_examples() {
        for l in 0..12 {
            assert!(
                (chebyshev_w(l, 1.0) - (l as f64 + 1.0)).abs() < 1e-12,
                "W_{l}(1)"
            );
        }
        assert!(chebyshev_w(2, 0.5).abs() < 1e-15);
        assert!((chebyshev_w(2, 0.3) + 0.64).abs() < 1e-15);
    }

    #[test]
    fn chebyshev_matches_sine_ratio() {
        for l in 0..30 {
            for k in 1..40 {
                let x = -0.975 + 0.05 * k as f64;
                let theta = x.acos();
                let reference = ((l as f64 + 1.0) * theta).sin() / theta.sin();
                assert!(
                    (chebyshev_w(l, x) - reference).abs() < 1e-9,
                    "W_{l}({x}): {} vs {reference}",
                    chebyshev_w(l, x)
                );
            }
        }
    }

    #[test]
    fn chebyshev_recurrence_invariant() {
        let xs = [-0.9, -0.3, 0.1, 0.45, 0.8];
        for &x in &xs {
            for l in 1..20 {
                let eval = ChebyshevEval::evaluate(l, x);
                let lhs = x * eval.value;
                let rhs = 0.5 * (chebyshev_w(l + 1, x) + chebyshev_w(l - 1, x));
                assert!((lhs - rhs).abs() < 1e-10);
                assert_eq!(eval.degree, l);
                assert_eq!(eval.argument, x);
            }
        }
    }

    #[test]
    fn tridiag_examples() {
        let s1 = tridiag_max_eig(1).unwrap();
        assert_eq!(s1.max_eigenvalue, 0.0);
        assert_eq!(s1.eigenvector, vec![1.0]);

        let s2 = tridiag_max_eig(2).unwrap();
        assert_eq!(s2.max_eigenvalue, 0.5);
        assert!((s2.eigenvector[0] - s2.eigenvector[1]).abs() < 1e-12);

        let s3 = tridiag_max_eig(3).unwrap();
        assert!((s3.max_eigenvalue - 0.5f64.sqrt()).abs() < 1e-12);
        let v = s3.normalized_eigenvector();
        assert!((v[1] / v[0] - 2.0f64.sqrt()).abs() < 1e-10);
        assert!((v[2] / v[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn tridiag_eigen_residual() {
        for l in 1..=64 {
            let spec = tridiag_max_eig(l).unwrap();
            assert!((spec.max_eigenvalue - (PI / (l as f64 + 1.0)).cos()).abs() < 1e-12);
            let sv = tridiag_apply(&spec.eigenvector);
            let residual: f64 = sv
                .iter()
                .zip(&spec.eigenvector)
                .map(|(y, w)| (y - spec.max_eigenvalue * w).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(residual <= 1e-12, "l = {l}: residual {residual}");
            // entries match the sine ratios
            for (j, w) in spec.eigenvector.iter().enumerate() {
                let expect = ((j as f64 + 1.0) * PI / (l as f64 + 1.0)).sin()
                    / (PI / (l as f64 + 1.0)).sin();
                assert!((w - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn overlap_sum_examples() {
        let (v, coeffs) = max_overlap_sum(2, false).unwrap();
        assert_eq!(v, 0.5);
        let mags = coeffs.magnitudes();
        let s = 0.5f64.sqrt();
        assert!((mags[0] - s).abs() < 1e-12);
        assert_eq!(mags[1], 0.0);
        assert!((mags[2] - s).abs() < 1e-12);

        let (v, coeffs) = max_overlap_sum(2, true).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(coeffs.magnitudes(), vec![0.0, 1.0, 0.0]);

        let (v, coeffs) = max_overlap_sum(4, true).unwrap();
        assert_eq!(v, 0.5);
        let mags = coeffs.magnitudes();
        assert!((mags[1] - s).abs() < 1e-12);
        assert!((mags[3] - s).abs() < 1e-12);
        assert_eq!(mags[0] + mags[2] + mags[4], 0.0);
    }

    #[test]
    fn overlap_sum_closed_forms() {
        for n in 2..=40usize {
            let (general, _) = max_overlap_sum(n, false).unwrap();
            let expect = if n % 2 == 0 {
                cos_pi_over((n as u64 + 4) / 2)
            } else {
                cos_pi_over((n as u64 + 3) / 2)
            };
            assert!((general - expect).abs() < 1e-15, "general N={n}");
            let (cc, _) = max_overlap_sum(n, true).unwrap();
            let expect = if n % 2 == 0 {
                cos_pi_over((n as u64 + 2) / 2)
            } else {
                cos_pi_over((n as u64 + 1) / 2)
            };
            assert!((cc - expect).abs() < 1e-15, "cc N={n}");
        }
        assert!(max_overlap_sum(1, false).is_err());
    }

    #[test]
    fn returned_profile_achieves_the_maximum() {
        for n in 2..=12usize {
            for cc in [false, true] {
                let (value, coeffs) = max_overlap_sum(n, cc).unwrap();
                assert!((coeffs.overlap_bound() - value).abs() < 1e-12, "N={n} cc={cc}");
            }
        }
    }

    #[test]
    fn bound_values() {
        assert_eq!(bound_general(2, ParityForm::Exact).unwrap().value, 0.25);
        assert_eq!(bound_general(3, ParityForm::Exact).unwrap().value, 0.25);
        assert_eq!(bound_general(2, ParityForm::Uniform).unwrap().value, 0.25);
        // N = 100 uniform, frozen against a Taylor expansion of (1-cos x)/2
        let x = 2.0 * PI / 104.0;
        let taylor = x * x / 4.0 - x.powi(4) / 48.0 + x.powi(6) / 1440.0;
        let v = bound_general(100, ParityForm::Uniform).unwrap().value;
        assert!((v - taylor).abs() < 1e-12);
        assert!((v - 9.1222e-4).abs() < 5e-9);

        assert_eq!(bound_cc(2).unwrap().value, 0.5);
        assert_eq!(bound_cc(3).unwrap().value, 0.5);
        assert_eq!(bound_cc(4).unwrap().value, 0.25);

        assert_eq!(bound_cc(2).unwrap().variant, BoundVariant::CcEven);
        assert_eq!(bound_cc(3).unwrap().variant, BoundVariant::CcOdd);
        assert_eq!(
            bound_general(3, ParityForm::Exact).unwrap().variant,
            BoundVariant::GeneralOdd
        );
    }

    #[test]
    fn mixed_bound_values() {
        let pure = bound_general(4, ParityForm::Uniform).unwrap().value;
        let rank1 = bound_mixed(4, 1, false).unwrap().value;
        assert!((rank1 - pure).abs() < 1e-15);

        let v = bound_mixed(2, 4, false).unwrap().value;
        assert!((v - 0.5 * (1.0 - 0.5f64.sqrt())).abs() < 1e-15);

        let v = bound_mixed(4, 2, true).unwrap().value;
        assert!((v - half_one_minus_cos(2.0 * PI / 7.0)).abs() < 1e-15);
        assert!((v - 0.18826).abs() < 5e-6);

        assert!(bound_mixed(4, 0, false).is_err());
        assert!(bound_mixed(4, 17, false).is_err());

        let worst = bound_mixed_worst_case(4, false).unwrap().value;
        assert!((worst - half_one_minus_cos(PI / 6.0)).abs() < 1e-15);
    }

    #[test]
    fn hadamard_reference_values() {
        assert_eq!(bound_hadamard_ref(1).unwrap().value, 0.125);
        assert_eq!(bound_hadamard_ref(2).unwrap().value, 0.05);
        assert_eq!(bound_hadamard_ref(100).unwrap().value, 1.0 / 40004.0);
        assert!(bound_hadamard_ref(0).is_err());
    }

    #[test]
    fn bounds_are_nonincreasing_in_n() {
        let mut prev_exact = f64::INFINITY;
        let mut prev_uniform = f64::INFINITY;
        let mut prev_cc = f64::INFINITY;
        let mut prev_had = f64::INFINITY;
        for n in 2..=1000 {
            let exact = bound_general(n, ParityForm::Exact).unwrap().value;
            let uniform = bound_general(n, ParityForm::Uniform).unwrap().value;
            let cc = bound_cc(n).unwrap().value;
            let had = bound_hadamard_ref(n).unwrap().value;
            assert!(exact <= prev_exact + 1e-15);
            assert!(uniform < prev_uniform);
            assert!(cc <= prev_cc + 1e-15);
            assert!(had < prev_had);
            prev_exact = exact;
            prev_uniform = uniform;
            prev_cc = cc;
            prev_had = had;
        }
        // within a fixed parity the parity-exact forms decrease strictly
        for n in 2..=998 {
            assert!(
                bound_general(n + 2, ParityForm::Exact).unwrap().value
                    < bound_general(n, ParityForm::Exact).unwrap().value
            );
            assert!(bound_cc(n + 2).unwrap().value < bound_cc(n).unwrap().value);
        }
    }
}
