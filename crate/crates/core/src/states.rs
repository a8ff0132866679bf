//! Quantum states in the fixed incoherent (computational) basis.
//!
//! Basis indices are 0-based everywhere in code and in serialized files; the
//! literature convention 1..d is used only in prose.

use std::collections::BTreeSet;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numerics::{herm_eig, is_psd};
use crate::numerics::{ComplexMatrix, Scalar, ToleranceConfig, ONE, ZERO};

/// Density matrix, validated Hermitian, PSD and unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix, tol: &ToleranceConfig) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::InvalidState("density matrix must be square".into()));
        }
        if !mat.is_hermitian(tol.eq_tol) {
            return Err(Error::InvalidState("density matrix must be Hermitian".into()));
        }
        if !is_psd(&mat, tol)? {
            return Err(Error::InvalidState(
                "density matrix must be positive semidefinite".into(),
            ));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > tol.eq_tol * tr.re.abs().max(1.0) || tr.im.abs() > tol.eq_tol {
            return Err(Error::InvalidState(format!(
                "density matrix must have unit trace, got {tr}"
            )));
        }
        Ok(Self { dim: mat.rows(), mat })
    }

    /// Maximally mixed state I/d.
    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            dim: d,
            mat: ComplexMatrix::identity(d).scale(Scalar::new(1.0 / d as f64, 0.0)),
        }
    }

    pub fn from_diagonal(probs: &[f64], tol: &ToleranceConfig) -> Result<Self> {
        let diag: Vec<Scalar> = probs.iter().map(|&p| Scalar::new(p, 0.0)).collect();
        Self::new(ComplexMatrix::diagonal(&diag), tol)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    /// Diagonal in the incoherent basis, as real probabilities.
    pub fn diag_probs(&self) -> Vec<f64> {
        self.mat.diag().iter().map(|z| z.re).collect()
    }

    pub fn purity(&self) -> f64 {
        self.mat.matmul(&self.mat).expect("square").trace().re
    }

    /// True iff the state is pure within a loose purity-deficit test.
    pub fn is_pure(&self, tol: &ToleranceConfig) -> bool {
        (1.0 - self.purity()).abs() <= tol.eq_tol.max(1e-12) * 10.0
    }

    /// Extracts the pure-state vector when the state has rank one.
    pub fn as_pure(&self, tol: &ToleranceConfig) -> Option<PureState> {
        let eig = herm_eig(&self.mat, tol).ok()?;
        if eig.eigenvalues.is_empty() || (eig.eigenvalues[0] - 1.0).abs() > 1e-6 {
            return None;
        }
        if eig.eigenvalues.iter().skip(1).any(|&l| l.abs() > 1e-6) {
            return None;
        }
        PureState::new(eig.eigenvector(0), tol).ok()
    }
}

/// Pure state |ψ⟩ = Σ ψᵢ |i⟩ with Σ|ψᵢ|² = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dim: usize,
    amplitudes: Vec<Scalar>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Scalar>, tol: &ToleranceConfig) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > tol.eq_tol.max(1e-12) * 100.0 {
            return Err(Error::InvalidState(format!(
                "pure state must be normalized, |ψ|² = {norm_sq}"
            )));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            dim: amplitudes.len(),
            amplitudes,
        })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn from_unnormalized(amplitudes: Vec<Scalar>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::InvalidState("cannot normalize the zero vector".into()));
        }
        Ok(Self {
            dim: amplitudes.len(),
            amplitudes: amplitudes.into_iter().map(|z| z / norm).collect(),
        })
    }

    pub fn from_reals(amplitudes: &[f64], tol: &ToleranceConfig) -> Result<Self> {
        Self::new(
            amplitudes.iter().map(|&r| Scalar::new(r, 0.0)).collect(),
            tol,
        )
    }

    /// Basis state |i⟩.
    pub fn basis(d: usize, i: usize) -> Self {
        let mut amplitudes = vec![ZERO; d];
        amplitudes[i] = ONE;
        Self { dim: d, amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn amplitudes(&self) -> &[Scalar] {
        &self.amplitudes
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    /// |ψ⟩⟨ψ| as a density matrix.
    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            dim: self.dim,
            mat: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
        }
    }
}

/// Indices (0-based) at which a pure state has nonzero amplitude.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoherenceSet {
    indices: BTreeSet<usize>,
}

impl CoherenceSet {
    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        Self {
            indices: indices.into_iter().collect(),
        }
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.contains(&i)
    }

    pub fn is_subset_of(&self, other: &CoherenceSet) -> bool {
        self.indices.is_subset(&other.indices)
    }
}

/// True iff every off-diagonal modulus is ≤ eq_tol · ‖ρ‖₂.
pub fn is_incoherent(rho: &DensityMatrix, tol: &ToleranceConfig) -> bool {
    matrix_is_diagonal(rho.mat(), tol)
}

/// Diagonality test with the same relative policy, for raw matrices.
pub fn matrix_is_diagonal(m: &ComplexMatrix, tol: &ToleranceConfig) -> bool {
    let scale = m.frobenius_norm().max(1.0);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if i != j && m.get(i, j).norm() > tol.eq_tol * scale {
                return false;
            }
        }
    }
    true
}

/// Complete dephasing Δ[ρ]: keeps the diagonal, zeroes everything else.
pub fn dephase(rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix {
        dim: rho.dim(),
        mat: ComplexMatrix::diagonal(&rho.mat().diag()),
    }
}

/// Dephasing on a raw matrix; used where intermediate values are not states.
pub fn dephase_matrix(m: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::diagonal(&m.diag())
}

/// Number of basis elements with nonzero amplitude.
pub fn coherence_rank(psi: &PureState, tol: &ToleranceConfig) -> usize {
    coherence_set(psi, tol).len()
}

/// The set of basis indices carrying nonzero amplitude.
///
/// The zero test reuses `eq_tol`; the rank is discontinuous there by nature.
pub fn coherence_set(psi: &PureState, tol: &ToleranceConfig) -> CoherenceSet {
    CoherenceSet {
        indices: psi
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > tol.eq_tol)
            .map(|(i, _)| i)
            .collect(),
    }
}

/// Majorization p ≻ q: every descending partial sum of p dominates q's.
pub fn majorizes(p: &[f64], q: &[f64], tol: &ToleranceConfig) -> Result<bool> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            got: q.len(),
        });
    }
    let sum_p: f64 = p.iter().sum();
    let sum_q: f64 = q.iter().sum();
    if (sum_p - 1.0).abs() > tol.eq_tol * 100.0 || (sum_q - 1.0).abs() > tol.eq_tol * 100.0 {
        return Err(Error::InvalidParameter(
            "majorization inputs must each sum to 1".into(),
        ));
    }
    let mut ps = p.to_vec();
    let mut qs = q.to_vec();
    ps.sort_by(|a, b| b.partial_cmp(a).unwrap());
    qs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut acc_p = 0.0;
    let mut acc_q = 0.0;
    for (a, b) in ps.iter().zip(&qs) {
        acc_p += a;
        acc_q += b;
        if acc_p < acc_q - tol.eq_tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The uniform-superposition state |+_d⟩.
pub fn plus_state(d: usize) -> Result<PureState> {
    if d == 0 {
        return Err(Error::InvalidParameter("plus state needs d >= 1".into()));
    }
    let amp = Scalar::new(1.0 / (d as f64).sqrt(), 0.0);
    Ok(PureState {
        dim: d,
        amplitudes: vec![amp; d],
    })
}

/// Maximally correlated embedding ρ_mc = Σᵢⱼ ρᵢⱼ |ii⟩⟨jj| on C^{d²}.
pub fn maximally_correlated(rho: &DensityMatrix) -> DensityMatrix {
    let d = rho.dim();
    let mut mat = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            mat.set(i * d + i, j * d + j, rho.mat().get(i, j));
        }
    }
    DensityMatrix { dim: d * d, mat }
}

fn gaussian(rng: &mut impl Rng) -> Scalar {
    Scalar::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-style random density matrix: ρ = GG†/Tr(GG†) with G of size d × rank.
pub fn random_density(d: usize, rank: usize, rng: &mut impl Rng) -> Result<DensityMatrix> {
    if rank == 0 || rank > d {
        return Err(Error::InvalidParameter(format!(
            "rank must be in 1..={d}, got {rank}"
        )));
    }
    let g = ComplexMatrix::from_fn(d, rank, |_, _| gaussian(rng));
    let gg = g.matmul(&g.adjoint())?;
    let tr = gg.trace().re;
    Ok(DensityMatrix {
        dim: d,
        mat: gg.scale(Scalar::new(1.0 / tr, 0.0)),
    })
}

/// Haar-random pure state of dimension d.
pub fn random_pure(d: usize, rng: &mut impl Rng) -> PureState {
    loop {
        let v: Vec<Scalar> = (0..d).map(|_| gaussian(rng)).collect();
        if let Ok(psi) = PureState::from_unnormalized(v) {
            return psi;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn incoherence_detection() {
        let t = tol();
        let diag = DensityMatrix::from_diagonal(&[0.5, 0.5], &t).unwrap();
        assert!(is_incoherent(&diag, &t));

        let plus = plus_state(2).unwrap().density();
        assert!(!is_incoherent(&plus, &t));
        assert!(is_incoherent(&dephase(&plus), &t));
    }

    #[test]
    fn dephase_keeps_diagonal() {
        let t = tol();
        let plus = plus_state(2).unwrap().density();
        let deph = dephase(&plus);
        assert!(deph
            .mat()
            .approx_eq(DensityMatrix::maximally_mixed(2).mat(), 1e-12));
        // Idempotent on random states.
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for _ in 0..20 {
            let rho = random_density(3, 3, &mut rng).unwrap();
            let once = dephase(&rho);
            let twice = dephase(&once);
            assert!(once.mat().approx_eq(twice.mat(), 1e-15));
            for i in 0..3 {
                assert!((once.mat().get(i, i) - rho.mat().get(i, i)).norm() < 1e-15);
            }
        }
        let _ = t;
    }

    #[test]
    fn coherence_rank_and_set() {
        let t = tol();
        let plus3 = plus_state(3).unwrap();
        assert_eq!(coherence_rank(&plus3, &t), 3);
        let set = coherence_set(&plus3, &t);
        assert_eq!(set.indices().collect::<Vec<_>>(), vec![0, 1, 2]);

        let basis = PureState::basis(4, 2);
        assert_eq!(coherence_rank(&basis, &t), 1);

        // The (√(2/3), √(1/3)) state has rank 2 on indices {0, 1}.
        let psi =
            PureState::from_reals(&[(2.0f64 / 3.0).sqrt(), (1.0f64 / 3.0).sqrt()], &t).unwrap();
        assert_eq!(coherence_rank(&psi, &t), 2);
        assert!(coherence_set(&psi, &t).contains(0));
        assert!(coherence_set(&psi, &t).contains(1));
    }

    #[test]
    fn majorization_basics() {
        let t = tol();
        assert!(majorizes(&[1.0, 0.0, 0.0], &[0.4, 0.3, 0.3], &t).unwrap());
        assert!(!majorizes(&[1.0 / 3.0; 3], &[0.5, 0.3, 0.2], &t).unwrap());
        // Any qutrit diagonal majorizes the uniform one.
        let uni = [1.0 / 3.0; 3];
        for p in [[0.5, 0.3, 0.2], [0.9, 0.05, 0.05], [1.0 / 3.0; 3]] {
            assert!(majorizes(&p, &uni, &t).unwrap());
        }
        assert!(majorizes(&[0.5, 0.5], &[0.5, 0.3, 0.2], &t).is_err());
        assert!(majorizes(&[0.5, 0.2], &[0.5, 0.5], &t).is_err());
    }

    #[test]
    fn plus_state_values() {
        let t = tol();
        let p2 = plus_state(2).unwrap();
        let s = 1.0 / 2.0f64.sqrt();
        assert!((p2.amplitudes()[0].re - s).abs() < 1e-15);
        assert!((p2.amplitudes()[1].re - s).abs() < 1e-15);

        let p1 = plus_state(1).unwrap();
        assert!((p1.amplitudes()[0].re - 1.0).abs() < 1e-15);
        assert!(plus_state(0).is_err());

        for d in 1..=5 {
            assert_eq!(coherence_rank(&plus_state(d).unwrap(), &t), d);
        }
    }

    #[test]
    fn maximally_correlated_plus2_is_bell() {
        let plus = plus_state(2).unwrap().density();
        let mc = maximally_correlated(&plus);
        // |Φ⁺⟩ = (|00⟩ + |11⟩)/√2 lives on indices 0 and 3 of C⁴.
        let s = Scalar::new(1.0 / 2.0f64.sqrt(), 0.0);
        let mut phi = vec![ZERO; 4];
        phi[0] = s;
        phi[3] = s;
        let bell = ComplexMatrix::outer(&phi, &phi);
        assert!(mc.mat().approx_eq(&bell, 1e-12));
        assert!((mc.mat().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn maximally_correlated_diagonal_stays_diagonal() {
        let t = tol();
        let rho = DensityMatrix::from_diagonal(&[0.7, 0.3], &t).unwrap();
        let mc = maximally_correlated(&rho);
        assert!(is_incoherent(&mc, &t));
        assert!((mc.mat().get(0, 0).re - 0.7).abs() < 1e-15);
        assert!((mc.mat().get(3, 3).re - 0.3).abs() < 1e-15);
    }

    #[test]
    fn random_states_are_valid_and_reproducible() {
        let t = tol();
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let pure = random_density(4, 1, &mut rng).unwrap();
        assert!((pure.purity() - 1.0).abs() < 1e-10);

        let full = random_density(4, 4, &mut rng).unwrap();
        assert!(DensityMatrix::new(full.mat().clone(), &t).is_ok());

        let mut rng_a = ChaCha12Rng::seed_from_u64(123);
        let mut rng_b = ChaCha12Rng::seed_from_u64(123);
        let a = random_density(3, 2, &mut rng_a).unwrap();
        let b = random_density(3, 2, &mut rng_b).unwrap();
        assert_eq!(a.mat().entries(), b.mat().entries());

        assert!(random_density(3, 0, &mut rng).is_err());
        assert!(random_density(3, 4, &mut rng).is_err());
    }

    #[test]
    fn pure_state_validation() {
        let t = tol();
        assert!(PureState::from_reals(&[0.5, 0.5], &t).is_err());
        let psi = PureState::from_unnormalized(vec![Scalar::new(3.0, 0.0), Scalar::new(4.0, 0.0)])
            .unwrap();
        assert!((psi.probabilities()[0] - 0.36).abs() < 1e-12);
    }
}
