//! Channel representations and conversions.
//!
//! Three interchangeable views of a quantum operation are provided:
//!
//! * [`KrausChannel`] — a set of Kraus operators, trace preserving (TP) or
//!   trace non-increasing (TNI);
//! * [`SchurMap`] — a channel acting as ρ ↦ A ⊙ ρ with A PSD and
//!   0 ≤ Aᵢᵢ ≤ 1; this is exactly the (stochastic) genuinely incoherent
//!   class, deterministic when Aᵢᵢ = 1;
//! * [`ChoiMatrix`] — the representation-independent channel identity
//!   J = (Λ ⊗ id)(|Ω⟩⟨Ω|) with the unnormalized |Ω⟩ = Σᵢ |ii⟩, so that a
//!   Schur channel's Choi matrix restricted to span{|ii⟩} is A itself.
//!
//! Canonical Kraus extraction goes through the phase-fixed spectral
//! decomposition of the Choi matrix, which makes decompositions reproducible
//! across runs.

use crate::error::{Error, Result};
use crate::numerics::{
    herm_eig, is_psd, kron, partial_trace, schur_product, ComplexMatrix, Scalar, Subsystem,
    ToleranceConfig, ZERO,
};
use crate::states::DensityMatrix;

/// Whether a Kraus set resolves the identity exactly or only up to a PSD gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Completeness {
    TracePreserving,
    TraceNonIncreasing,
}

/// A channel given by Kraus operators Λ[ρ] = Σᵢ Kᵢ ρ Kᵢ†.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
    completeness: Completeness,
}

impl KrausChannel {
    /// Validates Σ Kᵢ†Kᵢ and infers the completeness flag.
    pub fn new(kraus: Vec<ComplexMatrix>, tol: &ToleranceConfig) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidChannel("empty Kraus set".into()));
        }
        let d = kraus[0].rows();
        for k in &kraus {
            if k.rows() != d || k.cols() != d {
                return Err(Error::InvalidChannel(
                    "all Kraus operators must be square with equal dimension".into(),
                ));
            }
        }
        let s = kraus_sum(&kraus)?;
        let id = ComplexMatrix::identity(d);
        let completeness = if s.approx_eq(&id, tol.eq_tol * 10.0) {
            Completeness::TracePreserving
        } else {
            let gap = &id - &s;
            if is_psd(&gap, tol)? {
                Completeness::TraceNonIncreasing
            } else {
                return Err(Error::InvalidChannel(
                    "Kraus operators exceed the identity: Σ K†K ⋠ I".into(),
                ));
            }
        };
        Ok(Self {
            dim: d,
            kraus,
            completeness,
        })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            dim: d,
            kraus: vec![ComplexMatrix::identity(d)],
            completeness: Completeness::TracePreserving,
        }
    }

    pub fn from_unitary(u: ComplexMatrix, tol: &ToleranceConfig) -> Result<Self> {
        let d = u.rows();
        let gram = u.adjoint().matmul(&u)?;
        if !gram.approx_eq(&ComplexMatrix::identity(d), tol.eq_tol * 10.0) {
            return Err(Error::InvalidChannel("matrix is not unitary".into()));
        }
        Self::new(vec![u], tol)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn completeness(&self) -> Completeness {
        self.completeness
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.completeness == Completeness::TracePreserving
    }

    /// Λ[ρ] unnormalized plus the outcome probability Tr Λ[ρ].
    pub fn apply(&self, rho: &DensityMatrix) -> Result<(ComplexMatrix, f64)> {
        self.apply_matrix(rho.mat())
    }

    /// Same as [`Self::apply`] on a raw operator.
    pub fn apply_matrix(&self, rho: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
        if rho.rows() != self.dim || rho.cols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: rho.rows(),
            });
        }
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            out = out.add(&k.conjugate_with(rho)?)?;
        }
        let prob = out.trace().re;
        Ok((out, prob))
    }

    /// Normalized output state and its probability.
    pub fn apply_normalized(
        &self,
        rho: &DensityMatrix,
        tol: &ToleranceConfig,
    ) -> Result<(DensityMatrix, f64)> {
        let (out, prob) = self.apply(rho)?;
        if prob <= tol.eq_tol {
            return Err(Error::InvalidChannel(
                "outcome probability is zero; no conditional state".into(),
            ));
        }
        let state = DensityMatrix::new(out.scale(Scalar::new(1.0 / prob, 0.0)), tol)?;
        Ok((state, prob))
    }

    /// Choi matrix J = Σᵢ vec(Kᵢ) vec(Kᵢ)† in row-major vectorization.
    pub fn choi(&self) -> ChoiMatrix {
        let d = self.dim;
        let mut j = ComplexMatrix::zeros(d * d, d * d);
        for k in &self.kraus {
            let v = k.vec_rows();
            for (r, vr) in v.iter().enumerate() {
                if *vr == ZERO {
                    continue;
                }
                for (c, vc) in v.iter().enumerate() {
                    let cur = j.get(r, c);
                    j.set(r, c, cur + vr * vc.conj());
                }
            }
        }
        ChoiMatrix { dim: d, j }
    }

    /// New decomposition Lᵢ = Σⱼ Vᵢⱼ Kⱼ of the same map; V must have
    /// isometric columns (V†V = I) for the channel to be preserved.
    pub fn rotated(&self, v: &ComplexMatrix, tol: &ToleranceConfig) -> Result<KrausChannel> {
        if v.cols() != self.kraus.len() {
            return Err(Error::ShapeMismatch(format!(
                "rotation needs {} columns, got {}",
                self.kraus.len(),
                v.cols()
            )));
        }
        let mut new_kraus = Vec::with_capacity(v.rows());
        for i in 0..v.rows() {
            let mut l = ComplexMatrix::zeros(self.dim, self.dim);
            for (j, k) in self.kraus.iter().enumerate() {
                l = l.add(&k.scale(v.get(i, j)))?;
            }
            new_kraus.push(l);
        }
        KrausChannel::new(new_kraus, tol)
    }

    /// Schur representation aᵢⱼ = ⟨i|Λ(|i⟩⟨j|)|j⟩, valid only when the
    /// channel genuinely is a Schur map; the round trip is verified and
    /// non-Schur channels are rejected.
    pub fn to_schur(&self, tol: &ToleranceConfig) -> Result<SchurMap> {
        let d = self.dim;
        let mut a = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let mut entry = ZERO;
                for k in &self.kraus {
                    entry += k.get(i, i) * k.get(j, j).conj();
                }
                a.set(i, j, entry);
            }
        }
        let schur = SchurMap::new(a, tol)?;
        if !channels_equal(self, &schur.to_kraus(tol)?, tol)? {
            return Err(Error::InvalidChannel(
                "channel is not a Schur map (not genuinely incoherent)".into(),
            ));
        }
        Ok(schur)
    }
}

fn kraus_sum(kraus: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let d = kraus[0].rows();
    let mut s = ComplexMatrix::zeros(d, d);
    for k in kraus {
        s = s.add(&k.adjoint().matmul(k)?)?;
    }
    Ok(s)
}

/// A Schur (Hadamard-product) channel ρ ↦ A ⊙ ρ.
#[derive(Debug, Clone)]
pub struct SchurMap {
    dim: usize,
    a: ComplexMatrix,
}

impl SchurMap {
    /// Validates that A is PSD with real diagonal entries in [0, 1].
    pub fn new(a: ComplexMatrix, tol: &ToleranceConfig) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::InvalidChannel("Schur matrix must be square".into()));
        }
        if !is_psd(&a, tol)? {
            return Err(Error::InvalidChannel("Schur matrix must be PSD".into()));
        }
        for (i, z) in a.diag().iter().enumerate() {
            if z.im.abs() > tol.eq_tol || z.re < -tol.eq_tol || z.re > 1.0 + tol.eq_tol {
                return Err(Error::InvalidChannel(format!(
                    "Schur diagonal entry {i} must lie in [0, 1], got {z}"
                )));
            }
        }
        Ok(Self { dim: a.rows(), a })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            dim: d,
            a: ComplexMatrix::ones(d),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.a
    }

    /// True iff Aᵢᵢ = 1 for all i, i.e. the channel is trace preserving.
    pub fn is_deterministic(&self, tol: &ToleranceConfig) -> bool {
        self.a
            .diag()
            .iter()
            .all(|z| (z.re - 1.0).abs() <= tol.eq_tol * 10.0)
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<(ComplexMatrix, f64)> {
        self.apply_matrix(rho.mat())
    }

    pub fn apply_matrix(&self, rho: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
        let out = schur_product(&self.a, rho)?;
        let prob = out.trace().re;
        Ok((out, prob))
    }

    /// Canonical Kraus form: A = Σ λₖ vₖvₖ† gives Kₖ = √λₖ diag(vₖ).
    pub fn to_kraus(&self, tol: &ToleranceConfig) -> Result<KrausChannel> {
        let eig = herm_eig(&self.a, tol)?;
        let scale = eig.eigenvalues.first().copied().unwrap_or(0.0).abs();
        let mut kraus = Vec::new();
        for (k, &l) in eig.eigenvalues.iter().enumerate() {
            if l <= tol.psd_tol * scale.max(f64::MIN_POSITIVE) {
                continue;
            }
            let v = eig.eigenvector(k);
            let diag: Vec<Scalar> = v.iter().map(|z| z * l.sqrt()).collect();
            kraus.push(ComplexMatrix::diagonal(&diag));
        }
        if kraus.is_empty() {
            // The zero map; keep the set non-empty.
            kraus.push(ComplexMatrix::zeros(self.dim, self.dim));
        }
        KrausChannel::new(kraus, tol)
    }

    pub fn choi(&self) -> ChoiMatrix {
        let d = self.dim;
        let mut j = ComplexMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for jj in 0..d {
                j.set(i * d + i, jj * d + jj, self.a.get(i, jj));
            }
        }
        ChoiMatrix { dim: d, j }
    }
}

/// Choi matrix with the unnormalized-|Ω⟩ convention (Tr J = d for TP maps).
#[derive(Debug, Clone)]
pub struct ChoiMatrix {
    dim: usize,
    j: ComplexMatrix,
}

impl ChoiMatrix {
    pub fn new(dim: usize, j: ComplexMatrix, tol: &ToleranceConfig) -> Result<Self> {
        if j.rows() != dim * dim || j.cols() != dim * dim {
            return Err(Error::ShapeMismatch(format!(
                "Choi matrix for dimension {dim} must be {0}x{0}",
                dim * dim
            )));
        }
        if !is_psd(&j, tol)? {
            return Err(Error::InvalidChannel("Choi matrix must be PSD".into()));
        }
        let reduced = partial_trace(&j, (dim, dim), Subsystem::Second)?;
        let gap = &ComplexMatrix::identity(dim) - &reduced;
        if !gap.approx_eq(&ComplexMatrix::zeros(dim, dim), tol.eq_tol * 10.0)
            && !is_psd(&gap, tol)?
        {
            return Err(Error::InvalidChannel(
                "Choi matrix is not trace non-increasing".into(),
            ));
        }
        Ok(Self { dim, j })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.j
    }

    /// Minimal canonical Kraus decomposition from the spectral decomposition,
    /// keeping eigenvalues above psd_tol · ‖J‖₂.
    pub fn to_kraus(&self, tol: &ToleranceConfig) -> Result<KrausChannel> {
        let eig = herm_eig(&self.j, tol)?;
        let scale = eig
            .eigenvalues
            .iter()
            .map(|l| l.abs())
            .fold(0.0, f64::max);
        let mut kraus = Vec::new();
        for (k, &l) in eig.eigenvalues.iter().enumerate() {
            if l <= tol.psd_tol * scale.max(f64::MIN_POSITIVE) {
                continue;
            }
            let w = eig.eigenvector(k);
            let entries: Vec<Scalar> = w.iter().map(|z| z * l.sqrt()).collect();
            kraus.push(ComplexMatrix::from_vec_rows(self.dim, entries)?);
        }
        if kraus.is_empty() {
            kraus.push(ComplexMatrix::zeros(self.dim, self.dim));
        }
        KrausChannel::new(kraus, tol)
    }
}

/// Representation-independent channel equality via Choi matrices.
pub fn channels_equal(
    c1: &KrausChannel,
    c2: &KrausChannel,
    tol: &ToleranceConfig,
) -> Result<bool> {
    if c1.dim() != c2.dim() {
        return Err(Error::DimensionMismatch {
            expected: c1.dim(),
            got: c2.dim(),
        });
    }
    Ok(c1.choi().matrix().approx_eq(c2.choi().matrix(), tol.eq_tol))
}

/// Recovers the partial isometry V with Lᵢ = Σⱼ Vᵢⱼ Kⱼ relating two Kraus
/// representations of the same map, or `None` when the channels differ.
///
/// V is found by least squares over vectorized operators; the residual bound
/// is absolute at 1e-8 and V†V = I is checked on the support of the Gram
/// matrix of {Kⱼ}.
pub fn kraus_equivalence_isometry(
    c1: &KrausChannel,
    c2: &KrausChannel,
    tol: &ToleranceConfig,
) -> Result<Option<ComplexMatrix>> {
    if c1.dim() != c2.dim() {
        return Err(Error::DimensionMismatch {
            expected: c1.dim(),
            got: c2.dim(),
        });
    }
    if !channels_equal(c1, c2, tol)? {
        return Ok(None);
    }
    let n1 = c1.kraus().len();
    let n2 = c2.kraus().len();
    let d2 = c1.dim() * c1.dim();

    // Columns are vectorized Kraus operators.
    let m = ComplexMatrix::from_fn(d2, n1, |r, j| c1.kraus()[j].vec_rows()[r]);
    let t = ComplexMatrix::from_fn(d2, n2, |r, i| c2.kraus()[i].vec_rows()[r]);

    let gram = m.adjoint().matmul(&m)?;
    let rhs = m.adjoint().matmul(&t)?;
    let ginv = pseudo_inverse(&gram, tol)?;
    let vt = ginv.matmul(&rhs)?; // n1×n2, equals Vᵀ
    let v = vt.transpose();

    // Verify the defining relation.
    let mut residual = 0.0;
    for i in 0..n2 {
        let mut li = ComplexMatrix::zeros(c1.dim(), c1.dim());
        for (j, k) in c1.kraus().iter().enumerate() {
            li = li.add(&k.scale(v.get(i, j)))?;
        }
        residual += (&li - &c2.kraus()[i]).frobenius_norm();
    }
    if residual > 1e-8 {
        return Ok(None);
    }

    // Partial isometry on the support of the Gram matrix.
    let eig = herm_eig(&gram, tol)?;
    let scale = eig.eigenvalues.first().copied().unwrap_or(0.0).abs();
    let mut support = ComplexMatrix::zeros(n1, n1);
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        if l > tol.psd_tol * scale.max(f64::MIN_POSITIVE) {
            let w = eig.eigenvector(k);
            for a in 0..n1 {
                for b in 0..n1 {
                    let cur = support.get(a, b);
                    support.set(a, b, cur + w[a] * w[b].conj());
                }
            }
        }
    }
    let vtv = v.adjoint().matmul(&v)?;
    let gap = &vtv - &ComplexMatrix::identity(n1);
    let projected = support.matmul(&gap)?.matmul(&support)?;
    if projected.frobenius_norm() > 1e-7 {
        return Ok(None);
    }
    Ok(Some(v))
}

/// Moore–Penrose pseudo-inverse of a Hermitian PSD matrix.
fn pseudo_inverse(g: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let eig = herm_eig(g, tol)?;
    let scale = eig
        .eigenvalues
        .iter()
        .map(|l| l.abs())
        .fold(0.0, f64::max);
    let n = g.rows();
    let inv_vals: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| {
            if l > tol.psd_tol * scale.max(f64::MIN_POSITIVE) {
                1.0 / l
            } else {
                0.0
            }
        })
        .collect();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n)
            .map(|k| eig.eigenvectors.get(i, k) * inv_vals[k] * eig.eigenvectors.get(j, k).conj())
            .sum()
    }))
}

/// Applies the channel to one factor of a bipartite state via Kᵢ ⊗ I or
/// I ⊗ Kᵢ. The channel must be trace preserving.
pub fn apply_to_subsystem(
    ch: &KrausChannel,
    rho_big: &DensityMatrix,
    dims: (usize, usize),
    which: Subsystem,
    tol: &ToleranceConfig,
) -> Result<DensityMatrix> {
    let (d1, d2) = dims;
    if rho_big.dim() != d1 * d2 {
        return Err(Error::DimensionMismatch {
            expected: d1 * d2,
            got: rho_big.dim(),
        });
    }
    let local = match which {
        Subsystem::First => d1,
        Subsystem::Second => d2,
    };
    if ch.dim() != local {
        return Err(Error::DimensionMismatch {
            expected: local,
            got: ch.dim(),
        });
    }
    if !ch.is_trace_preserving() {
        return Err(Error::InvalidChannel(
            "subsystem application requires a trace-preserving channel".into(),
        ));
    }
    let lifted: Vec<ComplexMatrix> = ch
        .kraus()
        .iter()
        .map(|k| match which {
            Subsystem::First => kron(k, &ComplexMatrix::identity(d2)),
            Subsystem::Second => kron(&ComplexMatrix::identity(d1), k),
        })
        .collect();
    let big = KrausChannel::new(lifted, tol)?;
    let (out, _) = big.apply(rho_big)?;
    DensityMatrix::new(out, tol)
}

/// Local reduction of a bipartite deterministic Schur channel:
/// ãᵢⱼ = Σₖ σₖₖ a_{ik,jk}, satisfying tr₂(A ⊙ (ρ ⊗ σ)) = Ã ⊙ ρ for all ρ.
pub fn reduce_bipartite_gio(
    a_big: &SchurMap,
    sigma: &DensityMatrix,
    tol: &ToleranceConfig,
) -> Result<SchurMap> {
    let d = sigma.dim();
    if a_big.dim() != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            got: a_big.dim(),
        });
    }
    if !a_big.is_deterministic(tol) {
        return Err(Error::InvalidChannel(
            "bipartite reduction requires a deterministic Schur map".into(),
        ));
    }
    let sdiag = sigma.diag_probs();
    let a = a_big.matrix();
    let reduced = ComplexMatrix::from_fn(d, d, |i, j| {
        (0..d)
            .map(|k| a.get(i * d + k, j * d + k) * sdiag[k])
            .sum()
    });
    SchurMap::new(reduced, tol)
}

/// Sequential composition: runs `first`, then `then`.
pub fn compose(
    first: &KrausChannel,
    then: &KrausChannel,
    tol: &ToleranceConfig,
) -> Result<KrausChannel> {
    if first.dim() != then.dim() {
        return Err(Error::DimensionMismatch {
            expected: first.dim(),
            got: then.dim(),
        });
    }
    let mut kraus = Vec::with_capacity(first.kraus().len() * then.kraus().len());
    for b in then.kraus() {
        for a in first.kraus() {
            kraus.push(b.matmul(a)?);
        }
    }
    KrausChannel::new(kraus, tol)
}

/// Convex combination: scales each channel's Kraus set by √pₖ and
/// concatenates.
pub fn convex_mix(
    channels: &[KrausChannel],
    weights: &[f64],
    tol: &ToleranceConfig,
) -> Result<KrausChannel> {
    if channels.is_empty() || channels.len() != weights.len() {
        return Err(Error::InvalidParameter(
            "convex_mix needs matching non-empty channels and weights".into(),
        ));
    }
    let d = channels[0].dim();
    if channels.iter().any(|c| c.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: channels.iter().map(|c| c.dim()).find(|&x| x != d).unwrap(),
        });
    }
    let sum: f64 = weights.iter().sum();
    if weights.iter().any(|&w| w < -tol.eq_tol) || (sum - 1.0).abs() > tol.eq_tol * 100.0 {
        return Err(Error::InvalidParameter(
            "weights must be nonnegative and sum to 1".into(),
        ));
    }
    let mut kraus = Vec::new();
    for (c, &w) in channels.iter().zip(weights) {
        if w <= 0.0 {
            continue;
        }
        let sq = Scalar::new(w.sqrt(), 0.0);
        for k in c.kraus() {
            kraus.push(k.scale(sq));
        }
    }
    KrausChannel::new(kraus, tol)
}

/// Random deterministic Schur matrix: a complex Wishart matrix normalized to
/// unit diagonal.
pub fn random_deterministic_schur(
    d: usize,
    rng: &mut impl rand::Rng,
    tol: &ToleranceConfig,
) -> SchurMap {
    loop {
        let g = crate::numerics::random_gaussian_matrix(d, d, rng);
        let b = g.matmul(&g.adjoint()).expect("conformable");
        if b.diag().iter().any(|z| z.re < 1e-9) {
            continue;
        }
        let scale: Vec<f64> = b.diag().iter().map(|z| 1.0 / z.re.sqrt()).collect();
        let a = ComplexMatrix::from_fn(d, d, |i, j| b.get(i, j) * scale[i] * scale[j]);
        if let Ok(map) = SchurMap::new(a, tol) {
            return map;
        }
    }
}
