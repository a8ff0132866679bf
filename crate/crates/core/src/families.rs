//! Membership decisions for the incoherent-operation families and the
//! witness channels that separate them.
//!
//! Representation-independent families (GIO, SGIO, FIO, MIO, DIO, TIO) are
//! decided from the channel itself; IO and SIO are reported at witness level
//! only, i.e. the verdict says whether the *provided* decomposition
//! certifies membership. PIO has no general decision procedure; we report
//! `Yes` when a positive certificate applies (monomial unitaries, or GIO in
//! dimension ≤ 3 where genuinely incoherent channels are mixed-unitary),
//! `No` when the flat-combination necessary condition provably fails, and
//! `Unknown` otherwise.

use serde::Serialize;

use crate::channels::{Completeness, KrausChannel};
use crate::error::{Error, Result};
use crate::numerics::{kron, ComplexMatrix, Scalar, ToleranceConfig, ONE, ZERO};
use crate::states::{dephase_matrix, matrix_is_diagonal, PureState};

/// Outcome of a membership test.
///
/// `WitnessYes` means the provided decomposition certifies membership;
/// families decided representation-independently never use it. `Unknown` is
/// reserved for PIO and other representation-existence questions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Yes,
    No,
    WitnessYes,
    Unknown,
}

impl Verdict {
    pub fn is_yes(self) -> bool {
        matches!(self, Verdict::Yes | Verdict::WitnessYes)
    }

    fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Yes
        } else {
            Verdict::No
        }
    }
}

/// The operation families tracked by a [`ClassificationReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    Gio,
    Sgio,
    Fio,
    Mio,
    Dio,
    Tio,
    Io,
    Sio,
    Pio,
}

/// Textual evidence attached to one family's verdict.
#[derive(Debug, Clone, Serialize)]
pub struct Evidence {
    pub family: Family,
    pub detail: String,
}

/// Per-family verdicts with supporting evidence.
#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub gio: Verdict,
    pub sgio: Verdict,
    pub fio: Verdict,
    pub mio: Verdict,
    pub dio: Verdict,
    pub tio: Verdict,
    pub io: Verdict,
    pub sio: Verdict,
    pub pio: Verdict,
    pub evidence: Vec<Evidence>,
}

impl ClassificationReport {
    /// Enforces the inclusion lattice at construction time: GIO ⇒ SGIO, TIO,
    /// FIO; FIO ⇒ DIO ⇒ MIO.
    fn validated(self) -> Result<Self> {
        let incons = |msg: &str| Err(Error::InvalidChannel(format!("inconsistent report: {msg}")));
        if self.gio == Verdict::Yes {
            if self.sgio != Verdict::Yes {
                return incons("GIO=Yes but SGIO!=Yes");
            }
            if self.tio != Verdict::Yes {
                return incons("GIO=Yes but TIO!=Yes");
            }
            if self.fio != Verdict::Yes {
                return incons("GIO=Yes but FIO!=Yes");
            }
        }
        if self.fio == Verdict::Yes && self.dio != Verdict::Yes {
            return incons("FIO=Yes but DIO!=Yes");
        }
        if self.dio == Verdict::Yes && self.mio != Verdict::Yes {
            return incons("DIO=Yes but MIO!=Yes");
        }
        Ok(self)
    }

    pub fn verdict(&self, family: Family) -> Verdict {
        match family {
            Family::Gio => self.gio,
            Family::Sgio => self.sgio,
            Family::Fio => self.fio,
            Family::Mio => self.mio,
            Family::Dio => self.dio,
            Family::Tio => self.tio,
            Family::Io => self.io,
            Family::Sio => self.sio,
            Family::Pio => self.pio,
        }
    }
}

/// True iff every column of `k` has at most one entry above eq_tol · ‖k‖₂.
pub fn is_incoherent_kraus_operator(k: &ComplexMatrix, tol: &ToleranceConfig) -> bool {
    let scale = k.frobenius_norm();
    for c in 0..k.cols() {
        let nonzeros = (0..k.rows())
            .filter(|&r| k.get(r, c).norm() > tol.eq_tol * scale)
            .count();
        if nonzeros > 1 {
            return false;
        }
    }
    true
}

/// The provided decomposition certifies incoherent-operation membership.
pub fn is_io_witness(c: &KrausChannel, tol: &ToleranceConfig) -> bool {
    c.kraus()
        .iter()
        .all(|k| is_incoherent_kraus_operator(k, tol))
}

/// The provided decomposition certifies strictly-incoherent membership:
/// every Kᵢ and Kᵢ† incoherent (one nonzero per column and per row).
pub fn is_sio_witness(c: &KrausChannel, tol: &ToleranceConfig) -> bool {
    c.kraus().iter().all(|k| {
        is_incoherent_kraus_operator(k, tol) && is_incoherent_kraus_operator(&k.adjoint(), tol)
    })
}

/// Genuinely incoherent: the channel fixes every incoherent state, tested as
/// Λ(|i⟩⟨i|) = |i⟩⟨i| for all basis states. Requires a TP channel.
pub fn is_gio(c: &KrausChannel, tol: &ToleranceConfig) -> Result<bool> {
    if c.completeness() != Completeness::TracePreserving {
        return Ok(false);
    }
    for i in 0..c.dim() {
        let basis = PureState::basis(c.dim(), i);
        let proj = ComplexMatrix::outer(basis.amplitudes(), basis.amplitudes());
        let (out, _) = c.apply_matrix(&proj)?;
        if !out.approx_eq(&proj, tol.eq_tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Stochastic genuinely incoherent: every canonical Kraus operator diagonal
/// (equivalently, the channel is a Schur map with 0 ≤ Aᵢᵢ ≤ 1).
pub fn is_sgio(c: &KrausChannel, tol: &ToleranceConfig) -> Result<bool> {
    let canonical = c.choi().to_kraus(tol)?;
    Ok(canonical
        .kraus()
        .iter()
        .all(|k| matrix_is_diagonal(k, tol)))
}

/// Fully incoherent: all canonical Kraus operators incoherent and of one
/// shared support form. Returns the verdict plus the conflicting column on
/// failure.
pub fn is_fio_with_evidence(
    c: &KrausChannel,
    tol: &ToleranceConfig,
) -> Result<(bool, Option<String>)> {
    let canonical = c.choi().to_kraus(tol)?;
    let d = c.dim();
    for col in 0..d {
        let mut assigned: Option<usize> = None;
        for (op_idx, k) in canonical.kraus().iter().enumerate() {
            let scale = k.frobenius_norm();
            for r in 0..d {
                if k.get(r, col).norm() > tol.eq_tol * scale {
                    match assigned {
                        None => assigned = Some(r),
                        Some(prev) if prev != r => {
                            return Ok((
                                false,
                                Some(format!(
                                    "column {col}: canonical operator {op_idx} places its nonzero \
                                     at row {r}, conflicting with row {prev}"
                                )),
                            ));
                        }
                        _ => {}
                    }
                }
            }
        }
    }
    Ok((true, None))
}

pub fn is_fio(c: &KrausChannel, tol: &ToleranceConfig) -> Result<bool> {
    Ok(is_fio_with_evidence(c, tol)?.0)
}

/// Maximally incoherent: Λ(|i⟩⟨i|) incoherent for all i (sufficient by
/// linearity over the incoherent simplex).
pub fn is_mio(c: &KrausChannel, tol: &ToleranceConfig) -> Result<bool> {
    for i in 0..c.dim() {
        let basis = PureState::basis(c.dim(), i);
        let proj = ComplexMatrix::outer(basis.amplitudes(), basis.amplitudes());
        let (out, _) = c.apply_matrix(&proj)?;
        if !matrix_is_diagonal(&out, tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Dephasing-covariant, decided by the two basis-pair conditions:
/// Λ(|x⟩⟨x|) incoherent and Δ(Λ(|x⟩⟨x'|)) = 0 for x ≠ x'.
pub fn is_dio(c: &KrausChannel, tol: &ToleranceConfig) -> Result<bool> {
    let d = c.dim();
    if !is_mio(c, tol)? {
        return Ok(false);
    }
    for x in 0..d {
        for xp in 0..d {
            if x == xp {
                continue;
            }
            let ex = PureState::basis(d, x);
            let exp = PureState::basis(d, xp);
            let op = ComplexMatrix::outer(ex.amplitudes(), exp.amplitudes());
            let (out, _) = c.apply_matrix(&op)?;
            let dephased = dephase_matrix(&out);
            if dephased.frobenius_norm() > tol.eq_tol * out.frobenius_norm().max(1.0) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Translationally invariant with respect to diag(`h`): the channel's
/// transfer operator commutes with the translation generator.
///
/// `h` must be nondegenerate; `None` selects the default diag(0, 1, …, d−1).
pub fn is_tio(c: &KrausChannel, h: Option<&[f64]>, tol: &ToleranceConfig) -> Result<bool> {
    let d = c.dim();
    let default: Vec<f64> = (0..d).map(|i| i as f64).collect();
    let h = h.unwrap_or(&default);
    if h.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: h.len(),
        });
    }
    let scale_h = h.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    for i in 0..d {
        for j in (i + 1)..d {
            if (h[i] - h[j]).abs() <= tol.eq_tol * scale_h {
                return Err(Error::InvalidParameter(format!(
                    "Hamiltonian must be nondegenerate, entries {i} and {j} coincide"
                )));
            }
        }
    }
    // Transfer operator in row-major vectorization: L = Σ K ⊗ conj(K).
    let mut transfer = ComplexMatrix::zeros(d * d, d * d);
    for k in c.kraus() {
        transfer = transfer.add(&kron(k, &k.conj()))?;
    }
    // Generator of t ↦ e^{−itH} · e^{itH} is diagonal with entries hᵢ − hⱼ.
    let gen_diag: Vec<Scalar> = (0..d * d)
        .map(|idx| Scalar::new(h[idx / d] - h[idx % d], 0.0))
        .collect();
    let g = ComplexMatrix::diagonal(&gen_diag);
    let commutator = &transfer.matmul(&g)? - &g.matmul(&transfer)?;
    Ok(commutator.frobenius_norm() <= tol.eq_tol * transfer.frobenius_norm().max(1.0))
}

/// Smallest "flatness deficit" over combinations L = cos(t)K₁ + e^{iχ}sin(t)K₂
/// of two diagonal Kraus operators, where the deficit is the spread of the
/// nonzero diagonal moduli of L. A genuinely incoherent channel admitting a
/// physically incoherent decomposition must reach deficit zero, so a strictly
/// positive minimum certifies PIO = No.
fn flat_combination_deficit(k1: &ComplexMatrix, k2: &ComplexMatrix) -> f64 {
    let d = k1.rows();
    let deficit = |t: f64, chi: f64| -> f64 {
        let alpha = Scalar::new(t.cos(), 0.0);
        let beta = Scalar::new(0.0, chi).exp() * t.sin();
        let moduli: Vec<f64> = (0..d)
            .map(|i| (alpha * k1.get(i, i) + beta * k2.get(i, i)).norm())
            .collect();
        let max = moduli.iter().fold(0.0f64, |m, &x| m.max(x));
        if max < 1e-12 {
            // The zero combination carries no information; treat as flat.
            return 0.0;
        }
        let nonzero: Vec<f64> = moduli.iter().copied().filter(|&m| m > 1e-9 * max).collect();
        let lo = nonzero.iter().fold(f64::INFINITY, |m, &x| m.min(x));
        max - lo
    };
    let mut best = f64::INFINITY;
    let mut best_pt = (0.0, 0.0);
    let steps_t = 90;
    let steps_chi = 180;
    for it in 0..=steps_t {
        let t = std::f64::consts::FRAC_PI_2 * it as f64 / steps_t as f64;
        for ic in 0..steps_chi {
            let chi = 2.0 * std::f64::consts::PI * ic as f64 / steps_chi as f64;
            let v = deficit(t, chi);
            if v < best {
                best = v;
                best_pt = (t, chi);
            }
        }
    }
    // Local refinement around the best grid point.
    let (mut t0, mut c0) = best_pt;
    let mut step = 0.05;
    for _ in 0..60 {
        let mut improved = false;
        for (dt, dc) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let v = deficit(t0 + dt, c0 + dc);
            if v < best {
                best = v;
                t0 += dt;
                c0 += dc;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

/// PIO verdict from the certificates this crate implements.
fn pio_verdict(
    c: &KrausChannel,
    gio: bool,
    tol: &ToleranceConfig,
    evidence: &mut Vec<Evidence>,
) -> Result<Verdict> {
    // A single monomial unitary (permutation × diagonal phases) is physically
    // incoherent by definition.
    if c.kraus().len() == 1 && c.is_trace_preserving() {
        let k = &c.kraus()[0];
        if is_incoherent_kraus_operator(k, tol) && is_incoherent_kraus_operator(&k.adjoint(), tol)
        {
            evidence.push(Evidence {
                family: Family::Pio,
                detail: "monomial unitary: permutation composed with diagonal phases".into(),
            });
            return Ok(Verdict::Yes);
        }
    }
    if gio && c.dim() <= 3 {
        evidence.push(Evidence {
            family: Family::Pio,
            detail: "genuinely incoherent channel in dimension ≤ 3 is mixed-unitary, hence \
                     physically incoherent"
                .into(),
        });
        return Ok(Verdict::Yes);
    }
    if gio {
        let canonical = c.choi().to_kraus(tol)?;
        if canonical.kraus().len() == 2 {
            let deficit = flat_combination_deficit(&canonical.kraus()[0], &canonical.kraus()[1]);
            if deficit > 1e-3 {
                evidence.push(Evidence {
                    family: Family::Pio,
                    detail: format!(
                        "no Kraus combination with equal nonzero diagonal moduli exists \
                         (best flatness deficit {deficit:.3e}); a physically incoherent \
                         decomposition would require one"
                    ),
                });
                return Ok(Verdict::No);
            }
        }
    }
    Ok(Verdict::Unknown)
}

/// Runs every decidable family test plus the witness tests on the provided
/// decomposition.
pub fn classification_report(
    c: &KrausChannel,
    tol: &ToleranceConfig,
) -> Result<ClassificationReport> {
    let mut evidence = Vec::new();

    let gio = is_gio(c, tol)?;
    if !gio {
        if let Some(i) = first_moved_basis_state(c, tol)? {
            evidence.push(Evidence {
                family: Family::Gio,
                detail: format!("basis state |{i}⟩⟨{i}| is not preserved"),
            });
        }
    }
    let sgio = is_sgio(c, tol)?;
    let (fio, fio_detail) = is_fio_with_evidence(c, tol)?;
    if let Some(detail) = fio_detail {
        evidence.push(Evidence {
            family: Family::Fio,
            detail,
        });
    }
    let mio = is_mio(c, tol)?;
    let dio = is_dio(c, tol)?;
    let tio = is_tio(c, None, tol)?;

    let io = is_io_witness(c, tol);
    if !io {
        if let Some(idx) = c
            .kraus()
            .iter()
            .position(|k| !is_incoherent_kraus_operator(k, tol))
        {
            evidence.push(Evidence {
                family: Family::Io,
                detail: format!("provided Kraus operator {idx} has a column with two nonzeros"),
            });
        }
    }
    let sio = is_sio_witness(c, tol);
    if io && !sio {
        if let Some(idx) = c
            .kraus()
            .iter()
            .position(|k| !is_incoherent_kraus_operator(&k.adjoint(), tol))
        {
            evidence.push(Evidence {
                family: Family::Sio,
                detail: format!("provided Kraus operator {idx} has a row with two nonzeros"),
            });
        }
    }

    let pio = pio_verdict(c, gio, tol, &mut evidence)?;

    ClassificationReport {
        gio: Verdict::from_bool(gio),
        sgio: Verdict::from_bool(sgio),
        fio: Verdict::from_bool(fio),
        mio: Verdict::from_bool(mio),
        dio: Verdict::from_bool(dio),
        tio: Verdict::from_bool(tio),
        io: if io { Verdict::WitnessYes } else { Verdict::No },
        sio: if sio { Verdict::WitnessYes } else { Verdict::No },
        pio,
        evidence,
    }
    .validated()
}

fn first_moved_basis_state(c: &KrausChannel, tol: &ToleranceConfig) -> Result<Option<usize>> {
    for i in 0..c.dim() {
        let basis = PureState::basis(c.dim(), i);
        let proj = ComplexMatrix::outer(basis.amplitudes(), basis.amplitudes());
        let (out, _) = c.apply_matrix(&proj)?;
        if !out.approx_eq(&proj, tol.eq_tol) {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Witness constructors
// ---------------------------------------------------------------------------

/// Erasing channel Λ[ρ] = |target⟩⟨target|, presented with Fourier-row Kraus
/// operators Kₖ = |target⟩⟨fₖ| so that the provided decomposition is an IO
/// witness but not an SIO witness. For d = 2 this is {|t⟩⟨+|, |t⟩⟨−|}.
pub fn erasing_map(d: usize, target: usize, tol: &ToleranceConfig) -> Result<KrausChannel> {
    if target >= d {
        return Err(Error::InvalidParameter(format!(
            "target {target} out of range for dimension {d}"
        )));
    }
    let omega = 2.0 * std::f64::consts::PI / d as f64;
    let norm = 1.0 / (d as f64).sqrt();
    let kraus: Vec<ComplexMatrix> = (0..d)
        .map(|k| {
            ComplexMatrix::from_fn(d, d, |r, c| {
                if r == target {
                    // ⟨f_k| row: conjugated Fourier amplitudes.
                    Scalar::new(0.0, -omega * (k * c) as f64).exp() * norm
                } else {
                    ZERO
                }
            })
        })
        .collect();
    KrausChannel::new(kraus, tol)
}

/// Unitary channel diag(e^{iφ₀}, …, e^{iφ_{d−1}}).
pub fn diagonal_unitary(phases: &[f64], tol: &ToleranceConfig) -> Result<KrausChannel> {
    let diag: Vec<Scalar> = phases.iter().map(|&p| Scalar::new(0.0, p).exp()).collect();
    KrausChannel::from_unitary(ComplexMatrix::diagonal(&diag), tol)
}

/// Unitary channel permuting the incoherent basis, |i⟩ ↦ |perm[i]⟩.
pub fn permutation_unitary(perm: &[usize], tol: &ToleranceConfig) -> Result<KrausChannel> {
    KrausChannel::from_unitary(permutation_matrix(perm)?, tol)
}

/// The matrix sending |i⟩ to |perm[i]⟩.
pub fn permutation_matrix(perm: &[usize]) -> Result<ComplexMatrix> {
    let d = perm.len();
    let mut seen = vec![false; d];
    for &p in perm {
        if p >= d || seen[p] {
            return Err(Error::InvalidParameter("not a permutation".into()));
        }
        seen[p] = true;
    }
    let mut m = ComplexMatrix::zeros(d, d);
    for (i, &p) in perm.iter().enumerate() {
        m.set(p, i, ONE);
    }
    Ok(m)
}

/// Convex mixture p · σₓ·σₓ + (1−p) · σ_z·σ_z; fully incoherent only at the
/// endpoints p ∈ {0, 1}.
pub fn pauli_mix(p: f64, tol: &ToleranceConfig) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "mixing weight must be in [0, 1], got {p}"
        )));
    }
    let sx = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])?;
    let sz = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0])?;
    let kraus = vec![
        sx.scale(Scalar::new(p.sqrt(), 0.0)),
        sz.scale(Scalar::new((1.0 - p).sqrt(), 0.0)),
    ];
    KrausChannel::new(kraus, tol)
}

/// The single-qubit channel {K₀ = |0⟩⟨+|, K₁ = |1⟩⟨−|} together with its
/// Hadamard-rotated decomposition {L± = (|0⟩⟨+| ± |1⟩⟨−|)/√2}; the same map,
/// incoherent in the first presentation only.
pub fn hadamard_demo_pair(tol: &ToleranceConfig) -> Result<(KrausChannel, KrausChannel)> {
    let s = 1.0 / 2.0f64.sqrt();
    let k0 = ComplexMatrix::from_real(2, 2, &[s, s, 0.0, 0.0])?;
    let k1 = ComplexMatrix::from_real(2, 2, &[0.0, 0.0, s, -s])?;
    let incoherent = KrausChannel::new(vec![k0, k1], tol)?;
    let h = 0.5;
    let lp = ComplexMatrix::from_real(2, 2, &[h, h, h, -h])?;
    let lm = ComplexMatrix::from_real(2, 2, &[h, h, -h, h])?;
    let rotated = KrausChannel::new(vec![lp, lm], tol)?;
    Ok((incoherent, rotated))
}

/// Fully depolarizing channel ρ ↦ I/d with Kraus {|i⟩⟨j|/√d}.
pub fn depolarizing(d: usize, tol: &ToleranceConfig) -> Result<KrausChannel> {
    let norm = 1.0 / (d as f64).sqrt();
    let mut kraus = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let mut k = ComplexMatrix::zeros(d, d);
            k.set(i, j, Scalar::new(norm, 0.0));
            kraus.push(k);
        }
    }
    KrausChannel::new(kraus, tol)
}

/// The two-Kraus genuinely incoherent channel
/// K₁ = diag(1, 0, cos θ, cos θ), K₂ = diag(0, 1, sin θ, i sin θ),
/// which is not physically incoherent for any θ ∈ (0, π/2).
pub fn gio_not_pio_example(theta: f64, tol: &ToleranceConfig) -> Result<KrausChannel> {
    if !(theta > 0.0 && theta < std::f64::consts::FRAC_PI_2) {
        return Err(Error::InvalidParameter(
            "theta must lie strictly inside (0, π/2)".into(),
        ));
    }
    let (s, c) = (theta.sin(), theta.cos());
    let k1 = ComplexMatrix::diagonal(&[ONE, ZERO, Scalar::new(c, 0.0), Scalar::new(c, 0.0)]);
    let k2 = ComplexMatrix::diagonal(&[ZERO, ONE, Scalar::new(s, 0.0), Scalar::new(0.0, s)]);
    KrausChannel::new(vec![k1, k2], tol)
}

/// Parameters of the qutrit fully incoherent family
/// Kᵢ = [[aᵢ, 0, cᵢ], [0, bᵢ, 0], [0, 0, 0]].
#[derive(Debug, Clone, Copy)]
pub struct FiQutritParams {
    pub a: [Scalar; 2],
    pub b: [Scalar; 2],
    pub c: [Scalar; 2],
}

impl FiQutritParams {
    /// The concrete trace-preserving instance b₁ = b₂ = 1/√2,
    /// a₁ = c₂ = √3/2, a₂ = −c₁ = 1/2.
    pub fn reference() -> Self {
        let s2 = 1.0 / 2.0f64.sqrt();
        let s3 = 3.0f64.sqrt() / 2.0;
        Self {
            a: [Scalar::new(s3, 0.0), Scalar::new(0.5, 0.0)],
            b: [Scalar::new(s2, 0.0), Scalar::new(s2, 0.0)],
            c: [Scalar::new(-0.5, 0.0), Scalar::new(s3, 0.0)],
        }
    }
}

/// Builds the qutrit fully incoherent channel from the family above,
/// validating the normalization constraints Σ|xᵢ|² = 1 (x = a, b, c) and
/// a₁c₁* + a₂c₂* = 0.
pub fn fi_qutrit_example(params: FiQutritParams, tol: &ToleranceConfig) -> Result<KrausChannel> {
    let FiQutritParams { a, b, c } = params;
    let check_unit = |name: &str, x: &[Scalar; 2]| -> Result<()> {
        let s: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        if (s - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "Σ|{name}ᵢ|² must equal 1, got {s}"
            )));
        }
        Ok(())
    };
    check_unit("a", &a)?;
    check_unit("b", &b)?;
    check_unit("c", &c)?;
    let cross = a[0] * c[0].conj() + a[1] * c[1].conj();
    if cross.norm() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "a₁c₁* + a₂c₂* must vanish, got {cross}"
        )));
    }
    let kraus: Vec<ComplexMatrix> = (0..2)
        .map(|i| {
            ComplexMatrix::new(
                3,
                3,
                vec![a[i], ZERO, c[i], ZERO, b[i], ZERO, ZERO, ZERO, ZERO],
            )
            .expect("static shape")
        })
        .collect();
    KrausChannel::new(kraus, tol)
}
