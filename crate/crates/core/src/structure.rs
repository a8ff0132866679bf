//! Structure of the genuinely incoherent channel set: extremality tests and
//! mixed-unitary decompositions.
//!
//! Deterministic Schur channels on dimensions 2 and 3 are always convex
//! mixtures of diagonal unitaries; the decomposition here is constructive, by
//! peeling rank-one unimodular projectors. Each peel subtracts t·vv† with
//! |vᵢ| = 1 and the largest t keeping the remainder PSD, which reduces the
//! rank by one and keeps the rescaled remainder unit-diagonal. The peel
//! vector must lie in the range of the remainder; for a one-dimensional
//! kernel a closed polygon of the kernel moduli always provides one (their
//! polygon inequality follows from the unit diagonal), which is exactly what
//! fails in dimension ≥ 4, where extremal non-unitary channels exist.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::channels::{convex_mix, KrausChannel, SchurMap};
use crate::error::{Error, Result};
use crate::families::is_gio;
use crate::numerics::{herm_eig, ComplexMatrix, Scalar, ToleranceConfig, ONE, ZERO};

/// Convex decomposition of a deterministic Schur matrix into unimodular
/// rank-one projectors, i.e. of the channel into diagonal unitaries.
#[derive(Debug, Clone)]
pub struct MixedUnitaryDecomposition {
    pub weights: Vec<f64>,
    /// Unimodular vectors vₖ; the k-th unitary is diag(vₖ).
    pub phase_vectors: Vec<Vec<Scalar>>,
}

impl MixedUnitaryDecomposition {
    /// Σ pₖ vₖvₖ†.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.phase_vectors[0].len();
        let mut out = ComplexMatrix::zeros(d, d);
        for (w, v) in self.weights.iter().zip(&self.phase_vectors) {
            for i in 0..d {
                for j in 0..d {
                    let cur = out.get(i, j);
                    out.set(i, j, cur + v[i] * v[j].conj() * *w);
                }
            }
        }
        out
    }

    pub fn residual(&self, target: &SchurMap) -> f64 {
        (&self.reconstruct() - target.matrix()).frobenius_norm()
    }

    pub fn terms(&self) -> usize {
        self.weights.len()
    }

    /// Reassembles the channel as a convex mixture of diagonal unitaries.
    pub fn to_channel(&self, tol: &ToleranceConfig) -> Result<KrausChannel> {
        let channels: Vec<KrausChannel> = self
            .phase_vectors
            .iter()
            .map(|v| KrausChannel::from_unitary(ComplexMatrix::diagonal(v), tol))
            .collect::<Result<_>>()?;
        convex_mix(&channels, &self.weights, tol)
    }
}

/// Extremality of a genuinely incoherent channel within the genuinely
/// incoherent (equivalently unital) channels.
///
/// With canonical diagonal Kraus vectors aᵢ, the channel is extremal iff the
/// n² vectors conj(aᵢ) ⊙ aⱼ are linearly independent. For d = 3 and n ≥ 2
/// those n² ≥ 4 vectors live in C³ and independence is impossible.
pub fn is_extremal_gio(c: &KrausChannel, tol: &ToleranceConfig) -> Result<bool> {
    if !is_gio(c, tol)? {
        return Err(Error::InvalidChannel(
            "extremality test requires a genuinely incoherent channel".into(),
        ));
    }
    let canonical = c.choi().to_kraus(tol)?;
    let d = c.dim();
    let n = canonical.kraus().len();
    if n * n > d {
        // Rank of a d-row matrix can never reach n².
        return Ok(false);
    }
    let diags: Vec<Vec<Scalar>> = canonical.kraus().iter().map(|k| k.diag()).collect();
    let mut columns: Vec<Vec<Scalar>> = Vec::with_capacity(n * n);
    for a in &diags {
        for b in &diags {
            columns.push((0..d).map(|i| a[i].conj() * b[i]).collect());
        }
    }
    let m = ComplexMatrix::from_fn(d, n * n, |i, j| columns[j][i]);
    let gram = m.adjoint().matmul(&m)?;
    let eig = herm_eig(&gram, tol)?;
    let top = eig.eigenvalues.first().copied().unwrap_or(0.0).abs();
    let rank = eig
        .eigenvalues
        .iter()
        .filter(|&&l| l > tol.psd_tol * top.max(f64::MIN_POSITIVE))
        .count();
    Ok(rank == n * n)
}

/// The two-Kraus genuinely incoherent channel that is extremal but not
/// unitary, for any dimension d ≥ 4: K₁ = diag(aₖ), K₂ = diag(bₖ) with
/// aₖ = 1/k and bₖ = iᵏ√(1 − aₖ²) for k ≤ 4, padded with (1, 0) beyond.
pub fn extremal_nonunitary_example(d: usize, tol: &ToleranceConfig) -> Result<KrausChannel> {
    if d < 4 {
        return Err(Error::InvalidParameter(
            "the extremal non-unitary construction needs dimension ≥ 4".into(),
        ));
    }
    let i_unit = Scalar::new(0.0, 1.0);
    let mut a = Vec::with_capacity(d);
    let mut b = Vec::with_capacity(d);
    for k in 1..=d {
        if k <= 4 {
            let ak = 1.0 / k as f64;
            a.push(Scalar::new(ak, 0.0));
            b.push(i_unit.powu(k as u32) * (1.0 - ak * ak).sqrt());
        } else {
            a.push(ONE);
            b.push(ZERO);
        }
    }
    KrausChannel::new(
        vec![ComplexMatrix::diagonal(&a), ComplexMatrix::diagonal(&b)],
        tol,
    )
}

/// Closes a polygon with the given side lengths (at most three nonzero):
/// returns planar vectors zₖ with |zₖ| = sides[k] and Σ zₖ = 0 exactly.
fn close_polygon(sides: &[f64]) -> Option<Vec<Scalar>> {
    let nz: Vec<usize> = (0..sides.len()).filter(|&k| sides[k] > 0.0).collect();
    match nz.len() {
        0 => Some(vec![ZERO; sides.len()]),
        1 => None,
        2 => {
            let (i, j) = (nz[0], nz[1]);
            if (sides[i] - sides[j]).abs() > 1e-6 * sides[i].max(sides[j]) {
                return None;
            }
            let mut z = vec![ZERO; sides.len()];
            z[i] = Scalar::new(sides[i], 0.0);
            z[j] = Scalar::new(-sides[i], 0.0);
            Some(z)
        }
        3 => {
            let (i, j, k) = (nz[0], nz[1], nz[2]);
            let (a, b, c) = (sides[i], sides[j], sides[k]);
            if a > b + c + 1e-9 || b > a + c + 1e-9 || c > a + b + 1e-9 {
                return None;
            }
            // Vertices 0 → (a, 0) → r → 0 with |r| = c and |r − (a,0)| = b.
            let x = (a * a + c * c - b * b) / (2.0 * a);
            let y = (c * c - x * x).max(0.0).sqrt();
            let mut z = vec![ZERO; sides.len()];
            z[i] = Scalar::new(a, 0.0);
            z[j] = Scalar::new(x - a, y);
            z[k] = Scalar::new(-x, -y);
            Some(z)
        }
        _ => None,
    }
}

/// Unimodular vector orthogonal to a single kernel vector, by closing the
/// polygon of its moduli.
fn unimodular_orthogonal_to(u: &[Scalar], cutoff: f64) -> Option<Vec<Scalar>> {
    let max = u.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let sides: Vec<f64> = u
        .iter()
        .map(|z| if z.norm() > cutoff * max { z.norm() } else { 0.0 })
        .collect();
    let z = close_polygon(&sides)?;
    // Need Σ conj(vₖ) uₖ = 0, i.e. conj(vₖ) uₖ = zₖ on the support.
    Some(
        u.iter()
            .zip(&z)
            .map(|(uk, zk)| {
                if uk.norm() > cutoff * max {
                    (zk / uk).conj()
                } else {
                    ONE
                }
            })
            .map(|v| {
                let n = v.norm();
                if n > 0.0 {
                    v / n
                } else {
                    ONE
                }
            })
            .collect(),
    )
}

/// Multi-start phase search for a unimodular vector orthogonal to every
/// kernel vector; used for dimensions where the polygon construction does
/// not apply.
fn unimodular_in_range_numeric(
    kernel: &[Vec<Scalar>],
    d: usize,
    restarts: usize,
) -> Option<Vec<Scalar>> {
    let mut rng = ChaCha12Rng::seed_from_u64(0x5eed);
    let objective = |theta: &[f64]| -> (f64, Vec<f64>) {
        let v: Vec<Scalar> = theta.iter().map(|&t| Scalar::new(0.0, t).exp()).collect();
        let mut f = 0.0;
        let mut grad = vec![0.0; d];
        for u in kernel {
            let s: Scalar = v.iter().zip(u).map(|(vk, uk)| vk.conj() * uk).sum();
            f += s.norm_sqr();
            for k in 0..d {
                let ds = Scalar::new(0.0, -1.0) * v[k].conj() * u[k];
                grad[k] += 2.0 * (s.conj() * ds).re;
            }
        }
        (f, grad)
    };
    for _ in 0..restarts {
        let mut theta: Vec<f64> =
            (0..d).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        let (mut f, mut g) = objective(&theta);
        let mut step = 0.5;
        for _ in 0..2000 {
            if f < 1e-22 {
                break;
            }
            let trial: Vec<f64> = theta.iter().zip(&g).map(|(t, gi)| t - step * gi).collect();
            let (ft, gt) = objective(&trial);
            if ft < f {
                theta = trial;
                f = ft;
                g = gt;
                step = (step * 1.3).min(2.0);
            } else {
                step *= 0.5;
                if step < 1e-14 {
                    break;
                }
            }
        }
        if f < 1e-18 {
            return Some(theta.iter().map(|&t| Scalar::new(0.0, t).exp()).collect());
        }
    }
    None
}

fn spectral_pinv_apply(
    eig: &crate::numerics::HermEig,
    cutoff: f64,
    v: &[Scalar],
) -> (Vec<Scalar>, f64) {
    let d = v.len();
    let mut out = vec![ZERO; d];
    let mut quad = 0.0;
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        if l <= cutoff {
            continue;
        }
        let w = eig.eigenvector(k);
        let coeff: Scalar = w.iter().zip(v).map(|(wi, vi)| wi.conj() * vi).sum();
        quad += coeff.norm_sqr() / l;
        for i in 0..d {
            out[i] += w[i] * coeff / l;
        }
    }
    (out, quad)
}

/// Decomposes a deterministic Schur channel into a convex mixture of
/// diagonal unitaries.
///
/// Dimension 2 uses the closed form; dimension 3 always succeeds by rank
/// peeling; higher dimensions are attempted with a numeric phase search for
/// the peel vectors and return `None` on failure — in particular on the
/// extremal non-unitary examples, where no decomposition exists.
pub fn mixed_unitary_decompose(
    a: &SchurMap,
    max_terms: usize,
    tol: &ToleranceConfig,
) -> Result<Option<MixedUnitaryDecomposition>> {
    if !a.is_deterministic(tol) {
        return Err(Error::InvalidChannel(
            "mixed-unitary decomposition applies to deterministic Schur channels".into(),
        ));
    }
    let d = a.dim();
    if max_terms == 0 {
        return Err(Error::InvalidParameter("max_terms must be positive".into()));
    }

    if d == 2 {
        let a12 = a.matrix().get(0, 1);
        let r = a12.norm().min(1.0);
        let phase = if r > 0.0 { a12 / r } else { ONE };
        // A₁₂ = r·e^{iφ} is reproduced by weights (1 ± r)/2 on the vectors
        // (1, ±e^{−iφ}).
        let v1 = vec![ONE, phase.conj()];
        let v2 = vec![ONE, -phase.conj()];
        let mut weights = Vec::new();
        let mut vectors = Vec::new();
        for (w, v) in [((1.0 + r) / 2.0, v1), ((1.0 - r) / 2.0, v2)] {
            if w > 1e-15 {
                weights.push(w);
                vectors.push(v);
            }
        }
        let dec = MixedUnitaryDecomposition {
            weights,
            phase_vectors: vectors,
        };
        return Ok(if dec.residual(a) < tol.opt_tol {
            Some(dec)
        } else {
            None
        });
    }

    let mut remaining = a.matrix().clone();
    let mut weight_left = 1.0;
    let mut weights = Vec::new();
    let mut vectors = Vec::new();

    for _ in 0..max_terms {
        let eig = herm_eig(&remaining, tol)?;
        let top = eig.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
        if top <= tol.psd_tol {
            break;
        }
        let cutoff = (tol.psd_tol * top).max(1e-11 * top);
        let rank = eig.eigenvalues.iter().filter(|&&l| l > cutoff).count();

        if rank <= 1 {
            // Unit-diagonal rank-one PSD matrix: automatically unimodular.
            let col: Vec<Scalar> = remaining.column(0);
            let v: Vec<Scalar> = col
                .iter()
                .map(|z| if z.norm() > 0.0 { z / z.norm() } else { ONE })
                .collect();
            weights.push(weight_left);
            vectors.push(v);
            break;
        }

        let v: Option<Vec<Scalar>> = if rank == d {
            Some(vec![ONE; d])
        } else if rank == d - 1 {
            let kernel = eig.eigenvector(d - 1);
            unimodular_orthogonal_to(&kernel, 1e-7).or_else(|| {
                unimodular_in_range_numeric(&[kernel], d, 20)
            })
        } else {
            let kernel: Vec<Vec<Scalar>> =
                (rank..d).map(|k| eig.eigenvector(k)).collect();
            unimodular_in_range_numeric(&kernel, d, 20)
        };
        let Some(v) = v else {
            return Ok(None);
        };

        let (_, quad) = spectral_pinv_apply(&eig, cutoff, &v);
        if quad <= 0.0 {
            return Ok(None);
        }
        let t = (1.0 / quad).min(1.0 - 1e-15);
        if t <= tol.psd_tol {
            return Ok(None);
        }
        weights.push(weight_left * t);
        vectors.push(v.clone());

        // Remainder (A − t·vv†)/(1 − t), resymmetrized with exact diagonal.
        let mut next = ComplexMatrix::from_fn(d, d, |i, j| {
            (remaining.get(i, j) - v[i] * v[j].conj() * t) / (1.0 - t)
        });
        for i in 0..d {
            next.set(i, i, ONE);
        }
        let herm = next.add(&next.adjoint())?.scale(Scalar::new(0.5, 0.0));
        remaining = herm;
        weight_left *= 1.0 - t;
    }

    let total: f64 = weights.iter().sum();
    if weights.is_empty() || (total - 1.0).abs() > 1e-6 {
        return Ok(None);
    }
    let dec = MixedUnitaryDecomposition {
        weights,
        phase_vectors: vectors,
    };
    Ok(if dec.residual(a) < tol.opt_tol {
        Some(dec)
    } else {
        None
    })
}
