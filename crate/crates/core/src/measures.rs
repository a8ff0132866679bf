//! Genuine-coherence quantifiers and the monotonicity harness.
//!
//! Conventions: entropies are in bits (log₂), so the relative entropy of
//! coherence of |+₂⟩ is exactly 1. Every measure here is faithful (zero
//! exactly on incoherent states) and non-increasing under genuinely
//! incoherent channels; the harness measures violations empirically.

use serde::Serialize;

use crate::channels::SchurMap;
use crate::error::{Error, Result};
use crate::numerics::{
    herm_eig, matrix_sqrt, schatten_norm, shannon_entropy, von_neumann_entropy, ComplexMatrix,
    Scalar, ToleranceConfig,
};
use crate::states::{dephase, DensityMatrix};

/// How a measure value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Method {
    ClosedForm,
    Minimized { converged: bool, iterations: usize },
}

/// A computed coherence-measure value.
#[derive(Debug, Clone, Serialize)]
pub struct MeasureResult {
    pub measure: String,
    pub value: f64,
    pub method: Method,
}

impl MeasureResult {
    fn closed(measure: &str, value: f64) -> Self {
        Self {
            measure: measure.into(),
            value,
            method: Method::ClosedForm,
        }
    }
}

/// Relative entropy of coherence, S(Δ[ρ]) − S(ρ).
pub fn rel_entropy_coherence(rho: &DensityMatrix, tol: &ToleranceConfig) -> Result<f64> {
    let dephased = shannon_entropy(&rho.diag_probs(), tol);
    let entropy = von_neumann_entropy(rho.mat(), tol)?;
    Ok(dephased - entropy)
}

/// l₁-norm of coherence, Σ_{i≠j} |ρᵢⱼ|.
pub fn l1_coherence(rho: &DensityMatrix) -> f64 {
    let m = rho.mat();
    let mut total = 0.0;
    for i in 0..rho.dim() {
        for j in 0..rho.dim() {
            if i != j {
                total += m.get(i, j).norm();
            }
        }
    }
    total
}

/// Distance to the dephased state, ‖ρ − Δ[ρ]‖_p.
pub fn dephasing_distance(rho: &DensityMatrix, p: f64, tol: &ToleranceConfig) -> Result<f64> {
    let diff = rho.mat().sub(dephase(rho).mat())?;
    schatten_norm(&diff, p, tol)
}

/// Outcome of a simplex minimization.
#[derive(Debug, Clone)]
pub struct MinimizeOutcome {
    pub point: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Euclidean projection onto the probability simplex.
pub fn project_to_simplex(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut acc = 0.0;
    let mut theta = (sorted.iter().sum::<f64>() - 1.0) / n as f64;
    for (k, &v) in sorted.iter().enumerate() {
        acc += v;
        let candidate = (acc - 1.0) / (k + 1) as f64;
        if k + 1 == n || sorted[k + 1] <= candidate {
            theta = candidate;
            break;
        }
    }
    x.iter().map(|&v| (v - theta).max(0.0)).collect()
}

/// Objective value together with its (sub)gradient.
pub type ValueAndGrad = (f64, Vec<f64>);

/// Projected-gradient minimization of a convex function over the simplex.
///
/// With `smooth` set, Armijo backtracking line search is used and convergence
/// is declared when the gradient mapping is below opt_tol. Otherwise a
/// diminishing-step subgradient method runs, tracking the best iterate.
pub fn minimize_over_simplex(
    objective: &mut dyn FnMut(&[f64]) -> ValueAndGrad,
    start: &[f64],
    smooth: bool,
    tol: &ToleranceConfig,
) -> MinimizeOutcome {
    let mut x = project_to_simplex(start);
    let (mut fx, mut gx) = objective(&x);
    let mut best_x = x.clone();
    let mut best_f = fx;
    let mut converged = false;
    let mut iterations = 0;

    if smooth {
        let mut step = 1.0;
        for it in 0..tol.max_iter {
            iterations = it + 1;
            let trial_dir: Vec<f64> = x.iter().zip(&gx).map(|(xi, gi)| xi - step * gi).collect();
            let projected = project_to_simplex(&trial_dir);
            let movement: f64 = projected
                .iter()
                .zip(&x)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if movement / step.max(1e-12) <= tol.opt_tol {
                converged = true;
                break;
            }
            let (f_new, g_new) = objective(&projected);
            // Armijo condition on the projected step.
            if f_new <= fx - 1e-4 * movement * movement / step.max(1e-12) {
                x = projected;
                fx = f_new;
                gx = g_new;
                if fx < best_f {
                    best_f = fx;
                    best_x = x.clone();
                }
                step = (step * 1.5).min(1e3);
            } else {
                step *= 0.5;
                if step < 1e-14 {
                    converged = true;
                    break;
                }
            }
        }
    } else {
        let gnorm0: f64 = gx.iter().map(|g| g * g).sum::<f64>().sqrt().max(1e-12);
        let base = 0.5 / gnorm0;
        let mut last_improvement = 0usize;
        for it in 0..tol.max_iter {
            iterations = it + 1;
            let step = base / ((it + 1) as f64).sqrt();
            let trial: Vec<f64> = x.iter().zip(&gx).map(|(xi, gi)| xi - step * gi).collect();
            x = project_to_simplex(&trial);
            let (f_new, g_new) = objective(&x);
            fx = f_new;
            gx = g_new;
            if fx < best_f - tol.opt_tol * 0.01 {
                best_f = fx;
                best_x = x.clone();
                last_improvement = it;
            } else if fx < best_f {
                best_f = fx;
                best_x = x.clone();
            }
            // No meaningful progress for a long stretch: call it converged.
            if it > 200 && it - last_improvement > 200 {
                converged = true;
                break;
            }
        }
    }
    MinimizeOutcome {
        point: best_x,
        value: best_f,
        converged,
        iterations,
    }
}

/// Minimal Schatten-p distance from ρ to the incoherent states,
/// min_{σ diagonal} ‖ρ − σ‖_p, solved over the probability simplex.
///
/// Non-convergence is flagged in the result, never silent. For p = 2 the
/// minimizer is Δ[ρ] and the start point is already optimal.
pub fn min_distance_coherence(
    rho: &DensityMatrix,
    p: f64,
    tol: &ToleranceConfig,
) -> Result<MeasureResult> {
    min_distance_coherence_with_start(rho, p, None, tol).map(|(result, _)| result)
}

/// As [`min_distance_coherence`], optionally seeding a second optimization
/// run from `extra_start` and returning the best minimizer found.
pub fn min_distance_coherence_with_start(
    rho: &DensityMatrix,
    p: f64,
    extra_start: Option<&[f64]>,
    tol: &ToleranceConfig,
) -> Result<(MeasureResult, Vec<f64>)> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "Schatten distance needs p >= 1, got {p}"
        )));
    }
    let d = rho.dim();
    let rho_mat = rho.mat().clone();
    let tol_inner = *tol;
    let mut objective = move |q: &[f64]| -> (f64, Vec<f64>) {
        let diag: Vec<Scalar> = q.iter().map(|&v| Scalar::new(v, 0.0)).collect();
        let m = rho_mat
            .sub(&ComplexMatrix::diagonal(&diag))
            .expect("same shape");
        let eig = herm_eig(&m, &tol_inner).expect("difference of Hermitian matrices");
        let f = eig
            .eigenvalues
            .iter()
            .map(|l| l.abs().powf(p))
            .sum::<f64>()
            .powf(1.0 / p);
        let mut grad = vec![0.0; d];
        for (k, &l) in eig.eigenvalues.iter().enumerate() {
            if l.abs() < 1e-14 {
                continue;
            }
            let w = if f > 1e-14 {
                f.powf(1.0 - p) * l.abs().powf(p - 1.0) * l.signum()
            } else {
                0.0
            };
            for (i, g) in grad.iter_mut().enumerate() {
                *g -= w * eig.eigenvectors.get(i, k).norm_sqr();
            }
        }
        (f, grad)
    };
    let start = rho.diag_probs();
    let mut outcome = minimize_over_simplex(&mut objective, &start, p > 1.0, tol);
    if let Some(seed) = extra_start {
        let alt = minimize_over_simplex(&mut objective, seed, p > 1.0, tol);
        if alt.value < outcome.value {
            outcome = MinimizeOutcome {
                converged: outcome.converged || alt.converged,
                ..alt
            };
        }
    }
    Ok((
        MeasureResult {
            measure: format!("mindist(p={p})"),
            value: outcome.value,
            method: Method::Minimized {
                converged: outcome.converged,
                iterations: outcome.iterations,
            },
        },
        outcome.point,
    ))
}

/// Skew information −½ Tr([H, √ρ]²) for a nondegenerate diagonal H.
///
/// `None` selects the default H = diag(0, 1, …, d−1).
pub fn wigner_yanase(
    rho: &DensityMatrix,
    h: Option<&[f64]>,
    tol: &ToleranceConfig,
) -> Result<f64> {
    let d = rho.dim();
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
                return Err(Error::InvalidParameter(
                    "skew information requires a nondegenerate Hamiltonian".into(),
                ));
            }
        }
    }
    let sqrt_rho = matrix_sqrt(rho.mat(), tol)?;
    let hd: Vec<Scalar> = h.iter().map(|&x| Scalar::new(x, 0.0)).collect();
    let hm = ComplexMatrix::diagonal(&hd);
    let comm = hm.matmul(&sqrt_rho)?.sub(&sqrt_rho.matmul(&hm)?)?;
    let sq = comm.matmul(&comm)?;
    Ok(-0.5 * sq.trace().re)
}

/// Convenience dispatch used by the CLI.
pub fn evaluate(
    rho: &DensityMatrix,
    measure: &str,
    p: f64,
    h: Option<&[f64]>,
    tol: &ToleranceConfig,
) -> Result<MeasureResult> {
    match measure {
        "cr" => Ok(MeasureResult::closed("cr", rel_entropy_coherence(rho, tol)?)),
        "l1" => Ok(MeasureResult::closed("l1", l1_coherence(rho))),
        "dephase" => Ok(MeasureResult::closed(
            &format!("dephase(p={p})"),
            dephasing_distance(rho, p, tol)?,
        )),
        "mindist" => min_distance_coherence(rho, p, tol),
        "wy" => Ok(MeasureResult::closed("wy", wigner_yanase(rho, h, tol)?)),
        other => Err(Error::InvalidParameter(format!(
            "unknown measure '{other}' (expected cr|l1|dephase|mindist|wy)"
        ))),
    }
}

/// Empirical monotonicity results over randomized genuinely incoherent
/// channels.
#[derive(Debug, Clone, Serialize)]
pub struct HarnessReport {
    pub trials: usize,
    /// Max observed m(Λρ) − m(ρ) over deterministic applications.
    pub max_g2_violation: f64,
    /// Max observed Σᵢ qᵢ m(σᵢ) − m(ρ) over selective Kraus outcomes, when
    /// requested.
    pub max_g2_prime_violation: Option<f64>,
}

/// Runs G2 (and optionally G2′) monotonicity trials for `measure` on random
/// states against random deterministic Schur channels.
pub fn monotonicity_harness(
    measure: &dyn Fn(&DensityMatrix) -> Result<f64>,
    d: usize,
    trials: usize,
    check_g2_prime: bool,
    rng: &mut impl rand::Rng,
    tol: &ToleranceConfig,
) -> Result<HarnessReport> {
    let mut max_g2 = f64::NEG_INFINITY;
    let mut max_g2p = f64::NEG_INFINITY;
    for trial in 0..trials {
        let rank = 1 + trial % d;
        let rho = crate::states::random_density(d, rank, rng)?;
        let map = crate::channels::random_deterministic_schur(d, rng, tol);
        let before = measure(&rho)?;

        let (out, _) = map.apply(&rho)?;
        let after = measure(&DensityMatrix::new(out, tol)?)?;
        max_g2 = max_g2.max(after - before);

        if check_g2_prime {
            let avg = selective_average(measure, &map, &rho, tol)?;
            max_g2p = max_g2p.max(avg - before);
        }
    }
    Ok(HarnessReport {
        trials,
        max_g2_violation: max_g2,
        max_g2_prime_violation: if check_g2_prime { Some(max_g2p) } else { None },
    })
}

/// Σᵢ qᵢ m(σᵢ) over the canonical Kraus outcomes of a Schur channel.
pub fn selective_average(
    measure: &dyn Fn(&DensityMatrix) -> Result<f64>,
    map: &SchurMap,
    rho: &DensityMatrix,
    tol: &ToleranceConfig,
) -> Result<f64> {
    let kraus = map.to_kraus(tol)?;
    let mut avg = 0.0;
    for k in kraus.kraus() {
        let out = k.conjugate_with(rho.mat())?;
        let q = out.trace().re;
        if q <= 1e-12 {
            continue;
        }
        let sigma = DensityMatrix::new(out.scale(Scalar::new(1.0 / q, 0.0)), tol)?;
        avg += q * measure(&sigma)?;
    }
    Ok(avg)
}
