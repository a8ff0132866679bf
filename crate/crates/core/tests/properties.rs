//! Randomized and property-based invariants cutting across modules.

use gencoh_core::channels::{
    apply_to_subsystem, channels_equal, random_deterministic_schur, KrausChannel,
};
use gencoh_core::families::diagonal_unitary;
use gencoh_core::measures::{
    dephasing_distance, l1_coherence, rel_entropy_coherence, wigner_yanase,
};
use gencoh_core::numerics::{
    herm_eig, is_psd, kron, partial_trace, random_gaussian_matrix, schatten_norm, schur_product,
    ComplexMatrix, Scalar, Subsystem, ToleranceConfig,
};
use gencoh_core::states::{
    coherence_set, dephase, is_incoherent, majorizes, maximally_correlated, random_density,
    random_pure, DensityMatrix,
};
use gencoh_core::transforms::{gio_pure_to_mixed, sgio_optimal_probability};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn random_psd(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = random_gaussian_matrix(d, d, rng);
    g.matmul(&g.adjoint()).unwrap()
}

#[test]
fn schur_product_of_psd_is_psd() {
    let t = tol();
    let mut rng = ChaCha12Rng::seed_from_u64(2024);
    for trial in 0..1000 {
        let d = 2 + trial % 5; // dimensions 2..=6
        let a = random_psd(d, &mut rng);
        let b = random_psd(d, &mut rng);
        let prod = schur_product(&a, &b).unwrap();
        assert!(is_psd(&prod, &t).unwrap(), "trial {trial} dimension {d}");
    }
}

#[test]
fn herm_eig_reconstruction_on_larger_matrices() {
    let t = tol();
    let mut rng = ChaCha12Rng::seed_from_u64(7);
    for d in [2usize, 5, 9, 16] {
        for _ in 0..10 {
            let g = random_gaussian_matrix(d, d, &mut rng);
            let h = g.add(&g.adjoint()).unwrap().scale(Scalar::new(0.5, 0.0));
            let eig = herm_eig(&h, &t).unwrap();
            let residual = (&eig.reconstruct() - &h).frobenius_norm();
            assert!(
                residual < 1e-10 * h.frobenius_norm().max(1.0),
                "d = {d}, residual {residual}"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn schatten_norm_monotone_in_p(seed in 0u64..1_000_000, d in 2usize..5) {
        let t = tol();
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let m = random_gaussian_matrix(d, d, &mut rng);
        let mut prev = f64::INFINITY;
        for p in [1.0, 1.5, 2.0, 3.0, 6.0] {
            let v = schatten_norm(&m, p, &t).unwrap();
            prop_assert!(v <= prev + 1e-9);
            prev = v;
        }
        // The p = 2 case coincides with the entrywise norm.
        let frob = schatten_norm(&m, 2.0, &t).unwrap();
        let direct: f64 = m.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        prop_assert!((frob - direct).abs() < 1e-9 * direct.max(1.0));
    }

    #[test]
    fn partial_trace_of_product_recovers_factor(seed in 0u64..1_000_000, d in 2usize..4) {
        let t = tol();
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let rho = random_density(d, d, &mut rng).unwrap();
        let sigma = random_density(d, d, &mut rng).unwrap();
        let prod = kron(rho.mat(), sigma.mat());
        let back = partial_trace(&prod, (d, d), Subsystem::First).unwrap();
        prop_assert!(back.approx_eq(rho.mat(), t.eq_tol));
    }

    #[test]
    fn dephase_is_incoherent_with_same_diagonal(seed in 0u64..1_000_000, d in 2usize..5) {
        let t = tol();
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let rho = random_density(d, 1 + (seed as usize) % d, &mut rng).unwrap();
        let deph = dephase(&rho);
        prop_assert!(is_incoherent(&deph, &t));
        for i in 0..d {
            prop_assert!((deph.mat().get(i, i) - rho.mat().get(i, i)).norm() < 1e-14);
        }
    }

    #[test]
    fn coherence_set_fixed_by_diagonal_unitaries(seed in 0u64..1_000_000) {
        let t = tol();
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let psi = random_pure(4, &mut rng);
        let phases: Vec<f64> = (0..4).map(|_| rng.random_range(-3.0..3.0f64)).collect();
        let diag: Vec<Scalar> = phases.iter().map(|&p| Scalar::new(0.0, p).exp()).collect();
        let rotated: Vec<Scalar> = psi
            .amplitudes()
            .iter()
            .zip(&diag)
            .map(|(a, u)| a * u)
            .collect();
        let rotated = gencoh_core::states::PureState::new(rotated, &t).unwrap();
        let before: Vec<usize> = coherence_set(&psi, &t).indices().collect();
        let after: Vec<usize> = coherence_set(&rotated, &t).indices().collect();
        prop_assert_eq!(before, after);
    }
}

#[test]
fn majorization_reflexive_and_transitive() {
    let t = tol();
    let mut rng = ChaCha12Rng::seed_from_u64(99);
    for _ in 0..200 {
        let draw = |rng: &mut ChaCha12Rng| {
            let raw: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..1.0f64)).collect();
            let s: f64 = raw.iter().sum();
            raw.iter().map(|x| x / s).collect::<Vec<f64>>()
        };
        let p = draw(&mut rng);
        assert!(majorizes(&p, &p, &t).unwrap());

        let q = draw(&mut rng);
        let r = draw(&mut rng);
        if majorizes(&p, &q, &t).unwrap() && majorizes(&q, &r, &t).unwrap() {
            assert!(majorizes(&p, &r, &t).unwrap());
        }
    }
}

#[test]
fn gio_apply_agrees_between_kraus_and_schur_forms() {
    let t = tol();
    let mut rng = ChaCha12Rng::seed_from_u64(5);
    for d in [2usize, 3, 4] {
        for _ in 0..20 {
            let map = random_deterministic_schur(d, &mut rng, &t);
            let kraus = map.to_kraus(&t).unwrap();
            let rho = random_density(d, d, &mut rng).unwrap();
            let (a, pa) = map.apply(&rho).unwrap();
            let (b, pb) = kraus.apply(&rho).unwrap();
            assert!(a.approx_eq(&b, t.eq_tol));
            assert!((pa - pb).abs() < t.eq_tol);
        }
    }
}

#[test]
fn maximally_correlated_intertwines_local_gio() {
    // Applying a genuinely incoherent channel on the first subsystem of the
    // maximally correlated embedding matches embedding the channel output.
    let t = tol();
    let mut rng = ChaCha12Rng::seed_from_u64(31);
    for _ in 0..30 {
        let d = 2 + (rng.random_range(0..2u32) as usize);
        let rho = random_density(d, d, &mut rng).unwrap();
        let map = random_deterministic_schur(d, &mut rng, &t);
        let channel = map.to_kraus(&t).unwrap();

        let embedded = maximally_correlated(&rho);
        let lifted = apply_to_subsystem(&channel, &embedded, (d, d), Subsystem::First, &t).unwrap();

        let (out, _) = map.apply(&rho).unwrap();
        let direct = maximally_correlated(&DensityMatrix::new(out, &t).unwrap());
        assert!(lifted.mat().approx_eq(direct.mat(), 1e-9));
    }
}

#[test]
fn measures_faithful_on_random_states() {
    let t = tol();
    let mut rng = ChaCha12Rng::seed_from_u64(17);
    for _ in 0..50 {
        let d = 3;
        let coherent = loop {
            let rho = random_density(d, 2, &mut rng).unwrap();
            if !is_incoherent(&rho, &t) {
                break rho;
            }
        };
        assert!(rel_entropy_coherence(&coherent, &t).unwrap() > 1e-6);
        assert!(l1_coherence(&coherent) > 1e-6);
        assert!(dephasing_distance(&coherent, 2.0, &t).unwrap() > 1e-6);
        assert!(wigner_yanase(&coherent, None, &t).unwrap() > 1e-9);

        let probs: Vec<f64> = {
            let raw: Vec<f64> = (0..d).map(|_| rng.random_range(0.1..1.0f64)).collect();
            let s: f64 = raw.iter().sum();
            raw.iter().map(|x| x / s).collect()
        };
        let incoherent = DensityMatrix::from_diagonal(&probs, &t).unwrap();
        assert!(rel_entropy_coherence(&incoherent, &t).unwrap().abs() < 1e-10);
        assert!(l1_coherence(&incoherent) < 1e-12);
        assert!(wigner_yanase(&incoherent, None, &t).unwrap().abs() < 1e-10);
    }
}

#[test]
fn measures_invariant_under_diagonal_unitaries() {
    let t = tol();
    let mut rng = ChaCha12Rng::seed_from_u64(23);
    for _ in 0..20 {
        let rho = random_density(3, 3, &mut rng).unwrap();
        let phases: Vec<f64> = (0..3).map(|_| rng.random_range(-3.0..3.0f64)).collect();
        let u = diagonal_unitary(&phases, &t).unwrap();
        let (out, _) = u.apply(&rho).unwrap();
        let rotated = DensityMatrix::new(out, &t).unwrap();

        let pairs = [
            (
                rel_entropy_coherence(&rho, &t).unwrap(),
                rel_entropy_coherence(&rotated, &t).unwrap(),
            ),
            (l1_coherence(&rho), l1_coherence(&rotated)),
            (
                dephasing_distance(&rho, 2.0, &t).unwrap(),
                dephasing_distance(&rotated, 2.0, &t).unwrap(),
            ),
            (
                wigner_yanase(&rho, None, &t).unwrap(),
                wigner_yanase(&rotated, None, &t).unwrap(),
            ),
        ];
        for (a, b) in pairs {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }
}

#[test]
fn feasible_gio_plans_never_increase_measures() {
    // Deterministic feasibility implies every implemented quantifier is
    // monotone along the plan.
    let t = tol();
    let mut rng = ChaCha12Rng::seed_from_u64(47);
    for _ in 0..25 {
        let psi = random_pure(3, &mut rng);
        let map = random_deterministic_schur(3, &mut rng, &t);
        let (out, _) = map.apply(&psi.density()).unwrap();
        let target = DensityMatrix::new(out, &t).unwrap();
        let plan = gio_pure_to_mixed(&psi, &target, &t).unwrap();
        assert!(plan.is_feasible());

        let before = psi.density();
        assert!(
            rel_entropy_coherence(&target, &t).unwrap()
                <= rel_entropy_coherence(&before, &t).unwrap() + 1e-9
        );
        assert!(l1_coherence(&target) <= l1_coherence(&before) + 1e-9);
        assert!(
            dephasing_distance(&target, 2.0, &t).unwrap()
                <= dephasing_distance(&before, 2.0, &t).unwrap() + 1e-9
        );
        assert!(
            wigner_yanase(&target, None, &t).unwrap()
                <= wigner_yanase(&before, None, &t).unwrap() + 1e-9
        );
    }
}

#[test]
fn coherence_rank_never_increases_along_feasible_plans() {
    let t = tol();
    let mut rng = ChaCha12Rng::seed_from_u64(53);
    for _ in 0..30 {
        let psi = random_pure(3, &mut rng);
        let phi = random_pure(3, &mut rng);
        let plan = sgio_optimal_probability(&psi, &phi, &t).unwrap();
        if plan.is_feasible() {
            let (out, p) = plan
                .channel
                .as_ref()
                .unwrap()
                .apply_matrix(psi.density().mat())
                .unwrap();
            assert!(p > 0.0);
            let normalized =
                DensityMatrix::new(out.scale(Scalar::new(1.0 / p, 0.0)), &t).unwrap();
            let back = normalized.as_pure(&t).expect("pure output");
            let r_in = coherence_set(&psi, &t).len();
            let r_out = coherence_set(&back, &t).len();
            assert!(r_out <= r_in);
        }
    }
}

#[test]
fn channel_flags_preserved_by_composition_and_mixing() {
    let t = tol();
    let mut rng = ChaCha12Rng::seed_from_u64(61);
    let tp1 = random_deterministic_schur(3, &mut rng, &t).to_kraus(&t).unwrap();
    let tp2 = random_deterministic_schur(3, &mut rng, &t).to_kraus(&t).unwrap();
    let composed = gencoh_core::channels::compose(&tp1, &tp2, &t).unwrap();
    assert!(composed.is_trace_preserving());
    let mixed = gencoh_core::channels::convex_mix(&[tp1.clone(), tp2], &[0.4, 0.6], &t).unwrap();
    assert!(mixed.is_trace_preserving());

    // Mixing in a trace non-increasing channel demotes the flag.
    let half = KrausChannel::new(
        vec![ComplexMatrix::identity(3).scale(Scalar::new(0.5, 0.0))],
        &t,
    )
    .unwrap();
    let mixed = gencoh_core::channels::convex_mix(&[tp1, half], &[0.5, 0.5], &t).unwrap();
    assert!(!mixed.is_trace_preserving());
}

#[test]
fn g2_prime_informational_for_open_questions() {
    // Strong monotonicity remains open for the skew information and the
    // dephasing Schatten distances; the harness reports the observed values
    // without asserting a sign.
    let t = tol();
    let mut rng = ChaCha12Rng::seed_from_u64(4242);
    let wy = gencoh_core::measures::monotonicity_harness(
        &|rho| wigner_yanase(rho, None, &tol()),
        3,
        200,
        true,
        &mut rng,
        &t,
    )
    .unwrap();
    println!(
        "informational: skew-information selective-average excess = {:+.3e}",
        wy.max_g2_prime_violation.unwrap()
    );
    for p in [1.0, 2.0] {
        let report = gencoh_core::measures::monotonicity_harness(
            &move |rho| dephasing_distance(rho, p, &tol()),
            3,
            200,
            true,
            &mut rng,
            &t,
        )
        .unwrap();
        println!(
            "informational: dephasing-distance p={p} selective-average excess = {:+.3e}",
            report.max_g2_prime_violation.unwrap()
        );
        assert!(report.max_g2_prime_violation.unwrap().is_finite());
    }
    assert!(wy.max_g2_prime_violation.unwrap().is_finite());
}

#[test]
fn stochastic_optimum_never_beaten_on_random_pairs() {
    // For 200 random qutrit pairs, perturbed stochastic Schur maps that
    // still implement the conversion never exceed the claimed optimum.
    let t = tol();
    let mut rng = ChaCha12Rng::seed_from_u64(1234);
    let mut pairs_checked = 0;
    while pairs_checked < 200 {
        let psi = random_pure(3, &mut rng);
        let phi = random_pure(3, &mut rng);
        let plan = sgio_optimal_probability(&psi, &phi, &t).unwrap();
        if !plan.is_feasible() {
            continue;
        }
        pairs_checked += 1;
        let claimed = plan.probability;
        let opt = match plan.channel.as_ref().unwrap() {
            gencoh_core::transforms::PlanChannel::Schur(s) => s.matrix().clone(),
            _ => unreachable!(),
        };
        let target = phi.density();
        for _ in 0..500 {
            let eps: f64 = rng.random_range(0.0..0.3f64);
            let g = random_gaussian_matrix(3, 3, &mut rng);
            let herm = g.add(&g.adjoint()).unwrap().scale(Scalar::new(0.5 * eps, 0.0));
            let raw = opt.add(&herm).unwrap();
            let eig = herm_eig(&raw, &t).unwrap();
            let mut psd = ComplexMatrix::zeros(3, 3);
            for (k, &l) in eig.eigenvalues.iter().enumerate() {
                if l <= 0.0 {
                    continue;
                }
                let w = eig.eigenvector(k);
                for i in 0..3 {
                    for j in 0..3 {
                        let cur = psd.get(i, j);
                        psd.set(i, j, cur + w[i] * w[j].conj() * l);
                    }
                }
            }
            let max_diag = psd.diag().iter().map(|z| z.re).fold(0.0f64, f64::max);
            let candidate = if max_diag > 1.0 {
                psd.scale(Scalar::new(1.0 / max_diag, 0.0))
            } else {
                psd
            };
            let Ok(map) = gencoh_core::channels::SchurMap::new(candidate, &t) else {
                continue;
            };
            let (out, p) = map.apply(&psi.density()).unwrap();
            if p <= 1e-12 {
                continue;
            }
            let expected = target.mat().scale(Scalar::new(p, 0.0));
            if (&out - &expected).frobenius_norm() > 1e-9 {
                continue;
            }
            assert!(p <= claimed + 1e-9, "found {p} above the optimum {claimed}");
        }
    }
}

#[test]
fn choi_roundtrip_identity_on_random_gio_channels() {
    let t = tol();
    let mut rng = ChaCha12Rng::seed_from_u64(71);
    for d in [2usize, 3, 4] {
        for _ in 0..10 {
            let ch = random_deterministic_schur(d, &mut rng, &t).to_kraus(&t).unwrap();
            let j = ch.choi();
            let back = j.to_kraus(&t).unwrap().choi();
            assert!((j.matrix() - back.matrix()).frobenius_norm() < 1e-9);
            assert!(channels_equal(&ch, &j.to_kraus(&t).unwrap(), &t).unwrap());
        }
    }
}
