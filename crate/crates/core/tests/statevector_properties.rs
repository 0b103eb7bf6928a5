mod support;

use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use surflearn::protocol::{points, ProtocolPoint};
use surflearn::statevector::*;

fn layout(d: usize) -> Arc<CodeLayout> {
    Arc::new(CodeLayout::new(d).unwrap())
}

#[test]
fn channel_identity_on_grid() {
    let mut worst = 0.0f64;
    for i in 0..5 {
        for j in 0..5 {
            for k in 0..5 {
                let theta = PI * i as f64 / 4.0;
                let phi = 2.0 * PI * j as f64 / 5.0;
                let t = FRAC_PI_4 * k as f64 / 4.0;
                worst = worst.max(support::density::channel_identity_error(2, theta, phi, t));
            }
        }
    }
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn born_weights_sum_to_one() {
    for d in [2, 3] {
        for &(th, ph, t) in &[(0.3, 1.1, 0.2), (points::xyz().0, points::xyz().1, 0.6), (2.5, 4.0, FRAC_PI_4)] {
            let p = ProtocolPoint::new(th, ph, t).unwrap();
            let total: f64 = exhaustive_records(&p, layout(d)).unwrap().iter().map(|r| r.weight).sum();
            assert!((total - 1.0).abs() < 1e-10, "d={d}: {total}");
        }
    }
}

#[test]
fn coherent_information_decreases_with_strength() {
    for d in [2, 3] {
        let mut prev = f64::INFINITY;
        for i in 0..20 {
            let t = FRAC_PI_4 * i as f64 / 19.0;
            let p = ProtocolPoint::new(0.0, 0.0, t).unwrap();
            let ic = coherent_information(&p, layout(d), Plan::Exhaustive).unwrap().i_c;
            assert!(ic <= prev + 1e-12, "d={d} t={t}: {ic} > {prev}");
            prev = ic;
        }
    }
}

#[test]
fn monte_carlo_matches_exhaustive() {
    let p = ProtocolPoint::new(0.0, 0.0, 0.1 * PI).unwrap();
    let ex = coherent_information(&p, layout(2), Plan::Exhaustive).unwrap();
    let mc = coherent_information(&p, layout(2), Plan::MonteCarlo { samples: 10_000, seed: 17 }).unwrap();
    assert!((ex.i_c - mc.i_c).abs() < 3.0 * mc.std_err, "{} vs {} ± {}", ex.i_c, mc.i_c, mc.std_err);
}

#[test]
fn projective_reference_is_pure() {
    let (th, ph) = points::xyz();
    let p = ProtocolPoint::projective(th, ph).unwrap();
    for r in projected_ensemble(&p, layout(3), 500, 3).unwrap() {
        let b = r.signed_bloch;
        let norm = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
        // eigenvalues (1 ± |b|)/2
        assert!((norm - 1.0).abs() < 1e-9);
    }
}

fn string_probability(st: &CodeState, bias: f64, s: &[i8], order: &[usize]) -> f64 {
    let mut st = st.clone();
    let mut p = 1.0;
    for &q in order {
        let plus = st.outcome_probability(q, bias);
        p *= if s[q] == 1 { plus } else { 1.0 - plus };
        st.apply_kraus(q, bias, s[q]);
        st.normalize();
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The chain-rule probability of a record does not depend on the order in
    /// which qubits are measured.
    #[test]
    fn qubit_order_is_irrelevant(
        theta in 0.0..PI, phi in 0.0..(2.0 * PI), t in 0.0..FRAC_PI_4,
        mask in 0u32..32, perm_seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        let lay = layout(2);
        let p = ProtocolPoint::new(theta, phi, t).unwrap();
        let mut st = CodeState::prepare(lay.clone(), LogicalInit::EntangledWithReference).unwrap();
        st.rotate_all(theta, phi);
        let s: Vec<i8> = (0..5).map(|j| if mask >> j & 1 == 1 { -1 } else { 1 }).collect();
        let natural: Vec<usize> = (0..5).collect();
        let mut shuffled = natural.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(perm_seed));
        let bias = p.strength.bias();
        let a = string_probability(&st, bias, &s, &natural);
        let b = string_probability(&st, bias, &s, &shuffled);
        prop_assert!((a - b).abs() < 1e-12);
    }

    /// Mirroring the azimuth and conjugating the encoded logical state leaves
    /// every outcome probability unchanged.
    #[test]
    fn azimuth_mirror_covariance(
        theta in 0.0..PI, phi in 0.0..(2.0 * PI), t in 0.0..FRAC_PI_4,
        re in -1.0..1.0f64, im in -1.0..1.0f64,
    ) {
        let lay = layout(2);
        let alpha = Complex64::new(0.6, 0.0);
        let beta = Complex64::new(re, im);
        prop_assume!(beta.norm() > 1e-3);
        let strength = ProtocolPoint::new(theta, phi, t).unwrap().strength;
        let probs = |ph: f64, b: Complex64| -> Vec<f64> {
            let mut base = CodeState::prepare_logical(lay.clone(), alpha, b).unwrap();
            base.rotate_all(theta, ph);
            (0..32u32).map(|mask| {
                let s: Vec<i8> = (0..5).map(|j| if mask >> j & 1 == 1 { -1 } else { 1 }).collect();
                let mut st = base.clone();
                st.apply_kraus_string(&strength, &s);
                st.norm_sqr()
            }).collect()
        };
        let a = probs(phi, beta);
        let b = probs(2.0 * PI - phi, beta.conj());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-10);
        }
        let total: f64 = a.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    /// ρ_R is Hermitian, unit-trace and positive for sampled weak records.
    #[test]
    fn sampled_records_are_physical(theta in 0.0..PI, phi in 0.0..(2.0 * PI), t in 0.0..FRAC_PI_4, seed in any::<u64>()) {
        let p = ProtocolPoint::new(theta, phi, t).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = sample_record(&p, layout(2), &mut rng).unwrap();
        prop_assert!(r.c >= 0.0 && r.c <= 1.0);
        prop_assert!(r.i_s >= 0.0 && r.i_s <= 1.0 + 1e-12);
        let amps = LogicalAmplitudes {
            p_pp: r.p_pp,
            p_mm: r.p_mm,
            p_pm: Complex64::new(r.p_pm_re, r.p_pm_im),
        };
        let d = logical_density(&amps).unwrap();
        prop_assert!((d.rho[0][1] - d.rho[1][0].conj()).norm() < 1e-12);
        prop_assert!(((d.rho[0][0] + d.rho[1][1]).re - 1.0).abs() < 1e-12);
        let det = (d.rho[0][0] * d.rho[1][1] - d.rho[0][1] * d.rho[1][0]).re;
        prop_assert!(det >= -1e-10);
    }
}
