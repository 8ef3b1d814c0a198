use super::*;
use crate::character::{build_group, enumerate_characters, quadratic_character, CharacterFilter};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

fn table() -> &'static PrimeTable {
    static T: OnceLock<PrimeTable> = OnceLock::new();
    T.get_or_init(|| PrimeTable::new(200_000).unwrap())
}

#[test]
fn delta_values() {
    assert!((delta_g(3).unwrap() - (1.0 - 3.0 * 3f64.sqrt() / (2.0 * PI))).abs() < 1e-15);
    assert!((delta_g(3).unwrap() - 0.1730067).abs() < 1e-7);
    assert!((delta_g(5).unwrap() - 0.0645107).abs() < 1e-7);
    let mut prev = 1.0;
    for g in (3..=1001).step_by(2) {
        let d = delta_g(g).unwrap();
        assert!(d > 0.0 && d < prev);
        prev = d;
    }
    assert!(prev < 2e-6);
    assert!(delta_g(4).is_err() && delta_g(1).is_err());
}

#[test]
fn params_reduce_orders() {
    let p = OddOrderParams::new(9, 12).unwrap();
    assert_eq!((p.k_star, p.g_star), (4, 3));
    for k in (2..200).step_by(2) {
        assert!(OddOrderParams::new(3, k).unwrap().k_star >= 2);
    }
}

#[test]
fn select_z_examples() {
    let z = select_z(1, 4, 3).unwrap();
    assert_eq!(z.n, 1);
    assert!((z.cos_value - 3f64.sqrt() / 2.0).abs() < 1e-15);
    let z = select_z(0, 2, 3).unwrap();
    assert_eq!(z.n, 0);
    assert_eq!(z.cos_value, 1.0);
    // tie between n = 0 and n = 1 rounds down
    let z = select_z(1, 6, 3).unwrap();
    assert_eq!(z.n, 0);
    assert!((z.cos_value - 0.5).abs() < 1e-15);
    assert!((z.re_value - 0.5).abs() < 1e-15);
}

#[test]
fn select_z_positive_and_consistent() {
    for g in [3, 5, 7, 9] {
        for k in 1..=300 {
            for l in 0..k {
                let z = select_z(l, k, g).unwrap();
                assert!(z.cos_value > 0.0 && z.cos_value <= 1.0);
                assert!(
                    (z.cos_value - z.re_value).abs() < 1e-12,
                    "g={g} k={k} l={l}"
                );
            }
        }
    }
}

#[test]
fn mean_identity_examples() {
    let m = mean_identity(3, 2).unwrap();
    assert!((m.lhs - 0.75).abs() < 1e-15 && (m.rhs - 0.75).abs() < 1e-12);
    let m = mean_identity(3, 4).unwrap();
    assert!((m.lhs - 0.8080127).abs() < 1e-7 && m.abs_err < 1e-12);
    let m = mean_identity(3, 3).unwrap();
    assert_eq!(m.lhs, 1.0);
    assert!(m.abs_err < 1e-12);
    // the tan form belongs to even k*
    assert!((m.tan_form - 0.5).abs() < 1e-12);
    for g in (3..=15).step_by(2) {
        for k in 1..=300 {
            assert!(mean_identity(g, k).unwrap().abs_err < 1e-10, "g={g} k={k}");
        }
    }
}

#[test]
fn corr_sum_examples() {
    let grp = build_group(5, table()).unwrap();
    let psi = quadratic_character(&grp).unwrap();
    let s = corr_sum(10.0, &psi, 3, table()).unwrap();
    assert!((s - 0.5 * (0.5 + 1.0 / 3.0 + 1.0 / 7.0)).abs() < 1e-15);
    assert_eq!(corr_sum(1.5, &psi, 3, table()).unwrap(), 0.0);

    // k = 1: every unit weight is 1
    let principal = DirichletCharacter::principal(build_group(6, table()).unwrap());
    let s = corr_sum(1000.0, &principal, 3, table()).unwrap();
    let expect: f64 = table()
        .primes_up_to(1000)
        .iter()
        .filter(|&&p| p > 3)
        .map(|&p| 1.0 / p as f64)
        .sum();
    assert!((s - expect).abs() < 1e-12);
}

#[test]
fn corr_sum_bounded_by_prime_harmonic() {
    let total: f64 = table()
        .primes_up_to(10_000)
        .iter()
        .map(|&p| 1.0 / p as f64)
        .sum();
    for q in [7u64, 11, 13, 31, 101] {
        let grp = build_group(q, table()).unwrap();
        for psi in enumerate_characters(&grp, CharacterFilter::all()) {
            let s = corr_sum(10_000.0, &psi, 3, table()).unwrap();
            assert!(s <= total + 1e-12);
            if psi.order() % 3 == 0 || psi.order() == 1 {
                // every value lies in mu_3 exactly when order | 3
                if 3 % psi.order() == 0 {
                    assert!((total - 1.0 / q as f64 - s).abs() < 1e-12);
                }
            }
        }
    }
}

fn random_character(rng: &mut ChaCha8Rng, q: u64) -> DirichletCharacter {
    let grp = build_group(q, table()).unwrap();
    let exps: Vec<u64> = grp
        .generator_orders()
        .iter()
        .map(|&o| rng.gen_range(0..o))
        .collect();
    DirichletCharacter::new(grp, &exps).unwrap()
}

#[test]
fn distance_basics() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let chi = random_character(&mut rng, 35);
    let d = distance2(&chi, &chi, 1000.0, table()).unwrap();
    assert!((d - (1.0 / 5.0 + 1.0 / 7.0)).abs() < 1e-12);
    let twisted = distance2(&chi, &Archimedean(0.0), 1000.0, table()).unwrap();
    let one = PrimeValues {
        values: Default::default(),
        default: Complex64::new(1.0, 0.0),
    };
    assert!((twisted - distance2(&chi, &one, 1000.0, table()).unwrap()).abs() < 1e-12);
}

#[test]
fn distance_symmetric_and_triangle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x = 100_000.0;
    for _ in 0..100 {
        let mods: Vec<u64> = (0..3).map(|_| rng.gen_range(3..2000)).collect();
        let [f, h, w] = [0, 1, 2].map(|i| random_character(&mut rng, mods[i]));
        let fh = pretentious_distance(&f, &h, x, table()).unwrap();
        let hf = pretentious_distance(&h, &f, x, table()).unwrap();
        assert!((fh - hf).abs() < 1e-12);
        let fw = pretentious_distance(&f, &w, x, table()).unwrap();
        let wh = pretentious_distance(&w, &h, x, table()).unwrap();
        assert!(fh <= fw + wh + 1e-12);
    }
}

#[test]
fn chi_psi_distance_dominates_correlation_gap() {
    let y = 50_000.0;
    let total: f64 = table()
        .primes_up_to(50_000)
        .iter()
        .map(|&p| 1.0 / p as f64)
        .sum();
    for (qm, qc) in [(11u64, 7u64), (23, 13), (101, 19)] {
        let psi = enumerate_characters(
            &build_group(qm, table()).unwrap(),
            CharacterFilter::non_principal(),
        )
        .next()
        .unwrap();
        let chis = enumerate_characters(
            &build_group(qc, table()).unwrap(),
            CharacterFilter {
                exact_order: Some(3),
                ..Default::default()
            },
        );
        let s = corr_sum(y, &psi, 3, table()).unwrap();
        for chi in chis {
            let d = distance2(&chi, &psi, y, table()).unwrap();
            assert!(d >= total - s - 1e-12);
        }
    }
}

#[test]
fn min_t_recovers_twist() {
    let f = Archimedean(0.3);
    let r = min_distance_t(&f, 100_000.0, 1.0, table()).unwrap();
    assert!((r.t - 0.3).abs() < 1e-3, "t = {}", r.t);
    assert!(r.value < 1e-6);
    assert!(r.value <= r.value_at_zero);

    let grp = build_group(11, table()).unwrap();
    let chi = quadratic_character(&grp).unwrap();
    let r = min_distance_t(&chi, 10_000.0, 0.0, table()).unwrap();
    assert_eq!(r.t, 0.0);
    let r = min_distance_t(&chi, 10_000.0, 2.0, table()).unwrap();
    let one = Archimedean(0.0);
    assert!(r.value <= distance2(&chi, &one, 10_000.0, table()).unwrap() + 1e-15);
}

#[test]
fn sj_examples() {
    let t = sj_table(3, 2).unwrap();
    assert!((t.values[0] - 0.75).abs() < 1e-15);
    assert!((t.values[1] - 0.25).abs() < 1e-15);
    let t = sj_table(3, 1).unwrap();
    assert_eq!(t.values, vec![1.0]);
    assert_eq!(t.l1_tail, 0.0);
    let t = sj_table(3, 200).unwrap();
    assert!(t.l1_tail / 200f64.ln() < 10.0);
    for l in 0..200 {
        assert!(
            (t.reconstruct(l) - OddOrderParams::new(3, 200).unwrap().cos_weight(l)).abs() < 1e-12
        );
    }
    assert!(sj_table(3, 6).is_err());
}

#[test]
fn sj_closed_form_matches_dft() {
    for g in [3u64, 5, 7] {
        for k in 2..=500 {
            if crate::arith::gcd(g, k) != 1 {
                continue;
            }
            let t = sj_table(g, k).unwrap();
            assert!(t.max_discrepancy.unwrap() < 1e-10, "g={g} k*={k}");
            let mean = mean_identity(g, k).unwrap().lhs;
            assert!((t.values[0] - mean).abs() < 1e-12);
        }
    }
    // non-trivial g*: g = 9, k = 12 gives g* = 3, k* = 4
    let t = SjTable::new(9, 3, 4).unwrap();
    assert!(t.max_discrepancy.unwrap() < 1e-12);
}

#[test]
fn taylor_examples() {
    assert!((taylor_G(PI / 6.0).unwrap() - PI / 6.0 * 3f64.sqrt()).abs() < 1e-15);
    assert!((taylor_G(1e-6).unwrap() - 1.0).abs() < 1e-11);
    assert!(taylor_G(PI).is_err() && taylor_G(0.0).is_err());
    assert!((g_coefficient() - 1.0 / 3.0).abs() < 1e-8);
}

#[test]
fn optimal_m_is_stationary() {
    let r = optimal_m(1e6, 3, 3).unwrap();
    let c1 = ALPHA * (1.0 / 3.0) * PI * PI * (1.0 - delta_g(3).unwrap()) / 9.0;
    assert!((r.c1 - c1).abs() < 1e-8);
    assert!((r.m_real - (4.0 * r.c1 * 1e6f64.ln().ln()).sqrt()).abs() < 1e-12);
    let deriv = 0.5 / r.m_real - 2.0 * r.c1 * 1e6f64.ln().ln() / r.m_real.powi(3);
    assert!(deriv.abs() < 1e-12);
    let f0 = r.objective(r.m_real);
    assert!(f0 <= r.objective(2.0 * r.m_real) && f0 <= r.objective(r.m_real / 2.0));
    assert!(crate::arith::is_prime_u64(r.m_prime));
    assert!(optimal_m(2.0, 3, 3).is_err());
}
