use super::*;
use crate::character::{enumerate_characters, CharacterFilter};
use std::sync::OnceLock;

fn table() -> &'static PrimeTable {
    static T: OnceLock<PrimeTable> = OnceLock::new();
    T.get_or_init(|| PrimeTable::new(1_000_000).unwrap())
}

#[test]
fn sifted_examples() {
    let s = find_sifted_primes(2, 50, 0.2, table()).unwrap();
    let ms: Vec<u64> = s.primes.iter().map(|p| p.m).collect();
    assert!(ms.contains(&7) && ms.contains(&3));
    assert!(!ms.contains(&13) && !ms.contains(&5));
    let seven = s.primes.iter().find(|p| p.m == 7).unwrap();
    assert_eq!(seven.least_odd_factor, Some(3));
    assert_eq!(seven.m_minus_one, vec![(2, 1), (3, 1)]);
    assert!(find_sifted_primes(2, 50, 0.6, table()).is_err());
}

#[test]
fn sifted_matches_direct_filter() {
    let (lo, hi, delta) = (1000, 100_000, 0.25);
    let got: Vec<u64> = find_sifted_primes(lo, hi, delta, table())
        .unwrap()
        .primes
        .iter()
        .map(|p| p.m)
        .collect();
    let bound = (hi as f64).powf(delta);
    let expect: Vec<u64> = (lo + 1..=hi)
        .filter(|&m| crate::arith::is_prime_u64(m))
        .filter(|&m| {
            let h = (m - 1) / 2;
            (m - 1) % 4 == 2
                && (2..)
                    .take_while(|d| d * d <= h)
                    .find(|d| h % d == 0)
                    .unwrap_or(h) as f64
                    > bound
        })
        .collect();
    assert_eq!(got, expect);
}

#[test]
fn small_order_examples() {
    assert_eq!(count_small_order(7).unwrap(), 2);
    assert_eq!(count_small_order(3).unwrap(), 0);
    assert_eq!(count_small_order(11).unwrap(), 2);
    assert!(count_small_order(15).is_err());
}

#[test]
fn small_order_methods_agree() {
    for &m in table().primes_up_to(10_000).iter().skip(1) {
        let a = count_small_order(m).unwrap();
        assert_eq!(a, count_small_order_by_sieve(m, table()).unwrap(), "m={m}");
        let large = (1..m)
            .filter(|&d| 2 * ((m - 1) / gcd(d, m - 1)) >= m - 1)
            .count() as u64;
        assert_eq!(a + large, m - 1);
    }
    for &m in table().primes_up_to(300).iter().skip(1) {
        let g = build_group(m, table()).unwrap();
        let direct = enumerate_characters(&g, CharacterFilter::all())
            .filter(|c| 2 * c.order() < m - 1)
            .count() as u64;
        assert_eq!(direct, count_small_order(m).unwrap());
    }
}

#[test]
fn bujold_without_constraints_keeps_all_odd() {
    let s = bujold_search(101, 1.5, 5.0, SearchMode::Exhaustive, table()).unwrap();
    assert_eq!(s.candidates.len(), 50);
    assert!(s
        .candidates
        .iter()
        .all(|c| c.psi.is_odd() && c.parity == Parity::Odd));
}

#[test]
fn bujold_constraints_and_chord_identity() {
    let s = bujold_search(101, 10.0, 5.0, SearchMode::Exhaustive, table()).unwrap();
    let g = build_group(101, table()).unwrap();
    let brute: Vec<String> = enumerate_characters(&g, CharacterFilter::all())
        .filter(|c| c.is_odd())
        .filter(|c| {
            [2u64, 3, 5, 7]
                .iter()
                .all(|&p| (c.value_complex(p) - 1.0).norm() <= 0.2)
        })
        .map(|c| c.id())
        .collect();
    let got: Vec<String> = s.candidates.iter().map(|c| c.psi.id()).collect();
    assert_eq!(got, brute);
    for c in &s.candidates {
        assert!(c.max_small_arg <= s.arg_threshold + 1e-15);
        for &(p, arg) in &c.small_values {
            let chord = (c.psi.value_complex(p) - 1.0).norm();
            assert!((chord - 2.0 * (PI * arg).sin().abs()).abs() < 1e-12);
        }
    }
}

#[test]
fn bujold_sampling_and_caps() {
    let a = bujold_search(
        1009,
        5.0,
        3.0,
        SearchMode::Sampled { count: 40, seed: 9 },
        table(),
    )
    .unwrap();
    let b = bujold_search(
        1009,
        5.0,
        3.0,
        SearchMode::Sampled { count: 40, seed: 9 },
        table(),
    )
    .unwrap();
    assert_eq!(a.scanned, 40);
    let ids = |s: &BujoldSearch| s.candidates.iter().map(|c| c.index).collect::<Vec<_>>();
    assert_eq!(ids(&a), ids(&b));
    assert!(bujold_search(
        EXHAUSTIVE_CAP + 39,
        5.0,
        3.0,
        SearchMode::Exhaustive,
        table()
    )
    .is_err());
}

#[test]
fn pick_psi_for_101() {
    let c = pick_psi(101, 3.0, 2.0, 3, SearchMode::Exhaustive, table()).unwrap();
    assert!(c.order == 50 || c.order == 100);
    assert!(c.psi.is_odd());
    assert!(pick_psi(7, 10.0, 5.0, 3, SearchMode::Exhaustive, table()).is_err());
}

#[test]
fn build_chi_reaches_full_agreement() {
    let psi = pick_psi(101, 3.0, 2.0, 3, SearchMode::Exhaustive, table())
        .unwrap()
        .psi;
    let qc = QCandidates {
        q_max: 10_000,
        include_products: false,
    };
    let c = build_chi(&psi, 3, 10.0, &qc, table()).unwrap();
    assert_eq!(c.agreement, 1.0);
    assert_eq!(c.chi.order(), 3);
    assert!(c.chi.pow(3).is_principal());
    assert_eq!(c.chi.conductor(), c.q);
    let again = agreement_score(&c.chi, &psi, 3, 10.0, table()).unwrap();
    assert_eq!(again, 1.0);
}

#[test]
fn build_chi_with_products() {
    let g = build_group(11, table()).unwrap();
    let psi = crate::character::quadratic_character(&g).unwrap();
    // a wide P forces the search through many moduli, products included
    let qc = QCandidates {
        q_max: 3000,
        include_products: true,
    };
    let c = build_chi(&psi, 3, 60.0, &qc, table()).unwrap();
    assert_eq!(c.chi.order(), 3);
    assert_eq!(c.chi.conductor(), c.q);
    assert!((agreement_score(&c.chi, &psi, 3, 60.0, table()).unwrap() - c.agreement).abs() < 1e-12);
    // products can only help
    let primes_only = build_chi(
        &psi,
        3,
        60.0,
        &QCandidates {
            q_max: 3000,
            include_products: false,
        },
        table(),
    )
    .unwrap();
    assert!(c.agreement >= primes_only.agreement);
}

#[test]
fn decomposition_symmetry_and_envelope() {
    let psi = pick_psi(101, 3.0, 2.0, 3, SearchMode::Exhaustive, table())
        .unwrap()
        .psi;
    let a = spsig_decomposition(1e5, &psi, 3, 100.0 * 101f64.ln(), 1e5, table()).unwrap();
    let b = spsig_decomposition(1e5, &psi.conj(), 3, 100.0 * 101f64.ln(), 1e5, table()).unwrap();
    assert!((a.corr_sum - b.corr_sum).abs() < 1e-12);
    let c = spsig_decomposition(1e6, &psi, 3, 100.0 * 101f64.ln(), 1e5, table()).unwrap();
    assert!((a.residual - c.residual).abs() < 1.0);
    assert!(a.residual.is_finite() && a.with_sj_residual.is_finite());
}

#[test]
fn goal2_within_bound() {
    let psi = pick_psi(101, 3.0, 2.0, 3, SearchMode::Exhaustive, table())
        .unwrap()
        .psi;
    let qc = QCandidates {
        q_max: 10_000,
        include_products: false,
    };
    let c = build_chi(&psi, 3, 10.0, &qc, table()).unwrap();
    let r = goal2(&c.chi, &psi, 3, 1e5, table()).unwrap();
    assert!(r.within_bound, "{r:?}");
    assert!(r.distance2 >= r.gap - 1e-12);
}

#[test]
fn goal2_monotone_under_substitution() {
    // replacing a disagreeing value by the maximizer never increases the distance
    use crate::pretentious::{distance2, PrimeValues};
    use num_complex::Complex64;
    let psi = pick_psi(101, 3.0, 2.0, 3, SearchMode::Exhaustive, table())
        .unwrap()
        .psi;
    let k = psi.order();
    let r = psi.group().root_denominator();
    let target = |p: u64| {
        let l = psi.angle(p).unwrap() / (r / k);
        crate::character::root_complex(crate::pretentious::select_z(l, k, 3).unwrap().n, 3)
    };
    let mut values = std::collections::BTreeMap::new();
    for &p in table().primes_up_to(200) {
        if p != 101 {
            values.insert(p, target(p) * crate::character::root_complex(1, 3));
        }
    }
    let mut f = PrimeValues {
        values,
        default: Complex64::new(1.0, 0.0),
    };
    let mut prev = distance2(&f, &psi, 1000.0, table()).unwrap();
    for &p in table().primes_up_to(200) {
        if p == 101 {
            continue;
        }
        f.values.insert(p, target(p));
        let d = distance2(&f, &psi, 1000.0, table()).unwrap();
        assert!(d <= prev + 1e-15);
        prev = d;
    }
}

#[test]
fn pipeline_small_range_fails_cleanly() {
    let cfg = PipelineConfig {
        m_max: 10,
        ..Default::default()
    };
    let r = run_pipeline(&cfg, table());
    assert_eq!(r.failed_stage.as_deref(), Some("sift"));
    assert!(r.m.is_none());
    let cfg = PipelineConfig {
        g: 4,
        ..Default::default()
    };
    assert_eq!(
        run_pipeline(&cfg, table()).failed_stage.as_deref(),
        Some("config")
    );
}

#[test]
fn pipeline_runs_at_small_scale() {
    let cfg = PipelineConfig {
        m_max: 20_000,
        horizon: 1e5,
        x: 1e5,
        ..Default::default()
    };
    let r = run_pipeline(&cfg, table());
    assert!(r.succeeded(), "{:?} {:?}", r.failed_stage, r.error);
    let m = r.m.unwrap();
    assert!(crate::arith::is_prime_u64(m));
    assert!(2 * r.k.unwrap() >= m - 1);
    assert_eq!(r.chi_order, Some(3));
    assert!(r.goal2.as_ref().unwrap().within_bound);
}

#[test]
fn config_parses_from_toml_keys() {
    let cfg: PipelineConfig =
        serde_json::from_str(r#"{"M": 500, "g": 5, "preset": "paper", "T": 12.0}"#).unwrap();
    assert_eq!((cfg.m_max, cfg.g, cfg.preset), (500, 5, Preset::Paper));
    assert_eq!(cfg.t_for(101), 12.0);
    assert_eq!(cfg.agree_p, 10.0);
}
