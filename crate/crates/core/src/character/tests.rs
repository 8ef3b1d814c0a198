use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::arith::{gcd, sieve_primes, PrimeTable};

fn table() -> PrimeTable {
    sieve_primes(100_000).unwrap()
}

fn all(q: u64, t: &PrimeTable) -> Vec<DirichletCharacter> {
    enumerate_characters(&build_group(q, t).unwrap(), CharacterFilter::all()).collect()
}

#[test]
fn enumeration_counts() {
    let t = table();
    assert_eq!(all(5, &t).len(), 4);
    let g7 = build_group(7, &t).unwrap();
    let cubic = CharacterFilter {
        order_divides: Some(3),
        non_principal: true,
        ..Default::default()
    };
    assert_eq!(enumerate_characters(&g7, cubic).count(), 2);
    let g11 = build_group(11, &t).unwrap();
    let odd = CharacterFilter {
        parity: Some(Parity::Odd),
        ..Default::default()
    };
    assert_eq!(enumerate_characters(&g11, odd).count(), 5);
    for q in 1..=300 {
        let chars = all(q, &t);
        assert_eq!(chars.len() as u64, build_group(q, &t).unwrap().order());
        // lexicographic and unique
        assert!(chars
            .windows(2)
            .all(|w| w[0].exponents() < w[1].exponents()));
    }
    for q in [1, 2] {
        let g = build_group(q, &t).unwrap();
        let prim = CharacterFilter {
            primitive_only: true,
            ..Default::default()
        };
        assert_eq!(enumerate_characters(&g, prim).count(), 0);
        assert_eq!(all(q, &t).len(), 1);
    }
}

#[test]
fn value_examples() {
    let t = table();
    let g5 = build_group(5, &t).unwrap();
    assert!(DirichletCharacter::principal(g5).value(3).is_one());
    for chi in all(6, &t) {
        assert_eq!(chi.value(3), UnitValue::Zero);
    }
    let g7 = build_group(7, &t).unwrap();
    // generator 3; chi(3) = e(1/3) means exponent 2 over order 6
    let cubic = DirichletCharacter::new(g7, &[2]).unwrap();
    assert_eq!(cubic.value(3), UnitValue::root(1, 3));
    assert_eq!(cubic.value(2), UnitValue::root(2, 3));
    assert_eq!(cubic.order(), 3);
}

#[test]
fn complete_multiplicativity_and_unit_circle() {
    let t = table();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for q in 1..=120u64 {
        for chi in all(q, &t) {
            let ord = chi.order();
            for _ in 0..20 {
                let a = rng.gen_range(0..3 * q);
                let b = rng.gen_range(0..3 * q);
                assert_eq!(chi.value(a * b), chi.value(a) * chi.value(b));
                match chi.value(a) {
                    UnitValue::Zero => assert!(gcd(a, q) > 1),
                    v => assert_eq!(ord % v.order().unwrap(), 0),
                }
            }
        }
    }
}

#[test]
fn orthogonality_over_residues_is_exact() {
    let t = table();
    for q in 1..=200u64 {
        for chi in all(q, &t) {
            let r = chi.group().root_denominator();
            // exact: count how often each angle occurs, then the sum vanishes
            // iff the multiset of angles is uniform over the value subgroup
            let mut counts = vec![0u64; r as usize];
            for n in 1..=q {
                if let Some(a) = chi.angle(n) {
                    counts[a as usize] += 1;
                }
            }
            if chi.is_principal() {
                assert_eq!(counts[0], chi.group().order());
            } else {
                let ord = chi.order();
                let step = r / ord;
                let expected = chi.group().order() / ord;
                for (a, &c) in counts.iter().enumerate() {
                    let want = if a as u64 % step == 0 { expected } else { 0 };
                    assert_eq!(c, want, "q={q} chi={chi}");
                }
            }
        }
    }
}

#[test]
fn dual_orthogonality_spot_checks() {
    let t = table();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for q in (3..=200u64).step_by(7) {
        let chars = all(q, &t);
        let phi = chars.len() as f64;
        for _ in 0..100 {
            let a = rng.gen_range(1..q);
            let b = rng.gen_range(1..q);
            let s: num_complex::Complex64 = chars
                .iter()
                .map(|c| (c.value(a) * c.value(b).conj()).to_complex())
                .sum();
            let want = if gcd(a, q) == 1 && a % q == b % q {
                phi
            } else {
                0.0
            };
            assert!(
                (s.re - want).abs() < 1e-9 && s.im.abs() < 1e-9,
                "q={q} a={a} b={b}"
            );
        }
    }
}

#[test]
fn order_of_powers() {
    let t = table();
    for q in [7u64, 8, 9, 15, 16, 21, 24, 35, 63, 64, 100] {
        for chi in all(q, &t) {
            let o = chi.order();
            for j in 0..2 * o + 1 {
                assert_eq!(chi.pow(j).order(), o / gcd(j, o));
            }
            assert!(chi.pow(o).is_principal());
        }
    }
}

#[test]
fn parity_matches_direct_evaluation() {
    let t = table();
    for q in 3..=300u64 {
        for chi in all(q, &t) {
            let direct = chi.value(q - 1);
            let expect = match chi.parity() {
                Parity::Even => UnitValue::ONE,
                Parity::Odd => UnitValue::root(1, 2),
            };
            assert_eq!(direct, expect, "q={q} chi={chi}");
        }
    }
}

fn brute_conductor(chi: &DirichletCharacter) -> u64 {
    let q = chi.modulus();
    (1..=q)
        .filter(|f| q % f == 0)
        .find(|&f| {
            (1..q)
                .filter(|&a| gcd(a, q) == 1)
                .all(|a| (a % f != 1 % f) || chi.value(a).is_one())
        })
        .unwrap()
}

#[test]
fn conductor_examples_and_brute_force() {
    let t = table();
    let g12 = build_group(12, &t).unwrap();
    assert_eq!(DirichletCharacter::principal(g12).conductor(), 1);
    let g5 = build_group(5, &t).unwrap();
    let quad5 = quadratic_character(&g5).unwrap();
    assert_eq!(quad5.conductor(), 5);
    assert!(quad5.is_primitive());
    let g9 = build_group(9, &t).unwrap();
    let induced = quadratic_character(&g9).unwrap();
    assert_eq!(induced.conductor(), 3);
    assert!(!induced.is_primitive());
    for q in 1..=200u64 {
        for chi in all(q, &t) {
            assert_eq!(chi.conductor(), brute_conductor(&chi), "q={q} chi={chi}");
        }
    }
}

#[test]
fn text_form_roundtrip() {
    let t = table();
    for q in [1u64, 2, 12, 40, 97] {
        let g = build_group(q, &t).unwrap();
        for chi in enumerate_characters(&g, CharacterFilter::all()) {
            let back = parse_character(&chi.id(), &t).unwrap();
            assert_eq!(back, chi);
        }
    }
    assert!(parse_character("12:1", &t).is_err());
    assert!(parse_character("x:1", &t).is_err());
    assert!(parse_character("7:a", &t).is_err());
}

#[test]
fn angle_table_agrees_with_pointwise_angles() {
    let t = table();
    for q in [1u64, 2, 3, 8, 30, 64, 105, 360] {
        let g = build_group(q, &t).unwrap();
        for chi in enumerate_characters(&g, CharacterFilter::all()) {
            let tab = chi.angle_table();
            for n in 0..q {
                let want = chi.angle(n).map_or(NON_UNIT, |a| a as u32);
                assert_eq!(tab[n as usize], want);
            }
        }
    }
}
