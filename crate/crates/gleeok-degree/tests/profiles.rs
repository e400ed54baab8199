use gleeok_cipher::{BranchId, MasterKey, RoundSpan, State128, Target, TargetCipher};
use gleeok_degree::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const B1: Target = Target::Branch(BranchId::Branch1);
const B2: Target = Target::Branch(BranchId::Branch2);
const B3: Target = Target::Branch(BranchId::Branch3);

#[test]
fn published_degree_table() {
    let branch12 = [2, 4, 8, 16, 32, 64, 106, 120, 125, 127];
    let branch3 = [3, 9, 27, 81, 112, 122, 126, 127, 127, 127];
    for (target, row) in [
        (B1, branch12),
        (B2, branch12),
        (B3, branch3),
        (Target::Prf, branch3),
    ] {
        assert_eq!(degree_profile(target, 10).unwrap().bounds, row, "{target}");
    }
}

#[test]
fn prf_equals_branch3_every_round() {
    for r in 1..=12 {
        assert_eq!(
            degree_profile(Target::Prf, r).unwrap().bounds,
            degree_profile(B3, r).unwrap().bounds
        );
    }
}

fn has(list: &[IntegralDistinguisher], rounds: usize, half: bool, data: usize) -> bool {
    list.iter()
        .any(|d| d.rounds == rounds && d.leading_half == half && d.data_log2() == data)
}

#[test]
fn published_distinguishers() {
    let b1 = derive_integral_distinguishers(B1, 12).unwrap();
    assert!(has(&b1, 6, false, 65));
    assert!(has(&b1, 6, true, 65));
    assert!(has(&b1, 9, false, 126));
    assert!(!b1.iter().any(|d| d.rounds >= 10));
    let b3 = derive_integral_distinguishers(B3, 12).unwrap();
    assert!(has(&b3, 5, false, 113));
    assert!(!b3.iter().any(|d| d.rounds >= 8));
    let prf = derive_integral_distinguishers(Target::Prf, 12).unwrap();
    assert!(has(&prf, 7, false, 127));
    assert!(has(&prf, 6, true, 123));
    assert!(prf
        .iter()
        .all(|d| d.active_bits == d.degree_bound + 1 && d.active_bits <= 127));
}

fn random_key(rng: &mut ChaCha8Rng) -> MasterKey {
    MasterKey::from_halves(
        State128::from_u128(rng.gen()),
        State128::from_u128(rng.gen()),
    )
}

/// XOR of `cipher` over the affine space `base + span(active bit positions)`.
fn xor_sum(cipher: &TargetCipher, span: RoundSpan, base: u128, active: &[usize]) -> u128 {
    let mut acc = 0u128;
    for code in 0u64..(1 << active.len()) {
        let mut x = base;
        for (j, &pos) in active.iter().enumerate() {
            if (code >> j) & 1 == 1 {
                x ^= 1u128 << (127 - pos);
            }
        }
        acc ^= cipher.eval_span_raw(x, span);
    }
    acc
}

#[test]
fn small_distinguishers_balance_by_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for target in Target::ALL {
        for d in derive_integral_distinguishers(target, 6).unwrap() {
            if d.data_log2() > 16 {
                continue;
            }
            let (keyed, span) = if d.leading_half {
                (d.rounds + 1, RoundSpan::half_then_rounds(d.rounds))
            } else {
                (d.rounds, RoundSpan::full(d.rounds))
            };
            for _ in 0..20 {
                let cipher = TargetCipher::new(target, &random_key(&mut rng), keyed).unwrap();
                let mut positions: Vec<usize> = (0..128).collect();
                for i in 0..d.active_bits {
                    let j = rng.gen_range(i..128);
                    positions.swap(i, j);
                }
                let sum = xor_sum(&cipher, span, rng.gen(), &positions[..d.active_bits]);
                assert_eq!(sum, 0, "{d}");
            }
            checked += 1;
        }
    }
    // Branch1/2 rounds 1-3, Branch3 and PRF rounds 1-2, each with and
    // without the leading half.
    assert_eq!(checked, 2 * (3 + 3 + 2 + 2));
}

#[test]
fn one_bit_short_is_not_enough_for_one_sbox_round() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let cipher = TargetCipher::new(B3, &random_key(&mut rng), 1).unwrap();
        let base: u128 = rng.gen();
        let any_unbalanced = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]
            .iter()
            .any(|bits| xor_sum(&cipher, RoundSpan::full(1), base, bits) != 0);
        assert!(any_unbalanced);
    }
}

proptest! {
    #[test]
    fn profile_invariants(target in prop::sample::select(Target::ALL.to_vec()), rounds in 1usize..=12) {
        let p = degree_profile(target, rounds).unwrap();
        prop_assert_eq!(p.rounds(), rounds);
        let forward = if target == B1 || target == B2 { 2 } else { 3 };
        for r in 1..rounds {
            let (prev, next) = (p.bounds[r - 1], p.bounds[r]);
            prop_assert!(prev <= next && next <= 127);
            prop_assert!(next <= (forward * prev).min(carlet_step(128, prev, 3).unwrap()).min(127));
        }
    }

    #[test]
    fn carlet_is_monotone_and_bounded(g in 0usize..=128, inv in 1usize..8) {
        let c = carlet_step(128, g, inv).unwrap();
        prop_assert!(c >= g && c <= 128);
        if g < 128 {
            prop_assert!(carlet_step(128, g + 1, inv).unwrap() >= c);
        }
    }
}
