use gleeok_cipher::{
    apply_linear, apply_theta, BranchId, Gf2Matrix128, LinearParams, State128, ThetaParams,
};
use gleeok_linlayer::*;
use gleeok_sbox::{build_table, SboxName, TableKind};
use gleeok_stats::{estimate_linear_correlation, SamplingPlan};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state(rng: &mut ChaCha8Rng) -> State128 {
    State128::from_u128(rng.gen())
}

fn linear_params() -> impl Strategy<Value = LinearParams> {
    (
        prop::sample::subsequence((0..128usize).collect::<Vec<_>>(), 3),
        0usize..64,
    )
        .prop_map(|(t, k)| LinearParams::new(t[0], t[1], t[2], 2 * k + 1).unwrap())
}

#[test]
fn transpose_identity_for_the_original_parameters() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for branch in BranchId::ALL {
        for _ in 0..1000 {
            let (b, x) = (random_state(&mut rng), random_state(&mut rng));
            let a = theta_transpose(branch.theta(), b);
            assert_eq!(a.dot(x), b.dot(apply_theta(branch.theta(), x)));
        }
    }
}

#[test]
fn double_transpose_restores_theta() {
    let theta = BranchId::Branch3.theta();
    let once = Gf2Matrix128::from_map(|b| theta_transpose(theta, b));
    assert_eq!(once.transpose(), Gf2Matrix128::theta(theta));
}

#[test]
fn direct_rule_is_wrong() {
    let theta = BranchId::Branch3.theta();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let probes: Vec<State128> = (0..64).map(|_| random_state(&mut rng)).collect();
    let bad = direct_rule_violations(theta, (0..128).map(State128::unit), &probes);
    assert_eq!(bad.len(), 128);
}

#[test]
fn original_parameters_pass_their_own_filters() {
    let original = BranchId::Branch3.linear();
    let summary = diffusion_summary(original, HalfLayer::Sbox);
    assert_eq!(summary.full_after, Some(4));
    let v = passes_diffusion_filters(original, DiffusionConvention::LOCKED);
    assert!(v.full_diffusion && v.pass);
    assert_eq!(Some(v.min_influence), summary.min_influence_before_full);
}

#[test]
fn repeated_offsets_and_even_multipliers_are_rejected() {
    assert!(ThetaParams::new(7, 7, 23).is_err());
    assert!(LinearParams::new(7, 15, 23, 12).is_err());
}

#[test]
fn influence_is_monotone_for_the_original() {
    let original = BranchId::Branch3.linear();
    for start in [HalfLayer::Sbox, HalfLayer::Linear] {
        let maps: Vec<InfluenceMap> = (0..=6)
            .map(|h| influence_after(original, start, h).unwrap())
            .collect();
        for w in maps.windows(2) {
            assert!(w[0].is_within(&w[1]));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transpose_identity(params in linear_params(), b: u128, x: u128) {
        let (b, x) = (State128::from_u128(b), State128::from_u128(x));
        prop_assert_eq!(theta_transpose(params.theta, b).dot(x), b.dot(apply_theta(params.theta, x)));
        prop_assert_eq!(linear_transpose(params, b).dot(x), b.dot(apply_linear(params, x)));
    }

    #[test]
    fn theta_is_always_invertible(params in linear_params()) {
        prop_assert_eq!(Gf2Matrix128::theta(params.theta).rank(), 128);
    }

    // The fast kernel uses rotation symmetry and forward sets; the slow
    // route composes full dependency matrices.
    #[test]
    fn kernel_agrees_with_the_dependency_matrices(params in linear_params(), which in 0usize..4) {
        let convention = DiffusionConvention::CANDIDATES[which];
        let (full, min) = DiffusionKernel::new(params.pi).measure(params.theta.offsets(), convention);
        let end = influence_after(params, convention.start, convention.full_within).unwrap();
        let before = influence_after(params, convention.start, convention.full_within - 1).unwrap();
        prop_assert_eq!(full, end.is_full());
        prop_assert_eq!(min, before.min_influence());
    }

    #[test]
    fn influence_is_monotone(params in linear_params(), h in 0usize..8) {
        let a = influence_after(params, HalfLayer::Sbox, h).unwrap();
        let b = influence_after(params, HalfLayer::Sbox, h + 1).unwrap();
        prop_assert!(a.is_within(&b));
    }
}

#[test]
fn locked_convention_reproduces_the_candidate_counts() {
    let report = enumerate_viable_params(DiffusionConvention::LOCKED, &all_multipliers()).unwrap();
    assert_eq!(report.candidates, 21_848_064);
    assert_eq!(report.full_diffusion, EXPECTED_FULL_DIFFUSION);
    assert_eq!(report.retained_count(), EXPECTED_RETAINED);
    assert!(report.retained.contains(&BranchId::Branch3.linear()));
}

fn check_trail(t: &LinearTrail) {
    let lat = build_table(&SboxName::S4.spec(), TableKind::Lat);
    let params = t.params;
    for r in 0..t.rounds() {
        let (a, b) = (t.sbox_inputs[r], t.sbox_outputs[r]);
        let mut w = 0;
        for i in 0..32 {
            let (x, y) = (a.nibble(i) as usize, b.nibble(i) as usize);
            assert_eq!(x == 0, y == 0);
            if x != 0 {
                w += 2 * lat.weight(x, y).expect("compatible");
            }
        }
        assert_eq!(w, t.weights[r]);
        let next = if r + 1 < t.rounds() {
            t.sbox_inputs[r + 1]
        } else {
            t.output_mask
        };
        assert_eq!(linear_transpose(params, next), b);
    }
}

#[test]
fn branch3_trail_weights() {
    let original = BranchId::Branch3.linear();
    for (rounds, weight) in [(1, 2), (2, 8)] {
        let t = best_linear_trail(original, rounds, TrailCaps::default()).unwrap();
        let t = t.trail().unwrap();
        assert_eq!(t.total_weight(), weight, "{t}");
        assert!(t.proven_optimal);
        check_trail(t);
    }
}

#[test]
fn branch3_three_round_trail() {
    let t = best_linear_trail(BranchId::Branch3.linear(), 3, TrailCaps::default()).unwrap();
    let t = t.trail().unwrap();
    check_trail(t);
    assert_eq!(t.total_weight(), 12, "{t}");
}

#[test]
fn tight_caps_are_reported() {
    let caps = TrailCaps {
        max_weight: 6,
        max_active_per_round: 4,
    };
    let t = best_linear_trail(BranchId::Branch3.linear(), 2, caps).unwrap();
    assert_eq!(
        t,
        TrailSearch::CapExceeded {
            max_weight: 6,
            truncated: false
        }
    );
}

#[test]
fn trails_match_measured_correlations() {
    let original = BranchId::Branch3.linear();
    for (rounds, plan) in [
        (1, SamplingPlan::new(1 << 12, 8, 0x71)),
        (2, SamplingPlan::new(1 << 18, 8, 0x72)),
    ] {
        let t = best_linear_trail(original, rounds, TrailCaps::default()).unwrap();
        let t = t.trail().unwrap().clone();
        let e = estimate_linear_correlation(
            BranchId::Branch3.into(),
            rounds,
            t.input_mask(),
            t.output_mask,
            plan,
        )
        .unwrap();
        let measured = e.log2_squared();
        assert!(
            (measured + t.total_weight() as f64).abs() <= 0.5,
            "{rounds} rounds: {measured}"
        );
    }
}

#[test]
fn direct_rule_trails_break_exact_propagation() {
    let original = BranchId::Branch3.linear();
    let t = best_linear_trail_with(original, 2, TrailCaps::default(), MaskRule::Direct).unwrap();
    let t = t.trail().unwrap();
    assert_ne!(
        linear_transpose(original, t.sbox_inputs[1]),
        t.sbox_outputs[0]
    );
}
