use std::collections::{BTreeMap, BTreeSet};

use gleeok_cipher::{apply_linear, BranchId, State128};
use gleeok_linlayer::linear_transpose;
use gleeok_milp::*;
use gleeok_sbox::{build_table, SboxName, TableKind};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SBOXES: [SboxName; 3] = [SboxName::S3, SboxName::S4, SboxName::S5];

fn toy(sbox: SboxName, analysis: Analysis) -> TrailModel {
    build_trail_model(ModelTarget::Toy(sbox), analysis).unwrap()
}

/// `(Δ, λ) -> objective values` over every feasible assignment.
fn feasible_pairs(model: &TrailModel) -> BTreeMap<(u128, u128), BTreeSet<i64>> {
    let set = BruteForceBackend::default()
        .enumerate(&model.program, usize::MAX)
        .unwrap();
    assert!(!set.truncated);
    let mut out: BTreeMap<(u128, u128), BTreeSet<i64>> = BTreeMap::new();
    for s in &set.solutions {
        let p = model.pair_of(s).unwrap();
        out.entry((p.delta, p.lambda))
            .or_default()
            .insert(model.program.objective_value(s).unwrap());
    }
    out
}

fn neg_log2(num: i32, den: i32) -> i64 {
    let (num, den) = (num.unsigned_abs(), den.unsigned_abs());
    assert!(
        den % num == 0 && (den / num).is_power_of_two(),
        "{num}/{den} is not a power of two"
    );
    (den / num).trailing_zeros() as i64
}

#[test]
fn toy_differential_models_match_the_ddt() {
    for sbox in SBOXES {
        let n = 1usize << sbox.width();
        let ddt = build_table(&sbox.spec(), TableKind::Ddt);
        let got = feasible_pairs(&toy(sbox, Analysis::Differential { rounds: 1 }));
        let mut want = BTreeMap::new();
        for a in 1..n {
            for b in 0..n {
                if ddt.get(a, b) != 0 {
                    want.insert(
                        (a as u128, b as u128),
                        BTreeSet::from([neg_log2(ddt.get(a, b), n as i32)]),
                    );
                }
            }
        }
        assert_eq!(got, want, "{sbox}");
    }
}

#[test]
fn toy_linear_models_match_the_lat() {
    for sbox in SBOXES {
        let n = 1usize << sbox.width();
        let lat = build_table(&sbox.spec(), TableKind::Lat);
        let got = feasible_pairs(&toy(sbox, Analysis::Linear { rounds: 1 }));
        let mut want = BTreeMap::new();
        for a in 0..n {
            for b in 1..n {
                if lat.get(a, b) != 0 {
                    let w = 2 * neg_log2(lat.get(a, b), n as i32 / 2);
                    want.insert((a as u128, b as u128), BTreeSet::from([w]));
                }
            }
        }
        assert_eq!(got, want, "{sbox}");
    }
}

#[test]
fn toy_stage_one_models_match_the_dlct_support() {
    for sbox in SBOXES {
        let n = 1usize << sbox.width();
        let dlct = build_table(&sbox.spec(), TableKind::DlctUnsigned);
        let got: BTreeSet<(u128, u128)> =
            feasible_pairs(&toy(sbox, Analysis::DlStage1(RoundConfig::new(0, 0))))
                .into_keys()
                .collect();
        let want: BTreeSet<(u128, u128)> = (1..n)
            .flat_map(|d| (1..n).map(move |l| (d, l)))
            .filter(|&(d, l)| dlct.get(d, l) != 0)
            .map(|(d, l)| (d as u128, l as u128))
            .collect();
        assert_eq!(got, want, "{sbox}");
    }
}

#[test]
fn optimal_pairs_of_the_s3_toy_are_the_diagonal() {
    let model = toy(SboxName::S3, Analysis::DlStage1(RoundConfig::new(0, 0)));
    let found = collect_optimal_pairs(&model, &BruteForceBackend::default(), 64).unwrap();
    assert_eq!(found.weight, Some(0));
    assert!(!found.truncated);
    let got: BTreeSet<(u128, u128)> = found.pairs.iter().map(|p| (p.delta, p.lambda)).collect();
    let dlct = build_table(&SboxName::S3.spec(), TableKind::DlctUnsigned);
    let want: BTreeSet<(u128, u128)> = (1..8)
        .flat_map(|d| (1..8).map(move |l| (d, l)))
        .filter(|&(d, l)| dlct.get(d, l).unsigned_abs() == 4)
        .map(|(d, l)| (d as u128, l as u128))
        .collect();
    assert_eq!(got, want);
    assert_eq!(got, (1..8u128).map(|d| (d, d)).collect());
}

#[test]
fn aggregated_toy_correlations_equal_the_dlct() {
    let backend = BruteForceBackend::default();
    let options = SearchOptions {
        span: 4,
        ..SearchOptions::default()
    };
    for sbox in SBOXES {
        let n = 1usize << sbox.width();
        let dlct = build_table(&sbox.spec(), TableKind::DlctSigned);
        let model = toy(sbox, Analysis::DlStage1(RoundConfig::new(0, 0)));
        for d in 1..n {
            for l in 1..n {
                if dlct.get(d, l) == 0 {
                    continue;
                }
                let pair = TrailPair::new(sbox.width(), d as u128, l as u128);
                let agg = aggregate_correlation(&model, &pair, 0, &options, &backend).unwrap();
                let want = dlct.get(d, l) as f64 / (n / 2) as f64;
                assert_eq!(agg.correlation(), want, "{sbox} {pair}");
                assert_eq!(agg.trails(), 1);
            }
        }
    }
}

#[test]
fn two_stage_search_on_a_toy_picks_the_smallest_strongest_pair() {
    let model = toy(SboxName::S3, Analysis::DlStage1(RoundConfig::new(0, 0)));
    let options = SearchOptions {
        span: 2,
        ..SearchOptions::default()
    };
    let report = two_stage_search(&model, &options, &BruteForceBackend::default()).unwrap();
    assert_eq!(report.candidates.len(), 7);
    let best = report.best().unwrap();
    assert_eq!(best.correlation().abs(), 1.0);
    assert_eq!((best.pair.delta, best.pair.lambda), (1, 1));
}

#[test]
fn aggregation_arithmetic() {
    let agg = Aggregate {
        pair: TrailPair::new(128, 1, 2),
        classes: vec![
            WeightClass {
                weight: 10,
                positive: 3,
                negative: 1,
            },
            WeightClass {
                weight: 11,
                positive: 0,
                negative: 2,
            },
        ],
        truncated: false,
    };
    assert_eq!(
        agg.correlation(),
        2.0 * 2f64.powi(-10) - 2.0 * 2f64.powi(-11)
    );
    assert_eq!(agg.log2_abs(), Some(-10.0));
    let cancel = Aggregate {
        classes: vec![WeightClass {
            weight: 3,
            positive: 2,
            negative: 2,
        }],
        ..agg.clone()
    };
    assert_eq!(cancel.log2_abs(), None);
    let stronger = Aggregate {
        pair: TrailPair::new(128, 0, 1),
        ..agg.clone()
    };
    let weaker = Aggregate {
        pair: TrailPair::new(128, 0, 0),
        classes: vec![],
        ..agg.clone()
    };
    let pool = [agg.clone(), stronger.clone(), weaker];
    assert_eq!(
        select_best_distinguisher(&pool).unwrap().pair,
        stronger.pair
    );
}

#[test]
fn refinement_requires_a_stage_one_model() {
    let model = toy(SboxName::S3, Analysis::Differential { rounds: 1 });
    let pair = TrailPair::new(3, 1, 1);
    assert_eq!(
        refine_to_signed(&model, &pair, 0).unwrap_err(),
        MilpError::NotDlModel
    );
    let dl = toy(SboxName::S3, Analysis::DlStage1(RoundConfig::new(0, 0)));
    let wide = TrailPair::new(128, 1, 1);
    assert!(matches!(
        refine_to_signed(&dl, &wide, 0),
        Err(MilpError::PairWidth {
            expected: 3,
            got: 128
        })
    ));
}

#[test]
fn round_splits() {
    assert_eq!(RoundConfig::split(5).unwrap(), RoundConfig::new(2, 2));
    assert_eq!(RoundConfig::split(6).unwrap(), RoundConfig::new(2, 3));
    assert_eq!(RoundConfig::split(1).unwrap(), RoundConfig::new(0, 0));
    assert!(RoundConfig::split(0).is_err());
    assert!(RoundConfig::new(2, 2).for_rounds(6).is_err());
    assert!(build_trail_model(
        ModelTarget::Toy(SboxName::S3),
        Analysis::Linear { rounds: 2 }
    )
    .is_err());
}

#[test]
fn middle_round_has_one_dlct_block_per_sbox() {
    let model = build_trail_model(
        ModelTarget::Branch(BranchId::Branch1),
        Analysis::DlStage1(RoundConfig::new(2, 2)),
    )
    .unwrap();
    let middle: Vec<_> = model.meta.blocks.iter().filter(|b| b.round == 2).collect();
    assert_eq!(middle.len(), 32);
    assert!(middle.iter().all(|b| b.table == TableKind::DlctUnsigned));
    let comments = model
        .program
        .comments()
        .values()
        .filter(|c| c.starts_with("block r2_") && c.contains("dlct"));
    assert_eq!(comments.count(), 32);
    assert_eq!(
        model
            .meta
            .blocks
            .iter()
            .filter(|b| b.table == TableKind::Ddt)
            .count(),
        64
    );
    assert_eq!(
        model
            .meta
            .blocks
            .iter()
            .filter(|b| b.table == TableKind::Lat)
            .count(),
        64
    );
}

#[test]
fn signed_refinement_adds_parity_over_every_middle_sbox() {
    let model = build_trail_model(
        ModelTarget::Branch(BranchId::Branch3),
        Analysis::DlStage1(RoundConfig::new(1, 1)),
    )
    .unwrap();
    let refined = refine_to_signed(&model, &TrailPair::new(128, 1, 1), 9).unwrap();
    assert_eq!(refined.meta.middle_signs.len(), 32);
    let parity = refined
        .program
        .constraints()
        .iter()
        .find(|c| c.name == "sign_parity")
        .unwrap();
    assert_eq!(parity.terms.len(), 34);
    assert_eq!(
        refined.program.variable("d").unwrap().kind,
        VarKind::Integer {
            lower: 0,
            upper: 16
        }
    );
    let pin = refined
        .program
        .constraints()
        .iter()
        .find(|c| c.name == PIN_NAME)
        .unwrap();
    assert_eq!(pin.rhs, 9);
    assert_eq!(
        refined
            .program
            .constraints()
            .iter()
            .filter(|c| c.name.starts_with("fix_"))
            .count(),
        256
    );
}

#[test]
fn lp_export_round_trips_and_is_deterministic() {
    for target in [
        ModelTarget::Branch(BranchId::Branch1),
        ModelTarget::Branch(BranchId::Branch3),
    ] {
        let a = build_trail_model(target, Analysis::DlStage1(RoundConfig::new(1, 1))).unwrap();
        let b = build_trail_model(target, Analysis::DlStage1(RoundConfig::new(1, 1))).unwrap();
        let text = write_lp(&a.program);
        assert_eq!(text, write_lp(&b.program));
        assert_eq!(read_lp(&text).unwrap(), a.program);
    }
    let prf = build_trail_model(ModelTarget::Prf, Analysis::Linear { rounds: 1 }).unwrap();
    assert_eq!(read_lp(&write_lp(&prf.program)).unwrap(), prf.program);
    let toy_refined = refine_to_signed(
        &toy(SboxName::S3, Analysis::DlStage1(RoundConfig::new(0, 0))),
        &TrailPair::new(3, 2, 2),
        0,
    )
    .unwrap();
    assert_eq!(
        read_lp(&write_lp(&toy_refined.program)).unwrap(),
        toy_refined.program
    );
}

#[test]
fn prf_shares_input_and_output_bits() {
    let model = build_trail_model(ModelTarget::Prf, Analysis::Differential { rounds: 2 }).unwrap();
    assert_eq!(model.meta.blocks.len(), 3 * 2 * 32);
    for prefix in ["b1_", "b2_", "b3_"] {
        assert!(model.program.variable(&format!("{prefix}y0_5")).is_some());
    }
    assert!(model.program.variable("b1_x0_5").is_none());
    assert!(model.program.variable("in_5").is_some());
}

/// Completes an assignment of the state-bit variables by solving each
/// block's weight and sign variables and each XOR dummy locally.
fn complete(program: &MilpProgram, fixed: &Solution) -> Option<Solution> {
    let mut sol = fixed.clone();
    let free: Vec<&Variable> = program
        .variables()
        .iter()
        .filter(|v| !sol.contains_key(&v.name))
        .collect();
    for v in &free {
        sol.insert(v.name.clone(), 0);
    }
    for c in program.constraints() {
        let unknown: Vec<&String> = c
            .terms
            .iter()
            .map(|(_, v)| v)
            .filter(|v| !fixed.contains_key(*v))
            .collect();
        if unknown.is_empty() {
            continue;
        }
        let found = (0..1u32 << (2 * unknown.len())).find_map(|code| {
            let mut trial = sol.clone();
            for (k, v) in unknown.iter().enumerate() {
                let (lo, hi) = program.variable(v).unwrap().kind.range();
                let x = ((code >> (2 * k)) & 3) as i64;
                if x > hi - lo {
                    return None;
                }
                trial.insert((*v).clone(), lo + x);
            }
            let block = c.name.rsplit_once("_q").map(|(b, _)| b.to_string());
            let ok = program.constraints().iter().filter(|d| match &block {
                Some(b) => d.name.rsplit_once("_q").is_some_and(|(p, _)| p == b),
                None => d.name == c.name,
            });
            ok.clone()
                .all(|d| {
                    let lhs: i64 = d.terms.iter().map(|(a, v)| a * trial[v]).sum();
                    d.sense.holds(lhs, d.rhs)
                })
                .then_some(trial)
        })?;
        sol = found;
    }
    Some(sol)
}

fn set_state(sol: &mut Solution, name: impl Fn(usize) -> String, s: State128) {
    for i in 0..128 {
        sol.insert(name(i), s.bit(i) as i64);
    }
}

#[test]
fn a_sampled_differential_trail_is_a_feasible_point() {
    let branch = BranchId::Branch3;
    let params = branch.linear();
    let model = build_trail_model(
        ModelTarget::Branch(branch),
        Analysis::Differential { rounds: 2 },
    )
    .unwrap();
    let ddt = build_table(&SboxName::S4.spec(), TableKind::Ddt);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..4 {
        let mut x = State128::ZERO;
        x.set_nibble(rng.gen_range(0..32), rng.gen_range(1..16));
        let mut fixed = Solution::new();
        let mut weight = 0;
        for r in 0..2 {
            let mut y = State128::ZERO;
            for k in 0..32 {
                let a = x.nibble(k) as usize;
                if a == 0 {
                    continue;
                }
                let outs: Vec<usize> = (0..16).filter(|&b| ddt.get(a, b) != 0).collect();
                let b = outs[rng.gen_range(0..outs.len())];
                weight += if ddt.get(a, b) == 4 { 2 } else { 3 };
                y.set_nibble(k, b as u8);
            }
            let xname = move |i: usize| {
                if r == 0 {
                    format!("in_{i}")
                } else {
                    format!("x{r}_{i}")
                }
            };
            set_state(&mut fixed, xname, x);
            set_state(&mut fixed, |i| format!("y{r}_{i}"), y);
            x = apply_linear(params, y);
        }
        set_state(&mut fixed, |i| format!("out_{i}"), x);
        let sol = complete(&model.program, &fixed).expect("trail should be feasible");
        assert!(
            model.program.is_feasible(&sol),
            "{:?}",
            model.program.violations(&sol)
        );
        assert_eq!(model.program.objective_value(&sol), Some(weight));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn linear_layer_constraints_encode_l_and_its_transpose(v in any::<u128>(), w in any::<u128>()) {
        let params = BranchId::Branch2.linear();
        for (analysis, prefix_in, prefix_out, map) in [
            (Analysis::Differential { rounds: 2 }, "y0", "x1", apply_linear as fn(_, _) -> _),
            (Analysis::Linear { rounds: 2 }, "x1", "y0", linear_transpose),
        ] {
            let model = build_trail_model(ModelTarget::Branch(BranchId::Branch2), analysis).unwrap();
            let layer: Vec<&Constraint> = model.program.constraints().iter().filter(|c| c.name.starts_with("l0_")).collect();
            prop_assert_eq!(layer.len(), 128);
            let src = State128::from_u128(v);
            let good = map(params, src);
            let bad = State128::from_u128(good.to_u128() ^ (w | 1));
            for (image, expect) in [(good, true), (bad, false)] {
                let mut sol = Solution::new();
                set_state(&mut sol, |i| format!("{prefix_in}_{i}"), src);
                set_state(&mut sol, |i| format!("{prefix_out}_{i}"), image);
                let all = layer.iter().all(|c| {
                    let sum: i64 = c.terms.iter().filter(|(a, _)| *a == 1).map(|(_, v)| sol[v]).sum();
                    sum % 2 == 0
                });
                prop_assert_eq!(all, expect);
            }
        }
    }
}

/// Runs only when an external solver is configured.
#[test]
fn external_solver_agrees_with_brute_force() {
    let Ok(solver) = SolverAdapter::from_env() else {
        eprintln!("{SOLVER_ENV} not set; skipping");
        return;
    };
    let brute = BruteForceBackend::default();
    for sbox in SBOXES {
        let model = toy(sbox, Analysis::DlStage1(RoundConfig::new(0, 0)));
        let a = collect_optimal_pairs(&model, &brute, 1024).unwrap();
        let b = collect_optimal_pairs(&model, &solver, 1024).unwrap();
        let set = |c: &PairCollection| c.pairs.iter().copied().collect::<BTreeSet<_>>();
        assert_eq!(a.weight, b.weight, "{sbox}");
        assert_eq!(set(&a), set(&b), "{sbox}");
    }
    let model = build_trail_model(
        ModelTarget::Branch(BranchId::Branch3),
        Analysis::Differential { rounds: 2 },
    )
    .unwrap();
    let Optimum::Optimal { value, solution } = solver.optimize(&model.program).unwrap() else {
        panic!("feasible")
    };
    assert!(model.program.is_feasible(&solution));
    // One active Sbox with a one-bit output spreads to three Sboxes.
    assert_eq!(value, 2 + 3 * 2);
}
