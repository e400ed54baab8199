//! End-to-end acceptance run: one line per criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` print `FAIL` without failing the
//! process; every other failure exits nonzero. `GLEEOK_ACCEPTANCE_ONLY=1,9`
//! restricts the run to the listed criteria.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use gleeok_attack::{
    balance_survivors, complexity_report, gadget_set, render_power, run_key_recovery,
    whitening_nibble, AttackConfig, AttackVariant, CipherOracle,
};
use gleeok_cipher::{BitOrder, BranchId, Target};
use gleeok_degree::{degree_profile, derive_integral_distinguishers};
use gleeok_linlayer::{
    all_multipliers, best_linear_trail, enumerate_viable_params, DiffusionConvention, TrailCaps,
};
use gleeok_milp::{
    aggregate_correlation, build_trail_model, read_lp, refine_to_signed, two_stage_search,
    write_lp, Analysis, BruteForceBackend, MilpBackend, ModelTarget, Optimum, RoundConfig,
    SearchOptions, SolverAdapter, TrailModel, TrailPair, SOLVER_ENV,
};
use gleeok_sbox::{verify_all_systems, verify_reference_tables, SboxName};
use gleeok_stats::{
    calibrate_bit_order, derived_key, estimate_linear_correlation, SamplingPlan, DL_TOLERANCE,
    PUBLISHED_DL_CASES,
};
use gleeok_workbench::integral::{random_control, IntegralCase};

const KNOWN_FAILURES: [u32; 2] = [2, 6];
const SEED: u64 = 0x91ee0c;
const SBOXES: [SboxName; 3] = [SboxName::S3, SboxName::S4, SboxName::S5];

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

type Check = Result<Verdict, Box<dyn std::error::Error>>;

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    if pass {
        Verdict::Pass(detail.into())
    } else {
        Verdict::Fail(detail.into())
    }
}

fn timed(pass: bool, detail: String, elapsed: Duration, limit: Duration) -> Verdict {
    let in_time = elapsed <= limit;
    let detail = if in_time {
        detail
    } else {
        format!("{detail}; over the {limit:?} budget")
    };
    verdict(pass && in_time, detail)
}

fn tables() -> Check {
    let start = Instant::now();
    let report = verify_reference_tables()?;
    let detail = format!(
        "{} tables, {} mismatched entries",
        report.tables_checked,
        report.mismatches.len()
    );
    Ok(timed(
        report.passed() && report.tables_checked == 9,
        detail,
        start.elapsed(),
        Duration::from_secs(1),
    ))
}

fn systems() -> Check {
    let start = Instant::now();
    let all = verify_all_systems()?;
    let failed: Vec<String> = all
        .iter()
        .filter(|(r, _)| !r.matches())
        .map(|(r, _)| r.name.clone())
        .collect();
    let detail = format!(
        "{}/{} systems exact; mismatched: {failed:?}",
        all.len() - failed.len(),
        all.len()
    );
    Ok(timed(
        failed.is_empty() && all.len() == 12,
        detail,
        start.elapsed(),
        Duration::from_secs(10),
    ))
}

fn degrees() -> Check {
    let start = Instant::now();
    let branch12 = [2, 4, 8, 16, 32, 64, 106, 120, 125, 127];
    let branch3 = [3, 9, 27, 81, 112, 122, 126, 127, 127, 127];
    let b1 = Target::Branch(BranchId::Branch1);
    let b2 = Target::Branch(BranchId::Branch2);
    let b3 = Target::Branch(BranchId::Branch3);
    let mut bad = Vec::new();
    for (target, row) in [
        (b1, branch12),
        (b2, branch12),
        (b3, branch3),
        (Target::Prf, branch3),
    ] {
        if degree_profile(target, 10)?.bounds != row {
            bad.push(format!("profile {target}"));
        }
    }
    for (target, rounds, data) in [
        (b1, 6, 65),
        (b1, 9, 126),
        (b2, 6, 65),
        (b2, 9, 126),
        (b3, 5, 113),
        (Target::Prf, 5, 113),
        (Target::Prf, 7, 127),
    ] {
        let list = derive_integral_distinguishers(target, 10)?;
        if !list
            .iter()
            .any(|d| d.rounds == rounds && !d.leading_half && d.data_log2() == data)
        {
            bad.push(format!("{target} {rounds} rounds @2^{data}"));
        }
    }
    let detail = if bad.is_empty() {
        "four profiles and seven integral rows".to_string()
    } else {
        format!("missing {bad:?}")
    };
    Ok(timed(
        bad.is_empty(),
        detail,
        start.elapsed(),
        Duration::from_secs(1),
    ))
}

fn dl_reproduction() -> Check {
    let report = calibrate_bit_order(&PUBLISHED_DL_CASES)?;
    let measured: Vec<String> = report
        .rows
        .iter()
        .filter(|r| r.order == BitOrder::MsbFirst)
        .map(|r| {
            format!(
                "{} {}r {:.2} (want {:.2})",
                r.case.target, r.case.rounds, r.measured_log2, r.case.experimental_log2
            )
        })
        .collect();
    let all_within = report
        .rows
        .iter()
        .filter(|r| r.order == BitOrder::MsbFirst)
        .all(|r| r.within_tolerance);
    let pass = all_within && report.locked == Some(BitOrder::MsbFirst);
    Ok(verdict(
        pass,
        format!(
            "{}; locked {:?}; tolerance {DL_TOLERANCE}",
            measured.join(", "),
            report.locked
        ),
    ))
}

fn integral_balance() -> Check {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut pass = true;
    for case in IntegralCase::ALL {
        let size = case.structure()?.size();
        let balanced = (0..20)
            .filter(|&k| {
                case.balance(&derived_key(SEED, k))
                    .is_ok_and(|m| m.is_balanced())
            })
            .count();
        pass &= balanced == 20 && size == 1 << 15;
        parts.push(format!("{} {balanced}/20 keys over {size}", case.name()));
    }
    let controls = 20;
    let mut nonzero = 0;
    for t in 0..controls {
        nonzero += u64::from(!random_control(SEED + t)?.is_balanced());
    }
    pass &= nonzero == controls;
    parts.push(format!("random control nonzero {nonzero}/{controls}"));
    Ok(timed(
        pass,
        parts.join(", "),
        start.elapsed(),
        Duration::from_secs(60),
    ))
}

fn key_recovery() -> Check {
    let start = Instant::now();
    let config = AttackConfig::scaled();
    let mut recovered = 0;
    for i in 0..100 {
        let key = derived_key(SEED, i);
        let truth = whitening_nibble(&key, config.target_sbox)?;
        let oracle = CipherOracle::new(config.target, &key, config.total_rounds)?;
        recovered += usize::from(run_key_recovery(&config, &oracle)?.recovered() == Some(truth));
    }
    let s4 = SboxName::S4.spec();
    let published: [&[u8]; 4] = [
        &[0x0, 0x5],
        &[0x0, 0x1, 0xe],
        &[0x0, 0x8, 0xf],
        &[0x0, 0xe, 0xf],
    ];
    let mut equal = 0;
    let mut derived = Vec::new();
    for (i, want) in published.iter().enumerate() {
        let got = balance_survivors(&s4, &gadget_set(&s4, i)?)?;
        equal += usize::from(got == *want);
        derived.push(format!("{got:x?}"));
    }
    let detail = format!(
        "recovered {recovered}/100; survivor sets {} ({equal}/4 equal the published sets)",
        derived.join(" ")
    );
    Ok(timed(
        recovered == 100 && equal == 4,
        detail,
        start.elapsed(),
        Duration::from_secs(300),
    ))
}

fn complexities() -> Check {
    let rows: Vec<(String, Option<f64>, f64)> = AttackVariant::ALL
        .iter()
        .map(|&v| {
            let r = complexity_report(v);
            (
                render_power(r.time_log2()),
                r.memory_log2_bytes,
                r.data_log2,
            )
        })
        .collect();
    let want = [
        ("2^133.6", None, 124.0),
        ("2^132", Some(129.0), 124.0),
        ("2^137", None, 128.0),
        ("2^129", Some(133.0), 128.0),
    ];
    let pass = rows
        .iter()
        .zip(want)
        .all(|(g, w)| g.0 == w.0 && g.1 == w.1 && g.2 == w.2);
    let shown: Vec<String> = rows
        .iter()
        .map(|(t, m, d)| {
            format!(
                "{t}/{}/2^{d}",
                m.map_or("negligible".to_string(), |m| format!("2^{m} B"))
            )
        })
        .collect();
    Ok(verdict(pass, shown.join(", ")))
}

fn linlayer() -> Check {
    let scan = enumerate_viable_params(DiffusionConvention::LOCKED, &all_multipliers())?;
    let original = BranchId::Branch3.linear();
    let has_original = scan.retained.contains(&original);
    let pass = scan.candidates == 21_848_064
        && scan.full_diffusion == 4352
        && scan.retained_count() == 4096
        && has_original;
    let detail = format!(
        "{} candidates, {} fully diffusing, {} retained, original retained {has_original}",
        scan.candidates,
        scan.full_diffusion,
        scan.retained_count()
    );
    Ok(verdict(pass, detail))
}

fn trails() -> Check {
    let b3 = BranchId::Branch3;
    let mut weights = Vec::new();
    let mut pass = true;
    let plans = [
        SamplingPlan::new(1 << 12, 8, 0x71),
        SamplingPlan::new(1 << 18, 8, 0x72),
    ];
    for (rounds, want) in [(1, 2), (2, 8)] {
        let found = best_linear_trail(b3.linear(), rounds, TrailCaps::default())?;
        let Some(t) = found.trail() else {
            return Ok(Verdict::Fail(format!(
                "{rounds} rounds: no trail within caps"
            )));
        };
        let e = estimate_linear_correlation(
            b3.into(),
            rounds,
            t.input_mask(),
            t.output_mask,
            plans[rounds - 1],
        )?;
        let measured = e.log2_squared();
        pass &= t.total_weight() == want
            && t.proven_optimal
            && (measured + f64::from(want)).abs() <= DL_TOLERANCE;
        weights.push(format!(
            "{rounds}r weight {} measured 2^{measured:.2}",
            t.total_weight()
        ));
    }
    let three = best_linear_trail(b3.linear(), 3, TrailCaps::default())?;
    let extended = three.trail().map(|t| t.total_weight());
    weights.push(format!("3r weight {extended:?} (extended, want 12)"));
    Ok(verdict(pass, weights.join(", ")))
}

fn feasible_pairs(
    model: &TrailModel,
) -> Result<BTreeSet<(u128, u128)>, Box<dyn std::error::Error>> {
    let exported = read_lp(&write_lp(&model.program))?;
    let set = BruteForceBackend::default().enumerate(&exported, usize::MAX)?;
    Ok(set
        .solutions
        .iter()
        .filter_map(|s| model.pair_of(s))
        .map(|p| (p.delta, p.lambda))
        .collect())
}

fn toy_models() -> Check {
    let backend = BruteForceBackend::default();
    let mut bad = Vec::new();
    let mut pairs_checked = 0;
    for sbox in SBOXES {
        let n = 1usize << sbox.width();
        let spec = sbox.spec();
        let model = build_trail_model(
            ModelTarget::Toy(sbox),
            Analysis::DlStage1(RoundConfig::new(0, 0)),
        )?;
        let mut want = BTreeMap::new();
        for d in 1..n {
            for l in 1..n {
                let mut count = 0i64;
                for x in 0..n {
                    let y = spec.apply(x) ^ spec.apply(x ^ d);
                    count += if (y & l).count_ones() % 2 == 0 { 1 } else { -1 };
                }
                if count != 0 {
                    want.insert((d as u128, l as u128), count as f64 / n as f64);
                }
            }
        }
        if feasible_pairs(&model)? != want.keys().copied().collect() {
            bad.push(format!("{sbox} stage-one support"));
        }
        let options = SearchOptions {
            span: 4,
            ..SearchOptions::default()
        };
        for (&(d, l), &c) in &want {
            let pair = TrailPair::new(sbox.width(), d, l);
            let mut stage_two = BTreeSet::new();
            for weight in 0..=options.span {
                stage_two.extend(feasible_pairs(&refine_to_signed(&model, &pair, weight)?)?);
            }
            if stage_two != BTreeSet::from([(d, l)]) {
                bad.push(format!(
                    "{sbox} stage-two ({d:x},{l:x}) admits {stage_two:x?}"
                ));
            }
            let agg = aggregate_correlation(&model, &pair, 0, &options, &backend)?;
            pairs_checked += 1;
            if (agg.correlation() - c).abs() > 1e-12 {
                bad.push(format!(
                    "{sbox} ({d:x},{l:x}) aggregate {} want {c}",
                    agg.correlation()
                ));
            }
        }
        let report = two_stage_search(&model, &options, &backend)?;
        let best_abs = want.values().fold(0f64, |a, c| a.max(c.abs()));
        if report
            .best()
            .is_none_or(|b| (b.correlation().abs() - best_abs).abs() > 1e-12)
        {
            bad.push(format!("{sbox} two-stage best"));
        }
    }
    let mut detail =
        format!("three toys, {pairs_checked} aggregated pairs against exhaustive DLCT");
    if !bad.is_empty() {
        detail = format!("{detail}; {bad:?}");
    }
    Ok(verdict(bad.is_empty(), detail))
}

fn solver_spot_checks() -> Check {
    if std::env::var_os(SOLVER_ENV).is_none() {
        return Ok(Verdict::Skip(format!("{SOLVER_ENV} not set")));
    }
    let solver = SolverAdapter::from_env()?;
    let b1 = ModelTarget::Branch(BranchId::Branch1);
    let model = build_trail_model(b1, Analysis::DlStage1(RoundConfig::new(2, 2)))?;
    let value = match solver.optimize(&model.program)? {
        Optimum::Optimal { value, .. } => value,
        Optimum::Infeasible => return Ok(Verdict::Fail("Branch1 (2,1,2) infeasible".into())),
    };
    let case = &PUBLISHED_DL_CASES[1];
    let pair = case.pair(BitOrder::MsbFirst);
    let pair = TrailPair::from_states(pair.difference, pair.mask);
    let agg = aggregate_correlation(&model, &pair, value, &SearchOptions::default(), &solver)?;
    let squared = agg.log2_abs().map(|l| 2.0 * l);
    let close = squared.is_some_and(|s| (s - case.estimated_log2).abs() <= DL_TOLERANCE);
    Ok(verdict(
        value == 16 && close,
        format!("objective {value}, aggregate squared 2^{squared:.2?}"),
    ))
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Check); 10] = [
        (1, tables),
        (2, systems),
        (3, degrees),
        (4, dl_reproduction),
        (5, integral_balance),
        (6, key_recovery),
        (7, complexities),
        (8, linlayer),
        (9, trails),
        (10, toy_models),
    ];
    let only: Option<Vec<u32>> = std::env::var("GLEEOK_ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|n| n.trim().parse().ok()).collect());
    let mut unexpected = 0;
    for (n, check) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&n)) {
            continue;
        }
        let start = Instant::now();
        let result = check().unwrap_or_else(|e| Verdict::Fail(format!("error: {e}")));
        let secs = start.elapsed().as_secs_f64();
        let known = KNOWN_FAILURES.contains(&n);
        let line = match result {
            Verdict::Pass(d) => format!("pass {d}"),
            Verdict::Fail(d) if known => format!("FAIL (known) {d}"),
            Verdict::Fail(d) => {
                unexpected += 1;
                format!("FAIL {d}")
            }
            Verdict::Skip(d) => format!("skip {d}"),
        };
        println!("criterion {n}: {line} [{secs:.1}s]");
        if n == 10 {
            let start = Instant::now();
            let line = match solver_spot_checks()
                .unwrap_or_else(|e| Verdict::Fail(format!("error: {e}")))
            {
                Verdict::Pass(d) => format!("pass {d}"),
                Verdict::Fail(d) => {
                    unexpected += 1;
                    format!("FAIL {d}")
                }
                Verdict::Skip(d) => format!("skip {d}"),
            };
            println!(
                "criterion 10c: {line} [{:.1}s]",
                start.elapsed().as_secs_f64()
            );
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
