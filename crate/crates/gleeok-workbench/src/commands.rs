use std::collections::BTreeSet;

use gleeok_attack::{
    balance_survivors, complexity_report, gadget_set, hex_list, run_key_recovery,
    survival_analysis, whitening_nibble, AttackConfig, AttackVariant, CipherOracle,
};
use gleeok_cipher::{BitOrder, BranchId, State128, Target};
use gleeok_degree::{degree_profile, derive_integral_distinguishers, render_distinguishers};
use gleeok_linlayer::{
    all_multipliers, best_linear_trail_with, calibrate_convention, enumerate_viable_params,
    render_candidates, DiffusionConvention, MaskRule, TrailCaps, TrailSearch,
    EXPECTED_FULL_DIFFUSION, EXPECTED_RETAINED,
};
use gleeok_milp::{
    build_trail_model, read_lp, refine_to_signed, two_stage_search, write_lp, Analysis,
    MilpBackend, ModelTarget, Optimum, RoundConfig, SearchOptions, SolverAdapter, TrailModel,
    TrailPair,
};
use gleeok_sbox::{reference_tables, verify_all_systems, verify_reference_tables, SboxName};
use gleeok_stats::{
    calibrate_bit_order, derived_key, estimate_dl_correlation, estimate_linear_correlation,
    order_name, CorrelationEstimate, DifferenceMaskPair, SamplingPlan, DL_TOLERANCE,
    PUBLISHED_DL_CASES,
};

use crate::cli::{
    AnalysisArg, Command, ConventionArg, DlEstimateArgs, Format, LinearEstimateArgs, ModelArgs,
    RuleArg, SolveMode, StructureArg,
};
use crate::config::Settings;
use crate::error::{usage, WorkbenchError};
use crate::integral::{random_control, IntegralCase};
use crate::report::Report;

pub const DEFAULT_SAMPLES_LOG2: u32 = 20;
pub const DEFAULT_KEYS: usize = 16;

type Outcome = Result<Report, WorkbenchError>;

pub fn command_name(command: &Command) -> &'static str {
    match command {
        Command::TablesVerify => "tables-verify",
        Command::IneqVerify => "ineq-verify",
        Command::Degree { .. } => "degree",
        Command::IntegralDerive { .. } => "integral-derive",
        Command::DlEstimate(_) => "dl-estimate",
        Command::LinearEstimate(_) => "linear-estimate",
        Command::IntegralCheck { .. } => "integral-check",
        Command::AttackDemo { .. } => "attack-demo",
        Command::LinlayerScan { .. } => "linlayer-scan",
        Command::TrailSearch { .. } => "trail-search",
        Command::ExportModel { .. } => "export-model",
        Command::Solve { .. } => "solve",
    }
}

pub fn execute(command: &Command, settings: &Settings) -> Outcome {
    let mut report = Report::new(command_name(command));
    report.setting("seed", settings.seed);
    report.setting("order", order_name(settings.order));
    report.setting("format", settings.format);
    if let Some(t) = settings.threads {
        report.setting("threads", t);
    }
    let csv_ok = matches!(
        command,
        Command::Degree { .. } | Command::IntegralDerive { .. }
    );
    if settings.format == Format::Csv && !csv_ok {
        return Err(usage(format!(
            "{} has no CSV output",
            command_name(command)
        )));
    }
    match command {
        Command::TablesVerify => tables_verify(report),
        Command::IneqVerify => ineq_verify(report),
        Command::Degree { target, rounds } => degree(report, settings, *target, *rounds),
        Command::IntegralDerive { target, max_rounds } => {
            integral_derive(report, settings, *target, *max_rounds)
        }
        Command::DlEstimate(args) => dl_estimate(report, settings, args),
        Command::LinearEstimate(args) => linear_estimate(report, settings, args),
        Command::IntegralCheck {
            structure,
            controls,
        } => integral_check(report, settings, *structure, *controls),
        Command::AttackDemo {
            trials,
            sbox,
            gadgets,
        } => attack_demo(report, settings, *trials, *sbox, gadgets),
        Command::LinlayerScan {
            convention,
            multipliers,
            calibrate,
            list,
            ..
        } => linlayer_scan(
            report,
            *convention,
            multipliers,
            *calibrate,
            list.as_deref(),
        ),
        Command::TrailSearch {
            branch,
            rounds,
            max_weight,
            max_active,
            rule,
        } => trail_search(
            report,
            *branch,
            *rounds,
            TrailCaps {
                max_weight: *max_weight,
                max_active_per_round: *max_active,
            },
            *rule,
        ),
        Command::ExportModel { model, lp } => export_model(report, settings, model, lp),
        Command::Solve {
            model,
            lp,
            mode,
            cap,
            span,
        } => solve(report, settings, model, lp.as_deref(), *mode, *cap, *span),
    }
}

fn tables_verify(mut report: Report) -> Outcome {
    let result = verify_reference_tables()?;
    for (name, _, _) in reference_tables()? {
        let bad = result.mismatches.iter().filter(|m| m.table == name).count();
        report.check(&name, bad == 0, format!("{bad} mismatched entries"));
    }
    for m in result.mismatches.iter().take(20) {
        report.line(format!("mismatch {m}"));
    }
    report.line(format!("tables {}", result.tables_checked));
    Ok(report)
}

fn ineq_verify(mut report: Report) -> Outcome {
    for (declared, alternative) in verify_all_systems()? {
        report.check(&declared.name, declared.matches(), &declared);
        if let Some(alt) = alternative {
            report.line(format!("opposite order: {alt}"));
        }
    }
    Ok(report)
}

fn degree(mut report: Report, settings: &Settings, target: Target, rounds: usize) -> Outcome {
    report.setting("target", target);
    report.setting("rounds", rounds);
    let profile = degree_profile(target, rounds)?;
    match settings.format {
        Format::Csv => {
            report.line("round,bound,provenance");
            for (i, (b, p)) in profile.bounds.iter().zip(&profile.provenance).enumerate() {
                report.line(format!("{},{b},{p}", i + 1));
            }
        }
        Format::Text => report.block(&profile),
    }
    let list: Vec<String> = profile.bounds.iter().map(ToString::to_string).collect();
    report.line(format!("profile ({})", list.join(",")));
    Ok(report)
}

fn integral_derive(
    mut report: Report,
    settings: &Settings,
    target: Target,
    max_rounds: usize,
) -> Outcome {
    report.setting("target", target);
    report.setting("max-rounds", max_rounds);
    let list = derive_integral_distinguishers(target, max_rounds)?;
    match settings.format {
        Format::Csv => {
            report.line("target,rounds,degree,data_log2");
            for d in &list {
                let half = if d.leading_half { ".5" } else { "" };
                report.line(format!(
                    "{},{}{half},{},{}",
                    d.target,
                    d.rounds,
                    d.degree_bound,
                    d.data_log2()
                ));
            }
        }
        Format::Text => report.block(render_distinguishers(&list)),
    }
    Ok(report)
}

fn plan(report: &mut Report, settings: &Settings, default_keys: usize) -> SamplingPlan {
    let samples_log2 = settings.samples_log2.unwrap_or(DEFAULT_SAMPLES_LOG2);
    let keys = settings.keys.unwrap_or(default_keys);
    report.setting("samples-log2", samples_log2);
    report.setting("keys", keys);
    SamplingPlan::new(1u64 << samples_log2.min(40), keys, settings.seed)
}

fn estimate_lines(report: &mut Report, e: &CorrelationEstimate, expect: Option<f64>) {
    report.block(e);
    report.line(format!("log2_squared {:.2}", e.log2_squared()));
    if let Some(x) = expect {
        report.check(
            "tolerance",
            e.within(x, DL_TOLERANCE),
            format!("expected {x:.2} ± {DL_TOLERANCE}"),
        );
    }
}

fn dl_estimate(mut report: Report, settings: &Settings, args: &DlEstimateArgs) -> Outcome {
    if args.calibrate {
        report.setting("calibrate", true);
        let calibration = calibrate_bit_order(&PUBLISHED_DL_CASES)?;
        report.block(&calibration);
        report.check(
            "bit-order",
            calibration.locked == Some(BitOrder::MsbFirst),
            "msb-first reproduces every case",
        );
        return Ok(report);
    }
    if let Some(k) = args.case {
        let case = PUBLISHED_DL_CASES
            .get(k.wrapping_sub(1))
            .ok_or_else(|| usage(format!("--case takes 1..={}", PUBLISHED_DL_CASES.len())))?;
        report.setting("case", k);
        report.setting("target", case.target);
        report.setting("rounds", case.rounds);
        let mut plan = case.plan;
        if let Some(s) = settings.samples_log2 {
            plan.samples_per_key = 1 << s;
        }
        if let Some(n) = settings.keys {
            plan.keys = n;
        }
        report.setting("samples-per-key", plan.samples_per_key);
        report.setting("keys", plan.keys);
        report.setting("case-seed", plan.seed);
        let e = estimate_dl_correlation(case.target, case.rounds, case.pair(settings.order), plan)?;
        estimate_lines(
            &mut report,
            &e,
            Some(args.expect.unwrap_or(case.experimental_log2)),
        );
        return Ok(report);
    }
    let (Some(target), Some(rounds), Some(d), Some(m)) =
        (args.target, args.rounds, &args.difference, &args.mask)
    else {
        return Err(usage(
            "dl-estimate needs --case, --calibrate, or --target --rounds --difference --mask",
        ));
    };
    report.setting("target", target);
    report.setting("rounds", rounds);
    report.setting("difference", d);
    report.setting("mask", m);
    let plan = plan(&mut report, settings, DEFAULT_KEYS);
    let pair = DifferenceMaskPair::from_hex_with(d, m, settings.order)?;
    let e = estimate_dl_correlation(target, rounds, pair, plan)?;
    estimate_lines(&mut report, &e, args.expect);
    Ok(report)
}

fn linear_estimate(mut report: Report, settings: &Settings, args: &LinearEstimateArgs) -> Outcome {
    report.setting("target", args.target);
    report.setting("rounds", args.rounds);
    report.setting("input-mask", &args.input_mask);
    report.setting("output-mask", &args.output_mask);
    let plan = plan(&mut report, settings, DEFAULT_KEYS);
    let a = State128::from_hex_with(&args.input_mask, settings.order)?;
    let b = State128::from_hex_with(&args.output_mask, settings.order)?;
    let e = estimate_linear_correlation(args.target, args.rounds, a, b, plan)?;
    estimate_lines(&mut report, &e, args.expect);
    Ok(report)
}

fn integral_check(
    mut report: Report,
    settings: &Settings,
    which: StructureArg,
    controls: u64,
) -> Outcome {
    let keys = settings.keys.unwrap_or(20);
    report.setting("keys", keys);
    report.setting("controls", controls);
    let cases: Vec<IntegralCase> = match which {
        StructureArg::All => IntegralCase::ALL.to_vec(),
        StructureArg::Branch3Scaled => vec![IntegralCase::Branch3Scaled],
        StructureArg::Prf3 => vec![IntegralCase::Prf3],
    };
    for case in cases {
        let size = case.structure()?.size();
        let mut balanced = 0;
        for k in 0..keys {
            let map = case.balance(&derived_key(settings.seed, k))?;
            if map.is_balanced() {
                balanced += 1;
            } else {
                report.line(format!("{} key {k} unbalanced {map}", case.name()));
            }
        }
        report.check(
            case.name(),
            balanced == keys,
            format!("{balanced}/{keys} keys balanced over {size} plaintexts"),
        );
    }
    let mut nonzero = 0;
    for t in 0..controls {
        nonzero += u64::from(!random_control(settings.seed.wrapping_add(t))?.is_balanced());
    }
    report.check(
        "random-control",
        nonzero == controls,
        format!("{nonzero}/{controls} trials nonzero"),
    );
    Ok(report)
}

fn attack_demo(
    mut report: Report,
    settings: &Settings,
    trials: usize,
    sbox: usize,
    gadgets: &[usize],
) -> Outcome {
    let config = AttackConfig {
        target_sbox: sbox,
        gadgets: gadgets.to_vec(),
        ..AttackConfig::scaled()
    };
    report.setting("trials", trials);
    report.setting("target", config.target);
    report.setting("rounds", config.total_rounds);
    report.setting("sbox", sbox);
    report.setting("gadgets", format!("{gadgets:?}"));
    let argument = config.validate()?;
    report.line(format!("balance argument {argument:?}"));
    let mut recovered = 0;
    let mut observed: Vec<BTreeSet<u8>> = vec![BTreeSet::new(); gadgets.len()];
    let mut queries = 0;
    for i in 0..trials {
        let key = derived_key(settings.seed, i);
        let truth = whitening_nibble(&key, sbox)?;
        let oracle = CipherOracle::new(config.target, &key, config.total_rounds)?;
        let transcript = run_key_recovery(&config, &oracle)?;
        queries = transcript.queries;
        for (set, (_, passing)) in observed.iter_mut().zip(&transcript.candidates) {
            set.extend(passing.iter().map(|g| g ^ truth));
        }
        match transcript.recovered() {
            Some(n) if n == truth => recovered += 1,
            other => report.line(format!(
                "trial {i} truth {truth:x} got {other:?} candidates {}",
                hex_list(&transcript.intersection)
            )),
        }
    }
    report.line(format!("queries per trial {queries}"));
    let s4 = SboxName::S4.spec();
    for (g, seen) in gadgets.iter().zip(&observed) {
        let gadget = gadget_set(&s4, *g)?;
        let seen: Vec<u8> = seen.iter().copied().collect();
        report.line(format!(
            "gadget S{g} pattern {} observed {} xor-sum-survivors {} stated-criterion {}",
            gadget.pattern(),
            hex_list(&seen),
            hex_list(&balance_survivors(&s4, &gadget)?),
            hex_list(&survival_analysis(&s4, &gadget)?)
        ));
    }
    report.check(
        "recovery",
        recovered == trials,
        format!("{recovered}/{trials} trials"),
    );
    for v in AttackVariant::ALL {
        report.line(format!("complexity {}", complexity_report(v)));
    }
    Ok(report)
}

fn convention(arg: ConventionArg) -> DiffusionConvention {
    match arg {
        ConventionArg::SLSLS => DiffusionConvention::S_L_S_L_S,
        ConventionArg::LSLSL => DiffusionConvention::L_S_L_S_L,
        ConventionArg::SLSL => DiffusionConvention::S_L_S_L,
        ConventionArg::LSLS => DiffusionConvention::L_S_L_S,
    }
}

fn linlayer_scan(
    mut report: Report,
    conv: ConventionArg,
    multipliers: &[usize],
    calibrate: bool,
    list: Option<&std::path::Path>,
) -> Outcome {
    if calibrate {
        report.setting("calibrate", true);
        let c = calibrate_convention()?;
        report.block(&c);
        report.check(
            "convention",
            c.locked == Some(DiffusionConvention::LOCKED),
            DiffusionConvention::LOCKED,
        );
        return Ok(report);
    }
    let conv = convention(conv);
    let full = multipliers.is_empty();
    let multipliers = if full {
        all_multipliers()
    } else {
        multipliers.to_vec()
    };
    report.setting("convention", conv);
    report.setting(
        "multipliers",
        if full {
            "all".to_string()
        } else {
            format!("{multipliers:?}")
        },
    );
    let scan = enumerate_viable_params(conv, &multipliers)?;
    report.block(&scan);
    let original = BranchId::Branch3.linear();
    let has_original = scan.retained.contains(&original);
    report.line(format!("original {original} retained {has_original}"));
    if full {
        report.check(
            "full-diffusion",
            scan.full_diffusion == EXPECTED_FULL_DIFFUSION,
            scan.full_diffusion,
        );
        report.check(
            "retained",
            scan.retained_count() == EXPECTED_RETAINED,
            scan.retained_count(),
        );
        report.check("original", has_original, original);
    } else if multipliers.contains(&original.pi.multiplier()) {
        report.check("original", has_original, original);
    }
    if let Some(path) = list {
        std::fs::write(path, render_candidates(&scan.retained))?;
        report.line(format!("candidates written to {}", path.display()));
    }
    Ok(report)
}

fn trail_search(
    mut report: Report,
    branch: BranchId,
    rounds: usize,
    caps: TrailCaps,
    rule: RuleArg,
) -> Outcome {
    report.setting("branch", branch);
    report.setting("rounds", rounds);
    report.setting("max-weight", caps.max_weight);
    report.setting("max-active", caps.max_active_per_round);
    let rule = match rule {
        RuleArg::Transposed => MaskRule::Transposed,
        RuleArg::Direct => MaskRule::Direct,
    };
    report.setting("rule", format!("{rule:?}").to_lowercase());
    match best_linear_trail_with(branch.linear(), rounds, caps, rule)? {
        TrailSearch::Found(t) => {
            report.block(&t);
            report.line(format!("weight {}", t.total_weight()));
            report.check(
                "found",
                true,
                if t.proven_optimal {
                    "optimal"
                } else {
                    "within caps"
                },
            );
        }
        TrailSearch::CapExceeded {
            max_weight,
            truncated,
        } => {
            report.check(
                "found",
                false,
                format!("nothing up to weight {max_weight} (activity cap hit: {truncated})"),
            );
        }
    }
    Ok(report)
}

fn parse_model_target(text: &str) -> Result<ModelTarget, WorkbenchError> {
    if let Some(s) = text.strip_prefix("toy-") {
        return Ok(ModelTarget::Toy(s.parse::<SboxName>()?));
    }
    match text.parse::<Target>().map_err(usage)? {
        Target::Prf => Ok(ModelTarget::Prf),
        Target::Branch(b) => Ok(ModelTarget::Branch(b)),
    }
}

fn parse_side(text: &str, width: usize, order: BitOrder) -> Result<u128, WorkbenchError> {
    if width == 128 {
        return Ok(State128::from_hex_with(text, order)?.to_u128());
    }
    let digits = text.trim().trim_start_matches("0x");
    let v = u128::from_str_radix(digits, 16).map_err(|_| usage(format!("bad hex {text:?}")))?;
    if v >> width != 0 {
        return Err(usage(format!("{text} does not fit in {width} bits")));
    }
    Ok(v)
}

/// Builds the model described by the flags, refined to stage two when a
/// pair and weight are given.
pub fn build_model(
    report: &mut Report,
    settings: &Settings,
    args: &ModelArgs,
) -> Result<TrailModel, WorkbenchError> {
    let target_text = args
        .target
        .as_deref()
        .ok_or_else(|| usage("--target is required"))?;
    let target = parse_model_target(target_text)?;
    let toy = matches!(target, ModelTarget::Toy(_));
    let rounds = match (args.rounds, toy) {
        (Some(r), _) => Some(r),
        (None, true) => Some(1),
        (None, false) => None,
    };
    let analysis = match args.analysis {
        AnalysisArg::Differential => Analysis::Differential {
            rounds: rounds.ok_or_else(|| usage("--rounds is required"))?,
        },
        AnalysisArg::Linear => Analysis::Linear {
            rounds: rounds.ok_or_else(|| usage("--rounds is required"))?,
        },
        AnalysisArg::Dl => {
            let config = match &args.split {
                Some(s) => {
                    let (rd, rl) = s
                        .split_once(',')
                        .ok_or_else(|| usage("--split takes rd,rl"))?;
                    let rd = rd.trim().parse().map_err(usage)?;
                    let rl = rl.trim().parse().map_err(usage)?;
                    let c = RoundConfig::new(rd, rl);
                    match rounds.filter(|_| args.rounds.is_some()) {
                        Some(r) => c.for_rounds(r)?,
                        None => c,
                    }
                }
                None => RoundConfig::split(
                    rounds.ok_or_else(|| usage("--rounds or --split is required"))?,
                )?,
            };
            Analysis::DlStage1(config)
        }
    };
    report.setting("target", target);
    report.setting("analysis", analysis);
    let model = build_trail_model(target, analysis)?;
    match (&args.pair, args.weight) {
        (Some(pair), Some(weight)) => {
            let (d, l) = pair
                .split_once(',')
                .ok_or_else(|| usage("--pair takes delta,lambda"))?;
            let width = target.width();
            let pair = TrailPair::new(
                width,
                parse_side(d, width, settings.order)?,
                parse_side(l, width, settings.order)?,
            );
            report.setting("pair", pair);
            report.setting("weight", weight);
            Ok(refine_to_signed(&model, &pair, weight)?)
        }
        (None, None) => Ok(model),
        _ => Err(usage("--pair and --weight go together")),
    }
}

fn describe(report: &mut Report, model: &TrailModel) {
    report.line(format!("variables {}", model.program.variables().len()));
    report.line(format!("constraints {}", model.program.constraints().len()));
    report.line(format!("sbox-blocks {}", model.meta.blocks.len()));
}

fn export_model(
    mut report: Report,
    settings: &Settings,
    args: &ModelArgs,
    lp: &std::path::Path,
) -> Outcome {
    let model = build_model(&mut report, settings, args)?;
    report.setting("lp", lp.display());
    std::fs::write(lp, write_lp(&model.program))?;
    describe(&mut report, &model);
    Ok(report)
}

fn solver(settings: &Settings) -> Result<SolverAdapter, WorkbenchError> {
    match &settings.solver {
        Some(cmd) => Ok(SolverAdapter::new(
            cmd.split_whitespace().map(String::from).collect(),
        )?),
        None => Ok(SolverAdapter::from_env()?),
    }
}

fn solve(
    mut report: Report,
    settings: &Settings,
    args: &ModelArgs,
    lp: Option<&std::path::Path>,
    mode: SolveMode,
    cap: usize,
    span: i64,
) -> Outcome {
    let backend = solver(settings)?;
    report.setting("solver", backend.name());
    report.setting("mode", format!("{mode:?}").to_lowercase());
    let (program, model) = match lp {
        Some(path) => {
            report.setting("lp", path.display());
            (read_lp(&std::fs::read_to_string(path)?)?, None)
        }
        None => {
            let model = build_model(&mut report, settings, args)?;
            describe(&mut report, &model);
            (model.program.clone(), Some(model))
        }
    };
    match mode {
        SolveMode::Optimize => match backend.optimize(&program)? {
            Optimum::Optimal { value, solution } => {
                report.line(format!("objective {value}"));
                if let Some(pair) = model.as_ref().and_then(|m| m.pair_of(&solution)) {
                    report.line(format!("pair {pair}"));
                }
            }
            Optimum::Infeasible => report.check("feasible", false, "infeasible"),
        },
        SolveMode::Enumerate => {
            report.setting("cap", cap);
            let set = backend.enumerate(&program, cap)?;
            report.line(format!(
                "solutions {}{}",
                set.solutions.len(),
                if set.truncated { " (cap reached)" } else { "" }
            ));
        }
        SolveMode::TwoStage => {
            let model =
                model.ok_or_else(|| usage("two-stage mode needs a DL model, not an LP file"))?;
            report.setting("cap", cap);
            report.setting("span", span);
            let options = SearchOptions {
                span,
                pool_cap: cap,
                ..SearchOptions::default()
            };
            let result = two_stage_search(&model, &options, &backend)?;
            match result.pairs.weight {
                Some(w) => report.line(format!(
                    "stage-one optimum {w}, {} pairs",
                    result.pairs.pairs.len()
                )),
                None => report.check("feasible", false, "stage one infeasible"),
            }
            for c in &result.candidates {
                report.line(format!("candidate {c}"));
            }
            if let Some(best) = result.best() {
                report.line(format!("best {best}"));
            }
        }
    }
    Ok(report)
}
