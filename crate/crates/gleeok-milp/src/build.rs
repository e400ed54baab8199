use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::fmt;

use gleeok_cipher::{apply_linear, BitOrder, BranchId, Gf2Matrix128, SboxLayerKind, State128};
use gleeok_linlayer::linear_transpose;
use gleeok_sbox::{cutting_off_inequality, embedded_system, EncodedSystem, SboxName, TableKind};

use crate::error::MilpError;
use crate::program::{MilpProgram, Sense, Solution, Terms};

pub const MAX_ROUNDS: usize = 12;

/// What the model describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelTarget {
    Branch(BranchId),
    /// Three branch sub-models sharing input difference and output mask.
    Prf,
    /// One Sbox and no linear layer, small enough to enumerate.
    Toy(SboxName),
}

impl fmt::Display for ModelTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelTarget::Branch(b) => write!(f, "{b}"),
            ModelTarget::Prf => f.write_str("prf"),
            ModelTarget::Toy(s) => write!(f, "toy-{s}"),
        }
    }
}

impl ModelTarget {
    pub fn width(self) -> usize {
        match self {
            ModelTarget::Toy(s) => s.width(),
            _ => 128,
        }
    }
}

/// `rd` differential rounds, one DLCT round, `rl` linear rounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RoundConfig {
    pub rd: usize,
    pub rl: usize,
}

impl RoundConfig {
    pub fn new(rd: usize, rl: usize) -> Self {
        RoundConfig { rd, rl }
    }

    /// Odd `R` splits evenly around the middle round; even `R` puts the
    /// extra round on the linear side.
    pub fn split(rounds: usize) -> Result<Self, MilpError> {
        if !(1..=MAX_ROUNDS).contains(&rounds) {
            return Err(MilpError::Rounds(rounds));
        }
        Ok(if rounds % 2 == 1 {
            RoundConfig {
                rd: (rounds - 1) / 2,
                rl: (rounds - 1) / 2,
            }
        } else {
            RoundConfig {
                rd: rounds / 2 - 1,
                rl: rounds / 2,
            }
        })
    }

    pub fn total(&self) -> usize {
        self.rd + 1 + self.rl
    }

    /// Checks the split against an expected total.
    pub fn for_rounds(self, rounds: usize) -> Result<Self, MilpError> {
        if self.total() != rounds {
            return Err(MilpError::RoundSplit {
                rd: self.rd,
                rl: self.rl,
                rounds,
            });
        }
        Ok(self)
    }
}

impl fmt::Display for RoundConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},1,{})", self.rd, self.rl)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Analysis {
    Differential {
        rounds: usize,
    },
    Linear {
        rounds: usize,
    },
    /// Stage one of the DL search: objective `P + C_m + 2·C_l`.
    DlStage1(RoundConfig),
}

impl Analysis {
    pub fn rounds(&self) -> usize {
        match self {
            Analysis::Differential { rounds } | Analysis::Linear { rounds } => *rounds,
            Analysis::DlStage1(c) => c.total(),
        }
    }
}

impl fmt::Display for Analysis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Analysis::Differential { rounds } => write!(f, "differential, {rounds} rounds"),
            Analysis::Linear { rounds } => write!(f, "linear, {rounds} rounds"),
            Analysis::DlStage1(c) => write!(f, "dl stage 1, {c}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Part {
    Difference,
    Middle,
    Mask,
}

/// One Sbox instance encoded by an inequality system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SboxBlock {
    pub branch: Option<BranchId>,
    pub round: usize,
    pub slot: usize,
    pub sbox: SboxName,
    pub table: TableKind,
}

/// Input difference (or mask) and output mask (or difference), as the
/// first `width` state bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TrailPair {
    pub width: usize,
    pub delta: u128,
    pub lambda: u128,
}

impl TrailPair {
    pub fn new(width: usize, delta: u128, lambda: u128) -> Self {
        TrailPair {
            width,
            delta,
            lambda,
        }
    }

    pub fn from_states(delta: State128, lambda: State128) -> Self {
        TrailPair {
            width: 128,
            delta: delta.to_u128(),
            lambda: lambda.to_u128(),
        }
    }

    fn bit(value: u128, width: usize, i: usize) -> u8 {
        ((value >> (width - 1 - i)) & 1) as u8
    }

    pub fn delta_bits(&self) -> Vec<u8> {
        (0..self.width)
            .map(|i| Self::bit(self.delta, self.width, i))
            .collect()
    }

    pub fn lambda_bits(&self) -> Vec<u8> {
        (0..self.width)
            .map(|i| Self::bit(self.lambda, self.width, i))
            .collect()
    }

    fn digits(&self) -> usize {
        self.width.div_ceil(4)
    }
}

impl fmt::Display for TrailPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.digits();
        write!(f, "({:0d$x}, {:0d$x})", self.delta, self.lambda)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelMeta {
    pub target: ModelTarget,
    pub analysis: Analysis,
    /// Stage-two model with signed middle-round systems.
    pub signed: bool,
    pub input_vars: Vec<String>,
    pub output_vars: Vec<String>,
    pub middle_signs: Vec<String>,
    pub trail_sign: Option<String>,
    pub parity_dummy: Option<String>,
    /// State-bit and sign variables; two solutions equal on these are the
    /// same trail.
    pub trail_vars: Vec<String>,
    pub blocks: Vec<SboxBlock>,
    pub cuts: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrailModel {
    pub program: MilpProgram,
    pub meta: ModelMeta,
}

impl TrailModel {
    /// The `(Δ, λ)` a solution assigns.
    pub fn pair_of(&self, solution: &Solution) -> Option<TrailPair> {
        let read = |vars: &[String]| {
            vars.iter().try_fold(0u128, |acc, v| {
                solution.get(v).map(|&b| (acc << 1) | (b as u128 & 1))
            })
        };
        Some(TrailPair::new(
            self.meta.target.width(),
            read(&self.meta.input_vars)?,
            read(&self.meta.output_vars)?,
        ))
    }

    /// Excludes every solution with this `(Δ, λ)`.
    pub fn cut_pair(&mut self, pair: &TrailPair) -> Result<(), MilpError> {
        let point: Vec<u8> = pair
            .delta_bits()
            .into_iter()
            .chain(pair.lambda_bits())
            .collect();
        let cut = cutting_off_inequality(&point);
        let vars = self.meta.input_vars.iter().chain(&self.meta.output_vars);
        let terms: Terms = cut
            .coeffs
            .iter()
            .zip(vars)
            .map(|(&c, v)| (c, v.clone()))
            .collect();
        self.meta.cuts += 1;
        self.program
            .constrain(format!("cut_{}", self.meta.cuts), terms, Sense::Ge, cut.rhs)
    }

    /// Fixes `(Δ, λ)`.
    pub fn fix_pair(&mut self, pair: &TrailPair) -> Result<(), MilpError> {
        let width = self.meta.target.width();
        if pair.width != width {
            return Err(MilpError::PairWidth {
                expected: width,
                got: pair.width,
            });
        }
        let fixes: Vec<(String, u8)> = self
            .meta
            .input_vars
            .iter()
            .cloned()
            .zip(pair.delta_bits())
            .chain(
                self.meta
                    .output_vars
                    .iter()
                    .cloned()
                    .zip(pair.lambda_bits()),
            )
            .collect();
        for (v, b) in fixes {
            self.program
                .constrain(format!("fix_{v}"), vec![(1, v)], Sense::Eq, b as i64)?;
        }
        Ok(())
    }
}

/// `(sbox, first state bit)` of every Sbox in a layer.
pub fn sbox_slots(kind: SboxLayerKind) -> Vec<(SboxName, usize)> {
    match kind {
        SboxLayerKind::S4 => (0..32).map(|i| (SboxName::S4, 4 * i)).collect(),
        SboxLayerKind::S3S5 => (0..16)
            .flat_map(|k| [(SboxName::S3, 8 * k), (SboxName::S5, 8 * k + 3)])
            .collect(),
    }
}

struct Builder {
    systems: HashMap<(SboxName, TableKind), EncodedSystem>,
    program: MilpProgram,
    objective: Terms,
    meta: ModelMeta,
}

struct BranchLayout {
    branch: Option<BranchId>,
    prefix: String,
    slots: Vec<(SboxName, usize)>,
    width: usize,
    rounds: usize,
    linear: Option<(Gf2Matrix128, Gf2Matrix128)>,
}

impl BranchLayout {
    fn x(&self, r: usize, i: usize) -> String {
        if r == 0 {
            format!("in_{i}")
        } else if r == self.rounds {
            format!("out_{i}")
        } else {
            format!("{}x{r}_{i}", self.prefix)
        }
    }

    fn y(&self, r: usize, i: usize) -> String {
        if self.linear.is_none() {
            // No linear layer: the Sbox output is the model output.
            return format!("out_{i}");
        }
        format!("{}y{r}_{i}", self.prefix)
    }
}

fn part_of(analysis: Analysis, r: usize) -> Part {
    match analysis {
        Analysis::Differential { .. } => Part::Difference,
        Analysis::Linear { .. } => Part::Mask,
        Analysis::DlStage1(c) if r < c.rd => Part::Difference,
        Analysis::DlStage1(c) if r == c.rd => Part::Middle,
        Analysis::DlStage1(_) => Part::Mask,
    }
}

impl Builder {
    fn sbox_block(
        &mut self,
        layout: &BranchLayout,
        r: usize,
        slot: usize,
        part: Part,
    ) -> Result<(), MilpError> {
        let (sbox, first) = layout.slots[slot];
        let signed = self.meta.signed;
        let kind = match part {
            Part::Difference => TableKind::Ddt,
            Part::Mask => TableKind::Lat,
            // The unsigned S4 system is defective; its signed system with a
            // free sign projects onto the unsigned table.
            Part::Middle if signed || sbox == SboxName::S4 => TableKind::DlctSigned,
            Part::Middle => TableKind::DlctUnsigned,
        };
        let entry = match self.systems.entry((sbox, kind)) {
            Entry::Occupied(e) => e.get().clone(),
            Entry::Vacant(e) => e.insert(embedded_system(sbox, kind)?).clone(),
        };
        let enc = &entry.encoding;
        let w = sbox.width();
        let bit = |k: usize| match enc.order() {
            BitOrder::MsbFirst => first + k,
            BitOrder::LsbFirst => first + w - 1 - k,
        };
        let tag = format!("{}r{r}_sb{slot}", layout.prefix);
        let mut rename = HashMap::new();
        for (k, v) in enc.input_vars().iter().enumerate() {
            rename.insert(v.clone(), layout.x(r, bit(k)));
        }
        for (k, v) in enc.output_vars().iter().enumerate() {
            rename.insert(v.clone(), layout.y(r, bit(k)));
        }
        for v in enc.weight_vars() {
            let name = format!("{}{v}_{r}_{slot}", layout.prefix);
            self.program.binary(name.clone())?;
            rename.insert(v, name);
        }
        if let Some(s) = enc.sign_var() {
            let name = format!("{}s_{r}_{slot}", layout.prefix);
            self.program.binary(name.clone())?;
            self.meta.trail_vars.push(name.clone());
            if part == Part::Middle && signed {
                self.meta.middle_signs.push(name.clone());
            }
            rename.insert(s.to_string(), name);
        }
        let factor = if part == Part::Mask { 2 } else { 1 };
        for (c, v) in enc.weight_terms() {
            self.objective.push((factor * c, rename[v].clone()));
        }
        self.program
            .comment_next(format!("block {tag} {kind}-{sbox}"));
        for (q, row) in entry.system.rows().iter().enumerate() {
            let terms: Terms = row
                .coeffs
                .iter()
                .zip(entry.system.vars())
                .map(|(&c, v)| (c, rename[v].clone()))
                .collect();
            self.program
                .constrain(format!("{tag}_q{q}"), terms, Sense::Ge, row.rhs)?;
        }
        self.meta.blocks.push(SboxBlock {
            branch: layout.branch,
            round: r,
            slot,
            sbox,
            table: kind,
        });
        Ok(())
    }

    /// `target = XOR of sources` as `Σ sources + target - 2t = 0`.
    fn xor(&mut self, name: String, target: String, sources: Vec<String>) -> Result<(), MilpError> {
        let dummy = format!("{name}_t");
        self.program
            .integer(dummy.clone(), 0, sources.len().div_ceil(2) as i64)?;
        let mut terms: Terms = sources.into_iter().map(|s| (1, s)).collect();
        terms.push((1, target));
        terms.push((-2, dummy));
        self.program.constrain(name, terms, Sense::Eq, 0)
    }

    fn branch(&mut self, layout: &BranchLayout, analysis: Analysis) -> Result<(), MilpError> {
        let rounds = layout.rounds;
        for r in 1..rounds {
            for i in 0..layout.width {
                self.program.binary(layout.x(r, i))?;
            }
        }
        if layout.linear.is_some() {
            for r in 0..rounds {
                for i in 0..layout.width {
                    self.program.binary(layout.y(r, i))?;
                }
            }
        }
        for r in 1..rounds {
            self.meta
                .trail_vars
                .extend((0..layout.width).map(|i| layout.x(r, i)));
        }
        if layout.linear.is_some() {
            for r in 0..rounds {
                self.meta
                    .trail_vars
                    .extend((0..layout.width).map(|i| layout.y(r, i)));
            }
        }
        for r in 0..rounds {
            let part = part_of(analysis, r);
            for slot in 0..layout.slots.len() {
                self.sbox_block(layout, r, slot, part)?;
            }
            let Some((forward, transpose)) = &layout.linear else {
                continue;
            };
            for i in 0..layout.width {
                let name = format!("{}l{r}_{i}", layout.prefix);
                if part == Part::Difference {
                    let sources = forward.row(i).ones().map(|j| layout.y(r, j)).collect();
                    self.xor(name, layout.x(r + 1, i), sources)?;
                } else {
                    let sources = transpose
                        .row(i)
                        .ones()
                        .map(|j| layout.x(r + 1, j))
                        .collect();
                    self.xor(name, layout.y(r, i), sources)?;
                }
            }
        }
        Ok(())
    }
}

fn build(target: ModelTarget, analysis: Analysis, signed: bool) -> Result<TrailModel, MilpError> {
    let rounds = analysis.rounds();
    if !(1..=MAX_ROUNDS).contains(&rounds) {
        return Err(MilpError::Rounds(rounds));
    }
    if matches!(target, ModelTarget::Toy(_)) && rounds != 1 {
        return Err(MilpError::ToyRounds(target.to_string()));
    }
    let width = target.width();
    let layouts: Vec<BranchLayout> = match target {
        ModelTarget::Toy(s) => vec![BranchLayout {
            branch: None,
            prefix: String::new(),
            slots: vec![(s, 0)],
            width,
            rounds,
            linear: None,
        }],
        ModelTarget::Branch(_) | ModelTarget::Prf => {
            let branches: Vec<BranchId> = match target {
                ModelTarget::Branch(b) => vec![b],
                _ => BranchId::ALL.to_vec(),
            };
            branches
                .into_iter()
                .map(|b| {
                    let params = b.linear();
                    BranchLayout {
                        branch: Some(b),
                        prefix: if target == ModelTarget::Prf {
                            format!("b{}_", b.number())
                        } else {
                            String::new()
                        },
                        slots: sbox_slots(b.sbox_layer()),
                        width,
                        rounds,
                        linear: Some((
                            Gf2Matrix128::from_map(|x| apply_linear(params, x)),
                            Gf2Matrix128::from_map(|m| linear_transpose(params, m)),
                        )),
                    }
                })
                .collect()
        }
    };
    let input_vars: Vec<String> = (0..width).map(|i| format!("in_{i}")).collect();
    let output_vars: Vec<String> = (0..width).map(|i| format!("out_{i}")).collect();
    let mut b = Builder {
        systems: HashMap::new(),
        program: MilpProgram::new(),
        objective: Vec::new(),
        meta: ModelMeta {
            target,
            analysis,
            signed,
            input_vars: input_vars.clone(),
            output_vars: output_vars.clone(),
            middle_signs: Vec::new(),
            trail_sign: None,
            parity_dummy: None,
            trail_vars: input_vars.iter().chain(&output_vars).cloned().collect(),
            blocks: Vec::new(),
            cuts: 0,
        },
    };
    for v in input_vars.iter().chain(&output_vars) {
        b.program.binary(v.clone())?;
    }
    for layout in &layouts {
        b.branch(layout, analysis)?;
    }
    let ones = |vars: &[String]| vars.iter().map(|v| (1, v.clone())).collect::<Terms>();
    if !matches!(analysis, Analysis::Linear { .. }) {
        b.program
            .constrain("nonzero_in", ones(&input_vars), Sense::Ge, 1)?;
    }
    if !matches!(analysis, Analysis::Differential { .. }) {
        b.program
            .constrain("nonzero_out", ones(&output_vars), Sense::Ge, 1)?;
    }
    if signed {
        let n = b.meta.middle_signs.len() as i64;
        b.program.binary("s")?;
        b.program.integer("d", 0, (n + 1) / 2)?;
        let mut terms: Terms = vec![(1, "s".to_string())];
        terms.extend(b.meta.middle_signs.iter().map(|v| (1, v.clone())));
        terms.push((-2, "d".to_string()));
        b.program.constrain("sign_parity", terms, Sense::Eq, 0)?;
        b.meta.trail_sign = Some("s".into());
        b.meta.parity_dummy = Some("d".into());
        b.meta.trail_vars.push("s".into());
    }
    let objective = std::mem::take(&mut b.objective);
    b.program.set_objective(objective)?;
    b.program.validate()?;
    Ok(TrailModel {
        program: b.program,
        meta: b.meta,
    })
}

pub fn build_trail_model(target: ModelTarget, analysis: Analysis) -> Result<TrailModel, MilpError> {
    build(target, analysis, false)
}

/// Stage two: signed middle-round systems with a trail-sign parity
/// constraint, `(Δ, λ)` fixed to `pair` and the objective pinned to `weight`.
pub fn refine_to_signed(
    model: &TrailModel,
    pair: &TrailPair,
    weight: i64,
) -> Result<TrailModel, MilpError> {
    let Analysis::DlStage1(_) = model.meta.analysis else {
        return Err(MilpError::NotDlModel);
    };
    let mut signed = build(model.meta.target, model.meta.analysis, true)?;
    signed.fix_pair(pair)?;
    signed.program.pin_objective(weight);
    Ok(signed)
}
