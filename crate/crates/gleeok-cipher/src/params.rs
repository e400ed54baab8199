use std::fmt;
use std::str::FromStr;

use crate::error::CipherError;

/// One of the three parallel branches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BranchId {
    Branch1,
    Branch2,
    Branch3,
}

impl BranchId {
    pub const ALL: [BranchId; 3] = [BranchId::Branch1, BranchId::Branch2, BranchId::Branch3];

    /// 1-based branch number, also the multiplier of the constant offset.
    pub const fn number(self) -> usize {
        match self {
            BranchId::Branch1 => 1,
            BranchId::Branch2 => 2,
            BranchId::Branch3 => 3,
        }
    }

    pub const fn theta(self) -> ThetaParams {
        match self {
            BranchId::Branch1 => ThetaParams::ORIGINAL_BRANCH1,
            BranchId::Branch2 => ThetaParams::ORIGINAL_BRANCH2,
            BranchId::Branch3 => ThetaParams::ORIGINAL_BRANCH3,
        }
    }

    pub const fn pi(self) -> PiParam {
        match self {
            BranchId::Branch1 | BranchId::Branch2 => PiParam(117),
            BranchId::Branch3 => PiParam(11),
        }
    }

    pub const fn linear(self) -> LinearParams {
        LinearParams {
            theta: self.theta(),
            pi: self.pi(),
        }
    }

    /// Key-schedule multiplier `pk`.
    pub const fn key_multiplier(self) -> usize {
        match self {
            BranchId::Branch1 => 29,
            BranchId::Branch2 => 51,
            BranchId::Branch3 => 107,
        }
    }

    pub const fn sbox_layer(self) -> SboxLayerKind {
        match self {
            BranchId::Branch1 | BranchId::Branch2 => SboxLayerKind::S3S5,
            BranchId::Branch3 => SboxLayerKind::S4,
        }
    }
}

impl fmt::Display for BranchId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "branch{}", self.number())
    }
}

impl FromStr for BranchId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "branch1" | "b1" | "1" => Ok(BranchId::Branch1),
            "branch2" | "b2" | "2" => Ok(BranchId::Branch2),
            "branch3" | "b3" | "3" => Ok(BranchId::Branch3),
            other => Err(format!("unknown branch {other:?}")),
        }
    }
}

/// What an analysis runs against: one branch or the three-branch PRF.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    Branch(BranchId),
    Prf,
}

impl Target {
    pub const ALL: [Target; 4] = [
        Target::Branch(BranchId::Branch1),
        Target::Branch(BranchId::Branch2),
        Target::Branch(BranchId::Branch3),
        Target::Prf,
    ];

    /// Branches whose outputs are XORed to form the target's output.
    pub fn branches(self) -> &'static [BranchId] {
        match self {
            Target::Branch(BranchId::Branch1) => &BranchId::ALL[0..1],
            Target::Branch(BranchId::Branch2) => &BranchId::ALL[1..2],
            Target::Branch(BranchId::Branch3) => &BranchId::ALL[2..3],
            Target::Prf => &BranchId::ALL,
        }
    }
}

impl From<BranchId> for Target {
    fn from(b: BranchId) -> Self {
        Target::Branch(b)
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Branch(b) => b.fmt(f),
            Target::Prf => f.write_str("prf"),
        }
    }
}

impl FromStr for Target {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("prf") {
            return Ok(Target::Prf);
        }
        s.parse()
            .map(Target::Branch)
            .map_err(|_| format!("unknown target {s:?}"))
    }
}

/// Layout of the nonlinear layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SboxLayerKind {
    /// `S3` on bits 0..3 and `S5` on bits 3..8 of every byte.
    S3S5,
    /// `S4` on every nibble.
    S4,
}

/// θ offsets, stored sorted ascending.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ThetaParams {
    offsets: [usize; 3],
}

impl ThetaParams {
    pub const ORIGINAL_BRANCH1: ThetaParams = ThetaParams {
        offsets: [12, 31, 86],
    };
    pub const ORIGINAL_BRANCH2: ThetaParams = ThetaParams {
        offsets: [4, 23, 78],
    };
    pub const ORIGINAL_BRANCH3: ThetaParams = ThetaParams {
        offsets: [7, 15, 23],
    };

    pub fn new(t0: usize, t1: usize, t2: usize) -> Result<Self, CipherError> {
        let mut offsets = [t0, t1, t2];
        offsets.sort_unstable();
        if offsets[2] >= 128 || offsets[0] == offsets[1] || offsets[1] == offsets[2] {
            return Err(CipherError::ThetaOffsets([t0, t1, t2]));
        }
        Ok(ThetaParams { offsets })
    }

    pub const fn offsets(&self) -> [usize; 3] {
        self.offsets
    }
}

/// Multiplier of the bit permutation `x_i <- x_{i*p mod 128}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PiParam(usize);

impl PiParam {
    pub fn new(multiplier: usize) -> Result<Self, CipherError> {
        if multiplier % 2 == 0 || multiplier >= 128 {
            return Err(CipherError::PiMultiplier(multiplier));
        }
        Ok(PiParam(multiplier))
    }

    pub const fn multiplier(&self) -> usize {
        self.0
    }

    /// Source index feeding output bit `index`.
    pub const fn source(&self, index: usize) -> usize {
        (index * self.0) % 128
    }
}

/// θ followed by π.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearParams {
    pub theta: ThetaParams,
    pub pi: PiParam,
}

impl LinearParams {
    pub fn new(t0: usize, t1: usize, t2: usize, p: usize) -> Result<Self, CipherError> {
        Ok(LinearParams {
            theta: ThetaParams::new(t0, t1, t2)?,
            pi: PiParam::new(p)?,
        })
    }
}

impl fmt::Display for LinearParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [t0, t1, t2] = self.theta.offsets();
        write!(f, "({t0},{t1},{t2},{})", self.pi.multiplier())
    }
}
