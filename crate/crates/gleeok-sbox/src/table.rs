use std::fmt;
use std::str::FromStr;

use crate::error::SboxError;
use crate::spec::SboxSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TableKind {
    Ddt,
    Lat,
    DlctUnsigned,
    DlctSigned,
}

impl TableKind {
    pub const ALL: [TableKind; 4] = [
        TableKind::Ddt,
        TableKind::Lat,
        TableKind::DlctUnsigned,
        TableKind::DlctSigned,
    ];

    pub fn is_dlct(self) -> bool {
        matches!(self, TableKind::DlctUnsigned | TableKind::DlctSigned)
    }
}

impl fmt::Display for TableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TableKind::Ddt => "ddt",
            TableKind::Lat => "lat",
            TableKind::DlctUnsigned => "dlct",
            TableKind::DlctSigned => "dlct-signed",
        })
    }
}

impl FromStr for TableKind {
    type Err = SboxError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ddt" => Ok(TableKind::Ddt),
            "lat" => Ok(TableKind::Lat),
            "dlct" => Ok(TableKind::DlctUnsigned),
            "dlct-signed" => Ok(TableKind::DlctSigned),
            other => Err(SboxError::asset(0, format!("unknown table kind {other:?}"))),
        }
    }
}

/// A `2^n x 2^n` table; rows are input differences/masks, columns outputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnTable {
    kind: TableKind,
    width: usize,
    entries: Vec<i32>,
}

fn parity(x: usize) -> bool {
    x.count_ones() & 1 == 1
}

impl ConnTable {
    pub fn from_entries(
        kind: TableKind,
        width: usize,
        entries: Vec<i32>,
    ) -> Result<Self, SboxError> {
        if entries.len() != 1 << (2 * width) {
            return Err(SboxError::BadShape {
                width,
                len: entries.len(),
            });
        }
        Ok(ConnTable {
            kind,
            width,
            entries,
        })
    }

    pub fn kind(&self) -> TableKind {
        self.kind
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn size(&self) -> usize {
        1 << self.width
    }

    pub fn get(&self, row: usize, col: usize) -> i32 {
        self.entries[(row << self.width) | col]
    }

    pub fn row(&self, row: usize) -> &[i32] {
        let n = self.size();
        &self.entries[row * n..(row + 1) * n]
    }

    /// Exponent `w` such that the entry's probability or correlation
    /// magnitude is `2^-w`; `None` for zero or non-power-of-two entries.
    pub fn weight(&self, row: usize, col: usize) -> Option<u32> {
        let e = self.get(row, col).unsigned_abs();
        if e == 0 || !e.is_power_of_two() {
            return None;
        }
        let full = match self.kind {
            TableKind::Ddt => self.width as u32,
            _ => self.width as u32 - 1,
        };
        full.checked_sub(e.trailing_zeros())
    }

    /// Structural invariants every table of its kind satisfies.
    pub fn check_structure(&self) -> Result<(), String> {
        let n = self.size();
        let half = (n / 2) as i32;
        match self.kind {
            TableKind::Ddt => {
                for a in 0..n {
                    if self.row(a).iter().any(|e| e % 2 != 0) {
                        return Err(format!("odd entry in row {a:x}"));
                    }
                    if self.row(a).iter().sum::<i32>() != n as i32 {
                        return Err(format!("row {a:x} does not sum to {n}"));
                    }
                }
                if self.get(0, 0) != n as i32 || (1..n).any(|b| self.get(0, b) != 0) {
                    return Err("zero row is not a point mass".into());
                }
            }
            TableKind::Lat => {
                if self.get(0, 0) != half
                    || (1..n).any(|i| self.get(0, i) != 0 || self.get(i, 0) != 0)
                {
                    return Err("LAT zero row/column violated".into());
                }
            }
            TableKind::DlctUnsigned | TableKind::DlctSigned => {
                if (0..n).any(|i| self.get(0, i) != half || self.get(i, 0) != half) {
                    return Err("DLCT zero row/column violated".into());
                }
                if self.kind == TableKind::DlctUnsigned && self.entries.iter().any(|&e| e < 0) {
                    return Err("negative entry in unsigned DLCT".into());
                }
            }
        }
        Ok(())
    }
}

/// Exhaustive table generation over all inputs.
pub fn build_table(sbox: &SboxSpec, kind: TableKind) -> ConnTable {
    let n = sbox.size();
    let half = (n / 2) as i32;
    let mut entries = vec![0i32; n * n];
    match kind {
        TableKind::Ddt => {
            for a in 0..n {
                for x in 0..n {
                    entries[a * n + (sbox.apply(x) ^ sbox.apply(x ^ a))] += 1;
                }
            }
        }
        TableKind::Lat => {
            for a in 0..n {
                for b in 0..n {
                    let agree = (0..n)
                        .filter(|&x| parity(a & x) == parity(b & sbox.apply(x)))
                        .count();
                    entries[a * n + b] = agree as i32 - half;
                }
            }
        }
        TableKind::DlctUnsigned | TableKind::DlctSigned => {
            for d in 0..n {
                for b in 0..n {
                    let agree = (0..n)
                        .filter(|&x| parity(b & sbox.apply(x)) == parity(b & sbox.apply(x ^ d)))
                        .count();
                    let e = agree as i32 - half;
                    entries[d * n + b] = if kind == TableKind::DlctUnsigned {
                        e.abs()
                    } else {
                        e
                    };
                }
            }
        }
    }
    ConnTable {
        kind,
        width: sbox.width(),
        entries,
    }
}
