use std::fmt;
use std::str::FromStr;

use crate::error::SboxError;

/// Names of the three Sboxes of the cipher.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SboxName {
    S3,
    S4,
    S5,
}

impl SboxName {
    pub const ALL: [SboxName; 3] = [SboxName::S3, SboxName::S4, SboxName::S5];

    pub fn spec(self) -> SboxSpec {
        match self {
            SboxName::S3 => SboxSpec::from_table(3, gleeok_cipher::S3.to_vec()),
            SboxName::S4 => SboxSpec::from_table(4, gleeok_cipher::S4.to_vec()),
            SboxName::S5 => SboxSpec::from_table(5, gleeok_cipher::S5.to_vec()),
        }
        .expect("embedded Sboxes are valid")
    }

    pub fn width(self) -> usize {
        match self {
            SboxName::S3 => 3,
            SboxName::S4 => 4,
            SboxName::S5 => 5,
        }
    }
}

impl fmt::Display for SboxName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.width())
    }
}

impl FromStr for SboxName {
    type Err = SboxError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "s3" => Ok(SboxName::S3),
            "s4" => Ok(SboxName::S4),
            "s5" => Ok(SboxName::S5),
            _ => Err(SboxError::UnknownSbox(s.to_string())),
        }
    }
}

/// An `n`-bit Sbox truth table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SboxSpec {
    width: usize,
    table: Vec<u8>,
}

impl SboxSpec {
    pub fn from_table(width: usize, table: Vec<u8>) -> Result<Self, SboxError> {
        if !(1..=8).contains(&width) || table.len() != 1 << width {
            return Err(SboxError::BadShape {
                width,
                len: table.len(),
            });
        }
        if let Some(&v) = table.iter().find(|&&v| (v as usize) >= 1 << width) {
            return Err(SboxError::ValueOutOfRange { value: v, width });
        }
        Ok(SboxSpec { width, table })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn size(&self) -> usize {
        1 << self.width
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    pub fn apply(&self, x: usize) -> usize {
        self.table[x] as usize
    }

    pub fn is_bijective(&self) -> bool {
        let mut seen = vec![false; self.size()];
        for &v in &self.table {
            if std::mem::replace(&mut seen[v as usize], true) {
                return false;
            }
        }
        true
    }

    pub fn inverse(&self) -> Result<SboxSpec, SboxError> {
        if !self.is_bijective() {
            return Err(SboxError::NotBijective);
        }
        let mut inv = vec![0u8; self.size()];
        for (x, &y) in self.table.iter().enumerate() {
            inv[y as usize] = x as u8;
        }
        Ok(SboxSpec {
            width: self.width,
            table: inv,
        })
    }

    /// Algebraic normal form of output bit `bit` (0 = most significant) as
    /// a coefficient vector indexed by monomial.
    pub fn anf(&self, bit: usize) -> Vec<u8> {
        let shift = self.width - 1 - bit;
        let mut coeffs: Vec<u8> = self.table.iter().map(|&y| (y >> shift) & 1).collect();
        // Möbius transform
        let mut step = 1;
        while step < coeffs.len() {
            for i in 0..coeffs.len() {
                if i & step != 0 {
                    coeffs[i] ^= coeffs[i ^ step];
                }
            }
            step <<= 1;
        }
        coeffs
    }

    /// Maximum algebraic degree over all output bits.
    pub fn algebraic_degree(&self) -> usize {
        (0..self.width)
            .map(|bit| {
                self.anf(bit)
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c == 1)
                    .map(|(m, _)| m.count_ones() as usize)
                    .max()
                    .unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_specs_are_bijective() {
        for name in SboxName::ALL {
            assert!(name.spec().is_bijective(), "{name}");
        }
    }

    #[test]
    fn degrees_of_sboxes_and_inverses() {
        let deg = |n: SboxName| n.spec().algebraic_degree();
        let inv = |n: SboxName| n.spec().inverse().unwrap().algebraic_degree();
        assert_eq!((deg(SboxName::S3), inv(SboxName::S3)), (2, 2));
        assert_eq!((deg(SboxName::S4), inv(SboxName::S4)), (3, 3));
        assert_eq!((deg(SboxName::S5), inv(SboxName::S5)), (2, 3));
    }

    #[test]
    fn shape_checks() {
        assert!(SboxSpec::from_table(3, vec![0; 7]).is_err());
        assert!(SboxSpec::from_table(2, vec![0, 1, 2, 4]).is_err());
        assert!(SboxSpec::from_table(2, vec![0, 0, 1, 2])
            .unwrap()
            .inverse()
            .is_err());
    }
}
