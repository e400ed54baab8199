use std::fmt;
use std::ops::{BitAnd, BitAndAssign, BitOr, BitXor, BitXorAssign, Not};
use std::str::FromStr;

use crate::error::ParseHexError;

/// Which end of the integer rendering holds state bit `x0`.
///
/// The workbench default is [`BitOrder::MsbFirst`]; the other order exists
/// so that published hex values can be re-read under the alternate
/// convention during calibration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum BitOrder {
    /// `x0` is the most significant bit of the 32-hex-digit rendering.
    #[default]
    MsbFirst,
    /// `x0` is the least significant bit.
    LsbFirst,
}

/// A 128-bit state `x0 ... x127`, stored with `x0` in the most significant
/// bit of the inner integer.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct State128(u128);

impl State128 {
    pub const ZERO: State128 = State128(0);
    pub const ONES: State128 = State128(u128::MAX);

    pub const fn from_u128(raw: u128) -> Self {
        State128(raw)
    }

    pub const fn to_u128(self) -> u128 {
        self.0
    }

    /// State with the single bit `x_index` set.
    pub const fn unit(index: usize) -> Self {
        State128(1u128 << (127 - (index & 127)))
    }

    pub const fn bit(self, index: usize) -> bool {
        (self.0 >> (127 - (index & 127))) & 1 == 1
    }

    pub fn set_bit(&mut self, index: usize, value: bool) {
        let mask = 1u128 << (127 - (index & 127));
        if value {
            self.0 |= mask;
        } else {
            self.0 &= !mask;
        }
    }

    /// Nibble `i` (bits `x_{4i} .. x_{4i+3}`, with `x_{4i}` as the nibble's MSB).
    pub const fn nibble(self, index: usize) -> u8 {
        ((self.0 >> (124 - 4 * index)) & 0xf) as u8
    }

    pub fn set_nibble(&mut self, index: usize, value: u8) {
        let shift = 124 - 4 * index;
        self.0 = (self.0 & !(0xfu128 << shift)) | ((value as u128 & 0xf) << shift);
    }

    /// Byte `i` (bits `x_{8i} .. x_{8i+7}`).
    pub const fn byte(self, index: usize) -> u8 {
        ((self.0 >> (120 - 8 * index)) & 0xff) as u8
    }

    pub const fn count_ones(self) -> u32 {
        self.0.count_ones()
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Inner product over GF(2).
    pub const fn dot(self, other: State128) -> bool {
        (self.0 & other.0).count_ones() & 1 == 1
    }

    /// Paper-indexed positions of the set bits, ascending.
    pub fn ones(self) -> impl Iterator<Item = usize> {
        let raw = self.0;
        (0..128).filter(move |&i| (raw >> (127 - i)) & 1 == 1)
    }

    /// Parses up to 32 hex digits (optional `0x`, left-padded with zeros)
    /// under the given bit-order convention.
    pub fn from_hex_with(text: &str, order: BitOrder) -> Result<Self, ParseHexError> {
        let raw = parse_hex_u128(text)?;
        Ok(match order {
            BitOrder::MsbFirst => State128(raw),
            BitOrder::LsbFirst => State128(raw.reverse_bits()),
        })
    }

    pub fn from_hex(text: &str) -> Result<Self, ParseHexError> {
        Self::from_hex_with(text, BitOrder::MsbFirst)
    }

    /// Fixed-width 32-digit lowercase rendering under `order`.
    pub fn to_hex_with(self, order: BitOrder) -> String {
        let raw = match order {
            BitOrder::MsbFirst => self.0,
            BitOrder::LsbFirst => self.0.reverse_bits(),
        };
        format!("{raw:032x}")
    }

    pub fn to_hex(self) -> String {
        self.to_hex_with(BitOrder::MsbFirst)
    }
}

pub(crate) fn parse_hex_u128(text: &str) -> Result<u128, ParseHexError> {
    let digits = text.trim();
    let digits = digits
        .strip_prefix("0x")
        .or_else(|| digits.strip_prefix("0X"))
        .unwrap_or(digits);
    if digits.is_empty() {
        return Err(ParseHexError::Empty);
    }
    if digits.len() > 32 {
        return Err(ParseHexError::TooLong {
            digits: digits.len(),
            max: 32,
        });
    }
    let mut raw = 0u128;
    for (pos, ch) in digits.char_indices() {
        let value = ch.to_digit(16).ok_or(ParseHexError::BadDigit { ch, pos })?;
        raw = (raw << 4) | value as u128;
    }
    Ok(raw)
}

impl fmt::Debug for State128 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "State128(0x{:032x})", self.0)
    }
}

impl fmt::Display for State128 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{:032x}", self.0)
    }
}

impl fmt::LowerHex for State128 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(&self.0, f)
    }
}

impl FromStr for State128 {
    type Err = ParseHexError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_hex(s)
    }
}

impl BitXor for State128 {
    type Output = State128;
    fn bitxor(self, rhs: State128) -> State128 {
        State128(self.0 ^ rhs.0)
    }
}

impl BitXorAssign for State128 {
    fn bitxor_assign(&mut self, rhs: State128) {
        self.0 ^= rhs.0;
    }
}

impl BitAnd for State128 {
    type Output = State128;
    fn bitand(self, rhs: State128) -> State128 {
        State128(self.0 & rhs.0)
    }
}

impl BitAndAssign for State128 {
    fn bitand_assign(&mut self, rhs: State128) {
        self.0 &= rhs.0;
    }
}

impl BitOr for State128 {
    type Output = State128;
    fn bitor(self, rhs: State128) -> State128 {
        State128(self.0 | rhs.0)
    }
}

impl Not for State128 {
    type Output = State128;
    fn not(self) -> State128 {
        State128(!self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_round_trip_pads_left() {
        let s = State128::from_hex("0x6000").unwrap();
        assert_eq!(s.to_hex(), "00000000000000000000000000006000");
        assert!(s.bit(113) && s.bit(114));
        assert_eq!(s.count_ones(), 2);
    }

    #[test]
    fn lsb_order_reverses_indices() {
        let s = State128::from_hex_with("1", BitOrder::LsbFirst).unwrap();
        assert_eq!(s, State128::unit(0));
        assert_eq!(s.to_hex_with(BitOrder::LsbFirst), format!("{:032x}", 1));
    }

    #[test]
    fn rejects_bad_hex() {
        assert_eq!(State128::from_hex(""), Err(ParseHexError::Empty));
        assert!(matches!(
            State128::from_hex("0xg"),
            Err(ParseHexError::BadDigit { ch: 'g', .. })
        ));
        assert!(matches!(
            State128::from_hex(&"f".repeat(33)),
            Err(ParseHexError::TooLong { digits: 33, .. })
        ));
    }

    #[test]
    fn nibble_accessors() {
        let mut s = State128::ZERO;
        s.set_nibble(1, 0xa);
        assert_eq!(s.nibble(1), 0xa);
        assert!(s.bit(4) && !s.bit(5) && s.bit(6) && !s.bit(7));
        assert_eq!(s.byte(0), 0x0a);
    }
}
