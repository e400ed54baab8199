use crate::params::{BranchId, SboxLayerKind};
use crate::state::State128;

pub const S3: [u8; 8] = [0x0, 0x5, 0x3, 0x2, 0x6, 0x1, 0x4, 0x7];

pub const S4: [u8; 16] = [
    0x1, 0x0, 0x2, 0x4, 0x3, 0x8, 0x6, 0xd, 0x9, 0xa, 0xb, 0xe, 0xf, 0xc, 0x7, 0x5,
];

pub const S5: [u8; 32] = [
    0x00, 0x05, 0x0a, 0x0b, 0x14, 0x11, 0x16, 0x17, 0x09, 0x0c, 0x03, 0x02, 0x0d, 0x08, 0x0f, 0x0e,
    0x12, 0x15, 0x18, 0x1b, 0x06, 0x01, 0x04, 0x07, 0x1a, 0x1d, 0x10, 0x13, 0x1e, 0x19, 0x1c, 0x1f,
];

const fn invert<const N: usize>(table: [u8; N]) -> [u8; N] {
    let mut out = [0u8; N];
    let mut i = 0;
    while i < N {
        out[table[i] as usize] = i as u8;
        i += 1;
    }
    out
}

pub const S3_INV: [u8; 8] = invert(S3);
pub const S4_INV: [u8; 16] = invert(S4);
pub const S5_INV: [u8; 32] = invert(S5);

const fn byte_table(kind: SboxLayerKind, inverse: bool) -> [u8; 256] {
    let mut out = [0u8; 256];
    let mut b = 0;
    while b < 256 {
        out[b] = match kind {
            SboxLayerKind::S3S5 => {
                let (s3, s5) = if inverse { (S3_INV, S5_INV) } else { (S3, S5) };
                (s3[b >> 5] << 5) | s5[b & 31]
            }
            SboxLayerKind::S4 => {
                let s4 = if inverse { S4_INV } else { S4 };
                (s4[b >> 4] << 4) | s4[b & 15]
            }
        };
        b += 1;
    }
    out
}

const S3S5_FWD: [u8; 256] = byte_table(SboxLayerKind::S3S5, false);
const S3S5_INV: [u8; 256] = byte_table(SboxLayerKind::S3S5, true);
const S4_FWD: [u8; 256] = byte_table(SboxLayerKind::S4, false);
const S4_INV_BYTE: [u8; 256] = byte_table(SboxLayerKind::S4, true);

/// Direction of a nonlinear layer evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Byte-wise lookup table for one layer kind and direction.
pub const fn layer_byte_table(kind: SboxLayerKind, direction: Direction) -> &'static [u8; 256] {
    match (kind, direction) {
        (SboxLayerKind::S3S5, Direction::Forward) => &S3S5_FWD,
        (SboxLayerKind::S3S5, Direction::Inverse) => &S3S5_INV,
        (SboxLayerKind::S4, Direction::Forward) => &S4_FWD,
        (SboxLayerKind::S4, Direction::Inverse) => &S4_INV_BYTE,
    }
}

#[inline]
pub(crate) fn apply_bytes(table: &[u8; 256], raw: u128) -> u128 {
    let mut bytes = raw.to_be_bytes();
    for b in bytes.iter_mut() {
        *b = table[*b as usize];
    }
    u128::from_be_bytes(bytes)
}

pub fn apply_layer(kind: SboxLayerKind, state: State128, direction: Direction) -> State128 {
    State128::from_u128(apply_bytes(
        layer_byte_table(kind, direction),
        state.to_u128(),
    ))
}

/// Applies the branch's nonlinear layer (or its inverse).
pub fn apply_sbox_layer(branch: BranchId, state: State128, direction: Direction) -> State128 {
    apply_layer(branch.sbox_layer(), state, direction)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverses_are_inverses() {
        for x in 0..8 {
            assert_eq!(S3_INV[S3[x] as usize] as usize, x);
        }
        for x in 0..16 {
            assert_eq!(S4_INV[S4[x] as usize] as usize, x);
        }
        for x in 0..32 {
            assert_eq!(S5_INV[S5[x] as usize] as usize, x);
        }
    }

    #[test]
    fn zero_state_images() {
        let z = State128::ZERO;
        assert_eq!(
            apply_sbox_layer(BranchId::Branch3, z, Direction::Forward).to_hex(),
            "11111111111111111111111111111111"
        );
        assert_eq!(
            apply_sbox_layer(BranchId::Branch1, z, Direction::Forward),
            z
        );
    }

    #[test]
    fn s3_sits_on_the_top_three_bits_of_each_byte() {
        let mut x = State128::ZERO;
        x.set_bit(2, true);
        let y = apply_sbox_layer(BranchId::Branch1, x, Direction::Forward);
        assert_eq!(y.byte(0) >> 5, S3[1]);
        assert_eq!(y.byte(0) & 31, 0);
    }
}
