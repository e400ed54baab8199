use crate::params::{LinearParams, PiParam, ThetaParams};
use crate::state::State128;

/// `x_i <- x_{i+t0} ^ x_{i+t1} ^ x_{i+t2}` (indices mod 128).
pub fn apply_theta(params: ThetaParams, state: State128) -> State128 {
    let raw = state.to_u128();
    let [t0, t1, t2] = params.offsets();
    State128::from_u128(
        raw.rotate_left(t0 as u32) ^ raw.rotate_left(t1 as u32) ^ raw.rotate_left(t2 as u32),
    )
}

/// `x_i <- x_{i*p mod 128}`.
pub fn apply_pi(param: PiParam, state: State128) -> State128 {
    let mut out = State128::ZERO;
    for i in 0..128 {
        if state.bit(param.source(i)) {
            out.set_bit(i, true);
        }
    }
    out
}

/// Inverse of [`apply_pi`].
pub fn apply_pi_inverse(param: PiParam, state: State128) -> State128 {
    let mut out = State128::ZERO;
    for i in 0..128 {
        if state.bit(i) {
            out.set_bit(param.source(i), true);
        }
    }
    out
}

/// Square GF(2) matrix acting on [`State128`]; row `i` is the mask whose
/// parity with the input gives output bit `i`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Gf2Matrix128 {
    rows: [State128; 128],
}

impl Gf2Matrix128 {
    pub fn identity() -> Self {
        let mut rows = [State128::ZERO; 128];
        for (i, row) in rows.iter_mut().enumerate() {
            *row = State128::unit(i);
        }
        Gf2Matrix128 { rows }
    }

    pub fn from_rows(rows: [State128; 128]) -> Self {
        Gf2Matrix128 { rows }
    }

    /// Builds the matrix of a linear map from its images of the unit vectors.
    pub fn from_map(map: impl Fn(State128) -> State128) -> Self {
        let mut rows = [State128::ZERO; 128];
        for col in 0..128 {
            let image = map(State128::unit(col));
            for row in image.ones() {
                rows[row].set_bit(col, true);
            }
        }
        Gf2Matrix128 { rows }
    }

    pub fn theta(params: ThetaParams) -> Self {
        let [t0, t1, t2] = params.offsets();
        let mut rows = [State128::ZERO; 128];
        for (i, row) in rows.iter_mut().enumerate() {
            *row = State128::unit((i + t0) % 128)
                ^ State128::unit((i + t1) % 128)
                ^ State128::unit((i + t2) % 128);
        }
        Gf2Matrix128 { rows }
    }

    pub fn row(&self, index: usize) -> State128 {
        self.rows[index]
    }

    pub fn rows(&self) -> &[State128; 128] {
        &self.rows
    }

    pub fn column(&self, index: usize) -> State128 {
        let mut out = State128::ZERO;
        for (i, row) in self.rows.iter().enumerate() {
            if row.bit(index) {
                out.set_bit(i, true);
            }
        }
        out
    }

    pub fn apply(&self, x: State128) -> State128 {
        let mut out = State128::ZERO;
        for (i, row) in self.rows.iter().enumerate() {
            if row.dot(x) {
                out.set_bit(i, true);
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut rows = [State128::ZERO; 128];
        for (i, row) in rows.iter_mut().enumerate() {
            *row = self.column(i);
        }
        Gf2Matrix128 { rows }
    }

    /// `self * other` as maps: apply `other` first.
    pub fn compose(&self, other: &Gf2Matrix128) -> Self {
        let t = other.transpose();
        let mut rows = [State128::ZERO; 128];
        for (i, row) in rows.iter_mut().enumerate() {
            for j in 0..128 {
                if self.rows[i].dot(t.rows[j]) {
                    row.set_bit(j, true);
                }
            }
        }
        Gf2Matrix128 { rows }
    }

    pub fn rank(&self) -> usize {
        let mut rows: Vec<u128> = self.rows.iter().map(|r| r.to_u128()).collect();
        let mut rank = 0;
        for bit in (0..128).rev() {
            let pivot = (rank..128).find(|&r| (rows[r] >> bit) & 1 == 1);
            if let Some(p) = pivot {
                rows.swap(rank, p);
                let pv = rows[rank];
                for (r, row) in rows.iter_mut().enumerate() {
                    if r != rank && (*row >> bit) & 1 == 1 {
                        *row ^= pv;
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    pub fn inverse(&self) -> Option<Self> {
        // Gauss-Jordan on [A | I], rows kept as (u128, u128).
        let mut aug: Vec<(u128, u128)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.to_u128(), State128::unit(i).to_u128()))
            .collect();
        for col in 0..128 {
            let bit = 127 - col;
            let pivot = (col..128).find(|&r| (aug[r].0 >> bit) & 1 == 1)?;
            aug.swap(col, pivot);
            let pv = aug[col];
            for (r, row) in aug.iter_mut().enumerate() {
                if r != col && (row.0 >> bit) & 1 == 1 {
                    row.0 ^= pv.0;
                    row.1 ^= pv.1;
                }
            }
        }
        let mut rows = [State128::ZERO; 128];
        for (i, row) in rows.iter_mut().enumerate() {
            *row = State128::from_u128(aug[i].1);
        }
        Some(Gf2Matrix128 { rows })
    }
}

/// Byte-sliced tables for a fixed linear map: `L(x) = XOR_k table[k][byte_k(x)]`.
#[derive(Clone)]
pub struct ByteSlicedMap {
    tables: Box<[[u128; 256]; 16]>,
}

impl ByteSlicedMap {
    pub fn new(map: impl Fn(State128) -> State128) -> Self {
        let mut tables = Box::new([[0u128; 256]; 16]);
        for (k, table) in tables.iter_mut().enumerate() {
            let cols: Vec<u128> = (0..8)
                .map(|bit| map(State128::unit(8 * k + bit)).to_u128())
                .collect();
            for b in 1..256usize {
                let low = b.trailing_zeros() as usize;
                // bit 0 of the byte value is the byte's last state bit
                table[b] = table[b & (b - 1)] ^ cols[7 - low];
            }
        }
        ByteSlicedMap { tables }
    }

    /// Composes a byte-wise substitution in front of the linear map.
    pub fn with_substitution(&self, bytes: &[u8; 256]) -> Self {
        let mut tables = Box::new([[0u128; 256]; 16]);
        for (k, table) in tables.iter_mut().enumerate() {
            for b in 0..256 {
                table[b] = self.tables[k][bytes[b] as usize];
            }
        }
        ByteSlicedMap { tables }
    }

    #[inline(always)]
    pub fn apply_raw(&self, raw: u128) -> u128 {
        let bytes = raw.to_be_bytes();
        let mut acc = 0u128;
        for (k, &b) in bytes.iter().enumerate() {
            acc ^= self.tables[k][b as usize];
        }
        acc
    }

    pub fn apply(&self, x: State128) -> State128 {
        State128::from_u128(self.apply_raw(x.to_u128()))
    }
}

/// `π ∘ θ` for the given parameters.
pub fn apply_linear(params: LinearParams, state: State128) -> State128 {
    apply_pi(params.pi, apply_theta(params.theta, state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::BranchId;

    #[test]
    fn theta_single_bit() {
        let y = apply_theta(BranchId::Branch3.theta(), State128::unit(0));
        assert_eq!(y.ones().collect::<Vec<_>>(), vec![105, 113, 121]);
    }

    #[test]
    fn pi_examples() {
        let p11 = PiParam::new(11).unwrap();
        assert_eq!(apply_pi(p11, State128::unit(11)), State128::unit(1));
        let p117 = PiParam::new(117).unwrap();
        assert_eq!(apply_pi(p117, State128::unit(0)), State128::unit(0));
        assert_eq!(apply_pi(p117, State128::ONES), State128::ONES);
    }

    #[test]
    fn theta_matrices_have_full_rank() {
        for b in BranchId::ALL {
            let m = Gf2Matrix128::theta(b.theta());
            assert_eq!(m.rank(), 128, "{b}");
            let inv = m.inverse().unwrap();
            assert_eq!(inv.compose(&m), Gf2Matrix128::identity());
        }
    }

    #[test]
    fn matrix_matches_map() {
        let params = BranchId::Branch1.theta();
        let m = Gf2Matrix128::theta(params);
        let from_map = Gf2Matrix128::from_map(|x| apply_theta(params, x));
        assert_eq!(m, from_map);
    }

    #[test]
    fn byte_sliced_map_agrees() {
        let params = BranchId::Branch2.linear();
        let fast = ByteSlicedMap::new(|x| apply_linear(params, x));
        let mut x = State128::from_u128(0x0123_4567_89ab_cdef_fedc_ba98_7654_3210);
        for _ in 0..50 {
            assert_eq!(fast.apply(x), apply_linear(params, x));
            x = State128::from_u128(
                x.to_u128()
                    .wrapping_mul(0x9e37_79b9_7f4a_7c15_f39c_c060_5ced_c835)
                    ^ 1,
            );
        }
    }
}
