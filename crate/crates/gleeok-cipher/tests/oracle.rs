//! A second, deliberately naive implementation written straight from the
//! cipher description, with its own π generator.

use gleeok_cipher::*;
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Bits = Vec<u8>;

const ORACLE_S3: [usize; 8] = [0, 5, 3, 2, 6, 1, 4, 7];
const ORACLE_S4: [usize; 16] = [1, 0, 2, 4, 3, 8, 6, 13, 9, 10, 11, 14, 15, 12, 7, 5];
const ORACLE_S5: [usize; 32] = [
    0, 5, 10, 11, 20, 17, 22, 23, 9, 12, 3, 2, 13, 8, 15, 14, 18, 21, 24, 27, 6, 1, 4, 7, 26, 29,
    16, 19, 30, 25, 28, 31,
];

/// Machin: π = 16·atan(1/5) − 4·atan(1/239), in fixed point with guard bits.
fn pi_fraction_bits(count: usize) -> Bits {
    let precision = count + 64;
    let one = BigUint::from(1u8) << precision;
    let arctan_inv = |x: u32| -> (BigUint, BigUint) {
        // returns (positive terms, negative terms)
        let x2 = BigUint::from(x) * BigUint::from(x);
        let mut term = &one / BigUint::from(x);
        let (mut pos, mut neg) = (BigUint::from(0u8), BigUint::from(0u8));
        let mut k = 1u32;
        let mut plus = true;
        while term > BigUint::from(0u8) {
            let t = &term / BigUint::from(k);
            if plus {
                pos += t;
            } else {
                neg += t;
            }
            term /= &x2;
            k += 2;
            plus = !plus;
        }
        (pos, neg)
    };
    let (p5, n5) = arctan_inv(5);
    let (p239, n239) = arctan_inv(239);
    let pi = (p5 * 16u32 + n239 * 4u32) - (n5 * 16u32 + p239 * 4u32);
    let frac: BigUint = (pi - (&one * 3u32)) >> 64usize;
    (0..count)
        .map(|i| u8::from(frac.bit((count - 1 - i) as u64)))
        .collect()
}

fn to_bits(s: State128) -> Bits {
    (0..128).map(|i| s.bit(i) as u8).collect()
}

fn from_bits(b: &[u8]) -> State128 {
    let mut s = State128::ZERO;
    for (i, &v) in b.iter().enumerate() {
        s.set_bit(i, v == 1);
    }
    s
}

fn read(bits: &[u8], start: usize, width: usize) -> usize {
    (0..width).fold(0, |acc, i| (acc << 1) | bits[start + i] as usize)
}

fn write(bits: &mut [u8], start: usize, width: usize, value: usize) {
    for i in 0..width {
        bits[start + i] = ((value >> (width - 1 - i)) & 1) as u8;
    }
}

struct Oracle {
    branch: usize,
    rounds: usize,
    round_keys: Vec<Bits>,
    constants: Vec<Bits>,
}

impl Oracle {
    fn new(key: &[u8], branch: usize, rounds: usize, pi_bits: &[u8]) -> Oracle {
        let (mut k0, mut k1): (Bits, Bits) = match branch {
            1 => (key[..128].to_vec(), key[128..].to_vec()),
            2 => (key[128..].to_vec(), key[..128].to_vec()),
            _ => (key[64..192].to_vec(), [&key[192..], &key[..64]].concat()),
        };
        let pk = [29, 51, 107][branch - 1];
        let mut round_keys = Vec::new();
        for r in 0..=rounds {
            let live = if r % 2 == 0 { &mut k0 } else { &mut k1 };
            let old = live.clone();
            for j in 0..128 {
                live[j] = old[(pk * j) % 128];
            }
            round_keys.push(live.clone());
        }
        let constants = (0..rounds)
            .map(|r| {
                let off = r * 128 + branch * 12 * 128;
                pi_bits[off..off + 128].to_vec()
            })
            .collect();
        Oracle {
            branch,
            rounds,
            round_keys,
            constants,
        }
    }

    fn sbox(&self, x: &mut Bits) {
        if self.branch == 3 {
            for n in 0..32 {
                let v = read(x, 4 * n, 4);
                write(x, 4 * n, 4, ORACLE_S4[v]);
            }
        } else {
            for byte in 0..16 {
                let a = read(x, 8 * byte, 3);
                write(x, 8 * byte, 3, ORACLE_S3[a]);
                let b = read(x, 8 * byte + 3, 5);
                write(x, 8 * byte + 3, 5, ORACLE_S5[b]);
            }
        }
    }

    fn encrypt(&self, pt: &[u8]) -> Bits {
        let (t, p) = match self.branch {
            1 => ([12, 31, 86], 117),
            2 => ([4, 23, 78], 117),
            _ => ([7, 15, 23], 11),
        };
        let mut x: Bits = pt
            .iter()
            .zip(&self.round_keys[0])
            .map(|(a, b)| a ^ b)
            .collect();
        for r in 1..=self.rounds {
            self.sbox(&mut x);
            let th: Bits = (0..128)
                .map(|i| x[(i + t[0]) % 128] ^ x[(i + t[1]) % 128] ^ x[(i + t[2]) % 128])
                .collect();
            let pe: Bits = (0..128).map(|i| th[(i * p) % 128]).collect();
            x = (0..128)
                .map(|i| pe[i] ^ self.round_keys[r][i] ^ self.constants[r - 1][i])
                .collect();
        }
        x
    }
}

fn random_key(rng: &mut ChaCha8Rng) -> MasterKey {
    MasterKey::from_halves(
        State128::from_u128(rng.gen()),
        State128::from_u128(rng.gen()),
    )
}

#[test]
fn embedded_pi_expansion_matches_machin() {
    let n = embedded_bits();
    let bits = pi_fraction_bits(n);
    for start in (0..n - 128).step_by(128) {
        assert_eq!(
            pi_window(start).unwrap(),
            from_bits(&bits[start..start + 128]),
            "window at {start}"
        );
    }
}

#[test]
fn first_constant_window_is_published_pi() {
    let bits = pi_fraction_bits(128);
    assert_eq!(
        from_bits(&bits).to_hex(),
        "243f6a8885a308d313198a2e03707344"
    );
}

#[test]
fn twelve_round_branches_agree_with_oracle() {
    let pi_bits = pi_fraction_bits(128 * 48);
    let mut rng = ChaCha8Rng::seed_from_u64(0x01d_c0de);
    for case in 0..100 {
        let key = random_key(&mut rng);
        let pt = State128::from_u128(rng.gen());
        let mut key_bits = to_bits(key.halves()[0]);
        key_bits.extend(to_bits(key.halves()[1]));
        let mut prf_oracle = vec![0u8; 128];
        for branch in BranchId::ALL {
            let oracle = Oracle::new(&key_bits, branch.number(), 12, &pi_bits);
            let expect = oracle.encrypt(&to_bits(pt));
            let fast = BranchCipher::new(branch, &key, 12).unwrap().encrypt(pt);
            assert_eq!(fast, from_bits(&expect), "case {case} {branch}");
            let spanned = encrypt_branch(branch, &key, pt, RoundSpan::full(12)).unwrap();
            assert_eq!(spanned, fast);
            for (acc, b) in prf_oracle.iter_mut().zip(&expect) {
                *acc ^= b;
            }
        }
        assert_eq!(
            encrypt_prf(&key, pt, 12).unwrap(),
            from_bits(&prf_oracle),
            "case {case} prf"
        );
    }
}

#[test]
fn round_keys_agree_with_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let key = random_key(&mut rng);
    let mut key_bits = to_bits(key.halves()[0]);
    key_bits.extend(to_bits(key.halves()[1]));
    for branch in BranchId::ALL {
        let oracle = Oracle::new(&key_bits, branch.number(), 12, &vec![0; 128 * 48]);
        let schedule = derive_round_keys(&key, branch, 12);
        for (r, rk) in schedule.keys().iter().enumerate() {
            assert_eq!(*rk, from_bits(&oracle.round_keys[r]), "{branch} RK_{r}");
        }
    }
}
