use std::collections::HashSet;

use gleeok_sbox::SboxSpec;

use crate::error::AttackError;

/// Eight Sbox inputs whose images are exactly the outputs with bit `index`
/// (0 = most significant) equal to zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GadgetSet {
    pub index: usize,
    pub inputs: [u8; 8],
}

impl GadgetSet {
    /// Integral pattern of the images, e.g. `caaa` for index 0.
    pub fn pattern(&self) -> String {
        (0..4)
            .map(|b| if b == self.index { 'c' } else { 'a' })
            .collect()
    }

    pub fn shifted(&self, delta: u8) -> [u8; 8] {
        self.inputs.map(|x| x ^ delta)
    }
}

fn check_sbox(sbox: &SboxSpec) -> Result<(), AttackError> {
    if sbox.width() != 4 || !sbox.is_bijective() {
        return Err(AttackError::UnsuitableSbox);
    }
    Ok(())
}

/// `S^-1({v : bit_index(v) = 0})`, listed by ascending image.
pub fn gadget_set(sbox: &SboxSpec, index: usize) -> Result<GadgetSet, AttackError> {
    check_sbox(sbox)?;
    if index > 3 {
        return Err(AttackError::GadgetIndex(index));
    }
    let inv = sbox.inverse()?;
    let mut inputs = [0u8; 8];
    let images = (0..16usize).filter(|v| (v >> (3 - index)) & 1 == 0);
    for (slot, v) in inputs.iter_mut().zip(images) {
        *slot = inv.apply(v) as u8;
    }
    Ok(GadgetSet { index, inputs })
}

pub fn gadget_sets(sbox: &SboxSpec) -> Result<[GadgetSet; 4], AttackError> {
    Ok([
        gadget_set(sbox, 0)?,
        gadget_set(sbox, 1)?,
        gadget_set(sbox, 2)?,
        gadget_set(sbox, 3)?,
    ])
}

fn images(sbox: &SboxSpec, gadget: &GadgetSet, delta: u8) -> Vec<usize> {
    gadget
        .shifted(delta)
        .iter()
        .map(|&x| sbox.apply(x as usize))
        .collect()
}

/// Differences `delta` for which the shifted images keep the gadget's
/// `c`/`a` pattern: bit `index` takes one value on all eight images and the
/// other three bits run through all eight combinations.
pub fn survival_analysis(sbox: &SboxSpec, gadget: &GadgetSet) -> Result<Vec<u8>, AttackError> {
    check_sbox(sbox)?;
    let bit = 1usize << (3 - gadget.index);
    Ok((0..16u8)
        .filter(|&delta| {
            let img = images(sbox, gadget, delta);
            // The eight images are distinct; with the constant bit fixed they
            // fill one half of the space exactly.
            let fixed = img[0] & bit;
            img.iter().all(|&v| v & bit == fixed)
        })
        .collect())
}

/// Independent evaluation of the same criterion, bit by bit.
pub fn brute_force_survival(sbox: &SboxSpec, gadget: &GadgetSet) -> Vec<u8> {
    let mut out = Vec::new();
    for delta in 0..16u8 {
        let values: Vec<usize> = gadget
            .inputs
            .iter()
            .map(|&x| sbox.apply((x ^ delta) as usize))
            .collect();
        let bit_of = |v: usize, b: usize| (v >> (3 - b)) & 1;
        let constant = values
            .iter()
            .all(|&v| bit_of(v, gadget.index) == bit_of(values[0], gadget.index));
        let rest: HashSet<Vec<usize>> = values
            .iter()
            .map(|&v| {
                (0..4)
                    .filter(|&b| b != gadget.index)
                    .map(|b| bit_of(v, b))
                    .collect()
            })
            .collect();
        if constant && rest.len() == 8 {
            out.push(delta);
        }
    }
    out
}

/// Differences whose shifted images XOR to zero on all four bits. These are
/// the wrong-key differences a balance test cannot reject when the rest of
/// the structure leaves one degree of freedom.
pub fn balance_survivors(sbox: &SboxSpec, gadget: &GadgetSet) -> Result<Vec<u8>, AttackError> {
    check_sbox(sbox)?;
    Ok((0..16u8)
        .filter(|&d| images(sbox, gadget, d).iter().fold(0, |a, &v| a ^ v) == 0)
        .collect())
}

#[cfg(test)]
mod tests {
    use gleeok_sbox::SboxName;

    use super::*;

    #[test]
    fn first_gadget_set() {
        let g = gadget_set(&SboxName::S4.spec(), 0).unwrap();
        assert_eq!(g.inputs, [0x1, 0x0, 0x2, 0x4, 0x3, 0xf, 0x6, 0xe]);
        assert_eq!(g.pattern(), "caaa");
    }

    #[test]
    fn rejects_unsuitable_sboxes() {
        assert_eq!(
            gadget_sets(&SboxName::S3.spec()),
            Err(AttackError::UnsuitableSbox)
        );
        assert_eq!(
            gadget_set(&SboxName::S4.spec(), 4),
            Err(AttackError::GadgetIndex(4))
        );
        let flat = SboxSpec::from_table(4, vec![0; 16]);
        assert!(flat.is_err() || gadget_sets(&flat.unwrap()).is_err());
    }
}
