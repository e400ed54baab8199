use gleeok_cipher::{
    apply_pi_inverse, apply_theta, Gf2Matrix128, LinearParams, State128, ThetaParams,
};

use crate::error::LinLayerError;

/// Input mask `a` with `a·x = b·θ(x)` for every `x`: bit `j` of `a` is the
/// parity of the output-mask bits `i` with `j = i + t` for some offset `t`.
pub fn theta_transpose(params: ThetaParams, mask: State128) -> State128 {
    let raw = mask.to_u128();
    let [t0, t1, t2] = params.offsets();
    State128::from_u128(
        raw.rotate_right(t0 as u32) ^ raw.rotate_right(t1 as u32) ^ raw.rotate_right(t2 as u32),
    )
}

/// Mask through `π ∘ θ` backwards: the input mask matching output mask `b`.
pub fn linear_transpose(params: LinearParams, mask: State128) -> State128 {
    theta_transpose(params.theta, apply_pi_inverse(params.pi, mask))
}

/// The flawed rule that pushes masks forward through θ as if they were
/// differences (`b = M·a`).
pub fn theta_mask_direct(params: ThetaParams, mask: State128) -> State128 {
    apply_theta(params, mask)
}

/// How a mask is carried backwards through the linear half.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MaskRule {
    /// `a = Mᵀ·b`.
    Transposed,
    /// `a = M⁻¹·b`, the inverse of the flawed forward rule.
    Direct,
}

/// Matrix taking an output mask of the linear half to its input mask.
pub fn pullback_matrix(
    params: LinearParams,
    rule: MaskRule,
) -> Result<Gf2Matrix128, LinLayerError> {
    match rule {
        MaskRule::Transposed => Ok(Gf2Matrix128::from_map(|b| linear_transpose(params, b))),
        MaskRule::Direct => {
            let theta_inv = Gf2Matrix128::theta(params.theta)
                .inverse()
                .ok_or(LinLayerError::Singular(params.theta.offsets()))?;
            Ok(Gf2Matrix128::from_map(|b| {
                theta_inv.apply(apply_pi_inverse(params.pi, b))
            }))
        }
    }
}

/// `(a, θ(a))` pairs that the flawed rule would accept but for which
/// `a·x = θ(a)·θ(x)` fails for some `x` in `probes`.
pub fn direct_rule_violations(
    params: ThetaParams,
    masks: impl IntoIterator<Item = State128>,
    probes: &[State128],
) -> Vec<(State128, State128)> {
    masks
        .into_iter()
        .filter_map(|a| {
            let b = theta_mask_direct(params, a);
            probes
                .iter()
                .any(|&x| a.dot(x) != b.dot(apply_theta(params, x)))
                .then_some((a, b))
        })
        .collect()
}
