#![no_main]

use gleeok_cipher::{BitOrder, MasterKey, State128};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    for order in [BitOrder::MsbFirst, BitOrder::LsbFirst] {
        if let Ok(state) = State128::from_hex_with(text, order) {
            assert_eq!(
                State128::from_hex_with(&state.to_hex_with(order), order).unwrap(),
                state
            );
        }
    }
    let _ = MasterKey::from_hex(text);
});
