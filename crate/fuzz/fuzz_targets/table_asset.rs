#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    let _ = gleeok_sbox::asset::parse_table(text);
});
