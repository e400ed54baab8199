#![no_main]

use gleeok_milp::{read_lp, write_lp};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(program) = read_lp(text) {
        let again = read_lp(&write_lp(&program)).expect("written LP reads back");
        assert_eq!(write_lp(&again), write_lp(&program));
    }
});
