#![no_main]

use gleeok_milp::{parse_solutions, write_solutions};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(set) = parse_solutions(text) {
        assert_eq!(
            parse_solutions(&write_solutions(&set)).expect("written solutions read back"),
            set
        );
    }
});
