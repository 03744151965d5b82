#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(s) = pdvg::scenario::parse_scenario(text) {
            // Anything accepted must survive a write/read cycle.
            let again = pdvg::scenario::parse_scenario(&s.to_toml())
                .expect("re-parse of serialized scenario");
            assert_eq!(again, s);
        }
    }
});
