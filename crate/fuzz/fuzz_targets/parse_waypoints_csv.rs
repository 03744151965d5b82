#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(points) = pdvg::scenario::parse_waypoints_csv(text) {
            let again =
                pdvg::scenario::parse_waypoints_csv(&pdvg::scenario::waypoints_csv(&points))
                    .unwrap();
            assert_eq!(again, points);
        }
    }
});
