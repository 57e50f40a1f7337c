#![no_main]

use latgauss::rational::{format_q, parse_q};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(q) = parse_q(text) {
        assert_eq!(parse_q(&format_q(&q)).as_ref(), Ok(&q));
    }
});
