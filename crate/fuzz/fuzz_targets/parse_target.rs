#![no_main]

use latgauss::lattice::parse_target;
use libfuzzer_sys::fuzz_target;

// First byte picks the expected dimension, the rest is the text.
fuzz_target!(|data: &[u8]| {
    let Some((&n, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let n = (n % 9) as usize;
    if let Ok(t) = parse_target(text, n) {
        assert_eq!(t.len(), n);
    }
});
