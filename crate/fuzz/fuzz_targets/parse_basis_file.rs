#![no_main]

use latgauss::lattice::{format_basis_file, parse_basis_file};
use libfuzzer_sys::fuzz_target;

// Whatever parses must survive a format/parse round trip unchanged.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(file) = parse_basis_file(text) {
        let again = format_basis_file(&file.basis, file.target.as_deref());
        let back = parse_basis_file(&again).expect("formatted file parses");
        assert_eq!(back.basis.rows(), file.basis.rows());
        assert_eq!(back.target, file.target);
    }
});
