use std::fs;
use std::path::Path;

use latgauss::lattice::{format_basis_file, parse_basis_file, parse_target, Basis};
use latgauss::rational::{format_q, parse_q, q_frac};
use proptest::prelude::*;

fn corpus(target: &str) -> Vec<Vec<u8>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<Vec<u8>> = fs::read_dir(dir).unwrap().map(|e| fs::read(e.unwrap().path()).unwrap()).collect();
    out.sort();
    out
}

// The same checks the fuzz targets make, replayed over their seed corpora.
#[test]
fn fuzz_corpus_replays_cleanly() {
    let mut parsed = 0;
    for data in corpus("parse_basis_file") {
        if let Ok(f) = parse_basis_file(std::str::from_utf8(&data).unwrap()) {
            let back = parse_basis_file(&format_basis_file(&f.basis, f.target.as_deref())).unwrap();
            assert_eq!(back.basis.rows(), f.basis.rows());
            assert_eq!(back.target, f.target);
            parsed += 1;
        }
    }
    assert!(parsed >= 3);
    for data in corpus("parse_q") {
        if let Ok(q) = parse_q(std::str::from_utf8(&data).unwrap()) {
            assert_eq!(parse_q(&format_q(&q)), Ok(q));
        }
    }
    for data in corpus("parse_target") {
        let n = (data[0] % 9) as usize;
        if let Ok(t) = parse_target(std::str::from_utf8(&data[1..]).unwrap(), n) {
            assert_eq!(t.len(), n);
        }
    }
}

#[test]
fn parser_rejections() {
    assert!(parse_q("1/0").is_err());
    assert!(parse_q("").is_err());
    assert!(parse_q("--1").is_err());
    assert_eq!(parse_q("-0.25e1"), Ok(q_frac(-5, 2)));
    assert!(parse_basis_file("2\n1 2\n2 4\n").is_err());
    assert!(parse_basis_file("2\n1 0\n0 1\nt: 1 2\nextra\n").is_err());
    assert!(parse_target("1 2 3", 2).is_err());
}

proptest! {
    #[test]
    fn q_round_trip(p in any::<i64>(), q in 1i64..=i64::MAX) {
        let x = q_frac(p, q);
        prop_assert_eq!(parse_q(&format_q(&x)), Ok(x));
    }

    #[test]
    fn basis_file_round_trip(rows in prop::collection::vec(prop::collection::vec(-1000i64..1000, 3), 3), t in prop::collection::vec((-99i64..99, 1i64..50), 3)) {
        let Ok(b) = Basis::from_integers(&rows) else { return Ok(()) };
        let t: Vec<_> = t.into_iter().map(|(p, q)| q_frac(p, q)).collect();
        let f = parse_basis_file(&format_basis_file(&b, Some(&t))).unwrap();
        prop_assert_eq!(f.basis.rows(), b.rows());
        prop_assert_eq!(f.target, Some(t));
    }

    #[test]
    fn arbitrary_text_never_panics(s in "\\PC{0,80}") {
        let _ = parse_basis_file(&s);
        let _ = parse_q(&s);
        let _ = parse_target(&s, 3);
    }
}
