//! Solve random instances with the sampler-based solver and compare each
//! answer with plain enumeration.
//!
//!     cargo run --release -p latgauss-harness --example cvp_vs_enum -- 5 20

use std::time::Instant;

use latgauss::cvp::{exact_cvp, CvpConfig};
use latgauss::lattice::cvp_enum;
use latgauss::rng::rng_from_seed;
use latgauss_harness::{gen_instance, TargetMode};

fn main() -> latgauss::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("usage: cvp_vs_enum N TRIALS"));
    let n = args.next().unwrap_or(4);
    let trials = args.next().unwrap_or(10);
    let cfg = CvpConfig::default();
    let t0 = Instant::now();
    let mut misses = 0;
    for i in 0..trials {
        let mode = TargetMode::mixed(i);
        let inst = gen_instance(n, 10, 1000 + i as u64, mode)?;
        let mut rng = rng_from_seed(i as u64);
        let ti = Instant::now();
        let got = exact_cvp(&inst.basis, &inst.target, &cfg, &mut rng)?;
        let want = cvp_enum(&inst.basis, &inst.target)?;
        let ok = got.dist_sq == want.dist_sq;
        misses += usize::from(!ok);
        println!("{} {:<12} {:>7.3}s {}", inst.hash(), mode.name(), ti.elapsed().as_secs_f64(), if ok { "ok" } else { "MISS" });
    }
    println!("n={n} trials={trials} misses={misses} total={:.2}s", t0.elapsed().as_secs_f64());
    Ok(())
}
