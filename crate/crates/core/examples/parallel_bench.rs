//! Time extraction of one multiplier across thread counts.

use std::time::Instant;

use gfre::extract::{extract_all, ExtractOptions};
use gfre::specgen::{generate_mastrovito, lookup};

pub fn run_example() -> Result<bool, Box<dyn std::error::Error>> {
    let m = std::env::var("GFRE_BENCH_M")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(32);
    let p = lookup(m, None).ok_or("degree not in the catalog")?;
    let g = generate_mastrovito(&p);
    println!("m = {m}, {} gates", g.netlist.gates().len());
    let mut baseline = None;
    let mut identical = true;
    for t in [1, 2, 4, 8] {
        let start = Instant::now();
        let r = extract_all(&g.netlist, &ExtractOptions::with_threads(t))?;
        println!(
            "T = {t}: {:.1} ms, peak {} terms",
            start.elapsed().as_secs_f64() * 1e3,
            r.peak_terms()
        );
        match &baseline {
            None => baseline = Some(r),
            Some(b) => identical &= b.same_polynomials(&r),
        }
    }
    println!("identical across T: {identical}");
    Ok(identical)
}

#[allow(dead_code)]
fn main() {
    run_example().expect("bench");
}
