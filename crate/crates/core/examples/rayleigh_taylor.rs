//! Rayleigh–Taylor instability at desk scale, writing snapshots, the energy
//! history and the right-wall interface height to `out/rayleigh-taylor`.
//!
//! Extra `key=value` arguments override the configuration, for example
//!
//! ```text
//! cargo run --release --example rayleigh_taylor -- t_end=0.5 snapshot_every=50
//! ```

use imexflow::cases::CaseKind;
use imexflow::diagnostics::monotone_from;
use imexflow::io::{execute, RunConfig};

fn main() -> imexflow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let mut pairs = vec![("case".to_string(), CaseKind::RayleighTaylor.to_string())];
    for arg in std::env::args().skip(1) {
        let (k, v) = arg.split_once('=').expect("arguments are key=value");
        pairs.push((k.to_string(), v.to_string()));
    }
    let cfg = RunConfig::from_pairs(&pairs)?;
    let start = std::time::Instant::now();
    let summary = execute(&cfg)?;
    let heights: Vec<f64> = summary.bubble.iter().map(|(_, h)| h.height).collect();
    let last = summary.reports.last().expect("initial report");
    println!("{}", summary.verdict);
    println!("density range [{:.4}, {:.4}]", last.rho_min, last.rho_max);
    println!(
        "bubble height {:.4} -> {:.4}, monotone from step {:?}",
        heights[0],
        heights[heights.len() - 1],
        monotone_from(&heights, 0.0)
    );
    println!("elapsed {:.1?}", start.elapsed());
    Ok(())
}
