//! Heavy Bingham droplet settling onto a layer of the same fluid, with the
//! fractional-step scheme. Output goes to `out/droplet`; extra `key=value`
//! arguments override the configuration.
//!
//! ```text
//! cargo run --release --example viscoplastic_droplet -- t_end=0.1 droplet.sigma0=0.5
//! ```

use imexflow::cases::CaseKind;
use imexflow::io::{execute, RunConfig};

fn main() -> imexflow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let mut pairs = vec![("case".to_string(), CaseKind::Droplet.to_string())];
    for arg in std::env::args().skip(1) {
        let (k, v) = arg.split_once('=').expect("arguments are key=value");
        pairs.push((k.to_string(), v.to_string()));
    }
    let cfg = RunConfig::from_pairs(&pairs)?;
    let start = std::time::Instant::now();
    let summary = execute(&cfg)?;
    let fold = |f: fn(&imexflow::stepper::EnergyReport) -> f64, init: f64, pick: fn(f64, f64) -> f64| {
        summary.reports.iter().map(f).fold(init, pick)
    };
    println!("{}", summary.verdict);
    println!(
        "viscosity range [{:.4e}, {:.4e}], density range [{:.4}, {:.4}]",
        fold(|r| r.nu_min, f64::INFINITY, f64::min),
        fold(|r| r.nu_max, 0.0, f64::max),
        fold(|r| r.rho_min, f64::INFINITY, f64::min),
        fold(|r| r.rho_max, 0.0, f64::max),
    );
    println!("elapsed {:.1?}", start.elapsed());
    Ok(())
}
