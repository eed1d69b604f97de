//! Refinement study against the manufactured solution.
//!
//! ```text
//! cargo run --release --example mms_convergence -- bdf2 5
//! ```

use imexflow::cases::MmsLadder;
use imexflow::stepper::{Scheme, StepperSettings};

fn main() -> imexflow::Result<()> {
    env_logger::init();
    let mut args = std::env::args().skip(1);
    let scheme: Scheme = args.next().as_deref().unwrap_or("bdf2").parse()?;
    let levels = args.next().map_or(Ok(4), |s| s.parse()).expect("levels must be an integer");
    let ladder = MmsLadder {
        levels,
        ..MmsLadder::default()
    };
    let start = std::time::Instant::now();
    let table = ladder.run(scheme, &StepperSettings::default())?;
    print!("{table}");
    println!("finest-pair rates [u, p, rho]: {:?}", table.rates()?.finest());
    println!("elapsed {:.1?}", start.elapsed());
    Ok(())
}
