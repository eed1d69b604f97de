//! Free decay of a random field in a closed box, for a sweep of step sizes.
//! Prints one stability verdict per scheme and step size.

use imexflow::cases::DecayConfig;
use imexflow::linsolve::SolverSettings;
use imexflow::stepper::Scheme;

fn main() -> imexflow::Result<()> {
    env_logger::init();
    let cfg = DecayConfig::default();
    let solver = SolverSettings::default().with_rel_tol(1e-12);
    for scheme in [Scheme::Bdf1, Scheme::Fs1, Scheme::Bdf2] {
        for tau in [1e-3, 1e-1, 1.0, 10.0] {
            println!("{}", cfg.verify(scheme, tau, 20, 1e-8, solver)?);
        }
    }
    Ok(())
}
