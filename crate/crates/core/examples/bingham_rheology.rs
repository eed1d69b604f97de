//! Regularised Bingham viscosity over six decades of strain rate, with the
//! droplet parameters.

use imexflow::rheology::Bingham;

fn main() -> imexflow::Result<()> {
    let law = Bingham::new(1e-3, 1.0, 50.0, 100.0)?;
    println!("zero-shear viscosity {:.6}", law.zero_shear());
    println!("{:>12} {:>14}", "strain rate", "viscosity");
    for k in -8..=12 {
        let g = 10f64.powf(k as f64 / 2.0);
        println!("{g:>12.3e} {:>14.6e}", law.eval(g));
    }
    Ok(())
}
