//! Checks that the assembled convection operator is skew on random density
//! and velocity fields with vanishing boundary trace.

use std::sync::Arc;

use imexflow::assembly::{Assembler, Field};
use imexflow::mesh::{Degree, FunctionSpace, Mesh, Rect};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> imexflow::Result<()> {
    let mesh = Arc::new(Mesh::new(Rect::unit_square(), 8, 8)?);
    let q2 = FunctionSpace::new(mesh.clone(), Degree::Q2);
    let q1 = FunctionSpace::new(mesh.clone(), Degree::Q1);
    let asm = Assembler::with_default_rule(mesh);
    let boundary = q2.boundary_dofs(&imexflow::mesh::Side::ALL);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let rho = Field::from_values(&q1, (0..q1.num_dofs()).map(|_| rng.gen_range(0.5..2.0)).collect())?;
        let mut wind = || -> imexflow::Result<Field> {
            let vals = (0..q2.num_dofs())
                .map(|d| if boundary.contains(&d) { 0.0 } else { rng.gen_range(-1.0..1.0) })
                .collect();
            Field::from_values(&q2, vals)
        };
        let w = [wind()?, wind()?];
        let c = asm.convection(&q2, &rho, &w)?;
        let x: Vec<f64> = (0..q2.num_dofs()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm2: f64 = x.iter().map(|v| v * v).sum();
        worst = worst.max(2.0 * c.bilinear(&x, &x).abs() / norm2);
    }
    println!("max |x^T (C + C^T) x| / |x|^2 over 20 samples: {worst:.3e}");
    Ok(())
}
