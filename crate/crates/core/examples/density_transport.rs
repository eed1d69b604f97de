//! A sharp density blob carried once around a closed vortex, with plain
//! Galerkin and least-squares transport. Reports mass drift and the
//! over/undershoots each produces.

use std::sync::Arc;

use imexflow::assembly::{vector_interpolate, Assembler, Field};
use imexflow::mesh::{Degree, FunctionSpace, Mesh, Rect};
use imexflow::stepper::{density_step_bdf1, DensityOptions, DensityTransport};

fn main() -> imexflow::Result<()> {
    let n = 32;
    let steps = 200;
    let tau = 1.0 / steps as f64;
    let mesh = Arc::new(Mesh::new(Rect::unit_square(), n, n)?);
    let q1 = FunctionSpace::new(mesh.clone(), Degree::Q1);
    let q2 = FunctionSpace::new(mesh.clone(), Degree::Q2);
    let asm = Assembler::with_default_rule(mesh);
    let pi = std::f64::consts::PI;
    // curl of sin²(πx) sin²(πy), zero on the walls
    let wind = vector_interpolate(&q2, |x, y| {
        let (sx, sy) = ((pi * x).sin(), (pi * y).sin());
        let (s2x, s2y) = ((2.0 * pi * x).sin(), (2.0 * pi * y).sin());
        [pi * sx * sx * s2y, -pi * s2x * sy * sy]
    });
    let blob = |x: f64, y: f64| {
        let r = ((x - 0.5).powi(2) + (y - 0.3).powi(2)).sqrt();
        2.0 - (50.0 * (r - 0.12)).tanh()
    };
    let rho0 = Field::interpolate(&q1, blob);
    let ones = vec![1.0; q1.num_dofs()];
    let mass_matrix = asm.mass(&q1, 1.0)?;
    let mass = |f: &Field| mass_matrix.bilinear(&ones, f.values());
    for transport in [DensityTransport::Galerkin, DensityTransport::LeastSquares] {
        let opts = DensityOptions {
            transport,
            ..DensityOptions::default()
        };
        let mut rho = rho0.clone();
        for _ in 0..steps {
            rho = density_step_bdf1(&asm, &rho, &wind, tau, &opts)?.0;
        }
        println!(
            "{transport:?}: range [{:.4}, {:.4}] (initial [{:.4}, {:.4}]), relative mass drift {:.2e}",
            rho.min(),
            rho.max(),
            rho0.min(),
            rho0.max(),
            (mass(&rho) - mass(&rho0)) / mass(&rho0)
        );
    }
    Ok(())
}
