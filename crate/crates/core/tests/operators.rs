//! Element matrices on a single anisotropic cell against tensor products of
//! exactly integrated one-dimensional matrices.

use std::sync::Arc;

use approx::assert_relative_eq;
use imexflow::assembly::{vector_interpolate, Assembler, CsrMatrix, Field};
use imexflow::mesh::{Degree, FunctionSpace, Mesh, Rect};

const HX: f64 = 0.5;
const HY: f64 = 0.25;

// 1-D Lagrange bases on [0, 1]: quadratic nodes (0, 1, ½), linear nodes (0, 1)
const M2: [[f64; 3]; 3] = [[2. / 15., -1. / 30., 1. / 15.], [-1. / 30., 2. / 15., 1. / 15.], [1. / 15., 1. / 15., 8. / 15.]];
const K2: [[f64; 3]; 3] = [[7. / 3., 1. / 3., -8. / 3.], [1. / 3., 7. / 3., -8. / 3.], [-8. / 3., -8. / 3., 16. / 3.]];
// ∫ φ_a φ_b'
const D2: [[f64; 3]; 3] = [[-0.5, -1. / 6., 2. / 3.], [1. / 6., 0.5, -2. / 3.], [-2. / 3., 2. / 3., 0.0]];
// ∫ ψ_a φ_b and ∫ ψ_a φ_b'
const PM: [[f64; 3]; 2] = [[1. / 6., 0.0, 1. / 3.], [0.0, 1. / 6., 1. / 3.]];
const PD: [[f64; 3]; 2] = [[-5. / 6., 1. / 6., 2. / 3.], [-1. / 6., 5. / 6., -2. / 3.]];
const M1: [[f64; 2]; 2] = [[1. / 3., 1. / 6.], [1. / 6., 1. / 3.]];
const K1: [[f64; 2]; 2] = [[1.0, -1.0], [-1.0, 1.0]];

// local dof -> 1-D node indices: corners CCW, edges bottom/right/top/left, centre
const Q2_NODES: [(usize, usize); 9] = [(0, 0), (1, 0), (1, 1), (0, 1), (2, 0), (1, 2), (2, 1), (0, 2), (2, 2)];
const Q1_NODES: [(usize, usize); 4] = [(0, 0), (1, 0), (1, 1), (0, 1)];

struct Cell {
    q1: Arc<FunctionSpace>,
    q2: Arc<FunctionSpace>,
    asm: Assembler,
}

fn cell() -> Cell {
    let mesh = Arc::new(Mesh::new(Rect::new(1.0, 1.0 + HX, -1.0, -1.0 + HY).unwrap(), 1, 1).unwrap());
    Cell {
        q1: FunctionSpace::new(mesh.clone(), Degree::Q1),
        q2: FunctionSpace::new(mesh.clone(), Degree::Q2),
        asm: Assembler::with_default_rule(mesh),
    }
}

fn check(m: &CsrMatrix, rows: &[usize], cols: &[usize], expected: impl Fn(usize, usize) -> f64) {
    for (a, &i) in rows.iter().enumerate() {
        for (b, &j) in cols.iter().enumerate() {
            assert_relative_eq!(m.get(i, j), expected(a, b), epsilon = 1e-14, max_relative = 1e-12);
        }
    }
}

#[test]
fn q2_mass_is_a_tensor_product() {
    let c = cell();
    let m = c.asm.mass(&c.q2, 1.0).unwrap();
    let d = c.q2.cell_dofs(0);
    check(&m, d, d, |a, b| {
        let ((ia, ja), (ib, jb)) = (Q2_NODES[a], Q2_NODES[b]);
        HX * M2[ia][ib] * HY * M2[ja][jb]
    });
}

#[test]
fn scaled_mass_scales() {
    let c = cell();
    let m1 = c.asm.mass(&c.q2, 1.0).unwrap();
    let m3 = c.asm.mass(&c.q2, 3.5).unwrap();
    for (a, b) in m1.values().iter().zip(m3.values()) {
        assert_relative_eq!(3.5 * a, *b, max_relative = 1e-14);
    }
}

#[test]
fn q2_stiffness_is_a_tensor_product() {
    let c = cell();
    let k = c.asm.diffusion(&c.q2, 2.0).unwrap();
    let d = c.q2.cell_dofs(0);
    check(&k, d, d, |a, b| {
        let ((ia, ja), (ib, jb)) = (Q2_NODES[a], Q2_NODES[b]);
        2.0 * (K2[ia][ib] / HX * HY * M2[ja][jb] + HX * M2[ia][ib] * K2[ja][jb] / HY)
    });
}

#[test]
fn q1_mass_and_stiffness() {
    let c = cell();
    let m = c.asm.mass(&c.q1, 1.0).unwrap();
    let k = c.asm.diffusion(&c.q1, 1.0).unwrap();
    let d = c.q1.cell_dofs(0);
    check(&m, d, d, |a, b| {
        let ((ia, ja), (ib, jb)) = (Q1_NODES[a], Q1_NODES[b]);
        HX * M1[ia][ib] * HY * M1[ja][jb]
    });
    check(&k, d, d, |a, b| {
        let ((ia, ja), (ib, jb)) = (Q1_NODES[a], Q1_NODES[b]);
        K1[ia][ib] / HX * HY * M1[ja][jb] + HX * M1[ia][ib] * K1[ja][jb] / HY
    });
}

#[test]
fn convection_by_a_uniform_wind() {
    let c = cell();
    let rho = Field::constant(&c.q1, 1.0);
    let d = c.q2.cell_dofs(0);
    for (wind, scale) in [([1.0, 0.0], [1.0, 0.0]), ([0.0, -2.0], [0.0, -2.0])] {
        let w = vector_interpolate(&c.q2, |_, _| wind);
        let m = c.asm.convection(&c.q2, &rho, &w).unwrap();
        check(&m, d, d, |a, b| {
            let ((ia, ja), (ib, jb)) = (Q2_NODES[a], Q2_NODES[b]);
            scale[0] * D2[ia][ib] * HY * M2[ja][jb] + scale[1] * HX * M2[ia][ib] * D2[ja][jb]
        });
    }
}

#[test]
fn divergence_is_minus_the_weak_divergence() {
    let c = cell();
    let b = c.asm.divergence(&c.q2, &c.q1).unwrap();
    let nv = c.q2.num_dofs();
    let (pd, vd) = (c.q1.cell_dofs(0), c.q2.cell_dofs(0));
    let cols_x: Vec<usize> = vd.to_vec();
    let cols_y: Vec<usize> = vd.iter().map(|j| j + nv).collect();
    check(&b, pd, &cols_x, |a, k| {
        let ((ia, ja), (ib, jb)) = (Q1_NODES[a], Q2_NODES[k]);
        -PD[ia][ib] * HY * PM[ja][jb]
    });
    check(&b, pd, &cols_y, |a, k| {
        let ((ia, ja), (ib, jb)) = (Q1_NODES[a], Q2_NODES[k]);
        -HX * PM[ia][ib] * PD[ja][jb]
    });
}

#[test]
fn transpose_gradient_vanishes_for_constant_viscosity() {
    let c = cell();
    let u = vector_interpolate(&c.q2, |x, y| [x * x * y, -x * y * y]);
    let mu = Field::constant(&c.q1, 4.0);
    let t = c.asm.transpose_gradient_rhs(&u, &mu).unwrap();
    assert!(t.iter().flatten().all(|v| v.abs() < 1e-14));
}

#[test]
fn transpose_gradient_needs_quadratic_velocity() {
    let c = cell();
    let u = [Field::zeros(&c.q1), Field::zeros(&c.q1)];
    let mu = Field::constant(&c.q1, 1.0);
    assert!(c.asm.transpose_gradient_rhs(&u, &mu).is_err());
}
