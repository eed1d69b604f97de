//! Lagrangian shape functions on the reference square `[-1, 1]²`.

use crate::mesh::Degree;

/// 1-D Lagrange basis values and derivatives at `t`, for nodes `{-1, 1}`
/// (order 1) or `{-1, 0, 1}` (order 2).
fn lagrange_1d(order: usize, t: f64) -> ([f64; 3], [f64; 3]) {
    match order {
        1 => ([0.5 * (1.0 - t), 0.5 * (1.0 + t), 0.0], [-0.5, 0.5, 0.0]),
        _ => (
            [0.5 * t * (t - 1.0), 1.0 - t * t, 0.5 * t * (t + 1.0)],
            [t - 0.5, -2.0 * t, t + 0.5],
        ),
    }
}

/// Evaluates all shape functions of `degree` and their reference gradients
/// at `xi`, in the fixed local dof order.
pub fn shape_functions(degree: Degree, xi: [f64; 2], values: &mut [f64], grads: &mut [[f64; 2]]) {
    let k = degree.order();
    let (vx, dx) = lagrange_1d(k, xi[0]);
    let (vy, dy) = lagrange_1d(k, xi[1]);
    // lattice offset `a` in 0..=k maps to node index: order 1 → a, order 2 → a (nodes -1, 0, 1)
    for (n, &(a, b)) in degree.local_lattice().iter().enumerate() {
        values[n] = vx[a] * vy[b];
        grads[n] = [dx[a] * vy[b], vx[a] * dy[b]];
    }
}

/// Shape functions tabulated at the points of a quadrature rule, with
/// gradients already mapped to physical coordinates of a uniform mesh.
#[derive(Debug, Clone)]
pub struct Tabulation {
    degree: Degree,
    n_dofs: usize,
    values: Vec<f64>,
    grads: Vec<[f64; 2]>,
}

impl Tabulation {
    pub fn new(degree: Degree, points: &[[f64; 2]], hx: f64, hy: f64) -> Self {
        let n = degree.dofs_per_cell();
        let mut values = vec![0.0; n * points.len()];
        let mut grads = vec![[0.0; 2]; n * points.len()];
        let (sx, sy) = (2.0 / hx, 2.0 / hy);
        for (q, &xi) in points.iter().enumerate() {
            let (v, g) = (&mut values[q * n..(q + 1) * n], &mut grads[q * n..(q + 1) * n]);
            shape_functions(degree, xi, v, g);
            for gr in g.iter_mut() {
                gr[0] *= sx;
                gr[1] *= sy;
            }
        }
        Tabulation {
            degree,
            n_dofs: n,
            values,
            grads,
        }
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    /// Shape function values at quadrature point `q`.
    #[inline]
    pub fn values(&self, q: usize) -> &[f64] {
        &self.values[q * self.n_dofs..(q + 1) * self.n_dofs]
    }

    /// Physical gradients at quadrature point `q`.
    #[inline]
    pub fn grads(&self, q: usize) -> &[[f64; 2]] {
        &self.grads[q * self.n_dofs..(q + 1) * self.n_dofs]
    }
}
