use std::borrow::Cow;
use std::sync::{Arc, OnceLock};

use super::basis::shape_functions;
use super::context::{FeContext, QpScalar, QpVector};
use super::field::{Field, VectorField};
use super::quadrature::gauss_legendre;
use super::sparse::{CellPattern, CsrMatrix};
use crate::error::{Error, Result};
use crate::mesh::{Degree, FunctionSpace, Mesh, Side};

/// A scalar coefficient of a bilinear form.
#[derive(Debug, Clone, Copy)]
pub enum Coefficient<'a> {
    Constant(f64),
    Field(&'a Field),
    Quadrature(&'a QpScalar),
}

impl<'a> From<&'a Field> for Coefficient<'a> {
    fn from(f: &'a Field) -> Self {
        Coefficient::Field(f)
    }
}

impl<'a> From<&'a QpScalar> for Coefficient<'a> {
    fn from(q: &'a QpScalar) -> Self {
        Coefficient::Quadrature(q)
    }
}

impl From<f64> for Coefficient<'_> {
    fn from(c: f64) -> Self {
        Coefficient::Constant(c)
    }
}

impl Coefficient<'_> {
    fn resolve<'b>(&'b self, fe: &FeContext) -> Result<Cow<'b, QpScalar>> {
        match *self {
            Coefficient::Constant(c) => Ok(Cow::Owned(fe.constant(c))),
            Coefficient::Field(f) => Ok(Cow::Owned(fe.values(f)?)),
            Coefficient::Quadrature(q) => {
                if q.0.len() != fe.num_points() {
                    return Err(Error::invalid(format!(
                        "coefficient has {} quadrature values, mesh has {}",
                        q.0.len(),
                        fe.num_points()
                    )));
                }
                Ok(Cow::Borrowed(q))
            }
        }
    }
}

/// Stabilisation applied to the density transport system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransportStabilisation {
    /// Plain Galerkin.
    None,
    /// Test functions `φ + δ (w·∇φ + ½(∇·w) φ)`. With `δ = τ/θ` this is the
    /// least-squares method for the time-discrete transport residual.
    LeastSquares { delta: f64 },
}

fn degree_slot(test: Degree, trial: Degree) -> usize {
    match (test, trial) {
        (Degree::Q1, Degree::Q1) => 0,
        (Degree::Q1, Degree::Q2) => 1,
        (Degree::Q2, Degree::Q1) => 2,
        (Degree::Q2, Degree::Q2) => 3,
    }
}

/// Finite-element operator assembly on one uniform mesh. Sparsity patterns
/// are built once per (test, trial) degree pair and shared by every matrix.
#[derive(Debug)]
pub struct Assembler {
    fe: FeContext,
    patterns: [OnceLock<Arc<CellPattern>>; 4],
}

impl Assembler {
    pub fn new(fe: FeContext) -> Self {
        Assembler {
            fe,
            patterns: Default::default(),
        }
    }

    pub fn with_default_rule(mesh: Arc<Mesh>) -> Self {
        Self::new(FeContext::with_default_rule(mesh))
    }

    pub fn fe(&self) -> &FeContext {
        &self.fe
    }

    pub fn cell_pattern(&self, test: &FunctionSpace, trial: &FunctionSpace) -> Arc<CellPattern> {
        self.patterns[degree_slot(test.degree(), trial.degree())]
            .get_or_init(|| CellPattern::new(test, trial))
            .clone()
    }

    fn check(&self, spaces: &[&FunctionSpace]) -> Result<()> {
        spaces.iter().try_for_each(|s| self.fe.check_space(s))
    }

    /// Loops over cells, letting `kernel` fill the dense element matrix, and
    /// scatters it into a matrix on the (test, trial) pattern.
    fn assemble_cells(
        &self,
        test: &FunctionSpace,
        trial: &FunctionSpace,
        mut kernel: impl FnMut(usize, &mut [f64]) -> Result<()>,
    ) -> Result<CsrMatrix> {
        let cp = self.cell_pattern(test, trial);
        let mut mat = cp.zeros();
        let mut local = vec![0.0; test.dofs_per_cell() * trial.dofs_per_cell()];
        for cell in 0..self.fe.mesh().num_cells() {
            local.fill(0.0);
            kernel(cell, &mut local)?;
            mat.scatter(cp.cell_slots(cell), &local);
        }
        Ok(mat)
    }

    /// `(w φ_j, φ_i)`
    pub fn mass<'a>(&self, space: &FunctionSpace, weight: impl Into<Coefficient<'a>>) -> Result<CsrMatrix> {
        self.check(&[space])?;
        let w = weight.into();
        let w = w.resolve(&self.fe)?;
        let tab = self.fe.tabulation(space.degree());
        let n = space.dofs_per_cell();
        let nq = self.fe.points_per_cell();
        self.assemble_cells(space, space, |cell, local| {
            for q in 0..nq {
                let f = w.0[cell * nq + q] * self.fe.jxw(q);
                let phi = tab.values(q);
                for i in 0..n {
                    let fi = f * phi[i];
                    for j in 0..n {
                        local[i * n + j] += fi * phi[j];
                    }
                }
            }
            Ok(())
        })
    }

    /// `(μ ∇φ_j, ∇φ_i)`; μ must be positive at every quadrature point.
    pub fn diffusion<'a>(&self, space: &FunctionSpace, mu: impl Into<Coefficient<'a>>) -> Result<CsrMatrix> {
        self.check(&[space])?;
        let mu = mu.into();
        let mu = mu.resolve(&self.fe)?;
        self.check_positive("diffusion coefficient", &mu)?;
        let tab = self.fe.tabulation(space.degree());
        let n = space.dofs_per_cell();
        let nq = self.fe.points_per_cell();
        self.assemble_cells(space, space, |cell, local| {
            for q in 0..nq {
                let f = mu.0[cell * nq + q] * self.fe.jxw(q);
                let g = tab.grads(q);
                for i in 0..n {
                    for j in 0..n {
                        local[i * n + j] += f * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
                    }
                }
            }
            Ok(())
        })
    }

    pub(crate) fn check_positive(&self, what: &'static str, c: &QpScalar) -> Result<()> {
        let nq = self.fe.points_per_cell();
        if let Some((k, &v)) = c.0.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
            let [x, y] = self.fe.point(k / nq, k % nq);
            return Err(Error::Precondition {
                what,
                value: v,
                element: k / nq,
                x,
                y,
            });
        }
        Ok(())
    }

    /// Skew-symmetrised convection `(ρ w·∇φ_j + ½ ∇·(ρw) φ_j, φ_i)` with
    /// `∇·(ρw) = ρ∇·w + w·∇ρ` evaluated at quadrature points.
    pub fn convection(&self, space: &FunctionSpace, rho: &Field, wind: &VectorField) -> Result<CsrMatrix> {
        let data = WindData::new(&self.fe, rho, wind)?;
        self.check(&[space])?;
        let tab = self.fe.tabulation(space.degree());
        let n = space.dofs_per_cell();
        let nq = self.fe.points_per_cell();
        self.assemble_cells(space, space, |cell, local| {
            for q in 0..nq {
                let k = cell * nq + q;
                let (r, w, half_div) = data.at(k);
                let jxw = self.fe.jxw(q);
                let (phi, g) = (tab.values(q), tab.grads(q));
                for i in 0..n {
                    let fi = jxw * phi[i];
                    for j in 0..n {
                        let adv = r * (w[0] * g[j][0] + w[1] * g[j][1]) + half_div * phi[j];
                        local[i * n + j] += fi * adv;
                    }
                }
            }
            Ok(())
        })
    }

    /// Fused velocity block `(m φ_j, φ_i) + (μ ∇φ_j, ∇φ_i) + c(ρ, w; φ_j, φ_i)`,
    /// identical for every velocity component.
    pub fn momentum_block(
        &self,
        space: &FunctionSpace,
        mass_weight: &QpScalar,
        mu: &Field,
        rho: &Field,
        wind: &VectorField,
    ) -> Result<CsrMatrix> {
        self.check(&[space])?;
        let mu = self.fe.values(mu)?;
        self.check_positive("dynamic viscosity", &mu)?;
        let data = WindData::new(&self.fe, rho, wind)?;
        let tab = self.fe.tabulation(space.degree());
        let n = space.dofs_per_cell();
        let nq = self.fe.points_per_cell();
        self.assemble_cells(space, space, |cell, local| {
            for q in 0..nq {
                let k = cell * nq + q;
                let (r, w, half_div) = data.at(k);
                let jxw = self.fe.jxw(q);
                let (m, d) = (mass_weight.0[k], mu.0[k]);
                let (phi, g) = (tab.values(q), tab.grads(q));
                for i in 0..n {
                    for j in 0..n {
                        let adv = r * (w[0] * g[j][0] + w[1] * g[j][1]) + (half_div + m) * phi[j];
                        let diff = d * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
                        local[i * n + j] += jxw * (adv * phi[i] + diff);
                    }
                }
            }
            Ok(())
        })
    }

    /// Minus the divergence: `B[k, c·n_v + j] = −(ψ_k, ∂φ_j/∂x_c)`, so that
    /// `B [u₁; u₂] = −(ψ_k, ∇·u)`.
    pub fn divergence(&self, vel: &FunctionSpace, prs: &FunctionSpace) -> Result<CsrMatrix> {
        self.check(&[vel, prs])?;
        if !vel.same_mesh(prs) {
            return Err(Error::invalid("velocity and pressure spaces live on different meshes"));
        }
        let (tv, tp) = (self.fe.tabulation(vel.degree()), self.fe.tabulation(prs.degree()));
        let (nv, np) = (vel.dofs_per_cell(), prs.dofs_per_cell());
        let nq = self.fe.points_per_cell();
        let nvel = vel.num_dofs();
        let mut trip = Vec::with_capacity(self.fe.mesh().num_cells() * np * nv * 2);
        let mut local = vec![0.0; np * nv * 2];
        for cell in 0..self.fe.mesh().num_cells() {
            local.fill(0.0);
            for q in 0..nq {
                let jxw = self.fe.jxw(q);
                let (psi, g) = (tp.values(q), tv.grads(q));
                for k in 0..np {
                    for j in 0..nv {
                        for c in 0..2 {
                            local[(k * nv + j) * 2 + c] -= jxw * psi[k] * g[j][c];
                        }
                    }
                }
            }
            let (pd, vd) = (prs.cell_dofs(cell), vel.cell_dofs(cell));
            for k in 0..np {
                for j in 0..nv {
                    for c in 0..2 {
                        trip.push((pd[k], c * nvel + vd[j], local[(k * nv + j) * 2 + c]));
                    }
                }
            }
        }
        CsrMatrix::from_triplets(prs.num_dofs(), 2 * nvel, &trip)
    }

    /// Load vectors `((∂u/∂x_c)·∇μ, φ_i)` for c = 1, 2, accumulated cell by
    /// cell without integration by parts. Needs a velocity of degree two so
    /// that the gradient of a strain-dependent μ is available per element.
    pub fn transpose_gradient_rhs(&self, u: &VectorField, mu: &Field) -> Result<[Vec<f64>; 2]> {
        let space = u[0].space();
        if space.degree() != Degree::Q2 {
            return Err(Error::Unsupported(
                "transpose-gradient term needs a degree-2 velocity (no gradient reconstruction available)".into(),
            ));
        }
        let gu = [self.fe.gradients(&u[0])?, self.fe.gradients(&u[1])?];
        let gmu = self.fe.gradients(mu)?;
        let vals: Vec<[f64; 2]> = (0..self.fe.num_points())
            .map(|k| {
                let gm = gmu.0[k];
                // (∇ᵀu ∇μ)_c = Σ_j ∂_c u_j ∂_j μ
                let f = |c: usize| gu[0].0[k][c] * gm[0] + gu[1].0[k][c] * gm[1];
                [f(0), f(1)]
            })
            .collect();
        self.vector_load(space, &QpVector(vals))
    }

    /// `(f, φ_i)` for a scalar source given at quadrature points.
    pub fn load(&self, space: &FunctionSpace, f: &QpScalar) -> Result<Vec<f64>> {
        self.check(&[space])?;
        let tab = self.fe.tabulation(space.degree());
        let nq = self.fe.points_per_cell();
        let mut b = vec![0.0; space.num_dofs()];
        for cell in 0..self.fe.mesh().num_cells() {
            let dofs = space.cell_dofs(cell);
            for q in 0..nq {
                let fq = f.0[cell * nq + q] * self.fe.jxw(q);
                for (phi, &d) in tab.values(q).iter().zip(dofs) {
                    b[d] += fq * phi;
                }
            }
        }
        Ok(b)
    }

    /// `(f_c, φ_i)` for both components of a vector source.
    pub fn vector_load(&self, space: &FunctionSpace, f: &QpVector) -> Result<[Vec<f64>; 2]> {
        Ok([self.load(space, &f.component(0))?, self.load(space, &f.component(1))?])
    }

    /// `(f, ∇ψ_i)` for a vector field given at quadrature points.
    pub fn gradient_load(&self, space: &FunctionSpace, f: &QpVector) -> Result<Vec<f64>> {
        self.check(&[space])?;
        let tab = self.fe.tabulation(space.degree());
        let nq = self.fe.points_per_cell();
        let mut b = vec![0.0; space.num_dofs()];
        for cell in 0..self.fe.mesh().num_cells() {
            let dofs = space.cell_dofs(cell);
            for q in 0..nq {
                let fq = f.0[cell * nq + q];
                let jxw = self.fe.jxw(q);
                for (g, &d) in tab.grads(q).iter().zip(dofs) {
                    b[d] += jxw * (fq[0] * g[0] + fq[1] * g[1]);
                }
            }
        }
        Ok(b)
    }

    /// Time-discrete transport operator for `θ/τ ρ + w·∇ρ + ½(∇·w)ρ = h/τ`.
    /// Returns the system matrix and the matrix applied to the history
    /// field `h`.
    pub fn transport(
        &self,
        space: &FunctionSpace,
        wind: &VectorField,
        tau: f64,
        theta: f64,
        stabilisation: TransportStabilisation,
    ) -> Result<(CsrMatrix, CsrMatrix)> {
        if !(tau > 0.0) {
            return Err(Error::invalid(format!("time step must be positive, got {tau}")));
        }
        self.check(&[space])?;
        let gw = [self.fe.gradients(&wind[0])?, self.fe.gradients(&wind[1])?];
        let w = [self.fe.values(&wind[0])?, self.fe.values(&wind[1])?];
        let delta = match stabilisation {
            TransportStabilisation::None => 0.0,
            TransportStabilisation::LeastSquares { delta } => delta,
        };
        let tab = self.fe.tabulation(space.degree());
        let n = space.dofs_per_cell();
        let nq = self.fe.points_per_cell();
        let mut l_phi = vec![0.0; n];
        let mut psi = vec![0.0; n];
        let mut history = self.cell_pattern(space, space).zeros();
        let hist_slots = self.cell_pattern(space, space);
        let mut hist_local = vec![0.0; n * n];
        let system = self.assemble_cells(space, space, |cell, local| {
            hist_local.fill(0.0);
            for q in 0..nq {
                let k = cell * nq + q;
                let wq = [w[0].0[k], w[1].0[k]];
                let half_div = 0.5 * (gw[0].0[k][0] + gw[1].0[k][1]);
                let jxw = self.fe.jxw(q);
                let (phi, g) = (tab.values(q), tab.grads(q));
                for a in 0..n {
                    let adv = wq[0] * g[a][0] + wq[1] * g[a][1] + half_div * phi[a];
                    l_phi[a] = theta / tau * phi[a] + adv;
                    psi[a] = phi[a] + delta * adv;
                }
                for i in 0..n {
                    for j in 0..n {
                        local[i * n + j] += jxw * l_phi[j] * psi[i];
                        hist_local[i * n + j] += jxw * phi[j] * psi[i] / tau;
                    }
                }
            }
            history.scatter(hist_slots.cell_slots(cell), &hist_local);
            Ok(())
        })?;
        Ok((system, history))
    }

    /// Transport operator for a wind known only at quadrature points, in
    /// the skew form
    /// `θ/τ(ρ, ψ) + ½(w·∇ρ, ψ) − ½(w·∇ψ, ρ) + ½∮(g·n)ρψ = (h, ψ)/τ`,
    /// where `g` supplies the normal trace of `w` on the boundary. This is
    /// the form of [`Assembler::transport`] integrated by parts; it only
    /// needs `w` itself and keeps constants exact whenever `w` is weakly
    /// solenoidal against the scalar space. Least-squares stabilisation
    /// adds `δ(θ/τ ρ + w·∇ρ − h/τ, w·∇ψ)`.
    pub fn transport_weak(
        &self,
        space: &FunctionSpace,
        wind: &QpVector,
        trace: &VectorField,
        tau: f64,
        theta: f64,
        stabilisation: TransportStabilisation,
    ) -> Result<(CsrMatrix, CsrMatrix)> {
        if !(tau > 0.0) {
            return Err(Error::invalid(format!("time step must be positive, got {tau}")));
        }
        self.check(&[space, trace[0].space(), trace[1].space()])?;
        if wind.0.len() != self.fe.num_points() {
            return Err(Error::invalid("wind must be given at every quadrature point"));
        }
        let delta = match stabilisation {
            TransportStabilisation::None => 0.0,
            TransportStabilisation::LeastSquares { delta } => delta,
        };
        let tab = self.fe.tabulation(space.degree());
        let n = space.dofs_per_cell();
        let nq = self.fe.points_per_cell();
        let mut adv = vec![0.0; n];
        let cp = self.cell_pattern(space, space);
        let mut history = cp.zeros();
        let mut hist_local = vec![0.0; n * n];
        let mut system = self.assemble_cells(space, space, |cell, local| {
            hist_local.fill(0.0);
            for q in 0..nq {
                let wq = wind.0[cell * nq + q];
                let jxw = self.fe.jxw(q);
                let (phi, g) = (tab.values(q), tab.grads(q));
                for a in 0..n {
                    adv[a] = wq[0] * g[a][0] + wq[1] * g[a][1];
                }
                for i in 0..n {
                    for j in 0..n {
                        let skew = 0.5 * (adv[j] * phi[i] - adv[i] * phi[j]);
                        let ls = delta * (theta / tau * phi[j] + adv[j]) * adv[i];
                        local[i * n + j] += jxw * (theta / tau * phi[j] * phi[i] + skew + ls);
                        hist_local[i * n + j] += jxw * phi[j] * (phi[i] + delta * adv[i]) / tau;
                    }
                }
            }
            history.scatter(cp.cell_slots(cell), &hist_local);
            Ok(())
        })?;

        // ½∮(g·n)ρψ on the boundary edges
        let mesh = self.fe.mesh();
        let (gx, gw) = gauss_legendre(self.fe.rule().points_per_axis())?;
        let tdeg = trace[0].space().degree();
        let (mut tv, mut tg) = (vec![0.0; tdeg.dofs_per_cell()], vec![[0.0; 2]; tdeg.dofs_per_cell()]);
        let (mut sv, mut sg) = (vec![0.0; n], vec![[0.0; 2]; n]);
        let mut local = vec![0.0; n * n];
        for edge in mesh.boundary_edges() {
            let normal = edge.side.normal();
            let len = match edge.side {
                Side::Bottom | Side::Top => mesh.hx(),
                Side::Left | Side::Right => mesh.hy(),
            };
            let tdofs = trace[0].space().cell_dofs(edge.cell);
            local.fill(0.0);
            for (&t, &w) in gx.iter().zip(&gw) {
                let xi = match edge.side {
                    Side::Bottom => [t, -1.0],
                    Side::Top => [t, 1.0],
                    Side::Left => [-1.0, t],
                    Side::Right => [1.0, t],
                };
                shape_functions(tdeg, xi, &mut tv, &mut tg);
                let gn: f64 = (0..2)
                    .map(|c| normal[c] * tdofs.iter().zip(&tv).map(|(&d, v)| trace[c].values()[d] * v).sum::<f64>())
                    .sum();
                if gn == 0.0 {
                    continue;
                }
                shape_functions(space.degree(), xi, &mut sv, &mut sg);
                let jw = 0.5 * w * len * 0.5 * gn;
                for i in 0..n {
                    for j in 0..n {
                        local[i * n + j] += jw * sv[i] * sv[j];
                    }
                }
            }
            system.scatter(cp.cell_slots(edge.cell), &local);
        }
        Ok((system, history))
    }

    /// Reference stress-divergence operator `(2μ ∇ˢu, ∇ˢw)` on the
    /// two-component velocity space, unknowns ordered `[u₁; u₂]`.
    pub fn stress_divergence<'a>(&self, vel: &FunctionSpace, mu: impl Into<Coefficient<'a>>) -> Result<CsrMatrix> {
        self.check(&[vel])?;
        let mu = mu.into();
        let mu = mu.resolve(&self.fe)?;
        self.vector_operator(vel, |k, g_i, g_j, c, d| {
            let lap = if c == d { g_i[0] * g_j[0] + g_i[1] * g_j[1] } else { 0.0 };
            mu.0[k] * (lap + g_j[c] * g_i[d])
        })
    }

    /// Generalised-Laplacian viscous operator `(μ ∇u, ∇w)` assembled on the
    /// full two-component space; it has no inter-component coupling.
    pub fn vector_diffusion<'a>(&self, vel: &FunctionSpace, mu: impl Into<Coefficient<'a>>) -> Result<CsrMatrix> {
        self.check(&[vel])?;
        let mu = mu.into();
        let mu = mu.resolve(&self.fe)?;
        self.vector_operator(vel, |k, g_i, g_j, c, d| {
            if c == d {
                mu.0[k] * (g_i[0] * g_j[0] + g_i[1] * g_j[1])
            } else {
                0.0
            }
        })
    }

    /// Full two-component momentum operator built entry by entry over all
    /// component pairs, for comparison against the scalar block.
    pub fn vector_momentum(
        &self,
        vel: &FunctionSpace,
        mass_weight: &QpScalar,
        mu: &Field,
        rho: &Field,
        wind: &VectorField,
    ) -> Result<CsrMatrix> {
        self.check(&[vel])?;
        let muq = self.fe.values(mu)?;
        let data = WindData::new(&self.fe, rho, wind)?;
        let tab = self.fe.tabulation(vel.degree());
        let nq = self.fe.points_per_cell();
        let n = vel.dofs_per_cell();
        let nvel = vel.num_dofs();
        let mut trip = Vec::new();
        for cell in 0..self.fe.mesh().num_cells() {
            let dofs = vel.cell_dofs(cell);
            for c in 0..2 {
                for d in 0..2 {
                    for i in 0..n {
                        for j in 0..n {
                            let mut s = 0.0;
                            if c == d {
                                for q in 0..nq {
                                    let k = cell * nq + q;
                                    let (r, w, half_div) = data.at(k);
                                    let (phi, g) = (tab.values(q), tab.grads(q));
                                    let adv = r * (w[0] * g[j][0] + w[1] * g[j][1])
                                        + (half_div + mass_weight.0[k]) * phi[j];
                                    let diff = muq.0[k] * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
                                    s += self.fe.jxw(q) * (adv * phi[i] + diff);
                                }
                            }
                            trip.push((c * nvel + dofs[i], d * nvel + dofs[j], s));
                        }
                    }
                }
            }
        }
        CsrMatrix::from_triplets(2 * nvel, 2 * nvel, &trip)
    }

    fn vector_operator(
        &self,
        vel: &FunctionSpace,
        entry: impl Fn(usize, [f64; 2], [f64; 2], usize, usize) -> f64,
    ) -> Result<CsrMatrix> {
        let tab = self.fe.tabulation(vel.degree());
        let nq = self.fe.points_per_cell();
        let n = vel.dofs_per_cell();
        let nvel = vel.num_dofs();
        let mut trip = Vec::with_capacity(self.fe.mesh().num_cells() * 4 * n * n);
        for cell in 0..self.fe.mesh().num_cells() {
            let dofs = vel.cell_dofs(cell);
            for c in 0..2 {
                for d in 0..2 {
                    for i in 0..n {
                        for j in 0..n {
                            let mut s = 0.0;
                            for q in 0..nq {
                                let g = tab.grads(q);
                                s += self.fe.jxw(q) * entry(cell * nq + q, g[i], g[j], c, d);
                            }
                            trip.push((c * nvel + dofs[i], d * nvel + dofs[j], s));
                        }
                    }
                }
            }
        }
        CsrMatrix::from_triplets(2 * nvel, 2 * nvel, &trip)
    }
}

/// Density and advecting velocity at quadrature points.
struct WindData {
    rho: QpScalar,
    grad_rho: QpVector,
    w: [QpScalar; 2],
    div_w: QpScalar,
}

impl WindData {
    fn new(fe: &FeContext, rho: &Field, wind: &VectorField) -> Result<Self> {
        let g0 = fe.gradients(&wind[0])?;
        let g1 = fe.gradients(&wind[1])?;
        Ok(WindData {
            rho: fe.values(rho)?,
            grad_rho: fe.gradients(rho)?,
            w: [fe.values(&wind[0])?, fe.values(&wind[1])?],
            div_w: QpScalar(g0.0.iter().zip(&g1.0).map(|(a, b)| a[0] + b[1]).collect()),
        })
    }

    /// `(ρ, w, ½∇·(ρw))` at global quadrature index `k`.
    #[inline]
    fn at(&self, k: usize) -> (f64, [f64; 2], f64) {
        let r = self.rho.0[k];
        let w = [self.w[0].0[k], self.w[1].0[k]];
        let gr = self.grad_rho.0[k];
        let div_rho_w = r * self.div_w.0[k] + w[0] * gr[0] + w[1] * gr[1];
        (r, w, 0.5 * div_rho_w)
    }
}
