use crate::assembly::{Field, QpVector, VectorField};
use crate::error::{Error, Result};
use crate::linsolve::{solve_neumann, solve_nonsym_from, solve_spd, solve_spd_from, SolverSettings};
use crate::rheology::{dynamic_viscosity, extrapolated_viscosity};

use super::{density_step_weak, MomentumSnapshot, Simulation};

impl Simulation {
    /// One step of the first-order fractional-step scheme.
    pub(super) fn fractional_step(&mut self) -> Result<()> {
        if self.q2_mass.is_none() {
            self.q2_mass = Some(self.asm.mass(&self.q2, 1.0)?);
        }
        let tau = self.grid.tau();
        let t1 = self.state.t + tau;
        let st = &self.state;
        let u_hat = st
            .u_hat
            .as_ref()
            .ok_or_else(|| Error::InvalidState("fractional step without end-of-step velocity".into()))?;

        // Step 1: density, advected by the end-of-step velocity, whose
        // normal trace is that of u_n
        let opts = self.density_options(t1);
        let (rho1, _) = density_step_weak(&self.asm, &st.rho, u_hat, &st.u, tau, &opts)
            .map_err(|e| e.at_step(st.step + 1, "fs1 density"))?;
        let (rho1, rq1) = self.finish_density(rho1)?;
        let nu1 = extrapolated_viscosity(&self.problem.viscosity, &self.q1, &[&st.u], 1, t1)?;
        let mu1 = dynamic_viscosity(&self.problem.viscosity, &rho1, &nu1);

        // Step 2: one scalar system per velocity component
        let fe = self.asm.fe();
        let rq = fe.values(&st.rho)?;
        let gp = fe.gradients(&st.p)?;
        let mass_weight = rq1.map(|r| r / tau);
        let block = self.asm.momentum_block(&self.q2, &mass_weight, &mu1, &rho1, &st.u)?;
        let f = self.forcing_at(t1, &rq1);
        let src = QpVector(
            (0..fe.num_points())
                .map(|k| {
                    let coef = (rq1.0[k] * rq.0[k]).sqrt() / tau;
                    let ratio = (rq1.0[k] / rq.0[k]).sqrt();
                    [0, 1].map(|c| coef * u_hat.0[k][c] - ratio * gp.0[k][c] + f.0[k][c])
                })
                .collect(),
        );
        let loads = self.asm.vector_load(&self.q2, &src)?;
        let transpose = self.asm.transpose_gradient_rhs(&st.u, &mu1)?;
        let bcs = self.problem.velocity_dirichlet(&self.q2, t1)?;
        let solver = self.settings.solver;
        let solve_component = |c: usize| -> Result<Vec<f64>> {
            let mut k = block.clone();
            let mut rhs: Vec<f64> = loads[c].iter().zip(&transpose[c]).map(|(a, b)| a + b).collect();
            bcs[c].apply(&mut k, &mut rhs, false);
            let (x, report) = solve_nonsym_from(&k, &rhs, Some(st.u[c].values()), &solver);
            report.require("fs1 momentum")?;
            Ok(x)
        };
        let (ux, uy) = std::thread::scope(|s| {
            let hx = s.spawn(|| solve_component(0));
            let uy = solve_component(1);
            (hx.join().expect("component solve panicked"), uy)
        });
        let u1: VectorField = [Field::from_values(&self.q2, ux?)?, Field::from_values(&self.q2, uy?)?];

        // Step 3: pressure from the variable-coefficient Neumann problem
        let a_coef = rq1.map(|r| 1.0 / r);
        let b_coef = rq1.zip_map(&rq, |a, b| 1.0 / (a * b).sqrt());
        let a_p = self.asm.diffusion(&self.q1, &a_coef)?;
        let scaled_gp = QpVector(gp.0.iter().zip(&b_coef.0).map(|(g, b)| [b * g[0], b * g[1]]).collect());
        let mut rhs = self.asm.gradient_load(&self.q1, &scaled_gp)?;
        let u_cat: Vec<f64> = u1[0].values().iter().chain(u1[1].values()).copied().collect();
        let bu = self.divergence.mul_vec(&u_cat);
        rhs.iter_mut().zip(&bu).for_each(|(r, d)| *r += d / tau);
        let (p1, report) = solve_neumann(&a_p, &rhs, Some(st.p.values()), &self.p_weights, &solver);
        report.require("fs1 pressure")?;
        let p1 = Field::from_values(&self.q1, p1)?;

        // Step 4: end-of-step velocity at quadrature points and its L2
        // projection
        let gp1 = fe.gradients(&p1)?;
        let uq1 = [fe.values(&u1[0])?, fe.values(&u1[1])?];
        let hat = QpVector(
            (0..fe.num_points())
                .map(|k| {
                    [0, 1].map(|c| uq1[c].0[k] - tau * (a_coef.0[k] * gp1.0[k][c] - b_coef.0[k] * gp.0[k][c]))
                })
                .collect(),
        );
        let hat_nodal = self.project_velocity(&hat, &u1, &solver)?;

        let weak_div = if self.settings.check_weak_divergence {
            let diff = QpVector(
                (0..fe.num_points())
                    .map(|k| [0, 1].map(|c| uq1[c].0[k] - hat.0[k][c]))
                    .collect(),
            );
            let mut r = self.asm.gradient_load(&self.q1, &diff)?;
            r.iter_mut().zip(&bu).for_each(|(r, d)| *r -= d);
            Some(self.dual_norm(&r)?)
        } else {
            None
        };

        if self.settings.keep_operators {
            self.last_momentum = Some(MomentumSnapshot {
                mass_weight,
                mu: mu1.clone(),
                rho: rho1.clone(),
                wind: self.state.u.clone(),
                block,
            });
        }

        let st = &mut self.state;
        st.u_prev = Some(std::mem::replace(&mut st.u, u1));
        st.rho_prev = Some(std::mem::replace(&mut st.rho, rho1));
        st.mu_prev = Some(std::mem::replace(&mut st.mu, mu1));
        st.u_hat = Some(hat);
        st.u_hat_nodal = Some(hat_nodal);
        st.nu = nu1;
        st.p = p1;
        st.t = t1;
        st.step += 1;
        st.weak_divergence = weak_div;
        Ok(())
    }

    /// L2 projection of quadrature-point values onto the velocity space,
    /// with boundary values taken from `boundary`.
    fn project_velocity(&self, values: &QpVector, boundary: &VectorField, solver: &SolverSettings) -> Result<VectorField> {
        let mass = self.q2_mass.as_ref().expect("built before the first step");
        let bdofs = self.q2.boundary_dofs(&crate::mesh::Side::ALL);
        let loads = self.asm.vector_load(&self.q2, values)?;
        let mut out = Vec::with_capacity(2);
        for c in 0..2 {
            let mut bc = crate::assembly::Dirichlet::new();
            for &d in &bdofs {
                bc.set(d, boundary[c].values()[d])?;
            }
            let mut m = mass.clone();
            let mut rhs = loads[c].clone();
            bc.apply(&mut m, &mut rhs, true);
            let (x, report) = solve_spd_from(&m, &rhs, Some(boundary[c].values()), solver);
            report.require("fs1 projection")?;
            out.push(Field::from_values(&self.q2, x)?);
        }
        let uy = out.pop().expect("two components");
        let ux = out.pop().expect("two components");
        Ok([ux, uy])
    }

    /// `sqrt(rᵀ M_p⁻¹ r)`, the norm of the functional `r` over the pressure
    /// space.
    fn dual_norm(&self, r: &[f64]) -> Result<f64> {
        let settings = SolverSettings {
            rel_tol: 1e-13,
            abs_tol: 1e-300,
            ..SolverSettings::default()
        };
        let (y, report) = solve_spd(&self.q1_mass, r, &settings);
        if !report.converged && report.residual > 1e-10 {
            return Err(Error::NotConverged {
                stage: "weak divergence".into(),
                report,
            });
        }
        Ok(crate::linsolve::dot(r, &y).max(0.0).sqrt())
    }
}
