use crate::assembly::{vector_lincomb, QpScalar, VectorField};
use crate::error::Result;
use crate::linsolve::SaddleSolver;
use crate::rheology::{dynamic_viscosity, extrapolated_viscosity};

use super::{density_step_bdf1, density_step_bdf2, MomentumSnapshot, Simulation, TransposeExtrapolation};

impl Simulation {
    /// One step of the coupled scheme of the given order: density, then
    /// viscosity, then the velocity-pressure system.
    pub(super) fn coupled_step(&mut self, order: usize) -> Result<()> {
        let tau = self.grid.tau();
        let t1 = self.state.t + tau;
        let st = &self.state;
        let u_prev = st.u_prev.as_ref().filter(|_| order == 2);
        let wind: VectorField = match u_prev {
            Some(up) => vector_lincomb(&st.u, 2.0, up, -1.0),
            None => st.u.clone(),
        };

        let opts = self.density_options(t1);
        let (rho1, _) = match (u_prev, &st.rho_prev) {
            (Some(_), Some(rp)) => density_step_bdf2(&self.asm, &st.rho, rp, &wind, tau, &opts)?,
            _ => density_step_bdf1(&self.asm, &st.rho, &wind, tau, &opts)?,
        };
        let (rho1, rq1) = self.finish_density(rho1)?;

        let hist: Vec<&VectorField> = match u_prev {
            Some(up) => vec![&st.u, up],
            None => vec![&st.u],
        };
        let nu1 = extrapolated_viscosity(&self.problem.viscosity, &self.q1, &hist, hist.len(), t1)?;
        let mu1 = dynamic_viscosity(&self.problem.viscosity, &rho1, &nu1);

        let fe = self.asm.fe();
        let rq = fe.values(&st.rho)?;
        let uq = [fe.values(&st.u[0])?, fe.values(&st.u[1])?];
        let (mass_weight, mass_src): (QpScalar, [QpScalar; 2]) = match u_prev {
            None => {
                let coef = rq1.zip_map(&rq, |a, b| (a * b).sqrt() / tau);
                (rq1.map(|r| r / tau), [coef.zip_map(&uq[0], |c, u| c * u), coef.zip_map(&uq[1], |c, u| c * u)])
            }
            Some(up) => {
                let rp = fe.values(st.rho_prev.as_ref().expect("BDF2 density history"))?;
                let upq = [fe.values(&up[0])?, fe.values(&up[1])?];
                let src = |c: usize| {
                    QpScalar(
                        (0..rq1.0.len())
                            .map(|k| {
                                rq1.0[k].sqrt() * (4.0 * rq.0[k].sqrt() * uq[c].0[k] - rp.0[k].sqrt() * upq[c].0[k])
                                    / (2.0 * tau)
                            })
                            .collect(),
                    )
                };
                (rq1.map(|r| 1.5 * r / tau), [src(0), src(1)])
            }
        };

        let block = self.asm.momentum_block(&self.q2, &mass_weight, &mu1, &rho1, &wind)?;

        let transpose = match (u_prev, self.settings.transpose_extrapolation) {
            (Some(up), TransposeExtrapolation::Terms) => {
                let mu_prev = st.mu_prev.as_ref().unwrap_or(&st.mu);
                let now = self.asm.transpose_gradient_rhs(&st.u, &st.mu)?;
                let before = self.asm.transpose_gradient_rhs(up, mu_prev)?;
                [0, 1].map(|c| now[c].iter().zip(&before[c]).map(|(a, b)| 2.0 * a - b).collect::<Vec<_>>())
            }
            _ => self.asm.transpose_gradient_rhs(&wind, &mu1)?,
        };
        let f = self.forcing_at(t1, &rq1);
        let fl = self.asm.vector_load(&self.q2, &f)?;
        let mut rhs = [Vec::new(), Vec::new()];
        for c in 0..2 {
            let m = self.asm.load(&self.q2, &mass_src[c])?;
            rhs[c] = (0..m.len()).map(|i| m[i] + transpose[c][i] + fl[c][i]).collect();
        }

        let bcs = self.problem.velocity_dirichlet(&self.q2, t1)?;
        if self.saddle.is_none() {
            self.saddle = Some(SaddleSolver::new(self.divergence.clone(), self.mean_weights())?);
        }
        let saddle = self.saddle.as_mut().expect("just built");
        let (u1, p1, report) = saddle.solve(
            [&block, &block],
            [&bcs[0], &bcs[1]],
            [&rhs[0], &rhs[1]],
            None,
            &self.settings.solver,
        )?;
        report.require("velocity-pressure system")?;

        let u1 = [
            crate::assembly::Field::from_values(&self.q2, u1[0].clone())?,
            crate::assembly::Field::from_values(&self.q2, u1[1].clone())?,
        ];
        let p1 = crate::assembly::Field::from_values(&self.q1, p1)?;
        if self.settings.keep_operators {
            self.last_momentum = Some(MomentumSnapshot {
                mass_weight,
                mu: mu1.clone(),
                rho: rho1.clone(),
                wind,
                block,
            });
        }

        let st = &mut self.state;
        st.u_prev = Some(std::mem::replace(&mut st.u, u1));
        st.rho_prev = Some(std::mem::replace(&mut st.rho, rho1));
        st.mu_prev = Some(std::mem::replace(&mut st.mu, mu1));
        st.nu = nu1;
        st.p = p1;
        st.t = t1;
        st.step += 1;
        Ok(())
    }
}
