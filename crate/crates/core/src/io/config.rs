//! `key = value` run configuration. Later sources override earlier ones;
//! defaults depend on the case and on `paper_scale`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::cases::{CaseKind, DropletConfig, RayleighTaylorConfig};
use crate::error::{Error, Result};
use crate::linsolve::SolverSettings;
use crate::stepper::{DensityTransport, Problem, Scheme, StepperSettings, TimeGrid};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub case: CaseKind,
    pub scheme: Scheme,
    pub paper_scale: bool,
    pub nx: usize,
    pub ny: usize,
    pub dt: f64,
    pub t_end: f64,
    pub output: PathBuf,
    /// Steps between VTK snapshots; 0 writes none.
    pub snapshot_every: usize,
    /// Also dump every velocity and scalar dof to CSV with each snapshot.
    pub dump_dofs: bool,
    pub rel_tol: f64,
    /// 0 lets the solver choose.
    pub max_iter: usize,
    pub ls_density: bool,
    pub clamp_density: bool,
    pub rt: RayleighTaylorConfig,
    pub droplet: DropletConfig,
}

/// Splits `key = value` lines; `#` starts a comment.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::config(format!("line {}", i + 1), format!("expected `key = value`, got `{line}`")))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(Error::config(format!("line {}", i + 1), "empty key"));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

fn value<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::config(key, format!("cannot parse `{v}` as {}", std::any::type_name::<T>())))
}

fn boolean(key: &str, v: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::config(key, format!("expected a boolean, got `{v}`"))),
    }
}

impl RunConfig {
    /// Defaults for a case.
    pub fn defaults(case: CaseKind, paper_scale: bool) -> Self {
        let (scheme, nx, ny, dt, t_end, ls) = match (case, paper_scale) {
            (CaseKind::Mms, _) => (Scheme::Bdf2, 16, 16, 0.025, 1.0, false),
            (CaseKind::RayleighTaylor, false) => (Scheme::Bdf2, 32, 256, 0.002, 1.5, true),
            (CaseKind::RayleighTaylor, true) => (Scheme::Bdf2, 100, 800, 0.001, 3.15, true),
            (CaseKind::Droplet, false) => (Scheme::Fs1, 50, 200, 0.01, 0.5, true),
            (CaseKind::Droplet, true) => (Scheme::Fs1, 200, 800, 0.005, 1.5, true),
        };
        RunConfig {
            case,
            scheme,
            paper_scale,
            nx,
            ny,
            dt,
            t_end,
            output: PathBuf::from(format!("out/{case}")),
            snapshot_every: 0,
            dump_dofs: false,
            rel_tol: 1e-10,
            max_iter: 0,
            ls_density: ls,
            clamp_density: false,
            rt: RayleighTaylorConfig::default(),
            droplet: DropletConfig::default(),
        }
    }

    /// Builds a configuration from `key = value` pairs; later pairs win.
    pub fn from_pairs<K: AsRef<str>, V: AsRef<str>>(pairs: &[(K, V)]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (k, v) in pairs {
            map.insert(k.as_ref().to_string(), v.as_ref().to_string());
        }
        let case = match map.remove("case") {
            Some(v) => v.parse()?,
            None => CaseKind::Mms,
        };
        let paper_scale = match map.remove("paper_scale") {
            Some(v) => boolean("paper_scale", &v)?,
            None => false,
        };
        let mut c = RunConfig::defaults(case, paper_scale);
        for (k, v) in &map {
            c.set(k, v)?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_pairs(&parse_pairs(text)?)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<()> {
        let f = |v: &str| value::<f64>(key, v);
        match key {
            "scheme" => self.scheme = v.parse()?,
            "nx" => self.nx = value(key, v)?,
            "ny" => self.ny = value(key, v)?,
            "dt" => self.dt = f(v)?,
            "t_end" => self.t_end = f(v)?,
            "output" => self.output = PathBuf::from(v),
            "snapshot_every" => self.snapshot_every = value(key, v)?,
            "dump_dofs" => self.dump_dofs = boolean(key, v)?,
            "rel_tol" => self.rel_tol = f(v)?,
            "max_iter" => self.max_iter = value(key, v)?,
            "ls_density" => self.ls_density = boolean(key, v)?,
            "clamp_density" => self.clamp_density = boolean(key, v)?,
            "rt.a" => self.rt.a = f(v)?,
            "rt.g" => self.rt.g = f(v)?,
            "rt.reynolds" => self.rt.reynolds = f(v)?,
            "rt.atwood" => self.rt.atwood = f(v)?,
            "rt.rho1" => self.rt.rho1 = f(v)?,
            "droplet.rho_droplet" => self.droplet.rho_droplet = f(v)?,
            "droplet.rho_ambient" => self.droplet.rho_ambient = f(v)?,
            "droplet.nu_inf" => self.droplet.rheology.nu_inf = f(v)?,
            "droplet.sigma0" => self.droplet.rheology.sigma0 = f(v)?,
            "droplet.m" => self.droplet.rheology.m = f(v)?,
            "droplet.rho_inf" => self.droplet.rheology.rho_inf = f(v)?,
            "droplet.g" => self.droplet.g = f(v)?,
            "droplet.width" => self.droplet.width = f(v)?,
            "droplet.height" => self.droplet.height = f(v)?,
            "droplet.centre_x" => self.droplet.centre[0] = f(v)?,
            "droplet.centre_y" => self.droplet.centre[1] = f(v)?,
            "droplet.radius" => self.droplet.radius = f(v)?,
            "droplet.layer_height" => self.droplet.layer_height = f(v)?,
            "droplet.smoothing" => self.droplet.smoothing = f(v)?,
            _ => return Err(Error::config(key, "unknown key")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::config("nx", format!("mesh must have cells, got {} x {}", self.nx, self.ny)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::config("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= self.dt) {
            return Err(Error::config("t_end", format!("must be at least dt = {}, got {}", self.dt, self.t_end)));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::config("rel_tol", format!("must lie in (0, 1), got {}", self.rel_tol)));
        }
        match self.case {
            CaseKind::RayleighTaylor => self.rt.validate()?,
            CaseKind::Droplet => self.droplet.validate()?,
            CaseKind::Mms => {}
        }
        if self.scheme == Scheme::Fs1 && self.case == CaseKind::RayleighTaylor {
            return Err(Error::config(
                "scheme",
                "fs1 needs Dirichlet data for both velocity components on every wall; rayleigh-taylor has slip walls",
            ));
        }
        Ok(())
    }

    /// Every key, so that `parse(render(c)) == c`.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| writeln!(s, "{k} = {v}").expect("writing to a string");
        kv("case", self.case.to_string());
        kv("paper_scale", self.paper_scale.to_string());
        kv("scheme", self.scheme.to_string());
        kv("nx", self.nx.to_string());
        kv("ny", self.ny.to_string());
        kv("dt", self.dt.to_string());
        kv("t_end", self.t_end.to_string());
        kv("output", self.output.display().to_string());
        kv("snapshot_every", self.snapshot_every.to_string());
        kv("dump_dofs", self.dump_dofs.to_string());
        kv("rel_tol", self.rel_tol.to_string());
        kv("max_iter", self.max_iter.to_string());
        kv("ls_density", self.ls_density.to_string());
        kv("clamp_density", self.clamp_density.to_string());
        let rt = &self.rt;
        kv("rt.a", rt.a.to_string());
        kv("rt.g", rt.g.to_string());
        kv("rt.reynolds", rt.reynolds.to_string());
        kv("rt.atwood", rt.atwood.to_string());
        kv("rt.rho1", rt.rho1.to_string());
        let d = &self.droplet;
        kv("droplet.rho_droplet", d.rho_droplet.to_string());
        kv("droplet.rho_ambient", d.rho_ambient.to_string());
        kv("droplet.nu_inf", d.rheology.nu_inf.to_string());
        kv("droplet.sigma0", d.rheology.sigma0.to_string());
        kv("droplet.m", d.rheology.m.to_string());
        kv("droplet.rho_inf", d.rheology.rho_inf.to_string());
        kv("droplet.g", d.g.to_string());
        kv("droplet.width", d.width.to_string());
        kv("droplet.height", d.height.to_string());
        kv("droplet.centre_x", d.centre[0].to_string());
        kv("droplet.centre_y", d.centre[1].to_string());
        kv("droplet.radius", d.radius.to_string());
        kv("droplet.layer_height", d.layer_height.to_string());
        kv("droplet.smoothing", d.smoothing.to_string());
        s
    }

    pub fn problem(&self) -> Result<Problem> {
        match self.case {
            CaseKind::Mms => crate::cases::MmsSolution::problem(self.nx, self.ny),
            CaseKind::RayleighTaylor => self.rt.problem(self.nx, self.ny),
            CaseKind::Droplet => self.droplet.problem(self.nx, self.ny),
        }
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::with_step(self.dt, self.t_end).map_err(|e| Error::config("dt", e.to_string()))
    }

    pub fn settings(&self) -> StepperSettings {
        StepperSettings {
            solver: SolverSettings {
                rel_tol: self.rel_tol,
                max_iter: (self.max_iter > 0).then_some(self.max_iter),
                ..SolverSettings::default()
            },
            density_transport: if self.ls_density {
                DensityTransport::LeastSquares
            } else {
                DensityTransport::Galerkin
            },
            clamp_density: self.clamp_density,
            check_weak_divergence: self.scheme == Scheme::Fs1,
            ..StepperSettings::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_precedence() {
        let c = RunConfig::parse("case = mms\n").unwrap();
        assert_eq!(c, RunConfig::defaults(CaseKind::Mms, false));
        let c = RunConfig::from_pairs(&[("dt", "0.001"), ("dt", "0.005")]).unwrap();
        assert_eq!(c.dt, 0.005);
        let c = RunConfig::parse("case = droplet # comment\npaper_scale = true").unwrap();
        assert_eq!((c.nx, c.ny, c.dt), (200, 800, 0.005));
    }

    #[test]
    fn errors_name_the_key() {
        let key = |text: &str| match RunConfig::parse(text) {
            Err(Error::Config { key, .. }) => key,
            other => panic!("expected a config error, got {other:?}"),
        };
        assert_eq!(key("bogus = 1"), "bogus");
        assert_eq!(key("nx = ten"), "nx");
        assert_eq!(key("case = rayleigh-taylor\nscheme = fs1"), "scheme");
        assert_eq!(key("dt = 0"), "dt");
        assert_eq!(key("no equals sign"), "line 1");
    }
}
