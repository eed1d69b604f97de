use std::sync::Arc;

use imexflow::cases::{CaseKind, RayleighTaylorConfig};
use imexflow::diagnostics::{ErrorLevel, ErrorTable};
use imexflow::io::vtk::{read_scalar_array, HEADER};
use imexflow::io::{energy_table, error_table, render_vtk, CsvTable, RunConfig};
use imexflow::mesh::{Mesh, Rect};
use imexflow::stepper::{Scheme, Simulation, StepperSettings, TimeGrid};
use proptest::prelude::*;

fn rt_simulation(nx: usize, ny: usize) -> Simulation {
    let problem = RayleighTaylorConfig::default().problem(nx, ny).unwrap();
    Simulation::new(problem, Scheme::Bdf2, TimeGrid::new(0.004, 2).unwrap(), StepperSettings::default()).unwrap()
}

#[test]
fn vtk_on_one_cell() {
    let sim = rt_simulation(1, 1);
    let text = render_vtk(sim.state()).unwrap();
    assert_eq!(text.lines().next(), Some(HEADER));
    assert!(text.contains("DATASET STRUCTURED_GRID\nDIMENSIONS 2 2 1\nPOINTS 4 double\n"));
    for name in ["density", "pressure", "viscosity"] {
        assert_eq!(read_scalar_array(&text, name).unwrap().len(), 4, "{name}");
    }
    let velocity_rows = text.lines().skip_while(|l| !l.starts_with("VECTORS velocity")).skip(1).take(4);
    assert!(velocity_rows.map(|l| l.split_whitespace().count()).all(|n| n == 3));
}

#[test]
fn vtk_density_round_trips_and_matches_the_initial_profile() {
    let cfg = RayleighTaylorConfig::default();
    let sim = rt_simulation(4, 32);
    let text = render_vtk(sim.state()).unwrap();
    let rho = read_scalar_array(&text, "density").unwrap();
    let mesh = sim.scalar_space().mesh().clone();
    let q1 = sim.scalar_space();
    for (v, &[x, y]) in mesh.vertices().iter().enumerate() {
        assert_eq!(rho[v], sim.state().rho.values()[q1.vertex_dof(v)]);
        assert!((rho[v] - cfg.initial_density(x, y)).abs() < 1e-14);
    }
}

#[test]
fn energy_csv_has_one_line_per_report() {
    let mut sim = rt_simulation(2, 16);
    let reports = sim.run(|_, _| Ok(())).unwrap();
    let text = energy_table(&reports).render();
    assert_eq!(text.lines().count(), reports.len() + 1);
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    assert_eq!(header.len(), 16);
    let first_kinetic: f64 = text.lines().nth(1).unwrap().split(',').nth(3).unwrap().parse().unwrap();
    assert_eq!(first_kinetic, reports[0].kinetic);
}

#[test]
fn empty_series_is_header_only() {
    let text = energy_table(&[]).render();
    assert_eq!(text.lines().count(), 1);
    assert_eq!(CsvTable::new(&["a", "b"]).render(), "a,b\n");
}

#[test]
fn error_table_rates_blank_on_first_level() {
    let levels = (0..5)
        .map(|l| {
            let h = 0.25 / f64::from(1 << l);
            ErrorLevel {
                n: 4 << l,
                h,
                tau: 0.4 * h,
                u: h * h,
                p: h,
                rho: 2.0 * h * h,
            }
        })
        .collect();
    let table = ErrorTable::new(Scheme::Bdf2, levels).unwrap();
    let text = error_table(&table).render();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 5);
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let rate_cols: Vec<usize> = (0..header.len()).filter(|&i| header[i].starts_with("rate")).collect();
    assert_eq!(rate_cols.len(), 3);
    for &c in &rate_cols {
        assert_eq!(rows[0][c], "");
        let r: f64 = rows[4][c].parse().unwrap();
        assert!((r - 1.0).abs() < 1e-12 || (r - 2.0).abs() < 1e-12, "{r}");
    }
}

#[test]
fn mesh_vertex_order_is_x_fastest() {
    let m = Arc::new(Mesh::new(Rect::unit_square(), 2, 3).unwrap());
    assert_eq!(m.vertices()[1], [0.5, 0.0]);
    assert_eq!(m.vertices()[3], [0.0, 1.0 / 3.0]);
}

fn case_strategy() -> impl Strategy<Value = CaseKind> {
    prop_oneof![Just(CaseKind::Mms), Just(CaseKind::RayleighTaylor), Just(CaseKind::Droplet)]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn config_render_parse_round_trip(
        case in case_strategy(),
        full_scale in any::<bool>(),
        nx in 1usize..500,
        ny in 1usize..500,
        dt in 1e-5f64..0.5,
        span in 1.0f64..100.0,
        ls in any::<bool>(),
        radius in 0.01f64..0.3,
    ) {
        let pairs = vec![
            ("case".to_string(), case.to_string()),
            ("paper_scale".to_string(), full_scale.to_string()),
            ("nx".to_string(), nx.to_string()),
            ("ny".to_string(), ny.to_string()),
            ("dt".to_string(), dt.to_string()),
            ("t_end".to_string(), (dt * span).to_string()),
            ("ls_density".to_string(), ls.to_string()),
            ("droplet.radius".to_string(), radius.to_string()),
        ];
        let c = RunConfig::from_pairs(&pairs).unwrap();
        let again = RunConfig::parse(&c.render()).unwrap();
        prop_assert_eq!(&again, &c);
        prop_assert_eq!(again.render(), c.render());
    }

    #[test]
    fn later_pairs_win(a in 1e-4f64..0.1, b in 1e-4f64..0.1) {
        let c = RunConfig::from_pairs(&[("dt", a.to_string()), ("dt", b.to_string())]).unwrap();
        prop_assert_eq!(c.dt, b);
    }
}

#[test]
fn droplet_defaults() {
    let c = RunConfig::from_pairs(&[("case", "droplet")]).unwrap();
    let b = c.droplet.rheology;
    assert_eq!((b.nu_inf, b.sigma0, b.m, b.rho_inf), (1e-3, 1.0, 50.0, 100.0));
    assert_eq!((c.nx, c.ny, c.dt, c.scheme), (50, 200, 0.01, Scheme::Fs1));
    let p = RunConfig::from_pairs(&[("case", "droplet"), ("paper_scale", "true")]).unwrap();
    assert_eq!((p.nx, p.ny, p.dt), (200, 800, 0.005));
}
