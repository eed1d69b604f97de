//! Structured quadrilateral meshes on axis-aligned rectangles and the
//! Q1/Q2 Lagrangian function spaces built on them.
//!
//! Vertices and degrees of freedom are numbered lexicographically on their
//! lattice with `x` running fastest. Element-local dof ordering is fixed:
//! the four corners counter-clockwise from the bottom-left, then (Q2 only)
//! the edge midpoints bottom/right/top/left, then the cell centre.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Axis-aligned rectangle `(x0, x1) × (y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        if !(x0 < x1 && y0 < y1) || ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) {
            return Err(Error::invalid(format!(
                "degenerate rectangle ({x0}, {x1}) x ({y0}, {y1})"
            )));
        }
        Ok(Rect { x0, x1, y0, y1 })
    }

    pub fn unit_square() -> Self {
        Rect {
            x0: 0.0,
            x1: 1.0,
            y0: 0.0,
            y1: 1.0,
        }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Left, Side::Right, Side::Bottom, Side::Top];

    /// Outward unit normal.
    pub fn normal(self) -> [f64; 2] {
        match self {
            Side::Left => [-1.0, 0.0],
            Side::Right => [1.0, 0.0],
            Side::Bottom => [0.0, -1.0],
            Side::Top => [0.0, 1.0],
        }
    }

    /// Index (0 = x, 1 = y) of the velocity component normal to this side.
    pub fn normal_component(self) -> usize {
        match self {
            Side::Left | Side::Right => 0,
            Side::Bottom | Side::Top => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub vertices: [usize; 2],
    pub cell: usize,
    pub side: Side,
}

/// Uniform `nx × ny` grid of axis-aligned quadrilaterals.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    rect: Rect,
    nx: usize,
    ny: usize,
    vertices: Vec<[f64; 2]>,
    cells: Vec<[usize; 4]>,
    boundary_edges: Vec<BoundaryEdge>,
}

/// Coordinate `k` of `n` subdivisions of `[a, b]`, written so that lattice
/// points of a grid are bit-identical in every refinement of it.
pub(crate) fn lattice_coord(a: f64, b: f64, k: usize, n: usize) -> f64 {
    if k == n {
        b
    } else {
        a + (b - a) * (k as f64 / n as f64)
    }
}

impl Mesh {
    pub fn new(rect: Rect, nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::invalid(format!(
                "element counts must be positive, got {nx} x {ny}"
            )));
        }
        Rect::new(rect.x0, rect.x1, rect.y0, rect.y1)?;
        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            let y = lattice_coord(rect.y0, rect.y1, j, ny);
            for i in 0..=nx {
                vertices.push([lattice_coord(rect.x0, rect.x1, i, nx), y]);
            }
        }
        let v = |i: usize, j: usize| j * (nx + 1) + i;
        let mut cells = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                cells.push([v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1)]);
            }
        }
        let mut boundary_edges = Vec::with_capacity(2 * (nx + ny));
        for i in 0..nx {
            boundary_edges.push(BoundaryEdge {
                vertices: [v(i, 0), v(i + 1, 0)],
                cell: i,
                side: Side::Bottom,
            });
            boundary_edges.push(BoundaryEdge {
                vertices: [v(i + 1, ny), v(i, ny)],
                cell: (ny - 1) * nx + i,
                side: Side::Top,
            });
        }
        for j in 0..ny {
            boundary_edges.push(BoundaryEdge {
                vertices: [v(0, j + 1), v(0, j)],
                cell: j * nx,
                side: Side::Left,
            });
            boundary_edges.push(BoundaryEdge {
                vertices: [v(nx, j), v(nx, j + 1)],
                cell: j * nx + nx - 1,
                side: Side::Right,
            });
        }
        Ok(Mesh {
            rect,
            nx,
            ny,
            vertices,
            cells,
            boundary_edges,
        })
    }

    /// Splits every element into four; the input vertex set is preserved.
    pub fn refine_uniform(&self) -> Mesh {
        Mesh::new(self.rect, 2 * self.nx, 2 * self.ny).expect("refining a valid mesh")
    }

    pub fn rect(&self) -> Rect {
        self.rect
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn hx(&self) -> f64 {
        self.rect.width() / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        self.rect.height() / self.ny as f64
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn cells(&self) -> &[[usize; 4]] {
        &self.cells
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    /// Grid indices `(i, j)` of a cell.
    pub fn cell_ij(&self, cell: usize) -> (usize, usize) {
        (cell % self.nx, cell / self.nx)
    }

    /// Bottom-left corner of a cell.
    pub fn cell_origin(&self, cell: usize) -> [f64; 2] {
        self.vertices[self.cells[cell][0]]
    }

    /// Maps reference coordinates in `[-1, 1]²` to physical coordinates.
    pub fn map_to_physical(&self, cell: usize, xi: [f64; 2]) -> [f64; 2] {
        let [ox, oy] = self.cell_origin(cell);
        [
            ox + 0.5 * (xi[0] + 1.0) * self.hx(),
            oy + 0.5 * (xi[1] + 1.0) * self.hy(),
        ]
    }

    /// Constant Jacobian determinant of the reference-to-physical map.
    pub fn jacobian_det(&self) -> f64 {
        0.25 * self.hx() * self.hy()
    }
}

/// Polynomial degree of a Lagrangian space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Degree {
    Q1,
    Q2,
}

impl Degree {
    pub fn from_order(order: usize) -> Result<Self> {
        match order {
            1 => Ok(Degree::Q1),
            2 => Ok(Degree::Q2),
            k => Err(Error::invalid(format!("unsupported element degree {k}"))),
        }
    }

    pub fn order(self) -> usize {
        match self {
            Degree::Q1 => 1,
            Degree::Q2 => 2,
        }
    }

    pub fn dofs_per_cell(self) -> usize {
        match self {
            Degree::Q1 => 4,
            Degree::Q2 => 9,
        }
    }

    /// Local lattice offsets `(a, b)` in `0..=order` of each local dof.
    pub fn local_lattice(self) -> &'static [(usize, usize)] {
        match self {
            Degree::Q1 => &[(0, 0), (1, 0), (1, 1), (0, 1)],
            Degree::Q2 => &[
                (0, 0),
                (2, 0),
                (2, 2),
                (0, 2),
                (1, 0),
                (2, 1),
                (1, 2),
                (0, 1),
                (1, 1),
            ],
        }
    }
}

/// Scalar continuous Lagrangian space on a [`Mesh`].
#[derive(Debug)]
pub struct FunctionSpace {
    mesh: Arc<Mesh>,
    degree: Degree,
    cell_dofs: Vec<usize>,
    coords: Vec<[f64; 2]>,
    side_dofs: [Vec<usize>; 4],
}

fn side_slot(side: Side) -> usize {
    match side {
        Side::Left => 0,
        Side::Right => 1,
        Side::Bottom => 2,
        Side::Top => 3,
    }
}

impl FunctionSpace {
    pub fn new(mesh: Arc<Mesh>, degree: Degree) -> Arc<Self> {
        let k = degree.order();
        let (nx, ny) = (mesh.nx(), mesh.ny());
        let (lx, ly) = (k * nx + 1, k * ny + 1);
        let rect = mesh.rect();
        let mut coords = Vec::with_capacity(lx * ly);
        for jj in 0..ly {
            let y = lattice_coord(rect.y0, rect.y1, jj, ly - 1);
            for ii in 0..lx {
                coords.push([lattice_coord(rect.x0, rect.x1, ii, lx - 1), y]);
            }
        }
        let local = degree.local_lattice();
        let mut cell_dofs = Vec::with_capacity(mesh.num_cells() * local.len());
        for cell in 0..mesh.num_cells() {
            let (i, j) = mesh.cell_ij(cell);
            for &(a, b) in local {
                cell_dofs.push((k * j + b) * lx + k * i + a);
            }
        }
        let mut side_dofs: [Vec<usize>; 4] = Default::default();
        side_dofs[side_slot(Side::Left)] = (0..ly).map(|jj| jj * lx).collect();
        side_dofs[side_slot(Side::Right)] = (0..ly).map(|jj| jj * lx + lx - 1).collect();
        side_dofs[side_slot(Side::Bottom)] = (0..lx).collect();
        side_dofs[side_slot(Side::Top)] = (0..lx).map(|ii| (ly - 1) * lx + ii).collect();
        Arc::new(FunctionSpace {
            mesh,
            degree,
            cell_dofs,
            coords,
            side_dofs,
        })
    }

    /// Builds a space of the given polynomial order (1 or 2).
    pub fn with_order(mesh: Arc<Mesh>, order: usize) -> Result<Arc<Self>> {
        Ok(Self::new(mesh, Degree::from_order(order)?))
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn num_dofs(&self) -> usize {
        self.coords.len()
    }

    pub fn dofs_per_cell(&self) -> usize {
        self.degree.dofs_per_cell()
    }

    /// Lattice dimensions `(columns, rows)` of the dof grid.
    pub fn lattice_dims(&self) -> (usize, usize) {
        let k = self.degree.order();
        (k * self.mesh.nx() + 1, k * self.mesh.ny() + 1)
    }

    pub fn cell_dofs(&self, cell: usize) -> &[usize] {
        let n = self.dofs_per_cell();
        &self.cell_dofs[cell * n..(cell + 1) * n]
    }

    pub fn dof_coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    /// Dofs lying on one side, ordered along the side.
    pub fn side_dofs(&self, side: Side) -> &[usize] {
        &self.side_dofs[side_slot(side)]
    }

    /// Union of the dofs lying on any of `sides`. Corners belong to both
    /// adjacent sides.
    pub fn boundary_dofs(&self, sides: &[Side]) -> BTreeSet<usize> {
        sides
            .iter()
            .flat_map(|&s| self.side_dofs(s).iter().copied())
            .collect()
    }

    /// Dof index of the mesh vertex `v` (shared lattice point).
    pub fn vertex_dof(&self, vertex: usize) -> usize {
        let k = self.degree.order();
        let nxv = self.mesh.nx() + 1;
        let (i, j) = (vertex % nxv, vertex / nxv);
        let (lx, _) = self.lattice_dims();
        (k * j) * lx + k * i
    }

    pub fn same_mesh(&self, other: &FunctionSpace) -> bool {
        Arc::ptr_eq(&self.mesh, &other.mesh) || *self.mesh == *other.mesh
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(nx: usize, ny: usize) -> Arc<Mesh> {
        Arc::new(Mesh::new(Rect::unit_square(), nx, ny).unwrap())
    }

    #[test]
    fn counts() {
        let m = unit(1, 1);
        assert_eq!((m.num_cells(), m.num_vertices()), (1, 4));
        let m = unit(4, 4);
        assert_eq!((m.num_cells(), m.num_vertices()), (16, 25));
        assert_eq!(FunctionSpace::new(m.clone(), Degree::Q2).num_dofs(), 81);
        assert_eq!(FunctionSpace::new(m, Degree::Q1).num_dofs(), 25);
    }

    #[test]
    fn rayleigh_taylor_production_mesh() {
        let rect = Rect::new(0.0, 0.5, -2.0, 2.0).unwrap();
        let m = Mesh::new(rect, 100, 800).unwrap();
        assert_eq!(m.num_cells(), 80_000);
        assert_eq!(m.hx(), m.hy());
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(Mesh::new(Rect::unit_square(), 0, 3).is_err());
        assert!(Rect::new(1.0, 0.0, 0.0, 1.0).is_err());
        assert!(Degree::from_order(3).is_err());
        assert!(FunctionSpace::with_order(unit(1, 1), 0).is_err());
    }

    #[test]
    fn single_biquadratic_cell() {
        let s = FunctionSpace::new(unit(1, 1), Degree::Q2);
        assert_eq!(s.num_dofs(), 9);
        let mut dofs = s.cell_dofs(0).to_vec();
        dofs.sort_unstable();
        assert_eq!(dofs, (0..9).collect::<Vec<_>>());
        let c = s.dof_coords();
        let local: Vec<[f64; 2]> = s.cell_dofs(0).iter().map(|&d| c[d]).collect();
        assert_eq!(
            local,
            vec![
                [0.0, 0.0],
                [1.0, 0.0],
                [1.0, 1.0],
                [0.0, 1.0],
                [0.5, 0.0],
                [1.0, 0.5],
                [0.5, 1.0],
                [0.0, 0.5],
                [0.5, 0.5]
            ]
        );
    }

    #[test]
    fn element_lattice_matches_geometry() {
        let m = unit(3, 2);
        for deg in [Degree::Q1, Degree::Q2] {
            let s = FunctionSpace::new(m.clone(), deg);
            let k = deg.order() as f64;
            for cell in 0..m.num_cells() {
                let [ox, oy] = m.cell_origin(cell);
                for (&d, &(a, b)) in s.cell_dofs(cell).iter().zip(deg.local_lattice()) {
                    let [x, y] = s.dof_coords()[d];
                    assert!((x - (ox + a as f64 * m.hx() / k)).abs() < 1e-15);
                    assert!((y - (oy + b as f64 * m.hy() / k)).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn boundary_sets() {
        let s = FunctionSpace::new(unit(1, 1), Degree::Q1);
        assert_eq!(s.boundary_dofs(&Side::ALL).len(), 4);
        let s = FunctionSpace::new(unit(1, 1), Degree::Q2);
        let left = s.boundary_dofs(&[Side::Left]);
        assert_eq!(left.len(), 3);
        assert!(left.iter().all(|&d| s.dof_coords()[d][0] == 0.0));
        let s = FunctionSpace::new(unit(4, 4), Degree::Q2);
        assert_eq!(s.boundary_dofs(&Side::ALL).len(), 4 * 9 - 4);
    }

    #[test]
    fn boundary_union_is_extremal_coordinates() {
        let m = Arc::new(Mesh::new(Rect::new(-1.0, 2.0, 0.5, 1.5).unwrap(), 3, 5).unwrap());
        for deg in [Degree::Q1, Degree::Q2] {
            let s = FunctionSpace::new(m.clone(), deg);
            let r = m.rect();
            let expected: BTreeSet<usize> = s
                .dof_coords()
                .iter()
                .enumerate()
                .filter(|(_, p)| p[0] == r.x0 || p[0] == r.x1 || p[1] == r.y0 || p[1] == r.y1)
                .map(|(d, _)| d)
                .collect();
            assert_eq!(s.boundary_dofs(&Side::ALL), expected);
        }
    }

    #[test]
    fn refinement_nests_vertices() {
        let m = Mesh::new(Rect::new(0.0, 0.5, -2.0, 2.0).unwrap(), 4, 4).unwrap();
        let f = m.refine_uniform();
        assert_eq!((f.nx(), f.ny()), (8, 8));
        assert_eq!(f.rect(), m.rect());
        assert_eq!(f.hx(), 0.5 * m.hx());
        assert_eq!(f.hy(), 0.5 * m.hy());
        let fine: std::collections::HashSet<[u64; 2]> = f
            .vertices()
            .iter()
            .map(|p| [p[0].to_bits(), p[1].to_bits()])
            .collect();
        assert!(m
            .vertices()
            .iter()
            .all(|p| fine.contains(&[p[0].to_bits(), p[1].to_bits()])));
        let mut r = m.clone();
        for _ in 0..5 {
            r = r.refine_uniform();
        }
        assert_eq!((r.nx(), r.ny()), (128, 128));
        let one = Mesh::new(Rect::unit_square(), 1, 1).unwrap().refine_uniform();
        assert_eq!((one.nx(), one.ny()), (2, 2));
    }

    #[test]
    fn boundary_edges_are_tagged_once() {
        let m = unit(3, 2);
        assert_eq!(m.boundary_edges().len(), 2 * (3 + 2));
        for side in Side::ALL {
            let n = m.boundary_edges().iter().filter(|e| e.side == side).count();
            let expected = if matches!(side, Side::Left | Side::Right) { 2 } else { 3 };
            assert_eq!(n, expected);
        }
    }

    #[test]
    fn vertex_dofs_share_coordinates() {
        let m = unit(3, 2);
        let s = FunctionSpace::new(m.clone(), Degree::Q2);
        for (v, p) in m.vertices().iter().enumerate() {
            assert_eq!(s.dof_coords()[s.vertex_dof(v)], *p);
        }
    }
}
