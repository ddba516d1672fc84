//! Horizontal finite differences on Heisenberg lattices and convex edge
//! energies on weighted graphs.

mod capacity;
mod green;
mod grid;
mod perimeter;
mod poincare;
mod solver;

pub use capacity::{
    capacity_lower_bound_check, double_cover, graph_capacity, graph_capacity_with, lift, parabolicity_scan,
    segment_condenser, CapacityResult, LowerBoundRow, QuotientBall, ScanFamily, ScanRow, SegmentCondenser,
};
pub use green::{green_function, weak_identity_residual, GreenResult};
pub use grid::{horizontal_gradient, minimize_p_energy, p_energy, Condenser, HeisGrid, MinimizeResult, SubellipticField};
pub use perimeter::{
    coarea_check, coarea_grid, coarea_row, crofton_order, edge_directions, level_integral, perimeter_estimate_graph,
    perimeter_estimate_grid, CoareaConfig, CoareaRow, PerimeterMethod,
};
pub use poincare::{poincare_ratio, poincare_sweep, PoincareConfig, PoincareReport};
pub use solver::{Method, Problem, SolveOptions, Solution};
