//! Shared inputs for the benchmarks in `benches/`.

use heislab_core::heis::HeisPoint;
use heislab_core::maps::{sample_points, MapSpec};
use heislab_core::subelliptic::SegmentCondenser;
use heislab_core::WeightedGraph;

/// Fixed points of `[−2,2]² × [−4,4]` off the singular locus of `spec`.
pub fn points(spec: &MapSpec, n: usize) -> Vec<HeisPoint> {
    sample_points(spec, n, 42).0
}

/// Random connected graph grounded at its last three vertices.
pub fn grounded_graph(n: usize) -> WeightedGraph {
    WeightedGraph::random_connected(n, 0.1, 42).with_boundary(&[n - 1, n - 2, n - 3])
}

pub fn segment(len: usize) -> SegmentCondenser {
    heislab_core::subelliptic::segment_condenser(len, len).expect("valid segment")
}
