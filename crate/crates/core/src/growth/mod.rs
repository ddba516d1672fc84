//! Word growth of marked groups, ε-nets with combinatorial boundaries, and
//! rough isoperimetric profiles.

mod group;
mod net;
mod transfer;

pub use group::{
    ball_elements, ball_sizes, ball_sizes_with_guard, growth_exponent_fit, growth_fit_report, sphere_sizes_with,
    CayleyGroup, DiscreteHeisenberg, FreeGroup, GrowthFit, MarkedGroup, ZLattice, MEMORY_GUARD,
};
pub use net::{
    boundary, build_net, cayley_net, combinatorial_balls, combinatorial_distance, is_maximal, random_clusters,
    rough_ip_constant, rough_ip_profile, subset_stats, uniformity_stat, CayleyNet, FiniteSubsetStats, Net, Oracle,
};
pub use transfer::{graph_net, sub_box_family, transfer_harness, ConditionCheck, SetRecord, TransferConfig, TransferReport};
