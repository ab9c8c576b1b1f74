//! Exact counting, good-model enumeration, growth experiments and joining search.

pub mod counting;
pub mod empirical;
pub mod experiment;
pub mod good_models;
pub mod joining;

pub use counting::{
    expected_planted_count_bruteforce, expected_planted_count_exact, for_each_labeling, z_n, z_n_bruteforce,
    zbounds_check, ZBounds,
};
pub use empirical::{dstar_by_patterns, dstar_empirical, dstar_sparse, empirical_counts, empirical_weight};
pub use experiment::{
    growth_level, growth_rate_experiment, planted_pair, GrowthConfig, GrowthRow, GrowthTarget, ReferenceKind,
    SamplerChoice,
};
pub use good_models::{enumerate_good_models, good_models, CountReport, Estimate, Exact, GoodModelTest};
pub use joining::{graph_couplings, joining_search, product_coupling, JoiningOptions, JoiningResult};
