//! Simulation of the on-line nearest-neighbour graph (ONG) on uniform random
//! points in the unit cube.
//!
//! Each point of a sequence after the first is joined to its nearest
//! predecessor; the functional of interest is the sum of edge lengths raised
//! to a power `alpha`. The crate builds the graph with an incremental grid
//! index checked against a brute-force oracle, evaluates the closed-form
//! limit constants, and provides the Monte Carlo diagnostics used by the
//! `ong-lab` experiment runner.

pub mod error;
pub mod geometry;
pub mod nn_index;
pub mod ong;
pub mod resample;
pub mod rng;
pub mod stats;
pub mod theory;
pub mod voronoi;

pub use error::{OngError, Result};
pub use geometry::{lex_compare, squared_distance, Point, PointSequence};
pub use nn_index::{brute_force_nearest, BruteForceIndex, GridIndex, NearestIndex, NnAnswer, NnMode, ShadowIndex};
pub use ong::{
    binomial_total, build_ong, build_ong_with, edge_weight, gains, poissonized_total, poissonized_total_given_count,
    rooted_weights, total_weight, totals_at, totals_at_many, GainVector, OngBuilder, OngEdge, OngGraph, PoissonizedTotal,
    RootedWeights,
};
pub use resample::{
    estimate_conditioned_second_moment, estimate_conditioned_second_moments, resample_breakdown,
    resample_delta, tail_increment_l2, ConditionedSecondMoment, DeltaTarget, ResampleBreakdown, TailIncrement,
};
pub use rng::{sample_binomial_process, sample_poisson_count, PoissonDraw, RandomStream};
pub use stats::{loglog_slope, EstimateSummary, SlopeFit};
pub use theory::{
    gain_leading, lln_constant, mu_1d, predicted_regimes, unit_ball_volume, MeanRegime, PredictedRegimes,
    TheoryConstants, VarianceRegime,
};
pub use voronoi::{cone_radius_1d, voronoi_diameter, ConeRadius1D, DiameterMethod, VoronoiDiameterEstimate};
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
