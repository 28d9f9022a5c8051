//! Exact bit error probability of Viterbi decoding for convolutional codes.
//!
//! The pipeline: realize an encoder ([`encoder`]), pick a channel
//! ([`channel`]), close the normalized metric-state graph ([`metricgraph`]),
//! assemble the information-weight transfer matrices ([`weightsys`]), and
//! solve for the stationary bit error probability ([`solver`]). A Monte
//! Carlo Viterbi simulator ([`montecarlo`]) serves as an independent check.

pub mod channel;
pub mod encoder;
pub mod linalg;
pub mod metricgraph;
pub mod weightsys;
pub mod scalar;
pub mod solver;
pub mod montecarlo;
#[doc(hidden)]
pub mod reference;

pub use channel::{
    awgn_dmc, bsc_tuple_prob, cutoff_rate, design_quantizer, hamming_metric, integer_metrics,
    Bsc, ChannelError, Dmc, DmcChannel, QuantMethod, Quantizer, StepChannel,
};
pub use encoder::{
    check_minimal_usable, parse_generator, realize, trellis, BranchLabel, EncoderError,
    EncoderFsm, Form, GenMatrix, MinimalityCheck, Trellis,
};
pub use linalg::{LinalgError, SparseMat};
pub use metricgraph::{
    closure, graph_dot, graph_json, phi_matrix, recurrent_class, stationary, viterbi_step,
    ClosureCaps, GraphError, MetricGraph, StepRecord, TieSet,
};
pub use scalar::{F64Ring, Poly, Rat, RatFn, RatFnRing, Ring, ScalarError, Series, SeriesRing};
pub use weightsys::{assemble, column_block_check, BlockCheck, WeightSystem};
pub use solver::{pb_iterative_check, pb_series, pb_series_coeffs, right_eigenvector, solve, BerSolution, SolveError};
pub use montecarlo::{simulate, wilson_interval, NoisyChannel, SimConfig, SimError, SimResult, TieRule};
