//! Comparison and soft alignment of weighted networks through optimal
//! transition couplings of their random walks.

pub mod bench;
pub mod cost;
pub mod error;
pub mod factor;
pub mod generators;
pub mod io;
pub mod markov;
pub mod lp;
pub mod network;
pub mod ot;
pub mod otc;
pub(crate) mod scc;

pub use cost::CostMatrix;
pub use error::{Error, Result};
pub use markov::{MarkovKernel, StationaryDistribution};
pub use network::{build_network, networks_equivalent, DegreeMode, Label, Network, VertexAttributes};
pub use ot::{ot_exact, ot_sinkhorn, total_variation, Coupling};
pub use otc::{
    hard_alignment, independent_coupling, solve_entropic_otc, solve_exact_otc, solve_lp_oracle, EntropicParams,
    OtcSolution, TransitionCoupling,
};

// The guide's code blocks run as doc-tests, one module per chapter.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/networks.md")]
    mod networks {}
    #[doc = include_str!("../../../book/src/costs.md")]
    mod costs {}
    #[doc = include_str!("../../../book/src/couplings.md")]
    mod couplings {}
    #[doc = include_str!("../../../book/src/factors.md")]
    mod factors {}
    #[doc = include_str!("../../../book/src/benchmarks.md")]
    mod benchmarks {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
