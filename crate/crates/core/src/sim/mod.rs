//! P2P UPIR community simulation.

mod engine;
mod model;
mod stats;
mod trace;

pub use engine::{
    calibrated_self_submission, init_community, run, CommunicationSpace, Community, Message,
    MessageKind, Protocol,
};
pub use model::{Emission, QueryModel, UserStream};
pub use stats::{proxy_counts, proxy_distribution, proxy_summary, uniform_goodness_of_fit, GoodnessOfFit};
pub use trace::{
    Action, CommunityEvent, ProtocolKind, QueryId, ServerRecord, SimulationTrace, TraceParams,
    TruthRecord,
};
