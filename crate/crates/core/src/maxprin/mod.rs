//! Space-form laboratory for the maximum principle of the square operator.

mod akutagawa;
mod comparison;
mod lemma;
mod model;
mod scenario;
mod sequence;
mod testfn;

pub use akutagawa::{
    akutagawa_transform_check, synthetic_samples, AkutagawaParams, AkutagawaReport, AkutagawaRow, AkutagawaSample,
};
pub use comparison::{comparison_functions, ComparisonValues};
pub use lemma::{square_distance_check, LemmaReport, LemmaSample};
pub use model::{DistanceJet, ModelKind, ModelManifold};
pub use scenario::{PhiSpec, Scenario, ScenarioReport};
pub use sequence::{
    corollary_limits, corollary_limits_below, omori_yau_sequence, Bound, CorollaryRow, CorollaryVerdict, OmoriYauRun,
    SearchConfig, SequenceRecord, Unresolved,
};
pub use testfn::{FunctionFamily, FunctionJet, TestFunction};
