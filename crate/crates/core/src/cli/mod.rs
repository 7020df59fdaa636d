//! Configurable runs behind the `hypercurv` binary.

mod audit;
mod graph;
mod identities;
mod output;

pub use audit::{
    run_audit, AuditConfig, AuditFamily, AuditReport, AuditVerdict, SamplePreset, SignPattern,
};
pub use graph::{graph_report, lrh_report, write_curvature_csv, GraphReport, LrhReport};
pub use identities::{random_symmetric, run_identities, IdentityConfig, IdentityReport, SuiteResult};
pub use output::{output_path, to_json, write_csv, write_json};
