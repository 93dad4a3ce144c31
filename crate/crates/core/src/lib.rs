//! Ontology analytics for analogical reasoning.
//!
//! The crate reads knowledge-graph edge files (Wikidata-style `P279`
//! subclass and `P31` instance edges plus arbitrary statements) and
//! provides:
//!
//! - [`store`]: an immutable indexed store with transitive instance sets,
//!   sibling and ancestor queries and subclass-cycle handling;
//! - [`probe`]: compound subclass pairs ("red wine" / "wine") and the
//!   qualifiers, statements and siblings around them;
//! - [`metrics`]: instance count, reduction ratio, class overlap and
//!   subclass entropy per `(parent, child)` edge;
//! - [`miner`]: threshold filtering into candidate class pairs and
//!   instance-level analogies backed by shared statement values;
//! - [`benchmark`]: seeded construction of proportional-analogy datasets;
//! - [`eval`]: embedding-based analogy scoring, threshold search,
//!   cross-validation and score histograms;
//! - [`cli`]: the `analogion` command line front end.

pub mod benchmark;
pub mod cli;
pub mod error;
pub mod eval;
pub mod metrics;
pub mod miner;
pub mod probe;
pub mod store;
pub mod synth;
pub mod tsv;

pub use error::{Error, Result};
pub use store::{parse_edge_file, InstanceMode, NodeId, OntologyStore};
