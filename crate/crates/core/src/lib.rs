//! Reply-network construction, happiness scoring and assortativity
//! analysis for short-message corpora.

pub mod assortativity;
pub mod graph;
pub mod hedonometer;
pub mod ingest;
pub mod lexicon;
pub mod powerlaw;
pub mod rng;
pub mod stats;
pub mod zeta;
