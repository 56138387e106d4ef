//! File formats, the command line and the HTTP service for `addkit-core`.
//!
//! [`files`] reads and writes the JSON model documents, [`graphdoc`] the
//! flat description of a composed diagram, [`pipeline`] holds the compose,
//! classify and emit steps that [`cli`] and [`service`] share.

pub mod cli;
pub mod files;
pub mod graphdoc;
pub mod pipeline;
pub mod service;
