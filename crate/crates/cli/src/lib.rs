//! Experiment harness for ex ante influence maximization: declarative run
//! specs, the observe -> predict -> select -> evaluate pipeline, a bundled
//! synthetic dataset generator, dataset statistics, and result emission.

pub mod output;
pub mod pipeline;
pub mod spec;
pub mod stats;
pub mod synthetic;

pub use pipeline::{run_experiment, run_sweep, ExperimentContext, ResultRecord};
pub use spec::{DatasetSource, ExperimentSpec, Hyperparameters, ImAlgorithm, Method};
pub use synthetic::SyntheticConfig;
