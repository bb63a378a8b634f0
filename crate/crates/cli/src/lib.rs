//! Command-line driver for the IMDS verifier and the robot route compiler.

pub mod diagram;
pub mod run;

pub use diagram::{render_sequence_diagram, DiagramEvent, Ending, SequenceDiagram};
pub use run::{
    check_system, generate_plans, load_spec, render_report, run, run_check, run_compile, run_generate, run_render,
    CheckConfig, CliError, CompileConfig, GenerateConfig, GenerateMode, Outcome, RenderConfig, ReportFormat, RunConfig,
    EXIT_ERROR, EXIT_HOLDS, EXIT_VIOLATED,
};
