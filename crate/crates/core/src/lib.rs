pub mod critic;
pub mod edit;
pub mod geom;
pub mod ingest;
pub mod instantiate;
pub mod ldl;
pub mod pipeline;
pub mod preval;
pub mod prototype;
pub mod refine;
pub mod render;
pub mod sir;
