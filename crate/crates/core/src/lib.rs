pub mod eval;
pub mod graph;
pub mod ingest;
pub mod io;
pub mod pipeline;
pub mod semantic;
pub mod supervision;
pub mod syntactic;
