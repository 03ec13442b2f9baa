pub mod check;
pub mod experiment;
pub mod io;
pub mod report;
