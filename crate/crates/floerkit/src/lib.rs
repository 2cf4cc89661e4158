pub mod algebra;
pub mod bordism;
pub mod cat;
pub mod config;
pub mod repvar;
pub mod relcat;
pub mod report;
pub mod fieldfun;
pub mod quilt;
