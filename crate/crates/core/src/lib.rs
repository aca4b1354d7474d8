pub mod bergman;
pub mod blaschke;
pub mod cli;
pub mod config;
pub mod continuation;
pub mod error;
pub mod mobius;
pub mod monodromy;
pub mod perm;
pub mod qd;
pub mod report;
pub mod roots;
pub mod thinprod;
