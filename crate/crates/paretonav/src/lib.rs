//! Command line front end and HTTP session service over `paretonav-core`.

pub mod cli;
pub mod server;
