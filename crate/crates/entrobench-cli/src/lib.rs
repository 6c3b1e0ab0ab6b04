//! Library surface of the batch front end; the `entrobench` binary is a
//! thin argument-parsing wrapper around these modules.

pub mod config;
pub mod csvio;
pub mod errors;
pub mod fitcmd;
pub mod plotcmd;
pub mod svg;
pub mod sweep;
