pub mod classical;
pub mod model;
pub mod seed;
pub mod verifier;
pub mod quantum;
pub mod report;
pub mod acceptance;
