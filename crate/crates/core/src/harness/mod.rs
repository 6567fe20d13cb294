//! Verification harness: claim checks over computed spectra and the suites
//! that schedule them.

pub mod claims;
pub mod suite;

pub use claims::*;
pub use suite::{ClaimDescriptor, ClaimSuite, SpectraCache, SuiteContext, CLAIM_SETS};
