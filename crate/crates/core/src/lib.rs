//! Exact verification of q-series identities and Bailey-pair relations.
//!
//! The building blocks are:
//!
//! * [`series`]: truncated Laurent series over the integers and q-Pochhammer symbols,
//! * [`partition`]: brute-force partition statistics used as an independent oracle,
//! * [`bailey`]: Bailey pairs, conjugate pairs, 2-fold pairs and their transforms,
//! * [`pairs`]: the concrete pairs the catalogue checks,
//! * [`catalogue`]: a registry of identities compiled to verification tasks,
//! * [`dsl`]: a small expression language and manifest format for stating identities.

pub mod bailey;
pub mod catalogue;
pub mod dsl;
pub mod pairs;
pub mod partition;
pub mod report;
pub mod series;

pub use bailey::{BaileyError, BaileyKernel, BaileyPair, ConjugatePair, Rho, TwoFoldPair};
pub use report::{Status, VerificationReport};
pub use series::{pochhammer, Count, QMonomial, QSeries, SeriesError};
