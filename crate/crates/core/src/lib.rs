//! Cogrowth of finitely presented groups by Metropolis sampling of trivial words.

pub mod estimator;
pub mod io;
pub mod oracle;
pub mod presentation;
pub mod series;
pub mod walker;
pub mod words;
