//! Semi-supervised detection of smell experiences in literary text.
//!
//! The crate covers the whole pipeline: tagged corpus ingestion
//! ([`corpus`]), the lexico-syntactic pattern language ([`pattern`]) and
//! its matcher ([`matcher`]), lexicon bootstrapping with a human validation
//! loop ([`lexicon`], [`bootstrap`]), evaluation against a gold standard
//! ([`eval`]), and the HTTP review service ([`service`]) and CLI ([`cli`]).

pub mod bootstrap;
pub mod cli;
pub mod corpus;
pub mod eval;
pub mod lexicon;
pub mod matcher;
pub mod pattern;
pub mod service;
