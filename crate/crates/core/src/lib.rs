//! Compiler core for the PINDAH data-retention language.
//!
//! A PINDAH program is a sequence of one-line transfer statements such as
//!
//! ```text
//! PINDAH SUMBER[scott/tiger@prod] TUJUAN[dw/dw@arch] TABEL[TRX] TGL_AWAL[2006] TGL_AKHIR[2011] METODE[QUERY]
//! ```
//!
//! The crate is `no_std` (it needs `alloc`) and performs no IO. It provides:
//!
//! - [`lexer`]: the ordered, table-driven scanner.
//! - [`parser`]: statement splitting and clause-shape checks.
//! - [`semantics`]: cardinality, defaults, date resolution and identity checks.
//! - [`codegen`]: the keyword mapping that produces `NEW_STATEMENT` text.
//! - [`backends`]: per-method transfer plans (SQL, loader control files, shell).
//! - [`advisor`]: method recommendation from a row-count estimate.
//! - [`simdb`]: an in-memory store and executor for dry runs.
//! - [`catalog`]: the error-code catalog, checked against the implementation.
//!
//! [`pipeline`] strings the front-end stages together.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod advisor;
pub mod backends;
pub mod catalog;
pub mod codegen;
pub mod diagnostic;
pub mod lexer;
pub mod parser;
pub mod pipeline;
pub mod semantics;
pub mod simdb;

pub use diagnostic::{Code, Diagnostic, Severity};
pub use semantics::{ConnSpec, Method, TransferSpec};
