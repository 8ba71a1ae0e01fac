//! A compiler and analysis toolchain for component & connector architectures
//! whose atomic components embed I/O automata.
//!
//! The pipeline is
//!
//! 1. [`syntax::parse`] turns `.maa` text into a [`syntax::SyntaxTree`],
//! 2. [`resolve::resolve`] binds names into a [`model::Model`],
//! 3. [`check::check`] evaluates context conditions for a [`check::Profile`],
//! 4. then one of [`semantics::simulate`], [`refinement::refines`] or the
//!    [`codegen`] backends.
//!
//! [`Frontend`] bundles steps 1 and 2 for a set of files.
//!
//! ```
//! let src = "
//!     component Echo {
//!       port in Boolean i, out Boolean o;
//!       automaton {
//!         state s [initial];
//!         s -> s {i:true} / {o:true};
//!       }
//!     }";
//! let model = arcauto::Frontend::from_str(src).unwrap().model;
//! assert_eq!(model.components[0].name, "Echo");
//! ```

pub mod check;
pub mod codegen;
pub mod diag;
pub mod model;
pub mod refinement;
pub mod resolve;
pub mod semantics;
pub mod syntax;

use std::path::Path;

use diag::{has_errors, Diagnostic, SourceMap};
use model::Model;

/// Parsed and resolved sources.
#[derive(Debug)]
pub struct Frontend {
    pub model: Model,
    pub sources: SourceMap,
    /// Non-fatal findings (warnings) from parsing.
    pub warnings: Vec<Diagnostic>,
}

/// Failure to produce a model; diagnostics refer to files in `sources`.
#[derive(Debug)]
pub struct FrontendError {
    pub diagnostics: Vec<Diagnostic>,
    pub sources: SourceMap,
}

impl Frontend {
    /// Parses and resolves `(path, text)` pairs as one model.
    pub fn from_sources<P: AsRef<Path>>(files: &[(P, &str)]) -> Result<Frontend, FrontendError> {
        let mut sources = SourceMap::new();
        let mut trees = Vec::new();
        let mut diags = Vec::new();
        for (path, text) in files {
            let id = sources.add(path);
            let (tree, d) = syntax::parse(text, id);
            trees.push(tree);
            diags.extend(d);
        }
        if has_errors(&diags) {
            diag::sort_diagnostics(&mut diags);
            return Err(FrontendError { diagnostics: diags, sources });
        }
        match resolve::resolve(&trees) {
            Ok(model) => Ok(Frontend { model, sources, warnings: diags }),
            Err(d) => Err(FrontendError { diagnostics: d, sources }),
        }
    }

    /// Single in-memory source named `<input>`.
    #[allow(clippy::should_implement_trait)]
    pub fn from_str(text: &str) -> Result<Frontend, FrontendError> {
        Self::from_sources(&[("<input>", text)])
    }
}
