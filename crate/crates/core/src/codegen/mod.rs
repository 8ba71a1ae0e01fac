//! Template-based generation with three backends: executable Python
//! (`exec`), WS1S formulas for Mona (`mona`) and structural export (`graph`).
//!
//! Templates are data files under `templates/<backend>/<name>.tpl`; the
//! bundled set is compiled in and a directory with the same layout can
//! replace individual files. Calculators come from a
//! [`CalculatorRegistry`] whose shared part every backend consults.

mod calculators;
pub mod exec;
pub mod graph;
pub mod mona;
mod template;

use std::collections::BTreeMap;
use std::path::Path;

pub use calculators::{component_node, Calculator, CalculatorRegistry, Dialect, RegistryView, SHARED};
pub use template::{Context, Directive, Node, Renderer, Template, TemplateSet};

use crate::check::{check, Profile};
use crate::diag::{has_errors, Diagnostic};
use crate::model::{ComponentId, Model};
use crate::semantics::{CompletionMode, Interface};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CodegenError {
    #[error("model violates the {profile} profile ({} diagnostics)", diagnostics.len())]
    ProfileViolation { profile: &'static str, diagnostics: Vec<Diagnostic> },
    #[error("interfaces differ: {0}")]
    InterfaceMismatch(String),
    #[error("template `{template}`: {message}")]
    TemplateSyntax { template: String, message: String },
    #[error("template `{template}`, directive {index}: unknown calculator `{name}`")]
    UnknownCalculator { template: String, index: usize, name: String },
    #[error("template `{template}`, directive {index}: unknown template `{name}`")]
    UnknownTemplate { template: String, index: usize, name: String },
    #[error("template `{template}`, directive {index}: unknown path `{path}`")]
    UnknownPath { template: String, index: usize, path: String },
    #[error("calculator `{name}`: {message}")]
    Calculator { name: String, message: String },
    #[error("calculator `{0}` is registered both as shared and backend-specific")]
    DuplicateCalculator(String),
    #[error("name collision: {0}")]
    NameCollision(String),
    #[error("{0}")]
    Io(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Backend {
    Exec,
    Mona,
    Graph,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Exec, Backend::Mona, Backend::Graph];

    pub fn name(self) -> &'static str {
        match self {
            Backend::Exec => "exec",
            Backend::Mona => "mona",
            Backend::Graph => "graph",
        }
    }

    fn dialect(self) -> &'static dyn Dialect {
        match self {
            Backend::Exec => &exec::Python,
            Backend::Mona => &mona::Mona,
            Backend::Graph => &graph::Dot,
        }
    }
}

impl std::str::FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Backend::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| format!("unknown backend `{s}` (expected exec, mona or graph)"))
    }
}

/// One generated file, relative to the output directory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratedArtifact {
    pub path: String,
    pub content: String,
}

const BUNDLED: &[(Backend, &str, &str)] = &[
    (Backend::Exec, "atomic", include_str!("../../templates/exec/atomic.tpl")),
    (Backend::Exec, "composed", include_str!("../../templates/exec/composed.tpl")),
    (Backend::Exec, "transition", include_str!("../../templates/exec/transition.tpl")),
    (Backend::Exec, "datatypes", include_str!("../../templates/exec/datatypes.tpl")),
    (Backend::Exec, "main", include_str!("../../templates/exec/main.tpl")),
    (Backend::Mona, "file", include_str!("../../templates/mona/file.tpl")),
    (Backend::Mona, "predicate", include_str!("../../templates/mona/predicate.tpl")),
    (Backend::Graph, "architecture", include_str!("../../templates/graph/architecture.tpl")),
    (Backend::Graph, "automaton", include_str!("../../templates/graph/automaton.tpl")),
    (Backend::Graph, "edge", include_str!("../../templates/graph/edge.tpl")),
    (Backend::Graph, "model", include_str!("../../templates/graph/model.tpl")),
];

/// Options of the WS1S backend.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ws1sOptions {
    pub impl_mode: CompletionMode,
    pub spec_mode: CompletionMode,
}

impl Default for Ws1sOptions {
    fn default() -> Self {
        Ws1sOptions { impl_mode: CompletionMode::EpsilonSelfLoop, spec_mode: CompletionMode::Chaos }
    }
}

/// Templates and calculators of all backends.
#[derive(Clone, Debug)]
pub struct Generator {
    pub registry: CalculatorRegistry,
    pub templates: BTreeMap<Backend, TemplateSet>,
}

impl Default for Generator {
    fn default() -> Self {
        Self::bundled()
    }
}

impl Generator {
    /// The templates shipped with the crate and the default registry.
    pub fn bundled() -> Generator {
        let mut templates: BTreeMap<Backend, TemplateSet> = BTreeMap::new();
        for (backend, name, text) in BUNDLED {
            let t = Template::parse(name, text).expect("bundled templates parse");
            templates.entry(*backend).or_default().insert(t);
        }
        Generator { registry: CalculatorRegistry::default(), templates }
    }

    /// Replaces bundled templates by `<dir>/<backend>/<name>.tpl` files
    /// where present; other `.tpl` files are added.
    pub fn with_template_dir(mut self, dir: &Path) -> Result<Generator, CodegenError> {
        for backend in Backend::ALL {
            let sub = dir.join(backend.name());
            let Ok(entries) = std::fs::read_dir(&sub) else { continue };
            let mut paths: Vec<_> = entries.filter_map(|e| e.ok().map(|e| e.path())).collect();
            paths.sort();
            for path in paths.into_iter().filter(|p| p.extension().is_some_and(|e| e == "tpl")) {
                let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
                let text = std::fs::read_to_string(&path).map_err(|e| CodegenError::Io(format!("{}: {e}", path.display())))?;
                self.templates.entry(backend).or_default().insert(Template::parse(&name, &text)?);
            }
        }
        Ok(self)
    }

    /// Renders `template` of `backend` over `node`.
    pub fn render(&self, model: &Model, backend: Backend, template: &str, node: &Node) -> Result<String, CodegenError> {
        let empty = TemplateSet::default();
        let view = self.registry.view(backend)?;
        let r = Renderer {
            model,
            templates: self.templates.get(&backend).unwrap_or(&empty),
            calculators: &view,
            dialect: backend.dialect(),
        };
        r.render(template, node)
    }

    pub fn emit_exec(&self, model: &Model) -> Result<Vec<GeneratedArtifact>, CodegenError> {
        let diags = check(model, &Profile::executable());
        if has_errors(&diags) {
            return Err(CodegenError::ProfileViolation { profile: "executable", diagnostics: diags });
        }
        exec::check_names(model)?;
        let mut out = Vec::new();
        for id in (0..model.components.len()).map(ComponentId) {
            let c = model.component(id);
            let template = if c.is_atomic() { "atomic" } else { "composed" };
            out.push(GeneratedArtifact {
                path: format!("exec/{}.py", c.name),
                content: self.render(model, Backend::Exec, template, &component_node(model, id))?,
            });
        }
        let root = model_node(model);
        out.push(GeneratedArtifact {
            path: "exec/datatypes.py".into(),
            content: self.render(model, Backend::Exec, "datatypes", &root)?,
        });
        out.push(GeneratedArtifact { path: "exec/main.py".into(), content: self.render(model, Backend::Exec, "main", &root)? });
        out.sort_by(|a, b| a.path.cmp(&b.path));
        Ok(out)
    }

    /// The WS1S predicate of `implementation`; with `spec`, also the
    /// predicate of `spec` and the refinement formula between them.
    pub fn emit_ws1s(
        &self,
        model: &Model,
        implementation: ComponentId,
        spec: Option<ComponentId>,
        options: &Ws1sOptions,
    ) -> Result<GeneratedArtifact, CodegenError> {
        let targets: Vec<ComponentId> = std::iter::once(implementation).chain(spec).collect();
        let diags = check(model, &Profile::analysis().with_targets(targets));
        if has_errors(&diags) {
            return Err(CodegenError::ProfileViolation { profile: "analysis", diagnostics: diags });
        }
        let with_mode = |id: ComponentId, mode: CompletionMode| match component_node(model, id) {
            Node::Map(mut m) => {
                m.insert("mode".into(), Node::str(mona::mode_name(mode)));
                Node::Map(m)
            }
            other => other,
        };
        let mut file = BTreeMap::from([("impl".to_string(), with_mode(implementation, options.impl_mode))]);
        if let Some(spec) = spec {
            let (a, b) = (Interface::of(model, implementation), Interface::of(model, spec));
            if !a.matches(&b) {
                return Err(CodegenError::InterfaceMismatch(format!(
                    "`{}` and `{}` must declare the same ports in the same order",
                    model.component(implementation).name,
                    model.component(spec).name
                )));
            }
            if spec == implementation {
                return Err(CodegenError::NameCollision(format!(
                    "`{}` cannot be checked against itself in one WS1S file",
                    model.component(spec).name
                )));
            }
            file.insert("spec".into(), with_mode(spec, options.spec_mode));
        }
        Ok(GeneratedArtifact {
            path: format!("mona/{}.mona", model.component(implementation).name),
            content: self.render(model, Backend::Mona, "file", &Node::Map(file))?,
        })
    }

    pub fn emit_graph(&self, model: &Model) -> Result<Vec<GeneratedArtifact>, CodegenError> {
        let mut out = Vec::new();
        for id in (0..model.components.len()).map(ComponentId) {
            let c = model.component(id);
            let template = if c.is_atomic() { "automaton" } else { "architecture" };
            out.push(GeneratedArtifact {
                path: format!("graph/{}.dot", c.name),
                content: self.render(model, Backend::Graph, template, &component_node(model, id))?,
            });
        }
        if !model.components.is_empty() || !model.types.is_empty() {
            out.push(GeneratedArtifact {
                path: "graph/model.json".into(),
                content: self.render(model, Backend::Graph, "model", &model_node(model))?,
            });
        }
        out.sort_by(|a, b| a.path.cmp(&b.path));
        Ok(out)
    }
}

/// The node of a whole model: its components.
pub fn model_node(model: &Model) -> Node {
    Node::map([(
        "components",
        Node::List((0..model.components.len()).map(|i| component_node(model, ComponentId(i))).collect()),
    )])
}

pub fn emit_exec(model: &Model) -> Result<Vec<GeneratedArtifact>, CodegenError> {
    Generator::bundled().emit_exec(model)
}

pub fn emit_ws1s(
    model: &Model,
    implementation: ComponentId,
    spec: Option<ComponentId>,
    options: &Ws1sOptions,
) -> Result<GeneratedArtifact, CodegenError> {
    Generator::bundled().emit_ws1s(model, implementation, spec, options)
}

pub fn emit_graph(model: &Model) -> Result<Vec<GeneratedArtifact>, CodegenError> {
    Generator::bundled().emit_graph(model)
}

/// Writes artifacts below `dir`, creating directories as needed.
pub fn write_artifacts(dir: &Path, artifacts: &[GeneratedArtifact]) -> Result<(), CodegenError> {
    for a in artifacts {
        let path = dir.join(&a.path);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| CodegenError::Io(format!("{}: {e}", parent.display())))?;
        }
        std::fs::write(&path, &a.content).map_err(|e| CodegenError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}
