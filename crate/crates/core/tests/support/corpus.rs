//! The bundled example models and stream bundles.

use std::path::{Path, PathBuf};

use arcauto::model::Model;
use arcauto::semantics::StreamBundle;
use arcauto::Frontend;

pub fn dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// Every corpus file with the files it must be loaded together with.
pub const MODELS: &[(&str, &[&str])] = &[
    ("bumpcontrol.maa", &[]),
    ("bumpspec.maa", &["bumpcontrol.maa"]),
    ("counter.maa", &[]),
    ("crossing.maa", &[]),
    ("pipeline.maa", &[]),
    ("slamrobot.maa", &["bumpcontrol.maa"]),
];

pub fn read(name: &str) -> String {
    std::fs::read_to_string(dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// `.maa` files present on disk, sorted.
pub fn files_on_disk() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir())
        .expect("corpus directory")
        .filter_map(|e| e.ok()?.file_name().into_string().ok())
        .filter(|n| n.ends_with(".maa"))
        .collect();
    names.sort();
    names
}

pub fn load(names: &[&str]) -> Model {
    let texts: Vec<(String, String)> = names.iter().map(|n| (n.to_string(), read(n))).collect();
    let files: Vec<(&str, &str)> = texts.iter().map(|(n, t)| (n.as_str(), t.as_str())).collect();
    match Frontend::from_sources(&files) {
        Ok(fe) => fe.model,
        Err(e) => {
            let lines: Vec<String> = e.diagnostics.iter().map(|d| d.render(&e.sources)).collect();
            panic!("{names:?} does not resolve:\n{}", lines.join("\n"))
        }
    }
}

/// A corpus file resolved together with its dependencies.
pub fn model(name: &str) -> Model {
    let (_, deps) = MODELS.iter().find(|(n, _)| *n == name).unwrap_or_else(|| panic!("unknown corpus file {name}"));
    let mut names: Vec<&str> = deps.to_vec();
    names.push(name);
    load(&names)
}

/// The first corpus model declaring `component`.
pub fn model_with(component: &str) -> Model {
    MODELS
        .iter()
        .map(|(n, _)| model(n))
        .find(|m| m.component_id(component).is_some())
        .unwrap_or_else(|| panic!("no corpus model declares {component}"))
}

/// Files needed for a root component, for command-line runs.
pub fn files_with(component: &str) -> Vec<PathBuf> {
    for (name, deps) in MODELS {
        if model(name).component_id(component).is_some() {
            return deps.iter().chain([name]).map(|n| dir().join(n)).collect();
        }
    }
    panic!("no corpus model declares {component}")
}

/// `(root component, case name, bundle)` for every `bundles/<Root>.<case>.json`.
pub fn bundles() -> Vec<(String, String, StreamBundle)> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir().join("bundles"))
        .expect("bundle directory")
        .filter_map(|e| Some(e.ok()?.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let stem = p.file_stem().unwrap().to_str().unwrap().to_string();
            let (root, case) = stem.split_once('.').expect("bundle names are <Root>.<case>.json");
            let text = std::fs::read_to_string(&p).unwrap();
            let bundle = StreamBundle::from_json(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            (root.to_string(), case.to_string(), bundle)
        })
        .collect()
}
