//! Code generation from verified programs through a skill manifest.
//!
//! The manifest binds each keyword to a function of some module in the
//! target runtime. Generation walks the statements in order and emits one
//! call per statement, preceded by the imports the program actually uses.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

use crate::diagnostics::Diagnostic;
use crate::parser::{check, VerifiedProgram};
use crate::syntax::{Command, ParamKind, StatementKind};

pub const DEFAULT_MANIFEST: &str = include_str!("../assets/default_manifest.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkillBinding {
    pub keyword: Command,
    pub module_path: String,
    pub function_name: String,
    pub param_schema: Vec<ParamKind>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkillManifest {
    bindings: BTreeMap<Command, SkillBinding>,
    preamble: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ManifestError {
    #[error("malformed manifest: {0}")]
    Malformed(String),
    #[error("unknown keyword `{0}` in manifest")]
    UnknownKeyword(String),
    #[error("keyword `{0}` is bound more than once")]
    DuplicateKeyword(String),
    #[error("manifest has no binding for: {}", .0.join(", "))]
    MissingKeywords(Vec<String>),
    #[error("binding for `{keyword}` takes ({found}) but the statement takes ({expected})")]
    SchemaMismatch { keyword: String, expected: String, found: String },
    #[error("binding for `{0}` has an empty module or function name")]
    EmptyName(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenerateError {
    #[error("program has {} diagnostic(s); only verified programs can be compiled", .0.len())]
    Unverified(Vec<Diagnostic>),
    #[error("no binding for `{0}`")]
    MissingBinding(Command),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    #[serde(default)]
    preamble: Vec<String>,
    bindings: RawBindings,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBinding {
    module: String,
    function: String,
    params: Vec<ParamKind>,
}

/// Keeps duplicate keys, which `serde_json` maps would silently collapse.
struct RawBindings(Vec<(String, RawBinding)>);

impl<'de> Deserialize<'de> for RawBindings {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct EntriesVisitor;
        impl<'de> Visitor<'de> for EntriesVisitor {
            type Value = RawBindings;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an object of keyword bindings")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<RawBindings, A::Error> {
                let mut entries = Vec::new();
                while let Some(entry) = map.next_entry::<String, RawBinding>()? {
                    entries.push(entry);
                }
                Ok(RawBindings(entries))
            }
        }
        d.deserialize_map(EntriesVisitor)
    }
}

fn schema_text(schema: &[ParamKind]) -> String {
    schema.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

pub fn load_manifest(text: &str) -> Result<SkillManifest, ManifestError> {
    let raw: RawManifest =
        serde_json::from_str(text).map_err(|e| ManifestError::Malformed(e.to_string()))?;

    let mut bindings = BTreeMap::new();
    for (keyword, b) in raw.bindings.0 {
        let cmd = Command::from_keyword(&keyword)
            .ok_or_else(|| ManifestError::UnknownKeyword(keyword.clone()))?;
        if bindings.contains_key(&cmd) {
            return Err(ManifestError::DuplicateKeyword(keyword));
        }
        if b.params != cmd.params() {
            return Err(ManifestError::SchemaMismatch {
                keyword,
                expected: schema_text(cmd.params()),
                found: schema_text(&b.params),
            });
        }
        if b.module.trim().is_empty() || b.function.trim().is_empty() {
            return Err(ManifestError::EmptyName(keyword));
        }
        bindings.insert(
            cmd,
            SkillBinding {
                keyword: cmd,
                module_path: b.module,
                function_name: b.function,
                param_schema: b.params,
            },
        );
    }

    let missing: Vec<String> = Command::ALL
        .into_iter()
        .filter(|c| !bindings.contains_key(c))
        .map(|c| c.keyword().to_owned())
        .collect();
    if !missing.is_empty() {
        return Err(ManifestError::MissingKeywords(missing));
    }

    Ok(SkillManifest { bindings, preamble: raw.preamble })
}

impl SkillManifest {
    pub fn default_manifest() -> SkillManifest {
        load_manifest(DEFAULT_MANIFEST).expect("bundled manifest is valid")
    }

    pub fn binding(&self, cmd: Command) -> Option<&SkillBinding> {
        self.bindings.get(&cmd)
    }

    pub fn bindings(&self) -> impl Iterator<Item = &SkillBinding> {
        self.bindings.values()
    }

    pub fn preamble(&self) -> &[String] {
        &self.preamble
    }
}

impl Default for SkillManifest {
    fn default() -> Self {
        SkillManifest::default_manifest()
    }
}

fn call_arguments(kind: &StatementKind) -> Vec<String> {
    match kind {
        StatementKind::Perceive => Vec::new(),
        StatementKind::GoTo { x, y } => vec![x.raw().to_owned(), y.raw().to_owned()],
        StatementKind::Approach { object } | StatementKind::Grasp { object } => {
            vec![format!("\"{object}\"")]
        }
        other => vec![other.magnitude().expect("motion statement").raw().to_owned()],
    }
}

/// Emits control source for `program`: manifest preamble, one import line
/// per used module, a blank line, then one call per statement.
pub fn generate(program: &VerifiedProgram, manifest: &SkillManifest) -> Result<String, GenerateError> {
    let mut imports: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    let mut calls = Vec::with_capacity(program.len());
    for kind in program.kinds() {
        let binding = manifest
            .binding(kind.command())
            .ok_or(GenerateError::MissingBinding(kind.command()))?;
        imports
            .entry(&binding.module_path)
            .or_default()
            .insert(&binding.function_name);
        calls.push(format!("{}({})", binding.function_name, call_arguments(kind).join(", ")));
    }

    let mut out = String::new();
    for line in &manifest.preamble {
        out.push_str(line);
        out.push('\n');
    }
    for (module, functions) in &imports {
        let names: Vec<&str> = functions.iter().copied().collect();
        out.push_str(&format!("from {module} import {}\n", names.join(", ")));
    }
    if !calls.is_empty() {
        out.push('\n');
        for call in calls {
            out.push_str(&call);
            out.push('\n');
        }
    }
    Ok(out)
}

/// Checks `source` and generates code only if it verifies.
pub fn compile(source: &str, manifest: &SkillManifest) -> Result<String, GenerateError> {
    let verified = check(source)
        .into_verified()
        .map_err(|outcome| GenerateError::Unverified(outcome.diagnostics))?;
    generate(&verified, manifest)
}
