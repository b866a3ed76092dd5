use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock, RwLock};

use super::poly::Poly;
use crate::error::{Error, Result};

/// Role of a symbol. The derived order is the canonical monomial order:
/// coordinates first, then parameters, then generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub enum SymbolKind {
    Coordinate,
    Parameter,
    Generator,
}

/// Defining relation `r^index = base` of a radical generator.
#[derive(Debug, Clone)]
pub(crate) struct RadicalDef {
    pub base: Poly,
    pub index: u32,
}

#[derive(Debug)]
struct SymbolData {
    kind: SymbolKind,
    name: String,
    radical: Option<RadicalDef>,
}

/// Interned symbol. Two symbols with the same name are the same object.
#[derive(Clone)]
pub struct Symbol(Arc<SymbolData>);

fn table() -> &'static RwLock<HashMap<String, Symbol>> {
    static TABLE: OnceLock<RwLock<HashMap<String, Symbol>>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Symbol {
    fn intern(kind: SymbolKind, name: &str, radical: Option<RadicalDef>) -> Result<Symbol> {
        if let Some(s) = table().read().unwrap().get(name) {
            return if s.kind() == kind {
                Ok(s.clone())
            } else {
                Err(Error::UnknownSymbol(format!(
                    "{name} already declared as {:?}",
                    s.kind()
                )))
            };
        }
        let mut guard = table().write().unwrap();
        let entry = guard.entry(name.to_string()).or_insert_with(|| {
            Symbol(Arc::new(SymbolData {
                kind,
                name: name.to_string(),
                radical,
            }))
        });
        if entry.kind() != kind {
            return Err(Error::UnknownSymbol(format!(
                "{name} already declared as {:?}",
                entry.kind()
            )));
        }
        Ok(entry.clone())
    }

    pub fn coordinate(name: &str) -> Result<Symbol> {
        if !valid_identifier(name) {
            return Err(Error::UnknownSymbol(name.to_string()));
        }
        Self::intern(SymbolKind::Coordinate, name, None)
    }

    pub fn parameter(name: &str) -> Result<Symbol> {
        if !valid_identifier(name) {
            return Err(Error::UnknownSymbol(name.to_string()));
        }
        Self::intern(SymbolKind::Parameter, name, None)
    }

    /// Looks up an already declared symbol.
    pub fn lookup(name: &str) -> Option<Symbol> {
        table().read().unwrap().get(name).cloned()
    }

    pub(crate) fn radical(base: Poly, index: u32) -> Symbol {
        let shown = base.to_string();
        let name = match index {
            2 => format!("sqrt({shown})"),
            3 => format!("cbrt({shown})"),
            k => format!("({shown})^(1/{k})"),
        };
        Self::intern(SymbolKind::Generator, &name, Some(RadicalDef { base, index }))
            .expect("generator names cannot collide with identifiers")
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn kind(&self) -> SymbolKind {
        self.0.kind
    }

    pub fn is_coordinate(&self) -> bool {
        self.0.kind == SymbolKind::Coordinate
    }

    pub(crate) fn radical_def(&self) -> Option<&RadicalDef> {
        self.0.radical.as_ref()
    }
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl Eq for Symbol {}

impl Hash for Symbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.name.hash(state)
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0
            .kind
            .cmp(&other.0.kind)
            .then_with(|| self.0.name.cmp(&other.0.name))
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.name)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.name)
    }
}
