use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

/// The four disjoint symbol sorts of a knowledge base.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NameKind {
    Concept,
    Role,
    Individual,
    Feature,
}

impl NameKind {
    pub const ALL: [NameKind; 4] = [
        NameKind::Concept,
        NameKind::Role,
        NameKind::Individual,
        NameKind::Feature,
    ];

    fn slot(self) -> usize {
        match self {
            NameKind::Concept => 0,
            NameKind::Role => 1,
            NameKind::Individual => 2,
            NameKind::Feature => 3,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            NameKind::Concept => "concept",
            NameKind::Role => "role",
            NameKind::Individual => "individual",
            NameKind::Feature => "feature",
        }
    }
}

impl fmt::Display for NameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// An interned symbol. Ordering is by kind first, so names of different
/// kinds never compare equal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name {
    kind: NameKind,
    id: u32,
}

impl Name {
    pub fn new(kind: NameKind, id: u32) -> Self {
        Name { kind, id }
    }

    pub fn kind(self) -> NameKind {
        self.kind
    }

    pub fn id(self) -> u32 {
        self.id
    }
}

/// Returns a name of `kind` that does not occur in `used`.
///
/// The result is one past the largest id of that kind in `used`, so it is
/// deterministic and feeding results back in yields distinct names.
pub fn fresh_name(kind: NameKind, used: &[Name]) -> Name {
    let next = used
        .iter()
        .filter(|n| n.kind == kind)
        .map(|n| n.id + 1)
        .max()
        .unwrap_or(0);
    Name::new(kind, next)
}

/// Label table for interned names. Ids are dense per kind.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolTable {
    labels: [Vec<String>; 4],
    index: HashMap<(NameKind, String), u32>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, kind: NameKind, label: &str) -> Name {
        if let Some(&id) = self.index.get(&(kind, label.to_string())) {
            return Name::new(kind, id);
        }
        let slot = &mut self.labels[kind.slot()];
        let id = slot.len() as u32;
        slot.push(label.to_string());
        self.index.insert((kind, label.to_string()), id);
        Name::new(kind, id)
    }

    pub fn lookup(&self, kind: NameKind, label: &str) -> Option<Name> {
        self.index
            .get(&(kind, label.to_string()))
            .map(|&id| Name::new(kind, id))
    }

    pub fn label(&self, name: Name) -> &str {
        self.labels[name.kind.slot()]
            .get(name.id as usize)
            .map(String::as_str)
            .unwrap_or("?")
    }

    pub fn contains(&self, name: Name) -> bool {
        (name.id as usize) < self.labels[name.kind.slot()].len()
    }

    pub fn names(&self, kind: NameKind) -> impl Iterator<Item = Name> + '_ {
        (0..self.labels[kind.slot()].len() as u32).map(move |id| Name::new(kind, id))
    }

    /// Interns a new name whose label starts with `prefix` and collides with
    /// no existing label of any kind.
    pub fn fresh(&mut self, kind: NameKind, prefix: &str) -> Name {
        let used: Vec<Name> = self.names(kind).collect();
        let name = fresh_name(kind, &used);
        let taken = |s: &str| NameKind::ALL.iter().any(|&k| self.lookup(k, s).is_some());
        let mut label = prefix.to_string();
        let mut n = 0usize;
        while taken(&label) {
            n += 1;
            label = format!("{prefix}{n}");
        }
        let interned = self.intern(kind, &label);
        debug_assert_eq!(interned, name);
        interned
    }
}
