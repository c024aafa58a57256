use crate::kb::{Concept, Constraint, KnowledgeBase, Name, NameKind};

pub fn print_concept(kb: &KnowledgeBase, c: &Concept) -> String {
    print_concept_with(c, &|n| kb.label(n).to_string())
}

pub fn print_concept_with(c: &Concept, label: &dyn Fn(Name) -> String) -> String {
    let mut out = String::new();
    write_concept(c, label, &mut out);
    out
}

fn write_concept(c: &Concept, label: &dyn Fn(Name) -> String, out: &mut String) {
    match c {
        Concept::Top => out.push_str("top"),
        Concept::Bottom => out.push_str("bot"),
        Concept::Atomic(n) => out.push_str(&label(*n)),
        Concept::Nominal(n) => {
            out.push('{');
            out.push_str(&label(*n));
            out.push('}');
        }
        Concept::Conj(..) => {
            // Only the left spine is flattened, matching left-associative
            // desugaring on input.
            let mut parts = Vec::new();
            let mut cur = c;
            while let Concept::Conj(l, r) = cur {
                parts.push(&**r);
                cur = l;
            }
            parts.push(cur);
            parts.reverse();
            out.push('(');
            for (i, p) in parts.into_iter().enumerate() {
                if i > 0 {
                    out.push_str(" and ");
                }
                write_concept(p, label, out);
            }
            out.push(')');
        }
        Concept::Exists(r, f) => {
            out.push_str("(exists ");
            out.push_str(&label(*r));
            out.push_str(" . ");
            write_concept(f, label, out);
            out.push(')');
        }
        Concept::Pred(atom) => {
            let fs: Vec<String> = atom.features.iter().map(|f| label(*f)).collect();
            out.push_str(&format!("{}({})", atom.predicate, fs.join(", ")));
        }
    }
}

pub fn print_constraint(kb: &KnowledgeBase, c: &Constraint) -> String {
    print_constraint_with(c, &|n| kb.label(n).to_string())
}

pub fn print_constraint_with(c: &Constraint, label: &dyn Fn(Name) -> String) -> String {
    match c {
        Constraint::Gci { lhs, rhs } => format!(
            "{} <= {}",
            print_concept_with(lhs, label),
            print_concept_with(rhs, label)
        ),
        Constraint::RoleInclusion { chain, sup } => {
            let chain: Vec<String> = chain.iter().map(|r| label(*r)).collect();
            format!("{} <= {}", chain.join(" o "), label(*sup))
        }
    }
}

/// The whole knowledge base in the text format: one declaration line per
/// non-empty inventory (names in interning order), then one axiom per line.
pub fn print_kb(kb: &KnowledgeBase) -> String {
    let mut out = String::new();
    for kind in NameKind::ALL {
        let names = kb.inventory(kind);
        if names.is_empty() {
            continue;
        }
        out.push_str(kind.keyword());
        for &n in names {
            out.push(' ');
            out.push_str(kb.label(n));
        }
        out.push('\n');
    }
    for c in &kb.constraints {
        out.push_str("axiom ");
        out.push_str(&print_constraint(kb, c));
        out.push('\n');
    }
    out
}
