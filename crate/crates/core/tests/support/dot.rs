//! A minimal checker for the DOT subset the graph backend emits:
//! `digraph ID { stmt* }` with node, edge, default-attribute and
//! `key=value` statements.

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Id(String),
    Sym(&'static str),
}

fn lex(text: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err("unterminated string".into()),
                    Some('"') => break,
                    Some('\\') => {
                        let escaped = *chars.get(i + 1).ok_or("dangling escape")?;
                        s.push(escaped);
                        i += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            i += 1;
            toks.push(Tok::Id(s));
        } else if c.is_ascii_alphanumeric() || c == '_' || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '.') {
                i += 1;
            }
            toks.push(Tok::Id(chars[start..i].iter().collect()));
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            toks.push(Tok::Sym("->"));
            i += 2;
        } else {
            let sym = ["{", "}", "[", "]", "=", ";", ","]
                .into_iter()
                .find(|s| s.starts_with(c))
                .ok_or_else(|| format!("unexpected character `{c}`"))?;
            toks.push(Tok::Sym(sym));
            i += 1;
        }
    }
    Ok(toks)
}

/// Nodes and edges of a checked graph; attributes as `(key, value)`.
#[derive(Clone, Debug, Default)]
pub struct Graph {
    pub name: String,
    pub nodes: Vec<(String, Vec<(String, String)>)>,
    pub edges: Vec<(String, String, Vec<(String, String)>)>,
}

pub fn check(text: &str) -> Result<Graph, String> {
    let toks = lex(text)?;
    let mut pos = 0;
    let mut next = |expect: &str| -> Result<Tok, String> {
        let t = toks.get(pos).cloned().ok_or_else(|| format!("expected {expect}, found end of input"))?;
        pos += 1;
        Ok(t)
    };
    let id = |t: Tok| match t {
        Tok::Id(s) => Ok(s),
        other => Err(format!("expected an identifier, found {other:?}")),
    };
    if next("digraph")? != Tok::Id("digraph".into()) {
        return Err("graph must start with `digraph`".into());
    }
    let mut g = Graph { name: id(next("graph name")?)?, ..Graph::default() };
    if next("{")? != Tok::Sym("{") {
        return Err("expected `{`".into());
    }
    loop {
        let first = next("statement")?;
        if first == Tok::Sym("}") {
            break;
        }
        let a = id(first)?;
        let mut t = next("`;`")?;
        let mut edge_to = None;
        if t == Tok::Sym("=") {
            id(next("value")?)?;
            t = next("`;`")?;
            if t != Tok::Sym(";") {
                return Err(format!("expected `;` after `{a}=...`"));
            }
            continue;
        }
        if t == Tok::Sym("->") {
            edge_to = Some(id(next("edge target")?)?);
            t = next("`;`")?;
        }
        let mut attrs = Vec::new();
        if t == Tok::Sym("[") {
            loop {
                let k = id(next("attribute")?)?;
                if next("`=`")? != Tok::Sym("=") {
                    return Err(format!("attribute `{k}` without value"));
                }
                attrs.push((k, id(next("attribute value")?)?));
                match next("`]`")? {
                    Tok::Sym("]") => break,
                    Tok::Sym(",") | Tok::Sym(";") => {}
                    other => return Err(format!("unexpected {other:?} in attribute list")),
                }
            }
            t = next("`;`")?;
        }
        if t != Tok::Sym(";") {
            return Err(format!("statement on `{a}` must end with `;`"));
        }
        match edge_to {
            Some(b) => g.edges.push((a, b, attrs)),
            None if ["node", "edge", "graph"].contains(&a.as_str()) => {}
            None => g.nodes.push((a, attrs)),
        }
    }
    if pos != toks.len() {
        return Err("trailing input after the closing `}`".into());
    }
    for (a, b, _) in &g.edges {
        for end in [a, b] {
            if !g.nodes.iter().any(|(n, _)| n == end) {
                return Err(format!("edge end `{end}` is not a declared node"));
            }
        }
    }
    Ok(g)
}
