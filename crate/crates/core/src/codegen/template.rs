//! A small directive language for code templates.
//!
//! ```text
//! ${path.to.value}                      interpolation
//! <#if calculator> .. <#else> .. </#if>  branch on a calculator's result
//! <#foreach x in path> .. </#foreach>    iteration, `x` shadows outer names
//! <#include "template" path>            render another template over a node
//! <#calc calculator>                    run a calculator for its values
//! <#-- comment -->
//! ```
//!
//! A line holding nothing but directive tags and whitespace produces no
//! output of its own, so directives can sit on separate lines.

use std::collections::BTreeMap;

use super::calculators::{Dialect, RegistryView};
use super::CodegenError;
use crate::model::Model;

/// A value visible to templates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Str(String),
    Bool(bool),
    List(Vec<Node>),
    Map(BTreeMap<String, Node>),
}

impl Node {
    pub fn map<K: Into<String>>(entries: impl IntoIterator<Item = (K, Node)>) -> Node {
        Node::Map(entries.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    pub fn str(s: impl Into<String>) -> Node {
        Node::Str(s.into())
    }

    pub fn get(&self, key: &str) -> Option<&Node> {
        match self {
            Node::Map(m) => m.get(key),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Node::Str(s) => Some(s),
            _ => None,
        }
    }

    /// Index stored as a decimal string under `key`.
    pub fn index(&self, key: &str) -> Option<usize> {
        self.get(key)?.as_str()?.parse().ok()
    }

    fn text(&self) -> Option<String> {
        match self {
            Node::Str(s) => Some(s.clone()),
            Node::Bool(b) => Some(b.to_string()),
            Node::List(_) | Node::Map(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Directive {
    Text(String),
    Interp { index: usize, path: String },
    If { index: usize, calculator: String, then: Vec<Directive>, otherwise: Vec<Directive> },
    Foreach { index: usize, var: String, path: String, body: Vec<Directive> },
    Include { index: usize, template: String, path: String },
    Calc { index: usize, calculator: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Template {
    pub name: String,
    pub body: Vec<Directive>,
}

#[derive(Debug)]
enum Tag {
    Text(String),
    Interp(String),
    If(String),
    Else,
    EndIf,
    Foreach(String, String),
    EndForeach,
    Include(String, String),
    Calc(String),
}

impl Template {
    pub fn parse(name: &str, source: &str) -> Result<Template, CodegenError> {
        let err = |message: String| CodegenError::TemplateSyntax { template: name.to_string(), message };
        let tags = tokenize(source).map_err(err)?;
        let mut counter = 0;
        let mut iter = tags.into_iter();
        let (body, end) = build(&mut iter, &mut counter).map_err(err)?;
        match end {
            None => Ok(Template { name: name.to_string(), body }),
            Some(tag) => Err(err(format!("unexpected {tag:?}"))),
        }
    }
}

fn tokenize(source: &str) -> Result<Vec<Tag>, String> {
    let mut tags = Vec::new();
    for line in source.split_inclusive('\n') {
        let mut line_tags = Vec::new();
        let mut comment = false;
        let mut rest = line;
        while !rest.is_empty() {
            let next = [rest.find("${"), rest.find("<#"), rest.find("</#")].into_iter().flatten().min();
            let Some(at) = next else {
                line_tags.push(Tag::Text(rest.to_string()));
                break;
            };
            if at > 0 {
                line_tags.push(Tag::Text(rest[..at].to_string()));
            }
            rest = &rest[at..];
            if let Some(body) = rest.strip_prefix("${") {
                let end = body.find('}').ok_or("unterminated `${`")?;
                line_tags.push(Tag::Interp(body[..end].trim().to_string()));
                rest = &body[end + 1..];
            } else if let Some(body) = rest.strip_prefix("<#--") {
                let end = body.find("-->").ok_or("unterminated comment")?;
                rest = &body[end + 3..];
                comment = true;
            } else {
                let end = rest.find('>').ok_or("unterminated directive")?;
                let inner = &rest[..end];
                rest = &rest[end + 1..];
                line_tags.push(directive(inner)?);
            }
        }
        let only_directives = (comment || line_tags.iter().any(|t| !matches!(t, Tag::Text(_) | Tag::Interp(_))))
            && line_tags.iter().all(|t| match t {
                Tag::Text(s) => s.trim().is_empty(),
                Tag::Interp(_) => false,
                _ => true,
            });
        if only_directives {
            tags.extend(line_tags.into_iter().filter(|t| !matches!(t, Tag::Text(_))));
        } else {
            tags.extend(line_tags);
        }
    }
    Ok(tags)
}

fn directive(inner: &str) -> Result<Tag, String> {
    let words: Vec<&str> = inner.trim_start_matches('<').split_whitespace().collect();
    let arg = |i: usize| words.get(i).map(|s| s.to_string()).ok_or_else(|| format!("incomplete directive `{inner}>`"));
    match words.first().copied() {
        Some("#if") => Ok(Tag::If(arg(1)?)),
        Some("#else") => Ok(Tag::Else),
        Some("/#if") => Ok(Tag::EndIf),
        Some("#foreach") if words.get(2) == Some(&"in") => Ok(Tag::Foreach(arg(1)?, arg(3)?)),
        Some("/#foreach") => Ok(Tag::EndForeach),
        Some("#include") => {
            let name = arg(1)?;
            let name = name.strip_prefix('"').and_then(|n| n.strip_suffix('"')).ok_or("template name must be quoted")?;
            Ok(Tag::Include(name.to_string(), arg(2)?))
        }
        Some("#calc") => Ok(Tag::Calc(arg(1)?)),
        _ => Err(format!("unknown directive `{inner}>`")),
    }
}

/// Builds directives up to the next closing tag, which is returned.
fn build(tags: &mut impl Iterator<Item = Tag>, counter: &mut usize) -> Result<(Vec<Directive>, Option<Tag>), String> {
    let mut out = Vec::new();
    while let Some(tag) = tags.next() {
        match tag {
            Tag::Text(s) => match out.last_mut() {
                Some(Directive::Text(prev)) => prev.push_str(&s),
                _ => out.push(Directive::Text(s)),
            },
            Tag::Interp(path) => out.push(Directive::Interp { index: bump(counter), path }),
            Tag::Calc(calculator) => out.push(Directive::Calc { index: bump(counter), calculator }),
            Tag::Include(template, path) => out.push(Directive::Include { index: bump(counter), template, path }),
            Tag::If(calculator) => {
                let index = bump(counter);
                let (then, end) = build(tags, counter)?;
                let otherwise = match end {
                    Some(Tag::Else) => match build(tags, counter)? {
                        (body, Some(Tag::EndIf)) => body,
                        _ => return Err("`<#else>` without `</#if>`".into()),
                    },
                    Some(Tag::EndIf) => Vec::new(),
                    _ => return Err(format!("`<#if {calculator}>` without `</#if>`")),
                };
                out.push(Directive::If { index, calculator, then, otherwise });
            }
            Tag::Foreach(var, path) => {
                let index = bump(counter);
                match build(tags, counter)? {
                    (body, Some(Tag::EndForeach)) => out.push(Directive::Foreach { index, var, path, body }),
                    _ => return Err(format!("`<#foreach {var} in {path}>` without `</#foreach>`")),
                }
            }
            closing @ (Tag::Else | Tag::EndIf | Tag::EndForeach) => return Ok((out, Some(closing))),
        }
    }
    Ok((out, None))
}

fn bump(counter: &mut usize) -> usize {
    *counter += 1;
    *counter - 1
}

/// Named templates of one backend.
#[derive(Clone, Debug, Default)]
pub struct TemplateSet {
    templates: BTreeMap<String, Template>,
}

impl TemplateSet {
    pub fn insert(&mut self, t: Template) {
        self.templates.insert(t.name.clone(), t);
    }

    pub fn get(&self, name: &str) -> Option<&Template> {
        self.templates.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.templates.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }
}

/// Everything a render needs besides the node.
pub struct Renderer<'a> {
    pub model: &'a Model,
    pub templates: &'a TemplateSet,
    pub calculators: &'a RegistryView<'a>,
    pub dialect: &'a dyn Dialect,
}

/// Values stored by calculators during one render.
#[derive(Debug, Default)]
pub struct Context {
    pub values: BTreeMap<String, Node>,
}

impl Context {
    pub fn set(&mut self, key: &str, value: Node) {
        self.values.insert(key.to_string(), value);
    }
}

impl Renderer<'_> {
    pub fn render(&self, template: &str, node: &Node) -> Result<String, CodegenError> {
        let t = self.templates.get(template).ok_or_else(|| CodegenError::UnknownTemplate {
            template: "<root>".into(),
            index: 0,
            name: template.to_string(),
        })?;
        let mut out = String::new();
        let mut ctx = Context::default();
        self.render_body(t, &t.body, node, &mut ctx, &mut Vec::new(), &mut out)?;
        Ok(out)
    }

    fn lookup(&self, path: &str, node: &Node, ctx: &Context, scopes: &[(String, Node)]) -> Option<Node> {
        let mut parts = path.split('.');
        let head = parts.next()?;
        let mut current = scopes
            .iter()
            .rev()
            .find(|(k, _)| k == head)
            .map(|(_, v)| v)
            .or_else(|| ctx.values.get(head))
            .or_else(|| node.get(head))?;
        for p in parts {
            current = current.get(p)?;
        }
        Some(current.clone())
    }

    fn calc(&self, t: &Template, index: usize, name: &str, node: &Node, ctx: &mut Context) -> Result<bool, CodegenError> {
        let calc = self.calculators.get(name).ok_or_else(|| CodegenError::UnknownCalculator {
            template: t.name.clone(),
            index,
            name: name.to_string(),
        })?;
        calc(self.model, node, ctx, self.dialect)
    }

    fn render_body(
        &self,
        t: &Template,
        body: &[Directive],
        node: &Node,
        ctx: &mut Context,
        scopes: &mut Vec<(String, Node)>,
        out: &mut String,
    ) -> Result<(), CodegenError> {
        let unknown_path = |index: usize, path: &str| CodegenError::UnknownPath {
            template: t.name.clone(),
            index,
            path: path.to_string(),
        };
        for d in body {
            match d {
                Directive::Text(s) => out.push_str(s),
                Directive::Interp { index, path } => {
                    let v = self.lookup(path, node, ctx, scopes).ok_or_else(|| unknown_path(*index, path))?;
                    out.push_str(&v.text().ok_or_else(|| unknown_path(*index, path))?);
                }
                Directive::Calc { index, calculator } => {
                    self.calc(t, *index, calculator, node, ctx)?;
                }
                Directive::If { index, calculator, then, otherwise } => {
                    let branch = if self.calc(t, *index, calculator, node, ctx)? { then } else { otherwise };
                    self.render_body(t, branch, node, ctx, scopes, out)?;
                }
                Directive::Foreach { index, var, path, body } => {
                    let Some(Node::List(items)) = self.lookup(path, node, ctx, scopes) else {
                        return Err(unknown_path(*index, path));
                    };
                    for item in items {
                        scopes.push((var.clone(), item));
                        let r = self.render_body(t, body, node, ctx, scopes, out);
                        scopes.pop();
                        r?;
                    }
                }
                Directive::Include { index, template, path } => {
                    let arg = self.lookup(path, node, ctx, scopes).ok_or_else(|| unknown_path(*index, path))?;
                    let inner = self.templates.get(template).ok_or_else(|| CodegenError::UnknownTemplate {
                        template: t.name.clone(),
                        index: *index,
                        name: template.clone(),
                    })?;
                    let mut inner_ctx = Context::default();
                    self.render_body(inner, &inner.body, &arg, &mut inner_ctx, &mut Vec::new(), out)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directive_only_lines_vanish() {
        let t = Template::parse("t", "a\n  <#foreach x in xs>\n${x},\n  </#foreach>\nb\n").unwrap();
        assert_eq!(
            t.body,
            vec![
                Directive::Text("a\n".into()),
                Directive::Foreach {
                    index: 0,
                    var: "x".into(),
                    path: "xs".into(),
                    body: vec![Directive::Interp { index: 1, path: "x".into() }, Directive::Text(",\n".into())],
                },
                Directive::Text("b\n".into()),
            ]
        );
    }

    #[test]
    fn comment_lines_vanish() {
        let t = Template::parse("t", "<#-- note -->\nx <#-- inline -->\n").unwrap();
        assert_eq!(t.body, vec![Directive::Text("x \n".into())]);
    }

    #[test]
    fn nesting_and_errors() {
        let t = Template::parse("t", "<#if c>x<#else>y</#if><#calc d><#include \"u\" n>").unwrap();
        assert!(matches!(&t.body[0], Directive::If { then, otherwise, .. } if then.len() == 1 && otherwise.len() == 1));
        assert_eq!(t.body.len(), 3);
        assert!(Template::parse("t", "<#if c>x").is_err());
        assert!(Template::parse("t", "</#foreach>").is_err());
        assert!(Template::parse("t", "<#loop>").is_err());
        assert!(Template::parse("t", "${x").is_err());
        assert!(Template::parse("t", "<#include u n>").is_err());
    }
}
