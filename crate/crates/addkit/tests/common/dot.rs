//! A checker for the Graphviz DOT language grammar: graphs, subgraphs,
//! node, edge and attribute statements, with unquoted, numeral and quoted
//! ids. Html strings and ports are not supported.

use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Id(String),
    Punct(char),
    Arrow(&'static str),
}

fn lex(src: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '/' && chars.get(i + 1) == Some(&'/') || c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c == '/' && chars.get(i + 1) == Some(&'*') {
            i += 2;
            while i + 1 < chars.len() && !(chars[i] == '*' && chars[i + 1] == '/') {
                i += 1;
            }
            if i + 1 >= chars.len() {
                return Err("unterminated comment".into());
            }
            i += 2;
        } else if "{}[];,=:".contains(c) {
            out.push(Tok::Punct(c));
            i += 1;
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push(Tok::Arrow("->"));
            i += 2;
        } else if c == '-' && chars.get(i + 1) == Some(&'-') {
            out.push(Tok::Arrow("--"));
            i += 2;
        } else if c == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err("unterminated string".into()),
                    Some('"') => break,
                    Some('\\') if chars.get(i + 1) == Some(&'"') => {
                        s.push('"');
                        i += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            i += 1;
            out.push(Tok::Id(s));
        } else if c.is_alphabetic() || c == '_' || !c.is_ascii() {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || !chars[i].is_ascii()) {
                i += 1;
            }
            out.push(Tok::Id(chars[start..i].iter().collect()));
        } else if c.is_ascii_digit() || c == '.' || c == '-' {
            let start = i;
            i += 1;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            if s.matches('.').count() > 1 || s == "-" || s == "." {
                return Err(format!("bad numeral `{s}`"));
            }
            out.push(Tok::Id(s));
        } else {
            return Err(format!("unexpected character `{c}`"));
        }
    }
    Ok(out)
}

/// The statements of a parsed graph.
#[derive(Debug, Default)]
pub struct Graph {
    pub directed: bool,
    pub name: Option<String>,
    pub nodes: BTreeMap<String, BTreeMap<String, String>>,
    pub edges: Vec<(String, String, BTreeMap<String, String>)>,
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    graph: Graph,
}

fn keyword(t: &Tok, k: &str) -> bool {
    matches!(t, Tok::Id(s) if s.eq_ignore_ascii_case(k))
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Result<Tok, String> {
        let t = self.toks.get(self.pos).cloned().ok_or("unexpected end of input")?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, c: char) -> Result<(), String> {
        match self.next()? {
            Tok::Punct(p) if p == c => Ok(()),
            t => Err(format!("expected `{c}`, found {t:?}")),
        }
    }

    fn id(&mut self) -> Result<String, String> {
        match self.next()? {
            Tok::Id(s) => Ok(s),
            t => Err(format!("expected an id, found {t:?}")),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Punct(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn graph(&mut self) -> Result<(), String> {
        if self.peek().is_some_and(|t| keyword(t, "strict")) {
            self.pos += 1;
        }
        let kind = self.id()?;
        self.graph.directed = match kind.to_ascii_lowercase().as_str() {
            "digraph" => true,
            "graph" => false,
            _ => return Err(format!("expected graph or digraph, found `{kind}`")),
        };
        if let Some(Tok::Id(_)) = self.peek() {
            self.graph.name = Some(self.id()?);
        }
        self.expect('{')?;
        self.stmt_list()?;
        self.expect('}')?;
        if self.pos != self.toks.len() {
            return Err("trailing input after the graph".into());
        }
        Ok(())
    }

    fn stmt_list(&mut self) -> Result<(), String> {
        while !matches!(self.peek(), Some(Tok::Punct('}')) | None) {
            self.stmt()?;
            self.eat(';');
        }
        Ok(())
    }

    fn attr_list(&mut self) -> Result<BTreeMap<String, String>, String> {
        let mut attrs = BTreeMap::new();
        while self.eat('[') {
            while !self.eat(']') {
                let k = self.id()?;
                self.expect('=')?;
                let v = self.id()?;
                attrs.insert(k, v);
                if !self.eat(',') {
                    self.eat(';');
                }
            }
        }
        Ok(attrs)
    }

    /// Parses an edge operand, returning the node ids it stands for.
    fn operand(&mut self) -> Result<Vec<String>, String> {
        match self.peek() {
            Some(Tok::Punct('{')) => self.subgraph(),
            Some(t) if keyword(t, "subgraph") => self.subgraph(),
            _ => {
                let id = self.id()?;
                self.graph.nodes.entry(id.clone()).or_default();
                Ok(vec![id])
            }
        }
    }

    fn subgraph(&mut self) -> Result<Vec<String>, String> {
        if self.peek().is_some_and(|t| keyword(t, "subgraph")) {
            self.pos += 1;
            if let Some(Tok::Id(_)) = self.peek() {
                self.id()?;
            }
        }
        let before: Vec<String> = self.graph.nodes.keys().cloned().collect();
        self.expect('{')?;
        self.stmt_list()?;
        self.expect('}')?;
        Ok(self.graph.nodes.keys().filter(|k| !before.contains(k)).cloned().collect())
    }

    fn stmt(&mut self) -> Result<(), String> {
        let t = self.peek().cloned().ok_or("unexpected end of input")?;
        if ["graph", "node", "edge"].iter().any(|k| keyword(&t, k)) {
            self.pos += 1;
            self.attr_list()?;
            return Ok(());
        }
        if let (Tok::Id(_), Some(Tok::Punct('='))) = (&t, self.toks.get(self.pos + 1)) {
            self.pos += 2;
            self.id()?;
            return Ok(());
        }
        let mut left = self.operand()?;
        let mut chain = Vec::new();
        while let Some(Tok::Arrow(a)) = self.peek().cloned() {
            if (a == "->") != self.graph.directed {
                return Err(format!("edge operator `{a}` in the wrong kind of graph"));
            }
            self.pos += 1;
            let right = self.operand()?;
            chain.push((left, right.clone()));
            left = right;
        }
        let attrs = self.attr_list()?;
        if chain.is_empty() {
            if let [id] = left.as_slice() {
                self.graph.nodes.get_mut(id).unwrap().extend(attrs.clone());
            }
        }
        for (l, r) in chain {
            for a in &l {
                for b in &r {
                    self.graph.edges.push((a.clone(), b.clone(), attrs.clone()));
                }
            }
        }
        Ok(())
    }
}

/// Parses `src` as a DOT graph.
pub fn parse(src: &str) -> Result<Graph, String> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        graph: Graph::default(),
    };
    p.graph()?;
    Ok(p.graph)
}

/// Checks the shape of an exported diagram: every inner node (ellipse) has
/// one solid and one dashed out edge, terminals (boxes) have none, and
/// every node is reachable from the first one.
pub fn check_diagram(src: &str) -> Result<Graph, String> {
    let g = parse(src)?;
    if !g.directed {
        return Err("not a digraph".into());
    }
    for (id, attrs) in &g.nodes {
        let out: Vec<&str> = g
            .edges
            .iter()
            .filter(|(a, _, _)| a == id)
            .map(|(_, _, at)| at.get("style").map(String::as_str).unwrap_or(""))
            .collect();
        match attrs.get("shape").map(String::as_str) {
            Some("ellipse") => {
                if out.len() != 2 || !out.contains(&"solid") || !out.contains(&"dashed") {
                    return Err(format!("inner node {id} has out edges {out:?}"));
                }
            }
            Some("box") if out.is_empty() => {}
            other => return Err(format!("node {id} has shape {other:?} and out edges {out:?}")),
        }
        if !attrs.contains_key("label") {
            return Err(format!("node {id} has no label"));
        }
    }
    Ok(g)
}
