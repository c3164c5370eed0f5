//! Simple digraphs: loopless, no parallel edges, digons allowed.
//!
//! Vertices carry opaque string identifiers. Internally vertices are dense
//! `u32` indices; all operations are deterministic in index order and indices
//! follow the order in which identifiers were first introduced.

use std::collections::HashMap;

use crate::bits::Bitset;
use crate::error::{EdtError, Result};

pub type VId = u32;

#[derive(Clone, Debug, Default)]
pub struct Digraph {
    names: Vec<String>,
    index: HashMap<String, VId>,
    out: Vec<Vec<VId>>,
    inn: Vec<Vec<VId>>,
}

impl Digraph {
    pub fn new() -> Self {
        Digraph::default()
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.names.len()
    }

    /// Number of edges.
    pub fn m(&self) -> usize {
        self.out.iter().map(|v| v.len()).sum()
    }

    pub fn add_vertex(&mut self, name: &str) -> VId {
        if let Some(&v) = self.index.get(name) {
            return v;
        }
        let v = self.names.len() as VId;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), v);
        self.out.push(Vec::new());
        self.inn.push(Vec::new());
        v
    }

    /// Inserts an edge. Loops are rejected, duplicates collapse silently.
    pub fn add_edge(&mut self, u: VId, v: VId) -> Result<()> {
        if u == v {
            return Err(EdtError::LoopEdge {
                vertex: self.names[u as usize].clone(),
            });
        }
        if let Err(pos) = self.out[u as usize].binary_search(&v) {
            self.out[u as usize].insert(pos, v);
            let pos = self.inn[v as usize].binary_search(&u).unwrap_err();
            self.inn[v as usize].insert(pos, u);
        }
        Ok(())
    }

    pub fn add_edge_names(&mut self, u: &str, v: &str) -> Result<()> {
        let u = self.add_vertex(u);
        let v = self.add_vertex(v);
        self.add_edge(u, v)
    }

    pub fn remove_edge(&mut self, u: VId, v: VId) {
        if let Ok(pos) = self.out[u as usize].binary_search(&v) {
            self.out[u as usize].remove(pos);
            let pos = self.inn[v as usize].binary_search(&u).unwrap();
            self.inn[v as usize].remove(pos);
        }
    }

    /// Builds a digraph over vertices named by `names` with the given edges.
    pub fn from_named_edges<'a, I: IntoIterator<Item = (&'a str, &'a str)>>(
        edges: I,
    ) -> Result<Digraph> {
        let mut d = Digraph::new();
        for (u, v) in edges {
            d.add_edge_names(u, v)?;
        }
        Ok(d)
    }

    pub fn name(&self, v: VId) -> &str {
        &self.names[v as usize]
    }

    pub fn vid(&self, name: &str) -> Option<VId> {
        self.index.get(name).copied()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VId> + '_ {
        0..self.names.len() as VId
    }

    /// All edges in lexicographic index order.
    pub fn edges(&self) -> impl Iterator<Item = (VId, VId)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (u as VId, v)))
    }

    pub fn has_edge(&self, u: VId, v: VId) -> bool {
        self.out[u as usize].binary_search(&v).is_ok()
    }

    pub fn out(&self, v: VId) -> &[VId] {
        &self.out[v as usize]
    }

    pub fn inn(&self, v: VId) -> &[VId] {
        &self.inn[v as usize]
    }

    pub fn out_degree(&self, v: VId) -> usize {
        self.out[v as usize].len()
    }

    pub fn in_degree(&self, v: VId) -> usize {
        self.inn[v as usize].len()
    }

    pub fn full_set(&self) -> Bitset {
        Bitset::full(self.n())
    }

    pub fn vertex_set<I: IntoIterator<Item = VId>>(&self, it: I) -> Bitset {
        Bitset::from_iter(self.n(), it.into_iter().map(|v| v as usize))
    }

    /// Subgraph induced on `keep`; vertex names survive, indices are renumbered
    /// in ascending order of the old indices.
    pub fn induced(&self, keep: &Bitset) -> Digraph {
        let mut d = Digraph::new();
        for v in keep.iter() {
            d.add_vertex(&self.names[v]);
        }
        for (u, v) in self.edges() {
            if keep.contains(u as usize) && keep.contains(v as usize) {
                let a = d.vid(self.name(u)).unwrap();
                let b = d.vid(self.name(v)).unwrap();
                d.add_edge(a, b).unwrap();
            }
        }
        d
    }

    /// Digraph with the vertex set of `remove` deleted.
    pub fn remove_vertices(&self, remove: &Bitset) -> Digraph {
        let mut keep = self.full_set();
        keep.subtract(remove);
        self.induced(&keep)
    }

    /// Strongly connected components in topological order (edges go from
    /// earlier components to later ones). Iterative Tarjan, deterministic.
    pub fn strong_components(&self) -> Vec<Vec<VId>> {
        self.strong_components_in(&self.full_set())
    }

    /// Strong components of the subgraph induced on `alive`.
    pub fn strong_components_in(&self, alive: &Bitset) -> Vec<Vec<VId>> {
        let n = self.n();
        let mut idx = vec![u32::MAX; n];
        let mut low = vec![0u32; n];
        let mut on_stack = vec![false; n];
        let mut stack: Vec<VId> = Vec::new();
        let mut next = 0u32;
        let mut comps: Vec<Vec<VId>> = Vec::new();
        // frame: (vertex, position in adjacency list)
        let mut call: Vec<(VId, usize)> = Vec::new();
        for root in 0..n {
            if !alive.contains(root) || idx[root] != u32::MAX {
                continue;
            }
            call.push((root as VId, 0));
            while let Some(&mut (v, ref mut ei)) = call.last_mut() {
                let vu = v as usize;
                if *ei == 0 {
                    idx[vu] = next;
                    low[vu] = next;
                    next += 1;
                    stack.push(v);
                    on_stack[vu] = true;
                }
                let mut descended = false;
                while *ei < self.out[vu].len() {
                    let w = self.out[vu][*ei];
                    *ei += 1;
                    let wu = w as usize;
                    if !alive.contains(wu) {
                        continue;
                    }
                    if idx[wu] == u32::MAX {
                        call.push((w, 0));
                        descended = true;
                        break;
                    } else if on_stack[wu] {
                        low[vu] = low[vu].min(idx[wu]);
                    }
                }
                if descended {
                    continue;
                }
                if low[vu] == idx[vu] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w as usize] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
                call.pop();
                if let Some(&mut (p, _)) = call.last_mut() {
                    low[p as usize] = low[p as usize].min(low[vu]);
                }
            }
        }
        // Tarjan emits components in reverse topological order.
        comps.reverse();
        comps
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.n() > 0 && self.strong_components().len() == 1
    }

    /// Vertices reachable from `from` in the subgraph induced on `alive`.
    pub fn reachable(&self, from: &Bitset, alive: &Bitset) -> Bitset {
        let mut seen = from.intersection(alive);
        let mut queue: Vec<usize> = seen.iter().collect();
        while let Some(v) = queue.pop() {
            for &w in &self.out[v] {
                let w = w as usize;
                if alive.contains(w) && !seen.contains(w) {
                    seen.insert(w);
                    queue.push(w);
                }
            }
        }
        seen
    }

    /// Vertices that reach `to` in the subgraph induced on `alive`.
    pub fn co_reachable(&self, to: &Bitset, alive: &Bitset) -> Bitset {
        let mut seen = to.intersection(alive);
        let mut queue: Vec<usize> = seen.iter().collect();
        while let Some(v) = queue.pop() {
            for &w in &self.inn[v] {
                let w = w as usize;
                if alive.contains(w) && !seen.contains(w) {
                    seen.insert(w);
                    queue.push(w);
                }
            }
        }
        seen
    }

    /// Equality by labeled structure: identical name sets and named edge sets.
    pub fn same_labeled(&self, other: &Digraph) -> bool {
        if self.n() != other.n() || self.m() != other.m() {
            return false;
        }
        let mut names: Vec<&str> = self.names.iter().map(|s| s.as_str()).collect();
        let mut onames: Vec<&str> = other.names.iter().map(|s| s.as_str()).collect();
        names.sort_unstable();
        onames.sort_unstable();
        if names != onames {
            return false;
        }
        self.edges().all(|(u, v)| {
            match (other.vid(self.name(u)), other.vid(self.name(v))) {
                (Some(a), Some(b)) => other.has_edge(a, b),
                _ => false,
            }
        })
    }

    /// Serialized edge-list form: one `tail head` pair per line, isolated
    /// vertices as single-token lines.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        for v in self.vertices() {
            if self.out_degree(v) == 0 && self.in_degree(v) == 0 {
                s.push_str(self.name(v));
                s.push('\n');
            }
        }
        for (u, v) in self.edges() {
            s.push_str(&format!("{} {}\n", self.name(u), self.name(v)));
        }
        s
    }

    /// DOT-subset form: `digraph { a -> b; }`, no attributes.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph {\n");
        for v in self.vertices() {
            if self.out_degree(v) == 0 && self.in_degree(v) == 0 {
                s.push_str(&format!("  \"{}\";\n", self.name(v)));
            }
        }
        for (u, v) in self.edges() {
            s.push_str(&format!("  \"{}\" -> \"{}\";\n", self.name(u), self.name(v)));
        }
        s.push_str("}\n");
        s
    }
}

impl PartialEq for Digraph {
    fn eq(&self, other: &Self) -> bool {
        self.same_labeled(other)
    }
}
impl Eq for Digraph {}

/// Parses the edge-list format: one `tail head` pair per line, `#` comments,
/// UTF-8 tokens as identifiers, single-token lines declare isolated vertices.
pub fn parse_edge_list(text: &str) -> Result<Digraph> {
    let mut d = Digraph::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.len() {
            0 => {}
            1 => {
                d.add_vertex(toks[0]);
            }
            2 => {
                d.add_edge_names(toks[0], toks[1]).map_err(|e| match e {
                    EdtError::LoopEdge { vertex } => EdtError::Parse {
                        line: lineno + 1,
                        msg: format!("loop edge at vertex `{vertex}`"),
                    },
                    e => e,
                })?;
            }
            _ => {
                return Err(EdtError::Parse {
                    line: lineno + 1,
                    msg: format!("expected `tail head`, got {} tokens", toks.len()),
                })
            }
        }
    }
    Ok(d)
}

/// Parses the DOT subset `digraph { a -> b; c; }` with no attributes.
pub fn parse_dot(text: &str) -> Result<Digraph> {
    let body_start = text.find('{').ok_or_else(|| EdtError::Parse {
        line: 1,
        msg: "missing `{` in dot input".into(),
    })?;
    let body_end = text.rfind('}').ok_or_else(|| EdtError::Parse {
        line: 1,
        msg: "missing `}` in dot input".into(),
    })?;
    let header = &text[..body_start];
    if !header.split_whitespace().any(|t| t == "digraph") {
        return Err(EdtError::Parse {
            line: 1,
            msg: "dot input must start with `digraph`".into(),
        });
    }
    let mut d = Digraph::new();
    let unquote = |t: &str| t.trim_matches('"').to_string();
    for (i, stmt) in text[body_start + 1..body_end].split(';').enumerate() {
        let stmt = stmt.trim();
        if stmt.is_empty() {
            continue;
        }
        if let Some((lhs, rhs)) = stmt.split_once("->") {
            // chains like a -> b -> c are a sequence of edges
            let mut prev = unquote(lhs.trim());
            let mut rest = rhs;
            loop {
                let (head, tail) = match rest.split_once("->") {
                    Some((h, t)) => (h, Some(t)),
                    None => (rest, None),
                };
                let cur = unquote(head.trim());
                if prev == cur {
                    return Err(EdtError::Parse {
                        line: i + 1,
                        msg: format!("loop edge at vertex `{cur}`"),
                    });
                }
                d.add_edge_names(&prev, &cur)?;
                prev = cur;
                match tail {
                    Some(t) => rest = t,
                    None => break,
                }
            }
        } else {
            let toks: Vec<&str> = stmt.split_whitespace().collect();
            if toks.len() != 1 {
                return Err(EdtError::Parse {
                    line: i + 1,
                    msg: format!("cannot parse statement `{stmt}`"),
                });
            }
            d.add_vertex(&unquote(toks[0]));
        }
    }
    Ok(d)
}

/// Parses either format, sniffing for a DOT header.
pub fn parse_digraph(text: &str) -> Result<Digraph> {
    if text.trim_start().starts_with("digraph") {
        parse_dot(text)
    } else {
        parse_edge_list(text)
    }
}

/// Brute-force isomorphism test, gated to small orders.
pub fn isomorphic(a: &Digraph, b: &Digraph, gate: usize) -> Result<bool> {
    if a.n() > gate || b.n() > gate {
        return Err(EdtError::GateExceeded {
            what: "isomorphism test".into(),
            size: a.n().max(b.n()),
            gate,
        });
    }
    if a.n() != b.n() || a.m() != b.m() {
        return Ok(false);
    }
    let n = a.n();
    let sig = |d: &Digraph, v: VId| (d.out_degree(v), d.in_degree(v));
    let mut sa: Vec<_> = a.vertices().map(|v| sig(a, v)).collect();
    let mut sb: Vec<_> = b.vertices().map(|v| sig(b, v)).collect();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return Ok(false);
    }
    // backtracking over vertex images with degree pruning
    let mut image = vec![u32::MAX; n];
    let mut used = vec![false; n];
    fn extend(
        a: &Digraph,
        b: &Digraph,
        v: usize,
        image: &mut Vec<u32>,
        used: &mut Vec<bool>,
    ) -> bool {
        let n = a.n();
        if v == n {
            return true;
        }
        for w in 0..n {
            if used[w] {
                continue;
            }
            if a.out_degree(v as VId) != b.out_degree(w as VId)
                || a.in_degree(v as VId) != b.in_degree(w as VId)
            {
                continue;
            }
            let ok = (0..v).all(|p| {
                let q = image[p] as VId;
                a.has_edge(p as VId, v as VId) == b.has_edge(q, w as VId)
                    && a.has_edge(v as VId, p as VId) == b.has_edge(w as VId, q)
            });
            if ok {
                image[v] = w as u32;
                used[w] = true;
                if extend(a, b, v + 1, image, used) {
                    return true;
                }
                used[w] = false;
                image[v] = u32::MAX;
            }
        }
        false
    }
    Ok(extend(a, b, 0, &mut image, &mut used))
}
