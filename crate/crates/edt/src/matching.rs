//! The digraph ↔ bipartite-matching correspondence: splits and M-directions,
//! extendability, tight cuts and braces, Pfaffian orientations, 4-cycle sums,
//! small cycle sums, and conformal crosses.

use std::collections::HashMap;

use crate::bits::Bitset;
use crate::cycles::enumerate_dicycles;
use crate::digraph::{Digraph, VId};
use crate::error::{EdtError, Result};
use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

/// An undirected bipartite graph with inferred colour classes.
#[derive(Clone, Debug)]
pub struct Bipartite {
    names: Vec<String>,
    index: HashMap<String, u32>,
    adj: Vec<Vec<u32>>,
    class1: Bitset,
}

impl Bipartite {
    /// Builds from undirected edges given by vertex names; the colour classes
    /// are inferred by 2-colouring each component, anchored at its smallest
    /// vertex. Fails if some cycle is odd.
    pub fn from_edges<'a, I: IntoIterator<Item = (&'a str, &'a str)>>(edges: I) -> Result<Bipartite> {
        let mut b = Bipartite {
            names: Vec::new(),
            index: HashMap::new(),
            adj: Vec::new(),
            class1: Bitset::new(0),
        };
        for (u, v) in edges {
            let u = b.add_vertex(u);
            let v = b.add_vertex(v);
            b.add_edge(u, v)?;
        }
        b.recolour()?;
        Ok(b)
    }

    pub fn add_vertex(&mut self, name: &str) -> u32 {
        if let Some(&v) = self.index.get(name) {
            return v;
        }
        let v = self.names.len() as u32;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), v);
        self.adj.push(Vec::new());
        v
    }

    pub fn add_edge(&mut self, u: u32, v: u32) -> Result<()> {
        if u == v {
            return Err(EdtError::LoopEdge {
                vertex: self.names[u as usize].clone(),
            });
        }
        if let Err(pos) = self.adj[u as usize].binary_search(&v) {
            self.adj[u as usize].insert(pos, v);
            let pos = self.adj[v as usize].binary_search(&u).unwrap_err();
            self.adj[v as usize].insert(pos, u);
        }
        Ok(())
    }

    /// Recomputes the 2-colouring. Must be called after structural edits.
    pub fn recolour(&mut self) -> Result<()> {
        let n = self.names.len();
        let mut colour = vec![2u8; n];
        for s in 0..n {
            if colour[s] != 2 {
                continue;
            }
            colour[s] = 0;
            let mut queue = vec![s];
            while let Some(v) = queue.pop() {
                for &w in &self.adj[v] {
                    let w = w as usize;
                    if colour[w] == 2 {
                        colour[w] = 1 - colour[v];
                        queue.push(w);
                    } else if colour[w] == colour[v] {
                        return Err(EdtError::pre(format!(
                            "graph is not bipartite: odd cycle through `{}`",
                            self.names[w]
                        )));
                    }
                }
            }
        }
        self.class1 = Bitset::from_iter(n, (0..n).filter(|&v| colour[v] == 0));
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn m(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    pub fn name(&self, v: u32) -> &str {
        &self.names[v as usize]
    }

    pub fn vid(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    pub fn adj(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    pub fn in_class1(&self, v: u32) -> bool {
        self.class1.contains(v as usize)
    }

    /// Undirected edges as (min, max) pairs in lexicographic order.
    pub fn undirected_edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for u in 0..self.names.len() as u32 {
            for &v in &self.adj[u as usize] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Maximum matching on the vertices in `alive`, by augmenting paths.
    pub fn max_matching(&self, alive: &Bitset) -> Vec<Option<u32>> {
        let n = self.n();
        let mut partner: Vec<Option<u32>> = vec![None; n];
        for u in 0..n {
            if !alive.contains(u) || !self.class1.contains(u) || partner[u].is_some() {
                continue;
            }
            let mut visited = vec![false; n];
            augment(self, alive, u as u32, &mut partner, &mut visited);
        }
        partner
    }

    /// True when the vertices in `alive` admit a perfect matching.
    pub fn has_perfect_matching_on(&self, alive: &Bitset) -> bool {
        let partner = self.max_matching(alive);
        alive.iter().all(|v| partner[v].is_some())
    }

    pub fn full_set(&self) -> Bitset {
        Bitset::full(self.n())
    }

    /// A subgraph `H` is conformal if the rest of the graph has a perfect
    /// matching.
    pub fn is_conformal_set(&self, sub: &Bitset) -> bool {
        let mut rest = self.full_set();
        rest.subtract(sub);
        self.has_perfect_matching_on(&rest)
    }
}

fn augment(
    b: &Bipartite,
    alive: &Bitset,
    u: u32,
    partner: &mut Vec<Option<u32>>,
    visited: &mut Vec<bool>,
) -> bool {
    for &w in b.adj(u) {
        let wu = w as usize;
        if !alive.contains(wu) || visited[wu] {
            continue;
        }
        visited[wu] = true;
        let free = match partner[wu] {
            None => true,
            Some(next) => augment(b, alive, next, partner, visited),
        };
        if free {
            partner[wu] = Some(u);
            partner[u as usize] = Some(w);
            return true;
        }
    }
    false
}

/// A bipartite graph together with a designated perfect matching.
#[derive(Clone, Debug)]
pub struct MatchedBipartite {
    pub graph: Bipartite,
    /// partner[v] is v's matched neighbour.
    pub partner: Vec<u32>,
}

impl MatchedBipartite {
    pub fn new(graph: Bipartite, matching: &[(u32, u32)]) -> Result<MatchedBipartite> {
        let n = graph.n();
        let mut partner = vec![u32::MAX; n];
        for &(u, v) in matching {
            if !graph.has_edge(u, v) {
                return Err(EdtError::pre("matching edge not present in graph"));
            }
            if partner[u as usize] != u32::MAX || partner[v as usize] != u32::MAX {
                return Err(EdtError::pre("matching repeats a vertex"));
            }
            partner[u as usize] = v;
            partner[v as usize] = u;
        }
        if partner.iter().any(|&p| p == u32::MAX) {
            return Err(EdtError::pre("matching is not perfect"));
        }
        Ok(MatchedBipartite { graph, partner })
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Matching edges as (class1 vertex, class2 vertex) in index order.
    pub fn matching_pairs(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for v in 0..self.n() as u32 {
            if self.graph.in_class1(v) {
                out.push((v, self.partner[v as usize]));
            }
        }
        out
    }

    /// Serializes as the `bipartite` header followed by `u v [m]` lines.
    pub fn to_lines(&self) -> String {
        let mut s = String::from("bipartite\n");
        for (u, v) in self.graph.undirected_edges() {
            let m = self.partner[u as usize] == v;
            if m {
                s.push_str(&format!("{} {} m\n", self.graph.name(u), self.graph.name(v)));
            } else {
                s.push_str(&format!("{} {}\n", self.graph.name(u), self.graph.name(v)));
            }
        }
        s
    }
}

/// Parses the matched-bipartite format: a `bipartite` header line, then
/// `u v [m]` lines where a trailing `m` marks matching edges. Classes are
/// inferred and the matching validated.
pub fn parse_matched_bipartite(text: &str) -> Result<MatchedBipartite> {
    let mut lines = text.lines().enumerate();
    let header = loop {
        match lines.next() {
            None => {
                return Err(EdtError::Parse {
                    line: 1,
                    msg: "empty input".into(),
                })
            }
            Some((i, l)) => {
                let l = l.split('#').next().unwrap().trim();
                if !l.is_empty() {
                    break (i, l);
                }
            }
        }
    };
    if header.1 != "bipartite" {
        return Err(EdtError::Parse {
            line: header.0 + 1,
            msg: "expected `bipartite` header".into(),
        });
    }
    let mut edges: Vec<(String, String)> = Vec::new();
    let mut marked: Vec<(String, String)> = Vec::new();
    for (i, raw) in lines {
        let l = raw.split('#').next().unwrap();
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks.as_slice() {
            [] => {}
            [u, v] => edges.push((u.to_string(), v.to_string())),
            [u, v, "m"] => {
                edges.push((u.to_string(), v.to_string()));
                marked.push((u.to_string(), v.to_string()));
            }
            _ => {
                return Err(EdtError::Parse {
                    line: i + 1,
                    msg: "expected `u v` or `u v m`".into(),
                })
            }
        }
    }
    let graph = Bipartite::from_edges(edges.iter().map(|(u, v)| (u.as_str(), v.as_str())))?;
    let matching: Vec<(u32, u32)> = marked
        .iter()
        .map(|(u, v)| (graph.vid(u).unwrap(), graph.vid(v).unwrap()))
        .collect();
    MatchedBipartite::new(graph, &matching)
}

/// The M-direction of a matched bipartite graph: one vertex per matching
/// edge (named after its class-1 endpoint), with an edge (v_i, v_j) exactly
/// when a_i is adjacent to b_j for i ≠ j.
pub fn m_direction(b: &MatchedBipartite) -> Digraph {
    let pairs = b.matching_pairs();
    let mut d = Digraph::new();
    for &(a, _) in &pairs {
        d.add_vertex(b.graph.name(a));
    }
    let slot_of_b: HashMap<u32, usize> = pairs.iter().enumerate().map(|(i, &(_, bb))| (bb, i)).collect();
    for (i, &(a, _)) in pairs.iter().enumerate() {
        for &w in b.graph.adj(a) {
            let j = slot_of_b[&w];
            if i != j {
                d.add_edge(i as VId, j as VId).unwrap();
            }
        }
    }
    d
}

/// The split of a digraph: one matching edge per vertex, one cross edge per
/// digraph edge. `m_direction(split(D))` is label-isomorphic to D.
pub fn split(d: &Digraph) -> MatchedBipartite {
    let mut b = Bipartite {
        names: Vec::new(),
        index: HashMap::new(),
        adj: Vec::new(),
        class1: Bitset::new(0),
    };
    let mut a_ids = Vec::new();
    for v in d.vertices() {
        a_ids.push(b.add_vertex(d.name(v)));
    }
    let mut b_ids = Vec::new();
    for v in d.vertices() {
        let mut nm = format!("{}'", d.name(v));
        while b.index.contains_key(&nm) {
            nm.push('\'');
        }
        b_ids.push(b.add_vertex(&nm));
    }
    let mut matching = Vec::new();
    for v in d.vertices() {
        b.add_edge(a_ids[v as usize], b_ids[v as usize]).unwrap();
        matching.push((a_ids[v as usize], b_ids[v as usize]));
    }
    for (u, v) in d.edges() {
        b.add_edge(a_ids[u as usize], b_ids[v as usize]).unwrap();
    }
    // the split is connected component-wise consistent: class1 = a side
    b.class1 = Bitset::from_iter(b.names.len(), a_ids.iter().map(|&v| v as usize));
    MatchedBipartite::new(b, &matching).expect("split matching is perfect by construction")
}

/// Enumerates perfect matchings in lexicographic edge order, as sorted
/// (class1, class2) pair lists.
pub fn enumerate_perfect_matchings(
    b: &Bipartite,
    cap: usize,
) -> Result<Vec<Vec<(u32, u32)>>> {
    let n = b.n();
    let mut out = Vec::new();
    let mut partner: Vec<Option<u32>> = vec![None; n];
    fn rec(
        b: &Bipartite,
        partner: &mut Vec<Option<u32>>,
        out: &mut Vec<Vec<(u32, u32)>>,
        cap: usize,
    ) -> Result<()> {
        let free = (0..b.n()).find(|&v| partner[v].is_none());
        match free {
            None => {
                if out.len() >= cap {
                    return Err(EdtError::cap("perfect matching enumeration", cap));
                }
                let mut m: Vec<(u32, u32)> = (0..b.n() as u32)
                    .filter(|&v| b.in_class1(v))
                    .map(|v| (v, partner[v as usize].unwrap()))
                    .collect();
                m.sort_unstable();
                out.push(m);
                Ok(())
            }
            Some(v) => {
                for &w in b.adj(v as u32) {
                    if partner[w as usize].is_none() {
                        partner[v] = Some(w);
                        partner[w as usize] = Some(v as u32);
                        rec(b, partner, out, cap)?;
                        partner[v] = None;
                        partner[w as usize] = None;
                    }
                }
                Ok(())
            }
        }
    }
    rec(b, &mut partner, &mut out, cap)?;
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Exact number of perfect matchings by enumeration.
pub fn count_perfect_matchings(b: &Bipartite, cap: usize) -> Result<usize> {
    Ok(enumerate_perfect_matchings(b, cap)?.len())
}

/// True when the graph is connected and every matching of size at most k
/// extends to a perfect matching (extendability is defined over connected
/// graphs).
pub fn is_k_extendable(b: &MatchedBipartite, k: usize) -> Result<bool> {
    if b.n() < 2 * k + 2 {
        return Err(EdtError::pre(format!(
            "k-extendability needs at least {} vertices, got {}",
            2 * k + 2,
            b.n()
        )));
    }
    if k >= 1 && !is_connected(&b.graph) {
        return Ok(false);
    }
    let edges = b.graph.undirected_edges();
    // enumerate matchings F with |F| <= k and test each
    fn rec(
        b: &Bipartite,
        edges: &[(u32, u32)],
        start: usize,
        chosen: &mut Vec<(u32, u32)>,
        used: &mut Bitset,
        k: usize,
    ) -> bool {
        let mut rest = b.full_set();
        rest.subtract(used);
        if !b.has_perfect_matching_on(&rest) {
            return false;
        }
        if chosen.len() == k {
            return true;
        }
        for i in start..edges.len() {
            let (u, v) = edges[i];
            if used.contains(u as usize) || used.contains(v as usize) {
                continue;
            }
            used.insert(u as usize);
            used.insert(v as usize);
            chosen.push((u, v));
            let ok = rec(b, edges, i + 1, chosen, used, k);
            chosen.pop();
            used.remove(u as usize);
            used.remove(v as usize);
            if !ok {
                return false;
            }
        }
        true
    }
    Ok(rec(
        &b.graph,
        &edges,
        0,
        &mut Vec::new(),
        &mut Bitset::new(b.n()),
        k,
    ))
}

fn is_connected(b: &Bipartite) -> bool {
    if b.n() == 0 {
        return true;
    }
    let mut seen = Bitset::new(b.n());
    seen.insert(0);
    let mut stack = vec![0u32];
    while let Some(v) = stack.pop() {
        for &w in b.adj(v) {
            if !seen.contains(w as usize) {
                seen.insert(w as usize);
                stack.push(w);
            }
        }
    }
    seen.count() == b.n()
}

/// True when |V(D)| > k and deleting any fewer than k vertices leaves the
/// digraph strongly connected.
pub fn is_k_strongly_connected(d: &Digraph, k: usize) -> bool {
    if d.n() <= k {
        return false;
    }
    if !d.is_strongly_connected() {
        return k == 0;
    }
    if k <= 1 {
        return true;
    }
    let mut subsets = Vec::new();
    crate::separation::subsets_exactly_up_to(d.n(), k - 1, &mut subsets);
    for s in subsets {
        if s.is_empty() {
            continue;
        }
        let mut alive = d.full_set();
        alive.subtract(&s);
        if alive.is_empty() {
            continue;
        }
        if d.strong_components_in(&alive).len() != 1 {
            return false;
        }
    }
    true
}

/// A tight cut: an edge cut crossed exactly once by every perfect matching.
/// Represented by the side avoiding vertex 0.
#[derive(Clone, Debug)]
pub struct TightCut {
    pub side: Bitset,
    pub nontrivial: bool,
}

/// All tight cuts of a matching covered graph, by exhausting sides against
/// the enumerated perfect matchings. Gated to 20 vertices.
pub fn enumerate_tight_cuts(b: &MatchedBipartite, pm_cap: usize) -> Result<Vec<TightCut>> {
    let n = b.n();
    if n > 20 {
        return Err(EdtError::gate("tight cut enumeration", n, 20));
    }
    let pms = enumerate_perfect_matchings(&b.graph, pm_cap)?;
    let edges = b.graph.undirected_edges();
    let mut out = Vec::new();
    // sides avoiding vertex 0, non-empty
    for mask in 1u64..(1 << (n - 1)) {
        let side = Bitset::from_iter(n, (0..n - 1).filter(|i| mask >> i & 1 == 1).map(|i| i + 1));
        let tight = pms.iter().all(|m| {
            let crossings = m
                .iter()
                .filter(|&&(u, v)| side.contains(u as usize) != side.contains(v as usize))
                .count();
            crossings == 1
        });
        if tight {
            // also require the cut to be an edge cut at all (some edge crosses)
            let crossing_edges = edges
                .iter()
                .filter(|&&(u, v)| side.contains(u as usize) != side.contains(v as usize))
                .count();
            if crossing_edges == 0 {
                continue;
            }
            let nontrivial = side.count().min(n - side.count()) >= 2;
            out.push(TightCut { side, nontrivial });
        }
    }
    Ok(out)
}

/// Contracts the given side of a tight cut into a single vertex; the kept
/// side's designated matching is inherited, with the crossing edge's stub
/// matched to the new vertex.
pub fn tight_cut_contraction(b: &MatchedBipartite, side: &Bitset) -> Result<MatchedBipartite> {
    let n = b.n();
    let mut names: Vec<&str> = side.iter().map(|v| b.graph.name(v as u32)).collect();
    names.sort_unstable();
    let merged = names.join("+");
    let mut g = Bipartite {
        names: Vec::new(),
        index: HashMap::new(),
        adj: Vec::new(),
        class1: Bitset::new(0),
    };
    for v in 0..n as u32 {
        if !side.contains(v as usize) {
            g.add_vertex(b.graph.name(v));
        }
    }
    let nv = g.add_vertex(&merged);
    for (u, v) in b.graph.undirected_edges() {
        let iu = side.contains(u as usize);
        let iv = side.contains(v as usize);
        match (iu, iv) {
            (false, false) => {
                let a = g.vid(b.graph.name(u)).unwrap();
                let c = g.vid(b.graph.name(v)).unwrap();
                g.add_edge(a, c)?;
            }
            (true, false) => {
                let c = g.vid(b.graph.name(v)).unwrap();
                g.add_edge(nv, c)?;
            }
            (false, true) => {
                let a = g.vid(b.graph.name(u)).unwrap();
                g.add_edge(a, nv)?;
            }
            (true, true) => {}
        }
    }
    g.recolour()?;
    // matching: kept inside edges plus the crossing matching edge onto nv
    let mut matching = Vec::new();
    let mut crossing = None;
    for (a, c) in b.matching_pairs() {
        let ia = side.contains(a as usize);
        let ic = side.contains(c as usize);
        match (ia, ic) {
            (false, false) => matching.push((
                g.vid(b.graph.name(a)).unwrap(),
                g.vid(b.graph.name(c)).unwrap(),
            )),
            (true, false) => {
                if crossing.replace((nv, g.vid(b.graph.name(c)).unwrap())).is_some() {
                    return Err(EdtError::Verification(
                        "tight cut crossed more than once by designated matching".into(),
                    ));
                }
            }
            (false, true) => {
                if crossing.replace((g.vid(b.graph.name(a)).unwrap(), nv)).is_some() {
                    return Err(EdtError::Verification(
                        "tight cut crossed more than once by designated matching".into(),
                    ));
                }
            }
            (true, true) => {}
        }
    }
    let crossing = crossing.ok_or_else(|| {
        EdtError::Verification("designated matching does not cross the tight cut".into())
    })?;
    matching.push(crossing);
    MatchedBipartite::new(g, &matching)
}

/// Iterated tight cut contractions until no non-trivial tight cut remains;
/// the results are the braces. By Lovász's theorem the multiset is
/// independent of the contraction order.
pub fn tight_cut_decomposition(b: &MatchedBipartite, pm_cap: usize) -> Result<Vec<MatchedBipartite>> {
    tight_cut_decomposition_seeded(b, pm_cap, None)
}

pub fn tight_cut_decomposition_seeded(
    b: &MatchedBipartite,
    pm_cap: usize,
    seed: Option<u64>,
) -> Result<Vec<MatchedBipartite>> {
    let mut rng = seed.map(SmallRng::seed_from_u64);
    let mut work = vec![b.clone()];
    let mut braces = Vec::new();
    while let Some(g) = work.pop() {
        let cuts: Vec<TightCut> = enumerate_tight_cuts(&g, pm_cap)?
            .into_iter()
            .filter(|c| c.nontrivial)
            .collect();
        if cuts.is_empty() {
            braces.push(g);
            continue;
        }
        let cut = match rng.as_mut() {
            None => &cuts[0],
            Some(r) => &cuts[r.random_range(0..cuts.len())],
        };
        let mut other = g.graph.full_set();
        other.subtract(&cut.side);
        work.push(tight_cut_contraction(&g, &cut.side)?);
        work.push(tight_cut_contraction(&g, &other)?);
    }
    braces.sort_by_key(|b| (b.n(), b.graph.m()));
    Ok(braces)
}

/// An orientation of an undirected bipartite graph, aligned with
/// `undirected_edges()` order: `true` directs the edge from the smaller to
/// the larger endpoint index.
#[derive(Clone, Debug)]
pub struct Orientation {
    pub bits: Vec<bool>,
}

impl Orientation {
    /// Direction of undirected edge (u, v) with u < v: true means u -> v.
    pub fn to_lines(&self, b: &Bipartite) -> String {
        let mut s = String::new();
        for (i, (u, v)) in b.undirected_edges().iter().enumerate() {
            let (t, h) = if self.bits[i] { (*u, *v) } else { (*v, *u) };
            s.push_str(&format!("{} {}\n", b.name(t), b.name(h)));
        }
        s
    }
}

/// All even conformal cycles, canonically rooted at their smallest vertex
/// with the smaller second vertex deciding direction. Each cycle is a vertex
/// sequence.
pub fn even_conformal_cycles(b: &Bipartite, cap: usize) -> Result<Vec<Vec<u32>>> {
    let n = b.n();
    let mut out: Vec<Vec<u32>> = Vec::new();
    let mut path: Vec<u32> = Vec::new();
    let mut used = Bitset::new(n);
    fn rec(
        b: &Bipartite,
        start: u32,
        path: &mut Vec<u32>,
        used: &mut Bitset,
        out: &mut Vec<Vec<u32>>,
        cap: usize,
    ) -> Result<()> {
        let cur = *path.last().unwrap();
        for &w in b.adj(cur) {
            if w == start && path.len() >= 3 {
                // canonical direction: second vertex smaller than last
                if path[1] < *path.last().unwrap() && path.len() % 2 == 0 {
                    let cset = Bitset::from_iter(b.n(), path.iter().map(|&v| v as usize));
                    if b.is_conformal_set(&cset) {
                        if out.len() >= cap {
                            return Err(EdtError::cap("even conformal cycle enumeration", cap));
                        }
                        out.push(path.clone());
                    }
                }
            } else if w > start && !used.contains(w as usize) {
                used.insert(w as usize);
                path.push(w);
                rec(b, start, path, used, out, cap)?;
                path.pop();
                used.remove(w as usize);
            }
        }
        Ok(())
    }
    for s in 0..n as u32 {
        used.insert(s as usize);
        path.push(s);
        rec(b, s, &mut path, &mut used, &mut out, cap)?;
        path.pop();
        used.remove(s as usize);
    }
    out.sort_unstable();
    Ok(out)
}

/// Kasteleyn's criterion: every even conformal cycle must have an odd number
/// of edges agreeing with either traversal direction.
pub fn is_pfaffian_orientation(b: &Bipartite, o: &Orientation, cap: usize) -> Result<bool> {
    let edges = b.undirected_edges();
    let eidx: HashMap<(u32, u32), usize> =
        edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let cycles = even_conformal_cycles(b, cap)?;
    for c in &cycles {
        let mut agree = 0usize;
        for i in 0..c.len() {
            let (x, y) = (c[i], c[(i + 1) % c.len()]);
            let key = (x.min(y), x.max(y));
            let forward = o.bits[eidx[&key]];
            // edge drawn min->max; traversal goes x->y
            if (x < y) == forward {
                agree += 1;
            }
        }
        // the cycle is even, so the two traversal directions agree in
        // parity; checking one suffices
        if agree % 2 == 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Searches for a Pfaffian orientation over orientations modulo vertex
/// flips: a spanning forest is fixed and only co-forest edges vary, which
/// covers every equivalence class. First canonical hit wins.
pub fn has_pfaffian_orientation(b: &Bipartite, cap: usize) -> Result<Option<Orientation>> {
    let edges = b.undirected_edges();
    let m = edges.len();
    if m > 40 {
        return Err(EdtError::gate("pfaffian orientation search", m, 40));
    }
    let cycles = even_conformal_cycles(b, cap)?;
    // spanning forest via union-find
    let mut parent: Vec<u32> = (0..b.n() as u32).collect();
    fn find(parent: &mut Vec<u32>, v: u32) -> u32 {
        if parent[v as usize] != v {
            let r = find(parent, parent[v as usize]);
            parent[v as usize] = r;
        }
        parent[v as usize]
    }
    let mut in_forest = vec![false; m];
    for (i, &(u, v)) in edges.iter().enumerate() {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru as usize] = rv;
            in_forest[i] = true;
        }
    }
    let co: Vec<usize> = (0..m).filter(|&i| !in_forest[i]).collect();
    if co.len() > 26 {
        return Err(EdtError::gate(
            "pfaffian orientation search (flip classes)",
            co.len(),
            26,
        ));
    }
    let eidx: HashMap<(u32, u32), usize> =
        edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    // precompute each cycle's edge list and traversal direction
    let prepared: Vec<Vec<(usize, bool)>> = cycles
        .iter()
        .map(|c| {
            (0..c.len())
                .map(|i| {
                    let (x, y) = (c[i], c[(i + 1) % c.len()]);
                    (eidx[&(x.min(y), x.max(y))], x < y)
                })
                .collect()
        })
        .collect();
    for mask in 0u64..(1u64 << co.len()) {
        let mut bits = vec![true; m];
        for (k, &e) in co.iter().enumerate() {
            bits[e] = mask >> k & 1 == 1;
        }
        let ok = prepared.iter().all(|cyc| {
            let agree = cyc
                .iter()
                .filter(|&&(e, fwd)| bits[e] == fwd)
                .count();
            agree % 2 == 1
        });
        if ok {
            return Ok(Some(Orientation { bits }));
        }
    }
    Ok(None)
}

/// Number of perfect matchings through a Pfaffian orientation: the absolute
/// determinant of the signed biadjacency matrix.
pub fn pm_count_by_kasteleyn(b: &Bipartite, o: &Orientation) -> Result<i128> {
    let ones: Vec<u32> = (0..b.n() as u32).filter(|&v| b.in_class1(v)).collect();
    let twos: Vec<u32> = (0..b.n() as u32).filter(|&v| !b.in_class1(v)).collect();
    if ones.len() != twos.len() {
        return Ok(0);
    }
    let k = ones.len();
    let edges = b.undirected_edges();
    let eidx: HashMap<(u32, u32), usize> =
        edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut mat = vec![vec![0i128; k]; k];
    for (i, &a) in ones.iter().enumerate() {
        for (j, &c) in twos.iter().enumerate() {
            if b.has_edge(a, c) {
                let key = (a.min(c), a.max(c));
                let fwd = o.bits[eidx[&key]];
                // sign +1 when oriented from the class-1 endpoint
                let from_a = if a < c { fwd } else { !fwd };
                mat[i][j] = if from_a { 1 } else { -1 };
            }
        }
    }
    Ok(determinant_bareiss(mat).abs())
}

fn determinant_bareiss(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                None => return 0,
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// A 4-cycle sum: two bipartite graphs intersecting exactly in a 4-cycle C,
/// glued and with a chosen subset of C's edges deleted. The result need not
/// inherit a designated matching, so it is returned as a plain bipartite
/// graph.
pub fn four_cycle_sum(
    b1: &Bipartite,
    b2: &Bipartite,
    c: &[&str; 4],
    delete: &[(&str, &str)],
) -> Result<Bipartite> {
    // the shared vertices must be exactly C
    let shared: Vec<&String> = b1
        .names
        .iter()
        .filter(|n| b2.index.contains_key(n.as_str()))
        .collect();
    if shared.len() != 4 || !c.iter().all(|x| shared.iter().any(|s| s.as_str() == *x)) {
        return Err(EdtError::pre(
            "summands must intersect in exactly the four cycle vertices",
        ));
    }
    let cyc_edges: Vec<(String, String)> = (0..4)
        .map(|i| (c[i].to_string(), c[(i + 1) % 4].to_string()))
        .collect();
    for b in [b1, b2] {
        if b.n() <= 4 {
            return Err(EdtError::pre("both summands need private vertices"));
        }
        for (u, v) in &cyc_edges {
            let (iu, iv) = (b.vid(u), b.vid(v));
            match (iu, iv) {
                (Some(iu), Some(iv)) if b.has_edge(iu, iv) => {}
                _ => return Err(EdtError::pre("shared 4-cycle missing from a summand")),
            }
        }
    }
    // shared edges must be exactly the cycle edges
    for (u, v) in b1.undirected_edges() {
        let (nu, nv) = (b1.name(u), b1.name(v));
        if let (Some(xu), Some(xv)) = (b2.vid(nu), b2.vid(nv)) {
            if b2.has_edge(xu, xv) {
                let in_c = cyc_edges.iter().any(|(a, b)| {
                    (a == nu && b == nv) || (a == nv && b == nu)
                });
                if !in_c {
                    return Err(EdtError::pre("summands share an edge outside the 4-cycle"));
                }
            }
        }
    }
    let mut out_edges: Vec<(String, String)> = Vec::new();
    for b in [b1, b2] {
        for (u, v) in b.undirected_edges() {
            out_edges.push((b.name(u).to_string(), b.name(v).to_string()));
        }
    }
    let dropped: Vec<(String, String)> = delete
        .iter()
        .map(|(u, v)| (u.to_string(), v.to_string()))
        .collect();
    for (u, v) in &dropped {
        let in_c = cyc_edges
            .iter()
            .any(|(a, b)| (a == u && b == v) || (a == v && b == u));
        if !in_c {
            return Err(EdtError::pre("only edges of the shared 4-cycle may be deleted"));
        }
    }
    let keep = |u: &str, v: &str| {
        !dropped
            .iter()
            .any(|(a, b)| (a == u && b == v) || (a == v && b == u))
    };
    Bipartite::from_edges(
        out_edges
            .iter()
            .filter(|(u, v)| keep(u, v))
            .map(|(u, v)| (u.as_str(), v.as_str())),
    )
}

/// Which small-cycle-sum interface to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumKind {
    Two,
    Three,
    Four,
}

/// Small cycle sum of two digraphs that overlap exactly in the interface
/// pattern of the chosen kind, with some interface edges deleted afterwards.
/// The summands are combined by raw identification of equal vertex names.
pub fn small_cycle_sum(
    d1: &Digraph,
    d2: &Digraph,
    kind: SumKind,
    delete: &[(&str, &str)],
    cap: usize,
) -> Result<Digraph> {
    let shared: Vec<String> = d1
        .vertices()
        .map(|v| d1.name(v).to_string())
        .filter(|n| d2.vid(n).is_some())
        .collect();
    let shared_edges: Vec<(String, String)> = d1
        .edges()
        .map(|(u, v)| (d1.name(u).to_string(), d1.name(v).to_string()))
        .filter(|(u, v)| {
            match (d2.vid(u), d2.vid(v)) {
                (Some(a), Some(b)) => d2.has_edge(a, b),
                _ => false,
            }
        })
        .collect();
    let want = match kind {
        SumKind::Two => 2,
        SumKind::Three => 3,
        SumKind::Four => 4,
    };
    if shared.len() != want {
        return Err(EdtError::pre(format!(
            "{}-sum interface must share exactly {} vertices, got {}",
            want,
            want,
            shared.len()
        )));
    }
    if d1.n() == want || d2.n() == want {
        return Err(EdtError::pre("both summands need private vertices"));
    }
    // union digraph
    let mut d0 = Digraph::new();
    for g in [d1, d2] {
        for v in g.vertices() {
            d0.add_vertex(g.name(v));
        }
        for (u, v) in g.edges() {
            d0.add_edge_names(g.name(u), g.name(v))?;
        }
    }
    let sid = |n: &str| d0.vid(n).unwrap();
    let interface: Vec<(String, String)> = match kind {
        SumKind::Two => {
            // shared digon on {u, v}
            let (u, v) = (shared[0].clone(), shared[1].clone());
            let digon = vec![(u.clone(), v.clone()), (v.clone(), u.clone())];
            let mut se = shared_edges.clone();
            se.sort_unstable();
            let mut dg = digon.clone();
            dg.sort_unstable();
            if se != dg {
                return Err(EdtError::pre("2-sum interface must be exactly a shared digon"));
            }
            digon
        }
        SumKind::Three => {
            if shared_edges.len() != 3 {
                return Err(EdtError::pre("3-sum interface must share exactly 3 edges"));
            }
            // identify the transitive triangle w->u, u->v, w->v
            let out_two = shared
                .iter()
                .find(|n| shared_edges.iter().filter(|(a, _)| a == *n).count() == 2);
            let in_two = shared
                .iter()
                .find(|n| shared_edges.iter().filter(|(_, b)| b == *n).count() == 2);
            let (w, v) = match (out_two, in_two) {
                (Some(w), Some(v)) if w != v => (w.clone(), v.clone()),
                _ => return Err(EdtError::pre("3-sum interface is not a transitive triangle")),
            };
            let u = shared
                .iter()
                .find(|n| **n != w && **n != v)
                .unwrap()
                .clone();
            let pat = {
                let mut p = vec![
                    (w.clone(), u.clone()),
                    (u.clone(), v.clone()),
                    (w.clone(), v.clone()),
                ];
                p.sort_unstable();
                p
            };
            let mut se = shared_edges.clone();
            se.sort_unstable();
            if se != pat {
                return Err(EdtError::pre("3-sum interface is not a transitive triangle"));
            }
            // the second summand may have no edge with tail v nor head w
            let (v2, w2) = (d2.vid(&v).unwrap(), d2.vid(&w).unwrap());
            if d2.out_degree(v2) > 0 || d2.in_degree(w2) > 0 {
                return Err(EdtError::pre(
                    "3-sum: second summand must have no edge with tail v nor head w",
                ));
            }
            // witness: a dicycle through (w, v) avoiding u, i.e. a directed
            // v -> w path avoiding u
            let mut alive = d0.full_set();
            alive.remove(sid(&u) as usize);
            let from = d0.vertex_set([sid(&v)]);
            if !d0.reachable(&from, &alive).contains(sid(&w) as usize) {
                return Err(EdtError::pre(
                    "3-sum: no dicycle contains (w,v) while avoiding u",
                ));
            }
            vec![(w.clone(), u.clone()), (u, v.clone()), (w, v)]
        }
        SumKind::Four => {
            if shared_edges.len() != 4 {
                return Err(EdtError::pre("4-sum interface must share exactly 4 edges"));
            }
            let tails: Vec<String> = shared
                .iter()
                .filter(|n| shared_edges.iter().filter(|(a, _)| a == *n).count() == 2)
                .cloned()
                .collect();
            let heads: Vec<String> = shared
                .iter()
                .filter(|n| shared_edges.iter().filter(|(_, b)| b == *n).count() == 2)
                .cloned()
                .collect();
            if tails.len() != 2 || heads.len() != 2 {
                return Err(EdtError::pre("4-sum interface is not the anti-directed pattern"));
            }
            for t in &tails {
                for h in &heads {
                    if !shared_edges.iter().any(|(a, b)| a == t && b == h) {
                        return Err(EdtError::pre(
                            "4-sum interface is not the anti-directed pattern",
                        ));
                    }
                }
            }
            // second summand: no edge with tail in heads, no edge with head in tails
            for h in &heads {
                if d2.out_degree(d2.vid(h).unwrap()) > 0 {
                    return Err(EdtError::pre("4-sum: second summand has an edge with tail y or v"));
                }
            }
            for t in &tails {
                if d2.in_degree(d2.vid(t).unwrap()) > 0 {
                    return Err(EdtError::pre("4-sum: second summand has an edge with head x or u"));
                }
            }
            // witness: some dicycle uses exactly two of the four interface edges
            let cycles = enumerate_dicycles(&d0, cap).map_err(EdtError::from)?;
            let pat: Vec<(VId, VId)> = shared_edges
                .iter()
                .map(|(a, b)| (sid(a), sid(b)))
                .collect();
            let witness = cycles.iter().any(|c| {
                let used = c
                    .edges()
                    .filter(|e| pat.contains(e))
                    .count();
                used == 2
            });
            if !witness {
                return Err(EdtError::pre(
                    "4-sum: no dicycle uses exactly two interface edges",
                ));
            }
            shared_edges.clone()
        }
    };
    let mut to_remove = Vec::new();
    for (u, v) in delete {
        let in_pat = interface
            .iter()
            .any(|(a, b)| a == u && b == v);
        if !in_pat {
            return Err(EdtError::pre("only interface edges may be deleted"));
        }
        to_remove.push((sid(u), sid(v)));
    }
    for (iu, iv) in to_remove {
        d0.remove_edge(iu, iv);
    }
    Ok(d0)
}

/// Searches for a conformal cross over the conformal cycle `c`: two disjoint
/// C-paths whose endpoints interleave on C and whose union with C is
/// conformal and matching covered.
pub fn find_conformal_cross(
    b: &MatchedBipartite,
    c: &[u32],
    gate: usize,
) -> Result<Option<(Vec<u32>, Vec<u32>)>> {
    let n = b.n();
    if n > gate {
        return Err(EdtError::gate("conformal cross search", n, gate));
    }
    let cset = Bitset::from_iter(n, c.iter().map(|&v| v as usize));
    if !b.graph.is_conformal_set(&cset) {
        return Err(EdtError::pre("cycle is not conformal"));
    }
    let pos: HashMap<u32, usize> = c.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    // enumerate C-paths: internally disjoint from C, endpoints distinct on C
    let mut cpaths: Vec<Vec<u32>> = Vec::new();
    fn grow(
        b: &Bipartite,
        cset: &Bitset,
        path: &mut Vec<u32>,
        used: &mut Bitset,
        out: &mut Vec<Vec<u32>>,
    ) {
        let cur = *path.last().unwrap();
        for &w in b.adj(cur) {
            if cset.contains(w as usize) {
                if w != path[0] && (path.len() > 1 || true) {
                    let mut p = path.clone();
                    p.push(w);
                    out.push(p);
                }
            } else if !used.contains(w as usize) {
                used.insert(w as usize);
                path.push(w);
                grow(b, cset, path, used, out);
                path.pop();
                used.remove(w as usize);
            }
        }
    }
    for &s in c {
        let mut used = Bitset::new(n);
        grow(&b.graph, &cset, &mut vec![s], &mut used, &mut cpaths);
    }
    // dedupe reversed duplicates
    cpaths.retain(|p| p[0] < *p.last().unwrap() || p.len() == 2 && p[0] < p[1]);
    for i in 0..cpaths.len() {
        for j in i + 1..cpaths.len() {
            let l = &cpaths[i];
            let r = &cpaths[j];
            let lset = Bitset::from_iter(n, l.iter().map(|&v| v as usize));
            let rset = Bitset::from_iter(n, r.iter().map(|&v| v as usize));
            if lset.intersects(&rset) {
                continue;
            }
            // interleaving endpoints l1, r1, l2, r2 in cyclic order on C
            let (l1, l2) = (pos[&l[0]], pos[l.last().unwrap()]);
            let (r1, r2) = (pos[&r[0]], pos[r.last().unwrap()]);
            let between = |a: usize, b: usize, x: usize| {
                // x strictly between a and b going forward cyclically
                if a < b {
                    a < x && x < b
                } else {
                    x > a || x < b
                }
            };
            let interleaved =
                between(l1, l2, r1) != between(l1, l2, r2);
            if !interleaved {
                continue;
            }
            let mut sub = cset.clone();
            sub.union_with(&lset);
            sub.union_with(&rset);
            if !b.graph.is_conformal_set(&sub) {
                continue;
            }
            // matching covered subgraph check
            if subgraph_matching_covered(&b.graph, &sub, c, l, r) {
                return Ok(Some((l.clone(), r.clone())));
            }
        }
    }
    Ok(None)
}

/// Checks that the subgraph consisting of cycle+paths is matching covered.
fn subgraph_matching_covered(
    b: &Bipartite,
    verts: &Bitset,
    c: &[u32],
    l: &[u32],
    r: &[u32],
) -> bool {
    // collect the subgraph's edges
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut push = |u: u32, v: u32| {
        let e = (u.min(v), u.max(v));
        if !edges.contains(&e) {
            edges.push(e);
        }
    };
    for i in 0..c.len() {
        push(c[i], c[(i + 1) % c.len()]);
    }
    for p in [l, r] {
        for w in p.windows(2) {
            push(w[0], w[1]);
        }
    }
    // build the subgraph and test 1-extendability edge by edge
    let names: Vec<String> = verts.iter().map(|v| b.name(v as u32).to_string()).collect();
    let mut sg = Bipartite::from_edges(
        edges
            .iter()
            .map(|&(u, v)| (b.name(u), b.name(v)))
            .collect::<Vec<_>>(),
    )
    .expect("subgraph of bipartite graph is bipartite");
    let _ = names;
    if sg.n() % 2 == 1 {
        return false;
    }
    let all = sg.full_set();
    if !sg.has_perfect_matching_on(&all) {
        return false;
    }
    for (u, v) in sg.undirected_edges() {
        let mut rest = all.clone();
        rest.remove(u as usize);
        rest.remove(v as usize);
        if !sg.has_perfect_matching_on(&rest) {
            return false;
        }
    }
    let _ = &mut sg;
    true
}

/// The Heawood graph with the designated perfect matching of consecutive
/// rim pairs: a 14-cycle plus chords five steps ahead from every odd
/// position.
pub fn heawood() -> MatchedBipartite {
    let names: Vec<String> = (1..=14).map(|i| format!("h{i}")).collect();
    let mut edges: Vec<(String, String)> = Vec::new();
    for i in 1..=14usize {
        let j = i % 14 + 1;
        edges.push((names[i - 1].clone(), names[j - 1].clone()));
    }
    for i in [1usize, 3, 5, 7, 9, 11, 13] {
        let j = (i + 5 - 1) % 14 + 1;
        edges.push((names[i - 1].clone(), names[j - 1].clone()));
    }
    let graph = Bipartite::from_edges(edges.iter().map(|(u, v)| (u.as_str(), v.as_str()))).unwrap();
    let matching: Vec<(u32, u32)> = (0..7)
        .map(|k| {
            (
                graph.vid(&names[2 * k]).unwrap(),
                graph.vid(&names[2 * k + 1]).unwrap(),
            )
        })
        .collect();
    MatchedBipartite::new(graph, &matching).unwrap()
}

/// K3,3 with the perfect matching a_i - b_i.
pub fn k33() -> MatchedBipartite {
    let mut edges = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            edges.push((format!("a{i}"), format!("b{j}")));
        }
    }
    let graph = Bipartite::from_edges(edges.iter().map(|(u, v)| (u.as_str(), v.as_str()))).unwrap();
    let matching: Vec<(u32, u32)> = (0..3)
        .map(|i| {
            (
                graph.vid(&format!("a{i}")).unwrap(),
                graph.vid(&format!("b{i}")).unwrap(),
            )
        })
        .collect();
    MatchedBipartite::new(graph, &matching).unwrap()
}

/// C4 with one of its two perfect matchings designated.
pub fn c4() -> MatchedBipartite {
    let graph = Bipartite::from_edges([("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]).unwrap();
    let m = vec![
        (graph.vid("a").unwrap(), graph.vid("b").unwrap()),
        (graph.vid("c").unwrap(), graph.vid("d").unwrap()),
    ];
    MatchedBipartite::new(graph, &m).unwrap()
}
