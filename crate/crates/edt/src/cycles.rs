//! Dicycles and their enumeration.

use crate::bits::Bitset;
use crate::digraph::{Digraph, VId};
use crate::error::EdtError;

/// A directed cycle in canonical form: the vertex sequence is rotated so the
/// smallest vertex index comes first. Length is the edge count, which equals
/// the vertex count.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dicycle {
    verts: Vec<VId>,
}

impl Dicycle {
    /// Canonicalizes the given cyclic vertex sequence.
    pub fn new(seq: Vec<VId>) -> Dicycle {
        assert!(seq.len() >= 2, "dicycle needs length >= 2");
        let pos = seq
            .iter()
            .enumerate()
            .min_by_key(|&(_, v)| v)
            .map(|(i, _)| i)
            .unwrap();
        let mut verts = Vec::with_capacity(seq.len());
        verts.extend_from_slice(&seq[pos..]);
        verts.extend_from_slice(&seq[..pos]);
        Dicycle { verts }
    }

    pub fn verts(&self) -> &[VId] {
        &self.verts
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_even(&self) -> bool {
        self.verts.len() % 2 == 0
    }

    pub fn contains(&self, v: VId) -> bool {
        self.verts.contains(&v)
    }

    /// Edges including the wrap-around pair.
    pub fn edges(&self) -> impl Iterator<Item = (VId, VId)> + '_ {
        (0..self.verts.len()).map(move |i| {
            (
                self.verts[i],
                self.verts[(i + 1) % self.verts.len()],
            )
        })
    }

    pub fn vertex_set(&self, n: usize) -> Bitset {
        Bitset::from_iter(n, self.verts.iter().map(|&v| v as usize))
    }

    /// Checks vertex distinctness and that every edge, including the
    /// wrap-around, belongs to the host digraph.
    pub fn validate(&self, host: &Digraph) -> bool {
        if self.verts.len() < 2 {
            return false;
        }
        let mut seen = Bitset::new(host.n());
        for &v in &self.verts {
            if (v as usize) >= host.n() || seen.contains(v as usize) {
                return false;
            }
            seen.insert(v as usize);
        }
        self.edges().all(|(u, v)| host.has_edge(u, v))
    }

    pub fn names(&self, host: &Digraph) -> Vec<String> {
        self.verts.iter().map(|&v| host.name(v).to_string()).collect()
    }
}

impl std::fmt::Debug for Dicycle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Dicycle{:?}", self.verts)
    }
}

/// Error raised when enumeration overruns its cap; carries what was found.
#[derive(Debug)]
pub struct CycleCapExceeded {
    pub cap: usize,
    pub partial: Vec<Dicycle>,
}

impl From<CycleCapExceeded> for EdtError {
    fn from(c: CycleCapExceeded) -> EdtError {
        EdtError::cap("dicycle enumeration", c.cap)
    }
}

/// Enumerates every dicycle of `d`, Johnson-style, in canonical form.
///
/// The result is sorted by (length, vertex sequence). If more than `cap`
/// dicycles exist the error carries the partial list.
pub fn enumerate_dicycles(
    d: &Digraph,
    cap: usize,
) -> std::result::Result<Vec<Dicycle>, CycleCapExceeded> {
    enumerate_dicycles_in(d, &d.full_set(), cap)
}

/// Enumeration restricted to the subgraph induced on `alive`.
pub fn enumerate_dicycles_in(
    d: &Digraph,
    alive: &Bitset,
    cap: usize,
) -> std::result::Result<Vec<Dicycle>, CycleCapExceeded> {
    assert!(cap >= 1);
    let n = d.n();
    let mut found: Vec<Dicycle> = Vec::new();
    // Johnson: for each start vertex s ascending, enumerate cycles whose
    // minimum vertex is s, within the strong component of s among {>= s}.
    for s in 0..n {
        if !alive.contains(s) {
            continue;
        }
        let mut scope = Bitset::new(n);
        for v in s..n {
            if alive.contains(v) {
                scope.insert(v);
            }
        }
        let comps = d.strong_components_in(&scope);
        let comp = match comps.iter().find(|c| c.contains(&(s as VId))) {
            Some(c) if c.len() > 1 => d.vertex_set(c.iter().copied()),
            _ => continue,
        };
        let mut blocked = vec![false; n];
        let mut blist: Vec<Vec<VId>> = vec![Vec::new(); n];
        let mut path: Vec<VId> = vec![s as VId];
        blocked[s] = true;
        // stack of (vertex, next-neighbour cursor, found-cycle flag)
        let mut stack: Vec<(VId, usize, bool)> = vec![(s as VId, 0, false)];
        while !stack.is_empty() {
            let top = stack.len() - 1;
            let v = stack[top].0;
            let vu = v as usize;
            let mut advanced = false;
            while stack[top].1 < d.out(v).len() {
                let w = d.out(v)[stack[top].1];
                stack[top].1 += 1;
                if !comp.contains(w as usize) {
                    continue;
                }
                if w == s as VId {
                    if found.len() >= cap {
                        return Err(CycleCapExceeded { cap, partial: finish(found) });
                    }
                    found.push(Dicycle::new(path.clone()));
                    stack[top].2 = true;
                } else if !blocked[w as usize] {
                    path.push(w);
                    blocked[w as usize] = true;
                    stack.push((w, 0, false));
                    advanced = true;
                    break;
                }
            }
            if advanced {
                continue;
            }
            let closed_here = stack[top].2;
            if closed_here {
                unblock(vu, &mut blocked, &mut blist);
            } else {
                for &w in d.out(v) {
                    if comp.contains(w as usize) && !blist[w as usize].contains(&v) {
                        blist[w as usize].push(v);
                    }
                }
            }
            stack.pop();
            path.pop();
            if let Some(last) = stack.last_mut() {
                last.2 |= closed_here;
            }
        }
    }
    Ok(finish(found))
}

fn finish(mut found: Vec<Dicycle>) -> Vec<Dicycle> {
    found.sort_by(|a, b| (a.len(), a.verts()).cmp(&(b.len(), b.verts())));
    found
}

fn unblock(v: usize, blocked: &mut [bool], blist: &mut [Vec<VId>]) {
    let mut todo = vec![v];
    while let Some(v) = todo.pop() {
        blocked[v] = false;
        for w in std::mem::take(&mut blist[v]) {
            if blocked[w as usize] {
                todo.push(w as usize);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::parse_edge_list;

    /// Independent oracle: enumerate all cyclic vertex sequences directly.
    pub fn brute_force_dicycles(d: &Digraph) -> Vec<Dicycle> {
        fn extend(
            d: &Digraph,
            start: VId,
            path: &mut Vec<VId>,
            used: &mut Vec<bool>,
            out: &mut Vec<Dicycle>,
        ) {
            let last = *path.last().unwrap();
            for &w in d.out(last) {
                if w == start && path.len() >= 2 {
                    out.push(Dicycle::new(path.clone()));
                }
                if w > start && !used[w as usize] {
                    used[w as usize] = true;
                    path.push(w);
                    extend(d, start, path, used, out);
                    path.pop();
                    used[w as usize] = false;
                }
            }
        }
        let mut out = Vec::new();
        for s in d.vertices() {
            let mut used = vec![false; d.n()];
            used[s as usize] = true;
            extend(d, s, &mut vec![s], &mut used, &mut out);
        }
        out.sort_by(|a, b| (a.len(), a.verts()).cmp(&(b.len(), b.verts())));
        out.dedup();
        out
    }

    #[test]
    fn digon_has_one_dicycle() {
        let d = parse_edge_list("a b\nb a").unwrap();
        let cs = enumerate_dicycles(&d, 10).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].len(), 2);
        assert!(cs[0].is_even());
    }

    #[test]
    fn bidirected_triangle_has_five() {
        let d =
            parse_edge_list("a b\nb a\nb c\nc b\na c\nc a").unwrap();
        let cs = enumerate_dicycles(&d, 100).unwrap();
        assert_eq!(cs.len(), 5);
        let lens: Vec<usize> = cs.iter().map(|c| c.len()).collect();
        assert_eq!(lens, vec![2, 2, 2, 3, 3]);
        assert_eq!(cs, brute_force_dicycles(&d));
    }

    #[test]
    fn acyclic_is_empty() {
        let d = parse_edge_list("a b\nb c\na c").unwrap();
        assert!(enumerate_dicycles(&d, 10).unwrap().is_empty());
    }

    #[test]
    fn cap_exceeded_carries_partial() {
        let d =
            parse_edge_list("a b\nb a\nb c\nc b\na c\nc a").unwrap();
        let err = enumerate_dicycles(&d, 3).unwrap_err();
        assert_eq!(err.cap, 3);
        assert_eq!(err.partial.len(), 3);
    }

    #[test]
    fn every_cycle_validates() {
        let d = parse_edge_list("a b\nb c\nc a\nb a\nc d\nd a").unwrap();
        for c in enumerate_dicycles(&d, 1000).unwrap() {
            assert!(c.validate(&d));
        }
    }

    #[test]
    fn matches_brute_force_on_dense_example() {
        // K4 as a bidirected clique
        let mut txt = String::new();
        let names = ["a", "b", "c", "d"];
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    txt.push_str(&format!("{} {}\n", names[i], names[j]));
                }
            }
        }
        let d = parse_edge_list(&txt).unwrap();
        let fast = enumerate_dicycles(&d, 100_000).unwrap();
        let slow = brute_force_dicycles(&d);
        assert_eq!(fast, slow);
        // 6 digons + 8 triangles + 6 quadrilaterals
        assert_eq!(fast.len(), 20);
    }
}
