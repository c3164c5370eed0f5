//! Even-dicycle detection, the non-even test, odd bicycles, and butterfly
//! minor models of odd bicycles.
//!
//! A digraph is non-even when some 0,1-edge weighting gives every dicycle odd
//! total weight. At desk scale we decide this exactly by GF(2) feasibility
//! over the full dicycle family; dicycles do not form a vector space, so the
//! constraint set is taken whole rather than through a cycle basis.

use std::collections::BTreeMap;

use crate::bits::Bitset;
use crate::cycles::{enumerate_dicycles, enumerate_dicycles_in, Dicycle};
use crate::digraph::{Digraph, VId};
use crate::error::{EdtError, Result};
use crate::gf2::{Feed, Gf2System};

/// A 0,1-weighting, total on the edges of its host. Bits are stored in the
/// host's canonical edge order.
#[derive(Clone, Debug)]
pub struct EdgeWeighting {
    edges: Vec<(VId, VId)>,
    bits: Vec<bool>,
}

impl EdgeWeighting {
    pub fn new(host: &Digraph, bits: Vec<bool>) -> Self {
        let edges: Vec<_> = host.edges().collect();
        assert_eq!(edges.len(), bits.len());
        EdgeWeighting { edges, bits }
    }

    pub fn bit(&self, u: VId, v: VId) -> Option<bool> {
        self.edges
            .binary_search(&(u, v))
            .ok()
            .map(|i| self.bits[i])
    }

    pub fn cycle_weight(&self, c: &Dicycle) -> usize {
        c.edges()
            .map(|(u, v)| self.bit(u, v).expect("cycle edge must be weighted") as usize)
            .sum()
    }

    /// Serializes as `tail head bit` lines.
    pub fn to_lines(&self, host: &Digraph) -> String {
        let mut s = String::new();
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            s.push_str(&format!(
                "{} {} {}\n",
                host.name(u),
                host.name(v),
                self.bits[i] as u8
            ));
        }
        s
    }
}

/// Outcome of the non-even test.
pub enum NonEvenVerdict {
    /// Non-even, with a weighting under which every dicycle is odd.
    NonEven { witness: EdgeWeighting },
    /// Even: the listed dicycles have empty symmetric edge-difference and odd
    /// count, so no weighting can make them all odd.
    Even { certificate: Vec<Dicycle> },
}

impl NonEvenVerdict {
    pub fn is_non_even(&self) -> bool {
        matches!(self, NonEvenVerdict::NonEven { .. })
    }
}

/// Finds an even dicycle if one exists. Deterministic: the shortest, then
/// lexicographically smallest canonical form wins.
pub fn contains_even_dicycle(d: &Digraph, cap: usize) -> Result<Option<Dicycle>> {
    let cycles = enumerate_dicycles(d, cap)?;
    Ok(cycles.into_iter().find(|c| c.is_even()))
}

/// Same, restricted to the subgraph induced on `alive`.
pub fn contains_even_dicycle_in(d: &Digraph, alive: &Bitset, cap: usize) -> Result<Option<Dicycle>> {
    let cycles = enumerate_dicycles_in(d, alive, cap)?;
    Ok(cycles.into_iter().find(|c| c.is_even()))
}

/// Decides non-evenness by GF(2) feasibility over all dicycles.
pub fn is_non_even(d: &Digraph, cap: usize) -> Result<NonEvenVerdict> {
    let cycles = enumerate_dicycles(d, cap)?;
    let edges: Vec<(VId, VId)> = d.edges().collect();
    let eidx: BTreeMap<(VId, VId), usize> =
        edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut sys = Gf2System::new(edges.len());
    for c in &cycles {
        let mut row = Bitset::new(edges.len());
        for e in c.edges() {
            row.insert(eidx[&e]);
        }
        if let Feed::Inconsistent { combination } = sys.feed(row, true) {
            let certificate: Vec<Dicycle> =
                combination.into_iter().map(|i| cycles[i].clone()).collect();
            debug_assert!(certificate.len() % 2 == 1);
            return Ok(NonEvenVerdict::Even { certificate });
        }
    }
    let bits = sys.lex_min_solution();
    Ok(NonEvenVerdict::NonEven {
        witness: EdgeWeighting::new(d, bits),
    })
}

/// The odd bicycle of the given odd order: the bidirection of a cycle.
pub fn odd_bicycle(order: usize) -> Result<Digraph> {
    if order < 3 || order % 2 == 0 {
        return Err(EdtError::pre(format!(
            "odd bicycle order must be odd and >= 3, got {order}"
        )));
    }
    bidirected_cycle(order)
}

/// The bidirection of a cycle of arbitrary order >= 3.
pub fn bidirected_cycle(order: usize) -> Result<Digraph> {
    let mut d = Digraph::new();
    let names: Vec<String> = (0..order).map(|i| format!("v{i}")).collect();
    for n in &names {
        d.add_vertex(n);
    }
    for i in 0..order {
        let j = (i + 1) % order;
        d.add_edge(i as VId, j as VId)?;
        d.add_edge(j as VId, i as VId)?;
    }
    Ok(d)
}

/// The digraph F7: a 7-cycle with chords two steps backwards, the unique
/// non-planar exceptional dibrace in the structure of non-even digraphs.
pub fn f7() -> Digraph {
    let mut d = Digraph::new();
    for i in 0..7u32 {
        d.add_vertex(&format!("v{i}"));
    }
    for i in 0..7u32 {
        d.add_edge(i, (i + 1) % 7).unwrap();
        d.add_edge(i, (i + 5) % 7).unwrap();
    }
    d
}

/// One vertex image of a butterfly minor model: an in-arborescence with sink
/// `root` and an out-arborescence with source `root`, meeting only in `root`.
#[derive(Clone, Debug)]
pub struct VertexImage {
    pub root: VId,
    pub in_tree: Vec<(VId, VId)>,
    pub out_tree: Vec<(VId, VId)>,
}

impl VertexImage {
    pub fn singleton(v: VId) -> Self {
        VertexImage {
            root: v,
            in_tree: Vec::new(),
            out_tree: Vec::new(),
        }
    }

    /// Image consisting of a directed path with the root at its first vertex:
    /// the in-tree is trivial, the out-tree is the path.
    pub fn path(p: &[VId]) -> Self {
        VertexImage {
            root: p[0],
            in_tree: Vec::new(),
            out_tree: p.windows(2).map(|w| (w[0], w[1])).collect(),
        }
    }

    pub fn vertex_set(&self, n: usize) -> Bitset {
        let mut b = Bitset::new(n);
        b.insert(self.root as usize);
        for &(u, v) in self.in_tree.iter().chain(&self.out_tree) {
            b.insert(u as usize);
            b.insert(v as usize);
        }
        b
    }

    pub fn in_tree_verts(&self, n: usize) -> Bitset {
        let mut b = Bitset::new(n);
        b.insert(self.root as usize);
        for &(u, v) in &self.in_tree {
            b.insert(u as usize);
            b.insert(v as usize);
        }
        b
    }

    pub fn out_tree_verts(&self, n: usize) -> Bitset {
        let mut b = Bitset::new(n);
        b.insert(self.root as usize);
        for &(u, v) in &self.out_tree {
            b.insert(u as usize);
            b.insert(v as usize);
        }
        b
    }
}

/// A butterfly minor model of `pattern` inside some host digraph.
#[derive(Clone, Debug)]
pub struct MinorModel {
    pub pattern: Digraph,
    /// Indexed by pattern vertex id.
    pub vertex_images: Vec<VertexImage>,
    /// Pattern edge -> host path as a vertex sequence.
    pub edge_images: BTreeMap<(VId, VId), Vec<VId>>,
}

impl MinorModel {
    /// The identity model of `d` in itself.
    pub fn identity(d: &Digraph) -> MinorModel {
        MinorModel {
            pattern: d.clone(),
            vertex_images: d.vertices().map(VertexImage::singleton).collect(),
            edge_images: d.edges().map(|(u, v)| ((u, v), vec![u, v])).collect(),
        }
    }

    /// Union of all host vertices used by the model.
    pub fn host_vertices(&self, n: usize) -> Bitset {
        let mut b = Bitset::new(n);
        for img in &self.vertex_images {
            b.union_with(&img.vertex_set(n));
        }
        for p in self.edge_images.values() {
            for &v in p {
                b.insert(v as usize);
            }
        }
        b
    }

    /// The host subgraph described by the model.
    pub fn host_subgraph(&self, host: &Digraph) -> Digraph {
        let mut d = Digraph::new();
        for v in self.host_vertices(host.n()).iter() {
            d.add_vertex(host.name(v as VId));
        }
        let mut add = |u: VId, v: VId| {
            let a = d.vid(host.name(u)).unwrap();
            let b = d.vid(host.name(v)).unwrap();
            d.add_edge(a, b).unwrap();
        };
        for img in &self.vertex_images {
            for &(u, v) in img.in_tree.iter().chain(&img.out_tree) {
                add(u, v);
            }
        }
        for p in self.edge_images.values() {
            for w in p.windows(2) {
                add(w[0], w[1]);
            }
        }
        d
    }
}

fn is_in_arborescence(host: &Digraph, edges: &[(VId, VId)], root: VId) -> bool {
    // every non-root vertex has exactly one outgoing tree edge, the root none,
    // and everything reaches the root
    let n = host.n();
    if edges.is_empty() {
        return true;
    }
    for &(u, v) in edges {
        if !host.has_edge(u, v) {
            return false;
        }
    }
    let mut verts = Bitset::new(n);
    verts.insert(root as usize);
    for &(u, v) in edges {
        verts.insert(u as usize);
        verts.insert(v as usize);
    }
    let mut succ: BTreeMap<VId, VId> = BTreeMap::new();
    for &(u, v) in edges {
        if u == root || succ.insert(u, v).is_some() {
            return false;
        }
    }
    if verts.count() != edges.len() + 1 {
        return false;
    }
    // follow successor pointers to the root; cycle-free because each step
    // must terminate within |edges| hops
    for start in verts.iter() {
        let mut cur = start as VId;
        let mut steps = 0;
        while cur != root {
            match succ.get(&cur) {
                Some(&nxt) => cur = nxt,
                None => return false,
            }
            steps += 1;
            if steps > edges.len() {
                return false;
            }
        }
    }
    true
}

fn is_out_arborescence(host: &Digraph, edges: &[(VId, VId)], root: VId) -> bool {
    if !edges.iter().all(|&(u, v)| host.has_edge(u, v)) {
        return false;
    }
    if edges.is_empty() {
        return true;
    }
    // every non-root has exactly one incoming tree edge, root none, all reachable
    let mut pred: BTreeMap<VId, VId> = BTreeMap::new();
    let mut verts = std::collections::BTreeSet::new();
    verts.insert(root);
    for &(u, v) in edges {
        verts.insert(u);
        verts.insert(v);
        if v == root || pred.insert(v, u).is_some() {
            return false;
        }
    }
    if verts.len() != edges.len() + 1 {
        return false;
    }
    for &start in &verts {
        let mut cur = start;
        let mut steps = 0;
        while cur != root {
            match pred.get(&cur) {
                Some(&p) => cur = p,
                None => return false,
            }
            steps += 1;
            if steps > edges.len() {
                return false;
            }
        }
    }
    true
}

/// Checks the four butterfly-minor-model conditions and that the model's
/// images together realize exactly the pattern.
pub fn verify_butterfly_minor_model(host: &Digraph, model: &MinorModel) -> bool {
    let n = host.n();
    let h = &model.pattern;
    if model.vertex_images.len() != h.n() {
        return false;
    }
    // condition 1: each image is an in-arborescence plus an out-arborescence
    // sharing exactly the root
    for img in &model.vertex_images {
        if (img.root as usize) >= n {
            return false;
        }
        if !is_in_arborescence(host, &img.in_tree, img.root)
            || !is_out_arborescence(host, &img.out_tree, img.root)
        {
            return false;
        }
        let mut meet = img.in_tree_verts(n);
        meet.intersect_with(&img.out_tree_verts(n));
        if meet.count() != 1 || !meet.contains(img.root as usize) {
            return false;
        }
    }
    // condition 2: vertex images pairwise disjoint
    let sets: Vec<Bitset> = model
        .vertex_images
        .iter()
        .map(|i| i.vertex_set(n))
        .collect();
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            if sets[i].intersects(&sets[j]) {
                return false;
            }
        }
    }
    let mut all_images = Bitset::new(n);
    for s in &sets {
        all_images.union_with(s);
    }
    // condition 3: every pattern edge has a path image with the right
    // attachment points, internally avoiding all vertex images
    let mut hedges: Vec<(VId, VId)> = h.edges().collect();
    hedges.sort_unstable();
    let mut keys: Vec<(VId, VId)> = model.edge_images.keys().copied().collect();
    keys.sort_unstable();
    if hedges != keys {
        return false;
    }
    for (&(hu, hv), path) in &model.edge_images {
        if path.len() < 2 {
            return false;
        }
        let mut seen = Bitset::new(n);
        for w in path {
            if (*w as usize) >= n || seen.contains(*w as usize) {
                return false;
            }
            seen.insert(*w as usize);
        }
        if !path.windows(2).all(|w| host.has_edge(w[0], w[1])) {
            return false;
        }
        let tail = path[0];
        let head = *path.last().unwrap();
        if !model.vertex_images[hu as usize]
            .out_tree_verts(n)
            .contains(tail as usize)
        {
            return false;
        }
        if !model.vertex_images[hv as usize]
            .in_tree_verts(n)
            .contains(head as usize)
        {
            return false;
        }
        for &w in &path[1..path.len() - 1] {
            if all_images.contains(w as usize) {
                return false;
            }
        }
    }
    // condition 4: distinct edge images are internally disjoint
    let keys: Vec<(VId, VId)> = model.edge_images.keys().copied().collect();
    for i in 0..keys.len() {
        let pi = &model.edge_images[&keys[i]];
        let inner_i: Vec<VId> = pi[1..pi.len() - 1].to_vec();
        for k in keys.iter().skip(i + 1) {
            let pj = &model.edge_images[k];
            let inner_j = &pj[1..pj.len() - 1];
            if inner_i.iter().any(|v| inner_j.contains(v))
                || inner_i.contains(&pj[0])
                || inner_i.contains(pj.last().unwrap())
                || inner_j.contains(&pi[0])
                || inner_j.contains(pi.last().unwrap())
            {
                return false;
            }
        }
    }
    true
}

/// A weak odd bicycle: a verified butterfly minor model of an odd bicycle.
///
/// Searches exhaustively, gated by `max_host`. Order-3 models are found
/// through triples of dicycles whose pairwise intersections are three
/// disjoint shared subpaths; higher odd orders through branch-set assignment.
/// Returns `None` exactly when the host is non-even (a checked theorem, not
/// an assumption here: callers cross-check against `is_non_even`).
pub fn find_weak_odd_bicycle(
    d: &Digraph,
    max_host: usize,
    cycle_cap: usize,
) -> Result<Option<MinorModel>> {
    if d.n() > max_host {
        return Err(EdtError::gate("weak odd bicycle search", d.n(), max_host));
    }
    if let Some(m) = find_order3_model(d, cycle_cap)? {
        return Ok(Some(m));
    }
    let mut q = 5;
    while q <= d.n() {
        if let Some(m) = find_model_by_assignment(d, q) {
            return Ok(Some(m));
        }
        q += 2;
    }
    Ok(None)
}

/// The shared vertices of two dicycles when they form one directed subpath
/// traversed identically by both; `None` otherwise.
pub(crate) fn shared_subpath(a: &Dicycle, b: &Dicycle) -> Option<Vec<VId>> {
    let bset: std::collections::BTreeSet<VId> = b.verts().iter().copied().collect();
    let av = a.verts();
    let k = av.len();
    let marks: Vec<bool> = av.iter().map(|v| bset.contains(v)).collect();
    let cnt = marks.iter().filter(|&&m| m).count();
    if cnt == 0 {
        return None;
    }
    if cnt == k {
        return None; // identical vertex sets cannot be a proper shared path
    }
    // the marked positions must be one contiguous cyclic arc of a
    let first_after_gap = (0..k).find(|&i| !marks[i] && marks[(i + 1) % k])?;
    let start = (first_after_gap + 1) % k;
    let seq: Vec<VId> = (0..cnt).map(|i| av[(start + i) % k]).collect();
    let contiguous = (0..k).all(|i| {
        let pos = (i + k - start) % k;
        marks[i] == (pos < cnt)
    });
    if !contiguous {
        return None;
    }
    // b must traverse the same sequence
    let bv = b.verts();
    let bpos = bv.iter().position(|&v| v == seq[0])?;
    let same = (0..cnt).all(|i| bv[(bpos + i) % bv.len()] == seq[i]);
    if same {
        Some(seq)
    } else {
        None
    }
}

/// Arc of cycle `c` from just after the shared path `from` to the start of
/// shared path `to`, returned with its endpoints inside the shared paths.
fn connecting_arc(c: &Dicycle, from: &[VId], to: &[VId]) -> Option<Vec<VId>> {
    let cv = c.verts();
    let k = cv.len();
    let fend = cv.iter().position(|&v| v == *from.last().unwrap())?;
    let tstart = cv.iter().position(|&v| v == to[0])?;
    let mut arc = vec![cv[fend]];
    let mut i = (fend + 1) % k;
    loop {
        arc.push(cv[i]);
        if cv[i] == to[0] {
            break;
        }
        i = (i + 1) % k;
        if arc.len() > k {
            return None;
        }
    }
    if tstart == fend {
        return None;
    }
    Some(arc)
}

pub(crate) fn model_from_triple(
    d: &Digraph,
    a: &Dicycle,
    b: &Dicycle,
    c: &Dicycle,
    pab: Vec<VId>,
    pac: Vec<VId>,
    pbc: Vec<VId>,
) -> Option<MinorModel> {
    // pattern vertex 0 sits on a∩b, 1 on b∩c, 2 on a∩c
    let pattern = bidirected_cycle(3).ok()?;
    let images = vec![
        VertexImage::path(&pab),
        VertexImage::path(&pbc),
        VertexImage::path(&pac),
    ];
    let mut edge_images = BTreeMap::new();
    // cycle a connects images 0 (a∩b) and 2 (a∩c)
    edge_images.insert((0, 2), connecting_arc(a, &pab, &pac)?);
    edge_images.insert((2, 0), connecting_arc(a, &pac, &pab)?);
    // cycle b connects images 0 (a∩b) and 1 (b∩c)
    edge_images.insert((0, 1), connecting_arc(b, &pab, &pbc)?);
    edge_images.insert((1, 0), connecting_arc(b, &pbc, &pab)?);
    // cycle c connects images 1 (b∩c) and 2 (a∩c)
    edge_images.insert((1, 2), connecting_arc(c, &pbc, &pac)?);
    edge_images.insert((2, 1), connecting_arc(c, &pac, &pbc)?);
    let model = MinorModel {
        pattern,
        vertex_images: images,
        edge_images,
    };
    if verify_butterfly_minor_model(d, &model) {
        Some(model)
    } else {
        None
    }
}

fn find_order3_model(d: &Digraph, cycle_cap: usize) -> Result<Option<MinorModel>> {
    let cycles = enumerate_dicycles(d, cycle_cap)?;
    let n = cycles.len();
    let sets: Vec<Bitset> = cycles.iter().map(|c| c.vertex_set(d.n())).collect();
    // pairs with a single shared directed subpath
    let mut pair_path: BTreeMap<(usize, usize), Vec<VId>> = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            if !sets[i].intersects(&sets[j]) {
                continue;
            }
            if let Some(p) = shared_subpath(&cycles[i], &cycles[j]) {
                pair_path.insert((i, j), p);
            }
        }
    }
    let keyed: Vec<(usize, usize)> = pair_path.keys().copied().collect();
    for &(i, j) in &keyed {
        for k in j + 1..n {
            let (Some(pik), Some(pjk)) = (pair_path.get(&(i, k)), pair_path.get(&(j, k))) else {
                continue;
            };
            let pij = &pair_path[&(i, j)];
            let s_ij = Bitset::from_iter(d.n(), pij.iter().map(|&v| v as usize));
            let s_ik = Bitset::from_iter(d.n(), pik.iter().map(|&v| v as usize));
            let s_jk = Bitset::from_iter(d.n(), pjk.iter().map(|&v| v as usize));
            if s_ij.intersects(&s_ik) || s_ij.intersects(&s_jk) || s_ik.intersects(&s_jk) {
                continue;
            }
            if let Some(m) = model_from_triple(
                d,
                &cycles[i],
                &cycles[j],
                &cycles[k],
                pij.clone(),
                pik.clone(),
                pjk.clone(),
            ) {
                return Ok(Some(m));
            }
        }
    }
    Ok(None)
}

/// Branch-set assignment search for a model of the odd bicycle of order `q`.
fn find_model_by_assignment(d: &Digraph, q: usize) -> Option<MinorModel> {
    let pattern = bidirected_cycle(q).ok()?;
    find_minor_model(d, &pattern, d.n()).ok().flatten()
}

/// Exhaustive butterfly-minor-model search for an arbitrary pattern, gated on
/// host size. Branch-set assignments are enumerated smallest-total-size first.
pub fn find_minor_model(
    d: &Digraph,
    pattern: &Digraph,
    gate: usize,
) -> Result<Option<MinorModel>> {
    if d.n() > gate {
        return Err(EdtError::gate("minor model search", d.n(), gate));
    }
    let q = pattern.n();
    if d.n() < q {
        return Ok(None);
    }
    let spare = d.n() - q;
    for extra in 0..=spare {
        if let Some(m) = assign_images(d, pattern, q, extra) {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// Tries all ways to pick q disjoint branch sets with `extra` surplus
/// vertices distributed among them, then routes the 2q connecting paths.
fn assign_images(d: &Digraph, pattern: &Digraph, q: usize, extra: usize) -> Option<MinorModel> {
    let n = d.n();
    // choose sizes: q slots with total q + extra; sizes >= 1
    let mut sizes = vec![1usize; q];
    fn distribute(
        d: &Digraph,
        pattern: &Digraph,
        sizes: &mut Vec<usize>,
        slot: usize,
        left: usize,
        out: &mut Option<MinorModel>,
    ) {
        if out.is_some() {
            return;
        }
        if slot == sizes.len() {
            if left == 0 {
                *out = search_with_sizes(d, pattern, sizes);
            }
            return;
        }
        for take in 0..=left {
            sizes[slot] = 1 + take;
            distribute(d, pattern, sizes, slot + 1, left - take, out);
            if out.is_some() {
                return;
            }
        }
        sizes[slot] = 1;
    }
    let mut out = None;
    distribute(d, pattern, &mut sizes, 0, extra, &mut out);
    let _ = n;
    out
}

fn search_with_sizes(d: &Digraph, pattern: &Digraph, sizes: &[usize]) -> Option<MinorModel> {
    let q = sizes.len();
    let mut images: Vec<VertexImage> = Vec::new();
    let mut used = Bitset::new(d.n());
    search_images(d, pattern, sizes, q, &mut images, &mut used)
}

fn search_images(
    d: &Digraph,
    pattern: &Digraph,
    sizes: &[usize],
    q: usize,
    images: &mut Vec<VertexImage>,
    used: &mut Bitset,
) -> Option<MinorModel> {
    if images.len() == q {
        return route_edges(d, pattern, images, used);
    }
    let slot = images.len();
    let want = sizes[slot];
    // candidate images of exactly `want` vertices: pick a root, then grow an
    // in-tree/out-tree split
    let mut cands: Vec<VertexImage> = Vec::new();
    for root in d.vertices() {
        if used.contains(root as usize) {
            continue;
        }
        grow_images(d, used, root, want, &mut cands);
    }
    for img in cands {
        let vs = img.vertex_set(d.n());
        used.union_with(&vs);
        images.push(img);
        if let Some(m) = search_images(d, pattern, sizes, q, images, used) {
            return Some(m);
        }
        images.pop();
        used.subtract(&vs);
    }
    None
}

/// All images rooted at `root` with exactly `want` vertices avoiding `used`.
fn grow_images(d: &Digraph, used: &Bitset, root: VId, want: usize, out: &mut Vec<VertexImage>) {
    // states: (in-tree edges, out-tree edges, vertex set)
    let n = d.n();
    let mut start = Bitset::new(n);
    start.insert(root as usize);
    let mut stack: Vec<(Vec<(VId, VId)>, Vec<(VId, VId)>, Bitset)> =
        vec![(Vec::new(), Vec::new(), start)];
    while let Some((int, outt, vs)) = stack.pop() {
        if vs.count() == want {
            out.push(VertexImage {
                root,
                in_tree: int.clone(),
                out_tree: outt.clone(),
            });
            continue;
        }
        // extend the in-tree: new vertex u with edge (u, x), x already in the
        // in-tree part
        let in_verts: Vec<usize> = {
            let mut b = Bitset::new(n);
            b.insert(root as usize);
            for &(u, v) in &int {
                b.insert(u as usize);
                b.insert(v as usize);
            }
            b.iter().collect()
        };
        for &x in &in_verts {
            for &u in d.inn(x as VId) {
                if !used.contains(u as usize) && !vs.contains(u as usize) {
                    let mut vs2 = vs.clone();
                    vs2.insert(u as usize);
                    let mut int2 = int.clone();
                    int2.push((u, x as VId));
                    stack.push((int2, outt.clone(), vs2));
                }
            }
        }
        let out_verts: Vec<usize> = {
            let mut b = Bitset::new(n);
            b.insert(root as usize);
            for &(u, v) in &outt {
                b.insert(u as usize);
                b.insert(v as usize);
            }
            b.iter().collect()
        };
        for &x in &out_verts {
            for &w in d.out(x as VId) {
                if !used.contains(w as usize) && !vs.contains(w as usize) {
                    let mut vs2 = vs.clone();
                    vs2.insert(w as usize);
                    let mut outt2 = outt.clone();
                    outt2.push((x as VId, w));
                    stack.push((int.clone(), outt2, vs2));
                }
            }
        }
    }
    // deduplicate identical vertex-image shapes
    out.sort_by(|a, b| {
        (a.root, &a.in_tree, &a.out_tree).cmp(&(b.root, &b.in_tree, &b.out_tree))
    });
    out.dedup_by(|a, b| a.root == b.root && a.in_tree == b.in_tree && a.out_tree == b.out_tree);
}

fn route_edges(
    d: &Digraph,
    pattern: &Digraph,
    images: &[VertexImage],
    used: &Bitset,
) -> Option<MinorModel> {
    let edges: Vec<(VId, VId)> = pattern.edges().collect();
    let mut taken = used.clone();
    let mut paths: BTreeMap<(VId, VId), Vec<VId>> = BTreeMap::new();
    if route_rec(d, images, &edges, 0, &mut taken, &mut paths) {
        let model = MinorModel {
            pattern: pattern.clone(),
            vertex_images: images.to_vec(),
            edge_images: paths,
        };
        if verify_butterfly_minor_model(d, &model) {
            return Some(model);
        }
    }
    None
}

fn route_rec(
    d: &Digraph,
    images: &[VertexImage],
    edges: &[(VId, VId)],
    i: usize,
    taken: &mut Bitset,
    paths: &mut BTreeMap<(VId, VId), Vec<VId>>,
) -> bool {
    if i == edges.len() {
        return true;
    }
    let (hu, hv) = edges[i];
    let n = d.n();
    let tails = images[hu as usize].out_tree_verts(n);
    let heads = images[hv as usize].in_tree_verts(n);
    // DFS over paths from a tail to a head with interior outside taken
    let mut path: Vec<VId> = Vec::new();
    fn dfs(
        d: &Digraph,
        heads: &Bitset,
        taken: &mut Bitset,
        path: &mut Vec<VId>,
        images: &[VertexImage],
        edges: &[(VId, VId)],
        i: usize,
        paths: &mut BTreeMap<(VId, VId), Vec<VId>>,
    ) -> bool {
        let cur = *path.last().unwrap();
        for &w in d.out(cur) {
            if heads.contains(w as usize) {
                path.push(w);
                paths.insert(edges[i], path.clone());
                let interior: Vec<VId> = path[1..path.len() - 1].to_vec();
                for &x in &interior {
                    taken.insert(x as usize);
                }
                if route_rec(d, images, edges, i + 1, taken, paths) {
                    return true;
                }
                for &x in &interior {
                    taken.remove(x as usize);
                }
                paths.remove(&edges[i]);
                path.pop();
                // fall through: maybe a longer path through w works when w is
                // also an ordinary vertex, but head vertices end the path
            }
            if !taken.contains(w as usize) && !heads.contains(w as usize) {
                taken.insert(w as usize);
                path.push(w);
                if dfs(d, heads, taken, path, images, edges, i, paths) {
                    return true;
                }
                path.pop();
                taken.remove(w as usize);
            }
        }
        false
    }
    for t in tails.iter() {
        path.push(t as VId);
        if dfs(d, &heads, taken, &mut path, images, edges, i, paths) {
            return true;
        }
        path.pop();
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::parse_edge_list;

    #[test]
    fn digon_is_non_even_with_single_one_witness() {
        let d = parse_edge_list("a b\nb a").unwrap();
        match is_non_even(&d, 100).unwrap() {
            NonEvenVerdict::NonEven { witness } => {
                let ones: usize = [witness.bit(0, 1), witness.bit(1, 0)]
                    .iter()
                    .map(|b| b.unwrap() as usize)
                    .sum();
                assert_eq!(ones, 1);
            }
            _ => panic!("digon must be non-even"),
        }
    }

    #[test]
    fn directed_triangle_has_no_even_dicycle() {
        let d = parse_edge_list("a b\nb c\nc a").unwrap();
        assert!(contains_even_dicycle(&d, 100).unwrap().is_none());
    }

    #[test]
    fn digon_yields_the_digon() {
        let d = parse_edge_list("a b\nb a").unwrap();
        let c = contains_even_dicycle(&d, 100).unwrap().unwrap();
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn odd_bicycles_are_even_digraphs() {
        for k in [3usize, 5] {
            let d = odd_bicycle(k).unwrap();
            assert_eq!(d.n(), k);
            assert_eq!(d.m(), 2 * k);
            let v = is_non_even(&d, 100_000).unwrap();
            assert!(!v.is_non_even(), "odd bicycle of order {k} must be even");
            if let NonEvenVerdict::Even { certificate } = v {
                // the certificate must xor to the empty edge set with odd count
                assert_eq!(certificate.len() % 2, 1);
                let mut acc: std::collections::BTreeMap<(VId, VId), usize> = BTreeMap::new();
                let mut acc2 = acc.clone();
                for c in &certificate {
                    for e in c.edges() {
                        *acc.entry(e).or_default() += 1;
                    }
                }
                acc2.extend(acc.iter().filter(|(_, &v)| v % 2 == 1).map(|(k, v)| (*k, *v)));
                assert!(acc2.is_empty(), "symmetric difference must be empty");
            }
        }
        assert!(odd_bicycle(4).is_err());
        assert!(odd_bicycle(1).is_err());
    }

    #[test]
    fn odd_bicycle_contains_even_dicycle() {
        let d = odd_bicycle(5).unwrap();
        let c = contains_even_dicycle(&d, 100_000).unwrap().unwrap();
        assert_eq!(c.len(), 2, "a digon is the shortest even dicycle here");
    }

    #[test]
    fn f7_is_non_even() {
        let d = f7();
        assert_eq!(d.n(), 7);
        assert_eq!(d.m(), 14);
        assert!(is_non_even(&d, 1_000_000).unwrap().is_non_even());
    }

    #[test]
    fn witness_makes_every_dicycle_odd() {
        let d = f7();
        if let NonEvenVerdict::NonEven { witness } = is_non_even(&d, 1_000_000).unwrap() {
            for c in enumerate_dicycles(&d, 1_000_000).unwrap() {
                assert_eq!(witness.cycle_weight(&c) % 2, 1);
            }
        } else {
            panic!("f7 is non-even");
        }
    }

    #[test]
    fn identity_model_verifies() {
        let d = parse_edge_list("a b\nb a\nb c\nc a").unwrap();
        let m = MinorModel::identity(&d);
        assert!(verify_butterfly_minor_model(&d, &m));
    }

    #[test]
    fn overlapping_images_fail() {
        let d = odd_bicycle(3).unwrap();
        let mut m = MinorModel::identity(&d);
        m.vertex_images[1] = VertexImage::singleton(0);
        assert!(!verify_butterfly_minor_model(&d, &m));
    }

    #[test]
    fn odd_bicycle_contains_itself() {
        let d = odd_bicycle(3).unwrap();
        let m = find_weak_odd_bicycle(&d, 12, 10_000).unwrap().unwrap();
        assert!(verify_butterfly_minor_model(&d, &m));
        assert_eq!(m.pattern.n(), 3);
    }

    #[test]
    fn digon_has_no_weak_odd_bicycle() {
        let d = parse_edge_list("a b\nb a").unwrap();
        assert!(find_weak_odd_bicycle(&d, 12, 1000).unwrap().is_none());
    }

    #[test]
    fn subdivided_odd_bicycle_found_via_triples() {
        // order-3 bicycle with one edge subdivided twice
        let d = parse_edge_list(
            "a b\nb a\nb c\nc b\nc x\nx y\ny a\na c",
        )
        .unwrap();
        let m = find_weak_odd_bicycle(&d, 12, 10_000).unwrap().unwrap();
        assert!(verify_butterfly_minor_model(&d, &m));
    }

    #[test]
    fn bicycle_of_order_5_needs_q5_search() {
        let d = odd_bicycle(5).unwrap();
        let m = find_weak_odd_bicycle(&d, 12, 100_000).unwrap().unwrap();
        assert!(verify_butterfly_minor_model(&d, &m));
    }

    #[test]
    fn grid_with_jump_hosts_weak_odd_bicycle() {
        let (host, _grid, _jump) = crate::walls::grid_with_jump(3, 0, 3, true, 1).unwrap();
        let m = find_weak_odd_bicycle(&host, 20, 1_000_000).unwrap().unwrap();
        assert!(verify_butterfly_minor_model(&host, &m));
        assert_eq!(m.pattern.n(), 3);
    }

    #[test]
    fn weak_odd_bicycle_host_contains_even_dicycle() {
        let d = odd_bicycle(3).unwrap();
        let m = find_weak_odd_bicycle(&d, 12, 10_000).unwrap().unwrap();
        let host = m.host_subgraph(&d);
        assert!(contains_even_dicycle(&host, 100_000).unwrap().is_some());
    }
}
