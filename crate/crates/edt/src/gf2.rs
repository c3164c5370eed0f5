//! Incremental GF(2) Gaussian elimination over bitset rows.
//!
//! Rows are fed one at a time and reduced against the current basis. Each
//! basis row remembers which input rows were combined into it, so an
//! inconsistency comes with the exact set of input rows whose sum is the
//! contradictory `0 = 1` equation.

use crate::bits::Bitset;

#[derive(Clone)]
struct Row {
    bits: Bitset,
    rhs: bool,
    #[allow(dead_code)]
    pivot: usize,
    /// Indices of the original input rows XOR-ed into this one.
    provenance: Vec<usize>,
}

pub struct Gf2System {
    ncols: usize,
    rows: Vec<Row>,
    pivot_of: Vec<Option<usize>>,
    fed: usize,
}

pub enum Feed {
    /// Row added a new pivot.
    Independent,
    /// Row reduced to 0 = 0.
    Dependent,
    /// Row reduced to 0 = 1; the given input rows sum to the contradiction.
    Inconsistent { combination: Vec<usize> },
}

impl Gf2System {
    pub fn new(ncols: usize) -> Self {
        Gf2System {
            ncols,
            rows: Vec::new(),
            pivot_of: vec![None; ncols],
            fed: 0,
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Feeds one equation `bits · x = rhs`.
    pub fn feed(&mut self, bits: Bitset, rhs: bool) -> Feed {
        debug_assert_eq!(bits.capacity(), self.ncols);
        let id = self.fed;
        self.fed += 1;
        let mut bits = bits;
        let mut rhs = rhs;
        let mut provenance = vec![id];
        loop {
            let pivot = match bits.first() {
                None => {
                    return if rhs {
                        Feed::Inconsistent {
                            combination: sorted(provenance),
                        }
                    } else {
                        Feed::Dependent
                    }
                }
                Some(p) => p,
            };
            match self.pivot_of[pivot] {
                Some(r) => {
                    bits.xor_with(&self.rows[r].bits);
                    rhs ^= self.rows[r].rhs;
                    xor_merge(&mut provenance, &self.rows[r].provenance);
                }
                None => {
                    self.pivot_of[pivot] = Some(self.rows.len());
                    self.rows.push(Row {
                        bits,
                        rhs,
                        pivot,
                        provenance: sorted(provenance),
                    });
                    return Feed::Independent;
                }
            }
        }
    }

    /// Checks whether `bits · x = rhs` is consistent with the current basis
    /// without modifying it.
    pub fn consistent_with(&self, bits: &Bitset, rhs: bool) -> bool {
        let mut bits = bits.clone();
        let mut rhs = rhs;
        loop {
            match bits.first() {
                None => return !rhs,
                Some(p) => match self.pivot_of[p] {
                    Some(r) => {
                        bits.xor_with(&self.rows[r].bits);
                        rhs ^= self.rows[r].rhs;
                    }
                    None => return true,
                },
            }
        }
    }

    /// Lexicographically smallest solution (reading variables in column
    /// order, 0 before 1). Assumes the fed system is consistent.
    pub fn lex_min_solution(&self) -> Vec<bool> {
        let mut sys = Gf2System {
            ncols: self.ncols,
            rows: self.rows.clone(),
            pivot_of: self.pivot_of.clone(),
            fed: self.fed,
        };
        let mut sol = vec![false; self.ncols];
        for j in 0..self.ncols {
            let mut unit = Bitset::new(self.ncols);
            unit.insert(j);
            let val = if sys.consistent_with(&unit, false) {
                false
            } else {
                true
            };
            sol[j] = val;
            match sys.feed(unit, val) {
                Feed::Inconsistent { .. } => unreachable!("greedy pin must stay consistent"),
                _ => {}
            }
        }
        sol
    }
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

/// Symmetric difference of two sorted index lists.
fn xor_merge(a: &mut Vec<usize>, b: &[usize]) {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    *a = out;
}
