//! Enumeration of subgroups of small index by coset-table search.
//!
//! Tables are extended one entry at a time in a fixed order; relators are
//! scanned from every coset to make deductions and detect contradictions,
//! and tables that are not minimal under a change of base coset are pruned.
//! Changing the base coset conjugates the subgroup, so each conjugacy class
//! of subgroups, equivalently each transitive action up to relabelling, is
//! reported exactly once.

use crate::perm::Perm;
use crate::presentation::{CosetAction, GroupPresentation};

const UNDEF: usize = usize::MAX;

/// Outcome of a search: the actions found and whether the search finished.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowIndexResult {
    pub actions: Vec<CosetAction>,
    pub complete: bool,
    pub nodes: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct LowIndexLimits {
    pub max_index: usize,
    /// Stop after visiting this many search nodes.
    pub node_budget: u64,
    /// Only report actions of exactly `max_index` points.
    pub exact_index: bool,
    /// Stop after this many actions.
    pub max_results: usize,
}

impl LowIndexLimits {
    pub fn up_to(max_index: usize) -> Self {
        LowIndexLimits {
            max_index,
            node_budget: 5_000_000,
            exact_index: false,
            max_results: usize::MAX,
        }
    }
}

struct Search<'a> {
    gens: usize,
    /// Relators as column indices (`2g` for `g`, `2g+1` for `g⁻¹`), plus inverses.
    rels: Vec<Vec<usize>>,
    limits: &'a LowIndexLimits,
    accept: &'a mut dyn FnMut(&CosetAction) -> bool,
    out: Vec<CosetAction>,
    nodes: u64,
    aborted: bool,
}

#[derive(Clone)]
struct Table {
    n: usize,
    rows: Vec<Vec<usize>>,
}

impl Table {
    fn define(&mut self, c: usize, col: usize, d: usize) -> bool {
        let inv = col ^ 1;
        match (self.rows[c][col], self.rows[d][inv]) {
            (UNDEF, UNDEF) => {
                self.rows[c][col] = d;
                self.rows[d][inv] = c;
                true
            }
            (x, y) => x == d && y == c,
        }
    }
}

impl Search<'_> {
    /// Scans every relator from every coset, filling single gaps, until stable.
    fn close(&self, t: &mut Table) -> bool {
        loop {
            let mut changed = false;
            for r in &self.rels {
                for c in 0..t.n {
                    // forward
                    let mut f = c;
                    let mut i = 0;
                    while i < r.len() && t.rows[f][r[i]] != UNDEF {
                        f = t.rows[f][r[i]];
                        i += 1;
                    }
                    if i == r.len() {
                        if f != c {
                            return false;
                        }
                        continue;
                    }
                    // backward
                    let mut b = c;
                    let mut j = r.len();
                    while j > i && t.rows[b][r[j - 1] ^ 1] != UNDEF {
                        b = t.rows[b][r[j - 1] ^ 1];
                        j -= 1;
                    }
                    if j == i {
                        if f != b {
                            return false;
                        }
                    } else if j == i + 1 {
                        if !t.define(f, r[i], b) {
                            return false;
                        }
                        changed = true;
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    /// Whether relabelling from another base coset gives a smaller table.
    fn is_canonical(&self, t: &Table) -> bool {
        let cols = 2 * self.gens;
        for base in 1..t.n {
            let mut fwd = vec![UNDEF; t.n];
            let mut bwd = vec![UNDEF; t.n];
            fwd[base] = 0;
            bwd[0] = base;
            let mut next = 1;
            'rows: for c in 0..t.n {
                let old_c = bwd[c];
                if old_c == UNDEF {
                    break;
                }
                for col in 0..cols {
                    let img = t.rows[old_c][col];
                    let orig = t.rows[c][col];
                    if img == UNDEF || orig == UNDEF {
                        break 'rows;
                    }
                    let relabel = if fwd[img] == UNDEF {
                        fwd[img] = next;
                        bwd[next] = img;
                        next += 1;
                        next - 1
                    } else {
                        fwd[img]
                    };
                    if relabel < orig {
                        return false;
                    }
                    if relabel > orig {
                        break 'rows;
                    }
                }
            }
        }
        true
    }

    fn first_gap(&self, t: &Table) -> Option<(usize, usize)> {
        for c in 0..t.n {
            for col in 0..2 * self.gens {
                if t.rows[c][col] == UNDEF {
                    return Some((c, col));
                }
            }
        }
        None
    }

    fn run(&mut self, t: Table) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.limits.node_budget || self.out.len() >= self.limits.max_results {
            self.aborted = true;
            return;
        }
        let Some((c, col)) = self.first_gap(&t) else {
            if !self.limits.exact_index || t.n == self.limits.max_index {
                let gens = (0..self.gens)
                    .map(|g| Perm::from_images((0..t.n).map(|i| t.rows[i][2 * g]).collect()).expect("complete table"))
                    .collect();
                let act = CosetAction { gens, basepoint: 0 };
                if (self.accept)(&act) {
                    self.out.push(act);
                }
            }
            return;
        };
        let inv = col ^ 1;
        let mut targets: Vec<usize> = (0..t.n).filter(|&d| t.rows[d][inv] == UNDEF).collect();
        if t.n < self.limits.max_index {
            targets.push(t.n);
        }
        for d in targets {
            let mut nt = t.clone();
            if d == nt.n {
                nt.n += 1;
                nt.rows.push(vec![UNDEF; 2 * self.gens]);
            }
            if !nt.define(c, col, d) || !self.close(&mut nt) || !self.is_canonical(&nt) {
                continue;
            }
            self.run(nt);
            if self.aborted {
                return;
            }
        }
    }
}

fn column_word(r: &[i32]) -> Vec<usize> {
    r.iter()
        .map(|&l| {
            let g = (l.unsigned_abs() - 1) as usize;
            if l > 0 {
                2 * g
            } else {
                2 * g + 1
            }
        })
        .collect()
}

/// Transitive actions of degree `≤ max_index`, one per conjugacy class of subgroups, through which
/// every relator acts trivially; `accept` filters results as they are found.
pub fn low_index_search(
    p: &GroupPresentation,
    limits: &LowIndexLimits,
    accept: &mut dyn FnMut(&CosetAction) -> bool,
) -> LowIndexResult {
    let gens = p.generator_count();
    let mut rels = Vec::new();
    for r in &p.relators {
        rels.push(column_word(r.letters()));
        rels.push(column_word(r.inverse().letters()));
    }
    let mut s = Search {
        gens,
        rels,
        limits,
        accept,
        out: Vec::new(),
        nodes: 0,
        aborted: false,
    };
    if limits.max_index >= 1 {
        let mut t = Table {
            n: 1,
            rows: vec![vec![UNDEF; 2 * gens]],
        };
        if s.close(&mut t) {
            s.run(t);
        }
    }
    LowIndexResult {
        complete: !s.aborted,
        nodes: s.nodes,
        actions: s.out,
    }
}

/// Subgroups of index `≤ max_index` up to conjugacy, as coset actions.
pub fn low_index_subgroups(p: &GroupPresentation, max_index: usize) -> LowIndexResult {
    low_index_search(p, &LowIndexLimits::up_to(max_index), &mut |_| true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::FreeWord;

    fn count_by_index(r: &LowIndexResult, n: usize) -> usize {
        r.actions.iter().filter(|a| a.degree() == n).count()
    }

    #[test]
    fn free_group_counts() {
        // Conjugacy classes of subgroups of F2 of index 1, 2, 3, 4: 1, 3, 7, 26.
        let r = low_index_subgroups(&GroupPresentation::free(2), 4);
        assert!(r.complete);
        let counts: Vec<usize> = (1..=4).map(|n| count_by_index(&r, n)).collect();
        assert_eq!(counts, vec![1, 3, 7, 26]);
    }

    #[test]
    fn cyclic_group() {
        let p = GroupPresentation::new(vec!["a".into()], vec![]).unwrap();
        let r = low_index_subgroups(&p, 6);
        for n in 1..=6 {
            assert_eq!(count_by_index(&r, n), 1);
        }
    }

    #[test]
    fn relators_restrict() {
        // Z/6 has one subgroup of each index dividing 6.
        let p = GroupPresentation::new(vec!["a".into()], vec![FreeWord::gen(1).pow(6)]).unwrap();
        let r = low_index_subgroups(&p, 6);
        let got: Vec<usize> = r.actions.iter().map(CosetAction::degree).collect();
        let mut got = got;
        got.sort();
        assert_eq!(got, vec![1, 2, 3, 6]);
        for a in &r.actions {
            assert!(a.violated_relator(&p).is_none());
        }
    }

    #[test]
    fn budget_flags_partial() {
        let limits = LowIndexLimits {
            node_budget: 10,
            ..LowIndexLimits::up_to(6)
        };
        let r = low_index_search(&GroupPresentation::free(2), &limits, &mut |_| true);
        assert!(!r.complete);
    }
}
