//! Reidemeister–Schreier rewriting for a finite-index subgroup given by a
//! transitive coset action.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::matrix::SparseRows;
use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::presentation::{CosetAction, GroupPresentation};
use crate::word::FreeWord;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupPresentation {
    pub index: usize,
    /// `coset_table[g][c]` is the coset `c·g`.
    pub coset_table: Vec<Vec<usize>>,
    pub basepoint: usize,
    /// Schreier generator `k` is the edge `(coset, generator index)`.
    pub generators: Vec<(usize, usize)>,
    /// Relators as words in the Schreier generators (1-based letters).
    pub relators: Vec<FreeWord>,
    /// For every coset, the tree edge that reaches it: `(parent, signed letter)`.
    pub tree: Vec<Option<(usize, i32)>>,
    #[serde(skip)]
    inverse_table: Vec<Vec<usize>>,
    #[serde(skip)]
    edge_index: Vec<Vec<Option<usize>>>,
}

/// A spanning-tree Schreier transversal of a coset action, without relators.
/// Useful for rewriting arbitrary words into subgroup generators.
pub fn schreier_transversal(action: &CosetAction) -> Result<SubgroupPresentation> {
    let n = action.degree();
    let ng = action.gens.len();
    let table: Vec<Vec<usize>> = action.gens.iter().map(|g| g.images().to_vec()).collect();
    let inverse_table: Vec<Vec<usize>> = action.gens.iter().map(|g| g.inverse().images().to_vec()).collect();
    let mut tree: Vec<Option<(usize, i32)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut is_tree = vec![vec![false; n]; ng];
    seen[action.basepoint] = true;
    let mut queue = vec![action.basepoint];
    let mut k = 0;
    while k < queue.len() {
        let c = queue[k];
        k += 1;
        for g in 0..ng {
            let d = table[g][c];
            if !seen[d] {
                seen[d] = true;
                tree[d] = Some((c, g as i32 + 1));
                is_tree[g][c] = true;
                queue.push(d);
            }
            let d = inverse_table[g][c];
            if !seen[d] {
                seen[d] = true;
                tree[d] = Some((c, -(g as i32 + 1)));
                is_tree[g][d] = true;
                queue.push(d);
            }
        }
    }
    if queue.len() != n {
        let refs: Vec<&Perm> = action.gens.iter().collect();
        return Err(Error::Disconnected {
            orbits: crate::perm::orbits(n, &refs),
        });
    }
    let mut generators = Vec::with_capacity(n * ng - n + 1);
    let mut edge_index = vec![vec![None; n]; ng];
    for c in 0..n {
        for g in 0..ng {
            if !is_tree[g][c] {
                edge_index[g][c] = Some(generators.len());
                generators.push((c, g));
            }
        }
    }
    Ok(SubgroupPresentation {
        index: n,
        coset_table: table,
        basepoint: action.basepoint,
        generators,
        relators: Vec::new(),
        tree,
        inverse_table,
        edge_index,
    })
}

/// Presentation of the stabiliser of the basepoint.
pub fn reidemeister_schreier(ambient: &GroupPresentation, action: &CosetAction) -> Result<SubgroupPresentation> {
    if action.gens.len() != ambient.generator_count() {
        return Err(Error::Malformed(format!(
            "action has {} generators, presentation {}",
            action.gens.len(),
            ambient.generator_count()
        )));
    }
    let mut sp = schreier_transversal(action)?;
    let mut relators = Vec::with_capacity(ambient.relators.len() * sp.index);
    for r in &ambient.relators {
        for c in 0..sp.index {
            let (w, end) = sp.rewrite(r, c);
            if end != c {
                return Err(Error::RelatorNontrivial(format!("{r} moves coset {c} to {end}")));
            }
            if !w.is_empty() {
                relators.push(w);
            }
        }
    }
    sp.relators = relators;
    Ok(sp)
}

impl SubgroupPresentation {
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn ambient_generators(&self) -> usize {
        self.coset_table.len()
    }

    /// Index of the Schreier generator for edge `(c, g)`, or `None` for tree edges.
    pub fn edge(&self, c: usize, g: usize) -> Option<usize> {
        self.edge_index[g][c]
    }

    /// Walks `w` from coset `start`, visiting each edge: calls `f(k, ±1)` for
    /// every non-tree edge crossed, and returns the end coset.
    pub fn walk(&self, w: &[i32], start: usize, mut f: impl FnMut(usize, i64)) -> usize {
        let mut cur = start;
        for &l in w {
            let g = (l.unsigned_abs() - 1) as usize;
            if l > 0 {
                if let Some(k) = self.edge_index[g][cur] {
                    f(k, 1);
                }
                cur = self.coset_table[g][cur];
            } else {
                let prev = self.inverse_table[g][cur];
                if let Some(k) = self.edge_index[g][prev] {
                    f(k, -1);
                }
                cur = prev;
            }
        }
        cur
    }

    /// Rewrites `w` read from coset `start`; returns the word and the end coset.
    pub fn rewrite(&self, w: &FreeWord, start: usize) -> (FreeWord, usize) {
        let mut letters = Vec::new();
        let end = self.walk(w.letters(), start, |k, s| letters.push(s as i32 * (k as i32 + 1)));
        (FreeWord::new(letters), end)
    }

    /// Exponent-sum vector of the rewritten word.
    pub fn rewrite_abelian(&self, w: &[i32], start: usize, acc: &mut [i64]) -> usize {
        self.walk(w, start, |k, s| acc[k] += s)
    }

    /// Tree path from the basepoint to coset `c`, as an ambient word.
    pub fn transversal_word(&self, mut c: usize) -> FreeWord {
        let mut rev = Vec::new();
        while let Some((p, l)) = self.tree[c] {
            rev.push(l);
            c = p;
        }
        rev.reverse();
        FreeWord::new(rev)
    }

    /// Schreier generator `k` as an ambient word `u_c g u_{c·g}⁻¹`.
    pub fn generator_word(&self, k: usize) -> FreeWord {
        let (c, g) = self.generators[k];
        let d = self.coset_table[g][c];
        let w = &self.transversal_word(c) * &FreeWord::gen(g as i32 + 1);
        &w * &self.transversal_word(d).inverse()
    }

    /// Abelianized relators as sparse rows over the Schreier generators.
    pub fn relation_matrix(&self) -> SparseRows {
        let mut m = SparseRows::new(self.rank());
        for r in &self.relators {
            let mut entries: Vec<(usize, BigInt)> = Vec::new();
            for &l in r.letters() {
                let k = (l.unsigned_abs() - 1) as usize;
                entries.push((k, BigInt::from(l.signum())));
            }
            m.push(entries);
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::snf::cokernel;

    #[test]
    fn nielsen_schreier_index_two() {
        let free = GroupPresentation::free(2);
        let act = CosetAction::new(vec![Perm::cycle(2), Perm::identity(2)], 0).unwrap();
        let sp = reidemeister_schreier(&free, &act).unwrap();
        assert_eq!(sp.rank(), 3);
        assert!(sp.relators.is_empty());
    }

    #[test]
    fn generator_words_fix_basepoint() {
        let free = GroupPresentation::free(2);
        let act = CosetAction::new(vec![Perm::cycle(3), Perm::from_cycles(3, &[&[0, 1]]).unwrap()], 0).unwrap();
        let sp = reidemeister_schreier(&free, &act).unwrap();
        assert_eq!(sp.rank(), 1 + 3);
        for k in 0..sp.rank() {
            let w = sp.generator_word(k);
            assert_eq!(act.trace(0, &w), 0);
            let (rw, end) = sp.rewrite(&w, 0);
            assert_eq!(end, 0);
            assert_eq!(rw, FreeWord::gen(k as i32 + 1));
        }
    }

    #[test]
    fn nontrivial_relator_rejected() {
        let p = GroupPresentation::new(vec!["a".into()], vec![FreeWord::gen(1).pow(2)]).unwrap();
        let act = CosetAction::new(vec![Perm::cycle(3)], 0).unwrap();
        assert!(matches!(
            reidemeister_schreier(&p, &act),
            Err(Error::RelatorNontrivial(_))
        ));
    }

    #[test]
    fn cyclic_subgroup_of_z() {
        // ⟨a | a^6⟩ at index 2: the subgroup is Z/3.
        let p = GroupPresentation::new(vec!["a".into()], vec![FreeWord::gen(1).pow(6)]).unwrap();
        let act = CosetAction::new(vec![Perm::cycle(2)], 0).unwrap();
        let sp = reidemeister_schreier(&p, &act).unwrap();
        let g = cokernel(&sp.relation_matrix());
        assert_eq!(g.free_rank, 0);
        assert_eq!(g.torsion, vec![BigInt::from(3)]);
    }
}
