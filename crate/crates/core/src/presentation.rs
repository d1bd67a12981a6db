//! Finitely presented groups, their permutation actions, and the
//! mapping-torus presentations of twist monodromies.

use serde::{Deserialize, Serialize};

use crate::cover::{CoverRep, Intertwiner};
use crate::error::{Error, Result};
use crate::perm::{orbits, Perm};
use crate::slope::Slope;
use crate::word::{boundary_word, twist_endo, FreeWord, TwistGen, TwistWord, T, X, Y};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupPresentation {
    pub names: Vec<String>,
    pub relators: Vec<FreeWord>,
}

impl GroupPresentation {
    pub fn new(names: Vec<String>, relators: Vec<FreeWord>) -> Result<Self> {
        let g = names.len() as i32;
        for r in &relators {
            if let Some(&l) = r.letters().iter().find(|l| l.abs() > g) {
                return Err(Error::Malformed(format!(
                    "relator {r} uses generator {} of {g}",
                    l.abs()
                )));
            }
        }
        let relators = relators
            .into_iter()
            .map(|r| r.cyclically_reduced())
            .filter(|r| !r.is_empty())
            .collect();
        Ok(GroupPresentation { names, relators })
    }

    /// `⟨g1, .., gk | ⟩`.
    pub fn free(rank: usize) -> Self {
        GroupPresentation {
            names: (1..=rank).map(|i| format!("g{i}")).collect(),
            relators: Vec::new(),
        }
    }

    pub fn generator_count(&self) -> usize {
        self.names.len()
    }

    /// Rows of exponent sums; the cokernel is the abelianization.
    pub fn abelianized_relators(&self) -> Vec<Vec<i64>> {
        self.relators
            .iter()
            .map(|r| r.abelianize(self.generator_count()))
            .collect()
    }
}

/// A permutation action of a presented group's generators; sheet
/// `basepoint` is the coset of the subgroup it describes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CosetAction {
    pub gens: Vec<Perm>,
    pub basepoint: usize,
}

impl CosetAction {
    pub fn new(gens: Vec<Perm>, basepoint: usize) -> Result<Self> {
        let n = gens.first().map(Perm::degree).unwrap_or(1);
        if gens.iter().any(|g| g.degree() != n) {
            return Err(Error::InvalidPermutation("generator images differ in degree".into()));
        }
        if basepoint >= n {
            return Err(Error::Malformed(format!("basepoint {basepoint} outside degree {n}")));
        }
        Ok(CosetAction { gens, basepoint })
    }

    pub fn degree(&self) -> usize {
        self.gens.first().map(Perm::degree).unwrap_or(1)
    }

    pub fn is_transitive(&self) -> bool {
        let refs: Vec<&Perm> = self.gens.iter().collect();
        orbits(self.degree(), &refs).len() == 1
    }

    /// Image of sheet `s` under the word.
    pub fn trace(&self, s: usize, w: &FreeWord) -> usize {
        w.letters().iter().fold(s, |cur, &l| {
            let g = &self.gens[(l.unsigned_abs() - 1) as usize];
            if l > 0 {
                g.apply(cur)
            } else {
                g.inverse_apply(cur)
            }
        })
    }

    pub fn eval(&self, w: &FreeWord) -> Perm {
        let inv: Vec<Perm> = self.gens.iter().map(Perm::inverse).collect();
        let mut images: Vec<usize> = (0..self.degree()).collect();
        for &l in w.letters() {
            let i = (l.unsigned_abs() - 1) as usize;
            let g = if l > 0 { &self.gens[i] } else { &inv[i] };
            for v in images.iter_mut() {
                *v = g.apply(*v);
            }
        }
        Perm::from_images(images).expect("words act bijectively")
    }

    /// The first relator that does not act as the identity.
    pub fn violated_relator<'a>(&self, p: &'a GroupPresentation) -> Option<&'a FreeWord> {
        p.relators.iter().find(|r| !self.eval(r).is_identity())
    }
}

/// `⟨x, y, t | t x t⁻¹ = h(x), t y t⁻¹ = h(y) [, t^μ β^λ]⟩`.
pub fn mapping_torus_presentation(word: &TwistWord, s: Option<Slope>) -> GroupPresentation {
    let e = twist_endo(word);
    let t = FreeWord::gen(T);
    let conj = |g: i32, img: &FreeWord| &(&(&t * &FreeWord::gen(g)) * &t.inverse()) * &img.inverse();
    let mut relators = vec![conj(X, &e.x), conj(Y, &e.y)];
    if let Some(s) = s {
        relators.push(filling_relator(T, s));
    }
    GroupPresentation::new(vec!["x".into(), "y".into(), "t".into()], relators).expect("relators use x, y, t")
}

fn filling_relator(t: i32, s: Slope) -> FreeWord {
    &FreeWord::gen(t).pow(s.mu()) * &boundary_word().pow(s.lambda())
}

/// Mapping-torus presentation with one generator pair per twist block:
/// `a_k = b_k(x)[a_{k-1}, c_{k-1}]`, `c_k = b_k(y)[a_{k-1}, c_{k-1}]`,
/// `t x t⁻¹ = a_w`, `t y t⁻¹ = c_w`. Relator lengths stay linear in the
/// block exponents even when the composite images are exponentially long.
pub fn staged_mapping_torus_presentation(word: &TwistWord, s: Option<Slope>) -> GroupPresentation {
    let w = word.block_count();
    let mut names = vec!["x".to_string(), "y".to_string(), "t".to_string()];
    for k in 1..=w {
        names.push(format!("a{k}"));
        names.push(format!("c{k}"));
    }
    let a = |k: usize| if k == 0 { X } else { 2 + 2 * k as i32 };
    let c = |k: usize| if k == 0 { Y } else { 3 + 2 * k as i32 };
    let mut relators = Vec::with_capacity(2 * w + 3);
    for (k, &(g, e)) in word.blocks().iter().enumerate() {
        let k = k + 1;
        let (pa, pc) = (FreeWord::gen(a(k - 1)), FreeWord::gen(c(k - 1)));
        let (ia, ic) = match g {
            TwistGen::X => (pa.clone(), &pc * &pa.pow(e)),
            TwistGen::Y => (&pc.pow(e) * &pa, pc.clone()),
        };
        relators.push(&FreeWord::gen(a(k)).inverse() * &ia);
        relators.push(&FreeWord::gen(c(k)).inverse() * &ic);
    }
    let t = FreeWord::gen(T);
    let conj = |g: i32, img: i32| &(&(&t * &FreeWord::gen(g)) * &t.inverse()) * &FreeWord::gen(img).inverse();
    relators.push(conj(X, a(w)));
    relators.push(conj(Y, c(w)));
    if let Some(s) = s {
        relators.push(filling_relator(T, s));
    }
    GroupPresentation::new(names, relators).expect("staged relators are in range")
}

/// The action of the (staged) mapping-torus group on the sheets of `rep`,
/// with `t` acting by the intertwiner.
pub fn mapping_torus_action(rep: &CoverRep, word: &TwistWord, tau: &Intertwiner, staged: bool) -> CosetAction {
    let mut gens = vec![rep.px().clone(), rep.py().clone(), tau.tau.clone()];
    if staged {
        let (mut a, mut b) = (rep.px().clone(), rep.py().clone());
        for &(g, e) in word.blocks() {
            match g {
                TwistGen::X => b = b.then(&a.pow(e)),
                TwistGen::Y => a = b.pow(e).then(&a),
            }
            gens.push(a.clone());
            gens.push(b.clone());
        }
    }
    CosetAction {
        gens,
        basepoint: rep.basepoint(),
    }
}

/// The fiber action alone, as a two-generator coset action.
pub fn fiber_action(rep: &CoverRep) -> CosetAction {
    CosetAction {
        gens: vec![rep.px().clone(), rep.py().clone()],
        basepoint: rep.basepoint(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{build_rep, find_intertwiners_for_word, CutData};

    fn w(s: &str) -> TwistWord {
        TwistWord::parse(s).unwrap()
    }

    #[test]
    fn three_generator_relators() {
        let p = mapping_torus_presentation(&w("Dx Dy"), None);
        assert_eq!(p.generator_count(), 3);
        assert_eq!(p.relators.len(), 2);
        let p = mapping_torus_presentation(&w("Dx Dy"), Some(Slope::new(1, 1).unwrap()));
        assert_eq!(p.relators.len(), 3);
        assert_eq!(p.abelianized_relators()[2], vec![0, 0, 1]);
    }

    #[test]
    fn staged_action_satisfies_relators() {
        let c = CutData::new(3, vec![Perm::cycle(3), Perm::cycle(3).inverse()]).unwrap();
        let rep = build_rep(&c).unwrap();
        let word = w("Dx^2 Dy^2 Dx^-1 Dy^4");
        let taus = find_intertwiners_for_word(&rep, &word);
        assert!(!taus.is_empty());
        let staged = staged_mapping_torus_presentation(&word, None);
        let act = mapping_torus_action(&rep, &word, &taus[0], true);
        assert_eq!(act.violated_relator(&staged), None);
        let flat = mapping_torus_presentation(&word, None);
        let act = mapping_torus_action(&rep, &word, &taus[0], false);
        assert_eq!(act.violated_relator(&flat), None);
    }
}
