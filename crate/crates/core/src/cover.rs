//! Finite covers of the once-punctured torus and lifts of the monodromy.
//!
//! Sheets are `(row i, column j)` flattened to `i·d + j`. `P_y` advances the
//! row, `P_x` permutes the columns of row `i` by `σ_i`. Permutations act on
//! the right, so the loop `w = g1 g2 ..` sends sheet `s` to `s·g1·g2..`.
//!
//! An intertwiner `τ` for a monodromy `h` satisfies `τ(s·h(w)) = τ(s)·w`;
//! it is the action of the suspension loop `t` on sheets.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{orbits, Perm};
use crate::slope::Slope;
use crate::word::{boundary_word, FreeWord, TwistEndo, TwistGen, TwistWord, X, Y};

/// Vertical-cut data: `n` rows of width `d`, row `i` glued by `σ_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawCut", into = "RawCut")]
pub struct CutData {
    width: usize,
    sigma: Vec<Perm>,
}

#[derive(Serialize, Deserialize)]
struct RawCut {
    rows: usize,
    width: usize,
    sigma: Vec<Perm>,
}

impl TryFrom<RawCut> for CutData {
    type Error = Error;
    fn try_from(r: RawCut) -> Result<Self> {
        if r.rows != r.sigma.len() {
            return Err(Error::Malformed(format!(
                "rows = {} but {} permutations given",
                r.rows,
                r.sigma.len()
            )));
        }
        CutData::new(r.width, r.sigma)
    }
}

impl From<CutData> for RawCut {
    fn from(c: CutData) -> Self {
        RawCut {
            rows: c.sigma.len(),
            width: c.width,
            sigma: c.sigma,
        }
    }
}

impl CutData {
    pub fn new(width: usize, sigma: Vec<Perm>) -> Result<Self> {
        if width == 0 || sigma.is_empty() {
            return Err(Error::Malformed("cut data needs n ≥ 1 rows of width d ≥ 1".into()));
        }
        if let Some(p) = sigma.iter().find(|p| p.degree() != width) {
            return Err(Error::InvalidPermutation(format!(
                "{p} has degree {} but the width is {width}",
                p.degree()
            )));
        }
        Ok(CutData { width, sigma })
    }

    /// All rows uncut: the `Z_d × Z_n` cover when every `σ_i` is a `d`-cycle,
    /// or `d` disjoint row-cycles when every `σ_i` is trivial.
    pub fn uniform(rows: usize, sigma: Perm) -> Result<Self> {
        let width = sigma.degree();
        CutData::new(width, vec![sigma; rows])
    }

    pub fn rows(&self) -> usize {
        self.sigma.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn sigma(&self) -> &[Perm] {
        &self.sigma
    }

    pub fn degree(&self) -> usize {
        self.rows() * self.width
    }

    /// `σ_1 σ_2 .. σ_{i+1}` (0-based `i`), read left to right.
    fn prefix(&self, i: usize) -> Perm {
        self.sigma[1..=i]
            .iter()
            .fold(self.sigma[0].clone(), |acc, s| acc.then(s))
    }
}

/// Condition I (`σ_i` commutes with `σ_1..σ_{i-1}`) and condition II (`σ_1..σ_n = 1`).
pub fn check_condition_i_ii(c: &CutData) -> (bool, bool) {
    let mut acc = Perm::identity(c.width);
    let mut cond_i = true;
    for s in &c.sigma {
        cond_i &= s.commutes_with(&acc);
        acc = acc.then(s);
    }
    (cond_i, acc.is_identity())
}

fn pow_wide(p: &Perm, e: i128) -> Perm {
    let ord = p.order() as i128;
    p.pow(e.rem_euclid(ord) as i64)
}

/// Condition III: `(σ_1..σ_i)^{Rμ} (σ_{i+1} σ_i⁻¹)^λ = 1` for every row, indices mod `n`.
pub fn check_condition_iii(c: &CutData, r: i64, s: Slope) -> bool {
    let n = c.rows();
    let rm = r as i128 * s.mu() as i128;
    (0..n).all(|i| {
        let next = &c.sigma[(i + 1) % n];
        let step = next.then(&c.sigma[i].inverse());
        pow_wide(&c.prefix(i), rm)
            .then(&pow_wide(&step, s.lambda() as i128))
            .is_identity()
    })
}

/// A transitive permutation representation of the fiber group `⟨x, y⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawRep", into = "RawRep")]
pub struct CoverRep {
    px: Perm,
    py: Perm,
    basepoint: usize,
}

#[derive(Serialize, Deserialize)]
struct RawRep {
    px: Perm,
    py: Perm,
    basepoint: usize,
}

impl TryFrom<RawRep> for CoverRep {
    type Error = Error;
    fn try_from(r: RawRep) -> Result<Self> {
        CoverRep::new(r.px, r.py, r.basepoint)
    }
}

impl From<CoverRep> for RawRep {
    fn from(r: CoverRep) -> Self {
        RawRep {
            px: r.px,
            py: r.py,
            basepoint: r.basepoint,
        }
    }
}

impl CoverRep {
    pub fn new(px: Perm, py: Perm, basepoint: usize) -> Result<Self> {
        if px.degree() != py.degree() || px.degree() == 0 {
            return Err(Error::InvalidPermutation(format!(
                "generator images have degrees {} and {}",
                px.degree(),
                py.degree()
            )));
        }
        if basepoint >= px.degree() {
            return Err(Error::Malformed(format!(
                "basepoint {basepoint} outside degree {}",
                px.degree()
            )));
        }
        let orbs = orbits(px.degree(), &[&px, &py]);
        if orbs.len() > 1 {
            return Err(Error::Disconnected { orbits: orbs });
        }
        Ok(CoverRep { px, py, basepoint })
    }

    pub fn trivial() -> Self {
        CoverRep {
            px: Perm::identity(1),
            py: Perm::identity(1),
            basepoint: 0,
        }
    }

    pub fn degree(&self) -> usize {
        self.px.degree()
    }

    pub fn px(&self) -> &Perm {
        &self.px
    }

    pub fn py(&self) -> &Perm {
        &self.py
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    /// Generator images indexed by the 1-based letters of [`FreeWord`].
    pub fn generator(&self, letter: i32) -> Perm {
        match letter {
            X => self.px.clone(),
            -1 => self.px.inverse(),
            Y => self.py.clone(),
            -2 => self.py.inverse(),
            _ => panic!("letter {letter} is not a fiber generator"),
        }
    }

    /// Exchanges the roles of `x` and `y`.
    pub fn swapped(&self) -> CoverRep {
        CoverRep {
            px: self.py.clone(),
            py: self.px.clone(),
            basepoint: self.basepoint,
        }
    }

    /// The permutation of a fiber-group word.
    pub fn eval(&self, w: &FreeWord) -> Perm {
        let (pxi, pyi) = (self.px.inverse(), self.py.inverse());
        let n = self.degree();
        let mut images: Vec<usize> = (0..n).collect();
        for &l in w.letters() {
            let p = match l {
                X => &self.px,
                -1 => &pxi,
                Y => &self.py,
                -2 => &pyi,
                _ => panic!("letter {l} is not a fiber generator"),
            };
            for v in images.iter_mut() {
                *v = p.apply(*v);
            }
        }
        Perm::from_images(images).expect("composition of permutations")
    }

    pub fn p_beta(&self) -> Perm {
        self.eval(&boundary_word())
    }

    /// Images `(P_{h(x)}, P_{h(y)})` of the pulled-back representation,
    /// computed block by block so long monodromies never expand to words.
    pub fn pullback(&self, word: &TwistWord) -> (Perm, Perm) {
        let (mut a, mut b) = (self.px.clone(), self.py.clone());
        for &(g, e) in word.blocks() {
            match g {
                TwistGen::X => b = b.then(&pow_wide(&a, e as i128)),
                TwistGen::Y => a = pow_wide(&b, e as i128).then(&a),
            }
        }
        (a, b)
    }

    pub fn pullback_endo(&self, e: &TwistEndo) -> (Perm, Perm) {
        (self.eval(&e.x), self.eval(&e.y))
    }
}

/// Builds the representation of the cut data; disconnected data is an error.
pub fn build_rep(c: &CutData) -> Result<CoverRep> {
    let (n, d) = (c.rows(), c.width);
    let mut px = vec![0; n * d];
    let mut py = vec![0; n * d];
    for i in 0..n {
        for j in 0..d {
            px[i * d + j] = i * d + c.sigma[i].apply(j);
            py[i * d + j] = ((i + 1) % n) * d + j;
        }
    }
    CoverRep::new(
        Perm::from_images(px).expect("row-wise bijection"),
        Perm::from_images(py).expect("row shift"),
        0,
    )
}

/// `(χ, boundary components)` of the cover surface.
pub fn euler_and_boundary(rep: &CoverRep) -> (i64, usize) {
    (-(rep.degree() as i64), rep.p_beta().cycle_count())
}

/// A lift of the monodromy to the cover, acting on sheets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Intertwiner {
    pub tau: Perm,
}

impl Intertwiner {
    /// Checks `τ(s·a) = τ(s)·x` and `τ(s·b) = τ(s)·y` for pulled-back images `(a, b)`.
    pub fn intertwines(&self, rep: &CoverRep, pulled: &(Perm, Perm)) -> bool {
        let t = &self.tau;
        t.degree() == rep.degree() && pulled.0.then(t) == t.then(&rep.px) && pulled.1.then(t) == t.then(&rep.py)
    }
}

/// Every `τ` with `τ(s·a) = τ(s)·x`, `τ(s·b) = τ(s)·y`, sorted.
pub fn intertwiners_for(rep: &CoverRep, pulled: &(Perm, Perm)) -> Vec<Intertwiner> {
    let n = rep.degree();
    let (a, b) = pulled;
    let moves = [
        (a.clone(), rep.px.clone()),
        (a.inverse(), rep.px.inverse()),
        (b.clone(), rep.py.clone()),
        (b.inverse(), rep.py.inverse()),
    ];
    let base = rep.basepoint;
    let mut out = Vec::new();
    'anchor: for anchor in 0..n {
        let mut img = vec![usize::MAX; n];
        let mut used = vec![false; n];
        img[base] = anchor;
        used[anchor] = true;
        let mut queue = vec![base];
        let mut k = 0;
        while k < queue.len() {
            let s = queue[k];
            k += 1;
            for (src, dst) in &moves {
                let s2 = src.apply(s);
                let t2 = dst.apply(img[s]);
                if img[s2] == usize::MAX {
                    if used[t2] {
                        continue 'anchor;
                    }
                    img[s2] = t2;
                    used[t2] = true;
                    queue.push(s2);
                } else if img[s2] != t2 {
                    continue 'anchor;
                }
            }
        }
        if queue.len() != n {
            continue;
        }
        let tau = Perm::from_images(img).expect("propagation yields a bijection");
        out.push(Intertwiner { tau });
    }
    out.sort();
    out
}

/// All lifts of the endomorphism `e`.
pub fn find_intertwiners(rep: &CoverRep, e: &TwistEndo) -> Vec<Intertwiner> {
    intertwiners_for(rep, &rep.pullback_endo(e))
}

/// All lifts of the monodromy of `word`.
pub fn find_intertwiners_for_word(rep: &CoverRep, word: &TwistWord) -> Vec<Intertwiner> {
    intertwiners_for(rep, &rep.pullback(word))
}

/// The deck group: permutations commuting with `P_x` and `P_y`.
pub fn deck_group(rep: &CoverRep) -> Vec<Intertwiner> {
    intertwiners_for(rep, &(rep.px.clone(), rep.py.clone()))
}

/// The lift of `D_x` that preserves rows, when conditions I and II hold.
pub fn canonical_dx_lift(c: &CutData) -> Option<Perm> {
    let (ci, cii) = check_condition_i_ii(c);
    if !(ci && cii) {
        return None;
    }
    let (n, d) = (c.rows(), c.width);
    let mut img = vec![0; n * d];
    for i in 0..n {
        // π_i = (σ_1 .. σ_i)⁻¹ in the right-action reading.
        let pi = c.prefix(i).inverse();
        for j in 0..d {
            img[i * d + j] = i * d + pi.apply(j);
        }
    }
    Some(Perm::from_images(img).expect("row-wise bijection"))
}

/// `T_x^R`: the lift of a word whose `D_y` exponents are multiples of the row count.
pub fn canonical_intertwiner(c: &CutData, word: &TwistWord) -> Option<Intertwiner> {
    let n = c.rows() as i64;
    let mut r = 0i64;
    for &(g, e) in word.blocks() {
        match g {
            TwistGen::X => r += e,
            TwistGen::Y if e % n != 0 => return None,
            TwistGen::Y => {}
        }
    }
    let tx = canonical_dx_lift(c)?;
    Some(Intertwiner {
        tau: pow_wide(&tx, r as i128),
    })
}

/// Whether every lift of `α^μ β^λ` closes up: `τ^μ P_β^λ = 1`.
pub fn surgery_lifts(rep: &CoverRep, tau: &Intertwiner, s: Slope) -> bool {
    pow_wide(&tau.tau, s.mu() as i128)
        .then(&pow_wide(&rep.p_beta(), s.lambda() as i128))
        .is_identity()
}

/// Boundary tori of the mapping-torus cover: orbits of `⟨P_β, τ⟩`.
pub fn boundary_tori(rep: &CoverRep, tau: &Intertwiner) -> usize {
    orbits(rep.degree(), &[&rep.p_beta(), &tau.tau]).len()
}

/// Orbits of `⟨P_β, τ⟩` as sheet sets.
pub fn boundary_orbits(rep: &CoverRep, tau: &Intertwiner) -> Vec<Vec<usize>> {
    orbits(rep.degree(), &[&rep.p_beta(), &tau.tau])
}

/// Sheets of each cycle of `P_β`: the boundary circles of the cover surface.
pub fn boundary_cycles(rep: &CoverRep) -> Vec<Vec<usize>> {
    rep.p_beta().cycles()
}

/// Cycle lengths of the generator and product images, a cheap obstruction
/// to lifting: `τ` conjugates `P_x` to `P_{h(x)}`.
pub fn cycle_signature(p: &Perm) -> BTreeSet<(usize, usize)> {
    let t = p.cycle_type();
    t.iter().map(|&l| (l, t.iter().filter(|&&m| m == l).count())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(n: usize, c: &[&[usize]]) -> Perm {
        Perm::from_cycles(n, c).unwrap()
    }

    fn w(s: &str) -> TwistWord {
        TwistWord::parse(s).unwrap()
    }

    #[test]
    fn conditions_examples() {
        let s1 = cyc(3, &[&[0, 1, 2]]);
        let s3 = cyc(3, &[&[0, 1]]);
        let c = CutData::new(3, vec![s1.clone(), s1.inverse(), s3.clone(), s3.inverse()]).unwrap();
        assert_eq!(check_condition_i_ii(&c), (true, true));
        let id = CutData::uniform(3, Perm::identity(2)).unwrap();
        assert_eq!(check_condition_i_ii(&id), (true, true));
        assert!(check_condition_iii(&id, 5, Slope::new(2, 7).unwrap()));
        let bad = CutData::new(3, vec![cyc(3, &[&[0, 1]]), cyc(3, &[&[0, 2]])]).unwrap();
        assert!(!check_condition_i_ii(&bad).1);
    }

    #[test]
    fn build_examples() {
        let c = CutData::uniform(4, Perm::identity(1)).unwrap();
        let rep = build_rep(&c).unwrap();
        assert!(rep.px().is_identity());
        assert_eq!(rep.py().cycle_type(), vec![4]);
        let c = CutData::new(3, vec![Perm::cycle(3), Perm::cycle(3).inverse()]).unwrap();
        assert_eq!(build_rep(&c).unwrap().degree(), 6);
        let c = CutData::uniform(2, Perm::identity(2)).unwrap();
        assert!(matches!(build_rep(&c), Err(Error::Disconnected { .. })));
    }

    #[test]
    fn euler_examples() {
        assert_eq!(euler_and_boundary(&CoverRep::trivial()), (-1, 1));
        let rep = build_rep(&CutData::uniform(3, Perm::cycle(2)).unwrap()).unwrap();
        assert_eq!(euler_and_boundary(&rep), (-6, 6));
    }

    #[test]
    fn deck_group_of_abelian_cover() {
        let rep = build_rep(&CutData::uniform(3, Perm::cycle(3)).unwrap()).unwrap();
        assert_eq!(deck_group(&rep).len(), 9);
        for n in [2, 3] {
            let rep = build_rep(&CutData::uniform(n, Perm::cycle(n)).unwrap()).unwrap();
            let taus = find_intertwiners_for_word(&rep, &w("Dx Dy"));
            assert_eq!(taus.len(), n * n);
            let e = crate::word::twist_endo(&w("Dx Dy"));
            assert_eq!(find_intertwiners(&rep, &e), taus);
        }
    }

    #[test]
    fn no_lift_when_cycle_types_differ() {
        // P_x has a fixed point but P_{D_y(x)} = P_y P_x does not.
        let c = CutData::new(3, vec![Perm::identity(3), Perm::cycle(3)]).unwrap();
        let rep = build_rep(&c).unwrap();
        let (a, _) = rep.pullback(&w("Dy"));
        assert_ne!(cycle_signature(&a), cycle_signature(rep.px()));
        assert!(find_intertwiners_for_word(&rep, &w("Dy")).is_empty());
    }

    #[test]
    fn pullback_matches_word_evaluation() {
        let c = CutData::new(3, vec![Perm::cycle(3), Perm::cycle(3).inverse(), Perm::identity(3)]).unwrap();
        let rep = build_rep(&c).unwrap();
        let word = w("Dx^2 Dy^-3 Dx Dy^5");
        let e = crate::word::twist_endo(&word);
        assert_eq!(rep.pullback(&word), rep.pullback_endo(&e));
    }

    #[test]
    fn canonical_lift_intertwines() {
        let s1 = cyc(4, &[&[0, 1, 2, 3]]);
        let s3 = cyc(4, &[&[0, 2]]);
        let c = CutData::new(4, vec![s1.clone(), s1.inverse(), s3.clone(), s3.inverse()]).unwrap();
        let rep = build_rep(&c).unwrap();
        let word = w("Dx^3 Dy^4 Dx^-1 Dy^8");
        let tau = canonical_intertwiner(&c, &word).unwrap();
        assert!(tau.intertwines(&rep, &rep.pullback(&word)));
        assert!(find_intertwiners_for_word(&rep, &word).contains(&tau));
    }

    #[test]
    fn trivial_cover_surgery_and_tori() {
        let rep = CoverRep::trivial();
        let tau = Intertwiner { tau: Perm::identity(1) };
        assert!(surgery_lifts(&rep, &tau, Slope::new(3, 7).unwrap()));
        assert_eq!(boundary_tori(&rep, &tau), 1);
        let rep = build_rep(&CutData::uniform(2, Perm::cycle(2)).unwrap()).unwrap();
        let id = Intertwiner { tau: Perm::identity(4) };
        assert_eq!(boundary_tori(&rep, &id), 4);
    }

    #[test]
    fn serde_round_trip() {
        let c = CutData::new(3, vec![Perm::cycle(3), Perm::cycle(3).inverse()]).unwrap();
        let js = serde_json::to_string(&c).unwrap();
        assert_eq!(js, r#"{"rows":2,"width":3,"sigma":[[1,2,0],[2,0,1]]}"#);
        let back: CutData = serde_json::from_str(&js).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<CutData>(r#"{"rows":3,"width":3,"sigma":[[1,2,0]]}"#).is_err());
        let rep = build_rep(&c).unwrap();
        let back: CoverRep = serde_json::from_str(&serde_json::to_string(&rep).unwrap()).unwrap();
        assert_eq!(back, rep);
    }
}
