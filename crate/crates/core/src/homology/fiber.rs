//! Homology of a cover of the fiber under the lifted monodromy, and the
//! first Betti number of the corresponding cover of the filled manifold.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::linalg::{dot, kernel_basis};
use super::matrix::IntMatrix;
use super::schreier::{reidemeister_schreier, schreier_transversal, SubgroupPresentation};
use super::snf::{cokernel, cokernel_bounded, free_rank_bound};
use crate::cover::{surgery_lifts, CoverRep, Intertwiner};
use crate::error::{Error, Result};
use crate::presentation::{
    fiber_action, mapping_torus_action, mapping_torus_presentation, staged_mapping_torus_presentation,
    GroupPresentation,
};
use crate::slope::Slope;
use crate::word::{boundary_word, TwistEndo, TwistGen, TwistWord, X, Y};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyCertificate {
    pub b1: usize,
    /// Torsion invariants; absent when the Smith form was too large to finish.
    #[serde(with = "crate::json::opt_bigint_vec")]
    pub torsion: Option<Vec<BigInt>>,
    pub fix_rank: usize,
    pub peripheral_rank: usize,
    #[serde(with = "crate::json::opt_bigint_vec")]
    pub witness: Option<Vec<BigInt>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPeripheral {
    pub fix_rank: usize,
    pub peripheral_rank: usize,
    /// A fixed class outside the boundary span.
    pub witness: Option<Vec<BigInt>>,
    /// A functional vanishing on every boundary class but not on the witness.
    pub separator: Option<Vec<BigInt>>,
}

fn fiber_transversal(rep: &CoverRep) -> SubgroupPresentation {
    schreier_transversal(&fiber_action(rep)).expect("cover reps are transitive")
}

/// Columns `A[:, k]` from the images `F(c, g)` of single edges, by summing
/// edge images along tree paths.
fn assemble(sp: &SubgroupPresentation, edge_image: &dyn Fn(usize, usize) -> Vec<i128>) -> Result<IntMatrix> {
    let dim = sp.rank();
    let n = sp.index;
    let mut order = vec![sp.basepoint];
    let mut k = 0;
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for d in 0..n {
        if let Some((p, _)) = sp.tree[d] {
            children[p].push(d);
        }
    }
    while k < order.len() {
        let c = order[k];
        k += 1;
        order.extend(children[c].iter().copied());
    }
    let mut potential = vec![vec![0i128; dim]; n];
    for &d in &order[1..] {
        let (p, l) = sp.tree[d].expect("non-root coset has a parent");
        let g = (l.unsigned_abs() - 1) as usize;
        let (img, sign) = if l > 0 {
            (edge_image(p, g), 1)
        } else {
            (edge_image(d, g), -1)
        };
        let mut v = potential[p].clone();
        for (a, b) in v.iter_mut().zip(&img) {
            *a = a.checked_add(sign * b).ok_or(Error::Overflow)?;
        }
        potential[d] = v;
    }
    let mut m = IntMatrix::zeros(dim, dim);
    for (col, &(c, g)) in sp.generators.iter().enumerate() {
        let d = sp.coset_table[g][c];
        let img = edge_image(c, g);
        for row in 0..dim {
            let v = potential[c][row] + img[row] - potential[d][row];
            if v != 0 {
                m.set(row, col, BigInt::from(v));
            }
        }
    }
    Ok(m)
}

/// The lifted monodromy on `H₁` of the cover surface, in the basis of
/// Schreier generators of the fiber action. `τ` is the intertwiner for `e`.
pub fn induced_fiber_action(rep: &CoverRep, e: &TwistEndo, tau: &Intertwiner) -> Result<IntMatrix> {
    if !tau.intertwines(rep, &rep.pullback_endo(e)) {
        return Err(Error::Precondition("τ does not intertwine the monodromy".into()));
    }
    let sp = fiber_transversal(rep);
    let tinv = tau.tau.inverse();
    let images = [e.x.letters(), e.y.letters()];
    let f = |c: usize, g: usize| {
        let mut acc = vec![0i64; sp.rank()];
        sp.rewrite_abelian(images[g], tinv.apply(c), &mut acc);
        acc.into_iter().map(i128::from).collect()
    };
    assemble(&sp, &f)
}

/// As [`induced_fiber_action`] for a twist word, composing one block at a
/// time so that long monodromies never expand into words.
pub fn induced_fiber_action_word(rep: &CoverRep, word: &TwistWord, tau: &Intertwiner) -> Result<IntMatrix> {
    if !tau.intertwines(rep, &rep.pullback(word)) {
        return Err(Error::Precondition("τ does not intertwine the monodromy".into()));
    }
    let sp = fiber_transversal(rep);
    let images = pushed_edge_images(rep, word, &sp)?;
    let tinv = tau.tau.inverse();
    let f = |c: usize, g: usize| images[g][tinv.apply(c)].clone();
    assemble(&sp, &f)
}

/// `images[g][c]`: Schreier coordinates of the path of `h(g)` from sheet `c`,
/// built block by block.
fn pushed_edge_images(rep: &CoverRep, word: &TwistWord, sp: &SubgroupPresentation) -> Result<Vec<Vec<Vec<i128>>>> {
    let n = rep.degree();
    let dim = sp.rank();
    // g_prev[g][c]: coordinates of the stage-(k-1) edge (c, g) pushed down to stage 0.
    let mut g_prev: Vec<Vec<Vec<i128>>> = (0..2)
        .map(|g| {
            (0..n)
                .map(|c| {
                    let mut v = vec![0i128; dim];
                    if let Some(k) = sp.edge(c, g) {
                        v[k] = 1;
                    }
                    v
                })
                .collect()
        })
        .collect();
    let (mut a, mut b) = (rep.px().clone(), rep.py().clone());
    for &(g, e) in word.blocks() {
        let perms = [a.clone(), b.clone()];
        let inv = [a.inverse(), b.inverse()];
        // Letters of b_k(x), b_k(y) over the previous stage's generators.
        let (wx, wy): (Vec<i32>, Vec<i32>) = match g {
            TwistGen::X => (vec![X], std::iter::once(Y).chain(power(X, e)).collect()),
            TwistGen::Y => (power(Y, e).chain(std::iter::once(X)).collect(), vec![Y]),
        };
        let walk = |w: &[i32], start: usize| -> Result<Vec<i128>> {
            let mut acc = vec![0i128; dim];
            let mut cur = start;
            for &l in w {
                let gi = (l.unsigned_abs() - 1) as usize;
                let (src, sign) = if l > 0 {
                    let s = cur;
                    cur = perms[gi].apply(cur);
                    (s, 1)
                } else {
                    cur = inv[gi].apply(cur);
                    (cur, -1)
                };
                for (x, y) in acc.iter_mut().zip(&g_prev[gi][src]) {
                    if *y != 0 {
                        *x = x.checked_add(sign * y).ok_or(Error::Overflow)?;
                    }
                }
            }
            Ok(acc)
        };
        let next_x = (0..n).map(|c| walk(&wx, c)).collect::<Result<Vec<_>>>()?;
        let next_y = (0..n).map(|c| walk(&wy, c)).collect::<Result<Vec<_>>>()?;
        g_prev = vec![next_x, next_y];
        match g {
            TwistGen::X => b = b.then(&a.pow(e)),
            TwistGen::Y => a = b.pow(e).then(&a),
        }
    }
    Ok(g_prev)
}

/// First Betti number of the mapping-torus cover (filled along `s` when
/// given) from 1-cocycles split into a fiber part and a vertical part.
///
/// With the fiber cocycle `f` vanishing on the Schreier tree, each cell of
/// `t g t⁻¹ = h(g)` at sheet `c` reads `v(c') − v(c) = f·(g at τc − h(g) at c)`
/// for the vertical values `v`; the filling cells add `Σ v + f·β^λ = 0` along
/// each lift of `t^μ β^λ`. The Betti number is the dimension of the solutions.
pub fn wang_b1(word: &TwistWord, rep: &CoverRep, tau: &Intertwiner, s: Option<Slope>) -> Result<usize> {
    if !tau.intertwines(rep, &rep.pullback(word)) {
        return Err(Error::Precondition("τ does not intertwine the monodromy".into()));
    }
    let sp = fiber_transversal(rep);
    let images = pushed_edge_images(rep, word, &sp)?;
    let n = rep.degree();
    let dim = sp.rank();
    let cols = dim + n;
    let perms = [rep.px().clone(), rep.py().clone()];
    let inv = [rep.px().inverse(), rep.py().inverse()];
    let tinv = tau.tau.inverse();
    let edge = |c: usize, g: usize| sp.edge(c, g);
    let mut rows: Vec<Vec<i128>> = Vec::new();
    for c in 0..n {
        let tc = tau.tau.apply(c);
        for g in 0..2 {
            let mut row = vec![0i128; cols];
            for (k, v) in images[g][c].iter().enumerate() {
                row[k] -= v;
            }
            if let Some(k) = edge(tc, g) {
                row[k] += 1;
            }
            let end = tinv.apply(perms[g].apply(tc));
            row[dim + c] += 1;
            row[dim + end] -= 1;
            rows.push(row);
        }
    }
    if let Some(s) = s {
        if !surgery_lifts(rep, tau, s) {
            return Err(Error::Precondition(format!("the surgery curve {s} does not lift")));
        }
        let beta = boundary_word().pow(s.lambda());
        for p in 0..n {
            let mut row = vec![0i128; cols];
            let mut cur = p;
            for _ in 0..s.mu().unsigned_abs() {
                if s.mu() > 0 {
                    row[dim + cur] += 1;
                    cur = tau.tau.apply(cur);
                } else {
                    cur = tinv.apply(cur);
                    row[dim + cur] -= 1;
                }
            }
            for &l in beta.letters() {
                let g = (l.unsigned_abs() - 1) as usize;
                if l > 0 {
                    if let Some(k) = edge(cur, g) {
                        row[k] += 1;
                    }
                    cur = perms[g].apply(cur);
                } else {
                    cur = inv[g].apply(cur);
                    if let Some(k) = edge(cur, g) {
                        row[k] -= 1;
                    }
                }
            }
            debug_assert_eq!(cur, p, "filling lifts close up");
            rows.push(row);
        }
    }
    let mut m = IntMatrix::zeros(rows.len(), cols);
    for (r, row) in rows.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            if v != 0 {
                m.set(r, c, BigInt::from(v));
            }
        }
    }
    Ok(kernel_basis(&m).len())
}

fn power(l: i32, e: i64) -> impl Iterator<Item = i32> {
    std::iter::repeat_n(if e > 0 { l } else { -l }, e.unsigned_abs() as usize)
}

/// One column per boundary circle of the cover surface: the class of
/// `β^len` read from the least sheet of each cycle of `P_β`.
pub fn boundary_classes(rep: &CoverRep) -> IntMatrix {
    let sp = fiber_transversal(rep);
    let cycles = rep.p_beta().cycles();
    let beta = boundary_word();
    let mut m = IntMatrix::zeros(sp.rank(), cycles.len());
    for (j, cyc) in cycles.iter().enumerate() {
        let mut acc = vec![0i64; sp.rank()];
        let w = beta.pow(cyc.len() as i64);
        let end = sp.rewrite_abelian(w.letters(), cyc[0], &mut acc);
        debug_assert_eq!(end, cyc[0]);
        for (i, v) in acc.into_iter().enumerate() {
            if v != 0 {
                m.set(i, j, BigInt::from(v));
            }
        }
    }
    m
}

/// Rank of `ker(A − I)`, rank of the boundary span, and a fixed class outside it.
pub fn fixed_and_peripheral(action: &IntMatrix, boundary_classes: &IntMatrix) -> FixedPeripheral {
    let fixed = kernel_basis(&action.sub_identity());
    let periph_rank = boundary_classes.cols() - kernel_basis(boundary_classes).len();
    // Functionals vanishing on the boundary span.
    let annihilators = kernel_basis(&boundary_classes.transpose());
    let mut witness = None;
    let mut separator = None;
    'search: for v in &fixed {
        for w in &annihilators {
            if !dot(w, v).is_zero() {
                witness = Some(v.clone());
                separator = Some(w.clone());
                break 'search;
            }
        }
    }
    FixedPeripheral {
        fix_rank: fixed.len(),
        peripheral_rank: periph_rank,
        witness,
        separator,
    }
}

/// An upper bound for the length of the expanded images of `x` and `y`.
pub fn expanded_length(word: &TwistWord) -> u128 {
    let (mut lx, mut ly) = (1u128, 1u128);
    for &(g, e) in word.blocks() {
        let e = e.unsigned_abs() as u128;
        match g {
            TwistGen::X => ly = ly.saturating_add(e.saturating_mul(lx)),
            TwistGen::Y => lx = lx.saturating_add(e.saturating_mul(ly)),
        }
    }
    lx.max(ly)
}

const FLAT_LIMIT: u128 = 512;

/// The mapping torus presentation, filled along `s` when given; staged
/// through one pair of generators per block when the flat relators would be long.
pub fn filled_presentation(word: &TwistWord, s: Option<Slope>) -> GroupPresentation {
    if expanded_length(word) > FLAT_LIMIT {
        staged_mapping_torus_presentation(word, s)
    } else {
        mapping_torus_presentation(word, s)
    }
}

/// Largest dense remainder diagonalised over big integers for torsion.
const TORSION_LIMIT: usize = 160;

/// `(b₁, torsion)` of the cover of the mapping torus (filled along `s` when
/// given) determined by `rep` and `τ`, by Reidemeister–Schreier and SNF.
pub fn mapping_torus_cover_homology(
    word: &TwistWord,
    rep: &CoverRep,
    tau: &Intertwiner,
    s: Option<Slope>,
) -> Result<(usize, Vec<BigInt>)> {
    let staged = expanded_length(word) > FLAT_LIMIT;
    let pres = filled_presentation(word, s);
    let action = mapping_torus_action(rep, word, tau, staged);
    let sp = reidemeister_schreier(&pres, &action)?;
    let g = cokernel(&sp.relation_matrix());
    Ok((g.free_rank, g.torsion))
}

/// An upper bound for `b₁` of the filled cover, exact when it is zero; far
/// cheaper than the full Smith form.
pub fn b1_filled_bound(word: &TwistWord, rep: &CoverRep, tau: &Intertwiner, s: Slope) -> Result<usize> {
    let staged = expanded_length(word) > FLAT_LIMIT;
    let pres = filled_presentation(word, Some(s));
    let action = mapping_torus_action(rep, word, tau, staged);
    let sp = reidemeister_schreier(&pres, &action)?;
    Ok(free_rank_bound(&sp.relation_matrix()))
}

/// Homology certificate for the cover of `M_h(μ, λ)` given by `(rep, τ)`.
pub fn b1_filled_cover(word: &TwistWord, rep: &CoverRep, tau: &Intertwiner, s: Slope) -> Result<HomologyCertificate> {
    if !tau.intertwines(rep, &rep.pullback(word)) {
        return Err(Error::Precondition("τ does not intertwine the monodromy".into()));
    }
    if !surgery_lifts(rep, tau, s) {
        return Err(Error::Precondition(format!("the surgery curve {s} does not lift")));
    }
    let staged = expanded_length(word) > FLAT_LIMIT;
    let pres = filled_presentation(word, Some(s));
    let sp = reidemeister_schreier(&pres, &mapping_torus_action(rep, word, tau, staged))?;
    let (b1, torsion) = cokernel_bounded(&sp.relation_matrix(), TORSION_LIMIT);
    let action = induced_fiber_action_word(rep, word, tau)?;
    let fp = fixed_and_peripheral(&action, &boundary_classes(rep));
    Ok(HomologyCertificate {
        b1,
        torsion,
        fix_rank: fp.fix_rank,
        peripheral_rank: fp.peripheral_rank,
        witness: fp.witness,
    })
}
