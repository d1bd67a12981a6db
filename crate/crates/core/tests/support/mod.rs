//! Oracles and randomized drivers shared by the integration tests.
#![allow(dead_code)]

use fibercover::cover::{
    build_rep, canonical_intertwiner, check_condition_i_ii, check_condition_iii, euler_and_boundary,
    find_intertwiners_for_word, surgery_lifts, CoverRep, CutData,
};
use fibercover::error::Error;
use fibercover::homology::schreier::{reidemeister_schreier, schreier_transversal};
use fibercover::homology::snf::{cokernel, cokernel_bounded, free_rank_bound};
use fibercover::homology::{smith_normal_form, IntMatrix};
use fibercover::perm::Perm;
use fibercover::presentation::{fiber_action, CosetAction, GroupPresentation};
use fibercover::quotient::cases::{cut_data_from_action, template, CaseTag};
use fibercover::quotient::cyclic::{abelian_residues, cyclic_solution};
use fibercover::slope::Slope;
use fibercover::word::{TwistGen, TwistWord};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_perm(rng: &mut impl Rng, d: usize) -> Perm {
    let mut v: Vec<usize> = (0..d).collect();
    v.shuffle(rng);
    Perm::from_images(v).unwrap()
}

fn random_slope(rng: &mut impl Rng, bound: i64) -> Slope {
    loop {
        if let Ok(s) = Slope::new(rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound)) {
            return s;
        }
    }
}

// ---- cyclic exponent systems ----

pub fn cyclic_closed_form(k: usize, rm: i64, l: i64) -> i64 {
    match k {
        4 => (rm - 2 * l).abs(),
        5 => (rm * rm - 5 * rm * l + 5 * l * l).abs(),
        6 => (rm * rm - 4 * rm * l + 3 * l * l).abs(),
        _ => unreachable!(),
    }
}

/// Every `e` with `e_1 = 1` solving the abelianized conditions modulo `n`,
/// found by trying each residue for the next exponent in turn.
pub fn cyclic_brute_force(k: usize, r: i64, s: Slope, n: i64) -> Vec<Vec<i64>> {
    fn go(e: &mut Vec<i64>, k: usize, rm: i64, l: i64, n: i64, out: &mut Vec<Vec<i64>>) {
        let i = e.len();
        if i == k {
            let sum: i64 = e.iter().sum();
            let close = rm * sum + l * (e[0] - e[k - 1]);
            if sum.rem_euclid(n) == 0 && close.rem_euclid(n) == 0 {
                out.push(e.clone());
            }
            return;
        }
        let prefix: i64 = e.iter().sum();
        for x in 0..n {
            if (rm * prefix + l * (x - e[i - 1])).rem_euclid(n) == 0 {
                e.push(x);
                go(e, k, rm, l, n, out);
                e.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(&mut vec![1i64.rem_euclid(n)], k, r * s.mu(), s.lambda(), n, &mut out);
    out
}

/// Sweeps `k ∈ {4,5,6}`, `R ≤ 3`, `|μ|,|λ| ≤ 5`; returns (grid points, oracle checks).
pub fn cyclic_grid() -> Result<(usize, usize), String> {
    let (mut grid, mut oracle) = (0, 0);
    for k in [4usize, 5, 6] {
        for r in 1..=3i64 {
            for mu in -5..=5i64 {
                for lambda in -5..=5i64 {
                    let Ok(s) = Slope::new(mu, lambda) else { continue };
                    let expect = cyclic_closed_form(k, r * mu, lambda);
                    let at = format!("k={k} R={r} {s}");
                    match cyclic_solution(k, r, s) {
                        Ok(sol) => {
                            grid += 1;
                            if sol.modulus.abs() != expect || sol.exponents.len() != k {
                                return Err(format!("{at}: |N| = {} expected {expect}", sol.modulus));
                            }
                            if sol.exponents[0].rem_euclid(expect) != 1 % expect {
                                return Err(format!("{at}: e_1 ≢ 1"));
                            }
                            let n = expect as i128;
                            if !abelian_residues(&sol.exponents, r, s)
                                .iter()
                                .all(|v| v.rem_euclid(n) == 0)
                            {
                                return Err(format!("{at}: residues do not vanish"));
                            }
                            if expect <= 200 {
                                let ours: Vec<i64> = sol.exponents.iter().map(|e| e.rem_euclid(expect)).collect();
                                if !cyclic_brute_force(k, r, s, expect).contains(&ours) {
                                    return Err(format!("{at}: {ours:?} not found by the congruence oracle"));
                                }
                                oracle += 1;
                            }
                        }
                        Err(Error::Degenerate(_)) if expect == 0 => {}
                        Err(e) => {
                            if !cyclic_brute_force(k, r, s, expect).is_empty() {
                                return Err(format!("{at}: refused ({e}) but the oracle has solutions"));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok((grid, oracle))
}

// ---- lifting criterion ----

#[derive(Default, Debug)]
pub struct LiftingTally {
    /// Cut data satisfying I and II, each checked against several words.
    pub i_ii: usize,
    /// Template cut data where III was compared with the surgery lift.
    pub iii: usize,
}

/// Rows built from blocks `(c^e1, .., c^ek)` with `Σe = 0`, so I and II hold.
fn structured_sigma(rng: &mut impl Rng, d: usize) -> Vec<Perm> {
    let mut sigma = Vec::new();
    while sigma.len() < 6 {
        let c = random_perm(rng, d);
        let k = rng.gen_range(1..=3).min(6 - sigma.len());
        let mut exps: Vec<i64> = (1..k).map(|_| rng.gen_range(-3..=3)).collect();
        exps.push(-exps.iter().sum::<i64>());
        sigma.extend(exps.into_iter().map(|e| c.pow(e)));
        if rng.gen_bool(0.4) {
            break;
        }
    }
    sigma
}

pub fn lifting_suite(seed: u64, samples: usize) -> Result<LiftingTally, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = LiftingTally::default();
    let cases = [(CaseTag::C1, 4usize), (CaseTag::C2a, 5), (CaseTag::C3a, 6)];
    let mut attempts = 0;
    while (tally.i_ii < samples || tally.iii < samples) && attempts < 100 * samples {
        attempts += 1;
        let d = rng.gen_range(1..=8);

        // I ∧ II ⇒ every word with D_y exponents divisible by n lifts.
        let sigma = if rng.gen_bool(0.5) {
            structured_sigma(&mut rng, d)
        } else {
            let n = rng.gen_range(1..=6);
            (0..n).map(|_| random_perm(&mut rng, d)).collect()
        };
        let n = sigma.len() as i64;
        let c = CutData::new(d, sigma).map_err(|e| e.to_string())?;
        if let (true, true, Ok(rep)) = (check_condition_i_ii(&c).0, check_condition_i_ii(&c).1, build_rep(&c)) {
            for _ in 0..3 {
                let blocks: Vec<(TwistGen, i64)> = (0..rng.gen_range(1..=3))
                    .flat_map(|_| {
                        [
                            (TwistGen::X, rng.gen_range(-3..=3)),
                            (TwistGen::Y, n * rng.gen_range(-2..=2)),
                        ]
                    })
                    .collect();
                let word = TwistWord::new(blocks);
                if find_intertwiners_for_word(&rep, &word).is_empty() {
                    return Err(format!("I and II hold but {word} has no intertwiner: {c:?}"));
                }
            }
            tally.i_ii += 1;
        }

        // Template III ⇔ the surgery curve lifts under the canonical intertwiner.
        let (tag, m) = cases[rng.gen_range(0..cases.len())];
        let (_, template_words) = template(tag, m).map_err(|e| e.to_string())?;
        let images = [random_perm(&mut rng, d), random_perm(&mut rng, d)];
        let c = cut_data_from_action(&template_words, &images).map_err(|e| e.to_string())?;
        let Ok(rep) = build_rep(&c) else { continue };
        let r = rng.gen_range(-6..=6);
        let s = random_slope(&mut rng, 12);
        let word = TwistWord::new([(TwistGen::X, r), (TwistGen::Y, m as i64)]);
        let tau = canonical_intertwiner(&c, &word).ok_or_else(|| format!("no canonical intertwiner for {word}"))?;
        if !tau.intertwines(&rep, &rep.pullback(&word)) {
            return Err(format!("canonical intertwiner fails for {word}"));
        }
        if check_condition_iii(&c, r, s) != surgery_lifts(&rep, &tau, s) {
            return Err(format!("III disagrees with the surgery lift: {tag:?} R={r} {s} {c:?}"));
        }
        tally.iii += 1;
    }
    Ok(tally)
}

// ---- homology ----

fn det(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != j)
                            .map(|(_, v)| *v)
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// `d_k`: the gcd of all `k × k` minors.
pub fn determinantal_divisor(m: &[Vec<i64>], k: usize) -> i64 {
    let (r, c) = (m.len(), m[0].len());
    let mut g = 0i64;
    for rows in subsets(r, k) {
        for cols in subsets(c, k) {
            let sub: Vec<Vec<i64>> = rows.iter().map(|&i| cols.iter().map(|&j| m[i][j]).collect()).collect();
            g = g.gcd(&det(&sub));
        }
    }
    g
}

/// Random matrices up to 4×4 with entries in [−3, 3] against the minors oracle.
pub fn smith_against_minors(seed: u64, samples: usize) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let (r, c) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let rows: Vec<Vec<i64>> = (0..r)
            .map(|_| (0..c).map(|_| rng.gen_range(-3..=3)).collect())
            .collect();
        let m = IntMatrix::from_rows(&rows).map_err(|e| e.to_string())?;
        let snf = smith_normal_form(&m);
        let d = &snf.invariant_factors;
        for w in d.windows(2) {
            if !(w[1].is_zero() || (!w[0].is_zero() && w[1].is_multiple_of(&w[0]))) {
                return Err(format!("{rows:?}: chain broken {d:?}"));
            }
        }
        let mut prefix = BigInt::one();
        for k in 1..=r.min(c) {
            prefix *= &d[k - 1];
            if prefix != BigInt::from(determinantal_divisor(&rows, k)) {
                return Err(format!("{rows:?}: d_{k} disagrees with {d:?}"));
            }
        }
        let sparse = cokernel(&m.to_sparse());
        if sparse.free_rank != c - snf.rank || sparse.torsion != snf.torsion() {
            return Err(format!("{rows:?}: sparse cokernel disagrees"));
        }
        let (free, torsion) = cokernel_bounded(&m.to_sparse(), 0);
        if free != sparse.free_rank || torsion.is_some_and(|t| t != sparse.torsion) {
            return Err(format!("{rows:?}: bounded cokernel disagrees"));
        }
        if free_rank_bound(&m.to_sparse()) < free {
            return Err(format!("{rows:?}: rank bound below the free rank"));
        }
    }
    Ok(samples)
}

/// Transitive actions of free groups of rank ≤ 3 on ≤ 12 points.
pub fn nielsen_schreier(seed: u64, count: usize) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    while checked < count {
        let k = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=12);
        let gens: Vec<Perm> = (0..k).map(|_| random_perm(&mut rng, n)).collect();
        let Ok(action) = CosetAction::new(gens, 0) else {
            continue;
        };
        if !action.is_transitive() {
            continue;
        }
        let sp = reidemeister_schreier(&GroupPresentation::free(k), &action).map_err(|e| e.to_string())?;
        if sp.rank() != 1 + n * (k - 1) {
            return Err(format!("rank {} at index {n} for F_{k}", sp.rank()));
        }
        checked += 1;
    }
    Ok(checked)
}

/// Euler characteristic, boundary and surface Betti number of one fiber cover.
pub fn fiber_cover_invariants(c: &CutData) -> Result<Option<usize>, String> {
    match build_rep(c) {
        Ok(rep) => rep_invariants(&rep).map(Some),
        Err(_) => Ok(None),
    }
}

/// Checks `χ = −d`, integral genus and `b₁ = 1 + d`; returns the degree `d`.
pub fn rep_invariants(rep: &CoverRep) -> Result<usize, String> {
    let d = rep.degree();
    let (euler, boundary) = euler_and_boundary(rep);
    if euler != -(d as i64) {
        return Err(format!("χ = {euler} for degree {d}"));
    }
    let twice_genus = 2 - euler - boundary as i64;
    if twice_genus < 0 || twice_genus % 2 != 0 {
        return Err(format!(
            "non-integral genus: χ = {euler}, {boundary} boundary components"
        ));
    }
    let sp = schreier_transversal(&fiber_action(rep)).map_err(|e| e.to_string())?;
    if sp.rank() != 1 + d {
        return Err(format!("b₁ = {} for degree {d}", sp.rank()));
    }
    Ok(d)
}

pub fn random_fiber_covers(seed: u64, count: usize) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut built = 0;
    while built < count {
        let (width, rows) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let sigma: Vec<Perm> = (0..rows).map(|_| random_perm(&mut rng, width)).collect();
        let c = CutData::new(width, sigma).map_err(|e| e.to_string())?;
        if fiber_cover_invariants(&c)?.is_some() {
            built += 1;
        }
    }
    Ok(built)
}
