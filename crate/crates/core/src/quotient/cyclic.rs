//! Cyclic solutions `σ_i = σ_1^{e_i}` of the cut conditions, and the doubled
//! cyclic covers with horizontal cuts built from them.

use serde::{Deserialize, Serialize};

use crate::cover::{find_intertwiners_for_word, surgery_lifts, CoverRep, CutData};
use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::slope::{hypothesis_check, HypothesisTag, Slope};
use crate::word::{TwistGen, TwistWord};

/// Exponents `e_1 = 1, e_2, .., e_k` modulo `N` solving the abelianized
/// conditions I–III on `k` rows.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CyclicSolution {
    pub modulus: i64,
    /// Representatives in `(-|N|/2, |N|/2]`.
    pub exponents: Vec<i64>,
}

fn balanced(v: i128, n: i128) -> i128 {
    let r = v.rem_euclid(n);
    if 2 * r > n {
        r - n
    } else {
        r
    }
}

/// Residues of the abelianized conditions for exponents `e` on `k` rows:
/// `Rμ S_i + λ(e_{i+1} − e_i)` for `i = 1..k` (indices mod `k`), then `Σ e_i`.
pub fn abelian_residues(e: &[i64], r: i64, s: Slope) -> Vec<i128> {
    let k = e.len();
    let rm = r as i128 * s.mu() as i128;
    let l = s.lambda() as i128;
    let mut sum = 0i128;
    let mut out = Vec::with_capacity(k + 1);
    for i in 0..k {
        sum += e[i] as i128;
        out.push(rm * sum + l * (e[(i + 1) % k] as i128 - e[i] as i128));
    }
    out.push(sum);
    out
}

impl CyclicSolution {
    pub fn rows(&self) -> usize {
        self.exponents.len()
    }

    pub fn width(&self) -> usize {
        self.modulus.unsigned_abs() as usize
    }

    /// Whether every abelianized condition vanishes modulo `N`.
    pub fn satisfies(&self, r: i64, s: Slope) -> bool {
        let n = self.modulus as i128;
        abelian_residues(&self.exponents, r, s)
            .iter()
            .all(|v| v.rem_euclid(n.abs()) == 0)
    }

    /// Representatives adjusted by multiples of `N` so that `Σ e_i = 0` exactly.
    pub fn sum_zero_exponents(&self) -> Vec<i64> {
        let mut e = self.exponents.clone();
        let total: i64 = e.iter().sum();
        let mid = e.len() / 2;
        e[mid] -= total;
        e
    }

    /// The cut data on `copies · k` rows of width `|N|`, with `σ_1` an `|N|`-cycle.
    pub fn cut_data(&self, copies: usize) -> CutData {
        let c = Perm::cycle(self.width());
        let sigma: Vec<Perm> = self.exponents.iter().map(|&e| c.pow(e)).collect();
        let sigma = sigma.iter().cycle().take(copies * sigma.len()).cloned().collect();
        CutData::new(self.width(), sigma).expect("all rows share the width")
    }
}

fn overflow<T>(v: Option<T>) -> Result<T> {
    v.ok_or(Error::Overflow)
}

/// Solves the exponent system on `k ≥ 3` rows by the reduction `e_k = 1`,
/// `e_{k+1-j} = e_j`: with `f_j = λ^{j-1} e_j`, `f_1 = 1` and
/// `f_{i+1} = λ f_i − Rμ Σ_{j≤i} λ^{i-j} f_j`, and `N` is the negated
/// half-sum `Σ λ^{h-j} f_j` (even `k`) or `2Σ λ^{h-j} f_j + f_h` (odd `k`).
pub fn cyclic_solution(k: usize, r: i64, s: Slope) -> Result<CyclicSolution> {
    if k < 3 {
        return Err(Error::Precondition(format!(
            "cyclic solutions need k ≥ 3 rows, got {k}"
        )));
    }
    let a = r as i128 * s.mu() as i128;
    let l = s.lambda() as i128;
    let h = k.div_ceil(2);
    let mut f: Vec<i128> = vec![1];
    for i in 1..h {
        let mut acc = 0i128;
        for (j, &fj) in f.iter().enumerate() {
            let p = overflow(l.checked_pow((i - 1 - j) as u32))?;
            acc = overflow(acc.checked_add(overflow(p.checked_mul(fj))?))?;
        }
        let next = overflow(overflow(l.checked_mul(f[i - 1]))?.checked_sub(overflow(a.checked_mul(acc))?))?;
        f.push(next);
    }
    let mut total = 0i128;
    let last = if k.is_multiple_of(2) { h } else { h - 1 };
    let weight: i128 = if k.is_multiple_of(2) { 1 } else { 2 };
    for (j, &fj) in f.iter().enumerate().take(last) {
        let p = overflow(l.checked_pow((h - 1 - j) as u32))?;
        total = overflow(total.checked_add(overflow(overflow(p.checked_mul(fj))?.checked_mul(weight))?))?;
    }
    if k % 2 == 1 {
        total = overflow(total.checked_add(f[h - 1]))?;
    }
    let n = -total;
    if n == 0 {
        return Err(Error::Degenerate(format!(
            "the cyclic modulus vanishes for k = {k}, R = {r}, slope {s}"
        )));
    }
    let n64 = i64::try_from(n).map_err(|_| Error::Overflow)?;
    let half = match invert(l, n) {
        Some(inv) => {
            let mut e = Vec::with_capacity(h);
            let mut p = 1i128;
            for &fj in &f {
                e.push(balanced((fj % n) * p % n, n.abs()));
                p = p * inv % n;
            }
            e
        }
        None => solve_reduced(k, a, l, n).ok_or_else(|| {
            Error::Degenerate(format!("no cyclic solution modulo {n} for k = {k}, R = {r}, slope {s}"))
        })?,
    };
    let mut exponents: Vec<i64> = (0..k).map(|i| half[i.min(k - 1 - i)] as i64).collect();
    exponents[0] = 1;
    let sol = CyclicSolution {
        modulus: n64,
        exponents,
    };
    if !sol.satisfies(r, s) {
        return Err(Error::Degenerate(format!(
            "the reduced exponents modulo {n} do not solve the full system"
        )));
    }
    Ok(sol)
}

fn invert(l: i128, n: i128) -> Option<i128> {
    let (mut a, mut b) = (l.rem_euclid(n.abs()), n.abs());
    let (mut x0, mut x1) = (1i128, 0i128);
    while b != 0 {
        let q = a / b;
        (a, b) = (b, a - q * b);
        (x0, x1) = (x1, x0 - q * x1);
    }
    (a == 1).then_some(x0)
}

/// Depth-first search over the reduced congruences `λ e_{i+1} ≡ λ e_i − Rμ S_i`
/// when `λ` is not invertible modulo `N`.
fn solve_reduced(k: usize, a: i128, l: i128, n: i128) -> Option<Vec<i128>> {
    let m = n.abs();
    if m > 1_000_000 {
        return None;
    }
    let h = k.div_ceil(2);
    fn go(e: &mut Vec<i128>, h: usize, k: usize, a: i128, l: i128, m: i128) -> bool {
        if e.len() == h {
            let mut full: Vec<i64> = (0..k).map(|i| e[i.min(k - 1 - i)] as i64).collect();
            full[k - 1] = 1;
            return residues_vanish(&full, a, l, m);
        }
        let i = e.len();
        let sum: i128 = e.iter().sum();
        let c = (l * e[i - 1] - a * sum).rem_euclid(m);
        for x in 0..m {
            if (l * x).rem_euclid(m) == c {
                e.push(x);
                if go(e, h, k, a, l, m) {
                    return true;
                }
                e.pop();
            }
        }
        false
    }
    let mut e = vec![1i128];
    go(&mut e, h, k, a, l, m).then(|| e.into_iter().map(|v| balanced(v, m)).collect())
}

fn residues_vanish(e: &[i64], a: i128, l: i128, m: i128) -> bool {
    let k = e.len();
    let mut sum = 0i128;
    for i in 0..k {
        sum += e[i] as i128;
        if (a * sum + l * (e[(i + 1) % k] as i128 - e[i] as i128)).rem_euclid(m) != 0 {
            return false;
        }
    }
    sum.rem_euclid(m) == 0
}

/// Column transpositions applied where the `y`-loops leave rows `k` and `2k`.
pub type HorizontalCuts = Vec<(usize, usize)>;

/// The doubled cyclic cover on `2k` rows, with `cuts` composed into the
/// advance out of rows `k` and `2k`.
pub fn doubled_cut_rep(sol: &CyclicSolution, cuts: &[(usize, usize)]) -> Result<CoverRep> {
    let k = sol.rows();
    let w = sol.width();
    let mut swap: Vec<usize> = (0..w).collect();
    for &(i, j) in cuts {
        if i >= w || j >= w || i == j {
            return Err(Error::Malformed(format!("cut ({i}, {j}) outside width {w}")));
        }
        swap.swap(i, j);
    }
    let c = Perm::from_images(swap)?;
    let data = sol.cut_data(2);
    let n = 2 * k;
    let mut px = vec![0; n * w];
    let mut py = vec![0; n * w];
    for i in 0..n {
        for j in 0..w {
            px[i * w + j] = i * w + data.sigma()[i].apply(j);
            let col = if i == k - 1 || i == n - 1 { c.apply(j) } else { j };
            py[i * w + j] = ((i + 1) % n) * w + col;
        }
    }
    CoverRep::new(Perm::from_images(px)?, Perm::from_images(py)?, 0)
}

/// The cut pattern described for the doubled cover: one transposition of
/// non-adjacent columns when `λ` is even, `(|λ| − 1)/2` adjacent pairs when odd.
pub fn literal_cuts(lambda: i64, width: usize) -> HorizontalCuts {
    if lambda % 2 == 0 {
        if width >= 3 {
            vec![(0, 2)]
        } else {
            vec![(0, 1.min(width.saturating_sub(1)))]
        }
    } else {
        let pairs = ((lambda.unsigned_abs() as usize).saturating_sub(1) / 2).min(width / 2);
        (0..pairs).map(|t| (2 * t, 2 * t + 1)).collect()
    }
}

/// The literal pattern first, then single transpositions `(0, j)`, then
/// runs of adjacent pairs; each distinct pattern once.
pub fn cut_patterns(lambda: i64, width: usize) -> Vec<HorizontalCuts> {
    let mut out: Vec<HorizontalCuts> = vec![literal_cuts(lambda, width)];
    for j in 1..width {
        out.push(vec![(0, j)]);
    }
    for t in 1..=width / 2 {
        out.push((0..t).map(|i| (2 * i, 2 * i + 1)).collect());
    }
    out.retain(|c| c.iter().all(|&(i, j)| i != j && i < width && j < width));
    let mut seen = Vec::new();
    out.retain(|c| {
        if seen.contains(c) {
            false
        } else {
            seen.push(c.clone());
            true
        }
    });
    out
}

/// `D_x^R D_y^{n}`: the word whose lifting behaviour represents every
/// monodromy with these invariants.
pub fn representative_word(r: i64, n: i64) -> TwistWord {
    TwistWord::new([(TwistGen::X, r), (TwistGen::Y, n)])
}

/// Whether some lift of `word` to `rep` also lifts the surgery curve.
pub fn lifts_with_surgery(rep: &CoverRep, word: &TwistWord, s: Slope) -> bool {
    find_intertwiners_for_word(rep, word)
        .iter()
        .any(|t| surgery_lifts(rep, t, s))
}

/// The doubled three-row cyclic cover with horizontal cuts, on six rows of
/// width `|Rμ − 3λ|`; the first cut pattern that passes the lifting checks.
pub fn case3b_cover(r: i64, s: Slope) -> Result<CoverRep> {
    if !hypothesis_check(HypothesisTag::Case3b, r, s).holds {
        return Err(Error::GuardViolation {
            case: "3b".into(),
            reason: format!("R = {r}, slope {s}: need |λ| > 2 and |Rμ−3λ| ≥ |λ|, or λ even and |Rμ−3λ| ≥ 4"),
        });
    }
    doubled_cyclic_cover(3, r, s)
}

/// As [`case3b_cover`] for `k` base rows.
pub fn doubled_cyclic_cover(k: usize, r: i64, s: Slope) -> Result<CoverRep> {
    let sol = cyclic_solution(k, r, s)?;
    let word = representative_word(r, 2 * k as i64);
    for cuts in cut_patterns(s.lambda(), sol.width()) {
        let rep = match doubled_cut_rep(&sol, &cuts) {
            Ok(rep) => rep,
            Err(Error::Disconnected { .. }) => continue,
            Err(e) => return Err(e),
        };
        if lifts_with_surgery(&rep, &word, s) {
            return Ok(rep);
        }
    }
    Err(Error::SearchExhausted {
        cap: sol.width(),
        what: "no horizontal cut pattern passes the lifting checks".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{check_condition_i_ii, check_condition_iii};

    fn sl(m: i64, l: i64) -> Slope {
        Slope::new(m, l).unwrap()
    }

    #[test]
    fn three_row_seed() {
        let sol = cyclic_solution(3, 1, sl(1, 2)).unwrap();
        assert_eq!(sol.modulus, -5);
        assert_eq!(sol.exponents, vec![1, -2, 1]);
        let c = sol.cut_data(1);
        assert_eq!(check_condition_i_ii(&c), (true, true));
        assert!(check_condition_iii(&c, 1, sl(1, 2)));
    }

    #[test]
    fn small_closed_forms() {
        let (r, s) = (3, sl(1, 2));
        let rm = 3i64;
        assert_eq!(cyclic_solution(4, r, s).unwrap().modulus.abs(), (rm - 4).abs());
        assert_eq!(
            cyclic_solution(5, r, s).unwrap().modulus.abs(),
            (rm * rm - 10 * rm + 20).abs()
        );
    }

    #[test]
    fn degenerate_modulus() {
        // k = 4: N = Rμ − 2λ vanishes at R = 2, slope (1, 1).
        assert!(matches!(cyclic_solution(4, 2, sl(1, 1)), Err(Error::Degenerate(_))));
        assert!(matches!(cyclic_solution(2, 1, sl(1, 1)), Err(Error::Precondition(_))));
    }

    #[test]
    fn non_invertible_lambda() {
        // λ = 2, R = 2: λ shares a factor with N = 2 − 6 = −4.
        match cyclic_solution(3, 2, sl(1, 2)) {
            Ok(sol) => assert!(sol.satisfies(2, sl(1, 2))),
            Err(e) => assert!(matches!(e, Error::Degenerate(_))),
        }
    }

    #[test]
    fn literal_patterns() {
        assert_eq!(literal_cuts(2, 5), vec![(0, 2)]);
        assert_eq!(literal_cuts(5, 5), vec![(0, 1), (2, 3)]);
        assert_eq!(cut_patterns(2, 5)[0], vec![(0, 2)]);
    }

    #[test]
    fn figure_eight_a_parameters() {
        let rep = case3b_cover(1, sl(1, 2)).unwrap();
        assert_eq!(rep.degree(), 30);
    }

    #[test]
    fn guard_rejects_unit_lambda() {
        assert!(matches!(case3b_cover(1, sl(7, 1)), Err(Error::GuardViolation { .. })));
    }
}
