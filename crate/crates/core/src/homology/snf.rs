//! Smith normal form over the integers.
//!
//! Presentation matrices coming from Reidemeister–Schreier rewriting are
//! large and very sparse, with most entries `±1`. They are first reduced by
//! sparse unit-pivot elimination, and the small remainder is diagonalised
//! densely.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::{IntMatrix, SparseRows};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnfResult {
    /// `d_1 | d_2 | ..`, one per diagonal position, zeros last.
    #[serde(with = "crate::json::bigint_vec")]
    pub invariant_factors: Vec<BigInt>,
    pub rank: usize,
    /// `U·M·V = D`, when requested.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub u: Option<IntMatrix>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub v: Option<IntMatrix>,
}

impl SnfResult {
    /// Diagonal entries greater than one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.invariant_factors
            .iter()
            .filter(|d| **d > BigInt::one())
            .cloned()
            .collect()
    }
}

/// The cokernel `Z^cols / rowspace`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianGroup {
    pub free_rank: usize,
    #[serde(with = "crate::json::bigint_vec")]
    pub torsion: Vec<BigInt>,
}

struct Dense {
    a: Vec<Vec<BigInt>>,
    u: Option<Vec<Vec<BigInt>>>,
    v: Option<Vec<Vec<BigInt>>>,
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

fn row_axpy(m: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    // row dst -= q * row src
    let (s, d) = if src < dst {
        let (lo, hi) = m.split_at_mut(dst);
        (&lo[src], &mut hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(src);
        (&hi[0], &mut lo[dst])
    };
    for (x, y) in d.iter_mut().zip(s.iter()) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
}

fn col_axpy(m: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    for row in m.iter_mut() {
        if !row[src].is_zero() {
            let t = q * &row[src];
            row[dst] -= t;
        }
    }
}

fn swap_cols(m: &mut [Vec<BigInt>], i: usize, j: usize) {
    for row in m.iter_mut() {
        row.swap(i, j);
    }
}

impl Dense {
    fn rows(&self) -> usize {
        self.a.len()
    }

    fn cols(&self) -> usize {
        self.a.first().map_or(0, Vec::len)
    }

    fn row_sub(&mut self, dst: usize, src: usize, q: &BigInt) {
        row_axpy(&mut self.a, dst, src, q);
        if let Some(u) = &mut self.u {
            row_axpy(u, dst, src, q);
        }
    }

    fn col_sub(&mut self, dst: usize, src: usize, q: &BigInt) {
        col_axpy(&mut self.a, dst, src, q);
        if let Some(v) = &mut self.v {
            col_axpy(v, dst, src, q);
        }
    }

    fn row_swap(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        if let Some(u) = &mut self.u {
            u.swap(i, j);
        }
    }

    fn col_swap(&mut self, i: usize, j: usize) {
        swap_cols(&mut self.a, i, j);
        if let Some(v) = &mut self.v {
            swap_cols(v, i, j);
        }
    }

    fn row_neg(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -&*x;
        }
        if let Some(u) = &mut self.u {
            for x in u[i].iter_mut() {
                *x = -&*x;
            }
        }
    }

    fn min_entry(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.rows() {
            for j in t..self.cols() {
                let x = &self.a[i][j];
                if x.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| x.abs() < self.a[bi][bj].abs()) {
                    best = Some((i, j));
                    if x.abs().is_one() {
                        return best;
                    }
                }
            }
        }
        best
    }

    /// Diagonalises in place; the diagonal ends up as a divisibility chain.
    fn run(&mut self) -> Vec<BigInt> {
        let (m, n) = (self.rows(), self.cols());
        let mut diag = Vec::new();
        for t in 0..m.min(n) {
            let Some((pi, pj)) = self.min_entry(t) else {
                break;
            };
            self.row_swap(t, pi);
            self.col_swap(t, pj);
            loop {
                let mut dirty = false;
                for i in t + 1..m {
                    if self.a[i][t].is_zero() {
                        continue;
                    }
                    let q = self.a[i][t].div_floor(&self.a[t][t]);
                    self.row_sub(i, t, &q);
                    if !self.a[i][t].is_zero() {
                        dirty = true;
                    }
                }
                for j in t + 1..n {
                    if self.a[t][j].is_zero() {
                        continue;
                    }
                    let q = self.a[t][j].div_floor(&self.a[t][t]);
                    self.col_sub(j, t, &q);
                    if !self.a[t][j].is_zero() {
                        dirty = true;
                    }
                }
                if dirty {
                    // Move the smallest remaining entry of row/column t to the pivot.
                    let mut best = (t, t);
                    for i in t + 1..m {
                        if !self.a[i][t].is_zero() && self.a[i][t].abs() < self.a[best.0][best.1].abs() {
                            best = (i, t);
                        }
                    }
                    for j in t + 1..n {
                        if !self.a[t][j].is_zero() && self.a[t][j].abs() < self.a[best.0][best.1].abs() {
                            best = (t, j);
                        }
                    }
                    self.row_swap(t, best.0);
                    self.col_swap(t, best.1);
                    continue;
                }
                // Row and column are clear; enforce divisibility of the rest.
                let p = self.a[t][t].clone();
                let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !self.a[i][j].is_multiple_of(&p)));
                match bad {
                    Some(i) => self.row_sub(t, i, &BigInt::from(-1)),
                    None => break,
                }
            }
            if self.a[t][t].is_negative() {
                self.row_neg(t);
            }
            diag.push(self.a[t][t].clone());
        }
        diag
    }
}

fn to_rows(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    (0..m.rows()).map(|r| m.row(r).to_vec()).collect()
}

fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> IntMatrix {
    let mut out = IntMatrix::zeros(rows.len(), cols);
    for (r, row) in rows.into_iter().enumerate() {
        for (c, v) in row.into_iter().enumerate() {
            out.set(r, c, v);
        }
    }
    out
}

fn finish(mut diag: Vec<BigInt>, len: usize) -> (Vec<BigInt>, usize) {
    let rank = diag.len();
    diag.resize(len, BigInt::zero());
    (diag, rank)
}

pub fn smith_normal_form(m: &IntMatrix) -> SnfResult {
    let mut d = Dense {
        a: to_rows(m),
        u: None,
        v: None,
    };
    let (factors, rank) = finish(d.run(), m.rows().min(m.cols()));
    SnfResult {
        invariant_factors: factors,
        rank,
        u: None,
        v: None,
    }
}

/// As [`smith_normal_form`], also returning unimodular `U`, `V` with `U·M·V = D`.
pub fn smith_normal_form_with_witnesses(m: &IntMatrix) -> SnfResult {
    let mut d = Dense {
        a: to_rows(m),
        u: Some(identity(m.rows())),
        v: Some(identity(m.cols())),
    };
    let (factors, rank) = finish(d.run(), m.rows().min(m.cols()));
    SnfResult {
        invariant_factors: factors,
        rank,
        u: d.u.map(|u| from_rows(u, m.rows())),
        v: d.v.map(|v| from_rows(v, m.cols())),
    }
}

/// Sparse unit-pivot elimination. Returns the number of unit pivots and the
/// remaining rows restricted to the surviving columns (renumbered).
fn eliminate_units(m: &SparseRows) -> Eliminated {
    eliminate_units_small(m).unwrap_or_else(|| eliminate_units_big(m))
}

/// `a - f·b` on sorted sparse rows of machine integers; `None` on overflow.
fn sub_scaled_small(a: &[(usize, i128)], b: &[(usize, i128)], f: i128) -> Option<Vec<(usize, i128)>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i >= a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, f.checked_mul(b[j].1)?.checked_neg()?));
            j += 1;
        } else {
            let v = a[i].1.checked_sub(f.checked_mul(b[j].1)?)?;
            if v != 0 {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Some(out)
}

/// Unit pivots removed, the remaining rows, and the column count.
type Eliminated = (usize, Vec<Vec<(usize, BigInt)>>, usize);

/// Unit elimination in machine integers, visiting columns fewest entries
/// first and pivoting on the shortest row; `None` on overflow.
fn eliminate_units_small(m: &SparseRows) -> Option<Eliminated> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;
    let cols = m.cols;
    let mut rows: Vec<Vec<(usize, i128)>> = m
        .rows
        .iter()
        .map(|row| row.iter().map(|(c, v)| Some((*c, i128::try_from(v).ok()?))).collect())
        .collect::<Option<_>>()?;
    let mut alive = vec![true; rows.len()];
    let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); cols];
    for (r, row) in rows.iter().enumerate() {
        for (c, _) in row {
            col_rows[*c].push(r);
        }
    }
    let mut col_dead = vec![false; cols];
    let mut units = 0;
    let entry = |row: &[(usize, i128)], c: usize| row.binary_search_by_key(&c, |e| e.0).ok().map(|k| row[k].1);
    loop {
        let mut progress = false;
        let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..cols)
            .filter(|&c| !col_dead[c])
            .map(|c| Reverse((col_rows[c].len(), c)))
            .collect();
        while let Some(Reverse((count, c))) = heap.pop() {
            if col_dead[c] {
                continue;
            }
            let mut live = std::mem::take(&mut col_rows[c]);
            live.retain(|&r| alive[r] && entry(&rows[r], c).is_some());
            live.sort_unstable();
            live.dedup();
            if live.len() > count {
                heap.push(Reverse((live.len(), c)));
                col_rows[c] = live;
                continue;
            }
            let pivot = live
                .iter()
                .copied()
                .filter(|&r| entry(&rows[r], c).is_some_and(|v| v.abs() == 1))
                .min_by_key(|&r| (rows[r].len(), r));
            let Some(p) = pivot else {
                col_rows[c] = live;
                continue;
            };
            let prow = std::mem::take(&mut rows[p]);
            alive[p] = false;
            let u = entry(&prow, c)?;
            for &r in &live {
                if r == p {
                    continue;
                }
                let a = entry(&rows[r], c)?;
                let merged = sub_scaled_small(&rows[r], &prow, a * u)?;
                for (cc, _) in &merged {
                    if entry(&rows[r], *cc).is_none() {
                        col_rows[*cc].push(r);
                    }
                }
                rows[r] = merged;
            }
            col_dead[c] = true;
            units += 1;
            progress = true;
        }
        if !progress {
            break;
        }
    }
    let mut renumber = vec![usize::MAX; cols];
    let mut k = 0;
    for c in 0..cols {
        if !col_dead[c] {
            renumber[c] = k;
            k += 1;
        }
    }
    let rest = rows
        .into_iter()
        .zip(alive)
        .filter(|(r, a)| *a && !r.is_empty())
        .map(|(r, _)| r.into_iter().map(|(c, v)| (renumber[c], BigInt::from(v))).collect())
        .collect();
    Some((units, rest, k))
}

fn eliminate_units_big(m: &SparseRows) -> Eliminated {
    let cols = m.cols;
    let mut rows: Vec<Option<Vec<(usize, BigInt)>>> = m.rows.iter().cloned().map(Some).collect();
    let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); cols];
    for (r, row) in m.rows.iter().enumerate() {
        for (c, _) in row {
            col_rows[*c].push(r);
        }
    }
    let mut col_dead = vec![false; cols];
    let mut units = 0;
    let entry = |row: &[(usize, BigInt)], c: usize| -> Option<BigInt> {
        row.binary_search_by_key(&c, |e| e.0).ok().map(|k| row[k].1.clone())
    };
    loop {
        let mut progress = false;
        let mut order: Vec<usize> = (0..cols).filter(|&c| !col_dead[c]).collect();
        order.sort_by_key(|&c| (col_rows[c].len(), c));
        for c in order {
            if col_dead[c] {
                continue;
            }
            let mut live: Vec<usize> = col_rows[c]
                .iter()
                .copied()
                .filter(|&r| rows[r].as_ref().is_some_and(|row| entry(row, c).is_some()))
                .collect();
            live.sort_unstable();
            live.dedup();
            col_rows[c] = live.clone();
            let pivot = live
                .iter()
                .copied()
                .filter(|&r| entry(rows[r].as_ref().unwrap(), c).is_some_and(|v| v.abs().is_one()))
                .min_by_key(|&r| (rows[r].as_ref().unwrap().len(), r));
            let Some(p) = pivot else { continue };
            let prow = rows[p].take().unwrap();
            let u = entry(&prow, c).unwrap();
            for &r in &live {
                if r == p {
                    continue;
                }
                let row = rows[r].take().unwrap();
                let a = entry(&row, c).unwrap();
                let f = &a * &u;
                let merged = sub_scaled(&row, &prow, &f);
                for (cc, _) in &merged {
                    if row.binary_search_by_key(cc, |e| e.0).is_err() {
                        col_rows[*cc].push(r);
                    }
                }
                rows[r] = Some(merged);
            }
            col_dead[c] = true;
            col_rows[c].clear();
            units += 1;
            progress = true;
        }
        if !progress {
            break;
        }
    }
    let mut renumber = vec![usize::MAX; cols];
    let mut k = 0;
    for c in 0..cols {
        if !col_dead[c] {
            renumber[c] = k;
            k += 1;
        }
    }
    let rest = rows
        .into_iter()
        .flatten()
        .filter(|r| !r.is_empty())
        .map(|r| r.into_iter().map(|(c, v)| (renumber[c], v)).collect())
        .collect();
    (units, rest, k)
}

/// `a - f·b` on sorted sparse rows.
fn sub_scaled(a: &[(usize, BigInt)], b: &[(usize, BigInt)], f: &BigInt) -> Vec<(usize, BigInt)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, -(f * &b[j].1)));
            j += 1;
        } else {
            let v = &a[i].1 - f * &b[j].1;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Diagonalises without tracking transforms, always pivoting on an entry
/// of least magnitude, then rearranges the diagonal into a divisibility chain.
fn diagonal_only(mut a: Vec<Vec<BigInt>>, cols: usize) -> Vec<BigInt> {
    let m = a.len();
    let mut diag = Vec::new();
    for t in 0..m.min(cols) {
        let mut best: Option<(usize, usize)> = None;
        'scan: for (i, row) in a.iter().enumerate().skip(t) {
            for (j, x) in row.iter().enumerate().skip(t) {
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.magnitude() < a[bi][bj].magnitude()) {
                    best = Some((i, j));
                    if x.magnitude().is_one() {
                        break 'scan;
                    }
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        swap_cols(&mut a, t, pj);
        loop {
            let mut small = (t, t);
            for i in t + 1..m {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                row_axpy(&mut a, i, t, &q);
                if !a[i][t].is_zero() && a[i][t].magnitude() < a[small.0][small.1].magnitude() {
                    small = (i, t);
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                col_axpy(&mut a, j, t, &q);
                if !a[t][j].is_zero() && a[t][j].magnitude() < a[small.0][small.1].magnitude() {
                    small = (t, j);
                }
            }
            let clear = (t + 1..m).all(|i| a[i][t].is_zero()) && (t + 1..cols).all(|j| a[t][j].is_zero());
            if clear {
                break;
            }
            a.swap(t, small.0);
            swap_cols(&mut a, t, small.1);
        }
        diag.push(a[t][t].abs());
    }
    gcd_chain(diag)
}

/// [`diagonal_only`] in machine integers; `None` on overflow.
fn diagonal_i64(mut a: Vec<Vec<i64>>, cols: usize) -> Option<Vec<BigInt>> {
    let m = a.len();
    let mut diag: Vec<i64> = Vec::new();
    let axpy_row = |a: &mut [Vec<i64>], dst: usize, src: usize, q: i64| -> Option<()> {
        let (d, s) = if dst < src {
            let (lo, hi) = a.split_at_mut(src);
            (&mut lo[dst], &hi[0])
        } else {
            let (lo, hi) = a.split_at_mut(dst);
            (&mut hi[0], &lo[src])
        };
        for (x, &y) in d.iter_mut().zip(s.iter()) {
            if y != 0 {
                *x = x.checked_sub(q.checked_mul(y)?)?;
            }
        }
        Some(())
    };
    for t in 0..m.min(cols) {
        let mut best: Option<(usize, usize)> = None;
        'scan: for (i, row) in a.iter().enumerate().skip(t) {
            for (j, &x) in row.iter().enumerate().skip(t) {
                if x != 0 && best.is_none_or(|(bi, bj)| x.unsigned_abs() < a[bi][bj].unsigned_abs()) {
                    best = Some((i, j));
                    if x.unsigned_abs() == 1 {
                        break 'scan;
                    }
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut small = (t, t);
            for i in t + 1..m {
                if a[i][t] == 0 {
                    continue;
                }
                let q = a[i][t].div_euclid(a[t][t]);
                axpy_row(&mut a, i, t, q)?;
                if a[i][t] != 0 && a[i][t].unsigned_abs() < a[small.0][small.1].unsigned_abs() {
                    small = (i, t);
                }
            }
            for j in t + 1..cols {
                if a[t][j] == 0 {
                    continue;
                }
                let q = a[t][j].div_euclid(a[t][t]);
                for row in a.iter_mut() {
                    let y = row[t];
                    if y != 0 {
                        row[j] = row[j].checked_sub(q.checked_mul(y)?)?;
                    }
                }
                if a[t][j] != 0 && a[t][j].unsigned_abs() < a[small.0][small.1].unsigned_abs() {
                    small = (t, j);
                }
            }
            let clear = (t + 1..m).all(|i| a[i][t] == 0) && (t + 1..cols).all(|j| a[t][j] == 0);
            if clear {
                break;
            }
            a.swap(t, small.0);
            for row in a.iter_mut() {
                row.swap(t, small.1);
            }
        }
        diag.push(a[t][t].checked_abs()?);
    }
    Some(gcd_chain(diag.into_iter().map(BigInt::from).collect()))
}

/// `diag(x, y)` and `diag(gcd, lcm)` have the same Smith form.
fn gcd_chain(mut diag: Vec<BigInt>) -> Vec<BigInt> {
    for i in 0..diag.len() {
        for j in i + 1..diag.len() {
            let g = diag[i].gcd(&diag[j]);
            let l = &diag[i] / &g * &diag[j];
            diag[i] = g;
            diag[j] = l;
        }
    }
    diag
}

/// Invariant factors of a sparse matrix (no witnesses), via unit elimination first.
pub fn sparse_smith(m: &SparseRows) -> SnfResult {
    let (units, rest, cols) = eliminate_units(m);
    let small: Option<Vec<Vec<i64>>> = rest
        .iter()
        .map(|row| {
            let mut out = vec![0i64; cols];
            for (c, v) in row {
                out[*c] = i64::try_from(v).ok()?;
            }
            Some(out)
        })
        .collect();
    let tail = small.and_then(|a| diagonal_i64(a, cols)).unwrap_or_else(|| {
        let mut dense = vec![vec![BigInt::zero(); cols]; rest.len()];
        for (r, row) in rest.iter().enumerate() {
            for (c, v) in row {
                dense[r][*c] = v.clone();
            }
        }
        diagonal_only(dense, cols)
    });
    let mut factors = vec![BigInt::one(); units];
    factors.extend(tail);
    let (factors, rank) = finish(factors, m.rows.len().min(m.cols));
    SnfResult {
        invariant_factors: factors,
        rank,
        u: None,
        v: None,
    }
}

/// An upper bound for the free rank of `Z^cols / rowspace(m)`, from the rank
/// modulo one large prime. A bound of zero is exact.
pub fn free_rank_bound(m: &SparseRows) -> usize {
    let (_, rest, cols) = eliminate_units(m);
    cols - super::linalg::sparse_rank_mod_p(&rest, cols)
}

/// Free rank of `Z^cols / rowspace(m)`, with the torsion when it can be found
/// in machine integers or the dense remainder has at most `dense_limit`
/// columns.
pub fn cokernel_bounded(m: &SparseRows, dense_limit: usize) -> (usize, Option<Vec<BigInt>>) {
    let (units, rest, cols) = eliminate_units(m);
    let small: Option<Vec<Vec<i64>>> = rest
        .iter()
        .map(|row| {
            let mut out = vec![0i64; cols];
            for (c, v) in row {
                out[*c] = i64::try_from(v).ok()?;
            }
            Some(out)
        })
        .collect();
    let tail = small.and_then(|a| diagonal_i64(a, cols)).or_else(|| {
        (cols <= dense_limit).then(|| {
            let mut dense = vec![vec![BigInt::zero(); cols]; rest.len()];
            for (r, row) in rest.iter().enumerate() {
                for (c, v) in row {
                    dense[r][*c] = v.clone();
                }
            }
            diagonal_only(dense, cols)
        })
    });
    match tail {
        Some(tail) => {
            let free = m.cols - units - tail.len();
            (free, Some(tail.into_iter().filter(|d| *d > BigInt::one()).collect()))
        }
        None => {
            let mut dense = IntMatrix::zeros(rest.len(), cols);
            for (r, row) in rest.iter().enumerate() {
                for (c, v) in row {
                    dense.set(r, *c, v.clone());
                }
            }
            (m.cols - units - super::linalg::rank(&dense), None)
        }
    }
}

/// `Z^cols / rowspace(m)`.
pub fn cokernel(m: &SparseRows) -> AbelianGroup {
    let snf = sparse_smith(m);
    AbelianGroup {
        free_rank: m.cols - snf.rank,
        torsion: snf.torsion(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| x.into()).collect()
    }

    #[test]
    fn examples() {
        let r = smith_normal_form(&mat(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(r.invariant_factors, ints(&[1, 6]));
        let r = smith_normal_form(&IntMatrix::zeros(2, 3));
        assert_eq!((r.invariant_factors, r.rank), (ints(&[0, 0]), 0));
        let r = smith_normal_form(&mat(&[vec![1, 0], vec![0, 0]]));
        assert_eq!((r.invariant_factors, r.rank), (ints(&[1, 0]), 1));
    }

    #[test]
    fn witnesses_reproduce_diagonal() {
        let m = mat(&[vec![4, 6, 2], vec![8, -2, 0], vec![2, 2, 2], vec![0, 14, 4]]);
        let r = smith_normal_form_with_witnesses(&m);
        let d = r.u.as_ref().unwrap().mul(&m).mul(r.v.as_ref().unwrap());
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                let want = if i == j {
                    r.invariant_factors[i].clone()
                } else {
                    BigInt::zero()
                };
                assert_eq!(*d.get(i, j), want);
            }
        }
    }

    #[test]
    fn sparse_agrees_with_dense() {
        let m = mat(&[
            vec![1, 2, 0, 0, 3],
            vec![0, 2, 4, 0, 0],
            vec![0, 0, 0, 6, 0],
            vec![1, 0, -4, 0, 3],
            vec![0, 1, 1, 1, 1],
        ]);
        assert_eq!(
            sparse_smith(&m.to_sparse()).invariant_factors,
            smith_normal_form(&m).invariant_factors
        );
        let g = cokernel(&m.to_sparse());
        assert_eq!(g.free_rank, 5 - smith_normal_form(&m).rank);
    }
}
