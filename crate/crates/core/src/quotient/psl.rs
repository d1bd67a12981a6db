//! Quotients inside `PSL(2, ℓ)` acting on the projective line.
//!
//! The projective order of a matrix of determinant one is a function of its
//! trace (away from `±2`), so prescribing traces prescribes orders. Each new
//! generator is found by solving the linear trace conditions against the
//! generators already placed and then imposing `det = 1`.

use std::collections::VecDeque;

use super::group::{restrict_to_orbit, sorted_orbits};
use super::witness::{QuotientShape, QuotientWitness};
use crate::perm::Perm;

type Mat = [u64; 4];

#[derive(Clone, Copy, Debug)]
struct Field {
    p: u64,
}

impl Field {
    fn add(self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(self, a: u64, b: u64) -> u64 {
        (a + self.p - b) % self.p
    }
    fn mul(self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }
    fn inv(self, a: u64) -> u64 {
        self.pow(a, self.p - 2)
    }
    fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }
    fn mat_mul(self, a: &Mat, b: &Mat) -> Mat {
        [
            self.add(self.mul(a[0], b[0]), self.mul(a[1], b[2])),
            self.add(self.mul(a[0], b[1]), self.mul(a[1], b[3])),
            self.add(self.mul(a[2], b[0]), self.mul(a[3], b[2])),
            self.add(self.mul(a[2], b[1]), self.mul(a[3], b[3])),
        ]
    }
    fn det(self, a: &Mat) -> u64 {
        self.sub(self.mul(a[0], a[3]), self.mul(a[1], a[2]))
    }
    fn is_scalar(a: &Mat) -> bool {
        a[1] == 0 && a[2] == 0 && a[0] == a[3]
    }
    /// Order of the image in `PSL(2, p)`.
    fn proj_order(self, a: &Mat) -> u64 {
        let mut m = *a;
        let mut k = 1;
        while !Field::is_scalar(&m) {
            m = self.mat_mul(&m, a);
            k += 1;
        }
        k
    }
    /// `[[0, -1], [1, t]]`.
    fn companion(self, t: u64) -> Mat {
        [0, self.p - 1, 1, t]
    }
    /// The permutation of the projective line induced by `v ↦ v·a`.
    fn line_action(self, a: &Mat) -> Perm {
        let p = self.p;
        let point = |x: u64, y: u64| -> usize {
            if y == 0 {
                p as usize
            } else {
                self.mul(x, self.inv(y)) as usize
            }
        };
        let images = (0..=p)
            .map(|i| {
                let (x, y) = if i == p { (1, 0) } else { (i, 1) };
                point(
                    self.add(self.mul(x, a[0]), self.mul(y, a[2])),
                    self.add(self.mul(x, a[1]), self.mul(y, a[3])),
                )
            })
            .collect();
        Perm::from_images(images).expect("invertible matrices permute the line")
    }

    /// Solutions of `rows · x = rhs` over the field as a particular solution
    /// and a null-space basis, or `None` if inconsistent.
    fn solve(self, rows: &[([u64; 4], u64)]) -> Option<(Mat, Vec<Mat>)> {
        let mut m: Vec<[u64; 5]> = rows.iter().map(|(r, b)| [r[0], r[1], r[2], r[3], *b]).collect();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..4 {
            let Some(pr) = (row..m.len()).find(|&r| m[r][col] != 0) else {
                continue;
            };
            m.swap(row, pr);
            let inv = self.inv(m[row][col]);
            for v in m[row].iter_mut() {
                *v = self.mul(*v, inv);
            }
            let pivot = m[row];
            for (r, other) in m.iter_mut().enumerate() {
                if r != row && other[col] != 0 {
                    let f = other[col];
                    for (v, p) in other.iter_mut().zip(pivot) {
                        *v = self.sub(*v, self.mul(f, p));
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        if m[row..].iter().any(|r| r[4] != 0) {
            return None;
        }
        let mut part = [0u64; 4];
        for (k, &c) in pivots.iter().enumerate() {
            part[c] = m[k][4];
        }
        let free: Vec<usize> = (0..4).filter(|c| !pivots.contains(c)).collect();
        let basis = free
            .iter()
            .map(|&f| {
                let mut v = [0u64; 4];
                v[f] = 1;
                for (k, &c) in pivots.iter().enumerate() {
                    v[c] = self.sub(0, m[k][f]);
                }
                v
            })
            .collect();
        Some((part, basis))
    }
}

struct Solver<'a> {
    f: Field,
    shape: &'a QuotientShape,
    order: Vec<usize>,
    traces: Vec<Vec<u64>>,
    placed: Vec<Option<Mat>>,
    budget: u64,
    degree_cap: usize,
    found: Option<QuotientWitness>,
}

const TRACE_CHOICES: usize = 4;
const SOLUTIONS_PER_SYSTEM: usize = 3;

impl Solver<'_> {
    fn trace_list(&self, order: u64) -> Vec<u64> {
        let all = &self.traces[order as usize];
        let mut out: Vec<u64> = all.iter().copied().take(TRACE_CHOICES).collect();
        out.dedup();
        out
    }

    fn neighbours(&self, v: usize) -> Vec<(usize, u64)> {
        self.shape
            .products
            .iter()
            .filter_map(|&(i, j, o)| {
                let other = if i == v {
                    j
                } else if j == v {
                    i
                } else {
                    return None;
                };
                self.placed[other].map(|_| (other, o))
            })
            .collect()
    }

    fn run(&mut self, k: usize) -> bool {
        if self.budget == 0 {
            return false;
        }
        self.budget -= 1;
        if k == self.order.len() {
            return self.finish();
        }
        let v = self.order[k];
        let nb = self.neighbours(v);
        let gen_traces = self.trace_list(self.shape.orders[v]);
        if nb.is_empty() {
            for t in gen_traces {
                self.placed[v] = Some(self.f.companion(t));
                if self.run(k + 1) {
                    return true;
                }
            }
            self.placed[v] = None;
            return false;
        }
        let slots: Vec<Vec<u64>> = std::iter::once(gen_traces)
            .chain(
                nb.iter()
                    .map(|&(_, o)| self.traces[o as usize].iter().copied().take(TRACE_CHOICES).collect()),
            )
            .collect();
        let mut idx = vec![0usize; slots.len()];
        if slots.iter().any(Vec::is_empty) {
            return false;
        }
        loop {
            let mut rows = vec![([1, 0, 0, 1], slots[0][idx[0]])];
            for (s, &(u, _)) in nb.iter().enumerate() {
                let y = self.placed[u].expect("neighbour placed");
                rows.push(([y[0], y[2], y[1], y[3]], slots[s + 1][idx[s + 1]]));
            }
            for x in self.candidates(&rows) {
                self.placed[v] = Some(x);
                if self.run(k + 1) {
                    return true;
                }
                if self.budget == 0 {
                    break;
                }
            }
            self.placed[v] = None;
            let mut s = 0;
            loop {
                if s == idx.len() {
                    return false;
                }
                idx[s] += 1;
                if idx[s] < slots[s].len() {
                    break;
                }
                idx[s] = 0;
                s += 1;
            }
        }
    }

    /// Matrices of determinant one meeting the trace conditions.
    fn candidates(&mut self, rows: &[([u64; 4], u64)]) -> Vec<Mat> {
        let f = self.f;
        let Some((part, basis)) = f.solve(rows) else {
            return Vec::new();
        };
        let p = f.p;
        let total = p.saturating_pow(basis.len() as u32).min(1 << 20);
        let mut out = Vec::new();
        for n in 0..total {
            let mut x = part;
            let mut rest = n;
            for b in &basis {
                let c = rest % p;
                rest /= p;
                for i in 0..4 {
                    x[i] = f.add(x[i], f.mul(c, b[i]));
                }
            }
            if f.det(&x) == 1 && !Field::is_scalar(&x) {
                out.push(x);
                if out.len() == SOLUTIONS_PER_SYSTEM {
                    break;
                }
            }
        }
        out
    }

    fn finish(&mut self) -> bool {
        let mats: Vec<Mat> = self.placed.iter().map(|m| m.expect("all placed")).collect();
        let exact = self.shape.requirements().iter().all(|(w, o)| {
            let m = w
                .letters()
                .iter()
                .fold([1, 0, 0, 1], |acc, &l| self.f.mat_mul(&acc, &mats[(l - 1) as usize]));
            self.f.proj_order(&m) == *o
        });
        if !exact {
            return false;
        }
        let perms: Vec<Perm> = mats.iter().map(|m| self.f.line_action(m)).collect();
        for orbit in sorted_orbits(&perms) {
            if orbit.len() > self.degree_cap {
                break;
            }
            let r = restrict_to_orbit(&perms, &orbit);
            if let Ok(w) = QuotientWitness::certify("closed-form", r, self.shape) {
                self.found = Some(w);
                return true;
            }
        }
        false
    }
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// Searches `PSL(2, ℓ)` for odd primes `ℓ < degree_cap` and returns the
/// smallest orbit on the projective line on which every order is exact.
pub fn psl2_quotient(shape: &QuotientShape, degree_cap: usize, budget: u64) -> Option<QuotientWitness> {
    let g = shape.generator_count();
    let mut order = Vec::with_capacity(g);
    let mut seen = vec![false; g];
    for start in 0..g {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut q = VecDeque::from([start]);
        while let Some(v) = q.pop_front() {
            order.push(v);
            for &(i, j, _) in &shape.products {
                for (a, b) in [(i, j), (j, i)] {
                    if a == v && !seen[b] {
                        seen[b] = true;
                        q.push_back(b);
                    }
                }
            }
        }
    }
    let max_order = shape
        .orders
        .iter()
        .chain(shape.products.iter().map(|(_, _, o)| o))
        .copied()
        .max()
        .unwrap_or(1);
    for p in (3..degree_cap as u64).filter(|&p| is_prime(p)) {
        if max_order > p {
            continue;
        }
        let f = Field { p };
        let mut traces = vec![Vec::new(); max_order as usize + 1];
        for t in 0..p {
            let o = f.proj_order(&f.companion(t));
            if o <= max_order {
                traces[o as usize].push(t);
            }
        }
        let needed = shape.orders.iter().chain(shape.products.iter().map(|(_, _, o)| o));
        if needed.clone().any(|&o| traces[o as usize].is_empty()) {
            continue;
        }
        let mut s = Solver {
            f,
            shape,
            order: order.clone(),
            traces,
            placed: vec![None; g],
            budget,
            degree_cap,
            found: None,
        };
        if s.run(0) {
            return s.found;
        }
    }
    None
}

/// Orders of elements available in `PSL(2, ℓ)`, exposed for tests.
pub fn available_orders(p: u64) -> Vec<u64> {
    let f = Field { p };
    let mut v: Vec<u64> = (0..p).map(|t| f.proj_order(&f.companion(t))).collect();
    v.sort_unstable();
    v.dedup();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psl_2_7_orders() {
        assert_eq!(available_orders(7), vec![2, 3, 4, 7]);
        let f = Field { p: 7 };
        assert_eq!(f.proj_order(&f.companion(0)), 2);
    }

    #[test]
    fn triangle_in_psl_2_7() {
        let s = QuotientShape::triangle(3, 3, 4).unwrap();
        let w = psl2_quotient(&s, 64, 10_000).unwrap();
        assert!(w.degree <= 8);
        assert!(w.is_exact());
    }

    #[test]
    fn hyperbolic_triangle() {
        let s = QuotientShape::triangle(7, 5, 3).unwrap();
        let w = psl2_quotient(&s, 64, 10_000).unwrap();
        assert!(w.is_exact());
        assert!(w.satisfies(&s.presentation()));
    }

    #[test]
    fn coxeter_cycle() {
        // Four generators of order 5 around a square, products of order 3.
        let s = QuotientShape::new(
            (0..4).map(|i| format!("g{i}")).collect(),
            vec![5; 4],
            vec![(0, 1, 3), (1, 2, 3), (2, 3, 3), (3, 0, 3)],
        )
        .unwrap();
        let w = psl2_quotient(&s, 64, 50_000).unwrap();
        assert!(w.is_exact());
    }
}
