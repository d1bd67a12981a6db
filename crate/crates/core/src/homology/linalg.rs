//! Exact kernels and ranks over Q.
//!
//! Kernels are found modulo several word-sized primes, lifted by Chinese
//! remaindering and rational reconstruction, and then verified with exact
//! integer arithmetic. A verified kernel of the size predicted modulo a prime
//! is the full rational kernel, because reduction mod p can only lower rank.
//! If reconstruction does not converge the computation falls back to
//! fraction-free elimination over the integers.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::matrix::IntMatrix;

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Descending primes below `2^62`.
fn primes() -> impl Iterator<Item = u64> {
    let mut n = (1u64 << 62) - 1;
    std::iter::from_fn(move || {
        while !is_prime(n) {
            n -= 2;
        }
        let p = n;
        n -= 2;
        Some(p)
    })
}

fn reduce(v: &BigInt, p: u64) -> u64 {
    let r = v.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits")
}

/// Rank modulo the largest prime below `2^62` of sparse integer rows; a lower
/// bound for the rank over Q.
pub fn sparse_rank_mod_p(rows: &[Vec<(usize, BigInt)>], cols: usize) -> usize {
    let p = primes().next().expect("primes are infinite");
    // pivot[c] holds a reduced row whose leading column is c, scaled to lead with 1.
    let mut pivot: Vec<Option<Vec<(usize, u64)>>> = vec![None; cols];
    let mut rank = 0;
    let mut work = vec![0u64; cols];
    for row in rows {
        let mut touched: std::collections::BTreeSet<usize> = std::collections::BTreeSet::new();
        for (c, v) in row {
            let r = reduce(v, p);
            if r != 0 {
                work[*c] = r;
                touched.insert(*c);
            }
        }
        let mut lead = None;
        while let Some(&c) = touched.iter().next() {
            touched.remove(&c);
            let f = work[c];
            if f == 0 {
                continue;
            }
            match &pivot[c] {
                Some(prow) => {
                    for &(cc, y) in prow {
                        let old = work[cc];
                        work[cc] = (old + p - mul_mod(f, y, p)) % p;
                        if old == 0 && work[cc] != 0 {
                            touched.insert(cc);
                        }
                    }
                }
                None => {
                    lead = Some(c);
                    break;
                }
            }
        }
        if let Some(c) = lead {
            let inv = pow_mod(work[c], p - 2, p);
            let mut prow = vec![(c, 1)];
            work[c] = 0;
            for cc in touched {
                if work[cc] != 0 {
                    prow.push((cc, mul_mod(work[cc], inv, p)));
                    work[cc] = 0;
                }
            }
            pivot[c] = Some(prow);
            rank += 1;
        } else {
            for cc in touched {
                work[cc] = 0;
            }
        }
    }
    rank
}

/// Reduced row echelon form mod `p`: pivot columns and, for each pivot row,
/// the entries in the free columns.
struct Rref {
    pivots: Vec<usize>,
    free: Vec<usize>,
    /// `rows[i][k]` is the entry of pivot row `i` in free column `free[k]`.
    rows: Vec<Vec<u64>>,
}

fn rref_mod(m: &IntMatrix, p: u64) -> Rref {
    let (nr, nc) = (m.rows(), m.cols());
    let mut a: Vec<Vec<u64>> = (0..nr)
        .map(|r| m.row(r).iter().map(|v| reduce(v, p)).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..nc {
        if row == nr {
            break;
        }
        let Some(pr) = (row..nr).find(|&r| a[r][c] != 0) else {
            continue;
        };
        a.swap(row, pr);
        let inv = pow_mod(a[row][c], p - 2, p);
        for x in a[row].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        let prow = a[row].clone();
        for (r, other) in a.iter_mut().enumerate() {
            if r == row || other[c] == 0 {
                continue;
            }
            let f = other[c];
            for (x, &y) in other.iter_mut().zip(&prow).skip(c) {
                if y != 0 {
                    *x = (*x + p - mul_mod(f, y, p)) % p;
                }
            }
        }
        pivots.push(c);
        row += 1;
    }
    let free: Vec<usize> = (0..nc).filter(|c| !pivots.contains(c)).collect();
    let rows = (0..pivots.len())
        .map(|i| free.iter().map(|&f| a[i][f]).collect())
        .collect();
    Rref { pivots, free, rows }
}

/// `n/d ≡ a (mod m)` with `|n|, d ≤ sqrt(m/2)`.
fn rational_reconstruct(a: &BigInt, m: &BigInt) -> Option<(BigInt, BigInt)> {
    let bound = (m / 2u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let t2 = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    let (n, d) = if t1.is_negative() { (-r1, -t1) } else { (r1, t1) };
    (n.gcd(&d).is_one()).then_some((n, d))
}

fn verify_kernel(m: &IntMatrix, v: &[BigInt]) -> bool {
    (0..m.rows()).all(|r| {
        let mut acc = BigInt::zero();
        for (a, b) in m.row(r).iter().zip(v) {
            if !a.is_zero() && !b.is_zero() {
                acc += a * b;
            }
        }
        acc.is_zero()
    })
}

/// Clears denominators and divides out the content.
fn primitive(num: Vec<(BigInt, BigInt)>) -> Vec<BigInt> {
    let l = num.iter().fold(BigInt::one(), |acc, (_, d)| acc.lcm(d));
    let v: Vec<BigInt> = num.into_iter().map(|(n, d)| n * (&l / d)).collect();
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        v
    } else {
        v.into_iter().map(|x| x / &g).collect()
    }
}

fn modular_kernel(m: &IntMatrix, max_primes: usize) -> Option<Vec<Vec<BigInt>>> {
    let mut ps = primes();
    let mut base: Option<Rref> = None;
    let mut modulus = BigInt::one();
    let mut residues: Vec<Vec<BigInt>> = Vec::new();
    for _ in 0..max_primes {
        let p = ps.next().unwrap();
        let r = rref_mod(m, p);
        match &base {
            Some(b)
                if r.pivots.len() < b.pivots.len() || (r.pivots.len() == b.pivots.len() && r.pivots != b.pivots) =>
            {
                continue
            }
            Some(b) if r.pivots.len() == b.pivots.len() => {
                // CRT-combine the new residues into the running ones.
                let pb = BigInt::from(p);
                let inv = BigInt::from(pow_mod(reduce(&modulus, p), p - 2, p));
                for (acc_row, new_row) in residues.iter_mut().zip(&r.rows) {
                    for (acc, &x) in acc_row.iter_mut().zip(new_row) {
                        let diff = (BigInt::from(x) - &*acc).mod_floor(&pb);
                        let k = (diff * &inv).mod_floor(&pb);
                        *acc += &modulus * k;
                    }
                }
                modulus *= &pb;
            }
            _ => {
                residues = r
                    .rows
                    .iter()
                    .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
                    .collect();
                modulus = BigInt::from(p);
                base = Some(r);
                if base.as_ref().unwrap().free.is_empty() {
                    return Some(Vec::new());
                }
            }
        }
        let b = base.as_ref().unwrap();
        if let Some(basis) = lift_kernel(m, b, &residues, &modulus) {
            return Some(basis);
        }
    }
    None
}

fn lift_kernel(m: &IntMatrix, b: &Rref, residues: &[Vec<BigInt>], modulus: &BigInt) -> Option<Vec<Vec<BigInt>>> {
    let mut basis = Vec::with_capacity(b.free.len());
    for (k, &f) in b.free.iter().enumerate() {
        let mut entries = vec![(BigInt::zero(), BigInt::one()); m.cols()];
        entries[f] = (BigInt::one(), BigInt::one());
        for (i, &pc) in b.pivots.iter().enumerate() {
            let neg = (-&residues[i][k]).mod_floor(modulus);
            entries[pc] = rational_reconstruct(&neg, modulus)?;
        }
        let v = primitive(entries);
        if !verify_kernel(m, &v) {
            return None;
        }
        basis.push(v);
    }
    Some(basis)
}

/// Fraction-free Gauss–Jordan elimination with content removal; returns an
/// integer kernel basis.
fn exact_kernel(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let (nr, nc) = (m.rows(), m.cols());
    let mut a: Vec<Vec<BigInt>> = (0..nr).map(|r| m.row(r).to_vec()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..nc {
        if row == nr {
            break;
        }
        let Some(pr) = (row..nr).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(row, pr);
        let prow = a[row].clone();
        for (r, other) in a.iter_mut().enumerate() {
            if r == row || other[c].is_zero() {
                continue;
            }
            let f = other[c].clone();
            for (x, y) in other.iter_mut().zip(&prow) {
                *x = &*x * &prow[c] - &f * y;
            }
            let g = other.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
            if !g.is_zero() && !g.is_one() {
                for x in other.iter_mut() {
                    *x /= &g;
                }
            }
        }
        pivots.push(c);
        row += 1;
    }
    let free: Vec<usize> = (0..nc).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut entries = vec![(BigInt::zero(), BigInt::one()); nc];
            entries[f] = (BigInt::one(), BigInt::one());
            for (i, &pc) in pivots.iter().enumerate() {
                let (n, d) = (-&a[i][f], a[i][pc].clone());
                let g = n.gcd(&d);
                let (mut n, mut d) = if g.is_zero() { (n, d) } else { (n / &g, d / &g) };
                if d.sign() == Sign::Minus {
                    n = -n;
                    d = -d;
                }
                entries[pc] = (n, d);
            }
            primitive(entries)
        })
        .collect()
}

/// An integer basis of `{v : M v = 0}`; every vector is primitive and verified.
pub fn kernel_basis(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    if m.cols() == 0 {
        return Vec::new();
    }
    if m.rows() == 0 {
        return (0..m.cols())
            .map(|i| (0..m.cols()).map(|j| BigInt::from((i == j) as i64)).collect())
            .collect();
    }
    modular_kernel(m, 16).unwrap_or_else(|| exact_kernel(m))
}

/// Exact rank over Q.
pub fn rank(m: &IntMatrix) -> usize {
    m.cols() - kernel_basis(m).len()
}

/// `Σ a_i b_i`.
pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn primes_are_prime() {
        let ps: Vec<u64> = primes().take(3).collect();
        assert!(ps.windows(2).all(|w| w[0] > w[1]));
        assert!(ps.iter().all(|&p| is_prime(p)));
        assert!(!is_prime(561));
        assert!(is_prime((1u64 << 61) - 1));
    }

    #[test]
    fn reconstruction() {
        let m = BigInt::from(1_000_003i64);
        let a = (BigInt::from(-3) * BigInt::from(7).modpow(&(&m - 2), &m)).mod_floor(&m);
        assert_eq!(rational_reconstruct(&a, &m), Some((BigInt::from(-3), BigInt::from(7))));
    }

    #[test]
    fn kernel_small() {
        let m = mat(&[vec![1, 2, 3], vec![2, 4, 6]]);
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 2);
        assert_eq!(rank(&m), 1);
        assert_eq!(exact_kernel(&m).len(), 2);
        let m = mat(&[vec![3, 0], vec![0, 5]]);
        assert!(kernel_basis(&m).is_empty());
    }

    #[test]
    fn kernel_needs_large_entries() {
        // Kernel vector with entries beyond one prime's reconstruction bound.
        let big = 3_000_000_019i64;
        let m = mat(&[vec![big, -(big - 2)], vec![2 * big, -2 * (big - 2)]]);
        let k = kernel_basis(&m);
        assert_eq!(k, vec![vec![BigInt::from(big - 2), BigInt::from(big)]]);
    }

    #[test]
    fn exact_and_modular_agree() {
        let m = mat(&[vec![2, -1, 0, 1], vec![1, 1, -3, 0], vec![3, 0, -3, 1]]);
        let a = kernel_basis(&m);
        let b = exact_kernel(&m);
        assert_eq!(a.len(), b.len());
        for v in a.iter().chain(&b) {
            assert!(verify_kernel(&m, v));
        }
    }

    #[test]
    fn sparse_rank_matches_exact_rank() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let (r, c) = (rng.gen_range(1..7), rng.gen_range(1..7));
            let rows: Vec<Vec<i64>> = (0..r)
                .map(|_| {
                    (0..c)
                        .map(|_| if rng.gen_bool(0.5) { 0 } else { rng.gen_range(-4..=4) })
                        .collect()
                })
                .collect();
            let sparse: Vec<Vec<(usize, BigInt)>> = rows
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(_, v)| **v != 0)
                        .map(|(j, v)| (j, BigInt::from(*v)))
                        .collect()
                })
                .collect();
            assert_eq!(sparse_rank_mod_p(&sparse, c), rank(&mat(&rows)), "{rows:?}");
        }
    }
}
