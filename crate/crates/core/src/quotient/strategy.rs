//! Interchangeable strategies for finding exact-order finite quotients.

use super::psl::psl2_quotient;
use super::witness::{QuotientShape, QuotientWitness};
use crate::error::{Error, Result};
use crate::homology::lowindex::{low_index_search, LowIndexLimits};
use crate::perm::Perm;

/// Search limits shared by every strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct QuotientBudget {
    /// Largest permutation degree a witness may have.
    pub degree_cap: usize,
    /// Node budget for backtracking searches.
    pub node_budget: u64,
}

impl Default for QuotientBudget {
    fn default() -> Self {
        QuotientBudget {
            degree_cap: 64,
            node_budget: 200_000,
        }
    }
}

pub trait QuotientStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    /// A witness within the budget, or `None` when this strategy has nothing to offer.
    fn find(&self, shape: &QuotientShape, budget: &QuotientBudget) -> Option<QuotientWitness>;
}

/// A triangle witness for some ordering of the order triple, carried back
/// to the requested ordering.
fn permuted_triangle(
    shape: &QuotientShape,
    name: &str,
    build: impl Fn(u64, u64, u64) -> Option<Vec<Perm>>,
) -> Option<QuotientWitness> {
    let (p, q, r) = shape.as_triangle()?;
    // With u = a, v = b, w = (ab)⁻¹ (so uvw = 1), every ordering of the
    // orders is realised by a pair drawn from (u, v, w) and their inverses.
    let orderings: [(u64, u64, u64); 6] = [(p, q, r), (q, r, p), (r, p, q), (q, p, r), (p, r, q), (r, q, p)];
    for (k, &(x, y, z)) in orderings.iter().enumerate() {
        let Some(g) = build(x, y, z) else { continue };
        let (s, t) = (&g[0], &g[1]);
        let w = s.then(t).inverse();
        // Recover (u, v) from a witness (s, t) for the k-th ordering.
        let (u, v) = match k {
            0 => (s.clone(), t.clone()),
            1 => (w, s.clone()),
            2 => (t.clone(), w),
            3 => (t.inverse(), s.inverse()),
            4 => (s.inverse(), w.inverse()),
            _ => (w.inverse(), t.inverse()),
        };
        if let Ok(found) = QuotientWitness::certify(name, vec![u, v], shape) {
            return Some(found);
        }
    }
    None
}

/// Two reflections of a regular `r`-gon: the `(2, 2, r)` triangle groups.
pub struct Dihedral;

impl QuotientStrategy for Dihedral {
    fn name(&self) -> &'static str {
        "dihedral"
    }

    fn find(&self, shape: &QuotientShape, budget: &QuotientBudget) -> Option<QuotientWitness> {
        permuted_triangle(shape, self.name(), |p, q, r| {
            if p != 2 || q != 2 {
                return None;
            }
            let n = if r == 2 { 4 } else { r as usize };
            if n > budget.degree_cap {
                return None;
            }
            if r == 2 {
                // The Klein four-group acting regularly.
                let a = Perm::from_cycles(4, &[&[0, 1], &[2, 3]]).ok()?;
                let b = Perm::from_cycles(4, &[&[0, 2], &[1, 3]]).ok()?;
                return Some(vec![a, b]);
            }
            let a = Perm::from_images((0..n).map(|i| (n - i) % n).collect()).ok()?;
            let b = Perm::from_images((0..n).map(|i| (n + 1 - i) % n).collect()).ok()?;
            Some(vec![a, b])
        })
    }
}

/// Projective-line actions of `PSL(2, ℓ)`; covers spherical, Euclidean and
/// hyperbolic triangle groups and the Coxeter-type shapes alike.
pub struct ClosedForm;

impl QuotientStrategy for ClosedForm {
    fn name(&self) -> &'static str {
        "closed-form"
    }

    fn find(&self, shape: &QuotientShape, budget: &QuotientBudget) -> Option<QuotientWitness> {
        if shape.conflicting() {
            return None;
        }
        psl2_quotient(shape, budget.degree_cap, budget.node_budget)
    }
}

/// Affine maps `x ↦ ux + s` of `Z/ℓ`, the colouring actions of metacyclic quotients.
pub struct Coloring;

fn mult_order(u: u64, p: u64) -> u64 {
    let mut k = 1;
    let mut x = u % p;
    while x != 1 {
        x = x * u % p;
        k += 1;
    }
    k
}

impl QuotientStrategy for Coloring {
    fn name(&self) -> &'static str {
        "coloring"
    }

    fn find(&self, shape: &QuotientShape, budget: &QuotientBudget) -> Option<QuotientWitness> {
        permuted_triangle(shape, self.name(), |p, q, r| {
            for l in (2..=budget.degree_cap as u64).filter(|&l| (2..l).take_while(|d| d * d <= l).all(|d| l % d != 0)) {
                // An affine map has the order of its multiplier, or ℓ for a translation.
                let order_of = |u: u64| if u == 1 { l } else { mult_order(u, l) };
                for u in 1..l {
                    if order_of(u) != p {
                        continue;
                    }
                    for v in 1..l {
                        if order_of(v) != q || order_of(u * v % l) != r {
                            continue;
                        }
                        let shift = u64::from(u == 1);
                        let a = Perm::from_images((0..l).map(|x| ((u * x + shift) % l) as usize).collect()).ok()?;
                        let b = Perm::from_images((0..l).map(|x| ((v * x + 1) % l) as usize).collect()).ok()?;
                        if a.order() == p && b.order() == q && a.then(&b).order() == r {
                            return Some(vec![a, b]);
                        }
                    }
                }
            }
            None
        })
    }
}

/// Backtracking coset enumeration on the presented shape, keeping the
/// first action with exact orders.
pub struct LowIndex;

impl QuotientStrategy for LowIndex {
    fn name(&self) -> &'static str {
        "low-index"
    }

    fn find(&self, shape: &QuotientShape, budget: &QuotientBudget) -> Option<QuotientWitness> {
        let pres = shape.presentation();
        let limits = LowIndexLimits {
            max_index: budget.degree_cap,
            node_budget: budget.node_budget,
            exact_index: false,
            max_results: 1,
        };
        let mut accept =
            |a: &crate::presentation::CosetAction| QuotientWitness::certify("low-index", a.gens.clone(), shape).is_ok();
        let res = low_index_search(&pres, &limits, &mut accept);
        let a = res.actions.into_iter().next()?;
        QuotientWitness::certify(self.name(), a.gens, shape).ok()
    }
}

/// Every strategy in its default order: closed forms before search.
pub fn quotient_strategies() -> Vec<Box<dyn QuotientStrategy>> {
    vec![
        Box::new(Dihedral),
        Box::new(ClosedForm),
        Box::new(Coloring),
        Box::new(LowIndex),
    ]
}

pub fn strategy_names() -> Vec<&'static str> {
    quotient_strategies().iter().map(|s| s.name()).collect()
}

/// The registered strategies named in `names`, in registry order.
pub fn select_strategies(names: &[String]) -> Result<Vec<Box<dyn QuotientStrategy>>> {
    let known = strategy_names();
    if let Some(bad) = names.iter().find(|n| !known.contains(&n.as_str())) {
        return Err(Error::Malformed(format!(
            "unknown quotient strategy {bad:?}; expected one of {known:?}"
        )));
    }
    Ok(quotient_strategies()
        .into_iter()
        .filter(|s| names.iter().any(|n| n == s.name()))
        .collect())
}

/// Runs the strategies in order and returns the first witness.
pub fn solve_shape(
    shape: &QuotientShape,
    budget: &QuotientBudget,
    strategies: &[Box<dyn QuotientStrategy>],
) -> Result<QuotientWitness> {
    for s in strategies {
        if let Some(w) = s.find(shape, budget) {
            debug_assert!(w.is_exact() && w.satisfies(&shape.presentation()));
            return Ok(w);
        }
    }
    Err(Error::SearchExhausted {
        cap: budget.degree_cap,
        what: format!(
            "no exact-order quotient for orders {:?} and products {:?}",
            shape.orders, shape.products
        ),
    })
}

/// Permutations `a, b` of exact orders `p`, `q` with `ab` of order `r`.
pub fn triangle_quotient(p: i64, q: i64, r: i64, degree_cap: usize) -> Result<QuotientWitness> {
    if p < 2 || q < 2 || r < 2 {
        return Err(Error::Precondition(format!(
            "triangle orders ({p}, {q}, {r}) must all be at least 2"
        )));
    }
    let shape = QuotientShape::triangle(p as u64, q as u64, r as u64)?;
    let budget = QuotientBudget {
        degree_cap,
        ..QuotientBudget::default()
    };
    solve_shape(&shape, &budget, &quotient_strategies())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dihedral_pentagon() {
        let w = triangle_quotient(2, 2, 5, 64).unwrap();
        assert_eq!(w.strategy, "dihedral");
        assert_eq!(w.degree, 5);
        let rot = w.images[0].then(&w.images[1]);
        assert_eq!(rot.cycle_type(), vec![5]);
    }

    #[test]
    fn dihedral_reorders() {
        let shape = QuotientShape::triangle(2, 7, 2).unwrap();
        let w = Dihedral.find(&shape, &QuotientBudget::default()).unwrap();
        assert_eq!(w.degree, 7);
        let shape = QuotientShape::triangle(3, 2, 2).unwrap();
        assert!(Dihedral.find(&shape, &QuotientBudget::default()).is_some());
    }

    #[test]
    fn rejects_small_orders() {
        assert!(matches!(triangle_quotient(1, 3, 4, 64), Err(Error::Precondition(_))));
    }

    #[test]
    fn every_strategy_certifies_what_it_returns() {
        let budget = QuotientBudget {
            degree_cap: 30,
            node_budget: 100_000,
        };
        for (p, q, r) in [(2, 3, 7), (3, 3, 4), (2, 4, 5), (3, 3, 3), (2, 3, 6)] {
            let shape = QuotientShape::triangle(p, q, r).unwrap();
            let mut any = false;
            for s in quotient_strategies() {
                if let Some(w) = s.find(&shape, &budget) {
                    assert!(w.is_exact(), "{} on {:?}", s.name(), (p, q, r));
                    assert!(w.satisfies(&shape.presentation()));
                    assert!(w.degree <= budget.degree_cap);
                    any = true;
                }
            }
            assert!(any, "{:?}", (p, q, r));
        }
    }

    #[test]
    fn coloring_handles_euclidean() {
        let shape = QuotientShape::triangle(2, 3, 6).unwrap();
        let w = Coloring.find(&shape, &QuotientBudget::default()).unwrap();
        assert_eq!(w.degree, 7);
    }

    #[test]
    fn contradictory_orders_exhaust() {
        // `ab` and `ba` are conjugate, so they cannot have orders 3 and 2.
        let shape = QuotientShape {
            names: vec!["a".into(), "b".into()],
            orders: vec![2, 2],
            products: vec![(0, 1, 3), (0, 1, 2)],
        };
        let budget = QuotientBudget {
            degree_cap: 12,
            node_budget: 100_000,
        };
        assert!(matches!(
            solve_shape(&shape, &budget, &quotient_strategies()),
            Err(Error::SearchExhausted { cap: 12, .. })
        ));
    }

    #[test]
    fn selection_by_name() {
        let s = select_strategies(&["low-index".into(), "dihedral".into()]).unwrap();
        assert_eq!(
            s.iter().map(|s| s.name()).collect::<Vec<_>>(),
            vec!["dihedral", "low-index"]
        );
        assert!(select_strategies(&["magic".into()]).is_err());
    }
}
