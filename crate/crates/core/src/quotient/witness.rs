//! Order requirements on finite quotients and the witnesses that meet them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::presentation::{CosetAction, GroupPresentation};
use crate::word::FreeWord;

/// A group given by generator orders and orders of selected two-letter
/// products `g_i g_j`: triangle groups and the Coxeter-type groups of the
/// longer templates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuotientShape {
    pub names: Vec<String>,
    pub orders: Vec<u64>,
    /// `(i, j, o)`: the product `g_i g_j` has order `o`.
    pub products: Vec<(usize, usize, u64)>,
}

impl QuotientShape {
    pub fn new(names: Vec<String>, orders: Vec<u64>, products: Vec<(usize, usize, u64)>) -> Result<Self> {
        if names.len() != orders.len() {
            return Err(Error::Malformed("one order per generator is required".into()));
        }
        let g = names.len();
        let mut seen: Vec<(usize, usize, u64)> = Vec::new();
        for &(i, j, o) in &products {
            if i >= g || j >= g || i == j {
                return Err(Error::Malformed(format!("product ({i}, {j}) out of range")));
            }
            let key = (i.min(j), i.max(j), o);
            if !seen.contains(&key) {
                seen.push(key);
            }
        }
        Ok(QuotientShape {
            names,
            orders,
            products: seen,
        })
    }

    /// `⟨a, b | a^p, b^q, (ab)^r⟩`.
    pub fn triangle(p: u64, q: u64, r: u64) -> Result<Self> {
        if p < 2 || q < 2 || r < 2 {
            return Err(Error::Precondition(format!(
                "triangle orders ({p}, {q}, {r}) must all be at least 2"
            )));
        }
        QuotientShape::new(vec!["a".into(), "b".into()], vec![p, q], vec![(0, 1, r)])
    }

    pub fn generator_count(&self) -> usize {
        self.names.len()
    }

    /// The triangle orders `(p, q, r)` when the shape has two generators and one product.
    pub fn as_triangle(&self) -> Option<(u64, u64, u64)> {
        match (self.orders.as_slice(), self.products.as_slice()) {
            ([p, q], [(0, 1, r)]) => Some((*p, *q, *r)),
            _ => None,
        }
    }

    /// Every order requirement as a word with its exact order.
    pub fn requirements(&self) -> Vec<(FreeWord, u64)> {
        let mut out: Vec<(FreeWord, u64)> = self
            .orders
            .iter()
            .enumerate()
            .map(|(i, &o)| (FreeWord::gen(i as i32 + 1), o))
            .collect();
        for &(i, j, o) in &self.products {
            out.push((FreeWord::new([i as i32 + 1, j as i32 + 1]), o));
        }
        out
    }

    /// The presented group: `g^o` and `(g_i g_j)^o` for every requirement.
    pub fn presentation(&self) -> GroupPresentation {
        let relators = self.requirements().into_iter().map(|(w, o)| w.pow(o as i64)).collect();
        GroupPresentation::new(self.names.clone(), relators).expect("requirements use the shape's generators")
    }

    /// Whether some requirement pairs the same product with two different orders.
    pub fn conflicting(&self) -> bool {
        self.products
            .iter()
            .enumerate()
            .any(|(k, &(i, j, o))| self.products[..k].iter().any(|&(a, b, p)| (a, b) == (i, j) && p != o))
    }
}

/// An order requirement together with the order actually measured.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CertifiedOrder {
    pub word: FreeWord,
    pub required: u64,
    pub actual: u64,
}

/// A transitive permutation representation of a finite quotient in which
/// every required order is attained exactly.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuotientWitness {
    pub strategy: String,
    pub degree: usize,
    pub images: Vec<Perm>,
    pub orders: Vec<CertifiedOrder>,
}

impl QuotientWitness {
    /// Measures every required order; fails unless all are exact and the
    /// action is transitive.
    pub fn certify(strategy: &str, images: Vec<Perm>, shape: &QuotientShape) -> Result<Self> {
        if images.len() != shape.generator_count() {
            return Err(Error::Malformed(format!(
                "{} images for {} generators",
                images.len(),
                shape.generator_count()
            )));
        }
        let act = CosetAction::new(images.clone(), 0)?;
        if !act.is_transitive() {
            return Err(Error::Malformed("quotient action is not transitive".into()));
        }
        let orders: Vec<CertifiedOrder> = shape
            .requirements()
            .into_iter()
            .map(|(word, required)| {
                let actual = act.eval(&word).order();
                CertifiedOrder { word, required, actual }
            })
            .collect();
        if let Some(bad) = orders.iter().find(|o| o.actual != o.required) {
            return Err(Error::RelatorNontrivial(format!(
                "{} has order {} instead of {}",
                bad.word, bad.actual, bad.required
            )));
        }
        Ok(QuotientWitness {
            strategy: strategy.into(),
            degree: act.degree(),
            images,
            orders,
        })
    }

    pub fn action(&self) -> CosetAction {
        CosetAction {
            gens: self.images.clone(),
            basepoint: 0,
        }
    }

    /// Whether every relator of `p` acts trivially.
    pub fn satisfies(&self, p: &GroupPresentation) -> bool {
        self.action().violated_relator(p).is_none()
    }

    /// Re-measures the orders; true when every one is still exact.
    pub fn is_exact(&self) -> bool {
        let act = self.action();
        self.orders
            .iter()
            .all(|o| o.actual == o.required && act.eval(&o.word).order() == o.required)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_precondition() {
        assert!(matches!(QuotientShape::triangle(1, 3, 4), Err(Error::Precondition(_))));
        let s = QuotientShape::triangle(2, 2, 5).unwrap();
        assert_eq!(s.as_triangle(), Some((2, 2, 5)));
        assert_eq!(s.presentation().relators.len(), 3);
    }

    #[test]
    fn certification_rejects_collapse() {
        let s = QuotientShape::triangle(2, 2, 3).unwrap();
        let a = Perm::from_cycles(3, &[&[1, 2]]).unwrap();
        let b = Perm::from_cycles(3, &[&[0, 1]]).unwrap();
        let w = QuotientWitness::certify("manual", vec![a.clone(), b], &s).unwrap();
        assert!(w.is_exact());
        assert!(w.satisfies(&s.presentation()));
        assert!(QuotientWitness::certify("manual", vec![a.clone(), a], &s).is_err());
    }
}
