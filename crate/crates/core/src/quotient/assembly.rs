//! Seven-row covers combining a finite abelian quotient of the residual
//! group with a triangle quotient on which one generator acts trivially.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::cases::{
    condition_i_ii_relators, condition_iii_relators, cut_data_from_action, dedup_relators, template, CaseTag,
    FactoryContext,
};
use super::group::{restrict_to_orbit, sorted_orbits};
use super::strategy::{quotient_strategies, solve_shape, QuotientBudget};
use super::witness::{QuotientShape, QuotientWitness};
use crate::cover::{check_condition_i_ii, check_condition_iii, CutData};
use crate::error::{Error, Result};
use crate::homology::matrix::IntMatrix;
use crate::homology::snf::smith_normal_form_with_witnesses;
use crate::perm::Perm;
use crate::presentation::GroupPresentation;
use crate::slope::{hypothesis_check, Case5Variant, HypothesisTag, Slope};
use crate::word::FreeWord;

/// A finite abelian group `⊕ Z/m_i` with the images of the residual generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianImage {
    pub moduli: Vec<u64>,
    /// One coordinate vector per generator.
    pub images: Vec<Vec<u64>>,
    /// Moduli substituted for free summands.
    pub free_substitutes: usize,
}

impl AbelianImage {
    pub fn order(&self) -> u64 {
        self.moduli.iter().product()
    }

    /// Translation by each generator's image, on mixed-radix indices.
    pub fn translations(&self) -> Vec<Perm> {
        let size = self.order() as usize;
        let decode = |mut x: usize| -> Vec<u64> {
            self.moduli
                .iter()
                .map(|&m| {
                    let d = (x as u64) % m;
                    x /= m as usize;
                    d
                })
                .collect()
        };
        let encode = |v: &[u64]| -> usize {
            v.iter()
                .zip(&self.moduli)
                .rev()
                .fold(0usize, |acc, (&d, &m)| acc * m as usize + d as usize)
        };
        self.images
            .iter()
            .map(|img| {
                let images = (0..size)
                    .map(|x| {
                        let v: Vec<u64> = decode(x)
                            .iter()
                            .zip(img)
                            .zip(&self.moduli)
                            .map(|((a, b), m)| (a + b) % m)
                            .collect();
                        encode(&v)
                    })
                    .collect();
                Perm::from_images(images).expect("translations are bijective")
            })
            .collect()
    }
}

/// The abelianization of `p`, with each free summand replaced by `Z/free_modulus`.
pub fn abelian_image(p: &GroupPresentation, free_modulus: u64) -> Result<AbelianImage> {
    let k = p.generator_count();
    let rows = p.abelianized_relators();
    let snf = if rows.is_empty() {
        None
    } else {
        Some(smith_normal_form_with_witnesses(&IntMatrix::from_rows(&rows)?))
    };
    let v = match &snf {
        Some(s) => {
            s.v.clone()
                .ok_or_else(|| Error::Precondition("missing column witness".into()))?
        }
        None => IntMatrix::identity(k),
    };
    let factor = |i: usize| -> BigInt {
        snf.as_ref()
            .and_then(|s| s.invariant_factors.get(i).cloned())
            .unwrap_or_else(BigInt::zero)
    };
    let mut moduli = Vec::new();
    let mut columns = Vec::new();
    let mut free_substitutes = 0;
    for i in 0..k {
        let d = factor(i);
        let m = if d.is_zero() {
            free_substitutes += 1;
            free_modulus
        } else {
            d.to_u64().ok_or(Error::Overflow)?
        };
        if m > 1 {
            moduli.push(m);
            columns.push(i);
        }
    }
    let images = (0..k)
        .map(|j| {
            columns
                .iter()
                .zip(&moduli)
                .map(|(&i, &m)| {
                    let r = v.get(j, i).mod_floor(&BigInt::from(m));
                    r.to_u64().expect("reduced below the modulus")
                })
                .collect()
        })
        .collect();
    Ok(AbelianImage {
        moduli,
        images,
        free_substitutes,
    })
}

/// One assembled seven-row cover and its ingredients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Case5Candidate {
    pub data: CutData,
    pub abelian: AbelianImage,
    pub triangle: Option<QuotientWitness>,
}

/// Generator roles `(large, small, central)` in the residual group, and the
/// order of the large one.
fn roles(variant: Case5Variant, r: i64, s: Slope) -> (usize, usize, usize, i64) {
    let rm = r * s.mu();
    match variant {
        Case5Variant::A => (0, 1, 2, rm - s.lambda()),
        Case5Variant::B => (2, 0, 1, rm - 2 * s.lambda()),
    }
}

fn case_tag(variant: Case5Variant) -> CaseTag {
    match variant {
        Case5Variant::A => CaseTag::C5a,
        Case5Variant::B => CaseTag::C5b,
    }
}

fn residual_presentation(variant: Case5Variant, r: i64, s: Slope) -> Result<GroupPresentation> {
    let (names, sigma) = template(case_tag(variant), 7)?;
    let mut rels = condition_i_ii_relators(&sigma);
    rels.extend(condition_iii_relators(&sigma, r, s)?);
    GroupPresentation::new(names, dedup_relators(rels))
}

/// The abelian group cut out by the residual relators that avoid the large
/// generator, on the two remaining generators.
pub fn abelian_factor(variant: Case5Variant, r: i64, s: Slope) -> Result<AbelianImage> {
    let p = residual_presentation(variant, r, s)?;
    let (large, _, _, _) = roles(variant, r, s);
    let keep: Vec<i32> = (1..=3).filter(|&g| g != large as i32 + 1).collect();
    let relabel = |l: i32| {
        let k = keep.iter().position(|&g| g == l.abs()).expect("kept generator") as i32 + 1;
        k * l.signum()
    };
    let rels = p
        .relators
        .iter()
        .filter(|w| w.letters().iter().all(|l| keep.contains(&l.abs())))
        .map(|w| FreeWord::new(w.letters().iter().map(|&l| relabel(l))))
        .collect();
    let names = keep.iter().map(|&g| p.names[g as usize - 1].clone()).collect();
    abelian_image(&GroupPresentation::new(names, rels)?, 0)
}

fn check_case5_guard(variant: Case5Variant, r: i64, s: Slope) -> Result<()> {
    let tag = match variant {
        Case5Variant::A => HypothesisTag::Case5a,
        Case5Variant::B => HypothesisTag::Case5b,
    };
    if hypothesis_check(tag, r, s).holds {
        return Ok(());
    }
    Err(Error::GuardViolation {
        case: case_tag(variant).as_str().into(),
        reason: format!("{tag:?} guard fails at R = {r}, slope {s}"),
    })
}

/// Candidates in order: abelian × triangle, then abelian alone. Each passes
/// conditions I–III; actions beyond the group cap are skipped.
pub fn assembly_candidates(
    variant: Case5Variant,
    r: i64,
    s: Slope,
    ctx: &FactoryContext,
) -> Result<Vec<Case5Candidate>> {
    check_case5_guard(variant, r, s)?;
    let (_, sigma) = template(case_tag(variant), 7)?;
    let residual = residual_presentation(variant, r, s)?;
    let lambda = s.lambda().unsigned_abs();
    let abelian = abelian_image(&residual, lambda.max(2))?;
    if abelian.order() as usize > ctx.group_cap {
        return Err(Error::SearchExhausted {
            cap: ctx.group_cap,
            what: format!("abelian factor of order {} exceeds the group cap", abelian.order()),
        });
    }
    let trans = abelian.translations();

    let (large, small, central, p) = roles(variant, r, s);
    let g = r.unsigned_abs().gcd(&lambda);
    let mut triangle = None;
    if g >= 2 && p.unsigned_abs() >= 2 && lambda >= 2 {
        let shape = QuotientShape::triangle(p.unsigned_abs(), g, lambda)?;
        match solve_shape(&shape, &ctx.budget, ctx.strategies) {
            Ok(w) => triangle = Some(w),
            Err(Error::SearchExhausted { .. }) => {}
            Err(e) => return Err(e),
        }
    }

    let mut out = Vec::new();
    let mut push = |images: Vec<Perm>, triangle: Option<QuotientWitness>| -> Result<()> {
        let orbits = sorted_orbits(&images);
        let orbit = orbits
            .iter()
            .find(|o| o.contains(&0))
            .expect("the basepoint lies in an orbit");
        let images = restrict_to_orbit(&images, orbit);
        let data = cut_data_from_action(&sigma, &images)?;
        if check_condition_i_ii(&data) == (true, true) && check_condition_iii(&data, r, s) {
            out.push(Case5Candidate {
                data,
                abelian: abelian.clone(),
                triangle,
            });
        }
        Ok(())
    };
    if let Some(w) = &triangle {
        let dy = w.degree;
        let da = abelian.order() as usize;
        if dy * da <= ctx.group_cap {
            let mut y = vec![Perm::identity(dy); 3];
            y[large] = w.images[0].clone();
            y[small] = w.images[1].clone();
            y[central] = Perm::identity(dy);
            let images = (0..3).map(|i| product_perm(&y[i], &trans[i])).collect();
            push(images, Some(w.clone()))?;
        }
    }
    push(trans.clone(), None)?;
    Ok(out)
}

/// `y × t` acting on pairs `(i, j) ↦ i · |t| + j`.
fn product_perm(y: &Perm, t: &Perm) -> Perm {
    let (dy, dt) = (y.degree(), t.degree());
    Perm::from_images((0..dy * dt).map(|x| y.apply(x / dt) * dt + t.apply(x % dt)).collect())
        .expect("a product of permutations")
}

/// The first assembled cover for the variant's residual relations.
pub fn case5_assembly(variant: Case5Variant, r: i64, s: Slope, degree_cap: usize) -> Result<CutData> {
    let strategies = quotient_strategies();
    let ctx = FactoryContext {
        budget: QuotientBudget {
            degree_cap,
            ..QuotientBudget::default()
        },
        strategies: &strategies,
        group_cap: degree_cap.max(1) * 64,
    };
    assembly_candidates(variant, r, s, &ctx)?
        .into_iter()
        .next()
        .map(|c| c.data)
        .ok_or_else(|| Error::SearchExhausted {
            cap: degree_cap,
            what: "no assembled cover passes conditions I-III".into(),
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slope::{case5_abelian_order, pell_family};

    fn sl(m: i64, l: i64) -> Slope {
        Slope::new(m, l).unwrap()
    }

    #[test]
    fn admissible_5a() {
        let s = sl(1, 5);
        let c = case5_assembly(Case5Variant::A, 1, s, 64).unwrap();
        assert_eq!(c.rows(), 7);
        assert_eq!(check_condition_i_ii(&c), (true, true));
        assert!(check_condition_iii(&c, 1, s));
    }

    #[test]
    fn abelian_order_matches_closed_form() {
        for (v, r, s) in [
            (Case5Variant::A, 1, sl(1, 5)),
            (Case5Variant::A, 2, sl(3, 4)),
            (Case5Variant::B, 1, sl(1, 5)),
            (Case5Variant::B, 3, sl(2, 5)),
        ] {
            let a = abelian_factor(v, r, s).unwrap();
            assert_eq!(a.free_substitutes, 0, "{v:?} {r} {s}");
            assert_eq!(a.order() as i128, case5_abelian_order(v, r, s).abs(), "{v:?} {r} {s}");
        }
    }

    #[test]
    fn pell_slopes_refused() {
        assert!(matches!(
            case5_assembly(Case5Variant::A, 1, sl(-1, 2), 64),
            Err(Error::GuardViolation { .. })
        ));
        // The guard's square is (Rμ − 2λ)², so the Pell family appears with μ reflected.
        for s in pell_family(3) {
            let s = sl(-s.mu(), s.lambda());
            assert!(matches!(
                case5_assembly(Case5Variant::A, 1, s, 64),
                Err(Error::GuardViolation { .. })
            ));
        }
    }

    #[test]
    fn unit_lambda_refused() {
        assert!(matches!(
            case5_assembly(Case5Variant::B, 1, sl(9, 1), 64),
            Err(Error::GuardViolation { .. })
        ));
    }

    #[test]
    fn full_abelianization_collapses_here() {
        // With every relator imposed the abelian part is trivial at R = 1, slope (1, 5).
        let p = residual_presentation(Case5Variant::A, 1, sl(1, 5)).unwrap();
        assert_eq!(abelian_image(&p, 2).unwrap().order(), 1);
    }

    #[test]
    fn translations_compose() {
        let a = AbelianImage {
            moduli: vec![2, 3],
            images: vec![vec![1, 0], vec![0, 1]],
            free_substitutes: 0,
        };
        let t = a.translations();
        assert_eq!(t[0].order(), 2);
        assert_eq!(t[1].order(), 3);
        assert!(t[0].commutes_with(&t[1]));
    }
}
