//! Filling slopes, framing changes between isotopic monodromies, and the
//! slope inequalities that gate each cover construction.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::{boundary_twist_shift, monodromy_matrix, twist_endo, TwistGen, TwistWord};

/// A filling slope `α^μ β^λ` with `gcd(μ, λ) = 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawSlope", into = "RawSlope")]
pub struct Slope {
    mu: i64,
    lambda: i64,
}

#[derive(Serialize, Deserialize)]
struct RawSlope {
    mu: i64,
    lambda: i64,
}

impl TryFrom<RawSlope> for Slope {
    type Error = Error;
    fn try_from(r: RawSlope) -> Result<Self> {
        Slope::new(r.mu, r.lambda)
    }
}

impl From<Slope> for RawSlope {
    fn from(s: Slope) -> Self {
        RawSlope {
            mu: s.mu,
            lambda: s.lambda,
        }
    }
}

impl Slope {
    pub fn new(mu: i64, lambda: i64) -> Result<Self> {
        if mu == 0 && lambda == 0 {
            return Err(Error::InvalidSlope {
                mu,
                lambda,
                reason: "(0, 0) is not a slope".into(),
            });
        }
        if mu.gcd(&lambda) != 1 {
            return Err(Error::InvalidSlope {
                mu,
                lambda,
                reason: "entries are not coprime".into(),
            });
        }
        Ok(Slope { mu, lambda })
    }

    pub fn mu(&self) -> i64 {
        self.mu
    }

    pub fn lambda(&self) -> i64 {
        self.lambda
    }

    pub fn neg(&self) -> Slope {
        Slope {
            mu: -self.mu,
            lambda: -self.lambda,
        }
    }

    /// All slopes with `|μ|, |λ| ≤ window`, in lexicographic order.
    pub fn window(window: i64) -> Vec<Slope> {
        let mut out = Vec::new();
        for mu in -window..=window {
            for lambda in -window..=window {
                if let Ok(s) = Slope::new(mu, lambda) {
                    out.push(s);
                }
            }
        }
        out
    }
}

impl fmt::Debug for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.mu, self.lambda)
    }
}

/// Signed braid-length of a twist word: `D_x` counts `+1`, `D_y` counts `-1`,
/// matching the abelianization of the three-strand braid group in which
/// `D_x` and `D_y⁻¹` are the standard generators.
pub fn braid_exponent(word: &TwistWord) -> i64 {
    word.blocks()
        .iter()
        .map(|&(g, e)| match g {
            TwistGen::X => e,
            TwistGen::Y => -e,
        })
        .sum()
}

/// The full boundary twist `(D_x D_y⁻¹)^6`; it acts on the fiber group as
/// conjugation by `β^{-1}` and generates the kernel of the map to SL(2,Z).
pub fn boundary_twist() -> TwistWord {
    TwistWord::new([(TwistGen::X, 1), (TwistGen::Y, -1)]).pow(6)
}

/// Framing shift `k` with `M_source(μ, λ) ≅ M_target(μ, λ + kμ)` for two words
/// with equal monodromy matrices, read from the braid exponent difference.
pub fn isotopy_shift(source: &TwistWord, target: &TwistWord) -> Result<i64> {
    if monodromy_matrix(source) != monodromy_matrix(target) {
        return Err(Error::PatternMismatch(format!(
            "{source} and {target} have different monodromy matrices"
        )));
    }
    let diff = braid_exponent(target) - braid_exponent(source);
    if diff % 12 != 0 {
        return Err(Error::PatternMismatch(format!(
            "braid exponents of {source} and {target} differ by {diff}, not a multiple of 12"
        )));
    }
    Ok(diff / 12)
}

/// The same shift computed by conjugating the actual free-group images;
/// only practical for short words.
pub fn isotopy_shift_by_conjugation(source: &TwistWord, target: &TwistWord, bound: i64) -> Option<i64> {
    boundary_twist_shift(&twist_endo(source), &twist_endo(target), bound)
}

/// A change of monodromy `source → target` together with the induced map on
/// slopes, `(μ, λ) ↦ M (μ, λ)ᵀ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FramingTransform {
    pub name: String,
    pub source: TwistWord,
    pub target: TwistWord,
    /// Row-major `[[a, b], [c, d]]`: `μ' = aμ + bλ`, `λ' = cμ + dλ`.
    pub slope_map: [[i64; 2]; 2],
    /// When present, `target` is isotopic to `conjugator · source · conjugator⁻¹`.
    #[serde(default)]
    pub conjugator: Option<TwistWord>,
}

impl FramingTransform {
    pub fn new(
        name: &str,
        source: TwistWord,
        target: TwistWord,
        slope_map: [[i64; 2]; 2],
        conjugator: Option<TwistWord>,
    ) -> Result<Self> {
        let det = slope_map[0][0] * slope_map[1][1] - slope_map[0][1] * slope_map[1][0];
        if det.abs() != 1 {
            return Err(Error::NotInvertible(format!(
                "{name}: slope map {slope_map:?} has determinant {det}"
            )));
        }
        Ok(FramingTransform {
            name: name.into(),
            source,
            target,
            slope_map,
            conjugator,
        })
    }

    pub fn identity() -> Self {
        FramingTransform {
            name: "identity".into(),
            source: TwistWord::identity(),
            target: TwistWord::identity(),
            slope_map: [[1, 0], [0, 1]],
            conjugator: None,
        }
    }

    /// A pure framing shift `λ ↦ λ + kμ`.
    pub fn shift(name: &str, source: TwistWord, target: TwistWord, k: i64, conjugator: Option<TwistWord>) -> Self {
        FramingTransform {
            name: name.into(),
            source,
            target,
            slope_map: [[1, 0], [k, 1]],
            conjugator,
        }
    }

    fn shift_amount(&self) -> Option<i64> {
        let m = self.slope_map;
        (m[0] == [1, 0] && m[1][1] == 1).then_some(m[1][0])
    }

    pub fn map_slope(&self, s: Slope) -> Slope {
        let m = self.slope_map;
        let mu = m[0][0] * s.mu + m[0][1] * s.lambda;
        let lambda = m[1][0] * s.mu + m[1][1] * s.lambda;
        Slope::new(mu, lambda).expect("unimodular maps preserve coprimality")
    }

    pub fn inverse(&self) -> FramingTransform {
        let [[a, b], [c, d]] = self.slope_map;
        let det = a * d - b * c;
        FramingTransform {
            name: format!("{}^-1", self.name),
            source: self.target.clone(),
            target: self.source.clone(),
            slope_map: [[d * det, -b * det], [-c * det, a * det]],
            conjugator: self.conjugator.as_ref().map(TwistWord::inverse),
        }
    }

    /// Checks the slope map against the monodromies: the shift must equal
    /// the boundary-twist count between `target` and the conjugated source.
    pub fn verify(&self) -> Result<()> {
        let Some(k) = self.shift_amount() else {
            return Err(Error::PatternMismatch(format!(
                "{}: only framing shifts can be verified",
                self.name
            )));
        };
        let conjugated = match &self.conjugator {
            Some(c) => self.source.conjugate(c),
            None => self.source.clone(),
        };
        let found = isotopy_shift(&conjugated, &self.target)?;
        if found != k {
            return Err(Error::PatternMismatch(format!(
                "{}: slope shift {k} but monodromies differ by {found} boundary twists",
                self.name
            )));
        }
        Ok(())
    }
}

/// Rewrites `(word, s)` through `t`. Powers of the source word are accepted
/// for pure shifts: `source^p → target^p` with shift `p·k`.
pub fn apply_framing(t: &FramingTransform, word: &TwistWord, s: Slope) -> Result<(TwistWord, Slope)> {
    if *word == t.source {
        return Ok((t.target.clone(), t.map_slope(s)));
    }
    if let Some(k) = t.shift_amount() {
        if t.source.block_count() > 0 {
            for p in 2..=(word.block_count() / t.source.block_count().max(1) + 1) as i64 {
                if t.source.pow(p) == *word {
                    let lambda = s.lambda + p * k * s.mu;
                    return Ok((t.target.pow(p), Slope::new(s.mu, lambda)?));
                }
            }
        }
    }
    Err(Error::PatternMismatch(format!(
        "{word} does not match {} (source {})",
        t.name, t.source
    )))
}

pub mod words {
    //! The named monodromies of the worked examples.
    use super::*;

    fn w(s: &str) -> TwistWord {
        TwistWord::parse(s).expect("built-in word")
    }

    /// `h = D_x D_y`, the figure-eight knot monodromy.
    pub fn h() -> TwistWord {
        w("Dx Dy")
    }
    /// `g = D_y^5 D_x^-1`.
    pub fn g() -> TwistWord {
        w("Dy^5 Dx^-1")
    }
    /// `(-1) = (D_x D_y^-1 D_x)^2`.
    pub fn minus_one() -> TwistWord {
        w("(Dx Dy^-1 Dx)^2")
    }
    /// `D_y^2 D_x^-1`, the conjugator taking `-h` to a word isotopic to `g`.
    pub fn f_conj() -> TwistWord {
        w("Dy^2 Dx^-1")
    }
    /// `i = D_x^2 D_y^-4 D_x D_y^-4 D_x`, isotopic to `h^3`.
    pub fn i() -> TwistWord {
        w("Dx^2 Dy^-4 Dx Dy^-4 Dx")
    }
    /// `f = (D_x D_y)^18`.
    pub fn f18() -> TwistWord {
        h().pow(18)
    }
}

/// The five built-in framing identities.
pub fn builtin_transforms() -> Vec<FramingTransform> {
    use words::*;
    let neg_h = minus_one().concat(&h());
    vec![
        FramingTransform::shift("neg-h-to-g", neg_h.clone(), g(), -1, Some(f_conj())),
        FramingTransform::shift("h2-to-neg-h2", h().pow(2), neg_h.pow(2), 1, None),
        FramingTransform::shift("h2-to-g2", h().pow(2), g().pow(2), -1, Some(f_conj())),
        FramingTransform::shift("h3-to-i", h().pow(3), i(), 1, None),
        FramingTransform::shift("f-to-g18", f18(), g().pow(18), -9, Some(f_conj())),
    ]
}

/// Identifies a hypothesis (or construction guard) to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HypothesisTag {
    /// `|λ| > 1`.
    I,
    /// `1/|Rμ−λ| + 1/|Rμ−2λ| + 1/|λ| < 1`.
    II,
    /// `2/|Rμ−2λ| + 1/|λ| < 1`.
    III,
    /// `2/|Rμ−λ| + 1/|λ| < 1`.
    Case3a,
    /// `|λ| > 2 ∧ |Rμ−3λ| ≥ |λ|`, or `λ` even, nonzero, and `|Rμ−3λ| ≥ 4`.
    Case3b,
    /// Same inequality as `III`.
    Case4a,
    /// `|Rμ−λ| ≤ 2 ∧ |λ| > 2`.
    Case4b,
    /// `|λ| > 1`, `1/|Rμ−λ| + 1/|λ| < 2/3`, `|(Rμ−2λ)² − 2λ²| > 2|R|`.
    Case5a,
    /// `|λ| > 1`, `1/|Rμ−2λ| + 1/|λ| < 2/3`, `|(Rμ−λ)² − Rμλ| > 2|R|`.
    Case5b,
}

impl HypothesisTag {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "i" => HypothesisTag::I,
            "ii" => HypothesisTag::II,
            "iii" => HypothesisTag::III,
            "3a" => HypothesisTag::Case3a,
            "3b" => HypothesisTag::Case3b,
            "4a" => HypothesisTag::Case4a,
            "4b" => HypothesisTag::Case4b,
            "5a" => HypothesisTag::Case5a,
            "5b" => HypothesisTag::Case5b,
            _ => return Err(Error::Malformed(format!("unknown hypothesis tag {s:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisOutcome {
    pub holds: bool,
    /// A denominator vanished; the hypothesis is reported false.
    pub degenerate: bool,
}

impl HypothesisOutcome {
    fn of(holds: bool) -> Self {
        HypothesisOutcome {
            holds,
            degenerate: false,
        }
    }

    fn degenerate() -> Self {
        HypothesisOutcome {
            holds: false,
            degenerate: true,
        }
    }
}

/// `Σ cᵢ/|dᵢ|` as an exact rational, or `None` if some `dᵢ = 0`.
pub fn reciprocal_sum(terms: &[(i64, i64)]) -> Option<BigRational> {
    let mut acc = BigRational::zero();
    for &(c, d) in terms {
        if d == 0 {
            return None;
        }
        acc += BigRational::new(BigInt::from(c), BigInt::from(d.unsigned_abs()));
    }
    Some(acc)
}

fn below(terms: &[(i64, i64)], bound: BigRational) -> HypothesisOutcome {
    match reciprocal_sum(terms) {
        Some(v) => HypothesisOutcome::of(v < bound),
        None => HypothesisOutcome::degenerate(),
    }
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Evaluates the hypothesis `tag` at `(R, s)` in exact arithmetic.
pub fn hypothesis_check(tag: HypothesisTag, r: i64, s: Slope) -> HypothesisOutcome {
    let (mu, l) = (s.mu as i128, s.lambda as i128);
    let rm = r as i128 * mu;
    let narrow = |v: i128| i64::try_from(v).expect("slope arithmetic fits in i64");
    let a1 = narrow(rm - l);
    let a2 = narrow(rm - 2 * l);
    let a3 = narrow(rm - 3 * l);
    let lam = s.lambda;
    match tag {
        HypothesisTag::I => HypothesisOutcome::of(lam.abs() > 1),
        HypothesisTag::II => below(&[(1, a1), (1, a2), (1, lam)], BigRational::one()),
        HypothesisTag::III | HypothesisTag::Case4a => below(&[(2, a2), (1, lam)], BigRational::one()),
        HypothesisTag::Case3a => below(&[(2, a1), (1, lam)], BigRational::one()),
        HypothesisTag::Case3b => {
            if lam == 0 {
                return HypothesisOutcome::degenerate();
            }
            let odd_branch = lam.abs() > 2 && a3.abs() >= lam.abs();
            let even_branch = lam % 2 == 0 && a3.abs() >= 4;
            HypothesisOutcome::of(odd_branch || even_branch)
        }
        HypothesisTag::Case4b => HypothesisOutcome::of(a1.abs() <= 2 && lam.abs() > 2),
        HypothesisTag::Case5a => {
            if lam.abs() <= 1 {
                return HypothesisOutcome::of(false);
            }
            let ineq = below(&[(1, a1), (1, lam)], ratio(2, 3));
            let order = case5_abelian_order(Case5Variant::A, r, s);
            HypothesisOutcome {
                holds: ineq.holds && order.abs() > 2 * (r as i128).abs(),
                degenerate: ineq.degenerate,
            }
        }
        HypothesisTag::Case5b => {
            if lam.abs() <= 1 {
                return HypothesisOutcome::of(false);
            }
            let ineq = below(&[(1, a2), (1, lam)], ratio(2, 3));
            let order = case5_abelian_order(Case5Variant::B, r, s);
            HypothesisOutcome {
                holds: ineq.holds && order.abs() > 2 * (r as i128).abs(),
                degenerate: ineq.degenerate,
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case5Variant {
    A,
    B,
}

/// Signed determinant of the abelian factor in the Case 5 relation systems:
/// `(Rμ−2λ)² − 2λ²` for variant A, `(Rμ−λ)² − Rμλ` for variant B.
pub fn case5_abelian_order(variant: Case5Variant, r: i64, s: Slope) -> i128 {
    let rm = r as i128 * s.mu as i128;
    let l = s.lambda as i128;
    match variant {
        Case5Variant::A => (rm - 2 * l).pow(2) - 2 * l * l,
        Case5Variant::B => (rm - l).pow(2) - rm * l,
    }
}

/// `|order| > 2|R|`, the bound that keeps `σ_4²` (resp. `σ_1²`) nontrivial.
pub fn case5_order_bound(variant: Case5Variant, r: i64, s: Slope) -> bool {
    case5_abelian_order(variant, r, s).abs() > 2 * (r as i128).abs()
}

/// `1/|μ+λ| + 1/|2λ| + 1/|μ−λ| ≥ 1` with `|μ±λ| ≥ 2`.
pub fn fig8_system_holds(s: Slope) -> bool {
    let (mu, l) = (s.mu, s.lambda);
    if (mu - l).abs() < 2 || (mu + l).abs() < 2 {
        return false;
    }
    match reciprocal_sum(&[(1, mu + l), (1, 2 * l), (1, mu - l)]) {
        Some(v) => v >= BigRational::one(),
        None => true,
    }
}

/// Odd coprime slopes in the window satisfying the figure-eight exception system.
pub fn fig8_exception_scan(window: i64) -> BTreeSet<Slope> {
    Slope::window(window)
        .into_par_iter()
        .filter(|s| s.mu % 2 != 0 && s.lambda % 2 != 0 && fig8_system_holds(*s))
        .collect()
}

/// `1/|6μ−λ| + 1/|6μ+λ| < 1`.
pub fn thm12_first(s: Slope) -> HypothesisOutcome {
    below(
        &[(1, 6 * s.mu - s.lambda), (1, 6 * s.mu + s.lambda)],
        BigRational::one(),
    )
}

/// `1/|9μ+λ| + 1/|2λ| + 1/|9μ−λ| < 1`.
pub fn thm12_second(s: Slope) -> HypothesisOutcome {
    below(
        &[(1, 9 * s.mu + s.lambda), (1, 2 * s.lambda), (1, 9 * s.mu - s.lambda)],
        BigRational::one(),
    )
}

/// Slopes in the window failing both inequalities for `(D_xD_y)^18`.
pub fn thm12_exception_scan(window: i64) -> BTreeSet<Slope> {
    Slope::window(window)
        .into_par_iter()
        .filter(|&s| !thm12_first(s).holds && !thm12_second(s).holds)
        .collect()
}

/// The first `count` slopes with `λ > 0` on `(μ+2λ)² − 2λ² = 1`.
pub fn pell_family(count: usize) -> Vec<Slope> {
    let (mut x, mut y) = (3i64, 2i64);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        out.push(Slope::new(x - 2 * y, y).expect("Pell solutions are coprime"));
        let (nx, ny) = (3 * x + 4 * y, 2 * x + 3 * y);
        x = nx;
        y = ny;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use words::*;

    fn s(mu: i64, l: i64) -> Slope {
        Slope::new(mu, l).unwrap()
    }

    #[test]
    fn slope_validation() {
        assert!(Slope::new(0, 0).is_err());
        assert!(Slope::new(2, 4).is_err());
        assert!(Slope::new(0, 1).is_ok());
        assert!(Slope::new(0, 2).is_err());
    }

    #[test]
    fn boundary_twist_is_conjugation_by_beta() {
        // Dual route: explicit conjugation on the free group.
        assert_eq!(
            isotopy_shift_by_conjugation(&TwistWord::identity(), &boundary_twist(), 3),
            Some(1)
        );
        assert_eq!(isotopy_shift(&TwistWord::identity(), &boundary_twist()).unwrap(), 1);
        assert_eq!(
            isotopy_shift_by_conjugation(&h().pow(2), &minus_one().concat(&h()).pow(2), 3),
            Some(1)
        );
        assert_eq!(isotopy_shift_by_conjugation(&h().pow(3), &i(), 3), Some(1));
    }

    #[test]
    fn builtins_verify() {
        let ts = builtin_transforms();
        assert_eq!(ts.len(), 5);
        for t in &ts {
            t.verify().unwrap_or_else(|e| panic!("{}: {e}", t.name));
        }
        // A wrong shift is caught.
        let mut bad = ts[3].clone();
        bad.slope_map = [[1, 0], [2, 1]];
        assert!(bad.verify().is_err());
    }

    #[test]
    fn framing_examples() {
        let ts = builtin_transforms();
        let neg_h = minus_one().concat(&h());
        let (w, t) = apply_framing(&ts[0], &neg_h, s(3, 5)).unwrap();
        assert_eq!((w, t), (g(), s(3, 2)));
        let (w, t) = apply_framing(&ts[3], &h().pow(3), s(2, 3)).unwrap();
        assert_eq!((w, t), (i(), s(2, 5)));
        let id = FramingTransform::identity();
        assert_eq!(
            apply_framing(&id, &TwistWord::identity(), s(1, 4)).unwrap(),
            (TwistWord::identity(), s(1, 4))
        );
        assert!(apply_framing(&ts[3], &h(), s(1, 1)).is_err());
        // Powers: f = (h^3)^6 -> i^6 with λ + 6μ.
        let (w, t) = apply_framing(&ts[3], &f18(), s(1, 1)).unwrap();
        assert_eq!((w, t), (i().pow(6), s(1, 7)));
    }

    #[test]
    fn framing_round_trip() {
        let t = &builtin_transforms()[1];
        let inv = t.inverse();
        for sl in Slope::window(4) {
            let (w, m) = apply_framing(t, &t.source, sl).unwrap();
            let (w2, back) = apply_framing(&inv, &w, m).unwrap();
            assert_eq!(w2, t.source);
            assert_eq!(back, sl);
        }
    }

    #[test]
    fn non_unimodular_transform_rejected() {
        assert!(FramingTransform::new("bad", h(), h(), [[2, 0], [0, 1]], None).is_err());
    }

    #[test]
    fn hypothesis_examples() {
        let o = hypothesis_check(HypothesisTag::III, 24, s(1, 7));
        assert!(o.holds && !o.degenerate);
        let o = hypothesis_check(HypothesisTag::II, 1, s(1, 1));
        assert!(!o.holds && o.degenerate);
        let o = hypothesis_check(HypothesisTag::III, 1, s(1, 1));
        assert!(!o.holds && !o.degenerate);
        // 2/|5-8| + 1/4 = 11/12 < 1
        assert!(hypothesis_check(HypothesisTag::III, 1, s(5, 4)).holds);
        // Exactly 1 is not < 1: R=1, (μ,λ)=(4,3): 2/|4-6| + ... = 1 + 1/3
        assert!(!hypothesis_check(HypothesisTag::III, 3, s(2, 1)).holds);
        assert!(hypothesis_check(HypothesisTag::Case3b, 1, s(1, 2)).holds);
        assert!(hypothesis_check(HypothesisTag::Case3b, 10, s(1, 5)).holds);
        assert!(!hypothesis_check(HypothesisTag::Case3b, 1, s(1, 1)).holds);
    }

    #[test]
    fn fig8_scan() {
        let expected: BTreeSet<Slope> = [s(3, 1), s(-3, -1), s(-3, 1), s(3, -1)].into();
        assert_eq!(fig8_exception_scan(50), expected);
        assert_eq!(fig8_exception_scan(5), expected);
        assert!(fig8_exception_scan(50).iter().all(|s| s.lambda() % 2 != 0));
    }

    #[test]
    fn thm12_scan_examples() {
        let ex = thm12_exception_scan(20);
        assert!(ex.contains(&s(0, 1)));
        assert!(!ex.contains(&s(1, 6)));
        assert!(thm12_first(s(1, 6)).degenerate);
        assert!(thm12_second(s(1, 6)).holds);
        assert!(ex.iter().all(|s| s.mu() == 0));
    }

    #[test]
    fn pell() {
        let p = pell_family(3);
        assert_eq!(p, vec![s(-1, 2), s(-7, 12), s(-41, 70)]);
        for sl in p {
            let (mu, l) = (sl.mu(), sl.lambda());
            assert_eq!((mu + 2 * l).pow(2) - 2 * l * l, 1);
            // The order of A involves Rμ − 2λ, so for R = 1 the bound
            // collapses on the reflected slopes (−μ, λ).
            let reflected = Slope::new(-mu, l).unwrap();
            assert_eq!(case5_abelian_order(Case5Variant::A, 1, reflected), 1);
            assert!(!case5_order_bound(Case5Variant::A, 1, reflected));
            assert!(!hypothesis_check(HypothesisTag::Case5a, 1, reflected).holds);
            assert_eq!(case5_abelian_order(Case5Variant::A, -1, sl), 1);
        }
        // The smallest one fails the full guard through the slope inequality.
        assert!(!hypothesis_check(HypothesisTag::Case5a, 1, s(-1, 2)).holds);
    }
}
