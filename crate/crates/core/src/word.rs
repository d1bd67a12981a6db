//! Free words, Dehn-twist monodromy words and their SL(2,Z) shadows.
//!
//! Conventions used throughout the crate:
//!
//! * `x`, `y` are generators 1 and 2 of the fiber group; letters are signed
//!   1-based generator indices.
//! * `D_x(x) = x`, `D_x(y) = yx`, `D_y(x) = yx`, `D_y(y) = y`.
//! * A word `b1 b2 .. bw` acts as the composite `b1 ∘ b2 ∘ .. ∘ bw`, so its
//!   abelianization is the left-to-right product of the block matrices
//!   (`D_x -> R`, `D_y -> L`), column `i` being the image of generator `i`.
//! * The boundary loop is `β = y x⁻¹ y⁻¹ x`, which every twist word fixes
//!   letter for letter. This is what lets the suspension loop `t` serve as
//!   the meridian of the boundary torus.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const X: i32 = 1;
pub const Y: i32 = 2;
pub const T: i32 = 3;

/// A freely reduced word; letters are signed 1-based generator indices.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FreeWord(Vec<i32>);

impl FreeWord {
    pub fn empty() -> Self {
        FreeWord(Vec::new())
    }

    pub fn gen(g: i32) -> Self {
        assert!(g != 0, "generator indices are 1-based");
        FreeWord(vec![g])
    }

    /// Reduces the given letters.
    pub fn new(letters: impl IntoIterator<Item = i32>) -> Self {
        let mut w = FreeWord::empty();
        for l in letters {
            w.push(l);
        }
        w
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Appends a letter, cancelling against the last one if inverse.
    pub fn push(&mut self, l: i32) {
        debug_assert!(l != 0);
        if self.0.last() == Some(&-l) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
    }

    pub fn inverse(&self) -> Self {
        FreeWord(self.0.iter().rev().map(|l| -l).collect())
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut out = FreeWord::empty();
        for _ in 0..e.unsigned_abs() {
            out = &out * &base;
        }
        out
    }

    /// Substitutes `images[g-1]` for each generator `g`.
    pub fn substitute(&self, images: &[FreeWord]) -> FreeWord {
        let mut out = FreeWord::empty();
        for &l in &self.0 {
            let img = &images[(l.unsigned_abs() - 1) as usize];
            if l > 0 {
                for &m in &img.0 {
                    out.push(m);
                }
            } else {
                for &m in img.0.iter().rev() {
                    out.push(-m);
                }
            }
        }
        out
    }

    /// Exponent-sum vector over `rank` generators.
    pub fn abelianize(&self, rank: usize) -> Vec<i64> {
        let mut v = vec![0i64; rank];
        for &l in &self.0 {
            v[(l.unsigned_abs() - 1) as usize] += l.signum() as i64;
        }
        v
    }

    /// Cyclically reduced form: strips matching inverse letters from both ends.
    pub fn cyclically_reduced(&self) -> FreeWord {
        let mut s = 0;
        let mut e = self.0.len();
        while e >= s + 2 && self.0[s] == -self.0[e - 1] {
            s += 1;
            e -= 1;
        }
        FreeWord(self.0[s..e].to_vec())
    }

    /// True if `other` is a cyclic rotation of `self` or of its inverse.
    pub fn is_cyclic_variant_of(&self, other: &FreeWord) -> bool {
        let a = self.cyclically_reduced();
        let b = other.cyclically_reduced();
        if a.len() != b.len() {
            return false;
        }
        if a.is_empty() {
            return true;
        }
        let rotations =
            |w: &FreeWord, v: &FreeWord| (0..w.len()).any(|r| w.0[r..].iter().chain(&w.0[..r]).eq(v.0.iter()));
        rotations(&a, &b) || rotations(&a, &b.inverse())
    }

    /// Writes `self` as `root^k` with `root` primitive, if `self` is cyclically
    /// reduced; otherwise returns `(self, 1)`.
    pub fn root_power(&self) -> (FreeWord, i64) {
        let n = self.len();
        if n == 0 {
            return (FreeWord::empty(), 0);
        }
        for d in 1..=n {
            if n.is_multiple_of(d) && (d..n).all(|i| self.0[i] == self.0[i - d]) {
                return (FreeWord(self.0[..d].to_vec()), (n / d) as i64);
            }
        }
        unreachable!()
    }

    pub fn display_with(&self, names: &[&str]) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        let mut s = String::new();
        for &l in &self.0 {
            let g = (l.unsigned_abs() - 1) as usize;
            match names.get(g) {
                Some(n) => s.push_str(n),
                None => s.push_str(&format!("g{}", g + 1)),
            }
            if l < 0 {
                s.push_str("⁻¹");
            }
        }
        s
    }
}

impl Mul for &FreeWord {
    type Output = FreeWord;
    fn mul(self, rhs: &FreeWord) -> FreeWord {
        let mut out = self.clone();
        for &l in &rhs.0 {
            out.push(l);
        }
        out
    }
}

impl fmt::Debug for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&["x", "y", "t"]))
    }
}

/// The boundary loop `β = y x⁻¹ y⁻¹ x`.
pub fn boundary_word() -> FreeWord {
    FreeWord::new([Y, -X, -Y, X])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TwistGen {
    X,
    Y,
}

impl TwistGen {
    fn name(self) -> &'static str {
        match self {
            TwistGen::X => "Dx",
            TwistGen::Y => "Dy",
        }
    }
}

/// A monodromy written as blocks `D_g^e`, composed left to right.
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct TwistWord {
    blocks: Vec<(TwistGen, i64)>,
}

impl TwistWord {
    /// Normalizes: drops zero exponents and merges adjacent equal generators.
    pub fn new(blocks: impl IntoIterator<Item = (TwistGen, i64)>) -> Self {
        let mut out: Vec<(TwistGen, i64)> = Vec::new();
        for (g, e) in blocks {
            if e == 0 {
                continue;
            }
            match out.last_mut() {
                Some((h, f)) if *h == g => {
                    *f += e;
                    if *f == 0 {
                        out.pop();
                    }
                }
                _ => out.push((g, e)),
            }
        }
        TwistWord { blocks: out }
    }

    pub fn identity() -> Self {
        TwistWord::default()
    }

    pub fn blocks(&self) -> &[(TwistGen, i64)] {
        &self.blocks
    }

    /// Number of blocks after normalization.
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn concat(&self, other: &TwistWord) -> TwistWord {
        TwistWord::new(self.blocks.iter().chain(&other.blocks).copied())
    }

    pub fn inverse(&self) -> TwistWord {
        TwistWord::new(self.blocks.iter().rev().map(|&(g, e)| (g, -e)))
    }

    pub fn pow(&self, k: i64) -> TwistWord {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = TwistWord::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// Conjugate `c self c⁻¹`.
    pub fn conjugate(&self, c: &TwistWord) -> TwistWord {
        c.concat(self).concat(&c.inverse())
    }

    /// Parses `Dx`, `Dy`, `Dx^-3`, and parenthesised groups `(Dx Dy)^18`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Parser {
            src: text.as_bytes(),
            pos: 0,
        };
        let blocks = p.sequence(0)?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(TwistWord::new(blocks))
    }
}

impl fmt::Debug for TwistWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TwistWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.blocks.is_empty() {
            return write!(f, "id");
        }
        for (k, (g, e)) in self.blocks.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            if *e == 1 {
                write!(f, "{}", g.name())?;
            } else {
                write!(f, "{}^{}", g.name(), e)?;
            }
        }
        Ok(())
    }
}

impl TryFrom<String> for TwistWord {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        TwistWord::parse(&s)
    }
}

impl From<TwistWord> for String {
    fn from(w: TwistWord) -> String {
        if w.blocks.is_empty() {
            String::new()
        } else {
            w.to_string()
        }
    }
}

impl std::str::FromStr for TwistWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        TwistWord::parse(s)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn sequence(&mut self, depth: usize) -> Result<Vec<(TwistGen, i64)>> {
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                None => break,
                Some(b')') if depth > 0 => break,
                Some(b'(') => {
                    self.pos += 1;
                    let inner = self.sequence(depth + 1)?;
                    self.skip_ws();
                    if self.peek() != Some(b')') {
                        return Err(self.err("expected ')'"));
                    }
                    self.pos += 1;
                    let e = self.exponent()?.unwrap_or(1);
                    let word = TwistWord::new(inner).pow(e);
                    out.extend(word.blocks);
                }
                Some(b'D') => {
                    let start = self.pos;
                    self.pos += 1;
                    let g = match self.peek() {
                        Some(b'x') => TwistGen::X,
                        Some(b'y') => TwistGen::Y,
                        _ => return Err(self.err("expected 'x' or 'y' after 'D'")),
                    };
                    self.pos += 1;
                    let e = match self.exponent()? {
                        Some(0) => return Err(Error::ZeroExponent { pos: start }),
                        Some(e) => e,
                        None => 1,
                    };
                    out.push((g, e));
                }
                Some(_) => return Err(self.err("expected 'Dx', 'Dy' or '('")),
            }
        }
        Ok(out)
    }

    fn exponent(&mut self) -> Result<Option<i64>> {
        if self.peek() != Some(b'^') {
            return Ok(None);
        }
        let caret = self.pos;
        self.pos += 1;
        let start = self.pos;
        if matches!(self.peek(), Some(b'-') | Some(b'+')) {
            self.pos += 1;
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let e: i64 = text.parse().map_err(|_| Error::Syntax {
            pos: start,
            msg: "expected integer exponent".into(),
        })?;
        if e == 0 {
            return Err(Error::ZeroExponent { pos: caret });
        }
        Ok(Some(e))
    }
}

/// An endomorphism of the free group on `x, y`, stored as the images of the generators.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct TwistEndo {
    pub x: FreeWord,
    pub y: FreeWord,
}

impl TwistEndo {
    pub fn identity() -> Self {
        TwistEndo {
            x: FreeWord::gen(X),
            y: FreeWord::gen(Y),
        }
    }

    /// `D_g^e` as an endomorphism.
    pub fn block(g: TwistGen, e: i64) -> Self {
        match g {
            TwistGen::X => TwistEndo {
                x: FreeWord::gen(X),
                y: &FreeWord::gen(Y) * &FreeWord::gen(X).pow(e),
            },
            TwistGen::Y => TwistEndo {
                x: &FreeWord::gen(Y).pow(e) * &FreeWord::gen(X),
                y: FreeWord::gen(Y),
            },
        }
    }

    pub fn images(&self) -> [&FreeWord; 2] {
        [&self.x, &self.y]
    }

    pub fn apply(&self, w: &FreeWord) -> FreeWord {
        w.substitute(&[self.x.clone(), self.y.clone()])
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &TwistEndo) -> TwistEndo {
        TwistEndo {
            x: self.apply(&inner.x),
            y: self.apply(&inner.y),
        }
    }

    /// Column `i` holds the exponent sums of the image of generator `i`.
    pub fn abelianization(&self) -> [[i64; 2]; 2] {
        let cx = self.x.abelianize(2);
        let cy = self.y.abelianize(2);
        [[cx[0], cy[0]], [cx[1], cy[1]]]
    }

    /// Automorphism test on the abelianization: determinant ±1.
    pub fn is_invertible_on_homology(&self) -> bool {
        let m = self.abelianization();
        (m[0][0] * m[1][1] - m[0][1] * m[1][0]).abs() == 1
    }
}

/// The composite endomorphism of a twist word.
pub fn twist_endo(word: &TwistWord) -> TwistEndo {
    let mut cur = TwistEndo::identity();
    for &(g, e) in word.blocks().iter().rev() {
        cur = TwistEndo::block(g, e).compose(&cur);
    }
    cur
}

/// A 2x2 integer matrix of determinant 1 (determinant −1 allowed only for
/// conjugators, see [`sl2_conjugacy_witness_check`]).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SL2Matrix {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl SL2Matrix {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        SL2Matrix {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
        }
    }

    pub fn identity() -> Self {
        SL2Matrix::new(1, 0, 0, 1)
    }

    /// `R = [[1,1],[0,1]]`, the image of `D_x`.
    pub fn r() -> Self {
        SL2Matrix::new(1, 1, 0, 1)
    }

    /// `L = [[1,0],[1,1]]`, the image of `D_y`.
    pub fn l() -> Self {
        SL2Matrix::new(1, 0, 1, 1)
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn neg(&self) -> Self {
        SL2Matrix {
            a: -&self.a,
            b: -&self.b,
            c: -&self.c,
            d: -&self.d,
        }
    }

    /// Inverse of a unimodular matrix (determinant ±1).
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if !det.abs().is_one() {
            return None;
        }
        Some(SL2Matrix {
            a: &self.d * &det,
            b: -&self.b * &det,
            c: -&self.c * &det,
            d: &self.a * &det,
        })
    }

    pub fn pow(&self, e: i64) -> Option<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut out = SL2Matrix::identity();
        for _ in 0..e.unsigned_abs() {
            out = &out * &base;
        }
        Some(out)
    }

    pub fn row_major(&self) -> [BigInt; 4] {
        [self.a.clone(), self.b.clone(), self.c.clone(), self.d.clone()]
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }
}

impl Mul for &SL2Matrix {
    type Output = SL2Matrix;
    fn mul(self, o: &SL2Matrix) -> SL2Matrix {
        SL2Matrix {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }
}

impl fmt::Display for SL2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

// Row-major JSON array; entries beyond i64 are written as decimal strings.
impl Serialize for SL2Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::json::BigIntSeq(&self.row_major()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SL2Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = crate::json::deserialize_bigints(d)?;
        if v.len() != 4 {
            return Err(serde::de::Error::custom("expected four entries"));
        }
        let [a, b, c, dd]: [BigInt; 4] = v.try_into().unwrap();
        Ok(SL2Matrix { a, b, c, d: dd })
    }
}

/// Product of `R^{r_i} L^{s_i}` in word order.
pub fn monodromy_matrix(word: &TwistWord) -> SL2Matrix {
    word.blocks().iter().fold(SL2Matrix::identity(), |acc, &(g, e)| {
        let base = match g {
            TwistGen::X => SL2Matrix::r(),
            TwistGen::Y => SL2Matrix::l(),
        };
        &acc * &base.pow(e).expect("R and L are unimodular")
    })
}

/// `true` iff `C A C⁻¹ = B` exactly. `C` must have determinant ±1.
pub fn sl2_conjugacy_witness_check(a: &SL2Matrix, b: &SL2Matrix, c: &SL2Matrix) -> bool {
    match c.inverse() {
        Some(ci) => &(c * a) * &ci == *b,
        None => false,
    }
}

/// One variant of the `(R, n)` pair read off the alternating block form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RnPair {
    /// Sum of the exponents of the summed generator.
    pub r_sum: i64,
    /// Gcd of the exponents of the other generator; always positive.
    pub n_gcd: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleInvariants {
    /// `R = Σ r_i`, `n = gcd s_i`.
    pub standard: Option<RnPair>,
    /// `R = Σ s_i`, `n = gcd r_i`.
    pub swapped: Option<RnPair>,
}

impl BundleInvariants {
    pub fn standard(&self) -> Result<RnPair> {
        self.standard
            .ok_or_else(|| Error::VariantUnavailable("standard: every D_y exponent is zero".into()))
    }

    pub fn swapped(&self) -> Result<RnPair> {
        self.swapped
            .ok_or_else(|| Error::VariantUnavailable("swapped: every D_x exponent is zero".into()))
    }
}

/// `R` and `n` for both the standard and the swapped reading of the word.
pub fn bundle_invariants(word: &TwistWord) -> Result<BundleInvariants> {
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for &(g, e) in word.blocks() {
        match g {
            TwistGen::X => xs.push(e),
            TwistGen::Y => ys.push(e),
        }
    }
    let pair = |summed: &[i64], gcd_of: &[i64]| {
        let n = gcd_of.iter().fold(0i64, |g, &e| g.gcd(&e));
        (n != 0).then(|| RnPair {
            r_sum: summed.iter().sum(),
            n_gcd: n,
        })
    };
    let inv = BundleInvariants {
        standard: pair(&xs, &ys),
        swapped: pair(&ys, &xs),
    };
    if inv.standard.is_none() && inv.swapped.is_none() {
        return Err(Error::VariantUnavailable(
            "both variants: the word is the identity".into(),
        ));
    }
    Ok(inv)
}

/// Free-group conjugator test for fixed words: finds `k` with
/// `target(g) = β^{-k} source(g) β^{k}` for `g ∈ {x, y}`, searching `|k| ≤ bound`.
pub fn boundary_twist_shift(source: &TwistEndo, target: &TwistEndo, bound: i64) -> Option<i64> {
    let beta = boundary_word();
    (0..=bound)
        .flat_map(|k| if k == 0 { vec![0] } else { vec![k, -k] })
        .find(|&k| {
            let c = beta.pow(-k);
            let ci = beta.pow(k);
            let conj = |w: &FreeWord| &(&c * w) * &ci;
            conj(&source.x) == target.x && conj(&source.y) == target.y
        })
}
