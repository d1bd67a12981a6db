//! Case dispatch: templates for the `σ_i`, the residual relations they leave,
//! and the registry of cover constructions that realise them.

use std::fmt;
use std::ops::ControlFlow;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::assembly::{assembly_candidates, Case5Candidate};
use super::cyclic::{cut_patterns, cyclic_solution, doubled_cut_rep, CyclicSolution, HorizontalCuts};
use super::group::{coset_action, enumerate, regular_action};
use super::strategy::{solve_shape, QuotientBudget, QuotientStrategy};
use super::witness::{QuotientShape, QuotientWitness};
use crate::cover::{build_rep, CoverRep, CutData};
use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::presentation::{CosetAction, GroupPresentation};
use crate::slope::{hypothesis_check, Case5Variant, HypothesisTag, Slope};
use crate::word::{BundleInvariants, FreeWord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseTag {
    #[serde(rename = "1")]
    C1,
    #[serde(rename = "2a")]
    C2a,
    #[serde(rename = "2b")]
    C2b,
    #[serde(rename = "3a")]
    C3a,
    #[serde(rename = "3b")]
    C3b,
    #[serde(rename = "4a")]
    C4a,
    #[serde(rename = "4b")]
    C4b,
    #[serde(rename = "5a")]
    C5a,
    #[serde(rename = "5b")]
    C5b,
}

impl CaseTag {
    pub const ALL: [CaseTag; 9] = [
        CaseTag::C1,
        CaseTag::C2a,
        CaseTag::C2b,
        CaseTag::C3a,
        CaseTag::C3b,
        CaseTag::C4a,
        CaseTag::C4b,
        CaseTag::C5a,
        CaseTag::C5b,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::C1 => "1",
            CaseTag::C2a => "2a",
            CaseTag::C2b => "2b",
            CaseTag::C3a => "3a",
            CaseTag::C3b => "3b",
            CaseTag::C4a => "4a",
            CaseTag::C4b => "4b",
            CaseTag::C5a => "5a",
            CaseTag::C5b => "5b",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        CaseTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s.trim())
            .ok_or_else(|| {
                Error::Malformed(format!(
                    "unknown case {s:?}; expected one of 1, 2a, 2b, 3a, 3b, 4a, 4b, 5a, 5b"
                ))
            })
    }

    /// Whether the case uses `m` rows.
    pub fn accepts_rows(self, m: usize) -> bool {
        match self {
            CaseTag::C1 => m == 4,
            CaseTag::C2a => m == 5,
            CaseTag::C2b => m >= 9 && m % 2 == 1,
            CaseTag::C3a | CaseTag::C3b => m == 6,
            CaseTag::C4a | CaseTag::C4b => m >= 8 && m.is_multiple_of(2),
            CaseTag::C5a | CaseTag::C5b => m == 7,
        }
    }

    /// The slope hypothesis gating the construction.
    pub fn guard(self) -> HypothesisTag {
        match self {
            CaseTag::C1 => HypothesisTag::III,
            CaseTag::C2a | CaseTag::C2b => HypothesisTag::II,
            CaseTag::C3a => HypothesisTag::Case3a,
            CaseTag::C3b => HypothesisTag::Case3b,
            CaseTag::C4a => HypothesisTag::Case4a,
            CaseTag::C4b => HypothesisTag::Case4b,
            CaseTag::C5a => HypothesisTag::Case5a,
            CaseTag::C5b => HypothesisTag::Case5b,
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which reading of the monodromy supplies `(R, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// `R = Σ r_i`, `n = gcd s_i`.
    Standard,
    /// `R = Σ s_i`, `n = gcd r_i`; the cover is built with `x` and `y` exchanged.
    Swapped,
}

/// A case selected for `(R, n, s)`: the template, what it leaves to solve,
/// and the guard that admitted it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CasePlan {
    pub case: CaseTag,
    pub variant: Variant,
    pub r: i64,
    pub n: i64,
    pub rows: usize,
    /// The slope fed to the construction.
    pub slope: Slope,
    pub guard: HypothesisTag,
    /// `σ_i` as words in the residual generators; for the cyclic cases the
    /// base rows before doubling.
    pub template: Vec<FreeWord>,
    pub residual: GroupPresentation,
    /// Whether conditions I and II hold identically in the free group.
    pub i_ii_identically: bool,
    /// Generator and product orders, when every residual relator is of that form.
    pub shape: Option<QuotientShape>,
    pub cyclic: Option<CyclicSolution>,
}

fn names(count: usize) -> Vec<String> {
    let base = ["a", "b"];
    (0..count)
        .map(|i| {
            if i < 2 {
                base[i].to_string()
            } else {
                format!("c{}", i + 2)
            }
        })
        .collect()
}

fn g(i: i32) -> FreeWord {
    FreeWord::gen(i)
}

fn id() -> FreeWord {
    FreeWord::empty()
}

fn inv(i: i32) -> FreeWord {
    FreeWord::gen(-i)
}

/// `σ_1..σ_m` for the fixed-shape templates, with their generator names.
pub fn template(case: CaseTag, m: usize) -> Result<(Vec<String>, Vec<FreeWord>)> {
    if !case.accepts_rows(m) {
        return Err(Error::Precondition(format!("case {case} does not use {m} rows")));
    }
    let (count, sigma) = match case {
        CaseTag::C1 => (2, vec![g(1), inv(1), g(2), inv(2)]),
        CaseTag::C2a => (2, vec![g(1), id(), inv(1), g(2), inv(2)]),
        CaseTag::C3a => (2, vec![g(1), id(), inv(1), g(2), id(), inv(2)]),
        CaseTag::C2b => {
            let k = (m - 1) / 2;
            let mut s = vec![g(1), inv(1), g(2), id(), inv(2), g(1), inv(1)];
            for i in 4..=k {
                let c = (i - 1) as i32;
                s.push(g(c));
                s.push(inv(c));
            }
            (k - 1, s)
        }
        CaseTag::C4a => {
            let k = m / 2;
            let mut s = vec![g(1), inv(1), g(2), inv(2), g(1), inv(1)];
            for i in 4..=k {
                let c = (i - 1) as i32;
                s.push(g(c));
                s.push(inv(c));
            }
            (k - 1, s)
        }
        CaseTag::C5a => (3, vec![g(1), id(), inv(1), g(2), g(3), inv(3), inv(2)]),
        CaseTag::C5b => (3, vec![g(1), g(2), id(), inv(2), inv(1), g(3), inv(3)]),
        CaseTag::C3b | CaseTag::C4b => {
            return Err(Error::Precondition(format!(
                "case {case} uses cyclic exponents; see cyclic_template"
            )))
        }
    };
    let mut names = names(count);
    if matches!(case, CaseTag::C5a | CaseTag::C5b) {
        names[2] = "c".into();
    }
    Ok((names, sigma))
}

/// `σ_i = a^{e_i}` on the base rows of a cyclic solution.
pub fn cyclic_template(sol: &CyclicSolution) -> Vec<FreeWord> {
    sol.sum_zero_exponents().iter().map(|&e| g(1).pow(e)).collect()
}

fn product(ws: &[FreeWord]) -> FreeWord {
    ws.iter().fold(FreeWord::empty(), |acc, w| &acc * w)
}

fn commutator(u: &FreeWord, v: &FreeWord) -> FreeWord {
    product(&[u.clone(), v.clone(), u.inverse(), v.inverse()])
}

/// The relators of conditions I and II for a template, freely reduced,
/// trivial ones dropped.
pub fn condition_i_ii_relators(sigma: &[FreeWord]) -> Vec<FreeWord> {
    let mut out = Vec::new();
    let mut prefix = FreeWord::empty();
    for s in sigma {
        out.push(commutator(s, &prefix));
        prefix = &prefix * s;
    }
    out.push(prefix);
    out.into_iter()
        .map(|w| w.cyclically_reduced())
        .filter(|w| !w.is_empty())
        .collect()
}

/// The relators of condition III: `(σ_1..σ_i)^{Rμ} (σ_{i+1} σ_i⁻¹)^λ`, indices mod `m`.
pub fn condition_iii_relators(sigma: &[FreeWord], r: i64, s: Slope) -> Result<Vec<FreeWord>> {
    let m = sigma.len();
    let rm = r.checked_mul(s.mu()).ok_or(Error::Overflow)?;
    let mut out = Vec::with_capacity(m);
    let mut prefix = FreeWord::empty();
    for i in 0..m {
        prefix = &prefix * &sigma[i];
        let step = &sigma[(i + 1) % m] * &sigma[i].inverse();
        out.push((&prefix.pow(rm) * &step.pow(s.lambda())).cyclically_reduced());
    }
    Ok(out.into_iter().filter(|w| !w.is_empty()).collect())
}

/// Relators with duplicates up to cyclic rotation and inversion removed.
pub fn dedup_relators(rels: Vec<FreeWord>) -> Vec<FreeWord> {
    let mut out: Vec<FreeWord> = Vec::new();
    for r in rels {
        let r = r.cyclically_reduced();
        if !r.is_empty() && !out.iter().any(|o| o.is_cyclic_variant_of(&r)) {
            out.push(r);
        }
    }
    out
}

/// The generator and two-letter product orders of a presentation, when
/// every relator is a power of a generator or of a product `g_i g_j` of
/// distinct generators (up to rotation and inversion).
pub fn shape_from_relators(p: &GroupPresentation) -> Option<QuotientShape> {
    let k = p.generator_count();
    let mut orders = vec![0u64; k];
    let mut products: Vec<(usize, usize, u64)> = Vec::new();
    for rel in &p.relators {
        let (root, e) = rel.cyclically_reduced().root_power();
        let e = e.unsigned_abs();
        match *root.letters() {
            [x] => {
                let i = (x.unsigned_abs() - 1) as usize;
                orders[i] = orders[i].gcd(&e);
            }
            [x, y] if x.signum() == y.signum() && x.abs() != y.abs() => {
                let (i, j) = ((x.unsigned_abs() - 1) as usize, (y.unsigned_abs() - 1) as usize);
                let key = (i.min(j), i.max(j));
                match products.iter_mut().find(|p| (p.0, p.1) == key) {
                    Some(p) => p.2 = p.2.gcd(&e),
                    None => products.push((key.0, key.1, e)),
                }
            }
            _ => return None,
        }
    }
    if orders.contains(&0) {
        return None;
    }
    QuotientShape::new(p.names.clone(), orders, products).ok()
}

/// Everything a case needs to turn a plan into candidate covers.
pub struct FactoryContext<'a> {
    pub budget: QuotientBudget,
    pub strategies: &'a [Box<dyn QuotientStrategy>],
    /// Largest group enumerated when upgrading a quotient to a free action.
    pub group_cap: usize,
}

/// A cover produced by a case, with what is needed to rebuild it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub rep: CoverRep,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut_data: Option<CutData>,
    /// Horizontal cuts of a doubled cyclic cover.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cuts: Option<HorizontalCuts>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<QuotientWitness>,
}

impl Candidate {
    fn from_cut(rep: CoverRep, data: CutData, witness: Option<QuotientWitness>) -> Self {
        Candidate {
            rep,
            cut_data: Some(data),
            cuts: None,
            witness,
        }
    }
}

/// Receives candidate covers; `Break` stops the case.
pub type CoverSink<'s> = dyn FnMut(Candidate) -> ControlFlow<()> + 's;

/// One construction of the case analysis.
pub trait CoverCase: Send + Sync {
    fn tag(&self) -> CaseTag;

    /// A plan for `m` rows, or the reason the case does not apply.
    fn plan(&self, variant: Variant, r: i64, n: i64, m: usize, s: Slope) -> Result<CasePlan>;

    /// Emits candidate covers in construction orientation (before any swap).
    fn covers(&self, plan: &CasePlan, ctx: &FactoryContext, sink: &mut CoverSink) -> Result<()>;
}

fn check_guard(case: CaseTag, r: i64, s: Slope) -> Result<()> {
    let out = hypothesis_check(case.guard(), r, s);
    if out.holds {
        return Ok(());
    }
    if out.degenerate {
        return Err(Error::Degenerate(format!(
            "case {case}: a denominator of the {:?} guard vanishes at R = {r}, slope {s}",
            case.guard()
        )));
    }
    Err(Error::GuardViolation {
        case: case.as_str().into(),
        reason: format!("{:?} guard fails at R = {r}, slope {s}", case.guard()),
    })
}

fn template_plan(case: CaseTag, variant: Variant, r: i64, n: i64, m: usize, s: Slope) -> Result<CasePlan> {
    if !case.accepts_rows(m) {
        return Err(Error::Precondition(format!("case {case} does not use {m} rows")));
    }
    check_guard(case, r, s)?;
    let (names, sigma) = template(case, m)?;
    let i_ii = condition_i_ii_relators(&sigma);
    let mut rels = i_ii.clone();
    rels.extend(condition_iii_relators(&sigma, r, s)?);
    let residual = GroupPresentation::new(names, dedup_relators(rels))?;
    let shape = shape_from_relators(&residual);
    Ok(CasePlan {
        case,
        variant,
        r,
        n,
        rows: m,
        slope: s,
        guard: case.guard(),
        template: sigma,
        residual,
        i_ii_identically: i_ii.is_empty(),
        shape,
        cyclic: None,
    })
}

/// Finds a quotient of the plan's residual group with every generator
/// and listed product of exactly the required order.
pub fn coxeter_quotient(plan: &CasePlan, degree_cap: usize) -> Result<QuotientWitness> {
    coxeter_quotient_with(
        plan,
        &QuotientBudget {
            degree_cap,
            ..QuotientBudget::default()
        },
        &super::strategy::quotient_strategies(),
    )
}

pub fn coxeter_quotient_with(
    plan: &CasePlan,
    budget: &QuotientBudget,
    strategies: &[Box<dyn QuotientStrategy>],
) -> Result<QuotientWitness> {
    let shape = plan.shape.as_ref().ok_or_else(|| {
        Error::Precondition(format!(
            "case {} leaves relators that are not generator or product orders",
            plan.case
        ))
    })?;
    if shape.orders.iter().any(|&o| o < 2) {
        return Err(Error::Degenerate(format!(
            "case {}: a generator would have order below 2 (orders {:?})",
            plan.case, shape.orders
        )));
    }
    solve_shape(shape, budget, strategies)
}

/// `σ_i` evaluated in a permutation action of the residual group.
pub fn cut_data_from_action(template: &[FreeWord], images: &[Perm]) -> Result<CutData> {
    let act = CosetAction {
        gens: images.to_vec(),
        basepoint: 0,
    };
    let width = images.first().map(Perm::degree).unwrap_or(1);
    CutData::new(width, template.iter().map(|w| act.eval(w)).collect())
}

/// The action of the quotient on cosets of a cyclic subgroup meeting no
/// conjugate of a generator or required product, then the regular action.
pub fn free_upgrades(images: &[Perm], required: &[u64], group_cap: usize) -> Vec<Vec<Perm>> {
    let Some(elems) = enumerate(images, group_cap) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let best = elems
        .iter()
        .filter(|e| !e.is_identity() && required.iter().all(|&o| e.order().gcd(&o) == 1))
        .max_by_key(|e| e.order());
    if let Some(k) = best {
        out.push(coset_action(&elems, images, k));
    }
    out.push(regular_action(&elems, images));
    out
}

fn emit_action(
    template: &[FreeWord],
    images: &[Perm],
    witness: Option<&QuotientWitness>,
    sink: &mut CoverSink,
) -> Result<ControlFlow<()>> {
    let data = cut_data_from_action(template, images)?;
    match build_rep(&data) {
        Ok(rep) => Ok(sink(Candidate::from_cut(rep, data, witness.cloned()))),
        Err(Error::Disconnected { .. }) => Ok(ControlFlow::Continue(())),
        Err(e) => Err(e),
    }
}

fn quotient_covers(plan: &CasePlan, ctx: &FactoryContext, sink: &mut CoverSink) -> Result<()> {
    let w = coxeter_quotient_with(plan, &ctx.budget, ctx.strategies)?;
    if emit_action(&plan.template, &w.images, Some(&w), sink)?.is_break() {
        return Ok(());
    }
    let required: Vec<u64> = w.orders.iter().map(|o| o.required).collect();
    for images in free_upgrades(&w.images, &required, ctx.group_cap) {
        if emit_action(&plan.template, &images, Some(&w), sink)?.is_break() {
            return Ok(());
        }
    }
    Ok(())
}

/// Cases 1, 2a and 3a: two generators and a triangle group.
pub struct TriangleCase(pub CaseTag);

/// Cases 2b and 4a: a chain of generators and a Coxeter-type group.
pub struct CoxeterCase(pub CaseTag);

/// Cases 3b and 4b: powers of one cycle on doubled rows with horizontal cuts.
pub struct CyclicCase(pub CaseTag);

/// Cases 5a and 5b: an abelian factor combined with a triangle group.
pub struct AssemblyCase(pub CaseTag);

impl CoverCase for TriangleCase {
    fn tag(&self) -> CaseTag {
        self.0
    }
    fn plan(&self, variant: Variant, r: i64, n: i64, m: usize, s: Slope) -> Result<CasePlan> {
        template_plan(self.0, variant, r, n, m, s)
    }
    fn covers(&self, plan: &CasePlan, ctx: &FactoryContext, sink: &mut CoverSink) -> Result<()> {
        quotient_covers(plan, ctx, sink)
    }
}

impl CoverCase for CoxeterCase {
    fn tag(&self) -> CaseTag {
        self.0
    }
    fn plan(&self, variant: Variant, r: i64, n: i64, m: usize, s: Slope) -> Result<CasePlan> {
        template_plan(self.0, variant, r, n, m, s)
    }
    fn covers(&self, plan: &CasePlan, ctx: &FactoryContext, sink: &mut CoverSink) -> Result<()> {
        quotient_covers(plan, ctx, sink)
    }
}

impl CoverCase for CyclicCase {
    fn tag(&self) -> CaseTag {
        self.0
    }

    fn plan(&self, variant: Variant, r: i64, n: i64, m: usize, s: Slope) -> Result<CasePlan> {
        let case = self.0;
        if !case.accepts_rows(m) {
            return Err(Error::Precondition(format!("case {case} does not use {m} rows")));
        }
        check_guard(case, r, s)?;
        let k = m / 2;
        let sol = cyclic_solution(k, r, s)?;
        if sol.modulus.unsigned_abs() < s.lambda().unsigned_abs() {
            return Err(Error::GuardViolation {
                case: case.as_str().into(),
                reason: format!("|N| = {} is below |λ| = {}", sol.modulus.abs(), s.lambda().abs()),
            });
        }
        let sigma = cyclic_template(&sol);
        let mut rels = condition_i_ii_relators(&sigma);
        rels.extend(condition_iii_relators(&sigma, r, s)?);
        let residual = GroupPresentation::new(vec!["a".into()], dedup_relators(rels))?;
        Ok(CasePlan {
            case,
            variant,
            r,
            n,
            rows: m,
            slope: s,
            guard: case.guard(),
            template: sigma,
            shape: shape_from_relators(&residual),
            residual,
            i_ii_identically: true,
            cyclic: Some(sol),
        })
    }

    fn covers(&self, plan: &CasePlan, _ctx: &FactoryContext, sink: &mut CoverSink) -> Result<()> {
        let sol = plan
            .cyclic
            .as_ref()
            .ok_or_else(|| Error::Precondition("cyclic plan without a solution".into()))?;
        for cuts in cut_patterns(plan.slope.lambda(), sol.width()) {
            match doubled_cut_rep(sol, &cuts) {
                Ok(rep) => {
                    let c = Candidate {
                        rep,
                        cut_data: None,
                        cuts: Some(cuts),
                        witness: None,
                    };
                    if sink(c).is_break() {
                        return Ok(());
                    }
                }
                Err(Error::Disconnected { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        Ok(())
    }
}

impl AssemblyCase {
    fn variant(&self) -> Case5Variant {
        if self.0 == CaseTag::C5a {
            Case5Variant::A
        } else {
            Case5Variant::B
        }
    }
}

impl CoverCase for AssemblyCase {
    fn tag(&self) -> CaseTag {
        self.0
    }

    fn plan(&self, variant: Variant, r: i64, n: i64, m: usize, s: Slope) -> Result<CasePlan> {
        template_plan(self.0, variant, r, n, m, s)
    }

    fn covers(&self, plan: &CasePlan, ctx: &FactoryContext, sink: &mut CoverSink) -> Result<()> {
        let mut candidates: Vec<Case5Candidate> = Vec::new();
        match assembly_candidates(self.variant(), plan.r, plan.slope, ctx) {
            Ok(c) => candidates = c,
            Err(Error::SearchExhausted { .. }) => {}
            Err(e) => return Err(e),
        }
        for c in candidates {
            match build_rep(&c.data) {
                Ok(rep) => {
                    if sink(Candidate::from_cut(rep, c.data, c.triangle)).is_break() {
                        return Ok(());
                    }
                }
                Err(Error::Disconnected { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        // Best effort beyond the assembly: small transitive quotients of the residual group.
        let limits = crate::homology::lowindex::LowIndexLimits {
            max_index: ctx.budget.degree_cap.min(12),
            node_budget: ctx.budget.node_budget,
            exact_index: false,
            max_results: 64,
        };
        let found = crate::homology::lowindex::low_index_search(&plan.residual, &limits, &mut |_| true);
        for a in found.actions {
            if emit_action(&plan.template, &a.gens, None, sink)?.is_break() {
                return Ok(());
            }
        }
        Ok(())
    }
}

/// Every construction, in case order.
pub fn cover_cases() -> Vec<Box<dyn CoverCase>> {
    CaseTag::ALL
        .into_iter()
        .map(|t| -> Box<dyn CoverCase> {
            match t {
                CaseTag::C1 | CaseTag::C2a | CaseTag::C3a => Box::new(TriangleCase(t)),
                CaseTag::C2b | CaseTag::C4a => Box::new(CoxeterCase(t)),
                CaseTag::C3b | CaseTag::C4b => Box::new(CyclicCase(t)),
                CaseTag::C5a | CaseTag::C5b => Box::new(AssemblyCase(t)),
            }
        })
        .collect()
}

/// The registered cases whose tags appear in `names`, in case order.
pub fn select_cases(names: &[String]) -> Result<Vec<Box<dyn CoverCase>>> {
    let tags = names.iter().map(|n| CaseTag::parse(n)).collect::<Result<Vec<_>>>()?;
    Ok(cover_cases().into_iter().filter(|c| tags.contains(&c.tag())).collect())
}

/// Why a case did not produce a plan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanFailure {
    pub variant: Variant,
    pub rows: Option<usize>,
    pub case: Option<CaseTag>,
    pub slope: Slope,
    pub reason: String,
    pub degenerate: bool,
}

impl fmt::Display for PlanFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = match self.variant {
            Variant::Standard => "standard",
            Variant::Swapped => "swapped",
        };
        match (self.case, self.rows) {
            (Some(c), Some(m)) => write!(f, "{v}, m = {m}, case {c}: {}", self.reason),
            _ => write!(f, "{v}: {}", self.reason),
        }
    }
}

/// All plans, in order: standard then swapped invariants, rows ascending,
/// cases in registry order; along with every case that was refused.
pub fn plan_all(inv: &BundleInvariants, s: Slope, cases: &[Box<dyn CoverCase>]) -> (Vec<CasePlan>, Vec<PlanFailure>) {
    let mut plans = Vec::new();
    let mut failures = Vec::new();
    let variants = [
        (Variant::Standard, inv.standard, vec![s]),
        (Variant::Swapped, inv.swapped, vec![s, s.neg()]),
    ];
    for (variant, pair, slopes) in variants {
        let Some(pair) = pair else {
            failures.push(PlanFailure {
                variant,
                rows: None,
                case: None,
                slope: s,
                reason: "invariants unavailable".into(),
                degenerate: true,
            });
            continue;
        };
        let n = pair.n_gcd.unsigned_abs() as usize;
        let divisors: Vec<usize> = (4..=n).filter(|m| n.is_multiple_of(*m)).collect();
        if divisors.is_empty() {
            failures.push(PlanFailure {
                variant,
                rows: None,
                case: None,
                slope: s,
                reason: format!("n = {n} has no divisor m ≥ 4"),
                degenerate: false,
            });
            continue;
        }
        for &slope in &slopes {
            for &m in &divisors {
                for c in cases.iter().filter(|c| c.tag().accepts_rows(m)) {
                    match c.plan(variant, pair.r_sum, pair.n_gcd, m, slope) {
                        Ok(p) => {
                            if !plans.contains(&p) {
                                plans.push(p);
                            }
                        }
                        Err(e) => failures.push(PlanFailure {
                            variant,
                            rows: Some(m),
                            case: Some(c.tag()),
                            slope,
                            degenerate: matches!(e, Error::Degenerate(_) | Error::Overflow),
                            reason: e.to_string(),
                        }),
                    }
                }
            }
        }
    }
    (plans, failures)
}

/// The first applicable plan, or a refusal listing every failed case.
pub fn plan_cover(inv: &BundleInvariants, s: Slope) -> Result<CasePlan> {
    let (plans, failures) = plan_all(inv, s, &cover_cases());
    plans
        .into_iter()
        .next()
        .ok_or_else(|| Error::NoCaseApplies(failures.iter().map(|f| f.to_string()).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{check_condition_i_ii, check_condition_iii};
    use crate::word::RnPair;

    fn sl(m: i64, l: i64) -> Slope {
        Slope::new(m, l).unwrap()
    }

    fn inv(r: i64, n: i64) -> BundleInvariants {
        BundleInvariants {
            standard: Some(RnPair { r_sum: r, n_gcd: n }),
            swapped: None,
        }
    }

    /// The relator list the text states for each template, as `(word, exponent)`.
    fn has_power(p: &GroupPresentation, w: &[i32], e: i64) -> bool {
        let target = FreeWord::new(w.iter().copied()).pow(e);
        p.relators.iter().any(|r| r.is_cyclic_variant_of(&target))
    }

    #[test]
    fn case_one_relations() {
        // R = 3, slope (1, 5): Rμ − 2λ = −7, λ = 5.
        let p = plan_cover(&inv(3, 4), sl(1, 5)).unwrap();
        assert_eq!(p.case, CaseTag::C1);
        assert!(p.i_ii_identically);
        assert!(has_power(&p.residual, &[1], 7));
        assert!(has_power(&p.residual, &[2], 7));
        assert!(has_power(&p.residual, &[1, 2], 5));
        assert_eq!(p.residual.relators.len(), 3);
        assert_eq!(p.shape.unwrap().as_triangle(), Some((7, 7, 5)));
    }

    #[test]
    fn case_two_a_template() {
        let p = plan_cover(&inv(3, 5), sl(1, 5)).unwrap();
        assert_eq!(p.case, CaseTag::C2a);
        assert!(p.template[1].is_empty());
        assert_eq!(p.template[2], FreeWord::gen(-1));
        assert_eq!(p.template[4], FreeWord::gen(-2));
        // a: |Rμ−λ| = 2, b: |Rμ−2λ| = 7.
        assert_eq!(p.shape.unwrap().as_triangle(), Some((2, 7, 5)));
    }

    #[test]
    fn chain_shapes() {
        // m = 9: orders a: |Rμ−2λ|, b: |Rμ−λ|, c4: |Rμ−2λ|; products (a,b), (c4,a) of order λ.
        let (r, s) = (1, sl(1, 4));
        let p = CoxeterCase(CaseTag::C2b).plan(Variant::Standard, r, 9, 9, s).unwrap();
        let shape = p.shape.unwrap();
        assert_eq!(shape.orders, vec![7, 3, 7]);
        let mut prods = shape.products.clone();
        prods.sort();
        assert_eq!(prods, vec![(0, 1, 4), (0, 2, 4)]);
        // m = 10: a, b, c4, c5 all of order |Rμ−2λ|, in a square of products.
        let p = CoxeterCase(CaseTag::C4a).plan(Variant::Standard, r, 10, 10, s).unwrap();
        let shape = p.shape.unwrap();
        assert_eq!(shape.orders, vec![7; 4]);
        let mut prods = shape.products.clone();
        prods.sort();
        assert_eq!(prods, vec![(0, 1, 4), (0, 2, 4), (0, 3, 4), (2, 3, 4)]);
    }

    #[test]
    fn refusals_are_listed() {
        match plan_cover(&inv(1, 1), sl(1, 5)) {
            Err(Error::NoCaseApplies(r)) => assert!(r[0].contains("no divisor")),
            other => panic!("{other:?}"),
        }
        match plan_cover(&inv(1, 4), sl(1, 1)) {
            Err(Error::NoCaseApplies(r)) => assert!(r.iter().any(|x| x.contains("case 1"))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn quotient_covers_satisfy_conditions() {
        let p = plan_cover(&inv(3, 4), sl(1, 5)).unwrap();
        let w = coxeter_quotient(&p, 64).unwrap();
        let c = cut_data_from_action(&p.template, &w.images).unwrap();
        assert_eq!(check_condition_i_ii(&c), (true, true));
        assert!(check_condition_iii(&c, 3, sl(1, 5)));
    }

    #[test]
    fn case_five_templates_leave_a_commutator() {
        let p = AssemblyCase(CaseTag::C5a)
            .plan(Variant::Standard, 1, 7, 7, sl(1, 5))
            .unwrap();
        assert!(!p.i_ii_identically);
        assert!(p.shape.is_none());
        assert!(has_power(&p.residual, &[2, 3, -2, -3], 1) || has_power(&p.residual, &[3, 2, -3, -2], 1));
    }

    #[test]
    fn case_names_round_trip() {
        for t in CaseTag::ALL {
            assert_eq!(CaseTag::parse(t.as_str()).unwrap(), t);
        }
        assert!(CaseTag::parse("6").is_err());
        assert_eq!(select_cases(&["3b".into(), "1".into()]).unwrap().len(), 2);
    }
}
