//! One-slope certification, windowed scans, and offline re-verification of
//! the certificates they produce.

use std::fmt;
use std::ops::ControlFlow;
use std::time::Instant;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cover::{
    build_rep, check_condition_i_ii, check_condition_iii, find_intertwiners_for_word, surgery_lifts, CoverRep, CutData,
    Intertwiner,
};
use crate::error::{Error, Result};
use crate::homology::fiber::{b1_filled_bound, b1_filled_cover, filled_presentation, wang_b1, HomologyCertificate};
use crate::homology::lowindex::{low_index_search, LowIndexLimits, LowIndexResult};
use crate::homology::reidemeister_schreier;
use crate::homology::snf::cokernel;
use crate::perm::Perm;
use crate::presentation::{CosetAction, GroupPresentation};
use crate::quotient::cases::{plan_all, select_cases, Candidate, CasePlan, FactoryContext, Variant};
use crate::quotient::cyclic::doubled_cut_rep;
use crate::quotient::strategy::{quotient_strategies, select_strategies, QuotientBudget};
use crate::quotient::witness::QuotientWitness;
use crate::slope::{apply_framing, builtin_transforms, FramingTransform, Slope};
use crate::word::{bundle_invariants, TwistWord};

pub const CERTIFICATE_VERSION: &str = "fibercover/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Certified,
    HypothesisFails,
    SearchExhausted,
    Degenerate,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Certified => "certified",
            Status::HypothesisFails => "hypothesis-fails",
            Status::SearchExhausted => "search-exhausted",
            Status::Degenerate => "degenerate",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Search limits and selections; recorded in every certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CertifyConfig {
    /// Largest quotient permutation degree.
    pub degree_cap: usize,
    /// Largest index for the low-index fallback on the filled group; 0 disables it.
    pub index_cap: usize,
    pub node_budget: u64,
    /// Largest finite group enumerated when upgrading a quotient action.
    pub group_cap: usize,
    /// Covers with more sheets are skipped.
    pub max_cover_degree: usize,
    /// Lifts of the monodromy tried per cover.
    pub max_lifts: usize,
    /// Case tags to try; empty means all.
    pub cases: Vec<String>,
    /// Quotient strategies to use; empty means all.
    pub quotient_strategies: Vec<String>,
    /// Whether to retry through the built-in framing transforms.
    pub framing: bool,
    /// Covers larger than this skip the cochain cross-check.
    pub wang_limit: usize,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            degree_cap: 64,
            index_cap: 0,
            node_budget: 200_000,
            group_cap: 2_000,
            max_cover_degree: 1_500,
            max_lifts: 4,
            cases: Vec::new(),
            quotient_strategies: Vec::new(),
            framing: true,
            wang_limit: 400,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub version: String,
    pub word: String,
    pub slope: Slope,
    pub status: Status,
    /// Case tag, `base` for the manifold itself, or `low-index`.
    pub case: Option<String>,
    pub variant: Option<Variant>,
    /// Framing transform that produced the certified monodromy and slope.
    pub transform: Option<String>,
    pub certified_word: Option<String>,
    pub certified_slope: Option<Slope>,
    pub plan: Option<CasePlan>,
    pub degree: Option<usize>,
    pub b1: Option<usize>,
    #[serde(with = "crate::json::opt_bigint_vec", default)]
    pub torsion: Option<Vec<BigInt>>,
    /// `b₁` recomputed from the fiber/vertical cochain split.
    pub wang_b1: Option<usize>,
    pub homology: Option<HomologyCertificate>,
    pub quotient: Option<QuotientWitness>,
    pub cut_data: Option<CutData>,
    pub cuts: Option<Vec<(usize, usize)>>,
    pub cover: Option<CoverRep>,
    pub tau: Option<Perm>,
    /// Action of the filled group, for low-index certificates.
    pub action: Option<CosetAction>,
    pub presentation_hash: Option<String>,
    /// Why each attempt stopped.
    pub notes: Vec<String>,
    pub timing_ms: u64,
    pub config: CertifyConfig,
}

impl Certificate {
    fn blank(word: &str, s: Slope, config: &CertifyConfig) -> Self {
        Certificate {
            version: CERTIFICATE_VERSION.into(),
            word: word.into(),
            slope: s,
            status: Status::HypothesisFails,
            case: None,
            variant: None,
            transform: None,
            certified_word: None,
            certified_slope: None,
            plan: None,
            degree: None,
            b1: None,
            torsion: None,
            wang_b1: None,
            homology: None,
            quotient: None,
            cut_data: None,
            cuts: None,
            cover: None,
            tau: None,
            action: None,
            presentation_hash: None,
            notes: Vec::new(),
            timing_ms: 0,
            config: config.clone(),
        }
    }

    pub const CSV_HEADER: [&'static str; 7] = ["word", "mu", "lambda", "status", "case", "degree", "b1"];

    pub fn csv_record(&self) -> [String; 7] {
        let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        [
            self.word.clone(),
            self.slope.mu().to_string(),
            self.slope.lambda().to_string(),
            self.status.to_string(),
            self.case.clone().unwrap_or_default(),
            opt(self.degree),
            opt(self.b1),
        ]
    }
}

/// SHA-256 of the canonical JSON of a presentation.
pub fn presentation_hash(p: &GroupPresentation) -> String {
    let json = serde_json::to_vec(p).expect("presentations serialize");
    hex::encode(Sha256::digest(json))
}

/// The identity, each built-in transform, and each inverse.
fn transforms(config: &CertifyConfig) -> Vec<FramingTransform> {
    let mut out = vec![FramingTransform::identity()];
    if config.framing {
        for t in builtin_transforms() {
            out.push(t.inverse());
            out.push(t);
        }
    }
    out
}

fn find_transform(name: &str) -> Option<FramingTransform> {
    transforms(&CertifyConfig::default())
        .into_iter()
        .find(|t| t.name == name)
}

/// The lifts of `word` to `rep` along which `s` also lifts, in sorted order.
fn surgery_lifts_of(rep: &CoverRep, word: &TwistWord, s: Slope, limit: usize) -> Vec<Intertwiner> {
    find_intertwiners_for_word(rep, word)
        .into_iter()
        .filter(|t| surgery_lifts(rep, t, s))
        .take(limit)
        .collect()
}

struct Found {
    plan: Option<CasePlan>,
    candidate: Candidate,
    tau: Intertwiner,
    homology: HomologyCertificate,
}

/// Tries every lift of every candidate; stops at the first `b₁ ≥ 1`.
fn try_candidate(
    cand: Candidate,
    variant: Variant,
    word: &TwistWord,
    s: Slope,
    config: &CertifyConfig,
    notes: &mut Vec<String>,
) -> Option<(Candidate, Intertwiner, HomologyCertificate)> {
    let mut cand = cand;
    if variant == Variant::Swapped {
        cand.rep = cand.rep.swapped();
    }
    let d = cand.rep.degree();
    if d > config.max_cover_degree {
        notes.push(format!(
            "skipped a cover of degree {d} above the cap {}",
            config.max_cover_degree
        ));
        return None;
    }
    let lifts = surgery_lifts_of(&cand.rep, word, s, config.max_lifts);
    if lifts.is_empty() {
        notes.push(format!(
            "degree {d}: no lift of the monodromy carries the surgery curve"
        ));
        return None;
    }
    for tau in lifts {
        match b1_filled_bound(word, &cand.rep, &tau, s) {
            Ok(0) => {
                notes.push(format!("degree {d}: b1 = 0"));
                continue;
            }
            Ok(_) => {}
            Err(e) => {
                notes.push(format!("degree {d}: {e}"));
                continue;
            }
        }
        match b1_filled_cover(word, &cand.rep, &tau, s) {
            Ok(h) if h.b1 >= 1 => return Some((cand, tau, h)),
            Ok(_) => notes.push(format!("degree {d}: b1 = 0")),
            Err(e) => notes.push(format!("degree {d}: {e}")),
        }
    }
    None
}

/// Certifies `M_h(μ, λ)` for the monodromy `word` and slope `s`.
pub fn certify(word: &TwistWord, s: Slope, config: &CertifyConfig) -> Certificate {
    let start = Instant::now();
    let mut cert = certify_inner(word, s, config);
    cert.timing_ms = start.elapsed().as_millis() as u64;
    cert
}

fn certify_inner(word: &TwistWord, s: Slope, config: &CertifyConfig) -> Certificate {
    let mut cert = Certificate::blank(&word.to_string(), s, config);
    let strategies = if config.quotient_strategies.is_empty() {
        quotient_strategies()
    } else {
        match select_strategies(&config.quotient_strategies) {
            Ok(s) => s,
            Err(e) => {
                cert.notes.push(e.to_string());
                cert.status = Status::Degenerate;
                return cert;
            }
        }
    };
    let cases = if config.cases.is_empty() {
        crate::quotient::cases::cover_cases()
    } else {
        match select_cases(&config.cases) {
            Ok(c) => c,
            Err(e) => {
                cert.notes.push(e.to_string());
                cert.status = Status::Degenerate;
                return cert;
            }
        }
    };
    let ctx = FactoryContext {
        budget: QuotientBudget {
            degree_cap: config.degree_cap,
            node_budget: config.node_budget,
        },
        strategies: &strategies,
        group_cap: config.group_cap,
    };

    // The manifold itself.
    let trivial = CoverRep::trivial();
    let id = Intertwiner { tau: Perm::identity(1) };
    if let Ok(h) = b1_filled_cover(word, &trivial, &id, s) {
        if h.b1 >= 1 {
            let cand = Candidate {
                rep: trivial,
                cut_data: None,
                cuts: None,
                witness: None,
            };
            fill_certified(&mut cert, word, s, "identity", "base", None, None, cand, id, h, config);
            return cert;
        }
    }

    let mut had_plan = false;
    let mut all_degenerate = true;
    for t in transforms(config) {
        let (w, s2) = if t.name == "identity" {
            (word.clone(), s)
        } else {
            match apply_framing(&t, word, s) {
                Ok(ws) => ws,
                Err(_) => continue,
            }
        };
        let inv = match bundle_invariants(&w) {
            Ok(inv) => inv,
            Err(e) => {
                cert.notes.push(format!("{}: {e}", t.name));
                continue;
            }
        };
        let (plans, failures) = plan_all(&inv, s2, &cases);
        for f in &failures {
            all_degenerate &= f.degenerate;
            cert.notes.push(format!("{}: {f}", t.name));
        }
        for plan in plans {
            had_plan = true;
            all_degenerate = false;
            let case = cases
                .iter()
                .find(|c| c.tag() == plan.case)
                .expect("plans come from registered cases");
            let mut found: Option<Found> = None;
            let mut notes = Vec::new();
            let result =
                case.covers(
                    &plan,
                    &ctx,
                    &mut |cand| match try_candidate(cand, plan.variant, &w, s2, config, &mut notes) {
                        Some((candidate, tau, homology)) => {
                            found = Some(Found {
                                plan: Some(plan.clone()),
                                candidate,
                                tau,
                                homology,
                            });
                            ControlFlow::Break(())
                        }
                        None => ControlFlow::Continue(()),
                    },
                );
            let label = format!("{}: case {} (m = {}, {:?})", t.name, plan.case, plan.rows, plan.variant);
            notes.dedup();
            cert.notes.extend(notes.into_iter().map(|n| format!("{label}: {n}")));
            if let Err(e) = result {
                cert.notes.push(format!("{label}: {e}"));
            }
            if let Some(f) = found {
                let variant = f.plan.as_ref().map(|p| p.variant);
                let tag = plan.case.as_str();
                fill_certified(
                    &mut cert,
                    &w,
                    s2,
                    &t.name,
                    tag,
                    variant,
                    f.plan,
                    f.candidate,
                    f.tau,
                    f.homology,
                    config,
                );
                return cert;
            }
        }
    }

    if config.index_cap > 0 {
        let (found, search) = low_index_fallback(word, s, config);
        match found {
            Some((action, b1, torsion)) => {
                let pres = filled_presentation(word, Some(s));
                cert.status = Status::Certified;
                cert.case = Some("low-index".into());
                cert.transform = Some("identity".into());
                cert.certified_word = Some(word.to_string());
                cert.certified_slope = Some(s);
                cert.degree = Some(action.degree());
                cert.b1 = Some(b1);
                cert.torsion = Some(torsion);
                cert.action = Some(action);
                cert.presentation_hash = Some(presentation_hash(&pres));
                return cert;
            }
            None => {
                had_plan = true;
                let extent = if search.complete {
                    "search complete".to_string()
                } else {
                    format!("node budget spent after {} nodes", search.nodes)
                };
                cert.notes.push(format!(
                    "low-index: no cover with b1 >= 1 up to index {} ({extent})",
                    config.index_cap
                ));
            }
        }
    }

    cert.status = if had_plan {
        cert.notes.push(format!(
            "caps: degree {}, group {}, cover degree {}, index {}, nodes {}",
            config.degree_cap, config.group_cap, config.max_cover_degree, config.index_cap, config.node_budget
        ));
        Status::SearchExhausted
    } else if all_degenerate && !cert.notes.is_empty() {
        Status::Degenerate
    } else {
        Status::HypothesisFails
    };
    cert
}

#[allow(clippy::too_many_arguments)]
fn fill_certified(
    cert: &mut Certificate,
    word: &TwistWord,
    s: Slope,
    transform: &str,
    case: &str,
    variant: Option<Variant>,
    plan: Option<CasePlan>,
    cand: Candidate,
    tau: Intertwiner,
    h: HomologyCertificate,
    config: &CertifyConfig,
) {
    cert.status = Status::Certified;
    cert.case = Some(case.into());
    cert.variant = variant;
    cert.transform = Some(transform.into());
    cert.certified_word = Some(word.to_string());
    cert.certified_slope = Some(s);
    cert.plan = plan;
    cert.degree = Some(cand.rep.degree());
    cert.b1 = Some(h.b1);
    cert.torsion = h.torsion.clone();
    if cand.rep.degree() <= config.wang_limit {
        cert.wang_b1 = wang_b1(word, &cand.rep, &tau, Some(s)).ok();
    }
    cert.homology = Some(h);
    cert.quotient = cand.witness;
    cert.cut_data = cand.cut_data;
    cert.cuts = cand.cuts;
    cert.cover = Some(cand.rep);
    cert.tau = Some(tau.tau);
    cert.presentation_hash = Some(presentation_hash(&filled_presentation(word, Some(s))));
}

/// `b₁` and torsion of the cover of the filled manifold given by a
/// transitive action of its group.
pub fn action_homology(word: &TwistWord, s: Slope, action: &CosetAction) -> Result<(usize, Vec<BigInt>)> {
    let pres = filled_presentation(word, Some(s));
    if let Some(r) = action.violated_relator(&pres) {
        return Err(Error::RelatorNontrivial(format!("relator {r} acts nontrivially")));
    }
    let sp = reidemeister_schreier(&pres, action)?;
    let g = cokernel(&sp.relation_matrix());
    Ok((g.free_rank, g.torsion))
}

/// Transitive actions of the filled group up to the index cap, smallest
/// first; the first one whose cover has `b₁ ≥ 1`.
type LowIndexHit = (CosetAction, usize, Vec<BigInt>);

fn low_index_fallback(word: &TwistWord, s: Slope, config: &CertifyConfig) -> (Option<LowIndexHit>, LowIndexResult) {
    let pres = filled_presentation(word, Some(s));
    let limits = LowIndexLimits {
        max_index: config.index_cap,
        node_budget: config.node_budget.saturating_mul(10),
        exact_index: false,
        max_results: usize::MAX,
    };
    let mut found = None;
    let search = low_index_search(&pres, &limits, &mut |a: &CosetAction| {
        if found.is_some() {
            return false;
        }
        if let Ok((b1, torsion)) = action_homology(word, s, a) {
            if b1 >= 1 {
                found = Some((a.clone(), b1, torsion));
                return true;
            }
        }
        false
    });
    (found, search)
}

/// Certificates for every slope with `|μ|, |λ| ≤ window`, sorted by slope.
pub fn scan(word: &TwistWord, window: i64, config: &CertifyConfig) -> Result<Vec<Certificate>> {
    if window < 1 {
        return Err(Error::Precondition(format!("window must be at least 1, got {window}")));
    }
    let mut out: Vec<Certificate> = Slope::window(window)
        .into_par_iter()
        .map(|s| certify(word, s, config))
        .collect();
    out.sort_by_key(|c| c.slope);
    Ok(out)
}

/// Counts per status, in status order.
pub fn status_summary(certs: &[Certificate]) -> Vec<(Status, usize)> {
    [
        Status::Certified,
        Status::HypothesisFails,
        Status::SearchExhausted,
        Status::Degenerate,
    ]
    .into_iter()
    .map(|st| (st, certs.iter().filter(|c| c.status == st).count()))
    .collect()
}

/// Re-runs every check recorded in a certificate. Non-certified
/// certificates verify when they carry no homology claim.
pub fn verify_certificate(c: &Certificate) -> Result<bool> {
    if c.version != CERTIFICATE_VERSION {
        return Err(Error::Malformed(format!("unknown certificate version {:?}", c.version)));
    }
    if c.status != Status::Certified {
        return Ok(c.b1.is_none() && c.cover.is_none() && c.action.is_none());
    }
    let word = TwistWord::parse(&c.word)?;
    let (Some(wtext), Some(s2), Some(b1)) = (&c.certified_word, c.certified_slope, c.b1) else {
        return Err(Error::Malformed(
            "certified certificate without its word, slope or b1".into(),
        ));
    };
    let w2 = TwistWord::parse(wtext)?;
    if b1 == 0 {
        return Ok(false);
    }
    // The transform must carry the stated problem to the certified one.
    let transform = c.transform.as_deref().unwrap_or("identity");
    if transform == "identity" {
        if w2 != word || s2 != c.slope {
            return Ok(false);
        }
    } else {
        let Some(t) = find_transform(transform) else {
            return Err(Error::Malformed(format!("unknown transform {transform:?}")));
        };
        match apply_framing(&t, &word, c.slope) {
            Ok((w, s)) if w == w2 && s == s2 => {}
            _ => return Ok(false),
        }
    }
    let pres = filled_presentation(&w2, Some(s2));
    if c.presentation_hash.as_deref() != Some(presentation_hash(&pres).as_str()) {
        return Ok(false);
    }
    if let Some(action) = &c.action {
        if !action.is_transitive() || c.degree != Some(action.degree()) {
            return Ok(false);
        }
        return Ok(match action_homology(&w2, s2, action) {
            Ok((b, t)) => b == b1 && Some(t) == c.torsion,
            Err(_) => false,
        });
    }
    let (Some(rep), Some(tau)) = (&c.cover, &c.tau) else {
        return Err(Error::Malformed("certified certificate without a cover".into()));
    };
    if c.degree != Some(rep.degree()) {
        return Ok(false);
    }
    let swap = |r: CoverRep| {
        if c.variant == Some(Variant::Swapped) {
            r.swapped()
        } else {
            r
        }
    };
    if let Some(data) = &c.cut_data {
        let Some(plan) = &c.plan else {
            return Err(Error::Malformed("cut data without its plan".into()));
        };
        if check_condition_i_ii(data) != (true, true) || !check_condition_iii(data, plan.r, plan.slope) {
            return Ok(false);
        }
        if build_rep(data).map(swap).ok().as_ref() != Some(rep) {
            return Ok(false);
        }
    }
    if let Some(cuts) = &c.cuts {
        let Some(sol) = c.plan.as_ref().and_then(|p| p.cyclic.as_ref()) else {
            return Err(Error::Malformed("horizontal cuts without a cyclic solution".into()));
        };
        let Some(plan) = &c.plan else { unreachable!() };
        if !sol.satisfies(plan.r, plan.slope) {
            return Ok(false);
        }
        if doubled_cut_rep(sol, cuts).map(swap).ok().as_ref() != Some(rep) {
            return Ok(false);
        }
    }
    if let Some(w) = &c.quotient {
        if !w.is_exact() {
            return Ok(false);
        }
    }
    let tau = Intertwiner { tau: tau.clone() };
    let h = match b1_filled_cover(&w2, rep, &tau, s2) {
        Ok(h) => h,
        Err(_) => return Ok(false),
    };
    if h.b1 != b1 || h.torsion != c.torsion || c.homology.as_ref().is_some_and(|x| *x != h) {
        return Ok(false);
    }
    if let Some(wb) = c.wang_b1 {
        if wang_b1(&w2, rep, &tau, Some(s2)).ok() != Some(wb) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> TwistWord {
        TwistWord::parse(s).unwrap()
    }

    fn sl(m: i64, l: i64) -> Slope {
        Slope::new(m, l).unwrap()
    }

    #[test]
    fn figure_eight_unit_slope_has_no_case() {
        let c = certify(&w("Dx Dy"), sl(1, 1), &CertifyConfig::default());
        assert_eq!(c.status, Status::HypothesisFails);
        assert!(c.notes.iter().any(|n| n.contains("no divisor")));
        assert!(verify_certificate(&c).unwrap());
    }

    #[test]
    fn fibered_filling_is_its_own_certificate() {
        // μ = 0 kills the boundary only, leaving the suspension class.
        let c = certify(&w("Dx Dy^4"), sl(0, 1), &CertifyConfig::default());
        assert_eq!(c.status, Status::Certified);
        assert_eq!(c.case.as_deref(), Some("base"));
        assert!(verify_certificate(&c).unwrap());
    }

    #[test]
    fn cyclic_case_certifies_and_verifies() {
        let c = certify(&w("Dx Dy^6"), sl(1, 2), &CertifyConfig::default());
        assert_eq!(c.status, Status::Certified, "{:?}", c.notes);
        assert_eq!(c.case.as_deref(), Some("3b"));
        assert_eq!(c.degree, Some(30));
        assert_eq!(c.wang_b1, c.b1);
        assert!(verify_certificate(&c).unwrap());
        let mut bad = c.clone();
        bad.b1 = Some(c.b1.unwrap() + 1);
        assert!(!verify_certificate(&bad).unwrap());
    }

    #[test]
    fn unknown_version_is_malformed() {
        let mut c = certify(&w("Dx Dy"), sl(1, 1), &CertifyConfig::default());
        c.version = "other/0".into();
        assert!(verify_certificate(&c).is_err());
    }

    #[test]
    fn csv_columns() {
        let c = certify(&w("Dx Dy"), sl(1, 1), &CertifyConfig::default());
        assert_eq!(c.csv_record()[3], "hypothesis-fails");
        assert_eq!(Certificate::CSV_HEADER.len(), 7);
    }
}
