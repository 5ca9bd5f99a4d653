//! Verifiers for the eigenspace–filtration splitting statements: the main
//! simultaneous-eigenspace theorem, the stability and X(S)-decomposition
//! corollaries, and the strictness comparison on filtered quotients.
//!
//! Verifiers run even when hypotheses fail: hypothesis status and conclusion
//! status are reported separately, so the one-directional statements can be
//! probed empirically from both sides.

use crate::matrix::Matrix;
use crate::phi::{strictly_small_slope, PhiError, PlecticModule, RootPair};
use crate::rational::{format_rat, Rat};
use crate::subsets::SubsetIndex;
use crate::subspace::{eigenspace, QuotientMap, Subspace};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TheoremError {
    /// The root map does not match the subset it is indexed by.
    RootIndexMismatch { i: usize },
    RootNotEigenvalue { i: usize, root: String },
    Phi(PhiError),
}

impl fmt::Display for TheoremError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TheoremError::RootIndexMismatch { i } => {
                write!(f, "root provided for place {} outside the chosen subset", i + 1)
            }
            TheoremError::RootNotEigenvalue { i, root } => {
                write!(f, "{root} is not an eigenvalue of phi_{}", i + 1)
            }
            TheoremError::Phi(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for TheoremError {}

impl From<PhiError> for TheoremError {
    fn from(e: PhiError) -> Self {
        TheoremError::Phi(e)
    }
}

/// A choice of one Frobenius root per place in a subset `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootChoice {
    s: SubsetIndex,
    /// 0-based place index -> chosen root; keys are exactly the places of `s`.
    roots: BTreeMap<usize, Rat>,
}

impl RootChoice {
    pub fn new(s: SubsetIndex, roots: Vec<(usize, Rat)>) -> Result<Self, TheoremError> {
        let map: BTreeMap<usize, Rat> = roots.into_iter().collect();
        for &i in map.keys() {
            if !s.contains(i as u8 + 1) {
                return Err(TheoremError::RootIndexMismatch { i });
            }
        }
        for i in s.elements() {
            if !map.contains_key(&(i as usize - 1)) {
                return Err(TheoremError::RootIndexMismatch { i: i as usize - 1 });
            }
        }
        Ok(RootChoice { s, roots: map })
    }

    pub fn empty(d: u8) -> Self {
        RootChoice { s: SubsetIndex::empty(d), roots: BTreeMap::new() }
    }

    pub fn s(&self) -> &SubsetIndex {
        &self.s
    }

    pub fn root(&self, i: usize) -> Option<&Rat> {
        self.roots.get(&i)
    }

    pub fn places(&self) -> impl Iterator<Item = (&usize, &Rat)> {
        self.roots.iter()
    }

    /// Errors unless every chosen root is an eigenvalue of its operator.
    pub fn validate_against(&self, m: &PlecticModule) -> Result<(), TheoremError> {
        for (&i, root) in &self.roots {
            if !m.is_eigenvalue(i, root) {
                return Err(TheoremError::RootNotEigenvalue { i, root: format_rat(root) });
            }
        }
        Ok(())
    }
}

/// One verified sub-statement. `hypothesis_ok` is `None` for checks that do
/// not depend on hypotheses (pure bookkeeping identities).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub id: String,
    pub hypothesis_ok: Option<bool>,
    pub conclusion_ok: bool,
    pub witness: Option<String>,
}

/// A flat list of sub-check results, in deterministic order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn push(&mut self, id: impl Into<String>, hypothesis_ok: Option<bool>, conclusion_ok: bool) {
        self.checks.push(CheckResult {
            id: id.into(),
            hypothesis_ok,
            conclusion_ok,
            witness: None,
        });
    }

    pub fn push_with_witness(
        &mut self,
        id: impl Into<String>,
        hypothesis_ok: Option<bool>,
        conclusion_ok: bool,
        witness: String,
    ) {
        self.checks.push(CheckResult {
            id: id.into(),
            hypothesis_ok,
            conclusion_ok,
            witness: Some(witness),
        });
    }

    pub fn all_conclusions_hold(&self) -> bool {
        self.checks.iter().all(|c| c.conclusion_ok)
    }

    pub fn all_hypotheses_hold(&self) -> bool {
        self.checks.iter().all(|c| c.hypothesis_ok.unwrap_or(true))
    }

    /// The scramble-invariant content: ids and flags, without witnesses
    /// (witness coordinates legitimately change under a change of basis).
    pub fn flags(&self) -> Vec<(String, Option<bool>, bool)> {
        self.checks
            .iter()
            .map(|c| (c.id.clone(), c.hypothesis_ok, c.conclusion_ok))
            .collect()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let hyp = match c.hypothesis_ok {
                Some(true) => "hyp ok",
                Some(false) => "hyp FAILED",
                None => "-",
            };
            let concl = if c.conclusion_ok { "ok" } else { "FAILED" };
            write!(f, "{:<40} [{}] {}", c.id, hyp, concl)?;
            if let Some(w) = &c.witness {
                write!(f, "  ({w})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// `\bigcap_{i in S} ker(phi_i - alpha_i)`; the full space for empty `S`.
pub fn simultaneous_eigenspace(m: &PlecticModule, rc: &RootChoice) -> Subspace {
    let mut acc = Subspace::full(m.dim());
    for (&i, root) in rc.places() {
        let e = eigenspace(m.phi(i), root).expect("square");
        acc = acc.intersect(&e).expect("same ambient");
    }
    acc
}

/// The quotient `D / sum_(i in S) Fil_i^+` with its projection, plus the
/// induced images of filtration steps.
#[derive(Debug, Clone)]
pub struct FilMinusQuotient {
    s: SubsetIndex,
    quotient: QuotientMap,
}

impl FilMinusQuotient {
    pub fn new(m: &PlecticModule, s: &SubsetIndex) -> Self {
        let mut k = Subspace::zero(m.dim());
        for i in s.elements() {
            k = k.sum(m.fil_plus(i as usize - 1)).expect("same ambient");
        }
        FilMinusQuotient { s: *s, quotient: QuotientMap::new(k) }
    }

    pub fn s(&self) -> &SubsetIndex {
        &self.s
    }

    /// `sum_(i in S) Fil_i^+`, the kernel of the projection.
    pub fn kernel(&self) -> &Subspace {
        self.quotient.kernel()
    }

    pub fn quotient_dim(&self) -> usize {
        self.quotient.target_dim()
    }

    pub fn projection(&self) -> &Matrix {
        self.quotient.matrix()
    }

    /// Image of a subspace in the quotient (`Fil^T Fil_S^-` for `Fil^T`).
    pub fn project(&self, sub: &Subspace) -> Subspace {
        self.quotient.image_of(sub)
    }
}

fn hypothesis_for_choice(m: &PlecticModule, rc: &RootChoice) -> (bool, Vec<(usize, bool)>) {
    let mut per_place = Vec::new();
    let mut all = true;
    for (&i, alpha) in rc.places() {
        let ok = place_hypothesis(m, i, alpha);
        all &= ok;
        per_place.push((i, ok));
    }
    (all, per_place)
}

/// Hypothesis at one place: `alpha` is an eigenvalue, the quadratic relation
/// `(phi_i - alpha)(phi_i - beta) = 0` holds with `beta != alpha`, and
/// `alpha` has strictly small slope.
fn place_hypothesis(m: &PlecticModule, i: usize, alpha: &Rat) -> bool {
    if !m.is_eigenvalue(i, alpha) {
        return false;
    }
    let distinct = match m.other_root(i, alpha) {
        Some(beta) => beta != *alpha,
        None => false,
    };
    distinct && strictly_small_slope(alpha, i, m.weight()).unwrap_or(false)
}

/// Verifies, for a module and a root choice on `S`:
///  1. the simultaneous eigenspace has dimension `2^(d-|S|)`;
///  2. it meets `sum_(i in S) Fil_i^+` in zero;
///  3. the projection to the quotient is bijective;
///  4. for every `T`, `Fil^T ∩ E` maps bijectively onto the image of
///     `Fil^T` in the quotient, both sides vanishing when `S ∩ T` is
///     nonempty.
///
/// Hypothesis failures do not stop the verification; they are recorded.
pub fn theorem_main_verify(m: &PlecticModule, rc: &RootChoice) -> Report {
    let (hyp, per_place) = hypothesis_for_choice(m, rc);
    let s = rc.s();
    let expected = 1usize << (m.d() - s.len());
    let mut report = Report::default();
    for (i, ok) in per_place {
        report.push(format!("main.hypothesis.place{}", i + 1), Some(ok), ok);
    }

    let e = simultaneous_eigenspace(m, rc);
    let q = FilMinusQuotient::new(m, s);
    let f = m.filtration();

    report.push(
        format!("main.eigenspace_dim[S={s}]"),
        Some(hyp),
        e.dim() == expected,
    );

    let meet = e.intersect(q.kernel()).expect("same ambient");
    if meet.is_zero() {
        report.push("main.zero_intersection_with_fil_sum", Some(hyp), true);
    } else {
        report.push_with_witness(
            "main.zero_intersection_with_fil_sum",
            Some(hyp),
            false,
            format!("common vector {meet}"),
        );
    }

    let image = q.project(&e);
    let bijective = image.dim() == e.dim() && image.dim() == q.quotient_dim();
    report.push("main.projection_bijective", Some(hyp), bijective);

    for t in SubsetIndex::all(m.d() as u8) {
        let fil_t = f.fil(&t);
        let restricted = fil_t.intersect(&e).expect("same ambient");
        let lhs = q.project(&restricted);
        let rhs = q.project(fil_t);
        let mut ok = lhs == rhs && lhs.dim() == restricted.dim();
        if !s.intersection(&t).is_empty() {
            ok = ok && restricted.is_zero() && rhs.is_zero();
        }
        report.push(format!("main.fil_piece[T={t}]"), Some(hyp), ok);
    }
    report
}

/// The X(S)-decomposition: `X(S) = Fil^S ∩ \bigcap_(i not in S) ker(phi_i -
/// alpha_i)` for a full root map, with the direct-sum and splitting laws.
#[derive(Debug, Clone)]
pub struct DecompositionReport {
    pub lines: Vec<(SubsetIndex, Subspace)>,
    pub hypothesis_ok: bool,
    pub one_dimensional_ok: bool,
    pub direct_sum_ok: bool,
    pub fil_split_ok: bool,
    pub eigen_split_ok: bool,
}

impl DecompositionReport {
    pub fn all_ok(&self) -> bool {
        self.one_dimensional_ok && self.direct_sum_ok && self.fil_split_ok && self.eigen_split_ok
    }

    pub fn line(&self, s: &SubsetIndex) -> &Subspace {
        &self.lines[s.bits() as usize].1
    }

    pub fn to_report(&self) -> Report {
        let hyp = Some(self.hypothesis_ok);
        let mut r = Report::default();
        r.push("xs.one_dimensional", hyp, self.one_dimensional_ok);
        r.push("xs.direct_sum", hyp, self.direct_sum_ok);
        r.push("xs.fil_splitting", hyp, self.fil_split_ok);
        r.push("xs.eigen_splitting", hyp, self.eigen_split_ok);
        r
    }
}

/// Computes all `2^d` lines `X(S)` for a root map choosing one root per
/// place, and verifies the decomposition and both splitting laws.
pub fn xs_decomposition(m: &PlecticModule, roots: &[Rat]) -> Result<DecompositionReport, TheoremError> {
    assert_eq!(roots.len(), m.d(), "one root per place");
    let d = m.d() as u8;
    let f = m.filtration();
    let hypothesis_ok = (0..m.d()).all(|i| place_hypothesis(m, i, &roots[i]));

    let eigen: Vec<Subspace> = (0..m.d())
        .map(|i| eigenspace(m.phi(i), &roots[i]).expect("square"))
        .collect();

    let mut lines = Vec::new();
    for s in SubsetIndex::all(d) {
        let mut x = f.fil(&s).clone();
        for i in 0..m.d() {
            if !s.contains(i as u8 + 1) {
                x = x.intersect(&eigen[i]).expect("same ambient");
            }
        }
        lines.push((s, x));
    }

    let one_dimensional_ok = lines.iter().all(|(_, x)| x.dim() == 1);
    let stacked: Vec<Vec<Rat>> = lines.iter().flat_map(|(_, x)| x.basis_rows()).collect();
    let direct_sum_ok = one_dimensional_ok
        && Subspace::span(m.dim(), stacked).dim() == m.dim();

    let mut fil_split_ok = true;
    let mut eigen_split_ok = true;
    for i in 0..m.d() {
        let mut with_i = Subspace::zero(m.dim());
        let mut without_i = Subspace::zero(m.dim());
        for (s, x) in &lines {
            if s.contains(i as u8 + 1) {
                with_i = with_i.sum(x).expect("same ambient");
            } else {
                without_i = without_i.sum(x).expect("same ambient");
            }
        }
        fil_split_ok &= &with_i == m.fil_plus(i);
        eigen_split_ok &= with_i.dim() + without_i.dim() == m.dim() && without_i == eigen[i];
    }

    Ok(DecompositionReport {
        lines,
        hypothesis_ok,
        one_dimensional_ok,
        direct_sum_ok,
        fil_split_ok,
        eigen_split_ok,
    })
}

/// Stability of `Fil_j^+` under the other operators: requires, as a
/// hypothesis, both roots distinct and strictly small at every `i != j`.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub j: usize,
    pub hypothesis_ok: bool,
    /// Per place `i != j`: is `phi_i(Fil_j^+) ⊆ Fil_j^+`?
    pub stable: Vec<(usize, bool)>,
}

impl StabilityReport {
    pub fn conclusion_ok(&self) -> bool {
        self.stable.iter().all(|(_, ok)| *ok)
    }

    pub fn to_report(&self) -> Report {
        let mut r = Report::default();
        for (i, ok) in &self.stable {
            r.push(
                format!("stability.fil{}_under_phi{}", self.j + 1, i + 1),
                Some(self.hypothesis_ok),
                *ok,
            );
        }
        r
    }
}

/// Checks `phi_i(Fil_j^+) ⊆ Fil_j^+` for all `i != j`. `roots[i]` carries
/// the root pair at each place `i != j` for the hypothesis record.
pub fn phi_stability_check(
    m: &PlecticModule,
    j: usize,
    roots: &BTreeMap<usize, RootPair>,
) -> Result<StabilityReport, TheoremError> {
    if j >= m.d() {
        return Err(TheoremError::Phi(PhiError::IndexOutOfRange { i: j, d: m.d() }));
    }
    let mut hypothesis_ok = true;
    for i in 0..m.d() {
        if i == j {
            continue;
        }
        let ok = match roots.get(&i) {
            Some(pair) => {
                pair.distinct()
                    && m.hecke_quadratic_check(i, pair)?
                    && strictly_small_slope(&pair.alpha, i, m.weight()).unwrap_or(false)
                    && strictly_small_slope(&pair.beta, i, m.weight()).unwrap_or(false)
            }
            None => false,
        };
        hypothesis_ok &= ok;
    }
    let fil_j = m.fil_plus(j);
    let stable = (0..m.d())
        .filter(|&i| i != j)
        .map(|i| (i, fil_j.contains(&fil_j.image_under(m.phi(i)))))
        .collect();
    Ok(StabilityReport { j, hypothesis_ok, stable })
}

/// Outcome of the strictness comparison for one `(S, T)` pair: the map
/// `E/(E ∩ Fil^T) -> Fil_S^- / (image of Fil^T)` with `E` the simultaneous
/// eigenspace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrictnessOutcome {
    /// `E ∩ (sum_(i in S) Fil_i^+ + Fil^T) = E ∩ Fil^T`
    pub injective: bool,
    /// `E + Fil^T + sum_(i in S) Fil_i^+` is the full space
    pub surjective: bool,
}

impl StrictnessOutcome {
    pub fn bijective(&self) -> bool {
        self.injective && self.surjective
    }
}

/// Verifies that the induced map on filtered quotients is bijective; this is
/// the synthetic content of the strictness argument (the eigenspace meets
/// `Fil^T` in as much as the quotient filtration allows, never less).
pub fn strictness_check(m: &PlecticModule, rc: &RootChoice, t: &SubsetIndex) -> StrictnessOutcome {
    let e = simultaneous_eigenspace(m, rc);
    let q = FilMinusQuotient::new(m, rc.s());
    let f = m.filtration();
    let fil_t = f.fil(t);
    let k_plus_t = q.kernel().sum(fil_t).expect("same ambient");
    let injective =
        e.intersect(&k_plus_t).expect("ambient") == e.intersect(fil_t).expect("ambient");
    let surjective = e.sum(&k_plus_t).expect("ambient").is_full();
    StrictnessOutcome { injective, surjective }
}
