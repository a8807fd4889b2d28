//! Candidate patterns: pairs of 3-valent node conditions on a reference
//! tile, their forced edge equalities, and the first-stage sort.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{grow, seed_patch, Limits, Outcome, Prototile, SeedSpec};
use crate::geometry::{Tolerance, EDGE_LABELS, VERTEX_LABELS};
use crate::labels::{Relabel, Triple};
use crate::model::classify;
use crate::solve::{
    solve_constraints, AngleEq, ConstraintSet, InfeasibilityCertificate, PentagonSample, SolveError, SolveOptions,
    SolveOutcome,
};
use crate::table::{parse_type_definitions, TableError, TypeTable};

pub const REFERENCE_PATTERN_COUNT: usize = 465;
pub const REFERENCE_UNCERTAIN_COUNT: usize = 34;
pub const REFERENCE_REFINED_COUNT: usize = 42;

/// A size-3 angle multiset summing to 360, attached to one vertex of the
/// reference tile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AngleCondition {
    pub anchor: u8,
    pub triple: Triple,
}

impl AngleCondition {
    pub fn new(anchor: u8, triple: Triple) -> Option<AngleCondition> {
        triple.contains(anchor).then_some(AngleCondition { anchor, triple })
    }

    pub fn anchor_label(&self) -> char {
        VERTEX_LABELS[self.anchor as usize]
    }

    pub fn equation(&self) -> AngleEq {
        AngleEq {
            coef: self.triple.counts(),
            rhs: 360,
        }
    }
}

impl fmt::Display for AngleCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} = 360", self.anchor_label(), self.triple)
    }
}

/// Every multiset fanned out over its possible anchors (75 conditions).
pub fn enumerate_angle_conditions() -> Vec<AngleCondition> {
    Triple::all()
        .into_iter()
        .flat_map(|t| t.distinct().into_iter().map(move |a| AngleCondition { anchor: a, triple: t }))
        .collect()
}

/// The 30 multisets left after dropping `3X = 360`.
pub fn reduced_triples() -> Vec<Triple> {
    Triple::all().into_iter().filter(|t| t.distinct().len() > 1).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionRules {
    /// Treat `(v1, v2)` as unordered.
    pub dedup: bool,
    /// Also identify patterns related by a relabeling of the pentagon.
    pub dihedral: bool,
}

impl Default for ReductionRules {
    fn default() -> Self {
        ReductionRules {
            dedup: true,
            dihedral: false,
        }
    }
}

/// A set partition of the edge labels, as the smallest member of each
/// edge's block.
pub type EdgePartition = [usize; 5];

pub const DISCRETE: EdgePartition = [0, 1, 2, 3, 4];

fn find(p: &mut [usize; 5], i: usize) -> usize {
    let mut r = i;
    while p[r] != r {
        r = p[r];
    }
    p[i] = r;
    r
}

fn canonical(mut p: [usize; 5]) -> EdgePartition {
    let roots: [usize; 5] = std::array::from_fn(|i| find(&mut p, i));
    std::array::from_fn(|i| (0..5).find(|&j| roots[j] == roots[i]).unwrap())
}

pub fn partition_from_pairs(pairs: &[(usize, usize)]) -> EdgePartition {
    let mut p = DISCRETE;
    for &(a, b) in pairs {
        let (ra, rb) = (find(&mut p, a), find(&mut p, b));
        if ra != rb {
            p[ra.max(rb)] = ra.min(rb);
        }
    }
    canonical(p)
}

pub fn join(a: &EdgePartition, b: &EdgePartition) -> EdgePartition {
    let pairs: Vec<(usize, usize)> = (0..5).flat_map(|i| [(i, a[i]), (i, b[i])]).collect();
    partition_from_pairs(&pairs)
}

pub fn meet(a: &EdgePartition, b: &EdgePartition) -> EdgePartition {
    std::array::from_fn(|i| (0..5).find(|&j| a[j] == a[i] && b[j] == b[i]).unwrap())
}

/// `a` is at least as fine as `b`.
pub fn refines(a: &EdgePartition, b: &EdgePartition) -> bool {
    (0..5).all(|i| (0..5).all(|j| a[i] != a[j] || b[i] == b[j]))
}

pub fn partition_classes(p: &EdgePartition) -> Vec<Vec<usize>> {
    (0..5)
        .filter(|&r| p[r] == r)
        .map(|r| (0..5).filter(|&i| p[i] == r).collect::<Vec<_>>())
        .filter(|c| c.len() > 1)
        .collect()
}

pub fn describe_partition(p: &EdgePartition) -> String {
    let parts: Vec<String> = partition_classes(p)
        .iter()
        .map(|c| c.iter().map(|&i| EDGE_LABELS[i].to_string()).collect::<Vec<_>>().join("="))
        .collect();
    if parts.is_empty() {
        "none".into()
    } else {
        parts.join(" ")
    }
}

/// Edge flanks `(clockwise, counterclockwise)` of corner `v` around a node.
fn flanks(v: usize, mirrored: bool) -> (usize, usize) {
    let (cw, ccw) = (v, (v + 4) % 5);
    if mirrored {
        (ccw, cw)
    } else {
        (cw, ccw)
    }
}

/// Edge equalities of each way three corners can surround a 3-valent node,
/// with the anchor corner belonging to the unmirrored reference tile.
pub fn node_arrangements(cond: &AngleCondition) -> Vec<EdgePartition> {
    let mut rest = cond.triple.0.to_vec();
    let pos = rest.iter().position(|&l| l == cond.anchor).expect("anchor in triple");
    rest.remove(pos);
    let orders = [[rest[0], rest[1]], [rest[1], rest[0]]];
    let mut out = BTreeSet::new();
    for order in orders {
        for m in 0..4 {
            let corners = [
                flanks(cond.anchor as usize, false),
                flanks(order[0] as usize, m & 1 == 1),
                flanks(order[1] as usize, m & 2 == 2),
            ];
            let pairs: Vec<(usize, usize)> = (0..3).map(|i| (corners[i].1, corners[(i + 1) % 3].0)).collect();
            out.insert(partition_from_pairs(&pairs));
        }
    }
    out.into_iter().collect()
}

/// Equalities holding in every arrangement of the node.
pub fn forced_partition(cond: &AngleCondition) -> EdgePartition {
    node_arrangements(cond).iter().fold(
        partition_from_pairs(&(0..5).map(|i| (0, i)).collect::<Vec<_>>()),
        |acc, p| meet(&acc, p),
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Disposition {
    Unresolved,
    InfeasibleGeometry,
    NonEdgeToEdge,
    MatchesType { types: Vec<String> },
    Uncertain,
}

impl Disposition {
    pub fn bucket(&self) -> &'static str {
        match self {
            Disposition::Unresolved => "unresolved",
            Disposition::InfeasibleGeometry => "infeasible-geometry",
            Disposition::NonEdgeToEdge => "non-edge-to-edge",
            Disposition::MatchesType { .. } => "matches-type",
            Disposition::Uncertain => "uncertain",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidatePattern {
    pub id: usize,
    pub v1: AngleCondition,
    pub v2: AngleCondition,
    pub edges: EdgePartition,
    /// Hypotheses added by refinement, in human-readable form.
    pub hypotheses: Vec<String>,
    pub status: Disposition,
}

impl CandidatePattern {
    pub fn new(id: usize, v1: AngleCondition, v2: AngleCondition) -> CandidatePattern {
        CandidatePattern {
            id,
            v1,
            v2,
            edges: join(&forced_partition(&v1), &forced_partition(&v2)),
            hypotheses: Vec::new(),
            status: Disposition::Unresolved,
        }
    }

    pub fn constraints(&self) -> ConstraintSet {
        ConstraintSet {
            angle_relations: vec![self.v1.equation(), self.v2.equation()],
            edge_classes: partition_classes(&self.edges),
            edge_relations: Vec::new(),
        }
        .normalized()
    }

    pub fn seed(&self) -> SeedSpec {
        SeedSpec {
            conditions: vec![(self.v1.anchor_label(), self.v1.triple), (self.v2.anchor_label(), self.v2.triple)],
        }
    }

    /// The same pattern read through a relabeling of the pentagon.
    pub fn relabel(&self, r: &Relabel) -> CandidatePattern {
        let (v1, v2, edges) = self.relabeled(r);
        CandidatePattern {
            v1,
            v2,
            edges,
            ..self.clone()
        }
    }

    fn relabeled(&self, r: &Relabel) -> (AngleCondition, AngleCondition, EdgePartition) {
        let vinv = r.vertex_inverse();
        let einv = r.edge_inverse();
        let cond = |c: &AngleCondition| AngleCondition {
            anchor: vinv[c.anchor as usize] as u8,
            triple: c.triple.relabel(r),
        };
        let pairs: Vec<(usize, usize)> = (0..5).map(|i| (einv[i], einv[self.edges[i]])).collect();
        let (a, b) = (cond(&self.v1), cond(&self.v2));
        (a.min(b), a.max(b), partition_from_pairs(&pairs))
    }
}

impl fmt::Display for CandidatePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{} [{}] [{}] edges {}", self.id, self.v1, self.v2, describe_partition(&self.edges))?;
        for h in &self.hypotheses {
            write!(f, " +{h}")?;
        }
        Ok(())
    }
}

/// Pick the lexicographically smallest pair of distinct anchors.
fn anchored(t1: Triple, t2: Triple) -> Option<(AngleCondition, AngleCondition)> {
    for a in t1.distinct() {
        for b in t2.distinct() {
            if a != b {
                return Some((AngleCondition { anchor: a, triple: t1 }, AngleCondition { anchor: b, triple: t2 }));
            }
        }
    }
    None
}

pub fn enumerate_candidate_patterns(rules: &ReductionRules) -> Vec<CandidatePattern> {
    let triples = reduced_triples();
    let mut out: Vec<CandidatePattern> = Vec::new();
    for (i, &t1) in triples.iter().enumerate() {
        let start = if rules.dedup { i } else { 0 };
        for &t2 in &triples[start..] {
            if let Some((v1, v2)) = anchored(t1, t2) {
                out.push(CandidatePattern::new(out.len(), v1, v2));
            }
        }
    }
    if rules.dihedral {
        let mut seen = BTreeSet::new();
        out.retain(|p| {
            let orbit: Vec<_> = Relabel::dihedral().iter().map(|r| p.relabeled(r)).collect();
            let fresh = orbit.iter().all(|k| !seen.contains(k));
            seen.insert(p.relabeled(&Relabel::rotation(0)));
            fresh
        });
        for (i, p) in out.iter_mut().enumerate() {
            p.id = i;
        }
    }
    out
}

#[derive(Debug, thiserror::Error)]
pub enum HypothesisError {
    #[error("empty hypothesis")]
    Empty,
    #[error(transparent)]
    Table(#[from] TableError),
}

/// Parse hypotheses such as `a=c`, `b=d=e`, `A+B+D=360` or `c=b+d`,
/// separated by `,` or `;`.
pub fn parse_hypotheses(text: &str) -> Result<ConstraintSet, HypothesisError> {
    let mut block = String::from("type hypothesis edge-to-edge\n");
    let mut any = false;
    for clause in text.split([',', ';']).map(str::trim).filter(|c| !c.is_empty()) {
        any = true;
        let terms: Vec<&str> = clause.split('=').map(str::trim).collect();
        let directive = if clause.chars().any(|c| c.is_ascii_uppercase()) {
            "angle"
        } else if terms.iter().all(|t| t.len() == 1) {
            "edges"
        } else {
            "edge-relation"
        };
        let body = if directive == "edges" { terms.join("=") } else { clause.to_string() };
        block.push_str(&format!("{directive} {body}\n"));
    }
    if !any {
        return Err(HypothesisError::Empty);
    }
    let def = parse_type_definitions(&block)?.remove(0);
    Ok(ConstraintSet {
        angle_relations: def.angle_relations.iter().map(|r| AngleEq { coef: r.coef, rhs: r.rhs }).collect(),
        edge_classes: def.edge_classes,
        edge_relations: def.edge_relations.iter().map(|r| r.coef).collect(),
    }
    .normalized())
}

pub fn solve_candidate(
    pattern: &CandidatePattern,
    extra: &ConstraintSet,
    opts: &SolveOptions,
) -> Result<SolveOutcome, SolveError> {
    solve_constraints(&pattern.constraints().merged(extra), opts)
}

/// Split a pattern by the finest edge partitions its two nodes can realize.
pub fn refine(pattern: &CandidatePattern) -> Vec<CandidatePattern> {
    let mut joined = BTreeSet::new();
    for p in node_arrangements(&pattern.v1) {
        for q in node_arrangements(&pattern.v2) {
            joined.insert(join(&join(&p, &q), &pattern.edges));
        }
    }
    let joined: Vec<EdgePartition> = joined.into_iter().collect();
    let minimal: Vec<EdgePartition> = joined
        .iter()
        .filter(|p| !joined.iter().any(|q| q != *p && refines(q, p)))
        .copied()
        .collect();
    if minimal == [pattern.edges] {
        return vec![pattern.clone()];
    }
    minimal
        .into_iter()
        .map(|edges| {
            let mut p = pattern.clone();
            p.edges = edges;
            p.status = Disposition::Unresolved;
            p.hypotheses.push(describe_partition(&edges));
            p
        })
        .collect()
}

/// Add user hypotheses to a pattern; edge equalities merge into its edge
/// partition, anything else is kept as a hypothesis string.
pub fn with_hypotheses(pattern: &CandidatePattern, extra: &ConstraintSet) -> CandidatePattern {
    let mut p = pattern.clone();
    let pairs: Vec<(usize, usize)> = extra
        .edge_classes
        .iter()
        .flat_map(|c| c.windows(2).map(|w| (w[0], w[1])))
        .chain((0..5).map(|i| (i, p.edges[i])))
        .collect();
    p.edges = partition_from_pairs(&pairs);
    p.hypotheses.extend(extra.describe());
    p.status = Disposition::Unresolved;
    p
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SortConfig {
    pub samples_per_dim: usize,
    pub seed: u64,
    pub limits: Limits,
    pub tol: Tolerance,
}

impl Default for SortConfig {
    fn default() -> Self {
        SortConfig {
            samples_per_dim: 5,
            seed: 0,
            limits: Limits {
                target_depth: 2,
                max_placements: 20_000,
                ..Limits::default()
            },
            tol: Tolerance::default(),
        }
    }
}

impl SortConfig {
    fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            samples_per_dim: self.samples_per_dim,
            seed: self.seed,
            tol: self.tol,
            ..SolveOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleEvidence {
    pub sample: PentagonSample,
    pub types: Vec<String>,
    /// Search outcome when the sample was grown.
    pub outcome: Option<Outcome>,
    pub placements: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternReport {
    pub pattern: CandidatePattern,
    pub constraints: Vec<String>,
    pub dimension: Option<i64>,
    pub reason: String,
    pub certificate: Option<InfeasibilityCertificate>,
    pub samples: Vec<SampleEvidence>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub uncertain: usize,
    pub expected_uncertain: usize,
    pub refined: usize,
    pub expected_refined: usize,
    /// One line per uncertain pattern: why it stayed uncertain and how it splits.
    pub per_pattern: Vec<String>,
    pub reasons: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SortMetadata {
    pub wall_clock_ms: u128,
    pub per_pattern_ms: Vec<u128>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SortReport {
    pub config: SortConfig,
    pub total: usize,
    pub counts: BTreeMap<String, usize>,
    pub patterns: Vec<PatternReport>,
    pub discrepancy: Option<Discrepancy>,
    pub metadata: SortMetadata,
}

/// Sort one pattern into a bucket.
pub fn sort_pattern(pattern: &CandidatePattern, table: &TypeTable, cfg: &SortConfig) -> PatternReport {
    sort_pattern_with(pattern, &ConstraintSet::default(), table, cfg)
}

/// As [`sort_pattern`], with extra relations added to the pattern's system.
pub fn sort_pattern_with(
    pattern: &CandidatePattern,
    extra: &ConstraintSet,
    table: &TypeTable,
    cfg: &SortConfig,
) -> PatternReport {
    let cs = pattern.constraints().merged(extra);
    let mut report = PatternReport {
        pattern: pattern.clone(),
        constraints: cs.describe(),
        dimension: None,
        reason: String::new(),
        certificate: None,
        samples: Vec::new(),
    };
    let fam = match solve_constraints(&cs, &cfg.solve_options()) {
        Err(e) => {
            report.pattern.status = Disposition::Uncertain;
            report.reason = format!("solver: {e}");
            return report;
        }
        Ok(SolveOutcome::Infeasible { certificate }) => {
            report.pattern.status = Disposition::InfeasibleGeometry;
            report.reason = certificate.reason.clone();
            report.certificate = Some(certificate);
            return report;
        }
        Ok(SolveOutcome::Family { family }) => family,
    };
    report.dimension = Some(fam.dimension);
    if fam.samples.is_empty() {
        report.pattern.status = Disposition::Uncertain;
        report.reason = format!("no closed sample among {} angle points", fam.unclosed);
        return report;
    }
    report.samples = fam
        .samples
        .iter()
        .map(|s| SampleEvidence {
            sample: s.clone(),
            types: classify(&s.angles, &s.edges, table, &cfg.tol).types,
            outcome: None,
            placements: 0,
        })
        .collect();
    if report.samples.iter().all(|s| !s.types.is_empty()) {
        let types: BTreeSet<String> = report.samples.iter().flat_map(|s| s.types.iter().cloned()).collect();
        report.reason = format!("all {} samples classify", report.samples.len());
        report.pattern.status = Disposition::MatchesType {
            types: table
                .edge_to_edge()
                .map(|t| t.name.clone())
                .filter(|n| types.contains(n))
                .collect(),
        };
        return report;
    }
    let seed = pattern.seed();
    for s in report.samples.iter_mut() {
        let Ok(proto) = Prototile::new(&s.sample.angles, &s.sample.edges, &cfg.tol) else {
            continue;
        };
        let Ok(patch) = seed_patch(Arc::new(proto), &seed, cfg.tol) else {
            continue;
        };
        let r = grow(patch, cfg.limits);
        s.outcome = Some(r.outcome);
        s.placements = r.stats.placements;
    }
    let count = |o: Outcome| report.samples.iter().filter(|s| s.outcome == Some(o)).count();
    let (ex, reached, budget) = (
        count(Outcome::Exhausted),
        count(Outcome::ReachedTargetDepth),
        count(Outcome::BudgetExceeded),
    );
    let n = report.samples.len();
    if ex == n {
        report.pattern.status = Disposition::NonEdgeToEdge;
        report.reason = format!(
            "search exhausted before ring depth {} for all {n} samples (bounded evidence)",
            cfg.limits.target_depth
        );
    } else {
        report.pattern.status = Disposition::Uncertain;
        let typed = report.samples.iter().filter(|s| !s.types.is_empty()).count();
        report.reason = format!("{typed} typed, {ex} exhausted, {reached} reached depth, {budget} over budget of {n}");
    }
    report
}

fn uncertain_reason_class(r: &PatternReport) -> String {
    if r.reason.starts_with("solver") {
        "solver failure".into()
    } else if r.reason.starts_with("no closed") {
        "no closed sample".into()
    } else {
        let reached = r.samples.iter().any(|s| s.outcome == Some(Outcome::ReachedTargetDepth));
        let budget = r.samples.iter().any(|s| s.outcome == Some(Outcome::BudgetExceeded));
        match (reached, budget) {
            (true, true) => "untyped sample reaches depth; budget hit".into(),
            (true, false) => "untyped sample reaches depth".into(),
            (false, true) => "budget exceeded".into(),
            (false, false) => "mixed typed and exhausted samples".into(),
        }
    }
}

pub fn first_stage_sort(patterns: &[CandidatePattern], table: &TypeTable, cfg: &SortConfig) -> SortReport {
    let start = Instant::now();
    let timed: Vec<(PatternReport, u128)> = patterns
        .par_iter()
        .map(|p| {
            let t = Instant::now();
            let r = sort_pattern(p, table, cfg);
            (r, t.elapsed().as_millis())
        })
        .collect();
    let (reports, per_pattern_ms): (Vec<PatternReport>, Vec<u128>) = timed.into_iter().unzip();
    let mut counts: BTreeMap<String, usize> = ["infeasible-geometry", "non-edge-to-edge", "matches-type", "uncertain"]
        .iter()
        .map(|b| (b.to_string(), 0))
        .collect();
    for r in &reports {
        *counts.entry(r.pattern.status.bucket().to_string()).or_insert(0) += 1;
    }
    let uncertain: Vec<&PatternReport> = reports
        .iter()
        .filter(|r| r.pattern.status == Disposition::Uncertain)
        .collect();
    let splits: Vec<usize> = uncertain.iter().map(|r| refine(&r.pattern).len()).collect();
    let refined: usize = splits.iter().sum();
    let discrepancy = (uncertain.len() != REFERENCE_UNCERTAIN_COUNT || refined != REFERENCE_REFINED_COUNT).then(|| {
        let mut reasons = BTreeMap::new();
        for r in &uncertain {
            *reasons.entry(uncertain_reason_class(r)).or_insert(0) += 1;
        }
        Discrepancy {
            uncertain: uncertain.len(),
            expected_uncertain: REFERENCE_UNCERTAIN_COUNT,
            refined,
            expected_refined: REFERENCE_REFINED_COUNT,
            per_pattern: uncertain
                .iter()
                .zip(&splits)
                .map(|(r, k)| {
                    format!(
                        "{}: {} [{}]; splits into {k}",
                        r.pattern,
                        r.reason,
                        uncertain_reason_class(r)
                    )
                })
                .collect(),
            reasons,
        }
    });
    SortReport {
        config: *cfg,
        total: reports.len(),
        counts,
        patterns: reports,
        discrepancy,
        metadata: SortMetadata {
            wall_clock_ms: start.elapsed().as_millis(),
            per_pattern_ms,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cond(a: char, t: &str) -> AngleCondition {
        AngleCondition::new(crate::labels::vertex_index(a).unwrap() as u8, t.parse().unwrap()).unwrap()
    }

    #[test]
    fn seventy_five_anchored_conditions() {
        let all = enumerate_angle_conditions();
        assert_eq!(all.len(), 75);
        assert_eq!(all.iter().filter(|c| c.triple == "3A".parse().unwrap()).count(), 1);
        assert_eq!(all.iter().filter(|c| c.triple == "A+B+C".parse().unwrap()).count(), 3);
        assert_eq!(reduced_triples().len(), 30);
    }

    #[test]
    fn pattern_counts() {
        assert_eq!(enumerate_candidate_patterns(&ReductionRules::default()).len(), 465);
        let raw = ReductionRules {
            dedup: false,
            dihedral: false,
        };
        assert_eq!(enumerate_candidate_patterns(&raw).len(), 900);
        let d5 = ReductionRules {
            dedup: true,
            dihedral: true,
        };
        let n = enumerate_candidate_patterns(&d5).len();
        assert!(n < 465 && n > 465 / 10, "{n}");
    }

    #[test]
    fn anchors_are_distinct() {
        for p in enumerate_candidate_patterns(&ReductionRules::default()) {
            assert_ne!(p.v1.anchor, p.v2.anchor, "{p}");
            assert!(p.v1.triple.contains(p.v1.anchor) && p.v2.triple.contains(p.v2.anchor));
        }
    }

    #[test]
    fn three_equal_corners_force_flanking_edges() {
        assert_eq!(forced_partition(&cond('A', "3A")), partition_from_pairs(&[(0, 4)]));
        assert_eq!(forced_partition(&cond('A', "A+B+D")), DISCRETE);
    }

    #[test]
    fn partition_lattice() {
        let p = partition_from_pairs(&[(0, 2)]);
        let q = partition_from_pairs(&[(2, 4)]);
        assert_eq!(join(&p, &q), partition_from_pairs(&[(0, 2), (2, 4)]));
        assert_eq!(meet(&p, &q), DISCRETE);
        assert!(refines(&DISCRETE, &p));
        assert!(!refines(&p, &q));
        assert_eq!(describe_partition(&join(&p, &q)), "a=c=e");
    }

    #[test]
    fn refinement_is_finer_than_nothing_and_coarser_than_forced() {
        for p in enumerate_candidate_patterns(&ReductionRules::default()).iter().take(60) {
            for r in refine(p) {
                assert!(refines(&p.edges, &r.edges), "{p} -> {r}");
            }
        }
    }

    #[test]
    fn hypotheses_parse() {
        let cs = parse_hypotheses("a=c, A+B+D=360; c = b + d").unwrap();
        assert_eq!(cs.edge_classes, vec![vec![0, 2]]);
        assert_eq!(cs.angle_relations[0].coef, [1, 1, 0, 1, 0]);
        assert_eq!(cs.edge_relations.len(), 1);
        assert!(parse_hypotheses(" , ").is_err());
        assert!(parse_hypotheses("a=q").is_err());
    }

    #[test]
    fn contradictory_pattern_is_infeasible() {
        let p = CandidatePattern::new(0, cond('A', "2A+B"), cond('B', "A+2B"));
        let extra = parse_hypotheses("A+B+C=180").unwrap();
        let cs = p.constraints().merged(&extra);
        match solve_candidate(&p, &extra, &SolveOptions::default()).unwrap() {
            SolveOutcome::Infeasible { certificate } => assert!(certificate.verify(&cs)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn equilateral_family_from_two_triple_conditions() {
        let p = CandidatePattern::new(0, cond('A', "3A"), cond('B', "3B"));
        let out = solve_candidate(&p, &ConstraintSet::default(), &SolveOptions::default()).unwrap();
        let fam = out.family().unwrap();
        assert!(fam.dimension > 0);
        assert!(fam.samples.iter().all(|s| (s.angles.0[0] - 120.0).abs() < 1e-9));
    }

    #[test]
    fn type_row_pattern_lands_in_matches_type() {
        // 2A + B = 360 and C + 2D = 360 with a=b=c=e is the type 8 row.
        let p = CandidatePattern::new(0, cond('A', "2A+B"), cond('C', "C+2D"));
        let p = with_hypotheses(&p, &parse_hypotheses("a=b=c=e").unwrap());
        let r = sort_pattern(&p, &TypeTable::shipped(), &SortConfig::default());
        assert_eq!(
            r.pattern.status,
            Disposition::MatchesType {
                types: vec!["8".into()]
            },
            "{}",
            r.reason
        );
    }
}
