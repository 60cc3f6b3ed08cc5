//! Nonparametric comparison pipeline: pairwise two-sided rank-sum tests,
//! Holm step-down correction, better/indistinguishable/worse verdicts, and
//! average-rank aggregation across problems.

use std::collections::BTreeSet;

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Per-trial best objectives of one algorithm on one problem.
#[derive(Debug, Clone)]
pub struct SampleSet {
    pub algorithm: String,
    pub values: Vec<f64>,
}

impl SampleSet {
    /// Requires at least two finite values.
    pub fn new(algorithm: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidConfig(
                "a sample set needs at least two values".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(
                "sample sets must contain finite values only".into(),
            ));
        }
        Ok(Self {
            algorithm: algorithm.into(),
            values,
        })
    }

    pub fn mean(&self) -> f64 {
        sample_mean(&self.values)
    }

    /// Sample standard deviation (n − 1 denominator).
    pub fn std_dev(&self) -> f64 {
        sample_std(&self.values)
    }
}

pub fn sample_mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mean = sample_mean(values);
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

/// Average ranks of the combined sample (ties share the mean of their
/// positions), returned in input order: `a`'s ranks first, then `b`'s.
fn average_ranks_combined(a: &[f64], b: &[f64]) -> Vec<f64> {
    let combined: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    let mut order: Vec<usize> = (0..combined.len()).collect();
    order.sort_by(|&i, &j| combined[i].partial_cmp(&combined[j]).expect("finite"));
    let mut ranks = vec![0.0; combined.len()];
    let mut pos = 0;
    while pos < order.len() {
        let mut end = pos + 1;
        while end < order.len() && combined[order[end]] == combined[order[pos]] {
            end += 1;
        }
        // Positions pos..end (0-based) share rank (pos+1 + end) / 2.
        let shared = (pos + 1 + end) as f64 / 2.0;
        for &idx in &order[pos..end] {
            ranks[idx] = shared;
        }
        pos = end;
    }
    ranks
}

fn u_statistic(a_ranks: &[f64]) -> f64 {
    let n = a_ranks.len() as f64;
    a_ranks.iter().sum::<f64>() - n * (n + 1.0) / 2.0
}

/// Two-sided Mann-Whitney/Wilcoxon rank-sum p-value.
///
/// Dispatches to exact enumeration when both samples have at most eight
/// values, and to the corrected normal approximation otherwise. Returns a
/// value in `(0, 1]`; completely tied samples give 1 (no evidence).
pub fn rank_sum_test(a: &SampleSet, b: &SampleSet) -> f64 {
    rank_sum_p(&a.values, &b.values)
}

pub fn rank_sum_p(a: &[f64], b: &[f64]) -> f64 {
    if a.len() <= 8 && b.len() <= 8 {
        rank_sum_exact_p(a, b)
    } else {
        rank_sum_normal_p(a, b)
    }
}

/// Exact two-sided p-value by enumerating all C(n+m, n) assignments of the
/// observed (tie-averaged) ranks: the fraction of assignments whose U
/// statistic deviates from nm/2 at least as much as the observed one.
pub fn rank_sum_exact_p(a: &[f64], b: &[f64]) -> f64 {
    let (n, m) = (a.len(), b.len());
    assert!(n + m <= 24, "exact enumeration is for small samples");
    let ranks = average_ranks_combined(a, b);
    let observed = u_statistic(&ranks[..n]);
    let center = n as f64 * m as f64 / 2.0;
    let observed_dev = (observed - center).abs();

    let total = n + m;
    let rank_base: f64 = (n * (n + 1) / 2) as f64;
    let mut extreme: u64 = 0;
    let mut count: u64 = 0;
    // Iterate all n-subsets of the combined positions (Gosper's hack).
    let mut mask: u64 = (1 << n) - 1;
    let limit: u64 = 1 << total;
    while mask < limit {
        let mut rank_sum = 0.0;
        let mut bits = mask;
        while bits != 0 {
            let idx = bits.trailing_zeros() as usize;
            rank_sum += ranks[idx];
            bits &= bits - 1;
        }
        let u = rank_sum - rank_base;
        if (u - center).abs() >= observed_dev - 1e-9 {
            extreme += 1;
        }
        count += 1;
        // Next subset with the same popcount.
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
    }
    extreme as f64 / count as f64
}

/// Two-sided p-value from the normal approximation with tie-corrected
/// variance, continuity correction, and an Edgeworth kurtosis refinement.
///
/// The U distribution is symmetric, so the leading Edgeworth correction is
/// the kurtosis term; it tightens the small-sample tails that the plain
/// normal curve misses.
pub fn rank_sum_normal_p(a: &[f64], b: &[f64]) -> f64 {
    let (n, m) = (a.len() as f64, b.len() as f64);
    let total = n + m;
    let ranks = average_ranks_combined(a, b);
    let observed = u_statistic(&ranks[..a.len()]);
    let center = n * m / 2.0;

    let tie_term = tie_correction(&ranks);
    let variance = n * m / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0)));
    if variance <= 0.0 {
        return 1.0;
    }
    let sigma = variance.sqrt();
    let z = ((observed - center).abs() - 0.5).max(0.0) / sigma;

    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let phi = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let excess_kurtosis = -1.2 * (n * n + m * m + n * m + n + m) / (n * m * (total + 1.0));
    let plain_tail = normal.cdf(-z);
    let corrected = plain_tail + phi * (z * z * z - 3.0 * z) * excess_kurtosis / 24.0;
    // A correction that flips the tail negative is outside its validity
    // range; fall back to the uncorrected tail there.
    let lower_tail = if corrected > 0.0 { corrected } else { plain_tail };
    (2.0 * lower_tail).clamp(f64::MIN_POSITIVE, 1.0)
}

/// Σ (t³ − t) over groups of tied values, from the tie-averaged ranks.
fn tie_correction(ranks: &[f64]) -> f64 {
    let mut sorted = ranks.to_vec();
    sorted.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    let mut term = 0.0;
    let mut pos = 0;
    while pos < sorted.len() {
        let mut end = pos + 1;
        while end < sorted.len() && sorted[end] == sorted[pos] {
            end += 1;
        }
        let t = (end - pos) as f64;
        term += t * t * t - t;
        pos = end;
    }
    term
}

/// Holm step-down decisions: sort p-values ascending, reject the k-th
/// sorted hypothesis while `p ≤ alpha / (m − k + 1)`, accept everything
/// from the first failure on. Returned flags follow the input order.
pub fn holm_adjust(p_values: &[f64], alpha: f64) -> Vec<bool> {
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| p_values[i].partial_cmp(&p_values[j]).expect("p-values are finite"));
    let mut reject = vec![false; m];
    for (k, &idx) in order.iter().enumerate() {
        let threshold = alpha / (m - k) as f64;
        if p_values[idx] <= threshold {
            reject[idx] = true;
        } else {
            break;
        }
    }
    reject
}

/// Holm-adjusted p-values (step-down cumulative maximum of
/// `(m − k + 1)·p`, capped at 1), in input order. Rejecting when the
/// adjusted p is at most alpha reproduces [`holm_adjust`].
pub fn holm_adjusted_p(p_values: &[f64]) -> Vec<f64> {
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| p_values[i].partial_cmp(&p_values[j]).expect("p-values are finite"));
    let mut adjusted = vec![0.0; m];
    let mut running_max: f64 = 0.0;
    for (k, &idx) in order.iter().enumerate() {
        let scaled = ((m - k) as f64 * p_values[idx]).min(1.0);
        running_max = running_max.max(scaled);
        adjusted[idx] = running_max;
    }
    adjusted
}

/// Verdict for one (problem, competitor) pair, from the reference
/// algorithm's point of view.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Reference significantly better.
    Plus,
    /// No significant difference.
    Approx,
    /// Reference significantly worse.
    Minus,
}

impl Verdict {
    pub fn word(&self) -> &'static str {
        match self {
            Verdict::Plus => "plus",
            Verdict::Approx => "approx",
            Verdict::Minus => "minus",
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Verdict::Plus => "+",
            Verdict::Approx => "≈",
            Verdict::Minus => "−",
        }
    }
}

/// Sample sets of every algorithm on one problem.
#[derive(Debug, Clone)]
pub struct ProblemSamples {
    pub problem: String,
    pub samples: Vec<SampleSet>,
}

#[derive(Debug, Clone)]
pub struct VerdictEntry {
    pub problem: String,
    pub competitor: String,
    pub verdict: Verdict,
    pub p_raw: f64,
    pub p_adjusted: f64,
}

/// Per-competitor counts of plus/approx/minus across problems.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerdictCounts {
    pub plus: usize,
    pub approx: usize,
    pub minus: usize,
}

#[derive(Debug, Clone)]
pub struct VerdictMatrix {
    pub reference: String,
    pub entries: Vec<VerdictEntry>,
    /// One row per competitor, in first-seen order.
    pub counts: Vec<(String, VerdictCounts)>,
}

/// Pairwise reference-vs-competitor verdicts with the Holm family scoped
/// per problem across that problem's competitors.
pub fn verdicts(
    reference: &str,
    per_problem: &[ProblemSamples],
    alpha: f64,
) -> Result<VerdictMatrix> {
    let mut entries = Vec::new();
    let mut competitor_order: Vec<String> = Vec::new();
    for block in per_problem {
        let reference_set = block
            .samples
            .iter()
            .find(|s| s.algorithm == reference)
            .ok_or_else(|| {
                Error::MissingData(format!(
                    "reference '{reference}' has no samples on problem '{}'",
                    block.problem
                ))
            })?;
        let competitors: Vec<&SampleSet> = block
            .samples
            .iter()
            .filter(|s| s.algorithm != reference)
            .collect();
        let p_raw: Vec<f64> = competitors
            .iter()
            .map(|c| rank_sum_test(reference_set, c))
            .collect();
        let rejected = holm_adjust(&p_raw, alpha);
        let p_adjusted = holm_adjusted_p(&p_raw);
        for (k, competitor) in competitors.iter().enumerate() {
            let verdict = if !rejected[k] {
                Verdict::Approx
            } else if reference_set.mean() < competitor.mean() {
                Verdict::Plus
            } else if reference_set.mean() > competitor.mean() {
                Verdict::Minus
            } else {
                Verdict::Approx
            };
            if !competitor_order.contains(&competitor.algorithm) {
                competitor_order.push(competitor.algorithm.clone());
            }
            entries.push(VerdictEntry {
                problem: block.problem.clone(),
                competitor: competitor.algorithm.clone(),
                verdict,
                p_raw: p_raw[k],
                p_adjusted: p_adjusted[k],
            });
        }
    }
    let counts = competitor_order
        .into_iter()
        .map(|name| {
            let mut c = VerdictCounts::default();
            for e in entries.iter().filter(|e| e.competitor == name) {
                match e.verdict {
                    Verdict::Plus => c.plus += 1,
                    Verdict::Approx => c.approx += 1,
                    Verdict::Minus => c.minus += 1,
                }
            }
            (name, c)
        })
        .collect();
    Ok(VerdictMatrix {
        reference: reference.to_string(),
        entries,
        counts,
    })
}

/// Average rank per algorithm across problems; rank 1 is the smallest mean
/// on a problem, ties share the average of their positions.
#[derive(Debug, Clone)]
pub struct RankTable {
    pub ranks: Vec<(String, f64)>,
}

/// `per_problem` holds `(problem, [(algorithm, mean best objective)])`.
/// Every algorithm must appear on every problem.
pub fn average_ranks(per_problem: &[(String, Vec<(String, f64)>)]) -> Result<RankTable> {
    if per_problem.is_empty() {
        return Err(Error::MissingData("no problems to rank".into()));
    }
    let algorithms: BTreeSet<&str> = per_problem
        .iter()
        .flat_map(|(_, means)| means.iter().map(|(a, _)| a.as_str()))
        .collect();
    let mut order: Vec<String> = Vec::new();
    for (_, means) in per_problem {
        for (a, _) in means {
            if !order.contains(a) {
                order.push(a.clone());
            }
        }
    }
    let mut totals: Vec<f64> = vec![0.0; order.len()];
    for (problem, means) in per_problem {
        for algorithm in &algorithms {
            if !means.iter().any(|(a, _)| a == algorithm) {
                return Err(Error::MissingData(format!(
                    "algorithm '{algorithm}' has no mean on problem '{problem}'"
                )));
            }
        }
        let mut sorted: Vec<(usize, f64)> = means
            .iter()
            .map(|(a, v)| (order.iter().position(|o| o == a).expect("seen above"), *v))
            .collect();
        sorted.sort_by(|x, y| x.1.partial_cmp(&y.1).expect("finite means"));
        let mut pos = 0;
        while pos < sorted.len() {
            let mut end = pos + 1;
            while end < sorted.len() && sorted[end].1 == sorted[pos].1 {
                end += 1;
            }
            let shared = (pos + 1 + end) as f64 / 2.0;
            for &(algo_idx, _) in &sorted[pos..end] {
                totals[algo_idx] += shared;
            }
            pos = end;
        }
    }
    let problems = per_problem.len() as f64;
    Ok(RankTable {
        ranks: order
            .into_iter()
            .zip(totals)
            .map(|(name, total)| (name, total / problems))
            .collect(),
    })
}

/// One line of the comparison table: per-problem mean and spread for one
/// algorithm, with the verdict and p-values against the reference
/// (absent on the reference's own row).
#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub problem: String,
    pub algorithm: String,
    pub mean: f64,
    pub std_dev: f64,
    pub verdict: Option<Verdict>,
    pub p_raw: Option<f64>,
    pub p_adjusted: Option<f64>,
}

/// The full comparison: per-problem rows, verdict counts, average ranks.
#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub reference: String,
    pub alpha: f64,
    pub rows: Vec<ComparisonRow>,
    pub counts: Vec<(String, VerdictCounts)>,
    pub ranks: RankTable,
}

/// Assemble the comparison report: per-algorithm mean/std on every
/// problem, Holm-adjusted verdicts against `reference`, and average ranks.
pub fn build_comparison(
    per_problem: &[ProblemSamples],
    reference: &str,
    alpha: f64,
) -> Result<ComparisonReport> {
    let matrix = verdicts(reference, per_problem, alpha)?;
    let mut rows = Vec::new();
    for block in per_problem {
        for sample in &block.samples {
            let entry = matrix
                .entries
                .iter()
                .find(|e| e.problem == block.problem && e.competitor == sample.algorithm);
            rows.push(ComparisonRow {
                problem: block.problem.clone(),
                algorithm: sample.algorithm.clone(),
                mean: sample.mean(),
                std_dev: sample.std_dev(),
                verdict: entry.map(|e| e.verdict),
                p_raw: entry.map(|e| e.p_raw),
                p_adjusted: entry.map(|e| e.p_adjusted),
            });
        }
    }
    let means: Vec<(String, Vec<(String, f64)>)> = per_problem
        .iter()
        .map(|block| {
            (
                block.problem.clone(),
                block
                    .samples
                    .iter()
                    .map(|s| (s.algorithm.clone(), s.mean()))
                    .collect(),
            )
        })
        .collect();
    let ranks = average_ranks(&means)?;
    Ok(ComparisonReport {
        reference: reference.to_string(),
        alpha,
        rows,
        counts: matrix.counts,
        ranks,
    })
}

impl ComparisonReport {
    /// Comma-separated rendering with a `#`-prefixed footer block carrying
    /// verdict counts and average ranks. `timestamp` adds a header comment.
    pub fn to_csv(&self, timestamp: Option<&str>) -> String {
        let mut out = String::new();
        if let Some(ts) = timestamp {
            out.push_str(&format!("# generated {ts}\n"));
        }
        out.push_str("problem,algorithm,mean,std,verdict_vs_reference,p_raw,p_adjusted\n");
        for row in &self.rows {
            let (verdict, p_raw, p_adjusted) = match (&row.verdict, row.p_raw, row.p_adjusted) {
                (Some(v), Some(raw), Some(adj)) => {
                    (v.word().to_string(), format!("{raw:.6e}"), format!("{adj:.6e}"))
                }
                _ => ("ref".to_string(), String::new(), String::new()),
            };
            out.push_str(&format!(
                "{},{},{:.6e},{:.6e},{},{},{}\n",
                row.problem, row.algorithm, row.mean, row.std_dev, verdict, p_raw, p_adjusted
            ));
        }
        out.push('\n');
        for (name, c) in &self.counts {
            out.push_str(&format!(
                "# verdicts vs {} for {}: plus={} approx={} minus={}\n",
                self.reference, name, c.plus, c.approx, c.minus
            ));
        }
        let ranks = self
            .ranks
            .ranks
            .iter()
            .map(|(name, rank)| format!("{name}={rank:.2}"))
            .collect::<Vec<_>>()
            .join(" ");
        out.push_str(&format!("# avg_rank: {ranks}\n"));
        out
    }

    /// Aligned plain-text table with the paper-style verdict symbols.
    pub fn to_text(&self, timestamp: Option<&str>) -> String {
        let mut out = String::new();
        if let Some(ts) = timestamp {
            out.push_str(&format!("generated {ts}\n"));
        }
        out.push_str(&format!(
            "reference: {}   alpha: {}\n\n",
            self.reference, self.alpha
        ));
        let header = format!(
            "{:<12} {:<12} {:>14} {:>14}  {:<3} {:>12}",
            "problem", "algorithm", "mean", "std", "", "p_adj"
        );
        out.push_str(&header);
        out.push('\n');
        out.push_str(&"-".repeat(header.len()));
        out.push('\n');
        for row in &self.rows {
            let symbol = row.verdict.map_or("ref", |v| v.symbol());
            let p_adj = row
                .p_adjusted
                .map_or(String::new(), |p| format!("{p:.4e}"));
            out.push_str(&format!(
                "{:<12} {:<12} {:>14.6e} {:>14.6e}  {:<3} {:>12}\n",
                row.problem, row.algorithm, row.mean, row.std_dev, symbol, p_adj
            ));
        }
        out.push('\n');
        for (name, c) in &self.counts {
            out.push_str(&format!(
                "(+/≈/−) {} vs {}: {}/{}/{}\n",
                self.reference, name, c.plus, c.approx, c.minus
            ));
        }
        out.push_str("avg rank:");
        for (name, rank) in &self.ranks.ranks {
            out.push_str(&format!("  {name}={rank:.2}"));
        }
        out.push('\n');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn set(name: &str, values: &[f64]) -> SampleSet {
        SampleSet::new(name, values.to_vec()).unwrap()
    }

    #[test]
    fn identical_samples_give_p_one() {
        let a = set("a", &[1.0, 2.0, 3.0]);
        let b = set("b", &[1.0, 2.0, 3.0]);
        assert_eq!(rank_sum_test(&a, &b), 1.0);
    }

    #[test]
    fn two_by_two_exact_case() {
        // Oracle: all C(4,2) = 6 rank assignments; the most extreme U
        // occurs in 2 of 6.
        let a = set("a", &[1.0, 2.0]);
        let b = set("b", &[3.0, 4.0]);
        assert_relative_eq!(rank_sum_test(&a, &b), 1.0 / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn separated_decades_are_significant() {
        // Oracle: exact enumeration of the n = m = 10 rank-sum distribution
        // puts the fully separated arrangement far below 0.001.
        let a: Vec<f64> = (1..=10).map(f64::from).collect();
        let b: Vec<f64> = (11..=20).map(f64::from).collect();
        let p = rank_sum_test(&set("a", &a), &set("b", &b));
        assert!(p < 0.001, "p = {p}");
    }

    #[test]
    fn rank_sum_is_symmetric() {
        let a = set("a", &[1.0, 5.0, 2.5, 7.0, 9.0]);
        let b = set("b", &[2.0, 4.0, 6.0]);
        assert_eq!(rank_sum_test(&a, &b), rank_sum_test(&b, &a));
        let big_a: Vec<f64> = (0..12).map(|k| (k * k) as f64).collect();
        let big_b: Vec<f64> = (0..12).map(|k| (k * 3) as f64 + 0.5).collect();
        let sa = set("a", &big_a);
        let sb = set("b", &big_b);
        assert_eq!(rank_sum_test(&sa, &sb), rank_sum_test(&sb, &sa));
    }

    #[test]
    fn rank_sum_is_invariant_under_monotone_transforms() {
        let a = vec![0.2, 1.4, 0.9, 3.0, 2.2, 0.1];
        let b = vec![1.0, 2.5, 0.4, 5.0, 4.4];
        let p_raw = rank_sum_p(&a, &b);
        let transform = |v: &[f64]| -> Vec<f64> { v.iter().map(|x| (x * 2.0).exp()).collect() };
        let p_transformed = rank_sum_p(&transform(&a), &transform(&b));
        assert_eq!(p_raw, p_transformed);
    }

    #[test]
    fn exact_handles_ties_via_average_ranks() {
        let a = set("a", &[1.0, 2.0, 2.0]);
        let b = set("b", &[2.0, 3.0]);
        let p = rank_sum_test(&a, &b);
        assert!(p > 0.0 && p <= 1.0);
    }

    #[test]
    fn holm_fixture_rejects_only_the_smallest() {
        // Hand-run: thresholds 0.0125, 0.0167, 0.025, 0.05; the chain stops
        // at 0.02 > 0.0167.
        let decisions = holm_adjust(&[0.01, 0.02, 0.03, 0.04], 0.05);
        assert_eq!(decisions, vec![true, false, false, false]);
    }

    #[test]
    fn holm_single_hypothesis_is_plain_alpha_test() {
        assert_eq!(holm_adjust(&[0.001], 0.05), vec![true]);
        assert_eq!(holm_adjust(&[0.06], 0.05), vec![false]);
    }

    #[test]
    fn holm_rejects_none_far_above_alpha() {
        assert_eq!(holm_adjust(&[0.9, 0.8, 0.7], 0.05), vec![false, false, false]);
    }

    #[test]
    fn holm_chain_of_three_rejects_all() {
        // Hand-run with m = 3: thresholds 0.0167, 0.025, 0.05.
        let decisions = holm_adjust(&[0.01, 0.02, 0.03], 0.05);
        assert_eq!(decisions, vec![true, true, true]);
    }

    #[test]
    fn holm_is_monotone_and_matches_adjusted_p() {
        let cases: Vec<Vec<f64>> = vec![
            vec![0.01, 0.02, 0.03, 0.04],
            vec![0.2, 0.01, 0.8, 0.004, 0.05],
            vec![0.5],
            vec![0.03, 0.03, 0.03],
        ];
        for p in cases {
            let reject = holm_adjust(&p, 0.05);
            let adjusted = holm_adjusted_p(&p);
            for i in 0..p.len() {
                assert_eq!(reject[i], adjusted[i] <= 0.05, "case {p:?} index {i}");
                for j in 0..p.len() {
                    if p[i] <= p[j] && reject[j] {
                        assert!(reject[i], "monotonicity broken in {p:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn verdict_hand_run_three_competitors() {
        // Fully separated samples: every pairwise p is far below the Holm
        // thresholds and the reference mean is smallest: three plus.
        let reference: Vec<f64> = (0..30).map(|k| k as f64 * 1e-3).collect();
        let shifted =
            |offset: f64| -> Vec<f64> { (0..30).map(|k| k as f64 * 1e-3 + offset).collect() };
        let block = ProblemSamples {
            problem: "p1".into(),
            samples: vec![
                set("ref", &reference),
                set("c1", &shifted(1.0)),
                set("c2", &shifted(2.0)),
                set("c3", &shifted(3.0)),
            ],
        };
        let matrix = verdicts("ref", &[block], 0.05).unwrap();
        assert_eq!(matrix.entries.len(), 3);
        assert!(matrix.entries.iter().all(|e| e.verdict == Verdict::Plus));
        let total: usize = matrix
            .counts
            .iter()
            .map(|(_, c)| c.plus + c.approx + c.minus)
            .sum();
        assert_eq!(total, 3);
    }

    #[test]
    fn verdict_identical_competitor_is_approx() {
        let vals: Vec<f64> = (0..30).map(|k| (k % 7) as f64).collect();
        let block = ProblemSamples {
            problem: "p1".into(),
            samples: vec![set("ref", &vals), set("same", &vals)],
        };
        let matrix = verdicts("ref", &[block], 0.05).unwrap();
        assert_eq!(matrix.entries[0].verdict, Verdict::Approx);
        assert_eq!(matrix.entries[0].p_raw, 1.0);
    }

    #[test]
    fn verdict_missing_reference_is_reported() {
        let block = ProblemSamples {
            problem: "p1".into(),
            samples: vec![set("a", &[1.0, 2.0, 3.0])],
        };
        assert!(verdicts("ref", &[block], 0.05).is_err());
    }

    #[test]
    fn average_ranks_total_dominance() {
        let table = average_ranks(&[
            ("p1".into(), vec![("a".into(), 1.0), ("b".into(), 2.0)]),
            ("p2".into(), vec![("a".into(), 3.0), ("b".into(), 9.0)]),
        ])
        .unwrap();
        assert_eq!(table.ranks, vec![("a".into(), 1.0), ("b".into(), 2.0)]);
    }

    #[test]
    fn average_ranks_tie_averaging() {
        let table =
            average_ranks(&[("p1".into(), vec![("a".into(), 5.0), ("b".into(), 5.0)])]).unwrap();
        assert_eq!(table.ranks, vec![("a".into(), 1.5), ("b".into(), 1.5)]);
    }

    #[test]
    fn average_ranks_requires_full_grid() {
        let result = average_ranks(&[
            ("p1".into(), vec![("a".into(), 1.0), ("b".into(), 2.0)]),
            ("p2".into(), vec![("a".into(), 1.0)]),
        ]);
        assert!(result.is_err());
    }

    #[test]
    fn comparison_report_renders_rows_and_footer() {
        let better: Vec<f64> = (0..30).map(|k| k as f64 * 1e-3).collect();
        let worse: Vec<f64> = (0..30).map(|k| k as f64 * 1e-3 + 1.0).collect();
        let blocks = vec![
            ProblemSamples {
                problem: "p1".into(),
                samples: vec![set("cde", &better), set("de", &worse)],
            },
            ProblemSamples {
                problem: "p2".into(),
                samples: vec![set("cde", &better), set("de", &worse)],
            },
        ];
        let report = build_comparison(&blocks, "cde", 0.05).unwrap();
        assert_eq!(report.rows.len(), 4);
        assert_eq!(report.ranks.ranks, vec![("cde".into(), 1.0), ("de".into(), 2.0)]);
        assert_eq!(report.counts, vec![("de".into(), VerdictCounts { plus: 2, approx: 0, minus: 0 })]);

        let csv = report.to_csv(None);
        assert!(csv.starts_with("problem,algorithm,mean,std,verdict_vs_reference,p_raw,p_adjusted\n"));
        assert!(csv.contains("p1,cde,"));
        assert!(csv.contains(",ref,,"));
        assert!(csv.contains("plus"));
        assert!(csv.contains("# avg_rank: cde=1.00 de=2.00"));

        let with_ts = report.to_csv(Some("2024-01-01T00:00:00Z"));
        assert!(with_ts.starts_with("# generated 2024-01-01T00:00:00Z\n"));

        let text = report.to_text(None);
        assert!(text.contains('+'));
        assert!(text.contains("avg rank:"));
    }
}
