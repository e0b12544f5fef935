//! Theorem sweeps over a corpus of small algebras.
//!
//! Instances for the product-side checks are the pairs and triples (as
//! multisets, in corpus order) of similar algebras whose product carrier is
//! at most `max_product`, each paired with every ultrafilter on the index
//! set. The ultrapower check runs over every algebra of size at most
//! `ultrapower_max_size`, every listed index-set size and every ultrafilter.

use serde::Serialize;

use crate::algebra::Algebra;
use crate::error::Result;
use crate::report::{TheoremId, VerificationReport};
use crate::theorems::{
    verify_collapse, verify_thm1, verify_thm2_sweep, verify_thm3_sweep, VerifyOptions,
};
use crate::ultrafilter::{enumerate_ultrafilters, Ultrafilter};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepConfig {
    pub max_product: usize,
    pub ultrapower_max_size: usize,
    pub ultrapower_index_sizes: Vec<usize>,
    pub verify: VerifyOptions,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            max_product: 81,
            ultrapower_max_size: 4,
            ultrapower_index_sizes: vec![2, 3],
            verify: VerifyOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub theorem: TheoremId,
    pub instances: usize,
    pub failures: usize,
    /// Every instance report, in generation order.
    pub reports: Vec<VerificationReport>,
    pub passed: bool,
}

impl SweepReport {
    fn new(theorem: TheoremId, reports: Vec<VerificationReport>) -> Self {
        let failures = reports.iter().filter(|r| !r.passed).count();
        SweepReport {
            theorem,
            instances: reports.len(),
            failures,
            reports,
            passed: failures == 0,
        }
    }

    pub fn failed(&self) -> impl Iterator<Item = &VerificationReport> {
        self.reports.iter().filter(|r| !r.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sweep report serializes")
    }
}

/// Pairs and triples of similar corpus algebras with bounded product size.
pub fn factor_instances(corpus: &[Algebra], max_product: usize) -> Vec<Vec<Algebra>> {
    let n = corpus.len();
    let similar = |i: usize, j: usize| corpus[i].signature() == corpus[j].signature();
    let size = |ix: &[usize]| {
        ix.iter()
            .try_fold(1usize, |acc, &i| acc.checked_mul(corpus[i].size()))
    };
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            if !similar(i, j) {
                continue;
            }
            if size(&[i, j]).is_some_and(|s| s <= max_product) {
                out.push(vec![corpus[i].clone(), corpus[j].clone()]);
            }
        }
    }
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                if !similar(i, j) || !similar(j, k) {
                    continue;
                }
                if size(&[i, j, k]).is_some_and(|s| s <= max_product) {
                    out.push(vec![
                        corpus[i].clone(),
                        corpus[j].clone(),
                        corpus[k].clone(),
                    ]);
                }
            }
        }
    }
    out
}

fn for_each_instance(
    corpus: &[Algebra],
    cfg: &SweepConfig,
    mut f: impl FnMut(&[Algebra], &Ultrafilter) -> Result<VerificationReport>,
) -> Result<Vec<VerificationReport>> {
    let mut reports = Vec::new();
    for factors in factor_instances(corpus, cfg.max_product) {
        for d in enumerate_ultrafilters(factors.len())? {
            reports.push(f(&factors, &d)?);
        }
    }
    Ok(reports)
}

pub fn sweep_thm1(corpus: &[Algebra], cfg: &SweepConfig) -> Result<SweepReport> {
    let reports = for_each_instance(corpus, cfg, |f, d| verify_thm1(f, d, &cfg.verify))?;
    Ok(SweepReport::new(TheoremId::Thm1, reports))
}

pub fn sweep_thm2(corpus: &[Algebra], cfg: &SweepConfig) -> Result<SweepReport> {
    let reports = for_each_instance(corpus, cfg, |f, d| verify_thm2_sweep(f, d, &cfg.verify))?;
    Ok(SweepReport::new(TheoremId::Thm2, reports))
}

pub fn sweep_collapse(corpus: &[Algebra], cfg: &SweepConfig) -> Result<SweepReport> {
    let reports = for_each_instance(corpus, cfg, |f, d| verify_collapse(f, d, &cfg.verify))?;
    Ok(SweepReport::new(TheoremId::Collapse, reports))
}

pub fn sweep_thm3(corpus: &[Algebra], cfg: &SweepConfig) -> Result<SweepReport> {
    let mut reports = Vec::new();
    for a in corpus
        .iter()
        .filter(|a| a.size() <= cfg.ultrapower_max_size)
    {
        for &n in &cfg.ultrapower_index_sizes {
            for d in enumerate_ultrafilters(n)? {
                reports.push(verify_thm3_sweep(a, &d, &cfg.verify)?);
            }
        }
    }
    Ok(SweepReport::new(TheoremId::Thm3, reports))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn instances_are_similar_and_bounded() {
        let all = corpus::all();
        let inst = factor_instances(&all, 81);
        assert!(!inst.is_empty());
        for f in &inst {
            assert!(f.len() == 2 || f.len() == 3);
            assert!(f.iter().all(|a| a.signature() == f[0].signature()));
            assert!(f.iter().map(Algebra::size).product::<usize>() <= 81);
        }
        let names: Vec<Vec<&str>> = inst
            .iter()
            .map(|f| f.iter().map(Algebra::name).collect())
            .collect();
        assert!(names.contains(&vec!["C3", "C3"]));
        assert!(names.contains(&vec!["S2", "S2", "S2"]));
        assert!(!names.iter().any(|n| n == &vec!["Z6", "Z6", "Z6"]));
    }

    #[test]
    fn small_sweeps_pass() {
        let small = [corpus::s2(), corpus::c3(), corpus::z2()];
        let cfg = SweepConfig {
            max_product: 9,
            ..SweepConfig::default()
        };
        for report in [
            sweep_thm1(&small, &cfg).unwrap(),
            sweep_thm2(&small, &cfg).unwrap(),
            sweep_thm3(&small, &cfg).unwrap(),
            sweep_collapse(&small, &cfg).unwrap(),
        ] {
            assert!(report.passed, "{}", report.to_json());
            assert!(report.instances > 0);
        }
    }
}
