//! Per-level pipeline and the invariant sweep over a range of primes.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::cache::ClassCache;
use crate::eigen::{hasse_bound, split_eigenspaces, SplitReport};
use crate::error::{Error, Result};
use crate::field::{is_prime, PrimeModulus};
use crate::formulas::{
    component_reports, expected_phi_order, gamma_index, phi_group, psi_order, self_pairing,
    ComponentGroupReport, MonodromyPairing,
};
use crate::hecke::{build_hecke, CuspLattice, HeckeMatrix};
use crate::lattice::SmithForm;
use crate::modpoly::ModPolyDb;
use crate::supersingular::{
    enumerate, enumerate_from, expected_class_count, expected_mass, SupersingularClassSet,
};

/// Hecke operators used when none are requested.
pub const DEFAULT_ELLS: [u64; 2] = [2, 3];

/// Everything computed for one level.
#[derive(Debug, Clone)]
pub struct LevelAnalysis {
    pub classes: SupersingularClassSet,
    pub heckes: Vec<HeckeMatrix>,
    pub split: SplitReport,
    pub phi: SmithForm,
    pub reports: Vec<ComponentGroupReport>,
}

#[derive(Debug, Default)]
pub struct Pipeline {
    db: ModPolyDb,
    cache: Option<ClassCache>,
}

impl Pipeline {
    pub fn new(db: ModPolyDb, cache: Option<ClassCache>) -> Self {
        Pipeline { db, cache }
    }

    pub fn modpoly(&self) -> &ModPolyDb {
        &self.db
    }

    pub fn classes(&self, p: PrimeModulus) -> Result<SupersingularClassSet> {
        match &self.cache {
            Some(cache) => cache.get_or_enumerate(p),
            None => enumerate(p),
        }
    }

    pub fn hecke(&self, cs: &SupersingularClassSet, ell: u64) -> Result<HeckeMatrix> {
        validate_ell(ell, cs.p())?;
        build_hecke(cs, &*self.db.get(ell)?)
    }

    pub fn analyze(&self, p: PrimeModulus, ells: &[u64]) -> Result<LevelAnalysis> {
        let classes = self.classes(p)?;
        let heckes = ells
            .iter()
            .map(|&l| self.hecke(&classes, l))
            .collect::<Result<Vec<_>>>()?;
        let split = split_eigenspaces(&classes, &heckes)?;
        let phi = phi_group(&classes);
        let reports = component_reports(&classes, &split.eigenforms)?;
        Ok(LevelAnalysis {
            classes,
            heckes,
            split,
            phi,
            reports,
        })
    }

    /// Run every structural and formula check at one level.
    pub fn check_level(&self, p: PrimeModulus, ells: &[u64]) -> LevelChecks {
        let mut out = LevelChecks {
            p: p.get(),
            outcomes: Vec::new(),
        };
        let cs = match self.classes(p) {
            Ok(cs) => cs,
            Err(e) => {
                out.fail(error_check_name(&e, "enumeration"), e.to_string());
                return out;
            }
        };

        out.record(checks::MASS, cs.mass() == expected_mass(p), || {
            format!("Σ 1/w = {}", cs.mass())
        });
        out.record(checks::CLASS_COUNT, cs.len() == expected_class_count(p), || {
            format!("{} classes, expected {}", cs.len(), expected_class_count(p))
        });
        out.record(checks::FROBENIUS, cs.is_frobenius_stable(), || {
            "class set not closed under conjugation".into()
        });
        if let Some(last) = cs.classes().last() {
            let from_last = self
                .db
                .get(2)
                .and_then(|phi2| enumerate_from(p, &phi2, last.j));
            out.record(
                checks::SEED_INDEPENDENCE,
                from_last.as_ref().is_ok_and(|other| *other == cs),
                || format!("search from j = {} gave {:?}", last.j, from_last.as_ref().map(|s| s.len())),
            );
        }

        let phi = phi_group(&cs);
        let order = expected_phi_order(p.get());
        out.record(
            checks::PHI_ORDER,
            phi.torsion_order() == order && phi.invariant_factors.iter().all(|d| d.bits() > 0),
            || format!("|Φ| = {}, expected {order}", phi.torsion_order()),
        );
        out.record(checks::PHI_CYCLIC, phi.nontrivial().len() <= 1, || {
            format!("Φ factors {:?}", phi.nontrivial())
        });

        let mut heckes = Vec::new();
        for &l in ells.iter().filter(|&&l| l != p.get()) {
            match self.hecke(&cs, l) {
                Ok(m) => {
                    out.record(
                        checks::ROW_SUMS,
                        m.row_sums().iter().all(|&s| s == l + 1),
                        || format!("T_{l} row sums {:?}", m.row_sums()),
                    );
                    out.record(checks::SELF_ADJOINT, m.is_self_adjoint(&cs.weights()), || {
                        format!("T_{l}·diag(w) not symmetric")
                    });
                    heckes.push(m);
                }
                Err(e) => out.fail(error_check_name(&e, "Hecke construction"), e.to_string()),
            }
        }
        for (i, a) in heckes.iter().enumerate() {
            for b in &heckes[i + 1..] {
                out.record(checks::COMMUTATIVITY, a.commutes_with(b), || {
                    format!("T_{} and T_{} do not commute", a.ell(), b.ell())
                });
            }
        }
        if heckes.is_empty() {
            return out;
        }

        let split = match split_eigenspaces(&cs, &heckes) {
            Ok(s) => s,
            Err(e) => {
                out.fail(error_check_name(&e, "eigenform search"), e.to_string());
                return out;
            }
        };
        out.record(checks::RANK_PARTITION, split.accounted_rank() == cs.rank_x(), || {
            format!("{} forms + {:?} ≠ rank {}", split.eigenforms.len(), split.residual_dimensions, cs.rank_x())
        });
        for f in &split.eigenforms {
            for (&l, &a) in &f.eigenvalues {
                out.record(checks::HASSE, a.abs() <= hasse_bound(l), || {
                    format!("a_{l} = {a}")
                });
            }
        }

        let w = MonodromyPairing::for_classes(&cs);
        let x = CuspLattice::for_classes(&cs);
        for f in &split.eigenforms {
            let psi = psi_order(&f.lambda, &w);
            let gamma = gamma_index(&f.lambda, &w, &x);
            let same = matches!((&psi, &gamma), (Ok(a), Ok(b)) if a == b);
            out.record(checks::DUAL_PATH, same, || format!("card Ψ {psi:?} vs γ index {gamma:?}"));
        }
        match component_reports(&cs, &split.eigenforms) {
            Ok(reports) => {
                for r in reports {
                    let total = self_pairing(&r.lambda, &w).ok();
                    out.record(
                        checks::DEGREE_IDENTITY,
                        total.as_ref() == Some(&(&r.modular_degree * &r.psi_order)),
                        || format!("n = {}, card Ψ = {}, Σλ²w = {total:?}", r.modular_degree, r.psi_order),
                    );
                    out.record(
                        checks::COKER_DIVIDES,
                        (&r.psi_order % &r.coker_order).bits() == 0,
                        || format!("coker {} ∤ card Ψ {}", r.coker_order, r.psi_order),
                    );
                }
            }
            Err(e) => out.fail(error_check_name(&e, "component report"), e.to_string()),
        }
        out
    }

    /// Check every prime p with pmin ≤ p ≤ pmax and p ≥ 5, in parallel.
    pub fn sweep(&self, pmin: u64, pmax: u64, ells: &[u64]) -> Result<SweepSummary> {
        let primes: Vec<PrimeModulus> = (pmin.max(5)..=pmax)
            .filter(|&n| is_prime(n))
            .map(PrimeModulus::new)
            .collect::<Result<_>>()?;
        if primes.is_empty() {
            return Err(Error::Usage(format!(
                "range [{pmin}, {pmax}] must contain at least one prime ≥ 5"
            )));
        }
        for &l in ells {
            if !is_prime(l) {
                return Err(Error::Usage(format!("ℓ = {l} is not prime")));
            }
            self.db.get(l)?;
        }
        let levels = primes
            .par_iter()
            .map(|&p| self.check_level(p, ells))
            .collect();
        Ok(SweepSummary { levels })
    }
}

/// Names of the sweep checks, as printed in summaries and failures.
pub mod checks {
    pub const MASS: &str = "mass formula";
    pub const CLASS_COUNT: &str = "class count";
    pub const FROBENIUS: &str = "Frobenius stability";
    pub const SEED_INDEPENDENCE: &str = "seed independence";
    pub const PHI_ORDER: &str = "order of Φ";
    pub const PHI_CYCLIC: &str = "Φ cyclic";
    pub const ROW_SUMS: &str = "Hecke row sum";
    pub const SELF_ADJOINT: &str = "Hecke self-adjointness";
    pub const COMMUTATIVITY: &str = "Hecke commutativity";
    pub const RANK_PARTITION: &str = "rank partition";
    pub const HASSE: &str = "Hasse bound";
    pub const DUAL_PATH: &str = "dual-path card Ψ";
    pub const DEGREE_IDENTITY: &str = "n·card Ψ = Σλ²w";
    pub const COKER_DIVIDES: &str = "coker divides card Ψ";
}

fn error_check_name(e: &Error, fallback: &'static str) -> &'static str {
    match e {
        Error::Invariant { invariant, .. } | Error::Validation { invariant, .. } => invariant,
        _ => fallback,
    }
}

pub fn validate_ell(ell: u64, p: PrimeModulus) -> Result<()> {
    if !is_prime(ell) {
        return Err(Error::Usage(format!("ℓ = {ell} is not prime")));
    }
    if ell == p.get() {
        return Err(Error::Usage(format!("ℓ must differ from p = {p}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub check: &'static str,
    pub passed: bool,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelChecks {
    pub p: u64,
    pub outcomes: Vec<CheckOutcome>,
}

impl LevelChecks {
    fn record(&mut self, check: &'static str, passed: bool, detail: impl FnOnce() -> String) {
        self.outcomes.push(CheckOutcome {
            check,
            passed,
            detail: (!passed).then(detail),
        });
    }

    fn fail(&mut self, check: &'static str, detail: String) {
        self.outcomes.push(CheckOutcome {
            check,
            passed: false,
            detail: Some(detail),
        });
    }

    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }
}

#[derive(Debug, Clone)]
pub struct SweepSummary {
    /// In ascending p.
    pub levels: Vec<LevelChecks>,
}

impl SweepSummary {
    /// Per check: (passed, total).
    pub fn totals(&self) -> BTreeMap<&'static str, (usize, usize)> {
        let mut t: BTreeMap<&'static str, (usize, usize)> = BTreeMap::new();
        for o in self.levels.iter().flat_map(|l| &l.outcomes) {
            let e = t.entry(o.check).or_default();
            e.0 += o.passed as usize;
            e.1 += 1;
        }
        t
    }

    /// (p, check, detail) for every failed check.
    pub fn failures(&self) -> Vec<(u64, &'static str, String)> {
        self.levels
            .iter()
            .flat_map(|l| {
                l.outcomes
                    .iter()
                    .filter(|o| !o.passed)
                    .map(move |o| (l.p, o.check, o.detail.clone().unwrap_or_default()))
            })
            .collect()
    }

    pub fn all_passed(&self) -> bool {
        self.levels.iter().all(LevelChecks::all_passed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn analyze_11() {
        let pipe = Pipeline::default();
        let a = pipe.analyze(PrimeModulus::new(11).unwrap(), &[2]).unwrap();
        assert_eq!(a.reports.len(), 1);
        let r = &a.reports[0];
        assert_eq!(r.psi_order, BigInt::from(5));
        assert_eq!(r.modular_degree, BigInt::from(1));
    }

    #[test]
    fn small_sweep_passes() {
        let s = Pipeline::default().sweep(5, 7, &DEFAULT_ELLS).unwrap();
        assert_eq!(s.levels.iter().map(|l| l.p).collect::<Vec<_>>(), vec![5, 7]);
        assert!(s.all_passed());
        assert!(s.failures().is_empty());
    }

    #[test]
    fn empty_range_is_usage_error() {
        assert!(matches!(
            Pipeline::default().sweep(1, 4, &DEFAULT_ELLS),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn bad_ell() {
        let p = PrimeModulus::new(11).unwrap();
        assert!(validate_ell(4, p).is_err());
        assert!(validate_ell(11, p).is_err());
        assert!(validate_ell(5, p).is_ok());
        assert!(Pipeline::default().analyze(p, &[5]).is_err());
    }

    #[test]
    fn corrupted_modpoly_dir_fails_sweep_checks() {
        let dir = tempfile::tempdir().unwrap();
        // Passes file validation (monic, Kronecker mod 3) but is not Φ₃.
        let bad = crate::modpoly::embedded_phi(3)
            .unwrap()
            .to_text()
            .replace("[3,2] 2232", "[3,2] 2235");
        std::fs::write(dir.path().join("phi_3.txt"), bad).unwrap();
        let pipe = Pipeline::new(ModPolyDb::with_dir(dir.path()), None);
        let s = pipe.sweep(97, 113, &DEFAULT_ELLS).unwrap();
        assert!(!s.all_passed());
        assert!(s.failures().iter().all(|(p, _, _)| (97..=113).contains(p)));
    }
}
