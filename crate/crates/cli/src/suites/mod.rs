//! Named verification suites.

mod algebra;
mod composition;
mod dynloc;
mod fedosov;
mod lattice;
mod rce_derivative;

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::SuiteConfig;
use crate::report::{Case, Semantics, Status, SuiteReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteInfo {
    pub name: &'static str,
    pub description: &'static str,
}

const SUITES: [SuiteInfo; 6] = [
    SuiteInfo {
        name: "algebra",
        description: "poisson_bracket, quasi-free states, ideal_reduce, quantum_ideal_reduce and kappa round trips",
    },
    SuiteInfo {
        name: "fedosov",
        description: "star_product vs star_connection vs star_fedosov, Koszul and Fedosov differential identities",
    },
    SuiteInfo {
        name: "lattice",
        description: "shift automorphisms, exact rce identities, divergence_residual convergence, chart field and commutators, tilde_stress",
    },
    SuiteInfo {
        name: "rce-derivative",
        description: "rce_derivative_fd against the stress-energy prediction under refinement",
    },
    SuiteInfo {
        name: "dynloc",
        description: "dynloc_fixed_test on complement perturbations, kin_dyn_witness, violation witnesses",
    },
    SuiteInfo {
        name: "composition",
        description: "split composition isomorphism and null_corank_estimate single vs split",
    },
];

/// Suites in a fixed order.
pub fn list_suites() -> &'static [SuiteInfo] {
    &SUITES
}

/// An acceptance check: the cases of one suite that must all pass.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Criterion {
    pub title: &'static str,
    pub suite: &'static str,
    pub cases: &'static [&'static str],
}

pub const CRITERIA: [Criterion; 12] = [
    Criterion { title: "star-product triality", suite: "fedosov", cases: &["star_product_triality"] },
    Criterion {
        title: "Fedosov structure",
        suite: "fedosov",
        cases: &["koszul_identities", "fedosov_differential", "connection_torsion_flatness_compatibility"],
    },
    Criterion {
        title: "bracket and state layer",
        suite: "algebra",
        cases: &["poisson_jacobi_leibniz", "bracket_derivative_oracle", "state_admissibility"],
    },
    Criterion {
        title: "quotient correctness",
        suite: "algebra",
        cases: &["classical_quotient", "quantum_quotient", "kappa_round_trips"],
    },
    Criterion {
        title: "automorphism dichotomy",
        suite: "lattice",
        cases: &["shift_automorphisms", "sign_flip_obstruction", "shift_commutes_with_rce"],
    },
    Criterion {
        title: "composition",
        suite: "composition",
        cases: &["split_isomorphism", "corank_single", "corank_split"],
    },
    Criterion {
        title: "discrete-exact rce identities",
        suite: "lattice",
        cases: &["rce_zero_is_identity", "rce_fixes_constants", "rce_source_closed_form"],
    },
    Criterion {
        title: "rce derivative vs stress-energy",
        suite: "rce-derivative",
        cases: &["rce_derivative_relative_error", "rce_derivative_order"],
    },
    Criterion { title: "non-conservation law", suite: "lattice", cases: &["divergence_ratio_coarse", "divergence_ratio_fine"] },
    Criterion {
        title: "dynamical locality",
        suite: "dynloc",
        cases: &["dynloc_fixed", "kin_dyn_witness", "dynloc_violation_witness"],
    },
    Criterion {
        title: "quantum field contract",
        suite: "lattice",
        cases: &["field_equation_in_chart", "commutator_reproduces_form", "hollands_wald_ideal"],
    },
    Criterion { title: "gauge variant", suite: "lattice", cases: &["gauge_invariant_stress", "stress_shift_defect"] },
];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RunError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteRun {
    pub report: SuiteReport,
    pub artifacts: Vec<Artifact>,
}

impl SuiteRun {
    /// Writes the JSON report, the case table and every artifact into `dir`.
    pub fn write(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let stem = self.report.suite.replace('-', "_");
        let mut files = vec![
            (format!("{stem}.json"), self.report.to_json()),
            (format!("{stem}_cases.csv"), self.report.cases_csv()),
        ];
        files.extend(self.artifacts.iter().map(|a| (a.name.clone(), a.contents.clone())));
        let mut out = Vec::new();
        for (name, contents) in files {
            let path = dir.join(name);
            fs::write(&path, contents)?;
            out.push(path);
        }
        Ok(out)
    }
}

/// Outcome of one measured quantity.
pub(crate) struct Measured {
    pub value: f64,
    pub note: Option<String>,
}

impl From<f64> for Measured {
    fn from(value: f64) -> Self {
        Measured { value, note: None }
    }
}

pub(crate) type CaseResult = Result<Measured, String>;

/// Failure counts accumulated by exact checks.
#[derive(Default)]
pub(crate) struct Tally {
    failures: usize,
    first: Option<String>,
}

impl Tally {
    pub fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(what());
            }
        }
    }

    pub fn finish(self) -> CaseResult {
        Ok(Measured { value: self.failures as f64, note: self.first.map(|w| format!("first failure: {w}")) })
    }
}

pub(crate) struct Runner<'a> {
    pub cfg: &'a SuiteConfig,
    cases: Vec<Case>,
    artifacts: Vec<Artifact>,
}

/// Stable 64-bit FNV-1a of a case name.
fn name_hash(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// How a case's tolerance may be overridden.
#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Kind {
    /// Exact count or equality; tolerance is fixed.
    Exact,
    /// Floating defect against zero; the global tolerance applies.
    Floating,
    /// Range or bound on an observed quantity; only per-case overrides.
    Bound,
}

impl<'a> Runner<'a> {
    fn new(cfg: &'a SuiteConfig) -> Self {
        Runner { cfg, cases: Vec::new(), artifacts: Vec::new() }
    }

    /// Generator for a case, independent of which other cases run.
    pub fn rng(&self, case: &str) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.cfg.seed ^ name_hash(case))
    }

    pub fn artifact(&mut self, name: impl Into<String>, contents: String) {
        self.artifacts.push(Artifact { name: name.into(), contents });
    }

    /// Runs `f` and records a case; errors fail the case with a note.
    pub fn case(
        &mut self,
        name: &str,
        kind: Kind,
        semantics: Semantics,
        expected: f64,
        default_tolerance: f64,
        f: impl FnOnce(&mut ChaCha8Rng) -> CaseResult,
    ) {
        let tolerance = match kind {
            Kind::Exact => self.cfg.tolerances.get(name).copied().unwrap_or(default_tolerance),
            Kind::Floating => self.cfg.tolerance(name, default_tolerance, true),
            Kind::Bound => self.cfg.tolerance(name, default_tolerance, false),
        };
        let mut rng = self.rng(name);
        let start = Instant::now();
        let outcome = f(&mut rng);
        let runtime_ms = if self.cfg.timings { start.elapsed().as_millis() as u64 } else { 0 };
        let (value, note) = match outcome {
            Ok(m) => (m.value, m.note),
            Err(e) => (f64::NAN, Some(e)),
        };
        let status = if semantics.holds(value, expected, tolerance) { Status::Pass } else { Status::Fail };
        self.cases.push(Case { name: name.to_string(), status, value, expected, tolerance, semantics, runtime_ms, note });
    }

    pub fn skip(&mut self, name: &str, semantics: Semantics, expected: f64, note: &str) {
        self.cases.push(Case {
            name: name.to_string(),
            status: Status::Skip,
            value: f64::NAN,
            expected,
            tolerance: 0.0,
            semantics,
            runtime_ms: 0,
            note: Some(note.to_string()),
        });
    }

    /// Exact case counting failed checks.
    pub fn exact(&mut self, name: &str, f: impl FnOnce(&mut ChaCha8Rng) -> CaseResult) {
        self.case(name, Kind::Exact, Semantics::Exact, 0.0, 0.0, f);
    }

    /// Floating defect that must stay within `tol` of zero.
    pub fn defect(&mut self, name: &str, tol: f64, f: impl FnOnce(&mut ChaCha8Rng) -> CaseResult) {
        self.case(name, Kind::Floating, Semantics::Within, 0.0, tol, f);
    }
}

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<SuiteRun, RunError> {
    let mut r = Runner::new(cfg);
    match name {
        "algebra" => algebra::run(&mut r),
        "fedosov" => fedosov::run(&mut r),
        "lattice" => lattice::run(&mut r),
        "rce-derivative" => rce_derivative::run(&mut r),
        "dynloc" => dynloc::run(&mut r),
        "composition" => composition::run(&mut r),
        other => return Err(RunError::UnknownSuite(other.to_string())),
    }
    let report = SuiteReport { suite: name.to_string(), seed: cfg.seed, cases: r.cases };
    Ok(SuiteRun { report, artifacts: r.artifacts })
}

pub(crate) fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}
