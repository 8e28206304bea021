use std::fmt;

/// Outcome of a verification: the largest residual seen and the first
/// failing witness, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub name: String,
    pub passed: bool,
    pub max_residual: f64,
    pub witness: Option<String>,
    /// Number of instances checked.
    pub cases: usize,
    /// Instances skipped because a product left a truncated basis slice.
    pub truncation_artifacts: usize,
}

impl Report {
    pub fn pass(name: impl Into<String>) -> Self {
        Report {
            name: name.into(),
            passed: true,
            max_residual: 0.0,
            witness: None,
            cases: 0,
            truncation_artifacts: 0,
        }
    }

    pub fn fail(name: impl Into<String>, witness: impl Into<String>) -> Self {
        Report {
            passed: false,
            witness: Some(witness.into()),
            ..Report::pass(name)
        }
    }

    /// Folds several reports into one: passes iff all pass, keeps the first
    /// witness.
    pub fn combine(name: impl Into<String>, parts: &[Report]) -> Self {
        let mut out = Report::pass(name);
        for p in parts {
            out.passed &= p.passed;
            out.max_residual = out.max_residual.max(p.max_residual);
            out.cases += p.cases;
            out.truncation_artifacts += p.truncation_artifacts;
            if out.witness.is_none() && !p.passed {
                out.witness = Some(match &p.witness {
                    Some(w) => format!("{}:{}", p.name, w),
                    None => p.name.clone(),
                });
            }
        }
        out
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CHECK {} {} residual={:.3e} witness={}",
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.max_residual,
            self.witness.as_deref().unwrap_or("-"),
        )?;
        if self.truncation_artifacts > 0 {
            write!(f, " truncation_artifacts={}", self.truncation_artifacts)?;
        }
        Ok(())
    }
}

/// Accumulates residuals against a tolerance.
#[derive(Debug)]
pub(crate) struct Tracker {
    report: Report,
    tol: f64,
}

impl Tracker {
    pub fn new(name: impl Into<String>, tol: f64) -> Self {
        Tracker {
            report: Report::pass(name),
            tol,
        }
    }

    pub fn record(&mut self, residual: f64, witness: impl FnOnce() -> String) {
        self.report.cases += 1;
        // NaN counts as failure
        let bad = !(residual <= self.tol);
        if residual > self.report.max_residual || residual.is_nan() {
            self.report.max_residual = residual;
        }
        if bad && self.report.passed {
            self.report.passed = false;
            self.report.witness = Some(witness());
        }
    }

    pub fn artifact(&mut self) {
        self.report.truncation_artifacts += 1;
    }

    pub fn finish(self) -> Report {
        self.report
    }
}
