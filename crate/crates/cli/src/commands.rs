//! Subcommand implementations. Every command writes its report into a
//! string so the output can be compared byte for byte.

use std::fmt::Write as _;
use std::path::PathBuf;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wickstat_core::fock::{self, null_quotient, positivity_report, verify_representation, Positivity};
use wickstat_core::freealg::{check_hexagons, parse_poly};
use wickstat_core::hopf::{
    bicharacter_to_cqt, check_algebra, check_antipode, check_bialgebra, check_coalgebra, check_cqt, make_group_hopf,
    verify_structure_theorem, HopfModule,
};
use wickstat_core::scalar::{self, Scalar};
use wickstat_core::wick::{
    check_commutation_relations, check_star_twist, check_twist_axioms, normal_order, verify_associativity_iff_twist, Order,
};
use wickstat_core::{build_fock, Alphabet, GradedPoly, Report, TwistSpec};

use crate::{CliError, SystemConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    CheckBicharacter,
    CheckHopf,
    CheckTwist,
    NormalOrder(String),
    Gram(usize),
    FockExport { cutoff: usize, dir: PathBuf },
    VerifyAll,
}

/// Appends report lines and stops at the first failure.
struct Sink<'a> {
    out: &'a mut String,
    failed: bool,
}

impl Sink<'_> {
    /// Returns `false` once a report has failed.
    fn check(&mut self, r: &Report) -> bool {
        if !self.failed {
            let _ = writeln!(self.out, "{r}");
            self.failed = !r.passed;
        }
        !self.failed
    }

    fn info(&mut self, line: impl AsRef<str>) {
        if !self.failed {
            let _ = writeln!(self.out, "INFO {}", line.as_ref());
        }
    }
}

/// Runs `cmd` and appends its output to `out`. Returns whether every check
/// passed.
pub fn run_subcommand(cmd: &Command, cfg: &SystemConfig, out: &mut String) -> Result<bool, CliError> {
    let mut sink = Sink { out, failed: false };
    match cmd {
        Command::CheckBicharacter => bicharacter_checks(cfg, &mut sink)?,
        Command::CheckHopf => hopf_checks(cfg, &mut sink)?,
        Command::CheckTwist => twist_checks(cfg, &mut sink)?,
        Command::NormalOrder(expr) => {
            let t = cfg.twist()?;
            let p = parse_poly(expr, t.alphabet())?;
            let nf = normal_order(&t, &p, Order::Leftmost)?;
            let _ = writeln!(sink.out, "{}", nf.poly.render(t.alphabet()));
        }
        Command::Gram(max_degree) => {
            let t = cfg.twist()?;
            let f = build_fock(&t, (*max_degree).max(1))?;
            for d in 0..=*max_degree {
                let g = f.gram(d).expect("degree within cutoff");
                let _ = writeln!(sink.out, "gram[{d}] = {}", render_matrix(g));
            }
        }
        Command::FockExport { cutoff, dir } => {
            let t = cfg.twist()?;
            let f = build_fock(&t, *cutoff)?;
            std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
            for (name, body) in fock::export_csv(&f) {
                let path = dir.join(&name);
                std::fs::write(&path, body).map_err(|e| io_error(&path, e))?;
                let _ = writeln!(sink.out, "WROTE {name}");
            }
        }
        Command::VerifyAll => {
            let steps: [fn(&SystemConfig, &mut Sink) -> Result<(), CliError>; 4] =
                [bicharacter_checks, hopf_checks, twist_checks, fock_checks];
            for step in steps {
                step(cfg, &mut sink)?;
                if sink.failed {
                    break;
                }
            }
        }
    }
    Ok(!sink.failed)
}

fn io_error(path: &std::path::Path, e: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn render_matrix(m: &DMatrix<Scalar>) -> String {
    let rows: Vec<String> = (0..m.nrows())
        .map(|r| {
            let cells: Vec<String> = (0..m.ncols()).map(|c| scalar::format_coefficient(m[(r, c)])).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

fn verdict_report(name: &str, holds: bool, residual: f64, witness: Option<String>) -> Report {
    let mut r = Report::pass(name);
    r.passed = holds;
    r.max_residual = residual;
    r.witness = witness;
    r.cases = 1;
    r
}

fn bicharacter_checks(cfg: &SystemConfig, sink: &mut Sink) -> Result<(), CliError> {
    let b = &cfg.bicharacter;
    let torsion = b.validate_torsion();
    let witness = torsion.witness.map(|(i, j)| format!("({i},{j})"));
    if !sink.check(&verdict_report("bicharacter.torsion", torsion.holds, torsion.residual, witness)) {
        return Ok(());
    }
    let norm = b.is_normalized();
    sink.info(format!(
        "bicharacter.normalized {} residual={:.3e}",
        if norm.holds { "yes" } else { "no" },
        norm.residual
    ));
    let words = Alphabet::words_up_to(&cfg.alphabet.letters(), 2);
    let mut parts = Vec::new();
    for u in &words {
        for v in &words {
            for w in &words {
                parts.push(check_hexagons(b, &cfg.alphabet, u, v, w)?);
            }
        }
    }
    sink.check(&Report::combine("hexagon", &parts));
    Ok(())
}

fn hopf_checks(cfg: &SystemConfig, sink: &mut Sink) -> Result<(), CliError> {
    let h = make_group_hopf(&cfg.group, cfg.truncation)?.with_tolerance(cfg.tolerance)?;
    sink.info(format!("hopf.basis dim={}", h.dim()));
    for r in [check_algebra(&h), check_coalgebra(&h), check_bialgebra(&h), check_antipode(&h)] {
        if !sink.check(&r) {
            return Ok(());
        }
    }
    let cqt = bicharacter_to_cqt(&cfg.bicharacter, cfg.truncation)?;
    if !sink.check(&check_cqt(&cqt)) {
        return Ok(());
    }
    if !cfg.group.is_finite() {
        // a truncated slice of kZ^r is not closed under the action
        sink.info("structure_theorem skipped: grading group is infinite");
        return Ok(());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let free = HopfModule::free(h, 2)?;
    let n = free.dim();
    let p = loop {
        let p = DMatrix::from_fn(n, n, |_, _| Scalar::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        if wickstat_core::linalg::inverse_condition(&p) > 1e-3 {
            break p;
        }
    };
    let module = free.change_basis(&p)?;
    let st = verify_structure_theorem(&module);
    sink.check(&st.report);
    sink.info(format!("structure.coinvariant_dim={}", st.coinvariant_dim));
    Ok(())
}

fn confluence(t: &TwistSpec, max_len: usize) -> Result<(Report, Report), CliError> {
    let mut conf = Report::pass("confluence");
    let mut term = Report::pass("termination");
    for w in Alphabet::words_up_to(&t.alphabet().letters(), max_len) {
        let p = GradedPoly::word(w.clone());
        let l = normal_order(t, &p, Order::Leftmost)?;
        let r = normal_order(t, &p, Order::Rightmost)?;
        let d = l.poly.as_poly().relative_distance(r.poly.as_poly());
        conf.cases += 1;
        conf.max_residual = conf.max_residual.max(d);
        if !(d <= t.tolerance()) && conf.passed {
            conf.passed = false;
            conf.witness = Some(t.alphabet().render_word(&w));
        }
        term.cases += 1;
        if (l.depth > l.bound || r.depth > r.bound || l.bound > w.len() * w.len()) && term.passed {
            term.passed = false;
            term.witness = Some(t.alphabet().render_word(&w));
        }
    }
    Ok((conf, term))
}

fn twist_checks(cfg: &SystemConfig, sink: &mut Sink) -> Result<(), CliError> {
    let t = cfg.twist()?;
    let max_len = cfg.max_len;
    let iff = verify_associativity_iff_twist(&t, max_len.min(3));
    let (conf, term) = confluence(&t, max_len)?;
    let reports = [
        check_twist_axioms(&t, max_len),
        check_star_twist(&t, max_len),
        iff.associativity.clone(),
        iff.report(),
        check_commutation_relations(&t),
        conf,
        term,
    ];
    for r in &reports {
        if !sink.check(r) {
            break;
        }
    }
    Ok(())
}

fn fock_checks(cfg: &SystemConfig, sink: &mut Sink) -> Result<(), CliError> {
    let cutoff = cfg.cutoff.ok_or(CliError::MissingSection("fock"))?;
    let t = cfg.twist()?;
    let f = build_fock(&t, cutoff)?;
    let mut indefinite = None;
    for p in positivity_report(&f, cutoff) {
        if indefinite.is_none() && matches!(p.verdict, Positivity::Indefinite { .. }) {
            indefinite = Some(format!("degree={}", p.degree));
        }
        if !sink.failed {
            let _ = writeln!(sink.out, "{p}");
        }
    }
    let positive = verdict_report("positivity", indefinite.is_none(), 0.0, indefinite);
    if !sink.check(&positive) || !sink.check(&verify_representation(&f)) {
        return Ok(());
    }
    for i in 0..t.alphabet().len() {
        let own = t.bicharacter().eval(t.alphabet().base_grade(i), t.alphabet().base_grade(i))?;
        if scalar::close(own, -scalar::one(), t.tolerance()) {
            let r = fock::check_nilpotent(&f, i);
            let mut r = Report::combine(format!("rep.nilpotent.{}", t.alphabet().name(i)), &[r]);
            r.cases = r.cases.max(1);
            if !sink.check(&r) {
                return Ok(());
            }
        }
    }
    let q = null_quotient(&f)?;
    let dims: Vec<String> = q.dims().iter().map(|d| d.to_string()).collect();
    sink.info(format!("quotient.dims=({})", dims.join(",")));
    let mut r = verify_representation(&q);
    r.name = "quotient.representation".into();
    sink.check(&r);
    Ok(())
}
