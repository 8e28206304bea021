//! TOML system configuration.
//!
//! ```toml
//! [group]
//! free_rank = 1
//! torsion_orders = []
//!
//! [bicharacter]
//! gen_table = [[0.5]]          # numbers or "re+imj" strings
//!
//! [[generator]]
//! name = "x"
//! grade = [1]
//!
//! [wick]
//! pairing = [[1]]              # optional, identity by default
//!
//! [fock]
//! cutoff = 5
//!
//! [check]
//! tolerance = 1e-9
//! seed = 0
//! ```

use nalgebra::DMatrix;
use serde::Deserialize;
use wickstat_core::scalar::{self, Scalar, DEFAULT_TOLERANCE};
use wickstat_core::{AbelianGroup, Alphabet, Bicharacter, TwistSpec};

use crate::CliError;

/// A complex scalar as written in the config: integer, float, or `re+imj`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum RawScalar {
    Int(i64),
    Float(f64),
    Text(String),
}

impl RawScalar {
    fn value(&self, what: &str) -> Result<Scalar, CliError> {
        match self {
            RawScalar::Int(i) => Ok(scalar::real(*i as f64)),
            RawScalar::Float(x) => Ok(scalar::real(*x)),
            RawScalar::Text(s) => scalar::parse_complex(s)
                .ok_or_else(|| CliError::InvalidValue(format!("{what}: `{s}` is not a complex number"))),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    group: Option<RawGroup>,
    bicharacter: Option<RawBicharacter>,
    #[serde(default)]
    generator: Vec<RawGenerator>,
    wick: Option<RawWick>,
    fock: Option<RawFock>,
    check: Option<RawCheck>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroup {
    free_rank: usize,
    #[serde(default)]
    torsion_orders: Vec<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBicharacter {
    gen_table: Vec<Vec<RawScalar>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGenerator {
    name: String,
    grade: Vec<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWick {
    pairing: Option<Vec<Vec<RawScalar>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFock {
    cutoff: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCheck {
    tolerance: Option<f64>,
    seed: Option<u64>,
    truncation: Option<i64>,
    max_len: Option<usize>,
}

/// Validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub group: AbelianGroup,
    pub bicharacter: Bicharacter,
    pub alphabet: Alphabet,
    pub pairing: DMatrix<Scalar>,
    pub cutoff: Option<usize>,
    pub tolerance: f64,
    pub seed: u64,
    /// Slice bound for `kG` when `G` has free part.
    pub truncation: i64,
    /// Total word length for the exhaustive twist checks.
    pub max_len: usize,
}

impl SystemConfig {
    pub fn twist(&self) -> Result<TwistSpec, CliError> {
        Ok(TwistSpec::new(self.bicharacter.clone(), self.alphabet.clone(), self.pairing.clone())?)
    }

    /// Overrides from the command line.
    pub fn with_overrides(mut self, seed: Option<u64>, tolerance: Option<f64>) -> Result<Self, CliError> {
        if let Some(s) = seed {
            self.seed = s;
        }
        if let Some(t) = tolerance {
            self.bicharacter = self.bicharacter.with_tolerance(t)?;
            self.tolerance = t;
        }
        Ok(self)
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |p| p + 1) + 1;
    (line, col)
}

fn matrix(rows: &[Vec<RawScalar>], n: usize, what: &str) -> Result<Vec<Vec<Scalar>>, CliError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Shape(format!("{what} must be {n}x{n}")));
    }
    rows.iter()
        .map(|r| r.iter().map(|v| v.value(what)).collect())
        .collect()
}

pub fn parse_config(text: &str) -> Result<SystemConfig, CliError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let (line, col) = e.span().map_or((0, 0), |s| line_col(text, s.start));
        CliError::Syntax {
            line,
            col,
            message: e.message().to_string(),
        }
    })?;
    let g = raw.group.ok_or(CliError::MissingSection("group"))?;
    let b = raw.bicharacter.ok_or(CliError::MissingSection("bicharacter"))?;
    if raw.generator.is_empty() {
        return Err(CliError::MissingSection("generator"));
    }

    let group = AbelianGroup::new(g.free_rank, g.torsion_orders)?;
    let table = matrix(&b.gen_table, group.rank(), "bicharacter.gen_table")?;
    let check = raw.check.unwrap_or(RawCheck {
        tolerance: None,
        seed: None,
        truncation: None,
        max_len: None,
    });
    let tolerance = check.tolerance.unwrap_or(DEFAULT_TOLERANCE);
    let bicharacter = Bicharacter::new(group.clone(), table)?.with_tolerance(tolerance)?;
    let torsion = bicharacter.validate_torsion();
    if !torsion.holds {
        let (i, j) = torsion.witness.unwrap_or_default();
        return Err(CliError::InvalidValue(format!(
            "bicharacter entry [{i}][{j}] is not a root of unity of the generator order"
        )));
    }

    let decls = raw.generator.into_iter().map(|gen| (gen.name, gen.grade)).collect();
    let alphabet = Alphabet::new(group.clone(), decls).map_err(|e| CliError::InvalidValue(e.to_string()))?;
    let n = alphabet.len();
    let pairing = match raw.wick.and_then(|w| w.pairing) {
        Some(rows) => {
            let m = matrix(&rows, n, "wick.pairing")?;
            DMatrix::from_fn(n, n, |i, j| m[i][j])
        }
        None => DMatrix::identity(n, n),
    };
    let truncation = check.truncation.unwrap_or(1);
    if truncation < 1 {
        return Err(CliError::InvalidValue("check.truncation must be at least 1".into()));
    }
    let cfg = SystemConfig {
        group,
        bicharacter,
        alphabet,
        pairing,
        cutoff: raw.fock.map(|f| f.cutoff),
        tolerance,
        seed: check.seed.unwrap_or(0),
        truncation,
        max_len: check.max_len.unwrap_or(4),
    };
    // surfaces pairing errors (shape, grade) at load time
    cfg.twist()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BOSON: &str = r#"
[group]
free_rank = 1

[bicharacter]
gen_table = [[1]]

[[generator]]
name = "x"
grade = [1]

[wick]
pairing = [[1]]
"#;

    #[test]
    fn minimal_boson_is_valid() {
        let cfg = parse_config(BOSON).unwrap();
        assert_eq!(cfg.alphabet.len(), 1);
        assert_eq!(cfg.cutoff, None);
    }

    #[test]
    fn fermion_on_z2_is_valid() {
        let text = r#"
[group]
free_rank = 0
torsion_orders = [2]
[bicharacter]
gen_table = [["-1+0j"]]
[[generator]]
name = "f"
grade = [1]
"#;
        assert!(parse_config(text).is_ok());
    }

    #[test]
    fn zero_entry_is_rejected() {
        let text = BOSON.replace("[[1]]\n\n[[generator]]", "[[0]]\n\n[[generator]]");
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("bicharacter values must be nonzero"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected_with_position() {
        let text = BOSON.replace("free_rank = 1", "free_rank = 1\ncolour = 2");
        match parse_config(&text).unwrap_err() {
            CliError::Syntax { line, .. } => assert!(line >= 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn distinct_codes() {
        let missing = parse_config("[group]\nfree_rank = 1\n").unwrap_err();
        assert!(matches!(missing, CliError::MissingSection("bicharacter")));
        let shape = parse_config(&BOSON.replace("pairing = [[1]]", "pairing = [[1, 0]]")).unwrap_err();
        assert!(matches!(shape, CliError::Shape(_)));
        let torsion = parse_config(
            "[group]\nfree_rank = 0\ntorsion_orders = [2]\n[bicharacter]\ngen_table = [[\"0+1j\"]]\n[[generator]]\nname = \"f\"\ngrade = [1]\n",
        )
        .unwrap_err();
        assert!(matches!(torsion, CliError::InvalidValue(_)));
        let codes = [missing.code(), shape.code(), torsion.code()];
        assert!(codes[0] != codes[1] && codes[1] != codes[2] && codes[0] != codes[2]);
    }
}
