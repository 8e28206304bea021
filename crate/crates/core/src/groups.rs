//! Finitely generated abelian grading groups `Z^r + Z_m1 + ... + Z_mk` and
//! bicharacters (commutation factors) on them.

use std::fmt;

use rand::Rng;

use crate::scalar::{self, Scalar, DEFAULT_TOLERANCE};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    free_rank: usize,
    torsion_orders: Vec<i64>,
}

/// Coordinates in the generator basis. Torsion slots are kept in `[0, m)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    coords: Vec<i64>,
}

impl GroupElement {
    pub fn coords(&self) -> &[i64] {
        &self.coords
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.coords.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl AbelianGroup {
    pub fn new(free_rank: usize, torsion_orders: Vec<i64>) -> Result<Self> {
        if let Some(&m) = torsion_orders.iter().find(|&&m| m < 2) {
            return Err(Error::InvalidTorsionOrder(m));
        }
        Ok(AbelianGroup {
            free_rank,
            torsion_orders,
        })
    }

    /// `Z^r`
    pub fn free(rank: usize) -> Self {
        AbelianGroup {
            free_rank: rank,
            torsion_orders: Vec::new(),
        }
    }

    /// `Z_n`
    pub fn cyclic(n: i64) -> Result<Self> {
        Self::new(0, vec![n])
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion_orders(&self) -> &[i64] {
        &self.torsion_orders
    }

    /// Number of generators (length of every coordinate vector).
    pub fn rank(&self) -> usize {
        self.free_rank + self.torsion_orders.len()
    }

    /// Order of generator `i`, `None` for free generators.
    pub fn order_of(&self, i: usize) -> Option<i64> {
        i.checked_sub(self.free_rank)
            .and_then(|t| self.torsion_orders.get(t).copied())
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// `|G|` for pure-torsion groups.
    pub fn order(&self) -> Option<i64> {
        self.is_finite()
            .then(|| self.torsion_orders.iter().product())
    }

    pub fn element(&self, coords: &[i64]) -> Result<GroupElement> {
        if coords.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                found: coords.len(),
            });
        }
        let mut coords = coords.to_vec();
        self.reduce(&mut coords);
        Ok(GroupElement { coords })
    }

    fn reduce(&self, coords: &mut [i64]) {
        for (c, m) in coords[self.free_rank..].iter_mut().zip(&self.torsion_orders) {
            *c = c.rem_euclid(*m);
        }
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            coords: vec![0; self.rank()],
        }
    }

    pub fn generator(&self, i: usize) -> GroupElement {
        let mut coords = vec![0; self.rank()];
        coords[i] = 1;
        self.reduce(&mut coords);
        GroupElement { coords }
    }

    pub fn contains(&self, a: &GroupElement) -> bool {
        a.coords.len() == self.rank()
            && a.coords[self.free_rank..]
                .iter()
                .zip(&self.torsion_orders)
                .all(|(c, m)| (0..*m).contains(c))
    }

    fn ensure(&self, a: &GroupElement) -> Result<()> {
        if a.coords.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                found: a.coords.len(),
            });
        }
        Ok(())
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.ensure(a)?;
        self.ensure(b)?;
        let mut coords: Vec<i64> = a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect();
        self.reduce(&mut coords);
        Ok(GroupElement { coords })
    }

    pub fn neg(&self, a: &GroupElement) -> Result<GroupElement> {
        self.ensure(a)?;
        let mut coords: Vec<i64> = a.coords.iter().map(|x| -x).collect();
        self.reduce(&mut coords);
        Ok(GroupElement { coords })
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.add(a, &self.neg(b)?)
    }

    /// `n·a`
    pub fn scale(&self, a: &GroupElement, n: i64) -> Result<GroupElement> {
        self.ensure(a)?;
        let mut coords: Vec<i64> = a.coords.iter().map(|x| x * n).collect();
        self.reduce(&mut coords);
        Ok(GroupElement { coords })
    }

    /// All elements whose free coordinates lie in `[-bound, bound]`, in
    /// lexicographic coordinate order. Torsion coordinates range fully.
    pub fn slice(&self, bound: i64) -> Vec<GroupElement> {
        let ranges: Vec<(i64, i64)> = (0..self.rank())
            .map(|i| match self.order_of(i) {
                Some(m) => (0, m - 1),
                None => (-bound, bound),
            })
            .collect();
        let mut out = Vec::new();
        let mut cur: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        if ranges.iter().any(|(lo, hi)| lo > hi) {
            return out;
        }
        loop {
            out.push(GroupElement { coords: cur.clone() });
            let mut k = self.rank();
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                if cur[k] < ranges[k].1 {
                    cur[k] += 1;
                    for (c, r) in cur[k + 1..].iter_mut().zip(&ranges[k + 1..]) {
                        *c = r.0;
                    }
                    break;
                }
            }
        }
    }

    /// Number of elements in [`AbelianGroup::slice`] without building it.
    pub fn slice_len(&self, bound: i64) -> u128 {
        let free = (2 * bound.max(0) as u128 + 1).pow(self.free_rank as u32);
        self.torsion_orders
            .iter()
            .fold(free, |acc, m| acc.saturating_mul(*m as u128))
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 {
                "Z".into()
            } else {
                format!("Z^{}", self.free_rank)
            });
        }
        parts.extend(self.torsion_orders.iter().map(|m| format!("Z_{m}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Result of a finite predicate check over generator pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict {
    pub holds: bool,
    /// First offending generator pair `(i, j)`.
    pub witness: Option<(usize, usize)>,
    pub residual: f64,
}

/// A commutation factor `ε: G × G → C \ {0}`, stored on generator pairs and
/// extended by `ε(α, β) = ∏ table[i][j]^(α_i β_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bicharacter {
    group: AbelianGroup,
    table: Vec<Vec<Scalar>>,
    tolerance: f64,
}

impl Bicharacter {
    pub fn new(group: AbelianGroup, table: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = group.rank();
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(Error::Shape(format!(
                "bicharacter table must be {n}x{n} for group {group}"
            )));
        }
        for (i, row) in table.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if v.norm() == 0.0 || !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::ZeroBicharacterValue { row: i, col: j });
                }
            }
        }
        Ok(Bicharacter {
            group,
            table,
            tolerance: DEFAULT_TOLERANCE,
        })
    }

    /// `ε ≡ 1`
    pub fn trivial(group: AbelianGroup) -> Self {
        let n = group.rank();
        Bicharacter {
            group,
            table: vec![vec![scalar::one(); n]; n],
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        self.tolerance = scalar::check_tolerance(tolerance)?;
        Ok(self)
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn table(&self) -> &[Vec<Scalar>] {
        &self.table
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn eval(&self, a: &GroupElement, c: &GroupElement) -> Result<Scalar> {
        self.group.ensure(a)?;
        self.group.ensure(c)?;
        let mut acc = scalar::one();
        for (i, ai) in a.coords.iter().enumerate() {
            if *ai == 0 {
                continue;
            }
            for (j, cj) in c.coords.iter().enumerate() {
                if *cj != 0 {
                    acc *= scalar::powi(self.table[i][j], ai * cj);
                }
            }
        }
        Ok(acc)
    }

    /// `ε(α,β) ε(β,α) = 1` on every generator pair; by bilinearity this covers
    /// all of `G × G`.
    pub fn is_normalized(&self) -> Verdict {
        let n = self.group.rank();
        let mut worst = 0.0_f64;
        let mut witness = None;
        for i in 0..n {
            for j in i..n {
                let r = (self.table[i][j] * self.table[j][i] - scalar::one()).norm();
                worst = worst.max(r);
                if r > self.tolerance && witness.is_none() {
                    witness = Some((i, j));
                }
            }
        }
        Verdict {
            holds: witness.is_none(),
            witness,
            residual: worst,
        }
    }

    /// For a torsion generator `e_i` of order `m`, row and column `i` must be
    /// `m`-th roots of unity, otherwise `ε` is not well defined on `G`.
    pub fn validate_torsion(&self) -> Verdict {
        let n = self.group.rank();
        let mut worst = 0.0_f64;
        let mut witness = None;
        for i in 0..n {
            let Some(m) = self.group.order_of(i) else { continue };
            for j in 0..n {
                for (p, q) in [(i, j), (j, i)] {
                    let r = (scalar::powi(self.table[p][q], m) - scalar::one()).norm();
                    worst = worst.max(r);
                    if r > self.tolerance && witness.is_none() {
                        witness = Some((p, q));
                    }
                }
            }
        }
        Verdict {
            holds: witness.is_none(),
            witness,
            residual: worst,
        }
    }
}

/// A random bicharacter that passes [`Bicharacter::validate_torsion`].
///
/// Entries touching a torsion generator are roots of unity of an admissible
/// order; free-free entries are random nonzero complex numbers, or random
/// phases when `unimodular` is set.
pub fn random_bicharacter<R: Rng + ?Sized>(
    group: &AbelianGroup,
    rng: &mut R,
    unimodular: bool,
) -> Bicharacter {
    let n = group.rank();
    let mut table = vec![vec![scalar::one(); n]; n];
    for (i, row) in table.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            let order = match (group.order_of(i), group.order_of(j)) {
                (Some(a), Some(b)) => Some(gcd(a, b)),
                (Some(a), None) | (None, Some(a)) => Some(a),
                (None, None) => None,
            };
            *entry = match order {
                Some(m) => {
                    let k = rng.random_range(0..m);
                    Scalar::from_polar(1.0, std::f64::consts::TAU * k as f64 / m as f64)
                }
                None => {
                    let r = if unimodular { 1.0 } else { rng.random_range(0.5..1.5) };
                    Scalar::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
                }
            };
        }
    }
    Bicharacter::new(group.clone(), table).expect("random table has full shape and nonzero entries")
}

/// A random normalized bicharacter (`ε_ij ε_ji = 1`) that passes
/// [`Bicharacter::validate_torsion`]. Entries are phases; the diagonal is
/// `±1`, with `-1` only where the generator order allows it.
pub fn random_normalized_bicharacter<R: Rng + ?Sized>(group: &AbelianGroup, rng: &mut R) -> Bicharacter {
    let n = group.rank();
    let mut table = vec![vec![scalar::one(); n]; n];
    for i in 0..n {
        let sign_ok = group.order_of(i).is_none_or(|m| m % 2 == 0);
        if sign_ok && rng.random_bool(0.5) {
            table[i][i] = -scalar::one();
        }
        for j in i + 1..n {
            let v = match (group.order_of(i), group.order_of(j)) {
                (Some(a), Some(b)) => root_of_unity(rng, gcd(a, b)),
                (Some(a), None) | (None, Some(a)) => root_of_unity(rng, a),
                (None, None) => Scalar::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)),
            };
            table[i][j] = v;
            table[j][i] = v.inv();
        }
    }
    Bicharacter::new(group.clone(), table).expect("random table has full shape and nonzero entries")
}

fn root_of_unity<R: Rng + ?Sized>(rng: &mut R, m: i64) -> Scalar {
    let k = rng.random_range(0..m);
    Scalar::from_polar(1.0, std::f64::consts::TAU * k as f64 / m as f64)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}
