//! The `G`-graded free algebra on starred and unstarred generators.
//!
//! A starred letter `x*` carries the negated grade of `x`. Words are plain
//! letter sequences; [`GradedPoly`] is a finitely supported linear
//! combination of words with concatenation as product.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::groups::{AbelianGroup, Bicharacter, GroupElement};
use crate::report::{Report, Tracker};
use crate::scalar::{self, Scalar, DEFAULT_TOLERANCE};
use crate::{Error, Result};

mod parse;

pub use parse::parse_poly;

/// Interned generator reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: usize,
    pub starred: bool,
}

impl Letter {
    pub fn plain(gen: usize) -> Self {
        Letter { gen, starred: false }
    }
    pub fn star(gen: usize) -> Self {
        Letter { gen, starred: true }
    }
    pub fn toggled(self) -> Self {
        Letter {
            gen: self.gen,
            starred: !self.starred,
        }
    }
}

/// A generator as seen from outside: name, grade, star flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub grade: GroupElement,
    pub starred: bool,
}

/// Declared generators `x_1 .. x_N` with their grades.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    group: AbelianGroup,
    names: Vec<String>,
    grades: Vec<GroupElement>,
}

impl Alphabet {
    pub fn new(group: AbelianGroup, decls: Vec<(String, Vec<i64>)>) -> Result<Self> {
        let mut names = Vec::with_capacity(decls.len());
        let mut grades = Vec::with_capacity(decls.len());
        for (name, coords) in decls {
            if !parse::is_identifier(&name) {
                return Err(Error::Parse {
                    position: 0,
                    message: format!("`{name}` is not a valid generator name"),
                });
            }
            if names.contains(&name) {
                return Err(Error::DuplicateGenerator(name));
            }
            grades.push(group.element(&coords)?);
            names.push(name);
        }
        Ok(Alphabet { group, names, grades })
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, gen: usize) -> &str {
        &self.names[gen]
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Grade of an unstarred generator.
    pub fn base_grade(&self, gen: usize) -> &GroupElement {
        &self.grades[gen]
    }

    pub fn letter_grade(&self, l: Letter) -> GroupElement {
        if l.starred {
            self.group.neg(&self.grades[l.gen]).expect("grades belong to the group")
        } else {
            self.grades[l.gen].clone()
        }
    }

    pub fn generator(&self, l: Letter) -> Generator {
        Generator {
            name: self.names[l.gen].clone(),
            grade: self.letter_grade(l),
            starred: l.starred,
        }
    }

    pub fn grade(&self, w: &Word) -> GroupElement {
        let mut g = self.group.zero();
        for &l in w.letters() {
            g = self.group.add(&g, &self.letter_grade(l)).expect("grades belong to the group");
        }
        g
    }

    /// Letters `x_0, x_0*, x_1, x_1*, ...`.
    pub fn letters(&self) -> Vec<Letter> {
        (0..self.len()).flat_map(|g| [Letter::plain(g), Letter::star(g)]).collect()
    }

    /// All words of length `len` over the given letters, lexicographic.
    pub fn words_of_length(letters: &[Letter], len: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|w| letters.iter().map(move |&l| w.appended(l)))
                .collect();
        }
        out
    }

    /// All words of length at most `max_len`, shortest first.
    pub fn words_up_to(letters: &[Letter], max_len: usize) -> Vec<Word> {
        (0..=max_len).flat_map(|n| Self::words_of_length(letters, n)).collect()
    }

    pub fn render_word(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.letters()
            .iter()
            .map(|l| {
                if l.starred {
                    format!("{}*", self.names[l.gen])
                } else {
                    self.names[l.gen].clone()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn same_group(&self, b: &Bicharacter) -> Result<()> {
        if b.group() != &self.group {
            return Err(Error::DimensionMismatch {
                expected: b.group().rank(),
                found: self.group.rank(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }
    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }
    pub fn letters(&self) -> &[Letter] {
        &self.0
    }
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }
    pub fn appended(&self, l: Letter) -> Word {
        let mut v = self.0.clone();
        v.push(l);
        Word(v)
    }
    pub fn all_starred(&self) -> bool {
        self.0.iter().all(|l| l.starred)
    }
    pub fn all_plain(&self) -> bool {
        self.0.iter().all(|l| !l.starred)
    }
    /// Unstarred letters all precede starred ones.
    pub fn is_normal(&self) -> bool {
        self.0.windows(2).all(|p| !(p[0].starred && !p[1].starred))
    }
    /// Splits a normal word into its unstarred and starred parts.
    pub fn split_normal(&self) -> (Word, Word) {
        let k = self.0.iter().position(|l| l.starred).unwrap_or(self.0.len());
        (Word(self.0[..k].to_vec()), Word(self.0[k..].to_vec()))
    }
    /// Reverse and toggle every star.
    pub fn involution(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.toggled()).collect())
    }
    /// Number of (starred, unstarred) pairs standing in the wrong order.
    pub fn inversions(&self) -> usize {
        let mut stars = 0;
        let mut inv = 0;
        for l in &self.0 {
            if l.starred {
                stars += 1;
            } else {
                inv += stars;
            }
        }
        inv
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

/// Finitely supported `Word → C` map. Coefficients of modulus at most the
/// tolerance are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedPoly {
    terms: BTreeMap<Word, Scalar>,
    tolerance: f64,
}

impl Default for GradedPoly {
    fn default() -> Self {
        GradedPoly::zero()
    }
}

impl GradedPoly {
    pub fn zero() -> Self {
        GradedPoly {
            terms: BTreeMap::new(),
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn one() -> Self {
        Self::monomial(Word::empty(), scalar::one())
    }

    pub fn scalar(c: Scalar) -> Self {
        Self::monomial(Word::empty(), c)
    }

    pub fn monomial(w: Word, c: Scalar) -> Self {
        let mut p = Self::zero();
        p.add_term(w, c);
        p
    }

    pub fn word(w: Word) -> Self {
        Self::monomial(w, scalar::one())
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        self.tolerance = scalar::check_tolerance(tolerance)?;
        self.prune();
        Ok(self)
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    fn prune(&mut self) {
        let tol = self.tolerance;
        self.terms.retain(|_, c| c.norm() > tol);
    }

    pub fn add_term(&mut self, w: Word, c: Scalar) {
        let tol = self.tolerance;
        let entry = self.terms.entry(w);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                if c.norm() > tol {
                    v.insert(c);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = *o.get() + c;
                if sum.norm() > tol {
                    *o.get_mut() = sum;
                } else {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &GradedPoly, c: Scalar) {
        for (w, x) in &other.terms {
            self.add_term(w.clone(), c * x);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, w: &Word) -> Scalar {
        self.terms.get(w).copied().unwrap_or_else(scalar::zero)
    }

    /// Coefficient of the empty word.
    pub fn constant_term(&self) -> Scalar {
        self.coefficient(&Word::empty())
    }

    pub fn scale(&self, c: Scalar) -> GradedPoly {
        let mut out = GradedPoly {
            terms: BTreeMap::new(),
            tolerance: self.tolerance,
        };
        out.add_scaled(self, c);
        out
    }

    /// Sum of terms whose word satisfies `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Word) -> bool) -> GradedPoly {
        GradedPoly {
            terms: self.terms.iter().filter(|(w, _)| keep(w)).map(|(w, c)| (w.clone(), *c)).collect(),
            tolerance: self.tolerance,
        }
    }

    /// Reverses every word, toggles stars, conjugates coefficients.
    pub fn involution(&self) -> GradedPoly {
        GradedPoly {
            terms: self.terms.iter().map(|(w, c)| (w.involution(), c.conj())).collect(),
            tolerance: self.tolerance,
        }
    }

    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficient difference.
    pub fn distance(&self, other: &GradedPoly) -> f64 {
        let mut worst = 0.0_f64;
        for (w, c) in &self.terms {
            worst = worst.max((c - other.coefficient(w)).norm());
        }
        for (w, c) in &other.terms {
            if !self.terms.contains_key(w) {
                worst = worst.max(c.norm());
            }
        }
        worst
    }

    /// Distance scaled by the larger coefficient size (at least 1).
    pub fn relative_distance(&self, other: &GradedPoly) -> f64 {
        self.distance(other) / self.max_abs().max(other.max_abs()).max(1.0)
    }

    pub fn approx_eq(&self, other: &GradedPoly, tol: f64) -> bool {
        self.relative_distance(other) <= tol
    }

    pub fn is_normal(&self) -> bool {
        self.terms.keys().all(Word::is_normal)
    }

    /// Every term has the given grade.
    pub fn is_homogeneous(&self, alphabet: &Alphabet, grade: &GroupElement) -> bool {
        self.terms.keys().all(|w| &alphabet.grade(w) == grade)
    }

    /// Canonical text: `coeff * name1 name2* ...` terms joined by ` + `,
    /// lexicographic in words.
    pub fn render(&self, alphabet: &Alphabet) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(w, c)| {
                let coeff = scalar::format_coefficient(*c);
                if w.is_empty() {
                    coeff
                } else {
                    format!("{coeff} * {}", alphabet.render_word(w))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> impl fmt::Display + 'a {
        struct D<'a>(&'a GradedPoly, &'a Alphabet);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0.render(self.1))
            }
        }
        D(self, alphabet)
    }
}

impl Add for &GradedPoly {
    type Output = GradedPoly;
    fn add(self, rhs: &GradedPoly) -> GradedPoly {
        let mut out = self.clone();
        out.add_scaled(rhs, scalar::one());
        out
    }
}

impl Sub for &GradedPoly {
    type Output = GradedPoly;
    fn sub(self, rhs: &GradedPoly) -> GradedPoly {
        let mut out = self.clone();
        out.add_scaled(rhs, -scalar::one());
        out
    }
}

impl Neg for &GradedPoly {
    type Output = GradedPoly;
    fn neg(self) -> GradedPoly {
        self.scale(-scalar::one())
    }
}

/// Concatenation product, extended bilinearly.
impl Mul for &GradedPoly {
    type Output = GradedPoly;
    fn mul(self, rhs: &GradedPoly) -> GradedPoly {
        let mut out = GradedPoly {
            terms: BTreeMap::new(),
            tolerance: self.tolerance,
        };
        for (u, a) in &self.terms {
            for (v, b) in &rhs.terms {
                out.add_term(u.concat(v), a * b);
            }
        }
        out
    }
}

/// `Ψ(u ⊗ v) = ε(|v|, |u|) v ⊗ u`, returned as the concatenation `v·u`.
pub fn braid(b: &Bicharacter, alphabet: &Alphabet, u: &Word, v: &Word) -> Result<GradedPoly> {
    alphabet.same_group(b)?;
    let factor = b.eval(&alphabet.grade(v), &alphabet.grade(u))?;
    Ok(GradedPoly::monomial(v.concat(u), factor))
}

/// Both factorization laws of the braiding on `u ⊗ v ⊗ w`:
///
/// * `Ψ(uv ⊗ w) = (Ψ ⊗ id)(id ⊗ Ψ)`: `w·u·v` with `ε(|w|,|u|+|v|) = ε(|w|,|u|) ε(|w|,|v|)`;
/// * `Ψ(u ⊗ vw) = (id ⊗ Ψ)(Ψ ⊗ id)`: `v·w·u` with `ε(|v|+|w|,|u|) = ε(|v|,|u|) ε(|w|,|u|)`.
pub fn check_hexagons(b: &Bicharacter, alphabet: &Alphabet, u: &Word, v: &Word, w: &Word) -> Result<Report> {
    let mut left = Tracker::new("hexagon.left", b.tolerance());
    let lhs = braid(b, alphabet, &u.concat(v), w)?;
    // id ⊗ Ψ on v ⊗ w gives c·(w v); then Ψ on u ⊗ w
    let inner = braid(b, alphabet, v, w)?;
    let outer = braid(b, alphabet, u, w)?;
    let rhs = &(&outer * &GradedPoly::word(v.clone())) * &GradedPoly::scalar(inner.terms().map(|(_, c)| *c).sum());
    left.record(lhs.relative_distance(&rhs), || render_triple(alphabet, u, v, w));

    let mut right = Tracker::new("hexagon.right", b.tolerance());
    let lhs = braid(b, alphabet, u, &v.concat(w))?;
    let first = braid(b, alphabet, u, v)?;
    let second = braid(b, alphabet, u, w)?;
    let coeff: Scalar = first.terms().map(|(_, c)| *c).sum::<Scalar>() * second.terms().map(|(_, c)| *c).sum::<Scalar>();
    let rhs = GradedPoly::monomial(v.concat(w).concat(u), coeff);
    right.record(lhs.relative_distance(&rhs), || render_triple(alphabet, u, v, w));
    Ok(Report::combine("hexagon", &[left.finish(), right.finish()]))
}

fn render_triple(a: &Alphabet, u: &Word, v: &Word, w: &Word) -> String {
    format!("[{}|{}|{}]", a.render_word(u), a.render_word(v), a.render_word(w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::real;
    use proptest::prelude::*;

    fn z_alphabet(names: &[(&str, i64)]) -> Alphabet {
        Alphabet::new(
            AbelianGroup::free(1),
            names.iter().map(|(n, g)| (n.to_string(), vec![*g])).collect(),
        )
        .unwrap()
    }

    fn x() -> Word {
        Word::new(vec![Letter::plain(0)])
    }
    fn y() -> Word {
        Word::new(vec![Letter::plain(1)])
    }

    #[test]
    fn trivial_braid_is_flip() {
        let a = z_alphabet(&[("x", 1), ("y", 1)]);
        let b = Bicharacter::trivial(a.group().clone());
        let p = braid(&b, &a, &x(), &y()).unwrap();
        assert_eq!(p.render(&a), "1 * y x");
    }

    #[test]
    fn fermionic_braid_has_sign() {
        let a = z_alphabet(&[("x", 1), ("y", 1)]);
        let b = Bicharacter::new(a.group().clone(), vec![vec![real(-1.0)]]).unwrap();
        let p = braid(&b, &a, &x(), &y()).unwrap();
        assert_eq!(p.coefficient(&y().concat(&x())), real(-1.0));
    }

    #[test]
    fn braiding_with_unit() {
        let a = z_alphabet(&[("x", 1), ("y", 2)]);
        let b = Bicharacter::new(a.group().clone(), vec![vec![real(0.3)]]).unwrap();
        let p = braid(&b, &a, &Word::empty(), &y()).unwrap();
        assert_eq!(p, GradedPoly::word(y()));
    }

    #[test]
    fn hexagon_q_statistics() {
        let q = real(0.9);
        let a = z_alphabet(&[("a", 1), ("b", 2), ("c", 3)]);
        let b = Bicharacter::new(a.group().clone(), vec![vec![q]]).unwrap();
        let w = |g| Word::new(vec![Letter::plain(g)]);
        let r = check_hexagons(&b, &a, &w(0), &w(1), &w(2)).unwrap();
        assert!(r.passed, "{r}");
        // left law coefficient ε(3, 1+2) = q^9
        let lhs = braid(&b, &a, &w(0).concat(&w(1)), &w(2)).unwrap();
        let c = lhs.coefficient(&Word::new(vec![Letter::plain(2), Letter::plain(0), Letter::plain(1)]));
        assert!((c - real(0.9f64.powi(9))).norm() < 1e-12);
    }

    #[test]
    fn hexagons_trivial() {
        let a = z_alphabet(&[("x", 1), ("y", 1)]);
        let b = Bicharacter::trivial(a.group().clone());
        for u in Alphabet::words_up_to(&a.letters(), 2) {
            let r = check_hexagons(&b, &a, &u, &x(), &y()).unwrap();
            assert!(r.passed);
            assert_eq!(r.max_residual, 0.0);
        }
    }

    #[test]
    fn involution_reverses_and_stars() {
        let a = z_alphabet(&[("x", 1), ("y", 1)]);
        let p = GradedPoly::word(x().concat(&y()));
        assert_eq!(p.involution().render(&a), "1 * y* x*");
        let c = GradedPoly::scalar(Scalar::new(1.0, 2.0));
        assert_eq!(c.involution(), GradedPoly::scalar(Scalar::new(1.0, -2.0)));
    }

    #[test]
    fn starred_grade_is_negated() {
        let a = z_alphabet(&[("x", 3)]);
        assert_eq!(a.letter_grade(Letter::star(0)).coords(), &[-3]);
        assert_eq!(a.grade(&Word::new(vec![Letter::plain(0), Letter::star(0)])), a.group().zero());
    }

    #[test]
    fn group_mismatch_is_error() {
        let a = z_alphabet(&[("x", 1)]);
        let b = Bicharacter::trivial(AbelianGroup::free(2));
        assert!(braid(&b, &a, &x(), &x()).is_err());
    }

    #[test]
    fn render_orders_lexicographically() {
        let a = z_alphabet(&[("x", 1)]);
        let mut p = GradedPoly::zero();
        p.add_term(Word::new(vec![Letter::plain(0), Letter::star(0)]), real(2.0));
        p.add_term(Word::empty(), real(1.0));
        assert_eq!(p.render(&a), "1 + 2 * x x*");
        assert_eq!(GradedPoly::zero().render(&a), "0");
    }

    #[test]
    fn cancellation_drops_terms() {
        let mut p = GradedPoly::word(x());
        p.add_term(x(), real(-1.0));
        assert!(p.is_zero());
    }

    fn arb_poly() -> impl Strategy<Value = GradedPoly> {
        let letter = (0usize..2, any::<bool>()).prop_map(|(g, s)| Letter { gen: g, starred: s });
        let term = (prop::collection::vec(letter, 0..4), -3i32..=3, -3i32..=3)
            .prop_map(|(ls, re, im)| (Word::new(ls), Scalar::new(re as f64, im as f64)));
        prop::collection::vec(term, 0..4).prop_map(|ts| {
            let mut p = GradedPoly::zero();
            for (w, c) in ts {
                p.add_term(w, c);
            }
            p
        })
    }

    proptest! {
        #[test]
        fn product_is_associative_and_unital(p in arb_poly(), q in arb_poly(), r in arb_poly()) {
            prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
            prop_assert_eq!(&p * &GradedPoly::one(), p.clone());
            prop_assert_eq!(&GradedPoly::one() * &p, p);
        }

        #[test]
        fn involution_is_an_involutive_antihomomorphism(p in arb_poly(), q in arb_poly()) {
            prop_assert_eq!(p.involution().involution(), p.clone());
            prop_assert_eq!((&p * &q).involution(), &q.involution() * &p.involution());
        }

        #[test]
        fn braid_preserves_grade_and_squares_to_one(gu in -3i64..=3, gv in -3i64..=3, theta in 0.0f64..std::f64::consts::TAU) {
            // normalized unimodular ε on Z^2 with generator grades (1,0), (0,1)
            let g = AbelianGroup::free(2);
            let e = Scalar::from_polar(1.0, theta);
            let b = Bicharacter::new(g.clone(), vec![vec![real(-1.0), e], vec![e.inv(), real(1.0)]]).unwrap();
            let a = Alphabet::new(g.clone(), vec![("x".into(), vec![1, 0]), ("y".into(), vec![0, 1])]).unwrap();
            let mk = |n: i64, l: Letter| Word::new(vec![if n < 0 { l.toggled() } else { l }; n.unsigned_abs() as usize]);
            let u = mk(gu, Letter::plain(0)).concat(&mk(gv, Letter::plain(1)));
            let v = mk(gv, Letter::plain(0)).concat(&Word::new(vec![Letter::plain(1)]));
            let once = braid(&b, &a, &u, &v).unwrap();
            let total = g.add(&a.grade(&u), &a.grade(&v)).unwrap();
            prop_assert!(once.is_homogeneous(&a, &total));
            let back = braid(&b, &a, &v, &u).unwrap();
            let c1: Scalar = once.terms().map(|(_, c)| *c).sum();
            let c2: Scalar = back.terms().map(|(_, c)| *c).sum();
            prop_assert!((c1 * c2 - scalar::one()).norm() < 1e-9);
        }
    }
}
