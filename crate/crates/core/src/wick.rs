//! Twists `τ: A* ⊗ A → A ⊗ A*`, normal ordering and the twisted product of
//! the Wick algebra.
//!
//! On generators the twist is
//! `τ(x*_i ⊗ x_j) = ε(γ_j, -γ_i) x_j x*_i + g_ij`.
//! For words it is computed as a braiding part plus a contraction part:
//!
//! ```text
//! τ(b* ⊗ a) = ε(|a|, |b*|) a b*  +  K(b* ⊗ a)
//! K(b's ⊗ a) = Σ_l (∏_{k<l} c(s, a_k)) g(s, a_l) τ(b' ⊗ a without a_l)
//!            + (∏_k c(s, a_k)) K(b' ⊗ a) s
//! ```
//!
//! where `c` is the exchange table of the spec. A spec built by
//! [`TwistSpec::new`] has `c_ij = ε(γ_j, -γ_i)` and the formula reproduces
//! the unique twist extending the generator rule. Editing one entry of `c`
//! (see [`TwistSpec::corrupted`]) leaves the braiding part untouched, so the
//! two parts stop agreeing and the twist laws break.

use std::collections::HashMap;
use std::fmt;

use rand::Rng;

use crate::freealg::{Alphabet, GradedPoly, Letter, Word};
use crate::groups::{random_normalized_bicharacter, AbelianGroup, Bicharacter};
use crate::linalg::{self, Matrix};
use crate::report::{Report, Tracker};
use crate::scalar::{self, Scalar};
use crate::{Error, Result};

/// Generators, commutation factor, pairing `g_ij = g(x*_i ⊗ x_j)` and the
/// exchange table used by the contraction recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistSpec {
    bicharacter: Bicharacter,
    alphabet: Alphabet,
    pairing: Matrix,
    exchange: Matrix,
}

impl TwistSpec {
    pub fn new(bicharacter: Bicharacter, alphabet: Alphabet, pairing: Matrix) -> Result<Self> {
        if alphabet.group() != bicharacter.group() {
            return Err(Error::DimensionMismatch {
                expected: bicharacter.group().rank(),
                found: alphabet.group().rank(),
            });
        }
        let n = alphabet.len();
        if pairing.shape() != (n, n) {
            return Err(Error::Shape(format!(
                "pairing must be {n}x{n}, got {}x{}",
                pairing.nrows(),
                pairing.ncols()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let v = pairing[(i, j)];
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::Shape(format!("pairing entry [{i}][{j}] is not finite")));
                }
                if v.norm() > 0.0 && alphabet.base_grade(i) != alphabet.base_grade(j) {
                    return Err(Error::PairingGrade { row: i, col: j });
                }
            }
        }
        let mut spec = TwistSpec {
            bicharacter,
            alphabet,
            pairing,
            exchange: Matrix::zeros(n, n),
        };
        spec.exchange = Matrix::from_fn(n, n, |i, j| spec.epsilon_factor(i, j));
        Ok(spec)
    }

    /// Identity pairing, i.e. the generators and their stars are dual bases.
    pub fn with_identity_pairing(bicharacter: Bicharacter, alphabet: Alphabet) -> Result<Self> {
        let n = alphabet.len();
        Self::new(bicharacter, alphabet, Matrix::identity(n, n))
    }

    pub fn bicharacter(&self) -> &Bicharacter {
        &self.bicharacter
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn pairing(&self) -> &Matrix {
        &self.pairing
    }

    pub fn exchange(&self) -> &Matrix {
        &self.exchange
    }

    pub fn tolerance(&self) -> f64 {
        self.bicharacter.tolerance()
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        self.bicharacter = self.bicharacter.with_tolerance(tolerance)?;
        Ok(self)
    }

    /// `ε(γ_j, -γ_i)`, the factor picked up when `x*_i` passes `x_j`.
    pub fn epsilon_factor(&self, i: usize, j: usize) -> Scalar {
        let neg = self
            .bicharacter
            .group()
            .neg(self.alphabet.base_grade(i))
            .expect("grades belong to the group");
        self.bicharacter
            .eval(self.alphabet.base_grade(j), &neg)
            .expect("grades belong to the group")
    }

    /// Same spec with exchange entry `(i, j)` multiplied by `factor`.
    pub fn corrupted(&self, i: usize, j: usize, factor: Scalar) -> Result<Self> {
        let n = self.alphabet.len();
        if i >= n || j >= n {
            return Err(Error::Shape(format!("exchange entry ({i}, {j}) outside {n}x{n}")));
        }
        let mut out = self.clone();
        out.exchange[(i, j)] *= factor;
        Ok(out)
    }

    /// Largest deviation of the exchange table from the `ε`-derived one.
    pub fn exchange_defect(&self) -> f64 {
        let n = self.alphabet.len();
        let derived = Matrix::from_fn(n, n, |i, j| self.epsilon_factor(i, j));
        linalg::max_abs(&(&self.exchange - derived))
    }

    fn check_word(&self, w: &Word) -> Result<()> {
        match w.letters().iter().find(|l| l.gen >= self.alphabet.len()) {
            Some(l) => Err(Error::UnknownGenerator(format!("#{}", l.gen))),
            None => Ok(()),
        }
    }

    fn check_poly(&self, p: &GradedPoly) -> Result<()> {
        p.terms().try_for_each(|(w, _)| self.check_word(w))
    }

    fn eps_words(&self, a: &Word, b: &Word) -> Scalar {
        self.bicharacter
            .eval(&self.alphabet.grade(a), &self.alphabet.grade(b))
            .expect("grades belong to the group")
    }

    fn empty_poly(&self) -> GradedPoly {
        GradedPoly::zero()
            .with_tolerance(self.tolerance())
            .expect("spec tolerance is valid")
    }
}

/// Memoized evaluation of `τ` for one spec.
#[derive(Debug)]
pub struct TwistEngine<'a> {
    spec: &'a TwistSpec,
    memo: HashMap<(Word, Word), GradedPoly>,
}

impl<'a> TwistEngine<'a> {
    pub fn new(spec: &'a TwistSpec) -> Self {
        TwistEngine {
            spec,
            memo: HashMap::new(),
        }
    }

    pub fn spec(&self) -> &TwistSpec {
        self.spec
    }

    /// `τ(b ⊗ a)` for a starred word `b` and an unstarred word `a`.
    pub fn apply(&mut self, b: &Word, a: &Word) -> Result<GradedPoly> {
        if !b.all_starred() {
            return Err(Error::MixedStar(self.spec.alphabet.render_word(b)));
        }
        if !a.all_plain() {
            return Err(Error::MixedStar(self.spec.alphabet.render_word(a)));
        }
        self.spec.check_word(b)?;
        self.spec.check_word(a)?;
        Ok(self.twist(b, a))
    }

    fn twist(&mut self, b: &Word, a: &Word) -> GradedPoly {
        let one = scalar::one();
        if b.is_empty() || a.is_empty() {
            return GradedPoly::monomial(a.concat(b), one)
                .with_tolerance(self.spec.tolerance())
                .expect("spec tolerance is valid");
        }
        let key = (b.clone(), a.clone());
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let spec = self.spec;
        let mut out = spec.empty_poly();
        out.add_term(a.concat(b), spec.eps_words(a, b));

        let (&s, rest) = b.letters().split_last().expect("b is nonempty");
        let b_rest = Word::new(rest.to_vec());
        let i = s.gen;
        let mut prefix = one;
        for (l, al) in a.letters().iter().enumerate() {
            let g = spec.pairing[(i, al.gen)];
            if g != scalar::zero() {
                let mut without = a.letters().to_vec();
                without.remove(l);
                let sub = self.twist(&b_rest, &Word::new(without));
                out.add_scaled(&sub, prefix * g);
            }
            prefix *= spec.exchange[(i, al.gen)];
        }
        if !b_rest.is_empty() {
            // contraction part of τ(b' ⊗ a), then s appended on the right
            let full = a.len() + b_rest.len();
            let inner = self.twist(&b_rest, a);
            for (w, c) in inner.terms() {
                if w.len() < full {
                    out.add_term(w.appended(s), prefix * c);
                }
            }
        }
        self.memo.insert(key, out.clone());
        out
    }

    /// Twisted product `(a1 b1*)(a2 b2*) = a1 τ(b1* ⊗ a2) b2*` on normal words.
    fn mul(&mut self, p: &GradedPoly, q: &GradedPoly) -> GradedPoly {
        let mut out = self.spec.empty_poly();
        for (w1, c1) in p.terms() {
            let (a1, b1) = w1.split_normal();
            for (w2, c2) in q.terms() {
                let (a2, b2) = w2.split_normal();
                let t = self.twist(&b1, &a2);
                for (w, c) in t.terms() {
                    out.add_term(a1.concat(w).concat(&b2), c1 * c2 * c);
                }
            }
        }
        out
    }
}

/// `τ(star_word ⊗ word)`, with the unstarred letters moved left.
pub fn apply_twist(t: &TwistSpec, star_word: &Word, word: &Word) -> Result<GradedPoly> {
    TwistEngine::new(t).apply(star_word, word)
}

/// An element of the Wick algebra, stored in normal form (every unstarred
/// letter left of every starred one).
#[derive(Debug, Clone, PartialEq)]
pub struct WickPoly(GradedPoly);

impl WickPoly {
    pub fn new(p: GradedPoly) -> Result<Self> {
        if let Some((w, _)) = p.terms().find(|(w, _)| !w.is_normal()) {
            return Err(Error::NotNormal(format!("{:?}", w.letters())));
        }
        Ok(WickPoly(p))
    }

    pub fn one() -> Self {
        WickPoly(GradedPoly::one())
    }

    pub fn zero() -> Self {
        WickPoly(GradedPoly::zero())
    }

    pub fn word(w: Word) -> Result<Self> {
        Self::new(GradedPoly::word(w))
    }

    pub fn as_poly(&self) -> &GradedPoly {
        &self.0
    }

    pub fn into_poly(self) -> GradedPoly {
        self.0
    }

    pub fn render(&self, alphabet: &Alphabet) -> String {
        self.0.render(alphabet)
    }
}

/// Which starred-unstarred adjacency the rewriter contracts first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Leftmost,
    Rightmost,
}

/// Normal form plus rewriting statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalOrdered {
    pub poly: WickPoly,
    /// Rewrites performed in total.
    pub steps: usize,
    /// Longest derivation: rounds in which some word still had an inversion.
    pub depth: usize,
    /// Largest inversion count among the input words; `depth` never exceeds it.
    pub bound: usize,
}

/// Rewrites `x*_i x_j → ε(γ_j, -γ_i) x_j x*_i + g_ij` until no starred
/// letter precedes an unstarred one.
pub fn normal_order(t: &TwistSpec, p: &GradedPoly, strategy: Order) -> Result<NormalOrdered> {
    t.check_poly(p)?;
    let mut done = t.empty_poly();
    let mut frontier = t.empty_poly();
    frontier.add_scaled(p, scalar::one());
    let bound = p.terms().map(|(w, _)| w.inversions()).max().unwrap_or(0);
    let (mut steps, mut depth) = (0, 0);
    loop {
        let mut next = t.empty_poly();
        for (w, &c) in frontier.terms() {
            let letters = w.letters();
            let mut spots = (0..letters.len().saturating_sub(1)).filter(|&k| letters[k].starred && !letters[k + 1].starred);
            let spot = match strategy {
                Order::Leftmost => spots.next(),
                Order::Rightmost => spots.next_back(),
            };
            let Some(k) = spot else {
                done.add_term(w.clone(), c);
                continue;
            };
            steps += 1;
            let (i, j) = (letters[k].gen, letters[k + 1].gen);
            let mut swapped = letters.to_vec();
            swapped.swap(k, k + 1);
            next.add_term(Word::new(swapped), c * t.epsilon_factor(i, j));
            let g = t.pairing[(i, j)];
            if g != scalar::zero() {
                let mut cut = letters[..k].to_vec();
                cut.extend_from_slice(&letters[k + 2..]);
                next.add_term(Word::new(cut), c * g);
            }
        }
        if next.is_zero() {
            break;
        }
        depth += 1;
        frontier = next;
    }
    Ok(NormalOrdered {
        poly: WickPoly(done),
        steps,
        depth,
        bound,
    })
}

/// Twisted product of two normal-ordered elements.
pub fn multiply_wick(t: &TwistSpec, p: &WickPoly, q: &WickPoly) -> Result<WickPoly> {
    t.check_poly(&p.0)?;
    t.check_poly(&q.0)?;
    Ok(WickPoly(TwistEngine::new(t).mul(&p.0, &q.0)))
}

/// The ∗-operation `(a b*)* = b a*`. The involution of a normal word is
/// already normal, so no reordering is needed.
pub fn star_wick(p: &WickPoly) -> WickPoly {
    WickPoly(p.0.involution())
}

/// Normal words (unstarred then starred) of length at most `max_len`.
pub fn normal_words(n_gens: usize, max_len: usize) -> Vec<Word> {
    let plain: Vec<Letter> = (0..n_gens).map(Letter::plain).collect();
    let star: Vec<Letter> = (0..n_gens).map(Letter::star).collect();
    let mut out = Vec::new();
    for len in 0..=max_len {
        for k in (0..=len).rev() {
            for a in Alphabet::words_of_length(&plain, k) {
                for b in Alphabet::words_of_length(&star, len - k) {
                    out.push(a.concat(&b));
                }
            }
        }
    }
    out
}

fn plain_words(n: usize, max_len: usize) -> Vec<Word> {
    Alphabet::words_up_to(&(0..n).map(Letter::plain).collect::<Vec<_>>(), max_len)
}

fn star_words(n: usize, max_len: usize) -> Vec<Word> {
    Alphabet::words_up_to(&(0..n).map(Letter::star).collect::<Vec<_>>(), max_len)
}

struct Render<'a>(&'a Alphabet, &'a [&'a Word]);

impl fmt::Display for Render<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.1.iter().map(|w| self.0.render_word(w)).collect();
        write!(f, "[{}]", parts.join("|"))
    }
}

/// Both twist laws and the unit laws on every instance whose words have
/// total length at most `max_len`.
///
/// * `τ(b ⊗ a1 a2)` against `τ(b ⊗ a1)` followed by `τ(b' ⊗ a2)`;
/// * `τ(b1 b2 ⊗ a)` against `τ(b2 ⊗ a)` followed by `τ(b1 ⊗ a')`.
pub fn check_twist_axioms(t: &TwistSpec, max_len: usize) -> Report {
    let n = t.alphabet.len();
    let tol = t.tolerance();
    let mut eng = TwistEngine::new(t);
    let plains = plain_words(n, max_len);
    let stars = star_words(n, max_len);
    let alpha = &t.alphabet;

    let mut law_a = Tracker::new("twist.law_a", tol);
    for b in &stars {
        for a1 in &plains {
            for a2 in plains.iter().filter(|a2| b.len() + a1.len() + a2.len() <= max_len) {
                let lhs = eng.twist(b, &a1.concat(a2));
                let mut rhs = t.empty_poly();
                for (w, c) in eng.twist(b, a1).terms() {
                    let (a1p, bp) = w.split_normal();
                    let inner = eng.twist(&bp, a2);
                    rhs.add_scaled(&(&GradedPoly::word(a1p) * &inner), *c);
                }
                law_a.record(lhs.relative_distance(&rhs), || Render(alpha, &[b, a1, a2]).to_string());
            }
        }
    }

    let mut law_b = Tracker::new("twist.law_b", tol);
    for b1 in &stars {
        for b2 in stars.iter().filter(|b2| b1.len() + b2.len() <= max_len) {
            for a in plains.iter().filter(|a| b1.len() + b2.len() + a.len() <= max_len) {
                let lhs = eng.twist(&b1.concat(b2), a);
                let mut rhs = t.empty_poly();
                for (w, c) in eng.twist(b2, a).terms() {
                    let (ap, b2p) = w.split_normal();
                    let inner = eng.twist(b1, &ap);
                    rhs.add_scaled(&(&inner * &GradedPoly::word(b2p)), *c);
                }
                law_b.record(lhs.relative_distance(&rhs), || Render(alpha, &[b1, b2, a]).to_string());
            }
        }
    }

    let mut unit = Tracker::new("twist.unit", tol);
    let empty = Word::empty();
    for a in &plains {
        let r = eng.twist(&empty, a).relative_distance(&GradedPoly::word(a.clone()));
        unit.record(r, || Render(alpha, &[&empty, a]).to_string());
    }
    for b in &stars {
        let r = eng.twist(b, &empty).relative_distance(&GradedPoly::word(b.clone()));
        unit.record(r, || Render(alpha, &[b, &empty]).to_string());
    }
    Report::combine("twist", &[law_a.finish(), law_b.finish(), unit.finish()])
}

/// `(τ(b ⊗ a))* = τ(a* ⊗ b*)` for all pairs of total length at most `max_len`.
pub fn check_star_twist(t: &TwistSpec, max_len: usize) -> Report {
    let n = t.alphabet.len();
    let mut eng = TwistEngine::new(t);
    let mut tr = Tracker::new("star_twist", t.tolerance());
    for b in star_words(n, max_len) {
        for a in plain_words(n, max_len - b.len()) {
            let lhs = eng.twist(&b, &a).involution();
            let rhs = eng.twist(&a.involution(), &b.involution());
            tr.record(lhs.relative_distance(&rhs), || Render(&t.alphabet, &[&b, &a]).to_string());
        }
    }
    tr.finish()
}

/// `(uv)w = u(vw)` for all normal words with total length at most `max_len`.
pub fn check_associativity(t: &TwistSpec, max_len: usize) -> Report {
    let words = normal_words(t.alphabet.len(), max_len);
    let mut eng = TwistEngine::new(t);
    let mut tr = Tracker::new("associativity", t.tolerance());
    for u in &words {
        for v in words.iter().filter(|v| u.len() + v.len() <= max_len) {
            let uv = eng.mul(&GradedPoly::word(u.clone()), &GradedPoly::word(v.clone()));
            for w in words.iter().filter(|w| u.len() + v.len() + w.len() <= max_len) {
                let wp = GradedPoly::word(w.clone());
                let lhs = eng.mul(&uv, &wp);
                let vw = eng.mul(&GradedPoly::word(v.clone()), &wp);
                let rhs = eng.mul(&GradedPoly::word(u.clone()), &vw);
                tr.record(lhs.relative_distance(&rhs), || Render(&t.alphabet, &[u, v, w]).to_string());
            }
        }
    }
    tr.finish()
}

/// The twist check and the associativity check side by side.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociativityIff {
    pub twist: Report,
    pub associativity: Report,
}

impl AssociativityIff {
    /// The two verdicts agree.
    pub fn holds(&self) -> bool {
        self.twist.passed == self.associativity.passed
    }

    pub fn report(&self) -> Report {
        let mut r = Report::combine("associativity_iff_twist", &[self.twist.clone(), self.associativity.clone()]);
        r.passed = self.holds();
        if r.passed {
            r.witness = self.associativity.witness.clone();
        }
        r
    }
}

pub fn verify_associativity_iff_twist(t: &TwistSpec, max_len: usize) -> AssociativityIff {
    AssociativityIff {
        twist: check_twist_axioms(t, max_len),
        associativity: check_associativity(t, max_len),
    }
}

/// `x*_i x_j - ε(γ_j, -γ_i) x_j x*_i = g_ij` in the Wick algebra.
pub fn check_commutation_relations(t: &TwistSpec) -> Report {
    let n = t.alphabet.len();
    let mut eng = TwistEngine::new(t);
    let mut tr = Tracker::new("commutation", t.tolerance());
    for i in 0..n {
        for j in 0..n {
            let xs = GradedPoly::word(Word::new(vec![Letter::star(i)]));
            let x = GradedPoly::word(Word::new(vec![Letter::plain(j)]));
            let mut lhs = eng.mul(&xs, &x);
            lhs.add_term(Word::new(vec![Letter::plain(j), Letter::star(i)]), -t.epsilon_factor(i, j));
            let rhs = GradedPoly::scalar(t.pairing[(i, j)]);
            tr.record(lhs.relative_distance(&rhs), || format!("({},{})", t.alphabet.name(i), t.alphabet.name(j)));
        }
    }
    tr.finish()
}

/// A random valid spec: small grading group, up to three generators,
/// normalized commutation factor and a Hermitian positive definite pairing
/// that only links generators of equal grade.
pub fn random_twist_spec<R: Rng + ?Sized>(rng: &mut R) -> TwistSpec {
    let free_rank = rng.random_range(0..=2usize);
    let torsion: Vec<i64> = if free_rank == 0 || rng.random_bool(0.5) {
        vec![rng.random_range(2..=4)]
    } else {
        Vec::new()
    };
    let group = AbelianGroup::new(free_rank, torsion).expect("orders are at least 2");
    let n = rng.random_range(1..=3usize);
    let decls = (0..n)
        .map(|k| {
            let coords = (0..group.rank())
                .map(|c| match group.order_of(c) {
                    Some(m) => rng.random_range(0..m),
                    None => rng.random_range(-1..=1),
                })
                .collect();
            (format!("x{k}"), coords)
        })
        .collect();
    let alphabet = Alphabet::new(group.clone(), decls).expect("names are distinct");
    let bicharacter = random_normalized_bicharacter(&group, rng);
    let m = Matrix::from_fn(n, n, |_, _| Scalar::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let mut g = &m * m.adjoint() + Matrix::identity(n, n);
    for i in 0..n {
        for j in 0..n {
            if alphabet.base_grade(i) != alphabet.base_grade(j) {
                g[(i, j)] = scalar::zero();
            }
        }
    }
    TwistSpec::new(bicharacter, alphabet, g).expect("pairing respects grades")
}

/// `spec` with one exchange entry rotated by a phase bounded away from 1.
pub fn random_corruption<R: Rng + ?Sized>(spec: &TwistSpec, rng: &mut R) -> TwistSpec {
    let n = spec.alphabet.len();
    let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
    let theta = rng.random_range(0.5..std::f64::consts::TAU - 0.5);
    spec.corrupted(i, j, Scalar::from_polar(1.0, theta)).expect("indices in range")
}
