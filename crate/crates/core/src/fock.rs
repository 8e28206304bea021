//! Truncated Fock representation of the Wick algebra.
//!
//! States of degree `d` are unstarred words of length `d`, unnormalized.
//! Creation by `x_i` is left concatenation; annihilation by `x*_i` keeps the
//! star-free part of `τ(x*_i ⊗ w)`. The inner product is
//! `<u, v> = constant term of τ(u* ⊗ v)`, so `<0|0> = 1`.
//!
//! Every representation carries, per degree, a state basis `V_d` (columns in
//! word coordinates) and a coordinate map `P_d` with `P_d V_d = I`. For the
//! raw representation both are identities; [`null_quotient`] replaces them
//! by a Gram-orthonormal basis of the positive part.

use std::collections::HashMap;
use std::fmt;

use crate::freealg::{Alphabet, Letter, Word};
use crate::linalg::{self, Matrix};
use crate::report::{Report, Tracker};
use crate::scalar::{self, Scalar};
use crate::wick::{check_star_twist, TwistEngine, TwistSpec};
use crate::{Error, Result};

/// Upper bound on the total number of basis words.
pub const MAX_FOCK_BASIS: usize = 20_000;

#[derive(Debug, Clone, PartialEq)]
pub struct FockRep {
    twist: TwistSpec,
    cutoff: usize,
    basis: Vec<Vec<Word>>,
    states: Vec<Matrix>,
    coords: Vec<Matrix>,
    /// `creation[i][d]`: degree `d` to `d + 1`, for `d < cutoff`.
    creation: Vec<Vec<Matrix>>,
    /// `annihilation[i][d]`: degree `d + 1` to `d`, for `d < cutoff`.
    annihilation: Vec<Vec<Matrix>>,
    gram: Vec<Matrix>,
    tolerance: f64,
    quotient: bool,
}

/// Builds the raw representation on words of length at most `cutoff`.
pub fn build_fock(t: &TwistSpec, cutoff: usize) -> Result<FockRep> {
    if cutoff < 1 {
        return Err(Error::CutoffTooSmall(cutoff));
    }
    let n = t.alphabet().len();
    let tol = t.tolerance();
    let g = t.pairing();
    for i in 0..n {
        for j in 0..n {
            let r = (g[(i, j)] - g[(j, i)].conj()).norm();
            if r > tol {
                return Err(Error::NotHermitian { row: i, col: j, residual: r });
            }
        }
    }
    let star = check_star_twist(t, 2);
    if !star.passed {
        return Err(Error::NotStarTwist(star.witness.unwrap_or_default()));
    }
    let mut total = 0usize;
    for d in 0..=cutoff {
        total = total.saturating_add(n.saturating_pow(d as u32));
        if total > MAX_FOCK_BASIS {
            return Err(Error::BasisTooLarge(total));
        }
    }

    let letters: Vec<Letter> = (0..n).map(Letter::plain).collect();
    let basis: Vec<Vec<Word>> = (0..=cutoff).map(|d| Alphabet::words_of_length(&letters, d)).collect();
    let index: Vec<HashMap<&Word, usize>> = basis
        .iter()
        .map(|ws| ws.iter().enumerate().map(|(k, w)| (w, k)).collect())
        .collect();
    let dim = |d: usize| basis[d].len();

    let mut eng = TwistEngine::new(t);
    let mut creation = vec![Vec::with_capacity(cutoff); n];
    let mut annihilation = vec![Vec::with_capacity(cutoff); n];
    for i in 0..n {
        for d in 0..cutoff {
            let mut c = Matrix::zeros(dim(d + 1), dim(d));
            for (k, w) in basis[d].iter().enumerate() {
                let target = Word::new(vec![Letter::plain(i)]).concat(w);
                c[(index[d + 1][&target], k)] = scalar::one();
            }
            creation[i].push(c);

            let mut a = Matrix::zeros(dim(d), dim(d + 1));
            let xs = Word::new(vec![Letter::star(i)]);
            for (k, w) in basis[d + 1].iter().enumerate() {
                let p = eng.apply(&xs, w)?;
                for (u, c) in p.terms() {
                    if u.all_plain() {
                        a[(index[d][u], k)] = *c;
                    }
                }
            }
            annihilation[i].push(a);
        }
    }

    let mut gram = Vec::with_capacity(cutoff + 1);
    for ws in &basis {
        let m = ws.len();
        let mut gd = Matrix::zeros(m, m);
        for (r, u) in ws.iter().enumerate() {
            let us = u.involution();
            for (c, v) in ws.iter().enumerate() {
                gd[(r, c)] = eng.apply(&us, v)?.constant_term();
            }
        }
        gram.push(gd);
    }

    let eye: Vec<Matrix> = basis.iter().map(|ws| Matrix::identity(ws.len(), ws.len())).collect();
    Ok(FockRep {
        twist: t.clone(),
        cutoff,
        basis,
        states: eye.clone(),
        coords: eye,
        creation,
        annihilation,
        gram,
        tolerance: tol,
        quotient: false,
    })
}

impl FockRep {
    pub fn twist(&self) -> &TwistSpec {
        &self.twist
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn is_quotient(&self) -> bool {
        self.quotient
    }

    pub fn generators(&self) -> usize {
        self.creation.len()
    }

    /// Unstarred words of length `degree`, the raw basis.
    pub fn words(&self, degree: usize) -> &[Word] {
        &self.basis[degree]
    }

    /// State basis of a degree, columns in word coordinates.
    pub fn states(&self, degree: usize) -> &Matrix {
        &self.states[degree]
    }

    pub fn dim(&self, degree: usize) -> usize {
        self.states[degree].ncols()
    }

    pub fn dims(&self) -> Vec<usize> {
        (0..=self.cutoff).map(|d| self.dim(d)).collect()
    }

    /// Degree `d` to `d + 1`; `None` at the cutoff.
    pub fn creation(&self, gen: usize, degree: usize) -> Option<&Matrix> {
        self.creation.get(gen)?.get(degree)
    }

    /// Degree `d` to `d - 1`; `None` on the vacuum, which every
    /// annihilator kills.
    pub fn annihilation(&self, gen: usize, degree: usize) -> Option<&Matrix> {
        self.annihilation.get(gen)?.get(degree.checked_sub(1)?)
    }

    pub fn gram(&self, degree: usize) -> Option<&Matrix> {
        self.gram.get(degree)
    }

    /// Offsets of the degree blocks in the full truncated space.
    fn offsets(&self) -> Vec<usize> {
        let mut out = vec![0];
        for d in 0..=self.cutoff {
            out.push(out[d] + self.dim(d));
        }
        out
    }

    /// Creation operator on the whole truncated space (zero on the top block).
    pub fn creation_operator(&self, gen: usize) -> Matrix {
        let off = self.offsets();
        let mut m = Matrix::zeros(off[self.cutoff + 1], off[self.cutoff + 1]);
        for (d, block) in self.creation[gen].iter().enumerate() {
            m.view_mut((off[d + 1], off[d]), block.shape()).copy_from(block);
        }
        m
    }

    pub fn annihilation_operator(&self, gen: usize) -> Matrix {
        let off = self.offsets();
        let mut m = Matrix::zeros(off[self.cutoff + 1], off[self.cutoff + 1]);
        for (d, block) in self.annihilation[gen].iter().enumerate() {
            m.view_mut((off[d], off[d + 1]), block.shape()).copy_from(block);
        }
        m
    }

    /// Block-diagonal inner product on the whole truncated space.
    pub fn gram_operator(&self) -> Matrix {
        let off = self.offsets();
        let mut m = Matrix::zeros(off[self.cutoff + 1], off[self.cutoff + 1]);
        for (d, block) in self.gram.iter().enumerate() {
            m.view_mut((off[d], off[d]), block.shape()).copy_from(block);
        }
        m
    }

    /// Vacuum as a vector of the whole truncated space.
    pub fn vacuum(&self) -> nalgebra::DVector<Scalar> {
        let mut v = nalgebra::DVector::zeros(self.offsets()[self.cutoff + 1]);
        if self.dim(0) > 0 {
            v[0] = scalar::one();
        }
        v
    }

    /// Left multiplication by the word `w` from degree `degree`, in state
    /// coordinates. Zero when it would leave the truncated space.
    pub fn word_operator(&self, w: &Word, degree: usize) -> Result<Matrix> {
        if !w.all_plain() {
            return Err(Error::MixedStar(self.twist.alphabet().render_word(w)));
        }
        let top = degree + w.len();
        if top > self.cutoff {
            return Ok(Matrix::zeros(0, self.dim(degree)));
        }
        let index: HashMap<&Word, usize> = self.basis[top].iter().enumerate().map(|(k, u)| (u, k)).collect();
        let mut raw = Matrix::zeros(self.basis[top].len(), self.basis[degree].len());
        for (k, u) in self.basis[degree].iter().enumerate() {
            let target = w.concat(u);
            let row = *index
                .get(&target)
                .ok_or_else(|| Error::UnknownGenerator(self.twist.alphabet().render_word(w)))?;
            raw[(row, k)] = scalar::one();
        }
        Ok(&self.coords[top] * raw * &self.states[degree])
    }
}

/// `gram[d][w][w'] = <w, w'>`, the constant term of `τ(w* ⊗ w')`.
pub fn gram_matrix(f: &FockRep, degree: usize) -> Result<&Matrix> {
    f.gram(degree).ok_or(Error::CutoffTooSmall(degree))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Positivity {
    PositiveDefinite,
    Semidefinite { kernel: usize },
    Indefinite { negative: usize },
}

impl fmt::Display for Positivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Positivity::PositiveDefinite => write!(f, "positive-definite"),
            Positivity::Semidefinite { kernel } => write!(f, "semidefinite(kernel={kernel})"),
            Positivity::Indefinite { negative } => write!(f, "indefinite(negative={negative})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreePositivity {
    pub degree: usize,
    pub dim: usize,
    pub min_eigenvalue: f64,
    pub verdict: Positivity,
}

impl fmt::Display for DegreePositivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "POSITIVITY degree={} dim={} min_eigenvalue={:.6e} verdict={}",
            self.degree, self.dim, self.min_eigenvalue, self.verdict
        )
    }
}

fn classify(values: &[f64], tol: f64) -> Positivity {
    let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let cut = tol * scale;
    let negative = values.iter().filter(|&&v| v < -cut).count();
    let kernel = values.iter().filter(|&&v| v.abs() <= cut).count();
    if negative > 0 {
        Positivity::Indefinite { negative }
    } else if kernel > 0 {
        Positivity::Semidefinite { kernel }
    } else {
        Positivity::PositiveDefinite
    }
}

/// Eigenvalue floor and verdict of each Gram block up to `max_degree`.
pub fn positivity_report(f: &FockRep, max_degree: usize) -> Vec<DegreePositivity> {
    (0..=max_degree.min(f.cutoff))
        .map(|d| {
            let (values, _) = linalg::hermitian_eigen(&f.gram[d]);
            DegreePositivity {
                degree: d,
                dim: f.dim(d),
                min_eigenvalue: values.first().copied().unwrap_or(0.0),
                verdict: classify(&values, f.tolerance),
            }
        })
        .collect()
}

/// Quotient by the Gram kernel: each block gets a Gram-orthonormal basis of
/// the positive part and all operators are rewritten in it.
pub fn null_quotient(f: &FockRep) -> Result<FockRep> {
    let mut vs = Vec::with_capacity(f.cutoff + 1);
    for (d, g) in f.gram.iter().enumerate() {
        let (values, vectors) = linalg::hermitian_eigen(g);
        if let Positivity::Indefinite { .. } = classify(&values, f.tolerance) {
            return Err(Error::NotStarTwist(format!(
                "Gram block of degree {d} is indefinite (eigenvalue {:e})",
                values[0]
            )));
        }
        let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        let cols: Vec<_> = (0..values.len())
            .filter(|&k| values[k] > f.tolerance * scale)
            .map(|k| vectors.column(k).scale(1.0 / values[k].sqrt()))
            .collect();
        vs.push(if cols.is_empty() {
            Matrix::zeros(g.nrows(), 0)
        } else {
            Matrix::from_columns(&cols)
        });
    }
    // V^H G V = I, so V^H G reads off coordinates in the new basis
    let ps: Vec<Matrix> = vs.iter().zip(&f.gram).map(|(v, g)| v.adjoint() * g).collect();
    let mut creation = Vec::with_capacity(f.generators());
    let mut annihilation = Vec::with_capacity(f.generators());
    for i in 0..f.generators() {
        creation.push((0..f.cutoff).map(|d| &ps[d + 1] * &f.creation[i][d] * &vs[d]).collect());
        annihilation.push((0..f.cutoff).map(|d| &ps[d] * &f.annihilation[i][d] * &vs[d + 1]).collect());
    }
    Ok(FockRep {
        twist: f.twist.clone(),
        cutoff: f.cutoff,
        basis: f.basis.clone(),
        states: f.states.iter().zip(&vs).map(|(s, v)| s * v).collect(),
        coords: ps.iter().zip(&f.coords).map(|(p, c)| p * c).collect(),
        creation,
        annihilation,
        gram: vs.iter().map(|v| Matrix::identity(v.ncols(), v.ncols())).collect(),
        tolerance: f.tolerance,
        quotient: true,
    })
}

fn relative(residual: f64, scale: f64) -> f64 {
    residual / scale.max(1.0)
}

/// Matrix identities on the truncated space, top degree excluded:
///
/// * `A_i C_j - ε(γ_j, -γ_i) C_j A_i = g_ij` on degrees below the cutoff;
/// * `C_i^H G_(d+1) = G_d A_i` (annihilation is the adjoint of creation);
/// * `C_i C_j` equals left multiplication by `x_i x_j`;
/// * every Gram block is Hermitian.
pub fn verify_representation(f: &FockRep) -> Report {
    let n = f.generators();
    let t = &f.twist;
    let tol = f.tolerance;
    let name = |i: usize| t.alphabet().name(i).to_string();

    let mut comm = Tracker::new("rep.commutation", tol);
    for d in 0..f.cutoff {
        let eye = Matrix::identity(f.dim(d), f.dim(d));
        for i in 0..n {
            for j in 0..n {
                let ac = &f.annihilation[i][d] * &f.creation[j][d];
                let mut m = &ac - eye.scale(1.0) * t.pairing()[(i, j)];
                let scale = linalg::max_abs(&ac);
                if d > 0 {
                    let ca = &f.creation[j][d - 1] * &f.annihilation[i][d - 1];
                    m -= ca * t.epsilon_factor(i, j);
                }
                comm.record(relative(linalg::max_abs(&m), scale), || {
                    format!("degree={d} a*({}) a({})", name(i), name(j))
                });
            }
        }
    }

    let mut adj = Tracker::new("rep.adjoint", tol);
    for d in 0..f.cutoff {
        for i in 0..n {
            let lhs = f.creation[i][d].adjoint() * &f.gram[d + 1];
            let rhs = &f.gram[d] * &f.annihilation[i][d];
            let scale = linalg::max_abs(&lhs).max(linalg::max_abs(&rhs));
            adj.record(relative(linalg::max_abs(&(&lhs - &rhs)), scale), || {
                format!("degree={d} gen={}", name(i))
            });
        }
    }

    let mut prod = Tracker::new("rep.creation_product", tol);
    for d in 0..f.cutoff.saturating_sub(1) {
        for i in 0..n {
            for j in 0..n {
                let lhs = &f.creation[i][d + 1] * &f.creation[j][d];
                let w = Word::new(vec![Letter::plain(i), Letter::plain(j)]);
                match f.word_operator(&w, d) {
                    Ok(rhs) => prod.record(linalg::max_abs(&(&lhs - rhs)), || {
                        format!("degree={d} {} {}", name(i), name(j))
                    }),
                    Err(_) => prod.record(f64::NAN, || format!("degree={d} {} {}", name(i), name(j))),
                }
            }
        }
    }

    let mut herm = Tracker::new("rep.hermitian", tol);
    for (d, g) in f.gram.iter().enumerate() {
        herm.record(relative(linalg::hermitian_residual(g), linalg::max_abs(g)), || format!("degree={d}"));
    }
    Report::combine("representation", &[comm.finish(), adj.finish(), prod.finish(), herm.finish()])
}

/// `C_i C_i` and `A_i A_i` vanish up to null states, i.e.
/// `G C_i C_i = 0` and `G A_i A_i = 0`. Holds for generators with
/// `ε(γ_i, γ_i) = -1`.
pub fn check_nilpotent(f: &FockRep, gen: usize) -> Report {
    let mut tr = Tracker::new("rep.nilpotent", f.tolerance);
    for d in 0..f.cutoff.saturating_sub(1) {
        let cc = &f.gram[d + 2] * &f.creation[gen][d + 1] * &f.creation[gen][d];
        tr.record(linalg::max_abs(&cc), || format!("creation degree={d}"));
        let aa = &f.gram[d] * &f.annihilation[gen][d] * &f.annihilation[gen][d + 1];
        tr.record(linalg::max_abs(&aa), || format!("annihilation degree={}", d + 2));
    }
    tr.finish()
}

/// Row-major CSV with `re+imj` entries.
pub fn matrix_csv(m: &Matrix) -> String {
    let mut out = String::new();
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| scalar::format_complex(m[(r, c)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Named CSV documents for every block, plus `manifest.csv` listing them.
pub fn export_csv(f: &FockRep) -> Vec<(String, String)> {
    let mut files = Vec::new();
    let mut manifest = String::from("kind,generator,degree,rows,cols,file\n");
    let mut push = |kind: &str, gen: &str, degree: usize, m: &Matrix, files: &mut Vec<(String, String)>| {
        let file = if gen.is_empty() {
            format!("{kind}_d{degree}.csv")
        } else {
            format!("{kind}_{gen}_d{degree}.csv")
        };
        manifest.push_str(&format!("{kind},{gen},{degree},{},{},{file}\n", m.nrows(), m.ncols()));
        files.push((file, matrix_csv(m)));
    };
    for d in 0..=f.cutoff {
        push("gram", "", d, &f.gram[d], &mut files);
    }
    for i in 0..f.generators() {
        let gen = f.twist.alphabet().name(i).to_string();
        for d in 0..f.cutoff {
            push("creation", &gen, d, &f.creation[i][d], &mut files);
            push("annihilation", &gen, d + 1, &f.annihilation[i][d], &mut files);
        }
    }
    let mut dims = String::from("degree,dim\n");
    for d in 0..=f.cutoff {
        dims.push_str(&format!("{d},{}\n", f.dim(d)));
    }
    files.push(("manifest.csv".into(), manifest));
    files.push(("dims.csv".into(), dims));
    files
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freealg::GradedPoly;
    use crate::groups::{AbelianGroup, Bicharacter};
    use crate::scalar::real;
    use crate::wick::{normal_order, Order};

    fn single(q: f64) -> TwistSpec {
        let g = AbelianGroup::free(1);
        let b = Bicharacter::new(g.clone(), vec![vec![real(q)]]).unwrap();
        let a = Alphabet::new(g, vec![("x".into(), vec![1])]).unwrap();
        TwistSpec::with_identity_pairing(b, a).unwrap()
    }

    fn fermions(n: usize) -> TwistSpec {
        let g = AbelianGroup::cyclic(2).unwrap();
        let b = Bicharacter::new(g.clone(), vec![vec![real(-1.0)]]).unwrap();
        let a = Alphabet::new(g, (0..n).map(|k| (format!("x{k}"), vec![1])).collect()).unwrap();
        TwistSpec::with_identity_pairing(b, a).unwrap()
    }

    fn anyons() -> TwistSpec {
        let g = AbelianGroup::free(2);
        let phase = Scalar::from_polar(1.0, 0.7);
        let b = Bicharacter::new(g.clone(), vec![vec![real(-1.0), phase], vec![phase.inv(), real(1.0)]]).unwrap();
        let a = Alphabet::new(g, vec![("a".into(), vec![1, 0]), ("b".into(), vec![0, 1])]).unwrap();
        TwistSpec::with_identity_pairing(b, a).unwrap()
    }

    #[test]
    fn cutoff_zero_is_rejected() {
        assert_eq!(build_fock(&single(1.0), 0), Err(Error::CutoffTooSmall(0)));
    }

    #[test]
    fn non_hermitian_pairing_is_rejected() {
        let g = AbelianGroup::free(1);
        let a = Alphabet::new(g.clone(), vec![("x".into(), vec![1]), ("y".into(), vec![1])]).unwrap();
        let pairing = Matrix::from_row_slice(2, 2, &[real(1.0), real(1.0), real(0.0), real(1.0)]);
        let t = TwistSpec::new(Bicharacter::trivial(g), a, pairing).unwrap();
        assert!(matches!(build_fock(&t, 2), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn boson_annihilation_counts() {
        let f = build_fock(&single(1.0), 3).unwrap();
        for n in 1..=3 {
            assert_eq!(f.annihilation(0, n).unwrap()[(0, 0)], real(n as f64));
        }
        assert!(f.annihilation(0, 0).is_none());
        let grams: Vec<Scalar> = (0..=3).map(|d| f.gram(d).unwrap()[(0, 0)]).collect();
        assert_eq!(grams, vec![real(1.0), real(1.0), real(2.0), real(6.0)]);
    }

    #[test]
    fn single_fermion_has_null_pair() {
        let f = build_fock(&single(-1.0), 3).unwrap();
        assert_eq!(f.gram(2).unwrap()[(0, 0)], real(0.0));
        let pos = positivity_report(&f, 3);
        assert_eq!(pos[1].verdict, Positivity::PositiveDefinite);
        assert_eq!(pos[2].verdict, Positivity::Semidefinite { kernel: 1 });
    }

    #[test]
    fn fermion_quotient_dims() {
        let f = build_fock(&fermions(3), 4).unwrap();
        let q = null_quotient(&f).unwrap();
        assert_eq!(q.dims(), vec![1, 3, 3, 1, 0]);
        let r = verify_representation(&q);
        assert!(r.passed, "{r}");
        assert!(check_nilpotent(&q, 1).passed);
        assert!(check_nilpotent(&f, 2).max_residual == 0.0);
    }

    #[test]
    fn boson_quotient_keeps_dims() {
        let g = AbelianGroup::free(1);
        let a = Alphabet::new(g.clone(), vec![("x".into(), vec![1]), ("y".into(), vec![1])]).unwrap();
        let t = TwistSpec::with_identity_pairing(Bicharacter::trivial(g), a).unwrap();
        let f = build_fock(&t, 3).unwrap();
        let q = null_quotient(&f).unwrap();
        // symmetric tensors: 1, 2, 3, 4
        assert_eq!(q.dims(), vec![1, 2, 3, 4]);
        let single = null_quotient(&build_fock(&single(1.0), 4).unwrap()).unwrap();
        assert_eq!(single.dims(), vec![1, 1, 1, 1, 1]);
        assert!(verify_representation(&q).passed);
    }

    #[test]
    fn anyon_representation_and_adjointness() {
        let f = build_fock(&anyons(), 3).unwrap();
        let r = verify_representation(&f);
        assert!(r.passed, "{r}");
        assert_eq!(f.gram(0).unwrap()[(0, 0)], real(1.0));
    }

    #[test]
    fn truncation_locality() {
        let t = anyons();
        let small = build_fock(&t, 3).unwrap();
        let big = build_fock(&t, 4).unwrap();
        for i in 0..2 {
            for d in 0..2 {
                assert_eq!(small.creation(i, d), big.creation(i, d));
                assert_eq!(small.annihilation(i, d + 1), big.annihilation(i, d + 1));
            }
        }
        for d in 0..=3 {
            assert_eq!(small.gram(d), big.gram(d));
        }
    }

    #[test]
    fn operators_on_vacuum_match_normal_ordering() {
        let t = anyons();
        let f = build_fock(&t, 4).unwrap();
        let ops: Vec<(Matrix, Matrix)> = (0..2).map(|i| (f.creation_operator(i), f.annihilation_operator(i))).collect();
        let off: Vec<usize> = (0..=4).scan(0, |acc, d| {
            let o = *acc;
            *acc += f.dim(d);
            Some(o)
        }).collect();
        for w in Alphabet::words_up_to(&t.alphabet().letters(), 4) {
            let mut v = f.vacuum();
            for l in w.letters().iter().rev() {
                let (c, a) = &ops[l.gen];
                v = if l.starred { a * v } else { c * v };
            }
            let no = normal_order(&t, &GradedPoly::word(w.clone()), Order::Leftmost).unwrap();
            let mut expect = nalgebra::DVector::<Scalar>::zeros(v.len());
            for (u, c) in no.poly.as_poly().terms() {
                if u.all_plain() {
                    let k = f.words(u.len()).iter().position(|x| x == u).unwrap();
                    expect[off[u.len()] + k] += c;
                }
            }
            let diff = (&v - &expect).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(diff < 1e-12, "{:?}", w);
        }
    }

    #[test]
    fn boson_number_operator_is_diagonal() {
        let f = build_fock(&single(1.0), 5).unwrap();
        let num = f.creation_operator(0) * f.annihilation_operator(0);
        for d in 0..=5 {
            assert_eq!(num[(d, d)], real(d as f64));
        }
        assert_eq!(linalg::max_abs(&(num.clone() - Matrix::from_diagonal(&num.diagonal()))), 0.0);
    }

    #[test]
    fn csv_layout() {
        let f = build_fock(&single(1.0), 2).unwrap();
        let files = export_csv(&f);
        let gram2 = files.iter().find(|(n, _)| n == "gram_d2.csv").unwrap();
        assert_eq!(gram2.1, "2+0j\n");
        let manifest = &files.iter().find(|(n, _)| n == "manifest.csv").unwrap().1;
        assert!(manifest.contains("creation,x,1,1,1,creation_x_d1.csv"));
    }
}
