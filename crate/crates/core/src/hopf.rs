//! Finite-dimensional algebras, coalgebras, bialgebras and Hopf algebras
//! given by structure constants, with explicit checks of their axioms.
//!
//! Conventions, for a basis `b_0 .. b_{d-1}`:
//!
//! * `mult[(i, j, k)]` is the coefficient of `b_k` in `b_i b_j`;
//! * `unit[k]` is the coefficient of `b_k` in `1`;
//! * `comult[(i, j, k)]` is the coefficient of `b_j ⊗ b_k` in `Δ(b_i)`;
//! * `counit[i]` is `η(b_i)`;
//! * `antipode[(i, j)]` is the coefficient of `b_j` in `S(b_i)`.
//!
//! Construction only validates shapes. Whether the data actually forms a
//! Hopf algebra is what the `check_*` functions answer.
//!
//! Group algebras of infinite groups are represented by a finite slice of
//! exponents. Products leaving the slice are recorded as undefined and every
//! check skips the affected instances, counting them as truncation artifacts
//! rather than failures.

use std::collections::BTreeSet;
use std::ops::{Index, IndexMut};

use crate::groups::{AbelianGroup, Bicharacter};
use crate::linalg::{self, Matrix};
use crate::report::{Report, Tracker};
use crate::scalar::{self, Scalar, DEFAULT_TOLERANCE};
use crate::{Error, Result};

/// Largest basis `make_group_hopf` will build densely.
pub const MAX_GROUP_BASIS: usize = 128;

/// Dense rank-3 complex tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    dims: [usize; 3],
    data: Vec<Scalar>,
}

impl Tensor3 {
    pub fn zeros(d0: usize, d1: usize, d2: usize) -> Self {
        Tensor3 {
            dims: [d0, d1, d2],
            data: vec![scalar::zero(); d0 * d1 * d2],
        }
    }

    pub fn from_fn(d0: usize, d1: usize, d2: usize, mut f: impl FnMut(usize, usize, usize) -> Scalar) -> Self {
        let mut t = Self::zeros(d0, d1, d2);
        for i in 0..d0 {
            for j in 0..d1 {
                for k in 0..d2 {
                    t[(i, j, k)] = f(i, j, k);
                }
            }
        }
        t
    }

    /// From `nested[i][j][k]`.
    pub fn from_nested(nested: &[Vec<Vec<Scalar>>]) -> Result<Self> {
        let d0 = nested.len();
        let d1 = nested.first().map_or(0, |r| r.len());
        let d2 = nested.first().and_then(|r| r.first()).map_or(0, |r| r.len());
        if nested.iter().any(|r| r.len() != d1 || r.iter().any(|c| c.len() != d2)) {
            return Err(Error::Shape("ragged rank-3 array".into()));
        }
        Ok(Self::from_fn(d0, d1, d2, |i, j, k| nested[i][j][k]))
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    /// Nonzero entries `(j, k, value)` of the slice with first index `i`.
    pub fn nonzeros(&self, i: usize) -> Vec<(usize, usize, Scalar)> {
        let [_, d1, d2] = self.dims;
        let mut out = Vec::new();
        for j in 0..d1 {
            for k in 0..d2 {
                let v = self[(i, j, k)];
                if v != scalar::zero() {
                    out.push((j, k, v));
                }
            }
        }
        out
    }

    /// Row `(i, j, ·)` as a slice.
    pub fn fiber(&self, i: usize, j: usize) -> &[Scalar] {
        let [_, d1, d2] = self.dims;
        let start = (i * d1 + j) * d2;
        &self.data[start..start + d2]
    }
}

impl Index<(usize, usize, usize)> for Tensor3 {
    type Output = Scalar;
    fn index(&self, (i, j, k): (usize, usize, usize)) -> &Scalar {
        let [_, d1, d2] = self.dims;
        &self.data[(i * d1 + j) * d2 + k]
    }
}

impl IndexMut<(usize, usize, usize)> for Tensor3 {
    fn index_mut(&mut self, (i, j, k): (usize, usize, usize)) -> &mut Scalar {
        let [_, d1, d2] = self.dims;
        &mut self.data[(i * d1 + j) * d2 + k]
    }
}

/// Candidate Hopf-algebra data as structure constants over `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureHopf {
    dim: usize,
    basis_labels: Vec<String>,
    mult: Tensor3,
    unit: Vec<Scalar>,
    comult: Tensor3,
    counit: Vec<Scalar>,
    antipode: Matrix,
    undefined_products: BTreeSet<(usize, usize)>,
    tolerance: f64,
}

impl StructureHopf {
    pub fn new(
        basis_labels: Vec<String>,
        mult: Tensor3,
        unit: Vec<Scalar>,
        comult: Tensor3,
        counit: Vec<Scalar>,
        antipode: Matrix,
    ) -> Result<Self> {
        let d = basis_labels.len();
        if d == 0 {
            return Err(Error::Shape("Hopf algebra needs a nonempty basis".into()));
        }
        let cube = [d, d, d];
        if mult.dims() != cube {
            return Err(Error::Shape(format!("mult is {:?}, expected {cube:?}", mult.dims())));
        }
        if comult.dims() != cube {
            return Err(Error::Shape(format!("comult is {:?}, expected {cube:?}", comult.dims())));
        }
        if unit.len() != d || counit.len() != d {
            return Err(Error::Shape(format!("unit/counit must have length {d}")));
        }
        if antipode.shape() != (d, d) {
            return Err(Error::Shape(format!("antipode is {:?}, expected ({d}, {d})", antipode.shape())));
        }
        Ok(StructureHopf {
            dim: d,
            basis_labels,
            mult,
            unit,
            comult,
            counit,
            antipode,
            undefined_products: BTreeSet::new(),
            tolerance: DEFAULT_TOLERANCE,
        })
    }

    /// The one-dimensional Hopf algebra `C`.
    pub fn ground_field() -> Self {
        let one = scalar::one();
        Self::new(
            vec!["1".into()],
            Tensor3::from_fn(1, 1, 1, |_, _, _| one),
            vec![one],
            Tensor3::from_fn(1, 1, 1, |_, _, _| one),
            vec![one],
            Matrix::from_element(1, 1, one),
        )
        .expect("shapes are consistent")
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        self.tolerance = scalar::check_tolerance(tolerance)?;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn basis_labels(&self) -> &[String] {
        &self.basis_labels
    }
    pub fn mult(&self) -> &Tensor3 {
        &self.mult
    }
    pub fn mult_mut(&mut self) -> &mut Tensor3 {
        &mut self.mult
    }
    pub fn unit(&self) -> &[Scalar] {
        &self.unit
    }
    pub fn unit_mut(&mut self) -> &mut [Scalar] {
        &mut self.unit
    }
    pub fn comult(&self) -> &Tensor3 {
        &self.comult
    }
    pub fn comult_mut(&mut self) -> &mut Tensor3 {
        &mut self.comult
    }
    pub fn counit(&self) -> &[Scalar] {
        &self.counit
    }
    pub fn counit_mut(&mut self) -> &mut [Scalar] {
        &mut self.counit
    }
    pub fn antipode(&self) -> &Matrix {
        &self.antipode
    }
    pub fn antipode_mut(&mut self) -> &mut Matrix {
        &mut self.antipode
    }
    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Basis pairs whose product fell outside a truncated slice.
    pub fn undefined_products(&self) -> &BTreeSet<(usize, usize)> {
        &self.undefined_products
    }

    fn undefined(&self, i: usize, j: usize) -> bool {
        self.undefined_products.contains(&(i, j))
    }

    fn label(&self, i: usize) -> &str {
        &self.basis_labels[i]
    }

    fn nz_support(v: &[Scalar]) -> impl Iterator<Item = (usize, Scalar)> + '_ {
        v.iter().enumerate().filter(|(_, z)| **z != scalar::zero()).map(|(k, z)| (k, *z))
    }
}

/// Group algebra `kG`: `Δ(g) = g ⊗ g`, `η(g) = 1`, `S(g) = g^{-1}`.
///
/// Free generators are truncated to exponents in `[-truncation, truncation]`;
/// pure-torsion groups ignore `truncation`.
pub fn make_group_hopf(group: &AbelianGroup, truncation: i64) -> Result<StructureHopf> {
    if group.free_rank() > 0 && truncation < 1 {
        return Err(Error::TruncationRequired);
    }
    let size = group.slice_len(truncation);
    if size > MAX_GROUP_BASIS as u128 {
        return Err(Error::BasisTooLarge(size.min(usize::MAX as u128) as usize));
    }
    let elements = group.slice(truncation);
    let d = elements.len();
    let index = |g: &crate::groups::GroupElement| elements.iter().position(|e| e == g);
    let one = scalar::one();

    let mut mult = Tensor3::zeros(d, d, d);
    let mut undefined = BTreeSet::new();
    for (i, a) in elements.iter().enumerate() {
        for (j, b) in elements.iter().enumerate() {
            let sum = group.add(a, b)?;
            match index(&sum) {
                Some(k) => mult[(i, j, k)] = one,
                None => {
                    undefined.insert((i, j));
                }
            }
        }
    }
    let zero_idx = index(&group.zero()).expect("identity lies in every slice");
    let mut unit = vec![scalar::zero(); d];
    unit[zero_idx] = one;
    let comult = Tensor3::from_fn(d, d, d, |i, j, k| if i == j && j == k { one } else { scalar::zero() });
    let counit = vec![one; d];
    let mut antipode = Matrix::zeros(d, d);
    for (i, a) in elements.iter().enumerate() {
        let inv = index(&group.neg(a)?).expect("slices are symmetric under negation");
        antipode[(i, inv)] = one;
    }
    let labels = elements.iter().map(|e| format!("g{e}")).collect();
    let mut h = StructureHopf::new(labels, mult, unit, comult, counit, antipode)?;
    h.undefined_products = undefined;
    Ok(h)
}

fn max_dist(a: &[Scalar], b: &[Scalar]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn delta(i: usize, j: usize) -> Scalar {
    if i == j {
        scalar::one()
    } else {
        scalar::zero()
    }
}

/// Associativity `m∘(m⊗id) = m∘(id⊗m)` and both unit laws.
pub fn check_algebra(h: &StructureHopf) -> Report {
    let d = h.dim;
    let tol = h.tolerance;
    let mut assoc = Tracker::new("algebra.assoc", tol);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let touches_edge = h.undefined(i, j)
                    || h.undefined(j, k)
                    || StructureHopf::nz_support(h.mult.fiber(i, j)).any(|(l, _)| h.undefined(l, k))
                    || StructureHopf::nz_support(h.mult.fiber(j, k)).any(|(l, _)| h.undefined(i, l));
                if touches_edge {
                    assoc.artifact();
                    continue;
                }
                let mut lhs = vec![scalar::zero(); d];
                let mut rhs = vec![scalar::zero(); d];
                for (l, c) in StructureHopf::nz_support(h.mult.fiber(i, j)) {
                    for (n, x) in h.mult.fiber(l, k).iter().enumerate() {
                        lhs[n] += c * x;
                    }
                }
                for (l, c) in StructureHopf::nz_support(h.mult.fiber(j, k)) {
                    for (n, x) in h.mult.fiber(i, l).iter().enumerate() {
                        rhs[n] += c * x;
                    }
                }
                assoc.record(max_dist(&lhs, &rhs), || format!("({},{},{})", h.label(i), h.label(j), h.label(k)));
            }
        }
    }
    let mut unit = Tracker::new("algebra.unit", tol);
    for j in 0..d {
        if StructureHopf::nz_support(&h.unit).any(|(i, _)| h.undefined(i, j) || h.undefined(j, i)) {
            unit.artifact();
            continue;
        }
        let mut left = vec![scalar::zero(); d];
        let mut right = vec![scalar::zero(); d];
        for (i, u) in StructureHopf::nz_support(&h.unit) {
            for k in 0..d {
                left[k] += u * h.mult[(i, j, k)];
                right[k] += u * h.mult[(j, i, k)];
            }
        }
        let target: Vec<Scalar> = (0..d).map(|k| delta(j, k)).collect();
        let r = max_dist(&left, &target).max(max_dist(&right, &target));
        unit.record(r, || h.label(j).to_string());
    }
    Report::combine("algebra", &[assoc.finish(), unit.finish()])
}

/// Coassociativity `(Δ⊗id)∘Δ = (id⊗Δ)∘Δ` and both counit laws.
pub fn check_coalgebra(h: &StructureHopf) -> Report {
    let d = h.dim;
    let tol = h.tolerance;
    let nz: Vec<_> = (0..d).map(|i| h.comult.nonzeros(i)).collect();
    let mut coassoc = Tracker::new("coalgebra.coassoc", tol);
    for i in 0..d {
        let mut lhs = Tensor3::zeros(d, d, d);
        let mut rhs = Tensor3::zeros(d, d, d);
        for &(j, k, v) in &nz[i] {
            for &(a, b, w) in &nz[j] {
                lhs[(a, b, k)] += v * w;
            }
            for &(b, c, w) in &nz[k] {
                rhs[(j, b, c)] += v * w;
            }
        }
        coassoc.record(max_dist(&lhs.data, &rhs.data), || h.label(i).to_string());
    }
    let mut counit = Tracker::new("coalgebra.counit", tol);
    for i in 0..d {
        let mut left = vec![scalar::zero(); d];
        let mut right = vec![scalar::zero(); d];
        for &(j, k, v) in &nz[i] {
            left[k] += h.counit[j] * v;
            right[j] += h.counit[k] * v;
        }
        let target: Vec<Scalar> = (0..d).map(|k| delta(i, k)).collect();
        counit.record(max_dist(&left, &target).max(max_dist(&right, &target)), || h.label(i).to_string());
    }
    Report::combine("coalgebra", &[coassoc.finish(), counit.finish()])
}

/// `Δ` and `η` are algebra maps: `Δ(xy) = Δ(x)Δ(y)`, `Δ(1) = 1⊗1`,
/// `η(xy) = η(x)η(y)`, `η(1) = 1`.
pub fn check_bialgebra(h: &StructureHopf) -> Report {
    let d = h.dim;
    let tol = h.tolerance;
    let nz: Vec<_> = (0..d).map(|i| h.comult.nonzeros(i)).collect();
    let mut comult_mult = Tracker::new("bialgebra.comult", tol);
    let mut counit_mult = Tracker::new("bialgebra.counit", tol);
    for i in 0..d {
        for j in 0..d {
            if h.undefined(i, j) {
                comult_mult.artifact();
                counit_mult.artifact();
                continue;
            }
            let factor_edge = nz[i]
                .iter()
                .any(|&(p, q, _)| nz[j].iter().any(|&(r, s, _)| h.undefined(p, r) || h.undefined(q, s)));
            if factor_edge {
                comult_mult.artifact();
            } else {
                let mut lhs = Matrix::zeros(d, d);
                for (l, c) in StructureHopf::nz_support(h.mult.fiber(i, j)) {
                    for &(a, b, w) in &nz[l] {
                        lhs[(a, b)] += c * w;
                    }
                }
                let mut rhs = Matrix::zeros(d, d);
                for &(p, q, v) in &nz[i] {
                    for &(r, s, w) in &nz[j] {
                        for (a, x) in StructureHopf::nz_support(h.mult.fiber(p, r)) {
                            for (b, y) in StructureHopf::nz_support(h.mult.fiber(q, s)) {
                                rhs[(a, b)] += v * w * x * y;
                            }
                        }
                    }
                }
                comult_mult.record(linalg::max_abs(&(lhs - rhs)), || format!("({},{})", h.label(i), h.label(j)));
            }
            let eta_prod: Scalar = h.mult.fiber(i, j).iter().zip(&h.counit).map(|(m, e)| m * e).sum();
            counit_mult.record((eta_prod - h.counit[i] * h.counit[j]).norm(), || {
                format!("({},{})", h.label(i), h.label(j))
            });
        }
    }
    let mut unit_maps = Tracker::new("bialgebra.unit", tol);
    let mut delta_one = Matrix::zeros(d, d);
    for (i, u) in StructureHopf::nz_support(&h.unit) {
        for &(a, b, w) in &nz[i] {
            delta_one[(a, b)] += u * w;
        }
    }
    let one_one = Matrix::from_fn(d, d, |a, b| h.unit[a] * h.unit[b]);
    unit_maps.record(linalg::max_abs(&(delta_one - one_one)), || "Δ(1)".into());
    let eta_one: Scalar = h.unit.iter().zip(&h.counit).map(|(u, e)| u * e).sum();
    unit_maps.record((eta_one - scalar::one()).norm(), || "η(1)".into());
    Report::combine("bialgebra", &[comult_mult.finish(), counit_mult.finish(), unit_maps.finish()])
}

/// `m∘(S⊗id)∘Δ = u∘η = m∘(id⊗S)∘Δ`.
pub fn check_antipode(h: &StructureHopf) -> Report {
    let d = h.dim;
    let mut t = Tracker::new("antipode", h.tolerance);
    for i in 0..d {
        let nz = h.comult.nonzeros(i);
        let edge = nz.iter().any(|&(j, k, _)| {
            (0..d).any(|l| {
                (h.antipode[(j, l)] != scalar::zero() && h.undefined(l, k))
                    || (h.antipode[(k, l)] != scalar::zero() && h.undefined(j, l))
            })
        });
        if edge {
            t.artifact();
            continue;
        }
        let mut left = vec![scalar::zero(); d];
        let mut right = vec![scalar::zero(); d];
        for &(j, k, v) in &nz {
            for l in 0..d {
                let s_jl = h.antipode[(j, l)];
                if s_jl != scalar::zero() {
                    for (n, x) in h.mult.fiber(l, k).iter().enumerate() {
                        left[n] += v * s_jl * x;
                    }
                }
                let s_kl = h.antipode[(k, l)];
                if s_kl != scalar::zero() {
                    for (n, x) in h.mult.fiber(j, l).iter().enumerate() {
                        right[n] += v * s_kl * x;
                    }
                }
            }
        }
        let target: Vec<Scalar> = h.unit.iter().map(|u| h.counit[i] * u).collect();
        t.record(max_dist(&left, &target).max(max_dist(&right, &target)), || h.label(i).to_string());
    }
    t.finish()
}

/// All Hopf-algebra diagrams at once.
pub fn check_hopf(h: &StructureHopf) -> Report {
    Report::combine(
        "hopf",
        &[check_algebra(h), check_coalgebra(h), check_bialgebra(h), check_antipode(h)],
    )
}

/// A bilinear form `⟨b_i, b_j⟩ = form[(i, j)]` proposed as a coquasitriangular
/// structure.
#[derive(Debug, Clone, PartialEq)]
pub struct CqtForm {
    pub hopf: StructureHopf,
    pub form: Matrix,
}

impl CqtForm {
    pub fn new(hopf: StructureHopf, form: Matrix) -> Result<Self> {
        let d = hopf.dim();
        if form.shape() != (d, d) {
            return Err(Error::Shape(format!("form is {:?}, expected ({d}, {d})", form.shape())));
        }
        Ok(CqtForm { hopf, form })
    }
}

/// The three coquasitriangularity relations:
///
/// * `Σ ⟨h₁, k₁⟩ k₂ h₂ = Σ h₁ k₁ ⟨h₂, k₂⟩`
/// * `⟨h, kl⟩ = Σ ⟨h₁, k⟩⟨h₂, l⟩`
/// * `⟨hk, l⟩ = Σ ⟨h, l₂⟩⟨k, l₁⟩`
pub fn check_cqt(c: &CqtForm) -> Report {
    let h = &c.hopf;
    let f = &c.form;
    let d = h.dim;
    let tol = h.tolerance;
    let nz: Vec<_> = (0..d).map(|i| h.comult.nonzeros(i)).collect();

    let mut braid = Tracker::new("cqt.commute", tol);
    for x in 0..d {
        for y in 0..d {
            let edge = nz[x]
                .iter()
                .any(|&(a, b, _)| nz[y].iter().any(|&(cc, dd, _)| h.undefined(dd, b) || h.undefined(a, cc)));
            if edge {
                braid.artifact();
                continue;
            }
            let mut lhs = vec![scalar::zero(); d];
            let mut rhs = vec![scalar::zero(); d];
            for &(a, b, v) in &nz[x] {
                for &(cc, dd, w) in &nz[y] {
                    let pre = v * w;
                    let fac = f[(a, cc)];
                    if fac != scalar::zero() {
                        for (n, m) in h.mult.fiber(dd, b).iter().enumerate() {
                            lhs[n] += pre * fac * m;
                        }
                    }
                    let fac = f[(b, dd)];
                    if fac != scalar::zero() {
                        for (n, m) in h.mult.fiber(a, cc).iter().enumerate() {
                            rhs[n] += pre * m * fac;
                        }
                    }
                }
            }
            braid.record(max_dist(&lhs, &rhs), || format!("({},{})", h.label(x), h.label(y)));
        }
    }

    let mut right_mult = Tracker::new("cqt.right", tol);
    let mut left_mult = Tracker::new("cqt.left", tol);
    for x in 0..d {
        for y in 0..d {
            for z in 0..d {
                // ⟨x, yz⟩
                if h.undefined(y, z) {
                    right_mult.artifact();
                } else {
                    let lhs: Scalar = (0..d).map(|n| h.mult[(y, z, n)] * f[(x, n)]).sum();
                    let rhs: Scalar = nz[x].iter().map(|&(a, b, v)| v * f[(a, y)] * f[(b, z)]).sum();
                    right_mult.record((lhs - rhs).norm(), || {
                        format!("({},{},{})", h.label(x), h.label(y), h.label(z))
                    });
                }
                // ⟨xy, z⟩
                if h.undefined(x, y) {
                    left_mult.artifact();
                } else {
                    let lhs: Scalar = (0..d).map(|n| h.mult[(x, y, n)] * f[(n, z)]).sum();
                    let rhs: Scalar = nz[z].iter().map(|&(a, b, v)| v * f[(x, b)] * f[(y, a)]).sum();
                    left_mult.record((lhs - rhs).norm(), || {
                        format!("({},{},{})", h.label(x), h.label(y), h.label(z))
                    });
                }
            }
        }
    }
    Report::combine("cqt", &[braid.finish(), right_mult.finish(), left_mult.finish()])
}

/// `⟨g^α, g^β⟩ := ε(α, β)` on the (truncated) basis of `kG`.
pub fn bicharacter_to_cqt(b: &Bicharacter, truncation: i64) -> Result<CqtForm> {
    let hopf = make_group_hopf(b.group(), truncation)?.with_tolerance(b.tolerance())?;
    let elements = b.group().slice(truncation);
    let d = elements.len();
    let mut form = Matrix::zeros(d, d);
    for (i, a) in elements.iter().enumerate() {
        for (j, c) in elements.iter().enumerate() {
            form[(i, j)] = b.eval(a, c)?;
        }
    }
    CqtForm::new(hopf, form)
}

/// A right `H`-module and right `H`-comodule on the same space.
///
/// * `action[(m, h, n)]`: coefficient of `e_n` in `e_m ⊲ b_h`;
/// * `coaction[(m, n, h)]`: coefficient of `e_n ⊗ b_h` in `ρ(e_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HopfModule {
    hopf: StructureHopf,
    dim: usize,
    action: Tensor3,
    coaction: Tensor3,
    tolerance: f64,
}

impl HopfModule {
    pub fn new(hopf: StructureHopf, action: Tensor3, coaction: Tensor3) -> Result<Self> {
        let dh = hopf.dim();
        let dim = action.dims()[0];
        if dim == 0 {
            return Err(Error::Shape("module needs a nonempty basis".into()));
        }
        if action.dims() != [dim, dh, dim] {
            return Err(Error::Shape(format!("action is {:?}, expected {:?}", action.dims(), [dim, dh, dim])));
        }
        if coaction.dims() != [dim, dim, dh] {
            return Err(Error::Shape(format!("coaction is {:?}, expected {:?}", coaction.dims(), [dim, dim, dh])));
        }
        let tolerance = hopf.tolerance();
        Ok(HopfModule {
            hopf,
            dim,
            action,
            coaction,
            tolerance,
        })
    }

    /// `M = U ⊗ H` with `(u ⊗ h) ⊲ k = u ⊗ hk` and `ρ(u ⊗ h) = Σ u ⊗ h₁ ⊗ h₂`.
    /// For `H = kG` this is `m_g ⊲ h = m_{gh}`, `ρ(m_g) = m_g ⊗ g`.
    /// Basis index of `u_a ⊗ b_i` is `a * dim(H) + i`.
    pub fn free(hopf: StructureHopf, u_dim: usize) -> Result<Self> {
        let dh = hopf.dim();
        let dim = u_dim * dh;
        let mut action = Tensor3::zeros(dim, dh, dim);
        let mut coaction = Tensor3::zeros(dim, dim, dh);
        for a in 0..u_dim {
            for i in 0..dh {
                let m = a * dh + i;
                for k in 0..dh {
                    for (l, c) in hopf.mult.fiber(i, k).iter().enumerate() {
                        action[(m, k, a * dh + l)] = *c;
                    }
                }
                for (j, k, v) in hopf.comult.nonzeros(i) {
                    coaction[(m, a * dh + j, k)] = v;
                }
            }
        }
        Self::new(hopf, action, coaction)
    }

    /// `ρ(v) = v ⊗ 1`, `v ⊲ h = η(h) v`.
    pub fn trivial(hopf: StructureHopf, dim: usize) -> Result<Self> {
        let dh = hopf.dim();
        let action = Tensor3::from_fn(dim, dh, dim, |m, h, n| if m == n { hopf.counit[h] } else { scalar::zero() });
        let coaction = Tensor3::from_fn(dim, dim, dh, |m, n, h| if m == n { hopf.unit[h] } else { scalar::zero() });
        Self::new(hopf, action, coaction)
    }

    /// Re-expresses the module in the basis given by the columns of `p`.
    pub fn change_basis(&self, p: &Matrix) -> Result<Self> {
        let n = self.dim;
        if p.shape() != (n, n) {
            return Err(Error::Shape(format!("basis change must be {n}x{n}")));
        }
        let p_inv = p
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Shape("basis change is singular".into()))?;
        let dh = self.hopf.dim();
        let mut action = Tensor3::zeros(n, dh, n);
        let mut coaction = Tensor3::zeros(n, n, dh);
        for m in 0..n {
            for h in 0..dh {
                // image of new basis vector m, in old coordinates
                let mut img_act = vec![scalar::zero(); n];
                let mut img_co = vec![scalar::zero(); n];
                for a in 0..n {
                    let pa = p[(a, m)];
                    if pa == scalar::zero() {
                        continue;
                    }
                    for b in 0..n {
                        img_act[b] += pa * self.action[(a, h, b)];
                        img_co[b] += pa * self.coaction[(a, b, h)];
                    }
                }
                for k in 0..n {
                    let mut act = scalar::zero();
                    let mut co = scalar::zero();
                    for b in 0..n {
                        act += p_inv[(k, b)] * img_act[b];
                        co += p_inv[(k, b)] * img_co[b];
                    }
                    action[(m, h, k)] = act;
                    coaction[(m, k, h)] = co;
                }
            }
        }
        let mut out = Self::new(self.hopf.clone(), action, coaction)?;
        out.tolerance = self.tolerance;
        Ok(out)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        self.tolerance = scalar::check_tolerance(tolerance)?;
        Ok(self)
    }

    pub fn hopf(&self) -> &StructureHopf {
        &self.hopf
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn action(&self) -> &Tensor3 {
        &self.action
    }
    pub fn action_mut(&mut self) -> &mut Tensor3 {
        &mut self.action
    }
    pub fn coaction(&self) -> &Tensor3 {
        &self.coaction
    }
    pub fn coaction_mut(&mut self) -> &mut Tensor3 {
        &mut self.coaction
    }
    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// `v ⊲ b_h` for a coordinate vector `v`.
    fn act(&self, v: &[Scalar], h: usize) -> Vec<Scalar> {
        let mut out = vec![scalar::zero(); self.dim];
        for (m, c) in StructureHopf::nz_support(v) {
            for (n, x) in self.action.fiber(m, h).iter().enumerate() {
                out[n] += c * x;
            }
        }
        out
    }

    /// `ρ(v)` as a `dim × dim(H)` matrix.
    fn coact(&self, v: &[Scalar]) -> Matrix {
        let dh = self.hopf.dim();
        let mut out = Matrix::zeros(self.dim, dh);
        for (m, c) in StructureHopf::nz_support(v) {
            for n in 0..self.dim {
                for (x, y) in self.coaction.fiber(m, n).iter().enumerate() {
                    out[(n, x)] += c * y;
                }
            }
        }
        out
    }
}

fn comodule_trackers(m: &HopfModule) -> (Report, Report) {
    let h = &m.hopf;
    let dh = h.dim();
    let n = m.dim;
    let mut coassoc = Tracker::new("comodule.coassoc", m.tolerance);
    let mut counit = Tracker::new("comodule.counit", m.tolerance);
    for e in 0..n {
        let co = m.coaction.nonzeros(e);
        // (ρ⊗id)ρ and (id⊗Δ)ρ as b ⊗ y ⊗ x
        let mut lhs = Tensor3::zeros(n, dh, dh);
        let mut rhs = Tensor3::zeros(n, dh, dh);
        for &(a, x, v) in &co {
            for (b, y, w) in m.coaction.nonzeros(a) {
                lhs[(b, y, x)] += v * w;
            }
            for (y, xx, w) in h.comult.nonzeros(x) {
                rhs[(a, y, xx)] += v * w;
            }
        }
        coassoc.record(max_dist(&lhs.data, &rhs.data), || format!("e{e}"));
        let mut back = vec![scalar::zero(); n];
        for &(b, x, v) in &co {
            back[b] += v * h.counit[x];
        }
        let target: Vec<Scalar> = (0..n).map(|b| delta(e, b)).collect();
        counit.record(max_dist(&back, &target), || format!("e{e}"));
    }
    (coassoc.finish(), counit.finish())
}

/// `(ρ⊗id)∘ρ = (id⊗Δ)∘ρ` and `(id⊗η)∘ρ = id`.
pub fn check_comodule(m: &HopfModule) -> Report {
    let (a, b) = comodule_trackers(m);
    Report::combine("comodule", &[a, b])
}

/// Module axioms, comodule axioms, and `ρ(m ⊲ h) = Σ m₀ ⊲ h₁ ⊗ m₁ h₂`.
pub fn check_hopf_module(m: &HopfModule) -> Report {
    let h = &m.hopf;
    let dh = h.dim();
    let n = m.dim;
    let tol = m.tolerance;

    let mut assoc = Tracker::new("module.assoc", tol);
    let mut unit = Tracker::new("module.unit", tol);
    for e in 0..n {
        let basis: Vec<Scalar> = (0..n).map(|k| delta(e, k)).collect();
        for x in 0..dh {
            let once = m.act(&basis, x);
            for y in 0..dh {
                if h.undefined(x, y) {
                    assoc.artifact();
                    continue;
                }
                let lhs = m.act(&once, y);
                let mut rhs = vec![scalar::zero(); n];
                for (l, c) in StructureHopf::nz_support(h.mult.fiber(x, y)) {
                    for (k, v) in m.act(&basis, l).into_iter().enumerate() {
                        rhs[k] += c * v;
                    }
                }
                assoc.record(max_dist(&lhs, &rhs), || format!("(e{e},{},{})", h.label(x), h.label(y)));
            }
        }
        let mut by_unit = vec![scalar::zero(); n];
        for (l, u) in StructureHopf::nz_support(&h.unit) {
            for (k, v) in m.act(&basis, l).into_iter().enumerate() {
                by_unit[k] += u * v;
            }
        }
        unit.record(max_dist(&by_unit, &basis), || format!("e{e}"));
    }

    let (coassoc, counit) = comodule_trackers(m);

    let mut compat = Tracker::new("hopf_module.compat", tol);
    for e in 0..n {
        let basis: Vec<Scalar> = (0..n).map(|k| delta(e, k)).collect();
        let co = m.coaction.nonzeros(e);
        for x in 0..dh {
            let dx = h.comult.nonzeros(x);
            if co.iter().any(|&(_, y, _)| dx.iter().any(|&(_, q, _)| h.undefined(y, q))) {
                compat.artifact();
                continue;
            }
            let lhs = m.coact(&m.act(&basis, x));
            let mut rhs = Matrix::zeros(n, dh);
            for &(a, y, v) in &co {
                let a_vec: Vec<Scalar> = (0..n).map(|k| delta(a, k)).collect();
                for &(p, q, w) in &dx {
                    let acted = m.act(&a_vec, p);
                    for (r, z) in StructureHopf::nz_support(h.mult.fiber(y, q)) {
                        for (b, c) in acted.iter().enumerate() {
                            rhs[(b, r)] += v * w * z * c;
                        }
                    }
                }
            }
            compat.record(linalg::max_abs(&(lhs - rhs)), || format!("(e{e},{})", h.label(x)));
        }
    }
    Report::combine(
        "hopf_module",
        &[assoc.finish(), unit.finish(), coassoc, counit, compat.finish()],
    )
}

/// The linear map `m ↦ ρ(m) - m ⊗ 1` as a `(dim·dim(H)) × dim` matrix.
fn coinvariant_system(m: &HopfModule) -> Matrix {
    let dh = m.hopf.dim();
    let n = m.dim;
    let mut l = Matrix::zeros(n * dh, n);
    for e in 0..n {
        for b in 0..n {
            for x in 0..dh {
                let mut v = m.coaction[(e, b, x)];
                if e == b {
                    v -= m.hopf.unit[x];
                }
                l[(b * dh + x, e)] = v;
            }
        }
    }
    l
}

/// Orthonormal basis (columns) of `M^{coH} = {m : ρ(m) = m ⊗ 1}`.
pub fn coinvariants(m: &HopfModule) -> Matrix {
    linalg::null_space(&coinvariant_system(m), m.tolerance)
}

/// Outcome of [`verify_structure_theorem`].
#[derive(Debug, Clone, PartialEq)]
pub struct StructureTheorem {
    pub report: Report,
    pub coinvariant_dim: usize,
    /// `σ_min / σ_max` of the canonical map (0 when it is not square).
    pub inverse_condition: f64,
}

/// Builds `M^{coH} ⊗ H → M`, `v ⊗ h ↦ v ⊲ h`, and checks that it is an
/// isomorphism intertwining both the action and the coaction.
pub fn verify_structure_theorem(m: &HopfModule) -> StructureTheorem {
    let tol = m.tolerance;
    let axioms = check_hopf_module(m);
    let basis = coinvariants(m);
    let r = basis.ncols();
    if !axioms.passed {
        let mut report = Report::fail("structure_theorem", "input is not a Hopf module");
        report.max_residual = axioms.max_residual;
        return StructureTheorem {
            report,
            coinvariant_dim: r,
            inverse_condition: 0.0,
        };
    }
    let h = &m.hopf;
    let dh = h.dim();
    let n = m.dim;
    let vecs: Vec<Vec<Scalar>> = (0..r).map(|a| basis.column(a).iter().cloned().collect()).collect();

    let mut canon = Matrix::zeros(n, r * dh);
    for (a, v) in vecs.iter().enumerate() {
        for x in 0..dh {
            for (k, c) in m.act(v, x).into_iter().enumerate() {
                canon[(k, a * dh + x)] = c;
            }
        }
    }

    let mut dims = Tracker::new("structure.dim", 0.5);
    dims.record((n as f64 - (r * dh) as f64).abs(), || format!("dim M = {n}, dim M^coH · dim H = {}", r * dh));

    let inv_cond = linalg::inverse_condition(&canon);
    let mut invertible = Tracker::new("structure.invertible", tol);
    // residual is the distance from singularity measured against tolerance
    let singular_residual = if inv_cond > tol { 0.0 } else { 1.0 - inv_cond };
    invertible.record(singular_residual, || format!("σ_min/σ_max = {inv_cond:.3e}"));

    let mut action = Tracker::new("structure.action", tol);
    let mut coaction = Tracker::new("structure.coaction", tol);
    for (a, v) in vecs.iter().enumerate() {
        for x in 0..dh {
            let image = m.act(v, x);
            for y in 0..dh {
                if h.undefined(x, y) {
                    action.artifact();
                    continue;
                }
                let lhs = m.act(&image, y);
                let mut rhs = vec![scalar::zero(); n];
                for (l, c) in StructureHopf::nz_support(h.mult.fiber(x, y)) {
                    for (k, w) in m.act(v, l).into_iter().enumerate() {
                        rhs[k] += c * w;
                    }
                }
                action.record(max_dist(&lhs, &rhs), || format!("(v{a},{},{})", h.label(x), h.label(y)));
            }
            let lhs = m.coact(&image);
            let mut rhs = Matrix::zeros(n, dh);
            for (p, q, w) in h.comult.nonzeros(x) {
                for (k, c) in m.act(v, p).into_iter().enumerate() {
                    rhs[(k, q)] += w * c;
                }
            }
            coaction.record(linalg::max_abs(&(lhs - rhs)), || format!("(v{a},{})", h.label(x)));
        }
    }
    StructureTheorem {
        report: Report::combine(
            "structure_theorem",
            &[dims.finish(), invertible.finish(), action.finish(), coaction.finish()],
        ),
        coinvariant_dim: r,
        inverse_condition: inv_cond,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::real;

    fn kzn(n: i64) -> StructureHopf {
        make_group_hopf(&AbelianGroup::cyclic(n).unwrap(), 0).unwrap()
    }

    #[test]
    fn kz2_shape_and_antipode() {
        let h = kzn(2);
        assert_eq!(h.dim(), 2);
        assert_eq!(h.mult()[(1, 1, 0)], scalar::one());
        assert_eq!(h.antipode(), &Matrix::identity(2, 2));
    }

    #[test]
    fn kz3_antipode_is_inversion() {
        let h = kzn(3);
        assert_eq!(h.antipode()[(1, 2)], scalar::one());
        assert_eq!(h.antipode()[(2, 1)], scalar::one());
        assert_eq!(h.antipode()[(0, 0)], scalar::one());
    }

    #[test]
    fn truncated_z_slice() {
        let h = make_group_hopf(&AbelianGroup::free(1), 2).unwrap();
        assert_eq!(h.dim(), 5);
        // exponents -2..=2; (-2)+(-1) and 2+1 etc. leave the slice
        let out: usize = h.undefined_products().len();
        // pairs (a,b) with |a+b| > 2 among a,b in [-2,2]: 3 + 3 = 6
        assert_eq!(out, 6);
        let r = check_algebra(&h);
        assert!(r.passed, "{r}");
        assert!(r.truncation_artifacts > 0);
        assert!(check_hopf(&h).passed);
        assert_eq!(make_group_hopf(&AbelianGroup::free(1), 0), Err(Error::TruncationRequired));
    }

    #[test]
    fn group_algebras_pass_all_checks() {
        for n in [2, 3, 4, 6] {
            let h = kzn(n);
            for r in [check_algebra(&h), check_coalgebra(&h), check_bialgebra(&h), check_antipode(&h)] {
                assert!(r.passed, "Z_{n}: {r}");
                assert_eq!(r.max_residual, 0.0);
            }
        }
        let k = make_group_hopf(&AbelianGroup::new(0, vec![2, 2]).unwrap(), 0).unwrap();
        assert!(check_hopf(&k).passed);
    }

    #[test]
    fn ground_field_passes() {
        let h = StructureHopf::ground_field();
        assert!(check_hopf(&h).passed);
        let c = CqtForm::new(h.clone(), Matrix::from_element(1, 1, scalar::one())).unwrap();
        assert!(check_cqt(&c).passed);
    }

    #[test]
    fn perturbed_unit_entry_fails_algebra() {
        let mut h = kzn(2);
        h.mult_mut()[(0, 0, 0)] += real(0.01);
        let r = check_algebra(&h);
        assert!(!r.passed);
        assert!(r.witness.unwrap().starts_with("algebra."));
    }

    #[test]
    fn random_comult_fails_coalgebra() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut h = kzn(3);
        *h.comult_mut() = Tensor3::from_fn(3, 3, 3, |_, _, _| real(rng.random_range(-1.0..1.0)));
        let r = check_coalgebra(&h);
        assert!(!r.passed);
        assert!(r.witness.is_some());
    }

    #[test]
    fn identity_antipode_fails_on_z3() {
        let mut h = kzn(3);
        *h.antipode_mut() = Matrix::identity(3, 3);
        let r = check_antipode(&h);
        assert!(!r.passed);
        assert_eq!(r.witness.as_deref(), Some("g(1)"));
    }

    #[test]
    fn perturbed_bialgebra_fails() {
        let mut h = kzn(3);
        h.mult_mut()[(1, 1, 0)] += real(0.1);
        assert!(!check_bialgebra(&h).passed);
    }

    #[test]
    fn sign_form_on_z2_is_cqt() {
        let g = AbelianGroup::cyclic(2).unwrap();
        let b = Bicharacter::new(g, vec![vec![real(-1.0)]]).unwrap();
        let c = bicharacter_to_cqt(&b, 0).unwrap();
        assert_eq!(c.form[(1, 1)], real(-1.0));
        assert_eq!(c.form[(0, 1)], real(1.0));
        let r = check_cqt(&c);
        assert!(r.passed, "{r}");
    }

    #[test]
    fn constant_two_form_fails_multiplicativity() {
        let c = CqtForm::new(kzn(2), Matrix::from_element(2, 2, real(2.0))).unwrap();
        let r = check_cqt(&c);
        assert!(!r.passed);
        // the commutation relation holds, multiplicativity does not: 2 vs 4
        assert!(r.witness.unwrap().starts_with("cqt.right"));
        assert!((r.max_residual - 2.0).abs() < 1e-12);
    }

    #[test]
    fn trivial_form_is_cqt() {
        for n in [2, 3, 5] {
            let c = CqtForm::new(kzn(n), Matrix::from_element(n as usize, n as usize, scalar::one())).unwrap();
            assert!(check_cqt(&c).passed);
        }
    }

    #[test]
    fn q_form_on_truncated_z() {
        let b = Bicharacter::new(AbelianGroup::free(1), vec![vec![real(0.5)]]).unwrap();
        let c = bicharacter_to_cqt(&b, 2).unwrap();
        // exponents -2..=2: ⟨g^2, g^-1⟩ = 0.5^-2
        assert!((c.form[(4, 1)] - real(4.0)).norm() < 1e-12);
        let r = check_cqt(&c);
        assert!(r.passed, "{r}");
        assert!(r.truncation_artifacts > 0);
    }

    #[test]
    fn comodule_examples() {
        let t = HopfModule::trivial(kzn(2), 3).unwrap();
        assert!(check_comodule(&t).passed);
        let f = HopfModule::free(kzn(2), 2).unwrap();
        assert!(check_comodule(&f).passed);
        assert!(check_hopf_module(&f).passed);

        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut bad = f.clone();
        *bad.coaction_mut() = Tensor3::from_fn(4, 4, 2, |_, _, _| real(rng.random_range(-1.0..1.0)));
        let r = check_comodule(&bad);
        assert!(!r.passed);
        assert!(r.witness.is_some());
    }

    #[test]
    fn trivial_action_with_grading_coaction_breaks_compatibility() {
        let h = kzn(2);
        let free = HopfModule::free(h.clone(), 1).unwrap();
        let trivial = HopfModule::trivial(h.clone(), 2).unwrap();
        let mixed = HopfModule::new(h, trivial.action().clone(), free.coaction().clone()).unwrap();
        assert!(check_comodule(&mixed).passed);
        let r = check_hopf_module(&mixed);
        assert!(!r.passed);
        assert!(r.witness.unwrap().starts_with("hopf_module.compat"));
    }

    #[test]
    fn ground_field_module() {
        let m = HopfModule::trivial(StructureHopf::ground_field(), 1).unwrap();
        assert!(check_hopf_module(&m).passed);
        let st = verify_structure_theorem(&m);
        assert!(st.report.passed, "{}", st.report);
        assert_eq!(st.coinvariant_dim, 1);
        assert!((st.inverse_condition - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coinvariants_of_free_module() {
        let m = HopfModule::free(kzn(3), 2).unwrap();
        let c = coinvariants(&m);
        assert_eq!(c.ncols(), 2);
        // spanned by u_a ⊗ e, i.e. indices 0 and 3
        for col in c.column_iter() {
            for (k, z) in col.iter().enumerate() {
                if k % 3 != 0 {
                    assert!(z.norm() < 1e-12);
                }
            }
        }
        let t = HopfModule::trivial(kzn(3), 4).unwrap();
        assert_eq!(coinvariants(&t).ncols(), 4);
    }

    #[test]
    fn comodule_without_invariants() {
        // one-dimensional span of g in kZ_2: ρ(v) = v ⊗ g
        let h = kzn(2);
        let coaction = Tensor3::from_fn(1, 1, 2, |_, _, x| if x == 1 { scalar::one() } else { scalar::zero() });
        let action = Tensor3::from_fn(1, 2, 1, |_, _, _| scalar::one());
        let m = HopfModule::new(h, action, coaction).unwrap();
        assert!(check_comodule(&m).passed);
        assert_eq!(coinvariants(&m).ncols(), 0);
    }

    #[test]
    fn structure_theorem_on_free_module() {
        let m = HopfModule::free(kzn(3), 2).unwrap();
        let st = verify_structure_theorem(&m);
        assert!(st.report.passed, "{}", st.report);
        assert_eq!(st.coinvariant_dim * 3, m.dim());
    }

    #[test]
    fn structure_theorem_rejects_non_hopf_module() {
        let h = kzn(2);
        let free = HopfModule::free(h.clone(), 1).unwrap();
        let trivial = HopfModule::trivial(h.clone(), 2).unwrap();
        let mixed = HopfModule::new(h, trivial.action().clone(), free.coaction().clone()).unwrap();
        let st = verify_structure_theorem(&mixed);
        assert!(!st.report.passed);
        assert_eq!(st.report.witness.as_deref(), Some("input is not a Hopf module"));
    }

    #[test]
    fn shape_errors() {
        let h = kzn(2);
        assert!(matches!(
            StructureHopf::new(vec!["a".into()], h.mult().clone(), vec![scalar::one()], h.comult().clone(), vec![scalar::one()], Matrix::identity(1, 1)),
            Err(Error::Shape(_))
        ));
        assert!(matches!(CqtForm::new(h.clone(), Matrix::identity(3, 3)), Err(Error::Shape(_))));
        assert!(matches!(HopfModule::new(h, Tensor3::zeros(2, 3, 2), Tensor3::zeros(2, 2, 2)), Err(Error::Shape(_))));
    }
}
