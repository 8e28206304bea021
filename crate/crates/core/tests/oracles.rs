//! Brute-force oracles, independent of the library's twist recursion.
//!
//! The rewriting here works on plain `Vec<(usize, bool)>` words with a
//! hand-written generator rule, so it shares no code with `wick`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use wickstat_core::fock::{build_fock, positivity_report, Positivity};
use wickstat_core::groups::{AbelianGroup, Bicharacter};
use wickstat_core::scalar::real;
use wickstat_core::{Alphabet, TwistSpec};

type Raw = Vec<(usize, bool)>;

/// Normal orders by repeatedly rewriting the leftmost `x*_i x_j`.
fn brute_normal_order(word: Raw, factor: impl Fn(usize, usize) -> Complex64, g: impl Fn(usize, usize) -> Complex64) -> BTreeMap<Raw, Complex64> {
    let mut todo = vec![(word, Complex64::new(1.0, 0.0))];
    let mut out: BTreeMap<Raw, Complex64> = BTreeMap::new();
    while let Some((w, c)) = todo.pop() {
        match (0..w.len().saturating_sub(1)).find(|&k| w[k].1 && !w[k + 1].1) {
            None => *out.entry(w).or_default() += c,
            Some(k) => {
                let (i, j) = (w[k].0, w[k + 1].0);
                let mut swapped = w.clone();
                swapped.swap(k, k + 1);
                todo.push((swapped, c * factor(i, j)));
                let gij = g(i, j);
                if gij != Complex64::new(0.0, 0.0) {
                    let mut cut = w[..k].to_vec();
                    cut.extend_from_slice(&w[k + 2..]);
                    todo.push((cut, c * gij));
                }
            }
        }
    }
    out
}

fn vacuum_value(n: usize, q: f64) -> f64 {
    // <x^n, x^n> = constant term of x*^n x^n; the star of the rule factor
    // ε(1, -1) is 1/q for ε(1, 1) = q
    let word: Raw = (0..n).map(|_| (0, true)).chain((0..n).map(|_| (0, false))).collect();
    let nf = brute_normal_order(word, |_, _| real(1.0 / q), |_, _| real(1.0));
    nf.get(&Vec::new()).copied().unwrap_or_default().re
}

fn single(q: f64) -> TwistSpec {
    let g = AbelianGroup::free(1);
    let b = Bicharacter::new(g.clone(), vec![vec![real(q)]]).unwrap();
    let a = Alphabet::new(g, vec![("x".into(), vec![1])]).unwrap();
    TwistSpec::with_identity_pairing(b, a).unwrap()
}

#[test]
fn q_gram_oracle_is_pinned() {
    let oracle: Vec<f64> = (0..=5).map(|n| vacuum_value(n, 0.5)).collect();
    assert_eq!(oracle, vec![1.0, 1.0, 3.0, 21.0, 315.0, 9765.0]);
}

#[test]
fn q_gram_matches_oracle() {
    const PINNED: [f64; 6] = [1.0, 1.0, 3.0, 21.0, 315.0, 9765.0];
    let f = build_fock(&single(0.5), 5).unwrap();
    for (n, want) in PINNED.iter().enumerate() {
        let got = f.gram(n).unwrap()[(0, 0)];
        assert!((got - real(*want)).norm() <= 1e-9 * want.max(1.0), "n={n}: {got}");
    }
    for p in positivity_report(&f, 5) {
        assert_eq!(p.verdict, Positivity::PositiveDefinite);
    }
}

#[test]
fn boson_gram_is_factorial() {
    let oracle: Vec<f64> = (0..=6).map(|n| vacuum_value(n, 1.0)).collect();
    assert_eq!(oracle, vec![1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0]);
    let f = build_fock(&single(1.0), 6).unwrap();
    for (n, want) in oracle.iter().enumerate() {
        assert_eq!(f.gram(n).unwrap()[(0, 0)], real(*want));
    }
}

#[test]
fn fermion_gram_blocks_match_oracle() {
    // three fermionic modes on Z_2: every Gram entry against brute force
    let g = AbelianGroup::cyclic(2).unwrap();
    let b = Bicharacter::new(g.clone(), vec![vec![real(-1.0)]]).unwrap();
    let a = Alphabet::new(g, (0..3).map(|k| (format!("x{k}"), vec![1])).collect()).unwrap();
    let t = TwistSpec::with_identity_pairing(b, a).unwrap();
    let f = build_fock(&t, 3).unwrap();
    for d in 0..=3 {
        let words = f.words(d);
        for (r, u) in words.iter().enumerate() {
            for (c, v) in words.iter().enumerate() {
                let mut raw: Raw = u.letters().iter().rev().map(|l| (l.gen, true)).collect();
                raw.extend(v.letters().iter().map(|l| (l.gen, false)));
                let nf = brute_normal_order(raw, |_, _| real(-1.0), |i, j| real(if i == j { 1.0 } else { 0.0 }));
                let want = nf.get(&Vec::new()).copied().unwrap_or_default();
                assert_eq!(f.gram(d).unwrap()[(r, c)], want, "degree {d} ({r},{c})");
            }
        }
    }
}
