//! Benchmark inputs shared by the criterion targets.

use std::path::PathBuf;

use jacobi_core::{AdmissiblePair, Epsilon, HomPoly, ModularSymbol};

pub fn fixture_symbol(name: &str) -> ModularSymbol {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    ModularSymbol::parse(&text).unwrap()
}

pub fn pair(m: i64, d0: i64, r0: i64) -> AdmissiblePair {
    let eps = if d0 > 0 { Epsilon::Plus } else { Epsilon::Minus };
    AdmissiblePair::new(m, eps, d0, r0).unwrap()
}

/// A dense polynomial of degree `w` with small, varied coefficients.
pub fn dense_poly(w: usize, seed: i64) -> HomPoly {
    let coeffs: Vec<i64> = (0..=w as i64).map(|i| (i * 7 + seed * 3) % 11 - 5).collect();
    HomPoly::from_ints(&coeffs)
}
