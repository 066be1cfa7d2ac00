#![no_main]
use dopt_core::{MultiIndex, SemiAlgebraicSet, SparsePolynomial};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|input: (u8, Vec<(Vec<u8>, f64)>, Vec<(f64, f64)>, Vec<f64>)| {
    let (n, terms, bbox, x) = input;
    let n = usize::from(n % 5);
    let terms = terms.into_iter().map(|(e, c)| {
        let exps = e.into_iter().map(|k| u32::from(k % 16)).collect();
        (MultiIndex::new(exps), c)
    });
    let Ok(poly) = SparsePolynomial::new(n, terms) else {
        return;
    };
    let _ = poly.eval(&x);
    if let Ok(set) = SemiAlgebraicSet::new(bbox, vec![poly]) {
        let _ = set.contains(&x);
    }
});
