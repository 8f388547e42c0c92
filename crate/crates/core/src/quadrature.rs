//! Fixed-order Gauss–Legendre rule for segment integrals.

/// Nodes on [0, 1] and weights summing to 1 (5-point rule, exact for degree 9).
pub const GL5: [(f64, f64); 5] = [
    (0.046_910_077_030_668_004, 0.118_463_442_528_094_54),
    (0.230_765_344_947_158_45, 0.239_314_335_249_683_23),
    (0.5, 0.284_444_444_444_444_45),
    (0.769_234_655_052_841_6, 0.239_314_335_249_683_23),
    (0.953_089_922_969_332, 0.118_463_442_528_094_54),
];

/// `∫₀¹ f(s) ds` split into `pieces` equal parts, 5-point rule on each.
pub fn integrate_unit(pieces: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    let pieces = pieces.max(1);
    let h = 1.0 / pieces as f64;
    let mut acc = 0.0;
    for p in 0..pieces {
        let s0 = p as f64 * h;
        let mut part = 0.0;
        for (node, w) in GL5 {
            part += w * f(s0 + node * h);
        }
        acc += part * h;
    }
    acc
}
