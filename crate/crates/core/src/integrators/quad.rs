//! Gauss-Legendre nodes and weights on [0, 1].

/// (node, weight) pairs; k-point rule is exact through polynomial degree
/// 2k - 1.
pub(crate) fn gauss_legendre_01(k: usize) -> Option<&'static [(f64, f64)]> {
    const GL1: [(f64, f64); 1] = [(0.5, 1.0)];
    const GL2: [(f64, f64); 2] = [
        (0.21132486540518713, 0.5),
        (0.7886751345948129, 0.5),
    ];
    const GL3: [(f64, f64); 3] = [
        (0.1127016653792583, 0.2777777777777778),
        (0.5, 0.4444444444444444),
        (0.8872983346207417, 0.2777777777777778),
    ];
    const GL4: [(f64, f64); 4] = [
        (0.06943184420297371, 0.17392742256872692),
        (0.33000947820757187, 0.32607257743127305),
        (0.6699905217924281, 0.32607257743127305),
        (0.9305681557970262, 0.17392742256872692),
    ];
    const GL5: [(f64, f64); 5] = [
        (0.046910077030668074, 0.11846344252809454),
        (0.23076534494715845, 0.23931433524968324),
        (0.5, 0.28444444444444444),
        (0.7692346550528415, 0.23931433524968324),
        (0.9530899229693319, 0.11846344252809454),
    ];
    match k {
        1 => Some(&GL1),
        2 => Some(&GL2),
        3 => Some(&GL3),
        4 => Some(&GL4),
        5 => Some(&GL5),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rules_integrate_monomials_exactly() {
        for k in 1..=5 {
            let rule = gauss_legendre_01(k).unwrap();
            for d in 0..=(2 * k - 1) {
                let quad: f64 = rule.iter().map(|&(x, w)| w * x.powi(d as i32)).sum();
                let exact = 1.0 / (d as f64 + 1.0);
                assert!(
                    (quad - exact).abs() < 1e-15,
                    "k={k} degree={d}: {quad} vs {exact}"
                );
            }
        }
    }
}
