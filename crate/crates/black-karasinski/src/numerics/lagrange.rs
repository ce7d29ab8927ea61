//! Lagrange interpolation at Hermite zeros, expanded to monomial form.
//!
//! The partial-moment operators consume monomial coefficients, so the
//! interpolant is built by Newton divided differences and expanded, rather
//! than kept in barycentric form. Conditioning is fine for the node counts
//! used here (the pricing pipeline runs at k = 5, the cap is 64).

use super::hermite::hermite_zeros;
use super::polynomial::Polynomial;
use crate::{Error, Result};

/// Interpolating polynomial of degree <= n-1 through
/// `(h_{n,k}, values[k])` for the n zeros of H_n.
pub fn lagrange_on_hermite_nodes(values: &[f64]) -> Result<Polynomial> {
    if values.is_empty() {
        return Err(Error::invalid("lagrange_on_hermite_nodes: no values"));
    }
    let nodes = hermite_zeros(values.len())?;
    Ok(newton_interpolation(&nodes, values))
}

/// Divided-difference interpolation through arbitrary distinct nodes.
pub(crate) fn newton_interpolation(xs: &[f64], ys: &[f64]) -> Polynomial {
    let n = xs.len();
    let mut dd = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j]);
        }
    }
    let mut poly = Polynomial::constant(dd[n - 1]);
    for i in (0..n - 1).rev() {
        poly = poly.mul_linear(xs[i]).add(&Polynomial::constant(dd[i]));
    }
    poly
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_reproduce() {
        for n in 1..=8 {
            let p = lagrange_on_hermite_nodes(&vec![2.5; n]).unwrap();
            assert_eq!(p.degree(), 0);
            assert!((p.eval(0.3) - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn cubic_through_four_nodes_is_recovered_exactly() {
        let nodes = hermite_zeros(4).unwrap();
        let values: Vec<f64> = nodes.iter().map(|&z| z * z * z).collect();
        let p = lagrange_on_hermite_nodes(&values).unwrap();
        let c = p.coeffs();
        assert!(c[0].abs() < 1e-12 && c[1].abs() < 1e-12 && c[2].abs() < 1e-12);
        assert!((c[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interpolant_matches_exp_at_all_nodes() {
        let nodes = hermite_zeros(5).unwrap();
        let values: Vec<f64> = nodes.iter().map(|&z| (-z).exp()).collect();
        let p = lagrange_on_hermite_nodes(&values).unwrap();
        assert_eq!(p.degree(), 4);
        let vmax = values.iter().fold(0f64, |m, v| m.max(v.abs()));
        for (&z, &v) in nodes.iter().zip(&values) {
            assert!((p.eval(z) - v).abs() <= 1e-9 * (1.0 + vmax));
        }
    }

    #[test]
    fn projection_is_identity_on_low_degree_polynomials() {
        // L_n reproduces any polynomial of degree < n
        let coeffs = [0.3, -1.2, 0.0, 2.0, -0.7];
        let target = Polynomial::new(coeffs.to_vec());
        for n in 5..=12usize {
            let nodes = hermite_zeros(n).unwrap();
            let values: Vec<f64> = nodes.iter().map(|&z| target.eval(z)).collect();
            let p = lagrange_on_hermite_nodes(&values).unwrap();
            for (i, &c) in coeffs.iter().enumerate() {
                let got = p.coeffs().get(i).copied().unwrap_or(0.0);
                assert!((got - c).abs() < 1e-8, "n={n} coeff {i}: {got} vs {c}");
            }
        }
    }
}
