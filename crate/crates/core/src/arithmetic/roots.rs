//! Complex root approximation with certified inclusion discs.
//!
//! Roots are found with the Aberth–Ehrlich iteration, polished by Newton
//! steps, and certified with the classical inclusion radius
//! `n·|p(z)|/|p'(z)|` (a disc of that radius around any `z` contains a root
//! of a degree-`n` polynomial), inflated by a rounding-error bound on the
//! evaluation of `p`. Discs that are pairwise disjoint each isolate one root.

use num_complex::Complex64;
use serde::Serialize;

use super::poly::Poly;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CertifiedRoot {
    pub re: f64,
    pub im: f64,
    /// Radius of a disc around `(re, im)` that contains the root.
    pub radius: f64,
}

impl CertifiedRoot {
    pub fn z(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn modulus(&self) -> f64 {
        self.z().norm()
    }

    /// Certified lower and upper bounds on the modulus.
    pub fn modulus_bounds(&self) -> (f64, f64) {
        let m = self.modulus();
        ((m - self.radius).max(0.0), m + self.radius)
    }

    pub fn is_real(&self) -> bool {
        self.im.abs() <= self.radius
    }
}

/// Evaluates `p` and `p'` at `z`, returning also a running error bound for `p(z)`.
fn eval_with_bound(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64, f64) {
    let n = coeffs.len();
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    let mut mag = 0.0;
    let r = z.norm();
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
        mag = mag * r + c.abs();
    }
    // Horner rounding bound, generous constant for complex multiply-adds
    let eps = f64::EPSILON * (4.0 * n as f64 + 2.0);
    (p, dp, eps * mag)
}

/// Approximates all complex roots of a squarefree polynomial.
pub fn aberth(p: &Poly) -> Vec<Complex64> {
    let deg = p.degree().unwrap_or(0);
    if deg == 0 {
        return Vec::new();
    }
    let coeffs = p.monic().coeffs_f64();
    if deg == 1 {
        return vec![Complex64::new(-coeffs[0], 0.0)];
    }
    let bound = p.monic().root_bound();
    let mut zs: Vec<Complex64> = (0..deg)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / deg as f64 + 0.4;
            Complex64::from_polar(0.5 * bound, ang)
        })
        .collect();
    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for i in 0..deg {
            let (pv, dpv, _) = eval_with_bound(&coeffs, zs[i]);
            if pv.norm() == 0.0 {
                continue;
            }
            let ratio = pv / dpv;
            let sum: Complex64 = (0..deg).filter(|&j| j != i).map(|j| 1.0 / (zs[i] - zs[j])).sum();
            let step = ratio / (1.0 - ratio * sum);
            if step.is_finite() {
                zs[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + zs[i].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    for z in zs.iter_mut() {
        for _ in 0..3 {
            let (pv, dpv, _) = eval_with_bound(&coeffs, *z);
            if dpv.norm() == 0.0 {
                break;
            }
            let step = pv / dpv;
            if step.is_finite() {
                *z -= step;
            }
        }
    }
    zs
}

/// Certified roots of a squarefree polynomial, or `None` if the inclusion
/// discs fail to separate.
pub fn certified_roots(p: &Poly) -> Option<Vec<CertifiedRoot>> {
    let deg = p.degree()?;
    let monic = p.monic();
    let coeffs = monic.coeffs_f64();
    let zs = aberth(&monic);
    let mut out = Vec::with_capacity(deg);
    for z in zs {
        let (pv, dpv, err) = eval_with_bound(&coeffs, z);
        let dn = dpv.norm();
        if dn == 0.0 {
            return None;
        }
        let radius = deg as f64 * (pv.norm() + err) / (dn - deg as f64 * err).max(dn * 0.5);
        // snap conjugate-symmetric real roots
        let im = if z.im.abs() <= radius { 0.0 } else { z.im };
        out.push(CertifiedRoot { re: z.re, im, radius: radius.max(f64::MIN_POSITIVE) });
    }
    for i in 0..out.len() {
        for j in i + 1..out.len() {
            if (out[i].z() - out[j].z()).norm() <= out[i].radius + out[j].radius {
                return None;
            }
        }
    }
    out.sort_by(|a, b| b.modulus().total_cmp(&a.modulus()).then(b.re.total_cmp(&a.re)).then(a.im.total_cmp(&b.im)));
    Some(out)
}

/// Real roots of a polynomial with float coefficients (any multiplicity),
/// used where only an approximation is needed.
pub fn complex_roots_f64(coeffs: &[f64]) -> Vec<Complex64> {
    let p = Poly::new(
        coeffs
            .iter()
            .map(|c| num_rational::BigRational::from_float(*c).unwrap_or_default())
            .collect(),
    );
    aberth(&p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_roots_are_certified() {
        let roots = certified_roots(&Poly::from_ints([-1, -1, 1])).unwrap();
        assert_eq!(roots.len(), 2);
        assert!((roots[0].re - 1.618_033_988_749_895).abs() < 1e-12);
        assert!((roots[1].re + 0.618_033_988_749_895).abs() < 1e-12);
        assert!(roots.iter().all(|r| r.radius < 1e-10 && r.is_real()));
    }

    #[test]
    fn gaussian_roots() {
        let roots = certified_roots(&Poly::from_ints([1, 0, 1])).unwrap();
        assert_eq!(roots.len(), 2);
        for r in roots {
            assert!((r.modulus() - 1.0).abs() < 1e-12);
            assert!(!r.is_real());
        }
    }

    #[test]
    fn cubic_pisot() {
        // x^3 - x - 1, the smallest Pisot number
        let roots = certified_roots(&Poly::from_ints([-1, -1, 0, 1])).unwrap();
        assert!((roots[0].re - 1.324_717_957_244_746).abs() < 1e-12);
        assert!(roots[1].modulus() < 1.0 && roots[2].modulus() < 1.0);
    }
}
