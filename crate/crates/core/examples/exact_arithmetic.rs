//! Exact arithmetic in Q(φ): field elements, certified signs and root isolation.

use std::cmp::Ordering;

use meyerlab::arithmetic::poly::Poly;
use meyerlab::arithmetic::roots::certified_roots;
use meyerlab::arithmetic::AlgebraicScalar;
use meyerlab::catalog;

fn main() {
    let sys = catalog::system("fibonacci");
    let field = sys.field();
    let phi = AlgebraicScalar::theta(field);
    let one = AlgebraicScalar::one(field);

    // φ² = φ + 1 holds exactly
    let lhs = &phi * &phi;
    let rhs = &phi + &one;
    println!("phi^2 = {lhs}, phi + 1 = {rhs}, equal: {}", lhs == rhs);

    // φ⁻¹ = φ − 1
    let inv = phi.inv().expect("nonzero");
    println!("1/phi = {inv} ~ {:.15}", inv.to_f64_accurate());

    // F_{n+1} − F_n φ alternates in sign and shrinks
    let (mut a, mut b) = (1i64, 1i64);
    for _ in 0..6 {
        let x = &AlgebraicScalar::from_int(field, b) - &(&AlgebraicScalar::from_int(field, a) * &phi);
        println!("F = ({a}, {b}): sign of {b} - {a} phi is {:+}", x.sign());
        (a, b) = (b, a + b);
    }
    let fraction = AlgebraicScalar::from_int(field, 13).scale(&num_rational::BigRational::new(1.into(), 8.into()));
    let cmp = phi.exact_cmp(&fraction);
    println!("phi {} 13/8", if cmp == Ordering::Less { "<" } else { ">" });

    // certified roots of x^2 - x - 3, the Perron root of the non-Pisot example
    let p = Poly::from_ints([-3, -1, 1]);
    for r in certified_roots(&p).expect("squarefree") {
        println!("root {:+.12} +/- {:.1e}", r.re, r.radius);
    }
}
