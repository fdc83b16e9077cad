use num_bigint::BigInt;

use super::GaussianRational;

/// Partial fractions of `1 / ((x−a)^p (x−b)^q)` in one variable.
///
/// Returns `(pole, order, coeff)` triples whose sum `Σ coeff/(x−pole)^order`
/// equals the product. For `a ≠ b` with `d = a − b`, the coefficient of
/// `(x−a)^{−(p−m)}` is `(−1)^m·C(q+m−1, m)·d^{−(q+m)}`, and symmetrically for `b`.
pub fn split_pole_product(
    a: &GaussianRational,
    p: u32,
    b: &GaussianRational,
    q: u32,
) -> Vec<(GaussianRational, u32, GaussianRational)> {
    if p == 0 {
        return vec![(b.clone(), q, GaussianRational::one())];
    }
    if q == 0 {
        return vec![(a.clone(), p, GaussianRational::one())];
    }
    if a == b {
        return vec![(a.clone(), p + q, GaussianRational::one())];
    }
    let d = a - b;
    let mut out = Vec::with_capacity((p + q) as usize);
    expand_side(a, p, &d, q, &mut out);
    expand_side(b, q, &(-&d), p, &mut out);
    out
}

fn expand_side(
    pole: &GaussianRational,
    order: u32,
    gap: &GaussianRational,
    other_order: u32,
    out: &mut Vec<(GaussianRational, u32, GaussianRational)>,
) {
    let gap_inv = gap.inv().expect("distinct poles");
    // gap^{-(other_order)} then multiply by gap^{-1} each step
    let mut gap_pow = gap_inv.powi(other_order as i64).expect("nonzero after inversion");
    for m in 0..order {
        let binom = binomial(other_order + m - 1, m);
        let mut c = GaussianRational::from_big_integer(binom) * &gap_pow;
        if m % 2 == 1 {
            c = -c;
        }
        out.push((pole.clone(), order - m, c));
        gap_pow = &gap_pow * &gap_inv;
    }
}

pub(crate) fn binomial(n: u32, k: u32) -> BigInt {
    let k = k.min(n.saturating_sub(k));
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub(crate) fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::from(1), |acc, i| acc * BigInt::from(i))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(parts: &[(GaussianRational, u32, GaussianRational)], x: &GaussianRational) -> GaussianRational {
        parts
            .iter()
            .fold(GaussianRational::zero(), |acc, (pole, ord, c)| acc + c * &(x - pole).powi(-(*ord as i64)).unwrap())
    }

    #[test]
    fn simple_distinct_poles() {
        // 1/((x+1)(x+2)) = 1/(x+1) - 1/(x+2)
        let a = GaussianRational::from_integer(-1);
        let b = GaussianRational::from_integer(-2);
        let parts = split_pole_product(&a, 1, &b, 1);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0], (a.clone(), 1, GaussianRational::one()));
        assert_eq!(parts[1], (b.clone(), 1, GaussianRational::from_integer(-1)));
    }

    #[test]
    fn repeated_poles_match_product_at_sample_points() {
        let a = GaussianRational::complex(1, 2);
        let b = GaussianRational::ratio(-3, 2);
        for (p, q) in [(1, 3), (3, 2), (4, 4), (2, 1)] {
            let parts = split_pole_product(&a, p, &b, q);
            for x in [GaussianRational::complex(5, -1), GaussianRational::ratio(7, 3)] {
                let lhs = (&x - &a).powi(-(p as i64)).unwrap() * (&x - &b).powi(-(q as i64)).unwrap();
                assert_eq!(eval(&parts, &x), lhs, "p={p} q={q}");
            }
        }
    }

    #[test]
    fn binomials_and_factorials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(0, 0), BigInt::from(1));
        assert_eq!(factorial(0), BigInt::from(1));
        assert_eq!(factorial(20), BigInt::from(2_432_902_008_176_640_000u64));
    }
}
