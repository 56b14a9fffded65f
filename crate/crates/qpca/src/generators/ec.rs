//! Elliptic-curve arithmetic for the Kaliski generator.
//!
//! Curves have the special form `y² = x³ + c` over `F_p` with `p ≡ 2 (mod 3)`;
//! together with the point at infinity the rational points form a cyclic
//! additive group of order `p + 1`. Parameters stay at desk scale, so trial
//! division and plain chord/tangent formulas are all that is needed.

use std::fmt;

use crate::{Error, Result};

/// Parameters of the curve `y² = x³ + c` over `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurveParams {
    p: u64,
    c: u64,
}

impl CurveParams {
    pub fn new(p: u64, c: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Parameter(format!("{p} is not prime")));
        }
        if p % 3 != 2 {
            return Err(Error::Parameter(format!("prime {p} is not 2 mod 3")));
        }
        if c >= p {
            return Err(Error::Parameter(format!(
                "coefficient {c} out of range [0, {p})"
            )));
        }
        Ok(CurveParams { p, c })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn coefficient(&self) -> u64 {
        self.c
    }

    /// Whether `point` satisfies the curve equation (infinity always does).
    pub fn contains(&self, point: &EcPoint) -> bool {
        match *point {
            EcPoint::Infinity => true,
            EcPoint::Affine { x, y } => {
                x < self.p
                    && y < self.p
                    && mul_mod(y, y, self.p)
                        == add_mod(mul_mod(mul_mod(x, x, self.p), x, self.p), self.c, self.p)
            }
        }
    }

    /// All affine points in lexicographic (x, y) order.
    pub fn affine_points(&self) -> Vec<EcPoint> {
        // Square-root table: roots[s] = all y with y² = s (mod p).
        let mut roots = vec![Vec::new(); self.p as usize];
        for y in 0..self.p {
            roots[mul_mod(y, y, self.p) as usize].push(y);
        }
        let mut points = Vec::new();
        for x in 0..self.p {
            let rhs = add_mod(mul_mod(mul_mod(x, x, self.p), x, self.p), self.c, self.p);
            for &y in &roots[rhs as usize] {
                points.push(EcPoint::Affine { x, y });
            }
        }
        points
    }
}

/// A point of the curve group: affine coordinates or the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EcPoint {
    Affine { x: u64, y: u64 },
    Infinity,
}

impl EcPoint {
    pub fn affine(x: u64, y: u64) -> Self {
        EcPoint::Affine { x, y }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, EcPoint::Infinity)
    }
}

impl fmt::Display for EcPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EcPoint::Affine { x, y } => write!(f, "({x},{y})"),
            EcPoint::Infinity => write!(f, "O"),
        }
    }
}

/// Group law for `y² = x³ + c`: infinity is the identity, the inverse of
/// `(x, y)` is `(x, −y)`, chord/tangent otherwise.
pub fn ec_add(a: &EcPoint, b: &EcPoint, curve: &CurveParams) -> Result<EcPoint> {
    for point in [a, b] {
        if !curve.contains(point) {
            return Err(Error::Parameter(format!(
                "point {point} is not on y^2 = x^3 + {} mod {}",
                curve.c, curve.p
            )));
        }
    }
    let p = curve.p;
    let (x1, y1) = match *a {
        EcPoint::Infinity => return Ok(*b),
        EcPoint::Affine { x, y } => (x, y),
    };
    let (x2, y2) = match *b {
        EcPoint::Infinity => return Ok(*a),
        EcPoint::Affine { x, y } => (x, y),
    };

    if x1 == x2 && add_mod(y1, y2, p) == 0 {
        // b = -a; covers doubling a point with y = 0 as well.
        return Ok(EcPoint::Infinity);
    }
    let slope = if x1 == x2 {
        // Tangent; the curve has no x term, so y' = 3x² / 2y.
        let numer = mul_mod(3 % p, mul_mod(x1, x1, p), p);
        let denom = mul_mod(2 % p, y1, p);
        mul_mod(numer, mod_inverse(denom, p), p)
    } else {
        let numer = sub_mod(y2, y1, p);
        let denom = sub_mod(x2, x1, p);
        mul_mod(numer, mod_inverse(denom, p), p)
    };
    let x3 = sub_mod(sub_mod(mul_mod(slope, slope, p), x1, p), x2, p);
    let y3 = sub_mod(mul_mod(slope, sub_mod(x1, x3, p), p), y1, p);
    Ok(EcPoint::Affine { x: x3, y: y3 })
}

/// `k`-fold sum of `point` with itself; `0 · P` is infinity.
pub fn ec_scalar_mul(k: u64, point: &EcPoint, curve: &CurveParams) -> Result<EcPoint> {
    if !curve.contains(point) {
        return Err(Error::Parameter(format!(
            "point {point} is not on the curve"
        )));
    }
    let mut acc = EcPoint::Infinity;
    for _ in 0..k {
        acc = ec_add(&acc, point, curve)?;
    }
    Ok(acc)
}

/// Trial-division primality test; desk-scale inputs only.
pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d <= n / d {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + p as u128 - b as u128 % p as u128) % p as u128) as u64
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// Inverse of `a` modulo prime `p` by the extended Euclidean algorithm.
fn mod_inverse(a: u64, p: u64) -> u64 {
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1, "inverse of a non-unit requested");
    t0.rem_euclid(p as i128) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve() -> CurveParams {
        CurveParams::new(5, 1).unwrap()
    }

    fn group_elements() -> Vec<EcPoint> {
        let mut all = curve().affine_points();
        all.push(EcPoint::Infinity);
        all
    }

    #[test]
    fn curve_params_validation() {
        assert!(CurveParams::new(5, 1).is_ok());
        assert!(CurveParams::new(6, 1).is_err()); // composite
        assert!(CurveParams::new(7, 1).is_err()); // 7 = 1 mod 3
        assert!(CurveParams::new(5, 5).is_err()); // c out of range
    }

    #[test]
    fn point_set_of_reference_curve() {
        let pts = curve().affine_points();
        assert_eq!(
            pts,
            vec![
                EcPoint::affine(0, 1),
                EcPoint::affine(0, 4),
                EcPoint::affine(2, 2),
                EcPoint::affine(2, 3),
                EcPoint::affine(4, 0),
            ]
        );
    }

    #[test]
    fn doubling_and_chord() {
        let q = EcPoint::affine(2, 2);
        assert_eq!(ec_add(&q, &q, &curve()).unwrap(), EcPoint::affine(0, 4));
        assert_eq!(
            ec_add(&EcPoint::affine(0, 4), &q, &curve()).unwrap(),
            EcPoint::affine(4, 0)
        );
    }

    #[test]
    fn identity_and_inverse() {
        let c = curve();
        let p = EcPoint::affine(4, 0);
        assert_eq!(ec_add(&EcPoint::Infinity, &p, &c).unwrap(), p);
        assert_eq!(ec_add(&p, &EcPoint::Infinity, &c).unwrap(), p);
        // (x, y) + (x, -y) = O
        let a = EcPoint::affine(2, 2);
        let b = EcPoint::affine(2, 3);
        assert_eq!(ec_add(&a, &b, &c).unwrap(), EcPoint::Infinity);
        // y = 0 doubles to infinity
        assert_eq!(ec_add(&p, &p, &c).unwrap(), EcPoint::Infinity);
    }

    #[test]
    fn scalar_multiples_of_generator() {
        let c = curve();
        let q = EcPoint::affine(2, 2);
        let expected = [
            EcPoint::affine(2, 2),
            EcPoint::affine(0, 4),
            EcPoint::affine(4, 0),
            EcPoint::affine(0, 1),
            EcPoint::affine(2, 3),
            EcPoint::Infinity,
        ];
        for (k, want) in (1..=6).zip(expected) {
            assert_eq!(ec_scalar_mul(k, &q, &c).unwrap(), want, "k = {k}");
        }
        assert_eq!(ec_scalar_mul(0, &q, &c).unwrap(), EcPoint::Infinity);
    }

    #[test]
    fn off_curve_rejected() {
        let c = curve();
        let bad = EcPoint::affine(1, 1);
        assert!(ec_add(&bad, &EcPoint::Infinity, &c).is_err());
        assert!(ec_scalar_mul(2, &bad, &c).is_err());
    }

    #[test]
    fn group_axioms_exhaustive() {
        // The order-6 group is small enough to check commutativity and
        // associativity element by element.
        let c = curve();
        let elems = group_elements();
        assert_eq!(elems.len(), 6);
        for a in &elems {
            for b in &elems {
                assert_eq!(
                    ec_add(a, b, &c).unwrap(),
                    ec_add(b, a, &c).unwrap(),
                    "commutativity for {a}, {b}"
                );
                for d in &elems {
                    let left = ec_add(&ec_add(a, b, &c).unwrap(), d, &c).unwrap();
                    let right = ec_add(a, &ec_add(b, d, &c).unwrap(), &c).unwrap();
                    assert_eq!(left, right, "associativity for {a}, {b}, {d}");
                }
            }
        }
        // Closure: every sum lands back in the group.
        for a in &elems {
            for b in &elems {
                assert!(elems.contains(&ec_add(a, b, &c).unwrap()));
            }
        }
    }

    #[test]
    fn primality_spot_checks() {
        assert!(is_prime(2));
        assert!(is_prime(5));
        assert!(is_prime(11));
        assert!(!is_prime(1));
        assert!(!is_prime(21));
        assert!(!is_prime(25));
    }
}
