//! The Kaliski generator: iterated scalar multiplication on a curve group of
//! order p + 1, with the threshold predicate λ on the y-coordinate.

use crate::generators::bbs::bit_width;
use crate::generators::ec::{ec_add, CurveParams, EcPoint};
use crate::generators::GeneratorSpec;
use crate::{Error, Result};

/// φ maps an affine point to its y-coordinate and infinity to p, giving a
/// bijection from the group onto `[0, p]`.
pub fn kaliski_phi(point: &EcPoint, curve: &CurveParams) -> Result<u64> {
    if !curve.contains(point) {
        return Err(Error::Parameter(format!(
            "point {point} is not on the curve"
        )));
    }
    Ok(match *point {
        EcPoint::Affine { y, .. } => y,
        EcPoint::Infinity => curve.prime(),
    })
}

/// The hard-core predicate λ: 1 iff φ(P) ≥ (p + 1)/2.
pub fn kaliski_lambda(point: &EcPoint, curve: &CurveParams) -> Result<u8> {
    let phi = kaliski_phi(point, curve)?;
    // 2φ > p is the threshold φ ≥ (p+1)/2 kept in integers.
    Ok(u8::from(2 * phi > curve.prime()))
}

/// The multiples Q, 2Q, …, (p+1)Q; errors unless they are pairwise distinct
/// and the last one is infinity, i.e. unless Q generates the whole group.
fn enumerate_group(curve: &CurveParams, generator: &EcPoint) -> Result<Vec<EcPoint>> {
    let order = curve.prime() + 1;
    let mut multiples = Vec::with_capacity(order as usize);
    let mut seen = std::collections::HashSet::with_capacity(order as usize);
    let mut acc = EcPoint::Infinity;
    for k in 1..=order {
        acc = ec_add(&acc, generator, curve)?;
        if acc.is_infinity() && k < order {
            return Err(Error::Construction(format!(
                "{generator} has order {k}, not {order}; pick a group generator"
            )));
        }
        if !seen.insert(acc) {
            return Err(Error::Construction(format!(
                "{generator} repeats {acc} before reaching order {order}"
            )));
        }
        multiples.push(acc);
    }
    if !multiples[order as usize - 1].is_infinity() {
        return Err(Error::Construction(format!(
            "({order})·{generator} is not the identity; pick a group generator"
        )));
    }
    Ok(multiples)
}

/// First affine point in lexicographic (x, y) order that generates the group.
pub fn default_generator(curve: &CurveParams) -> Result<EcPoint> {
    for point in curve.affine_points() {
        if enumerate_group(curve, &point).is_ok() {
            return Ok(point);
        }
    }
    Err(Error::Construction(format!(
        "no affine point generates the order-{} group of y^2 = x^3 + {} mod {}",
        curve.prime() + 1,
        curve.coefficient(),
        curve.prime()
    )))
}

/// Point encoding of the reference instance (p = 5, c = 1, Q = (2,2)).
///
/// This exact table is a golden fixture; the general enumeration order below
/// does not reproduce it, and all reference gate tables depend on it.
const REFERENCE_ENCODING: [(EcPoint, usize); 6] = [
    (EcPoint::Affine { x: 4, y: 0 }, 1),
    (EcPoint::Affine { x: 0, y: 1 }, 2),
    (EcPoint::Affine { x: 0, y: 4 }, 3),
    (EcPoint::Affine { x: 2, y: 2 }, 4),
    (EcPoint::Affine { x: 2, y: 3 }, 5),
    (EcPoint::Infinity, 6),
];

fn is_reference_instance(curve: &CurveParams, generator: &EcPoint) -> bool {
    curve.prime() == 5 && curve.coefficient() == 1 && *generator == EcPoint::affine(2, 2)
}

/// Compiles a Kaliski instance into a [`GeneratorSpec`].
///
/// Group elements get integer encodings 1..=p+1 (the reference instance uses
/// its fixed table, other instances are encoded in Q, 2Q, … enumeration
/// order). The permutation sends the encoding of P to the encoding of
/// φ(P)·Q; indices 0 and p+2.. are padding.
pub fn kaliski_spec(curve: &CurveParams, generator: &EcPoint) -> Result<GeneratorSpec> {
    let multiples = enumerate_group(curve, generator)?;
    let order = multiples.len();

    let encoded: Vec<(EcPoint, usize)> = if is_reference_instance(curve, generator) {
        REFERENCE_ENCODING.to_vec()
    } else {
        multiples
            .iter()
            .enumerate()
            .map(|(i, &point)| (point, i + 1))
            .collect()
    };
    let encoding_of: std::collections::HashMap<EcPoint, usize> = encoded.iter().copied().collect();
    // kQ is multiples[k-1]; φ ranges over 0..=p, and 0·Q is infinity.
    let multiple_of = |k: u64| -> EcPoint {
        if k == 0 {
            EcPoint::Infinity
        } else {
            multiples[k as usize - 1]
        }
    };

    let n = bit_width(order as u64 + 1);
    let size = 1usize << n;
    let mut permutation: Vec<usize> = (0..size).collect();
    let mut predicate = vec![0u8; size];
    let mut labels: Vec<String> = (0..size).map(|i| i.to_string()).collect();
    for &(point, code) in &encoded {
        let image = multiple_of(kaliski_phi(&point, curve)?);
        permutation[code] = encoding_of[&image];
        predicate[code] = kaliski_lambda(&point, curve)?;
        labels[code] = point.to_string();
    }

    let mut domain: Vec<usize> = encoded.iter().map(|&(_, code)| code).collect();
    domain.sort_unstable();
    GeneratorSpec::new(
        "kaliski",
        format!(
            "p={} c={} Q={}",
            curve.prime(),
            curve.coefficient(),
            generator
        ),
        "lambda",
        n,
        permutation,
        predicate,
        domain,
        Some(labels),
    )
}
