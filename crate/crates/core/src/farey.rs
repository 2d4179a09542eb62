//! Exact slope arithmetic on the torus and distances in the Farey graph.
//!
//! A slope is a reduced extended rational `p/q` with `q > 0`, or `1/0` for
//! infinity. Two slopes span an edge of the Farey graph exactly when
//! `|p1*q2 - q1*p2| = 1`. All arithmetic is arbitrary precision.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FareyError {
    #[error("0/0 is not a slope")]
    ZeroPair,
    #[error("slopes {0} and {1} do not span a Farey edge")]
    NotAFareyEdge(Slope, Slope),
    #[error("invalid slope literal {0:?}")]
    BadLiteral(String),
}

/// A reduced extended rational `p/q`, canonicalized so that `q > 0`,
/// or `(p, q) = (1, 0)` for infinity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slope {
    p: BigInt,
    q: BigInt,
}

impl Slope {
    /// Canonical reduced slope from an arbitrary integer pair.
    pub fn reduce(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Result<Slope, FareyError> {
        let a: BigInt = a.into();
        let b: BigInt = b.into();
        if a.is_zero() && b.is_zero() {
            return Err(FareyError::ZeroPair);
        }
        let g = a.gcd(&b);
        let (mut p, mut q) = (a / &g, b / &g);
        if q.is_negative() || (q.is_zero() && p.is_negative()) {
            p = -p;
            q = -q;
        }
        Ok(Slope { p, q })
    }

    pub fn infinity() -> Slope {
        Slope { p: BigInt::one(), q: BigInt::zero() }
    }

    pub fn is_infinity(&self) -> bool {
        self.q.is_zero()
    }

    pub fn numer(&self) -> &BigInt {
        &self.p
    }

    pub fn denom(&self) -> &BigInt {
        &self.q
    }

    /// True when the slope is `<= 0` as an extended rational. Infinity is
    /// accepted as a reference slope in gluing frames and counts here.
    pub fn is_non_positive_or_infinity(&self) -> bool {
        self.is_infinity() || !self.p.is_positive()
    }

    /// `|p1*q2 - q1*p2|`: the geometric intersection number of the two
    /// underlying curves. Zero iff the slopes are equal.
    pub fn intersection_number(&self, other: &Slope) -> BigInt {
        (&self.p * &other.q - &self.q * &other.p).abs()
    }

    pub fn is_farey_neighbor(&self, other: &Slope) -> bool {
        self.intersection_number(other).is_one()
    }

    /// `(a+c)/(b+d)`: the third vertex of one of the two Farey triangles on
    /// the edge `(self, other)`.
    pub fn mediant(&self, other: &Slope) -> Result<Slope, FareyError> {
        self.check_edge(other)?;
        Slope::reduce(&self.p + &other.p, &self.q + &other.q)
    }

    /// `(a-c)/(b-d)`: the third vertex of the other Farey triangle on the
    /// edge `(self, other)`.
    pub fn anti_mediant(&self, other: &Slope) -> Result<Slope, FareyError> {
        self.check_edge(other)?;
        Slope::reduce(&self.p - &other.p, &self.q - &other.q)
    }

    /// Sign canonicalization without reduction; the caller guarantees the
    /// pair is already coprime (e.g. sums/differences of Farey neighbors).
    pub(crate) fn canonical_unchecked(mut p: BigInt, mut q: BigInt) -> Slope {
        if q.is_negative() || (q.is_zero() && p.is_negative()) {
            p = -p;
            q = -q;
        }
        Slope { p, q }
    }

    /// Mediant without the Farey-edge check or gcd reduction; for hot loops
    /// over slopes the caller already knows are neighbors.
    pub(crate) fn mediant_unchecked(&self, other: &Slope) -> Slope {
        Slope::canonical_unchecked(&self.p + &other.p, &self.q + &other.q)
    }

    /// Anti-mediant without the Farey-edge check or gcd reduction.
    pub(crate) fn anti_mediant_unchecked(&self, other: &Slope) -> Slope {
        Slope::canonical_unchecked(&self.p - &other.p, &self.q - &other.q)
    }

    fn check_edge(&self, other: &Slope) -> Result<(), FareyError> {
        if self.is_farey_neighbor(other) {
            Ok(())
        } else {
            Err(FareyError::NotAFareyEdge(self.clone(), other.clone()))
        }
    }

    /// Image under the Möbius action of an integer matrix `[[a, b], [c, d]]`,
    /// i.e. `p/q -> (a p + b q)/(c p + d q)`, canonicalized.
    pub fn transform(&self, m: &[[BigInt; 2]; 2]) -> Result<Slope, FareyError> {
        Slope::reduce(
            &m[0][0] * &self.p + &m[0][1] * &self.q,
            &m[1][0] * &self.p + &m[1][1] * &self.q,
        )
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinity() {
            write!(f, "inf")
        } else {
            write!(f, "{}/{}", self.p, self.q)
        }
    }
}

impl FromStr for Slope {
    type Err = FareyError;

    /// Parses `p/q`, a bare integer, or `inf` (alias for `1/0`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "inf" || s == "∞" || s == "1/0" {
            return Ok(Slope::infinity());
        }
        let bad = || FareyError::BadLiteral(s.to_string());
        match s.split_once('/') {
            Some((a, b)) => {
                let p = BigInt::from_str(a.trim()).map_err(|_| bad())?;
                let q = BigInt::from_str(b.trim()).map_err(|_| bad())?;
                if p.is_zero() && q.is_zero() {
                    return Err(FareyError::ZeroPair);
                }
                Slope::reduce(p, q)
            }
            None => {
                let p = BigInt::from_str(s).map_err(|_| bad())?;
                Slope::reduce(p, 1)
            }
        }
    }
}

/// The edge slopes of a one-vertex torus triangulation: three slopes that
/// pairwise intersect once, one of which is the mediant or anti-mediant of
/// the other two.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FareyTriple(pub Slope, pub Slope, pub Slope);

impl FareyTriple {
    pub fn new(a: Slope, b: Slope, c: Slope) -> Result<FareyTriple, FareyError> {
        let t = FareyTriple(a, b, c);
        if t.is_valid() {
            Ok(t)
        } else {
            Err(FareyError::NotAFareyEdge(t.0, t.1))
        }
    }

    pub fn is_valid(&self) -> bool {
        let FareyTriple(a, b, c) = self;
        a.is_farey_neighbor(b)
            && b.is_farey_neighbor(c)
            && a.is_farey_neighbor(c)
            && (a.mediant(b) == Ok(c.clone()) || a.anti_mediant(b) == Ok(c.clone()))
    }

    pub fn contains(&self, s: &Slope) -> bool {
        &self.0 == s || &self.1 == s || &self.2 == s
    }

    pub fn slopes(&self) -> [&Slope; 3] {
        [&self.0, &self.1, &self.2]
    }

    /// The standard starting triple `(0/1, 1/0, 1/1)`.
    pub fn standard() -> FareyTriple {
        FareyTriple(
            Slope::reduce(0, 1).unwrap(),
            Slope::infinity(),
            Slope::reduce(1, 1).unwrap(),
        )
    }

    pub fn same_slopes(&self, other: &FareyTriple) -> bool {
        let mut a = vec![&self.0, &self.1, &self.2];
        let mut b = vec![&other.0, &other.1, &other.2];
        a.sort();
        b.sort();
        a == b
    }
}

/// Exact distance between two vertices of the Farey graph.
///
/// The second argument is moved to infinity by a unimodular change of basis,
/// after which the distance to infinity is computed by minimizing over
/// integer continued fraction expansions: a path from infinity enters through
/// an integer vertex, and `d(y, m) = d(-1/(y-m), inf)` by unimodular
/// invariance. Only `m = floor(y)` and `m = ceil(y)` can start a geodesic
/// (any other integer is separated from `y` by one of the edges
/// `(floor, inf)`, `(ceil, inf)`).
pub fn farey_distance(s: &Slope, t: &Slope) -> u64 {
    if s == t {
        return 0;
    }
    if s.is_farey_neighbor(t) {
        return 1;
    }
    // Unimodular matrix sending t to infinity: rows (a, b) and (-q, p) with
    // a*p + b*q = 1.
    let e = t.numer().extended_gcd(t.denom());
    debug_assert!(e.gcd.is_one());
    let m = [
        [e.x.clone(), e.y.clone()],
        [-t.denom().clone(), t.numer().clone()],
    ];
    let x = s.transform(&m).expect("unimodular image of a slope is a slope");
    let mut memo = HashMap::new();
    distance_to_infinity(x.numer().clone(), x.denom().clone(), &mut memo)
}

fn distance_to_infinity(p: BigInt, q: BigInt, memo: &mut HashMap<(BigInt, BigInt), u64>) -> u64 {
    debug_assert!(q.is_positive());
    if q.is_one() {
        return 1;
    }
    // Translate into (0, 1); gcd(r, q) = 1 and q >= 2 give 0 < r < q.
    let r = p.mod_floor(&q);
    if let Some(&d) = memo.get(&(r.clone(), q.clone())) {
        return d;
    }
    // Pivot at floor: -1/(r/q) = -q/r.
    let d1 = distance_to_infinity(-&q, r.clone(), memo);
    // Pivot at ceil: -1/(r/q - 1) = q/(q - r).
    let d2 = distance_to_infinity(q.clone(), &q - &r, memo);
    let d = 1 + d1.min(d2);
    memo.insert((r, q), d);
    d
}

/// `F_{k+1}/F_k` with the indexing `F_0 = F_1 = 1`, so `k = 0` gives `1/1`,
/// `k = 1` gives `2/1`, `k = 2` gives `3/2`.
pub fn fibonacci_slope(k: u64) -> Slope {
    let (p, q) = fibonacci_pair(k);
    Slope::reduce(p, q).unwrap()
}

/// `(F_{k+1}, F_k)` with `F_0 = F_1 = 1`, extended down to `F_{-1} = 0` and
/// `F_{-2} = 1` so that the `k = 0` layering triple is `(0/1, 1/0, 1/1)`.
pub fn fibonacci_pair(k: u64) -> (BigInt, BigInt) {
    let mut a = BigInt::one(); // F_0
    let mut b = BigInt::one(); // F_1
    for _ in 0..k {
        let c = &a + &b;
        a = b;
        b = c;
    }
    (b, a)
}

/// Closed form `floor(k/2) + 1` for `d(F_{k+1}/F_k, inf)`.
pub fn fibonacci_distance_closed_form(k: u64) -> u64 {
    k / 2 + 1
}
