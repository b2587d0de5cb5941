//! Exact arithmetic for GF(2), GF(5) and the six-fold product ring GF(5)^6.
//!
//! Every matroid in this crate is represented by a matrix whose entries
//! implement [`Scalar`]. The two prime fields also implement [`Field`]; the
//! product ring exposes its six coordinate projections so that rank and
//! linear-algebra questions can be answered one coordinate at a time.

use std::collections::BTreeSet;
use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Which ring a matrix lives over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Ring {
    Gf2,
    Gf5,
    Gf5x6,
}

impl Ring {
    pub fn name(self) -> &'static str {
        match self {
            Ring::Gf2 => "gf2",
            Ring::Gf5 => "gf5",
            Ring::Gf5x6 => "gf5x6",
        }
    }
}

impl Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Ring {
    type Err = AlgebraError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gf2" => Ok(Ring::Gf2),
            "gf5" => Ok(Ring::Gf5),
            "gf5x6" => Ok(Ring::Gf5x6),
            _ => Err(AlgebraError::Parse(s.to_string())),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(Ring, Ring),
    #[error("division by a non-invertible element {0}")]
    NonInvertible(String),
    #[error("cannot parse ring element {0:?}")]
    Parse(String),
}

/// Scalars usable as matrix entries.
///
/// `Coord` is the prime field of a single coordinate; for the fields
/// themselves `Coord = Self` and `COORDS = 1`.
pub trait Scalar:
    Copy
    + Eq
    + Ord
    + Hash
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    type Coord: Field;
    const RING: Ring;
    const COORDS: usize;

    fn coord(self, k: usize) -> Self::Coord;
    fn from_coords(coords: &[Self::Coord]) -> Self;
    /// Multiplicative inverse when `self` is a unit.
    fn inverse(self) -> Option<Self>;
    fn parse_token(s: &str) -> Option<Self>;

    fn is_unit(self) -> bool {
        self.inverse().is_some()
    }

    /// Embeds a field element diagonally (all coordinates equal).
    fn diagonal(x: Self::Coord) -> Self {
        let v = vec![x; Self::COORDS];
        Self::from_coords(&v)
    }
}

/// A finite prime field.
pub trait Field: Scalar<Coord = Self> {
    const ORDER: u8;

    fn from_u8(x: u8) -> Self;
    fn to_u8(self) -> u8;

    fn elements() -> Vec<Self> {
        (0..Self::ORDER).map(Self::from_u8).collect()
    }

    /// Rank of every subset of `columns` (bit `i` of the index selects column
    /// `i`). Each column has the same length.
    fn subset_ranks(columns: &[Vec<Self>]) -> Vec<u8> {
        crate::linalg::subset_ranks_dense(columns)
    }
}

// ---------------------------------------------------------------------------
// GF(2)

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Gf2(u8);

impl Gf2 {
    pub const fn new(x: u8) -> Self {
        Gf2(x & 1)
    }
    pub fn value(self) -> u8 {
        self.0
    }
}

impl Debug for Gf2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
impl Display for Gf2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
impl Add for Gf2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Gf2(self.0 ^ o.0)
    }
}
impl Sub for Gf2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Gf2(self.0 ^ o.0)
    }
}
impl Mul for Gf2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Gf2(self.0 & o.0)
    }
}
impl Neg for Gf2 {
    type Output = Self;
    fn neg(self) -> Self {
        self
    }
}
impl Zero for Gf2 {
    fn zero() -> Self {
        Gf2(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}
impl One for Gf2 {
    fn one() -> Self {
        Gf2(1)
    }
}

impl Scalar for Gf2 {
    type Coord = Gf2;
    const RING: Ring = Ring::Gf2;
    const COORDS: usize = 1;
    fn coord(self, _k: usize) -> Gf2 {
        self
    }
    fn from_coords(c: &[Gf2]) -> Self {
        c[0]
    }
    fn inverse(self) -> Option<Self> {
        (self.0 == 1).then_some(self)
    }
    fn parse_token(s: &str) -> Option<Self> {
        match s {
            "0" => Some(Gf2(0)),
            "1" => Some(Gf2(1)),
            _ => None,
        }
    }
}

impl Field for Gf2 {
    const ORDER: u8 = 2;
    fn from_u8(x: u8) -> Self {
        Gf2(x % 2)
    }
    fn to_u8(self) -> u8 {
        self.0
    }
    fn subset_ranks(columns: &[Vec<Self>]) -> Vec<u8> {
        let packed: Vec<u64> =
            columns.iter().map(|c| c.iter().enumerate().fold(0u64, |acc, (i, x)| acc | ((x.0 as u64) << i))).collect();
        crate::linalg::subset_ranks_binary(&packed)
    }
}

// ---------------------------------------------------------------------------
// GF(5)

const GF5_INV: [u8; 5] = [0, 1, 3, 2, 4];

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Gf5(u8);

impl Gf5 {
    pub const fn new(x: u8) -> Self {
        Gf5(x % 5)
    }
    pub fn value(self) -> u8 {
        self.0
    }
}

impl Debug for Gf5 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
impl Display for Gf5 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
impl Add for Gf5 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let s = self.0 + o.0;
        Gf5(if s >= 5 { s - 5 } else { s })
    }
}
impl Sub for Gf5 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}
impl Mul for Gf5 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Gf5((self.0 * o.0) % 5)
    }
}
impl Neg for Gf5 {
    type Output = Self;
    fn neg(self) -> Self {
        Gf5(if self.0 == 0 { 0 } else { 5 - self.0 })
    }
}
impl Zero for Gf5 {
    fn zero() -> Self {
        Gf5(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}
impl One for Gf5 {
    fn one() -> Self {
        Gf5(1)
    }
}

impl Scalar for Gf5 {
    type Coord = Gf5;
    const RING: Ring = Ring::Gf5;
    const COORDS: usize = 1;
    fn coord(self, _k: usize) -> Gf5 {
        self
    }
    fn from_coords(c: &[Gf5]) -> Self {
        c[0]
    }
    fn inverse(self) -> Option<Self> {
        (self.0 != 0).then(|| Gf5(GF5_INV[self.0 as usize]))
    }
    fn parse_token(s: &str) -> Option<Self> {
        match s.as_bytes() {
            [d @ b'0'..=b'4'] => Some(Gf5(d - b'0')),
            _ => None,
        }
    }
}

impl Field for Gf5 {
    const ORDER: u8 = 5;
    fn from_u8(x: u8) -> Self {
        Gf5(x % 5)
    }
    fn to_u8(self) -> u8 {
        self.0
    }
}

// ---------------------------------------------------------------------------
// GF(5)^6, packed as six 4-bit lanes of a u32 (lane k holds coordinate k).

const LANES: u32 = 0x0011_1111;
const LANE_MASK: u32 = 0x00ff_ffff;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Gf5x6(u32);

impl Gf5x6 {
    pub fn new(digits: [u8; 6]) -> Self {
        let mut packed = 0u32;
        for (k, d) in digits.iter().enumerate() {
            packed |= ((d % 5) as u32) << (4 * k);
        }
        Gf5x6(packed)
    }

    pub fn digits(self) -> [u8; 6] {
        let mut out = [0u8; 6];
        for (k, o) in out.iter_mut().enumerate() {
            *o = ((self.0 >> (4 * k)) & 0xf) as u8;
        }
        out
    }

    pub fn digit(self, k: usize) -> u8 {
        ((self.0 >> (4 * k)) & 0xf) as u8
    }

    pub fn packed(self) -> u32 {
        self.0
    }

    // lanes hold values in 0..=8; fold each lane >= 5 back down by 5
    #[inline]
    fn reduce(sum: u32) -> u32 {
        let ge5 = ((sum + 3 * LANES) >> 3) & LANES;
        sum - 5 * ge5
    }

    /// Reorders coordinates: output coordinate `i` is input coordinate `sigma[i]`.
    pub fn permute(self, sigma: &[usize; 6]) -> Self {
        let d = self.digits();
        let mut out = [0u8; 6];
        for i in 0..6 {
            out[i] = d[sigma[i]];
        }
        Gf5x6::new(out)
    }
}

impl Debug for Gf5x6 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Display::fmt(self, f)
    }
}
impl Display for Gf5x6 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.digits();
        write!(f, "{}:{}:{}:{}:{}:{}", d[0], d[1], d[2], d[3], d[4], d[5])
    }
}
impl Add for Gf5x6 {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Gf5x6(Self::reduce(self.0 + o.0))
    }
}
impl Neg for Gf5x6 {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Gf5x6(Self::reduce((5 * LANES - self.0) & LANE_MASK))
    }
}
impl Sub for Gf5x6 {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}
impl Mul for Gf5x6 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut packed = 0u32;
        for k in 0..6 {
            let p = (self.digit(k) * o.digit(k)) % 5;
            packed |= (p as u32) << (4 * k);
        }
        Gf5x6(packed)
    }
}
impl Zero for Gf5x6 {
    fn zero() -> Self {
        Gf5x6(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}
impl One for Gf5x6 {
    fn one() -> Self {
        Gf5x6(LANES)
    }
}

impl Scalar for Gf5x6 {
    type Coord = Gf5;
    const RING: Ring = Ring::Gf5x6;
    const COORDS: usize = 6;
    fn coord(self, k: usize) -> Gf5 {
        Gf5(self.digit(k))
    }
    fn from_coords(c: &[Gf5]) -> Self {
        let mut d = [0u8; 6];
        for k in 0..6 {
            d[k] = c[k].0;
        }
        Gf5x6::new(d)
    }
    fn inverse(self) -> Option<Self> {
        let d = self.digits();
        if d.contains(&0) {
            return None;
        }
        Some(Gf5x6::new(d.map(|x| GF5_INV[x as usize])))
    }
    fn parse_token(s: &str) -> Option<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 6 {
            return None;
        }
        let mut d = [0u8; 6];
        for (k, p) in parts.iter().enumerate() {
            d[k] = Gf5::parse_token(p)?.0;
        }
        Some(Gf5x6::new(d))
    }
}

impl FromStr for Gf5x6 {
    type Err = AlgebraError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_token(s).ok_or_else(|| AlgebraError::Parse(s.to_string()))
    }
}

// ---------------------------------------------------------------------------
// Tagged values

/// A ring element carrying its ring tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RingValue {
    Gf2(Gf2),
    Gf5(Gf5),
    Gf5x6(Gf5x6),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl RingValue {
    pub fn ring(self) -> Ring {
        match self {
            RingValue::Gf2(_) => Ring::Gf2,
            RingValue::Gf5(_) => Ring::Gf5,
            RingValue::Gf5x6(_) => Ring::Gf5x6,
        }
    }

    pub fn parse(ring: Ring, token: &str) -> Result<Self, AlgebraError> {
        let bad = || AlgebraError::Parse(token.to_string());
        Ok(match ring {
            Ring::Gf2 => RingValue::Gf2(Gf2::parse_token(token).ok_or_else(bad)?),
            Ring::Gf5 => RingValue::Gf5(Gf5::parse_token(token).ok_or_else(bad)?),
            Ring::Gf5x6 => RingValue::Gf5x6(Gf5x6::parse_token(token).ok_or_else(bad)?),
        })
    }
}

impl Display for RingValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingValue::Gf2(x) => Display::fmt(x, f),
            RingValue::Gf5(x) => Display::fmt(x, f),
            RingValue::Gf5x6(x) => Display::fmt(x, f),
        }
    }
}

fn combine<S: Scalar>(a: S, b: S, op: RingOp) -> Result<S, AlgebraError> {
    Ok(match op {
        RingOp::Add => a + b,
        RingOp::Sub => a - b,
        RingOp::Mul => a * b,
        RingOp::Div => a * b.inverse().ok_or_else(|| AlgebraError::NonInvertible(b.to_string()))?,
    })
}

/// Applies `op` coordinatewise; both operands must carry the same tag.
pub fn ring_combine(a: RingValue, b: RingValue, op: RingOp) -> Result<RingValue, AlgebraError> {
    match (a, b) {
        (RingValue::Gf2(x), RingValue::Gf2(y)) => combine(x, y, op).map(RingValue::Gf2),
        (RingValue::Gf5(x), RingValue::Gf5(y)) => combine(x, y, op).map(RingValue::Gf5),
        (RingValue::Gf5x6(x), RingValue::Gf5x6(y)) => combine(x, y, op).map(RingValue::Gf5x6),
        _ => Err(AlgebraError::RingMismatch(a.ring(), b.ring())),
    }
}

// ---------------------------------------------------------------------------
// Cross ratios

/// Product-ring values that may occur as cross ratios of a matrix whose six
/// projections are pairwise inequivalent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossRatioSet {
    elements: BTreeSet<Gf5x6>,
}

impl CrossRatioSet {
    pub fn contains(&self, x: Gf5x6) -> bool {
        self.elements.contains(&x)
    }
    pub fn len(&self) -> usize {
        self.elements.len()
    }
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
    pub fn iter(&self) -> impl Iterator<Item = Gf5x6> + '_ {
        self.elements.iter().copied()
    }
}

/// Every tuple over {2,3,4} in which each digit occurs exactly twice.
pub fn allowed_cross_ratios() -> CrossRatioSet {
    let mut elements = BTreeSet::new();
    let mut d = [2u8; 6];
    fn rec(pos: usize, counts: &mut [u8; 3], d: &mut [u8; 6], out: &mut BTreeSet<Gf5x6>) {
        if pos == 6 {
            out.insert(Gf5x6::new(*d));
            return;
        }
        for v in 0..3 {
            if counts[v] < 2 {
                counts[v] += 1;
                d[pos] = v as u8 + 2;
                rec(pos + 1, counts, d, out);
                counts[v] -= 1;
            }
        }
    }
    rec(0, &mut [0; 3], &mut d, &mut elements);
    CrossRatioSet { elements }
}

pub fn tuple_permute(x: Gf5x6, sigma: &[usize; 6]) -> Gf5x6 {
    x.permute(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf5_exhaustive_field_axioms() {
        let el = Gf5::elements();
        for &a in &el {
            for &b in &el {
                assert_eq!(a + b, b + a);
                assert_eq!(a * b, b * a);
                assert_eq!((a - b) + b, a);
                for &c in &el {
                    assert_eq!((a + b) + c, a + (b + c));
                    assert_eq!((a * b) * c, a * (b * c));
                    assert_eq!(a * (b + c), a * b + a * c);
                }
            }
            if let Some(inv) = a.inverse() {
                assert_eq!(a * inv, Gf5::one());
            } else {
                assert!(a.is_zero());
            }
        }
    }

    #[test]
    fn packed_lanes_match_coordinatewise() {
        for a in 0..5u8 {
            for b in 0..5u8 {
                let x = Gf5x6::new([a, b, a, b, 0, 4]);
                let y = Gf5x6::new([b, a, 4, 0, b, a]);
                for k in 0..6 {
                    assert_eq!((x + y).coord(k), x.coord(k) + y.coord(k));
                    assert_eq!((x - y).coord(k), x.coord(k) - y.coord(k));
                    assert_eq!((x * y).coord(k), x.coord(k) * y.coord(k));
                    assert_eq!((-x).coord(k), -x.coord(k));
                }
            }
        }
    }

    #[test]
    fn ring_combine_examples() {
        let one = RingValue::Gf5x6(Gf5x6::one());
        let x = RingValue::Gf5x6(Gf5x6::new([2, 3, 4, 0, 1, 2]));
        assert_eq!(ring_combine(one, x, RingOp::Mul).unwrap(), x);
        let a = RingValue::Gf5x6(Gf5x6::new([2, 2, 3, 3, 4, 4]));
        let b = RingValue::Gf5x6(Gf5x6::new([3, 3, 2, 2, 1, 1]));
        assert_eq!(ring_combine(a, b, RingOp::Add).unwrap(), RingValue::Gf5x6(Gf5x6::zero()));
        let z = RingValue::Gf5x6(Gf5x6::new([2, 0, 1, 1, 1, 1]));
        assert!(matches!(ring_combine(one, z, RingOp::Div), Err(AlgebraError::NonInvertible(_))));
        assert!(matches!(
            ring_combine(RingValue::Gf2(Gf2::one()), one, RingOp::Add),
            Err(AlgebraError::RingMismatch(Ring::Gf2, Ring::Gf5x6))
        ));
    }

    #[test]
    fn cross_ratio_membership() {
        let set = allowed_cross_ratios();
        assert!(set.contains(Gf5x6::new([2, 2, 3, 3, 4, 4])));
        assert!(!set.contains(Gf5x6::new([2, 2, 2, 3, 3, 4])));
        assert!(!set.contains(Gf5x6::zero()));
        assert!(!set.contains(Gf5x6::one()));
    }

    #[test]
    fn permute_examples() {
        let x = Gf5x6::new([2, 3, 4, 2, 3, 4]);
        assert_eq!(tuple_permute(x, &[0, 1, 2, 3, 4, 5]), x);
        assert_eq!(tuple_permute(x, &[1, 0, 2, 3, 4, 5]), Gf5x6::new([3, 2, 4, 2, 3, 4]));
    }

    #[test]
    fn text_round_trip() {
        let x = Gf5x6::new([2, 3, 4, 2, 3, 4]);
        assert_eq!(x.to_string(), "2:3:4:2:3:4");
        assert_eq!("2:3:4:2:3:4".parse::<Gf5x6>().unwrap(), x);
        assert!("2:3:4:2:3".parse::<Gf5x6>().is_err());
        assert!("2:3:4:2:3:5".parse::<Gf5x6>().is_err());
    }
}
