//! Integer-quadruple model of the level-`k` congruence groups acting on the disk.
//!
//! A quadruple `(p, q, r, s)` with `p² + q² + 1 = r² + s²` stands for the disk
//! transformation with matrix `[[r - is, p + iq], [p - iq, r + is]]`. It belongs
//! to the level-`k` group when
//!
//! ```text
//! r + p ≡ 1,  r - p ≡ 1,  s + q ≡ 0,  s - q ≡ 0   (mod k).
//! ```
//!
//! A quadruple and its negation are the same transformation.

use num_complex::Complex64;
use num_integer::Roots;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::Point2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Quadruple {
    pub p: i64,
    pub q: i64,
    pub r: i64,
    pub s: i64,
}

impl Quadruple {
    pub const IDENTITY: Quadruple = Quadruple { p: 0, q: 0, r: 1, s: 0 };

    pub const fn new(p: i64, q: i64, r: i64, s: i64) -> Self {
        Self { p, q, r, s }
    }

    /// `n = p² + q²`; the orbit point lies at `|x|² = n / (n + 1)`.
    pub fn level_n(&self) -> i64 {
        self.p * self.p + self.q * self.q
    }

    pub fn satisfies_determinant(&self) -> bool {
        let lhs = (self.p as i128).pow(2) + (self.q as i128).pow(2) + 1;
        let rhs = (self.r as i128).pow(2) + (self.s as i128).pow(2);
        lhs == rhs
    }

    pub fn satisfies_congruences(&self, k: u64) -> bool {
        let k = k as i64;
        let m = |v: i64| v.rem_euclid(k);
        m(self.r + self.p) == m(1)
            && m(self.r - self.p) == m(1)
            && m(self.s + self.q) == 0
            && m(self.s - self.q) == 0
    }

    pub fn in_level(&self, k: u64) -> bool {
        self.satisfies_determinant() && self.satisfies_congruences(k)
    }

    pub fn negate(&self) -> Self {
        Self::new(-self.p, -self.q, -self.r, -self.s)
    }

    /// Multiplying numerator and denominator of the orbit point by `i`.
    pub fn quarter_turn(&self) -> Self {
        Self::new(-self.q, self.p, -self.s, self.r)
    }

    pub fn rotations(&self) -> [Quadruple; 4] {
        let a = *self;
        let b = a.quarter_turn();
        let c = b.quarter_turn();
        let d = c.quarter_turn();
        [a, b, c, d]
    }

    /// Lexicographic minimum of the quarter-turn orbit; equal for exactly the
    /// quadruples that name the same orbit point.
    pub fn canonicalize(&self) -> Self {
        self.rotations().into_iter().min().expect("four rotations")
    }

    /// One representative of `{g, -g}` (the lexicographically smaller).
    pub fn sign_reduced(&self) -> Self {
        (*self).min(self.negate())
    }

    /// The image of the origin, `(p + iq) / (r + is)`.
    pub fn orbit_point(&self) -> Point2 {
        let den = (self.r * self.r + self.s * self.s) as f64;
        let (p, q, r, s) = (self.p as f64, self.q as f64, self.r as f64, self.s as f64);
        Point2::new((p * r + q * s) / den, (q * r - p * s) / den)
    }

    /// Diagonal and off-diagonal entries `(r - is, p + iq)` of the disk matrix.
    fn entries(&self) -> (Complex64, Complex64) {
        (
            Complex64::new(self.r as f64, -(self.s as f64)),
            Complex64::new(self.p as f64, self.q as f64),
        )
    }

    /// Möbius action `z -> ((r - is) z + (p + iq)) / ((p - iq) z + (r + is))`.
    pub fn apply(&self, z: Point2) -> Point2 {
        let (alpha, beta) = self.entries();
        let z = z.to_complex();
        Point2::from_complex((alpha * z + beta) / (beta.conj() * z + alpha.conj()))
    }

    pub fn inverse(&self) -> Self {
        Self::new(-self.p, -self.q, self.r, -self.s)
    }

    /// Matrix product `self * other`, as a transformation `z -> self(other(z))`.
    pub fn compose(&self, other: &Quadruple) -> Result<Self> {
        let ovf = || Error::Overflow("quadruple product".into());
        // alpha = r - is, beta = p + iq, as Gaussian integers.
        let (ar1, ai1, br1, bi1) = (self.r, -self.s, self.p, self.q);
        let (ar2, ai2, br2, bi2) = (other.r, -other.s, other.p, other.q);
        let mul = |a: i64, b: i64| a.checked_mul(b).ok_or_else(ovf);
        // alpha1*alpha2 + beta1*conj(beta2)
        let ar = mul(ar1, ar2)? - mul(ai1, ai2)? + mul(br1, br2)? + mul(bi1, bi2)?;
        let ai = mul(ar1, ai2)? + mul(ai1, ar2)? - mul(br1, bi2)? + mul(bi1, br2)?;
        // alpha1*beta2 + beta1*conj(alpha2)
        let br = mul(ar1, br2)? - mul(ai1, bi2)? + mul(br1, ar2)? + mul(bi1, ai2)?;
        let bi = mul(ar1, bi2)? + mul(ai1, br2)? - mul(br1, ai2)? + mul(bi1, ar2)?;
        Ok(Self::new(br, bi, ar, -ai))
    }
}

/// An element of `PSL(2, Z)`, stored with `ad - bc = 1` and its first non-zero
/// entry positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PslMatrix {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl PslMatrix {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = (a as i128) * (d as i128) - (b as i128) * (c as i128);
        if det != 1 {
            return Err(Error::Precondition(format!("determinant {det} != 1")));
        }
        let first = [a, b, c, d].into_iter().find(|&v| v != 0).unwrap_or(1);
        Ok(if first < 0 {
            Self { a: -a, b: -b, c: -c, d: -d }
        } else {
            Self { a, b, c, d }
        })
    }

    pub fn entries(&self) -> (i64, i64, i64, i64) {
        (self.a, self.b, self.c, self.d)
    }

    pub fn in_level(&self, k: i64) -> bool {
        let m = |v: i64| v.rem_euclid(k);
        let direct = m(self.a) == m(1) && m(self.d) == m(1) && m(self.b) == 0 && m(self.c) == 0;
        let negated = m(-self.a) == m(1) && m(-self.d) == m(1) && m(self.b) == 0 && m(self.c) == 0;
        direct || negated
    }

    /// Upper half-plane action `z -> (az + b) / (cz + d)`.
    pub fn apply_upper(&self, z: Complex64) -> Complex64 {
        let (a, b, c, d) = (self.a as f64, self.b as f64, self.c as f64, self.d as f64);
        (z * a + b) / (z * c + d)
    }
}

/// Conjugates `m` into the disk model:
/// `p = (a - d)/2, q = -(b + c)/2, r = (a + d)/2, s = -(b - c)/2`.
pub fn psl_to_quadruple(m: &PslMatrix) -> Result<Quadruple> {
    let (a, b, c, d) = m.entries();
    let half = |v: i64, what: &str| {
        if v % 2 == 0 {
            Ok(v / 2)
        } else {
            Err(Error::NonIntegral(format!("{what} = {v}/2 for ({a}, {b}, {c}, {d})")))
        }
    };
    Ok(Quadruple::new(
        half(a - d, "p")?,
        half(-(b + c), "q")?,
        half(a + d, "r")?,
        half(-(b - c), "s")?,
    ))
}

/// Disk-to-upper-half-plane map sending 0 to `i`: `z -> i (z + 1) / (1 - z)`.
pub fn disk_to_upper(z: Point2) -> Complex64 {
    let z = z.to_complex();
    let one = Complex64::new(1.0, 0.0);
    Complex64::i() * (z + one) / (one - z)
}

/// Inverse of [`disk_to_upper`]: `w -> (w - i) / (w + i)`.
pub fn upper_to_disk(w: Complex64) -> Point2 {
    Point2::from_complex((w - Complex64::i()) / (w + Complex64::i()))
}

/// All `(a, b)` with `a² + b² = n`, sorted.
pub(crate) fn two_square_reps(n: i64) -> Vec<(i64, i64)> {
    if n < 0 {
        return Vec::new();
    }
    let root = n.sqrt();
    let mut out = Vec::new();
    for a in -root..=root {
        let rest = n - a * a;
        let b = rest.sqrt();
        if b * b == rest {
            out.push((a, b));
            if b != 0 {
                out.push((a, -b));
            }
        }
    }
    out.sort_unstable();
    out
}

/// All integer quadruples with `p² + q² = n`, `r² + s² = n + 1` (no congruences).
pub fn unconstrained_quadruples(n: u64) -> Vec<Quadruple> {
    let n = n as i64;
    let num = two_square_reps(n);
    let den = two_square_reps(n + 1);
    let mut out = Vec::with_capacity(num.len() * den.len());
    for &(p, q) in &num {
        for &(r, s) in &den {
            out.push(Quadruple::new(p, q, r, s));
        }
    }
    out
}

/// Level-`k` group elements with `p² + q² = n`, one quadruple per element
/// (when both `g` and `-g` qualify, the lexicographically smaller), sorted.
pub fn solve_quadruples(n: u64, k: u64) -> Vec<Quadruple> {
    let mut out: Vec<Quadruple> = unconstrained_quadruples(n)
        .into_iter()
        .filter(|g| g.satisfies_congruences(k))
        .filter(|g| {
            let neg = g.negate();
            !(neg < *g && neg.satisfies_congruences(k))
        })
        .collect();
    out.sort_unstable();
    out
}

pub fn canonicalize(q: &Quadruple) -> Quadruple {
    q.canonicalize()
}

pub fn orbit_point(q: &Quadruple) -> Point2 {
    q.orbit_point()
}

pub fn mobius_apply(g: &Quadruple, z: Point2) -> Point2 {
    g.apply(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Enumerates every integer 4-tuple in a box; independent of `two_square_reps`.
    fn boxed_search(n: i64, k: u64) -> Vec<Quadruple> {
        let b1 = (n as f64).sqrt() as i64 + 1;
        let b2 = ((n + 1) as f64).sqrt() as i64 + 1;
        let mut out = Vec::new();
        for p in -b1..=b1 {
            for q in -b1..=b1 {
                if p * p + q * q != n {
                    continue;
                }
                for r in -b2..=b2 {
                    for s in -b2..=b2 {
                        let g = Quadruple::new(p, q, r, s);
                        if r * r + s * s == n + 1 && g.satisfies_congruences(k) {
                            out.push(g);
                        }
                    }
                }
            }
        }
        let all = out.clone();
        out.retain(|g| !all.contains(&g.negate()) || *g < g.negate());
        out.sort_unstable();
        out
    }

    #[test]
    fn solve_examples() {
        let sols = solve_quadruples(1, 2);
        assert_eq!(sols.len(), 4);
        assert!(sols.contains(&Quadruple::new(0, -1, 1, -1)));
        assert!(solve_quadruples(2, 2).is_empty());
        assert_eq!(solve_quadruples(9, 3).len(), 8);
        for (n, k) in [(1, 2), (2, 2), (9, 3), (25, 5), (24, 2), (49, 7)] {
            assert_eq!(solve_quadruples(n, k), boxed_search(n as i64, k), "n={n} k={k}");
        }
    }

    #[test]
    fn solutions_satisfy_identities() {
        for k in [2, 3, 5] {
            for n in 0..200 {
                for g in solve_quadruples(n, k) {
                    assert!(g.in_level(k));
                    assert_eq!(g.level_n(), n as i64);
                }
            }
        }
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(Quadruple::IDENTITY.canonicalize(), Quadruple::new(0, 0, -1, 0));
        let g = Quadruple::new(0, -1, 1, -1);
        let mut rots = g.rotations().to_vec();
        rots.sort();
        assert_eq!(g.canonicalize(), rots[0]);
        assert_eq!(g.canonicalize(), Quadruple::new(-1, 0, -1, -1));
        for g in unconstrained_quadruples(65) {
            assert_eq!(g.canonicalize().canonicalize(), g.canonicalize());
        }
    }

    #[test]
    fn orbit_point_examples() {
        assert_eq!(Quadruple::IDENTITY.orbit_point(), Point2::ORIGIN);
        assert_eq!(Quadruple::new(0, -1, 1, -1).orbit_point(), Point2::new(0.5, -0.5));
        for g in unconstrained_quadruples(1) {
            assert_relative_eq!(g.orbit_point().norm_sq(), 0.5, max_relative = 1e-14);
        }
        for g in unconstrained_quadruples(1105) {
            assert_relative_eq!(
                g.orbit_point().norm_sq(),
                1105.0 / 1106.0,
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn rotations_give_same_point() {
        for g in unconstrained_quadruples(325) {
            let x = g.orbit_point();
            for h in g.rotations() {
                let y = h.orbit_point();
                assert!((x.x - y.x).abs() < 1e-15 && (x.y - y.y).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn mobius_examples() {
        let z = Point2::new(0.3, -0.2);
        let w = Quadruple::IDENTITY.apply(z);
        assert!((w.x - z.x).abs() < 1e-16 && (w.y - z.y).abs() < 1e-16);
        let g = Quadruple::new(0, -1, 1, -1);
        assert_eq!(g.apply(Point2::ORIGIN), Point2::new(0.5, -0.5));
        let back = g.inverse().apply(g.apply(z));
        assert!((back.x - z.x).abs() < 1e-14 && (back.y - z.y).abs() < 1e-14);
    }

    #[test]
    fn psl_bridge_examples() {
        let id = PslMatrix::new(1, 0, 0, 1).unwrap();
        assert_eq!(psl_to_quadruple(&id).unwrap(), Quadruple::IDENTITY);
        let m = PslMatrix::new(1, 2, 0, 1).unwrap();
        assert!(m.in_level(2));
        let g = psl_to_quadruple(&m).unwrap();
        assert_eq!(g, Quadruple::new(0, -1, 1, -1));
        assert!(g.satisfies_determinant());
        let m3 = PslMatrix::new(1, 3, 0, 1).unwrap();
        assert!(m3.in_level(3));
        assert!(matches!(psl_to_quadruple(&m3), Err(Error::NonIntegral(_))));
        assert!(PslMatrix::new(1, 1, 1, 1).is_err());
        assert_eq!(PslMatrix::new(-1, 0, 0, -1).unwrap().entries(), (1, 0, 0, 1));
    }

    #[test]
    fn disk_action_is_conjugate_of_upper_action() {
        // generators of the level-2 group and a few products
        let mats = [(1, 2, 0, 1), (1, 0, 2, 1), (3, 2, 4, 3), (1, -2, 2, -3), (5, 2, 2, 1)];
        for (a, b, c, d) in mats {
            let m = PslMatrix::new(a, b, c, d).unwrap();
            assert!(m.in_level(2));
            let g = psl_to_quadruple(&m).unwrap();
            assert!(g.in_level(2), "{g:?}");
            for z in [Point2::new(0.1, 0.7), Point2::new(-0.4, -0.2), Point2::ORIGIN] {
                let via_upper = upper_to_disk(m.apply_upper(disk_to_upper(z)));
                let direct = g.apply(z);
                assert!((via_upper.x - direct.x).abs() < 1e-12);
                assert!((via_upper.y - direct.y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn compose_matches_action() {
        let gs: Vec<Quadruple> = (1..30).flat_map(|n| solve_quadruples(n, 2)).collect();
        let z = Point2::new(0.2, 0.1);
        for a in gs.iter().take(12) {
            for b in gs.iter().skip(5).take(12) {
                let ab = a.compose(b).unwrap();
                assert!(ab.in_level(2), "{a:?} * {b:?} = {ab:?}");
                let w1 = ab.apply(z);
                let w2 = a.apply(b.apply(z));
                assert!((w1.x - w2.x).abs() < 1e-9 && (w1.y - w2.y).abs() < 1e-9);
            }
        }
    }
}
