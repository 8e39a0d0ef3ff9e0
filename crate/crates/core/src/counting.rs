//! Exact counters for lattice points on circles and for geodesics returning to
//! the basepoint on the flat torus and on the level-`k` modular surfaces.
//!
//! Every closed-form counter here has a brute-force twin so the two can be
//! compared over whole ranges of `n`.

use std::collections::BinaryHeap;
use std::cmp::Reverse;

use num_integer::Roots;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuchsian::{solve_quadruples, unconstrained_quadruples, Quadruple};

/// `n = 2^two_exp * Π p_i^β_i * Π q_j^γ_j` with `p_i ≡ 1` and `q_j ≡ 3 (mod 4)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub two_exp: u32,
    pub one_mod4: Vec<(u64, u32)>,
    pub three_mod4: Vec<(u64, u32)>,
}

impl Factorization {
    /// Trial division. `n` must be positive.
    pub fn of(mut n: u64) -> Self {
        assert!(n > 0, "cannot factor 0");
        let mut two_exp = 0;
        while n.is_multiple_of(2) {
            n /= 2;
            two_exp += 1;
        }
        let mut one_mod4 = Vec::new();
        let mut three_mod4 = Vec::new();
        let mut p = 3u64;
        while p * p <= n {
            if n.is_multiple_of(p) {
                let mut e = 0;
                while n.is_multiple_of(p) {
                    n /= p;
                    e += 1;
                }
                if p % 4 == 1 {
                    one_mod4.push((p, e));
                } else {
                    three_mod4.push((p, e));
                }
            }
            p += 2;
        }
        if n > 1 {
            if n % 4 == 1 {
                one_mod4.push((n, 1));
            } else {
                three_mod4.push((n, 1));
            }
        }
        Self { two_exp, one_mod4, three_mod4 }
    }

    pub fn product(&self) -> u64 {
        let mut v = 1u64 << self.two_exp;
        for &(p, e) in self.one_mod4.iter().chain(&self.three_mod4) {
            v *= p.pow(e);
        }
        v
    }
}

/// Number of `(p, q) ∈ Z²` with `p² + q² = n`, from the prime factorization.
///
/// `R(0) = 1` by convention (only the origin).
pub fn rg_formula(n: u64) -> u64 {
    if n == 0 {
        return 1;
    }
    let f = Factorization::of(n);
    if f.three_mod4.iter().any(|&(_, e)| e % 2 == 1) {
        return 0;
    }
    4 * f.one_mod4.iter().map(|&(_, e)| 1 + e as u64).product::<u64>()
}

/// Exhaustive count of `p² + q² = n`.
pub fn rg_bruteforce(n: u64) -> u64 {
    let root = n.sqrt() as i64;
    let n = n as i64;
    let mut count = 0;
    for p in -root..=root {
        let rest = n - p * p;
        let q = rest.sqrt();
        if q * q == rest {
            count += if q == 0 { 1 } else { 2 };
        }
    }
    count
}

/// `R(x)` for a rational argument: zero unless `x` is a non-negative integer.
pub fn rg_rational(x: Ratio<u64>) -> u64 {
    if x.is_integer() {
        rg_formula(x.to_integer())
    } else {
        0
    }
}

/// Geodesic loops of length `t` at the basepoint of the flat square torus,
/// given `t²` exactly.
pub fn torus_focusing(t_squared: Ratio<u64>) -> u64 {
    rg_rational(t_squared)
}

/// Geodesic length of the loops counted at `n`: `artanh sqrt(n / (n + 1))`.
pub fn gamma_length(n: u64) -> f64 {
    let n = n as f64;
    (n / (n + 1.0)).sqrt().atanh()
}

/// Closed form for the loop count at `n = cosh² t - 1` on the level-`k`
/// surface, `k ∈ {2, 3, 5}`. Zero at `n = 0` (the constant loop is not counted).
pub fn gamma_focusing_formula(k: u64, n: u64) -> Result<u64> {
    let divisor = match k {
        2 => 1,
        3 => 9,
        5 => 25,
        other => return Err(Error::UnsupportedLevel(other)),
    };
    if n == 0 {
        return Ok(0);
    }
    let a = rg_rational(Ratio::new(n, divisor));
    let b = rg_formula(n + 1);
    Ok(a * b / 4)
}

/// Upper bound `R(n / k²) R(n + 1) / 4` for odd prime levels.
pub fn gamma_focusing_upper_bound(k: u64, n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    rg_rational(Ratio::new(n, k * k)) * rg_formula(n + 1) / 4
}

/// Distinct orbit points of the level-`k` group at `|x|² = n / (n + 1)`,
/// counted by enumerating quadruples. Zero at `n = 0`.
pub fn gamma_focusing_bruteforce(k: u64, n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut forms: Vec<Quadruple> = solve_quadruples(n, k).iter().map(|g| g.canonicalize()).collect();
    forms.sort_unstable();
    forms.dedup();
    forms.len() as u64
}

/// Outcome of checking the quarter-turn orbit structure at one `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitStructure {
    pub n: u64,
    pub k: u64,
    /// Quarter-turn orbits of unconstrained solutions.
    pub orbits: usize,
    /// Orbits whose `(p, q)` satisfy the divisibility the level forces.
    pub eligible: usize,
    /// Orbits violating "exactly one group element if eligible, none otherwise".
    pub violations: usize,
}

/// For every quarter-turn orbit of unconstrained solutions at `n`, counts how
/// many distinct group elements (quadruples up to sign) it contains.
///
/// For `k = 2` every orbit must hold exactly one; for odd `k` the orbits with
/// `p ≡ q ≡ 0 (mod k)` hold exactly one and all others none.
pub fn rotation_orbit_structure(k: u64, n: u64) -> OrbitStructure {
    let all = unconstrained_quadruples(n);
    let mut orbits: Vec<Quadruple> = all.iter().map(|g| g.canonicalize()).collect();
    orbits.sort_unstable();
    orbits.dedup();
    let ki = k as i64;
    let mut eligible = 0;
    let mut violations = 0;
    for rep in &orbits {
        let mut elems: Vec<Quadruple> = rep
            .rotations()
            .into_iter()
            .filter(|g| g.satisfies_congruences(k))
            .map(|g| g.sign_reduced())
            .collect();
        elems.sort_unstable();
        elems.dedup();
        let is_eligible = k == 2 || (rep.p.rem_euclid(ki) == 0 && rep.q.rem_euclid(ki) == 0);
        if is_eligible {
            eligible += 1;
        }
        let expected = usize::from(is_eligible);
        if elems.len() != expected {
            violations += 1;
        }
    }
    OrbitStructure { n, k, orbits: orbits.len(), eligible, violations }
}

/// A value `n = p^k + q^k` with at least two unrelated representations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coincidence {
    pub n: u128,
    /// Unordered pairs `(p, q)`, `0 <= p <= q`, ascending.
    pub representations: Vec<(u64, u64)>,
}

/// All `n = p^k + q^k` with `0 <= p <= q <= bound` that have two or more
/// representations, ascending in `n`.
///
/// Sums are generated in increasing order from a heap holding one frontier
/// pair per `p`, so memory stays `O(bound)`.
pub fn lk_circle_coincidences(k_exp: u32, bound: u64) -> Result<Vec<Coincidence>> {
    if !(2..=8).contains(&k_exp) {
        return Err(Error::Precondition(format!("exponent {k_exp} not in 2..=8")));
    }
    if bound > 10_000 {
        return Err(Error::Precondition(format!("bound {bound} exceeds 10^4")));
    }
    let pow = |v: u64| -> Result<u128> {
        (v as u128)
            .checked_pow(k_exp)
            .ok_or_else(|| Error::Overflow(format!("{v}^{k_exp}")))
    };
    let powers: Vec<u128> = (0..=bound).map(pow).collect::<Result<_>>()?;
    powers[bound as usize]
        .checked_mul(2)
        .ok_or_else(|| Error::Overflow(format!("2 * {bound}^{k_exp}")))?;

    let mut heap: BinaryHeap<Reverse<(u128, u64, u64)>> = (0..=bound)
        .map(|p| Reverse((2 * powers[p as usize], p, p)))
        .collect();
    let mut out = Vec::new();
    let mut current: Option<Coincidence> = None;
    while let Some(Reverse((sum, p, q))) = heap.pop() {
        if q < bound {
            heap.push(Reverse((powers[p as usize] + powers[q as usize + 1], p, q + 1)));
        }
        match current.as_mut() {
            Some(c) if c.n == sum => c.representations.push((p, q)),
            _ => {
                if let Some(done) = current.take() {
                    if done.representations.len() >= 2 {
                        out.push(done);
                    }
                }
                current = Some(Coincidence { n: sum, representations: vec![(p, q)] });
            }
        }
    }
    if let Some(done) = current {
        if done.representations.len() >= 2 {
            out.push(done);
        }
    }
    for c in &mut out {
        c.representations.sort_unstable();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rg_examples() {
        assert_eq!(rg_formula(1), 4);
        assert_eq!(rg_formula(3), 0);
        assert_eq!(rg_formula(25), 12);
        assert_eq!(rg_bruteforce(0), 1);
        assert_eq!(rg_bruteforce(2), 4);
        assert_eq!(rg_bruteforce(10), 8);
        assert_eq!(rg_formula(0), 1);
    }

    #[test]
    fn factorization_reconstructs() {
        for n in 1..5000u64 {
            let f = Factorization::of(n);
            assert_eq!(f.product(), n);
            assert!(f.one_mod4.iter().all(|&(p, _)| p % 4 == 1));
            assert!(f.three_mod4.iter().all(|&(p, _)| p % 4 == 3));
        }
        let f = Factorization::of(2 * 2 * 3 * 3 * 5 * 7 * 13 * 13);
        assert_eq!(f.two_exp, 2);
        assert_eq!(f.one_mod4, vec![(5, 1), (13, 2)]);
        assert_eq!(f.three_mod4, vec![(3, 2), (7, 1)]);
    }

    #[test]
    fn torus_examples() {
        assert_eq!(torus_focusing(Ratio::from_integer(2)), 4);
        assert_eq!(torus_focusing(Ratio::new(9, 4)), 0);
        assert_eq!(torus_focusing(Ratio::from_integer(25)), 12);
        assert_eq!(torus_focusing(Ratio::new(50, 2)), 12);
    }

    #[test]
    fn gamma_formula_examples() {
        assert_eq!(gamma_focusing_formula(2, 1).unwrap(), 4);
        assert_eq!(gamma_focusing_formula(2, 2).unwrap(), 0);
        assert_eq!(gamma_focusing_formula(3, 9).unwrap(), 8);
        assert_eq!(gamma_focusing_formula(2, 0).unwrap(), 0);
        assert!(matches!(gamma_focusing_formula(7, 1), Err(Error::UnsupportedLevel(7))));
    }

    #[test]
    fn gamma_bruteforce_examples() {
        assert_eq!(gamma_focusing_bruteforce(2, 1), 4);
        assert_eq!(gamma_focusing_bruteforce(2, 0), 0);
        assert_eq!(gamma_focusing_bruteforce(3, 9), 8);
        for n in 0..=300 {
            assert!(gamma_focusing_bruteforce(7, n) <= gamma_focusing_upper_bound(7, n));
        }
    }

    #[test]
    fn gamma_length_matches_orbit_radius() {
        let t = gamma_length(1);
        assert!((t - 0.5f64.sqrt().atanh()).abs() < 1e-15);
        assert!((t.cosh().powi(2) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn orbit_structure_small() {
        for k in [2, 3, 5] {
            for n in 1..=100 {
                let s = rotation_orbit_structure(k, n);
                assert_eq!(s.violations, 0, "k={k} n={n}");
                assert_eq!(s.orbits * 4, unconstrained_quadruples(n).len());
                assert_eq!(s.eligible as u64, gamma_focusing_formula(k, n).unwrap());
            }
        }
    }

    #[test]
    fn coincidence_examples() {
        let found = lk_circle_coincidences(4, 200).unwrap();
        let first = &found[0];
        assert_eq!(first.n, 133u128.pow(4) + 134u128.pow(4));
        assert_eq!(first.n, 158u128.pow(4) + 59u128.pow(4));
        assert_eq!(first.representations, vec![(59, 158), (133, 134)]);
        assert!(lk_circle_coincidences(4, 100).unwrap().is_empty());
        assert!(lk_circle_coincidences(4, 58).unwrap().is_empty());
        assert!(lk_circle_coincidences(4, 20_000).is_err());
    }

    #[test]
    fn squares_coincidences_are_sums_of_two_squares() {
        // k = 2: 25 = 0² + 5² = 3² + 4² is the first.
        let found = lk_circle_coincidences(2, 10).unwrap();
        assert_eq!(found[0].n, 25);
        assert_eq!(found[0].representations, vec![(0, 5), (3, 4)]);
    }
}
