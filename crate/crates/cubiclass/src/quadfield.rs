//! Invariants of the real quadratic resolvent K = Q(√d).
//!
//! The narrow class group and the wide class group share their 3-part (the
//! kernel of the narrow→wide surjection has exponent 2), so everything
//! 3-adic is read off the wide group, which is what the reduced-ideal cycle
//! machinery below computes directly; the narrow class number is recovered
//! exactly from the norm of the fundamental unit, h⁺ = h·(2 − [N(η)=−1]).
//!
//! Elements of O_K are written over the integral basis {1, ω} with
//! ω² = q₀ + t₀·ω, i.e. ω = (1+√d)/2 for odd d, ω = √(d/4) for d ≡ 0 (4).
//! Ideals are kept in the standard form [a, (b+√d)/2] with 4a | b²−d.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

use crate::arith::{is_fundamental_discriminant, isqrt, sqrt_mod_p, SpfSieve};
use crate::{Error, Result};

/// An element u + v·ω of O_K.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadElt {
    pub u: BigInt,
    pub v: BigInt,
}

/// Basis data for O_K: ω² = q0 + t0·ω.
#[derive(Debug, Clone, Copy)]
pub struct QuadBasis {
    pub d: i64,
    pub q0: i64,
    pub t0: i64,
}

impl QuadBasis {
    pub fn new(d: i64) -> Self {
        if d.rem_euclid(4) == 1 {
            QuadBasis { d, q0: (d - 1) / 4, t0: 1 }
        } else {
            QuadBasis { d, q0: d / 4, t0: 0 }
        }
    }
}

impl QuadElt {
    pub fn new(u: i64, v: i64) -> Self {
        QuadElt { u: BigInt::from(u), v: BigInt::from(v) }
    }

    pub fn mul(&self, other: &QuadElt, basis: &QuadBasis) -> QuadElt {
        // (u1 + v1ω)(u2 + v2ω) = u1u2 + q0·v1v2 + (u1v2 + u2v1 + t0·v1v2)ω
        let vv = &self.v * &other.v;
        QuadElt {
            u: &self.u * &other.u + &vv * basis.q0,
            v: &self.u * &other.v + &other.u * &self.v + &vv * basis.t0,
        }
    }

    pub fn conj(&self, basis: &QuadBasis) -> QuadElt {
        // ω̄ = t0 − ω
        QuadElt {
            u: &self.u + &self.v * basis.t0,
            v: -self.v.clone(),
        }
    }

    pub fn norm(&self, basis: &QuadBasis) -> BigInt {
        // N(u+vω) = u² + t0·uv − q0·v²
        &self.u * &self.u + &self.u * &self.v * basis.t0 - &self.v * &self.v * basis.q0
    }

    /// Coordinates (x, y) with the element equal to (x + y√d)/2.
    pub fn xy_coords(&self, basis: &QuadBasis) -> (BigInt, BigInt) {
        if basis.t0 == 1 {
            // u + v(1+√d)/2 = (2u+v + v√d)/2
            (&self.u * 2 + &self.v, self.v.clone())
        } else {
            // u + v√(d/4) = (2u + v√d)/2
            (&self.u * 2, self.v.clone())
        }
    }

    /// Build from (x + y√d)/2 coordinates; errors if not integral in O_K.
    pub fn from_xy(x: &BigInt, y: &BigInt, basis: &QuadBasis) -> Result<QuadElt> {
        if basis.t0 == 1 {
            let num = x - y;
            if (&num % 2i32).is_zero() {
                Ok(QuadElt { u: num / 2, v: y.clone() })
            } else {
                Err(Error::Inconsistent(format!(
                    "({x} + {y}√{})/2 is not integral",
                    basis.d
                )))
            }
        } else if (x % 2i32).is_zero() {
            Ok(QuadElt { u: x / 2, v: y.clone() })
        } else {
            Err(Error::Inconsistent(format!(
                "({x} + {y}√{})/2 is not integral",
                basis.d
            )))
        }
    }
}

/// Primitive ideal [a, (b+√d)/2] with a > 0 and 4a | b²−d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadIdeal {
    pub a: i128,
    pub b: i128,
}

/// A 3-virtual unit: an element whose principal ideal is an exact cube.
#[derive(Debug, Clone)]
pub struct VirtualUnit {
    pub element: QuadElt,
    /// The ideal j with element·O_K = j³ (trivial for the unit generator).
    pub cube_root_ideal: Option<QuadIdeal>,
    pub is_unit: bool,
}

/// Fundamental unit of O_K via the continued fraction of ω.
///
/// Returns ((x, y), norm) with η = (x + y√d)/2 > 1 and N(η) = ±1.
pub fn fundamental_unit(d: i64) -> Result<((BigInt, BigInt), i32)> {
    if d <= 1 || !is_fundamental_discriminant(d as i128) {
        return Err(Error::Malformed(format!("{d} is not a positive fundamental discriminant")));
    }
    // PQa on α₀ = (p0 + √dd)/q0.
    let (dd, p0, q0) = if d % 4 == 1 { (d as i128, 1i128, 2i128) } else { (d as i128 / 4, 0i128, 1i128) };
    let sq = isqrt(dd);
    let mut p = p0;
    let mut q = q0;
    // Convergent matrix M_i = [[p_{i-1}, p_{i-2}], [q_{i-1}, q_{i-2}]].
    let mut m00 = BigInt::one();
    let mut m01 = BigInt::zero();
    let mut m10 = BigInt::zero();
    let mut m11 = BigInt::one();
    let mut seen: HashMap<(i128, i128), (usize, BigInt, BigInt, BigInt, BigInt)> = HashMap::new();
    for step in 0..200_000usize {
        if let Some((_, s00, s01, s10, s11)) = seen.get(&(p, q)) {
            // Tail matrix T = M_s⁻¹ · M_i (det M_s = ±1).
            let det_s = s00 * s11 - s01 * s10; // ±1
            let (i00, i01, i10, i11) = (
                s11.clone() * &det_s,
                -s01.clone() * &det_s,
                -s10.clone() * &det_s,
                s00.clone() * &det_s,
            );
            let t10 = &i10 * &m00 + &i11 * &m10;
            let t11 = &i10 * &m01 + &i11 * &m11;
            let _ = (i00, i01);
            // η = t10·α_s + t11 with α_s = (p + √dd)/q.
            // In (x + y√d)/2 coordinates: √dd = √d or √d/2.
            let (num_x, num_y, den): (BigInt, BigInt, i128) = if d % 4 == 1 {
                // η = (t10·p + t11·q + t10·√d) / q
                (&t10 * p + &t11 * q, t10.clone(), q)
            } else {
                // √dd = √(d/4) = √d/2: η = (2·t10·p + 2·t11·q + t10·√d)/(2q)
                ((&t10 * p + &t11 * q) * 2, t10.clone(), 2 * q)
            };
            // Scale to (x + y√d)/2: multiply numerator by 2/den.
            let two = BigInt::from(2);
            let den_b = BigInt::from(den);
            let x2 = &num_x * &two;
            let y2 = &num_y * &two;
            if !(&x2 % &den_b).is_zero() || !(&y2 % &den_b).is_zero() {
                return Err(Error::Inconsistent(format!("CF unit for d={d} not integral")));
            }
            let mut x = x2 / &den_b;
            let mut y = y2 / &den_b;
            if x.is_negative() {
                x = -x;
                y = -y;
            }
            // N(η) = (x² − d y²)/4 must be ±1.
            let n4 = (&x * &x - &y * &y * d) / 4;
            let norm = if n4 == BigInt::one() {
                1
            } else if n4 == -BigInt::one() {
                -1
            } else {
                return Err(Error::Inconsistent(format!("CF unit for d={d} has norm {n4}")));
            };
            // Ensure η > 1 (x, y > 0 gives the unit itself, not a conjugate).
            if y.is_negative() {
                // Replace by ±conjugate inverse: (x, −y) has the same norm.
                y = -y;
            }
            return Ok(((x, y), norm));
        }
        seen.insert((p, q), (step, m00.clone(), m01.clone(), m10.clone(), m11.clone()));
        let ai = (p + sq).div_euclid(q);
        let ai_b = BigInt::from(ai);
        let n00 = &m00 * &ai_b + &m01;
        let n10 = &m10 * &ai_b + &m11;
        m01 = std::mem::replace(&mut m00, n00);
        m11 = std::mem::replace(&mut m10, n10);
        p = ai * q - p;
        q = (dd - p * p) / q;
    }
    Err(Error::BudgetExhausted(format!("CF period for d={d} too long")))
}

/// Generator of a principal ideal, tracked through the reduction walk as
/// (gx + gy·√d) / gden (a fraction over the (x+y√d)/2-free representation).
#[derive(Debug, Clone)]
struct TrackedGen {
    gx: BigInt,
    gy: BigInt,
    gden: BigInt,
}

impl TrackedGen {
    fn one() -> Self {
        TrackedGen { gx: BigInt::one(), gy: BigInt::zero(), gden: BigInt::one() }
    }

    /// Multiply by (b + √d)/(2c).
    fn mul_step(&mut self, b: i128, c: i128, d: i64) {
        let bb = BigInt::from(b);
        let gx = &self.gx * &bb + &self.gy * d;
        let gy = &self.gx + &self.gy * &bb;
        self.gx = gx;
        self.gy = gy;
        self.gden = &self.gden * BigInt::from(2 * c);
        self.normalize();
    }

    fn normalize(&mut self) {
        let g = self.gx.gcd(&self.gy).gcd(&self.gden);
        if !g.is_one() && !g.is_zero() {
            self.gx = &self.gx / &g;
            self.gy = &self.gy / &g;
            self.gden = &self.gden / &g;
        }
        if self.gden.is_negative() {
            self.gx = -self.gx.clone();
            self.gy = -self.gy.clone();
            self.gden = -self.gden.clone();
        }
    }

    /// Final exact element; fails if a denominator other than 1 survives
    /// after scaling into (x+y√d)/2 form.
    fn into_elt(self, basis: &QuadBasis) -> Result<QuadElt> {
        // Element is (gx + gy√d)/gden = (2gx/gden + (2gy/gden)√d)/2.
        let two = BigInt::from(2);
        let x2 = &self.gx * &two;
        let y2 = &self.gy * &two;
        if !(&x2 % &self.gden).is_zero() || !(&y2 % &self.gden).is_zero() {
            return Err(Error::Inconsistent("tracked generator not integral".into()));
        }
        QuadElt::from_xy(&(x2 / &self.gden), &(y2 / &self.gden), basis)
    }
}

/// The real quadratic field Q(√d) with its class-group tables.
pub struct QuadraticField {
    pub d: i64,
    pub basis: QuadBasis,
    /// Fundamental unit as (x, y): η = (x + y√d)/2 > 1.
    pub eta: (BigInt, BigInt),
    pub eta_norm: i32,
    /// Wide class number (reduced-ideal cycles).
    pub h: u64,
    /// Narrow class number: h if N(η) = −1, else 2h.
    pub h_narrow: u64,
    /// 3-rank of the class group (narrow and wide agree).
    pub rho3: u32,
    /// Elementary divisors of the 3-Sylow subgroup (ascending).
    pub cl3_invariants: Vec<u64>,
    /// Reduced-ideal representatives of a basis of the 3-torsion Cl[3].
    pub torsion3: Vec<QuadIdeal>,
    sq: i128,
    cycle_of: HashMap<(i128, i128), u32>,
    principal_cycle: u32,
    cycle_lens: Vec<u32>,
    /// Syl₃ as a table: class-id → cycle-id, with composition indices.
    syl3_elems: Vec<u32>,
}

impl QuadraticField {
    /// Build all invariants. `sieve.limit()` must be at least d/4.
    pub fn new(d: i64, sieve: &SpfSieve) -> Result<QuadraticField> {
        if d <= 1 || !is_fundamental_discriminant(d as i128) {
            return Err(Error::Malformed(format!("{d} is not a positive fundamental discriminant")));
        }
        assert!(sieve.limit() as i64 * 4 + 3 >= d, "SPF sieve too small for d={d}");
        let basis = QuadBasis::new(d);
        let (eta, eta_norm) = fundamental_unit(d)?;
        let sq = isqrt(d as i128);

        // Enumerate reduced ideals (a, b): b in (|√d − 2a|, √d), 4a | b²−d.
        let mut states: Vec<(i128, i128)> = Vec::new();
        let bstart = if d % 2 == 0 { 2 } else { 1 };
        let mut b = bstart;
        while b <= sq {
            let m = (d as i128 - b * b) / 4;
            if m > 0 {
                for a in divisors_of(m as u64, sieve) {
                    let a = a as i128;
                    if reduced_window_ok(d as i128, a, b) {
                        states.push((a, b));
                    }
                }
            }
            b += 2;
        }
        // Partition into rho-cycles.
        let mut cycle_of: HashMap<(i128, i128), u32> = HashMap::new();
        let mut cycle_lens: Vec<u32> = Vec::new();
        let mut principal_cycle = u32::MAX;
        for &s in &states {
            if cycle_of.contains_key(&s) {
                continue;
            }
            let id = cycle_lens.len() as u32;
            let mut cur = s;
            let mut len = 0u32;
            loop {
                cycle_of.insert(cur, id);
                len += 1;
                if cur.0 == 1 {
                    principal_cycle = id;
                }
                cur = rho_step(d as i128, cur);
                if cur == s {
                    break;
                }
                debug_assert!(len < 1_000_000, "runaway rho cycle for d={d}");
            }
            cycle_lens.push(len);
        }
        let h = cycle_lens.len() as u64;
        if principal_cycle == u32::MAX {
            return Err(Error::Inconsistent(format!("no principal cycle for d={d}")));
        }
        let h_narrow = if eta_norm == -1 { h } else { 2 * h };

        let mut field = QuadraticField {
            d,
            basis,
            eta,
            eta_norm,
            h,
            h_narrow,
            rho3: 0,
            cl3_invariants: vec![],
            torsion3: vec![],
            sq,
            cycle_of,
            principal_cycle,
            cycle_lens,
            syl3_elems: vec![],
        };
        field.build_syl3()?;
        Ok(field)
    }

    /// Class (cycle id) of an arbitrary primitive ideal.
    pub fn class_of(&self, ideal: QuadIdeal) -> u32 {
        let (s, _) = reduce_tracked(self.d as i128, ideal);
        *self.cycle_of.get(&s).expect("reduced state must be catalogued")
    }

    pub fn num_classes(&self) -> u64 {
        self.h
    }

    /// Compose two primitive ideals into a primitive ideal of the product
    /// class (the product ideal divided by its rational content).
    pub fn compose(&self, i1: QuadIdeal, i2: QuadIdeal) -> QuadIdeal {
        compose_ideals(self.d as i128, i1, i2)
    }

    pub fn unit_ideal(&self) -> QuadIdeal {
        let b = normalize_b(self.d as i128, 1, self.d as i128 % 2);
        QuadIdeal { a: 1, b }
    }

    pub fn conj_ideal(&self, i: QuadIdeal) -> QuadIdeal {
        let b = normalize_b(self.d as i128, i.a, -i.b);
        QuadIdeal { a: i.a, b }
    }

    /// The prime ideal above a split or ramified prime p, or None if inert.
    pub fn prime_ideal(&self, p: u64) -> Option<QuadIdeal> {
        let d = self.d as i128;
        if p == 2 {
            // Split/ramified at 2 only if d ≡ 1 (mod 8) or d even.
            if d.rem_euclid(8) == 1 {
                return Some(QuadIdeal { a: 2, b: normalize_b(d, 2, 1) });
            }
            if d % 2 == 0 {
                let b = if (d / 4) % 2 == 0 { 0 } else { 2 };
                return Some(QuadIdeal { a: 2, b: normalize_b(d, 2, b) });
            }
            return None;
        }
        let r = sqrt_mod_p((d.rem_euclid(p as i128)) as u64, p)?;
        let mut b = r as i128;
        if (b % 2).abs() != d.rem_euclid(2) {
            b += p as i128; // fix parity: p odd flips it
        }
        debug_assert_eq!((b * b - d).rem_euclid(4 * p as i128), 0);
        Some(QuadIdeal { a: p as i128, b: normalize_b(d, p as i128, b) })
    }

    /// Principality test with exact generator.
    pub fn principal_generator(&self, ideal: QuadIdeal) -> Option<QuadElt> {
        let d = self.d as i128;
        let (s, mut gen) = reduce_tracked(d, ideal);
        if self.cycle_of.get(&s) != Some(&self.principal_cycle) {
            return None;
        }
        // Walk the cycle tracking the generator until the unit ideal shows up.
        let mut cur = s;
        let len = self.cycle_lens[self.principal_cycle as usize] + 2;
        for _ in 0..len {
            if cur.0 == 1 {
                let elt = TrackedGen::into_elt(gen, &self.basis).expect("generator integral");
                debug_assert_eq!(
                    elt.norm(&self.basis).abs(),
                    BigInt::from(ideal.a),
                    "generator norm mismatch for d={}",
                    self.d
                );
                return Some(elt);
            }
            let (b, c) = rho_multiplier(d, cur);
            gen.mul_step(b, c, self.d);
            cur = rho_step(d, cur);
        }
        unreachable!("principal cycle did not contain the unit ideal");
    }

    /// An ideal in the given class with norm coprime to every prime in
    /// `avoid` (scans split primes, then products of two of them).
    pub fn ideal_in_class(&self, class: u32, avoid: &[u64]) -> Result<QuadIdeal> {
        if class == self.principal_cycle {
            return Ok(self.unit_ideal());
        }
        let mut found: Vec<(u32, QuadIdeal)> = Vec::new();
        let mut p = 2u64;
        while p < 4000 + self.d as u64 {
            if crate::arith::is_prime_u64(p)
                && !avoid.contains(&p)
                && self.d as u64 % p != 0
                && crate::arith::kronecker(self.d as i128, p as i128) == 1
            {
                if let Some(ideal) = self.prime_ideal(p) {
                    let c = self.class_of(ideal);
                    if c == class {
                        return Ok(ideal);
                    }
                    let conj = self.conj_ideal(ideal);
                    if self.class_of(conj) == class {
                        return Ok(conj);
                    }
                    found.push((c, ideal));
                    // Products of two found prime ideals.
                    for &(_, other) in &found {
                        let prod = self.compose(ideal, other);
                        if self.class_of(prod) == class {
                            return Ok(prod);
                        }
                        let prod2 = self.compose(self.conj_ideal(ideal), other);
                        if self.class_of(prod2) == class {
                            return Ok(prod2);
                        }
                    }
                }
            }
            p += 1;
            if found.len() > 400 {
                break;
            }
        }
        Err(Error::BudgetExhausted(format!(
            "no coprime representative found for class {class} of d={}",
            self.d
        )))
    }

    /// Generators of the 3-Selmer space V ≅ U/U³ × Cl[3]: the fundamental
    /// unit η plus, per torsion basis ideal, a θ with θ·O_K = j³.
    /// Representatives are chosen coprime to every prime in `avoid`.
    pub fn virtual_units(&self, avoid: &[u64]) -> Result<Vec<VirtualUnit>> {
        let mut out = Vec::with_capacity(1 + self.torsion3.len());
        let (ex, ey) = (&self.eta.0, &self.eta.1);
        out.push(VirtualUnit {
            element: QuadElt::from_xy(ex, ey, &self.basis)?,
            cube_root_ideal: None,
            is_unit: true,
        });
        for &t in &self.torsion3 {
            let class = self.class_of(t);
            let j = self.ideal_in_class(class, avoid)?;
            let j3 = self.compose(self.compose(j, j), j);
            let theta = self.principal_generator(j3).ok_or_else(|| {
                Error::Inconsistent(format!("j³ not principal for d={}", self.d))
            })?;
            out.push(VirtualUnit {
                element: theta,
                cube_root_ideal: Some(j),
                is_unit: false,
            });
        }
        Ok(out)
    }

    /// All elements of the 3-Sylow subgroup, as cycle ids.
    pub fn syl3(&self) -> &[u32] {
        &self.syl3_elems
    }

    pub fn is_principal_class(&self, class: u32) -> bool {
        class == self.principal_cycle
    }

    fn build_syl3(&mut self) -> Result<()> {
        let mut v = 0u32;
        let mut h3 = 1u64;
        let mut m0 = self.h;
        while m0 % 3 == 0 {
            m0 /= 3;
            v += 1;
            h3 *= 3;
        }
        if v == 0 {
            self.syl3_elems = vec![self.principal_cycle];
            return Ok(());
        }
        // Collect Syl₃ by pushing m0-th powers of split-prime classes.
        let mut elems: Vec<u32> = vec![self.principal_cycle];
        let mut p = 2u64;
        let limit = (self.sq as u64 + 10).max(100);
        while (elems.len() as u64) < h3 && p <= limit * 4 {
            if crate::arith::is_prime_u64(p)
                && self.d as u64 % p != 0
                && crate::arith::kronecker(self.d as i128, p as i128) == 1
            {
                if let Some(ideal) = self.prime_ideal(p) {
                    let g = self.class_pow_ideal(ideal, m0);
                    let gc = self.class_of(g);
                    if !elems.contains(&gc) {
                        // Close under composition with everything present.
                        let mut queue = vec![g];
                        while let Some(x) = queue.pop() {
                            let xc = self.class_of(x);
                            if elems.contains(&xc) {
                                continue;
                            }
                            elems.push(xc);
                            let mut products = Vec::new();
                            for &e in &elems {
                                let rep = self.cycle_rep_ideal(e);
                                products.push(self.compose(x, rep));
                            }
                            queue.extend(products);
                        }
                    }
                }
            }
            p += 1;
        }
        if (elems.len() as u64) != h3 {
            return Err(Error::Inconsistent(format!(
                "Syl₃ generation incomplete for d={}: got {} of {}",
                self.d,
                elems.len(),
                h3
            )));
        }
        // Orders within the 3-group; socle basis.
        let order3 = |fk: &Self, c: u32| -> u32 {
            let mut ord = 1u32;
            let mut cur = c;
            while !fk.is_principal_class(cur) {
                let rep = fk.cycle_rep_ideal(cur);
                let cubed = fk.compose(fk.compose(rep, rep), rep);
                cur = fk.class_of(cubed);
                ord *= 3;
            }
            ord
        };
        let orders: Vec<u32> = elems.iter().map(|&c| order3(self, c)).collect();
        // Invariant factors from the order statistics (3-groups of order ≤ 3⁶).
        self.cl3_invariants = invariant_factors_from_orders(&orders, h3);
        // Socle basis (elements of order dividing 3, greedily independent).
        let socle: Vec<u32> = elems
            .iter()
            .zip(&orders)
            .filter(|&(_, &o)| o == 3)
            .map(|(&c, _)| c)
            .collect();
        self.rho3 = {
            let mut n = socle.len() as u64 + 1;
            let mut r = 0u32;
            while n > 1 {
                n /= 3;
                r += 1;
            }
            r
        };
        let mut basis: Vec<u32> = Vec::new();
        let mut span: Vec<u32> = vec![self.principal_cycle];
        for &c in &socle {
            if span.contains(&c) {
                continue;
            }
            basis.push(c);
            // span ← span · ⟨c⟩
            let rep = self.cycle_rep_ideal(c);
            let rep2 = self.compose(rep, rep);
            let mut next = span.clone();
            for &s in &span {
                let sr = self.cycle_rep_ideal(s);
                next.push(self.class_of(self.compose(sr, rep)));
                next.push(self.class_of(self.compose(sr, rep2)));
            }
            next.sort_unstable();
            next.dedup();
            span = next;
            if basis.len() as u32 == self.rho3 {
                break;
            }
        }
        if basis.len() as u32 != self.rho3 {
            return Err(Error::Inconsistent(format!("socle basis incomplete for d={}", self.d)));
        }
        self.torsion3 = basis.iter().map(|&c| self.cycle_rep_ideal(c)).collect();
        self.syl3_elems = elems;
        Ok(())
    }

    /// Some reduced ideal in the cycle with the given id.
    fn cycle_rep_ideal(&self, cycle: u32) -> QuadIdeal {
        // The map is small; a linear scan is fine and deterministic enough
        // because we canonicalize to the lexicographically least state.
        let mut best: Option<(i128, i128)> = None;
        for (&s, &c) in &self.cycle_of {
            if c == cycle {
                best = match best {
                    None => Some(s),
                    Some(b) => Some(b.min(s)),
                };
            }
        }
        let (a, b) = best.expect("cycle id in range");
        QuadIdeal { a, b }
    }

    fn class_pow_ideal(&self, base: QuadIdeal, mut e: u64) -> QuadIdeal {
        let mut acc = self.unit_ideal();
        let mut cur = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.reduce_ideal(self.compose(acc, cur));
            }
            cur = self.reduce_ideal(self.compose(cur, cur));
            e >>= 1;
        }
        acc
    }

    pub fn reduce_ideal(&self, i: QuadIdeal) -> QuadIdeal {
        let (s, _) = reduce_tracked(self.d as i128, i);
        QuadIdeal { a: s.0, b: s.1 }
    }

    /// Regulator ln η as f64 (adequate for reporting and search shaping).
    pub fn regulator_f64(&self) -> f64 {
        // η = (x + y√d)/2 with possibly huge x, y.
        let x = &self.eta.0;
        let y = &self.eta.1;
        let lx = ln_bigint(x);
        let ly = ln_bigint(y) + 0.5 * (self.d as f64).ln();
        let m = lx.max(ly);
        // ln(e^lx + e^ly) − ln 2
        m + ((lx - m).exp() + (ly - m).exp()).ln() - std::f64::consts::LN_2
    }
}

/// ln of a positive BigInt as f64 (handles magnitudes beyond f64 range).
pub fn ln_bigint(n: &BigInt) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 52 {
        let v: f64 = n.to_string().parse().unwrap();
        return v.abs().ln();
    }
    let shift = bits - 52;
    let top = n.abs() >> shift;
    let v: f64 = top.to_string().parse().unwrap();
    v.ln() + (shift as f64) * std::f64::consts::LN_2
}

fn reduced_window_ok(d: i128, a: i128, b: i128) -> bool {
    // |√d − 2a| < b < √d   (exact via squared comparisons; √d irrational).
    if b <= 0 || b * b >= d {
        return false;
    }
    if (b + 2 * a) * (b + 2 * a) <= d {
        return false; // need √d < b + 2a
    }
    let t = 2 * a - b;
    t <= 0 || t * t < d
}

/// b′ ≡ b (mod 2a), normalized: the largest b′ ≤ ⌊√d⌋ if a ≤ √d, else into
/// (−a, a].
fn normalize_b(d: i128, a: i128, b: i128) -> i128 {
    let m = 2 * a;
    let sq = isqrt(d);
    if a * a <= d {
        let r = b.rem_euclid(m);
        sq - (sq - r).rem_euclid(m)
    } else {
        let r = b.rem_euclid(m);
        if r > a {
            r - m
        } else {
            r
        }
    }
}

fn rho_step(d: i128, (a, b): (i128, i128)) -> (i128, i128) {
    let a2 = (d - b * b) / (4 * a);
    debug_assert!(a2 > 0, "rho from non-positive-definite state");
    (a2, normalize_b(d, a2, -b))
}

/// The multiplier data for one rho step from state (a, b): the walk divides
/// by (b+√d)/(2c̃) with c̃ = (b²−d)/(4a) < 0, so the generator is multiplied
/// by (b + √d)/(2c̃).
fn rho_multiplier(_d: i128, (a, b): (i128, i128)) -> (i128, i128) {
    let c = (b * b - _d) / (4 * a);
    (b, c)
}

/// Reduce an arbitrary primitive ideal to its reduced state, tracking the
/// generator quotient: input = gen · (output state ideal).
fn reduce_tracked(d: i128, ideal: QuadIdeal) -> ((i128, i128), TrackedGen) {
    let mut a = ideal.a;
    let mut b = normalize_b(d, a, ideal.b);
    let mut gen = TrackedGen::one();
    let mut guard = 0usize;
    while !reduced_window_ok(d, a, b) {
        let c = (b * b - d) / (4 * a);
        gen.mul_step(b, c, d as i64);
        let a2 = c.abs();
        let b2 = normalize_b(d, a2, -b);
        a = a2;
        b = b2;
        guard += 1;
        assert!(guard < 100_000, "ideal reduction did not terminate");
    }
    ((a, b), gen)
}

/// Primitive product of two standard-form ideals.
fn compose_ideals(d: i128, i1: QuadIdeal, i2: QuadIdeal) -> QuadIdeal {
    let (a1, b1) = (i1.a, i1.b);
    let (a2, b2) = (i2.a, i2.b);
    let s = (b1 + b2) / 2;
    let (g1, u1, v1) = xgcd(a1, a2);
    let (g, x, w) = xgcd(g1, s);
    let u = x * u1;
    let v = x * v1;
    let a3 = (a1 / g) * (a2 / g);
    // num ≡ u·a₁·b₂ + v·a₂·b₁ + w·(b₁b₂+d)/2 (mod 2a₃g); the coefficients are
    // first reduced mod 2a₃g so the i128 products cannot overflow.
    let m = 2 * a3 * g;
    let mulmod = |x: i128, y: i128| -> i128 {
        let (xr, yr) = (x.rem_euclid(m), y.rem_euclid(m));
        if let Some(p) = xr.checked_mul(yr) {
            p.rem_euclid(m)
        } else {
            // Fall back to BigInt on overflow (large j³ compositions).
            use num_traits::ToPrimitive;
            let p = BigInt::from(xr) * BigInt::from(yr) % BigInt::from(m);
            p.to_i128().unwrap().rem_euclid(m)
        }
    };
    let num = (mulmod(mulmod(u, a1), b2) + mulmod(mulmod(v, a2), b1)
        + mulmod(w, (b1 * b2 + d) / 2))
        .rem_euclid(m);
    debug_assert_eq!(num.rem_euclid(g), 0, "composition numerator not divisible by g");
    let b3 = (num / g).rem_euclid(2 * a3);
    let b3 = normalize_b(d, a3, b3);
    debug_assert_eq!((b3 * b3 - d).rem_euclid(4 * a3), 0, "composition invariant");
    QuadIdeal { a: a3, b: b3 }
}

fn xgcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        let s = if a < 0 { -1 } else { 1 };
        return (a.abs(), s, 0);
    }
    let (g, x, y) = xgcd(b, a.rem_euclid(b));
    (g, y, x - a.div_euclid(b) * y)
}

fn divisors_of(n: u64, sieve: &SpfSieve) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in sieve.factor(n as usize) {
        let len = divs.len();
        let mut pe = 1u64;
        for _ in 0..e {
            pe *= p;
            for i in 0..len {
                divs.push(divs[i] * pe);
            }
        }
    }
    divs
}

/// Elementary divisors of an abelian 3-group from its element orders.
fn invariant_factors_from_orders(orders: &[u32], size: u64) -> Vec<u64> {
    // Enumerate partitions v = λ1 ≥ λ2 ≥ …, match order statistics.
    let mut v = 0u32;
    let mut n = size;
    while n > 1 {
        n /= 3;
        v += 1;
    }
    let partitions = partitions_of(v);
    let mut sorted_orders = orders.to_vec();
    sorted_orders.sort_unstable();
    for part in partitions {
        let mut elems: Vec<u32> = vec![];
        // Orders of all elements of ⨁ C_{3^λi}: max over coordinates.
        let ranks: Vec<u32> = part.clone();
        let total: u64 = ranks.iter().map(|&l| 3u64.pow(l)).product();
        if total != size {
            continue;
        }
        gen_orders(&ranks, 0, 1, &mut elems);
        elems.sort_unstable();
        if elems == sorted_orders {
            let mut out: Vec<u64> = part.iter().map(|&l| 3u64.pow(l)).collect();
            out.sort_unstable();
            return out;
        }
    }
    // Fall back to rank-only information (should not happen).
    vec![size]
}

fn gen_orders(ranks: &[u32], idx: usize, cur_order: u32, out: &mut Vec<u32>) {
    if idx == ranks.len() {
        out.push(cur_order);
        return;
    }
    for e in 0..=ranks[idx] {
        let o = 3u32.pow(e);
        gen_orders(ranks, idx + 1, cur_order.max(o), out);
    }
}

fn partitions_of(v: u32) -> Vec<Vec<u32>> {
    fn rec(rem: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        for next in (1..=max.min(rem)).rev() {
            cur.push(next);
            rec(rem - next, next, cur, out);
            cur.pop();
        }
    }
    let mut out = vec![];
    if v == 0 {
        out.push(vec![]);
        return out;
    }
    rec(v, v, &mut vec![], &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sieve() -> SpfSieve {
        SpfSieve::new(30_000)
    }

    #[test]
    fn fundamental_units_known() {
        // d=5: golden ratio (1+√5)/2, norm −1.
        let ((x, y), n) = fundamental_unit(5).unwrap();
        assert_eq!((x, y, n), (BigInt::from(1), BigInt::from(1), -1));
        // d=8: 1+√2 = (2+√8·…)/2 with coordinates (2, 1), norm −1.
        let ((x, y), n) = fundamental_unit(8).unwrap();
        assert_eq!((x, y, n), (BigInt::from(2), BigInt::from(1), -1));
        // d=229: (15+√229)/2, norm −1 — verify (15²−229)/4 = −1.
        let ((x, y), n) = fundamental_unit(229).unwrap();
        assert_eq!((x, y, n), (BigInt::from(15), BigInt::from(1), -1));
        assert_eq!((15 * 15 - 229) / 4, -1);
        // d=12: 2+√3, norm +1.
        let ((x, y), n) = fundamental_unit(12).unwrap();
        assert_eq!((x, y, n), (BigInt::from(4), BigInt::from(1), 1));
        // d=17: 4+√17, norm −1.
        let ((x, y), n) = fundamental_unit(17).unwrap();
        assert_eq!((x, y, n), (BigInt::from(8), BigInt::from(2), -1));
    }

    #[test]
    fn eta_is_minimal_pell_scan() {
        // Brute-force minimal solution of |x² − d y²| = 4 and compare.
        let s = sieve();
        for d in 5i64..500 {
            if !is_fundamental_discriminant(d as i128) {
                continue;
            }
            let ((x, y), _) = fundamental_unit(d).unwrap();
            let mut found: Option<(i128, i128)> = None;
            'outer: for yy in 1i128..200_000 {
                let dy2 = d as i128 * yy * yy;
                let xx = isqrt(dy2);
                for cand in xx.saturating_sub(2)..=xx + 2 {
                    if cand <= 0 {
                        continue;
                    }
                    if (cand * cand - dy2).abs() == 4 {
                        found = Some((cand, yy));
                        break 'outer;
                    }
                }
            }
            let (fx, fy) = found.unwrap_or_else(|| panic!("no Pell solution for d={d} in scan"));
            assert_eq!(
                (BigInt::from(fx), BigInt::from(fy)),
                (x.clone(), y.clone()),
                "non-minimal unit for d={d}"
            );
            let _ = QuadraticField::new(d, &s).unwrap();
        }
    }

    #[test]
    fn class_groups_known() {
        let s = sieve();
        // d=229: h=3, ρ₃=1 (paper §4.1).
        let k = QuadraticField::new(229, &s).unwrap();
        assert_eq!(k.h, 3);
        assert_eq!(k.rho3, 1);
        assert_eq!(k.cl3_invariants, vec![3]);
        // d=1129: h=9 with cyclic 3-part of order 9 (paper §4.1: class number 9).
        let k = QuadraticField::new(1129, &s).unwrap();
        assert_eq!(k.h, 9);
        assert_eq!(k.rho3, 1);
        assert_eq!(k.cl3_invariants, vec![9]);
        // d=32009: ρ₃=2 (paper Table 6, quartet).
        let k = QuadraticField::new(32009, &s).unwrap();
        assert_eq!(k.rho3, 2);
        assert_eq!(k.cl3_invariants, vec![3, 3]);
        // d=5: trivial.
        let k = QuadraticField::new(5, &s).unwrap();
        assert_eq!((k.h, k.rho3), (1, 0));
        // d=40: h=2, h⁺=2 (norm −1? N(η(40)): 40: η=3+√10, norm −1 → h⁺=h=2).
        let k = QuadraticField::new(40, &s).unwrap();
        assert_eq!(k.h, 2);
    }

    #[test]
    fn principality_and_generator() {
        let s = sieve();
        let k = QuadraticField::new(229, &s).unwrap();
        // A split prime of class order 3: p³ principal, p not.
        let mut p = 2u64;
        let ideal = loop {
            if crate::arith::kronecker(229, p as i128) == 1 {
                if let Some(i) = k.prime_ideal(p) {
                    if !k.is_principal_class(k.class_of(i)) {
                        break i;
                    }
                }
            }
            p += 1;
        };
        assert!(k.principal_generator(ideal).is_none());
        let cube = k.compose(k.compose(ideal, ideal), ideal);
        let gen = k.principal_generator(cube).expect("cube must be principal");
        assert_eq!(gen.norm(&k.basis).abs(), BigInt::from(ideal.a).pow(3));
    }

    #[test]
    fn virtual_units_examples() {
        let s = sieve();
        // d=37: ρ₃ = 0 → V = ⟨η⟩ only (paper Example 4.2).
        let k = QuadraticField::new(37, &s).unwrap();
        let v = k.virtual_units(&[]).unwrap();
        assert_eq!(v.len(), 1);
        assert!(v[0].is_unit);
        // d=229: {η, θ} with θ·O_K = j³.
        let k = QuadraticField::new(229, &s).unwrap();
        let v = k.virtual_units(&[2]).unwrap();
        assert_eq!(v.len(), 2);
        let theta = &v[1];
        let j = theta.cube_root_ideal.unwrap();
        assert_eq!(
            theta.element.norm(&k.basis).abs(),
            BigInt::from(j.a).pow(3)
        );
        // θ must not be a perfect cube in K: its ideal j has class order 3.
        assert!(!k.is_principal_class(k.class_of(j)));
        // d=5: h=1 → only η.
        let k = QuadraticField::new(5, &s).unwrap();
        assert_eq!(k.virtual_units(&[]).unwrap().len(), 1);
    }

    #[test]
    fn selmer_dimension_invariant() {
        let s = sieve();
        for d in [5i64, 8, 12, 13, 17, 21, 24, 29, 33, 37, 40, 44, 229, 257, 316, 321, 469, 473] {
            let k = QuadraticField::new(d, &s).unwrap();
            let v = k.virtual_units(&[]).unwrap();
            assert_eq!(v.len() as u32, 1 + k.rho3, "dim V mismatch for d={d}");
        }
    }

    #[test]
    fn analytic_class_number_formula() {
        // h = √d · L(1, χ_d) / (2 ln η) with a 2·10⁵-term partial sum.
        // Full range d < 10⁴ exercised in the integration suite; spot-check
        // a representative sample here.
        let s = SpfSieve::new(3000);
        for d in [5i64, 8, 40, 229, 316, 469, 733, 761, 1129, 2677, 3173, 7053, 9413] {
            let k = QuadraticField::new(d, &s).unwrap();
            let h_analytic = analytic_h(d, k.regulator_f64());
            assert_eq!(k.h, h_analytic, "analytic mismatch for d={d}");
        }
    }

    pub(crate) fn analytic_h(d: i64, regulator: f64) -> u64 {
        let n_terms = 200_000usize;
        let chi: Vec<i32> = (0..d as usize)
            .map(|n| crate::arith::kronecker(d as i128, n as i128))
            .collect();
        let mut l = 0f64;
        for n in 1..=n_terms {
            let c = chi[n % d as usize];
            if c != 0 {
                l += c as f64 / n as f64;
            }
        }
        let h = (d as f64).sqrt() * l / (2.0 * regulator);
        h.round() as u64
    }
}
