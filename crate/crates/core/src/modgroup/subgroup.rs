use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use super::element::{complete_left_column, gcd, GroupElement};
use crate::error::{Error, Result};

/// The subgroup families. `Gamma1` and `Gamma` have `-I` adjoined so that every
/// subgroup contains `-I`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubgroupKind {
    Full,
    Gamma0(u32),
    /// `+-Gamma1(N)`.
    Gamma1(u32),
    /// `+-Gamma(N)`.
    Gamma(u32),
    /// `t^{-1} base t`. Extension point: any kind with a membership test can
    /// be conjugated.
    Conjugate { base: Box<SubgroupKind>, by: GroupElement },
}

impl SubgroupKind {
    fn contains(&self, g: &GroupElement) -> bool {
        match self {
            SubgroupKind::Full => true,
            SubgroupKind::Gamma0(n) => g.c.rem_euclid(i64::from(*n)) == 0,
            SubgroupKind::Gamma1(n) => {
                let n = i64::from(*n);
                g.c.rem_euclid(n) == 0 && (g.d.rem_euclid(n) == 1 % n || g.d.rem_euclid(n) == (n - 1) % n)
            }
            SubgroupKind::Gamma(n) => {
                let n = i64::from(*n);
                let m = |x: i64| x.rem_euclid(n);
                m(g.b) == 0 && m(g.c) == 0 && ((m(g.a) == 1 % n && m(g.d) == 1 % n) || (m(g.a) == m(n - 1) && m(g.d) == m(n - 1)))
            }
            SubgroupKind::Conjugate { base, by } => base.contains(&by.conjugate(g)),
        }
    }

    fn level(&self) -> u32 {
        match self {
            SubgroupKind::Full => 1,
            SubgroupKind::Gamma0(n) | SubgroupKind::Gamma1(n) | SubgroupKind::Gamma(n) => *n,
            SubgroupKind::Conjugate { base, .. } => base.level(),
        }
    }

    fn index_formula(&self) -> u64 {
        let n = u64::from(self.level());
        let primes = prime_divisors(n);
        match self {
            SubgroupKind::Full => 1,
            SubgroupKind::Gamma0(_) => {
                primes.iter().fold(n, |acc, p| acc / p * (p + 1))
            }
            SubgroupKind::Gamma1(_) => match n {
                1 => 1,
                2 => 3,
                _ => primes.iter().fold(n * n, |acc, p| acc / (p * p) * (p * p - 1)) / 2,
            },
            SubgroupKind::Gamma(_) => match n {
                1 => 1,
                2 => 6,
                _ => primes.iter().fold(n * n * n, |acc, p| acc / (p * p) * (p * p - 1)) / 2,
            },
            SubgroupKind::Conjugate { base, .. } => base.index_formula(),
        }
    }
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut v = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            v.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        v.push(n);
    }
    v
}

/// A cusp `p/q` or infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CuspPoint {
    Infinity,
    Rational { p: i64, q: i64 },
}

impl fmt::Display for CuspPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CuspPoint::Infinity => write!(f, "inf"),
            CuspPoint::Rational { p, q } if *q == 1 => write!(f, "{p}"),
            CuspPoint::Rational { p, q } => write!(f, "{p}/{q}"),
        }
    }
}

/// One cusp class with a scaling matrix `t` (`t inf = representative`) and
/// its width.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cusp {
    pub representative: CuspPoint,
    pub scaling: GroupElement,
    pub width: u64,
}

struct Inner {
    kind: SubgroupKind,
    level: u32,
    index: u64,
    cosets: OnceLock<Vec<GroupElement>>,
    cusps: OnceLock<Vec<Cusp>>,
}

/// A finite-index subgroup containing `-I`. Cheap to clone; coset and cusp data
/// are computed once on first use and shared between clones.
#[derive(Clone)]
pub struct Subgroup {
    inner: Arc<Inner>,
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Subgroup").field("kind", &self.inner.kind).field("index", &self.inner.index).finish()
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.inner.kind == other.inner.kind
    }
}

impl Subgroup {
    pub fn new(kind: SubgroupKind) -> Result<Self> {
        if let SubgroupKind::Gamma0(0) | SubgroupKind::Gamma1(0) | SubgroupKind::Gamma(0) = kind {
            return Err(Error::Domain("level must be positive".into()));
        }
        let level = kind.level();
        let index = kind.index_formula();
        Ok(Self { inner: Arc::new(Inner { kind, level, index, cosets: OnceLock::new(), cusps: OnceLock::new() }) })
    }

    pub fn full() -> Self {
        Self::new(SubgroupKind::Full).expect("full group")
    }

    pub fn gamma0(n: u32) -> Result<Self> {
        Self::new(SubgroupKind::Gamma0(n))
    }

    pub fn gamma1(n: u32) -> Result<Self> {
        Self::new(SubgroupKind::Gamma1(n))
    }

    pub fn gamma(n: u32) -> Result<Self> {
        Self::new(SubgroupKind::Gamma(n))
    }

    /// `t^{-1} G t`.
    pub fn conjugate(&self, t: &GroupElement) -> Self {
        let kind = match &self.inner.kind {
            SubgroupKind::Full => SubgroupKind::Full,
            SubgroupKind::Conjugate { base, by } => {
                let by = *by * *t;
                if by.is_plus_minus_identity() {
                    (**base).clone()
                } else {
                    SubgroupKind::Conjugate { base: base.clone(), by }
                }
            }
            k if t.is_plus_minus_identity() => k.clone(),
            k => SubgroupKind::Conjugate { base: Box::new(k.clone()), by: *t },
        };
        Self::new(kind).expect("conjugate of a valid subgroup")
    }

    pub fn kind(&self) -> &SubgroupKind {
        &self.inner.kind
    }

    pub fn level(&self) -> u32 {
        self.inner.level
    }

    /// `mu = [SL2(Z) : G]`.
    pub fn index(&self) -> u64 {
        self.inner.index
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.inner.kind.contains(g)
    }

    pub fn is_full(&self) -> bool {
        matches!(self.inner.kind, SubgroupKind::Full)
    }

    pub fn descriptor(&self) -> String {
        self.to_string()
    }

    /// Right coset representatives `t_j` with `SL2(Z) = disjoint union G t_j`,
    /// the identity first.
    pub fn cosets(&self) -> &[GroupElement] {
        self.inner.cosets.get_or_init(|| self.enumerate_cosets())
    }

    fn enumerate_cosets(&self) -> Vec<GroupElement> {
        let gens = [GroupElement::s(), GroupElement::u(1), GroupElement::u(-1)];
        let mut reps = vec![GroupElement::identity()];
        let mut head = 0;
        while head < reps.len() {
            let g = reps[head];
            head += 1;
            for s in &gens {
                let h = g * *s;
                if self.find_coset_in(&reps, &h).is_none() {
                    reps.push(h);
                }
            }
        }
        reps
    }

    fn find_coset_in(&self, reps: &[GroupElement], h: &GroupElement) -> Option<usize> {
        reps.iter().position(|t| self.contains(&(*h * t.inverse())))
    }

    /// Schreier generators `t_i s t_j^{-1}` (`s` in `{S, U}`); they generate
    /// the group.
    pub fn generators(&self) -> Vec<GroupElement> {
        let mut out = Vec::new();
        for t in self.cosets() {
            for s in [GroupElement::s(), GroupElement::u(1)] {
                let h = *t * s;
                let rep = self.cosets()[self.coset_index(&h)];
                let g = h * rep.inverse();
                if !g.is_plus_minus_identity() && !out.contains(&g) {
                    out.push(g);
                }
            }
        }
        out.push(GroupElement::minus_identity());
        out
    }

    /// Whether every element of `self` lies in `other`.
    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        other.is_full() || self.generators().iter().all(|g| other.contains(g))
    }

    /// Position of the coset `G h` in [`Self::cosets`].
    pub fn coset_index(&self, h: &GroupElement) -> usize {
        self.find_coset_in(self.cosets(), h).expect("cosets cover SL2(Z)")
    }

    /// Smallest `n >= 1` with `t U^n t^{-1}` in the group.
    pub fn width_of(&self, t: &GroupElement) -> u64 {
        let bound = self.index().max(1) as i64;
        (1..=bound)
            .find(|&n| self.contains(&t.conjugate(&GroupElement::u(n))))
            .map(|n| n as u64)
            .expect("width is bounded by the index")
    }

    /// One cusp per orbit, with minimal-denominator (then minimal-numerator)
    /// representatives; infinity first.
    pub fn cusps(&self) -> &[Cusp] {
        self.inner.cusps.get_or_init(|| self.enumerate_cusps())
    }

    fn enumerate_cusps(&self) -> Vec<Cusp> {
        let cosets = self.cosets();
        let mu = cosets.len();
        let mut class = vec![usize::MAX; mu];
        let mut widths = Vec::new();
        for j in 0..mu {
            if class[j] != usize::MAX {
                continue;
            }
            let id = widths.len();
            let t = cosets[j];
            let n = self.width_of(&t);
            for s in 0..n as i64 {
                let idx = self.coset_index(&(t * GroupElement::u(s)));
                class[idx] = id;
            }
            widths.push(n);
        }
        let n_classes = widths.len();
        let mut found: Vec<Option<(CuspPoint, GroupElement)>> = vec![None; n_classes];
        let mut remaining = n_classes;
        let level = i64::from(self.level());
        let consider = |pt: CuspPoint, t: GroupElement, found: &mut Vec<Option<(CuspPoint, GroupElement)>>| -> bool {
            let c = class[self.coset_index(&t)];
            if found[c].is_none() {
                found[c] = Some((pt, t));
                return true;
            }
            false
        };
        if consider(CuspPoint::Infinity, GroupElement::identity(), &mut found) {
            remaining -= 1;
        }
        let mut q = 1i64;
        while remaining > 0 {
            for p in 0..(level * q).max(1) {
                if gcd(p, q) != 1 {
                    continue;
                }
                let t = complete_left_column(p, q).expect("coprime");
                if consider(CuspPoint::Rational { p, q }, t, &mut found) {
                    remaining -= 1;
                }
            }
            q += 1;
            assert!(q <= 4 * level + 4, "cusp search did not terminate");
        }
        let mut cusps: Vec<Cusp> = found
            .into_iter()
            .zip(widths)
            .map(|(f, width)| {
                let (representative, scaling) = f.expect("every class has a representative");
                Cusp { representative, scaling, width }
            })
            .collect();
        cusps.sort_by_key(|c| match c.representative {
            CuspPoint::Infinity => (0, 0),
            CuspPoint::Rational { p, q } => (q, p),
        });
        cusps
    }
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_kind(f, &self.inner.kind)
    }
}

fn write_kind(f: &mut fmt::Formatter<'_>, k: &SubgroupKind) -> fmt::Result {
    match k {
        SubgroupKind::Full => write!(f, "full"),
        SubgroupKind::Gamma0(n) => write!(f, "gamma0:{n}"),
        SubgroupKind::Gamma1(n) => write!(f, "gamma1:{n}"),
        SubgroupKind::Gamma(n) => write!(f, "gamma:{n}"),
        SubgroupKind::Conjugate { base, by } => {
            write!(f, "conj(")?;
            write_kind(f, base)?;
            write!(f, ";{},{},{},{})", by.a, by.b, by.c, by.d)
        }
    }
}

impl FromStr for Subgroup {
    type Err = Error;

    /// Parses `full`, `gamma0:N`, `gamma1:N`, `gamma:N`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let parse_level = |t: &str| -> Result<u32> {
            let n: u32 = t.parse().map_err(|_| Error::Parse(format!("bad level in subgroup descriptor '{s}'")))?;
            if n == 0 {
                return Err(Error::Parse("subgroup level must be positive".into()));
            }
            Ok(n)
        };
        let kind = if s == "full" {
            SubgroupKind::Full
        } else if let Some(t) = s.strip_prefix("gamma0:") {
            SubgroupKind::Gamma0(parse_level(t)?)
        } else if let Some(t) = s.strip_prefix("gamma1:") {
            SubgroupKind::Gamma1(parse_level(t)?)
        } else if let Some(t) = s.strip_prefix("gamma:") {
            SubgroupKind::Gamma(parse_level(t)?)
        } else {
            return Err(Error::Parse(format!("unknown subgroup descriptor '{s}'")));
        };
        Subgroup::new(kind)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn widths(g: &Subgroup) -> Vec<(String, u64)> {
        g.cusps().iter().map(|c| (c.representative.to_string(), c.width)).collect()
    }

    #[test]
    fn cusp_examples() {
        assert_eq!(widths(&Subgroup::full()), vec![("inf".to_string(), 1)]);
        let g = Subgroup::gamma0(4).unwrap();
        assert_eq!(
            widths(&g),
            vec![("inf".to_string(), 1), ("0".to_string(), 4), ("1/2".to_string(), 1)]
        );
        let g = Subgroup::gamma0(2).unwrap();
        assert_eq!(widths(&g), vec![("inf".to_string(), 1), ("0".to_string(), 2)]);
    }

    #[test]
    fn indices() {
        assert_eq!(Subgroup::gamma0(4).unwrap().index(), 6);
        assert_eq!(Subgroup::gamma1(5).unwrap().index(), 12);
        assert_eq!(Subgroup::gamma(3).unwrap().index(), 12);
        assert_eq!(Subgroup::gamma(2).unwrap().index(), 6);
        for g in [Subgroup::gamma1(5).unwrap(), Subgroup::gamma(3).unwrap(), Subgroup::gamma(2).unwrap(), Subgroup::gamma1(4).unwrap()] {
            assert_eq!(g.cosets().len() as u64, g.index(), "{g}");
            assert_eq!(g.cusps().iter().map(|c| c.width).sum::<u64>(), g.index(), "{g}");
        }
    }

    #[test]
    fn minus_identity_is_always_a_member() {
        for g in ["full", "gamma0:7", "gamma1:5", "gamma:3", "gamma:4"] {
            let g: Subgroup = g.parse().unwrap();
            assert!(g.contains(&GroupElement::minus_identity()));
        }
    }

    #[test]
    fn parsing_round_trip() {
        for s in ["full", "gamma0:4", "gamma1:5", "gamma:3"] {
            assert_eq!(s.parse::<Subgroup>().unwrap().to_string(), s);
        }
        assert!("gamma0:0".parse::<Subgroup>().is_err());
        assert!("sl3".parse::<Subgroup>().is_err());
    }

    #[test]
    fn conjugate_group_membership() {
        let g = Subgroup::gamma0(4).unwrap();
        let t = GroupElement::s();
        let h = g.conjugate(&t);
        // t^{-1} G t contains t^{-1} x t for x in G
        let x = GroupElement::new(1, 0, 4, 1).unwrap();
        assert!(h.contains(&(t.inverse() * x * t)));
        assert_eq!(h.cosets().len(), 6);
        assert_eq!(h.cusps().iter().map(|c| c.width).sum::<u64>(), 6);
    }

    #[test]
    fn subgroup_inclusion_via_generators() {
        let g4 = Subgroup::gamma0(4).unwrap();
        let g2 = Subgroup::gamma0(2).unwrap();
        assert!(g4.is_subgroup_of(&g2));
        assert!(!g2.is_subgroup_of(&g4));
        assert!(Subgroup::gamma(4).unwrap().is_subgroup_of(&Subgroup::gamma1(4).unwrap()));
        assert!(Subgroup::gamma1(6).unwrap().is_subgroup_of(&Subgroup::gamma0(3).unwrap()));
        assert!(!Subgroup::gamma1(6).unwrap().is_subgroup_of(&Subgroup::gamma1(4).unwrap()));
        for g in g4.generators() {
            assert!(g4.contains(&g));
        }
    }
}
