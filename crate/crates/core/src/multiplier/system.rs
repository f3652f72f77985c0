use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::arith::{dedekind_sum, shimura_symbol};
use super::phase::{from_turns, rational_turns, reduce_turns, turn_distance};
use super::sigma::sigma_turns;
use crate::error::{domain, Error, Result};
use crate::modgroup::{GroupElement, Subgroup};
use crate::numerics::principal_arg;

/// Tolerance (in turns) for the relation checks done at construction.
const RELATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MultiplierKind {
    /// `v = 1`; needs even integral weight.
    TrivialEvenWeight,
    /// The multiplier of `eta^r`, weight `r/2` on SL2(Z).
    EtaPower(u32),
    /// The multiplier of `theta(z) = sum_n e^{2 pi i n^2 z}`, weight 1/2 on Gamma0(4).
    Theta,
    /// A system on SL2(Z) given by its values on `S` and `U` (in turns),
    /// extended to the group through the cocycle relation.
    Custom { s_turns: f64, u_turns: f64 },
    /// The conjugate system `nu^t` on `t^{-1} G t`.
    Conjugate { base: Box<MultiplierSystem>, by: GroupElement },
}

/// A weight together with a unitary multiplier on a subgroup.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierSystem {
    weight: f64,
    kind: MultiplierKind,
    group: Subgroup,
}

impl Serialize for MultiplierSystem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("MultiplierSystem", 3)?;
        st.serialize_field("weight", &self.weight)?;
        st.serialize_field("kind", &self.kind)?;
        st.serialize_field("group", &self.group.descriptor())?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for MultiplierSystem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            weight: f64,
            kind: MultiplierKind,
            group: String,
        }
        let raw = Raw::deserialize(d)?;
        let group: Subgroup = raw.group.parse().map_err(serde::de::Error::custom)?;
        MultiplierSystem::build(raw.weight, raw.kind, group).map_err(serde::de::Error::custom)
    }
}

/// `(-w)^k / w^k` for `w` with `Im w < 0` or `w` negative real, in turns.
fn flip_turns(w: Complex64, k: f64) -> f64 {
    let d = principal_arg(-w) - principal_arg(w);
    reduce_turns(k * d / std::f64::consts::TAU)
}

impl MultiplierSystem {
    fn build(weight: f64, kind: MultiplierKind, group: Subgroup) -> Result<Self> {
        if !weight.is_finite() {
            return domain("weight must be finite");
        }
        let sys = Self { weight, kind, group };
        sys.check_minus_identity()?;
        if let MultiplierKind::Custom { .. } = sys.kind {
            sys.check_custom_relations()?;
        }
        Ok(sys)
    }

    /// Trivial multiplier on `group`; `k` must be an even integer.
    pub fn trivial(k: f64, group: Subgroup) -> Result<Self> {
        if k.fract() != 0.0 || (k as i64) % 2 != 0 {
            return domain(format!("trivial multiplier needs even integral weight, got {k}"));
        }
        Self::build(k, MultiplierKind::TrivialEvenWeight, group)
    }

    /// Multiplier of `eta^r`, weight `r/2`, on SL2(Z).
    pub fn eta_power(r: u32) -> Result<Self> {
        if r == 0 {
            return domain("eta power must be positive");
        }
        Self::build(f64::from(r) / 2.0, MultiplierKind::EtaPower(r), Subgroup::full())
    }

    /// Theta multiplier, weight 1/2 on Gamma0(4).
    pub fn theta() -> Self {
        Self::build(0.5, MultiplierKind::Theta, Subgroup::gamma0(4).expect("level 4"))
            .expect("theta system is consistent")
    }

    /// System on SL2(Z) with `v(S) = e^{2 pi i s}` and `v(U) = e^{2 pi i u}`.
    /// Rejected unless the relations `S^2 = (SU)^3 = -I` are respected.
    pub fn custom(k: f64, s_turns: f64, u_turns: f64) -> Result<Self> {
        Self::build(
            k,
            MultiplierKind::Custom { s_turns: reduce_turns(s_turns), u_turns: reduce_turns(u_turns) },
            Subgroup::full(),
        )
    }

    /// The same multiplier restricted to a subgroup.
    pub fn restrict(&self, group: Subgroup) -> Result<Self> {
        if !group.is_subgroup_of(&self.group) {
            return domain(format!("{group} is not a subgroup of {}", self.group));
        }
        Self::build(self.weight, self.kind.clone(), group)
    }

    /// The conjugate system `nu^t` on `t^{-1} G t`, with
    /// `v^t(g') = v(g) sigma(g, t) / sigma(t, g')` where `g = t g' t^{-1}`.
    pub fn conjugate(&self, t: &GroupElement) -> Self {
        if t.is_identity() {
            return self.clone();
        }
        let (base, by) = match &self.kind {
            MultiplierKind::Conjugate { base, by } => ((**base).clone(), *by * *t),
            _ => (self.clone(), *t),
        };
        let group = base.group.conjugate(&by);
        if by.is_identity() {
            return base;
        }
        Self { weight: self.weight, kind: MultiplierKind::Conjugate { base: Box::new(base), by }, group }
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn kind(&self) -> &MultiplierKind {
        &self.kind
    }

    pub fn group(&self) -> &Subgroup {
        &self.group
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self.kind, MultiplierKind::TrivialEvenWeight)
    }

    fn check_minus_identity(&self) -> Result<()> {
        let v = self.upsilon_turns_unchecked(&GroupElement::minus_identity())?;
        let want = reduce_turns(-self.weight / 2.0);
        if turn_distance(v, want) > RELATION_TOL {
            return Err(Error::Consistency(format!(
                "multiplier {self} has v(-I) = e^(2 pi i {v}) but the weight forces e^(-i pi k)"
            )));
        }
        Ok(())
    }

    fn check_custom_relations(&self) -> Result<()> {
        let s = GroupElement::s();
        let su = s * GroupElement::u(1);
        let want = reduce_turns(-self.weight / 2.0);
        for (name, word) in [("S^2", vec![s, s]), ("(SU)^3", vec![su, su, su])] {
            let v = self.fold_word(&word)?;
            if turn_distance(v, want) > RELATION_TOL {
                return Err(Error::Consistency(format!(
                    "custom multiplier violates {name} = -I: value e^(2 pi i {v}), expected e^(-i pi k)"
                )));
            }
        }
        Ok(())
    }

    /// `v(g_1 ... g_m)` from the factor values through
    /// `v(AB) = sigma(A, B) v(A) v(B)`.
    fn fold_word(&self, word: &[GroupElement]) -> Result<f64> {
        let mut acc = GroupElement::identity();
        let mut v = 0.0;
        for g in word {
            v += sigma_turns(&acc, g, self.weight)? + self.upsilon_turns_unchecked(g)?;
            acc = acc * *g;
        }
        Ok(reduce_turns(v))
    }

    /// `v(g)` in turns, `g` assumed to be in the group.
    fn upsilon_turns_unchecked(&self, g: &GroupElement) -> Result<f64> {
        let k = self.weight;
        match &self.kind {
            MultiplierKind::TrivialEvenWeight => Ok(0.0),
            MultiplierKind::EtaPower(r) => Ok(eta_turns(g, *r)),
            MultiplierKind::Theta => Ok(theta_turns(g)),
            MultiplierKind::Custom { s_turns, u_turns } => custom_turns(k, *s_turns, *u_turns, g),
            MultiplierKind::Conjugate { base, by } => {
                let orig = by.conjugate(g);
                let v = base.upsilon_turns_unchecked(&orig)?;
                Ok(reduce_turns(v + sigma_turns(&orig, by, k)? - sigma_turns(by, g, k)?))
            }
        }
    }

    /// `v(g)` as a fraction of a turn in `[0, 1)`.
    pub fn upsilon_turns(&self, g: &GroupElement) -> Result<f64> {
        if !self.group.contains(g) {
            return Err(Error::Membership { element: g.to_string(), group: self.group.to_string() });
        }
        self.upsilon_turns_unchecked(g)
    }

    /// The automorphy factor `nu(g, z) = v(g) j(g, z)^k`.
    pub fn nu(&self, g: &GroupElement, z: Complex64) -> Result<Complex64> {
        let v = from_turns(self.upsilon_turns(g)?);
        Ok(v * crate::numerics::principal_pow(g.j(z), self.weight)?)
    }
}

/// Unit-weight eta phase `N/(24c)` for `c > 0`, with
/// `N = (a + d) - 12 c s(d, c) - 3c`.
fn eta_turns_positive_c(g: &GroupElement) -> (i128, i128) {
    let c = i128::from(g.c);
    let s = dedekind_sum(g.d, g.c);
    // 12 c s(d,c) = 2 * (6 c s), an integer.
    let twelve_cs = 12 * c * s.num / s.den;
    debug_assert_eq!((12 * c * s.num) % s.den, 0);
    (i128::from(g.a) + i128::from(g.d) - twelve_cs - 3 * c, 24 * c)
}

/// Multiplier of `eta^r`: `v(g) = e^{2 pi i r N / (24 c)}` for `c > 0`,
/// `e^{2 pi i r b / 24}` for `U^b`, and `v(g) = v(-g) j(-g,i)^k / j(g,i)^k`
/// in the remaining cases.
fn eta_turns(g: &GroupElement, r: u32) -> f64 {
    let r128 = i128::from(r);
    let k = f64::from(r) / 2.0;
    if g.c > 0 {
        let (n, den) = eta_turns_positive_c(g);
        return rational_turns(r128 * n, den);
    }
    if g.c == 0 && g.d == 1 {
        return rational_turns(r128 * i128::from(g.b), 24);
    }
    let m = -*g;
    let base = eta_turns(&m, r);
    // j(-g,i)^k / j(g,i)^k = (-w)^k / w^k with w = j(g, i).
    reduce_turns(base + flip_turns(g.j(Complex64::new(0.0, 1.0)), k))
}

/// Theta multiplier on Gamma0(4): `eps_d^{-1} (c/d)`.
fn theta_turns(g: &GroupElement) -> f64 {
    let sym = shimura_symbol(g.c, g.d);
    let eps_inv = if g.d.rem_euclid(4) == 1 { 0.0 } else { 0.75 };
    reduce_turns(eps_inv + if sym < 0 { 0.5 } else { 0.0 })
}

fn div_round(a: i64, c: i64) -> i64 {
    let (a, c) = (i128::from(a), i128::from(c));
    let q = (2 * a + c).div_euclid(2 * c);
    q as i64
}

/// `v(g)` for a custom system: `g` is written as
/// `U^{n_1} S^{-1} U^{n_2} S^{-1} ... (+-U^m)` and the cocycle is folded.
fn custom_turns(k: f64, s: f64, u: f64, g: &GroupElement) -> Result<f64> {
    let minus_i = reduce_turns(-k / 2.0);
    let m_id = GroupElement::minus_identity();
    let gen = |h: &GroupElement| -> Result<f64> {
        // Values of the letters used below.
        if h.c == 0 {
            let base = h.b * h.d; // h = d U^{b d} with d = +-1
            let vu = reduce_turns(u * base as f64);
            if h.d == 1 {
                return Ok(vu);
            }
            let pos = GroupElement::u(base);
            return Ok(reduce_turns(sigma_turns(&m_id, &pos, k)? + minus_i + vu));
        }
        if *h == GroupElement::s() {
            return Ok(s);
        }
        // -S
        Ok(reduce_turns(sigma_turns(&m_id, &GroupElement::s(), k)? + minus_i + s))
    };
    let mut word = Vec::new();
    let mut m = *g;
    while m.c != 0 {
        let n = div_round(m.a, m.c);
        word.push(GroupElement::u(n));
        word.push(-GroupElement::s());
        m = GroupElement::s() * GroupElement::u(-n) * m;
    }
    word.push(m);
    let mut acc = GroupElement::identity();
    let mut v = 0.0;
    for h in &word {
        v += sigma_turns(&acc, h, k)? + gen(h)?;
        acc = acc * *h;
    }
    debug_assert_eq!(acc, *g);
    Ok(reduce_turns(v))
}

impl fmt::Display for MultiplierSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            MultiplierKind::TrivialEvenWeight => write!(f, "trivial:k={}", self.weight),
            MultiplierKind::EtaPower(r) => write!(f, "eta:r={r}"),
            MultiplierKind::Theta => write!(f, "theta"),
            MultiplierKind::Custom { s_turns, u_turns } => {
                write!(f, "custom:k={},s={},u={}", self.weight, s_turns, u_turns)
            }
            MultiplierKind::Conjugate { base, by } => {
                write!(f, "conj({base};{},{},{},{})", by.a, by.b, by.c, by.d)
            }
        }
    }
}


impl MultiplierSystem {
    /// Parses `"trivial:k=12"`, `"eta:r=2"`, `"theta"` or
    /// `"custom:k=..,s=..,u=.."` and restricts the result to `group` (the
    /// natural group is used when `group` is `None`).
    pub fn parse(desc: &str, group: Option<&Subgroup>) -> Result<Self> {
        let desc = desc.trim();
        let (head, rest) = desc.split_once(':').unwrap_or((desc, ""));
        let mut params = std::collections::BTreeMap::new();
        for kv in rest.split(',').filter(|s| !s.trim().is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value in '{kv}'")))?;
            let v: f64 = v.trim().parse().map_err(|_| Error::Parse(format!("bad number in '{kv}'")))?;
            params.insert(k.trim().to_string(), v);
        }
        let get = |key: &str| -> Result<f64> {
            params.get(key).copied().ok_or_else(|| Error::Parse(format!("'{desc}' is missing '{key}'")))
        };
        let natural = match head.trim().to_ascii_lowercase().as_str() {
            "trivial" => {
                let g = group.cloned().unwrap_or_else(Subgroup::full);
                return Self::trivial(get("k")?, g);
            }
            "eta" => {
                let r = get("r")?;
                if r.fract() != 0.0 || r < 1.0 {
                    return Err(Error::Parse(format!("eta power must be a positive integer, got {r}")));
                }
                Self::eta_power(r as u32)?
            }
            "theta" => Self::theta(),
            "custom" => Self::custom(get("k")?, get("s")?, get("u")?)?,
            other => return Err(Error::Parse(format!("unknown multiplier '{other}'"))),
        };
        match group {
            Some(g) if *g != natural.group => natural.restrict(g.clone()),
            _ => Ok(natural),
        }
    }
}

impl FromStr for MultiplierSystem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s, None)
    }
}
