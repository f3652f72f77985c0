//! The coefficient square sums `A(m)`, their envelope and the four-region
//! split of the Bessel sum behind it.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::cusp_at;
use crate::bessel::bessel_j_log;
use crate::error::{Error, Result};
use crate::modgroup::GroupElement;
use crate::multiplier::MultiplierSystem;
use crate::numerics::ln_gamma;
use crate::report::{BoundCheck, ScanReport, ScanRow};
use crate::spectral::{coeff_square_sum, CoeffSquareSum};

/// Exponent of the transition window `k - 1 +- (k-1)^alpha`.
pub const REGION_ALPHA: f64 = 13.0 / 15.0;

/// Smallest weight accepted by the envelope checks.
pub const MIN_ENVELOPE_WEIGHT: f64 = 20.0;

/// Region-1 sums stop once the remaining majorant is below this fraction.
const REGION_TAIL_REL: f64 = 1e-17;

/// Moduli `c` with `X/c` in one region; `hi == None` means unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionRange {
    pub region: u8,
    pub lo: i64,
    pub hi: Option<i64>,
}

impl RegionRange {
    pub fn contains(&self, c: i64) -> bool {
        c >= self.lo && self.hi.map_or(true, |h| c <= h)
    }

    pub fn is_empty(&self) -> bool {
        self.hi.is_some_and(|h| h < self.lo)
    }
}

/// Region boundaries in `x`: `sqrt((k-1)/2)`, `k-1-(k-1)^alpha`, `k-1+(k-1)^alpha`.
pub fn region_bounds(k: f64) -> [f64; 3] {
    let nu = k - 1.0;
    [(nu / 2.0).sqrt(), nu - nu.powf(REGION_ALPHA), nu + nu.powf(REGION_ALPHA)]
}

/// Region of the argument `x`: 1 for `x <= b1`, 2 for `b1 < x <= b2`,
/// 3 for `b2 < x <= b3`, 4 above.
pub fn region_of(k: f64, x: f64) -> u8 {
    let b = region_bounds(k);
    if x > b[2] {
        4
    } else if x > b[1] {
        3
    } else if x > b[0] {
        2
    } else {
        1
    }
}

/// Largest `c >= 0` with `big_x / c > t` (every `c` counts at `c = 0`).
fn last_above(big_x: f64, t: f64) -> i64 {
    let mut c = (big_x / t).floor().max(0.0) as i64;
    while c > 0 && big_x / c as f64 <= t {
        c -= 1;
    }
    while big_x / (c + 1) as f64 > t {
        c += 1;
    }
    c
}

/// The four `c`-ranges for `X = 4 pi (m + kappa) / n`, ordered by region.
/// As `X/c` decreases in `c`, region 4 comes first in `c`.
pub fn region_ranges(k: f64, big_x: f64) -> Result<[RegionRange; 4]> {
    if k < MIN_ENVELOPE_WEIGHT {
        return Err(Error::Domain(format!("the region split needs k >= {MIN_ENVELOPE_WEIGHT}, got {k}")));
    }
    let b = region_bounds(k);
    let (c3, c2, c1) = (last_above(big_x, b[2]), last_above(big_x, b[1]), last_above(big_x, b[0]));
    Ok([
        RegionRange { region: 1, lo: c1 + 1, hi: None },
        RegionRange { region: 2, lo: c2 + 1, hi: Some(c1) },
        RegionRange { region: 3, lo: c3 + 1, hi: Some(c2) },
        RegionRange { region: 4, lo: 1, hi: Some(c3) },
    ])
}

/// `ln` of each region's envelope, with `l = (m + kappa)/n`:
/// `k^{-k/2}(1 + l k^{-3/2})`, `l k^{-11/6}`, `l k^{alpha - 7/3}`, `l k^{-(alpha+5)/4}`.
pub fn ln_region_envelopes(k: f64, l: f64) -> [f64; 4] {
    let lk = k.ln();
    let a = REGION_ALPHA;
    [
        -0.5 * k * lk + (l * k.powf(-1.5)).ln_1p(),
        l.ln() - 11.0 / 6.0 * lk,
        l.ln() + (a - 7.0 / 3.0) * lk,
        l.ln() - (a + 5.0) / 4.0 * lk,
    ]
}

/// `ln sum_{c in range} |J_{k-1}(X/c)|`. The unbounded region is summed
/// up to `c_max` and closed with the majorant `(x/2)^nu / Gamma(nu+1)`.
fn ln_region_sum(k: f64, big_x: f64, range: &RegionRange, c_max: i64) -> Result<f64> {
    if range.is_empty() {
        return Ok(f64::NEG_INFINITY);
    }
    let nu = k - 1.0;
    let hi = match range.hi {
        Some(h) if h > c_max => {
            return Err(Error::Resource(format!("region {} reaches c = {h} beyond c_max = {c_max}", range.region)))
        }
        Some(h) => h,
        None if range.lo > c_max => {
            return Err(Error::Resource(format!("region 1 starts at c = {} beyond c_max = {c_max}", range.lo)))
        }
        None => c_max,
    };
    let ln_major = nu * (big_x / 2.0).ln() - ln_gamma(nu + 1.0);
    let mut lns: Vec<f64> = Vec::new();
    let mut top = f64::NEG_INFINITY;
    for c in range.lo..=hi {
        let v = bessel_j_log(nu, big_x / c as f64)?;
        if !v.is_zero() {
            lns.push(v.ln_abs());
            top = top.max(v.ln_abs());
        }
        if range.hi.is_none() {
            // sum_{c' > c} (X/2c')^nu / Gamma(nu+1) <= major c^{1-nu}/(nu-1)
            let ln_tail = ln_major + (1.0 - nu) * (c as f64).ln() - (nu - 1.0).ln();
            if top > f64::NEG_INFINITY && ln_tail <= REGION_TAIL_REL.ln() + top {
                break;
            }
            if c == hi {
                lns.push(ln_tail);
                top = top.max(ln_tail);
            }
        }
    }
    if top == f64::NEG_INFINITY {
        return Ok(top);
    }
    Ok(top + lns.iter().map(|t| (t - top).exp()).sum::<f64>().ln())
}

/// `A(m)` at the cusp `tau inf` with its envelope and region checks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AEnvelope {
    pub square_sum: CoeffSquareSum,
    pub aest: BoundCheck,
    pub regions: [BoundCheck; 4],
    pub ranges: [RegionRange; 4],
}

/// `sum_j |(f_j|tau)^(m)|^2`, the coefficient square sum at the cusp `tau inf`.
pub fn a_coefficient(sys: &MultiplierSystem, tau: &GroupElement, m: i64, c_max: i64) -> Result<CoeffSquareSum> {
    coeff_square_sum(sys, &tau.inverse(), m, c_max)
}

/// `ln |A(m)|`, or `-inf` when it vanishes.
pub fn ln_abs_a(a: &CoeffSquareSum) -> f64 {
    if a.ln_prefactor == f64::NEG_INFINITY || a.bracket.re == 0.0 {
        return f64::NEG_INFINITY;
    }
    a.ln_prefactor + a.bracket.re.abs().ln()
}

/// `ln` of `mu (4 pi)^k / (n^k Gamma(k-1)) ((m+kappa)^{k-1}(1 + n k^{-k/2}) + (m+kappa)^k k^{-22/15})`.
pub fn ln_aest_envelope(mu: f64, n: f64, k: f64, mk: f64) -> f64 {
    let lead = (k - 1.0) * mk.ln() + (n * k.powf(-k / 2.0)).ln_1p();
    let second = k * mk.ln() - 22.0 / 15.0 * k.ln();
    let hi = lead.max(second);
    mu.ln() + k * (4.0 * PI).ln() - k * n.ln() - ln_gamma(k - 1.0) + hi + ((lead - hi).exp() + (second - hi).exp()).ln()
}

/// Computes `|A(m)|` by the truncated Kloosterman-Bessel sum and compares it
/// with its envelope; then compares the partial sums of `|J_{k-1}(X/c)|` over
/// each region with the region envelopes.
pub fn a_envelope(sys: &MultiplierSystem, tau: &GroupElement, m: i64, c_max: i64) -> Result<AEnvelope> {
    let k = sys.weight();
    if k < MIN_ENVELOPE_WEIGHT {
        return Err(Error::Domain(format!("the envelope of A(m) is checked for k >= {MIN_ENVELOPE_WEIGHT}, got {k}")));
    }
    let cusp = cusp_at(sys, tau)?;
    let mk = m as f64 + cusp.kappa;
    if mk < 0.0 {
        return Err(Error::Domain(format!("A(m) needs m + kappa >= 0, got {mk}")));
    }
    let square_sum = a_coefficient(sys, tau, m, c_max)?;
    let n = cusp.width as f64;
    let mu = sys.group().index() as f64;
    let tag = |c: BoundCheck| c.with("k", k).with("m", m as f64).with("kappa", cusp.kappa).with("n", n);
    let big_x = 4.0 * PI * mk / n;
    let ranges = region_ranges(k, big_x.max(f64::MIN_POSITIVE))?;
    if mk == 0.0 {
        let zero = |name: &str| tag(BoundCheck { name: name.into(), lhs: 0.0, envelope: 0.0, ratio: 0.0, params: Default::default() });
        return Ok(AEnvelope {
            square_sum,
            aest: zero("aest"),
            regions: [zero("region1"), zero("region2"), zero("region3"), zero("region4")],
            ranges,
        });
    }
    let aest = tag(BoundCheck::from_ln("aest", ln_abs_a(&square_sum), ln_aest_envelope(mu, n, k, mk)));
    let regions = region_checks(k, mk / n, c_max)?.map(tag);
    Ok(AEnvelope { square_sum, aest, regions, ranges })
}

/// Partial sums of `|J_{k-1}(X/c)|` over the four regions against their
/// envelopes, for `X = 4 pi l` with `l = (m + kappa)/n > 0`.
pub fn region_checks(k: f64, l: f64, c_max: i64) -> Result<[BoundCheck; 4]> {
    if !(l > 0.0) {
        return Err(Error::Domain(format!("the region split needs (m + kappa)/n > 0, got {l}")));
    }
    let big_x = 4.0 * PI * l;
    let ranges = region_ranges(k, big_x)?;
    let env = ln_region_envelopes(k, l);
    let mut out = Vec::with_capacity(4);
    for (i, r) in ranges.iter().enumerate() {
        let lhs = ln_region_sum(k, big_x, r, c_max)?;
        out.push(BoundCheck::from_ln(format!("region{}", i + 1), lhs, env[i]).with("k", k).with("l", l));
    }
    Ok(out.try_into().expect("four regions"))
}

/// Region checks over real weights `k_list` and ratios `l = (m + kappa)/n`.
/// Rows carry `l` in the `y` column.
pub fn region_scan(k_list: &[f64], l_list: &[f64], c_max: i64) -> Result<ScanReport> {
    let mut rows = Vec::new();
    for &k in k_list {
        for &l in l_list {
            for c in region_checks(k, l, c_max)? {
                rows.push(ScanRow::from_check(&c, k, l, 0.0));
            }
        }
    }
    Ok(ScanReport::new("regions", rows))
}

/// `A(m)` against its envelope over weights `k_list` and indices `m_list`;
/// `system_for` builds the system of weight `k`. Rows carry `m` in the `y`
/// column.
pub fn aest_scan(
    system_for: impl Fn(f64) -> Result<MultiplierSystem>,
    tau: &GroupElement,
    k_list: &[f64],
    m_list: &[i64],
    c_max: i64,
) -> Result<ScanReport> {
    let mut rows = Vec::new();
    for &k in k_list {
        let sys = system_for(k)?;
        for &m in m_list {
            let e = a_envelope(&sys, tau, m, c_max)?;
            rows.push(ScanRow::from_check(&e.aest, k, m as f64, 0.0));
        }
    }
    Ok(ScanReport::new("aest", rows))
}
