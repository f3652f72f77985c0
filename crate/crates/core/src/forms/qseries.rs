//! Truncated power series in `q`, exact over `i128` where it fits.

/// Coefficients of `prod_{n>=1} (1 - q^n)` up to `q^{count-1}` from Euler's
/// pentagonal number theorem.
pub fn euler_product(count: usize) -> Vec<i128> {
    let mut out = vec![0i128; count];
    if count == 0 {
        return out;
    }
    out[0] = 1;
    for j in 1i64.. {
        let sign = if j % 2 == 1 { -1 } else { 1 };
        let p1 = (j * (3 * j - 1) / 2) as usize;
        let p2 = (j * (3 * j + 1) / 2) as usize;
        if p1 >= count {
            break;
        }
        out[p1] += sign;
        if p2 < count {
            out[p2] += sign;
        }
    }
    out
}

pub fn mul_exact(a: &[i128], b: &[i128], count: usize) -> Option<Vec<i128>> {
    let mut out = vec![0i128; count];
    for (i, &x) in a.iter().enumerate().take(count) {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(count - i) {
            out[i + j] = out[i + j].checked_add(x.checked_mul(y)?)?;
        }
    }
    Some(out)
}

pub fn pow_exact(a: &[i128], e: u32, count: usize) -> Option<Vec<i128>> {
    let mut acc = vec![0i128; count];
    if count > 0 {
        acc[0] = 1;
    }
    let mut base = a[..a.len().min(count)].to_vec();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_exact(&acc, &base, count)?;
        }
        e >>= 1;
        if e > 0 {
            base = mul_exact(&base, &base, count)?;
        }
    }
    Some(acc)
}

pub fn mul_f64(a: &[f64], b: &[f64], count: usize) -> Vec<f64> {
    let mut out = vec![0.0; count];
    for (i, &x) in a.iter().enumerate().take(count) {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(count - i) {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn pow_f64(a: &[f64], e: u32, count: usize) -> Vec<f64> {
    let mut acc = vec![0.0; count];
    if count > 0 {
        acc[0] = 1.0;
    }
    for _ in 0..e {
        acc = mul_f64(&acc, a, count);
    }
    acc
}

fn divisor_power_sum(n: u64, p: u32) -> f64 {
    let mut s = 0.0;
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            s += (d as f64).powi(p as i32);
            let e = n / d;
            if e != d {
                s += (e as f64).powi(p as i32);
            }
        }
        d += 1;
    }
    s
}

/// `E_4` or `E_6` normalised with constant term 1.
pub fn eisenstein(weight: u32, count: usize) -> Vec<f64> {
    let c = match weight {
        4 => 240.0,
        6 => -504.0,
        _ => panic!("only E4 and E6 are provided"),
    };
    (0..count)
        .map(|n| if n == 0 { 1.0 } else { c * divisor_power_sum(n as u64, weight - 1) })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_product_by_direct_multiplication() {
        let n = 60;
        let mut direct = vec![0i128; n];
        direct[0] = 1;
        for k in 1..n {
            let mut f = vec![0i128; n];
            f[0] = 1;
            f[k] = -1;
            direct = mul_exact(&direct, &f, n).unwrap();
        }
        assert_eq!(euler_product(n), direct);
    }

    #[test]
    fn ramanujan_tau_and_eisenstein_relation() {
        // E4^3 stays below 2^53 up to q^24, so the f64 identity is exact there.
        let n = 25;
        let delta = pow_exact(&euler_product(n), 24, n).unwrap();
        // Delta = q prod(1-q^n)^24, so tau(m) = delta[m-1].
        assert_eq!(&delta[..6], &[1, -24, 252, -1472, 4830, -6048]);
        // 1728 Delta = E4^3 - E6^2.
        let e4 = eisenstein(4, n);
        let e6 = eisenstein(6, n);
        let lhs: Vec<f64> = pow_f64(&e4, 3, n)
            .iter()
            .zip(mul_f64(&e6, &e6, n))
            .map(|(a, b)| a - b)
            .collect();
        assert_eq!(lhs[0], 0.0);
        for m in 1..n {
            assert_eq!(lhs[m], 1728.0 * delta[m - 1] as f64, "m={m}");
        }
    }

    #[test]
    fn overflow_is_reported() {
        let big = vec![i128::MAX / 2, 3];
        assert!(mul_exact(&big, &big, 2).is_none());
    }
}
