//! Small shared vector kernels. Everything here is a plain loop over slices;
//! summation order is fixed so results are bitwise reproducible.

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for i in 0..a.len() {
        acc += a[i] * b[i];
    }
    acc
}

pub(crate) fn l2_norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// p-norm for p in [1, +inf]. The general branch rescales by the max entry so
/// `powf` never overflows for exponents close to 1 or very large.
pub(crate) fn p_norm(v: &[f64], p: f64) -> f64 {
    debug_assert!(p >= 1.0);
    if p == 1.0 {
        return v.iter().map(|x| x.abs()).sum();
    }
    if p == 2.0 {
        return l2_norm(v);
    }
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if p.is_infinite() || max == 0.0 {
        return max;
    }
    let mut acc = 0.0;
    for x in v {
        acc += (x.abs() / max).powf(p);
    }
    max * acc.powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn p_norm_regimes() {
        let v = [3.0, -4.0];
        assert_abs_diff_eq!(p_norm(&v, 1.0), 7.0);
        assert_abs_diff_eq!(p_norm(&v, 2.0), 5.0);
        assert_abs_diff_eq!(p_norm(&v, f64::INFINITY), 4.0);
        // p = 4 computed by hand: (81 + 256)^(1/4)
        assert_abs_diff_eq!(p_norm(&v, 4.0), 337.0f64.powf(0.25), epsilon = 1e-12);
    }

    #[test]
    fn p_norm_scaled_branch_handles_huge_entries() {
        let v = [1e300, 1e300];
        let got = p_norm(&v, 4.0);
        assert!(got.is_finite());
        assert_abs_diff_eq!(got / 1e300, 2.0f64.powf(0.25), epsilon = 1e-12);
    }
}
