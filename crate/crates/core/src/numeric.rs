//! Small numeric helpers shared across modules.

/// Kahan–Babuška (Neumaier) compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Ordinary least squares line `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n: usize,
}

/// Unweighted OLS over paired samples. Returns `None` with fewer than two points
/// or when all `x` coincide.
pub fn least_squares<I>(points: I) -> Option<LineFit>
where
    I: IntoIterator<Item = (f64, f64)> + Clone,
{
    // Two passes: means first, then centred sums, to avoid cancellation for
    // millions of points.
    let (mut n, mut sx, mut sy) = (0usize, KahanSum::new(), KahanSum::new());
    for (x, y) in points.clone() {
        n += 1;
        sx.add(x);
        sy.add(y);
    }
    if n < 2 {
        return None;
    }
    let mx = sx.value() / n as f64;
    let my = sy.value() / n as f64;
    let (mut sxx, mut sxy, mut syy) = (KahanSum::new(), KahanSum::new(), KahanSum::new());
    for (x, y) in points {
        let dx = x - mx;
        let dy = y - my;
        sxx.add(dx * dx);
        sxy.add(dx * dy);
        syy.add(dy * dy);
    }
    let (sxx, sxy, syy) = (sxx.value(), sxy.value(), syy.value());
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy > 0.0 {
        (sxy * sxy) / (sxx * syy)
    } else {
        1.0
    };
    Some(LineFit {
        slope,
        intercept,
        r_squared,
        n,
    })
}

/// Coefficient of determination of a fixed line against the samples.
pub fn r_squared_of_line<I>(points: I, slope: f64, intercept: f64) -> f64
where
    I: IntoIterator<Item = (f64, f64)> + Clone,
{
    let (mut n, mut sy) = (0usize, KahanSum::new());
    for (_, y) in points.clone() {
        n += 1;
        sy.add(y);
    }
    if n == 0 {
        return f64::NAN;
    }
    let my = sy.value() / n as f64;
    let (mut ss_res, mut ss_tot) = (KahanSum::new(), KahanSum::new());
    for (x, y) in points {
        let e = y - (intercept + slope * x);
        ss_res.add(e * e);
        ss_tot.add((y - my) * (y - my));
    }
    let ss_tot = ss_tot.value();
    if ss_tot > 0.0 {
        1.0 - ss_res.value() / ss_tot
    } else if ss_res.value() == 0.0 {
        1.0
    } else {
        f64::NEG_INFINITY
    }
}

/// Sample mean and (n-1)-normalised standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    if xs.iter().all(|&x| x == xs[0]) {
        return (xs[0], 0.0);
    }
    let mean = xs.iter().copied().collect::<KahanSum>().value() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = xs
        .iter()
        .map(|x| (x - mean) * (x - mean))
        .collect::<KahanSum>()
        .value()
        / (n - 1) as f64;
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_small_terms() {
        let mut acc = KahanSum::new();
        acc.add(1.0);
        for _ in 0..10_000_000 {
            acc.add(1e-16);
        }
        assert!((acc.value() - (1.0 + 1e-9)).abs() < 1e-15);
    }

    #[test]
    fn exact_line() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 3.0 - 2.0 * i as f64)).collect();
        let fit = least_squares(pts.iter().copied()).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-12);
        assert!((fit.intercept - 3.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!((r_squared_of_line(pts.iter().copied(), -2.0, 3.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(least_squares(std::iter::once((1.0, 1.0))).is_none());
        assert!(least_squares([(1.0, 1.0), (1.0, 2.0)].iter().copied()).is_none());
    }

    #[test]
    fn mean_std_known() {
        let (m, s) = mean_std(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]);
        assert_eq!(m, 5.0);
        assert!((s - (32.0f64 / 7.0).sqrt()).abs() < 1e-12);
    }
}
