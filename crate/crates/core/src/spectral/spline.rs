/// Natural cubic spline on a uniform grid `x₀ + i·h`.
#[derive(Debug, Clone)]
pub struct UniformSpline {
    x0: f64,
    h: f64,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl UniformSpline {
    pub fn new(x0: f64, h: f64, y: Vec<f64>) -> Self {
        let n = y.len();
        assert!(n >= 3 && h > 0.0);
        // second derivatives from the tridiagonal system (Thomas algorithm)
        let mut m = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let rhs = 6.0 * (y[i + 1] - 2.0 * y[i] + y[i - 1]) / (h * h);
            let denom = 4.0 - c[i - 1];
            c[i] = 1.0 / denom;
            d[i] = (rhs - d[i - 1]) / denom;
        }
        for i in (1..n - 1).rev() {
            m[i] = d[i] - c[i] * m[i + 1];
        }
        Self { x0, h, y, m }
    }

    /// Value at `x`; `None` outside the tabulated range.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let u = (x - self.x0) / self.h;
        let last = self.y.len() - 1;
        if !(u >= 0.0 && u <= last as f64) {
            return None;
        }
        let i = (u.floor() as usize).min(last - 1);
        let a = u - i as f64;
        let b = 1.0 - a;
        let h2 = self.h * self.h / 6.0;
        Some(
            b * self.y[i]
                + a * self.y[i + 1]
                + h2 * ((b * b * b - b) * self.m[i] + (a * a * a - a) * self.m[i + 1]),
        )
    }
}
