/// The self-similar solutions through `λ² (dx² + sinh²(x) ĝ)`: the metric stays
/// `c(t) (dx² + sinh²(x) ĝ)` with `c = λ² + 2nt` under Ricci flow and
/// `c = 1 + (λ² - 1) e^{-2nt}` under the modified flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactFamily {
    pub n: usize,
    pub lambda_sq: f64,
    pub modified: bool,
}

impl ExactFamily {
    pub fn new(n: usize, lambda_sq: f64, modified: bool) -> Self {
        ExactFamily { n, lambda_sq, modified }
    }

    pub fn scale(&self, t: f64) -> f64 {
        let two_n = 2.0 * self.n as f64;
        if self.modified {
            1.0 + (self.lambda_sq - 1.0) * (-two_n * t).exp()
        } else {
            self.lambda_sq + two_n * t
        }
    }

    pub fn phi(&self, t: f64) -> f64 {
        self.scale(t).sqrt()
    }

    pub fn psi(&self, x: f64, t: f64) -> f64 {
        self.scale(t).sqrt() * x.sinh()
    }

    /// Sectional curvature `-1/c(t)` shared by every 2-plane.
    pub fn curvature(&self, t: f64) -> f64 {
        -1.0 / self.scale(t)
    }
}
