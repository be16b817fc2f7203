use num_traits::Zero;

use super::{rat, Rational};

/// Bernoulli polynomial of degree 3 or 5 with exact coefficients, stored in
/// ascending powers of `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BernoulliPoly {
    degree: u32,
    coefficients: Vec<Rational>,
}

impl BernoulliPoly {
    /// `b₃(x) = x³ − (3/2)x² + (1/2)x`
    pub fn b3() -> Self {
        BernoulliPoly {
            degree: 3,
            coefficients: vec![rat(0, 1), rat(1, 2), rat(-3, 2), rat(1, 1)],
        }
    }

    /// `b₅(x) = x⁵ − (5/2)x⁴ + (5/3)x³ − (1/6)x`
    pub fn b5() -> Self {
        BernoulliPoly {
            degree: 5,
            coefficients: vec![
                rat(0, 1),
                rat(-1, 6),
                rat(0, 1),
                rat(5, 3),
                rat(-5, 2),
                rat(1, 1),
            ],
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    /// Exact value at `x` (Horner).
    pub fn eval(&self, x: &Rational) -> Rational {
        self.coefficients
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// Float value at `x`, for quadrature of remainder integrals.
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + super::to_f64(c))
    }
}

pub fn eval_bernoulli(p: &BernoulliPoly, x: &Rational) -> Rational {
    p.eval(x)
}
