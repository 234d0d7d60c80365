//! Truncated power series about the origin and their `z^e`-scaled form.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::ppow;

/// `a₀ + a₁z + … + a_N z^N`, nominally valid on `|z| ≤ radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<Complex64>,
    radius: f64,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<Complex64>, radius: f64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Config(
                "power series needs at least one coefficient".into(),
            ));
        }
        if !(radius > 0.0) {
            return Err(Error::Domain {
                what: "series radius must be positive",
                value: radius,
            });
        }
        Ok(Self { coeffs, radius })
    }

    /// Real-coefficient convenience constructor.
    pub fn from_real(coeffs: &[f64], radius: f64) -> Result<Self> {
        Self::new(
            coeffs.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
            radius,
        )
    }

    pub fn constant(c: Complex64, radius: f64) -> Self {
        Self {
            coeffs: vec![c],
            radius,
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
    }

    /// Term-wise derivative (degree drops by one, never below zero).
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::constant(Complex64::new(0.0, 0.0), self.radius);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, &a)| a * n as f64)
            .collect();
        Self {
            coeffs,
            radius: self.radius,
        }
    }
}

impl crate::AnalyticFn for PowerSeries {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(PowerSeries::eval(self, z))
    }
}

/// `z^exponent · series(z)` with the principal branch for `z^exponent`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledSeries {
    exponent: f64,
    series: PowerSeries,
}

impl ScaledSeries {
    /// Builds `z^exponent · series`, shifting whole powers between the
    /// prefactor and the series so that the stored exponent lies in
    /// `(−1, 1)`. Leading zero coefficients are absorbed when the exponent
    /// is too negative; otherwise the product is rejected.
    pub fn new(exponent: f64, series: PowerSeries) -> Result<Self> {
        let mut e = exponent;
        let radius = series.radius;
        let mut coeffs = series.coeffs;
        while e >= 1.0 {
            coeffs.insert(0, Complex64::new(0.0, 0.0));
            e -= 1.0;
        }
        while e <= -1.0 {
            if coeffs.len() > 1 && coeffs[0] == Complex64::new(0.0, 0.0) {
                coeffs.remove(0);
                e += 1.0;
            } else if coeffs.iter().all(|a| a.norm() == 0.0) {
                coeffs.truncate(1);
                e = 0.0;
            } else {
                return Err(Error::Domain {
                    what: "non-integrable prefactor exponent",
                    value: e,
                });
            }
        }
        Ok(Self {
            exponent: e,
            series: PowerSeries { coeffs, radius },
        })
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn series(&self) -> &PowerSeries {
        &self.series
    }

    /// Evaluates `z^e · series(z)`; a negative exponent at `z = 0` is a
    /// singularity unless the series part vanishes identically.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let s = self.series.eval(z);
        if z == Complex64::new(0.0, 0.0) && self.exponent < 0.0 {
            if self.series.coeffs.iter().all(|a| a.norm() == 0.0) {
                return Ok(Complex64::new(0.0, 0.0));
            }
            return Err(Error::Singularity(format!(
                "z^({}) at z = 0",
                self.exponent
            )));
        }
        Ok(ppow(z, self.exponent)? * s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn horner_and_derivative() {
        let p = PowerSeries::from_real(&[1.0, 2.0, 3.0], 1.0).unwrap();
        assert_eq!(p.eval(c(2.0, 0.0)), c(17.0, 0.0));
        assert_eq!(p.derivative().coeffs(), &[c(2.0, 0.0), c(6.0, 0.0)]);
        assert_eq!(
            PowerSeries::constant(c(3.0, 1.0), 1.0)
                .derivative()
                .coeffs(),
            &[c(0.0, 0.0)]
        );
    }

    #[test]
    fn rejects_empty_and_bad_radius() {
        assert!(PowerSeries::new(vec![], 1.0).is_err());
        assert!(PowerSeries::from_real(&[1.0], 0.0).is_err());
    }

    #[test]
    fn scaled_normalizes_exponent() {
        let p = PowerSeries::from_real(&[1.0, 1.0], 1.0).unwrap();
        let s = ScaledSeries::new(1.5, p.clone()).unwrap();
        assert_eq!(s.exponent(), 0.5);
        assert_eq!(s.series().coeffs().len(), 3);
        let z = c(0.3, 0.4);
        let direct = ppow(z, 1.5).unwrap() * p.eval(z);
        assert!((s.eval(z).unwrap() - direct).norm() < 1e-15);

        let lead_zero = PowerSeries::from_real(&[0.0, 2.0], 1.0).unwrap();
        let s = ScaledSeries::new(-1.2, lead_zero).unwrap();
        assert!((s.exponent() + 0.2).abs() < 1e-15);
        assert!(ScaledSeries::new(-1.2, p).is_err());
    }

    #[test]
    fn singular_at_origin() {
        let s = ScaledSeries::new(-0.5, PowerSeries::constant(c(1.0, 0.0), 1.0)).unwrap();
        assert!(s.eval(c(0.0, 0.0)).is_err());
        let s = ScaledSeries::new(0.5, PowerSeries::constant(c(1.0, 0.0), 1.0)).unwrap();
        assert_eq!(s.eval(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
    }
}
