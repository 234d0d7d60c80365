use crate::error::{Error, Result};

/// Fractional order `q`, strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FracOrder(f64);

impl FracOrder {
    pub fn new(q: f64) -> Result<Self> {
        if q.is_finite() && q > 0.0 && q < 1.0 {
            Ok(Self(q))
        } else {
            Err(Error::Domain {
                what: "fractional order must lie in (0, 1)",
                value: q,
            })
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// The complementary order `1 − q`.
    #[inline]
    pub fn complement(self) -> Self {
        Self(1.0 - self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_endpoints() {
        assert!(FracOrder::new(0.0).is_err());
        assert!(FracOrder::new(1.0).is_err());
        assert!(FracOrder::new(f64::NAN).is_err());
        assert_eq!(FracOrder::new(0.25).unwrap().complement().get(), 0.75);
    }
}
