use std::cmp::Ordering;
use std::ops::{Add, Mul, Sub};

use num_traits::Zero;

use crate::formula::Rational;

/// `real + delta * eps` for a positive infinitesimal `eps`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaRational {
    pub real: Rational,
    pub delta: Rational,
}

impl DeltaRational {
    pub fn new(real: Rational, delta: Rational) -> Self {
        DeltaRational { real, delta }
    }

    pub fn zero() -> Self {
        DeltaRational::new(Rational::zero(), Rational::zero())
    }

    pub fn real(real: Rational) -> Self {
        DeltaRational::new(real, Rational::zero())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        DeltaRational::new(&self.real * k, &self.delta * k)
    }

    pub fn concretize(&self, eps: &Rational) -> Rational {
        &self.real + &self.delta * eps
    }
}

impl PartialOrd for DeltaRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DeltaRational {
    fn cmp(&self, other: &Self) -> Ordering {
        self.real
            .cmp(&other.real)
            .then_with(|| self.delta.cmp(&other.delta))
    }
}

impl Add for &DeltaRational {
    type Output = DeltaRational;
    fn add(self, rhs: &DeltaRational) -> DeltaRational {
        DeltaRational::new(&self.real + &rhs.real, &self.delta + &rhs.delta)
    }
}

impl Sub for &DeltaRational {
    type Output = DeltaRational;
    fn sub(self, rhs: &DeltaRational) -> DeltaRational {
        DeltaRational::new(&self.real - &rhs.real, &self.delta - &rhs.delta)
    }
}

impl Mul<&Rational> for &DeltaRational {
    type Output = DeltaRational;
    fn mul(self, k: &Rational) -> DeltaRational {
        self.scale(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::int;

    #[test]
    fn ordering_is_lexicographic() {
        let a = DeltaRational::new(int(1), int(0));
        let b = DeltaRational::new(int(1), int(1));
        let c = DeltaRational::new(int(2), int(-5));
        assert!(a < b && b < c);
        assert_eq!((&b - &a), DeltaRational::new(int(0), int(1)));
        assert_eq!(b.scale(&int(-2)), DeltaRational::new(int(-2), int(-2)));
        assert_eq!(c.concretize(&Rational::new(1.into(), 5.into())), int(1));
    }
}
