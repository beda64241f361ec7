use crate::scalar::Scalar;

/// Neumaier's variant of Kahan compensated summation.
///
/// For exact scalar types the compensation term stays identically zero.
#[derive(Debug, Clone)]
pub struct CompensatedSum<T> {
    sum: T,
    comp: T,
}

impl<T: Scalar> Default for CompensatedSum<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> CompensatedSum<T> {
    pub fn new() -> Self {
        Self { sum: T::zero(), comp: T::zero() }
    }

    pub fn add(&mut self, x: T) {
        let t = self.sum.clone() + x.clone();
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum.clone() - t.clone()) + x;
        } else {
            self.comp += (x - t.clone()) + self.sum.clone();
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum.clone() + self.comp.clone()
    }
}

impl<T: Scalar> Extend<T> for CompensatedSum<T> {
    fn extend<I: IntoIterator<Item = T>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

/// Compensated sum of an iterator.
pub fn compensated_sum<T: Scalar, I: IntoIterator<Item = T>>(iter: I) -> T {
    let mut acc = CompensatedSum::new();
    acc.extend(iter);
    acc.value()
}
