/// One-pass central moments up to order four, mergeable in any grouping.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl Moments {
    pub(crate) fn push(&mut self, x: f64) {
        let n1 = self.n;
        self.n += 1.0;
        let n = self.n;
        let delta = x - self.mean;
        let dn = delta / n;
        let dn2 = dn * dn;
        let t = delta * dn * n1;
        self.mean += dn;
        self.m4 += t * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * self.m2 - 4.0 * dn * self.m3;
        self.m3 += t * dn * (n - 2.0) - 3.0 * dn * self.m2;
        self.m2 += t;
    }

    pub(crate) fn merge(&mut self, o: &Moments) {
        if o.n == 0.0 {
            return;
        }
        if self.n == 0.0 {
            *self = *o;
            return;
        }
        let (na, nb) = (self.n, o.n);
        let n = na + nb;
        let d = o.mean - self.mean;
        let d2 = d * d;
        let m2 = self.m2 + o.m2 + d2 * na * nb / n;
        let m3 = self.m3 + o.m3 + d * d2 * na * nb * (na - nb) / (n * n) + 3.0 * d * (na * o.m2 - nb * self.m2) / n;
        let m4 = self.m4
            + o.m4
            + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * o.m2 + nb * nb * self.m2) / (n * n)
            + 4.0 * d * (na * o.m3 - nb * self.m3) / n;
        *self = Moments { n, mean: self.mean + d * nb / n, m2, m3, m4 };
    }

    pub(crate) fn count(&self) -> f64 {
        self.n
    }

    pub(crate) fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub(crate) fn variance(&self) -> f64 {
        if self.n < 2.0 {
            0.0
        } else {
            self.m2 / (self.n - 1.0)
        }
    }

    pub(crate) fn mean_se(&self) -> f64 {
        if self.n < 2.0 {
            0.0
        } else {
            (self.variance() / self.n).sqrt()
        }
    }

    /// Large-sample standard error of the variance, `sqrt((mu4 - sigma^4) / n)`.
    pub(crate) fn variance_se(&self) -> f64 {
        if self.n < 2.0 {
            return 0.0;
        }
        let mu2 = self.m2 / self.n;
        let mu4 = self.m4 / self.n;
        ((mu4 - mu2 * mu2).max(0.0) / self.n).sqrt()
    }
}
