//! Matrix exponential of small dense complex matrices: degree-13 Padé
//! approximant with scaling and squaring (Higham 2005).

use num_complex::Complex64;

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Mat {
    pub n: usize,
    pub a: Vec<Complex64>,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Self { n, a: vec![ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = ONE;
        }
        m
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.a[i * self.n + j] = v;
    }

    fn matmul(&self, o: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let x = self.a[i * n + k];
                if x == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.a[i * n + j] += x * o.a[k * n + j];
                }
            }
        }
        out
    }

    fn axpy(&mut self, c: f64, o: &Self) {
        for (x, y) in self.a.iter_mut().zip(&o.a) {
            *x += c * y;
        }
    }

    fn scaled(&self, c: f64) -> Self {
        Self { n: self.n, a: self.a.iter().map(|v| v * c).collect() }
    }

    fn norm1(&self) -> f64 {
        (0..self.n).map(|j| (0..self.n).map(|i| self.at(i, j).norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// Solves `self · X = rhs` by Gaussian elimination with partial pivoting.
    fn solve(&self, rhs: &Self) -> Self {
        let n = self.n;
        let mut a = self.a.clone();
        let mut b = rhs.a.clone();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| a[i * n + col].norm().total_cmp(&a[j * n + col].norm()))
                .expect("non-empty pivot range");
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                    b.swap(col * n + j, piv * n + j);
                }
            }
            let d = a[col * n + col];
            for i in col + 1..n {
                let f = a[i * n + col] / d;
                if f == ZERO {
                    continue;
                }
                for j in col..n {
                    let v = a[col * n + j];
                    a[i * n + j] -= f * v;
                }
                for j in 0..n {
                    let v = b[col * n + j];
                    b[i * n + j] -= f * v;
                }
            }
        }
        for col in (0..n).rev() {
            let d = a[col * n + col];
            for j in 0..n {
                let mut s = b[col * n + j];
                for k in col + 1..n {
                    s -= a[col * n + k] * b[k * n + j];
                }
                b[col * n + j] = s / d;
            }
        }
        Self { n, a: b }
    }
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

pub(crate) fn expm(m: &Mat) -> Mat {
    let n = m.n;
    let norm = m.norm1();
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = m.scaled(0.5f64.powi(s));
    let b = &PADE13;
    let ident = Mat::identity(n);
    let a2 = a.matmul(&a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);

    let mut inner_u = a6.scaled(b[13]);
    inner_u.axpy(b[11], &a4);
    inner_u.axpy(b[9], &a2);
    let mut u = a6.matmul(&inner_u);
    u.axpy(b[7], &a6);
    u.axpy(b[5], &a4);
    u.axpy(b[3], &a2);
    u.axpy(b[1], &ident);
    let u = a.matmul(&u);

    let mut inner_v = a6.scaled(b[12]);
    inner_v.axpy(b[10], &a4);
    inner_v.axpy(b[8], &a2);
    let mut v = a6.matmul(&inner_v);
    v.axpy(b[6], &a6);
    v.axpy(b[4], &a4);
    v.axpy(b[2], &a2);
    v.axpy(b[0], &ident);

    let mut p = v.clone();
    p.axpy(1.0, &u);
    let mut q = v;
    q.axpy(-1.0, &u);
    let mut r = q.solve(&p);
    for _ in 0..s {
        r = r.matmul(&r);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_generator() {
        let w = 3.7;
        let mut m = Mat::zeros(2);
        m.set(0, 1, Complex64::new(w, 0.0));
        m.set(1, 0, Complex64::new(-w, 0.0));
        let e = expm(&m);
        assert!((e.at(0, 0).re - w.cos()).abs() < 1e-13);
        assert!((e.at(0, 1).re - w.sin()).abs() < 1e-13);
        assert!((e.at(1, 0).re + w.sin()).abs() < 1e-13);
    }

    #[test]
    fn nilpotent_jordan_block() {
        let mut m = Mat::zeros(3);
        m.set(0, 1, ONE);
        m.set(1, 2, ONE);
        let e = expm(&m.scaled(2.0));
        assert!((e.at(0, 2).re - 2.0).abs() < 1e-14);
        assert!((e.at(0, 1).re - 2.0).abs() < 1e-14);
        assert!((e.at(2, 2).re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_large_norm() {
        let mut m = Mat::zeros(2);
        m.set(0, 0, Complex64::new(-30.0, 5.0));
        m.set(1, 1, Complex64::new(2.0, -40.0));
        let e = expm(&m);
        let want0 = Complex64::new(-30.0, 5.0).exp();
        let want1 = Complex64::new(2.0, -40.0).exp();
        assert!((e.at(0, 0) - want0).norm() <= 1e-13 * want0.norm().max(1e-300));
        assert!((e.at(1, 1) - want1).norm() <= 1e-12 * want1.norm());
    }
}
