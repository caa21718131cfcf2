use crate::scalar::Scalar;
use crate::Mat;

/// Plane rotation `[c s; -conj(s) c]` with real `c`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Rotation<T> {
    pub c: f64,
    pub s: T,
}

impl<T: Scalar> Rotation<T> {
    pub fn identity() -> Self {
        Self { c: 1.0, s: T::zero() }
    }

    /// Rotation mapping `(f, g)` to `(r, 0)` when applied to a column pair.
    pub fn zeroing(f: T, g: T) -> Self {
        if g == T::zero() {
            return Self::identity();
        }
        let ga = g.modulus();
        if f == T::zero() {
            return Self {
                c: 0.0,
                s: g.conjugate().unscale(ga),
            };
        }
        let fa = f.modulus();
        let rho = fa.hypot(ga);
        let phase = f.unscale(fa);
        Self {
            c: fa / rho,
            s: phase * g.conjugate().unscale(rho),
        }
    }

    /// Column rotation (see [`Rotation::apply_cols`]) that annihilates the
    /// first entry of the row pair `(x1, x2)`.
    pub fn killing_first(x1: T, x2: T) -> Self {
        Self::zeroing(x2, x1)
    }

    /// `row_i ← c·row_i + s·row_j`, `row_j ← −conj(s)·row_i + c·row_j`.
    pub fn apply_rows(&self, m: &mut Mat<T>, i: usize, j: usize) {
        let c = T::from_real(self.c);
        let s = self.s;
        let sc = s.conjugate();
        for col in 0..m.ncols() {
            let x = m[(i, col)];
            let y = m[(j, col)];
            m[(i, col)] = c * x + s * y;
            m[(j, col)] = c * y - sc * x;
        }
    }

    /// Right multiplication by `[c s; -conj(s) c]` on columns `i`, `j`:
    /// `col_i ← c·col_i − conj(s)·col_j`, `col_j ← s·col_i + c·col_j`.
    pub fn apply_cols(&self, m: &mut Mat<T>, i: usize, j: usize) {
        let c = T::from_real(self.c);
        let s = self.s;
        let sc = s.conjugate();
        for row in 0..m.nrows() {
            let x = m[(row, i)];
            let y = m[(row, j)];
            m[(row, i)] = c * x - sc * y;
            m[(row, j)] = s * x + c * y;
        }
    }
}

/// Working state of a pencil under unitary equivalence: `a = q·M1·z`, `b = q·M2·z`.
pub(crate) struct Pencil<T: Scalar> {
    pub a: Mat<T>,
    pub b: Mat<T>,
    pub q: Mat<T>,
    pub z: Mat<T>,
}

impl<T: Scalar> Pencil<T> {
    pub fn new(m1: &Mat<T>, m2: &Mat<T>) -> Self {
        let n = m1.nrows();
        Self {
            a: m1.clone(),
            b: m2.clone(),
            q: Mat::identity(n, n),
            z: Mat::identity(n, n),
        }
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn rotate_rows(&mut self, g: &Rotation<T>, i: usize, j: usize) {
        g.apply_rows(&mut self.a, i, j);
        g.apply_rows(&mut self.b, i, j);
        g.apply_rows(&mut self.q, i, j);
    }

    pub fn rotate_cols(&mut self, g: &Rotation<T>, i: usize, j: usize) {
        g.apply_cols(&mut self.a, i, j);
        g.apply_cols(&mut self.b, i, j);
        g.apply_cols(&mut self.z, i, j);
    }

    /// Moves a zero at `b[j, j]` (inside the unreduced window `lo..=hi`) so
    /// that an infinite eigenvalue deflates, leaving a zero subdiagonal entry
    /// of `a` behind.
    pub fn chase_zero_beta(&mut self, lo: usize, hi: usize, j: usize) {
        self.b[(j, j)] = T::zero();
        if j == lo {
            let g = Rotation::zeroing(self.a[(lo, lo)], self.a[(lo + 1, lo)]);
            self.rotate_rows(&g, lo, lo + 1);
            self.a[(lo + 1, lo)] = T::zero();
            self.b[(lo + 1, lo)] = T::zero();
            return;
        }
        for k in j..hi {
            let g = Rotation::zeroing(self.b[(k, k + 1)], self.b[(k + 1, k + 1)]);
            self.rotate_rows(&g, k, k + 1);
            self.b[(k + 1, k + 1)] = T::zero();
            self.b[(k + 1, k)] = T::zero();
            let w = Rotation::killing_first(self.a[(k + 1, k - 1)], self.a[(k + 1, k)]);
            self.rotate_cols(&w, k - 1, k);
            self.a[(k + 1, k - 1)] = T::zero();
            self.b[(k, k - 1)] = T::zero();
        }
        let w = Rotation::killing_first(self.a[(hi, hi - 1)], self.a[(hi, hi)]);
        self.rotate_cols(&w, hi - 1, hi);
        self.a[(hi, hi - 1)] = T::zero();
        self.b[(hi, hi - 1)] = T::zero();
    }
}
