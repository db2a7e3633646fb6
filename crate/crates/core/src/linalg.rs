//! Small fixed-size linear algebra: everything in this crate is 2x2 .. 6x6.

use num_complex::Complex;

use crate::real::Real;

/// Eigen-decomposition of a symmetric 2x2 matrix.
///
/// Returns eigenvalues ascending and the matching unit eigenvectors as
/// columns of the returned matrix.
pub fn sym_eigen2<T: Real>(h: &[[T; 2]; 2]) -> ([T; 2], [[T; 2]; 2]) {
    let half = T::half();
    let tr = h[0][0] + h[1][1];
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    let disc = (tr * tr * half * half - det).max(T::zero()).sqrt();
    let l1 = tr * half - disc;
    let l2 = tr * half + disc;

    let vec_for = |lam: T| -> [T; 2] {
        // (h - lam I) v = 0; pick the better-conditioned row.
        let a = h[0][0] - lam;
        let b = h[0][1];
        let c = h[1][1] - lam;
        let (vx, vy) = if b.abs() > a.abs().max(c.abs()) * T::c(1e-14) {
            if a.abs() > c.abs() {
                (b, -a)
            } else {
                (-c, b)
            }
        } else if a.abs() > c.abs() {
            (T::zero(), T::one())
        } else {
            (T::one(), T::zero())
        };
        let n = (vx * vx + vy * vy).sqrt();
        [vx / n, vy / n]
    };
    let v1 = vec_for(l1);
    let v2 = [-v1[1], v1[0]];
    ([l1, l2], [[v1[0], v2[0]], [v1[1], v2[1]]])
}

/// Eigen-decomposition of a symmetric 3x3 matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues ascending and unit eigenvectors as columns.
pub fn sym_eigen3<T: Real>(h: &[[T; 3]; 3]) -> ([T; 3], [[T; 3]; 3]) {
    let mut a = *h;
    let mut v = [[T::zero(); 3]; 3];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = T::one();
    }
    for _sweep in 0..64 {
        let off = (a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2]).sqrt();
        let scale = a[0][0].abs() + a[1][1].abs() + a[2][2].abs() + T::min_positive_value();
        if off <= scale * T::c(1e-30) || off <= T::c(1e-300) {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            if a[p][q].abs() <= scale * T::c(1e-32) {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (T::two() * a[p][q]);
            let t = {
                let s = if theta >= T::zero() {
                    T::one()
                } else {
                    -T::one()
                };
                s / (theta.abs() + (theta * theta + T::one()).sqrt())
            };
            let c = T::one() / (t * t + T::one()).sqrt();
            let s = t * c;
            let app = a[p][p];
            let aqq = a[q][q];
            let apq = a[p][q];
            a[p][p] = c * c * app - T::two() * s * c * apq + s * s * aqq;
            a[q][q] = s * s * app + T::two() * s * c * apq + c * c * aqq;
            a[p][q] = T::zero();
            a[q][p] = T::zero();
            for k in 0..3 {
                if k != p && k != q {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[p][k] = a[k][p];
                    a[k][q] = s * akp + c * akq;
                    a[q][k] = a[k][q];
                }
                let vkp = v[k][p];
                let vkq = v[k][q];
                v[k][p] = c * vkp - s * vkq;
                v[k][q] = s * vkp + c * vkq;
            }
        }
    }
    // Sort ascending, permuting eigenvector columns alongside.
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).expect("NaN eigenvalue"));
    let vals = [a[idx[0]][idx[0]], a[idx[1]][idx[1]], a[idx[2]][idx[2]]];
    let mut vecs = [[T::zero(); 3]; 3];
    for (new_col, &old_col) in idx.iter().enumerate() {
        for row in 0..3 {
            vecs[row][new_col] = v[row][old_col];
        }
    }
    (vals, vecs)
}

/// Monic characteristic polynomial of a square matrix (Faddeev-LeVerrier).
///
/// Returns `[1, c_{n-1}, ..., c_0]` for `z^n + c_{n-1} z^{n-1} + ... + c_0`.
pub fn char_poly<T: Real>(a: &[Vec<T>]) -> Vec<T> {
    let n = a.len();
    let mut coeffs = vec![T::one()];
    let mut m = vec![vec![T::zero(); n]; n]; // M_0 = 0
    for k in 1..=n {
        // M_k = A * M_{k-1} + c_{n-k+1} I
        let c_prev = *coeffs.last().expect("nonempty");
        let mut am = vec![vec![T::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = T::zero();
                for l in 0..n {
                    s += a[i][l] * m[l][j];
                }
                am[i][j] = s;
            }
        }
        for (i, row) in am.iter_mut().enumerate() {
            row[i] += c_prev;
        }
        m = am;
        // c_{n-k} = -tr(A M_k) / k
        let mut tr = T::zero();
        for i in 0..n {
            for l in 0..n {
                tr += a[i][l] * m[l][i];
            }
        }
        coeffs.push(-tr / T::c(k as f64));
    }
    coeffs
}

/// Roots of the monic quadratic `w^2 + b w + c` over the complex numbers.
pub fn quadratic_roots<T: Real>(b: T, c: T) -> [Complex<T>; 2] {
    let half = T::half();
    let disc = Complex::new(b * b - T::c(4.0) * c, T::zero()).sqrt();
    let bb = Complex::new(b, T::zero());
    [(-bb - disc) * half, (-bb + disc) * half]
}

/// Roots of the monic cubic `w^3 + a2 w^2 + a1 w + a0` (complex Cardano).
pub fn cubic_roots<T: Real>(a2: T, a1: T, a0: T) -> [Complex<T>; 3] {
    let third = T::one() / T::c(3.0);
    // Depressed cubic t^3 + p t + q with w = t - a2/3.
    let p = a1 - a2 * a2 * third;
    let q = T::two() * a2 * a2 * a2 / T::c(27.0) - a2 * a1 * third + a0;
    let shift = Complex::new(-a2 * third, T::zero());
    let half = T::half();
    let disc = Complex::new(q * q * half * half + p * p * p / T::c(27.0), T::zero());
    let sq = disc.sqrt();
    let qc = Complex::new(q, T::zero());
    let mut u = (-qc * half + sq).cbrt_principal();
    if u.norm() < T::c(1e-30) {
        u = (-qc * half - sq).cbrt_principal();
    }
    let pc = Complex::new(p, T::zero());
    let three = T::c(3.0);
    let omega = Complex::new(-half, three.sqrt() * half);
    let mut roots = [Complex::new(T::zero(), T::zero()); 3];
    for (k, slot) in roots.iter_mut().enumerate() {
        let mut uk = u;
        for _ in 0..k {
            uk = uk * omega;
        }
        let t = if uk.norm() < T::c(1e-30) {
            uk
        } else {
            uk - pc / (uk * three)
        };
        *slot = t + shift;
    }
    roots
}

trait CbrtPrincipal<T: Real> {
    fn cbrt_principal(self) -> Complex<T>;
}

impl<T: Real> CbrtPrincipal<T> for Complex<T> {
    fn cbrt_principal(self) -> Complex<T> {
        let r = self.norm();
        if r == T::zero() {
            return self;
        }
        let theta = self.arg() / T::c(3.0);
        let rr = r.powf(T::one() / T::c(3.0));
        Complex::new(rr * theta.cos(), rr * theta.sin())
    }
}

/// Solve the 2x2 linear system `a x = b`.
pub fn solve2<T: Real>(a: &[[T; 2]; 2], b: &[T; 2]) -> Option<[T; 2]> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det.abs() < T::min_positive_value() * T::c(1e4) {
        return None;
    }
    Some([
        (b[0] * a[1][1] - b[1] * a[0][1]) / det,
        (a[0][0] * b[1] - a[1][0] * b[0]) / det,
    ])
}

/// Solve the 3x3 linear system `a x = b` by partial-pivot elimination.
pub fn solve3<T: Real>(a: &[[T; 3]; 3], b: &[T; 3]) -> Option<[T; 3]> {
    let mut m = *a;
    let mut rhs = *b;
    for col in 0..3 {
        let mut piv = col;
        for row in col + 1..3 {
            if m[row][col].abs() > m[piv][col].abs() {
                piv = row;
            }
        }
        if m[piv][col].abs() < T::min_positive_value() * T::c(1e4) {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = [T::zero(); 3];
    for col in (0..3).rev() {
        let mut s = rhs[col];
        for k in col + 1..3 {
            s -= m[col][k] * x[k];
        }
        x[col] = s / m[col][col];
    }
    Some(x)
}

/// Max-norm symmetry defect |H - H^T| relative to |H|.
pub fn symmetry_defect<T: Real, const N: usize>(h: &[[T; N]; N]) -> T {
    let mut defect = T::zero();
    let mut scale = T::zero();
    for i in 0..N {
        for j in 0..N {
            scale = scale.max(h[i][j].abs());
            defect = defect.max((h[i][j] - h[j][i]).abs());
        }
    }
    if scale > T::zero() {
        defect / scale
    } else {
        T::zero()
    }
}
