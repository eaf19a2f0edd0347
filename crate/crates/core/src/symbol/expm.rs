use nalgebra::{Matrix4, SMatrix, Vector4};
use num_complex::Complex64;

/// Largest singular value of a complex 4x4 matrix, computed through the real
/// symmetric embedding of `M^H M` (robust, no iteration).
pub fn op_norm_2(m: &Matrix4<Complex64>) -> f64 {
    singular_value_range(m).1
}

/// (smallest, largest) singular values.
pub fn singular_value_range(m: &Matrix4<Complex64>) -> (f64, f64) {
    let h = m.adjoint() * m;
    let mut s = SMatrix::<f64, 8, 8>::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let z = h[(i, j)];
            s[(i, j)] = z.re;
            s[(i + 4, j + 4)] = z.re;
            s[(i, j + 4)] = -z.im;
            s[(i + 4, j)] = z.im;
        }
    }
    let eig = s.symmetric_eigen();
    let max = eig.eigenvalues.iter().copied().fold(0.0f64, f64::max);
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    (min.max(0.0).sqrt(), max.max(0.0).sqrt())
}

fn l1_norm(m: &Matrix4<Complex64>) -> f64 {
    (0..4)
        .map(|j| (0..4).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Order-13 Pade approximant with scaling and squaring (Higham's method),
/// for complex 4x4 matrices.
pub fn expm_pade(a: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    const B: [f64; 14] = [
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
    const THETA_13: f64 = 5.371920351148152;
    let norm = l1_norm(a);
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let a = a.map(|v| v * 2f64.powi(-s));
    let id = Matrix4::<Complex64>::identity();
    let a2 = a * a;
    let a4 = a2 * a2;
    let a6 = a4 * a2;
    let c = |k: usize| Complex64::new(B[k], 0.0);
    let u = a * (a6 * (a6 * c(13) + a4 * c(11) + a2 * c(9))
        + a6 * c(7)
        + a4 * c(5)
        + a2 * c(3)
        + id * c(1));
    let v = a6 * (a6 * c(12) + a4 * c(10) + a2 * c(8))
        + a6 * c(6)
        + a4 * c(4)
        + a2 * c(2)
        + id * c(0);
    let num = u + v;
    let den = -u + v;
    let mut result = den
        .lu()
        .solve(&num)
        .expect("Pade denominator is invertible for scaled input");
    for _ in 0..s {
        result = result * result;
    }
    result
}

/// Spectral factorization `A = V diag(lambda) V^{-1}` with a 2-norm condition
/// estimate for `V`. `None` when the eigenvector basis is numerically
/// unusable.
#[derive(Debug, Clone)]
pub struct EigenDecomp {
    pub values: [Complex64; 4],
    pub vectors: Matrix4<Complex64>,
    pub inverse: Matrix4<Complex64>,
    pub cond: f64,
}

impl EigenDecomp {
    /// `exp(-t A)` from the stored factorization.
    pub fn propagator(&self, t: f64) -> Matrix4<Complex64> {
        let mut diag = Matrix4::<Complex64>::zeros();
        for i in 0..4 {
            diag[(i, i)] = (-self.values[i] * t).exp();
        }
        self.vectors * diag * self.inverse
    }
}

/// Eigenvectors by shifted inverse iteration, with Gram-Schmidt inside
/// eigenvalue clusters so geometric multiplicity two does not produce a
/// collapsed basis.
pub fn eigen_decompose(a: &Matrix4<Complex64>, values: [Complex64; 4]) -> Option<EigenDecomp> {
    let scale = l1_norm(a).max(1.0);
    let mut vectors = Matrix4::<Complex64>::zeros();
    let starts = [
        Vector4::new(1.0, 0.6, 0.3, 0.1),
        Vector4::new(0.2, 1.0, -0.5, 0.4),
        Vector4::new(-0.3, 0.2, 1.0, 0.7),
        Vector4::new(0.5, -0.4, 0.2, 1.0),
    ];
    for (i, lam) in values.iter().enumerate() {
        let mut vec = None;
        for attempt in 0..3 {
            let shift = lam + Complex64::new(1e-10 * scale * 10f64.powi(attempt), 0.0);
            let shifted = a - Matrix4::identity() * shift;
            let lu = shifted.lu();
            let mut x: Vector4<Complex64> = starts[i].map(|v| Complex64::new(v, 0.0));
            let mut ok = true;
            for _ in 0..4 {
                match lu.solve(&x) {
                    Some(y) => {
                        let n = y.norm();
                        if !n.is_finite() || n == 0.0 {
                            ok = false;
                            break;
                        }
                        x = y / Complex64::new(n, 0.0);
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                vec = Some(x);
                break;
            }
        }
        let v = vec?;
        vectors.set_column(i, &v);
    }
    // orthonormalize within clusters of (numerically) repeated eigenvalues
    for i in 0..4 {
        for j in 0..i {
            if (values[i] - values[j]).norm() <= 1e-7 * (1.0 + values[i].norm()) {
                let vi = vectors.column(i).into_owned();
                let vj = vectors.column(j).into_owned();
                let proj = vj.dotc(&vi);
                let mut w = vi - vj * proj;
                let n = w.norm();
                if n < 1e-8 {
                    return None;
                }
                w /= Complex64::new(n, 0.0);
                vectors.set_column(i, &w);
            }
        }
    }
    let inverse = vectors.lu().try_inverse()?;
    let (smin, smax) = singular_value_range(&vectors);
    if smin <= 0.0 {
        return None;
    }
    let cond = smax / smin;
    Some(EigenDecomp {
        values,
        vectors,
        inverse,
        cond,
    })
}
