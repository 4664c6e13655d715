//! Matrix exponential of a real 4x4 matrix by scaling and squaring with a
//! degree-13 Padé approximant (Higham 2005).

use nalgebra::Matrix4;

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

const THETA_13: f64 = 5.371920351148152;

/// Above this 1-norm the argument is split into unit-norm substeps whose
/// exponentials are combined by repeated squaring.
const SPLIT_NORM: f64 = 1e3;

pub fn one_norm(a: &Matrix4<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(a)`.
pub fn expm(a: &Matrix4<f64>) -> Matrix4<f64> {
    let norm = one_norm(a);
    if norm > SPLIT_NORM {
        let pieces = norm.ceil() as u64;
        let step = scaled_pade(&(a / pieces as f64));
        return power(step, pieces);
    }
    scaled_pade(a)
}

fn scaled_pade(a: &Matrix4<f64>) -> Matrix4<f64> {
    let norm = one_norm(a);
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let mut r = pade13(&(a * 2f64.powi(-s)));
    for _ in 0..s {
        r = r * r;
    }
    r
}

fn pade13(a: &Matrix4<f64>) -> Matrix4<f64> {
    let b = &PADE13;
    let id = Matrix4::identity();
    let a2 = a * a;
    let a4 = a2 * a2;
    let a6 = a4 * a2;
    let u_inner = a6 * (a6 * b[13] + a4 * b[11] + a2 * b[9]) + a6 * b[7] + a4 * b[5] + a2 * b[3] + id * b[1];
    let u = a * u_inner;
    let v = a6 * (a6 * b[12] + a4 * b[10] + a2 * b[8]) + a6 * b[6] + a4 * b[4] + a2 * b[2] + id * b[0];
    let p = v + u;
    let q = v - u;
    q.lu()
        .solve(&p)
        .expect("Padé denominator is nonsingular for scaled arguments")
}

fn power(mut base: Matrix4<f64>, mut exp: u64) -> Matrix4<f64> {
    let mut acc = Matrix4::identity();
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= base;
        }
        base = base * base;
        exp >>= 1;
    }
    acc
}
