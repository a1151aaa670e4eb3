//! Simplicial torus-gauge Chern–Simons path integrals on `Σ × S¹`.
//!
//! The crate builds the cell complexes `K1`, `K2`, `qK` and `qK × Z_N`, the
//! discrete operators and action of the torus-gauge fixed theory, oscillatory
//! Gaussian integration, ribbon holonomies, and the staged evaluation of the
//! rigorous Wilson-loop ratio `WLO_rig`. An independent implementation of
//! Turaev's shadow state sum serves as its oracle.
//!
//! Numerical code is generic over a real scalar ([`Real`]); the aliases at
//! the bottom of this file fix `f64`, which is what the CLI and the
//! acceptance suite use. Incidence data is exact integer arithmetic.

pub mod cspath;
pub mod dec;
pub mod lie;
pub mod oscgauss;
pub mod polycomplex;
pub mod quad;
pub mod ribbon;
pub mod shadow;

pub use num_complex::Complex;

/// Real scalar used by the numerical modules.
pub trait Real: nalgebra::RealField + Copy + Send + Sync {}

impl<T: nalgebra::RealField + Copy + Send + Sync> Real for T {}

/// Convert an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

/// Convert `T` to `f64` (for reporting and integer snapping).
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    nalgebra::try_convert(x).unwrap_or(f64::NAN)
}

pub type C64 = Complex<f64>;
pub type Cochain = dec::Cochain<f64>;
pub type IntCochain = dec::Cochain<i64>;
pub type LieData = lie::LieData<f64>;
pub type LevelData = lie::LevelData<f64>;
pub type OscGaussMeasure = oscgauss::OscGaussMeasure<f64>;
pub type FieldSpaces = cspath::FieldSpaces<f64>;

/// `|z|` for a complex number over [`Real`].
#[inline]
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}

/// `r e^{iθ}`.
#[inline]
pub fn polar<T: Real>(r: T, theta: T) -> Complex<T> {
    let (s, c) = theta.sin_cos();
    Complex::new(r * c, r * s)
}
