use nalgebra::ComplexField;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

/// The scalar field of a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    R,
    C,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::R => write!(f, "R"),
            Field::C => write!(f, "C"),
        }
    }
}

impl std::str::FromStr for Field {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "R" | "r" | "real" => Ok(Field::R),
            "C" | "c" | "complex" => Ok(Field::C),
            _ => Err(format!("unknown field {s:?} (expected R or C)")),
        }
    }
}

/// Entry type of frames and Gram points: `f64` or `Complex64`.
pub trait Scalar: ComplexField<RealField = f64> + Copy + Send + Sync + 'static {
    const FIELD: Field;

    fn to_c64(self) -> Complex64;

    /// `None` when `z` has a nonzero imaginary part and `Self` is real.
    fn from_c64(z: Complex64) -> Option<Self>;

    fn of_real(x: f64) -> Self {
        Self::from_real(x)
    }

    fn is_finite_entry(self) -> bool {
        let z = self.to_c64();
        z.re.is_finite() && z.im.is_finite()
    }
}

impl Scalar for f64 {
    const FIELD: Field = Field::R;

    fn to_c64(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }

    fn from_c64(z: Complex64) -> Option<Self> {
        (z.im == 0.0).then_some(z.re)
    }
}

impl Scalar for Complex64 {
    const FIELD: Field = Field::C;

    fn to_c64(self) -> Complex64 {
        self
    }

    fn from_c64(z: Complex64) -> Option<Self> {
        Some(z)
    }
}

pub(crate) fn max_abs<T: Scalar>(m: &nalgebra::DMatrix<T>) -> f64 {
    m.iter().map(|x| x.modulus()).fold(0.0, f64::max)
}
