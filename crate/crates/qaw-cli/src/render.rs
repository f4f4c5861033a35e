//! Scalar rendering for the two arithmetic modes: exact values print as
//! Gaussian rationals (`"p/q"` strings in JSON), floats as JSON numbers.

use serde_json::Value;

use qaw_core::{C64, CRat, Scalar};

use crate::report::{c64_to_value, crat_to_value};

/// A scalar that knows its canonical JSON and table form.
pub trait Render: Scalar {
    fn to_json(&self) -> Value;
    fn to_display(&self) -> String;
}

impl Render for CRat {
    fn to_json(&self) -> Value {
        crat_to_value(self)
    }

    fn to_display(&self) -> String {
        if self.im.numer().bits() == 0 {
            format!("{}", self.re)
        } else {
            format!("{} + {}i", self.re, self.im)
        }
    }
}

impl Render for C64 {
    fn to_json(&self) -> Value {
        c64_to_value(self)
    }

    fn to_display(&self) -> String {
        if self.im == 0.0 {
            format!("{:.12}", self.re)
        } else {
            format!("{:.12} + {:.12}i", self.re, self.im)
        }
    }
}
