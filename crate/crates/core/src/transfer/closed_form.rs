//! Closed forms for homogeneous three- and four-site chains with the rest
//! in its ground state (`D = 1`).

use num_complex::Complex64 as C64;

use super::matrix::{pair_index, TransferMatrix};
use crate::error::{Error, Result};

/// Amplitude `r(t)`:
/// * `N = 3`: `−sin²(t / 2√2)`
/// * `N = 4`: `[2 sin((1+√5)t/4) + (3+√5) sin((1−√5)t/4)] / (5+√5)`
pub fn closed_form_r(n: usize, t: f64) -> Result<f64> {
    match n {
        3 => Ok(-(t / (2.0 * std::f64::consts::SQRT_2)).sin().powi(2)),
        4 => {
            let s5 = 5f64.sqrt();
            Ok((2.0 * ((1.0 + s5) * t / 4.0).sin() + (3.0 + s5) * ((1.0 - s5) * t / 4.0).sin()) / (5.0 + s5))
        }
        other => Err(Error::UnsupportedClosedForm(other)),
    }
}

/// Full ground-rest transfer matrix built from [`closed_form_r`].
///
/// Nonzero entries: `T_{00;00} = 1`, `T_{11;11} = r²`, `T_{00;11} = 1 − r²`
/// and the coherences. For `N = 3` both coherences equal `r`. For `N = 4`
/// the end-to-end amplitude is `⟨0001|e^{−iHt}|1000⟩ = i r`, giving
/// `T_{10;10} = i r` and `T_{01;01} = −i r`.
pub fn closed_form_transfer(n: usize, t: f64) -> Result<TransferMatrix> {
    let r = closed_form_r(n, t)?;
    let amplitude = match n {
        3 => C64::new(r, 0.0),
        _ => C64::new(0.0, r),
    };
    let mut m = TransferMatrix::zeros(t);
    m.entries[pair_index(0, 0)][pair_index(0, 0)] = C64::new(1.0, 0.0);
    m.entries[pair_index(1, 1)][pair_index(1, 1)] = C64::new(r * r, 0.0);
    m.entries[pair_index(0, 0)][pair_index(1, 1)] = C64::new(1.0 - r * r, 0.0);
    m.entries[pair_index(1, 0)][pair_index(1, 0)] = amplitude;
    m.entries[pair_index(0, 1)][pair_index(0, 1)] = amplitude.conj();
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, SQRT_2};

    #[test]
    fn three_site_values() {
        assert!((closed_form_r(3, SQRT_2 * PI).unwrap() + 1.0).abs() < 1e-15);
        assert!((closed_form_r(3, SQRT_2 * PI / 2.0).unwrap() + 0.5).abs() < 1e-15);
        assert_eq!(closed_form_r(3, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn four_site_value_at_pi() {
        // 30-digit evaluation: −0.441160972880932946001373310…
        assert!((closed_form_r(4, PI).unwrap() + 0.441_160_972_880_932_9).abs() < 1e-15);
        assert_eq!(closed_form_r(4, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn other_lengths_are_rejected() {
        assert_eq!(closed_form_r(5, 1.0), Err(Error::UnsupportedClosedForm(5)));
        assert!(closed_form_transfer(2, 1.0).is_err());
    }

    #[test]
    fn closed_form_maps_are_consistent() {
        for n in [3, 4] {
            for t in [0.0, 1.3, 7.7] {
                let m = closed_form_transfer(n, t).unwrap();
                assert!(m.trace_deviation() < 1e-15);
                assert!(m.hermiticity_deviation() < 1e-15);
            }
        }
    }
}
