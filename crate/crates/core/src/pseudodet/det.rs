use crate::error::{Error, Result};
use crate::signed_log::SignedLog;

/// Determinant of a square matrix of signed-log entries.
///
/// Columns and then rows are equilibrated by their largest log-magnitude so
/// that the elimination runs on mantissas in `[-1, 1]`; the removed scales are
/// added back in the log domain. Singular input yields zero.
pub fn det_signed_log(rows: &[Vec<SignedLog>]) -> Result<SignedLog> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::arg("determinant of an empty matrix"));
    }
    if let Some(bad) = rows.iter().position(|r| r.len() != n) {
        return Err(Error::arg(format!(
            "row {bad} has {} entries, expected {n}",
            rows[bad].len()
        )));
    }

    let mut col_scale = vec![f64::NEG_INFINITY; n];
    for row in rows {
        for (c, v) in col_scale.iter_mut().zip(row) {
            if !v.is_zero() {
                *c = c.max(v.logmag());
            }
        }
    }
    if col_scale.contains(&f64::NEG_INFINITY) {
        return Ok(SignedLog::ZERO);
    }

    let mut mant = vec![0.0; n * n];
    let mut log_scale: f64 = col_scale.iter().sum();
    for (r, row) in rows.iter().enumerate() {
        let rs = row
            .iter()
            .zip(&col_scale)
            .filter(|(v, _)| !v.is_zero())
            .map(|(v, c)| v.logmag() - c)
            .fold(f64::NEG_INFINITY, f64::max);
        if rs == f64::NEG_INFINITY {
            return Ok(SignedLog::ZERO);
        }
        log_scale += rs;
        for (c, v) in row.iter().enumerate() {
            mant[r * n + c] = v.scale_exp(-col_scale[c] - rs).to_f64();
        }
    }
    let (sign, logabs) = lu_det_in_place(&mut mant, n);
    Ok(SignedLog::from_parts(sign, logabs + log_scale))
}

/// LU with partial pivoting on a row-major `n x n` buffer. Returns the sign and
/// `ln|det|`; a zero pivot gives `(0, -inf)`.
pub(crate) fn lu_det_in_place(a: &mut [f64], n: usize) -> (i8, f64) {
    let mut sign: i8 = 1;
    let mut logabs = 0.0;
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].abs();
        for r in col + 1..n {
            let v = a[r * n + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 || !best.is_finite() {
            return if best.is_nan() {
                (1, f64::NAN)
            } else {
                (0, f64::NEG_INFINITY)
            };
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            sign = -sign;
        }
        let p = a[col * n + col];
        if p < 0.0 {
            sign = -sign;
        }
        logabs += p.abs().ln();
        for r in col + 1..n {
            let f = a[r * n + col] / p;
            if f != 0.0 {
                for c in col + 1..n {
                    a[r * n + c] -= f * a[col * n + c];
                }
            }
        }
    }
    (sign, logabs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(v: &[&[f64]]) -> Vec<Vec<SignedLog>> {
        v.iter()
            .map(|r| r.iter().copied().map(SignedLog::from_f64).collect())
            .collect()
    }

    #[test]
    fn identity() {
        let d = det_signed_log(&mat(&[&[1., 0., 0.], &[0., 1., 0.], &[0., 0., 1.]])).unwrap();
        assert_eq!(d.sign(), 1);
        assert!(d.logmag().abs() < 1e-15);
    }

    #[test]
    fn two_by_two() {
        let d = det_signed_log(&mat(&[&[1., 2.], &[3., 4.]])).unwrap();
        assert!((d.to_f64() + 2.0).abs() < 1e-14);
    }

    #[test]
    fn no_overflow_on_huge_diagonal() {
        let big = SignedLog::exp(1000.0);
        let rows = vec![vec![big, SignedLog::ZERO], vec![SignedLog::ZERO, big]];
        let d = det_signed_log(&rows).unwrap();
        assert_eq!(d.sign(), 1);
        assert!((d.logmag() - 2000.0).abs() < 1e-10);
    }

    #[test]
    fn singular_is_zero() {
        assert!(det_signed_log(&mat(&[&[1., 2.], &[2., 4.]]))
            .unwrap()
            .is_zero());
        assert!(det_signed_log(&mat(&[&[0., 2.], &[0., 4.]]))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn rejects_ragged() {
        assert!(det_signed_log(&mat(&[&[1., 2.], &[3.]])).is_err());
        assert!(det_signed_log(&[]).is_err());
    }

    #[test]
    fn mixed_scales() {
        // [[e^500, 1], [1, e^-500]] -> 1 - 1 = 0 up to rounding; shift one entry
        let rows = vec![
            vec![SignedLog::exp(500.0), SignedLog::from_f64(2.0)],
            vec![SignedLog::ONE, SignedLog::exp(-500.0)],
        ];
        let d = det_signed_log(&rows).unwrap();
        assert!((d.to_f64() + 1.0).abs() < 1e-12);
    }
}
