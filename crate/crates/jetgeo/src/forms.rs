//! Alternating forms at a point, stored dense over index subsets.
//!
//! A k-form is kept as its values on the increasing basis k-tuples, indexed
//! by bitmask. The wedge is the shuffle (determinant) convention: for
//! decomposable forms, (a ^ b)(v_1..v_{p+q}) sums over (p, q)-shuffles with
//! sign, so (dx^i ^ dx^j)(e_i, e_j) = 1. Used only by the contact volume-form
//! check, where the top coefficient of eta ^ (d eta)^n is needed.

/// Dense alternating form on up to 15 variables.
#[derive(Clone, Debug)]
pub(crate) struct AltForm {
    dim: usize,
    degree: usize,
    /// coeff[mask] = value on the increasing tuple of variables in `mask`;
    /// nonzero only for masks with exactly `degree` bits.
    coeff: Vec<f64>,
}

/// Sign of the permutation that merges the sorted sequences `a` and `b`
/// (disjoint masks) into one sorted sequence: parity of the number of pairs
/// (i in a, j in b) with i > j.
fn merge_sign(a: u16, b: u16) -> f64 {
    let mut inversions = 0u32;
    let mut bb = b;
    while bb != 0 {
        let j = bb.trailing_zeros();
        bb &= bb - 1;
        inversions += (a >> (j + 1)).count_ones();
    }
    if inversions.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

impl AltForm {
    pub fn zero(dim: usize, degree: usize) -> AltForm {
        assert!(dim <= 15, "AltForm supports dim <= 15");
        AltForm {
            dim,
            degree,
            coeff: vec![0.0; 1 << dim],
        }
    }

    /// 1-form from components.
    pub fn one_form(comps: &[f64]) -> AltForm {
        let mut f = AltForm::zero(comps.len(), 1);
        for (i, &c) in comps.iter().enumerate() {
            f.coeff[1 << i] = c;
        }
        f
    }

    /// 2-form from its values on basis pairs: `value(i, j)` with i < j.
    pub fn two_form(dim: usize, value: impl Fn(usize, usize) -> f64) -> AltForm {
        let mut f = AltForm::zero(dim, 2);
        for i in 0..dim {
            for j in (i + 1)..dim {
                f.coeff[(1 << i) | (1 << j)] = value(i, j);
            }
        }
        f
    }

    pub fn wedge(&self, other: &AltForm) -> AltForm {
        assert_eq!(self.dim, other.dim);
        let mut out = AltForm::zero(self.dim, self.degree + other.degree);
        for (ma, &va) in self.coeff.iter().enumerate() {
            if va == 0.0 {
                continue;
            }
            let ma = ma as u16;
            for (mb, &vb) in other.coeff.iter().enumerate() {
                if vb == 0.0 {
                    continue;
                }
                let mb = mb as u16;
                if ma & mb != 0 {
                    continue;
                }
                out.coeff[(ma | mb) as usize] += merge_sign(ma, mb) * va * vb;
            }
        }
        out
    }

    /// Value on the full ordered basis tuple (only meaningful for top-degree
    /// forms).
    pub fn top_coefficient(&self) -> f64 {
        debug_assert_eq!(self.degree, self.dim);
        self.coeff[(1usize << self.dim) - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dx_wedge_dy_wedge_dz_is_determinant() {
        let dx = AltForm::one_form(&[1.0, 0.0, 0.0]);
        let dy = AltForm::one_form(&[0.0, 1.0, 0.0]);
        let dz = AltForm::one_form(&[0.0, 0.0, 1.0]);
        assert_eq!(dx.wedge(&dy).wedge(&dz).top_coefficient(), 1.0);
        assert_eq!(dy.wedge(&dx).wedge(&dz).top_coefficient(), -1.0);
        assert_eq!(dx.wedge(&dx).wedge(&dz).top_coefficient(), 0.0);
    }

    #[test]
    fn wedge_of_general_one_forms_matches_cross_product() {
        // (a ^ b)(e_i, e_j) = a_i b_j - a_j b_i
        let a = [2.0, -1.0, 0.5];
        let b = [0.3, 4.0, 1.0];
        let w = AltForm::one_form(&a).wedge(&AltForm::one_form(&b));
        assert!((w.coeff[0b011] - (a[0] * b[1] - a[1] * b[0])).abs() < 1e-15);
        assert!((w.coeff[0b101] - (a[0] * b[2] - a[2] * b[0])).abs() < 1e-15);
        assert!((w.coeff[0b110] - (a[1] * b[2] - a[2] * b[1])).abs() < 1e-15);
    }
}
