use crate::modes::{convolve_onto, LongRangeKernel, ModePair};
use crate::numerics::ComplexField;
use crate::{Result, C64};

/// Rank-4 tensor over two mode labels per index pair.
pub type Tensor4 = [[[[C64; 2]; 2]; 2]; 2];

const ZERO4: Tensor4 = [[[[C64 { re: 0.0, im: 0.0 }; 2]; 2]; 2]; 2];

/// Overlap tensors of the projected pair equation.
///
/// * `t_a[n][n1][n2][n3] = ∫ φ*_n φ_{n1} φ*_{n2} φ_{n3} dx` (and `t_b`),
/// * `k_a[n][n1][n2][n3] = ∬ φ*_n φ_{n1}(x) W(x - x') φ*_{n2} φ_{n3}(x') dx dx'` (and `k_b`),
/// * `x_ab[n][n1][m2][m3] = ∬ φᵃ*_n φᵃ_{n1}(x) W_c(x - y) φᵇ*_{m2} φᵇ_{m3}(y) dx dy`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedTensors {
    pub t_a: Tensor4,
    pub t_b: Tensor4,
    pub k_a: Tensor4,
    pub k_b: Tensor4,
    pub x_ab: Tensor4,
}

fn products(mp: &ModePair) -> [[Vec<C64>; 2]; 2] {
    let f = |i: usize, j: usize| -> Vec<C64> {
        mp.mode(i).values().iter().zip(mp.mode(j).values()).map(|(a, b)| a.conj() * b).collect()
    };
    [[f(0, 0), f(0, 1)], [f(1, 0), f(1, 1)]]
}

fn contract(left: &[[Vec<C64>; 2]; 2], right: &[[Vec<C64>; 2]; 2], dx: f64) -> Tensor4 {
    let mut t = ZERO4;
    for n in 0..2 {
        for n1 in 0..2 {
            for n2 in 0..2 {
                for n3 in 0..2 {
                    t[n][n1][n2][n3] = left[n][n1].iter().zip(&right[n2][n3]).map(|(a, b)| a * b).sum::<C64>() * dx;
                }
            }
        }
    }
    t
}

fn convolved(
    onto: &ComplexField,
    from: &ModePair,
    prods: &[[Vec<C64>; 2]; 2],
    k: impl Fn(f64) -> f64 + Copy,
) -> Result<[[Vec<C64>; 2]; 2]> {
    let ga = onto.grid();
    let gb = from.grid();
    Ok([
        [convolve_onto(ga, gb, &prods[0][0], k)?, convolve_onto(ga, gb, &prods[0][1], k)?],
        [convolve_onto(ga, gb, &prods[1][0], k)?, convolve_onto(ga, gb, &prods[1][1], k)?],
    ])
}

impl DerivedTensors {
    /// Tensors from two mode pairs. `include_self` controls the same-condensate `W` terms.
    pub fn from_modes(
        mp_a: &ModePair,
        mp_b: &ModePair,
        kernel: Option<&LongRangeKernel>,
        include_self: bool,
    ) -> Result<Self> {
        let (pa, pb) = (products(mp_a), products(mp_b));
        let (dxa, dxb) = (mp_a.grid().dx(), mp_b.grid().dx());
        let mut out =
            Self { t_a: contract(&pa, &pa, dxa), t_b: contract(&pb, &pb, dxb), k_a: ZERO4, k_b: ZERO4, x_ab: ZERO4 };
        if let Some(k) = kernel {
            k.validate()?;
            if include_self {
                let ca = convolved(&mp_a.phi0, mp_a, &pa, |x| k.eval(x))?;
                let cb = convolved(&mp_b.phi0, mp_b, &pb, |x| k.eval(x))?;
                out.k_a = contract(&pa, &ca, dxa);
                out.k_b = contract(&pb, &cb, dxb);
            }
            let cab = convolved(&mp_a.phi0, mp_b, &pb, |x| k.eval_cross(x))?;
            out.x_ab = contract(&pa, &cab, dxa);
        }
        Ok(out)
    }

    /// Tensors of perfectly localized modes: only `T[n][n][n][n] = χ`,
    /// `K[n][n][m][m] ∈ {μ₁, μ₂}` and `X[n][n][m][m] ∈ {ν₁, ν₂}` survive.
    pub fn localized_from_scalars(chi_a: f64, chi_b: f64, mu: (f64, f64), nu: (f64, f64)) -> Self {
        let mut t = Self { t_a: ZERO4, t_b: ZERO4, k_a: ZERO4, k_b: ZERO4, x_ab: ZERO4 };
        for n in 0..2 {
            t.t_a[n][n][n][n] = C64::new(chi_a, 0.0);
            t.t_b[n][n][n][n] = C64::new(chi_b, 0.0);
            for m in 0..2 {
                let same = n == m;
                t.k_a[n][n][m][m] = C64::new(if same { mu.0 } else { mu.1 }, 0.0);
                t.k_b[n][n][m][m] = t.k_a[n][n][m][m];
                t.x_ab[n][n][m][m] = C64::new(if same { nu.0 } else { nu.1 }, 0.0);
            }
        }
        t
    }

    /// Copy with every cross-well overlap removed (entries not of the
    /// `[n][n][m][m]` pattern, and `T` entries other than `[n][n][n][n]`).
    pub fn localized(&self) -> Self {
        let keep = |t: &Tensor4, all_equal: bool| -> Tensor4 {
            let mut o = ZERO4;
            for n in 0..2 {
                for m in 0..2 {
                    if !all_equal || n == m {
                        o[n][n][m][m] = t[n][n][m][m];
                    }
                }
            }
            o
        };
        Self {
            t_a: keep(&self.t_a, true),
            t_b: keep(&self.t_b, true),
            k_a: keep(&self.k_a, false),
            k_b: keep(&self.k_b, false),
            x_ab: keep(&self.x_ab, false),
        }
    }

    /// Copy with the long-range tensors zeroed.
    pub fn contact_only(&self) -> Self {
        Self { k_a: ZERO4, k_b: ZERO4, x_ab: ZERO4, ..self.clone() }
    }

    /// `(μ₁, μ₂, ν₁, ν₂)` read from the diagonal-pattern entries.
    pub fn scalar_couplings(&self) -> (f64, f64, f64, f64) {
        (self.k_a[0][0][0][0].re, self.k_a[0][0][1][1].re, self.x_ab[0][0][0][0].re, self.x_ab[0][0][1][1].re)
    }

    /// Largest violation of `T[n][n1][n2][n3] = T[n1][n][n3][n2]*` over all tensors.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for t in [&self.t_a, &self.t_b, &self.k_a, &self.k_b, &self.x_ab] {
            for n in 0..2 {
                for n1 in 0..2 {
                    for n2 in 0..2 {
                        for n3 in 0..2 {
                            worst = worst.max((t[n][n1][n2][n3] - t[n1][n][n3][n2].conj()).norm());
                        }
                    }
                }
            }
        }
        worst
    }
}
