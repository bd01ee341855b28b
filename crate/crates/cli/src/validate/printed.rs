//! Steady-state moment equations transcribed by hand, line by line, with
//! `<R_z> = 0` and `R_z² = 1` already applied. Each line reads `0 = Σ c·<moment> + constant`.
//! `(s, m, n)` stands for `<R_z^s a†^m a^n>`.

use cavstat::{ModelParams, MomentIndex, MomentVector};
use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct PrintedLine {
    pub label: String,
    pub terms: Vec<(Complex64, MomentIndex)>,
    pub constant: Complex64,
}

impl PrintedLine {
    /// `|Σ c·<j> + constant|` divided by `Σ |c|·A_j + |constant|`, where `A_j` is the
    /// largest moment magnitude of the same order as `j`. Lines whose moments all
    /// vanish by symmetry are then judged against the solution's own scale.
    pub fn relative_residual(&self, moments: &MomentVector) -> f64 {
        let mut largest = vec![1.0f64; moments.max_order() as usize + 1];
        for (idx, v) in moments.iter() {
            let k = idx.order() as usize;
            if k > 0 {
                largest[k] = if largest[k] == 1.0 {
                    v.norm()
                } else {
                    largest[k].max(v.norm())
                };
            }
        }
        let mut value = self.constant;
        let mut scale = self.constant.norm();
        for (c, idx) in &self.terms {
            let m = moments
                .get(*idx)
                .unwrap_or_else(|| panic!("{idx} missing from the solved vector"));
            value += c * m;
            scale += c.norm() * largest[idx.order() as usize].max(m.norm());
        }
        if scale == 0.0 {
            value.norm()
        } else {
            value.norm() / scale
        }
    }
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn at(s: u8, m: u32, n: u32) -> MomentIndex {
    MomentIndex::new(s, m, n)
}

fn line(label: &str, constant: Complex64, terms: Vec<(Complex64, MomentIndex)>) -> PrintedLine {
    PrintedLine {
        label: label.to_string(),
        terms,
        constant,
    }
}

/// Order-2 lines closing `<a†a>`.
pub fn mean_photon_lines(p: &ModelParams) -> Vec<PrintedLine> {
    let (g, b, k, gam, nb) = (p.g0, p.beta, p.kappa, p.gamma, p.n_bar);
    vec![
        line(
            "<a†a>",
            re(-2.0 * k * nb),
            vec![
                (re(2.0 * k), at(0, 1, 1)),
                (I * g, at(1, 1, 0)),
                (-I * g, at(1, 0, 1)),
                (-I * b, at(1, 2, 0)),
                (I * b, at(1, 0, 2)),
            ],
        ),
        line(
            "<R_z a†>",
            -I * g,
            vec![
                (re(k + 4.0 * gam), at(1, 1, 0)),
                (-I * b, at(0, 1, 0)),
                (I * b, at(0, 0, 1)),
            ],
        ),
        line(
            "<R_z a†²>",
            I * b,
            vec![
                (re(2.0 * k + 4.0 * gam), at(1, 2, 0)),
                (-2.0 * I * g, at(0, 1, 0)),
                (-2.0 * I * b, at(0, 2, 0)),
                (2.0 * I * b, at(0, 1, 1)),
            ],
        ),
        line(
            "<a†>",
            re(0.0),
            vec![
                (re(k), at(0, 1, 0)),
                (-I * b, at(1, 1, 0)),
                (I * b, at(1, 0, 1)),
            ],
        ),
        line(
            "<a†²>",
            re(0.0),
            vec![
                (re(2.0 * k), at(0, 2, 0)),
                (-2.0 * I * g, at(1, 1, 0)),
                (-2.0 * I * b, at(1, 2, 0)),
                (2.0 * I * b, at(1, 1, 1)),
            ],
        ),
        line(
            "<R_z a†a>",
            re(0.0),
            vec![
                (re(2.0 * k + 4.0 * gam), at(1, 1, 1)),
                (I * g, at(0, 1, 0)),
                (-I * g, at(0, 0, 1)),
                (-I * b, at(0, 2, 0)),
                (I * b, at(0, 0, 2)),
            ],
        ),
    ]
}

/// Order-4 lines closing `<a†²a²>`.
pub fn second_order_lines(p: &ModelParams) -> Vec<PrintedLine> {
    let (g, b, k, gam, nb) = (p.g0, p.beta, p.kappa, p.gamma, p.n_bar);
    let ib = I * b;
    vec![
        line(
            "<a†²a²>",
            re(0.0),
            vec![
                (re(4.0 * k), at(0, 2, 2)),
                (2.0 * I * g, at(1, 2, 1)),
                (-2.0 * I * g, at(1, 1, 2)),
                (-ib, at(1, 2, 0)),
                (-2.0 * ib, at(1, 3, 1)),
                (ib, at(1, 0, 2)),
                (2.0 * ib, at(1, 1, 3)),
                (re(-8.0 * k * nb), at(0, 1, 1)),
            ],
        ),
        line(
            "<R_z a†²a>",
            re(0.0),
            vec![
                (re(3.0 * k + 4.0 * gam), at(1, 2, 1)),
                (I * g, at(0, 2, 0)),
                (-2.0 * I * g, at(0, 1, 1)),
                (-ib, at(0, 2, 1)),
                (-ib, at(0, 3, 0)),
                (ib, at(0, 0, 1)),
                (2.0 * ib, at(0, 1, 2)),
                (re(-4.0 * k * nb), at(1, 1, 0)),
            ],
        ),
        line(
            "<R_z a†³a>",
            re(0.0),
            vec![
                (re(4.0 * k + 4.0 * gam), at(1, 3, 1)),
                (I * g, at(0, 3, 0)),
                (-3.0 * I * g, at(0, 2, 1)),
                (-2.0 * ib, at(0, 3, 1)),
                (-ib, at(0, 4, 0)),
                (3.0 * ib, at(0, 2, 2)),
                (3.0 * ib, at(0, 1, 1)),
                (re(-6.0 * k * nb), at(1, 2, 0)),
            ],
        ),
        line(
            "<a†a²>",
            re(0.0),
            vec![
                (re(3.0 * k), at(0, 1, 2)),
                (2.0 * I * g, at(1, 1, 1)),
                (-I * g, at(1, 0, 2)),
                (ib, at(1, 1, 2)),
                (-ib, at(1, 1, 0)),
                (-2.0 * ib, at(1, 2, 1)),
                (ib, at(1, 0, 3)),
                (re(-4.0 * k * nb), at(0, 0, 1)),
            ],
        ),
        line(
            "<a†³>",
            re(0.0),
            vec![
                (re(3.0 * k), at(0, 3, 0)),
                (-3.0 * I * g, at(1, 2, 0)),
                (3.0 * ib, at(1, 2, 1)),
                (3.0 * ib, at(1, 1, 0)),
                (-3.0 * ib, at(1, 3, 0)),
            ],
        ),
        line(
            "<a†⁴>",
            re(0.0),
            vec![
                (re(4.0 * k), at(0, 4, 0)),
                (-4.0 * I * g, at(1, 3, 0)),
                (4.0 * ib, at(1, 3, 1)),
                (6.0 * ib, at(1, 2, 0)),
                (-4.0 * ib, at(1, 4, 0)),
            ],
        ),
        line(
            "<a†³a>",
            re(0.0),
            vec![
                (re(4.0 * k), at(0, 3, 1)),
                (I * g, at(1, 3, 0)),
                (-3.0 * I * g, at(1, 2, 1)),
                (-2.0 * ib, at(1, 3, 1)),
                (-ib, at(1, 4, 0)),
                (3.0 * ib, at(1, 2, 2)),
                (3.0 * ib, at(1, 1, 1)),
                (re(-6.0 * k * nb), at(0, 2, 0)),
            ],
        ),
        line(
            "<R_z a†³>",
            re(0.0),
            vec![
                (re(3.0 * k + 4.0 * gam), at(1, 3, 0)),
                (-3.0 * I * g, at(0, 2, 0)),
                (3.0 * ib, at(0, 2, 1)),
                (3.0 * ib, at(0, 1, 0)),
                (-3.0 * ib, at(0, 3, 0)),
            ],
        ),
        line(
            "<R_z a†⁴>",
            re(0.0),
            vec![
                (re(4.0 * k + 4.0 * gam), at(1, 4, 0)),
                (-4.0 * I * g, at(0, 3, 0)),
                (4.0 * ib, at(0, 3, 1)),
                (6.0 * ib, at(0, 2, 0)),
                (-4.0 * ib, at(0, 4, 0)),
            ],
        ),
        line(
            "<R_z a†²a²>",
            re(0.0),
            vec![
                (re(4.0 * k + 4.0 * gam), at(1, 2, 2)),
                (2.0 * I * g, at(0, 2, 1)),
                (-2.0 * I * g, at(0, 1, 2)),
                (-ib, at(0, 2, 0)),
                (-2.0 * ib, at(0, 3, 1)),
                (ib, at(0, 0, 2)),
                (2.0 * ib, at(0, 1, 3)),
                (re(-8.0 * k * nb), at(1, 1, 1)),
            ],
        ),
    ]
}

/// Order-6 lines closing `<a†³a³>`.
pub fn third_order_lines(p: &ModelParams) -> Vec<PrintedLine> {
    let (g, b, k, gam, nb) = (p.g0, p.beta, p.kappa, p.gamma, p.n_bar);
    let (ig, ib) = (I * g, I * b);
    let decay = |rate: f64, s: u8| {
        if s == 1 {
            re(rate * k + 4.0 * gam)
        } else {
            re(rate * k)
        }
    };
    let mut lines = Vec::new();
    for s in [0u8, 1] {
        let t = 1 - s;
        lines.push(line(
            if s == 0 {
                "<a†³a³>"
            } else {
                "<R_z a†³a³>"
            },
            re(0.0),
            vec![
                (decay(6.0, s), at(s, 3, 3)),
                (3.0 * ig, at(t, 3, 2)),
                (-3.0 * ig, at(t, 2, 3)),
                (-3.0 * ib, at(t, 4, 2)),
                (-3.0 * ib, at(t, 3, 1)),
                (3.0 * ib, at(t, 2, 4)),
                (3.0 * ib, at(t, 1, 3)),
                (re(-18.0 * k * nb), at(s, 2, 2)),
            ],
        ));
    }
    // the remaining lines come in pairs (R_z-dressed first, then bare) in print order
    for s in [1u8, 0] {
        let t = 1 - s;
        lines.push(line(
            if s == 1 {
                "<R_z a†³a²>"
            } else {
                "<a†³a²>"
            },
            re(0.0),
            vec![
                (decay(5.0, s), at(s, 3, 2)),
                (2.0 * ig, at(t, 3, 1)),
                (-3.0 * ig, at(t, 2, 2)),
                (-ib, at(t, 3, 2)),
                (-ib, at(t, 3, 0)),
                (-2.0 * ib, at(t, 4, 1)),
                (3.0 * ib, at(t, 2, 3)),
                (3.0 * ib, at(t, 1, 2)),
                (re(-12.0 * k * nb), at(s, 2, 1)),
            ],
        ));
    }
    for s in [1u8, 0] {
        let t = 1 - s;
        lines.push(line(
            if s == 1 {
                "<R_z a†⁴a²>"
            } else {
                "<a†⁴a²>"
            },
            re(0.0),
            vec![
                (decay(6.0, s), at(s, 4, 2)),
                (2.0 * ig, at(t, 4, 1)),
                (-4.0 * ig, at(t, 3, 2)),
                (-2.0 * ib, at(t, 4, 2)),
                (-ib, at(t, 4, 0)),
                (-2.0 * ib, at(t, 5, 1)),
                (4.0 * ib, at(t, 3, 3)),
                (6.0 * ib, at(t, 2, 2)),
                (re(-16.0 * k * nb), at(s, 3, 1)),
            ],
        ));
    }
    for s in [1u8, 0] {
        let t = 1 - s;
        lines.push(line(
            if s == 1 {
                "<R_z a†⁴a>"
            } else {
                "<a†⁴a>"
            },
            re(0.0),
            vec![
                (decay(5.0, s), at(s, 4, 1)),
                (ig, at(t, 4, 0)),
                (-4.0 * ig, at(t, 3, 1)),
                (-3.0 * ib, at(t, 4, 1)),
                (-ib, at(t, 5, 0)),
                (4.0 * ib, at(t, 3, 2)),
                (6.0 * ib, at(t, 2, 1)),
                (re(-8.0 * k * nb), at(s, 3, 0)),
            ],
        ));
    }
    for s in [1u8, 0] {
        let t = 1 - s;
        lines.push(line(
            if s == 1 {
                "<R_z a†⁵a>"
            } else {
                "<a†⁵a>"
            },
            re(0.0),
            vec![
                (decay(6.0, s), at(s, 5, 1)),
                (ig, at(t, 5, 0)),
                (-5.0 * ig, at(t, 4, 1)),
                (-4.0 * ib, at(t, 5, 1)),
                (-ib, at(t, 6, 0)),
                (5.0 * ib, at(t, 4, 2)),
                (10.0 * ib, at(t, 3, 1)),
                (re(-10.0 * k * nb), at(s, 4, 0)),
            ],
        ));
    }
    for s in [1u8, 0] {
        let t = 1 - s;
        lines.push(line(
            if s == 1 { "<R_z a†⁵>" } else { "<a†⁵>" },
            re(0.0),
            vec![
                (decay(5.0, s), at(s, 5, 0)),
                (-5.0 * ig, at(t, 4, 0)),
                (-5.0 * ib, at(t, 5, 0)),
                (5.0 * ib, at(t, 4, 1)),
                (10.0 * ib, at(t, 3, 0)),
            ],
        ));
    }
    for s in [1u8, 0] {
        let t = 1 - s;
        lines.push(line(
            if s == 1 { "<R_z a†⁶>" } else { "<a†⁶>" },
            re(0.0),
            vec![
                (decay(6.0, s), at(s, 6, 0)),
                (-6.0 * ig, at(t, 5, 0)),
                (-6.0 * ib, at(t, 6, 0)),
                (6.0 * ib, at(t, 5, 1)),
                (15.0 * ib, at(t, 4, 0)),
            ],
        ));
    }
    lines
}
