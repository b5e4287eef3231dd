//! Published closed forms for the low orders, kept verbatim as reference
//! values. The engine never consumes these; verification compares against
//! them and reports any divergence.

use crate::rational::{int, Rational};
use crate::trig::TrigPoly;

fn two_m(m: &Rational) -> Rational {
    int(2) * m
}

fn pow(x: &Rational, k: i32) -> Rational {
    num_traits::Pow::pow(x.clone(), k)
}

pub fn e01(m: &Rational) -> Rational {
    -(int(1) / (two_m(m) + int(2)))
}

/// As printed: `−(4m² + 10m − 5)/(2m+2)³`.
pub fn e02_published(m: &Rational) -> Rational {
    -((int(4) * m * m + int(10) * m - int(5)) / pow(&(two_m(m) + int(2)), 3))
}

/// The value coefficient matching produces: `−(4m² + 10m + 5)/(2m+2)³`.
pub fn e02_matched(m: &Rational) -> Rational {
    -((int(4) * m * m + int(10) * m + int(5)) / pow(&(two_m(m) + int(2)), 3))
}

pub fn e03(m: &Rational) -> Rational {
    let t = two_m(m);
    -(int(4) * pow(&(&t + int(1)), 2) * (&t + int(3)) / (pow(&(&t + int(2)), 5) * (&t + int(4))))
}

pub fn e04(m: &Rational) -> Rational {
    let t = two_m(m);
    let q = int(2) * m * m + int(9) * m + int(2);
    -(int(2) * pow(&(&t + int(1)), 2) * (&t + int(3)) * q / (pow(&(&t + int(2)), 7) * (&t + int(4))))
}

/// `W₁ … W₄` coefficient lists (n outside 1..=4 gives `None`).
pub fn w_published(n: usize, m: &Rational) -> Option<TrigPoly> {
    let t = two_m(m);
    let t1 = &t + int(1);
    let t2 = &t + int(2);
    let t4 = &t + int(4);
    let q = int(2) * m * m + int(9) * m + int(2);
    let p = match n {
        1 => TrigPoly::from_parts([], [(1, -(int(1) / &t2))]),
        2 => TrigPoly::from_parts(
            [(1, &t1 / pow(&t2, 2))],
            [(1, -(&t1 / pow(&t2, 3)))],
        ),
        3 => TrigPoly::from_parts(
            [(1, -(int(4) * &t1 / (pow(&t2, 4) * &t4)))],
            [
                (1, int(4) * &t1 / (pow(&t2, 5) * &t4)),
                (2, -(int(2) * &t1 / (pow(&t2, 3) * &t4))),
            ],
        ),
        4 => TrigPoly::from_parts(
            [
                (1, -(int(2) * &t1 * &q / (pow(&t2, 6) * &t4))),
                (2, int(2) * m * &t1 / (pow(&t2, 4) * &t4)),
            ],
            [
                (1, int(2) * &t1 * &q / (pow(&t2, 7) * &t4)),
                (2, -(int(6) * m * &t1 / (pow(&t2, 5) * &t4))),
            ],
        ),
        _ => return None,
    };
    Some(p)
}

/// Shape-invariance closed forms at n = 0, 1, 2 as functions of the base
/// parameter set `(A₀₀, B₀₀, B₁₁, A₂₁, B₂₁)`.
#[derive(Clone, Debug)]
pub struct FlowParams {
    pub a00: Rational,
    pub b00: Rational,
    pub b11: Rational,
    pub a21: Rational,
    pub b21: Rational,
}

impl FlowParams {
    fn k(&self, m: &Rational) -> Rational {
        (two_m(m) + int(1)) * &self.a00
    }

    pub fn c00(&self, m: &Rational) -> Rational {
        &self.a00 + int(2) / (two_m(m) + int(1))
    }

    pub fn r0(&self, m: &Rational) -> Rational {
        self.k(m) + int(1)
    }

    pub fn d11(&self, m: &Rational) -> Rational {
        let k = self.k(m);
        (&k - int(1)) / (&k + int(3)) * &self.b11
    }

    /// As printed: `−4 B₀₀ B₁₁ / ((2m+1)A₀₀ + 3)`.
    pub fn r1_published(&self, m: &Rational) -> Rational {
        -(int(4) * &self.b00 * &self.b11 / (self.k(m) + int(3)))
    }

    pub fn d21(&self, m: &Rational) -> Rational {
        let k = self.k(m);
        let k3 = &k + int(3);
        let k4 = &k + int(4);
        (&k - int(1)) / &k3 * &self.b21 + int(6) * &self.b00 * &self.b21 / (&k3 * &k4)
            - int(8) * (&k + int(1)) * &self.b00 * pow(&self.b11, 2) / (pow(&k3, 3) * &k4)
    }

    pub fn c21(&self, m: &Rational) -> Rational {
        let k = self.k(m);
        let k3 = &k + int(3);
        let k4 = &k + int(4);
        int(8) * (&k + int(1)) * pow(&self.b11, 2) / (pow(&k3, 3) * &k4)
            + (&k - int(2)) / &k4 * &self.a21
    }

    pub fn r2_published(&self, m: &Rational) -> Rational {
        let k = self.k(m);
        let k3 = &k + int(3);
        let k4 = &k + int(4);
        let b00_sq = pow(&self.b00, 2);
        let big_a = (int(8) * &b00_sq - int(8) * (&k - int(1)) * &k3) / (pow(&k3, 3) * &k4);
        let big_b = (int(6) * &b00_sq - int(2) * (&k - int(1)) * &k3) / (&k3 * &k4);
        -(int(4) * &self.b00 * &self.b21 / &k3) + big_a * pow(&self.b11, 2) + big_b * &self.a21
    }
}
