//! Dense cubic arrays with every axis of the same length.
//!
//! Component layouts are documented at each use site; the types only fix the
//! storage order (last index fastest).

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use nalgebra::{DMatrix, DVector};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

macro_rules! cubic_tensor {
    ($name:ident, $rank:literal, ($($ix:ident),+)) => {
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name {
            n: usize,
            data: Vec<f64>,
        }

        impl $name {
            pub fn zeros(n: usize) -> Self {
                Self { n, data: vec![0.0; n.pow($rank)] }
            }

            pub fn from_fn(n: usize, mut f: impl FnMut($(cubic_tensor!(@usize $ix)),+) -> f64) -> Self {
                let mut t = Self::zeros(n);
                let mut k = 0;
                cubic_tensor!(@nest n, t, f, k, [$($ix),+], [$($ix),+]);
                t
            }

            pub fn dim(&self) -> usize {
                self.n
            }

            pub fn as_slice(&self) -> &[f64] {
                &self.data
            }

            pub fn max_abs(&self) -> f64 {
                self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
            }

            pub fn max_abs_diff(&self, other: &Self) -> f64 {
                assert_eq!(self.n, other.n, "tensor dimensions differ");
                self.data
                    .iter()
                    .zip(&other.data)
                    .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
            }

            pub fn scaled(mut self, s: f64) -> Self {
                self.data.iter_mut().for_each(|x| *x *= s);
                self
            }

            #[inline]
            fn offset(&self, ($($ix),+): ($(cubic_tensor!(@usize $ix)),+)) -> usize {
                let mut o = 0;
                $( debug_assert!($ix < self.n); o = o * self.n + $ix; )+
                o
            }
        }

        impl Index<($(cubic_tensor!(@usize $ix)),+)> for $name {
            type Output = f64;
            #[inline]
            fn index(&self, ix: ($(cubic_tensor!(@usize $ix)),+)) -> &f64 {
                &self.data[self.offset(ix)]
            }
        }

        impl IndexMut<($(cubic_tensor!(@usize $ix)),+)> for $name {
            #[inline]
            fn index_mut(&mut self, ix: ($(cubic_tensor!(@usize $ix)),+)) -> &mut f64 {
                let o = self.offset(ix);
                &mut self.data[o]
            }
        }
    };
    (@usize $ix:ident) => { usize };
    (@nest $n:ident, $t:ident, $f:ident, $k:ident, [$head:ident $(, $rest:ident)*], [$($all:ident),+]) => {
        for $head in 0..$n {
            cubic_tensor!(@nest $n, $t, $f, $k, [$($rest),*], [$($all),+]);
        }
    };
    (@nest $n:ident, $t:ident, $f:ident, $k:ident, [], [$($all:ident),+]) => {
        $t.data[$k] = $f($($all),+);
        $k += 1;
    };
}

cubic_tensor!(Tensor3, 3, (a, b, c));
cubic_tensor!(Tensor4, 4, (a, b, c, d));

pub(crate) fn kron(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}
