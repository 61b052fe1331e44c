//! Unsigned integer types that programs can be evaluated over.
//!
//! Every value a normalized program of length `k` computes is bounded by
//! `2^(2^(k-1))`, so fixed-width types are exact up to some length and
//! [`BigUint`] takes over beyond that. [`ScalarWidth`] picks the narrowest
//! type for a given bound and the `dispatch_width!` macro instantiates generic
//! code for it.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use bnum::types::{U256, U512};
use num_bigint::BigUint;
use num_traits::{CheckedAdd, CheckedMul, ToPrimitive, Unsigned};

/// An exact unsigned integer usable as a program value.
///
/// Arithmetic that can leave the representable range goes through the
/// `Checked*` traits; a `None` there means the caller picked a type that is
/// too narrow.
pub trait SlpInt:
    Clone + Ord + Hash + Debug + Display + Send + Sync + 'static + Unsigned + CheckedAdd + CheckedMul
{
    /// Capacity in bits, `None` for arbitrary precision.
    const BITS: Option<u32>;

    fn abs_diff(&self, other: &Self) -> Self;

    fn rem_ref(&self, modulus: &Self) -> Self;

    fn div_ref(&self, divisor: &Self) -> Self;

    /// Number of significant bits; zero for zero.
    fn bit_len(&self) -> u64;

    /// Appends the minimal big-endian byte encoding (empty for zero).
    fn append_be_bytes(&self, out: &mut Vec<u8>);

    fn to_biguint(&self) -> BigUint;

    fn from_biguint(value: &BigUint) -> Option<Self>;

    fn from_u64(value: u64) -> Self;

    /// Value as `u64` when it fits.
    fn as_u64(&self) -> Option<u64>;
}

macro_rules! impl_primitive {
    ($t:ty) => {
        impl SlpInt for $t {
            const BITS: Option<u32> = Some(<$t>::BITS);

            #[inline]
            fn abs_diff(&self, other: &Self) -> Self {
                <$t>::abs_diff(*self, *other)
            }

            #[inline]
            fn rem_ref(&self, modulus: &Self) -> Self {
                *self % *modulus
            }

            #[inline]
            fn div_ref(&self, divisor: &Self) -> Self {
                *self / *divisor
            }

            #[inline]
            fn bit_len(&self) -> u64 {
                u64::from(<$t>::BITS - self.leading_zeros())
            }

            fn append_be_bytes(&self, out: &mut Vec<u8>) {
                let bytes = self.to_be_bytes();
                let skip = (self.leading_zeros() / 8) as usize;
                out.extend_from_slice(&bytes[skip..]);
            }

            fn to_biguint(&self) -> BigUint {
                BigUint::from(*self)
            }

            fn from_biguint(value: &BigUint) -> Option<Self> {
                value.try_into().ok()
            }

            #[inline]
            fn from_u64(value: u64) -> Self {
                value as $t
            }

            fn as_u64(&self) -> Option<u64> {
                u64::try_from(*self).ok()
            }
        }
    };
}

impl_primitive!(u64);
impl_primitive!(u128);

macro_rules! impl_bnum {
    ($t:ty, $limbs:expr) => {
        impl SlpInt for $t {
            const BITS: Option<u32> = Some(<$t>::BITS);

            #[inline]
            fn abs_diff(&self, other: &Self) -> Self {
                <$t>::abs_diff(*self, *other)
            }

            #[inline]
            fn rem_ref(&self, modulus: &Self) -> Self {
                *self % *modulus
            }

            #[inline]
            fn div_ref(&self, divisor: &Self) -> Self {
                *self / *divisor
            }

            #[inline]
            fn bit_len(&self) -> u64 {
                u64::from(self.bits())
            }

            fn append_be_bytes(&self, out: &mut Vec<u8>) {
                let len = self.bit_len().div_ceil(8) as usize;
                let digits = self.digits();
                for i in (0..len).rev() {
                    out.push((digits[i / 8] >> ((i % 8) * 8)) as u8);
                }
            }

            fn to_biguint(&self) -> BigUint {
                BigUint::from_slice(&u64_digits_to_u32(self.digits()))
            }

            fn from_biguint(value: &BigUint) -> Option<Self> {
                let src = value.to_u64_digits();
                if src.len() > $limbs {
                    return None;
                }
                let mut digits = [0u64; $limbs];
                digits[..src.len()].copy_from_slice(&src);
                Some(<$t>::from_digits(digits))
            }

            #[inline]
            fn from_u64(value: u64) -> Self {
                <$t>::from_digit(value)
            }

            fn as_u64(&self) -> Option<u64> {
                if self.bits() <= 64 {
                    Some(self.digits()[0])
                } else {
                    None
                }
            }
        }
    };
}

impl_bnum!(U256, 4);
impl_bnum!(U512, 8);

fn u64_digits_to_u32(digits: &[u64]) -> Vec<u32> {
    digits
        .iter()
        .flat_map(|d| [*d as u32, (*d >> 32) as u32])
        .collect()
}

impl SlpInt for BigUint {
    const BITS: Option<u32> = None;

    fn abs_diff(&self, other: &Self) -> Self {
        if self >= other {
            self - other
        } else {
            other - self
        }
    }

    fn rem_ref(&self, modulus: &Self) -> Self {
        self % modulus
    }

    fn div_ref(&self, divisor: &Self) -> Self {
        self / divisor
    }

    fn bit_len(&self) -> u64 {
        self.bits()
    }

    fn append_be_bytes(&self, out: &mut Vec<u8>) {
        if self.bits() > 0 {
            out.extend_from_slice(&self.to_bytes_be());
        }
    }

    fn to_biguint(&self) -> BigUint {
        self.clone()
    }

    fn from_biguint(value: &BigUint) -> Option<Self> {
        Some(value.clone())
    }

    fn from_u64(value: u64) -> Self {
        BigUint::from(value)
    }

    fn as_u64(&self) -> Option<u64> {
        self.to_u64()
    }
}

/// Can `T` hold integers with `bits` significant bits?
pub fn fits<T: SlpInt>(bits: u64) -> bool {
    T::BITS.is_none_or(|cap| bits <= u64::from(cap))
}

/// The concrete scalar types the search engines are instantiated for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ScalarWidth {
    U64,
    U128,
    U256,
    U512,
    Big,
}

impl ScalarWidth {
    /// Narrowest width holding integers of `bits` significant bits.
    pub fn for_bits(bits: u64) -> Self {
        match bits {
            0..=64 => ScalarWidth::U64,
            65..=128 => ScalarWidth::U128,
            129..=256 => ScalarWidth::U256,
            257..=512 => ScalarWidth::U512,
            _ => ScalarWidth::Big,
        }
    }

    /// Narrowest width holding every value of every program up to `max_len`
    /// steps, i.e. `2^(2^(max_len-1))`.
    pub fn for_program_len(max_len: usize) -> Self {
        Self::for_bits(max_value_bits(max_len))
    }
}

/// Bit length of the largest value a length-`len` program computes.
pub fn max_value_bits(len: usize) -> u64 {
    match len {
        0 => 1,
        // 2^(2^(len-1)) has 2^(len-1) + 1 bits.
        l if l <= 63 => (1u64 << (l - 1)) + 1,
        _ => u64::MAX,
    }
}

/// Runs a generic expression with `$t` bound to the scalar type selected by a
/// [`ScalarWidth`].
#[macro_export]
macro_rules! dispatch_width {
    ($width:expr, $t:ident => $body:expr) => {
        match $width {
            $crate::scalar::ScalarWidth::U64 => {
                type $t = u64;
                $body
            }
            $crate::scalar::ScalarWidth::U128 => {
                type $t = u128;
                $body
            }
            $crate::scalar::ScalarWidth::U256 => {
                type $t = $crate::U256;
                $body
            }
            $crate::scalar::ScalarWidth::U512 => {
                type $t = $crate::U512;
                $body
            }
            $crate::scalar::ScalarWidth::Big => {
                type $t = $crate::BigUint;
                $body
            }
        }
    };
}
