//! Evaluating programs, normalization, and range-isomorphism keys.

use std::fmt;

use sha2::{Digest as _, Sha256};
use thiserror::Error;

use crate::program::{Op, Program, Step};
use crate::scalar::SlpInt;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("step {step} references position {index}, but only {available} values exist")]
    InvalidIndex {
        step: usize,
        index: u32,
        available: usize,
    },
    #[error("step {step} overflows the {bits}-bit scalar type")]
    Overflow { step: usize, bits: u32 },
    #[error("evaluation is not normalized")]
    NotNormalized,
}

/// Whether a target must appear itself or any positive multiple suffices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TargetMode {
    Exact,
    Multiple,
}

impl TargetMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TargetMode::Exact => "exact",
            TargetMode::Multiple => "multiple",
        }
    }
}

impl fmt::Display for TargetMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TargetMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(TargetMode::Exact),
            "multiple" => Ok(TargetMode::Multiple),
            other => Err(format!("unknown target mode '{other}'")),
        }
    }
}

/// The values `x_1 = 1, x_2, ...` computed by a program, in position order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Evaluation<T> {
    values: Vec<T>,
}

impl<T: SlpInt> Evaluation<T> {
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// Value at a 1-based position.
    pub fn value(&self, position: usize) -> Option<&T> {
        position.checked_sub(1).and_then(|i| self.values.get(i))
    }

    pub fn last(&self) -> &T {
        self.values.last().expect("an evaluation always holds x_1")
    }

    pub fn max(&self) -> &T {
        self.values.iter().max().expect("an evaluation always holds x_1")
    }

    /// All values pairwise distinct and strictly positive.
    pub fn is_normalized(&self) -> bool {
        if self.values.iter().any(|v| v.is_zero()) {
            return false;
        }
        let mut sorted: Vec<&T> = self.values.iter().collect();
        sorted.sort_unstable();
        sorted.windows(2).all(|w| w[0] != w[1])
    }

    /// Does some value equal `target` (exact) or is some value a positive
    /// multiple of it?
    pub fn computes_target(&self, target: &T, mode: TargetMode) -> bool {
        self.values.iter().any(|v| hits_target(v, target, mode))
    }

    pub fn canonical_key(&self) -> Result<CanonicalKey<T>, EvalError> {
        canonical_key(self)
    }
}

/// Does a single value satisfy the target?
pub fn hits_target<T: SlpInt>(value: &T, target: &T, mode: TargetMode) -> bool {
    match mode {
        TargetMode::Exact => value == target,
        TargetMode::Multiple => !value.is_zero() && value.rem_ref(target).is_zero(),
    }
}

#[inline]
pub(crate) fn apply<T: SlpInt>(op: Op, a: &T, b: &T) -> Option<T> {
    match op {
        Op::Add => a.checked_add(b),
        Op::Sub => Some(a.abs_diff(b)),
        Op::Mul => a.checked_mul(b),
    }
}

/// Runs `program` from `x_1 = 1`. `-` yields the absolute difference.
pub fn evaluate<T: SlpInt>(program: &Program) -> Result<Evaluation<T>, EvalError> {
    let mut values = Vec::with_capacity(program.len() + 1);
    values.push(T::one());
    for (t, step) in program.steps().iter().enumerate() {
        let v = eval_step(&values, t, step)?;
        values.push(v);
    }
    Ok(Evaluation { values })
}

pub(crate) fn eval_step<T: SlpInt>(values: &[T], t: usize, step: &Step) -> Result<T, EvalError> {
    let fetch = |index: u32| {
        values
            .get((index as usize).wrapping_sub(1))
            .ok_or(EvalError::InvalidIndex {
                step: t + 1,
                index,
                available: values.len(),
            })
    };
    let a = fetch(step.a)?;
    let b = fetch(step.b)?;
    apply(step.op, a, b).ok_or(EvalError::Overflow {
        step: t + 1,
        bits: T::BITS.unwrap_or(0),
    })
}

/// Evaluates packed `(a, b, op)` triples into `out`, which is cleared first.
///
/// Used on the hot paths; packed programs from a frontier are already
/// validated, so indices are trusted here.
pub(crate) fn evaluate_packed_into<T: SlpInt>(packed: &[u8], out: &mut Vec<T>) -> Result<(), EvalError> {
    out.clear();
    out.push(T::one());
    for (t, chunk) in packed.chunks_exact(3).enumerate() {
        let a = &out[chunk[0] as usize - 1];
        let b = &out[chunk[1] as usize - 1];
        let op = Op::from_code(chunk[2]).expect("validated op code");
        let v = apply(op, a, b).ok_or(EvalError::Overflow {
            step: t + 1,
            bits: T::BITS.unwrap_or(0),
        })?;
        out.push(v);
    }
    Ok(())
}

/// Free-function form of [`Evaluation::is_normalized`].
pub fn is_normalized<T: SlpInt>(evaluation: &Evaluation<T>) -> bool {
    evaluation.is_normalized()
}

/// Free-function form of [`Evaluation::computes_target`].
pub fn computes_target<T: SlpInt>(evaluation: &Evaluation<T>, target: &T, mode: TargetMode) -> bool {
    evaluation.computes_target(target, mode)
}

/// Truncated SHA-256 of a value set's canonical byte encoding.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Digest(pub [u8; 16]);

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

/// Identifies a range-isomorphism class: the sorted value set plus its digest.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalKey<T> {
    pub sorted_values: Vec<T>,
    pub digest: Digest,
}

pub fn canonical_key<T: SlpInt>(evaluation: &Evaluation<T>) -> Result<CanonicalKey<T>, EvalError> {
    if !evaluation.is_normalized() {
        return Err(EvalError::NotNormalized);
    }
    let mut sorted_values = evaluation.values.clone();
    sorted_values.sort_unstable();
    let digest = digest_sorted(&sorted_values);
    Ok(CanonicalKey {
        sorted_values,
        digest,
    })
}

/// Digest of an ascending value sequence.
///
/// Layout: value count as u32 big-endian, then per value its byte length as
/// u16 big-endian followed by the minimal big-endian bytes. The result does
/// not depend on the scalar type.
pub fn digest_sorted<T: SlpInt>(sorted: &[T]) -> Digest {
    let mut enc = KeyEncoder::default();
    enc.begin(sorted.len());
    for v in sorted {
        enc.push_value(v);
    }
    enc.finish()
}

/// Incremental builder for the canonical key encoding.
#[derive(Default)]
pub(crate) struct KeyEncoder {
    hasher: Sha256,
    scratch: Vec<u8>,
}

impl KeyEncoder {
    pub(crate) fn begin(&mut self, count: usize) {
        self.hasher = Sha256::new();
        self.hasher.update((count as u32).to_be_bytes());
    }

    pub(crate) fn push_value<T: SlpInt>(&mut self, v: &T) {
        self.scratch.clear();
        v.append_be_bytes(&mut self.scratch);
        self.hasher.update((self.scratch.len() as u16).to_be_bytes());
        self.hasher.update(&self.scratch);
    }

    /// Appends an already encoded `(len, bytes)` segment run.
    pub(crate) fn push_encoded(&mut self, encoded: &[u8]) {
        self.hasher.update(encoded);
    }

    pub(crate) fn finish(&mut self) -> Digest {
        let full = std::mem::take(&mut self.hasher).finalize();
        let mut out = [0u8; 16];
        out.copy_from_slice(&full[..16]);
        Digest(out)
    }
}

/// Length-prefixed encoding of one value, as hashed by [`digest_sorted`].
pub(crate) fn encode_value<T: SlpInt>(v: &T, out: &mut Vec<u8>) {
    let start = out.len();
    out.extend_from_slice(&[0, 0]);
    v.append_be_bytes(out);
    let len = (out.len() - start - 2) as u16;
    out[start..start + 2].copy_from_slice(&len.to_be_bytes());
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{BigUint, U256};

    fn eval(text: &str) -> Evaluation<u64> {
        evaluate(&Program::parse(text).unwrap()).unwrap()
    }

    #[test]
    fn evaluates_table_programs() {
        assert_eq!(eval("{1,1,+},{1,2,+},{2,3,*}").values(), &[1, 2, 3, 6]);
        assert_eq!(eval("").values(), &[1]);
        assert_eq!(
            eval("{1,1,+},{2,2,+},{3,3,*},{4,1,-},{4,5,*}").values(),
            &[1, 2, 4, 16, 15, 240]
        );
    }

    #[test]
    fn subtraction_is_absolute() {
        assert_eq!(eval("{1,1,+},{1,2,-}").values(), &[1, 2, 1]);
        assert_eq!(eval("{1,1,+},{2,1,-}").values(), &[1, 2, 1]);
    }

    #[test]
    fn normalization() {
        assert!(eval("{1,1,+},{1,2,+},{2,3,*}").is_normalized());
        assert!(!eval("{1,1,+},{2,1,-}").is_normalized());
        assert!(!eval("{1,1,-}").is_normalized());
    }

    #[test]
    fn overflow_is_reported() {
        let p = Program::parse("{1,1,+},{2,2,*},{3,3,*},{4,4,*},{5,5,*},{6,6,*},{7,7,*}").unwrap();
        assert_eq!(
            evaluate::<u64>(&p).unwrap_err(),
            EvalError::Overflow { step: 7, bits: 64 }
        );
        let big = evaluate::<BigUint>(&p).unwrap();
        assert_eq!(big.last(), &(BigUint::from(1u8) << 64));
        let wide = evaluate::<U256>(&p).unwrap();
        assert_eq!(wide.last().to_biguint(), BigUint::from(1u8) << 64);
        let p = p.with_step(Step::new(8, 8, Op::Mul)).unwrap();
        assert_eq!(evaluate::<U256>(&p).unwrap().last().to_biguint(), BigUint::from(1u8) << 128);
        assert!(evaluate::<u128>(&p).is_err());
    }

    #[test]
    fn range_isomorphic_programs_share_keys() {
        let a = eval("{1,1,+},{2,2,+}").canonical_key().unwrap();
        let b = eval("{1,1,+},{2,2,*}").canonical_key().unwrap();
        assert_eq!(a, b);
        let c = eval("{1,1,+},{1,2,+}").canonical_key().unwrap();
        assert_eq!(c.sorted_values, vec![1, 2, 3]);
        assert_ne!(a.digest, c.digest);
        assert_eq!(
            eval("{1,1,+},{2,1,-}").canonical_key().unwrap_err(),
            EvalError::NotNormalized
        );
    }

    #[test]
    fn digest_is_width_independent() {
        let p = Program::parse("{1,1,+},{2,2,*},{3,3,*},{4,1,-}").unwrap();
        let d64 = evaluate::<u64>(&p).unwrap().canonical_key().unwrap().digest;
        let d256 = evaluate::<U256>(&p).unwrap().canonical_key().unwrap().digest;
        let dbig = evaluate::<BigUint>(&p).unwrap().canonical_key().unwrap().digest;
        assert_eq!(d64, d256);
        assert_eq!(d64, dbig);
    }

    #[test]
    fn digest_matches_encoding_layout() {
        // {1,2}: count=2, then (len=1, 0x01), (len=1, 0x02).
        let bytes = [0, 0, 0, 2, 0, 1, 1, 0, 1, 2];
        let full = Sha256::digest(bytes);
        assert_eq!(digest_sorted(&[1u64, 2]).0, full[..16]);
        let mut enc = Vec::new();
        encode_value(&258u64, &mut enc);
        assert_eq!(enc, vec![0, 2, 1, 2]);
    }

    #[test]
    fn target_checks() {
        let e = eval("{1,1,+},{2,2,+},{3,3,*},{4,1,-},{4,5,*}");
        assert!(e.computes_target(&120, TargetMode::Multiple));
        assert!(!e.computes_target(&120, TargetMode::Exact));
        assert!(eval("{1,1,+},{1,2,+},{2,3,*}").computes_target(&6, TargetMode::Exact));
        assert!(!eval("{1,1,+},{2,2,+}").computes_target(&3, TargetMode::Multiple));
        assert!(eval("").computes_target(&1, TargetMode::Exact));
    }
}
