//! Hermitian n-qubit Pauli operators in binary symplectic form.
//!
//! A Pauli is stored as `(-1)^sign · i^{|z∧x|} · Z(z) X(x)`, so a qubit with
//! both the z and x bit set carries a `Y`. The `i^{|z∧x|}` factor makes every
//! stored operator Hermitian; `sign` is the residual ±1.

use crate::bits::{BitMatrix, BitVec, Rref};
use serde::{Deserialize, Serialize};

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct PauliString {
    pub z_mask: BitVec,
    pub x_mask: BitVec,
    pub sign: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PauliKind {
    I,
    X,
    Y,
    Z,
}

impl PauliKind {
    pub fn from_bits(z: bool, x: bool) -> PauliKind {
        match (z, x) {
            (false, false) => PauliKind::I,
            (false, true) => PauliKind::X,
            (true, true) => PauliKind::Y,
            (true, false) => PauliKind::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            PauliKind::I => (false, false),
            PauliKind::X => (false, true),
            PauliKind::Y => (true, true),
            PauliKind::Z => (true, false),
        }
    }

    pub fn anticommutes(self, other: PauliKind) -> bool {
        self != PauliKind::I && other != PauliKind::I && self != other
    }

    pub fn letter(self) -> char {
        match self {
            PauliKind::I => 'I',
            PauliKind::X => 'X',
            PauliKind::Y => 'Y',
            PauliKind::Z => 'Z',
        }
    }
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString {
            z_mask: BitVec::zeros(n),
            x_mask: BitVec::zeros(n),
            sign: false,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.z_mask.len()
    }

    pub fn kind(&self, q: usize) -> PauliKind {
        PauliKind::from_bits(self.z_mask.get(q), self.x_mask.get(q))
    }

    pub fn set_kind(&mut self, q: usize, k: PauliKind) {
        let (z, x) = k.bits();
        self.z_mask.set(q, z);
        self.x_mask.set(q, x);
    }

    pub fn weight(&self) -> usize {
        self.z_mask
            .words()
            .iter()
            .zip(self.x_mask.words())
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.z_mask.is_zero() && self.x_mask.is_zero()
    }

    /// Symplectic product: true iff the two operators anticommute.
    pub fn anticommutes_with(&self, other: &PauliString) -> bool {
        self.z_mask.dot(&other.x_mask) ^ self.x_mask.dot(&other.z_mask)
    }

    /// Phase exponent t in `i^t Z(z) X(x)`, reduced mod 4.
    fn phase_exponent(&self) -> u8 {
        ((self.z_mask.and_count(&self.x_mask) + 2 * self.sign as usize) % 4) as u8
    }

    /// Multiply two Hermitian Paulis. Panics if the product is not Hermitian
    /// (callers in this crate only multiply commuting operators, or pairs
    /// whose product is again Hermitian).
    pub fn mul(&self, other: &PauliString) -> PauliString {
        let mut z = self.z_mask.clone();
        z.xor_assign(&other.z_mask);
        let mut x = self.x_mask.clone();
        x.xor_assign(&other.x_mask);
        // i^{t1} Z(z1)X(x1) · i^{t2} Z(z2)X(x2)
        //   = i^{t1+t2} (-1)^{x1·z2} Z(z1^z2) X(x1^x2)
        let t = (self.phase_exponent() as usize
            + other.phase_exponent() as usize
            + 2 * (self.x_mask.dot(&other.z_mask) as usize))
            % 4;
        let overlap = z.and_count(&x) % 4;
        // express as (-1)^s i^{|z∧x|}: s = (t - overlap)/2 mod 2
        let diff = (t + 4 - overlap) % 4;
        assert!(diff % 2 == 0, "product is not Hermitian");
        PauliString {
            z_mask: z,
            x_mask: x,
            sign: diff == 2,
        }
    }

    /// The symplectic row (z || x) without phase.
    pub fn symplectic_row(&self) -> BitVec {
        self.z_mask.concat(&self.x_mask)
    }

    pub fn from_symplectic_row(row: &BitVec, n: usize, sign: bool) -> PauliString {
        let mut z = BitVec::zeros(n);
        let mut x = BitVec::zeros(n);
        for i in row.iter_ones() {
            if i < n {
                z.set(i, true);
            } else {
                x.set(i - n, true);
            }
        }
        PauliString { z_mask: z, x_mask: x, sign }
    }
}

impl std::fmt::Display for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.sign {
            write!(f, "-")?;
        } else {
            write!(f, "+")?;
        }
        for q in 0..self.num_qubits() {
            write!(f, "{}", self.kind(q).letter())?;
        }
        Ok(())
    }
}

/// Echelon basis of a group of signed Paulis, tracking phases so that
/// membership queries report the sign of the matching group element.
#[derive(Clone, Debug)]
pub struct SignedRref {
    n: usize,
    rref: Rref,
    /// Signed Pauli representatives whose symplectic rows form the echelon
    /// basis, aligned with `rref` pivots.
    reps: Vec<(usize, PauliString)>,
}

impl SignedRref {
    pub fn new(n: usize) -> Self {
        SignedRref {
            n,
            rref: Rref::new(2 * n),
            reps: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rref.rank()
    }

    /// Reduce `p` by the group; returns the residual Pauli (identity with a
    /// sign when `p`'s symplectic part lies in the span).
    pub fn reduce(&self, p: &PauliString) -> PauliString {
        let mut acc = p.clone();
        for (pc, rep) in &self.reps {
            let v = acc.symplectic_row();
            if v.get(*pc) {
                acc = acc.mul(rep);
            }
        }
        acc
    }

    /// Insert a signed Pauli; returns `true` if independent. When dependent,
    /// the caller can compare against `reduce` to detect a −I conflict.
    pub fn insert(&mut self, p: PauliString) -> bool {
        let red = self.reduce(&p);
        let row = red.symplectic_row();
        if row.is_zero() {
            return false;
        }
        let pivot = row.iter_ones().next().unwrap();
        let pos = self.reps.partition_point(|(c, _)| *c < pivot);
        self.reps.insert(pos, (pivot, red));
        self.rref.insert(row);
        true
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Symplectic matrix (rows are z||x) of a list of Paulis.
pub fn symplectic_matrix(paulis: &[PauliString], n: usize) -> BitMatrix {
    let mut m = BitMatrix::new(2 * n);
    for p in paulis {
        m.push_row(p.symplectic_row());
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(n: usize, q: usize, k: PauliKind) -> PauliString {
        let mut p = PauliString::identity(n);
        p.set_kind(q, k);
        p
    }

    #[test]
    fn multiplication_phases() {
        let y = single(1, 0, PauliKind::Y);
        let yy = y.mul(&y);
        assert!(yy.is_identity());
        assert!(!yy.sign, "Y·Y = +I");
    }

    #[test]
    #[should_panic]
    fn non_hermitian_product_panics() {
        let z = single(1, 0, PauliKind::Z);
        let x = single(1, 0, PauliKind::X);
        let _ = z.mul(&x);
    }

    #[test]
    fn commuting_products_accumulate_signs() {
        // (ZZ)(XX) = -(YY): check sign bookkeeping on commuting pairs
        let mut zz = PauliString::identity(2);
        zz.set_kind(0, PauliKind::Z);
        zz.set_kind(1, PauliKind::Z);
        let mut xx = PauliString::identity(2);
        xx.set_kind(0, PauliKind::X);
        xx.set_kind(1, PauliKind::X);
        assert!(!zz.anticommutes_with(&xx));
        let p = zz.mul(&xx);
        assert_eq!(p.kind(0), PauliKind::Y);
        assert_eq!(p.kind(1), PauliKind::Y);
        assert!(p.sign, "ZZ·XX = (iY)(iY) = -YY");
        // squaring gives +I
        let sq = p.mul(&p);
        assert!(sq.is_identity());
        assert!(!sq.sign);
    }

    #[test]
    fn signed_rref_detects_minus_i() {
        // Group generated by ZZ and XX contains -YY; inserting +YY must
        // reduce to -I.
        let mut zz = PauliString::identity(2);
        zz.set_kind(0, PauliKind::Z);
        zz.set_kind(1, PauliKind::Z);
        let mut xx = PauliString::identity(2);
        xx.set_kind(0, PauliKind::X);
        xx.set_kind(1, PauliKind::X);
        let mut yy = PauliString::identity(2);
        yy.set_kind(0, PauliKind::Y);
        yy.set_kind(1, PauliKind::Y);

        let mut g = SignedRref::new(2);
        assert!(g.insert(zz));
        assert!(g.insert(xx));
        let res = g.reduce(&yy);
        assert!(res.is_identity());
        assert!(res.sign, "+YY differs from the group element -YY by -I");
    }
}
