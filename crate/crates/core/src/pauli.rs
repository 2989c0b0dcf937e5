//! Pauli strings over up to 64 qubits in symplectic (x, z) bitmask form,
//! and weighted sums of them.
//!
//! Qubit `n` is bit `n` of a computational basis index. A string with masks
//! `(x, z)` denotes `⊗_n i^{x_n z_n} X^{x_n} Z^{z_n}`, so a qubit with both
//! bits set carries `Y`.

use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;

use crate::circuit::Statevector;
use crate::error::{Error, Result};
use crate::lattice::{lambda_r, HubbardModel};
use crate::sparse::SparseHermitian;

/// Coefficients with modulus below this are dropped when merging.
pub const MERGE_TOLERANCE: f64 = 1e-12;
/// Imaginary residue of an expectation value tolerated before reporting an error.
pub const IMAGINARY_TOLERANCE: f64 = 1e-9;
/// Default qubit cap for dense realization.
pub const DENSE_QUBIT_CAP: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Unit phase `i^k`.
fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    len: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(len: usize) -> Self {
        assert!(len <= 64, "at most 64 qubits");
        PauliString { len, x: 0, z: 0 }
    }

    pub fn from_masks(len: usize, x: u64, z: u64) -> Self {
        assert!(len <= 64, "at most 64 qubits");
        let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
        assert!(x & !mask == 0 && z & !mask == 0, "mask exceeds length");
        PauliString { len, x, z }
    }

    /// Single letter on `qubit`, identity elsewhere.
    pub fn single(len: usize, qubit: usize, p: Pauli) -> Self {
        let mut s = PauliString::identity(len);
        s.set(qubit, p);
        s
    }

    /// Parses letters over `IXYZ`, qubit 0 leftmost.
    pub fn parse(letters: &str) -> Option<Self> {
        let mut s = PauliString::identity(letters.chars().count());
        for (n, c) in letters.chars().enumerate() {
            s.set(n, Pauli::from_char(c)?);
        }
        Some(s)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// True for strings made of `I` and `Z` only.
    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        let b = 1u64 << qubit;
        match (self.x & b != 0, self.z & b != 0) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn set(&mut self, qubit: usize, p: Pauli) {
        assert!(qubit < self.len, "qubit {} out of range {}", qubit, self.len);
        let b = 1u64 << qubit;
        self.x &= !b;
        self.z &= !b;
        match p {
            Pauli::I => {}
            Pauli::X => self.x |= b,
            Pauli::Y => {
                self.x |= b;
                self.z |= b
            }
            Pauli::Z => self.z |= b,
        }
    }

    /// Number of `Y` letters; `P = i^{ny} X^x Z^z`.
    fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Group product `self · other = phase · result`.
    pub fn multiply(&self, other: &PauliString) -> Result<(Complex64, PauliString)> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                got: other.len,
            });
        }
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        // X^a Z^b X^c Z^d = (-1)^{b·c} X^{a+c} Z^{b+d}
        let k = self.y_count() + other.y_count() + 2 * (self.z & other.x).count_ones();
        let out = PauliString { len: self.len, x, z };
        // remove the i^{ny} carried by the result letters
        let k = (k + 4 * 64 - out.y_count()) % 4;
        Ok((i_pow(k), out))
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// `P|b⟩ = phase(b) |b ⊕ x⟩`.
    #[inline]
    pub fn action(&self, basis: u64) -> (u64, Complex64) {
        let sign = if (self.z & basis).count_ones() % 2 == 0 { 0 } else { 2 };
        (basis ^ self.x, i_pow(self.y_count() + sign))
    }

    /// `⟨ψ|P|ψ⟩` by one pass over the amplitudes.
    pub fn expectation(&self, amps: &[Complex64]) -> Complex64 {
        let base = i_pow(self.y_count());
        let mut plus = Complex64::new(0.0, 0.0);
        let mut minus = Complex64::new(0.0, 0.0);
        for (b, a) in amps.iter().enumerate() {
            let partner = amps[b ^ self.x as usize];
            let v = partner.conj() * a;
            if (self.z & b as u64).count_ones() % 2 == 0 {
                plus += v;
            } else {
                minus += v;
            }
        }
        base * (plus - minus)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in 0..self.len {
            write!(f, "{}", self.get(n).to_char())?;
        }
        Ok(())
    }
}

/// Weighted sum of Pauli strings on a fixed number of qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliHamiltonian {
    qubits: usize,
    terms: Vec<(Complex64, PauliString)>,
}

impl PauliHamiltonian {
    pub fn zero(qubits: usize) -> Self {
        PauliHamiltonian {
            qubits,
            terms: Vec::new(),
        }
    }

    /// `c · I`.
    pub fn constant(qubits: usize, c: Complex64) -> Self {
        PauliHamiltonian::from_terms(qubits, vec![(c, PauliString::identity(qubits))])
    }

    pub fn single(qubits: usize, c: Complex64, s: PauliString) -> Self {
        PauliHamiltonian::from_terms(qubits, vec![(c, s)])
    }

    /// Merges duplicate strings and drops coefficients below [`MERGE_TOLERANCE`].
    /// Terms come out ordered by `(x, z)` mask.
    pub fn from_terms(qubits: usize, terms: impl IntoIterator<Item = (Complex64, PauliString)>) -> Self {
        let mut acc: BTreeMap<(u64, u64), Complex64> = BTreeMap::new();
        for (c, s) in terms {
            assert_eq!(s.len(), qubits, "term length differs from qubit count");
            *acc.entry((s.x, s.z)).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        let terms = acc
            .into_iter()
            .filter(|(_, c)| c.norm() >= MERGE_TOLERANCE)
            .map(|((x, z), c)| (c, PauliString { len: qubits, x, z }))
            .collect();
        PauliHamiltonian { qubits, terms }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn terms(&self) -> &[(Complex64, PauliString)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the identity string.
    pub fn constant_term(&self) -> Complex64 {
        self.terms
            .iter()
            .find(|(_, s)| s.is_identity())
            .map(|(c, _)| *c)
            .unwrap_or_default()
    }

    pub fn add(&self, other: &PauliHamiltonian) -> PauliHamiltonian {
        assert_eq!(self.qubits, other.qubits);
        PauliHamiltonian::from_terms(self.qubits, self.terms.iter().chain(other.terms.iter()).copied())
    }

    pub fn scale(&self, c: Complex64) -> PauliHamiltonian {
        PauliHamiltonian::from_terms(self.qubits, self.terms.iter().map(|(a, s)| (a * c, *s)))
    }

    /// Operator product `self · other`.
    pub fn mul(&self, other: &PauliHamiltonian) -> PauliHamiltonian {
        assert_eq!(self.qubits, other.qubits);
        let mut out = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, p) in &self.terms {
            for (b, q) in &other.terms {
                let (phase, r) = p.multiply(q).expect("equal lengths");
                out.push((a * b * phase, r));
            }
        }
        PauliHamiltonian::from_terms(self.qubits, out)
    }

    pub fn adjoint(&self) -> PauliHamiltonian {
        // every Pauli string is Hermitian
        PauliHamiltonian::from_terms(self.qubits, self.terms.iter().map(|(c, s)| (c.conj(), *s)))
    }

    /// Largest coefficient imaginary part; zero for a Hermitian sum.
    pub fn max_imaginary(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.im.abs()).fold(0.0, f64::max)
    }

    /// `Σ_k c_k ⟨ψ|P_k|ψ⟩` as a complex number.
    pub fn expectation_complex(&self, state: &Statevector) -> Result<Complex64> {
        if state.amplitudes().len() != 1usize << self.qubits {
            return Err(Error::LengthMismatch {
                expected: 1usize << self.qubits,
                got: state.amplitudes().len(),
            });
        }
        let amps = state.amplitudes();
        let mut total = Complex64::new(0.0, 0.0);
        for (c, s) in &self.terms {
            total += c * s.expectation(amps);
        }
        Ok(total)
    }

    /// Real expectation value; an imaginary residue above [`IMAGINARY_TOLERANCE`] is an error.
    pub fn expectation(&self, state: &Statevector) -> Result<f64> {
        let v = self.expectation_complex(state)?;
        if v.im.abs() > IMAGINARY_TOLERANCE {
            return Err(Error::NonHermitian { residue: v.im.abs() });
        }
        Ok(v.re)
    }

    /// `H|ψ⟩` as a raw amplitude vector.
    pub fn apply(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for (c, s) in &self.terms {
            for (b, a) in amps.iter().enumerate() {
                let (b2, ph) = s.action(b as u64);
                out[b2 as usize] += c * ph * a;
            }
        }
        out
    }

    pub fn to_dense(&self) -> Result<SparseHermitian> {
        self.to_dense_capped(DENSE_QUBIT_CAP)
    }

    /// Matrix in the computational basis (qubit 0 least significant).
    pub fn to_dense_capped(&self, cap: usize) -> Result<SparseHermitian> {
        if self.qubits > cap {
            return Err(Error::QubitCap {
                qubits: self.qubits,
                cap,
            });
        }
        let dim = 1usize << self.qubits;
        let mut triplets = Vec::with_capacity(dim * self.terms.len());
        for (c, s) in &self.terms {
            for b in 0..dim {
                let (row, ph) = s.action(b as u64);
                triplets.push((row as usize, b, c * ph));
            }
        }
        Ok(SparseHermitian::from_triplets(dim, triplets))
    }

    /// One term per line: `coeff_re coeff_im letters`, full precision.
    pub fn to_text(&self) -> String {
        let k = self.constant_term();
        let body: Vec<_> = self.terms.iter().filter(|(_, s)| !s.is_identity()).collect();
        let mut out = format!(
            "# qubits {} terms {} constant {:.17e} {:.17e}\n",
            self.qubits,
            body.len(),
            k.re,
            k.im
        );
        for (c, s) in body {
            out.push_str(&format!("{:.17e} {:.17e} {}\n", c.re, c.im, s));
        }
        out
    }

    /// Inverse of [`to_text`](Self::to_text). Other `#` lines and blank lines
    /// are skipped; identity lines are accepted as part of the constant.
    pub fn from_text(text: &str) -> Result<PauliHamiltonian> {
        let mut terms = Vec::new();
        let mut qubits: Option<usize> = None;
        let mut constant = Complex64::new(0.0, 0.0);
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let err = |m: &str| Error::Parse {
                line: k + 1,
                message: m.to_string(),
            };
            if let Some(head) = line.strip_prefix('#') {
                let words: Vec<&str> = head.split_whitespace().collect();
                if words.first() == Some(&"qubits") {
                    let q: usize = words
                        .get(1)
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| err("bad qubit count"))?;
                    qubits = Some(q);
                    if let Some(p) = words.iter().position(|w| *w == "constant") {
                        let re: f64 = words
                            .get(p + 1)
                            .and_then(|v| v.parse().ok())
                            .ok_or_else(|| err("bad constant"))?;
                        let im: f64 = words
                            .get(p + 2)
                            .and_then(|v| v.parse().ok())
                            .ok_or_else(|| err("bad constant"))?;
                        constant += Complex64::new(re, im);
                    }
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let re: f64 = parts
                .next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| err("bad real part"))?;
            let im: f64 = parts
                .next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| err("bad imaginary part"))?;
            let letters = parts.next().ok_or_else(|| err("missing letters"))?;
            if parts.next().is_some() {
                return Err(err("trailing fields"));
            }
            let s = PauliString::parse(letters).ok_or_else(|| err("letters must be over IXYZ"))?;
            match qubits {
                None => qubits = Some(s.len()),
                Some(q) if q != s.len() => return Err(err("inconsistent string length")),
                _ => {}
            }
            terms.push((Complex64::new(re, im), s));
        }
        let q = qubits.ok_or(Error::Parse {
            line: 0,
            message: "no terms".into(),
        })?;
        terms.push((constant, PauliString::identity(q)));
        Ok(PauliHamiltonian::from_terms(q, terms))
    }
}

/// Term counts by Pauli species.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TermCounts {
    pub xx: usize,
    pub yy: usize,
    pub xy: usize,
    pub yx: usize,
    pub zz: usize,
    pub z: usize,
    pub constant: usize,
    pub other: usize,
}

impl TermCounts {
    /// Number of non-identity terms.
    pub fn total(&self) -> usize {
        self.xx + self.yy + self.xy + self.yx + self.zz + self.z + self.other
    }
}

/// Closed-form species counts of the mapped Hubbard Hamiltonian, assuming
/// every coupling in range is nonzero (unit edge multiplicities).
pub fn term_count_report(model: &HubbardModel) -> TermCounts {
    let nl = model.qubits();
    let n = model.colors;
    let lam_t = lambda_r(model.sites, &vec![1.0; model.hopping.len()]).expect("valid model");
    let lam_v = lambda_r(model.sites, &vec![1.0; model.density.len()]).expect("valid model");
    let hop = (nl as f64 * lam_t / 2.0).round() as usize;
    let zz = (nl as f64 * (n as f64 * (1.0 + lam_v) - 1.0) / 2.0).round() as usize;
    TermCounts {
        xx: hop,
        yy: hop,
        xy: hop,
        yx: hop,
        zz,
        z: nl,
        constant: 1,
        other: 0,
    }
}

/// Literal species counts of a Hamiltonian. Hopping species are named by
/// the letters on the two X/Y qubits in increasing qubit order; any Z string
/// between them is ignored.
pub fn species_counts(h: &PauliHamiltonian) -> TermCounts {
    let mut out = TermCounts::default();
    for (_, s) in h.terms() {
        let flips = s.x_mask();
        if s.is_identity() {
            out.constant += 1;
        } else if flips == 0 {
            match s.z_mask().count_ones() {
                1 => out.z += 1,
                2 => out.zz += 1,
                _ => out.other += 1,
            }
        } else if flips.count_ones() == 2 {
            let lo = flips.trailing_zeros() as usize;
            let hi = 63 - flips.leading_zeros() as usize;
            match (s.get(lo), s.get(hi)) {
                (Pauli::X, Pauli::X) => out.xx += 1,
                (Pauli::Y, Pauli::Y) => out.yy += 1,
                (Pauli::X, Pauli::Y) => out.xy += 1,
                (Pauli::Y, Pauli::X) => out.yx += 1,
                _ => out.other += 1,
            }
        } else {
            out.other += 1;
        }
    }
    out
}
