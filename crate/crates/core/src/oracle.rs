//! Dense state-vector oracle. Deliberately slow and direct: logical overlaps
//! by explicit `2^n` vectors, Clifford gates, Pauli products and postselected
//! measurements.
//!
//! Qubit `q` (0-based in the API, 1-based in text formats) is index bit
//! `n - 1 - q`, so qubit 1 is the most significant bit, as in codeword
//! printing.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::bloch::{BlochVector, SingleQubitDensity};
use crate::codes::{Bitword, CodewordSet};
use crate::distill::OverlapTriple;
use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 12;
pub const ZERO_PROBABILITY: f64 = 1e-14;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn i_pow(k: u8) -> Complex64 {
    match k % 4 {
        0 => c(1.0),
        1 => I,
        2 => c(-1.0),
        _ => -I,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    n: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    pub fn new(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::Guard(format!("dense states support at most {MAX_QUBITS} qubits, got {n}")));
        }
        if amps.len() != 1 << n {
            return Err(Error::Parse(format!("expected {} amplitudes for n={n}, got {}", 1usize << n, amps.len())));
        }
        Ok(Self { n, amps })
    }

    /// Normalizing constructor.
    pub fn normalized(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        let mut s = Self::new(n, amps)?;
        s.normalize()?;
        Ok(s)
    }

    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Self {
        assert!(n <= MAX_QUBITS && index < 1 << n);
        let mut amps = vec![c(0.0); 1 << n];
        amps[index] = c(1.0);
        Self { n, amps }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let nrm = self.norm_sqr().sqrt();
        if nrm <= ZERO_PROBABILITY {
            return Err(Error::ZeroProbability);
        }
        for a in &mut self.amps {
            *a /= nrm;
        }
        Ok(())
    }

    pub fn inner(&self, other: &DenseState) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn fidelity(&self, other: &DenseState) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn tensor(&self, other: &DenseState) -> Result<DenseState> {
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        DenseState::new(self.n + other.n, amps)
    }

    pub fn bit(&self, q: usize) -> usize {
        1 << (self.n - 1 - q)
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q < self.n {
            Ok(())
        } else {
            Err(Error::QubitIndex { index: q, n: self.n })
        }
    }

    /// Applies a 2x2 matrix to qubit `q` in place.
    pub fn apply_single(&mut self, q: usize, m: [[Complex64; 2]; 2]) -> Result<()> {
        self.check_qubit(q)?;
        let b = self.bit(q);
        for i in 0..self.amps.len() {
            if i & b == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | b]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | b] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        Ok(())
    }

    /// Reduced single-qubit state of qubit `q`.
    pub fn reduced_density(&self, q: usize) -> Result<SingleQubitDensity> {
        self.check_qubit(q)?;
        let b = self.bit(q);
        let (mut r00, mut r11, mut r01) = (0.0, 0.0, c(0.0));
        for i in 0..self.amps.len() {
            if i & b == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | b]);
                r00 += a0.norm_sqr();
                r11 += a1.norm_sqr();
                r01 += a0 * a1.conj();
            }
        }
        let tr = r00 + r11;
        Ok(SingleQubitDensity { rho00: r00 / tr, rho11: r11 / tr, rho01: r01 / tr, rho10: r01.conj() / tr })
    }

    pub fn single_qubit_bloch(&self, q: usize) -> Result<BlochVector> {
        Ok(self.reduced_density(q)?.to_bloch())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty state file".into()))?;
        let n: usize = header
            .strip_prefix("n=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad header {header:?}, expected n=<int>")))?;
        if n > MAX_QUBITS {
            return Err(Error::Guard(format!("dense states support at most {MAX_QUBITS} qubits, got {n}")));
        }
        let mut amps = Vec::with_capacity(1 << n);
        for line in lines {
            let mut it = line.split_whitespace();
            let mut num = |name: &str| -> Result<f64> {
                it.next()
                    .ok_or_else(|| Error::Parse(format!("missing {name} in {line:?}")))?
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad number in {line:?}")))
            };
            let re = num("re")?;
            let im = num("im")?;
            amps.push(Complex64::new(re, im));
        }
        DenseState::normalized(n, amps)
    }

    pub fn format(&self) -> String {
        let mut out = format!("n={}\n", self.n);
        for a in &self.amps {
            out.push_str(&format!("{:.17e} {:.17e}\n", a.re, a.im));
        }
        out
    }
}

/// `i^phase` times a tensor product of single-qubit Paulis, with letter
/// `(x, z) = (1, 1)` denoting `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliProduct {
    pub x: Bitword,
    pub z: Bitword,
    pub phase: u8,
}

impl PauliProduct {
    pub fn identity(n: usize) -> Self {
        Self { x: Bitword::zero(n), z: Bitword::zero(n), phase: 0 }
    }

    pub fn from_masks(n: usize, x: u32, z: u32, phase: u8) -> Result<Self> {
        Ok(Self { x: Bitword::new(x, n)?, z: Bitword::new(z, n)?, phase: phase % 4 })
    }

    /// Single-qubit letter (`'X'`, `'Y'`, `'Z'`) on qubit `q`.
    pub fn single(n: usize, q: usize, letter: char) -> Result<Self> {
        if q >= n {
            return Err(Error::QubitIndex { index: q, n });
        }
        let m = Bitword::position_mask(n, q + 1);
        let (x, z) = match letter {
            'X' => (m, 0),
            'Y' => (m, m),
            'Z' => (0, m),
            _ => return Err(Error::Parse(format!("unknown Pauli letter {letter:?}"))),
        };
        Self::from_masks(n, x, z, 0)
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn letter(&self, q: usize) -> char {
        match (self.x.get(q + 1), self.z.get(q + 1)) {
            (false, false) => 'I',
            (true, false) => 'X',
            (true, true) => 'Y',
            (false, true) => 'Z',
        }
    }

    pub fn set_letter(&mut self, q: usize, xb: bool, zb: bool) {
        let n = self.n();
        let m = Bitword::position_mask(n, q + 1);
        let upd = |w: Bitword, on: bool| Bitword::new(if on { w.bits() | m } else { w.bits() & !m }, n).unwrap();
        self.x = upd(self.x, xb);
        self.z = upd(self.z, zb);
    }

    pub fn support(&self) -> u32 {
        self.x.bits() | self.z.bits()
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.support() == 0
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_multiple_of(2)
    }

    pub fn sign(&self) -> f64 {
        match self.phase {
            0 => 1.0,
            2 => -1.0,
            _ => f64::NAN,
        }
    }

    pub fn negate(&self) -> Self {
        Self { phase: (self.phase + 2) % 4, ..*self }
    }

    pub fn unsigned(&self) -> Self {
        Self { phase: 0, ..*self }
    }

    pub fn commutes(&self, other: &PauliProduct) -> bool {
        let s = (self.x.bits() & other.z.bits()).count_ones() + (self.z.bits() & other.x.bits()).count_ones();
        s.is_multiple_of(2)
    }

    /// Operator product `self * other`.
    pub fn mul(&self, other: &PauliProduct) -> PauliProduct {
        // exponent of i picked up by each single-qubit product
        fn g(x1: bool, z1: bool, x2: bool, z2: bool) -> i32 {
            let (x2, z2) = (x2 as i32, z2 as i32);
            match (x1, z1) {
                (false, false) => 0,
                (true, true) => z2 - x2,
                (true, false) => z2 * (2 * x2 - 1),
                (false, true) => x2 * (1 - 2 * z2),
            }
        }
        let n = self.n();
        let mut k = self.phase as i32 + other.phase as i32;
        for q in 1..=n {
            k += g(self.x.get(q), self.z.get(q), other.x.get(q), other.z.get(q));
        }
        PauliProduct { x: self.x.xor(&other.x), z: self.z.xor(&other.z), phase: k.rem_euclid(4) as u8 }
    }

    /// `U P U^dagger` for a Clifford gate `U`.
    pub fn conjugate(&self, gate: &Gate) -> PauliProduct {
        let mut p = *self;
        let flip = |p: &mut PauliProduct, on: bool| {
            if on {
                p.phase = (p.phase + 2) % 4;
            }
        };
        let xz = |p: &PauliProduct, q: usize| (p.x.get(q + 1), p.z.get(q + 1));
        match *gate {
            Gate::H(a) => {
                let (x, z) = xz(&p, a);
                flip(&mut p, x && z);
                p.set_letter(a, z, x);
            }
            Gate::S(a) => {
                let (x, z) = xz(&p, a);
                flip(&mut p, x && z);
                p.set_letter(a, x, z ^ x);
            }
            Gate::Sdg(a) => {
                let (x, z) = xz(&p, a);
                let z = z ^ x;
                p.set_letter(a, x, z);
                flip(&mut p, x && z);
            }
            Gate::X(a) => {
                let (_, z) = xz(&p, a);
                flip(&mut p, z);
            }
            Gate::Y(a) => {
                let (x, z) = xz(&p, a);
                flip(&mut p, x ^ z);
            }
            Gate::Z(a) => {
                let (x, _) = xz(&p, a);
                flip(&mut p, x);
            }
            Gate::Cnot(ctl, tgt) => {
                let (xc, zc) = xz(&p, ctl);
                let (xt, zt) = xz(&p, tgt);
                flip(&mut p, xc && zt && !(xt ^ zc));
                p.set_letter(tgt, xt ^ xc, zt);
                p.set_letter(ctl, xc, zc ^ zt);
            }
            Gate::Cz(ctl, tgt) => {
                for g in [Gate::H(tgt), Gate::Cnot(ctl, tgt), Gate::H(tgt)] {
                    p = p.conjugate(&g);
                }
            }
            Gate::Cy(ctl, tgt) => {
                for g in [Gate::Sdg(tgt), Gate::Cnot(ctl, tgt), Gate::S(tgt)] {
                    p = p.conjugate(&g);
                }
            }
            Gate::Swap(a, b) => {
                let (xa, za) = xz(&p, a);
                let (xb, zb) = xz(&p, b);
                p.set_letter(a, xb, zb);
                p.set_letter(b, xa, za);
            }
        }
        p
    }

    /// `U^dagger P U`.
    pub fn conjugate_inverse(&self, gate: &Gate) -> PauliProduct {
        self.conjugate(&gate.inverse())
    }

    /// `P |psi>` without normalization.
    pub fn apply(&self, psi: &DenseState) -> Result<Vec<Complex64>> {
        if self.n() != psi.n() {
            return Err(Error::QubitIndex { index: self.n(), n: psi.n() });
        }
        let (x, z) = (self.x.bits() as usize, self.z.bits() as usize);
        let ys = (self.x.bits() & self.z.bits()).count_ones() as u8;
        let pre = i_pow(self.phase + ys);
        let mut out = vec![c(0.0); psi.amps.len()];
        for (i, a) in psi.amps.iter().enumerate() {
            let sign = if (i & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            out[i ^ x] = pre * sign * a;
        }
        Ok(out)
    }

    pub fn expectation(&self, psi: &DenseState) -> Result<Complex64> {
        let v = self.apply(psi)?;
        Ok(psi.amps.iter().zip(&v).map(|(a, b)| a.conj() * b).sum())
    }
}

impl fmt::Display for PauliProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["", "i", "-", "-i"][self.phase as usize % 4])?;
        for q in 0..self.n() {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

impl FromStr for PauliProduct {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, body) = if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix("+i") {
            (1, r)
        } else if let Some(r) = s.strip_prefix('i') {
            (1, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0, r)
        } else {
            (0, s)
        };
        let n = body.chars().count();
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::Parse(format!("bad Pauli string {s:?}")));
        }
        let mut p = PauliProduct::identity(n);
        p.phase = phase;
        for (q, ch) in body.chars().enumerate() {
            match ch {
                'I' => {}
                'X' => p.set_letter(q, true, false),
                'Y' => p.set_letter(q, true, true),
                'Z' => p.set_letter(q, false, true),
                _ => return Err(Error::Parse(format!("bad Pauli letter {ch:?} in {s:?}"))),
            }
        }
        Ok(p)
    }
}

/// Named Clifford gates on at most two qubits (0-based indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cnot(usize, usize),
    Cz(usize, usize),
    Cy(usize, usize),
    Swap(usize, usize),
}

impl Gate {
    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::S(a) => Gate::Sdg(a),
            Gate::Sdg(a) => Gate::S(a),
            g => g,
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(a) | Gate::S(a) | Gate::Sdg(a) | Gate::X(a) | Gate::Y(a) | Gate::Z(a) => vec![a],
            Gate::Cnot(a, b) | Gate::Cz(a, b) | Gate::Cy(a, b) | Gate::Swap(a, b) => vec![a, b],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::H(_) => "H",
            Gate::S(_) => "S",
            Gate::Sdg(_) => "SDG",
            Gate::X(_) => "X",
            Gate::Y(_) => "Y",
            Gate::Z(_) => "Z",
            Gate::Cnot(..) => "CNOT",
            Gate::Cz(..) => "CZ",
            Gate::Cy(..) => "CY",
            Gate::Swap(..) => "SWAP",
        }
    }

    /// Parses `NAME q1 [q2]` with 1-based qubit indices.
    pub fn parse(name: &str, qubits: &[usize]) -> Result<Gate> {
        let q0 = |i: usize| -> Result<usize> {
            qubits
                .get(i)
                .filter(|&&q| q >= 1)
                .map(|q| q - 1)
                .ok_or_else(|| Error::Parse(format!("gate {name} needs 1-based qubit indices")))
        };
        let arity = match name.to_ascii_uppercase().as_str() {
            "H" | "S" | "SDG" | "X" | "Y" | "Z" => 1,
            "CNOT" | "CX" | "CZ" | "CY" | "SWAP" => 2,
            _ => return Err(Error::Parse(format!("unknown gate {name:?}"))),
        };
        if qubits.len() != arity {
            return Err(Error::Parse(format!("gate {name} takes {arity} qubit(s)")));
        }
        Ok(match name.to_ascii_uppercase().as_str() {
            "H" => Gate::H(q0(0)?),
            "S" => Gate::S(q0(0)?),
            "SDG" => Gate::Sdg(q0(0)?),
            "X" => Gate::X(q0(0)?),
            "Y" => Gate::Y(q0(0)?),
            "Z" => Gate::Z(q0(0)?),
            "CNOT" | "CX" => Gate::Cnot(q0(0)?, q0(1)?),
            "CZ" => Gate::Cz(q0(0)?, q0(1)?),
            "CY" => Gate::Cy(q0(0)?, q0(1)?),
            _ => Gate::Swap(q0(0)?, q0(1)?),
        })
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())?;
        for q in self.qubits() {
            write!(f, " {}", q + 1)?;
        }
        Ok(())
    }
}

fn matrix(g: &Gate) -> Option<[[Complex64; 2]; 2]> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = c(0.0);
    let o = c(1.0);
    Some(match g {
        Gate::H(_) => [[c(h), c(h)], [c(h), c(-h)]],
        Gate::S(_) => [[o, z], [z, I]],
        Gate::Sdg(_) => [[o, z], [z, -I]],
        Gate::X(_) => [[z, o], [o, z]],
        Gate::Y(_) => [[z, -I], [I, z]],
        Gate::Z(_) => [[o, z], [z, c(-1.0)]],
        _ => return None,
    })
}

pub fn apply_clifford(state: &DenseState, gate: &Gate) -> Result<DenseState> {
    let mut out = state.clone();
    apply_clifford_in_place(&mut out, gate)?;
    Ok(out)
}

pub fn apply_clifford_in_place(state: &mut DenseState, gate: &Gate) -> Result<()> {
    for q in gate.qubits() {
        state.check_qubit(q)?;
    }
    if let Some(m) = matrix(gate) {
        return state.apply_single(gate.qubits()[0], m);
    }
    let (a, b) = match *gate {
        Gate::Cnot(a, b) | Gate::Cz(a, b) | Gate::Cy(a, b) | Gate::Swap(a, b) => (a, b),
        _ => unreachable!(),
    };
    if a == b {
        return Err(Error::QubitIndex { index: b, n: state.n });
    }
    let (ba, bb) = (state.bit(a), state.bit(b));
    let amps = &mut state.amps;
    for i in 0..amps.len() {
        // visit each (target 0, target 1) pair once
        if i & bb != 0 {
            continue;
        }
        let j = i | bb;
        match gate {
            Gate::Swap(..) => {
                if i & ba != 0 {
                    // i = (a=1, b=0), partner (a=0, b=1)
                    amps.swap(i, j ^ ba);
                }
            }
            _ if i & ba == 0 => {}
            Gate::Cnot(..) => amps.swap(i, j),
            Gate::Cz(..) => amps[j] = -amps[j],
            Gate::Cy(..) => {
                let (a0, a1) = (amps[i], amps[j]);
                amps[i] = -I * a1;
                amps[j] = I * a0;
            }
            _ => unreachable!(),
        }
    }
    Ok(())
}

pub fn apply_circuit(state: &DenseState, gates: &[Gate]) -> Result<DenseState> {
    let mut out = state.clone();
    for g in gates {
        apply_clifford_in_place(&mut out, g)?;
    }
    Ok(out)
}

pub fn expectation(state: &DenseState, p: &PauliProduct) -> Result<Complex64> {
    p.expectation(state)
}

/// Projects onto the `outcome` eigenspace of a Hermitian Pauli product.
/// Returns the outcome probability and the renormalized state.
pub fn measure_postselect(state: &DenseState, p: &PauliProduct, outcome: i8) -> Result<(f64, DenseState)> {
    if !p.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    let s = match outcome {
        1 => 1.0,
        -1 => -1.0,
        _ => return Err(Error::OutOfRange { value: outcome as f64, range: "{+1, -1}" }),
    };
    let pv = p.apply(state)?;
    let amps: Vec<Complex64> = state.amps.iter().zip(&pv).map(|(a, b)| (a + b * s) * 0.5).collect();
    let mut out = DenseState::new(state.n, amps)?;
    let prob = out.norm_sqr();
    if prob <= ZERO_PROBABILITY {
        return Err(Error::ZeroProbability);
    }
    out.normalize()?;
    Ok((prob, out))
}

/// Logical overlaps computed from explicit `|0_L>`, `|1_L>` vectors, with
/// `rho^{(x) n}` applied one qubit at a time.
pub fn dense_overlaps(s: &CodewordSet, rho: &SingleQubitDensity) -> Result<OverlapTriple> {
    let n = s.n();
    if n > MAX_QUBITS {
        return Err(Error::Guard(format!("dense overlaps support n <= {MAX_QUBITS}, got {n}")));
    }
    let norm = 1.0 / (s.len() as f64).sqrt();
    let ones = Bitword::ones(n).bits() as usize;
    let mut v0 = vec![c(0.0); 1 << n];
    let mut v1 = vec![c(0.0); 1 << n];
    for w in s.words() {
        v0[w.bits() as usize] = c(norm);
        v1[w.bits() as usize ^ ones] = c(norm);
    }
    let v0 = DenseState::new(n, v0)?;
    let v1 = DenseState::new(n, v1)?;
    let m = [[rho.entry(0, 0), rho.entry(0, 1)], [rho.entry(1, 0), rho.entry(1, 1)]];
    let mut w0 = v0.clone();
    let mut w1 = v1.clone();
    for q in 0..n {
        w0.apply_single(q, m)?;
        w1.apply_single(q, m)?;
    }
    Ok(OverlapTriple { a00: v0.inner(&w0).re, a11: v1.inner(&w1).re, a01: v0.inner(&w1) })
}

pub fn random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DenseState {
    let amps =
        (0..1usize << n).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    DenseState::normalized(n, amps).expect("gaussian vector is nonzero")
}

pub fn random_gate<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Gate {
    let a = rng.random_range(0..n);
    if n == 1 {
        return match rng.random_range(0..3) {
            0 => Gate::H(a),
            1 => Gate::S(a),
            _ => Gate::X(a),
        };
    }
    let mut b = rng.random_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    match rng.random_range(0..7) {
        0 | 1 => Gate::H(a),
        2 | 3 => Gate::S(a),
        4 => Gate::Cnot(a, b),
        5 => Gate::Cz(a, b),
        _ => Gate::X(a),
    }
}

/// Random Clifford circuit long enough to scramble small registers.
pub fn random_clifford<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Gate> {
    (0..8 * n * n + 8).map(|_| random_gate(n, rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{rm15_s, steane_s};
    use crate::distill::{overlap_general, overlaps_h_line};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    fn same_state(a: &DenseState, b: &DenseState) -> bool {
        a.amps.iter().zip(&b.amps).all(|(x, y)| close(*x, *y))
    }

    fn random_pauli(n: usize, rng: &mut ChaCha8Rng) -> PauliProduct {
        PauliProduct::from_masks(n, rng.random_range(0..1 << n), rng.random_range(0..1 << n), rng.random_range(0..4))
            .unwrap()
    }

    #[test]
    fn qubit_order_convention() {
        // X on qubit 1 of |00> gives |10>, the index with the high bit set
        let s = apply_clifford(&DenseState::zero(2), &Gate::X(0)).unwrap();
        assert_eq!(s.amps()[0b10], c(1.0));
        let p: PauliProduct = "XI".parse().unwrap();
        assert_eq!(p.x.bits(), 0b10);
        let v = p.apply(&DenseState::zero(2)).unwrap();
        assert_eq!(v[0b10], c(1.0));
    }

    #[test]
    fn gate_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = apply_clifford(&DenseState::zero(1), &Gate::H(0)).unwrap();
        assert!(close(plus.amps()[0], c(h)) && close(plus.amps()[1], c(h)));
        let s = apply_clifford(&DenseState::basis(2, 0b10), &Gate::Cnot(0, 1)).unwrap();
        assert_eq!(s, DenseState::basis(2, 0b11));
        let sp = apply_clifford(&plus, &Gate::S(0)).unwrap();
        assert!(close(sp.amps()[1], I * h));
        assert!(apply_clifford(&plus, &Gate::H(1)).is_err());
    }

    #[test]
    fn gate_identities_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let psi = random_state(3, &mut rng);
            let twice = |g: Gate, k: usize| {
                let mut s = psi.clone();
                for _ in 0..k {
                    apply_clifford_in_place(&mut s, &g).unwrap();
                }
                s
            };
            assert!(same_state(&twice(Gate::H(1), 2), &psi));
            assert!(same_state(&twice(Gate::S(2), 4), &psi));
            assert!(same_state(&twice(Gate::Cnot(2, 0), 2), &psi));
            assert!(same_state(&twice(Gate::Swap(0, 2), 2), &psi));
            assert!(same_state(&twice(Gate::Cy(0, 1), 2), &psi));
            let g = random_gate(3, &mut rng);
            assert!((apply_clifford(&psi, &g).unwrap().norm_sqr() - 1.0).abs() < 1e-14);
            let back = apply_clifford(&apply_clifford(&psi, &g).unwrap(), &g.inverse()).unwrap();
            assert!(same_state(&back, &psi));
        }
    }

    #[test]
    fn conjugation_matches_dense_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let gates = [
            Gate::H(0),
            Gate::S(1),
            Gate::Sdg(2),
            Gate::X(0),
            Gate::Y(1),
            Gate::Z(2),
            Gate::Cnot(0, 2),
            Gate::Cnot(2, 1),
            Gate::Cz(1, 0),
            Gate::Cy(2, 0),
            Gate::Swap(0, 1),
        ];
        for _ in 0..50 {
            let psi = random_state(3, &mut rng);
            let p = random_pauli(3, &mut rng);
            for g in &gates {
                // U P psi == (U P U^dag) U psi
                let lhs = apply_clifford(&DenseState::new(3, p.apply(&psi).unwrap()).unwrap(), g).unwrap();
                let upsi = apply_clifford(&psi, g).unwrap();
                let rhs = p.conjugate(g).apply(&upsi).unwrap();
                assert!(lhs.amps().iter().zip(&rhs).all(|(a, b)| close(*a, *b)), "{g} {p}");
                assert_eq!(p.conjugate(g).conjugate_inverse(g), p);
            }
        }
    }

    #[test]
    fn pauli_algebra() {
        let x: PauliProduct = "X".parse().unwrap();
        let z: PauliProduct = "Z".parse().unwrap();
        let y: PauliProduct = "Y".parse().unwrap();
        assert_eq!(x.mul(&z), "-iY".parse().unwrap());
        assert_eq!(z.mul(&x), "iY".parse().unwrap());
        assert_eq!(x.mul(&y), "iZ".parse().unwrap());
        assert!(!x.commutes(&z));
        let xx: PauliProduct = "XX".parse().unwrap();
        let zz: PauliProduct = "ZZ".parse().unwrap();
        assert!(xx.commutes(&zz));
        assert_eq!(xx.mul(&zz), "-YY".parse().unwrap());
        assert_eq!("-iXYZ".parse::<PauliProduct>().unwrap().to_string(), "-iXYZ");
        assert!("XQ".parse::<PauliProduct>().is_err());

        // products agree with dense multiplication
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let (a, b) = (random_pauli(3, &mut rng), random_pauli(3, &mut rng));
            let psi = random_state(3, &mut rng);
            let lhs = a.apply(&DenseState::new(3, b.apply(&psi).unwrap()).unwrap()).unwrap();
            let rhs = a.mul(&b).apply(&psi).unwrap();
            assert!(lhs.iter().zip(&rhs).all(|(u, v)| close(*u, *v)));
        }
    }

    #[test]
    fn postselection_examples() {
        let z: PauliProduct = "Z".parse().unwrap();
        let (p, s) = measure_postselect(&DenseState::zero(1), &z, 1).unwrap();
        assert_eq!(p, 1.0);
        assert_eq!(s, DenseState::zero(1));
        let plus = apply_clifford(&DenseState::zero(1), &Gate::H(0)).unwrap();
        let (p, s) = measure_postselect(&plus, &z, 1).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert!(same_state(&s, &DenseState::zero(1)));
        assert!(matches!(measure_postselect(&DenseState::zero(1), &z, -1), Err(Error::ZeroProbability)));
        assert!(matches!(measure_postselect(&plus, &"iZ".parse().unwrap(), 1), Err(Error::NotHermitian)));

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let psi = random_state(3, &mut rng);
            let mut p = random_pauli(3, &mut rng);
            p.phase = 0;
            if p.is_identity_up_to_phase() {
                continue;
            }
            let plus = measure_postselect(&psi, &p, 1).map(|r| r.0).unwrap_or(0.0);
            let minus = measure_postselect(&psi, &p, -1).map(|r| r.0).unwrap_or(0.0);
            assert!((plus + minus - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn canonical_reduction_state() {
        // alpha|0>|0..0> + beta|1>|+..+>, Z-postselect qubits 2..n
        let (alpha, beta) = (0.6, 0.8);
        for n in 2..=5usize {
            let m = n - 1;
            let mut amps = vec![c(0.0); 1 << n];
            amps[0] = c(alpha);
            let amp = beta / 2f64.powf(m as f64 / 2.0);
            for r in 0..1usize << m {
                amps[(1 << m) | r] += c(amp);
            }
            let mut psi = DenseState::normalized(n, amps).unwrap();
            let mut total = 1.0;
            for q in 1..n {
                let (p, s) = measure_postselect(&psi, &PauliProduct::single(n, q, 'Z').unwrap(), 1).unwrap();
                total *= p;
                psi = s;
            }
            // unnormalized alpha|0> + beta 2^{-m/2}|1>
            let b = beta * 2f64.powf(-(m as f64) / 2.0);
            assert!((total - (alpha * alpha + b * b)).abs() < 1e-12);
            let r = b / alpha;
            let expected_z = (1.0 - r * r) / (1.0 + r * r);
            assert!((psi.single_qubit_bloch(0).unwrap().z - expected_z).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_overlap_examples() {
        let s = steane_s();
        let diag = SingleQubitDensity { rho00: 1.0, rho11: 0.0, rho01: c(0.0), rho10: c(0.0) };
        let ov = dense_overlaps(&s, &diag).unwrap();
        assert!((ov.a00 - 1.0 / 8.0).abs() < 1e-15);

        let x = 0.3;
        let dense = dense_overlaps(&s, &BlochVector::on_h_line(x).to_density()).unwrap();
        let h = overlaps_h_line(&s).unwrap();
        assert!((dense.a00 - h.p00.eval_f64(x)).abs() < 1e-12);
        assert!((dense.a11 - h.p11.eval_f64(x)).abs() < 1e-12);
        assert!((dense.a01.re - h.p01.eval_f64(x)).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert!(dense_overlaps(&rm15_s(), &diag).is_err());
        let small =
            crate::codes::span_codewords(&[Bitword::parse("00011").unwrap(), Bitword::parse("01101").unwrap()], 5)
                .unwrap();
        for code in [steane_s(), small] {
            for _ in 0..5 {
                let v = crate::bloch::BlochVector::new(
                    rng.random_range(-0.57..0.57),
                    rng.random_range(-0.57..0.57),
                    rng.random_range(-0.57..0.57),
                );
                let rho = v.to_density();
                let a = dense_overlaps(&code, &rho).unwrap();
                let b = overlap_general(&code, &rho).unwrap();
                assert!(a.max_abs_diff(&b) < 1e-12);
            }
        }
    }

    #[test]
    fn state_file_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let psi = random_state(3, &mut rng);
        let back = DenseState::parse(&psi.format()).unwrap();
        assert!(same_state(&psi, &back));
        assert!(DenseState::parse("n=2\n1 0\n").is_err());
        assert!(DenseState::parse("n=1\n0 0\n0 0\n").is_err());
        assert!(DenseState::parse("x=1\n1 0\n0 0\n").is_err());
    }

    #[test]
    fn reduced_bloch() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let t = DenseState::normalized(1, vec![c(h), Complex64::from_polar(h, std::f64::consts::FRAC_PI_4)]).unwrap();
        let b = t.tensor(&DenseState::zero(1)).unwrap().single_qubit_bloch(0).unwrap();
        assert!((b.x - h).abs() < 1e-12 && (b.y - h).abs() < 1e-12 && b.z.abs() < 1e-12);
    }
}
