//! Classical binary codes and the even-weight codeword set `S` whose uniform
//! superposition is the logical `|0_L>` of a CSS code with transversal
//! logical X and Z.
//!
//! Bit positions are numbered from 1 at the most significant end, so the
//! bitstring `0001111` has ones at positions 4 through 7.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub const MAX_LEN: usize = 32;
/// Largest generator rank we are willing to enumerate.
pub const MAX_DIM: usize = 24;
/// Largest set size for which all ordered pairs are enumerated (2^24 pairs).
pub const MAX_PAIR_SET: usize = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bitword {
    bits: u32,
    len: u8,
    weight: u8,
}

impl Bitword {
    pub fn new(bits: u32, len: usize) -> Result<Self> {
        if len > MAX_LEN {
            return Err(Error::CodeTooLong(len));
        }
        if len < MAX_LEN && bits >> len != 0 {
            return Err(Error::Parse(format!("word {bits:#x} has bits beyond length {len}")));
        }
        Ok(Self { bits, len: len as u8, weight: bits.count_ones() as u8 })
    }

    pub fn zero(len: usize) -> Self {
        Self { bits: 0, len: len as u8, weight: 0 }
    }

    pub fn ones(len: usize) -> Self {
        let bits = if len == MAX_LEN { u32::MAX } else { (1u32 << len) - 1 };
        Self { bits, len: len as u8, weight: len as u8 }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn weight(&self) -> u32 {
        self.weight as u32
    }

    /// Mask for 1-based position `pos`.
    pub fn position_mask(len: usize, pos: usize) -> u32 {
        1u32 << (len - pos)
    }

    /// Bit at 1-based position `pos`.
    pub fn get(&self, pos: usize) -> bool {
        self.bits & Self::position_mask(self.len(), pos) != 0
    }

    pub fn xor(&self, other: &Bitword) -> Bitword {
        let bits = self.bits ^ other.bits;
        Bitword { bits, len: self.len, weight: bits.count_ones() as u8 }
    }

    pub fn overlap(&self, other: &Bitword) -> u32 {
        (self.bits & other.bits).count_ones()
    }

    pub fn complement(&self) -> Bitword {
        self.xor(&Bitword::ones(self.len()))
    }

    /// Parses a string of `0`/`1`; the first character is position 1.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() > MAX_LEN {
            return Err(Error::CodeTooLong(s.len()));
        }
        let mut bits = 0u32;
        for ch in s.chars() {
            bits <<= 1;
            match ch {
                '0' => {}
                '1' => bits |= 1,
                _ => return Err(Error::Parse(format!("bad bit `{ch}` in `{s}`"))),
            }
        }
        Bitword::new(bits, s.len())
    }
}

impl fmt::Display for Bitword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for pos in 1..=self.len() {
            f.write_str(if self.get(pos) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Gaussian elimination over GF(2); returns a reduced basis.
fn gf2_basis(words: impl IntoIterator<Item = u32>) -> Vec<u32> {
    let mut basis: Vec<u32> = Vec::new();
    for w in words {
        let mut v = w;
        for b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodewordSet {
    n: usize,
    words: Vec<Bitword>,
    dim: usize,
}

impl CodewordSet {
    /// Builds a set from explicit words. The words are not required to form
    /// a linear code; `validate_s` reports on that.
    pub fn from_words(n: usize, words: impl IntoIterator<Item = Bitword>) -> Result<Self> {
        if n > MAX_LEN {
            return Err(Error::CodeTooLong(n));
        }
        let mut v: Vec<Bitword> = Vec::new();
        for w in words {
            if w.len() != n {
                return Err(Error::Parse(format!("word {w} does not have length {n}")));
            }
            v.push(w);
        }
        v.sort();
        v.dedup();
        let dim = gf2_basis(v.iter().map(|w| w.bits())).len();
        Ok(Self { n, words: v, dim })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> &[Bitword] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Rank of the words over GF(2).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn contains(&self, w: &Bitword) -> bool {
        self.words.binary_search(w).is_ok()
    }

    /// Keeps only the even-weight words.
    pub fn even_subcode(&self) -> CodewordSet {
        let words: Vec<Bitword> = self.words.iter().copied().filter(|w| w.weight() % 2 == 0).collect();
        let dim = gf2_basis(words.iter().map(|w| w.bits())).len();
        CodewordSet { n: self.n, words, dim }
    }
}

/// XOR-span of the generators.
pub fn span_codewords(generators: &[Bitword], n: usize) -> Result<CodewordSet> {
    if n > MAX_LEN {
        return Err(Error::CodeTooLong(n));
    }
    for g in generators {
        if g.len() != n {
            return Err(Error::Parse(format!("generator {g} does not have length {n}")));
        }
    }
    let basis = gf2_basis(generators.iter().map(|g| g.bits()));
    if basis.len() > MAX_DIM {
        return Err(Error::Guard(format!("rank {} exceeds {MAX_DIM}", basis.len())));
    }
    let mut bits = vec![0u32];
    for b in &basis {
        let extra: Vec<u32> = bits.iter().map(|w| w ^ b).collect();
        bits.extend(extra);
    }
    let mut words: Vec<Bitword> =
        bits.into_iter().map(|b| Bitword { bits: b, len: n as u8, weight: b.count_ones() as u8 }).collect();
    words.sort();
    Ok(CodewordSet { n, words, dim: basis.len() })
}

/// Number of codewords of each weight.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WeightDistribution(pub BTreeMap<u32, u64>);

impl WeightDistribution {
    pub fn count(&self, weight: u32) -> u64 {
        self.0.get(&weight).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }
}

pub fn weight_distribution(s: &CodewordSet) -> WeightDistribution {
    let mut map = BTreeMap::new();
    for w in s.words() {
        *map.entry(w.weight()).or_insert(0) += 1;
    }
    WeightDistribution(map)
}

/// Counts of `(|a|, |b|, |a xor b|)` over ordered pairs `(a, b)` in `S x S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairWeightTable {
    n: usize,
    set_size: usize,
    counts: BTreeMap<(u32, u32, u32), u64>,
}

impl PairWeightTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn set_size(&self) -> usize {
        self.set_size
    }

    pub fn count(&self, wa: u32, wb: u32, wc: u32) -> u64 {
        self.counts.get(&(wa, wb, wc)).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> impl Iterator<Item = ((u32, u32, u32), u64)> + '_ {
        self.counts.iter().map(|(k, v)| (*k, *v))
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Sums over `wb` and `wc`, giving `|S|` times the weight distribution.
    pub fn marginal_a(&self) -> BTreeMap<u32, u64> {
        let mut out = BTreeMap::new();
        for ((wa, _, _), c) in self.entries() {
            *out.entry(wa).or_insert(0) += c;
        }
        out
    }
}

pub fn pair_weight_table(s: &CodewordSet) -> Result<PairWeightTable> {
    if s.len() > MAX_PAIR_SET {
        return Err(Error::Guard(format!("{} codewords exceed the pair enumeration limit of {MAX_PAIR_SET}", s.len())));
    }
    let side = s.n() + 1;
    let words: Vec<u32> = s.words().iter().map(|w| w.bits()).collect();
    // dense (wa, wb, wc) histogram; integer sums are order independent
    let flat = words
        .par_iter()
        .fold(
            || vec![0u64; side * side * side],
            |mut acc, &a| {
                let wa = a.count_ones() as usize;
                for &b in &words {
                    let wb = b.count_ones() as usize;
                    let wc = (a ^ b).count_ones() as usize;
                    acc[(wa * side + wb) * side + wc] += 1;
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; side * side * side],
            |mut x, y| {
                x.iter_mut().zip(y).for_each(|(a, b)| *a += b);
                x
            },
        );
    let mut counts = BTreeMap::new();
    for (idx, c) in flat.into_iter().enumerate() {
        if c > 0 {
            let wc = idx % side;
            let wb = (idx / side) % side;
            let wa = idx / (side * side);
            counts.insert((wa as u32, wb as u32, wc as u32), c);
        }
    }
    Ok(PairWeightTable { n: s.n(), set_size: s.len(), counts })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub is_linear: bool,
    pub all_even_weights: bool,
    pub self_orthogonal: bool,
    pub all_ones_excluded: bool,
    pub messages: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.is_linear && self.all_even_weights && self.self_orthogonal && self.all_ones_excluded
    }

    pub fn into_result(self) -> Result<()> {
        if self.passed() {
            Ok(())
        } else {
            Err(Error::InvalidCode(self.messages.join("; ")))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "linear:            {}", self.is_linear)?;
        writeln!(f, "even weights:      {}", self.all_even_weights)?;
        writeln!(f, "self-orthogonal:   {}", self.self_orthogonal)?;
        writeln!(f, "all-ones excluded: {}", self.all_ones_excluded)?;
        for m in &self.messages {
            writeln!(f, "  {m}")?;
        }
        write!(f, "{}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

pub fn validate_s(s: &CodewordSet) -> ValidationReport {
    let mut messages = Vec::new();
    let zero = Bitword::zero(s.n());

    let basis = gf2_basis(s.words().iter().map(|w| w.bits()));
    let is_linear = s.contains(&zero) && s.len() == 1usize << basis.len();
    if !is_linear {
        messages.push("set is not closed under XOR".to_string());
    }

    let odd: Vec<_> = s.words().iter().filter(|w| w.weight() % 2 == 1).collect();
    let all_even_weights = odd.is_empty();
    if let Some(w) = odd.first() {
        messages.push(format!("{} odd-weight words, e.g. {w}", odd.len()));
    }

    // the overlap form is bilinear, so a basis suffices for linear sets
    let check: Vec<u32> = if is_linear { basis } else { s.words().iter().map(|w| w.bits()).collect() };
    let mut self_orthogonal = true;
    'outer: for (i, a) in check.iter().enumerate() {
        for b in &check[i..] {
            if (a & b).count_ones() % 2 == 1 {
                self_orthogonal = false;
                messages.push(format!(
                    "odd overlap between {} and {}",
                    Bitword { bits: *a, len: s.n() as u8, weight: a.count_ones() as u8 },
                    Bitword { bits: *b, len: s.n() as u8, weight: b.count_ones() as u8 }
                ));
                break 'outer;
            }
        }
    }

    let all_ones_excluded = !s.contains(&Bitword::ones(s.n()));
    if !all_ones_excluded {
        messages.push("all-ones word is in S".to_string());
    }

    ValidationReport { is_linear, all_even_weights, self_orthogonal, all_ones_excluded, messages }
}

fn words_from(strings: &[&str]) -> Vec<Bitword> {
    strings.iter().map(|s| Bitword::parse(s).expect("built-in word")).collect()
}

/// Even-weight codewords of the 7-bit Hamming code.
pub fn steane_s() -> CodewordSet {
    let gens = words_from(&["0001111", "0110011", "1010101"]);
    span_codewords(&gens, 7).expect("steane generators")
}

/// Generator polynomial `x^11 + x^10 + x^6 + x^5 + x^4 + x^2 + 1` of the
/// cyclic [23,12,7] Golay code, bit `i` = coefficient of `x^i`.
const GOLAY_POLY: u32 = 0b1100_0111_0101;

/// The full [23,12,7] Golay code.
pub fn golay_code() -> CodewordSet {
    let n = 23;
    let gens: Vec<Bitword> = (0..12)
        .map(|shift| {
            // coefficient of x^i sits at position i + 1
            let mut bits = 0u32;
            for i in 0..23 {
                if (GOLAY_POLY << shift) >> i & 1 == 1 {
                    bits |= Bitword::position_mask(n, i + 1);
                }
            }
            Bitword::new(bits, n).expect("golay generator")
        })
        .collect();
    span_codewords(&gens, n).expect("golay generators")
}

/// Even-weight subcode (dimension 11) of the Golay code.
pub fn golay_s() -> CodewordSet {
    golay_code().even_subcode()
}

/// Even-weight support of `|0_L>` for the 15-qubit punctured Reed-Muller
/// code: the [15,4,8] simplex code, whose columns are the numbers 1..15.
pub fn rm15_s() -> CodewordSet {
    let n = 15;
    let gens: Vec<Bitword> = (0..4)
        .map(|k| {
            let mut bits = 0u32;
            for pos in 1..=15usize {
                if (pos >> k) & 1 == 1 {
                    bits |= Bitword::position_mask(n, pos);
                }
            }
            Bitword::new(bits, n).expect("rm15 generator")
        })
        .collect();
    span_codewords(&gens, n).expect("rm15 generators")
}

/// Parses the text code format: `n=<int>` followed by one generator
/// bitstring per line. Blank lines and `#` comments are skipped.
pub fn parse_code_file(text: &str) -> Result<CodewordSet> {
    let mut lines = text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty code file".into()))?;
    let n: usize = header
        .strip_prefix("n=")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| Error::Parse(format!("expected `n=<int>`, got `{header}`")))?;
    if n > MAX_LEN {
        return Err(Error::CodeTooLong(n));
    }
    let mut gens = Vec::new();
    for line in lines {
        let w = Bitword::parse(line)?;
        if w.len() != n {
            return Err(Error::Parse(format!("generator `{line}` is not of length {n}")));
        }
        gens.push(w);
    }
    span_codewords(&gens, n)
}

pub fn format_code_file(n: usize, generators: &[Bitword]) -> String {
    let mut out = format!("n={n}\n");
    for g in generators {
        out.push_str(&g.to_string());
        out.push('\n');
    }
    out
}

/// Checks that a set of words is closed under XOR by brute force.
pub fn is_closed_brute_force(s: &CodewordSet) -> bool {
    let set: HashSet<u32> = s.words().iter().map(|w| w.bits()).collect();
    s.words().iter().all(|a| s.words().iter().all(|b| set.contains(&(a.bits() ^ b.bits()))))
}

/// Random valid `S` on `n` positions spanned by at most `max_gens` even,
/// mutually orthogonal generators, with the all-ones word kept out.
pub fn random_valid_s<R: Rng + ?Sized>(rng: &mut R, n: usize, max_gens: usize) -> CodewordSet {
    let target = rng.random_range(0..=max_gens);
    let mut gens: Vec<Bitword> = Vec::new();
    for _ in 0..500 {
        if gens.len() >= target {
            break;
        }
        let w = Bitword::new(rng.random_range(0..1u32 << n), n).expect("n <= 32");
        if w.weight() % 2 == 1 || gens.iter().any(|g| g.overlap(&w) % 2 == 1) {
            continue;
        }
        let mut cand = gens.clone();
        cand.push(w);
        let s = span_codewords(&cand, n).expect("small span");
        if s.dim() == cand.len() && validate_s(&s).passed() {
            gens = cand;
        }
    }
    span_codewords(&gens, n).expect("small span")
}
