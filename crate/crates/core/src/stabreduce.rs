//! Stabilizer-state detection and the constructive reduction of a
//! non-stabilizer pure state to one qubit that is not a Pauli eigenstate,
//! using Cliffords and postselected Pauli measurements.
//!
//! Scripts list every measurement in the frame of the input state, followed
//! by the Clifford gates that move the surviving state onto the final qubit.

use std::fmt;

use rand::Rng;

use crate::bloch::BlochVector;
use crate::error::{Error, Result};
use crate::oracle::{self, apply_clifford_in_place, measure_postselect, DenseState, Gate, PauliProduct};

pub const MAX_QUBITS: usize = 8;
pub const UNIT_TOL: f64 = 1e-9;
pub const NON_EIGEN_TOL: f64 = 1e-6;

/// `n` independent commuting Pauli products (restricted to `qubits`) that
/// each have expectation `+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilizerWitness {
    pub n: usize,
    pub qubits: Vec<usize>,
    pub generators: Vec<PauliProduct>,
}

fn pauli_on(n: usize, qubits: &[usize], code: usize) -> PauliProduct {
    let mut p = PauliProduct::identity(n);
    for (j, &q) in qubits.iter().enumerate() {
        let letter = (code >> (2 * j)) & 3;
        p.set_letter(q, letter & 1 == 1, letter & 2 == 2);
    }
    p
}

/// Pauli products supported on `qubits` whose expectation has magnitude 1,
/// returned with the sign that makes the expectation `+1`.
pub fn unit_paulis(psi: &DenseState, qubits: &[usize]) -> Result<Vec<PauliProduct>> {
    let mut out = Vec::new();
    for code in 1..1usize << (2 * qubits.len()) {
        let p = pauli_on(psi.n(), qubits, code);
        let e = p.expectation(psi)?.re;
        if e >= 1.0 - UNIT_TOL {
            out.push(p);
        } else if e <= -1.0 + UNIT_TOL {
            out.push(p.negate());
        }
    }
    Ok(out)
}

fn symplectic(p: &PauliProduct) -> u64 {
    ((p.x.bits() as u64) << 32) | p.z.bits() as u64
}

/// Greedy GF(2)-independent subset.
fn independent(ps: &[PauliProduct]) -> Vec<PauliProduct> {
    let mut basis: Vec<u64> = Vec::new();
    let mut chosen = Vec::new();
    for p in ps {
        let mut v = symplectic(p);
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
            chosen.push(*p);
        }
    }
    chosen
}

/// Stabilizer witness for the part of `psi` living on `qubits`, assuming
/// the rest of the register is in a product state with it.
pub fn stabilizer_witness_on(psi: &DenseState, qubits: &[usize]) -> Result<Option<StabilizerWitness>> {
    let gens = independent(&unit_paulis(psi, qubits)?);
    if gens.len() == qubits.len() {
        Ok(Some(StabilizerWitness { n: psi.n(), qubits: qubits.to_vec(), generators: gens }))
    } else {
        Ok(None)
    }
}

pub fn is_stabilizer_state(psi: &DenseState) -> Result<Option<StabilizerWitness>> {
    if psi.n() > MAX_QUBITS {
        return Err(Error::Guard(format!("stabilizer search supports n <= {MAX_QUBITS}, got {}", psi.n())));
    }
    let all: Vec<usize> = (0..psi.n()).collect();
    stabilizer_witness_on(psi, &all)
}

fn has_support(p: &PauliProduct, q: usize) -> bool {
    p.letter(q) != 'I'
}

struct Tableau {
    rows: Vec<PauliProduct>,
    gates: Vec<Gate>,
}

impl Tableau {
    fn apply(&mut self, g: Gate) {
        for r in &mut self.rows {
            *r = r.conjugate(&g);
        }
        self.gates.push(g);
    }

    /// Rotates the letter of row `r` at qubit `q` to `Z`.
    fn letter_to_z(&mut self, r: usize, q: usize) {
        match self.rows[r].letter(q) {
            'X' => self.apply(Gate::H(q)),
            'Y' => {
                self.apply(Gate::Sdg(q));
                self.apply(Gate::H(q));
            }
            _ => {}
        }
    }

    /// Clears qubit `q` from every row except `pivot` (which is `+-Z_q`).
    fn eliminate(&mut self, pivot: usize, q: usize) {
        let p = self.rows[pivot];
        for r in 0..self.rows.len() {
            if r != pivot && has_support(&self.rows[r], q) {
                self.rows[r] = self.rows[r].mul(&p);
            }
        }
    }
}

fn check_witness(w: &StabilizerWitness) -> Result<()> {
    let g = &w.generators;
    if g.len() != w.qubits.len() {
        return Err(Error::InconsistentWitness(format!("{} generators for {} qubits", g.len(), w.qubits.len())));
    }
    let allowed: u32 = w.qubits.iter().map(|&q| crate::codes::Bitword::position_mask(w.n, q + 1)).sum();
    for (i, a) in g.iter().enumerate() {
        if !a.is_hermitian() || a.support() & !allowed != 0 {
            return Err(Error::InconsistentWitness(format!(
                "generator {a} is not a Hermitian product on the witness qubits"
            )));
        }
        if g[i + 1..].iter().any(|b| !a.commutes(b)) {
            return Err(Error::InconsistentWitness(format!("generator {a} does not commute with the others")));
        }
    }
    if independent(g).len() != g.len() {
        return Err(Error::InconsistentWitness("generators are dependent".into()));
    }
    Ok(())
}

/// Clifford circuit taking the state stabilized by the witness to `|0...0>`
/// on the witness qubits, by symplectic elimination of the generator rows.
pub fn clifford_to_computational(w: &StabilizerWitness) -> Result<Vec<Gate>> {
    check_witness(w)?;
    let mut t = Tableau { rows: w.generators.clone(), gates: Vec::new() };
    let qs = &w.qubits;
    for (i, &q) in qs.iter().enumerate() {
        let r = (i..t.rows.len())
            .find(|&r| has_support(&t.rows[r], q))
            .ok_or_else(|| Error::InconsistentWitness(format!("no pivot for qubit {}", q + 1)))?;
        t.rows.swap(i, r);
        t.letter_to_z(i, q);
        for &other in &qs[i + 1..] {
            if has_support(&t.rows[i], other) {
                t.letter_to_z(i, other);
                t.apply(Gate::Cnot(other, q));
            }
        }
        t.eliminate(i, q);
    }
    for (i, &q) in qs.iter().enumerate() {
        if t.rows[i].phase == 2 {
            t.apply(Gate::X(q));
        }
    }
    Ok(t.gates)
}

/// Fidelity of `circuit * psi` with `|0>` on `qubits`.
pub fn replay_to_computational(psi: &DenseState, qubits: &[usize], circuit: &[Gate]) -> Result<f64> {
    let out = oracle::apply_circuit(psi, circuit)?;
    let mut f = 1.0;
    for &q in qubits {
        f *= (1.0 + out.single_qubit_bloch(q)?.z) / 2.0;
    }
    Ok(f)
}

/// Circuit of diagonal Cliffords that keeps `|0...0>` fixed and takes the
/// witness state to `|+...+>`. Requires the generators' X parts to have
/// full rank.
fn x_normal_form(w: &StabilizerWitness) -> Result<Vec<Gate>> {
    check_witness(w)?;
    let mut t = Tableau { rows: w.generators.clone(), gates: Vec::new() };
    let qs = &w.qubits;
    let x_at = |p: &PauliProduct, q: usize| matches!(p.letter(q), 'X' | 'Y');
    for (i, &q) in qs.iter().enumerate() {
        let r = (i..t.rows.len())
            .find(|&r| x_at(&t.rows[r], q))
            .ok_or_else(|| Error::Invariant("branch stabilizer has a Z-type element".into()))?;
        t.rows.swap(i, r);
        let p = t.rows[i];
        for r in 0..t.rows.len() {
            if r != i && x_at(&t.rows[r], q) {
                t.rows[r] = t.rows[r].mul(&p);
            }
        }
    }
    // X part is now the identity; the Z part is symmetric
    for (i, &q) in qs.iter().enumerate() {
        if t.rows[i].letter(q) == 'Y' {
            t.apply(Gate::Sdg(q));
        }
        for &other in &qs[i + 1..] {
            if t.rows[i].letter(other) == 'Z' {
                t.apply(Gate::Cz(q, other));
            }
        }
    }
    for (i, &q) in qs.iter().enumerate() {
        if t.rows[i].phase == 2 {
            t.apply(Gate::Z(q));
        }
    }
    Ok(t.gates)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScriptStep {
    Clifford(Gate),
    Measure(PauliProduct, i8),
}

impl fmt::Display for ScriptStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScriptStep::Clifford(g) => write!(f, "C {g}"),
            ScriptStep::Measure(p, o) => write!(f, "M {p} {}", if *o > 0 { "+1" } else { "-1" }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementScript {
    pub n: usize,
    pub steps: Vec<ScriptStep>,
    /// 0-based index of the surviving qubit.
    pub final_qubit: usize,
}

impl MeasurementScript {
    pub fn measurements(&self) -> Vec<(PauliProduct, i8)> {
        self.steps
            .iter()
            .filter_map(|s| match s {
                ScriptStep::Measure(p, o) => Some((*p, *o)),
                _ => None,
            })
            .collect()
    }

    pub fn measurement_count(&self) -> usize {
        self.measurements().len()
    }

    pub fn measurements_commute(&self) -> bool {
        let m = self.measurements();
        m.iter().enumerate().all(|(i, a)| m[i + 1..].iter().all(|b| a.0.commutes(&b.0)))
    }

    /// Text form: `n=<n>` header, one step per line, then `final <q>`.
    pub fn to_text(&self) -> String {
        let mut out = format!("n={}\n", self.n);
        for s in &self.steps {
            out.push_str(&format!("{s}\n"));
        }
        out.push_str(&format!("final {}\n", self.final_qubit + 1));
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty script".into()))?;
        let n: usize = header
            .strip_prefix("n=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad script header {header:?}")))?;
        let mut steps = Vec::new();
        let mut final_qubit = None;
        for line in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.as_slice() {
                ["C", name, qs @ ..] => {
                    let qs: Vec<usize> = qs
                        .iter()
                        .map(|q| q.parse().map_err(|_| Error::Parse(format!("bad qubit in {line:?}"))))
                        .collect::<Result<_>>()?;
                    let g = Gate::parse(name, &qs)?;
                    if g.qubits().iter().any(|&q| q >= n) {
                        return Err(Error::Parse(format!("qubit out of range in {line:?}")));
                    }
                    steps.push(ScriptStep::Clifford(g));
                }
                ["M", p, o] => {
                    let p: PauliProduct = p.parse()?;
                    if p.n() != n {
                        return Err(Error::Parse(format!("Pauli length mismatch in {line:?}")));
                    }
                    let o = match *o {
                        "+1" | "1" => 1,
                        "-1" => -1,
                        _ => return Err(Error::Parse(format!("bad outcome in {line:?}"))),
                    };
                    steps.push(ScriptStep::Measure(p, o));
                }
                ["final", q] => {
                    let q: usize = q.parse().map_err(|_| Error::Parse(format!("bad final qubit {q:?}")))?;
                    if q == 0 || q > n {
                        return Err(Error::Parse(format!("final qubit {q} out of range")));
                    }
                    final_qubit = Some(q - 1);
                }
                _ => return Err(Error::Parse(format!("unrecognized script line {line:?}"))),
            }
        }
        let final_qubit = final_qubit.ok_or_else(|| Error::Parse("missing final line".into()))?;
        Ok(Self { n, steps, final_qubit })
    }
}

struct Reducer {
    state: DenseState,
    frame: Vec<Gate>,
    measurements: Vec<ScriptStep>,
    active: Vec<usize>,
}

impl Reducer {
    fn gate(&mut self, g: Gate) -> Result<()> {
        apply_clifford_in_place(&mut self.state, &g)?;
        self.frame.push(g);
        Ok(())
    }

    fn gates(&mut self, gs: &[Gate]) -> Result<()> {
        gs.iter().try_for_each(|g| self.gate(*g))
    }

    /// Postselects `p` (given in the working frame) and records it in the
    /// input frame.
    fn measure(&mut self, p: &PauliProduct, outcome: i8) -> Result<()> {
        let (_, s) = measure_postselect(&self.state, p, outcome)?;
        self.state = s;
        let mut q = *p;
        for g in self.frame.iter().rev() {
            q = q.conjugate_inverse(g);
        }
        let outcome = if q.phase == 2 { -outcome } else { outcome };
        self.measurements.push(ScriptStep::Measure(q.unsigned(), outcome));
        Ok(())
    }

    fn drop_qubit(&mut self, q: usize) {
        self.active.retain(|&a| a != q);
    }

    fn max_pauli(&self, q: usize) -> Result<f64> {
        Ok(self.state.single_qubit_bloch(q)?.max_pauli_expectation())
    }

    /// Measures a unit-expectation product, then rotates it onto a single
    /// `Z` whose qubit leaves the active set.
    fn absorb_unit(&mut self, p: PauliProduct) -> Result<()> {
        self.measure(&p, 1)?;
        let pivot = self.active.iter().copied().find(|&q| has_support(&p, q)).expect("non-identity product");
        let mut t = Tableau { rows: vec![p], gates: Vec::new() };
        t.letter_to_z(0, pivot);
        for &other in &self.active.clone() {
            if other != pivot && has_support(&t.rows[0], other) {
                t.letter_to_z(0, other);
                t.apply(Gate::Cnot(other, pivot));
            }
        }
        if t.rows[0].phase == 2 {
            t.apply(Gate::X(pivot));
        }
        self.gates(&t.gates)?;
        self.drop_qubit(pivot);
        Ok(())
    }

    fn branch(&self, q: usize, outcome: i8) -> Result<DenseState> {
        Ok(measure_postselect(&self.state, &PauliProduct::single(self.state.n(), q, 'Z')?, outcome)?.1)
    }

    fn step(&mut self) -> Result<()> {
        let n = self.state.n();
        if let Some(p) = unit_paulis(&self.state, &self.active)?.first() {
            return self.absorb_unit(*p);
        }
        let q1 = self.active[0];
        let rest: Vec<usize> = self.active[1..].to_vec();
        let phi0 = self.branch(q1, 1)?;
        let w0 = stabilizer_witness_on(&phi0, &rest)?;
        let Some(w0) = w0 else {
            self.measure(&PauliProduct::single(n, q1, 'Z')?, 1)?;
            self.drop_qubit(q1);
            return Ok(());
        };
        let phi1 = self.branch(q1, -1)?;
        if stabilizer_witness_on(&phi1, &rest)?.is_none() {
            self.measure(&PauliProduct::single(n, q1, 'Z')?, -1)?;
            self.gate(Gate::X(q1))?;
            self.drop_qubit(q1);
            return Ok(());
        }

        // both branches are stabilizer states: bring them to |0..0> and |+..+>
        let c0 = clifford_to_computational(&w0)?;
        if replay_to_computational(&phi0, &rest, &c0)? < 1.0 - UNIT_TOL {
            return Err(Error::Invariant("branch circuit failed replay".into()));
        }
        self.gates(&c0)?;
        let phi1 = self.branch(q1, -1)?;
        let w1 = stabilizer_witness_on(&phi1, &rest)?
            .ok_or_else(|| Error::Invariant("Clifford changed stabilizer status".into()))?;
        let d = x_normal_form(&w1)?;
        self.gates(&d)?;

        let saved = (self.state.clone(), self.frame.clone(), self.measurements.clone());
        for q in &rest {
            self.measure(&PauliProduct::single(n, *q, 'Z')?, 1)?;
        }
        if self.max_pauli(q1)? < 1.0 - NON_EIGEN_TOL {
            self.active = vec![q1];
            return Ok(());
        }
        (self.state, self.frame, self.measurements) = saved;
        for q in &rest {
            self.measure(&PauliProduct::single(n, *q, 'X')?, 1)?;
        }
        for q in &rest {
            self.gate(Gate::H(*q))?;
        }
        if self.max_pauli(q1)? < 1.0 - NON_EIGEN_TOL {
            self.active = vec![q1];
            return Ok(());
        }
        Err(Error::Invariant("neither postselection path leaves a non-Pauli-eigenstate".into()))
    }
}

/// Reduces a non-stabilizer state to a single non-Pauli-eigenstate qubit.
pub fn reduce_state(psi: &DenseState) -> Result<(MeasurementScript, BlochVector)> {
    let n = psi.n();
    if n < 2 {
        return Err(Error::TooFewQubits(n));
    }
    if is_stabilizer_state(psi)?.is_some() {
        return Err(Error::StabilizerInput);
    }
    let mut r = Reducer { state: psi.clone(), frame: Vec::new(), measurements: Vec::new(), active: (0..n).collect() };
    while r.active.len() > 1 {
        r.step()?;
    }
    let final_qubit = r.active[0];
    let bloch = r.state.single_qubit_bloch(final_qubit)?;
    if bloch.max_pauli_expectation() >= 1.0 - NON_EIGEN_TOL {
        return Err(Error::Invariant("reduced qubit is a Pauli eigenstate".into()));
    }
    let mut steps = r.measurements;
    steps.extend(r.frame.into_iter().map(ScriptStep::Clifford));
    let script = MeasurementScript { n, steps, final_qubit };
    if script.measurement_count() != n - 1 {
        return Err(Error::Invariant(format!("{} measurements for n={n}", script.measurement_count())));
    }
    Ok((script, bloch))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScriptReplay {
    pub probability: f64,
    pub final_bloch: BlochVector,
}

/// Replays a script through the dense oracle.
pub fn verify_script(psi: &DenseState, script: &MeasurementScript) -> Result<ScriptReplay> {
    if script.n != psi.n() || script.final_qubit >= psi.n() {
        return Err(Error::Parse(format!("script for n={} applied to n={}", script.n, psi.n())));
    }
    let mut state = psi.clone();
    let mut probability = 1.0;
    for s in &script.steps {
        match s {
            ScriptStep::Clifford(g) => apply_clifford_in_place(&mut state, g)?,
            ScriptStep::Measure(p, o) => {
                let (pr, next) = measure_postselect(&state, p, *o)?;
                probability *= pr;
                state = next;
            }
        }
    }
    if probability <= 0.0 {
        return Err(Error::ZeroProbability);
    }
    Ok(ScriptReplay { probability, final_bloch: state.single_qubit_bloch(script.final_qubit)? })
}

pub fn random_stabilizer_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DenseState {
    let c = oracle::random_clifford(n, rng);
    oracle::apply_circuit(&DenseState::zero(n), &c).expect("valid circuit")
}

/// Haar-random qubit tensored with random stabilizer junk, then scrambled
/// by a random Clifford.
pub fn random_non_stabilizer_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DenseState {
    let magic = oracle::random_state(1, rng);
    let junk = random_stabilizer_state(n - 1, rng);
    let psi = magic.tensor(&junk).expect("small register");
    let c = oracle::random_clifford(n, rng);
    oracle::apply_circuit(&psi, &c).expect("valid circuit")
}
