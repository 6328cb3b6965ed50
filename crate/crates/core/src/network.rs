//! Two atoms in two cavities joined by a fiber, truncated to at most N
//! excitations.
//!
//! Bare states are |A1 A2 C1 C2 F⟩. The two-atom block uses the order
//! |ee⟩, |eg⟩, |ge⟩, |gg⟩, matching the correlations module.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::correlations::BellDiagonalState;
use crate::error::{Error, Result};
use crate::qstate::{eigen_hermitian, hermitize, ComplexMatrix, DensityOperator, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BareState {
    pub a1: u8,
    pub a2: u8,
    pub c1: u32,
    pub c2: u32,
    pub f: u32,
}

impl BareState {
    pub const fn new(a1: u8, a2: u8, c1: u32, c2: u32, f: u32) -> Self {
        Self { a1, a2, c1, c2, f }
    }

    pub fn excitation(&self) -> u32 {
        self.a1 as u32 + self.a2 as u32 + self.c1 + self.c2 + self.f
    }

    /// Parses labels such as `eg000` or `gg010`.
    pub fn parse(label: &str) -> Result<Self> {
        let chars: Vec<char> = label.chars().collect();
        if chars.len() != 5 {
            return Err(Error::Input(format!("bare state label `{label}` must have 5 symbols")));
        }
        let atom = |c: char| match c {
            'e' => Ok(1u8),
            'g' => Ok(0u8),
            _ => Err(Error::Input(format!("atomic level `{c}` in `{label}` must be e or g"))),
        };
        let photons = |c: char| {
            c.to_digit(10)
                .ok_or_else(|| Error::Input(format!("photon count `{c}` in `{label}` is not a digit")))
        };
        Ok(Self::new(
            atom(chars[0])?,
            atom(chars[1])?,
            photons(chars[2])?,
            photons(chars[3])?,
            photons(chars[4])?,
        ))
    }

    pub fn label(&self) -> String {
        let a = |x: u8| if x == 1 { 'e' } else { 'g' };
        format!("{}{}{}{}{}", a(self.a1), a(self.a2), self.c1, self.c2, self.f)
    }
}

/// Bare basis: ground first, then by total excitation, lexicographic within
/// a sector.
#[derive(Debug, Clone)]
pub struct ExcitationBasis {
    n_max: u32,
    states: Vec<BareState>,
    index: HashMap<BareState, usize>,
}

/// 1 + d_N with d_N = N + 2·Σ_{k=1..N} k(k+1).
pub fn basis_dimension(n_max: u32) -> usize {
    let n = n_max as usize;
    1 + n + 2 * (1..=n).map(|k| k * (k + 1)).sum::<usize>()
}

pub fn enumerate_basis(n_max: u32) -> ExcitationBasis {
    let mut states = Vec::with_capacity(basis_dimension(n_max));
    for total in 0..=n_max {
        for a1 in 0..=1u8 {
            for a2 in 0..=1u8 {
                let atoms = (a1 + a2) as u32;
                if atoms > total {
                    continue;
                }
                let photons = total - atoms;
                for c1 in 0..=photons {
                    for c2 in 0..=photons - c1 {
                        states.push(BareState::new(a1, a2, c1, c2, photons - c1 - c2));
                    }
                }
            }
        }
    }
    let index = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    ExcitationBasis { n_max, states, index }
}

impl ExcitationBasis {
    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn states(&self) -> &[BareState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, s: &BareState) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn sector(&self, i: usize) -> u32 {
        self.states[i].excitation()
    }

    /// Indices of |ee000⟩, |eg000⟩, |ge000⟩, |gg000⟩; `None` where truncated away.
    pub fn atomic_vacuum_indices(&self) -> [Option<usize>; 4] {
        ATOM_ORDER.map(|(a1, a2)| self.index_of(&BareState::new(a1, a2, 0, 0, 0)))
    }

    pub fn total_excitation_operator(&self) -> ComplexMatrix {
        let n = self.len();
        ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(self.states[i].excitation() as f64, 0.0)
            } else {
                ZERO
            }
        })
    }

    /// Annihilation operator of channel 0 (cavity 1), 1 (cavity 2) or 2 (fiber).
    pub fn field_annihilation(&self, channel: usize) -> Result<ComplexMatrix> {
        if channel > 2 {
            return Err(Error::Input(format!("field channel {channel} out of range 0..3")));
        }
        let n = self.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (j, s) in self.states.iter().enumerate() {
            let mut t = *s;
            let count = match channel {
                0 => &mut t.c1,
                1 => &mut t.c2,
                _ => &mut t.f,
            };
            if *count == 0 {
                continue;
            }
            let amp = (*count as f64).sqrt();
            *count -= 1;
            let i = self.index_of(&t).expect("lowering stays inside the truncated basis");
            m[(i, j)] = Complex64::new(amp, 0.0);
        }
        Ok(m)
    }
}

const ATOM_ORDER: [(u8, u8); 4] = [(1, 1), (1, 0), (0, 1), (0, 0)];

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    pub omega_a: f64,
    pub omega_0: f64,
    pub omega_f: f64,
    pub g1: f64,
    pub g2: f64,
    pub j: f64,
    /// Base damping rates of cavity 1, cavity 2 and the fiber.
    pub gamma: [f64; 3],
    /// Reservoir temperatures (k_B = 1) of the same three channels.
    pub temps: [f64; 3],
}

impl NetworkParams {
    /// Checks hard invariants and returns soft warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let all = [
            self.omega_a, self.omega_0, self.omega_f, self.g1, self.g2, self.j,
        ];
        if all.iter().chain(&self.gamma).chain(&self.temps).any(|x| !x.is_finite()) {
            return Err(Error::Input("network parameters must be finite".into()));
        }
        if self.gamma.iter().any(|&g| g < 0.0) {
            return Err(Error::Input(format!("damping rates {:?} must be >= 0", self.gamma)));
        }
        if self.temps.iter().any(|&t| t < 0.0) {
            return Err(Error::Input(format!("temperatures {:?} must be >= 0", self.temps)));
        }
        let mut warnings = Vec::new();
        let gmax = self.gamma.iter().cloned().fold(0.0, f64::max);
        if 2.0 * self.g1.min(self.g2) <= gmax {
            warnings.push(format!(
                "rotating-wave guard: 2*min(g1, g2) = {} does not exceed max gamma = {}",
                2.0 * self.g1.min(self.g2),
                gmax
            ));
        }
        Ok(warnings)
    }
}

pub fn build_hamiltonian(params: &NetworkParams, basis: &ExcitationBasis) -> ComplexMatrix {
    let n = basis.len();
    let mut h = ComplexMatrix::zeros(n, n);
    let c = |x: f64| Complex64::new(x, 0.0);
    for (j, s) in basis.states().iter().enumerate() {
        let energy = params.omega_a * (s.a1 as f64 - 0.5 + s.a2 as f64 - 0.5)
            + params.omega_0 * (s.c1 + s.c2) as f64
            + params.omega_f * s.f as f64;
        h[(j, j)] = c(energy);

        let mut put = |t: BareState, amp: f64| {
            if let Some(i) = basis.index_of(&t) {
                h[(i, j)] += c(amp);
                h[(j, i)] += c(amp);
            }
        };
        // g S+ a: absorb a cavity photon into a ground-state atom
        if s.a1 == 0 && s.c1 > 0 {
            put(BareState { a1: 1, c1: s.c1 - 1, ..*s }, params.g1 * (s.c1 as f64).sqrt());
        }
        if s.a2 == 0 && s.c2 > 0 {
            put(BareState { a2: 1, c2: s.c2 - 1, ..*s }, params.g2 * (s.c2 as f64).sqrt());
        }
        // J a3 a_j†: move a fiber photon into cavity j
        if s.f > 0 {
            let fiber = (s.f as f64).sqrt();
            put(
                BareState { c1: s.c1 + 1, f: s.f - 1, ..*s },
                params.j * fiber * ((s.c1 + 1) as f64).sqrt(),
            );
            put(
                BareState { c2: s.c2 + 1, f: s.f - 1, ..*s },
                params.j * fiber * ((s.c2 + 1) as f64).sqrt(),
            );
        }
    }
    h
}

/// Eigenbasis of the network Hamiltonian. Column k of `transform` is the
/// dressed state |k̃⟩ in bare coordinates, so bare → dressed amplitudes are
/// `transform† ψ`.
#[derive(Debug, Clone)]
pub struct DressedBasis {
    pub energies: Vec<f64>,
    pub transform: ComplexMatrix,
    /// Total excitation of each dressed state.
    pub sectors: Vec<u32>,
}

/// Diagonalizes H sector by sector, so dressed states never mix excitation
/// numbers. The decoupled ground state is index 0; the rest are ascending.
pub fn dressed_states(h: &ComplexMatrix, basis: &ExcitationBasis) -> Result<DressedBasis> {
    let n = basis.len();
    if h.nrows() != n || h.ncols() != n {
        return Err(Error::Dimension(format!(
            "Hamiltonian is {}x{} but the basis has {n} states",
            h.nrows(),
            h.ncols()
        )));
    }
    // (energy, sector, sparse eigenvector)
    type Entry = (f64, u32, Vec<(usize, Complex64)>);
    let mut entries: Vec<Entry> = Vec::with_capacity(n);
    for sector in 0..=basis.n_max() {
        let idx: Vec<usize> = (0..n).filter(|&i| basis.sector(i) == sector).collect();
        let block = ComplexMatrix::from_fn(idx.len(), idx.len(), |a, b| h[(idx[a], idx[b])]);
        let eig = eigen_hermitian(&hermitize(&block))?;
        for k in 0..idx.len() {
            let col = idx
                .iter()
                .enumerate()
                .map(|(a, &i)| (i, eig.vectors[(a, k)]))
                .collect();
            entries.push((eig.values[k], sector, col));
        }
    }
    entries[1..].sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut transform = ComplexMatrix::zeros(n, n);
    let mut energies = Vec::with_capacity(n);
    let mut sectors = Vec::with_capacity(n);
    for (k, (e, s, col)) in entries.into_iter().enumerate() {
        energies.push(e);
        sectors.push(s);
        for (i, z) in col {
            transform[(i, k)] = z;
        }
    }
    Ok(DressedBasis {
        energies,
        transform,
        sectors,
    })
}

impl DressedBasis {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn to_dressed(&self, bare: &ComplexMatrix) -> ComplexMatrix {
        self.transform.adjoint() * bare * &self.transform
    }

    pub fn to_bare(&self, dressed: &ComplexMatrix) -> ComplexMatrix {
        &self.transform * dressed * self.transform.adjoint()
    }
}

#[derive(Debug, Clone)]
pub enum InitialState {
    BellDiagonal(BellDiagonalState),
    Bare(BareState),
    /// Arbitrary two-atom state in |ee⟩, |eg⟩, |ge⟩, |gg⟩ order, fields in vacuum.
    Atomic(DensityOperator),
}

/// ρ(0) = ρ_atoms ⊗ |000⟩⟨000| (or a bare projector), expressed in the dressed basis.
pub fn prepare_initial_state(
    init: &InitialState,
    basis: &ExcitationBasis,
    dressed: &DressedBasis,
) -> Result<DensityOperator> {
    let n = basis.len();
    let mut bare = ComplexMatrix::zeros(n, n);
    match init {
        InitialState::Bare(s) => {
            let i = basis.index_of(s).ok_or_else(|| {
                Error::Capacity(format!(
                    "state {} carries {} excitations but the basis holds {}",
                    s.label(),
                    s.excitation(),
                    basis.n_max()
                ))
            })?;
            bare[(i, i)] = Complex64::new(1.0, 0.0);
        }
        InitialState::BellDiagonal(_) | InitialState::Atomic(_) => {
            let atoms = match init {
                InitialState::BellDiagonal(bd) => bd.matrix(),
                InitialState::Atomic(rho) => rho.matrix().clone(),
                InitialState::Bare(_) => unreachable!(),
            };
            if atoms.nrows() != 4 || atoms.ncols() != 4 {
                return Err(Error::Dimension("atomic state must be 4x4".into()));
            }
            let idx = basis.atomic_vacuum_indices();
            for a in 0..4 {
                for b in 0..4 {
                    let z = atoms[(a, b)];
                    if z == ZERO {
                        continue;
                    }
                    match (idx[a], idx[b]) {
                        (Some(i), Some(j)) => bare[(i, j)] = z,
                        _ if z.norm() <= 1e-15 => {}
                        _ => {
                            return Err(Error::Capacity(format!(
                                "atomic state populates |ee> but the basis holds {} excitation(s); need at least 2",
                                basis.n_max()
                            )))
                        }
                    }
                }
            }
        }
    }
    let rho = hermitize(&dressed.to_dressed(&bare));
    Ok(DensityOperator::from_matrix_unchecked(rho))
}

/// Rotates to the bare basis, projects the fields onto |000⟩ and renormalizes.
pub fn reduce_to_atoms(
    rho_dressed: &ComplexMatrix,
    dressed: &DressedBasis,
    basis: &ExcitationBasis,
) -> Result<(DensityOperator, f64)> {
    let idx = basis.atomic_vacuum_indices();
    let rows: Vec<usize> = idx.iter().flatten().copied().collect();
    let n = basis.len();
    // only the vacuum rows of V ρ V† are needed
    let v = ComplexMatrix::from_fn(rows.len(), n, |r, k| dressed.transform[(rows[r], k)]);
    let sub = &v * rho_dressed * v.adjoint();
    let mut atoms = ComplexMatrix::zeros(4, 4);
    let slot: Vec<usize> = (0..4).filter(|&a| idx[a].is_some()).collect();
    for (r, &a) in slot.iter().enumerate() {
        for (s, &b) in slot.iter().enumerate() {
            atoms[(a, b)] = sub[(r, s)];
        }
    }
    let p_vac: f64 = (0..4).map(|a| atoms[(a, a)].re).sum();
    if !(p_vac >= 1e-12) {
        return Err(Error::DegenerateProjection(p_vac));
    }
    let atoms = hermitize(&atoms.unscale(p_vac));
    let rho = DensityOperator::with_tolerance(atoms, 1e-7)?;
    Ok((rho, p_vac))
}
