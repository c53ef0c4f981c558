//! Cavity ⊗ junction state space and the master-equation generator.
//!
//! Basis ordering: the state with `n` photons and junction level `j`
//! (g = 0, e = 1) sits at index `2n + j`, so g precedes e within every photon
//! number. Hamiltonians are stored in units of ħ (rad/ns).
//!
//! The dense superoperator acts on column-stacked density matrices:
//! `vec(ρ)[i + dim·k] = ρ[i, k]`, for which `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::units::{Frame, SimParams};
use crate::wkb::Level;

pub type CMatrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Truncated cavity Fock space tensored with the two junction levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HilbertSpace {
    n_max: usize,
}

impl HilbertSpace {
    pub fn new(n_max: usize) -> Self {
        HilbertSpace { n_max }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }

    /// Basis index of `|level, n⟩`.
    pub fn index(&self, level: Level, photons: usize) -> usize {
        assert!(
            photons <= self.n_max,
            "photon number {photons} above truncation {}",
            self.n_max
        );
        2 * photons
            + match level {
                Level::Ground => 0,
                Level::Excited => 1,
            }
    }

    /// The basis state at `index`.
    pub fn state(&self, index: usize) -> (Level, usize) {
        assert!(index < self.dim());
        let level = if index.is_multiple_of(2) {
            Level::Ground
        } else {
            Level::Excited
        };
        (level, index / 2)
    }

    /// Total excitation number `n + j` of a basis index.
    pub fn excitations(&self, index: usize) -> usize {
        let (level, n) = self.state(index);
        n + usize::from(level == Level::Excited)
    }

    pub fn basis(&self) -> Vec<(Level, usize)> {
        (0..self.dim()).map(|i| self.state(i)).collect()
    }

    fn zeros(&self) -> CMatrix {
        CMatrix::zeros(self.dim(), self.dim())
    }

    pub fn identity(&self) -> CMatrix {
        CMatrix::identity(self.dim(), self.dim())
    }

    /// Cavity annihilation operator `a ⊗ 1`.
    pub fn annihilation(&self) -> CMatrix {
        let mut a = self.zeros();
        for n in 1..=self.n_max {
            for level in [Level::Ground, Level::Excited] {
                a[(self.index(level, n - 1), self.index(level, n))] = real((n as f64).sqrt());
            }
        }
        a
    }

    /// Junction lowering operator `1 ⊗ σ₋`.
    pub fn lowering(&self) -> CMatrix {
        let mut s = self.zeros();
        for n in 0..=self.n_max {
            s[(self.index(Level::Ground, n), self.index(Level::Excited, n))] = ONE;
        }
        s
    }

    /// Projector on a junction level, `1 ⊗ |j⟩⟨j|`.
    pub fn projector(&self, level: Level) -> CMatrix {
        let mut p = self.zeros();
        for n in 0..=self.n_max {
            let i = self.index(level, n);
            p[(i, i)] = ONE;
        }
        p
    }

    /// Cavity photon number `a†a ⊗ 1`.
    pub fn number(&self) -> CMatrix {
        let mut m = self.zeros();
        for i in 0..self.dim() {
            m[(i, i)] = real(self.state(i).1 as f64);
        }
        m
    }
}

/// Density matrix of the cavity–junction system.
///
/// The trace drops below one as probability leaks into the voltage state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub fn from_matrix(m: CMatrix) -> Self {
        assert!(m.is_square(), "density matrix must be square");
        DensityMatrix(m)
    }

    /// `|level, n⟩⟨level, n|`.
    pub fn pure(space: &HilbertSpace, level: Level, photons: usize) -> Self {
        let mut m = space.zeros();
        let i = space.index(level, photons);
        m[(i, i)] = ONE;
        DensityMatrix(m)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn matrix_mut(&mut self) -> &mut CMatrix {
        &mut self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// Real part of the trace.
    pub fn trace(&self) -> f64 {
        self.0.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn population(&self, index: usize) -> f64 {
        self.0[(index, index)].re
    }

    /// `max |ρ − ρ†|` over entries.
    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.0)
    }

    /// Replaces ρ with (ρ + ρ†)/2.
    pub fn symmetrize(&mut self) {
        symmetrize(&mut self.0);
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let mut h = self.0.clone();
        symmetrize(&mut h);
        h.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Embeds the state into a larger truncation, padding with zeros.
    pub fn embed(&self, space: &HilbertSpace) -> DensityMatrix {
        let d = self.dim();
        assert!(space.dim() >= d);
        let mut m = space.zeros();
        m.view_mut((0, 0), (d, d)).copy_from(&self.0);
        DensityMatrix(m)
    }
}

pub(crate) fn hermiticity_error(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for k in i..n {
            worst = worst.max((m[(i, k)] - m[(k, i)].conj()).norm());
        }
    }
    worst
}

pub(crate) fn symmetrize(m: &mut CMatrix) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)].im = 0.0;
        for k in (i + 1)..n {
            let avg = (m[(i, k)] + m[(k, i)].conj()) * 0.5;
            m[(i, k)] = avg;
            m[(k, i)] = avg.conj();
        }
    }
}

/// Jaynes–Cummings Hamiltonian divided by ħ.
///
/// Rotating frame (at ω_r): `−Δ Π_e + (Ω/2)(a†σ₋ + aσ₊)`.
/// Lab frame: `ω_r(a†a + ½) + ω_eg Π_e + (Ω/2)(a†σ₋ + aσ₊)`.
pub fn hamiltonian(p: &SimParams, space: &HilbertSpace, frame: Frame) -> CMatrix {
    let a = space.annihilation();
    let sm = space.lowering();
    let exchange = a.adjoint() * &sm + &a * sm.adjoint();
    let mut h = exchange * real(p.omega_rabi / 2.0);
    let pe = space.projector(Level::Excited);
    match frame {
        Frame::RotatingSecular => {
            h -= pe * real(p.detuning);
        }
        Frame::LabFull => {
            let half = space.identity() * real(0.5);
            h += (space.number() + half) * real(p.omega_cavity());
            h += pe * real(p.omega_eg);
        }
    }
    h
}

/// Lindblad damping term `rate · (AρA† − ½{A†A, ρ})`.
#[derive(Debug, Clone)]
pub struct Dissipator {
    pub rate: f64,
    jump: CMatrix,
    jump_dag: CMatrix,
    decay: CMatrix,
}

impl Dissipator {
    pub fn new(rate: f64, jump: CMatrix) -> Self {
        let jump_dag = jump.adjoint();
        let decay = &jump_dag * &jump;
        Dissipator {
            rate,
            jump,
            jump_dag,
            decay,
        }
    }

    pub fn jump(&self) -> &CMatrix {
        &self.jump
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let r = real(self.rate);
        (&self.jump * rho * &self.jump_dag - (&self.decay * rho + rho * &self.decay) * real(0.5))
            * r
    }

    /// Dense superoperator over column-stacked ρ.
    pub fn superoperator(&self) -> CMatrix {
        let id = CMatrix::identity(self.jump.nrows(), self.jump.nrows());
        let sandwich = self.jump.map(|z| z.conj()).kronecker(&self.jump);
        let left = id.kronecker(&self.decay);
        let right = self.decay.transpose().kronecker(&id);
        (sandwich - (left + right) * real(0.5)) * real(self.rate)
    }
}

/// The zero-temperature damping terms: cavity loss `κ, a` and junction
/// relaxation `γ, σ₋`, in that order.
pub fn damping_dissipators(p: &SimParams, space: &HilbertSpace) -> [Dissipator; 2] {
    [
        Dissipator::new(p.kappa, space.annihilation()),
        Dissipator::new(p.gamma, space.lowering()),
    ]
}

/// Which part of the tunneling operator is kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TunnelingMode {
    /// `Θ = Γ_e Π_e + Γ_g Π_g`.
    Secular,
    /// Adds the cross term `√(Γ_eΓ_g)(σ₊ + σ₋)`.
    Full,
}

impl From<Frame> for TunnelingMode {
    fn from(frame: Frame) -> Self {
        match frame {
            Frame::RotatingSecular => TunnelingMode::Secular,
            Frame::LabFull => TunnelingMode::Full,
        }
    }
}

/// Trace-decreasing escape term `−½{Θ ⊗ 1, ρ}`.
#[derive(Debug, Clone)]
pub struct Tunneling {
    pub mode: TunnelingMode,
    theta: CMatrix,
}

impl Tunneling {
    pub fn new(p: &SimParams, space: &HilbertSpace, mode: TunnelingMode) -> Self {
        let mut theta = space.projector(Level::Excited) * real(p.gamma_e)
            + space.projector(Level::Ground) * real(p.gamma_g);
        if mode == TunnelingMode::Full {
            let sm = space.lowering();
            theta += (sm.adjoint() + sm) * real((p.gamma_e * p.gamma_g).sqrt());
        }
        Tunneling { mode, theta }
    }

    /// The escape-rate operator Θ.
    pub fn theta(&self) -> &CMatrix {
        &self.theta
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        (&self.theta * rho + rho * &self.theta) * real(-0.5)
    }

    /// `Tr(Θρ)`, the instantaneous switching rate.
    pub fn leak_rate(&self, rho: &CMatrix) -> f64 {
        (&self.theta * rho).trace().re
    }

    pub fn superoperator(&self) -> CMatrix {
        let id = CMatrix::identity(self.theta.nrows(), self.theta.nrows());
        (id.kronecker(&self.theta) + self.theta.transpose().kronecker(&id)) * real(-0.5)
    }
}

/// The full generator `ρ ↦ −i[H, ρ] + L_κ[ρ] + L_γ[ρ] + L_T[ρ]`.
///
/// Matrix-free application uses the effective non-Hermitian Hamiltonian
/// `K = H − (i/2)(Σ c A†A + Θ)`, so that `L[ρ] = −i(Kρ − ρK†) + Σ c AρA†`.
/// The dense form is assembled term by term from Kronecker products and does
/// not go through `K`.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    space: HilbertSpace,
    frame: Frame,
    hamiltonian: CMatrix,
    dissipators: Vec<Dissipator>,
    tunneling: Tunneling,
    effective: CMatrix,
    effective_dag: CMatrix,
}

impl Liouvillian {
    /// Assembles the generator in the frame requested by `p`.
    pub fn new(p: &SimParams, space: HilbertSpace) -> Self {
        Self::with_frame(p, space, p.frame, p.frame.into())
    }

    pub fn with_frame(
        p: &SimParams,
        space: HilbertSpace,
        frame: Frame,
        mode: TunnelingMode,
    ) -> Self {
        let h = hamiltonian(p, &space, frame);
        let dissipators = damping_dissipators(p, &space).to_vec();
        let tunneling = Tunneling::new(p, &space, mode);
        Self::from_parts(space, frame, h, dissipators, tunneling)
    }

    pub fn from_parts(
        space: HilbertSpace,
        frame: Frame,
        hamiltonian: CMatrix,
        dissipators: Vec<Dissipator>,
        tunneling: Tunneling,
    ) -> Self {
        let mut loss = tunneling.theta.clone();
        for d in &dissipators {
            loss += &d.decay * real(d.rate);
        }
        let effective = &hamiltonian - loss * (I * 0.5);
        let effective_dag = effective.adjoint();
        Liouvillian {
            space,
            frame,
            hamiltonian,
            dissipators,
            tunneling,
            effective,
            effective_dag,
        }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn hamiltonian(&self) -> &CMatrix {
        &self.hamiltonian
    }

    pub fn dissipators(&self) -> &[Dissipator] {
        &self.dissipators
    }

    pub fn tunneling(&self) -> &Tunneling {
        &self.tunneling
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Writes `L[ρ]` into `out`.
    pub fn apply_into(&self, rho: &CMatrix, out: &mut CMatrix) {
        // out = −i K ρ
        out.gemm(-I, &self.effective, rho, ZERO);
        // out += i ρ K†
        out.gemm(I, rho, &self.effective_dag, ONE);
        for d in &self.dissipators {
            if d.rate == 0.0 {
                continue;
            }
            let left = &d.jump * rho;
            out.gemm(real(d.rate), &left, &d.jump_dag, ONE);
        }
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(rho.nrows(), rho.ncols());
        self.apply_into(rho, &mut out);
        out
    }

    /// Dense `dim² × dim²` matrix over column-stacked ρ.
    pub fn dense(&self) -> CMatrix {
        let id = self.space.identity();
        let h = &self.hamiltonian;
        let mut l = (id.kronecker(h) - h.transpose().kronecker(&id)) * (-I);
        for d in &self.dissipators {
            l += d.superoperator();
        }
        l += self.tunneling.superoperator();
        l
    }

    /// `Tr(Θρ)`; equals `−Tr L[ρ]`.
    pub fn leak_rate(&self, rho: &CMatrix) -> f64 {
        self.tunneling.leak_rate(rho)
    }
}

/// Column-stacks a square matrix.
pub fn vectorize(m: &CMatrix) -> nalgebra::DVector<Complex64> {
    nalgebra::DVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &nalgebra::DVector<Complex64>, dim: usize) -> CMatrix {
    assert_eq!(v.len(), dim * dim);
    CMatrix::from_column_slice(dim, dim, v.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::wkb::Level::{Excited as E, Ground as G};
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn random_hermitian(dim: usize, rng: &mut StdRng) -> CMatrix {
        let m = CMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        (&m + m.adjoint()) * real(0.5)
    }

    fn max_abs(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn params(n: usize) -> SimParams {
        let mut p = presets::baseline().with_n_init(n);
        p.gamma_g = 0.013;
        p.detuning = 0.37;
        p.kappa = 0.021;
        p
    }

    #[test]
    fn space_layout() {
        let s0 = HilbertSpace::new(0);
        assert_eq!(s0.dim(), 2);
        assert_eq!(s0.basis(), vec![(G, 0), (E, 0)]);
        assert_eq!(HilbertSpace::new(1).dim(), 4);
        let s2 = HilbertSpace::new(2);
        assert_eq!(s2.index(E, 2), 5);
        let mut seen = vec![false; s2.dim()];
        for (level, n) in s2.basis() {
            let i = s2.index(level, n);
            assert!(!seen[i]);
            seen[i] = true;
            assert_eq!(s2.state(i), (level, n));
        }
    }

    #[test]
    fn ladder_matrix_elements() {
        let s = HilbertSpace::new(3);
        let op = s.annihilation().adjoint() * s.lowering();
        for n in 0..3 {
            let z = op[(s.index(G, n + 1), s.index(E, n))];
            assert!((z.re - ((n + 1) as f64).sqrt()).abs() < 1e-15 && z.im == 0.0);
        }
    }

    #[test]
    fn hamiltonian_vanishes_without_coupling_or_detuning() {
        let mut p = params(2);
        p.omega_rabi = 0.0;
        p.detuning = 0.0;
        let h = hamiltonian(&p, &HilbertSpace::new(2), Frame::RotatingSecular);
        assert_eq!(max_abs(&h), 0.0);
    }

    #[test]
    fn single_excitation_coupling() {
        let mut p = params(1);
        p.detuning = 0.0;
        let s = HilbertSpace::new(1);
        let h = hamiltonian(&p, &s, Frame::RotatingSecular);
        for i in 0..4 {
            for k in 0..4 {
                let pair = (s.state(i), s.state(k));
                let expected = if pair == ((E, 0), (G, 1)) || pair == ((G, 1), (E, 0)) {
                    p.omega_rabi / 2.0
                } else {
                    0.0
                };
                assert!((h[(i, k)] - real(expected)).norm() < 1e-15);
            }
        }
        let block = CMatrix::from_fn(2, 2, |r, c| {
            let idx = [s.index(E, 0), s.index(G, 1)];
            h[(idx[r], idx[c])]
        });
        let mut ev: Vec<f64> = block.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        assert!((ev[1] - ev[0] - p.omega_rabi).abs() < 1e-14);
    }

    #[test]
    fn damping_examples() {
        let p = params(1);
        let s = HilbertSpace::new(1);
        let [cavity, junction] = damping_dissipators(&p, &s);

        let excited = DensityMatrix::pure(&s, E, 0).into_matrix();
        let got = junction.apply(&excited);
        let want = (DensityMatrix::pure(&s, G, 0).into_matrix() - &excited) * real(p.gamma);
        assert!(max_abs(&(got - want)) < 1e-16);

        let photon = DensityMatrix::pure(&s, G, 1).into_matrix();
        let got = cavity.apply(&photon);
        let want = (DensityMatrix::pure(&s, G, 0).into_matrix() - &photon) * real(p.kappa);
        assert!(max_abs(&(got - want)) < 1e-16);

        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..20 {
            let rho = random_hermitian(4, &mut rng);
            assert!(cavity.apply(&rho).trace().norm() < 1e-14);
            assert!(junction.apply(&rho).trace().norm() < 1e-14);
        }
    }

    #[test]
    fn tunneling_examples() {
        let mut p = params(1);
        let s = HilbertSpace::new(1);
        let ground = DensityMatrix::pure(&s, G, 0).into_matrix();
        let t = Tunneling::new(&p, &s, TunnelingMode::Secular);
        assert!(max_abs(&(t.apply(&ground) + &ground * real(p.gamma_g))) < 1e-18);

        p.gamma_g = 0.0;
        p.gamma_e = 0.0;
        let mut rng = StdRng::seed_from_u64(5);
        let rho = random_hermitian(4, &mut rng);
        for mode in [TunnelingMode::Secular, TunnelingMode::Full] {
            assert_eq!(max_abs(&Tunneling::new(&p, &s, mode).apply(&rho)), 0.0);
        }
    }

    /// The printed 2×2 block form of the escape term, applied to every
    /// photon-index pair (n, m).
    fn printed_tunneling(rho: &CMatrix, s: &HilbertSpace, ge: f64, gg: f64) -> CMatrix {
        let cross = (ge * gg).sqrt() / 2.0;
        let mut out = CMatrix::zeros(s.dim(), s.dim());
        for n in 0..=s.n_max() {
            for m in 0..=s.n_max() {
                let r = |a, b| rho[(s.index(a, n), s.index(b, m))];
                let (ee, eg, ge_, gg_) = (r(E, E), r(E, G), r(G, E), r(G, G));
                out[(s.index(E, n), s.index(E, m))] = -(ee * ge + (eg + ge_) * cross);
                out[(s.index(E, n), s.index(G, m))] =
                    -(eg * ((ge + gg) / 2.0) + (ee + gg_) * cross);
                out[(s.index(G, n), s.index(E, m))] =
                    -(ge_ * ((ge + gg) / 2.0) + (ee + gg_) * cross);
                out[(s.index(G, n), s.index(G, m))] = -(gg_ * gg + (eg + ge_) * cross);
            }
        }
        out
    }

    #[test]
    fn full_tunneling_matches_printed_block_form() {
        let mut rng = StdRng::seed_from_u64(11);
        for n_max in [0, 1, 2] {
            let s = HilbertSpace::new(n_max);
            let mut p = params(n_max);
            p.gamma_e = rng.gen_range(0.01..1.0);
            p.gamma_g = rng.gen_range(1e-4..1e-2);
            let t = Tunneling::new(&p, &s, TunnelingMode::Full);
            for _ in 0..10 {
                let rho = random_hermitian(s.dim(), &mut rng);
                let diff = t.apply(&rho) - printed_tunneling(&rho, &s, p.gamma_e, p.gamma_g);
                assert!(
                    max_abs(&diff) < 1e-15,
                    "n_max = {n_max}: {}",
                    max_abs(&diff)
                );
            }
        }
    }

    #[test]
    fn generator_vanishes_when_everything_is_off() {
        let mut p = params(2);
        p.omega_rabi = 0.0;
        p.detuning = 0.0;
        p.kappa = 0.0;
        p.gamma = 0.0;
        p.gamma_g = 0.0;
        p.gamma_e = 0.0;
        let l = Liouvillian::new(&p, HilbertSpace::new(2));
        assert_eq!(max_abs(&l.dense()), 0.0);
        let mut rng = StdRng::seed_from_u64(1);
        assert_eq!(max_abs(&l.apply(&random_hermitian(6, &mut rng))), 0.0);
    }

    #[test]
    fn generator_properties_on_random_inputs() {
        let mut rng = StdRng::seed_from_u64(42);
        for (frame, n) in [
            (Frame::RotatingSecular, 1),
            (Frame::RotatingSecular, 3),
            (Frame::LabFull, 2),
        ] {
            let mut p = params(n);
            p.frame = frame;
            let l = Liouvillian::new(&p, HilbertSpace::new(n));
            let dense = l.dense();
            let dim = l.dim();
            for _ in 0..100 {
                let rho = random_hermitian(dim, &mut rng);
                let out = l.apply(&rho);
                // dense and matrix-free agree
                let via_dense = unvectorize(&(&dense * vectorize(&rho)), dim);
                let scale = max_abs(&out).max(1.0);
                assert!(max_abs(&(&via_dense - &out)) < 1e-12 * scale);
                // Hermiticity preserved
                assert!(hermiticity_error(&out) < 1e-12 * scale);
                // trace leak identity
                let leak = l.leak_rate(&rho);
                assert!((out.trace().re + leak).abs() < 1e-12 * scale);
                assert!(out.trace().im.abs() < 1e-12 * scale);
            }
        }
    }

    #[test]
    fn trace_preserved_without_tunneling() {
        let mut p = params(2);
        p.gamma_e = 0.0;
        p.gamma_g = 0.0;
        let l = Liouvillian::new(&p, HilbertSpace::new(2));
        let mut rng = StdRng::seed_from_u64(8);
        for _ in 0..20 {
            let out = l.apply(&random_hermitian(6, &mut rng));
            assert!(out.trace().norm() < 1e-13);
        }
    }

    #[test]
    fn excitation_number_is_never_raised() {
        let mut rng = StdRng::seed_from_u64(9);
        let n_init = 2;
        let s = HilbertSpace::new(n_init + 2);
        let l = Liouvillian::new(&params(n_init), s);
        for _ in 0..20 {
            let mut rho = random_hermitian(s.dim(), &mut rng);
            for i in 0..s.dim() {
                for k in 0..s.dim() {
                    if s.excitations(i) > n_init || s.excitations(k) > n_init {
                        rho[(i, k)] = ZERO;
                    }
                }
            }
            let out = l.apply(&rho);
            for i in 0..s.dim() {
                for k in 0..s.dim() {
                    if s.excitations(i) > n_init || s.excitations(k) > n_init {
                        assert_eq!(out[(i, k)], ZERO);
                    }
                }
            }
        }
    }

    #[test]
    fn density_matrix_helpers() {
        let s = HilbertSpace::new(1);
        let rho = DensityMatrix::pure(&s, G, 1);
        assert_eq!(rho.trace(), 1.0);
        assert_eq!(rho.hermiticity_error(), 0.0);
        assert!(rho.min_eigenvalue().abs() < 1e-15);
        let big = rho.embed(&HilbertSpace::new(3));
        assert_eq!(big.dim(), 8);
        assert_eq!(big.population(2), 1.0);

        let mut skew = CMatrix::zeros(2, 2);
        skew[(0, 1)] = Complex64::new(1.0, 0.5);
        let mut m = DensityMatrix::from_matrix(skew);
        assert!(m.hermiticity_error() > 1.0);
        m.symmetrize();
        assert_eq!(m.hermiticity_error(), 0.0);
    }
}
